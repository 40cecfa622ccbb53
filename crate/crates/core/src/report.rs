// Copyright 2026 The cba-rs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! JSON report documents with an embedded run manifest.
//!
//! Every fraction is rendered twice, as `"exact": "a/b"` and as a decimal.
//! `timestamp` and `wall_clock_ms` are the only fields that vary between
//! reruns of the same command; [`strip_volatile`] removes them.

use std::time::{SystemTime, UNIX_EPOCH};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::evaluation::{CvReport, DatasetMeta, GroupRow, Grouping, ModelConfig, ScenarioReport};
use crate::fraction::Frac;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub dataset: String,
    pub config: Option<ModelConfig>,
    pub version: String,
    pub timestamp: u64,
    pub seed: Option<u64>,
    /// Command line that produced the report, for reruns.
    #[serde(default)]
    pub argv: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, dataset: &str, config: Option<ModelConfig>) -> Self {
        RunManifest {
            command: command.to_string(),
            dataset: dataset.to_string(),
            seed: config.as_ref().map(|c| c.seed),
            config,
            version: ARTIFACT_VERSION.to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            argv: Vec::new(),
        }
    }

    pub fn with_argv(mut self, argv: Vec<String>) -> Self {
        self.argv = argv;
        self
    }
}

pub fn frac_json(f: Frac) -> Value {
    json!({ "exact": f.to_string(), "decimal": f.value() })
}

pub fn ratio_json(r: Ratio<u64>) -> Value {
    json!({
        "exact": format!("{}/{}", r.numer(), r.denom()),
        "decimal": *r.numer() as f64 / *r.denom() as f64,
    })
}

pub fn cv_json(report: &CvReport) -> Value {
    json!({
        "folds": report.folds.iter().map(|f| json!({
            "fold": f.fold,
            "test_rows": f.test_rows,
            "error": frac_json(f.error),
            "rule_count": f.rule_count,
            "car_count": f.car_count,
            "wall_clock_ms": f.wall_clock_ms,
        })).collect::<Vec<_>>(),
        "average_error": ratio_json(report.average_error),
        "average_accuracy": ratio_json(report.average_accuracy),
        "rules_per_fold": report.folds.iter().map(|f| f.rule_count).collect::<Vec<_>>(),
    })
}

pub fn eval_document(manifest: &RunManifest, report: &CvReport) -> Value {
    let mut doc = cv_json(report);
    doc["manifest"] = json!(manifest);
    doc
}

pub fn scenario_json(report: &ScenarioReport) -> Value {
    Value::Array(
        report
            .entries
            .iter()
            .map(|(s, cv)| {
                let mut v = cv_json(cv);
                v["minsup"] = json!(s.minsup);
                v["minconf"] = json!(s.minconf);
                v
            })
            .collect(),
    )
}

/// Mean of the scenario accuracies of one dataset.
pub fn mean_accuracy(report: &ScenarioReport) -> f64 {
    if report.entries.is_empty() {
        return 0.0;
    }
    report
        .entries
        .iter()
        .map(|(_, cv)| *cv.average_accuracy.numer() as f64 / *cv.average_accuracy.denom() as f64)
        .sum::<f64>()
        / report.entries.len() as f64
}

pub fn bench_document(
    manifest: &RunManifest,
    datasets: &[(DatasetMeta, ScenarioReport)],
    groups: &[(Grouping, Vec<GroupRow>)],
) -> Value {
    json!({
        "manifest": manifest,
        "datasets": datasets.iter().map(|(meta, rep)| json!({
            "meta": meta,
            "mean_accuracy": mean_accuracy(rep),
            "scenarios": scenario_json(rep),
        })).collect::<Vec<_>>(),
        "groups": groups.iter().map(|(g, rows)| json!({
            "grouping": g.as_str(),
            "rows": rows,
        })).collect::<Vec<_>>(),
    })
}

/// Removes `timestamp` and `wall_clock_ms` everywhere in the document.
pub fn strip_volatile(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.remove("timestamp");
            map.remove("wall_clock_ms");
            map.values_mut().for_each(strip_volatile);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_volatile),
        _ => {}
    }
}
