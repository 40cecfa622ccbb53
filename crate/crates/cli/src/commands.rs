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

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use cba_core::evaluation::{group_report, DatasetMeta, Grouping};
use cba_core::model_file::{read_model, write_model};
use cba_core::report::{bench_document, eval_document, mean_accuracy, RunManifest};
use cba_core::{cross_validate, discretize, mine_cars, run_scenarios, CbaError, Dataset, MiningConfig};

use crate::{DataArgs, InputError, ModelArgs};

fn load(data: &DataArgs) -> Result<Dataset> {
    let dataset = Dataset::load_csv(&data.path, data.class_col.as_deref())
        .with_context(|| format!("loading {}", data.path.display()))?;
    if data.discretize.is_empty() {
        return Ok(dataset);
    }
    let columns: Vec<&str> = data.discretize.iter().map(String::as_str).collect();
    Ok(discretize(&dataset, &columns, data.bin_strategy, data.bins)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

pub fn inspect(data: &DataArgs) -> Result<()> {
    let d = load(data)?;
    let s = d.schema();
    let mut out = format!("rows: {}\nclass: {}\n", d.n(), s.class_attribute());
    for (c, count) in d.class_counts().iter().enumerate() {
        out.push_str(&format!("  {} {}\n", s.class_name(c as u32), count));
    }
    out.push_str(&format!(
        "majority: {}\nattributes: {}\n",
        s.class_name(d.majority_class()),
        s.num_attributes()
    ));
    for a in 0..s.num_attributes() as u32 {
        out.push_str(&format!(
            "  {} ({} values): {}\n",
            s.attribute_name(a),
            s.values(a).len(),
            s.values(a).join(" ")
        ));
    }
    emit(None, &out)
}

pub fn mine(data: &DataArgs, minsup: f64, minconf: f64, output: Option<&Path>) -> Result<()> {
    let config = MiningConfig::new(minsup, minconf)?;
    let d = load(data)?;
    let cars = mine_cars(&d, &config);
    emit(output, &cba_core::mining::format_rules(&cars, d.schema()))
}

pub fn train(data: &DataArgs, model: &ModelArgs, output: &Path, merge_report: Option<&Path>) -> Result<()> {
    let config = model.config()?;
    let d = load(data)?;
    let trained = cba_core::train(&d, &config)?;
    fs::write(output, write_model(&trained.classifier)).with_context(|| format!("writing {}", output.display()))?;
    if let Some(path) = merge_report {
        let report = trained
            .merge_report
            .as_ref()
            .ok_or_else(|| InputError("--merge-report needs --model cba-odm2".into()))?;
        fs::write(path, report.to_text(d.schema())).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(None, &trained.classifier.to_text())
}

pub fn predict(model: &Path, input: &Path, output: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(model).map_err(|source| CbaError::Io {
        path: model.to_path_buf(),
        source,
    })?;
    let classifier = read_model(&text)?;
    let schema = &classifier.schema;
    let file = fs::File::open(input).map_err(|source| CbaError::Io {
        path: input.to_path_buf(),
        source,
    })?;
    let (header, records) = cba_core::dataset::read_table(file, input)?;
    let columns: Vec<usize> = schema
        .attributes()
        .iter()
        .map(|a| {
            header
                .iter()
                .position(|h| h == a)
                .ok_or_else(|| InputError(format!("{}: missing attribute column `{a}`", input.display())))
        })
        .collect::<std::result::Result<_, _>>()?;

    let mut out = header.join(",");
    out.push_str(",predicted\n");
    for (r, record) in records.iter().enumerate() {
        if record.len() != header.len() {
            return Err(CbaError::RaggedRow {
                row: r + 1,
                expected: header.len(),
                found: record.len(),
            }
            .into());
        }
        let values: Vec<Option<u32>> = columns
            .iter()
            .enumerate()
            .map(|(a, &c)| schema.value_id(a as u32, &record[c]))
            .collect();
        out.push_str(&record.join(","));
        out.push(',');
        out.push_str(schema.class_name(classifier.predict_values(&values)));
        out.push('\n');
    }
    emit(output, &out)
}

pub fn eval(data: &DataArgs, model: &ModelArgs, output: Option<&Path>, argv: Vec<String>) -> Result<()> {
    let config = model.config()?;
    let d = load(data)?;
    let report = cross_validate(&d, &config)?;
    let manifest = RunManifest::new("eval", &data.path.display().to_string(), Some(config)).with_argv(argv);
    let doc = eval_document(&manifest, &report);
    emit(output, &(serde_json::to_string_pretty(&doc)? + "\n"))
}

pub fn bench(
    dir: &Path,
    class_col: Option<&str>,
    model: &ModelArgs,
    scenarios: &[(f64, f64)],
    output: Option<&Path>,
    argv: Vec<String>,
) -> Result<()> {
    let config = model.config()?;
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|source| CbaError::Io {
            path: dir.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(InputError(format!("no CSV files in {}", dir.display())).into());
    }

    let mut results = Vec::new();
    for path in &paths {
        let d = Dataset::load_csv(path, class_col).with_context(|| format!("loading {}", path.display()))?;
        let name = path
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        let report = run_scenarios(&d, &config, scenarios).with_context(|| format!("evaluating {name}"))?;
        results.push((DatasetMeta::of(name, &d), report));
    }
    let accuracies: Vec<(DatasetMeta, f64)> = results.iter().map(|(m, r)| (m.clone(), mean_accuracy(r))).collect();
    let groups: Vec<_> = Grouping::ALL
        .into_iter()
        .map(|g| (g, group_report(&accuracies, g)))
        .collect();
    let manifest = RunManifest::new("bench", &dir.display().to_string(), Some(config)).with_argv(argv);
    let doc = bench_document(&manifest, &results, &groups);
    emit(output, &(serde_json::to_string_pretty(&doc)? + "\n"))
}

/// Reads the invocation stored in a report's manifest.
pub fn recorded_argv(report: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(report).map_err(|source| CbaError::Io {
        path: report.to_path_buf(),
        source,
    })?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", report.display())))?;
    let manifest: RunManifest = serde_json::from_value(doc["manifest"].clone())
        .map_err(|e| InputError(format!("{}: bad manifest: {e}", report.display())))?;
    if manifest.argv.is_empty() {
        return Err(InputError(format!("{}: manifest records no command line", report.display())).into());
    }
    Ok(manifest.argv)
}
