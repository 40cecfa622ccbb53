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

//! Cross-validation, the minsup/minconf scenario protocol and grouped
//! accuracy summaries.

use std::str::FromStr;
use std::time::Instant;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{build_classifier, prune_general, rank_rules, Classifier, Provenance};
use crate::dataset::Dataset;
use crate::error::{CbaError, Result};
use crate::fraction::Frac;
use crate::hybrid::{merge, MergeReport};
use crate::mining::{mine_cars, MiningConfig};
use crate::partition::{partition, FoldAssignment, PartitionStrategy};
use crate::tree::{build_tree, tree_to_rules, TreeSettings};

/// The four (minsup, minconf) settings used for benchmarking.
pub const DEFAULT_SCENARIOS: [(f64, f64); 4] = [(0.35, 0.50), (0.15, 0.50), (0.10, 0.50), (0.05, 0.50)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub family: Provenance,
    pub mining: MiningConfig,
    pub tree: TreeSettings,
    pub prune_general: bool,
    pub nfolds: usize,
    pub seed: u64,
    pub partition: PartitionStrategy,
    /// Worker threads for fold evaluation.
    pub jobs: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            family: Provenance::CbaOdm1,
            mining: MiningConfig::new(0.15, 0.50).expect("valid defaults"),
            tree: TreeSettings::default(),
            prune_general: true,
            nfolds: 10,
            seed: 0,
            partition: PartitionStrategy::Stratified,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub classifier: Classifier,
    /// CARs mined before pruning; 0 for the tree family.
    pub car_count: usize,
    pub merge_report: Option<MergeReport>,
}

/// Trains one model of the configured family.
///
/// * `cba-odm1`: mine CARs, optionally drop over-specific rules, rank,
///   then keep the rules selected by database coverage.
/// * `cba-odm2`: mine and rank CARs, build a decision tree and merge.
/// * `tree`: the decision tree on its own.
pub fn train(training: &Dataset, config: &ModelConfig) -> Result<TrainedModel> {
    match config.family {
        Provenance::CbaOdm1 => {
            let cars = mine_cars(training, &config.mining);
            let car_count = cars.len();
            let cars = if config.prune_general {
                prune_general(cars)
            } else {
                cars
            };
            let classifier = build_classifier(&rank_rules(cars), training);
            Ok(TrainedModel {
                classifier,
                car_count,
                merge_report: None,
            })
        }
        Provenance::CbaOdm2 => {
            let cars = mine_cars(training, &config.mining);
            let car_count = cars.len();
            let ranked = rank_rules(cars);
            let tree = build_tree(training, &config.tree);
            let (classifier, report) = merge(&ranked, &tree_to_rules(&tree), training)?;
            Ok(TrainedModel {
                classifier,
                car_count,
                merge_report: Some(report),
            })
        }
        Provenance::Tree => {
            let tree = build_tree(training, &config.tree);
            Ok(TrainedModel {
                classifier: tree.to_classifier(training.majority_class()),
                car_count: 0,
                merge_report: None,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub test_rows: usize,
    pub error: Frac,
    pub rule_count: usize,
    pub car_count: usize,
    /// Omitted from equality-sensitive report bodies.
    pub wall_clock_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvReport {
    pub folds: Vec<FoldResult>,
    pub average_error: Ratio<u64>,
    pub average_accuracy: Ratio<u64>,
    pub assignment: FoldAssignment,
}

impl CvReport {
    pub fn fold_errors(&self) -> Vec<Frac> {
        self.folds.iter().map(|f| f.error).collect()
    }
}

/// Exact arithmetic mean of fold error rates.
pub fn average_error(fold_errors: &[Frac]) -> Ratio<u64> {
    if fold_errors.is_empty() {
        return Ratio::from_integer(0);
    }
    let total = fold_errors
        .iter()
        .fold(Ratio::from_integer(0u64), |acc, e| acc + Ratio::new(e.num, e.den));
    total / Ratio::from_integer(fold_errors.len() as u64)
}

pub fn cross_validate(dataset: &Dataset, config: &ModelConfig) -> Result<CvReport> {
    if config.nfolds < 2 || config.nfolds > dataset.n() {
        return Err(CbaError::InvalidFolds {
            nfolds: config.nfolds,
            n: dataset.n(),
        });
    }
    let assignment = partition(dataset, config.nfolds, config.seed, config.partition)?;

    let run_fold = |fold: usize| -> Result<FoldResult> {
        let started = Instant::now();
        let train_idx = assignment.train_indices(fold);
        if train_idx.is_empty() {
            return Err(CbaError::EmptyTraining(fold));
        }
        let training = dataset.subset(&train_idx)?;
        let test = dataset
            .subset(&assignment.test_indices(fold))
            .map_err(|_| CbaError::EmptyTestSet)?;
        let model = train(&training, config)?;
        let error = model.classifier.error_rate(&test)?;
        Ok(FoldResult {
            fold,
            test_rows: test.n(),
            error,
            rule_count: model.classifier.rules.len(),
            car_count: model.car_count,
            wall_clock_ms: started.elapsed().as_secs_f64() * 1e3,
        })
    };

    let folds: Vec<FoldResult> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| (0..config.nfolds).into_par_iter().map(run_fold).collect::<Result<_>>())?
    } else {
        (0..config.nfolds).map(run_fold).collect::<Result<_>>()?
    };

    let average_error = average_error(&folds.iter().map(|f| f.error).collect::<Vec<_>>());
    Ok(CvReport {
        folds,
        average_accuracy: Ratio::from_integer(1) - average_error,
        average_error,
        assignment,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub minsup: f64,
    pub minconf: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioReport {
    pub entries: Vec<(Scenario, CvReport)>,
}

/// One cross-validation per scenario with the mining thresholds replaced
/// and everything else, the seed included, taken from `base`. An empty
/// scenario list means [`DEFAULT_SCENARIOS`].
pub fn run_scenarios(dataset: &Dataset, base: &ModelConfig, scenarios: &[(f64, f64)]) -> Result<ScenarioReport> {
    let scenarios = if scenarios.is_empty() {
        &DEFAULT_SCENARIOS[..]
    } else {
        scenarios
    };
    let entries = scenarios
        .iter()
        .map(|&(minsup, minconf)| {
            let config = ModelConfig {
                mining: MiningConfig::new(minsup, minconf)?,
                ..base.clone()
            };
            Ok((Scenario { minsup, minconf }, cross_validate(dataset, &config)?))
        })
        .collect::<Result<_>>()?;
    Ok(ScenarioReport { entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub name: String,
    pub attributes: usize,
    pub rows: usize,
    pub classes: usize,
}

impl DatasetMeta {
    pub fn of(name: impl Into<String>, dataset: &Dataset) -> Self {
        DatasetMeta {
            name: name.into(),
            attributes: dataset.schema().num_attributes(),
            rows: dataset.n(),
            classes: dataset.schema().num_classes(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    ByAttributeCount,
    ByRowCount,
    ByClassCount,
}

impl Grouping {
    pub const ALL: [Grouping; 3] = [Grouping::ByAttributeCount, Grouping::ByRowCount, Grouping::ByClassCount];

    pub fn as_str(self) -> &'static str {
        match self {
            Grouping::ByAttributeCount => "by-attribute-count",
            Grouping::ByRowCount => "by-row-count",
            Grouping::ByClassCount => "by-class-count",
        }
    }

    /// `(sort key, label)` of the bucket a dataset falls in.
    fn bucket(self, meta: &DatasetMeta) -> (usize, String) {
        match self {
            Grouping::ByRowCount => match meta.rows {
                r if r < 1000 => (0, "<1000".into()),
                r if r <= 5000 => (1, "1000-5000".into()),
                _ => (2, ">5000".into()),
            },
            Grouping::ByAttributeCount => match meta.attributes {
                0..=3 => (0, "<4".into()),
                4..=10 => (1, "4-10".into()),
                11..=20 => (2, "11-20".into()),
                21..=29 => (3, "21-29".into()),
                30..=50 => (4, "30-50".into()),
                _ => (5, ">50".into()),
            },
            Grouping::ByClassCount => (meta.classes, meta.classes.to_string()),
        }
    }
}

impl FromStr for Grouping {
    type Err = CbaError;

    fn from_str(s: &str) -> Result<Self> {
        Grouping::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| CbaError::UnknownGrouping(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: String,
    pub datasets: usize,
    pub mean_accuracy: f64,
}

/// Mean accuracy per bucket, buckets in ascending order, empty buckets
/// omitted.
pub fn group_report(reports: &[(DatasetMeta, f64)], grouping: Grouping) -> Vec<GroupRow> {
    let mut buckets: Vec<((usize, String), Vec<f64>)> = Vec::new();
    for (meta, accuracy) in reports {
        let key = grouping.bucket(meta);
        match buckets.iter_mut().find(|(k, _)| *k == key) {
            Some((_, accs)) => accs.push(*accuracy),
            None => buckets.push((key, vec![*accuracy])),
        }
    }
    buckets.sort_by(|a, b| a.0.cmp(&b.0));
    buckets
        .into_iter()
        .map(|((_, group), accs)| GroupRow {
            group,
            datasets: accs.len(),
            mean_accuracy: accs.iter().sum::<f64>() / accs.len() as f64,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE_I: &str = "A,B,C\ne,p,y\ne,p,y\ne,q,y\ng,q,y\ng,q,y\ng,q,n\ng,w,n\ng,w,n\ne,p,n\nf,q,n\n";

    fn worked_example() -> Dataset {
        Dataset::from_reader(TABLE_I.as_bytes(), None).unwrap()
    }

    #[test]
    fn average_of_listed_fold_errors_is_exact() {
        let errors: Vec<Frac> = [2, 0, 1, 1, 2, 0, 0, 1, 2, 1]
            .iter()
            .map(|&e| Frac::new(e, 10))
            .collect();
        assert_eq!(average_error(&errors), Ratio::new(1, 10));
    }

    #[test]
    fn leave_one_out_on_ten_rows() {
        let d = worked_example();
        for family in [Provenance::CbaOdm1, Provenance::CbaOdm2, Provenance::Tree] {
            let config = ModelConfig {
                family,
                mining: MiningConfig::new(0.15, 0.6).unwrap(),
                seed: 3,
                ..Default::default()
            };
            let report = cross_validate(&d, &config).unwrap();
            assert_eq!(report.folds.len(), 10);
            assert!(report
                .folds
                .iter()
                .all(|f| f.test_rows == 1 && (f.error.num == 0 || f.error.num == 1)));
            let wrong: u64 = report.folds.iter().map(|f| f.error.num).sum();
            assert_eq!(report.average_error, Ratio::new(wrong, 10));
            assert_eq!(report.average_error + report.average_accuracy, Ratio::from_integer(1));
            let again = cross_validate(&d, &config).unwrap();
            assert_eq!(again.fold_errors(), report.fold_errors());
            assert_eq!(again.assignment, report.assignment);
        }
    }

    #[test]
    fn fold_count_errors() {
        let d = worked_example();
        for nfolds in [0, 1, 11] {
            let config = ModelConfig {
                nfolds,
                ..Default::default()
            };
            assert!(matches!(
                cross_validate(&d, &config).unwrap_err(),
                CbaError::InvalidFolds { .. }
            ));
        }
    }

    #[test]
    fn parallel_folds_match_sequential() {
        let d = worked_example();
        let config = ModelConfig {
            nfolds: 5,
            ..Default::default()
        };
        let seq = cross_validate(&d, &config).unwrap();
        let par = cross_validate(&d, &ModelConfig { jobs: 4, ..config }).unwrap();
        assert_eq!(seq.fold_errors(), par.fold_errors());
        assert_eq!(
            seq.folds.iter().map(|f| f.fold).collect::<Vec<_>>(),
            par.folds.iter().map(|f| f.fold).collect::<Vec<_>>()
        );
    }

    #[test]
    fn scenario_lists() {
        let d = worked_example();
        let base = ModelConfig {
            nfolds: 5,
            ..Default::default()
        };
        let report = run_scenarios(&d, &base, &[]).unwrap();
        let keys: Vec<(f64, f64)> = report.entries.iter().map(|(s, _)| (s.minsup, s.minconf)).collect();
        assert_eq!(keys, DEFAULT_SCENARIOS);
        for w in report.entries.windows(2) {
            for (a, b) in w[0].1.folds.iter().zip(&w[1].1.folds) {
                assert!(a.car_count <= b.car_count);
            }
        }
        let single = run_scenarios(&d, &base, &[(0.2, 0.5)]).unwrap();
        assert_eq!(single.entries.len(), 1);
        assert!(run_scenarios(&d, &base, &[(2.0, 0.5)]).is_err());
    }

    fn meta(rows: usize, attributes: usize, classes: usize) -> DatasetMeta {
        DatasetMeta {
            name: format!("d{rows}"),
            attributes,
            rows,
            classes,
        }
    }

    #[test]
    fn grouping_by_rows() {
        let rows = group_report(&[(meta(500, 4, 2), 0.8), (meta(800, 6, 2), 0.9)], Grouping::ByRowCount);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].group, "<1000");
        assert!((rows[0].mean_accuracy - 0.85).abs() < 1e-12);
        assert!(group_report(&[], Grouping::ByClassCount).is_empty());
    }

    #[test]
    fn one_dataset_per_bucket() {
        let input = [
            (meta(100, 5, 2), 0.7),
            (meta(2000, 15, 3), 0.8),
            (meta(9000, 40, 8), 0.9),
        ];
        for g in Grouping::ALL {
            let rows = group_report(&input, g);
            assert_eq!(
                rows.iter().map(|r| r.mean_accuracy).collect::<Vec<_>>(),
                [0.7, 0.8, 0.9]
            );
        }
        assert_eq!(
            group_report(&input, Grouping::ByAttributeCount)
                .iter()
                .map(|r| r.group.as_str())
                .collect::<Vec<_>>(),
            ["4-10", "11-20", "30-50"]
        );
        assert!(matches!(
            "by-colour".parse::<Grouping>(),
            Err(CbaError::UnknownGrouping(_))
        ));
    }
}
