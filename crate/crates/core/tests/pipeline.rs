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

use std::cmp::Ordering;
use std::path::PathBuf;

use cba_core::*;
use proptest::prelude::*;

fn tic_tac_toe() -> Dataset {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/tic-tac-toe.csv");
    Dataset::load_csv(path, None).unwrap()
}

/// Naive CBA-ODM1: sort by (conf, sup) with floats and generation order,
/// mark by scanning, predict by scanning.
fn naive_predictions(d: &Dataset, cars: &[ClassAssociationRule]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..cars.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&cars[i], &cars[j]);
        let ca = a.rulesup as f64 / a.condsup as f64;
        let cb = b.rulesup as f64 / b.condsup as f64;
        let sa = a.rulesup as f64 / a.n as f64;
        let sb = b.rulesup as f64 / b.n as f64;
        cb.partial_cmp(&ca)
            .unwrap()
            .then(sb.partial_cmp(&sa).unwrap())
            .then(a.pass.cmp(&b.pass))
            .then(a.ordinal.cmp(&b.ordinal))
    });
    let fires = |r: &ClassAssociationRule, row: &Row| {
        r.condset
            .items()
            .iter()
            .all(|it| row.values[it.attribute as usize] == it.value)
    };
    let mut keep = vec![false; cars.len()];
    for row in d.rows() {
        for &i in &order {
            if fires(&cars[i], row) && cars[i].class == row.class {
                keep[i] = true;
                break;
            }
        }
    }
    let mut counts = vec![0u64; d.schema().num_classes()];
    for row in d.rows() {
        counts[row.class as usize] += 1;
    }
    let mut default = 0;
    for c in 1..counts.len() {
        let better = counts[c] > counts[default]
            || (counts[c] == counts[default]
                && d.schema()
                    .class_name(c as u32)
                    .cmp(d.schema().class_name(default as u32))
                    == Ordering::Less);
        if better {
            default = c;
        }
    }
    d.rows()
        .iter()
        .map(|row| {
            order
                .iter()
                .filter(|&&i| keep[i])
                .find(|&&i| fires(&cars[i], row))
                .map_or(default as u32, |&i| cars[i].class)
        })
        .collect()
}

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (1usize..5, 1usize..4, 1usize..40).prop_flat_map(|(attrs, vals, rows)| {
        proptest::collection::vec((proptest::collection::vec(0..vals, attrs), 0usize..3), rows).prop_map(
            move |records| {
                let mut header: Vec<String> = (0..attrs).map(|a| format!("a{a}")).collect();
                header.push("class".into());
                let records = records
                    .into_iter()
                    .map(|(vs, c)| {
                        let mut r: Vec<String> = vs.iter().map(|v| format!("v{v}")).collect();
                        r.push(format!("c{c}"));
                        r
                    })
                    .collect();
                Dataset::from_records(header, records, None).unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn predict_matches_naive_scan(d in dataset_strategy(), pct in 0u64..50, conf in 0u64..=100) {
        let config = MiningConfig::new(pct as f64 / 100.0, conf as f64 / 100.0).unwrap();
        let cars = mine_cars(&d, &config);
        let clf = build_classifier(&rank_rules(cars.clone()), &d);
        let got: Vec<u32> = d.rows().iter().map(|r| clf.predict(r)).collect();
        prop_assert_eq!(got, naive_predictions(&d, &cars));

        // Every kept rule is the first correct match of some training row.
        let ranked = rank_rules(cars);
        for rule in &clf.rules {
            let claims = d.rows().iter().any(|row| {
                ranked
                    .as_slice()
                    .iter()
                    .find(|r| r.class == row.class && r.condset.matches(row))
                    == Some(rule)
            });
            prop_assert!(claims);
        }
    }

    #[test]
    fn csv_round_trip(d in dataset_strategy()) {
        let mut out = Vec::new();
        d.write_csv(&mut out).unwrap();
        prop_assert_eq!(Dataset::from_reader(out.as_slice(), None).unwrap(), d);
    }

    #[test]
    fn merge_never_invents_condsets(d in dataset_strategy(), depth in 1usize..4) {
        let ranked = rank_rules(mine_cars(&d, &MiningConfig::new(0.1, 0.3).unwrap()));
        let tree = build_tree(&d, &TreeSettings { max_depth: depth, ..Default::default() });
        let (clf, report) = merge(&ranked, &tree_to_rules(&tree), &d).unwrap();
        for r in &clf.rules {
            prop_assert!(ranked.as_slice().iter().any(|c| c.condset == r.condset));
        }
        if report.fallback_used {
            prop_assert_eq!(clf.rules.as_slice(), ranked.as_slice());
        } else {
            prop_assert_eq!(report.matched_pairs.len() + report.pruned_cars.len(), ranked.len());
            for p in &report.matched_pairs {
                let tree_wins = p.tree_rule.confidence() > p.car.confidence();
                prop_assert_eq!(p.chosen == Side::Tree, tree_wins);
            }
        }
    }
}

#[test]
fn family_does_not_change_folds() {
    let d = tic_tac_toe();
    let mut reports = Vec::new();
    for family in [Provenance::CbaOdm1, Provenance::CbaOdm2, Provenance::Tree] {
        let config = ModelConfig {
            family,
            mining: MiningConfig::new(0.10, 0.50).unwrap(),
            seed: 11,
            ..Default::default()
        };
        reports.push(cross_validate(&d, &config).unwrap());
    }
    assert_eq!(reports[0].assignment, reports[1].assignment);
    assert_eq!(reports[1].assignment, reports[2].assignment);
}

#[test]
fn hybrid_on_tic_tac_toe_reports_agreement() {
    let d = tic_tac_toe();
    let config = ModelConfig {
        family: Provenance::CbaOdm2,
        mining: MiningConfig::new(0.05, 0.5).unwrap(),
        ..Default::default()
    };
    let model = train(&d, &config).unwrap();
    let report = model.merge_report.unwrap();
    assert!(!report.fallback_used);
    let (agree, matched) = report.agreement;
    assert!(matched > 0 && agree <= matched);
    assert_eq!(report.matched_pairs.len() + report.pruned_cars.len(), model.car_count);
}

#[test]
fn plain_mod_partition_is_available() {
    let d = tic_tac_toe();
    let config = ModelConfig {
        partition: PartitionStrategy::PlainMod,
        nfolds: 4,
        ..Default::default()
    };
    let report = cross_validate(&d, &config).unwrap();
    assert_eq!(report.assignment.fold_sizes().iter().sum::<usize>(), d.n());
    let stratified = cross_validate(
        &d,
        &ModelConfig {
            partition: PartitionStrategy::Stratified,
            ..config
        },
    )
    .unwrap();
    assert_ne!(report.assignment, stratified.assignment);
}
