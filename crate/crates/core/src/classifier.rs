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

//! Rule ranking, general-rule pruning, coverage-based classifier building
//! and first-match prediction.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Row, Schema};
use crate::error::{CbaError, Result};
use crate::fraction::Frac;
use crate::mining::ClassAssociationRule;

/// CARs in precedence order: higher confidence, then higher support, then
/// earlier generation (pass, then ordinal).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankedRules(Vec<ClassAssociationRule>);

impl RankedRules {
    pub fn as_slice(&self) -> &[ClassAssociationRule] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<ClassAssociationRule> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn precedence(a: &ClassAssociationRule, b: &ClassAssociationRule) -> Ordering {
    b.confidence()
        .cmp(&a.confidence())
        .then_with(|| b.support().cmp(&a.support()))
        .then_with(|| (a.pass, a.ordinal).cmp(&(b.pass, b.ordinal)))
}

pub fn rank_rules(mut cars: Vec<ClassAssociationRule>) -> RankedRules {
    cars.sort_by(precedence);
    RankedRules(cars)
}

/// Drops every rule that has a same-class rule with a strictly smaller
/// condset and at least the same confidence.
pub fn prune_general(cars: Vec<ClassAssociationRule>) -> Vec<ClassAssociationRule> {
    let keep: Vec<bool> = cars
        .iter()
        .map(|r| {
            !cars.iter().any(|g| {
                g.class == r.class
                    && g.condset.len() < r.condset.len()
                    && g.confidence() >= r.confidence()
                    && g.condset.is_proper_subset_of(&r.condset)
            })
        })
        .collect();
    cars.into_iter().zip(keep).filter_map(|(r, k)| k.then_some(r)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    CbaOdm1,
    CbaOdm2,
    Tree,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::CbaOdm1 => "cba-odm1",
            Provenance::CbaOdm2 => "cba-odm2",
            Provenance::Tree => "tree",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cba-odm1" => Ok(Provenance::CbaOdm1),
            "cba-odm2" => Ok(Provenance::CbaOdm2),
            "tree" => Ok(Provenance::Tree),
            other => Err(format!("unknown model family `{other}`")),
        }
    }
}

/// An ordered rule list with a default class. Prediction returns the class
/// of the first rule whose condset matches the row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classifier {
    pub schema: Arc<Schema>,
    pub rules: Vec<ClassAssociationRule>,
    pub default_class: u32,
    pub provenance: Provenance,
}

impl Classifier {
    pub fn predict(&self, row: &Row) -> u32 {
        self.rules
            .iter()
            .find(|r| r.condset.matches(row))
            .map_or(self.default_class, |r| r.class)
    }

    /// Prediction for a row given as optional value ids; `None` stands for
    /// a value the schema has never seen and matches no item.
    pub fn predict_values(&self, values: &[Option<u32>]) -> u32 {
        self.rules
            .iter()
            .find(|r| {
                r.condset
                    .items()
                    .iter()
                    .all(|it| values.get(it.attribute as usize).copied().flatten() == Some(it.value))
            })
            .map_or(self.default_class, |r| r.class)
    }

    /// Misclassified rows over total rows.
    pub fn error_rate(&self, test: &Dataset) -> Result<Frac> {
        if test.n() == 0 {
            return Err(CbaError::EmptyTestSet);
        }
        let wrong = test.rows().iter().filter(|row| self.predict(row) != row.class).count();
        Ok(Frac::new(wrong as u64, test.n() as u64))
    }

    /// Rule text, one line per rule, followed by `DEFAULT <class>`.
    pub fn to_text(&self) -> String {
        let mut out = crate::mining::format_rules(&self.rules, &self.schema);
        out.push_str("DEFAULT ");
        out.push_str(self.schema.class_name(self.default_class));
        out.push('\n');
        out
    }
}

/// Database-coverage classifier building.
///
/// For every training row in order, the ranked rules are scanned and the
/// first rule that matches the row's conditions and agrees with its class
/// is marked. A rule that matches with the wrong class does not stop the
/// scan. The classifier keeps the marked rules in rank order and defaults
/// to the training majority class.
pub fn build_classifier(ranked: &RankedRules, training: &Dataset) -> Classifier {
    let rules = ranked.as_slice();
    let mut marked = vec![false; rules.len()];
    for row in training.rows() {
        if let Some(i) = rules
            .iter()
            .position(|r| r.class == row.class && r.condset.matches(row))
        {
            marked[i] = true;
        }
    }
    Classifier {
        schema: training.shared_schema(),
        rules: rules
            .iter()
            .zip(&marked)
            .filter(|&(_, &m)| m)
            .map(|(r, _)| r.clone())
            .collect(),
        default_class: training.majority_class(),
        provenance: Provenance::CbaOdm1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mining::{mine_cars, Condset, Item, MiningConfig};
    use proptest::prelude::*;

    const TABLE_I: &str = "A,B,C\ne,p,y\ne,p,y\ne,q,y\ng,q,y\ng,q,y\ng,q,n\ng,w,n\ng,w,n\ne,p,n\nf,q,n\n";

    fn worked_example() -> Dataset {
        Dataset::from_reader(TABLE_I.as_bytes(), None).unwrap()
    }

    fn names(rules: &[ClassAssociationRule], s: &Schema) -> Vec<String> {
        rules
            .iter()
            .map(|r| format!("{}->{}", r.condset.display(s), s.class_name(r.class)))
            .collect()
    }

    fn car(
        items: &[(u32, u32)],
        class: u32,
        rulesup: u64,
        condsup: u64,
        pass: u32,
        ordinal: u32,
    ) -> ClassAssociationRule {
        ClassAssociationRule {
            condset: Condset::new(items.iter().map(|&(a, v)| Item::new(a, v)).collect()).unwrap(),
            class,
            rulesup,
            condsup,
            n: 10,
            pass,
            ordinal,
        }
    }

    #[test]
    fn table_four_pruning_and_ranking() {
        let d = worked_example();
        let cars = mine_cars(&d, &MiningConfig::new(0.15, 0.6).unwrap());
        assert_eq!(cars.len(), 8);
        let pruned = prune_general(cars);
        assert_eq!(
            names(&pruned, d.schema()),
            ["A=e->y", "A=g->n", "B=p->y", "B=q->y", "B=w->n", "A=g AND B=q->y"]
        );
        let ranked = rank_rules(pruned);
        assert_eq!(
            names(ranked.as_slice(), d.schema()),
            ["B=w->n", "A=e->y", "B=p->y", "A=g AND B=q->y", "A=g->n", "B=q->y"]
        );
    }

    #[test]
    fn coverage_trace_on_worked_example() {
        let d = worked_example();
        let ranked = rank_rules(prune_general(mine_cars(&d, &MiningConfig::new(0.15, 0.6).unwrap())));
        let clf = build_classifier(&ranked, &d);
        assert_eq!(
            names(&clf.rules, d.schema()),
            ["B=w->n", "A=e->y", "A=g AND B=q->y", "A=g->n"]
        );
        assert_eq!(d.schema().class_name(clf.default_class), "n");

        let s = d.schema();
        let row = |a: &str, b: &str| vec![s.value_id(0, a), s.value_id(1, b)];
        assert_eq!(s.class_name(clf.predict_values(&row("e", "p"))), "y");
        assert_eq!(s.class_name(clf.predict_values(&row("g", "w"))), "n");
        assert_eq!(s.class_name(clf.predict_values(&[s.value_id(0, "f"), None])), "n");
        assert_eq!(
            s.class_name(clf.predict_values(&[s.value_id(0, "f"), s.value_id(1, "q")])),
            "n"
        );
    }

    #[test]
    fn ranking_tie_breaks() {
        let low_sup = car(&[(0, 0)], 0, 1, 1, 1, 1);
        let mut hi = car(&[(1, 0)], 0, 3, 3, 1, 2);
        hi.n = 10;
        let ranked = rank_rules(vec![low_sup.clone(), hi.clone()]);
        assert_eq!(ranked.as_slice(), [hi, low_sup]);

        let p2 = car(&[(0, 0), (1, 1)], 0, 2, 3, 2, 1);
        let p1 = car(&[(1, 1)], 0, 2, 3, 1, 9);
        assert_eq!(rank_rules(vec![p2.clone(), p1.clone()]).as_slice(), [p1, p2]);
    }

    #[test]
    fn pruning_without_subsets_is_identity() {
        let rules = vec![car(&[(0, 0)], 0, 2, 3, 1, 1), car(&[(0, 1)], 1, 2, 3, 1, 2)];
        assert_eq!(prune_general(rules.clone()), rules);
        let disjoint = vec![
            car(&[(0, 0), (1, 0)], 0, 2, 3, 2, 1),
            car(&[(0, 1), (1, 1)], 0, 2, 3, 2, 2),
        ];
        assert_eq!(prune_general(disjoint.clone()), disjoint);
    }

    #[test]
    fn empty_and_single_rule_builders() {
        let d = worked_example();
        let clf = build_classifier(&RankedRules::default(), &d);
        assert!(clf.rules.is_empty());
        assert_eq!(clf.error_rate(&d).unwrap(), Frac::new(1, 2));

        let s = d.schema();
        let bw = car(
            &[(1, s.value_id(1, "w").unwrap())],
            s.class_id("n").unwrap(),
            2,
            2,
            1,
            7,
        );
        let clf = build_classifier(&rank_rules(vec![bw.clone()]), &d);
        assert_eq!(clf.rules, vec![bw]);
    }

    #[test]
    fn error_rate_extremes() {
        let d = Dataset::from_reader("A,C\na,y\nb,y\n".as_bytes(), None).unwrap();
        let clf = build_classifier(&RankedRules::default(), &d);
        assert_eq!(clf.error_rate(&d).unwrap().value(), 0.0);
        let wrong = Classifier {
            default_class: 1,
            ..clf.clone()
        };
        let d2 = Dataset::from_reader("A,C\na,y\nb,n\n".as_bytes(), None).unwrap();
        let always_n = Classifier {
            schema: d2.shared_schema(),
            default_class: d2.schema().class_id("n").unwrap(),
            ..wrong
        };
        let only_y = d2.subset(&[0]).unwrap();
        assert_eq!(always_n.error_rate(&only_y).unwrap().value(), 1.0);
    }

    #[test]
    fn text_listing_has_default_line() {
        let d = worked_example();
        let ranked = rank_rules(prune_general(mine_cars(&d, &MiningConfig::new(0.15, 0.6).unwrap())));
        let text = build_classifier(&ranked, &d).to_text();
        assert_eq!(
            text,
            "IF B=w THEN C=n  sup=2/10 conf=2/2 pass=1 ord=7\n\
             IF A=e THEN C=y  sup=3/10 conf=3/4 pass=1 ord=1\n\
             IF A=g AND B=q THEN C=y  sup=2/10 conf=2/3 pass=2 ord=2\n\
             IF A=g THEN C=n  sup=3/10 conf=3/5 pass=1 ord=3\n\
             DEFAULT n\n"
        );
    }

    fn rule_strategy() -> impl Strategy<Value = ClassAssociationRule> {
        (
            proptest::collection::btree_map(0u32..4, 0u32..3, 1..4),
            0u32..2,
            1u64..10,
            0u64..10,
            1u32..3,
            1u32..20,
        )
            .prop_map(|(items, class, rulesup, extra, pass, ordinal)| ClassAssociationRule {
                condset: Condset::new(items.into_iter().map(|(a, v)| Item::new(a, v)).collect()).unwrap(),
                class,
                rulesup,
                condsup: rulesup + extra,
                n: 40,
                pass,
                ordinal,
            })
    }

    proptest! {
        #[test]
        fn ranking_is_a_stable_total_order(rules in proptest::collection::vec(rule_strategy(), 0..30)) {
            let ranked = rank_rules(rules.clone());
            prop_assert_eq!(ranked.len(), rules.len());
            for r in &rules {
                prop_assert_eq!(
                    ranked.as_slice().iter().filter(|x| *x == r).count(),
                    rules.iter().filter(|x| *x == r).count()
                );
            }
            for w in ranked.as_slice().windows(2) {
                prop_assert!(precedence(&w[0], &w[1]) != Ordering::Greater);
            }
            prop_assert_eq!(rank_rules(ranked.clone().into_inner()), ranked);
        }

        #[test]
        fn pruning_only_removes_dominated_rules(rules in proptest::collection::vec(rule_strategy(), 0..30)) {
            let kept = prune_general(rules.clone());
            for r in &rules {
                let dominated = rules.iter().any(|g| {
                    g.class == r.class
                        && g.condset.is_proper_subset_of(&r.condset)
                        && g.confidence() >= r.confidence()
                });
                prop_assert_eq!(kept.contains(r), !dominated);
            }
        }
    }
}
