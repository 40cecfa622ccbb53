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

//! Merging ranked CARs with decision-tree rules by confidence arbitration.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, Provenance, RankedRules};
use crate::dataset::{Dataset, Schema};
use crate::error::{CbaError, Result};
use crate::mining::{ClassAssociationRule, Condset};
use crate::tree::TreeRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Car,
    Tree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub car: ClassAssociationRule,
    pub tree_rule: TreeRule,
    pub chosen: Side,
}

impl MatchedPair {
    pub fn chosen_class(&self) -> u32 {
        match self.chosen {
            Side::Car => self.car.class,
            Side::Tree => self.tree_rule.class,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeReport {
    pub matched_pairs: Vec<MatchedPair>,
    pub pruned_cars: Vec<ClassAssociationRule>,
    pub fallback_used: bool,
    /// `(agreeing, matched)`; the fraction is 0 when nothing matched.
    pub agreement: (u64, u64),
}

impl MergeReport {
    pub fn match_fraction(&self) -> f64 {
        match self.agreement {
            (_, 0) => 0.0,
            (a, m) => a as f64 / m as f64,
        }
    }

    /// One line per matched pair, then one per pruned CAR.
    pub fn to_text(&self, schema: &Schema) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "fallback={} matched={} pruned={} match_fraction={}/{}",
            self.fallback_used,
            self.matched_pairs.len(),
            self.pruned_cars.len(),
            self.agreement.0,
            self.agreement.1
        );
        for p in &self.matched_pairs {
            let _ = writeln!(
                out,
                "PAIR car=[{} -> {} conf={}] tree=[{} -> {} conf={}] chosen={}",
                p.car.condset.display(schema),
                schema.class_name(p.car.class),
                p.car.confidence(),
                p.tree_rule.condset.display(schema),
                schema.class_name(p.tree_rule.class),
                p.tree_rule.confidence(),
                match p.chosen {
                    Side::Car => "car",
                    Side::Tree => "tree",
                }
            );
        }
        for car in &self.pruned_cars {
            let _ = writeln!(
                out,
                "PRUNED [{} -> {} conf={}]",
                car.condset.display(schema),
                schema.class_name(car.class),
                car.confidence()
            );
        }
        out
    }
}

/// True when the tree carries no split: no rules at all, or a single rule
/// with an empty condset.
pub fn is_degenerate_tree(tree_rules: &[TreeRule]) -> bool {
    match tree_rules {
        [] => true,
        [only] => only.condset.is_empty(),
        _ => false,
    }
}

/// The tree rule a CAR is arbitrated against: among tree rules sharing at
/// least one `attribute=value` item with the CAR, the one with the highest
/// confidence, first in tree order on ties.
pub fn best_match<'a>(car: &Condset, tree_rules: &'a [TreeRule]) -> Option<&'a TreeRule> {
    let mut best: Option<&TreeRule> = None;
    for t in tree_rules.iter().filter(|t| t.condset.intersects(car)) {
        if best.is_none_or(|b| t.confidence() > b.confidence()) {
            best = Some(t);
        }
    }
    best
}

fn check_schema(cars: &[ClassAssociationRule], tree_rules: &[TreeRule], schema: &Schema) -> Result<()> {
    let valid = |c: &Condset, class: u32| {
        (class as usize) < schema.num_classes()
            && c.items().iter().all(|it| {
                (it.attribute as usize) < schema.num_attributes()
                    && (it.value as usize) < schema.values(it.attribute).len()
            })
    };
    let ok = cars.iter().all(|r| valid(&r.condset, r.class)) && tree_rules.iter().all(|r| valid(&r.condset, r.class));
    if ok {
        Ok(())
    } else {
        Err(CbaError::SchemaMismatch)
    }
}

/// Builds the hybrid classifier.
///
/// A degenerate tree is ignored and the ranked CARs become the classifier
/// unchanged. Otherwise a CAR without any matching tree rule is dropped,
/// and a matched CAR keeps its condset and takes the tree rule's class
/// only when the tree rule's confidence is strictly higher.
pub fn merge(ranked: &RankedRules, tree_rules: &[TreeRule], training: &Dataset) -> Result<(Classifier, MergeReport)> {
    check_schema(ranked.as_slice(), tree_rules, training.schema())?;
    let mut report = MergeReport::default();
    let rules = if is_degenerate_tree(tree_rules) {
        report.fallback_used = true;
        ranked.as_slice().to_vec()
    } else {
        let mut rules = Vec::new();
        for car in ranked.as_slice() {
            let Some(tree_rule) = best_match(&car.condset, tree_rules) else {
                report.pruned_cars.push(car.clone());
                continue;
            };
            let chosen = if tree_rule.confidence() > car.confidence() {
                Side::Tree
            } else {
                Side::Car
            };
            let pair = MatchedPair {
                car: car.clone(),
                tree_rule: tree_rule.clone(),
                chosen,
            };
            rules.push(ClassAssociationRule {
                class: pair.chosen_class(),
                ..car.clone()
            });
            report.matched_pairs.push(pair);
        }
        rules
    };
    report.agreement = agreement(ranked, tree_rules);
    let classifier = Classifier {
        schema: training.shared_schema(),
        rules,
        default_class: training.majority_class(),
        provenance: Provenance::CbaOdm2,
    };
    Ok((classifier, report))
}

fn agreement(ranked: &RankedRules, tree_rules: &[TreeRule]) -> (u64, u64) {
    let mut agree = 0;
    let mut matched = 0;
    for car in ranked.as_slice() {
        if let Some(t) = best_match(&car.condset, tree_rules) {
            matched += 1;
            if t.class == car.class {
                agree += 1;
            }
        }
    }
    (agree, matched)
}

/// Among CARs with a matching tree rule, the fraction whose class equals
/// the class of their best match; 0 when no CAR matches.
pub fn match_fraction(ranked: &RankedRules, tree_rules: &[TreeRule]) -> f64 {
    match agreement(ranked, tree_rules) {
        (_, 0) => 0.0,
        (a, m) => a as f64 / m as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{prune_general, rank_rules};
    use crate::mining::{mine_cars, Item, MiningConfig};
    use crate::tree::{build_tree, tree_to_rules, TreeSettings};

    const TABLE_I: &str = "A,B,C\ne,p,y\ne,p,y\ne,q,y\ng,q,y\ng,q,y\ng,q,n\ng,w,n\ng,w,n\ne,p,n\nf,q,n\n";

    fn worked_example() -> Dataset {
        Dataset::from_reader(TABLE_I.as_bytes(), None).unwrap()
    }

    fn ranked_table_v(d: &Dataset) -> RankedRules {
        rank_rules(prune_general(mine_cars(d, &MiningConfig::new(0.15, 0.6).unwrap())))
    }

    #[test]
    fn empty_tree_falls_back_to_ranked_rules() {
        let d = worked_example();
        let ranked = ranked_table_v(&d);
        let (clf, report) = merge(&ranked, &[], &d).unwrap();
        assert!(report.fallback_used);
        assert_eq!(clf.rules, ranked.as_slice());
        assert_eq!(clf.provenance, Provenance::CbaOdm2);

        let leaf = TreeRule {
            condset: Condset::empty(),
            class: 0,
            hits: 5,
            rows: 10,
            n: 10,
        };
        let (clf, report) = merge(&ranked, &[leaf], &d).unwrap();
        assert!(report.fallback_used);
        assert_eq!(clf.rules, ranked.as_slice());
    }

    #[test]
    fn strictly_more_confident_tree_wins() {
        let d = Dataset::from_reader("X,C\n1,a\n1,b\n".as_bytes(), None).unwrap();
        let car = ClassAssociationRule {
            condset: Condset::new(vec![Item::new(0, 0)]).unwrap(),
            class: 0,
            rulesup: 7,
            condsup: 10,
            n: 10,
            pass: 1,
            ordinal: 1,
        };
        let tree = TreeRule {
            condset: Condset::new(vec![Item::new(0, 0)]).unwrap(),
            class: 1,
            hits: 9,
            rows: 10,
            n: 10,
        };
        let other = TreeRule {
            condset: Condset::empty(),
            ..tree.clone()
        };
        let (clf, report) = merge(&rank_rules(vec![car]), &[tree, other], &d).unwrap();
        assert!(!report.fallback_used);
        assert_eq!(clf.rules[0].class, 1);
        assert_eq!(report.matched_pairs[0].chosen, Side::Tree);
    }

    #[test]
    fn table_v_against_depth_one_tree() {
        let d = worked_example();
        let ranked = ranked_table_v(&d);
        let tree = build_tree(
            &d,
            &TreeSettings {
                max_depth: 1,
                ..Default::default()
            },
        );
        let tree_rules = tree_to_rules(&tree);
        let (clf, report) = merge(&ranked, &tree_rules, &d).unwrap();
        let s = d.schema();
        let pruned: Vec<String> = report
            .pruned_cars
            .iter()
            .map(|r| r.condset.display(s).to_string())
            .collect();
        assert_eq!(pruned, ["A=e", "A=g"]);
        assert!(report.matched_pairs.iter().all(|p| p.chosen == Side::Car));
        let listed: Vec<String> = clf
            .rules
            .iter()
            .map(|r| format!("{}->{}", r.condset.display(s), s.class_name(r.class)))
            .collect();
        assert_eq!(listed, ["B=w->n", "B=p->y", "A=g AND B=q->y", "B=q->y"]);
        assert_eq!(report.agreement, (4, 4));
        assert_eq!(match_fraction(&ranked, &tree_rules), 1.0);
        let text = report.to_text(s);
        assert!(text.starts_with("fallback=false matched=4 pruned=2 match_fraction=4/4\n"));
        assert!(text.contains("PAIR car=[B=w -> n conf=2/2] tree=[B=w -> n conf=2/2] chosen=car\n"));
    }

    #[test]
    fn match_fraction_edge_values() {
        let tree = |attr: u32, class: u32| TreeRule {
            condset: Condset::new(vec![Item::new(attr, 0)]).unwrap(),
            class,
            hits: 1,
            rows: 1,
            n: 4,
        };
        let car = |attr: u32, class: u32| ClassAssociationRule {
            condset: Condset::new(vec![Item::new(attr, 0)]).unwrap(),
            class,
            rulesup: 1,
            condsup: 2,
            n: 4,
            pass: 1,
            ordinal: attr,
        };
        let ranked = rank_rules(vec![car(0, 0), car(1, 0), car(2, 1), car(3, 1)]);
        assert_eq!(match_fraction(&ranked, &[tree(9, 0)]), 0.0);
        assert_eq!(
            match_fraction(&ranked, &[tree(0, 0), tree(1, 0), tree(2, 1), tree(3, 1)]),
            1.0
        );
        assert_eq!(
            match_fraction(&ranked, &[tree(0, 0), tree(1, 1), tree(2, 1), tree(3, 0)]),
            0.5
        );
    }

    #[test]
    fn foreign_ids_are_a_schema_mismatch() {
        let d = worked_example();
        let bogus = TreeRule {
            condset: Condset::new(vec![Item::new(7, 0)]).unwrap(),
            class: 0,
            hits: 1,
            rows: 1,
            n: 1,
        };
        assert!(matches!(
            merge(&RankedRules::default(), &[bogus.clone(), bogus], &d).unwrap_err(),
            CbaError::SchemaMismatch
        ));
    }
}
