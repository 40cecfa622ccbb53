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

//! ID3-style decision trees over categorical attributes.
//!
//! Splits are multiway (one child per value observed at the node) and are
//! chosen by information gain, earliest attribute first on ties. There is
//! no post-pruning; `max_depth`, `min_rows_per_node` and `min_gain` act as
//! stopping rules.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, Provenance};
use crate::dataset::{majority_of, Dataset, Row, Schema};
use crate::error::{CbaError, Result};
use crate::fraction::Frac;
use crate::mining::{ClassAssociationRule, Condset, Item};

const GAIN_EPSILON: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSettings {
    pub max_depth: usize,
    pub min_rows_per_node: usize,
    pub min_gain: f64,
}

impl Default for TreeSettings {
    fn default() -> Self {
        TreeSettings {
            max_depth: 7,
            min_rows_per_node: 2,
            min_gain: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    Leaf {
        counts: Vec<u64>,
        label: u32,
    },
    Split {
        attribute: u32,
        counts: Vec<u64>,
        majority: u32,
        /// `(value id, subtree)` in value id order.
        children: Vec<(u32, TreeNode)>,
    },
}

impl TreeNode {
    pub fn counts(&self) -> &[u64] {
        match self {
            TreeNode::Leaf { counts, .. } | TreeNode::Split { counts, .. } => counts,
        }
    }

    pub fn label(&self) -> u32 {
        match self {
            TreeNode::Leaf { label, .. } => *label,
            TreeNode::Split { majority, .. } => *majority,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    pub schema: Arc<Schema>,
    pub root: TreeNode,
    /// Training rows the tree was built from.
    pub n: u64,
}

/// A root-to-leaf path as a rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRule {
    pub condset: Condset,
    pub class: u32,
    /// Rows of the leaf carrying `class`.
    pub hits: u64,
    /// Rows reaching the leaf.
    pub rows: u64,
    pub n: u64,
}

impl TreeRule {
    pub fn confidence(&self) -> Frac {
        Frac::new(self.hits, self.rows)
    }

    pub fn support(&self) -> Frac {
        Frac::new(self.rows, self.n)
    }

    /// The rule in the shared rule text layout, as pass 0.
    pub fn as_rule(&self, ordinal: u32) -> ClassAssociationRule {
        ClassAssociationRule {
            condset: self.condset.clone(),
            class: self.class,
            rulesup: self.hits,
            condsup: self.rows,
            n: self.n,
            pass: 0,
            ordinal,
        }
    }
}

/// Shannon entropy in bits of a class distribution.
pub fn entropy(class_counts: &[u64]) -> Result<f64> {
    let total: u64 = class_counts.iter().sum();
    if total == 0 {
        return Err(CbaError::ZeroCounts);
    }
    let total = total as f64;
    Ok(class_counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0))
}

pub fn info_gain(dataset: &Dataset, attribute: u32) -> Result<f64> {
    if attribute as usize >= dataset.schema().num_attributes() {
        return Err(CbaError::UnknownAttribute(format!("#{attribute}")));
    }
    let rows: Vec<&Row> = dataset.rows().iter().collect();
    Ok(gain_of(&rows, attribute, dataset.schema()))
}

fn class_counts(rows: &[&Row], nclasses: usize) -> Vec<u64> {
    let mut counts = vec![0u64; nclasses];
    for r in rows {
        counts[r.class as usize] += 1;
    }
    counts
}

fn gain_of(rows: &[&Row], attribute: u32, schema: &Schema) -> f64 {
    let nclasses = schema.num_classes();
    let nvalues = schema.values(attribute).len();
    let mut parts = vec![vec![0u64; nclasses]; nvalues];
    for r in rows {
        parts[r.value(attribute) as usize][r.class as usize] += 1;
    }
    let n = rows.len() as f64;
    let base = entropy(&class_counts(rows, nclasses)).unwrap_or(0.0);
    let residual: f64 = parts
        .iter()
        .filter_map(|p| {
            let size: u64 = p.iter().sum();
            entropy(p).ok().map(|h| size as f64 / n * h)
        })
        .sum();
    (base - residual).max(0.0)
}

pub fn build_tree(training: &Dataset, settings: &TreeSettings) -> DecisionTree {
    let schema = training.schema();
    let rows: Vec<&Row> = training.rows().iter().collect();
    let mut used = vec![false; schema.num_attributes()];
    DecisionTree {
        schema: training.shared_schema(),
        root: grow(&rows, 0, &mut used, schema, settings),
        n: training.n() as u64,
    }
}

fn grow(rows: &[&Row], depth: usize, used: &mut [bool], schema: &Schema, settings: &TreeSettings) -> TreeNode {
    let counts = class_counts(rows, schema.num_classes());
    let label = majority_of(&counts, schema);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if pure || depth >= settings.max_depth || rows.len() < settings.min_rows_per_node {
        return TreeNode::Leaf { counts, label };
    }

    let mut best: Option<(u32, f64)> = None;
    for a in 0..schema.num_attributes() as u32 {
        if used[a as usize] {
            continue;
        }
        let g = gain_of(rows, a, schema);
        if best.is_none_or(|(_, bg)| g > bg + GAIN_EPSILON) {
            best = Some((a, g));
        }
    }
    let Some((attribute, gain)) = best else {
        return TreeNode::Leaf { counts, label };
    };
    if gain <= settings.min_gain {
        return TreeNode::Leaf { counts, label };
    }

    let mut parts: Vec<Vec<&Row>> = vec![Vec::new(); schema.values(attribute).len()];
    for &r in rows {
        parts[r.value(attribute) as usize].push(r);
    }
    used[attribute as usize] = true;
    let children = parts
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_empty())
        .map(|(v, p)| (v as u32, grow(p, depth + 1, used, schema, settings)))
        .collect();
    used[attribute as usize] = false;
    TreeNode::Split {
        attribute,
        counts,
        majority: label,
        children,
    }
}

impl DecisionTree {
    pub fn num_leaves(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 1,
                TreeNode::Split { children, .. } => children.iter().map(|(_, c)| walk(c)).sum(),
            }
        }
        walk(&self.root)
    }

    /// Walks the tree; an unseen or unknown value stops at the current
    /// node's majority class.
    pub fn predict_values(&self, values: &[Option<u32>]) -> u32 {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { label, .. } => return *label,
                TreeNode::Split {
                    attribute,
                    majority,
                    children,
                    ..
                } => {
                    let v = values.get(*attribute as usize).copied().flatten();
                    match children.iter().find(|(cv, _)| Some(*cv) == v) {
                        Some((_, child)) => node = child,
                        None => return *majority,
                    }
                }
            }
        }
    }

    pub fn predict(&self, row: &Row) -> u32 {
        let values: Vec<Option<u32>> = row.values.iter().map(|&v| Some(v)).collect();
        self.predict_values(&values)
    }

    /// Indented dump, one node per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_node(&self.root, "root".to_string(), 0, &mut out);
        out
    }

    fn dump_node(&self, node: &TreeNode, label: String, depth: usize, out: &mut String) {
        let s = &self.schema;
        let counts = node
            .counts()
            .iter()
            .enumerate()
            .map(|(c, n)| format!("{}:{}", s.class_name(c as u32), n))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = write!(out, "{}{} [{}]", "  ".repeat(depth), label, counts);
        match node {
            TreeNode::Leaf { label, .. } => {
                let _ = writeln!(out, " -> {}", s.class_name(*label));
            }
            TreeNode::Split {
                attribute, children, ..
            } => {
                let _ = writeln!(out, " split {}", s.attribute_name(*attribute));
                for (v, child) in children {
                    let child_label = format!("{}={}", s.attribute_name(*attribute), s.value_name(*attribute, *v));
                    self.dump_node(child, child_label, depth + 1, out);
                }
            }
        }
    }

    /// Classifier whose first-match prediction equals [`Self::predict`].
    ///
    /// Leaf rules come in depth-first order. After the leaves of each
    /// non-root split an extra rule on the split's path predicts its
    /// majority class, which catches rows with values unseen at that split.
    pub fn to_classifier(&self, default_class: u32) -> Classifier {
        let mut rules = Vec::new();
        self.collect_rules(&self.root, &mut Vec::new(), true, &mut rules);
        for (i, r) in rules.iter_mut().enumerate() {
            r.ordinal = i as u32 + 1;
        }
        Classifier {
            schema: Arc::clone(&self.schema),
            rules,
            default_class,
            provenance: Provenance::Tree,
        }
    }

    fn collect_rules(
        &self,
        node: &TreeNode,
        path: &mut Vec<Item>,
        with_fallbacks: bool,
        out: &mut Vec<ClassAssociationRule>,
    ) {
        let counts = node.counts();
        let rows: u64 = counts.iter().sum();
        let rule = |class: u32, path: &[Item]| ClassAssociationRule {
            condset: Condset::new(path.to_vec()).expect("tree paths never repeat attributes"),
            class,
            rulesup: counts[class as usize],
            condsup: rows,
            n: self.n,
            pass: 0,
            ordinal: 0,
        };
        match node {
            TreeNode::Leaf { label, .. } => out.push(rule(*label, path)),
            TreeNode::Split {
                attribute,
                majority,
                children,
                ..
            } => {
                for (v, child) in children {
                    path.push(Item::new(*attribute, *v));
                    self.collect_rules(child, path, with_fallbacks, out);
                    path.pop();
                }
                if with_fallbacks && !path.is_empty() {
                    out.push(rule(*majority, path));
                }
            }
        }
    }
}

/// One rule per leaf in depth-first order. A single-leaf tree yields one
/// rule with an empty condset.
pub fn tree_to_rules(tree: &DecisionTree) -> Vec<TreeRule> {
    let mut rules = Vec::new();
    tree.collect_rules(&tree.root, &mut Vec::new(), false, &mut rules);
    rules
        .into_iter()
        .map(|r| TreeRule {
            condset: r.condset,
            class: r.class,
            hits: r.rulesup,
            rows: r.condsup,
            n: r.n,
        })
        .collect()
}
