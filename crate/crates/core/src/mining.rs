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

//! Level-wise mining of frequent class ruleitems and their promotion to
//! class association rules (CARs).
//!
//! A ruleitem pairs a condition set with a class label and carries two
//! counts: `condsup`, the rows matching the condition set, and `rulesup`,
//! the subset of those rows that also carry the class. A ruleitem is
//! frequent when `rulesup >= 1` and `rulesup / n >= minsup`; a frequent
//! ruleitem becomes a CAR when `rulesup / condsup >= minconf`. Both tests
//! are exact rational comparisons.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Row, Schema};
use crate::error::{CbaError, Result};
use crate::fraction::{Frac, Threshold};

/// An `attribute = value` condition, by id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Item {
    pub attribute: u32,
    pub value: u32,
}

impl Item {
    pub fn new(attribute: u32, value: u32) -> Self {
        Item { attribute, value }
    }
}

/// A set of items with at most one item per attribute, kept sorted by
/// attribute id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condset(Vec<Item>);

impl Condset {
    /// Sorts the items; `None` if two items share an attribute.
    pub fn new(mut items: Vec<Item>) -> Option<Self> {
        items.sort_unstable();
        if items.windows(2).any(|w| w[0].attribute == w[1].attribute) {
            return None;
        }
        Some(Condset(items))
    }

    pub fn empty() -> Self {
        Condset(Vec::new())
    }

    pub fn items(&self) -> &[Item] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn matches(&self, row: &Row) -> bool {
        self.0.iter().all(|it| row.value(it.attribute) == it.value)
    }

    pub fn contains(&self, item: &Item) -> bool {
        self.0.binary_search(item).is_ok()
    }

    pub fn is_subset_of(&self, other: &Condset) -> bool {
        self.0.iter().all(|it| other.contains(it))
    }

    pub fn is_proper_subset_of(&self, other: &Condset) -> bool {
        self.len() < other.len() && self.is_subset_of(other)
    }

    pub fn intersects(&self, other: &Condset) -> bool {
        self.0.iter().any(|it| other.contains(it))
    }

    /// The condset with the item at `index` removed.
    pub fn without(&self, index: usize) -> Condset {
        let mut items = self.0.clone();
        items.remove(index);
        Condset(items)
    }

    /// Canonical generation order: attribute ids first, then value ids.
    pub fn canonical_cmp(&self, other: &Condset) -> Ordering {
        let attrs = |c: &Condset| c.0.iter().map(|i| i.attribute).collect::<Vec<_>>();
        let vals = |c: &Condset| c.0.iter().map(|i| i.value).collect::<Vec<_>>();
        attrs(self)
            .cmp(&attrs(other))
            .then_with(|| vals(self).cmp(&vals(other)))
    }

    fn validate(&self, schema: &Schema) -> Result<()> {
        for it in &self.0 {
            if it.attribute as usize >= schema.num_attributes() {
                return Err(CbaError::UnknownAttribute(format!("#{}", it.attribute)));
            }
            if it.value as usize >= schema.values(it.attribute).len() {
                return Err(CbaError::UnknownValue {
                    attribute: schema.attribute_name(it.attribute).to_string(),
                    value: it.value,
                });
            }
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, schema: &'a Schema) -> CondsetDisplay<'a> {
        CondsetDisplay { condset: self, schema }
    }
}

pub struct CondsetDisplay<'a> {
    condset: &'a Condset,
    schema: &'a Schema,
}

impl fmt::Display for CondsetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.condset.is_empty() {
            return f.write_str("TRUE");
        }
        for (i, it) in self.condset.items().iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            write!(
                f,
                "{}={}",
                self.schema.attribute_name(it.attribute),
                self.schema.value_name(it.attribute, it.value)
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleItem {
    pub condset: Condset,
    pub class: u32,
    pub condsup: u64,
    pub rulesup: u64,
}

impl RuleItem {
    fn canonical_cmp(&self, other: &RuleItem) -> Ordering {
        self.condset
            .canonical_cmp(&other.condset)
            .then(self.class.cmp(&other.class))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningConfig {
    pub minsup: Threshold,
    pub minconf: Threshold,
}

impl MiningConfig {
    pub fn new(minsup: f64, minconf: f64) -> Result<Self> {
        Ok(MiningConfig {
            minsup: Threshold::from_f64(minsup)?,
            minconf: Threshold::from_f64(minconf)?,
        })
    }
}

/// Frequent ruleitems by generation pass. `levels[k - 1]` holds the
/// ruleitems with `k` conditions in canonical order; a ruleitem's ordinal
/// is its 1-based position within its level.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequentSets {
    pub n: u64,
    pub levels: Vec<Vec<RuleItem>>,
}

impl FrequentSets {
    pub fn level(&self, pass: usize) -> &[RuleItem] {
        pass.checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(pass, ordinal, ruleitem)` over all levels.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &RuleItem)> {
        self.levels.iter().enumerate().flat_map(|(k, level)| {
            level
                .iter()
                .enumerate()
                .map(move |(i, item)| (k as u32 + 1, i as u32 + 1, item))
        })
    }
}

/// A rule `condset -> class` with the counts behind its support and
/// confidence. Rules derived from decision-tree leaves use pass 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassAssociationRule {
    pub condset: Condset,
    pub class: u32,
    pub rulesup: u64,
    pub condsup: u64,
    pub n: u64,
    pub pass: u32,
    pub ordinal: u32,
}

impl ClassAssociationRule {
    pub fn support(&self) -> Frac {
        Frac::new(self.rulesup, self.n)
    }

    pub fn confidence(&self) -> Frac {
        Frac::new(self.rulesup, self.condsup)
    }

    pub fn display<'a>(&'a self, schema: &'a Schema) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, schema }
    }
}

/// `IF A=e THEN C=y  sup=3/10 conf=3/4 pass=1 ord=1`
pub struct RuleDisplay<'a> {
    rule: &'a ClassAssociationRule,
    schema: &'a Schema,
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rule;
        write!(
            f,
            "IF {} THEN {}={}  sup={} conf={} pass={} ord={}",
            r.condset.display(self.schema),
            self.schema.class_attribute(),
            self.schema.class_name(r.class),
            r.support(),
            r.confidence(),
            r.pass,
            r.ordinal
        )
    }
}

/// One rule per line in the shared rule text format.
pub fn format_rules(rules: &[ClassAssociationRule], schema: &Schema) -> String {
    let mut out = String::new();
    for r in rules {
        out.push_str(&r.display(schema).to_string());
        out.push('\n');
    }
    out
}

/// Rows matching `condset`, and how many of those carry `class`.
pub fn count_ruleitem(dataset: &Dataset, condset: &Condset, class: u32) -> Result<(u64, u64)> {
    condset.validate(dataset.schema())?;
    if class as usize >= dataset.schema().num_classes() {
        return Err(CbaError::UnknownClass(class));
    }
    let mut cond = 0;
    let mut rule = 0;
    for row in dataset.rows() {
        if condset.matches(row) {
            cond += 1;
            if row.class == class {
                rule += 1;
            }
        }
    }
    Ok((cond, rule))
}

/// Apriori join and prune over one level of frequent ruleitems.
///
/// Two ruleitems join when they have the same class and the same first
/// `k - 1` items and their last items are on different attributes. A
/// joined candidate survives only if every `k`-item sub-ruleitem of the
/// same class is in `frequent`. Counts of the candidates are zero.
pub fn candidate_gen(frequent: &[RuleItem]) -> Vec<RuleItem> {
    let present: HashSet<(&Condset, u32)> = frequent.iter().map(|r| (&r.condset, r.class)).collect();

    let mut sorted: Vec<&RuleItem> = frequent.iter().collect();
    sorted.sort_by(|a, b| {
        a.class
            .cmp(&b.class)
            .then_with(|| a.condset.items().cmp(b.condset.items()))
    });

    let mut out = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let head = sorted[start];
        let k = head.condset.len();
        let prefix = &head.condset.items()[..k.saturating_sub(1)];
        let mut end = start + 1;
        while end < sorted.len()
            && sorted[end].class == head.class
            && sorted[end].condset.len() == k
            && &sorted[end].condset.items()[..k.saturating_sub(1)] == prefix
        {
            end += 1;
        }
        for i in start..end {
            for j in i + 1..end {
                let (a, b) = (sorted[i], sorted[j]);
                let Some(&last_a) = a.condset.items().last() else {
                    continue;
                };
                let last_b = b.condset.items()[k - 1];
                if last_a.attribute == last_b.attribute {
                    continue;
                }
                let mut items = prefix.to_vec();
                items.push(last_a);
                items.push(last_b);
                let Some(condset) = Condset::new(items) else {
                    continue;
                };
                let all_subsets_frequent =
                    (0..condset.len()).all(|d| present.contains(&(&condset.without(d), head.class)));
                if all_subsets_frequent {
                    out.push(RuleItem {
                        condset,
                        class: head.class,
                        condsup: 0,
                        rulesup: 0,
                    });
                }
            }
        }
        start = end;
    }
    out.sort_by(RuleItem::canonical_cmp);
    out.dedup_by(|a, b| a.condset == b.condset && a.class == b.class);
    out
}

/// Fills in counts for `candidates` (canonically ordered) with one row
/// scan per distinct condset.
fn count_candidates(dataset: &Dataset, candidates: &mut [RuleItem]) {
    let nclasses = dataset.schema().num_classes();
    let mut start = 0;
    while start < candidates.len() {
        let mut end = start + 1;
        while end < candidates.len() && candidates[end].condset == candidates[start].condset {
            end += 1;
        }
        let condset = &candidates[start].condset;
        let mut cond = 0u64;
        let mut by_class = vec![0u64; nclasses];
        for row in dataset.rows() {
            if condset.matches(row) {
                cond += 1;
                by_class[row.class as usize] += 1;
            }
        }
        for c in &mut candidates[start..end] {
            c.condsup = cond;
            c.rulesup = by_class[c.class as usize];
        }
        start = end;
    }
}

fn is_frequent(item: &RuleItem, minsup: Threshold, n: u64) -> bool {
    item.rulesup > 0 && minsup.admits(item.rulesup, n)
}

pub fn generate_frequent_ruleitems(dataset: &Dataset, config: &MiningConfig) -> FrequentSets {
    let schema = dataset.schema();
    let n = dataset.n() as u64;
    let nclasses = schema.num_classes();

    // First pass: one scan over all (attribute, value, class) triples.
    let mut counts: Vec<Vec<Vec<u64>>> = (0..schema.num_attributes() as u32)
        .map(|a| vec![vec![0u64; nclasses]; schema.values(a).len()])
        .collect();
    for row in dataset.rows() {
        for (a, &v) in row.values.iter().enumerate() {
            counts[a][v as usize][row.class as usize] += 1;
        }
    }
    let mut level = Vec::new();
    for (a, per_value) in counts.iter().enumerate() {
        for (v, per_class) in per_value.iter().enumerate() {
            let condsup: u64 = per_class.iter().sum();
            for (c, &rulesup) in per_class.iter().enumerate() {
                let item = RuleItem {
                    condset: Condset(vec![Item::new(a as u32, v as u32)]),
                    class: c as u32,
                    condsup,
                    rulesup,
                };
                if is_frequent(&item, config.minsup, n) {
                    level.push(item);
                }
            }
        }
    }

    let mut levels = Vec::new();
    while !level.is_empty() {
        let mut candidates = candidate_gen(&level);
        count_candidates(dataset, &mut candidates);
        candidates.retain(|c| is_frequent(c, config.minsup, n));
        levels.push(std::mem::replace(&mut level, candidates));
    }
    FrequentSets { n, levels }
}

pub fn extract_cars(frequent: &FrequentSets, config: &MiningConfig) -> Vec<ClassAssociationRule> {
    frequent
        .iter()
        .filter(|(_, _, item)| config.minconf.admits(item.rulesup, item.condsup))
        .map(|(pass, ordinal, item)| ClassAssociationRule {
            condset: item.condset.clone(),
            class: item.class,
            rulesup: item.rulesup,
            condsup: item.condsup,
            n: frequent.n,
            pass,
            ordinal,
        })
        .collect()
}

/// Frequent ruleitems and CARs in one call.
pub fn mine_cars(dataset: &Dataset, config: &MiningConfig) -> Vec<ClassAssociationRule> {
    extract_cars(&generate_frequent_ruleitems(dataset, config), config)
}
