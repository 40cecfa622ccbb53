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

//! Numeric-to-categorical binning.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{CbaError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinStrategy {
    EqualWidth,
    #[default]
    EqualFrequency,
}

impl FromStr for BinStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "equal-width" => Ok(BinStrategy::EqualWidth),
            "equal-frequency" => Ok(BinStrategy::EqualFrequency),
            other => Err(format!("unknown binning strategy `{other}`")),
        }
    }
}

pub const DEFAULT_BINS: usize = 4;

/// Replaces each named column with interval labels `[lo,hi)`; the last
/// interval of a column is closed (`[lo,hi]`).
pub fn discretize(dataset: &Dataset, columns: &[&str], strategy: BinStrategy, bins: usize) -> Result<Dataset> {
    if bins < 1 {
        return Err(CbaError::InvalidBins);
    }
    if columns.is_empty() {
        return Ok(dataset.clone());
    }
    let schema = dataset.schema();
    let mut targets = Vec::with_capacity(columns.len());
    for &name in columns {
        let attr = schema
            .attribute_id(name)
            .ok_or_else(|| CbaError::UnknownAttribute(name.to_string()))?;
        targets.push(attr);
    }

    let mut records: Vec<Vec<String>> = dataset
        .rows()
        .iter()
        .map(|row| {
            let mut attr = 0u32;
            (0..schema.columns().len())
                .map(|c| {
                    if c == schema.class_column_index() {
                        schema.class_name(row.class).to_string()
                    } else {
                        let v = schema.value_name(attr, row.value(attr)).to_string();
                        attr += 1;
                        v
                    }
                })
                .collect()
        })
        .collect();

    for &attr in &targets {
        let col = column_index(schema.class_column_index(), attr);
        let name = schema.attribute_name(attr);
        let numbers = records
            .iter()
            .enumerate()
            .map(|(r, rec)| {
                rec[col]
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CbaError::NonNumeric {
                        row: r + 1,
                        column: name.to_string(),
                        value: rec[col].clone(),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        let edges = match strategy {
            BinStrategy::EqualWidth => equal_width_edges(&numbers, bins),
            BinStrategy::EqualFrequency => equal_frequency_edges(&numbers, bins),
        };
        for (rec, &x) in records.iter_mut().zip(&numbers) {
            rec[col] = bin_label(&edges, x);
        }
    }

    Dataset::from_records(schema.columns().to_vec(), records, Some(schema.class_attribute()))
}

fn column_index(class_column: usize, attr: u32) -> usize {
    let a = attr as usize;
    if a >= class_column {
        a + 1
    } else {
        a
    }
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

/// Strictly increasing edges; a single edge means a degenerate column.
fn equal_width_edges(xs: &[f64], bins: usize) -> Vec<f64> {
    let (lo, hi) = min_max(xs);
    if lo == hi {
        return vec![lo];
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    edges.dedup();
    edges
}

fn equal_frequency_edges(xs: &[f64], bins: usize) -> Vec<f64> {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut edges = vec![sorted[0]];
    for i in 1..bins {
        let e = sorted[i * n / bins];
        if e > *edges.last().unwrap() {
            edges.push(e);
        }
    }
    let hi = sorted[n - 1];
    if hi > *edges.last().unwrap() {
        edges.push(hi);
    }
    edges
}

fn bin_label(edges: &[f64], x: f64) -> String {
    if edges.len() == 1 {
        return format!("[{},{}]", edges[0], edges[0]);
    }
    let last = edges.len() - 2;
    let i = (0..=last).rev().find(|&i| x >= edges[i]).unwrap_or(0);
    if i == last {
        format!("[{},{}]", edges[i], edges[i + 1])
    } else {
        format!("[{},{})", edges[i], edges[i + 1])
    }
}
