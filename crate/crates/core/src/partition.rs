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

//! Seeded fold assignment for cross-validation.
//!
//! The generator is SplitMix64 and the shuffle is a descending
//! Fisher-Yates pass with `j = next() % (i + 1)`. Both are spelled out here
//! so that fold assignments can be reproduced bit-for-bit elsewhere.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{CbaError, Result};

/// SplitMix64 (Steele, Lea and Flood).
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            items.swap(i, j);
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionStrategy {
    /// Shuffle each class separately, concatenate in class-id order, deal
    /// round-robin.
    #[default]
    Stratified,
    /// Shuffle all rows once and assign `position mod nfolds`.
    PlainMod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub nfolds: usize,
    pub seed: u64,
    /// Fold index of each dataset row.
    pub assignment: Vec<usize>,
}

impl FoldAssignment {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.nfolds];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }
}

pub fn stratified_shuffle_partition(dataset: &Dataset, nfolds: usize, seed: u64) -> Result<FoldAssignment> {
    partition(dataset, nfolds, seed, PartitionStrategy::Stratified)
}

pub fn partition(dataset: &Dataset, nfolds: usize, seed: u64, strategy: PartitionStrategy) -> Result<FoldAssignment> {
    let n = dataset.n();
    if nfolds < 1 || nfolds > n {
        return Err(CbaError::InvalidFolds { nfolds, n });
    }
    let mut rng = SplitMix64::new(seed);
    let order: Vec<usize> = match strategy {
        PartitionStrategy::Stratified => {
            let mut groups = vec![Vec::new(); dataset.schema().num_classes()];
            for (i, row) in dataset.rows().iter().enumerate() {
                groups[row.class as usize].push(i);
            }
            groups
                .into_iter()
                .flat_map(|mut g| {
                    rng.shuffle(&mut g);
                    g
                })
                .collect()
        }
        PartitionStrategy::PlainMod => {
            let mut all: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut all);
            all
        }
    };
    let mut assignment = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        assignment[row] = pos % nfolds;
    }
    Ok(FoldAssignment {
        nfolds,
        seed,
        assignment,
    })
}
