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

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CbaError>;

#[derive(Debug, Error)]
pub enum CbaError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("empty input: no header line")]
    EmptyFile,
    #[error("no data rows below the header")]
    NoRows,
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("row {row}: empty cell in column `{column}`")]
    EmptyCell { row: usize, column: String },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("class column `{0}` not found in header")]
    MissingClassColumn(String),
    #[error("a dataset needs at least one attribute besides the class column")]
    NoAttributes,
    #[error("row {row}: column `{column}` value `{value}` is not numeric")]
    NonNumeric { row: usize, column: String, value: String },
    #[error("bin count must be at least 1")]
    InvalidBins,
    #[error("invalid fold count {nfolds} for {n} rows")]
    InvalidFolds { nfolds: usize, n: usize },
    #[error("threshold {0} is not a fraction in [0, 1]")]
    InvalidThreshold(f64),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("unknown value id {value} for attribute `{attribute}`")]
    UnknownValue { attribute: String, value: u32 },
    #[error("unknown class id {0}")]
    UnknownClass(u32),
    #[error("entropy is undefined for all-zero class counts")]
    ZeroCounts,
    #[error("cannot evaluate on an empty test set")]
    EmptyTestSet,
    #[error("fold {0} leaves an empty training partition")]
    EmptyTraining(usize),
    #[error("rule sets reference different schemas")]
    SchemaMismatch,
    #[error("unknown grouping `{0}` (expected by-attribute-count, by-row-count or by-class-count)")]
    UnknownGrouping(String),
    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },
    #[error("model file version {found} is not supported (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },
}

impl CbaError {
    /// True for errors caused by user input (files, flags, thresholds)
    /// rather than by an internal failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, CbaError::SchemaMismatch | CbaError::ZeroCounts)
    }
}
