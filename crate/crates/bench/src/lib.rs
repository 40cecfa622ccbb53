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

//! Shared fixtures for the criterion benchmarks.

use std::path::PathBuf;

use cba_core::Dataset;

/// Loads a CSV from the workspace `data/` directory, class in the last column.
pub fn fixture(name: &str) -> Dataset {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    Dataset::load_csv(&path, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
