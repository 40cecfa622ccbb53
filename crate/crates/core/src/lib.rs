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

//! Associative classification over categorical data.
//!
//! The pipeline mines class association rules level by level, ranks them
//! by confidence, support and generation order, and turns them into an
//! ordered rule-list classifier. Two builders are provided:
//!
//! * `cba-odm1` keeps each rule that is the first correct match for some
//!   training row (database coverage), after dropping rules that a more
//!   general same-class rule already dominates;
//! * `cba-odm2` arbitrates every CAR against an information-gain decision
//!   tree, keeping the more confident consequent and dropping CARs that
//!   share no condition with any tree rule.
//!
//! [`evaluation`] runs stratified k-fold cross-validation and the
//! minsup/minconf scenario grid over either family or the tree alone.

pub mod classifier;
pub mod dataset;
pub mod discretize;
pub mod error;
pub mod evaluation;
pub mod fraction;
pub mod hybrid;
pub mod mining;
pub mod model_file;
pub mod partition;
pub mod report;
pub mod tree;

pub use classifier::{build_classifier, prune_general, rank_rules, Classifier, Provenance, RankedRules};
pub use dataset::{Dataset, Row, Schema};
pub use discretize::{discretize, BinStrategy};
pub use error::{CbaError, Result};
pub use evaluation::{
    cross_validate, group_report, run_scenarios, train, CvReport, DatasetMeta, Grouping, ModelConfig, ScenarioReport,
    TrainedModel, DEFAULT_SCENARIOS,
};
pub use fraction::{Frac, Threshold};
pub use hybrid::{match_fraction, merge, MergeReport, Side};
pub use mining::{
    candidate_gen, count_ruleitem, extract_cars, generate_frequent_ruleitems, mine_cars, ClassAssociationRule, Condset,
    FrequentSets, Item, MiningConfig, RuleItem,
};
pub use partition::{partition, stratified_shuffle_partition, FoldAssignment, PartitionStrategy};
pub use tree::{build_tree, entropy, info_gain, tree_to_rules, DecisionTree, TreeRule, TreeSettings};
