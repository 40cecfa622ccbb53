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

//! `cba`: mine, train, predict, evaluate and benchmark associative
//! classifiers on categorical CSV files.
//!
//! Exit status is 0 on success, 2 on input errors (bad flags, unreadable
//! or malformed files) and 1 on internal failures.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use cba_core::{BinStrategy, CbaError, MiningConfig, ModelConfig, PartitionStrategy, Provenance, TreeSettings};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "cba", version, about = "Associative classification (CBA) toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the schema and class distribution of a dataset.
    Inspect {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Mine class association rules and write them in rule text form.
    Mine {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0.15)]
        minsup: f64,
        #[arg(long, default_value_t = 0.60)]
        minconf: f64,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Train a classifier on the whole dataset and save it.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the CAR/tree merge report (cba-odm2 only).
        #[arg(long)]
        merge_report: Option<PathBuf>,
    },
    /// Append a `predicted` column to a CSV using a saved model.
    Predict {
        model: PathBuf,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-validate one configuration and print a JSON report.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the minsup/minconf scenarios over every CSV in a directory.
    Bench {
        dir: PathBuf,
        #[arg(long = "class-col")]
        class_col: Option<String>,
        #[command(flatten)]
        model: ModelArgs,
        /// `minsup:minconf`, repeatable. Defaults to the four standard scenarios.
        #[arg(long = "scenario", value_parser = parse_scenario)]
        scenarios: Vec<(f64, f64)>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-execute the command recorded in a report's manifest.
    Rerun {
        report: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Input CSV with a header line.
    path: PathBuf,
    /// Class column name; the last column when omitted.
    #[arg(long = "class-col")]
    class_col: Option<String>,
    /// Comma separated numeric columns to bin before mining.
    #[arg(long, value_delimiter = ',')]
    discretize: Vec<String>,
    #[arg(long, default_value_t = cba_core::discretize::DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value = "equal-frequency")]
    bin_strategy: BinStrategy,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, default_value = "cba-odm1")]
    model: Provenance,
    #[arg(long, default_value_t = 0.15)]
    minsup: f64,
    #[arg(long, default_value_t = 0.50)]
    minconf: f64,
    /// Skip dropping rules dominated by a more general rule (cba-odm1).
    #[arg(long)]
    no_prune: bool,
    #[arg(long, default_value_t = 7)]
    max_depth: usize,
    #[arg(long, default_value_t = 2)]
    min_rows: usize,
    #[arg(long, default_value_t = 0.0)]
    min_gain: f64,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for fold evaluation.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Assign folds by `position mod folds` over one shuffled list instead
    /// of per-class dealing.
    #[arg(long)]
    plain_mod: bool,
}

impl ModelArgs {
    fn config(&self) -> Result<ModelConfig, CbaError> {
        Ok(ModelConfig {
            family: self.model,
            mining: MiningConfig::new(self.minsup, self.minconf)?,
            tree: TreeSettings {
                max_depth: self.max_depth.max(1),
                min_rows_per_node: self.min_rows.max(1),
                min_gain: self.min_gain.max(0.0),
            },
            prune_general: !self.no_prune,
            nfolds: self.folds,
            seed: self.seed,
            partition: if self.plain_mod {
                PartitionStrategy::PlainMod
            } else {
                PartitionStrategy::Stratified
            },
            jobs: self.jobs.max(1),
        })
    }
}

fn parse_scenario(s: &str) -> Result<(f64, f64), String> {
    let (sup, conf) = s
        .split_once(':')
        .ok_or_else(|| format!("expected minsup:minconf, got `{s}`"))?;
    let sup: f64 = sup.parse().map_err(|_| format!("bad minsup `{sup}`"))?;
    let conf: f64 = conf.parse().map_err(|_| format!("bad minconf `{conf}`"))?;
    Ok((sup, conf))
}

/// Marks an error as caused by user input.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<InputError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<CbaError>() {
        Some(e) if e.is_input_error() => 2,
        _ => 1,
    }
}

/// Joins the error chain, skipping causes already spelled out by their parent.
fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if out.contains(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}

fn run(command: Command, argv: Vec<String>) -> anyhow::Result<()> {
    match command {
        Command::Inspect { data } => commands::inspect(&data),
        Command::Mine {
            data,
            minsup,
            minconf,
            output,
        } => commands::mine(&data, minsup, minconf, output.as_deref()),
        Command::Train {
            data,
            model,
            output,
            merge_report,
        } => commands::train(&data, &model, &output, merge_report.as_deref()),
        Command::Predict { model, input, output } => commands::predict(&model, &input, output.as_deref()),
        Command::Eval { data, model, output } => commands::eval(&data, &model, output.as_deref(), argv),
        Command::Bench {
            dir,
            class_col,
            model,
            scenarios,
            output,
        } => commands::bench(&dir, class_col.as_deref(), &model, &scenarios, output.as_deref(), argv),
        Command::Rerun { report, output } => {
            let argv = commands::recorded_argv(&report)?;
            let cli = Cli::try_parse_from(&argv)
                .map_err(|e| InputError(format!("{}: recorded command does not parse: {e}", report.display())))?;
            let command = match cli.command {
                Command::Eval { data, model, .. } => Command::Eval { data, model, output },
                Command::Bench {
                    dir,
                    class_col,
                    model,
                    scenarios,
                    ..
                } => Command::Bench {
                    dir,
                    class_col,
                    model,
                    scenarios,
                    output,
                },
                _ => {
                    return Err(InputError(format!(
                        "{}: only eval and bench reports can be rerun",
                        report.display()
                    ))
                    .into())
                }
            };
            run(command, argv)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    match run(cli.command, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("cba: {}", describe(&err));
            ExitCode::from(exit_code(&err))
        }
    }
}
