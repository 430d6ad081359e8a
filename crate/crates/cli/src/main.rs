//! `floorsum`: batch front end for the floor-quotient engine.
//!
//! Every result is one JSON object per line on stdout (or CSV with
//! `--format csv`). Diagnostics go to stderr. Exit status is 0 on success,
//! 1 on an engine error or failed check, 2 on a usage error.

mod checks;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use floorsum_core::exponent::{apply_word, bound_profile, expand_word};
use floorsum_core::floorsum::{floor_sum, floor_sum_naive, normalize_real_x};
use floorsum_core::series::kappa;
use floorsum_core::{
    ArithFnSpec, ExponentPair, FloorSumOptions, FnKind, GrowthClass, MemoryBudget, SumValue,
};

use output::{Format, OutputRecord, Sink, Status};

/// Above this `x` the sum command wants `--force`.
const FORCE_LIMIT: u64 = 1_000_000_000_000;

#[derive(Parser)]
#[command(
    name = "floorsum",
    version,
    about = "Sums of arithmetic functions at floor quotients"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; 1 gives the reference sequential order.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// S_f(x) = sum_{n <= x} f(floor(x / n)).
    Sum {
        /// phi, phi-over-n, phi-pow:B, tau:K, lambda-omega:L, digit-sum:Q, mk:K, mk-norm:K
        #[arg(long = "function", value_parser = parse_spec)]
        function: ArithFnSpec,
        /// Upper limit; a real value is floored.
        #[arg(long, value_parser = parse_x)]
        x: XArg,
        /// Direct n = 1..x loop instead of quotient blocks.
        #[arg(long)]
        naive: bool,
        /// Allow x above 10^12.
        #[arg(long)]
        force: bool,
    },
    /// Recompute the reference rho(x) tables.
    Table {
        #[arg(long, value_parser = ["6.1", "6.2", "6.3"])]
        which: String,
    },
    /// sum_{n >= 1} f(n) / (n (n + 1)) with a certified tail.
    Constant {
        #[arg(long = "function", value_parser = parse_spec)]
        function: ArithFnSpec,
        /// Truncation point N.
        #[arg(long, default_value_t = 10_000_000)]
        trunc: u64,
        /// auto, tau:A,K, power:C,BETA or lambda-omega:L
        #[arg(long, default_value = "auto", value_parser = parse_growth)]
        growth: GrowthArg,
    },
    /// Apply an A/B word to an exponent pair.
    Exponent {
        /// Word such as BAAB or BA^3(BA^2)^2, applied right to left.
        #[arg(long, value_parser = parse_word)]
        word: String,
        /// Seed pair "k,l" with rational entries.
        #[arg(long, default_value = "0,1", value_parser = parse_pair)]
        seed: ExponentPair,
    },
    /// Run an invariant suite.
    Check {
        /// vaaler, harmonic, phi-n2, explicit-upper, tau-x, oracle, lemma42 or residual:<fn>
        #[arg(long, value_parser = checks::parse_suite)]
        suite: checks::Suite,
    },
}

#[derive(Debug, Clone)]
struct XArg {
    value: u64,
    given: String,
    floored: bool,
}

fn parse_spec(s: &str) -> Result<ArithFnSpec, String> {
    s.parse().map_err(|e: floorsum_core::Error| e.to_string())
}

fn parse_x(s: &str) -> Result<XArg, String> {
    let given = s.trim().to_string();
    if let Ok(v) = given.parse::<u64>() {
        if v == 0 {
            return Err("x must be >= 1".into());
        }
        return Ok(XArg {
            value: v,
            given,
            floored: false,
        });
    }
    let real: f64 = given.parse().map_err(|_| format!("not a number: {s}"))?;
    let value = normalize_real_x(real).map_err(|e| e.to_string())?;
    Ok(XArg {
        value,
        floored: real != value as f64,
        given,
    })
}

#[derive(Debug, Clone)]
enum GrowthArg {
    Auto,
    Given(GrowthClass),
}

fn parse_growth(s: &str) -> Result<GrowthArg, String> {
    if s.trim() == "auto" {
        return Ok(GrowthArg::Auto);
    }
    s.parse()
        .map(GrowthArg::Given)
        .map_err(|e: floorsum_core::Error| e.to_string())
}

fn parse_word(s: &str) -> Result<String, String> {
    expand_word(s).map_err(|e| e.to_string())?;
    Ok(s.to_string())
}

fn parse_pair(s: &str) -> Result<ExponentPair, String> {
    s.parse().map_err(|e: floorsum_core::Error| e.to_string())
}

/// `v` to 4 decimals, ties to even.
pub(crate) fn four_places(v: f64) -> String {
    format!("{:.4}", (v * 1e4).round_ties_even() / 1e4)
}

pub(crate) fn sum_outputs(rec: OutputRecord, value: &SumValue) -> OutputRecord {
    match *value {
        SumValue::Exact(v) => rec.output("value", v),
        SumValue::Real {
            value,
            error_estimate,
        } => rec
            .output("value", value)
            .output("error_estimate", error_estimate),
    }
}

fn run(cli: Cli, sink: &mut Sink) -> std::io::Result<()> {
    let opts = match cli.threads {
        Some(t) => FloorSumOptions::with_threads(t.max(1)),
        None => FloorSumOptions::default(),
    };
    match cli.command {
        Command::Sum {
            function,
            x,
            naive,
            force,
        } => {
            if x.floored {
                eprintln!("warning: x = {} floored to {}", x.given, x.value);
            }
            if x.value > FORCE_LIMIT && !force {
                let rec = OutputRecord::new("sum")
                    .input("function", function)
                    .input("x", x.value);
                return sink.emit(rec.failed(format!(
                    "x = {} exceeds 10^12; pass --force to run anyway",
                    x.value
                )));
            }
            let start = Instant::now();
            let res = if naive {
                floor_sum_naive(&function, x.value)
            } else {
                floor_sum(&function, x.value, &opts)
            };
            let mut rec = OutputRecord::new("sum")
                .input("function", function)
                .input("x", x.value)
                .input("naive", naive);
            let rec = match res {
                Ok(r) => {
                    rec = sum_outputs(rec, &r.value).output("block_count", r.block_count);
                    if function.kind() == FnKind::Phi && x.value >= 3 {
                        let xf = x.value as f64;
                        let rho = r.value.as_f64() / (xf * xf.ln());
                        rec = rec.output("rho", four_places(rho)).output("rho_full", rho);
                    }
                    rec.elapsed(start.elapsed())
                }
                Err(e) => rec.failed(e),
            };
            sink.emit(rec)
        }
        Command::Table { which } => checks::table(&which, &opts, sink),
        Command::Constant {
            function,
            trunc,
            growth,
        } => {
            let start = Instant::now();
            let growth = match growth {
                GrowthArg::Auto => GrowthClass::natural_for(&function),
                GrowthArg::Given(g) => Ok(g),
            };
            let rec = OutputRecord::new("constant")
                .input("function", function)
                .input("trunc", trunc);
            let res = growth.and_then(|g| kappa(&function, trunc, g, MemoryBudget::from_env()));
            let rec = match res {
                Ok(c) => {
                    let iv = c.value_interval();
                    rec.input("growth", c.growth)
                        .output("partial_sum", c.partial_sum)
                        .output("tail_bound", c.tail_bound)
                        .output("rounding_bound", c.rounding_bound)
                        .output("lo", iv.lo)
                        .output("hi", iv.hi)
                        .output("width", iv.width())
                        .elapsed(start.elapsed())
                }
                Err(e) => rec.failed(e),
            };
            sink.emit(rec)
        }
        Command::Exponent { word, seed } => {
            let start = Instant::now();
            let rec = OutputRecord::new("exponent")
                .input("word", &word)
                .input("seed", &seed);
            let res = expand_word(&word).and_then(|flat| apply_word(&flat, &seed));
            let rec = match res {
                Ok(p) => {
                    let profile = bound_profile(&p);
                    eprintln!("note: epsilon terms are taken as 0 in the pair and theta");
                    rec.output("k", p.k())
                        .output("l", p.l())
                        .output("theta", &profile.theta)
                        .output("lower_coeff", profile.lower_coeff)
                        .output("upper_coeff", profile.upper_coeff)
                        .elapsed(start.elapsed())
                }
                Err(e) => rec.failed(e),
            };
            sink.emit(rec)
        }
        Command::Check { suite } => checks::run_suite(&suite, &opts, sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut sink = Sink::new(cli.format);
    let written = run(cli, &mut sink);
    let worst = sink.worst();
    let finished = sink.finish();
    if let Err(e) = written.and(finished) {
        eprintln!("error: writing output: {e}");
        return ExitCode::FAILURE;
    }
    match worst {
        Status::Ok => ExitCode::SUCCESS,
        Status::CheckFailed | Status::Error => ExitCode::FAILURE,
    }
}
