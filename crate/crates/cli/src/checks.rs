//! Table reproduction and the invariant suites behind `floorsum check`.

use std::io;
use std::time::Instant;

use floorsum_core::analytic::{
    explicit_upper_bound, explicit_upper_check, harmonic_check_grid, lemma42_check,
    phi_over_n2_check_grid, residual_harness, vaaler_scan, LogExponent,
};
use floorsum_core::floorsum::{floor_sum, floor_sum_naive, verify_tau_x_identity};
use floorsum_core::series::kappa;
use floorsum_core::{
    ArithFnSpec, ExponentPair, FloorSumOptions, FnKind, GrowthClass, MemoryBudget,
};

use crate::output::{OutputRecord, Sink};
use crate::{four_places, sum_outputs};

const TABLE_TOLERANCE: f64 = 5e-5;

fn table_rows(which: &str) -> Vec<(u64, f64)> {
    let near = |base: u64, printed: [f64; 5]| {
        printed
            .iter()
            .enumerate()
            .map(|(i, &v)| (base + i as u64, v))
            .collect()
    };
    match which {
        "6.1" => vec![
            (1_000_000, 0.5844),
            (10_000_000, 0.5849),
            (100_000_000, 0.5896),
            (1_000_000_000, 0.5909),
            (10_000_000_000, 0.5940),
        ],
        "6.2" => near(1_000_000, [0.5844, 0.6274, 0.5965, 0.6447, 0.6108]),
        _ => near(10_000_000_000, [0.5940, 0.6200, 0.6001, 0.6270, 0.6144]),
    }
}

pub fn table(which: &str, opts: &FloorSumOptions, sink: &mut Sink) -> io::Result<()> {
    for (x, printed) in table_rows(which) {
        let start = Instant::now();
        let rec = OutputRecord::new("table")
            .input("which", which)
            .input("x", x);
        let rec = match floor_sum(&ArithFnSpec::phi(), x, opts) {
            Ok(r) => {
                let xf = x as f64;
                let rho = r.value.as_f64() / (xf * xf.ln());
                let diff = rho - printed;
                sum_outputs(rec, &r.value)
                    .output("rho", four_places(rho))
                    .output("rho_full", rho)
                    .output("reference", format!("{printed:.4}"))
                    .output("diff", diff)
                    .elapsed(start.elapsed())
                    .check(diff.abs() <= TABLE_TOLERANCE)
            }
            Err(e) => rec.failed(e),
        };
        if rec.status == crate::output::Status::CheckFailed {
            eprintln!("table {which}: x = {x} differs from the reference value");
        }
        sink.emit(rec)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum Suite {
    Vaaler,
    Harmonic,
    PhiN2,
    ExplicitUpper,
    TauX,
    Oracle,
    Lemma42,
    Residual(ArithFnSpec),
}

pub fn parse_suite(s: &str) -> Result<Suite, String> {
    Ok(match s.trim() {
        "vaaler" => Suite::Vaaler,
        "harmonic" => Suite::Harmonic,
        "phi-n2" => Suite::PhiN2,
        "explicit-upper" => Suite::ExplicitUpper,
        "tau-x" => Suite::TauX,
        "oracle" => Suite::Oracle,
        "lemma42" => Suite::Lemma42,
        other => match other.strip_prefix("residual:") {
            Some(f) => Suite::Residual(f.parse().map_err(|e: floorsum_core::Error| e.to_string())?),
            None => return Err(format!("unknown suite `{other}`")),
        },
    })
}

impl Suite {
    fn name(&self) -> String {
        match self {
            Suite::Vaaler => "vaaler".into(),
            Suite::Harmonic => "harmonic".into(),
            Suite::PhiN2 => "phi-n2".into(),
            Suite::ExplicitUpper => "explicit-upper".into(),
            Suite::TauX => "tau-x".into(),
            Suite::Oracle => "oracle".into(),
            Suite::Lemma42 => "lemma42".into(),
            Suite::Residual(f) => format!("residual:{f}"),
        }
    }
}

pub fn run_suite(suite: &Suite, opts: &FloorSumOptions, sink: &mut Sink) -> io::Result<()> {
    let name = suite.name();
    let base = || OutputRecord::new("check").input("suite", &name);
    match suite {
        Suite::Vaaler => {
            let points = 100_000;
            let mut prev: Option<f64> = None;
            for h in [1u32, 5, 10, 50, 100] {
                let start = Instant::now();
                let scan = vaaler_scan(h, (0..points).map(|i| i as f64 / points as f64));
                let monotone = prev.map_or(true, |p| scan.max_error <= p + 1e-12);
                prev = Some(scan.max_error);
                sink.emit(
                    base()
                        .input("H", h)
                        .input("points", points)
                        .output("max_error", scan.max_error)
                        .output("max_excess", scan.max_excess)
                        .elapsed(start.elapsed())
                        .check(scan.max_excess <= 1e-12 && monotone),
                )?;
            }
        }
        Suite::Harmonic => {
            let start = Instant::now();
            let grid: Vec<f64> = (100..=1_000_000).map(|i| i as f64 / 100.0).collect();
            let rec = match harmonic_check_grid(&grid) {
                Ok(flags) => {
                    let failures = flags.iter().filter(|b| !**b).count();
                    base()
                        .input("grid", "1..=1e4 step 0.01")
                        .output("points", grid.len())
                        .output("failures", failures)
                        .elapsed(start.elapsed())
                        .check(failures == 0)
                }
                Err(e) => base().failed(e),
            };
            sink.emit(rec)?;
        }
        Suite::PhiN2 => {
            let start = Instant::now();
            let xs: Vec<f64> = (1..=7).map(|e| 10f64.powi(e)).collect();
            match phi_over_n2_check_grid(&xs) {
                Ok(flags) => {
                    for (x, ok) in xs.iter().zip(flags) {
                        sink.emit(
                            base()
                                .input("x", x)
                                .output("holds", ok)
                                .elapsed(start.elapsed())
                                .check(ok),
                        )?;
                    }
                }
                Err(e) => sink.emit(base().failed(e))?,
            }
        }
        Suite::ExplicitUpper => {
            let (lo, hi) = (3f64.ln(), 1e8f64.ln());
            for i in 0..50 {
                let x = (lo + (hi - lo) * i as f64 / 49.0).exp().round() as u64;
                let start = Instant::now();
                let rec = match explicit_upper_check(x, opts) {
                    Ok(ok) => base()
                        .input("x", x)
                        .output("bound", explicit_upper_bound(x as f64))
                        .output("holds", ok)
                        .elapsed(start.elapsed())
                        .check(ok),
                    Err(e) => base().input("x", x).failed(e),
                };
                sink.emit(rec)?;
            }
        }
        Suite::TauX => {
            let start = Instant::now();
            let failures = (1..=2000u64)
                .filter(|&x| !matches!(verify_tau_x_identity(x), Ok(true)))
                .count();
            sink.emit(
                base()
                    .input("x", "1..=2000")
                    .output("failures", failures)
                    .elapsed(start.elapsed())
                    .check(failures == 0),
            )?;
            for x in [
                2503u64, 3001, 4096, 5040, 6007, 7777, 8191, 9240, 9973, 10_000,
            ] {
                let start = Instant::now();
                let rec = match verify_tau_x_identity(x) {
                    Ok(ok) => base()
                        .input("x", x)
                        .output("holds", ok)
                        .elapsed(start.elapsed())
                        .check(ok),
                    Err(e) => base().input("x", x).failed(e),
                };
                sink.emit(rec)?;
            }
        }
        Suite::Oracle => {
            let extra = [
                10_000u64, 65_536, 99_991, 123_456, 500_000, 720_720, 999_983, 1_000_000,
            ];
            for f in [
                "phi",
                "tau:2",
                "tau:3",
                "digit-sum:10",
                "mk:2",
                "phi-over-n",
                "phi-pow:0.5",
                "lambda-omega:1.7320508075688772",
                "mk-norm:2",
            ] {
                let spec: ArithFnSpec = f.parse().expect("built-in spec");
                let start = Instant::now();
                let mut mismatches = 0usize;
                let mut checked = 0usize;
                for x in (1..=2000).chain(extra) {
                    let fast = floor_sum(&spec, x, opts).map(|r| r.value);
                    let slow = floor_sum_naive(&spec, x).map(|r| r.value);
                    let same = match (fast, slow) {
                        (Ok(a), Ok(b)) if spec.is_exact() => a == b,
                        (Ok(a), Ok(b)) => {
                            (a.as_f64() - b.as_f64()).abs() <= 1e-9 * b.as_f64().abs()
                        }
                        _ => false,
                    };
                    checked += 1;
                    mismatches += !same as usize;
                }
                sink.emit(
                    base()
                        .input("function", spec)
                        .output("checked", checked)
                        .output("mismatches", mismatches)
                        .elapsed(start.elapsed())
                        .check(mismatches == 0),
                )?;
            }
        }
        Suite::Lemma42 => {
            let pairs = [("1/2", "1/2"), ("3071/7887", "1380/2629")];
            for (k, l) in pairs {
                let pair: ExponentPair = format!("{k},{l}").parse().expect("built-in pair");
                let start = Instant::now();
                let rec =
                    match lemma42_check(&pair, &[1_000, 10_000, 100_000], |n| (n as f64).powf(1.5))
                    {
                        Ok(report) => {
                            for row in &report.rows {
                                sink.emit(
                                    base()
                                        .input("pair", &pair)
                                        .input("N", row.n)
                                        .input("x", row.x)
                                        .output("magnitude", row.magnitude)
                                        .output("bound", row.bound)
                                        .output("ratio", row.ratio),
                                )?;
                            }
                            base()
                                .input("pair", &pair)
                                .output("max_ratio", report.max_ratio)
                                .output("bounded", report.bounded)
                                .elapsed(start.elapsed())
                                .check(report.bounded)
                        }
                        Err(e) => base().input("pair", &pair).failed(e),
                    };
                sink.emit(rec)?;
            }
        }
        Suite::Residual(spec) => residual(spec, opts, sink, base())?,
    }
    Ok(())
}

/// Grid, `x^a`, `ln x` exponent and truncation for each function family.
fn residual_plan(spec: &ArithFnSpec) -> (Vec<u64>, f64, f64) {
    let wide = vec![10_000, 100_000, 10_000_000, 100_000_000];
    let mid = vec![10_000, 100_000, 1_000_000, 10_000_000];
    match spec.kind() {
        FnKind::PhiOverN => (wide, 0.5, 0.0),
        FnKind::DigitSum { .. } => (wide, 2.0 / 3.0, 0.0),
        FnKind::TauK { k: 1 } => (vec![16, 100, 1000, 5000, 20_000, 50_000], 0.0, 0.0),
        FnKind::TauK { k } => (mid, 0.5, k as f64 - 0.5),
        FnKind::LambdaPowOmega { lambda } => (mid, 0.5, lambda - 1.0),
        FnKind::PhiPow { beta } => (mid, (2.0 * beta + 1.0) / 3.0, 0.0),
        FnKind::MkFullNormalized { k } => (mid, (3.0 - 2.0 / k as f64) / 3.0, 0.0),
        _ => (mid, 0.5, 0.0),
    }
}

fn residual(
    spec: &ArithFnSpec,
    opts: &FloorSumOptions,
    sink: &mut Sink,
    base: OutputRecord,
) -> io::Result<()> {
    let start = Instant::now();
    let (grid, a, b) = residual_plan(spec);
    let report = GrowthClass::natural_for(spec)
        .and_then(|g| kappa(spec, 10_000_000, g, MemoryBudget::from_env()))
        .and_then(|c| residual_harness(&c, &grid, a, LogExponent::Fixed(b), opts));
    let report = match report {
        Ok(r) => r,
        Err(e) => return sink.emit(base.input("a", a).input("b", b).failed(e)),
    };
    for ((x, r), n) in report
        .x_grid
        .iter()
        .zip(&report.residuals)
        .zip(&report.normalized)
    {
        sink.emit(
            base.clone()
                .input("x", x)
                .input("a", a)
                .input("b", b)
                .output("residual", r)
                .output("normalized", n),
        )?;
    }
    // f = 1 has S(x) = x exactly, so only the size of the residual matters.
    let pass = if spec.kind() == (FnKind::TauK { k: 1 }) {
        report.residuals.iter().all(|r| r.abs() <= 2.0)
    } else {
        report.trend_bounded
    };
    sink.emit(
        base.input("a", a)
            .input("b", b)
            .output("max_normalized", report.max_normalized)
            .output("bottom_max", report.bottom_max)
            .output("top_max", report.top_max)
            .output("trend_bounded", report.trend_bounded)
            .elapsed(start.elapsed())
            .check(pass),
    )
}
