//! `S_f(x) = sum_{n <= x} f(floor(x / n))` by quotient blocks.
//!
//! As `n` runs over `1..=x` the quotient `floor(x / n)` takes at most
//! `2 floor(sqrt x) + 1` distinct values, each on a contiguous block of
//! `n`. Quotients `q <= floor(sqrt x)` are read from a sieve table; the
//! larger ones (one per `n <= sqrt x`) are evaluated pointwise from their
//! factorization.

use std::time::{Duration, Instant};

use num_integer::Integer;
use rayon::prelude::*;

use crate::arith::{build_sieve, eval, ArithFnSpec, MemoryBudget, SieveTable, Value};
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Maximal run of `n` with constant `floor(x / n) = q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientBlock {
    pub q: u64,
    pub n_lo: u64,
    pub n_hi: u64,
}

impl QuotientBlock {
    pub fn len(&self) -> u64 {
        self.n_hi - self.n_lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Iterator over the quotient blocks of `x` in increasing `n`.
#[derive(Debug, Clone)]
pub struct QuotientBlocks {
    x: u64,
    next: u64,
}

impl Iterator for QuotientBlocks {
    type Item = QuotientBlock;

    fn next(&mut self) -> Option<QuotientBlock> {
        if self.next == 0 || self.next > self.x {
            return None;
        }
        let n_lo = self.next;
        let q = self.x / n_lo;
        let n_hi = self.x / q;
        self.next = n_hi.checked_add(1).unwrap_or(0);
        Some(QuotientBlock { q, n_lo, n_hi })
    }
}

pub fn quotient_blocks(x: u64) -> QuotientBlocks {
    QuotientBlocks { x, next: 1 }
}

/// Exact sum (integer-valued functions) or compensated binary64 sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SumValue {
    Exact(u128),
    Real { value: f64, error_estimate: f64 },
}

impl SumValue {
    pub fn as_f64(&self) -> f64 {
        match *self {
            SumValue::Exact(v) => v as f64,
            SumValue::Real { value, .. } => value,
        }
    }

    pub fn exact(&self) -> Option<u128> {
        match *self {
            SumValue::Exact(v) => Some(v),
            SumValue::Real { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloorSumResult {
    pub x: u64,
    pub spec: ArithFnSpec,
    pub value: SumValue,
    pub block_count: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy)]
pub struct FloorSumOptions {
    /// Worker count; `None` uses the available parallelism, `Some(1)`
    /// runs on the calling thread.
    pub threads: Option<usize>,
    pub budget: MemoryBudget,
}

impl Default for FloorSumOptions {
    fn default() -> Self {
        FloorSumOptions {
            threads: None,
            budget: MemoryBudget::from_env(),
        }
    }
}

impl FloorSumOptions {
    pub fn sequential() -> Self {
        FloorSumOptions {
            threads: Some(1),
            ..Self::default()
        }
    }

    pub fn with_threads(threads: usize) -> Self {
        FloorSumOptions {
            threads: Some(threads),
            ..Self::default()
        }
    }
}

/// Blocks per work unit. Fixed so that the reduction tree, and hence every
/// floating-point rounding, is independent of the worker count.
const CHUNK_BLOCKS: usize = 1024;

enum Partial {
    Int(u128),
    Real(CompensatedSum),
}

fn chunk_sum(spec: &ArithFnSpec, table: &SieveTable, blocks: &[QuotientBlock]) -> Result<Partial> {
    let value_at = |q: u64| -> Result<Value> {
        if q <= table.limit() {
            Ok(table.get(q))
        } else {
            eval(spec, q)
        }
    };
    if spec.is_exact() {
        let mut acc: u128 = 0;
        for b in blocks {
            let v = value_at(b.q)?.as_int().expect("exact spec yields integers");
            acc = acc
                .checked_add(v as u128 * b.len() as u128)
                .ok_or(Error::Overflow("floor sum accumulator"))?;
        }
        Ok(Partial::Int(acc))
    } else {
        let mut acc = CompensatedSum::new();
        for b in blocks {
            acc.add(value_at(b.q)?.as_f64() * b.len() as f64);
        }
        Ok(Partial::Real(acc))
    }
}

fn run_in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(1) => Ok(job()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
        None => Ok(job()),
    }
}

pub fn floor_sum(spec: &ArithFnSpec, x: u64, opts: &FloorSumOptions) -> Result<FloorSumResult> {
    if x == 0 {
        return Err(Error::Domain("floor_sum needs x >= 1".into()));
    }
    let start = Instant::now();
    let root = x.isqrt();
    let table = build_sieve(spec, root.max(1), opts.budget)?;
    let blocks: Vec<QuotientBlock> = quotient_blocks(x).collect();

    let partials: Vec<Partial> = if opts.threads == Some(1) {
        blocks
            .chunks(CHUNK_BLOCKS)
            .map(|c| chunk_sum(spec, &table, c))
            .collect::<Result<_>>()?
    } else {
        run_in_pool(opts.threads, || {
            blocks
                .par_chunks(CHUNK_BLOCKS)
                .map(|c| chunk_sum(spec, &table, c))
                .collect::<Result<Vec<_>>>()
        })??
    };

    let value = if spec.is_exact() {
        let mut total: u128 = 0;
        for p in &partials {
            if let Partial::Int(v) = p {
                total = total
                    .checked_add(*v)
                    .ok_or(Error::Overflow("floor sum accumulator"))?;
            }
        }
        SumValue::Exact(total)
    } else {
        let mut total = CompensatedSum::new();
        for p in &partials {
            if let Partial::Real(acc) = p {
                total.merge(acc);
            }
        }
        SumValue::Real {
            value: total.value(),
            error_estimate: total.error_estimate(),
        }
    };
    Ok(FloorSumResult {
        x,
        spec: *spec,
        value,
        block_count: blocks.len() as u64,
        elapsed: start.elapsed(),
    })
}

/// Largest `x` accepted by [`floor_sum_naive`].
pub const NAIVE_LIMIT: u64 = 100_000_000;

/// Direct `n = 1..=x` loop with values from the point evaluators. The last
/// quotient's value is reused while `floor(x / n)` stays put, so only the
/// distinct quotients are factorized.
pub fn floor_sum_naive(spec: &ArithFnSpec, x: u64) -> Result<FloorSumResult> {
    if x == 0 {
        return Err(Error::Domain("floor_sum_naive needs x >= 1".into()));
    }
    if x > NAIVE_LIMIT {
        return Err(Error::GuardExceeded {
            what: "naive floor sum",
            value: x,
            limit: NAIVE_LIMIT,
        });
    }
    let start = Instant::now();
    let mut last: Option<(u64, Value)> = None;
    let mut distinct = 0u64;
    let mut exact: u128 = 0;
    let mut real = CompensatedSum::new();
    for n in 1..=x {
        let q = x / n;
        let v = match last {
            Some((lq, v)) if lq == q => v,
            _ => {
                distinct += 1;
                let v = eval(spec, q)?;
                last = Some((q, v));
                v
            }
        };
        match v {
            Value::Int(i) => exact += i as u128,
            Value::Real(r) => real.add(r),
        }
    }
    let value = if spec.is_exact() {
        SumValue::Exact(exact)
    } else {
        SumValue::Real {
            value: real.value(),
            error_estimate: real.error_estimate(),
        }
    };
    Ok(FloorSumResult {
        x,
        spec: *spec,
        value,
        block_count: distinct,
        elapsed: start.elapsed(),
    })
}

/// `S(x) / (x ln x)` for Euler's totient.
pub fn rho(x: u64, opts: &FloorSumOptions) -> Result<f64> {
    if x < 3 {
        return Err(Error::Domain(format!("rho needs x >= 3, got {x}")));
    }
    let s = floor_sum(&ArithFnSpec::phi(), x, opts)?.value.as_f64();
    let xf = x as f64;
    Ok(s / (xf * xf.ln()))
}

/// Number of divisors `d | n` with `gcd(d, floor(d x / n)) = 1`.
pub fn tau_x_point(n: u64, x: u64) -> Result<u64> {
    if n == 0 || n > x {
        return Err(Error::Domain(format!(
            "tau_x needs 1 <= n <= x, got n = {n}, x = {x}"
        )));
    }
    let coprime = |d: u64| {
        let q = (d as u128 * x as u128 / n as u128) as u64;
        d.gcd(&q) == 1
    };
    let mut count = 0;
    let mut d = 1u64;
    while d <= n / d {
        if n % d == 0 {
            count += coprime(d) as u64;
            let e = n / d;
            if e != d {
                count += coprime(e) as u64;
            }
        }
        d += 1;
    }
    Ok(count)
}

pub const TAU_X_LIMIT: u64 = 100_000;

/// Checks `sum_{n <= x} tau_x(n) = S(x)`.
pub fn verify_tau_x_identity(x: u64) -> Result<bool> {
    if x > TAU_X_LIMIT {
        return Err(Error::GuardExceeded {
            what: "tau_x identity",
            value: x,
            limit: TAU_X_LIMIT,
        });
    }
    if x == 0 {
        return Err(Error::Domain("tau_x identity needs x >= 1".into()));
    }
    let mut lhs: u128 = 0;
    for n in 1..=x {
        lhs += tau_x_point(n, x)? as u128;
    }
    let rhs = floor_sum(&ArithFnSpec::phi(), x, &FloorSumOptions::sequential())?.value;
    Ok(SumValue::Exact(lhs) == rhs)
}

/// `floor(x)` for real `x >= 1`; `S(x) = S(floor x)` because
/// `floor(x / n) = floor(floor(x) / n)` for integers `n >= 1`.
pub fn normalize_real_x(x: f64) -> Result<u64> {
    if !x.is_finite() || x < 1.0 {
        return Err(Error::Domain(format!(
            "x must be a finite real >= 1, got {x}"
        )));
    }
    if x >= 18_446_744_073_709_551_616.0 {
        return Err(Error::OutOfRange {
            what: "x",
            value: x.to_string(),
        });
    }
    Ok(x.floor() as u64)
}
