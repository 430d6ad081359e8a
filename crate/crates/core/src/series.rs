//! Main-term constants `kappa_f = sum_{n >= 1} f(n) / (n (n + 1))`.
//!
//! The series is truncated at `N` and the remainder is bounded using a
//! declared growth class for `f`:
//!
//! * `PowerBounded { c, beta }`: `|f(n)| <= c n^beta`, `beta < 1`, giving
//!   `tail <= c N^{beta - 1} / (1 - beta)`.
//! * `TauKBounded { a, k }`: `sum_{n <= t} |f(n)| <= a t (1 + ln t)^{k-1}`
//!   for all `t >= 1` (true whenever `|f| <= a tau_k`). Abel summation
//!   against `1 / (n (n + 1))` gives
//!   `tail <= 2a int_N^inf (1 + ln t)^{k-1} t^{-2} dt
//!         = (2a (k-1)! / N) sum_{j < k} (1 + ln N)^j / j!`.
//! * `LambdaOmegaBounded { lambda }`: `|f(n)| <= lambda^Omega(n)`. For
//!   `1 < s < 2`, `tail <= N^{s-2} (F(s) - sum_{n <= N} lambda^Omega(n) n^{-s})`
//!   with `F(s) = prod_p (1 - lambda p^{-s})^{-1}` bounded above by the
//!   product over `p <= N` times `exp(lambda N^{1-s} / ((s-1)(1 - lambda N^{-s})))`.
//!
//! Every class is checked against the tabulated values of `f` up to `N`
//! before its tail bound is used.

use std::fmt;
use std::str::FromStr;

use crate::arith::sieve::smallest_prime_factors;
use crate::arith::{build_sieve, ArithFnSpec, FnKind, MemoryBudget};
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthClass {
    TauKBounded { a: f64, k: u32 },
    PowerBounded { c: f64, beta: f64 },
    LambdaOmegaBounded { lambda: f64 },
}

impl GrowthClass {
    /// A valid class for each function whose series converges.
    pub fn natural_for(spec: &ArithFnSpec) -> Result<Self> {
        Ok(match spec.kind() {
            FnKind::PhiOverN => GrowthClass::PowerBounded { c: 1.0, beta: 0.0 },
            FnKind::PhiPow { beta } => GrowthClass::PowerBounded { c: 1.0, beta },
            FnKind::TauK { k } => GrowthClass::TauKBounded { a: 1.0, k },
            FnKind::LambdaPowOmega { lambda } => GrowthClass::LambdaOmegaBounded { lambda },
            // sigma_q(n) <= (q - 1)(log_q n + 1) <= a (1 + ln n)
            FnKind::DigitSum { q } => GrowthClass::TauKBounded {
                a: (q - 1) as f64 * (1.0 / (q as f64).ln()).max(1.0),
                k: 2,
            },
            // M_k(n) <= n
            FnKind::MkFullNormalized { k } => GrowthClass::PowerBounded {
                c: 1.0,
                beta: 1.0 - 1.0 / k as f64,
            },
            FnKind::Phi | FnKind::MkFull { .. } => {
                return Err(Error::UnsupportedGrowth(format!(
                    "no convergent growth class is known for {spec}"
                )))
            }
        })
    }

    fn validate(&self) -> Result<()> {
        let unsupported = |m: String| Err(Error::UnsupportedGrowth(m));
        match *self {
            GrowthClass::PowerBounded { c, beta } => {
                if !(c >= 0.0 && c.is_finite()) || !(beta < 1.0) || !beta.is_finite() {
                    return unsupported(format!(
                        "power bound needs c >= 0 and beta < 1, got c = {c}, beta = {beta}"
                    ));
                }
            }
            GrowthClass::TauKBounded { a, k } => {
                if !(a >= 0.0 && a.is_finite()) || k == 0 {
                    return unsupported(format!(
                        "tau_k bound needs a >= 0 and k >= 1, got a = {a}, k = {k}"
                    ));
                }
            }
            GrowthClass::LambdaOmegaBounded { lambda } => {
                if !(1.0..2.0).contains(&lambda) {
                    return unsupported(format!(
                        "lambda^Omega bound needs 1 <= lambda < 2, got {lambda}"
                    ));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthClass::TauKBounded { a, k } => write!(f, "tau:{a},{k}"),
            GrowthClass::PowerBounded { c, beta } => write!(f, "power:{c},{beta}"),
            GrowthClass::LambdaOmegaBounded { lambda } => write!(f, "lambda-omega:{lambda}"),
        }
    }
}

/// `tau:A,K`, `power:C,BETA` or `lambda-omega:L`.
impl FromStr for GrowthClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad growth class `{s}`"));
        let (name, args) = s.trim().split_once(':').ok_or_else(bad)?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let g = match (name.trim(), args.as_slice()) {
            ("tau", [a, k]) => GrowthClass::TauKBounded {
                a: a.parse().map_err(|_| bad())?,
                k: k.parse().map_err(|_| bad())?,
            },
            ("power", [c, beta]) => GrowthClass::PowerBounded {
                c: c.parse().map_err(|_| bad())?,
                beta: beta.parse().map_err(|_| bad())?,
            },
            ("lambda-omega", [l]) => GrowthClass::LambdaOmegaBounded {
                lambda: l.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        g.validate()?;
        Ok(g)
    }
}

/// Closed interval of reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// `x * [lo, hi]` for `x >= 0`, rounded outward.
    pub fn scale(&self, x: f64) -> Interval {
        Interval {
            lo: (x * self.lo).next_down(),
            hi: (x * self.hi).next_up(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesConstant {
    pub spec: ArithFnSpec,
    pub growth: GrowthClass,
    pub truncation: u64,
    /// `sum_{n <= N} f(n) / (n (n + 1))`, compensated, ascending `n`.
    pub partial_sum: f64,
    /// Bound on the omitted terms `n > N`.
    pub tail_bound: f64,
    /// Bound on floating-point error in `partial_sum`.
    pub rounding_bound: f64,
}

impl SeriesConstant {
    /// `[partial - tail, partial + tail]`, widened by the rounding bound.
    pub fn value_interval(&self) -> Interval {
        let r = self.tail_bound + self.rounding_bound;
        Interval {
            lo: (self.partial_sum - r).next_down(),
            hi: (self.partial_sum + r).next_up(),
        }
    }

    pub fn midpoint(&self) -> f64 {
        self.partial_sum
    }

    pub fn half_width(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

const SLACK: f64 = 1e-12;

pub fn kappa(
    spec: &ArithFnSpec,
    truncation: u64,
    growth: GrowthClass,
    budget: MemoryBudget,
) -> Result<SeriesConstant> {
    if truncation < 10 {
        return Err(Error::InvalidParameter(format!(
            "series truncation must be >= 10, got {truncation}"
        )));
    }
    growth.validate()?;
    let table = build_sieve(spec, truncation, budget)?;
    let mut partial = CompensatedSum::new();
    for n in 1..=truncation {
        let nf = n as f64;
        partial.add(table.get_f64(n) / (nf * (nf + 1.0)));
    }
    let tail_bound = match growth {
        GrowthClass::PowerBounded { c, beta } => {
            for n in 1..=truncation {
                let v = table.get_f64(n).abs();
                if v > c * (n as f64).powf(beta) * (1.0 + SLACK) {
                    return Err(Error::GrowthViolated {
                        n,
                        detail: format!("|f(n)| = {v} exceeds {c} n^{beta}"),
                    });
                }
            }
            c * (truncation as f64).powf(beta - 1.0) / (1.0 - beta)
        }
        GrowthClass::TauKBounded { a, k } => {
            let mut prefix = CompensatedSum::new();
            for n in 1..=truncation {
                prefix.add(table.get_f64(n).abs());
                let t = n as f64;
                let bound = a * t * (1.0 + t.ln()).powi(k as i32 - 1);
                if prefix.value() > bound * (1.0 + SLACK) {
                    return Err(Error::GrowthViolated {
                        n,
                        detail: format!(
                            "partial sum {} exceeds {a} t (1 + ln t)^{}",
                            prefix.value(),
                            k - 1
                        ),
                    });
                }
            }
            tau_k_tail(a, k, truncation)?
        }
        GrowthClass::LambdaOmegaBounded { lambda } => {
            lambda_omega_tail(lambda, truncation, budget, |n| table.get_f64(n))?
        }
    };
    let rounding_bound = partial.error_estimate() + 8.0 * f64::EPSILON * partial.abs_sum();
    Ok(SeriesConstant {
        spec: *spec,
        growth,
        truncation,
        partial_sum: partial.value(),
        tail_bound: tail_bound * (1.0 + SLACK),
        rounding_bound,
    })
}

/// `(2a (k-1)! / N) sum_{j=0}^{k-1} (1 + ln N)^j / j!`.
fn tau_k_tail(a: f64, k: u32, truncation: u64) -> Result<f64> {
    let m = k - 1;
    let l = (truncation as f64).ln();
    // (1 + ln t)^m / t^2 must decrease on [N, inf)
    if l <= m as f64 / 2.0 - 1.0 {
        return Err(Error::InvalidParameter(format!(
            "truncation {truncation} too small for tau_{k} tail bound"
        )));
    }
    let mut term = 1.0; // (1 + L)^j / j!
    let mut sum = 0.0;
    for j in 0..=m {
        if j > 0 {
            term *= (1.0 + l) / j as f64;
        }
        sum += term;
    }
    let factorial: f64 = (1..=m).map(|i| i as f64).product();
    Ok(2.0 * a * factorial * sum / truncation as f64)
}

/// Rankin-type tail bound for `|f| <= lambda^Omega`, minimised over a few
/// values of `s`.
fn lambda_omega_tail(
    lambda: f64,
    truncation: u64,
    budget: MemoryBudget,
    f: impl Fn(u64) -> f64,
) -> Result<f64> {
    budget.check(truncation + 1, 5)?;
    let spf = smallest_prime_factors(truncation);
    let mut omega = vec![0u8; spf.len()];
    for n in 2..spf.len() {
        omega[n] = omega[n / spf[n] as usize] + 1;
    }
    for n in 1..=truncation {
        let g = lambda.powi(omega[n as usize] as i32);
        let v = f(n).abs();
        if v > g * (1.0 + SLACK) {
            return Err(Error::GrowthViolated {
                n,
                detail: format!("|f(n)| = {v} exceeds lambda^Omega(n) = {g}"),
            });
        }
    }

    const EXPONENTS: [f64; 3] = [1.75, 1.9, 1.95];
    let nf = truncation as f64;
    let mut log_euler = [CompensatedSum::new(); 3];
    let mut dirichlet = [CompensatedSum::new(); 3];
    for n in 1..=truncation {
        let ln_n = (n as f64).ln();
        let g = lambda.powi(omega[n as usize] as i32);
        let is_prime = n >= 2 && spf[n as usize] as u64 == n;
        for (i, &s) in EXPONENTS.iter().enumerate() {
            let ns = (-s * ln_n).exp();
            dirichlet[i].add(g * ns);
            if is_prime {
                log_euler[i].add(-(-lambda * ns).ln_1p());
            }
        }
    }
    let mut best = f64::INFINITY;
    for (i, &s) in EXPONENTS.iter().enumerate() {
        let y = lambda * nf.powf(-s);
        if !(y < 1.0 && lambda * 2f64.powf(-s) < 1.0) {
            continue;
        }
        // sum over primes p > N of -ln(1 - lambda p^-s)
        let prime_tail = lambda / (1.0 - y) * nf.powf(1.0 - s) / (s - 1.0);
        let log_f = log_euler[i].value() * (1.0 + SLACK) + SLACK + prime_tail;
        let f_upper = log_f.exp() * (1.0 + SLACK);
        let p_lower = dirichlet[i].value() * (1.0 - SLACK);
        let bound = nf.powf(s - 2.0) * (f_upper - p_lower).max(0.0);
        best = best.min(bound);
    }
    if !best.is_finite() {
        return Err(Error::SeriesPrecisionInsufficient(format!(
            "no admissible Rankin exponent for lambda = {lambda}"
        )));
    }
    Ok(best)
}

/// `x * value_interval`, rounded outward.
pub fn main_term(spec: &ArithFnSpec, x: u64, constant: &SeriesConstant) -> Result<Interval> {
    if constant.spec != *spec {
        return Err(Error::InvalidParameter(format!(
            "constant was computed for {}, not {spec}",
            constant.spec
        )));
    }
    Ok(constant.value_interval().scale(x as f64))
}

/// Brute-force check of `sum_{n <= t} tau_k(n) <= t (1 + ln t)^{k-1}` for
/// every integer `t <= limit`.
pub fn verify_tau_k_summatory_bound(limit: u64, k: u32) -> Result<bool> {
    let table = build_sieve(&ArithFnSpec::tau_k(k)?, limit, MemoryBudget::from_env())?;
    let tau = table.int_values().expect("tau_k is integer valued");
    let mut prefix: u128 = 0;
    for t in 1..=limit {
        prefix += tau[t as usize] as u128;
        let tf = t as f64;
        if prefix as f64 > tf * (1.0 + tf.ln()).powi(k as i32 - 1) {
            return Ok(false);
        }
    }
    Ok(true)
}
