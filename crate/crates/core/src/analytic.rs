//! Sawtooth approximation, twisted exponential sums, explicit inequalities
//! and residual trend reports.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::{build_sieve, ArithFnSpec, MemoryBudget, SieveTable};
use crate::consts::{EULER_GAMMA, INV_ZETA2};
use crate::error::{Error, Result};
use crate::exponent::ExponentPair;
use crate::floorsum::{floor_sum, FloorSumOptions};
use crate::series::SeriesConstant;
use crate::sum::CompensatedSum;

/// `psi(z) = z - floor(z) - 1/2`.
pub fn psi(z: f64) -> f64 {
    z - z.floor() - 0.5
}

/// Weight `Phi(t) = pi t (1 - |t|) cot(pi t) + |t|` for `0 < |t| < 1`.
pub fn vaaler_phi(t: f64) -> Result<f64> {
    let a = t.abs();
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("Phi(t) needs 0 < |t| < 1, got {t}")));
    }
    // u cot u = 1 - u^2/3 - u^4/45 - ...
    let u_cot_u = |u: f64| {
        let u2 = u * u;
        1.0 - u2 / 3.0 - u2 * u2 / 45.0
    };
    Ok(if a < 1e-3 {
        (1.0 - a) * u_cot_u(PI * a) + a
    } else if a > 1.0 - 1e-3 {
        // cot(pi a) = cot(pi (a - 1)) and (1 - a) / (a - 1) = -1
        a * (1.0 - u_cot_u(PI * (a - 1.0)))
    } else {
        PI * a * (1.0 - a) / (PI * a).tan() + a
    })
}

/// The degree-`H` trigonometric approximation
/// `-sum_{h=1}^{H} Phi(h / (H + 1)) sin(2 pi h z) / (pi h)` to `psi(z)`.
pub fn vaaler_approx(z: f64, h_max: u32) -> f64 {
    let frac = z - z.floor();
    let denom = h_max as f64 + 1.0;
    let mut acc = CompensatedSum::new();
    for h in 1..=h_max {
        let hf = h as f64;
        let w = vaaler_phi(hf / denom).expect("h / (H + 1) lies in (0, 1)");
        acc.add(w * (2.0 * PI * hf * frac).sin() / (PI * hf));
    }
    -acc.value()
}

/// `(1 / (2H + 2)) sum_{|h| <= H} (1 - |h| / (H + 1)) e(hz)`, the Fejer
/// kernel bound on `|psi(z) - vaaler_approx(z, H)|`.
pub fn fejer_bound(z: f64, h_max: u32) -> f64 {
    let n = h_max as f64 + 1.0;
    let frac = z - z.round();
    let kernel = if frac == 0.0 {
        n
    } else {
        let ratio = (PI * n * frac).sin() / (PI * frac).sin();
        ratio * ratio / n
    };
    kernel / (2.0 * n)
}

/// Largest `|psi - psi_H| - fejer` and largest `|psi - psi_H|` over `grid`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaalerScan {
    pub h_max: u32,
    pub points: usize,
    pub max_error: f64,
    pub max_excess: f64,
}

pub fn vaaler_scan(h_max: u32, grid: impl IntoIterator<Item = f64>) -> VaalerScan {
    let mut scan = VaalerScan {
        h_max,
        points: 0,
        max_error: 0.0,
        max_excess: f64::NEG_INFINITY,
    };
    for z in grid {
        let err = (psi(z) - vaaler_approx(z, h_max)).abs();
        scan.points += 1;
        scan.max_error = scan.max_error.max(err);
        scan.max_excess = scan.max_excess.max(err - fejer_bound(z, h_max));
    }
    scan
}

/// `sum_{N < n <= N1} phi(n) e(h x / n)` with `e(z) = exp(2 pi i z)`.
pub fn twisted_exp_sum(n: u64, n1: u64, x: f64, h: u64) -> Result<Complex64> {
    check_twisted_range(n, n1, x, h)?;
    let table = build_sieve(&ArithFnSpec::phi(), n1, MemoryBudget::from_env())?;
    Ok(twisted_exp_sum_with(&table, n, n1, x, h))
}

fn check_twisted_range(n: u64, n1: u64, x: f64, h: u64) -> Result<()> {
    if n == 0 || h == 0 {
        return Err(Error::Domain("twisted sum needs N >= 1 and h >= 1".into()));
    }
    if !(n < n1 && n1 <= 2 * n) {
        return Err(Error::Domain(format!(
            "twisted sum needs N < N1 <= 2N, got N = {n}, N1 = {n1}"
        )));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "twisted sum needs finite x >= 0, got {x}"
        )));
    }
    Ok(())
}

fn twisted_exp_sum_with(phi: &SieveTable, n: u64, n1: u64, x: f64, h: u64) -> Complex64 {
    let hx = h as f64 * x;
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for m in n + 1..=n1 {
        let mf = m as f64;
        let phase = 2.0 * PI * (hx.rem_euclid(mf) / mf);
        let w = phi.get_f64(m);
        re.add(w * phase.cos());
        im.add(w * phase.sin());
    }
    Complex64::new(re.value(), im.value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedSumRow {
    pub n: u64,
    pub x: f64,
    pub magnitude: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedSumReport {
    pub rows: Vec<TwistedSumRow>,
    pub max_ratio: f64,
    /// `max_ratio <= 2 * ratio at the smallest N`.
    pub bounded: bool,
}

/// Compares `|sum_{N < n <= 2N} phi(n) e(x / n)|` with
/// `x^k N^{1 + l - 2k} ln N + N^3 / x + N` over `n_list`, where `x` is
/// `x_of_n(N)`.
pub fn lemma42_check(
    pair: &ExponentPair,
    n_list: &[u64],
    x_of_n: impl Fn(u64) -> f64,
) -> Result<TwistedSumReport> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("empty N list".into()));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    let top = *ns.last().expect("nonempty");
    if top > 1_000_000 {
        return Err(Error::GuardExceeded {
            what: "twisted sum N",
            value: top,
            limit: 1_000_000,
        });
    }
    let table = build_sieve(&ArithFnSpec::phi(), 2 * top, MemoryBudget::from_env())?;
    let (k, l) = pair.to_f64();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let x = x_of_n(n);
        check_twisted_range(n, 2 * n, x, 1)?;
        if (n as f64) > x {
            return Err(Error::Domain(format!("need N <= x, got N = {n}, x = {x}")));
        }
        let nf = n as f64;
        let magnitude = twisted_exp_sum_with(&table, n, 2 * n, x, 1).norm();
        let bound = x.powf(k) * nf.powf(1.0 + l - 2.0 * k) * nf.ln() + nf.powi(3) / x + nf;
        rows.push(TwistedSumRow {
            n,
            x,
            magnitude,
            bound,
            ratio: magnitude / bound,
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let bounded = max_ratio <= 2.0 * rows[0].ratio;
    Ok(TwistedSumReport {
        rows,
        max_ratio,
        bounded,
    })
}

/// `sqrt(k L3 / L2) (k - 1 + 30 / L3)` with `L2 = ln ln x`, `L3 = ln ln ln x`;
/// identically 0 for `k = 1`.
pub fn epsilon_k(x: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("epsilon_k needs k >= 1".into()));
    }
    if k == 1 {
        return Ok(0.0);
    }
    if !(x >= 16.0) {
        return Err(Error::Domain(format!("epsilon_k needs x >= 16, got {x}")));
    }
    let l2 = x.ln().ln();
    let l3 = l2.ln();
    let kf = k as f64;
    Ok((kf * l3 / l2).sqrt() * (kf - 1.0 + 30.0 / l3))
}

/// `|sum_{n <= x} 1/n - ln x - gamma| <= 6 / (11 x)`.
pub fn harmonic_check(x: f64) -> Result<bool> {
    Ok(harmonic_check_grid(&[x])?[0])
}

/// [`harmonic_check`] over many points sharing one harmonic table.
pub fn harmonic_check_grid(xs: &[f64]) -> Result<Vec<bool>> {
    if let Some(bad) = xs.iter().find(|x| !(**x >= 1.0 && x.is_finite())) {
        return Err(Error::Domain(format!(
            "harmonic check needs finite x >= 1, got {bad}"
        )));
    }
    let top = xs.iter().fold(1.0f64, |m, &x| m.max(x)).floor() as usize;
    let mut prefix = vec![0.0; top + 1];
    let mut acc = CompensatedSum::new();
    for (n, slot) in prefix.iter_mut().enumerate().skip(1) {
        acc.add(1.0 / n as f64);
        *slot = acc.value();
    }
    Ok(xs
        .iter()
        .map(|&x| {
            let h = prefix[x.floor() as usize];
            (h - x.ln() - EULER_GAMMA).abs() <= 6.0 / (11.0 * x)
        })
        .collect())
}

/// `sum_{n <= x} phi(n) / n^2 <= ln x / zeta(2) + 2 + 1 / zeta(2)`.
pub fn phi_over_n2_check(x: f64) -> Result<bool> {
    Ok(phi_over_n2_check_grid(&[x])?[0])
}

pub fn phi_over_n2_check_grid(xs: &[f64]) -> Result<Vec<bool>> {
    if let Some(bad) = xs.iter().find(|x| !(**x >= 1.0 && x.is_finite())) {
        return Err(Error::Domain(format!(
            "check needs finite x >= 1, got {bad}"
        )));
    }
    let top = xs.iter().fold(1.0f64, |m, &x| m.max(x)).floor() as u64;
    let phi = build_sieve(&ArithFnSpec::phi(), top, MemoryBudget::from_env())?;
    let mut prefix = vec![0.0; top as usize + 1];
    let mut acc = CompensatedSum::new();
    for n in 1..=top {
        let nf = n as f64;
        acc.add(phi.get_f64(n) / (nf * nf));
        prefix[n as usize] = acc.value();
    }
    Ok(xs
        .iter()
        .map(|&x| prefix[x.floor() as usize] <= x.ln() * INV_ZETA2 + 2.0 + INV_ZETA2)
        .collect())
}

/// `(1 + 1/zeta(2)) / 2 x ln x + 4x + sqrt(x) ln x / 4 + sqrt(x)`.
pub fn explicit_upper_bound(x: f64) -> f64 {
    let (ln, sq) = (x.ln(), x.sqrt());
    0.5 * (1.0 + INV_ZETA2) * x * ln + 4.0 * x + sq * ln / 4.0 + sq
}

pub fn explicit_upper_check(x: u64, opts: &FloorSumOptions) -> Result<bool> {
    if x < 3 {
        return Err(Error::Domain(format!(
            "explicit upper bound needs x >= 3, got {x}"
        )));
    }
    let s = floor_sum(&ArithFnSpec::phi(), x, opts)?.value.as_f64();
    Ok(s <= explicit_upper_bound(x as f64))
}

/// Exponent of `ln x` in the residual normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogExponent {
    Fixed(f64),
    /// `(2 + epsilon_2(x)) / 3`, evaluated at each grid point.
    TwoPlusEpsilon2Over3,
}

impl LogExponent {
    fn at(&self, x: f64) -> Result<f64> {
        match *self {
            LogExponent::Fixed(b) => Ok(b),
            LogExponent::TwoPlusEpsilon2Over3 => Ok((2.0 + epsilon_k(x, 2)?) / 3.0),
        }
    }
}

/// Largest share of the normalising scale `x^a (ln x)^b` that the
/// uncertainty `x * half_width(kappa)` may occupy.
pub const KAPPA_SHARE: f64 = 0.05;

/// The kappa tail bound must also stay below this multiple of the smallest
/// scale on the grid.
pub const TAIL_TO_SCALE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub spec: ArithFnSpec,
    pub x_grid: Vec<u64>,
    /// `S_f(x) - x kappa_f` with `kappa_f` at its midpoint.
    pub residuals: Vec<f64>,
    /// `residual / (x^a (ln x)^b)`.
    pub normalized: Vec<f64>,
    pub max_normalized: f64,
    pub bottom_max: f64,
    pub top_max: f64,
    /// `top_max <= 2 bottom_max`, halves taken as the first and last
    /// `len / 2` grid points.
    pub trend_bounded: bool,
}

pub fn residual_harness(
    constant: &SeriesConstant,
    x_grid: &[u64],
    a: f64,
    b: LogExponent,
    opts: &FloorSumOptions,
) -> Result<ResidualReport> {
    if x_grid.len() < 2 {
        return Err(Error::InvalidParameter(
            "residual grid needs at least two points".into(),
        ));
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) || x_grid[0] < 3 {
        return Err(Error::InvalidParameter(
            "residual grid must be strictly increasing and start at x >= 3".into(),
        ));
    }
    let scales = x_grid
        .iter()
        .map(|&x| {
            let xf = x as f64;
            Ok(xf.powf(a) * xf.ln().powf(b.at(xf)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    let min_scale = scales.iter().copied().fold(f64::INFINITY, f64::min);
    if constant.tail_bound > TAIL_TO_SCALE * min_scale {
        return Err(Error::SeriesPrecisionInsufficient(format!(
            "kappa tail bound {:e} exceeds {TAIL_TO_SCALE:e} times the smallest scale {min_scale:e}",
            constant.tail_bound
        )));
    }
    let mut residuals = Vec::with_capacity(x_grid.len());
    let mut normalized = Vec::with_capacity(x_grid.len());
    for (&x, &scale) in x_grid.iter().zip(&scales) {
        let xf = x as f64;
        if xf * constant.half_width() > KAPPA_SHARE * scale {
            return Err(Error::SeriesPrecisionInsufficient(format!(
                "x * kappa half-width = {:e} exceeds {KAPPA_SHARE} of the scale {:e} at x = {x}",
                xf * constant.half_width(),
                scale
            )));
        }
        let s = floor_sum(&constant.spec, x, opts)?.value.as_f64();
        let r = s - xf * constant.midpoint();
        residuals.push(r);
        normalized.push(r / scale);
    }
    let half = x_grid.len() / 2;
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let bottom_max = max_abs(&normalized[..half]);
    let top_max = max_abs(&normalized[x_grid.len() - half..]);
    Ok(ResidualReport {
        spec: constant.spec,
        x_grid: x_grid.to_vec(),
        max_normalized: max_abs(&normalized),
        residuals,
        normalized,
        bottom_max,
        top_max,
        trend_bounded: top_max <= 2.0 * bottom_max,
    })
}
