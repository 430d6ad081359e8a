use super::{tau_k_prime_power, ArithFnSpec, Part, Value};
use crate::error::{Error, Result};

/// Upper bound on sieve memory. The CLI reads it from `FLOORSUM_MEM_MB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    bytes: u64,
}

impl MemoryBudget {
    pub const DEFAULT_MB: u64 = 4096;

    pub fn megabytes(mb: u64) -> Self {
        MemoryBudget {
            bytes: mb.saturating_mul(1 << 20),
        }
    }

    pub fn unlimited() -> Self {
        MemoryBudget { bytes: u64::MAX }
    }

    /// `FLOORSUM_MEM_MB` if set and numeric, otherwise [`Self::DEFAULT_MB`].
    pub fn from_env() -> Self {
        let mb = std::env::var("FLOORSUM_MEM_MB")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(Self::DEFAULT_MB);
        Self::megabytes(mb)
    }

    pub fn bytes(&self) -> u64 {
        self.bytes
    }

    pub(crate) fn check(&self, entries: u64, bytes_per_entry: u64) -> Result<()> {
        let requested = entries.saturating_mul(bytes_per_entry);
        if requested > self.bytes {
            return Err(Error::MemoryBudgetExceeded {
                entries,
                requested,
                budget: self.bytes,
            });
        }
        Ok(())
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::megabytes(Self::DEFAULT_MB)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SieveValues {
    Int(Vec<u64>),
    Real(Vec<f64>),
}

/// Values of one function on `0..=limit`; index 0 is unused and holds 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveTable {
    spec: ArithFnSpec,
    limit: u64,
    values: SieveValues,
}

impl SieveTable {
    pub fn spec(&self) -> &ArithFnSpec {
        &self.spec
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn values(&self) -> &SieveValues {
        &self.values
    }

    pub fn int_values(&self) -> Option<&[u64]> {
        match &self.values {
            SieveValues::Int(v) => Some(v),
            SieveValues::Real(_) => None,
        }
    }

    pub fn real_values(&self) -> Option<&[f64]> {
        match &self.values {
            SieveValues::Real(v) => Some(v),
            SieveValues::Int(_) => None,
        }
    }

    /// Panics if `n` is outside `1..=limit`.
    #[inline]
    pub fn get(&self, n: u64) -> Value {
        assert!(
            n >= 1 && n <= self.limit,
            "index {n} outside 1..={}",
            self.limit
        );
        match &self.values {
            SieveValues::Int(v) => Value::Int(v[n as usize]),
            SieveValues::Real(v) => Value::Real(v[n as usize]),
        }
    }

    #[inline]
    pub fn get_f64(&self, n: u64) -> f64 {
        self.get(n).as_f64()
    }
}

/// Largest table the sieves index with `u32` prime factors.
const SIEVE_MAX: u64 = u32::MAX as u64;

pub fn build_sieve(spec: &ArithFnSpec, limit: u64, budget: MemoryBudget) -> Result<SieveTable> {
    if limit == 0 {
        return Err(Error::InvalidParameter("sieve limit must be >= 1".into()));
    }
    if limit > SIEVE_MAX {
        return Err(Error::OutOfRange {
            what: "sieve limit",
            value: limit.to_string(),
        });
    }
    let part = spec.integer_part();
    let per_entry = match (part, spec.is_exact()) {
        (Part::Phi | Part::DigitSum(_), true) => 8,
        (Part::Phi | Part::DigitSum(_), false) => 16,
        (_, true) => 12,
        (_, false) => 20,
    };
    budget.check(limit + 1, per_entry)?;

    let ints = match part {
        Part::Phi => totient_sieve(limit),
        Part::DigitSum(q) => digit_sum_sieve(limit, q),
        Part::TauK(k) => {
            let spf = smallest_prime_factors(limit);
            multiplicative_sieve(&spf, |_, a| tau_k_prime_power(a, k))?
        }
        Part::MkFull(k) => {
            let spf = smallest_prime_factors(limit);
            multiplicative_sieve(&spf, |p, a| Ok(if a >= k { p.pow(a) } else { 1 }))?
        }
        Part::Omega => {
            let spf = smallest_prime_factors(limit);
            let mut omega = vec![0u64; spf.len()];
            for n in 2..spf.len() {
                omega[n] = omega[n / spf[n] as usize] + 1;
            }
            omega
        }
    };
    let values = if spec.is_exact() {
        SieveValues::Int(ints)
    } else {
        let mut real = Vec::with_capacity(ints.len());
        real.push(0.0);
        real.extend(
            ints.iter()
                .enumerate()
                .skip(1)
                .map(|(n, &part)| spec.real_from_parts(n as u64, part)),
        );
        SieveValues::Real(real)
    };
    Ok(SieveTable {
        spec: *spec,
        limit,
        values,
    })
}

/// Linear sieve for Euler's totient on `0..=n`.
pub(crate) fn totient_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut phi = vec![0u64; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    if n >= 1 {
        phi[1] = 1;
    }
    for i in 2..=n {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u64;
            primes.push(i);
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            if i % p == 0 {
                phi[ip] = phi[i] * p as u64;
                break;
            }
            phi[ip] = phi[i] * (p as u64 - 1);
        }
    }
    phi
}

/// Linear sieve of smallest prime factors on `0..=n` (`spf[0] = spf[1] = 0`).
pub(crate) fn smallest_prime_factors(n: u64) -> Vec<u32> {
    let n = n as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let ip = i * p as usize;
            if p > si || ip > n {
                break;
            }
            spf[ip] = p;
        }
    }
    spf
}

/// Builds a multiplicative function from its values at prime powers.
fn multiplicative_sieve<F>(spf: &[u32], at_prime_power: F) -> Result<Vec<u64>>
where
    F: Fn(u64, u32) -> Result<u64>,
{
    let mut out = vec![0u64; spf.len()];
    if out.len() > 1 {
        out[1] = 1;
    }
    for n in 2..spf.len() {
        let p = spf[n] as usize;
        let (mut rest, mut a) = (n, 0u32);
        while rest % p == 0 {
            rest /= p;
            a += 1;
        }
        out[n] = out[rest]
            .checked_mul(at_prime_power(p as u64, a)?)
            .ok_or(Error::Overflow("multiplicative sieve"))?;
    }
    Ok(out)
}

fn digit_sum_sieve(n: u64, q: u64) -> Vec<u64> {
    let mut out = vec![0u64; n as usize + 1];
    for i in 1..out.len() {
        out[i] = out[i / q as usize] + (i as u64 % q);
    }
    out
}
