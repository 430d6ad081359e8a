//! Deterministic integer factorization for `1 <= m <= 2^63`.
//!
//! Small primes are removed by trial division; a cofactor that survives
//! is either certified prime by a deterministic Miller-Rabin test or split
//! with Brent's variant of Pollard rho using a fixed parameter schedule.
//! The output is the unique factorization, so the splitting order never
//! shows up in results.

use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest accepted input.
pub const FACTORIZE_MAX: u64 = 1 << 63;

/// Trial division bound. Cofactors below `TRIAL_BOUND^2` are prime.
const TRIAL_BOUND: u64 = 1 << 10;

/// Prime factorization as `(prime, exponent)` pairs with strictly
/// increasing primes. The empty list is the factorization of 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, &(p, e)| acc * (p as u128).pow(e))
    }

    /// Omega(m): number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    fn from_primes(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        let mut factors: Vec<(u64, u32)> = Vec::new();
        for p in primes {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
        Factorization { factors }
    }
}

fn small_primes() -> &'static [u64] {
    static PRIMES: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_BOUND as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

pub fn factorize(m: u64) -> Result<Factorization> {
    if m == 0 || m > FACTORIZE_MAX {
        return Err(Error::OutOfRange {
            what: "factorize argument",
            value: m.to_string(),
        });
    }
    let mut primes = Vec::new();
    let mut rest = m;
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        while rest % p == 0 {
            rest /= p;
            primes.push(p);
        }
    }
    if rest > 1 {
        if rest < TRIAL_BOUND * TRIAL_BOUND {
            primes.push(rest);
        } else {
            split_into(rest, &mut primes);
        }
    }
    Ok(Factorization::from_primes(primes))
}

/// Pushes the prime factors of `n` (no factor below `TRIAL_BOUND`).
fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    if let Some(r) = exact_square_root(n) {
        split_into(r, out);
        split_into(r, out);
        return;
    }
    let d = pollard_brent(n);
    split_into(d, out);
    split_into(n / d, out);
}

fn exact_square_root(n: u64) -> Option<u64> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `n < 2^64` (Jim Sinclair's base set).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &small_primes()[..12] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Returns a nontrivial divisor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |y: u64| (mul_mod(y, y, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = y;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // batch overshot; replay one step at a time
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}
