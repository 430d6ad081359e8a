//! Arithmetic functions: point evaluation from exact factorizations and
//! sieved tables over `1..=N`.

mod factor;
pub(crate) mod sieve;

use std::fmt;
use std::str::FromStr;

pub use factor::{factorize, is_prime, Factorization, FACTORIZE_MAX};
pub use sieve::{build_sieve, MemoryBudget, SieveTable, SieveValues};

use crate::error::{Error, Result};

/// The arithmetic functions the engine knows how to sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FnKind {
    /// Euler's totient.
    Phi,
    /// `phi(n) / n`.
    PhiOverN,
    /// `phi(n)^beta`, `0 < beta < 1`.
    PhiPow { beta: f64 },
    /// Generalised divisor function `tau_k`, `k >= 1`.
    TauK { k: u32 },
    /// `lambda^Omega(n)`, `1 <= lambda < 2`.
    LambdaPowOmega { lambda: f64 },
    /// Sum of base-`q` digits, `q >= 2`.
    DigitSum { q: u64 },
    /// Largest `k`-full divisor `M_k(n)`, `k >= 2`.
    MkFull { k: u32 },
    /// `n^{-1/k} M_k(n)`, `k >= 2`.
    MkFullNormalized { k: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueClass {
    ExactInteger,
    Real,
}

/// A validated [`FnKind`]. Construction enforces the parameter ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArithFnSpec {
    kind: FnKind,
}

impl ArithFnSpec {
    pub fn new(kind: FnKind) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match kind {
            FnKind::PhiPow { beta } if !(beta > 0.0 && beta < 1.0) => {
                return bad(format!("phi-pow exponent must lie in (0, 1), got {beta}"))
            }
            FnKind::TauK { k } if k < 1 => return bad("tau_k needs k >= 1".into()),
            FnKind::LambdaPowOmega { lambda } if !(1.0..2.0).contains(&lambda) => {
                return bad(format!("lambda must lie in [1, 2), got {lambda}"))
            }
            FnKind::DigitSum { q } if q < 2 => return Err(Error::InvalidBase(q)),
            FnKind::MkFull { k } | FnKind::MkFullNormalized { k } if k < 2 => {
                return bad(format!("k-full divisor needs k >= 2, got {k}"))
            }
            _ => {}
        }
        Ok(ArithFnSpec { kind })
    }

    pub fn phi() -> Self {
        ArithFnSpec { kind: FnKind::Phi }
    }

    pub fn phi_over_n() -> Self {
        ArithFnSpec {
            kind: FnKind::PhiOverN,
        }
    }

    pub fn phi_pow(beta: f64) -> Result<Self> {
        Self::new(FnKind::PhiPow { beta })
    }

    pub fn tau_k(k: u32) -> Result<Self> {
        Self::new(FnKind::TauK { k })
    }

    pub fn lambda_pow_omega(lambda: f64) -> Result<Self> {
        Self::new(FnKind::LambdaPowOmega { lambda })
    }

    pub fn digit_sum(q: u64) -> Result<Self> {
        Self::new(FnKind::DigitSum { q })
    }

    pub fn mk_full(k: u32) -> Result<Self> {
        Self::new(FnKind::MkFull { k })
    }

    pub fn mk_full_normalized(k: u32) -> Result<Self> {
        Self::new(FnKind::MkFullNormalized { k })
    }

    pub fn kind(&self) -> FnKind {
        self.kind
    }

    pub fn value_class(&self) -> ValueClass {
        match self.kind {
            FnKind::Phi | FnKind::TauK { .. } | FnKind::DigitSum { .. } | FnKind::MkFull { .. } => {
                ValueClass::ExactInteger
            }
            _ => ValueClass::Real,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.value_class() == ValueClass::ExactInteger
    }

    /// The exact integer quantity the value is derived from.
    pub(crate) fn integer_part(&self) -> Part {
        match self.kind {
            FnKind::Phi | FnKind::PhiOverN | FnKind::PhiPow { .. } => Part::Phi,
            FnKind::TauK { k } => Part::TauK(k),
            FnKind::LambdaPowOmega { .. } => Part::Omega,
            FnKind::DigitSum { q } => Part::DigitSum(q),
            FnKind::MkFull { k } | FnKind::MkFullNormalized { k } => Part::MkFull(k),
        }
    }

    /// Maps the integer part (phi, Omega or M_k) of `m` to the real value.
    /// Both the point evaluator and the sieve go through here so their
    /// outputs agree bit for bit.
    #[inline]
    pub(crate) fn real_from_parts(&self, m: u64, part: u64) -> f64 {
        match self.kind {
            FnKind::PhiOverN => part as f64 / m as f64,
            FnKind::PhiPow { beta } => (part as f64).powf(beta),
            FnKind::LambdaPowOmega { lambda } => lambda.powi(part as i32),
            FnKind::MkFullNormalized { k } => part as f64 * (m as f64).powf(-1.0 / k as f64),
            _ => part as f64,
        }
    }
}

impl fmt::Display for ArithFnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FnKind::Phi => write!(f, "phi"),
            FnKind::PhiOverN => write!(f, "phi-over-n"),
            FnKind::PhiPow { beta } => write!(f, "phi-pow:{beta}"),
            FnKind::TauK { k } => write!(f, "tau:{k}"),
            FnKind::LambdaPowOmega { lambda } => write!(f, "lambda-omega:{lambda}"),
            FnKind::DigitSum { q } => write!(f, "digit-sum:{q}"),
            FnKind::MkFull { k } => write!(f, "mk:{k}"),
            FnKind::MkFullNormalized { k } => write!(f, "mk-norm:{k}"),
        }
    }
}

impl FromStr for ArithFnSpec {
    type Err = Error;

    /// Grammar: `phi`, `phi-over-n`, `phi-pow:B`, `tau:K`, `lambda-omega:L`,
    /// `digit-sum:Q`, `mk:K`, `mk-norm:K`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        fn num<T: FromStr>(name: &str, arg: Option<&str>) -> Result<T> {
            let arg = arg.ok_or_else(|| Error::Parse(format!("`{name}` needs a parameter")))?;
            arg.parse()
                .map_err(|_| Error::Parse(format!("bad parameter `{arg}` for `{name}`")))
        }
        let no_arg = |spec: ArithFnSpec| match arg {
            None => Ok(spec),
            Some(a) => Err(Error::Parse(format!(
                "`{name}` takes no parameter, got `{a}`"
            ))),
        };
        match name {
            "phi" => no_arg(Self::phi()),
            "phi-over-n" => no_arg(Self::phi_over_n()),
            "phi-pow" => Self::phi_pow(num(name, arg)?),
            "tau" => Self::tau_k(num(name, arg)?),
            "lambda-omega" => Self::lambda_pow_omega(num(name, arg)?),
            "digit-sum" => Self::digit_sum(num(name, arg)?),
            "mk" => Self::mk_full(num(name, arg)?),
            "mk-norm" => Self::mk_full_normalized(num(name, arg)?),
            _ => Err(Error::Parse(format!("unknown function `{s}`"))),
        }
    }
}

/// Integer quantity underlying each function: the function itself for
/// exact kinds, the ingredient of the real-valued formula otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Part {
    Phi,
    TauK(u32),
    Omega,
    DigitSum(u64),
    MkFull(u32),
}

/// A function value: exact for integer-valued functions, binary64 otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(u64),
    Real(f64),
}

impl Value {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Value::Int(v) => v as f64,
            Value::Real(v) => v,
        }
    }

    pub fn as_int(&self) -> Option<u64> {
        match *self {
            Value::Int(v) => Some(v),
            Value::Real(_) => None,
        }
    }
}

pub fn phi_from(f: &Factorization) -> u64 {
    f.factors()
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

pub fn phi_point(m: u64) -> Result<u64> {
    Ok(phi_from(&factorize(m)?))
}

/// `binomial(a + k - 1, k - 1)`, the value of `tau_k` at a prime power `p^a`.
pub(crate) fn tau_k_prime_power(a: u32, k: u32) -> Result<u64> {
    let mut acc: u128 = 1;
    for i in 1..=a as u128 {
        acc = acc
            .checked_mul(k as u128 - 1 + i)
            .ok_or(Error::Overflow("tau_k"))?
            / i;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow("tau_k"))
}

pub fn tau_k_from(f: &Factorization, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidParameter("tau_k needs k >= 1".into()));
    }
    f.factors().iter().try_fold(1u64, |acc, &(_, e)| {
        acc.checked_mul(tau_k_prime_power(e, k)?)
            .ok_or(Error::Overflow("tau_k"))
    })
}

pub fn tau_k_point(m: u64, k: u32) -> Result<u64> {
    tau_k_from(&factorize(m)?, k)
}

pub fn big_omega_point(m: u64) -> Result<u32> {
    Ok(factorize(m)?.big_omega())
}

pub fn digit_sum_point(m: u64, q: u64) -> Result<u64> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    let (mut m, mut s) = (m, 0);
    while m > 0 {
        s += m % q;
        m /= q;
    }
    Ok(s)
}

pub fn m_k_full_from(f: &Factorization, k: u32) -> u64 {
    f.factors()
        .iter()
        .filter(|&&(_, e)| e >= k)
        .map(|&(p, e)| p.pow(e))
        .product()
}

pub fn m_k_full_point(m: u64, k: u32) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k-full divisor needs k >= 2, got {k}"
        )));
    }
    Ok(m_k_full_from(&factorize(m)?, k))
}

/// Evaluates `spec` at `m >= 1`.
pub fn eval(spec: &ArithFnSpec, m: u64) -> Result<Value> {
    let part = match spec.integer_part() {
        Part::DigitSum(q) if m >= 1 => digit_sum_point(m, q)?,
        part => {
            let f = factorize(m)?;
            match part {
                Part::Phi => phi_from(&f),
                Part::TauK(k) => tau_k_from(&f, k)?,
                Part::Omega => f.big_omega() as u64,
                Part::MkFull(k) => m_k_full_from(&f, k),
                Part::DigitSum(_) => unreachable!("m = 0 is rejected by factorize"),
            }
        }
    };
    Ok(if spec.is_exact() {
        Value::Int(part)
    } else {
        Value::Real(spec.real_from_parts(m, part))
    })
}

/// Mobius function from the factorization.
pub fn mobius_point(m: u64) -> Result<i8> {
    let f = factorize(m)?;
    if f.factors().iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.factors().len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// Checks `sum_{d | n} mu(d) n / d == phi(n)` for every `n <= limit`, with
/// `mu` from factorizations and `phi` from the totient sieve.
pub fn verify_phi_convolution(limit: u64) -> Result<bool> {
    let table = build_sieve(&ArithFnSpec::phi(), limit, MemoryBudget::from_env())?;
    let phi = table.int_values().expect("phi is integer valued");
    let n = limit as usize;
    let mut conv = vec![0i64; n + 1];
    for d in 1..=n {
        let mu = mobius_point(d as u64)? as i64;
        if mu == 0 {
            continue;
        }
        for (j, slot) in conv.iter_mut().enumerate().skip(d).step_by(d) {
            *slot += mu * (j / d) as i64;
        }
    }
    Ok((1..=n).all(|i| conv[i] == phi[i] as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn brute_phi(m: u64) -> u64 {
        (1..=m).filter(|j| j.gcd(&m) == 1).count() as u64
    }

    fn brute_tau_k(m: u64, k: u32) -> u64 {
        if k == 1 {
            return 1;
        }
        (1..=m)
            .filter(|d| m % d == 0)
            .map(|d| brute_tau_k(m / d, k - 1))
            .sum()
    }

    fn brute_mk(m: u64, k: u32) -> u64 {
        // largest divisor d with every prime exponent >= k
        (1..=m)
            .filter(|d| m % d == 0)
            .filter(|&d| {
                factor::factorize(d)
                    .unwrap()
                    .factors()
                    .iter()
                    .all(|&(_, e)| e >= k)
            })
            .max()
            .unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_point(1).unwrap(), 1);
        assert_eq!(phi_point(12).unwrap(), brute_phi(12));
        assert_eq!(phi_point(12).unwrap(), 4);
        for p in [2u64, 3, 97, 1_000_003] {
            assert_eq!(phi_point(p).unwrap(), p - 1);
        }
        for m in 1..500 {
            assert_eq!(phi_point(m).unwrap(), brute_phi(m));
        }
    }

    #[test]
    fn tau_k_examples() {
        for m in [1u64, 7, 12, 360, 1 << 40] {
            assert_eq!(tau_k_point(m, 1).unwrap(), 1);
        }
        assert_eq!(tau_k_point(6, 2).unwrap(), 4);
        assert_eq!(tau_k_point(8, 3).unwrap(), brute_tau_k(8, 3));
        assert_eq!(tau_k_point(8, 3).unwrap(), 10);
        for m in 1..200 {
            for k in 1..5 {
                assert_eq!(tau_k_point(m, k).unwrap(), brute_tau_k(m, k), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn tau_k_overflow_is_reported() {
        assert!(matches!(
            tau_k_point(1 << 62, 1_000_000),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn omega_examples() {
        assert_eq!(big_omega_point(1).unwrap(), 0);
        assert_eq!(big_omega_point(12).unwrap(), 3);
        assert_eq!(big_omega_point(1 << 20).unwrap(), 20);
    }

    #[test]
    fn digit_sum_examples() {
        assert_eq!(digit_sum_point(1234, 10).unwrap(), 10);
        assert_eq!(digit_sum_point(5, 2).unwrap(), 2);
        for q in 2..20u64 {
            for j in 0..5 {
                assert_eq!(digit_sum_point(q.pow(j), q).unwrap(), 1);
            }
        }
        assert_eq!(digit_sum_point(10, 1), Err(Error::InvalidBase(1)));
    }

    #[test]
    fn mk_examples() {
        assert_eq!(m_k_full_point(12, 2).unwrap(), 4);
        assert_eq!(m_k_full_point(12, 2).unwrap(), brute_mk(12, 2));
        assert_eq!(m_k_full_point(8, 2).unwrap(), 8);
        assert_eq!(m_k_full_point(30, 2).unwrap(), 1);
        assert_eq!(m_k_full_point(30, 2).unwrap(), brute_mk(30, 2));
        assert_eq!(m_k_full_point(1, 3).unwrap(), 1);
        for m in 1..400 {
            for k in 2..4 {
                assert_eq!(m_k_full_point(m, k).unwrap(), brute_mk(m, k));
            }
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(
            eval(&ArithFnSpec::phi_over_n(), 1).unwrap(),
            Value::Real(1.0)
        );
        let s3 = 3f64.sqrt();
        let v = eval(&ArithFnSpec::lambda_pow_omega(s3).unwrap(), 12).unwrap();
        assert!((v.as_f64() - 3.0 * s3).abs() < 1e-12);
        assert!((v.as_f64() - 5.19615).abs() < 1e-5);
        let v = eval(&ArithFnSpec::mk_full_normalized(2).unwrap(), 8).unwrap();
        assert!((v.as_f64() - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            eval(&ArithFnSpec::digit_sum(10).unwrap(), 1234).unwrap(),
            Value::Int(10)
        );
        assert!(eval(&ArithFnSpec::phi(), 0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ArithFnSpec::phi_pow(0.0).is_err());
        assert!(ArithFnSpec::phi_pow(1.0).is_err());
        assert!(ArithFnSpec::tau_k(0).is_err());
        assert!(ArithFnSpec::lambda_pow_omega(2.0).is_err());
        assert!(ArithFnSpec::lambda_pow_omega(0.5).is_err());
        assert!(ArithFnSpec::digit_sum(1).is_err());
        assert!(ArithFnSpec::mk_full(1).is_err());
        assert!(ArithFnSpec::mk_full_normalized(1).is_err());
        assert!(ArithFnSpec::phi().is_exact());
        assert!(ArithFnSpec::mk_full(3).unwrap().is_exact());
        assert!(!ArithFnSpec::phi_over_n().is_exact());
    }

    #[test]
    fn spec_grammar_round_trips() {
        for s in [
            "phi",
            "phi-over-n",
            "phi-pow:0.25",
            "tau:3",
            "lambda-omega:1.7320508",
            "digit-sum:10",
            "mk:2",
            "mk-norm:3",
        ] {
            let spec: ArithFnSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        for bad in [
            "",
            "phi:2",
            "tau",
            "tau:x",
            "mk:1",
            "digit-sum:1",
            "sigma:2",
        ] {
            assert!(bad.parse::<ArithFnSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn phi_convolution_identity() {
        assert!(verify_phi_convolution(1).unwrap());
        assert!(verify_phi_convolution(1000).unwrap());
        assert!(verify_phi_convolution(100_000).unwrap());
    }

    #[test]
    fn phi_prime_characterisation() {
        for m in 2..5000u64 {
            let p = phi_point(m).unwrap();
            assert!(p <= m - 1);
            assert_eq!(p == m - 1, is_prime(m));
        }
    }

    proptest! {
        #[test]
        fn multiplicativity(a in 1u64..1_000_000, b in 1u64..1_000_000) {
            prop_assume!(a.gcd(&b) == 1);
            prop_assert_eq!(phi_point(a * b).unwrap(), phi_point(a).unwrap() * phi_point(b).unwrap());
            for k in 1..4 {
                prop_assert_eq!(
                    tau_k_point(a * b, k).unwrap(),
                    tau_k_point(a, k).unwrap() * tau_k_point(b, k).unwrap()
                );
            }
            for k in 2..4 {
                prop_assert_eq!(
                    m_k_full_point(a * b, k).unwrap(),
                    m_k_full_point(a, k).unwrap() * m_k_full_point(b, k).unwrap()
                );
            }
        }

        #[test]
        fn tau_k_monotone_in_k(m in 1u64..10_000_000, k in 2u32..8) {
            prop_assert!(tau_k_point(m, k).unwrap() >= tau_k_point(m, k - 1).unwrap());
        }

        #[test]
        fn digit_sum_congruence(m in 1u64..u64::MAX / 2, q in 2u64..40) {
            prop_assert_eq!(digit_sum_point(m, q).unwrap() % (q - 1), m % (q - 1));
        }

        #[test]
        fn omega_trivial_bound(m in 1u64..FACTORIZE_MAX) {
            prop_assert!(big_omega_point(m).unwrap() as f64 <= (m as f64).log2() + 1e-9);
        }

        #[test]
        fn mk_divides_and_is_k_full(m in 1u64..1_000_000_000_000, k in 2u32..5) {
            let mk = m_k_full_point(m, k).unwrap();
            prop_assert_eq!(m % mk, 0);
            prop_assert!(factorize(mk).unwrap().factors().iter().all(|&(_, e)| e >= k));
        }

        #[test]
        fn factorization_invariants(m in 1u64..=FACTORIZE_MAX) {
            let f = factorize(m).unwrap();
            prop_assert_eq!(f.value(), m as u128);
            prop_assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.factors().iter().all(|&(p, e)| is_prime(p) && e >= 1));
        }
    }
}
