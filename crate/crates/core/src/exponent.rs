//! Exponent pairs over exact rationals.
//!
//! Pairs are transformed by van der Corput's processes
//!
//! ```text
//! A(k, l) = (k / (2k + 2), (k + l + 1) / (2k + 2))
//! B(k, l) = (l - 1/2, k + 1/2)
//! ```
//!
//! and composed by words over `{A, B}` applied right to left. The slack
//! `epsilon` that usually accompanies such pairs is carried as 0.
//!
//! [`optimal_theta`] picks the largest `theta` such that, with `J = x^theta`,
//! every summand of the four-term error expression
//!
//! ```text
//! (J^{l+1} x^{k+1})^{1/(k+2)} + (J^{2(l+1)} x^k)^{1/(k+2)}
//!     + (J^{3k-l+5} x^{-k-1})^{1/(k+2)} + J^3 / x
//! ```
//!
//! stays below `x`. That `theta` drives the lower/upper coefficients of
//! `S(x) / (x log x)` reported by [`bound_profile`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::consts::ZETA2;
use crate::error::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// An exponent pair `(k, l)` with `0 <= k <= 1/2 <= l <= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentPair {
    k: BigRational,
    l: BigRational,
}

impl ExponentPair {
    pub fn new(k: BigRational, l: BigRational) -> Result<Self> {
        let half = rat(1, 2);
        if k < BigRational::zero() || k > half || l < half || l > BigRational::one() {
            return Err(Error::InvalidParameter(format!(
                "({k}, {l}) is outside 0 <= k <= 1/2 <= l <= 1"
            )));
        }
        Ok(ExponentPair { k, l })
    }

    /// Convenience constructor from `k = kn/kd`, `l = ln/ld`.
    pub fn from_ratios(kn: i64, kd: i64, ln: i64, ld: i64) -> Result<Self> {
        if kd == 0 || ld == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Self::new(rat(kn, kd), rat(ln, ld))
    }

    /// The trivial pair `(0, 1)`.
    pub fn trivial() -> Self {
        ExponentPair {
            k: BigRational::zero(),
            l: BigRational::one(),
        }
    }

    pub fn k(&self) -> &BigRational {
        &self.k
    }

    pub fn l(&self) -> &BigRational {
        &self.l
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.k.to_f64().unwrap_or(f64::NAN),
            self.l.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k, self.l)
    }
}

/// Parses `"k, l"` or `"(k, l)"` where each side is an integer or `p/q`.
impl FromStr for ExponentPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (k, l) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `k, l`, got `{s}`")))?;
        Self::new(parse_rational(k)?, parse_rational(l)?)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn process_a(p: &ExponentPair) -> ExponentPair {
    let denom = &p.k * rat(2, 1) + rat(2, 1);
    ExponentPair {
        k: &p.k / &denom,
        l: (&p.k + &p.l + BigRational::one()) / &denom,
    }
}

pub fn process_b(p: &ExponentPair) -> ExponentPair {
    ExponentPair {
        k: &p.l - rat(1, 2),
        l: &p.k + rat(1, 2),
    }
}

/// Applies a flat word over `{A, B}` (whitespace ignored), rightmost letter
/// first.
pub fn apply_word(word: &str, p: &ExponentPair) -> Result<ExponentPair> {
    let letters: Vec<char> = word.chars().filter(|c| !c.is_whitespace()).collect();
    if letters.is_empty() {
        return Err(Error::MalformedWord("empty word".into()));
    }
    if let Some(c) = letters.iter().find(|c| !matches!(c, 'A' | 'B')) {
        return Err(Error::MalformedWord(format!(
            "unexpected `{c}` in `{word}`"
        )));
    }
    Ok(letters.iter().rev().fold(p.clone(), |acc, c| match c {
        'A' => process_a(&acc),
        _ => process_b(&acc),
    }))
}

/// Expands the power/group notation `BA^3(BA^2)^2` (superscript digits
/// such as `A³` are accepted too) into a flat word.
pub fn expand_word(word: &str) -> Result<String> {
    let chars: Vec<char> = word.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let out = parse_sequence(&chars, &mut pos, word)?;
    if pos != chars.len() {
        return Err(Error::MalformedWord(format!("unbalanced `)` in `{word}`")));
    }
    if out.is_empty() {
        return Err(Error::MalformedWord("empty word".into()));
    }
    Ok(out)
}

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
const MAX_EXPANDED: usize = 1 << 16;

fn parse_sequence(chars: &[char], pos: &mut usize, word: &str) -> Result<String> {
    let mut out = String::new();
    while *pos < chars.len() {
        let atom = match chars[*pos] {
            'A' | 'B' => {
                *pos += 1;
                chars[*pos - 1].to_string()
            }
            '(' => {
                *pos += 1;
                let inner = parse_sequence(chars, pos, word)?;
                if chars.get(*pos) != Some(&')') {
                    return Err(Error::MalformedWord(format!("missing `)` in `{word}`")));
                }
                *pos += 1;
                if inner.is_empty() {
                    return Err(Error::MalformedWord(format!("empty group in `{word}`")));
                }
                inner
            }
            ')' => break,
            c => {
                return Err(Error::MalformedWord(format!(
                    "unexpected `{c}` in `{word}`"
                )))
            }
        };
        let reps = parse_power(chars, pos, word)?;
        if out.len().saturating_add(atom.len().saturating_mul(reps)) > MAX_EXPANDED {
            return Err(Error::MalformedWord(format!(
                "`{word}` expands beyond {MAX_EXPANDED} letters"
            )));
        }
        out.push_str(&atom.repeat(reps));
    }
    Ok(out)
}

fn parse_power(chars: &[char], pos: &mut usize, word: &str) -> Result<usize> {
    let mut digits = String::new();
    if chars.get(*pos) == Some(&'^') {
        *pos += 1;
        while let Some(c) = chars.get(*pos).filter(|c| c.is_ascii_digit()) {
            digits.push(*c);
            *pos += 1;
        }
        if digits.is_empty() {
            return Err(Error::MalformedWord(format!(
                "`^` without exponent in `{word}`"
            )));
        }
    } else {
        while let Some(d) = chars
            .get(*pos)
            .and_then(|c| SUPERSCRIPTS.iter().position(|s| s == c))
        {
            digits.push(char::from(b'0' + d as u8));
            *pos += 1;
        }
        if digits.is_empty() {
            return Ok(1);
        }
    }
    digits
        .parse()
        .map_err(|_| Error::MalformedWord(format!("bad exponent in `{word}`")))
}

/// The four summands of the error expression at `J` and `x`, as reals.
pub fn lemma43_terms(p: &ExponentPair, j: f64, x: f64) -> Result<[f64; 4]> {
    if !(x >= 3.0) {
        return Err(Error::Domain(format!("x must be >= 3, got {x}")));
    }
    if !(j > x.sqrt() && j <= x) {
        return Err(Error::Domain(format!(
            "J = {j} outside (sqrt x, x] for x = {x}"
        )));
    }
    let (k, l) = p.to_f64();
    let e = 1.0 / (k + 2.0);
    let (lj, lx) = (j.ln(), x.ln());
    Ok([
        (((l + 1.0) * lj + (k + 1.0) * lx) * e).exp(),
        ((2.0 * (l + 1.0) * lj + k * lx) * e).exp(),
        (((3.0 * k - l + 5.0) * lj - (k + 1.0) * lx) * e).exp(),
        (3.0 * lj - lx).exp(),
    ])
}

/// Exact exponents of `x` in each summand when `J = x^theta`.
pub fn j_term_exponents(p: &ExponentPair, theta: &BigRational) -> [BigRational; 4] {
    let one = BigRational::one();
    let two = rat(2, 1);
    let (k, l) = (&p.k, &p.l);
    let kp2 = k + &two;
    [
        (theta * (l + &one) + k + &one) / &kp2,
        (&two * theta * (l + &one) + k) / &kp2,
        (theta * (rat(3, 1) * k - l + rat(5, 1)) - k - &one) / &kp2,
        rat(3, 1) * theta - &one,
    ]
}

/// `min(1/(l+1), (2k+3)/(3k-l+5), 2/3)`.
pub fn optimal_theta(p: &ExponentPair) -> BigRational {
    let one = BigRational::one();
    let (k, l) = (&p.k, &p.l);
    let first = &one / (l + &one);
    let second = (rat(2, 1) * k + rat(3, 1)) / (rat(3, 1) * k - l + rat(5, 1));
    [first, second, rat(2, 3)]
        .into_iter()
        .min()
        .expect("three candidates")
}

/// `theta` and the coefficients `theta / zeta(2)` and
/// `theta / zeta(2) + (1 - theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundProfile {
    pub theta: BigRational,
    pub lower_coeff: f64,
    pub upper_coeff: f64,
}

impl BoundProfile {
    pub fn from_theta(theta: BigRational) -> Self {
        let t = theta.to_f64().unwrap_or(f64::NAN);
        let lower = t / ZETA2;
        BoundProfile {
            theta,
            lower_coeff: lower,
            upper_coeff: lower + (1.0 - t),
        }
    }
}

pub fn bound_profile(p: &ExponentPair) -> BoundProfile {
    BoundProfile::from_theta(optimal_theta(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(kn: i64, kd: i64, ln: i64, ld: i64) -> ExponentPair {
        ExponentPair::from_ratios(kn, kd, ln, ld).unwrap()
    }

    #[test]
    fn process_a_examples() {
        assert_eq!(process_a(&pair(1, 2, 1, 2)), pair(1, 6, 2, 3));
        assert_eq!(process_a(&ExponentPair::trivial()), ExponentPair::trivial());
        assert_eq!(process_a(&pair(1, 6, 2, 3)), pair(1, 14, 11, 14));
    }

    #[test]
    fn process_b_examples() {
        assert_eq!(process_b(&ExponentPair::trivial()), pair(1, 2, 1, 2));
        assert_eq!(process_b(&pair(1, 2, 1, 2)), ExponentPair::trivial());
        assert_eq!(process_b(&pair(1, 6, 2, 3)), pair(1, 6, 2, 3));
    }

    #[test]
    fn known_chains() {
        let chain = apply_word("BAAABAABAA", &pair(13, 84, 55, 84)).unwrap();
        assert_eq!(chain, pair(3071, 7887, 1380, 2629));
        let alt = apply_word("BAAABAABAAB", &ExponentPair::trivial()).unwrap();
        assert_eq!(alt, pair(97, 251, 132, 251));
        assert_eq!(
            apply_word("B", &ExponentPair::trivial()).unwrap(),
            pair(1, 2, 1, 2)
        );
        assert!(matches!(
            apply_word("", &ExponentPair::trivial()),
            Err(Error::MalformedWord(_))
        ));
        assert!(apply_word("BAC", &ExponentPair::trivial()).is_err());
        assert_eq!(
            apply_word(" B A ", &ExponentPair::trivial()).unwrap(),
            apply_word("BA", &ExponentPair::trivial()).unwrap()
        );
    }

    #[test]
    fn word_sugar() {
        assert_eq!(expand_word("BA^3(BA^2)^2").unwrap(), "BAAABAABAA");
        assert_eq!(expand_word("BA³(BA²)²B").unwrap(), "BAAABAABAAB");
        assert_eq!(expand_word("BA^3 (BA^2)^2 B").unwrap(), "BAAABAABAAB");
        assert_eq!(expand_word("((AB)^2)^2").unwrap(), "ABABABAB");
        for bad in ["", "(", "A)", "A^", "()", "AC", "A^x", "(A^99999)^99999"] {
            assert!(expand_word(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn optimal_theta_examples() {
        assert_eq!(
            optimal_theta(&pair(3071, 7887, 1380, 2629)),
            rat(2629, 4009)
        );
        assert_eq!(optimal_theta(&pair(97, 251, 132, 251)), rat(251, 383));
        // min(1/2, 3/4, 2/3)
        assert_eq!(optimal_theta(&ExponentPair::trivial()), rat(1, 2));
    }

    #[test]
    fn bound_profile_examples() {
        let b = bound_profile(&pair(3071, 7887, 1380, 2629));
        assert!((b.lower_coeff - 0.39866).abs() <= 1e-5);
        assert!((b.upper_coeff - 0.74289).abs() <= 1e-5);
        let b = bound_profile(&pair(97, 251, 132, 251));
        assert!((b.lower_coeff - 0.39841).abs() <= 1e-5);
        assert!((b.upper_coeff - 0.74305).abs() <= 1e-5);
        let b = BoundProfile::from_theta(BigRational::one());
        assert_eq!(b.lower_coeff, b.upper_coeff);
        assert!((b.lower_coeff - crate::consts::INV_ZETA2).abs() < 1e-15);
    }

    #[test]
    fn j_term_examples() {
        let p = pair(1, 2, 1, 2);
        let x = 1e6;
        let t = lemma43_terms(&p, x, x).unwrap();
        assert!((t[3] / (x * x) - 1.0).abs() < 1e-12);
        // J = x^{2/3}: exponents are exact rationals
        let e = j_term_exponents(&p, &rat(2, 3));
        assert_eq!(e, [rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)]);
        assert_eq!(optimal_theta(&p), rat(2, 3));
        let t = lemma43_terms(&p, x.powf(2.0 / 3.0), x).unwrap();
        for (term, exp) in t.iter().zip(e.iter()) {
            let want = x.powf(exp.to_f64().unwrap());
            assert!((term / want - 1.0).abs() < 1e-9);
        }
        assert!(lemma43_terms(&p, 1e3, 1e6).is_err());
        assert!(lemma43_terms(&p, 2e6, 1e6).is_err());
        assert!(lemma43_terms(&p, 2.0, 2.0).is_err());
    }

    #[test]
    fn j_terms_monotone_in_j() {
        let p = pair(3071, 7887, 1380, 2629);
        let x: f64 = 1e8;
        let mut prev = [0.0; 4];
        for i in 1..=100 {
            let j = x.sqrt() * (x.sqrt()).powf(i as f64 / 100.0);
            let t = lemma43_terms(&p, j.min(x), x).unwrap();
            for c in 0..4 {
                assert!(t[c] >= prev[c]);
            }
            prev = t;
        }
    }

    #[test]
    fn theta_is_tight() {
        for p in [
            pair(3071, 7887, 1380, 2629),
            pair(97, 251, 132, 251),
            ExponentPair::trivial(),
            pair(1, 2, 1, 2),
            pair(1, 6, 2, 3),
        ] {
            let theta = optimal_theta(&p);
            assert!(j_term_exponents(&p, &theta)
                .iter()
                .all(|e| *e <= BigRational::one()));
            let bumped = &theta + rat(1, 100);
            assert!(j_term_exponents(&p, &bumped)
                .iter()
                .any(|e| *e > BigRational::one()));
        }
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(
            "13/84, 55/84".parse::<ExponentPair>().unwrap(),
            pair(13, 84, 55, 84)
        );
        assert_eq!(
            "(0,1)".parse::<ExponentPair>().unwrap(),
            ExponentPair::trivial()
        );
        assert!("1/2".parse::<ExponentPair>().is_err());
        assert!("1/0, 1".parse::<ExponentPair>().is_err());
        assert!("3/4, 1".parse::<ExponentPair>().is_err());
    }

    fn arb_pair() -> impl Strategy<Value = ExponentPair> {
        (0i64..=500, 500i64..=1000).prop_map(|(k, l)| pair(k, 1000, l, 1000))
    }

    proptest! {
        #[test]
        fn b_is_an_involution(p in arb_pair()) {
            prop_assert_eq!(process_b(&process_b(&p)), p);
        }

        #[test]
        fn processes_preserve_validity(p in arb_pair(), word in "[AB]{1,8}") {
            let q = apply_word(&word, &p).unwrap();
            prop_assert!(ExponentPair::new(q.k().clone(), q.l().clone()).is_ok());
            prop_assert!(q.k() <= q.l());
        }
    }
}
