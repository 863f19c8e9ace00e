//! Exact rational scalars and the q-analogue primitives built on them.
//!
//! `[x]_Q = (1 - Q^x) / (1 - Q)` is always taken with respect to a base
//! `Q = q^W` for a positive integer `W`; the argument `x` may be rational as
//! long as `W * x` is an integer, so every power of `q` stays an integer
//! power. There is no real-exponent path.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p"`, `"p/q"` or `"-p/q"` into a canonical rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let parsed = Rational::from_str(trimmed)
        .map_err(|_| Error::InvalidArgument(format!("cannot parse {trimmed:?} as a rational")))?;
    Ok(parsed)
}

/// Canonical `p/q` rendering; integers render without a denominator.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// An admissible evaluation point for `q`: any rational other than 0, 1, -1.
///
/// For such `q` and any nonzero integer `k`, `q^k` is neither 1 nor -1, so
/// every `1 - q^k` and `1 + q^k` denominator that appears downstream is
/// nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QSample(Rational);

impl QSample {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_zero() || value.abs().is_one() {
            return Err(Error::InadmissibleQ(format_rational(&value)));
        }
        Ok(Self(value))
    }

    pub fn from_integer(value: i64) -> Result<Self> {
        Self::new(integer(value))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Self::new(rational(numer, denom))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    /// `q^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Rational {
        Pow::pow(&self.0, k)
    }

    /// The admissible point `q^w`.
    pub fn raise(&self, w: u64) -> QSample {
        assert!(w > 0, "raise needs a positive exponent");
        QSample(self.pow(w as i64))
    }

    /// `[e / b]_{q^b} = (1 - q^e) / (1 - q^b)` for integer `e` and positive `b`.
    pub fn bracket_exp(&self, exponent: i64, base_power: u64) -> Rational {
        debug_assert!(base_power > 0);
        if exponent == 0 {
            return Rational::zero();
        }
        let one = Rational::one();
        (&one - self.pow(exponent)) / (&one - self.pow(base_power as i64))
    }

    /// `[2]_{q^b} = 1 + q^b`.
    pub fn two_bracket(&self, base_power: u64) -> Rational {
        Rational::one() + self.pow(base_power as i64)
    }
}

impl fmt::Display for QSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for QSample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QSample::new(parse_rational(s)?)
    }
}

/// A bracket argument `r` paired with the base power `W` of `[r]_{q^W}`.
/// Constructible only when `W * r` is an integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BracketArg {
    value: Rational,
    base_power: u64,
    exponent: i64,
}

impl BracketArg {
    pub fn new(value: Rational, base_power: u64) -> Result<Self> {
        let exponent = scaled_exponent(&value, base_power)?;
        Ok(Self { value, base_power, exponent })
    }

    pub fn integer(value: i64, base_power: u64) -> Result<Self> {
        Self::new(integer(value), base_power)
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn base_power(&self) -> u64 {
        self.base_power
    }

    /// `W * r`, the integer exponent of `q` in `Q^r`.
    pub fn exponent(&self) -> i64 {
        self.exponent
    }
}

/// `W * e` as a machine integer, rejecting non-integral products.
pub fn scaled_exponent(e: &Rational, base_power: u64) -> Result<i64> {
    if base_power == 0 {
        return Err(Error::ZeroBasePower);
    }
    let scaled = e * Rational::from_integer(BigInt::from(base_power));
    if !scaled.is_integer() {
        return Err(Error::NonIntegralPower { exponent: format_rational(e), base_power });
    }
    scaled
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::ExponentOverflow(format_rational(&scaled)))
}

/// `[r]_{q^W} = (1 - q^{W r}) / (1 - q^W)`.
pub fn q_bracket(r: &Rational, base_power: u64, q: &QSample) -> Result<Rational> {
    let exponent = scaled_exponent(r, base_power)?;
    Ok(q.bracket_exp(exponent, base_power))
}

/// `q^{W e}`, defined only when `W e` is an integer.
pub fn q_pow(e: &Rational, base_power: u64, q: &QSample) -> Result<Rational> {
    let exponent = scaled_exponent(e, base_power)?;
    Ok(q.pow(exponent))
}

/// The n-th element of the base sequence 2, 3, 5/2, 7/3, 4, 9/4, 5, 11/5, ...
/// It interleaves the integers c with (2c + 1)/c, which are never integers
/// for c ≥ 2, so the sequence is injective.
fn base_sequence(index: u64) -> Rational {
    let c = match index {
        0 => return integer(2),
        1 => return integer(3),
        2 => return rational(5, 2),
        3 => return rational(7, 3),
        _ => ((index - 4) / 2 + 4) as i64,
    };
    if index.is_multiple_of(2) {
        integer(c)
    } else {
        rational(2 * c + 1, c)
    }
}

/// `count` distinct admissible points avoiding `exclusions`.
///
/// Without a seed the points are the first admissible entries of the base
/// sequence, in order. With a seed a pool of `4 * count` entries is shuffled
/// deterministically and the first `count` kept.
pub fn sample_points(count: usize, exclusions: &[Rational], seed: Option<u64>) -> Vec<QSample> {
    if count == 0 {
        return Vec::new();
    }
    let excluded: BTreeSet<&Rational> = exclusions.iter().collect();
    let pool_size = if seed.is_some() { count.saturating_mul(4) } else { count };
    let mut pool = Vec::with_capacity(pool_size);
    let mut index = 0u64;
    while pool.len() < pool_size {
        let candidate = base_sequence(index);
        index += 1;
        if excluded.contains(&candidate) {
            continue;
        }
        if let Ok(sample) = QSample::new(candidate) {
            pool.push(sample);
        }
    }
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pool.shuffle(&mut rng);
        pool.truncate(count);
    }
    pool
}

/// `|value|` is at most `tol`.
pub fn within(value: &Rational, tol: &Rational) -> bool {
    value.abs() <= *tol
}
