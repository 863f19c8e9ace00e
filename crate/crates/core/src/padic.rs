//! Truncated p-adic integers and the fermionic p-adic q-integral as a limit
//! of partial sums.
//!
//! Elements of `Z_p` are held as residues modulo `p^K`. Division is only
//! defined by units; there is no valuation tracking, so every formula here is
//! arranged to divide by units alone.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::euler::{q_euler_poly, QEulerCache};
use crate::qcalc::{BracketArg, QSample, Rational};

/// Partial sums with more terms than this are refused.
pub const MAX_PARTIAL_SUM_TERMS: u64 = 200_000;

/// Working precision used when none is given.
pub const DEFAULT_PRECISION: u32 = 8;

/// The ring `Z / p^K Z` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PadicRing {
    p: u64,
    precision: u32,
    #[serde(skip)]
    modulus: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PadicRing {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p.is_multiple_of(2) || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let modulus = p
            .checked_pow(precision)
            .filter(|m| *m < (1u64 << 62))
            .ok_or(Error::PrecisionTooLarge { p, precision })?;
        Ok(Self { p, precision, modulus })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^K`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn element(&self, residue: u64) -> PadicInt {
        PadicInt { ring: *self, residue: residue % self.modulus }
    }

    pub fn zero(&self) -> PadicInt {
        self.element(0)
    }

    pub fn one(&self) -> PadicInt {
        self.element(1)
    }

    /// The residue of a signed integer.
    pub fn from_i64(&self, value: i64) -> PadicInt {
        let m = self.modulus as i128;
        self.element((value as i128).rem_euclid(m) as u64)
    }

    fn reduce_bigint(&self, value: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        value.mod_floor(&m).to_u64().expect("residue below modulus")
    }

    /// The unique residue congruent to `value` modulo `p^K`.
    pub fn normalize(&self, value: &Rational) -> Result<PadicInt> {
        let denom = self.reduce_bigint(value.denom());
        if denom.is_multiple_of(self.p) {
            return Err(Error::NotPadicInteger { value: value.to_string(), p: self.p });
        }
        let numer = self.element(self.reduce_bigint(value.numer()));
        numer.div(&self.element(denom))
    }

    /// p-adic valuation of a residue, capped at the precision.
    pub fn valuation(&self, residue: u64) -> u32 {
        if residue == 0 {
            return self.precision;
        }
        let mut v = 0;
        let mut r = residue;
        while r.is_multiple_of(self.p) {
            r /= self.p;
            v += 1;
        }
        v
    }
}

/// A residue modulo `p^K`, standing for an element of `Z_p` known to
/// precision `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicInt {
    ring: PadicRing,
    residue: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadicOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl PadicInt {
    pub fn new(p: u64, precision: u32, residue: u64) -> Result<Self> {
        let ring = PadicRing::new(p, precision)?;
        if residue >= ring.modulus {
            return Err(Error::InvalidArgument(format!(
                "residue {residue} is not below {p}^{precision}"
            )));
        }
        Ok(ring.element(residue))
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn valuation(&self) -> u32 {
        self.ring.valuation(self.residue)
    }

    pub fn is_unit(&self) -> bool {
        !self.residue.is_multiple_of(self.ring.p)
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch { left: self.ring.modulus, right: other.ring.modulus });
        }
        Ok(())
    }

    fn with(&self, residue: u64) -> Self {
        Self { ring: self.ring, residue }
    }

    // Unchecked ring operations for hot loops inside one ring.

    fn add_raw(&self, other: &Self) -> Self {
        let m = self.ring.modulus;
        // both residues < 2^62, so the sum cannot overflow
        self.with((self.residue + other.residue) % m)
    }

    fn sub_raw(&self, other: &Self) -> Self {
        let m = self.ring.modulus;
        self.with((self.residue + m - other.residue) % m)
    }

    fn mul_raw(&self, other: &Self) -> Self {
        let m = self.ring.modulus as u128;
        self.with(((self.residue as u128 * other.residue as u128) % m) as u64)
    }

    fn neg_raw(&self) -> Self {
        self.with((self.ring.modulus - self.residue) % self.ring.modulus)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_raw(&base);
            }
            base = base.mul_raw(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnitDivision(self.residue));
        }
        let m = self.ring.modulus as i128;
        let egcd = (self.residue as i128).extended_gcd(&m);
        debug_assert!(egcd.gcd.is_one());
        Ok(self.with(egcd.x.rem_euclid(m) as u64))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        Ok(self.add_raw(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        Ok(self.sub_raw(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        Ok(self.mul_raw(other))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        Ok(self.mul_raw(&other.inverse()?))
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.ring.p, self.ring.precision)
    }
}

/// Ring operation on two residues of the same `Z / p^K Z`.
pub fn padic_arith(a: &PadicInt, b: &PadicInt, op: PadicOp) -> Result<PadicInt> {
    match op {
        PadicOp::Add => a.add(b),
        PadicOp::Sub => a.sub(b),
        PadicOp::Mul => a.mul(b),
        PadicOp::Div => a.div(b),
    }
}

/// Embeds `v ∈ Q ∩ Z_p` into `Z / p^K Z`.
pub fn padic_normalize(p: u64, precision: u32, v: &Rational) -> Result<PadicInt> {
    PadicRing::new(p, precision)?.normalize(v)
}

/// A p-adic `q` with `q ≡ 1 (mod p)`, so `|1 - q|_p ≤ 1/p < p^{-1/(p-1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicQ(PadicInt);

impl PadicQ {
    pub fn new(q: PadicInt) -> Result<Self> {
        if q.residue % q.ring.p != 1 % q.ring.p {
            return Err(Error::QNotNearOne { residue: q.residue, p: q.ring.p });
        }
        Ok(Self(q))
    }

    /// `q = 1 + p t`.
    pub fn from_offset(ring: PadicRing, t: u64) -> Result<Self> {
        let value = t
            .checked_mul(ring.p)
            .and_then(|v| v.checked_add(1))
            .filter(|v| *v < ring.modulus)
            .ok_or_else(|| Error::InvalidArgument(format!("1 + {}*{t} does not fit below p^K", ring.p)))?;
        Self::new(ring.element(value))
    }

    pub fn value(&self) -> PadicInt {
        self.0
    }

    /// The same `q` as an exact rational, for comparison with closed forms.
    /// The residue is read as the integer it represents.
    pub fn exact(&self) -> Result<QSample> {
        QSample::new(Rational::from_integer(BigInt::from(self.0.residue)))
    }
}

/// The integrand `f(y) = [y + shift]_q^degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FSpec {
    pub degree: u32,
    pub shift: u64,
}

impl FSpec {
    pub fn new(degree: u32, shift: u64) -> Self {
        Self { degree, shift }
    }
}

fn check_truncation(p: u64, level: u32) -> Result<u64> {
    if level == 0 {
        return Err(Error::InvalidArgument("truncation level must be at least 1".into()));
    }
    p.checked_pow(level)
        .filter(|terms| *terms <= MAX_PARTIAL_SUM_TERMS)
        .ok_or(Error::TruncationTooLarge { p, level, limit: MAX_PARTIAL_SUM_TERMS })
}

/// `S_N = (1 + q) / (1 + q^{p^N}) Σ_{x=0}^{p^N - 1} [x + a]_q^m (-q)^x`,
/// entirely modulo `p^K`.
///
/// `[x]_q` is accumulated as the geometric sum `1 + q + ... + q^{x-1}`, so
/// the non-unit `1 - q` is never inverted. `1 + q^{p^N} ≡ 2 (mod p)` is a
/// unit for odd `p`.
pub fn partial_sum(ring: PadicRing, level: u32, f: FSpec, q: PadicQ) -> Result<PadicInt> {
    let q = q.value();
    if q.ring != ring {
        return Err(Error::RingMismatch { left: ring.modulus, right: q.ring.modulus });
    }
    let terms = check_truncation(ring.p, level)?;

    // [a]_q and q^a
    let mut bracket = ring.zero();
    let mut q_shift = ring.one();
    for _ in 0..f.shift {
        bracket = bracket.add_raw(&q_shift);
        q_shift = q_shift.mul_raw(&q);
    }

    let mut sum = ring.zero();
    let mut weight = ring.one(); // (-q)^x
    let minus_q = q.neg_raw();
    for _ in 0..terms {
        let term = bracket.pow(f.degree as u64).mul_raw(&weight);
        sum = sum.add_raw(&term);
        bracket = bracket.add_raw(&q_shift);
        q_shift = q_shift.mul_raw(&q);
        weight = weight.mul_raw(&minus_q);
    }

    let normalizer = ring.one().add_raw(&q).div(&ring.one().add_raw(&q.pow(terms)))?;
    Ok(normalizer.mul_raw(&sum))
}

/// One point of a convergence profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProfilePoint {
    pub level: u32,
    pub valuation: u32,
}

/// `E_{m,q}(a)` from the exact path, reduced modulo `p^K`.
pub fn exact_target(ring: PadicRing, f: FSpec, q: PadicQ) -> Result<PadicInt> {
    let exact_q = q.exact()?;
    let cache = QEulerCache::new();
    let arg = BracketArg::integer(f.shift as i64, 1)?;
    let value = q_euler_poly(f.degree as usize, &arg, &exact_q, &cache);
    ring.normalize(&value)
}

/// `v_N = v_p(S_N - E_{m,q}(a))` for `N = 1..=max_level`, capped at `K`.
pub fn convergence_profile(
    ring: PadicRing,
    f: FSpec,
    q: PadicQ,
    max_level: u32,
) -> Result<Vec<ProfilePoint>> {
    if max_level < 2 {
        return Err(Error::InvalidArgument("a profile needs at least two levels".into()));
    }
    let target = exact_target(ring, f, q)?;
    (1..=max_level)
        .map(|level| {
            let s = partial_sum(ring, level, f, q)?;
            Ok(ProfilePoint { level, valuation: s.sub_raw(&target).valuation() })
        })
        .collect()
}

/// Valuation of the defect of the shift identity evaluated with truncated
/// integrals at level `N`:
/// `q^k S_N(f_k) + (-1)^{k-1} S_N(f) - [2]_q Σ_{l<k} (-1)^{k-1-l} q^l f(l)`
/// where `f(y) = [y + a]_q^m` and `f_k(y) = f(y + k)`.
pub fn truncated_shift_defect(
    ring: PadicRing,
    level: u32,
    f: FSpec,
    shift: u64,
    q: PadicQ,
) -> Result<u32> {
    if shift == 0 {
        return Err(Error::InvalidArgument("shift must be at least 1".into()));
    }
    let qv = q.value();
    let shifted = partial_sum(ring, level, FSpec::new(f.degree, f.shift + shift), q)?;
    let base = partial_sum(ring, level, f, q)?;
    let mut lhs = qv.pow(shift).mul_raw(&shifted);
    lhs = if (shift - 1).is_multiple_of(2) { lhs.add_raw(&base) } else { lhs.sub_raw(&base) };

    let mut rhs = ring.zero();
    for l in 0..shift {
        let mut bracket = ring.zero();
        let mut qp = ring.one();
        for _ in 0..(l + f.shift) {
            bracket = bracket.add_raw(&qp);
            qp = qp.mul_raw(&qv);
        }
        let value = qv.pow(l).mul_raw(&bracket.pow(f.degree as u64));
        rhs = if (shift - 1 - l).is_multiple_of(2) { rhs.add_raw(&value) } else { rhs.sub_raw(&value) };
    }
    rhs = ring.one().add_raw(&qv).mul_raw(&rhs);
    Ok(lhs.sub_raw(&rhs).valuation())
}

/// Whether `residue` and the rational `value` agree modulo `p^v`.
pub fn agrees_to(ring: PadicRing, residue: &PadicInt, value: &Rational, v: u32) -> Result<bool> {
    let reduced = ring.normalize(value)?;
    Ok(residue.sub(&reduced)?.valuation() >= v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::{integer, rational};

    #[test]
    fn normalize_examples() {
        assert_eq!(padic_normalize(3, 2, &integer(10)).unwrap().residue(), 1);
        assert_eq!(padic_normalize(3, 3, &integer(-1)).unwrap().residue(), 26);
        assert_eq!(padic_normalize(5, 2, &rational(1, 2)).unwrap().residue(), 13);
        assert!(matches!(
            padic_normalize(5, 2, &rational(1, 10)),
            Err(Error::NotPadicInteger { .. })
        ));
    }

    #[test]
    fn ring_validation() {
        assert!(matches!(PadicRing::new(2, 4), Err(Error::NotOddPrime(2))));
        assert!(matches!(PadicRing::new(9, 4), Err(Error::NotOddPrime(9))));
        assert!(matches!(PadicRing::new(3, 0), Err(Error::ZeroPrecision)));
        assert!(matches!(PadicRing::new(3, 60), Err(Error::PrecisionTooLarge { .. })));
        assert!(PadicInt::new(3, 2, 9).is_err());
    }

    #[test]
    fn arith_examples() {
        let a = PadicInt::new(3, 2, 5).unwrap();
        assert_eq!(padic_arith(&a, &a, PadicOp::Add).unwrap().residue(), 1);
        let b = PadicInt::new(3, 2, 4).unwrap();
        assert_eq!(padic_arith(&b, &b, PadicOp::Mul).unwrap().residue(), 7);
        assert_eq!(padic_arith(&a, &b, PadicOp::Sub).unwrap().residue(), 1);
        assert_eq!(padic_arith(&b, &a, PadicOp::Sub).unwrap().residue(), 8);
        let one = PadicInt::new(5, 2, 1).unwrap();
        let two = PadicInt::new(5, 2, 2).unwrap();
        assert_eq!(padic_arith(&one, &two, PadicOp::Div).unwrap().residue(), 13);
    }

    #[test]
    fn arith_errors() {
        let a = PadicInt::new(3, 2, 5).unwrap();
        let b = PadicInt::new(3, 3, 5).unwrap();
        assert!(matches!(a.add(&b), Err(Error::RingMismatch { .. })));
        let c = PadicInt::new(3, 2, 6).unwrap();
        assert!(matches!(a.div(&c), Err(Error::NonUnitDivision(6))));
    }

    #[test]
    fn q_must_be_near_one() {
        let ring = PadicRing::new(5, 4).unwrap();
        assert!(PadicQ::new(ring.element(6)).is_ok());
        assert!(matches!(PadicQ::new(ring.element(7)), Err(Error::QNotNearOne { .. })));
        assert_eq!(PadicQ::from_offset(ring, 2).unwrap().value().residue(), 11);
    }

    #[test]
    fn constant_integrand_is_exact() {
        let ring = PadicRing::new(3, 8).unwrap();
        let q = PadicQ::from_offset(ring, 1).unwrap();
        for level in 1..=5 {
            assert_eq!(partial_sum(ring, level, FSpec::new(0, 0), q).unwrap(), ring.one());
        }
        let profile = convergence_profile(ring, FSpec::new(0, 0), q, 4).unwrap();
        assert!(profile.iter().all(|pt| pt.valuation == 8));
    }

    #[test]
    fn first_moment_example() {
        let ring = PadicRing::new(3, 6).unwrap();
        let q = PadicQ::new(ring.element(4)).unwrap();
        let s = partial_sum(ring, 5, FSpec::new(1, 0), q).unwrap();
        assert!(agrees_to(ring, &s, &rational(-4, 17), 4).unwrap());
    }

    #[test]
    fn truncation_limit() {
        let ring = PadicRing::new(7, 8).unwrap();
        let q = PadicQ::from_offset(ring, 1).unwrap();
        assert!(matches!(
            partial_sum(ring, 7, FSpec::new(1, 0), q),
            Err(Error::TruncationTooLarge { .. })
        ));
        assert!(partial_sum(ring, 0, FSpec::new(1, 0), q).is_err());
        assert!(convergence_profile(ring, FSpec::new(1, 0), q, 1).is_err());
    }
}
