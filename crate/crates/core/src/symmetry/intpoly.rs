//! Dense integer polynomials in `q`, used to collapse the mixed-radix sums
//! into one polynomial per `(σ, m, l)` before any rational arithmetic.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::euler::binomial_row;
use crate::qcalc::Rational;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct IntPoly {
    coeffs: Vec<i128>,
}

impl IntPoly {
    pub fn new() -> Self {
        Self::default()
    }

    fn add_monomial(&mut self, degree: usize, c: i128) {
        if self.coeffs.len() <= degree {
            self.coeffs.resize(degree + 1, 0);
        }
        self.coeffs[degree] = self.coeffs[degree].checked_add(c).expect("coefficient overflow");
    }

    /// Adds `sign * q^shift * (1 - q^step)^power`.
    pub fn add_shifted_power(&mut self, sign: i128, shift: u64, step: u64, power: usize, binom: &[i128]) {
        debug_assert_eq!(binom.len(), power + 1);
        for (j, c) in binom.iter().enumerate() {
            let term = if j % 2 == 0 { sign * c } else { -sign * c };
            self.add_monomial((shift + step * j as u64) as usize, term);
        }
    }

    /// Exact value at a rational `q = a / b`, computed as
    /// `Σ c_d a^d b^{D-d} / b^D` with a single final reduction.
    pub fn eval(&self, q: &Rational) -> Rational {
        let Some(top) = self.coeffs.iter().rposition(|c| *c != 0) else {
            return Rational::zero();
        };
        let (a, b) = (q.numer(), q.denom());
        let mut b_pow = BigInt::from(1);
        let mut acc = BigInt::zero();
        // Horner from the top: acc_d = acc_{d+1} * a + c_d * b^{D-d}
        for (i, c) in self.coeffs[..=top].iter().rev().enumerate() {
            if i > 0 {
                acc *= a;
                b_pow *= b;
            }
            if *c != 0 {
                acc += &b_pow * BigInt::from(*c);
            }
        }
        Rational::new(acc, b_pow)
    }
}

pub(crate) fn small_binomials(n: usize) -> Vec<i128> {
    binomial_row(n).iter().map(|c| i128::try_from(c).expect("binomial fits in i128")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::{integer, rational};
    use num_traits::Pow;

    #[test]
    fn shifted_power_expansion() {
        // q^2 (1 - q^3)^2 = q^2 - 2 q^5 + q^8
        let mut p = IntPoly::new();
        p.add_shifted_power(1, 2, 3, 2, &small_binomials(2));
        assert_eq!(p.coeffs, vec![0, 0, 1, 0, 0, -2, 0, 0, 1]);
        let q = rational(3, 2);
        let expected = Pow::pow(&q, 2u32) * Pow::pow(integer(1) - Pow::pow(&q, 3u32), 2u32);
        assert_eq!(p.eval(&q), expected);
    }

    #[test]
    fn zero_step_gives_zero_power_convention() {
        let mut p = IntPoly::new();
        p.add_shifted_power(1, 4, 0, 0, &small_binomials(0));
        assert_eq!(p.eval(&integer(2)), integer(16));
        let mut z = IntPoly::new();
        z.add_shifted_power(1, 4, 0, 3, &small_binomials(3));
        assert_eq!(z.eval(&integer(2)), integer(0));
    }

    #[test]
    fn eval_negative_point() {
        let mut p = IntPoly::new();
        p.add_shifted_power(-1, 1, 1, 1, &small_binomials(1)); // -(q - q^2)
        let q = rational(-5, 3);
        let expected = -(q.clone() - &q * &q);
        assert_eq!(p.eval(&q), expected);
    }
}
