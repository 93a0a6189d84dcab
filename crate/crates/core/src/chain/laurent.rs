use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

/// Laurent polynomial in `T` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c * T^e`
    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c.into());
        p
    }

    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut p = Self::zero();
        for &(c, e) in terms {
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: BigInt) {
        let cur = self.coeffs.remove(&e).unwrap_or_default() + c;
        if !cur.is_zero() {
            self.coeffs.insert(e, cur);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// Multiplies by `T^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(&e, c)| (e + k, c.clone())).collect() }
    }

    /// Substitutes `T -> T^-1`.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(&e, c)| (-e, c.clone())).collect() }
    }

    /// Exact value at a nonzero rational `t`.
    pub fn eval(&self, t: &BigRational) -> BigRational {
        assert!(!t.is_zero() || self.min_degree().is_none_or(|m| m >= 0), "negative power evaluated at zero");
        self.terms().map(|(e, c)| BigRational::from_integer(c.clone()) * num_traits::pow::Pow::pow(t, e as i32)).sum()
    }

    /// Value at `t = 1`, exact for any exponents.
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn abs_coeff_sum(&self) -> BigInt {
        self.coeffs.values().map(|c| c.abs()).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.invert_variable()
    }

    /// Leading coefficient (highest exponent).
    pub fn leading(&self) -> BigInt {
        self.coeffs.values().next_back().cloned().unwrap_or_default()
    }

    /// Leading coefficient is `±1`.
    pub fn is_monic_up_to_unit(&self) -> bool {
        self.leading().abs().is_one()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || *e == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match *e {
                0 => {}
                1 => write!(f, "T")?,
                e => write!(f, "T^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for (e, c) in &self.coeffs {
            seq.serialize_element(&(e, c.to_string()))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t45() -> LaurentPoly {
        LaurentPoly::from_terms(&[(1, 6), (-1, 5), (1, 2), (-1, 0), (1, -2), (-1, -5), (1, -6)])
    }

    #[test]
    fn abs_coeff_sums() {
        assert_eq!(LaurentPoly::one().abs_coeff_sum(), BigInt::from(1));
        let p = LaurentPoly::from_terms(&[(1, 1), (-1, 0), (1, -1)]);
        assert_eq!(p.abs_coeff_sum(), BigInt::from(3));
        assert_eq!(t45().abs_coeff_sum(), BigInt::from(7));
    }

    #[test]
    fn arithmetic() {
        let a = LaurentPoly::from_terms(&[(1, 1), (1, -1)]);
        let sq = a.mul(&a);
        assert_eq!(sq, LaurentPoly::from_terms(&[(1, 2), (2, 0), (1, -2)]));
        assert!(a.sub(&a).is_zero());
        let two = BigRational::from_integer(2.into());
        assert_eq!(a.eval(&two), BigRational::new(5.into(), 2.into()));
        assert_eq!(t45().eval_one(), BigInt::from(1));
        assert!(t45().is_symmetric());
    }

    #[test]
    fn display() {
        assert_eq!(t45().to_string(), "T^6 - T^5 + T^2 - 1 + T^-2 - T^-5 + T^-6");
        assert_eq!(LaurentPoly::from_terms(&[(-2, 1)]).to_string(), "-2T");
    }
}
