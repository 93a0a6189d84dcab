//! Gaussian elimination of invertible differential entries.
//!
//! If `d(x)` has coefficient `u = ±1` on `y`, the pair `x, y` splits off as an
//! acyclic summand. The remaining generators carry the differential
//! `d' = d - d(·→y) u⁻¹ d(x→·)`, and the result is chain homotopy equivalent
//! to the original over the integers. This is what makes complexes with
//! hundreds of thousands of generators tractable before Smith normal form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer coefficients for elimination. Arithmetic returns `None` on
/// overflow so a fixed-width fast path can bail out and retry wide.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn zero() -> Self;
}

impl Coeff for i64 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn zero() -> Self {
        0
    }
}

impl Coeff for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn zero() -> Self {
        Zero::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

/// A cochain complex under elimination. Generator `x` has degree `deg[x]`
/// and `d(x) = Σ out[x][y] · y`.
#[derive(Clone, Debug)]
pub struct Reducer<R> {
    deg: Vec<i64>,
    out: Vec<BTreeMap<u32, R>>,
    inc: Vec<BTreeSet<u32>>,
    alive: Vec<bool>,
}

impl<R: Coeff> Reducer<R> {
    pub fn new(deg: Vec<i64>) -> Self {
        let n = deg.len();
        assert!(n < u32::MAX as usize, "too many generators");
        Reducer { deg, out: vec![BTreeMap::new(); n], inc: vec![BTreeSet::new(); n], alive: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deg.is_empty()
    }

    /// Adds `c` to the coefficient of `tgt` in `d(src)`.
    pub fn add_entry(&mut self, src: usize, tgt: usize, c: R) -> Result<(), Overflow> {
        let (s, t) = (src as u32, tgt as u32);
        let cur = self.out[src].remove(&t).unwrap_or_else(R::zero);
        let next = cur.add(&c).ok_or(Overflow)?;
        if next.is_zero() {
            self.inc[tgt].remove(&s);
        } else {
            self.out[src].insert(t, next);
            self.inc[tgt].insert(s);
        }
        Ok(())
    }

    /// Cancels unit entries until none remain among allowed pairs.
    /// `allowed(x, y)` can restrict elimination, e.g. to pairs in the same
    /// filtration level.
    pub fn cancel_units(&mut self, allowed: impl Fn(usize, usize) -> bool) -> Result<usize, Overflow> {
        let mut cancelled = 0;
        loop {
            let before = cancelled;
            for x in 0..self.deg.len() {
                while self.alive[x] {
                    let pick = self.out[x]
                        .iter()
                        .filter(|(&y, c)| c.is_unit() && allowed(x, y as usize))
                        .min_by_key(|(&y, _)| (self.inc[y as usize].len(), y))
                        .map(|(&y, c)| (y as usize, c.clone()));
                    let Some((y, u)) = pick else { break };
                    self.cancel(x, y, &u)?;
                    cancelled += 1;
                }
            }
            if cancelled == before {
                return Ok(cancelled);
            }
        }
    }

    fn cancel(&mut self, x: usize, y: usize, u: &R) -> Result<(), Overflow> {
        let yt = y as u32;
        let xs: Vec<(u32, R)> =
            self.out[x].iter().filter(|(&w, _)| w != yt).map(|(&w, c)| (w, c.clone())).collect();
        let zs: Vec<u32> = self.inc[y].iter().copied().filter(|&z| z as usize != x).collect();
        for z in zs {
            let zi = z as usize;
            // u is ±1, so u⁻¹ = u and the update is d(z) -= a·u·d(x)
            let a = &self.out[zi][&yt];
            let f = a.mul(u).and_then(|f| f.neg()).ok_or(Overflow)?;
            for (w, b) in &xs {
                let cur = self.out[zi].remove(w).unwrap_or_else(R::zero);
                let next = f.mul(b).and_then(|t| cur.add(&t)).ok_or(Overflow)?;
                if next.is_zero() {
                    self.inc[*w as usize].remove(&z);
                } else {
                    self.out[zi].insert(*w, next);
                    self.inc[*w as usize].insert(z);
                }
            }
        }
        self.remove(x);
        self.remove(y);
        Ok(())
    }

    fn remove(&mut self, g: usize) {
        let gt = g as u32;
        for &w in std::mem::take(&mut self.out[g]).keys() {
            self.inc[w as usize].remove(&gt);
        }
        for z in std::mem::take(&mut self.inc[g]) {
            self.out[z as usize].remove(&gt);
        }
        self.alive[g] = false;
    }

    /// Surviving generators (original indices, ascending) and the
    /// differential between them as `(source, target, coeff)` in survivor
    /// numbering.
    pub fn remaining(&self) -> (Vec<usize>, Vec<(usize, usize, BigInt)>) {
        let keep: Vec<usize> = (0..self.deg.len()).filter(|&g| self.alive[g]).collect();
        let mut index = vec![usize::MAX; self.deg.len()];
        for (i, &g) in keep.iter().enumerate() {
            index[g] = i;
        }
        let mut entries = Vec::new();
        for &g in &keep {
            for (&w, c) in &self.out[g] {
                entries.push((index[g], index[w as usize], c.to_big()));
            }
        }
        (keep, entries)
    }

    pub fn degree(&self, g: usize) -> i64 {
        self.deg[g]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancelling_a_unit_pair_leaves_the_rest() {
        // a -> b (1), a -> c (2), e -> b (1): cancel (a,b) gives e -> c (-2)
        let mut r: Reducer<i64> = Reducer::new(vec![0, 1, 1, 0]);
        r.add_entry(0, 1, 1).unwrap();
        r.add_entry(0, 2, 2).unwrap();
        r.add_entry(3, 1, 1).unwrap();
        let n = r.cancel_units(|x, y| (x, y) == (0, 1)).unwrap();
        assert_eq!(n, 1);
        let (keep, entries) = r.remaining();
        assert_eq!(keep, vec![2, 3]);
        assert_eq!(entries, vec![(1, 0, BigInt::from(-2))]);
    }

    #[test]
    fn overflow_is_reported() {
        let mut r: Reducer<i64> = Reducer::new(vec![0, 1]);
        r.add_entry(0, 1, i64::MAX).unwrap();
        assert_eq!(r.add_entry(0, 1, 1), Err(Overflow));
    }
}
