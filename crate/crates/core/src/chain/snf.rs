use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::SparseIntMatrix;

/// Result of a Smith normal form computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub rank: usize,
    /// Invariant factors `d1 | d2 | ... | d_rank`, all positive.
    pub divisors: Vec<BigInt>,
    /// Unimodular `(P, Q)` with `P * M * Q` diagonal, when requested. The
    /// diagonal is the one found by elimination (up to sign), before the
    /// divisor chain is normalised.
    pub transforms: Option<(SparseIntMatrix, SparseIntMatrix)>,
}

impl Snf {
    /// Divisors greater than one: the torsion of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

struct Work {
    rows: Vec<BTreeMap<usize, BigInt>>,
    cols: Vec<BTreeSet<usize>>,
    p: Option<Vec<BTreeMap<usize, BigInt>>>,
    q: Option<Vec<BTreeMap<usize, BigInt>>>,
}

impl Work {
    /// row_i -= f * row_r
    fn row_op(&mut self, i: usize, r: usize, f: &BigInt) {
        let src: Vec<(usize, BigInt)> = self.rows[r].iter().map(|(&c, v)| (c, v.clone())).collect();
        for (c, v) in src {
            let e = self.rows[i].entry(c).or_default();
            *e -= f * v;
            if e.is_zero() {
                self.rows[i].remove(&c);
                self.cols[c].remove(&i);
            } else {
                self.cols[c].insert(i);
            }
        }
        if let Some(p) = &mut self.p {
            let src: Vec<(usize, BigInt)> = p[r].iter().map(|(&c, v)| (c, v.clone())).collect();
            axpy(&mut p[i], &src, f);
        }
    }

    /// col_j -= f * col_c
    fn col_op(&mut self, j: usize, c: usize, f: &BigInt) {
        let rows: Vec<usize> = self.cols[c].iter().copied().collect();
        for k in rows {
            let v = self.rows[k][&c].clone();
            let e = self.rows[k].entry(j).or_default();
            *e -= f * v;
            if e.is_zero() {
                self.rows[k].remove(&j);
                self.cols[j].remove(&k);
            } else {
                self.cols[j].insert(k);
            }
        }
        if let Some(q) = &mut self.q {
            // Q is stored by columns
            let src: Vec<(usize, BigInt)> = q[c].iter().map(|(&r, v)| (r, v.clone())).collect();
            axpy(&mut q[j], &src, f);
        }
    }
}

fn axpy(dst: &mut BTreeMap<usize, BigInt>, src: &[(usize, BigInt)], f: &BigInt) {
    for (k, v) in src {
        let e = dst.entry(*k).or_default();
        *e -= f * v;
        if e.is_zero() {
            dst.remove(k);
        }
    }
}

/// Smith normal form over the integers.
///
/// Pivots are chosen by smallest magnitude, ties broken by the Markowitz
/// count `(row nnz - 1) * (col nnz - 1)` and then by position, so results and
/// transforms are deterministic.
pub fn smith_normal_form(m: &SparseIntMatrix, with_transforms: bool) -> Snf {
    let (nr, nc) = (m.rows(), m.cols());
    let mut w = Work {
        rows: vec![BTreeMap::new(); nr],
        cols: vec![BTreeSet::new(); nc],
        p: with_transforms.then(|| (0..nr).map(|i| BTreeMap::from([(i, BigInt::one())])).collect()),
        q: with_transforms.then(|| (0..nc).map(|j| BTreeMap::from([(j, BigInt::one())])).collect()),
    };
    for (r, c, v) in m.iter() {
        w.rows[r].insert(c, v.clone());
        w.cols[c].insert(r);
    }
    let mut row_done = vec![false; nr];
    let mut diag: Vec<BigInt> = Vec::new();
    let mut pivots: Vec<(usize, usize)> = Vec::new();

    loop {
        let Some((mut r, mut c)) = best_pivot(&w, &row_done, (0..nr).filter(|&i| !row_done[i])) else {
            break;
        };
        loop {
            let a = w.rows[r][&c].clone();
            let others: Vec<usize> = w.cols[c].iter().copied().filter(|&i| i != r).collect();
            for i in others {
                let b = w.rows[i][&c].clone();
                let f = &b / &a;
                if !f.is_zero() {
                    w.row_op(i, r, &f);
                }
            }
            let others: Vec<usize> = w.rows[r].keys().copied().filter(|&j| j != c).collect();
            for j in others {
                let b = w.rows[r][&j].clone();
                let f = &b / &a;
                if !f.is_zero() {
                    w.col_op(j, c, &f);
                }
            }
            let clean = w.cols[c].len() == 1 && w.rows[r].len() == 1;
            if clean {
                break;
            }
            // a remainder survived: move the pivot to the smallest leftover
            let mut best: Option<(BigInt, usize, usize)> = None;
            for &i in &w.cols[c] {
                consider(&mut best, w.rows[i][&c].abs(), i, c);
            }
            for (&j, v) in &w.rows[r] {
                consider(&mut best, v.abs(), r, j);
            }
            let (_, nr2, nc2) = best.expect("pivot row is nonempty");
            r = nr2;
            c = nc2;
        }
        diag.push(w.rows[r][&c].abs());
        pivots.push((r, c));
        row_done[r] = true;
        w.cols[c].clear();
    }

    let transforms = w.p.map(|p| {
        // order rows and columns so pivot i sits at (i, i)
        let row_order = pivot_first(nr, pivots.iter().map(|&(r, _)| r));
        let col_order = pivot_first(nc, pivots.iter().map(|&(_, c)| c));
        let mut p = p;
        let mut pm = SparseIntMatrix::new(nr, nr);
        for (i, &r) in row_order.iter().enumerate() {
            for (j, v) in std::mem::take(&mut p[r]) {
                pm.set(i, j, v);
            }
        }
        let mut q = w.q.unwrap();
        let mut qm = SparseIntMatrix::new(nc, nc);
        for (j, &c) in col_order.iter().enumerate() {
            for (i, v) in std::mem::take(&mut q[c]) {
                qm.set(i, j, v);
            }
        }
        (pm, qm)
    });
    Snf { rank: diag.len(), divisors: normalise(diag), transforms }
}

fn pivot_first(n: usize, pivots: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut order: Vec<usize> = pivots.collect();
    let mut used = vec![false; n];
    for &i in &order {
        used[i] = true;
    }
    order.extend((0..n).filter(|&i| !used[i]));
    order
}

fn consider(best: &mut Option<(BigInt, usize, usize)>, v: BigInt, i: usize, j: usize) {
    if best.as_ref().is_none_or(|(b, bi, bj)| (&v, i, j) < (b, *bi, *bj)) {
        *best = Some((v, i, j));
    }
}

fn best_pivot(
    w: &Work,
    row_done: &[bool],
    rows: impl Iterator<Item = usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize, usize)> = None;
    for i in rows {
        debug_assert!(!row_done[i]);
        for (&j, v) in &w.rows[i] {
            let mag = v.abs();
            let cost = (w.rows[i].len() - 1) * (w.cols[j].len() - 1);
            let better = match &best {
                None => true,
                Some((bm, bc, bi, bj)) => (&mag, cost, i, j) < (bm, *bc, *bi, *bj),
            };
            if better {
                let unit = mag.is_one() && cost == 0;
                best = Some((mag, cost, i, j));
                if unit {
                    return best.map(|(_, _, i, j)| (i, j));
                }
            }
        }
    }
    best.map(|(_, _, i, j)| (i, j))
}

/// Turns an arbitrary positive diagonal into the divisor chain with the same
/// cokernel, by repeated (gcd, lcm) replacement.
fn normalise(mut d: Vec<BigInt>) -> Vec<BigInt> {
    d.sort();
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf(rows: &[Vec<i64>]) -> Snf {
        smith_normal_form(&SparseIntMatrix::from_dense(rows), true)
    }

    fn divisors(s: &Snf) -> Vec<i64> {
        s.divisors.iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn zero_matrix() {
        let s = snf(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(s.rank, 0);
        assert!(s.divisors.is_empty());
    }

    #[test]
    fn diagonal_with_zero() {
        let s = snf(&[vec![2, 0], vec![0, 0]]);
        assert_eq!((s.rank, divisors(&s)), (1, vec![2]));
    }

    #[test]
    fn two_by_two() {
        // |det| = 2, gcd of entries 1
        let s = snf(&[vec![1, 2], vec![3, 4]]);
        assert_eq!((s.rank, divisors(&s)), (2, vec![1, 2]));
    }

    #[test]
    fn divisor_chain_is_normalised() {
        let s = snf(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(divisors(&s), vec![1, 6]);
        let s = snf(&[vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 10]]);
        assert_eq!(divisors(&s), vec![2, 2, 60]);
    }

    #[test]
    fn transforms_diagonalise() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&m, true);
        assert_eq!(divisors(&s), vec![2, 6, 12]);
        let (p, q) = s.transforms.unwrap();
        let d = p.mul(&m).mul(&q);
        for (r, c, _) in d.iter() {
            assert_eq!(r, c, "off-diagonal entry survived");
        }
    }
}
