//! Weight filtrations `p = a·h + b·q`, their spectral sequences over Q, map
//! orders, and a sandbox that manufactures filtered perturbations of `d_kh`.
//!
//! `F^p` is spanned by generators with `p(x) ≥ p`; the differential must not
//! lower `p`. With `Z_r^p = {x ∈ F^p : dx ∈ F^{p+r}}` and
//! `B_r^p = F^p ∩ d(F^{p-r})`, every page dimension is an alternating sum of
//! ranks of `π_{<k} ∘ d|F^m`, and all of those come from one rank profile:
//! reduce the columns in order of decreasing `p`, pivot each on its row of
//! smallest `p`, and count pivots in the relevant corner.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::chain::{BigradedComplex, SparseIntMatrix};
use crate::error::{Error, Result};
use crate::par;

/// Componentwise shift `(Δh, Δq)`. `None` is the zero map, of order `(+∞, +∞)`.
pub type Order = Option<(i64, i64)>;

/// Minimal `(Δh, Δq)` over the nonzero entries of `f[target, source]`.
pub fn op_order(f: &SparseIntMatrix, source: &[(i64, i64)], target: &[(i64, i64)]) -> Order {
    f.iter().fold(None, |acc, (t, s, _)| {
        let dh = target[t].0 - source[s].0;
        let dq = target[t].1 - source[s].1;
        Some(match acc {
            None => (dh, dq),
            Some((a, b)) => (a.min(dh), b.min(dq)),
        })
    })
}

pub fn order_at_least(o: Order, s: i64, t: i64) -> bool {
    o.is_none_or(|(a, b)| a >= s && b >= t)
}

fn check_even(s_dot_s: i64) -> Result<()> {
    if s_dot_s.rem_euclid(2) != 0 {
        return Err(Error::OddSelfIntersection(s_dot_s));
    }
    Ok(())
}

/// `χ + S·S - 4⌊S·S/8⌋`
pub fn q_order_bound(chi: i64, s_dot_s: i64) -> Result<i64> {
    check_even(s_dot_s)?;
    Ok(chi + s_dot_s - 4 * s_dot_s.div_euclid(8))
}

/// Bound for a map counted over a family of dimension `dim_g`:
/// `χ + S·S + dim G`, valid only while `S·S < 8`.
pub fn q_order_bound_family(chi: i64, s_dot_s: i64, dim_g: i64) -> Result<i64> {
    check_even(s_dot_s)?;
    if s_dot_s >= 8 {
        return Err(Error::OutOfDomain(format!("family bound needs S·S < 8, got {s_dot_s}")));
    }
    Ok(chi + s_dot_s + dim_g)
}

/// `(½ S·S, χ + (3/2) S·S)`
pub fn cobordism_order(chi: i64, s_dot_s: i64) -> Result<(i64, i64)> {
    check_even(s_dot_s)?;
    Ok((s_dot_s / 2, chi + 3 * s_dot_s / 2))
}

#[derive(Clone, Debug)]
pub struct FilteredComplex {
    complex: BigradedComplex,
    weight: (i64, i64),
    p: Vec<i64>,
}

/// One entry of a page: the dimension at filtration degree `p`, split by
/// `h` and `q` whenever the differential respects them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageGroup {
    pub p: i64,
    pub h: Option<i64>,
    pub q: Option<i64>,
    pub rank: usize,
    weight: (i64, i64),
}

impl PageGroup {
    /// The grading not already fixed by `p`: `q` for weight `(a,0)`, `h`
    /// otherwise.
    pub fn complementary(&self) -> Option<i64> {
        if self.weight.1 == 0 {
            self.q.or(self.h)
        } else {
            self.h.or(self.q)
        }
    }
}

impl Serialize for PageGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PageGroup", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("complementary", &self.complementary())?;
        st.serialize_field("rank", &self.rank)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPage {
    pub r: usize,
    pub groups: Vec<PageGroup>,
    /// Rank of `d_r` out of each group.
    pub d_ranks: Vec<PageGroup>,
}

impl SpectralPage {
    pub fn total_rank(&self) -> usize {
        self.groups.iter().map(|g| g.rank).sum()
    }

    pub fn total_d_rank(&self) -> usize {
        self.d_ranks.iter().map(|g| g.rank).sum()
    }

    /// Ranks keyed by `(p, h, q)`.
    pub fn ranks(&self) -> BTreeMap<(i64, Option<i64>, Option<i64>), usize> {
        self.groups.iter().map(|g| ((g.p, g.h, g.q), g.rank)).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSequence {
    pub weight: (i64, i64),
    /// Pages `E_0, E_1, ...`; the last one is `E_∞`.
    pub pages: Vec<SpectralPage>,
    /// Rank of `H(C)` over Q.
    pub homology_rank: usize,
}

impl SpectralSequence {
    pub fn e_infinity(&self) -> &SpectralPage {
        self.pages.last().expect("at least one page")
    }

    pub fn page(&self, r: usize) -> &SpectralPage {
        self.pages.get(r).unwrap_or_else(|| self.e_infinity())
    }
}

/// Pivot positions `(column p, row p)` of a reduced map.
#[derive(Clone, Debug, Default)]
struct RankProfile {
    pivots: Vec<(i64, i64)>,
}

impl RankProfile {
    /// `rank(π_{<k} ∘ d|F^m)`; `None` bounds are infinite.
    fn rank(&self, m: Option<i64>, k: Option<i64>) -> usize {
        self.pivots
            .iter()
            .filter(|&&(cp, rp)| m.is_none_or(|m| cp >= m) && k.is_none_or(|k| rp < k))
            .count()
    }

    /// Columns sorted by `p` descending, rows by `p` ascending; each column
    /// pivots on its first surviving row.
    fn compute(cols: &[(usize, i64)], rows: &[(usize, i64)], d: &SparseIntMatrix) -> Self {
        let mut rows = rows.to_vec();
        rows.sort_by_key(|&(g, p)| (p, g));
        let mut cols = cols.to_vec();
        cols.sort_by_key(|&(g, p)| (std::cmp::Reverse(p), g));
        let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &(g, _))| (g, i)).collect();
        let mut by_col: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
        for (t, s, v) in d.iter() {
            if let Some(&r) = row_pos.get(&t) {
                by_col.entry(s).or_default().insert(r, v.clone());
            }
        }
        let mut pivot_col: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
        let mut pivots = Vec::new();
        for &(g, cp) in &cols {
            let Some(mut col) = by_col.remove(&g) else { continue };
            while let Some((&r, _)) = col.iter().next() {
                let Some(piv) = pivot_col.get(&r) else {
                    pivots.push((cp, rows[r].1));
                    pivot_col.insert(r, col);
                    break;
                };
                // col <- a·col - b·piv, which clears row r
                let a = piv[&r].clone();
                let b = col[&r].clone();
                let mut next = BTreeMap::new();
                for (&i, v) in &col {
                    next.insert(i, v * &a);
                }
                for (&i, v) in piv {
                    let e = next.entry(i).or_insert_with(BigInt::zero);
                    *e -= v * &b;
                }
                next.retain(|_, v| !v.is_zero());
                let content = next.values().fold(BigInt::zero(), |g, v| g.gcd(v));
                if !content.is_zero() && !content.is_one() {
                    for v in next.values_mut() {
                        *v /= &content;
                    }
                }
                col = next;
            }
        }
        RankProfile { pivots }
    }
}

/// Part of the complex that the differential never leaves: a q-block, and
/// within it either one h-degree (mapping to `h + 1`) or everything.
struct Unit {
    q: Option<i64>,
    h: Option<i64>,
    /// `(generator, p)` in this degree.
    gens: Vec<(usize, i64)>,
    /// Map out of this degree, and the one into it.
    out: RankProfile,
    inc: RankProfile,
}

impl Unit {
    fn dim_f(&self, m: i64) -> usize {
        self.gens.iter().filter(|&&(_, p)| p >= m).count()
    }

    fn z(&self, r: i64, p: i64) -> i64 {
        self.dim_f(p) as i64 - self.out.rank(Some(p), Some(p + r)) as i64
    }

    fn b(&self, r: i64, p: i64) -> i64 {
        self.inc.rank(Some(p - r), None) as i64 - self.inc.rank(Some(p - r), Some(p)) as i64
    }

    fn e(&self, r: i64, p: i64) -> i64 {
        self.z(r, p) - self.z(r - 1, p + 1) - self.b(r - 1, p) + self.b(r, p + 1)
    }

    /// `dim gr^p H` for the induced filtration.
    fn e_inf(&self, p: i64) -> i64 {
        let f = |p: i64| {
            let z = self.dim_f(p) as i64 - self.out.rank(Some(p), None) as i64;
            let b = self.inc.rank(None, None) as i64 - self.inc.rank(None, Some(p)) as i64;
            z - b
        };
        f(p) - f(p + 1)
    }
}

impl FilteredComplex {
    /// Filtration by `a·h + b·q` with `a, b ≥ 0`, not both zero.
    pub fn new(complex: BigradedComplex, weight: (i64, i64)) -> Result<Self> {
        let (a, b) = weight;
        if a < 0 || b < 0 || (a == 0 && b == 0) {
            return Err(Error::OutOfDomain(format!("weight ({a},{b})")));
        }
        let p: Vec<i64> = complex.gens().iter().map(|&(h, q)| a * h + b * q).collect();
        for (row, col, _) in complex.differential().iter() {
            if p[row] < p[col] {
                return Err(Error::NotFiltered { row, col, drop: p[col] - p[row] });
            }
        }
        Ok(FilteredComplex { complex, weight, p })
    }

    pub fn complex(&self) -> &BigradedComplex {
        &self.complex
    }

    pub fn weight(&self) -> (i64, i64) {
        self.weight
    }

    pub fn filtration_degree(&self, x: usize) -> i64 {
        self.p[x]
    }

    fn units(&self) -> Vec<Unit> {
        let gens = self.complex.gens();
        let d = self.complex.differential();
        let q_homog = d.iter().all(|(t, s, _)| gens[t].1 == gens[s].1);
        let h_graded = d.iter().all(|(t, s, _)| gens[t].0 == gens[s].0 + 1);
        let mut keys = BTreeSet::new();
        for &(h, q) in gens {
            keys.insert((q_homog.then_some(q), h_graded.then_some(h)));
        }
        let members = |q: Option<i64>, h: Option<i64>| -> Vec<(usize, i64)> {
            (0..gens.len())
                .filter(|&i| q.is_none_or(|q| gens[i].1 == q) && h.is_none_or(|h| gens[i].0 == h))
                .map(|i| (i, self.p[i]))
                .collect()
        };
        let keys: Vec<_> = keys.into_iter().collect();
        par::map_vec(keys, |(q, h)| {
            let here = members(q, h);
            let (out, inc) = match h {
                Some(h) => {
                    let above = members(q, Some(h + 1));
                    let below = members(q, Some(h - 1));
                    (RankProfile::compute(&here, &above, d), RankProfile::compute(&below, &here, d))
                }
                None => {
                    let prof = RankProfile::compute(&here, &here, d);
                    (prof.clone(), prof)
                }
            };
            Unit { q, h, gens: here, out, inc }
        })
    }

    /// All pages until the sequence degenerates, checked against the
    /// associated graded of `H(C)`.
    pub fn spectral_sequence(&self) -> Result<SpectralSequence> {
        let units = self.units();
        let (pmin, pmax) = match (self.p.iter().min(), self.p.iter().max()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0, 0),
        };
        let spread = pmax - pmin;
        let group = |u: &Unit, p: i64, rank: usize| PageGroup { p, h: u.h, q: u.q, rank, weight: self.weight };
        let mut pages = Vec::new();
        for r in 0..=spread + 1 {
            let mut groups = Vec::new();
            let mut d_ranks = Vec::new();
            for (ui, u) in units.iter().enumerate() {
                // d_r lands in the unit one degree up, or in this one
                let tgt = match u.h {
                    Some(h) => units.iter().find(|v| v.q == u.q && v.h == Some(h + 1)),
                    None => Some(&units[ui]),
                };
                for p in pmin..=pmax {
                    let e = u.e(r, p);
                    if e < 0 {
                        return Err(Error::Internal(format!("negative page dimension at r={r} p={p}")));
                    }
                    if e > 0 {
                        groups.push(group(u, p, e as usize));
                    }
                    if let Some(t) = tgt {
                        let q = p + r;
                        let rank = (t.b(r, q) - t.b(r + 1, q + 1)) - (t.b(r - 1, q) - t.b(r, q + 1));
                        if rank < 0 || rank > e {
                            return Err(Error::Internal(format!("bad differential rank at r={r} p={p}")));
                        }
                        if rank > 0 {
                            d_ranks.push(group(u, p, rank as usize));
                        }
                    }
                }
            }
            pages.push(SpectralPage { r: r as usize, groups, d_ranks });
        }
        let last = pages.iter().rposition(|pg| !pg.d_ranks.is_empty()).map_or(0, |i| i + 1);
        pages.truncate(last + 1);

        let mut inf = BTreeMap::new();
        for u in &units {
            for p in pmin..=pmax {
                let e = u.e_inf(p);
                if e != 0 {
                    inf.insert((p, u.h, u.q), e as usize);
                }
            }
        }
        let final_page = pages.last().expect("nonempty").ranks();
        if final_page != inf {
            return Err(Error::Internal("last page differs from the associated graded of H".into()));
        }
        let homology_rank = inf.values().sum();
        Ok(SpectralSequence { weight: self.weight, pages, homology_rank })
    }

    /// `E_2` as bigraded ranks, when `d_0 = 0` and `d_1` has pure bidegree
    /// `(1,0)`: then `E_1 = C` and `E_2 = H(C, d_1)`.
    pub fn e2_bigraded(&self) -> Result<Option<BTreeMap<(i64, i64), usize>>> {
        let gens = self.complex.gens();
        let d = self.complex.differential();
        if d.iter().any(|(t, s, _)| self.p[t] == self.p[s]) {
            return Ok(None);
        }
        let mut d1 = SparseIntMatrix::new(d.rows(), d.cols());
        for (t, s, v) in d.iter() {
            if self.p[t] == self.p[s] + 1 {
                if gens[t] != (gens[s].0 + 1, gens[s].1) {
                    return Ok(None);
                }
                d1.set(t, s, v.clone());
            }
        }
        let c = BigradedComplex::new(gens.to_vec(), d1)?;
        Ok(Some(c.homology()?.ranks()))
    }
}

/// A filtered perturbation of `d_kh` and the data that produced it.
#[derive(Clone, Debug)]
pub struct PerturbedDifferential {
    pub gens: Vec<(i64, i64)>,
    pub d_sharp: SparseIntMatrix,
    pub base: SparseIntMatrix,
    /// The conjugating map `g`, when generated here.
    pub certificate: Option<SparseIntMatrix>,
}

/// Default chance that an eligible entry of `n` is nonzero.
pub const SANDBOX_DENSITY: f64 = 0.1;

impl PerturbedDifferential {
    /// `d♯ = g d g⁻¹` with `g = 1 + n`. Each entry of `n` raising `h` by at
    /// least 1 and `q` by at least 2 is `±1` with probability `density`.
    pub fn conjugate(base: &BigradedComplex, seed: u64, density: f64) -> Result<Self> {
        let gens = base.gens().to_vec();
        let n_gens = gens.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut n = SparseIntMatrix::new(n_gens, n_gens);
        for s in 0..n_gens {
            for t in 0..n_gens {
                if gens[t].0 - gens[s].0 >= 1 && gens[t].1 - gens[s].1 >= 2 && rng.gen_bool(density) {
                    n.set(t, s, BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 }));
                }
            }
        }
        let id = SparseIntMatrix::identity(n_gens);
        let g = id.add(&n);
        // g⁻¹ = Σ (-n)^k; n raises h, so the series stops
        let minus_n = SparseIntMatrix::new(n_gens, n_gens).sub(&n);
        let mut g_inv = id.clone();
        let mut term = id;
        loop {
            term = term.mul(&minus_n);
            if term.is_zero() {
                break;
            }
            g_inv = g_inv.add(&term);
        }
        let d = base.differential();
        let d_sharp = g.mul(d).mul(&g_inv);
        let out = PerturbedDifferential { gens, d_sharp, base: d.clone(), certificate: Some(g) };
        out.validate()?;
        Ok(out)
    }

    /// A user-supplied `d♯`, checked like a generated one.
    pub fn raw(base: &BigradedComplex, d_sharp: SparseIntMatrix) -> Result<Self> {
        let out = PerturbedDifferential {
            gens: base.gens().to_vec(),
            d_sharp,
            base: base.differential().clone(),
            certificate: None,
        };
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        let n = self.gens.len();
        if self.d_sharp.rows() != n || self.d_sharp.cols() != n {
            return Err(Error::OutOfDomain(format!("d♯ must be {n}x{n}")));
        }
        let sq = self.d_sharp.mul(&self.d_sharp);
        if let Some((row, col, v)) = sq.iter().next() {
            return Err(Error::NotADifferential { row, col, value: v.to_string() });
        }
        let o = self.order();
        if !order_at_least(o, 1, 0) {
            return Err(Error::OrderViolation(format!("d♯ has order {o:?}, expected ≥ (1,0)")));
        }
        let o = self.correction_order();
        if !order_at_least(o, 1, 2) {
            return Err(Error::OrderViolation(format!("d♯ - d has order {o:?}, expected ≥ (1,2)")));
        }
        Ok(())
    }

    pub fn order(&self) -> Order {
        op_order(&self.d_sharp, &self.gens, &self.gens)
    }

    /// Order of `d♯ - d`.
    pub fn correction_order(&self) -> Order {
        op_order(&self.d_sharp.sub(&self.base), &self.gens, &self.gens)
    }

    pub fn complex(&self) -> Result<BigradedComplex> {
        BigradedComplex::new(self.gens.clone(), self.d_sharp.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::{any, prop_assert_eq, proptest};

    type Vector = Vec<BigRational>;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn rank(vs: &[Vector]) -> usize {
        let mut rows: Vec<Vector> = vs.to_vec();
        let mut r = 0;
        let width = rows.first().map_or(0, |v| v.len());
        for c in 0..width {
            let Some(i) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
            rows.swap(r, i);
            for j in 0..rows.len() {
                if j != r && !rows[j][c].is_zero() {
                    let f = &rows[j][c] / &rows[r][c];
                    let pivot = rows[r].clone();
                    for (x, y) in rows[j].iter_mut().zip(pivot) {
                        *x -= &f * y;
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of `{c : Σ c_i cols[i] = 0}`.
    fn nullspace(cols: &[Vector]) -> Vec<Vector> {
        let n = cols.len();
        let m = cols.first().map_or(0, |v| v.len());
        let mut a: Vec<Vector> = (0..m).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let Some(i) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, i);
            let inv = q(1) / &a[r][c];
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            for j in 0..m {
                if j != r && !a[j][c].is_zero() {
                    let f = a[j][c].clone();
                    let pivot = a[r].clone();
                    for (x, y) in a[j].iter_mut().zip(pivot) {
                        *x -= &f * y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (0..n)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![q(0); n];
                v[free] = q(1);
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a[row][free].clone();
                }
                v
            })
            .collect()
    }

    /// `E_r^p` by building `Z` and `B` as explicit subspaces.
    fn explicit_page(d: &SparseIntMatrix, p: &[i64], r: i64, at: i64) -> usize {
        let n = p.len();
        let dense = d.to_dense();
        let col = |i: usize| -> Vector { (0..n).map(|j| BigRational::from_integer(dense[j][i].clone())).collect() };
        let apply = |x: &Vector| -> Vector {
            (0..n).map(|j| (0..n).fold(q(0), |acc, i| acc + &x[i] * BigRational::from_integer(dense[j][i].clone()))).collect()
        };
        let z = |r: i64, at: i64| -> Vec<Vector> {
            let srcs: Vec<usize> = (0..n).filter(|&i| p[i] >= at).collect();
            let cols: Vec<Vector> = srcs
                .iter()
                .map(|&i| (0..n).map(|j| if p[j] < at + r { BigRational::from_integer(dense[j][i].clone()) } else { q(0) }).collect())
                .collect();
            nullspace(&cols)
                .into_iter()
                .map(|c| {
                    let mut v = vec![q(0); n];
                    for (k, &i) in srcs.iter().enumerate() {
                        v[i] = c[k].clone();
                    }
                    v
                })
                .collect()
        };
        let b = |r: i64, at: i64| -> Vec<Vector> {
            let srcs: Vec<usize> = (0..n).filter(|&i| p[i] >= at - r).collect();
            let cols: Vec<Vector> = srcs
                .iter()
                .map(|&i| col(i).into_iter().enumerate().map(|(j, v)| if p[j] < at { v } else { q(0) }).collect())
                .collect();
            nullspace(&cols)
                .into_iter()
                .map(|c| {
                    let mut x = vec![q(0); n];
                    for (k, &i) in srcs.iter().enumerate() {
                        x[i] = c[k].clone();
                    }
                    apply(&x)
                })
                .collect()
        };
        let zr = z(r, at);
        let mut sub = z(r - 1, at + 1);
        sub.extend(b(r - 1, at));
        rank(&zr) - rank(&sub)
    }

    /// `g d0 g⁻¹` for a random direct sum `d0` of one-step maps `x ↦ c·y`.
    fn random_filtered(seed: u64, n: usize) -> (Vec<(i64, i64)>, SparseIntMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p: Vec<i64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let mut d0 = SparseIntMatrix::new(n, n);
        let mut used = vec![false; n];
        for x in 0..n {
            for y in 0..n {
                if x != y && !used[x] && !used[y] && p[y] >= p[x] && rng.gen_bool(0.3) {
                    d0.set(y, x, BigInt::from(rng.gen_range(1..3)));
                    used[x] = true;
                    used[y] = true;
                }
            }
        }
        let mut nil = SparseIntMatrix::new(n, n);
        for s in 0..n {
            for t in 0..n {
                if p[t] > p[s] && rng.gen_bool(0.4) {
                    nil.set(t, s, BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 }));
                }
            }
        }
        let id = SparseIntMatrix::identity(n);
        let minus = SparseIntMatrix::new(n, n).sub(&nil);
        let mut inv = id.clone();
        let mut term = id.clone();
        loop {
            term = term.mul(&minus);
            if term.is_zero() {
                break;
            }
            inv = inv.add(&term);
        }
        let d = id.add(&nil).mul(&d0).mul(&inv);
        (p.iter().map(|&x| (x, 0)).collect(), d)
    }

    fn by_p(page: &SpectralPage) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for g in &page.groups {
            *m.entry(g.p).or_default() += g.rank;
        }
        m
    }

    #[test]
    fn orders_and_bounds() {
        let id = SparseIntMatrix::identity(2);
        assert_eq!(op_order(&id, &[(0, 0), (1, 2)], &[(0, 0), (1, 2)]), Some((0, 0)));
        assert_eq!(op_order(&SparseIntMatrix::new(2, 2), &[(0, 0); 2], &[(0, 0); 2]), None);
        assert!(order_at_least(None, 5, 5));
        assert_eq!(q_order_bound(-1, 0).unwrap(), -1);
        assert_eq!(cobordism_order(-1, 0).unwrap(), (0, -1));
        assert_eq!(cobordism_order(0, 0).unwrap(), (0, 0));
        assert_eq!(q_order_bound(-2, 2).unwrap(), 0);
        assert_eq!(cobordism_order(-2, 2).unwrap(), (1, 1));
        assert_eq!(q_order_bound(0, 8).unwrap(), 4);
        assert_eq!(q_order_bound(0, -2).unwrap(), 2);
        assert_eq!(q_order_bound_family(-1, 2, 1).unwrap(), 2);
        assert!(matches!(q_order_bound_family(0, 8, 1), Err(Error::OutOfDomain(_))));
        assert!(matches!(cobordism_order(-1, 1), Err(Error::OddSelfIntersection(1))));
    }

    #[test]
    fn weights_are_validated() {
        let c = BigradedComplex::new(vec![(0, 0)], SparseIntMatrix::new(1, 1)).unwrap();
        assert!(FilteredComplex::new(c.clone(), (0, 0)).is_err());
        assert!(FilteredComplex::new(c, (-1, 1)).is_err());
        let mut d = SparseIntMatrix::new(2, 2);
        d.set(1, 0, BigInt::one());
        let c = BigradedComplex::new(vec![(1, 0), (0, 0)], d).unwrap();
        assert!(matches!(FilteredComplex::new(c, (1, 0)), Err(Error::NotFiltered { row: 1, col: 0, drop: 1 })));
    }

    #[test]
    fn zero_differential_is_constant() {
        let c = BigradedComplex::new(vec![(0, 1), (1, 3), (1, 3)], SparseIntMatrix::new(3, 3)).unwrap();
        let ss = FilteredComplex::new(c, (1, 1)).unwrap().spectral_sequence().unwrap();
        assert_eq!(ss.pages.len(), 1);
        assert_eq!(ss.e_infinity().total_rank(), 3);
        assert_eq!(ss.homology_rank, 3);
    }

    #[test]
    fn two_step_differential() {
        // x -> y jumps two levels, so it shows up as d_2
        let mut d = SparseIntMatrix::new(3, 3);
        d.set(1, 0, BigInt::from(3));
        let c = BigradedComplex::new(vec![(0, 0), (2, 0), (1, 0)], d).unwrap();
        let ss = FilteredComplex::new(c, (1, 0)).unwrap().spectral_sequence().unwrap();
        let ranks: Vec<usize> = ss.pages.iter().map(|p| p.total_rank()).collect();
        assert_eq!(ranks, vec![3, 3, 3, 1]);
        assert_eq!(ss.pages[2].total_d_rank(), 1);
    }

    #[test]
    fn rank_formulas_match_explicit_subspaces() {
        for seed in 0..25 {
            let (gens, d) = random_filtered(seed, 9);
            let p: Vec<i64> = gens.iter().map(|g| g.0).collect();
            let c = BigradedComplex::new(gens, d.clone()).unwrap();
            let ss = FilteredComplex::new(c, (1, 0)).unwrap().spectral_sequence().unwrap();
            for r in 0..6 {
                let page = by_p(ss.page(r));
                for at in -1..6 {
                    let want = explicit_page(&d, &p, r as i64, at);
                    assert_eq!(page.get(&at).copied().unwrap_or(0), want, "seed {seed} r {r} p {at}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn pages_conserve_rank(seed in any::<u64>(), n in 1usize..12) {
            let (gens, d) = random_filtered(seed, n);
            let c = BigradedComplex::new(gens, d).unwrap();
            let ss = FilteredComplex::new(c, (1, 0)).unwrap().spectral_sequence().unwrap();
            for w in ss.pages.windows(2) {
                prop_assert_eq!(w[1].total_rank(), w[0].total_rank() - 2 * w[0].total_d_rank());
            }
            prop_assert_eq!(ss.e_infinity().total_rank(), ss.homology_rank);
            prop_assert_eq!(ss.e_infinity().total_d_rank(), 0);
        }
    }
}
