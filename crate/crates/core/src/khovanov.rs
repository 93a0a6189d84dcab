//! The Khovanov differential on the cube.
//!
//! A generator at vertex `v` labels each circle of `K_v` with `v₊` or `v₋`
//! (bit set = `v₊`). Merges apply `m`, splits apply `Δ`, nonorientable bands
//! contribute nothing. The edge `v → v - e_c` carries the sign
//! `(-1)^{#{c' < c : v(c') = 1}}`.
//!
//! The complex is q-homogeneous, so it is built and solved one quantum
//! degree at a time. Inside a slice the generators of a vertex all have the
//! same number of `v₊` labels; indexing them by colex rank of the label mask
//! avoids any lookup table.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::chain::{graded_homology, BigradedComplex, HomologyTable, SparseIntMatrix};
use crate::cube::{CubeOptions, EdgeKind, GradedCube};
use crate::diagram::PlanarDiagram;
use crate::error::{Error, Result};
use crate::par;

/// Coefficient ring for homology output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Coeffs {
    Z,
    Q,
}

/// One basis element of the complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub vertex: u64,
    /// Bit `j` set: circle `j` carries `v₊`.
    pub labeling: u64,
    pub h: i64,
    pub q: i64,
}

/// The per-edge circle correspondence.
#[derive(Clone, Debug)]
struct EdgeMap {
    from: u64,
    to: u64,
    sign: i64,
    kind: EdgeKind,
    /// Target circle of each source circle not touched by the saddle.
    carry: Vec<(usize, usize)>,
    /// Merge: the two source circles and their target. Split: the source
    /// circle and the two targets.
    a: usize,
    b: usize,
    c: usize,
}

#[derive(Clone, Debug)]
struct VertexInfo {
    circles: usize,
    /// Circle holding the basepoint, for the reduced complex.
    base: Option<usize>,
    h: i64,
    q_off: i64,
}

/// Differential within one quantum degree.
#[derive(Clone, Debug, Default)]
pub struct Slice {
    pub q: i64,
    pub gens: Vec<Generator>,
    /// `(source, target, coeff)` in slice-local numbering.
    pub entries: Vec<(usize, usize, i64)>,
}

impl Slice {
    pub fn degrees(&self) -> Vec<i64> {
        self.gens.iter().map(|g| g.h).collect()
    }

    /// First nonzero entry `(row, col)` of `d²`, in machine integers.
    fn square_violation(&self) -> Option<(usize, usize)> {
        let n = self.gens.len();
        let mut start = vec![0usize; n + 1];
        for &(s, _, _) in &self.entries {
            start[s + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut out: Vec<(usize, i64)> = vec![(0, 0); self.entries.len()];
        let mut fill = start.clone();
        for &(s, t, c) in &self.entries {
            out[fill[s]] = (t, c);
            fill[s] += 1;
        }
        let mut acc: Vec<(usize, i64)> = Vec::new();
        for a in 0..n {
            acc.clear();
            for &(b, c1) in &out[start[a]..start[a + 1]] {
                acc.extend(out[start[b]..start[b + 1]].iter().map(|&(t, c2)| (t, c1 * c2)));
            }
            acc.sort_unstable_by_key(|x| x.0);
            for run in acc.chunk_by(|x, y| x.0 == y.0) {
                if run.iter().map(|x| x.1).sum::<i64>() != 0 {
                    return Some((run[0].0, a));
                }
            }
        }
        None
    }

    fn big_entries(&self) -> Vec<(usize, usize, BigInt)> {
        self.entries.iter().map(|&(s, t, c)| (s, t, BigInt::from(c))).collect()
    }
}

#[derive(Clone, Debug)]
pub struct KhovanovComplex {
    cube: GradedCube,
    reduced: bool,
    info: Vec<VertexInfo>,
    /// Outgoing edges by source vertex.
    out_edges: Vec<Vec<EdgeMap>>,
}

/// `(-1)^{#{c' < c : v(c') = 1}}` for the edge changing bit `bit` of `v`.
pub fn edge_sign(v: u64, bit: usize) -> i64 {
    if (v & ((1u64 << bit) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Exponent `½|v-u|₁(|v-u|₁-1) + Σ v(c)` of the gluing sign, for `v ≥ u`.
pub fn msign(v: &[i64], u: &[i64]) -> i64 {
    let l1: i64 = v.iter().zip(u).map(|(a, b)| (a - b).abs()).sum();
    l1 * (l1 - 1) / 2 + v.iter().sum::<i64>()
}

/// `(-1)^msign(v, u)`
pub fn msign_value(v: &[i64], u: &[i64]) -> i64 {
    if msign(v, u).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Merge and split on a pair of labels, `true` meaning `v₊`.
/// Returns the images as `(first, second)` label pairs or the single label.
pub fn merge_label(a: bool, b: bool) -> Option<bool> {
    match (a, b) {
        (true, true) => Some(true),
        (true, false) | (false, true) => Some(false),
        (false, false) => None,
    }
}

pub fn split_label(a: bool) -> &'static [(bool, bool)] {
    if a {
        &[(true, false), (false, true)]
    } else {
        &[(false, false)]
    }
}

impl KhovanovComplex {
    /// Unreduced complex. Pseudo-diagram vertices must verify unless
    /// `opts.trust_pseudo`.
    pub fn assemble(d: &PlanarDiagram, opts: CubeOptions) -> Result<Self> {
        Self::build(GradedCube::build(d, opts)?, false)
    }

    /// Reduced complex: the subcomplex where the circle through the basepoint
    /// arc carries `v₋`. The basepoint defaults to the smallest arc label.
    pub fn reduced_assemble(d: &PlanarDiagram, opts: CubeOptions) -> Result<Self> {
        Self::build(GradedCube::build(d, opts)?, true)
    }

    pub fn from_cube(cube: GradedCube, reduced: bool) -> Result<Self> {
        Self::build(cube, reduced)
    }

    fn build(cube: GradedCube, reduced: bool) -> Result<Self> {
        let d = cube.diagram();
        let base_arc = if reduced {
            match d.basepoint() {
                Some(l) if d.crossing_count() > 0 => Some(d.arc_index(l).expect("validated basepoint")),
                _ => d.arc_labels().first().map(|_| 0),
            }
        } else {
            None
        };
        let info: Vec<VertexInfo> = cube
            .vertices()
            .iter()
            .map(|v| {
                let (h, q_off) = cube.offsets(v.mask);
                let base = reduced.then(|| base_arc.map_or(0, |a| v.state.circle_of_arc_index(a)));
                VertexInfo { circles: v.circles(), base, h, q_off }
            })
            .collect();
        if let Some(p) = info.iter().map(|i| i.circles).max() {
            if p > 62 {
                return Err(Error::OutOfDomain(format!("{p} circles in one resolution")));
            }
        }

        let mut out_edges: Vec<Vec<EdgeMap>> = vec![Vec::new(); cube.vertices().len()];
        for e in cube.edges() {
            if e.kind == EdgeKind::NonorientableBand {
                continue;
            }
            let hv = info[e.from as usize].h;
            let hu = info[e.to as usize].h;
            if hu != hv + 1 {
                return Err(Error::Internal(format!("edge raises h by {}", hu - hv)));
            }
            out_edges[e.from as usize].push(edge_map(&cube, e.from, e.to, e.bit, e.kind));
        }
        Ok(KhovanovComplex { cube, reduced, info, out_edges })
    }

    pub fn cube(&self) -> &GradedCube {
        &self.cube
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Number of labels free to vary at a vertex.
    fn free_circles(&self, v: usize) -> usize {
        self.info[v].circles - usize::from(self.reduced)
    }

    /// Number of `v₊` labels a generator at `v` needs to sit in degree `q`.
    fn plus_count(&self, v: usize, q: i64) -> Option<usize> {
        let i = &self.info[v];
        let twice = q - i.q_off + i.circles as i64;
        if twice.rem_euclid(2) != 0 {
            return None;
        }
        let k = twice / 2;
        (0..=self.free_circles(v) as i64).contains(&k).then_some(k as usize)
    }

    pub fn generator_count(&self) -> usize {
        (0..self.info.len()).map(|v| 1usize << self.free_circles(v)).sum()
    }

    /// Quantum degrees carrying generators, ascending.
    pub fn q_degrees(&self) -> Vec<i64> {
        let mut qs = std::collections::BTreeSet::new();
        for (v, i) in self.info.iter().enumerate() {
            for k in 0..=self.free_circles(v) as i64 {
                qs.insert(i.q_off + 2 * k - i.circles as i64);
            }
        }
        qs.into_iter().collect()
    }

    /// Expands a free-label mask to a full labeling (basepoint bit cleared).
    fn expand(&self, v: usize, free: u64) -> u64 {
        match self.info[v].base {
            Some(b) => {
                let low = free & ((1u64 << b) - 1);
                let high = (free >> b) << (b + 1);
                low | high
            }
            None => free,
        }
    }

    fn compress(&self, v: usize, full: u64) -> u64 {
        match self.info[v].base {
            Some(b) => {
                let low = full & ((1u64 << b) - 1);
                let high = (full >> (b + 1)) << b;
                low | high
            }
            None => full,
        }
    }

    fn colex_rank(&self, mask: u64) -> u64 {
        let mut r = 0;
        let mut m = mask;
        let mut i = 0;
        while m != 0 {
            let pos = m.trailing_zeros() as usize;
            i += 1;
            r += binom()[pos][i];
            m &= m - 1;
        }
        r
    }

    /// The complex in quantum degree `q`.
    pub fn slice(&self, q: i64) -> Result<Slice> {
        let nv = self.info.len();
        let mut offset = vec![usize::MAX; nv];
        let mut total = 0usize;
        for (v, off) in offset.iter_mut().enumerate() {
            if let Some(k) = self.plus_count(v, q) {
                *off = total;
                total += binom()[self.free_circles(v)][k] as usize;
            }
        }
        let mut gens = Vec::with_capacity(total);
        let mut entries = Vec::new();
        for v in 0..nv {
            let Some(k) = self.plus_count(v, q) else { continue };
            let n = self.free_circles(v);
            for free in combinations(n, k) {
                let src = gens.len();
                let labeling = self.expand(v, free);
                gens.push(Generator { vertex: v as u64, labeling, h: self.info[v].h, q });
                for e in &self.out_edges[v] {
                    let u = e.to as usize;
                    for (img, c) in apply_edge(e, labeling) {
                        if let Some(b) = self.info[u].base {
                            if img >> b & 1 == 1 {
                                return Err(Error::Internal("reduced subcomplex not preserved".into()));
                            }
                        }
                        let compressed = self.compress(u, img);
                        let ku = compressed.count_ones() as usize;
                        if self.plus_count(u, q) != Some(ku) || offset[u] == usize::MAX {
                            return Err(Error::Internal(format!(
                                "edge {} -> {} does not preserve q",
                                e.from, e.to
                            )));
                        }
                        let tgt = offset[u] + self.colex_rank(compressed) as usize;
                        entries.push((src, tgt, c * e.sign));
                    }
                }
            }
        }
        debug_assert_eq!(gens.len(), total);
        Ok(Slice { q, gens, entries })
    }

    /// Checks slice by slice that `d` raises `h` by one and squares to zero.
    /// Slices already fix `q`.
    pub fn check_differential(&self) -> Result<()> {
        let results = par::map_vec(self.q_degrees(), |q| -> Result<()> {
            let s = self.slice(q)?;
            if let Some(&(a, b, _)) = s.entries.iter().find(|&&(a, b, _)| s.gens[b].h != s.gens[a].h + 1) {
                return Err(Error::Internal(format!(
                    "entry from h={} to h={} in q={q}",
                    s.gens[a].h, s.gens[b].h
                )));
            }
            if let Some((row, col)) = s.square_violation() {
                return Err(Error::SignInconsistency { row, col });
            }
            Ok(())
        });
        results.into_iter().collect()
    }

    /// Bigraded homology. Over `Q` only free ranks are kept.
    pub fn homology(&self, coeffs: Coeffs) -> Result<HomologyTable> {
        let results = par::map_vec(self.q_degrees(), |q| -> Result<(i64, BTreeMap<i64, _>)> {
            let s = self.slice(q)?;
            let by_h = graded_homology(&s.degrees(), &s.big_entries())?;
            Ok((q, by_h))
        });
        let mut table = HomologyTable::default();
        for r in results {
            let (q, by_h) = r?;
            for (h, mut g) in by_h {
                if coeffs == Coeffs::Q {
                    g.torsion.clear();
                }
                table.insert(h, q, g);
            }
        }
        Ok(table)
    }

    /// The whole complex as one matrix. Meant for small inputs.
    pub fn to_bigraded(&self) -> Result<(Vec<Generator>, BigradedComplex)> {
        let mut gens = Vec::new();
        let mut triples = Vec::new();
        for q in self.q_degrees() {
            let s = self.slice(q)?;
            let base = gens.len();
            triples.extend(s.entries.iter().map(|&(a, b, c)| (base + a, base + b, c)));
            gens.extend(s.gens);
        }
        let mut d = SparseIntMatrix::new(gens.len(), gens.len());
        for (s, t, c) in triples {
            d.add_to(t, s, &BigInt::from(c));
        }
        let bigraded = BigradedComplex::new(gens.iter().map(|g| (g.h, g.q)).collect(), d).map_err(|e| match e {
            Error::NotADifferential { row, col, .. } => Error::SignInconsistency { row, col },
            other => other,
        })?;
        Ok((gens, bigraded))
    }
}

fn edge_map(cube: &GradedCube, from: u64, to: u64, bit: usize, kind: EdgeKind) -> EdgeMap {
    let d = cube.diagram();
    let sv = &cube.vertex(from).state;
    let su = &cube.vertex(to).state;
    let x = d.n_indices()[bit];
    let arc = |k: usize| d.pos_arc()[4 * x + k];
    let cv = sv.circle_of_arc_indices();
    let cu = su.circle_of_arc_indices();
    let (a, b, c) = match kind {
        // in v (1-smoothing) slots a,b lie on different circles that meet in u
        EdgeKind::Merge => (cv[arc(0)], cv[arc(1)], cu[arc(0)]),
        // in u (0-smoothing) the circle through a,b and the one through c,d
        EdgeKind::Split => (cv[arc(0)], cu[arc(0)], cu[arc(2)]),
        EdgeKind::NonorientableBand => unreachable!("nonorientable edges carry no map"),
    };
    let extra = d.extra_circles();
    let traced_v = sv.circle_count() - extra;
    let traced_u = su.circle_count() - extra;
    let mut rep = vec![usize::MAX; traced_v];
    for (arc_i, &ci) in cv.iter().enumerate() {
        if rep[ci] == usize::MAX {
            rep[ci] = arc_i;
        }
    }
    let mut carry = Vec::with_capacity(sv.circle_count());
    for (ci, &r) in rep.iter().enumerate() {
        let touched = match kind {
            EdgeKind::Merge => ci == a || ci == b,
            _ => ci == a,
        };
        if !touched {
            carry.push((ci, cu[r]));
        }
    }
    for k in 0..extra {
        carry.push((traced_v + k, traced_u + k));
    }
    EdgeMap { from, to, sign: edge_sign(from, bit), kind, carry, a, b, c }
}

/// Images of a labeling under one edge map; every coefficient is 1.
fn apply_edge(e: &EdgeMap, labeling: u64) -> impl Iterator<Item = (u64, i64)> {
    let mut base = 0u64;
    for &(s, t) in &e.carry {
        if labeling >> s & 1 == 1 {
            base |= 1 << t;
        }
    }
    let on = |i: usize| labeling >> i & 1 == 1;
    let mut out = [0u64; 2];
    let n = match e.kind {
        EdgeKind::Merge => match merge_label(on(e.a), on(e.b)) {
            Some(x) => {
                out[0] = base | (x as u64) << e.c;
                1
            }
            None => 0,
        },
        EdgeKind::Split => {
            let images = split_label(on(e.a));
            for (slot, &(x, y)) in out.iter_mut().zip(images) {
                *slot = base | (x as u64) << e.b | (y as u64) << e.c;
            }
            images.len()
        }
        EdgeKind::NonorientableBand => 0,
    };
    out.into_iter().take(n).map(|m| (m, 1))
}

/// Binomial table up to 64, shared by every complex.
fn binom() -> &'static [Vec<u64>] {
    static TABLE: std::sync::OnceLock<Vec<Vec<u64>>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| binomials(64))
}

fn binomials(n: usize) -> Vec<Vec<u64>> {
    let mut b = vec![vec![0u64; n + 2]; n + 1];
    for i in 0..=n {
        b[i][0] = 1;
        for j in 1..=i {
            b[i][j] = b[i - 1][j - 1] + if j < i { b[i - 1][j] } else { 0 };
        }
    }
    b
}

/// All `n`-bit masks with `k` bits set, in increasing order.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut cur = Some(first);
    std::iter::from_fn(move || {
        let c = cur?;
        if c >= limit && !(k == 0 && c == 0) {
            return None;
        }
        cur = if c == 0 {
            None
        } else {
            // Gosper's hack
            let lowest = c & c.wrapping_neg();
            let ripple = c + lowest;
            let next = (((ripple ^ c) >> 2) / lowest) | ripple;
            (next < limit).then_some(next)
        };
        Some(c)
    })
}

/// Homology tables of two diagrams, side by side.
#[derive(Clone, Debug, Serialize)]
pub struct ReidemeisterReport {
    pub equal: bool,
    pub first_difference: Option<(i64, i64)>,
    pub left: HomologyTable,
    pub right: HomologyTable,
}

pub fn reidemeister_compare(d1: &PlanarDiagram, d2: &PlanarDiagram) -> Result<ReidemeisterReport> {
    let left = KhovanovComplex::assemble(d1, CubeOptions::default())?.homology(Coeffs::Z)?;
    let right = KhovanovComplex::assemble(d2, CubeOptions::default())?.homology(Coeffs::Z)?;
    let first_difference = left.first_difference(&right);
    Ok(ReidemeisterReport { equal: first_difference.is_none(), first_difference, left, right })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::HomologyGroup;
    use crate::diagram::parse_pd;

    fn kh(text: &str, reduced: bool) -> HomologyTable {
        let d = parse_pd(text).unwrap();
        let c = if reduced {
            KhovanovComplex::reduced_assemble(&d, CubeOptions::default()).unwrap()
        } else {
            KhovanovComplex::assemble(&d, CubeOptions::default()).unwrap()
        };
        c.check_differential().unwrap();
        c.homology(Coeffs::Z).unwrap()
    }

    fn free(n: usize) -> HomologyGroup {
        HomologyGroup { free_rank: n, torsion: vec![] }
    }

    #[test]
    fn combinations_enumerate_in_colex_order() {
        let all: Vec<u64> = combinations(4, 2).collect();
        assert_eq!(all, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(combinations(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(combinations(0, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(combinations(2, 3).count(), 0);
    }

    #[test]
    fn signs() {
        assert_eq!(edge_sign(0b001, 0), 1);
        assert_eq!(edge_sign(0b011, 1), -1);
        assert_eq!(edge_sign(0b111, 2), 1);
        assert_eq!(msign_value(&[1], &[0]), -1);
        assert_eq!(msign_value(&[1, 1], &[0, 0]), -1);
        assert_eq!(msign(&[0, 0], &[-1, 1]), 1);
    }

    #[test]
    fn frobenius_maps() {
        assert_eq!(merge_label(true, true), Some(true));
        assert_eq!(merge_label(false, true), Some(false));
        assert_eq!(merge_label(false, false), None);
        assert_eq!(split_label(false), [(false, false)]);
        assert_eq!(split_label(true).len(), 2);
    }

    #[test]
    fn unknot() {
        let h = kh("PD[] circles=1", false);
        assert_eq!(h.ranks(), BTreeMap::from([((0, -1), 1), ((0, 1), 1)]));
        let r = kh("PD[] circles=1", true);
        assert_eq!(r.ranks(), BTreeMap::from([((0, -1), 1)]));
    }

    #[test]
    fn kinks_do_not_change_homology() {
        let plain = kh("PD[] circles=1", false);
        assert_eq!(kh("PD[X(1,1,2,2)]", false), plain);
        assert_eq!(kh("PD[X(1,2,2,1)]", false), plain);
    }

    #[test]
    fn trefoil_has_torsion() {
        // left-handed trefoil; the cube computes the right-handed homology
        let h = kh("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]", false);
        assert_eq!(h.total_rank(), 4);
        assert_eq!(h.get(0, 1), Some(&free(1)));
        assert_eq!(h.get(0, 3), Some(&free(1)));
        assert_eq!(h.get(2, 5), Some(&free(1)));
        assert_eq!(h.get(3, 9), Some(&free(1)));
        assert_eq!(h.get(3, 7).unwrap().torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn reduced_trefoil() {
        let r = kh("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]", true);
        assert_eq!(r.ranks(), BTreeMap::from([((0, 1), 1), ((2, 5), 1), ((3, 7), 1)]));
        assert!(r.iter().all(|(_, g)| g.torsion.is_empty()));
    }

    #[test]
    fn pseudo_diagram_edges_carry_no_map() {
        let d = parse_pd("PD[X(4,2,3,1),X(3,2,4,1)] N=[2]").unwrap();
        let c = KhovanovComplex::assemble(&d, CubeOptions::default()).unwrap();
        let (gens, b) = c.to_bigraded().unwrap();
        assert_eq!(gens.len(), 4);
        assert!(b.differential().is_zero());
    }

    #[test]
    fn hopf_link() {
        let h = kh("PD[X(4,2,3,1),X(2,4,1,3)]", false);
        assert_eq!(h.total_rank(), 4);
    }
}
