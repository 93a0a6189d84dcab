//! Classical invariants and the rank bookkeeping built on them.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::chain::LaurentPoly;
use crate::diagram::PlanarDiagram;
use crate::error::{Error, Result};

/// Symmetrised Alexander polynomial of a knot, from Fox calculus on the
/// Wirtinger presentation. Normalised so `Δ(T) = Δ(T⁻¹)` and the leading
/// coefficient is positive.
pub fn alexander(d: &PlanarDiagram) -> Result<LaurentPoly> {
    if d.component_count() != 1 {
        return Err(Error::MultiComponent(d.component_count()));
    }
    let n = d.crossing_count();
    if n == 0 {
        return Ok(LaurentPoly::one());
    }
    // over-strands: slots 1 and 3 of a crossing lie on the same one
    let labels = d.arc_labels();
    let mut parent: Vec<usize> = (0..labels.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let idx = |l: i64| d.arc_index(l).expect("arc of this diagram");
    for c in d.crossings() {
        let (b, dd) = (find(&mut parent, idx(c.arcs[1])), find(&mut parent, idx(c.arcs[3])));
        parent[b] = dd;
    }
    let mut gen_of_root = BTreeMap::new();
    let mut gen = vec![0; labels.len()];
    for a in 0..labels.len() {
        let r = find(&mut parent, a);
        let next = gen_of_root.len();
        gen[a] = *gen_of_root.entry(r).or_insert(next);
    }
    if gen_of_root.len() != n {
        return Err(Error::Internal(format!("{} over-strands for {n} crossings", gen_of_root.len())));
    }
    let t = LaurentPoly::monomial(1, 1);
    let one = LaurentPoly::one();
    let mut m = vec![vec![LaurentPoly::zero(); n]; n];
    for (row, c) in d.crossings().iter().enumerate() {
        let (i, k, j) = (gen[idx(c.arcs[0])], gen[idx(c.arcs[1])], gen[idx(c.arcs[2])]);
        // relation x_j = x_k^ε x_i x_k^-ε, abelianised (times t when ε = -1)
        let (ck, ci, cj) = if d.sign(row) > 0 {
            (one.sub(&t), t.clone(), one.neg())
        } else {
            (t.sub(&one), one.clone(), t.neg())
        };
        m[row][k] = m[row][k].add(&ck);
        m[row][i] = m[row][i].add(&ci);
        m[row][j] = m[row][j].add(&cj);
    }
    m.pop();
    for r in &mut m {
        r.pop();
    }
    let det = bareiss(m)?;
    normalise(det)
}

fn normalise(p: LaurentPoly) -> Result<LaurentPoly> {
    let (Some(lo), Some(hi)) = (p.min_degree(), p.max_degree()) else {
        return Ok(p);
    };
    if (lo + hi) % 2 != 0 {
        return Err(Error::Internal("Alexander polynomial has odd span".into()));
    }
    let p = p.shift(-(lo + hi) / 2);
    Ok(if p.leading().is_negative() { p.neg() } else { p })
}

/// Determinant by fraction-free elimination.
fn bareiss(mut m: Vec<Vec<LaurentPoly>>) -> Result<LaurentPoly> {
    let n = m.len();
    let mut sign = false;
    let mut prev = LaurentPoly::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(LaurentPoly::zero());
            };
            m.swap(k, s);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = div_exact(&num, &prev)?;
            }
            m[i][k] = LaurentPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = if n == 0 { LaurentPoly::one() } else { m[n - 1][n - 1].clone() };
    Ok(if sign { det.neg() } else { det })
}

fn div_exact(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly> {
    let bad = || Error::Internal("inexact polynomial division".into());
    let (Some(bhi), Some(blo)) = (b.max_degree(), b.min_degree()) else {
        return Err(bad());
    };
    let lead = b.leading();
    let mut rem = a.clone();
    let mut q = LaurentPoly::zero();
    while let Some(rhi) = rem.max_degree() {
        if rhi - bhi < rem.min_degree().unwrap() - blo {
            return Err(bad());
        }
        let c = rem.leading();
        if !(&c % &lead).is_zero() {
            return Err(bad());
        }
        let term = LaurentPoly::monomial(&c / &lead, rhi - bhi);
        rem = rem.sub(&term.mul(b));
        q = q.add(&term);
    }
    Ok(q)
}

/// Sum of absolute values of the coefficients.
pub fn rank_lower_bound(delta: &LaurentPoly) -> usize {
    delta.abs_coeff_sum().to_usize().expect("bound fits in usize")
}

/// Ranks bucketed by `(j - i - 1) mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Mod4Table {
    pub betti: [usize; 4],
}

impl Mod4Table {
    pub fn total(&self) -> usize {
        self.betti.iter().sum()
    }
}

pub fn mod4_class(i: i64, j: i64) -> usize {
    (j - i - 1).rem_euclid(4) as usize
}

pub fn mod4_betti(ranks: &BTreeMap<(i64, i64), usize>) -> Mod4Table {
    let mut betti = [0; 4];
    for (&(i, j), &r) in ranks {
        betti[mod4_class(i, j)] += r;
    }
    Mod4Table { betti }
}

/// Mod-4 Betti numbers `2, 1, 2, 2` expected for the instanton homology of
/// `T(4,5)` from its eigenvalue decomposition.
pub const T45_INSTANTON_MOD4: [usize; 4] = [2, 1, 2, 2];

/// Which filtration the spectral sequence comes from; it fixes the extra
/// monotonicity a differential must have.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FiltrationMode {
    /// `Δi ≥ 1`
    H,
    /// `Δj ≥ 1`
    Q,
}

/// A rank-`rank` differential from one row `j - i = const` to another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlacedDifferential {
    pub source_row: i64,
    pub target_row: i64,
    /// Bigradings `(i, j)` of the source row with an admissible partner.
    pub source: Vec<(i64, i64)>,
    pub target: Vec<(i64, i64)>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Placement {
    pub differentials: Vec<PlacedDifferential>,
    pub result_mod4: Mod4Table,
}

#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityReport {
    pub total_rank: usize,
    pub target_rank: usize,
    pub mode: FiltrationMode,
    /// Mod-4 table the placements were required to reach, if any.
    pub required_mod4: Option<[usize; 4]>,
    pub placements: Vec<Placement>,
    pub annotations: Vec<String>,
}

/// All ways of placing spectral-sequence differentials on `ranks` (keyed by
/// `(i, j)`) that leave total rank `target`. A differential changes the mod-4
/// grading by -1, has `Δj - Δi ≥ -1` and moves forward in the filtration.
/// With `required_mod4`, the surviving ranks must have that mod-4 table.
pub fn differential_feasibility(
    ranks: &BTreeMap<(i64, i64), usize>,
    target: usize,
    mode: FiltrationMode,
    required_mod4: Option<[usize; 4]>,
) -> Result<FeasibilityReport> {
    let total: usize = ranks.values().sum();
    if target > total || !(total - target).is_multiple_of(2) {
        return Err(Error::InfeasibleParity { total, target });
    }
    let kills = (total - target) / 2;

    let mut rows: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for (&(i, j), &r) in ranks {
        if r > 0 {
            rows.entry(j - i).or_default().push((i, j));
        }
    }
    let row_rank = |row: i64| -> usize { rows[&row].iter().map(|k| ranks[k]).sum() };

    let mut candidates = Vec::new();
    for (&s, spts) in &rows {
        for (&t, tpts) in &rows {
            let delta = t - s;
            if delta < -1 || (delta + 1).rem_euclid(4) != 0 {
                continue;
            }
            let ok = |a: &(i64, i64), b: &(i64, i64)| match mode {
                FiltrationMode::H => b.0 - a.0 >= 1,
                FiltrationMode::Q => b.1 - a.1 >= 1,
            };
            let source: Vec<_> = spts.iter().filter(|a| tpts.iter().any(|b| ok(a, b))).copied().collect();
            let target: Vec<_> = tpts.iter().filter(|b| spts.iter().any(|a| ok(a, b))).copied().collect();
            if !source.is_empty() {
                let cap = source.iter().map(|k| ranks[k]).sum::<usize>().min(target.iter().map(|k| ranks[k]).sum());
                candidates.push((s, t, source, target, cap));
            }
        }
    }

    let base = mod4_betti(ranks);
    let mut placements = Vec::new();
    let mut used: BTreeMap<i64, usize> = BTreeMap::new();
    let mut chosen = vec![0usize; candidates.len()];
    search(0, kills, &candidates, &mut chosen, &mut used, &row_rank, &mut |chosen| {
        let mut m = base.betti;
        let mut differentials = Vec::new();
        for (c, &k) in candidates.iter().zip(chosen) {
            if k > 0 {
                m[mod4_class(0, c.0)] -= k;
                m[mod4_class(0, c.1)] -= k;
                differentials.push(PlacedDifferential {
                    source_row: c.0,
                    target_row: c.1,
                    source: c.2.clone(),
                    target: c.3.clone(),
                    rank: k,
                });
            }
        }
        if required_mod4.is_none_or(|want| want == m) {
            placements.push(Placement { differentials, result_mod4: Mod4Table { betti: m } });
        }
    });

    let mut annotations = Vec::new();
    if required_mod4 == Some(T45_INSTANTON_MOD4) {
        annotations.push("required mod-4 table 2,1,2,2: instanton homology of T(4,5) (paper-sourced)".to_string());
    }
    Ok(FeasibilityReport { total_rank: total, target_rank: target, mode, required_mod4, placements, annotations })
}

type Candidate = (i64, i64, Vec<(i64, i64)>, Vec<(i64, i64)>, usize);

fn search(
    at: usize,
    left: usize,
    cands: &[Candidate],
    chosen: &mut Vec<usize>,
    used: &mut BTreeMap<i64, usize>,
    row_rank: &dyn Fn(i64) -> usize,
    emit: &mut dyn FnMut(&[usize]),
) {
    if left == 0 {
        emit(chosen);
        return;
    }
    if at == cands.len() {
        return;
    }
    search(at + 1, left, cands, chosen, used, row_rank, emit);
    let (s, t, _, _, cap) = &cands[at];
    for k in 1..=left.min(*cap) {
        let us = used.get(s).copied().unwrap_or(0) + k;
        let ut = used.get(t).copied().unwrap_or(0) + k;
        let fits = if s == t { us + k <= row_rank(*s) } else { us <= row_rank(*s) && ut <= row_rank(*t) };
        if !fits {
            break;
        }
        *used.entry(*s).or_default() += k;
        *used.entry(*t).or_default() += k;
        chosen[at] = k;
        search(at + 1, left - k, cands, chosen, used, row_rank, emit);
        chosen[at] = 0;
        *used.get_mut(s).unwrap() -= k;
        *used.get_mut(t).unwrap() -= k;
    }
}

/// Distinct `j - i` rows of a table, for reporting.
pub fn rows(ranks: &BTreeMap<(i64, i64), usize>) -> BTreeSet<i64> {
    ranks.iter().filter(|(_, &r)| r > 0).map(|(&(i, j), _)| j - i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{braid_closure, parse_pd};

    fn t45_table() -> BTreeMap<(i64, i64), usize> {
        [(0, 11), (2, 13), (4, 13), (6, 13), (3, 14), (8, 15), (5, 16), (7, 16), (9, 16)]
            .iter()
            .map(|&(i, r)| ((i, i + r), 1))
            .collect()
    }

    #[test]
    fn alexander_small_knots() {
        let unknot = parse_pd("PD[] circles=1").unwrap();
        assert_eq!(alexander(&unknot).unwrap(), LaurentPoly::one());
        let kink = parse_pd("PD[X(1,1,2,2)]").unwrap();
        assert_eq!(alexander(&kink).unwrap(), LaurentPoly::one());
        let trefoil = parse_pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]").unwrap();
        assert_eq!(alexander(&trefoil).unwrap(), LaurentPoly::from_terms(&[(1, 1), (-1, 0), (1, -1)]));
        let eight = parse_pd("PD[X(4,2,5,1),X(8,6,1,5),X(6,3,7,4),X(2,7,3,8)]").unwrap();
        assert_eq!(alexander(&eight).unwrap(), LaurentPoly::from_terms(&[(1, 1), (-3, 0), (1, -1)]));
        let hopf = parse_pd("PD[X(4,2,3,1),X(2,4,1,3)]").unwrap();
        assert!(matches!(alexander(&hopf), Err(Error::MultiComponent(2))));
    }

    #[test]
    fn alexander_torus_knot() {
        let w: Vec<i32> = (0..5).flat_map(|_| [1, 2, 3]).collect();
        let d = braid_closure(4, &w).unwrap();
        let want = LaurentPoly::from_terms(&[(1, 6), (-1, 5), (1, 2), (-1, 0), (1, -2), (-1, -5), (1, -6)]);
        assert_eq!(alexander(&d).unwrap(), want);
        assert_eq!(alexander(&d.mirror().unwrap()).unwrap(), want);
        assert_eq!(rank_lower_bound(&want), 7);
    }

    #[test]
    fn mod4_table_of_t45() {
        assert_eq!(mod4_betti(&t45_table()).betti, [3, 1, 2, 3]);
    }

    #[test]
    fn feasibility_trivial_cases() {
        let unknot = BTreeMap::from([((0, 0), 1)]);
        let r = differential_feasibility(&unknot, 1, FiltrationMode::H, None).unwrap();
        assert_eq!(r.placements.len(), 1);
        assert!(r.placements[0].differentials.is_empty());
        let r = differential_feasibility(&t45_table(), 9, FiltrationMode::H, None).unwrap();
        assert_eq!(r.placements.len(), 1);
        assert!(matches!(
            differential_feasibility(&t45_table(), 8, FiltrationMode::H, None),
            Err(Error::InfeasibleParity { total: 9, target: 8 })
        ));
    }

    #[test]
    fn feasibility_of_t45_at_seven() {
        let free = differential_feasibility(&t45_table(), 7, FiltrationMode::H, None).unwrap();
        let rows: BTreeSet<(i64, i64)> =
            free.placements.iter().map(|p| (p.differentials[0].source_row, p.differentials[0].target_row)).collect();
        assert_eq!(rows, BTreeSet::from([(11, 14), (13, 16), (14, 13), (16, 15)]));

        let r = differential_feasibility(&t45_table(), 7, FiltrationMode::H, Some(T45_INSTANTON_MOD4)).unwrap();
        assert_eq!(r.placements.len(), 1);
        let p = &r.placements[0];
        assert_eq!(p.differentials.len(), 1);
        let d = &p.differentials[0];
        assert_eq!((d.source_row, d.target_row, d.rank), (13, 16, 1));
        assert_eq!(d.source, vec![(2, 15), (4, 17), (6, 19)]);
        assert_eq!(d.target, vec![(5, 21), (7, 23), (9, 25)]);
    }
}
