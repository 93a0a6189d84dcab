use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use super::reduce::{Coeff, Overflow, Reducer};
use super::{smith_normal_form, SparseIntMatrix};
use crate::error::{Error, Result};
use crate::par;

/// One homology group: `Z^free_rank ⊕ ⊕ Z/t` over the invariant factors `t`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub free_rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    #[serde(serialize_with = "big_strings")]
    pub torsion: Vec<BigInt>,
}

fn big_strings<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_string()))
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Torsion split into prime-power cyclic factors, sorted.
    pub fn primary_torsion(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        for t in &self.torsion {
            let mut n = t.clone();
            let mut p = BigInt::from(2);
            while &p * &p <= n {
                let mut pk = BigInt::from(1);
                while Zero::is_zero(&(&n % &p)) {
                    n /= &p;
                    pk *= &p;
                }
                if pk > BigInt::from(1) {
                    out.push(pk);
                }
                p += 1;
            }
            if n > BigInt::from(1) {
                out.push(n);
            }
        }
        out.sort();
        out
    }

    /// Rank after tensoring with the rationals.
    pub fn rank_q(&self) -> usize {
        self.free_rank
    }
}

/// Homology by bigrading `(h, q)`; only nonzero groups are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomologyTable {
    groups: BTreeMap<(i64, i64), HomologyGroup>,
}

impl HomologyTable {
    pub fn insert(&mut self, h: i64, q: i64, g: HomologyGroup) {
        if !g.is_zero() {
            self.groups.insert((h, q), g);
        }
    }

    pub fn get(&self, h: i64, q: i64) -> Option<&HomologyGroup> {
        self.groups.get(&(h, q))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), &HomologyGroup)> {
        self.groups.iter().map(|(&k, g)| (k, g))
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Total rank over the rationals.
    pub fn total_rank(&self) -> usize {
        self.groups.values().map(|g| g.free_rank).sum()
    }

    /// Rational ranks by bigrading, zeros omitted.
    pub fn ranks(&self) -> BTreeMap<(i64, i64), usize> {
        self.groups.iter().filter(|(_, g)| g.free_rank > 0).map(|(&k, g)| (k, g.free_rank)).collect()
    }

    /// `Σ (-1)^h rank` per quantum degree.
    pub fn euler_by_q(&self) -> BTreeMap<i64, i64> {
        let mut e: BTreeMap<i64, i64> = BTreeMap::new();
        for (&(h, q), g) in &self.groups {
            *e.entry(q).or_default() += if h.rem_euclid(2) == 0 { 1 } else { -1 } * g.free_rank as i64;
        }
        e.retain(|_, v| *v != 0);
        e
    }

    /// First bigrading (in order) where the two tables differ.
    pub fn first_difference(&self, other: &Self) -> Option<(i64, i64)> {
        let mut keys: Vec<(i64, i64)> = self.groups.keys().chain(other.groups.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().find(|k| self.groups.get(k) != other.groups.get(k))
    }
}

impl Serialize for HomologyTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            h: i64,
            q: i64,
            free_rank: usize,
            #[serde(serialize_with = "big_strings")]
            torsion: &'a [BigInt],
        }
        s.collect_seq(self.groups.iter().map(|(&(h, q), g)| Row { h, q, free_rank: g.free_rank, torsion: &g.torsion }))
    }
}

/// Homology of a cochain complex whose differential raises `deg` by exactly
/// one. `entries` are `(source, target, coeff)`.
pub fn graded_homology(deg: &[i64], entries: &[(usize, usize, BigInt)]) -> Result<BTreeMap<i64, HomologyGroup>> {
    for &(s, t, _) in entries {
        if deg[t] != deg[s] + 1 {
            return Err(Error::OrderViolation(format!(
                "differential entry {s} -> {t} changes degree by {}",
                deg[t] - deg[s]
            )));
        }
    }
    let (keep, rest) = match reduce_with::<i64>(deg, entries) {
        Ok(r) => r,
        Err(Overflow) => reduce_with::<BigInt>(deg, entries).expect("wide integers cannot overflow"),
    };
    let kept_deg: Vec<i64> = keep.iter().map(|&g| deg[g]).collect();
    Ok(homology_by_snf(&kept_deg, &rest))
}

fn reduce_with<R: Coeff>(
    deg: &[i64],
    entries: &[(usize, usize, BigInt)],
) -> std::result::Result<(Vec<usize>, Vec<(usize, usize, BigInt)>), Overflow> {
    let mut r: Reducer<R> = Reducer::new(deg.to_vec());
    for (s, t, c) in entries {
        r.add_entry(*s, *t, R::from_big(c).ok_or(Overflow)?)?;
    }
    r.cancel_units(|_, _| true)?;
    Ok(r.remaining())
}

/// Homology straight from Smith normal forms of the degree pieces.
pub(crate) fn homology_by_snf(deg: &[i64], entries: &[(usize, usize, BigInt)]) -> BTreeMap<i64, HomologyGroup> {
    let mut by_deg: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut local = vec![0usize; deg.len()];
    for (g, &h) in deg.iter().enumerate() {
        let v = by_deg.entry(h).or_default();
        local[g] = v.len();
        v.push(g);
    }
    // d_h : C^h -> C^{h+1}, rows indexed by targets
    let mut maps: BTreeMap<i64, SparseIntMatrix> = BTreeMap::new();
    for (&h, gens) in &by_deg {
        let rows = by_deg.get(&(h + 1)).map_or(0, |v| v.len());
        maps.insert(h, SparseIntMatrix::new(rows, gens.len()));
    }
    for (s, t, c) in entries {
        maps.get_mut(&deg[*s]).expect("source degree present").add_to(local[*t], local[*s], c);
    }
    let snfs: BTreeMap<i64, super::Snf> = maps
        .iter()
        .map(|(&h, m)| (h, smith_normal_form(m, false)))
        .collect();
    let mut out = BTreeMap::new();
    for (&h, gens) in &by_deg {
        let out_rank = snfs[&h].rank;
        let (in_rank, torsion) = snfs.get(&(h - 1)).map_or((0, Vec::new()), |s| (s.rank, s.torsion()));
        let g = HomologyGroup { free_rank: gens.len() - out_rank - in_rank, torsion };
        if !g.is_zero() {
            out.insert(h, g);
        }
    }
    out
}

/// First nonzero entry of `d∘d`, as `(target, source, value)`.
pub fn d_squared_violation(n: usize, entries: &[(usize, usize, BigInt)]) -> Option<(usize, usize, BigInt)> {
    let mut out: Vec<Vec<(usize, &BigInt)>> = vec![Vec::new(); n];
    for (s, t, c) in entries {
        out[*s].push((*t, c));
    }
    for s in 0..n {
        let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
        for &(m, a) in &out[s] {
            for &(t, b) in &out[m] {
                *acc.entry(t).or_default() += a * b;
            }
        }
        if let Some((t, v)) = acc.into_iter().find(|(_, v)| !Zero::is_zero(v)) {
            return Some((t, s, v));
        }
    }
    None
}

/// Generators with bigradings `(h, q)` and an integer differential, stored
/// as a square matrix with `d[target, source]`.
#[derive(Clone, Debug)]
pub struct BigradedComplex {
    gens: Vec<(i64, i64)>,
    d: SparseIntMatrix,
}

impl BigradedComplex {
    /// Validates dimensions and `d² = 0`.
    pub fn new(gens: Vec<(i64, i64)>, d: SparseIntMatrix) -> Result<Self> {
        let c = Self::new_unchecked(gens, d)?;
        if let Some((row, col, value)) = d_squared_violation(c.len(), &c.entries()) {
            return Err(Error::NotADifferential { row, col, value: value.to_string() });
        }
        Ok(c)
    }

    pub fn new_unchecked(gens: Vec<(i64, i64)>, d: SparseIntMatrix) -> Result<Self> {
        if d.rows() != gens.len() || d.cols() != gens.len() {
            return Err(Error::Internal(format!(
                "differential is {}x{} for {} generators",
                d.rows(),
                d.cols(),
                gens.len()
            )));
        }
        Ok(BigradedComplex { gens, d })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[(i64, i64)] {
        &self.gens
    }

    pub fn differential(&self) -> &SparseIntMatrix {
        &self.d
    }

    /// `(source, target, coeff)` triples.
    pub fn entries(&self) -> Vec<(usize, usize, BigInt)> {
        self.d.iter().map(|(t, s, v)| (s, t, v.clone())).collect()
    }

    /// The same generators with another differential.
    pub fn with_differential(&self, d: SparseIntMatrix) -> Result<Self> {
        Self::new(self.gens.clone(), d)
    }

    /// Every entry raises `h` by exactly one and preserves `q`.
    pub fn is_bihomogeneous(&self) -> bool {
        self.d.iter().all(|(t, s, _)| {
            self.gens[t].0 == self.gens[s].0 + 1 && self.gens[t].1 == self.gens[s].1
        })
    }

    /// Bigraded homology; requires a bihomogeneous differential of degree (1, 0).
    /// Quantum slices are processed in parallel.
    pub fn homology(&self) -> Result<HomologyTable> {
        if !self.is_bihomogeneous() {
            return Err(Error::OrderViolation(
                "bigraded homology needs a differential of pure bidegree (1,0)".into(),
            ));
        }
        let mut slices: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (g, &(_, q)) in self.gens.iter().enumerate() {
            slices.entry(q).or_default().push(g);
        }
        let mut local = vec![0usize; self.len()];
        for gens in slices.values() {
            for (i, &g) in gens.iter().enumerate() {
                local[g] = i;
            }
        }
        let mut slice_entries: BTreeMap<i64, Vec<(usize, usize, BigInt)>> = BTreeMap::new();
        for (t, s, v) in self.d.iter() {
            slice_entries.entry(self.gens[s].1).or_default().push((local[s], local[t], v.clone()));
        }
        let work: Vec<(i64, Vec<i64>, Vec<(usize, usize, BigInt)>)> = slices
            .iter()
            .map(|(&q, gens)| {
                let deg = gens.iter().map(|&g| self.gens[g].0).collect();
                (q, deg, slice_entries.remove(&q).unwrap_or_default())
            })
            .collect();
        let results = par::map_vec(work, |(q, deg, e)| graded_homology(&deg, &e).map(|m| (q, m)));
        let mut table = HomologyTable::default();
        for r in results {
            let (q, by_h) = r?;
            for (h, g) in by_h {
                table.insert(h, q, g);
            }
        }
        Ok(table)
    }

    /// Homology of the underlying ungraded complex.
    pub fn total_homology(&self) -> HomologyGroup {
        let snf = smith_normal_form(&self.d, false);
        HomologyGroup { free_rank: self.len() - 2 * snf.rank, torsion: snf.torsion() }
    }

    /// `Σ (-1)^h` per quantum degree over the chain groups.
    pub fn euler_by_q(&self) -> BTreeMap<i64, i64> {
        let mut e: BTreeMap<i64, i64> = BTreeMap::new();
        for &(h, q) in &self.gens {
            *e.entry(q).or_default() += if h.rem_euclid(2) == 0 { 1 } else { -1 };
        }
        e.retain(|_, v| *v != 0);
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn zero_differential_gives_chain_groups() {
        let c = BigradedComplex::new(vec![(0, 1), (0, -1), (1, 1)], SparseIntMatrix::new(3, 3)).unwrap();
        let h = c.homology().unwrap();
        assert_eq!(h.total_rank(), 3);
        assert_eq!(h.get(1, 1).unwrap().free_rank, 1);
    }

    #[test]
    fn multiplication_by_two() {
        let mut d = SparseIntMatrix::new(2, 2);
        d.set(1, 0, big(2));
        let c = BigradedComplex::new(vec![(0, 0), (1, 0)], d).unwrap();
        let h = c.homology().unwrap();
        assert!(h.get(0, 0).is_none());
        assert_eq!(h.get(1, 0).unwrap(), &HomologyGroup { free_rank: 0, torsion: vec![big(2)] });
        assert_eq!(c.total_homology(), HomologyGroup { free_rank: 0, torsion: vec![big(2)] });
    }

    #[test]
    fn d_squared_is_checked() {
        let mut d = SparseIntMatrix::new(3, 3);
        d.set(1, 0, big(1));
        d.set(2, 1, big(1));
        let err = BigradedComplex::new(vec![(0, 0), (1, 0), (2, 0)], d).unwrap_err();
        assert!(matches!(err, Error::NotADifferential { row: 2, col: 0, .. }));
    }

    #[test]
    fn reduction_agrees_with_direct_snf() {
        // a small acyclic-plus-torsion complex: Z -(1,2)-> Z^2 -(2,-1)-> Z
        let deg = vec![0, 1, 1, 2];
        let e = vec![(0, 1, big(1)), (0, 2, big(2)), (1, 3, big(2)), (2, 3, big(-1))];
        assert_eq!(graded_homology(&deg, &e).unwrap(), homology_by_snf(&deg, &e));
    }

    #[test]
    fn primary_decomposition() {
        let g = HomologyGroup { free_rank: 0, torsion: vec![big(12)] };
        assert_eq!(g.primary_torsion(), vec![big(3), big(4)]);
    }
}
