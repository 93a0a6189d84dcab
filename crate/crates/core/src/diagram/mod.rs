//! Planar link diagrams in PD notation, marked crossing sets, resolutions.
//!
//! A crossing is written `X(a,b,c,d)`: the four arc labels met when walking
//! counterclockwise around the crossing, starting from the incoming
//! under-strand. Slot 0 (`a`) and slot 2 (`c`) carry the under-strand, slots 1
//! and 3 the over-strand.
//!
//! Smoothing convention, drawn with the under-strand running upwards:
//!
//! ```text
//!        c                 c                  c
//!        |                 |                  |
//!   d ---|--- b       d ---+  +--- b     d ---+   +--- b
//!        |                    |               |   |
//!        a                 a--+               a   +
//!     crossing         0: (a,b)(c,d)      1: (a,d)(b,c)
//! ```
//!
//! The 0-smoothing joins `a` with `b` and `c` with `d`; the 1-smoothing joins
//! `a` with `d` and `b` with `c`. At a positive crossing the 0-smoothing is the
//! orientation-respecting one, at a negative crossing the 1-smoothing is.

mod braid;
mod parse;
mod resolve;
pub mod simplify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use braid::braid_closure;
pub use parse::{parse_json, parse_pd, parse_text};
pub use resolve::{writhe_unlink, ResolvedState, RetainedCrossing};
pub use simplify::{LoopDiagram, UnlinkStatus};

pub type ArcLabel = i64;

/// One crossing of a diagram: arcs in PD order plus membership in `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub arcs: [ArcLabel; 4],
    pub in_n: bool,
}

/// A validated, oriented planar diagram with a marked crossing set `N`.
///
/// Arc adjacency is stored per *position*: position `4*c + k` is slot `k` of
/// crossing `c`. `partner[p]` is the position at the other end of the arc
/// leaving `p`.
#[derive(Clone, Debug)]
pub struct PlanarDiagram {
    crossings: Vec<Crossing>,
    extra_circles: usize,
    basepoint: Option<ArcLabel>,
    labels: Vec<ArcLabel>,
    pos_arc: Vec<usize>,
    partner: Vec<usize>,
    entering: Vec<bool>,
    comp_of_pos: Vec<usize>,
    cycle_components: usize,
    signs: Vec<i8>,
    n_index: Vec<usize>,
}

#[inline]
pub(crate) fn pos(c: usize, k: usize) -> usize {
    4 * c + k
}

impl PlanarDiagram {
    /// Builds a diagram from PD tuples. `n_ids` are 1-based crossing ids; `None`
    /// marks every crossing. `circles` counts crossingless unknotted
    /// components and defaults to 1 for an empty crossing list.
    pub fn new(
        tuples: Vec<[ArcLabel; 4]>,
        n_ids: Option<Vec<usize>>,
        basepoint: Option<ArcLabel>,
        circles: Option<usize>,
    ) -> Result<Self> {
        let mut crossings: Vec<Crossing> = tuples
            .into_iter()
            .map(|arcs| Crossing { arcs, in_n: n_ids.is_none() })
            .collect();
        if let Some(ids) = n_ids {
            for id in ids {
                if id == 0 || id > crossings.len() {
                    return Err(Error::UnknownCrossingId(id));
                }
                crossings[id - 1].in_n = true;
            }
        }
        let extra = match circles {
            Some(k) => k,
            None if crossings.is_empty() => 1,
            None => 0,
        };
        if crossings.is_empty() && extra == 0 {
            return Err(Error::MalformedPd("empty diagram needs circles >= 1".into()));
        }
        Self::build(crossings, extra, basepoint, None)
    }

    fn build(
        crossings: Vec<Crossing>,
        extra_circles: usize,
        basepoint: Option<ArcLabel>,
        entering: Option<Vec<bool>>,
    ) -> Result<Self> {
        let mut counts: BTreeMap<ArcLabel, usize> = BTreeMap::new();
        for x in &crossings {
            for &a in &x.arcs {
                *counts.entry(a).or_default() += 1;
            }
        }
        if let Some((&label, &count)) = counts.iter().find(|(_, &n)| n != 2) {
            return Err(Error::InconsistentArcs { label, count });
        }
        let labels: Vec<ArcLabel> = counts.keys().copied().collect();
        let index: BTreeMap<ArcLabel, usize> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        if let Some(b) = basepoint {
            if !crossings.is_empty() && !index.contains_key(&b) {
                return Err(Error::MalformedPd(format!("basepoint arc {b} does not exist")));
            }
        }

        let npos = 4 * crossings.len();
        let mut pos_arc = vec![0; npos];
        let mut ends: Vec<Vec<usize>> = vec![Vec::with_capacity(2); labels.len()];
        for (c, x) in crossings.iter().enumerate() {
            for k in 0..4 {
                let a = index[&x.arcs[k]];
                pos_arc[pos(c, k)] = a;
                ends[a].push(pos(c, k));
            }
        }
        let mut partner = vec![0; npos];
        for e in &ends {
            partner[e[0]] = e[1];
            partner[e[1]] = e[0];
        }

        let mut d = PlanarDiagram {
            n_index: crossings
                .iter()
                .enumerate()
                .filter(|(_, x)| x.in_n)
                .map(|(i, _)| i)
                .collect(),
            crossings,
            extra_circles,
            basepoint,
            labels,
            pos_arc,
            partner,
            entering: vec![false; npos],
            comp_of_pos: vec![0; npos],
            cycle_components: 0,
            signs: Vec::new(),
        };
        d.orient(entering)?;
        Ok(d)
    }

    /// Traces strands through crossings (slot k continues at slot k+2) and
    /// fixes a direction on each component.
    fn orient(&mut self, given: Option<Vec<bool>>) -> Result<()> {
        let cycles = trace_cycles(&self.partner, |p| p ^ 2);
        self.cycle_components = cycles.len();
        let mut entering = vec![false; self.partner.len()];
        for (ci, cycle) in cycles.iter().enumerate() {
            for &p in cycle {
                self.comp_of_pos[p] = ci;
                self.comp_of_pos[p ^ 2] = ci;
            }
            let forward = match &given {
                Some(g) => g[cycle[0]],
                None => self.default_direction(cycle)?,
            };
            for &p in cycle {
                entering[p] = forward;
                entering[p ^ 2] = !forward;
            }
        }
        for c in 0..self.crossings.len() {
            if !entering[pos(c, 0)] {
                return Err(Error::MalformedPd(format!(
                    "crossing {}: slot a must be the incoming under-strand",
                    c + 1
                )));
            }
        }
        self.entering = entering;
        self.signs = (0..self.crossings.len()).map(|c| self.sign_from(c)).collect();
        Ok(())
    }

    /// Direction of a traced cycle relative to its trace order: `true` keeps
    /// the trace. Under-passes decide it; over-only components follow
    /// increasing arc labels.
    fn default_direction(&self, cycle: &[usize]) -> Result<bool> {
        let mut vote: Option<bool> = None;
        for &p in cycle {
            let k = p % 4;
            if k % 2 == 0 {
                let keep = k == 0;
                match vote {
                    None => vote = Some(keep),
                    Some(v) if v != keep => {
                        return Err(Error::MalformedPd(
                            "under-strand directions disagree along a component".into(),
                        ))
                    }
                    _ => {}
                }
            }
        }
        if let Some(v) = vote {
            return Ok(v);
        }
        let mut comp_labels: Vec<ArcLabel> =
            cycle.iter().map(|&p| self.labels[self.pos_arc[p]]).collect();
        comp_labels.sort_unstable();
        if comp_labels.len() <= 2 {
            // Successor is ambiguous: the smallest arc enters at its lower position.
            let p = *cycle.iter().min_by_key(|&&p| self.labels[self.pos_arc[p]]).unwrap();
            return Ok(p < self.partner[p]);
        }
        let first = cycle[0];
        let l_in = self.labels[self.pos_arc[first]];
        let l_out = self.labels[self.pos_arc[first ^ 2]];
        let i = comp_labels.binary_search(&l_in).unwrap_or(0);
        let succ = comp_labels[(i + 1) % comp_labels.len()];
        Ok(succ == l_out)
    }

    fn sign_from(&self, c: usize) -> i8 {
        let under = if self.entering[pos(c, 0)] { 1 } else { -1 };
        let over = if self.entering[pos(c, 3)] { 1 } else { -1 };
        under * over
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Crossingless unknotted components carried explicitly.
    pub fn extra_circles(&self) -> usize {
        self.extra_circles
    }

    pub fn basepoint(&self) -> Option<ArcLabel> {
        self.basepoint
    }

    pub fn arc_labels(&self) -> &[ArcLabel] {
        &self.labels
    }

    pub fn arc_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of link components, including explicit free circles.
    pub fn component_count(&self) -> usize {
        self.cycle_components + self.extra_circles
    }

    /// Component id of every arc label, in label order.
    pub fn arc_components(&self) -> Vec<(ArcLabel, usize)> {
        let mut out = vec![(0, 0); self.labels.len()];
        for p in 0..self.partner.len() {
            let a = self.pos_arc[p];
            out[a] = (self.labels[a], self.comp_of_pos[p]);
        }
        out
    }

    /// Indices (0-based, input order) of the crossings in `N`.
    pub fn n_indices(&self) -> &[usize] {
        &self.n_index
    }

    pub fn n_size(&self) -> usize {
        self.n_index.len()
    }

    pub fn sign(&self, c: usize) -> i8 {
        self.signs[c]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn writhe(&self) -> i64 {
        self.signs.iter().map(|&s| s as i64).sum()
    }

    /// `(n_plus, n_minus)` counted over the crossings of `N`.
    pub fn n_signs(&self) -> (usize, usize) {
        let plus = self.n_index.iter().filter(|&&c| self.signs[c] > 0).count();
        (plus, self.n_index.len() - plus)
    }

    /// The oriented resolution: 0 at positive crossings, 1 at negative ones,
    /// as a vector over `N`.
    pub fn oriented_resolution(&self) -> Vec<u8> {
        self.n_index.iter().map(|&c| u8::from(self.signs[c] < 0)).collect()
    }

    /// Whether slot `k` of crossing `c` is where the oriented strand enters.
    pub fn is_entering(&self, c: usize, k: usize) -> bool {
        self.entering[pos(c, k)]
    }

    pub(crate) fn partner(&self) -> &[usize] {
        &self.partner
    }

    pub(crate) fn pos_arc(&self) -> &[usize] {
        &self.pos_arc
    }

    /// Total genus of the surfaces on which the crossing graph embeds with
    /// the given cyclic orders; zero exactly when the code is planar.
    pub fn genus(&self) -> usize {
        let n = self.partner.len();
        let rot = |p: usize| 4 * (p / 4) + (p % 4 + 1) % 4;
        let mut comp: Vec<usize> = (0..self.crossings.len()).collect();
        fn find(c: &mut [usize], mut x: usize) -> usize {
            while c[x] != x {
                c[x] = c[c[x]];
                x = c[x];
            }
            x
        }
        for p in 0..n {
            let (a, b) = (find(&mut comp, p / 4), find(&mut comp, self.partner[p] / 4));
            comp[a] = b;
        }
        // per component: V - E + F = 2 - 2g with E = 2V
        let mut faces = BTreeMap::<usize, i64>::new();
        let mut verts = BTreeMap::<usize, i64>::new();
        for c in 0..self.crossings.len() {
            *verts.entry(find(&mut comp, c)).or_default() += 1;
        }
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = rot(self.partner[p]);
            }
            *faces.entry(find(&mut comp, start / 4)).or_default() += 1;
        }
        verts.iter().map(|(r, &v)| ((2 + v - faces[r]) / 2) as usize).sum()
    }

    /// Dense index of an arc label.
    pub fn arc_index(&self, label: ArcLabel) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// Same diagram with `N` replaced by the given 1-based crossing ids.
    pub fn with_n(&self, ids: &[usize]) -> Result<Self> {
        let mut crossings = self.crossings.clone();
        for x in &mut crossings {
            x.in_n = false;
        }
        for &id in ids {
            if id == 0 || id > crossings.len() {
                return Err(Error::UnknownCrossingId(id));
            }
            crossings[id - 1].in_n = true;
        }
        Self::build(crossings, self.extra_circles, self.basepoint, Some(self.entering.clone()))
    }

    pub fn with_basepoint(&self, basepoint: Option<ArcLabel>) -> Result<Self> {
        Self::build(self.crossings.clone(), self.extra_circles, basepoint, Some(self.entering.clone()))
    }

    /// Reverses the orientation of one traced component. Inter-component
    /// crossings of that component flip sign; the PD tuples are re-rooted so
    /// slot `a` stays the incoming under-strand.
    pub fn reverse_component(&self, comp: usize) -> Result<Self> {
        if comp >= self.cycle_components {
            return Err(Error::MalformedPd(format!("no component {comp} with crossings")));
        }
        let mut entering = self.entering.clone();
        for p in 0..entering.len() {
            if self.comp_of_pos[p] == comp {
                entering[p] = !entering[p];
            }
        }
        self.rerooted(self.crossings.clone(), entering)
    }

    /// The mirror image: every crossing switches over and under strands.
    /// Orientation is carried over unchanged.
    pub fn mirror(&self) -> Result<Self> {
        // Rotating a tuple by one slot swaps the strand roles; the rotation
        // is chosen so the old over-strand's incoming end lands in slot a.
        let mut crossings = Vec::with_capacity(self.crossings.len());
        let mut entering = vec![false; self.entering.len()];
        for (c, x) in self.crossings.iter().enumerate() {
            let start = if self.entering[pos(c, 3)] { 3 } else { 1 };
            let mut arcs = [0; 4];
            for k in 0..4 {
                arcs[k] = x.arcs[(start + k) % 4];
                entering[pos(c, k)] = self.entering[pos(c, (start + k) % 4)];
            }
            crossings.push(Crossing { arcs, in_n: x.in_n });
        }
        Self::build(crossings, self.extra_circles, self.basepoint, Some(entering))
    }

    fn rerooted(&self, crossings: Vec<Crossing>, entering: Vec<bool>) -> Result<Self> {
        let mut out_x = Vec::with_capacity(crossings.len());
        let mut out_e = vec![false; entering.len()];
        for (c, x) in crossings.into_iter().enumerate() {
            let start = if entering[pos(c, 0)] { 0 } else { 2 };
            let mut arcs = [0; 4];
            for k in 0..4 {
                arcs[k] = x.arcs[(start + k) % 4];
                out_e[pos(c, k)] = entering[pos(c, (start + k) % 4)];
            }
            out_x.push(Crossing { arcs, in_n: x.in_n });
        }
        Self::build(out_x, self.extra_circles, self.basepoint, Some(out_e))
    }

    /// The diagram with crossings permuted: new crossing `i` is old `perm[i]`.
    pub fn permute_crossings(&self, perm: &[usize]) -> Result<Self> {
        let crossings: Vec<Crossing> = perm.iter().map(|&i| self.crossings[i].clone()).collect();
        let mut entering = vec![false; self.entering.len()];
        for (new, &old) in perm.iter().enumerate() {
            for k in 0..4 {
                entering[pos(new, k)] = self.entering[pos(old, k)];
            }
        }
        Self::build(crossings, self.extra_circles, self.basepoint, Some(entering))
    }

    /// Applies `f` to every arc label (must be injective).
    pub fn relabel(&self, f: impl Fn(ArcLabel) -> ArcLabel) -> Result<Self> {
        let crossings = self
            .crossings
            .iter()
            .map(|x| Crossing { arcs: x.arcs.map(&f), in_n: x.in_n })
            .collect();
        Self::build(crossings, self.extra_circles, self.basepoint.map(&f), Some(self.entering.clone()))
    }

    /// Canonical text form, parseable by [`parse_pd`].
    pub fn to_pd_string(&self) -> String {
        let body: Vec<String> = self
            .crossings
            .iter()
            .map(|x| format!("X({},{},{},{})", x.arcs[0], x.arcs[1], x.arcs[2], x.arcs[3]))
            .collect();
        let mut s = format!("PD[{}]", body.join(","));
        if self.n_index.len() != self.crossings.len() {
            let ids: Vec<String> = self.n_index.iter().map(|i| (i + 1).to_string()).collect();
            s.push_str(&format!(" N=[{}]", ids.join(",")));
        }
        if let Some(b) = self.basepoint {
            s.push_str(&format!(" basepoint={b}"));
        }
        if self.extra_circles > 0 {
            s.push_str(&format!(" circles={}", self.extra_circles));
        }
        s
    }
}

/// Follows `through` across crossings and `partner` along arcs, returning
/// each closed cycle as its list of entry positions.
pub(crate) fn trace_cycles(partner: &[usize], through: impl Fn(usize) -> usize) -> Vec<Vec<usize>> {
    let n = partner.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut p = start;
        loop {
            seen[p] = true;
            cycle.push(p);
            let q = through(p);
            seen[q] = true;
            p = partner[q];
            if p == start {
                break;
            }
        }
        cycles.push(cycle);
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trefoil() -> PlanarDiagram {
        parse_pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]").unwrap()
    }

    #[test]
    fn genus_detects_virtual_codes() {
        assert_eq!(trefoil().genus(), 0);
        assert_eq!(parse_pd("PD[X(4,2,3,1),X(2,4,1,3)]").unwrap().genus(), 0);
        assert_eq!(parse_pd("PD[X(1,1,2,2)]").unwrap().genus(), 0);
        assert_eq!(braid_closure(4, &[1, 2, 3, 1, 2, 3]).unwrap().genus(), 0);
        assert_eq!(parse_pd("PD[X(1,2,3,4),X(4,1,2,3)]").unwrap().genus(), 1);
    }

    #[test]
    fn trefoil_has_one_component_and_negative_crossings() {
        let d = trefoil();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.arc_count(), 6);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.signs(), &[-1, -1, -1]);
        assert_eq!(d.oriented_resolution(), vec![1, 1, 1]);
    }

    #[test]
    fn mirror_flips_every_sign_and_is_an_involution() {
        let d = trefoil();
        let m = d.mirror().unwrap();
        assert_eq!(m.signs(), &[1, 1, 1]);
        assert_eq!(m.oriented_resolution(), vec![0, 0, 0]);
        let mm = m.mirror().unwrap();
        assert_eq!(mm.signs(), d.signs());
        assert_eq!(mm.crossings(), d.crossings());
    }

    #[test]
    fn reversing_a_component_flips_only_inter_component_signs() {
        // Hopf link: two crossings between the components.
        let h = parse_pd("PD[X(4,2,3,1),X(2,4,1,3)]").unwrap();
        assert_eq!(h.component_count(), 2);
        assert_eq!(h.signs(), &[1, 1]);
        let r = h.reverse_component(0).unwrap();
        assert_eq!(r.signs(), &[-1, -1]);
        // Trefoil: every crossing is a self-crossing.
        let t = trefoil().reverse_component(0).unwrap();
        assert_eq!(t.signs(), &[-1, -1, -1]);
    }

    #[test]
    fn mixed_sign_two_crossing_diagram() {
        let u = parse_pd("PD[X(4,2,3,1),X(3,2,4,1)]").unwrap();
        assert_eq!(u.signs(), &[1, -1]);
        assert_eq!(u.oriented_resolution(), vec![0, 1]);
    }

    #[test]
    fn kink_orientation() {
        let neg = parse_pd("PD[X(1,2,2,1)]").unwrap();
        let pos = parse_pd("PD[X(1,1,2,2)]").unwrap();
        assert_eq!(neg.signs(), &[-1]);
        assert_eq!(pos.signs(), &[1]);
        assert_eq!(neg.oriented_resolution(), vec![1]);
    }

    #[test]
    fn with_n_marks_subset() {
        let d = parse_pd("PD[X(4,2,3,1),X(3,2,4,1)] N=[2]").unwrap();
        assert_eq!(d.n_indices(), &[1]);
        assert_eq!(d.n_size(), 1);
        assert!(matches!(d.with_n(&[3]), Err(Error::UnknownCrossingId(3))));
    }
}
