use serde::Serialize;

use super::simplify::LoopDiagram;
use super::{pos, trace_cycles, ArcLabel, PlanarDiagram};
use crate::error::{Error, Result};

/// How a crossing appears in a resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    Retained,
    Zero,
    One,
}

impl Mode {
    /// Slot reached by passing through slot `k` of a crossing in this mode.
    #[inline]
    pub(crate) fn through(self, k: usize) -> usize {
        match self {
            Mode::Retained => k ^ 2,
            Mode::Zero => k ^ 1,
            Mode::One => 3 - k,
        }
    }
}

/// A crossing outside `N`, kept in the resolved diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RetainedCrossing {
    pub index: usize,
    /// Sign under the orientation chosen for the resolved circles.
    pub sign: i8,
    pub under_circle: usize,
    pub over_circle: usize,
}

/// The link `K_v` obtained by smoothing every crossing of `N` according to `v`.
///
/// "Circles" are the components of `K_v`; with retained crossings they need
/// not be crossingless. Orientation of each circle is the trace direction and
/// is otherwise arbitrary.
#[derive(Clone, Debug)]
pub struct ResolvedState {
    v: Vec<u8>,
    circle_of_arc: Vec<usize>,
    circles: Vec<Vec<ArcLabel>>,
    retained: Vec<RetainedCrossing>,
    modes: Vec<Mode>,
}

impl PlanarDiagram {
    /// Resolves the crossings of `N` according to `v` (one 0/1 entry per
    /// crossing of `N`, in input order).
    pub fn resolve(&self, v: &[u8]) -> Result<ResolvedState> {
        if v.len() != self.n_size() {
            return Err(Error::OutOfDomain(format!(
                "resolution vector has {} entries, N has {}",
                v.len(),
                self.n_size()
            )));
        }
        if let Some(bad) = v.iter().find(|&&x| x > 1) {
            return Err(Error::OutOfDomain(format!("resolution entry {bad} is not 0 or 1")));
        }
        let mask = v.iter().enumerate().fold(0u64, |m, (i, &b)| m | ((b as u64) << i));
        Ok(self.resolve_mask(mask))
    }

    /// Resolution by bitmask: bit `i` is the entry for the `i`-th crossing of `N`.
    pub fn resolve_mask(&self, mask: u64) -> ResolvedState {
        let mut modes = vec![Mode::Retained; self.crossing_count()];
        for (i, &c) in self.n_indices().iter().enumerate() {
            modes[c] = if mask >> i & 1 == 1 { Mode::One } else { Mode::Zero };
        }
        let v = (0..self.n_size()).map(|i| (mask >> i & 1) as u8).collect();
        let partner = self.partner();
        let cycles = trace_cycles(partner, |p| 4 * (p / 4) + modes[p / 4].through(p % 4));

        let mut circle_of_pos = vec![0usize; partner.len()];
        let mut entry = vec![false; partner.len()];
        let mut circle_of_arc = vec![0usize; self.arc_count()];
        let mut circles = Vec::with_capacity(cycles.len() + self.extra_circles());
        for (ci, cycle) in cycles.iter().enumerate() {
            let mut arcs = Vec::with_capacity(cycle.len());
            for &p in cycle {
                let q = 4 * (p / 4) + modes[p / 4].through(p % 4);
                entry[p] = true;
                circle_of_pos[p] = ci;
                circle_of_pos[q] = ci;
                let a = self.pos_arc()[p];
                circle_of_arc[a] = ci;
                arcs.push(self.arc_labels()[a]);
            }
            circles.push(arcs);
        }
        circles.extend((0..self.extra_circles()).map(|_| Vec::new()));

        let retained = modes
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == Mode::Retained)
            .map(|(c, _)| {
                let under = if entry[pos(c, 0)] { 1 } else { -1 };
                let over = if entry[pos(c, 3)] { 1 } else { -1 };
                RetainedCrossing {
                    index: c,
                    sign: under * over,
                    under_circle: circle_of_pos[pos(c, 0)],
                    over_circle: circle_of_pos[pos(c, 1)],
                }
            })
            .collect();
        ResolvedState { v, circle_of_arc, circles, retained, modes }
    }
}

impl ResolvedState {
    pub fn vector(&self) -> &[u8] {
        &self.v
    }

    /// Number of components `p(v)`.
    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }

    /// Arc labels on each circle, in orientation order. Free circles are empty.
    pub fn circles(&self) -> &[Vec<ArcLabel>] {
        &self.circles
    }

    /// Circle containing the arc with the given dense index.
    pub fn circle_of_arc_index(&self, arc: usize) -> usize {
        self.circle_of_arc[arc]
    }

    pub fn circle_of_arc_indices(&self) -> &[usize] {
        &self.circle_of_arc
    }

    pub fn retained(&self) -> &[RetainedCrossing] {
        &self.retained
    }

    /// Sum of the signs of the retained crossings.
    pub fn writhe(&self) -> i64 {
        self.retained.iter().map(|r| r.sign as i64).sum()
    }

    /// Retained-crossing diagram, ready for unlink simplification.
    pub fn loop_diagram(&self, d: &PlanarDiagram) -> LoopDiagram {
        LoopDiagram::from_resolution(d, &self.modes)
    }
}

/// Writhe of a resolution presented as an unlink diagram.
///
/// Flipping one component flips exactly the crossings it shares with other
/// components, so the writhe is orientation independent precisely when every
/// pair of components has inter-component sign sum zero. That is checked and
/// reported as `OrientationDependentWrithe` otherwise.
pub fn writhe_unlink(state: &ResolvedState) -> Result<i64> {
    let n = state.circle_count();
    let mut pair_sum = std::collections::BTreeMap::<(usize, usize), i64>::new();
    for r in &state.retained {
        if r.under_circle != r.over_circle {
            let key = (r.under_circle.min(r.over_circle), r.under_circle.max(r.over_circle));
            *pair_sum.entry(key).or_default() += r.sign as i64;
        }
    }
    if let Some((&(first, second), &sum)) = pair_sum.iter().find(|(_, &s)| s != 0) {
        debug_assert!(first < n && second < n);
        return Err(Error::OrientationDependentWrithe { first, second, sum });
    }
    Ok(state.writhe())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn trefoil() -> PlanarDiagram {
        parse_pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]").unwrap()
    }

    #[test]
    fn trefoil_extreme_resolutions() {
        // hand union-find: 0-smoothing joins (a,b),(c,d) -> {1,4},{2,5},{3,6}
        let d = trefoil();
        assert_eq!(d.resolve(&[0, 0, 0]).unwrap().circle_count(), 3);
        // 1-smoothing joins (a,d),(b,c) -> {1,5,3},{4,2,6}
        assert_eq!(d.resolve(&[1, 1, 1]).unwrap().circle_count(), 2);
        assert_eq!(d.resolve(&[1, 0, 0]).unwrap().circle_count(), 2);
    }

    #[test]
    fn empty_diagram_resolves_to_its_circles() {
        let d = parse_pd("PD[] circles=1").unwrap();
        let s = d.resolve(&[]).unwrap();
        assert_eq!(s.circle_count(), 1);
        assert_eq!(writhe_unlink(&s).unwrap(), 0);
    }

    #[test]
    fn resolve_is_idempotent() {
        let d = trefoil();
        let a = d.resolve(&[0, 1, 0]).unwrap();
        let b = d.resolve(&[0, 1, 0]).unwrap();
        assert_eq!(a.circles(), b.circles());
        assert_eq!(a.retained(), b.retained());
    }

    #[test]
    fn bad_vectors() {
        let d = trefoil();
        assert!(matches!(d.resolve(&[0, 1]), Err(Error::OutOfDomain(_))));
        assert!(matches!(d.resolve(&[0, 2, 1]), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn writhe_of_kink_resolutions() {
        let kink = parse_pd("PD[X(1,1,2,2)] N=[]").unwrap();
        let s = kink.resolve(&[]).unwrap();
        assert_eq!(writhe_unlink(&s).unwrap(), 1);
        let bare = trefoil().resolve(&[1, 1, 1]).unwrap();
        assert_eq!(writhe_unlink(&bare).unwrap(), 0);
    }

    #[test]
    fn hopf_link_is_not_presented_as_an_unlink() {
        let hopf = parse_pd("PD[X(4,2,3,1),X(2,4,1,3)] N=[]").unwrap();
        let s = hopf.resolve(&[]).unwrap();
        assert!(matches!(writhe_unlink(&s), Err(Error::OrientationDependentWrithe { sum, .. }) if sum.abs() == 2));
    }

    #[test]
    fn pseudo_diagram_writhe_difference() {
        // negative Hopf link with the first crossing marked
        let d = parse_pd("PD[X(1,4,2,3),X(3,2,4,1)] N=[1]").unwrap();
        let w1 = writhe_unlink(&d.resolve(&[1]).unwrap()).unwrap();
        let w0 = writhe_unlink(&d.resolve(&[0]).unwrap()).unwrap();
        assert_eq!(w1 - w0, -2);
    }
}
