//! Unlink recognition for the retained-crossing diagram of a resolution.
//!
//! The check is one-sided: greedy Reidemeister I and II removals, then a
//! descending-diagram test on whatever is left. Success proves the diagram is
//! an unlink; failure only means "not shown".

use serde::Serialize;

use super::resolve::Mode;
use super::{pos, PlanarDiagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnlinkStatus {
    Verified,
    Unverified,
}

/// A diagram made of closed loops, some crossing each other.
///
/// Positions are `4*i + k` for slot `k` of live crossing `i`; slots 0 and 2
/// are under, 1 and 3 over, counterclockwise as in PD codes. Loops without
/// crossings are only counted.
#[derive(Clone, Debug)]
pub struct LoopDiagram {
    partner: Vec<usize>,
    free_loops: usize,
}

impl LoopDiagram {
    /// Smooths the crossings of `d` marked 0/1 in `modes`, keeping the rest.
    pub(crate) fn from_resolution(d: &PlanarDiagram, modes: &[Mode]) -> Self {
        let kept: Vec<usize> = (0..modes.len()).filter(|&c| modes[c] == Mode::Retained).collect();
        let full = LoopDiagram { partner: d.partner().to_vec(), free_loops: d.extra_circles() };
        let through = |p: usize| pos(p / 4, modes[p / 4].through(p % 4));
        full.restrict(&kept, through)
    }

    pub fn crossing_count(&self) -> usize {
        self.partner.len() / 4
    }

    /// Keeps only crossings in `kept` (in that order). Strands entering a
    /// dropped crossing at slot `k` leave it at `through(k)`.
    fn restrict(&self, kept: &[usize], through: impl Fn(usize) -> usize) -> Self {
        let n = self.partner.len();
        let mut new_id = vec![usize::MAX; n / 4];
        for (i, &c) in kept.iter().enumerate() {
            new_id[c] = i;
        }
        let mut partner = vec![0; 4 * kept.len()];
        let mut seen = vec![false; n];
        for (i, &c) in kept.iter().enumerate() {
            for k in 0..4 {
                let mut q = self.partner[pos(c, k)];
                while new_id[q / 4] == usize::MAX {
                    seen[q] = true;
                    let t = through(q);
                    seen[t] = true;
                    q = self.partner[t];
                }
                partner[pos(i, k)] = pos(new_id[q / 4], q % 4);
            }
        }
        // Loops running only through dropped crossings become free loops.
        let mut free_loops = self.free_loops;
        for start in 0..n {
            if seen[start] || new_id[start / 4] != usize::MAX {
                continue;
            }
            free_loops += 1;
            let mut p = start;
            loop {
                seen[p] = true;
                let t = through(p);
                seen[t] = true;
                p = self.partner[t];
                if p == start {
                    break;
                }
            }
        }
        LoopDiagram { partner, free_loops }
    }

    fn without(&self, dropped: &[usize]) -> Self {
        let kept: Vec<usize> = (0..self.crossing_count()).filter(|c| !dropped.contains(c)).collect();
        self.restrict(&kept, |p| p ^ 2)
    }

    /// A crossing with an arc joining two neighbouring slots.
    fn find_kink(&self) -> Option<usize> {
        (0..self.crossing_count()).find(|&c| {
            (0..4).any(|k| self.partner[pos(c, k)] == pos(c, (k + 1) % 4))
        })
    }

    /// Two crossings bounding a bigon face whose upper edge is over at both.
    fn find_bigon(&self) -> Option<(usize, usize)> {
        for c in 0..self.crossing_count() {
            for k in 0..4 {
                let q = self.partner[pos(c, k)];
                let (c2, m) = (q / 4, q % 4);
                if c2 == c || m % 2 != k % 2 {
                    continue;
                }
                if self.partner[pos(c2, (m + 1) % 4)] == pos(c, (k + 3) % 4) {
                    return Some((c, c2));
                }
            }
        }
        None
    }

    /// Applies removals until none applies; returns the reduced diagram.
    pub fn simplify(&self) -> Self {
        let mut cur = self.clone();
        loop {
            if let Some(c) = cur.find_kink() {
                cur = cur.without(&[c]);
            } else if let Some((a, b)) = cur.find_bigon() {
                cur = cur.without(&[a, b]);
            } else {
                return cur;
            }
        }
    }

    /// Loops through crossings, each as the cyclic list of positions where it
    /// enters a crossing.
    fn components(&self) -> Vec<Vec<usize>> {
        super::trace_cycles(&self.partner, |p| p ^ 2)
    }

    /// Descending test: each loop, read from a suitable start and direction,
    /// meets each of its self-crossings first on the over-strand, and loops
    /// can be stacked so one always passes over the next.
    fn is_layered_descending(&self) -> bool {
        let comps = self.components();
        let mut comp_of = vec![0; self.partner.len()];
        for (i, cyc) in comps.iter().enumerate() {
            for &p in cyc {
                comp_of[p] = i;
                comp_of[p ^ 2] = i;
            }
        }
        for cyc in &comps {
            if !descending_somewhere(cyc, &comp_of) {
                return false;
            }
        }
        // over-relation between distinct loops must be acyclic
        let m = comps.len();
        let mut above = vec![vec![false; m]; m];
        for c in 0..self.crossing_count() {
            let under = comp_of[pos(c, 0)];
            let over = comp_of[pos(c, 1)];
            if under != over {
                above[over][under] = true;
            }
        }
        acyclic(&above)
    }

    pub fn status(&self) -> UnlinkStatus {
        let s = self.simplify();
        if s.crossing_count() == 0 || s.is_layered_descending() {
            UnlinkStatus::Verified
        } else {
            UnlinkStatus::Unverified
        }
    }
}

fn descending_somewhere(cycle: &[usize], comp_of: &[usize]) -> bool {
    let me = comp_of[cycle[0]];
    // crossing slots met along the loop, in walking order: (crossing, over?)
    let walk: Vec<(usize, bool)> = cycle.iter().map(|&p| (p / 4, p % 2 == 1)).collect();
    let self_crossing = |c: usize| comp_of[pos(c, 0)] == me && comp_of[pos(c, 1)] == me;
    (0..walk.len()).any(|start| {
        [true, false].iter().any(|&fw| first_visits_over(&walk, start, fw, &self_crossing))
    })
}

fn first_visits_over(
    walk: &[(usize, bool)],
    start: usize,
    forward: bool,
    self_crossing: &impl Fn(usize) -> bool,
) -> bool {
    let n = walk.len();
    let mut met = std::collections::HashSet::new();
    for i in 0..n {
        let idx = if forward { (start + i) % n } else { (start + n - i) % n };
        let (c, over) = walk[idx];
        if self_crossing(c) && met.insert(c) && !over {
            return false;
        }
    }
    true
}

fn acyclic(adj: &[Vec<bool>]) -> bool {
    let m = adj.len();
    let mut indeg: Vec<usize> = (0..m).map(|j| (0..m).filter(|&i| adj[i][j]).count()).collect();
    let mut stack: Vec<usize> = (0..m).filter(|&j| indeg[j] == 0).collect();
    let mut done = 0;
    while let Some(i) = stack.pop() {
        done += 1;
        for j in 0..m {
            if adj[i][j] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    stack.push(j);
                }
            }
        }
    }
    done == m
}
