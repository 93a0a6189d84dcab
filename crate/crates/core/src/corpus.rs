//! Bundled diagrams and generators for tests and benchmarks.

use rand::Rng;

use crate::cube::{CubeOptions, GradedCube};
use crate::diagram::{braid_closure, parse_pd, PlanarDiagram};

fn pd(s: &str) -> PlanarDiagram {
    parse_pd(s).expect("bundled diagram parses")
}

pub fn unknot() -> PlanarDiagram {
    pd("PD[] circles=1")
}

/// Left-handed trefoil (three negative crossings); its cube computes the
/// homology of the right-handed one.
pub fn trefoil() -> PlanarDiagram {
    pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]")
}

pub fn figure_eight() -> PlanarDiagram {
    pd("PD[X(4,2,5,1),X(8,6,1,5),X(6,3,7,4),X(2,7,3,8)]")
}

pub fn hopf() -> PlanarDiagram {
    pd("PD[X(4,2,3,1),X(2,4,1,3)]")
}

/// Two-crossing unlink with only the negative crossing resolved.
pub fn unlink_pseudo() -> PlanarDiagram {
    pd("PD[X(4,2,3,1),X(3,2,4,1)] N=[2]")
}

/// Negative Hopf link with one crossing resolved.
pub fn hopf_pseudo() -> PlanarDiagram {
    pd("PD[X(1,4,2,3),X(3,2,4,1)] N=[1]")
}

/// Closure of `(σ1σ2σ3)^5`: the torus knot `T(4,5)`, all crossings positive.
pub fn t45() -> PlanarDiagram {
    let w: Vec<i32> = (0..5).flat_map(|_| [1, 2, 3]).collect();
    braid_closure(4, &w).expect("braid closes")
}

/// Mirror of [`t45`]. Its cube carries the Khovanov homology of `T(4,5)`.
pub fn t45_mirror() -> PlanarDiagram {
    t45().mirror().expect("mirror of a valid diagram")
}

/// Named small diagrams, everything except `T(4,5)`.
pub fn small() -> Vec<(&'static str, PlanarDiagram)> {
    vec![
        ("unknot", unknot()),
        ("trefoil", trefoil()),
        ("figure-eight", figure_eight()),
        ("hopf", hopf()),
        ("unlink-pseudo", unlink_pseudo()),
        ("hopf-pseudo", hopf_pseudo()),
    ]
}

/// Named diagrams including `T(4,5)` in both mirror images.
pub fn all() -> Vec<(&'static str, PlanarDiagram)> {
    let mut v = small();
    v.push(("t45", t45()));
    v.push(("t45-mirror", t45_mirror()));
    v
}

fn closure(strands: usize, word: &[i32]) -> PlanarDiagram {
    braid_closure(strands, word).expect("braid closes")
}

/// Diagram pairs related by one Reidemeister move, each move in two
/// versions: positive and negative kinks, `σσ⁻¹` and `σ⁻¹σ` bigons, and the
/// braid relation with positive and with negative letters.
pub fn reidemeister_pairs() -> Vec<(&'static str, PlanarDiagram, PlanarDiagram)> {
    vec![
        ("R1+", closure(2, &[1, 1, 1]), closure(3, &[1, 1, 1, 2])),
        ("R1-", closure(2, &[1, 1, 1]), closure(3, &[1, 1, 1, -2])),
        ("R2", closure(3, &[1, -2, 1, -2]), closure(3, &[1, 2, -2, -2, 1, -2])),
        ("R2'", closure(3, &[1, -2, 1, -2]), closure(3, &[1, -1, 1, -2, 1, -2])),
        ("R3", closure(3, &[1, 2, 1, -2, -2]), closure(3, &[2, 1, 2, -2, -2])),
        ("R3'", closure(3, &[-1, -2, -1, 2, 2]), closure(3, &[-2, -1, -2, 2, 2])),
    ]
}

/// Random braid word with letters in `±1..strands`.
pub fn random_word(rng: &mut impl Rng, strands: usize, len: usize) -> Vec<i32> {
    (0..len)
        .map(|_| {
            let g = rng.gen_range(1..strands as i32);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect()
}

pub fn random_braid(rng: &mut impl Rng, strands: usize, len: usize) -> PlanarDiagram {
    closure(strands, &random_word(rng, strands, len))
}

/// A random braid closure with one or two crossings left out of `N`, kept
/// only if every resolution is a verified unlink.
pub fn random_pseudo_diagram(rng: &mut impl Rng) -> PlanarDiagram {
    loop {
        let strands = rng.gen_range(2..=4);
        let len = rng.gen_range(3..=6);
        let d = random_braid(rng, strands, len);
        let n = d.crossing_count();
        if n < 2 {
            continue;
        }
        let drop = rng.gen_range(1..=2.min(n - 1));
        let mut ids: Vec<usize> = (1..=n).collect();
        for _ in 0..drop {
            let k = rng.gen_range(0..ids.len());
            ids.remove(k);
        }
        let Ok(p) = d.with_n(&ids) else { continue };
        if GradedCube::build(&p, CubeOptions::default()).is_ok() {
            return p;
        }
    }
}

/// Every planar, consistently oriented PD code with `n` crossings: all
/// pairings of the `4n` crossing slots into arcs, filtered.
pub fn planar_codes(n: usize) -> Vec<PlanarDiagram> {
    if n == 0 {
        return Vec::new();
    }
    let darts = 4 * n;
    let mut mate = vec![usize::MAX; darts];
    let mut out = Vec::new();
    pair_up(&mut mate, &mut out);
    out
}

fn pair_up(mate: &mut [usize], out: &mut Vec<PlanarDiagram>) {
    let Some(p) = mate.iter().position(|&m| m == usize::MAX) else {
        if let Some(d) = from_pairing(mate) {
            out.push(d);
        }
        return;
    };
    for q in p + 1..mate.len() {
        // an arc runs from an outgoing slot to an incoming one
        if mate[q] != usize::MAX || (p % 4 == 0 && q % 4 == 0) || (p % 4 == 2 && q % 4 == 2) {
            continue;
        }
        mate[p] = q;
        mate[q] = p;
        pair_up(mate, out);
        mate[p] = usize::MAX;
        mate[q] = usize::MAX;
    }
}

/// Euler characteristic check straight on the pairing: each connected
/// piece with `V` crossings must have `V + 2` faces.
fn pairing_is_planar(mate: &[usize]) -> bool {
    let n = mate.len() / 4;
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            x = c[x];
        }
        x
    }
    for p in 0..mate.len() {
        let (a, b) = (find(&mut comp, p / 4), find(&mut comp, mate[p] / 4));
        comp[a] = b;
    }
    let mut balance = vec![0i64; n];
    for c in 0..n {
        balance[find(&mut comp, c)] += 1;
    }
    for r in 0..n {
        if find(&mut comp, r) == r {
            balance[r] += 2;
        }
    }
    let mut seen = vec![false; mate.len()];
    for start in 0..mate.len() {
        if seen[start] {
            continue;
        }
        let mut p = start;
        while !seen[p] {
            seen[p] = true;
            let q = mate[p];
            p = 4 * (q / 4) + (q % 4 + 1) % 4;
        }
        balance[find(&mut comp, start / 4)] -= 1;
    }
    balance.iter().all(|&b| b == 0)
}

fn from_pairing(mate: &[usize]) -> Option<PlanarDiagram> {
    if !pairing_is_planar(mate) {
        return None;
    }
    let mut label = vec![0i64; mate.len()];
    let mut next = 1;
    for p in 0..mate.len() {
        if p < mate[p] {
            label[p] = next;
            label[mate[p]] = next;
            next += 1;
        }
    }
    let tuples: Vec<[i64; 4]> = label.chunks(4).map(|c| [c[0], c[1], c[2], c[3]]).collect();
    let d = PlanarDiagram::new(tuples, None, None, None).ok()?;
    debug_assert_eq!(d.genus(), 0);
    Some(d)
}
