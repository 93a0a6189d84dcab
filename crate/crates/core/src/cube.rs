//! The cube of resolutions over the marked crossings `N`.
//!
//! Vertices are bitmasks over `N` (bit `i` is the `i`-th marked crossing in
//! input order). An edge runs from `v` to `u = v - e_c`, the direction in
//! which the differential acts.
//!
//! Gradings at a vertex:
//!
//! ```text
//! h = -Σv + σ(v,o)/2 + n₋
//! q = Q - Σv + 3σ(v,o)/2 - n₊ + 2n₋
//! ```
//!
//! with `σ(v,u) = w(D_v) - w(D_u)`, the writhe difference of the resolved
//! unlink diagrams.

use serde::Serialize;

use crate::diagram::{writhe_unlink, PlanarDiagram, ResolvedState, UnlinkStatus};
use crate::error::{Error, Result};
use crate::par;

/// How a single saddle changes the resolved link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    Merge,
    Split,
    NonorientableBand,
}

#[derive(Clone, Debug)]
pub struct CubeVertex {
    pub mask: u64,
    pub state: ResolvedState,
    pub unlink_status: UnlinkStatus,
    /// Writhe of the resolved unlink diagram.
    pub writhe: i64,
}

impl CubeVertex {
    pub fn circles(&self) -> usize {
        self.state.circle_count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CubeEdge {
    /// Source vertex `v` (has the bit set).
    pub from: u64,
    /// Target vertex `u = v - e_c`.
    pub to: u64,
    /// Position of the changed crossing within `N`.
    pub bit: usize,
    pub kind: EdgeKind,
    pub sigma: i64,
    pub chi: i64,
}

/// Options for cube construction.
#[derive(Clone, Copy, Debug, Default)]
pub struct CubeOptions {
    /// Accept vertices whose unlink status could not be verified.
    pub trust_pseudo: bool,
}

/// Largest `|N|` accepted; the cube has `2^|N|` vertices.
pub const MAX_CUBE_DIM: usize = 24;

#[derive(Clone, Debug)]
pub struct GradedCube {
    diagram: PlanarDiagram,
    dim: usize,
    vertices: Vec<CubeVertex>,
    edges: Vec<CubeEdge>,
    n_plus: usize,
    n_minus: usize,
    o: u64,
}

/// Everything `cube dump` reports.
#[derive(Serialize)]
pub struct CubeDump {
    pub n: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub o: Vec<u8>,
    pub vertices: Vec<VertexDump>,
    pub edges: Vec<EdgeDump>,
}

#[derive(Serialize)]
pub struct VertexDump {
    pub v: Vec<u8>,
    pub circles: usize,
    pub h_offset: i64,
    pub q_offset: i64,
    pub unlink_status: UnlinkStatus,
}

#[derive(Serialize)]
pub struct EdgeDump {
    pub v: Vec<u8>,
    pub u: Vec<u8>,
    pub kind: EdgeKind,
    pub sigma: i64,
}

impl GradedCube {
    pub fn build(d: &PlanarDiagram, opts: CubeOptions) -> Result<Self> {
        let dim = d.n_size();
        if dim > MAX_CUBE_DIM {
            return Err(Error::OutOfDomain(format!("|N| = {dim} exceeds the supported {MAX_CUBE_DIM}")));
        }
        let vertices: Vec<Result<CubeVertex>> = par::map_range(1usize << dim, |m| {
            let mask = m as u64;
            let state = d.resolve_mask(mask);
            let unlink_status = if state.retained().is_empty() {
                UnlinkStatus::Verified
            } else {
                state.loop_diagram(d).status()
            };
            if unlink_status == UnlinkStatus::Unverified && !opts.trust_pseudo {
                let left = state.loop_diagram(d).simplify().crossing_count();
                return Err(Error::NotAPseudoDiagram { vertex: bits_string(mask, dim), crossings: left });
            }
            let writhe = writhe_unlink(&state)?;
            Ok(CubeVertex { mask, state, unlink_status, writhe })
        });
        let vertices = vertices.into_iter().collect::<Result<Vec<_>>>()?;

        let mut edges = Vec::with_capacity(dim << dim.saturating_sub(1));
        for v in &vertices {
            for bit in 0..dim {
                if v.mask >> bit & 1 == 0 {
                    continue;
                }
                let u = &vertices[(v.mask ^ (1 << bit)) as usize];
                let (pv, pu) = (v.circles() as i64, u.circles() as i64);
                let kind = match pu - pv {
                    -1 => EdgeKind::Merge,
                    1 => EdgeKind::Split,
                    0 => EdgeKind::NonorientableBand,
                    _ => return Err(Error::Internal(format!("saddle changed circle count by {}", pu - pv))),
                };
                let sigma = v.writhe - u.writhe;
                let ok = match kind {
                    EdgeKind::NonorientableBand => sigma.abs() == 2,
                    _ => sigma == 0,
                };
                if !ok {
                    return Err(Error::Internal(format!(
                        "{kind:?} edge {} -> {} has self-intersection {sigma}",
                        bits_string(v.mask, dim),
                        bits_string(u.mask, dim)
                    )));
                }
                edges.push(CubeEdge { from: v.mask, to: u.mask, bit, kind, sigma, chi: -1 });
            }
        }

        let (n_plus, n_minus) = d.n_signs();
        let o = d
            .oriented_resolution()
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &b)| m | (b as u64) << i);
        Ok(GradedCube { diagram: d.clone(), dim, vertices, edges, n_plus, n_minus, o })
    }

    pub fn diagram(&self) -> &PlanarDiagram {
        &self.diagram
    }

    /// `|N|`
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[CubeVertex] {
        &self.vertices
    }

    pub fn vertex(&self, mask: u64) -> &CubeVertex {
        &self.vertices[mask as usize]
    }

    pub fn edges(&self) -> &[CubeEdge] {
        &self.edges
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    /// Oriented resolution as a mask.
    pub fn o(&self) -> u64 {
        self.o
    }

    pub fn mask_to_vec(&self, mask: u64) -> Vec<i64> {
        (0..self.dim).map(|i| (mask >> i & 1) as i64).collect()
    }

    fn vec_to_mask(&self, v: &[i64]) -> u64 {
        v.iter().enumerate().fold(0, |m, (i, &b)| m | ((b as u64) << i))
    }

    /// `σ(v,u)` for cube vertices given as masks.
    pub fn sigma_mask(&self, v: u64, u: u64) -> i64 {
        self.vertices[v as usize].writhe - self.vertices[u as usize].writhe
    }

    /// `σ(v,u)` for vectors in `Z^N` whose entries are `0` or `1` mod 3.
    pub fn sigma(&self, v: &[i64], u: &[i64]) -> Result<i64> {
        let (rv, sv) = self.reduce(v)?;
        let (ru, su) = self.reduce(u)?;
        // each 3-step contributes 2
        Ok(self.sigma_mask(rv, ru) + 2 * (sv - su) / 3)
    }

    /// Splits `v` into its `{0,1}` representative and the sum of the removed
    /// multiples of three.
    fn reduce(&self, v: &[i64]) -> Result<(u64, i64)> {
        if v.len() != self.dim {
            return Err(Error::OutOfDomain(format!("vector has {} entries, N has {}", v.len(), self.dim)));
        }
        let mut r = Vec::with_capacity(v.len());
        let mut shift = 0;
        for (i, &x) in v.iter().enumerate() {
            let m = x.rem_euclid(3);
            if m == 2 {
                return Err(Error::OutOfDomain(format!(
                    "entry {x} at position {} is 2 mod 3: that crossing is not resolved",
                    i + 1
                )));
            }
            r.push(m);
            shift += x - m;
        }
        Ok((self.vec_to_mask(&r), shift))
    }

    fn sigma_to_o(&self, v: &[i64]) -> Result<i64> {
        let s = self.sigma(v, &self.mask_to_vec(self.o))?;
        if s % 2 != 0 {
            return Err(Error::Internal(format!("odd self-intersection {s}")));
        }
        Ok(s)
    }

    pub fn h_grading(&self, v: &[i64]) -> Result<i64> {
        let s = self.sigma_to_o(v)?;
        Ok(-v.iter().sum::<i64>() + s / 2 + self.n_minus as i64)
    }

    pub fn q_grading(&self, v: &[i64], labeling_q: i64) -> Result<i64> {
        Ok(labeling_q + self.q_offset(v)?)
    }

    /// `q - Q` at `v`.
    pub fn q_offset(&self, v: &[i64]) -> Result<i64> {
        let s = self.sigma_to_o(v)?;
        Ok(-v.iter().sum::<i64>() + 3 * s / 2 - self.n_plus as i64 + 2 * self.n_minus as i64)
    }

    /// `(h, q - Q)` at a cube vertex.
    pub fn offsets(&self, mask: u64) -> (i64, i64) {
        let v = self.mask_to_vec(mask);
        let h = self.h_grading(&v).expect("cube vertices are in the domain");
        let q = self.q_offset(&v).expect("cube vertices are in the domain");
        (h, q)
    }

    /// Largest `σ(v,u)` over pairs `v ≥ u`; zero for genuine diagrams.
    pub fn max_self_intersection(&self) -> i64 {
        // min writhe over subsets of each mask, by subset dynamic programming
        let mut low: Vec<i64> = self.vertices.iter().map(|v| v.writhe).collect();
        for bit in 0..self.dim {
            for m in 0..low.len() {
                if m >> bit & 1 == 1 {
                    low[m] = low[m].min(low[m ^ (1 << bit)]);
                }
            }
        }
        self.vertices.iter().map(|v| v.writhe - low[v.mask as usize]).max().unwrap_or(0)
    }

    /// Whether every square has `S·S ≤ 6`, with the maximum found.
    pub fn small_self_intersection(&self) -> (bool, i64) {
        let m = self.max_self_intersection();
        (m <= 6, m)
    }

    pub fn dump(&self) -> CubeDump {
        let bits = |m: u64| (0..self.dim).map(|i| (m >> i & 1) as u8).collect::<Vec<u8>>();
        CubeDump {
            n: self.dim,
            n_plus: self.n_plus,
            n_minus: self.n_minus,
            o: bits(self.o),
            vertices: self
                .vertices
                .iter()
                .map(|v| {
                    let (h_offset, q_offset) = self.offsets(v.mask);
                    VertexDump { v: bits(v.mask), circles: v.circles(), h_offset, q_offset, unlink_status: v.unlink_status }
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDump { v: bits(e.from), u: bits(e.to), kind: e.kind, sigma: e.sigma })
                .collect(),
        }
    }
}

fn bits_string(mask: u64, dim: usize) -> String {
    (0..dim).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// A component map `C_v -> C_u` can be nonzero only when `σ/2 + χ` is odd.
pub fn edge_parity_admissible(sigma: i64, chi: i64) -> bool {
    (sigma / 2 + chi).rem_euclid(2) == 1
}

/// Grading change when a crossing of sign `ε` is dropped from `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DropShift {
    /// `h - h'`
    pub dh: i64,
    /// `q - q'`
    pub dq: i64,
    /// `σ(v,o) - σ(v',o')`
    pub sigma_shift: i64,
    /// `1 - ε`, the change in the sign-count terms.
    pub parity_term: i64,
}

/// Compares the `N ∪ {c}` cube grading at a vertex with `c` set to 2 against
/// the `N` cube grading at the matching vertex.
///
/// Entry 2 adds 2 to `Σv`. The oriented resolution at `c` is 0 when `ε = +1`
/// (σ picks up the 3-step value 2 from `2 = 0 + 2`) and 1 when `ε = -1`.
/// Dropping `c` removes one crossing from the count `n₊` or `n₋`.
pub fn grading_shift_on_drop(eps: i8) -> Result<DropShift> {
    if eps != 1 && eps != -1 {
        return Err(Error::OutOfDomain(format!("crossing sign {eps}")));
    }
    let sigma_shift = 1 + eps as i64;
    let parity_term = 1 - eps as i64;
    let (plus, minus) = if eps > 0 { (1, 0) } else { (0, 1) };
    let dh = -2 + sigma_shift / 2 + minus;
    let dq = -2 + 3 * sigma_shift / 2 - plus + 2 * minus;
    debug_assert_eq!(parity_term / 2, minus);
    Ok(DropShift { dh, dq, sigma_shift, parity_term })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn cube(text: &str) -> GradedCube {
        GradedCube::build(&parse_pd(text).unwrap(), CubeOptions::default()).unwrap()
    }

    #[test]
    fn trefoil_cube() {
        let c = cube("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]");
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.edges().len(), 12);
        assert!(c.edges().iter().all(|e| e.kind != EdgeKind::NonorientableBand && e.sigma == 0));
        assert_eq!(c.max_self_intersection(), 0);
        // genuine diagram: h vanishes at the oriented resolution
        assert_eq!(c.h_grading(&c.mask_to_vec(c.o())).unwrap(), 0);
    }

    #[test]
    fn unlink_pseudo_diagram() {
        let c = cube("PD[X(4,2,3,1),X(3,2,4,1)] N=[2]");
        assert_eq!(c.edges().len(), 1);
        let e = c.edges()[0];
        assert_eq!((e.kind, e.sigma), (EdgeKind::NonorientableBand, 2));
        assert!(!edge_parity_admissible(e.sigma, e.chi));
        assert_eq!(c.h_grading(&[0]).unwrap(), 0);
        assert_eq!(c.h_grading(&[1]).unwrap(), 0);
    }

    #[test]
    fn extended_sigma() {
        let c = cube("PD[X(4,2,3,1),X(3,2,4,1)] N=[2]");
        assert_eq!(c.sigma(&[1], &[1]).unwrap(), 0);
        assert_eq!(c.sigma(&[0], &[1]).unwrap(), -c.sigma(&[1], &[0]).unwrap());
        // a 3-step adds 2
        assert_eq!(c.sigma(&[3], &[0]).unwrap(), 2);
        assert_eq!(c.sigma(&[4], &[1]).unwrap(), 2);
        assert!(matches!(c.sigma(&[2], &[0]), Err(Error::OutOfDomain(_))));
        assert!(matches!(c.sigma(&[-1], &[0]), Err(Error::OutOfDomain(_))));
        // q is 3-periodic, h drops by 2 per 3-step
        assert_eq!(c.q_offset(&[3]).unwrap(), c.q_offset(&[0]).unwrap());
        assert_eq!(c.h_grading(&[3]).unwrap() - c.h_grading(&[0]).unwrap(), -2);
    }

    #[test]
    fn parity_predicate() {
        assert!(edge_parity_admissible(0, -1));
        assert!(!edge_parity_admissible(2, -1));
        assert!(!edge_parity_admissible(-2, -1));
        assert!(!edge_parity_admissible(0, -2));
    }

    #[test]
    fn drop_shift_is_sign_independent() {
        let p = grading_shift_on_drop(1).unwrap();
        let m = grading_shift_on_drop(-1).unwrap();
        assert_eq!((p.dh, p.dq, p.sigma_shift), (-1, 0, 2));
        assert_eq!((m.dh, m.dq, m.sigma_shift, m.parity_term), (-1, 0, 0, 2));
        assert!(grading_shift_on_drop(0).is_err());
    }

    #[test]
    fn strict_mode_rejects_unverified_vertices() {
        let d = parse_pd("PD[X(4,2,3,1),X(2,4,1,3)] N=[]").unwrap();
        let err = GradedCube::build(&d, CubeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotAPseudoDiagram { .. }));
    }

    #[test]
    fn empty_n_gives_one_vertex() {
        let d = parse_pd("PD[X(1,1,2,2)] N=[]").unwrap();
        let c = GradedCube::build(&d, CubeOptions::default()).unwrap();
        assert_eq!(c.vertices().len(), 1);
        assert!(c.edges().is_empty());
    }
}
