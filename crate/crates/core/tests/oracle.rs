use std::collections::BTreeMap;

use khcube::corpus::planar_codes;
use khcube::cube::{CubeOptions, GradedCube};
use khcube::diagram::{braid_closure, parse_pd, PlanarDiagram};
use khcube::khovanov::{Coeffs, KhovanovComplex};
use khcube::oracle::{circle_count, dense_khovanov, jones_unnormalized};
use num_traits::ToPrimitive;

fn arcs(d: &PlanarDiagram) -> Vec<[i64; 4]> {
    d.crossings().iter().map(|c| c.arcs).collect()
}

fn engine(d: &PlanarDiagram) -> BTreeMap<(i64, i64), (usize, Vec<i128>)> {
    let h = KhovanovComplex::assemble(d, CubeOptions::default()).unwrap().homology(Coeffs::Z).unwrap();
    h.iter().map(|(k, g)| (k, (g.free_rank, g.torsion.iter().map(|t| t.to_i128().unwrap()).collect()))).collect()
}

fn samples() -> Vec<PlanarDiagram> {
    let mut v: Vec<PlanarDiagram> = [
        "PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]",
        "PD[X(4,2,5,1),X(8,6,1,5),X(6,3,7,4),X(2,7,3,8)]",
        "PD[X(4,2,3,1),X(2,4,1,3)]",
        "PD[X(1,1,2,2)]",
        "PD[] circles=2",
    ]
    .iter()
    .map(|s| parse_pd(s).unwrap())
    .collect();
    v.push(braid_closure(3, &[1, -2, 1, -2]).unwrap());
    v.push(braid_closure(2, &[1, 1, 1, 1]).unwrap());
    v.push(braid_closure(3, &[1, 2, 2, -1, 2]).unwrap());
    v
}

#[test]
fn engine_matches_dense_complex() {
    for d in samples() {
        let want = dense_khovanov(&arcs(&d), d.signs(), d.extra_circles());
        assert_eq!(engine(&d), want, "{}", d.to_pd_string());
    }
}

#[test]
fn euler_characteristic_is_the_mirrored_jones_polynomial() {
    for d in samples() {
        let h = KhovanovComplex::assemble(&d, CubeOptions::default()).unwrap().homology(Coeffs::Q).unwrap();
        let chi = h.euler_by_q();
        let jones: BTreeMap<i64, i64> =
            jones_unnormalized(&arcs(&d), d.signs(), d.extra_circles()).into_iter().map(|(e, c)| (-e, c)).collect();
        assert_eq!(chi, jones, "{}", d.to_pd_string());
    }
}

fn words(strands: i32, len: usize) -> Vec<Vec<i32>> {
    let letters: Vec<i32> = (1..strands).flat_map(|g| [g, -g]).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.iter().flat_map(|w| letters.iter().map(move |&l| [w.as_slice(), &[l]].concat())).collect();
    }
    out
}

#[test]
fn circle_counts_match_union_find() {
    let mut diagrams: Vec<PlanarDiagram> = (1..=4).flat_map(planar_codes).collect();
    for len in 1..=6 {
        diagrams.extend(words(3, len).iter().map(|w| braid_closure(3, w).unwrap()));
    }
    for d in &diagrams {
        let cube = GradedCube::build(d, CubeOptions::default()).unwrap();
        let a = arcs(d);
        for v in cube.vertices() {
            assert_eq!(v.circles(), circle_count(&a, v.mask, d.extra_circles()), "{} at {:b}", d.to_pd_string(), v.mask);
        }
    }
}
