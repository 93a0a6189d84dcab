use std::collections::HashMap;

use super::{ArcLabel, Crossing, PlanarDiagram};
use crate::error::{Error, Result};

/// PD code of the closure of a braid word on `strands` strands.
///
/// Letters are 1-based generator indices; `i` is the positive crossing
/// sigma_i (strand at position i passes over to position i+1) and `-i` its
/// inverse. Arcs are relabelled 1, 2, ... along the orientation so the result
/// follows the usual consecutive-label convention. Strands never touched by a
/// letter close up into free circles.
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<PlanarDiagram> {
    if strands == 0 {
        return Err(Error::MalformedPd("braid needs at least one strand".into()));
    }
    let mut next: ArcLabel = 0;
    let mut fresh = || {
        next += 1;
        next
    };
    let bottom: Vec<ArcLabel> = (0..strands).map(|_| fresh()).collect();
    let mut cur = bottom.clone();
    let mut tuples: Vec<[ArcLabel; 4]> = Vec::with_capacity(word.len());
    let mut entering: Vec<bool> = Vec::with_capacity(4 * word.len());
    for &g in word {
        let i = g.unsigned_abs() as usize;
        if g == 0 || i >= strands {
            return Err(Error::MalformedPd(format!("braid letter {g} out of range for {strands} strands")));
        }
        let (x, y) = (cur[i - 1], cur[i]);
        let (left, right) = (fresh(), fresh());
        if g > 0 {
            // over strand runs bottom-left to top-right
            tuples.push([y, right, left, x]);
            entering.extend([true, false, false, true]);
        } else {
            tuples.push([x, y, right, left]);
            entering.extend([true, true, false, false]);
        }
        cur[i - 1] = left;
        cur[i] = right;
    }

    // Closing: the top arc at each position is the bottom arc at that position.
    let mut alias: HashMap<ArcLabel, ArcLabel> = HashMap::new();
    let mut free = 0;
    for (b, t) in bottom.iter().zip(&cur) {
        if b == t {
            free += 1;
        } else {
            alias.insert(*t, *b);
        }
    }
    for t in &mut tuples {
        for a in t.iter_mut() {
            if let Some(&b) = alias.get(a) {
                *a = b;
            }
        }
    }
    if tuples.is_empty() {
        return PlanarDiagram::new(Vec::new(), None, None, Some(free));
    }
    let crossings = tuples.into_iter().map(|arcs| Crossing { arcs, in_n: true }).collect();
    let raw = PlanarDiagram::build(crossings, free, None, Some(entering))?;
    consecutive_labels(&raw)
}

/// Relabels arcs 1..m in traversal order, component by component.
fn consecutive_labels(d: &PlanarDiagram) -> Result<PlanarDiagram> {
    let partner = d.partner();
    let pos_arc = d.pos_arc();
    let n = partner.len();
    let mut new_label: Vec<Option<ArcLabel>> = vec![None; d.arc_count()];
    let mut counter = 0;
    for start in 0..n {
        // Start each component on an arc that enters a crossing.
        if !d.entering[start] || new_label[pos_arc[start]].is_some() {
            continue;
        }
        let mut p = start;
        loop {
            let a = pos_arc[p];
            if new_label[a].is_some() {
                break;
            }
            counter += 1;
            new_label[a] = Some(counter);
            let exit = p ^ 2;
            p = partner[exit];
        }
    }
    let labels = d.arc_labels().to_vec();
    let map: HashMap<ArcLabel, ArcLabel> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, new_label[i].expect("every arc lies on a component")))
        .collect();
    d.relabel(|l| map[&l])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trefoil_from_braid() {
        let d = braid_closure(2, &[1, 1, 1]).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.signs(), &[1, 1, 1]);
        let m = braid_closure(2, &[-1, -1, -1]).unwrap();
        assert_eq!(m.signs(), &[-1, -1, -1]);
    }

    #[test]
    fn hopf_and_unused_strands() {
        let h = braid_closure(2, &[1, 1]).unwrap();
        assert_eq!(h.component_count(), 2);
        let u = braid_closure(3, &[1]).unwrap();
        assert_eq!(u.component_count(), 2);
        assert_eq!(u.extra_circles(), 1);
        let e = braid_closure(2, &[]).unwrap();
        assert_eq!(e.component_count(), 2);
    }

    #[test]
    fn torus_knot_t45() {
        let word: Vec<i32> = (0..5).flat_map(|_| [1, 2, 3]).collect();
        let d = braid_closure(4, &word).unwrap();
        assert_eq!(d.crossing_count(), 15);
        assert_eq!(d.component_count(), 1);
        assert!(d.signs().iter().all(|&s| s == 1));
        // consecutive labels along the orientation
        assert_eq!(d.arc_labels(), (1..=30).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn bad_letters() {
        assert!(braid_closure(2, &[2]).is_err());
        assert!(braid_closure(2, &[0]).is_err());
        assert!(braid_closure(0, &[]).is_err());
    }
}
