use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::SparseIntMatrix;

type Row = BTreeMap<usize, BigInt>;

/// Rank over the rationals, by fraction-free row echelon form with rows kept
/// primitive.
pub fn rank_q(m: &SparseIntMatrix) -> usize {
    let mut rows: Vec<Row> = vec![Row::new(); m.rows()];
    for (r, c, v) in m.iter() {
        rows[r].insert(c, v.clone());
    }
    let mut pivots: HashMap<usize, Row> = HashMap::new();
    for mut row in rows {
        while let Some((&lead, a)) = row.iter().next() {
            let Some(p) = pivots.get(&lead) else { break };
            let b = &p[&lead];
            let g = a.gcd(b);
            let (fa, fb) = (b / &g, a / &g);
            let mut next = Row::new();
            for (&c, v) in &row {
                next.insert(c, v * &fa);
            }
            for (&c, v) in p {
                let e = next.entry(c).or_default();
                *e -= v * &fb;
                if e.is_zero() {
                    next.remove(&c);
                }
            }
            make_primitive(&mut next);
            row = next;
        }
        if let Some(&lead) = row.keys().next() {
            pivots.insert(lead, row);
        }
    }
    pivots.len()
}

fn make_primitive(row: &mut Row) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g > BigInt::one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
    debug_assert!(row.values().all(|v| !v.is_zero() && v.abs() >= BigInt::one()));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(rank_q(&SparseIntMatrix::new(3, 3)), 0);
        assert_eq!(rank_q(&SparseIntMatrix::from_dense(&[vec![1, 2], vec![2, 4]])), 1);
        assert_eq!(rank_q(&SparseIntMatrix::from_dense(&[vec![1, 2], vec![3, 4]])), 2);
        assert_eq!(
            rank_q(&SparseIntMatrix::from_dense(&[vec![2, 0, 2], vec![0, 3, 3], vec![2, 3, 5]])),
            2
        );
    }
}
