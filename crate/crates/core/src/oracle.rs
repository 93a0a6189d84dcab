//! Slow reference computations used to cross-check the engine.
//!
//! Nothing here touches the traced cube or the sparse chain code: circles
//! come from union-find on arc labels, matrices are dense, and the Smith form
//! is a textbook loop over `i128`. Only genuine diagrams with every crossing
//! resolved are handled.

use std::collections::BTreeMap;

type Arcs = [i64; 4];

struct Circles {
    of_label: BTreeMap<i64, usize>,
    count: usize,
}

fn circles(crossings: &[Arcs], v: u64, extra: usize) -> Circles {
    let mut labels: Vec<i64> = crossings.iter().flatten().copied().collect();
    labels.sort();
    labels.dedup();
    let idx: BTreeMap<i64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut parent: Vec<usize> = (0..labels.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut join = |a: i64, b: i64| {
        let (ra, rb) = (find(&mut parent, idx[&a]), find(&mut parent, idx[&b]));
        parent[ra] = rb;
    };
    for (i, &[a, b, c, d]) in crossings.iter().enumerate() {
        if v >> i & 1 == 0 {
            join(a, b);
            join(c, d);
        } else {
            join(a, d);
            join(b, c);
        }
    }
    let mut root_id = BTreeMap::new();
    let mut of_label = BTreeMap::new();
    for &l in &labels {
        let r = find(&mut parent, idx[&l]);
        let n = root_id.len();
        let id = *root_id.entry(r).or_insert(n);
        of_label.insert(l, id);
    }
    Circles { count: root_id.len() + extra, of_label }
}

/// Number of circles in resolution `v` (bit `i` is crossing `i`), counted by
/// union-find.
pub fn circle_count(crossings: &[Arcs], v: u64, extra: usize) -> usize {
    circles(crossings, v, extra).count
}

fn add(p: &mut BTreeMap<i64, i64>, e: i64, c: i64) {
    let x = p.entry(e).or_default();
    *x += c;
    if *x == 0 {
        p.remove(&e);
    }
}

/// Kauffman bracket `<D>` as exponents of `A`, with `<O> = -A² - A⁻²` for
/// every circle. The A-smoothing of `X(a,b,c,d)` joins `a,b` and `c,d`.
pub fn kauffman_bracket(crossings: &[Arcs], extra: usize) -> BTreeMap<i64, i64> {
    let n = crossings.len();
    let mut total = BTreeMap::new();
    for s in 0..1u64 << n {
        let b = s.count_ones() as i64;
        let k = circles(crossings, s, extra).count;
        // A^(#A - #B) (-A² - A⁻²)^k
        let mut term = BTreeMap::from([(n as i64 - 2 * b, 1i64)]);
        for _ in 0..k {
            let mut next = BTreeMap::new();
            for (&e, &c) in &term {
                add(&mut next, e + 2, -c);
                add(&mut next, e - 2, -c);
            }
            term = next;
        }
        for (e, c) in term {
            add(&mut total, e, c);
        }
    }
    total
}

/// Unnormalised Jones polynomial `Ĵ(q)`, normalised so the unknot gives
/// `q + q⁻¹`, obtained from the bracket by `A⁻² = -q` and the writhe factor.
pub fn jones_unnormalized(crossings: &[Arcs], signs: &[i8], extra: usize) -> BTreeMap<i64, i64> {
    let n = crossings.len() as i64;
    let np = signs.iter().filter(|&&s| s > 0).count() as i64;
    let nm = n - np;
    let mut out = BTreeMap::new();
    for (e, c) in kauffman_bracket(crossings, extra) {
        let r = (n - e) / 2;
        let sign = if (r + nm) % 2 == 0 { 1 } else { -1 };
        add(&mut out, r + np - 2 * nm, sign * c);
    }
    out
}

/// Homology of one bigrading: free rank and torsion coefficients.
pub type DenseGroup = (usize, Vec<i128>);

/// Khovanov homology of the cube complex, where the differential runs from
/// `v` to `v - e_c`. Gradings `h = -|v| + n₋`, `q = Q - |v| - n₊ + 2n₋`.
pub fn dense_khovanov(crossings: &[Arcs], signs: &[i8], extra: usize) -> BTreeMap<(i64, i64), DenseGroup> {
    let n = crossings.len();
    let np = signs.iter().filter(|&&s| s > 0).count() as i64;
    let nm = n as i64 - np;
    let states: Vec<Circles> = (0..1u64 << n).map(|v| circles(crossings, v, extra)).collect();
    let mut gens: Vec<(u64, u64, i64, i64)> = Vec::new();
    for (v, st) in states.iter().enumerate() {
        for lab in 0..1u64 << st.count {
            let plus = lab.count_ones() as i64;
            let ones = v.count_ones() as i64;
            let big_q = 2 * plus - st.count as i64;
            gens.push((v as u64, lab, -ones + nm, big_q - ones - np + 2 * nm));
        }
    }
    let index: BTreeMap<(u64, u64), usize> = gens.iter().enumerate().map(|(i, g)| ((g.0, g.1), i)).collect();
    let mut d = vec![vec![0i128; gens.len()]; gens.len()];
    for (src, &(v, lab, _, _)) in gens.iter().enumerate() {
        let sv = &states[v as usize];
        for c in 0..n {
            if v >> c & 1 == 0 {
                continue;
            }
            let u = v & !(1 << c);
            let su = &states[u as usize];
            let sign = if (v & ((1 << c) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
            // circle correspondence through shared labels
            let mut to_u: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (l, &cv) in &sv.of_label {
                let cu = su.of_label[l];
                let e = to_u.entry(cv).or_default();
                if !e.contains(&cu) {
                    e.push(cu);
                }
            }
            let mut from_u: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (&cv, cus) in &to_u {
                for &cu in cus {
                    from_u.entry(cu).or_default().push(cv);
                }
            }
            let traced_v = sv.count - extra;
            let traced_u = su.count - extra;
            let on = |i: usize| lab >> i & 1 == 1;
            let mut images: Vec<u64> = vec![0];
            for cu in 0..su.count {
                let pre: Vec<usize> = if cu >= traced_u {
                    vec![traced_v + cu - traced_u]
                } else {
                    from_u[&cu].clone()
                };
                if pre.len() == 2 {
                    // merge
                    match (on(pre[0]), on(pre[1])) {
                        (true, true) => images.iter_mut().for_each(|x| *x |= 1 << cu),
                        (false, false) => images.clear(),
                        _ => {}
                    }
                    continue;
                }
                let cv = pre[0];
                let split_with = (0..su.count).find(|&o| o != cu && o < traced_u && from_u[&o] == [cv]);
                match split_with {
                    Some(other) if on(cv) && cu < other => {
                        // Δ(+) = +- + -+
                        let mut next = Vec::new();
                        for &x in &images {
                            next.push(x | 1 << cu);
                            next.push(x | 1 << other);
                        }
                        images = next;
                    }
                    Some(_) => {}
                    None => {
                        if on(cv) {
                            images.iter_mut().for_each(|x| *x |= 1 << cu);
                        }
                    }
                }
            }
            for img in images {
                let tgt = index[&(u, img)];
                d[tgt][src] += sign;
            }
        }
    }

    let mut out = BTreeMap::new();
    let mut bigradings: Vec<(i64, i64)> = gens.iter().map(|g| (g.2, g.3)).collect();
    bigradings.sort();
    bigradings.dedup();
    for (h, q) in bigradings {
        let at = |hh: i64| -> Vec<usize> { (0..gens.len()).filter(|&i| gens[i].2 == hh && gens[i].3 == q).collect() };
        let (prev, here, next) = (at(h - 1), at(h), at(h + 1));
        let block = |rows: &[usize], cols: &[usize]| -> Vec<Vec<i128>> {
            rows.iter().map(|&r| cols.iter().map(|&c| d[r][c]).collect()).collect()
        };
        let out_rank = dense_snf(block(&next, &here)).len();
        let incoming = dense_snf(block(&here, &prev));
        let free = here.len() - out_rank - incoming.len();
        let torsion: Vec<i128> = incoming.into_iter().filter(|&x| x > 1).collect();
        if free > 0 || !torsion.is_empty() {
            out.insert((h, q), (free, torsion));
        }
    }
    out
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Nonzero invariant factors of a dense integer matrix.
pub fn dense_snf(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs())
        else {
            break;
        };
        m.swap(t, pr);
        for row in m.iter_mut() {
            row.swap(t, pc);
        }
        let mut done = true;
        for i in t + 1..rows {
            let f = m[i][t] / m[t][t];
            for j in t..cols {
                m[i][j] -= f * m[t][j];
            }
            done &= m[i][t] == 0;
        }
        for j in t + 1..cols {
            let f = m[t][j] / m[t][t];
            for row in m.iter_mut().skip(t) {
                row[j] -= f * row[t];
            }
            done &= m[t][j] == 0;
        }
        if !done {
            continue;
        }
        // the pivot must divide the rest, else fold a row in and retry
        if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % m[t][t] != 0)) {
            for j in t..cols {
                m[t][j] += m[i][j];
            }
            continue;
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = gcd(diag[i], diag[j]);
            let l = diag[i] / g * diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}
