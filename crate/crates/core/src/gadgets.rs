//! Deterministic generators for the small representations the separation
//! arguments are built on.

use crate::geometry::Polyline;
use crate::representation::Representation;
use crate::surgery::SurgeryError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("{0} needs k >= {1}, got {2}")]
    TooSmall(&'static str, usize, usize),
    #[error("K8 bundles need odd k, got {0}")]
    EvenK(usize),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

/// Names accepted by [`generate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    Sausage,
    G1,
    Gk,
    K8,
    OddCounterexample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetSpec {
    pub kind: GadgetKind,
    pub k: usize,
}

pub fn generate(spec: GadgetSpec) -> Result<Representation, GadgetError> {
    match spec.kind {
        GadgetKind::Sausage => sausage(spec.k),
        GadgetKind::G1 => Ok(gadget_g1()),
        GadgetKind::Gk => gadget_gk(spec.k),
        GadgetKind::K8 => gadget_k8(spec.k),
        GadgetKind::OddCounterexample => Ok(gadget_odd_counterexample()),
    }
}

fn curves(list: Vec<(&str, Vec<(i64, i64)>)>) -> Representation {
    Representation::from_curves(list.into_iter().map(|(n, pts)| (n, Polyline::from_ints(&pts).expect("valid gadget curve"))))
        .expect("distinct gadget names")
}

/// Two interleaved zigzags `u` and `v` crossing exactly `n` times.
pub fn sausage(n: usize) -> Result<Representation, GadgetError> {
    if n == 0 {
        return Err(GadgetError::TooSmall("sausage", 1, 0));
    }
    let u = (0..=n as i64).map(|i| (2 * i, if i % 2 == 0 { 0 } else { 2 })).collect();
    let v = (0..=n as i64).map(|i| (2 * i, if i % 2 == 0 { 2 } else { 0 })).collect();
    Ok(curves(vec![("u", u), ("v", v)]))
}

/// The eight-curve representation `R_1` with every intersecting pair
/// crossing once, which admits no faithful extension to two crossings.
pub fn gadget_g1() -> Representation {
    curves(vec![
        ("a1", vec![(0, 7), (7, 0)]),
        ("a2", vec![(1, 7), (0, 6), (6, 0)]),
        ("b2", vec![(3, 7), (0, 4), (4, 0)]),
        ("b1", vec![(5, 0), (1, 4), (3, 6), (2, 7)]),
        ("d2", vec![(7, 7), (0, 0)]),
        ("d1", vec![(6, 7), (7, 6), (1, 0)]),
        ("c2", vec![(5, 7), (4, 6), (6, 4), (2, 0)]),
        ("c1", vec![(3, 0), (7, 4), (4, 7)]),
    ])
}

/// Four curves `a1, a2, b1, b2`, pairwise crossing exactly `k` times: the two
/// `a` curves braid `k - 1` times on the left, every `a` crosses every `b`
/// once per step of a `k`-step middle section, and the last swap of each
/// braid happens at the right end.
pub fn gadget_gk(k: usize) -> Result<Representation, GadgetError> {
    if k < 2 {
        return Err(GadgetError::TooSmall("Gk", 2, k));
    }
    let l = k as i64 - 1;
    let m = l + 2 * k as i64;
    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    let mut b1 = Vec::new();
    let mut b2 = Vec::new();
    for i in 0..=l {
        let even = (l - i) % 2 == 0;
        a1.push((i, if even { 2 } else { 3 }));
        a2.push((i, if even { 3 } else { 2 }));
        b1.push((i, if even { 0 } else { 1 }));
        b2.push((i, if even { 1 } else { 0 }));
    }
    for j in 1..=k as i64 {
        let x = l + 2 * j;
        let even = j % 2 == 0;
        a1.push((x, if even { 2 } else { 0 }));
        a2.push((x, if even { 3 } else { 1 }));
        b1.push((x, if even { 0 } else { 2 }));
        b2.push((x, if even { 1 } else { 3 }));
    }
    let ends = if k.is_multiple_of(2) { [3, 2, 1, 0] } else { [1, 0, 3, 2] };
    a1.push((m + 1, ends[0]));
    a2.push((m + 1, ends[1]));
    b1.push((m + 1, ends[2]));
    b2.push((m + 1, ends[3]));
    Ok(curves(vec![("a1", a1), ("a2", a2), ("b1", b1), ("b2", b2)]))
}

/// Left-end order (top to bottom) of the `K8` wires and the order in which
/// each wire meets the others from its left end.
///
/// This is the pseudoline arrangement of four vertical curves `v1..v4` on a
/// 4x4 grid with four horizontal curves `h1..h4`, where the lower tails of the
/// verticals fan out so that `v1, v2` each cross `v3, v4`, their upper tails
/// swap `v1/v2` and `v3/v4`, and the horizontals do the same mirrored. Along
/// every vertical its crossings with the horizontals sit between the two
/// vertical-vertical ones, and vice versa.
const K8_START: [&str; 8] = ["v3", "v4", "v1", "v2", "h2", "h1", "h4", "h3"];
const K8_ORDER: [(&str, [&str; 7]); 8] = [
    ("v1", ["v2", "h4", "h3", "h2", "h1", "v3", "v4"]),
    ("v2", ["v1", "h4", "h3", "h2", "h1", "v3", "v4"]),
    ("v3", ["v4", "h4", "h3", "h2", "h1", "v2", "v1"]),
    ("v4", ["v3", "h4", "h3", "h2", "h1", "v2", "v1"]),
    ("h1", ["h4", "h3", "v1", "v2", "v3", "v4", "h2"]),
    ("h2", ["h4", "h3", "v1", "v2", "v3", "v4", "h1"]),
    ("h3", ["h1", "h2", "v1", "v2", "v3", "v4", "h4"]),
    ("h4", ["h1", "h2", "v1", "v2", "v3", "v4", "h3"]),
];

/// Groups the adjacent transpositions realizing the prescribed crossing
/// orders into rounds of disjoint swaps (greedily, as early as possible).
/// Each round lists the upper level of every swapped pair.
fn wiring_rounds(start: &[&str], orders: &[(&str, [&str; 7])]) -> Vec<Vec<usize>> {
    let mut levels: Vec<&str> = start.to_vec();
    let mut done: std::collections::BTreeMap<&str, usize> = orders.iter().map(|(w, _)| (*w, 0)).collect();
    let next = |w: &str, done: &std::collections::BTreeMap<&str, usize>| {
        let seq = &orders.iter().find(|(x, _)| *x == w).expect("known wire").1;
        seq.get(done[w]).copied()
    };
    let mut rounds = Vec::new();
    while done.values().any(|&d| d < 7) {
        let mut swaps = Vec::new();
        let mut i = 0;
        while i + 1 < levels.len() {
            let (a, b) = (levels[i], levels[i + 1]);
            if next(a, &done) == Some(b) && next(b, &done) == Some(a) {
                swaps.push(i);
                i += 2;
            } else {
                i += 1;
            }
        }
        assert!(!swaps.is_empty(), "crossing orders are not realizable as a wiring diagram");
        for &i in &swaps {
            *done.get_mut(levels[i]).unwrap() += 1;
            *done.get_mut(levels[i + 1]).unwrap() += 1;
            levels.swap(i, i + 1);
        }
        rounds.push(swaps);
    }
    rounds
}

/// Eight curves pairwise crossing exactly `k` times (`k` odd), drawn as a
/// wiring diagram: every swap of two neighbouring wires becomes a bundle of
/// `k` consecutive crossings, as in the sausage construction.
pub fn gadget_k8(k: usize) -> Result<Representation, GadgetError> {
    if k.is_multiple_of(2) {
        return Err(GadgetError::EvenK(k));
    }
    let rounds = wiring_rounds(&K8_START, &K8_ORDER);
    let n = K8_START.len();
    let y_of = |level: usize| 2 * (n - 1 - level) as i64;
    let mut at_level: Vec<usize> = (0..n).collect();
    let mut paths: Vec<Vec<(i64, i64)>> = (0..n).map(|w| vec![(0, y_of(w))]).collect();
    let mut x = 0;
    for swaps in &rounds {
        for _ in 0..k {
            x += 2;
            for &i in swaps {
                at_level.swap(i, i + 1);
            }
            for (level, &w) in at_level.iter().enumerate() {
                paths[w].push((x, y_of(level)));
            }
        }
    }
    let list = (0..n).map(|w| (K8_START[w], drop_collinear(&paths[w]))).collect();
    Ok(curves(list))
}

fn drop_collinear(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for &p in pts {
        if out.len() >= 2 {
            let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
            if (b.0 - a.0) * (p.1 - b.1) == (b.1 - a.1) * (p.0 - b.0) {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

/// Two bold curves `b1, b2` and six thin curves `t1..t6`, every pair crossing
/// exactly twice. Thin curve `t_j` hooks around both bold curves and dips
/// below the lower arms of `t_1..t_{j-1}`.
pub fn gadget_odd_counterexample() -> Representation {
    let mut list = vec![("b1", vec![(2, 26), (2, 0)]), ("b2", vec![(26, 0), (26, 26)])];
    let names = ["t1", "t2", "t3", "t4", "t5", "t6"];
    for j in 1..=6i64 {
        let mut t = vec![(3, 4 * j), (0, 4 * j), (0, 4 * j - 2)];
        if j >= 2 {
            // The figure's narrow V notch, widened into a U so that its two
            // crossings with each lower horizontal stay two units apart.
            t.extend([(4 * j - 3, 4 * j - 2), (4 * j - 3, 0), (4 * j - 1, 0), (4 * j - 1, 4 * j - 2)]);
        }
        t.extend([(28, 4 * j - 2), (28, 4 * j), (25, 4 * j)]);
        list.push((names[j as usize - 1], t));
    }
    curves(list)
}
