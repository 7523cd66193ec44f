//! Transformations of representations that change crossing counts in a
//! controlled way while keeping the intersection graph.

mod make_proper;

use std::collections::BTreeSet;

use crate::exec::Execution;
use crate::geometry::offset::offset_vertices;
use crate::geometry::{separation_bound, GeometryError, Point, Polyline, Rational, Vector};
use crate::representation::{
    crossing_matrix, crossing_matrix_with, intersection_point_counts, pair_crossings, CrossingMatrix, Representation,
    RepresentationError, VertexId,
};

pub use make_proper::{make_proper, make_proper_with};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurgeryError {
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("pair {0}-{1} has {2} crossing(s); index {3} is out of range")]
    SiteOutOfRange(String, String, usize, usize),
    #[error("pair {0}-{1} intersects but does not have exactly one curve in the side set")]
    Bipartition(String, String),
    #[error("pair {u}-{v} crosses {count} time(s), which cannot be raised to {m} in steps of two")]
    Parity { u: String, v: String, count: usize, m: usize },
    #[error("pair {u}-{v} already crosses {count} time(s), more than {m}")]
    Exceeds { u: String, v: String, count: usize, m: usize },
    #[error("pair {u}-{v} meets in {count} point(s), more than {k}")]
    NotKString { u: String, v: String, count: usize, k: usize },
    #[error("curve `{0}` is not simple")]
    NotSimple(String),
    #[error("no valid local perturbation found near {0}")]
    NoPerturbation(Point),
    #[error("construction did not verify: {0}")]
    Verification(String),
}

/// One crossing of a pair, addressed by its rank along the first curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgerySite {
    pub pair: (VertexId, VertexId),
    pub crossing_index: usize,
}

impl SurgerySite {
    pub fn new(u: impl Into<String>, v: impl Into<String>, crossing_index: usize) -> Self {
        SurgerySite { pair: (u.into(), v.into()), crossing_index }
    }
}

/// Corner points, in the frame `(a, b)`, of a zigzag with `rows` passes
/// across the other curve. The entry and exit points `(-3, 0)` and `(3, 0)`
/// lie on the original curve; `rows` must be odd.
fn zigzag_frame(rows: usize) -> Vec<(i64, i64)> {
    debug_assert!(rows % 2 == 1);
    let mut pts = vec![(-3, 0)];
    for r in 0..rows as i64 {
        let b = 2 * r - (rows as i64 - 1);
        if r % 2 == 0 {
            pts.extend([(-1, b), (1, b)]);
        } else {
            pts.extend([(1, b), (-1, b)]);
        }
    }
    pts.push((3, 0));
    pts
}

/// Reroutes `rerouted` near its crossing `at` with `other` through a zigzag
/// that crosses `other` `rows` times instead of once. All new vertices lie
/// within `(3 + rows - 1) * h` of `at`; the caller is responsible for that disk
/// meeting nothing but the two straight pieces through `at`.
pub fn zigzag(
    r: &Representation,
    rerouted: &str,
    other: &str,
    at: &Point,
    h: &Rational,
    rows: usize,
) -> Result<Representation, SurgeryError> {
    let v = r.curve(rerouted)?;
    let u = r.curve(other)?;
    let seg_of = |c: &Polyline, name: &str| {
        c.segments()
            .position(|(a, b)| crate::geometry::point_on_segment(at, a, b) && at != a && at != b)
            .ok_or_else(|| SurgeryError::Verification(format!("{at} is not interior to a segment of `{name}`")))
    };
    let sv = seg_of(v, rerouted)?;
    let su = seg_of(u, other)?;
    let d1 = {
        let (a, b) = v.segment(sv);
        b.sub(a).unit1()
    };
    let d2 = {
        let (a, b) = u.segment(su);
        b.sub(a).unit1()
    };
    let frame = |a: i64, b: i64| -> Point {
        let w: Vector = d1.scale(&Rational::from_int(a)).add(&d2.scale(&Rational::from_int(b)));
        at.offset(&w.scale(h))
    };
    let pts: Vec<Point> = zigzag_frame(rows).into_iter().map(|(a, b)| frame(a, b)).collect();
    let (a, b) = v.segment(sv);
    for end in [&pts[0], &pts[pts.len() - 1]] {
        if !crate::geometry::point_on_segment(end, a, b) || end == a || end == b {
            return Err(SurgeryError::Verification(format!("zigzag at {at} does not fit on its segment")));
        }
    }
    let mut verts: Vec<Point> = v.vertices()[..=sv].to_vec();
    verts.extend(pts);
    verts.extend_from_slice(&v.vertices()[sv + 1..]);
    let mut out = r.clone();
    out.set(rerouted, Polyline::new(verts)?);
    Ok(out)
}

/// Adds two crossings to the pair of `site`, rerouting its second curve with a
/// three-pass zigzag inside a disk of radius `3/8` of the separation bound.
pub fn add_two(r: &Representation, site: &SurgerySite) -> Result<Representation, SurgeryError> {
    let (u, v) = &site.pair;
    let crossings = pair_crossings(r, u, v)?;
    crossing_matrix(r)?;
    let x = crossings
        .get(site.crossing_index)
        .ok_or_else(|| SurgeryError::SiteOutOfRange(u.clone(), v.clone(), crossings.len(), site.crossing_index))?;
    let h = separation_bound(&r.polylines())?.halved(3);
    zigzag(r, v, u, &x.point, &h, 3)
}

/// The out-and-return double of a curve: the curve itself, a short link at
/// its last vertex, and the mitred parallel copy at distance `d` traversed
/// backwards.
pub fn doubled(c: &Polyline, d: &Rational) -> Option<Polyline> {
    let mut verts = c.vertices().to_vec();
    let mut back = offset_vertices(c, d);
    back.reverse();
    verts.extend(back);
    Polyline::new(verts).ok()
}

fn double_curves(r: &Representation, side: &BTreeSet<VertexId>, factor: usize) -> Result<Representation, SurgeryError> {
    let before = crossing_matrix(r)?;
    if r.is_empty() || side.is_empty() {
        return Ok(r.clone());
    }
    // Start strictly below a quarter of the separation bound and shrink until
    // the result verifies; mitred corners move the copy slightly farther out.
    let mut d = separation_bound(&r.polylines())?.halved(3);
    for _ in 0..48 {
        if let Some(out) = try_double(r, side, &d) {
            if let Ok(m) = crossing_matrix_with(&out, Execution::default()) {
                if scaled_matrix(&before, factor) == m {
                    return Ok(out);
                }
            }
        }
        d = d.halved(1);
    }
    Err(SurgeryError::Verification("doubling did not preserve the crossing pattern".into()))
}

fn try_double(r: &Representation, side: &BTreeSet<VertexId>, d: &Rational) -> Option<Representation> {
    let mut out = r.clone();
    for id in side {
        out.set(id, doubled(r.get(id)?, d)?);
    }
    Some(out)
}

fn scaled_matrix(m: &CrossingMatrix, factor: usize) -> CrossingMatrix {
    let mut out = CrossingMatrix::default();
    for (u, v, n) in m.entries() {
        out.add(u, v, n * factor);
    }
    out
}

/// Doubles every curve, multiplying every pair count by four.
pub fn quadruple(r: &Representation) -> Result<Representation, SurgeryError> {
    let all: BTreeSet<VertexId> = r.ids().cloned().collect();
    double_curves(r, &all, 4)
}

/// Doubles the curves of one side of a bipartition, multiplying every pair
/// count by two.
pub fn double_side(r: &Representation, side: &BTreeSet<VertexId>) -> Result<Representation, SurgeryError> {
    let m = crossing_matrix(r)?;
    for id in side {
        r.curve(id)?;
    }
    for (u, v, _) in m.entries() {
        if side.contains(u) == side.contains(v) {
            return Err(SurgeryError::Bipartition(u.clone(), v.clone()));
        }
    }
    double_curves(r, side, 2)
}

/// Raises every nonzero pair count to exactly `m`.
///
/// Each short pair gets one zigzag with `2 * need + 1` passes at its first
/// crossing. With `h = delta / (4 * rows)` every zigzag stays within `delta / 4`
/// of its crossing, so the disks are pairwise disjoint and each meets only the
/// two straight pieces through its centre.
pub fn equalize_to(r: &Representation, m: usize) -> Result<Representation, SurgeryError> {
    let counts = crossing_matrix(r)?;
    for (u, v, c) in counts.entries() {
        if c > m {
            return Err(SurgeryError::Exceeds { u: u.clone(), v: v.clone(), count: c, m });
        }
        if !(m - c).is_multiple_of(2) {
            return Err(SurgeryError::Parity { u: u.clone(), v: v.clone(), count: c, m });
        }
    }
    let short: Vec<(&VertexId, &VertexId, usize)> = counts.entries().filter(|e| e.2 < m).collect();
    if short.is_empty() {
        return Ok(r.clone());
    }
    let delta = separation_bound(&r.polylines())?;
    let mut cur = r.clone();
    for (u, v, c) in short {
        let rows = m - c + 1;
        let x = pair_crossings(r, u, v)?.swap_remove(0).point;
        let h = delta.halved(2) / Rational::from_int(rows as i64);
        cur = zigzag(&cur, v, u, &x, &h, rows)?;
    }
    Ok(cur)
}

/// Turns a (possibly improper) `k`-string representation into one where
/// every intersecting pair crosses exactly `8k` times: make it proper, double
/// every curve, then top up each pair with zigzags.
pub fn pipeline_8k(r: &Representation, k: usize) -> Result<Representation, SurgeryError> {
    let points = intersection_point_counts(r)?;
    if let Some((u, v, c)) = points.entries().find(|e| e.2 > k) {
        return Err(SurgeryError::NotKString { u: u.clone(), v: v.clone(), count: c, k });
    }
    let proper = make_proper(r)?;
    let quad = quadruple(&proper)?;
    equalize_to(&quad, 8 * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::{intersection_graph, is_precise, validate_proper};

    fn cross() -> Representation {
        Representation::from_curves([
            ("u", Polyline::from_ints(&[(0, 0), (2, 2)]).unwrap()),
            ("v", Polyline::from_ints(&[(0, 2), (2, 0)]).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn zigzag_frame_shape() {
        assert_eq!(zigzag_frame(3), vec![(-3, 0), (-1, -2), (1, -2), (1, 0), (-1, 0), (-1, 2), (1, 2), (3, 0)]);
        assert_eq!(zigzag_frame(1), vec![(-3, 0), (-1, 0), (1, 0), (3, 0)]);
    }

    #[test]
    fn add_two_twice() {
        let r = cross();
        let once = add_two(&r, &SurgerySite::new("u", "v", 0)).unwrap();
        assert!(validate_proper(&once).proper);
        assert_eq!(crossing_matrix(&once).unwrap().get("u", "v"), 3);
        let twice = add_two(&once, &SurgerySite::new("u", "v", 2)).unwrap();
        assert_eq!(crossing_matrix(&twice).unwrap().get("u", "v"), 5);
        assert!(matches!(
            add_two(&r, &SurgerySite::new("u", "v", 1)),
            Err(SurgeryError::SiteOutOfRange(_, _, 1, 1))
        ));
    }

    #[test]
    fn doubling_multiplies_counts() {
        let r = cross();
        assert_eq!(crossing_matrix(&quadruple(&r).unwrap()).unwrap().get("u", "v"), 4);
        let side: BTreeSet<VertexId> = ["u".to_string()].into();
        let d = double_side(&r, &side).unwrap();
        assert_eq!(crossing_matrix(&d).unwrap().get("u", "v"), 2);
        assert_eq!(d.get("v"), r.get("v"));
        let both: BTreeSet<VertexId> = ["u".to_string(), "v".to_string()].into();
        assert!(matches!(double_side(&r, &both), Err(SurgeryError::Bipartition(..))));
        assert!(quadruple(&Representation::new()).unwrap().is_empty());
    }

    #[test]
    fn equalize_checks_parity() {
        let r = cross();
        let q = quadruple(&r).unwrap();
        let e = equalize_to(&q, 8).unwrap();
        assert!(is_precise(&e, 8).unwrap());
        assert_eq!(intersection_graph(&e).unwrap(), intersection_graph(&r).unwrap());
        assert!(matches!(equalize_to(&q, 7), Err(SurgeryError::Parity { count: 4, m: 7, .. })));
        assert!(matches!(equalize_to(&q, 2), Err(SurgeryError::Exceeds { count: 4, m: 2, .. })));
    }
}
