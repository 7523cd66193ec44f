//! Named curve families, properness checking, crossing matrices and the
//! class-membership predicates built on them.

mod format;
mod graph;

use std::collections::{BTreeMap, BTreeSet};

use crate::exec::Execution;
use crate::geometry::scan::{scan, SegmentHit};
use crate::geometry::{ContactKind, CurvePos, Point, Polyline};

pub use format::{parse, serialize, ParseError};
pub use graph::{contains_induced, GraphError, IntersectionGraph};

pub type VertexId = String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepresentationError {
    #[error("representation is not proper: {0} violation(s), first: {1}")]
    Improper(usize, String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex id must be a nonempty token without whitespace: `{0}`")]
    BadVertexId(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("curves `{0}` and `{1}` overlap")]
    Overlap(String, String),
}

/// A string representation: one polyline per vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Representation {
    curves: BTreeMap<VertexId, Polyline>,
    /// Optional crossing number declared by the producer of a file.
    pub declared_k: Option<u64>,
}

impl Representation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_curves<I, S>(curves: I) -> Result<Self, RepresentationError>
    where
        I: IntoIterator<Item = (S, Polyline)>,
        S: Into<String>,
    {
        let mut r = Representation::new();
        for (id, c) in curves {
            r.insert(id.into(), c)?;
        }
        Ok(r)
    }

    pub fn insert(&mut self, id: VertexId, curve: Polyline) -> Result<(), RepresentationError> {
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(RepresentationError::BadVertexId(id));
        }
        if self.curves.contains_key(&id) {
            return Err(RepresentationError::DuplicateVertex(id));
        }
        self.curves.insert(id, curve);
        Ok(())
    }

    /// Replaces an existing curve (or adds it).
    pub fn set(&mut self, id: &str, curve: Polyline) {
        self.curves.insert(id.to_string(), curve);
    }

    pub fn get(&self, id: &str) -> Option<&Polyline> {
        self.curves.get(id)
    }

    pub fn curve(&self, id: &str) -> Result<&Polyline, RepresentationError> {
        self.get(id).ok_or_else(|| RepresentationError::UnknownVertex(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &VertexId> {
        self.curves.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &Polyline)> {
        self.curves.iter()
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn polylines(&self) -> Vec<Polyline> {
        self.curves.values().cloned().collect()
    }

    /// The sub-representation on the given vertices.
    pub fn restrict<'a, I: IntoIterator<Item = &'a str>>(&self, ids: I) -> Representation {
        let mut r = Representation::new();
        for id in ids {
            if let Some(c) = self.curves.get(id) {
                r.curves.insert(id.to_string(), c.clone());
            }
        }
        r
    }

    fn index(&self) -> Vec<&VertexId> {
        self.curves.keys().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    SelfIntersection,
    Overlap,
    TriplePoint,
    ContactAtBendOrEndpoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Point,
    pub vertices: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropernessReport {
    pub proper: bool,
    pub violations: Vec<Violation>,
}

impl PropernessReport {
    fn describe_first(&self) -> String {
        self.violations
            .first()
            .map(|v| format!("{:?} at {} involving {}", v.kind, v.location, v.vertices.join(",")))
            .unwrap_or_default()
    }
}

/// Raw contact data of a whole representation, gathered in one scan.
pub(crate) struct Arrangement<'a> {
    pub ids: Vec<&'a VertexId>,
    pub hits: Vec<SegmentHit>,
}

impl<'a> Arrangement<'a> {
    pub fn build(r: &'a Representation, exec: Execution) -> Self {
        let ids = r.index();
        let curves: Vec<Polyline> = r.curves.values().cloned().collect();
        let hits = scan(&curves, true, exec);
        Arrangement { ids, hits }
    }
}

pub fn validate_proper(r: &Representation) -> PropernessReport {
    validate_proper_with(r, Execution::default())
}

/// Checks every curve is simple, no two curves overlap, every contact of
/// two curves is a proper crossing, and no point lies on three curves.
pub fn validate_proper_with(r: &Representation, exec: Execution) -> PropernessReport {
    let arr = Arrangement::build(r, exec);
    let curves: Vec<&Polyline> = r.curves.values().collect();
    let mut violations = Vec::new();
    let mut at_point: BTreeMap<Point, BTreeSet<usize>> = BTreeMap::new();
    for h in &arr.hits {
        let name = |c: usize| arr.ids[c].clone();
        if h.curve_a == h.curve_b {
            // Consecutive segments may only share their common vertex.
            let adjacent_ok = h.seg_b == h.seg_a + 1
                && h.contact.kind == ContactKind::TouchAtEndpoint
                && h.contact.point.as_ref() == Some(curves[h.curve_a].segment(h.seg_b).0);
            if !adjacent_ok {
                let location = h.contact.point.clone().unwrap_or_else(|| curves[h.curve_a].segment(h.seg_b).0.clone());
                violations.push(Violation {
                    kind: ViolationKind::SelfIntersection,
                    location,
                    vertices: vec![name(h.curve_a)],
                });
            }
            continue;
        }
        match h.contact.kind {
            ContactKind::Empty => {}
            ContactKind::Overlap => {
                let (a, b) = curves[h.curve_a].segment(h.seg_a);
                let (c, d) = curves[h.curve_b].segment(h.seg_b);
                // Report the first point of the shared stretch that is an endpoint.
                let location = [a, b, c, d]
                    .into_iter()
                    .find(|p| crate::geometry::point_on_segment(p, a, b) && crate::geometry::point_on_segment(p, c, d))
                    .cloned()
                    .unwrap_or_else(|| a.clone());
                violations.push(Violation {
                    kind: ViolationKind::Overlap,
                    location,
                    vertices: vec![name(h.curve_a), name(h.curve_b)],
                });
            }
            kind => {
                let p = h.contact.point.clone().expect("point contact");
                if kind != ContactKind::ProperCrossing {
                    violations.push(Violation {
                        kind: ViolationKind::ContactAtBendOrEndpoint,
                        location: p.clone(),
                        vertices: vec![name(h.curve_a), name(h.curve_b)],
                    });
                }
                let set = at_point.entry(p).or_default();
                set.insert(h.curve_a);
                set.insert(h.curve_b);
            }
        }
    }
    for (p, set) in at_point {
        if set.len() >= 3 {
            violations.push(Violation {
                kind: ViolationKind::TriplePoint,
                location: p,
                vertices: set.into_iter().map(|c| arr.ids[c].clone()).collect(),
            });
        }
    }
    violations.sort_by(|a, b| (a.kind, &a.location, &a.vertices).cmp(&(b.kind, &b.location, &b.vertices)));
    violations.dedup();
    PropernessReport { proper: violations.is_empty(), violations }
}

/// Symmetric per-pair crossing numbers. Pairs that do not cross are absent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossingMatrix {
    counts: BTreeMap<(VertexId, VertexId), usize>,
}

impl CrossingMatrix {
    fn key(u: &str, v: &str) -> (VertexId, VertexId) {
        if u <= v {
            (u.to_string(), v.to_string())
        } else {
            (v.to_string(), u.to_string())
        }
    }

    pub fn get(&self, u: &str, v: &str) -> usize {
        self.counts.get(&Self::key(u, v)).copied().unwrap_or(0)
    }

    pub(crate) fn add(&mut self, u: &str, v: &str, n: usize) {
        if n > 0 {
            *self.counts.entry(Self::key(u, v)).or_insert(0) += n;
        }
    }

    /// Nonzero entries with `u < v`.
    pub fn entries(&self) -> impl Iterator<Item = (&VertexId, &VertexId, usize)> {
        self.counts.iter().map(|((u, v), &n)| (u, v, n))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.values().copied()
    }
}

fn require_proper(r: &Representation, exec: Execution) -> Result<(), RepresentationError> {
    let rep = validate_proper_with(r, exec);
    if rep.proper {
        Ok(())
    } else {
        Err(RepresentationError::Improper(rep.violations.len(), rep.describe_first()))
    }
}

pub fn crossing_matrix(r: &Representation) -> Result<CrossingMatrix, RepresentationError> {
    crossing_matrix_with(r, Execution::default())
}

/// Number of proper crossings for every pair of curves. Requires properness.
pub fn crossing_matrix_with(r: &Representation, exec: Execution) -> Result<CrossingMatrix, RepresentationError> {
    require_proper(r, exec)?;
    let arr = Arrangement::build(r, exec);
    let mut m = CrossingMatrix::default();
    for h in &arr.hits {
        if h.curve_a != h.curve_b && h.contact.kind == ContactKind::ProperCrossing {
            m.add(arr.ids[h.curve_a], arr.ids[h.curve_b], 1);
        }
    }
    Ok(m)
}

/// Number of distinct common points of every pair of curves, for inputs that
/// need not be proper (touchings, triple points, contacts at bends). Curves
/// must not overlap.
pub fn intersection_point_counts(r: &Representation) -> Result<CrossingMatrix, RepresentationError> {
    let arr = Arrangement::build(r, Execution::default());
    let mut pts: BTreeSet<(usize, usize, Point)> = BTreeSet::new();
    for h in &arr.hits {
        if h.curve_a == h.curve_b {
            continue;
        }
        match h.contact.kind {
            ContactKind::Overlap => {
                return Err(RepresentationError::Overlap(arr.ids[h.curve_a].clone(), arr.ids[h.curve_b].clone()))
            }
            ContactKind::Empty => {}
            _ => {
                pts.insert((h.curve_a, h.curve_b, h.contact.point.clone().expect("point contact")));
            }
        }
    }
    let mut m = CrossingMatrix::default();
    for (a, b, _) in pts {
        m.add(arr.ids[a], arr.ids[b], 1);
    }
    Ok(m)
}

pub fn intersection_graph(r: &Representation) -> Result<IntersectionGraph, RepresentationError> {
    let m = crossing_matrix(r)?;
    Ok(IntersectionGraph::from_matrix(r.ids().cloned(), &m))
}

/// Every intersecting pair crosses exactly `k` times.
pub fn is_precise(r: &Representation, k: usize) -> Result<bool, RepresentationError> {
    Ok(crossing_matrix(r)?.values().all(|c| c == k))
}

/// Every pair crosses at most `k` times.
pub fn is_kstring(r: &Representation, k: usize) -> Result<bool, RepresentationError> {
    Ok(crossing_matrix(r)?.values().all(|c| c <= k))
}

/// Like [`is_kstring`] but counts common points of a possibly improper
/// representation.
pub fn is_kstring_lenient(r: &Representation, k: usize) -> Result<bool, RepresentationError> {
    Ok(intersection_point_counts(r)?.values().all(|c| c <= k))
}

/// Every intersecting pair crosses an odd number of times.
pub fn is_odd(r: &Representation) -> Result<bool, RepresentationError> {
    Ok(crossing_matrix(r)?.values().all(|c| c % 2 == 1))
}

/// A proper crossing between two named curves, located on both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub point: Point,
    pub pos_u: CurvePos,
    pub pos_v: CurvePos,
}

/// The crossings of `u` and `v`, ordered along `u`.
pub fn pair_crossings(r: &Representation, u: &str, v: &str) -> Result<Vec<Crossing>, RepresentationError> {
    let cu = r.curve(u)?;
    let cv = r.curve(v)?;
    let c = crate::geometry::polyline_contacts(cu, cv);
    Ok(c.proper_crossings()
        .map(|c| Crossing { point: c.point.clone(), pos_u: c.pos1.clone(), pos_v: c.pos2.clone() })
        .collect())
}
