//! Local repair of improper contacts: touchings, contacts at bends or
//! endpoints, and points shared by three or more curves.
//!
//! Around each offending point `x` every incident curve is cut at the
//! boundary of the square of half-width `r` centred at `x` (r is a quarter of
//! the separation bound, so squares are disjoint and meet no other curve).
//! The first incident curve keeps its shape; every other one is rerouted
//! through `x + j` for a jitter `j` found by a deterministic search on a
//! shrinking grid. A jitter is accepted when, inside the square, every pair
//! crosses once or twice, properly, with no crossing shared by three curves.

use std::collections::BTreeSet;

use crate::exec::Execution;
use crate::geometry::{
    is_simple, polyline_contacts, separation_bound, ContactKind, Point, Polyline, Rational, Vector,
};
use crate::representation::{validate_proper_with, Representation, RepresentationError, VertexId, ViolationKind};

use super::SurgeryError;

/// How one curve passes through an offending point.
struct Local {
    id: VertexId,
    /// Index of the last vertex kept before the square, and the entry point.
    enter: Option<(usize, Point)>,
    /// Index of the first vertex kept after the square, and the exit point.
    exit: Option<(usize, Point)>,
}

impl Local {
    fn new(id: &str, c: &Polyline, x: &Point, r: &Rational) -> Self {
        let pos = c.locate(x).into_iter().next().expect("curve passes through the point");
        let v = c.vertices();
        let at_vertex = if pos.t.is_zero() {
            Some(pos.segment)
        } else if pos.t == Rational::one() {
            Some(pos.segment + 1)
        } else {
            None
        };
        let (prev, next) = match at_vertex {
            Some(i) => (i.checked_sub(1), (i + 1 < v.len()).then_some(i + 1)),
            None => (Some(pos.segment), Some(pos.segment + 1)),
        };
        let arm = |i: usize| {
            let d = v[i].sub(x);
            let linf = d.x.abs().max(d.y.abs());
            (i, x.offset(&d.scale(&(r / &linf))))
        };
        Local { id: id.to_string(), enter: prev.map(arm), exit: next.map(arm) }
    }

    fn path(&self, mid: Point) -> Vec<Point> {
        let mut p = Vec::with_capacity(3);
        if let Some((_, a)) = &self.enter {
            p.push(a.clone());
        }
        p.push(mid);
        if let Some((_, b)) = &self.exit {
            p.push(b.clone());
        }
        p
    }

    fn rebuild(&self, c: &Polyline, mid: Point) -> Result<Polyline, SurgeryError> {
        let v = c.vertices();
        let mut out = Vec::with_capacity(v.len() + 3);
        if let Some((i, _)) = &self.enter {
            out.extend_from_slice(&v[..=*i]);
        }
        out.extend(self.path(mid));
        if let Some((i, _)) = &self.exit {
            out.extend_from_slice(&v[*i..]);
        }
        Ok(Polyline::new(out)?)
    }
}

const SPAN: i64 = 2;

fn jitter_vectors(step: &Rational) -> Vec<Vector> {
    let mut out = Vec::new();
    for p in -SPAN..=SPAN {
        for q in -SPAN..=SPAN {
            if (p, q) != (0, 0) {
                out.push(Vector::new(step * &Rational::from_int(p), step * &Rational::from_int(q)));
            }
        }
    }
    out
}

/// Whether the local paths form an admissible configuration.
fn admissible(paths: &[Vec<Point>]) -> bool {
    let mut lines = Vec::with_capacity(paths.len());
    for p in paths {
        match Polyline::new(p.clone()) {
            Ok(l) => lines.push(l),
            Err(_) => return false,
        }
    }
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let c = polyline_contacts(&lines[i], &lines[j]);
            if c.overlap || c.contacts.iter().any(|c| c.kind != ContactKind::ProperCrossing) {
                return false;
            }
            if !(1..=2).contains(&c.contacts.len()) {
                return false;
            }
            for c in c.contacts {
                if !seen.insert(c.point) {
                    return false;
                }
            }
        }
    }
    true
}

fn find_jitter(locals: &[Local], x: &Point, r: &Rational, exec: Execution) -> Option<Vec<Point>> {
    let movers = locals.len() - 1;
    let mut step = r.halved(2);
    for _ in 0..10 {
        let vecs = jitter_vectors(&step);
        let total = vecs.len().checked_pow(movers as u32)?;
        let candidates: Vec<usize> = (0..total).collect();
        let found = exec.find_map_first(&candidates, |&code| {
            let mut mids = vec![x.clone()];
            let mut c = code;
            for _ in 0..movers {
                mids.push(x.offset(&vecs[c % vecs.len()]));
                c /= vecs.len();
            }
            let paths: Vec<Vec<Point>> = locals.iter().zip(&mids).map(|(l, m)| l.path(m.clone())).collect();
            admissible(&paths).then_some(mids)
        });
        if found.is_some() {
            return found;
        }
        step = step.halved(1);
    }
    None
}

pub fn make_proper(r: &Representation) -> Result<Representation, SurgeryError> {
    make_proper_with(r, Execution::default())
}

/// Returns a proper representation with the same intersection graph in which
/// every pair crosses at most twice per common point of the input.
pub fn make_proper_with(r: &Representation, exec: Execution) -> Result<Representation, SurgeryError> {
    for (id, c) in r.iter() {
        if !is_simple(c) {
            return Err(SurgeryError::NotSimple(id.clone()));
        }
    }
    let report = validate_proper_with(r, exec);
    if report.proper {
        return Ok(r.clone());
    }
    let mut bad: BTreeSet<Point> = BTreeSet::new();
    for v in &report.violations {
        match v.kind {
            ViolationKind::Overlap => {
                return Err(RepresentationError::Overlap(v.vertices[0].clone(), v.vertices[1].clone()).into())
            }
            ViolationKind::SelfIntersection => return Err(SurgeryError::NotSimple(v.vertices[0].clone())),
            ViolationKind::TriplePoint | ViolationKind::ContactAtBendOrEndpoint => {
                bad.insert(v.location.clone());
            }
        }
    }
    let radius = separation_bound(&r.polylines())?.halved(2);
    let mut out = r.clone();
    for x in &bad {
        let locals: Vec<Local> = r
            .iter()
            .filter(|(_, c)| c.segments().any(|(a, b)| crate::geometry::point_on_segment(x, a, b)))
            .map(|(id, c)| Local::new(id, c, x, &radius))
            .collect();
        let mids = find_jitter(&locals, x, &radius, exec).ok_or_else(|| SurgeryError::NoPerturbation(x.clone()))?;
        for (l, m) in locals.iter().zip(mids).skip(1) {
            let cur = out.curve(&l.id)?.clone();
            // Positions are recomputed on the current curve: earlier repairs
            // elsewhere on it shift vertex indices but not the geometry here.
            let l = Local::new(&l.id, &cur, x, &radius);
            out.set(&l.id, l.rebuild(&cur, m)?);
        }
    }
    let check = validate_proper_with(&out, exec);
    if !check.proper {
        return Err(SurgeryError::Verification(format!("{} violation(s) remain", check.violations.len())));
    }
    Ok(out)
}
