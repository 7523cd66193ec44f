//! Exact planar kernel: points, segments, polylines and contact classification.
//!
//! Every predicate here is evaluated with rational arithmetic. Floating point
//! appears only in [`scan`] and [`separation_bound`] to pick candidate pairs;
//! the reported answers are always recomputed exactly.

mod rational;
pub mod offset;
pub mod scan;

use std::cmp::Ordering;
use std::fmt;

pub use rational::{Rational, RationalParseError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("degenerate segment: both endpoints are {0}")]
    DegenerateSegment(Point),
    #[error("a polyline needs at least two vertices")]
    TooFewVertices,
    #[error("consecutive vertices {0} coincide")]
    RepeatedVertex(Point),
    #[error("polyline doubles back on itself at {0}")]
    Backtrack(Point),
    #[error("curves {0} and {1} overlap along a segment")]
    Overlap(usize, usize),
    #[error("empty curve list")]
    Empty,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Rational::from_int(x), Rational::from_int(y))
    }

    pub fn sub(&self, other: &Point) -> Vector {
        Vector { x: &self.x - &other.x, y: &self.y - &other.y }
    }

    pub fn offset(&self, v: &Vector) -> Point {
        Point::new(&self.x + &v.x, &self.y + &v.y)
    }

    pub fn dist2(&self, other: &Point) -> Rational {
        self.sub(other).norm2()
    }

    /// Point at parameter `t` on the segment from `self` to `other`.
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        self.offset(&other.sub(self).scale(t))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Vector {
    pub x: Rational,
    pub y: Rational,
}

impl Vector {
    pub fn new(x: Rational, y: Rational) -> Self {
        Vector { x, y }
    }

    pub fn cross(&self, o: &Vector) -> Rational {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn dot(&self, o: &Vector) -> Rational {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn norm2(&self) -> Rational {
        self.dot(self)
    }

    pub fn scale(&self, s: &Rational) -> Vector {
        Vector { x: &self.x * s, y: &self.y * s }
    }

    pub fn neg(&self) -> Vector {
        Vector { x: -&self.x, y: -&self.y }
    }

    pub fn add(&self, o: &Vector) -> Vector {
        Vector { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `|x| + |y|`; a rational stand-in for the Euclidean norm, which it
    /// bounds within a factor of `sqrt(2)`.
    pub fn norm1(&self) -> Rational {
        self.x.abs() + self.y.abs()
    }

    /// Direction rescaled to unit L1 norm. Its Euclidean length lies in
    /// `[1/sqrt(2), 1]`.
    pub fn unit1(&self) -> Vector {
        self.scale(&self.norm1().recip())
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(&self) -> Vector {
        Vector { x: -&self.y, y: self.x.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContactKind {
    Empty,
    /// The common point is interior to both segments.
    ProperCrossing,
    /// The common point is an endpoint of both segments.
    TouchAtEndpoint,
    /// An endpoint of one segment lies in the interior of the other.
    TouchAtBendInterior,
    /// The segments share a subsegment of positive length.
    Overlap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentContact {
    pub kind: ContactKind,
    pub point: Option<Point>,
    /// Parameters of the contact point along each segment, present iff `point` is.
    params: Option<(Rational, Rational)>,
}

impl SegmentContact {
    fn empty() -> Self {
        SegmentContact { kind: ContactKind::Empty, point: None, params: None }
    }

    fn overlap() -> Self {
        SegmentContact { kind: ContactKind::Overlap, point: None, params: None }
    }

    pub fn params(&self) -> Option<&(Rational, Rational)> {
        self.params.as_ref()
    }
}

pub type Segment = (Point, Point);

fn on_unit_interval(t: &Rational) -> Ordering {
    // Less: outside, Equal: at an end, Greater: strictly inside.
    let one = Rational::one();
    if t.is_negative() || *t > one {
        Ordering::Less
    } else if t.is_zero() || *t == one {
        Ordering::Equal
    } else {
        Ordering::Greater
    }
}

/// Exact classification of how two closed segments meet.
pub fn segment_contact(s1: (&Point, &Point), s2: (&Point, &Point)) -> Result<SegmentContact, GeometryError> {
    let (p1, p2) = s1;
    let (q1, q2) = s2;
    if p1 == p2 {
        return Err(GeometryError::DegenerateSegment(p1.clone()));
    }
    if q1 == q2 {
        return Err(GeometryError::DegenerateSegment(q1.clone()));
    }
    Ok(segment_contact_unchecked(p1, p2, q1, q2))
}

pub(crate) fn segment_contact_unchecked(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> SegmentContact {
    let d1 = p2.sub(p1);
    let d2 = q2.sub(q1);
    let w = q1.sub(p1);
    let denom = d1.cross(&d2);
    if !denom.is_zero() {
        let t = &w.cross(&d2) / &denom;
        let u = &w.cross(&d1) / &denom;
        let (ct, cu) = (on_unit_interval(&t), on_unit_interval(&u));
        if ct == Ordering::Less || cu == Ordering::Less {
            return SegmentContact::empty();
        }
        let point = p1.lerp(p2, &t);
        let kind = match (ct, cu) {
            (Ordering::Greater, Ordering::Greater) => ContactKind::ProperCrossing,
            (Ordering::Equal, Ordering::Equal) => ContactKind::TouchAtEndpoint,
            _ => ContactKind::TouchAtBendInterior,
        };
        return SegmentContact { kind, point: Some(point), params: Some((t, u)) };
    }
    if !w.cross(&d1).is_zero() {
        return SegmentContact::empty();
    }
    // Collinear: intersect parameter intervals along the first segment.
    let len2 = d1.norm2();
    let t0 = &w.dot(&d1) / &len2;
    let t1 = &q2.sub(p1).dot(&d1) / &len2;
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let lo = lo.max(Rational::zero());
    let hi = hi.min(Rational::one());
    match lo.cmp(&hi) {
        Ordering::Greater => SegmentContact::empty(),
        Ordering::Less => SegmentContact::overlap(),
        Ordering::Equal => {
            let point = p1.lerp(p2, &lo);
            let len2q = d2.norm2();
            let u = &point.sub(q1).dot(&d2) / &len2q;
            let kind = if on_unit_interval(&lo) == Ordering::Equal && on_unit_interval(&u) == Ordering::Equal {
                ContactKind::TouchAtEndpoint
            } else {
                ContactKind::TouchAtBendInterior
            };
            SegmentContact { kind, point: Some(point), params: Some((lo, u)) }
        }
    }
}

/// Squared distance from `p` to the closed segment `a`–`b`.
pub fn dist2_point_segment(p: &Point, a: &Point, b: &Point) -> Rational {
    let d = b.sub(a);
    let len2 = d.norm2();
    if len2.is_zero() {
        return p.dist2(a);
    }
    let t = &p.sub(a).dot(&d) / &len2;
    let t = t.max(Rational::zero()).min(Rational::one());
    p.dist2(&a.lerp(b, &t))
}

/// Whether `p` lies on the closed segment `a`–`b`.
pub fn point_on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    let d = b.sub(a);
    let w = p.sub(a);
    if !d.cross(&w).is_zero() {
        return false;
    }
    let t = w.dot(&d);
    !t.is_negative() && t <= d.norm2()
}

/// Sign of the turn `a -> b -> c`: positive for counter-clockwise.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> i32 {
    b.sub(a).cross(&c.sub(a)).signum()
}

/// Position along a polyline: segment index and parameter in `[0, 1)`, except
/// that the final vertex is `(last segment, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurvePos {
    pub segment: usize,
    pub t: Rational,
}

impl CurvePos {
    pub fn new(segment: usize, t: Rational, segment_count: usize) -> Self {
        if t == Rational::one() && segment + 1 < segment_count {
            CurvePos { segment: segment + 1, t: Rational::zero() }
        } else {
            CurvePos { segment, t }
        }
    }
}

/// A piecewise-linear curve.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polyline {
    vertices: Vec<Point>,
}

impl Polyline {
    /// Validates the vertex list: at least two vertices, no repeated
    /// consecutive vertex, and no segment that folds straight back onto its
    /// predecessor.
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices);
        }
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(GeometryError::RepeatedVertex(w[0].clone()));
            }
        }
        for w in vertices.windows(3) {
            let a = w[1].sub(&w[0]);
            let b = w[2].sub(&w[1]);
            if a.cross(&b).is_zero() && a.dot(&b).is_negative() {
                return Err(GeometryError::Backtrack(w[1].clone()));
            }
        }
        Ok(Polyline { vertices })
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self, GeometryError> {
        Polyline::new(coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segment(&self, i: usize) -> (&Point, &Point) {
        (&self.vertices[i], &self.vertices[i + 1])
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> + '_ {
        self.vertices.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn first(&self) -> &Point {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Point {
        self.vertices.last().expect("polyline has vertices")
    }

    pub fn point_at(&self, pos: &CurvePos) -> Point {
        let (a, b) = self.segment(pos.segment);
        a.lerp(b, &pos.t)
    }

    pub fn reversed(&self) -> Polyline {
        let mut v = self.vertices.clone();
        v.reverse();
        Polyline { vertices: v }
    }

    /// Position of a point known to lie on segment `segment`.
    pub fn pos_on_segment(&self, segment: usize, p: &Point) -> CurvePos {
        let (a, b) = self.segment(segment);
        let d = b.sub(a);
        let t = &p.sub(a).dot(&d) / &d.norm2();
        CurvePos::new(segment, t, self.segment_count())
    }

    /// Positions of every occurrence of `p` on the curve (several only if the
    /// curve is not simple).
    pub fn locate(&self, p: &Point) -> Vec<CurvePos> {
        let mut out: Vec<CurvePos> = Vec::new();
        for (i, (a, b)) in self.segments().enumerate() {
            if point_on_segment(p, a, b) {
                let pos = self.pos_on_segment(i, p);
                if !out.contains(&pos) {
                    out.push(pos);
                }
            }
        }
        out
    }

    /// Index of the vertex equal to `p`, if any.
    pub fn vertex_index(&self, p: &Point) -> Option<usize> {
        self.vertices.iter().position(|v| v == p)
    }

    /// Bounding box `(min, max)`.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            if v.x < lo.x {
                lo.x = v.x.clone();
            }
            if v.y < lo.y {
                lo.y = v.y.clone();
            }
            if v.x > hi.x {
                hi.x = v.x.clone();
            }
            if v.y > hi.y {
                hi.y = v.y.clone();
            }
        }
        (lo, hi)
    }
}

/// A point contact between two polylines together with where it sits on each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveContact {
    pub kind: ContactKind,
    pub point: Point,
    pub pos1: CurvePos,
    pub pos2: CurvePos,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolylineContacts {
    /// Point contacts, ordered along the first curve.
    pub contacts: Vec<CurveContact>,
    /// Set when some pair of segments shares a subsegment (infinitely many
    /// common points).
    pub overlap: bool,
}

impl PolylineContacts {
    pub fn proper_crossings(&self) -> impl Iterator<Item = &CurveContact> {
        self.contacts.iter().filter(|c| c.kind == ContactKind::ProperCrossing)
    }

    pub fn crossing_count(&self) -> usize {
        self.proper_crossings().count()
    }
}

/// All contacts between two curves, each reported once.
pub fn polyline_contacts(c1: &Polyline, c2: &Polyline) -> PolylineContacts {
    let mut out = PolylineContacts::default();
    let (b1, b2) = (float_boxes(c1), float_boxes(c2));
    for (i, (a, b)) in c1.segments().enumerate() {
        for (j, (c, d)) in c2.segments().enumerate() {
            if b1[i].apart(&b2[j]) {
                continue;
            }
            let sc = segment_contact_unchecked(a, b, c, d);
            push_contact(&mut out, c1, c2, i, j, sc);
        }
    }
    finish_contacts(&mut out);
    out
}

/// Segment bounding box in floating point, padded to absorb conversion
/// error; only used to skip pairs that are certainly apart.
struct FloatBox([f64; 4]);

impl FloatBox {
    fn apart(&self, o: &FloatBox) -> bool {
        self.0[2] < o.0[0] || o.0[2] < self.0[0] || self.0[3] < o.0[1] || o.0[3] < self.0[1]
    }
}

fn float_boxes(c: &Polyline) -> Vec<FloatBox> {
    let v: Vec<(f64, f64)> = c.vertices().iter().map(Point::to_f64).collect();
    v.windows(2)
        .map(|w| {
            let pad = |x: f64| 1e-9 * (1.0 + x.abs());
            let (x0, x1) = (w[0].0.min(w[1].0), w[0].0.max(w[1].0));
            let (y0, y1) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
            FloatBox([x0 - pad(x0), y0 - pad(y0), x1 + pad(x1), y1 + pad(y1)])
        })
        .collect()
}

pub(crate) fn push_contact(out: &mut PolylineContacts, c1: &Polyline, c2: &Polyline, i: usize, j: usize, sc: SegmentContact) {
    match sc.kind {
        ContactKind::Empty => {}
        ContactKind::Overlap => out.overlap = true,
        kind => {
            let (t, u) = sc.params.expect("point contact carries parameters");
            out.contacts.push(CurveContact {
                kind,
                point: sc.point.expect("point contact carries a point"),
                pos1: CurvePos::new(i, t, c1.segment_count()),
                pos2: CurvePos::new(j, u, c2.segment_count()),
            });
        }
    }
}

pub(crate) fn finish_contacts(out: &mut PolylineContacts) {
    out.contacts.sort_by(|a, b| (&a.pos1, &a.pos2).cmp(&(&b.pos1, &b.pos2)));
    out.contacts.dedup_by(|a, b| a.pos1 == b.pos1 && a.pos2 == b.pos2);
}

/// A simple curve has no self-intersections and does not revisit a vertex.
pub fn is_simple(c: &Polyline) -> bool {
    self_intersections(c).is_empty()
}

/// Points where a curve touches or crosses itself.
pub fn self_intersections(c: &Polyline) -> Vec<Point> {
    let n = c.segment_count();
    let mut out = Vec::new();
    if n >= 2 && c.first() == c.last() {
        out.push(c.first().clone());
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = c.segment(i);
            let (p, q) = c.segment(j);
            let sc = segment_contact_unchecked(a, b, p, q);
            let bad = if j == i + 1 {
                match sc.kind {
                    ContactKind::TouchAtEndpoint => sc.point.as_ref() != Some(b),
                    ContactKind::Empty => false,
                    _ => true,
                }
            } else {
                sc.kind != ContactKind::Empty
            };
            if bad {
                out.push(sc.point.unwrap_or_else(|| b.clone()));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Point features of a curve family: bends, endpoints and pairwise contacts.
pub fn feature_points(curves: &[Polyline]) -> Result<Vec<Point>, GeometryError> {
    let mut feats: Vec<Point> = curves.iter().flat_map(|c| c.vertices().iter().cloned()).collect();
    for hit in scan::scan(curves, false, crate::exec::Execution::default()) {
        match hit.contact.kind {
            ContactKind::Overlap => return Err(GeometryError::Overlap(hit.curve_a, hit.curve_b)),
            ContactKind::Empty => {}
            _ => feats.push(hit.contact.point.expect("point contact")),
        }
    }
    feats.sort();
    feats.dedup();
    Ok(feats)
}

/// Minimum squared distance between distinct feature points and from every
/// feature point to every segment not containing it.
pub fn min_feature_dist2(curves: &[Polyline]) -> Result<Rational, GeometryError> {
    if curves.is_empty() {
        return Err(GeometryError::Empty);
    }
    let feats = feature_points(curves)?;
    let segs: Vec<(&Point, &Point)> = curves.iter().flat_map(|c| c.segments()).collect();
    let ff: Vec<(f64, f64)> = feats.iter().map(Point::to_f64).collect();
    let sf: Vec<((f64, f64), (f64, f64))> = segs.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect();

    // Floating point only ranks candidates; the minimum is taken exactly over
    // every pair within a generous factor of the approximate minimum.
    let mut approx: Vec<(f64, Candidate)> = Vec::new();
    for i in 0..feats.len() {
        for j in i + 1..feats.len() {
            approx.push((d2f(ff[i], ff[j]), Candidate::Points(i, j)));
        }
        for (k, &(a, b)) in sf.iter().enumerate() {
            approx.push((d2f_seg(ff[i], a, b), Candidate::PointSeg(i, k)));
        }
    }
    let scale = ff.iter().fold(1.0f64, |m, &(x, y)| m.max(x.abs()).max(y.abs()));
    let slack = 1e-9 * scale * scale;
    let mut best: Option<Rational> = None;
    let mut cutoff = f64::INFINITY;
    approx.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    for (d, cand) in approx {
        if d > cutoff {
            break;
        }
        let exact = match cand {
            Candidate::Points(i, j) => feats[i].dist2(&feats[j]),
            Candidate::PointSeg(i, k) => {
                let (a, b) = segs[k];
                if point_on_segment(&feats[i], a, b) {
                    continue;
                }
                dist2_point_segment(&feats[i], a, b)
            }
        };
        if best.as_ref().is_none_or(|b| &exact < b) {
            cutoff = 4.0 * exact.to_f64() + slack;
            best = Some(exact);
        }
    }
    best.ok_or(GeometryError::Empty)
}

enum Candidate {
    Points(usize, usize),
    PointSeg(usize, usize),
}

fn d2f(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

fn d2f_seg(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    d2f(p, (a.0 + t * dx, a.1 + t * dy))
}

/// A rational `delta > 0` with `delta^2` at most the minimum squared distance
/// between non-incident features (see [`min_feature_dist2`]).
pub fn separation_bound(curves: &[Polyline]) -> Result<Rational, GeometryError> {
    let m = min_feature_dist2(curves)?;
    Ok(m.sqrt_floor(24))
}
