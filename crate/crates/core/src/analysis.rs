//! Noodles, zones and fragments: the confinement machinery as executable
//! predicates.
//!
//! The noodle of a curve is its mitred tube of half-width `epsilon`, measured
//! along L1-normalized normals, split into one convex quadrilateral per
//! segment. A point of the tube has lane coordinates `(s, w)`: `s` runs from
//! `0` to the segment count along the curve, `w` from `-1` to `1` across it.
//!
//! Two noodles meet in one zone per crossing, the parallelogram cut out by
//! the two strips around the crossing segments. A confined curve enters the
//! zone of its own noodle only through the two sides lying on the other
//! noodle's boundary.

use std::collections::BTreeMap;

use rand::Rng;

use crate::geometry::offset::offset_vertices;
use crate::geometry::{
    orientation, polyline_contacts, separation_bound, ContactKind, GeometryError, Point, Polyline,
    Rational, Vector,
};
use crate::representation::{crossing_matrix, pair_crossings, Representation, RepresentationError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("epsilon must be positive")]
    NonPositive,
    #[error("epsilon {0} violates {1} (must be below {2})")]
    EpsilonTooLarge(Rational, &'static str, Rational),
    #[error("epsilon is too large for the noodle of `{0}`: {1}")]
    BadNoodle(String, &'static str),
    #[error("curve `{0}` is not confined to its noodle")]
    NotConfined(String),
    #[error("curve `{0}` touches a zone corner or its own noodle boundary")]
    Degenerate(String),
    #[error("`{0}` and `{1}` meet in {2} zone(s), expected {3}")]
    ZoneCount(String, String, usize, usize),
    #[error("lane point ({0}, {1}) lies outside the noodle of `{2}`")]
    BadLane(Rational, Rational, String),
}

/// The tube around one curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Noodle {
    pub base: Polyline,
    pub epsilon: Rational,
    /// Mitre offsets of the vertices at unit distance (to the left).
    mitre: Vec<Vector>,
    /// The lateral sides, at lane `w = -1` and `w = 1`.
    sides: [Polyline; 2],
}

impl Noodle {
    fn new(base: &Polyline, epsilon: &Rational) -> Result<Self, AnalysisError> {
        let unit = offset_vertices(base, &Rational::one());
        let mitre: Vec<Vector> = unit.iter().zip(base.vertices()).map(|(o, v)| o.sub(v)).collect();
        let side = |sign: i64| {
            let pts = base.vertices().iter().zip(&mitre).map(|(v, m)| v.offset(&m.scale(&(epsilon * &Rational::from_int(sign)))));
            Polyline::new(pts.collect()).map_err(|_| AnalysisError::BadNoodle(String::new(), "a tube side degenerates"))
        };
        Ok(Noodle { base: base.clone(), epsilon: epsilon.clone(), sides: [side(-1)?, side(1)?], mitre })
    }

    fn side(&self, i: usize, w: &Rational) -> Point {
        self.base.vertices()[i].offset(&self.mitre[i].scale(&(w * &self.epsilon)))
    }

    /// Point at lane coordinates: `s` in `[0, segments]`, `w` in `[-1, 1]`.
    pub fn lane_point(&self, s: &Rational, w: &Rational) -> Point {
        let n = self.base.segment_count();
        let i = (s.floor().try_into().unwrap_or(0i64).max(0) as usize).min(n - 1);
        let t = s - &Rational::from_int(i as i64);
        self.side(i, w).lerp(&self.side(i + 1, w), &t)
    }

    /// Corners of the quadrilateral around segment `i`, counter-clockwise
    /// when the curve runs left to right.
    pub fn quad(&self, i: usize) -> [Point; 4] {
        let [l, r] = [self.sides[0].vertices(), self.sides[1].vertices()];
        [l[i].clone(), l[i + 1].clone(), r[i + 1].clone(), r[i].clone()]
    }

    /// The tube boundary as a closed ring (first vertex repeated).
    pub fn boundary(&self) -> Vec<Point> {
        let mut ring: Vec<Point> = self.sides[0].vertices().to_vec();
        ring.extend(self.sides[1].vertices().iter().rev().cloned());
        ring.push(ring[0].clone());
        ring
    }

    /// Index of the first quadrilateral containing `p` (closed).
    pub fn locate(&self, p: &Point) -> Option<usize> {
        let pf = p.to_f64();
        (0..self.base.segment_count()).find(|&i| {
            let q = self.quad(i);
            near_box(&q, pf) && in_convex(&q, p)
        })
    }

    /// Whether `c` stays inside the noodle without touching its sides; it may
    /// reach the end caps.
    pub fn confines(&self, c: &Polyline) -> bool {
        if c.vertices().iter().any(|v| self.locate(v).is_none()) {
            return false;
        }
        self.sides.iter().all(|side| {
            let pc = polyline_contacts(c, side);
            !pc.overlap && pc.contacts.is_empty()
        })
    }
}

/// Whether `p` may lie in the bounding box of `poly`; a cheap
/// floating-point filter padded against conversion error.
fn near_box(poly: &[Point], p: (f64, f64)) -> bool {
    let pad = |x: f64| 1e-9 * (1.0 + x.abs());
    let f: Vec<(f64, f64)> = poly.iter().map(Point::to_f64).collect();
    let lo = f.iter().fold((f64::INFINITY, f64::INFINITY), |m, q| (m.0.min(q.0), m.1.min(q.1)));
    let hi = f.iter().fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |m, q| (m.0.max(q.0), m.1.max(q.1)));
    p.0 >= lo.0 - pad(lo.0) && p.0 <= hi.0 + pad(hi.0) && p.1 >= lo.1 - pad(lo.1) && p.1 <= hi.1 + pad(hi.1)
}

/// Closed containment in a convex polygon given counter-clockwise or
/// clockwise.
fn in_convex(poly: &[Point], p: &Point) -> bool {
    let n = poly.len();
    let mut sign = 0;
    for i in 0..n {
        let o = orientation(&poly[i], &poly[(i + 1) % n], p);
        if o != 0 {
            if sign != 0 && o != sign {
                return false;
            }
            sign = o;
        }
    }
    true
}

fn is_convex(poly: &[Point]) -> bool {
    let n = poly.len();
    let o: Vec<i32> = (0..n).map(|i| orientation(&poly[i], &poly[(i + 1) % n], &poly[(i + 2) % n])).collect();
    o.iter().all(|&x| x > 0) || o.iter().all(|&x| x < 0)
}

/// One component of the intersection of two noodles, around one crossing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zone {
    /// The pair, lexicographically ordered.
    pub pair: (VertexId, VertexId),
    /// Rank of the crossing along the first curve of the pair.
    pub index: usize,
    pub crossing: Point,
    /// Crossing segment and its direction, per curve of the pair.
    pub segments: (usize, usize),
    dirs: (Vector, Vector),
    /// Strip half-widths along each curve's normal.
    normals: (Vector, Vector),
    pub corners: [Point; 4],
}

impl Zone {
    fn new(pair: (VertexId, VertexId), index: usize, x: Point, segs: (usize, usize), d: (Vector, Vector), eps: &Rational) -> Option<Zone> {
        let n0 = d.0.perp().unit1().scale(eps);
        let n1 = d.1.perp().unit1().scale(eps);
        let corner = |s0: &Vector, s1: &Vector| {
            crate::geometry::offset::line_intersection(&x.offset(s0), &d.0, &x.offset(s1), &d.1)
        };
        let corners = [
            corner(&n0, &n1)?,
            corner(&n0, &n1.neg())?,
            corner(&n0.neg(), &n1.neg())?,
            corner(&n0.neg(), &n1)?,
        ];
        Some(Zone { pair, index, crossing: x, segments: segs, dirs: d, normals: (n0, n1), corners })
    }

    pub fn contains(&self, p: &Point) -> bool {
        in_convex(&self.corners, p)
    }

    /// `(direction, normal)` of the curve `which` (0 or 1 in pair order).
    fn frame(&self, which: usize) -> (&Vector, &Vector) {
        if which == 0 {
            (&self.dirs.0, &self.normals.0)
        } else {
            (&self.dirs.1, &self.normals.1)
        }
    }

    /// Which entry side for fragments of curve `which` holds `p`: the sides
    /// lie on the other curve's noodle boundary.
    fn entry_side(&self, which: usize, p: &Point) -> Option<i8> {
        let (d, n) = self.frame(1 - which);
        let rel = p.sub(&self.crossing);
        let on = |s: &Vector| rel.sub_vec(s).cross(d).is_zero();
        match (on(n), on(&n.neg())) {
            (true, false) => Some(1),
            (false, true) => Some(-1),
            _ => None,
        }
    }

    /// Position along curve `which` of the projection of `p` onto its line
    /// through the crossing, parallel to the other curve.
    fn along(&self, which: usize, p: &Point) -> Rational {
        let (dc, _) = self.frame(which);
        let (dother, _) = self.frame(1 - which);
        p.sub(&self.crossing).cross(dother) / dc.cross(dother)
    }

    /// Positions along curve `which` where it enters and leaves the zone.
    fn span(&self, which: usize) -> (Rational, Rational) {
        let (_, n) = self.frame(1 - which);
        let a = self.along(which, &self.crossing.offset(n));
        let b = self.along(which, &self.crossing.offset(&n.neg()));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

trait SubVec {
    fn sub_vec(&self, o: &Vector) -> Vector;
}

impl SubVec for Vector {
    fn sub_vec(&self, o: &Vector) -> Vector {
        self.add(&o.neg())
    }
}

/// Noodles of every curve and the zones of every crossing pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoodleSystem {
    pub base: Representation,
    pub epsilon: Rational,
    pub noodles: BTreeMap<VertexId, Noodle>,
    zones: BTreeMap<(VertexId, VertexId), Vec<Zone>>,
}

fn ordered(u: &str, v: &str) -> (VertexId, VertexId) {
    if u <= v {
        (u.to_string(), v.to_string())
    } else {
        (v.to_string(), u.to_string())
    }
}

pub fn build_noodles(r: &Representation, epsilon: &Rational) -> Result<NoodleSystem, AnalysisError> {
    if !epsilon.is_positive() {
        return Err(AnalysisError::NonPositive);
    }
    let matrix = crossing_matrix(r)?;
    let sep = separation_bound(&r.polylines())?;
    let half = sep.halved(1);
    if *epsilon >= half {
        return Err(AnalysisError::EpsilonTooLarge(epsilon.clone(), "half the separation bound", half));
    }
    let mut noodles = BTreeMap::new();
    for (id, c) in r.iter() {
        let n = Noodle::new(c, epsilon).map_err(|_| AnalysisError::BadNoodle(id.clone(), "a tube side degenerates"))?;
        if !(0..c.segment_count()).all(|i| is_convex(&n.quad(i))) {
            return Err(AnalysisError::BadNoodle(id.clone(), "a segment quadrilateral is not convex"));
        }
        let ring = n.boundary();
        if crate::geometry::self_intersections(&Polyline::new(ring.clone())?) != [ring[0].clone()] {
            return Err(AnalysisError::BadNoodle(id.clone(), "the tube boundary is not simple"));
        }
        noodles.insert(id.clone(), n);
    }
    let mut zones = BTreeMap::new();
    let mut endpoint_gap: Option<Rational> = None;
    for (u, v, _) in matrix.entries() {
        let (cu, cv) = (r.curve(u)?, r.curve(v)?);
        let mut list = Vec::new();
        for (i, c) in pair_crossings(r, u, v)?.into_iter().enumerate() {
            for e in [cu.first(), cu.last(), cv.first(), cv.last()] {
                let d = c.point.dist2(e);
                endpoint_gap = Some(endpoint_gap.map_or(d.clone(), |g| g.min(d)));
            }
            let (a0, a1) = cu.segment(c.pos_u.segment);
            let (b0, b1) = cv.segment(c.pos_v.segment);
            let z = Zone::new(
                (u.clone(), v.clone()),
                i,
                c.point.clone(),
                (c.pos_u.segment, c.pos_v.segment),
                (a1.sub(a0), b1.sub(b0)),
                epsilon,
            )
            .ok_or(AnalysisError::BadNoodle(u.clone(), "parallel crossing segments"))?;
            let qu = noodles[u].quad(c.pos_u.segment);
            let qv = noodles[v].quad(c.pos_v.segment);
            if !z.corners.iter().all(|p| in_convex(&qu, p) && in_convex(&qv, p)) {
                return Err(AnalysisError::BadNoodle(u.clone(), "a zone leaves its segment quadrilateral"));
            }
            for (id, n) in [(u, &noodles[u]), (v, &noodles[v])] {
                let k = n.base.segment_count();
                let (a, b) = (n.quad(0), n.quad(k - 1));
                if clip(&z.corners, &a[0], &a[3]).is_some() || clip(&z.corners, &b[1], &b[2]).is_some() {
                    return Err(AnalysisError::BadNoodle(id.clone(), "a zone reaches the end of the noodle"));
                }
            }
            list.push(z);
        }
        // Noodle boundaries meet exactly at the zone corners.
        let ru = Polyline::new(noodles[u].boundary())?;
        let rv = Polyline::new(noodles[v].boundary())?;
        let pc = polyline_contacts(&ru, &rv);
        let corners: std::collections::BTreeSet<&Point> = list.iter().flat_map(|z| z.corners.iter()).collect();
        if pc.overlap || pc.contacts.len() != 4 * list.len() || !pc.contacts.iter().all(|c| corners.contains(&c.point)) {
            return Err(AnalysisError::BadNoodle(u.clone(), "noodles meet outside the crossing zones"));
        }
        zones.insert((u.clone(), v.clone()), list);
    }
    if let Some(g) = endpoint_gap {
        if epsilon * epsilon >= g {
            return Err(AnalysisError::EpsilonTooLarge(epsilon.clone(), "the crossing-to-endpoint distance", g.sqrt_floor(24)));
        }
    }
    // Pairs without crossings must not meet at all.
    let ids: Vec<&VertexId> = r.ids().collect();
    for (a, u) in ids.iter().enumerate() {
        for v in &ids[a + 1..] {
            if matrix.get(u, v) == 0 {
                let ru = Polyline::new(noodles[*u].boundary())?;
                let rv = Polyline::new(noodles[*v].boundary())?;
                let pc = polyline_contacts(&ru, &rv);
                if pc.overlap || !pc.contacts.is_empty() {
                    return Err(AnalysisError::BadNoodle((*u).clone(), "noodles of disjoint curves meet"));
                }
            }
        }
    }
    Ok(NoodleSystem { base: r.clone(), epsilon: epsilon.clone(), noodles, zones })
}

impl NoodleSystem {
    pub fn noodle(&self, v: &str) -> Result<&Noodle, AnalysisError> {
        self.noodles.get(v).ok_or_else(|| RepresentationError::UnknownVertex(v.to_string()).into())
    }

    /// Zones of a pair, ordered along the lexicographically smaller curve.
    pub fn zones(&self, u: &str, v: &str) -> Result<&[Zone], AnalysisError> {
        self.noodle(u)?;
        self.noodle(v)?;
        Ok(self.zones.get(&ordered(u, v)).map(|z| z.as_slice()).unwrap_or(&[]))
    }

    pub fn zone_count(&self) -> usize {
        self.zones.values().map(|z| z.len()).sum()
    }

    /// The lane interval `[s_in, s_out]` over which the lane `w` of `curve`
    /// runs inside `zone`.
    pub fn zone_lane_span(&self, zone: &Zone, curve: &str, w: &Rational) -> Result<(Rational, Rational), AnalysisError> {
        let which = usize::from(zone.pair.0 != curve);
        let n = self.noodle(curve)?;
        let seg = if which == 0 { zone.segments.0 } else { zone.segments.1 };
        let p0 = n.side(seg, w);
        let p1 = n.side(seg + 1, w);
        let (lo, hi) = zone.span(which);
        let a0 = zone.along(which, &p0);
        let a1 = zone.along(which, &p1);
        // `along` is affine in the lane parameter, so invert it.
        let at = |x: &Rational| &Rational::from_int(seg as i64) + &((x - &a0) / (&a1 - &a0));
        Ok((at(&lo), at(&hi)))
    }

    /// Lane positions before which, and after which, the lanes `|w| <= 1/2`
    /// of `curve` meet no zone.
    pub fn clear_ends(&self, curve: &str) -> Result<(Rational, Rational), AnalysisError> {
        let n = self.noodle(curve)?;
        let (mut lo, mut hi) = (Rational::from_int(n.base.segment_count() as i64), Rational::zero());
        let half = Rational::new(1, 2);
        for z in self.zones.values().flatten().filter(|z| z.pair.0 == curve || z.pair.1 == curve) {
            for w in [half.clone(), -half.clone()] {
                let (a, b) = self.zone_lane_span(z, curve, &w)?;
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        Ok((lo, hi))
    }

    /// Polyline through lane points of `curve`, bent at segment boundaries so
    /// that it stays in the noodle.
    pub fn lane_curve(&self, curve: &str, pts: &[(Rational, Rational)]) -> Result<Polyline, AnalysisError> {
        let n = self.noodle(curve)?;
        let segs = Rational::from_int(n.base.segment_count() as i64);
        let one = Rational::one();
        for (s, w) in pts {
            if s.is_negative() || *s > segs || w.abs() >= one {
                return Err(AnalysisError::BadLane(s.clone(), w.clone(), curve.to_string()));
            }
        }
        let mut out: Vec<Point> = Vec::new();
        for (k, (s, w)) in pts.iter().enumerate() {
            if k > 0 {
                let (ps, pw) = &pts[k - 1];
                let (lo, hi, fwd) = if ps <= s { (ps, s, true) } else { (s, ps, false) };
                let mut cuts: Vec<i64> = (lo.floor().try_into().unwrap_or(0i64) + 1..).take_while(|&c| Rational::from_int(c) < *hi).collect();
                if !fwd {
                    cuts.reverse();
                }
                for c in cuts {
                    let cr = Rational::from_int(c);
                    let t = (&cr - ps) / (s - ps);
                    let wc = pw + &(&t * &(w - pw));
                    out.push(n.lane_point(&cr, &wc));
                }
            }
            out.push(n.lane_point(s, w));
        }
        out.dedup();
        Ok(Polyline::new(out)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FragmentKind {
    /// Enters and leaves through opposite sides.
    Traversal,
    /// Enters and leaves through the same side.
    Reversal,
    /// Contains an endpoint of the curve.
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub curve: VertexId,
    pub kind: FragmentKind,
    pub path: Polyline,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZoneFragments {
    pub zone: Zone,
    pub fragments: Vec<Fragment>,
}

impl ZoneFragments {
    pub fn of<'a>(&'a self, curve: &'a str) -> impl Iterator<Item = &'a Fragment> + 'a {
        self.fragments.iter().filter(move |f| f.curve == curve)
    }

    pub fn count(&self, curve: &str, kind: FragmentKind) -> usize {
        self.of(curve).filter(|f| f.kind == kind).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentReport {
    pub pair: (VertexId, VertexId),
    pub zones: Vec<ZoneFragments>,
}

/// Parameter interval of segment `a`-`b` inside a convex polygon.
fn clip(poly: &[Point], a: &Point, b: &Point) -> Option<(Rational, Rational)> {
    let n = poly.len();
    let d = b.sub(a);
    let (mut lo, mut hi) = (Rational::zero(), Rational::one());
    // Orientation of the polygon: inside is where every edge sees `sign`.
    let sign = orientation(&poly[0], &poly[1], &poly[2]);
    for i in 0..n {
        let (p, q) = (&poly[i], &poly[(i + 1) % n]);
        let e = q.sub(p);
        // f(t) = sign * cross(e, a + t d - p) >= 0
        let f0 = &e.cross(&a.sub(p)) * &Rational::from_int(sign as i64);
        let fd = &e.cross(&d) * &Rational::from_int(sign as i64);
        if fd.is_zero() {
            if f0.is_negative() {
                return None;
            }
        } else {
            let t = -(&f0 / &fd);
            if fd.is_positive() {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// L1 distance from the crossing to the farthest zone corner.
fn zone_radius(zone: &Zone) -> f64 {
    let x = zone.crossing.to_f64();
    zone.corners.iter().map(|c| {
        let c = c.to_f64();
        (c.0 - x.0).abs() + (c.1 - x.1).abs()
    }).fold(0.0, f64::max)
}

fn fragments_in(zone: &Zone, which: usize, id: &str, c: &Polyline) -> Result<Vec<Fragment>, AnalysisError> {
    let mut runs: Vec<Vec<Point>> = Vec::new();
    let mut ends: Vec<(bool, bool)> = Vec::new();
    let mut open = false;
    let last = c.segment_count() - 1;
    for (j, (a, b)) in c.segments().enumerate() {
        let (af, bf) = (a.to_f64(), b.to_f64());
        let mid = ((af.0 + bf.0) / 2.0, (af.1 + bf.1) / 2.0);
        let reach = ((af.0 - bf.0).abs() + (af.1 - bf.1).abs()) / 2.0;
        let zf = zone.crossing.to_f64();
        let clipped = if (mid.0 - zf.0).abs() + (mid.1 - zf.1).abs() > reach + zone_radius(zone) * 1.001 + 1e-9 {
            None
        } else {
            clip(&zone.corners, a, b)
        };
        let Some((t0, t1)) = clipped else {
            open = false;
            continue;
        };
        if t0 == t1 {
            // A single touching point.
            if !(open && t0.is_zero()) {
                open = false;
            }
            continue;
        }
        let p0 = a.lerp(b, &t0);
        let p1 = b.sub(a).scale(&t1);
        let p1 = a.offset(&p1);
        if open && t0.is_zero() {
            runs.last_mut().unwrap().push(p1.clone());
        } else {
            runs.push(vec![p0, p1.clone()]);
            ends.push((j == 0 && t0.is_zero(), false));
        }
        ends.last_mut().unwrap().1 = j == last && t1 == Rational::one();
        open = t1 == Rational::one();
    }
    let mut out = Vec::new();
    for (pts, (start_in, end_in)) in runs.into_iter().zip(ends) {
        let kind = if start_in || end_in {
            FragmentKind::Partial
        } else {
            let s0 = zone.entry_side(which, &pts[0]).ok_or_else(|| AnalysisError::Degenerate(id.to_string()))?;
            let s1 = zone.entry_side(which, &pts[pts.len() - 1]).ok_or_else(|| AnalysisError::Degenerate(id.to_string()))?;
            if s0 == s1 {
                FragmentKind::Reversal
            } else {
                FragmentKind::Traversal
            }
        };
        let mut pts = pts;
        pts.dedup();
        out.push(Fragment { curve: id.to_string(), kind, path: Polyline::new(pts)? });
    }
    Ok(out)
}

fn confined_pair<'a>(
    sys: &NoodleSystem,
    confined: &'a Representation,
    u: &str,
    v: &str,
) -> Result<(&'a Polyline, &'a Polyline), AnalysisError> {
    let mut out = Vec::with_capacity(2);
    for id in [u, v] {
        let c = confined.curve(id)?;
        if !sys.noodle(id)?.confines(c) {
            return Err(AnalysisError::NotConfined(id.to_string()));
        }
        out.push(c);
    }
    Ok((out[0], out[1]))
}

/// Fragments of the confined `u` and `v` in every zone of the pair.
pub fn classify_fragments(
    sys: &NoodleSystem,
    confined: &Representation,
    u: &str,
    v: &str,
) -> Result<FragmentReport, AnalysisError> {
    let (cu, cv) = confined_pair(sys, confined, u, v)?;
    let mut zones = Vec::new();
    for z in sys.zones(u, v)? {
        let wu = usize::from(z.pair.0 != u);
        let mut fragments = fragments_in(z, wu, u, cu)?;
        fragments.extend(fragments_in(z, 1 - wu, v, cv)?);
        zones.push(ZoneFragments { zone: z.clone(), fragments });
    }
    Ok(FragmentReport { pair: (u.to_string(), v.to_string()), zones })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AreaClass {
    /// An endpoint lies in the crossing area.
    Ambiguous,
    /// Both endpoints lie in the same tip.
    Peripheral,
    /// The endpoints lie in different tips.
    Central,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingAreaClass {
    pub pair: (VertexId, VertexId),
    pub u: AreaClass,
    pub v: AreaClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Tip(u8),
    Area,
}

/// Where `p` lies in the noodle of `curve` relative to the crossing area of
/// the pair: the zones along `curve` cut the noodle into two tips and the
/// area between them.
fn section(sys: &NoodleSystem, curve: &str, zones: &[Zone], p: &Point) -> Result<Section, AnalysisError> {
    let n = sys.noodle(curve)?;
    let i = n.locate(p).ok_or_else(|| AnalysisError::NotConfined(curve.to_string()))?;
    let which = usize::from(zones[0].pair.0 != curve);
    let seg = |z: &Zone| if which == 0 { z.segments.0 } else { z.segments.1 };
    // Order zones along this curve: by segment, then by position on it.
    let mut order: Vec<&Zone> = zones.iter().collect();
    order.sort_by(|a, b| {
        let (sa, sb) = (seg(a), seg(b));
        sa.cmp(&sb).then_with(|| {
            let dir = if which == 0 { &a.dirs.0 } else { &a.dirs.1 };
            dir.dot(&b.crossing.sub(&a.crossing)).signum().cmp(&0).reverse()
        })
    });
    let (first, last) = (order[0], order[order.len() - 1]);
    if i < seg(first) || (i == seg(first) && first.along(which, p) < first.span(which).0) {
        return Ok(Section::Tip(0));
    }
    if i > seg(last) || (i == seg(last) && last.along(which, p) > last.span(which).1) {
        return Ok(Section::Tip(1));
    }
    Ok(Section::Area)
}

fn area_class(sys: &NoodleSystem, curve: &str, zones: &[Zone], c: &Polyline) -> Result<AreaClass, AnalysisError> {
    let a = section(sys, curve, zones, c.first())?;
    let b = section(sys, curve, zones, c.last())?;
    Ok(match (a, b) {
        (Section::Area, _) | (_, Section::Area) => AreaClass::Ambiguous,
        (x, y) if x == y => AreaClass::Peripheral,
        _ => AreaClass::Central,
    })
}

pub fn classify_crossing_area(
    sys: &NoodleSystem,
    confined: &Representation,
    u: &str,
    v: &str,
) -> Result<CrossingAreaClass, AnalysisError> {
    let (cu, cv) = confined_pair(sys, confined, u, v)?;
    let zones = sys.zones(u, v)?;
    if zones.is_empty() {
        return Err(AnalysisError::ZoneCount(u.to_string(), v.to_string(), 0, 1));
    }
    Ok(CrossingAreaClass {
        pair: (u.to_string(), v.to_string()),
        u: area_class(sys, u, zones, cu)?,
        v: area_class(sys, v, zones, cv)?,
    })
}

/// Whether each of the confined `u` and `v` has an endpoint in the crossing
/// area of a pair meeting in exactly two zones.
pub fn covers(sys: &NoodleSystem, confined: &Representation, u: &str, v: &str) -> Result<(bool, bool), AnalysisError> {
    let n = sys.zones(u, v)?.len();
    if n != 2 {
        return Err(AnalysisError::ZoneCount(u.to_string(), v.to_string(), n, 2));
    }
    let c = classify_crossing_area(sys, confined, u, v)?;
    Ok((c.u == AreaClass::Ambiguous, c.v == AreaClass::Ambiguous))
}

/// How a generated confined curve starts and ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ends {
    /// From the first endpoint's end of the noodle to the last.
    Through,
    /// Runs to the far end and comes back, ending before the first zone.
    DoubleBack,
    /// Stops at lane position `s` given as a fraction `num/den` of the length.
    Truncate(i64, i64),
}

/// Parameters of the seeded perturbation generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Perturbation {
    /// Random lateral waypoints per segment.
    pub wiggles: usize,
    /// Back-and-forth loops along the lane.
    pub loops: usize,
    pub ends: Ends,
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation { wiggles: 2, loops: 2, ends: Ends::Through }
    }
}

const LANE_BITS: u32 = 12;

fn random_fraction<R: Rng>(rng: &mut R, lo: &Rational, hi: &Rational) -> Rational {
    let k: i64 = rng.gen_range(1..(1i64 << LANE_BITS));
    lo + &(&(hi - lo) * &Rational::new(k, 1 << LANE_BITS))
}

/// A random curve confined to the noodle of `curve`: it follows the lane
/// through random lateral waypoints (`|w| < 1/2`) and, `loops` times, runs
/// forward and back over a random stretch before continuing.
pub fn perturb<R: Rng>(sys: &NoodleSystem, curve: &str, spec: &Perturbation, rng: &mut R) -> Result<Polyline, AnalysisError> {
    let n = sys.noodle(curve)?;
    let segs = n.base.segment_count() as i64;
    let half = Rational::new(1, 2);
    let lane_w = |rng: &mut R| random_fraction(rng, &-half.clone(), &half);
    let mut stations: Vec<Rational> = Vec::new();
    for i in 0..segs {
        for _ in 0..spec.wiggles {
            stations.push(random_fraction(rng, &Rational::from_int(i), &Rational::from_int(i + 1)));
        }
    }
    stations.sort();
    let end = match spec.ends {
        Ends::Truncate(a, b) => Rational::new(a * segs, b),
        _ => Rational::from_int(segs),
    };
    stations.retain(|s| *s < end);
    let mut pts = vec![(Rational::zero(), lane_w(rng))];
    let mut loops = spec.loops;
    for s in stations {
        if loops > 0 && rng.gen_bool(0.3) {
            let back = random_fraction(rng, &Rational::zero(), &s);
            pts.push((s.clone(), lane_w(rng)));
            pts.push((back, lane_w(rng)));
            loops -= 1;
        }
        pts.push((s, lane_w(rng)));
    }
    pts.push((end.clone(), lane_w(rng)));
    if spec.ends == Ends::DoubleBack {
        // Come back to the stretch before the first zone.
        let (clear, _) = sys.clear_ends(curve)?;
        let back = random_fraction(rng, &Rational::zero(), &clear);
        pts.push((back, lane_w(rng)));
    }
    pts.dedup();
    sys.lane_curve(curve, &pts)
}

/// Confined copies of `ids`, generated in order from one seed; a curve is
/// redrawn until it meets every earlier one only in proper crossings. The
/// copies need not be simple.
pub fn sample_confined<R: Rng>(
    sys: &NoodleSystem,
    ids: &[&str],
    spec: &dyn Fn(&str) -> Perturbation,
    rng: &mut R,
) -> Result<Representation, AnalysisError> {
    let mut out = Representation::new();
    for &id in ids {
        let c = loop {
            let Ok(c) = perturb(sys, id, &spec(id), rng) else { continue };
            let generic = out.iter().all(|(_, o)| {
                let pc = polyline_contacts(&c, o);
                !pc.overlap && pc.contacts.iter().all(|x| x.kind == ContactKind::ProperCrossing)
            });
            if generic {
                break c;
            }
        };
        out.insert(id.to_string(), c)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{gadget_k8, sausage};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eps_for(r: &Representation) -> Rational {
        separation_bound(&r.polylines()).unwrap().halved(2).floor_pow2()
    }

    #[test]
    fn zone_counts() {
        let r = sausage(1).unwrap();
        assert_eq!(build_noodles(&r, &eps_for(&r)).unwrap().zone_count(), 1);
        let r = sausage(3).unwrap();
        let sys = build_noodles(&r, &eps_for(&r)).unwrap();
        let z = sys.zones("u", "v").unwrap();
        assert_eq!(z.len(), 3);
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(!z[i].corners.iter().any(|p| z[j].contains(p)));
            }
        }
        let k8 = gadget_k8(1).unwrap();
        assert_eq!(build_noodles(&k8, &eps_for(&k8)).unwrap().zone_count(), 28);
    }

    #[test]
    fn epsilon_bounds() {
        let r = sausage(1).unwrap();
        let sep = separation_bound(&r.polylines()).unwrap();
        assert!(matches!(build_noodles(&r, &sep), Err(AnalysisError::EpsilonTooLarge(..))));
        assert_eq!(build_noodles(&r, &Rational::zero()), Err(AnalysisError::NonPositive));
    }

    #[test]
    fn base_curves_traverse_once() {
        let r = sausage(3).unwrap();
        let sys = build_noodles(&r, &eps_for(&r)).unwrap();
        let rep = classify_fragments(&sys, &r, "u", "v").unwrap();
        for z in &rep.zones {
            assert_eq!(z.count("u", FragmentKind::Traversal), 1);
            assert_eq!(z.count("v", FragmentKind::Traversal), 1);
            assert_eq!(z.fragments.len(), 2);
        }
        let c = classify_crossing_area(&sys, &r, "u", "v").unwrap();
        assert_eq!((c.u, c.v), (AreaClass::Central, AreaClass::Central));
    }

    #[test]
    fn detours_are_classified() {
        let r = sausage(1).unwrap();
        let sys = build_noodles(&r, &eps_for(&r)).unwrap();
        let z = sys.zones("u", "v").unwrap()[0].clone();
        let w = Rational::zero();
        let (s_in, s_out) = sys.zone_lane_span(&z, "u", &w).unwrap();
        let mid = (&s_in + &s_out) / Rational::from_int(2);
        let q = Rational::new(1, 4);
        let before = &s_in - &Rational::new(1, 8);
        let after = &s_out + &Rational::new(1, 8);
        // Into the zone, back out the same side, then through.
        let s = sys
            .lane_curve("u", &[(Rational::zero(), w.clone()), (mid.clone(), q.clone()), (before.clone(), -q.clone()), (Rational::one(), w.clone())])
            .unwrap();
        let mut conf = r.clone();
        conf.set("u", s);
        let rep = classify_fragments(&sys, &conf, "u", "v").unwrap();
        assert_eq!(rep.zones[0].count("u", FragmentKind::Reversal), 1);
        assert_eq!(rep.zones[0].count("u", FragmentKind::Traversal), 1);
        // Three passes: forward, back, forward.
        let s = sys
            .lane_curve("u", &[(Rational::zero(), w.clone()), (after, q.clone()), (before, -q.clone()), (Rational::one(), w.clone())])
            .unwrap();
        conf.set("u", s);
        let rep = classify_fragments(&sys, &conf, "u", "v").unwrap();
        assert_eq!(rep.zones[0].count("u", FragmentKind::Traversal), 3);
        // Truncated inside the area, and doubled back into one tip.
        let s = sys.lane_curve("u", &[(Rational::zero(), w.clone()), (mid, q.clone())]).unwrap();
        conf.set("u", s);
        assert_eq!(classify_crossing_area(&sys, &conf, "u", "v").unwrap().u, AreaClass::Ambiguous);
        let s = sys
            .lane_curve("u", &[(Rational::zero(), w.clone()), (Rational::one(), q.clone()), (Rational::new(1, 16), -q)])
            .unwrap();
        conf.set("u", s);
        assert_eq!(classify_crossing_area(&sys, &conf, "u", "v").unwrap().u, AreaClass::Peripheral);
    }

    #[test]
    fn unconfined_curve_is_rejected() {
        let r = sausage(1).unwrap();
        let sys = build_noodles(&r, &eps_for(&r)).unwrap();
        let mut conf = r.clone();
        conf.set("u", Polyline::from_ints(&[(0, 0), (2, 0)]).unwrap());
        assert_eq!(classify_fragments(&sys, &conf, "u", "v"), Err(AnalysisError::NotConfined("u".into())));
    }

    #[test]
    fn perturbations_obey_parity() {
        let r = sausage(2).unwrap();
        let sys = build_noodles(&r, &eps_for(&r)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let conf = sample_confined(&sys, &["u", "v"], &|_| Perturbation::default(), &mut rng).unwrap();
            let rep = classify_fragments(&sys, &conf, "u", "v").unwrap();
            for z in &rep.zones {
                for a in z.of("u") {
                    for b in z.of("v") {
                        let n = polyline_contacts(&a.path, &b.path).crossing_count();
                        match (a.kind, b.kind) {
                            (FragmentKind::Traversal, FragmentKind::Traversal) => assert_eq!(n % 2, 1),
                            (FragmentKind::Reversal, _) | (_, FragmentKind::Reversal) => assert_eq!(n % 2, 0),
                            _ => {}
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn covers_on_odd_counterexample() {
        let r = crate::gadgets::gadget_odd_counterexample();
        let sys = build_noodles(&r, &eps_for(&r)).unwrap();
        let ids: Vec<&VertexId> = r.ids().collect();
        for (a, u) in ids.iter().enumerate() {
            for v in ids[a + 1..].iter().filter(|v| !sys.zones(u, v).unwrap().is_empty()) {
                assert_eq!(covers(&sys, &r, u, v).unwrap(), (false, false), "{u} {v}");
            }
        }
        // t1 truncated between its two zones with b1.
        let zones = sys.zones("b1", "t1").unwrap();
        let w = Rational::zero();
        let s0 = sys.zone_lane_span(&zones[0], "t1", &w).unwrap();
        let s1 = sys.zone_lane_span(&zones[1], "t1", &w).unwrap();
        let mid = (&s0.1.clone().min(s1.1.clone()) + &s0.0.clone().max(s1.0.clone())) / Rational::from_int(2);
        let mut conf = r.clone();
        conf.set("t1", sys.lane_curve("t1", &[(Rational::zero(), w.clone()), (mid, w)]).unwrap());
        assert_eq!(covers(&sys, &conf, "b1", "t1").unwrap(), (false, true));
        assert!(matches!(covers(&sys, &r, "b1", "zz"), Err(AnalysisError::Representation(_))));
    }
}
