//! Overlaying a representation with a fine mesh of axis-parallel segments.
//!
//! Mesh lines sit on a grid of pitch `p`. The horizontal edge `H(i, j)` runs
//! at height `y_j ± p/16` (sign alternating with `i`) from `x_i - p/8` to
//! `x_{i+1} + p/8`, and `V(i, j)` likewise, so at every grid node the two
//! horizontal and two vertical edges meeting there cross pairwise, while
//! edges of one orientation stay disjoint. Curves keep away from node boxes,
//! so they only cross edges away from the nodes.
//!
//! Wherever a curve crosses an edge the edge is cut into two pieces that
//! overlap around the crossing on parallel lines a tiny distance `tau` apart,
//! both crossing the curve. Every piece therefore ends next to each curve or
//! node it meets, which is what lets the precise variant raise every count
//! to `k` with a comb (`k` parallel passes) at the piece end, whatever the
//! parity of `k`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::ToPrimitive;

use crate::exec::Execution;
use crate::geometry::{separation_bound, GeometryError, Point, Polyline, Rational, Vector};
use crate::representation::IntersectionGraph;
use crate::representation::{crossing_matrix, is_precise, Representation, RepresentationError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NoodleError {
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no admissible mesh found down to pitch {0}")]
    NoMesh(Rational),
    #[error("input is not a precise {0}-string representation")]
    NotPrecise(usize),
    #[error("k must be positive")]
    ZeroK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A mesh edge: `i` is the column, `j` the row of its grid cell side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeshEdge {
    pub orientation: Orientation,
    pub i: usize,
    pub j: usize,
}

impl MeshEdge {
    /// Vertex id of the uncut edge, or of piece `q` when it is cut.
    pub fn id(&self, piece: Option<usize>) -> VertexId {
        let o = match self.orientation {
            Orientation::Horizontal => 'h',
            Orientation::Vertical => 'v',
        };
        match piece {
            None => format!("mesh:{o}:{}:{}", self.i, self.j),
            Some(q) => format!("mesh:{o}:{}:{}:{q}", self.i, self.j),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeshParameters {
    pub pitch: Rational,
    /// The lower-left grid node.
    pub offset: Point,
    pub extent: (Point, Point),
}

impl MeshParameters {
    pub fn columns(&self) -> usize {
        grid_steps(&self.extent.0.x, &self.extent.1.x, &self.pitch)
    }

    pub fn rows(&self) -> usize {
        grid_steps(&self.extent.0.y, &self.extent.1.y, &self.pitch)
    }

    pub fn line_x(&self, i: usize) -> Rational {
        &self.offset.x + &(&self.pitch * &Rational::from_int(i as i64))
    }

    pub fn line_y(&self, j: usize) -> Rational {
        &self.offset.y + &(&self.pitch * &Rational::from_int(j as i64))
    }

    /// Distance of an edge from its grid line.
    pub fn shift(&self) -> Rational {
        self.pitch.halved(4)
    }

    /// How far an edge reaches past its grid nodes.
    pub fn overhang(&self) -> Rational {
        self.pitch.halved(3)
    }

    /// Half-extents of the two bars of the plus-shaped region around every
    /// grid node that curves must avoid; it covers all mesh crossings and
    /// combs at the node with a margin of [`Self::margin`].
    pub fn node_bars(&self) -> [(Rational, Rational); 2] {
        let long = &self.pitch * &Rational::new(5, 32);
        let short = self.pitch.halved(3);
        [(long.clone(), short.clone()), (short, long)]
    }

    pub fn margin(&self) -> Rational {
        self.pitch.halved(5)
    }

    pub fn edges(&self) -> Vec<MeshEdge> {
        let (nx, ny) = (self.columns(), self.rows());
        let mut out = Vec::new();
        for i in 0..nx {
            for j in 0..=ny {
                out.push(MeshEdge { orientation: Orientation::Horizontal, i, j });
            }
        }
        for i in 0..=nx {
            for j in 0..ny {
                out.push(MeshEdge { orientation: Orientation::Vertical, i, j });
            }
        }
        out
    }

    /// The uncut straight edge.
    pub fn edge_segment(&self, e: MeshEdge) -> (Point, Point) {
        let ax = self.axis(e.orientation);
        let (a, b) = match e.orientation {
            Orientation::Horizontal => (e.i, e.j),
            Orientation::Vertical => (e.j, e.i),
        };
        let w = ax.line(a, b);
        let s = self.overhang();
        let p = ax.local(&ax.along(a) - &s, w.clone());
        let q = ax.local(&ax.along(a + 1) + &s, w);
        (ax.global(&p), ax.global(&q))
    }

    fn axis(&self, o: Orientation) -> Axis {
        let (along0, across0, n_along, n_across) = match o {
            Orientation::Horizontal => (&self.offset.x, &self.offset.y, self.columns(), self.rows()),
            Orientation::Vertical => (&self.offset.y, &self.offset.x, self.rows(), self.columns()),
        };
        Axis {
            o,
            along0: along0.clone(),
            across0: across0.clone(),
            pitch: self.pitch.clone(),
            shift: self.shift(),
            n_along,
            n_across,
        }
    }
}

fn grid_steps(lo: &Rational, hi: &Rational, p: &Rational) -> usize {
    ((hi - lo) / p.clone()).floor().to_usize().expect("extent spans a whole number of cells")
}

fn floor_i64(r: &Rational) -> i64 {
    r.floor().to_i64().expect("grid index fits in i64")
}

/// Coordinates along and across one orientation of edges: horizontal edges
/// use `(x, y)`, vertical ones `(y, x)`, so both are handled as horizontal.
struct Axis {
    o: Orientation,
    along0: Rational,
    across0: Rational,
    pitch: Rational,
    shift: Rational,
    n_along: usize,
    n_across: usize,
}

impl Axis {
    fn local(&self, u: Rational, w: Rational) -> Point {
        Point::new(u, w)
    }

    fn to_local(&self, p: &Point) -> Point {
        match self.o {
            Orientation::Horizontal => p.clone(),
            Orientation::Vertical => Point::new(p.y.clone(), p.x.clone()),
        }
    }

    fn global(&self, p: &Point) -> Point {
        self.to_local(p)
    }

    fn along(&self, a: usize) -> Rational {
        &self.along0 + &(&self.pitch * &Rational::from_int(a as i64))
    }

    fn sign(a: usize) -> i64 {
        if a.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Across-coordinate of the edge in column `a` on grid line `b`.
    fn line(&self, a: usize, b: usize) -> Rational {
        let base = &self.across0 + &(&self.pitch * &Rational::from_int(b as i64));
        &base + &(&self.shift * &Rational::from_int(Self::sign(a)))
    }

    fn edge(&self, a: usize, b: usize) -> MeshEdge {
        match self.o {
            Orientation::Horizontal => MeshEdge { orientation: self.o, i: a, j: b },
            Orientation::Vertical => MeshEdge { orientation: self.o, i: b, j: a },
        }
    }
}

/// A curve crossing an edge, in the edge's local coordinates.
#[derive(Clone, Debug)]
struct Hit {
    a: usize,
    b: usize,
    u: Rational,
    curve: usize,
    seg: usize,
}

/// All crossings of curves with edges of one orientation, or `None` when a
/// curve vertex lies on an edge line or an edge meets a curve twice.
fn scan_axis(curves: &[Polyline], ax: &Axis) -> Option<Vec<Hit>> {
    let t = &ax.shift;
    let mut hits = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        for (si, (p, q)) in c.segments().enumerate() {
            let (p, q) = (ax.to_local(p), ax.to_local(q));
            let (lo, hi) = if p.y <= q.y { (&p.y, &q.y) } else { (&q.y, &p.y) };
            let b0 = floor_i64(&((&(lo - t) - &ax.across0) / ax.pitch.clone())).max(0);
            let b1 = floor_i64(&((&(hi + t) - &ax.across0) / ax.pitch.clone())).min(ax.n_across as i64);
            for b in b0..=b1 {
                let base = &ax.across0 + &(&ax.pitch * &Rational::from_int(b));
                for sg in [1i64, -1] {
                    let w = &base + &(t * &Rational::from_int(sg));
                    if w == p.y || w == q.y {
                        return None;
                    }
                    if !(*lo < w && w < *hi) {
                        continue;
                    }
                    let u = &p.x + &(&(&(&w - &p.y) / &(&q.y - &p.y)) * &(&q.x - &p.x));
                    let a = floor_i64(&((&u - &ax.along0) / ax.pitch.clone()));
                    if a < 0 || a as usize >= ax.n_along || Axis::sign(a as usize) != sg {
                        continue;
                    }
                    hits.push(Hit { a: a as usize, b: b as usize, u, curve: ci, seg: si });
                }
            }
        }
    }
    hits.sort_by(|x, y| (x.a, x.b, &x.u).cmp(&(y.a, y.b, &y.u)));
    let mut seen = BTreeSet::new();
    for h in &hits {
        if !seen.insert((h.a, h.b, h.curve)) {
            return None;
        }
    }
    Some(hits)
}

/// Whether no curve segment meets the closed node regions.
fn avoids_nodes(curves: &[Polyline], m: &MeshParameters) -> bool {
    m.node_bars().iter().all(|(hx, hy)| avoids_boxes(curves, m, hx, hy))
}

/// Whether no curve segment meets any closed box `[x_i ± hx] x [y_j ± hy]`.
fn avoids_boxes(curves: &[Polyline], m: &MeshParameters, hx: &Rational, hy: &Rational) -> bool {
    let (nx, ny) = (m.columns() as i64, m.rows() as i64);
    let idx = |v: &Rational, o: &Rational| (v - o) / m.pitch.clone();
    for c in curves {
        for (p, q) in c.segments() {
            let (xl, xh) = if p.x <= q.x { (&p.x, &q.x) } else { (&q.x, &p.x) };
            let i0 = idx(&(xl - hx), &m.offset.x).ceil().to_i64().unwrap().max(0);
            let i1 = floor_i64(&idx(&(xh + hx), &m.offset.x)).min(nx);
            for i in i0..=i1 {
                let x = m.line_x(i as usize);
                let (sl, sh) = (&x - hx, &x + hx);
                // The part of the segment inside the slab |x - x_i| <= h.
                let (ya, yb) = if p.x == q.x {
                    (p.y.clone(), q.y.clone())
                } else {
                    let at = |xv: &Rational| {
                        let xv = xv.clone().max(xl.clone()).min(xh.clone());
                        &p.y + &(&(&(&xv - &p.x) / &(&q.x - &p.x)) * &(&q.y - &p.y))
                    };
                    (at(&sl), at(&sh))
                };
                let (yl, yh) = if ya <= yb { (ya, yb) } else { (yb, ya) };
                let j0 = idx(&(&yl - hy), &m.offset.y).ceil().to_i64().unwrap().max(0);
                let j1 = floor_i64(&idx(&(&yh + hy), &m.offset.y)).min(ny);
                if j0 <= j1 {
                    return false;
                }
            }
        }
    }
    true
}

fn admissible(curves: &[Polyline], m: &MeshParameters) -> Option<(Vec<Hit>, Vec<Hit>)> {
    if !avoids_nodes(curves, m) {
        return None;
    }
    Some((scan_axis(curves, &m.axis(Orientation::Horizontal))?, scan_axis(curves, &m.axis(Orientation::Vertical))?))
}

fn mesh_for(bbox: &(Point, Point), p: &Rational, phi: (&Rational, &Rational)) -> MeshParameters {
    let margin = p * &Rational::from_int(2);
    let start = |lo: &Rational, f: &Rational| {
        let cells = Rational::from_big(((lo - &margin) / p.clone()).floor(), 1.into());
        &(&(&cells - &Rational::one()) * p) + f
    };
    let count = |lo: &Rational, hi: &Rational| {
        let n = ((&(hi + &margin) - lo) / p.clone()).ceil();
        Rational::from_big(n, 1.into())
    };
    let x0 = start(&bbox.0.x, phi.0);
    let y0 = start(&bbox.0.y, phi.1);
    let x1 = &x0 + &(&count(&x0, &bbox.1.x) * p);
    let y1 = &y0 + &(&count(&y0, &bbox.1.y) * p);
    let offset = Point::new(x0, y0);
    MeshParameters { pitch: p.clone(), offset: offset.clone(), extent: (offset, Point::new(x1, y1)) }
}

/// `x` rounded down to `bits` significant binary digits.
fn round_down(x: &Rational, bits: u32) -> Rational {
    let unit = x.floor_pow2().halved(bits - 1);
    &Rational::from_big((x / &unit).floor(), 1.into()) * &unit
}

/// A power of two not exceeding half of `v` (`v > 0`).
fn pow2_below(v: f64) -> Rational {
    let e = (-v.log2()).ceil() as i64 + 1;
    if e >= 0 {
        Rational::one().halved(e as u32)
    } else {
        Rational::from_int(1i64 << (-e).min(62))
    }
}

fn bbox_of(curves: &[Polyline]) -> (Point, Point) {
    let mut it = curves.iter().map(|c| c.bbox());
    let first = it.next().unwrap_or((Point::from_ints(0, 0), Point::from_ints(0, 0)));
    it.fold(first, |(lo, hi), (a, b)| {
        (
            Point::new(lo.x.min(a.x), lo.y.min(a.y)),
            Point::new(hi.x.max(b.x), hi.y.max(b.y)),
        )
    })
}

const OFFSET_LEVELS: u32 = 3;
const PITCH_STEPS: i64 = 16;

pub fn choose_mesh(r: &Representation) -> Result<MeshParameters, NoodleError> {
    choose_mesh_with(r, Execution::default())
}

/// Coarsest admissible mesh found by a deterministic search. Within each
/// octave below a quarter of the separation bound (starting at the top), unit
/// fractions `1/n` are tried first, then a sweep in steps of 1/32 of the top;
/// then the octave is halved. For each pitch the grid offsets are tried on the
/// dyadic fractions of the pitch with denominator up to 8.
pub fn choose_mesh_with(r: &Representation, exec: Execution) -> Result<MeshParameters, NoodleError> {
    let curves = r.polylines();
    let bbox = bbox_of(&curves);
    let zero = Rational::zero();
    if curves.is_empty() {
        return Ok(mesh_for(&bbox, &Rational::one(), (&zero, &zero)));
    }
    crossing_matrix(r)?;
    let mut top = round_down(&separation_bound(&curves)?.halved(2), 8);
    let mut fracs = vec![Rational::zero()];
    for lvl in 1..=OFFSET_LEVELS {
        for n in (1..1i64 << lvl).step_by(2) {
            fracs.push(Rational::new(n, 1 << lvl));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..fracs.len()).flat_map(|i| (0..fracs.len()).map(move |j| (i, j))).collect();
    for _ in 0..6 {
        // Unit fractions first: they keep the grid commensurate with inputs on
        // an integer lattice.
        let lo = (Rational::one() / top.clone()).ceil().to_i64().unwrap_or(i64::MAX);
        let hi = (Rational::from_int(2) / top.clone()).floor().to_i64().unwrap_or(0);
        let unit = (lo..=hi.min(lo.saturating_add(64))).map(|n| Rational::new(1, n));
        let swept = (0..PITCH_STEPS).map(|step| round_down(&(&top * &Rational::new(32 - step, 32)), 8));
        for p in unit.chain(swept) {
            let found = exec.find_map_first(&pairs, |&(i, j)| {
                let m = mesh_for(&bbox, &p, (&(&fracs[i] * &p), &(&fracs[j] * &p)));
                admissible(&curves, &m).map(|_| m)
            });
            if let Some(m) = found {
                return Ok(m);
            }
        }
        top = top.halved(1);
    }
    Err(NoodleError::NoMesh(top))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoodleForceResult {
    pub graph: IntersectionGraph,
    pub representation: Representation,
    pub original: BTreeSet<VertexId>,
    pub mesh: MeshParameters,
}

/// Curve index, segment index and the float endpoints of a segment.
type ClearSeg = (usize, usize, (f64, f64), (f64, f64));

/// Segments of the input in floating point, bucketed for clearance queries.
struct Clearance {
    cell: f64,
    segs: Vec<ClearSeg>,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

fn dist_point_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l = dx * dx + dy * dy;
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l).clamp(0.0, 1.0);
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

impl Clearance {
    fn new(curves: &[Polyline], cell: f64) -> Self {
        let mut segs = Vec::new();
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (ci, c) in curves.iter().enumerate() {
            for (si, (p, q)) in c.segments().enumerate() {
                let (a, b) = (p.to_f64(), q.to_f64());
                let id = segs.len();
                segs.push((ci, si, a, b));
                let key = |v: f64| (v / cell).floor() as i64;
                for gx in key(a.0.min(b.0))..=key(a.0.max(b.0)) {
                    for gy in key(a.1.min(b.1))..=key(a.1.max(b.1)) {
                        grid.entry((gx, gy)).or_default().push(id);
                    }
                }
            }
        }
        Clearance { cell, segs, grid }
    }

    /// Distance from `x` (a crossing with segment `seg` of `curve`) to every
    /// other part of the input, capped at `cap`.
    fn at(&self, x: (f64, f64), curve: usize, seg: usize, cap: f64) -> f64 {
        let key = |v: f64| (v / self.cell).floor() as i64;
        let mut best = cap;
        for gx in key(x.0 - cap)..=key(x.0 + cap) {
            for gy in key(x.1 - cap)..=key(x.1 + cap) {
                for &id in self.grid.get(&(gx, gy)).into_iter().flatten() {
                    let (c, s, a, b) = self.segs[id];
                    let d = if (c, s) == (curve, seg) {
                        let e = |p: (f64, f64)| ((p.0 - x.0).powi(2) + (p.1 - x.1).powi(2)).sqrt();
                        e(a).min(e(b))
                    } else {
                        dist_point_segment(x, a, b)
                    };
                    best = best.min(d);
                }
            }
        }
        best
    }
}

/// A crossing prepared for cutting: its point on the base line, the curve
/// direction (pointing to increasing across-coordinate, L1-normalized), and
/// the size of its clear neighbourhood.
struct Cut {
    x: Point,
    dir: Vector,
    rho: Rational,
    curve: usize,
}

/// Points of a comb closing a piece: pass 0 ends at `c + e*d1`, then `k - 1`
/// further passes at offsets `g, 2g, ...` along `d2`, alternating direction.
fn comb(c: &Point, d1: &Vector, d2: &Vector, e: &Rational, g: &Rational, k: usize) -> Vec<Point> {
    let mut out = vec![c.offset(&d1.scale(e))];
    let mut side = Rational::one();
    for j in 1..k {
        let b = d2.scale(&(g * &Rational::from_int(j as i64)));
        out.push(c.offset(&d1.scale(&(e * &side))).offset(&b));
        side = -side;
        out.push(c.offset(&d1.scale(&(e * &side))).offset(&b));
    }
    out
}

struct EdgePlan {
    a: usize,
    b: usize,
    cuts: Vec<Cut>,
}

struct Builder<'a> {
    ax: Axis,
    tau: Rational,
    k: usize,
    overhang: Rational,
    node_band: Rational,
    names: &'a [VertexId],
}

impl Builder<'_> {
    /// Pieces of one edge with their geometry and crossed curves.
    fn pieces(&self, plan: &EdgePlan) -> Result<Vec<(VertexId, Polyline, Vec<usize>)>, GeometryError> {
        let ax = &self.ax;
        let (a, b) = (plan.a, plan.b);
        let w0 = ax.line(a, b);
        let r = plan.cuts.len();
        let k = Rational::from_int(self.k as i64);
        let edge = ax.edge(a, b);
        let east = Vector::new(Rational::one(), Rational::zero());
        let west = east.neg();
        let away = Vector::new(Rational::zero(), Rational::from_int(Axis::sign(a)));
        let node_g = &self.node_band / &k;
        let mut out = Vec::with_capacity(r + 1);
        for q in 0..=r {
            let upper = q % 2 == 1;
            let w = if upper { &w0 + &self.tau } else { w0.clone() };
            // Crossing point of this piece's line with the curve of cut `c`.
            let at = |c: &Cut| {
                if upper {
                    c.x.offset(&c.dir.scale(&(&self.tau / &c.dir.y)))
                } else {
                    c.x.clone()
                }
            };
            let toward = |c: &Cut| if upper { c.dir.clone() } else { c.dir.neg() };
            let mut pts = Vec::new();
            if q == 0 {
                let node = ax.local(ax.along(a), w.clone());
                if ax.o == Orientation::Horizontal {
                    let mut c = comb(&node, &west, &away, &self.overhang, &node_g, self.k);
                    c.reverse();
                    pts.extend(c);
                } else {
                    pts.push(node.offset(&west.scale(&self.overhang)));
                }
            } else {
                let c = &plan.cuts[q - 1];
                let rho4 = c.rho.halved(2);
                let mut cm = comb(&at(c), &west, &toward(c), &rho4, &(&rho4 / &k), self.k);
                cm.reverse();
                pts.extend(cm);
            }
            if q == r {
                let node = ax.local(ax.along(a + 1), w.clone());
                if ax.o == Orientation::Horizontal {
                    pts.extend(comb(&node, &east, &away, &self.overhang, &node_g, self.k));
                } else {
                    pts.push(node.offset(&east.scale(&self.overhang)));
                }
            } else {
                let c = &plan.cuts[q];
                let rho4 = c.rho.halved(2);
                pts.extend(comb(&at(c), &east, &toward(c), &rho4, &(&rho4 / &k), self.k));
            }
            let pts: Vec<Point> = pts.iter().map(|p| ax.global(p)).collect();
            let mut crossed = Vec::new();
            if q > 0 {
                crossed.push(plan.cuts[q - 1].curve);
            }
            if q < r {
                crossed.push(plan.cuts[q].curve);
            }
            let id = edge.id((r > 0).then_some(q));
            debug_assert!(!self.names.contains(&id));
            out.push((id, Polyline::new(pts)?, crossed));
        }
        Ok(out)
    }
}

/// `G^#(R)` and its representation: the input curves plus every mesh piece.
pub fn noodle_force(r: &Representation) -> Result<NoodleForceResult, NoodleError> {
    build(r, 1, Execution::default())
}

/// The same graph as [`noodle_force`], represented so that every intersecting
/// pair crosses exactly `k` times.
pub fn noodle_force_precise(r: &Representation, k: usize) -> Result<NoodleForceResult, NoodleError> {
    if k == 0 {
        return Err(NoodleError::ZeroK);
    }
    if !r.is_empty() && !is_precise(r, k)? {
        return Err(NoodleError::NotPrecise(k));
    }
    build(r, k, Execution::default())
}

pub fn noodle_force_with(r: &Representation, k: usize, exec: Execution) -> Result<NoodleForceResult, NoodleError> {
    if k == 0 {
        return Err(NoodleError::ZeroK);
    }
    if k > 1 && !r.is_empty() && !is_precise(r, k)? {
        return Err(NoodleError::NotPrecise(k));
    }
    build(r, k, exec)
}

fn build(r: &Representation, k: usize, exec: Execution) -> Result<NoodleForceResult, NoodleError> {
    let m = choose_mesh_with(r, exec)?;
    let curves = r.polylines();
    let names: Vec<VertexId> = r.ids().cloned().collect();
    let (hits_h, hits_v) = admissible(&curves, &m).expect("chosen mesh is admissible");
    let p = m.pitch.clone();
    let cap = m.margin().to_f64();
    let clear = Clearance::new(&curves, p.to_f64());

    let mut tau = p.halved(7);
    let mut plans: Vec<(Orientation, Vec<EdgePlan>)> = Vec::new();
    for (o, hits) in [(Orientation::Horizontal, hits_h), (Orientation::Vertical, hits_v)] {
        let ax = m.axis(o);
        let mut by_edge: BTreeMap<(usize, usize), Vec<Cut>> = BTreeMap::new();
        for h in hits {
            let (s0, s1) = curves[h.curve].segment(h.seg);
            let mut dir = ax.to_local(s1).sub(&ax.to_local(s0));
            if dir.y.is_negative() {
                dir = dir.neg();
            }
            let dir = dir.unit1();
            let x = ax.local(h.u.clone(), ax.line(h.a, h.b));
            let rho = pow2_below(clear.at(ax.global(&x).to_f64(), h.curve, h.seg, cap));
            let bound = (&rho * &dir.y).halved(3);
            if bound < tau {
                tau = bound.floor_pow2();
            }
            by_edge.entry((h.a, h.b)).or_default().push(Cut { x, dir, rho, curve: h.curve });
        }
        let mut list = Vec::new();
        for a in 0..ax.n_along {
            for b in 0..=ax.n_across {
                list.push(EdgePlan { a, b, cuts: by_edge.remove(&(a, b)).unwrap_or_default() });
            }
        }
        plans.push((o, list));
    }
    // Shifted lines must not pass any curve vertex.
    for c in &curves {
        for v in c.vertices() {
            for o in [Orientation::Horizontal, Orientation::Vertical] {
                let ax = m.axis(o);
                let w = ax.to_local(v).y.to_f64();
                let rel = (w - ax.across0.to_f64()) / p.to_f64();
                let t = ax.shift.to_f64();
                let mut best = f64::INFINITY;
                for b in [rel.floor() - 1.0, rel.floor(), rel.floor() + 1.0] {
                    let base = ax.across0.to_f64() + b * p.to_f64();
                    best = best.min((w - base - t).abs()).min((w - base + t).abs());
                }
                let bound = pow2_below(best);
                if bound < tau {
                    tau = bound;
                }
            }
        }
    }

    let mut out = r.clone();
    let mut edges: Vec<(VertexId, VertexId)> =
        crossing_matrix(r)?.entries().map(|(u, v, _)| (u.clone(), v.clone())).collect();
    let mut firsts: HashMap<MeshEdge, (VertexId, VertexId)> = HashMap::new();
    for (o, list) in &plans {
        let builder = Builder {
            ax: m.axis(*o),
            tau: tau.clone(),
            k,
            overhang: m.overhang(),
            node_band: p.halved(6),
            names: &names,
        };
        let built = exec.map(list, |plan| builder.pieces(plan));
        for (plan, pieces) in list.iter().zip(built) {
            let pieces = pieces?;
            let edge = builder.ax.edge(plan.a, plan.b);
            firsts.insert(edge, (pieces[0].0.clone(), pieces[pieces.len() - 1].0.clone()));
            for (id, poly, crossed) in pieces {
                for c in crossed {
                    edges.push((id.clone(), names[c].clone()));
                }
                out.insert(id, poly)?;
            }
        }
    }
    let (nx, ny) = (m.columns(), m.rows());
    for i in 0..=nx {
        for j in 0..=ny {
            let h = |i: usize| MeshEdge { orientation: Orientation::Horizontal, i, j };
            let v = |j: usize| MeshEdge { orientation: Orientation::Vertical, i, j };
            let mut hs = Vec::new();
            if i >= 1 {
                hs.push(firsts[&h(i - 1)].1.clone());
            }
            if i < nx {
                hs.push(firsts[&h(i)].0.clone());
            }
            let mut vs = Vec::new();
            if j >= 1 {
                vs.push(firsts[&v(j - 1)].1.clone());
            }
            if j < ny {
                vs.push(firsts[&v(j)].0.clone());
            }
            for a in &hs {
                for b in &vs {
                    edges.push((a.clone(), b.clone()));
                }
            }
        }
    }
    let mut graph = IntersectionGraph::new(out.ids().cloned());
    for (a, b) in &edges {
        graph.add_edge(a, b).expect("known vertices");
    }
    Ok(NoodleForceResult { graph, representation: out, original: names.into_iter().collect(), mesh: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::sausage;
    use crate::geometry::{polyline_contacts, ContactKind};
    use crate::representation::contains_induced;
    use crate::representation::{intersection_graph, validate_proper};

    /// Every uncut edge meets every curve at most once, properly.
    fn mesh_is_regular(r: &Representation, m: &MeshParameters) -> bool {
        m.edges().iter().all(|&e| {
            let (a, b) = m.edge_segment(e);
            let line = Polyline::new(vec![a, b]).unwrap();
            r.iter().all(|(_, c)| {
                let pc = polyline_contacts(&line, c);
                !pc.overlap && pc.contacts.len() <= 1 && pc.contacts.iter().all(|x| x.kind == ContactKind::ProperCrossing)
            })
        })
    }

    #[test]
    fn mesh_for_sausage_is_regular() {
        let r = sausage(1).unwrap();
        let m = choose_mesh(&r).unwrap();
        assert!(mesh_is_regular(&r, &m));
        let sep = separation_bound(&r.polylines()).unwrap();
        assert!(m.pitch <= sep.halved(2));
        let (lo, hi) = bbox_of(&r.polylines());
        let margin = &m.pitch * &Rational::from_int(2);
        assert!(m.extent.0.x <= &lo.x - &margin && m.extent.1.y >= &hi.y + &margin);
    }

    #[test]
    fn single_segment() {
        let r = Representation::from_curves([("s", Polyline::from_ints(&[(0, 0), (3, 0)]).unwrap())]).unwrap();
        let nf = noodle_force(&r).unwrap();
        assert!(mesh_is_regular(&r, &nf.mesh));
        assert!(validate_proper(&nf.representation).proper);
        assert_eq!(intersection_graph(&nf.representation).unwrap(), nf.graph);
        // Its neighbours are exactly the pieces of the vertical edges it crosses.
        let mut expected = BTreeSet::new();
        for e in nf.mesh.edges() {
            let (a, b) = nf.mesh.edge_segment(e);
            let line = Polyline::new(vec![a, b]).unwrap();
            if polyline_contacts(&line, r.get("s").unwrap()).crossing_count() == 1 {
                expected.insert(e.id(Some(0)));
                expected.insert(e.id(Some(1)));
            }
        }
        let got: BTreeSet<VertexId> = nf.graph.neighbors("s").cloned().collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn empty_input_gives_a_grid() {
        let nf = noodle_force(&Representation::new()).unwrap();
        assert!(validate_proper(&nf.representation).proper);
        assert_eq!(intersection_graph(&nf.representation).unwrap(), nf.graph);
        // Every inner horizontal edge meets four vertical ones.
        let e = MeshEdge { orientation: Orientation::Horizontal, i: 1, j: 1 };
        assert_eq!(nf.graph.neighbors(&e.id(None)).count(), 4);
    }

    #[test]
    fn sausage_keeps_its_pair() {
        let r = sausage(2).unwrap();
        let nf = noodle_force(&r).unwrap();
        assert_eq!(nf.representation.restrict(["u", "v"]), r);
        assert_eq!(crossing_matrix(&nf.representation).unwrap().get("u", "v"), 2);
        assert_eq!(intersection_graph(&nf.representation).unwrap(), nf.graph);
        let id: BTreeMap<VertexId, VertexId> = [("u", "u"), ("v", "v")].map(|(a, b)| (a.into(), b.into())).into();
        assert!(contains_induced(&nf.graph, &intersection_graph(&r).unwrap(), &id).unwrap());
    }

    #[test]
    fn precise_versions() {
        for (r, k) in [(sausage(1).unwrap(), 1), (sausage(2).unwrap(), 2), (sausage(3).unwrap(), 3)] {
            let plain = noodle_force(&r).unwrap();
            let nf = noodle_force_precise(&r, k).unwrap();
            assert_eq!(nf.graph, plain.graph);
            assert!(is_precise(&nf.representation, k).unwrap(), "k = {k}");
            assert_eq!(intersection_graph(&nf.representation).unwrap(), nf.graph);
        }
        assert!(matches!(noodle_force_precise(&sausage(2).unwrap(), 3), Err(NoodleError::NotPrecise(3))));
    }
}
