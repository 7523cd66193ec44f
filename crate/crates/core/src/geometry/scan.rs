//! All-pairs segment contact scan over a family of polylines.
//!
//! Segments are bucketed in a uniform grid by (padded) floating-point bounding
//! boxes; every candidate pair is then classified exactly. Each pair is
//! examined in exactly one bucket, the one holding the lower-left corner of
//! the two boxes' intersection.

use super::{segment_contact_unchecked, ContactKind, Polyline, SegmentContact};
use crate::exec::Execution;

#[derive(Clone, Debug)]
pub struct SegmentHit {
    pub curve_a: usize,
    pub seg_a: usize,
    pub curve_b: usize,
    pub seg_b: usize,
    pub contact: SegmentContact,
}

#[derive(Clone, Copy)]
struct BBox {
    lo: (f64, f64),
    hi: (f64, f64),
}

impl BBox {
    fn overlaps(&self, o: &BBox) -> bool {
        self.lo.0 <= o.hi.0 && o.lo.0 <= self.hi.0 && self.lo.1 <= o.hi.1 && o.lo.1 <= self.hi.1
    }
}

struct Grid {
    origin: (f64, f64),
    cell: (f64, f64),
    dims: (usize, usize),
}

impl Grid {
    fn index(&self, v: f64, axis: usize) -> usize {
        let (o, c, d) = if axis == 0 {
            (self.origin.0, self.cell.0, self.dims.0)
        } else {
            (self.origin.1, self.cell.1, self.dims.1)
        };
        let i = ((v - o) / c).floor();
        if i.is_nan() || i < 0.0 {
            0
        } else {
            (i as usize).min(d - 1)
        }
    }
}

/// Every non-empty contact between segments of different curves, and, when
/// `include_self` is set, between distinct segments of the same curve.
/// The output is sorted by `(curve_a, seg_a, curve_b, seg_b)` with
/// `(curve_a, seg_a) < (curve_b, seg_b)`.
pub fn scan(curves: &[Polyline], include_self: bool, exec: Execution) -> Vec<SegmentHit> {
    let mut segs: Vec<(usize, usize)> = Vec::new();
    let mut boxes: Vec<BBox> = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        for (si, (a, b)) in c.segments().enumerate() {
            let (ax, ay) = a.to_f64();
            let (bx, by) = b.to_f64();
            let pad = 1e-9 * (1.0 + ax.abs().max(ay.abs()).max(bx.abs()).max(by.abs()));
            boxes.push(BBox {
                lo: (ax.min(bx) - pad, ay.min(by) - pad),
                hi: (ax.max(bx) + pad, ay.max(by) + pad),
            });
            segs.push((ci, si));
        }
    }
    if segs.len() < 2 {
        return Vec::new();
    }
    let lo = boxes.iter().fold((f64::INFINITY, f64::INFINITY), |m, b| (m.0.min(b.lo.0), m.1.min(b.lo.1)));
    let hi = boxes.iter().fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |m, b| (m.0.max(b.hi.0), m.1.max(b.hi.1)));
    let side = ((segs.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
    let grid = Grid {
        origin: lo,
        cell: (((hi.0 - lo.0) / side as f64).max(1e-300), ((hi.1 - lo.1) / side as f64).max(1e-300)),
        dims: (side, side),
    };
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); side * side];
    for (k, b) in boxes.iter().enumerate() {
        let (x0, x1) = (grid.index(b.lo.0, 0), grid.index(b.hi.0, 0));
        let (y0, y1) = (grid.index(b.lo.1, 1), grid.index(b.hi.1, 1));
        for gy in y0..=y1 {
            for gx in x0..=x1 {
                buckets[gy * side + gx].push(k as u32);
            }
        }
    }
    let nonempty: Vec<usize> = (0..buckets.len()).filter(|&i| buckets[i].len() >= 2).collect();
    let per_bucket = exec.map(&nonempty, |&cell| {
        let members = &buckets[cell];
        let mut hits = Vec::new();
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                let (i, j) = (i.min(j) as usize, i.max(j) as usize);
                let (bi, bj) = (&boxes[i], &boxes[j]);
                if !bi.overlaps(bj) {
                    continue;
                }
                let corner = (bi.lo.0.max(bj.lo.0), bi.lo.1.max(bj.lo.1));
                if grid.index(corner.1, 1) * side + grid.index(corner.0, 0) != cell {
                    continue;
                }
                let (ca, sa) = segs[i];
                let (cb, sb) = segs[j];
                if ca == cb && !include_self {
                    continue;
                }
                let (p1, p2) = curves[ca].segment(sa);
                let (q1, q2) = curves[cb].segment(sb);
                let contact = segment_contact_unchecked(p1, p2, q1, q2);
                if contact.kind != ContactKind::Empty {
                    hits.push(SegmentHit { curve_a: ca, seg_a: sa, curve_b: cb, seg_b: sb, contact });
                }
            }
        }
        hits
    });
    let mut hits: Vec<SegmentHit> = per_bucket.into_iter().flatten().collect();
    hits.sort_by_key(|h| (h.curve_a, h.seg_a, h.curve_b, h.seg_b));
    hits
}
