//! Parallel copies of polylines with mitred corners.

use super::{Point, Polyline, Rational, Vector};

/// Left unit normal (L1-normalized) of the direction `d`.
pub fn left_normal(d: &Vector) -> Vector {
    d.perp().unit1()
}

/// Intersection of the lines `p + s*d` and `q + t*e`, if they are not parallel.
pub fn line_intersection(p: &Point, d: &Vector, q: &Point, e: &Vector) -> Option<Point> {
    let den = d.cross(e);
    if den.is_zero() {
        return None;
    }
    let s = &q.sub(p).cross(e) / &den;
    Some(p.offset(&d.scale(&s)))
}

/// The vertices of the mitred parallel copy of `c` at distance `dist`
/// (measured along L1-normalized normals, so the Euclidean gap lies in
/// `[dist/sqrt(2), dist]`). Positive `dist` offsets to the left.
pub fn offset_vertices(c: &Polyline, dist: &Rational) -> Vec<Point> {
    let v = c.vertices();
    let dirs: Vec<Vector> = c.segments().map(|(a, b)| b.sub(a)).collect();
    let normals: Vec<Vector> = dirs.iter().map(|d| left_normal(d).scale(dist)).collect();
    let mut out = Vec::with_capacity(v.len());
    out.push(v[0].offset(&normals[0]));
    for j in 1..v.len() - 1 {
        let (d0, d1) = (&dirs[j - 1], &dirs[j]);
        let p0 = v[j].offset(&normals[j - 1]);
        let p1 = v[j].offset(&normals[j]);
        out.push(line_intersection(&p0, d0, &p1, d1).unwrap_or(p1));
    }
    out.push(v[v.len() - 1].offset(&normals[normals.len() - 1]));
    out
}

/// Mitred parallel copy of `c`, or `None` if the copy degenerates (possible
/// only when `dist` is large compared with the segment lengths).
pub fn offset_polyline(c: &Polyline, dist: &Rational) -> Option<Polyline> {
    Polyline::new(offset_vertices(c, dist)).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_of_a_right_angle() {
        let c = Polyline::from_ints(&[(0, 0), (4, 0), (4, 4)]).unwrap();
        let o = offset_polyline(&c, &Rational::from_int(1)).unwrap();
        assert_eq!(o.vertices(), &[Point::from_ints(0, 1), Point::from_ints(3, 1), Point::from_ints(3, 4)]);
        let o = offset_polyline(&c, &Rational::from_int(-1)).unwrap();
        assert_eq!(o.vertices(), &[Point::from_ints(0, -1), Point::from_ints(5, -1), Point::from_ints(5, 4)]);
    }

    #[test]
    fn collinear_vertices_stay_collinear() {
        let c = Polyline::from_ints(&[(0, 0), (1, 1), (3, 3)]).unwrap();
        let o = offset_vertices(&c, &Rational::from_int(2));
        assert_eq!(o[1], Point::from_ints(0, 2));
    }
}
