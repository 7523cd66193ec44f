#![allow(dead_code)]

use rand::Rng;
use strrep::geometry::{Point, Polyline, Rational, Vector};
use strrep::representation::{
    crossing_matrix, intersection_point_counts, pair_crossings, validate_proper, Representation,
};

/// An x-monotone (hence simple) curve with `segs` segments in `[0, coord]^2`.
pub fn monotone_curve<R: Rng>(rng: &mut R, segs: usize, coord: i64) -> Polyline {
    loop {
        let mut xs: Vec<i64> = (0..=segs).map(|_| rng.gen_range(0..=coord)).collect();
        xs.sort();
        xs.dedup();
        if xs.len() != segs + 1 {
            continue;
        }
        let pts: Vec<(i64, i64)> = xs.into_iter().map(|x| (x, rng.gen_range(0..=coord))).collect();
        if let Ok(c) = Polyline::from_ints(&pts) {
            return c;
        }
    }
}

fn monotone_rep<R: Rng>(rng: &mut R, curves: usize, max_segs: usize, coord: i64) -> Representation {
    let mut r = Representation::new();
    for i in 0..curves {
        let segs = rng.gen_range(1..=max_segs);
        r.insert(format!("c{i}"), monotone_curve(rng, segs, coord)).unwrap();
    }
    r
}

/// A proper representation with 2..=`max_curves` curves of at most
/// `max_segs` segments, at least one pair intersecting.
pub fn random_proper<R: Rng>(rng: &mut R, max_curves: usize, max_segs: usize, coord: i64) -> Representation {
    loop {
        let n = rng.gen_range(2..=max_curves);
        let r = monotone_rep(rng, n, max_segs, coord);
        if validate_proper(&r).proper && !crossing_matrix(&r).unwrap().is_empty() {
            return r;
        }
    }
}

/// Number of extension profiles in permissive mode.
pub fn profile_space(r: &Representation) -> u128 {
    r.ids()
        .map(|v| {
            let n = strrep::extension::crossing_sequence(r, v).unwrap().events.len() as u128;
            (n + 1) * (n + 1)
        })
        .product()
}

/// Small proper representations for the extension oracle: at most four
/// curves, at most three crossings per pair, at most `max_space` profiles.
pub fn small_extension_rep<R: Rng>(rng: &mut R, max_space: u128) -> Representation {
    loop {
        let n = rng.gen_range(2..=4);
        let r = monotone_rep(rng, n, 3, 60);
        if !validate_proper(&r).proper {
            continue;
        }
        let m = crossing_matrix(&r).unwrap();
        if m.is_empty() || m.values().any(|c| c > 3) {
            continue;
        }
        if profile_space(&r) <= max_space {
            return r;
        }
    }
}

fn small_vector<R: Rng>(rng: &mut R) -> Vector {
    loop {
        let v = Vector::new(Rational::from_int(rng.gen_range(-12..=12)), Rational::from_int(rng.gen_range(-12..=12)));
        if !v.is_zero() {
            return v;
        }
    }
}

/// A short curve that makes a degenerate contact with `r`: through a
/// crossing (triple point), touching a segment from one side (tangency), or
/// ending on a curve.
fn degenerate_curve<R: Rng>(rng: &mut R, r: &Representation) -> Option<Polyline> {
    let ids: Vec<&String> = r.ids().collect();
    match rng.gen_range(0..3) {
        0 => {
            let m = crossing_matrix(r).ok()?;
            let pairs: Vec<_> = m.entries().collect();
            let (u, v, _) = pairs.get(rng.gen_range(0..pairs.len().max(1)))?;
            let x = pair_crossings(r, u, v).ok()?.swap_remove(0).point;
            let d = small_vector(rng);
            Polyline::new(vec![x.offset(&d.neg()), x.offset(&d)]).ok()
        }
        kind => {
            let c = r.get(ids[rng.gen_range(0..ids.len())])?;
            let (a, b) = c.segment(rng.gen_range(0..c.segment_count()));
            let p = a.lerp(b, &Rational::new(1, 2));
            let dir = b.sub(a);
            let e1 = small_vector(rng);
            if kind == 1 {
                let e2 = small_vector(rng);
                let (s1, s2) = (dir.cross(&e1).signum(), dir.cross(&e2).signum());
                if s1 == 0 || s1 != s2 || e1.cross(&e2).is_zero() {
                    return None;
                }
                Polyline::new(vec![p.offset(&e1), p.clone(), p.offset(&e2)]).ok()
            } else {
                if dir.cross(&e1).is_zero() {
                    return None;
                }
                Polyline::new(vec![p.offset(&e1), p]).ok()
            }
        }
    }
}

/// A `k`-string representation, possibly improper: random curves with one or
/// two injected tangencies, triple points or endpoint contacts.
pub fn random_kstring<R: Rng>(rng: &mut R, k: usize) -> Representation {
    'outer: loop {
        let n = rng.gen_range(2..=4);
        let mut r = monotone_rep(rng, n, 3, 200);
        if !validate_proper(&r).proper {
            continue;
        }
        let m = crossing_matrix(&r).unwrap();
        if m.is_empty() || m.values().any(|c| c > k) {
            continue;
        }
        for j in 0..rng.gen_range(1..=2) {
            let Some(c) = degenerate_curve(rng, &r) else { continue 'outer };
            if !strrep::geometry::is_simple(&c) {
                continue 'outer;
            }
            r.insert(format!("t{j}"), c).unwrap();
        }
        match intersection_point_counts(&r) {
            Ok(m) if m.values().all(|c| c <= k) && !validate_proper(&r).proper => return r,
            _ => continue,
        }
    }
}

pub fn point(x: i64, y: i64) -> Point {
    Point::from_ints(x, y)
}
