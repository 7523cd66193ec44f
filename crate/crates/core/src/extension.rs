//! Faithful extensions: every curve may grow two parts, one from each
//! endpoint, running alongside it and doubling a prefix (resp. suffix) of its
//! crossings.
//!
//! A crossing `p` of `u` and `v` covered `a` times by the parts of `u` and `b`
//! times by the parts of `v` turns into `(1 + a)(1 + b)` crossings.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::exec::Execution;
use crate::geometry::offset::offset_vertices;
use crate::geometry::{separation_bound, CurvePos, GeometryError, Point, Polyline, Rational};
use crate::representation::{
    crossing_matrix, crossing_matrix_with, pair_crossings, CrossingMatrix, Representation, RepresentationError, VertexId,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("depths ({1}, {2}) of `{0}` exceed its {3} crossing(s)")]
    DepthOutOfBounds(String, usize, usize, usize),
    #[error("depths ({1}, {2}) of `{0}` overlap, which disjoint mode forbids")]
    Overlapping(String, usize, usize),
    #[error("profile names unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("enumeration space of {0} profiles per half exceeds the limit {1}")]
    TooLarge(u128, u128),
    #[error("extension did not verify: {0}")]
    Verification(String),
}

/// Whether the two parts of one curve may both cover the same crossing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExtensionMode {
    #[default]
    Permissive,
    Disjoint,
}

/// Crossings along a curve from its first vertex, each named by the other
/// curve and its rank along the lexicographically smaller curve of the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingSequence {
    pub curve: VertexId,
    pub events: Vec<(VertexId, usize)>,
}

/// Left and right duplication depths per curve; absent curves have `(0, 0)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtensionProfile {
    depths: BTreeMap<VertexId, (usize, usize)>,
}

impl ExtensionProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, curve: impl Into<String>, left: usize, right: usize) {
        self.depths.insert(curve.into(), (left, right));
    }

    pub fn get(&self, curve: &str) -> (usize, usize) {
        self.depths.get(curve).copied().unwrap_or((0, 0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, (usize, usize))> {
        self.depths.iter().map(|(k, &v)| (k, v))
    }

    /// `extend <curve> <left> <right>` lines, one per curve with a nonzero depth.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (c, (l, r)) in self.iter() {
            if (l, r) != (0, 0) {
                let _ = writeln!(s, "extend {c} {l} {r}");
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, ExtensionError> {
        let mut p = ExtensionProfile::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let w: Vec<&str> = line.split_whitespace().collect();
            let bad = || ExtensionError::Parse(i + 1, format!("expected `extend <curve> <left> <right>`, got `{line}`"));
            if w.len() != 4 || w[0] != "extend" {
                return Err(bad());
            }
            let l = w[2].parse().map_err(|_| bad())?;
            let r = w[3].parse().map_err(|_| bad())?;
            if p.depths.insert(w[1].to_string(), (l, r)).is_some() {
                return Err(ExtensionError::Parse(i + 1, format!("curve `{}` listed twice", w[1])));
            }
        }
        Ok(p)
    }
}

pub type ExtendedCounts = CrossingMatrix;

/// A crossing located on both curves of its pair (`a < b`).
#[derive(Clone, Debug)]
struct Event {
    a: usize,
    b: usize,
    pos_a: CurvePos,
    pos_b: CurvePos,
}

/// Integer-indexed view of a proper representation's crossings.
struct Model {
    names: Vec<VertexId>,
    /// Per curve, crossing ids in order along the curve.
    seq: Vec<Vec<usize>>,
    events: Vec<Event>,
    /// Per crossing, its index in the sequences of its two curves.
    slot: Vec<(usize, usize)>,
    /// Crossing ids of each intersecting pair `(a, b)`, `a < b`.
    pairs: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Model {
    fn build(r: &Representation) -> Result<Model, ExtensionError> {
        crossing_matrix(r)?;
        let names: Vec<VertexId> = r.ids().cloned().collect();
        let mut events = Vec::new();
        let mut pairs: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for a in 0..names.len() {
            for b in a + 1..names.len() {
                for c in pair_crossings(r, &names[a], &names[b])? {
                    pairs.entry((a, b)).or_default().push(events.len());
                    events.push(Event { a, b, pos_a: c.pos_u, pos_b: c.pos_v });
                }
            }
        }
        let mut along: Vec<Vec<(CurvePos, usize)>> = vec![Vec::new(); names.len()];
        for (id, e) in events.iter().enumerate() {
            along[e.a].push((e.pos_a.clone(), id));
            along[e.b].push((e.pos_b.clone(), id));
        }
        let mut slot = vec![(0, 0); events.len()];
        let mut seq = Vec::with_capacity(names.len());
        for (c, mut list) in along.into_iter().enumerate() {
            list.sort();
            for (i, (_, id)) in list.iter().enumerate() {
                if events[*id].a == c {
                    slot[*id].0 = i;
                } else {
                    slot[*id].1 = i;
                }
            }
            seq.push(list.into_iter().map(|(_, id)| id).collect());
        }
        Ok(Model { names, seq, events, slot, pairs })
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    fn depths(&self, p: &ExtensionProfile, mode: ExtensionMode) -> Result<Vec<(usize, usize)>, ExtensionError> {
        for (name, _) in p.iter() {
            self.index(name).ok_or_else(|| ExtensionError::UnknownCurve(name.clone()))?;
        }
        self.names
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let (l, r) = p.get(name);
                let n = self.seq[c].len();
                if l > n || r > n {
                    return Err(ExtensionError::DepthOutOfBounds(name.clone(), l, r, n));
                }
                if mode == ExtensionMode::Disjoint && l + r > n {
                    return Err(ExtensionError::Overlapping(name.clone(), l, r));
                }
                Ok((l, r))
            })
            .collect()
    }

    fn options(&self, c: usize, mode: ExtensionMode) -> Vec<(usize, usize)> {
        let n = self.seq[c].len();
        let mut out = Vec::new();
        for l in 0..=n {
            for r in 0..=n {
                if mode == ExtensionMode::Permissive || l + r <= n {
                    out.push((l, r));
                }
            }
        }
        out
    }
}

fn coverage(i: usize, n: usize, (l, r): (usize, usize)) -> usize {
    usize::from(i < l) + usize::from(i + r >= n)
}

impl Model {
    fn pair_count(&self, pair: &[usize], da: (usize, usize), db: (usize, usize)) -> usize {
        pair.iter()
            .map(|&id| {
                let e = &self.events[id];
                let (sa, sb) = self.slot[id];
                (1 + coverage(sa, self.seq[e.a].len(), da)) * (1 + coverage(sb, self.seq[e.b].len(), db))
            })
            .sum()
    }
}

pub fn crossing_sequence(r: &Representation, v: &str) -> Result<CrossingSequence, ExtensionError> {
    r.curve(v)?;
    let m = Model::build(r)?;
    let c = m.index(v).expect("curve exists");
    let events = m.seq[c]
        .iter()
        .map(|&id| {
            let e = &m.events[id];
            let other = if e.a == c { e.b } else { e.a };
            let rank = m.pairs[&(e.a, e.b)].iter().position(|&x| x == id).expect("event belongs to its pair");
            (m.names[other].clone(), rank)
        })
        .collect();
    Ok(CrossingSequence { curve: v.to_string(), events })
}

pub fn extended_counts(r: &Representation, profile: &ExtensionProfile) -> Result<ExtendedCounts, ExtensionError> {
    extended_counts_with(r, profile, ExtensionMode::Permissive)
}

pub fn extended_counts_with(
    r: &Representation,
    profile: &ExtensionProfile,
    mode: ExtensionMode,
) -> Result<ExtendedCounts, ExtensionError> {
    let m = Model::build(r)?;
    let d = m.depths(profile, mode)?;
    let mut out = CrossingMatrix::default();
    for (&(a, b), ids) in &m.pairs {
        out.add(&m.names[a], &m.names[b], m.pair_count(ids, d[a], d[b]));
    }
    Ok(out)
}

/// Pair-count bounds for a partial assignment: a curve not yet assigned can
/// contribute anything from no coverage to full coverage on both sides.
fn bounds(m: &Model, pair: &[usize], a: Option<(usize, usize)>, b: Option<(usize, usize)>, mode: ExtensionMode) -> (usize, usize) {
    let full = |c: usize| {
        let n = m.seq[c].len();
        match mode {
            ExtensionMode::Permissive => (n, n),
            ExtensionMode::Disjoint => (n, 0),
        }
    };
    let (ea, eb) = (m.events[pair[0]].a, m.events[pair[0]].b);
    let lo = m.pair_count(pair, a.unwrap_or((0, 0)), b.unwrap_or((0, 0)));
    let hi = if mode == ExtensionMode::Permissive || (a.is_some() && b.is_some()) {
        m.pair_count(pair, a.unwrap_or_else(|| full(ea)), b.unwrap_or_else(|| full(eb)))
    } else {
        // With disjoint parts every crossing is covered at most once.
        pair.iter()
            .map(|&id| {
                let (sa, sb) = m.slot[id];
                let ca = a.map_or(1, |d| coverage(sa, m.seq[ea].len(), d));
                let cb = b.map_or(1, |d| coverage(sb, m.seq[eb].len(), d));
                (1 + ca) * (1 + cb)
            })
            .sum()
    };
    (lo, hi)
}

struct Search<'a> {
    m: &'a Model,
    target: usize,
    mode: ExtensionMode,
    /// Pairs involving each curve.
    incident: Vec<Vec<(usize, usize)>>,
}

impl Search<'_> {
    fn feasible(&self, assigned: &[Option<(usize, usize)>], c: usize) -> bool {
        self.incident[c].iter().all(|&(a, b)| {
            let (lo, hi) = bounds(self.m, &self.m.pairs[&(a, b)], assigned[a], assigned[b], self.mode);
            lo <= self.target && self.target <= hi
        })
    }

    fn extend(&self, assigned: &mut Vec<Option<(usize, usize)>>, c: usize) -> bool {
        if c == assigned.len() {
            return true;
        }
        for opt in self.m.options(c, self.mode) {
            assigned[c] = Some(opt);
            if self.feasible(assigned, c) && self.extend(assigned, c + 1) {
                return true;
            }
        }
        assigned[c] = None;
        false
    }
}

pub fn search_extension(r: &Representation, target: usize) -> Result<Option<ExtensionProfile>, ExtensionError> {
    search_extension_with(r, target, ExtensionMode::Permissive, Execution::default())
}

/// Complete backtracking search for a profile making every intersecting pair
/// cross exactly `target` times. Curves are assigned in name order, depth
/// pairs in ascending order; the first curve's options are explored in
/// parallel but the lowest successful one wins, so the answer is
/// deterministic. A found profile is realized and checked geometrically
/// before it is returned.
pub fn search_extension_with(
    r: &Representation,
    target: usize,
    mode: ExtensionMode,
    exec: Execution,
) -> Result<Option<ExtensionProfile>, ExtensionError> {
    let m = Model::build(r)?;
    let n = m.names.len();
    let mut incident = vec![Vec::new(); n];
    for &(a, b) in m.pairs.keys() {
        incident[a].push((a, b));
        incident[b].push((a, b));
    }
    let s = Search { m: &m, target, mode, incident };
    if n == 0 {
        return Ok(Some(ExtensionProfile::new()));
    }
    let first = m.options(0, mode);
    let found = exec.find_map_first(&first, |&opt| {
        let mut assigned = vec![None; n];
        assigned[0] = Some(opt);
        (s.feasible(&assigned, 0) && s.extend(&mut assigned, 1)).then_some(assigned)
    });
    let Some(assigned) = found else { return Ok(None) };
    let mut p = ExtensionProfile::new();
    for (c, d) in assigned.into_iter().enumerate() {
        let (l, r) = d.expect("complete assignment");
        if (l, r) != (0, 0) {
            p.set(m.names[c].clone(), l, r);
        }
    }
    let realized = realize_extension(r, &p)?;
    if !crossing_matrix(&realized)?.values().all(|c| c == target) {
        return Err(ExtensionError::Verification("found profile does not realize the target".into()));
    }
    Ok(Some(p))
}

/// Outcome of exhaustive enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    /// Number of profiles reaching the target on every intersecting pair.
    pub solutions: u128,
    /// Size of the profile space.
    pub space: u128,
}

/// Counts every profile that reaches `target`, without pruning heuristics:
/// the curves are split into two halves, each half's profiles are enumerated
/// in full and filtered by the pairs inside it, and the survivors are joined
/// on their coverage of the crossings between the halves. Serves as an
/// independent oracle for [`search_extension_with`].
pub fn enumerate_extensions(
    r: &Representation,
    target: usize,
    mode: ExtensionMode,
    limit: u128,
) -> Result<Enumeration, ExtensionError> {
    let m = Model::build(r)?;
    let n = m.names.len();
    let split = n.div_ceil(2);
    let opts: Vec<Vec<(usize, usize)>> = (0..n).map(|c| m.options(c, mode)).collect();
    let space_of = |range: std::ops::Range<usize>| range.map(|c| opts[c].len() as u128).product::<u128>();
    let (sa, sb) = (space_of(0..split), space_of(split..n));
    if sa.max(sb) > limit {
        return Err(ExtensionError::TooLarge(sa.max(sb), limit));
    }
    let cross: Vec<(usize, usize)> = m.pairs.keys().copied().filter(|&(a, b)| a < split && b >= split).collect();
    let cross_ids: Vec<usize> = cross.iter().flat_map(|k| m.pairs[k].iter().copied()).collect();
    let half = |range: std::ops::Range<usize>, left: bool| -> HashMap<Vec<u8>, u128> {
        let curves: Vec<usize> = range.collect();
        let total: u128 = curves.iter().map(|&c| opts[c].len() as u128).product();
        let mut groups: HashMap<Vec<u8>, u128> = HashMap::new();
        let mut depth = vec![(0, 0); n];
        for code in 0..total {
            let mut x = code;
            for &c in &curves {
                let k = opts[c].len() as u128;
                depth[c] = opts[c][(x % k) as usize];
                x /= k;
            }
            let inside = m.pairs.iter().all(|(&(a, b), ids)| {
                !(curves.contains(&a) && curves.contains(&b)) || m.pair_count(ids, depth[a], depth[b]) == target
            });
            if !inside {
                continue;
            }
            let key = cross_ids
                .iter()
                .map(|&id| {
                    let e = &m.events[id];
                    let (c, s) = if left { (e.a, m.slot[id].0) } else { (e.b, m.slot[id].1) };
                    coverage(s, m.seq[c].len(), depth[c]) as u8
                })
                .collect();
            *groups.entry(key).or_insert(0) += 1;
        }
        groups
    };
    let ga = half(0..split, true);
    let gb = half(split..n, false);
    let mut solutions = 0u128;
    for (ka, ca) in &ga {
        for (kb, cb) in &gb {
            let mut i = 0;
            let ok = cross.iter().all(|k| {
                let len = m.pairs[k].len();
                let s: usize = (i..i + len).map(|j| (1 + ka[j] as usize) * (1 + kb[j] as usize)).sum();
                i += len;
                s == target
            });
            if ok {
                solutions += ca * cb;
            }
        }
    }
    Ok(Enumeration { solutions, space: sa * sb })
}

/// Point a short distance past position `pos` in the curve's direction
/// (`forward`) or against it, staying on the same segment.
fn nudge(c: &Polyline, pos: &CurvePos, step: &Rational, forward: bool) -> (usize, Point) {
    let (a, b) = c.segment(pos.segment);
    let dir = b.sub(a).unit1();
    let p = c.point_at(pos);
    if forward {
        (pos.segment, p.offset(&dir.scale(step)))
    } else {
        (pos.segment, p.offset(&dir.scale(&-step)))
    }
}

/// Attaches the profiled parts to every curve: the left part runs on the left
/// side at distance `d` from the first vertex to just past the last covered
/// crossing, the right part on the right side from the last vertex back to
/// just before its first covered crossing.
fn extend_curve(
    c: &Polyline,
    seq: &[CurvePos],
    (l, r): (usize, usize),
    d: &Rational,
    step: &Rational,
) -> Option<Polyline> {
    let v = c.vertices();
    let mut out: Vec<Point> = Vec::new();
    if l > 0 {
        let (s, q) = nudge(c, &seq[l - 1], step, true);
        let mut prefix: Vec<Point> = v[..=s].to_vec();
        prefix.push(q);
        let mut part = offset_vertices(&Polyline::new(prefix).ok()?, d);
        part.reverse();
        out.extend(part);
    }
    out.extend_from_slice(v);
    if r > 0 {
        let (s, q) = nudge(c, &seq[seq.len() - r], step, false);
        let mut suffix = vec![q];
        suffix.extend_from_slice(&v[s + 1..]);
        let mut part = offset_vertices(&Polyline::new(suffix).ok()?, &-d);
        part.reverse();
        out.extend(part);
    }
    Polyline::new(out).ok()
}

/// Geometric realization of a profile; its crossing matrix equals
/// [`extended_counts`].
pub fn realize_extension(r: &Representation, profile: &ExtensionProfile) -> Result<Representation, ExtensionError> {
    let m = Model::build(r)?;
    let depths = m.depths(profile, ExtensionMode::Permissive)?;
    if depths.iter().all(|&d| d == (0, 0)) {
        return Ok(r.clone());
    }
    let expected = extended_counts(r, profile)?;
    let delta = separation_bound(&r.polylines())?;
    let step = delta.halved(2);
    let positions: Vec<Vec<CurvePos>> = (0..m.names.len())
        .map(|c| {
            m.seq[c]
                .iter()
                .map(|&id| {
                    let e = &m.events[id];
                    if e.a == c {
                        e.pos_a.clone()
                    } else {
                        e.pos_b.clone()
                    }
                })
                .collect()
        })
        .collect();
    let mut d = delta.halved(3);
    for _ in 0..48 {
        let mut out = r.clone();
        let mut ok = true;
        for (c, name) in m.names.iter().enumerate() {
            if depths[c] == (0, 0) {
                continue;
            }
            match extend_curve(r.curve(name)?, &positions[c], depths[c], &d, &step) {
                Some(p) => out.set(name, p),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            if let Ok(got) = crossing_matrix_with(&out, Execution::default()) {
                if got == expected {
                    return Ok(out);
                }
            }
        }
        d = d.halved(1);
    }
    Err(ExtensionError::Verification("no offset realized the profile".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::sausage;

    #[test]
    fn sausage_sequences() {
        let r = sausage(3).unwrap();
        let s = crossing_sequence(&r, "u").unwrap();
        assert_eq!(s.events, vec![("v".into(), 0), ("v".into(), 1), ("v".into(), 2)]);
        let single = Representation::from_curves([("a", Polyline::from_ints(&[(0, 0), (1, 0)]).unwrap())]).unwrap();
        assert!(crossing_sequence(&single, "a").unwrap().events.is_empty());
    }

    #[test]
    fn counts_follow_the_product_rule() {
        let r = sausage(1).unwrap();
        assert_eq!(extended_counts(&r, &ExtensionProfile::new()).unwrap().get("u", "v"), 1);
        let mut p = ExtensionProfile::new();
        p.set("u", 1, 0);
        assert_eq!(extended_counts(&r, &p).unwrap().get("u", "v"), 2);
        p.set("u", 1, 1);
        p.set("v", 0, 1);
        assert_eq!(extended_counts(&r, &p).unwrap().get("u", "v"), 6);
        assert_eq!(
            extended_counts_with(&r, &p, ExtensionMode::Disjoint),
            Err(ExtensionError::Overlapping("u".into(), 1, 1))
        );
        p.set("v", 2, 0);
        assert!(matches!(extended_counts(&r, &p), Err(ExtensionError::DepthOutOfBounds(..))));
    }

    #[test]
    fn two_to_three_by_one_covered_crossing() {
        let r = sausage(2).unwrap();
        let mut p = ExtensionProfile::new();
        p.set("u", 1, 0);
        assert_eq!(extended_counts(&r, &p).unwrap().get("u", "v"), 3);
        let x = realize_extension(&r, &p).unwrap();
        assert!(crate::representation::is_precise(&x, 3).unwrap());
    }

    #[test]
    fn search_and_enumeration_agree_on_sausages() {
        for n in 1..=3 {
            let r = sausage(n).unwrap();
            for target in n..=n + 3 {
                let found = search_extension(&r, target).unwrap();
                let all = enumerate_extensions(&r, target, ExtensionMode::Permissive, 1 << 20).unwrap();
                assert_eq!(found.is_some(), all.solutions > 0, "n={n} target={target}");
            }
        }
    }

    #[test]
    fn profile_text_round_trip() {
        let mut p = ExtensionProfile::new();
        p.set("a1", 2, 0);
        p.set("b", 0, 3);
        let t = p.to_text();
        assert_eq!(t, "extend a1 2 0\nextend b 0 3\n");
        assert_eq!(ExtensionProfile::parse(&t).unwrap(), p);
        assert!(ExtensionProfile::parse("extend a 1").is_err());
    }
}
