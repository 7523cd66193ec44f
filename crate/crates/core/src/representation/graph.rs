use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{CrossingMatrix, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("mapping is not injective: `{0}` and `{1}` both map to `{2}`")]
    NotInjective(String, String, String),
    #[error("mapping misses vertex `{0}`")]
    Unmapped(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge `{0}`-`{1}` is a loop or uses an unknown vertex")]
    BadEdge(String, String),
}

/// A simple undirected graph on string-named vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntersectionGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl IntersectionGraph {
    pub fn new<I, S>(vertices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        IntersectionGraph { vertices: vertices.into_iter().map(Into::into).collect(), edges: BTreeSet::new() }
    }

    pub fn from_matrix<I: IntoIterator<Item = VertexId>>(vertices: I, m: &CrossingMatrix) -> Self {
        let mut g = IntersectionGraph::new(vertices);
        for (u, v, _) in m.entries() {
            g.edges.insert((u.clone(), v.clone()));
        }
        g
    }

    pub fn add_edge(&mut self, u: &str, v: &str) -> Result<(), GraphError> {
        if u == v || !self.vertices.contains(u) || !self.vertices.contains(v) {
            return Err(GraphError::BadEdge(u.to_string(), v.to_string()));
        }
        let e = if u < v { (u.to_string(), v.to_string()) } else { (v.to_string(), u.to_string()) };
        self.edges.insert(e);
        Ok(())
    }

    pub fn has_edge(&self, u: &str, v: &str) -> bool {
        let e = if u < v { (u.to_string(), v.to_string()) } else { (v.to_string(), u.to_string()) };
        self.edges.contains(&e)
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId)> {
        self.edges.iter().map(|(u, v)| (u, v))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: &str) -> impl Iterator<Item = &VertexId> + '_ {
        let v = v.to_string();
        self.edges.iter().filter_map(move |(a, b)| {
            if *a == v {
                Some(b)
            } else if *b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn is_complete(&self) -> bool {
        let n = self.vertices.len();
        self.edges.len() == n * n.saturating_sub(1) / 2
    }

    /// `graph v1` followed by sorted `edge u v` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::from("graph v1\n");
        for (u, v) in &self.edges {
            let _ = writeln!(s, "edge {u} {v}");
        }
        s
    }
}

/// Whether `mapping` (from the vertices of `h` into those of `g`) embeds `h`
/// as an induced subgraph: it must preserve both edges and non-edges.
pub fn contains_induced(
    g: &IntersectionGraph,
    h: &IntersectionGraph,
    mapping: &BTreeMap<VertexId, VertexId>,
) -> Result<bool, GraphError> {
    let mut seen: BTreeMap<&VertexId, &VertexId> = BTreeMap::new();
    for hv in &h.vertices {
        let gv = mapping.get(hv).ok_or_else(|| GraphError::Unmapped(hv.clone()))?;
        if !g.vertices.contains(gv) {
            return Err(GraphError::UnknownVertex(gv.clone()));
        }
        if let Some(prev) = seen.insert(gv, hv) {
            return Err(GraphError::NotInjective(prev.clone(), hv.clone(), gv.clone()));
        }
    }
    let hv: Vec<&VertexId> = h.vertices.iter().collect();
    for (i, a) in hv.iter().enumerate() {
        for b in &hv[i + 1..] {
            if h.has_edge(a, b) != g.has_edge(&mapping[*a], &mapping[*b]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(vs: &[&str], es: &[(&str, &str)]) -> IntersectionGraph {
        let mut g = IntersectionGraph::new(vs.iter().copied());
        for (u, v) in es {
            g.add_edge(u, v).unwrap();
        }
        g
    }

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<VertexId, VertexId> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn triangle_contains_edge() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]);
        let h = graph(&["x", "y"], &[("x", "y")]);
        assert!(contains_induced(&g, &h, &map(&[("x", "a"), ("y", "c")])).unwrap());
    }

    #[test]
    fn path_never_contains_triangle() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let h = graph(&["x", "y", "z"], &[("x", "y"), ("y", "z"), ("x", "z")]);
        let names = ["a", "b", "c"];
        for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let m = map(&[("x", names[p[0]]), ("y", names[p[1]]), ("z", names[p[2]])]);
            assert!(!contains_induced(&g, &h, &m).unwrap());
        }
    }

    #[test]
    fn non_injective_mapping_is_an_error() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let h = graph(&["x", "y"], &[]);
        let e = contains_induced(&g, &h, &map(&[("x", "a"), ("y", "a")])).unwrap_err();
        assert!(matches!(e, GraphError::NotInjective(..)));
    }

    #[test]
    fn text_output_is_sorted() {
        let mut g = graph(&["b", "a", "c"], &[("c", "a"), ("b", "a")]);
        assert_eq!(g.to_text(), "graph v1\nedge a b\nedge a c\n");
        assert!(g.add_edge("a", "a").is_err());
    }
}
