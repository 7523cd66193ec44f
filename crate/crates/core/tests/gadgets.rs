use strrep::extension::crossing_sequence;
use strrep::gadgets::{gadget_gk, gadget_k8, gadget_odd_counterexample, generate, sausage, GadgetKind, GadgetSpec};
use strrep::representation::{crossing_matrix, intersection_graph};

/// Order in which each K8 wire meets the others, read from its left end.
const K8_ORDER: [(&str, [&str; 7]); 8] = [
    ("v1", ["v2", "h4", "h3", "h2", "h1", "v3", "v4"]),
    ("v2", ["v1", "h4", "h3", "h2", "h1", "v3", "v4"]),
    ("v3", ["v4", "h4", "h3", "h2", "h1", "v2", "v1"]),
    ("v4", ["v3", "h4", "h3", "h2", "h1", "v2", "v1"]),
    ("h1", ["h4", "h3", "v1", "v2", "v3", "v4", "h2"]),
    ("h2", ["h4", "h3", "v1", "v2", "v3", "v4", "h1"]),
    ("h3", ["h1", "h2", "v1", "v2", "v3", "v4", "h4"]),
    ("h4", ["h1", "h2", "v1", "v2", "v3", "v4", "h3"]),
];

#[test]
fn k8_crossing_orders_match_with_bundles_collapsed() {
    for k in [1, 3, 5] {
        let r = gadget_k8(k).unwrap();
        for (wire, order) in K8_ORDER {
            let seq = crossing_sequence(&r, wire).unwrap();
            assert_eq!(seq.events.len(), 7 * k);
            let mut collapsed: Vec<&str> = seq.events.iter().map(|(o, _)| o.as_str()).collect();
            // Each bundle is k consecutive crossings with the same wire.
            for chunk in collapsed.chunks(k) {
                assert!(chunk.iter().all(|o| *o == chunk[0]), "{wire} in K8({k}): {chunk:?}");
            }
            collapsed.dedup();
            assert_eq!(collapsed, order, "{wire} in K8({k})");
        }
    }
}

#[test]
fn sausage_crossings_alternate_in_order() {
    let r = sausage(4).unwrap();
    let seq = crossing_sequence(&r, "u").unwrap();
    let ranks: Vec<usize> = seq.events.iter().map(|(_, i)| *i).collect();
    assert_eq!(ranks, [0, 1, 2, 3]);
    // The two curves meet their crossings in the same order.
    let back = crossing_sequence(&r, "v").unwrap();
    assert_eq!(back.events.iter().map(|(_, i)| *i).collect::<Vec<_>>(), ranks);
}

#[test]
fn gk_graphs_agree_and_odd_counterexample_misses_one_pair() {
    let g = intersection_graph(&gadget_gk(2).unwrap()).unwrap();
    assert_eq!(g.edge_count(), 6);
    let r = gadget_odd_counterexample();
    let m = crossing_matrix(&r).unwrap();
    assert_eq!(m.len(), 27);
    assert_eq!(m.get("b1", "b2"), 0);
}

#[test]
fn generate_dispatches() {
    let r = generate(GadgetSpec { kind: GadgetKind::Sausage, k: 2 }).unwrap();
    assert_eq!(r, sausage(2).unwrap());
    assert!(generate(GadgetSpec { kind: GadgetKind::Gk, k: 1 }).is_err());
    assert!(generate(GadgetSpec { kind: GadgetKind::K8, k: 4 }).is_err());
}
