use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strrep::analysis::{
    build_noodles, classify_crossing_area, classify_fragments, covers, sample_confined, AnalysisError, AreaClass, Ends,
    FragmentKind, NoodleSystem, Perturbation,
};
use strrep::gadgets::{gadget_k8, gadget_odd_counterexample, sausage};
use strrep::geometry::{polyline_contacts, separation_bound, Rational};
use strrep::representation::Representation;

fn system(r: &Representation) -> NoodleSystem {
    build_noodles(r, &separation_bound(&r.polylines()).unwrap().halved(2).floor_pow2()).unwrap()
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[test]
fn zone_counts_match_crossings() {
    assert_eq!(system(&sausage(1).unwrap()).zone_count(), 1);
    assert_eq!(system(&sausage(3).unwrap()).zones("v", "u").unwrap().len(), 3);
    assert_eq!(system(&gadget_k8(1).unwrap()).zone_count(), 28);
}

#[test]
fn too_large_epsilon_names_the_bound() {
    let s = sausage(2).unwrap();
    let err = build_noodles(&s, &Rational::one()).unwrap_err();
    assert!(matches!(err, AnalysisError::EpsilonTooLarge(_, "half the separation bound", _)), "{err}");
}

/// Fixtures in lane coordinates of `u` on sausage(1): a reversal, three
/// passes, a doubled-back curve and a truncated one.
#[test]
fn lane_fixtures() {
    let base = sausage(1).unwrap();
    let sys = system(&base);
    let zone = sys.zones("u", "v").unwrap()[0].clone();
    let zero = Rational::zero();
    let (s_in, s_out) = sys.zone_lane_span(&zone, "u", &zero).unwrap();
    let (before, after) = (&s_in - &r(1, 16), &s_out + &r(1, 16));
    let inside = (&s_in + &s_out) / Rational::from_int(2);
    let with_u = |pts: &[(Rational, Rational)]| {
        let mut c = base.clone();
        c.set("u", sys.lane_curve("u", pts).unwrap());
        c
    };

    let detour = with_u(&[(zero.clone(), zero.clone()), (inside.clone(), r(1, 3)), (before.clone(), r(-1, 3)), (Rational::one(), zero.clone())]);
    let rep = classify_fragments(&sys, &detour, "u", "v").unwrap();
    assert_eq!(rep.zones[0].count("u", FragmentKind::Reversal), 1);

    let three = with_u(&[(zero.clone(), zero.clone()), (after, r(1, 3)), (before, r(-1, 3)), (Rational::one(), zero.clone())]);
    let rep = classify_fragments(&sys, &three, "u", "v").unwrap();
    assert_eq!(rep.zones[0].count("u", FragmentKind::Traversal), 3);
    assert_eq!(rep.zones[0].of("u").count(), 3);
    let v_path = &rep.zones[0].of("v").next().unwrap().path;
    for f in rep.zones[0].of("u") {
        assert_eq!(polyline_contacts(&f.path, v_path).crossing_count(), 1);
    }

    let doubled = with_u(&[(zero.clone(), zero.clone()), (Rational::one(), r(1, 3)), (r(1, 32), r(-1, 3))]);
    assert_eq!(classify_crossing_area(&sys, &doubled, "u", "v").unwrap().u, AreaClass::Peripheral);

    let cut = with_u(&[(zero.clone(), zero.clone()), (inside, zero)]);
    let c = classify_crossing_area(&sys, &cut, "u", "v").unwrap();
    assert_eq!((c.u, c.v), (AreaClass::Ambiguous, AreaClass::Central));
}

#[test]
fn base_curves_cover_nothing() {
    let r = gadget_odd_counterexample();
    let sys = system(&r);
    assert_eq!(covers(&sys, &r, "t1", "t2").unwrap(), (false, false));
    assert!(matches!(covers(&sys, &r, "b1", "b2"), Err(AnalysisError::ZoneCount(..))));
}

#[test]
fn sampled_k8_curves_are_confined_and_generic() {
    let r = gadget_k8(1).unwrap();
    let sys = system(&r);
    let ids: Vec<&str> = r.ids().map(|v| v.as_str()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let spec = |_: &str| Perturbation { wiggles: 1, loops: 1, ends: Ends::Through };
    let conf = sample_confined(&sys, &ids, &spec, &mut rng).unwrap();
    for (id, c) in conf.iter() {
        assert!(sys.noodle(id).unwrap().confines(c));
    }
    let c = classify_crossing_area(&sys, &conf, "h1", "v1").unwrap();
    assert_eq!((c.u, c.v), (AreaClass::Central, AreaClass::Central));
}
