use strrep::extension::{
    enumerate_extensions, extended_counts, realize_extension, search_extension, ExtensionError, ExtensionMode,
    ExtensionProfile,
};
use strrep::gadgets::{gadget_g1, sausage};
use strrep::representation::{crossing_matrix, is_precise};

#[test]
fn found_extensions_are_realized() {
    for n in 1..=3 {
        let s = sausage(n).unwrap();
        for target in n + 1..=n + 4 {
            let found = search_extension(&s, target).unwrap();
            let e = enumerate_extensions(&s, target, ExtensionMode::Permissive, 1 << 20).unwrap();
            assert_eq!(found.is_some(), e.solutions > 0, "sausage({n}) -> {target}");
            if let Some(p) = found {
                assert!(is_precise(&realize_extension(&s, &p).unwrap(), target).unwrap());
            }
        }
    }
}

#[test]
fn one_sided_extension_of_a_single_crossing() {
    // Extending one end of u over the crossing doubles it.
    let s = sausage(1).unwrap();
    let p = ExtensionProfile::parse("extend u 1 0\n").unwrap();
    assert_eq!(extended_counts(&s, &p).unwrap().get("u", "v"), 2);
    assert_eq!(crossing_matrix(&realize_extension(&s, &p).unwrap()).unwrap().get("u", "v"), 2);
}

#[test]
fn g1_cannot_reach_two() {
    assert_eq!(search_extension(&gadget_g1(), 2).unwrap(), None);
}

#[test]
fn bad_profiles_are_rejected() {
    let s = sausage(2).unwrap();
    let deep = ExtensionProfile::parse("extend u 3 0\n").unwrap();
    assert!(matches!(extended_counts(&s, &deep), Err(ExtensionError::DepthOutOfBounds(..))));
    let unknown = ExtensionProfile::parse("extend w 0 1\n").unwrap();
    assert!(matches!(extended_counts(&s, &unknown), Err(ExtensionError::UnknownCurve(_))));
    assert!(ExtensionProfile::parse("extend u x 1\n").is_err());
}
