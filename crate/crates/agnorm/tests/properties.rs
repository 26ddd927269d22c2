use agnorm::decomposer::{idempotent_decompose, DEFAULT_MAX_STEPS, DROP_TOL, NORM_DROP};
use agnorm::group_core::subgroups;
use agnorm::io::{function_from_value, function_json, parse_subset, subset_json};
use agnorm::set_structures::{product_set, symmetry_set};
use agnorm::spectral::{a_norm, adjoint, convolve, pm_norm, recover_from_operator, ConvOp};
use agnorm::verify::random_coset_combination;
use agnorm::{build_group, Complex64, GFunc, GSubset, Group};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GROUPS: &[&str] = &["cyclic:7", "dihedral:8", "quaternion:8", "symmetric:3", "cyclic:2*cyclic:4", "dihedral:12"];

fn group_and_values(k: usize) -> impl Strategy<Value = (Group, Vec<Vec<Complex64>>)> {
    prop::sample::select(GROUPS).prop_flat_map(move |spec| {
        let g = build_group(spec).unwrap();
        let n = g.order();
        let vals = prop::collection::vec(
            prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b)), n),
            k,
        );
        (Just(g), vals)
    })
}

fn group_and_mask() -> impl Strategy<Value = (Group, Vec<bool>)> {
    prop::sample::select(GROUPS).prop_flat_map(|spec| {
        let g = build_group(spec).unwrap();
        let n = g.order();
        (Just(g), prop::collection::vec(any::<bool>(), n))
    })
}

fn func(g: &Group, v: &[Complex64]) -> GFunc {
    GFunc::new(g, v.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn a_norm_is_a_translation_invariant_algebra_norm((g, vs) in group_and_values(2), y in 0usize..24) {
        let (f, h) = (func(&g, &vs[0]), func(&g, &vs[1]));
        let y = y % g.order();
        let (af, ah) = (a_norm(&f).unwrap(), a_norm(&h).unwrap());
        prop_assert!((a_norm(&f.left_translate(y)).unwrap() - af).abs() < 1e-9);
        prop_assert!((a_norm(&f.right_translate(y)).unwrap() - af).abs() < 1e-9);
        prop_assert!((a_norm(&adjoint(&f)).unwrap() - af).abs() < 1e-9);
        prop_assert!(a_norm(&f.add(&h).unwrap()).unwrap() <= af + ah + 1e-9);
        prop_assert!(a_norm(&f.mul(&h).unwrap()).unwrap() <= af * ah + 1e-8);
        prop_assert!(f.linf_norm() <= af + 1e-9);
        prop_assert!(pm_norm(&f).unwrap() <= f.l1_norm() + 1e-9);
        prop_assert!(a_norm(&convolve(&f, &h).unwrap()).unwrap() <= af * pm_norm(&h).unwrap() + 1e-8);
    }

    #[test]
    fn operator_roundtrip((g, vs) in group_and_values(1)) {
        let f = func(&g, &vs[0]);
        let back = recover_from_operator(&g, ConvOp::new(&f).matrix()).unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-10);
    }

    #[test]
    fn symmetry_sets_are_nested_symmetric_and_submultiplicative((g, mask) in group_and_mask(), d in 1usize..12, e in 1usize..12) {
        let a = GSubset::from_fn(&g, |x| mask[x]);
        prop_assume!(!a.is_empty());
        let (d, e) = (d as f64 / 12.0, e as f64 / 12.0);
        let sd = symmetry_set(&a, d).unwrap();
        prop_assert!(sd.is_symmetric() && sd.contains_identity());
        prop_assert!(sd.is_subset(&product_set(&a, &a.inverse())));
        if e > d {
            prop_assert!(symmetry_set(&a, e).unwrap().is_subset(&sd));
        } else if e < d {
            let lhs = product_set(&sd, &symmetry_set(&a, 1.0 - e).unwrap());
            prop_assert!(lhs.is_subset(&symmetry_set(&a, d - e).unwrap()));
        }
    }

    #[test]
    fn coset_combinations_decompose_exactly(idx in 0usize..GROUPS.len(), seed in any::<u64>()) {
        let g = build_group(GROUPS[idx]).unwrap();
        let subs = subgroups(&g).unwrap();
        let f = random_coset_combination(&g, &subs, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let out = idempotent_decompose(&f, DEFAULT_MAX_STEPS).unwrap();
        prop_assert!(out.complete);
        prop_assert_eq!(out.decomposition.evaluate(), f.rounded());
        for s in &out.steps {
            prop_assert!(s.norm_before - s.norm_after >= NORM_DROP - DROP_TOL);
        }
        prop_assert!(out.decomposition.terms.len() <= 3 || !out.compacted);
    }

    #[test]
    fn json_roundtrip((g, vs) in group_and_values(1), (_, mask) in group_and_mask()) {
        let f = func(&g, &vs[0]);
        let back = function_from_value(&g, &function_json(&f)).unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-13);
        let a = GSubset::from_fn(&g, |x| mask.get(x).copied().unwrap_or(false));
        let text = subset_json(&a).to_string();
        prop_assert_eq!(parse_subset(&g, &text).unwrap(), a);
    }
}
