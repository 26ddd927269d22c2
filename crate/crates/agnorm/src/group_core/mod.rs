//! Finite groups as Cayley tables, subsets as bitsets, complex functions,
//! subgroup and coset machinery.

pub mod cayley;
pub mod catalog;
mod func;
mod group;
mod subgroups;
mod subset;

pub use catalog::{build_group, build_group_capped, catalog, direct_product};
pub use func::GFunc;
pub use group::{Group, ASSOC_CHECK_LIMIT};
pub use subgroups::{
    as_left_coset, as_right_coset, conjugate, coset, generated_subgroup, left_cosets, right_coset, right_cosets,
    subgroups, subgroups_capped, SUBGROUP_LIMIT,
};
pub use subset::GSubset;

#[cfg(test)]
mod tests {
    use super::*;

    /// Subgroups by scanning every subset: the independent oracle.
    fn brute_force_subgroups(g: &Group) -> Vec<Vec<usize>> {
        let n = g.order();
        assert!(n <= 16);
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let s = GSubset::from_fn(g, |x| mask >> x & 1 == 1);
            if s.is_subgroup() {
                out.push(s.members());
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    #[test]
    fn trivial_group() {
        let g = build_group("cyclic:1").unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(subgroups(&g).unwrap().len(), 1);
    }

    #[test]
    fn symmetric_three_has_six_subgroups() {
        let g = build_group("symmetric:3").unwrap();
        let subs = subgroups(&g).unwrap();
        assert_eq!(subs.len(), 6);
        let sizes: Vec<usize> = subs.iter().map(GSubset::len).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2, 3, 6]);
    }

    #[test]
    fn enumeration_matches_subset_scan() {
        for spec in ["cyclic:12", "dihedral:8", "quaternion:8", "symmetric:3", "cyclic:2*cyclic:2*cyclic:2", "dihedral:12"] {
            let g = build_group(spec).unwrap();
            let ours: Vec<Vec<usize>> = subgroups(&g).unwrap().iter().map(GSubset::members).collect();
            assert_eq!(ours, brute_force_subgroups(&g), "{spec}");
        }
    }

    #[test]
    fn cyclic_four_subgroups() {
        let g = build_group("cyclic:4").unwrap();
        let subs: Vec<Vec<usize>> = subgroups(&g).unwrap().iter().map(GSubset::members).collect();
        assert_eq!(subs, vec![vec![0], vec![0, 2], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn dihedral_is_nonabelian() {
        let g = build_group("dihedral:8").unwrap();
        assert!(!g.is_abelian());
        let (r, s) = (1, 4);
        assert_ne!(g.mul(r, s), g.mul(s, r));
    }

    #[test]
    fn catalog_axioms_hold() {
        for spec in catalog(24) {
            let g = build_group(&spec).unwrap();
            g.check_associativity().unwrap();
        }
    }

    #[test]
    fn quaternion_relations() {
        let g = build_group("quaternion:8").unwrap();
        let lab = |s: &str| g.labels().unwrap().iter().position(|l| l == s).unwrap();
        let (i, j, k, m1) = (lab("i"), lab("j"), lab("k"), lab("-1"));
        assert_eq!(g.mul(i, i), m1);
        assert_eq!(g.mul(j, j), m1);
        assert_eq!(g.mul(k, k), m1);
        assert_eq!(g.mul(i, j), k);
        assert_eq!(g.mul(j, i), lab("-k"));
    }

    #[test]
    fn generated_subgroups() {
        let g = build_group("cyclic:6").unwrap();
        let empty = GSubset::empty(&g);
        assert_eq!(generated_subgroup(&empty).members(), vec![0]);
        let s = GSubset::from_elements(&g, [2]).unwrap();
        assert_eq!(generated_subgroup(&s).members(), vec![0, 2, 4]);

        let s3 = build_group("symmetric:3").unwrap();
        // [2,1,3] is a transposition, [2,3,1] a 3-cycle.
        let lab = |s: &str| s3.labels().unwrap().iter().position(|l| l == s).unwrap();
        let gens = GSubset::from_elements(&s3, [lab("[2,1,3]"), lab("[2,3,1]")]).unwrap();
        assert_eq!(generated_subgroup(&gens).len(), 6);
    }

    #[test]
    fn conjugating_reflection_subgroup() {
        let g = build_group("dihedral:8").unwrap();
        let h = generated_subgroup(&GSubset::singleton(&g, 4));
        let c = conjugate(&h, 1);
        assert_eq!(c.len(), h.len());
        assert_ne!(c, h);
        assert!(c.is_subgroup());
    }

    #[test]
    fn coset_with_identity_is_subgroup() {
        let g = build_group("dihedral:8").unwrap();
        for h in subgroups(&g).unwrap() {
            assert_eq!(coset(&h, g.identity()).unwrap(), h);
        }
        let not_sub = GSubset::from_elements(&g, [1]).unwrap();
        assert_eq!(coset(&not_sub, 0), Err(crate::Error::NotSubgroup));
    }

    #[test]
    fn malformed_specs_are_rejected() {
        for bad in ["", "cyclic", "cyclic:0", "dihedral:7", "quaternion:6", "frobenius:20", "cyclic:2**cyclic:3", "symmetric:9"] {
            assert!(build_group(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn bad_table_reports_the_failing_triple() {
        // A Latin square with identity 0 and inverses, but not associative.
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        match Group::from_table("bad", t, None) {
            Err(crate::Error::Axiom(msg)) => assert!(msg.contains("a="), "{msg}"),
            other => panic!("expected associativity failure, got {other:?}"),
        }
    }

    #[test]
    fn cayley_roundtrip() {
        let g = build_group("quaternion:8").unwrap();
        let text = cayley::format_table(&g);
        let h = cayley::parse_table(&text, "q8").unwrap();
        assert_eq!(g.table(), h.table());
        assert_eq!(g.labels(), h.labels());
    }
}
