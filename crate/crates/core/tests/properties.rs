//! Cross-module properties on random inputs.

use homotower_core::abelian::{betti_number, h1_fp_rank};
use homotower_core::baerq::{
    baer_eval, class2_expp_quotient, class2_ideal_dimension_direct, wedge_dim, BaerElement,
};
use homotower_core::cosets::{kernel_table_by_enumeration, table_from_phom, CosetError};
use homotower_core::exactlinalg::{fp_rank, modp_reduce, smith_normal_form, IntMatrix};
use homotower_core::rewrite::{rewrite_subgroup_presentation, tietze_simplify};
use homotower_core::tower::{descend, Caps};
use homotower_core::word::free_reduce;
use homotower_core::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn presentation() -> impl Strategy<Value = Presentation> {
    (1usize..=4).prop_flat_map(|n| {
        let letter = (1..=n as i32).prop_flat_map(|g| prop_oneof![Just(g), Just(-g)]);
        prop::collection::vec(prop::collection::vec(letter, 1..=12), 0..=6).prop_map(move |rels| {
            let words = rels.iter().map(|r| free_reduce(r).unwrap()).collect();
            Presentation::with_default_names(n, words).unwrap()
        })
    })
}

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-20i64..=20, c), r)
            .prop_map(move |rows| IntMatrix::from_rows(&rows, c))
    })
}

fn baer_element(p: u32, n: usize) -> impl Strategy<Value = BaerElement> {
    (prop::collection::vec(0..p, n), prop::collection::vec(0..p, wedge_dim(n)))
        .prop_map(move |(v, w)| BaerElement::from_parts(p, v, w))
}

/// Rank of `m` modulo `p` read off the Smith form.
fn snf_rank_mod(m: &IntMatrix, p: u32) -> usize {
    let p = BigInt::from(p);
    smith_normal_form(m).divisors().iter().filter(|d| !(*d % &p).is_zero()).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(m in matrix()) {
        let r = smith_normal_form(&m);
        let usv = r.u.mul(&m).unwrap().mul(&r.v).unwrap();
        prop_assert_eq!(&usv, &r.s);
        prop_assert_eq!(r.u.determinant().unwrap().abs(), BigInt::from(1));
        prop_assert_eq!(r.v.determinant().unwrap().abs(), BigInt::from(1));
        for i in 0..r.s.rows() {
            for j in 0..r.s.cols() {
                if i != j {
                    prop_assert!(r.s.get(i, j).is_zero());
                }
            }
        }
        let d = r.divisors();
        for pair in d.windows(2) {
            prop_assert!(pair[0].is_positive());
            prop_assert!(pair[1].is_multiple_of(&pair[0]));
        }
    }

    #[test]
    fn fp_rank_matches_smith_form(m in matrix(), p in prop::sample::select(vec![2u32, 3, 5, 7])) {
        prop_assert_eq!(fp_rank(&modp_reduce(&m, p).unwrap()), snf_rank_mod(&m, p));
    }

    #[test]
    fn betti_shortcut_agrees_with_smith_form(g in presentation()) {
        let inv = abelian_invariants(&g);
        prop_assert_eq!(betti_number(&g).0, inv.betti);
    }

    #[test]
    fn relator_moves_keep_invariants(g in presentation(), k in 0usize..12) {
        let moved: Vec<_> = g
            .relators()
            .iter()
            .rev()
            .map(|r| if k % 2 == 0 { r.inverse() } else { r.rotate(k % r.len().max(1)) })
            .collect();
        let h = Presentation::with_default_names(g.ngens(), moved).unwrap();
        prop_assert_eq!(abelian_invariants(&g), abelian_invariants(&h));
    }

    #[test]
    fn printed_form_parses_back(g in presentation()) {
        prop_assert_eq!(parse_presentation(&print_presentation(&g)).unwrap(), g);
    }

    #[test]
    fn baer_axioms(
        (x, y, z) in (1usize..=5, prop::sample::select(vec![3u32, 5]))
            .prop_flat_map(|(n, p)| (baer_element(p, n), baer_element(p, n), baer_element(p, n)))
    ) {
        let p = x.prime();
        let e = BaerElement::identity(p, x.rank());
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&e), x.clone());
        prop_assert!(x.mul(&x.inverse()).is_identity());
        prop_assert!(x.pow(p as u64).is_identity());
        // Commutators are central.
        let c = x.inverse().mul(&y.inverse()).mul(&x).mul(&y);
        prop_assert!(c.linear().iter().all(|&a| a == 0));
        prop_assert_eq!(c.mul(&z), z.mul(&c));
    }

    #[test]
    fn baer_eval_abelianizes(g in presentation()) {
        let n = g.ngens();
        let basis: Vec<_> = (0..n).map(|i| BaerElement::basis(3, n, i)).collect();
        for r in g.relators() {
            let v = baer_eval(r, &basis).unwrap();
            let ev: Vec<u32> = r.exponent_vector(n).iter().map(|e| e.rem_euclid(3) as u32).collect();
            prop_assert_eq!(v.linear(), &ev[..]);
        }
    }

    #[test]
    fn class2_routes_agree(g in presentation(), p in prop::sample::select(vec![3u32, 5])) {
        let fast = class2_expp_quotient(&g, p).unwrap();
        let direct = class2_ideal_dimension_direct(&g, p).unwrap();
        prop_assert_eq!(fast.dim_total, direct.dim_total);
        prop_assert_eq!(fast.dim_linear, direct.dim_linear);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn phom_table_matches_enumeration(g in presentation()) {
        let h = elementary_abelian_quotient(&g, 3).unwrap();
        let t = table_from_phom(&g, &h, 10_000).unwrap();
        t.validate(&g, &[]).unwrap();
        match kernel_table_by_enumeration(&g, 3, 100_000) {
            Ok(oracle) => prop_assert_eq!(t.standardize(), oracle),
            Err(CosetError::EnumerationOverflow { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn rewriting_counts_and_tietze_invariance(g in presentation()) {
        let h = elementary_abelian_quotient(&g, 3).unwrap();
        let t = table_from_phom(&g, &h, 10_000).unwrap();
        let sub = rewrite_subgroup_presentation(&g, &t);
        let raw = &sub.presentation;
        let index = t.len();
        prop_assert_eq!(raw.ngens(), index * (g.ngens() - 1) + 1);
        prop_assert_eq!(raw.relators().len(), index * g.relators().len());
        let simple = tietze_simplify(raw, 100);
        prop_assert_eq!(abelian_invariants(raw), abelian_invariants(&simple));
        for q in [3, 5] {
            prop_assert_eq!(h1_fp_rank(raw, q).unwrap(), h1_fp_rank(&simple, q).unwrap());
        }
    }
}

#[test]
fn free_class2_dimensions() {
    for p in [3, 5] {
        for n in 0..=6 {
            let f = Presentation::free(n);
            let expected = n + n * n.saturating_sub(1) / 2;
            assert_eq!(class2_expp_quotient(&f, p).unwrap().dim_total, expected);
            assert_eq!(class2_ideal_dimension_direct(&f, p).unwrap().dim_total, expected);
        }
    }
}

#[test]
fn indices_multiply_down_the_tower() {
    let r = descend(&fixtures::gamma1(), 3, 2, &Caps::default()).unwrap();
    let mut parent = &r.root;
    let mut product = 1u64;
    for c in &r.levels {
        assert_eq!(c.index_in_parent, 3u64.pow(parent.h1_fp_rank as u32));
        product *= c.index_in_parent;
        assert_eq!(c.index_in_root, product);
        parent = c;
    }
    assert_eq!(r.levels.iter().map(|c| c.index_in_parent).collect::<Vec<_>>(), [9, 27]);
}

#[test]
fn towers_are_deterministic() {
    let a = descend(&fixtures::gamma1(), 3, 2, &Caps::default()).unwrap();
    let b = descend(&fixtures::gamma1(), 3, 2, &Caps::default()).unwrap();
    assert_eq!(a, b);
}
