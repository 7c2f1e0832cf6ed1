//! Randomized and exhaustive properties of maps, grids and presentations.

mod common;

use std::collections::BTreeSet;

use idemgen::dclass::DClassGrid;
use idemgen::groupid::{abelian_invariants, todd_coxeter};
use idemgen::presentation::{tietze_simplify, GroupPresentation, Letter, RelatorKind};
use idemgen::ptrans::{all_maps, Monoid, PartialMap};
use proptest::prelude::*;

fn partial_map(n: usize) -> impl Strategy<Value = PartialMap> {
    prop::collection::vec(prop::option::weighted(0.8, 0..n), n)
        .prop_map(|imgs| PartialMap::from_fn(imgs.len(), |x| imgs[x]).unwrap())
}

fn presentation() -> impl Strategy<Value = GroupPresentation> {
    (1usize..=3).prop_flat_map(|g| {
        let letter = (0..g, any::<bool>()).prop_map(|(gen, inv)| if inv { Letter::neg(gen) } else { Letter::pos(gen) });
        prop::collection::vec(prop::collection::vec(letter, 1..7), 0..5).prop_map(move |rels| {
            let mut p = GroupPresentation::with_generators(g);
            for r in rels {
                p.add_relator(&r, RelatorKind::Tietze);
            }
            p
        })
    })
}

proptest! {
    #[test]
    fn composition_is_associative(
        (a, b, c) in (1usize..=7).prop_flat_map(|n| (partial_map(n), partial_map(n), partial_map(n)))
    ) {
        prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
    }

    #[test]
    fn text_form_round_trips(a in (1usize..=9).prop_flat_map(partial_map)) {
        prop_assert_eq!(a.to_string().parse::<PartialMap>().unwrap(), a);
    }

    #[test]
    fn rank_never_grows(
        (a, b) in (1usize..=7).prop_flat_map(|n| (partial_map(n), partial_map(n)))
    ) {
        let ab = a.then(&b);
        prop_assert!(ab.rank() <= a.rank().min(b.rank()));
    }

    #[test]
    fn simplification_keeps_abelianization(p in presentation()) {
        let s = tietze_simplify(&p);
        prop_assert_eq!(abelian_invariants(&s), abelian_invariants(&p));
    }

    #[test]
    fn simplification_keeps_finite_order(p in presentation()) {
        let s = tietze_simplify(&p);
        let (a, b) = (todd_coxeter(&p, 5_000).unwrap(), todd_coxeter(&s, 5_000).unwrap());
        if let (Some(x), Some(y)) = (a.order(), b.order()) {
            prop_assert_eq!(x, y);
        }
        if a.order().is_some() {
            prop_assert!(a.verify(&p));
        }
    }

    #[test]
    fn hom_counts_match_invariants(p in presentation(), m in 2u64..=6) {
        let ab = abelian_invariants(&p);
        prop_assert_eq!(common::hom_count_brute(&p, m), common::hom_count_predicted(&ab.torsion_u64(), ab.free_rank, m));
    }
}

#[test]
fn idempotence_exhaustive() {
    for n in 0..=4 {
        for m in [Monoid::Total, Monoid::Partial] {
            for a in all_maps(n, m) {
                assert_eq!(a.is_idempotent(), a.then(&a) == a, "{a}");
            }
        }
    }
}

// aS¹ = bS¹ iff equal kernels (with domain), S¹a = S¹b iff equal images.
#[test]
fn greens_relations_by_brute_force() {
    for n in 1..=3 {
        for m in [Monoid::Total, Monoid::Partial] {
            let s = all_maps(n, m);
            let right = |a: &PartialMap| -> BTreeSet<PartialMap> { s.iter().map(|x| a.then(x)).chain([*a]).collect() };
            let left = |a: &PartialMap| -> BTreeSet<PartialMap> { s.iter().map(|x| x.then(a)).chain([*a]).collect() };
            let rs: Vec<_> = s.iter().map(right).collect();
            let ls: Vec<_> = s.iter().map(left).collect();
            for x in 0..s.len() {
                for y in 0..s.len() {
                    let (a, b) = (&s[x], &s[y]);
                    assert_eq!(rs[x] == rs[y], a.kernel() == b.kernel(), "R: {a} {b}");
                    assert_eq!(ls[x] == ls[y], a.image() == b.image(), "L: {a} {b}");
                }
            }
        }
    }
}

#[test]
fn group_cells_are_exactly_those_holding_idempotents() {
    for n in 1..=4 {
        for m in [Monoid::Total, Monoid::Partial] {
            for k in 1..=n {
                let grid = DClassGrid::build(n, k, m, None).unwrap();
                let from_maps: BTreeSet<(usize, usize)> = all_maps(n, m)
                    .into_iter()
                    .filter(|a| a.rank() == k && a.is_idempotent())
                    .map(|a| grid.locate(&a).unwrap())
                    .collect();
                let from_grid: BTreeSet<(usize, usize)> = grid.cells().iter().map(|c| (c.row, c.col)).collect();
                assert_eq!(from_grid, from_maps, "{m}_{n} k={k}");
            }
        }
    }
}
