//! Acceptance gate: one test per criterion. Each test also prints a
//! `criterion N: PASS|FAIL` line (visible with `--nocapture`).

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use idemgen::dclass::{AnchorRule, DClassGrid};
use idemgen::groupid::{
    abelian_invariants, idempotent_generated, identify, identify_with, todd_coxeter, CosetStatus, IdentifyOptions,
    Verdict,
};
use idemgen::perm::perm_group_order;
use idemgen::presentation::{free_rank, gh_graph};
use idemgen::ptrans::{all_maps, Monoid, PartialMap};
use idemgen::schreier::{lift_total_schreier, verify_schreier, BfsOrder};
use idemgen::squares::{
    all_group_squares, complete_pair, enumerate_singular_squares, singularizes, SingularCase, Square,
};

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Runs `check`, prints the verdict line, and fails the test with the
/// collected problems.
fn criterion(number: u32, title: &str, check: impl FnOnce() -> Vec<String>) {
    let problems = check();
    let status = if problems.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {number}: {status}: {title}");
    for p in &problems {
        println!("    {p}");
    }
    assert!(problems.is_empty(), "criterion {number} failed:\n{}", problems.join("\n"));
}

const MAIN_RUNS: [(usize, usize); 4] = [(4, 2), (5, 2), (5, 3), (6, 4)];

fn budget(n: usize) -> Duration {
    match n {
        ..=5 => Duration::from_secs(60),
        _ => Duration::from_secs(600),
    }
}

fn symmetric_runs(monoid: Monoid) -> Vec<String> {
    let mut problems = Vec::new();
    for (n, k) in MAIN_RUNS {
        let start = Instant::now();
        let r = identify(n, k, monoid).unwrap();
        let took = start.elapsed();
        if r.verdict != Verdict::SymmetricK || r.order_value() != Some(factorial(k)) {
            problems.push(format!("{monoid}_{n} k={k}: {:?} order {:?}", r.verdict, r.order));
        }
        if took > budget(n) {
            problems.push(format!("{monoid}_{n} k={k}: took {took:?}"));
        }
    }
    problems
}

#[test]
fn criterion_01_symmetric_group_in_pt() {
    criterion(1, "PT_n rank k gives S_k with order k!", || symmetric_runs(Monoid::Partial));
}

#[test]
fn criterion_02_symmetric_group_in_t() {
    criterion(2, "T_n rank k gives S_k with order k!", || symmetric_runs(Monoid::Total));
}

#[test]
fn criterion_03_free_at_rank_n_minus_one() {
    criterion(3, "rank n-1 gives a free group of the cycle rank", || {
        let mut problems = Vec::new();
        for n in [3, 4] {
            let grid = DClassGrid::build(n, n - 1, Monoid::Partial, None).unwrap();
            if !all_group_squares(&grid).is_empty() || !enumerate_singular_squares(&grid).is_empty() {
                problems.push(format!("PT_{n}: squares found"));
            }
            let cycle_rank = free_rank(&gh_graph(&grid), grid.base()).unwrap();
            let r = identify(n, n - 1, Monoid::Partial).unwrap();
            if r.relators.type3 != 0 {
                problems.push(format!("PT_{n}: {} type-3 relators", r.relators.type3));
            }
            if r.verdict != Verdict::FreeOfRank || r.free_rank != Some(cycle_rank) {
                problems.push(format!("PT_{n}: {:?} rank {:?}, cycle rank {cycle_rank}", r.verdict, r.free_rank));
            }
            if n == 3 && (cycle_rank != 1 || r.abelian_invariants.free_rank != 1) {
                problems.push(format!(
                    "PT_3: cycle rank {cycle_rank}, abelian free rank {}",
                    r.abelian_invariants.free_rank
                ));
            }
        }
        problems
    });
}

#[test]
fn criterion_04_trivial_edge_ranks() {
    criterion(4, "ranks 0 and n give the trivial group", || {
        let mut problems = Vec::new();
        for n in 1..=5 {
            for k in [0, n] {
                let r = identify(n, k, Monoid::Partial).unwrap();
                if r.verdict != Verdict::Trivial {
                    problems.push(format!("PT_{n} k={k}: {:?}", r.verdict));
                }
            }
        }
        problems
    });
}

#[test]
fn criterion_05_partial_pairs_complete() {
    criterion(5, "every partial-domain R-related pair completes", || {
        let mut problems = Vec::new();
        let mut checked = 0usize;
        for (n, k) in [(4, 2), (5, 2), (5, 3)] {
            let grid = DClassGrid::build(n, k, Monoid::Partial, None).unwrap();
            for i in (0..grid.rows().len()).filter(|&i| !grid.is_total_row(i)) {
                let cells = grid.row_cells(i);
                for &a in cells {
                    for &b in cells {
                        let (alpha, beta) = (&grid.cells()[a].idempotent, &grid.cells()[b].idempotent);
                        checked += 1;
                        match complete_pair(alpha, beta) {
                            Ok(c) => {
                                let cells = [*alpha, *beta, c.alpha_prime, c.beta_prime];
                                let ok = idemgen::squares::singularizes_cells(&c.epsilon, &cells)
                                    == Some(SingularCase::LeftRightA);
                                let rows_ok = matches!(
                                    (grid.locate(&c.alpha_prime), grid.locate(&c.beta_prime)),
                                    (Some((j, _)), Some((j2, _))) if j == j2 && grid.is_total_row(j)
                                );
                                if !ok || !rows_ok {
                                    problems.push(format!("PT_{n}: ({alpha}, {beta}) fails"));
                                }
                            }
                            Err(e) => problems.push(format!("PT_{n}: ({alpha}, {beta}): {e}")),
                        }
                    }
                }
            }
        }
        if checked == 0 {
            problems.push("no pairs checked".into());
        }
        problems
    });
}

#[test]
fn criterion_06_total_squares_stay_singular() {
    criterion(6, "singular squares of T_n stay singular in PT_n", || {
        let mut problems = Vec::new();
        for n in 2..=5 {
            for k in 1..n {
                let gt = DClassGrid::build(n, k, Monoid::Total, None).unwrap();
                let gp = DClassGrid::build(n, k, Monoid::Partial, None).unwrap();
                for (sq, w) in enumerate_singular_squares(&gt) {
                    let [e, _, _, h] = &sq.cells;
                    let (Some((i, lam)), Some((j, mu))) = (gp.locate(e), gp.locate(h)) else {
                        problems.push(format!("T_{n} k={k}: square not in PT grid"));
                        continue;
                    };
                    let lifted = Square::new(&gp, i, j, lam, mu).unwrap();
                    if lifted.cells != sq.cells || singularizes(&w.epsilon, &lifted) != Some(w.case) {
                        problems.push(format!("T_{n} k={k}: witness {} fails in PT", w.epsilon));
                    }
                }
            }
        }
        problems
    });
}

#[test]
fn criterion_07_lifted_schreier_systems() {
    criterion(7, "Schreier systems of T_n lift to PT_n", || {
        let mut problems = Vec::new();
        for n in 1..=5 {
            for k in 1..n {
                let gt = DClassGrid::build(n, k, Monoid::Total, None).unwrap();
                let gp = DClassGrid::build(n, k, Monoid::Partial, None).unwrap();
                match lift_total_schreier(&gt, &gp) {
                    Ok(sys) => {
                        let v = verify_schreier(&gp, &sys);
                        if !v.is_empty() {
                            problems.push(format!("n={n} k={k}: {}", v.join("; ")));
                        }
                    }
                    Err(e) => problems.push(format!("n={n} k={k}: {e}")),
                }
            }
        }
        problems
    });
}

#[test]
fn criterion_08_sandwich_homomorphism() {
    criterion(8, "the sandwich map is a homomorphism onto S_k", || {
        let mut problems = Vec::new();
        for monoid in [Monoid::Partial, Monoid::Total] {
            for (n, k) in MAIN_RUNS {
                let r = identify(n, k, monoid).unwrap();
                if !r.hom_valid || r.image_order as u64 != factorial(k) {
                    problems.push(format!("{monoid}_{n} k={k}: valid {} image {}", r.hom_valid, r.image_order));
                }
            }
        }
        problems
    });
}

#[test]
fn criterion_09_choice_invariance() {
    criterion(9, "order and abelian invariants ignore anchor and search order", || {
        let mut problems = Vec::new();
        for (n, k) in MAIN_RUNS.into_iter().filter(|&(n, _)| n <= 5) {
            let mut seen = BTreeSet::new();
            for anchor_rule in [AnchorRule::Lex, AnchorRule::TwoStep] {
                for bfs_order in [BfsOrder::Forward, BfsOrder::Reverse] {
                    let opts = IdentifyOptions { anchor_rule, bfs_order, ..IdentifyOptions::default() };
                    let r = identify_with(n, k, Monoid::Partial, &opts).unwrap();
                    seen.insert((r.order_value(), r.abelian_invariants.torsion_u64(), r.abelian_invariants.free_rank));
                }
            }
            if seen.len() != 1 {
                problems.push(format!("PT_{n} k={k}: {seen:?}"));
            }
        }
        problems
    });
}

#[test]
fn criterion_10_idempotent_generation() {
    criterion(10, "idempotents generate PT_n minus the non-identity permutations", || {
        let mut problems = Vec::new();
        for n in 1..=4 {
            let expected: BTreeSet<PartialMap> = all_maps(n, Monoid::Partial)
                .into_iter()
                .filter(|a| !(a.is_total() && a.rank() == n) || *a == PartialMap::identity(n))
                .collect();
            let got = idempotent_generated(n, Monoid::Partial);
            if got != expected {
                problems.push(format!("n={n}: {} generated, {} expected", got.len(), expected.len()));
            }
        }
        problems
    });
}

#[test]
fn criterion_11_group_oracles() {
    criterion(11, "coset enumeration and abelian invariants match oracles", || {
        let mut problems = Vec::new();
        let cat = common::catalogue();
        if cat.len() < 10 {
            problems.push("fewer than 10 presentations".into());
        }
        for known in &cat {
            let p = &known.presentation;
            let table = todd_coxeter(p, 20_000).unwrap();
            match known.order {
                Some(order) => {
                    let satisfied = p.relators.iter().all(|r| common::eval(&r.word, &known.perms).is_identity());
                    let closure = perm_group_order(&known.perms);
                    if !satisfied || closure != order {
                        problems.push(format!("{}: bad oracle (closure {closure})", known.name));
                    }
                    if table.order() != Some(closure) || !table.verify(p) {
                        problems.push(format!(
                            "{}: enumeration gave {:?}, closure {closure}",
                            known.name,
                            table.order()
                        ));
                    }
                }
                None => {
                    if table.status != CosetStatus::Overflow {
                        problems.push(format!("{}: infinite group enumerated to {:?}", known.name, table.order()));
                    }
                }
            }
            let ab = abelian_invariants(p);
            if ab.torsion_u64() != known.torsion || ab.free_rank != known.free_rank {
                problems.push(format!("{}: invariants {:?} + Z^{}", known.name, ab.torsion_u64(), ab.free_rank));
            }
            for m in 2..=12 {
                let brute = common::hom_count_brute(p, m);
                if brute != common::hom_count_predicted(&ab.torsion_u64(), ab.free_rank, m) {
                    problems.push(format!("{}: Hom(-, Z/{m}) count {brute} disagrees", known.name));
                }
            }
        }
        problems
    });
}
