//! Squares of idempotents in a D-class and their singularity.
//!
//! A square `(e, f, g, h)` sits at rows `(i, j)` and columns `(λ, μ)`:
//! `e = e_{iλ}`, `f = e_{iμ}`, `g = e_{jλ}`, `h = e_{jμ}`. An idempotent `ε`
//! singularizes it in case (a) when `εe = e`, `εg = g` and `fε = e`, and in
//! case (b) when `εg = e`, `eε = e` and `fε = f`.

use rayon::prelude::*;
use serde::Serialize;

use crate::dclass::DClassGrid;
use crate::error::{precondition, structural, Result};
use crate::ptrans::{enumerate_idempotents, PartialMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SingularCase {
    /// Case (a): `ε` is a left identity on both rows and `fε = e`.
    #[serde(rename = "a")]
    LeftRightA,
    /// Case (b): `ε` is a right identity on both columns and `εg = e`.
    #[serde(rename = "b")]
    UpDownB,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Square {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
    /// `[e, f, g, h]`.
    pub cells: [PartialMap; 4],
}

impl Square {
    /// The square at rows `(i, j)` and columns `(lam, mu)`. All four cells
    /// must be groups, with distinct rows and distinct columns.
    pub fn new(grid: &DClassGrid, i: usize, j: usize, lam: usize, mu: usize) -> Result<Square> {
        if i == j || lam == mu {
            return precondition("degenerate square (repeated row or column)");
        }
        let cell = |r, c| {
            grid.idempotent(r, c)
                .copied()
                .ok_or_else(|| crate::Error::Precondition(format!("cell ({}, {}) is not a group", r + 1, c + 1)))
        };
        Ok(Square { rows: (i, j), cols: (lam, mu), cells: [cell(i, lam)?, cell(i, mu)?, cell(j, lam)?, cell(j, mu)?] })
    }

    /// Orientation-free key: sorted rows, sorted columns.
    pub fn key(&self) -> ((usize, usize), (usize, usize)) {
        let (i, j) = self.rows;
        let (l, m) = self.cols;
        ((i.min(j), i.max(j)), (l.min(m), l.max(m)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityWitness {
    #[serde(rename = "map")]
    pub epsilon: PartialMap,
    pub case: SingularCase,
}

pub fn singularizes(eps: &PartialMap, sq: &Square) -> Option<SingularCase> {
    singularizes_cells(eps, &sq.cells)
}

/// The case (a)/(b) test on raw cells `[e, f, g, h]`; degenerate
/// configurations are evaluated as given.
pub fn singularizes_cells(eps: &PartialMap, cells: &[PartialMap; 4]) -> Option<SingularCase> {
    let [e, f, g, h] = cells;
    if eps.then(e) == *e && eps.then(g) == *g && f.then(eps) == *e {
        assert!(
            eps.then(f) == *f && eps.then(h) == *h && e.then(eps) == *e && g.then(eps) == *g && h.then(eps) == *g,
            "case (a) consequences fail for {eps}"
        );
        return Some(SingularCase::LeftRightA);
    }
    if eps.then(g) == *e && e.then(eps) == *e && f.then(eps) == *f {
        assert!(
            eps.then(e) == *e && eps.then(f) == *f && eps.then(h) == *f && g.then(eps) == *g && h.then(eps) == *h,
            "case (b) consequences fail for {eps}"
        );
        return Some(SingularCase::UpDownB);
    }
    None
}

/// Candidate singularizers: every idempotent of rank `k..=n` in the grid's
/// monoid, by increasing rank and then in enumeration order.
pub fn epsilon_pool(grid: &DClassGrid) -> Vec<PartialMap> {
    (grid.k().max(1)..=grid.n())
        .flat_map(|r| enumerate_idempotents(grid.n(), r, grid.monoid()).expect("rank in range"))
        .collect()
}

/// Every nondegenerate square whose four cells are groups, with rows and
/// columns in increasing order.
pub fn all_group_squares(grid: &DClassGrid) -> Vec<Square> {
    let masks = row_masks(grid);
    let mut out = Vec::new();
    for i in 0..masks.len() {
        for j in i + 1..masks.len() {
            for (lam, mu) in col_pairs(masks[i] & masks[j]) {
                out.push(Square::new(grid, i, j, lam, mu).expect("group cells"));
            }
        }
    }
    out
}

fn row_masks(grid: &DClassGrid) -> Vec<u128> {
    (0..grid.rows().len())
        .map(|i| grid.row_cells(i).iter().fold(0u128, |m, &c| m | (1u128 << grid.cells()[c].col)))
        .collect()
}

fn col_pairs(mask: u128) -> Vec<(usize, usize)> {
    let cols: Vec<usize> = (0..128).filter(|&c| mask & (1u128 << c) != 0).collect();
    let mut out = Vec::new();
    for a in 0..cols.len() {
        for b in a + 1..cols.len() {
            out.push((cols[a], cols[b]));
        }
    }
    out
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and_iter<'a>(&'a self, other: &'a Bits) -> impl Iterator<Item = usize> + 'a {
        self.0.iter().zip(&other.0).enumerate().flat_map(|(w, (a, b))| {
            let mut word = a & b;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let t = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + t)
            })
        })
    }
}

/// All singular squares of the grid, each once, with the first witness
/// found. Only pool members that act as a left identity on both rows (case
/// a) or a right identity on both columns (case b) are tried. Output is
/// sorted by `(i, j, λ, μ)` and does not depend on the thread count.
pub fn enumerate_singular_squares(grid: &DClassGrid) -> Vec<(Square, SingularityWitness)> {
    if grid.cols().len() > 128 {
        panic!("more than 128 columns is beyond desk scale");
    }
    let pool = epsilon_pool(grid);
    let nrows = grid.rows().len();
    let ncols = grid.cols().len();

    // Left identity for one idempotent of an R-class means left identity
    // for all of them; dually for L-classes.
    let mut left_id = vec![Bits::new(pool.len()); nrows];
    let mut right_id = vec![Bits::new(pool.len()); ncols];
    for (p, eps) in pool.iter().enumerate() {
        for (i, bits) in left_id.iter_mut().enumerate() {
            let e = &grid.cells()[grid.row_cells(i)[0]].idempotent;
            if eps.then(e) == *e {
                bits.set(p);
            }
        }
        for (c, bits) in right_id.iter_mut().enumerate() {
            if let Some(&id) = grid.col_cells(c).first() {
                let e = &grid.cells()[id].idempotent;
                if e.then(eps) == *e {
                    bits.set(p);
                }
            }
        }
    }

    let masks = row_masks(grid);
    let row_pairs: Vec<(usize, usize)> = (0..nrows)
        .flat_map(|i| (i + 1..nrows).map(move |j| (i, j)))
        .filter(|&(i, j)| (masks[i] & masks[j]).count_ones() >= 2)
        .collect();

    let mut found: Vec<(Square, SingularityWitness)> = row_pairs
        .par_iter()
        .flat_map_iter(|&(i, j)| {
            let mut local = Vec::new();
            for (lam, mu) in col_pairs(masks[i] & masks[j]) {
                if let Some(hit) = find_witness(grid, &pool, &left_id, &right_id, i, j, lam, mu) {
                    local.push(hit);
                }
            }
            local
        })
        .collect();
    found.sort_by_key(|(sq, _)| (sq.rows, sq.cols));
    found
}

#[allow(clippy::too_many_arguments)]
fn find_witness(
    grid: &DClassGrid,
    pool: &[PartialMap],
    left_id: &[Bits],
    right_id: &[Bits],
    i: usize,
    j: usize,
    lam: usize,
    mu: usize,
) -> Option<(Square, SingularityWitness)> {
    let orientations = [(i, j, lam, mu), (j, i, lam, mu), (i, j, mu, lam), (j, i, mu, lam)];
    let squares: Vec<Square> =
        orientations.iter().map(|&(a, b, c, d)| Square::new(grid, a, b, c, d).expect("group cells")).collect();
    for p in left_id[i].and_iter(&left_id[j]) {
        let eps = &pool[p];
        for sq in &squares {
            let [e, f, ..] = &sq.cells;
            if f.then(eps) == *e && singularizes(eps, sq) == Some(SingularCase::LeftRightA) {
                return Some((sq.clone(), SingularityWitness { epsilon: *eps, case: SingularCase::LeftRightA }));
            }
        }
    }
    for p in right_id[lam].and_iter(&right_id[mu]) {
        let eps = &pool[p];
        for sq in &squares {
            let [e, _, g, _] = &sq.cells;
            if eps.then(g) == *e && singularizes(eps, sq) == Some(SingularCase::UpDownB) {
                return Some((sq.clone(), SingularityWitness { epsilon: *eps, case: SingularCase::UpDownB }));
            }
        }
    }
    None
}

/// Output of the explicit completion of a partial-domain R-related pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub alpha_prime: PartialMap,
    pub beta_prime: PartialMap,
    pub epsilon: PartialMap,
}

/// Extends R-related idempotents `alpha`, `beta` with a common proper
/// domain `A` to total maps by sending the complement of `A` where `min(A)`
/// goes, and builds the idempotent `ε` (`xβ ↦ xα` on `im β`, identity
/// elsewhere) that singularizes `(α, β, α', β')` in case (a).
pub fn complete_pair(alpha: &PartialMap, beta: &PartialMap) -> Result<Completion> {
    if alpha.n() != beta.n() {
        return Err(crate::Error::Dimension(alpha.n(), beta.n()));
    }
    let n = alpha.n();
    if !alpha.is_idempotent() || !beta.is_idempotent() {
        return precondition("inputs must be idempotent");
    }
    let rho = alpha.kernel();
    if rho != beta.kernel() {
        return precondition(format!("{alpha} and {beta} are not R-related"));
    }
    let domain = rho.domain();
    if domain.len() == n {
        return precondition("inputs must have a proper domain");
    }
    let Some(&a0) = domain.first() else {
        return precondition("inputs have empty domain");
    };
    let a0 = a0 as usize;
    let extend = |m: &PartialMap| {
        let fill = m.get(a0);
        PartialMap::from_fn(n, |x| m.get(x).or(fill)).expect("same n")
    };
    let alpha_prime = extend(alpha);
    let beta_prime = extend(beta);

    let mut eps_img: Vec<Option<usize>> = (0..n).map(Some).collect();
    let mut assigned = vec![false; n];
    for &x in domain {
        let x = x as usize;
        let i = beta.get(x).expect("in domain");
        let v = alpha.get(x).expect("in domain");
        if assigned[i] && eps_img[i] != Some(v) {
            return structural("ε is not well defined");
        }
        eps_img[i] = Some(v);
        assigned[i] = true;
    }
    let epsilon = PartialMap::from_fn(n, |x| eps_img[x])?;

    // Postconditions.
    if !alpha_prime.is_total() || !beta_prime.is_total() {
        return structural("completions are not total");
    }
    let mut merged: Vec<Vec<u8>> = Vec::new();
    let complement: Vec<u8> = (0..n as u8).filter(|x| !domain.contains(x)).collect();
    for b in rho.blocks() {
        let mut b = b.clone();
        if b.contains(&(a0 as u8)) {
            b.extend(&complement);
        }
        merged.push(b);
    }
    let rho_prime = crate::ptrans::KernelPartition::new(n, merged)?;
    if alpha_prime.kernel() != rho_prime || beta_prime.kernel() != rho_prime {
        return structural("completions do not share the merged kernel");
    }
    if alpha_prime.image() != alpha.image() || beta_prime.image() != beta.image() {
        return structural("completions changed L-class");
    }
    // Rectangular band: the product of (r1, c1) and (r2, c2) is (r1, c2).
    let band = [(alpha, 0, 0), (beta, 0, 1), (&alpha_prime, 1, 0), (&beta_prime, 1, 1)];
    let at = |r: usize, c: usize| band.iter().find(|b| b.1 == r && b.2 == c).map(|b| *b.0).expect("present");
    for (x, rx, _) in &band {
        for (y, _, cy) in &band {
            if x.then(y) != at(*rx, *cy) {
                return structural(format!("{x}·{y} breaks the rectangular band law"));
            }
        }
    }
    if !epsilon.is_idempotent() || epsilon.then(&epsilon) != epsilon {
        return structural("ε is not idempotent");
    }
    if singularizes_cells(&epsilon, &[*alpha, *beta, alpha_prime, beta_prime]) != Some(SingularCase::LeftRightA) {
        return structural("ε does not singularize the completed square in case (a)");
    }
    Ok(Completion { alpha_prime, beta_prime, epsilon })
}
