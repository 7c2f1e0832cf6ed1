//! Schreier systems of representatives for the L-classes of a D-class.
//!
//! `r[λ]` is a word of idempotents whose value, multiplied on the right,
//! carries the base L-class onto column `λ`; `r_inv[λ]` carries it back.
//! Words are built by a breadth-first search over columns in which two
//! columns are adjacent when some row has group cells in both: for such a
//! row `i`, right multiplication by `e_{iμ}` maps `L_λ` onto `L_μ` and
//! `e_{iλ}` undoes it.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::dclass::{CellId, DClassGrid};
use crate::error::{precondition, structural, Result};
use crate::ptrans::{Monoid, PartialMap};

/// A word over the idempotents of the grid, each letter a group cell.
pub type EWord = Vec<CellId>;

/// Tie-breaking order for the column search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BfsOrder {
    /// Least column first, least row for each edge.
    #[default]
    Forward,
    /// Greatest column first, greatest row for each edge.
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreierSystem {
    pub root: usize,
    pub r: Vec<EWord>,
    pub r_inv: Vec<EWord>,
    /// For each non-root column, the column it was reached from and the
    /// letter appended to get there.
    pub parent: Vec<Option<(usize, CellId)>>,
}

impl SchreierSystem {
    /// Left-to-right product of the letters of `word`; the empty word is
    /// the identity map.
    pub fn value(&self, grid: &DClassGrid, word: &[CellId]) -> PartialMap {
        word_value(grid, word)
    }
}

pub fn word_value(grid: &DClassGrid, word: &[CellId]) -> PartialMap {
    word.iter().fold(PartialMap::identity(grid.n()), |acc, &(r, c)| {
        acc.then(grid.idempotent(r, c).expect("letters are group cells"))
    })
}

pub fn build_schreier(grid: &DClassGrid) -> Result<SchreierSystem> {
    build_schreier_with(grid, BfsOrder::Forward, |_| true)
}

/// Breadth-first construction using only rows accepted by `allow_row` for
/// edges.
pub fn build_schreier_with(
    grid: &DClassGrid,
    order: BfsOrder,
    allow_row: impl Fn(usize) -> bool,
) -> Result<SchreierSystem> {
    let ncols = grid.cols().len();
    let root = grid.base().1;
    let mut r: Vec<Option<EWord>> = vec![None; ncols];
    let mut r_inv: Vec<Option<EWord>> = vec![None; ncols];
    let mut parent = vec![None; ncols];
    r[root] = Some(Vec::new());
    r_inv[root] = Some(Vec::new());

    // Rows with a group cell in each column, for edge lookup.
    let col_rows: Vec<Vec<usize>> = (0..ncols)
        .map(|c| grid.col_cells(c).iter().map(|&id| grid.cells()[id].row).filter(|&i| allow_row(i)).collect())
        .collect();

    let col_order: Vec<usize> = match order {
        BfsOrder::Forward => (0..ncols).collect(),
        BfsOrder::Reverse => (0..ncols).rev().collect(),
    };

    let mut queue = VecDeque::from([root]);
    while let Some(lam) = queue.pop_front() {
        for &mu in &col_order {
            if r[mu].is_some() {
                continue;
            }
            let shared = col_rows[lam].iter().filter(|&&i| grid.cell_id(i, mu).is_some());
            let row = match order {
                BfsOrder::Forward => shared.min(),
                BfsOrder::Reverse => shared.max(),
            };
            let Some(&i) = row else { continue };
            let mut word = r[lam].clone().expect("visited");
            word.push((i, mu));
            let mut inv = vec![(i, lam)];
            inv.extend(r_inv[lam].clone().expect("visited"));
            r[mu] = Some(word);
            r_inv[mu] = Some(inv);
            parent[mu] = Some((lam, (i, mu)));
            queue.push_back(mu);
        }
    }

    let unreachable: Vec<String> = (0..ncols).filter(|&c| r[c].is_none()).map(|c| grid.cols()[c].to_string()).collect();
    if !unreachable.is_empty() {
        return structural(format!("column graph disconnected; unreachable: {}", unreachable.join(" ")));
    }
    Ok(SchreierSystem {
        root,
        r: r.into_iter().map(Option::unwrap).collect(),
        r_inv: r_inv.into_iter().map(Option::unwrap).collect(),
        parent,
    })
}

/// Every element of the L-class of column `col`: one per row and per
/// bijection from the row's blocks onto the column.
pub fn l_class_elements(grid: &DClassGrid, col: usize) -> Vec<PartialMap> {
    let targets = grid.cols()[col].elements().to_vec();
    let mut out = Vec::new();
    for row in grid.rows() {
        let blocks = row.blocks();
        let mut assignment = Vec::with_capacity(blocks.len());
        let mut used = vec![false; targets.len()];
        bijections(&mut assignment, &mut used, blocks.len(), &mut |assign| {
            let mut img = [None; crate::ptrans::MAX_N];
            for (b, &t) in blocks.iter().zip(assign) {
                for &x in b {
                    img[x as usize] = Some(targets[t] as usize);
                }
            }
            out.push(PartialMap::from_fn(grid.n(), |x| img[x]).expect("n within bounds"));
        });
    }
    out
}

fn bijections(assign: &mut Vec<usize>, used: &mut [bool], len: usize, emit: &mut dyn FnMut(&[usize])) {
    if assign.len() == len {
        emit(assign);
        return;
    }
    for t in 0..used.len() {
        if !used[t] {
            used[t] = true;
            assign.push(t);
            bijections(assign, used, len, emit);
            assign.pop();
            used[t] = false;
        }
    }
}

/// All ways `sys` fails to be a Schreier system for `grid`, sorted. Checks
/// prefix closure and, for every element of the base L-class, that the
/// words act as mutually inverse R-class preserving bijections.
pub fn verify_schreier(grid: &DClassGrid, sys: &SchreierSystem) -> Vec<String> {
    let ncols = grid.cols().len();
    let mut violations = Vec::new();
    if sys.r.len() != ncols || sys.r_inv.len() != ncols || sys.parent.len() != ncols {
        violations.push(format!("system covers {} columns, grid has {ncols}", sys.r.len()));
        return violations;
    }
    if sys.root != grid.base().1 {
        violations.push("root is not the base column".to_string());
    }
    if !sys.r[sys.root].is_empty() {
        violations.push("root word is not empty".to_string());
    }
    for (col, words) in sys.r.iter().zip(&sys.r_inv).enumerate() {
        for &(row, c) in words.0.iter().chain(words.1.iter()) {
            if grid.cell_id(row, c).is_none() {
                violations.push(format!("column {}: letter ({}, {}) is not a group cell", col + 1, row + 1, c + 1));
            }
        }
    }
    if !violations.is_empty() {
        return violations;
    }

    let words: HashSet<&[CellId]> = sys.r.iter().map(Vec::as_slice).collect();
    for (mu, word) in sys.r.iter().enumerate() {
        for len in 0..word.len() {
            if !words.contains(&word[..len]) {
                violations.push(format!("column {}: prefix of length {len} is not a representative", mu + 1));
            }
        }
        if let Some((lam, letter)) = sys.parent[mu] {
            let mut expect = sys.r[lam].clone();
            expect.push(letter);
            if &expect != word {
                violations.push(format!("column {}: word is not parent word plus letter", mu + 1));
            }
        } else if mu != sys.root {
            violations.push(format!("column {}: missing parent", mu + 1));
        }
    }

    let base_col = grid.base().1;
    let l1 = l_class_elements(grid, base_col);
    let mut action: Vec<String> = (0..ncols)
        .into_par_iter()
        .flat_map_iter(|lam| {
            let fwd = word_value(grid, &sys.r[lam]);
            let back = word_value(grid, &sys.r_inv[lam]);
            let target = &grid.cols()[lam];
            let mut found = Vec::new();
            for x in &l1 {
                let y = x.then(&fwd);
                if &y.image() != target {
                    found.push(format!("column {}: {x} lands outside L_λ", lam + 1));
                } else if y.kernel() != x.kernel() {
                    found.push(format!("column {}: {x} changes R-class", lam + 1));
                } else if y.then(&back) != *x {
                    found.push(format!("column {}: inverse word does not return {x}", lam + 1));
                }
            }
            found
        })
        .collect();
    action.sort();
    violations.extend(action);
    violations
}

/// Builds a Schreier system for the `T_n` grid and reuses it, letter for
/// letter, in the `PT_n` grid. The result is re-verified there.
pub fn lift_total_schreier(grid_t: &DClassGrid, grid_pt: &DClassGrid) -> Result<SchreierSystem> {
    if grid_t.monoid() != Monoid::Total || grid_pt.monoid() != Monoid::Partial {
        return precondition("lift needs a T_n grid and a PT_n grid");
    }
    if grid_t.n() != grid_pt.n() || grid_t.k() != grid_pt.k() {
        return precondition("grids differ in n or k");
    }
    if grid_t.base_idempotent() != grid_pt.base_idempotent() {
        return precondition("grids use different base idempotents");
    }
    let sys_t = build_schreier(grid_t)?;
    let map_row = |row: usize| grid_pt.row_of(&grid_t.rows()[row]).expect("total rows embed");
    let map_word = |w: &EWord| w.iter().map(|&(row, col)| (map_row(row), col)).collect::<EWord>();
    let lifted = SchreierSystem {
        root: sys_t.root,
        r: sys_t.r.iter().map(map_word).collect(),
        r_inv: sys_t.r_inv.iter().map(map_word).collect(),
        parent: sys_t.parent.iter().map(|p| p.map(|(lam, (row, col))| (lam, (map_row(row), col)))).collect(),
    };
    let violations = verify_schreier(grid_pt, &lifted);
    if !violations.is_empty() {
        return structural(format!("lifted system fails in PT_n: {}", violations[0]));
    }
    Ok(lifted)
}
