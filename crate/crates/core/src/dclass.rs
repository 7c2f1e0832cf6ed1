//! The rank-`k` D-class of `T_n` or `PT_n` as a grid of H-classes.
//!
//! Rows are R-classes (kernels, including the domain) and columns are
//! L-classes (images). A cell is a group H-class exactly when the column is
//! a transversal of the row; such a cell holds a unique idempotent.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{precondition, structural, Result};
use crate::perm::Permutation;
use crate::ptrans::{
    idempotent_from_cell, kernel_partitions, validate_rank, ImageSet, KernelPartition, Monoid, PartialMap,
};
use crate::schreier::SchreierSystem;

/// Dense `(row, col)` coordinates of an H-class.
pub type CellId = (usize, usize);

#[derive(Clone, Debug)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    pub idempotent: PartialMap,
}

#[derive(Clone, Debug)]
pub struct DClassGrid {
    n: usize,
    k: usize,
    monoid: Monoid,
    rows: Vec<KernelPartition>,
    cols: Vec<ImageSet>,
    cells: Vec<Cell>,
    cell_index: HashMap<CellId, usize>,
    row_cells: Vec<Vec<usize>>,
    col_cells: Vec<Vec<usize>>,
    row_index: HashMap<KernelPartition, usize>,
    col_index: HashMap<ImageSet, usize>,
    base: CellId,
    base_idempotent: PartialMap,
}

/// The idempotent used as `e` when none is given: `j ↦ j` for `j ≤ k` and
/// `j ↦ k` above. Rank 0 gives the empty map.
pub fn default_base(n: usize, k: usize) -> PartialMap {
    if k == 0 {
        return PartialMap::empty(n);
    }
    PartialMap::from_fn(n, |x| Some(x.min(k - 1))).expect("n within bounds")
}

impl DClassGrid {
    pub fn build(n: usize, k: usize, monoid: Monoid, base: Option<PartialMap>) -> Result<Self> {
        validate_rank(n, k, monoid)?;
        let base_idempotent = base.unwrap_or_else(|| default_base(n, k));
        if base_idempotent.n() != n
            || base_idempotent.rank() != k
            || !base_idempotent.is_idempotent()
            || (monoid == Monoid::Total && !base_idempotent.is_total())
        {
            return precondition(format!("base {base_idempotent} is not a rank-{k} idempotent of {monoid}_{n}"));
        }

        let rows = kernel_partitions(n, k, monoid);
        let mut cols: Vec<ImageSet> =
            (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).map(|m| ImageSet::from_mask(n, m)).collect();
        cols.sort();

        let row_index: HashMap<_, _> = rows.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let col_index: HashMap<_, _> = cols.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();

        let mut cells = Vec::new();
        let mut cell_index = HashMap::new();
        let mut row_cells = vec![Vec::new(); rows.len()];
        let mut col_cells = vec![Vec::new(); cols.len()];
        for (i, row) in rows.iter().enumerate() {
            for im in row.transversals() {
                let col = col_index[&im];
                let id = cells.len();
                cells.push(Cell { row: i, col, idempotent: idempotent_from_cell(row, &im)? });
                cell_index.insert((i, col), id);
                row_cells[i].push(id);
                col_cells[col].push(id);
            }
            row_cells[i].sort_by_key(|&c| cells[c].col);
        }

        let base = (row_index[&base_idempotent.kernel()], col_index[&base_idempotent.image()]);
        Ok(DClassGrid {
            n,
            k,
            monoid,
            rows,
            cols,
            cells,
            cell_index,
            row_cells,
            col_cells,
            row_index,
            col_index,
            base,
            base_idempotent,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn monoid(&self) -> Monoid {
        self.monoid
    }

    pub fn rows(&self) -> &[KernelPartition] {
        &self.rows
    }

    pub fn cols(&self) -> &[ImageSet] {
        &self.cols
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Cell ids in row `i`, by increasing column.
    pub fn row_cells(&self, i: usize) -> &[usize] {
        &self.row_cells[i]
    }

    /// Cell ids in column `col`, by increasing row.
    pub fn col_cells(&self, col: usize) -> &[usize] {
        &self.col_cells[col]
    }

    pub fn cell_id(&self, row: usize, col: usize) -> Option<usize> {
        self.cell_index.get(&(row, col)).copied()
    }

    /// The idempotent `e_{iλ}`, if the cell is a group.
    pub fn idempotent(&self, row: usize, col: usize) -> Option<&PartialMap> {
        self.cell_id(row, col).map(|c| &self.cells[c].idempotent)
    }

    pub fn row_of(&self, kp: &KernelPartition) -> Option<usize> {
        self.row_index.get(kp).copied()
    }

    pub fn col_of(&self, im: &ImageSet) -> Option<usize> {
        self.col_index.get(im).copied()
    }

    /// Grid coordinates of a rank-`k` element of this D-class.
    pub fn locate(&self, a: &PartialMap) -> Option<CellId> {
        Some((self.row_of(&a.kernel())?, self.col_of(&a.image())?))
    }

    pub fn base(&self) -> CellId {
        self.base
    }

    pub fn base_idempotent(&self) -> &PartialMap {
        &self.base_idempotent
    }

    /// Rank 0 or rank `n`: a single idempotent and nothing to present.
    pub fn is_degenerate(&self) -> bool {
        self.k == 0 || self.k == self.n
    }

    pub fn is_total_row(&self, i: usize) -> bool {
        self.rows[i].is_total()
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            n: self.n,
            k: self.k,
            monoid: self.monoid,
            rows: self.rows.len(),
            cols: self.cols.len(),
            group_cells: self.cells.len(),
            base: BaseCell { row: self.base.0 + 1, col: self.base.1 + 1 },
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BaseCell {
    pub row: usize,
    pub col: usize,
}

/// What the `grid` command reports.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GridSummary {
    pub n: usize,
    pub k: usize,
    pub monoid: Monoid,
    pub rows: usize,
    pub cols: usize,
    pub group_cells: usize,
    pub base: BaseCell,
}

/// How the anchor column `λ_i` of each row is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AnchorRule {
    /// Least group column of each row.
    #[default]
    Lex,
    /// Greatest group column of each row.
    LexGreatest,
    /// Total rows are anchored first, inside the `T_n` grid, with the
    /// least-column rule; the remaining partial rows then take their
    /// greatest group column.
    TwoStep,
}

/// One anchor column per row. The base row is always anchored at the base
/// column.
pub fn anchors(grid: &DClassGrid, rule: AnchorRule) -> Result<Vec<usize>> {
    let pick = |i: usize, greatest: bool| -> Result<usize> {
        let cells = grid.row_cells(i);
        let c = if greatest { cells.last() } else { cells.first() };
        match c {
            Some(&c) => Ok(grid.cells()[c].col),
            None => structural(format!("row {} has no group cell", grid.rows()[i])),
        }
    };
    let mut out = Vec::with_capacity(grid.rows().len());
    match rule {
        AnchorRule::Lex | AnchorRule::LexGreatest => {
            for i in 0..grid.rows().len() {
                out.push(pick(i, rule == AnchorRule::LexGreatest)?);
            }
        }
        AnchorRule::TwoStep => {
            let total = match grid.monoid() {
                Monoid::Total => None,
                Monoid::Partial if grid.k() >= 1 => Some(DClassGrid::build(
                    grid.n(),
                    grid.k(),
                    Monoid::Total,
                    grid.base_idempotent().is_total().then(|| *grid.base_idempotent()),
                )?),
                Monoid::Partial => None,
            };
            let total_anchors = match &total {
                Some(t) => Some(anchors(t, AnchorRule::Lex)?),
                None => None,
            };
            for (i, row) in grid.rows().iter().enumerate() {
                let col = match (&total, &total_anchors) {
                    (Some(t), Some(ta)) if row.is_total() => {
                        let ti = t.row_of(row).expect("total row present in T_n grid");
                        grid.col_of(&t.cols()[ta[ti]]).expect("columns coincide")
                    }
                    _ if row.is_total() => pick(i, false)?,
                    _ => pick(i, true)?,
                };
                out.push(col);
            }
        }
    }
    let (br, bc) = grid.base();
    out[br] = bc;
    Ok(out)
}

/// An entry `p_{λi}` of the Rees sandwich matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SandwichEntry {
    Zero,
    Perm(Permutation),
}

impl SandwichEntry {
    pub fn perm(&self) -> Option<&Permutation> {
        match self {
            SandwichEntry::Zero => None,
            SandwichEntry::Perm(p) => Some(p),
        }
    }
}

/// Column representative `q_λ = e · r_λ ∈ H_{1λ}`.
pub fn column_rep(grid: &DClassGrid, sys: &SchreierSystem, col: usize) -> PartialMap {
    grid.base_idempotent().then(&sys.value(grid, &sys.r[col]))
}

/// Row representative `t_i = e_{iλ_i} · r'_{λ_i} ∈ H_{i1}`.
pub fn row_rep(grid: &DClassGrid, sys: &SchreierSystem, anchors: &[usize], row: usize) -> Result<PartialMap> {
    let anchor = anchors[row];
    let e = grid
        .idempotent(row, anchor)
        .ok_or_else(|| crate::Error::Structural(format!("anchor of row {} is not a group cell", row + 1)))?;
    Ok(e.then(&sys.value(grid, &sys.r_inv[anchor])))
}

/// `p_{λi} = q_λ · t_i`, read as a permutation of the base image when the
/// product stays in the D-class.
pub fn sandwich(
    grid: &DClassGrid,
    sys: &SchreierSystem,
    anchors: &[usize],
    col: usize,
    row: usize,
) -> Result<SandwichEntry> {
    let q = column_rep(grid, sys, col);
    let t = row_rep(grid, sys, anchors, row)?;
    let p = q.then(&t);
    let nonzero = p.rank() == grid.k();
    if nonzero != grid.cell_id(row, col).is_some() {
        return structural(format!(
            "sandwich entry ({}, {}) disagrees with the group-cell criterion",
            col + 1,
            row + 1
        ));
    }
    if !nonzero {
        return Ok(SandwichEntry::Zero);
    }
    let base_im = &grid.cols()[grid.base().1];
    if grid.locate(&p) != Some(grid.base()) {
        return structural(format!("sandwich product {p} left H_11"));
    }
    Ok(SandwichEntry::Perm(Permutation::from_group_element(&p, base_im)?))
}
