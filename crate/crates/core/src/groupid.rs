//! Identifying the presented group: order by coset enumeration, abelian
//! invariants by Smith normal form, and a homomorphism onto `S_k` read off
//! the Rees sandwich matrix.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dclass::{anchors, sandwich, AnchorRule, CellId, DClassGrid, SandwichEntry};
use crate::error::{precondition, structural, Error, Result};
pub use crate::perm::{perm_group_order, Permutation};
use crate::presentation::{
    build_presentation, eliminate_partial_rows, free_rank, gh_graph, tietze_simplify, GroupPresentation, RelatorKind,
};
use crate::ptrans::{all_maps, enumerate_idempotents, Monoid, PartialMap};
use crate::schreier::{build_schreier_with, BfsOrder, SchreierSystem};
use crate::squares::{all_group_squares, enumerate_singular_squares};

// ---------------------------------------------------------------------------
// Coset enumeration
// ---------------------------------------------------------------------------

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CosetStatus {
    Complete,
    Overflow,
}

/// A coset table over the trivial subgroup. Column `2g` is generator `g`,
/// column `2g + 1` its inverse. Coset 0 is the subgroup itself.
#[derive(Clone, Debug)]
pub struct CosetTable {
    pub generators: usize,
    pub rows: Vec<Vec<Option<usize>>>,
    pub status: CosetStatus,
}

impl CosetTable {
    /// Group order, when enumeration completed.
    pub fn order(&self) -> Option<usize> {
        (self.status == CosetStatus::Complete).then_some(self.rows.len())
    }

    /// Closure under every generator, inverse consistency, and a trivial
    /// trace of every relator from every coset.
    pub fn verify(&self, p: &GroupPresentation) -> bool {
        if self.status != CosetStatus::Complete {
            return false;
        }
        for (c, row) in self.rows.iter().enumerate() {
            for (x, &d) in row.iter().enumerate() {
                let Some(d) = d else { return false };
                if self.rows[d][x ^ 1] != Some(c) {
                    return false;
                }
            }
        }
        for c in 0..self.rows.len() {
            for r in &p.relators {
                let mut at = c;
                for l in &r.word {
                    let col = 2 * l.gen as usize + l.inv as usize;
                    at = self.rows[at][col].expect("closed");
                }
                if at != c {
                    return false;
                }
            }
        }
        true
    }
}

struct Enumerator {
    width: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    max_cosets: usize,
}

struct OverflowSignal;

impl Enumerator {
    fn cosets(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.width + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.width + x] = d;
    }

    fn live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> std::result::Result<(), OverflowSignal> {
        if self.cosets() >= self.max_cosets {
            return Err(OverflowSignal);
        }
        let d = self.cosets() as u32;
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(NONE, self.width));
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut at = c;
        while self.parent[at as usize] != root {
            let next = self.parent[at as usize];
            self.parent[at as usize] = root;
            at = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32, queue: &mut VecDeque<u32>) {
        let (ra, rb) = (self.rep(a), self.rep(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi as usize] = lo;
            queue.push_back(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        let mut queue = VecDeque::new();
        self.merge(a, b, &mut queue);
        while let Some(gamma) = queue.pop_front() {
            for x in 0..self.width {
                let delta = self.get(gamma, x);
                if delta == NONE {
                    continue;
                }
                self.set(delta, x ^ 1, NONE);
                let mu = self.rep(gamma);
                let nu = self.rep(delta);
                let mu_x = self.get(mu, x);
                if mu_x != NONE {
                    self.merge(nu, mu_x, &mut queue);
                    continue;
                }
                let nu_xi = self.get(nu, x ^ 1);
                if nu_xi != NONE {
                    self.merge(mu, nu_xi, &mut queue);
                    continue;
                }
                self.set(mu, x, nu);
                self.set(nu, x ^ 1, mu);
            }
        }
    }

    fn scan_and_fill(&mut self, c: u32, word: &[usize]) -> std::result::Result<(), OverflowSignal> {
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = word.len();
        loop {
            while i < j && self.get(f, word[i]) != NONE {
                f = self.get(f, word[i]);
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i && self.get(b, word[j - 1] ^ 1) != NONE {
                b = self.get(b, word[j - 1] ^ 1);
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            } else if j == i + 1 {
                self.set(f, word[i], b);
                self.set(b, word[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, word[i])?;
        }
    }

    /// Drops dead cosets, renumbering live ones in order. Returns the new
    /// index of each live coset.
    fn compact(&mut self) -> Vec<u32> {
        let n = self.cosets();
        let mut new_index = vec![NONE; n];
        let mut next = 0u32;
        for (c, slot) in new_index.iter_mut().enumerate() {
            if self.parent[c] == c as u32 {
                *slot = next;
                next += 1;
            }
        }
        let mut table = Vec::with_capacity(next as usize * self.width);
        for c in 0..n {
            if new_index[c] == NONE {
                continue;
            }
            for x in 0..self.width {
                let d = self.table[c * self.width + x];
                table.push(if d == NONE { NONE } else { new_index[d as usize] });
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        new_index
    }
}

/// HLT coset enumeration over the trivial subgroup, with coincidence
/// processing and compaction when the coset limit is hit.
pub fn todd_coxeter(p: &GroupPresentation, max_cosets: usize) -> Result<CosetTable> {
    if max_cosets == 0 {
        return precondition("max_cosets must be at least 1");
    }
    let g = p.generator_count();
    let mut relators: Vec<Vec<usize>> = Vec::new();
    for r in &p.relators {
        if let Some(l) = r.word.iter().find(|l| l.gen as usize >= g) {
            return Err(Error::Input(format!("relator references generator {} of {g}", l.gen)));
        }
        if !r.word.is_empty() {
            relators.push(r.word.iter().map(|l| 2 * l.gen as usize + l.inv as usize).collect());
        }
    }
    let width = 2 * g;
    let mut en = Enumerator { width, table: vec![NONE; width], parent: vec![0], max_cosets };

    let mut c = 0u32;
    let overflowed = 'outer: loop {
        if c as usize >= en.cosets() {
            break false;
        }
        if en.live(c) {
            for r in &relators {
                let step = en.scan_and_fill(c, r);
                if step.is_err() {
                    match retry_after_compaction(&mut en, &mut c) {
                        true => continue 'outer,
                        false => break 'outer true,
                    }
                }
                if !en.live(c) {
                    break;
                }
            }
            if en.live(c) {
                for x in 0..width {
                    if en.get(c, x) == NONE && en.define(c, x).is_err() {
                        match retry_after_compaction(&mut en, &mut c) {
                            true => continue 'outer,
                            false => break 'outer true,
                        }
                    }
                }
            }
        }
        c += 1;
    };

    en.compact();
    let rows = (0..en.cosets())
        .map(|c| {
            (0..width)
                .map(|x| match en.get(c as u32, x) {
                    NONE => None,
                    d => Some(d as usize),
                })
                .collect()
        })
        .collect();
    Ok(CosetTable {
        generators: g,
        rows,
        status: if overflowed { CosetStatus::Overflow } else { CosetStatus::Complete },
    })
}

// Compacts and rewinds the scan pointer to the coset being processed, which
// is then rescanned. False when compaction frees too little to go on.
fn retry_after_compaction(en: &mut Enumerator, c: &mut u32) -> bool {
    let before = en.cosets();
    let live_below = (0..*c as usize).filter(|&d| en.parent[d] == d as u32).count() as u32;
    en.compact();
    *c = live_below;
    en.cosets() < before && en.cosets() * 10 < en.max_cosets * 9
}

// ---------------------------------------------------------------------------
// Abelian invariants
// ---------------------------------------------------------------------------

/// `Z^free_rank ⊕ Z/t_1 ⊕ … ⊕ Z/t_m` with `t_1 | t_2 | … | t_m`, all `t_i > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub torsion: Vec<BigIntString>,
    pub free_rank: usize,
}

/// A big integer that serializes as a JSON number when it fits in `u64`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BigIntString(pub BigInt);

impl Serialize for BigIntString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match u64::try_from(&self.0) {
            Ok(v) => s.serialize_u64(v),
            Err(_) => s.collect_str(&self.0),
        }
    }
}

impl AbelianInvariants {
    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion.iter().map(|t| u64::try_from(&t.0).unwrap_or(u64::MAX)).collect()
    }
}

/// Abelianization of `p` from the Smith normal form of its exponent-sum
/// matrix. Rows are first folded into an echelon basis so that large relator
/// sets only ever hold as many rows as there are generators.
pub fn abelian_invariants(p: &GroupPresentation) -> AbelianInvariants {
    let g = p.generator_count();
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for r in &p.relators {
        let mut v = vec![BigInt::zero(); g];
        for l in &r.word {
            v[l.gen as usize] += l.exponent();
        }
        insert_row(&mut basis, v);
    }
    let diag = smith_diagonal(basis, g);
    let nonzero: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_zero()).collect();
    AbelianInvariants {
        free_rank: g - nonzero.len(),
        torsion: nonzero.into_iter().filter(|d| !d.is_one()).map(BigIntString).collect(),
    }
}

fn leading(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

// Keeps `basis` in echelon form, rows sorted by pivot column.
fn insert_row(basis: &mut Vec<Vec<BigInt>>, mut v: Vec<BigInt>) {
    loop {
        let Some(col) = leading(&v) else { return };
        let slot = basis.partition_point(|b| leading(b).expect("nonzero") < col);
        if slot == basis.len() || leading(&basis[slot]) != Some(col) {
            basis.insert(slot, v);
            return;
        }
        let b = &mut basis[slot];
        let ext = b[col].extended_gcd(&v[col]);
        let (bg, vg) = (&b[col] / &ext.gcd, &v[col] / &ext.gcd);
        for c in col..v.len() {
            let new_b = &ext.x * &b[c] + &ext.y * &v[c];
            let new_v = &bg * &v[c] - &vg * &b[c];
            b[c] = new_b;
            v[c] = new_v;
        }
    }
}

/// Diagonal of the Smith normal form, absolute values, in divisibility
/// order (zeros last).
pub fn smith_diagonal(mut m: Vec<Vec<BigInt>>, cols: usize) -> Vec<BigInt> {
    let rows = m.len();
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_abs_entry(&m, t..rows, t..cols) else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !m[i][t].is_zero() {
                    let q = -m[i][t].div_floor(&m[t][t]);
                    add_row_multiple(&mut m, i, t, &q, t);
                    clean &= m[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !m[t][j].is_zero() {
                    let q = m[t][j].div_floor(&m[t][t]);
                    for row in m.iter_mut().skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    clean &= m[t][j].is_zero();
                }
            }
            if !clean {
                // Bring the smallest remainder in row/column t to the pivot.
                let (pi, pj) = min_abs_entry(&m, t..rows, t..t + 1)
                    .into_iter()
                    .chain(min_abs_entry(&m, t..t + 1, t..cols))
                    .min_by_key(|&(i, j)| m[i][j].abs())
                    .expect("pivot row nonzero");
                m.swap(t, pi);
                for row in m.iter_mut() {
                    row.swap(t, pj);
                }
                continue;
            }
            let pivot = m[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&m[i][j] % &pivot).is_zero()));
            match bad {
                Some(i) => add_row_multiple(&mut m, t, i, &BigInt::one(), t),
                None => break,
            }
        }
        diag.push(m[t][t].abs());
    }
    diag.resize(cols, BigInt::zero());
    diag
}

// Row `dst` += `q` · row `src`, from column `from` on.
fn add_row_multiple(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt, from: usize) {
    let (d, s) = if src < dst {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    } else {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    };
    for (x, y) in d[from..].iter_mut().zip(&s[from..]) {
        *x += q * y;
    }
}

fn min_abs_entry(
    m: &[Vec<BigInt>],
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// The homomorphism onto S_k
// ---------------------------------------------------------------------------

/// Images `ψ(X_{iλ}) = p_{λ_i i} · p_{λi}⁻¹` (left-to-right product in the
/// base group), keyed by cell. Anchor generators go to the identity.
pub fn rees_hom(grid: &DClassGrid, sys: &SchreierSystem, anchors: &[usize]) -> Result<BTreeMap<CellId, Permutation>> {
    let mut out: BTreeMap<CellId, Permutation> = BTreeMap::new();
    let entry = |col: usize, row: usize| -> Result<Permutation> {
        match sandwich(grid, sys, anchors, col, row)? {
            SandwichEntry::Perm(p) => Ok(p),
            SandwichEntry::Zero => structural(format!("zero sandwich entry at group cell ({}, {})", row + 1, col + 1)),
        }
    };
    for cell in grid.cells() {
        let p_anchor = entry(anchors[cell.row], cell.row)?;
        let p = entry(cell.col, cell.row)?;
        out.insert((cell.row, cell.col), p_anchor.then(&p.inverse()));
    }
    Ok(out)
}

/// True iff every relator of `p` evaluates to the identity under `psi`.
pub fn verify_hom(p: &GroupPresentation, psi: &BTreeMap<CellId, Permutation>) -> bool {
    let images: Option<Vec<&Permutation>> = p.generators.iter().map(|g| g.cell.and_then(|c| psi.get(&c))).collect();
    let Some(images) = images else { return false };
    let Some(degree) = psi.values().next().map(Permutation::degree) else {
        return p.relators.is_empty();
    };
    p.relators.iter().all(|r| {
        r.word
            .iter()
            .fold(Permutation::identity(degree), |acc, l| {
                let img = images[l.gen as usize];
                if l.inv {
                    acc.then(&img.inverse())
                } else {
                    acc.then(img)
                }
            })
            .is_identity()
    })
}

/// The subsemigroup generated by the idempotents of `T_n` or `PT_n`.
pub fn idempotent_generated(n: usize, monoid: Monoid) -> BTreeSet<PartialMap> {
    let idempotents: Vec<PartialMap> = (0..=n)
        .filter(|&k| !(monoid == Monoid::Total && k == 0))
        .flat_map(|k| enumerate_idempotents(n, k, monoid).expect("rank in range"))
        .collect();
    let mut seen: BTreeSet<PartialMap> = idempotents.iter().copied().collect();
    let mut queue: VecDeque<PartialMap> = idempotents.iter().copied().collect();
    while let Some(a) = queue.pop_front() {
        for e in &idempotents {
            let b = a.then(e);
            if seen.insert(b) {
                queue.push_back(b);
            }
        }
    }
    seen
}

/// Everything except the non-identity permutations.
pub fn singular_part_with_identity(n: usize, monoid: Monoid) -> BTreeSet<PartialMap> {
    all_maps(n, monoid).into_iter().filter(|a| a.rank() < n || *a == PartialMap::identity(n)).collect()
}

// ---------------------------------------------------------------------------
// Identification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    SymmetricK,
    FreeOfRank,
    Trivial,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GroupOrder {
    Finite { order: u64 },
    InfiniteFree { rank: usize },
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelatorCounts {
    pub type1: usize,
    pub type2: usize,
    pub type3: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Default)]
pub struct Timings {
    pub grid_ms: u128,
    pub schreier_ms: u128,
    pub squares_ms: u128,
    pub presentation_ms: u128,
    pub simplify_ms: u128,
    pub enumerate_ms: u128,
    pub hom_ms: u128,
    pub total_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentificationReport {
    pub n: usize,
    pub k: usize,
    pub monoid: Monoid,
    pub rows: usize,
    pub cols: usize,
    pub generators: usize,
    pub relators: RelatorCounts,
    pub group_squares: usize,
    pub singular_squares: usize,
    pub simplified_generators: usize,
    pub simplified_relators: usize,
    pub order: GroupOrder,
    pub abelian_invariants: AbelianInvariants,
    pub hom_valid: bool,
    pub image_order: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_rank: Option<usize>,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl IdentificationReport {
    /// The verdict the theory predicts for this `(n, k)`.
    pub fn expected_verdict(&self) -> Verdict {
        if self.k == 0 || self.k == self.n {
            Verdict::Trivial
        } else if self.k + 1 == self.n {
            Verdict::FreeOfRank
        } else {
            Verdict::SymmetricK
        }
    }

    pub fn order_value(&self) -> Option<u64> {
        match self.order {
            GroupOrder::Finite { order } => Some(order),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdentifyOptions {
    pub anchor_rule: AnchorRule,
    pub bfs_order: BfsOrder,
    pub max_cosets: usize,
    /// Run coset enumeration on the unsimplified presentation as well.
    pub raw_enumeration: bool,
    pub timings: bool,
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        IdentifyOptions {
            anchor_rule: AnchorRule::Lex,
            bfs_order: BfsOrder::Forward,
            max_cosets: DEFAULT_MAX_COSETS,
            raw_enumeration: false,
            timings: false,
        }
    }
}

/// Every intermediate object of the pipeline, for callers that want more
/// than the report.
pub struct Pipeline {
    pub grid: DClassGrid,
    pub schreier: SchreierSystem,
    pub anchors: Vec<usize>,
    pub singulars: Vec<(crate::squares::Square, crate::squares::SingularityWitness)>,
    pub presentation: GroupPresentation,
    /// Partial-row generators removed (PT only), then Tietze-simplified.
    pub simplified: GroupPresentation,
}

pub fn run_pipeline(n: usize, k: usize, monoid: Monoid, opts: &IdentifyOptions, t: &mut Timings) -> Result<Pipeline> {
    let clock = Instant::now();
    let grid = DClassGrid::build(n, k, monoid, None)?;
    t.grid_ms = clock.elapsed().as_millis();

    let clock = Instant::now();
    let schreier = build_schreier_with(&grid, opts.bfs_order, |_| true)?;
    let anchors = anchors(&grid, opts.anchor_rule)?;
    t.schreier_ms = clock.elapsed().as_millis();

    let clock = Instant::now();
    let singulars = enumerate_singular_squares(&grid);
    t.squares_ms = clock.elapsed().as_millis();

    let clock = Instant::now();
    let presentation = build_presentation(&grid, &schreier, &anchors, &singulars);
    t.presentation_ms = clock.elapsed().as_millis();

    let clock = Instant::now();
    let reduced = match monoid {
        Monoid::Partial if !grid.is_degenerate() && k + 1 < n => {
            eliminate_partial_rows(&presentation, &grid, &anchors, &singulars)?
        }
        _ => presentation.clone(),
    };
    let simplified = tietze_simplify(&reduced);
    t.simplify_ms = clock.elapsed().as_millis();

    Ok(Pipeline { grid, schreier, anchors, singulars, presentation, simplified })
}

pub fn identify(n: usize, k: usize, monoid: Monoid) -> Result<IdentificationReport> {
    identify_with(n, k, monoid, &IdentifyOptions::default())
}

pub fn identify_with(n: usize, k: usize, monoid: Monoid, opts: &IdentifyOptions) -> Result<IdentificationReport> {
    let start = Instant::now();
    let mut t = Timings::default();
    let pl = run_pipeline(n, k, monoid, opts, &mut t)?;
    let mut diagnostics = Vec::new();

    let clock = Instant::now();
    let psi = rees_hom(&pl.grid, &pl.schreier, &pl.anchors)?;
    let hom_valid = verify_hom(&pl.presentation, &psi) && verify_hom(&pl.simplified, &psi);
    let image_order = perm_group_order(&psi.values().cloned().collect::<Vec<_>>());
    t.hom_ms = clock.elapsed().as_millis();
    if !hom_valid {
        diagnostics.push("a relator is not sent to the identity by the sandwich homomorphism".into());
    }

    let abelian = abelian_invariants(&pl.simplified);
    let group_squares = all_group_squares(&pl.grid).len();
    let k_factorial: u64 = (1..=k as u64).product();

    let (order, verdict, free) = if pl.grid.is_degenerate() {
        let table = todd_coxeter(&pl.simplified, opts.max_cosets)?;
        match table.order() {
            Some(1) => (GroupOrder::Finite { order: 1 }, Verdict::Trivial, None),
            other => {
                diagnostics.push(format!("single-idempotent class gave order {other:?}"));
                (order_of(other), Verdict::Undecided, None)
            }
        }
    } else if k + 1 == n {
        if group_squares != 0 || !pl.singulars.is_empty() {
            return structural(format!("{group_squares} squares found at rank n-1"));
        }
        let rank = free_rank(&gh_graph(&pl.grid), pl.grid.base())?;
        let abelian_12 = abelian_invariants(&pl.presentation);
        if abelian_12.free_rank != rank || !abelian_12.torsion.is_empty() {
            diagnostics.push(format!(
                "cycle rank {rank} disagrees with abelianization (free rank {}, torsion {:?})",
                abelian_12.free_rank,
                abelian_12.torsion_u64()
            ));
            (GroupOrder::Unknown, Verdict::Undecided, Some(rank))
        } else if rank == 0 {
            (GroupOrder::Finite { order: 1 }, Verdict::FreeOfRank, Some(0))
        } else {
            (GroupOrder::InfiniteFree { rank }, Verdict::FreeOfRank, Some(rank))
        }
    } else {
        let clock = Instant::now();
        let table = todd_coxeter(&pl.simplified, opts.max_cosets)?;
        if table.status == CosetStatus::Complete && !table.verify(&pl.simplified) {
            return structural("complete coset table fails relator traces");
        }
        let order = table.order();
        if opts.raw_enumeration {
            let raw = todd_coxeter(&pl.presentation, opts.max_cosets)?;
            if raw.order().is_some() && raw.order() != order {
                diagnostics.push(format!("raw enumeration gave {:?}, simplified {:?}", raw.order(), order));
            }
        }
        t.enumerate_ms = clock.elapsed().as_millis();
        let ok = order == Some(k_factorial as usize) && hom_valid && image_order as u64 == k_factorial;
        if !ok {
            diagnostics.push(format!(
                "order {order:?}, hom_valid {hom_valid}, image order {image_order}; expected {k_factorial}"
            ));
        }
        (order_of(order), if ok { Verdict::SymmetricK } else { Verdict::Undecided }, None)
    };
    t.total_ms = start.elapsed().as_millis();

    Ok(IdentificationReport {
        n,
        k,
        monoid,
        rows: pl.grid.rows().len(),
        cols: pl.grid.cols().len(),
        generators: pl.presentation.generator_count(),
        relators: RelatorCounts {
            type1: pl.presentation.count_kind(RelatorKind::Type1),
            type2: pl.presentation.count_kind(RelatorKind::Type2),
            type3: pl.presentation.count_kind(RelatorKind::Type3),
        },
        group_squares,
        singular_squares: pl.singulars.len(),
        simplified_generators: pl.simplified.generator_count(),
        simplified_relators: pl.simplified.relators.len(),
        order,
        abelian_invariants: abelian,
        hom_valid,
        image_order,
        verdict,
        free_rank: free,
        diagnostics,
        timings: opts.timings.then_some(t),
    })
}

fn order_of(order: Option<usize>) -> GroupOrder {
    match order {
        Some(o) => GroupOrder::Finite { order: o as u64 },
        None => GroupOrder::Unknown,
    }
}
