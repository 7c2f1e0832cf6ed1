//! Group presentations `⟨Γ | ℜ⟩` for the maximal subgroup at the base
//! idempotent, the Graham–Houghton graph, and Tietze simplification.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::dclass::{CellId, DClassGrid};
use crate::error::{precondition, structural, Result};
use crate::ptrans::Monoid;
use crate::schreier::SchreierSystem;
use crate::squares::{complete_pair, SingularityWitness, Square};

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u32,
    pub inv: bool,
}

impl Letter {
    pub fn pos(gen: usize) -> Self {
        Letter { gen: gen as u32, inv: false }
    }

    pub fn neg(gen: usize) -> Self {
        Letter { gen: gen as u32, inv: true }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn exponent(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }
}

pub type Word = Vec<Letter>;

pub fn inverse_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inverse()).collect()
}

pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free reduction followed by cancelling inverse letters at the two ends.
pub fn cyclic_reduce(w: &[Letter]) -> Word {
    let w = free_reduce(w);
    let mut lo = 0;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    w[lo..hi].to_vec()
}

/// Least cyclic rotation of the cyclically reduced relator or its inverse.
/// Two relators with the same canonical form define the same normal closure.
pub fn canonical_form(w: &[Letter]) -> Word {
    let w = cyclic_reduce(w);
    let inv = inverse_word(&w);
    let mut best = w.clone();
    for cand in [&w, &inv] {
        for s in 0..cand.len() {
            let rot: Word = cand[s..].iter().chain(&cand[..s]).copied().collect();
            if rot < best {
                best = rot;
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RelatorKind {
    #[serde(rename = "TYPE1")]
    Type1,
    #[serde(rename = "TYPE2")]
    Type2,
    #[serde(rename = "TYPE3")]
    Type3,
    #[serde(rename = "TIETZE")]
    Tietze,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    /// The group cell `(i, λ)` this generator `X_{iλ}` stands for.
    pub cell: Option<CellId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relator {
    pub word: Word,
    pub kind: RelatorKind,
}

/// Generators and freely reduced relators, deduplicated up to cyclic
/// rotation and inversion.
#[derive(Clone, Debug, Default)]
pub struct GroupPresentation {
    pub generators: Vec<Generator>,
    pub relators: Vec<Relator>,
    seen: HashSet<Word>,
}

impl PartialEq for GroupPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.relators == other.relators
    }
}

impl GroupPresentation {
    pub fn new(generators: Vec<Generator>) -> Self {
        GroupPresentation { generators, relators: Vec::new(), seen: HashSet::new() }
    }

    /// A presentation on `count` anonymous generators `a1, a2, …`.
    pub fn with_generators(count: usize) -> Self {
        Self::new((1..=count).map(|i| Generator { name: format!("a{i}"), cell: None }).collect())
    }

    /// Adds a relator after free reduction. Returns false when it is trivial
    /// or already present.
    pub fn add_relator(&mut self, word: &[Letter], kind: RelatorKind) -> bool {
        let word = free_reduce(word);
        if word.is_empty() {
            return false;
        }
        assert!(
            word.iter().all(|l| (l.gen as usize) < self.generators.len()),
            "relator references a missing generator"
        );
        if !self.seen.insert(canonical_form(&word)) {
            return false;
        }
        self.relators.push(Relator { word, kind });
        true
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn count_kind(&self, kind: RelatorKind) -> usize {
        self.relators.iter().filter(|r| r.kind == kind).count()
    }

    pub fn generator_by_cell(&self) -> HashMap<CellId, usize> {
        self.generators.iter().enumerate().filter_map(|(g, gen)| gen.cell.map(|c| (c, g))).collect()
    }

    pub fn word_to_string(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|l| {
                let name = &self.generators[l.gen as usize].name;
                if l.inv {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            generators: self.generators.iter().map(|g| g.name.clone()).collect(),
            relators: self
                .relators
                .iter()
                .map(|r| r.word.iter().map(|l| (self.generators[l.gen as usize].name.clone(), l.exponent())).collect())
                .collect(),
            kinds: self.relators.iter().map(|r| r.kind).collect(),
        }
    }

    /// GAP input declaring a free group and the quotient by the relators.
    pub fn to_gap(&self) -> String {
        let mut out = String::new();
        let names: Vec<String> = self.generators.iter().map(|g| format!("\"{}\"", g.name)).collect();
        let _ = writeln!(out, "F := FreeGroup({});", if names.is_empty() { "0".to_string() } else { names.join(", ") });
        for (i, g) in self.generators.iter().enumerate() {
            let _ = writeln!(out, "{} := F.{};", g.name, i + 1);
        }
        let rels: Vec<String> = self.relators.iter().map(|r| self.word_to_string(&r.word)).collect();
        let _ = writeln!(out, "rels := [{}];", rels.join(",\n  "));
        let _ = writeln!(out, "G := F / rels;");
        out
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<&str> = self.generators.iter().map(|g| g.name.as_str()).collect();
        let rels: Vec<String> = self.relators.iter().map(|r| self.word_to_string(&r.word)).collect();
        write!(f, "< {} | {} >", gens.join(", "), rels.join(", "))
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PresentationJson {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<(String, i64)>>,
    pub kinds: Vec<RelatorKind>,
}

pub fn generator_name(cell: CellId) -> String {
    format!("X_{}_{}", cell.0 + 1, cell.1 + 1)
}

/// `⟨Γ | ℜ⟩`: one generator per group cell, then relators of type (1)
/// `X_{iλ_i}`, type (2) `X_{iλ} X_{iμ}⁻¹` whenever the word `r_λ · e_{iμ}`
/// equals `r_μ`, and type (3) `X_{iλ}⁻¹ X_{iμ} X_{jμ}⁻¹ X_{jλ}` for every
/// singular square.
pub fn build_presentation(
    grid: &DClassGrid,
    sys: &SchreierSystem,
    anchors: &[usize],
    singulars: &[(Square, SingularityWitness)],
) -> GroupPresentation {
    let generators = grid
        .cells()
        .iter()
        .map(|c| Generator { name: generator_name((c.row, c.col)), cell: Some((c.row, c.col)) })
        .collect();
    let mut p = GroupPresentation::new(generators);
    let gen = |r: usize, c: usize| grid.cell_id(r, c);

    for (i, &anchor) in anchors.iter().enumerate() {
        let g = gen(i, anchor).expect("anchors are group cells");
        p.add_relator(&[Letter::pos(g)], RelatorKind::Type1);
    }

    let col_of_word: HashMap<&[CellId], usize> = sys.r.iter().enumerate().map(|(c, w)| (w.as_slice(), c)).collect();
    for (mu, word) in sys.r.iter().enumerate() {
        let Some((&(i, letter_col), prefix)) = word.split_last() else { continue };
        if letter_col != mu {
            continue;
        }
        let Some(&lam) = col_of_word.get(prefix) else { continue };
        if let (Some(a), Some(b)) = (gen(i, lam), gen(i, mu)) {
            p.add_relator(&[Letter::pos(a), Letter::neg(b)], RelatorKind::Type2);
        }
    }

    for (sq, _) in singulars {
        let (i, j) = sq.rows;
        let (lam, mu) = sq.cols;
        let x = |r, c| gen(r, c).expect("square cells are groups");
        p.add_relator(
            &[Letter::neg(x(i, lam)), Letter::pos(x(i, mu)), Letter::neg(x(j, mu)), Letter::pos(x(j, lam))],
            RelatorKind::Type3,
        );
    }
    p
}

/// Bipartite graph on rows and columns with one edge per group cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GHGraph {
    pub rows: usize,
    pub cols: usize,
    pub edges: Vec<CellId>,
}

pub fn gh_graph(grid: &DClassGrid) -> GHGraph {
    GHGraph {
        rows: grid.rows().len(),
        cols: grid.cols().len(),
        edges: grid.cells().iter().map(|c| (c.row, c.col)).collect(),
    }
}

impl GHGraph {
    /// DOT rendering: rows as boxes, columns as circles.
    pub fn to_dot(&self, grid: &DClassGrid) -> String {
        let mut out = String::from("graph gh {\n");
        for (i, r) in grid.rows().iter().enumerate() {
            let _ = writeln!(out, "  r{} [shape=box, label=\"{}\"];", i + 1, r);
        }
        for (c, im) in grid.cols().iter().enumerate() {
            let _ = writeln!(out, "  c{} [shape=circle, label=\"{}\"];", c + 1, im);
        }
        for &(i, c) in &self.edges {
            let _ = writeln!(out, "  r{} -- c{};", i + 1, c + 1);
        }
        out.push_str("}\n");
        out
    }
}

/// Cycle rank `E − V + 1` of the connected component containing
/// `root_cell`.
pub fn free_rank(g: &GHGraph, root_cell: CellId) -> Result<usize> {
    if !g.edges.contains(&root_cell) {
        return precondition("root cell is not an edge of the graph");
    }
    // Vertices: rows are 0..rows, columns follow.
    let mut adj = vec![Vec::new(); g.rows + g.cols];
    for &(r, c) in &g.edges {
        adj[r].push(g.rows + c);
        adj[g.rows + c].push(r);
    }
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([root_cell.0]);
    seen[root_cell.0] = true;
    let mut vertices = 0usize;
    while let Some(v) = queue.pop_front() {
        vertices += 1;
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    let edges = g.edges.iter().filter(|&&(r, _)| seen[r]).count();
    Ok(edges + 1 - vertices)
}

/// Replaces each generator by a word in the surviving generators and
/// renumbers. `subst[g] = None` keeps `g`.
fn substitute(p: &GroupPresentation, subst: &[Option<Word>]) -> GroupPresentation {
    let mut renumber = vec![usize::MAX; p.generators.len()];
    let mut generators = Vec::new();
    for (g, gen) in p.generators.iter().enumerate() {
        if subst[g].is_none() {
            renumber[g] = generators.len();
            generators.push(gen.clone());
        }
    }
    let mut out = GroupPresentation::new(generators);
    for r in &p.relators {
        let mut w = Vec::with_capacity(r.word.len());
        for &l in &r.word {
            match &subst[l.gen as usize] {
                None => w.push(Letter { gen: renumber[l.gen as usize] as u32, inv: l.inv }),
                Some(s) => {
                    let mapped = s.iter().map(|m| Letter { gen: renumber[m.gen as usize] as u32, inv: m.inv });
                    if l.inv {
                        let v: Word = mapped.collect();
                        w.extend(inverse_word(&v));
                    } else {
                        w.extend(mapped);
                    }
                }
            }
        }
        out.add_relator(&w, r.kind);
    }
    out
}

/// Removes every generator `X_{iλ}` whose row has a proper domain using
/// `X_{iλ} = X_{jλ_i}⁻¹ X_{jλ}`, where the total row `j` comes from
/// completing `(e_{iλ_i}, e_{iλ})` to a singular square. The result is
/// presented on the total-row generators only.
pub fn eliminate_partial_rows(
    p: &GroupPresentation,
    grid: &DClassGrid,
    anchors: &[usize],
    singulars: &[(Square, SingularityWitness)],
) -> Result<GroupPresentation> {
    if grid.monoid() != Monoid::Partial {
        return precondition("partial-row elimination needs a PT_n grid");
    }
    let by_cell = p.generator_by_cell();
    let singular_keys: HashSet<_> = singulars.iter().map(|(sq, _)| sq.key()).collect();
    let mut subst: Vec<Option<Word>> = vec![None; p.generators.len()];
    for (g, gen) in p.generators.iter().enumerate() {
        let Some((i, lam)) = gen.cell else {
            return precondition(format!("generator {} is not attached to a cell", gen.name));
        };
        if grid.is_total_row(i) {
            continue;
        }
        let anchor = anchors[i];
        if lam == anchor {
            subst[g] = Some(Vec::new());
            continue;
        }
        let alpha = grid.idempotent(i, anchor).expect("anchor cell");
        let beta = grid.idempotent(i, lam).expect("generator cell");
        let c = complete_pair(alpha, beta)?;
        let (Some((j, c1)), Some((j2, c2))) = (grid.locate(&c.alpha_prime), grid.locate(&c.beta_prime)) else {
            return structural("completion left the D-class");
        };
        if j != j2 || c1 != anchor || c2 != lam || !grid.is_total_row(j) {
            return structural(format!("completion of row {} does not give a total row", i + 1));
        }
        let key = ((i.min(j), i.max(j)), (lam.min(anchor), lam.max(anchor)));
        if !singular_keys.contains(&key) {
            return structural(format!("no singular square for generator {}", gen.name));
        }
        let (Some(&a), Some(&b)) = (by_cell.get(&(j, anchor)), by_cell.get(&(j, lam))) else {
            return structural(format!("total-row generators missing for {}", gen.name));
        };
        subst[g] = Some(vec![Letter::neg(a), Letter::pos(b)]);
    }
    Ok(substitute(p, &subst))
}

/// Tietze simplification: drop trivial relators, reduce cyclically, and
/// eliminate a generator that occurs exactly once in some relator, always
/// using the shortest such relator and then the least generator, until no
/// elimination applies.
pub fn tietze_simplify(p: &GroupPresentation) -> GroupPresentation {
    let mut current = normalize(p);
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (idx, r) in current.relators.iter().enumerate() {
            if best.is_some_and(|(len, _, _)| r.word.len() > len) {
                continue;
            }
            let mut counts: HashMap<u32, usize> = HashMap::new();
            for l in &r.word {
                *counts.entry(l.gen).or_default() += 1;
            }
            let Some(gen) = counts.iter().filter(|(_, &c)| c == 1).map(|(&g, _)| g as usize).min() else {
                continue;
            };
            let cand = (r.word.len(), gen, idx);
            if best.is_none_or(|b| cand < b) {
                best = Some(cand);
            }
        }
        let Some((_, gen, idx)) = best else { break };

        // Rotate to x^ε · w = 1, so x = w⁻¹ (ε = +1) or x = w (ε = −1).
        let word = &current.relators[idx].word;
        let pos = word.iter().position(|l| l.gen as usize == gen).expect("present");
        let rest: Word = word[pos + 1..].iter().chain(&word[..pos]).copied().collect();
        let value = if word[pos].inv { rest } else { inverse_word(&rest) };

        let mut without = current.clone();
        without.relators.remove(idx);
        let mut subst = vec![None; current.generators.len()];
        subst[gen] = Some(value);
        current = normalize(&substitute(&without, &subst));
    }
    current
}

fn normalize(p: &GroupPresentation) -> GroupPresentation {
    let mut out = GroupPresentation::new(p.generators.clone());
    for r in &p.relators {
        out.add_relator(&cyclic_reduce(&r.word), r.kind);
    }
    out
}
