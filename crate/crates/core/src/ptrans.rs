//! Partial transformations of `{1, …, n}` and their kernels and images.
//!
//! Maps compose left to right: `x(ab) = (xa)b`. Points are stored 0-based;
//! every textual form (`Display`, `FromStr`, serde) is 1-based.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{precondition, Error, Result};

/// Largest ground set a [`PartialMap`] can hold.
pub const MAX_N: usize = 16;

const UNDEF: u8 = u8::MAX;

/// Which of the two monoids a computation lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Monoid {
    /// The full transformation monoid `T_n`.
    #[serde(rename = "T")]
    Total,
    /// The monoid of partial transformations `PT_n`.
    #[serde(rename = "PT")]
    Partial,
}

impl fmt::Display for Monoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monoid::Total => f.write_str("T"),
            Monoid::Partial => f.write_str("PT"),
        }
    }
}

/// A partial transformation of `{1, …, n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialMap {
    n: u8,
    entries: [u8; MAX_N],
}

impl PartialMap {
    /// Builds a map from 0-based images; `None` marks an undefined point.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> Option<usize>) -> Result<Self> {
        if n > MAX_N {
            return precondition(format!("n = {n} exceeds the supported maximum {MAX_N}"));
        }
        let mut entries = [UNDEF; MAX_N];
        for (x, slot) in entries.iter_mut().enumerate().take(n) {
            if let Some(y) = f(x) {
                if y >= n {
                    return precondition(format!("image {} of point {} outside 1..{n}", y + 1, x + 1));
                }
                *slot = y as u8;
            }
        }
        Ok(PartialMap { n: n as u8, entries })
    }

    /// Builds a map from 1-based images, e.g. `[Some(2), Some(2), None]`.
    pub fn from_images(images: &[Option<usize>]) -> Result<Self> {
        for (x, y) in images.iter().enumerate() {
            if let Some(y) = *y {
                if y == 0 || y > images.len() {
                    return precondition(format!("image {y} of point {} outside 1..{}", x + 1, images.len()));
                }
            }
        }
        Self::from_fn(images.len(), |x| images[x].map(|y| y - 1))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, Some).expect("identity within bounds")
    }

    pub fn empty(n: usize) -> Self {
        Self::from_fn(n, |_| None).expect("empty map within bounds")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Image of the 0-based point `x`.
    #[inline]
    pub fn get(&self, x: usize) -> Option<usize> {
        match self.entries[x] {
            UNDEF => None,
            y => Some(y as usize),
        }
    }

    pub fn is_total(&self) -> bool {
        self.entries[..self.n()].iter().all(|&y| y != UNDEF)
    }

    pub fn is_defined(&self, x: usize) -> bool {
        self.entries[x] != UNDEF
    }

    /// `self` followed by `other`, without the dimension check.
    #[inline]
    pub fn then(&self, other: &PartialMap) -> PartialMap {
        debug_assert_eq!(self.n, other.n);
        let mut entries = [UNDEF; MAX_N];
        for (slot, &y) in entries.iter_mut().zip(&self.entries).take(self.n()) {
            if y != UNDEF {
                *slot = other.entries[y as usize];
            }
        }
        PartialMap { n: self.n, entries }
    }

    /// Left-to-right composition: defined at `x` iff `x ∈ dom(self)` and
    /// `x·self ∈ dom(other)`.
    pub fn compose(&self, other: &PartialMap) -> Result<PartialMap> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n(), other.n()));
        }
        Ok(self.then(other))
    }

    /// Sorted 0-based domain.
    pub fn domain(&self) -> Vec<u8> {
        (0..self.n).filter(|&x| self.entries[x as usize] != UNDEF).collect()
    }

    pub fn image(&self) -> ImageSet {
        ImageSet::from_mask(self.n(), self.image_mask())
    }

    #[inline]
    pub fn image_mask(&self) -> u32 {
        self.entries[..self.n()].iter().filter(|&&y| y != UNDEF).fold(0u32, |m, &y| m | (1 << y))
    }

    pub fn rank(&self) -> usize {
        self.image_mask().count_ones() as usize
    }

    pub fn fixpoints(&self) -> ImageSet {
        let mask = (0..self.n()).filter(|&x| self.entries[x] == x as u8).fold(0u32, |m, x| m | (1 << x));
        ImageSet::from_mask(self.n(), mask)
    }

    pub fn kernel(&self) -> KernelPartition {
        let mut blocks: Vec<Vec<u8>> = Vec::new();
        let mut block_of_value = [usize::MAX; MAX_N];
        for x in 0..self.n() {
            let y = self.entries[x];
            if y == UNDEF {
                continue;
            }
            let slot = &mut block_of_value[y as usize];
            if *slot == usize::MAX {
                *slot = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[*slot].push(x as u8);
        }
        KernelPartition::from_sorted_blocks(self.n(), blocks)
    }

    /// An idempotent is exactly a map whose image equals its fixed points.
    pub fn is_idempotent(&self) -> bool {
        let fixed = (0..self.n()).filter(|&x| self.entries[x] == x as u8).fold(0u32, |m, x| m | (1 << x));
        self.image_mask() == fixed
    }

    /// 1-based images, the inverse of [`PartialMap::from_images`].
    pub fn images(&self) -> Vec<Option<usize>> {
        (0..self.n()).map(|x| self.get(x).map(|y| y + 1)).collect()
    }
}

impl PartialOrd for PartialMap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PartialMap {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.entries.cmp(&other.entries))
    }
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for x in 0..self.n() {
            if x > 0 {
                f.write_str(",")?;
            }
            match self.get(x) {
                Some(y) => write!(f, "{}", y + 1)?,
                None => f.write_str("-")?,
            }
        }
        f.write_str("]")
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PartialMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Input(format!("expected `[..]`, got {s:?}")))?;
        let images = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|tok| match tok.trim() {
                    "-" => Ok(None),
                    t => t.parse::<usize>().map(Some).map_err(|_| Error::Input(format!("bad entry {t:?} in {s:?}"))),
                })
                .collect::<Result<Vec<_>>>()?
        };
        if images.is_empty() {
            return Err(Error::Input("a map needs n >= 1".into()));
        }
        PartialMap::from_images(&images).map_err(|e| Error::Input(e.to_string()))
    }
}

impl Serialize for PartialMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PartialMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The kernel of a partial map: a partition of its domain.
///
/// Blocks are sorted internally and ordered by their minima, so equality is
/// structural. The ordering puts larger domains first and then compares
/// block lists lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KernelPartition {
    n: u8,
    domain: Vec<u8>,
    blocks: Vec<Vec<u8>>,
}

impl KernelPartition {
    /// Builds a partition from 0-based blocks in any order.
    pub fn new(n: usize, blocks: Vec<Vec<u8>>) -> Result<Self> {
        let mut seen = 0u32;
        let mut blocks = blocks;
        for b in &mut blocks {
            if b.is_empty() {
                return precondition("empty block in partition");
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x as usize >= n || seen & (1 << x) != 0 {
                    return precondition(format!("point {} repeated or out of range", x + 1));
                }
                seen |= 1 << x;
            }
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self::from_sorted_blocks(n, blocks))
    }

    fn from_sorted_blocks(n: usize, blocks: Vec<Vec<u8>>) -> Self {
        let mut domain: Vec<u8> = blocks.iter().flatten().copied().collect();
        domain.sort_unstable();
        KernelPartition { n: n as u8, domain, blocks }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn domain(&self) -> &[u8] {
        &self.domain
    }

    pub fn blocks(&self) -> &[Vec<u8>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_total(&self) -> bool {
        self.domain.len() == self.n()
    }

    /// True iff `im` meets every block exactly once and lies inside the domain.
    pub fn is_transversal(&self, im: &ImageSet) -> bool {
        if im.len() != self.blocks.len() {
            return false;
        }
        let mask = im.mask();
        self.blocks.iter().all(|b| b.iter().filter(|&&x| mask & (1 << x) != 0).count() == 1)
    }

    /// All transversals of this partition, in lexicographic order.
    pub fn transversals(&self) -> Vec<ImageSet> {
        let mut out = vec![0u32];
        for b in &self.blocks {
            out = out.iter().flat_map(|&m| b.iter().map(move |&x| m | (1 << x))).collect();
        }
        let mut sets: Vec<ImageSet> = out.into_iter().map(|m| ImageSet::from_mask(self.n(), m)).collect();
        sets.sort();
        sets
    }
}

impl PartialOrd for KernelPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KernelPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .domain
            .len()
            .cmp(&self.domain.len())
            .then_with(|| self.blocks.cmp(&other.blocks))
            .then_with(|| self.n.cmp(&other.n))
    }
}

impl fmt::Display for KernelPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            let items: Vec<String> = b.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        if self.blocks.is_empty() {
            f.write_str("{}")?;
        }
        Ok(())
    }
}

impl Serialize for KernelPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks: Vec<Vec<usize>> = self.blocks.iter().map(|b| b.iter().map(|&x| x as usize + 1).collect()).collect();
        blocks.serialize(s)
    }
}

/// A sorted subset of `{1, …, n}`; used for images and fixed-point sets.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ImageSet {
    elements: Vec<u8>,
}

impl ImageSet {
    pub fn from_mask(n: usize, mask: u32) -> Self {
        ImageSet { elements: (0..n as u8).filter(|&x| mask & (1 << x) != 0).collect() }
    }

    /// From 0-based points in any order; duplicates are dropped.
    pub fn new(points: impl IntoIterator<Item = u8>) -> Self {
        let mut elements: Vec<u8> = points.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        ImageSet { elements }
    }

    pub fn elements(&self) -> &[u8] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn mask(&self) -> u32 {
        self.elements.iter().fold(0, |m, &x| m | (1 << x))
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&(x as u8)).is_ok()
    }
}

impl fmt::Display for ImageSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.elements.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl Serialize for ImageSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let items: Vec<usize> = self.elements.iter().map(|&x| x as usize + 1).collect();
        items.serialize(s)
    }
}

/// The unique idempotent with kernel `kp` and image `im`: each block is
/// sent to its representative in `im`.
pub fn idempotent_from_cell(kp: &KernelPartition, im: &ImageSet) -> Result<PartialMap> {
    if !kp.is_transversal(im) {
        return precondition(format!("{im} is not a transversal of {kp}"));
    }
    let mask = im.mask();
    let mut target = [None; MAX_N];
    for b in kp.blocks() {
        let rep = *b.iter().find(|&&x| mask & (1 << x) != 0).expect("transversal");
        for &x in b {
            target[x as usize] = Some(rep as usize);
        }
    }
    PartialMap::from_fn(kp.n(), |x| target[x])
}

/// All partitions of subsets of `{1, …, n}` into exactly `k` blocks, sorted.
/// For [`Monoid::Total`] only partitions of the whole set are produced.
pub fn kernel_partitions(n: usize, k: usize, monoid: Monoid) -> Vec<KernelPartition> {
    let mut out = Vec::new();
    for subset in 0u32..(1u32 << n) {
        let size = subset.count_ones() as usize;
        if size < k || (monoid == Monoid::Total && size != n) {
            continue;
        }
        let points: Vec<u8> = (0..n as u8).filter(|&x| subset & (1 << x) != 0).collect();
        let mut blocks: Vec<Vec<u8>> = Vec::new();
        set_partitions(&points, 0, k, &mut blocks, &mut |blocks| {
            out.push(KernelPartition::from_sorted_blocks(n, blocks.to_vec()));
        });
    }
    out.sort();
    out
}

// Restricted-growth enumeration; blocks stay ordered by minima.
fn set_partitions(points: &[u8], at: usize, k: usize, blocks: &mut Vec<Vec<u8>>, emit: &mut dyn FnMut(&[Vec<u8>])) {
    if at == points.len() {
        if blocks.len() == k {
            emit(blocks);
        }
        return;
    }
    let remaining = points.len() - at;
    if blocks.len() + remaining < k {
        return;
    }
    let x = points[at];
    for i in 0..blocks.len() {
        blocks[i].push(x);
        set_partitions(points, at + 1, k, blocks, emit);
        blocks[i].pop();
    }
    if blocks.len() < k {
        blocks.push(vec![x]);
        set_partitions(points, at + 1, k, blocks, emit);
        blocks.pop();
    }
}

fn check_rank(n: usize, k: usize, monoid: Monoid) -> Result<()> {
    if n == 0 || n > MAX_N {
        return precondition(format!("n = {n} outside 1..={MAX_N}"));
    }
    if k > n {
        return precondition(format!("rank {k} exceeds n = {n}"));
    }
    if monoid == Monoid::Total && k == 0 {
        return precondition("T_n has no rank-0 elements");
    }
    Ok(())
}

/// Every idempotent of rank exactly `k`, ordered by (kernel, image).
pub fn enumerate_idempotents(n: usize, k: usize, monoid: Monoid) -> Result<Vec<PartialMap>> {
    check_rank(n, k, monoid)?;
    let mut out = Vec::new();
    for kp in kernel_partitions(n, k, monoid) {
        for im in kp.transversals() {
            out.push(idempotent_from_cell(&kp, &im)?);
        }
    }
    Ok(out)
}

/// Every element of `T_n` or `PT_n`. Only sensible for small `n`.
pub fn all_maps(n: usize, monoid: Monoid) -> Vec<PartialMap> {
    let base = match monoid {
        Monoid::Total => n,
        Monoid::Partial => n + 1,
    };
    let total = base.pow(n as u32);
    (0..total)
        .map(|mut code| {
            PartialMap::from_fn(n, |_| {
                let digit = code % base;
                code /= base;
                (digit < n).then_some(digit)
            })
            .expect("n within bounds")
        })
        .collect()
}

pub(crate) fn validate_rank(n: usize, k: usize, monoid: Monoid) -> Result<()> {
    check_rank(n, k, monoid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(s: &str) -> PartialMap {
        s.parse().unwrap()
    }

    #[test]
    fn compose_examples() {
        let a = pm("[2,2,-]");
        let b = pm("[1,3,3]");
        assert_eq!(a.compose(&b).unwrap(), pm("[3,3,-]"));
        let a = pm("[3,-,-]");
        let b = pm("[1,2,-]");
        assert_eq!(a.compose(&b).unwrap(), PartialMap::empty(3));
        for a in all_maps(3, Monoid::Partial) {
            assert_eq!(PartialMap::identity(3).compose(&a).unwrap(), a);
        }
    }

    #[test]
    fn compose_dimension_mismatch() {
        let err = PartialMap::identity(3).compose(&PartialMap::identity(2)).unwrap_err();
        assert_eq!(err, Error::Dimension(3, 2));
    }

    #[test]
    fn kernel_image_rank_fixpoints() {
        let e = PartialMap::empty(3);
        assert!(e.kernel().domain().is_empty());
        assert_eq!(e.rank(), 0);

        let a = pm("[1,1,3]");
        assert_eq!(a.kernel().blocks(), &[vec![0, 1], vec![2]]);
        assert_eq!(a.image(), ImageSet::new([0, 2]));
        assert_eq!(a.rank(), 2);
        assert_eq!(a.fixpoints(), ImageSet::new([0, 2]));

        let id = PartialMap::identity(5);
        assert_eq!(id.kernel().block_count(), 5);
        assert_eq!(id.rank(), 5);
    }

    #[test]
    fn idempotent_examples() {
        assert!(pm("[1,1,3]").is_idempotent());
        assert!(!pm("[2,1]").is_idempotent());
        assert!(PartialMap::empty(4).is_idempotent());
    }

    #[test]
    fn idempotent_from_cell_examples() {
        let kp = KernelPartition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(idempotent_from_cell(&kp, &ImageSet::new([0, 2])).unwrap(), pm("[1,1,3]"));
        assert!(idempotent_from_cell(&kp, &ImageSet::new([0, 1])).is_err());

        let singles = KernelPartition::new(4, (0..4).map(|x| vec![x]).collect()).unwrap();
        let all = ImageSet::new(0..4);
        assert_eq!(idempotent_from_cell(&singles, &all).unwrap(), PartialMap::identity(4));
    }

    #[test]
    fn enumerate_small_counts() {
        assert_eq!(enumerate_idempotents(3, 2, Monoid::Total).unwrap().len(), 6);
        assert_eq!(enumerate_idempotents(3, 2, Monoid::Partial).unwrap().len(), 9);
        for m in [Monoid::Total, Monoid::Partial] {
            assert_eq!(enumerate_idempotents(3, 3, m).unwrap(), vec![PartialMap::identity(3)]);
        }
        assert!(enumerate_idempotents(3, 0, Monoid::Total).is_err());
        assert!(enumerate_idempotents(3, 4, Monoid::Partial).is_err());
        assert_eq!(enumerate_idempotents(3, 0, Monoid::Partial).unwrap(), vec![PartialMap::empty(3)]);
    }

    #[test]
    fn text_form_round_trip() {
        let a = pm("[2,2,-]");
        assert_eq!(a.to_string(), "[2,2,-]");
        assert_eq!(a.images(), vec![Some(2), Some(2), None]);
        assert!("[4,1,1]".parse::<PartialMap>().is_err());
        assert!("[0]".parse::<PartialMap>().is_err());
        assert!("2,2".parse::<PartialMap>().is_err());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "\"[2,2,-]\"");
        assert_eq!(serde_json::from_str::<PartialMap>(&json).unwrap(), a);
    }

    #[test]
    fn kernel_order_puts_total_first() {
        let rows = kernel_partitions(3, 2, Monoid::Partial);
        assert_eq!(rows.len(), 6);
        assert!(rows[..3].iter().all(KernelPartition::is_total));
        assert!(rows[3..].iter().all(|r| !r.is_total()));
        assert_eq!(kernel_partitions(3, 2, Monoid::Total).len(), 3);
    }
}
