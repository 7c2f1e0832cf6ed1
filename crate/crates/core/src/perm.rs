//! Permutations of a small ordered set, identified with `S_k`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{precondition, Result};
use crate::ptrans::{ImageSet, PartialMap};

/// A bijection of `{0, …, k-1}`. Positions index the elements of a fixed
/// sorted base set, so a permutation of that set and of `0..k` coincide.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation { images: (0..k as u8).collect() }
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &y in &images {
            if y as usize >= images.len() || std::mem::replace(&mut seen[y as usize], true) {
                return precondition(format!("{images:?} is not a bijection"));
            }
        }
        Ok(Permutation { images })
    }

    /// Restricts `h` to the base set `base`; `h` must permute `base`.
    pub fn from_group_element(h: &PartialMap, base: &ImageSet) -> Result<Self> {
        let pos = |y: usize| base.elements().iter().position(|&b| b as usize == y);
        let images = base
            .elements()
            .iter()
            .map(|&b| h.get(b as usize).and_then(pos).map(|p| p as u8))
            .collect::<Option<Vec<u8>>>();
        match images {
            Some(images) => Self::from_images(images),
            None => precondition(format!("{h} does not permute {base}")),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    /// `self` first, then `other`; the same left-to-right order as maps.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u8; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u8;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y as usize)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.images.iter().map(|y| (y + 1).to_string()).collect();
        write!(f, "[{}]", items.join(","))
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Order of the group generated by `gens`, by breadth-first closure.
/// An empty generating set over degree `k` generates the trivial group.
pub fn perm_group_order(gens: &[Permutation]) -> usize {
    let Some(first) = gens.first() else {
        return 1;
    };
    let id = Permutation::identity(first.degree());
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = p.then(g);
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    seen.len()
}
