//! Fixed presentations with known groups, shared by the test targets.

#![allow(dead_code)]

use idemgen::perm::Permutation;
use idemgen::presentation::{GroupPresentation, Letter, RelatorKind};

/// A presentation, a faithful permutation representation of it (empty for
/// infinite groups), and its expected order and abelian invariants.
pub struct Known {
    pub name: &'static str,
    pub presentation: GroupPresentation,
    pub perms: Vec<Permutation>,
    pub order: Option<usize>,
    pub torsion: Vec<u64>,
    pub free_rank: usize,
}

/// Relators as signed 1-based generator indices.
pub fn pres(gens: usize, rels: &[&[i32]]) -> GroupPresentation {
    let mut p = GroupPresentation::with_generators(gens);
    for r in rels {
        let w: Vec<Letter> = r
            .iter()
            .map(|&x| if x > 0 { Letter::pos(x as usize - 1) } else { Letter::neg((-x) as usize - 1) })
            .collect();
        p.add_relator(&w, RelatorKind::Tietze);
    }
    p
}

fn perm(images: &[u8]) -> Permutation {
    Permutation::from_images(images.to_vec()).unwrap()
}

fn cycle(n: u8, pts: &[u8]) -> Permutation {
    let mut img: Vec<u8> = (0..n).collect();
    for w in 0..pts.len() {
        img[pts[w] as usize] = pts[(w + 1) % pts.len()];
    }
    perm(&img)
}

// Right-regular representation of the quaternion group. Units are encoded
// as 2·u + s with u ∈ {1, i, j, k} = {0, 1, 2, 3} and s the sign bit.
fn q8_right_mult(by: u8) -> Permutation {
    const TABLE: [[(u8, bool); 4]; 4] = [
        [(0, false), (1, false), (2, false), (3, false)],
        [(1, false), (0, true), (3, false), (2, true)],
        [(2, false), (3, true), (0, true), (1, false)],
        [(3, false), (2, false), (1, true), (0, true)],
    ];
    let img: Vec<u8> = (0..8u8)
        .map(|x| {
            let (u, s) = (x / 2, x % 2 == 1);
            let (v, t) = (by / 2, by % 2 == 1);
            let (w, neg) = TABLE[u as usize][v as usize];
            2 * w + (s ^ t ^ neg) as u8
        })
        .collect();
    perm(&img)
}

pub fn catalogue() -> Vec<Known> {
    vec![
        Known {
            name: "C5",
            presentation: pres(1, &[&[1, 1, 1, 1, 1]]),
            perms: vec![cycle(5, &[0, 1, 2, 3, 4])],
            order: Some(5),
            torsion: vec![5],
            free_rank: 0,
        },
        Known {
            name: "C6",
            presentation: pres(1, &[&[1, 1, 1, 1, 1, 1]]),
            perms: vec![cycle(6, &[0, 1, 2, 3, 4, 5])],
            order: Some(6),
            torsion: vec![6],
            free_rank: 0,
        },
        Known {
            name: "S3",
            presentation: pres(2, &[&[1, 1], &[2, 2], &[1, 2, 1, 2, 1, 2]]),
            perms: vec![cycle(3, &[0, 1]), cycle(3, &[1, 2])],
            order: Some(6),
            torsion: vec![2],
            free_rank: 0,
        },
        Known {
            name: "D4",
            presentation: pres(2, &[&[1, 1, 1, 1], &[2, 2], &[1, 2, 1, 2]]),
            perms: vec![cycle(4, &[0, 1, 2, 3]), cycle(4, &[1, 3])],
            order: Some(8),
            torsion: vec![2, 2],
            free_rank: 0,
        },
        Known {
            name: "D5",
            presentation: pres(2, &[&[1, 1, 1, 1, 1], &[2, 2], &[1, 2, 1, 2]]),
            perms: vec![cycle(5, &[0, 1, 2, 3, 4]), perm(&[0, 4, 3, 2, 1])],
            order: Some(10),
            torsion: vec![2],
            free_rank: 0,
        },
        Known {
            name: "Z2xZ2",
            presentation: pres(2, &[&[1, 1], &[2, 2], &[1, 2, 1, 2]]),
            perms: vec![perm(&[1, 0, 3, 2]), perm(&[2, 3, 0, 1])],
            order: Some(4),
            torsion: vec![2, 2],
            free_rank: 0,
        },
        Known {
            name: "Q8",
            presentation: pres(2, &[&[1, 1, 1, 1], &[1, 1, -2, -2], &[-2, 1, 2, 1]]),
            perms: vec![q8_right_mult(2), q8_right_mult(4)],
            order: Some(8),
            torsion: vec![2, 2],
            free_rank: 0,
        },
        Known {
            name: "S4",
            presentation: pres(
                3,
                &[&[1, 1], &[2, 2], &[3, 3], &[1, 2, 1, 2, 1, 2], &[2, 3, 2, 3, 2, 3], &[1, 3, 1, 3]],
            ),
            perms: vec![cycle(4, &[0, 1]), cycle(4, &[1, 2]), cycle(4, &[2, 3])],
            order: Some(24),
            torsion: vec![2],
            free_rank: 0,
        },
        Known {
            name: "A4",
            presentation: pres(2, &[&[1, 1], &[2, 2, 2], &[1, 2, 1, 2, 1, 2]]),
            perms: vec![perm(&[1, 0, 3, 2]), cycle(4, &[0, 1, 2])],
            order: Some(12),
            torsion: vec![3],
            free_rank: 0,
        },
        Known {
            name: "Z3xZ4",
            presentation: pres(2, &[&[1, 1, 1], &[2, 2, 2, 2], &[1, 2, -1, -2]]),
            perms: vec![cycle(7, &[0, 1, 2]), cycle(7, &[3, 4, 5, 6])],
            order: Some(12),
            torsion: vec![12],
            free_rank: 0,
        },
        Known {
            name: "trivial",
            presentation: pres(2, &[&[1, 2], &[1, 1, 2]]),
            perms: vec![Permutation::identity(1), Permutation::identity(1)],
            order: Some(1),
            torsion: vec![],
            free_rank: 0,
        },
        Known { name: "F1", presentation: pres(1, &[]), perms: vec![], order: None, torsion: vec![], free_rank: 1 },
        Known { name: "F2", presentation: pres(2, &[]), perms: vec![], order: None, torsion: vec![], free_rank: 2 },
        Known { name: "F3", presentation: pres(3, &[]), perms: vec![], order: None, torsion: vec![], free_rank: 3 },
        Known {
            name: "Z x Z2",
            presentation: pres(2, &[&[2, 2], &[1, 2, -1, -2]]),
            perms: vec![],
            order: None,
            torsion: vec![2],
            free_rank: 1,
        },
    ]
}

/// Evaluates `word` under `images`, left to right.
pub fn eval(word: &[Letter], images: &[Permutation]) -> Permutation {
    let degree = images.first().map_or(0, Permutation::degree);
    word.iter().fold(Permutation::identity(degree), |acc, l| {
        let img = &images[l.gen as usize];
        if l.inv {
            acc.then(&img.inverse())
        } else {
            acc.then(img)
        }
    })
}

/// Number of homomorphisms to `Z/m`, counted over all assignments.
pub fn hom_count_brute(p: &GroupPresentation, m: u64) -> u64 {
    let g = p.generator_count();
    let sums: Vec<Vec<i64>> = p
        .relators
        .iter()
        .map(|r| {
            let mut v = vec![0i64; g];
            for l in &r.word {
                v[l.gen as usize] += l.exponent();
            }
            v
        })
        .collect();
    let total = m.pow(g as u32);
    (0..total)
        .filter(|&code| {
            let mut x = vec![0i64; g];
            let mut c = code;
            for xi in x.iter_mut() {
                *xi = (c % m) as i64;
                c /= m;
            }
            sums.iter().all(|v| v.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>().rem_euclid(m as i64) == 0)
        })
        .count() as u64
}

/// The same count predicted from abelian invariants.
pub fn hom_count_predicted(torsion: &[u64], free_rank: usize, m: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    m.pow(free_rank as u32) * torsion.iter().map(|&t| gcd(t, m)).product::<u64>()
}
