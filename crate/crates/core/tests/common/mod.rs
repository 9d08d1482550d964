//! Shared test fixtures and an independent Coxeter-group oracle.
//!
//! The oracle realizes the generators as exact reflection matrices over
//! Z[sqrt(2)] (entries a + b*sqrt(2) as integer pairs) and explores the
//! Cayley ball by breadth-first search, so lengths and shortlex normal
//! forms come from naive relation application with no word rewriting.

// Each test binary uses a different subset of these helpers.
#![allow(dead_code)]

use std::collections::HashMap;
use std::collections::VecDeque;

use buildings::building::Building;
use buildings::constructions::{fano_incidence, flag_building_from_incidence};

/// a + b*sqrt(2).
pub type Z2 = (i64, i64);

fn mul(x: Z2, y: Z2) -> Z2 {
    (x.0 * y.0 + 2 * x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

pub type Matrix = Vec<Vec<Z2>>;

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { (1, 0) } else { (0, 0) }).collect())
        .collect()
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = (0, 0);
                    for k in 0..n {
                        let p = mul(a[i][k], b[k][j]);
                        acc = (acc.0 + p.0, acc.1 + p.1);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// -2*cos(pi/m) offsets: the reflection sigma_i sends e_k to
/// e_k + 2*cos(pi/m_ik) e_i, so matrix entries stay in Z[sqrt(2)] for
/// m in {2, 3, 4, infinity}. Infinity is encoded as 0.
fn two_cos(m: u32) -> Z2 {
    match m {
        2 => (0, 0),
        3 => (1, 0),
        4 => (0, 1),
        0 => (2, 0),
        other => panic!("oracle does not support m = {other}"),
    }
}

fn generator_matrix(matrix: &[Vec<u32>], i: usize) -> Matrix {
    let n = matrix.len();
    let mut g = identity(n);
    for k in 0..n {
        g[i][k] = if k == i { (-1, 0) } else { two_cos(matrix[i][k]) };
    }
    g
}

/// Cayley ball of radius `max_len`: for every element, the graph distance
/// from the identity (= word length) and the first word reaching it in
/// breadth-first lexicographic order (= the shortlex normal form).
pub struct CayleyOracle {
    pub length: HashMap<Matrix, usize>,
    pub normal_form: HashMap<Matrix, Vec<u8>>,
    generators: Vec<Matrix>,
    rank: usize,
}

impl CayleyOracle {
    pub fn new(matrix: &[Vec<u32>], max_len: usize) -> CayleyOracle {
        let n = matrix.len();
        let generators: Vec<Matrix> =
            (0..n).map(|i| generator_matrix(matrix, i)).collect();
        let mut length = HashMap::new();
        let mut normal_form = HashMap::new();
        let id = identity(n);
        length.insert(id.clone(), 0);
        normal_form.insert(id.clone(), Vec::new());
        let mut queue = VecDeque::from([(id, Vec::new(), 0usize)]);
        while let Some((m, word, level)) = queue.pop_front() {
            if level == max_len {
                continue;
            }
            for (i, g) in generators.iter().enumerate() {
                let next = mat_mul(&m, g);
                if !length.contains_key(&next) {
                    let mut w = word.clone();
                    w.push(i as u8);
                    length.insert(next.clone(), level + 1);
                    normal_form.insert(next.clone(), w.clone());
                    queue.push_back((next, w, level + 1));
                }
            }
        }
        CayleyOracle { length, normal_form, generators, rank: n }
    }

    pub fn word_matrix(&self, word: &[u8]) -> Matrix {
        let mut m = identity(self.rank);
        for &i in word {
            m = mat_mul(&m, &self.generators[i as usize]);
        }
        m
    }
}

/// All words over `rank` letters of length at most `max_len`.
pub fn all_words(rank: usize, max_len: usize) -> Vec<Vec<u8>> {
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..rank as u8 {
                let mut ext = w.clone();
                ext.push(i);
                next.push(ext);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words
}

pub fn fano_building() -> Building {
    flag_building_from_incidence(&fano_incidence()).unwrap().0
}

/// The order-21 Frobenius subgroup of the Fano automorphism group: the
/// Singer cycle p -> p+1 (lines L_i -> L_{i+1}) and the multiplier
/// p -> 2p (L_i -> L_{2i}), as chamber permutations.
pub fn singer_subgroup(building: &Building) -> Vec<Vec<usize>> {
    let flag = |p: usize, l: usize| format!("p{}|L{}", p % 7, l % 7);
    let perm_of = |map: &dyn Fn(usize, usize) -> (usize, usize)| -> Vec<usize> {
        building
            .chambers()
            .iter()
            .map(|c| {
                let (p_part, l_part) = c.split_once("|L").unwrap();
                let p: usize = p_part.strip_prefix('p').unwrap().parse().unwrap();
                let l: usize = l_part.parse().unwrap();
                let (np, nl) = map(p, l);
                building.chamber_index(&flag(np, nl)).unwrap()
            })
            .collect()
    };
    vec![
        perm_of(&|p, l| (p + 1, l + 1)),
        perm_of(&|p, l| (2 * p, 2 * l)),
    ]
}
