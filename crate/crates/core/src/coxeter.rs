//! Coxeter matrices, word reduction, normal forms and the finiteness
//! classification of parabolic subgroups.
//!
//! Elements of the Coxeter group are represented by words over generator
//! indices. The canonical representative of an element is its ShortLex
//! normal form: the lexicographically least word among its reduced
//! expressions. Reduction uses braid-move saturation (apply every relation
//! `(ij)^m = 1` with `m` finite and delete adjacent equal letters until
//! nothing applies), which is correct for every Coxeter system including
//! infinite entries.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Entry value used for `m = infinity` in serialized matrices.
pub const INFINITY: u32 = 0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("matrix is not square at row {0}")]
    NotSquare(usize),
    #[error("matrix is not symmetric at ({0}, {1})")]
    AsymmetricMatrix(usize, usize),
    #[error("diagonal entry at ({0}, {0}) must be 1")]
    BadDiagonal(usize),
    #[error("off-diagonal entry at ({0}, {1}) must be at least 2 (or 0 for infinity)")]
    OffDiagonalTooSmall(usize, usize),
    #[error("generator index {0} is out of range for rank {1}")]
    BadGeneratorIndex(u8, usize),
    #[error("subset contains invalid generator index {0}")]
    BadSubset(u8),
    #[error("the Coxeter group is infinite")]
    InfiniteGroup,
}

/// A word over generator indices `0..rank`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// ShortLex comparison key: length first, then lexicographic.
    pub fn shortlex_key(&self) -> (usize, Vec<u8>) {
        (self.0.len(), self.0.clone())
    }
}

impl From<Vec<u8>> for Word {
    fn from(letters: Vec<u8>) -> Self {
        Word(letters)
    }
}

impl From<&[u8]> for Word {
    fn from(letters: &[u8]) -> Self {
        Word(letters.to_vec())
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// A symmetric Coxeter matrix with `m_{i,i} = 1` and `m_{i,j} >= 2` off the
/// diagonal; `0` encodes infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterMatrix {
    rank: usize,
    m: Vec<Vec<u32>>,
}

impl CoxeterMatrix {
    pub fn new(entries: Vec<Vec<u32>>) -> Result<Self, CoxeterError> {
        let rank = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != rank {
                return Err(CoxeterError::NotSquare(i));
            }
        }
        for i in 0..rank {
            if entries[i][i] != 1 {
                return Err(CoxeterError::BadDiagonal(i));
            }
            for j in 0..rank {
                if entries[i][j] != entries[j][i] {
                    return Err(CoxeterError::AsymmetricMatrix(i.min(j), i.max(j)));
                }
                if i != j && entries[i][j] == 1 {
                    return Err(CoxeterError::OffDiagonalTooSmall(i.min(j), i.max(j)));
                }
            }
        }
        Ok(CoxeterMatrix { rank, m: entries })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Entry `m_{i,j}`; `None` means infinity.
    pub fn entry(&self, i: u8, j: u8) -> Option<u32> {
        let v = self.m[i as usize][j as usize];
        (v != INFINITY).then_some(v)
    }

    pub fn raw(&self) -> &Vec<Vec<u32>> {
        &self.m
    }
}

/// A Coxeter system `(W, I)` given by its matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterSystem {
    matrix: CoxeterMatrix,
}

impl CoxeterSystem {
    pub fn new(matrix: CoxeterMatrix) -> Self {
        CoxeterSystem { matrix }
    }

    /// Validates a raw entry array (0 encoding infinity) and wraps it.
    pub fn validate_matrix(entries: Vec<Vec<u32>>) -> Result<Self, CoxeterError> {
        Ok(CoxeterSystem::new(CoxeterMatrix::new(entries)?))
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn check_word(&self, word: &Word) -> Result<(), CoxeterError> {
        for &i in word.letters() {
            if i as usize >= self.rank() {
                return Err(CoxeterError::BadGeneratorIndex(i, self.rank()));
            }
        }
        Ok(())
    }

    fn check_subset(&self, subset: &[u8]) -> Result<(), CoxeterError> {
        for &i in subset {
            if i as usize >= self.rank() {
                return Err(CoxeterError::BadSubset(i));
            }
        }
        Ok(())
    }

    /// The ShortLex normal form of the element represented by `word`.
    pub fn reduce(&self, word: &Word) -> Result<Word, CoxeterError> {
        self.check_word(word)?;
        Ok(Word(self.reduce_letters(word.0.clone())))
    }

    /// Length function: the number of letters of a reduced expression.
    pub fn length(&self, word: &Word) -> Result<usize, CoxeterError> {
        Ok(self.reduce(word)?.len())
    }

    /// Normal form of the product `w1 * w2`.
    pub fn multiply(&self, w1: &Word, w2: &Word) -> Result<Word, CoxeterError> {
        self.check_word(w1)?;
        self.check_word(w2)?;
        let mut letters = w1.0.clone();
        letters.extend_from_slice(&w2.0);
        Ok(Word(self.reduce_letters(letters)))
    }

    /// Normal form of the inverse. Generators are involutions, so the inverse
    /// of a word is its reversal.
    pub fn inverse(&self, word: &Word) -> Result<Word, CoxeterError> {
        self.check_word(word)?;
        let rev: Vec<u8> = word.0.iter().rev().copied().collect();
        Ok(Word(self.reduce_letters(rev)))
    }

    /// All reduced expressions of the element of `word` (its braid orbit).
    pub fn reduced_expressions(&self, word: &Word) -> Result<Vec<Word>, CoxeterError> {
        let nf = self.reduce(word)?;
        let orbit = self.braid_orbit(&nf.0);
        Ok(orbit.into_iter().map(Word).collect())
    }

    fn reduce_letters(&self, mut w: Vec<u8>) -> Vec<u8> {
        'shorten: loop {
            if let Some(p) = adjacent_equal(&w) {
                w.drain(p..p + 2);
                continue;
            }
            // No immediate cancellation: saturate braid moves at this length.
            let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
            seen.insert(w.clone());
            let mut queue = vec![w.clone()];
            while let Some(u) = queue.pop() {
                for v in self.braid_neighbors(&u) {
                    if let Some(p) = adjacent_equal(&v) {
                        let mut shorter = v;
                        shorter.drain(p..p + 2);
                        w = shorter;
                        continue 'shorten;
                    }
                    if seen.insert(v.clone()) {
                        queue.push(v);
                    }
                }
            }
            // Same-length orbit with no cancellation anywhere: the word is
            // reduced and the orbit is the set of all reduced expressions.
            // Lex-least at fixed length is the ShortLex normal form.
            return seen.into_iter().next().unwrap();
        }
    }

    /// All words obtained from `w` by a single braid move.
    fn braid_neighbors(&self, w: &[u8]) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for p in 0..w.len().saturating_sub(1) {
            let (i, j) = (w[p], w[p + 1]);
            if i == j {
                continue;
            }
            let Some(m) = self.matrix.entry(i, j) else {
                continue;
            };
            let m = m as usize;
            if p + m > w.len() {
                continue;
            }
            let alternates = (0..m).all(|k| w[p + k] == if k % 2 == 0 { i } else { j });
            if alternates {
                let mut v = w.to_vec();
                for k in 0..m {
                    v[p + k] = if k % 2 == 0 { j } else { i };
                }
                out.push(v);
            }
        }
        out
    }

    fn braid_orbit(&self, reduced: &[u8]) -> BTreeSet<Vec<u8>> {
        let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
        seen.insert(reduced.to_vec());
        let mut queue = vec![reduced.to_vec()];
        while let Some(u) = queue.pop() {
            for v in self.braid_neighbors(&u) {
                if seen.insert(v.clone()) {
                    queue.push(v);
                }
            }
        }
        seen
    }

    /// ShortLex normal forms of all elements of length at most `max_length`,
    /// in ShortLex order.
    pub fn enumerate_elements(&self, max_length: usize) -> Vec<Word> {
        let mut out: Vec<Word> = vec![Word::empty()];
        let mut level: Vec<Vec<u8>> = vec![Vec::new()];
        let mut seen: HashSet<Vec<u8>> = level.iter().cloned().collect();
        for l in 0..max_length {
            let mut next: BTreeSet<Vec<u8>> = BTreeSet::new();
            for w in &level {
                for i in 0..self.rank() as u8 {
                    let mut c = w.clone();
                    c.push(i);
                    let r = self.reduce_letters(c);
                    if r.len() == l + 1 && !seen.contains(&r) {
                        next.insert(r);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            level = next.into_iter().collect();
            for w in &level {
                seen.insert(w.clone());
                out.push(Word(w.clone()));
            }
        }
        out
    }

    /// All elements of a finite group, in ShortLex order.
    pub fn enumerate_all(&self) -> Result<Vec<Word>, CoxeterError> {
        if !self.is_finite() {
            return Err(CoxeterError::InfiniteGroup);
        }
        Ok(self.enumerate_elements(usize::MAX))
    }

    /// The unique longest element of a finite group.
    pub fn longest_element(&self) -> Result<Word, CoxeterError> {
        let all = self.enumerate_all()?;
        let max_len = all.last().map_or(0, Word::len);
        let longest: Vec<&Word> = all.iter().filter(|w| w.len() == max_len).collect();
        debug_assert_eq!(longest.len(), 1, "longest element must be unique");
        Ok(longest[0].clone())
    }

    /// Whether the whole group `W` is finite.
    pub fn is_finite(&self) -> bool {
        let all: Vec<u8> = (0..self.rank() as u8).collect();
        self.is_finite_parabolic(&all).unwrap()
    }

    /// Whether the standard parabolic `W_J` is finite, decided by matching
    /// each connected component of the Coxeter graph on `J` against the
    /// classification of finite irreducible Coxeter graphs.
    pub fn is_finite_parabolic(&self, subset: &[u8]) -> Result<bool, CoxeterError> {
        self.check_subset(subset)?;
        for component in self.graph_components(subset) {
            if !self.component_is_finite(&component) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All subsets `J` of `I` with `W_J` finite.
    pub fn spherical_subsets(&self) -> Vec<Vec<u8>> {
        let n = self.rank();
        assert!(n < 30, "spherical subset enumeration needs small rank");
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let subset: Vec<u8> = (0..n as u8).filter(|i| mask >> i & 1 == 1).collect();
            if self.is_finite_parabolic(&subset).unwrap() {
                out.push(subset);
            }
        }
        out
    }

    /// The restricted system `(W_J, J)` with generators renumbered along the
    /// sorted order of `subset`.
    pub fn subsystem(&self, subset: &[u8]) -> Result<CoxeterSystem, CoxeterError> {
        self.check_subset(subset)?;
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let m: Vec<Vec<u32>> = sorted
            .iter()
            .map(|&i| sorted.iter().map(|&j| self.matrix.raw()[i as usize][j as usize]).collect())
            .collect();
        CoxeterSystem::validate_matrix(m)
    }

    /// Connected components of the Coxeter graph restricted to `subset`
    /// (edges where `m_{i,j} >= 3` or infinite).
    fn graph_components(&self, subset: &[u8]) -> Vec<Vec<u8>> {
        let mut remaining: BTreeSet<u8> = subset.iter().copied().collect();
        let mut components = Vec::new();
        while let Some(&start) = remaining.iter().next() {
            let mut comp = vec![start];
            remaining.remove(&start);
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                let adjacent: Vec<u8> = remaining
                    .iter()
                    .copied()
                    .filter(|&j| self.matrix.entry(i, j).map_or(true, |m| m >= 3))
                    .collect();
                for j in adjacent {
                    remaining.remove(&j);
                    comp.push(j);
                    stack.push(j);
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Recognizes the finite irreducible types A, B/C, D, E6-E8, F4, H3, H4
    /// and I2(m) on a connected component.
    fn component_is_finite(&self, comp: &[u8]) -> bool {
        let n = comp.len();
        let label = |i: u8, j: u8| self.matrix.entry(i, j);
        // Any infinite bond kills finiteness.
        for (a, &i) in comp.iter().enumerate() {
            for &j in &comp[a + 1..] {
                if label(i, j).is_none() {
                    return false;
                }
            }
        }
        if n == 1 {
            return true;
        }
        if n == 2 {
            return true; // I2(m) with m finite
        }
        let edges: Vec<(usize, usize, u32)> = {
            let mut e = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    let m = label(comp[a], comp[b]).unwrap();
                    if m >= 3 {
                        e.push((a, b, m));
                    }
                }
            }
            e
        };
        // Finite diagrams of rank >= 3 are trees.
        if edges.len() != n - 1 {
            return false;
        }
        let mut deg = vec![0usize; n];
        let mut nbrs = vec![Vec::new(); n];
        for &(a, b, _) in &edges {
            deg[a] += 1;
            deg[b] += 1;
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        if deg.iter().any(|&d| d >= 4) {
            return false;
        }
        let branches: Vec<usize> = (0..n).filter(|&v| deg[v] == 3).collect();
        if branches.len() >= 2 {
            return false;
        }
        let big_labels: Vec<&(usize, usize, u32)> = edges.iter().filter(|&&(_, _, m)| m > 3).collect();
        if let Some(&branch) = branches.first() {
            // Types D and E: simply laced trees with one branch vertex.
            if !big_labels.is_empty() {
                return false;
            }
            let mut arms: Vec<usize> = nbrs[branch]
                .iter()
                .map(|&start| {
                    let mut len = 1;
                    let (mut prev, mut cur) = (branch, start);
                    while let Some(&next) = nbrs[cur].iter().find(|&&v| v != prev) {
                        prev = cur;
                        cur = next;
                        len += 1;
                    }
                    len
                })
                .collect();
            arms.sort_unstable();
            let (a, b, c) = (arms[0], arms[1], arms[2]);
            return a == 1 && (b == 1 || (b == 2 && c <= 4));
        }
        // Path diagram. Walk it from one end to locate the big label.
        if big_labels.len() >= 2 {
            return false;
        }
        if big_labels.is_empty() {
            return true; // type A
        }
        let &&(x, y, m) = big_labels.first().unwrap();
        let at_end = deg[x] == 1 || deg[y] == 1;
        match m {
            4 => at_end || n == 4, // B/C at an end, F4 as the middle bond of a 4-path
            5 => at_end && n <= 4, // H3, H4
            _ => false,
        }
    }
}

fn adjacent_equal(w: &[u8]) -> Option<usize> {
    (0..w.len().saturating_sub(1)).find(|&p| w[p] == w[p + 1])
}

/// Convenience constructors for common test systems.
pub fn dihedral(m: u32) -> CoxeterSystem {
    CoxeterSystem::validate_matrix(vec![vec![1, m], vec![m, 1]]).unwrap()
}
