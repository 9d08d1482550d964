//! Edge-colored chamber graphs with building-axiom verification, Weyl
//! distance, galleries, residues, panels and apartment enumeration.
//!
//! A [`Building`] is stored as a finite simple graph whose edges carry colors
//! from the generator set of a Coxeter system. The object may be a
//! radius-bounded ball of a larger building, flagged with its radius and
//! center; axiom checks are then restricted to the interior where complete
//! information is available.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterError, CoxeterSystem, Word};

#[derive(Debug, Error, PartialEq)]
pub enum BuildingError {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("unknown chamber {0:?}")]
    UnknownChamber(String),
    #[error("chambers {0:?} and {1:?} lie in different components")]
    Disconnected(String, String),
    #[error("gallery type {0} is not reduced")]
    NonReducedType(Word),
    #[error("subset contains invalid color {0}")]
    BadSubset(u8),
    #[error("the Weyl group is infinite")]
    InfiniteW,
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

/// Marker that a building object is a radius-`radius` ball of a larger
/// building around `center`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallInfo {
    pub radius: u32,
    pub center: String,
}

/// An edge-colored chamber graph over a Coxeter system.
#[derive(Clone, Debug)]
pub struct Building {
    system: CoxeterSystem,
    chambers: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<(usize, u8)>>,
    edges: BTreeSet<(usize, usize, u8)>,
    ball: Option<BallInfo>,
}

/// A gallery: a chamber sequence together with its color type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gallery {
    pub chambers: Vec<String>,
    pub gallery_type: Word,
}

/// A residue `Res_J(c)`: the chambers reachable from `base` along colors in `J`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Residue {
    pub colors: Vec<u8>,
    pub chambers: Vec<String>,
}

/// An `i`-panel: a maximal set of mutually `i`-adjacent chambers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Panel {
    pub color: u8,
    pub chambers: Vec<String>,
}

/// A thin subbuilding, given by its chamber set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Apartment {
    pub chambers: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AxiomViolation {
    /// (B1): a chamber with no `i`-adjacent chamber.
    MissingPanelMate { chamber: String, color: u8 },
    /// (B1): two chambers `i`-adjacent to a common chamber but not to each other.
    IntransitiveAdjacency { chamber: String, first: String, second: String, color: u8 },
    /// (B2): two independent minimal galleries gave different Weyl distances.
    DeltaDisagreement { from: String, to: String, first: Word, second: Word },
    /// (B2): the endpoints of galleries of a reduced type disagree with the
    /// chambers at the corresponding Weyl distance.
    GalleryTypeMismatch { from: String, word: Word, expected: Vec<String>, found: Vec<String> },
    /// The chamber graph is disconnected, which cannot happen in a building.
    Disconnected { from: String, to: String },
}

impl std::fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxiomViolation::MissingPanelMate { chamber, color } => {
                write!(f, "(B1) chamber {chamber:?} has no {color}-adjacent chamber")
            }
            AxiomViolation::IntransitiveAdjacency { chamber, first, second, color } => write!(
                f,
                "(B1) {first:?} and {second:?} are {color}-adjacent to {chamber:?} but not to each other"
            ),
            AxiomViolation::DeltaDisagreement { from, to, first, second } => write!(
                f,
                "(B2) minimal galleries from {from:?} to {to:?} give distances {first} and {second}"
            ),
            AxiomViolation::GalleryTypeMismatch { from, word, expected, found } => write!(
                f,
                "(B2) galleries of type {word} from {from:?} end at {found:?}, expected {expected:?}"
            ),
            AxiomViolation::Disconnected { from, to } => {
                write!(f, "chamber graph is disconnected between {from:?} and {to:?}")
            }
        }
    }
}

/// Result of [`Building::verify_axioms`]. Empty means certified: exhaustive
/// for a finite building without the boundary flag, interior-only otherwise.
#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
    pub word_bound: usize,
    pub interior_only: bool,
}

impl AxiomReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct BuildingJson {
    coxeter: CoxeterMatrixJson,
    chambers: Vec<String>,
    edges: Vec<(String, String, u8)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ball_of_radius: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ball_center: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CoxeterMatrixJson {
    rank: usize,
    m: Vec<Vec<u32>>,
}

impl Building {
    /// Builds a colored chamber graph, validating structural well-formedness
    /// (simple graph, total coloring, known chambers). Building axioms are
    /// checked separately by [`verify_axioms`](Self::verify_axioms).
    ///
    /// Chambers are kept in lexicographic order; this is the canonical
    /// serialization and tie-breaking order.
    pub fn new(
        system: CoxeterSystem,
        chambers: Vec<String>,
        edges: Vec<(String, String, u8)>,
        ball: Option<BallInfo>,
    ) -> Result<Self, BuildingError> {
        let mut sorted = chambers;
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(BuildingError::MalformedGraph(format!(
                    "duplicate chamber id {:?}",
                    pair[0]
                )));
            }
        }
        let index: HashMap<String, usize> =
            sorted.iter().enumerate().map(|(k, c)| (c.clone(), k)).collect();
        let mut edge_set = BTreeSet::new();
        let mut seen_pairs = BTreeSet::new();
        let mut adj = vec![Vec::new(); sorted.len()];
        for (a, b, color) in edges {
            let &ia = index.get(&a).ok_or_else(|| BuildingError::UnknownChamber(a.clone()))?;
            let &ib = index.get(&b).ok_or_else(|| BuildingError::UnknownChamber(b.clone()))?;
            if ia == ib {
                return Err(BuildingError::MalformedGraph(format!("loop at chamber {a:?}")));
            }
            if color as usize >= system.rank() {
                return Err(BuildingError::MalformedGraph(format!(
                    "edge color {color} out of range for rank {}",
                    system.rank()
                )));
            }
            let (lo, hi) = (ia.min(ib), ia.max(ib));
            if !seen_pairs.insert((lo, hi)) {
                return Err(BuildingError::MalformedGraph(format!(
                    "parallel edges between {a:?} and {b:?}"
                )));
            }
            edge_set.insert((lo, hi, color));
            adj[ia].push((ib, color));
            adj[ib].push((ia, color));
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        if let Some(info) = &ball {
            if !index.contains_key(&info.center) {
                return Err(BuildingError::UnknownChamber(info.center.clone()));
            }
        }
        Ok(Building { system, chambers: sorted, index, adj, edges: edge_set, ball })
    }

    pub fn system(&self) -> &CoxeterSystem {
        &self.system
    }

    pub fn chambers(&self) -> &[String] {
        &self.chambers
    }

    pub fn chamber_count(&self) -> usize {
        self.chambers.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u8)> {
        self.edges
            .iter()
            .map(|&(a, b, c)| (self.chambers[a].as_str(), self.chambers[b].as_str(), c))
    }

    pub fn ball_info(&self) -> Option<&BallInfo> {
        self.ball.as_ref()
    }

    pub fn chamber_index(&self, chamber: &str) -> Result<usize, BuildingError> {
        self.index
            .get(chamber)
            .copied()
            .ok_or_else(|| BuildingError::UnknownChamber(chamber.to_string()))
    }

    fn neighbors(&self, c: usize) -> &[(usize, u8)] {
        &self.adj[c]
    }

    fn color_neighbors(&self, c: usize, color: u8) -> impl Iterator<Item = usize> + '_ {
        self.adj[c].iter().filter(move |&&(_, col)| col == color).map(|&(n, _)| n)
    }

    /// Graph distances from `start`, with the chamber visited through the
    /// smallest (or largest, when `reverse_ties`) neighbor index as parent.
    fn bfs(&self, start: usize, reverse_ties: bool) -> (Vec<Option<u32>>, Vec<Option<(usize, u8)>>) {
        let mut dist = vec![None; self.chambers.len()];
        let mut parent = vec![None; self.chambers.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            let nbrs: Vec<(usize, u8)> = if reverse_ties {
                self.adj[c].iter().rev().copied().collect()
            } else {
                self.adj[c].clone()
            };
            for (n, color) in nbrs {
                if dist[n].is_none() {
                    dist[n] = Some(dist[c].unwrap() + 1);
                    parent[n] = Some((c, color));
                    queue.push_back(n);
                }
            }
        }
        (dist, parent)
    }

    fn gallery_from_parents(
        &self,
        parent: &[Option<(usize, u8)>],
        start: usize,
        end: usize,
    ) -> Gallery {
        let mut chambers = vec![end];
        let mut colors = Vec::new();
        let mut cur = end;
        while cur != start {
            let (p, color) = parent[cur].expect("parent chain must reach start");
            colors.push(color);
            chambers.push(p);
            cur = p;
        }
        chambers.reverse();
        colors.reverse();
        Gallery {
            chambers: chambers.into_iter().map(|c| self.chambers[c].clone()).collect(),
            gallery_type: Word(colors),
        }
    }

    /// The Weyl distance `delta(a, c)` as a ShortLex normal form, computed
    /// from one minimal gallery.
    pub fn weyl_distance(&self, a: &str, c: &str) -> Result<Word, BuildingError> {
        let ia = self.chamber_index(a)?;
        let ic = self.chamber_index(c)?;
        let (dist, parent) = self.bfs(ia, false);
        if dist[ic].is_none() {
            return Err(BuildingError::Disconnected(a.to_string(), c.to_string()));
        }
        let gallery = self.gallery_from_parents(&parent, ia, ic);
        Ok(self.system.reduce(&gallery.gallery_type)?)
    }

    /// The chamber metric `d(a, c) = l(delta(a, c))`, equal to graph distance.
    pub fn chamber_distance(&self, a: &str, c: &str) -> Result<u32, BuildingError> {
        let ia = self.chamber_index(a)?;
        let ic = self.chamber_index(c)?;
        let (dist, _) = self.bfs(ia, false);
        dist[ic].ok_or_else(|| BuildingError::Disconnected(a.to_string(), c.to_string()))
    }

    /// One minimal gallery from `a` to `c` (BFS tree, smallest-index tie-break).
    pub fn minimal_gallery(&self, a: &str, c: &str) -> Result<Gallery, BuildingError> {
        let ia = self.chamber_index(a)?;
        let ic = self.chamber_index(c)?;
        let (dist, parent) = self.bfs(ia, false);
        if dist[ic].is_none() {
            return Err(BuildingError::Disconnected(a.to_string(), c.to_string()));
        }
        Ok(self.gallery_from_parents(&parent, ia, ic))
    }

    /// The first gallery of the given reduced type starting at `a`, in
    /// depth-first order over chamber indices, or `None` if there is none.
    /// Galleries of a reduced type are unique per endpoint; on thick
    /// buildings several endpoints may be reachable and the deterministic
    /// first one is returned.
    pub fn gallery_of_type(&self, a: &str, word: &Word) -> Result<Option<Gallery>, BuildingError> {
        let ia = self.chamber_index(a)?;
        if self.system.length(word)? != word.len() {
            return Err(BuildingError::NonReducedType(word.clone()));
        }
        fn dfs(b: &Building, cur: usize, rest: &[u8], path: &mut Vec<usize>) -> bool {
            let Some((&color, tail)) = rest.split_first() else {
                return true;
            };
            let nbrs: Vec<usize> = b.color_neighbors(cur, color).collect();
            for n in nbrs {
                path.push(n);
                if dfs(b, n, tail, path) {
                    return true;
                }
                path.pop();
            }
            false
        }
        let mut path = vec![ia];
        if !dfs(self, ia, word.letters(), &mut path) {
            return Ok(None);
        }
        Ok(Some(Gallery {
            chambers: path.into_iter().map(|c| self.chambers[c].clone()).collect(),
            gallery_type: word.clone(),
        }))
    }

    /// Endpoints of all walks of color type `word` starting at `a`.
    fn type_endpoints(&self, a: usize, word: &[u8]) -> BTreeSet<usize> {
        let mut frontier = BTreeSet::from([a]);
        for &color in word {
            let mut next = BTreeSet::new();
            for c in frontier {
                next.extend(self.color_neighbors(c, color));
            }
            frontier = next;
        }
        frontier
    }

    /// The residue `Res_J(c)` as a building over the restricted system
    /// `(W_J, J)`, with colors renumbered along the sorted order of `J`.
    pub fn residue(&self, chamber: &str, colors: &[u8]) -> Result<Building, BuildingError> {
        for &j in colors {
            if j as usize >= self.system.rank() {
                return Err(BuildingError::BadSubset(j));
            }
        }
        let start = self.chamber_index(chamber)?;
        let mut subset: Vec<u8> = colors.to_vec();
        subset.sort_unstable();
        subset.dedup();
        let color_map: HashMap<u8, u8> =
            subset.iter().enumerate().map(|(k, &j)| (j, k as u8)).collect();
        let mut members = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            for &(n, color) in self.neighbors(c) {
                if color_map.contains_key(&color) && members.insert(n) {
                    stack.push(n);
                }
            }
        }
        let chambers: Vec<String> = members.iter().map(|&c| self.chambers[c].clone()).collect();
        let mut edges = Vec::new();
        for &(a, b, color) in &self.edges {
            if members.contains(&a) && members.contains(&b) {
                if let Some(&new_color) = color_map.get(&color) {
                    edges.push((self.chambers[a].clone(), self.chambers[b].clone(), new_color));
                }
            }
        }
        let subsystem = self.system.subsystem(&subset)?;
        let ball = self.ball.as_ref().map(|info| BallInfo {
            radius: info.radius,
            center: chamber.to_string(),
        });
        Building::new(subsystem, chambers, edges, ball)
    }

    /// The residue of `chamber` as a canonical `(colors, chamber set)` pair.
    pub fn residue_key(&self, chamber: &str, colors: &[u8]) -> Result<Residue, BuildingError> {
        let sub = self.residue(chamber, colors)?;
        let mut subset: Vec<u8> = colors.to_vec();
        subset.sort_unstable();
        subset.dedup();
        Ok(Residue { colors: subset, chambers: sub.chambers.clone() })
    }

    /// All `i`-panels: color classes of `i`-adjacency extended by reflexivity.
    pub fn panels(&self) -> Vec<Panel> {
        let mut out = Vec::new();
        for color in 0..self.system.rank() as u8 {
            let mut seen = vec![false; self.chambers.len()];
            for start in 0..self.chambers.len() {
                if seen[start] {
                    continue;
                }
                let mut comp = BTreeSet::from([start]);
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(c) = stack.pop() {
                    for n in self.color_neighbors(c, color) {
                        if !seen[n] {
                            seen[n] = true;
                            comp.insert(n);
                            stack.push(n);
                        }
                    }
                }
                if comp.len() >= 2 || self.ball.is_none() {
                    out.push(Panel {
                        color,
                        chambers: comp.into_iter().map(|c| self.chambers[c].clone()).collect(),
                    });
                }
            }
        }
        out
    }

    pub fn is_thin(&self) -> bool {
        self.panels().iter().all(|p| p.chambers.len() == 2)
    }

    pub fn is_thick(&self) -> bool {
        self.panels().iter().all(|p| p.chambers.len() >= 3)
    }

    /// Every panel of an explicitly stored finite graph is finite; balls of
    /// locally finite buildings are stored explicitly, so this holds as well.
    pub fn is_locally_finite(&self) -> bool {
        true
    }

    /// Interior chambers: those whose neighborhoods are fully present. For a
    /// ball of radius `R` these are the chambers within `R - 1` of the center.
    fn interior(&self) -> Vec<bool> {
        match &self.ball {
            None => vec![true; self.chambers.len()],
            Some(info) => {
                let center = self.index[&info.center];
                let (dist, _) = self.bfs(center, false);
                dist.iter()
                    .map(|d| d.is_some_and(|d| d + 1 <= info.radius))
                    .collect()
            }
        }
    }

    /// Remaining gallery budget at chamber `a` before walks could leave a
    /// radius-`R` ball; unlimited for complete buildings.
    fn word_budget(&self, a: usize) -> usize {
        match &self.ball {
            None => usize::MAX,
            Some(info) => {
                let center = self.index[&info.center];
                let (dist, _) = self.bfs(center, false);
                match dist[a] {
                    Some(d) if d <= info.radius => (info.radius - d) as usize,
                    _ => 0,
                }
            }
        }
    }

    /// Verifies the building axioms (B1) and (B2), exhaustively on finite
    /// buildings and on the interior of radius-bounded balls.
    ///
    /// (B2) is checked by comparing the Weyl distance along two independent
    /// minimal galleries, and by checking, for each chamber `a` and each
    /// reduced word `u` up to the bound, that the endpoints of galleries of
    /// type `u` from `a` are exactly the chambers at Weyl distance
    /// `reduce(u)` from `a`.
    pub fn verify_axioms(&self, word_bound: Option<usize>) -> AxiomReport {
        let n = self.chambers.len();
        let mut report = AxiomReport {
            violations: Vec::new(),
            word_bound: 0,
            interior_only: self.ball.is_some(),
        };
        if n == 0 {
            return report;
        }
        let interior = self.interior();

        // (B1)
        for a in 0..n {
            if !interior[a] {
                continue;
            }
            for color in 0..self.system.rank() as u8 {
                let nbrs: Vec<usize> = self.color_neighbors(a, color).collect();
                if nbrs.is_empty() {
                    report.violations.push(AxiomViolation::MissingPanelMate {
                        chamber: self.chambers[a].clone(),
                        color,
                    });
                    continue;
                }
                for (k, &b) in nbrs.iter().enumerate() {
                    for &c in &nbrs[k + 1..] {
                        let adjacent = self
                            .color_neighbors(b, color)
                            .any(|x| x == c);
                        if !adjacent {
                            report.violations.push(AxiomViolation::IntransitiveAdjacency {
                                chamber: self.chambers[a].clone(),
                                first: self.chambers[b].clone(),
                                second: self.chambers[c].clone(),
                                color,
                            });
                        }
                    }
                }
            }
        }

        // Connectivity and per-chamber BFS data.
        let mut bfs_fwd = Vec::with_capacity(n);
        for a in 0..n {
            bfs_fwd.push(self.bfs(a, false));
        }
        let (dist0, _) = &bfs_fwd[0];
        let mut diameter = 0usize;
        for a in 0..n {
            if dist0[a].is_none() {
                report.violations.push(AxiomViolation::Disconnected {
                    from: self.chambers[0].clone(),
                    to: self.chambers[a].clone(),
                });
                return report;
            }
            for b in 0..n {
                if let Some(d) = bfs_fwd[a].0[b] {
                    diameter = diameter.max(d as usize);
                }
            }
        }
        let bound = word_bound.unwrap_or(diameter);
        report.word_bound = bound;

        // delta from two independent minimal galleries.
        let mut delta: Vec<Vec<Option<Word>>> = vec![vec![None; n]; n];
        for a in 0..n {
            let (_, parent_fwd) = &bfs_fwd[a];
            let (_, parent_rev) = self.bfs(a, true);
            for b in 0..n {
                let g1 = self.gallery_from_parents(parent_fwd, a, b);
                let g2 = self.gallery_from_parents(&parent_rev, a, b);
                let w1 = match self.system.reduce(&g1.gallery_type) {
                    Ok(w) => w,
                    Err(_) => continue,
                };
                let w2 = self.system.reduce(&g2.gallery_type).unwrap();
                if w1 != w2 {
                    report.violations.push(AxiomViolation::DeltaDisagreement {
                        from: self.chambers[a].clone(),
                        to: self.chambers[b].clone(),
                        first: w1.clone(),
                        second: w2,
                    });
                }
                delta[a][b] = Some(w1);
            }
        }

        // Gallery existence/absence for every reduced word up to the bound.
        let elements = self.system.enumerate_elements(bound);
        let mut reduced_words: Vec<(Word, Vec<Word>)> = Vec::new();
        for w in &elements {
            let exprs = self.system.reduced_expressions(w).unwrap();
            reduced_words.push((w.clone(), exprs));
        }
        for a in 0..n {
            let budget = self.word_budget(a);
            for (nf, exprs) in &reduced_words {
                if nf.len() > budget {
                    continue;
                }
                let expected: Vec<usize> = (0..n)
                    .filter(|&b| delta[a][b].as_ref() == Some(nf))
                    .collect();
                for expr in exprs {
                    let found: Vec<usize> =
                        self.type_endpoints(a, expr.letters()).into_iter().collect();
                    if found != expected {
                        report.violations.push(AxiomViolation::GalleryTypeMismatch {
                            from: self.chambers[a].clone(),
                            word: expr.clone(),
                            expected: expected
                                .iter()
                                .map(|&b| self.chambers[b].clone())
                                .collect(),
                            found: found.iter().map(|&b| self.chambers[b].clone()).collect(),
                        });
                    }
                }
            }
        }
        report
    }

    /// The induced subgraph on the chambers within chamber distance `r` of
    /// `center`, flagged as a ball.
    pub fn ball(&self, center: &str, r: u32) -> Result<Building, BuildingError> {
        let ic = self.chamber_index(center)?;
        let (dist, _) = self.bfs(ic, false);
        let members: BTreeSet<usize> =
            (0..self.chambers.len()).filter(|&c| dist[c].is_some_and(|d| d <= r)).collect();
        let chambers: Vec<String> = members.iter().map(|&c| self.chambers[c].clone()).collect();
        let edges: Vec<(String, String, u8)> = self
            .edges
            .iter()
            .filter(|&&(a, b, _)| members.contains(&a) && members.contains(&b))
            .map(|&(a, b, color)| (self.chambers[a].clone(), self.chambers[b].clone(), color))
            .collect();
        Building::new(
            self.system.clone(),
            chambers,
            edges,
            Some(BallInfo { radius: r, center: center.to_string() }),
        )
    }

    /// All apartments (thin subbuildings), found by growing color-preserving
    /// images of the Cayley building of `(W, I)` with backtracking over panel
    /// choices. Requires finite `W`.
    pub fn enumerate_apartments(&self) -> Result<Vec<Apartment>, BuildingError> {
        if !self.system.is_finite() {
            return Err(BuildingError::InfiniteW);
        }
        let elements = self.system.enumerate_all()?;
        let elem_index: HashMap<&Word, usize> =
            elements.iter().enumerate().map(|(k, w)| (w, k)).collect();
        // For each non-identity element, its ShortLex parent and the color of
        // the connecting Cayley edge (normal forms are prefix-closed).
        let mut parent = vec![(0usize, 0u8); elements.len()];
        for (k, w) in elements.iter().enumerate().skip(1) {
            let mut p = w.0.clone();
            let color = p.pop().unwrap();
            parent[k] = (elem_index[&Word(p)], color);
        }
        // Cayley adjacency: for each element and generator, the neighbor.
        let mut cayley: Vec<Vec<(u8, usize)>> = vec![Vec::new(); elements.len()];
        for (k, w) in elements.iter().enumerate() {
            for i in 0..self.system.rank() as u8 {
                let n = self.system.multiply(w, &Word(vec![i]))?;
                cayley[k].push((i, elem_index[&n]));
            }
        }

        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let n = self.chambers.len();
        let mut image: Vec<Option<usize>> = vec![None; elements.len()];
        let mut used = vec![false; n];

        fn extend(
            b: &Building,
            elements_len: usize,
            parent: &[(usize, u8)],
            cayley: &[Vec<(u8, usize)>],
            pos: usize,
            image: &mut Vec<Option<usize>>,
            used: &mut Vec<bool>,
            found: &mut BTreeSet<Vec<usize>>,
        ) {
            if pos == elements_len {
                let mut chambers: Vec<usize> = image.iter().map(|c| c.unwrap()).collect();
                // Thinness: the induced subgraph may not contain edges beyond
                // the Cayley pattern.
                let member: BTreeSet<usize> = chambers.iter().copied().collect();
                let mut expected_edges = BTreeSet::new();
                for (k, nbrs) in cayley.iter().enumerate() {
                    for &(color, m) in nbrs {
                        let (a, b2) = (image[k].unwrap(), image[m].unwrap());
                        expected_edges.insert((a.min(b2), a.max(b2), color));
                    }
                }
                let induced: BTreeSet<(usize, usize, u8)> = b
                    .edges
                    .iter()
                    .filter(|&&(x, y, _)| member.contains(&x) && member.contains(&y))
                    .copied()
                    .collect();
                if induced == expected_edges {
                    chambers.sort_unstable();
                    found.insert(chambers);
                }
                return;
            }
            let (p, color) = parent[pos];
            let anchor = image[p].unwrap();
            let candidates: Vec<usize> = b.color_neighbors(anchor, color).collect();
            'cand: for cand in candidates {
                if used[cand] {
                    continue;
                }
                // Consistency with every already-assigned Cayley neighbor.
                for &(c2, m) in &cayley[pos] {
                    if m < pos {
                        let target = image[m].unwrap();
                        if !b.color_neighbors(cand, c2).any(|x| x == target) {
                            continue 'cand;
                        }
                    }
                }
                image[pos] = Some(cand);
                used[cand] = true;
                extend(b, elements_len, parent, cayley, pos + 1, image, used, found);
                used[cand] = false;
                image[pos] = None;
            }
        }

        for base in 0..n {
            image[0] = Some(base);
            used[base] = true;
            extend(self, elements.len(), &parent, &cayley, 1, &mut image, &mut used, &mut found);
            used[base] = false;
            image[0] = None;
        }
        Ok(found
            .into_iter()
            .map(|chambers| Apartment {
                chambers: chambers.into_iter().map(|c| self.chambers[c].clone()).collect(),
            })
            .collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let json = BuildingJson {
            coxeter: CoxeterMatrixJson {
                rank: self.system.rank(),
                m: self.system.matrix().raw().clone(),
            },
            chambers: self.chambers.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b, c)| (self.chambers[a].clone(), self.chambers[b].clone(), c))
                .collect(),
            ball_of_radius: self.ball.as_ref().map(|i| i.radius),
            ball_center: self.ball.as_ref().map(|i| i.center.clone()),
        };
        serde_json::to_value(json).expect("building serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Building, BuildingError> {
        let json: BuildingJson = serde_json::from_value(value.clone())
            .map_err(|e| BuildingError::MalformedGraph(e.to_string()))?;
        if json.coxeter.m.len() != json.coxeter.rank {
            return Err(BuildingError::MalformedGraph(format!(
                "declared rank {} does not match matrix size {}",
                json.coxeter.rank,
                json.coxeter.m.len()
            )));
        }
        let system = CoxeterSystem::validate_matrix(json.coxeter.m)?;
        let ball = match (json.ball_of_radius, json.ball_center) {
            (None, _) => None,
            (Some(radius), Some(center)) => Some(BallInfo { radius, center }),
            (Some(radius), None) => {
                // Center missing from the file: fall back to the first chamber.
                let center = json
                    .chambers
                    .iter()
                    .min()
                    .cloned()
                    .ok_or_else(|| BuildingError::MalformedGraph("empty ball".into()))?;
                Some(BallInfo { radius, center })
            }
        };
        Building::new(system, json.chambers, json.edges, ball)
    }

    /// The Weyl distance matrix indexed by chamber order.
    pub fn delta_matrix(&self) -> Result<Vec<Vec<Word>>, BuildingError> {
        let n = self.chambers.len();
        let mut out = Vec::with_capacity(n);
        for a in 0..n {
            let (dist, parent) = self.bfs(a, false);
            let mut row = Vec::with_capacity(n);
            for b in 0..n {
                if dist[b].is_none() {
                    return Err(BuildingError::Disconnected(
                        self.chambers[a].clone(),
                        self.chambers[b].clone(),
                    ));
                }
                let g = self.gallery_from_parents(&parent, a, b);
                row.push(self.system.reduce(&g.gallery_type)?);
            }
            out.push(row);
        }
        Ok(out)
    }
}

/// Serializes a Coxeter system in the matrix file format (0 encoding infinity).
pub fn coxeter_matrix_json(system: &CoxeterSystem) -> serde_json::Value {
    serde_json::json!({ "rank": system.rank(), "m": system.matrix().raw() })
}
