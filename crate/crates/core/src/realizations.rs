//! Tits and Davis realizations of buildings as abstract simplicial
//! complexes, with rational simplicial homology.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::building::{Building, BuildingError, Residue};
use crate::coxeter::CoxeterError;

#[derive(Debug, Error, PartialEq)]
pub enum RealizationError {
    #[error("realizations are not defined for rank-0 buildings")]
    RankZero,
    #[error("the Weyl group is infinite")]
    InfiniteW,
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("simplex references vertex index {0} out of range")]
    BadVertexIndex(usize),
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

/// An abstract simplicial complex: a downward-closed family of nonempty
/// finite vertex subsets, stored as sorted index vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    simplices: BTreeSet<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    vertices: Vec<String>,
    facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Builds the downward closure of the given maximal simplices. Every
    /// vertex becomes a simplex even if it appears in no facet.
    pub fn from_maximal(
        vertices: Vec<String>,
        facets: Vec<Vec<usize>>,
    ) -> Result<Self, RealizationError> {
        let n = vertices.len();
        let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
        for v in 0..n {
            simplices.insert(vec![v]);
        }
        for facet in facets {
            for &v in &facet {
                if v >= n {
                    return Err(RealizationError::BadVertexIndex(v));
                }
            }
            let mut sorted = facet;
            sorted.sort_unstable();
            sorted.dedup();
            // All nonempty subsets.
            let k = sorted.len();
            for mask in 1u64..(1 << k) {
                let subset: Vec<usize> =
                    (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| sorted[b]).collect();
                simplices.insert(subset);
            }
        }
        Ok(SimplicialComplex { vertices, simplices })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, label: &str) -> Result<usize, RealizationError> {
        self.vertices
            .iter()
            .position(|v| v == label)
            .ok_or_else(|| RealizationError::UnknownVertex(label.to_string()))
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter()
    }

    pub fn contains_simplex(&self, simplex: &[usize]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        s.dedup();
        self.simplices.contains(&s)
    }

    pub fn simplices_of_dim(&self, dim: usize) -> Vec<&Vec<usize>> {
        self.simplices.iter().filter(|s| s.len() == dim + 1).collect()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len() - 1).max()
    }

    /// Simplices not contained in any larger simplex.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        self.simplices
            .iter()
            .filter(|s| {
                !self.simplices.iter().any(|t| t.len() > s.len() && is_subset(s, t))
            })
            .cloned()
            .collect()
    }

    /// One-simplices, used as the metric skeleton.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.simplices_of_dim(1).into_iter().map(|e| (e[0], e[1])).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ComplexJson {
            vertices: self.vertices.clone(),
            facets: self.facets(),
        })
        .expect("complex serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, RealizationError> {
        let json: ComplexJson = serde_json::from_value(value.clone())
            .map_err(|_| RealizationError::BadVertexIndex(usize::MAX))?;
        SimplicialComplex::from_maximal(json.vertices, json.facets)
    }

    /// OFF-style text export of the facet list.
    pub fn to_off_text(&self) -> String {
        let facets = self.facets();
        let mut out = format!("OFF\n{} {} 0\n", self.vertices.len(), facets.len());
        for v in &self.vertices {
            out.push_str(v);
            out.push('\n');
        }
        for f in facets {
            let row: Vec<String> = f.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{} {}\n", f.len(), row.join(" ")));
        }
        out
    }

    /// Rational Betti numbers `b_0..b_max_dim` from integer boundary-matrix
    /// ranks (fraction-free Bareiss elimination).
    pub fn homology_ranks(&self, max_dim: usize) -> Vec<usize> {
        let top = self.dimension().unwrap_or(0);
        // Index simplices per dimension.
        let mut by_dim: Vec<Vec<&Vec<usize>>> = Vec::new();
        for d in 0..=top {
            by_dim.push(self.simplices_of_dim(d));
        }
        let mut index: Vec<BTreeMap<&Vec<usize>, usize>> = Vec::new();
        for level in &by_dim {
            index.push(level.iter().enumerate().map(|(k, &s)| (s, k)).collect());
        }
        let mut boundary_rank = vec![0usize; top + 2]; // rank of d_k, k = 1..=top
        for k in 1..=top {
            let rows = by_dim[k - 1].len();
            let cols = by_dim[k].len();
            let mut m = vec![vec![0i128; cols]; rows];
            for (col, simplex) in by_dim[k].iter().enumerate() {
                for (omit, _) in simplex.iter().enumerate() {
                    let face: Vec<usize> = simplex
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != omit)
                        .map(|(_, &v)| v)
                        .collect();
                    let row = index[k - 1][&face];
                    m[row][col] = if omit % 2 == 0 { 1 } else { -1 };
                }
            }
            boundary_rank[k] = bareiss_rank(m);
        }
        (0..=max_dim)
            .map(|k| {
                let n_k = by_dim.get(k).map_or(0, Vec::len);
                n_k.saturating_sub(boundary_rank.get(k).copied().unwrap_or(0))
                    .saturating_sub(boundary_rank.get(k + 1).copied().unwrap_or(0))
            })
            .collect()
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
fn bareiss_rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev = 1i128;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let Some(pivot_row) = (row..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, pivot_row);
        let pivot = m[row][col];
        for r in row + 1..rows {
            for c in col + 1..cols {
                m[r][c] = (pivot * m[r][c] - m[r][col] * m[row][c]) / prev;
            }
            m[r][col] = 0;
        }
        prev = pivot;
        rank += 1;
        row += 1;
    }
    rank
}

/// The Tits realization: vertices are the cotype-one residues; each chamber
/// contributes the maximal simplex of its `#I` cotype-one residues.
pub fn tits_realization(building: &Building) -> Result<SimplicialComplex, RealizationError> {
    let rank = building.system().rank();
    if rank == 0 {
        return Err(RealizationError::RankZero);
    }
    let all: Vec<u8> = (0..rank as u8).collect();
    let mut vertex_labels: BTreeMap<Residue, String> = BTreeMap::new();
    let mut facets_raw: Vec<Vec<Residue>> = Vec::new();
    for chamber in building.chambers() {
        let mut facet = Vec::with_capacity(rank);
        for i in 0..rank as u8 {
            let cotype: Vec<u8> = all.iter().copied().filter(|&j| j != i).collect();
            let residue = building.residue_key(chamber, &cotype)?;
            vertex_labels.entry(residue.clone()).or_insert_with(|| {
                format!("r{}_{}", i, residue.chambers[0])
            });
            facet.push(residue);
        }
        facets_raw.push(facet);
    }
    let vertices: Vec<String> = vertex_labels.values().cloned().collect();
    let vertex_index: BTreeMap<&Residue, usize> =
        vertex_labels.keys().enumerate().map(|(k, r)| (r, k)).collect();
    let facets: Vec<Vec<usize>> = facets_raw
        .iter()
        .map(|facet| facet.iter().map(|r| vertex_index[r]).collect())
        .collect();
    Ok(SimplicialComplex::from_maximal(vertices, facets)?)
}

/// The Davis realization: vertices are the spherical residues, simplices the
/// ascending chains of nested spherical residues.
pub fn davis_realization(building: &Building) -> Result<SimplicialComplex, RealizationError> {
    let spherical = building.system().spherical_subsets();
    let mut residues: BTreeSet<Residue> = BTreeSet::new();
    for chamber in building.chambers() {
        for subset in &spherical {
            let residue = building.residue_key(chamber, subset)?;
            if residue_is_complete(building, &residue) {
                residues.insert(residue);
            }
        }
    }
    let residues: Vec<Residue> = residues.into_iter().collect();
    let n = residues.len();
    let labels: Vec<String> = residues
        .iter()
        .map(|r| {
            let colors: Vec<String> = r.colors.iter().map(|c| c.to_string()).collect();
            format!("J{}:{}", colors.join("."), r.chambers[0])
        })
        .collect();
    // Strict containment order on residues.
    let mut above: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in 0..n {
        for b in 0..n {
            if a != b
                && residues[a].colors.len() < residues[b].colors.len()
                && is_subset_generic(&residues[a].colors, &residues[b].colors)
                && is_subset_generic(&residues[a].chambers, &residues[b].chambers)
            {
                above[a].push(b);
            }
        }
    }
    // All chains, enumerated ascending.
    let mut facets: Vec<Vec<usize>> = Vec::new();
    fn chains(above: &[Vec<usize>], chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(chain.clone());
        let last = *chain.last().unwrap();
        for &next in &above[last] {
            chain.push(next);
            chains(above, chain, out);
            chain.pop();
        }
    }
    for start in 0..n {
        let mut chain = vec![start];
        chains(&above, &mut chain, &mut facets);
    }
    Ok(SimplicialComplex::from_maximal(labels, facets)?)
}

fn is_subset_generic<T: Ord>(small: &[T], big: &[T]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

/// A residue is complete when every member has a neighbor of every residue
/// color inside it. On truncated balls this drops residues cut by the
/// boundary, so the realization only reflects fully present residues.
fn residue_is_complete(building: &Building, residue: &Residue) -> bool {
    let members: BTreeSet<&str> = residue.chambers.iter().map(String::as_str).collect();
    residue.chambers.iter().all(|c| {
        residue.colors.iter().all(|&color| {
            building.edges().any(|(a, b, col)| {
                col == color
                    && ((a == c && members.contains(b)) || (b == c && members.contains(a)))
            })
        })
    })
}

/// The number of chambers opposite to `chamber`: those at Weyl distance the
/// longest element `w_0`. Requires finite `W`.
pub fn opposite_count(building: &Building, chamber: &str) -> Result<usize, RealizationError> {
    let w0 = building.system().longest_element().map_err(|e| match e {
        CoxeterError::InfiniteGroup => RealizationError::InfiniteW,
        other => RealizationError::Coxeter(other),
    })?;
    let mut count = 0;
    for other in building.chambers() {
        if building.weyl_distance(chamber, other)? == w0 {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{cayley_building, fano_incidence, flag_building_from_incidence};
    use crate::coxeter::{dihedral, CoxeterSystem, INFINITY};

    fn hexagon() -> Building {
        cayley_building(&dihedral(3), 0).unwrap()
    }

    fn fano() -> Building {
        flag_building_from_incidence(&fano_incidence()).unwrap().0
    }

    #[test]
    fn tits_of_hexagon_is_a_six_cycle() {
        let k = tits_realization(&hexagon()).unwrap();
        assert_eq!(k.vertices().len(), 6);
        assert_eq!(k.edges().len(), 6);
        assert_eq!(k.homology_ranks(1), vec![1, 1]);
    }

    #[test]
    fn tits_of_fano_is_the_incidence_graph() {
        let k = tits_realization(&fano()).unwrap();
        assert_eq!(k.vertices().len(), 14);
        assert_eq!(k.edges().len(), 21);
        assert_eq!(k.homology_ranks(1), vec![1, 8]);
    }

    #[test]
    fn tits_rank_one_degenerates_to_isolated_chamber_vertices() {
        let sys = CoxeterSystem::validate_matrix(vec![vec![1]]).unwrap();
        let b = Building::new(
            sys,
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ("a".into(), "b".into(), 0),
                ("a".into(), "c".into(), 0),
                ("b".into(), "c".into(), 0),
            ],
            None,
        )
        .unwrap();
        let k = tits_realization(&b).unwrap();
        assert_eq!(k.vertices().len(), 3);
        assert!(k.edges().is_empty());
    }

    #[test]
    fn tits_rejects_rank_zero() {
        let sys = CoxeterSystem::validate_matrix(vec![]).unwrap();
        let b = Building::new(sys, vec!["c".into()], vec![], None).unwrap();
        assert_eq!(tits_realization(&b).unwrap_err(), RealizationError::RankZero);
    }

    #[test]
    fn davis_of_hexagon_is_contractible_with_13_vertices() {
        let k = davis_realization(&hexagon()).unwrap();
        assert_eq!(k.vertices().len(), 13); // 6 chambers + 3 + 3 panels + whole building
        assert_eq!(k.homology_ranks(2), vec![1, 0, 0]);
    }

    #[test]
    fn davis_of_infinite_dihedral_ball_is_a_subdivided_path() {
        let b = cayley_building(&dihedral(INFINITY), 2).unwrap();
        let k = davis_realization(&b).unwrap();
        assert_eq!(k.vertices().len(), 9); // 5 chambers + 4 interior panels
        assert_eq!(k.edges().len(), 8);
        assert_eq!(k.homology_ranks(1), vec![1, 0]);
    }

    #[test]
    fn davis_of_single_panel_is_a_path() {
        let sys = CoxeterSystem::validate_matrix(vec![vec![1]]).unwrap();
        let b = Building::new(
            sys,
            vec!["a".into(), "b".into()],
            vec![("a".into(), "b".into(), 0)],
            None,
        )
        .unwrap();
        let k = davis_realization(&b).unwrap();
        assert_eq!(k.vertices().len(), 3);
        assert_eq!(k.edges().len(), 2);
    }

    #[test]
    fn homology_of_single_simplex_is_trivial() {
        let k = SimplicialComplex::from_maximal(
            (0..4).map(|v| format!("v{v}")).collect(),
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        assert_eq!(k.homology_ranks(3), vec![1, 0, 0, 0]);
    }

    #[test]
    fn homology_of_sphere_boundary() {
        // Boundary of a tetrahedron: a 2-sphere.
        let k = SimplicialComplex::from_maximal(
            (0..4).map(|v| format!("v{v}")).collect(),
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap();
        assert_eq!(k.homology_ranks(2), vec![1, 0, 1]);
    }

    #[test]
    fn opposite_counts() {
        assert_eq!(opposite_count(&hexagon(), "e").unwrap(), 1);
        let f = fano();
        let c = f.chambers()[0].clone();
        assert_eq!(opposite_count(&f, &c).unwrap(), 8);
        let inf = cayley_building(&dihedral(INFINITY), 2).unwrap();
        assert_eq!(
            opposite_count(&inf, "e").unwrap_err(),
            RealizationError::InfiniteW
        );
    }

    #[test]
    fn opposite_count_rank_one_panel() {
        let sys = CoxeterSystem::validate_matrix(vec![vec![1]]).unwrap();
        let b = Building::new(
            sys,
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ("a".into(), "b".into(), 0),
                ("a".into(), "c".into(), 0),
                ("b".into(), "c".into(), 0),
            ],
            None,
        )
        .unwrap();
        assert_eq!(opposite_count(&b, "a").unwrap(), 2);
    }

    #[test]
    fn complex_json_round_trip() {
        let k = tits_realization(&hexagon()).unwrap();
        let v = k.to_json();
        let back = SimplicialComplex::from_json(&v).unwrap();
        assert_eq!(back, k);
        assert!(k.to_off_text().starts_with("OFF\n6 6 0\n"));
    }
}
