//! Generators for buildings: Cayley graphs of Coxeter systems, graph-product
//! (right-angled) buildings, and flag buildings from incidence geometries.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::building::{AxiomReport, BallInfo, Building, BuildingError};
use crate::coxeter::{CoxeterSystem, Word, INFINITY};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("bad group table: {0}")]
    BadGroupTable(String),
    #[error("vertex group {0} is trivial")]
    TrivialVertexGroup(usize),
    #[error("bad graph product spec: {0}")]
    BadSpec(String),
    #[error("incidence structure is not a building: {0}")]
    NotABuilding(String),
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error(transparent)]
    Coxeter(#[from] crate::coxeter::CoxeterError),
}

/// A finite group given by its full multiplication table; the identity is
/// element 0. Associativity, identity and inverses are checked on load.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroupTable {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl FiniteGroupTable {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self, ConstructionError> {
        let order = table.len();
        let bad = |msg: String| Err(ConstructionError::BadGroupTable(msg));
        if order == 0 {
            return bad("empty table".into());
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != order {
                return bad(format!("row {g} has length {} != {order}", row.len()));
            }
            for &v in row {
                if v >= order {
                    return bad(format!("entry {v} out of range in row {g}"));
                }
            }
        }
        for g in 0..order {
            if table[0][g] != g || table[g][0] != g {
                return bad(format!("element 0 is not the identity at {g}"));
            }
            if !table[g].contains(&0) {
                return bad(format!("element {g} has no inverse"));
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("associativity fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(FiniteGroupTable { order, table })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroupTable::new(table).unwrap()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.table[a].iter().position(|&v| v == 0).unwrap()
    }
}

/// Vertex groups indexed by colors, plus the commutation graph on the colors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphProductSpec {
    pub groups: Vec<FiniteGroupTable>,
    pub gamma_edges: Vec<(usize, usize)>,
}

impl GraphProductSpec {
    pub fn validate(&self) -> Result<(), ConstructionError> {
        for (i, g) in self.groups.iter().enumerate() {
            if g.order < 2 {
                return Err(ConstructionError::TrivialVertexGroup(i));
            }
        }
        for &(i, j) in &self.gamma_edges {
            if i == j || i >= self.groups.len() || j >= self.groups.len() {
                return Err(ConstructionError::BadSpec(format!("bad gamma edge ({i}, {j})")));
            }
        }
        Ok(())
    }

    fn commute(&self, i: u8, j: u8) -> bool {
        let (i, j) = (i as usize, j as usize);
        self.gamma_edges.iter().any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i))
    }

    /// The Coxeter matrix of the associated right-angled building:
    /// `m_{i,j} = 2` on commutation edges and infinity otherwise.
    pub fn derived_coxeter_system(&self) -> Result<CoxeterSystem, ConstructionError> {
        let n = self.groups.len();
        let m: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            1
                        } else if self.commute(i as u8, j as u8) {
                            2
                        } else {
                            INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(CoxeterSystem::validate_matrix(m)?)
    }

    pub fn is_finite(&self) -> bool {
        let n = self.groups.len();
        (0..n as u8).all(|i| (0..i).all(|j| self.commute(i, j)))
    }
}

/// An element of the graph product in syllable normal form.
type Syllables = Vec<(u8, usize)>;

/// Rewrites a syllable word to its normal form: merge or cancel same-color
/// syllables separated by commuting blocks, then emit the lexicographically
/// least representative of the trace-equivalence class. Adjacent-swap
/// bubbling alone is not confluent, so the least representative is built by
/// repeatedly extracting the least-colored movable syllable.
fn normalize(spec: &GraphProductSpec, mut w: Syllables) -> Syllables {
    'merge: loop {
        for p in 0..w.len() {
            let (i, g) = w[p];
            let mut q = p + 1;
            while q < w.len() {
                let j = w[q].0;
                if j == i {
                    let prod = spec.groups[i as usize].mul(g, w[q].1);
                    w.remove(q);
                    if prod == 0 {
                        w.remove(p);
                    } else {
                        w[p].1 = prod;
                    }
                    continue 'merge;
                }
                if !spec.commute(i, j) {
                    break;
                }
                q += 1;
            }
        }
        break;
    }
    // A syllable is movable to the front when all its predecessors commute
    // with it; two movable syllables never share a color after merging.
    let mut out = Vec::with_capacity(w.len());
    while !w.is_empty() {
        let mut best: Option<usize> = None;
        'candidate: for p in 0..w.len() {
            for q in 0..p {
                if !spec.commute(w[p].0, w[q].0) {
                    continue 'candidate;
                }
            }
            if best.map_or(true, |b| w[p].0 < w[b].0) {
                best = Some(p);
            }
        }
        out.push(w.remove(best.expect("the first syllable is always movable")));
    }
    out
}

fn syllable_id(w: &Syllables) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    w.iter()
        .map(|(i, g)| format!("{i}.{g}"))
        .collect::<Vec<_>>()
        .join("-")
}

/// The right-angled building of a graph product: chambers are syllable normal
/// forms within `radius` gallery steps of the identity, `a` and `b` are
/// `i`-adjacent when `a^{-1} b` is a nonidentity element of `G_i`.
pub fn graph_product_building(
    spec: &GraphProductSpec,
    radius: u32,
) -> Result<Building, ConstructionError> {
    spec.validate()?;
    let system = spec.derived_coxeter_system()?;
    let finite = spec.is_finite();
    let mut level: Vec<Syllables> = vec![Vec::new()];
    let mut seen: BTreeSet<Syllables> = level.iter().cloned().collect();
    let mut depth = 0u32;
    while finite || depth < radius {
        let mut next = BTreeSet::new();
        for w in &level {
            for (i, group) in spec.groups.iter().enumerate() {
                for g in 1..group.order {
                    let mut c = w.clone();
                    c.push((i as u8, g));
                    let nf = normalize(spec, c);
                    if nf.len() == w.len() + 1 && !seen.contains(&nf) {
                        next.insert(nf);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        seen.extend(next.iter().cloned());
        level = next.into_iter().collect();
        depth += 1;
    }
    let chambers: BTreeMap<String, Syllables> =
        seen.into_iter().map(|w| (syllable_id(&w), w)).collect();
    let mut edges = Vec::new();
    for (id, w) in &chambers {
        for (i, group) in spec.groups.iter().enumerate() {
            for g in 1..group.order {
                let mut c = w.clone();
                c.push((i as u8, g));
                let nf = normalize(spec, c);
                let nid = syllable_id(&nf);
                if nid > *id && chambers.contains_key(&nid) {
                    edges.push((id.clone(), nid, i as u8));
                }
            }
        }
    }
    let ball = (!finite).then(|| BallInfo { radius, center: "e".to_string() });
    Ok(Building::new(system, chambers.into_keys().collect(), edges, ball)?)
}

/// The Cayley building of a Coxeter system: thin, with chambers the ShortLex
/// normal forms and `t({w, wi}) = i`. Full when `W` is finite, a
/// radius-bounded ball around the identity otherwise.
pub fn cayley_building(system: &CoxeterSystem, radius: u32) -> Result<Building, BuildingError> {
    let finite = system.is_finite();
    let elements = if finite {
        system.enumerate_all()?
    } else {
        system.enumerate_elements(radius as usize)
    };
    let ids: HashMap<&Word, String> =
        elements.iter().map(|w| (w, w.to_string())).collect();
    let chamber_set: BTreeSet<&str> = ids.values().map(String::as_str).collect();
    let mut edges = Vec::new();
    for w in &elements {
        for i in 0..system.rank() as u8 {
            let n = system.multiply(w, &Word(vec![i]))?;
            let nid = n.to_string();
            if chamber_set.contains(nid.as_str()) && ids[w] < nid {
                edges.push((ids[w].clone(), nid, i));
            }
        }
    }
    let ball = (!finite).then(|| BallInfo { radius, center: "e".to_string() });
    Building::new(system.clone(), ids.into_values().collect(), edges, ball)
}

/// An incidence structure: lines are sets of point indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IncidenceSpec {
    pub points: Vec<String>,
    pub lines: Vec<Vec<usize>>,
}

/// The flag building of an incidence structure: chambers are flags `(p, l)`
/// with `p` on `l`; color 0 joins flags sharing a line, color 1 flags sharing
/// a point. The result is returned only if it verifies as a building of type
/// `I2(3)` (a generalized triangle).
pub fn flag_building_from_incidence(
    spec: &IncidenceSpec,
) -> Result<(Building, AxiomReport), ConstructionError> {
    for (l, line) in spec.lines.iter().enumerate() {
        for &p in line {
            if p >= spec.points.len() {
                return Err(ConstructionError::BadSpec(format!(
                    "line {l} references unknown point {p}"
                )));
            }
        }
    }
    let system = CoxeterSystem::validate_matrix(vec![vec![1, 3], vec![3, 1]])?;
    let mut chambers = Vec::new();
    let mut flags = Vec::new();
    for (l, line) in spec.lines.iter().enumerate() {
        for &p in line {
            chambers.push(flag_id(&spec.points[p], l));
            flags.push((p, l));
        }
    }
    let mut edges = Vec::new();
    for (a, &(pa, la)) in flags.iter().enumerate() {
        for (b, &(pb, lb)) in flags.iter().enumerate().skip(a + 1) {
            if la == lb && pa != pb {
                edges.push((chambers[a].clone(), chambers[b].clone(), 0));
            } else if pa == pb && la != lb {
                edges.push((chambers[a].clone(), chambers[b].clone(), 1));
            }
        }
    }
    let building = Building::new(system, chambers, edges, None)?;
    let report = building.verify_axioms(None);
    if !report.is_empty() {
        return Err(ConstructionError::NotABuilding(
            report
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    Ok((building, report))
}

fn flag_id(point: &str, line: usize) -> String {
    format!("{point}|L{line}")
}

/// The Fano plane PG(2, 2) as lines of the difference set {1, 2, 4} mod 7.
pub fn fano_incidence() -> IncidenceSpec {
    IncidenceSpec {
        points: (0..7).map(|p| format!("p{p}")).collect(),
        lines: (0..7).map(|i| vec![(i + 1) % 7, (i + 2) % 7, (i + 4) % 7]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::dihedral;

    #[test]
    fn cayley_hexagon() {
        let b = cayley_building(&dihedral(3), 0).unwrap();
        assert_eq!(b.chamber_count(), 6);
        assert!(b.is_thin());
        assert!(b.verify_axioms(None).is_empty());
    }

    #[test]
    fn cayley_infinite_dihedral_ball_is_a_path() {
        let b = cayley_building(&dihedral(INFINITY), 2).unwrap();
        assert_eq!(b.chamber_count(), 5);
        assert_eq!(b.edges().count(), 4);
        assert!(b.verify_axioms(None).is_empty());
    }

    #[test]
    fn cayley_rank_one() {
        let sys = CoxeterSystem::validate_matrix(vec![vec![1]]).unwrap();
        let b = cayley_building(&sys, 0).unwrap();
        assert_eq!(b.chamber_count(), 2);
        assert_eq!(b.edges().count(), 1);
    }

    #[test]
    fn group_table_validation() {
        assert!(FiniteGroupTable::new(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(FiniteGroupTable::new(vec![vec![1, 0], vec![0, 1]]).is_err());
        assert!(FiniteGroupTable::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        let z3 = FiniteGroupTable::cyclic(3);
        assert_eq!(z3.inv(1), 2);
    }

    #[test]
    fn graph_product_z2_z2_commuting_is_a_square() {
        let spec = GraphProductSpec {
            groups: vec![FiniteGroupTable::cyclic(2), FiniteGroupTable::cyclic(2)],
            gamma_edges: vec![(0, 1)],
        };
        let b = graph_product_building(&spec, 5).unwrap();
        assert_eq!(b.chamber_count(), 4);
        assert_eq!(b.edges().count(), 4);
        assert!(b.ball_info().is_none());
        assert!(b.is_thin());
        assert!(b.verify_axioms(None).is_empty());
        assert_eq!(
            spec.derived_coxeter_system().unwrap().matrix().raw(),
            &vec![vec![1, 2], vec![2, 1]]
        );
    }

    #[test]
    fn free_product_z3_z3_ball_counts() {
        let spec = GraphProductSpec {
            groups: vec![FiniteGroupTable::cyclic(3), FiniteGroupTable::cyclic(3)],
            gamma_edges: vec![],
        };
        let b = graph_product_building(&spec, 2).unwrap();
        assert_eq!(b.chamber_count(), 13); // 1 + 4 + 8
        assert!(b.ball_info().is_some());
        assert!(b.verify_axioms(None).is_empty());
    }

    #[test]
    fn rank_one_graph_product_is_a_panel() {
        let spec = GraphProductSpec {
            groups: vec![FiniteGroupTable::cyclic(2)],
            gamma_edges: vec![],
        };
        let b = graph_product_building(&spec, 3).unwrap();
        assert_eq!(b.chamber_count(), 2);
        assert_eq!(b.edges().count(), 1);
    }

    #[test]
    fn trivial_vertex_group_is_rejected() {
        let spec = GraphProductSpec {
            groups: vec![FiniteGroupTable::cyclic(1)],
            gamma_edges: vec![],
        };
        assert!(matches!(
            graph_product_building(&spec, 1),
            Err(ConstructionError::TrivialVertexGroup(0))
        ));
    }

    #[test]
    fn fano_flag_building() {
        let (b, report) = flag_building_from_incidence(&fano_incidence()).unwrap();
        assert!(report.is_empty());
        assert_eq!(b.chamber_count(), 21);
        assert!(b.is_thick());
        assert!(b.panels().iter().all(|p| p.chambers.len() == 3));
    }

    #[test]
    fn degenerate_triangle_gives_thin_hexagon() {
        let spec = IncidenceSpec {
            points: vec!["a".into(), "b".into(), "c".into()],
            lines: vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        };
        let (b, _) = flag_building_from_incidence(&spec).unwrap();
        assert_eq!(b.chamber_count(), 6);
        assert!(b.is_thin());
    }

    #[test]
    fn deficient_incidence_is_rejected() {
        let spec = IncidenceSpec {
            points: vec!["a".into(), "b".into(), "c".into()],
            lines: vec![vec![0, 1], vec![1, 2]],
        };
        assert!(matches!(
            flag_building_from_incidence(&spec),
            Err(ConstructionError::NotABuilding(_))
        ));
    }
}
