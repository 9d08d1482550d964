//! Group actions on buildings by color-preserving automorphisms: action
//! verification, automorphism-group search, Weyl- and strong-transitivity
//! decisions, and depth-bounded properness and discreteness certificates.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::building::{Building, BuildingError};

/// A chamber permutation in serialization (sorted chamber) order:
/// `perm[a]` is the index of the image of chamber `a`.
pub type Perm = Vec<usize>;

#[derive(Debug, Error)]
pub enum ActionError {
    #[error("generator {0} is not a permutation of the chambers")]
    NotAPermutation(usize),
    #[error("the Weyl group is infinite; apartments are not enumerable")]
    InfiniteW,
    #[error(transparent)]
    Building(#[from] BuildingError),
}

/// An action given by generating chamber permutations.
#[derive(Clone, Debug)]
pub struct ActionSpec {
    pub generators: Vec<Perm>,
    pub order_hint: Option<u64>,
}

/// Orbit partition of a transitivity check. One class per Weyl-distance
/// value for Weyl transitivity, a single `flags` class for strong
/// transitivity.
#[derive(Clone, Debug)]
pub struct OrbitClass {
    pub label: String,
    pub set_size: usize,
    pub orbit_sizes: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub transitive: bool,
    pub classes: Vec<OrbitClass>,
}

/// Result of a depth-bounded group enumeration. `closed` means the BFS over
/// words in the generators produced no new elements at the last frontier, so
/// the element list is the whole group.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub elements: Vec<Perm>,
    pub depth: usize,
    pub closed: bool,
}

fn check_permutation(n: usize, perm: &Perm, index: usize) -> Result<(), ActionError> {
    if perm.len() != n {
        return Err(ActionError::NotAPermutation(index));
    }
    let mut seen = vec![false; n];
    for &image in perm {
        if image >= n || seen[image] {
            return Err(ActionError::NotAPermutation(index));
        }
        seen[image] = true;
    }
    Ok(())
}

fn preserves_colored_edges(building: &Building, perm: &Perm) -> Result<bool, ActionError> {
    for (a, b, color) in building.edges() {
        let ia = building.chamber_index(a)?;
        let ib = building.chamber_index(b)?;
        let (ja, jb) = (perm[ia], perm[ib]);
        let image_exists = building.edges().any(|(u, v, c)| {
            c == color && {
                let iu = building.chamber_index(u).unwrap();
                let iv = building.chamber_index(v).unwrap();
                (iu == ja && iv == jb) || (iu == jb && iv == ja)
            }
        });
        if !image_exists {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff every generator is a coloring-preserving graph automorphism.
/// Delta-invariance follows and is not re-checked here.
pub fn verify_action(building: &Building, spec: &ActionSpec) -> Result<bool, ActionError> {
    let n = building.chamber_count();
    for (k, perm) in spec.generators.iter().enumerate() {
        check_permutation(n, perm, k)?;
        if !preserves_colored_edges(building, perm)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Adjacency as index pairs per color, for fast backtracking.
fn colored_adjacency(building: &Building) -> Vec<Vec<Vec<usize>>> {
    let n = building.chamber_count();
    let rank = building.system().rank();
    let mut adj = vec![vec![Vec::new(); n]; rank.max(1)];
    for (a, b, color) in building.edges() {
        let ia = building.chamber_index(a).unwrap();
        let ib = building.chamber_index(b).unwrap();
        adj[color as usize][ia].push(ib);
        adj[color as usize][ib].push(ia);
    }
    adj
}

/// The full color-preserving automorphism group of a finite building, as a
/// greedy generating set plus the exact order. Backtracking over chamber
/// images, pruned by Weyl-distance spectra and colored-edge consistency.
pub fn automorphism_group(building: &Building) -> Result<ActionSpec, ActionError> {
    let n = building.chamber_count();
    let adj = colored_adjacency(building);
    let rank = building.system().rank();
    // Invariant per chamber: the sorted multiset of Weyl distances to all
    // chambers. Preserved by every automorphism.
    let delta = building.delta_matrix()?;
    let spectrum: Vec<Vec<String>> = (0..n)
        .map(|a| {
            let mut row: Vec<String> = delta[a].iter().map(|w| w.to_string()).collect();
            row.sort();
            row
        })
        .collect();
    // Assignment order: BFS from chamber 0 so each chamber after the first
    // has an assigned neighbor.
    let order = {
        let mut order = vec![0usize];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for color in 0..rank {
                for &m in &adj[color][c] {
                    if !seen[m] {
                        seen[m] = true;
                        order.push(m);
                    }
                }
            }
        }
        for c in 0..n {
            if !seen[c] {
                order.push(c);
            }
        }
        order
    };
    let mut autos: Vec<Perm> = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        pos: usize,
        order: &[usize],
        adj: &[Vec<Vec<usize>>],
        spectrum: &[Vec<String>],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        autos: &mut Vec<Perm>,
    ) {
        if pos == order.len() {
            autos.push(image.clone());
            return;
        }
        let c = order[pos];
        let n = image.len();
        for d in 0..n {
            if used[d] || spectrum[c] != spectrum[d] {
                continue;
            }
            // Every assigned neighbor must map to a matching colored neighbor.
            let consistent = (0..adj.len()).all(|color| {
                adj[color][c].iter().all(|&m| {
                    image[m] == usize::MAX || adj[color][d].contains(&image[m])
                })
            });
            if !consistent {
                continue;
            }
            image[c] = d;
            used[d] = true;
            extend(pos + 1, order, adj, spectrum, image, used, autos);
            image[c] = usize::MAX;
            used[d] = false;
        }
    }
    extend(0, &order, &adj, &spectrum, &mut image, &mut used, &mut autos);
    // Edge-consistency at every step plus bijectivity makes each leaf a
    // colored-graph automorphism; keep a greedy generating subset.
    let total = autos.len() as u64;
    let mut generators: Vec<Perm> = Vec::new();
    let mut closure: HashSet<Perm> = HashSet::from([identity(n)]);
    for auto in autos {
        if !closure.contains(&auto) {
            generators.push(auto.clone());
            closure = close_group(n, &generators, None).0;
        }
    }
    debug_assert_eq!(closure.len() as u64, total);
    Ok(ActionSpec { generators, order_hint: Some(total) })
}

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

fn compose(g: &Perm, h: &Perm) -> Perm {
    h.iter().map(|&x| g[x]).collect()
}

/// Closure of the generators under composition, by BFS over word length.
/// With a depth bound, also reports whether the BFS closed.
fn close_group(n: usize, generators: &[Perm], depth: Option<usize>) -> (HashSet<Perm>, bool) {
    let mut elements: HashSet<Perm> = HashSet::from([identity(n)]);
    let mut frontier: Vec<Perm> = vec![identity(n)];
    let mut level = 0usize;
    loop {
        if let Some(bound) = depth {
            if level >= bound {
                // Closed only if one more level adds nothing.
                let closed = frontier.iter().all(|g| {
                    generators.iter().all(|gen| elements.contains(&compose(gen, g)))
                });
                return (elements, closed);
            }
        }
        let mut next = Vec::new();
        for g in &frontier {
            for gen in generators {
                let product = compose(gen, g);
                if elements.insert(product.clone()) {
                    next.push(product);
                }
            }
        }
        if next.is_empty() {
            return (elements, true);
        }
        frontier = next;
        level += 1;
    }
}

/// Orbit partition of `seeds` under the generator action given by `act`.
fn orbit_partition<T: Clone + Ord>(
    seeds: &[T],
    generators: &[Perm],
    act: impl Fn(&Perm, &T) -> T,
) -> Vec<Vec<T>> {
    let mut remaining: BTreeSet<T> = seeds.iter().cloned().collect();
    let mut orbits = Vec::new();
    while let Some(seed) = remaining.iter().next().cloned() {
        let mut orbit = BTreeSet::from([seed.clone()]);
        let mut queue = VecDeque::from([seed]);
        while let Some(item) = queue.pop_front() {
            for gen in generators {
                let moved = act(gen, &item);
                if orbit.insert(moved.clone()) {
                    queue.push_back(moved);
                }
            }
        }
        for item in &orbit {
            remaining.remove(item);
        }
        orbits.push(orbit.into_iter().collect());
    }
    orbits
}

/// Weyl transitivity: for each realized Weyl distance `w`, the pair set
/// `{(a,b) : delta(a,b) = w}` must be a single orbit.
pub fn is_weyl_transitive(
    building: &Building,
    spec: &ActionSpec,
) -> Result<OrbitReport, ActionError> {
    let n = building.chamber_count();
    let delta = building.delta_matrix()?;
    let mut by_delta: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            by_delta.entry(delta[a][b].to_string()).or_default().push((a, b));
        }
    }
    let mut classes = Vec::new();
    let mut transitive = true;
    for (label, pairs) in by_delta {
        let orbits = orbit_partition(&pairs, &spec.generators, |g, &(a, b)| (g[a], g[b]));
        if orbits.len() > 1 {
            transitive = false;
        }
        classes.push(OrbitClass {
            label,
            set_size: pairs.len(),
            orbit_sizes: orbits.iter().map(Vec::len).collect(),
        });
    }
    Ok(OrbitReport { transitive, classes })
}

/// Strong transitivity on the maximal atlas: single orbit on the flags
/// `(apartment, chamber of the apartment)`. Requires finite `W`.
pub fn is_strongly_transitive_max_atlas(
    building: &Building,
    spec: &ActionSpec,
) -> Result<OrbitReport, ActionError> {
    if !building.system().is_finite() {
        return Err(ActionError::InfiniteW);
    }
    let apartments = building.enumerate_apartments()?;
    let mut apartment_index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut flags: Vec<(usize, usize)> = Vec::new();
    for (k, apartment) in apartments.iter().enumerate() {
        let mut chambers: Vec<usize> = apartment
            .chambers
            .iter()
            .map(|c| building.chamber_index(c).unwrap())
            .collect();
        chambers.sort_unstable();
        for &c in &chambers {
            flags.push((k, c));
        }
        apartment_index.insert(chambers, k);
    }
    let act = |g: &Perm, &(a, c): &(usize, usize)| {
        let mut moved: Vec<usize> = apartments[a]
            .chambers
            .iter()
            .map(|ch| g[building.chamber_index(ch).unwrap()])
            .collect();
        moved.sort_unstable();
        let image = *apartment_index
            .get(&moved)
            .expect("automorphisms permute the maximal atlas");
        (image, g[c])
    };
    let orbits = orbit_partition(&flags, &spec.generators, act);
    let transitive = orbits.len() == 1;
    if transitive {
        // Strongly transitive implies Weyl-transitive; the converse is not
        // asserted.
        debug_assert!(is_weyl_transitive(building, spec)?.transitive);
    }
    Ok(OrbitReport {
        transitive,
        classes: vec![OrbitClass {
            label: "flags".to_string(),
            set_size: flags.len(),
            orbit_sizes: orbits.iter().map(Vec::len).collect(),
        }],
    })
}

/// All group elements of word length at most `depth` moving some chamber of
/// `b_set` into `c_set`. When the group BFS closes this is exactly
/// `G_{B,C}`, a finiteness certificate.
pub fn properness_certificate(
    building: &Building,
    spec: &ActionSpec,
    b_set: &[String],
    c_set: &[String],
    depth: usize,
) -> Result<Certificate, ActionError> {
    let n = building.chamber_count();
    for (k, perm) in spec.generators.iter().enumerate() {
        check_permutation(n, perm, k)?;
    }
    let b_idx: Vec<usize> = b_set
        .iter()
        .map(|c| building.chamber_index(c))
        .collect::<Result<_, _>>()?;
    let c_idx: BTreeSet<usize> = c_set
        .iter()
        .map(|c| building.chamber_index(c))
        .collect::<Result<_, _>>()?;
    let (elements, closed) = close_group(n, &spec.generators, Some(depth));
    let mut hits: Vec<Perm> = elements
        .into_iter()
        .filter(|g| b_idx.iter().any(|&b| c_idx.contains(&g[b])))
        .collect();
    hits.sort();
    Ok(Certificate { elements: hits, depth, closed })
}

/// Discreteness witness: true iff among the elements of word length at most
/// `depth`, only the identity permutation moves every listed chamber less
/// than `epsilon` in the gallery metric.
pub fn discreteness_witness(
    building: &Building,
    spec: &ActionSpec,
    points: &[String],
    epsilon: f64,
    depth: usize,
) -> Result<Certificate, ActionError> {
    let n = building.chamber_count();
    for (k, perm) in spec.generators.iter().enumerate() {
        check_permutation(n, perm, k)?;
    }
    let idx: Vec<usize> = points
        .iter()
        .map(|c| building.chamber_index(c))
        .collect::<Result<_, _>>()?;
    let (elements, closed) = close_group(n, &spec.generators, Some(depth));
    let id = identity(n);
    let mut violators: Vec<Perm> = elements
        .into_iter()
        .filter(|g| {
            *g != id
                && idx.iter().all(|&p| {
                    let moved = building
                        .chamber_distance(&building.chambers()[p], &building.chambers()[g[p]])
                        .unwrap_or(u32::MAX);
                    (moved as f64) < epsilon
                })
        })
        .collect();
    violators.sort();
    Ok(Certificate { elements: violators, depth, closed })
}

/// Left translation action of a finite Coxeter group on its Cayley building:
/// the generator `i` sends the chamber of `w` to the chamber of `s_i w`.
pub fn cayley_left_action(building: &Building) -> Result<ActionSpec, ActionError> {
    let system = building.system();
    let n = building.chamber_count();
    let mut generators = Vec::new();
    for i in 0..system.rank() as u8 {
        let mut perm = vec![0usize; n];
        for (a, chamber) in building.chambers().iter().enumerate() {
            let word = chamber_word(chamber);
            let mut left = vec![i];
            left.extend(&word);
            let image = system
                .reduce(&crate::coxeter::Word(left))
                .map_err(BuildingError::from)?
                .to_string();
            perm[a] = building.chamber_index(&image)?;
        }
        generators.push(perm);
    }
    Ok(ActionSpec { generators, order_hint: None })
}

fn chamber_word(id: &str) -> Vec<u8> {
    if id == "e" {
        Vec::new()
    } else {
        id.split('.').map(|s| s.parse().unwrap()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{cayley_building, fano_incidence, flag_building_from_incidence};
    use crate::coxeter::{dihedral, CoxeterSystem};

    fn hexagon() -> Building {
        cayley_building(&dihedral(3), 0).unwrap()
    }

    fn fano() -> Building {
        flag_building_from_incidence(&fano_incidence()).unwrap().0
    }

    fn four_cycle() -> Building {
        // A1 x A1 Cayley building: the 2-colored 4-cycle.
        let sys = CoxeterSystem::validate_matrix(vec![vec![1, 2], vec![2, 1]]).unwrap();
        cayley_building(&sys, 0).unwrap()
    }

    #[test]
    fn left_translation_is_an_action() {
        let b = hexagon();
        let spec = cayley_left_action(&b).unwrap();
        assert!(verify_action(&b, &spec).unwrap());
    }

    #[test]
    fn identity_only_action_verifies() {
        let b = hexagon();
        let spec = ActionSpec { generators: vec![identity(6)], order_hint: None };
        assert!(verify_action(&b, &spec).unwrap());
    }

    #[test]
    fn color_swap_of_four_cycle_is_rejected() {
        let b = four_cycle();
        // Chambers sorted: "0", "0.1", "1", "e". The graph symmetry swapping
        // "0" with "1" (and fixing "e", "0.1") maps 0-colored edges to
        // 1-colored ones.
        let swap: Perm = vec![2, 1, 0, 3];
        let spec = ActionSpec { generators: vec![swap], order_hint: None };
        assert!(!verify_action(&b, &spec).unwrap());
    }

    #[test]
    fn non_permutation_is_an_error() {
        let b = hexagon();
        let spec = ActionSpec { generators: vec![vec![0; 6]], order_hint: None };
        assert!(matches!(verify_action(&b, &spec), Err(ActionError::NotAPermutation(0))));
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(automorphism_group(&hexagon()).unwrap().order_hint, Some(6));
        assert_eq!(automorphism_group(&four_cycle()).unwrap().order_hint, Some(4));
    }

    #[test]
    fn fano_automorphism_order_is_168() {
        let spec = automorphism_group(&fano()).unwrap();
        assert_eq!(spec.order_hint, Some(168));
        assert!(verify_action(&fano(), &spec).unwrap());
    }

    #[test]
    fn cayley_action_is_weyl_and_strongly_transitive() {
        let b = hexagon();
        let spec = cayley_left_action(&b).unwrap();
        assert!(is_weyl_transitive(&b, &spec).unwrap().transitive);
        assert!(is_strongly_transitive_max_atlas(&b, &spec).unwrap().transitive);
    }

    #[test]
    fn trivial_group_is_not_strongly_transitive() {
        let b = hexagon();
        let spec = ActionSpec { generators: vec![identity(6)], order_hint: None };
        let report = is_strongly_transitive_max_atlas(&b, &spec).unwrap();
        assert!(!report.transitive);
        assert_eq!(report.classes[0].orbit_sizes.len(), 6);
    }

    #[test]
    fn hexagon_stabilizer_is_trivial() {
        let b = hexagon();
        let spec = cayley_left_action(&b).unwrap();
        let cert = properness_certificate(
            &b,
            &spec,
            &["e".to_string()],
            &["e".to_string()],
            10,
        )
        .unwrap();
        assert!(cert.closed);
        assert_eq!(cert.elements, vec![identity(6)]);
    }

    #[test]
    fn discreteness_on_hexagon() {
        let b = hexagon();
        let spec = cayley_left_action(&b).unwrap();
        let witness =
            discreteness_witness(&b, &spec, &["e".to_string()], 1.0, 10).unwrap();
        assert!(witness.closed && witness.elements.is_empty());
        let trivial = ActionSpec { generators: vec![], order_hint: None };
        let w2 = discreteness_witness(&b, &trivial, &["e".to_string()], 1.0, 0).unwrap();
        assert!(w2.closed && w2.elements.is_empty());
    }

    #[test]
    fn orbit_stabilizer_product() {
        let b = fano();
        let spec = automorphism_group(&b).unwrap();
        let chamber = b.chambers()[0].clone();
        let cert =
            properness_certificate(&b, &spec, &[chamber.clone()], &[chamber.clone()], 200)
                .unwrap();
        assert!(cert.closed);
        assert_eq!(cert.elements.len(), 8); // 168 / 21
        let orbits = orbit_partition(&[0usize], &spec.generators, |g, &c| g[c]);
        assert_eq!(orbits[0].len() * cert.elements.len(), 168);
    }
}
