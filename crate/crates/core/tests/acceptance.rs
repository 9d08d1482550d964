//! Acceptance suite: one test per criterion, each printing a pass line.
//! Oracles are independent of the library code under test (see common).

mod common;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use buildings::actions::{
    automorphism_group, is_strongly_transitive_max_atlas, is_weyl_transitive,
    properness_certificate, verify_action, ActionSpec,
};
use buildings::building::Building;
use buildings::constructions::{
    cayley_building, graph_product_building, FiniteGroupTable, GraphProductSpec,
};
use buildings::coxeter::{CoxeterSystem, Word};
use buildings::metric::{
    check_properness_lazy, ComplexPoint, HalfLine, InfiniteStar, MZeroComplex, Shape,
};
use buildings::realizations::{
    davis_realization, opposite_count, tits_realization, SimplicialComplex,
};

use common::{all_words, fano_building, singer_subgroup, CayleyOracle};

fn rank3_matrices(entries: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    out.push(vec![vec![1]]);
    for &m in entries {
        out.push(vec![vec![1, m], vec![m, 1]]);
    }
    for &a in entries {
        for &b in entries {
            for &c in entries {
                out.push(vec![vec![1, a, b], vec![a, 1, c], vec![b, c, 1]]);
            }
        }
    }
    out
}

#[test]
fn criterion_01_coxeter_oracle_equivalence() {
    for matrix in rank3_matrices(&[2, 3, 4, 0]) {
        let system = CoxeterSystem::validate_matrix(matrix.clone()).unwrap();
        let oracle = CayleyOracle::new(&matrix, 8);
        for word in all_words(matrix.len(), 8) {
            let m = oracle.word_matrix(&word);
            let expected_len = oracle.length[&m];
            let expected_nf = &oracle.normal_form[&m];
            let reduced = system.reduce(&Word(word.clone())).unwrap();
            assert_eq!(
                system.length(&Word(word.clone())).unwrap(),
                expected_len,
                "length mismatch for {word:?} in {matrix:?}"
            );
            assert_eq!(&reduced.0, expected_nf, "normal form mismatch for {word:?} in {matrix:?}");
        }
    }
    println!("[acceptance 1] coxeter oracle equivalence: pass");
}

#[test]
fn criterion_02_finite_group_orders() {
    for m in 2..=7u32 {
        let sys = CoxeterSystem::validate_matrix(vec![vec![1, m], vec![m, 1]]).unwrap();
        assert_eq!(sys.enumerate_all().unwrap().len(), 2 * m as usize);
    }
    let orders = [
        (vec![vec![1, 3, 2], vec![3, 1, 3], vec![2, 3, 1]], 24),  // A3
        (vec![vec![1, 4, 2], vec![4, 1, 3], vec![2, 3, 1]], 48),  // B3
        (vec![vec![1, 5, 2], vec![5, 1, 3], vec![2, 3, 1]], 120), // H3
    ];
    for (matrix, order) in orders {
        let sys = CoxeterSystem::validate_matrix(matrix).unwrap();
        assert_eq!(sys.enumerate_all().unwrap().len(), order);
    }
    println!("[acceptance 2] finite group orders: pass");
}

fn mutations(building: &Building, count: usize) -> Vec<serde_json::Value> {
    let base = building.to_json();
    let edges: Vec<serde_json::Value> = base["edges"].as_array().unwrap().clone();
    let chambers: Vec<String> = base["chambers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect();
    let rank = base["coxeter"]["rank"].as_u64().unwrap() as u64;
    let mut out = Vec::new();
    // Deletions.
    for k in 0..edges.len().min(count / 3) {
        let mut v = base.clone();
        v["edges"].as_array_mut().unwrap().remove(k);
        out.push(v);
    }
    // Recolorings.
    for k in 0..edges.len().min(count / 3) {
        let mut v = base.clone();
        let edge = &mut v["edges"][k];
        let color = edge[2].as_u64().unwrap();
        edge[2] = serde_json::json!((color + 1) % rank);
        out.push(v);
    }
    // Additions between non-adjacent chamber pairs.
    let adjacent: HashSet<(String, String)> = building
        .edges()
        .flat_map(|(a, b, _)| {
            [(a.to_string(), b.to_string()), (b.to_string(), a.to_string())]
        })
        .collect();
    'outer: for a in 0..chambers.len() {
        for b in a + 1..chambers.len() {
            if out.len() >= count {
                break 'outer;
            }
            if !adjacent.contains(&(chambers[a].clone(), chambers[b].clone())) {
                let mut v = base.clone();
                v["edges"]
                    .as_array_mut()
                    .unwrap()
                    .push(serde_json::json!([chambers[a], chambers[b], 0]));
                out.push(v);
            }
        }
    }
    assert_eq!(out.len(), count);
    out
}

#[test]
fn criterion_03_building_axioms() {
    // (a) Cayley buildings of every finite system of rank <= 3.
    for matrix in rank3_matrices(&[2, 3, 4, 5]) {
        let system = CoxeterSystem::validate_matrix(matrix).unwrap();
        if !system.is_finite() {
            continue;
        }
        let b = cayley_building(&system, 0).unwrap();
        assert!(b.verify_axioms(None).is_empty());
    }
    // (b) The Fano flag building.
    let fano = fano_building();
    assert!(fano.verify_axioms(None).is_empty());
    // (c) Graph products, |G_i| <= 4, |I| <= 3, radius <= 3, interior only.
    let orders = [2usize, 3, 4];
    for &a in &orders {
        let spec = GraphProductSpec {
            groups: vec![FiniteGroupTable::cyclic(a)],
            gamma_edges: vec![],
        };
        let b = graph_product_building(&spec, 3).unwrap();
        assert!(b.verify_axioms(None).is_empty(), "rank-1 product of order {a}");
    }
    for &a in &orders {
        for &b in &orders {
            for edges in [vec![], vec![(0, 1)]] {
                let spec = GraphProductSpec {
                    groups: vec![FiniteGroupTable::cyclic(a), FiniteGroupTable::cyclic(b)],
                    gamma_edges: edges.clone(),
                };
                let building = graph_product_building(&spec, 3).unwrap();
                let report = building.verify_axioms(None);
                assert!(report.is_empty(), "orders ({a},{b}), edges {edges:?}: {report:?}");
            }
        }
    }
    let rank3_graphs: [&[(usize, usize)]; 4] =
        [&[], &[(0, 1)], &[(0, 1), (1, 2)], &[(0, 1), (1, 2), (0, 2)]];
    for &a in &orders {
        for &b in &orders {
            for &c in &orders {
                for gamma in rank3_graphs {
                    let radius = if a * b * c <= 27 { 3 } else { 2 };
                    let spec = GraphProductSpec {
                        groups: vec![
                            FiniteGroupTable::cyclic(a),
                            FiniteGroupTable::cyclic(b),
                            FiniteGroupTable::cyclic(c),
                        ],
                        gamma_edges: gamma.to_vec(),
                    };
                    let building = graph_product_building(&spec, radius).unwrap();
                    let report = building.verify_axioms(None);
                    assert!(
                        report.is_empty(),
                        "orders ({a},{b},{c}), gamma {gamma:?}: {report:?}"
                    );
                }
            }
        }
    }
    // Mutations: 20 single edits of the hexagon and the Fano building, each
    // must report a violation.
    let hexagon = cayley_building(
        &CoxeterSystem::validate_matrix(vec![vec![1, 3], vec![3, 1]]).unwrap(),
        0,
    )
    .unwrap();
    for (fixture, name) in [(&hexagon, "hexagon"), (&fano, "fano")] {
        for (k, mutated) in mutations(fixture, 10).into_iter().enumerate() {
            let broken = Building::from_json(&mutated).unwrap();
            let report = broken.verify_axioms(None);
            assert!(!report.is_empty(), "{name} mutation {k} passed verification");
        }
    }
    println!("[acceptance 3] building axioms: pass");
}

fn chamber_word(id: &str) -> Word {
    if id == "e" {
        Word(Vec::new())
    } else {
        Word(id.split('.').map(|s| s.parse().unwrap()).collect())
    }
}

#[test]
fn criterion_04_delta_correctness() {
    // Thin buildings: delta(a, b) = a^{-1} b exhaustively.
    let matrices = vec![
        vec![vec![1, 2], vec![2, 1]],
        vec![vec![1, 3], vec![3, 1]],
        vec![vec![1, 4], vec![4, 1]],
        vec![vec![1, 5], vec![5, 1]],
        vec![vec![1, 3, 2], vec![3, 1, 3], vec![2, 3, 1]],
    ];
    for matrix in matrices {
        let system = CoxeterSystem::validate_matrix(matrix).unwrap();
        let b = cayley_building(&system, 0).unwrap();
        for a in b.chambers() {
            for c in b.chambers() {
                let expected = system
                    .multiply(&system.inverse(&chamber_word(a)).unwrap(), &chamber_word(c))
                    .unwrap();
                assert_eq!(b.weyl_distance(a, c).unwrap(), expected);
            }
        }
    }
    // Fano: l(delta(a, b)) equals an independently computed graph distance.
    let fano = fano_building();
    let index: HashMap<&str, usize> =
        fano.chambers().iter().enumerate().map(|(k, c)| (c.as_str(), k)).collect();
    let mut adj = vec![Vec::new(); fano.chamber_count()];
    for (a, b, _) in fano.edges() {
        adj[index[a]].push(index[b]);
        adj[index[b]].push(index[a]);
    }
    for (start, a) in fano.chambers().iter().enumerate() {
        let mut dist = vec![usize::MAX; adj.len()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for &n in &adj[c] {
                if dist[n] == usize::MAX {
                    dist[n] = dist[c] + 1;
                    queue.push_back(n);
                }
            }
        }
        for (end, c) in fano.chambers().iter().enumerate() {
            assert_eq!(fano.weyl_distance(a, c).unwrap().0.len(), dist[end]);
        }
    }
    println!("[acceptance 4] delta correctness: pass");
}

#[test]
fn criterion_05_solomon_tits() {
    let hexagon = cayley_building(
        &CoxeterSystem::validate_matrix(vec![vec![1, 3], vec![3, 1]]).unwrap(),
        0,
    )
    .unwrap();
    assert_eq!(tits_realization(&hexagon).unwrap().homology_ranks(1), vec![1, 1]);
    let fano = fano_building();
    assert_eq!(tits_realization(&fano).unwrap().homology_ranks(1), vec![1, 8]);
    for chamber in fano.chambers() {
        assert_eq!(opposite_count(&fano, chamber).unwrap(), 8);
    }
    println!("[acceptance 5] solomon-tits betti numbers: pass");
}

#[test]
fn criterion_06_davis_realization() {
    let hexagon = cayley_building(
        &CoxeterSystem::validate_matrix(vec![vec![1, 3], vec![3, 1]]).unwrap(),
        0,
    )
    .unwrap();
    let davis = davis_realization(&hexagon).unwrap();
    assert_eq!(davis.vertices().len(), 13); // 6 + 3 + 3 + 1
    assert_eq!(davis.homology_ranks(1), vec![1, 0]);
    println!("[acceptance 6] davis realization: pass");
}

#[test]
fn criterion_07_fano_apartments() {
    let fano = fano_building();
    let apartments = fano.enumerate_apartments().unwrap();
    assert_eq!(apartments.len(), 28);
    let index: HashMap<&str, usize> =
        fano.chambers().iter().enumerate().map(|(k, c)| (c.as_str(), k)).collect();
    for apartment in &apartments {
        assert_eq!(apartment.chambers.len(), 6);
        // Color-isomorphic to the hexagon: inside the apartment every chamber
        // has exactly one neighbor of each color, and the graph is connected.
        let members: BTreeSet<usize> =
            apartment.chambers.iter().map(|c| index[c.as_str()]).collect();
        let mut degree: HashMap<(usize, u8), usize> = HashMap::new();
        let mut internal_edges = Vec::new();
        for (a, b, color) in fano.edges() {
            let (ia, ib) = (index[a], index[b]);
            if members.contains(&ia) && members.contains(&ib) {
                *degree.entry((ia, color)).or_insert(0) += 1;
                *degree.entry((ib, color)).or_insert(0) += 1;
                internal_edges.push((ia, ib));
            }
        }
        for &c in &members {
            for color in 0..2u8 {
                assert_eq!(degree.get(&(c, color)), Some(&1));
            }
        }
        let mut reached = BTreeSet::from([*members.iter().next().unwrap()]);
        let mut queue: VecDeque<usize> = reached.iter().copied().collect();
        while let Some(c) = queue.pop_front() {
            for &(a, b) in &internal_edges {
                let other = if a == c { b } else if b == c { a } else { continue };
                if reached.insert(other) {
                    queue.push_back(other);
                }
            }
        }
        assert_eq!(reached, members);
    }
    // Every chamber pair lies in at least one apartment.
    for a in fano.chambers() {
        for b in fano.chambers() {
            assert!(apartments
                .iter()
                .any(|ap| ap.chambers.contains(a) && ap.chambers.contains(b)));
        }
    }
    println!("[acceptance 7] fano apartments: pass");
}

#[test]
fn criterion_08_transitivity() {
    let fano = fano_building();
    let aut = automorphism_group(&fano).unwrap();
    assert_eq!(aut.order_hint, Some(168));
    assert!(is_weyl_transitive(&fano, &aut).unwrap().transitive);
    assert!(is_strongly_transitive_max_atlas(&fano, &aut).unwrap().transitive);
    // Order-21 Singer subgroup: chamber-transitive but not Weyl-transitive.
    let singer = ActionSpec { generators: singer_subgroup(&fano), order_hint: None };
    assert!(verify_action(&fano, &singer).unwrap());
    let order = {
        let n = fano.chamber_count();
        let id: Vec<usize> = (0..n).collect();
        let mut elements = HashSet::from([id.clone()]);
        let mut frontier = vec![id];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for g in &frontier {
                for gen in &singer.generators {
                    let prod: Vec<usize> = g.iter().map(|&x| gen[x]).collect();
                    if elements.insert(prod.clone()) {
                        next.push(prod);
                    }
                }
            }
            frontier = next;
        }
        elements.len()
    };
    assert_eq!(order, 21);
    let chamber_orbit = {
        let mut orbit = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for gen in &singer.generators {
                if orbit.insert(gen[c]) {
                    queue.push_back(gen[c]);
                }
            }
        }
        orbit.len()
    };
    assert_eq!(chamber_orbit, 21); // chamber-transitive
    let report = is_weyl_transitive(&fano, &singer).unwrap();
    assert!(!report.transitive);
    // The longest-element pair class has 21 * 8 = 168 pairs, more than |G|.
    let w0_class = report.classes.iter().max_by_key(|c| c.label.len()).unwrap();
    assert_eq!(w0_class.set_size, 168);
    assert!(w0_class.orbit_sizes.len() > 1);
    println!("[acceptance 8] transitivity verdicts: pass");
}

#[test]
fn criterion_09_metric_closed_forms() {
    let labels: Vec<String> = (0..4).map(|v| format!("v{v}")).collect();
    // Unit square split along a diagonal.
    let complex = SimplicialComplex::from_maximal(
        labels.clone(),
        vec![vec![0, 1, 2], vec![1, 2, 3]],
    )
    .unwrap();
    let s = 2.0f64.sqrt();
    let right_triangle = Shape::new(vec![
        vec![0.0, 1.0, 1.0],
        vec![1.0, 0.0, s],
        vec![1.0, s, 0.0],
    ])
    .unwrap();
    let square = MZeroComplex::new(
        complex.clone(),
        vec![right_triangle],
        vec![(vec![0, 1, 2], 0, vec![0, 1, 2]), (vec![1, 2, 3], 0, vec![1, 2, 0])],
    )
    .unwrap();
    let d = square
        .intrinsic_distance(&ComplexPoint::vertex(0), &ComplexPoint::vertex(3), 1e-9)
        .unwrap();
    assert!((d - 2.0f64.sqrt()).abs() < 1e-6, "square diagonal: {d}");
    // Two glued unit equilateral triangles.
    let rhombus = MZeroComplex::regular(complex, 1.0).unwrap();
    let d = rhombus
        .intrinsic_distance(&ComplexPoint::vertex(0), &ComplexPoint::vertex(3), 1e-9)
        .unwrap();
    assert!((d - 3.0f64.sqrt()).abs() < 1e-6, "rhombus diagonal: {d}");
    let triangle = MZeroComplex::regular(
        SimplicialComplex::from_maximal(labels[..3].to_vec(), vec![vec![0, 1, 2]]).unwrap(),
        1.0,
    )
    .unwrap();
    assert!((triangle.vertex_separation() - 3.0f64.sqrt() / 2.0).abs() < 1e-12);
    println!("[acceptance 9] metric closed forms: pass");
}

#[test]
fn criterion_10_properness_dichotomy() {
    let star = check_properness_lazy(&InfiniteStar, "c", 1.0, 100);
    assert!(!star.locally_finite);
    assert!(star.partial && star.ball_truncated);
    assert_eq!(star.ball_facets.len(), 100); // grows with the declared bound
    let line = check_properness_lazy(&HalfLine, "v0", 2.5, 100);
    assert!(line.locally_finite && !line.partial);
    assert_eq!(line.ball_facets.len(), 3);
    // Finite fixtures are proper with an explicit finite ball subcomplex.
    let hexagon = cayley_building(
        &CoxeterSystem::validate_matrix(vec![vec![1, 3], vec![3, 1]]).unwrap(),
        0,
    )
    .unwrap();
    let davis = davis_realization(&hexagon).unwrap();
    let facet_count = davis.facets().len();
    let mc = MZeroComplex::regular(davis, 1.0).unwrap();
    let report = mc.check_properness(0, 100.0).unwrap();
    assert!(report.locally_finite && !report.partial && !report.ball_truncated);
    assert_eq!(report.ball_facets.len(), facet_count);
    println!("[acceptance 10] properness dichotomy: pass");
}

#[test]
fn criterion_11_properness_certificates() {
    let fano = fano_building();
    let aut = automorphism_group(&fano).unwrap();
    let chamber = fano.chambers()[0].clone();
    let cert = properness_certificate(
        &fano,
        &aut,
        &[chamber.clone()],
        &[chamber.clone()],
        200,
    )
    .unwrap();
    assert!(cert.closed);
    assert_eq!(cert.elements.len(), 8);
    // Orbit-stabilizer: the orbit of the base chamber is everything.
    let orbit = {
        let mut orbit = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for gen in &aut.generators {
                if orbit.insert(gen[c]) {
                    queue.push_back(gen[c]);
                }
            }
        }
        orbit.len()
    };
    assert_eq!(orbit * cert.elements.len(), 168);
    println!("[acceptance 11] properness certificates: pass");
}
