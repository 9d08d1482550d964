//! Piecewise-euclidean structures on simplicial complexes: shapes given by
//! edge-length matrices, the intrinsic pseudometric via strings, vertex
//! separation, and properness checks driven by local finiteness.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::realizations::SimplicialComplex;

pub const DEFAULT_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 10_000;
const SUBDIVISIONS: [usize; 6] = [1, 2, 4, 8, 16, 32];
const GOLDEN_ITERS: usize = 80;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("facet {0:?} has no shape assignment")]
    UnassignedSimplex(Vec<usize>),
    #[error("edge ({0}, {1}) gets incompatible lengths {2} and {3}")]
    IncompatibleLengths(usize, usize, f64, f64),
    #[error("bad point: {0}")]
    BadPoint(String),
    #[error("consecutive string points lie in no common simplex")]
    NotInCommonSimplex,
    #[error("points lie in different connected components")]
    DisconnectedPoints,
    #[error("tolerance must be positive")]
    InvalidTolerance,
    #[error("iteration cap hit; best upper bound {best}")]
    ToleranceNotReached { best: f64 },
}

/// A euclidean geodesic simplex, described intrinsically by pairwise vertex
/// distances. Realizability is certified by nonnegative Cayley-Menger
/// volumes of every sub-simplex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Shape {
    pub dim: usize,
    pub edge_lengths: Vec<Vec<f64>>,
}

impl Shape {
    pub fn new(edge_lengths: Vec<Vec<f64>>) -> Result<Shape, MetricError> {
        let n = edge_lengths.len();
        if n == 0 {
            return Err(MetricError::BadShape("empty edge-length matrix".into()));
        }
        for (i, row) in edge_lengths.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::BadShape("edge-length matrix is not square".into()));
            }
            if row[i] != 0.0 {
                return Err(MetricError::BadShape("nonzero diagonal".into()));
            }
            for j in 0..n {
                if (edge_lengths[i][j] - edge_lengths[j][i]).abs() > 1e-12 {
                    return Err(MetricError::BadShape("asymmetric edge-length matrix".into()));
                }
                if i != j && !(edge_lengths[i][j] > 0.0) {
                    return Err(MetricError::BadShape("nonpositive edge length".into()));
                }
            }
        }
        let shape = Shape { dim: n - 1, edge_lengths };
        shape.check_realizable()?;
        Ok(shape)
    }

    /// The regular shape with all edges of the given length.
    pub fn regular(dim: usize, edge: f64) -> Shape {
        let n = dim + 1;
        let edge_lengths = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { edge }).collect())
            .collect();
        Shape { dim, edge_lengths }
    }

    fn check_realizable(&self) -> Result<(), MetricError> {
        let n = self.dim + 1;
        let scale: f64 = self
            .edge_lengths
            .iter()
            .flatten()
            .fold(1.0f64, |acc, &d| acc.max(d * d));
        for mask in 1u64..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let k = subset.len();
            if k < 3 {
                continue;
            }
            // Cayley-Menger matrix bordered with ones.
            let mut m = DMatrix::zeros(k + 1, k + 1);
            for a in 1..=k {
                m[(0, a)] = 1.0;
                m[(a, 0)] = 1.0;
                for b in 1..=k {
                    let d = self.edge_lengths[subset[a - 1]][subset[b - 1]];
                    m[(a, b)] = d * d;
                }
            }
            let det = m.determinant();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            if sign * det < -1e-9 * scale.powi(k as i32) {
                return Err(MetricError::BadShape(format!(
                    "vertices {subset:?} are not realizable in euclidean space"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ShapeTableJson {
    shapes: Vec<Shape>,
    assignment: Vec<(Vec<usize>, usize, Vec<usize>)>,
}

/// A point of the geometric realization: barycentric weights on one simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoint {
    pub simplex: Vec<usize>,
    pub coordinates: Vec<f64>,
}

impl ComplexPoint {
    pub fn vertex(v: usize) -> ComplexPoint {
        ComplexPoint { simplex: vec![v], coordinates: vec![1.0] }
    }

    pub fn new(simplex: Vec<usize>, coordinates: Vec<f64>) -> ComplexPoint {
        ComplexPoint { simplex, coordinates }
    }

    fn support(&self) -> SparsePoint {
        self.simplex
            .iter()
            .zip(&self.coordinates)
            .filter(|&(_, &w)| w > 1e-15)
            .map(|(&v, &w)| (v, w))
            .collect()
    }
}

/// A string: a sequence of points in which consecutive points share a simplex.
#[derive(Clone, Debug)]
pub struct PLString {
    pub points: Vec<ComplexPoint>,
}

type SparsePoint = BTreeMap<usize, f64>;

/// An M0-complex: simplices carry euclidean shapes from a finite table.
/// Compatibility of the face maps reduces to a consistent global edge-length
/// function, since a euclidean simplex is determined by its edge lengths.
pub struct MZeroComplex {
    complex: SimplicialComplex,
    shapes: Vec<Shape>,
    assignment: Vec<(Vec<usize>, usize, Vec<usize>)>,
    edge_sq: HashMap<(usize, usize), f64>,
}

impl MZeroComplex {
    /// Each assignment row is (simplex, shape index, vertex correspondence):
    /// position `k` of the sorted simplex maps to shape vertex `perm[k]`.
    /// Every facet must be covered; overlapping assignments must agree.
    pub fn new(
        complex: SimplicialComplex,
        shapes: Vec<Shape>,
        assignment: Vec<(Vec<usize>, usize, Vec<usize>)>,
    ) -> Result<MZeroComplex, MetricError> {
        for shape in &shapes {
            shape.check_realizable()?;
        }
        let mut edge_sq: HashMap<(usize, usize), f64> = HashMap::new();
        let mut covered: BTreeSet<Vec<usize>> = BTreeSet::new();
        for (simplex, shape_idx, perm) in &assignment {
            let mut s = simplex.clone();
            s.sort_unstable();
            if !complex.contains_simplex(&s) {
                return Err(MetricError::BadShape(format!("{s:?} is not a simplex")));
            }
            let shape = shapes
                .get(*shape_idx)
                .ok_or_else(|| MetricError::BadShape(format!("no shape {shape_idx}")))?;
            if perm.len() != s.len() || perm.iter().any(|&p| p > shape.dim) {
                return Err(MetricError::BadShape(format!(
                    "bad vertex correspondence for {s:?}"
                )));
            }
            for a in 0..s.len() {
                for b in a + 1..s.len() {
                    let len = shape.edge_lengths[perm[a]][perm[b]];
                    let key = (s[a].min(s[b]), s[a].max(s[b]));
                    let sq = len * len;
                    if let Some(&prev) = edge_sq.get(&key) {
                        if (prev.sqrt() - len).abs() > 1e-9 {
                            return Err(MetricError::IncompatibleLengths(
                                key.0,
                                key.1,
                                prev.sqrt(),
                                len,
                            ));
                        }
                    }
                    edge_sq.insert(key, sq);
                }
            }
            covered.insert(s);
        }
        for facet in complex.facets() {
            let ok = covered.iter().any(|c| facet.iter().all(|v| c.binary_search(v).is_ok()));
            if !ok {
                return Err(MetricError::UnassignedSimplex(facet));
            }
        }
        Ok(MZeroComplex { complex, shapes, assignment, edge_sq })
    }

    /// The default structure: every simplex regular with the given edge length.
    pub fn regular(complex: SimplicialComplex, edge: f64) -> Result<MZeroComplex, MetricError> {
        let facets = complex.facets();
        let dims: BTreeSet<usize> = facets.iter().map(|f| f.len() - 1).collect();
        let shapes: Vec<Shape> = dims.iter().map(|&d| Shape::regular(d, edge)).collect();
        let shape_of: BTreeMap<usize, usize> =
            dims.iter().enumerate().map(|(k, &d)| (d, k)).collect();
        let assignment = facets
            .into_iter()
            .map(|f| {
                let idx = shape_of[&(f.len() - 1)];
                let perm = (0..f.len()).collect();
                (f, idx, perm)
            })
            .collect();
        MZeroComplex::new(complex, shapes, assignment)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn edge_length(&self, u: usize, v: usize) -> Option<f64> {
        self.edge_sq.get(&(u.min(v), u.max(v))).map(|sq| sq.sqrt())
    }

    pub fn shape_table_json(&self) -> serde_json::Value {
        serde_json::to_value(ShapeTableJson {
            shapes: self.shapes.clone(),
            assignment: self.assignment.clone(),
        })
        .expect("shape table serialization cannot fail")
    }

    pub fn from_shape_table_json(
        complex: SimplicialComplex,
        value: &serde_json::Value,
    ) -> Result<MZeroComplex, MetricError> {
        let table: ShapeTableJson = serde_json::from_value(value.clone())
            .map_err(|e| MetricError::BadShape(e.to_string()))?;
        MZeroComplex::new(complex, table.shapes, table.assignment)
    }

    fn check_point(&self, p: &ComplexPoint) -> Result<(), MetricError> {
        let mut s = p.simplex.clone();
        s.sort_unstable();
        if s != p.simplex || !self.complex.contains_simplex(&s) {
            return Err(MetricError::BadPoint(format!("{:?} is not a sorted simplex", p.simplex)));
        }
        if p.coordinates.len() != s.len()
            || p.coordinates.iter().any(|&w| w < -1e-12)
            || (p.coordinates.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(MetricError::BadPoint(format!(
                "weights {:?} are not barycentric",
                p.coordinates
            )));
        }
        Ok(())
    }

    /// Squared distance inside a common simplex via the quadratic form
    /// `d(p,q)^2 = -1/2 (p-q)^T D (p-q)` with `D` the squared-length matrix.
    /// `None` when the supports are in no common simplex (missing edge).
    fn dist(&self, p: &SparsePoint, q: &SparsePoint) -> Option<f64> {
        let mut delta: BTreeMap<usize, f64> = BTreeMap::new();
        for (&v, &w) in p {
            *delta.entry(v).or_insert(0.0) += w;
        }
        for (&v, &w) in q {
            *delta.entry(v).or_insert(0.0) -= w;
        }
        let entries: Vec<(usize, f64)> = delta.into_iter().collect();
        let mut sq = 0.0;
        for (a, &(u, du)) in entries.iter().enumerate() {
            for &(v, dv) in &entries[a + 1..] {
                let d2 = self.edge_sq.get(&(u, v))?;
                sq -= du * dv * d2;
            }
        }
        Some(sq.max(0.0).sqrt())
    }

    fn union_is_simplex(&self, p: &SparsePoint, q: &SparsePoint) -> bool {
        let union: Vec<usize> = p.keys().chain(q.keys()).copied().collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        self.complex.contains_simplex(&union)
    }

    /// `l(x) = sum of within-shape distances between consecutive points`.
    pub fn string_length(&self, string: &PLString) -> Result<f64, MetricError> {
        for p in &string.points {
            self.check_point(p)?;
        }
        let mut total = 0.0;
        for pair in string.points.windows(2) {
            let (p, q) = (pair[0].support(), pair[1].support());
            if !self.union_is_simplex(&p, &q) {
                return Err(MetricError::NotInCommonSimplex);
            }
            total += self.dist(&p, &q).ok_or(MetricError::NotInCommonSimplex)?;
        }
        Ok(total)
    }

    /// The intrinsic distance, within `tol`: the infimum of string lengths.
    ///
    /// Upper-bound optimizer: seed with a shortest path in the subdivided
    /// 1-skeleton, coordinate-descend on the crossing points of the induced
    /// simplex sequence, refine the subdivision until two successive levels
    /// agree within `tol/2`. Two points of one simplex short-circuit to the
    /// exact shape distance.
    pub fn intrinsic_distance(
        &self,
        x: &ComplexPoint,
        y: &ComplexPoint,
        tol: f64,
    ) -> Result<f64, MetricError> {
        if !(tol > 0.0) {
            return Err(MetricError::InvalidTolerance);
        }
        self.check_point(x)?;
        self.check_point(y)?;
        let (px, py) = (x.support(), y.support());
        if self.union_is_simplex(&px, &py) {
            return self.dist(&px, &py).ok_or(MetricError::NotInCommonSimplex);
        }
        let mut best = f64::INFINITY;
        let mut prev: Option<f64> = None;
        for &k in &SUBDIVISIONS {
            let seed = self.skeleton_path(&px, &py, k)?;
            let length = self.descend(seed, tol);
            best = best.min(length);
            if let Some(p) = prev {
                if (p - length).abs() <= tol / 2.0 {
                    return Ok(best);
                }
            }
            prev = Some(length);
        }
        Err(MetricError::ToleranceNotReached { best })
    }

    /// Dijkstra seed path through the k-subdivided 1-skeleton plus endpoints.
    fn skeleton_path(
        &self,
        x: &SparsePoint,
        y: &SparsePoint,
        k: usize,
    ) -> Result<Vec<SparsePoint>, MetricError> {
        let mut nodes: Vec<SparsePoint> = vec![x.clone(), y.clone()];
        for v in 0..self.complex.vertices().len() {
            if self.complex.contains_simplex(&[v]) {
                nodes.push(BTreeMap::from([(v, 1.0)]));
            }
        }
        for (u, v) in self.complex.edges() {
            for j in 1..k {
                let t = j as f64 / k as f64;
                nodes.push(BTreeMap::from([(u, 1.0 - t), (v, t)]));
            }
        }
        let n = nodes.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                if self.union_is_simplex(&nodes[a], &nodes[b]) {
                    if let Some(d) = self.dist(&nodes[a], &nodes[b]) {
                        adj[a].push((b, d));
                        adj[b].push((a, d));
                    }
                }
            }
        }
        // Dijkstra from node 0 (= x) to node 1 (= y).
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let mut done = vec![false; n];
        dist[0] = 0.0;
        loop {
            let Some(cur) = (0..n)
                .filter(|&i| !done[i] && dist[i].is_finite())
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            else {
                break;
            };
            if cur == 1 {
                break;
            }
            done[cur] = true;
            for &(next, w) in &adj[cur] {
                if dist[cur] + w < dist[next] {
                    dist[next] = dist[cur] + w;
                    parent[next] = cur;
                }
            }
        }
        if !dist[1].is_finite() {
            return Err(MetricError::DisconnectedPoints);
        }
        let mut path = vec![1];
        while *path.last().unwrap() != 0 {
            path.push(parent[*path.last().unwrap()]);
        }
        path.reverse();
        Ok(path.into_iter().map(|i| nodes[i].clone()).collect())
    }

    /// Coordinate descent on the interior points of a seed path. Each point
    /// moves in the crossing face of its two witness simplices; moves are
    /// golden-section line searches along vertex-pair directions.
    fn descend(&self, mut path: Vec<SparsePoint>, tol: f64) -> f64 {
        let m = path.len();
        if m < 3 {
            return self.path_length(&path);
        }
        // Witness simplex of segment i: union of the seed supports.
        let witnesses: Vec<BTreeSet<usize>> = path
            .windows(2)
            .map(|w| w[0].keys().chain(w[1].keys()).copied().collect())
            .collect();
        let faces: Vec<Vec<usize>> = (1..m - 1)
            .map(|i| witnesses[i - 1].intersection(&witnesses[i]).copied().collect())
            .collect();
        let mut length = self.path_length(&path);
        for _ in 0..MAX_SWEEPS {
            for i in 1..m - 1 {
                let face = &faces[i - 1];
                if face.len() < 2 {
                    continue;
                }
                let mut point: Vec<f64> =
                    face.iter().map(|v| *path[i].get(v).unwrap_or(&0.0)).collect();
                for a in 0..face.len() {
                    for b in a + 1..face.len() {
                        // point + t*(e_b - e_a) stays barycentric for t in [-p_b, p_a].
                        let objective = |t: f64| {
                            let mut moved = path[i].clone();
                            set_weight(&mut moved, face[a], point[a] - t);
                            set_weight(&mut moved, face[b], point[b] + t);
                            self.dist(&path[i - 1], &moved).unwrap_or(f64::INFINITY)
                                + self.dist(&moved, &path[i + 1]).unwrap_or(f64::INFINITY)
                        };
                        let t = golden_min(objective, -point[b], point[a]);
                        point[a] -= t;
                        point[b] += t;
                        set_weight(&mut path[i], face[a], point[a]);
                        set_weight(&mut path[i], face[b], point[b]);
                    }
                }
            }
            let new_length = self.path_length(&path);
            if length - new_length < tol / 2.0 {
                return new_length;
            }
            length = new_length;
        }
        length
    }

    fn path_length(&self, path: &[SparsePoint]) -> f64 {
        path.windows(2).map(|w| self.dist(&w[0], &w[1]).unwrap_or(f64::INFINITY)).sum()
    }

    /// `min over vertices v of eps(v)`, where `eps(v, a)` is the distance
    /// from `v` to the union of faces of `a` not containing `v`. Infinite
    /// when no simplex has two vertices.
    pub fn vertex_separation(&self) -> f64 {
        let mut sep = f64::INFINITY;
        for facet in self.complex.facets() {
            if facet.len() < 2 {
                continue;
            }
            for (t, _) in facet.iter().enumerate() {
                sep = sep.min(self.vertex_to_opposite_face(&facet, t));
            }
        }
        sep
    }

    /// Distance from vertex `t` of `simplex` to the opposite facet: embed the
    /// other vertices relative to `t` by the Gram matrix and minimize the
    /// norm over the convex hull, enumerating active subsets.
    fn vertex_to_opposite_face(&self, simplex: &[usize], t: usize) -> f64 {
        let others: Vec<usize> =
            (0..simplex.len()).filter(|&a| a != t).map(|a| simplex[a]).collect();
        let k = others.len();
        let sq = |u: usize, v: usize| {
            if u == v {
                0.0
            } else {
                self.edge_sq[&(u.min(v), u.max(v))]
            }
        };
        let v0 = simplex[t];
        let gram = DMatrix::from_fn(k, k, |i, j| {
            0.5 * (sq(v0, others[i]) + sq(v0, others[j]) - sq(others[i], others[j]))
        });
        let mut best = f64::INFINITY;
        for mask in 1u64..(1 << k) {
            let subset: Vec<usize> = (0..k).filter(|&a| mask >> a & 1 == 1).collect();
            let s = subset.len();
            // Minimize lambda^T G lambda with sum lambda = 1 over the subset;
            // the bordered KKT system gives the unconstrained face optimum.
            let mut kkt = DMatrix::zeros(s + 1, s + 1);
            for a in 0..s {
                for b in 0..s {
                    kkt[(a, b)] = gram[(subset[a], subset[b])];
                }
                kkt[(a, s)] = 1.0;
                kkt[(s, a)] = 1.0;
            }
            let mut rhs = DVector::zeros(s + 1);
            rhs[s] = 1.0;
            let Some(sol) = kkt.lu().solve(&rhs) else {
                continue;
            };
            if (0..s).any(|a| sol[a] < -1e-9) {
                continue;
            }
            let lambda = DVector::from_fn(s, |a, _| sol[a]);
            let sub_gram = DMatrix::from_fn(s, s, |a, b| gram[(subset[a], subset[b])]);
            let value = (lambda.transpose() * &sub_gram * &lambda)[(0, 0)];
            best = best.min(value.max(0.0).sqrt());
        }
        best
    }

    /// Properness report for an explicit finite complex: local finiteness is
    /// immediate; the ball subcomplex comes from the chain bound
    /// `N(r) = ceil(r / separation) + 1` followed by a skeleton-distance
    /// membership filter.
    pub fn check_properness(&self, basepoint: usize, r: f64) -> Result<PropernessReport, MetricError> {
        if !self.complex.contains_simplex(&[basepoint]) {
            return Err(MetricError::BadPoint(format!("no vertex {basepoint}")));
        }
        let facets = self.complex.facets();
        let labeled: Vec<Vec<String>> = facets
            .iter()
            .map(|f| f.iter().map(|&v| self.complex.vertices()[v].clone()).collect())
            .collect();
        let edge_len = |u: &str, v: &str| {
            let ui = self.complex.vertices().iter().position(|w| w == u).unwrap();
            let vi = self.complex.vertices().iter().position(|w| w == v).unwrap();
            self.edge_length(ui, vi).unwrap()
        };
        let sep = self.vertex_separation();
        let base_label = self.complex.vertices()[basepoint].clone();
        let (ball, chain_bound) = ball_facets(&labeled, &base_label, r, sep, &edge_len);
        Ok(PropernessReport {
            locally_finite: true,
            partial: false,
            enumeration_bound: facets.len(),
            chain_bound,
            ball_facets: ball,
            ball_truncated: false,
        })
    }
}

fn set_weight(p: &mut SparsePoint, v: usize, w: f64) {
    if w > 1e-15 {
        p.insert(v, w);
    } else {
        p.remove(&v);
    }
}

/// Golden-section minimum of a convex function on [lo, hi].
fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    if hi - lo < 1e-15 {
        return 0.0f64.clamp(lo, hi);
    }
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) / 2.0;
    // Keep the endpoint when it is no worse: avoids drift on flat objectives.
    if f(0.0f64.clamp(lo, hi)) <= f(mid) {
        0.0f64.clamp(lo, hi)
    } else {
        mid
    }
}

/// Report of [`MZeroComplex::check_properness`] and [`check_properness_lazy`].
#[derive(Clone, Debug)]
pub struct PropernessReport {
    /// False when some vertex star exceeded the enumeration bound.
    pub locally_finite: bool,
    /// True when the verdict only covers the declared bound.
    pub partial: bool,
    pub enumeration_bound: usize,
    pub chain_bound: usize,
    /// Facets meeting the closed ball of radius `r` around the basepoint.
    pub ball_facets: Vec<Vec<String>>,
    /// True when the ball listing stopped at the enumeration bound.
    pub ball_truncated: bool,
}

/// A lazily generated complex, described by vertex stars. All simplices are
/// regular with unit edge lengths.
pub trait LazyComplex {
    /// At most `limit` facets containing `vertex` (sorted vertex labels),
    /// plus whether the star was fully enumerated.
    fn star(&self, vertex: &str, limit: usize) -> (Vec<Vec<String>>, bool);
}

/// One central vertex `c` on countably many unit segments `[c, l<k>]`.
pub struct InfiniteStar;

impl LazyComplex for InfiniteStar {
    fn star(&self, vertex: &str, limit: usize) -> (Vec<Vec<String>>, bool) {
        if vertex == "c" {
            let facets =
                (0..limit).map(|k| vec!["c".to_string(), format!("l{k}")]).collect();
            (facets, false)
        } else {
            (vec![vec!["c".to_string(), vertex.to_string()]], true)
        }
    }
}

/// Unit segments `[v<k>, v<k+1>]` for k >= 0.
pub struct HalfLine;

impl LazyComplex for HalfLine {
    fn star(&self, vertex: &str, _limit: usize) -> (Vec<Vec<String>>, bool) {
        let k: usize = vertex.strip_prefix('v').and_then(|s| s.parse().ok()).unwrap_or(0);
        let mut facets = Vec::new();
        if k > 0 {
            facets.push(vec![format!("v{}", k - 1), format!("v{k}")]);
        }
        facets.push(vec![format!("v{k}"), format!("v{}", k + 1)]);
        (facets, true)
    }
}

/// Properness check for generator-backed complexes: explore vertex stars by
/// chains of length at most `N(r)`, then filter facets by skeleton distance.
/// The verdict is partial when any star hits the enumeration bound.
pub fn check_properness_lazy(
    generator: &dyn LazyComplex,
    basepoint: &str,
    r: f64,
    bound: usize,
) -> PropernessReport {
    // Unit regular shapes: the separation of a regular unit k-simplex is
    // sqrt((k+1)/(2k)) >= 1/sqrt(2); 1 for segments.
    let mut sep = f64::INFINITY;
    let mut facets: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut truncated = false;
    let mut depth: BTreeMap<String, usize> = BTreeMap::from([(basepoint.to_string(), 0)]);
    let mut queue = VecDeque::from([basepoint.to_string()]);
    // Provisional chain bound with segment separation; recomputed below.
    let mut chain_bound = (r / 1.0).ceil() as usize + 1;
    while let Some(v) = queue.pop_front() {
        let d = depth[&v];
        if d >= chain_bound {
            continue;
        }
        let (star, complete) = generator.star(&v, bound);
        if !complete {
            truncated = true;
        }
        for facet in star {
            let k = facet.len() - 1;
            if k >= 1 {
                sep = sep.min(((k as f64 + 1.0) / (2.0 * k as f64)).sqrt());
                chain_bound = (r / sep).ceil() as usize + 1;
            }
            for w in &facet {
                if !depth.contains_key(w) {
                    depth.insert(w.clone(), d + 1);
                    queue.push_back(w.clone());
                }
            }
            facets.insert(facet);
        }
    }
    let all: Vec<Vec<String>> = facets.into_iter().collect();
    let (ball, chain_bound) = ball_facets(&all, basepoint, r, sep, &|_, _| 1.0);
    PropernessReport {
        locally_finite: !truncated,
        partial: truncated,
        enumeration_bound: bound,
        chain_bound,
        ball_facets: ball,
        ball_truncated: truncated,
    }
}

/// Facets meeting the closed ball: a facet is kept when some node of its
/// subdivided skeleton lies within `r` of the basepoint.
fn ball_facets(
    facets: &[Vec<String>],
    basepoint: &str,
    r: f64,
    sep: f64,
    edge_len: &dyn Fn(&str, &str) -> f64,
) -> (Vec<Vec<String>>, usize) {
    let chain_bound = if sep.is_finite() { (r / sep).ceil() as usize + 1 } else { 1 };
    let subdiv = 8usize;
    // Subdivided-skeleton nodes: vertices plus interior edge points.
    let mut nodes: Vec<(String, String, usize)> = Vec::new(); // (u, v, j): (1-j/s)u + (j/s)v
    let mut seen: BTreeSet<(String, String, usize)> = BTreeSet::new();
    let push = |nodes: &mut Vec<_>, seen: &mut BTreeSet<_>, u: &str, v: &str, j: usize| {
        let key = (u.to_string(), v.to_string(), j);
        if seen.insert(key.clone()) {
            nodes.push(key);
        }
    };
    push(&mut nodes, &mut seen, basepoint, basepoint, 0);
    for facet in facets {
        for (a, u) in facet.iter().enumerate() {
            push(&mut nodes, &mut seen, u, u, 0);
            for v in &facet[a + 1..] {
                for j in 1..subdiv {
                    push(&mut nodes, &mut seen, u, v, j);
                }
            }
        }
    }
    let on_facet = |node: &(String, String, usize), facet: &[String]| {
        facet.contains(&node.0) && (node.2 == 0 || facet.contains(&node.1))
    };
    let node_dist = |a: &(String, String, usize), b: &(String, String, usize)| -> f64 {
        // Both nodes lie on edges of one facet; use the quadratic form on
        // the union of their supports.
        let mut delta: BTreeMap<&str, f64> = BTreeMap::new();
        let (ta, tb) = (a.2 as f64 / subdiv as f64, b.2 as f64 / subdiv as f64);
        *delta.entry(&a.0).or_insert(0.0) += 1.0 - ta;
        *delta.entry(&a.1).or_insert(0.0) += ta;
        *delta.entry(&b.0).or_insert(0.0) -= 1.0 - tb;
        *delta.entry(&b.1).or_insert(0.0) -= tb;
        let entries: Vec<(&str, f64)> = delta.into_iter().collect();
        let mut sq = 0.0;
        for (i, &(u, du)) in entries.iter().enumerate() {
            for &(v, dv) in &entries[i + 1..] {
                if u != v {
                    let l = edge_len(u, v);
                    sq -= du * dv * l * l;
                }
            }
        }
        sq.max(0.0).sqrt()
    };
    let n = nodes.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for facet in facets {
        let members: Vec<usize> =
            (0..n).filter(|&i| on_facet(&nodes[i], facet)).collect();
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                let d = node_dist(&nodes[i], &nodes[j]);
                adj[i].push((j, d));
                adj[j].push((i, d));
            }
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[0] = 0.0;
    loop {
        let Some(cur) = (0..n)
            .filter(|&i| !done[i] && dist[i].is_finite())
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
        else {
            break;
        };
        done[cur] = true;
        for &(next, w) in &adj[cur] {
            if dist[cur] + w < dist[next] {
                dist[next] = dist[cur] + w;
            }
        }
    }
    let ball: Vec<Vec<String>> = facets
        .iter()
        .filter(|facet| {
            (0..n).any(|i| dist[i] <= r + 1e-9 && on_facet(&nodes[i], facet))
        })
        .cloned()
        .collect();
    (ball, chain_bound)
}
