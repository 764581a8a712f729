//! Finite simplicial complexes, cosheaves (coefficient systems for homology),
//! their chain complexes and homology, and geodesic idempotent systems.
//!
//! Faces are stored as strictly increasing vertex lists. The orientation of a
//! face is the one given by that order, so the `i`-th facet (drop vertex `i`)
//! enters the boundary with sign `(-1)^i`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{scalar_from_json, smith_normal_form, Matrix, Ring, Scalar};

const MAX_FACET_SIZE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    faces: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl SimplicialComplex {
    /// The closure under subsets of `facets` on vertices `0..n`.
    pub fn new(n: usize, facets: &[Vec<usize>]) -> Result<Self> {
        Self::with_labels((0..n).map(|v| v.to_string()).collect(), facets)
    }

    pub fn with_labels(labels: Vec<String>, facets: &[Vec<usize>]) -> Result<Self> {
        let n = labels.len();
        let mut all: BTreeSet<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
        for f in facets {
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != f.len() {
                return Err(Error::invalid(format!("face {f:?} repeats a vertex")));
            }
            if let Some(&v) = s.iter().find(|&&v| v >= n) {
                return Err(Error::invalid(format!("face {f:?} uses vertex {v} outside 0..{n}")));
            }
            if s.len() > MAX_FACET_SIZE {
                return Err(Error::invalid(format!("face {f:?} is too large to close under subsets")));
            }
            if s.is_empty() {
                continue;
            }
            for mask in 1u32..(1u32 << s.len()) {
                all.insert(s.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect());
            }
        }
        let top = all.iter().map(Vec::len).max().unwrap_or(0);
        let mut faces = vec![Vec::new(); top];
        for f in all {
            faces[f.len() - 1].push(f);
        }
        for level in &mut faces {
            level.sort();
        }
        let index = faces
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect())
            .collect();
        Ok(SimplicialComplex { labels, faces, index })
    }

    pub fn empty() -> Self {
        SimplicialComplex { labels: Vec::new(), faces: Vec::new(), index: Vec::new() }
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Dimension, `-1` for the empty complex.
    pub fn dim(&self) -> isize {
        self.faces.len() as isize - 1
    }

    pub fn faces(&self, k: usize) -> &[Vec<usize>] {
        self.faces.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn num_faces(&self, k: usize) -> usize {
        self.faces(k).len()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    pub fn face_index(&self, face: &[usize]) -> Option<usize> {
        let k = face.len().checked_sub(1)?;
        self.index.get(k)?.get(face).copied()
    }

    /// Maximal faces, in dimension then lexicographic order.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (k, level) in self.faces.iter().enumerate() {
            for f in level {
                let covered = self.faces(k + 1).iter().any(|g| f.iter().all(|v| g.contains(v)));
                if !covered {
                    out.push(f.clone());
                }
            }
        }
        out
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        self.faces(1)
            .iter()
            .filter_map(|e| if e[0] == v { Some(e[1]) } else if e[1] == v { Some(e[0]) } else { None })
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_vertices();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// A connected graph with `V - E = 1`.
    pub fn is_tree(&self) -> bool {
        self.n_vertices() > 0
            && self.dim() <= 1
            && self.n_vertices() == self.num_faces(1) + 1
            && self.is_connected()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for e in self.faces(1) {
            adj[e[0]].push(e[1]);
            adj[e[1]].push(e[0]);
        }
        adj
    }

    /// The cone with a new apex vertex.
    pub fn cone(&self, apex: &str) -> SimplicialComplex {
        let n = self.n_vertices();
        let mut labels = self.labels.clone();
        labels.push(apex.to_string());
        let facets: Vec<Vec<usize>> = if n == 0 {
            Vec::new()
        } else {
            self.facets()
                .into_iter()
                .map(|mut f| {
                    f.push(n);
                    f
                })
                .collect()
        };
        SimplicialComplex::with_labels(labels, &facets).expect("cone of a valid complex")
    }
}

/// Small complexes with well-known homology.
pub mod catalog {
    use super::SimplicialComplex;

    pub fn point() -> SimplicialComplex {
        SimplicialComplex::new(1, &[]).expect("valid")
    }

    pub fn path(n: usize) -> SimplicialComplex {
        let edges: Vec<Vec<usize>> = (1..n).map(|i| vec![i - 1, i]).collect();
        SimplicialComplex::new(n, &edges).expect("valid")
    }

    pub fn cycle(n: usize) -> SimplicialComplex {
        let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        SimplicialComplex::new(n, &edges).expect("valid")
    }

    /// The full simplex on `k + 1` vertices.
    pub fn simplex(k: usize) -> SimplicialComplex {
        SimplicialComplex::new(k + 1, &[(0..=k).collect()]).expect("valid")
    }

    /// The boundary of the `(k + 1)`-simplex, a `k`-sphere.
    pub fn sphere(k: usize) -> SimplicialComplex {
        let n = k + 2;
        let facets: Vec<Vec<usize>> = (0..n).map(|skip| (0..n).filter(|&v| v != skip).collect()).collect();
        SimplicialComplex::new(n, &facets).expect("valid")
    }

    pub fn octahedron() -> SimplicialComplex {
        let mut facets = Vec::new();
        for a in [0, 1] {
            for b in [2, 3] {
                for c in [4, 5] {
                    facets.push(vec![a, b, c]);
                }
            }
        }
        SimplicialComplex::new(6, &facets).expect("valid")
    }

    /// The seven-vertex torus.
    pub fn torus() -> SimplicialComplex {
        let facets: Vec<Vec<usize>> = (0..7).flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]]).collect();
        SimplicialComplex::new(7, &facets).expect("valid")
    }

    /// The six-vertex projective plane.
    pub fn projective_plane() -> SimplicialComplex {
        let facets = [
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 5],
            [0, 5, 1],
            [1, 2, 4],
            [2, 3, 5],
            [3, 4, 1],
            [4, 5, 2],
            [5, 1, 3],
        ];
        let facets: Vec<Vec<usize>> = facets.iter().map(|f| f.to_vec()).collect();
        SimplicialComplex::new(6, &facets).expect("valid")
    }

    /// A star with `leaves` leaves around vertex 0.
    pub fn star(leaves: usize) -> SimplicialComplex {
        let edges: Vec<Vec<usize>> = (1..=leaves).map(|i| vec![0, i]).collect();
        SimplicialComplex::new(leaves + 1, &edges).expect("valid")
    }
}

/// A random labelled tree: vertex `i > 0` attaches to a uniform earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> SimplicialComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<Vec<usize>> = (1..n).map(|i| vec![rng.gen_range(0..i), i]).collect();
    SimplicialComplex::new(n, &edges).expect("valid tree")
}

/// A finite group acting simplicially, with linear maps `g_F: C_F -> C_{gF}`.
#[derive(Debug, Clone)]
pub struct GroupAction {
    /// Vertex permutation of each element.
    pub perms: Vec<Vec<usize>>,
    /// `mats[g][k][f]` for face `f` of dimension `k`.
    pub mats: Vec<Vec<Vec<Matrix>>>,
    /// `product[g][h]` is the index of `gh`.
    pub product: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct Cosheaf {
    complex: SimplicialComplex,
    ring: Ring,
    dims: Vec<Vec<usize>>,
    maps: Vec<Vec<Vec<Matrix>>>,
    action: Option<GroupAction>,
}

fn drop_vertex(face: &[usize], i: usize) -> Vec<usize> {
    face.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect()
}

impl Cosheaf {
    /// `maps[k][f][i]` is the corestriction from face `f` (dimension `k >= 1`)
    /// to its facet without vertex `i`; `maps[0]` is ignored.
    pub fn new(
        complex: SimplicialComplex,
        ring: Ring,
        dims: Vec<Vec<usize>>,
        maps: Vec<Vec<Vec<Matrix>>>,
        action: Option<GroupAction>,
    ) -> Result<Self> {
        let f = complex.f_vector();
        if dims.len() != f.len() || dims.iter().zip(&f).any(|(d, &n)| d.len() != n) {
            return Err(Error::invalid("one dimension per face is required"));
        }
        if maps.len() != f.len() {
            return Err(Error::invalid("corestrictions must be given for every dimension"));
        }
        for k in 1..f.len() {
            if maps[k].len() != f[k] {
                return Err(Error::invalid(format!("corestrictions missing in dimension {k}")));
            }
            for (fi, face) in complex.faces(k).iter().enumerate() {
                if maps[k][fi].len() != k + 1 {
                    return Err(Error::invalid(format!("face {face:?} needs {} corestrictions", k + 1)));
                }
                for (i, m) in maps[k][fi].iter().enumerate() {
                    let sub = complex.face_index(&drop_vertex(face, i)).expect("closed");
                    if m.rows() != dims[k - 1][sub] || m.cols() != dims[k][fi] || m.ring() != &ring {
                        return Err(Error::invalid(format!(
                            "corestriction from {face:?} to {:?} has the wrong shape or ring",
                            drop_vertex(face, i)
                        )));
                    }
                }
            }
        }
        if let Some(a) = &action {
            let g = a.perms.len();
            if a.mats.len() != g || a.product.len() != g || a.product.iter().any(|r| r.len() != g || r.iter().any(|&x| x >= g)) {
                return Err(Error::invalid("group action tables have inconsistent sizes"));
            }
            for (gi, perm) in a.perms.iter().enumerate() {
                if perm.len() != complex.n_vertices() {
                    return Err(Error::invalid("group element must permute every vertex"));
                }
                for k in 0..f.len() {
                    if a.mats[gi].get(k).is_none_or(|l| l.len() != f[k]) {
                        return Err(Error::invalid("group element needs one matrix per face"));
                    }
                    for (fi, face) in complex.faces(k).iter().enumerate() {
                        let img = image_face(perm, face);
                        let Some(t) = complex.face_index(&img) else {
                            return Err(Error::invalid(format!("group element {gi} does not map {face:?} to a face")));
                        };
                        let m = &a.mats[gi][k][fi];
                        if m.rows() != dims[k][t] || m.cols() != dims[k][fi] {
                            return Err(Error::invalid(format!("group matrix on {face:?} has the wrong shape")));
                        }
                    }
                }
            }
        }
        Ok(Cosheaf { complex, ring, dims, maps, action })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim_of(&self, k: usize, f: usize) -> usize {
        self.dims[k][f]
    }

    pub fn corestriction(&self, k: usize, f: usize, i: usize) -> &Matrix {
        &self.maps[k][f][i]
    }

    pub fn action(&self) -> Option<&GroupAction> {
        self.action.as_ref()
    }
}

fn image_face(perm: &[usize], face: &[usize]) -> Vec<usize> {
    let mut img: Vec<usize> = face.iter().map(|&v| perm[v]).collect();
    img.sort_unstable();
    img
}

/// The constant cosheaf with fibre `ring^dim` and identity corestrictions.
pub fn trivial_cosheaf(complex: &SimplicialComplex, ring: &Ring, dim: usize) -> Cosheaf {
    let f = complex.f_vector();
    let dims = f.iter().map(|&n| vec![dim; n]).collect();
    let id = Matrix::identity(ring, dim);
    let maps = f.iter().enumerate().map(|(k, &n)| vec![vec![id.clone(); if k == 0 { 0 } else { k + 1 }]; n]).collect();
    Cosheaf::new(complex.clone(), ring.clone(), dims, maps, None).expect("consistent shapes")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosheafViolation {
    pub axiom: String,
    pub faces: Vec<Vec<usize>>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosheafValidation {
    pub valid: bool,
    pub violations: Vec<CosheafViolation>,
}

/// Checks that corestrictions compose consistently, and, when an action is
/// present, the cocycle and naturality axioms. Identities on `F -> F` are
/// implicit in the representation.
pub fn validate_cosheaf(c: &Cosheaf) -> CosheafValidation {
    let cx = &c.complex;
    let mut violations = Vec::new();
    for k in 2..cx.faces.len() {
        for (fi, face) in cx.faces(k).iter().enumerate() {
            for a in 0..=k {
                for b in a + 1..=k {
                    let fa = drop_vertex(face, a);
                    let fb = drop_vertex(face, b);
                    let ia = cx.face_index(&fa).expect("closed");
                    let ib = cx.face_index(&fb).expect("closed");
                    // In F \ a, vertex b sits at position b - 1; in F \ b, a stays at a.
                    let via_a = c.maps[k - 1][ia][b - 1].mul(&c.maps[k][fi][a]);
                    let via_b = c.maps[k - 1][ib][a].mul(&c.maps[k][fi][b]);
                    if via_a != via_b {
                        violations.push(CosheafViolation {
                            axiom: "ii".into(),
                            faces: vec![face.clone(), fa.clone(), fb.clone(), drop_vertex(&fa, b - 1)],
                            detail: "corestrictions along the two paths differ".into(),
                        });
                    }
                }
            }
        }
    }
    if let Some(act) = &c.action {
        let g = act.perms.len();
        for x in 0..g {
            for y in 0..g {
                let xy = act.product[x][y];
                for k in 0..cx.faces.len() {
                    for (fi, face) in cx.faces(k).iter().enumerate() {
                        let yf = cx.face_index(&image_face(&act.perms[y], face)).expect("checked");
                        let lhs = act.mats[x][k][yf].mul(&act.mats[y][k][fi]);
                        if lhs != act.mats[xy][k][fi] {
                            violations.push(CosheafViolation {
                                axiom: "iii".into(),
                                faces: vec![face.clone()],
                                detail: format!("g_(hF) h_F != (gh)_F for g = {x}, h = {y}"),
                            });
                        }
                    }
                }
            }
        }
        for (gi, perm) in act.perms.iter().enumerate() {
            for k in 1..cx.faces.len() {
                for (fi, face) in cx.faces(k).iter().enumerate() {
                    let gface = image_face(perm, face);
                    let gfi = cx.face_index(&gface).expect("checked");
                    for i in 0..=k {
                        let sub = drop_vertex(face, i);
                        let si = cx.face_index(&sub).expect("closed");
                        let gv = perm[face[i]];
                        let gi_pos = gface.iter().position(|&v| v == gv).expect("image vertex");
                        let lhs = c.maps[k][gfi][gi_pos].mul(&act.mats[gi][k][fi]);
                        let rhs = act.mats[gi][k - 1][si].mul(&c.maps[k][fi][i]);
                        if lhs != rhs {
                            violations.push(CosheafViolation {
                                axiom: "v".into(),
                                faces: vec![face.clone(), sub],
                                detail: format!("square for group element {gi} does not commute"),
                            });
                        }
                    }
                }
            }
        }
    }
    CosheafValidation { valid: violations.is_empty(), violations }
}

/// Chains `C_k = sum_F C_F` with boundary matrices `d_k: C_k -> C_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainComplex {
    #[serde(skip)]
    pub ring: Ring,
    pub dims: Vec<usize>,
    /// `boundaries[k - 1]` is `d_k`, of shape `dims[k - 1] x dims[k]`.
    pub boundaries: Vec<Matrix>,
}

impl ChainComplex {
    pub fn boundary(&self, k: usize) -> Option<&Matrix> {
        k.checked_sub(1).and_then(|i| self.boundaries.get(i))
    }

    /// `d_{k} d_{k+1} = 0` for every `k`.
    pub fn squares_to_zero(&self) -> bool {
        self.boundaries.windows(2).all(|w| w[0].mul(&w[1]).is_zero())
    }

    pub fn change_ring(&self, ring: &Ring) -> Result<ChainComplex> {
        Ok(ChainComplex {
            ring: ring.clone(),
            dims: self.dims.clone(),
            boundaries: self.boundaries.iter().map(|m| m.change_ring(ring)).collect::<Result<_>>()?,
        })
    }
}

pub fn chain_complex(c: &Cosheaf) -> ChainComplex {
    let cx = &c.complex;
    let ring = &c.ring;
    let offsets: Vec<Vec<usize>> = c
        .dims
        .iter()
        .map(|level| {
            let mut acc = 0;
            level
                .iter()
                .map(|&d| {
                    let o = acc;
                    acc += d;
                    o
                })
                .collect()
        })
        .collect();
    let dims: Vec<usize> = c.dims.iter().map(|l| l.iter().sum()).collect();
    let mut boundaries = Vec::new();
    for k in 1..dims.len() {
        let mut m = Matrix::zeros(ring, dims[k - 1], dims[k]);
        for (fi, face) in cx.faces(k).iter().enumerate() {
            for i in 0..=k {
                let sub = cx.face_index(&drop_vertex(face, i)).expect("closed");
                let r = &c.maps[k][fi][i];
                let sign = i % 2 == 1;
                for a in 0..r.rows() {
                    for b in 0..r.cols() {
                        let v = if sign { ring.neg(&r[(a, b)]) } else { r[(a, b)].clone() };
                        let (row, col) = (offsets[k - 1][sub] + a, offsets[k][fi] + b);
                        m[(row, col)] = ring.add(&m[(row, col)], &v);
                    }
                }
            }
        }
        boundaries.push(m);
    }
    ChainComplex { ring: ring.clone(), dims, boundaries }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyDegree {
    pub degree: usize,
    /// Rank over a field, free rank over `Z`.
    pub rank: usize,
    /// Elementary divisors `> 1` (over `Z` only).
    pub torsion: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub ring: String,
    pub chain_dims: Vec<usize>,
    pub degrees: Vec<HomologyDegree>,
    pub euler_chains: i64,
    pub euler_homology: i64,
}

impl HomologyReport {
    pub fn rank(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |d| d.rank)
    }

    /// Homology vanishes in every positive degree.
    pub fn acyclic_above_zero(&self) -> bool {
        self.degrees.iter().skip(1).all(|d| d.rank == 0 && d.torsion.is_empty())
    }
}

fn alternating(v: impl Iterator<Item = usize>) -> i64 {
    v.enumerate().map(|(k, n)| if k % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
}

pub fn homology(cc: &ChainComplex) -> Result<HomologyReport> {
    let n = cc.dims.len();
    let mut ranks = vec![0usize; n + 1];
    let mut divisors: Vec<Vec<BigInt>> = vec![Vec::new(); n + 1];
    for k in 1..n {
        let m = &cc.boundaries[k - 1];
        if cc.ring.is_field() {
            ranks[k] = m.rank();
        } else {
            let s = smith_normal_form(m)?;
            ranks[k] = s.rank;
            divisors[k] = s.divisors;
        }
    }
    let degrees: Vec<HomologyDegree> = (0..n)
        .map(|k| HomologyDegree {
            degree: k,
            rank: cc.dims[k] - ranks[k] - ranks[k + 1],
            torsion: divisors[k + 1].iter().filter(|d| !d.is_one()).map(|d| d.to_string()).collect(),
        })
        .collect();
    Ok(HomologyReport {
        ring: cc.ring.to_string(),
        chain_dims: cc.dims.clone(),
        euler_chains: alternating(cc.dims.iter().copied()),
        euler_homology: alternating(degrees.iter().map(|d| d.rank)),
        degrees,
    })
}

/// Per-vertex idempotents on `ring^dim` with the first simplex along each
/// geodesic.
#[derive(Debug, Clone)]
pub struct IdempotentSystem {
    complex: SimplicialComplex,
    ring: Ring,
    dim: usize,
    lambdas: Vec<Matrix>,
    first_simplex: HashMap<(usize, usize), Vec<usize>>,
    cat0_asserted: bool,
    seed: Option<u64>,
}

/// First edge along the unique path from `x` to `y` in a tree; `[x]` when
/// `x == y`.
pub fn tree_geodesics(tree: &SimplicialComplex) -> Result<HashMap<(usize, usize), Vec<usize>>> {
    if !tree.is_tree() {
        return Err(Error::invalid("geodesics are computed only for trees"));
    }
    let n = tree.n_vertices();
    let adj = tree.adjacency();
    let mut out = HashMap::new();
    for y in 0..n {
        // Parent pointers towards y.
        let mut next = vec![usize::MAX; n];
        next[y] = y;
        let mut queue = VecDeque::from([y]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if next[w] == usize::MAX {
                    next[w] = v;
                    queue.push_back(w);
                }
            }
        }
        for x in 0..n {
            let s = if x == y {
                vec![x]
            } else {
                let mut e = vec![x, next[x]];
                e.sort_unstable();
                e
            };
            out.insert((x, y), s);
        }
    }
    Ok(out)
}

impl IdempotentSystem {
    /// Builds a system; the geodesic oracle is computed when the complex is
    /// a tree and must be supplied otherwise.
    pub fn new(
        complex: SimplicialComplex,
        ring: Ring,
        dim: usize,
        lambdas: Vec<Matrix>,
        first_simplex: Option<HashMap<(usize, usize), Vec<usize>>>,
    ) -> Result<Self> {
        if !ring.is_field() {
            return Err(Error::invalid("idempotent systems are supported over fields only"));
        }
        if lambdas.len() != complex.n_vertices() {
            return Err(Error::invalid("one idempotent per vertex is required"));
        }
        if lambdas.iter().any(|m| m.rows() != dim || m.cols() != dim || m.ring() != &ring) {
            return Err(Error::invalid(format!("idempotents must be {dim} x {dim} matrices over {ring}")));
        }
        let first_simplex = match first_simplex {
            Some(g) => g,
            None => tree_geodesics(&complex)
                .map_err(|_| Error::invalid("a geodesic oracle is required for complexes that are not trees"))?,
        };
        for (&(x, y), s) in &first_simplex {
            if x >= complex.n_vertices() || y >= complex.n_vertices() || complex.face_index(s).is_none() || !s.contains(&x) {
                return Err(Error::invalid(format!("oracle entry ({x}, {y}) -> {s:?} is not a simplex at {x}")));
            }
        }
        Ok(IdempotentSystem { complex, ring, dim, lambdas, first_simplex, cat0_asserted: false, seed: None })
    }

    /// Declares the underlying complex CAT(0) for the probe.
    pub fn assert_cat0(mut self, yes: bool) -> Self {
        self.cat0_asserted = yes;
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self, x: usize) -> &Matrix {
        &self.lambdas[x]
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn first_simplex(&self, x: usize, y: usize) -> Option<&[usize]> {
        self.first_simplex.get(&(x, y)).map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeodesicViolation {
    pub condition: String,
    pub x: usize,
    pub y: Option<usize>,
    pub z: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeodesicValidation {
    pub valid: bool,
    pub violations: Vec<GeodesicViolation>,
}

pub fn validate_geodesic_system(s: &IdempotentSystem) -> Result<GeodesicValidation> {
    let n = s.complex.n_vertices();
    let l = &s.lambdas;
    let mut violations = Vec::new();
    for x in 0..n {
        if l[x].mul(&l[x]) != l[x] {
            violations.push(GeodesicViolation { condition: "idempotent".into(), x, y: None, z: None });
        }
    }
    for e in s.complex.faces(1) {
        let (x, y) = (e[0], e[1]);
        if l[x].mul(&l[y]) != l[y].mul(&l[x]) {
            violations.push(GeodesicViolation { condition: "i".into(), x, y: Some(y), z: None });
        }
    }
    for x in 0..n {
        for y in 0..n {
            let first = s
                .first_simplex
                .get(&(x, y))
                .ok_or_else(|| Error::invalid(format!("geodesic oracle has no entry for ({x}, {y})")))?;
            let xy = l[x].mul(&l[y]);
            for &z in first {
                let xz = l[x].mul(&l[z]);
                if xz.mul(&l[y]) != xy || xz != l[z].mul(&l[x]) {
                    violations.push(GeodesicViolation { condition: "ii".into(), x, y: Some(y), z: Some(z) });
                }
            }
        }
    }
    Ok(GeodesicValidation { valid: violations.is_empty(), violations })
}

/// `A_F` is the image of the product of the idempotents at the vertices of
/// `F`; corestrictions are the inclusions in the chosen image bases.
pub fn idempotent_cosheaf(s: &IdempotentSystem) -> Result<Cosheaf> {
    let cx = &s.complex;
    let ring = &s.ring;
    let top = cx.faces.len();
    // Column bases of each image, as d x r matrices.
    let mut bases: Vec<Vec<Matrix>> = Vec::with_capacity(top);
    for k in 0..top {
        let mut level = Vec::new();
        for face in cx.faces(k) {
            for (i, &a) in face.iter().enumerate() {
                for &b in &face[i + 1..] {
                    if s.lambdas[a].mul(&s.lambdas[b]) != s.lambdas[b].mul(&s.lambdas[a]) {
                        return Err(Error::Violation(format!(
                            "idempotents at {} and {} do not commute on face {face:?}",
                            cx.labels[a], cx.labels[b]
                        )));
                    }
                }
            }
            let prod = face.iter().fold(Matrix::identity(ring, s.dim), |acc, &v| acc.mul(&s.lambdas[v]));
            let cols = prod.column_space();
            let basis = Matrix::from_fn(ring, s.dim, cols.len(), |i, j| cols[j][i].clone());
            level.push(basis);
        }
        bases.push(level);
    }
    let dims: Vec<Vec<usize>> = bases.iter().map(|l| l.iter().map(Matrix::cols).collect()).collect();
    let mut maps: Vec<Vec<Vec<Matrix>>> = vec![vec![Vec::new(); cx.num_faces(0)]];
    for k in 1..top {
        let mut level = Vec::new();
        for (fi, face) in cx.faces(k).iter().enumerate() {
            let mut per = Vec::new();
            for i in 0..=k {
                let sub = cx.face_index(&drop_vertex(face, i)).expect("closed");
                let (big, small) = (&bases[k][fi], &bases[k - 1][sub]);
                let mut m = Matrix::zeros(ring, small.cols(), big.cols());
                for j in 0..big.cols() {
                    let coords = small.solve(&big.column(j)).ok_or_else(|| {
                        Error::Violation(format!("image on {face:?} is not contained in the image on its facet"))
                    })?;
                    for (r, c) in coords.into_iter().enumerate() {
                        m[(r, j)] = c;
                    }
                }
                per.push(m);
            }
            level.push(per);
        }
        maps.push(level);
    }
    Cosheaf::new(cx.clone(), ring.clone(), dims, maps, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub verdict: Verdict,
    pub homology: HomologyReport,
    /// The full system, kept only for counterexamples.
    pub system: Option<SystemDoc>,
}

/// Homology of the idempotent cosheaf; a nonzero group in positive degree is
/// a counterexample and carries the full system.
pub fn conjecture_probe(s: &IdempotentSystem) -> Result<ProbeReport> {
    if !s.complex.is_tree() && !s.cat0_asserted {
        return Err(Error::Unsupported("the probe needs a tree or a complex asserted to be CAT(0)".into()));
    }
    let v = validate_geodesic_system(s)?;
    if !v.valid {
        return Err(Error::invalid(format!(
            "system is not geodesic ({} violations, first {:?})",
            v.violations.len(),
            v.violations[0]
        )));
    }
    let c = idempotent_cosheaf(s)?;
    let h = homology(&chain_complex(&c))?;
    let verdict = if h.acyclic_above_zero() { Verdict::Consistent } else { Verdict::Counterexample };
    let system = (verdict == Verdict::Counterexample).then(|| SystemDoc::from_system(s));
    Ok(ProbeReport { verdict, homology: h, system })
}

/// A unimodular matrix `L U` with small random entries.
fn random_unimodular(ring: &Ring, d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut l = Matrix::identity(ring, d);
    let mut u = Matrix::identity(ring, d);
    for i in 0..d {
        for j in 0..i {
            l[(i, j)] = ring.from_i64(rng.gen_range(-2..=2));
            u[(j, i)] = ring.from_i64(rng.gen_range(-2..=2));
        }
    }
    l.mul(&u)
}

/// Diagonal idempotents whose supports are random subtrees, optionally
/// conjugated by a seeded unimodular matrix.
pub fn generate_geodesic_system(
    tree: &SimplicialComplex,
    dim: usize,
    ring: &Ring,
    seed: u64,
    conjugate: bool,
) -> Result<IdempotentSystem> {
    if !tree.is_tree() {
        return Err(Error::invalid("geodesic systems are generated on trees only"));
    }
    let n = tree.n_vertices();
    let adj = tree.adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support = vec![vec![false; dim]; n];
    for j in 0..dim {
        let size = rng.gen_range(0..=n);
        if size == 0 {
            continue;
        }
        let mut inside = vec![false; n];
        let start = rng.gen_range(0..n);
        inside[start] = true;
        for _ in 1..size {
            let frontier: Vec<usize> =
                (0..n).filter(|&v| !inside[v] && adj[v].iter().any(|&w| inside[w])).collect();
            if frontier.is_empty() {
                break;
            }
            inside[frontier[rng.gen_range(0..frontier.len())]] = true;
        }
        for v in 0..n {
            support[v][j] = inside[v];
        }
    }
    let mut lambdas: Vec<Matrix> = support
        .iter()
        .map(|s| Matrix::diagonal(ring, s.iter().map(|&b| if b { ring.one() } else { ring.zero() }).collect()))
        .collect();
    if conjugate && dim > 0 {
        let p = random_unimodular(ring, dim, &mut rng);
        let p_inv = p.inverse().expect("unimodular");
        lambdas = lambdas.iter().map(|m| p.mul(m).mul(&p_inv)).collect();
    }
    Ok(IdempotentSystem::new(tree.clone(), ring.clone(), dim, lambdas, None)?.with_seed(Some(seed)))
}

// JSON interchange.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDoc {
    #[serde(default = "schema_one")]
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// Generating faces; the complex is their closure under subsets.
    pub faces: Vec<Vec<usize>>,
}

fn schema_one() -> u32 {
    1
}

impl ComplexDoc {
    pub fn from_complex(c: &SimplicialComplex) -> Self {
        ComplexDoc { schema: 1, vertices: Some(c.n_vertices()), labels: Some(c.labels.clone()), faces: c.facets() }
    }

    pub fn build(&self) -> Result<SimplicialComplex> {
        let labels = match (&self.labels, self.vertices) {
            (Some(l), Some(n)) if l.len() != n => {
                return Err(Error::invalid("labels and vertex count disagree"));
            }
            (Some(l), _) => l.clone(),
            (None, Some(n)) => (0..n).map(|v| v.to_string()).collect(),
            (None, None) => {
                let n = self.faces.iter().flatten().max().map_or(0, |&m| m + 1);
                (0..n).map(|v| v.to_string()).collect()
            }
        };
        SimplicialComplex::with_labels(labels, &self.faces)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicEntry {
    pub x: usize,
    pub y: usize,
    pub simplex: Vec<usize>,
}

/// Interchange form of an idempotent system; matrices are row-major arrays
/// of integers or rational strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDoc {
    #[serde(default = "schema_one")]
    pub schema: u32,
    pub ring: String,
    pub dim: usize,
    pub complex: ComplexDoc,
    pub lambdas: Vec<Vec<Vec<serde_json::Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesics: Option<Vec<GeodesicEntry>>,
    #[serde(default)]
    pub cat0: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn matrix_json(m: &Matrix) -> Vec<Vec<serde_json::Value>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|s| serde_json::to_value(s).expect("scalar")).collect())
        .collect()
}

pub fn matrix_from_json(ring: &Ring, rows: &[Vec<serde_json::Value>], cols: usize) -> Result<Matrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|v| scalar_from_json(ring, v)).collect::<Result<Vec<Scalar>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(ring, rows, cols)
}

impl SystemDoc {
    pub fn from_system(s: &IdempotentSystem) -> Self {
        let tree = s.complex.is_tree();
        let mut geodesics: Vec<GeodesicEntry> = s
            .first_simplex
            .iter()
            .map(|(&(x, y), simplex)| GeodesicEntry { x, y, simplex: simplex.clone() })
            .collect();
        geodesics.sort_by_key(|g| (g.x, g.y));
        SystemDoc {
            schema: 1,
            ring: s.ring.to_string(),
            dim: s.dim,
            complex: ComplexDoc::from_complex(&s.complex),
            lambdas: s.lambdas.iter().map(matrix_json).collect(),
            geodesics: (!tree).then_some(geodesics),
            cat0: s.cat0_asserted,
            seed: s.seed,
        }
    }

    pub fn build(&self) -> Result<IdempotentSystem> {
        let ring = Ring::parse(&self.ring)?;
        let complex = self.complex.build()?;
        let lambdas = self.lambdas.iter().map(|m| matrix_from_json(&ring, m, self.dim)).collect::<Result<Vec<_>>>()?;
        let oracle = self
            .geodesics
            .as_ref()
            .map(|g| g.iter().map(|e| ((e.x, e.y), e.simplex.clone())).collect::<HashMap<_, _>>());
        Ok(IdempotentSystem::new(complex, ring, self.dim, lambdas, oracle)?
            .assert_cat0(self.cat0)
            .with_seed(self.seed))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorestrictionDoc {
    pub face: Vec<usize>,
    /// Position of the dropped vertex.
    pub drop: usize,
    pub matrix: Vec<Vec<serde_json::Value>>,
}

/// Interchange form of a cosheaf without group action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosheafDoc {
    #[serde(default = "schema_one")]
    pub schema: u32,
    pub ring: String,
    pub complex: ComplexDoc,
    /// Fibre dimensions, in dimension then lexicographic face order.
    pub dims: Vec<Vec<usize>>,
    pub corestrictions: Vec<CorestrictionDoc>,
}

impl CosheafDoc {
    pub fn from_cosheaf(c: &Cosheaf) -> Self {
        let mut corestrictions = Vec::new();
        for k in 1..c.dims.len() {
            for (fi, face) in c.complex.faces(k).iter().enumerate() {
                for i in 0..=k {
                    corestrictions.push(CorestrictionDoc {
                        face: face.clone(),
                        drop: i,
                        matrix: matrix_json(&c.maps[k][fi][i]),
                    });
                }
            }
        }
        CosheafDoc {
            schema: 1,
            ring: c.ring.to_string(),
            complex: ComplexDoc::from_complex(&c.complex),
            dims: c.dims.clone(),
            corestrictions,
        }
    }

    pub fn build(&self) -> Result<Cosheaf> {
        let ring = Ring::parse(&self.ring)?;
        let complex = self.complex.build()?;
        let f = complex.f_vector();
        if self.dims.len() != f.len() || self.dims.iter().zip(&f).any(|(d, &n)| d.len() != n) {
            return Err(Error::invalid("one dimension per face is required"));
        }
        let mut maps: Vec<Vec<Vec<Option<Matrix>>>> =
            f.iter().enumerate().map(|(k, &n)| vec![vec![None; if k == 0 { 0 } else { k + 1 }]; n]).collect();
        for c in &self.corestrictions {
            let k = c.face.len().checked_sub(1).ok_or_else(|| Error::invalid("empty face"))?;
            let fi = complex.face_index(&c.face).ok_or_else(|| Error::invalid(format!("{:?} is not a face", c.face)))?;
            if k == 0 || c.drop > k {
                return Err(Error::invalid(format!("bad corestriction index on {:?}", c.face)));
            }
            maps[k][fi][c.drop] = Some(matrix_from_json(&ring, &c.matrix, self.dims[k][fi])?);
        }
        let maps = maps
            .into_iter()
            .map(|l| {
                l.into_iter()
                    .map(|p| p.into_iter().map(|m| m.ok_or_else(|| Error::invalid("missing corestriction"))).collect())
                    .collect::<Result<Vec<Vec<Matrix>>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Cosheaf::new(complex, ring, self.dims.clone(), maps, None)
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;

    fn q() -> Ring {
        Ring::Q
    }

    fn trivial_homology(cx: &SimplicialComplex, ring: &Ring) -> HomologyReport {
        let c = trivial_cosheaf(cx, ring, 1);
        let cc = chain_complex(&c);
        assert!(cc.squares_to_zero());
        homology(&cc).unwrap()
    }

    fn ranks(h: &HomologyReport) -> Vec<usize> {
        h.degrees.iter().map(|d| d.rank).collect()
    }

    #[test]
    fn classical_homology() {
        assert_eq!(ranks(&trivial_homology(&point(), &q())), vec![1]);
        assert_eq!(ranks(&trivial_homology(&cycle(3), &q())), vec![1, 1]);
        assert_eq!(ranks(&trivial_homology(&simplex(2), &q())), vec![1, 0, 0]);
        assert_eq!(ranks(&trivial_homology(&sphere(2), &q())), vec![1, 0, 1]);
        assert_eq!(ranks(&trivial_homology(&octahedron(), &q())), vec![1, 0, 1]);
        assert_eq!(ranks(&trivial_homology(&torus(), &q())), vec![1, 2, 1]);
        assert_eq!(ranks(&trivial_homology(&cycle(5).cone("c"), &q())), vec![1, 0, 0]);
    }

    #[test]
    fn projective_plane_torsion() {
        let hz = trivial_homology(&projective_plane(), &Ring::Z);
        assert_eq!(ranks(&hz), vec![1, 0, 0]);
        assert_eq!(hz.degrees[1].torsion, vec!["2".to_string()]);
        let h2 = trivial_homology(&projective_plane(), &Ring::prime_field(2).unwrap());
        assert_eq!(ranks(&h2), vec![1, 1, 1]);
        let hq = trivial_homology(&projective_plane(), &q());
        assert_eq!(hq.euler_chains, hq.euler_homology);
    }

    #[test]
    fn solid_triangle_boundary_shapes() {
        let cc = chain_complex(&trivial_cosheaf(&simplex(2), &q(), 1));
        assert_eq!((cc.boundaries[0].rows(), cc.boundaries[0].cols()), (3, 3));
        assert_eq!((cc.boundaries[1].rows(), cc.boundaries[1].cols()), (3, 1));
    }

    #[test]
    fn empty_complex() {
        let cc = chain_complex(&trivial_cosheaf(&SimplicialComplex::empty(), &q(), 1));
        assert!(cc.dims.is_empty() && cc.boundaries.is_empty());
        assert!(homology(&cc).unwrap().degrees.is_empty());
    }

    #[test]
    fn trivial_cosheaf_is_valid() {
        for cx in [path(3), sphere(2), torus()] {
            let c = trivial_cosheaf(&cx, &q(), 2);
            assert!(validate_cosheaf(&c).valid);
            assert!(c.corestriction(1, 0, 0).is_identity());
        }
    }

    #[test]
    fn broken_composition_is_localised() {
        let cx = simplex(2);
        let mut c = trivial_cosheaf(&cx, &q(), 1);
        c.maps[2][0][0] = Matrix::from_i64(&q(), &[vec![2]]);
        let v = validate_cosheaf(&c);
        assert!(!v.valid);
        assert!(v.violations.iter().all(|x| x.axiom == "ii" && x.faces[0] == vec![0, 1, 2]));
    }

    #[test]
    fn group_action_axioms() {
        // Z/2 swapping the ends of a path, acting by -1 on the middle vertex's fibre.
        let cx = path(3);
        let r = q();
        let id = Matrix::identity(&r, 1);
        let neg = id.scale(&r.from_i64(-1));
        let e = vec![vec![id.clone(); 3], vec![id.clone(); 2]];
        let s = vec![vec![id.clone(), id.clone(), id.clone()], vec![id.clone(), id.clone()]];
        let action = GroupAction { perms: vec![vec![0, 1, 2], vec![2, 1, 0]], mats: vec![e.clone(), s], product: vec![vec![0, 1], vec![1, 0]] };
        let mut c = trivial_cosheaf(&cx, &r, 1);
        c.action = Some(action.clone());
        assert!(validate_cosheaf(&c).valid);
        let mut bad = action;
        bad.mats[1][0][1] = neg;
        c.action = Some(bad.clone());
        let v = validate_cosheaf(&c);
        assert!(v.violations.iter().all(|x| x.axiom == "v") && !v.valid);
        bad.mats[1][1][0] = id.scale(&r.from_i64(2));
        c.action = Some(bad);
        let v = validate_cosheaf(&c);
        assert!(v.violations.iter().any(|x| x.axiom == "iii"));
        assert!(v.violations.iter().any(|x| x.axiom == "v"));
    }

    fn diag(r: &Ring, d: &[i64]) -> Matrix {
        Matrix::diagonal(r, d.iter().map(|&x| r.from_i64(x)).collect())
    }

    fn path_system(middle: &[i64]) -> IdempotentSystem {
        let r = q();
        IdempotentSystem::new(path(3), r.clone(), 2, vec![diag(&r, &[1, 0]), diag(&r, middle), diag(&r, &[1, 0])], None)
            .unwrap()
    }

    #[test]
    fn worked_path_system() {
        let s = path_system(&[1, 1]);
        assert!(validate_geodesic_system(&s).unwrap().valid);
        let c = idempotent_cosheaf(&s).unwrap();
        assert!(validate_cosheaf(&c).valid);
        assert_eq!(c.dims, vec![vec![1, 2, 1], vec![1, 1]]);
        let cc = chain_complex(&c);
        assert_eq!(cc.dims, vec![4, 2]);
        let p = conjecture_probe(&s).unwrap();
        assert_eq!(p.verdict, Verdict::Consistent);
        assert_eq!(p.homology.rank(1), 0);
        assert!(p.system.is_none());
    }

    #[test]
    fn broken_support_fails_condition_two() {
        let v = validate_geodesic_system(&path_system(&[0, 1])).unwrap();
        assert!(!v.valid);
        assert!(v.violations.iter().any(|x| x.condition == "ii" && x.x == 0 && x.y == Some(2)));
    }

    #[test]
    fn degenerate_systems() {
        let r = q();
        let single = IdempotentSystem::new(point(), r.clone(), 2, vec![diag(&r, &[1, 0])], None).unwrap();
        assert!(validate_geodesic_system(&single).unwrap().valid);
        let zero = IdempotentSystem::new(path(3), r.clone(), 2, vec![diag(&r, &[0, 0]); 3], None).unwrap();
        let p = conjecture_probe(&zero).unwrap();
        assert_eq!(p.verdict, Verdict::Consistent);
        assert!(p.homology.degrees.iter().all(|d| d.rank == 0));
        let ident = IdempotentSystem::new(path(3), r.clone(), 2, vec![diag(&r, &[1, 1]); 3], None).unwrap();
        let c = idempotent_cosheaf(&ident).unwrap();
        assert!(c.maps.iter().flatten().flatten().all(Matrix::is_identity));
        let empty = generate_geodesic_system(&path(4), 0, &r, 1, false).unwrap();
        assert!(validate_geodesic_system(&empty).unwrap().valid);
    }

    #[test]
    fn generated_systems_validate() {
        let s = generate_geodesic_system(&path(5), 4, &q(), 7, false).unwrap();
        assert!(validate_geodesic_system(&s).unwrap().valid);
        let t = generate_geodesic_system(&path(5), 4, &q(), 7, true).unwrap();
        assert!(validate_geodesic_system(&t).unwrap().valid);
        assert!((0..5).any(|x| {
            let m = t.lambda(x);
            (0..4).any(|i| (0..4).any(|j| i != j && !q().is_zero(&m[(i, j)])))
        }));
        assert!(generate_geodesic_system(&cycle(4), 2, &q(), 0, false).is_err());
    }

    #[test]
    fn star_sweep_is_consistent() {
        for seed in 0..100 {
            let s = generate_geodesic_system(&star(4), 3, &q(), seed, seed % 2 == 1).unwrap();
            let p = conjecture_probe(&s).unwrap();
            assert_eq!(p.verdict, Verdict::Consistent, "seed {seed}");
        }
    }

    #[test]
    fn probe_refuses_non_tree_without_assertion() {
        let r = q();
        let cx = cycle(3);
        let mut oracle = HashMap::new();
        for x in 0..3 {
            for y in 0..3 {
                let s = if x == y { vec![x] } else { let mut e = vec![x, y]; e.sort(); e };
                oracle.insert((x, y), s);
            }
        }
        let s = IdempotentSystem::new(cx, r.clone(), 1, vec![diag(&r, &[1]); 3], Some(oracle)).unwrap();
        assert!(matches!(conjecture_probe(&s), Err(Error::Unsupported(_))));
        let s = s.assert_cat0(true);
        let p = conjecture_probe(&s).unwrap();
        // The identity system on a circle is the trivial cosheaf: H_1 = Q.
        assert_eq!(p.verdict, Verdict::Counterexample);
        assert!(p.system.is_some());
    }

    #[test]
    fn json_round_trips() {
        let s = generate_geodesic_system(&random_tree(7, 3), 3, &Ring::prime_field(5).unwrap(), 9, true).unwrap();
        let doc = SystemDoc::from_system(&s);
        let text = serde_json::to_string(&doc).unwrap();
        let back: SystemDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        let rebuilt = back.build().unwrap();
        assert_eq!(SystemDoc::from_system(&rebuilt), doc);
        let c = idempotent_cosheaf(&s).unwrap();
        let cd = CosheafDoc::from_cosheaf(&c);
        let c2 = serde_json::from_str::<CosheafDoc>(&serde_json::to_string(&cd).unwrap()).unwrap().build().unwrap();
        assert_eq!(CosheafDoc::from_cosheaf(&c2), cd);
    }
}
