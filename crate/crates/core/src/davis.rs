//! Finite balls in buildings and Coxeter complexes, and their Davis
//! realisations: simplicial complexes of chains of spherical residues.

use std::collections::{BTreeMap, HashMap};

use serde::{Serialize, Serializer};

use crate::adrep::ad_exponential;
use crate::cosheaf::SimplicialComplex;
use crate::error::{Error, Result};
use crate::exactalg::{Matrix, Ring, Scalar};
use crate::gcm::{classify, ComponentKind, RootDatum};
use crate::kmalg::assemble_g;
use crate::weyl::{enumerate_real_roots, enumerate_weyl_ball, enumerate_weyl_ball_capped, is_spherical, longest_element, one_based, WeylElement};

fn ser_one_based<S: Serializer>(v: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    one_based(v).serialize(s)
}

/// Coxeter exponent `m_ij`, `None` for infinity.
pub fn coxeter_exponent(datum: &RootDatum, i: usize, j: usize) -> Option<u32> {
    if i == j {
        return Some(1);
    }
    match datum.gcm.get(i, j) * datum.gcm.get(j, i) {
        0 => Some(2),
        1 => Some(3),
        2 => Some(4),
        3 => Some(6),
        _ => None,
    }
}

fn spherical_types(datum: &RootDatum) -> Vec<Vec<usize>> {
    let n = datum.n();
    let mut out: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect::<Vec<usize>>())
        .filter(|j| is_spherical(&datum.gcm, j))
        .collect();
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

/// Decoration for reducible matrices with finite-type components; trivial
/// otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Marking {
    Trivial,
    FiniteComponents { components: Vec<Vec<usize>> },
}

fn marking(datum: &RootDatum) -> Marking {
    let t = classify(&datum.gcm);
    let finite: Vec<Vec<usize>> =
        t.components.iter().filter(|c| c.kind == ComponentKind::Finite).map(|c| c.indices.clone()).collect();
    if t.components.len() > 1 && !finite.is_empty() {
        Marking::FiniteComponents { components: finite }
    } else {
        Marking::Trivial
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DavisVertex {
    pub label: String,
    /// Spherical type `J` (1-based when serialized).
    #[serde(serialize_with = "ser_one_based")]
    pub types: Vec<usize>,
    /// Minimal coset representative, or the first chamber of the residue.
    #[serde(serialize_with = "ser_one_based")]
    pub word: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<Scalar>>,
    /// Number of chambers of the residue.
    pub size: u64,
    /// All chambers of the residue lie in the ball.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DavisComplex {
    pub complex: SimplicialComplex,
    pub vertices: Vec<DavisVertex>,
    pub marking: Marking,
    pub source: String,
}

#[derive(Serialize)]
struct DavisDump<'a> {
    schema: u32,
    source: &'a str,
    marking: &'a Marking,
    vertices: &'a [DavisVertex],
    /// Simplices by dimension, as vertex indices.
    simplices: Vec<&'a [Vec<usize>]>,
    /// Per simplex, whether every vertex is complete.
    complete: Vec<Vec<bool>>,
}

impl DavisComplex {
    fn from_poset(vertices: Vec<DavisVertex>, up: Vec<Vec<usize>>, marking: Marking, source: String) -> Self {
        // Maximal chains follow covers, which raise |J| by one.
        let mut chains = Vec::new();
        let minimal: Vec<usize> = {
            let mut has_lower = vec![false; vertices.len()];
            for u in &up {
                for &v in u {
                    has_lower[v] = true;
                }
            }
            (0..vertices.len()).filter(|&v| !has_lower[v]).collect()
        };
        fn walk(v: usize, up: &[Vec<usize>], chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            chain.push(v);
            if up[v].is_empty() {
                out.push(chain.clone());
            }
            for &w in &up[v] {
                walk(w, up, chain, out);
            }
            chain.pop();
        }
        for v in minimal {
            walk(v, &up, &mut Vec::new(), &mut chains);
        }
        let labels = vertices.iter().map(|v| v.label.clone()).collect();
        let complex = SimplicialComplex::with_labels(labels, &chains).expect("chains are simplices");
        DavisComplex { complex, vertices, marking, source }
    }

    /// The subcomplex on residues lying entirely inside the ball.
    pub fn core(&self) -> DavisComplex {
        let keep: Vec<usize> = (0..self.vertices.len()).filter(|&v| self.vertices[v].complete).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let facets: Vec<Vec<usize>> = (0..=self.complex.dim().max(0) as usize)
            .flat_map(|k| self.complex.faces(k).iter())
            .filter(|f| f.iter().all(|v| pos.contains_key(v)))
            .map(|f| f.iter().map(|v| pos[v]).collect())
            .collect();
        let vertices: Vec<DavisVertex> = keep.iter().map(|&v| self.vertices[v].clone()).collect();
        let labels = vertices.iter().map(|v| v.label.clone()).collect();
        DavisComplex {
            complex: SimplicialComplex::with_labels(labels, &facets).expect("subcomplex"),
            vertices,
            marking: self.marking.clone(),
            source: format!("{} (core)", self.source),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let simplices: Vec<&[Vec<usize>]> =
            (0..self.complex.f_vector().len()).map(|k| self.complex.faces(k)).collect();
        let complete = simplices
            .iter()
            .map(|level| level.iter().map(|f| f.iter().all(|&v| self.vertices[v].complete)).collect())
            .collect();
        serde_json::to_value(DavisDump {
            schema: 1,
            source: &self.source,
            marking: &self.marking,
            vertices: &self.vertices,
            simplices,
            complete,
        })
        .expect("serializable")
    }

    /// Edge list of the 1-skeleton, tab separated, with vertex labels.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("source\ttarget\n");
        for e in self.complex.faces(1) {
            out.push_str(&format!("{}\t{}\n", self.vertices[e[0]].label, self.vertices[e[1]].label));
        }
        out
    }
}

fn set_label(j: &[usize]) -> String {
    let inner: Vec<String> = j.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn word_label(w: &[usize]) -> String {
    if w.is_empty() {
        "e".into()
    } else {
        one_based(w).iter().map(usize::to_string).collect::<Vec<_>>().join(".")
    }
}

/// Minimal representative of `w W_K`.
fn min_rep(datum: &RootDatum, w: &WeylElement, k: &[usize]) -> WeylElement {
    let mut w = w.clone();
    'strip: loop {
        for &i in k {
            if w.is_right_descent(i) {
                w = w.mul_simple(datum, i).expect("index in range");
                continue 'strip;
            }
        }
        break;
    }
    WeylElement::from_word(datum, w.word()).expect("valid word")
}

/// Largest finite-type building ball that is enumerated.
pub const BUILDING_CHAMBER_CAP: usize = 20_000;

/// Largest Weyl ball turned into a Davis complex.
pub const DAVIS_BALL_CAP: usize = 50_000;

/// The poset of cosets `w W_J` (`J` spherical, `w` minimal, `l(w) <= L`)
/// realised as chains.
pub fn coxeter_davis_ball(datum: &RootDatum, max_len: usize) -> Result<DavisComplex> {
    let ball = enumerate_weyl_ball_capped(datum, max_len, DAVIS_BALL_CAP)?;
    let index: HashMap<Vec<usize>, usize> = ball.iter().enumerate().map(|(i, w)| (w.word().to_vec(), i)).collect();
    let types = spherical_types(datum);
    let mut vertices = Vec::new();
    let mut key: HashMap<(Vec<usize>, usize), usize> = HashMap::new();
    for j in &types {
        let top = longest_element(datum, j)?.length();
        for (wi, w) in ball.iter().enumerate() {
            if j.iter().any(|&i| w.is_right_descent(i)) {
                continue;
            }
            key.insert((j.clone(), wi), vertices.len());
            vertices.push(DavisVertex {
                label: format!("{}{}", word_label(w.word()), set_label(j)),
                types: j.clone(),
                word: w.word().to_vec(),
                params: None,
                size: 0,
                complete: w.length() + top <= max_len,
            });
        }
    }
    // Coset sizes |W_J|.
    for v in &mut vertices {
        v.size = enumerate_weyl_ball(datum, longest_element(datum, &v.types)?.length())?
            .iter()
            .filter(|u| u.word().iter().all(|i| v.types.contains(i)))
            .count() as u64;
    }
    let mut up = vec![Vec::new(); vertices.len()];
    for (&(ref j, wi), &v) in &key {
        for k in &types {
            if k.len() == j.len() + 1 && j.iter().all(|i| k.contains(i)) {
                let r = min_rep(datum, &ball[wi], k);
                let ri = index[r.word()];
                up[v].push(key[&(k.clone(), ri)]);
            }
        }
    }
    for u in &mut up {
        u.sort_unstable();
    }
    Ok(DavisComplex::from_poset(
        vertices,
        up,
        marking(datum),
        format!("coxeter ball of {:?}, radius {max_len}", datum.gcm.rows()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Chambers as Borel subalgebras of the adjoint Chevalley group over `F_q`.
    FiniteType,
    /// The `(q+1)`-regular tree of a rank-2 matrix with `m_12 = infinity`.
    Tree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chamber {
    /// Reduced word (ShortLex), 1-based when serialized.
    #[serde(serialize_with = "ser_one_based")]
    pub word: Vec<usize>,
    /// Bruhat-cell parameters, one per letter.
    pub params: Vec<Scalar>,
    pub distance: usize,
}

/// A residue of spherical type `J` (|J| >= 1) meeting the ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residue {
    #[serde(serialize_with = "ser_one_based")]
    pub types: Vec<usize>,
    /// Chambers of the ball inside the residue, as indices.
    pub chambers: Vec<usize>,
    /// Total number of chambers of the residue.
    pub size: u64,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildingBall {
    pub backend: Backend,
    pub gcm: Vec<Vec<i64>>,
    pub q: u64,
    pub radius: usize,
    pub chambers: Vec<Chamber>,
    pub residues: Vec<Residue>,
    #[serde(skip)]
    marking: Marking,
}

impl BuildingBall {
    pub fn panels(&self) -> impl Iterator<Item = &Residue> {
        self.residues.iter().filter(|r| r.types.len() == 1)
    }

    /// Pairs of panels sharing a chamber.
    pub fn panel_adjacency(&self) -> Vec<(usize, usize)> {
        let panels: Vec<(usize, &Residue)> =
            self.residues.iter().enumerate().filter(|(_, r)| r.types.len() == 1).collect();
        let mut by_chamber: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, p) in &panels {
            for &c in &p.chambers {
                by_chamber.entry(c).or_default().push(*i);
            }
        }
        let mut edges: Vec<(usize, usize)> = by_chamber
            .values()
            .flat_map(|ps| ps.iter().enumerate().flat_map(move |(a, &x)| ps[a + 1..].iter().map(move |&y| (x.min(y), x.max(y)))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn panels_tsv(&self) -> String {
        let mut out = String::from("panel\ttype\tsize\tcomplete\tchambers\n");
        for (i, r) in self.residues.iter().enumerate().filter(|(_, r)| r.types.len() == 1) {
            let cs: Vec<String> = r.chambers.iter().map(usize::to_string).collect();
            out.push_str(&format!("{i}\t{}\t{}\t{}\t{}\n", r.types[0] + 1, r.size, r.complete, cs.join(",")));
        }
        out
    }
}

fn field_ring(q: u64) -> Result<Ring> {
    let (p, m) = prime_power(q).ok_or_else(|| Error::invalid(format!("q = {q} is not a prime power")))?;
    Ring::finite(p, m)
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = q;
    let mut m = 0;
    while r.is_multiple_of(p) {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

fn params_of(ring: &Ring, len: usize) -> Vec<Vec<Scalar>> {
    let els = ring.elements().expect("finite field");
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Scalar>| {
                els.iter().map(move |e| {
                    let mut v = p.clone();
                    v.push(e.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Chambers at gallery distance at most `radius` from the base chamber.
pub fn building_ball(datum: &RootDatum, q: u64, radius: usize) -> Result<BuildingBall> {
    let ring = field_ring(q)?;
    let n = datum.n();
    if datum.gcm.is_finite_type() {
        finite_building(datum, &ring, q, radius)
    } else if n == 2 && coxeter_exponent(datum, 0, 1).is_none() {
        let total: u128 = 1 + (1..=radius as u32).map(|k| 2 * (q as u128).saturating_pow(k)).sum::<u128>();
        if total > BUILDING_CHAMBER_CAP as u128 {
            return Err(Error::WindowExceeded(format!("ball has {total} chambers, cap is {BUILDING_CHAMBER_CAP}")));
        }
        Ok(tree_building(datum, &ring, q, radius))
    } else {
        Err(Error::Unsupported(
            "building balls are available for finite type and for rank 2 with m_12 = infinity; \
             no backend covers this matrix"
                .into(),
        ))
    }
}

fn tree_building(datum: &RootDatum, ring: &Ring, q: u64, radius: usize) -> BuildingBall {
    let mut chambers = Vec::new();
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut all_words = vec![Vec::new()];
    for _ in 0..radius {
        words = words
            .iter()
            .flat_map(|w| (0..2).filter(move |&s| w.last() != Some(&s)).map(move |s| {
                let mut v = w.clone();
                v.push(s);
                v
            }))
            .collect();
        all_words.extend(words.iter().cloned());
    }
    for w in &all_words {
        for p in params_of(ring, w.len()) {
            chambers.push(Chamber { word: w.clone(), params: p, distance: w.len() });
        }
    }
    let index: HashMap<(Vec<usize>, Vec<Scalar>), usize> =
        chambers.iter().enumerate().map(|(i, c)| ((c.word.clone(), c.params.clone()), i)).collect();
    // The s-panel of a chamber is keyed by the chamber it hangs from.
    let mut panels: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (ci, c) in chambers.iter().enumerate() {
        for s in 0..2 {
            let root = if c.word.last() == Some(&s) {
                let k = c.word.len() - 1;
                index[&(c.word[..k].to_vec(), c.params[..k].to_vec())]
            } else {
                ci
            };
            panels.entry((s, root)).or_default().push(ci);
        }
    }
    let residues = panels
        .into_iter()
        .map(|((s, root), mut cs)| {
            cs.sort_unstable();
            cs.dedup();
            Residue { types: vec![s], complete: chambers[root].distance < radius, chambers: cs, size: q + 1 }
        })
        .collect();
    BuildingBall {
        backend: Backend::Tree,
        gcm: datum.gcm.rows(),
        q,
        radius,
        chambers,
        residues,
        marking: marking(datum),
    }
}

struct Chevalley {
    ring: Ring,
    /// `Ad(X_{a_i}(t))` by `(i, t)` and `Ad(n_i)`.
    x: HashMap<(usize, Scalar), Matrix>,
    n: Vec<Matrix>,
    /// Basis indices of the parabolic subalgebra of each spherical type.
    parabolic: HashMap<Vec<usize>, Vec<usize>>,
}

impl Chevalley {
    fn new(datum: &RootDatum, ring: &Ring) -> Result<Self> {
        let top = enumerate_real_roots(datum, 64).iter().map(|r| r.height).max().unwrap_or(1);
        let alg = assemble_g(datum, top + 1, ring)?;
        if !alg.is_exact() {
            return Err(Error::Unsupported("adjoint group needs the whole algebra in the window".into()));
        }
        let els = ring.elements().expect("finite field");
        let mut x = HashMap::new();
        let mut nmat = Vec::new();
        for i in 0..datum.n() {
            let a: Vec<i64> = (0..datum.n()).map(|k| (k == i) as i64).collect();
            let na: Vec<i64> = a.iter().map(|v| -v).collect();
            for t in &els {
                x.insert((i, t.clone()), ad_exponential(&alg, &a, t)?.matrix);
            }
            let one = ring.one();
            let xm = ad_exponential(&alg, &na, &ring.neg(&one))?.matrix;
            let xp = &x[&(i, one)];
            nmat.push(xp.mul(&xm).mul(xp));
        }
        let mut parabolic = HashMap::new();
        for j in spherical_types(datum) {
            let idx: Vec<usize> = (0..alg.dim())
                .filter(|&b| {
                    let deg = alg.degree(b);
                    deg.iter().all(|&c| c >= 0)
                        || deg.iter().enumerate().all(|(k, &c)| c == 0 || j.contains(&k))
                })
                .collect();
            parabolic.insert(j, idx);
        }
        Ok(Chevalley { ring: ring.clone(), x, n: nmat, parabolic })
    }

    fn element(&self, word: &[usize], params: &[Scalar]) -> Matrix {
        let dim = self.n[0].rows();
        let mut g = Matrix::identity(&self.ring, dim);
        for (&i, t) in word.iter().zip(params) {
            g = g.mul(&self.x[&(i, t.clone())]).mul(&self.n[i]);
        }
        g
    }

    /// The subspace `Ad(g) p_J`, in canonical form.
    fn key(&self, g: &Matrix, j: &[usize]) -> Vec<Vec<Scalar>> {
        let idx = &self.parabolic[j];
        Matrix::from_fn(&self.ring, g.rows(), idx.len(), |r, c| g[(r, idx[c])].clone()).column_space()
    }
}

/// Poincare polynomial of `W_J` at `q`.
fn residue_size(datum: &RootDatum, j: &[usize], q: u64) -> Result<u64> {
    let top = longest_element(datum, j)?.length();
    Ok(enumerate_weyl_ball(datum, top)?
        .iter()
        .filter(|u| u.word().iter().all(|i| j.contains(i)))
        .map(|u| q.pow(u.length() as u32))
        .sum())
}

fn finite_building(datum: &RootDatum, ring: &Ring, q: u64, radius: usize) -> Result<BuildingBall> {
    let chev = Chevalley::new(datum, ring)?;
    let weyl = enumerate_weyl_ball(datum, radius)?;
    let total: u128 = weyl.iter().map(|w| (q as u128).saturating_pow(w.length() as u32)).sum();
    if total > BUILDING_CHAMBER_CAP as u128 {
        return Err(Error::WindowExceeded(format!("ball has {total} chambers, cap is {BUILDING_CHAMBER_CAP}")));
    }
    let mut chambers = Vec::new();
    let mut mats = Vec::new();
    for w in &weyl {
        for p in params_of(ring, w.length()) {
            mats.push(chev.element(w.word(), &p));
            chambers.push(Chamber { word: w.word().to_vec(), params: p, distance: w.length() });
        }
    }
    let mut by_key: HashMap<Vec<Vec<Scalar>>, usize> = HashMap::new();
    for (i, g) in mats.iter().enumerate() {
        if by_key.insert(chev.key(g, &[]), i).is_some() {
            return Err(Error::Unsupported(format!(
                "Borel subalgebras do not separate chambers over F_{q}; the adjoint backend cannot be used"
            )));
        }
    }
    let mut residues = Vec::new();
    for j in spherical_types(datum).into_iter().filter(|j| !j.is_empty()) {
        let size = residue_size(datum, &j, q)?;
        let mut groups: BTreeMap<Vec<Vec<Scalar>>, Vec<usize>> = BTreeMap::new();
        for (i, g) in mats.iter().enumerate() {
            groups.entry(chev.key(g, &j)).or_default().push(i);
        }
        let mut found: Vec<Residue> = groups
            .into_values()
            .map(|cs| Residue { types: j.clone(), complete: cs.len() as u64 == size, chambers: cs, size })
            .collect();
        // Panels: count the full panel explicitly rather than trusting the formula.
        if j.len() == 1 {
            let s = j[0];
            for r in &mut found {
                let g = &mats[r.chambers[0]];
                let mut members: Vec<Vec<Vec<Scalar>>> = vec![chev.key(g, &[])];
                for t in ring.elements().expect("finite field") {
                    let h = g.mul(&chev.x[&(s, t)]).mul(&chev.n[s]);
                    members.push(chev.key(&h, &[]));
                }
                members.sort();
                members.dedup();
                r.size = members.len() as u64;
                r.complete = members.iter().all(|k| by_key.contains_key(k));
            }
        }
        found.sort_by(|a, b| a.chambers.cmp(&b.chambers));
        residues.extend(found);
    }
    Ok(BuildingBall {
        backend: Backend::FiniteType,
        gcm: datum.gcm.rows(),
        q,
        radius,
        chambers,
        residues,
        marking: marking(datum),
    })
}

fn params_label(p: &[Scalar]) -> String {
    p.iter().map(Scalar::to_string).collect::<Vec<_>>().join(",")
}

/// Chains of residues meeting the ball, ordered by inclusion.
pub fn davis_realization_of_ball(ball: &BuildingBall) -> DavisComplex {
    let mut vertices: Vec<DavisVertex> = ball
        .chambers
        .iter()
        .map(|c| DavisVertex {
            label: format!("{}[{}]{{}}", word_label(&c.word), params_label(&c.params)),
            types: Vec::new(),
            word: c.word.clone(),
            params: Some(c.params.clone()),
            size: 1,
            complete: true,
        })
        .collect();
    let nc = vertices.len();
    for r in &ball.residues {
        let c = &ball.chambers[r.chambers[0]];
        vertices.push(DavisVertex {
            label: format!("{}[{}]{}", word_label(&c.word), params_label(&c.params), set_label(&r.types)),
            types: r.types.clone(),
            word: c.word.clone(),
            params: Some(c.params.clone()),
            size: r.size,
            complete: r.complete,
        });
    }
    let mut up = vec![Vec::new(); vertices.len()];
    for (ri, r) in ball.residues.iter().enumerate() {
        if r.types.len() == 1 {
            for &c in &r.chambers {
                up[c].push(nc + ri);
            }
        }
        for (si, s) in ball.residues.iter().enumerate() {
            if s.types.len() == r.types.len() + 1
                && r.types.iter().all(|t| s.types.contains(t))
                && s.chambers.binary_search(&r.chambers[0]).is_ok()
            {
                up[nc + ri].push(nc + si);
            }
        }
    }
    for u in &mut up {
        u.sort_unstable();
    }
    DavisComplex::from_poset(
        vertices,
        up,
        ball.marking.clone(),
        format!("building ball of {:?}, q = {}, radius {}", ball.gcm, ball.q, ball.radius),
    )
}

/// `|P_s : B|`, measured as the size of the base chamber's `s`-panel.
pub fn parabolic_index(datum: &RootDatum, q: u64, s: usize) -> Result<u64> {
    if s >= datum.n() {
        return Err(Error::invalid(format!("generator {} out of range 1..{}", s + 1, datum.n())));
    }
    let ball = building_ball(datum, q, 1)?;
    let size = ball.panels().find(|p| p.types == [s] && p.chambers.contains(&0)).map(|p| p.size);
    size.ok_or_else(|| Error::Violation("base chamber has no panel of this type".into()))
}
