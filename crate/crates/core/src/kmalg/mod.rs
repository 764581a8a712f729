//! Height-truncated Kac-Moody algebras `g = n_- + h + n_+` over `Z`, `Q`
//! and finite fields.
//!
//! Root spaces of height at most `H` come from the Serre quotient built in
//! [`free`]. The generators act through derivation rules, `n_-` is the
//! mirror image of `n_+` under `e_i <-> f_i, h -> -h`, and every other
//! adjoint operator is an iterated commutator of generator operators. On a
//! truncated window this is exact for every output that stays in the
//! window, since heights move monotonically along each product.
//!
//! Structure constants are stored over `Z` with respect to a lattice basis:
//! `Z^d` on `h`, `e_a, f_a` normalised so that `[e_a, f_a]` is the coroot on
//! real root spaces, and on imaginary root spaces the `Z`-span of all
//! brackets of lattice vectors (iterated to a fixed point).

pub mod free;
pub mod sparse;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{lattice_basis, Matrix, Ring, RingDescriptor, Scalar};
use crate::gcm::RootDatum;
use crate::weyl::{enumerate_real_roots, one_based, Root};

pub use free::{build_nplus_serre, Multiplicity, NPlus, Word};
pub use sparse::SparseOp;
use sparse::SparseVec;

type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Pos,
    Cartan,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisLabel {
    pub part: Part,
    /// Root-lattice degree (zero on the Cartan part).
    pub degree: Vec<i64>,
    /// Position inside the root space, or the coordinate of `Z^d`.
    pub index: usize,
    pub real: bool,
    pub label: String,
    /// Lyndon word (1-based) whose bracketing spans the element over `Q`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bracket {
    Value(Vec<Scalar>),
    /// The bracket lands outside the height window.
    Truncated,
}

#[derive(Debug, Clone)]
pub struct GradedLieAlgebra {
    datum: RootDatum,
    window: i64,
    ring: Ring,
    basis: Vec<BasisLabel>,
    by_degree: BTreeMap<Vec<i64>, Vec<usize>>,
    /// Adjoint operator of every basis element, over `Z`.
    table: Vec<SparseOp<BigInt>>,
    exact: bool,
    real_roots: Vec<Root>,
    mults: Vec<Multiplicity>,
    graded_dims: Vec<usize>,
}

fn height(deg: &[i64]) -> i64 {
    deg.iter().sum()
}

fn neg(deg: &[i64]) -> Vec<i64> {
    deg.iter().map(|x| -x).collect()
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Image of `[f_i, w]` for a Lyndon bracketing `w` of the `e`'s.
#[derive(Debug, Clone)]
enum FImage {
    Zero,
    /// `-h_i`.
    MinusCoroot(usize),
    Pos(Vec<i64>, Vec<Q>),
}

struct Builder<'a> {
    datum: &'a RootDatum,
    np: &'a NPlus,
    n: usize,
    pos_start: BTreeMap<Vec<i64>, usize>,
    neg_start: BTreeMap<Vec<i64>, usize>,
    cartan_start: usize,
    lyn_coords: HashMap<Word, (Vec<i64>, Vec<Q>)>,
    f_memo: HashMap<(usize, Word), FImage>,
}

impl<'a> Builder<'a> {
    fn content(&self, w: &[u8]) -> Vec<i64> {
        let mut c = vec![0; self.n];
        for &l in w {
            c[l as usize] += 1;
        }
        c
    }

    fn lyndon_coords(&mut self, w: &[u8]) -> Result<(Vec<i64>, Vec<Q>)> {
        if let Some(v) = self.lyn_coords.get(w) {
            return Ok(v.clone());
        }
        let deg = self.content(w);
        let c = self.np.coordinates(&deg, self.np.lyndon_poly(w))?;
        self.lyn_coords.insert(w.to_vec(), (deg.clone(), c.clone()));
        Ok((deg, c))
    }

    fn pos_vec(&self, deg: &[i64], coords: &[Q]) -> SparseVec<Q> {
        let s = self.pos_start[deg];
        coords.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (s + k, x.clone())).collect()
    }

    fn neg_vec(&self, deg: &[i64], coords: &[Q]) -> SparseVec<Q> {
        let s = self.neg_start[deg];
        coords.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (s + k, x.clone())).collect()
    }

    fn cartan_vec(&self, h: &[i64], sign: i64) -> SparseVec<Q> {
        h.iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(k, &x)| (self.cartan_start + k, q(sign * x)))
            .collect()
    }

    /// `[a, b]` for positive elements given in basis coordinates.
    fn pos_bracket(&self, da: &[i64], a: &[Q], db: &[i64], b: &[Q]) -> Result<Option<(Vec<i64>, Vec<Q>)>> {
        let pa = self.np.poly_of(da, a);
        let pb = self.np.poly_of(db, b);
        match self.np.commutator(da, &pa, db, &pb) {
            None => Ok(None),
            Some((deg, poly)) => {
                let c = self.np.coordinates(&deg, &poly)?;
                Ok(Some((deg, c)))
            }
        }
    }

    fn f_image(&mut self, i: usize, w: &[u8]) -> Result<FImage> {
        if let Some(v) = self.f_memo.get(&(i, w.to_vec())) {
            return Ok(v.clone());
        }
        let out = if w.len() == 1 {
            if w[0] as usize == i {
                FImage::MinusCoroot(i)
            } else {
                FImage::Zero
            }
        } else {
            let (u, v) = free::standard_factorisation(w);
            let (u, v) = (u.to_vec(), v.to_vec());
            let target: Vec<i64> = {
                let mut t = self.content(w);
                t[i] -= 1;
                t
            };
            if target.iter().any(|&x| x < 0) {
                FImage::Zero
            } else {
                let m = self.np.dim(&target);
                let mut acc = vec![Q::zero(); m];
                let (du, cu) = self.lyndon_coords(&u)?;
                let (dv, cv) = self.lyndon_coords(&v)?;
                // [[f_i, u], v]
                match self.f_image(i, &u)? {
                    FImage::Zero => {}
                    FImage::MinusCoroot(i) => {
                        let k = q(-self.datum.eval_coroot(&dv, i));
                        for (a, x) in acc.iter_mut().zip(&cv) {
                            *a += &k * x;
                        }
                    }
                    FImage::Pos(d1, c1) => {
                        if let Some((_, c)) = self.pos_bracket(&d1, &c1, &dv, &cv)? {
                            for (a, x) in acc.iter_mut().zip(&c) {
                                *a += x;
                            }
                        }
                    }
                }
                // [u, [f_i, v]]
                match self.f_image(i, &v)? {
                    FImage::Zero => {}
                    FImage::MinusCoroot(i) => {
                        let k = q(self.datum.eval_coroot(&du, i));
                        for (a, x) in acc.iter_mut().zip(&cu) {
                            *a += &k * x;
                        }
                    }
                    FImage::Pos(d2, c2) => {
                        if let Some((_, c)) = self.pos_bracket(&du, &cu, &d2, &c2)? {
                            for (a, x) in acc.iter_mut().zip(&c) {
                                *a += x;
                            }
                        }
                    }
                }
                if acc.iter().all(Zero::is_zero) {
                    FImage::Zero
                } else {
                    FImage::Pos(target, acc)
                }
            }
        };
        self.f_memo.insert((i, w.to_vec()), out.clone());
        Ok(out)
    }
}

/// Assembles the windowed algebra over `ring` (`Z`, `Q` or a finite field).
pub fn assemble_g(datum: &RootDatum, window: i64, ring: &Ring) -> Result<GradedLieAlgebra> {
    let np = build_nplus_serre(&datum.gcm, window)?;
    let alg = assemble_from(datum, &np)?;
    alg.base_change(ring)
}

/// Assembles the algebra over `Z` from precomputed components of `n_+`.
pub fn assemble_from(datum: &RootDatum, np: &NPlus) -> Result<GradedLieAlgebra> {
    let n = datum.n();
    let d = datum.dim;
    let window = np.window;
    let mults = np.multiplicities();
    let real_roots = enumerate_real_roots(datum, window);
    let real_set: HashMap<Vec<i64>, &Root> = real_roots.iter().map(|r| (r.coords.clone(), r)).collect();
    for m in &mults {
        if real_set.contains_key(&m.root) && m.mult != 1 {
            return Err(Error::Violation(format!("real root {:?} has multiplicity {}", m.root, m.mult)));
        }
    }

    // Basis layout: positive root spaces, Cartan, negative root spaces.
    let mut basis = Vec::new();
    let mut pos_start = BTreeMap::new();
    let mut neg_start = BTreeMap::new();
    let mut words: Vec<Word> = Vec::new();
    let tag = |deg: &[i64]| format!("{deg:?}").replace(' ', "");
    for m in &mults {
        pos_start.insert(m.root.clone(), basis.len());
        let comp = np.component(&m.root).expect("component");
        for (k, w) in comp.basis.iter().enumerate() {
            let suffix = if m.mult > 1 { format!("#{k}") } else { String::new() };
            basis.push(BasisLabel {
                part: Part::Pos,
                degree: m.root.clone(),
                index: k,
                real: real_set.contains_key(&m.root),
                label: format!("e{}{suffix}", tag(&m.root)),
                word: Some(one_based(&w.iter().map(|&l| l as usize).collect::<Vec<_>>())),
            });
            words.push(w.clone());
        }
    }
    let cartan_start = basis.len();
    for k in 0..d {
        basis.push(BasisLabel {
            part: Part::Cartan,
            degree: vec![0; n],
            index: k,
            real: false,
            label: format!("h{}", k + 1),
            word: None,
        });
    }
    for m in &mults {
        let deg = neg(&m.root);
        neg_start.insert(m.root.clone(), basis.len());
        let comp = np.component(&m.root).expect("component");
        for (k, w) in comp.basis.iter().enumerate() {
            let suffix = if m.mult > 1 { format!("#{k}") } else { String::new() };
            basis.push(BasisLabel {
                part: Part::Neg,
                degree: deg.clone(),
                index: k,
                real: real_set.contains_key(&m.root),
                label: format!("f{}{suffix}", tag(&m.root)),
                word: Some(one_based(&w.iter().map(|&l| l as usize).collect::<Vec<_>>())),
            });
        }
    }
    let dim = basis.len();
    let npos = cartan_start;
    let mut b = Builder {
        datum,
        np,
        n,
        pos_start,
        neg_start,
        cartan_start,
        lyn_coords: HashMap::new(),
        f_memo: HashMap::new(),
    };

    // Generator operators in the Lyndon basis.
    let mut ad_e = Vec::new();
    let mut ad_f = Vec::new();
    for i in 0..n {
        let ei = np.unit(i);
        let mut ce: Vec<SparseVec<Q>> = vec![Vec::new(); dim];
        let mut cf: Vec<SparseVec<Q>> = vec![Vec::new(); dim];
        for y in 0..npos {
            let deg = basis[y].degree.clone();
            let w = words[y].clone();
            // [e_i, y]
            let py = np.lyndon_poly(&w).to_vec();
            if let Some((deg2, poly)) = np.commutator(&ei, &[Q::one()], &deg, &py) {
                if np.dim(&deg2) > 0 {
                    let c = np.coordinates(&deg2, &poly)?;
                    ce[y] = b.pos_vec(&deg2, &c);
                    // [f_i, sigma y] = sigma [e_i, y]
                    let ny = b.neg_start[&deg] + basis[y].index;
                    cf[ny] = b.neg_vec(&deg2, &c);
                }
            }
            // [f_i, y] and [e_i, sigma y] = sigma [f_i, y]
            let ny = b.neg_start[&deg] + basis[y].index;
            match b.f_image(i, &w)? {
                FImage::Zero => {}
                FImage::MinusCoroot(i) => {
                    cf[y] = b.cartan_vec(&datum.coroots[i], -1);
                    ce[ny] = b.cartan_vec(&datum.coroots[i], 1);
                }
                FImage::Pos(d1, c1) => {
                    cf[y] = b.pos_vec(&d1, &c1);
                    ce[ny] = b.neg_vec(&d1, &c1);
                }
            }
        }
        for k in 0..d {
            let a = datum.roots[i][k];
            if a != 0 {
                ce[cartan_start + k] = vec![(b.pos_start[&ei], q(-a))];
                cf[cartan_start + k] = vec![(b.neg_start[&ei], q(a))];
            }
        }
        ad_e.push(SparseOp::from_columns(dim, ce));
        ad_f.push(SparseOp::from_columns(dim, cf));
    }
    let ad_h: Vec<SparseOp<Q>> = (0..d)
        .map(|k| {
            let cols = (0..dim)
                .map(|y| {
                    let deg = &basis[y].degree;
                    let v: i64 = deg.iter().zip(&datum.roots).map(|(c, a)| c * a[k]).sum();
                    if v == 0 {
                        Vec::new()
                    } else {
                        vec![(y, q(v))]
                    }
                })
                .collect();
            SparseOp::from_columns(dim, cols)
        })
        .collect();

    // Adjoint operators of all Lyndon-basis elements.
    let mut memo_pos: HashMap<Word, SparseOp<Q>> = HashMap::new();
    let mut memo_neg: HashMap<Word, SparseOp<Q>> = HashMap::new();
    fn ad_word(w: &[u8], gens: &[SparseOp<Q>], memo: &mut HashMap<Word, SparseOp<Q>>) -> SparseOp<Q> {
        if let Some(op) = memo.get(w) {
            return op.clone();
        }
        let op = if w.len() == 1 {
            gens[w[0] as usize].clone()
        } else {
            let (u, v) = free::standard_factorisation(w);
            let a = ad_word(u, gens, memo);
            let c = ad_word(v, gens, memo);
            a.commutator(&c)
        };
        memo.insert(w.to_vec(), op.clone());
        op
    }
    let mut ad_b: Vec<SparseOp<Q>> = Vec::with_capacity(dim);
    for y in 0..dim {
        let op = match basis[y].part {
            Part::Pos => ad_word(&words[y], &ad_e, &mut memo_pos),
            Part::Cartan => ad_h[y - cartan_start].clone(),
            Part::Neg => {
                let py = y - b.neg_start[&neg(&basis[y].degree)] + b.pos_start[&neg(&basis[y].degree)];
                ad_word(&words[py], &ad_f, &mut memo_neg)
            }
        };
        ad_b.push(op);
    }

    let mut by_degree: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (k, l) in basis.iter().enumerate() {
        by_degree.entry(l.degree.clone()).or_default().push(k);
    }

    let blocks = integral_lattice(datum, &basis, &by_degree, &ad_b, &real_set, cartan_start)?;

    // Structure constants in the lattice basis.
    let mut col_of: Vec<SparseVec<Q>> = vec![Vec::new(); dim];
    let mut inverses: BTreeMap<Vec<i64>, Matrix> = BTreeMap::new();
    for (deg, idx) in &by_degree {
        let p = &blocks[deg];
        for (k, &a) in idx.iter().enumerate() {
            col_of[a] = idx.iter().zip(&p[k]).filter(|(_, x)| !x.is_zero()).map(|(&i, x)| (i, x.clone())).collect();
        }
        let m = Matrix::from_fn(&Ring::Q, idx.len(), idx.len(), |i, j| Scalar::Rat(p[j][i].clone()));
        inverses.insert(deg.clone(), m.inverse().ok_or_else(|| Error::Violation("singular lattice block".into()))?);
    }
    let deg_of: Vec<&Vec<i64>> = basis.iter().map(|l| &l.degree).collect();
    let pos_in_block: Vec<usize> = {
        let mut v = vec![0; dim];
        for idx in by_degree.values() {
            for (k, &a) in idx.iter().enumerate() {
                v[a] = k;
            }
        }
        v
    };
    let mut table = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut ad_x = SparseOp::zero(dim);
        for (k, c) in &col_of[a] {
            ad_x = ad_x.add_scaled(c, &ad_b[*k]);
        }
        let mut cols = Vec::with_capacity(dim);
        for bcol in col_of.iter() {
            let v = ad_x.apply(bcol);
            let mut out: SparseVec<Q> = Vec::new();
            let mut grouped: BTreeMap<&Vec<i64>, Vec<(usize, Q)>> = BTreeMap::new();
            for (i, x) in v {
                grouped.entry(deg_of[i]).or_default().push((pos_in_block[i], x));
            }
            for (deg, entries) in grouped {
                let idx = &by_degree[deg];
                let inv = &inverses[deg];
                let mut local = vec![Scalar::Rat(Q::zero()); idx.len()];
                for (k, x) in entries {
                    local[k] = Scalar::Rat(x);
                }
                for (k, s) in inv.apply(&local).into_iter().enumerate() {
                    let x = s.as_rational().expect("rational").clone();
                    if !x.is_zero() {
                        out.push((idx[k], x));
                    }
                }
            }
            cols.push(out);
        }
        let op = SparseOp::from_columns(dim, cols);
        let int = op.to_integer().map_err(|(i, j, x)| {
            Error::IntegralDefect(format!(
                "[{}, {}] has coefficient {} on {}",
                basis[a].label, basis[j].label, x, basis[i].label
            ))
        })?;
        table.push(int);
    }

    Ok(GradedLieAlgebra {
        datum: datum.clone(),
        window,
        ring: Ring::Z,
        basis,
        by_degree,
        table,
        exact: np.vanishing_height().is_some(),
        real_roots,
        mults,
        graded_dims: np.graded_dims(),
    })
}

/// Rational square root, if `x` is the square of a rational.
fn rational_sqrt(x: &Q) -> Option<Q> {
    let (a, b) = (x.numer(), x.denom());
    if a.is_negative() {
        return None;
    }
    let (ra, rb) = (a.sqrt(), b.sqrt());
    (&ra * &ra == *a && &rb * &rb == *b).then(|| Q::new(ra, rb))
}

/// Lattice basis vectors of each degree block, written in the Lyndon basis
/// (`blocks[deg][k]` is the `k`-th vector).
fn integral_lattice(
    datum: &RootDatum,
    basis: &[BasisLabel],
    by_degree: &BTreeMap<Vec<i64>, Vec<usize>>,
    ad_b: &[SparseOp<Q>],
    real_set: &HashMap<Vec<i64>, &Root>,
    cartan_start: usize,
) -> Result<BTreeMap<Vec<i64>, Vec<Vec<Q>>>> {
    let d = datum.dim;
    let mut blocks: BTreeMap<Vec<i64>, Vec<Vec<Q>>> = BTreeMap::new();
    let identity = |m: usize| -> Vec<Vec<Q>> {
        (0..m).map(|i| (0..m).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
    };
    for (deg, idx) in by_degree {
        blocks.insert(deg.clone(), identity(idx.len()));
    }
    // Real root spaces: [v, sigma v] = lambda h_a, rescale so lambda = +-1.
    for (root, r) in real_set {
        let Some(idx) = by_degree.get(root) else { continue };
        let a = idx[0];
        let na = by_degree[&neg(root)][0];
        let h = ad_b[a].column(na);
        let cor = r.coroot.as_ref().expect("real roots carry coroots");
        let hv: Vec<i64> = (0..d).map(|k| cor.iter().zip(&datum.coroots).map(|(c, h)| c * h[k]).sum()).collect();
        let mut lambda: Option<Q> = None;
        let mut got = vec![Q::zero(); d];
        for (i, x) in h {
            if *i < cartan_start || *i >= cartan_start + d {
                return Err(Error::Violation(format!("[e, f] for root {root:?} leaves the Cartan part")));
            }
            got[i - cartan_start] = x.clone();
        }
        for k in 0..d {
            if hv[k] != 0 {
                lambda = Some(&got[k] / q(hv[k]));
                break;
            }
        }
        let lambda = lambda.filter(|l| !l.is_zero()).ok_or_else(|| {
            Error::Violation(format!("[e, f] for root {root:?} is not a nonzero coroot multiple"))
        })?;
        if (0..d).any(|k| got[k] != &lambda * q(hv[k])) {
            return Err(Error::Violation(format!("[e, f] for root {root:?} is not proportional to its coroot")));
        }
        let c = rational_sqrt(&lambda.abs()).ok_or_else(|| {
            Error::IntegralDefect(format!("root {root:?}: [e, f] = {lambda} h is not a square multiple"))
        })?;
        let c = c.recip();
        let sign = if lambda.is_negative() { -Q::one() } else { Q::one() };
        blocks.insert(root.clone(), vec![vec![c.clone()]]);
        blocks.insert(neg(root), vec![vec![sign * c]]);
    }
    // Imaginary root spaces: close under brackets of lattice vectors.
    let imag: Vec<Vec<i64>> = by_degree
        .keys()
        .filter(|deg| deg.iter().any(|&x| x != 0))
        .filter(|deg| {
            let pos = if deg.iter().any(|&x| x < 0) { neg(deg) } else { deg.to_vec() };
            !real_set.contains_key(&pos)
        })
        .cloned()
        .collect();
    if imag.is_empty() {
        return Ok(blocks);
    }
    let nonzero: Vec<Vec<i64>> = by_degree.keys().filter(|d| d.iter().any(|&x| x != 0)).cloned().collect();
    for round in 0.. {
        if round > 32 {
            return Err(Error::IntegralDefect("imaginary lattice closure did not stabilise".into()));
        }
        let mut changed = false;
        for target in &imag {
            let tidx = &by_degree[target];
            let pos_in: HashMap<usize, usize> = tidx.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let mut gens = blocks[target].clone();
            for beta in &nonzero {
                let delta: Vec<i64> = target.iter().zip(beta).map(|(t, b)| t - b).collect();
                if beta >= &delta || !by_degree.contains_key(&delta) || delta.iter().all(|&x| x == 0) {
                    continue;
                }
                for x in &blocks[beta] {
                    let mut ad_x = SparseOp::zero(basis.len());
                    for (k, c) in by_degree[beta].iter().zip(x) {
                        if !c.is_zero() {
                            ad_x = ad_x.add_scaled(c, &ad_b[*k]);
                        }
                    }
                    for y in &blocks[&delta] {
                        let yv: SparseVec<Q> =
                            by_degree[&delta].iter().zip(y).filter(|(_, c)| !c.is_zero()).map(|(&k, c)| (k, c.clone())).collect();
                        let v = ad_x.apply(&yv);
                        let mut local = vec![Q::zero(); tidx.len()];
                        for (i, c) in v {
                            local[pos_in[&i]] = c;
                        }
                        if local.iter().any(|c| !c.is_zero()) {
                            gens.push(local);
                        }
                    }
                }
            }
            let new = lattice_basis(&gens, tidx.len());
            let old = lattice_basis(&blocks[target], tidx.len());
            if new != old {
                changed = true;
            }
            blocks.insert(target.clone(), new);
        }
        if !changed {
            break;
        }
    }
    Ok(blocks)
}

/// Divided power operator together with its window status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Operator {
    pub root: Vec<i64>,
    pub n: u32,
    pub matrix: Matrix,
    /// Every root string through the basis terminates inside the window.
    pub string_complete: bool,
}

impl GradedLieAlgebra {
    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisLabel] {
        &self.basis
    }

    /// The window contains all of `g` (finite type).
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Positive real roots inside the window.
    pub fn real_roots(&self) -> &[Root] {
        &self.real_roots
    }

    pub fn multiplicities(&self) -> &[Multiplicity] {
        &self.mults
    }

    pub fn graded_dims(&self) -> &[usize] {
        &self.graded_dims
    }

    pub fn degree(&self, a: usize) -> &[i64] {
        &self.basis[a].degree
    }

    pub fn indices(&self, deg: &[i64]) -> &[usize] {
        self.by_degree.get(deg).map_or(&[], Vec::as_slice)
    }

    pub fn in_window(&self, deg: &[i64]) -> bool {
        self.exact || height(deg).abs() <= self.window
    }

    pub fn cartan(&self, k: usize) -> usize {
        self.basis.iter().position(|l| l.part == Part::Cartan).expect("cartan part") + k
    }

    /// Index of `e_a` (positive `a`) or `f_{-a}` (negative `a`) for a real root.
    pub fn root_vector(&self, root: &[i64]) -> Result<usize> {
        let pos = if root.iter().any(|&x| x < 0) { neg(root) } else { root.to_vec() };
        if !self.real_roots.iter().any(|r| r.coords == pos) {
            return Err(Error::invalid(format!("{root:?} is not a real root in the window")));
        }
        Ok(self.indices(root)[0])
    }

    pub fn e(&self, i: usize) -> usize {
        self.indices(&self.unit(i))[0]
    }

    pub fn f(&self, i: usize) -> usize {
        self.indices(&neg(&self.unit(i)))[0]
    }

    fn unit(&self, i: usize) -> Vec<i64> {
        (0..self.datum.n()).map(|k| (k == i) as i64).collect()
    }

    /// Coroot `h_a` of a positive real root as a vector of `Z^d`.
    pub fn coroot_vector(&self, root: &[i64]) -> Result<Vec<i64>> {
        let r = self
            .real_roots
            .iter()
            .find(|r| r.coords == root)
            .ok_or_else(|| Error::invalid(format!("{root:?} is not a positive real root in the window")))?;
        let cor = r.coroot.as_ref().expect("coroot");
        Ok((0..self.datum.dim).map(|k| cor.iter().zip(&self.datum.coroots).map(|(c, h)| c * h[k]).sum()).collect())
    }

    pub fn ad_integer(&self, a: usize) -> &SparseOp<BigInt> {
        &self.table[a]
    }

    /// `ad(x_a)` over the algebra's ring.
    pub fn ad_matrix(&self, a: usize) -> Matrix {
        self.table[a].to_matrix(&self.ring)
    }

    /// `ad(x)` for a vector of coordinates over the algebra's ring.
    pub fn ad_of(&self, x: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(&self.ring, self.dim(), self.dim());
        for (a, c) in x.iter().enumerate() {
            if !self.ring.is_zero(c) {
                m = m.add(&self.ad_matrix(a).scale(c));
            }
        }
        m
    }

    pub fn bracket(&self, a: usize, b: usize) -> Bracket {
        let deg = add(self.degree(a), self.degree(b));
        if !self.in_window(&deg) {
            return Bracket::Truncated;
        }
        let mut v = vec![self.ring.zero(); self.dim()];
        for (i, x) in self.table[a].column(b) {
            v[*i] = self.ring.from_bigint(x);
        }
        Bracket::Value(v)
    }

    /// Reduces the structure constants into another ring.
    pub fn base_change(&self, ring: &Ring) -> Result<GradedLieAlgebra> {
        if self.ring != Ring::Z {
            return Err(Error::invalid("base change starts from an algebra over Z"));
        }
        Ok(GradedLieAlgebra { ring: ring.clone(), ..self.clone() })
    }

    /// Every root string in direction `root` through a basis degree ends
    /// inside the window.
    pub fn string_complete(&self, root: &[i64]) -> bool {
        if self.exact {
            return true;
        }
        self.by_degree.keys().all(|beta| {
            let mut k = 1;
            loop {
                let g: Vec<i64> = beta.iter().zip(root).map(|(b, r)| b + k * r).collect();
                if !self.in_window(&g) {
                    return false;
                }
                if g.iter().any(|&x| x != 0) && self.indices(&g).is_empty() {
                    return true;
                }
                k += 1;
            }
        })
    }

    pub fn dump(&self) -> AlgebraDump {
        let mut brackets = Vec::new();
        for a in 0..self.dim() {
            for b in a + 1..self.dim() {
                let col = self.table[a].column(b);
                let entries: Vec<(usize, Scalar)> = col
                    .iter()
                    .map(|(i, x)| (*i, self.ring.from_bigint(x)))
                    .filter(|(_, x)| !self.ring.is_zero(x))
                    .collect();
                if !entries.is_empty() {
                    brackets.push(BracketEntry { i: a, j: b, value: entries });
                }
            }
        }
        AlgebraDump {
            ring: self.ring.descriptor(),
            window: self.window,
            exact: self.exact,
            dim: self.dim(),
            graded_dims: self.graded_dims.clone(),
            multiplicities: self.mults.clone(),
            basis: self.basis.clone(),
            brackets,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    /// `(k, c)` pairs: `[x_i, x_j] = sum c x_k`.
    pub value: Vec<(usize, Scalar)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraDump {
    pub ring: RingDescriptor,
    pub window: i64,
    pub exact: bool,
    pub dim: usize,
    pub graded_dims: Vec<usize>,
    pub multiplicities: Vec<Multiplicity>,
    pub basis: Vec<BasisLabel>,
    pub brackets: Vec<BracketEntry>,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `ad(e_a)^n / n!` over `Z` for a real root `a` (positive or negative).
pub fn divided_power_integer(alg: &GradedLieAlgebra, root: &[i64], n: u32) -> Result<SparseOp<BigInt>> {
    let a = alg.root_vector(root)?;
    let ad = alg.ad_integer(a);
    let mut pow = SparseOp::from_columns(alg.dim(), (0..alg.dim()).map(|j| vec![(j, BigInt::one())]).collect());
    for _ in 0..n {
        pow = ad.mul(&pow);
    }
    let f = factorial(n);
    for (i, j, x) in pow.entries() {
        if !(x % &f).is_zero() {
            return Err(Error::IntegralDefect(format!(
                "ad(e{root:?})^{n}/{n}! has entry {x}/{f} at ({}, {})",
                alg.basis[i].label, alg.basis[j].label
            )));
        }
    }
    Ok(pow.map(|x| x / &f))
}

/// Divided power `ad(e_a)^(n)` over the algebra's ring.
pub fn divided_power_ad(alg: &GradedLieAlgebra, root: &[i64], n: u32) -> Result<Operator> {
    let op = divided_power_integer(alg, root, n)?;
    Ok(Operator {
        root: root.to_vec(),
        n,
        matrix: op.to_matrix(&alg.ring),
        string_complete: alg.string_complete(root),
    })
}

/// `x^[p]` for a basis element, as coordinates over `F_p`.
pub fn p_operation(alg: &GradedLieAlgebra, a: usize, p: u64) -> Result<Vec<Scalar>> {
    let fp = Ring::prime_field(p)?;
    if alg.ring.characteristic() != 0 && alg.ring.characteristic() != p {
        return Err(Error::invalid(format!("ring {} does not have characteristic {p}", alg.ring)));
    }
    let label = &alg.basis[a];
    let mut out = vec![fp.zero(); alg.dim()];
    match label.part {
        Part::Cartan => {
            out[a] = fp.one();
            Ok(out)
        }
        _ if label.real => Ok(out),
        _ => {
            let target: Vec<i64> = label.degree.iter().map(|x| x * p as i64).collect();
            if !alg.in_window(&target) {
                return Err(Error::WindowExceeded(format!(
                    "{}^[{p}] has degree {target:?} outside the window",
                    label.label
                )));
            }
            let ad = alg.ad_integer(a).to_matrix(&fp);
            let lhs = ad.pow(p as u32);
            let cand = alg.indices(&target).to_vec();
            let mats: Vec<Matrix> = cand.iter().map(|&k| alg.ad_integer(k).to_matrix(&fp)).collect();
            let n = alg.dim();
            // Unknowns: coefficients on the candidates; one equation per matrix entry.
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let row: Vec<Scalar> = mats.iter().map(|m| m[(i, j)].clone()).collect();
                    if row.iter().all(|x| fp.is_zero(x)) && fp.is_zero(&lhs[(i, j)]) {
                        continue;
                    }
                    rows.push(row);
                    rhs.push(lhs[(i, j)].clone());
                }
            }
            let m = Matrix::from_rows(&fp, rows, cand.len())?;
            if m.rank() < cand.len() {
                return Err(Error::Unsupported(format!(
                    "{}^[{p}] is not determined by its adjoint action in the window",
                    label.label
                )));
            }
            let y = m.solve(&rhs).ok_or_else(|| {
                Error::Violation(format!("ad({})^{p} is not an inner derivation of degree {target:?}", label.label))
            })?;
            for (k, c) in cand.iter().zip(y) {
                out[*k] = c;
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PEntry {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Vec<Scalar>>,
    pub status: String,
}

/// The p-operation on every basis element, with window failures recorded.
#[derive(Debug, Clone, Serialize)]
pub struct PStructure {
    pub p: u64,
    pub entries: Vec<PEntry>,
}

pub fn p_structure(alg: &GradedLieAlgebra, p: u64) -> Result<PStructure> {
    let mut entries = Vec::new();
    for a in 0..alg.dim() {
        let label = alg.basis[a].label.clone();
        match p_operation(alg, a, p) {
            Ok(v) => entries.push(PEntry { label, value: Some(v), status: "ok".into() }),
            Err(Error::WindowExceeded(_)) => {
                entries.push(PEntry { label, value: None, status: "window-exceeded".into() })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PStructure { p, entries })
}

#[cfg(test)]
mod tests;
