//! Adjoint-type representations over finite fields: root exponentials,
//! torus actions, the over-restricted predicate and the identities relating
//! `Y_a(t)` operators to the adjoint group.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exactalg::{Matrix, Ring, Scalar};
use crate::gcm::classify;
use crate::kmalg::{divided_power_integer, p_operation, Bracket, GradedLieAlgebra};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorKind {
    AdExp,
    Y,
    Torus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootedOperator {
    pub matrix: Matrix,
    pub root: Vec<i64>,
    pub t: Scalar,
    pub kind: OperatorKind,
    pub string_complete: bool,
}

/// A representation of a windowed algebra over a finite field.
#[derive(Debug, Clone)]
pub struct Representation {
    alg: GradedLieAlgebra,
    rho: Vec<Matrix>,
    grading: Option<Vec<Vec<i64>>>,
    name: String,
}

fn field_of(ring: &Ring) -> Result<()> {
    match ring {
        Ring::F(_) => Ok(()),
        r => Err(Error::invalid(format!("representations are defined over finite fields, not {r}"))),
    }
}

impl Representation {
    /// The adjoint representation; needs the whole algebra in the window.
    pub fn adjoint(alg: &GradedLieAlgebra) -> Result<Self> {
        field_of(alg.ring())?;
        if !alg.is_exact() {
            return Err(Error::Unsupported(
                "adjoint representation needs a finite-dimensional algebra inside the window".into(),
            ));
        }
        let rho = (0..alg.dim()).map(|a| alg.ad_matrix(a)).collect();
        let grading = Some(alg.basis().iter().map(|l| l.degree.clone()).collect());
        Ok(Representation { alg: alg.clone(), rho, grading, name: "adjoint".into() })
    }

    /// The one-dimensional trivial representation, graded in degree zero.
    pub fn trivial(alg: &GradedLieAlgebra) -> Result<Self> {
        field_of(alg.ring())?;
        let rho = (0..alg.dim()).map(|_| Matrix::zeros(alg.ring(), 1, 1)).collect();
        let grading = Some(vec![vec![0; alg.datum().n()]]);
        Ok(Representation { alg: alg.clone(), rho, grading, name: "trivial".into() })
    }

    /// A representation given by matrices, checked against every in-window
    /// bracket of basis elements.
    pub fn from_matrices(
        alg: &GradedLieAlgebra,
        rho: Vec<Matrix>,
        grading: Option<Vec<Vec<i64>>>,
        name: &str,
    ) -> Result<Self> {
        field_of(alg.ring())?;
        if rho.len() != alg.dim() {
            return Err(Error::invalid("one matrix per basis element is required"));
        }
        let dim = rho.first().map_or(0, Matrix::rows);
        if rho.iter().any(|m| m.rows() != dim || m.cols() != dim || m.ring() != alg.ring()) {
            return Err(Error::invalid("representation matrices must be square of equal size over the algebra's ring"));
        }
        if let Some(g) = &grading {
            if g.len() != dim {
                return Err(Error::invalid("grading must give one degree per module basis vector"));
            }
        }
        let rep = Representation { alg: alg.clone(), rho, grading, name: name.into() };
        rep.check_axiom()?;
        Ok(rep)
    }

    fn check_axiom(&self) -> Result<()> {
        let n = self.alg.dim();
        for a in 0..n {
            for b in 0..n {
                if let Bracket::Value(v) = self.alg.bracket(a, b) {
                    if self.image(&v) != self.rho[a].commutator(&self.rho[b]) {
                        return Err(Error::Violation(format!(
                            "rho([{}, {}]) differs from the commutator",
                            self.alg.basis()[a].label,
                            self.alg.basis()[b].label
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.alg
    }

    pub fn ring(&self) -> &Ring {
        self.alg.ring()
    }

    pub fn dim(&self) -> usize {
        self.rho.first().map_or(0, Matrix::rows)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grading(&self) -> Option<&[Vec<i64>]> {
        self.grading.as_deref()
    }

    /// Replaces the grading (no consistency check), for perturbation tests.
    pub fn with_grading(mut self, grading: Vec<Vec<i64>>) -> Self {
        self.grading = Some(grading);
        self
    }

    pub fn rho(&self, a: usize) -> &Matrix {
        &self.rho[a]
    }

    /// `rho(x)` for a vector of algebra coordinates.
    pub fn image(&self, x: &[Scalar]) -> Matrix {
        let ring = self.ring();
        let mut m = Matrix::zeros(ring, self.dim(), self.dim());
        for (a, c) in x.iter().enumerate() {
            if !ring.is_zero(c) {
                m = m.add(&self.rho[a].scale(c));
            }
        }
        m
    }

    /// `rho` is injective on the algebra.
    pub fn faithful_on_algebra(&self) -> bool {
        let ring = self.ring();
        let n = self.alg.dim();
        let d2 = self.dim() * self.dim();
        let m = Matrix::from_fn(ring, n, d2, |a, k| self.rho[a][(k / self.dim().max(1), k % self.dim().max(1))].clone());
        n == 0 || m.rank() == n
    }

    /// The torus `Z^d (x) F^*` acts faithfully through the grading.
    pub fn faithful_on_torus(&self) -> Option<bool> {
        let grading = self.grading.as_ref()?;
        let field = self.ring().field()?.clone();
        let datum = self.alg.datum();
        // Characters of the module, as covectors on Z^d, reduced mod q - 1.
        let m = (field.order() - 1) as i64;
        let chars: Vec<Vec<i64>> = grading
            .iter()
            .map(|deg| (0..datum.dim).map(|k| datum.eval(deg, &unit(datum.dim, k))).collect())
            .collect();
        // The kernel of (Z/m)^d -> (Z/m)^chars is trivial iff the character
        // matrix has full rank d with all elementary divisors prime to m.
        let rows: Vec<Vec<BigInt>> = chars.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let snf = crate::exactalg::smith_of_rows(rows, datum.dim);
        if snf.rank < datum.dim {
            return Some(false);
        }
        let mm = BigInt::from(m);
        Some(snf.divisors.iter().all(|d| num_integer::Integer::gcd(d, &mm) == BigInt::from(1)))
    }
}

fn unit(d: usize, k: usize) -> Vec<i64> {
    (0..d).map(|i| (i == k) as i64).collect()
}

fn neg(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

/// All real roots of the window, positive then negative.
pub fn real_roots_both(alg: &GradedLieAlgebra) -> Vec<Vec<i64>> {
    let pos: Vec<Vec<i64>> = alg.real_roots().iter().map(|r| r.coords.clone()).collect();
    pos.iter().cloned().chain(pos.iter().map(|r| neg(r))).collect()
}

/// `Ad(X_a(t)) = sum_n t^n ad(e_a)^(n)`.
pub fn ad_exponential(alg: &GradedLieAlgebra, root: &[i64], t: &Scalar) -> Result<RootedOperator> {
    let ring = alg.ring().clone();
    let mut acc = Matrix::identity(&ring, alg.dim());
    let mut tn = ring.one();
    for n in 1.. {
        let d = divided_power_integer(alg, root, n)?;
        if d.is_zero() {
            break;
        }
        tn = ring.mul(&tn, t);
        acc = acc.add(&d.to_matrix(&ring).scale(&tn));
    }
    Ok(RootedOperator {
        matrix: acc,
        root: root.to_vec(),
        t: t.clone(),
        kind: OperatorKind::AdExp,
        string_complete: alg.string_complete(root),
    })
}

/// Diagonal action of `h (x) t` on a graded module: `t^{deg(h)}`.
pub fn torus_action(alg: &GradedLieAlgebra, grading: &[Vec<i64>], h: &[i64], t: &Scalar) -> Result<Matrix> {
    let ring = alg.ring();
    let datum = alg.datum();
    if h.len() != datum.dim {
        return Err(Error::invalid(format!("cocharacter must have {} coordinates", datum.dim)));
    }
    let diag = grading
        .iter()
        .map(|deg| ring.pow(t, datum.eval(deg, h)).ok_or_else(|| Error::invalid("torus parameter must be nonzero")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::diagonal(ring, diag))
}

fn rep_torus(rep: &Representation, h: &[i64], t: &Scalar) -> Result<Matrix> {
    let grading = rep.grading().ok_or_else(|| Error::invalid("the representation is not graded"))?;
    torus_action(rep.algebra(), grading, h, t)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub root: Vec<i64>,
    /// The bound `floor((p+1)/2)`; `rho(e_a)^k` is nonzero.
    pub k: u32,
    /// Smallest power of `rho(e_a)` that vanishes.
    pub nilpotency: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverRestricted {
    pub holds: bool,
    pub p: u64,
    pub bound: u32,
    pub witness: Option<Witness>,
    /// `rho(x)^p = rho(x^[p])` on every basis element where `x^[p]` is known.
    pub restricted: bool,
    /// Basis elements whose p-th power escapes the window.
    pub unchecked: Vec<String>,
}

fn nilpotency(m: &Matrix, cap: u32) -> u32 {
    let mut pow = Matrix::identity(m.ring(), m.rows());
    for k in 0..=cap {
        if pow.is_zero() {
            return k;
        }
        pow = pow.mul(m);
    }
    cap + 1
}

/// `rho(e_a)^{floor((p+1)/2)} = 0` for every real root in the window.
pub fn is_over_restricted(rep: &Representation, p: u64) -> Result<OverRestricted> {
    let ring = rep.ring();
    if ring.characteristic() != p {
        return Err(Error::invalid(format!("field {ring} does not have characteristic {p}")));
    }
    let alg = rep.algebra();
    let bound = p.div_ceil(2) as u32;
    let mut restricted = true;
    let mut unchecked = Vec::new();
    for a in 0..alg.dim() {
        match p_operation(alg, a, p) {
            Ok(y) => {
                let y: Vec<Scalar> = y.iter().map(|s| lift_prime(ring, s)).collect();
                if rep.rho(a).pow(p as u32) != rep.image(&y) {
                    restricted = false;
                }
            }
            Err(Error::WindowExceeded(_)) | Err(Error::Unsupported(_)) => {
                unchecked.push(alg.basis()[a].label.clone())
            }
            Err(e) => return Err(e),
        }
    }
    let mut witness = None;
    for root in real_roots_both(alg) {
        let e = rep.rho(alg.root_vector(&root)?);
        if !e.pow(bound).is_zero() {
            witness = Some(Witness { root, k: bound, nilpotency: nilpotency(e, (rep.dim() + 1) as u32) });
            break;
        }
    }
    Ok(OverRestricted { holds: witness.is_none(), p, bound, witness, restricted, unchecked })
}

/// Element of the prime field viewed inside an extension.
fn lift_prime(ring: &Ring, s: &Scalar) -> Scalar {
    match s {
        Scalar::Fin(v) => ring.from_i64(*v as i64),
        other => other.clone(),
    }
}

fn inv_factorial(ring: &Ring, k: u64) -> Result<Scalar> {
    let f = (1..=k).fold(ring.one(), |acc, i| ring.mul(&acc, &ring.from_i64(i as i64)));
    ring.inv(&f).ok_or_else(|| Error::invalid(format!("{k}! is not invertible in {ring}")))
}

/// `Y_a(t) = sum_{k<p} t^k rho(e_a)^k / k!`.
pub fn y_operator(rep: &Representation, root: &[i64], t: &Scalar) -> Result<RootedOperator> {
    let ring = rep.ring().clone();
    let p = ring.characteristic();
    let alg = rep.algebra();
    let e = rep.rho(alg.root_vector(root)?).scale(t);
    let mut acc = Matrix::identity(&ring, rep.dim());
    let mut pow = acc.clone();
    for k in 1..p {
        pow = pow.mul(&e);
        if pow.is_zero() {
            break;
        }
        acc = acc.add(&pow.scale(&inv_factorial(&ring, k)?));
    }
    Ok(RootedOperator {
        matrix: acc,
        root: root.to_vec(),
        t: t.clone(),
        kind: OperatorKind::Y,
        string_complete: alg.string_complete(root),
    })
}

fn basis_vector(alg: &GradedLieAlgebra, x: usize) -> Vec<Scalar> {
    let ring = alg.ring();
    (0..alg.dim()).map(|k| if k == x { ring.one() } else { ring.zero() }).collect()
}

fn require_complete(alg: &GradedLieAlgebra, root: &[i64]) -> Result<()> {
    if alg.string_complete(root) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("root strings along {root:?} leave the window")))
    }
}

/// `rho(Ad(X_a(t)) x) = Y_a(t) rho(x) Y_a(-t)`, after checking
/// `ad(e_a)^(p)(x) = 0`.
pub fn check_eq1(rep: &Representation, root: &[i64], t: &Scalar, x: usize) -> Result<bool> {
    let alg = rep.algebra();
    require_complete(alg, root)?;
    let ring = rep.ring();
    let p = ring.characteristic() as u32;
    let xv = basis_vector(alg, x);
    let dp = divided_power_integer(alg, root, p)?.to_matrix(ring);
    if dp.apply(&xv).iter().any(|s| !ring.is_zero(s)) {
        return Err(Error::invalid(format!(
            "hypothesis fails: ad(e{root:?})^({p}) does not vanish on {}",
            alg.basis()[x].label
        )));
    }
    let ad = ad_exponential(alg, root, t)?;
    let lhs = rep.image(&ad.matrix.apply(&xv));
    let y = y_operator(rep, root, t)?.matrix;
    let y_inv = y_operator(rep, root, &ring.neg(t))?.matrix;
    Ok(lhs == y.mul(rep.rho(x)).mul(&y_inv))
}

/// `rho(Ad(h (x) t) x) = rho^(h (x) t) rho(x) rho^(h (x) t^-1)`.
pub fn check_eq2(rep: &Representation, h: &[i64], t: &Scalar, x: usize) -> Result<bool> {
    let alg = rep.algebra();
    let ring = rep.ring();
    let t_inv = ring.inv(t).ok_or_else(|| Error::invalid("torus parameter must be nonzero"))?;
    let ad = torus_action(alg, &alg.basis().iter().map(|l| l.degree.clone()).collect::<Vec<_>>(), h, t)?;
    let lhs = rep.image(&ad.apply(&basis_vector(alg, x)));
    let rhs = rep_torus(rep, h, t)?.mul(rep.rho(x)).mul(&rep_torus(rep, h, &t_inv)?);
    Ok(lhs == rhs)
}

/// `rho(ad(e_a)^k x / k!) = sum_j (-1)^j / ((k-j)! j!) rho(e_a)^{k-j} rho(x) rho(e_a)^j`.
pub fn check_induction_formula(rep: &Representation, root: &[i64], k: u32, x: usize) -> Result<bool> {
    let ring = rep.ring();
    let p = ring.characteristic();
    if k < 1 || u64::from(k) >= p {
        return Err(Error::invalid(format!("k must lie in 1..={}", p - 1)));
    }
    let alg = rep.algebra();
    let dk = divided_power_integer(alg, root, k)?.to_matrix(ring);
    let lhs = rep.image(&dk.apply(&basis_vector(alg, x)));
    let e = rep.rho(alg.root_vector(root)?);
    let mut rhs = Matrix::zeros(ring, rep.dim(), rep.dim());
    for j in 0..=k {
        let c = ring.mul(&inv_factorial(ring, u64::from(k - j))?, &inv_factorial(ring, u64::from(j))?);
        let c = if j % 2 == 1 { ring.neg(&c) } else { c };
        let term = e.pow(k - j).mul(rep.rho(x)).mul(&e.pow(j));
        rhs = rhs.add(&term.scale(&c));
    }
    Ok(lhs == rhs)
}

/// Aggregated outcome of a sweep of identity checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub instance: String,
    pub cases_total: usize,
    pub cases_failed: usize,
    pub witnesses: Vec<serde_json::Value>,
    pub seed: Option<u64>,
}

const MAX_WITNESSES: usize = 20;

fn instance_name(rep: &Representation) -> String {
    format!("{} of {:?} over {}", rep.name(), rep.algebra().datum().gcm.rows(), rep.ring())
}

fn collect(check: &str, rep: &Representation, results: Vec<(bool, serde_json::Value)>) -> CheckReport {
    let failed: Vec<serde_json::Value> = results.iter().filter(|(ok, _)| !ok).map(|(_, w)| w.clone()).collect();
    CheckReport {
        check: check.into(),
        instance: instance_name(rep),
        cases_total: results.len(),
        cases_failed: failed.len(),
        witnesses: failed.into_iter().take(MAX_WITNESSES).collect(),
        seed: None,
    }
}

/// The conjugation identity of `check_eq1` over every real root, every `t`
/// in the field and every basis `x`.
pub fn sweep_eq1(rep: &Representation) -> Result<CheckReport> {
    let alg = rep.algebra();
    let ring = rep.ring();
    let ts = ring.elements().ok_or_else(|| Error::invalid("finite field required"))?;
    let mut cases: Vec<(Vec<i64>, Scalar, usize)> = Vec::new();
    for r in real_roots_both(alg) {
        for t in &ts {
            for x in 0..alg.dim() {
                cases.push((r.clone(), t.clone(), x));
            }
        }
    }
    let results = cases
        .par_iter()
        .map(|(r, t, x)| {
            let ok = check_eq1(rep, r, t, *x)?;
            Ok((ok, json!({"root": r, "t": t, "x": alg.basis()[*x].label})))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("eq1", rep, results))
}

/// The torus identity of `check_eq2` over the coroots `h_i`, every `t` in
/// `F^*` and every basis `x`.
pub fn sweep_eq2(rep: &Representation) -> Result<CheckReport> {
    let alg = rep.algebra();
    let ring = rep.ring();
    let ts = ring.units().ok_or_else(|| Error::invalid("finite field required"))?;
    let datum = alg.datum();
    let mut results = Vec::new();
    for h in &datum.coroots {
        for t in &ts {
            for x in 0..alg.dim() {
                let ok = check_eq2(rep, h, t, x)?;
                results.push((ok, json!({"h": h, "t": t, "x": alg.basis()[x].label})));
            }
        }
    }
    Ok(collect("eq2", rep, results))
}

/// The induction formula for every real root, `1 <= k < p` and basis `x`.
pub fn sweep_induction(rep: &Representation) -> Result<CheckReport> {
    let alg = rep.algebra();
    let p = rep.ring().characteristic() as u32;
    let mut results = Vec::new();
    for r in real_roots_both(alg) {
        for k in 1..p {
            for x in 0..alg.dim() {
                let ok = check_induction_formula(rep, &r, k, x)?;
                results.push((ok, json!({"root": r, "k": k, "x": alg.basis()[x].label})));
            }
        }
    }
    Ok(collect("induction", rep, results))
}

/// `Y_a(t) Y_a(s) = Y_a(t + s)` for all real roots and all `t, s`.
pub fn sweep_y_additivity(rep: &Representation) -> Result<CheckReport> {
    let alg = rep.algebra();
    let ring = rep.ring();
    let ts = ring.elements().ok_or_else(|| Error::invalid("finite field required"))?;
    let mut results = Vec::new();
    for r in real_roots_both(alg) {
        let ys: Vec<Matrix> = ts.iter().map(|t| y_operator(rep, &r, t).map(|o| o.matrix)).collect::<Result<_>>()?;
        for (i, t) in ts.iter().enumerate() {
            for (j, s) in ts.iter().enumerate() {
                let sum = y_operator(rep, &r, &ring.add(t, s))?.matrix;
                results.push((ys[i].mul(&ys[j]) == sum, json!({"root": r, "t": t, "s": s})));
            }
        }
    }
    Ok(collect("y-additivity", rep, results))
}

/// A letter of the free product of the torus and the root groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Letter {
    X(usize, Scalar),
    T(Vec<i64>, Scalar),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutatorTerm {
    pub i: u32,
    pub j: u32,
    pub root: Vec<i64>,
    pub c: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutatorRelation {
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
    pub terms: Vec<CommutatorTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub check: String,
    pub instance: String,
    pub p: u64,
    pub q: u64,
    pub faithful_on_torus: bool,
    pub faithful_on_algebra: bool,
    pub commutator_relations: Vec<CommutatorRelation>,
    pub cases_total: usize,
    /// Words that are not the identity in the adjoint group, or whose
    /// image in `G_V` fails to be central.
    pub cases_failed: usize,
    /// Words whose image in `G_V` is not the identity (but central).
    pub nontrivial_kernel_words: usize,
    pub family_counts: BTreeMap<String, usize>,
    pub witnesses: Vec<serde_json::Value>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct GroupConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig { samples: 10_000, seed: 0 }
    }
}

struct Group<'a> {
    rep: &'a Representation,
    roots: Vec<Vec<i64>>,
    ring: Ring,
    ad_cache: HashMap<Letter, Matrix>,
    y_cache: HashMap<Letter, Matrix>,
}

impl<'a> Group<'a> {
    fn ad(&mut self, l: &Letter) -> Result<Matrix> {
        if let Some(m) = self.ad_cache.get(l) {
            return Ok(m.clone());
        }
        let alg = self.rep.algebra();
        let m = match l {
            Letter::X(r, t) => ad_exponential(alg, &self.roots[*r], t)?.matrix,
            Letter::T(h, t) => torus_action(alg, &alg.basis().iter().map(|b| b.degree.clone()).collect::<Vec<_>>(), h, t)?,
        };
        self.ad_cache.insert(l.clone(), m.clone());
        Ok(m)
    }

    fn y(&mut self, l: &Letter) -> Result<Matrix> {
        if let Some(m) = self.y_cache.get(l) {
            return Ok(m.clone());
        }
        let m = match l {
            Letter::X(r, t) => y_operator(self.rep, &self.roots[*r], t)?.matrix,
            Letter::T(h, t) => rep_torus(self.rep, h, t)?,
        };
        self.y_cache.insert(l.clone(), m.clone());
        Ok(m)
    }

    fn eval(&mut self, word: &[Letter], side_ad: bool) -> Result<Matrix> {
        let n = if side_ad { self.rep.algebra().dim() } else { self.rep.dim() };
        let mut acc = Matrix::identity(&self.ring, n);
        for l in word {
            let m = if side_ad { self.ad(l)? } else { self.y(l)? };
            acc = acc.mul(&m);
        }
        Ok(acc)
    }

    fn inverse(&self, word: &[Letter]) -> Result<Vec<Letter>> {
        word.iter()
            .rev()
            .map(|l| match l {
                Letter::X(r, t) => Ok(Letter::X(*r, self.ring.neg(t))),
                Letter::T(h, t) => {
                    Ok(Letter::T(h.clone(), self.ring.inv(t).ok_or_else(|| Error::invalid("zero torus parameter"))?))
                }
            })
            .collect()
    }

    fn root_index(&self, r: &[i64]) -> Option<usize> {
        self.roots.iter().position(|x| x == r)
    }
}

/// Checks that `X_a(t) -> Y_a(t)`, `t -> rho^(t)` respects the relations of
/// the adjoint group on sampled words, with commutator constants discovered
/// from adjoint matrices.
pub fn build_gv_and_verify(rep: &Representation, config: GroupConfig) -> Result<GroupReport> {
    let alg = rep.algebra();
    let ring = rep.ring().clone();
    let field = ring.field().ok_or_else(|| Error::invalid("finite field required"))?.clone();
    let p = field.characteristic();
    let gcm = &alg.datum().gcm;
    let types = classify(gcm);
    if !alg.is_exact() || types.components.iter().any(|c| c.kind != crate::gcm::ComponentKind::Finite) {
        return Err(Error::Unsupported("group verification is limited to finite-type matrices".into()));
    }
    if p as i64 <= gcm.max_off_diagonal() {
        return Err(Error::Unsupported(format!("p = {p} does not exceed max(-A_ij) = {}", gcm.max_off_diagonal())));
    }
    rep.grading().ok_or_else(|| Error::invalid("the representation must be graded"))?;
    let or = is_over_restricted(rep, p)?;
    if let Some(w) = &or.witness {
        return Err(Error::Unsupported(format!(
            "representation is not over-restricted: rho(e{:?})^{} != 0 (nilpotency {})",
            w.root, w.k, w.nilpotency
        )));
    }
    let d = alg.datum().dim;
    let mut g = Group {
        rep,
        roots: real_roots_both(alg),
        ring: ring.clone(),
        ad_cache: HashMap::new(),
        y_cache: HashMap::new(),
    };
    let elements = ring.elements().expect("finite field");
    let units = ring.units().expect("finite field");
    let generator = units
        .iter()
        .find(|u| (1..field.order() - 1).all(|k| !ring.is_one(&ring.pow(u, k as i64).expect("unit"))))
        .cloned()
        .unwrap_or_else(|| ring.one());

    // Commutator constants with t = s = 1, found by brute force.
    let mut relations = Vec::new();
    let nroots = g.roots.len();
    for a in 0..nroots {
        for b in 0..nroots {
            let (ra, rb) = (g.roots[a].clone(), g.roots[b].clone());
            if a == b || ra == neg(&rb) {
                continue;
            }
            let mut terms: Vec<(u32, u32, usize)> = Vec::new();
            for s in 2..=8u32 {
                for i in 1..s {
                    let j = s - i;
                    let c: Vec<i64> = ra.iter().zip(&rb).map(|(x, y)| i as i64 * x + j as i64 * y).collect();
                    if let Some(k) = g.root_index(&c) {
                        terms.push((i, j, k));
                    }
                }
            }
            let one = ring.one();
            let comm = [
                Letter::X(a, one.clone()),
                Letter::X(b, one.clone()),
                Letter::X(a, ring.neg(&one)),
                Letter::X(b, ring.neg(&one)),
            ];
            let target = g.eval(&comm, true)?;
            let mut found = None;
            let total = (elements.len() as u64).pow(terms.len() as u32);
            for code in 0..total {
                let mut rest = code;
                let cs: Vec<Scalar> = terms
                    .iter()
                    .map(|_| {
                        let v = elements[(rest % elements.len() as u64) as usize].clone();
                        rest /= elements.len() as u64;
                        v
                    })
                    .collect();
                let word: Vec<Letter> = terms.iter().zip(&cs).map(|((_, _, k), c)| Letter::X(*k, c.clone())).collect();
                if g.eval(&word, true)? == target {
                    found = Some(cs);
                    break;
                }
            }
            let cs = found.ok_or_else(|| {
                Error::Violation(format!("no commutator expansion found for roots {ra:?}, {rb:?}"))
            })?;
            relations.push((
                a,
                b,
                terms.iter().zip(cs).map(|(&(i, j, k), c)| (i, j, k, c)).collect::<Vec<_>>(),
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut families: BTreeMap<String, usize> = BTreeMap::new();
    let mut words: Vec<(String, Vec<Letter>)> = Vec::new();
    let cochar: Vec<Vec<i64>> = (0..d).map(|k| unit(d, k)).collect();
    let pick = |rng: &mut ChaCha8Rng, v: &[Scalar]| v[rng.gen_range(0..v.len())].clone();

    // Additivity, exhaustive.
    for r in 0..nroots {
        for t in &elements {
            for s in &elements {
                let sum = ring.add(t, s);
                words.push((
                    "additivity".into(),
                    vec![Letter::X(r, t.clone()), Letter::X(r, s.clone()), Letter::X(r, ring.neg(&sum))],
                ));
            }
        }
    }
    // Torus normalisation, exhaustive over cocharacters and a generator.
    for h in &cochar {
        for r in 0..nroots {
            for s in &elements {
                let t = generator.clone();
                let t_inv = ring.inv(&t).expect("unit");
                let k = alg.datum().eval(&g.roots[r], h);
                let scaled = ring.mul(&ring.pow(&t, k).expect("unit"), s);
                words.push((
                    "torus".into(),
                    vec![
                        Letter::T(h.clone(), t.clone()),
                        Letter::X(r, s.clone()),
                        Letter::T(h.clone(), t_inv),
                        Letter::X(r, ring.neg(&scaled)),
                    ],
                ));
            }
        }
    }
    // Commutator relations with the discovered constants, all t, s.
    let comm_word = |g: &Group, a: usize, b: usize, terms: &[(u32, u32, usize, Scalar)], t: &Scalar, s: &Scalar| {
        let mut w = vec![
            Letter::X(a, t.clone()),
            Letter::X(b, s.clone()),
            Letter::X(a, ring.neg(t)),
            Letter::X(b, ring.neg(s)),
        ];
        let prod: Vec<Letter> = terms
            .iter()
            .map(|(i, j, k, c)| {
                let v = ring.mul(
                    c,
                    &ring.mul(&ring.pow(t, *i as i64).expect("power"), &ring.pow(s, *j as i64).expect("power")),
                );
                Letter::X(*k, v)
            })
            .collect();
        w.extend(g.inverse(&prod).expect("root letters"));
        w
    };
    for (a, b, terms) in &relations {
        for t in &units {
            for s in &units {
                words.push(("commutator".into(), comm_word(&g, *a, *b, terms, t, s)));
            }
        }
    }
    // n_a(1)^2 = h_a(-1).
    let minus_one = ring.neg(&ring.one());
    for r in 0..nroots {
        let root = g.roots[r].clone();
        let nr = g.root_index(&neg(&root)).expect("negative root");
        let pos = if root.iter().any(|&x| x < 0) { neg(&root) } else { root.clone() };
        let mut cor = alg.coroot_vector(&pos)?;
        if pos != root {
            cor = neg(&cor);
        }
        let n = vec![Letter::X(r, ring.one()), Letter::X(nr, minus_one.clone()), Letter::X(r, ring.one())];
        let mut w = n.clone();
        w.extend(n);
        w.push(Letter::T(cor, minus_one.clone()));
        words.push(("n-squared".into(), w));
    }
    // Random conjugates of the relations above until the sample target.
    let base = words.clone();
    while words.len() < config.samples {
        let (_, rel) = &base[rng.gen_range(0..base.len())];
        let len = rng.gen_range(1..=6);
        let u: Vec<Letter> = (0..len)
            .map(|_| {
                if rng.gen_bool(0.8) {
                    Letter::X(rng.gen_range(0..nroots), pick(&mut rng, &elements))
                } else {
                    Letter::T(cochar[rng.gen_range(0..d)].clone(), pick(&mut rng, &units))
                }
            })
            .collect();
        let mut w = u.clone();
        w.extend(rel.iter().cloned());
        w.extend(g.inverse(&u)?);
        words.push(("conjugate".into(), w));
    }

    // Generators of G_V and rho(g), for the centrality test.
    let mut probes: Vec<Matrix> = (0..alg.dim()).map(|a| rep.rho(a).clone()).collect();
    for h in &cochar {
        probes.push(g.y(&Letter::T(h.clone(), generator.clone()))?);
    }
    for r in 0..nroots {
        for t in &units {
            probes.push(g.y(&Letter::X(r, t.clone()))?);
        }
    }
    // Warm the caches, then evaluate in parallel.
    for (_, w) in &words {
        for l in w {
            g.ad(l)?;
            g.y(l)?;
        }
    }
    let (ad_cache, y_cache) = (&g.ad_cache, &g.y_cache);
    let eval = |cache: &HashMap<Letter, Matrix>, w: &[Letter], n: usize| {
        let mut acc = Matrix::identity(&ring, n);
        for l in w {
            acc = acc.mul(&cache[l]);
        }
        acc
    };
    let (adim, vdim) = (alg.dim(), rep.dim());
    let outcomes: Vec<(bool, bool, Option<serde_json::Value>)> = words
        .par_iter()
        .map(|(family, w)| {
            let ad = eval(ad_cache, w, adim);
            if !ad.is_identity() {
                return (false, false, Some(json!({"family": family, "reason": "not trivial in the adjoint group"})));
            }
            let y = eval(y_cache, w, vdim);
            let central = probes.iter().all(|m| y.mul(m) == m.mul(&y));
            if !central {
                return (false, true, Some(json!({"family": family, "reason": "image in G_V is not central"})));
            }
            (true, !y.is_identity(), None)
        })
        .collect();
    for (family, _) in &words {
        *families.entry(family.clone()).or_insert(0) += 1;
    }
    let cases_failed = outcomes.iter().filter(|(ok, _, _)| !ok).count();
    let nontrivial = outcomes.iter().filter(|(ok, nt, _)| *ok && *nt).count();
    let witnesses = outcomes.iter().filter_map(|(_, _, w)| w.clone()).take(MAX_WITNESSES).collect();
    let commutator_relations = relations
        .iter()
        .map(|(a, b, terms)| CommutatorRelation {
            alpha: g.roots[*a].clone(),
            beta: g.roots[*b].clone(),
            terms: terms
                .iter()
                .map(|(i, j, k, c)| CommutatorTerm { i: *i, j: *j, root: g.roots[*k].clone(), c: c.clone() })
                .collect(),
        })
        .collect();
    Ok(GroupReport {
        check: "group".into(),
        instance: instance_name(rep),
        p,
        q: field.order(),
        faithful_on_torus: rep.faithful_on_torus().unwrap_or(false),
        faithful_on_algebra: rep.faithful_on_algebra(),
        commutator_relations,
        cases_total: words.len(),
        cases_failed,
        nontrivial_kernel_words: nontrivial,
        family_counts: families,
        witnesses,
        seed: config.seed,
    })
}
