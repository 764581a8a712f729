//! Generalised Cartan matrices, root data and type classification.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::exactalg::{Matrix, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Square,
    Diagonal,
    OffDiagonalSign,
    ZeroSymmetry,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Square => "matrix is not square",
            Axiom::Diagonal => "diagonal entry is not 2",
            Axiom::OffDiagonalSign => "off-diagonal entry is positive",
            Axiom::ZeroSymmetry => "zero pattern is not symmetric",
        })
    }
}

/// Violated axiom and the (1-based) offending cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("{axiom} at ({row},{col})")]
pub struct GcmError {
    pub axiom: Axiom,
    pub row: usize,
    pub col: usize,
}

/// A generalised Cartan matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gcm {
    n: usize,
    entries: Vec<i64>,
}

impl Serialize for Gcm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Checks the three axioms and builds a [`Gcm`].
pub fn validate_gcm(rows: &[Vec<i64>]) -> Result<Gcm, GcmError> {
    let n = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(GcmError { axiom: Axiom::Square, row: i + 1, col: r.len() });
        }
    }
    for i in 0..n {
        if rows[i][i] != 2 {
            return Err(GcmError { axiom: Axiom::Diagonal, row: i + 1, col: i + 1 });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if rows[i][j] > 0 {
                return Err(GcmError { axiom: Axiom::OffDiagonalSign, row: i + 1, col: j + 1 });
            }
            if (rows[i][j] == 0) != (rows[j][i] == 0) {
                let (r, c) = if rows[i][j] == 0 { (i, j) } else { (j, i) };
                return Err(GcmError { axiom: Axiom::ZeroSymmetry, row: r + 1, col: c + 1 });
            }
        }
    }
    Ok(Gcm { n, entries: rows.iter().flatten().copied().collect() })
}

impl Gcm {
    pub fn new(rows: &[Vec<i64>]) -> Result<Self> {
        Ok(validate_gcm(rows)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `A_ij`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    /// Principal submatrix on the (0-based) index set `idx`.
    pub fn principal(&self, idx: &[usize]) -> Gcm {
        let entries = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).map(|(i, j)| self.get(i, j)).collect();
        Gcm { n: idx.len(), entries }
    }

    /// `max_{i != j} (-A_ij)`, zero for rank one.
    pub fn max_off_diagonal(&self) -> i64 {
        let mut best = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    best = best.max(-self.get(i, j));
                }
            }
        }
        best
    }

    pub fn to_matrix(&self, ring: &Ring) -> Matrix {
        Matrix::from_i64(ring, &self.rows())
    }

    pub fn rank(&self) -> usize {
        self.to_matrix(&Ring::Q).rank()
    }

    pub fn determinant(&self) -> BigInt {
        determinant(&self.rows())
    }

    /// Connected components of the Dynkin graph (`A_ij != 0`), each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                let i = comp[k];
                for j in 0..self.n {
                    if !seen[j] && self.get(i, j) != 0 {
                        seen[j] = true;
                        comp.push(j);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Every principal minor is positive. For indecomposable matrices this is
    /// exactly finite type; for decomposable ones it holds iff every
    /// component is of finite type.
    pub fn is_finite_type(&self) -> bool {
        principal_minors(self).into_iter().all(|(_, d)| d.is_positive())
    }
}

/// Bareiss fraction-free determinant.
pub fn determinant(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// All nonempty principal minors, keyed by their index subsets.
fn principal_minors(a: &Gcm) -> Vec<(Vec<usize>, BigInt)> {
    let n = a.n();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        out.push((idx.clone(), a.principal(&idx).determinant()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Minimal,
    SimplyConnected,
}

/// A realisation of a GCM over `Z`: coroots `h_i` in `Z^d`, roots `alpha_j`
/// as covectors on `Z^d`, with `alpha_j(h_i) = A_ij`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootDatum {
    pub gcm: Gcm,
    pub variant: Variant,
    /// Rank of the free module `h`.
    pub dim: usize,
    pub coroots: Vec<Vec<i64>>,
    pub roots: Vec<Vec<i64>>,
    /// Unit vectors appended to `A^T` to complete the roots to full rank
    /// (minimal variant only).
    pub completion: Vec<usize>,
    /// Set when the simply-connected variant is built with the roots as a
    /// basis of the dual, rather than the coroots as a basis of `h`.
    pub literal_simply_connected: bool,
}

/// Builds the standard realisation of the requested variant.
pub fn build_root_datum(gcm: &Gcm, variant: Variant) -> Result<RootDatum> {
    let n = gcm.n();
    match variant {
        Variant::Minimal => {
            let r = gcm.rank();
            let d = 2 * n - r;
            // Covector of alpha_j: column j of A, then the completion.
            let at = gcm.to_matrix(&Ring::Q).transpose();
            let mut completion = Vec::new();
            let mut current = at.clone();
            let mut rank = r;
            for k in 0..n {
                if rank == n {
                    break;
                }
                let col = Matrix::from_fn(&Ring::Q, n, 1, |i, _| Ring::Q.from_i64((i == k) as i64));
                let trial = hcat(&current, &col);
                if trial.rank() > rank {
                    current = trial;
                    rank += 1;
                    completion.push(k);
                }
            }
            let roots = (0..n)
                .map(|j| {
                    let mut v: Vec<i64> = (0..n).map(|i| gcm.get(i, j)).collect();
                    v.extend(completion.iter().map(|&k| (k == j) as i64));
                    v
                })
                .collect();
            let coroots = (0..n).map(|i| (0..d).map(|k| (k == i) as i64).collect()).collect();
            let datum = RootDatum {
                gcm: gcm.clone(),
                variant,
                dim: d,
                coroots,
                roots,
                completion,
                literal_simply_connected: false,
            };
            datum.check()?;
            Ok(datum)
        }
        Variant::SimplyConnected => {
            if gcm.determinant().is_zero() {
                return Err(Error::invalid(
                    "simply-connected datum needs det(A) != 0 (roots must form a basis)",
                ));
            }
            let roots = (0..n).map(|j| (0..n).map(|k| (k == j) as i64).collect()).collect();
            let coroots = gcm.rows();
            let datum = RootDatum {
                gcm: gcm.clone(),
                variant,
                dim: n,
                coroots,
                roots,
                completion: Vec::new(),
                literal_simply_connected: true,
            };
            datum.check()?;
            Ok(datum)
        }
    }
}

fn hcat(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.ring(), a.rows(), a.cols() + b.cols(), |i, j| {
        if j < a.cols() {
            a[(i, j)].clone()
        } else {
            b[(i, j - a.cols())].clone()
        }
    })
}

impl RootDatum {
    pub fn n(&self) -> usize {
        self.gcm.n()
    }

    /// `alpha_j(h_i)` for all `i, j`.
    pub fn pairing_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| dot(&self.roots[j], &self.coroots[i])).collect())
            .collect()
    }

    /// Value of the root-lattice element with simple-root coordinates
    /// `coords` on `h`.
    pub fn eval(&self, coords: &[i64], h: &[i64]) -> i64 {
        coords.iter().zip(&self.roots).map(|(&c, a)| c * dot(a, h)).sum()
    }

    /// Value of `coords` on the coroot `h_i`, i.e. `sum_j c_j A_ij`.
    pub fn eval_coroot(&self, coords: &[i64], i: usize) -> i64 {
        coords.iter().enumerate().map(|(j, &c)| c * self.gcm.get(i, j)).sum()
    }

    fn check(&self) -> Result<()> {
        if self.pairing_matrix() != self.gcm.rows() {
            return Err(Error::Violation("root datum pairing differs from the GCM".into()));
        }
        let h = Matrix::from_i64(&Ring::Q, &self.coroots);
        let a = Matrix::from_i64(&Ring::Q, &self.roots);
        if h.rank() != self.n() || a.rank() != self.n() {
            return Err(Error::Violation("root datum vectors are dependent".into()));
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComponentKind {
    Finite,
    Affine,
    Indefinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentType {
    /// 1-based indices of the component.
    pub indices: Vec<usize>,
    pub kind: ComponentKind,
    pub determinant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeReport {
    pub components: Vec<ComponentType>,
    /// Every pair `{i, j}` spans a finite Coxeter group (`A_ij A_ji <= 3`).
    pub is_2_spherical: bool,
    /// `A_ij A_ji >= 4` for all `i != j`.
    pub is_generic: bool,
}

pub fn classify(gcm: &Gcm) -> TypeReport {
    let components = gcm
        .components()
        .into_iter()
        .map(|idx| {
            let sub = gcm.principal(&idx);
            let minors = principal_minors(&sub);
            let full = (1u64 << idx.len()) - 1;
            let det = sub.determinant();
            let proper_positive = minors
                .iter()
                .filter(|(s, _)| s.len() < idx.len() || full == 0)
                .all(|(_, d)| d.is_positive());
            let kind = if proper_positive && det.is_positive() {
                ComponentKind::Finite
            } else if proper_positive && det.is_zero() {
                ComponentKind::Affine
            } else {
                ComponentKind::Indefinite
            };
            ComponentType { indices: idx.iter().map(|i| i + 1).collect(), kind, determinant: det.to_string() }
        })
        .collect();
    let n = gcm.n();
    let pairs = || (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    TypeReport {
        components,
        is_2_spherical: pairs().all(|(i, j)| gcm.get(i, j) * gcm.get(j, i) <= 3),
        is_generic: pairs().all(|(i, j)| gcm.get(i, j) * gcm.get(j, i) >= 4),
    }
}

/// GCM input document shared with the command-line front-end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcmDocument {
    pub matrix: Vec<Vec<i64>>,
    #[serde(default)]
    pub variant: Variant,
}

impl GcmDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("GCM document: {e}")))
    }

    pub fn gcm(&self) -> Result<Gcm> {
        Gcm::new(&self.matrix)
    }

    pub fn datum(&self) -> Result<RootDatum> {
        build_root_datum(&self.gcm()?, self.variant)
    }
}

/// A few matrices used throughout the tests and examples.
pub mod catalog {
    use super::Gcm;

    pub fn a1() -> Gcm {
        Gcm::new(&[vec![2]]).unwrap()
    }
    pub fn a2() -> Gcm {
        Gcm::new(&[vec![2, -1], vec![-1, 2]]).unwrap()
    }
    pub fn b2() -> Gcm {
        Gcm::new(&[vec![2, -2], vec![-1, 2]]).unwrap()
    }
    pub fn g2() -> Gcm {
        Gcm::new(&[vec![2, -1], vec![-3, 2]]).unwrap()
    }
    pub fn affine_a1() -> Gcm {
        Gcm::new(&[vec![2, -2], vec![-2, 2]]).unwrap()
    }
    pub fn generic33() -> Gcm {
        Gcm::new(&[vec![2, -3], vec![-3, 2]]).unwrap()
    }
    pub fn a3() -> Gcm {
        Gcm::new(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validation_examples() {
        assert!(validate_gcm(&[vec![2, -1], vec![-1, 2]]).is_ok());
        let e = validate_gcm(&[vec![2, -1], vec![0, 2]]).unwrap_err();
        assert_eq!(e, GcmError { axiom: Axiom::ZeroSymmetry, row: 2, col: 1 });
        let e = validate_gcm(&[vec![3]]).unwrap_err();
        assert_eq!(e.axiom, Axiom::Diagonal);
        let e = validate_gcm(&[vec![2, 1], vec![1, 2]]).unwrap_err();
        assert_eq!(e.axiom, Axiom::OffDiagonalSign);
        let e = validate_gcm(&[vec![2, -1]]).unwrap_err();
        assert_eq!(e.axiom, Axiom::Square);
    }

    #[test]
    fn error_object_is_machine_readable() {
        let e = validate_gcm(&[vec![2, -1], vec![0, 2]]).unwrap_err();
        let v = serde_json::to_value(e).unwrap();
        assert_eq!(v, serde_json::json!({"axiom": "zero-symmetry", "row": 2, "col": 1}));
    }

    #[test]
    fn minimal_realisation_dimensions() {
        let d = build_root_datum(&a2(), Variant::Minimal).unwrap();
        assert_eq!(d.dim, 2);
        let d = build_root_datum(&affine_a1(), Variant::Minimal).unwrap();
        assert_eq!(d.dim, 3);
        assert_eq!(d.pairing_matrix(), affine_a1().rows());
        assert_eq!(d.completion.len(), 1);
    }

    #[test]
    fn simply_connected_a2() {
        let d = build_root_datum(&a2(), Variant::SimplyConnected).unwrap();
        assert_eq!(d.dim, 2);
        assert_eq!(d.roots, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(d.coroots, a2().rows());
        assert_eq!(d.pairing_matrix(), a2().rows());
        assert!(d.literal_simply_connected);
        assert!(build_root_datum(&affine_a1(), Variant::SimplyConnected).is_err());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&a2()).components[0].kind, ComponentKind::Finite);
        assert_eq!(classify(&affine_a1()).components[0].kind, ComponentKind::Affine);
        let r = classify(&generic33());
        assert_eq!(r.components[0].kind, ComponentKind::Indefinite);
        assert_eq!(r.components[0].determinant, "-5");
        assert!(r.is_generic);
        assert!(!r.is_2_spherical);
        assert!(classify(&g2()).is_2_spherical);
    }

    #[test]
    fn decomposable_matrix_has_two_components() {
        let a = Gcm::new(&[vec![2, 0, 0], vec![0, 2, -2], vec![0, -2, 2]]).unwrap();
        let r = classify(&a);
        assert_eq!(r.components.len(), 2);
        assert_eq!(r.components[0].kind, ComponentKind::Finite);
        assert_eq!(r.components[1].kind, ComponentKind::Affine);
        let d = build_root_datum(&a, Variant::Minimal).unwrap();
        assert_eq!(d.dim, 4);
    }

    #[test]
    fn document_parsing() {
        let doc = GcmDocument::parse(r#"{"matrix": [[2,-1],[-1,2]], "variant": "simply-connected"}"#).unwrap();
        assert_eq!(doc.variant, Variant::SimplyConnected);
        let doc = GcmDocument::parse(r#"{"matrix": [[2]]}"#).unwrap();
        assert_eq!(doc.variant, Variant::Minimal);
    }

    fn arb_gcm() -> impl Strategy<Value = Gcm> {
        (2usize..5).prop_flat_map(|n| {
            proptest::collection::vec((0i64..4, 0i64..4), n * (n - 1) / 2).prop_map(move |pairs| {
                let mut rows = vec![vec![0i64; n]; n];
                let mut k = 0;
                for i in 0..n {
                    rows[i][i] = 2;
                    for j in i + 1..n {
                        let (a, b) = pairs[k];
                        k += 1;
                        if a == 0 || b == 0 {
                            continue;
                        }
                        rows[i][j] = -a;
                        rows[j][i] = -b;
                    }
                }
                Gcm::new(&rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn minimal_datum_pairs_to_gcm(a in arb_gcm()) {
            let d = build_root_datum(&a, Variant::Minimal).unwrap();
            prop_assert_eq!(d.pairing_matrix(), a.rows());
            prop_assert_eq!(d.dim, 2 * a.n() - a.rank());
        }

        #[test]
        fn classify_is_permutation_invariant(a in arb_gcm(), seed in 0u64..1000) {
            let n = a.n();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                let j = (s % (i as u64 + 1)) as usize;
                perm.swap(i, j);
                s /= 7;
            }
            let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| a.get(perm[i], perm[j])).collect()).collect();
            let b = Gcm::new(&rows).unwrap();
            let kinds = |r: TypeReport| {
                let mut k: Vec<_> = r.components.iter().map(|c| (c.indices.len(), c.kind)).collect();
                k.sort_by_key(|x| format!("{x:?}"));
                (k, r.is_2_spherical, r.is_generic)
            };
            prop_assert_eq!(kinds(classify(&a)), kinds(classify(&b)));
        }
    }
}
