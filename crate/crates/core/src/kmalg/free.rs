//! Positive part of the Serre quotient, computed inside the free associative
//! algebra on `e_1..e_n`.
//!
//! The enveloping algebra of `n_+` is the free algebra modulo the two-sided
//! ideal generated by the Serre elements, and `n_+` is the image of the free
//! Lie algebra there. Each multidegree is handled separately: its ideal
//! component is built from the components one letter lower, and a basis of
//! `n_+` is picked greedily among standard bracketings of Lyndon words.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{Matrix, Ring, Scalar};
use crate::gcm::Gcm;

pub type Word = Vec<u8>;
type Q = BigRational;

/// Largest number of words tolerated in one multidegree.
pub const DEFAULT_WORD_CAP: usize = 20_000;

pub fn is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|k| w < &w[k..])
}

/// Standard factorisation `w = u v` with `v` the longest proper Lyndon suffix.
pub fn standard_factorisation(w: &[u8]) -> (&[u8], &[u8]) {
    let k = (1..w.len()).find(|&k| is_lyndon(&w[k..])).expect("word of length >= 2");
    (&w[..k], &w[k..])
}

/// One multidegree of the free algebra together with its ideal component.
#[derive(Debug, Clone)]
pub struct Component {
    pub degree: Vec<i64>,
    pub height: i64,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    /// Ideal component in reduced row echelon form.
    ideal: Vec<Vec<Q>>,
    ideal_pivots: Vec<usize>,
    /// Lyndon words whose bracketings form the chosen basis.
    pub basis: Vec<Word>,
    /// Pivot columns of the reduced basis, and the inverse of the basis
    /// restricted to them (rows = basis elements).
    coord_pivots: Vec<usize>,
    coord_inverse: Vec<Vec<Q>>,
}

impl Component {
    /// A component known to vanish in the quotient; its words are not stored.
    fn empty(degree: Vec<i64>, height: i64) -> Self {
        Component {
            degree,
            height,
            words: Vec::new(),
            index: HashMap::new(),
            ideal: Vec::new(),
            ideal_pivots: Vec::new(),
            basis: Vec::new(),
            coord_pivots: Vec::new(),
            coord_inverse: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn ideal_dim(&self) -> usize {
        self.ideal.len()
    }

    fn reduce(&self, v: &mut [Q]) {
        for (row, &p) in self.ideal.iter().zip(&self.ideal_pivots) {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &c * r;
                }
            }
        }
    }

    /// Coordinates of a polynomial of this degree in the chosen basis,
    /// modulo the ideal.
    pub fn coordinates(&self, poly: &[Q]) -> Result<Vec<Q>> {
        let mut v = poly.to_vec();
        self.reduce(&mut v);
        let c: Vec<Q> = self
            .coord_inverse
            .iter()
            .map(|row| row.iter().zip(&self.coord_pivots).map(|(k, &p)| k * &v[p]).sum())
            .collect();
        Ok(c)
    }
}

fn rref_rows(rows: Vec<Vec<Q>>, cols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    if rows.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let m = Matrix::from_fn(&Ring::Q, rows.len(), cols, |i, j| Scalar::Rat(rows[i][j].clone()));
    let (r, pivots) = m.rref();
    let out = (0..pivots.len())
        .map(|i| r.row(i).iter().map(|s| s.as_rational().expect("rational").clone()).collect())
        .collect();
    (out, pivots)
}

fn words_of_content(content: &[i64]) -> Vec<Word> {
    fn go(rem: &mut Vec<i64>, cur: &mut Word, out: &mut Vec<Word>, left: i64) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in 0..rem.len() {
            if rem[k] > 0 {
                rem[k] -= 1;
                cur.push(k as u8);
                go(rem, cur, out, left - 1);
                cur.pop();
                rem[k] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let total = content.iter().sum();
    go(&mut content.to_vec(), &mut Vec::new(), &mut out, total);
    out
}

fn word_count(content: &[i64]) -> u128 {
    // Multinomial coefficient.
    let mut acc: u128 = 1;
    let mut seen: u128 = 0;
    for &c in content {
        for k in 1..=c as u128 {
            seen += 1;
            acc = acc * seen / k;
        }
    }
    acc
}

fn content(w: &[u8], n: usize) -> Vec<i64> {
    let mut c = vec![0; n];
    for &l in w {
        c[l as usize] += 1;
    }
    c
}

/// Multidegrees of height exactly `h` in `n` letters, in lexicographic order
/// (largest first coordinate last).
pub(crate) fn degrees_of_height(n: usize, h: i64) -> Vec<Vec<i64>> {
    fn go(n: usize, h: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n - 1 {
            cur.push(h);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=h {
            cur.push(k);
            go(n, h - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, h, &mut Vec::new(), &mut out);
    out.sort();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Multiplicity {
    pub root: Vec<i64>,
    pub height: i64,
    pub mult: usize,
}

/// Graded components of `n_+` of height at most the window.
#[derive(Debug, Clone)]
pub struct NPlus {
    pub n: usize,
    pub window: i64,
    components: BTreeMap<Vec<i64>, Component>,
    lyndon_polys: HashMap<Word, Vec<Q>>,
}

impl NPlus {
    pub fn component(&self, degree: &[i64]) -> Option<&Component> {
        self.components.get(degree)
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.components.values()
    }

    pub fn dim(&self, degree: &[i64]) -> usize {
        self.component(degree).map_or(0, Component::dim)
    }

    /// Nonzero components ordered by height, then degree.
    pub fn multiplicities(&self) -> Vec<Multiplicity> {
        let mut out: Vec<Multiplicity> = self
            .components
            .values()
            .filter(|c| c.dim() > 0)
            .map(|c| Multiplicity { root: c.degree.clone(), height: c.height, mult: c.dim() })
            .collect();
        out.sort_by(|a, b| (a.height, &a.root).cmp(&(b.height, &b.root)));
        out
    }

    /// Total dimension in each height `1..=window`.
    pub fn graded_dims(&self) -> Vec<usize> {
        (1..=self.window)
            .map(|h| self.components.values().filter(|c| c.height == h).map(Component::dim).sum())
            .collect()
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(Component::dim).sum()
    }

    /// A height at most the window with no roots, if any. All larger heights
    /// then vanish too.
    pub fn vanishing_height(&self) -> Option<i64> {
        self.graded_dims().iter().position(|&d| d == 0).map(|k| k as i64 + 1)
    }

    /// Polynomial of the standard bracketing of a Lyndon word.
    pub fn lyndon_poly(&self, w: &[u8]) -> &[Q] {
        &self.lyndon_polys[w]
    }

    /// Coordinates of a polynomial of the given degree in the chosen basis.
    pub fn coordinates(&self, degree: &[i64], poly: &[Q]) -> Result<Vec<Q>> {
        self.components[degree].coordinates(poly)
    }

    /// Polynomial of a vector given in basis coordinates.
    pub fn poly_of(&self, degree: &[i64], coords: &[Q]) -> Vec<Q> {
        let comp = &self.components[degree];
        let mut out = vec![Q::zero(); comp.words.len()];
        for (c, w) in coords.iter().zip(&comp.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(&self.lyndon_polys[w]) {
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        out
    }

    /// `a * b - b * a` for polynomials of the given degrees, or `None` when
    /// the result lies outside the window.
    pub fn commutator(&self, da: &[i64], a: &[Q], db: &[i64], b: &[Q]) -> Option<(Vec<i64>, Vec<Q>)> {
        let deg: Vec<i64> = da.iter().zip(db).map(|(x, y)| x + y).collect();
        let target = self.components.get(&deg)?;
        if target.basis.is_empty() {
            return Some((deg, vec![Q::zero(); target.words.len()]));
        }
        let (ca, cb) = (&self.components[da], &self.components[db]);
        let mut out = vec![Q::zero(); target.words.len()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let p = x * y;
                let mut ab = ca.words[i].clone();
                ab.extend_from_slice(&cb.words[j]);
                let mut ba = cb.words[j].clone();
                ba.extend_from_slice(&ca.words[i]);
                out[target.index[&ab]] += &p;
                out[target.index[&ba]] -= &p;
            }
        }
        Some((deg, out))
    }

    pub fn unit(&self, i: usize) -> Vec<i64> {
        (0..self.n).map(|k| (k == i) as i64).collect()
    }
}

/// Builds the components of `n_+` up to height `window`.
pub fn build_nplus_serre(gcm: &Gcm, window: i64) -> Result<NPlus> {
    build_nplus_capped(gcm, window, DEFAULT_WORD_CAP)
}

pub fn build_nplus_capped(gcm: &Gcm, window: i64, cap: usize) -> Result<NPlus> {
    if window < 1 {
        return Err(Error::invalid("height window must be at least 1"));
    }
    let n = gcm.n();
    let mut nplus = NPlus { n, window, components: BTreeMap::new(), lyndon_polys: HashMap::new() };
    // Serre elements (ad e_i)^{1-A_ij} e_j, keyed by content.
    let mut serre: BTreeMap<Vec<i64>, Vec<BTreeMap<Word, BigInt>>> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let k = 1 - gcm.get(i, j);
            let mut deg = vec![0i64; n];
            deg[i] += k;
            deg[j] += 1;
            if deg.iter().sum::<i64>() > window {
                continue;
            }
            let mut p: BTreeMap<Word, BigInt> = BTreeMap::from([(vec![j as u8], BigInt::one())]);
            for _ in 0..k {
                let mut next = BTreeMap::new();
                for (w, c) in &p {
                    let mut l = vec![i as u8];
                    l.extend_from_slice(w);
                    *next.entry(l).or_insert_with(BigInt::zero) += c;
                    let mut r = w.clone();
                    r.push(i as u8);
                    *next.entry(r).or_insert_with(BigInt::zero) -= c;
                }
                p = next;
            }
            serre.entry(deg).or_default().push(p);
        }
    }

    for h in 1..=window {
        for deg in degrees_of_height(n, h) {
            if word_count(&deg) > cap as u128 {
                return Err(Error::WindowExceeded(format!(
                    "multidegree {deg:?} has {} words (cap {cap})",
                    word_count(&deg)
                )));
            }
            let words = words_of_content(&deg);
            let index: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
            let w_len = words.len();
            let mut gens: Vec<Vec<Q>> = Vec::new();
            for k in 0..n {
                if deg[k] == 0 {
                    continue;
                }
                let mut lower = deg.clone();
                lower[k] -= 1;
                let Some(comp) = nplus.components.get(&lower) else { continue };
                for row in &comp.ideal {
                    let mut left = vec![Q::zero(); w_len];
                    let mut right = vec![Q::zero(); w_len];
                    for (x, w) in row.iter().zip(&comp.words) {
                        if x.is_zero() {
                            continue;
                        }
                        let mut l = vec![k as u8];
                        l.extend_from_slice(w);
                        left[index[&l]] = x.clone();
                        let mut r = w.clone();
                        r.push(k as u8);
                        right[index[&r]] = x.clone();
                    }
                    gens.push(left);
                    gens.push(right);
                }
            }
            for p in serre.get(&deg).into_iter().flatten() {
                let mut v = vec![Q::zero(); w_len];
                for (w, c) in p {
                    v[index[w]] = Q::from_integer(c.clone());
                }
                gens.push(v);
            }
            let (ideal, ideal_pivots) = rref_rows(gens, w_len);
            let mut comp = Component {
                degree: deg.clone(),
                height: h,
                words,
                index,
                ideal,
                ideal_pivots,
                basis: Vec::new(),
                coord_pivots: Vec::new(),
                coord_inverse: Vec::new(),
            };
            // Lyndon bracketings of this content.
            let lyndon: Vec<Word> = comp.words.iter().filter(|w| is_lyndon(w)).cloned().collect();
            for w in &lyndon {
                let poly = if w.len() == 1 {
                    vec![Q::one()]
                } else {
                    let (u, v) = standard_factorisation(w);
                    let (du, dv) = (content(u, n), content(v, n));
                    let (pu, pv) = (&nplus.lyndon_polys[u], &nplus.lyndon_polys[v]);
                    let mut out = vec![Q::zero(); w_len];
                    let (cu, cv) = (&nplus.components[&du], &nplus.components[&dv]);
                    for (i, x) in pu.iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        for (j, y) in pv.iter().enumerate() {
                            if y.is_zero() {
                                continue;
                            }
                            let p = x * y;
                            let mut ab = cu.words[i].clone();
                            ab.extend_from_slice(&cv.words[j]);
                            let mut ba = cv.words[j].clone();
                            ba.extend_from_slice(&cu.words[i]);
                            out[comp.index[&ab]] += &p;
                            out[comp.index[&ba]] -= &p;
                        }
                    }
                    out
                };
                nplus.lyndon_polys.insert(w.clone(), poly);
            }
            // Greedy choice modulo the ideal.
            let mut chosen_rows: Vec<Vec<Q>> = Vec::new();
            let mut span_rank = 0;
            for w in &lyndon {
                let mut v = nplus.lyndon_polys[w].clone();
                comp.reduce(&mut v);
                if v.iter().all(Zero::is_zero) {
                    continue;
                }
                let mut trial = chosen_rows.clone();
                trial.push(v.clone());
                let (_, piv) = rref_rows(trial, w_len);
                if piv.len() > span_rank {
                    span_rank = piv.len();
                    chosen_rows.push(v);
                    comp.basis.push(w.clone());
                }
            }
            if !chosen_rows.is_empty() {
                let (_, piv) = rref_rows(chosen_rows.clone(), w_len);
                let m = comp.basis.len();
                // Rows of (B[:, P])^T inverted give coordinates from v[P].
                let sub = Matrix::from_fn(&Ring::Q, m, m, |i, j| Scalar::Rat(chosen_rows[j][piv[i]].clone()));
                let inv = sub.inverse().ok_or_else(|| Error::Violation("singular basis block".into()))?;
                comp.coord_pivots = piv;
                comp.coord_inverse = (0..m)
                    .map(|i| (0..m).map(|j| inv[(i, j)].as_rational().expect("rational").clone()).collect())
                    .collect();
            }
            nplus.components.insert(deg, comp);
        }
        // Generated in height one: a vanishing height kills everything above.
        if nplus.components.values().filter(|c| c.height == h).all(|c| c.dim() == 0) {
            for h2 in h + 1..=window {
                for deg in degrees_of_height(n, h2) {
                    nplus.components.insert(deg.clone(), Component::empty(deg, h2));
                }
            }
            break;
        }
    }
    Ok(nplus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcm::catalog::*;

    #[test]
    fn lyndon_words() {
        assert!(is_lyndon(&[0, 1]));
        assert!(is_lyndon(&[0, 0, 1]));
        assert!(is_lyndon(&[0, 1, 1]));
        assert!(!is_lyndon(&[1, 0]));
        assert!(!is_lyndon(&[0, 1, 0, 1]));
        assert_eq!(standard_factorisation(&[0, 0, 1]), (&[0u8][..], &[0u8, 1][..]));
        assert_eq!(standard_factorisation(&[0, 1, 1]), (&[0u8, 1][..], &[1u8][..]));
    }

    /// Independent count: necklace formula for the number of Lyndon words.
    fn free_lie_dim(content: &[i64]) -> usize {
        words_of_content(content).iter().filter(|w| is_lyndon(w)).count()
    }

    #[test]
    fn free_lie_algebra_when_no_relations_apply() {
        // Two letters with A_12 = A_21 = -10: no Serre element fits in height 6.
        let g = Gcm::new(&[vec![2, -10], vec![-10, 2]]).unwrap();
        let np = build_nplus_serre(&g, 6).unwrap();
        for c in np.components() {
            assert_eq!(c.dim(), free_lie_dim(&c.degree), "degree {:?}", c.degree);
        }
    }

    #[test]
    fn finite_type_dimensions() {
        assert_eq!(build_nplus_serre(&a2(), 2).unwrap().total_dim(), 3);
        assert_eq!(build_nplus_serre(&b2(), 5).unwrap().total_dim(), 4);
        assert_eq!(build_nplus_serre(&g2(), 5).unwrap().total_dim(), 6);
        assert_eq!(build_nplus_serre(&a3(), 4).unwrap().total_dim(), 6);
    }

    #[test]
    fn affine_graded_dims() {
        let np = build_nplus_serre(&affine_a1(), 4).unwrap();
        assert_eq!(np.graded_dims(), vec![2, 1, 2, 1]);
        assert_eq!(np.dim(&[1, 1]), 1);
        assert_eq!(np.dim(&[2, 2]), 1);
    }

    #[test]
    fn window_cap() {
        assert!(matches!(build_nplus_capped(&generic33(), 8, 10), Err(Error::WindowExceeded(_))));
    }
}
