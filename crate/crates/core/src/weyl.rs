//! Weyl groups as integer matrix groups, reduced words and real roots.
//!
//! Simple-root indices are 0-based in the Rust API; serialized words use
//! 1-based letters.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gcm::{Gcm, RootDatum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RootKind {
    Real,
    Imaginary,
}

/// A root written in simple-root coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Root {
    pub coords: Vec<i64>,
    pub height: i64,
    pub kind: RootKind,
    /// Coroot coordinates over `h_1..h_n` (real roots only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coroot: Option<Vec<i64>>,
}

impl Root {
    pub fn is_positive(&self) -> bool {
        is_positive(&self.coords)
    }
}

pub fn is_positive(c: &[i64]) -> bool {
    c.iter().all(|&x| x >= 0) && c.iter().any(|&x| x != 0)
}

pub fn is_negative(c: &[i64]) -> bool {
    c.iter().all(|&x| x <= 0) && c.iter().any(|&x| x != 0)
}

/// Square integer matrix in row-major order.
fn mat_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

fn mat_apply(a: &[i64], v: &[i64]) -> Vec<i64> {
    let n = v.len();
    (0..n).map(|i| (0..n).map(|k| a[i * n + k] * v[k]).sum()).collect()
}

fn identity(n: usize) -> Vec<i64> {
    (0..n * n).map(|k| (k / n == k % n) as i64).collect()
}

/// Reflection `s_i` on simple-root coordinates: `c - (sum_j c_j A_ij) e_i`.
fn root_reflection(gcm: &Gcm, i: usize) -> Vec<i64> {
    let n = gcm.n();
    let mut m = identity(n);
    for j in 0..n {
        m[i * n + j] -= gcm.get(i, j);
    }
    m
}

/// Reflection `s_i` on covectors of `h`: `l - l(h_i) alpha_i`.
fn dual_reflection(datum: &RootDatum, i: usize) -> Vec<i64> {
    let d = datum.dim;
    let mut m = identity(d);
    for r in 0..d {
        for c in 0..d {
            m[r * d + c] -= datum.roots[i][r] * datum.coroots[i][c];
        }
    }
    m
}

/// Applies `s_i` to simple-root coordinates.
pub fn reflect(gcm: &Gcm, i: usize, c: &[i64]) -> Vec<i64> {
    let k: i64 = c.iter().enumerate().map(|(j, &x)| x * gcm.get(i, j)).sum();
    let mut out = c.to_vec();
    out[i] -= k;
    out
}

/// Applies `s_i` to coroot coordinates: `h - alpha_i(h) h_i`.
pub fn reflect_coroot(gcm: &Gcm, i: usize, c: &[i64]) -> Vec<i64> {
    let k: i64 = c.iter().enumerate().map(|(j, &x)| x * gcm.get(j, i)).sum();
    let mut out = c.to_vec();
    out[i] -= k;
    out
}

#[derive(Debug, Clone)]
pub struct WeylElement {
    d: usize,
    n: usize,
    /// Action on covectors of `h`, in the datum's coordinates.
    dual: Vec<i64>,
    /// Action on the root lattice and its inverse.
    root: Vec<i64>,
    root_inv: Vec<i64>,
    word: Vec<usize>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.dual == other.dual
    }
}

impl Eq for WeylElement {}

impl Serialize for WeylElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        one_based(&self.word).serialize(s)
    }
}

pub fn one_based(word: &[usize]) -> Vec<usize> {
    word.iter().map(|i| i + 1).collect()
}

impl WeylElement {
    pub fn identity(datum: &RootDatum) -> Self {
        let (d, n) = (datum.dim, datum.n());
        WeylElement { d, n, dual: identity(d), root: identity(n), root_inv: identity(n), word: Vec::new() }
    }

    /// Product of the simple reflections in `word`, left to right.
    pub fn from_word(datum: &RootDatum, word: &[usize]) -> Result<Self> {
        let mut w = Self::identity(datum);
        for &i in word {
            w = w.mul_simple(datum, i)?;
        }
        w.word = reduced_word(&w, &datum.gcm);
        Ok(w)
    }

    /// `w s_i`; the stored word is the concatenation, not yet canonical.
    pub fn mul_simple(&self, datum: &RootDatum, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(Error::invalid(format!("simple reflection index {} out of range 1..{}", i + 1, self.n)));
        }
        let s = root_reflection(&datum.gcm, i);
        let mut word = self.word.clone();
        word.push(i);
        Ok(WeylElement {
            d: self.d,
            n: self.n,
            dual: mat_mul(&self.dual, &dual_reflection(datum, i), self.d),
            root: mat_mul(&self.root, &s, self.n),
            root_inv: mat_mul(&s, &self.root_inv, self.n),
            word,
        })
    }

    pub fn mul(&self, datum: &RootDatum, other: &WeylElement) -> Self {
        let mut w = WeylElement {
            d: self.d,
            n: self.n,
            dual: mat_mul(&self.dual, &other.dual, self.d),
            root: mat_mul(&self.root, &other.root, self.n),
            root_inv: mat_mul(&other.root_inv, &self.root_inv, self.n),
            word: Vec::new(),
        };
        w.word = reduced_word(&w, &datum.gcm);
        w
    }

    pub fn inverse(&self, datum: &RootDatum) -> Self {
        let mut rev = self.word.clone();
        rev.reverse();
        Self::from_word(datum, &rev).expect("letters in range")
    }

    /// Canonical (ShortLex) reduced word, 0-based letters.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    /// The `d x d` matrix on covectors of `h`.
    pub fn dual_matrix(&self) -> Vec<Vec<i64>> {
        self.dual.chunks(self.d).map(|r| r.to_vec()).collect()
    }

    pub fn dual_key(&self) -> &[i64] {
        &self.dual
    }

    /// Image of a root-lattice vector.
    pub fn act(&self, c: &[i64]) -> Vec<i64> {
        mat_apply(&self.root, c)
    }

    pub fn act_inverse(&self, c: &[i64]) -> Vec<i64> {
        mat_apply(&self.root_inv, c)
    }

    fn simple(&self, i: usize) -> Vec<i64> {
        (0..self.n).map(|k| (k == i) as i64).collect()
    }

    /// `l(w s_i) < l(w)`.
    pub fn is_right_descent(&self, i: usize) -> bool {
        is_negative(&self.act(&self.simple(i)))
    }

    /// `l(s_i w) < l(w)`.
    pub fn is_left_descent(&self, i: usize) -> bool {
        is_negative(&self.act_inverse(&self.simple(i)))
    }
}

pub fn simple_reflection(datum: &RootDatum, i: usize) -> Result<WeylElement> {
    WeylElement::identity(datum).mul_simple(datum, i)
}

/// ShortLex reduced word: repeatedly strip the smallest left descent.
pub fn reduced_word(w: &WeylElement, gcm: &Gcm) -> Vec<usize> {
    let n = w.n;
    let mut root = w.root.clone();
    let mut root_inv = w.root_inv.clone();
    let mut word = Vec::new();
    loop {
        let desc = (0..n).find(|&i| {
            let e: Vec<i64> = (0..n).map(|k| (k == i) as i64).collect();
            is_negative(&mat_apply(&root_inv, &e))
        });
        match desc {
            None => break,
            Some(i) => {
                let s = root_reflection(gcm, i);
                root = mat_mul(&s, &root, n);
                root_inv = mat_mul(&root_inv, &s, n);
                word.push(i);
            }
        }
    }
    debug_assert!(root == identity(n));
    word
}

/// Positive real roots of height at most `max_height`, sorted by height and
/// then coordinates, each carrying its coroot.
pub fn enumerate_real_roots(datum: &RootDatum, max_height: i64) -> Vec<Root> {
    let gcm = &datum.gcm;
    let n = gcm.n();
    let mut found: BTreeMap<(i64, Vec<i64>), Vec<i64>> = BTreeMap::new();
    let mut frontier = Vec::new();
    if max_height >= 1 {
        for i in 0..n {
            let e: Vec<i64> = (0..n).map(|k| (k == i) as i64).collect();
            found.insert((1, e.clone()), e.clone());
            frontier.push((e.clone(), e));
        }
    }
    while let Some((beta, cor)) = frontier.pop() {
        for i in 0..n {
            let img = reflect(gcm, i, &beta);
            if !is_positive(&img) {
                continue;
            }
            let h: i64 = img.iter().sum();
            if h > max_height || found.contains_key(&(h, img.clone())) {
                continue;
            }
            let c = reflect_coroot(gcm, i, &cor);
            found.insert((h, img.clone()), c.clone());
            frontier.push((img, c));
        }
    }
    found
        .into_iter()
        .map(|((height, coords), cor)| Root { coords, height, kind: RootKind::Real, coroot: Some(cor) })
        .collect()
}

/// `W_J` is finite, i.e. `A_J` is of finite type. `J` is 0-based.
pub fn is_spherical(gcm: &Gcm, j: &[usize]) -> bool {
    j.is_empty() || gcm.principal(j).is_finite_type()
}

/// Default cap on the number of enumerated group elements.
pub const DEFAULT_BALL_CAP: usize = 2_000_000;

/// All elements of length at most `max_len`, ordered by length and then
/// reduced word.
pub fn enumerate_weyl_ball(datum: &RootDatum, max_len: usize) -> Result<Vec<WeylElement>> {
    enumerate_weyl_ball_capped(datum, max_len, DEFAULT_BALL_CAP)
}

pub fn enumerate_weyl_ball_capped(datum: &RootDatum, max_len: usize, cap: usize) -> Result<Vec<WeylElement>> {
    let n = datum.n();
    let mut all = vec![WeylElement::identity(datum)];
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    seen.insert(all[0].dual.clone());
    let mut level = all.clone();
    for _ in 0..max_len {
        let mut next: Vec<WeylElement> = level
            .par_iter()
            .flat_map_iter(|w| (0..n).filter(|&i| !w.is_right_descent(i)).map(move |i| (w, i)))
            .map(|(w, i)| {
                let mut v = w.mul_simple(datum, i).expect("index in range");
                v.word = reduced_word(&v, &datum.gcm);
                v
            })
            .collect();
        next.sort_by(|a, b| a.word.cmp(&b.word));
        next.retain(|w| seen.insert(w.dual.clone()));
        if next.is_empty() {
            break;
        }
        if all.len() + next.len() > cap {
            return Err(Error::WindowExceeded(format!("Weyl ball exceeds {cap} elements")));
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    Ok(all)
}

/// Longest element of the finite parabolic subgroup `W_J`.
pub fn longest_element(datum: &RootDatum, j: &[usize]) -> Result<WeylElement> {
    if !is_spherical(&datum.gcm, j) {
        return Err(Error::invalid("parabolic subgroup is infinite"));
    }
    let mut w = WeylElement::identity(datum);
    'grow: loop {
        for &i in j {
            if !w.is_right_descent(i) {
                w = w.mul_simple(datum, i)?;
                continue 'grow;
            }
        }
        break;
    }
    w.word = reduced_word(&w, &datum.gcm);
    Ok(w)
}
