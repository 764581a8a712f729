//! Finite fields `F_q`, `q = p^m`.
//!
//! Elements are encoded as integers in `[0, q)`: the base-`p` digits of the
//! encoding are the coefficients (lowest degree first) of a polynomial of
//! degree `< m` reduced modulo the field's monic modulus.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest field order for which exp/log tables are precomputed.
const TABLE_LIMIT: u64 = 1 << 20;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

struct Tables {
    exp: Vec<u64>,
    log: Vec<u64>,
}

struct FieldInner {
    p: u64,
    m: u32,
    q: u64,
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

/// Shareable handle to a finite field. Cloning is cheap.
#[derive(Clone)]
pub struct FiniteField(Arc<FieldInner>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.modulus == other.0.modulus
    }
}
impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "F{}", self.0.p)
        } else {
            write!(f, "F{}^{}[{:?}]", self.0.p, self.0.m, self.0.modulus)
        }
    }
}

/// Serializable description of a field, echoed in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub m: u32,
    pub q: u64,
    /// Monic modulus, coefficients lowest degree first.
    pub modulus: Vec<u64>,
}

impl FiniteField {
    /// Builds `F_{p^m}` with the lexicographically smallest monic irreducible
    /// modulus (coefficients compared from degree `m-1` down to `0`).
    pub fn new(p: u64, m: u32) -> Result<Self> {
        check_order(p, m)?;
        let modulus = smallest_irreducible(p, m as usize);
        Ok(Self::build(p, modulus))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    /// Builds `F_{p^m}` from a user-supplied monic modulus (lowest degree first).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::invalid("field modulus must have degree at least 1"));
        }
        let m = (modulus.len() - 1) as u32;
        check_order(p, m)?;
        if *modulus.last().unwrap() != 1 {
            return Err(Error::invalid("field modulus must be monic"));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::invalid("field modulus coefficients must lie in [0,p)"));
        }
        if !is_irreducible(p, &modulus) {
            return Err(Error::invalid(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        Ok(Self::build(p, modulus))
    }

    fn build(p: u64, modulus: Vec<u64>) -> Self {
        let m = (modulus.len() - 1) as u32;
        let q = p.pow(m);
        let mut inner = FieldInner { p, m, q, modulus, tables: None };
        if m > 1 && q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        FiniteField(Arc::new(inner))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.m
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.0.p,
            m: self.0.m,
            q: self.0.q,
            modulus: self.0.modulus.clone(),
        }
    }

    /// All field elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.0.q
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.0.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let p = self.0.p;
        if self.0.m == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.0.m {
            let d = (a % p + b % p) % p;
            out += d * place;
            place *= p;
            a /= p;
            b /= p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        let p = self.0.p;
        if self.0.m == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        let mut a = a;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.0.m {
            let d = a % p;
            out += ((p - d) % p) * place;
            place *= p;
            a /= p;
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.0.m == 1 {
            return ((a as u128 * b as u128) % self.0.p as u128) as u64;
        }
        if let Some(t) = &self.0.tables {
            let l = (t.log[a as usize] + t.log[b as usize]) % (self.0.q - 1);
            return t.exp[l as usize];
        }
        let pa = decode(self.0.p, self.0.m, a);
        let pb = decode(self.0.p, self.0.m, b);
        let prod = poly_mul(self.0.p, &pa, &pb);
        let r = poly_rem(self.0.p, &prod, &self.0.modulus);
        encode(self.0.p, &r)
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        if let Some(t) = &self.0.tables {
            let l = (self.0.q - 1 - t.log[a as usize]) % (self.0.q - 1);
            return Some(t.exp[l as usize]);
        }
        Some(self.pow(a, self.0.q - 2))
    }

    /// `x -> x^p`.
    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.0.p)
    }
}

fn check_order(p: u64, m: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if m < 1 {
        return Err(Error::invalid("extension degree must be at least 1"));
    }
    let q = (p as u128).checked_pow(m);
    match q {
        Some(q) if q <= u32::MAX as u128 => Ok(()),
        _ => Err(Error::Unsupported(format!("field order {p}^{m} is too large"))),
    }
}

fn decode(p: u64, m: u32, mut a: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        out.push(a % p);
        a /= p;
    }
    out
}

fn encode(p: u64, coeffs: &[u64]) -> u64 {
    coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(p: u64, a: &[u64], m: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (k, &c) in m.iter().enumerate() {
            let sub = (lead * c) % p;
            r[shift + k] = (r[shift + k] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=m/2`.
fn is_irreducible(p: u64, f: &[u64]) -> bool {
    let m = f.len() - 1;
    for k in 1..=m / 2 {
        let count = p.pow(k as u32);
        for low in 0..count {
            let mut g = decode(p, k as u32, low);
            g.push(1);
            if poly_rem(p, f, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u64, m: usize) -> Vec<u64> {
    if m == 1 {
        return vec![0, 1];
    }
    // Encoding order of the lower coefficients compares c_{m-1} first.
    for low in 0..p.pow(m as u32) {
        let mut f = decode(p, m as u32, low);
        f.push(1);
        if is_irreducible(p, &f) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn build_tables(f: &FieldInner) -> Tables {
    let q = f.q;
    let slow_mul = |a: u64, b: u64| -> u64 {
        let prod = poly_mul(f.p, &decode(f.p, f.m, a), &decode(f.p, f.m, b));
        encode(f.p, &poly_rem(f.p, &prod, &f.modulus))
    };
    for g in 2..q {
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut x = 1u64;
        let mut primitive = true;
        for k in 0..q - 1 {
            if k > 0 && x == 1 {
                primitive = false;
                break;
            }
            exp.push(x);
            x = slow_mul(x, g);
        }
        if primitive && x == 1 {
            let mut log = vec![0u64; q as usize];
            for (k, &v) in exp.iter().enumerate() {
                log[v as usize] = k as u64;
            }
            return Tables { exp, log };
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f2 = FiniteField::new(2, 1).unwrap();
        assert_eq!(f2.add(1, 1), 0);
        let f5 = FiniteField::new(5, 1).unwrap();
        assert_eq!(f5.mul(2, 3), 1);
        assert_eq!(f5.inv(2), Some(3));
    }

    #[test]
    fn f4_modulus_and_product() {
        let f4 = FiniteField::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        // x = 2, x + 1 = 3 in the encoding
        assert_eq!(f4.mul(2, 3), 1);
    }

    #[test]
    fn f8_uses_smallest_modulus() {
        let f8 = FiniteField::new(2, 3).unwrap();
        assert_eq!(f8.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FiniteField::new(4, 1).is_err());
        assert!(FiniteField::new(5, 0).is_err());
        assert!(FiniteField::with_modulus(2, vec![1, 0, 1]).is_err());
        assert!(FiniteField::with_modulus(2, vec![1, 1, 1]).is_ok());
    }

    #[test]
    fn exhaustive_field_axioms_small_orders() {
        for (p, m) in [(2, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2), (7, 2), (2, 6), (3, 3)] {
            let f = FiniteField::new(p, m).unwrap();
            let q = f.order();
            assert!(q <= 64);
            for a in 0..q {
                if a != 0 {
                    let inv = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, inv), 1, "inverse in F_{q} of {a}");
                }
                for b in 0..q {
                    assert_eq!(
                        f.frobenius(f.add(a, b)),
                        f.add(f.frobenius(a), f.frobenius(b)),
                        "frobenius additivity in F_{q}"
                    );
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
        }
    }

    #[test]
    fn table_and_polynomial_multiplication_agree() {
        let f = FiniteField::new(3, 3).unwrap();
        for a in 0..27 {
            for b in 0..27 {
                let prod = poly_mul(3, &decode(3, 3, a), &decode(3, 3, b));
                let slow = encode(3, &poly_rem(3, &prod, f.modulus()));
                assert_eq!(f.mul(a, b), slow);
            }
        }
    }
}
