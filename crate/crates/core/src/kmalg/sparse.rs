//! Column-sparse linear operators with exact coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;

use crate::exactalg::{Matrix, Ring};

/// A square operator stored column by column as `(row, coefficient)` lists
/// sorted by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseOp<T> {
    dim: usize,
    cols: Vec<Vec<(usize, T)>>,
}

pub type SparseVec<T> = Vec<(usize, T)>;

fn normalise<T: Num + Clone>(map: BTreeMap<usize, T>) -> SparseVec<T> {
    map.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// `a + c * b` for sparse vectors.
pub fn axpy<T: Num + Clone>(a: &SparseVec<T>, c: &T, b: &SparseVec<T>) -> SparseVec<T> {
    let mut m: BTreeMap<usize, T> = a.iter().cloned().collect();
    for (i, x) in b {
        let e = m.entry(*i).or_insert_with(T::zero);
        *e = e.clone() + c.clone() * x.clone();
    }
    normalise(m)
}

impl<T: Num + Clone> SparseOp<T> {
    pub fn zero(dim: usize) -> Self {
        SparseOp { dim, cols: vec![Vec::new(); dim] }
    }

    pub fn from_columns(dim: usize, cols: Vec<SparseVec<T>>) -> Self {
        assert_eq!(cols.len(), dim);
        let cols = cols.into_iter().map(|c| normalise(c.into_iter().fold(BTreeMap::new(), |mut m, (i, x)| {
            let e = m.entry(i).or_insert_with(T::zero);
            *e = e.clone() + x;
            m
        }))).collect();
        SparseOp { dim, cols }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> &SparseVec<T> {
        &self.cols[j]
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn apply(&self, v: &SparseVec<T>) -> SparseVec<T> {
        let mut acc = Vec::new();
        for (j, x) in v {
            acc = axpy(&acc, x, &self.cols[*j]);
        }
        acc
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        SparseOp { dim: self.dim, cols: other.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn add_scaled(&self, c: &T, other: &Self) -> Self {
        SparseOp { dim: self.dim, cols: self.cols.iter().zip(&other.cols).map(|(a, b)| axpy(a, c, b)).collect() }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).add_scaled(&(T::zero() - T::one()), &other.mul(self))
    }

    pub fn scale(&self, c: &T) -> Self {
        self.zero_like().add_scaled(c, self)
    }

    fn zero_like(&self) -> Self {
        Self::zero(self.dim)
    }

    pub fn map<U: Num + Clone>(&self, mut f: impl FnMut(&T) -> U) -> SparseOp<U> {
        SparseOp {
            dim: self.dim,
            cols: self
                .cols
                .iter()
                .map(|c| c.iter().map(|(i, x)| (*i, f(x))).filter(|(_, x)| !x.is_zero()).collect())
                .collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(i, x)| (*i, j, x)))
    }
}

impl SparseOp<BigInt> {
    pub fn to_matrix(&self, ring: &Ring) -> Matrix {
        let mut m = Matrix::zeros(ring, self.dim, self.dim);
        for (i, j, x) in self.entries() {
            m[(i, j)] = ring.from_bigint(x);
        }
        m
    }
}

impl SparseOp<BigRational> {
    /// The operator with integer entries, or the first offending entry.
    pub fn to_integer(&self) -> Result<SparseOp<BigInt>, (usize, usize, BigRational)> {
        for (i, j, x) in self.entries() {
            if !x.is_integer() {
                return Err((i, j, x.clone()));
            }
        }
        Ok(self.map(|x| x.to_integer()))
    }
}
