use std::fmt;
use std::ops::{Index, IndexMut};

use num_rational::BigRational;
use serde::Serialize;

use super::scalar::{Ring, Scalar};
use crate::error::{Error, Result};

/// Dense row-major matrix over a [`Ring`].
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.ring)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|s| s.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl Matrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        Matrix { ring: ring.clone(), rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    pub fn from_fn(ring: &Ring, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ring: ring.clone(), rows, cols, data }
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::invalid("ragged matrix rows"));
            }
            data.extend(row);
        }
        Ok(Matrix { ring: ring.clone(), rows: r, cols, data })
    }

    pub fn from_i64(ring: &Ring, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(ring, rows.len(), cols, |i, j| ring.from_i64(rows[i][j]))
    }

    pub fn diagonal(ring: &Ring, diag: Vec<Scalar>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(ring, n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| self.ring.is_zero(s))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let s = &self[(i, j)];
                    if i == j {
                        self.ring.is_one(s)
                    } else {
                        self.ring.is_zero(s)
                    }
                })
            })
    }

    fn check_same_shape(&self, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shape mismatch");
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.ring.add(a, b)).collect();
        Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.ring.sub(a, b)).collect();
        Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data = self.data.iter().map(|a| self.ring.mul(a, c)).collect();
        Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.ring, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        if let Ring::F(k) = &self.ring {
            let a: Vec<u64> = self.data.iter().map(fin).collect();
            let b: Vec<u64> = other.data.iter().map(fin).collect();
            let mut out = vec![0u64; self.rows * other.cols];
            for i in 0..self.rows {
                for l in 0..self.cols {
                    let x = a[i * self.cols + l];
                    if x == 0 {
                        continue;
                    }
                    let brow = &b[l * other.cols..(l + 1) * other.cols];
                    let orow = &mut out[i * other.cols..(i + 1) * other.cols];
                    for (o, &y) in orow.iter_mut().zip(brow) {
                        if y != 0 {
                            *o = k.add(*o, k.mul(x, y));
                        }
                    }
                }
            }
            return Matrix {
                ring: self.ring.clone(),
                rows: self.rows,
                cols: other.cols,
                data: out.into_iter().map(Scalar::Fin).collect(),
            };
        }
        let mut out = Matrix::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let x = &self[(i, l)];
                if self.ring.is_zero(x) {
                    continue;
                }
                for j in 0..other.cols {
                    let y = &other[(l, j)];
                    if self.ring.is_zero(y) {
                        continue;
                    }
                    let t = self.ring.mul(x, y);
                    out[(i, j)] = self.ring.add(&out[(i, j)], &t);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(&self.ring, self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = self.ring.zero();
                for (j, x) in v.iter().enumerate() {
                    if !self.ring.is_zero(x) {
                        acc = self.ring.add(&acc, &self.ring.mul(&self[(i, j)], x));
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduces every entry into `ring` (base change from `Z`/`Q`).
    pub fn change_ring(&self, ring: &Ring) -> Result<Matrix> {
        if &self.ring == ring {
            return Ok(self.clone());
        }
        let data = self.data.iter().map(|s| ring.reduce(s)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { ring: ring.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// Ring used for elimination: `Q` in place of `Z`.
    fn elimination_ring(&self) -> Ring {
        match &self.ring {
            Ring::Z => Ring::Q,
            r => r.clone(),
        }
    }

    /// Reduced row echelon form and pivot columns. Matrices over `Z` are
    /// eliminated over `Q`.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let ring = self.elimination_ring();
        let mut m = Matrix { ring: ring.clone(), rows: self.rows, cols: self.cols, data: self.data.clone() };
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !ring.is_zero(&m[(i, c)])) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = ring.inv(&m[(r, c)]).expect("nonzero element of a field");
            for j in c..m.cols {
                m[(r, j)] = ring.mul(&m[(r, j)], &inv);
            }
            for i in 0..m.rows {
                if i == r || ring.is_zero(&m[(i, c)]) {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if ring.is_zero(&m[(r, j)]) {
                        continue;
                    }
                    let t = ring.mul(&f, &m[(r, j)]);
                    m[(i, j)] = ring.sub(&m[(i, j)], &t);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Rank and a kernel basis. Rejected over `Z`; use Smith normal form there.
    pub fn rank_kernel(&self) -> Result<(usize, Vec<Vec<Scalar>>)> {
        if !self.ring.is_field() {
            return Err(Error::invalid("rank_kernel requires a field; use smith_normal_form over Z"));
        }
        let (r, pivots) = self.rref();
        let ring = &self.ring;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let kernel = free
            .iter()
            .map(|&f| {
                let mut v = vec![ring.zero(); self.cols];
                v[f] = ring.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = ring.neg(&r[(row, f)]);
                }
                v
            })
            .collect();
        Ok((pivots.len(), kernel))
    }

    /// Canonical basis of the column space: the nonzero rows of the RREF of
    /// the transpose.
    pub fn column_space(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.transpose().rref();
        (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
    }

    /// Some solution of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let ring = self.elimination_ring();
        let aug = Matrix::from_fn(&ring, self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![ring.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse over the matrix's own ring (over `Z` only unimodular matrices
    /// are invertible).
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let ring = self.elimination_ring();
        let aug = Matrix::from_fn(&ring, n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                ring.one()
            } else {
                ring.zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let inv = Matrix::from_fn(&ring, n, n, |i, j| r[(i, j + n)].clone());
        if self.ring == Ring::Z {
            if inv.data.iter().all(|s| s.as_rational().is_some_and(BigRational::is_integer)) {
                return Some(Matrix { ring: Ring::Z, ..inv });
            }
            return None;
        }
        Some(inv)
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { ring: self.ring.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }
}

fn fin(s: &Scalar) -> u64 {
    match s {
        Scalar::Fin(v) => *v,
        Scalar::Rat(_) => panic!("scalar ring mismatch"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_over_f5_has_full_rank() {
        let f5 = Ring::prime_field(5).unwrap();
        let (rank, kernel) = Matrix::identity(&f5, 4).rank_kernel().unwrap();
        assert_eq!(rank, 4);
        assert!(kernel.is_empty());
    }

    #[test]
    fn all_ones_over_q() {
        let m = Matrix::from_i64(&Ring::Q, &[vec![1, 1], vec![1, 1]]);
        let (rank, kernel) = m.rank_kernel().unwrap();
        assert_eq!(rank, 1);
        assert_eq!(kernel, vec![vec![Scalar::int(-1), Scalar::int(1)]]);
    }

    #[test]
    fn rank_kernel_rejects_integers() {
        let m = Matrix::identity(&Ring::Z, 2);
        assert!(m.rank_kernel().is_err());
    }

    #[test]
    fn inverse_over_z_requires_unimodular() {
        let u = Matrix::from_i64(&Ring::Z, &[vec![2, 1], vec![1, 1]]);
        let inv = u.inverse().unwrap();
        assert!(u.mul(&inv).is_identity());
        let d = Matrix::from_i64(&Ring::Z, &[vec![2, 0], vec![0, 1]]);
        assert!(d.inverse().is_none());
    }

    /// Column space of a 4x6 matrix over F_2 by listing all 2^6 images.
    fn brute_force_rank_f2(m: &Matrix) -> usize {
        let mut images = std::collections::BTreeSet::new();
        for mask in 0u32..64 {
            let v: Vec<Scalar> = (0..6).map(|j| Scalar::Fin(((mask >> j) & 1) as u64)).collect();
            images.insert(m.apply(&v));
        }
        images.len().trailing_zeros() as usize
    }

    proptest! {
        #[test]
        fn random_f2_rank_plus_nullity(bits in proptest::collection::vec(0u64..2, 24)) {
            let f2 = Ring::prime_field(2).unwrap();
            let m = Matrix::from_fn(&f2, 4, 6, |i, j| Scalar::Fin(bits[i * 6 + j]));
            let (rank, kernel) = m.rank_kernel().unwrap();
            prop_assert_eq!(rank + kernel.len(), 6);
            prop_assert_eq!(rank, brute_force_rank_f2(&m));
            for k in &kernel {
                prop_assert!(m.apply(k).iter().all(|s| f2.is_zero(s)));
            }
        }

        #[test]
        fn solve_returns_a_solution(entries in proptest::collection::vec(-3i64..4, 12), x in proptest::collection::vec(-3i64..4, 4)) {
            let q = Ring::Q;
            let m = Matrix::from_fn(&q, 3, 4, |i, j| q.from_i64(entries[i * 4 + j]));
            let xs: Vec<Scalar> = x.iter().map(|&v| q.from_i64(v)).collect();
            let b = m.apply(&xs);
            let sol = m.solve(&b).unwrap();
            prop_assert_eq!(m.apply(&sol), b);
        }
    }
}
