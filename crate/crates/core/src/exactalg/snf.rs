//! Integer normal forms: Smith normal form for homology over `Z`, and a row
//! Hermite reduction used to pick bases of lattices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmithForm {
    /// Nonzero invariant factors `d_1 | d_2 | ... | d_r`, all positive.
    pub divisors: Vec<BigInt>,
    pub rank: usize,
}

/// Extracts the integer entries of a matrix over `Z` (or an integral matrix over `Q`).
pub fn integer_rows(m: &Matrix) -> Result<Vec<Vec<BigInt>>> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|s| s.as_integer().ok_or_else(|| Error::invalid("smith_normal_form needs an integer matrix")))
                .collect()
        })
        .collect()
}

pub fn smith_normal_form(m: &Matrix) -> Result<SmithForm> {
    let a = integer_rows(m)?;
    Ok(smith_of_rows(a, m.cols()))
}

/// Smith normal form of a dense integer matrix given by rows.
pub fn smith_of_rows(mut a: Vec<Vec<BigInt>>, cols: usize) -> SmithForm {
    let rows = a.len();
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let v = &q * &row[t];
                    row[j] -= v;
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // Move the smallest remaining entry of row/column t into the pivot.
                let mut best = (t, t);
                for i in t..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            // Divisibility: fold any offending row into row t and repeat.
            let offending = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match offending {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        divisors.push(a[t][t].abs());
        t += 1;
    }
    let rank = divisors.len();
    SmithForm { divisors, rank }
}

/// Row Hermite basis of the `Z`-span of integer row vectors. Zero rows are
/// dropped; leading entries are positive and entries above each pivot are
/// reduced into `[0, pivot)`.
pub fn hermite_basis(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut r = 0;
    for c in 0..cols {
        if r >= a.len() {
            break;
        }
        loop {
            let nz: Vec<usize> = (r..a.len()).filter(|&i| !a[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).unwrap();
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                for j in c..cols {
                    let v = &q * &a[r][j];
                    a[i][j] -= v;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if (r..a.len()).all(|i| a[i][c].is_zero()) {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                for j in c..cols {
                    let v = &q * &a[r][j];
                    a[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.retain(|row| row.iter().any(|x| !x.is_zero()));
    a
}

/// Basis of the `Z`-span of rational row vectors, in Hermite form.
pub fn lattice_basis(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut den = BigInt::one();
    for row in rows {
        for x in row {
            den = den.lcm(x.denom());
        }
    }
    let ints: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| row.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect())
        .collect();
    hermite_basis(&ints, cols)
        .into_iter()
        .map(|row| row.into_iter().map(|x| BigRational::new(x, den.clone())).collect())
        .collect()
}

/// Integer coordinates of `v` in the lattice basis `basis`, if `v` lies in
/// the lattice.
pub fn lattice_coordinates(basis: &[Vec<BigRational>], v: &[BigRational]) -> Option<Vec<BigInt>> {
    if basis.is_empty() {
        return v.iter().all(Zero::is_zero).then(Vec::new);
    }
    let cols = v.len();
    let ring = super::scalar::Ring::Q;
    // Solve basis^T * x = v.
    let m = Matrix::from_fn(&ring, cols, basis.len(), |i, j| Scalar::Rat(basis[j][i].clone()));
    let b: Vec<Scalar> = v.iter().map(|x| Scalar::Rat(x.clone())).collect();
    let x = m.solve(&b)?;
    x.into_iter()
        .map(|s| match s {
            Scalar::Rat(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::Ring;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Determinantal divisors: gcd of all k x k minors, by cofactor expansion.
    fn det(m: &[Vec<BigInt>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<BigInt>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
            let term = &m[0][j] * det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    fn determinantal_oracle(a: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
        let rows = a.len();
        let mut out = Vec::new();
        let mut prev = BigInt::one();
        for k in 1..=rows.min(cols) {
            let mut g = BigInt::zero();
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    let minor: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j].clone()).collect()).collect();
                    g = g.gcd(&det(&minor));
                }
            }
            if g.is_zero() {
                break;
            }
            out.push(&g / &prev);
            prev = g;
        }
        out
    }

    #[test]
    fn diag_2_3() {
        let m = Matrix::from_i64(&Ring::Z, &[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.divisors, ints(&[1, 6]));
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn zero_and_identity() {
        let z = Matrix::zeros(&Ring::Z, 3, 2);
        assert_eq!(smith_normal_form(&z).unwrap(), SmithForm { divisors: vec![], rank: 0 });
        let i = Matrix::identity(&Ring::Z, 3);
        assert_eq!(smith_normal_form(&i).unwrap().divisors, ints(&[1, 1, 1]));
        let e = Matrix::zeros(&Ring::Z, 0, 0);
        assert_eq!(smith_normal_form(&e).unwrap().rank, 0);
    }

    #[test]
    fn hermite_basis_of_dependent_rows() {
        let rows = vec![ints(&[2, 4]), ints(&[3, 6]), ints(&[0, 0])];
        assert_eq!(hermite_basis(&rows, 2), vec![ints(&[1, 2])]);
    }

    #[test]
    fn lattice_coordinates_detect_membership() {
        let half = BigRational::new(1.into(), 2.into());
        let basis = lattice_basis(&[vec![half.clone(), BigRational::zero()]], 2);
        let one = BigRational::one();
        assert_eq!(lattice_coordinates(&basis, &[one.clone(), BigRational::zero()]), Some(ints(&[2])));
        assert_eq!(lattice_coordinates(&basis, &[BigRational::new(1.into(), 4.into()), BigRational::zero()]), None);
    }

    proptest! {
        #[test]
        fn smith_matches_determinantal_divisors(entries in proptest::collection::vec(-6i64..7, 12)) {
            let a: Vec<Vec<BigInt>> = (0..3).map(|i| ints(&entries[i * 4..i * 4 + 4])).collect();
            let s = smith_of_rows(a.clone(), 4);
            prop_assert_eq!(&s.divisors, &determinantal_oracle(&a, 4));
            for w in s.divisors.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }

        #[test]
        fn smith_invariant_under_unimodular_ops(
            entries in proptest::collection::vec(-5i64..6, 9),
            ops in proptest::collection::vec((0usize..3, 0usize..3, -3i64..4, proptest::bool::ANY), 0..8),
        ) {
            let a: Vec<Vec<BigInt>> = (0..3).map(|i| ints(&entries[i * 3..i * 3 + 3])).collect();
            let mut b = a.clone();
            for (i, j, c, on_rows) in ops {
                if i == j { continue; }
                let c = BigInt::from(c);
                if on_rows {
                    for k in 0..3 { let v = &c * &b[j][k]; b[i][k] += v; }
                } else {
                    for row in b.iter_mut() { let v = &c * &row[j]; row[i] += v; }
                }
            }
            prop_assert_eq!(smith_of_rows(a, 3), smith_of_rows(b, 3));
        }
    }
}
