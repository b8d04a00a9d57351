//! Dense matrices over a [`Field`] and exact elimination.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::field::{Field, Scalar};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Mat {
        Mat { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Mat { field, rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(field: Field, rows: &[&[i64]]) -> Mat {
        Mat::from_rows(field, rows.iter().map(|r| r.iter().map(|&x| field.int(x)).collect()).collect())
    }

    /// Companion matrix of a monic polynomial: ones on the subdiagonal, last column −c₀…−c_{n−1}.
    pub fn companion(p: &Poly) -> Mat {
        let n = p.degree().expect("companion of zero polynomial");
        let p = p.monic();
        let field = p.field();
        let mut m = Mat::zeros(field, n, n);
        for i in 1..n {
            m.set(i, i - 1, field.one());
        }
        for i in 0..n {
            m.set(i, n - 1, -p.coeff(i));
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set_block(&mut self, i0: usize, j0: usize, b: &Mat) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(i0 + i, j0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, i0: usize, j0: usize, rows: usize, cols: usize) -> Mat {
        let mut m = Mat::zeros(self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.get(i0 + i, j0 + j).clone());
            }
        }
        m
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.field, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut m = Mat::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let t = a * b;
                        m.data[i * other.cols + j] += &t;
                    }
                }
            }
        }
        m
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat { field: self.field, rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    /// Kronecker product, rows indexed by (i, k) ↦ i·rows(other) + k.
    pub fn kron(&self, other: &Mat) -> Mat {
        let mut m = Mat::zeros(self.field, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        m
    }

    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let mut m = Mat::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut m = Mat::zeros(self.field, self.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, other);
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| {
                let v = self.get(i, j);
                if i == j { v.is_one() } else { v.is_zero() }
            }))
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(self.field, self.cols, (0..self.rows).map(|i| self.row(i).to_vec()).collect())
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().unwrap();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    /// Basis of the right kernel {x : A x = 0}, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Mat::zeros(self.field, n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Mat::identity(self.field, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return self.field.zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            let inv = piv.inv().unwrap();
            for i in c + 1..m.rows {
                let f = m.get(i, c) * &inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array(self.row(i).iter().map(Scalar::to_json).collect()))
                .collect(),
        )
    }

    /// Parses an array of rows with the expected shape (an empty array for zero rows).
    pub fn from_json(field: Field, v: &Value, rows: usize, cols: usize) -> crate::error::Result<Mat> {
        use crate::error::Error;
        let arr = v.as_array().ok_or_else(|| Error::invalid("matrix must be an array of rows"))?;
        if arr.len() != rows {
            return Err(Error::invalid(format!("expected {rows} rows, got {}", arr.len())));
        }
        let mut m = Mat::zeros(field, rows, cols);
        for (i, row) in arr.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| Error::invalid("matrix row must be an array"))?;
            if row.len() != cols {
                return Err(Error::invalid(format!("expected {cols} columns, got {}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, field.parse_json_scalar(x)?);
            }
        }
        Ok(m)
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|c| match c {
                        Scalar::Fp { v, .. } => v.to_string(),
                        q => q.to_string(),
                    })
                    .collect()
            })
            .collect();
        let w = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in &cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>w$}")).collect();
            writeln!(f, "[ {} ]", line.join(" "))?;
        }
        Ok(())
    }
}

/// A linear system assembled row by row from sparse equations.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    field: Field,
    cols: usize,
    rows: Vec<Vec<(usize, Scalar)>>,
}

impl SparseSystem {
    pub fn new(field: Field, cols: usize) -> SparseSystem {
        SparseSystem { field, cols, rows: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn push(&mut self, mut row: Vec<(usize, Scalar)>) {
        row.retain(|(_, v)| !v.is_zero());
        if row.is_empty() {
            return;
        }
        row.sort_by_key(|(c, _)| *c);
        let mut merged: Vec<(usize, Scalar)> = Vec::with_capacity(row.len());
        for (c, v) in row {
            match merged.last_mut() {
                Some((d, w)) if *d == c => *w += &v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|(_, v)| !v.is_zero());
        if !merged.is_empty() {
            self.rows.push(merged);
        }
    }

    fn dense_rows(&self) -> Vec<Vec<Scalar>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![self.field.zero(); self.cols];
                for (c, v) in r {
                    d[*c] = v.clone();
                }
                d
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(self.field, self.cols, self.dense_rows())
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn to_mat(&self) -> Mat {
        if self.rows.is_empty() {
            return Mat::zeros(self.field, 0, self.cols);
        }
        Mat::from_rows(self.field, self.dense_rows())
    }

    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        if self.rows.is_empty() {
            return (0..self.cols)
                .map(|i| {
                    let mut v = vec![self.field.zero(); self.cols];
                    v[i] = self.field.one();
                    v
                })
                .collect();
        }
        self.to_mat().nullspace()
    }
}

fn rank_of_rows(field: Field, cols: usize, rows: Vec<Vec<Scalar>>) -> usize {
    match field {
        Field::Prime(p) => rank_mod_p(p, rows.into_iter().map(|r| r.iter().map(|x| x.residue().unwrap()).collect()).collect(), cols),
        Field::Rational => {
            let ints = rows
                .into_iter()
                .map(|r| {
                    let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.as_rational().unwrap().denom()));
                    r.iter()
                        .map(|x| (x.as_rational().unwrap() * BigRational::from_integer(l.clone())).to_integer())
                        .collect()
                })
                .collect();
            rank_fraction_free(ints, cols)
        }
    }
}

fn rank_mod_p(p: u64, mut a: Vec<Vec<u64>>, cols: usize) -> usize {
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let inv = |x: u64| crate::field::pow_mod(x, p - 2, p);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        let pinv = inv(a[r][c]);
        let pivot_row = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            if row[c] == 0 {
                continue;
            }
            let f = mul(row[c], pinv);
            for j in c..cols {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + p - mul(f, pivot_row[j])) % p;
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Rank by fraction-free (Bareiss) elimination over ℤ.
pub fn rank_fraction_free(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, piv);
        let pivot_row = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &row[c] * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot_row[c].clone();
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gauss_rank(m: &Mat) -> usize {
        m.rref().1.len()
    }

    #[test]
    fn inverse_and_det() {
        let q = Field::Rational;
        let m = Mat::from_ints(q, &[&[2, 1], &[7, 4]]);
        assert_eq!(m.det(), q.int(1));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(Mat::from_ints(q, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn companion_has_char_poly() {
        let f = Field::Prime(7);
        let p = Poly::from_ints(f, &[3, 1, 0, 1]);
        let c = Mat::companion(&p);
        // p(C) = 0
        let mut acc = Mat::zeros(f, 3, 3);
        let mut pw = Mat::identity(f, 3);
        for i in 0..=3 {
            acc = acc.add(&pw.scale(&p.coeff(i)));
            pw = pw.mul(&c);
        }
        assert!(acc.is_zero());
        assert_eq!(Mat::companion(&Poly::linear(&f.int(5))), Mat::from_ints(f, &[&[5]]));
    }

    #[test]
    fn nullspace_is_kernel() {
        let f = Field::Prime(5);
        let m = Mat::from_ints(f, &[&[1, 2, 3, 4], &[2, 4, 2, 3]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let col = Mat::from_rows(f, v.into_iter().map(|x| vec![x]).collect());
            assert!(m.mul(&col).is_zero());
        }
    }

    proptest! {
        #[test]
        fn fraction_free_rank_matches_gauss(entries in proptest::collection::vec(-3i64..=3, 20), zero_rows in 0usize..3) {
            let q = Field::Rational;
            let mut rows: Vec<Vec<Scalar>> = entries.chunks(5).map(|r| r.iter().map(|&x| q.int(x)).collect()).collect();
            for i in 0..zero_rows {
                // force dependencies
                let dep: Vec<Scalar> = rows[i].iter().zip(&rows[i + 1]).map(|(a, b)| a + &(b * &q.int(2))).collect();
                rows.push(dep);
            }
            let m = Mat::from_rows(q, rows);
            prop_assert_eq!(m.rank(), gauss_rank(&m));
        }

        #[test]
        fn modular_rank_matches_gauss(entries in proptest::collection::vec(0i64..7, 24)) {
            let f = Field::Prime(7);
            let m = Mat::from_rows(f, entries.chunks(6).map(|r| r.iter().map(|&x| f.int(x)).collect()).collect());
            prop_assert_eq!(m.rank(), gauss_rank(&m));
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
