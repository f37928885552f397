//! Dense and sparse complex matrices used for truncated operators.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const DENSE_CAP: usize = 8192;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn fro_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

pub fn hermitian_residual(a: &CMat) -> f64 {
    fro_norm(&(a - a.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors as the matching columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn check_cap(dim: usize) -> Result<()> {
    if dim > DENSE_CAP {
        Err(Error::SizeCap { dim, cap: DENSE_CAP })
    } else {
        Ok(())
    }
}

pub fn eigh(a: &CMat) -> Result<Eigen> {
    check_cap(a.nrows())?;
    let n = a.nrows();
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: CMat::zeros(0, 0) });
    }
    let sym = (a + a.adjoint()) * c(0.5, 0.0);
    let e = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &e.eigenvectors.column(i));
    }
    Ok(Eigen { values, vectors })
}

pub fn eigvalsh(a: &CMat) -> Result<Vec<f64>> {
    Ok(eigh(a)?.values)
}

impl Eigen {
    /// `f(A) = V f(Λ) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let s = f(l);
            scaled.column_mut(j).scale_mut(s);
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

pub fn abs_h(a: &CMat) -> Result<CMat> {
    Ok(eigh(a)?.apply(f64::abs))
}

pub fn sqrt_psd(a: &CMat) -> Result<CMat> {
    Ok(eigh(a)?.apply(|x| x.max(0.0).sqrt()))
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return vec![];
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Operator norm: exact SVD below 256, power iteration on `A*A` above.
pub fn op_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    if a.nrows().max(a.ncols()) <= 256 {
        return singular_values(a)[0];
    }
    let ah = a.adjoint();
    power_norm(a.ncols(), |x| &ah * (a * x))
}

fn power_norm(n: usize, apply_gram: impl Fn(&nalgebra::DVector<C64>) -> nalgebra::DVector<C64>) -> f64 {
    let mut x = nalgebra::DVector::from_fn(n, |i, _| c(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05));
    let mut lambda = 0.0;
    for _ in 0..500 {
        let nx = x.norm();
        if nx == 0.0 {
            return 0.0;
        }
        x /= c(nx, 0.0);
        let y = apply_gram(&x);
        let l = y.norm();
        if (l - lambda).abs() <= 1e-13 * l.max(1e-300) {
            lambda = l;
            break;
        }
        lambda = l;
        x = y;
    }
    lambda.sqrt()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let mut a = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            if i == j {
                a[(i, i)] = c(rng.sample(StandardNormal), 0.0);
            } else {
                let z = c(rng.sample(StandardNormal), rng.sample(StandardNormal)) / 2f64.sqrt();
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
    }
    a
}

pub fn random_matrix<R: Rng>(rng: &mut R, r: usize, cols: usize) -> CMat {
    CMat::from_fn(r, cols, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-ish unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = random_matrix(rng, n, n);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut d = CMat::zeros(n, n);
    for i in 0..n {
        let x = r[(i, i)];
        d[(i, i)] = if x.norm() > 0.0 { x / x.norm() } else { c(1.0, 0.0) };
    }
    q * d
}

/// Numerical rank by singular values relative to the largest.
pub fn rank(a: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(a);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Sparse complex matrix stored by columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SpMat {
    pub nrows: usize,
    pub ncols: usize,
    pub cols: Vec<Vec<(usize, C64)>>,
}

impl SpMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SpMat { nrows, ncols, cols: vec![Vec::new(); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SpMat::zeros(n, n);
        for (j, col) in m.cols.iter_mut().enumerate() {
            col.push((j, c(1.0, 0.0)));
        }
        m
    }

    pub fn from_triplets(nrows: usize, ncols: usize, trip: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut m = SpMat::zeros(nrows, ncols);
        for (i, j, v) in trip {
            m.cols[j].push((i, v));
        }
        m.normalize();
        m
    }

    pub fn from_dense(a: &CMat) -> Self {
        let mut m = SpMat::zeros(a.nrows(), a.ncols());
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                let v = a[(i, j)];
                if v != c(0.0, 0.0) {
                    m.cols[j].push((i, v));
                }
            }
        }
        m
    }

    /// Sorts each column by row and merges duplicates; exact zeros are dropped.
    pub fn normalize(&mut self) {
        for col in self.cols.iter_mut() {
            col.sort_by_key(|&(i, _)| i);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(col.len());
            for &(i, v) in col.iter() {
                match merged.last_mut() {
                    Some((li, lv)) if *li == i => *lv += v,
                    _ => merged.push((i, v)),
                }
            }
            merged.retain(|&(_, v)| v != c(0.0, 0.0));
            *col = merged;
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> CMat {
        let mut a = CMat::zeros(self.nrows, self.ncols);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                a[(i, j)] += v;
            }
        }
        a
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.cols[j].iter().find(|&&(r, _)| r == i).map_or(c(0.0, 0.0), |&(_, v)| v)
    }

    pub fn adjoint(&self) -> SpMat {
        let mut out = SpMat::zeros(self.ncols, self.nrows);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                out.cols[i].push((j, v.conj()));
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> SpMat {
        let mut out = self.clone();
        for col in out.cols.iter_mut() {
            for e in col.iter_mut() {
                e.1 *= s;
            }
        }
        out.normalize();
        out
    }

    pub fn add(&self, other: &SpMat) -> SpMat {
        self.lin_comb(c(1.0, 0.0), other, c(1.0, 0.0))
    }

    pub fn sub(&self, other: &SpMat) -> SpMat {
        self.lin_comb(c(1.0, 0.0), other, c(-1.0, 0.0))
    }

    pub fn lin_comb(&self, a: C64, other: &SpMat, b: C64) -> SpMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols), "shape mismatch");
        let mut out = SpMat::zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            let col = &mut out.cols[j];
            col.extend(self.cols[j].iter().map(|&(i, v)| (i, a * v)));
            col.extend(other.cols[j].iter().map(|&(i, v)| (i, b * v)));
        }
        out.normalize();
        out
    }

    pub fn matmul(&self, other: &SpMat) -> SpMat {
        assert_eq!(self.ncols, other.nrows, "shape mismatch");
        let mut out = SpMat::zeros(self.nrows, other.ncols);
        let mut acc = vec![c(0.0, 0.0); self.nrows];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; self.nrows];
        for j in 0..other.ncols {
            for &(k, bv) in &other.cols[j] {
                for &(i, av) in &self.cols[k] {
                    if !mark[i] {
                        mark[i] = true;
                        touched.push(i);
                    }
                    acc[i] += av * bv;
                }
            }
            touched.sort_unstable();
            for &i in &touched {
                if acc[i] != c(0.0, 0.0) {
                    out.cols[j].push((i, acc[i]));
                }
                acc[i] = c(0.0, 0.0);
                mark[i] = false;
            }
            touched.clear();
        }
        out
    }

    pub fn kron(&self, other: &SpMat) -> SpMat {
        let (p, q) = (other.nrows, other.ncols);
        let mut out = SpMat::zeros(self.nrows * p, self.ncols * q);
        for (j1, col1) in self.cols.iter().enumerate() {
            for (j2, col2) in other.cols.iter().enumerate() {
                let col = &mut out.cols[j1 * q + j2];
                for &(i1, v1) in col1 {
                    for &(i2, v2) in col2 {
                        col.push((i1 * p + i2, v1 * v2));
                    }
                }
                col.sort_by_key(|&(i, _)| i);
            }
        }
        out
    }

    /// Block matrix from a grid of optional blocks with uniform block sizes.
    pub fn blocks(rows: &[usize], cols: &[usize], entries: &[(usize, usize, &SpMat)]) -> SpMat {
        let roff: Vec<usize> = rows.iter().scan(0, |s, &r| { let o = *s; *s += r; Some(o) }).collect();
        let coff: Vec<usize> = cols.iter().scan(0, |s, &r| { let o = *s; *s += r; Some(o) }).collect();
        let mut out = SpMat::zeros(rows.iter().sum(), cols.iter().sum());
        for &(bi, bj, m) in entries {
            assert_eq!((m.nrows, m.ncols), (rows[bi], cols[bj]), "block shape mismatch");
            for (j, col) in m.cols.iter().enumerate() {
                out.cols[coff[bj] + j].extend(col.iter().map(|&(i, v)| (roff[bi] + i, v)));
            }
        }
        out.normalize();
        out
    }

    pub fn block_diag(parts: &[&SpMat]) -> SpMat {
        let rows: Vec<usize> = parts.iter().map(|m| m.nrows).collect();
        let cols: Vec<usize> = parts.iter().map(|m| m.ncols).collect();
        let entries: Vec<(usize, usize, &SpMat)> = parts.iter().enumerate().map(|(i, m)| (i, i, *m)).collect();
        SpMat::blocks(&rows, &cols, &entries)
    }

    pub fn fro_norm(&self) -> f64 {
        self.cols.iter().flatten().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.cols.iter().flatten().map(|(_, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &SpMat) -> f64 {
        self.sub(other).max_abs()
    }

    /// Keeps only the listed columns (others zeroed).
    pub fn mask_cols(&self, keep: &[bool]) -> SpMat {
        let mut out = self.clone();
        for (j, col) in out.cols.iter_mut().enumerate() {
            if !keep[j] {
                col.clear();
            }
        }
        out
    }

    pub fn mask_rows(&self, keep: &[bool]) -> SpMat {
        let mut out = self.clone();
        for col in out.cols.iter_mut() {
            col.retain(|&(i, _)| keep[i]);
        }
        out
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> SpMat {
        let mut out = SpMat::zeros(rows.len(), cols.len());
        for (jj, j) in cols.enumerate() {
            out.cols[jj] = self.cols[j]
                .iter()
                .filter(|(i, _)| rows.contains(i))
                .map(|&(i, v)| (i - rows.start, v))
                .collect();
        }
        out
    }

    pub fn op_norm(&self) -> f64 {
        if self.nnz() == 0 {
            return 0.0;
        }
        if self.nrows.max(self.ncols) <= 256 {
            return op_norm(&self.to_dense());
        }
        let ah = self.adjoint();
        power_norm(self.ncols, |x| ah.matvec(&self.matvec(x)))
    }

    pub fn matvec(&self, x: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
        let mut y = nalgebra::DVector::zeros(self.nrows);
        for (j, col) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj != c(0.0, 0.0) {
                for &(i, v) in col {
                    y[i] += v * xj;
                }
            }
        }
        y
    }

    pub fn hermitian_residual(&self) -> f64 {
        self.sub(&self.adjoint()).fro_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigen_and_abs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_hermitian(&mut rng, 6);
        let e = eigh(&a).unwrap();
        let back = e.apply(|x| x);
        assert!(fro_norm(&(back - &a)) < 1e-12);
        let b = abs_h(&a).unwrap();
        assert!(fro_norm(&(&b * &b - &a * &a)) < 1e-11);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sparse_ops_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 5, 4);
        let b = random_matrix(&mut rng, 4, 3);
        let sa = SpMat::from_dense(&a);
        let sb = SpMat::from_dense(&b);
        assert!(fro_norm(&(sa.matmul(&sb).to_dense() - &a * &b)) < 1e-12);
        assert!(fro_norm(&(sa.kron(&sb).to_dense() - kron(&a, &b))) < 1e-12);
        assert!(fro_norm(&(sa.adjoint().to_dense() - a.adjoint())) < 1e-15);
        assert!((sa.op_norm() - op_norm(&a)).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_agrees_with_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(&mut rng, 300);
        let top = eigvalsh(&a).unwrap().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((op_norm(&a) - top).abs() < 1e-8 * top);
    }
}
