//! Dense complex matrices for symbol evaluation and small direct solves.
//!
//! Sizes here are the block size `d` of a symbol (or a few hundred for dense
//! oracles), so everything is row-major `Vec<Complex64>` with O(n^3) kernels.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Index, IndexMut};

pub type C64 = Complex64;

const JACOBI_MAX_SWEEPS: usize = 100;
const SINGULAR_PIVOT_REL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CMat { rows, cols, data })
    }

    /// Real matrix from rows; panics on ragged input (test and literal use).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        CMat::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(CMat::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = CMat::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> CMat {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &CMat) -> Result<CMat> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMat) -> Result<CMat> {
        self.zip(other, |a, b| a - b)
    }

    /// `self += s * other`, shapes must agree.
    pub fn axpy(&mut self, s: C64, other: &CMat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    fn zip(&self, other: &CMat, f: impl Fn(C64, C64) -> C64) -> Result<CMat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn matmul(&self, other: &CMat) -> Result<CMat> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let (r2, c2) = (other.rows, other.cols);
        CMat::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Spectral norm via singular values.
    pub fn norm2(&self) -> f64 {
        singular_values(self).first().copied().unwrap_or(0.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.norm_max().max(1.0);
        (0..self.rows)
            .all(|i| (0..=i).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol * scale))
    }

    /// `(M + M^H) / 2`.
    pub fn hermitian_part(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn inverse(&self) -> Result<CMat> {
        solve(self, &CMat::identity(self.rows))
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition `M = V diag(values) V^H` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

/// 2x2 unitary `[[c, s], [-s*conj(ph), c*conj(ph)]]` zeroing the (p,q) entry
/// of a Hermitian pair with diagonal `app`, `aqq` and off-diagonal `apq`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [C64; 4] {
    let abs = apq.norm();
    let ph = apq / abs;
    let theta = (aqq - app) / (2.0 * abs);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let cph = ph.conj();
    [C64::new(c, 0.0), C64::new(s, 0.0), -cph * s, cph * c]
}

/// Cyclic complex Jacobi. The input is symmetrized first.
pub fn eig_hermitian(m: &CMat) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eig of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = CMat::identity(n);
    let total = a.norm_fro();
    let target = f64::EPSILON * total;
    let mut converged = n <= 1 || total == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                what: "Jacobi eigensolver".into(),
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let [upp, upq, uqp, uqq] = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * upp + akq * uqp;
                    a[(k, q)] = akp * upq + akq * uqq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        converged = off <= target;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Singular values in descending order by one-sided Jacobi, which keeps
/// small singular values accurate to `eps * ||M||` (no squaring).
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let a0 = if m.rows >= m.cols {
        m.clone()
    } else {
        m.adjoint()
    };
    let (rows, cols) = (a0.rows, a0.cols);
    let mut colv: Vec<Vec<C64>> = (0..cols).map(|j| a0.column(j)).collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols.saturating_sub(1) {
            for j in i + 1..cols {
                let alpha: f64 = colv[i].iter().map(|v| v.norm_sqr()).sum();
                let beta: f64 = colv[j].iter().map(|v| v.norm_sqr()).sum();
                let gamma = dot(&colv[i], &colv[j]);
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt()
                    || gamma.norm() <= f64::MIN_POSITIVE
                {
                    continue;
                }
                rotated = true;
                let [upp, upq, uqp, uqq] = jacobi_rotation(alpha, beta, gamma);
                for k in 0..rows {
                    let (x, y) = (colv[i][k], colv[j][k]);
                    colv[i][k] = x * upp + y * uqp;
                    colv[j][k] = x * upq + y * uqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = colv.iter().map(|c| vec_norm(c)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(m: &CMat) -> Result<Lu> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "LU of a {}x{} matrix",
                m.rows, m.cols
            )));
        }
        let n = m.rows;
        let threshold = SINGULAR_PIVOT_REL * m.norm_inf();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= threshold || pmax == 0.0 {
                return Err(Error::Singular { pivot: k });
            }
            if piv != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let inv = C64::new(1.0, 0.0) / lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] * inv;
                lu[(i, k)] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= l * u;
                }
            }
        }
        Ok(Lu { lu, perm, sign })
    }

    pub fn size(&self) -> usize {
        self.lu.rows
    }

    pub fn solve_vec(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.size();
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "rhs of length {} for size {n}",
                b.len()
            )));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: C64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: C64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    pub fn solve_mat(&self, b: &CMat) -> Result<CMat> {
        if b.rows != self.size() {
            return Err(Error::Dimension(format!(
                "rhs with {} rows for size {}",
                b.rows,
                self.size()
            )));
        }
        let mut out = CMat::zeros(b.rows, b.cols);
        for j in 0..b.cols {
            let x = self.solve_vec(&b.column(j))?;
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    pub fn det(&self) -> C64 {
        (0..self.size()).map(|i| self.lu[(i, i)]).product::<C64>() * self.sign
    }
}

/// Solves `M X = B`.
pub fn solve(m: &CMat, b: &CMat) -> Result<CMat> {
    Lu::factor(m)?.solve_mat(b)
}

/// Determinant; zero when the LU factorization reports a singular pivot.
pub fn det(m: &CMat) -> Result<C64> {
    match Lu::factor(m) {
        Ok(lu) => Ok(lu.det()),
        Err(Error::Singular { .. }) => Ok(C64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        a.sub(b).unwrap().norm_max() <= tol
    }

    #[test]
    fn eig_of_small_symmetric() {
        let e = eig_hermitian(&CMat::from_real_rows(&[&[12.0, 2.0], &[2.0, 12.0]])).unwrap();
        assert!((e.values[0] - 10.0).abs() < 1e-12 && (e.values[1] - 14.0).abs() < 1e-12);
        let e = eig_hermitian(
            &CMat::from_real_rows(&[&[16.0, -16.0], &[-16.0, 16.0]]).scale_real(1.0 / 3.0),
        )
        .unwrap();
        assert!(e.values[0].abs() < 1e-12);
        assert!((e.values[1] - 32.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_rectangular() {
        assert!(matches!(
            eig_hermitian(&CMat::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn solve_small_system() {
        let m = CMat::from_real_rows(&[&[12.0, 4.0], &[4.0, 12.0]]);
        let x = solve(&m, &CMat::identity(2)).unwrap();
        let want = CMat::from_real_rows(&[&[12.0, -4.0], &[-4.0, 12.0]]).scale_real(1.0 / 128.0);
        assert!(close(&x, &want, 1e-15));
    }

    #[test]
    fn solve_reports_singular_pivot() {
        let m = CMat::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(
            solve(&m, &CMat::identity(2)).unwrap_err(),
            Error::Singular { pivot: 1 }
        );
    }

    #[test]
    fn determinants() {
        let m = CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!((det(&m).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(det(&CMat::zeros(3, 3)).unwrap(), c(0.0, 0.0));
        let m = CMat::from_rows(&[
            vec![c(0.0, 1.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        assert!((det(&m).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_values_are_accurate_when_tiny() {
        let m = CMat::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-12]]);
        let s = singular_values(&m);
        assert!((s[0] - 2.0).abs() < 1e-12);
        assert!((s[1] - 5e-13).abs() < 1e-15);
        let r = CMat::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 4.0, 0.0]]);
        assert_eq!(singular_values(&r).len(), 2);
        assert!((r.norm2() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn kron_layout() {
        let a = CMat::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let k = a.kron(&b);
        assert_eq!(k[(0, 1)], c(1.0, 0.0));
        assert_eq!(k[(3, 2)], c(4.0, 0.0));
        assert_eq!(k[(2, 1)], c(3.0, 0.0));
    }

    fn arb_complex_matrix(n: usize) -> impl Strategy<Value = CMat> {
        proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), n * n).prop_map(move |v| {
            CMat::from_vec(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn eig_reconstructs(n in 1usize..7, seed in any::<u64>()) {
            let m = {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let g = CMat::from_fn(n, n, |_, _| c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)));
                g.hermitian_part()
            };
            let e = eig_hermitian(&m).unwrap();
            let d = CMat::diag(&e.values.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
            let rec = e.vectors.matmul(&d).unwrap().matmul(&e.vectors.adjoint()).unwrap();
            prop_assert!(close(&rec, &m, 1e-9));
            let gram = e.vectors.adjoint().matmul(&e.vectors).unwrap();
            prop_assert!(close(&gram, &CMat::identity(n), 1e-10));
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn solve_round_trips(m in arb_complex_matrix(4), b in arb_complex_matrix(4)) {
            let shifted = m.add(&CMat::identity(4).scale_real(25.0)).unwrap();
            let x = solve(&shifted, &b).unwrap();
            let back = shifted.matmul(&x).unwrap();
            let tol = 1e-12 * shifted.norm_inf() * x.norm_max().max(1.0);
            prop_assert!(close(&back, &b, tol));
        }

        #[test]
        fn singular_values_match_eigs_of_gram(m in arb_complex_matrix(3)) {
            let s = singular_values(&m);
            let e = eig_hermitian(&m.adjoint().matmul(&m).unwrap()).unwrap();
            for (k, sv) in s.iter().enumerate() {
                let ev = e.values[2 - k].max(0.0).sqrt();
                prop_assert!((sv - ev).abs() <= 1e-7 * (1.0 + ev));
            }
        }
    }
}
