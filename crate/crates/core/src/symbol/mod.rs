//! Matrix-valued trigonometric polynomials
//! `f(θ) = Σ_j f̂_j e^{i j·θ}` with `d×d` coefficients and `m` variables.

mod io;
mod zero;

pub use io::{parse_symbol, read_symbol_file, write_symbol, write_symbol_file};
pub use zero::{find_zero, zero_order_along, SymbolZero, ZERO_GRID_1D};

use crate::error::{Error, Result};
use crate::smallmat::{dot, eig_hermitian, CMat, C64};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Coefficients below this fraction of the largest Frobenius norm are dropped.
const PRUNE_REL: f64 = 1e-14;
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTrigPolynomial {
    d: usize,
    m: usize,
    coeffs: BTreeMap<Vec<i32>, CMat>,
    hermitian: bool,
}

impl MatrixTrigPolynomial {
    pub fn from_coeffs(
        d: usize,
        m: usize,
        coeffs: impl IntoIterator<Item = (Vec<i32>, CMat)>,
    ) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(Error::Argument("symbol needs d >= 1 and m >= 1".into()));
        }
        let mut map: BTreeMap<Vec<i32>, CMat> = BTreeMap::new();
        for (j, c) in coeffs {
            if j.len() != m {
                return Err(Error::Dimension(format!("multi-index {j:?} for m = {m}")));
            }
            if c.rows() != d || c.cols() != d {
                return Err(Error::Dimension(format!(
                    "{}x{} coefficient for d = {d}",
                    c.rows(),
                    c.cols()
                )));
            }
            if c.as_slice()
                .iter()
                .any(|v| !v.re.is_finite() || !v.im.is_finite())
            {
                return Err(Error::Argument(format!("non-finite coefficient at {j:?}")));
            }
            match map.get_mut(&j) {
                Some(acc) => acc.axpy(C64::new(1.0, 0.0), &c),
                None => {
                    map.insert(j, c);
                }
            }
        }
        let biggest = map.values().map(|c| c.norm_fro()).fold(0.0, f64::max);
        map.retain(|_, c| c.norm_fro() > PRUNE_REL * biggest);
        let mut p = MatrixTrigPolynomial {
            d,
            m,
            coeffs: map,
            hermitian: false,
        };
        p.hermitian = p.check_hermitian();
        Ok(p)
    }

    /// Univariate symbol from `(offset, coefficient)` pairs.
    pub fn univariate(d: usize, coeffs: impl IntoIterator<Item = (i32, CMat)>) -> Result<Self> {
        Self::from_coeffs(d, 1, coeffs.into_iter().map(|(j, c)| (vec![j], c)))
    }

    /// Scalar univariate symbol from real Fourier coefficients.
    pub fn scalar(coeffs: &[(i32, f64)]) -> Self {
        Self::univariate(
            1,
            coeffs
                .iter()
                .map(|&(j, v)| (j, CMat::from_real_rows(&[&[v]]))),
        )
        .expect("scalar coefficients are well-formed")
    }

    pub fn constant(c: CMat, m: usize) -> Result<Self> {
        let d = c.rows();
        Self::from_coeffs(d, m, [(vec![0; m], c)])
    }

    pub fn identity(d: usize, m: usize) -> Self {
        Self::constant(CMat::identity(d), m).expect("identity is well-formed")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<i32>, CMat> {
        &self.coeffs
    }

    pub fn coeff(&self, j: &[i32]) -> Option<&CMat> {
        self.coeffs.get(j)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Largest `|j_l|` over stored coefficients, per variable.
    pub fn radius(&self) -> Vec<usize> {
        let mut r = vec![0usize; self.m];
        for j in self.coeffs.keys() {
            for (l, &jl) in j.iter().enumerate() {
                r[l] = r[l].max(jl.unsigned_abs() as usize);
            }
        }
        r
    }

    /// `f̂_{-j} = f̂_j^H` within tolerance.
    fn check_hermitian(&self) -> bool {
        let scale = self
            .coeffs
            .values()
            .map(|c| c.norm_max())
            .fold(0.0, f64::max)
            .max(1.0);
        self.coeffs.iter().all(|(j, c)| {
            let neg: Vec<i32> = j.iter().map(|v| -v).collect();
            match self.coeffs.get(&neg) {
                Some(cn) => c
                    .sub(&cn.adjoint())
                    .map(|e| e.norm_max() <= HERMITIAN_TOL * scale)
                    .unwrap_or(false),
                None => false,
            }
        })
    }

    pub fn evaluate(&self, theta: &[f64]) -> Result<CMat> {
        if theta.len() != self.m {
            return Err(Error::Dimension(format!(
                "{} angles for m = {}",
                theta.len(),
                self.m
            )));
        }
        let mut out = CMat::zeros(self.d, self.d);
        for (j, c) in &self.coeffs {
            let phase: f64 = j.iter().zip(theta).map(|(&jl, &t)| jl as f64 * t).sum();
            out.axpy(C64::from_polar(1.0, phase), c);
        }
        Ok(if self.hermitian {
            out.hermitian_part()
        } else {
            out
        })
    }

    /// `θ ↦ f(θ)^H`.
    pub fn adjoint(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(j, c)| (j.iter().map(|v| -v).collect(), c.adjoint()));
        Self::from_coeffs(self.d, self.m, coeffs).expect("adjoint keeps shapes")
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.m != other.m || self.d != other.d {
            return Err(Error::Dimension(format!(
                "product of (d={}, m={}) and (d={}, m={})",
                self.d, self.m, other.d, other.m
            )));
        }
        let mut terms = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (j, a) in &self.coeffs {
            for (k, b) in &other.coeffs {
                let jk: Vec<i32> = j.iter().zip(k).map(|(x, y)| x + y).collect();
                terms.push((jk, a.matmul(b)?));
            }
        }
        Self::from_coeffs(self.d, self.m, terms)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.m != other.m || self.d != other.d {
            return Err(Error::Dimension(
                "sum of symbols with different shapes".into(),
            ));
        }
        let terms = self
            .coeffs
            .iter()
            .chain(&other.coeffs)
            .map(|(j, c)| (j.clone(), c.clone()));
        Self::from_coeffs(self.d, self.m, terms)
    }

    pub fn scale(&self, s: f64) -> Self {
        let terms = self
            .coeffs
            .iter()
            .map(|(j, c)| (j.clone(), c.scale_real(s)));
        Self::from_coeffs(self.d, self.m, terms).expect("scaling keeps shapes")
    }

    /// Tensor product in fresh variables: `(f ⊗ g)(θ, φ) = f(θ) ⊗ g(φ)`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (j, a) in &self.coeffs {
            for (k, b) in &other.coeffs {
                let jk: Vec<i32> = j.iter().chain(k).copied().collect();
                terms.push((jk, a.kron(b)));
            }
        }
        Self::from_coeffs(self.d * other.d, self.m + other.m, terms)
            .expect("tensor product is well-formed")
    }

    /// Eigenvalues (ascending) at `θ`; requires a Hermitian symbol.
    pub fn eigenvalues(&self, theta: &[f64]) -> Result<Vec<f64>> {
        Ok(eig_hermitian(&self.evaluate(theta)?)?.values)
    }

    /// Largest eigenvalue magnitude over `grid` (a cheap `||f||_∞` estimate).
    pub fn sup_norm_on(&self, grid: &[Vec<f64>]) -> Result<f64> {
        let mut best = 0.0f64;
        for t in grid {
            let e = self.eigenvalues(t)?;
            best = best.max(e.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        }
        Ok(best)
    }
}

/// Uniform grid of `n` points `2πk/n` in each of `m` variables.
pub fn uniform_grid(m: usize, n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * n);
        for prefix in &out {
            for k in 0..n {
                let mut t = prefix.clone();
                t.push(2.0 * PI * k as f64 / n as f64);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Eigenvalue samples of a Hermitian symbol along a path.
#[derive(Debug, Clone)]
pub struct EigenvalueFunctions {
    /// `sorted[k]` are the ascending eigenvalues at the k-th grid point.
    pub sorted: Vec<Vec<f64>>,
    /// `tracked[k][l]` follows branch `l` by eigenvector overlap with the
    /// previous grid point.
    pub tracked: Vec<Vec<f64>>,
}

pub fn eigenvalue_functions(
    f: &MatrixTrigPolynomial,
    grid: &[Vec<f64>],
) -> Result<EigenvalueFunctions> {
    if grid.is_empty() {
        return Err(Error::Argument("empty grid".into()));
    }
    if !f.is_hermitian() {
        return Err(Error::Argument(
            "eigenvalue functions need a Hermitian symbol".into(),
        ));
    }
    let d = f.d();
    let mut sorted = Vec::with_capacity(grid.len());
    let mut tracked = Vec::with_capacity(grid.len());
    let mut prev: Option<Vec<Vec<C64>>> = None;
    for theta in grid {
        let e = eig_hermitian(&f.evaluate(theta)?)?;
        let vecs: Vec<Vec<C64>> = (0..d).map(|k| e.vector(k)).collect();
        let assign: Vec<usize> = match &prev {
            None => (0..d).collect(),
            Some(pv) => match_branches(pv, &vecs),
        };
        tracked.push(assign.iter().map(|&k| e.values[k]).collect());
        prev = Some(assign.iter().map(|&k| vecs[k].clone()).collect());
        sorted.push(e.values);
    }
    Ok(EigenvalueFunctions { sorted, tracked })
}

/// Greedy maximum-overlap assignment; `out[l]` is the new index for branch `l`.
/// Near-ties prefer keeping the ascending position.
fn match_branches(prev: &[Vec<C64>], next: &[Vec<C64>]) -> Vec<usize> {
    let d = prev.len();
    let mut pairs = Vec::with_capacity(d * d);
    for (l, pv) in prev.iter().enumerate() {
        for (k, nv) in next.iter().enumerate() {
            let overlap = dot(pv, nv).norm();
            pairs.push(((overlap * 1e10).round() as i64, l.abs_diff(k), l, k));
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut out = vec![usize::MAX; d];
    let mut used = vec![false; d];
    for (_, _, l, k) in pairs {
        if out[l] == usize::MAX && !used[k] {
            out[l] = k;
            used[k] = true;
        }
    }
    out
}

/// `f̂(θ) = 2^{-m} Σ_η (p^H f p)(θ/2 + πη)`, computed from the even
/// coefficients of `p^H f p`.
pub fn coarse_symbol(
    f: &MatrixTrigPolynomial,
    p: &MatrixTrigPolynomial,
) -> Result<MatrixTrigPolynomial> {
    let g = p.adjoint().mul(f)?.mul(p)?;
    let terms = g
        .coeffs()
        .iter()
        .filter(|(j, _)| j.iter().all(|v| v % 2 == 0))
        .map(|(j, c)| (j.iter().map(|v| v / 2).collect(), c.clone()));
    MatrixTrigPolynomial::from_coeffs(g.d(), g.m(), terms)
}

/// `p^(m)(θ) = p_1(θ_1) ⊗ ... ⊗ p_m(θ_m)`.
pub fn tensor_symbol(ps: &[MatrixTrigPolynomial]) -> Result<MatrixTrigPolynomial> {
    let (first, rest) = ps
        .split_first()
        .ok_or_else(|| Error::Argument("empty factor list".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, p| acc.tensor(p)))
}

/// The `2^m` corner points `θ + πη`, `η ∈ {0,1}^m`, with `η = 0` first.
pub fn corners(theta: &[f64]) -> Vec<Vec<f64>> {
    let m = theta.len();
    (0..1usize << m)
        .map(|mask| {
            theta
                .iter()
                .enumerate()
                .map(|(l, &t)| if mask >> l & 1 == 1 { t + PI } else { t })
                .collect()
        })
        .collect()
}

/// `Σ_{ξ ∈ Ω(θ)} p(ξ)^H p(ξ)`.
pub fn corner_sum(p: &MatrixTrigPolynomial, theta: &[f64]) -> Result<CMat> {
    let mut acc = CMat::zeros(p.d(), p.d());
    for xi in corners(theta) {
        let v = p.evaluate(&xi)?;
        acc.axpy(C64::new(1.0, 0.0), &v.adjoint().matmul(&v)?);
    }
    Ok(acc.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn p_l2() -> MatrixTrigPolynomial {
        MatrixTrigPolynomial::univariate(
            2,
            [
                (-1, CMat::from_real_rows(&[&[1.0, 0.0], &[2.0, 0.0]])),
                (0, CMat::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]])),
                (1, CMat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])),
            ],
        )
        .unwrap()
    }

    pub(crate) fn f_q2() -> MatrixTrigPolynomial {
        MatrixTrigPolynomial::univariate(
            2,
            [
                (
                    0,
                    CMat::from_real_rows(&[&[16.0, -8.0], &[-8.0, 14.0]]).scale_real(1.0 / 3.0),
                ),
                (
                    1,
                    CMat::from_real_rows(&[&[0.0, -8.0], &[0.0, 1.0]]).scale_real(1.0 / 3.0),
                ),
                (
                    -1,
                    CMat::from_real_rows(&[&[0.0, 0.0], &[-8.0, 1.0]]).scale_real(1.0 / 3.0),
                ),
            ],
        )
        .unwrap()
    }

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        a.sub(b).unwrap().norm_max() <= tol
    }

    #[test]
    fn evaluates_fem_symbol_at_pi() {
        let f = f_q2();
        assert!(f.is_hermitian());
        let v = f.evaluate(&[PI]).unwrap();
        assert!(close(
            &v,
            &CMat::from_real_rows(&[&[16.0, 0.0], &[0.0, 12.0]]).scale_real(1.0 / 3.0),
            1e-14
        ));
    }

    #[test]
    fn evaluates_linear_projector_at_pi() {
        let v = p_l2().evaluate(&[PI]).unwrap();
        assert!(close(
            &v,
            &CMat::from_real_rows(&[&[0.0, 0.0], &[-2.0, 2.0]]),
            1e-14
        ));
        assert!(!p_l2().is_hermitian());
    }

    #[test]
    fn wrong_angle_count_is_rejected() {
        assert!(matches!(
            f_q2().evaluate(&[0.0, 1.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn prunes_negligible_coefficients() {
        let f = MatrixTrigPolynomial::scalar(&[(0, 2.0), (3, 1e-16)]);
        assert_eq!(f.coeffs().len(), 1);
        assert_eq!(f.radius(), vec![0]);
    }

    #[test]
    fn coarse_symbol_of_scalar_laplacian() {
        let f = MatrixTrigPolynomial::scalar(&[(-1, -1.0), (0, 2.0), (1, -1.0)]);
        let p = MatrixTrigPolynomial::scalar(&[(-1, 1.0), (0, 2.0), (1, 1.0)]);
        let fh = coarse_symbol(&f, &p).unwrap();
        assert_eq!(
            fh,
            MatrixTrigPolynomial::scalar(&[(-1, -2.0), (0, 4.0), (1, -2.0)])
        );
        let id = MatrixTrigPolynomial::identity(1, 1);
        let fh = coarse_symbol(&f, &id).unwrap();
        assert_eq!(fh, MatrixTrigPolynomial::scalar(&[(0, 2.0)]));
    }

    #[test]
    fn corner_sum_of_linear_projector() {
        let s = corner_sum(&p_l2(), &[0.0]).unwrap();
        assert!(close(
            &s,
            &CMat::from_real_rows(&[&[12.0, 4.0], &[4.0, 12.0]]),
            1e-13
        ));
    }

    #[test]
    fn corner_sum_of_scalar_projector() {
        let p = MatrixTrigPolynomial::scalar(&[(-1, 0.5), (0, 1.0), (1, 0.5)]);
        for k in 0..16 {
            let t = 0.37 * k as f64;
            let s = corner_sum(&p, &[t]).unwrap()[(0, 0)];
            assert!((s - c(2.0 + 2.0 * t.cos().powi(2), 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn tensor_of_linear_projectors() {
        let p2 = tensor_symbol(&[p_l2(), p_l2()]).unwrap();
        assert_eq!((p2.d(), p2.m()), (4, 2));
        let v = p2.evaluate(&[0.0, 0.0]).unwrap();
        assert!(v
            .as_slice()
            .iter()
            .all(|x| (x - c(4.0, 0.0)).norm() < 1e-13));
        assert!(tensor_symbol(&[]).is_err());
    }

    #[test]
    fn eigenvalue_tracking_follows_crossing() {
        // diag(cos θ, -cos θ) crosses at π/2; tracking keeps the branches smooth.
        let f = MatrixTrigPolynomial::univariate(
            2,
            [
                (1, CMat::from_real_rows(&[&[0.5, 0.0], &[0.0, -0.5]])),
                (-1, CMat::from_real_rows(&[&[0.5, 0.0], &[0.0, -0.5]])),
            ],
        )
        .unwrap();
        let grid: Vec<Vec<f64>> = (0..=40).map(|k| vec![PI * k as f64 / 40.0]).collect();
        let ef = eigenvalue_functions(&f, &grid).unwrap();
        for (k, t) in grid.iter().enumerate() {
            let want = t[0].cos();
            assert!(ef.tracked[k].iter().any(|v| (v - want).abs() < 1e-12));
            assert!(ef.sorted[k][0] <= ef.sorted[k][1]);
        }
        let branch: Vec<f64> = ef.tracked.iter().map(|v| v[1]).collect();
        assert!(branch.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(eigenvalue_functions(&f, &[]).is_err());
    }

    fn arb_poly(d: usize, deg: i32) -> impl Strategy<Value = MatrixTrigPolynomial> {
        let n = (2 * deg + 1) as usize * d * d;
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n).prop_map(move |v| {
            let mut it = v.into_iter();
            let terms: Vec<(i32, CMat)> = (-deg..=deg)
                .map(|j| {
                    (
                        j,
                        CMat::from_fn(d, d, |_, _| {
                            let (a, b) = it.next().unwrap();
                            c(a, b)
                        }),
                    )
                })
                .collect();
            MatrixTrigPolynomial::univariate(d, terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn hermitian_closure(p in arb_poly(2, 2), f in arb_poly(2, 1), t in -4.0f64..4.0) {
            let fh = f.adjoint().mul(&f).unwrap();
            prop_assert!(fh.is_hermitian());
            let g = p.adjoint().mul(&fh).unwrap().mul(&p).unwrap();
            prop_assert!(g.is_hermitian());
            let v = g.evaluate(&[t]).unwrap();
            prop_assert!(v.is_hermitian(0.0));
        }

        #[test]
        fn coarse_symbol_matches_half_sum(p in arb_poly(2, 2), f in arb_poly(2, 2), t in -4.0f64..4.0) {
            let fh = coarse_symbol(&f, &p).unwrap();
            let g = |x: f64| {
                let pv = p.evaluate(&[x]).unwrap();
                pv.adjoint().matmul(&f.evaluate(&[x]).unwrap()).unwrap().matmul(&pv).unwrap()
            };
            let want = g(t / 2.0).add(&g(t / 2.0 + PI)).unwrap().scale_real(0.5);
            let got = fh.evaluate(&[t]).unwrap();
            prop_assert!(close(&got, &want, 1e-10 * want.norm_max().max(1.0)));
        }

        #[test]
        fn corner_sum_factorizes(p in arb_poly(2, 1), q in arb_poly(1, 2), t1 in -4.0f64..4.0, t2 in -4.0f64..4.0) {
            let pq = tensor_symbol(&[p.clone(), q.clone()]).unwrap();
            let lhs = corner_sum(&pq, &[t1, t2]).unwrap();
            let rhs = corner_sum(&p, &[t1]).unwrap().kron(&corner_sum(&q, &[t2]).unwrap());
            prop_assert!(close(&lhs, &rhs, 1e-12 * rhs.norm_max().max(1.0)));
        }
    }
}
