//! Lagrange `Q_r` finite elements on `[0, 1]` with Dirichlet conditions, the
//! symbols of their stiffness matrices, and the linear and geometric
//! interpolation transfers between nested grids.
//!
//! Dofs are the knots `ξ_i = i/(nr)`, `i = 1..nr-1`; grouping them `r` at a
//! time (element interior nodes plus right endpoint) gives the block layout.
//! Stiffness matrices are returned as `K/n` and mass matrices as `n M`, which
//! makes the constant-coefficient stiffness equal to `T_n(f)` with its last
//! row and column removed.

use crate::error::{Error, Result};
use crate::mgsolve::{MultigridHierarchy, SmootherSpec};
use crate::smallmat::{det, CMat, C64};
use crate::sparse::CsrMatrix;
use crate::structured::{BlockStructuredMatrix, GridTransfer, Structure};
use crate::symbol::MatrixTrigPolynomial;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

const EXTRACT_ELEMENTS: usize = 8;
const CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnotGrid {
    pub r: usize,
    pub n: usize,
}

impl KnotGrid {
    pub fn new(r: usize, n: usize) -> Result<Self> {
        if r == 0 || n == 0 {
            return Err(Error::Argument("need r >= 1 and n >= 1".into()));
        }
        Ok(KnotGrid { r, n })
    }

    pub fn knot(&self, i: usize) -> f64 {
        i as f64 / (self.n * self.r) as f64
    }

    pub fn knot_count(&self) -> usize {
        self.n * self.r + 1
    }

    pub fn dofs(&self) -> usize {
        self.n * self.r - 1
    }
}

#[derive(Clone)]
pub enum Coefficient {
    One,
    XSquaredPlusOne,
    ExpMinusTwoX,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Coefficient {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Coefficient::One => 1.0,
            Coefficient::XSquaredPlusOne => x * x + 1.0,
            Coefficient::ExpMinusTwoX => x.exp() - 2.0 * x,
            Coefficient::Custom(f) => f(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Coefficient::One => "one",
            Coefficient::XSquaredPlusOne => "xsq_plus_one",
            Coefficient::ExpMinusTwoX => "exp_minus_2x",
            Coefficient::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct FemProblem1D {
    pub coefficient: Coefficient,
    pub grid: KnotGrid,
}

impl FemProblem1D {
    pub fn new(coefficient: Coefficient, r: usize, n: usize) -> Result<Self> {
        Ok(FemProblem1D {
            coefficient,
            grid: KnotGrid::new(r, n)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransferKind {
    Linear,
    Geometric,
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = (1.0 - z) / 2.0;
        x[n - 1 - i] = (1.0 + z) / 2.0;
        w[i] = wt / 2.0;
        w[n - 1 - i] = wt / 2.0;
    }
    (x, w)
}

/// Lagrange basis on the reference nodes `0, 1/r, ..., 1`.
pub fn local_basis(r: usize, l: usize, t: f64) -> f64 {
    let tl = l as f64 / r as f64;
    (0..=r)
        .filter(|&m| m != l)
        .map(|m| (t - m as f64 / r as f64) / (tl - m as f64 / r as f64))
        .product()
}

pub fn local_basis_deriv(r: usize, l: usize, t: f64) -> f64 {
    let node = |m: usize| m as f64 / r as f64;
    let mut total = 0.0;
    for k in (0..=r).filter(|&k| k != l) {
        let mut term = 1.0 / (node(l) - node(k));
        for m in (0..=r).filter(|&m| m != l && m != k) {
            term *= (t - node(m)) / (node(l) - node(m));
        }
        total += term;
    }
    total
}

/// Global basis function `φ_j` (knot index `j = 0..nr`) at `x ∈ [0, 1]`.
pub fn lagrange_eval(grid: &KnotGrid, j: usize, x: f64) -> Result<f64> {
    if j > grid.n * grid.r {
        return Err(Error::Argument(format!(
            "basis index {j} beyond {}",
            grid.n * grid.r
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Argument(format!("x = {x} outside [0, 1]")));
    }
    let e = ((x * grid.n as f64).floor() as usize).min(grid.n - 1);
    Ok(element_value(grid.r, e, j, x * grid.n as f64 - e as f64))
}

fn element_value(r: usize, e: usize, j: usize, t: f64) -> f64 {
    if j < e * r || j > (e + 1) * r {
        0.0
    } else {
        local_basis(r, j - e * r, t)
    }
}

/// Value of the coarse basis function at coarse knot `j` (grid with `nc`
/// elements) at fine knot `i` of the twice-refined grid.
fn coarse_at_fine_knot(r: usize, nc: usize, j: usize, i: usize) -> f64 {
    let e = (i / (2 * r)).min(nc - 1);
    element_value(r, e, j, (i - 2 * r * e) as f64 / (2 * r) as f64)
}

fn assemble_1d(
    grid: &KnotGrid,
    mut local: impl FnMut(usize, usize, usize) -> f64,
) -> Result<CsrMatrix> {
    let (r, n) = (grid.r, grid.n);
    let ndof = grid.dofs();
    let mut trip = Vec::new();
    for e in 0..n {
        for a in 0..=r {
            for b in 0..=r {
                let (ga, gb) = (e * r + a, e * r + b);
                if ga == 0 || gb == 0 || ga == n * r || gb == n * r {
                    continue;
                }
                trip.push((ga - 1, gb - 1, C64::new(local(e, a, b), 0.0)));
            }
        }
    }
    CsrMatrix::from_triplets(ndof, ndof, trip)
}

/// Normalized stiffness `K/n`, `K = [∫ a φ_j' φ_i']`, by `(r+2)`-point Gauss.
pub fn assemble_stiffness(problem: &FemProblem1D) -> Result<CsrMatrix> {
    let grid = problem.grid;
    let (r, n) = (grid.r, grid.n);
    let (qx, qw) = gauss_legendre(r + 2);
    let dphi: Vec<Vec<f64>> = (0..=r)
        .map(|l| qx.iter().map(|&t| local_basis_deriv(r, l, t)).collect())
        .collect();
    assemble_1d(&grid, |e, a, b| {
        qx.iter()
            .zip(&qw)
            .enumerate()
            .map(|(q, (&t, &w))| {
                w * problem.coefficient.eval((e as f64 + t) / n as f64) * dphi[a][q] * dphi[b][q]
            })
            .sum()
    })
}

/// Normalized mass `n M`, `M = [∫ φ_j φ_i]`.
pub fn assemble_mass(grid: &KnotGrid) -> Result<CsrMatrix> {
    let r = grid.r;
    let (qx, qw) = gauss_legendre(r + 2);
    let phi: Vec<Vec<f64>> = (0..=r)
        .map(|l| qx.iter().map(|&t| local_basis(r, l, t)).collect())
        .collect();
    assemble_1d(grid, |_, a, b| {
        qw.iter()
            .enumerate()
            .map(|(q, &w)| w * phi[a][q] * phi[b][q])
            .sum()
    })
}

fn block(m: &CsrMatrix, r: usize, bi: usize, bk: usize) -> CMat {
    CMat::from_fn(r, r, |a, b| m.get(bi * r + a, bk * r + b))
}

/// Reads `a0 + a1 e^{iθ} + a1^T e^{-iθ}` from interior blocks of a banded
/// block matrix with `EXTRACT_ELEMENTS` elements.
fn symbol_from_blocks(m: &CsrMatrix, r: usize) -> Result<MatrixTrigPolynomial> {
    let b = EXTRACT_ELEMENTS / 2 - 1;
    let a0 = block(m, r, b, b);
    let a1 = block(m, r, b + 1, b);
    let am1 = block(m, r, b, b + 1);
    if a1.transpose().sub(&am1)?.norm_max() > CHECK_TOL
        || block(m, r, b + 2, b).norm_max() > CHECK_TOL
    {
        return Err(Error::Construction(
            "interior blocks are not tridiagonal Toeplitz".into(),
        ));
    }
    MatrixTrigPolynomial::univariate(r, [(0, a0), (1, a1), (-1, am1)])
}

/// Symbol `f_{Q_r}` of the normalized constant-coefficient stiffness.
pub fn extract_symbol(r: usize) -> Result<MatrixTrigPolynomial> {
    let k = assemble_stiffness(&FemProblem1D::new(Coefficient::One, r, EXTRACT_ELEMENTS)?)?;
    let f = symbol_from_blocks(&k, r)?;
    let e = vec![C64::new(1.0, 0.0); r];
    let defect = crate::smallmat::vec_norm(&f.evaluate(&[0.0])?.matvec(&e)?);
    if defect > CHECK_TOL {
        return Err(Error::Construction(format!(
            "f(0) e = {defect:e}, expected 0"
        )));
    }
    Ok(f)
}

/// Symbol of the normalized mass matrix.
pub fn extract_mass_symbol(r: usize) -> Result<MatrixTrigPolynomial> {
    symbol_from_blocks(&assemble_mass(&KnotGrid::new(r, EXTRACT_ELEMENTS)?)?, r)
}

/// Numerical evidence for the order-zero structure of `f_{Q_r}`.
#[derive(Debug, Clone, Serialize)]
pub struct OrderZeroReport {
    pub r: usize,
    /// `||f(0) e||`.
    pub kernel_defect: f64,
    /// Bounds of `λ_1(f(θ)) / θ²` over `0 < |θ| <= π`.
    pub c1: f64,
    pub c2: f64,
    /// Bounds of `λ_j(f(θ))`, `j >= 2`.
    pub m1: f64,
    pub m2: f64,
    pub pass: bool,
}

pub fn order_zero_report(f: &MatrixTrigPolynomial) -> Result<OrderZeroReport> {
    let r = f.d();
    let e = vec![C64::new(1.0, 0.0); r];
    let kernel_defect = crate::smallmat::vec_norm(&f.evaluate(&[0.0])?.matvec(&e)?);
    let (mut c1, mut c2, mut m1, mut m2) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
    let samples = 2048;
    for k in 1..=samples {
        let t = PI * k as f64 / samples as f64;
        for theta in [t, -t] {
            let ev = f.eigenvalues(&[theta])?;
            let ratio = ev[0] / (theta * theta);
            c1 = c1.min(ratio);
            c2 = c2.max(ratio);
            if r > 1 {
                m1 = m1.min(ev[1]);
                m2 = m2.max(ev[r - 1]);
            }
        }
    }
    if r == 1 {
        m1 = f64::NAN;
        m2 = f64::NAN;
    }
    let pass =
        kernel_defect <= CHECK_TOL && c1 > 1e-8 && c1 <= c2 && (r == 1 || (m1 > 1e-8 && m1 <= m2));
    Ok(OrderZeroReport {
        r,
        kernel_defect,
        c1,
        c2,
        m1,
        m2,
        pass,
    })
}

/// Scalar linear interpolation `T_M(2 + 2cos θ) K^Even` with the columns
/// given by coarse dof `c ↦` fine dof `2c + 1`.
fn linear_matrix(fine: usize, coarse: usize) -> Result<CsrMatrix> {
    let mut trip = Vec::with_capacity(3 * coarse);
    for c in 0..coarse {
        let i = 2 * c + 1;
        trip.push((i, c, C64::new(2.0, 0.0)));
        trip.push((i - 1, c, C64::new(1.0, 0.0)));
        if i + 1 < fine {
            trip.push((i + 1, c, C64::new(1.0, 0.0)));
        }
    }
    CsrMatrix::from_triplets(fine, coarse, trip)
}

/// Block symbol `p_{L_r}` obtained by reblocking the scalar linear
/// interpolation stencil into `r×r` coefficients.
pub fn build_linear_interp_symbol(r: usize) -> Result<MatrixTrigPolynomial> {
    if r == 0 {
        return Err(Error::Argument("r must be positive".into()));
    }
    let nb = 6;
    let p = linear_matrix(nb * r, 2 * r)?;
    let c = 1;
    let mut terms = Vec::new();
    for j in -2i32..=2 {
        let fb = (2 * c + 1) as i32 + j;
        let blk = CMat::from_fn(r, r, |a, b| p.get(fb as usize * r + a, c * r + b));
        if j.abs() == 2 && blk.norm_max() != 0.0 {
            return Err(Error::Construction(
                "linear stencil leaks past offset 1".into(),
            ));
        }
        terms.push((j, blk));
    }
    let sym = MatrixTrigPolynomial::univariate(r, terms)?;
    let rows = |m: &CMat| {
        (0..r)
            .map(|i| m.row(i).iter().map(|v| v.re).sum::<f64>())
            .collect::<Vec<f64>>()
    };
    let low = rows(sym.coeff(&[-1]).expect("offset -1 is present"));
    if (low[0] - 1.0).abs() > CHECK_TOL || low[1..].iter().any(|v| (v - 2.0).abs() > CHECK_TOL) {
        return Err(Error::Construction(format!(
            "row sums of the offset -1 block are {low:?}"
        )));
    }
    check_projector_identities(&sym, 4.0)?;
    Ok(sym)
}

/// `p(0) e = λ e` and `p(π) e = 0` for `e` the all-ones vector.
fn check_projector_identities(p: &MatrixTrigPolynomial, lambda: f64) -> Result<()> {
    let r = p.d();
    let e = vec![C64::new(1.0, 0.0); r];
    let at0 = p.evaluate(&[0.0])?.matvec(&e)?;
    let atpi = p.evaluate(&[PI])?.matvec(&e)?;
    let d0 = at0.iter().map(|v| (v - lambda).norm()).fold(0.0, f64::max);
    let dpi = atpi.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if d0 > CHECK_TOL || dpi > CHECK_TOL {
        return Err(Error::Construction(format!(
            "p(0)e - {lambda}e = {d0:e}, p(π)e = {dpi:e}"
        )));
    }
    Ok(())
}

/// `e^{-irθ} (e^{iθ} + 1)^{r+1} / 2^{r(r+1)/2}`.
pub fn geometric_det_formula(r: usize, theta: f64) -> C64 {
    let z = C64::from_polar(1.0, theta) + 1.0;
    C64::from_polar(1.0, -(r as f64) * theta) * z.powu(r as u32 + 1)
        / 2f64.powi((r * (r + 1) / 2) as i32)
}

/// Block symbol `p_{G_r}`: coarse Lagrange basis functions sampled at the
/// fine knots, offsets `-1..2`.
pub fn build_geometric_symbol(r: usize) -> Result<MatrixTrigPolynomial> {
    if r == 0 {
        return Err(Error::Argument("r must be positive".into()));
    }
    // Coarse grid with two elements; fine knots i/(4r).
    let terms: Vec<(i32, CMat)> = (-1i32..=2)
        .map(|j| {
            let base = ((j + 1) as usize) * r;
            (
                j,
                CMat::from_fn(r, r, |a, b| {
                    C64::new(coarse_at_fine_knot(r, 2, b + 1, base + a + 1), 0.0)
                }),
            )
        })
        .collect();
    let sym = MatrixTrigPolynomial::univariate(r, terms)?;
    check_projector_identities(&sym, 2.0)?;
    for k in 0..64 {
        let t = -PI + 2.0 * PI * (k as f64 + 0.5) / 64.0;
        let got = det(&sym.evaluate(&[t])?)?;
        let want = geometric_det_formula(r, t);
        if (got - want).norm() > CHECK_TOL * want.norm().max(1.0) {
            return Err(Error::Construction(format!(
                "det p_G({t}) = {got}, expected {want}"
            )));
        }
    }
    Ok(sym)
}

/// Prolongation from `n/2` to `n` elements on the Dirichlet dofs.
pub fn build_fem_transfer(r: usize, n: usize, kind: TransferKind) -> Result<GridTransfer> {
    if r == 0 || n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Argument(format!(
            "need r >= 1 and an even element count, got n = {n}"
        )));
    }
    let fine = r * n - 1;
    let coarse = r * (n / 2) - 1;
    if coarse == 0 {
        return Err(Error::Argument("coarse grid has no dofs".into()));
    }
    let matrix = match kind {
        TransferKind::Linear => linear_matrix(fine, coarse)?,
        TransferKind::Geometric => {
            let mut trip = Vec::new();
            for j in 0..coarse {
                let lo = (2 * (j + 1)).saturating_sub(2 * r);
                let hi = (2 * (j + 1) + 2 * r).min(fine + 1);
                for i in lo.max(1)..hi {
                    let v = coarse_at_fine_knot(r, n / 2, j + 1, i);
                    if v != 0.0 {
                        trip.push((i - 1, j, C64::new(v, 0.0)));
                    }
                }
            }
            CsrMatrix::from_triplets(fine, coarse, trip)?
        }
    };
    Ok(GridTransfer {
        symbol: None,
        parity: None,
        fine_size: fine,
        coarse_size: coarse,
        coarse_blocks: vec![n / 2],
        matrix,
    })
}

/// Galerkin hierarchy for the 1D problem, one FEM transfer per halving.
pub fn fem_hierarchy(
    problem: &FemProblem1D,
    kind: TransferKind,
    smoother: SmootherSpec,
    coarsest_max: usize,
) -> Result<MultigridHierarchy> {
    let r = problem.grid.r;
    let k = assemble_stiffness(problem)?;
    let fine = BlockStructuredMatrix {
        structure: Structure::General,
        d: r,
        blocks: vec![problem.grid.n],
        matrix: k,
    };
    MultigridHierarchy::build(fine, smoother, coarsest_max, |_, m| {
        let n = m.blocks[0];
        if n < 2 || n % 2 != 0 || r * (n / 2) < 2 {
            return Ok(None);
        }
        build_fem_transfer(r, n, kind).map(Some)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structured::assemble_toeplitz;
    use proptest::prelude::*;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        a.sub(b).unwrap().norm_max() <= tol
    }

    #[test]
    fn quadrature_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(4);
        for p in 0..8 {
            let q: f64 = x.iter().zip(&w).map(|(t, w)| w * t.powi(p)).sum();
            assert!((q - 1.0 / (p + 1) as f64).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn quadratic_mid_node_basis() {
        let g = KnotGrid::new(2, 1).unwrap();
        assert!((lagrange_eval(&g, 1, 0.25).unwrap() - 0.75).abs() < 1e-15);
        assert!(lagrange_eval(&g, 3, 0.5).is_err());
        assert!(lagrange_eval(&g, 1, 1.5).is_err());
    }

    #[test]
    fn linear_stiffness_is_tridiagonal() {
        let k = assemble_stiffness(&FemProblem1D::new(Coefficient::One, 1, 4).unwrap())
            .unwrap()
            .to_dense();
        let want =
            CMat::from_real_rows(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]);
        assert!(close(&k, &want, 1e-13));
    }

    #[test]
    fn quadratic_symbol() {
        let f = extract_symbol(2).unwrap();
        let third = 1.0 / 3.0;
        assert!(close(
            f.coeff(&[0]).unwrap(),
            &CMat::from_real_rows(&[&[16.0, -8.0], &[-8.0, 14.0]]).scale_real(third),
            1e-12
        ));
        assert!(close(
            f.coeff(&[1]).unwrap(),
            &CMat::from_real_rows(&[&[0.0, -8.0], &[0.0, 1.0]]).scale_real(third),
            1e-12
        ));
        assert!(close(
            f.coeff(&[-1]).unwrap(),
            &CMat::from_real_rows(&[&[0.0, 0.0], &[-8.0, 1.0]]).scale_real(third),
            1e-12
        ));
    }

    #[test]
    fn stiffness_is_cut_toeplitz() {
        for r in 1..=4 {
            let f = extract_symbol(r).unwrap();
            let n = 6;
            let k =
                assemble_stiffness(&FemProblem1D::new(Coefficient::One, r, n).unwrap()).unwrap();
            let t = assemble_toeplitz(&f, n).unwrap().matrix;
            let keep: Vec<usize> = (0..n * r - 1).collect();
            let cut = t.principal_submatrix(&keep).unwrap();
            assert!(close(&k.to_dense(), &cut.to_dense(), 1e-10), "r = {r}");
        }
    }

    #[test]
    fn order_zero_structure() {
        for r in 1..=4 {
            let rep = order_zero_report(&extract_symbol(r).unwrap()).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn linear_symbol_for_quadratics() {
        let p = build_linear_interp_symbol(2).unwrap();
        let want = MatrixTrigPolynomial::univariate(
            2,
            [
                (-1, CMat::from_real_rows(&[&[1.0, 0.0], &[2.0, 0.0]])),
                (0, CMat::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]])),
                (1, CMat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])),
            ],
        )
        .unwrap();
        assert_eq!(p, want);
        for r in 1..=5 {
            build_linear_interp_symbol(r).unwrap();
        }
    }

    #[test]
    fn geometric_symbols() {
        let p1 = build_geometric_symbol(1).unwrap();
        assert_eq!(
            p1,
            MatrixTrigPolynomial::scalar(&[(-1, 0.5), (0, 1.0), (1, 0.5)])
        );
        for r in 1..=5 {
            build_geometric_symbol(r).unwrap();
        }
    }

    #[test]
    fn geometric_transfer_is_half_linear_for_r1() {
        let lin = build_fem_transfer(1, 8, TransferKind::Linear).unwrap();
        let geo = build_fem_transfer(1, 8, TransferKind::Geometric).unwrap();
        assert_eq!((lin.fine_size, lin.coarse_size), (7, 3));
        assert!(close(
            &geo.matrix.to_dense(),
            &lin.matrix.to_dense().scale_real(0.5),
            1e-15
        ));
        assert_eq!(
            build_fem_transfer(2, 8, TransferKind::Geometric)
                .unwrap()
                .coarse_size,
            7
        );
        assert!(build_fem_transfer(2, 7, TransferKind::Linear).is_err());
    }

    #[test]
    fn geometric_transfer_samples_coarse_functions() {
        for r in 1..=3 {
            let n = 8;
            let t = build_fem_transfer(r, n, TransferKind::Geometric).unwrap();
            let coarse_grid = KnotGrid::new(r, n / 2).unwrap();
            let u: Vec<f64> = (0..coarse_grid.dofs())
                .map(|j| ((j * 7 % 5) as f64 - 2.0) * 0.5)
                .collect();
            let fine = t
                .matrix
                .matvec(&u.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
            let fine_grid = KnotGrid::new(r, n).unwrap();
            for (i, v) in fine.iter().enumerate() {
                let x = fine_grid.knot(i + 1);
                let want: f64 = u
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c * lagrange_eval(&coarse_grid, j + 1, x).unwrap())
                    .sum();
                assert!((v.re - want).abs() < 1e-13, "r = {r}, i = {i}");
            }
        }
    }

    #[test]
    fn mass_symbol_is_positive() {
        for r in 1..=3 {
            let h = extract_mass_symbol(r).unwrap();
            assert!(h.is_hermitian());
            assert!(h.eigenvalues(&[0.3]).unwrap()[0] > 0.0);
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(r in 1usize..5, n in 1usize..6, x in 0.0f64..=1.0) {
            let g = KnotGrid::new(r, n).unwrap();
            let s: f64 = (0..g.knot_count()).map(|j| lagrange_eval(&g, j, x).unwrap()).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }

        #[test]
        fn variable_coefficient_stiffness_is_spd(r in 1usize..4, which in 0usize..2) {
            let coef = if which == 0 { Coefficient::XSquaredPlusOne } else { Coefficient::ExpMinusTwoX };
            let k = assemble_stiffness(&FemProblem1D::new(coef, r, 4).unwrap()).unwrap();
            prop_assert!(k.to_dense().is_hermitian(1e-13));
            prop_assert!(crate::mgsolve::is_hpd(&k));
        }
    }
}
