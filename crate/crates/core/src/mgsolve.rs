//! Two-grid and V-cycle solvers over a Galerkin hierarchy.

use crate::error::{Error, Result};
use crate::smallmat::{vec_norm, CMat, Lu, C64};
use crate::sparse::CsrMatrix;
use crate::structured::{galerkin, BlockStructuredMatrix, GridTransfer};
use crate::symbol::{uniform_grid, MatrixTrigPolynomial};
use serde::Serialize;
use std::sync::OnceLock;

/// Levels at or below this size are solved directly in a V-cycle.
pub const COARSEST_MAX_SIZE: usize = 64;
const DENSE_DIRECT_MAX: usize = 256;
const DIVERGENCE_RATIO: f64 = 1.5;
const DIVERGENCE_STREAK: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SmootherKind {
    /// `x += ω (b - A x)`.
    Richardson { omega: f64 },
    /// Forward lexicographic sweep.
    GaussSeidel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmootherSpec {
    pub kind: SmootherKind,
    pub pre: usize,
    pub post: usize,
}

impl SmootherSpec {
    pub fn gauss_seidel(pre: usize, post: usize) -> Self {
        SmootherSpec {
            kind: SmootherKind::GaussSeidel,
            pre,
            post,
        }
    }

    pub fn richardson(omega: f64, pre: usize, post: usize) -> Self {
        SmootherSpec {
            kind: SmootherKind::Richardson { omega },
            pre,
            post,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cycle {
    TwoGrid,
    VCycle,
}

fn residual(a: &CsrMatrix, x: &[C64], b: &[C64]) -> Vec<C64> {
    a.matvec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect()
}

fn check_omega(a: &CsrMatrix, omega: f64) -> Result<()> {
    let bound = a.gershgorin_bound();
    if !(omega > 0.0 && omega * bound < 2.0) {
        return Err(Error::Config(format!(
            "Richardson ω = {omega} outside (0, 2/{bound})"
        )));
    }
    Ok(())
}

/// Applies `sweeps` smoothing steps in place.
pub fn smooth(
    a: &CsrMatrix,
    x: &mut [C64],
    b: &[C64],
    kind: SmootherKind,
    sweeps: usize,
) -> Result<()> {
    if x.len() != a.ncols() || b.len() != a.nrows() {
        return Err(Error::Dimension("smoother vector lengths".into()));
    }
    match kind {
        SmootherKind::Richardson { omega } => {
            check_omega(a, omega)?;
            for _ in 0..sweeps {
                let r = residual(a, x, b);
                for (xi, ri) in x.iter_mut().zip(r) {
                    *xi += ri * omega;
                }
            }
        }
        SmootherKind::GaussSeidel => {
            for _ in 0..sweeps {
                for i in 0..a.nrows() {
                    let mut s = b[i];
                    let mut diag = C64::new(0.0, 0.0);
                    for (j, v) in a.row(i) {
                        if j == i {
                            diag = v;
                        } else {
                            s -= v * x[j];
                        }
                    }
                    if diag == C64::new(0.0, 0.0) {
                        return Err(Error::Singular { pivot: i });
                    }
                    x[i] = s / diag;
                }
            }
        }
    }
    Ok(())
}

/// Banded Cholesky `A = L L^H` for Hermitian positive definite matrices.
#[derive(Debug, Clone)]
struct BandCholesky {
    n: usize,
    bw: usize,
    /// `l[i * (bw + 1) + (i - j)]` holds `L[i][j]`.
    l: Vec<C64>,
}

impl BandCholesky {
    fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        let bw = a.half_bandwidth();
        let w = bw + 1;
        let mut l = vec![C64::new(0.0, 0.0); n * w];
        for (i, j, v) in a.triplets() {
            if j <= i {
                l[i * w + (i - j)] = v;
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = l[i * w + (i - j)];
                for k in lo.max(j.saturating_sub(bw))..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)].conj();
                }
                if i == j {
                    if !(s.re > 0.0) || !s.re.is_finite() {
                        return Err(Error::Singular { pivot: i });
                    }
                    l[i * w] = C64::new(s.re.sqrt(), 0.0);
                } else {
                    l[i * w + (i - j)] = s / l[j * w];
                }
            }
        }
        Ok(BandCholesky { n, bw, l })
    }

    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut y = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= self.l[i * w + (i - k)] * y[k];
            }
            y[i] = s / self.l[i * w];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n.min(i + bw + 1) {
                s -= self.l[k * w + (k - i)].conj() * y[k];
            }
            y[i] = s / self.l[i * w];
        }
        y
    }
}

#[derive(Debug, Clone)]
enum DirectSolver {
    Dense(Lu),
    Band(BandCholesky),
}

impl DirectSolver {
    fn new(a: &CsrMatrix) -> Result<Self> {
        if a.nrows() <= DENSE_DIRECT_MAX {
            return Ok(DirectSolver::Dense(Lu::factor(&a.to_dense())?));
        }
        BandCholesky::factor(a).map(DirectSolver::Band)
    }

    fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        match self {
            DirectSolver::Dense(lu) => lu.solve_vec(b),
            DirectSolver::Band(ch) => Ok(ch.solve(b)),
        }
    }
}

/// Returns `true` when the matrix admits a Cholesky factorization.
pub fn is_hpd(a: &CsrMatrix) -> bool {
    BandCholesky::factor(a).is_ok()
}

#[derive(Debug)]
pub struct Level {
    pub matrix: BlockStructuredMatrix,
    /// Transfer to the next coarser level (absent on the coarsest).
    pub transfer: Option<GridTransfer>,
    /// Richardson weight used on this level, if Richardson smoothing.
    pub omega: Option<f64>,
    direct: OnceLock<Result<DirectSolver>>,
}

impl Level {
    fn new(matrix: BlockStructuredMatrix) -> Self {
        Level {
            matrix,
            transfer: None,
            omega: None,
            direct: OnceLock::new(),
        }
    }

    fn a(&self) -> &CsrMatrix {
        &self.matrix.matrix
    }

    fn direct_solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        match self.direct.get_or_init(|| DirectSolver::new(self.a())) {
            Ok(s) => s.solve(b),
            Err(e) => Err(e.clone()),
        }
    }
}

/// Galerkin hierarchy; level 0 is the finest. Immutable once built, so it can
/// be shared across threads (direct factorizations are created on first use).
#[derive(Debug)]
pub struct MultigridHierarchy {
    pub levels: Vec<Level>,
    pub smoother: SmootherSpec,
}

impl MultigridHierarchy {
    /// Coarsens at least once, then while the current level is larger than
    /// `coarsest_max` and `transfer_for` offers a transfer.
    pub fn build(
        fine: BlockStructuredMatrix,
        smoother: SmootherSpec,
        coarsest_max: usize,
        mut transfer_for: impl FnMut(usize, &BlockStructuredMatrix) -> Result<Option<GridTransfer>>,
    ) -> Result<Self> {
        if let SmootherKind::Richardson { omega } = smoother.kind {
            check_omega(&fine.matrix, omega)?;
        }
        let mut levels = vec![Level::new(fine)];
        loop {
            let cur = levels.last().expect("at least one level");
            if levels.len() >= 2 && cur.matrix.size() <= coarsest_max {
                break;
            }
            let Some(t) = transfer_for(levels.len() - 1, &cur.matrix)? else {
                break;
            };
            let coarse = galerkin(&cur.matrix, &t)?;
            levels.last_mut().expect("at least one level").transfer = Some(t);
            levels.push(Level::new(coarse));
        }
        if levels.len() < 2 {
            return Err(Error::Argument("fine level cannot be coarsened".into()));
        }
        if let SmootherKind::Richardson { omega } = smoother.kind {
            // Keep ω·||A_ℓ|| fixed so every level sits inside (0, 2/C_ℓ).
            let c0 = levels[0].a().gershgorin_bound();
            for lvl in levels.iter_mut() {
                lvl.omega = Some(omega * c0 / lvl.a().gershgorin_bound());
            }
        }
        Ok(MultigridHierarchy { levels, smoother })
    }

    /// Hierarchy with transfers taken from a fixed list, one per coarsening.
    pub fn from_transfers(
        fine: BlockStructuredMatrix,
        smoother: SmootherSpec,
        transfers: Vec<GridTransfer>,
    ) -> Result<Self> {
        let mut it = transfers.into_iter();
        Self::build(fine, smoother, 0, |_, _| Ok(it.next()))
    }

    pub fn fine(&self) -> &CsrMatrix {
        self.levels[0].a()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.matrix.size()).collect()
    }

    /// Every level admits a Cholesky factorization.
    pub fn validate(&self) -> Result<()> {
        for (k, l) in self.levels.iter().enumerate() {
            if !is_hpd(l.a()) {
                return Err(Error::Construction(format!(
                    "level {k} is not Hermitian positive definite"
                )));
            }
        }
        Ok(())
    }

    fn smoother_at(&self, level: usize) -> SmootherKind {
        match (self.smoother.kind, self.levels[level].omega) {
            (SmootherKind::Richardson { .. }, Some(omega)) => SmootherKind::Richardson { omega },
            (k, _) => k,
        }
    }

    fn correct(&self, level: usize, x: &mut [C64], b: &[C64], recurse: bool) -> Result<()> {
        let lvl = &self.levels[level];
        let t = lvl
            .transfer
            .as_ref()
            .ok_or_else(|| Error::Argument(format!("level {level} has no coarser level")))?;
        let r = residual(lvl.a(), x, b);
        let rc = t.matrix.adjoint().matvec(&r);
        let next = level + 1;
        let y = if recurse && self.levels[next].transfer.is_some() {
            let mut y = vec![C64::new(0.0, 0.0); rc.len()];
            self.vcycle_step(next, &mut y, &rc)?;
            y
        } else {
            self.levels[next].direct_solve(&rc)?
        };
        for (xi, pi) in x.iter_mut().zip(t.matrix.matvec(&y)) {
            *xi += pi;
        }
        Ok(())
    }

    /// One two-grid iteration on levels 0 and 1 with an exact coarse solve.
    pub fn tgm_step(&self, x: &mut [C64], b: &[C64]) -> Result<()> {
        let a = self.fine();
        let kind = self.smoother_at(0);
        smooth(a, x, b, kind, self.smoother.pre)?;
        self.correct(0, x, b, false)?;
        smooth(a, x, b, kind, self.smoother.post)
    }

    /// One V-cycle starting at `level`.
    pub fn vcycle_step(&self, level: usize, x: &mut [C64], b: &[C64]) -> Result<()> {
        let lvl = &self.levels[level];
        if lvl.transfer.is_none() {
            let sol = lvl.direct_solve(b)?;
            x.copy_from_slice(&sol);
            return Ok(());
        }
        let kind = self.smoother_at(level);
        smooth(lvl.a(), x, b, kind, self.smoother.pre)?;
        self.correct(level, x, b, true)?;
        smooth(lvl.a(), x, b, kind, self.smoother.post)
    }

    pub fn step(&self, cycle: Cycle, x: &mut [C64], b: &[C64]) -> Result<()> {
        match cycle {
            Cycle::TwoGrid => self.tgm_step(x, b),
            Cycle::VCycle => self.vcycle_step(0, x, b),
        }
    }

    /// Dense iteration matrix of one cycle (columns are the cycle applied to
    /// unit vectors with zero right-hand side).
    pub fn iteration_matrix(&self, cycle: Cycle) -> Result<CMat> {
        let n = self.fine().nrows();
        let zero = vec![C64::new(0.0, 0.0); n];
        let mut out = CMat::zeros(n, n);
        for j in 0..n {
            let mut x = zero.clone();
            x[j] = C64::new(1.0, 0.0);
            self.step(cycle, &mut x, &zero)?;
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveFlag {
    Diverged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutcome {
    #[serde(skip)]
    pub x: Vec<C64>,
    pub iterations: usize,
    pub converged: bool,
    pub flag: Option<SolveFlag>,
    /// Relative residuals, starting with 1 for the zero initial guess.
    pub residual_history: Vec<f64>,
}

impl SolveOutcome {
    pub fn final_residual(&self) -> f64 {
        *self
            .residual_history
            .last()
            .expect("history starts with the initial residual")
    }
}

/// Iterates `cycle` from `x0 = 0` until `||b - Ax|| <= tol ||b||`.
pub fn solve(
    h: &MultigridHierarchy,
    b: &[C64],
    tol: f64,
    max_iter: usize,
    cycle: Cycle,
) -> Result<SolveOutcome> {
    let a = h.fine();
    if b.len() != a.nrows() {
        return Err(Error::Dimension(format!(
            "rhs of length {} for size {}",
            b.len(),
            a.nrows()
        )));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::Config("need tol > 0 and max_iter > 0".into()));
    }
    let mut x = vec![C64::new(0.0, 0.0); b.len()];
    let r0 = vec_norm(b);
    if r0 == 0.0 {
        return Ok(SolveOutcome {
            x,
            iterations: 0,
            converged: true,
            flag: None,
            residual_history: vec![0.0],
        });
    }
    let mut history = vec![1.0];
    let mut streak = 0;
    let mut flag = None;
    let mut converged = false;
    for _ in 0..max_iter {
        h.step(cycle, &mut x, b)?;
        let rel = vec_norm(&residual(a, &x, b)) / r0;
        let prev = *history.last().expect("non-empty");
        history.push(rel);
        if rel <= tol {
            converged = true;
            break;
        }
        streak = if rel > DIVERGENCE_RATIO * prev {
            streak + 1
        } else {
            0
        };
        if streak >= DIVERGENCE_STREAK || !rel.is_finite() {
            flag = Some(SolveFlag::Diverged);
            break;
        }
    }
    if !converged && flag.is_none() {
        flag = Some(SolveFlag::MaxIterations);
    }
    Ok(SolveOutcome {
        x,
        iterations: history.len() - 1,
        converged,
        flag,
        residual_history: history,
    })
}

/// One explicit two-grid step with a dense coarse solve (oracle use).
pub fn tgm_step(
    a: &CsrMatrix,
    p: &CsrMatrix,
    x: &mut [C64],
    b: &[C64],
    spec: SmootherSpec,
) -> Result<()> {
    smooth(a, x, b, spec.kind, spec.pre)?;
    let r = residual(a, x, b);
    let ph = p.adjoint();
    let ac = ph.matmul(a)?.matmul(p)?.to_dense();
    let y = Lu::factor(&ac)?.solve_vec(&ph.matvec(&r))?;
    for (xi, v) in x.iter_mut().zip(p.matvec(&y)) {
        *xi += v;
    }
    smooth(a, x, b, spec.kind, spec.post)
}

/// `1 / ||f||_∞` estimated on a grid.
pub fn richardson_omega_from_symbol(f: &MatrixTrigPolynomial) -> Result<f64> {
    let n = if f.m() == 1 { 1024 } else { 64 };
    let s = f.sup_norm_on(&uniform_grid(f.m(), n))?;
    if s == 0.0 {
        return Err(Error::Argument("zero symbol".into()));
    }
    Ok(1.0 / s)
}

/// `1 / C` with `C` the Gershgorin bound of `A`.
pub fn richardson_omega_from_matrix(a: &CsrMatrix) -> Result<f64> {
    let c = a.gershgorin_bound();
    if c == 0.0 {
        return Err(Error::Argument("zero matrix".into()));
    }
    Ok(1.0 / c)
}

/// Smallest eigenvalue of `2I - ωA` (dense); positive when Richardson
/// smoothing with weight `ω` is a contraction in the energy norm.
pub fn richardson_positivity_margin(a: &CsrMatrix, omega: f64) -> Result<f64> {
    let n = a.nrows();
    let m = CMat::identity(n)
        .scale_real(2.0)
        .sub(&a.to_dense().scale_real(omega))?;
    Ok(crate::smallmat::eig_hermitian(&m)?.values[0])
}

/// `iteration,relative_residual` CSV.
pub fn residual_history_csv(history: &[f64]) -> String {
    let mut s = String::from("iteration,relative_residual\n");
    for (k, r) in history.iter().enumerate() {
        s.push_str(&format!("{k},{r:e}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structured::{assemble_toeplitz, assemble_transfer, Structure};
    use proptest::prelude::*;

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    fn laplacian() -> MatrixTrigPolynomial {
        MatrixTrigPolynomial::scalar(&[(-1, -1.0), (0, 2.0), (1, -1.0)])
    }

    fn linear() -> MatrixTrigPolynomial {
        MatrixTrigPolynomial::scalar(&[(-1, 1.0), (0, 2.0), (1, 1.0)])
    }

    fn toeplitz_hierarchy(n: usize, smoother: SmootherSpec, coarsest: usize) -> MultigridHierarchy {
        let a = assemble_toeplitz(&laplacian(), n).unwrap();
        MultigridHierarchy::build(a, smoother, coarsest, |_, m| {
            let nb = m.blocks[0];
            if nb < 3 {
                return Ok(None);
            }
            assemble_transfer(&linear(), nb, Structure::Toeplitz).map(Some)
        })
        .unwrap()
    }

    #[test]
    fn gauss_seidel_sweep() {
        let a = assemble_toeplitz(&laplacian(), 3).unwrap().matrix;
        let mut x = vec![c(0.0); 3];
        smooth(&a, &mut x, &[c(1.0); 3], SmootherKind::GaussSeidel, 1).unwrap();
        let got: Vec<f64> = x.iter().map(|v| v.re).collect();
        assert_eq!(got, vec![0.5, 0.75, 0.875]);
    }

    #[test]
    fn richardson_weight_is_validated() {
        let a = assemble_toeplitz(&laplacian(), 5).unwrap().matrix;
        let mut x = vec![c(0.0); 5];
        let b = vec![c(1.0); 5];
        assert!(matches!(
            smooth(&a, &mut x, &b, SmootherKind::Richardson { omega: 0.6 }, 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            smooth(&a, &mut x, &b, SmootherKind::Richardson { omega: -0.1 }, 1),
            Err(Error::Config(_))
        ));
        smooth(&a, &mut x, &b, SmootherKind::Richardson { omega: 0.25 }, 1).unwrap();
        assert!((richardson_omega_from_matrix(&a).unwrap() - 0.25).abs() < 1e-15);
        assert!((richardson_omega_from_symbol(&laplacian()).unwrap() - 0.25).abs() < 1e-12);
        assert!(richardson_positivity_margin(&a, 0.25).unwrap() > 0.0);
    }

    #[test]
    fn band_cholesky_solves() {
        let a = assemble_toeplitz(&laplacian(), 300).unwrap().matrix;
        let ch = BandCholesky::factor(&a).unwrap();
        let xs: Vec<C64> = (0..300).map(|i| c((i as f64 * 0.37).sin())).collect();
        let back = ch.solve(&a.matvec(&xs));
        let err = back
            .iter()
            .zip(&xs)
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8);
        let indefinite = a.scale(c(-1.0));
        assert!(!is_hpd(&indefinite));
    }

    #[test]
    fn vcycle_converges_on_laplacian() {
        let h = toeplitz_hierarchy(63, SmootherSpec::gauss_seidel(1, 1), 3);
        assert_eq!(h.sizes(), vec![63, 31, 15, 7, 3]);
        h.validate().unwrap();
        let b: Vec<C64> = (0..63).map(|i| c(1.0 + (i % 3) as f64)).collect();
        let out = solve(&h, &b, 1e-10, 100, Cycle::VCycle).unwrap();
        assert!(out.converged && out.iterations < 30, "{out:?}");
        let tg = solve(&h, &b, 1e-10, 100, Cycle::TwoGrid).unwrap();
        assert!(tg.converged && tg.iterations <= out.iterations);
        assert!(residual_history_csv(&out.residual_history)
            .starts_with("iteration,relative_residual\n0,1e0\n"));
    }

    #[test]
    fn iteration_cap_is_flagged() {
        let h = toeplitz_hierarchy(15, SmootherSpec::gauss_seidel(0, 0), 64);
        let out = solve(&h, &vec![c(1.0); 15], 1e-300, 3, Cycle::TwoGrid).unwrap();
        assert_eq!(out.flag, Some(SolveFlag::MaxIterations));
        assert_eq!(out.iterations, 3);
    }

    #[test]
    fn divergence_is_flagged() {
        // Strongly indefinite: Gauss-Seidel amplifies the error.
        let f = MatrixTrigPolynomial::scalar(&[(-1, 3.0), (0, 1.0), (1, 3.0)]);
        let a = assemble_toeplitz(&f, 31).unwrap();
        let h = MultigridHierarchy::build(a, SmootherSpec::gauss_seidel(1, 1), 64, |_, m| {
            assemble_transfer(&linear(), m.blocks[0], Structure::Toeplitz).map(Some)
        })
        .unwrap();
        let out = solve(&h, &vec![c(1.0); 31], 1e-8, 100, Cycle::TwoGrid).unwrap();
        assert_eq!(
            out.flag,
            Some(SolveFlag::Diverged),
            "{:?}",
            out.residual_history
        );
        assert!(!out.converged);
    }

    #[test]
    fn explicit_step_matches_hierarchy() {
        let h = toeplitz_hierarchy(15, SmootherSpec::gauss_seidel(1, 1), 64);
        let a = h.fine().clone();
        let p = h.levels[0].transfer.as_ref().unwrap().matrix.clone();
        let b: Vec<C64> = (0..15).map(|i| c(i as f64)).collect();
        let mut x1 = vec![c(0.0); 15];
        let mut x2 = x1.clone();
        h.tgm_step(&mut x1, &b).unwrap();
        tgm_step(&a, &p, &mut x2, &b, SmootherSpec::gauss_seidel(1, 1)).unwrap();
        let err = x1
            .iter()
            .zip(&x2)
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    fn energy(a: &CsrMatrix, e: &[C64]) -> f64 {
        crate::smallmat::dot(e, &a.matvec(e)).re.max(0.0).sqrt()
    }

    proptest! {
        #[test]
        fn energy_norm_decreases(seed in any::<u64>(), richardson in any::<bool>()) {
            use rand::{Rng, SeedableRng};
            let spec = if richardson { SmootherSpec::richardson(0.25, 1, 1) } else { SmootherSpec::gauss_seidel(1, 1) };
            let h = toeplitz_hierarchy(31, spec, 7);
            let a = h.fine().clone();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<C64> = (0..31).map(|_| c(rng.random_range(-1.0..1.0))).collect();
            let b = a.matvec(&xs);
            let mut x = vec![c(0.0); 31];
            let mut prev = energy(&a, &xs);
            for _ in 0..4 {
                h.vcycle_step(0, &mut x, &b).unwrap();
                let e: Vec<C64> = x.iter().zip(&xs).map(|(u, v)| u - v).collect();
                let now = energy(&a, &e);
                prop_assert!(now <= prev * (1.0 + 1e-12));
                prev = now;
            }
        }

        #[test]
        fn coarse_correction_is_energy_orthogonal_projector(n in prop::sample::select(vec![7usize, 15, 31])) {
            let a = assemble_toeplitz(&laplacian(), n).unwrap().matrix;
            let p = assemble_transfer(&linear(), n, Structure::Toeplitz).unwrap().matrix;
            let ad = a.to_dense();
            let pd = p.to_dense();
            let ac = pd.adjoint().matmul(&ad).unwrap().matmul(&pd).unwrap();
            let pi = pd.matmul(&crate::smallmat::solve(&ac, &pd.adjoint().matmul(&ad).unwrap()).unwrap()).unwrap();
            let cgc = CMat::identity(n).sub(&pi).unwrap();
            let sq = cgc.matmul(&cgc).unwrap();
            prop_assert!(sq.sub(&cgc).unwrap().norm_max() < 1e-10);
            let acgc = ad.matmul(&cgc).unwrap();
            prop_assert!(acgc.is_hermitian(1e-10));
        }
    }
}
