//! Tensor-product (multilevel) transfers, the 2D FEM model problem and the
//! factorized certification of tensor projectors.

use crate::conditions::{
    build_s, dyadic_limit, full_report, tracked_eigenvalue, ConditionReport, LimitEstimate,
    FIXED_POINT_TOL, LIMIT_NOISE_REL, LIMIT_SPREAD_FLOOR, OVERLAP_MIN, POSITIVITY_REL,
};
use crate::error::{Error, Result};
use crate::femgen::{
    assemble_mass, assemble_stiffness, build_fem_transfer, extract_mass_symbol, extract_symbol,
    Coefficient, FemProblem1D, KnotGrid, TransferKind,
};
use crate::mgsolve::{MultigridHierarchy, SmootherSpec};
use crate::smallmat::{dot, eig_hermitian, vec_norm, CMat, C64};
use crate::sparse::CsrMatrix;
use crate::structured::{
    assemble_transfer_ml, cutting_matrix, BlockStructuredMatrix, GridTransfer, Parity, Structure,
};
use crate::symbol::{
    corner_sum, find_zero, tensor_symbol, uniform_grid, MatrixTrigPolynomial, SymbolZero,
};
use serde::Serialize;
use std::f64::consts::PI;

/// Kept 0-based multi-indices of the Toeplitz tensor cutting, row-major.
pub fn tensor_cutting(ns: &[usize]) -> Result<Vec<Vec<usize>>> {
    let per: Vec<Vec<usize>> = ns
        .iter()
        .map(|&n| cutting_matrix(n, Parity::EvenRows))
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::new()];
    for axis in &per {
        out = out
            .into_iter()
            .flat_map(|pre| axis.iter().map(move |&i| [pre.clone(), vec![i]].concat()))
            .collect();
    }
    Ok(out)
}

/// `perm[new] = old`, taking the index of `A_1 ⊗ ... ⊗ A_m` (factor `ℓ` has
/// `ns[ℓ]` blocks of size `ds[ℓ]`) to the block-major multilevel index.
pub fn kron_to_block_major(ns: &[usize], ds: &[usize]) -> Vec<usize> {
    let m = ns.len();
    let total: usize = ns.iter().zip(ds).map(|(n, d)| n * d).product();
    let dtot: usize = ds.iter().product();
    (0..total)
        .map(|new| {
            let (mut blk, mut loc) = (new / dtot, new % dtot);
            let mut b = vec![0; m];
            let mut l = vec![0; m];
            for a in (0..m).rev() {
                b[a] = blk % ns[a];
                blk /= ns[a];
                l[a] = loc % ds[a];
                loc /= ds[a];
            }
            (0..m).fold(0, |acc, a| acc * ns[a] * ds[a] + b[a] * ds[a] + l[a])
        })
        .collect()
}

/// `P = T_n(p_1 ⊗ ... ⊗ p_m) (K_n ⊗ I)` in block-major ordering.
pub fn tensor_transfer(ps: &[MatrixTrigPolynomial], ns: &[usize]) -> Result<GridTransfer> {
    if ps.len() != ns.len() || ps.iter().any(|p| p.m() != 1) {
        return Err(Error::Dimension(
            "need one univariate factor per direction".into(),
        ));
    }
    assemble_transfer_ml(&tensor_symbol(ps)?, ns, Structure::Toeplitz)
}

/// `K ⊗ M + M ⊗ K` on the unit square with `2^t` elements of degree `r`
/// per direction, normalized like the 1D matrices.
#[derive(Debug, Clone)]
pub struct TensorProblem {
    pub r: usize,
    pub n: usize,
    pub matrix: CsrMatrix,
    /// `f ⊗ h + h ⊗ f` with `f` the stiffness and `h` the mass symbol.
    pub symbol: MatrixTrigPolynomial,
}

pub const MAX_TENSOR_DEGREE: usize = 3;
pub const MAX_TENSOR_LEVEL: u32 = 7;

pub fn tensor_symbol_2d(r: usize) -> Result<MatrixTrigPolynomial> {
    let f = extract_symbol(r)?;
    let h = extract_mass_symbol(r)?;
    f.tensor(&h).add(&h.tensor(&f))
}

pub fn assemble_2d_problem(r: usize, t: u32) -> Result<TensorProblem> {
    if r == 0 || r > MAX_TENSOR_DEGREE || t == 0 || t > MAX_TENSOR_LEVEL {
        return Err(Error::Argument(format!(
            "2D problem needs 1 <= r <= {MAX_TENSOR_DEGREE} and 1 <= t <= {MAX_TENSOR_LEVEL}"
        )));
    }
    let n = 1usize << t;
    let k = assemble_stiffness(&FemProblem1D::new(Coefficient::One, r, n)?)?;
    let m = assemble_mass(&KnotGrid::new(r, n)?)?;
    let matrix = k.kron(&m).add(&m.kron(&k))?;
    Ok(TensorProblem {
        r,
        n,
        matrix,
        symbol: tensor_symbol_2d(r)?,
    })
}

/// Galerkin hierarchy for the 2D problem with `P ⊗ P` transfers.
pub fn tensor_fem_hierarchy(
    r: usize,
    t: u32,
    kind: TransferKind,
    smoother: SmootherSpec,
    coarsest_max: usize,
) -> Result<MultigridHierarchy> {
    let prob = assemble_2d_problem(r, t)?;
    let fine = BlockStructuredMatrix {
        structure: Structure::General,
        d: r * r,
        blocks: vec![prob.n, prob.n],
        matrix: prob.matrix,
    };
    MultigridHierarchy::build(fine, smoother, coarsest_max, |_, a| {
        let n = a.blocks[0];
        if n < 2 || n % 2 != 0 || r * (n / 2) < 2 {
            return Ok(None);
        }
        let p = build_fem_transfer(r, n, kind)?;
        let matrix = p.matrix.kron(&p.matrix);
        Ok(Some(GridTransfer {
            symbol: None,
            parity: None,
            fine_size: matrix.nrows(),
            coarse_size: matrix.ncols(),
            coarse_blocks: vec![n / 2, n / 2],
            matrix,
        }))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionalLimit {
    pub angle: f64,
    pub limit: LimitEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultilevelReport {
    pub zero: SymbolZero,
    pub corner_min_eig: f64,
    pub corner_max_eig: f64,
    pub positivity: bool,
    /// Largest deviation of the tensor corner sum from the product of factors.
    pub corner_factorization_defect: f64,
    /// Largest deviation of `s` from the Kronecker product of factor `s`.
    pub s_factorization_defect: f64,
    /// `||s(θ₀) q - q||` with `q = q_1 ⊗ ... ⊗ q_m`.
    pub fixed_point_defect: f64,
    /// `|<q_1 ⊗ ... ⊗ q_m, q>|` against the zero eigenvector of `f`.
    pub alignment: f64,
    pub directional: Vec<DirectionalLimit>,
    /// `(max c - min c) / max(|c|, floor)` over the directions; measured only.
    pub directional_spread: f64,
    pub factor_reports: Vec<ConditionReport>,
    pub tgm_certified: bool,
    /// All factor pairs are V-cycle certified. This does not prove V-cycle
    /// optimality of the tensor problem.
    pub vcycle_heuristic: bool,
}

const FACTORIZATION_GRID: usize = 16;
const DIRECTIONS: usize = 8;

fn kron_all(ms: &[CMat]) -> CMat {
    ms[1..].iter().fold(ms[0].clone(), |acc, m| acc.kron(m))
}

fn kron_vecs(vs: &[Vec<C64>]) -> Vec<C64> {
    vs[1..].iter().fold(vs[0].clone(), |acc, v| {
        acc.iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect()
    })
}

/// Checks a tensor projector `p_1 ⊗ ... ⊗ p_m` against the multivariate
/// symbol `f`, with `factors[ℓ] = (f_ℓ, p_ℓ)` the univariate pairs.
pub fn check_multilevel_conditions(
    factors: &[(MatrixTrigPolynomial, MatrixTrigPolynomial)],
    f: &MatrixTrigPolynomial,
) -> Result<MultilevelReport> {
    let m = factors.len();
    if m == 0 || f.m() != m {
        return Err(Error::Dimension(format!(
            "{m} factors for a symbol in {} variables",
            f.m()
        )));
    }
    let ps: Vec<MatrixTrigPolynomial> = factors.iter().map(|(_, p)| p.clone()).collect();
    let p = tensor_symbol(&ps)?;
    if p.d() != f.d() {
        return Err(Error::Dimension(format!(
            "tensor projector has d = {}, symbol has d = {}",
            p.d(),
            f.d()
        )));
    }
    let zero = find_zero(f)?;
    let factor_zeros: Vec<SymbolZero> = factors
        .iter()
        .map(|(fl, _)| find_zero(fl))
        .collect::<Result<_>>()?;
    let qt = kron_vecs(&factor_zeros.iter().map(|z| z.q.clone()).collect::<Vec<_>>());

    let (mut lo, mut hi, mut corner_def, mut s_def) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for t in uniform_grid(m, FACTORIZATION_GRID) {
        let c = corner_sum(&p, &t)?;
        let e = eig_hermitian(&c)?.values;
        lo = lo.min(e[0]);
        hi = hi.max(e[e.len() - 1]);
        let cf: Vec<CMat> = ps
            .iter()
            .zip(&t)
            .map(|(pl, &tl)| corner_sum(pl, &[tl]))
            .collect::<Result<_>>()?;
        corner_def = corner_def.max(c.sub(&kron_all(&cf))?.norm_max());
        let sf: Vec<CMat> = ps
            .iter()
            .zip(&t)
            .map(|(pl, &tl)| build_s(pl, &[tl]))
            .collect::<Result<_>>()?;
        s_def = s_def.max(build_s(&p, &t)?.sub(&kron_all(&sf))?.norm_max());
    }
    let sq = build_s(&p, &zero.theta0)?.matvec(&qt)?;
    let fixed_point_defect = vec_norm(&sq.iter().zip(&qt).map(|(a, b)| a - b).collect::<Vec<_>>());
    let alignment = dot(&qt, &zero.q).norm() / vec_norm(&qt);

    let floor = LIMIT_NOISE_REL * zero.scale;
    let directional = (0..DIRECTIONS)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / DIRECTIONS as f64;
            let mut dir = vec![0.0; m];
            dir[0] = angle.cos();
            if m > 1 {
                dir[1] = angle.sin();
            }
            let limit = dyadic_limit(
                &zero.theta0,
                &dir,
                floor,
                |t| {
                    let (l, o) = tracked_eigenvalue(&build_s(&p, t)?, &qt)?;
                    Ok((1.0 - l, o))
                },
                |t| tracked_eigenvalue(&f.evaluate(t)?, &qt),
            )?;
            Ok(DirectionalLimit { angle, limit })
        })
        .collect::<Result<Vec<_>>>()?;
    let (clo, chi) = directional
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), d| {
            (a.min(d.limit.c), b.max(d.limit.c))
        });
    let directional_spread = (chi - clo) / chi.abs().max(clo.abs()).max(LIMIT_SPREAD_FLOOR);
    let factor_reports: Vec<ConditionReport> = factors
        .iter()
        .map(|(fl, pl)| full_report(fl, pl))
        .collect::<Result<_>>()?;

    let positivity = lo > POSITIVITY_REL * hi;
    let tgm_certified = positivity
        && fixed_point_defect <= FIXED_POINT_TOL
        && alignment >= OVERLAP_MIN
        && directional.iter().all(|d| d.limit.pass());
    let vcycle_heuristic = tgm_certified && factor_reports.iter().all(|r| r.vcycle_certified);
    Ok(MultilevelReport {
        zero,
        corner_min_eig: lo,
        corner_max_eig: hi,
        positivity,
        corner_factorization_defect: corner_def,
        s_factorization_defect: s_def,
        fixed_point_defect,
        alignment,
        directional,
        directional_spread,
        factor_reports,
        tgm_certified,
        vcycle_heuristic,
    })
}
