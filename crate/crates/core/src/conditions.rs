//! Numerical certification of a projector symbol `p` against a fine symbol
//! `f`: the three two-grid conditions, the V-cycle bound and the properties
//! of the coarse symbol `f̂`.
//!
//! Limits at the zero are estimated along dyadic steps `θ₀ ± 2^{-k}`. Steps
//! where `λ(f)` has sunk below `LIMIT_NOISE_REL` of the symbol scale are
//! discarded, since their ratios are rounding noise.

use crate::error::{Error, Result};
use crate::smallmat::{dot, eig_hermitian, singular_values, solve, vec_norm, CMat, C64};
use crate::symbol::{
    coarse_symbol, corner_sum, find_zero, uniform_grid, MatrixTrigPolynomial, SymbolZero,
};
use serde::Serialize;
use std::f64::consts::PI;

pub const POSITIVITY_REL: f64 = 1e-10;
pub const FIXED_POINT_TOL: f64 = 1e-9;
pub const OVERLAP_MIN: f64 = 0.6;
pub const LIMIT_STEPS: std::ops::RangeInclusive<i32> = 5..=25;
pub const LIMIT_TAIL: usize = 5;
pub const LIMIT_SPREAD_REL: f64 = 1e-2;
/// Spread of ratios near a zero limit is measured against at least this.
pub const LIMIT_SPREAD_FLOOR: f64 = 1e-3;
pub const LIMIT_BOUND: f64 = 1e8;
pub const LIMIT_NOISE_REL: f64 = 1e-10;
pub const EXCLUSION_RADIUS: f64 = 1e-3;
pub const FHAT_LIMIT_MIN: f64 = 1e-8;
const HYPOTHESIS_TOL: f64 = 1e-9;
const DET_MIN: f64 = 1e-12;
const ZERO_BRANCH_REL: f64 = 1e-13;

/// `s(θ) = p(θ) (Σ_{Ω(θ)} p^H p)^{-1} p(θ)^H`.
pub fn build_s(p: &MatrixTrigPolynomial, theta: &[f64]) -> Result<CMat> {
    let c = corner_sum(p, theta)?;
    let pv = p.evaluate(theta)?;
    let x = solve(&c, &pv.adjoint())?;
    Ok(pv.matmul(&x)?.hermitian_part())
}

/// Eigenvalue of a Hermitian matrix whose eigenvector overlaps most with `q`.
pub(crate) fn tracked_eigenvalue(m: &CMat, q: &[C64]) -> Result<(f64, f64)> {
    let e = eig_hermitian(m)?;
    let qn = vec_norm(q);
    let (k, ov) = (0..m.rows())
        .map(|k| (k, dot(&e.vector(k), q).norm() / qn))
        .fold((0, -1.0), |a, b| if b.1 > a.1 + 1e-12 { b } else { a });
    Ok((e.values[k], ov))
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitEstimate {
    /// `(h, ratio)` for the retained steps, approaching from above then below.
    pub plus: Vec<(f64, f64)>,
    pub minus: Vec<(f64, f64)>,
    /// Mean of the two innermost ratios.
    pub c: f64,
    /// Largest spread over the innermost `LIMIT_TAIL` ratios of either side.
    pub spread: f64,
    pub stabilized: bool,
    pub bounded: bool,
    /// Smallest eigenvector overlap met while tracking.
    pub min_overlap: f64,
}

impl LimitEstimate {
    pub fn pass(&self) -> bool {
        self.stabilized && self.bounded && self.min_overlap >= OVERLAP_MIN
    }
}

/// Dyadic estimate of `lim numer(θ)/denom(θ)` as `θ → θ₀` along `dir`.
/// Both callbacks return `(value, overlap)`; steps with `denom` below the
/// noise floor are skipped.
pub(crate) fn dyadic_limit(
    theta0: &[f64],
    dir: &[f64],
    noise_floor: f64,
    mut numer: impl FnMut(&[f64]) -> Result<(f64, f64)>,
    mut denom: impl FnMut(&[f64]) -> Result<(f64, f64)>,
) -> Result<LimitEstimate> {
    let dn = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut sides: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    let mut min_overlap = 1.0f64;
    for (s, sign) in [1.0, -1.0].into_iter().enumerate() {
        for k in LIMIT_STEPS {
            let h = 2f64.powi(-k);
            let t: Vec<f64> = theta0
                .iter()
                .zip(dir)
                .map(|(a, u)| a + sign * h * u / dn)
                .collect();
            let (den, o1) = denom(&t)?;
            if den <= noise_floor {
                continue;
            }
            let (num, o2) = numer(&t)?;
            min_overlap = min_overlap.min(o1).min(o2);
            sides[s].push((h, num / den));
        }
    }
    let tail = |v: &[(f64, f64)]| {
        v[v.len().saturating_sub(LIMIT_TAIL)..]
            .iter()
            .map(|p| p.1)
            .collect::<Vec<f64>>()
    };
    let (tp, tm) = (tail(&sides[0]), tail(&sides[1]));
    let enough = tp.len() == LIMIT_TAIL && tm.len() == LIMIT_TAIL;
    let spread_of = |v: &[f64]| {
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        if v.is_empty() {
            f64::INFINITY
        } else {
            hi - lo
        }
    };
    let spread = spread_of(&tp).max(spread_of(&tm));
    let c = match (tp.last(), tm.last()) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        _ => f64::NAN,
    };
    let bounded = enough
        && tp
            .iter()
            .chain(&tm)
            .all(|v| v.is_finite() && v.abs() < LIMIT_BOUND);
    let stabilized = enough && spread <= LIMIT_SPREAD_REL * c.abs().max(LIMIT_SPREAD_FLOOR);
    Ok(LimitEstimate {
        plus: sides[0].clone(),
        minus: sides[1].clone(),
        c,
        spread,
        stabilized,
        bounded,
        min_overlap,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionI {
    pub pass: bool,
    pub min_eig: f64,
    pub max_eig: f64,
    pub argmin: Vec<f64>,
}

/// Positive definiteness of the corner sum on a uniform grid.
pub fn check_condition_i(p: &MatrixTrigPolynomial) -> Result<ConditionI> {
    let n = if p.m() == 1 { 1024 } else { 64 };
    let (mut lo, mut hi, mut arg) = (f64::INFINITY, 0.0f64, Vec::new());
    for t in uniform_grid(p.m(), n) {
        let e = eig_hermitian(&corner_sum(p, &t)?)?.values;
        if e[0] < lo {
            lo = e[0];
            arg = t.clone();
        }
        hi = hi.max(e[e.len() - 1]);
    }
    Ok(ConditionI {
        pass: lo > POSITIVITY_REL * hi,
        min_eig: lo,
        max_eig: hi,
        argmin: arg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FixedPointRoute {
    /// `p(θ₀)q = λ¹q`, `p(θ₀+π)q = 0`, `p(θ₀)^H q = λ²q`.
    Eigenvector,
    /// `p(θ₀)q = λ¹q`, `p(θ₀+π)q = 0`, `det p(θ₀) ≠ 0`.
    Nonsingular,
    /// Only the direct check `s(θ₀)q = q` applies.
    Direct,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionII {
    pub pass: bool,
    pub defect: f64,
    pub route: FixedPointRoute,
    pub lambda1: [f64; 2],
    pub lambda2: [f64; 2],
    pub eig_defect: f64,
    pub pi_defect: f64,
    pub adjoint_defect: f64,
    pub det_abs: f64,
}

pub fn check_condition_ii(p: &MatrixTrigPolynomial, zero: &SymbolZero) -> Result<ConditionII> {
    let t0 = &zero.theta0;
    let q = &zero.q;
    let s = build_s(p, t0)?;
    let sq = s.matvec(q)?;
    let defect = vec_norm(&sq.iter().zip(q).map(|(a, b)| a - b).collect::<Vec<_>>());
    let p0 = p.evaluate(t0)?;
    let ppi = p.evaluate(&t0.iter().map(|v| v + PI).collect::<Vec<_>>())?;
    let dev = |m: &CMat| -> Result<(C64, f64)> {
        let mq = m.matvec(q)?;
        let lam = dot(q, &mq);
        Ok((
            lam,
            vec_norm(
                &mq.iter()
                    .zip(q)
                    .map(|(a, b)| a - lam * b)
                    .collect::<Vec<_>>(),
            ),
        ))
    };
    let (l1, eig_defect) = dev(&p0)?;
    let (l2, adjoint_defect) = dev(&p0.adjoint())?;
    let pi_defect = vec_norm(&ppi.matvec(q)?);
    let det_abs = crate::smallmat::det(&p0)?.norm();
    let route = if eig_defect <= HYPOTHESIS_TOL
        && pi_defect <= HYPOTHESIS_TOL
        && adjoint_defect <= HYPOTHESIS_TOL
    {
        FixedPointRoute::Eigenvector
    } else if eig_defect <= HYPOTHESIS_TOL && pi_defect <= HYPOTHESIS_TOL && det_abs > DET_MIN {
        FixedPointRoute::Nonsingular
    } else {
        FixedPointRoute::Direct
    };
    Ok(ConditionII {
        pass: defect <= FIXED_POINT_TOL,
        defect,
        route,
        lambda1: [l1.re, l1.im],
        lambda2: [l2.re, l2.im],
        eig_defect,
        pi_defect,
        adjoint_defect,
        det_abs,
    })
}

fn shifted(t: &[f64]) -> Vec<f64> {
    t.iter().map(|v| v + PI).collect()
}

fn axis_dir(m: usize) -> Vec<f64> {
    let mut d = vec![0.0; m];
    d[0] = 1.0;
    d
}

fn smallest_singular(p: &MatrixTrigPolynomial, t: &[f64]) -> Result<f64> {
    Ok(*singular_values(&p.evaluate(t)?).last().expect("non-empty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitRoute {
    Direct,
    Surrogate,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionIII {
    pub pass: bool,
    pub route: LimitRoute,
    /// `(1 - λ(s(θ))) / λ(f(θ))`.
    pub direct: LimitEstimate,
    /// `σ_min(p(θ+π))² / λ(f(θ))`, valid when `λ¹ = λ²`.
    pub surrogate: LimitEstimate,
}

pub fn check_condition_iii(
    f: &MatrixTrigPolynomial,
    p: &MatrixTrigPolynomial,
    zero: &SymbolZero,
) -> Result<ConditionIII> {
    let q = &zero.q;
    let floor = LIMIT_NOISE_REL * zero.scale;
    let dir = axis_dir(f.m());
    let denom = |t: &[f64]| tracked_eigenvalue(&f.evaluate(t)?, q);
    let direct = dyadic_limit(
        &zero.theta0,
        &dir,
        floor,
        |t| {
            let (l, o) = tracked_eigenvalue(&build_s(p, t)?, q)?;
            Ok((1.0 - l, o))
        },
        denom,
    )?;
    let surrogate = dyadic_limit(
        &zero.theta0,
        &dir,
        floor,
        |t| Ok((smallest_singular(p, &shifted(t))?.powi(2), 1.0)),
        denom,
    )?;
    let ii = check_condition_ii(p, zero)?;
    let same_lambda = (ii.lambda1[0] - ii.lambda2[0]).abs() + (ii.lambda1[1] - ii.lambda2[1]).abs()
        <= HYPOTHESIS_TOL
        && ii.route == FixedPointRoute::Eigenvector;
    let route = if direct.pass() {
        LimitRoute::Direct
    } else if same_lambda && surrogate.pass() {
        LimitRoute::Surrogate
    } else {
        LimitRoute::None
    };
    Ok(ConditionIII {
        pass: route != LimitRoute::None,
        route,
        direct,
        surrogate,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VCycleBound {
    pub pass: bool,
    /// `σ_min(p(θ+π)) / λ(f(θ))`.
    pub limit: LimitEstimate,
    /// `p(θ+π)` is singular along every sampled step.
    pub zero_branch: bool,
}

pub fn check_vcycle_bound(
    f: &MatrixTrigPolynomial,
    p: &MatrixTrigPolynomial,
    zero: &SymbolZero,
) -> Result<VCycleBound> {
    let q = &zero.q;
    let floor = LIMIT_NOISE_REL * zero.scale;
    let pscale = p
        .coeffs()
        .values()
        .map(|c| c.norm_fro())
        .sum::<f64>()
        .max(1.0);
    let mut all_zero = true;
    let limit = dyadic_limit(
        &zero.theta0,
        &axis_dir(f.m()),
        floor,
        |t| {
            let s = smallest_singular(p, &shifted(t))?;
            all_zero &= s <= ZERO_BRANCH_REL * pscale;
            Ok((s, 1.0))
        },
        |t| tracked_eigenvalue(&f.evaluate(t)?, q),
    )?;
    Ok(VCycleBound {
        pass: limit.pass(),
        limit,
        zero_branch: all_zero,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FhatReport {
    pub hermitian: bool,
    pub min_eig: f64,
    pub nonnegative: bool,
    /// `||f̂(2θ₀) q||`.
    pub zero_defect: f64,
    pub vanishes_at_zero: bool,
    /// Smallest eigenvalue outside the exclusion ball around `2θ₀`.
    pub min_eig_away: f64,
    pub positive_away: bool,
    /// `λ(f̂(2θ)) / λ(f(θ))`.
    pub limit: LimitEstimate,
    pub limit_pass: bool,
    pub pass: bool,
}

fn periodic_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

pub fn check_fhat_properties(
    f: &MatrixTrigPolynomial,
    p: &MatrixTrigPolynomial,
    zero: &SymbolZero,
) -> Result<FhatReport> {
    let fh = coarse_symbol(f, p)?;
    let m = f.m();
    let hermitian = fh.is_hermitian();
    let n = if m == 1 { 1024 } else { 64 };
    let t2: Vec<f64> = zero.theta0.iter().map(|v| 2.0 * v).collect();
    let (mut min_eig, mut min_away, mut scale) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for t in uniform_grid(m, n) {
        let e = eig_hermitian(&fh.evaluate(&t)?)?.values;
        min_eig = min_eig.min(e[0]);
        scale = scale.max(e[e.len() - 1].abs());
        let dist = t
            .iter()
            .zip(&t2)
            .map(|(a, b)| periodic_distance(*a, *b))
            .fold(0.0, f64::max);
        if dist > EXCLUSION_RADIUS {
            min_away = min_away.min(e[0]);
        }
    }
    let zero_defect = vec_norm(&fh.evaluate(&t2)?.matvec(&zero.q)?);
    let q = &zero.q;
    let limit = dyadic_limit(
        &zero.theta0,
        &axis_dir(m),
        LIMIT_NOISE_REL * zero.scale,
        |t| {
            tracked_eigenvalue(
                &fh.evaluate(&t.iter().map(|v| 2.0 * v).collect::<Vec<_>>())?,
                q,
            )
        },
        |t| tracked_eigenvalue(&f.evaluate(t)?, q),
    )?;
    let nonnegative = min_eig >= -POSITIVITY_REL * scale;
    let vanishes_at_zero = zero_defect <= POSITIVITY_REL * scale.max(1.0);
    let positive_away = min_away > POSITIVITY_REL * scale;
    let limit_pass = limit.pass() && limit.c > FHAT_LIMIT_MIN;
    Ok(FhatReport {
        hermitian,
        min_eig,
        nonnegative,
        zero_defect,
        vanishes_at_zero,
        min_eig_away: min_away,
        positive_away,
        limit,
        limit_pass,
        pass: hermitian && nonnegative && vanishes_at_zero && positive_away && limit_pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub zero: SymbolZero,
    pub condition_i: ConditionI,
    pub condition_ii: ConditionII,
    pub condition_iii: ConditionIII,
    pub vcycle_bound: VCycleBound,
    pub fhat: FhatReport,
    pub tgm_certified: bool,
    pub vcycle_certified: bool,
}

impl ConditionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn full_report(f: &MatrixTrigPolynomial, p: &MatrixTrigPolynomial) -> Result<ConditionReport> {
    if f.d() != p.d() || f.m() != p.m() {
        return Err(Error::Dimension("f and p must share d and m".into()));
    }
    let zero = find_zero(f)?;
    let condition_i = check_condition_i(p)?;
    let condition_ii = check_condition_ii(p, &zero)?;
    let condition_iii = check_condition_iii(f, p, &zero)?;
    let vcycle_bound = check_vcycle_bound(f, p, &zero)?;
    let fhat = check_fhat_properties(f, p, &zero)?;
    let tgm_certified = condition_i.pass && condition_ii.pass && condition_iii.pass;
    let vcycle_certified = tgm_certified && vcycle_bound.pass && fhat.pass;
    Ok(ConditionReport {
        zero,
        condition_i,
        condition_ii,
        condition_iii,
        vcycle_bound,
        fhat,
        tgm_certified,
        vcycle_certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::femgen::{build_geometric_symbol, build_linear_interp_symbol, extract_symbol};
    use proptest::prelude::*;

    fn scalar(c: &[(i32, f64)]) -> MatrixTrigPolynomial {
        MatrixTrigPolynomial::scalar(c)
    }

    fn laplacian() -> MatrixTrigPolynomial {
        scalar(&[(-1, -1.0), (0, 2.0), (1, -1.0)])
    }

    #[test]
    fn s_at_zero_for_linear_quadratic() {
        let s = build_s(&build_linear_interp_symbol(2).unwrap(), &[0.0]).unwrap();
        let want = CMat::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(s.sub(&want).unwrap().norm_max() < 1e-14);
    }

    #[test]
    fn condition_i_for_linear_quadratic() {
        let c = check_condition_i(&build_linear_interp_symbol(2).unwrap()).unwrap();
        assert!(c.pass);
        assert!((c.min_eig - 8.0).abs() < 1e-10);
    }

    #[test]
    fn identity_projector_fails_fixed_point() {
        let f = extract_symbol(2).unwrap();
        let z = find_zero(&f).unwrap();
        let ii = check_condition_ii(&MatrixTrigPolynomial::identity(2, 1), &z).unwrap();
        assert!(!ii.pass);
        assert!((ii.defect - 0.5).abs() < 1e-12);
    }

    #[test]
    fn linear_quadratic_fixed_point_route() {
        let f = extract_symbol(2).unwrap();
        let z = find_zero(&f).unwrap();
        let ii = check_condition_ii(&build_linear_interp_symbol(2).unwrap(), &z).unwrap();
        assert!(ii.pass);
        assert_eq!(ii.route, FixedPointRoute::Eigenvector);
        assert!((ii.lambda1[0] - 4.0).abs() < 1e-12 && (ii.lambda2[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn injection_fails_condition_iii() {
        let f = laplacian();
        let z = find_zero(&f).unwrap();
        let iii = check_condition_iii(&f, &MatrixTrigPolynomial::identity(1, 1), &z).unwrap();
        assert!(!iii.pass);
        assert!(!iii.direct.stabilized);
    }

    #[test]
    fn geometric_linear_bound_is_half() {
        let f = laplacian();
        let z = find_zero(&f).unwrap();
        let v = check_vcycle_bound(&f, &scalar(&[(-1, 0.5), (0, 1.0), (1, 0.5)]), &z).unwrap();
        assert!(v.pass);
        assert!((v.limit.c - 0.5).abs() < 1e-6, "{}", v.limit.c);
    }

    #[test]
    fn fourth_order_zero_breaks_vcycle_bound() {
        let f = laplacian().mul(&laplacian()).unwrap();
        let z = find_zero(&f).unwrap();
        let v = check_vcycle_bound(&f, &scalar(&[(-1, 1.0), (0, 2.0), (1, 1.0)]), &z).unwrap();
        assert!(!v.pass);
    }

    #[test]
    fn fhat_limit_for_scalar_laplacian() {
        let f = laplacian();
        let z = find_zero(&f).unwrap();
        let r = check_fhat_properties(&f, &scalar(&[(-1, 1.0), (0, 2.0), (1, 1.0)]), &z).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.limit.c - 8.0).abs() < 1e-5);
    }

    #[test]
    fn linear_quadratic_is_vcycle_certified() {
        let rep = full_report(
            &extract_symbol(2).unwrap(),
            &build_linear_interp_symbol(2).unwrap(),
        )
        .unwrap();
        assert!(
            rep.tgm_certified && rep.vcycle_certified,
            "{}",
            rep.to_json()
        );
        assert!(rep.vcycle_bound.zero_branch);
        assert_eq!(rep.condition_iii.route, LimitRoute::Direct);
        assert!(rep.condition_iii.direct.c.abs() < 1e-4);
    }

    #[test]
    fn geometric_projectors_certify() {
        for r in 1..=3 {
            let rep = full_report(
                &extract_symbol(r).unwrap(),
                &build_geometric_symbol(r).unwrap(),
            )
            .unwrap();
            assert!(rep.tgm_certified, "r = {r}: {}", rep.to_json());
        }
    }

    #[test]
    fn condition_i_minimum_for_geometric_linear() {
        let c = check_condition_i(&scalar(&[(-1, 0.5), (0, 1.0), (1, 0.5)])).unwrap();
        assert!((c.min_eig - 2.0).abs() < 1e-12 && (c.argmin[0] - PI / 2.0).abs() < 1e-12);
        let zero = MatrixTrigPolynomial::constant(CMat::zeros(1, 1), 1).unwrap();
        assert!(!check_condition_i(&zero).unwrap().pass);
    }

    #[test]
    fn geometric_quadratic_uses_nonsingular_route() {
        let z = find_zero(&extract_symbol(2).unwrap()).unwrap();
        let ii = check_condition_ii(&build_geometric_symbol(2).unwrap(), &z).unwrap();
        assert!(ii.pass);
        assert_eq!(ii.route, FixedPointRoute::Nonsingular);
    }

    #[test]
    fn odd_degree_linear_surrogate_route() {
        for r in [1, 3] {
            let f = extract_symbol(r).unwrap();
            let z = find_zero(&f).unwrap();
            let iii = check_condition_iii(&f, &build_linear_interp_symbol(r).unwrap(), &z).unwrap();
            assert!(iii.pass && iii.surrogate.pass(), "r = {r}: {iii:?}");
        }
    }

    #[test]
    fn even_degree_linear_s_is_idempotent() {
        for r in [2, 4] {
            let p = build_linear_interp_symbol(r).unwrap();
            for t in uniform_grid(1, 1024) {
                let s = build_s(&p, &t).unwrap();
                assert!(
                    s.matmul(&s).unwrap().sub(&s).unwrap().norm_fro() <= 1e-9,
                    "r = {r}, θ = {}",
                    t[0]
                );
            }
        }
    }

    #[test]
    fn identity_projector_fhat_does_not_vanish() {
        let f = laplacian();
        let z = find_zero(&f).unwrap();
        let r = check_fhat_properties(&f, &MatrixTrigPolynomial::identity(1, 1), &z).unwrap();
        assert!(!r.vanishes_at_zero && !r.pass);
        assert!((r.zero_defect - 2.0).abs() < 1e-12);
    }

    #[test]
    fn linear_quadratic_fhat_items_pass() {
        let f = extract_symbol(2).unwrap();
        let z = find_zero(&f).unwrap();
        let r = check_fhat_properties(&f, &build_linear_interp_symbol(2).unwrap(), &z).unwrap();
        assert!(r.pass, "{r:?}");
    }

    proptest! {
        #[test]
        fn s_spectrum_in_unit_interval(t in -PI..PI, r in 1usize..=4, geometric in any::<bool>()) {
            let p = if geometric { build_geometric_symbol(r).unwrap() } else { build_linear_interp_symbol(r).unwrap() };
            let s = build_s(&p, &[t]).unwrap();
            prop_assert!(s.is_hermitian(1e-12));
            let e = eig_hermitian(&s).unwrap().values;
            prop_assert!(e[0] >= -1e-12 && e[e.len() - 1] <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn report_json_is_deterministic() {
        let f = extract_symbol(1).unwrap();
        let p = build_linear_interp_symbol(1).unwrap();
        let a = full_report(&f, &p).unwrap().to_json();
        let b = full_report(&f, &p).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"tgm_certified\": true"));
    }
}
