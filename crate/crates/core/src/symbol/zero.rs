use super::{corners, uniform_grid, MatrixTrigPolynomial};
use crate::error::{Error, Result};
use crate::smallmat::{eig_hermitian, C64};
use serde::Serialize;
use std::f64::consts::PI;

pub const ZERO_GRID_1D: usize = 1024;
const NONNEG_REL: f64 = 1e-10;
const ZERO_REL: f64 = 1e-10;
const EXACT_ZERO_REL: f64 = 1e-12;
const VANISH_REL: f64 = 1e-8;
const ORDER_SCALES: std::ops::RangeInclusive<i32> = 2..=20;
const ORDER_FIT_POINTS: usize = 8;
const ORDER_MIN_POINTS: usize = 3;
const ORDER_MISFIT: f64 = 0.2;
/// Samples below this fraction of the symbol scale are dominated by rounding.
const ORDER_NOISE_REL: f64 = 1e-10;

/// Location and shape of the unique zero of a nonnegative Hermitian symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolZero {
    pub theta0: Vec<f64>,
    /// 1-based index of the vanishing eigenvalue in ascending order.
    pub jbar: usize,
    /// Unit eigenvector of `f(θ₀)` for the vanishing eigenvalue, phase fixed
    /// so that its largest entry is real and positive.
    #[serde(serialize_with = "crate::serialize_cvec")]
    pub q: Vec<C64>,
    /// Even order of the zero along the first axis.
    pub order: usize,
    /// Fitted log-log slope behind `order`.
    pub slope: f64,
    /// `max |λ(f)|` on the search grid.
    pub scale: f64,
}

fn grid_size(m: usize) -> usize {
    match m {
        1 => ZERO_GRID_1D,
        2 => 128,
        _ => 16,
    }
}

fn lambda_min(f: &MatrixTrigPolynomial, theta: &[f64]) -> Result<f64> {
    Ok(f.eigenvalues(theta)?[0])
}

fn golden_section(
    mut a: f64,
    mut b: f64,
    mut g: impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (g(x1)?, g(x2)?);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = g(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = g(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Counts groups of flagged grid points, with periodic adjacency in every
/// direction (Chebyshev distance one).
fn count_clusters(flags: &[bool], n: usize, m: usize) -> usize {
    let mut seen = vec![false; flags.len()];
    let mut clusters = 0;
    let unravel = |mut idx: usize| {
        let mut out = vec![0usize; m];
        for l in (0..m).rev() {
            out[l] = idx % n;
            idx /= n;
        }
        out
    };
    let ravel = |ix: &[usize]| ix.iter().fold(0usize, |acc, &v| acc * n + v);
    for start in 0..flags.len() {
        if !flags[start] || seen[start] {
            continue;
        }
        clusters += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(cur) = stack.pop() {
            let base = unravel(cur);
            for offs in 0..3usize.pow(m as u32) {
                let mut nb = base.clone();
                let mut o = offs;
                for v in nb.iter_mut() {
                    *v = (*v + n + o % 3 - 1) % n;
                    o /= 3;
                }
                let k = ravel(&nb);
                if flags[k] && !seen[k] {
                    seen[k] = true;
                    stack.push(k);
                }
            }
        }
    }
    clusters
}

/// Locates the zero of `λ_min(f)` by a grid scan and golden-section
/// refinement, then estimates its order.
pub fn find_zero(f: &MatrixTrigPolynomial) -> Result<SymbolZero> {
    if !f.is_hermitian() {
        return Err(Error::Argument(
            "zero search needs a Hermitian symbol".into(),
        ));
    }
    let m = f.m();
    let n = grid_size(m);
    let grid = uniform_grid(m, n);
    let mut lmin = Vec::with_capacity(grid.len());
    let mut scale = 0.0f64;
    for t in &grid {
        let e = f.eigenvalues(t)?;
        scale = scale.max(e[0].abs()).max(e[e.len() - 1].abs());
        lmin.push(e[0]);
    }
    if scale == 0.0 {
        return Err(Error::DegenerateZero { count: f.d() });
    }
    let (kbest, &vbest) = lmin
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is not empty");
    if vbest < -NONNEG_REL * scale {
        return Err(Error::NotNonnegative { min_eig: vbest });
    }
    let flags: Vec<bool> = lmin.iter().map(|&v| v <= ZERO_REL * scale).collect();
    let clusters = count_clusters(&flags, n, m);
    if clusters > 1 {
        return Err(Error::MultipleZeros { count: clusters });
    }

    let step = 2.0 * PI / n as f64;
    let mut theta = grid[kbest].clone();
    if vbest > EXACT_ZERO_REL * scale {
        let sweeps = if m == 1 { 1 } else { 4 };
        let lo = theta.clone();
        for _ in 0..sweeps {
            for l in 0..m {
                let mut probe = theta.clone();
                let (best, _) = golden_section(lo[l] - step, lo[l] + step, |x| {
                    probe[l] = x;
                    lambda_min(f, &probe)
                })?;
                theta[l] = best;
            }
        }
        if lambda_min(f, &theta)? > vbest {
            theta = grid[kbest].clone();
        }
    }
    for t in theta.iter_mut() {
        *t = t.rem_euclid(2.0 * PI);
    }

    let e = eig_hermitian(&f.evaluate(&theta)?)?;
    if e.values[0] > VANISH_REL * scale {
        return Err(Error::NoZero {
            min_eig: e.values[0],
        });
    }
    let vanishing = e
        .values
        .iter()
        .filter(|&&v| v <= VANISH_REL * scale)
        .count();
    if vanishing > 1 {
        return Err(Error::DegenerateZero { count: vanishing });
    }
    let q = normalize_phase(e.vector(0));
    let mut dir = vec![0.0; m];
    dir[0] = 1.0;
    let (order, slope) = zero_order_along(f, &theta, &dir)?;
    Ok(SymbolZero {
        theta0: theta,
        jbar: 1,
        q,
        order,
        slope,
        scale,
    })
}

/// Scales a vector so its largest-modulus entry is real and positive.
pub(crate) fn normalize_phase(mut v: Vec<C64>) -> Vec<C64> {
    let pivot = v.iter().copied().fold(C64::new(0.0, 0.0), |a, x| {
        if x.norm() > a.norm() + 1e-12 {
            x
        } else {
            a
        }
    });
    if pivot.norm() > 0.0 {
        let ph = pivot.conj() / pivot.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
    v
}

/// Order of the zero of `λ_min(f)` at `θ₀` along `dir`, from a least-squares
/// log-log fit over dyadic steps, rounded to the nearest even integer.
/// Returns the order and the raw slope.
pub fn zero_order_along(
    f: &MatrixTrigPolynomial,
    theta0: &[f64],
    dir: &[f64],
) -> Result<(usize, f64)> {
    if dir.len() != f.m() || theta0.len() != f.m() {
        return Err(Error::Dimension(
            "direction and base point must have m entries".into(),
        ));
    }
    let dn = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if dn == 0.0 {
        return Err(Error::Argument("zero direction".into()));
    }
    let mut scale = 0.0f64;
    for c in corners(theta0) {
        scale = scale.max(f.eigenvalues(&c)?.last().copied().unwrap_or(0.0).abs());
    }
    let mut pts = Vec::new();
    for k in ORDER_SCALES {
        let h = 2f64.powi(-k);
        let t: Vec<f64> = theta0
            .iter()
            .zip(dir)
            .map(|(a, u)| a + h * u / dn)
            .collect();
        let v = lambda_min(f, &t)?;
        if v > ORDER_NOISE_REL * scale {
            pts.push((h.ln(), v.ln()));
        }
    }
    if pts.len() < ORDER_MIN_POINTS {
        return Err(Error::ZeroOrder(format!(
            "only {} usable scales",
            pts.len()
        )));
    }
    let fit = &pts[pts.len().saturating_sub(ORDER_FIT_POINTS)..];
    let nf = fit.len() as f64;
    let mx = fit.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = fit.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let order = 2.0 * (slope / 2.0).round();
    if order < 2.0 || (slope - order).abs() > ORDER_MISFIT {
        return Err(Error::ZeroOrder(format!(
            "slope {slope:.4} is not near an even integer"
        )));
    }
    Ok((order as usize, slope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smallmat::CMat;

    fn laplacian() -> MatrixTrigPolynomial {
        MatrixTrigPolynomial::scalar(&[(-1, -1.0), (0, 2.0), (1, -1.0)])
    }

    #[test]
    fn scalar_laplacian_has_order_two() {
        let z = find_zero(&laplacian()).unwrap();
        assert_eq!(z.theta0, vec![0.0]);
        assert_eq!(z.order, 2);
        assert!((z.slope - 2.0).abs() < 1e-3);
    }

    #[test]
    fn squared_laplacian_has_order_four() {
        let f = laplacian().mul(&laplacian()).unwrap();
        assert_eq!(find_zero(&f).unwrap().order, 4);
    }

    #[test]
    fn zero_off_grid_is_refined() {
        // 2 - 2cos(θ - a): zero at a, between grid points.
        let a = 0.123456789f64;
        let f = MatrixTrigPolynomial::univariate(
            1,
            [
                (
                    -1,
                    CMat::from_rows(&[vec![-C64::from_polar(1.0, a)]]).unwrap(),
                ),
                (0, CMat::from_real_rows(&[&[2.0]])),
                (
                    1,
                    CMat::from_rows(&[vec![-C64::from_polar(1.0, -a)]]).unwrap(),
                ),
            ],
        )
        .unwrap();
        let z = find_zero(&f).unwrap();
        assert!((z.theta0[0] - a).abs() < 1e-6);
        assert_eq!(z.order, 2);
    }

    #[test]
    fn rejects_two_zeros() {
        // 1 - cos 2θ vanishes at 0 and π.
        let f = MatrixTrigPolynomial::scalar(&[(-2, -0.5), (0, 1.0), (2, -0.5)]);
        assert_eq!(
            find_zero(&f).unwrap_err(),
            Error::MultipleZeros { count: 2 }
        );
    }

    #[test]
    fn rejects_indefinite_symbol() {
        let f = MatrixTrigPolynomial::scalar(&[(-1, 1.0), (1, 1.0)]);
        assert!(matches!(find_zero(&f), Err(Error::NotNonnegative { .. })));
    }

    #[test]
    fn rejects_positive_symbol() {
        let f = MatrixTrigPolynomial::scalar(&[(-1, -1.0), (0, 3.0), (1, -1.0)]);
        assert!(matches!(find_zero(&f), Err(Error::NoZero { .. })));
    }

    #[test]
    fn bivariate_zero() {
        let lap = laplacian();
        let one = MatrixTrigPolynomial::identity(1, 1);
        let f = lap.tensor(&one).add(&one.tensor(&lap)).unwrap();
        let z = find_zero(&f).unwrap();
        assert_eq!(z.theta0, vec![0.0, 0.0]);
        assert_eq!(z.order, 2);
        assert_eq!(zero_order_along(&f, &z.theta0, &[0.0, 1.0]).unwrap().0, 2);
    }
}
