//! Block Toeplitz and block circulant matrices generated by symbols, and the
//! grid transfers `P = T(p)(K ⊗ I_d)` built from them.
//!
//! Block `(i, k)` of `T_n(f)` is `f̂_{i-k}`; multilevel block indices are
//! ordered row-major (first variable slowest), the `d` block entries last.

use crate::error::{Error, Result};
use crate::smallmat::{vec_norm, CMat, Lu, C64};
use crate::sparse::CsrMatrix;
use crate::symbol::{coarse_symbol, MatrixTrigPolynomial};
use rand::{Rng, SeedableRng};
use serde::Serialize;

pub const DENSE_PROJECTION_MAX: usize = 2048;
const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITER: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Structure {
    Circulant,
    Toeplitz,
    General,
}

/// Which rows a cutting matrix keeps, counted from one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    /// Rows 1, 3, 5, ... of an even size (circulant coarsening).
    OddRows,
    /// Rows 2, 4, ... of an odd size (Toeplitz coarsening).
    EvenRows,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockStructuredMatrix {
    pub structure: Structure,
    pub d: usize,
    /// Blocks per dimension; empty when the matrix has no block grid.
    pub blocks: Vec<usize>,
    pub matrix: CsrMatrix,
}

impl BlockStructuredMatrix {
    pub fn general(matrix: CsrMatrix) -> Self {
        BlockStructuredMatrix {
            structure: Structure::General,
            d: 1,
            blocks: Vec::new(),
            matrix,
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Dense copy of block `(i, k)` (linear block indices).
    pub fn block(&self, i: usize, k: usize) -> CMat {
        let d = self.d;
        CMat::from_fn(d, d, |a, b| self.matrix.get(i * d + a, k * d + b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridTransfer {
    pub symbol: Option<MatrixTrigPolynomial>,
    pub parity: Option<Parity>,
    pub fine_size: usize,
    pub coarse_size: usize,
    pub coarse_blocks: Vec<usize>,
    pub matrix: CsrMatrix,
}

impl GridTransfer {
    /// Wraps an explicit prolongation matrix.
    pub fn from_matrix(matrix: CsrMatrix) -> Self {
        GridTransfer {
            symbol: None,
            parity: None,
            fine_size: matrix.nrows(),
            coarse_size: matrix.ncols(),
            coarse_blocks: Vec::new(),
            matrix,
        }
    }
}

fn ravel(ix: &[usize], dims: &[usize]) -> usize {
    ix.iter().zip(dims).fold(0, |acc, (&i, &n)| acc * n + i)
}

fn unravel(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for l in (0..dims.len()).rev() {
        out[l] = idx % dims[l];
        idx /= dims[l];
    }
    out
}

fn assemble_blocks(f: &MatrixTrigPolynomial, ns: &[usize], periodic: bool) -> Result<CsrMatrix> {
    if ns.len() != f.m() {
        return Err(Error::Dimension(format!(
            "{} block counts for m = {}",
            ns.len(),
            f.m()
        )));
    }
    if ns.contains(&0) {
        return Err(Error::Argument("block counts must be positive".into()));
    }
    let d = f.d();
    let nb: usize = ns.iter().product();
    let mut trip = Vec::with_capacity(nb * f.coeffs().len() * d * d);
    for row in 0..nb {
        let ix = unravel(row, ns);
        'coeff: for (j, c) in f.coeffs() {
            let mut col = Vec::with_capacity(ns.len());
            for ((&i, &jl), &n) in ix.iter().zip(j).zip(ns) {
                let k = i as i64 - jl as i64;
                if periodic {
                    col.push(k.rem_euclid(n as i64) as usize);
                } else if k < 0 || k >= n as i64 {
                    continue 'coeff;
                } else {
                    col.push(k as usize);
                }
            }
            let colb = ravel(&col, ns);
            for a in 0..d {
                for b in 0..d {
                    trip.push((row * d + a, colb * d + b, c[(a, b)]));
                }
            }
        }
    }
    CsrMatrix::from_triplets(nb * d, nb * d, trip)
}

/// Multilevel block Toeplitz matrix `T_n(f)`.
pub fn assemble_toeplitz_ml(
    f: &MatrixTrigPolynomial,
    ns: &[usize],
) -> Result<BlockStructuredMatrix> {
    if let Some(l) = f.radius().iter().zip(ns).position(|(&r, &n)| r >= n) {
        return Err(Error::Argument(format!(
            "symbol window {} does not fit n = {} in variable {}",
            f.radius()[l],
            ns[l],
            l + 1
        )));
    }
    Ok(BlockStructuredMatrix {
        structure: Structure::Toeplitz,
        d: f.d(),
        blocks: ns.to_vec(),
        matrix: assemble_blocks(f, ns, false)?,
    })
}

pub fn assemble_toeplitz(f: &MatrixTrigPolynomial, n: usize) -> Result<BlockStructuredMatrix> {
    assemble_toeplitz_ml(f, &[n])
}

/// Multilevel block circulant matrix `A_n(f)`. Coefficients with equal
/// offsets modulo `n` are summed, which is exactly the spectral definition
/// `(F ⊗ I) diag f(2πj/n) (F^H ⊗ I)` for any window.
pub fn assemble_circulant_ml(
    f: &MatrixTrigPolynomial,
    ns: &[usize],
) -> Result<BlockStructuredMatrix> {
    Ok(BlockStructuredMatrix {
        structure: Structure::Circulant,
        d: f.d(),
        blocks: ns.to_vec(),
        matrix: assemble_blocks(f, ns, true)?,
    })
}

pub fn assemble_circulant(f: &MatrixTrigPolynomial, n: usize) -> Result<BlockStructuredMatrix> {
    assemble_circulant_ml(f, &[n])
}

/// 0-based indices of the rows a cutting matrix keeps.
pub fn cutting_matrix(n: usize, parity: Parity) -> Result<Vec<usize>> {
    match parity {
        Parity::OddRows if n >= 2 && n.is_multiple_of(2) => Ok((0..n).step_by(2).collect()),
        Parity::EvenRows if n >= 3 && n % 2 == 1 => Ok((1..n).step_by(2).collect()),
        _ => Err(Error::Argument(format!("size {n} does not fit {parity:?}"))),
    }
}

/// Kept multilevel block indices (linear, row-major) for the tensor cutting.
pub fn block_cutting(ns: &[usize], parity: Parity) -> Result<(Vec<usize>, Vec<usize>)> {
    let per: Vec<Vec<usize>> = ns
        .iter()
        .map(|&n| cutting_matrix(n, parity))
        .collect::<Result<_>>()?;
    let ks: Vec<usize> = per.iter().map(|v| v.len()).collect();
    let total: usize = ks.iter().product();
    let kept = (0..total)
        .map(|c| {
            let cix = unravel(c, &ks);
            let fix: Vec<usize> = cix.iter().enumerate().map(|(l, &i)| per[l][i]).collect();
            ravel(&fix, ns)
        })
        .collect();
    Ok((kept, ks))
}

pub fn parity_for(structure: Structure) -> Result<Parity> {
    match structure {
        Structure::Circulant => Ok(Parity::OddRows),
        Structure::Toeplitz => Ok(Parity::EvenRows),
        Structure::General => Err(Error::Argument(
            "transfers need a circulant or Toeplitz structure".into(),
        )),
    }
}

/// `P = S_n(p) (K ⊗ I_d)` with `S` circulant or Toeplitz, multilevel.
pub fn assemble_transfer_ml(
    p: &MatrixTrigPolynomial,
    ns: &[usize],
    structure: Structure,
) -> Result<GridTransfer> {
    let parity = parity_for(structure)?;
    let (kept_blocks, ks) = block_cutting(ns, parity)?;
    let full = match structure {
        Structure::Circulant => assemble_circulant_ml(p, ns)?,
        _ => assemble_toeplitz_ml(p, ns)?,
    };
    let d = p.d();
    let cols: Vec<usize> = kept_blocks
        .iter()
        .flat_map(|&b| (0..d).map(move |l| b * d + l))
        .collect();
    let matrix = full.matrix.select_columns(&cols)?;
    Ok(GridTransfer {
        symbol: Some(p.clone()),
        parity: Some(parity),
        fine_size: matrix.nrows(),
        coarse_size: matrix.ncols(),
        coarse_blocks: ks,
        matrix,
    })
}

pub fn assemble_transfer(
    p: &MatrixTrigPolynomial,
    n: usize,
    structure: Structure,
) -> Result<GridTransfer> {
    assemble_transfer_ml(p, &[n], structure)
}

/// Galerkin coarse matrix `P^H A P`. Circulant inputs stay circulant; the
/// Toeplitz case carries a boundary correction and is tagged general.
pub fn galerkin(a: &BlockStructuredMatrix, p: &GridTransfer) -> Result<BlockStructuredMatrix> {
    if p.fine_size != a.size() {
        return Err(Error::Dimension(format!(
            "transfer for size {} applied to size {}",
            p.fine_size,
            a.size()
        )));
    }
    let ac = p.matrix.adjoint().matmul(&a.matrix)?.matmul(&p.matrix)?;
    let structure = match (a.structure, p.parity) {
        (Structure::Circulant, Some(Parity::OddRows)) => Structure::Circulant,
        _ => Structure::General,
    };
    let d = if p.coarse_blocks.is_empty() { 1 } else { a.d };
    Ok(BlockStructuredMatrix {
        structure,
        d,
        blocks: p.coarse_blocks.clone(),
        matrix: ac,
    })
}

/// `||P^H T_n(f) P - T_k(f̂)||_F` for the Toeplitz transfer, `k = (n-1)/2`.
pub fn toeplitz_galerkin_defect(
    f: &MatrixTrigPolynomial,
    p: &MatrixTrigPolynomial,
    n: usize,
) -> Result<f64> {
    let a = assemble_toeplitz(f, n)?;
    let t = assemble_transfer(p, n, Structure::Toeplitz)?;
    let ac = galerkin(&a, &t)?;
    let fh = coarse_symbol(f, p)?;
    let tk = assemble_toeplitz(&fh, t.coarse_blocks[0])?;
    Ok(ac.matrix.to_dense().sub(&tk.matrix.to_dense())?.norm_fro())
}

/// `||π_A||_2` with `π_A = P (P^H A P)^{-1} P^H A`, by power iteration on
/// `π_A^H π_A` (dense, sizes up to [`DENSE_PROJECTION_MAX`]).
pub fn coarse_projection_norm(a: &CsrMatrix, p: &CsrMatrix) -> Result<f64> {
    let n = a.nrows();
    if n > DENSE_PROJECTION_MAX {
        return Err(Error::Argument(format!(
            "dense projection limited to size {DENSE_PROJECTION_MAX}, got {n}"
        )));
    }
    if p.nrows() != n {
        return Err(Error::Dimension(
            "transfer rows must match the matrix".into(),
        ));
    }
    let pd = p.to_dense();
    let ph_a = p.adjoint().matmul(a)?.to_dense();
    let ac = ph_a.matmul(&pd)?;
    let x = Lu::factor(&ac)?.solve_mat(&ph_a)?;
    let pi = pd.matmul(&x)?;
    let pih = pi.adjoint();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let nv = vec_norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = 0.0f64;
    for it in 0..POWER_MAX_ITER {
        let w = pih.matvec(&pi.matvec(&v)?)?;
        let next = vec_norm(&w);
        if next == 0.0 {
            return Ok(0.0);
        }
        v = w.into_iter().map(|x| x / next).collect();
        if it > 0 && (next - lambda).abs() <= POWER_TOL * next {
            return Ok(next.sqrt());
        }
        lambda = next;
    }
    Err(Error::NoConvergence {
        what: "power iteration".into(),
        iterations: POWER_MAX_ITER,
    })
}
