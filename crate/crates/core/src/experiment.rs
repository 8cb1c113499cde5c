//! Iteration-count experiments on the 1D and 2D FEM problems.

use crate::error::Result;
use crate::femgen::{fem_hierarchy, Coefficient, FemProblem1D, TransferKind};
use crate::mgsolve::{
    solve, Cycle, MultigridHierarchy, SmootherSpec, SolveOutcome, COARSEST_MAX_SIZE,
};
use crate::multilevel::tensor_fem_hierarchy;
use crate::smallmat::C64;
use crate::sparse::CsrMatrix;
use rand::{Rng, SeedableRng};

pub const DEFAULT_SEED: u64 = 20240101;

/// `b = A x*` with `x*` uniform in `[0, 1]` from `seed`.
pub fn manufactured_rhs(a: &CsrMatrix, seed: u64) -> Vec<C64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<C64> = (0..a.ncols())
        .map(|_| C64::new(rng.random_range(0.0..1.0), 0.0))
        .collect();
    a.matvec(&xs)
}

#[derive(Debug, Clone)]
pub struct FemExperiment {
    pub dim: usize,
    pub r: usize,
    pub coefficient: Coefficient,
    pub projector: TransferKind,
    pub smoother: SmootherSpec,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub coarsest_max: usize,
}

impl FemExperiment {
    pub fn new(r: usize, coefficient: Coefficient) -> Self {
        FemExperiment {
            dim: 1,
            r,
            coefficient,
            projector: TransferKind::Linear,
            smoother: SmootherSpec::gauss_seidel(1, 1),
            tol: 1e-6,
            max_iter: 100,
            seed: DEFAULT_SEED,
            coarsest_max: COARSEST_MAX_SIZE,
        }
    }

    /// Hierarchy on `2^t` elements per direction.
    pub fn hierarchy(&self, t: u32) -> Result<MultigridHierarchy> {
        let n = 1usize << t;
        match self.dim {
            1 => fem_hierarchy(
                &FemProblem1D::new(self.coefficient.clone(), self.r, n)?,
                self.projector,
                self.smoother,
                self.coarsest_max,
            ),
            _ => tensor_fem_hierarchy(self.r, t, self.projector, self.smoother, self.coarsest_max),
        }
    }

    pub fn run(&self, h: &MultigridHierarchy, cycle: Cycle) -> Result<SolveOutcome> {
        let b = manufactured_rhs(h.fine(), self.seed);
        solve(h, &b, self.tol, self.max_iter, cycle)
    }
}
