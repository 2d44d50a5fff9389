//! Canonical polyadic decomposition of the received unsourced tensor.
//!
//! Solvers implement [`CpdSolver`] and are looked up by name through
//! [`solver`], so the decoder configuration can pick one at run time.

mod als;
mod gn;
mod kernels;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::tensorlin::{norm, ComplexMatrix, ComplexTensor};
use crate::{Error, Result};

pub use als::Als;
pub use gn::GnDogleg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CpdConfig {
    pub solver: String,
    pub max_iters: usize,
    /// Stop once the relative decrease of the residual falls below this.
    pub tol: f64,
    pub n_restarts: usize,
    pub als_warm_sweeps: usize,
    pub cg_max_iters: usize,
}

impl Default for CpdConfig {
    fn default() -> Self {
        CpdConfig {
            solver: GnDogleg.name().to_string(),
            max_iters: 200,
            tol: 1e-8,
            n_restarts: 3,
            als_warm_sweeps: 10,
            cg_max_iters: 10,
        }
    }
}

impl CpdConfig {
    pub fn validate(&self) -> Result<()> {
        solver(&self.solver)?;
        if self.max_iters == 0 || self.n_restarts == 0 {
            return Err(Error::Config("cpd: max_iters and n_restarts must be ≥ 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config(format!("cpd: tol {} < 0", self.tol)));
        }
        Ok(())
    }
}

/// Raw factor matrices `U_m` (`dims[m] × R`) plus the iteration count.
#[derive(Debug, Clone)]
pub struct Fit {
    pub factors: Vec<ComplexMatrix>,
    pub iterations: usize,
}

pub trait CpdSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Refines `init` towards a local minimizer of `‖T − Σ_r ⊗_m U_m[:, r]‖²`.
    fn fit(&self, tensor: &ComplexTensor, init: Vec<ComplexMatrix>, cfg: &CpdConfig) -> Result<Fit>;
}

static SOLVERS: &[&dyn CpdSolver] = &[&GnDogleg, &Als];

pub fn solver(name: &str) -> Result<&'static dyn CpdSolver> {
    SOLVERS
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::Unknown { kind: "cpd solver", name: name.to_string() })
}

pub fn solver_names() -> Vec<&'static str> {
    SOLVERS.iter().map(|s| s.name()).collect()
}

/// One rank-1 term: unit-norm mode vectors and a channel factor carrying
/// the remaining scale and phase.
#[derive(Debug, Clone, PartialEq)]
pub struct CpdComponent {
    pub factors: Vec<Vec<C64>>,
    pub channel: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct CpdFactors {
    pub components: Vec<CpdComponent>,
    /// `‖T − model‖ / ‖T‖`.
    pub rel_residual: f64,
    pub iterations: usize,
}

impl CpdFactors {
    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn reconstruct(&self) -> Vec<C64> {
        let mats = to_matrices(&self.components);
        kernels::reconstruct(&mats)
    }
}

fn to_matrices(components: &[CpdComponent]) -> Vec<ComplexMatrix> {
    let modes = components[0].factors.len() + 1;
    (0..modes)
        .map(|m| {
            let cols: Vec<&[C64]> = components
                .iter()
                .map(|c| if m + 1 == modes { &c.channel[..] } else { &c.factors[m][..] })
                .collect();
            ComplexMatrix::from_cols(cols[0].len(), &cols)
        })
        .collect()
}

pub fn check_rank(dims: &[usize], rank: usize) -> Result<()> {
    let total: usize = dims.iter().product();
    if rank == 0 || dims.iter().any(|&d| rank > total / d) {
        return Err(Error::Config(format!("cpd: rank {rank} invalid for dims {dims:?}")));
    }
    Ok(())
}

/// Decomposes the last-mode-indexed tensor `T` (modes `n_1, …, n_D, M`) into
/// `rank` components, keeping the best of `cfg.n_restarts` random starts.
pub fn cpd_decompose<R: Rng + ?Sized>(
    tensor: &ComplexTensor,
    rank: usize,
    cfg: &CpdConfig,
    rng: &mut R,
) -> Result<CpdFactors> {
    check_rank(tensor.dims(), rank)?;
    if tensor.dims().len() < 2 {
        return Err(Error::Shape("cpd: need at least two modes".into()));
    }
    let solver = solver(&cfg.solver)?;
    let t_norm = tensor.norm_sqr().sqrt();
    let mut best: Option<(f64, Fit)> = None;
    for _ in 0..cfg.n_restarts {
        let init: Vec<ComplexMatrix> = tensor
            .dims()
            .iter()
            .map(|&d| crate::channel::awgn(d, rank, 1.0, rng))
            .collect();
        let fit = solver.fit(tensor, init, cfg)?;
        let res = norm(&kernels::residual(tensor.as_slice(), &fit.factors));
        let rel = if t_norm > 0.0 { res / t_norm } else { res };
        let better = best.as_ref().map_or(true, |(b, _)| rel < *b);
        if better && rel.is_finite() {
            best = Some((rel, fit));
        }
        if rel < 1e-12 {
            break;
        }
    }
    let (rel_residual, fit) = best.ok_or(Error::Singular)?;
    Ok(CpdFactors { components: normalize(&fit.factors), rel_residual, iterations: fit.iterations })
}

fn normalize(u: &[ComplexMatrix]) -> Vec<CpdComponent> {
    let last = u.len() - 1;
    let rank = u[0].cols();
    (0..rank)
        .map(|r| {
            let mut scale = 1.0;
            let factors = u[..last]
                .iter()
                .map(|m| {
                    let mut v = m.col(r);
                    let nv = norm(&v);
                    if nv > 0.0 {
                        v.iter_mut().for_each(|z| *z /= nv);
                    }
                    scale *= nv;
                    v
                })
                .collect();
            let channel = u[last].col(r).into_iter().map(|z| z * scale).collect();
            CpdComponent { factors, channel }
        })
        .collect()
}
