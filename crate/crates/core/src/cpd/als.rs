use super::kernels::{balance, grams, hadamard_except, mttkrp, residual, solve_right_transposed};
use super::{CpdConfig, CpdSolver, Fit};
use crate::tensorlin::{norm_sqr, ComplexMatrix, ComplexTensor};
use crate::Result;

/// Alternating least squares.
pub struct Als;

/// One pass over all modes, each solved exactly with the others fixed.
pub(crate) fn sweep(t: &ComplexTensor, u: &mut [ComplexMatrix]) -> Result<()> {
    let mut g = grams(u);
    for n in 0..u.len() {
        let m = mttkrp(t.as_slice(), t.dims(), u, n);
        let w = hadamard_except(&g, &[n]);
        u[n] = solve_right_transposed(&m, &w)?;
        g[n] = u[n].adjoint_matmul(&u[n]);
    }
    Ok(())
}

pub(crate) fn objective(t: &ComplexTensor, u: &[ComplexMatrix]) -> f64 {
    0.5 * norm_sqr(&residual(t.as_slice(), u))
}

impl CpdSolver for Als {
    fn name(&self) -> &'static str {
        "als"
    }

    fn fit(&self, tensor: &ComplexTensor, mut u: Vec<ComplexMatrix>, cfg: &CpdConfig) -> Result<Fit> {
        let floor = 0.5 * tensor.norm_sqr() * 1e-30;
        let mut f = objective(tensor, &u);
        let mut iterations = 0;
        while iterations < cfg.max_iters {
            sweep(tensor, &mut u)?;
            balance(&mut u);
            iterations += 1;
            let f_new = objective(tensor, &u);
            let done = f_new <= floor || (f - f_new).abs() <= cfg.tol * f;
            f = f_new;
            if done {
                break;
            }
        }
        Ok(Fit { factors: u, iterations })
    }
}
