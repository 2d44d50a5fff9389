use num_complex::Complex64 as C64;

use super::als::sweep;
use super::kernels::{
    axpy, balance, dot, fnorm_sqr, grams, hadamard_except, mttkrp, regularized_inverse, residual,
    scale, Factors,
};
use super::{CpdConfig, CpdSolver, Fit};
use crate::tensorlin::{norm_sqr, ComplexMatrix, ComplexTensor};
use crate::Result;

/// ALS warm start followed by Gauss–Newton steps inside a dogleg trust
/// region. The Gramian `JᴴJ` is never formed; products with it use the
/// Gramians of the factor matrices only.
pub struct GnDogleg;

struct Model<'a> {
    u: &'a [ComplexMatrix],
    /// `W_n = ⊙_{m≠n} G_m`.
    w: Vec<ComplexMatrix>,
    /// `⊙_{l∉{n,m}} G_l`, indexed `[n][m]` for `n ≠ m`.
    pair: Vec<Vec<ComplexMatrix>>,
    /// Block-Jacobi preconditioner `(W_nᵀ)⁻¹`.
    w_inv_t: Vec<ComplexMatrix>,
}

impl<'a> Model<'a> {
    fn new(u: &'a [ComplexMatrix]) -> Result<Self> {
        let g = grams(u);
        let modes = u.len();
        let w: Vec<ComplexMatrix> = (0..modes).map(|n| hadamard_except(&g, &[n])).collect();
        let mut pair: Vec<Vec<ComplexMatrix>> = vec![Vec::with_capacity(modes); modes];
        for n in 0..modes {
            for m in 0..modes {
                let h = if m < n {
                    pair[m][n].clone()
                } else if m == n {
                    ComplexMatrix::zeros(0, 0)
                } else {
                    hadamard_except(&g, &[n, m])
                };
                pair[n].push(h);
            }
        }
        let w_inv_t = w
            .iter()
            .map(|wn| regularized_inverse(wn).map(|i| i.transpose()))
            .collect::<Result<_>>()?;
        Ok(Model { u, w, pair, w_inv_t })
    }

    fn jhj(&self, p: &[ComplexMatrix]) -> Factors {
        let modes = self.u.len();
        let q: Vec<ComplexMatrix> = (0..modes).map(|m| self.u[m].adjoint_matmul(&p[m])).collect();
        (0..modes)
            .map(|n| {
                let r = self.w[n].rows();
                let mut v = ComplexMatrix::zeros(r, r);
                for m in (0..modes).filter(|&m| m != n) {
                    let terms = q[m].as_slice().iter().zip(self.pair[n][m].as_slice());
                    for (acc, (a, b)) in v.as_mut_slice().iter_mut().zip(terms) {
                        *acc += a * b;
                    }
                }
                p[n].matmul_transpose(&self.w[n]).add(&self.u[n].matmul_transpose(&v))
            })
            .collect()
    }

    fn precondition(&self, r: &[ComplexMatrix]) -> Factors {
        r.iter().zip(&self.w_inv_t).map(|(x, wi)| x.matmul(wi)).collect()
    }

    /// Preconditioned conjugate gradients on `JᴴJ x = b`.
    fn pcg(&self, b: &Factors, max_iters: usize) -> Factors {
        let mut x: Factors = b.iter().map(|m| ComplexMatrix::zeros(m.rows(), m.cols())).collect();
        let mut r = b.clone();
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z).re;
        let b_norm = fnorm_sqr(b).sqrt();
        for _ in 0..max_iters {
            let ap = self.jhj(&p);
            let pap = dot(&p, &ap).re;
            if !(pap > 0.0) || !(rz > 0.0) {
                break;
            }
            let alpha = C64::new(rz / pap, 0.0);
            x = axpy(&x, alpha, &p);
            r = axpy(&r, -alpha, &ap);
            if fnorm_sqr(&r).sqrt() <= 1e-10 * b_norm {
                break;
            }
            z = self.precondition(&r);
            let rz_new = dot(&r, &z).re;
            p = axpy(&z, C64::new(rz_new / rz, 0.0), &p);
            rz = rz_new;
        }
        x
    }
}

fn gradient(t: &ComplexTensor, u: &[ComplexMatrix], e: &[C64]) -> Factors {
    (0..u.len()).map(|n| mttkrp(e, t.dims(), u, n)).collect()
}

/// Point on the dogleg path of length at most `delta`.
fn dogleg(p_gn: &Factors, p_sd: &Factors, g: &Factors, delta: f64) -> Factors {
    let gn_norm = fnorm_sqr(p_gn).sqrt();
    if gn_norm <= delta {
        return p_gn.clone();
    }
    let sd_norm = fnorm_sqr(p_sd).sqrt();
    if sd_norm >= delta {
        let g_norm = fnorm_sqr(g).sqrt();
        return scale(g, C64::new(-delta / g_norm, 0.0));
    }
    let d = axpy(p_gn, C64::new(-1.0, 0.0), p_sd);
    let a = fnorm_sqr(&d);
    let b = 2.0 * dot(p_sd, &d).re;
    let c = sd_norm * sd_norm - delta * delta;
    let tau = (-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a);
    axpy(p_sd, C64::new(tau, 0.0), &d)
}

impl CpdSolver for GnDogleg {
    fn name(&self) -> &'static str {
        "gn-dogleg"
    }

    fn fit(&self, tensor: &ComplexTensor, mut u: Vec<ComplexMatrix>, cfg: &CpdConfig) -> Result<Fit> {
        for _ in 0..cfg.als_warm_sweeps {
            sweep(tensor, &mut u)?;
        }
        balance(&mut u);
        let floor = 0.5 * tensor.norm_sqr() * 1e-30;
        let mut e = residual(tensor.as_slice(), &u);
        let mut f = 0.5 * norm_sqr(&e);
        let mut delta = 0.3 * fnorm_sqr(&u).sqrt().max(1.0);
        let mut iterations = 0;
        while iterations < cfg.max_iters && f > floor {
            iterations += 1;
            let model = Model::new(&u)?;
            let g = gradient(tensor, &u, &e);
            let g_sqr = fnorm_sqr(&g);
            if g_sqr == 0.0 {
                break;
            }
            let minus_g = scale(&g, C64::new(-1.0, 0.0));
            let p_gn = model.pcg(&minus_g, cfg.cg_max_iters);
            let curv = dot(&g, &model.jhj(&g)).re;
            let p_sd = scale(&g, C64::new(-g_sqr / curv.max(f64::MIN_POSITIVE), 0.0));
            let p = dogleg(&p_gn, &p_sd, &g, delta);
            let p_norm = fnorm_sqr(&p).sqrt();
            let pred = -(dot(&g, &p).re + 0.5 * dot(&p, &model.jhj(&p)).re);

            let candidate = axpy(&u, C64::new(1.0, 0.0), &p);
            let e_new = residual(tensor.as_slice(), &candidate);
            let f_new = 0.5 * norm_sqr(&e_new);
            let rho = if pred > 0.0 { (f - f_new) / pred } else { -1.0 };

            if rho < 0.25 {
                delta = 0.5 * p_norm.min(delta);
            } else if rho > 0.75 {
                delta = delta.max(2.0 * p_norm);
            }
            if f_new < f {
                let rel_change = (f - f_new) / f;
                u = candidate;
                balance(&mut u);
                e = e_new;
                f = f_new;
                if rel_change <= cfg.tol {
                    break;
                }
            }
            if delta <= 1e-15 * fnorm_sqr(&u).sqrt() {
                break;
            }
        }
        Ok(Fit { factors: u, iterations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(dims: &[usize], rank: usize, rng: &mut ChaCha8Rng) -> Factors {
        dims.iter().map(|&d| crate::channel::awgn(d, rank, 1.0, rng)).collect()
    }

    /// Column of the Jacobian for parameter `U_n[a, r]`.
    fn jacobian_column(u: &[ComplexMatrix], n: usize, a: usize, r: usize) -> Vec<C64> {
        let cols: Vec<Vec<C64>> = u
            .iter()
            .enumerate()
            .map(|(m, um)| {
                if m == n {
                    let mut e = vec![C64::new(0.0, 0.0); um.rows()];
                    e[a] = C64::new(1.0, 0.0);
                    e
                } else {
                    um.col(r)
                }
            })
            .collect();
        crate::tensorlin::kron_all(&cols)
    }

    #[test]
    fn structured_gramian_matches_explicit_jacobian() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let dims = [3, 2, 4];
        let u = random(&dims, 2, &mut rng);
        let p = random(&dims, 2, &mut rng);
        let model = Model::new(&u).unwrap();
        let fast = model.jhj(&p);

        let total: usize = dims.iter().product();
        let mut jp = vec![C64::new(0.0, 0.0); total];
        for n in 0..3 {
            for a in 0..dims[n] {
                for r in 0..2 {
                    let col = jacobian_column(&u, n, a, r);
                    for (o, c) in jp.iter_mut().zip(&col) {
                        *o += c * p[n][(a, r)];
                    }
                }
            }
        }
        for n in 0..3 {
            for a in 0..dims[n] {
                for r in 0..2 {
                    let col = jacobian_column(&u, n, a, r);
                    let want = crate::tensorlin::inner(&col, &jp);
                    assert!((fast[n][(a, r)] - want).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let dims = [2, 3, 3];
        let t = ComplexTensor::new(dims.to_vec(), crate::channel::awgn(18, 1, 1.0, &mut rng).into_vec())
            .unwrap();
        let u = random(&dims, 2, &mut rng);
        let e = residual(t.as_slice(), &u);
        let g = gradient(&t, &u, &e);
        let f = |v: &[ComplexMatrix]| 0.5 * norm_sqr(&residual(t.as_slice(), v));
        let h = 1e-6;
        for n in 0..3 {
            let mut up = u.clone();
            up[n][(1, 0)] += C64::new(h, 0.0);
            let mut dn = u.clone();
            dn[n][(1, 0)] -= C64::new(h, 0.0);
            let d_re = (f(&up) - f(&dn)) / (2.0 * h);
            // ∂f/∂Re(z) = Re(Jᴴe)
            assert!((d_re - g[n][(1, 0)].re).abs() < 1e-5, "{d_re} vs {}", g[n][(1, 0)]);
        }
    }

    #[test]
    fn dogleg_respects_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        let g = random(&[3, 3], 1, &mut rng);
        let p_sd = scale(&g, C64::new(-0.1, 0.0));
        let p_gn = random(&[3, 3], 1, &mut rng);
        for delta in [1e-3, 0.2, 1.0, 100.0] {
            let p = dogleg(&p_gn, &p_sd, &g, delta);
            assert!(fnorm_sqr(&p).sqrt() <= delta * (1.0 + 1e-12));
        }
    }
}
