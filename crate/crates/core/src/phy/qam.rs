//! Square Gray-labelled QAM: even bits drive the in-phase axis, odd bits the
//! quadrature axis, and each axis is Gray-coded PAM with bit 0 on the
//! positive side. Unit average symbol energy.

use num_complex::Complex64 as C64;

use crate::{Error, Result};

fn bits_per_axis(order: usize) -> Result<usize> {
    match order {
        4 => Ok(1),
        16 => Ok(2),
        _ => Err(Error::Config(format!("unsupported QAM order {order}"))),
    }
}

pub fn bits_per_symbol(order: usize) -> Result<usize> {
    Ok(2 * bits_per_axis(order)?)
}

fn axis_scale(m: usize) -> f64 {
    let levels = (1usize << m) as f64;
    (2.0 * (levels * levels - 1.0) / 3.0).sqrt().recip()
}

/// PAM amplitude for Gray label `bits`, before scaling.
fn axis_level(bits: &[u8]) -> f64 {
    let m = bits.len();
    let gray = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
    let k = crate::bits::gray_decode(gray) as f64;
    ((1usize << m) as f64 - 1.0) - 2.0 * k
}

/// Maps bits onto QAM symbols; `bits.len()` must be a multiple of the bits per symbol.
pub fn qam_map(bits: &[u8], order: usize) -> Result<Vec<C64>> {
    let m = bits_per_axis(order)?;
    if bits.len() % (2 * m) != 0 {
        return Err(Error::Length { expected: bits.len().next_multiple_of(2 * m), got: bits.len() });
    }
    let s = axis_scale(m);
    Ok(bits
        .chunks(2 * m)
        .map(|c| {
            let (i_bits, q_bits): (Vec<u8>, Vec<u8>) = {
                let mut ib = Vec::with_capacity(m);
                let mut qb = Vec::with_capacity(m);
                for (k, &b) in c.iter().enumerate() {
                    if k % 2 == 0 { ib.push(b) } else { qb.push(b) }
                }
                (ib, qb)
            };
            C64::new(axis_level(&i_bits) * s, axis_level(&q_bits) * s)
        })
        .collect())
}

/// Max-log LLRs (positive means bit 1) of unbiased symbol estimates, each
/// with its own complex noise variance.
pub fn qam_soft_demap(estimates: &[C64], noise_vars: &[f64], order: usize) -> Result<Vec<f64>> {
    if estimates.len() != noise_vars.len() {
        return Err(Error::Length { expected: estimates.len(), got: noise_vars.len() });
    }
    let m = bits_per_axis(order)?;
    let s = axis_scale(m);
    let labels: Vec<(Vec<u8>, f64)> = (0..1u64 << m)
        .map(|g| {
            let b = crate::bits::BitString::from_uint(g, m).into_inner();
            let a = axis_level(&b) * s;
            (b, a)
        })
        .collect();
    let axis_llrs = |y: f64, var: f64, out: &mut [f64; 2]| {
        for (j, o) in out.iter_mut().enumerate().take(m) {
            let mut d0 = f64::INFINITY;
            let mut d1 = f64::INFINITY;
            for (b, a) in &labels {
                let d = (y - a) * (y - a);
                if b[j] == 0 { d0 = d0.min(d) } else { d1 = d1.min(d) }
            }
            *o = (d0 - d1) / var;
        }
    };
    let mut out = Vec::with_capacity(estimates.len() * 2 * m);
    for (z, &var) in estimates.iter().zip(noise_vars) {
        if !(var > 0.0) {
            return Err(Error::Config(format!("noise variance {var} must be positive")));
        }
        let mut li = [0.0; 2];
        let mut lq = [0.0; 2];
        axis_llrs(z.re, var, &mut li);
        axis_llrs(z.im, var, &mut lq);
        for j in 0..m {
            out.push(li[j]);
            out.push(lq[j]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn gray_4qam_table() {
        let pts = qam_map(&[0, 0, 0, 1, 1, 1, 1, 0], 4).unwrap();
        let expected = [C64::new(R, R), C64::new(R, -R), C64::new(-R, -R), C64::new(-R, R)];
        for (p, e) in pts.iter().zip(expected) {
            assert!((p - e).norm() < 1e-15);
        }
        // neighbours along each axis differ in exactly one bit
        let labels = [[0u8, 0], [0, 1], [1, 1], [1, 0]];
        for (k, a) in labels.iter().enumerate() {
            let b = labels[(k + 1) % 4];
            let pa = qam_map(a, 4).unwrap()[0];
            let pb = qam_map(&b, 4).unwrap()[0];
            assert!(((pa - pb).norm() - 2.0 * R).abs() < 1e-12);
            assert_eq!(a.iter().zip(&b).filter(|(x, y)| x != y).count(), 1);
        }
    }

    #[test]
    fn unit_average_energy() {
        for order in [4, 16] {
            let k = bits_per_symbol(order).unwrap();
            let mut e = 0.0;
            for x in 0..1u64 << k {
                let b = crate::bits::BitString::from_uint(x, k);
                e += qam_map(&b, order).unwrap()[0].norm_sqr();
            }
            assert!((e / (1u64 << k) as f64 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn soft_demap_closed_form_and_signs() {
        let var = 0.7;
        let z = C64::new(0.3, -1.1);
        let l = qam_soft_demap(&[z], &[var], 4).unwrap();
        // exact two-hypothesis LLR: each bit sees one point per hypothesis
        let exact = |y: f64| ((-(y + R).powi(2) / var).exp() / (-(y - R).powi(2) / var).exp()).ln();
        assert!((l[0] - exact(z.re)).abs() < 1e-12);
        assert!((l[1] - exact(z.im)).abs() < 1e-12);
        assert!((l[0] + 2.0 * 2f64.sqrt() * z.re / var).abs() < 1e-12);

        assert_eq!(qam_soft_demap(&[C64::new(0.0, 0.0)], &[1.0], 4).unwrap(), vec![0.0, 0.0]);
        for order in [4, 16] {
            let k = bits_per_symbol(order).unwrap();
            for x in 0..1u64 << k {
                let b = crate::bits::BitString::from_uint(x, k);
                let p = qam_map(&b, order).unwrap();
                let l = qam_soft_demap(&p, &[0.01], order).unwrap();
                for (li, &bi) in l.iter().zip(b.iter()) {
                    assert_eq!(*li > 0.0, bi == 1);
                }
            }
        }
    }
}
