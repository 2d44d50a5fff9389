use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::{Error, Result};

/// Multi-way complex array, row-major (last index fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTensor {
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl ComplexTensor {
    pub fn new(dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if n != data.len() || dims.is_empty() {
            return Err(Error::Shape(format!("dims {:?} vs {} entries", dims, data.len())));
        }
        Ok(ComplexTensor { dims, data })
    }

    /// Views an `n × M` matrix as a tensor of shape `(dims…, M)`; lossless.
    pub fn from_matrix(m: &ComplexMatrix, dims: &[usize]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if n != m.rows() {
            return Err(Error::Shape(format!("dims {:?} vs {} rows", dims, m.rows())));
        }
        let mut all = dims.to_vec();
        all.push(m.cols());
        Self::new(all, m.as_slice().to_vec())
    }

    /// Inverse of [`ComplexTensor::from_matrix`]: merges all leading modes into rows.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let cols = *self.dims.last().unwrap();
        ComplexMatrix::from_rows(self.data.len() / cols, cols, self.data.clone())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        super::norm_sqr(&self.data)
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len() - 1).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    /// Mode-`mode` unfolding: `dims[mode]` rows; the remaining indices form the
    /// column index in their original order, last one fastest.
    pub fn mode_unfold(&self, mode: usize) -> Result<ComplexMatrix> {
        if mode >= self.dims.len() {
            return Err(Error::OutOfRange { index: mode, bound: self.dims.len() });
        }
        let rows = self.dims[mode];
        let cols = self.data.len() / rows;
        let stride = self.strides()[mode];
        // flat = outer * rows * stride + i * stride + inner
        let mut out = ComplexMatrix::zeros(rows, cols);
        let outer_n = self.data.len() / (rows * stride);
        for outer in 0..outer_n {
            for i in 0..rows {
                let src = outer * rows * stride + i * stride;
                for inner in 0..stride {
                    out[(i, outer * stride + inner)] = self.data[src + inner];
                }
            }
        }
        Ok(out)
    }

    /// Inverse of [`ComplexTensor::mode_unfold`].
    pub fn mode_refold(m: &ComplexMatrix, mode: usize, dims: &[usize]) -> Result<Self> {
        if mode >= dims.len() {
            return Err(Error::OutOfRange { index: mode, bound: dims.len() });
        }
        let total: usize = dims.iter().product();
        if m.rows() != dims[mode] || m.rows() * m.cols() != total {
            return Err(Error::Shape(format!("refold {:?} from {}x{}", dims, m.rows(), m.cols())));
        }
        let stride: usize = dims[mode + 1..].iter().product();
        let rows = dims[mode];
        let mut data = vec![C64::new(0.0, 0.0); total];
        let outer_n = total / (rows * stride);
        for outer in 0..outer_n {
            for i in 0..rows {
                let dst = outer * rows * stride + i * stride;
                for inner in 0..stride {
                    data[dst + inner] = m[(i, outer * stride + inner)];
                }
            }
        }
        Self::new(dims.to_vec(), data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorlin::kron_all;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect()
    }

    #[test]
    fn unfold_refold_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dims in [vec![2, 2], vec![2, 3, 2], vec![5, 5, 5, 4, 3]] {
            let n = dims.iter().product();
            let t = ComplexTensor::new(dims.clone(), random_vec(&mut rng, n)).unwrap();
            for mode in 0..dims.len() {
                let u = t.mode_unfold(mode).unwrap();
                assert_eq!(ComplexTensor::mode_refold(&u, mode, &dims).unwrap(), t);
            }
        }
    }

    #[test]
    fn unfold_matches_index_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = ComplexTensor::new(vec![2, 3, 2], random_vec(&mut rng, 12)).unwrap();
        let u0 = t.mode_unfold(0).unwrap();
        let u1 = t.mode_unfold(1).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..2 {
                    let v = t.as_slice()[i * 6 + j * 2 + k];
                    assert_eq!(u0[(i, j * 2 + k)], v);
                    assert_eq!(u1[(j, i * 2 + k)], v);
                }
            }
        }
    }

    #[test]
    fn rank_one_unfoldings_have_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let factors = [random_vec(&mut rng, 3), random_vec(&mut rng, 4), random_vec(&mut rng, 2)];
        let t = ComplexTensor::new(vec![3, 4, 2], kron_all(&factors)).unwrap();
        for mode in 0..3 {
            let u = t.mode_unfold(mode).unwrap();
            let m = nalgebra::DMatrix::from_fn(u.rows(), u.cols(), |r, c| u[(r, c)]);
            let sv = m.singular_values();
            let mut s: Vec<f64> = sv.iter().copied().collect();
            s.sort_by(|a, b| b.total_cmp(a));
            assert!(s[1] < 1e-10 * s[0], "mode {mode}: {:?}", s);
        }
    }

    #[test]
    fn mode_out_of_range() {
        let t = ComplexTensor::new(vec![2, 2], vec![C64::new(0.0, 0.0); 4]).unwrap();
        assert!(matches!(t.mode_unfold(2), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn matrix_view_is_lossless() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = ComplexMatrix::from_rows(20, 3, random_vec(&mut rng, 60));
        let t = ComplexTensor::from_matrix(&m, &[5, 4]).unwrap();
        assert_eq!(t.dims(), &[5, 4, 3]);
        assert_eq!(t.to_matrix(), m);
    }
}
