//! Cube-split Grassmannian sub-constellations.
//!
//! A codeword of ambient dimension `n` is addressed by a cell index (which
//! coordinate acts as the real, positive anchor) and `2(n-1)` real local
//! coordinates on a regular grid in `(0, 1)`. Each grid value is pushed
//! through `Φ⁻¹` to a Gaussian coordinate, the resulting complex Gaussian is
//! mapped onto the open unit disk (so the anchor keeps the largest
//! magnitude), and the point is normalized. Demapping inverts each step in
//! closed form.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::bits::{gray_decode, gray_encode, BitString};
use crate::error::check_len;
use crate::tensorlin::{inner, norm};
use crate::{Error, Result};

/// Parameters of one sub-constellation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubConstellationSpec {
    pub ambient_dim: usize,
    /// Bits per real local coordinate.
    pub grid_bits: usize,
    pub cell_bits: usize,
    pub total_bits: usize,
}

impl SubConstellationSpec {
    pub fn new(ambient_dim: usize, grid_bits: usize) -> Result<Self> {
        if ambient_dim < 2 {
            return Err(Error::Config(format!("ambient dimension {ambient_dim} < 2")));
        }
        if grid_bits == 0 || grid_bits > 8 {
            return Err(Error::Config(format!("grid bits {grid_bits} outside 1..=8")));
        }
        let cell_bits = usize::BITS as usize - 1 - ambient_dim.leading_zeros() as usize;
        Ok(SubConstellationSpec {
            ambient_dim,
            grid_bits,
            cell_bits,
            total_bits: cell_bits + 2 * (ambient_dim - 1) * grid_bits,
        })
    }

    pub fn num_cells(&self) -> usize {
        1 << self.cell_bits
    }

    fn levels(&self) -> u32 {
        1 << self.grid_bits
    }

    fn local_coords(&self) -> usize {
        2 * (self.ambient_dim - 1)
    }
}

/// A constellation point together with its address.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassPoint {
    pub coords: Vec<C64>,
    pub cell: usize,
    pub bits: BitString,
}

/// Cell plus grid level of every real local coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Label {
    cell: usize,
    levels: Vec<u32>,
}

fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn phi_inv(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

fn label_from_bits(bits: &[u8], spec: &SubConstellationSpec) -> Label {
    let cell = BitString::from(&bits[..spec.cell_bits]).to_uint() as usize;
    let levels = bits[spec.cell_bits..]
        .chunks(spec.grid_bits)
        .map(|c| gray_decode(BitString::from(c).to_uint()) as u32)
        .collect();
    Label { cell, levels }
}

fn bits_from_label(label: &Label, spec: &SubConstellationSpec) -> BitString {
    let mut bits = BitString::from_uint(label.cell as u64, spec.cell_bits).into_inner();
    for &m in &label.levels {
        bits.extend_from_slice(&BitString::from_uint(gray_encode(m as u64), spec.grid_bits));
    }
    BitString::from(bits)
}

/// Grid level -> point inside the open unit disk.
fn disk_coord(re_level: u32, im_level: u32, spec: &SubConstellationSpec) -> C64 {
    let denom = (1u64 << (spec.grid_bits + 1)) as f64;
    let g = |m: u32| phi_inv((2 * m + 1) as f64 / denom) / std::f64::consts::SQRT_2;
    let u = C64::new(g(re_level), g(im_level));
    let r2 = u.norm_sqr();
    // |u|² ~ Exp(1) maps to a uniform |w|² on (0, 1)
    let radius = (-(-r2).exp_m1()).sqrt();
    u / r2.sqrt() * radius
}

fn level_of(x: f64, spec: &SubConstellationSpec) -> u32 {
    let t = phi(std::f64::consts::SQRT_2 * x);
    let m = (t * spec.levels() as f64).floor();
    m.clamp(0.0, (spec.levels() - 1) as f64) as u32
}

fn codeword(label: &Label, spec: &SubConstellationSpec) -> Vec<C64> {
    let mut coords = vec![C64::new(0.0, 0.0); spec.ambient_dim];
    coords[label.cell] = C64::new(1.0, 0.0);
    let mut energy = 1.0;
    let mut j = 0;
    for (pos, c) in coords.iter_mut().enumerate() {
        if pos == label.cell {
            continue;
        }
        let w = disk_coord(label.levels[2 * j], label.levels[2 * j + 1], spec);
        energy += w.norm_sqr();
        *c = w;
        j += 1;
    }
    let s = 1.0 / energy.sqrt();
    coords.iter_mut().for_each(|c| *c *= s);
    coords
}

/// Maps a bit string onto its constellation point.
pub fn gs_map(bits: &[u8], spec: &SubConstellationSpec) -> Result<GrassPoint> {
    check_len(spec.total_bits, bits.len())?;
    let label = label_from_bits(bits, spec);
    Ok(GrassPoint { coords: codeword(&label, spec), cell: label.cell, bits: BitString::from(bits) })
}

/// Closed-form inverse of the map for a fixed cell.
fn invert_in_cell(v: &[C64], cell: usize, spec: &SubConstellationSpec) -> Label {
    let anchor = v[cell];
    let mut levels = Vec::with_capacity(spec.local_coords());
    for (pos, &z) in v.iter().enumerate() {
        if pos == cell {
            continue;
        }
        let w = z / anchor;
        let r2 = w.norm_sqr().min(1.0 - 1e-12);
        let (re, im) = if r2 > 0.0 {
            let mag = (-(-r2).ln_1p()).sqrt();
            let u = w / r2.sqrt() * mag;
            (u.re, u.im)
        } else {
            (0.0, 0.0)
        };
        levels.push(level_of(re, spec));
        levels.push(level_of(im, spec));
    }
    Label { cell, levels }
}

fn correlation(v: &[C64], a: &[C64]) -> f64 {
    inner(v, a).norm()
}

/// Best label for `v` among the closed-form candidates of the two strongest
/// cells and their one-step grid neighbors.
fn demap_label(v: &[C64], spec: &SubConstellationSpec) -> Result<(Label, Vec<C64>, f64)> {
    check_len(spec.ambient_dim, v.len())?;
    if norm(v) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut cells: Vec<usize> = (0..spec.num_cells()).collect();
    cells.sort_by(|&a, &b| v[b].norm_sqr().total_cmp(&v[a].norm_sqr()).then(a.cmp(&b)));
    cells.truncate(2);

    let mut best: Option<(Label, Vec<C64>, f64)> = None;
    let mut consider = |label: Label| {
        let a = codeword(&label, spec);
        let c = correlation(v, &a);
        if best.as_ref().map_or(true, |(_, _, bc)| c > *bc) {
            best = Some((label, a, c));
        }
    };
    for &cell in &cells {
        if v[cell].norm_sqr() == 0.0 {
            continue;
        }
        let center = invert_in_cell(v, cell, spec);
        for k in 0..center.levels.len() {
            let m = center.levels[k];
            if m > 0 {
                let mut l = center.clone();
                l.levels[k] = m - 1;
                consider(l);
            }
            if m + 1 < spec.levels() {
                let mut l = center.clone();
                l.levels[k] = m + 1;
                consider(l);
            }
        }
        consider(center);
    }
    best.ok_or(Error::ZeroVector)
}

/// Moves to the best single-bit flip of the label while one improves the
/// correlation. Returns the final label, its correlation and the
/// correlation of each single-bit flip.
fn refine(v: &[C64], label: Label, base: f64, spec: &SubConstellationSpec) -> (Label, f64, Vec<f64>) {
    let mut bits = bits_from_label(&label, spec);
    let mut base = base;
    loop {
        let mut flips = Vec::with_capacity(spec.total_bits);
        for l in 0..spec.total_bits {
            bits[l] ^= 1;
            flips.push(correlation(v, &codeword(&label_from_bits(&bits, spec), spec)));
            bits[l] ^= 1;
        }
        let (best_l, &best_c) =
            flips.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0))).expect("non-empty label");
        if best_c <= base {
            return (label_from_bits(&bits, spec), base, flips);
        }
        bits[best_l] ^= 1;
        base = best_c;
    }
}

/// Hard demapping: the candidate codeword maximizing `|vᴴa|`, refined until
/// no single label bit flip improves it.
pub fn gs_demap_hard(v: &[C64], spec: &SubConstellationSpec) -> Result<(BitString, GrassPoint)> {
    let (label, _, c) = demap_label(v, spec)?;
    let (label, _, _) = refine(v, label, c, spec);
    let bits = bits_from_label(&label, spec);
    Ok((bits.clone(), GrassPoint { coords: codeword(&label, spec), cell: label.cell, bits }))
}

/// Approximate per-bit LLRs (positive means bit 1).
///
/// Each LLR is `±η (|vᴴâ| − |vᴴâ_flip|)` where `â` is the hard decision and
/// `â_flip` the codeword whose label differs from it in that one bit. `v` is
/// normalized to unit norm first, so `η` alone carries the reliability.
pub fn gs_llr(v: &[C64], spec: &SubConstellationSpec, eta: f64) -> Result<Vec<f64>> {
    let nv = norm(v);
    let (label, _, c) = demap_label(v, spec)?;
    let (label, base, flips) = refine(v, label, c, spec);
    let bits = bits_from_label(&label, spec);
    Ok(bits
        .iter()
        .zip(flips)
        .map(|(&b, f)| {
            let d = (base - f) / nv * eta;
            if b == 1 { d } else { -d }
        })
        .collect())
}

/// Approximate inverse noise variance of a separated factor:
/// `‖ĥ‖² n / ((n_i − 1) σ²)`.
pub fn compute_eta(h_hat: &[C64], n: usize, n_i: usize, sigma2: f64) -> Result<f64> {
    if n_i < 2 {
        return Err(Error::Config(format!("sub-constellation dimension {n_i} < 2")));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::Config(format!("noise variance {sigma2} must be positive")));
    }
    Ok(crate::tensorlin::norm_sqr(h_hat) * n as f64 / ((n_i - 1) as f64 * sigma2))
}
