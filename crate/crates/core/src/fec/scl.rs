//! Successive-cancellation list decoding with lazily copied per-layer arrays.
//!
//! Internally LLRs follow the `ln P(0)/P(1)` convention; the public entry
//! points take the crate-wide convention (positive means bit 1) and negate.

use super::crc::crc_check;
use super::polar::PolarSpec;
use crate::bits::BitString;
use crate::error::check_len;
use crate::Result;

/// Magnitude standing in for a known-zero (shortened) output.
const KNOWN_ZERO_LLR: f64 = 1e9;

#[inline]
fn f_minsum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

#[inline]
fn penalty(llr: f64, bit: u8) -> f64 {
    if (bit == 0 && llr < 0.0) || (bit == 1 && llr > 0.0) {
        llr.abs()
    } else {
        0.0
    }
}

struct ListDecoder<'a> {
    n: usize,
    list: usize,
    channel: Vec<f64>,
    frozen: &'a [bool],
    /// `p[λ]`: `list` arrays of length `2^(n-λ)`; layer 0 lives in `channel`.
    p: Vec<Vec<f64>>,
    c: Vec<Vec<[u8; 2]>>,
    path_to_array: Vec<Vec<usize>>,
    refcount: Vec<Vec<usize>>,
    free_arrays: Vec<Vec<usize>>,
    active: Vec<bool>,
    free_paths: Vec<usize>,
    metric: Vec<f64>,
    info: Vec<Vec<u8>>,
}

impl<'a> ListDecoder<'a> {
    fn new(channel: Vec<f64>, frozen: &'a [bool], list: usize) -> Self {
        let n = channel.len().trailing_zeros() as usize;
        let layer_len = |l: usize| 1usize << (n - l);
        ListDecoder {
            n,
            list,
            frozen,
            p: (0..=n).map(|l| if l == 0 { Vec::new() } else { vec![0.0; list * layer_len(l)] }).collect(),
            c: (0..=n).map(|l| if l == 0 { Vec::new() } else { vec![[0, 0]; list * layer_len(l)] }).collect(),
            path_to_array: vec![vec![usize::MAX; list]; n + 1],
            refcount: vec![vec![0; list]; n + 1],
            free_arrays: (0..=n).map(|_| (0..list).rev().collect()).collect(),
            active: vec![false; list],
            free_paths: (0..list).rev().collect(),
            metric: vec![0.0; list],
            info: vec![Vec::new(); list],
            channel,
        }
    }

    fn len(&self, layer: usize) -> usize {
        1 << (self.n - layer)
    }

    fn assign_initial_path(&mut self) -> usize {
        let path = self.free_paths.pop().expect("free path");
        self.active[path] = true;
        for l in 1..=self.n {
            let s = self.free_arrays[l].pop().expect("free array");
            self.path_to_array[l][path] = s;
            self.refcount[l][s] = 1;
        }
        path
    }

    fn clone_path(&mut self, from: usize) -> usize {
        let path = self.free_paths.pop().expect("free path");
        self.active[path] = true;
        self.metric[path] = self.metric[from];
        self.info[path] = self.info[from].clone();
        for l in 1..=self.n {
            let s = self.path_to_array[l][from];
            self.path_to_array[l][path] = s;
            self.refcount[l][s] += 1;
        }
        path
    }

    fn kill_path(&mut self, path: usize) {
        self.active[path] = false;
        self.free_paths.push(path);
        for l in 1..=self.n {
            let s = self.path_to_array[l][path];
            self.refcount[l][s] -= 1;
            if self.refcount[l][s] == 0 {
                self.free_arrays[l].push(s);
            }
        }
    }

    /// Array index of `(layer, path)`, copied first if shared.
    fn writable(&mut self, layer: usize, path: usize) -> usize {
        let s = self.path_to_array[layer][path];
        if self.refcount[layer][s] == 1 {
            return s;
        }
        let t = self.free_arrays[layer].pop().expect("free array");
        let len = self.len(layer);
        self.p[layer].copy_within(s * len..(s + 1) * len, t * len);
        self.c[layer].copy_within(s * len..(s + 1) * len, t * len);
        self.refcount[layer][s] -= 1;
        self.refcount[layer][t] = 1;
        self.path_to_array[layer][path] = t;
        t
    }

    fn active_paths(&self) -> Vec<usize> {
        (0..self.list).filter(|&p| self.active[p]).collect()
    }

    fn calc_p(&mut self, layer: usize, phase: usize) {
        if layer == 0 {
            return;
        }
        if phase % 2 == 0 {
            self.calc_p(layer - 1, phase >> 1);
        }
        let len = self.len(layer);
        for path in self.active_paths() {
            let s = self.writable(layer, path);
            let (lo, hi) = self.p.split_at_mut(layer);
            let prev: &[f64] = if layer == 1 {
                &self.channel
            } else {
                let sp = self.path_to_array[layer - 1][path];
                &lo[layer - 1][sp * 2 * len..(sp + 1) * 2 * len]
            };
            let cur = &mut hi[0][s * len..(s + 1) * len];
            if phase % 2 == 0 {
                for (b, out) in cur.iter_mut().enumerate() {
                    *out = f_minsum(prev[b], prev[b + len]);
                }
            } else {
                let cc = &self.c[layer][s * len..(s + 1) * len];
                for (b, out) in cur.iter_mut().enumerate() {
                    let a = prev[b];
                    *out = prev[b + len] + if cc[b][0] == 1 { -a } else { a };
                }
            }
        }
    }

    fn update_c(&mut self, layer: usize, phase: usize) {
        let psi = phase >> 1;
        if layer == 1 {
            return;
        }
        let len = self.len(layer);
        for path in self.active_paths() {
            let sc = self.path_to_array[layer][path];
            let sp = self.writable(layer - 1, path);
            let (lo, hi) = self.c.split_at_mut(layer);
            let cur = &hi[0][sc * len..(sc + 1) * len];
            let prev = &mut lo[layer - 1][sp * 2 * len..(sp + 1) * 2 * len];
            for b in 0..len {
                prev[b][psi % 2] = cur[b][0] ^ cur[b][1];
                prev[b + len][psi % 2] = cur[b][1];
            }
        }
        if psi % 2 == 1 {
            self.update_c(layer - 1, psi);
        }
    }

    fn bit_llr(&self, path: usize) -> f64 {
        self.p[self.n][self.path_to_array[self.n][path]]
    }

    fn set_bit(&mut self, path: usize, phase: usize, bit: u8) {
        let s = self.writable(self.n, path);
        self.c[self.n][s][phase % 2] = bit;
    }

    fn decode(mut self) -> Vec<(Vec<u8>, f64)> {
        let big_n = 1usize << self.n;
        let first = self.assign_initial_path();
        self.metric[first] = 0.0;
        for phase in 0..big_n {
            self.calc_p(self.n, phase);
            if self.frozen[phase] {
                for path in self.active_paths() {
                    let llr = self.bit_llr(path);
                    self.metric[path] += penalty(llr, 0);
                    self.set_bit(path, phase, 0);
                }
            } else {
                self.continue_paths(phase);
            }
            if phase % 2 == 1 {
                self.update_c(self.n, phase);
            }
        }
        let mut out: Vec<(Vec<u8>, f64)> = self
            .active_paths()
            .into_iter()
            .map(|p| (std::mem::take(&mut self.info[p]), self.metric[p]))
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1));
        out
    }

    fn continue_paths(&mut self, phase: usize) {
        let paths = self.active_paths();
        let mut cand: Vec<(f64, usize, u8)> = Vec::with_capacity(2 * paths.len());
        for &p in &paths {
            let llr = self.bit_llr(p);
            cand.push((self.metric[p] + penalty(llr, 0), p, 0));
            cand.push((self.metric[p] + penalty(llr, 1), p, 1));
        }
        let mut keep = vec![[false; 2]; self.list];
        if cand.len() > self.list {
            cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            cand.truncate(self.list);
        }
        for &(_, p, b) in &cand {
            keep[p][b as usize] = true;
        }
        for &p in &paths {
            if !keep[p][0] && !keep[p][1] {
                self.kill_path(p);
            }
        }
        for &p in &paths {
            let llr = self.bit_llr(p);
            match keep[p] {
                [true, true] => {
                    let q = self.clone_path(p);
                    self.metric[q] += penalty(llr, 1);
                    self.info[q].push(1);
                    self.set_bit(q, phase, 1);
                    self.metric[p] += penalty(llr, 0);
                    self.info[p].push(0);
                    self.set_bit(p, phase, 0);
                }
                [true, false] | [false, true] => {
                    let b = if keep[p][0] { 0 } else { 1 };
                    self.metric[p] += penalty(llr, b);
                    self.info[p].push(b);
                    self.set_bit(p, phase, b);
                }
                [false, false] => {}
            }
        }
    }
}

fn internal_llrs(llrs: &[f64], spec: &PolarSpec) -> Vec<f64> {
    let mut ch: Vec<f64> = llrs.iter().map(|&l| if l.is_finite() { -l } else if l.is_nan() { 0.0 } else { -l.signum() * KNOWN_ZERO_LLR }).collect();
    ch.resize(spec.mother_len, KNOWN_ZERO_LLR);
    ch
}

/// Every surviving list entry as `(info bits, path metric)`, best first.
pub fn scl_decode_info(llrs: &[f64], spec: &PolarSpec) -> Result<Vec<(BitString, f64)>> {
    check_len(spec.tx_len, llrs.len())?;
    let frozen = spec.is_frozen_mask();
    let dec = ListDecoder::new(internal_llrs(llrs, spec), &frozen, spec.list_size);
    Ok(dec.decode().into_iter().map(|(b, m)| (BitString::from(b), m)).collect())
}

/// Most likely CRC-passing candidate, CRC stripped; `None` when no list
/// entry passes.
pub fn scl_decode(llrs: &[f64], spec: &PolarSpec) -> Result<Option<BitString>> {
    let list = scl_decode_info(llrs, spec)?;
    Ok(list
        .into_iter()
        .find(|(info, _)| crc_check(info, spec.crc))
        .map(|(info, _)| info.slice(0, spec.msg_len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fec::{crc_append, polar_encode, CrcPoly};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn noiseless_llrs(bits: &[u8]) -> Vec<f64> {
        bits.iter().map(|&b| if b == 1 { 20.0 } else { -20.0 }).collect()
    }

    #[test]
    fn noiseless_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let specs = [
            PolarSpec::new(40, CrcPoly::CRC11, 128, 32).unwrap(),
            PolarSpec::new(160, CrcPoly::CRC16_CCITT, 500, 32).unwrap(),
            PolarSpec::new(40, CrcPoly::CRC11, 128, 1).unwrap(),
        ];
        for spec in &specs {
            for _ in 0..200 {
                let m = BitString::random(spec.msg_len(), &mut rng);
                let cw = polar_encode(&crc_append(&m, spec.crc), spec).unwrap();
                let got = scl_decode(&noiseless_llrs(&cw.bits), spec).unwrap();
                assert_eq!(got, Some(m));
            }
        }
    }

    #[test]
    fn zero_llrs_do_not_crash() {
        let spec = PolarSpec::new(40, CrcPoly::CRC11, 128, 32).unwrap();
        let out = scl_decode(&vec![0.0; 128], &spec).unwrap();
        if let Some(m) = out {
            assert_eq!(m.len(), 40);
        }
        assert!(scl_decode(&vec![0.0; 127], &spec).is_err());
    }

    #[test]
    fn list_is_sorted_and_bounded() {
        let spec = PolarSpec::new(40, CrcPoly::CRC11, 128, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let llrs: Vec<f64> = (0..128).map(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0)).collect();
        let list = scl_decode_info(&llrs, &spec).unwrap();
        assert_eq!(list.len(), 8);
        assert!(list.windows(2).all(|w| w[0].1 <= w[1].1));
    }
}
