//! Thin wrapper over `rustfft` with a shared plan cache.
//!
//! Convention: `forward` computes `F[n] = sum_i f[i] e^{-2 pi i n i / M}` and
//! `inverse` includes the `1/M` factor, so `inverse(forward(f)) == f`.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex, OnceLock};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().expect("fft planner poisoned");
    if inverse {
        p.plan_fft_inverse(len)
    } else {
        p.plan_fft_forward(len)
    }
}

pub fn forward_in_place(data: &mut [Complex64]) {
    plan(data.len(), false).process(data);
}

pub fn inverse_in_place(data: &mut [Complex64]) {
    let n = data.len();
    plan(n, true).process(data);
    let scale = 1.0 / n as f64;
    for z in data.iter_mut() {
        *z *= scale;
    }
}

pub fn forward(data: &[Complex64]) -> Vec<Complex64> {
    let mut out = data.to_vec();
    forward_in_place(&mut out);
    out
}

pub fn inverse(data: &[Complex64]) -> Vec<Complex64> {
    let mut out = data.to_vec();
    inverse_in_place(&mut out);
    out
}

/// Signed integer frequency index of DFT bin `n` on `m` points, in `[-m/2, m/2)`.
#[inline]
pub fn signed_bin(n: usize, m: usize) -> i64 {
    if n < m / 2 {
        n as i64
    } else {
        n as i64 - m as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let x: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let y = inverse(&forward(&x));
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn signed_bins() {
        assert_eq!(signed_bin(0, 8), 0);
        assert_eq!(signed_bin(3, 8), 3);
        assert_eq!(signed_bin(4, 8), -4);
        assert_eq!(signed_bin(7, 8), -1);
    }
}
