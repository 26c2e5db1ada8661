//! Seeded test inputs: random band-limited trigonometric polynomials and
//! hand-picked adversarial shapes.

use crate::fft;
use crate::grid::{GridFunction, TorusGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Real trigonometric polynomial `a_0 + sum_n a_n cos(2 pi n x / L) +
/// b_n sin(2 pi n x / L)` over the frequencies `n / L < max_frequency`, with
/// coefficients uniform on `[-1, 1]`.
pub fn random_trig_poly(grid: &TorusGrid, max_frequency: f64, rng: &mut impl Rng) -> GridFunction {
    let size = grid.size();
    let top = ((max_frequency * grid.period()).ceil() as usize).min(size / 2);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); size];
    let scale = size as f64;
    spectrum[0] = Complex64::new(rng.gen_range(-1.0..=1.0) * scale, 0.0);
    for n in 1..top {
        let a: f64 = rng.gen_range(-1.0..=1.0);
        let b: f64 = rng.gen_range(-1.0..=1.0);
        let c = Complex64::new(a, -b) * (0.5 * scale);
        spectrum[n] = c;
        spectrum[size - n] = c.conj();
    }
    // The FFT places x_0 = -L/2, so bin n picks up (-1)^n.
    for (n, z) in spectrum.iter_mut().enumerate() {
        if n % 2 == 1 {
            *z = -*z;
        }
    }
    fft::inverse_in_place(&mut spectrum);
    GridFunction::from_complex(*grid, spectrum)
        .expect("size preserved")
        .into_real()
}

/// `count` functions band-limited to `|xi| < 2^{j_max - 2}`, from one seeded
/// stream.
pub fn band_limited_corpus(grid: &TorusGrid, count: usize, seed: u64) -> Vec<GridFunction> {
    let fmax = 2f64.powi(grid.j_max() - 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_trig_poly(grid, fmax, &mut rng)).collect()
}

/// Like [`band_limited_corpus`] but reaching `|xi| < 2^{j_max}`, so that
/// every band carries energy.
pub fn wideband_corpus(grid: &TorusGrid, count: usize, seed: u64) -> Vec<GridFunction> {
    let fmax = 2f64.powi(grid.j_max());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000_0000_0001);
    (0..count).map(|_| random_trig_poly(grid, fmax, &mut rng)).collect()
}

/// Steps, spikes, odd sign patterns, alternating signs, narrow boxes, random
/// signs and a constant.
pub fn adversarial_corpus(grid: &TorusGrid, seed: u64) -> Vec<(String, GridFunction)> {
    let size = grid.size();
    let mut out = Vec::new();
    let mut push = |name: String, v: Vec<f64>| {
        out.push((name, GridFunction::from_real(*grid, v).expect("size")));
    };
    for p in [1, size / 3, size / 2, size - 2] {
        push(
            format!("step@{p}"),
            (0..size).map(|i| if i >= p { 1.0 } else { 0.0 }).collect(),
        );
        let mut spike = vec![0.0; size];
        spike[p] = 1.0;
        push(format!("spike@{p}"), spike.clone());
        spike[p] = -3.0;
        push(format!("negative-spike@{p}"), spike);
        push(
            format!("sign@{p}"),
            (0..size)
                .map(|i| (i as f64 - p as f64).signum())
                .collect(),
        );
    }
    push(
        "alternating".into(),
        (0..size).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
    );
    for w in [1usize, 3, 16] {
        let c = size / 2;
        push(
            format!("box{w}"),
            (0..size)
                .map(|i| if i.abs_diff(c) <= w { 1.0 } else { 0.0 })
                .collect(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    push(
        "random-signs".into(),
        (0..size)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect(),
    );
    push("constant".into(), vec![2.5; size]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Spectrum;
    use std::f64::consts::PI;

    #[test]
    fn trig_poly_matches_direct_evaluation() {
        let g = TorusGrid::new(4.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_trig_poly(&g, 1.0, &mut rng);
        // replay the coefficient stream
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a0: f64 = rng.gen_range(-1.0..=1.0);
        let coeffs: Vec<(f64, f64)> = (1..4)
            .map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        for (i, x) in g.abscissas().enumerate() {
            let mut v = a0;
            for (n, (a, b)) in coeffs.iter().enumerate() {
                let w = 2.0 * PI * (n + 1) as f64 * x / 4.0;
                v += a * w.cos() + b * w.sin();
            }
            assert!((f.samples()[i].re - v).abs() < 1e-13);
        }
    }

    #[test]
    fn corpus_is_band_limited_and_reproducible() {
        let g = TorusGrid::new(16.0, 1024).unwrap();
        let a = band_limited_corpus(&g, 3, 42);
        let b = band_limited_corpus(&g, 3, 42);
        assert_eq!(a, b);
        let limit = 2f64.powi(g.j_max() - 2);
        let spec = Spectrum::of(&a[0]);
        for (n, z) in spec.coeffs().iter().enumerate() {
            if g.frequency(n).abs() >= limit {
                assert!(z.norm() < 1e-9, "bin {n}");
            }
        }
        assert_ne!(a, band_limited_corpus(&g, 3, 43));
    }
}
