//! Smooth cutoff, Littlewood-Paley multipliers and projections, the
//! Besov-type part of the `B` norm, and the mollifier.
//!
//! All projections are exact discrete circular convolutions, applied on the
//! DFT side. Multipliers are radial, so they are stored as a profile over
//! `|n| = 0..=M/2` and shared through a process-wide cache.

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{norm, GridFunction, NormKind, TorusGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

/// `exp(-1/x)` for `x > 0`, zero otherwise.
pub fn smooth_step(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// The fixed cutoff: nonincreasing, `1` on `(-inf, 1]`, `0` on `[2, inf)`,
/// built as `s(2 - t) / (s(2 - t) + s(t - 1))`.
pub fn phi(t: f64) -> f64 {
    if t <= 1.0 {
        return 1.0;
    }
    if t >= 2.0 {
        return 0.0;
    }
    let a = smooth_step(2.0 - t);
    let b = smooth_step(t - 1.0);
    a / (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierKind {
    /// `phi(|xi| / 2^j)`
    Low,
    /// `phi(|xi| / 2^j) - phi(|xi| / 2^(j-1))`
    Band,
    /// `phi(|xi| / 2^(j+1)) - phi(|xi| / 2^(j-2))`, equal to one on the
    /// support of `Band` at the same `j`.
    Widened,
}

impl MultiplierKind {
    pub fn symbol(self, xi_abs: f64, j: i32) -> f64 {
        let s = |e: i32| phi(xi_abs / 2f64.powi(e));
        match self {
            MultiplierKind::Low => s(j),
            MultiplierKind::Band => s(j) - s(j - 1),
            MultiplierKind::Widened => s(j + 1) - s(j - 2),
        }
    }
}

/// A radial Fourier multiplier sampled on the frequency grid of a torus.
#[derive(Debug, Clone)]
pub struct SpectralMultiplier {
    grid: TorusGrid,
    kind: MultiplierKind,
    j: i32,
    // profile[n] = symbol at |xi| = n / L, n = 0..=M/2
    profile: Arc<Vec<f64>>,
}

impl SpectralMultiplier {
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn kind(&self) -> MultiplierKind {
        self.kind
    }

    pub fn j(&self) -> i32 {
        self.j
    }

    /// Value on DFT bin `bin`.
    #[inline]
    pub fn at_bin(&self, bin: usize) -> f64 {
        let n = fft::signed_bin(bin, self.grid.size()).unsigned_abs() as usize;
        self.profile[n]
    }

    /// Values in DFT bin order.
    pub fn values(&self) -> Vec<f64> {
        (0..self.grid.size()).map(|b| self.at_bin(b)).collect()
    }
}

type CacheKey = (u64, usize, MultiplierKind, i32);

struct MultiplierCache {
    map: RwLock<HashMap<CacheKey, Arc<Vec<f64>>>>,
}

// Profiles for a 2^22 grid are 16 MiB each; drop everything past this.
const CACHE_BUDGET_BYTES: usize = 512 << 20;

fn cache() -> &'static MultiplierCache {
    static CACHE: OnceLock<MultiplierCache> = OnceLock::new();
    CACHE.get_or_init(|| MultiplierCache {
        map: RwLock::new(HashMap::new()),
    })
}

fn compute_profile(grid: &TorusGrid, kind: MultiplierKind, j: i32) -> Vec<f64> {
    (0..=grid.size() / 2)
        .map(|n| kind.symbol(n as f64 / grid.period(), j))
        .collect()
}

/// Multiplier of the given kind at scale `j`; `j` may be negative. `Band`
/// and `Widened` are limited to `j <= j_max`.
pub fn multiplier(grid: &TorusGrid, kind: MultiplierKind, j: i32) -> Result<SpectralMultiplier> {
    if kind != MultiplierKind::Low && j > grid.j_max() {
        return Err(Error::BandRange {
            j,
            j_max: grid.j_max(),
        });
    }
    let key = (grid.period().to_bits(), grid.size(), kind, j);
    let cached = cache().map.read().expect("cache poisoned").get(&key).cloned();
    let profile = match cached {
        Some(p) => p,
        None => {
            let fresh = Arc::new(compute_profile(grid, kind, j));
            let mut map = cache().map.write().expect("cache poisoned");
            let used: usize = map.values().map(|v| v.len() * 8).sum();
            if used + fresh.len() * 8 > CACHE_BUDGET_BYTES {
                map.clear();
            }
            // First writer wins; a concurrent loser adopts the stored copy.
            map.entry(key).or_insert(fresh).clone()
        }
    };
    Ok(SpectralMultiplier {
        grid: *grid,
        kind,
        j,
        profile,
    })
}

/// DFT of a grid function, reusable across several multipliers.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
    is_real: bool,
}

impl Spectrum {
    pub fn of(f: &GridFunction) -> Self {
        // A real-flagged input may carry imaginary parts at rounding level;
        // transform the real part so the spectrum is exactly Hermitian.
        let coeffs = if f.is_real() {
            let mut data: Vec<Complex64> =
                f.samples().iter().map(|z| Complex64::new(z.re, 0.0)).collect();
            fft::forward_in_place(&mut data);
            data
        } else {
            fft::forward(f.samples())
        };
        Spectrum {
            grid: *f.grid(),
            coeffs,
            is_real: f.is_real(),
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Inverse transform of `coeffs * weight(bin)`.
    pub fn filtered(&self, weight: impl Fn(usize) -> f64) -> GridFunction {
        let mut data: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(b, z)| z * weight(b))
            .collect();
        fft::inverse_in_place(&mut data);
        self.finish(data)
    }

    pub fn apply(&self, m: &SpectralMultiplier) -> GridFunction {
        self.filtered(|b| m.at_bin(b))
    }

    /// `(||m1 f||_inf, ||m2 f||_inf)` for a real input from a single inverse
    /// transform: both outputs are real, so they travel as the real and
    /// imaginary parts of `(m1 + i m2) f`.
    fn real_pair_sup(&self, m1: &SpectralMultiplier, m2: &SpectralMultiplier) -> (f64, f64) {
        debug_assert!(self.is_real);
        let mut data: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(b, z)| z * Complex64::new(m1.at_bin(b), m2.at_bin(b)))
            .collect();
        fft::inverse_in_place(&mut data);
        data.iter()
            .fold((0.0, 0.0), |(a, b), z| (f64::max(a, z.re.abs()), f64::max(b, z.im.abs())))
    }

    fn finish(&self, data: Vec<Complex64>) -> GridFunction {
        let f = GridFunction::from_complex(self.grid, data).expect("size preserved");
        // Even real multipliers keep real inputs real.
        if self.is_real {
            f.into_real()
        } else {
            f
        }
    }
}

pub fn project(f: &GridFunction, kind: MultiplierKind, j: i32) -> Result<GridFunction> {
    let m = multiplier(f.grid(), kind, j)?;
    Ok(Spectrum::of(f).apply(&m))
}

/// Besov part, `L^2` part and their sum, with the per-band breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BNormReport {
    pub besov_part: f64,
    pub l2_part: f64,
    pub total: f64,
    pub low_band: f64,
    pub j_max: i32,
    /// `(j, ||P_j f||_inf)` for `j = 1..=j_max`.
    pub per_band: Vec<(i32, f64)>,
}

/// `||P_{<=0} f||_inf + max_{1<=j<=j_max} ||P_j f||_inf`. The returned report
/// has `l2_part = 0` and `total = besov_part`.
pub fn besov_norm(f: &GridFunction) -> BNormReport {
    let grid = *f.grid();
    let spec = Spectrum::of(f);
    let sup = |g: GridFunction| norm(&g, NormKind::Linf);
    let low = multiplier(&grid, MultiplierKind::Low, 0).expect("low-pass always admissible");
    let band = |j: i32| multiplier(&grid, MultiplierKind::Band, j).expect("j <= j_max");
    let j_max = grid.j_max();
    let (low_band, per_band) = if spec.is_real {
        let mut per_band = Vec::with_capacity(j_max.max(0) as usize);
        let (low_band, first) = if j_max >= 1 {
            let (a, b) = spec.real_pair_sup(&low, &band(1));
            per_band.push((1, b));
            (a, 2)
        } else {
            (sup(spec.apply(&low)), 1)
        };
        let mut j = first;
        while j <= j_max {
            if j < j_max {
                let (a, b) = spec.real_pair_sup(&band(j), &band(j + 1));
                per_band.push((j, a));
                per_band.push((j + 1, b));
            } else {
                per_band.push((j, sup(spec.apply(&band(j)))));
            }
            j += 2;
        }
        (low_band, per_band)
    } else {
        let low_band = sup(spec.apply(&low));
        let per_band = (1..=j_max).map(|j| (j, sup(spec.apply(&band(j))))).collect();
        (low_band, per_band)
    };
    let top = per_band.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    let besov_part = low_band + top;
    BNormReport {
        besov_part,
        l2_part: 0.0,
        total: besov_part,
        low_band,
        j_max,
        per_band,
    }
}

/// Full `B` norm: Besov part plus `L^2` norm.
pub fn b_norm(f: &GridFunction) -> BNormReport {
    let mut r = besov_norm(f);
    r.l2_part = norm(f, NormKind::L2);
    r.total = r.besov_part + r.l2_part;
    r
}

/// `|| (P_{<=0} + sum_{j=1}^{J} P_j) f - f ||_inf`, with every projection
/// applied separately and summed in physical space.
pub fn telescope_residual(f: &GridFunction, big_j: i32) -> Result<f64> {
    let grid = *f.grid();
    if big_j > grid.j_max() {
        return Err(Error::BandRange {
            j: big_j,
            j_max: grid.j_max(),
        });
    }
    let spec = Spectrum::of(f);
    let mut acc = spec.apply(&multiplier(&grid, MultiplierKind::Low, 0)?);
    for j in 1..=big_j {
        let piece = spec.apply(&multiplier(&grid, MultiplierKind::Band, j)?);
        acc = acc.try_add(&piece)?;
    }
    Ok(acc.max_abs_diff(f))
}

/// The kernel `h` of a multiplier as a function of `x`, centered at the
/// origin, normalized so that `P f (x_i) = dx * sum_l h(x_l) f(x_i - x_l)`.
pub fn lp_kernel(grid: &TorusGrid, kind: MultiplierKind, j: i32) -> Result<GridFunction> {
    let m = multiplier(grid, kind, j)?;
    Ok(kernel_from_symbol(grid, |b| m.at_bin(b)))
}

fn kernel_from_symbol(grid: &TorusGrid, symbol: impl Fn(usize) -> f64) -> GridFunction {
    let size = grid.size();
    let mut data: Vec<Complex64> = (0..size).map(|b| Complex64::new(symbol(b), 0.0)).collect();
    fft::inverse_in_place(&mut data);
    let c = grid.center();
    let inv_dx = 1.0 / grid.spacing();
    // data[l] is the weight at offset l*dx; move offset 0 to the center.
    let values = (0..size)
        .map(|i| data[(i + size - c) % size].re * inv_dx)
        .collect();
    GridFunction::from_real(*grid, values).expect("size preserved")
}

/// Derivative by multiplication with `2 pi i xi` (the Nyquist bin is
/// dropped, as its derivative is ambiguous).
pub fn spectral_derivative(f: &GridFunction) -> GridFunction {
    let grid = *f.grid();
    let size = grid.size();
    let mut data = fft::forward(f.samples());
    for (b, z) in data.iter_mut().enumerate() {
        if b == size / 2 {
            *z = Complex64::new(0.0, 0.0);
        } else {
            *z *= Complex64::new(0.0, 2.0 * PI * grid.frequency(b));
        }
    }
    fft::inverse_in_place(&mut data);
    let out = GridFunction::from_complex(grid, data).expect("size preserved");
    if f.is_real() {
        out.into_real()
    } else {
        out
    }
}

/// `||h_{<=0}||_1 + max_j ||h_j||_1`: by Young's inequality the Besov part
/// never exceeds this times `||f||_inf`.
pub fn embedding_constant(grid: &TorusGrid) -> Result<f64> {
    let l1 = |kind, j| -> Result<f64> { Ok(norm(&lp_kernel(grid, kind, j)?, NormKind::L1)) };
    let low = l1(MultiplierKind::Low, 0)?;
    let mut top: f64 = 0.0;
    for j in 1..=grid.j_max() {
        top = top.max(l1(MultiplierKind::Band, j)?);
    }
    Ok(low + top)
}

/// Nonnegative unit-mass mollifier `c * s(1 - x^2)` on `|x| < 1`, sampled on
/// the grid with `dx * sum = 1`.
pub fn mollifier(grid: &TorusGrid) -> Result<GridFunction> {
    if grid.period() < 4.0 {
        return Err(Error::Support {
            period: grid.period(),
            required: 4.0,
        });
    }
    let raw: Vec<f64> = grid.abscissas().map(|x| smooth_step(1.0 - x * x)).collect();
    let mass: f64 = raw.iter().sum::<f64>() * grid.spacing();
    GridFunction::from_real(*grid, raw.into_iter().map(|v| v / mass).collect())
}

/// Circular convolution with [`mollifier`].
pub fn mollifier_apply(f: &GridFunction) -> Result<GridFunction> {
    let grid = *f.grid();
    let rho = mollifier(&grid)?;
    let c = grid.center();
    let size = grid.size();
    let dx = grid.spacing();
    // Kernel weights by offset, offset 0 first.
    let mut weights: Vec<Complex64> = (0..size)
        .map(|l| Complex64::new(rho.samples()[(l + c) % size].re * dx, 0.0))
        .collect();
    fft::forward_in_place(&mut weights);
    let spec = Spectrum::of(f);
    let mut data: Vec<Complex64> = spec
        .coeffs()
        .iter()
        .zip(&weights)
        .map(|(a, w)| a * w)
        .collect();
    fft::inverse_in_place(&mut data);
    let out = GridFunction::from_complex(grid, data)?;
    Ok(if f.is_real() { out.into_real() } else { out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;

    fn wave(grid: TorusGrid, freq: f64) -> GridFunction {
        GridFunction::from_complex_fn(grid, |x| Complex64::from_polar(1.0, 2.0 * PI * freq * x))
    }

    #[test]
    fn phi_anchor_values() {
        assert_eq!(phi(0.5), 1.0);
        assert_eq!(phi(3.0), 0.0);
        assert_eq!(phi(1.5), 0.5);
        assert_eq!(phi(1.0), 1.0);
        assert_eq!(phi(2.0), 0.0);
        let mut prev = 1.0;
        for i in 0..=400 {
            let v = phi(i as f64 / 100.0);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn multiplier_examples() {
        let g = TorusGrid::new(16.0, 4096).unwrap();
        for j in 1..=g.j_max() {
            let band = multiplier(&g, MultiplierKind::Band, j).unwrap();
            let bin = (2f64.powi(j) * g.period()) as usize;
            assert_eq!(band.at_bin(bin), 1.0);
            let wide = multiplier(&g, MultiplierKind::Widened, j).unwrap();
            for b in 0..g.size() {
                if band.at_bin(b) != 0.0 {
                    assert_eq!(wide.at_bin(b), 1.0, "j={j} bin={b}");
                }
            }
        }
        let low = multiplier(&g, MultiplierKind::Low, 0).unwrap();
        assert_eq!(low.at_bin(0), 1.0);
        assert!(matches!(
            multiplier(&g, MultiplierKind::Band, g.j_max() + 1),
            Err(Error::BandRange { .. })
        ));
    }

    #[test]
    fn band_projection_of_pure_wave() {
        let g = TorusGrid::new(16.0, 1024).unwrap();
        let f = wave(g, 3.0);
        let p = project(&f, MultiplierKind::Band, 1).unwrap();
        let want = f.scale(0.5);
        assert!(p.max_abs_diff(&want) < 1e-12);
        let c = GridFunction::constant(g, 4.0);
        for j in 1..=g.j_max() {
            let p = project(&c, MultiplierKind::Band, j).unwrap();
            assert!(norm(&p, NormKind::Linf) < 1e-13);
        }
    }

    #[test]
    fn besov_and_b_norm_of_pure_wave() {
        let g = TorusGrid::new(16.0, 1024).unwrap();
        let r = b_norm(&wave(g, 3.0));
        assert!(r.low_band < 1e-13);
        assert!((r.per_band[0].1 - 0.5).abs() < 1e-12);
        assert!((r.per_band[1].1 - 0.5).abs() < 1e-12);
        assert!((r.besov_part - 0.5).abs() < 1e-12);
        assert!((r.l2_part - 4.0).abs() < 1e-12);
        assert!((r.total - 4.5).abs() < 1e-12);
        assert_eq!(b_norm(&GridFunction::zeros(g)).total, 0.0);
    }

    #[test]
    fn telescope_examples() {
        let g = TorusGrid::new(16.0, 1024).unwrap();
        let f = GridFunction::from_fn(g, |x| (2.0 * PI * 2.0 * x).cos() + (2.0 * PI * 0.5 * x).sin());
        assert!(telescope_residual(&f, 1).unwrap() < 1e-10);
        let w = wave(g, 2f64.powi(4));
        assert!((telescope_residual(&w, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(telescope_residual(&f, g.j_max() + 1).is_err());
    }

    #[test]
    fn mollifier_mass_and_positivity() {
        let g = TorusGrid::new(16.0, 1024).unwrap();
        let c = GridFunction::constant(g, 2.0);
        let out = mollifier_apply(&c).unwrap();
        assert!(out.max_abs_diff(&c) < 1e-12);
        let f = GridFunction::from_fn(g, |x| (x * 3.0).sin().powi(2));
        let out = mollifier_apply(&f).unwrap();
        assert!(out.samples().iter().all(|z| z.re >= -1e-14));
        let mean = |h: &GridFunction| h.samples().iter().map(|z| z.re).sum::<f64>();
        assert!((mean(&out) - mean(&f)).abs() < 1e-10 * mean(&f));
        assert!(mollifier(&TorusGrid::new(2.0, 64).unwrap()).is_err());
    }

    #[test]
    fn lp_kernel_is_mean_zero_and_reproduces_projection() {
        let g = TorusGrid::new(16.0, 512).unwrap();
        let h = lp_kernel(&g, MultiplierKind::Band, 2).unwrap();
        let mass: f64 = h.samples().iter().map(|z| z.re).sum::<f64>() * g.spacing();
        assert!(mass.abs() < 1e-12);
        // Direct convolution at one point against the spectral projection.
        let f = GridFunction::from_fn(g, |x| (-(x * x)).exp() * (5.0 * x).cos());
        let p = project(&f, MultiplierKind::Band, 2).unwrap();
        let i0 = 300usize;
        let c = g.center() as isize;
        let m = g.size() as isize;
        let direct: f64 = (0..m)
            .map(|i| {
                let off = i - c;
                h.samples()[i as usize].re * f.samples()[(i0 as isize - off).rem_euclid(m) as usize].re
            })
            .sum::<f64>()
            * g.spacing();
        assert!((direct - p.samples()[i0].re).abs() < 1e-12);
    }
}
