//! Uniform periodic grids, sampled functions, ball averages and dyadic
//! dilations.
//!
//! A [`TorusGrid`] of period `L` and size `M` samples at `x_i = i*dx - L/2`,
//! so the origin sits at the center index `M/2`. Functions are regarded as
//! living on the real line, equal to their samples on `[-L/2, L/2)` and
//! vanishing outside; test data is supported well inside that window.

use crate::dd::CircularPrefix;
use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;
use std::fmt;

/// Global relative tolerance for identities that hold exactly in exact
/// arithmetic.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    period: f64,
    size: usize,
    spacing: f64,
}

fn is_pow2_f64(x: f64) -> bool {
    x > 0.0 && x.is_finite() && x == 2f64.powi(x.log2().round() as i32)
}

impl TorusGrid {
    /// Build a grid; `period` must be a power of two `>= 2`, `size` a power
    /// of two `>= 16`.
    pub fn new(period: f64, size: usize) -> Result<Self> {
        if !(period >= 2.0 && period.fract() == 0.0 && is_pow2_f64(period)) {
            return Err(Error::config(
                "period",
                format!("period must be a power of two >= 2, got {period}"),
            ));
        }
        Self::with_period(period, size)
    }

    // Same checks on `size`, but any power-of-two period. Used for the
    // change-of-variables rescaling, which may shrink the period below 2.
    fn with_period(period: f64, size: usize) -> Result<Self> {
        if !is_pow2_f64(period) {
            return Err(Error::config(
                "period",
                format!("period must be a power of two, got {period}"),
            ));
        }
        if size < 16 || !size.is_power_of_two() {
            return Err(Error::config(
                "size",
                format!("size must be a power of two >= 16, got {size}"),
            ));
        }
        Ok(TorusGrid {
            period,
            size,
            spacing: period / size as f64,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the sample at `x = 0`.
    pub fn center(&self) -> usize {
        self.size / 2
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing
    }

    pub fn abscissas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(move |i| self.x(i))
    }

    /// Highest resolvable frequency `M / (2L)`.
    pub fn nyquist(&self) -> f64 {
        self.size as f64 / (2.0 * self.period)
    }

    /// Frequency `n / L` of DFT bin `n`, in `[-M/(2L), M/(2L))`.
    pub fn frequency(&self, bin: usize) -> f64 {
        fft::signed_bin(bin, self.size) as f64 / self.period
    }

    /// Top Littlewood-Paley band kept on this grid: `log2(M/(2L)) - 1`.
    pub fn j_max(&self) -> i32 {
        self.nyquist().log2().round() as i32 - 1
    }

    /// Largest admissible ball radius index, `M/2 - 1`.
    pub fn max_radius_index(&self) -> usize {
        self.size / 2 - 1
    }

    /// Radius cap `r <= L/4` in index units.
    pub fn radius_cap_index(&self) -> usize {
        self.size / 4
    }

    /// Same sample count, period multiplied by `2^-m`. Samples keep their
    /// index, so this is the change of variables `x -> 2^m x`.
    pub fn rescaled(&self, m: i32) -> Result<Self> {
        Self::with_period(self.period * 2f64.powi(-m), self.size)
    }
}

impl fmt::Display for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.period, self.size)
    }
}

/// Samples of a function on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: TorusGrid,
    samples: Vec<Complex64>,
    is_real: bool,
}

impl GridFunction {
    pub fn from_complex(grid: TorusGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.size() {
            return Err(Error::config(
                "samples",
                format!("expected {} samples, got {}", grid.size(), samples.len()),
            ));
        }
        let scale = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let is_real = samples
            .iter()
            .all(|z| z.im.abs() <= DEFAULT_TOLERANCE * scale.max(1.0));
        Ok(GridFunction {
            grid,
            samples,
            is_real,
        })
    }

    pub fn from_real(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.size() {
            return Err(Error::config(
                "samples",
                format!("expected {} samples, got {}", grid.size(), values.len()),
            ));
        }
        Ok(GridFunction {
            grid,
            samples: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            is_real: true,
        })
    }

    /// Sample a real function of `x` on the grid.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.abscissas().map(f).collect();
        Self::from_real(grid, values).expect("length matches grid")
    }

    pub fn from_complex_fn(grid: TorusGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.abscissas().map(f).collect();
        Self::from_complex(grid, values).expect("length matches grid")
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::from_real(grid, vec![0.0; grid.size()]).expect("length matches grid")
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        Self::from_real(grid, vec![c; grid.size()]).expect("length matches grid")
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn re(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    /// Value at the sample nearest to `x` (no interpolation).
    pub fn at(&self, x: f64) -> Complex64 {
        let i = (x / self.grid.spacing()).round() as i64 + self.grid.center() as i64;
        self.samples[i.rem_euclid(self.grid.size() as i64) as usize]
    }

    /// Circular shift: `out[i] = f[i - s]`.
    pub fn shift(&self, s: isize) -> Self {
        let m = self.len() as isize;
        let samples = (0..m)
            .map(|i| self.samples[(i - s).rem_euclid(m) as usize])
            .collect();
        GridFunction {
            grid: self.grid,
            samples,
            is_real: self.is_real,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        GridFunction {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * c).collect(),
            is_real: self.is_real,
        }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        GridFunction {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z + c).collect(),
            is_real: self.is_real,
        }
    }

    pub fn try_add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn try_mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    fn zip_with(
        &self,
        other: &GridFunction,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::config(
                "grid",
                format!("grid mismatch: {} vs {}", self.grid, other.grid),
            ));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(GridFunction {
            grid: self.grid,
            samples,
            is_real: self.is_real && other.is_real,
        })
    }

    /// Largest pointwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Forget a negligible imaginary part.
    pub fn into_real(mut self) -> Self {
        for z in &mut self.samples {
            z.im = 0.0;
        }
        self.is_real = true;
        self
    }
}

/// Finite set of ball radii, in grid index units (`r = k * dx`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiiSet {
    indices: Vec<usize>,
    dyadic_closed: bool,
}

impl RadiiSet {
    /// Sort, deduplicate and validate against the grid.
    pub fn new(grid: &TorusGrid, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::config("radii", "radius set is empty"));
        }
        let max = grid.max_radius_index();
        if let Some(&bad) = indices.iter().find(|&&k| k == 0 || k > max) {
            return Err(Error::Radius { index: bad, max });
        }
        let dyadic_closed = is_dyadic_chain(&indices);
        Ok(RadiiSet {
            indices,
            dyadic_closed,
        })
    }

    /// `{2^j : j = 0..=log2(M/4)}`, i.e. up to the cap `r = L/4`.
    pub fn dyadic(grid: &TorusGrid) -> Self {
        let top = grid.radius_cap_index().trailing_zeros();
        let indices = (0..=top).map(|j| 1usize << j).collect();
        RadiiSet::new(grid, indices).expect("dyadic radii fit the grid")
    }

    /// Every integer radius up to the cap.
    pub fn all(grid: &TorusGrid) -> Self {
        RadiiSet::new(grid, (1..=grid.radius_cap_index()).collect())
            .expect("capped radii fit the grid")
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_dyadic_closed(&self) -> bool {
        self.dyadic_closed
    }

    pub fn max_index(&self) -> usize {
        *self.indices.last().expect("non-empty")
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices.binary_search(&k).is_ok()
    }

    /// Human-readable description of the radius truncation in force.
    pub fn cap_note(&self, grid: &TorusGrid) -> String {
        format!(
            "sup over {} radii, max r = {} (cap r <= L/4 = {})",
            self.indices.len(),
            self.max_index() as f64 * grid.spacing(),
            grid.period() / 4.0
        )
    }
}

impl fmt::Display for RadiiSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dyadic_closed && self.indices[0] == 1 {
            write!(f, "dyadic(1..{})", self.max_index())
        } else if self.indices.len() > 1
            && self.indices.windows(2).all(|w| w[1] == w[0] + 1)
            && self.indices[0] == 1
        {
            write!(f, "all(1..{})", self.max_index())
        } else {
            let parts: Vec<String> = self.indices.iter().map(|k| k.to_string()).collect();
            write!(f, "{}", parts.join(";"))
        }
    }
}

fn is_dyadic_chain(indices: &[usize]) -> bool {
    indices.windows(2).all(|w| w[1] == 2 * w[0])
}

fn check_radius(grid: &TorusGrid, k: usize) -> Result<()> {
    let max = grid.max_radius_index();
    if k == 0 || k > max {
        return Err(Error::Radius { index: k, max });
    }
    Ok(())
}

/// Centered window average over `2k + 1` samples, via compensated circular
/// prefix sums (`O(M)` per radius).
pub fn ball_average(f: &GridFunction, k: usize) -> Result<GridFunction> {
    check_radius(f.grid(), k)?;
    let re = CircularPrefix::new(f.samples().iter().map(|z| z.re));
    let w = (2 * k + 1) as f64;
    let k = k as isize;
    let samples: Vec<Complex64> = if f.is_real() {
        (0..f.len() as isize)
            .map(|i| Complex64::new(re.range(i - k, i + k).to_f64() / w, 0.0))
            .collect()
    } else {
        let im = CircularPrefix::new(f.samples().iter().map(|z| z.im));
        (0..f.len() as isize)
            .map(|i| {
                Complex64::new(
                    re.range(i - k, i + k).to_f64() / w,
                    im.range(i - k, i + k).to_f64() / w,
                )
            })
            .collect()
    };
    Ok(GridFunction {
        grid: *f.grid(),
        samples,
        is_real: f.is_real(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

/// Riemann-sum norms on the grid.
pub fn norm(f: &GridFunction, kind: NormKind) -> f64 {
    let dx = f.grid().spacing();
    match kind {
        NormKind::L1 => dx * f.samples().iter().map(|z| z.norm()).sum::<f64>(),
        NormKind::L2 => (dx * f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt(),
        NormKind::Linf => f.samples().iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}

/// How samples of a grid function extend to the whole line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// The function vanishes outside the fundamental window.
    Zero,
    /// The function is `L`-periodic.
    Periodic,
}

/// `Dil_m f (x) = f(2^m x)` for a function vanishing outside the window;
/// see [`dilate_dyadic_with`].
pub fn dilate_dyadic(f: &GridFunction, m: i32, tol: f64) -> Result<GridFunction> {
    dilate_dyadic_with(f, m, Extension::Zero, tol)
}

/// `Dil_m f (x) = f(2^m x)`.
///
/// For `m >= 0` the result stays on the same grid and is an exact index map,
/// `out[i] = f[c + 2^m (i - c)]`. Where that index leaves the fundamental
/// window it is either zero or wrapped, according to `ext`.
///
/// For `m < 0` the result lives on a torus of period `2^|m| L` with the same
/// spacing, obtained by exact trigonometric interpolation. The input must be
/// band-limited to `|xi| < M / (2L 2^|m|)`; the relative spectral mass
/// above that limit is compared against `tol`.
pub fn dilate_dyadic_with(
    f: &GridFunction,
    m: i32,
    ext: Extension,
    tol: f64,
) -> Result<GridFunction> {
    let grid = *f.grid();
    let size = grid.size();
    if m == 0 {
        return Ok(f.clone());
    }
    if m > 0 {
        if m as u32 > size.trailing_zeros() {
            return Err(Error::config(
                "m",
                format!("dilation exponent {m} exceeds log2(M) = {}", size.trailing_zeros()),
            ));
        }
        let c = grid.center() as i64;
        let step = 1i64 << m;
        let zero = Complex64::new(0.0, 0.0);
        let samples = (0..size as i64)
            .map(|i| {
                let src = c + step * (i - c);
                match ext {
                    _ if (0..size as i64).contains(&src) => f.samples[src as usize],
                    Extension::Zero => zero,
                    Extension::Periodic => f.samples[src.rem_euclid(size as i64) as usize],
                }
            })
            .collect();
        return Ok(GridFunction {
            grid,
            samples,
            is_real: f.is_real,
        });
    }

    let up = 1usize << (-m) as u32;
    let new_grid = TorusGrid::with_period(grid.period() * up as f64, size * up)?;
    let spectrum = fft::forward(&f.samples);
    let limit = (size / (2 * up)) as i64;
    let mut total = 0.0;
    let mut outside = 0.0;
    for (n, z) in spectrum.iter().enumerate() {
        let e = z.norm_sqr();
        total += e;
        if fft::signed_bin(n, size).abs() >= limit {
            outside += e;
        }
    }
    let residual = if total > 0.0 {
        (outside / total).sqrt()
    } else {
        0.0
    };
    if residual > tol {
        return Err(Error::Dilation { m, residual });
    }
    let new_size = size * up;
    let mut padded = vec![Complex64::new(0.0, 0.0); new_size];
    let gain = up as f64;
    for (n, z) in spectrum.iter().enumerate() {
        let k = fft::signed_bin(n, size);
        if k.abs() < limit {
            padded[k.rem_euclid(new_size as i64) as usize] = z * gain;
        }
    }
    fft::inverse_in_place(&mut padded);
    let mut out = GridFunction::from_complex(new_grid, padded)?;
    if f.is_real {
        out = out.into_real();
    }
    Ok(out)
}

/// Change of variables `x -> 2^m x` as a relabeling: same samples on a grid
/// of period `2^-m L`. Exact for every integer `m`, no band limit needed.
pub fn rescale_period(f: &GridFunction, m: i32) -> Result<GridFunction> {
    Ok(GridFunction {
        grid: f.grid.rescaled(m)?,
        samples: f.samples.clone(),
        is_real: f.is_real,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(l: f64, m: usize) -> TorusGrid {
        TorusGrid::new(l, m).unwrap()
    }

    #[test]
    fn make_grid_examples() {
        assert_eq!(grid(2.0, 16).spacing(), 0.125);
        assert_eq!(grid(16.0, 1 << 20).spacing(), 2f64.powi(-16));
        let err = TorusGrid::new(3.0, 16).unwrap_err();
        assert!(err.to_string().contains("period must be a power of two"));
        assert!(TorusGrid::new(16.0, 24).unwrap_err().to_string().contains("size"));
        assert!(TorusGrid::new(1.0, 16).is_err());
        assert!(TorusGrid::new(0.5, 16).is_err());
    }

    #[test]
    fn abscissas_are_centered() {
        let g = grid(2.0, 16);
        assert_eq!(g.x(0), -1.0);
        assert_eq!(g.x(8), 0.0);
        assert_eq!(g.x(15), 0.875);
        assert_eq!(g.spacing() * g.size() as f64, g.period());
    }

    #[test]
    fn j_max_matches_nyquist() {
        assert_eq!(grid(16.0, 1 << 20).j_max(), 14);
        assert_eq!(grid(16.0, 1 << 14).j_max(), 8);
    }

    #[test]
    fn ball_average_constant_and_spike() {
        let g = grid(2.0, 16);
        let c = GridFunction::constant(g, 2.5);
        for k in 1..8 {
            let a = ball_average(&c, k).unwrap();
            assert!(a.samples().iter().all(|z| (z.re - 2.5).abs() < 1e-15));
        }
        let mut v = vec![0.0; 16];
        v[5] = 1.0;
        let a = ball_average(&GridFunction::from_real(g, v).unwrap(), 1).unwrap();
        for (i, z) in a.samples().iter().enumerate() {
            let want = if (4..=6).contains(&i) { 1.0 / 3.0 } else { 0.0 };
            assert!((z.re - want).abs() < 1e-16, "i={i}");
        }
    }

    #[test]
    fn ball_average_rejects_bad_radius() {
        let f = GridFunction::zeros(grid(2.0, 16));
        assert!(matches!(ball_average(&f, 0), Err(Error::Radius { .. })));
        assert!(matches!(ball_average(&f, 8), Err(Error::Radius { .. })));
        assert!(ball_average(&f, 7).is_ok());
    }

    #[test]
    fn norm_examples() {
        let g = grid(16.0, 256);
        let one = GridFunction::constant(g, 1.0);
        assert!((norm(&one, NormKind::L1) - 16.0).abs() < 1e-12);
        assert!((norm(&one, NormKind::L2) - 4.0).abs() < 1e-12);
        assert_eq!(norm(&one, NormKind::Linf), 1.0);
        let zero = GridFunction::zeros(g);
        for kind in [NormKind::L1, NormKind::L2, NormKind::Linf] {
            assert_eq!(norm(&zero, kind), 0.0);
        }
        let wave = GridFunction::from_complex_fn(g, |x| {
            Complex64::from_polar(1.0, 2.0 * PI * 3.0 * x / 16.0)
        });
        assert!((norm(&wave, NormKind::L2) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn dilate_identity_and_frequency_doubling() {
        let g = grid(16.0, 1024);
        let lambda = 1.25;
        let f = GridFunction::from_complex_fn(g, |x| Complex64::from_polar(1.0, 2.0 * PI * lambda * x));
        assert_eq!(dilate_dyadic(&f, 0, 1e-10).unwrap(), f);
        let d = dilate_dyadic(&f, 1, 1e-10).unwrap();
        // Inside the central half-window the dilate is the doubled wave.
        for i in 0..g.size() {
            let x = g.x(i);
            if x.abs() < g.period() / 4.0 {
                let want = Complex64::from_polar(1.0, 2.0 * PI * 2.0 * lambda * x);
                assert!((d.samples()[i] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn periodic_dilate_doubles_frequency_everywhere() {
        let g = grid(4.0, 64);
        let f = GridFunction::from_fn(g, |x| (2.0 * PI * 1.25 * x).sin());
        let d = dilate_dyadic_with(&f, 2, Extension::Periodic, 1e-10).unwrap();
        let want = GridFunction::from_fn(g, |x| (2.0 * PI * 5.0 * x).sin());
        assert!(d.max_abs_diff(&want) < 1e-13);
        let z = dilate_dyadic(&f, 2, 1e-10).unwrap();
        assert_eq!(z.samples()[0].re, 0.0);
    }

    #[test]
    fn dilate_negative_matches_direct_interpolant() {
        // Low-pass random trigonometric polynomial, evaluated directly.
        let g = grid(16.0, 256);
        let coeffs: Vec<(f64, f64, f64)> = (1..=20)
            .map(|n| {
                let a = ((n * 7919) % 13) as f64 / 13.0 - 0.5;
                let b = ((n * 104_729) % 17) as f64 / 17.0 - 0.5;
                (n as f64 / 16.0, a, b)
            })
            .collect();
        let eval = |x: f64| -> f64 {
            coeffs
                .iter()
                .map(|&(xi, a, b)| a * (2.0 * PI * xi * x).cos() + b * (2.0 * PI * xi * x).sin())
                .sum()
        };
        let f = GridFunction::from_fn(g, eval);
        let d = dilate_dyadic(&f, -2, 1e-10).unwrap();
        assert_eq!(d.grid().period(), 64.0);
        assert_eq!(d.grid().size(), 1024);
        for probe in 0..64 {
            let i = probe * 16 + 3;
            let x = d.grid().x(i);
            assert!((d.samples()[i].re - eval(x / 4.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn dilate_negative_rejects_wideband_input() {
        let g = grid(16.0, 256);
        let f = GridFunction::from_fn(g, |x| (2.0 * PI * 7.0 * x).sin());
        match dilate_dyadic(&f, -1, 1e-10) {
            Err(Error::Dilation { residual, .. }) => assert!(residual > 0.9),
            other => panic!("expected dilation error, got {other:?}"),
        }
    }

    #[test]
    fn radii_sets() {
        let g = grid(16.0, 1024);
        let d = RadiiSet::dyadic(&g);
        assert_eq!(d.indices().first(), Some(&1));
        assert_eq!(d.max_index(), 256);
        assert!(d.is_dyadic_closed());
        let a = RadiiSet::all(&g);
        assert_eq!(a.indices().len(), 256);
        assert!(!a.is_dyadic_closed());
        assert!(matches!(
            RadiiSet::new(&g, vec![3, 600]),
            Err(Error::Radius { index: 600, .. })
        ));
        assert_eq!(RadiiSet::new(&g, vec![4, 2, 4]).unwrap().indices(), &[2, 4]);
    }
}
