//! The lacunary counterexample family: `S_N`, the cutoff `psi`, `F_N`, its
//! dyadic compressions `f_N` and the modulated bumps `g_lambda`.

use crate::error::{Error, Result};
use crate::grid::{dilate_dyadic, GridFunction, TorusGrid, DEFAULT_TOLERANCE};
use crate::spectral::phi;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// `psi` vanishes for `|x| >= 4`.
pub const PSI_SUPPORT: f64 = 4.0;

fn log2_nyquist(grid: &TorusGrid) -> i64 {
    grid.nyquist().log2().floor() as i64
}

/// Largest `N` with `2^(N+2) <= M/(2L)`: the top lacunary frequency `2^N`
/// sits one octave below Nyquist.
pub fn max_admissible_n(grid: &TorusGrid) -> usize {
    (log2_nyquist(grid) - 2).max(0) as usize
}

/// Largest `N` whose compression `f_N` keeps one octave of margin:
/// `2^(N + m_N + 1) <= M/(2L)`.
pub fn max_admissible_dilated_n(grid: &TorusGrid) -> usize {
    let cap = log2_nyquist(grid);
    (1..64usize)
        .take_while(|&n| n as i64 + dilation_exponent(n) as i64 + 1 <= cap)
        .last()
        .unwrap_or(0)
}

/// `m_N = floor(log2 N)`.
pub fn dilation_exponent(n: usize) -> u32 {
    assert!(n >= 1, "N must be positive");
    usize::BITS - 1 - n.leading_zeros()
}

/// A validated lacunary depth on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleSpec {
    pub n: usize,
    pub m_n: u32,
    pub grid: TorusGrid,
}

impl CounterexampleSpec {
    pub fn new(n: usize, grid: &TorusGrid) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("N", "lacunary depth must be at least 1"));
        }
        let max_n = max_admissible_n(grid);
        if n > max_n {
            return Err(Error::Admissibility { n, max_n });
        }
        Ok(CounterexampleSpec {
            n,
            m_n: dilation_exponent(n),
            grid: *grid,
        })
    }

    pub fn top_frequency(&self) -> f64 {
        2f64.powi(self.n as i32)
    }

    pub fn describe(&self) -> Description {
        Description {
            n: self.n,
            m_n: self.m_n,
            grid: self.grid.to_string(),
            support_radius: PSI_SUPPORT,
            dilated_support_radius: PSI_SUPPORT / 2f64.powi(self.m_n as i32),
            top_frequency: self.top_frequency(),
            dilated_top_frequency: 2f64.powi((self.n as u32 + self.m_n) as i32),
            dilation_admissible: self.n <= max_admissible_dilated_n(&self.grid),
        }
    }
}

/// The record printed by `describe`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Description {
    pub n: usize,
    pub m_n: u32,
    pub grid: String,
    pub support_radius: f64,
    pub dilated_support_radius: f64,
    pub top_frequency: f64,
    pub dilated_top_frequency: f64,
    /// Whether `f_N` is resolved on this grid as well as `F_N`.
    pub dilation_admissible: bool,
}

// sin(2 pi t) after exact reduction of t to [-1/2, 1/2).
fn sin_turns(t: f64) -> f64 {
    let r = t - t.round_ties_even();
    (2.0 * PI * r).sin()
}

/// `S_N(x) = sum_{k=1}^N sin(2 pi 2^k x)`.
///
/// Grid abscissas are dyadic rationals, so `2^k x mod 1` is exact; samples
/// are computed for `x >= 0` and mirrored, which makes the result exactly odd.
pub fn lacunary_sum(n: usize, grid: &TorusGrid) -> Result<GridFunction> {
    CounterexampleSpec::new(n, grid)?;
    let size = grid.size();
    let c = grid.center();
    let mut v = vec![0.0; size];
    for d in 1..c {
        let x = grid.x(c + d);
        let s: f64 = (1..=n).map(|k| sin_turns(x * 2f64.powi(k as i32))).sum();
        v[c + d] = s;
        v[c - d] = -s;
    }
    // x = 0 and x = -L/2 are both zeros of every term
    GridFunction::from_real(*grid, v)
}

/// `psi(x) = phi(|x|/2)`: one on `|x| <= 2`, zero for `|x| >= 4`.
pub fn bump_psi(grid: &TorusGrid) -> Result<GridFunction> {
    let required = 4.0 * PSI_SUPPORT;
    if grid.period() < required {
        return Err(Error::Support {
            period: grid.period(),
            required,
        });
    }
    Ok(GridFunction::from_fn(*grid, |x| phi(x.abs() / 2.0)))
}

/// `F_N = psi S_N`.
pub fn lacunary_bump(n: usize, grid: &TorusGrid) -> Result<GridFunction> {
    let s = lacunary_sum(n, grid)?;
    let psi = bump_psi(grid)?;
    psi.try_mul(&s)
}

/// `f_N(x) = F_N(2^{m_N} x)`, built by exact index compression of `F_N` on
/// the same grid. Requires the stricter bound of
/// [`max_admissible_dilated_n`] so that `f_N` is resolved as well.
pub fn dilated_lacunary_bump(n: usize, grid: &TorusGrid) -> Result<GridFunction> {
    let spec = CounterexampleSpec::new(n, grid)?;
    let max_n = max_admissible_dilated_n(grid);
    if n > max_n {
        return Err(Error::Admissibility { n, max_n });
    }
    let big = lacunary_bump(n, grid)?;
    dilate_dyadic(&big, spec.m_n as i32, DEFAULT_TOLERANCE)
}

/// `g_lambda(x) = psi(x) e^{2 pi i lambda x}`. Negative `lambda` is allowed;
/// `|lambda|` must stay one octave below Nyquist.
pub fn modulated_bump(lambda: f64, grid: &TorusGrid) -> Result<GridFunction> {
    let limit = grid.nyquist() / 2.0;
    if !lambda.is_finite() || lambda.abs() > limit {
        return Err(Error::Frequency {
            frequency: lambda,
            limit,
        });
    }
    let psi = bump_psi(grid)?;
    let samples = grid
        .abscissas()
        .zip(psi.samples())
        .map(|(x, p)| {
            // lambda x mod 1 in extended precision is unnecessary for dyadic
            // lambda; for the half-integer powers the rounding is ~1e-16.
            let t = lambda * x;
            let r = t - t.round_ties_even();
            p * Complex64::from_polar(1.0, 2.0 * PI * r)
        })
        .collect();
    GridFunction::from_complex(*grid, samples)
}
