//! Named run configurations.

use crate::error::{Error, Result};
use crate::constructions::{max_admissible_dilated_n, max_admissible_n};
use crate::grid::{TorusGrid, DEFAULT_TOLERANCE};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileName {
    Quick,
    Reference,
    Large,
}

impl fmt::Display for ProfileName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileName::Quick => "quick",
            ProfileName::Reference => "reference",
            ProfileName::Large => "large",
        })
    }
}

impl FromStr for ProfileName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(ProfileName::Quick),
            "reference" => Ok(ProfileName::Reference),
            "large" => Ok(ProfileName::Large),
            other => Err(Error::config(
                "profile",
                format!("unknown profile '{other}' (quick, reference, large)"),
            )),
        }
    }
}

/// Grids and ranges for one run of the suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: ProfileName,
    /// Carrier of `S_N`, `F_N`, `g_lambda` and the kernel scans.
    pub grid: TorusGrid,
    /// Carrier of `f_N`: same period, four times the samples.
    pub dilated_grid: TorusGrid,
    /// Carrier of the random corpus.
    pub corpus_grid: TorusGrid,
    pub corpus_size: usize,
    /// Rows of the ratio scan.
    pub ratio_range: RangeInclusive<usize>,
    /// Window for the growth and stability criteria.
    pub trend_range: RangeInclusive<usize>,
    /// `lambda = 2^e` for `e = 1, 1.5, ..`, up to this exponent.
    pub glambda_max_exponent: f64,
    pub glambda_bands: RangeInclusive<i32>,
    pub kernel_bands: RangeInclusive<i32>,
    pub max_dilation: i32,
    /// Band-limit tolerance for `Dil_-m` in the dilation check.
    pub tol: f64,
}

impl Profile {
    pub fn new(name: ProfileName) -> Self {
        let g = |m: u32| TorusGrid::new(16.0, 1 << m).expect("static grid");
        match name {
            ProfileName::Quick => Profile {
                name,
                grid: g(14),
                dilated_grid: g(16),
                corpus_grid: g(10),
                corpus_size: 20,
                ratio_range: 2..=7,
                trend_range: 4..=7,
                glambda_max_exponent: 7.0,
                glambda_bands: 1..=7,
                kernel_bands: 1..=6,
                max_dilation: 3,
                tol: DEFAULT_TOLERANCE,
            },
            ProfileName::Reference => Profile {
                name,
                grid: g(20),
                dilated_grid: g(22),
                corpus_grid: g(12),
                corpus_size: 100,
                ratio_range: 2..=13,
                trend_range: 4..=13,
                glambda_max_exponent: 11.0,
                glambda_bands: 1..=11,
                kernel_bands: 1..=10,
                max_dilation: 3,
                tol: DEFAULT_TOLERANCE,
            },
            ProfileName::Large => Profile {
                name,
                grid: g(22),
                dilated_grid: g(24),
                corpus_grid: g(12),
                corpus_size: 100,
                ratio_range: 2..=15,
                trend_range: 4..=15,
                glambda_max_exponent: 13.0,
                glambda_bands: 1..=13,
                kernel_bands: 1..=12,
                max_dilation: 3,
                tol: DEFAULT_TOLERANCE,
            },
        }
    }

    /// Replace the main grid by `grid` (and the `f_N` grid by its `(L, 4M)`
    /// companion), clipping every range to what the new grid resolves.
    pub fn with_grid(mut self, grid: TorusGrid) -> Result<Self> {
        self.dilated_grid = TorusGrid::new(grid.period(), grid.size() * 4)?;
        self.grid = grid;
        let max_n = max_admissible_n(&grid).min(max_admissible_dilated_n(&self.dilated_grid));
        let top = (*self.ratio_range.end()).min(max_n);
        self.ratio_range = (*self.ratio_range.start()).min(top)..=top;
        self.trend_range = (*self.trend_range.start()).min(top)..=top;
        let j = grid.j_max();
        self.glambda_max_exponent = self.glambda_max_exponent.min((j - 3) as f64).max(1.0);
        self.glambda_bands = 1..=(*self.glambda_bands.end()).min(j).max(1);
        self.kernel_bands = 1..=(*self.kernel_bands.end()).min(j - 4).max(1);
        Ok(self)
    }

    /// `lambda = 2^1, 2^1.5, ..`.
    pub fn glambda_list(&self) -> Vec<f64> {
        let steps = ((self.glambda_max_exponent - 1.0) * 2.0).round() as i32;
        (0..=steps).map(|s| 2f64.powf(1.0 + 0.5 * s as f64)).collect()
    }
}
