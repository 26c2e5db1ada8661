//! Criterion benchmarks for lpmax-core; see `benches/`.

use lpmax_core::experiments::corpus::band_limited_corpus;
use lpmax_core::{GridFunction, TorusGrid};

/// One seeded band-limited input on `(16, 2^log2_m)`.
pub fn sample_input(log2_m: u32) -> GridFunction {
    let grid = TorusGrid::new(16.0, 1 << log2_m).expect("power-of-two grid");
    band_limited_corpus(&grid, 1, 42).remove(0)
}
