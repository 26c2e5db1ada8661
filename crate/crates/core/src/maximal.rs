//! Centered maximal operators over a finite set of discrete radii.
//!
//! The discrete ball of radius `k` is the index window `{i-k, ..., i+k}`.
//! With `sign(0) = 0` the signum window sums to zero, which keeps the chain
//! `M_diamond f <= M_sharp f <= 2 M f` exact at the discrete level.

use crate::dd::{CircularPrefix, Dd};
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{GridFunction, RadiiSet, TorusGrid};
use crate::kernel::Kernel;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Windows up to this many samples use direct summation for the sharp
/// maximal function; wider ones go through the order-statistics sweep.
const DIRECT_WINDOW_MAX: usize = 257;

#[derive(Debug, Clone)]
pub struct MaximalResult {
    pub values: GridFunction,
    /// Radius index attaining the maximum at each sample (smallest on ties).
    pub argmax_radius: Vec<usize>,
    pub radii: RadiiSet,
    pub cap_note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaximalSidecar {
    pub operator: String,
    pub radii: String,
    pub cap_note: String,
    /// radius index -> number of samples where it attains the maximum
    pub argmax_histogram: BTreeMap<usize, usize>,
}

impl MaximalResult {
    pub fn sidecar(&self, operator: &str) -> MaximalSidecar {
        let mut argmax_histogram = BTreeMap::new();
        for &k in &self.argmax_radius {
            *argmax_histogram.entry(k).or_insert(0) += 1;
        }
        MaximalSidecar {
            operator: operator.to_string(),
            radii: self.radii.to_string(),
            cap_note: self.cap_note.clone(),
            argmax_histogram,
        }
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.re()
    }
}

struct Partial {
    values: Vec<f64>,
    argmax: Vec<usize>,
}

// Larger value wins; equal values go to the smaller radius. The rule is
// commutative and associative, so any reduction order gives the same result.
fn merge(mut a: Partial, b: Partial) -> Partial {
    for i in 0..a.values.len() {
        let (va, vb) = (a.values[i], b.values[i]);
        if vb > va || (vb == va && b.argmax[i] < a.argmax[i]) {
            a.values[i] = vb;
            a.argmax[i] = b.argmax[i];
        }
    }
    a
}

fn sup_over_radii(
    grid: &TorusGrid,
    radii: &RadiiSet,
    per_radius: impl Fn(usize) -> Result<Vec<f64>> + Sync,
) -> Result<MaximalResult> {
    let size = grid.size();
    let partial = radii
        .indices()
        .par_iter()
        .map(|&k| {
            per_radius(k).map(|values| Partial {
                values,
                argmax: vec![k; size],
            })
        })
        .try_reduce_with(|a, b| Ok(merge(a, b)))
        .expect("radius set is non-empty")?;
    Ok(MaximalResult {
        values: GridFunction::from_real(*grid, partial.values)?,
        argmax_radius: partial.argmax,
        radii: radii.clone(),
        cap_note: radii.cap_note(grid),
    })
}

fn check_radii(grid: &TorusGrid, radii: &RadiiSet) -> Result<()> {
    let max = grid.max_radius_index();
    if radii.max_index() > max {
        return Err(Error::Radius {
            index: radii.max_index(),
            max,
        });
    }
    Ok(())
}

/// `M f (x_i) = max_k (2k+1)^-1 sum_{|l|<=k} |f[i+l]|`.
pub fn hardy_littlewood(f: &GridFunction, radii: &RadiiSet) -> Result<MaximalResult> {
    let grid = *f.grid();
    check_radii(&grid, radii)?;
    let prefix = CircularPrefix::new(f.samples().iter().map(|z| z.norm()));
    sup_over_radii(&grid, radii, |k| {
        let w = (2 * k + 1) as f64;
        let k = k as isize;
        Ok((0..grid.size() as isize)
            .map(|i| prefix.range(i - k, i + k).to_f64() / w)
            .collect())
    })
}

/// `M_diamond f (x_i) = max_k |(2k+1)^-1 sum_{|l|<=k} sign(l) f[i+l]|`, from
/// one-sided prefix sums.
pub fn diamond_maximal(f: &GridFunction, radii: &RadiiSet) -> Result<MaximalResult> {
    let grid = *f.grid();
    check_radii(&grid, radii)?;
    let re = CircularPrefix::new(f.samples().iter().map(|z| z.re));
    let im = if f.is_real() {
        None
    } else {
        Some(CircularPrefix::new(f.samples().iter().map(|z| z.im)))
    };
    let odd_sum = |p: &CircularPrefix, i: isize, k: isize| -> Dd {
        // sum_{l=1..k} x[i+l] - sum_{l=1..k} x[i-l]
        p.range(i + 1, i + k) - p.range(i - k, i - 1)
    };
    sup_over_radii(&grid, radii, |k| {
        let w = (2 * k + 1) as f64;
        let k = k as isize;
        Ok((0..grid.size() as isize)
            .map(|i| {
                let r = odd_sum(&re, i, k).to_f64();
                let v = match &im {
                    None => r.abs(),
                    Some(im) => Complex64::new(r, odd_sum(im, i, k).to_f64()).norm(),
                };
                v / w
            })
            .collect())
    })
}

/// `M_sharp f (x_i) = max_k (2k+1)^-1 sum_{|l|<=k} |f[i+l] - A_k f[i]|`.
///
/// Window means come from compensated prefix sums. For real input and wide
/// windows the deviation sum is evaluated as
/// `2 (a n_below - S_below) + (S - a w)`, with `n_below` and `S_below`
/// maintained by a Fenwick tree over value ranks as the window slides, which
/// costs `O(M log M)` per radius. Complex input uses direct summation.
pub fn sharp_maximal(f: &GridFunction, radii: &RadiiSet) -> Result<MaximalResult> {
    let grid = *f.grid();
    check_radii(&grid, radii)?;
    if f.is_real() {
        let values = f.re();
        let prefix = CircularPrefix::new(values.iter().copied());
        let ranks = RankTable::new(&values);
        sup_over_radii(&grid, radii, |k| {
            Ok(if 2 * k + 1 <= DIRECT_WINDOW_MAX {
                sharp_direct_real(&values, &prefix, k)
            } else {
                sharp_sweep(&values, &prefix, &ranks, k)
            })
        })
    } else {
        let samples = f.samples();
        let re = CircularPrefix::new(samples.iter().map(|z| z.re));
        let im = CircularPrefix::new(samples.iter().map(|z| z.im));
        sup_over_radii(&grid, radii, |k| Ok(sharp_direct_complex(samples, &re, &im, k)))
    }
}

fn sharp_direct_real(values: &[f64], prefix: &CircularPrefix, k: usize) -> Vec<f64> {
    let m = values.len() as isize;
    let w = (2 * k + 1) as f64;
    let k = k as isize;
    (0..m)
        .map(|i| {
            let a = prefix.range(i - k, i + k).to_f64() / w;
            let dev: f64 = if i >= k && i + k < m {
                values[(i - k) as usize..=(i + k) as usize]
                    .iter()
                    .map(|v| (v - a).abs())
                    .sum()
            } else {
                (-k..=k)
                    .map(|l| (values[(i + l).rem_euclid(m) as usize] - a).abs())
                    .sum()
            };
            dev / w
        })
        .collect()
}

fn sharp_direct_complex(
    samples: &[Complex64],
    re: &CircularPrefix,
    im: &CircularPrefix,
    k: usize,
) -> Vec<f64> {
    let m = samples.len() as isize;
    let w = (2 * k + 1) as f64;
    let k = k as isize;
    (0..m)
        .map(|i| {
            let a = Complex64::new(
                re.range(i - k, i + k).to_f64() / w,
                im.range(i - k, i + k).to_f64() / w,
            );
            let mut dev = 0.0;
            for l in -k..=k {
                dev += (samples[(i + l).rem_euclid(m) as usize] - a).norm();
            }
            dev / w
        })
        .collect()
}

// Ranks index the distinct sample values, so long constant stretches (the
// zero padding around compactly supported data) share one tree slot.
struct RankTable {
    distinct: Vec<f64>,
    rank: Vec<usize>,
}

impl RankTable {
    fn new(values: &[f64]) -> Self {
        let mut distinct = values.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let rank = values
            .iter()
            .map(|v| distinct.partition_point(|d| d < v))
            .collect();
        RankTable { distinct, rank }
    }

    fn len(&self) -> usize {
        self.distinct.len()
    }

    /// Number of distinct values strictly below `a`.
    fn count_below(&self, a: f64) -> usize {
        self.distinct.partition_point(|&v| v < a)
    }
}

/// Fenwick tree over value ranks holding counts and compensated sums.
struct RankFenwick {
    count: Vec<u32>,
    sum: Vec<Dd>,
}

impl RankFenwick {
    fn new(n: usize) -> Self {
        RankFenwick {
            count: vec![0; n + 1],
            sum: vec![Dd::ZERO; n + 1],
        }
    }

    fn insert(&mut self, rank: usize, v: f64) {
        let mut i = rank + 1;
        while i < self.count.len() {
            self.count[i] += 1;
            self.sum[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    fn remove(&mut self, rank: usize, v: f64) {
        let mut i = rank + 1;
        while i < self.count.len() {
            self.count[i] -= 1;
            self.sum[i] += -v;
            i += i & i.wrapping_neg();
        }
    }

    /// Count and sum over ranks `0..t`.
    fn prefix(&self, t: usize) -> (u32, Dd) {
        let mut i = t;
        let mut c = 0;
        let mut s = Dd::ZERO;
        while i > 0 {
            c += self.count[i];
            s += self.sum[i];
            i &= i - 1;
        }
        (c, s)
    }
}

fn sharp_sweep(values: &[f64], prefix: &CircularPrefix, ranks: &RankTable, k: usize) -> Vec<f64> {
    let m = values.len();
    let mi = m as isize;
    let w = 2 * k + 1;
    let wf = w as f64;
    let ki = k as isize;
    let idx = |i: isize| i.rem_euclid(mi) as usize;
    let mut tree = RankFenwick::new(ranks.len());
    for l in -ki..=ki {
        let j = idx(l);
        tree.insert(ranks.rank[j], values[j]);
    }
    let mut out = Vec::with_capacity(m);
    for i in 0..mi {
        if i > 0 {
            let old = idx(i - ki - 1);
            let new = idx(i + ki);
            if ranks.rank[old] != ranks.rank[new] {
                tree.remove(ranks.rank[old], values[old]);
                tree.insert(ranks.rank[new], values[new]);
            }
        }
        let total = prefix.range(i - ki, i + ki);
        let a = total.to_f64() / wf;
        let (below, below_sum) = tree.prefix(ranks.count_below(a));
        let lower = Dd::product(a, below as f64) - below_sum;
        let balance = total - Dd::product(a, wf);
        let dev = (lower * 2.0 + balance).to_f64();
        out.push(dev.max(0.0) / wf);
    }
    out
}

/// Which evaluation route [`tk_star_with`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionPath {
    /// FFT-based circular convolution, `O(M log M)` per radius.
    Spectral,
    /// Direct quadrature loop over the kernel support.
    Direct,
}

/// Weights `dx * K_r(l dx)`, `K_r(x) = r^-1 K(x/r)`, `r = k dx`, indexed by
/// offset `l` modulo `M`. Jump points are sampled at the mean of the
/// one-sided limits.
pub fn dilated_kernel_weights(grid: &TorusGrid, kernel: &Kernel, k: usize) -> Result<Vec<f64>> {
    let r = k as f64 * grid.spacing();
    let extent = r * kernel.support_radius();
    let cap = grid.period() / 4.0;
    if extent > cap {
        return Err(Error::RadiusCap { extent, cap });
    }
    let size = grid.size();
    let scale = 1.0 / k as f64;
    let reach = (kernel.support_radius() * k as f64).ceil() as isize;
    let mut w = vec![0.0; size];
    for l in -reach..=reach {
        let t = l as f64 / k as f64;
        w[l.rem_euclid(size as isize) as usize] = scale * kernel.sample(t, 1e-12);
    }
    Ok(w)
}

/// `T*_K f (x_i) = max_r |(K_r * f)(x_i)|` with the spectral route.
pub fn tk_star(f: &GridFunction, kernel: &Kernel, radii: &RadiiSet) -> Result<MaximalResult> {
    tk_star_with(f, kernel, radii, ConvolutionPath::Spectral)
}

pub fn tk_star_with(
    f: &GridFunction,
    kernel: &Kernel,
    radii: &RadiiSet,
    path: ConvolutionPath,
) -> Result<MaximalResult> {
    let grid = *f.grid();
    check_radii(&grid, radii)?;
    for &k in radii.indices() {
        let r = k as f64 * grid.spacing();
        let extent = r * kernel.support_radius();
        if extent > grid.period() / 4.0 {
            return Err(Error::RadiusCap {
                extent,
                cap: grid.period() / 4.0,
            });
        }
    }
    let size = grid.size();
    match path {
        ConvolutionPath::Spectral => {
            let spectrum = fft::forward(f.samples());
            sup_over_radii(&grid, radii, |k| {
                let mut w: Vec<Complex64> = dilated_kernel_weights(&grid, kernel, k)?
                    .into_iter()
                    .map(|v| Complex64::new(v, 0.0))
                    .collect();
                fft::forward_in_place(&mut w);
                for (a, b) in w.iter_mut().zip(&spectrum) {
                    *a *= b;
                }
                fft::inverse_in_place(&mut w);
                Ok(w.iter().map(|z| z.norm()).collect())
            })
        }
        ConvolutionPath::Direct => {
            let samples = f.samples();
            sup_over_radii(&grid, radii, |k| {
                let w = dilated_kernel_weights(&grid, kernel, k)?;
                let reach = (kernel.support_radius() * k as f64).ceil() as isize;
                let m = size as isize;
                Ok((0..m)
                    .map(|i| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for l in -reach..=reach {
                            let wl = w[l.rem_euclid(m) as usize];
                            acc += samples[(i - l).rem_euclid(m) as usize] * wl;
                        }
                        acc.norm()
                    })
                    .collect())
            })
        }
    }
}
