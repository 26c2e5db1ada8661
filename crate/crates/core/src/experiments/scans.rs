//! Parameter sweeps producing [`ScanTable`]s.

use super::profile::Profile;
use super::report::ScanTable;
use crate::constructions::{
    dilated_lacunary_bump, lacunary_bump, lacunary_sum, max_admissible_dilated_n, max_admissible_n,
    modulated_bump,
};
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{norm, GridFunction, NormKind, RadiiSet, TorusGrid, DEFAULT_TOLERANCE};
use crate::kernel::Kernel;
use crate::maximal::{diamond_maximal, dilated_kernel_weights, sharp_maximal};
use crate::spectral::{
    b_norm, besov_norm, lp_kernel, mollifier_apply, multiplier, spectral_derivative, MultiplierKind,
    Spectrum,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// Least-squares slope and intercept of `log y` against `log x`.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Pearson correlation coefficient.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

/// `max / min` of the positive entries.
pub fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

fn base_meta(t: &mut ScanTable, grid: &TorusGrid, radii: &str) {
    t.set_meta("grid", grid);
    t.set_meta("radii", radii);
    t.set_meta("tol", DEFAULT_TOLERANCE);
    t.set_meta("version", env!("CARGO_PKG_VERSION"));
}

pub const LP_FACT_COLUMNS: [&str; 6] = [
    "h_l1",
    "h_deriv_l1_scaled",
    "h_moment_scaled",
    "ht_l1",
    "ht_deriv_l1_scaled",
    "ht_moment_scaled",
];

/// Sizes of the band kernels `h_j` and widened kernels `h~_j`:
/// `||h||_1`, `||h'||_1 / 2^j`, `2^j int |x| |h|`, and the mean-zero
/// residuals `|int h|`.
pub fn lp_kernel_facts(grid: &TorusGrid, j_range: std::ops::RangeInclusive<i32>) -> Result<ScanTable> {
    if *j_range.start() < 1 || *j_range.end() > grid.j_max() - 1 {
        return Err(Error::BandRange {
            j: *j_range.end(),
            j_max: grid.j_max() - 1,
        });
    }
    let mut cols = vec!["j"];
    cols.extend(LP_FACT_COLUMNS);
    cols.extend(["h_mean_residual", "ht_mean_residual"]);
    let mut t = ScanTable::new("lp-facts", &cols);
    base_meta(&mut t, grid, "-");
    let dx = grid.spacing();
    let rows: Vec<Vec<f64>> = j_range
        .clone()
        .into_par_iter()
        .map(|j| {
            let scale = 2f64.powi(j);
            let facts = |kind| -> Result<[f64; 4]> {
                let h = lp_kernel(grid, kind, j)?;
                let l1 = norm(&h, NormKind::L1);
                let d = norm(&spectral_derivative(&h), NormKind::L1) / scale;
                let moment: f64 = grid
                    .abscissas()
                    .zip(h.samples())
                    .map(|(x, v)| x.abs() * v.norm())
                    .sum::<f64>()
                    * dx
                    * scale;
                let mean = (h.samples().iter().map(|v| v.re).sum::<f64>() * dx).abs();
                Ok([l1, d, moment, mean])
            };
            let a = facts(MultiplierKind::Band)?;
            let b = facts(MultiplierKind::Widened)?;
            Ok(vec![j as f64, a[0], a[1], a[2], b[0], b[1], b[2], a[3], b[3]])
        })
        .collect::<Result<_>>()?;
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

pub const KERNEL_SMALL_WINDOW: (f64, f64) = (1.0 / 64.0, 0.25);
pub const KERNEL_LARGE_WINDOW: (f64, f64) = (4.0, 64.0);
/// Dilates must span at least this many samples per unit of radius.
pub const KERNEL_MIN_SAMPLES: usize = 8;

/// Rows `{j, r, s = 2^j r, ||K_r * h~_j||_1, min(s, 1/s), ratio}` for dyadic
/// `r` with `s` in `[2^-6, 2^6]`. Pairs whose dilate is under-resolved or
/// would wrap are skipped with a note. Footer notes carry the two slope fits.
pub fn kernel_decay_scan(
    grid: &TorusGrid,
    kernel: &Kernel,
    j_range: std::ops::RangeInclusive<i32>,
) -> Result<ScanTable> {
    if !kernel.is_mean_zero() {
        return Err(Error::config("kernel", format!("{} is not mean-zero", kernel.name())));
    }
    let mut t = ScanTable::new("kernel-decay", &["j", "r", "s", "lhs", "bound", "ratio"]);
    base_meta(&mut t, grid, "dyadic r, s in [2^-6, 2^6]");
    t.set_meta("kernel", kernel.name());
    let dx = grid.spacing();
    let mut pairs = Vec::new();
    let mut skipped = 0;
    for j in j_range {
        if j > grid.j_max() {
            t.note(format!("j={j} skipped: above j_max={}", grid.j_max()));
            continue;
        }
        for e in -6..=6 {
            let r = 2f64.powi(e - j);
            let k = r / dx;
            if k < KERNEL_MIN_SAMPLES as f64 || r * kernel.support_radius() > grid.period() / 4.0 {
                skipped += 1;
                continue;
            }
            pairs.push((j, e, k as usize));
        }
    }
    if skipped > 0 {
        t.note(format!(
            "{skipped} (j, r) pairs skipped: fewer than {KERNEL_MIN_SAMPLES} samples per radius or r*R > L/4"
        ));
    }
    let mut ks: Vec<usize> = pairs.iter().map(|p| p.2).collect();
    ks.sort_unstable();
    ks.dedup();
    let rows: Vec<Vec<f64>> = ks
        .par_iter()
        .map(|&k| {
            let mut w: Vec<Complex64> = dilated_kernel_weights(grid, kernel, k)?
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect();
            fft::forward_in_place(&mut w);
            let mut rows = Vec::new();
            for &(j, e, _) in pairs.iter().filter(|p| p.2 == k) {
                let m = multiplier(grid, MultiplierKind::Widened, j)?;
                let mut data: Vec<Complex64> =
                    w.iter().enumerate().map(|(b, z)| z * m.at_bin(b)).collect();
                fft::inverse_in_place(&mut data);
                // operator weights -> kernel values divide by dx; L1 multiplies back
                let lhs: f64 = data.iter().map(|z| z.norm()).sum();
                let s = 2f64.powi(e);
                let bound = s.min(1.0 / s);
                rows.push(vec![j as f64, k as f64 * dx, s, lhs, bound, lhs / bound]);
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut rows = rows;
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    for r in rows {
        t.push(r);
    }
    let (small, large) = kernel_decay_slopes(&t);
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.6}"));
    t.note(format!("slope fit s in [2^-6, 2^-2]: {}", fmt(small)));
    t.note(format!("slope fit s in [2^2, 2^6]: {}", fmt(large)));
    Ok(t)
}

/// OLS slopes of `log lhs` against `log s` on the two fit windows.
pub fn kernel_decay_slopes(t: &ScanTable) -> (Option<f64>, Option<f64>) {
    let s = t.column("s");
    let lhs = t.column("lhs");
    let fit = |(lo, hi): (f64, f64)| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = s
            .iter()
            .zip(&lhs)
            .filter(|(s, _)| **s >= lo && **s <= hi)
            .map(|(a, b)| (*a, *b))
            .unzip();
        log_log_fit(&xs, &ys).map(|f| f.0)
    };
    (fit(KERNEL_SMALL_WINDOW), fit(KERNEL_LARGE_WINDOW))
}

/// Rows `{lambda, j, value, bound, ratio}`: `j >= 1` rows hold
/// `||P_j g_lambda||_inf` against `min(lambda/2^j, 2^j/lambda)`; `j = 0` rows
/// hold `||P_{<=0} g_lambda||_inf` against `1/lambda`.
pub fn glambda_scan(
    grid: &TorusGrid,
    lambdas: &[f64],
    bands: std::ops::RangeInclusive<i32>,
) -> Result<ScanTable> {
    if *bands.end() > grid.j_max() {
        return Err(Error::BandRange {
            j: *bands.end(),
            j_max: grid.j_max(),
        });
    }
    let mut t = ScanTable::new("glambda", &["lambda", "j", "value", "bound", "ratio"]);
    base_meta(&mut t, grid, "-");
    let rows: Vec<Vec<Vec<f64>>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let g = modulated_bump(lambda, grid)?;
            let spec = Spectrum::of(&g);
            let sup = |f: GridFunction| norm(&f, NormKind::Linf);
            let mut rows = Vec::new();
            let low = sup(spec.apply(&multiplier(grid, MultiplierKind::Low, 0)?));
            rows.push(vec![lambda, 0.0, low, 1.0 / lambda, low * lambda]);
            for j in bands.clone() {
                let v = sup(spec.apply(&multiplier(grid, MultiplierKind::Band, j)?));
                let p = 2f64.powi(j);
                let bound = (lambda / p).min(p / lambda);
                rows.push(vec![lambda, j as f64, v, bound, v / bound]);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    for r in rows.into_iter().flatten() {
        t.push(r);
    }
    Ok(t)
}

/// `(max band ratio, max lambda ||P_{<=0} g_lambda||_inf over lambda >= 4)`.
pub fn glambda_maxima(t: &ScanTable) -> (f64, f64) {
    let lam = t.column("lambda");
    let j = t.column("j");
    let ratio = t.column("ratio");
    let mut band: f64 = 0.0;
    let mut low: f64 = 0.0;
    for i in 0..lam.len() {
        if j[i] == 0.0 {
            if lam[i] >= 4.0 {
                low = low.max(ratio[i]);
            }
        } else {
            band = band.max(ratio[i]);
        }
    }
    (band, low)
}

/// Nodes per unit period used by [`unit_period_l1`].
pub const L1_NODES_PER_UNIT: usize = 1 << 22;

/// `int_0^1 |S|` for a 1-periodic trigonometric polynomial sampled on the
/// grid. The samples of one unit period are interpolated spectrally onto
/// [`L1_NODES_PER_UNIT`] nodes before summing; a plain Riemann sum over the
/// grid points loses ~1e-4 at the sign changes once the top frequency has
/// only a few samples per period.
pub fn unit_period_l1(s: &GridFunction) -> f64 {
    let grid = s.grid();
    let per_unit = (1.0 / grid.spacing()).round() as usize;
    let c = grid.center();
    let unit: Vec<Complex64> = s.samples()[c..c + per_unit]
        .iter()
        .map(|z| Complex64::new(z.re, 0.0))
        .collect();
    let q = per_unit.max(L1_NODES_PER_UNIT);
    let coeffs = fft::forward(&unit);
    let mut padded = vec![Complex64::new(0.0, 0.0); q];
    for (b, z) in coeffs.iter().enumerate() {
        let n = fft::signed_bin(b, per_unit);
        if per_unit < q && n == -(per_unit as i64 / 2) {
            // split the Nyquist bin between +-n
            padded[per_unit / 2] += z * 0.5;
            padded[q - per_unit / 2] += z * 0.5;
        } else {
            padded[n.rem_euclid(q as i64) as usize] += z;
        }
    }
    fft::inverse_in_place(&mut padded);
    let gain = q as f64 / per_unit as f64;
    padded.iter().map(|z| (z.re * gain).abs()).sum::<f64>() / q as f64
}

/// Rows `{n, l1_unit, l1_over_sqrt_n, fn_besov, fn_l2}` for the lacunary
/// sums and `F_N`.
pub fn lacunary_scan(grid: &TorusGrid, n_range: std::ops::RangeInclusive<usize>) -> Result<ScanTable> {
    let max_n = max_admissible_n(grid);
    if *n_range.end() > max_n {
        return Err(Error::Admissibility {
            n: *n_range.end(),
            max_n,
        });
    }
    let mut t = ScanTable::new("lacunary", &["n", "l1_unit", "l1_over_sqrt_n", "fn_besov", "fn_l2"]);
    base_meta(&mut t, grid, "-");
    let rows: Vec<Vec<f64>> = n_range
        .into_par_iter()
        .map(|n| {
            let l1 = unit_period_l1(&lacunary_sum(n, grid)?);
            let big = lacunary_bump(n, grid)?;
            let b = besov_norm(&big).besov_part;
            Ok(vec![n as f64, l1, l1 / (n as f64).sqrt(), b, norm(&big, NormKind::L2)])
        })
        .collect::<Result<_>>()?;
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

pub const RATIO_COLUMNS: [&str; 16] = [
    "n",
    "l1_unit",
    "l1_over_sqrt_n",
    "fn_besov",
    "fn_l2",
    "msharp_min",
    "msharp_min_over_sqrt_n",
    "msharp_besov",
    "rho_msharp_inf",
    "small_f_b",
    "msharp_small_f_b",
    "mdiamond_small_f_b",
    "r_sharp",
    "r_diamond",
    "predicted",
    "rho_ratio",
];

/// One row of the ratio scan. `F_N` lives on `profile.grid`, `f_N` on
/// `profile.dilated_grid`; maximal functions use dyadic radii.
pub fn ratio_row(profile: &Profile, n: usize) -> Result<Vec<f64>> {
    let grid = &profile.grid;
    let fine = &profile.dilated_grid;
    let nf = n as f64;
    let l1 = unit_period_l1(&lacunary_sum(n, grid)?);
    let big = lacunary_bump(n, grid)?;
    let big_besov = besov_norm(&big).besov_part;
    let big_l2 = norm(&big, NormKind::L2);
    let ms = sharp_maximal(&big, &RadiiSet::dyadic(grid))?.values;
    let c = grid.center();
    let reach = (1.0 / grid.spacing()).round() as usize;
    let ms_min = ms.samples()[c - reach..=c + reach]
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    let ms_besov = besov_norm(&ms).besov_part;
    let rho = norm(&mollifier_apply(&ms)?, NormKind::Linf);
    drop(ms);
    drop(big);
    let small = dilated_lacunary_bump(n, fine)?;
    let fine_radii = RadiiSet::dyadic(fine);
    let small_b = b_norm(&small).total;
    let sharp_b = b_norm(&sharp_maximal(&small, &fine_radii)?.values).total;
    let diamond_b = b_norm(&diamond_maximal(&small, &fine_radii)?.values).total;
    Ok(vec![
        nf,
        l1,
        l1 / nf.sqrt(),
        big_besov,
        big_l2,
        ms_min,
        ms_min / nf.sqrt(),
        ms_besov,
        rho,
        small_b,
        sharp_b,
        diamond_b,
        sharp_b / small_b,
        diamond_b / small_b,
        nf.sqrt() / (nf.log2() + 1.0),
        rho / ms_besov,
    ])
}

/// Size of `M_sharp F_N` and the contrast between `M_sharp` and `M_diamond` on
/// `f_N`, one row per `N`.
pub fn ratio_scan(profile: &Profile, n_range: std::ops::RangeInclusive<usize>) -> Result<ScanTable> {
    let max_n = max_admissible_n(&profile.grid).min(max_admissible_dilated_n(&profile.dilated_grid));
    if *n_range.start() < 1 || *n_range.end() > max_n {
        return Err(Error::Admissibility {
            n: *n_range.end(),
            max_n,
        });
    }
    let mut t = ScanTable::new("ratio", &RATIO_COLUMNS);
    base_meta(&mut t, &profile.grid, "dyadic");
    t.set_meta("profile", profile.name);
    t.set_meta("dilated_grid", profile.dilated_grid);
    let rows: Vec<Vec<f64>> = n_range
        .into_par_iter()
        .map(|n| ratio_row(profile, n))
        .collect::<Result<_>>()?;
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

/// Rows of `t` whose `n` column lies in the range.
pub fn rows_in(t: &ScanTable, col: &str, range: &std::ops::RangeInclusive<usize>) -> Vec<f64> {
    let n = t.column("n");
    t.column(col)
        .into_iter()
        .zip(n)
        .filter(|(_, n)| range.contains(&(*n as usize)))
        .map(|(v, _)| v)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_power_law() {
        let xs: Vec<f64> = (1..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(0.5)).collect();
        let (slope, icpt) = log_log_fit(&xs, &ys).unwrap();
        assert!((slope - 0.5).abs() < 1e-12);
        assert!((icpt - 3f64.ln()).abs() < 1e-12);
        assert!((correlation(&xs, &xs) - 1.0).abs() < 1e-12);
        assert_eq!(spread(&[2.0, 4.0, 3.0]), 2.0);
    }

    #[test]
    fn lp_facts_on_small_grid() {
        let g = TorusGrid::new(16.0, 1 << 12).unwrap();
        let t = lp_kernel_facts(&g, 1..=g.j_max() - 1).unwrap();
        for r in &t.rows {
            assert!(r[7] < 1e-12 && r[8] < 1e-12);
            // ||h_j||_1 >= sup of the symbol = 1
            assert!(r[1] >= 1.0 - 1e-12);
        }
        for c in LP_FACT_COLUMNS {
            assert!(spread(&t.column(c)) <= 2.0, "{c}");
        }
    }

    #[test]
    fn unit_period_integral_of_single_sine() {
        let g = TorusGrid::new(16.0, 1 << 16).unwrap();
        let l1 = unit_period_l1(&lacunary_sum(1, &g).unwrap());
        assert!((l1 - 2.0 / std::f64::consts::PI).abs() < 1e-6);
    }
}
