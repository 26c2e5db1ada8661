//! Pass/fail verifications on the random and adversarial corpora.

use super::corpus::{adversarial_corpus, band_limited_corpus, wideband_corpus};
use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::grid::{
    dilate_dyadic_with, norm, rescale_period, Extension, GridFunction, NormKind, RadiiSet, TorusGrid,
};
use crate::maximal::{diamond_maximal, hardy_littlewood, sharp_maximal, MaximalResult};
use crate::spectral::{besov_norm, multiplier, mollifier_apply, telescope_residual, MultiplierKind, Spectrum};
use rayon::prelude::*;

pub const ANCHOR_DOMINATION: &str = "domination chain M_diamond <= M_sharp <= 2M, pointwise";
pub const ANCHOR_PROJECTIONS: &str = "widened projection identity and LP partition of unity";
pub const ANCHOR_DILATION: &str = "dyadic dilation: commutation and B-norm bounds for Dil_m, Dil_-m";
pub const ANCHOR_EMBEDDING: &str = "embedding ||f||_calB <= C ||f||_inf";
pub const ANCHOR_MOLLIFIER: &str = "mollifier bound ||rho * g||_inf <= C ||g||_calB";

/// Every radius up to 32 plus the dyadic radii beyond, capped at `M/4`.
pub fn domination_radii(grid: &TorusGrid) -> RadiiSet {
    let cap = grid.radius_cap_index();
    let mut k: Vec<usize> = (1..=32.min(cap)).collect();
    let mut d = 64;
    while d <= cap {
        k.push(d);
        d *= 2;
    }
    RadiiSet::new(grid, k).expect("radii within cap")
}

type MaximalFn = fn(&GridFunction, &RadiiSet) -> Result<MaximalResult>;

/// The three operators entering the domination chain. Swapping one out lets
/// a test feed a deliberately broken operator through the same check.
#[derive(Clone, Copy)]
pub struct ChainOperators {
    pub diamond: MaximalFn,
    pub sharp: MaximalFn,
    pub hl: MaximalFn,
}

impl Default for ChainOperators {
    fn default() -> Self {
        ChainOperators {
            diamond: diamond_maximal,
            sharp: sharp_maximal,
            hl: hardy_littlewood,
        }
    }
}

/// `(min (M_sharp - M_diamond), min (2M - M_sharp))` over the grid.
pub fn domination_slack(f: &GridFunction, radii: &RadiiSet) -> Result<(f64, f64)> {
    domination_slack_with(&ChainOperators::default(), f, radii)
}

pub fn domination_slack_with(
    ops: &ChainOperators,
    f: &GridFunction,
    radii: &RadiiSet,
) -> Result<(f64, f64)> {
    let d = (ops.diamond)(f, radii)?.real_values();
    let s = (ops.sharp)(f, radii)?.real_values();
    let h = (ops.hl)(f, radii)?.real_values();
    let mut lo = (f64::INFINITY, f64::INFINITY);
    for i in 0..d.len() {
        lo.0 = lo.0.min(s[i] - d[i]);
        lo.1 = lo.1.min(2.0 * h[i] - s[i]);
    }
    Ok(lo)
}

/// Verifies the discrete domination chain on `count` seeded band-limited
/// functions and on the adversarial shapes, with shared radii.
pub fn check_domination(grid: &TorusGrid, count: usize, seed: u64) -> Result<Vec<CheckReport>> {
    check_domination_with(&ChainOperators::default(), grid, count, seed)
}

pub fn check_domination_with(
    ops: &ChainOperators,
    grid: &TorusGrid,
    count: usize,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let radii = domination_radii(grid);
    let corpus = band_limited_corpus(grid, count, seed);
    let slack: Vec<(f64, f64)> = corpus
        .par_iter()
        .map(|f| domination_slack_with(ops, f, &radii))
        .collect::<Result<_>>()?;
    let adversarial = adversarial_corpus(grid, seed);
    let adv: Vec<(f64, f64)> = adversarial
        .par_iter()
        .map(|(_, f)| domination_slack_with(ops, f, &radii))
        .collect::<Result<_>>()?;
    let min0 = |v: &[(f64, f64)]| v.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let min1 = |v: &[(f64, f64)]| v.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let ctx = |what: &str| format!("{what}; grid={grid}; radii={}", radii.cap_note(grid));
    Ok(vec![
        CheckReport::at_least(
            "domination.sharp_over_diamond",
            min0(&slack),
            -1e-12,
            ANCHOR_DOMINATION,
            ctx(&format!("min of M_sharp - M_diamond over {count} random functions, seed {seed}")),
        ),
        CheckReport::at_least(
            "domination.hl_over_sharp",
            min1(&slack),
            -1e-12,
            ANCHOR_DOMINATION,
            ctx(&format!("min of 2M - M_sharp over {count} random functions, seed {seed}")),
        ),
        CheckReport::at_least(
            "domination.adversarial",
            min0(&adv).min(min1(&adv)),
            -1e-12,
            ANCHOR_DOMINATION,
            ctx(&format!("both slacks over {} steps/spikes/sign patterns", adversarial.len())),
        ),
    ])
}

/// `max_j ||P~_j P_j f - P_j f||_inf / ||f||_inf` over `1 <= j <= j_max`.
pub fn widened_identity_residual(f: &GridFunction) -> Result<f64> {
    let grid = *f.grid();
    let scale = norm(f, NormKind::Linf).max(f64::MIN_POSITIVE);
    let spec = Spectrum::of(f);
    let mut worst: f64 = 0.0;
    for j in 1..=grid.j_max() {
        let pj = spec.apply(&multiplier(&grid, MultiplierKind::Band, j)?);
        let twice = Spectrum::of(&pj).apply(&multiplier(&grid, MultiplierKind::Widened, j)?);
        worst = worst.max(twice.max_abs_diff(&pj) / scale);
    }
    Ok(worst)
}

pub fn check_projection_algebra(grid: &TorusGrid, count: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let mut inputs = band_limited_corpus(grid, count, seed);
    inputs.extend(wideband_corpus(grid, count, seed));
    let widened: Vec<f64> = inputs
        .par_iter()
        .map(widened_identity_residual)
        .collect::<Result<_>>()?;
    let telescope: Vec<f64> = inputs
        .par_iter()
        .map(|f| telescope_residual(f, grid.j_max()))
        .collect::<Result<_>>()?;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(vec![
        CheckReport::at_most(
            "projections.widened_identity",
            max(&widened),
            1e-12,
            ANCHOR_PROJECTIONS,
            format!(
                "max over j <= {} and {} inputs of ||P~_j P_j f - P_j f||_inf / ||f||_inf; grid={grid}",
                grid.j_max(),
                inputs.len()
            ),
        ),
        CheckReport::at_most(
            "projections.telescope",
            max(&telescope),
            1e-10,
            ANCHOR_PROJECTIONS,
            format!(
                "||(P_<=0 + sum_j<=j_max P_j) f - f||_inf on inputs band-limited below 2^j_max; grid={grid}"
            ),
        ),
    ])
}

/// Raw results of the dilation check.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationOutcome {
    pub commute_sharp: f64,
    pub commute_diamond: f64,
    pub commute_hl: f64,
    /// `max ||Dil_m f||_calB / ||f||_calB`
    pub c_plus: f64,
    /// `max ||Dil_-m f||_calB / ((m + 1) ||f||_calB)`
    pub c_minus: f64,
    pub skipped: Vec<String>,
}

/// Commutation of the three maximal operators with the change of variables
/// `x -> 2^m x`, and the measured constants of the two B-norm bounds, for
/// `m = 0..=m_max` on an `L`-periodic corpus.
pub fn dilation_measure(
    corpus: &[GridFunction],
    m_max: i32,
    tol: f64,
) -> Result<DilationOutcome> {
    if !(0..=4).contains(&m_max) {
        return Err(Error::config("m_range", "dilation range must lie in 0..=4"));
    }
    let grid = *corpus
        .first()
        .ok_or_else(|| Error::config("corpus", "empty corpus"))?
        .grid();
    let radii = RadiiSet::dyadic(&grid);
    let per: Vec<Result<DilationOutcome>> = corpus
        .par_iter()
        .enumerate()
        .map(|(idx, f)| {
            let mut out = DilationOutcome {
                commute_sharp: 0.0,
                commute_diamond: 0.0,
                commute_hl: 0.0,
                c_plus: 0.0,
                c_minus: 0.0,
                skipped: Vec::new(),
            };
            let base = besov_norm(f).besov_part;
            let ops: [fn(&GridFunction, &RadiiSet) -> Result<crate::maximal::MaximalResult>; 3] =
                [sharp_maximal, diamond_maximal, hardy_littlewood];
            let direct: Vec<GridFunction> = ops
                .iter()
                .map(|op| op(f, &radii).map(|r| r.values))
                .collect::<Result<_>>()?;
            for m in 0..=m_max {
                let g = rescale_period(f, m)?;
                let g_radii = RadiiSet::new(g.grid(), radii.indices().to_vec())?;
                for (slot, (op, d)) in ops.iter().zip(&direct).enumerate() {
                    let lhs = op(&g, &g_radii)?.values;
                    let rhs = rescale_period(d, m)?;
                    let r = lhs.max_abs_diff(&rhs);
                    let target = match slot {
                        0 => &mut out.commute_sharp,
                        1 => &mut out.commute_diamond,
                        _ => &mut out.commute_hl,
                    };
                    *target = target.max(r);
                }
                if m == 0 || base == 0.0 {
                    continue;
                }
                let up = dilate_dyadic_with(f, m, Extension::Periodic, tol)?;
                out.c_plus = out.c_plus.max(besov_norm(&up).besov_part / base);
                match dilate_dyadic_with(f, -m, Extension::Periodic, tol) {
                    Ok(down) => {
                        let ratio = besov_norm(&down).besov_part / ((m + 1) as f64 * base);
                        out.c_minus = out.c_minus.max(ratio);
                    }
                    Err(Error::Dilation { residual, .. }) => out
                        .skipped
                        .push(format!("corpus[{idx}] m=-{m}: not band-limited (residual {residual:.2e})")),
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        })
        .collect();
    let mut total = DilationOutcome {
        commute_sharp: 0.0,
        commute_diamond: 0.0,
        commute_hl: 0.0,
        c_plus: 0.0,
        c_minus: 0.0,
        skipped: Vec::new(),
    };
    for r in per {
        let r = r?;
        total.commute_sharp = total.commute_sharp.max(r.commute_sharp);
        total.commute_diamond = total.commute_diamond.max(r.commute_diamond);
        total.commute_hl = total.commute_hl.max(r.commute_hl);
        total.c_plus = total.c_plus.max(r.c_plus);
        total.c_minus = total.c_minus.max(r.c_minus);
        total.skipped.extend(r.skipped);
    }
    Ok(total)
}

pub fn dilation_reports(
    outcome: &DilationOutcome,
    c_plus: f64,
    c_minus: f64,
    grid: &TorusGrid,
    m_max: i32,
) -> Vec<CheckReport> {
    let ctx = format!(
        "m = 0..={m_max}; dyadic radii; corpus grid={grid}; skipped {}",
        outcome.skipped.len()
    );
    vec![
        CheckReport::at_most("dilation.commute_sharp", outcome.commute_sharp, 1e-12, ANCHOR_DILATION, ctx.clone()),
        CheckReport::at_most("dilation.commute_diamond", outcome.commute_diamond, 1e-12, ANCHOR_DILATION, ctx.clone()),
        CheckReport::at_most("dilation.commute_hl", outcome.commute_hl, 1e-12, ANCHOR_DILATION, ctx.clone()),
        CheckReport::at_most("dilation.positive", outcome.c_plus, c_plus, ANCHOR_DILATION, format!("{ctx}; bound is stored C+")),
        CheckReport::at_most("dilation.negative", outcome.c_minus, c_minus, ANCHOR_DILATION, format!("{ctx}; bound is stored C-")),
    ]
}

/// `max ||f||_calB / ||f||_inf` over the inputs.
pub fn embedding_ratio(inputs: &[GridFunction]) -> f64 {
    inputs
        .par_iter()
        .map(|f| besov_norm(f).besov_part / norm(f, NormKind::Linf))
        .reduce(|| 0.0, f64::max)
}

/// `max ||rho * g||_inf / ||g||_calB` over the inputs.
pub fn mollifier_ratio(inputs: &[GridFunction]) -> Result<f64> {
    let v: Vec<f64> = inputs
        .par_iter()
        .map(|g| Ok(norm(&mollifier_apply(g)?, NormKind::Linf) / besov_norm(g).besov_part))
        .collect::<Result<_>>()?;
    Ok(v.into_iter().fold(0.0, f64::max))
}
