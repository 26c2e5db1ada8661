//! The full verification run: every scan and check of a profile, evaluated
//! against the stored calibration.

use super::calibration::{Calibration, Measured};
use super::checks::{
    check_domination, check_projection_algebra, dilation_measure, dilation_reports,
    embedding_ratio, mollifier_ratio, ANCHOR_EMBEDDING, ANCHOR_MOLLIFIER,
};
use super::corpus::band_limited_corpus;
use super::profile::Profile;
use super::report::{write_reports, CheckReport, ScanTable};
use super::scans::{
    correlation, glambda_maxima, glambda_scan, kernel_decay_scan, kernel_decay_slopes,
    lacunary_scan, log_log_fit, lp_kernel_facts, ratio_scan, rows_in, spread, LP_FACT_COLUMNS,
};
use crate::constructions::max_admissible_n;
use crate::error::Result;
use crate::kernel::Kernel;
use crate::spectral::embedding_constant;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const ANCHOR_KERNEL_DECAY: &str = "kernel estimate ||K_r * h~_j||_1 <~ min(2^j r, (2^j r)^-1)";
pub const ANCHOR_LP_FACTS: &str = "uniform L1, derivative and moment bounds for h_j, h~_j";
pub const ANCHOR_GLAMBDA: &str = "LP estimates for g_lambda";
pub const ANCHOR_LACUNARY: &str = "int_0^1 |S_N| ~ N^1/2 for lacunary S_N";
pub const ANCHOR_FN_BOUNDED: &str = "||F_N||_calB <~ 1 uniformly in N";
pub const ANCHOR_MSHARP_LARGE: &str = "M_sharp F_N >~ N^1/2 on B_1(0), ||M_sharp F_N||_calB >~ N^1/2";
pub const ANCHOR_CONTRAST: &str = "M_diamond bounded on B, ||M_sharp f_N||_B / ||f_N||_B >~ N^1/2 / (log2 N + 1)";

/// Everything a suite run produces.
#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub reports: Vec<CheckReport>,
    pub tables: Vec<ScanTable>,
    pub measured: Measured,
}

impl SuiteOutput {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(CheckReport::passed)
    }

    /// Write every table under its own file name plus `reports.jsonl` into
    /// `dir`; returns the written paths.
    pub fn persist(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            let path = dir.join(t.file_name());
            let mut w = BufWriter::new(File::create(&path)?);
            t.write(&mut w)?;
            w.flush()?;
            written.push(path);
        }
        let path = dir.join("reports.jsonl");
        let mut w = BufWriter::new(File::create(&path)?);
        write_reports(&mut w, &self.reports)?;
        w.flush()?;
        written.push(path);
        Ok(written)
    }
}

/// The tables behind the suite, computed once.
#[derive(Debug, Clone)]
pub struct SuiteTables {
    pub lp_facts: ScanTable,
    pub kernel_decay: ScanTable,
    pub glambda: ScanTable,
    pub lacunary: ScanTable,
    pub ratio: ScanTable,
}

pub fn compute_tables(profile: &Profile) -> Result<SuiteTables> {
    let grid = &profile.grid;
    Ok(SuiteTables {
        lp_facts: lp_kernel_facts(grid, 1..=grid.j_max() - 1)?,
        kernel_decay: kernel_decay_scan(grid, &Kernel::diamond(), profile.kernel_bands.clone())?,
        glambda: glambda_scan(grid, &profile.glambda_list(), profile.glambda_bands.clone())?,
        lacunary: lacunary_scan(grid, 1..=max_admissible_n(grid).min(*profile.ratio_range.end()))?,
        ratio: ratio_scan(profile, profile.ratio_range.clone())?,
    })
}

pub fn lp_fact_reports(t: &ScanTable) -> Vec<CheckReport> {
    let residual = t
        .column("h_mean_residual")
        .into_iter()
        .chain(t.column("ht_mean_residual"))
        .fold(0.0, f64::max);
    let mut out = vec![CheckReport::at_most(
        "lp_facts.mean_zero",
        residual,
        1e-12,
        ANCHOR_LP_FACTS,
        "max |int h_j|, |int h~_j| over the scanned j",
    )];
    for c in LP_FACT_COLUMNS {
        out.push(CheckReport::at_most(
            &format!("lp_facts.{c}.spread"),
            spread(&t.column(c)),
            2.0,
            ANCHOR_LP_FACTS,
            "max/min over j = 1..j_max-1",
        ));
    }
    out
}

pub fn kernel_decay_reports(t: &ScanTable, ratio_bound: f64) -> Vec<CheckReport> {
    let (small, large) = kernel_decay_slopes(t);
    let max_ratio = t.column("ratio").into_iter().fold(0.0, f64::max);
    vec![
        CheckReport::within(
            "kernel_decay.slope_small_s",
            small.unwrap_or(f64::NAN),
            0.8,
            1.2,
            ANCHOR_KERNEL_DECAY,
            "OLS slope of log lhs vs log s, s in [2^-6, 2^-2], diamond kernel",
        ),
        CheckReport::within(
            "kernel_decay.slope_large_s",
            large.unwrap_or(f64::NAN),
            -1.2,
            -0.8,
            ANCHOR_KERNEL_DECAY,
            "OLS slope of log lhs vs log s, s in [2^2, 2^6], diamond kernel",
        ),
        CheckReport::at_most(
            "kernel_decay.ratio",
            max_ratio,
            ratio_bound,
            ANCHOR_KERNEL_DECAY,
            "max lhs / min(s, 1/s); bound is the stored calibration",
        ),
    ]
}

pub fn glambda_reports(t: &ScanTable, band_bound: f64, low_bound: f64) -> Vec<CheckReport> {
    let (band, low) = glambda_maxima(t);
    vec![
        CheckReport::at_most(
            "glambda.band_ratio",
            band,
            band_bound,
            ANCHOR_GLAMBDA,
            "max ||P_j g_lambda||_inf / min(lambda/2^j, 2^j/lambda); stored bound",
        ),
        CheckReport::at_most(
            "glambda.low_ratio",
            low,
            low_bound,
            ANCHOR_GLAMBDA,
            "max lambda ||P_<=0 g_lambda||_inf over lambda >= 4; stored bound",
        ),
    ]
}

pub fn lacunary_reports(t: &ScanTable) -> Vec<CheckReport> {
    let n = t.column("n");
    let v = t.column("l1_over_sqrt_n");
    let rest: Vec<f64> = n.iter().zip(&v).filter(|(n, _)| **n >= 2.0).map(|(_, v)| *v).collect();
    let lo = rest.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rest.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = vec![
        CheckReport::at_least("lacunary.l1_over_sqrt_n.min", lo, 0.45, ANCHOR_LACUNARY, "N >= 2"),
        CheckReport::at_most("lacunary.l1_over_sqrt_n.max", hi, 0.80, ANCHOR_LACUNARY, "N >= 2"),
    ];
    if let Some(i) = n.iter().position(|&x| x == 1.0) {
        out.push(CheckReport::at_most(
            "lacunary.n1_closed_form",
            (t.column("l1_unit")[i] - 2.0 / std::f64::consts::PI).abs(),
            1e-6,
            ANCHOR_LACUNARY,
            "|int_0^1 |sin 4 pi t| dt - 2/pi|",
        ));
    }
    let fb = t.column("fn_besov");
    out.push(CheckReport::at_most(
        "fn_besov.uniform",
        spread(&fb),
        3.0,
        ANCHOR_FN_BOUNDED,
        format!("max/min of ||F_N||_calB over N = 1..{}", n.len()),
    ));
    out
}

/// Spread, floor and growth slope of `M_sharp F_N`.
pub fn msharp_reports(
    t: &ScanTable,
    trend: &std::ops::RangeInclusive<usize>,
    floor: f64,
) -> Vec<CheckReport> {
    let mins = rows_in(t, "msharp_min_over_sqrt_n", trend);
    let ns = rows_in(t, "n", trend);
    let besov = rows_in(t, "msharp_besov", trend);
    let slope = log_log_fit(&ns, &besov).map_or(f64::NAN, |f| f.0);
    let window = format!("N = {}..{}", trend.start(), trend.end());
    vec![
        CheckReport::at_most(
            "msharp_min.spread",
            spread(&mins),
            2.0,
            ANCHOR_MSHARP_LARGE,
            format!("max/min of min_[-1,1] M_sharp F_N / sqrt N, {window}"),
        ),
        CheckReport::at_least(
            "msharp_min.floor",
            mins.iter().copied().fold(f64::INFINITY, f64::min),
            floor,
            ANCHOR_MSHARP_LARGE,
            format!("min over {window}; stored floor"),
        ),
        CheckReport::within(
            "msharp_besov.slope",
            slope,
            0.35,
            0.65,
            ANCHOR_MSHARP_LARGE,
            format!("OLS slope of log ||M_sharp F_N||_calB vs log N, {window}"),
        ),
    ]
}

pub fn contrast_reports(
    t: &ScanTable,
    trend: &std::ops::RangeInclusive<usize>,
    band: (f64, f64),
) -> Vec<CheckReport> {
    let rd = rows_in(t, "r_diamond", trend);
    let rs = rows_in(t, "r_sharp", trend);
    let pred = rows_in(t, "predicted", trend);
    let fb = rows_in(t, "small_f_b", trend);
    let window = format!("N = {}..{}", trend.start(), trend.end());
    let growth = rs.last().copied().unwrap_or(f64::NAN) / rs.first().copied().unwrap_or(f64::NAN);
    vec![
        CheckReport::at_most(
            "r_diamond.spread",
            spread(&rd),
            1.5,
            ANCHOR_CONTRAST,
            format!("max/min of ||M_diamond f_N||_B / ||f_N||_B, {window}"),
        ),
        CheckReport::at_least(
            "r_sharp.growth",
            growth,
            1.3,
            ANCHOR_CONTRAST,
            format!("R_sharp(N_max) / R_sharp(N_min), {window}"),
        ),
        CheckReport::at_least(
            "r_sharp.correlation",
            correlation(&rs, &pred),
            f64::MIN_POSITIVE,
            ANCHOR_CONTRAST,
            format!("corr(R_sharp, sqrt N / (log2 N + 1)) > 0, {window}"),
        ),
        CheckReport::within(
            "small_f_b.band",
            fb.iter().copied().fold(f64::INFINITY, f64::min),
            band.0,
            band.1,
            ANCHOR_CONTRAST,
            format!("min ||f_N||_B, {window}; stored band"),
        ),
        CheckReport::within(
            "small_f_b.band_max",
            fb.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            band.0,
            band.1,
            ANCHOR_CONTRAST,
            format!("max ||f_N||_B, {window}; stored band"),
        ),
    ]
}

/// Run every scan and check of `profile` and compare with `cal`.
pub fn run_suite(profile: &Profile, cal: &Calibration, seed: u64) -> Result<SuiteOutput> {
    let c = &cal.constants;
    let mut reports = Vec::new();
    let cgrid = &profile.corpus_grid;

    reports.extend(check_domination(cgrid, profile.corpus_size, seed)?);
    reports.extend(check_projection_algebra(cgrid, 4, seed)?);

    let corpus = band_limited_corpus(cgrid, profile.corpus_size, seed);
    let dil = dilation_measure(&corpus, profile.max_dilation, profile.tol)?;
    reports.extend(dilation_reports(&dil, c.c_plus, c.c_minus, cgrid, profile.max_dilation));

    let c_emb = embedding_constant(&profile.grid)?;
    let emb_ratio = embedding_ratio(&corpus);
    reports.push(CheckReport::at_most(
        "embedding.constant",
        c_emb,
        c.c_emb,
        ANCHOR_EMBEDDING,
        format!("||h_<=0||_1 + max_j ||h_j||_1 on grid={}; stored bound", profile.grid),
    ));
    reports.push(CheckReport::at_most(
        "embedding.corpus",
        emb_ratio,
        c_emb,
        ANCHOR_EMBEDDING,
        "max ||f||_calB / ||f||_inf over the corpus against the measured constant",
    ));

    let tables = compute_tables(profile)?;
    reports.extend(lp_fact_reports(&tables.lp_facts));
    reports.extend(kernel_decay_reports(&tables.kernel_decay, c.kernel_decay_ratio_bound));
    reports.extend(glambda_reports(&tables.glambda, c.glambda_ratio_bound, c.glambda_low_bound));
    reports.extend(lacunary_reports(&tables.lacunary));
    reports.extend(msharp_reports(&tables.ratio, &profile.trend_range, c.msharp_min_floor));
    reports.extend(contrast_reports(
        &tables.ratio,
        &profile.trend_range,
        (c.fn_b_norm_low, c.fn_b_norm_high),
    ));

    let rho_corpus = mollifier_ratio(&corpus)?;
    let rho_msharp = tables.ratio.column("rho_ratio").into_iter().fold(0.0, f64::max);
    let c_rho = rho_corpus.max(rho_msharp);
    reports.push(CheckReport::at_most(
        "mollifier.constant",
        c_rho,
        c.c_rho,
        ANCHOR_MOLLIFIER,
        "max ||rho * g||_inf / ||g||_calB over the corpus and M_sharp F_N; stored bound",
    ));

    let (glambda_ratio, glambda_low) = glambda_maxima(&tables.glambda);
    let trend = &profile.trend_range;
    let fb = rows_in(&tables.ratio, "small_f_b", trend);
    let measured = Measured {
        c_emb,
        c_rho,
        c_plus: dil.c_plus,
        c_minus: dil.c_minus,
        glambda_ratio,
        glambda_low,
        kernel_decay_ratio: tables.kernel_decay.column("ratio").into_iter().fold(0.0, f64::max),
        msharp_min: rows_in(&tables.ratio, "msharp_min_over_sqrt_n", trend)
            .into_iter()
            .fold(f64::INFINITY, f64::min),
        fn_b_norm_min: fb.iter().copied().fold(f64::INFINITY, f64::min),
        fn_b_norm_max: fb.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };

    let mut all_tables = vec![
        tables.lp_facts,
        tables.kernel_decay,
        tables.glambda,
        tables.lacunary,
        tables.ratio,
    ];
    for t in &mut all_tables {
        t.set_meta("profile", profile.name);
        t.set_meta("seed", seed);
        t.set_meta("tol", profile.tol);
        t.set_meta("calibration", format!("{} ({})", cal.profile, cal.grid));
    }
    Ok(SuiteOutput {
        reports,
        tables: all_tables,
        measured,
    })
}
