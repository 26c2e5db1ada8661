use crate::args::{Cli, Command, GlobalArgs, Operator, ScanName};
use lpmax_core::constructions::{max_admissible_dilated_n, max_admissible_n, CounterexampleSpec};
use lpmax_core::experiments::{run_suite, scans, Calibration, Profile, ProfileName, ScanTable};
use lpmax_core::format::{read_grid_function, write_grid_function_with_meta};
use lpmax_core::maximal::{diamond_maximal, hardy_littlewood, sharp_maximal, tk_star};
use lpmax_core::spectral::b_norm;
use lpmax_core::{Error, GridFunction, Kernel, Result, TorusGrid};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ADMISSIBILITY: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_ADMISSIBILITY
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Compute { input, op, kernel } => compute(g, input, *op, kernel),
        Command::Bnorm { input } => bnorm(g, input),
        Command::Scan {
            name,
            n_min,
            n_max,
            j_min,
            j_max,
            kernel,
        } => scan(g, *name, (*n_min, *n_max), (*j_min, *j_max), kernel),
        Command::Verify {
            calibration,
            write_calibration,
        } => verify(g, calibration.as_deref(), write_calibration.as_deref()),
        Command::Describe { n } => describe(g, *n),
    }
}

fn resolve_profile(g: &GlobalArgs) -> Result<Profile> {
    let mut p = Profile::new(g.profile);
    if let Some(grid) = g.grid {
        p = p.with_grid(grid)?;
    }
    if let Some(tol) = g.tol {
        p.tol = tol;
    }
    Ok(p)
}

fn read_input(path: &Path) -> Result<GridFunction> {
    let file = File::open(path).map_err(|e| Error::Config {
        field: "input",
        message: format!("{}: {e}", path.display()),
    })?;
    read_grid_function(BufReader::new(file))
}

fn kernel_by_name(name: &str) -> Result<Kernel> {
    Kernel::by_name(name).ok_or_else(|| Error::Config {
        field: "kernel",
        message: format!("unknown kernel '{name}' (diamond, box, bump, odd-bump)"),
    })
}

fn out_dir(g: &GlobalArgs, fallback: &Path) -> Result<PathBuf> {
    let dir = g.out.clone().unwrap_or_else(|| fallback.to_path_buf());
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into())
}

fn compute(g: &GlobalArgs, input: &Path, op: Operator, kernel: &str) -> Result<i32> {
    let f = read_input(input)?;
    let radii = g.radii.resolve(f.grid())?;
    let result = match op {
        Operator::Hl => hardy_littlewood(&f, &radii)?,
        Operator::Sharp => sharp_maximal(&f, &radii)?,
        Operator::Diamond => diamond_maximal(&f, &radii)?,
        Operator::Tk => tk_star(&f, &kernel_by_name(kernel)?, &radii)?,
    };
    let dir = out_dir(g, input.parent().unwrap_or(Path::new(".")))?;
    let base = format!("{}.{}", stem(input), op.name());
    let mut meta = vec![
        ("operator", op.name().to_string()),
        ("radii", g.radii.to_string()),
        ("resolved_radii", radii.to_string()),
        ("cap", result.cap_note.clone()),
    ];
    if op == Operator::Tk {
        meta.push(("kernel", kernel.to_string()));
    }
    let path = dir.join(format!("{base}.txt"));
    let mut w = BufWriter::new(File::create(&path)?);
    write_grid_function_with_meta(&mut w, &result.values, &meta)?;
    w.flush()?;
    let sidecar = dir.join(format!("{base}.sidecar.json"));
    let json = serde_json::to_string_pretty(&result.sidecar(op.name()))
        .map_err(|e| Error::Config { field: "sidecar", message: e.to_string() })?;
    std::fs::write(&sidecar, json + "\n")?;
    println!("{}", path.display());
    println!("{}", sidecar.display());
    Ok(EXIT_OK)
}

fn bnorm(g: &GlobalArgs, input: &Path) -> Result<i32> {
    let f = read_input(input)?;
    let report = b_norm(&f);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Config { field: "report", message: e.to_string() })?;
    println!("{json}");
    if let Some(dir) = &g.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.bnorm.json", stem(input))), json + "\n")?;
    }
    Ok(EXIT_OK)
}

fn scan(
    g: &GlobalArgs,
    name: ScanName,
    n: (Option<usize>, Option<usize>),
    j: (Option<i32>, Option<i32>),
    kernel: &str,
) -> Result<i32> {
    let p = resolve_profile(g)?;
    let n_range = |default: std::ops::RangeInclusive<usize>| {
        n.0.unwrap_or(*default.start())..=n.1.unwrap_or(*default.end())
    };
    let j_range = |default: std::ops::RangeInclusive<i32>| {
        j.0.unwrap_or(*default.start())..=j.1.unwrap_or(*default.end())
    };
    let mut table: ScanTable = match name {
        ScanName::Ratio => scans::ratio_scan(&p, n_range(p.ratio_range.clone()))?,
        ScanName::Lacunary => {
            let top = max_admissible_n(&p.grid).min(*p.ratio_range.end());
            scans::lacunary_scan(&p.grid, n_range(1..=top))?
        }
        ScanName::KernelDecay => {
            scans::kernel_decay_scan(&p.grid, &kernel_by_name(kernel)?, j_range(p.kernel_bands.clone()))?
        }
        ScanName::LpFacts => scans::lp_kernel_facts(&p.grid, j_range(1..=p.grid.j_max() - 1))?,
        ScanName::Glambda => {
            scans::glambda_scan(&p.grid, &p.glambda_list(), j_range(p.glambda_bands.clone()))?
        }
    };
    table.set_meta("profile", p.name);
    table.set_meta("seed", g.seed);
    table.set_meta("command", scan_command_line(g, name, n, j, kernel));
    let dir = out_dir(g, Path::new("."))?;
    let path = dir.join(table.file_name());
    let mut w = BufWriter::new(File::create(&path)?);
    table.write(&mut w)?;
    w.flush()?;
    println!("{}", path.display());
    Ok(EXIT_OK)
}

// The flags that determine the table, in a form that can be pasted back.
fn scan_command_line(
    g: &GlobalArgs,
    name: ScanName,
    n: (Option<usize>, Option<usize>),
    j: (Option<i32>, Option<i32>),
    kernel: &str,
) -> String {
    let scan = match name {
        ScanName::Ratio => "ratio",
        ScanName::KernelDecay => "kernel-decay",
        ScanName::LpFacts => "lp-facts",
        ScanName::Glambda => "glambda",
        ScanName::Lacunary => "lacunary",
    };
    let mut s = format!("lpmax scan {scan} --profile {}", g.profile);
    if let Some(grid) = g.grid {
        s += &format!(" --grid {grid}");
    }
    for (flag, v) in [("--n-min", n.0), ("--n-max", n.1)] {
        if let Some(v) = v {
            s += &format!(" {flag} {v}");
        }
    }
    for (flag, v) in [("--j-min", j.0), ("--j-max", j.1)] {
        if let Some(v) = v {
            s += &format!(" {flag} {v}");
        }
    }
    if name == ScanName::KernelDecay {
        s += &format!(" --kernel {kernel}");
    }
    s += &format!(" --seed {}", g.seed);
    s
}

fn verify(g: &GlobalArgs, calibration: Option<&Path>, write_to: Option<&Path>) -> Result<i32> {
    let cal = Calibration::load(calibration)?;
    let p = resolve_profile(g)?;
    println!(
        "profile {} (grid {}, f_N grid {}, corpus grid {}), seed {}, calibration {} ({})",
        p.name, p.grid, p.dilated_grid, p.corpus_grid, g.seed, cal.profile, cal.grid
    );
    let out = run_suite(&p, &cal, g.seed)?;
    for r in &out.reports {
        println!("{r}");
    }
    let failed = out.reports.iter().filter(|r| !r.passed()).count();
    println!("{} of {} checks passed", out.reports.len() - failed, out.reports.len());
    if let Some(dir) = &g.out {
        for path in out.persist(dir)? {
            println!("wrote {}", path.display());
        }
    }
    if let Some(path) = write_to {
        Calibration::from_measured(&out.measured, &p.name.to_string(), &p.grid.to_string()).write(path)?;
        println!("wrote calibration {}", path.display());
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED_CHECK })
}

fn describe(g: &GlobalArgs, n: Option<usize>) -> Result<i32> {
    let grids: Vec<TorusGrid> = match g.grid {
        Some(grid) => vec![grid],
        None => [ProfileName::Quick, ProfileName::Reference, ProfileName::Large]
            .iter()
            .map(|&name| Profile::new(name).grid)
            .collect(),
    };
    if let Some(n) = n {
        for grid in &grids {
            let d = CounterexampleSpec::new(n, grid)?.describe();
            let json = serde_json::to_string_pretty(&d)
                .map_err(|e| Error::Config { field: "describe", message: e.to_string() })?;
            println!("{json}");
        }
        return Ok(EXIT_OK);
    }
    println!("{:>6} {:>10} {:>10} {:>6} {:>6} {:>12} {:>8}", "L", "M", "nyquist", "j_max", "max_N", "f_N grid M", "max_N f");
    for grid in &grids {
        let companion = TorusGrid::new(grid.period(), grid.size() * 4)?;
        println!(
            "{:>6} {:>10} {:>10} {:>6} {:>6} {:>12} {:>8}",
            grid.period(),
            grid.size(),
            grid.nyquist(),
            grid.j_max(),
            max_admissible_n(grid),
            companion.size(),
            max_admissible_n(grid).min(max_admissible_dilated_n(&companion)),
        );
    }
    Ok(EXIT_OK)
}
