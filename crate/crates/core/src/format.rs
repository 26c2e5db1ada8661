//! Plain-text exchange format for sampled functions.
//!
//! ```text
//! # period=16 size=1024
//! -8 0.0
//! -7.984375 0.0012
//! ...
//! ```
//!
//! Two columns `x value` for real data, three columns `x re im` for complex
//! data. Columns may be separated by whitespace or commas. Additional lines
//! starting with `#` after the header are ignored.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, TorusGrid};
use num_complex::Complex64;
use std::io::{BufRead, Write};

pub fn write_grid_function<W: Write>(out: &mut W, f: &GridFunction) -> Result<()> {
    write_grid_function_with_meta(out, f, &[])
}

/// Write with extra `# key=value` lines after the header.
pub fn write_grid_function_with_meta<W: Write>(
    out: &mut W,
    f: &GridFunction,
    meta: &[(&str, String)],
) -> Result<()> {
    let grid = f.grid();
    writeln!(out, "# period={} size={}", grid.period(), grid.size())?;
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    for (i, z) in f.samples().iter().enumerate() {
        if f.is_real() {
            writeln!(out, "{} {}", grid.x(i), z.re)?;
        } else {
            writeln!(out, "{} {} {}", grid.x(i), z.re, z.im)?;
        }
    }
    Ok(())
}

fn parse_header(line: &str) -> Result<TorusGrid> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| parse_err(1, "expected header '# period=<L> size=<M>'"))?;
    let mut period = None;
    let mut size = None;
    for token in body.split_whitespace() {
        match token.split_once('=') {
            Some(("period", v)) => {
                period = Some(v.parse::<f64>().map_err(|e| parse_err(1, format!("period: {e}")))?)
            }
            Some(("size", v)) => {
                size = Some(v.parse::<usize>().map_err(|e| parse_err(1, format!("size: {e}")))?)
            }
            _ => {}
        }
    }
    match (period, size) {
        (Some(p), Some(s)) => TorusGrid::new(p, s).map_err(|e| parse_err(1, e.to_string())),
        _ => Err(parse_err(1, "header must define period and size")),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_grid_function<R: BufRead>(input: R) -> Result<GridFunction> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input"))??;
    let grid = parse_header(header.trim())?;
    let mut samples = Vec::with_capacity(grid.size());
    let mut any_complex = false;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| parse_err(lineno, format!("'{s}': {e}")))
        };
        let z = match fields.as_slice() {
            [_, v] => Complex64::new(num(v)?, 0.0),
            [_, re, im] => {
                any_complex = true;
                Complex64::new(num(re)?, num(im)?)
            }
            _ => {
                return Err(parse_err(
                    lineno,
                    format!("expected 2 or 3 columns, found {}", fields.len()),
                ))
            }
        };
        if let Some(x) = fields.first() {
            let x = num(x)?;
            let expect = grid.x(samples.len().min(grid.size().saturating_sub(1)));
            if samples.len() < grid.size() && (x - expect).abs() > 1e-9 * grid.period() {
                return Err(parse_err(
                    lineno,
                    format!("abscissa {x} does not match grid point {expect}"),
                ));
            }
        }
        samples.push(z);
        if samples.len() > grid.size() {
            return Err(parse_err(lineno, format!("more than {} samples", grid.size())));
        }
    }
    if samples.len() != grid.size() {
        return Err(parse_err(
            samples.len() + 2,
            format!("expected {} samples, found {}", grid.size(), samples.len()),
        ));
    }
    let f = GridFunction::from_complex(grid, samples)?;
    Ok(if any_complex { f } else { f.into_real() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_real_and_complex() {
        let g = TorusGrid::new(2.0, 16).unwrap();
        let f = GridFunction::from_fn(g, |x| x * x - 0.1);
        let mut buf = Vec::new();
        write_grid_function(&mut buf, &f).unwrap();
        let back = read_grid_function(buf.as_slice()).unwrap();
        assert_eq!(back, f);

        let z = GridFunction::from_complex_fn(g, |x| Complex64::new(x, 1.0 - x));
        let mut buf = Vec::new();
        write_grid_function(&mut buf, &z).unwrap();
        let back = read_grid_function(buf.as_slice()).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "# period=2 size=16\n-1 0\n-0.875 oops\n";
        match read_grid_function(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match read_grid_function("period=2 size=16\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match read_grid_function("# period=3 size=16\n".as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("power of two"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn accepts_commas_and_rejects_short_files() {
        let mut text = String::from("# period=2 size=16\n");
        let g = TorusGrid::new(2.0, 16).unwrap();
        for i in 0..16 {
            text.push_str(&format!("{}, 1.5\n", g.x(i)));
        }
        let f = read_grid_function(text.as_bytes()).unwrap();
        assert!(f.samples().iter().all(|z| z.re == 1.5));
        let short: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            read_grid_function(short.as_bytes()),
            Err(Error::Parse { .. })
        ));
    }
}
