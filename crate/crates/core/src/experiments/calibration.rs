//! Stored calibration constants for the inequalities whose constants are
//! not explicit.
//!
//! The file is TOML followed by a final `sha256 = "<hex>"` line holding the
//! digest of every byte before it. Any edit that does not also update the
//! digest is rejected.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const CALIBRATION_VERSION: u32 = 1;

/// Stored bounds carry this factor of headroom over the measured values.
pub const HEADROOM: f64 = 1.5;

const DEFAULT_FILE: &str = include_str!("../../calibration/reference.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// `||f||_calB <= c_emb ||f||_inf`
    pub c_emb: f64,
    /// `||rho * g||_inf <= c_rho ||g||_calB`
    pub c_rho: f64,
    /// `||Dil_m f||_calB <= c_plus ||f||_calB`
    pub c_plus: f64,
    /// `||Dil_{-m} f||_calB <= c_minus (m + 1) ||f||_calB`
    pub c_minus: f64,
    /// `||P_j g_lambda||_inf <= bound * min(lambda/2^j, 2^j/lambda)`
    pub glambda_ratio_bound: f64,
    /// `lambda ||P_{<=0} g_lambda||_inf <= bound` for `lambda >= 4`
    pub glambda_low_bound: f64,
    /// `||K_r * h~_j||_1 <= bound * min(s, 1/s)` for the diamond kernel
    pub kernel_decay_ratio_bound: f64,
    /// lower bound for `min_{[-1,1]} M_sharp F_N / sqrt N`
    pub msharp_min_floor: f64,
    /// band for `||f_N||_B`
    pub fn_b_norm_low: f64,
    pub fn_b_norm_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub version: u32,
    /// Profile the constants were measured on.
    pub profile: String,
    pub grid: String,
    pub headroom: f64,
    pub constants: Constants,
}

/// Raw measured values, before headroom.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub c_emb: f64,
    pub c_rho: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub glambda_ratio: f64,
    pub glambda_low: f64,
    pub kernel_decay_ratio: f64,
    pub msharp_min: f64,
    pub fn_b_norm_min: f64,
    pub fn_b_norm_max: f64,
}

impl Calibration {
    pub fn from_measured(m: &Measured, profile: &str, grid: &str) -> Self {
        let h = HEADROOM;
        Calibration {
            version: CALIBRATION_VERSION,
            profile: profile.to_string(),
            grid: grid.to_string(),
            headroom: h,
            constants: Constants {
                c_emb: m.c_emb * h,
                c_rho: m.c_rho * h,
                c_plus: m.c_plus * h,
                c_minus: m.c_minus * h,
                glambda_ratio_bound: m.glambda_ratio * h,
                glambda_low_bound: m.glambda_low * h,
                kernel_decay_ratio_bound: m.kernel_decay_ratio * h,
                msharp_min_floor: m.msharp_min / h,
                fn_b_norm_low: m.fn_b_norm_min / h,
                fn_b_norm_high: m.fn_b_norm_max * h,
            },
        }
    }

    /// The fixture compiled into the library.
    pub fn embedded() -> Result<Self> {
        Self::parse(DEFAULT_FILE)
    }

    /// Read a fixture from disk, or the embedded one when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Self::embedded(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::Calibration(format!("cannot read {}: {e}", p.display()))
                })?;
                Self::parse(&text)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_end_matches('\n');
        let (body, last) = match trimmed.rfind('\n') {
            Some(i) => (&text[..=i], &trimmed[i + 1..]),
            None => return Err(Error::Calibration("missing checksum line".into())),
        };
        let stored = last
            .strip_prefix("sha256 = \"")
            .and_then(|s| s.strip_suffix('"'))
            .ok_or_else(|| Error::Calibration("last line must be sha256 = \"<hex>\"".into()))?;
        let actual = digest(body);
        if stored != actual {
            return Err(Error::Calibration(format!(
                "checksum mismatch (stored {stored}, content {actual}); the file was edited"
            )));
        }
        let cal: Calibration =
            toml::from_str(body).map_err(|e| Error::Calibration(e.to_string()))?;
        if cal.version != CALIBRATION_VERSION {
            return Err(Error::Calibration(format!(
                "version {} not supported (expected {CALIBRATION_VERSION})",
                cal.version
            )));
        }
        let c = &cal.constants;
        let all = [
            c.c_emb,
            c.c_rho,
            c.c_plus,
            c.c_minus,
            c.glambda_ratio_bound,
            c.glambda_low_bound,
            c.kernel_decay_ratio_bound,
            c.msharp_min_floor,
            c.fn_b_norm_low,
            c.fn_b_norm_high,
        ];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) || c.fn_b_norm_low > c.fn_b_norm_high {
            return Err(Error::Calibration("constants must be positive and finite".into()));
        }
        Ok(cal)
    }

    pub fn to_text(&self) -> Result<String> {
        let body = toml::to_string(self).map_err(|e| Error::Calibration(e.to_string()))?;
        let body = format!(
            "# Calibration fixtures: measured constants with x{} headroom.\n\
             # Regenerate with `lpmax verify --profile reference --write-calibration PATH`;\n\
             # hand edits are rejected by the checksum on the last line.\n{body}",
            self.headroom
        );
        let sum = digest(&body);
        Ok(format!("{body}sha256 = \"{sum}\"\n"))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()?)?;
        Ok(())
    }
}

fn digest(body: &str) -> String {
    Sha256::digest(body.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Calibration {
        Calibration::from_measured(
            &Measured {
                c_emb: 2.0,
                c_rho: 1.0,
                c_plus: 1.1,
                c_minus: 1.2,
                glambda_ratio: 3.0,
                glambda_low: 0.5,
                kernel_decay_ratio: 0.7,
                msharp_min: 0.57,
                fn_b_norm_min: 2.5,
                fn_b_norm_max: 3.2,
            },
            "reference",
            "16,1048576",
        )
    }

    #[test]
    fn round_trip_and_headroom() {
        let c = sample();
        assert_eq!(c.constants.c_emb, 3.0);
        assert!((c.constants.msharp_min_floor - 0.38).abs() < 1e-12);
        let text = c.to_text().unwrap();
        assert_eq!(Calibration::parse(&text).unwrap(), c);
    }

    #[test]
    fn tampering_is_detected() {
        let text = sample().to_text().unwrap();
        let edited = text.replacen("c_emb = 3.0", "c_emb = 30.0", 1);
        assert_ne!(edited, text);
        assert!(matches!(Calibration::parse(&edited), Err(Error::Calibration(_))));
        let truncated: String = text.lines().take(3).collect::<Vec<_>>().join("\n");
        assert!(Calibration::parse(&truncated).is_err());
    }

    #[test]
    fn embedded_fixture_is_valid() {
        let c = Calibration::embedded().unwrap();
        assert_eq!(c.profile, "reference");
    }
}
