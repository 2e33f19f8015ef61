//! JSON report types for the CLI. Reports are byte-deterministic for a
//! fixed (space, seed, tol): struct field order is fixed and every float
//! is serialized with 17 significant digits through a raw JSON number.

use serde::{Serialize, Serializer};

pub const SCHEMA: &str = "hssnt-report/1";

/// f64 wrapper serializing as a raw JSON number with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text = if self.0.is_finite() {
            format!("{:.16e}", self.0)
        } else if self.0.is_nan() {
            "\"nan\"".to_string()
        } else if self.0 > 0.0 {
            "\"inf\"".to_string()
        } else {
            "\"-inf\"".to_string()
        };
        let raw = serde_json::value::RawValue::from_string(text).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DescribeReport {
    pub schema: &'static str,
    pub space: String,
    pub family: String,
    pub rank: usize,
    #[serde(rename = "type")]
    pub sys_type: String,
    pub dim_g: usize,
    pub dim_k: usize,
    pub dim_p: usize,
    #[serde(rename = "C")]
    pub c_const: Sig17,
    pub multiplicities: Multiplicities,
    pub gamma_labels: Vec<String>,
    pub positive_roots: Vec<RootLine>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Multiplicities {
    pub long: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub medium: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub short: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootLine {
    pub label: String,
    pub mult: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealizeReport {
    pub schema: &'static str,
    pub space: String,
    pub eta: String,
    pub input: PointRepr,
    pub spectral: SpectralRepr,
    pub output: PointRepr,
    pub in_domain: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRepr {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_coeffs: Option<Vec<Sig17>>,
    pub p_coeffs: Vec<Sig17>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralRepr {
    pub values: Vec<Sig17>,
    pub tripotents: Vec<Vec<Sig17>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub max_residual: Sig17,
    pub tol: Sig17,
    pub pass: bool,
}

impl From<&crate::geomverify::VerifyReport> for CheckLine {
    fn from(r: &crate::geomverify::VerifyReport) -> Self {
        CheckLine {
            name: r.name.clone(),
            max_residual: Sig17(r.max_residual),
            tol: Sig17(r.tol),
            pass: r.pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub suite: String,
    pub space: String,
    pub seed: u64,
    pub checks: Vec<CheckLine>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, space: &str, seed: u64, checks: Vec<CheckLine>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        SuiteReport {
            schema: SCHEMA,
            suite: suite.into(),
            space: space.into(),
            seed,
            checks,
            pass,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}
