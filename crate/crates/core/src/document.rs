//! JSON documents exchanged by the command-line tool: problem files,
//! solution files, and the reports. Floats are written with 17 significant
//! digits.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result, Violation};
use crate::fourier::{analyze, SampledSignal};
use crate::model::{validate_system, DelaySystem, FourierCoefficients, RawSystem};
use crate::scalar::{CVector, C};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cpx {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Cpx> for C<f64> {
    fn from(z: Cpx) -> Self {
        C::new(z.re, z.im)
    }
}

impl From<C<f64>> for Cpx {
    fn from(z: C<f64>) -> Self {
        Cpx { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub k: i64,
    pub v: Vec<Cpx>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Forcing {
    Modes { modes: Vec<ModeEntry> },
    Samples { count: usize, values: Vec<Vec<Cpx>> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleOptions {
    pub periods: Option<usize>,
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub truncation: Option<usize>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub quad_panels: Option<usize>,
    pub trials: Option<usize>,
    pub oracle: Option<OracleOptions>,
}

/// Problem file: `dim`, row-major `A` and `B` (arrays of rows of `{re, im}`),
/// `delays`, `forcing`, and optional `options`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Cpx>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Cpx>>,
    pub delays: Vec<f64>,
    pub forcing: Forcing,
    #[serde(default)]
    pub options: Options,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub system: DelaySystem<f64>,
    pub forcing: FourierCoefficients<f64>,
    pub options: Options,
}

fn rows(m: &[Vec<Cpx>]) -> Vec<Vec<C<f64>>> {
    m.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect()
}

fn vector(v: &[Cpx]) -> CVector<f64> {
    CVector::from_iterator(v.len(), v.iter().map(|&z| z.into()))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("problem file: {e}")))
    }

    fn forcing_dim(&self) -> Option<usize> {
        let lens: Vec<usize> = match &self.forcing {
            Forcing::Modes { modes } => modes.iter().map(|m| m.v.len()).collect(),
            Forcing::Samples { values, .. } => values.iter().map(Vec::len).collect(),
        };
        lens.iter().copied().find(|&l| l != self.dim).or(lens.first().copied())
    }

    /// Validates into a system plus forcing coefficients. Sampled forcing is
    /// projected onto `|k| ≤ options.truncation` (default: the full band
    /// `(M − 1)/2`).
    pub fn into_problem(self) -> Result<Problem> {
        let raw = RawSystem {
            dim: self.dim,
            a: rows(&self.a),
            b: rows(&self.b),
            delays: self.delays.clone(),
            forcing_dim: self.forcing_dim(),
        };
        let system = validate_system(&raw)?;
        let forcing = match &self.forcing {
            Forcing::Modes { modes } => {
                FourierCoefficients::from_modes(self.dim, modes.iter().map(|m| (m.k, vector(&m.v))))?
            }
            Forcing::Samples { count, values } => {
                if *count != values.len() {
                    return Err(Error::Invalid(vec![Violation::DimensionMismatch {
                        what: "forcing sample count".into(),
                        expected: *count,
                        found: values.len(),
                    }]));
                }
                let signal = SampledSignal::new(self.dim, values.iter().map(|v| vector(v)).collect())?;
                let band = self.options.truncation.unwrap_or((count.max(&1) - 1) / 2);
                analyze(&signal, band)?
            }
        };
        Ok(Problem {
            system,
            forcing,
            options: self.options,
        })
    }
}

/// Solution file written by `solve` and read by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub dim: usize,
    pub truncation: usize,
    pub coefficients: Vec<ModeEntry>,
    pub residual_sup: f64,
    pub forcing_ref: String,
    #[serde(default)]
    pub obstructed_modes: Vec<i64>,
}

impl SolutionFile {
    pub fn from_coeffs(
        coeffs: &FourierCoefficients<f64>,
        truncation: usize,
        residual_sup: f64,
        forcing_ref: &str,
        obstructed_modes: Vec<i64>,
    ) -> Self {
        Self {
            dim: coeffs.dim(),
            truncation,
            coefficients: mode_entries(coeffs),
            residual_sup,
            forcing_ref: forcing_ref.to_string(),
            obstructed_modes,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("solution file: {e}")))
    }

    pub fn coeffs(&self) -> Result<FourierCoefficients<f64>> {
        FourierCoefficients::from_modes(self.dim, self.coefficients.iter().map(|m| (m.k, vector(&m.v))))
    }
}

pub fn mode_entries(coeffs: &FourierCoefficients<f64>) -> Vec<ModeEntry> {
    coeffs
        .iter()
        .map(|(k, v)| ModeEntry {
            k,
            v: v.iter().map(|&z| z.into()).collect(),
        })
        .collect()
}

/// Pretty JSON with every float printed as `{:.16e}` (17 significant digits).
pub struct Digits17<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for Digits17<'_> {
    fn default() -> Self {
        Self {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes any document with [`Digits17`], newline-terminated.
pub fn to_text<S: Serialize>(doc: &S) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17::default());
    doc.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}
