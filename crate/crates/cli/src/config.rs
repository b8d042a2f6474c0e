//! Run configuration. Every section is optional at parse time; each
//! subcommand asks for the sections it needs and reports the missing key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toboggan::complexpath::Contour;
use toboggan::eigensolve::{Method, ScanWindow, ShootingConfig};
use toboggan::exact::{parse_rational, GaussRat};
use toboggan::xform::{Monomial, PotentialSpec};
use toboggan::Ratio;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contour: Option<ContourSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub susy: Option<SusySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asympt: Option<AsymptSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fig: Option<FigSection>,
}

/// `coeff * x^power`; `coeff` is a Gaussian rational such as `1`, `-3/4`, `i`
/// or `1/2+2i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSection {
    pub coeff: String,
    pub power: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub terms: Vec<TermSection>,
    #[serde(default = "zero_text")]
    pub ell: String,
    /// Rectify with `i x = (i y)^map` before solving.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContourKind {
    RealLine,
    ShiftedLine,
    Winding,
    Power,
    UShape,
}

/// The contour in the variable that is actually solved (`y` after rectifying).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourSection {
    pub kind: ContourKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Winding number for `winding`, exponent for `power`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "shooting")]
    pub method: Method,
    pub window: [f64; 2],
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_far: Option<f64>,
    /// Matrix grid size and half-width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_s_max: Option<f64>,
    /// Shift targets for the matrix method; defaults to the window midpoints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSection {
    pub winding: i64,
    #[serde(default = "default_m_max")]
    pub m_max: i64,
    /// Run the numerical continuation check with this `(kappa, s_far)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SusySection {
    #[serde(default = "gamma_min")]
    pub gamma_min: String,
    #[serde(default = "gamma_max")]
    pub gamma_max: String,
    /// Grid step is `1 / gamma_den`.
    #[serde(default = "gamma_den")]
    pub gamma_den: i64,
    #[serde(default = "linear_chi")]
    pub chi: Vec<TermSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_cut: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_tol: Option<f64>,
}

impl Default for SusySection {
    fn default() -> Self {
        Self {
            gamma_min: gamma_min(),
            gamma_max: gamma_max(),
            gamma_den: gamma_den(),
            chi: linear_chi(),
            epsilon: None,
            e_cut: None,
            match_tol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptSection {
    #[serde(default = "asympt_windings")]
    pub windings: Vec<u32>,
    #[serde(default = "asympt_taus")]
    pub taus: Vec<f64>,
    #[serde(default = "two")]
    pub levels: u32,
    #[serde(default = "default_steps_per_spacing")]
    pub steps_per_spacing: usize,
    /// `l` is rounded to a multiple of `1 / ell_den`.
    #[serde(default = "default_ell_den")]
    pub ell_den: i64,
}

impl Default for AsymptSection {
    fn default() -> Self {
        Self {
            windings: asympt_windings(),
            taus: asympt_taus(),
            levels: two(),
            steps_per_spacing: default_steps_per_spacing(),
            ell_den: default_ell_den(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    /// Pencil JSON; a random Dyson pencil is drawn when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windings: Option<Vec<u32>>,
    /// Source-frame `l` values, as rationals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ells: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
}

fn zero_text() -> String {
    "0".into()
}
fn shooting() -> Method {
    Method::Shooting
}
fn default_steps() -> usize {
    401
}
fn default_m_max() -> i64 {
    20
}
fn gamma_min() -> String {
    "-3".into()
}
fn gamma_max() -> String {
    "2".into()
}
fn gamma_den() -> i64 {
    20
}
fn linear_chi() -> Vec<TermSection> {
    vec![TermSection {
        coeff: "1".into(),
        power: 1,
    }]
}
fn asympt_windings() -> Vec<u32> {
    vec![0]
}
fn asympt_taus() -> Vec<f64> {
    vec![3.0, 4.5, 6.0]
}
fn two() -> u32 {
    2
}
fn default_steps_per_spacing() -> usize {
    20
}
fn default_ell_den() -> i64 {
    1000
}

impl RunConfig {
    /// Reads TOML, or JSON when the file ends in `.json`.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config("config", e.message()))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config("config", e))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn section<'a, T>(part: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        part.as_ref().ok_or_else(|| CliError::config(name, "section missing"))
    }
}

pub fn parse_gauss(text: &str, key: &str) -> Result<GaussRat, CliError> {
    text.parse().map_err(|e| CliError::config(key, e))
}

pub fn parse_ratio(text: &str, key: &str) -> Result<Ratio, CliError> {
    parse_rational(text).map_err(|e| CliError::config(key, e))
}

pub fn monomials(terms: &[TermSection], key: &str) -> Result<Vec<Monomial>, CliError> {
    terms
        .iter()
        .enumerate()
        .map(|(k, t)| {
            Ok(Monomial::new(
                parse_gauss(&t.coeff, &format!("{key}[{k}].coeff"))?,
                t.power,
            ))
        })
        .collect()
}

impl ProblemSection {
    pub fn potential(&self) -> Result<PotentialSpec, CliError> {
        let ell = GaussRat::real(parse_ratio(&self.ell, "problem.ell")?);
        PotentialSpec::new(monomials(&self.terms, "problem.terms")?, ell)
            .map_err(|e| CliError::config("problem.terms", e))
    }
}

impl ContourSection {
    pub fn build(&self) -> Result<Contour, CliError> {
        let eps = || {
            self.epsilon
                .ok_or_else(|| CliError::config("contour.epsilon", "required for this kind"))
        };
        let n = || {
            self.n
                .ok_or_else(|| CliError::config("contour.n", "required for this kind"))
        };
        let built = match self.kind {
            ContourKind::RealLine => Ok(Contour::RealLine),
            ContourKind::ShiftedLine => Contour::shifted_line(eps()?),
            ContourKind::Winding => Contour::winding(n()?, eps()?),
            ContourKind::Power => Contour::power(n()?, eps()?),
            ContourKind::UShape => Contour::u_shape(eps()?),
        };
        built.map_err(|e| CliError::config("contour", e))
    }
}

impl SolverSection {
    pub fn shooting(&self) -> Result<ShootingConfig, CliError> {
        let mut cfg = ShootingConfig::new(ScanWindow::new(self.window[0], self.window[1], self.steps));
        cfg.s_far = self.s_far;
        if let Some(t) = self.refine_tol {
            cfg.refine_tol = t;
        }
        if let Some(t) = self.rel_tol {
            cfg.integrator.rel_tol = t;
        }
        if let Some(t) = self.abs_tol {
            cfg.integrator.abs_tol = t;
        }
        if let Some(t) = self.scan_rel_tol {
            cfg.scan_rel_tol = t;
        }
        cfg.validate().map_err(|e| CliError::config("solver", e))?;
        Ok(cfg)
    }
}
