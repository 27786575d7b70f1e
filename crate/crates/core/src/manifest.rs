//! Run manifest: which file plays which data role, explicit unit multipliers
//! and scenario settings. Relative paths resolve against the manifest's
//! directory.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {reason}")]
    Unreadable { path: PathBuf, reason: String },
    #[error("invalid manifest: {0}")]
    Invalid(String),
    #[error("manifest has no entry for required role `{0}`")]
    MissingRole(&'static str),
    #[error("role `{role}` points at {path}, which does not exist")]
    MissingFile { role: &'static str, path: PathBuf },
    #[error("cannot read {path} for role `{role}`: {reason}")]
    Io {
        role: &'static str,
        path: PathBuf,
        reason: String,
    },
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub benchmark: BenchmarkSection,
    #[serde(default)]
    pub capital: CapitalSection,
    #[serde(default)]
    pub units: UnitsSection,
    #[serde(default)]
    pub labor: LaborSection,
    #[serde(default)]
    pub wages: WagesSection,
    #[serde(default)]
    pub shares: SharesSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub proxies: ProxiesSection,
    #[serde(default)]
    pub scaling: ScalingSection,
    #[serde(skip)]
    pub root: PathBuf,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSection {
    pub dump: Option<PathBuf>,
    pub orientation: Option<PathBuf>,
    #[serde(default = "yes")]
    pub drop_duplicate_entry_ids: bool,
    #[serde(default)]
    pub strict_formula: bool,
    #[serde(default = "default_lookback")]
    pub lookback_days: u64,
    /// Dates to annotate on the index figure; empty picks the largest increments.
    #[serde(default)]
    pub annotation_dates: Vec<String>,
    #[serde(default = "default_annotations")]
    pub annotation_count: usize,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        Self {
            dump: None,
            orientation: None,
            drop_duplicate_entry_ids: true,
            strict_formula: false,
            lookback_days: default_lookback(),
            annotation_dates: Vec::new(),
            annotation_count: default_annotations(),
        }
    }
}

fn yes() -> bool {
    true
}

fn default_lookback() -> u64 {
    365
}

fn default_annotations() -> usize {
    10
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CapitalSection {
    pub investment: Option<PathBuf>,
    pub net_stock: Option<PathBuf>,
    pub gdp_deflator: Option<PathBuf>,
    pub prices: Option<PathBuf>,
    /// Price level of the hardware price table.
    #[serde(default = "default_base_year")]
    pub price_base_year: i32,
    /// Price level all real series are expressed in.
    #[serde(default = "default_base_year")]
    pub base_year: i32,
    #[serde(default)]
    pub seed: SeedChoice,
    #[serde(default)]
    pub extrapolation: ExtrapolationChoice,
}

impl Default for CapitalSection {
    fn default() -> Self {
        Self {
            investment: None,
            net_stock: None,
            gdp_deflator: None,
            prices: None,
            price_base_year: default_base_year(),
            base_year: default_base_year(),
            seed: SeedChoice::default(),
            extrapolation: ExtrapolationChoice::default(),
        }
    }
}

fn default_base_year() -> i32 {
    2017
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SeedChoice {
    #[default]
    NetStock,
    SteadyState,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ExtrapolationChoice {
    #[default]
    HoldFlat,
    LogLinear,
}

/// Multipliers converting file units to base units. None are inferred.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UnitsSection {
    pub investment_usd_per_unit: f64,
    pub net_stock_usd_per_unit: f64,
    /// FLOP/sec bought by one price unit, e.g. 1e9 for prices per GFLOP/sec.
    pub flops_per_price_unit: f64,
    /// FLOP/sec per reported capital unit, e.g. 1e15 for PFLOP/sec.
    pub capital_report_flops_per_unit: f64,
}

impl Default for UnitsSection {
    fn default() -> Self {
        Self {
            investment_usd_per_unit: 1.0,
            net_stock_usd_per_unit: 1.0,
            flops_per_price_unit: 1.0,
            capital_report_flops_per_unit: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LaborSection {
    pub cs: Option<PathBuf>,
    pub aggregate: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WagesSection {
    pub cs: Option<PathBuf>,
    pub aggregate: Option<PathBuf>,
    pub cpi: Option<PathBuf>,
    #[serde(default = "default_base_year")]
    pub base_year: i32,
}

impl Default for WagesSection {
    fn default() -> Self {
        Self {
            cs: None,
            aggregate: None,
            cpi: None,
            base_year: default_base_year(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SharesSection {
    /// CSV with `industry, compensation, value_added` rows.
    pub file: Option<PathBuf>,
    /// Row whose share drives the fits.
    #[serde(default = "default_industry", rename = "use")]
    pub use_industry: String,
    pub alpha_override: Option<f64>,
}

impl Default for SharesSection {
    fn default() -> Self {
        Self {
            file: None,
            use_industry: default_industry(),
            alpha_override: None,
        }
    }
}

fn default_industry() -> String {
    "rnd".into()
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default = "one")]
    pub phi_ai: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self { phi_ai: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProxiesSection {
    pub papers: Option<PathBuf>,
    pub patents: Option<PathBuf>,
    pub asota: Option<PathBuf>,
    pub lm: Option<PathBuf>,
    pub ic: Option<PathBuf>,
    pub elo: Option<PathBuf>,
    #[serde(default = "default_lm_map")]
    pub lm_map: String,
    #[serde(default = "default_ic_map")]
    pub ic_map: String,
    #[serde(default = "default_reference")]
    pub reference: String,
}

impl Default for ProxiesSection {
    fn default() -> Self {
        Self {
            papers: None,
            patents: None,
            asota: None,
            lm: None,
            ic: None,
            elo: None,
            lm_map: default_lm_map(),
            ic_map: default_ic_map(),
            reference: default_reference(),
        }
    }
}

fn default_lm_map() -> String {
    "reciprocal".into()
}

fn default_ic_map() -> String {
    "identity".into()
}

fn default_reference() -> String {
    "papers".into()
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    /// CSV `D, P, L`.
    pub joint: Option<PathBuf>,
    /// CSV `C, Y`.
    pub power: Option<PathBuf>,
    #[serde(default = "default_pass_factor")]
    pub pass_factor: f64,
    #[serde(default)]
    pub allocation_compute: Vec<f64>,
    #[serde(default = "default_tolerance")]
    pub exponent_tolerance: f64,
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self {
            joint: None,
            power: None,
            pass_factor: default_pass_factor(),
            allocation_compute: Vec::new(),
            exponent_tolerance: default_tolerance(),
        }
    }
}

fn default_pass_factor() -> f64 {
    6.0
}

fn default_tolerance() -> f64 {
    crate::scaling::EXPONENT_TOLERANCE
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = fs::read_to_string(path).map_err(|e| ManifestError::Unreadable {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, root)
    }

    pub fn parse(text: &str, root: PathBuf) -> Result<Self, ManifestError> {
        let mut m: Manifest = toml::from_str(text).map_err(|e| ManifestError::Invalid(e.to_string()))?;
        m.root = root;
        Ok(m)
    }

    fn role_path(&self, role: &'static str) -> Option<&PathBuf> {
        match role {
            roles::DUMP => self.benchmark.dump.as_ref(),
            roles::ORIENTATION => self.benchmark.orientation.as_ref(),
            roles::INVESTMENT => self.capital.investment.as_ref(),
            roles::NET_STOCK => self.capital.net_stock.as_ref(),
            roles::GDP_DEFLATOR => self.capital.gdp_deflator.as_ref(),
            roles::PRICES => self.capital.prices.as_ref(),
            roles::LABOR_CS => self.labor.cs.as_ref(),
            roles::LABOR_AGG => self.labor.aggregate.as_ref(),
            roles::WAGES_CS => self.wages.cs.as_ref(),
            roles::WAGES_AGG => self.wages.aggregate.as_ref(),
            roles::CPI => self.wages.cpi.as_ref(),
            roles::SHARES => self.shares.file.as_ref(),
            roles::PAPERS => self.proxies.papers.as_ref(),
            roles::PATENTS => self.proxies.patents.as_ref(),
            roles::ASOTA => self.proxies.asota.as_ref(),
            roles::LM => self.proxies.lm.as_ref(),
            roles::IC => self.proxies.ic.as_ref(),
            roles::ELO => self.proxies.elo.as_ref(),
            roles::SCALING_JOINT => self.scaling.joint.as_ref(),
            roles::SCALING_POWER => self.scaling.power.as_ref(),
            _ => None,
        }
    }

    pub fn has_role(&self, role: &'static str) -> bool {
        self.role_path(role).is_some()
    }

    pub fn resolve(&self, role: &'static str) -> Result<PathBuf, ManifestError> {
        let rel = self.role_path(role).ok_or(ManifestError::MissingRole(role))?;
        let path = if rel.is_absolute() {
            rel.clone()
        } else {
            self.root.join(rel)
        };
        if !path.exists() {
            return Err(ManifestError::MissingFile { role, path });
        }
        Ok(path)
    }
}

/// Data role names used in manifests and error messages.
pub mod roles {
    pub const DUMP: &str = "benchmark.dump";
    pub const ORIENTATION: &str = "benchmark.orientation";
    pub const INVESTMENT: &str = "capital.investment";
    pub const NET_STOCK: &str = "capital.net_stock";
    pub const GDP_DEFLATOR: &str = "capital.gdp_deflator";
    pub const PRICES: &str = "capital.prices";
    pub const LABOR_CS: &str = "labor.cs";
    pub const LABOR_AGG: &str = "labor.aggregate";
    pub const WAGES_CS: &str = "wages.cs";
    pub const WAGES_AGG: &str = "wages.aggregate";
    pub const CPI: &str = "wages.cpi";
    pub const SHARES: &str = "shares.file";
    pub const PAPERS: &str = "proxies.papers";
    pub const PATENTS: &str = "proxies.patents";
    pub const ASOTA: &str = "proxies.asota";
    pub const LM: &str = "proxies.lm";
    pub const IC: &str = "proxies.ic";
    pub const ELO: &str = "proxies.elo";
    pub const SCALING_JOINT: &str = "scaling.joint";
    pub const SCALING_POWER: &str = "scaling.power";
}

/// Reads role files and records which roles were touched.
#[derive(Debug)]
pub struct Sources<'a> {
    manifest: &'a Manifest,
    accessed: RefCell<BTreeSet<&'static str>>,
}

impl<'a> Sources<'a> {
    pub fn new(manifest: &'a Manifest) -> Self {
        Self {
            manifest,
            accessed: RefCell::new(BTreeSet::new()),
        }
    }

    pub fn manifest(&self) -> &Manifest {
        self.manifest
    }

    pub fn read(&self, role: &'static str) -> Result<Vec<u8>, ManifestError> {
        let path = self.manifest.resolve(role)?;
        self.accessed.borrow_mut().insert(role);
        fs::read(&path).map_err(|e| ManifestError::Io {
            role,
            path,
            reason: e.to_string(),
        })
    }

    pub fn accessed(&self) -> Vec<&'static str> {
        self.accessed.borrow().iter().copied().collect()
    }
}
