//! Pipeline orchestration: runs a command against a manifest and collects
//! CSV tables and SVG figures into a bundle with a checksum index.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::factors::{
    self, build_capital, effective_compute_stock, labor_series, wage_premium, CapitalAccounts, CapitalInputs,
    CapitalSeed, Extrapolation, FactorError, PriceSeries, ScenarioConfig,
};
use crate::index::{
    self, annotate, compute_indices, finalize_asota, AsotaSeries, BestMode, IndexError, IndexOptions, IndexSet, Variant,
};
use crate::ingest::{
    parse_records, validate_corpus, write_rejections, BenchmarkCorpus, IngestError, IngestOptions, OrientationTable,
};
use crate::manifest::{roles, ExtrapolationChoice, ManifestError, SeedChoice, Sources};
use crate::production::{
    align_series, doubling_time, factor_share_alpha, fit_mean_log_a, log_factor, predict_output, to_log_output,
    CobbDouglasFit, FactorShares, LogTransform, OutputProxy, ProductionError, ProxyId, ShareSource, UnitMap,
};
use crate::scaling::{
    effective_alpha, fit_joint_loss, fit_power_law, optimal_allocation, training_compute, JointFitOptions,
    JointLossFit, ScalingError, ScalingFit,
};
use crate::series::{common_years, AnnualSeries, SeriesError, Units};
use crate::svg::{self, emit_figure, AxisSpec, FigureError, Layout, Scale, SeriesSpec, XKind};

pub const CHECKSUM_FILE: &str = "checksums.sha256";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ingest,
    Index,
    Inputs,
    Fit,
    Scaling,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Manifest,
    Data,
    Numeric,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Manifest => 2,
            ErrorClass::Data => 3,
            ErrorClass::Numeric => 4,
        }
    }
}

#[derive(Debug, Error)]
#[error("{module}: {message}")]
pub struct ReportError {
    pub module: &'static str,
    pub class: ErrorClass,
    pub message: String,
}

impl ReportError {
    fn new(module: &'static str, class: ErrorClass, message: impl ToString) -> Self {
        Self {
            module,
            class,
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class.exit_code()
    }
}

impl From<ManifestError> for ReportError {
    fn from(e: ManifestError) -> Self {
        Self::new("manifest", ErrorClass::Manifest, e)
    }
}

impl From<IngestError> for ReportError {
    fn from(e: IngestError) -> Self {
        Self::new("ingest", ErrorClass::Data, e)
    }
}

impl From<IndexError> for ReportError {
    fn from(e: IndexError) -> Self {
        Self::new("index", ErrorClass::Numeric, e)
    }
}

impl From<SeriesError> for ReportError {
    fn from(e: SeriesError) -> Self {
        Self::new("series", ErrorClass::Data, e)
    }
}

impl From<FactorError> for ReportError {
    fn from(e: FactorError) -> Self {
        let class = match e {
            FactorError::DepreciationDenominator { .. } | FactorError::DeltaOutOfRange { .. } => ErrorClass::Numeric,
            FactorError::PhiOutOfRange(_) => ErrorClass::Manifest,
            _ => ErrorClass::Data,
        };
        Self::new("factors", class, e)
    }
}

impl From<ProductionError> for ReportError {
    fn from(e: ProductionError) -> Self {
        let class = match e {
            ProductionError::ZeroVariance | ProductionError::NoGrowth | ProductionError::BadDoublingTime(_) => {
                ErrorClass::Numeric
            }
            ProductionError::MissingReference(_) | ProductionError::UnknownProxy(_) => ErrorClass::Manifest,
            _ => ErrorClass::Data,
        };
        Self::new("production", class, e)
    }
}

impl From<ScalingError> for ReportError {
    fn from(e: ScalingError) -> Self {
        let class = match e {
            ScalingError::InvalidFit(_) | ScalingError::ExponentMismatch { .. } => ErrorClass::Numeric,
            _ => ErrorClass::Data,
        };
        Self::new("scaling", class, e)
    }
}

impl From<FigureError> for ReportError {
    fn from(e: FigureError) -> Self {
        Self::new("svg", ErrorClass::Numeric, e)
    }
}

fn manifest_error(message: impl ToString) -> ReportError {
    ReportError::new("manifest", ErrorClass::Manifest, message)
}

/// Command-line overrides layered over the manifest.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub strict_formula: bool,
    pub phi_ai: Option<f64>,
}

/// Emitted files keyed by name; the checksum index is derived on demand.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReportBundle {
    files: BTreeMap<String, Vec<u8>>,
}

impl ReportBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.insert(name.into(), bytes.into());
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.get(name).map(Vec::as_slice)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn count_with_extension(&self, ext: &str) -> usize {
        self.files.keys().filter(|n| n.ends_with(ext)).count()
    }

    /// `sha256  name` lines, one per file, in name order.
    pub fn checksum_index(&self) -> String {
        let mut out = String::new();
        for (name, bytes) in &self.files {
            let digest = Sha256::digest(bytes);
            for b in digest.iter() {
                let _ = write!(out, "{b:02x}");
            }
            let _ = writeln!(out, "  {name}");
        }
        out
    }

    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            fs::write(dir.join(name), bytes)?;
        }
        fs::write(dir.join(CHECKSUM_FILE), self.checksum_index())
    }
}

/// Runs `command`, appending outputs to `bundle` as each stage completes.
/// Files from stages that finished before an error stay in the bundle.
pub fn run(
    command: Command,
    sources: &Sources,
    opts: &RunOptions,
    bundle: &mut ReportBundle,
) -> Result<(), ReportError> {
    match command {
        Command::Ingest => {
            let corpus = load_corpus(sources)?;
            emit_ingest(&corpus, bundle)?;
        }
        Command::Index => {
            let corpus = load_corpus(sources)?;
            emit_index(&corpus, sources, opts, bundle)?;
        }
        Command::Inputs => {
            let inputs = load_inputs(sources, opts)?;
            emit_inputs(&inputs, sources, bundle)?;
        }
        Command::Fit => {
            let inputs = load_inputs(sources, opts)?;
            emit_fit(&inputs, None, sources, bundle)?;
        }
        Command::Scaling => emit_scaling(sources, bundle)?,
        Command::All => {
            let corpus = load_corpus(sources)?;
            emit_ingest(&corpus, bundle)?;
            let asota = emit_index(&corpus, sources, opts, bundle)?;
            let inputs = load_inputs(sources, opts)?;
            emit_inputs(&inputs, sources, bundle)?;
            emit_fit(&inputs, Some(asota.annual()), sources, bundle)?;
        }
    }
    Ok(())
}

fn load_corpus(sources: &Sources) -> Result<BenchmarkCorpus, ReportError> {
    let table = OrientationTable::read_csv(&sources.read(roles::ORIENTATION)?[..])?;
    let dump = sources.read(roles::DUMP)?;
    let opts = IngestOptions {
        drop_duplicate_entry_ids: sources.manifest().benchmark.drop_duplicate_entry_ids,
    };
    Ok(parse_records(&dump[..], &table, opts)?)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(&row).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

fn opt_date(d: Option<NaiveDate>) -> String {
    d.map(|d| d.to_string()).unwrap_or_default()
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn emit_ingest(corpus: &BenchmarkCorpus, bundle: &mut ReportBundle) -> Result<(), ReportError> {
    let mut rejections = Vec::new();
    write_rejections(&corpus.rejections, &mut rejections)?;
    bundle.insert("ingest_rejections.csv", rejections);

    let v = validate_corpus(corpus);
    let mut rows = vec![
        ("total_combos", v.counts.total_combos.to_string()),
        ("combos_with_entries", v.counts.combos_with_entries.to_string()),
        ("combos_with_10_plus", v.counts.combos_with_10_plus.to_string()),
    ];
    for b in &v.buckets {
        rows.push((b.label, b.combos.to_string()));
    }
    rows.extend([
        ("first_date", opt_date(v.date_range.map(|r| r.0))),
        ("last_date", opt_date(v.date_range.map(|r| r.1))),
        ("duplicate_triples", v.duplicate_triples.to_string()),
        ("first_improvement", opt_date(v.first_improvement)),
        ("fifty_combos_reached", opt_date(v.fifty_combos_reached)),
        ("rejected_lines", v.rejected_lines.to_string()),
    ]);
    let bucket_labels: BTreeSet<&str> = v.buckets.iter().map(|b| b.label).collect();
    bundle.insert(
        "ingest_validation.csv",
        csv_bytes(
            &["metric", "value"],
            rows.into_iter().map(|(k, val)| {
                let key = if bucket_labels.contains(k) {
                    format!("entries_{k}")
                } else {
                    k.to_string()
                };
                vec![key, val]
            }),
        ),
    );
    Ok(())
}

/// Calendar date as a fractional year for plotting.
fn year_fraction(d: NaiveDate) -> f64 {
    let days = if NaiveDate::from_ymd_opt(d.year(), 2, 29).is_some() {
        366.0
    } else {
        365.0
    };
    d.year() as f64 + f64::from(d.ordinal0()) / days
}

fn parse_dates(raw: &[String]) -> Result<Vec<NaiveDate>, ReportError> {
    raw.iter()
        .map(|s| {
            NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
                .map_err(|_| manifest_error(format!("benchmark.annotation_dates: `{s}` is not an ISO date")))
        })
        .collect()
}

fn emit_index(
    corpus: &BenchmarkCorpus,
    sources: &Sources,
    opts: &RunOptions,
    bundle: &mut ReportBundle,
) -> Result<AsotaSeries, ReportError> {
    let section = &sources.manifest().benchmark;
    let index_opts = IndexOptions {
        best_mode: if opts.strict_formula || section.strict_formula {
            BestMode::StrictFormula
        } else {
            BestMode::StateOfTheArt
        },
        lookback_days: section.lookback_days,
    };
    let dates = parse_dates(&section.annotation_dates)?;
    let set = compute_indices(corpus, index_opts)?;
    for v in Variant::ALL {
        let rows = set.get(v).iter().map(|(d, x)| vec![d.to_string(), x.to_string()]);
        bundle.insert(format!("index_{}.csv", v.slug()), csv_bytes(&["date", "value"], rows));
    }
    let asota = finalize_asota(set.get(Variant::Awr), set.get(Variant::N))?;
    bundle.insert(
        "asota.csv",
        csv_bytes(
            &["date", "asota"],
            asota.iter().map(|(d, x)| vec![d.to_string(), x.to_string()]),
        ),
    );
    let notes = annotate(&set, &dates, section.annotation_count);
    bundle.insert(
        "asota_annotations.csv",
        csv_bytes(
            &["date", "n_improvers", "example_combo"],
            notes.iter().map(|a| {
                vec![
                    a.date.to_string(),
                    a.n_improvers.to_string(),
                    a.example_combo.clone().unwrap_or_default(),
                ]
            }),
        ),
    );
    bundle.insert("fig2_asota.svg", index_figure(&set, &asota, &notes)?);
    Ok(asota)
}

fn index_figure(set: &IndexSet, asota: &AsotaSeries, notes: &[index::Annotation]) -> Result<String, FigureError> {
    let series = [
        SeriesSpec::line("ASOTA", asota.iter().map(|(d, x)| (year_fraction(d), x)).collect()),
        SeriesSpec::line(
            "number of metrics",
            set.get(Variant::N).iter().map(|(d, x)| (year_fraction(d), x)).collect(),
        )
        .on_right(),
    ];
    let mut layout = Layout::new(
        "Aggregate State of the Art in ML Index",
        "date",
        AxisSpec {
            label: "ln(index), standardized".into(),
            scale: Scale::Linear,
        },
    );
    layout.right = Some(AxisSpec {
        label: "task-dataset combinations".into(),
        scale: Scale::Linear,
    });
    layout.annotations = notes
        .iter()
        .enumerate()
        .map(|(k, a)| svg::Annotation {
            x: year_fraction(a.date),
            text: match &a.example_combo {
                Some(c) => format!("({k}) {}, including {c}", a.n_improvers),
                None => format!("({k}) {}", a.n_improvers),
            },
        })
        .collect();
    emit_figure(&series, &layout)
}

/// Factor inputs with scenario and unit multipliers applied.
struct FactorInputs {
    capital: CapitalAccounts,
    /// Capital stock devoted to AI work, FLOP/sec.
    effective_k: AnnualSeries,
    labor_cs_raw: AnnualSeries,
    labor_cs: AnnualSeries,
    labor_agg: Option<AnnualSeries>,
    wages: Option<factors::WagePremium>,
}

fn read_series(sources: &Sources, role: &'static str, units: Units) -> Result<AnnualSeries, ReportError> {
    let bytes = sources.read(role)?;
    AnnualSeries::read_csv(&bytes[..], units)
        .map_err(|e| ReportError::new("series", ErrorClass::Data, format!("{role}: {e}")))
}

fn load_inputs(sources: &Sources, opts: &RunOptions) -> Result<FactorInputs, ReportError> {
    let m = sources.manifest();
    let cap = &m.capital;
    let units = &m.units;
    for (name, v) in [
        ("investment_usd_per_unit", units.investment_usd_per_unit),
        ("net_stock_usd_per_unit", units.net_stock_usd_per_unit),
        ("flops_per_price_unit", units.flops_per_price_unit),
        ("capital_report_flops_per_unit", units.capital_report_flops_per_unit),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(manifest_error(format!("units.{name} must be positive, got {v}")));
        }
    }
    let scenario = ScenarioConfig::new(opts.phi_ai.unwrap_or(m.scenario.phi_ai))?;

    let investment = read_series(sources, roles::INVESTMENT, Units::UsdNominal)?.scale(units.investment_usd_per_unit);
    let net_stock = read_series(sources, roles::NET_STOCK, Units::UsdNominal)?.scale(units.net_stock_usd_per_unit);
    let deflator = read_series(sources, roles::GDP_DEFLATOR, Units::IndexPoints)?;
    let prices = PriceSeries::read_csv(&sources.read(roles::PRICES)?[..], cap.price_base_year)?
        .rebased(1.0 / units.flops_per_price_unit, cap.price_base_year)?;
    let capital = build_capital(&CapitalInputs {
        investment_nominal: investment,
        net_stock_nominal: net_stock,
        gdp_deflator: deflator,
        prices,
        base_year: cap.base_year,
        seed: match cap.seed {
            SeedChoice::NetStock => CapitalSeed::NetStock,
            SeedChoice::SteadyState => CapitalSeed::SteadyState,
        },
        extrapolation: match cap.extrapolation {
            ExtrapolationChoice::HoldFlat => Extrapolation::HoldFlat,
            ExtrapolationChoice::LogLinear => Extrapolation::LogLinear,
        },
    })?;
    let effective_k = effective_compute_stock(&capital.capital_flops, &scenario);

    let labor_cs_raw = read_series(sources, roles::LABOR_CS, Units::Persons)?;
    let labor_cs = labor_series(&labor_cs_raw)?;
    let labor_agg = if m.has_role(roles::LABOR_AGG) {
        Some(labor_series(&read_series(sources, roles::LABOR_AGG, Units::Persons)?)?)
    } else {
        None
    };
    let wages = if m.has_role(roles::WAGES_CS) {
        let w_cs = read_series(sources, roles::WAGES_CS, Units::UsdNominal)?;
        let w_agg = read_series(sources, roles::WAGES_AGG, Units::UsdNominal)?;
        let cpi = read_series(sources, roles::CPI, Units::IndexPoints)?;
        Some(wage_premium(&w_cs, &w_agg, &cpi, m.wages.base_year)?)
    } else {
        None
    };
    Ok(FactorInputs {
        capital,
        effective_k,
        labor_cs_raw,
        labor_cs,
        labor_agg,
        wages,
    })
}

fn points(s: &AnnualSeries, scale: f64) -> Vec<(f64, f64)> {
    s.iter().map(|(y, v)| (y as f64, v * scale)).collect()
}

fn emit_inputs(inputs: &FactorInputs, sources: &Sources, bundle: &mut ReportBundle) -> Result<(), ReportError> {
    let m = sources.manifest();
    let cap = &inputs.capital;
    let premium = inputs.wages.as_ref().map(|w| &w.premium);
    let mut years: BTreeSet<i32> = BTreeSet::new();
    years.extend(cap.capital_flops.years());
    years.extend(cap.investment_flops.years());
    years.extend(cap.delta.years());
    years.extend(inputs.labor_cs.years());
    if let Some(p) = premium {
        years.extend(p.years());
    }
    let rows = years.iter().map(|&y| {
        vec![
            y.to_string(),
            opt_num(inputs.effective_k.get(y)),
            opt_num(cap.investment_flops.get(y)),
            opt_num(cap.delta.get(y)),
            opt_num(inputs.labor_cs.get(y)),
            opt_num(premium.and_then(|p| p.get(y))),
        ]
    });
    bundle.insert(
        "factor_inputs.csv",
        csv_bytes(&["year", "K_flops", "I_flops", "delta", "L", "premium"], rows),
    );

    let pflops = 1.0 / m.units.capital_report_flops_per_unit;
    let price_unit = m.units.flops_per_price_unit;
    let log_axis = |label: &str| AxisSpec {
        label: label.into(),
        scale: Scale::Log10,
    };
    let base = m.capital.base_year;

    let fig1 = [
        SeriesSpec::line("K_FLOP/sec", points(&inputs.effective_k, pflops)),
        SeriesSpec::line("L_CS", points(&inputs.labor_cs, 1.0)),
        SeriesSpec::line("P_FLOP/sec", points(&cap.price, price_unit)),
    ];
    bundle.insert(
        "fig1_capital_labor_price.svg",
        emit_figure(
            &fig1,
            &Layout::new("Capital, labor and the price of compute", "year", log_axis("level")),
        )?,
    );

    let invest_display = cap.investment_real.scale(1.0 / m.units.investment_usd_per_unit);
    let s1 = [
        SeriesSpec::line("K_FLOP/sec", points(&inputs.effective_k, pflops)),
        SeriesSpec::line("I", points(&invest_display, 1.0)),
        SeriesSpec::line("delta", points(&cap.delta, 1.0)).on_right(),
    ];
    let mut s1_layout = Layout::new(
        format!("Investment, capital and depreciation ({base} prices)"),
        "year",
        log_axis("level"),
    );
    s1_layout.right = Some(AxisSpec {
        label: "depreciation rate".into(),
        scale: Scale::Linear,
    });
    bundle.insert("figS1_investment_capital.svg", emit_figure(&s1, &s1_layout)?);

    let mut s2 = vec![SeriesSpec::line("L_CS", points(&inputs.labor_cs, 1.0))];
    if let Some(agg) = &inputs.labor_agg {
        s2.insert(0, SeriesSpec::line("L_agg", points(agg, 1.0)));
    }
    bundle.insert(
        "figS2_labor.svg",
        emit_figure(&s2, &Layout::new("Labor", "year", log_axis("persons")))?,
    );

    if let Some(w) = &inputs.wages {
        let s3 = [
            SeriesSpec::line("W_agg", points(&w.real_agg, 1.0)),
            SeriesSpec::line("W_CS", points(&w.real_cs, 1.0)),
        ];
        bundle.insert(
            "figS3_wages.svg",
            emit_figure(
                &s3,
                &Layout::new(
                    format!("Annual wages ({} prices)", m.wages.base_year),
                    "year",
                    log_axis("USD"),
                ),
            )?,
        );
    }
    Ok(())
}

fn load_alpha(sources: &Sources) -> Result<FactorShares, ReportError> {
    let section = &sources.manifest().shares;
    if let Some(alpha) = section.alpha_override {
        return Ok(FactorShares::new(alpha, ShareSource::Override)?);
    }
    let bytes = sources.read(roles::SHARES)?;
    let data_err = |msg: String| ReportError::new("production", ErrorClass::Data, format!("{}: {msg}", roles::SHARES));
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(&bytes[..]);
    for rec in rdr.records() {
        let rec = rec.map_err(|e| data_err(e.to_string()))?;
        if rec.len() < 3 {
            return Err(data_err("expected `industry, compensation, value_added`".into()));
        }
        if rec[0].eq_ignore_ascii_case(&section.use_industry) {
            let num = |i: usize| {
                rec[i]
                    .parse::<f64>()
                    .map_err(|_| data_err(format!("bad number `{}`", &rec[i])))
            };
            return Ok(factor_share_alpha(num(1)?, num(2)?)?);
        }
    }
    Err(data_err(format!("no row for industry `{}`", section.use_industry)))
}

fn proxy_role(id: ProxyId) -> &'static str {
    match id {
        ProxyId::Papers => roles::PAPERS,
        ProxyId::Patents => roles::PATENTS,
        ProxyId::Asota => roles::ASOTA,
        ProxyId::Lm => roles::LM,
        ProxyId::Ic => roles::IC,
        ProxyId::Elo => roles::ELO,
    }
}

fn unit_map(key: &str, raw: &str) -> Result<UnitMap, ReportError> {
    UnitMap::from_str(raw).map_err(|e| manifest_error(format!("proxies.{key}: {e}")))
}

/// Log-linear trend doubling time; `None` when the series does not grow.
fn trend_doubling(s: &AnnualSeries) -> Option<f64> {
    let pts: Vec<(f64, f64)> = s
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|(y, v)| (y as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope > 0.0).then(|| std::f64::consts::LN_2 / slope)
}

fn emit_fit(
    inputs: &FactorInputs,
    computed_asota: Option<AnnualSeries>,
    sources: &Sources,
    bundle: &mut ReportBundle,
) -> Result<(), ReportError> {
    let m = sources.manifest();
    let shares = load_alpha(sources)?;
    let alpha = shares.alpha();
    let reference = ProxyId::from_str(&m.proxies.reference)?;
    let lm_map = unit_map("lm_map", &m.proxies.lm_map)?;
    let ic_map = unit_map("ic_map", &m.proxies.ic_map)?;

    let log_k = log_factor(&inputs.effective_k, "K")?;
    let log_l = log_factor(&inputs.labor_cs_raw, "L")?;
    let mut fits: BTreeMap<ProxyId, CobbDouglasFit> = BTreeMap::new();
    for id in ProxyId::ALL {
        let observations = match (id, &computed_asota) {
            (ProxyId::Asota, Some(a)) => a.clone(),
            _ if m.has_role(proxy_role(id)) => read_series(sources, proxy_role(id), Units::Count)?,
            _ => continue,
        };
        let transform = match id {
            ProxyId::Lm => LogTransform::BoundedUnitThenLog(lm_map),
            ProxyId::Ic => LogTransform::BoundedUnitThenLog(ic_map),
            other => other.default_transform(),
        };
        let log_y = to_log_output(&OutputProxy {
            id,
            transform,
            observations,
        })?;
        let fit = fit_mean_log_a(&log_y, &log_k, &log_l, alpha).map_err(|e| {
            let err = ReportError::from(e);
            ReportError {
                message: format!("{id}: {}", err.message),
                ..err
            }
        })?;
        fits.insert(id, fit);
    }
    if !fits.contains_key(&reference) {
        return Err(ManifestError::MissingRole(proxy_role(reference)).into());
    }

    bundle.insert(
        "fit_summary.csv",
        csv_bytes(
            &["proxy", "alpha", "mean_logA", "r2", "n_obs"],
            fits.iter().map(|(id, f)| {
                vec![
                    id.slug().to_string(),
                    f.alpha.to_string(),
                    f.mean_log_a.to_string(),
                    f.r2.to_string(),
                    f.n_obs.to_string(),
                ]
            }),
        ),
    );

    let aligned = align_series(&fits, reference)?;
    let mut rows = Vec::new();
    for (id, a) in &aligned {
        for (year, obs) in a.observed_log10.iter() {
            rows.push(vec![
                id.slug().to_string(),
                year.to_string(),
                obs.to_string(),
                opt_num(a.model_log10.get(year)),
            ]);
        }
    }
    bundle.insert(
        "fig3_aligned.csv",
        csv_bytes(&["proxy", "year", "observed_log10", "model_log10"], rows),
    );

    let years = common_years(&[&inputs.effective_k, &inputs.labor_cs_raw]);
    let window =
        |s: &AnnualSeries| AnnualSeries::from_pairs(s.units(), years.iter().filter_map(|&y| s.get(y).map(|v| (y, v))));
    let k_window = window(&inputs.effective_k)?;
    let l_window = window(&inputs.labor_cs_raw)?;
    let k_d = trend_doubling(&k_window);
    let l_d = trend_doubling(&l_window);
    let y_d = doubling_time(alpha, k_d, l_d).ok();
    let start = years.first().map(|y| y.to_string()).unwrap_or_default();
    let end = years.last().map(|y| y.to_string()).unwrap_or_default();
    bundle.insert(
        "doubling_times.csv",
        csv_bytes(
            &["series", "start", "end", "doubling_years"],
            [("K", k_d), ("L", l_d), ("Y_model", y_d)]
                .into_iter()
                .map(|(name, d)| vec![name.to_string(), start.clone(), end.clone(), opt_num(d)]),
        ),
    );

    let ref_a = fits[&reference].mean_log_a;
    let model = predict_output(&inputs.effective_k, &inputs.labor_cs_raw, alpha, ref_a)?;
    let ln10 = std::f64::consts::LN_10;
    let mut series: Vec<SeriesSpec> = aligned
        .iter()
        .map(|(id, a)| SeriesSpec::markers(id.label(), points(&a.observed_log10, 1.0)))
        .collect();
    series.push(SeriesSpec::line("model", points(&model, 1.0 / ln10)));
    let layout = Layout::new(
        format!("Progress in AI/ML technologies (alpha = {alpha:.3})"),
        "year",
        AxisSpec {
            label: format!("log10, {} scale", reference.label()),
            scale: Scale::Linear,
        },
    );
    bundle.insert("fig3_progress.svg", emit_figure(&series, &layout)?);
    Ok(())
}

fn read_table(sources: &Sources, role: &'static str, width: usize) -> Result<Vec<Vec<f64>>, ReportError> {
    let bytes = sources.read(role)?;
    let data_err = |msg: String| ReportError::new("scaling", ErrorClass::Data, format!("{role}: {msg}"));
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(&bytes[..]);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| data_err(e.to_string()))?;
        if rec.len() < width {
            return Err(data_err(format!("expected {width} columns, got {}", rec.len())));
        }
        let row = (0..width)
            .map(|i| {
                rec[i]
                    .parse::<f64>()
                    .map_err(|_| data_err(format!("bad number `{}`", &rec[i])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn log_log_layout(title: &str, x: &str, y: &str) -> Layout {
    let mut layout = Layout::new(
        title,
        x,
        AxisSpec {
            label: y.into(),
            scale: Scale::Log10,
        },
    );
    layout.x_kind = XKind::Value;
    layout.x_scale = Scale::Log10;
    layout
}

type JointSamples = Vec<(f64, f64, f64)>;

fn emit_scaling(sources: &Sources, bundle: &mut ReportBundle) -> Result<(), ReportError> {
    let m = sources.manifest();
    let section = &m.scaling;
    if !m.has_role(roles::SCALING_JOINT) && !m.has_role(roles::SCALING_POWER) {
        return Err(ManifestError::MissingRole(roles::SCALING_JOINT).into());
    }
    let t = section.pass_factor;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut joint: Option<(JointLossFit, JointSamples)> = None;
    let mut power: Option<(ScalingFit, Vec<(f64, f64)>)> = None;

    if m.has_role(roles::SCALING_JOINT) {
        let samples: JointSamples = read_table(sources, roles::SCALING_JOINT, 3)?
            .into_iter()
            .map(|r| (r[0], r[1], r[2]))
            .collect();
        let fit = fit_joint_loss(&samples, &JointFitOptions::default())?;
        let eff = effective_alpha(&fit, section.exponent_tolerance).ok();
        for (name, v) in [
            ("l_min", Some(fit.l_min)),
            ("b", Some(fit.b)),
            ("beta", Some(fit.beta)),
            ("g", Some(fit.g)),
            ("gamma", Some(fit.gamma)),
            ("residual_norm", Some(fit.residual_norm)),
            ("iterations", Some(fit.iterations as f64)),
            ("effective_alpha", eff),
        ] {
            rows.push(vec!["joint".into(), name.into(), opt_num(v)]);
        }
        rows.push(vec!["joint".into(), "converged".into(), fit.converged.to_string()]);
        joint = Some((fit, samples));
    }
    if m.has_role(roles::SCALING_POWER) {
        let samples: Vec<(f64, f64)> = read_table(sources, roles::SCALING_POWER, 2)?
            .into_iter()
            .map(|r| (r[0], r[1]))
            .collect();
        let fit = fit_power_law(&samples)?;
        for (name, v) in [
            ("alpha_prime", fit.alpha_prime),
            ("prefactor", fit.prefactor),
            ("residual_norm", fit.residual_norm),
            ("n", fit.n as f64),
        ] {
            rows.push(vec!["power".into(), name.into(), v.to_string()]);
        }
        power = Some((fit, samples));
    }
    bundle.insert("scaling_summary.csv", csv_bytes(&["fit", "parameter", "value"], rows));

    if let Some((fit, samples)) = &joint {
        let mut alloc = Vec::new();
        for &c in &section.allocation_compute {
            let (d, p) = optimal_allocation(fit, c, t)?;
            alloc.push(vec![
                c.to_string(),
                t.to_string(),
                d.to_string(),
                p.to_string(),
                fit.loss(d, p).to_string(),
            ]);
        }
        bundle.insert(
            "scaling_allocation.csv",
            csv_bytes(&["C", "T", "D_opt", "P_opt", "loss"], alloc),
        );

        let data = samples
            .iter()
            .map(|&(d, p, l)| Ok((training_compute(d, p, t)?, l)))
            .collect::<Result<Vec<_>, ScalingError>>()?;
        let (lo, hi) = data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(c, _)| {
                (lo.min(c), hi.max(c))
            });
        let frontier = log_spaced(lo, hi, 50)
            .into_iter()
            .map(|c| {
                let (d, p) = optimal_allocation(fit, c, t)?;
                Ok((c, fit.loss(d, p)))
            })
            .collect::<Result<Vec<_>, ScalingError>>()?;
        let series = [
            SeriesSpec::markers("L (data)", data),
            SeriesSpec::line("L at compute-optimal D, P", frontier),
        ];
        bundle.insert(
            "scaling_joint.svg",
            emit_figure(&series, &log_log_layout("Joint loss fit", "training compute C", "loss"))?,
        );
    }
    if let Some((fit, samples)) = &power {
        let (lo, hi) = samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(c, _)| {
                (lo.min(c), hi.max(c))
            });
        let curve = log_spaced(lo, hi, 50)
            .into_iter()
            .map(|c| (c, fit.predict(c)))
            .collect();
        let series = [
            SeriesSpec::markers("Y (data)", samples.clone()),
            SeriesSpec::line(format!("fit, alpha' = {:.4}", fit.alpha_prime), curve),
        ];
        bundle.insert(
            "scaling_power.svg",
            emit_figure(&series, &log_log_layout("Power-law fit", "training compute C", "Y"))?,
        );
    }
    Ok(())
}
