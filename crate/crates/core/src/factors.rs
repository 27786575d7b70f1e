//! Capital and labor input series.
//!
//! Capital is a perpetual-inventory stock measured in FLOP/sec: real
//! investment in computing equipment is converted to FLOP/sec at the
//! prevailing hardware price and accumulated with an implicit depreciation
//! rate recovered from the historical-cost net stock. Labor is a headcount
//! interpolated log-linearly between survey years.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

use crate::series::{AnnualSeries, SeriesError, Units};

#[derive(Debug, Error, PartialEq)]
pub enum FactorError {
    #[error("price series needs at least two anchors, got {0}")]
    TooFewAnchors(usize),
    #[error("non-positive price {price} at {at}")]
    NonPositivePrice { at: f64, price: f64 },
    #[error("deflator has no value for year {0}")]
    MissingDeflatorYear(i32),
    #[error("{series} has no value for year {year}")]
    MissingYear { series: &'static str, year: i32 },
    #[error("non-positive deflator {value} at year {year}")]
    NonPositiveDeflator { year: i32, value: f64 },
    #[error("depreciation denominator {denominator} is not positive at year {year}")]
    DepreciationDenominator { year: i32, denominator: f64 },
    #[error("depreciation rate {delta} at year {year} outside [0, 1]")]
    DeltaOutOfRange { year: i32, delta: f64 },
    #[error("labor series needs at least two observations, got {0}")]
    TooFewObservations(usize),
    #[error("non-positive value {value} at year {year} cannot be interpolated in logs")]
    NonPositiveValue { year: i32, value: f64 },
    #[error("aggregate wage {value} at year {year} is not positive")]
    NonPositiveWage { year: i32, value: f64 },
    #[error("phi_ai = {0} outside (0, 1]")]
    PhiOutOfRange(f64),
    #[error("price csv line {line}: {reason}")]
    PriceParse { line: u64, reason: String },
    #[error("no common years between {0}")]
    NoOverlap(&'static str),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// What to do with query points outside the anchor hull.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Extrapolation {
    #[default]
    HoldFlat,
    /// Extend the log-linear trend of the two nearest anchors.
    LogLinear,
}

/// Sparse hardware prices, real USD per GFLOP/sec, interpolated log-linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    anchors: Vec<(f64, f64)>,
    base_year: i32,
}

impl PriceSeries {
    /// `anchors` are (fractional year, price) pairs; they are sorted here.
    pub fn new(mut anchors: Vec<(f64, f64)>, base_year: i32) -> Result<Self, FactorError> {
        if anchors.len() < 2 {
            return Err(FactorError::TooFewAnchors(anchors.len()));
        }
        if let Some(&(at, price)) = anchors.iter().find(|(_, p)| !(*p > 0.0 && p.is_finite())) {
            return Err(FactorError::NonPositivePrice { at, price });
        }
        anchors.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { anchors, base_year })
    }

    /// Reads `date, usd_per_gflops`, where `date` is a year or an ISO day.
    pub fn read_csv<R: Read>(reader: R, base_year: i32) -> Result<Self, FactorError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut anchors = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| FactorError::PriceParse {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                reason: e.to_string(),
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let bad = |reason: String| FactorError::PriceParse { line, reason };
            if rec.len() < 2 {
                return Err(bad("expected `date, usd_per_gflops`".into()));
            }
            let at = fractional_year(&rec[0]).ok_or_else(|| bad(format!("bad date `{}`", &rec[0])))?;
            let price: f64 = rec[1].parse().map_err(|_| bad(format!("bad price `{}`", &rec[1])))?;
            anchors.push((at, price));
        }
        Self::new(anchors, base_year)
    }

    pub fn base_year(&self) -> i32 {
        self.base_year
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    /// Multiplies every anchor price by `factor` and relabels the price level.
    pub fn rebased(&self, factor: f64, base_year: i32) -> Result<Self, FactorError> {
        Self::new(self.anchors.iter().map(|&(t, p)| (t, p * factor)).collect(), base_year)
    }

    /// Price at fractional year `t`, and whether `t` fell outside the anchors.
    pub fn price_at(&self, t: f64, extrapolation: Extrapolation) -> (f64, bool) {
        let a = &self.anchors;
        let (first, last) = (a[0], a[a.len() - 1]);
        let log_lerp = |(t0, p0): (f64, f64), (t1, p1): (f64, f64)| {
            if t1 == t0 {
                return p1;
            }
            let w = (t - t0) / (t1 - t0);
            (p0.ln() + w * (p1.ln() - p0.ln())).exp()
        };
        if t < first.0 || t > last.0 {
            let p = match extrapolation {
                Extrapolation::HoldFlat if t < first.0 => first.1,
                Extrapolation::HoldFlat => last.1,
                Extrapolation::LogLinear if t < first.0 => log_lerp(a[0], a[1]),
                Extrapolation::LogLinear => log_lerp(a[a.len() - 2], last),
            };
            return (p, true);
        }
        let hi = a.partition_point(|&(ta, _)| ta < t);
        if a[hi].0 == t {
            return (a[hi].1, false);
        }
        (log_lerp(a[hi - 1], a[hi]), false)
    }
}

fn fractional_year(s: &str) -> Option<f64> {
    if let Ok(y) = s.parse::<f64>() {
        return Some(y);
    }
    let d = NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()?;
    let days_in_year = if NaiveDate::from_ymd_opt(d.year(), 2, 29).is_some() {
        366.0
    } else {
        365.0
    };
    Some(d.year() as f64 + (d.ordinal0() as f64) / days_in_year)
}

/// Annual prices for `years`, log-linearly interpolated between anchors.
pub fn interpolate_price(
    sparse: &PriceSeries,
    years: impl IntoIterator<Item = i32>,
    extrapolation: Extrapolation,
) -> AnnualSeries {
    let mut points = BTreeMap::new();
    for y in years {
        let (p, outside) = sparse.price_at(y as f64, extrapolation);
        if outside {
            log::warn!("price for {y} extrapolated ({extrapolation:?})");
        }
        points.insert(y, p);
    }
    AnnualSeries::from_map(
        Units::UsdPerGflops {
            base_year: sparse.base_year,
        },
        points,
    )
}

/// Converts a nominal series to the price level of `base_year`.
pub fn deflate(nominal: &AnnualSeries, deflator: &AnnualSeries, base_year: i32) -> Result<AnnualSeries, FactorError> {
    let base = positive_deflator(deflator, base_year)?;
    let mut points = BTreeMap::new();
    for (y, v) in nominal.iter() {
        points.insert(y, v * base / positive_deflator(deflator, y)?);
    }
    let units = match nominal.units() {
        Units::UsdPerGflops { .. } => Units::UsdPerGflops { base_year },
        _ => Units::UsdReal { base_year },
    };
    Ok(AnnualSeries::from_map(units, points))
}

fn positive_deflator(deflator: &AnnualSeries, year: i32) -> Result<f64, FactorError> {
    let v = deflator.get(year).ok_or(FactorError::MissingDeflatorYear(year))?;
    if v <= 0.0 {
        return Err(FactorError::NonPositiveDeflator { year, value: v });
    }
    Ok(v)
}

/// Investment flow in compute units: real dollars divided by price per unit.
pub fn investment_flops(invest_usd_real: &AnnualSeries, price: &AnnualSeries) -> Result<AnnualSeries, FactorError> {
    let mut points = BTreeMap::new();
    for (y, inv) in invest_usd_real.iter() {
        let p = price.get(y).ok_or(FactorError::MissingYear {
            series: "price",
            year: y,
        })?;
        if p <= 0.0 {
            return Err(FactorError::NonPositivePrice { at: y as f64, price: p });
        }
        points.insert(y, inv / p);
    }
    Ok(AnnualSeries::from_map(Units::FlopPerSec, points))
}

/// Depreciation rate consistent with consecutive stock observations and the
/// investment flow, clipped to [0, 1].
pub fn implicit_depreciation(net_stock: &AnnualSeries, invest: &AnnualSeries) -> Result<AnnualSeries, FactorError> {
    let mut points = BTreeMap::new();
    for (y, k) in net_stock.iter() {
        let (Some(k_prev), Some(i)) = (net_stock.get(y - 1), invest.get(y)) else {
            continue;
        };
        let denominator = k_prev + 0.5 * i;
        if denominator <= 0.0 {
            return Err(FactorError::DepreciationDenominator { year: y, denominator });
        }
        let raw = (k_prev + i - k) / denominator;
        let delta = raw.clamp(0.0, 1.0);
        if delta != raw {
            log::warn!("implicit depreciation {raw:.4} at {y} clipped to {delta}");
        }
        points.insert(y, delta);
    }
    if points.is_empty() {
        return Err(FactorError::NoOverlap("net stock and investment"));
    }
    Ok(AnnualSeries::from_map(Units::Ratio, points))
}

/// Perpetual-inventory recursion seeded with `k0` at `k0_year`. Runs over
/// consecutive years after `k0_year` for which both `invest` and `delta` exist.
pub fn accumulate_capital(
    invest: &AnnualSeries,
    delta: &AnnualSeries,
    k0: f64,
    k0_year: i32,
) -> Result<AnnualSeries, FactorError> {
    let mut points = BTreeMap::new();
    points.insert(k0_year, k0);
    let mut k = k0;
    let mut year = k0_year + 1;
    while let (Some(i), Some(d)) = (invest.get(year), delta.get(year)) {
        if !(0.0..=1.0).contains(&d) {
            return Err(FactorError::DeltaOutOfRange { year, delta: d });
        }
        k = (1.0 - d) * k + (1.0 - 0.5 * d) * i;
        points.insert(year, k);
        year += 1;
    }
    Ok(AnnualSeries::from_map(invest.units(), points))
}

/// Seed for the capital recursion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CapitalSeed {
    /// The first year's net stock converted to compute at that year's price.
    #[default]
    NetStock,
    /// Steady state of the first year's flow: `I (1 - delta/2) / delta`.
    SteadyState,
}

pub fn steady_state_seed(invest: f64, delta: f64) -> f64 {
    invest * (1.0 - 0.5 * delta) / delta
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    phi_ai: f64,
    pub seconds_per_year: f64,
}

impl ScenarioConfig {
    pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

    pub fn new(phi_ai: f64) -> Result<Self, FactorError> {
        if !(phi_ai > 0.0 && phi_ai <= 1.0) {
            return Err(FactorError::PhiOutOfRange(phi_ai));
        }
        Ok(Self {
            phi_ai,
            seconds_per_year: Self::SECONDS_PER_YEAR,
        })
    }

    pub fn phi_ai(&self) -> f64 {
        self.phi_ai
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            phi_ai: 1.0,
            seconds_per_year: Self::SECONDS_PER_YEAR,
        }
    }
}

/// Share of the compute stock devoted to AI work.
pub fn effective_compute_stock(k: &AnnualSeries, cfg: &ScenarioConfig) -> AnnualSeries {
    k.scale(cfg.phi_ai)
}

/// Fills annual gaps between observed years by log-linear interpolation.
pub fn labor_series(raw: &AnnualSeries) -> Result<AnnualSeries, FactorError> {
    if raw.len() < 2 {
        return Err(FactorError::TooFewObservations(raw.len()));
    }
    if let Some((year, value)) = raw.iter().find(|(_, v)| *v <= 0.0) {
        return Err(FactorError::NonPositiveValue { year, value });
    }
    let obs: Vec<(i32, f64)> = raw.iter().collect();
    let mut points = BTreeMap::new();
    for pair in obs.windows(2) {
        let ((y0, v0), (y1, v1)) = (pair[0], pair[1]);
        points.insert(y0, v0);
        for y in (y0 + 1)..y1 {
            let w = (y - y0) as f64 / (y1 - y0) as f64;
            points.insert(y, (v0.ln() + w * (v1.ln() - v0.ln())).exp());
        }
    }
    let (y_last, v_last) = obs[obs.len() - 1];
    points.insert(y_last, v_last);
    Ok(AnnualSeries::from_map(raw.units(), points))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WagePremium {
    pub real_cs: AnnualSeries,
    pub real_agg: AnnualSeries,
    pub premium: AnnualSeries,
}

/// Occupation wage over aggregate wage, both deflated by the CPI to `base_year`.
pub fn wage_premium(
    w_cs: &AnnualSeries,
    w_agg: &AnnualSeries,
    cpi: &AnnualSeries,
    base_year: i32,
) -> Result<WagePremium, FactorError> {
    let years = crate::series::common_years(&[w_cs, w_agg]);
    if years.is_empty() {
        return Err(FactorError::NoOverlap("occupation and aggregate wages"));
    }
    let pick =
        |s: &AnnualSeries| AnnualSeries::from_map(s.units(), years.iter().map(|y| (*y, s.get(*y).unwrap())).collect());
    let real_cs = deflate(&pick(w_cs), cpi, base_year)?;
    let real_agg = deflate(&pick(w_agg), cpi, base_year)?;
    let mut points = BTreeMap::new();
    for &y in &years {
        let agg = real_agg.get(y).unwrap();
        if agg <= 0.0 {
            return Err(FactorError::NonPositiveWage { year: y, value: agg });
        }
        points.insert(y, real_cs.get(y).unwrap() / agg);
    }
    Ok(WagePremium {
        real_cs,
        real_agg,
        premium: AnnualSeries::from_map(Units::Ratio, points),
    })
}

/// Raw capital-side inputs with their unit multipliers already applied:
/// investment and net stock in nominal USD, prices in real USD per FLOP/sec.
#[derive(Debug, Clone)]
pub struct CapitalInputs {
    pub investment_nominal: AnnualSeries,
    pub net_stock_nominal: AnnualSeries,
    pub gdp_deflator: AnnualSeries,
    pub prices: PriceSeries,
    pub base_year: i32,
    pub seed: CapitalSeed,
    pub extrapolation: Extrapolation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapitalAccounts {
    pub investment_real: AnnualSeries,
    pub price: AnnualSeries,
    pub investment_flops: AnnualSeries,
    pub delta: AnnualSeries,
    pub capital_flops: AnnualSeries,
}

/// Runs the full capital chain: deflation, price interpolation, conversion,
/// implicit depreciation and accumulation.
pub fn build_capital(inputs: &CapitalInputs) -> Result<CapitalAccounts, FactorError> {
    let base = inputs.base_year;
    let prices = if inputs.prices.base_year() == base {
        inputs.prices.clone()
    } else {
        let from = inputs.prices.base_year();
        let factor = positive_deflator(&inputs.gdp_deflator, base)? / positive_deflator(&inputs.gdp_deflator, from)?;
        inputs.prices.rebased(factor, base)?
    };
    let investment_real = deflate(&inputs.investment_nominal, &inputs.gdp_deflator, base)?;
    let price = interpolate_price(&prices, investment_real.years(), inputs.extrapolation);
    let investment_flops = investment_flops(&investment_real, &price)?;
    let delta = implicit_depreciation(&inputs.net_stock_nominal, &inputs.investment_nominal)?;
    let k0_year = delta.first_year().ok_or(FactorError::NoOverlap("depreciation"))?;
    let k0 = match inputs.seed {
        CapitalSeed::NetStock => {
            let stock = inputs.net_stock_nominal.get(k0_year).ok_or(FactorError::MissingYear {
                series: "net stock",
                year: k0_year,
            })?;
            let real = stock * positive_deflator(&inputs.gdp_deflator, base)?
                / positive_deflator(&inputs.gdp_deflator, k0_year)?;
            real / price.get(k0_year).ok_or(FactorError::MissingYear {
                series: "price",
                year: k0_year,
            })?
        }
        CapitalSeed::SteadyState => {
            let i0 = investment_flops.get(k0_year).ok_or(FactorError::MissingYear {
                series: "investment",
                year: k0_year,
            })?;
            steady_state_seed(i0, delta.get(k0_year).unwrap())
        }
    };
    let capital_flops = accumulate_capital(&investment_flops, &delta, k0, k0_year)?;
    Ok(CapitalAccounts {
        investment_real,
        price,
        investment_flops,
        delta,
        capital_flops,
    })
}
