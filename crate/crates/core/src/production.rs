//! Cobb-Douglas production fits with a fixed capital elasticity.
//!
//! With `alpha` taken from income shares the model `ln Y = ln A + alpha ln K +
//! (1 - alpha) ln L` has a single free parameter per output proxy, the mean of
//! `ln A`, which OLS gives as the sample mean of the residual gap.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::series::{common_years, AnnualSeries, Units};

#[derive(Debug, Error, PartialEq)]
pub enum ProductionError {
    #[error("compensation {compensation} must lie strictly between 0 and value added {value_added}")]
    ShareOutOfRange { compensation: f64, value_added: f64 },
    #[error("alpha {0} outside (0, 1)")]
    AlphaOutOfRange(f64),
    #[error("{proxy}: value {value} at year {year} cannot be logged")]
    NonPositive { proxy: ProxyId, year: i32, value: f64 },
    #[error("{proxy}: mapped value {value} at year {year} outside (0, 1]")]
    OutsideUnitInterval { proxy: ProxyId, year: i32, value: f64 },
    #[error("need at least 2 aligned observations, got {0}")]
    TooFewObservations(usize),
    #[error("R-squared undefined: log output has zero variance")]
    ZeroVariance,
    #[error("reference proxy {0} has no fit")]
    MissingReference(ProxyId),
    #[error("{series} must be positive, found {value} at year {year}")]
    NonPositiveFactor {
        series: &'static str,
        year: i32,
        value: f64,
    },
    #[error("doubling time must be positive, got {0}")]
    BadDoublingTime(f64),
    #[error("neither factor grows: doubling time is infinite")]
    NoGrowth,
    #[error("unknown proxy `{0}`")]
    UnknownProxy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShareSource {
    IndustryAccounts,
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorShares {
    alpha: f64,
    pub source: ShareSource,
}

impl FactorShares {
    pub fn new(alpha: f64, source: ShareSource) -> Result<Self, ProductionError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ProductionError::AlphaOutOfRange(alpha));
        }
        Ok(Self { alpha, source })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Capital share as one minus the labor share of value added.
pub fn factor_share_alpha(compensation: f64, value_added: f64) -> Result<FactorShares, ProductionError> {
    if !(compensation > 0.0 && compensation < value_added) {
        return Err(ProductionError::ShareOutOfRange {
            compensation,
            value_added,
        });
    }
    FactorShares::new(1.0 - compensation / value_added, ShareSource::IndustryAccounts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProxyId {
    Papers,
    Patents,
    Asota,
    Lm,
    Ic,
    Elo,
}

impl ProxyId {
    pub const ALL: [ProxyId; 6] = [
        ProxyId::Papers,
        ProxyId::Patents,
        ProxyId::Asota,
        ProxyId::Lm,
        ProxyId::Ic,
        ProxyId::Elo,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            ProxyId::Papers => "papers",
            ProxyId::Patents => "patents",
            ProxyId::Asota => "asota",
            ProxyId::Lm => "lm",
            ProxyId::Ic => "ic",
            ProxyId::Elo => "elo",
        }
    }

    /// Default transform to log units.
    pub fn default_transform(self) -> LogTransform {
        match self {
            ProxyId::Papers | ProxyId::Patents => LogTransform::NaturalLog,
            ProxyId::Asota => LogTransform::AlreadyLog,
            ProxyId::Lm => LogTransform::BoundedUnitThenLog(UnitMap::Reciprocal),
            ProxyId::Ic => LogTransform::BoundedUnitThenLog(UnitMap::Identity),
            ProxyId::Elo => LogTransform::EloDiv400,
        }
    }

    /// Label used in figure legends.
    pub fn label(self) -> &'static str {
        match self {
            ProxyId::Papers => "Y_papers",
            ProxyId::Patents => "Y_patents",
            ProxyId::Asota => "Y_ASOTA",
            ProxyId::Lm => "Y_LM",
            ProxyId::Ic => "Y_IC",
            ProxyId::Elo => "Y_Elo",
        }
    }
}

impl fmt::Display for ProxyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ProxyId {
    type Err = ProductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProxyId::ALL
            .into_iter()
            .find(|p| p.slug().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ProductionError::UnknownProxy(s.to_string()))
    }
}

/// Monotone map of a raw benchmark score onto (0, 1], higher is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitMap {
    /// `1 / x`, for perplexity-like scores bounded below by 1.
    Reciprocal,
    /// `x / 100`, for percentages.
    Percent,
    Identity,
}

impl UnitMap {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            UnitMap::Reciprocal => 1.0 / x,
            UnitMap::Percent => x / 100.0,
            UnitMap::Identity => x,
        }
    }
}

impl FromStr for UnitMap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "reciprocal" => Ok(UnitMap::Reciprocal),
            "percent" => Ok(UnitMap::Percent),
            "identity" => Ok(UnitMap::Identity),
            other => Err(format!("unknown unit map `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogTransform {
    NaturalLog,
    EloDiv400,
    AlreadyLog,
    BoundedUnitThenLog(UnitMap),
}

/// Elo calibration constant.
pub const ELO_SCALE: f64 = 400.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OutputProxy {
    pub id: ProxyId,
    pub transform: LogTransform,
    pub observations: AnnualSeries,
}

pub fn to_log_output(proxy: &OutputProxy) -> Result<AnnualSeries, ProductionError> {
    let mut points = BTreeMap::new();
    for (year, value) in proxy.observations.iter() {
        let v = match proxy.transform {
            LogTransform::NaturalLog => {
                if value <= 0.0 {
                    return Err(ProductionError::NonPositive {
                        proxy: proxy.id,
                        year,
                        value,
                    });
                }
                value.ln()
            }
            LogTransform::EloDiv400 => value / ELO_SCALE,
            LogTransform::AlreadyLog => value,
            LogTransform::BoundedUnitThenLog(map) => {
                let m = map.apply(value);
                if !(m > 0.0 && m <= 1.0) {
                    return Err(ProductionError::OutsideUnitInterval {
                        proxy: proxy.id,
                        year,
                        value: m,
                    });
                }
                m.ln()
            }
        };
        points.insert(year, v);
    }
    Ok(AnnualSeries::from_map(Units::Log, points))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CobbDouglasFit {
    pub alpha: f64,
    pub mean_log_a: f64,
    /// Observed log output on the aligned years.
    pub observed: AnnualSeries,
    /// `alpha ln K + (1 - alpha) ln L` on the aligned years, without intercept.
    pub factor_term: AnnualSeries,
    pub predicted: AnnualSeries,
    pub residuals: AnnualSeries,
    pub r2: f64,
    pub n_obs: usize,
}

/// Fits the intercept on the years where all three log series exist.
/// R-squared compares observed log output with the alpha-constrained prediction.
pub fn fit_mean_log_a(
    log_y: &AnnualSeries,
    log_k: &AnnualSeries,
    log_l: &AnnualSeries,
    alpha: f64,
) -> Result<CobbDouglasFit, ProductionError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ProductionError::AlphaOutOfRange(alpha));
    }
    let years = common_years(&[log_y, log_k, log_l]);
    let n = years.len();
    if n < 2 {
        return Err(ProductionError::TooFewObservations(n));
    }
    let ys: Vec<f64> = years.iter().map(|y| log_y.get(*y).unwrap()).collect();
    let xs: Vec<f64> = years
        .iter()
        .map(|y| alpha * log_k.get(*y).unwrap() + (1.0 - alpha) * log_l.get(*y).unwrap())
        .collect();
    let mean_log_a = ys.iter().zip(&xs).map(|(y, x)| y - x).sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(ProductionError::ZeroVariance);
    }
    let residual: Vec<f64> = ys.iter().zip(&xs).map(|(y, x)| y - (mean_log_a + x)).collect();
    let ss_res: f64 = residual.iter().map(|r| r * r).sum();
    let collect = |vals: &[f64]| -> AnnualSeries {
        AnnualSeries::from_map(Units::Log, years.iter().copied().zip(vals.iter().copied()).collect())
    };
    let predicted: Vec<f64> = xs.iter().map(|x| mean_log_a + x).collect();
    Ok(CobbDouglasFit {
        alpha,
        mean_log_a,
        observed: collect(&ys),
        factor_term: collect(&xs),
        predicted: collect(&predicted),
        residuals: collect(&residual),
        r2: 1.0 - ss_res / ss_tot,
        n_obs: n,
    })
}

/// Log output predicted from factor levels.
pub fn predict_output(
    k: &AnnualSeries,
    l: &AnnualSeries,
    alpha: f64,
    mean_log_a: f64,
) -> Result<AnnualSeries, ProductionError> {
    let mut points = BTreeMap::new();
    for year in common_years(&[k, l]) {
        let kv = k.get(year).unwrap();
        let lv = l.get(year).unwrap();
        if kv <= 0.0 {
            return Err(ProductionError::NonPositiveFactor {
                series: "K",
                year,
                value: kv,
            });
        }
        if lv <= 0.0 {
            return Err(ProductionError::NonPositiveFactor {
                series: "L",
                year,
                value: lv,
            });
        }
        points.insert(year, mean_log_a + alpha * kv.ln() + (1.0 - alpha) * lv.ln());
    }
    Ok(AnnualSeries::from_map(Units::Log, points))
}

/// Natural log of a positive factor series.
pub fn log_factor(series: &AnnualSeries, name: &'static str) -> Result<AnnualSeries, ProductionError> {
    if let Some((year, value)) = series.iter().find(|(_, v)| *v <= 0.0) {
        return Err(ProductionError::NonPositiveFactor {
            series: name,
            year,
            value,
        });
    }
    Ok(series.map(Units::Log, f64::ln))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSeries {
    pub proxy: ProxyId,
    /// Observed output with its own intercept swapped for the reference one, base-10 logs.
    pub observed_log10: AnnualSeries,
    /// Common model line on the proxy's years, base-10 logs.
    pub model_log10: AnnualSeries,
}

/// Puts every proxy on the reference proxy's scale, in base-10 logs.
pub fn align_series(
    fits: &BTreeMap<ProxyId, CobbDouglasFit>,
    reference: ProxyId,
) -> Result<BTreeMap<ProxyId, AlignedSeries>, ProductionError> {
    let ref_a = fits
        .get(&reference)
        .ok_or(ProductionError::MissingReference(reference))?
        .mean_log_a;
    let ln10 = std::f64::consts::LN_10;
    Ok(fits
        .iter()
        .map(|(&proxy, fit)| {
            let shift = ref_a - fit.mean_log_a;
            let aligned = AlignedSeries {
                proxy,
                observed_log10: fit.observed.map(Units::Log, |v| (v + shift) / ln10),
                model_log10: fit.factor_term.map(Units::Log, |v| (v + ref_a) / ln10),
            };
            (proxy, aligned)
        })
        .collect())
}

/// Output doubling time implied by factor doubling times; `None` marks a constant factor.
pub fn doubling_time(
    alpha: f64,
    k_doubling_years: Option<f64>,
    l_doubling_years: Option<f64>,
) -> Result<f64, ProductionError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ProductionError::AlphaOutOfRange(alpha));
    }
    let rate = |d: Option<f64>, weight: f64| -> Result<f64, ProductionError> {
        match d {
            None => Ok(0.0),
            Some(d) if d > 0.0 => Ok(weight / d),
            Some(d) => Err(ProductionError::BadDoublingTime(d)),
        }
    };
    let doublings_per_year = rate(k_doubling_years, alpha)? + rate(l_doubling_years, 1.0 - alpha)?;
    if doublings_per_year == 0.0 {
        return Err(ProductionError::NoGrowth);
    }
    Ok(1.0 / doublings_per_year)
}
