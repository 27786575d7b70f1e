//! Year-indexed real-valued series shared by the factor, fit and report stages.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;

use thiserror::Error;

/// Units carried by an [`AnnualSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    UsdNominal,
    /// Real US dollars at the price level of `base_year`.
    UsdReal {
        base_year: i32,
    },
    /// Real US dollars per GFLOP/sec at the price level of `base_year`.
    UsdPerGflops {
        base_year: i32,
    },
    FlopPerSec,
    Persons,
    Ratio,
    IndexPoints,
    /// Natural-log units of some underlying quantity.
    Log,
    Count,
}

impl Units {
    pub fn base_year(&self) -> Option<i32> {
        match *self {
            Units::UsdReal { base_year } | Units::UsdPerGflops { base_year } => Some(base_year),
            _ => None,
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Units::UsdNominal => write!(f, "USD (nominal)"),
            Units::UsdReal { base_year } => write!(f, "USD ({base_year} price level)"),
            Units::UsdPerGflops { base_year } => {
                write!(f, "USD per GFLOP/sec ({base_year} price level)")
            }
            Units::FlopPerSec => write!(f, "FLOP/sec"),
            Units::Persons => write!(f, "persons"),
            Units::Ratio => write!(f, "ratio"),
            Units::IndexPoints => write!(f, "index points"),
            Units::Log => write!(f, "log"),
            Units::Count => write!(f, "count"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("non-finite value {value} at year {year}")]
    NonFinite { year: i32, value: f64 },
    #[error("duplicate year {0}")]
    DuplicateYear(i32),
    #[error("line {line}: {reason}")]
    Parse { line: u64, reason: String },
    #[error("io: {0}")]
    Io(String),
}

/// A year-indexed series. Years are strictly increasing and values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualSeries {
    points: BTreeMap<i32, f64>,
    units: Units,
}

impl AnnualSeries {
    pub fn new(units: Units) -> Self {
        Self {
            points: BTreeMap::new(),
            units,
        }
    }

    pub fn from_pairs<I>(units: Units, pairs: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (i32, f64)>,
    {
        let mut s = Self::new(units);
        for (year, value) in pairs {
            if !value.is_finite() {
                return Err(SeriesError::NonFinite { year, value });
            }
            if s.points.insert(year, value).is_some() {
                return Err(SeriesError::DuplicateYear(year));
            }
        }
        Ok(s)
    }

    pub(crate) fn from_map(units: Units, points: BTreeMap<i32, f64>) -> Self {
        debug_assert!(points.values().all(|v| v.is_finite()));
        Self { points, units }
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn with_units(mut self, units: Units) -> Self {
        self.units = units;
        self
    }

    pub fn base_year(&self) -> Option<i32> {
        self.units.base_year()
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        self.points.get(&year).copied()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.points.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.points.iter().map(|(y, v)| (*y, *v))
    }

    pub fn first_year(&self) -> Option<i32> {
        self.points.keys().next().copied()
    }

    pub fn last_year(&self) -> Option<i32> {
        self.points.keys().next_back().copied()
    }

    /// Applies `f` pointwise, keeping years.
    pub fn map(&self, units: Units, f: impl Fn(f64) -> f64) -> AnnualSeries {
        AnnualSeries {
            points: self.points.iter().map(|(y, v)| (*y, f(*v))).collect(),
            units,
        }
    }

    pub fn scale(&self, factor: f64) -> AnnualSeries {
        self.map(self.units, |v| v * factor)
    }

    /// Reads a two-column `year, value` CSV with a header row.
    pub fn read_csv<R: Read>(reader: R, units: Units) -> Result<Self, SeriesError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut pairs = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| SeriesError::Io(e.to_string()))?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            if rec.len() < 2 {
                return Err(SeriesError::Parse {
                    line,
                    reason: "expected `year, value`".into(),
                });
            }
            let year: i32 = rec[0].parse().map_err(|_| SeriesError::Parse {
                line,
                reason: format!("bad year `{}`", &rec[0]),
            })?;
            let value: f64 = rec[1].parse().map_err(|_| SeriesError::Parse {
                line,
                reason: format!("bad value `{}`", &rec[1]),
            })?;
            pairs.push((year, value));
        }
        pairs.sort_by_key(|p| p.0);
        Self::from_pairs(units, pairs)
    }
}

/// Years present in every series, ascending.
pub fn common_years(series: &[&AnnualSeries]) -> Vec<i32> {
    let Some((first, rest)) = series.split_first() else {
        return Vec::new();
    };
    first
        .years()
        .filter(|y| rest.iter().all(|s| s.points.contains_key(y)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_duplicates() {
        assert!(matches!(
            AnnualSeries::from_pairs(Units::Ratio, [(2000, f64::NAN)]),
            Err(SeriesError::NonFinite { year: 2000, .. })
        ));
        assert_eq!(
            AnnualSeries::from_pairs(Units::Ratio, [(2000, 1.0), (2000, 2.0)]),
            Err(SeriesError::DuplicateYear(2000))
        );
    }

    #[test]
    fn reads_csv_unsorted() {
        let text = "year,value\n2001, 2.5\n2000,1\n";
        let s = AnnualSeries::read_csv(text.as_bytes(), Units::Persons).unwrap();
        assert_eq!(s.years().collect::<Vec<_>>(), vec![2000, 2001]);
        assert_eq!(s.get(2001), Some(2.5));
    }

    #[test]
    fn common_years_is_intersection() {
        let a = AnnualSeries::from_pairs(Units::Ratio, [(1, 1.0), (2, 1.0), (3, 1.0)]).unwrap();
        let b = AnnualSeries::from_pairs(Units::Ratio, [(2, 1.0), (3, 1.0), (4, 1.0)]).unwrap();
        assert_eq!(common_years(&[&a, &b]), vec![2, 3]);
    }
}
