//! Right-hand-side specifications for the modal problem.

use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

/// Table of (t, f(t)) samples with strictly ascending abscissae, evaluated
/// by piecewise-linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    t: Vec<f64>,
    f: Vec<f64>,
}

impl SampleTable {
    pub fn new(t: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if t.len() != f.len() {
            return Err(Error::MalformedSamples(format!(
                "{} abscissae vs {} values",
                t.len(),
                f.len()
            )));
        }
        if t.len() < 2 {
            return Err(Error::MalformedSamples(
                "need at least two samples".into(),
            ));
        }
        for w in t.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::MalformedSamples(format!(
                    "abscissae must be strictly ascending: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if t.iter().chain(f.iter()).any(|v| !v.is_finite()) {
            return Err(Error::MalformedSamples("non-finite sample entry".into()));
        }
        Ok(Self { t, f })
    }

    /// Parses CSV text with rows `t,f`; an optional non-numeric header line
    /// is skipped.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut ts = Vec::new();
        let mut fs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 2 {
                return Err(Error::MalformedSamples(format!(
                    "line {}: expected 2 columns, found {}",
                    lineno + 1,
                    cells.len()
                )));
            }
            match (cells[0].parse::<f64>(), cells[1].parse::<f64>()) {
                (Ok(t), Ok(f)) => {
                    ts.push(t);
                    fs.push(f);
                }
                _ if lineno == 0 => continue, // header
                _ => {
                    return Err(Error::MalformedSamples(format!(
                        "line {}: cannot parse '{line}' as two numbers",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(ts, fs)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_str(&text)
    }

    pub fn t_min(&self) -> f64 {
        self.t[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// Piecewise-linear interpolation; `t` must lie within the sampled range.
    pub fn interp(&self, t: f64) -> Result<f64> {
        if !(t >= self.t_min() && t <= self.t_max()) {
            return Err(Error::InvalidArgument(format!(
                "sample evaluation at {t} outside range [{}, {}]",
                self.t_min(),
                self.t_max()
            )));
        }
        let k = self.t.partition_point(|&s| s <= t).saturating_sub(1);
        let k = k.min(self.t.len() - 2);
        let (a, b) = (self.t[k], self.t[k + 1]);
        let s = (t - a) / (b - a);
        Ok(self.f[k] * (1.0 - s) + self.f[k + 1] * s)
    }

    /// Interior sample abscissae strictly inside (lo, hi), for quadrature
    /// panel alignment with the interpolant's kinks.
    pub fn knots_within(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.t
            .iter()
            .copied()
            .filter(|&s| s > lo && s < hi)
            .collect()
    }
}

/// Time-dependent density profile.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityProfile {
    /// f(t) = c.
    Const(f64),
    /// f(t) = sin(omega t).
    Sine { omega: f64 },
    /// f(t) = cos(omega t).
    Cosine { omega: f64 },
    /// f(t) = sum_k coeffs[k] t^k.
    Poly(Vec<f64>),
    /// Piecewise-linear interpolant of a sample table.
    Samples(SampleTable),
}

impl DensityProfile {
    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match self {
            DensityProfile::Const(c) => *c,
            DensityProfile::Sine { omega } => (omega * t).sin(),
            DensityProfile::Cosine { omega } => (omega * t).cos(),
            DensityProfile::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck),
            DensityProfile::Samples(table) => table.interp(t)?,
        };
        if !v.is_finite() {
            return Err(Error::NonFiniteProfile { at: t });
        }
        Ok(v)
    }

    /// Interior kink locations of the profile within (lo, hi).
    pub fn knots_within(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            DensityProfile::Samples(table) => table.knots_within(lo, hi),
            _ => Vec::new(),
        }
    }
}

/// Right-hand side of the modal problem.
#[derive(Debug, Clone, PartialEq)]
pub enum RhsSpec {
    /// Density f paired against test functions in L2(0, T).
    Density(DensityProfile),
    /// Point mass w * delta_0: the functional v -> w * v(0).
    PointMass { weight: f64 },
    /// Density read from a CSV file of (t, f(t)) rows at assembly time.
    Samples { path: PathBuf },
}

/// An `RhsSpec` with file-backed samples materialized.
#[derive(Debug, Clone)]
pub enum ResolvedRhs {
    Density(DensityProfile),
    PointMass(f64),
}

impl RhsSpec {
    pub fn resolve(&self) -> Result<ResolvedRhs> {
        Ok(match self {
            RhsSpec::Density(p) => ResolvedRhs::Density(p.clone()),
            RhsSpec::PointMass { weight } => ResolvedRhs::PointMass(*weight),
            RhsSpec::Samples { path } => {
                ResolvedRhs::Density(DensityProfile::Samples(SampleTable::from_csv_path(path)?))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_horner_evaluation() {
        let p = DensityProfile::Poly(vec![1.0, 0.0, 2.0]); // 1 + 2 t^2
        assert_eq!(p.eval(0.0).unwrap(), 1.0);
        assert_eq!(p.eval(2.0).unwrap(), 9.0);
    }

    #[test]
    fn sample_table_interpolates_linearly() {
        let tb = SampleTable::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(tb.interp(0.5).unwrap(), 1.0);
        assert_eq!(tb.interp(1.5).unwrap(), 1.0);
        assert_eq!(tb.interp(2.0).unwrap(), 0.0);
        assert!(tb.interp(2.1).is_err());
    }

    #[test]
    fn csv_parse_with_header_and_blank_lines() {
        let text = "t,f\n0.0,1.0\n\n0.5,2.0\n1.0,3.0\n";
        let tb = SampleTable::from_csv_str(text).unwrap();
        assert_eq!(tb.interp(0.25).unwrap(), 1.5);
    }

    #[test]
    fn csv_rejects_malformed_rows() {
        assert!(matches!(
            SampleTable::from_csv_str("0.0,1.0\nbroken\n"),
            Err(Error::MalformedSamples(_))
        ));
        assert!(matches!(
            SampleTable::from_csv_str("0.0,1.0,2.0\n1.0,2.0\n"),
            Err(Error::MalformedSamples(_))
        ));
        assert!(matches!(
            SampleTable::from_csv_str("1.0,1.0\n0.5,2.0\n"),
            Err(Error::MalformedSamples(_))
        ));
        assert!(matches!(
            SampleTable::from_csv_str("0.0,1.0\n1.0,nan\n"),
            Err(Error::MalformedSamples(_))
        ));
    }

    #[test]
    fn missing_samples_file_reports_path() {
        let spec = RhsSpec::Samples {
            path: "/nonexistent/file.csv".into(),
        };
        match spec.resolve() {
            Err(Error::Io { path, .. }) => assert!(path.contains("nonexistent")),
            other => panic!("expected Io error, got {other:?}"),
        }
    }
}
