//! Decay profiles: sampled norms of a `t`-indexed family on a geometric grid
//! with a fitted log-log slope. A statement "`X_t → 0` as `t → ∞`" is checked
//! at finite scale by requiring the fitted exponent to be negative enough.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::GradedMatrix;

/// Values below this are treated as exact zeros and left out of the fit.
pub const VALUE_FLOOR: f64 = 1e-14;

/// Strictly increasing positive sample points, at least two.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TGrid(Vec<f64>);

impl TGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidGrid("points must be positive and finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("points must be strictly increasing".into()));
        }
        Ok(Self(points))
    }

    /// `points` geometrically spaced values from `start` to `end` inclusive.
    pub fn geometric(start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 2 || !(start > 0.0 && end > start && end.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "geometric grid needs 0 < start < end and >= 2 points (start={start}, end={end}, points={points})"
            )));
        }
        let ratio = (end / start).ln() / (points - 1) as f64;
        let mut v: Vec<f64> = (0..points).map(|i| start * (ratio * i as f64).exp()).collect();
        v[points - 1] = end;
        Self::new(v)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Points with `t >= lower`.
    pub fn tail_from(&self, lower: f64) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied().filter(move |&t| t >= lower)
    }
}

impl Default for TGrid {
    /// 60 geometric points on `[1, 10³]`.
    fn default() -> Self {
        TGrid::geometric(1.0, 1e3, 60).expect("valid default grid")
    }
}

/// Sampled norms with a power-law fit `value ≈ constant · t^exponent` over
/// the upper half of the grid. An exponent of `-∞` means every fitted value
/// fell below [`VALUE_FLOOR`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile {
    #[serde(rename = "grid")]
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(rename = "exponent")]
    pub fitted_exponent: f64,
    #[serde(rename = "constant")]
    pub fitted_constant: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
}

impl DecayProfile {
    pub fn from_values(grid: &TGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        let start = grid.len() / 2;
        let pts: Vec<(f64, f64)> = grid.points()[start..]
            .iter()
            .zip(&values[start..])
            .filter(|(_, &v)| v >= VALUE_FLOOR)
            .map(|(&t, &v)| (t.ln(), v.ln()))
            .collect();
        let (fitted_exponent, fitted_constant, residual) = fit_line(&pts);
        Ok(Self {
            t_grid: grid.points().to_vec(),
            values,
            fitted_exponent,
            fitted_constant,
            residual,
        })
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Largest value over `t >= lower`.
    pub fn sup_from(&self, lower: f64) -> f64 {
        self.t_grid
            .iter()
            .zip(&self.values)
            .filter(|(&t, _)| t >= lower)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max)
    }

    /// `exponent <= threshold`; the `-∞` sentinel always passes.
    pub fn decays_at_least(&self, threshold: f64) -> bool {
        self.fitted_exponent <= threshold
    }

    /// Rows `t,value` with a header line, floats rendered by `fmt`.
    pub fn to_csv(&self, fmt: impl Fn(f64) -> String) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in self.t_grid.iter().zip(&self.values) {
            out.push_str(&fmt(*t));
            out.push(',');
            out.push_str(&fmt(*v));
            out.push('\n');
        }
        out
    }
}

/// Ordinary least squares; returns `(slope, e^intercept, rms residual)`.
fn fit_line(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    if pts.len() < 2 {
        return (f64::NEG_INFINITY, 0.0, 0.0);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, intercept.exp(), (rss / n).sqrt())
}

/// Operator norms of `family(t)` over the grid; grid points are evaluated in
/// parallel.
pub fn decay_profile<F>(family: F, grid: &TGrid) -> Result<DecayProfile>
where
    F: Fn(f64) -> GradedMatrix + Sync,
{
    scalar_profile(|t| family(t).operator_norm(), grid)
}

/// Like [`decay_profile`] for families that already produce a norm.
pub fn scalar_profile<F>(family: F, grid: &TGrid) -> Result<DecayProfile>
where
    F: Fn(f64) -> f64 + Sync,
{
    let values: Vec<f64> = grid.points().par_iter().map(|&t| family(t)).collect();
    DecayProfile::from_values(grid, values)
}

/// C-style `%.12e` rendering (`1.000000000000e+00`), used for byte-stable
/// reports. Non-finite values render as `nan`, `inf`, `-inf`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{GradedMatrix, GradedSpace};

    #[test]
    fn grid_validation() {
        assert!(TGrid::new(vec![]).is_err());
        assert!(TGrid::new(vec![1.0]).is_err());
        assert!(TGrid::new(vec![1.0, 1.0]).is_err());
        assert!(TGrid::new(vec![0.0, 1.0]).is_err());
        assert!(TGrid::geometric(10.0, 1.0, 5).is_err());
        let g = TGrid::default();
        assert_eq!(g.len(), 60);
        assert_eq!(g.points()[0], 1.0);
        assert_eq!(g.points()[59], 1e3);
    }

    #[test]
    fn zero_family_gives_neg_infinity() {
        let space = GradedSpace::balanced(3).unwrap();
        let p = decay_profile(|_| GradedMatrix::zeros(&space), &TGrid::default()).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));
        assert_eq!(p.fitted_exponent, f64::NEG_INFINITY);
        assert!(p.decays_at_least(-100.0));
    }

    #[test]
    fn exact_power_law() {
        let space = GradedSpace::balanced(4).unwrap();
        let id = GradedMatrix::identity(&space);
        let p = decay_profile(|t| id.scale(t.powi(-2)), &TGrid::default()).unwrap();
        assert!((p.fitted_exponent + 2.0).abs() < 1e-6, "{}", p.fitted_exponent);
        assert!((p.fitted_constant - 1.0).abs() < 1e-6);
        assert!(p.residual < 1e-10);
    }

    #[test]
    fn floored_values_are_excluded() {
        let grid = TGrid::geometric(1.0, 100.0, 10).unwrap();
        let mut values: Vec<f64> = grid.points().iter().map(|t| 3.0 / t).collect();
        values[9] = 1e-20;
        let p = DecayProfile::from_values(&grid, values).unwrap();
        assert!((p.fitted_exponent + 1.0).abs() < 1e-10);
        assert!((p.fitted_constant - 3.0).abs() < 1e-9);
    }

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(1.0), "1.000000000000e+00");
        assert_eq!(format_sci(-2.5e-5), "-2.500000000000e-05");
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(1.5e300), "1.500000000000e+300");
        assert_eq!(format_sci(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_layout() {
        let grid = TGrid::new(vec![1.0, 2.0]).unwrap();
        let p = DecayProfile::from_values(&grid, vec![0.5, 0.25]).unwrap();
        assert_eq!(
            p.to_csv(format_sci),
            "t,value\n1.000000000000e+00,5.000000000000e-01\n2.000000000000e+00,2.500000000000e-01\n"
        );
    }
}
