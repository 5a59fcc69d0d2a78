use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Axis against which truncated values are regressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthModel {
    /// value ~ slope · |ln level|
    Log,
    /// value ~ slope · level
    Linear,
}

impl GrowthModel {
    pub fn axis<T: Scalar>(&self, level: T) -> T {
        match self {
            GrowthModel::Log => level.ln().abs(),
            GrowthModel::Linear => level,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthModel::Log => "log",
            GrowthModel::Linear => "linear",
        }
    }
}

/// Least-squares line through `(axis(level), value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

pub fn fit_growth<T: Scalar>(levels: &[T], values: &[T], model: GrowthModel) -> GrowthFit<T> {
    let xs: Vec<T> = levels.iter().map(|&l| model.axis(l)).collect();
    let n = T::of_usize(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = values.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(values) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
        syy = syy + (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r_squared = if syy > T::zero() {
        sxy * sxy / (sxx * syy)
    } else {
        T::zero()
    };
    GrowthFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}

/// Truncated expectations over a ladder of truncation levels, with their fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceEvidence<T> {
    pub levels: Vec<T>,
    pub values: Vec<T>,
    pub slope: T,
    pub r_squared: T,
    pub model: GrowthModel,
}

impl<T: Scalar> DivergenceEvidence<T> {
    pub fn from_values(levels: Vec<T>, values: Vec<T>, model: GrowthModel) -> Self {
        let fit = fit_growth(&levels, &values, model);
        Self {
            levels,
            values,
            slope: fit.slope,
            r_squared: fit.r_squared,
            model,
        }
    }

    pub fn strictly_increasing(&self) -> bool {
        self.values.iter().all(|v| v.is_finite()) && self.values.windows(2).all(|w| w[1] > w[0])
    }

    /// Growth per unit of the axis is nondecreasing (convex or faster growth).
    pub fn accelerating(&self) -> bool {
        let xs: Vec<T> = self.levels.iter().map(|&l| self.model.axis(l)).collect();
        let rates: Vec<T> = xs
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        rates.windows(2).all(|r| r[1] >= r[0])
    }

    /// Strictly increasing, and either a good fit to the growth model or
    /// growth that accelerates along the axis.
    pub fn is_diverging(&self) -> bool {
        self.strictly_increasing() && (self.r_squared >= T::of(0.99) || self.accelerating())
    }

    /// Multiplies every value by `c > 0`; the verdict is unchanged.
    pub fn scaled(&self, c: T) -> Self {
        Self::from_values(
            self.levels.clone(),
            self.values.iter().map(|&v| v * c).collect(),
            self.model,
        )
    }
}

/// Evaluates `family` at each level and fits the growth model.
///
/// Levels must number at least four and be strictly ordered along the axis
/// (increasing for `Linear`, monotone in `|ln level|` for `Log`).
pub fn detect_divergence<T, F>(
    mut family: F,
    levels: &[T],
    model: GrowthModel,
) -> Result<DivergenceEvidence<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    if levels.len() < 4 {
        return Err(Error::InvalidLevels(format!(
            "need at least 4 levels, got {}",
            levels.len()
        )));
    }
    if levels.iter().any(|&l| !(l.is_finite() && l > T::zero())) {
        return Err(Error::InvalidLevels(
            "levels must be finite and positive".into(),
        ));
    }
    let axis: Vec<T> = levels.iter().map(|&l| model.axis(l)).collect();
    if !axis.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidLevels(format!(
            "levels must move strictly away from the limit along the {} axis",
            model.as_str()
        )));
    }
    let values = levels
        .iter()
        .map(|&l| family(l))
        .collect::<Result<Vec<T>>>()?;
    Ok(DivergenceEvidence::from_values(
        levels.to_vec(),
        values,
        model,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_diverging() {
        let ev = detect_divergence(
            |t: f64| Ok(t),
            &[10.0, 20.0, 40.0, 80.0],
            GrowthModel::Linear,
        )
        .unwrap();
        assert!((ev.slope - 1.0).abs() < 1e-14);
        assert!((ev.r_squared - 1.0).abs() < 1e-14);
        assert!(ev.is_diverging());
    }

    #[test]
    fn log_axis_uses_abs_log() {
        let ev = detect_divergence(
            |d: f64| Ok(0.5 * (1.0 / d).ln() + 3.0),
            &[1e-2, 1e-3, 1e-4, 1e-5],
            GrowthModel::Log,
        )
        .unwrap();
        assert!((ev.slope - 0.5).abs() < 1e-12);
        assert!(ev.is_diverging());
    }

    #[test]
    fn constant_family_is_not_diverging() {
        let ev = detect_divergence(|_: f64| Ok(2.0), &[1.0, 2.0, 3.0, 4.0], GrowthModel::Linear)
            .unwrap();
        assert!(!ev.is_diverging());
    }

    #[test]
    fn saturating_family_is_not_diverging() {
        let ev = detect_divergence(
            |r: f64| Ok(1.0 - 1.0 / r),
            &[1e2, 1e4, 1e6, 1e8],
            GrowthModel::Log,
        )
        .unwrap();
        assert!(ev.strictly_increasing());
        assert!(!ev.is_diverging());
    }

    #[test]
    fn superexponential_family_is_diverging() {
        let ev = detect_divergence(
            |t: f64| Ok((t * t).exp().exp()),
            &[1.0, 1.2, 1.4, 1.5],
            GrowthModel::Linear,
        )
        .unwrap();
        assert!(ev.accelerating());
        assert!(ev.is_diverging());
    }

    #[test]
    fn level_validation() {
        assert!(detect_divergence(|t: f64| Ok(t), &[1.0, 2.0, 3.0], GrowthModel::Linear).is_err());
        assert!(
            detect_divergence(|t: f64| Ok(t), &[1.0, 3.0, 2.0, 4.0], GrowthModel::Linear).is_err()
        );
        assert!(
            detect_divergence(|t: f64| Ok(t), &[1e-5, 1e-4, 1e-3, 1e-2], GrowthModel::Log).is_err()
        );
    }
}
