use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

use super::JumpPath;

/// Left-continuous piecewise-constant process `a_s ∈ [0, 1]`.
///
/// With breakpoints `b_1 < … < b_k` and values `v_0, …, v_k`, the control
/// equals `v_j` on `(b_j, b_{j+1}]` (with `b_0 = 0` and `b_{k+1} = ∞`), so a
/// jump at exactly `b_j` sees the value from the left.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictableControl<T> {
    breaks: Vec<T>,
    values: Vec<T>,
}

fn check_value<T: Scalar>(v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidControl(format!("value {v} outside [0, 1]")))
    }
}

impl<T: Scalar> PredictableControl<T> {
    pub fn piecewise(breaks: Vec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidControl(format!(
                "{} breakpoints need {} values, got {}",
                breaks.len(),
                breaks.len() + 1,
                values.len()
            )));
        }
        for &v in &values {
            check_value(v)?;
        }
        let mut prev = -T::one();
        for &b in &breaks {
            if !(b.is_finite() && b >= T::zero() && b > prev) {
                return Err(Error::InvalidControl(format!(
                    "breakpoints must be finite, >= 0 and strictly increasing; got {b}"
                )));
            }
            prev = b;
        }
        Ok(Self { breaks, values })
    }

    pub fn constant(a: T) -> Result<Self> {
        Self::piecewise(Vec::new(), vec![a])
    }

    /// `1_{s > t0}`: zero on `[0, t0]`, one afterwards.
    pub fn indicator_after(t0: T) -> Result<Self> {
        Self::piecewise(vec![t0], vec![T::zero(), T::one()])
    }

    pub fn zero() -> Self {
        Self {
            breaks: Vec::new(),
            values: vec![T::zero()],
        }
    }

    pub fn one() -> Self {
        Self {
            breaks: Vec::new(),
            values: vec![T::one()],
        }
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value_at(&self, t: T) -> T {
        self.values[self.breaks.partition_point(|&b| b < t)]
    }

    pub fn as_constant(&self) -> Option<T> {
        let first = self.values[0];
        self.values.iter().all(|&v| v == first).then_some(first)
    }

    /// `(lo, hi, value)` triples covering `[0, ∞)`; `hi = None` is unbounded.
    pub fn segments(&self) -> Vec<(T, Option<T>, T)> {
        let mut out = Vec::with_capacity(self.values.len());
        let mut lo = T::zero();
        for (i, &v) in self.values.iter().enumerate() {
            let hi = self.breaks.get(i).copied();
            out.push((lo, hi, v));
            if let Some(h) = hi {
                lo = h;
            }
        }
        out
    }

    /// `1 - a`.
    pub fn complement(&self) -> Self {
        Self {
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|&v| T::one() - v).collect(),
        }
    }

    /// `alpha * a + (1 - alpha) * b` on the merged breakpoints.
    pub fn affine(alpha: T, a: &Self, b: &Self) -> Result<Self> {
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return Err(Error::InvalidControl(format!(
                "weight {alpha} outside [0, 1]"
            )));
        }
        let mut breaks: Vec<T> = a.breaks.iter().chain(b.breaks.iter()).copied().collect();
        breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        breaks.dedup();
        // each merged segment is represented by its right end (or beyond the last break)
        let mut values: Vec<T> = breaks
            .iter()
            .map(|&bk| alpha * a.value_at(bk) + (T::one() - alpha) * b.value_at(bk))
            .collect();
        let tail = |c: &Self| *c.values.last().expect("nonempty");
        values.push(alpha * tail(a) + (T::one() - alpha) * tail(b));
        for v in values.iter_mut() {
            *v = v.max(T::zero()).min(T::one());
        }
        Self::piecewise(breaks, values)
    }
}

impl<T: Scalar> fmt::Display for PredictableControl<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.as_constant() {
            return write!(f, "{a}");
        }
        if self.breaks.len() == 1 && self.values[0] == T::zero() && self.values[1] == T::one() {
            return write!(f, "indicator:{}", self.breaks[0]);
        }
        let join = |xs: &[T]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "piecewise:{}|{}", join(&self.breaks), join(&self.values))
    }
}

fn parse_scalar<T: Scalar>(s: &str) -> Result<T> {
    s.trim()
        .parse::<f64>()
        .map(T::of)
        .map_err(|_| Error::Parse(format!("'{s}' is not a number")))
}

fn parse_list<T: Scalar>(s: &str) -> Result<Vec<T>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_scalar).collect()
}

/// Grammar: `<a>` | `const:<a>` | `indicator:<t0>` | `piecewise:<b1,..,bk>|<v0,..,vk>`.
impl<T: Scalar> FromStr for PredictableControl<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("indicator:") {
            return Self::indicator_after(parse_scalar(rest)?);
        }
        if let Some(rest) = s.strip_prefix("const:") {
            return Self::constant(parse_scalar(rest)?);
        }
        if let Some(rest) = s.strip_prefix("piecewise:") {
            let (b, v) = rest
                .split_once('|')
                .ok_or_else(|| Error::Parse(format!("piecewise control '{s}' needs '|'")))?;
            return Self::piecewise(parse_list(b)?, parse_list(v)?);
        }
        Self::constant(parse_scalar(s)?)
    }
}

/// `∫_0^t a_s dM_s` for a piecewise-constant control, exact on each segment.
pub fn integrate_control<T: Scalar>(
    path: &JumpPath<T>,
    a: &PredictableControl<T>,
    t: T,
) -> Result<T> {
    path.check_time(t)?;
    let mut acc = CompensatedSum::new();
    for j in path.jumps_until(t) {
        acc.add_product(a.value_at(j.t), j.dm);
    }
    for (lo, hi, v) in a.segments() {
        if lo >= t {
            break;
        }
        let end = hi.map_or(t, |h| h.min(t));
        let increment = path.drift_at(end) - path.drift_at(lo);
        if increment != T::zero() {
            acc.add_product(v, increment);
        }
    }
    Ok(acc.value())
}
