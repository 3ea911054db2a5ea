//! Similarity kernels over sparse feature vectors: Euclidean distance, cosine
//! similarity, and the triangle-area / sector-area product (TS-SS).
//!
//! Angles are in degrees. θ′ is the angle between two vectors plus 10°, so it
//! is never zero and the triangle area stays informative for parallel
//! vectors. Sines are always evaluated in radians.
//!
//! Every kernel is symmetric bit-for-bit: dot products and squared
//! differences are accumulated in ascending index order over the same set of
//! indices regardless of argument order.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("dimension mismatch: {left} vs {right}")]
pub struct DimensionMismatch {
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LowerIsCloser,
    HigherIsCloser,
}

impl Direction {
    /// Whether `candidate` beats `incumbent` strictly.
    pub fn improves(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Direction::LowerIsCloser => candidate < incumbent,
            Direction::HigherIsCloser => candidate > incumbent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "ed")]
    Euclidean,
    #[serde(rename = "cs")]
    Cosine,
    #[serde(rename = "tsss")]
    TsSs,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Euclidean, MetricKind::Cosine, MetricKind::TsSs];

    pub fn direction(self) -> Direction {
        match self {
            MetricKind::Euclidean | MetricKind::TsSs => Direction::LowerIsCloser,
            MetricKind::Cosine => Direction::HigherIsCloser,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "ed",
            MetricKind::Cosine => "cs",
            MetricKind::TsSs => "tsss",
        }
    }

    pub fn score(self, x: &FeatureVector, y: &FeatureVector) -> Result<f64, DimensionMismatch> {
        check(x, y)?;
        Ok(self.score_unchecked(x, y))
    }

    /// Score without the dimension check; callers guarantee equal dimensions.
    pub(crate) fn score_unchecked(self, x: &FeatureVector, y: &FeatureVector) -> f64 {
        match self {
            MetricKind::Euclidean => ed(x, y),
            MetricKind::Cosine => cs(x, y),
            MetricKind::TsSs => tsss(x, y),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ed" | "euclidean" => Ok(MetricKind::Euclidean),
            "cs" | "cosine" => Ok(MetricKind::Cosine),
            "tsss" | "ts_ss" | "ts-ss" => Ok(MetricKind::TsSs),
            other => Err(format!("unknown metric {other:?} (expected ed, cs or tsss)")),
        }
    }
}

fn check(x: &FeatureVector, y: &FeatureVector) -> Result<(), DimensionMismatch> {
    if x.dim() == y.dim() {
        Ok(())
    } else {
        Err(DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        })
    }
}

/// Sum of products over shared indices, walking the shorter entry list and
/// binary-searching the longer one.
pub fn dot(x: &FeatureVector, y: &FeatureVector) -> f64 {
    let (short, long) = if x.entries().len() <= y.entries().len() {
        (x.entries(), y.entries())
    } else {
        (y.entries(), x.entries())
    };
    let mut sum = 0.0;
    let mut lo = 0;
    for &(i, a) in short {
        match long[lo..].binary_search_by_key(&i, |&(j, _)| j) {
            Ok(k) => {
                sum += a * long[lo + k].1;
                lo += k + 1;
            }
            Err(k) => lo += k,
        }
        if lo >= long.len() {
            break;
        }
    }
    sum
}

fn ed(x: &FeatureVector, y: &FeatureVector) -> f64 {
    let (a, b) = (x.entries(), y.entries());
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < a.len() && j < b.len() {
        let d = match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                i += 1;
                a[i - 1].1
            }
            std::cmp::Ordering::Greater => {
                j += 1;
                b[j - 1].1
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
                a[i - 1].1 - b[j - 1].1
            }
        };
        sum += d * d;
    }
    for &(_, w) in a[i..].iter().chain(&b[j..]) {
        sum += w * w;
    }
    sum.sqrt()
}

fn cs(x: &FeatureVector, y: &FeatureVector) -> f64 {
    let denom = x.magnitude() * y.magnitude();
    if denom == 0.0 {
        return 0.0;
    }
    (dot(x, y) / denom).clamp(-1.0, 1.0)
}

fn theta(x: &FeatureVector, y: &FeatureVector) -> f64 {
    cs(x, y).acos().to_degrees() + 10.0
}

fn ts_with(x: &FeatureVector, y: &FeatureVector, theta_deg: f64) -> f64 {
    x.magnitude() * y.magnitude() * theta_deg.to_radians().sin() / 2.0
}

fn ss_with(x: &FeatureVector, y: &FeatureVector, theta_deg: f64) -> f64 {
    let r = ed(x, y) + (x.magnitude() - y.magnitude()).abs();
    PI * r * r * theta_deg / 360.0
}

fn tsss(x: &FeatureVector, y: &FeatureVector) -> f64 {
    let t = theta(x, y);
    ts_with(x, y, t) * ss_with(x, y, t)
}

pub fn euclidean(x: &FeatureVector, y: &FeatureVector) -> Result<f64, DimensionMismatch> {
    check(x, y)?;
    Ok(ed(x, y))
}

/// Cosine similarity clamped to `[-1, 1]`; zero when either vector is zero.
pub fn cosine(x: &FeatureVector, y: &FeatureVector) -> Result<f64, DimensionMismatch> {
    check(x, y)?;
    Ok(cs(x, y))
}

/// `arccos(cosine)` in degrees plus 10, within `[10, 190]`.
pub fn theta_prime(x: &FeatureVector, y: &FeatureVector) -> Result<f64, DimensionMismatch> {
    check(x, y)?;
    Ok(theta(x, y))
}

/// `|x| |y| sin θ′ / 2`.
pub fn triangle_area(x: &FeatureVector, y: &FeatureVector) -> Result<f64, DimensionMismatch> {
    check(x, y)?;
    Ok(ts_with(x, y, theta(x, y)))
}

/// `π (ED + ||x| - |y||)² θ′ / 360`.
pub fn sector_area(x: &FeatureVector, y: &FeatureVector) -> Result<f64, DimensionMismatch> {
    check(x, y)?;
    Ok(ss_with(x, y, theta(x, y)))
}

pub fn ts_ss(x: &FeatureVector, y: &FeatureVector) -> Result<f64, DimensionMismatch> {
    check(x, y)?;
    Ok(tsss(x, y))
}
