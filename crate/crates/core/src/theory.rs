//! Nearest-neighbour distance in the uniform unit-ball model.
//!
//! For `n` points drawn uniformly from the `m`-dimensional unit ball, the median
//! distance from the origin to the closest point is `(1 - 0.5^(1/n))^(1/m)`.
//! Inverting for `n` gives the sample size needed to keep that median at `d`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("distance must lie strictly between 0 and 1, got {0}")]
    DistanceOutOfRange(f64),
    #[error("d^M underflows to zero for d = {d}, M = {m}; the required sample count is not representable")]
    Underflow { d: f64, m: u32 },
}

pub fn median_nn_distance(m: u32, n: u64) -> Result<f64, TheoryError> {
    if m == 0 {
        return Err(TheoryError::ZeroDimension);
    }
    if n == 0 {
        return Err(TheoryError::ZeroSamples);
    }
    // 1 - 2^(-1/n), without cancellation for large n.
    let inner = -(-std::f64::consts::LN_2 / n as f64).exp_m1();
    Ok(inner.powf(1.0 / m as f64))
}

/// Unrounded `log_{1 - d^m}(1/2)`.
pub fn required_points(d: f64, m: u32) -> Result<f64, TheoryError> {
    if m == 0 {
        return Err(TheoryError::ZeroDimension);
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(TheoryError::DistanceOutOfRange(d));
    }
    let dm = d.powi(m as i32);
    if dm == 0.0 {
        return Err(TheoryError::Underflow { d, m });
    }
    Ok(-std::f64::consts::LN_2 / (-dm).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(median_nn_distance(1, 1).unwrap(), 0.5);
        let d = median_nn_distance(1, 3).unwrap();
        // 1 - 0.5^(1/3), 30-digit reference value.
        assert!((d - 0.206_299_474_015_900_26).abs() < 1e-15);
        assert_eq!((d * 100.0).round() / 100.0, 0.21);
    }

    #[test]
    fn distance_grows_with_dimension() {
        for n in [1, 2, 10, 100, 10_000] {
            let mut prev = 0.0;
            for m in 1..=50 {
                let d = median_nn_distance(m, n).unwrap();
                assert!(d > prev && d < 1.0, "m={m} n={n}");
                prev = d;
            }
        }
    }

    #[test]
    fn required_points_anchors() {
        let n1 = required_points(0.21, 1).unwrap();
        assert!((n1 - 2.940_524_006_385_626_8).abs() < 1e-12);
        assert_eq!(n1.ceil(), 3.0);
        let n3 = required_points(0.21, 3).unwrap();
        assert!((n3 - 74.5).abs() <= 0.5);
        let n10 = required_points(0.21, 10).unwrap();
        assert!((n10 - 4_155_587.0).abs() <= 1.0);
        // 30-digit reference: 4155587.94249046...
        assert!((n10 - 4_155_587.942_490_465).abs() < 1e-6);
    }

    #[test]
    fn invalid_arguments() {
        assert_eq!(median_nn_distance(0, 1), Err(TheoryError::ZeroDimension));
        assert_eq!(median_nn_distance(1, 0), Err(TheoryError::ZeroSamples));
        assert_eq!(required_points(0.5, 0), Err(TheoryError::ZeroDimension));
        for d in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                required_points(d, 2),
                Err(TheoryError::DistanceOutOfRange(_))
            ));
        }
        assert!(matches!(
            required_points(1e-200, 4),
            Err(TheoryError::Underflow { .. })
        ));
    }

    #[test]
    fn inverse_consistency() {
        for m in 1..=10 {
            for n in (1..=1000).step_by(37).chain([1000]) {
                let d = median_nn_distance(m, n).unwrap();
                let back = required_points(d, m).unwrap();
                assert!(
                    ((back - n as f64) / n as f64).abs() < 1e-6,
                    "m={m} n={n} back={back}"
                );
            }
        }
    }
}
