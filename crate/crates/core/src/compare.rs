//! Comparison of a murmuration curve r(t) with (−1)^δ ν([0, t]).

use crate::error::{Error, Result};
use crate::numeric::pearson;

/// Tolerance when matching grid points.
const GRID_SLACK: f64 = 1e-9;

/// Samples y(t) on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

impl Curve {
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != y.len() || t.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "curve needs matching nonempty columns, got {} and {}",
                t.len(),
                y.len()
            )));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("curve grid must be strictly increasing".into()));
        }
        Ok(Self { t, y })
    }

    fn slack(&self) -> f64 {
        GRID_SLACK * self.t.last().unwrap().abs().max(1.0)
    }

    /// Step interpolation: the value at the last grid point ≤ x.
    pub fn step_at(&self, x: f64) -> Option<f64> {
        let slack = self.slack();
        if x < self.t[0] - slack || x > *self.t.last().unwrap() + slack {
            return None;
        }
        let i = self.t.partition_point(|&s| s <= x + slack);
        Some(self.y[i.max(1) - 1])
    }

    pub fn resample(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter()
            .map(|&x| {
                self.step_at(x).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "grid point {x} outside [{}, {}]",
                        self.t[0],
                        self.t.last().unwrap()
                    ))
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub points: usize,
    /// (−1)^δ applied to the ν side.
    pub sign: f64,
    pub max_abs_deviation: f64,
    /// t and r(t) − sign·ν([0, t]) there.
    pub deviation_at: (f64, f64),
    pub pearson: Option<f64>,
}

/// Compare r against sign·ν on the grid of r, with ν step-resampled.
pub fn compare(murmur: &Curve, nu: &Curve, sign: f64, at: f64) -> Result<Comparison> {
    let target: Vec<f64> = nu.resample(&murmur.t)?.into_iter().map(|v| sign * v).collect();
    let max_abs_deviation = murmur
        .y
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let r_at = murmur
        .step_at(at)
        .ok_or_else(|| Error::InvalidArgument(format!("t = {at} is outside the murmuration grid")))?;
    let nu_at = nu
        .step_at(at)
        .ok_or_else(|| Error::InvalidArgument(format!("t = {at} is outside the ν grid")))?;
    Ok(Comparison {
        points: murmur.t.len(),
        sign,
        max_abs_deviation,
        deviation_at: (at, r_at - sign * nu_at),
        pearson: pearson(&murmur.y, &target),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(n: usize, f: impl Fn(f64) -> f64) -> Curve {
        let t: Vec<f64> = (1..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
        let y = t.iter().map(|&x| f(x)).collect();
        Curve::new(t, y).unwrap()
    }

    #[test]
    fn identical_curves() {
        let c = curve(100, |x| x.ln_1p());
        let r = compare(&c, &c, 1.0, 2.0).unwrap();
        assert_eq!(r.max_abs_deviation, 0.0);
        assert_eq!(r.deviation_at.1, 0.0);
        assert!((r.pearson.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_adjustment() {
        let nu = curve(100, |x| x * x);
        let r = curve(100, |x| -x * x);
        let c = compare(&r, &nu, -1.0, 2.0).unwrap();
        assert_eq!(c.max_abs_deviation, 0.0);
        assert!(compare(&r, &nu, 1.0, 2.0).unwrap().pearson.unwrap() < -0.99);
    }

    #[test]
    fn step_resampling() {
        let nu = curve(4, |x| x);
        assert_eq!(nu.step_at(0.5), Some(0.5));
        assert_eq!(nu.step_at(0.99), Some(0.5));
        assert_eq!(nu.step_at(1.0), Some(1.0));
        assert_eq!(nu.step_at(1.0 - 1e-12), Some(1.0));
        assert_eq!(nu.step_at(2.5), None);
        let r = curve(10, |x| x);
        assert!(compare(&r, &curve(4, |x| x), 1.0, 2.0).is_err());
        let wide = Curve::new((0..=40).map(|i| i as f64 / 10.0).collect(), (0..=40).map(|i| i as f64 / 10.0).collect()).unwrap();
        let c = compare(&r, &wide, 1.0, 2.0).unwrap();
        assert!(c.max_abs_deviation < 0.1 + 1e-12);
    }

    #[test]
    fn rejects_bad_curves() {
        assert!(Curve::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Curve::new(vec![1.0], vec![]).is_err());
    }
}
