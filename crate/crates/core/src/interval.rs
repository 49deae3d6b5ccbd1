//! Closed intervals [u, v] whose endpoints may be exact rationals.
//!
//! Atoms of ν sit at y = (q/a)², so an endpoint only carries an atom when it
//! is given exactly. Floating endpoints are treated as irrational.

use crate::error::{Error, Result};
use num_integer::Roots;
use num_rational::Ratio;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Exact(Ratio<i64>),
    Float(f64),
}

impl Endpoint {
    pub fn value(&self) -> f64 {
        match self {
            Endpoint::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Endpoint::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<Ratio<i64>> {
        match self {
            Endpoint::Exact(r) => Some(*r),
            Endpoint::Float(_) => None,
        }
    }

    /// If the endpoint is y = (q/a)² with gcd(a, q) = 1, return (a, q).
    pub fn square_root_fraction(&self) -> Option<(u64, u64)> {
        let r = self.exact()?;
        if *r.numer() <= 0 {
            return None;
        }
        let (n, d) = (*r.numer() as u64, *r.denom() as u64);
        let (q, a) = (n.sqrt(), d.sqrt());
        (q * q == n && a * a == d).then_some((a, q))
    }

    pub fn is_zero(&self) -> bool {
        self.value() == 0.0
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Endpoint::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Endpoint::Float(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Endpoint {
    type Err = Error;

    /// "3", "1/4" are exact; anything with a decimal point or exponent is a float.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse endpoint '{s}'"));
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(Endpoint::Exact(Ratio::new(n, d)));
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Endpoint::Exact(Ratio::from_integer(n)));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(bad());
        }
        Ok(Endpoint::Float(x))
    }
}

impl From<f64> for Endpoint {
    fn from(x: f64) -> Self {
        Endpoint::Float(x)
    }
}

impl From<Ratio<i64>> for Endpoint {
    fn from(r: Ratio<i64>) -> Self {
        Endpoint::Exact(r)
    }
}

/// E = [u, v] with 0 ≤ u < v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl Interval {
    pub fn new(lo: impl Into<Endpoint>, hi: impl Into<Endpoint>) -> Result<Self> {
        let (lo, hi) = (lo.into(), hi.into());
        if !(lo.value() >= 0.0 && lo.value() < hi.value()) {
            return Err(Error::InvalidArgument(format!("need 0 ≤ u < v, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn exact(lo: (i64, i64), hi: (i64, i64)) -> Result<Self> {
        Self::new(Ratio::new(lo.0, lo.1), Ratio::new(hi.0, hi.1))
    }

    pub fn u(&self) -> f64 {
        self.lo.value()
    }

    pub fn v(&self) -> f64 {
        self.hi.value()
    }

    pub fn length(&self) -> f64 {
        self.v() - self.u()
    }

    pub fn contains(&self, y: f64) -> bool {
        y >= self.u() && y <= self.v()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// "u:v", e.g. "1/4:4" or "0:2".
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("interval '{s}' is not of the form u:v")))?;
        Interval::new(a.parse::<Endpoint>()?, b.parse::<Endpoint>()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        let e: Interval = "1/4:4".parse().unwrap();
        assert_eq!(e.lo, Endpoint::Exact(Ratio::new(1, 4)));
        assert_eq!(e.hi, Endpoint::Exact(Ratio::from_integer(4)));
        assert_eq!(e.length(), 3.75);
        let f: Interval = "0.5:2.0".parse().unwrap();
        assert_eq!(f.lo, Endpoint::Float(0.5));
        assert!("2:1".parse::<Interval>().is_err());
        assert!("1/0:2".parse::<Interval>().is_err());
        assert!("x".parse::<Interval>().is_err());
        assert_eq!(e.to_string(), "1/4:4");
    }

    #[test]
    fn atoms_at_endpoints() {
        let e: Endpoint = "1/4".parse().unwrap();
        assert_eq!(e.square_root_fraction(), Some((2, 1)));
        let e: Endpoint = "9/4".parse().unwrap();
        assert_eq!(e.square_root_fraction(), Some((2, 3)));
        let e: Endpoint = "2".parse().unwrap();
        assert_eq!(e.square_root_fraction(), None);
        assert_eq!(Endpoint::Float(0.25).square_root_fraction(), None);
    }
}
