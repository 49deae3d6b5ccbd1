//! The averaged-eigenvalue statistic
//!
//!   Σ_{p/N∈E} log p Σ_{k≡2δ (4), |k−K|≤H} Σ_f λ_f(p)
//!   ───────────────────────────────────────────────
//!   Σ_{p/N∈E} log p Σ_{k≡2δ (4), |k−K|≤H} dim S_k(1)
//!
//! with N = 𝒩(K), its per-prime terms and the cumulative curve
//! r(t) = t√N·(ratio over p/N ≤ t).
//!
//! The k-sum is taken inside the t-sum of the trace formula, so each prime
//! costs O(√p) regardless of H.

use crate::arith::{analytic_conductor_real, FactorSieve};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::numeric::KahanSum;
use crate::trace::{progression_cosine_sum_from, weight_progression, TraceContext};
use rayon::prelude::*;
use std::f64::consts::PI;

/// dim S_k(SL₂(ℤ)).
pub fn dimension_s_k(k: u32) -> Result<u32> {
    if k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("odd weight {k}")));
    }
    if k < 4 {
        return Ok(0);
    }
    let base = k / 12;
    Ok(if k % 12 == 2 { base - 1 } else { base })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// λ_f(p)
    Unit,
    /// λ_f(p)·√p
    SqrtP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummandDomain {
    /// primes p, weighted by log p
    Primes,
    /// all integers n ≥ 1, weight 1
    Integers,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MurmurationRequest {
    pub delta: u8,
    pub big_k: f64,
    pub big_h: f64,
    pub interval: Interval,
    pub weighting: Weighting,
    pub domain: SummandDomain,
}

impl MurmurationRequest {
    pub fn new(delta: u8, big_k: f64, big_h: f64, interval: Interval) -> Result<Self> {
        let req = Self {
            delta,
            big_k,
            big_h,
            interval,
            weighting: Weighting::Unit,
            domain: SummandDomain::Primes,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn with_weighting(mut self, w: Weighting) -> Self {
        self.weighting = w;
        self
    }

    pub fn with_domain(mut self, d: SummandDomain) -> Self {
        self.domain = d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta > 1 {
            return Err(Error::InvalidArgument(format!("delta must be 0 or 1, got {}", self.delta)));
        }
        if !(self.big_k > 0.0 && self.big_h > 0.0 && self.big_h < self.big_k) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < H < K, got K={}, H={}",
                self.big_k, self.big_h
            )));
        }
        Ok(())
    }

    /// N = 𝒩(K).
    pub fn conductor(&self) -> f64 {
        analytic_conductor_real(self.big_k).value
    }

    /// Largest n with n/N ∈ E.
    pub fn max_n(&self) -> u64 {
        (self.interval.v() * self.conductor()).floor() as u64
    }

    /// Class number bound needed for every discriminant t² − 4n.
    pub fn required_bound(&self) -> u64 {
        4 * self.max_n().max(1)
    }
}

/// One summand n (a prime, or an integer in integers mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub n: u64,
    pub n_over_conductor: f64,
    pub numerator: f64,
    pub denominator: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MurmurationSeries {
    pub conductor: f64,
    pub request: MurmurationRequest,
    pub points: Vec<SeriesPoint>,
    /// r at each point, over all points up to and including it.
    pub cumulative: Vec<f64>,
    pub numerator_total: f64,
    pub denominator_total: f64,
}

/// One value of the cumulative curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub r: f64,
    /// false when no summand has n/N ≤ t (r reported as 0)
    pub populated: bool,
}

impl MurmurationSeries {
    /// Assemble from per-point terms in ascending n.
    pub fn from_points(conductor: f64, request: MurmurationRequest, points: Vec<SeriesPoint>) -> Self {
        let mut num = KahanSum::new();
        let mut den = KahanSum::new();
        let scale = curve_scale(conductor, request.weighting);
        let cumulative = points
            .iter()
            .map(|p| {
                num.add(p.numerator);
                den.add(p.denominator);
                ratio_at(p.n_over_conductor, scale, num.value(), den.value())
            })
            .collect();
        Self {
            conductor,
            request,
            points,
            cumulative,
            numerator_total: num.value(),
            denominator_total: den.value(),
        }
    }

    /// Σ num / Σ den over the whole interval.
    pub fn ratio(&self) -> f64 {
        self.numerator_total / self.denominator_total
    }

    /// r(t) = t·√N·(Σ_{n/N≤t} num)/(Σ_{n/N≤t} den), with the √N dropped
    /// for the √p weighting.
    pub fn cumulative_curve(&self, grid: &[f64]) -> Result<Vec<CurvePoint>> {
        if grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|&t| t <= 0.0) {
            return Err(Error::InvalidArgument("grid must be positive and increasing".into()));
        }
        let scale = curve_scale(self.conductor, self.request.weighting);
        let mut out = Vec::with_capacity(grid.len());
        let mut num = KahanSum::new();
        let mut den = KahanSum::new();
        let mut i = 0;
        for &t in grid {
            while i < self.points.len() && self.points[i].n_over_conductor <= t {
                num.add(self.points[i].numerator);
                den.add(self.points[i].denominator);
                i += 1;
            }
            if i == 0 || den.value() == 0.0 {
                out.push(CurvePoint { t, r: 0.0, populated: false });
            } else {
                out.push(CurvePoint {
                    t,
                    r: ratio_at(t, scale, num.value(), den.value()),
                    populated: true,
                });
            }
        }
        Ok(out)
    }
}

fn curve_scale(conductor: f64, weighting: Weighting) -> f64 {
    match weighting {
        Weighting::Unit => conductor.sqrt(),
        Weighting::SqrtP => 1.0,
    }
}

#[inline]
fn ratio_at(t: f64, scale: f64, num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        t * scale * num / den
    }
}

/// Summands handled per parallel task.
const CHUNK: usize = 256;

/// Evaluate the statistic for `req`.
pub fn compute_series(req: &MurmurationRequest, ctx: &TraceContext) -> Result<MurmurationSeries> {
    req.validate()?;
    let conductor = req.conductor();
    let required = req.required_bound();
    if ctx.table().bound() < required {
        return Err(Error::OutOfRange {
            what: "class number table",
            required,
            available: ctx.table().bound(),
        });
    }
    let l1 = ctx.table().l1_values()?;
    let (k_min, m) = weight_progression(req.big_k, req.big_h, req.delta);
    let dim_total = progression_dimension(k_min, m)?;
    let sieve = ctx.sieve();

    let lo = (req.interval.u() * conductor).ceil().max(1.0) as u64;
    let hi = req.max_n();
    let summands: Vec<u64> = match req.domain {
        SummandDomain::Primes => sieve
            .primes()
            .iter()
            .map(|&p| p as u64)
            .filter(|&p| p >= lo && p <= hi)
            .collect(),
        SummandDomain::Integers => (lo..=hi).collect(),
    };
    let kernel = Kernel {
        req,
        conductor,
        k_min,
        m,
        dim_total,
        l1: &l1,
        sieve,
    };
    let points: Vec<SeriesPoint> = summands
        .par_chunks(CHUNK)
        .map(|chunk| chunk.iter().map(|&n| kernel.point(n)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .filter(|p| req.interval.contains(p.n_over_conductor))
        .collect();
    Ok(MurmurationSeries::from_points(conductor, *req, points))
}

/// Σ_k dim S_k(1) over the weight progression.
pub fn progression_dimension(k_min: i64, m: u64) -> Result<f64> {
    let mut total = 0u64;
    for j in 0..m as i64 {
        total += dimension_s_k((k_min + 4 * j) as u32)? as u64;
    }
    Ok(total as f64)
}

struct Kernel<'a> {
    req: &'a MurmurationRequest,
    conductor: f64,
    k_min: i64,
    m: u64,
    dim_total: f64,
    l1: &'a [f64],
    sieve: &'a FactorSieve,
}

impl Kernel<'_> {
    fn point(&self, n: u64) -> Result<SeriesPoint> {
        let nf = n as f64;
        let (weight, spectral) = match self.req.domain {
            SummandDomain::Primes => (nf.ln(), self.prime_sum(n)),
            SummandDomain::Integers => (1.0, self.integer_sum(n)?),
        };
        let boost = match self.req.weighting {
            Weighting::Unit => 1.0,
            Weighting::SqrtP => nf.sqrt(),
        };
        Ok(SeriesPoint {
            n,
            n_over_conductor: nf / self.conductor,
            numerator: weight * boost * spectral,
            denominator: weight * self.dim_total,
        })
    }

    /// ((−1)^δ/π)·Σ_{t²<4n} L(1, ψ_{t²−4n})·Σ_k cos((k−1)φ_{t,n}).
    fn elliptic(&self, n: u64) -> f64 {
        let sign = if self.req.delta == 0 { 1.0 } else { -1.0 };
        let root = 2.0 * (n as f64).sqrt();
        let mut acc = KahanSum::new();
        let mut t = 0u64;
        while t * t < 4 * n {
            let abs_d = (4 * n - t * t) as usize;
            let phi = (t as f64 / root).asin();
            let c = self.l1[abs_d] * progression_cosine_sum_from(self.k_min, self.m, phi);
            acc.add(if t == 0 { c } else { 2.0 * c });
            t += 1;
        }
        sign / PI * acc.value()
    }

    /// Σ_k Σ_f λ_f(p) = −Σ_k p^{(1−k)/2} + elliptic part.
    fn prime_sum(&self, p: u64) -> f64 {
        let pf = p as f64;
        let mut hyperbolic = 0.0;
        for j in 0..self.m as i64 {
            hyperbolic += pf.powf((1.0 - (self.k_min + 4 * j) as f64) / 2.0);
        }
        self.elliptic(p) - hyperbolic
    }

    /// Σ_k n^{(1−k)/2} Tr T_n with the square and all-divisor terms.
    fn integer_sum(&self, n: u64) -> Result<f64> {
        let nf = n as f64;
        let mut acc = KahanSum::new();
        let s = n.isqrt();
        if s * s == n {
            // Σ_k (k − 1)/(12√n)
            let mf = self.m as f64;
            let k_sum = mf * (self.k_min - 1) as f64 + 4.0 * mf * (mf - 1.0) / 2.0;
            acc.add(k_sum / (12.0 * nf.sqrt()));
        }
        for d in self.sieve.divisors(n)? {
            let (lo, hi) = (d.min(n / d) as f64, d.max(n / d) as f64);
            let r = lo / hi;
            // Σ_k r^{(k−1)/2} for k = k_min + 4j
            let geo = if r == 1.0 {
                self.m as f64
            } else {
                r.powf((self.k_min - 1) as f64 / 2.0) * (1.0 - r.powi(2 * self.m as i32)) / (1.0 - r * r)
            };
            acc.add(-0.5 * geo);
        }
        acc.add(self.elliptic(n));
        Ok(acc.value())
    }
}

/// Σ*_{a ≥ 1, a^{−2} ∈ E, a ≤ a_max} a^{−3}, endpoint terms halved.
pub fn integer_murmuration_nu(interval: &Interval, a_max: u64) -> Result<f64> {
    if a_max == 0 {
        return Err(Error::InvalidArgument("a_max must be at least 1".into()));
    }
    let mut acc = KahanSum::new();
    for a in 1..=a_max {
        let y = 1.0 / (a * a) as f64;
        let on_lo = endpoint_is_inverse_square(&interval.lo, a);
        let on_hi = endpoint_is_inverse_square(&interval.hi, a);
        let inside = on_lo || on_hi || (y > interval.u() && y < interval.v());
        if !inside {
            continue;
        }
        let w = if on_lo || on_hi { 0.5 } else { 1.0 };
        acc.add(w / (a * a * a) as f64);
    }
    Ok(acc.value())
}

fn endpoint_is_inverse_square(e: &crate::interval::Endpoint, a: u64) -> bool {
    matches!(e.square_root_fraction(), Some((aa, 1)) if aa == a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn dimensions() {
        assert_eq!(dimension_s_k(12).unwrap(), 1);
        assert_eq!(dimension_s_k(14).unwrap(), 0);
        assert_eq!(dimension_s_k(24).unwrap(), 2);
        assert_eq!(dimension_s_k(2).unwrap(), 0);
        assert_eq!(dimension_s_k(0).unwrap(), 0);
        assert!(dimension_s_k(7).is_err());
        let ctx = TraceContext::new(10).unwrap();
        for k in (4..=60).step_by(2) {
            let tr = ctx.trace_hecke::<i128>(k, 1).unwrap();
            assert_eq!(tr, dimension_s_k(k).unwrap() as i128, "k={k}");
        }
    }

    #[test]
    fn integer_nu_examples() {
        let e: Interval = "1/4:4".parse().unwrap();
        assert!((integer_murmuration_nu(&e, 100).unwrap() - 1.0625).abs() < 1e-15);
        let e: Interval = "2:3".parse().unwrap();
        assert_eq!(integer_murmuration_nu(&e, 100).unwrap(), 0.0);
        let e: Interval = "0.9:1.1".parse().unwrap();
        assert_eq!(integer_murmuration_nu(&e, 100).unwrap(), 1.0);
    }

    #[test]
    fn request_validation() {
        let e: Interval = "0:2".parse().unwrap();
        assert!(MurmurationRequest::new(2, 100.0, 10.0, e).is_err());
        assert!(MurmurationRequest::new(0, 100.0, 100.0, e).is_err());
        let req = MurmurationRequest::new(0, 600.0, 60.0, e).unwrap();
        let small = TraceContext::new(100).unwrap();
        match compute_series(&req, &small) {
            Err(Error::OutOfRange { required, .. }) => assert_eq!(required, req.required_bound()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exchange_of_summation() {
        let e: Interval = "1/2:2".parse().unwrap();
        let req = MurmurationRequest::new(0, 60.0, 20.0, e).unwrap();
        let ctx = TraceContext::new(req.max_n() + 10).unwrap();
        let series = compute_series(&req, &ctx).unwrap();
        assert!(!series.points.is_empty());
        let n_cond = req.conductor();
        let mut num = 0.0;
        let mut den = 0.0;
        for &p in ctx.sieve().primes() {
            let p = p as u64;
            let y = p as f64 / n_cond;
            if !(0.5..=2.0).contains(&y) {
                continue;
            }
            for k in (4..=80u32).step_by(4) {
                if (k as f64 - 60.0).abs() > 20.0 {
                    continue;
                }
                let tr = ctx.trace_hecke::<BigInt>(k, p).unwrap();
                let lam = crate::trace::ExactInt::to_f64(&tr) * (p as f64).powf((1.0 - k as f64) / 2.0);
                num += (p as f64).ln() * lam;
                den += (p as f64).ln() * dimension_s_k(k).unwrap() as f64;
            }
        }
        assert!((series.numerator_total - num).abs() <= 1e-6 * num.abs(), "{} vs {num}", series.numerator_total);
        assert!((series.denominator_total - den).abs() <= 1e-12 * den);
    }

    #[test]
    fn integers_mode_matches_trace() {
        let e: Interval = "1/2:2".parse().unwrap();
        let req = MurmurationRequest::new(1, 60.0, 20.0, e)
            .unwrap()
            .with_domain(SummandDomain::Integers);
        let ctx = TraceContext::new(req.max_n() + 10).unwrap();
        let series = compute_series(&req, &ctx).unwrap();
        for pt in &series.points {
            let mut expect = 0.0;
            for k in (42..=80u32).step_by(4) {
                expect += ctx.eigenvalue_sum(k, pt.n).unwrap();
            }
            assert!((pt.numerator - expect).abs() < 1e-9 * expect.abs().max(1.0), "n={}", pt.n);
        }
    }

    #[test]
    fn scale_covariance() {
        let e: Interval = "0:3".parse().unwrap();
        let req = MurmurationRequest::new(0, 200.0, 40.0, e).unwrap();
        let ctx = TraceContext::new(req.max_n()).unwrap();
        let series = compute_series(&req, &ctx).unwrap();
        let doubled: Vec<SeriesPoint> = series
            .points
            .iter()
            .map(|p| SeriesPoint {
                numerator: 2.0 * p.numerator,
                denominator: 2.0 * p.denominator,
                ..*p
            })
            .collect();
        let again = MurmurationSeries::from_points(series.conductor, req, doubled);
        for (a, b) in series.cumulative.iter().zip(&again.cumulative) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn empty_prefix_of_curve() {
        let e: Interval = "0:2".parse().unwrap();
        let req = MurmurationRequest::new(0, 200.0, 40.0, e).unwrap();
        let ctx = TraceContext::new(req.max_n()).unwrap();
        let series = compute_series(&req, &ctx).unwrap();
        let curve = series.cumulative_curve(&[1e-6, 1.0, 2.0]).unwrap();
        assert!(!curve[0].populated);
        assert_eq!(curve[0].r, 0.0);
        assert!(curve[1].populated && curve[1].r.is_finite());
        assert!(series.cumulative_curve(&[1.0, 0.5]).is_err());
    }

    #[test]
    fn single_prime_against_q_expansion() {
        let e = Interval::new(0.0, 1.0).unwrap();
        let req = MurmurationRequest::new(0, 16.0, 3.0, e).unwrap();
        let ctx = TraceContext::new(100).unwrap();
        let l1 = ctx.table().l1_values().unwrap();
        let (k_min, m) = weight_progression(16.0, 3.0, 0);
        assert_eq!((k_min, m), (16, 1));
        let kernel = Kernel {
            req: &req,
            conductor: req.conductor(),
            k_min,
            m,
            dim_total: 1.0,
            l1: &l1,
            sieve: ctx.sieve(),
        };
        let pt = kernel.point(5).unwrap();
        let f = crate::qexp::newform_qexp(16, 6).unwrap();
        let a5: f64 = num_traits::ToPrimitive::to_f64(f.coeff(5)).unwrap();
        let expect = 5f64.ln() * a5 / 5f64.powf(7.5);
        assert!((pt.numerator - expect).abs() < 1e-12 * expect.abs());
    }
}
