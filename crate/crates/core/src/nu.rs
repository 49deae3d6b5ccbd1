//! The limiting measure ν and its companions.
//!
//! ν has atoms of mass μ(q)²(q/a)³/(ζ(2)φ(q)²σ(q)) at y = (q/a)², and the
//! equivalent Fourier form ½Σ_t (C f(t)/ζ(2)) ∫_E cos(2πt/√y) dy. The quartic
//! weight gives ν♯ with dν♯ = √y dν. Also here: the jump function S(α), its
//! Fourier series, and a numeric check of the major-arc main term
//! μ(q)²/(φ(q)²σ(q))·x·W(xθ).

use crate::arith::FactorSieve;
use crate::classnum::LocalAverageL1;
use crate::error::{Error, Result};
use crate::interval::{Endpoint, Interval};
use crate::numeric::{zeta_tail, CompositeRule, KahanSum, ZETA2};
use crate::window::WindowFunction;
use num_integer::{Integer, Roots};
use num_rational::Ratio;
use rayon::prelude::*;
use std::f64::consts::PI;

const CHUNK: usize = 512;

/// Above this value of 2πt·s the y-integral is taken from its asymptotic
/// expansion in 1/(2πt).
const ASYMPTOTIC_THRESHOLD: f64 = 40.0;

/// Multiple of x at which the t-sum of the main-term check is cut.
pub const PROP_CIRCLE_SPAN: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuWeight {
    /// ν, atoms weighted by (q/a)³.
    Cubic,
    /// ν♯, atoms weighted by (q/a)⁴.
    Quartic,
}

impl NuWeight {
    fn exponent(self) -> i32 {
        match self {
            NuWeight::Cubic => 3,
            NuWeight::Quartic => 4,
        }
    }
}

/// An atom lying on an endpoint of E, counted with half its mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointTerm {
    pub a: u64,
    pub q: u64,
    pub halved: bool,
    /// The contribution actually included.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalValue {
    pub value: f64,
    pub q_max: u64,
    /// Mean mass of the atoms with q > q_max.
    pub tail_estimate: f64,
    /// q_max · tail_estimate.
    pub tail_constant: f64,
    pub endpoint_terms: Vec<EndpointTerm>,
}

/// How the t-sum of the Fourier form is cut at t_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    /// Plain partial sum over |t| ≤ t_max.
    Sharp,
    /// Terms weighted by W(t/t_max), then extrapolated as 2·S(t_max) − S(t_max/2)
    /// to cancel the 1/t_max bias of atoms sitting on an endpoint.
    Smooth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierValue {
    pub value: f64,
    pub t_max: u64,
    pub quad_tol: f64,
    pub cutoff: Cutoff,
    /// Sharp: the envelope (|g(s₁)| + |g(s₂)|)/(2πζ(2)T) of the first
    /// omitted terms. Smooth: the change from t_max/2 to t_max.
    pub truncation_estimate: f64,
    /// Accumulated quadrature error estimate.
    pub quadrature_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NuEvaluation {
    pub interval: Interval,
    pub weight: NuWeight,
    pub rational: RationalValue,
    pub fourier: Option<FourierValue>,
}

impl RationalValue {
    /// The truncated sum plus the mean mass of the omitted atoms.
    pub fn corrected(&self) -> f64 {
        self.value + self.tail_estimate
    }
}

impl NuEvaluation {
    pub fn difference(&self) -> Option<f64> {
        self.fourier.as_ref().map(|f| (self.rational.value - f.value).abs())
    }

    /// Twice the truncation estimates of both forms, plus quadrature error.
    pub fn combined_bound(&self) -> f64 {
        let (t, q) = self
            .fourier
            .as_ref()
            .map_or((0.0, 0.0), |f| (f.truncation_estimate, f.quadrature_error));
        2.0 * (self.rational.tail_estimate + t) + q
    }
}

/// Value of the jump function with the atom at α, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpValue {
    pub value: f64,
    pub atom: f64,
}

impl JumpValue {
    /// S*(α), the endpoint atom halved.
    pub fn star(&self) -> f64 {
        self.value - 0.5 * self.atom
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropCircle {
    pub lhs: f64,
    pub main_term: f64,
    pub residual: f64,
    pub t_max: u64,
}

/// Shared arithmetic for all ν computations: one sieve for factoring q and t
/// and for the Euler product C.
#[derive(Debug, Clone)]
pub struct NuContext {
    l1: LocalAverageL1,
    window: WindowFunction,
}

impl NuContext {
    /// The bound must cover every q_max and t_max that will be asked for.
    pub fn new(bound: u64) -> Result<Self> {
        Ok(Self {
            l1: LocalAverageL1::with_bound(bound.max(1_000_000))?,
            window: WindowFunction::new(),
        })
    }

    pub fn from_l1(l1: LocalAverageL1) -> Self {
        Self {
            l1,
            window: WindowFunction::new(),
        }
    }

    pub fn l1(&self) -> &LocalAverageL1 {
        &self.l1
    }

    fn sieve(&self) -> &FactorSieve {
        self.l1.sieve()
    }

    fn check(&self, what: &'static str, n: u64) -> Result<()> {
        let available = self.sieve().bound();
        if n > available {
            return Err(Error::OutOfRange {
                what,
                required: n,
                available,
            });
        }
        Ok(())
    }

    /// μ²/(φ²σ) for squarefree q, with the squarefree divisors of q.
    fn atom_weight(&self, q: u64) -> Result<Option<(f64, Vec<(u64, i64)>)>> {
        let primes = self.sieve().factorize(q)?;
        if primes.iter().any(|&(_, e)| e > 1) {
            return Ok(None);
        }
        let (mut phi, mut sigma) = (1.0, 1.0);
        let mut divisors = vec![(1u64, 1i64)];
        for &(p, _) in &primes {
            phi *= (p - 1) as f64;
            sigma *= (p + 1) as f64;
            let more: Vec<_> = divisors.iter().map(|&(d, m)| (d * p, -m)).collect();
            divisors.extend(more);
        }
        Ok(Some((1.0 / (phi * phi * sigma), divisors)))
    }

    /// ν(E) or ν♯(E) summed over squarefree q ≤ q_max.
    pub fn nu_rational(&self, e: &Interval, q_max: u64, weight: NuWeight) -> Result<RationalValue> {
        if q_max == 0 {
            return Err(Error::InvalidArgument("q_max must be at least 1".into()));
        }
        self.check("q_max", q_max)?;
        let w = weight.exponent();
        let lo_atom = e.hi.square_root_fraction();
        let hi_atom = if e.lo.is_zero() { None } else { e.lo.square_root_fraction() };
        let qs: Vec<u64> = (1..=q_max).collect();
        let chunks: Vec<Result<(KahanSum, KahanSum, Vec<EndpointTerm>)>> = qs
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = KahanSum::new();
                let mut density = KahanSum::new();
                let mut terms = Vec::new();
                for &q in chunk {
                    let Some((base, divisors)) = self.atom_weight(q)? else {
                        continue;
                    };
                    density.add(base * self.sieve().euler_phi(q)? as f64);
                    let lo = lower_numerator(&e.hi, q);
                    let hi = if e.lo.is_zero() { None } else { Some(upper_numerator(&e.lo, q)) };
                    if hi.is_some_and(|h| h < lo) {
                        continue;
                    }
                    let coeff = base * (q as f64).powi(w);
                    let mut s = KahanSum::new();
                    for &(g, mu) in &divisors {
                        let b_lo = lo.div_ceil(g).max(1);
                        let tail = match hi {
                            Some(h) if h / g < b_lo => continue,
                            Some(h) => zeta_tail(w as f64, b_lo) - zeta_tail(w as f64, h / g + 1),
                            None => zeta_tail(w as f64, b_lo),
                        };
                        s.add(mu as f64 * (g as f64).powi(-w) * tail);
                    }
                    acc.add(coeff * s.value());
                    for (a, aq) in [lo_atom, hi_atom].into_iter().flatten() {
                        if aq == q {
                            let mass = 0.5 * coeff * (a as f64).powi(-w);
                            acc.add(-mass);
                            terms.push(EndpointTerm { a, q, halved: true, mass });
                        }
                    }
                }
                Ok((acc, density, terms))
            })
            .collect();
        let mut acc = KahanSum::new();
        let mut density = KahanSum::new();
        let mut endpoint_terms = Vec::new();
        for c in chunks {
            let (a, d, t) = c?;
            acc.add(a.value());
            density.add(d.value());
            endpoint_terms.extend(t);
        }
        let span = moment(e, w);
        let tail_estimate = span * (ZETA2 - density.value()).max(0.0) / ZETA2;
        Ok(RationalValue {
            value: acc.value() / ZETA2,
            q_max,
            tail_estimate,
            tail_constant: tail_estimate * q_max as f64,
            endpoint_terms: endpoint_terms
                .into_iter()
                .map(|t| EndpointTerm {
                    mass: t.mass / ZETA2,
                    ..t
                })
                .collect(),
        })
    }

    /// ν(E) or ν♯(E) from the Fourier form, |t| ≤ t_max.
    pub fn nu_fourier(&self, e: &Interval, t_max: u64, quad_tol: f64, weight: NuWeight, cutoff: Cutoff) -> Result<FourierValue> {
        if e.lo.is_zero() {
            return Err(Error::InvalidArgument(
                "the Fourier form needs u > 0; use the rational form for ν([0, t])".into(),
            ));
        }
        if !(quad_tol > 0.0) {
            return Err(Error::InvalidArgument("quad_tol must be positive".into()));
        }
        self.check("t_max", t_max)?;
        let p = weight.exponent() as f64;
        let s1 = e.v().powf(-0.5);
        let s2 = e.u().powf(-0.5);
        let per_call = quad_tol / t_max.max(1) as f64;
        let rule = CompositeRule::new(16);
        let ts: Vec<u64> = (1..=t_max).collect();
        let scale = t_max.max(1) as f64;
        let weights = |t: u64| match cutoff {
            Cutoff::Sharp => (1.0, if 2 * t <= t_max { 1.0 } else { 0.0 }),
            Cutoff::Smooth => (
                self.window.eval(t as f64 / scale),
                self.window.eval(2.0 * t as f64 / scale),
            ),
        };
        let chunks: Vec<Result<(KahanSum, KahanSum, f64)>> = ts
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut full = KahanSum::new();
                let mut half = KahanSum::new();
                let mut err = 0.0;
                for &t in chunk {
                    let (w_full, w_half) = weights(t);
                    if w_full == 0.0 {
                        continue;
                    }
                    let (i, e) = oscillatory_integral(&rule, p, t, s1, s2, per_call);
                    let term = self.l1.value(t as i64)? * i;
                    full.add(w_full * term);
                    half.add(w_half * term);
                    err += e;
                }
                Ok((full, half, err))
            })
            .collect();
        let mut full = KahanSum::new();
        let mut half = KahanSum::new();
        let mut quadrature_error = 0.0;
        for c in chunks {
            let (a, b, e) = c?;
            full.add(a.value());
            half.add(b.value());
            quadrature_error += e;
        }
        let zero = moment(e, weight.exponent());
        let truncation_estimate = match cutoff {
            Cutoff::Sharp => 2.0 * (s1.powf(-p) + s2.powf(-p)) / (2.0 * PI * ZETA2 * scale),
            Cutoff::Smooth => (full.value() - half.value()).abs() / ZETA2,
        };
        let value = match cutoff {
            Cutoff::Sharp => zero + full.value() / ZETA2,
            Cutoff::Smooth => zero + (2.0 * full.value() - half.value()) / ZETA2,
        };
        Ok(FourierValue {
            value,
            t_max,
            quad_tol,
            cutoff,
            truncation_estimate,
            quadrature_error: quadrature_error / ZETA2,
        })
    }

    /// Both forms; the Fourier form only when u > 0.
    pub fn evaluate(&self, e: &Interval, q_max: u64, t_max: u64, quad_tol: f64, weight: NuWeight, cutoff: Cutoff) -> Result<NuEvaluation> {
        let rational = self.nu_rational(e, q_max, weight)?;
        let fourier = if e.lo.is_zero() {
            None
        } else {
            Some(self.nu_fourier(e, t_max, quad_tol, weight, cutoff)?)
        };
        Ok(NuEvaluation {
            interval: *e,
            weight,
            rational,
            fourier,
        })
    }

    /// ν([0, t]) at each grid point, rational form. t = 0 gives 0.
    pub fn cumulative(&self, grid: &[Endpoint], q_max: u64, weight: NuWeight) -> Result<Vec<f64>> {
        grid.iter()
            .map(|t| {
                if t.value() <= 0.0 {
                    return Ok(0.0);
                }
                let e = Interval::new(Endpoint::Exact(Ratio::from_integer(0)), *t)?;
                Ok(self.nu_rational(&e, q_max, weight)?.value)
            })
            .collect()
    }

    /// S(α) = ½ − ζ(2)α + Σ_{a/q ∈ (0, α], q ≤ q_max} μ(q)²/(φ(q)²σ(q)).
    pub fn s_alpha_jump(&self, alpha: Endpoint, q_max: u64) -> Result<JumpValue> {
        self.jump_function(q_max)?.eval(alpha)
    }

    /// The atoms μ²/(φ²σ) for q ≤ q_max, for repeated evaluation of S.
    pub fn jump_function(&self, q_max: u64) -> Result<JumpFunction> {
        if q_max == 0 {
            return Err(Error::InvalidArgument("q_max must be at least 1".into()));
        }
        self.check("q_max", q_max)?;
        let mut atoms = Vec::new();
        for q in 1..=q_max {
            if let Some((base, divisors)) = self.atom_weight(q)? {
                atoms.push((q, base, divisors));
            }
        }
        Ok(JumpFunction { atoms })
    }

    /// S*(α): the atom at a/q = α counted with weight ½.
    pub fn s_star(&self, alpha: Endpoint, q_max: u64) -> Result<f64> {
        Ok(self.s_alpha_jump(alpha, q_max)?.star())
    }

    /// Σ_{t=1}^{t_max} C f(t)/(πt)·sin(2παt).
    pub fn s_alpha_fourier(&self, alpha: Endpoint, t_max: u64) -> Result<f64> {
        self.check("t_max", t_max)?;
        let ts: Vec<u64> = (1..=t_max).collect();
        let chunks: Vec<Result<KahanSum>> = ts
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = KahanSum::new();
                for &t in chunk {
                    let phase = reduced_phase(alpha, t);
                    acc.add(self.l1.value(t as i64)? / (PI * t as f64) * (2.0 * PI * phase).sin());
                }
                Ok(acc)
            })
            .collect();
        let mut acc = KahanSum::new();
        for c in chunks {
            acc.add(c?.value());
        }
        Ok(acc.value())
    }

    /// Σ_t C f(t) cos(2παt) Ŵ(t/x) against μ(q)²/(φ(q)²σ(q))·x·W(xθ),
    /// α = a/q + θ, with |t| ≤ 100x.
    pub fn prop_circle_check(&self, a: i64, q: u64, theta: f64, x: f64, window: &WindowFunction) -> Result<PropCircle> {
        if q == 0 || a.gcd(&(q as i64)) != 1 {
            return Err(Error::InvalidArgument(format!("need gcd(a, q) = 1 with q ≥ 1, got a={a}, q={q}")));
        }
        if !(x >= 1.0) {
            return Err(Error::InvalidArgument(format!("x must be at least 1, got {x}")));
        }
        if !(theta.abs() <= 1.0 / (q * q) as f64) {
            return Err(Error::InvalidArgument(format!("|θ| must be at most 1/q², got {theta}")));
        }
        let t_max = (PROP_CIRCLE_SPAN * x).ceil() as u64;
        self.check("t_max", t_max)?;
        let hat = window.hat_lattice(1.0 / x, t_max as usize);
        let residue = a.rem_euclid(q as i64) as u64;
        let ts: Vec<u64> = (1..=t_max).collect();
        let chunks: Vec<Result<KahanSum>> = ts
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = KahanSum::new();
                for &t in chunk {
                    let frac = ((t % q) * residue % q) as f64 / q as f64;
                    let tt = t as f64 * theta;
                    let phase = frac + (tt - tt.round());
                    acc.add(self.l1.value(t as i64)? * (2.0 * PI * phase).cos() * hat[t as usize]);
                }
                Ok(acc)
            })
            .collect();
        let mut acc = KahanSum::new();
        acc.add(self.l1.value(0)?);
        for c in chunks {
            acc.add(2.0 * c?.value());
        }
        let lhs = acc.value();
        let main_term = match self.atom_weight(q)? {
            Some((base, _)) => base * x * window.eval(x * theta),
            None => 0.0,
        };
        Ok(PropCircle {
            lhs,
            main_term,
            residual: lhs - main_term,
            t_max,
        })
    }
}

/// S(α) truncated at a fixed q_max.
#[derive(Debug, Clone)]
pub struct JumpFunction {
    atoms: Vec<(u64, f64, Vec<(u64, i64)>)>,
}

impl JumpFunction {
    pub fn eval(&self, alpha: Endpoint) -> Result<JumpValue> {
        if !(alpha.value() >= 0.0) {
            return Err(Error::InvalidArgument(format!("α must be nonnegative, got {alpha}")));
        }
        let mut acc = KahanSum::new();
        let mut atom = 0.0;
        let exact = alpha.exact();
        for (q, base, divisors) in &self.atoms {
            let q = *q;
            let top = match exact {
                Some(r) => Integer::div_floor(&(q as i128 * *r.numer() as i128), &(*r.denom() as i128)) as u64,
                None => (q as f64 * alpha.value()).floor() as u64,
            };
            let count: i64 = divisors.iter().map(|&(g, mu)| mu * (top / g) as i64).sum();
            acc.add(base * count as f64);
            if let Some(r) = exact {
                if *r.denom() as u64 == q && *r.numer() > 0 {
                    atom = *base;
                }
            }
        }
        Ok(JumpValue {
            value: 0.5 - ZETA2 * alpha.value() + acc.value(),
            atom,
        })
    }
}

/// ∫_E y^{(w−3)/2} dy = (v^{(w−1)/2} − u^{(w−1)/2})/((w − 1)/2), halved.
fn moment(e: &Interval, w: i32) -> f64 {
    let h = (w - 1) as f64 / 2.0;
    (e.v().powf(h) - e.u().powf(h)) / (2.0 * h)
}

/// Smallest a with (q/a)² ≤ v, i.e. a/q ≥ v^{−1/2}.
fn lower_numerator(v: &Endpoint, q: u64) -> u64 {
    match v.exact() {
        Some(r) => {
            let (n, d) = (*r.numer() as u128, *r.denom() as u128);
            let x = (q as u128 * q as u128 * d).div_ceil(n);
            let mut a = x.sqrt();
            if a * a < x {
                a += 1;
            }
            a as u64
        }
        None => (q as f64 / v.value().sqrt()).ceil() as u64,
    }
}

/// Largest a with (q/a)² ≥ u, i.e. a/q ≤ u^{−1/2}.
fn upper_numerator(u: &Endpoint, q: u64) -> u64 {
    match u.exact() {
        Some(r) => {
            let (n, d) = (*r.numer() as u128, *r.denom() as u128);
            ((q as u128 * q as u128 * d) / n).sqrt() as u64
        }
        None => (q as f64 / u.value().sqrt()).floor() as u64,
    }
}

/// The fractional part of tα, exactly for rational α.
fn reduced_phase(alpha: Endpoint, t: u64) -> f64 {
    match alpha.exact() {
        Some(r) => {
            let d = *r.denom() as i128;
            (t as i128 * *r.numer() as i128).rem_euclid(d) as f64 / d as f64
        }
        None => {
            let x = t as f64 * alpha.value();
            x - x.floor()
        }
    }
}

/// ∫_{s₁}^{s₂} 2s^{−p} cos(2πts) ds and an error estimate. This is
/// ∫_E y^{(p−3)/2} cos(2πt/√y) dy after y = s^{−2}.
fn oscillatory_integral(rule: &CompositeRule, p: f64, t: u64, s1: f64, s2: f64, tol: f64) -> (f64, f64) {
    let a = 2.0 * PI * t as f64;
    if a * s1 >= ASYMPTOTIC_THRESHOLD {
        let (hi, e_hi) = boundary_series(p, a, s2);
        let (lo, e_lo) = boundary_series(p, a, s1);
        return (hi - lo, e_hi + e_lo);
    }
    let g = |s: f64| 2.0 * s.powf(-p) * (a * s).cos();
    let pieces = ((s2 / s1).ln() / 1.5f64.ln()).ceil().max(1.0) as usize;
    let ratio = (s2 / s1).powf(1.0 / pieces as f64);
    let mut panels: Vec<usize> = (0..pieces)
        .map(|i| {
            let len = s1 * ratio.powi(i as i32) * (ratio - 1.0);
            (2.0 * t as f64 * len).ceil() as usize + 1
        })
        .collect();
    let run = |panels: &[usize]| {
        let mut acc = KahanSum::new();
        for (i, &n) in panels.iter().enumerate() {
            let lo = s1 * ratio.powi(i as i32);
            let hi = if i + 1 == pieces { s2 } else { lo * ratio };
            acc.add(rule.integrate(lo, hi, n, g));
        }
        acc.value()
    };
    let mut value = run(&panels);
    for _ in 0..8 {
        for n in panels.iter_mut() {
            *n *= 2;
        }
        let finer = run(&panels);
        let err = (finer - value).abs();
        value = finer;
        if err <= tol {
            return (value, err);
        }
    }
    (value, tol)
}

/// Antiderivative of 2s^{−p} cos(as) from repeated integration by parts:
/// Σ_j (−1)^⌊j/2⌋ g^{(j)}(s)·{sin, cos}(as)/a^{j+1}.
fn boundary_series(p: f64, a: f64, s: f64) -> (f64, f64) {
    let (sn, cs) = (a * s).sin_cos();
    // |g^{(j)}(s)|/a^{j+1} = 2(p)_j/(a^{j+1} s^{p+j})
    let mut mag = 2.0 * s.powf(-p) / a;
    let mut acc = 0.0;
    for j in 0..40 {
        let term = match j % 4 {
            0 => mag * sn,
            1 => -mag * cs,
            2 => -mag * sn,
            _ => mag * cs,
        };
        let next = mag * (p + j as f64) / (a * s);
        acc += term;
        if next < 1e-18 || next > mag {
            return (acc, next);
        }
        mag = next;
    }
    (acc, mag)
}
