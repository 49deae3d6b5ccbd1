//! The smooth bump W(x) = c∫_{−1}^{1−2|x|} e^{−1/(1−t²)} dt, its Fourier
//! transform, and Poisson summation of cosine sums over an arithmetic
//! progression of weights.
//!
//! W is even, supported on [−1, 1] and satisfies W(x) + W(1 − x) = 1, so its
//! integer translates form a partition of unity and Ŵ vanishes at every
//! nonzero integer.

use crate::numeric::{CompositeRule, KahanSum};
use std::f64::consts::PI;

/// Beyond this argument |Ŵ| is below 1e−12 and is treated as zero in
/// Poisson sums.
pub const W_HAT_CUTOFF: f64 = 120.0;

const ORDER: usize = 16;
const W_PANELS: usize = 12;

/// The bump kernel e^{−1/(1−t²)} on (−1, 1), zero outside.
#[inline]
pub fn bump(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

#[derive(Debug, Clone)]
pub struct WindowFunction {
    c: f64,
    rule: CompositeRule,
}

impl Default for WindowFunction {
    fn default() -> Self {
        Self::new()
    }
}

impl WindowFunction {
    pub fn new() -> Self {
        let rule = CompositeRule::new(ORDER);
        let integral = rule.integrate(-1.0, 1.0, 4 * W_PANELS, bump);
        Self {
            c: 1.0 / integral,
            rule,
        }
    }

    /// Normalization c = (∫_{−1}^{1} e^{−1/(1−t²)} dt)^{−1}.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// W(x).
    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax >= 1.0 {
            return 0.0;
        }
        let upper = 1.0 - 2.0 * ax;
        // integrate over the shorter side of the bump
        if upper <= 0.0 {
            self.c * self.rule.integrate(-1.0, upper, W_PANELS, bump)
        } else {
            1.0 - self.c * self.rule.integrate(upper, 1.0, W_PANELS, bump)
        }
    }

    /// W'(x) = −2c·sgn(x)·e^{−1/(1−(1−2|x|)²)}.
    pub fn derivative(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax >= 1.0 || x == 0.0 {
            return 0.0;
        }
        -2.0 * self.c * x.signum() * bump(1.0 - 2.0 * ax)
    }

    /// Ŵ(ξ) = ∫ W(u) cos(2πξu) du.
    ///
    /// After one integration by parts,
    /// Ŵ(ξ) = (c/(πξ)) ∫_{−1}^{1} e^{−1/(1−v²)} sin(πξ(1−v)) dv,
    /// integrated with panels no wider than a quarter period.
    pub fn eval_hat(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a < 1e-6 {
            // sin(πξ(1−v))/(πξ) = (1−v)(1 − (πξ(1−v))²/6 + …)
            let z = PI * a;
            let m1 = self.rule.integrate(-1.0, 1.0, 4 * W_PANELS, |v| bump(v) * (1.0 - v).powi(3));
            return 1.0 - self.c * z * z * m1 / 6.0;
        }
        let panels = ((2.0 * a).ceil() as usize).max(4 * W_PANELS);
        let w = PI * a;
        let s = self
            .rule
            .integrate(-1.0, 1.0, panels, |v| bump(v) * (w * (1.0 - v)).sin());
        self.c * s / w
    }

    /// Ŵ(j·step) for j = 0, …, count, on one node set sized for the largest
    /// argument. The sines advance by rotation and are reseeded every 64 steps.
    pub fn hat_lattice(&self, step: f64, count: usize) -> Vec<f64> {
        const RESEED: usize = 64;
        let xi_max = step.abs() * count as f64;
        let panels = ((2.0 * xi_max).ceil() as usize).max(4 * W_PANELS);
        let (nodes, weights) = crate::numeric::gauss_legendre(ORDER);
        let width = 2.0 / panels as f64;
        let mut g = Vec::with_capacity(panels * ORDER);
        let mut theta = Vec::with_capacity(panels * ORDER);
        for j in 0..panels {
            let mid = -1.0 + (j as f64 + 0.5) * width;
            for (x, w) in nodes.iter().zip(&weights) {
                let v = mid + 0.5 * width * x;
                g.push(self.c * 0.5 * width * w * bump(v));
                theta.push(PI * step.abs() * (1.0 - v));
            }
        }
        let (rc, rs): (Vec<f64>, Vec<f64>) = theta.iter().map(|t| (t.cos(), t.sin())).unzip();
        let mut cs = vec![0.0; theta.len()];
        let mut sn = vec![0.0; theta.len()];
        let mut out = Vec::with_capacity(count + 1);
        out.push(1.0);
        for j in 1..=count {
            if (j - 1) % RESEED == 0 {
                for i in 0..theta.len() {
                    let a = theta[i] * j as f64;
                    cs[i] = a.cos();
                    sn[i] = a.sin();
                }
            } else {
                for i in 0..theta.len() {
                    let c = cs[i] * rc[i] - sn[i] * rs[i];
                    sn[i] = sn[i] * rc[i] + cs[i] * rs[i];
                    cs[i] = c;
                }
            }
            let xi = step.abs() * j as f64;
            if xi < 1e-6 {
                out.push(self.eval_hat(xi));
                continue;
            }
            let s: f64 = g.iter().zip(&sn).map(|(a, b)| a * b).sum();
            out.push(s / (PI * xi));
        }
        out
    }

    /// Σ_{k ∈ k₀ + 4ℤ} cos((k − 1)φ) W((k − k₀)/(4h)), summed directly over
    /// the finitely many k with W ≠ 0.
    pub fn cosine_progression_sum(&self, k0: i64, h: f64, phi: f64) -> f64 {
        let m_max = h.ceil() as i64;
        let mut acc = KahanSum::new();
        for m in -m_max..=m_max {
            let w = self.eval(m as f64 / h);
            if w == 0.0 {
                continue;
            }
            acc.add(((k0 - 1 + 4 * m) as f64 * phi).cos() * w);
        }
        acc.value()
    }

    /// Right side of the Poisson identity,
    /// h·cos((k₀ − 1)φ)·Σ_ℓ Ŵ(hℓ + 2hφ/π), over every ℓ with
    /// |hℓ + 2hφ/π| ≤ [`W_HAT_CUTOFF`].
    pub fn cosine_progression_poisson(&self, k0: i64, h: f64, phi: f64) -> f64 {
        let shift = 2.0 * h * phi / PI;
        let lo = ((-W_HAT_CUTOFF - shift) / h).floor() as i64;
        let hi = ((W_HAT_CUTOFF - shift) / h).ceil() as i64;
        let mut acc = KahanSum::new();
        for l in lo..=hi {
            let arg = h * l as f64 + shift;
            if arg.abs() <= W_HAT_CUTOFF {
                acc.add(self.eval_hat(arg));
            }
        }
        h * ((k0 - 1) as f64 * phi).cos() * acc.value()
    }
}
