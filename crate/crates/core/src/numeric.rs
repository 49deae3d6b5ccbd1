//! Small numeric helpers shared by the summation-heavy modules.

use std::f64::consts::PI;

/// ζ(2) in closed form.
pub const ZETA2: f64 = PI * PI / 6.0;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a sequence, in iteration order.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Tail Σ_{b ≥ n} b^{-s} for real s > 1 and n ≥ 1 (Hurwitz zeta at integer offset).
///
/// Direct summation up to an offset of 16, then Euler–Maclaurin with
/// Bernoulli terms through B_12.
pub fn zeta_tail(s: f64, n: u64) -> f64 {
    assert!(s > 1.0 && n >= 1);
    const SHIFT: u64 = 16;
    let mut acc = KahanSum::new();
    let mut m = n;
    while m < SHIFT {
        acc.add((m as f64).powf(-s));
        m += 1;
    }
    let x = m as f64;
    // B_{2j} / (2j)!
    const B_OVER_FACT: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    acc.add(x.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * x.powf(-s));
    // rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1}
    let mut rising = s;
    let mut xpow = x.powf(-s - 1.0);
    for (j, b) in B_OVER_FACT.iter().enumerate() {
        acc.add(b * rising * xpow);
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        xpow /= x * x;
    }
    acc.value()
}

/// Gauss–Legendre nodes and weights of order `n` on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule: `panels` equal panels on [a, b].
#[derive(Debug, Clone)]
pub struct CompositeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut acc = KahanSum::new();
        for j in 0..panels {
            let mid = a + (j as f64 + 0.5) * width;
            let mut local = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                local += w * f(mid + half * x);
            }
            acc.add(local * half);
        }
        acc.value()
    }
}

/// Pearson correlation coefficient of two equal-length samples.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = kahan_sum(xs.iter().copied()) / n;
    let my = kahan_sum(ys.iter().copied()) / n;
    let mut sxy = KahanSum::new();
    let mut sxx = KahanSum::new();
    let mut syy = KahanSum::new();
    for (x, y) in xs.iter().zip(ys) {
        sxy.add((x - mx) * (y - my));
        sxx.add((x - mx) * (x - mx));
        syy.add((y - my) * (y - my));
    }
    let denom = (sxx.value() * syy.value()).sqrt();
    if denom == 0.0 {
        None
    } else {
        Some(sxy.value() / denom)
    }
}
