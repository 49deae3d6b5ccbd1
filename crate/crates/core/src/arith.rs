//! Exact integer number theory on top of a smallest-prime-factor sieve.
//!
//! Everything that needs a factorization (Möbius, Euler phi, divisor sums,
//! Ramanujan sums, the multiplicative weight `f`) goes through
//! [`FactorSieve`], so queries are `O(log n)` once the sieve is built.

use crate::error::{Error, Result};
use crate::numeric::{KahanSum, EULER_GAMMA, ZETA2};
use num_integer::Integer;
use std::f64::consts::PI;

/// Smallest-prime-factor table for `2..=bound` together with the primes.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    bound: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl FactorSieve {
    /// Linear sieve over `2..=bound`.
    pub fn new(bound: u64) -> Result<Self> {
        if bound < 2 {
            return Err(Error::InvalidArgument(format!(
                "sieve bound must be at least 2, got {bound}"
            )));
        }
        if bound > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!(
                "sieve bound {bound} exceeds the 32-bit table width"
            )));
        }
        let n = bound as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::with_capacity(if n > 10 {
            (1.3 * n as f64 / (n as f64).ln()) as usize
        } else {
            8
        });
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let ip = i * p as usize;
                if p > si || ip > n {
                    break;
                }
                spf[ip] = p;
            }
        }
        Ok(Self { bound, spf, primes })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Primes up to the bound, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Least prime factor of `n` for `2 ≤ n ≤ bound`.
    pub fn spf(&self, n: u64) -> Result<u64> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("spf undefined for {n}")));
        }
        self.check(n)?;
        Ok(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n < 2 {
            return Ok(false);
        }
        Ok(self.spf(n)? == n)
    }

    fn check(&self, n: u64) -> Result<()> {
        if n > self.bound {
            Err(Error::OutOfRange {
                what: "factor sieve",
                required: n,
                available: self.bound,
            })
        } else {
            Ok(())
        }
    }

    /// Prime factorization as `(p, e)` pairs with ascending `p`.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 {
            return Err(Error::InvalidArgument("cannot factor 0".into()));
        }
        self.check(n)?;
        let mut out = Vec::new();
        let mut x = n as usize;
        while x > 1 {
            let p = self.spf[x] as usize;
            let mut e = 0;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }

    /// Distinct prime divisors of `n`.
    pub fn prime_divisors(&self, n: u64) -> Result<Vec<u64>> {
        Ok(self.factorize(n)?.into_iter().map(|(p, _)| p).collect())
    }

    /// All positive divisors of `n`, unsorted.
    pub fn divisors(&self, n: u64) -> Result<Vec<u64>> {
        let mut divs = vec![1u64];
        for (p, e) in self.factorize(n)? {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        Ok(divs)
    }

    pub fn mobius(&self, n: u64) -> Result<i64> {
        let f = self.factorize(n)?;
        if f.iter().any(|&(_, e)| e > 1) {
            Ok(0)
        } else if f.len() % 2 == 0 {
            Ok(1)
        } else {
            Ok(-1)
        }
    }

    pub fn euler_phi(&self, n: u64) -> Result<u64> {
        Ok(self
            .factorize(n)?
            .into_iter()
            .map(|(p, e)| (p - 1) * p.pow(e - 1))
            .product())
    }

    /// Sum of divisors σ₁(n).
    pub fn sigma(&self, n: u64) -> Result<u64> {
        Ok(self
            .factorize(n)?
            .into_iter()
            .map(|(p, e)| (p.pow(e + 1) - 1) / (p - 1))
            .product())
    }

    pub fn radical(&self, n: u64) -> Result<u64> {
        Ok(self.prime_divisors(n)?.into_iter().product())
    }

    pub fn is_squarefree(&self, n: u64) -> Result<bool> {
        Ok(self.factorize(n)?.iter().all(|&(_, e)| e == 1))
    }

    /// Ramanujan sum c_q(t) = μ(q/g)·φ(q)/φ(q/g) with g = gcd(q, t).
    pub fn ramanujan_sum(&self, q: u64, t: i64) -> Result<i64> {
        if q == 0 {
            return Err(Error::InvalidArgument("ramanujan_sum needs q ≥ 1".into()));
        }
        let g = q.gcd(&t.unsigned_abs());
        let r = q / g;
        let mu = self.mobius(r)?;
        if mu == 0 {
            return Ok(0);
        }
        Ok(mu * (self.euler_phi(q)? / self.euler_phi(r)?) as i64)
    }

    /// f(t) = ∏_{p | t} (1 + 1/(p² − p − 1)), the multiplicative factor in
    /// L(1, ψ̄_t) = C·f(t).
    ///
    /// For `t = 0` the product runs over every prime; the accelerated value
    /// of [`FactorSieve::f_at_zero`] is returned.
    pub fn f_multiplicative(&self, t: i64) -> Result<f64> {
        if t == 0 {
            return Ok(self.f_at_zero().accelerated);
        }
        let mut acc = 1.0;
        for p in self.prime_divisors(t.unsigned_abs())? {
            acc *= local_f(p);
        }
        Ok(acc)
    }

    /// The full product f(0) = ∏_p f(p) over the sieve primes.
    pub fn f_at_zero(&self) -> FullProduct {
        let mut log_trunc = KahanSum::new();
        let mut log_fast = KahanSum::new();
        for &p in &self.primes {
            let p = p as f64;
            let x = 1.0 / (p * p - p - 1.0);
            log_trunc.add(x.ln_1p());
            // f(p)·(1 − p⁻²) = 1/(1 − 1/((p−1)²(p+1)))
            log_fast.add(-(-1.0 / ((p - 1.0) * (p - 1.0) * (p + 1.0))).ln_1p());
        }
        let last = *self.primes.last().expect("sieve has primes") as f64;
        FullProduct {
            truncated: log_trunc.value().exp(),
            accelerated: ZETA2 * log_fast.value().exp(),
            prime_bound: self.bound,
            truncation_bound: (prime_square_tail(last) * 2.0).exp_m1(),
            accelerated_bound: 2.0 * prime_cube_tail(last),
        }
    }

    /// C = ∏_{p ≤ bound} (1 − 1/((p−1)²(p+1))) over this sieve's primes.
    pub fn euler_constant_c(&self) -> f64 {
        euler_product_c(&self.primes)
    }
}

/// Local factor f(p) = 1 + 1/(p² − p − 1).
#[inline]
pub fn local_f(p: u64) -> f64 {
    let p = p as f64;
    1.0 + 1.0 / (p * p - p - 1.0)
}

/// Upper bound for Σ_{p > x} 1/p² (integer sum bound Σ_{n > x} 1/n² ≤ 1/x).
fn prime_square_tail(x: f64) -> f64 {
    1.0 / x
}

/// Upper bound for Σ_{p > x} 1/p³.
fn prime_cube_tail(x: f64) -> f64 {
    1.0 / (2.0 * x * x)
}

/// Value of an infinite product over primes evaluated on the sieve range.
#[derive(Debug, Clone, Copy)]
pub struct FullProduct {
    /// ∏_{p ≤ bound} f(p), the plain truncation.
    pub truncated: f64,
    /// ζ(2)·∏_{p ≤ bound} f(p)(1 − p⁻²): the same product with the slowly
    /// converging factor ∏(1 − p⁻²)⁻¹ summed in closed form.
    pub accelerated: f64,
    pub prime_bound: u64,
    /// Relative error bound of `truncated`: exp(Σ_{p>P} 2/p²) − 1.
    pub truncation_bound: f64,
    /// Relative error bound of `accelerated`.
    pub accelerated_bound: f64,
}

fn euler_product_c(primes: &[u32]) -> f64 {
    let mut acc = KahanSum::new();
    for &p in primes {
        let p = p as f64;
        acc.add((-1.0 / ((p - 1.0) * (p - 1.0) * (p + 1.0))).ln_1p());
    }
    acc.value().exp()
}

/// C = ∏_p (1 − 1/((p−1)²(p+1))) truncated at `prime_bound`, accumulated in
/// log space over ascending primes.
pub fn euler_constant_c(prime_bound: u64) -> Result<f64> {
    let sieve = FactorSieve::new(prime_bound)?;
    Ok(sieve.euler_constant_c())
}

/// Kronecker symbol (d/m) for m ≥ 0.
pub fn kronecker(d: i64, m: u64) -> i32 {
    if m == 0 {
        return if d.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let v = m.trailing_zeros();
    let mut result = 1;
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -1;
            }
        }
    }
    let m = m >> v;
    if m == 1 {
        return result;
    }
    let a = d.rem_euclid(m as i64) as u64;
    result * jacobi(a, m)
}

/// Jacobi symbol (a/m) for odd m ≥ 1.
pub fn jacobi(mut a: u64, mut m: u64) -> i32 {
    debug_assert!(m % 2 == 1);
    a %= m;
    let mut result = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (m % 8 == 3 || m % 8 == 5) {
            result = -result;
        }
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut m);
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Digamma ψ(x) for x > 0: upward recurrence to x ≥ 16, then the
/// asymptotic series with Bernoulli terms through B₁₂.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma implemented for positive arguments only");
    let mut shift = KahanSum::new();
    let mut y = x;
    while y < 16.0 {
        shift.add(-1.0 / y);
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    // B_{2k} / (2k)
    const COEF: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
    ];
    let mut series = 0.0;
    for c in COEF.iter().rev() {
        series = series * inv2 + c;
    }
    series *= inv2;
    y.ln() - 0.5 / y - series + shift.value()
}

/// Analytic conductor 𝒩(k) = (exp ψ(k/2) / 2π)² of weight k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConductor {
    pub k: f64,
    pub value: f64,
}

impl AnalyticConductor {
    /// Stirling approximation ((k−1)/4π)².
    pub fn stirling(&self) -> f64 {
        let s = (self.k - 1.0) / (4.0 * PI);
        s * s
    }

    pub fn sqrt(&self) -> f64 {
        self.value.sqrt()
    }
}

/// 𝒩(k) for an even integer weight k ≥ 4.
pub fn analytic_conductor(k: u32) -> Result<AnalyticConductor> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "analytic conductor needs an even weight ≥ 4, got {k}"
        )));
    }
    Ok(analytic_conductor_real(k as f64))
}

/// 𝒩(K) for a real weight parameter K > 0, as used for N = 𝒩(K).
pub fn analytic_conductor_real(k: f64) -> AnalyticConductor {
    let e = (digamma(k / 2.0)).exp() / (2.0 * PI);
    AnalyticConductor { k, value: e * e }
}

/// |ψ(1) + γ|, the digamma self-test.
pub fn digamma_one_error() -> f64 {
    (digamma(1.0) + EULER_GAMMA).abs()
}
