//! Eichler–Selberg trace formula on S_k(SL₂(ℤ)).
//!
//! Tr T_n = A₁ − A₂ − A₃ + A₄ is evaluated exactly: every term is an integer
//! after scaling by 12, and (ρ^{k−1} − ρ̄^{k−1})/(ρ − ρ̄) comes from the
//! recurrence u_{j+1} = t·u_j − n·u_{j−1}. The floating form rewrites A₂
//! with φ_{t,n} = arcsin(t/(2√n)) and L(1, ψ_{t²−4n}).

use crate::arith::FactorSieve;
use crate::classnum::{sieve_class_numbers, ClassNumberTable};
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::PI;

/// Integer types the exact trace can be computed in.
pub trait ExactInt: Clone + Sized {
    fn from_i64(x: i64) -> Self;
    fn checked_add(&self, other: &Self) -> Option<Self>;
    fn checked_sub(&self, other: &Self) -> Option<Self>;
    fn checked_mul(&self, other: &Self) -> Option<Self>;
    /// Exact division by 12, `None` if 12 does not divide.
    fn div12(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;
}

impl ExactInt for i128 {
    fn from_i64(x: i64) -> Self {
        x as i128
    }
    fn checked_add(&self, o: &Self) -> Option<Self> {
        i128::checked_add(*self, *o)
    }
    fn checked_sub(&self, o: &Self) -> Option<Self> {
        i128::checked_sub(*self, *o)
    }
    fn checked_mul(&self, o: &Self) -> Option<Self> {
        i128::checked_mul(*self, *o)
    }
    fn div12(&self) -> Option<Self> {
        (self % 12 == 0).then(|| self / 12)
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl ExactInt for BigInt {
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
    fn checked_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn checked_sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn checked_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div12(&self) -> Option<Self> {
        let twelve = BigInt::from(12);
        (self % &twelve).is_zero().then(|| self / twelve)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// φ_{t,n} = arcsin(t/(2√n)) for t² < 4n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticAngle {
    pub t: i64,
    pub n: u64,
    pub phi: f64,
}

impl EllipticAngle {
    pub fn new(t: i64, n: u64) -> Result<Self> {
        if (t * t) as u64 >= 4 * n {
            return Err(Error::InvalidArgument(format!("t² < 4n fails for t={t}, n={n}")));
        }
        let phi = (t as f64 / (2.0 * (n as f64).sqrt())).asin();
        Ok(Self { t, n, phi })
    }
}

/// Class numbers and factorizations for traces of T_n with n ≤ `max_n()`.
#[derive(Debug, Clone)]
pub struct TraceContext {
    table: ClassNumberTable,
}

impl TraceContext {
    /// Sieve class numbers far enough to handle every n ≤ `max_n`.
    pub fn new(max_n: u64) -> Result<Self> {
        Ok(Self {
            table: sieve_class_numbers((4 * max_n).max(4))?,
        })
    }

    pub fn from_table(table: ClassNumberTable) -> Self {
        Self { table }
    }

    pub fn table(&self) -> &ClassNumberTable {
        &self.table
    }

    pub fn sieve(&self) -> &FactorSieve {
        self.table.sieve()
    }

    /// Largest n whose discriminants t² − 4n the table covers.
    pub fn max_n(&self) -> u64 {
        self.table.bound() / 4
    }

    fn check_n(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if 4 * n > self.table.bound() {
            return Err(Error::OutOfRange {
                what: "class number table",
                required: 4 * n,
                available: self.table.bound(),
            });
        }
        Ok(())
    }

    /// Tr T_n on S_k(1), exactly.
    pub fn trace_hecke<T: ExactInt>(&self, k: u32, n: u64) -> Result<T> {
        check_weight(k)?;
        Ok(self.traces_up_to::<T>(k, n)?.pop().expect("k is in range").1)
    }

    /// Tr T_n for every even k with 2 ≤ k ≤ `k_max`, sharing the recurrence
    /// across weights.
    pub fn traces_up_to<T: ExactInt>(&self, k_max: u32, n: u64) -> Result<Vec<(u32, T)>> {
        check_weight(k_max)?;
        self.check_n(n)?;
        let overflow = || Error::Overflow { k: k_max, n };
        let weights: Vec<u32> = (1..=k_max / 2).map(|j| 2 * j).collect();
        let zero = T::from_i64(0);
        let mut total: Vec<T> = vec![zero.clone(); weights.len()];

        // 12·A₁ = (k − 1)·s^{k−2} for n = s²
        let s = n.isqrt();
        if s * s == n {
            let s_t = T::from_i64(s as i64);
            let mut spow = T::from_i64(1);
            for (i, &k) in weights.iter().enumerate() {
                if i > 0 {
                    spow = spow.checked_mul(&s_t).and_then(|x| x.checked_mul(&s_t)).ok_or_else(overflow)?;
                }
                let a1 = spow.checked_mul(&T::from_i64(k as i64 - 1)).ok_or_else(overflow)?;
                total[i] = total[i].checked_add(&a1).ok_or_else(overflow)?;
            }
        }

        // 12·A₂; t and −t give the same weight and u_j(−t) = (−1)^j u_j(t)
        let n_t = T::from_i64(n as i64);
        let mut t = 0i64;
        while ((t * t) as u64) < 4 * n {
            let disc = t * t - 4 * n as i64;
            let w12 = self.table.class_weight_x12(disc)?;
            let mult = if t == 0 { 1 } else { 2 };
            let weight = T::from_i64((w12 * mult) as i64);
            let t_t = T::from_i64(t);
            // u_0 = 1, u_1 = t; only even j = k − 2 are needed
            let mut prev = T::from_i64(1);
            let mut cur = t_t.clone();
            let mut j = 0u32;
            for (i, &k) in weights.iter().enumerate() {
                let target = k - 2;
                while j < target {
                    let next = t_t
                        .checked_mul(&cur)
                        .and_then(|a| n_t.checked_mul(&prev).and_then(|b| a.checked_sub(&b)))
                        .ok_or_else(overflow)?;
                    prev = cur;
                    cur = next;
                    j += 1;
                }
                // `prev` holds u_j, `cur` holds u_{j+1}
                let a2 = prev.checked_mul(&weight).ok_or_else(overflow)?;
                total[i] = total[i].checked_sub(&a2).ok_or_else(overflow)?;
            }
            t += 1;
        }

        // 12·A₃ = 6·Σ_{d|n} min(d, n/d)^{k−1}
        for d in self.sieve().divisors(n)? {
            let m = d.min(n / d);
            let m_t = T::from_i64(m as i64);
            let m2 = m_t.checked_mul(&m_t).ok_or_else(overflow)?;
            let mut pow = m_t.clone();
            for (i, _) in weights.iter().enumerate() {
                if i > 0 {
                    pow = pow.checked_mul(&m2).ok_or_else(overflow)?;
                }
                let a3 = pow.checked_mul(&T::from_i64(6)).ok_or_else(overflow)?;
                total[i] = total[i].checked_sub(&a3).ok_or_else(overflow)?;
            }
        }

        // 12·A₄ at k = 2
        let a4 = T::from_i64(12 * self.sieve().sigma(n)? as i64);
        total[0] = total[0].checked_add(&a4).ok_or_else(overflow)?;

        weights
            .into_iter()
            .zip(total)
            .map(|(k, x)| {
                x.div12()
                    .map(|v| (k, v))
                    .ok_or_else(|| Error::InvalidArgument(format!("trace at k={k}, n={n} is not integral")))
            })
            .collect()
    }

    /// Σ_f λ_f(p) = −p^{(1−k)/2} + ((−1)^{k/2}/π)·Σ_{t²<4p} cos((k−1)φ_{t,p})·L(1, ψ_{t²−4p}).
    pub fn eigenvalue_sum_prime(&self, k: u32, p: u64) -> Result<f64> {
        check_weight(k)?;
        if k < 4 {
            return Err(Error::InvalidArgument("the prime form needs k > 2".into()));
        }
        self.check_n(p)?;
        if !self.sieve().is_prime(p)? {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        let kf = k as f64;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = KahanSum::new();
        acc.add(-(p as f64).powf((1.0 - kf) / 2.0));
        acc.add(sign / PI * self.elliptic_cosine_sum(k, p)?);
        Ok(acc.value())
    }

    /// n^{(1−k)/2}·Tr T_n in floating point, for any n ≥ 1:
    /// [n = □]·(k−1)/(12√n) − ½Σ_{d|n}(min/max)^{(k−1)/2} + ((−1)^{k/2}/π)·Σ_t cos((k−1)φ)·L(1, ψ_{t²−4n}) (+ σ(n)/√n at k = 2).
    pub fn eigenvalue_sum(&self, k: u32, n: u64) -> Result<f64> {
        check_weight(k)?;
        self.check_n(n)?;
        let kf = k as f64;
        let nf = n as f64;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = KahanSum::new();
        let s = n.isqrt();
        if s * s == n {
            acc.add((kf - 1.0) / (12.0 * nf.sqrt()));
        }
        for d in self.sieve().divisors(n)? {
            let (lo, hi) = (d.min(n / d) as f64, d.max(n / d) as f64);
            acc.add(-0.5 * (lo / hi).powf((kf - 1.0) / 2.0));
        }
        acc.add(sign / PI * self.elliptic_cosine_sum(k, n)?);
        if k == 2 {
            acc.add(self.sieve().sigma(n)? as f64 / nf.sqrt());
        }
        Ok(acc.value())
    }

    fn elliptic_cosine_sum(&self, k: u32, n: u64) -> Result<f64> {
        let mut acc = KahanSum::new();
        let mut t = 0i64;
        while ((t * t) as u64) < 4 * n {
            let angle = EllipticAngle::new(t, n)?;
            let l1 = self.table.l1_psi_d(t * t - 4 * n as i64)?;
            let c = ((k as f64 - 1.0) * angle.phi).cos() * l1;
            acc.add(if t == 0 { c } else { 2.0 * c });
            t += 1;
        }
        Ok(acc.value())
    }
}

fn check_weight(k: u32) -> Result<()> {
    if k < 2 || k % 2 == 1 {
        Err(Error::InvalidArgument(format!("weight must be even and ≥ 2, got {k}")))
    } else {
        Ok(())
    }
}

/// The weights k ≡ 2δ (mod 4), |k − K| ≤ H, k ≥ 4, as (k_min, count).
pub fn weight_progression(big_k: f64, big_h: f64, delta: u8) -> (i64, u64) {
    let residue = 2 * (delta as i64 % 2);
    let lo = (big_k - big_h).ceil().max(4.0) as i64;
    let hi = (big_k + big_h).floor() as i64;
    let k_min = lo + (residue - lo).rem_euclid(4);
    if k_min > hi {
        return (k_min, 0);
    }
    (k_min, ((hi - k_min) / 4 + 1) as u64)
}

/// Below this |sin 2φ| the progression sum is evaluated term by term.
pub const PROGRESSION_FALLBACK: f64 = 1e-4;

/// Σ cos((k − 1)φ) over k ≡ 2δ (mod 4), |k − K| ≤ H, k ≥ 4.
///
/// Closed form sin(2mφ)/sin(2φ)·cos((k_min − 1 + 2(m − 1))φ) for m terms.
pub fn progression_cosine_sum(big_k: f64, big_h: f64, delta: u8, phi: f64) -> f64 {
    let (k_min, m) = weight_progression(big_k, big_h, delta);
    progression_cosine_sum_from(k_min, m, phi)
}

/// The same sum given the first weight and the number of terms.
#[inline]
pub fn progression_cosine_sum_from(k_min: i64, m: u64, phi: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let s2 = (2.0 * phi).sin();
    if s2.abs() < PROGRESSION_FALLBACK {
        let mut acc = 0.0;
        for j in 0..m as i64 {
            acc += ((k_min - 1 + 4 * j) as f64 * phi).cos();
        }
        return acc;
    }
    let mf = m as f64;
    (2.0 * mf * phi).sin() / s2 * ((k_min - 1) as f64 * phi + 2.0 * (mf - 1.0) * phi).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> TraceContext {
        TraceContext::new(2_000).unwrap()
    }

    // τ(n) from the product q∏(1 − q^m)^24, small independent expansion
    fn tau_table(len: usize) -> Vec<i128> {
        let mut series = vec![0i128; len];
        series[0] = 1;
        for m in 1..len {
            for _ in 0..24 {
                for i in (m..len).rev() {
                    series[i] -= series[i - m];
                }
            }
        }
        // shift by q
        let mut tau = vec![0i128; len + 1];
        tau[1..].copy_from_slice(&series);
        tau
    }

    #[test]
    fn level_one_weight_twelve() {
        let c = ctx();
        let tau = tau_table(60);
        for n in 1..60u64 {
            assert_eq!(c.trace_hecke::<i128>(12, n).unwrap(), tau[n as usize], "n={n}");
        }
        assert_eq!(c.trace_hecke::<i128>(12, 2).unwrap(), -24);
        assert_eq!(c.trace_hecke::<i128>(12, 5).unwrap(), 4830);
        assert_eq!(c.trace_hecke::<i128>(12, 4).unwrap(), 24 * 24 - 2048);
    }

    #[test]
    fn dimensions_from_trace_of_identity() {
        let c = ctx();
        for k in (2..=10).step_by(2) {
            assert_eq!(c.trace_hecke::<i128>(k, 1).unwrap(), 0);
        }
        assert_eq!(c.trace_hecke::<i128>(12, 1).unwrap(), 1);
        assert_eq!(c.trace_hecke::<i128>(14, 1).unwrap(), 0);
        assert_eq!(c.trace_hecke::<i128>(24, 1).unwrap(), 2);
        for n in 1..50 {
            assert_eq!(c.trace_hecke::<i128>(2, n).unwrap(), 0, "k=2 n={n}");
        }
    }

    #[test]
    fn bigint_and_i128_agree() {
        let c = ctx();
        for n in [2u64, 7, 36, 97, 100] {
            for k in (4..=30).step_by(2) {
                let a = c.trace_hecke::<i128>(k, n).unwrap();
                let b = c.trace_hecke::<BigInt>(k, n).unwrap();
                assert_eq!(BigInt::from(a), b);
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let c = ctx();
        assert!(matches!(c.trace_hecke::<i128>(60, 997), Err(Error::Overflow { .. })));
        assert!(c.trace_hecke::<BigInt>(60, 997).is_ok());
    }

    #[test]
    fn range_and_argument_errors() {
        let c = ctx();
        assert!(matches!(c.trace_hecke::<i128>(12, 2_001), Err(Error::OutOfRange { .. })));
        assert!(c.trace_hecke::<i128>(13, 5).is_err());
        assert!(c.eigenvalue_sum_prime(12, 4).is_err());
    }

    #[test]
    fn normalized_sums() {
        let c = ctx();
        let v = c.eigenvalue_sum_prime(12, 2).unwrap();
        assert!((v - (-24.0 / 2f64.powf(5.5))).abs() < 1e-12);
        assert!((v + 0.530_330).abs() < 1e-6);
        assert!(c.eigenvalue_sum_prime(4, 5).unwrap().abs() < 1e-12);
        for k in (4..=40).step_by(2) {
            for n in 1..=200u64 {
                let exact = c.trace_hecke::<BigInt>(k, n).unwrap();
                let scale = (n as f64).powf((1.0 - k as f64) / 2.0);
                let expect = ExactInt::to_f64(&exact) * scale;
                let got = c.eigenvalue_sum(k, n).unwrap();
                assert!((got - expect).abs() <= 1e-9 * expect.abs().max(1.0), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn hecke_relation_on_one_dimensional_spaces() {
        let c = ctx();
        for k in [12u32, 16, 18, 20, 22, 26] {
            for p in [2u64, 3, 5, 7, 11, 13, 37] {
                let lp = c.eigenvalue_sum_prime(k, p).unwrap();
                let lp2 = c.eigenvalue_sum(k, p * p).unwrap();
                assert!((lp2 - (lp * lp - 1.0)).abs() < 1e-9, "k={k} p={p}");
            }
        }
    }

    #[test]
    fn deligne_bound_soft_check() {
        let c = ctx();
        for k in (4..=60).step_by(2) {
            let dim = c.trace_hecke::<i128>(k, 1).unwrap() as f64;
            for p in [2u64, 3, 101, 1009, 1999] {
                assert!(c.eigenvalue_sum_prime(k, p).unwrap().abs() <= 2.0 * dim + 1e-6);
            }
        }
    }

    #[test]
    fn elliptic_angle() {
        let a = EllipticAngle::new(3, 7).unwrap();
        assert!((a.phi.sin() - 3.0 / (2.0 * 7f64.sqrt())).abs() < 1e-12);
        assert!(EllipticAngle::new(4, 4).is_err());
    }

    fn direct_progression(big_k: f64, big_h: f64, delta: u8, phi: f64) -> (f64, u64) {
        let mut acc = 0.0;
        let mut count = 0;
        let mut k = 4i64;
        while (k as f64) <= big_k + big_h {
            if k % 4 == 2 * delta as i64 && (k as f64 - big_k).abs() <= big_h {
                acc += ((k - 1) as f64 * phi).cos();
                count += 1;
            }
            k += 2;
        }
        (acc, count)
    }

    #[test]
    fn progression_sums() {
        let (direct, count) = direct_progression(3850.0, 100.0, 0, 0.3);
        assert_eq!(count, 50);
        assert!((progression_cosine_sum(3850.0, 100.0, 0, 0.3) - direct).abs() < 1e-10);
        assert_eq!(progression_cosine_sum(3850.0, 100.0, 1, 0.0), 51.0);
        assert_eq!(progression_cosine_sum(3850.0, 100.0, 0, 0.0), 50.0);
        for phi in [PI / 2.0, PI / 2.0 - 1e-9, PI / 2.0 - 3e-5, 1e-7, -0.7, 1.2] {
            for delta in [0, 1] {
                let (direct, _) = direct_progression(3850.0, 100.0, delta, phi);
                let closed = progression_cosine_sum(3850.0, 100.0, delta, phi);
                assert!((closed - direct).abs() < 1e-10, "phi={phi}: {closed} vs {direct}");
            }
        }
        assert_eq!(weight_progression(16.0, 4.0, 0), (12, 3));
        assert_eq!(weight_progression(16.0, 3.0, 0), (16, 1));
        assert_eq!(weight_progression(5.0, 4.0, 1), (6, 1));
    }
}
