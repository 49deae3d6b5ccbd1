//! Exact q-expansions of level-one modular forms: Δ = η²⁴, E₄, E₆ and the
//! eigenforms spanning S_k(1) for dim ≤ 2. Used as ground truth for traces
//! of Hecke operators.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Truncated power series Σ a_m q^m, m < precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPowerSeries {
    coeffs: Vec<BigInt>,
}

impl IntegerPowerSeries {
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        Self { coeffs }
    }

    pub fn one(precision: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); precision];
        if precision > 0 {
            coeffs[0] = BigInt::one();
        }
        Self { coeffs }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of q^m (zero past the precision is *not* implied; panics).
    pub fn coeff(&self, m: usize) -> &BigInt {
        &self.coeffs[m]
    }

    pub fn truncate(&self, precision: usize) -> Self {
        Self {
            coeffs: self.coeffs[..precision.min(self.precision())].to_vec(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.precision().min(other.precision());
        let mut out = vec![BigInt::zero(); prec];
        for (i, a) in self.coeffs.iter().enumerate().take(prec) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(prec - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self { coeffs: out }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.precision());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn sub(&self, other: &Self) -> Self {
        let prec = self.precision().min(other.precision());
        Self {
            coeffs: (0..prec).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiply by q (precision preserved, top coefficient dropped).
    pub fn shift_by_q(&self) -> Self {
        let mut coeffs = vec![BigInt::zero(); self.precision()];
        for i in 1..self.precision() {
            coeffs[i] = self.coeffs[i - 1].clone();
        }
        Self { coeffs }
    }

    /// T_n on a weight-k expansion: b_m = Σ_{d | (n, m)} d^{k−1} a_{nm/d²}.
    ///
    /// Output precision is ⌊(precision − 1)/n⌋ + 1.
    pub fn hecke(&self, k: u32, n: u64) -> Self {
        let out_prec = (self.precision() - 1) / n as usize + 1;
        let mut coeffs = vec![BigInt::zero(); out_prec];
        for (m, slot) in coeffs.iter_mut().enumerate() {
            let m = m as u64;
            let g = if m == 0 { n } else { n.gcd(&m) };
            for d in 1..=g {
                if g % d != 0 {
                    continue;
                }
                let idx = (n * m / (d * d)) as usize;
                *slot += BigInt::from(d).pow(k - 1) * &self.coeffs[idx];
            }
        }
        Self { coeffs }
    }
}

/// ∏_{m≥1} (1 − q^m) by Euler's pentagonal number theorem.
pub fn euler_product(precision: usize) -> IntegerPowerSeries {
    let mut coeffs = vec![BigInt::zero(); precision];
    let mut j = 0i64;
    loop {
        let mut any = false;
        for g in [j * (3 * j - 1) / 2, j * (3 * j + 1) / 2] {
            if (g as usize) < precision {
                any = true;
                coeffs[g as usize] = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            }
        }
        if !any {
            break;
        }
        j += 1;
    }
    IntegerPowerSeries { coeffs }
}

/// Δ = q∏(1 − q^m)^{24}.
pub fn eta_power_24(precision: usize) -> Result<IntegerPowerSeries> {
    if precision == 0 || precision > 10_000 {
        return Err(Error::InvalidArgument(format!("precision {precision} outside 1..=10000")));
    }
    Ok(euler_product(precision).pow(24).shift_by_q())
}

fn sigma_power(n: u64, e: u32) -> BigInt {
    let mut acc = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(e);
        }
    }
    acc
}

/// E₄ = 1 + 240Σσ₃(n)qⁿ or E₆ = 1 − 504Σσ₅(n)qⁿ.
pub fn eisenstein(k: u32, precision: usize) -> Result<IntegerPowerSeries> {
    let (c, e) = match k {
        4 => (240, 3),
        6 => (-504, 5),
        _ => return Err(Error::InvalidArgument(format!("Eisenstein series only for k = 4, 6, got {k}"))),
    };
    let mut coeffs = vec![BigInt::zero(); precision];
    if precision > 0 {
        coeffs[0] = BigInt::one();
    }
    for (n, slot) in coeffs.iter_mut().enumerate().skip(1) {
        *slot = sigma_power(n as u64, e) * c;
    }
    Ok(IntegerPowerSeries { coeffs })
}

/// The normalized eigenform Δ·E₄^a·E₆^b of weight k = 12 + 4a + 6b, for the
/// weights with dim S_k(1) = 1.
pub fn newform_qexp(k: u32, precision: usize) -> Result<IntegerPowerSeries> {
    let (a, b) = match k {
        12 => (0, 0),
        16 => (1, 0),
        18 => (0, 1),
        20 => (2, 0),
        22 => (1, 1),
        26 => (2, 1),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no one-dimensional cusp space at weight {k}"
            )))
        }
    };
    let mut f = eta_power_24(precision)?;
    if a > 0 {
        f = f.mul(&eisenstein(4, precision)?.pow(a));
    }
    if b > 0 {
        f = f.mul(&eisenstein(6, precision)?.pow(b));
    }
    Ok(f)
}

fn dim_cusp(k: u32) -> u32 {
    if k < 12 || k % 2 == 1 {
        return 0;
    }
    let base = k / 12;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

/// Tr T_n on S_k(1) from q-expansions, for k ≤ 26.
///
/// Dimension 0 gives 0 and dimension 1 gives the n-th coefficient of the
/// eigenform. At k = 24 the trace is taken of the matrix of T_n in the
/// echelon basis {ΔE₄³ − c·Δ², Δ²}.
pub fn oracle_trace(k: u32, n: u64) -> Result<BigInt> {
    if !(2..=26).contains(&k) || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("oracle supports even 2 ≤ k ≤ 26, got {k}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    match dim_cusp(k) {
        0 => Ok(BigInt::zero()),
        1 => Ok(newform_qexp(k, n as usize + 1)?.coeff(n as usize).clone()),
        _ => trace_weight_24(n),
    }
}

fn trace_weight_24(n: u64) -> Result<BigInt> {
    // T_n(f) needs coefficients up to n·m for m ≤ 2
    let prec = 2 * n as usize + 1;
    let delta = eta_power_24(prec)?;
    let e4 = eisenstein(4, prec)?;
    let f1 = delta.mul(&e4.pow(3));
    let f2 = delta.mul(&delta);
    // echelon: g1 = f1 − f1[2]·f2 has q-coefficients (1, 0, …), g2 = f2 = (0, 1, …)
    let g1 = f1.sub(&f2.scale(f1.coeff(2)));
    let g2 = f2;
    debug_assert!(g1.coeff(1).is_one() && g1.coeff(2).is_zero());
    debug_assert!(g2.coeff(1).is_zero() && g2.coeff(2).is_one());
    let t1 = g1.hecke(24, n);
    let t2 = g2.hecke(24, n);
    // in this basis the coordinate of a form along g_i is its q^i coefficient
    Ok(t1.coeff(1) + t2.coeff(2))
}
