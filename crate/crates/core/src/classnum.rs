//! Class numbers of imaginary quadratic orders and the quadratic characters
//! ψ_D attached to discriminants.
//!
//! h(D) is obtained by counting reduced primitive forms (a, b, c) with
//! |b| ≤ a ≤ c, b² − 4ac = D, gcd(a, b, c) = 1 and b ≥ 0 whenever |b| = a
//! or a = c. The table holds h(D) for every discriminant −bound ≤ D < 0,
//! fundamental or not.

use crate::arith::{kronecker, FactorSieve};
use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::{Read, Write};

/// Magic bytes of the binary class number cache.
pub const CACHE_MAGIC: &[u8; 8] = b"MRMCLS01";

/// D = d·ℓ² with d = 1 or a fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscriminantFactorization {
    pub disc: i64,
    pub fundamental: i64,
    pub conductor: u64,
}

/// Is `d` a fundamental discriminant (`d = 1` excluded)?
pub fn is_fundamental(d: i64, sieve: &FactorSieve) -> Result<bool> {
    if d == 0 || d == 1 {
        return Ok(false);
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        sieve.is_squarefree(d.unsigned_abs())
    } else if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        Ok((mr == 2 || mr == 3) && sieve.is_squarefree(m.unsigned_abs())?)
    } else {
        Ok(false)
    }
}

/// Split a nonzero discriminant as D = d·ℓ².
///
/// Squares (including D = 1) decompose with d = 1.
pub fn decompose_discriminant(disc: i64, sieve: &FactorSieve) -> Result<DiscriminantFactorization> {
    let r = disc.rem_euclid(4);
    if disc == 0 || (r != 0 && r != 1) {
        return Err(Error::InvalidArgument(format!(
            "{disc} is not a nonzero discriminant (need D ≡ 0, 1 mod 4)"
        )));
    }
    let mut core = 1u64;
    let mut ell = 1u64;
    for (p, e) in sieve.factorize(disc.unsigned_abs())? {
        if e % 2 == 1 {
            core *= p;
        }
        ell *= p.pow(e / 2);
    }
    let d0 = disc.signum() * core as i64;
    let (fundamental, conductor) = if d0.rem_euclid(4) == 1 {
        (d0, ell)
    } else {
        debug_assert!(ell % 2 == 0);
        (4 * d0, ell / 2)
    };
    Ok(DiscriminantFactorization {
        disc,
        fundamental,
        conductor,
    })
}

/// ψ_D(m) = (d / (m / gcd(m, ℓ))) with ψ_0 ≡ 1.
pub fn psi_d(disc: i64, m: u64, sieve: &FactorSieve) -> Result<i32> {
    if disc == 0 {
        return Ok(1);
    }
    let f = decompose_discriminant(disc, sieve)?;
    Ok(psi_from_factorization(&f, m))
}

#[inline]
fn psi_from_factorization(f: &DiscriminantFactorization, m: u64) -> i32 {
    let g = m.gcd(&f.conductor);
    kronecker(f.fundamental, m / g)
}

/// Number of units w(d) of the ring of integers of Q(√d), d < 0 fundamental.
pub fn unit_count(d: i64, sieve: &FactorSieve) -> Result<u32> {
    if d >= 0 || !is_fundamental(d, sieve)? {
        return Err(Error::InvalidArgument(format!(
            "{d} is not a negative fundamental discriminant"
        )));
    }
    Ok(units_unchecked(d))
}

#[inline]
fn units_unchecked(d: i64) -> u32 {
    match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Primitive class numbers h(D) for −bound ≤ D < 0.
#[derive(Debug, Clone)]
pub struct ClassNumberTable {
    bound: u64,
    h: Vec<u32>,
    sieve: FactorSieve,
}

impl PartialEq for ClassNumberTable {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.h == other.h
    }
}

/// Count reduced primitive forms for every |D| ≤ bound.
pub fn sieve_class_numbers(bound: u64) -> Result<ClassNumberTable> {
    if bound < 4 {
        return Err(Error::InvalidArgument(format!(
            "class number bound must be at least 4, got {bound}"
        )));
    }
    let n = bound as usize;
    let a_max = ((bound / 3) as f64).sqrt() as u64 + 1;
    let a_values: Vec<u64> = (1..=a_max).filter(|a| 3 * a * a <= bound).collect();
    // Work per a is roughly bound/2, so equal-length chunks balance well.
    let chunks = (rayon::current_num_threads() * 2).max(1);
    let chunk_len = a_values.len().div_ceil(chunks).max(1);
    let partials: Vec<Vec<u32>> = a_values
        .par_chunks(chunk_len)
        .map(|chunk| {
            let mut local = vec![0u32; n + 1];
            for &a in chunk {
                count_forms_with_a(a, bound, &mut local);
            }
            local
        })
        .collect();
    let mut h = vec![0u32; n + 1];
    for part in partials {
        for (acc, x) in h.iter_mut().zip(part) {
            *acc += x;
        }
    }
    Ok(ClassNumberTable {
        bound,
        h,
        sieve: FactorSieve::new(bound)?,
    })
}

fn count_forms_with_a(a: u64, bound: u64, h: &mut [u32]) {
    let a_i = a as i64;
    for b in (1 - a_i)..=a_i {
        let b2 = (b * b) as u64;
        let c_start = if b < 0 { a + 1 } else { a };
        let c_end = (bound + b2) / (4 * a);
        if c_end < c_start {
            continue;
        }
        let g = a.gcd(&b.unsigned_abs());
        for c in c_start..=c_end {
            if g != 1 && g.gcd(&c) != 1 {
                continue;
            }
            h[(4 * a * c - b2) as usize] += 1;
        }
    }
}

impl ClassNumberTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn sieve(&self) -> &FactorSieve {
        &self.sieve
    }

    fn check(&self, abs_d: u64) -> Result<()> {
        if abs_d > self.bound {
            Err(Error::OutOfRange {
                what: "class number table",
                required: abs_d,
                available: self.bound,
            })
        } else {
            Ok(())
        }
    }

    /// h(D) for a negative discriminant D.
    pub fn h(&self, disc: i64) -> Result<u32> {
        let r = disc.rem_euclid(4);
        if disc >= 0 || (r != 0 && r != 1) {
            return Err(Error::InvalidArgument(format!(
                "{disc} is not a negative discriminant"
            )));
        }
        self.check(disc.unsigned_abs())?;
        Ok(self.h[disc.unsigned_abs() as usize])
    }

    /// 12·h(d)/w(d)·∏_{p|ℓ}(p^e + (1 − (d/p))(p^e − 1)/(p − 1)) for D = dℓ² < 0.
    ///
    /// This is the class weight appearing in the elliptic terms of the trace
    /// formula, scaled by 12 so it is an integer.
    pub fn class_weight_x12(&self, disc: i64) -> Result<u64> {
        let (f, h) = self.fundamental_part(disc)?;
        let w = units_unchecked(f.fundamental) as u64;
        Ok(h as u64 * (12 / w) * self.conductor_factor(&f)?)
    }

    fn fundamental_part(&self, disc: i64) -> Result<(DiscriminantFactorization, u32)> {
        if disc >= 0 {
            return Err(Error::InvalidArgument(format!(
                "expected a negative discriminant, got {disc}"
            )));
        }
        self.check(disc.unsigned_abs())?;
        let f = decompose_discriminant(disc, &self.sieve)?;
        let h = self.h[f.fundamental.unsigned_abs() as usize];
        Ok((f, h))
    }

    fn conductor_factor(&self, f: &DiscriminantFactorization) -> Result<u64> {
        if f.conductor == 1 {
            return Ok(1);
        }
        let mut prod = 1u64;
        for (p, e) in self.sieve.factorize(f.conductor)? {
            let pe = p.pow(e);
            let chi = kronecker(f.fundamental, p) as i64;
            prod *= (pe as i64 + (1 - chi) * ((pe - 1) / (p - 1)) as i64) as u64;
        }
        Ok(prod)
    }

    /// L(1, ψ_D) by the class number formula,
    /// 2π·h(d)/(w(d)·√|D|)·∏_{p|ℓ}(p^e + (1 − (d/p))(p^e − 1)/(p − 1)).
    pub fn l1_psi_d(&self, disc: i64) -> Result<f64> {
        let weight = self.class_weight_x12(disc)? as f64 / 12.0;
        Ok(2.0 * PI * weight / (disc.unsigned_abs() as f64).sqrt())
    }

    /// L(1, ψ_D) for every discriminant −bound ≤ D < 0, indexed by |D|
    /// (entries for non-discriminants are NaN).
    pub fn l1_values(&self) -> Result<Vec<f64>> {
        (0..=self.bound)
            .into_par_iter()
            .map(|abs_d| {
                if abs_d >= 3 && (abs_d % 4 == 0 || abs_d % 4 == 3) {
                    self.l1_psi_d(-(abs_d as i64))
                } else {
                    Ok(f64::NAN)
                }
            })
            .collect()
    }

    /// Persist in the `MRMCLS01` layout: magic, u64 LE bound, then u32 LE
    /// h values for |D| = 3, 4, 7, 8, … ≤ bound.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.bound.to_le_bytes())?;
        let mut buf = Vec::with_capacity(cache_entries(self.bound) * 4);
        for abs_d in discriminant_indices(self.bound) {
            buf.extend_from_slice(&self.h[abs_d as usize].to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Format("truncated header".into()))?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut b = [0u8; 8];
        r.read_exact(&mut b)
            .map_err(|_| Error::Format("truncated header".into()))?;
        let bound = u64::from_le_bytes(b);
        if !(4..=u32::MAX as u64).contains(&bound) {
            return Err(Error::Format(format!("implausible bound {bound}")));
        }
        let mut body = Vec::new();
        r.read_to_end(&mut body)?;
        let expected = cache_entries(bound) * 4;
        if body.len() != expected {
            return Err(Error::Format(format!(
                "body has {} bytes, bound {bound} needs {expected}",
                body.len()
            )));
        }
        let mut h = vec![0u32; bound as usize + 1];
        for (abs_d, chunk) in discriminant_indices(bound).zip(body.chunks_exact(4)) {
            h[abs_d as usize] = u32::from_le_bytes(chunk.try_into().unwrap());
        }
        Ok(Self {
            bound,
            h,
            sieve: FactorSieve::new(bound)?,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

/// |D| values with D ≡ 0, 1 mod 4, D < 0, in increasing order.
fn discriminant_indices(bound: u64) -> impl Iterator<Item = u64> {
    (3..=bound).filter(|x| x % 4 == 0 || x % 4 == 3)
}

fn cache_entries(bound: u64) -> usize {
    (bound / 4 * 2 + u64::from(bound % 4 == 3)) as usize
}

/// ψ̄_t(m) = φ(m²)⁻¹ Σ_{n mod m², (n,m)=1} ψ_{t²−4n}(m), exactly.
///
/// The sieve must cover |t² − 4n| for 0 < n ≤ m².
pub fn psi_bar_bruteforce(t: i64, m: u64, sieve: &FactorSieve) -> Result<Ratio<i64>> {
    if m == 0 {
        return Err(Error::InvalidArgument("psi_bar needs m ≥ 1".into()));
    }
    let m2 = m * m;
    let mut total = 0i64;
    let mut count = 0i64;
    for n in 1..=m2 {
        if n.gcd(&m) != 1 {
            continue;
        }
        count += 1;
        let disc = t * t - 4 * n as i64;
        total += psi_d(disc, m, sieve)? as i64;
    }
    Ok(Ratio::new(total, count))
}

/// Closed-form Euler factor ψ̄_t(p^e).
pub fn psi_bar_local(t: i64, p: u64, e: u32) -> Ratio<i64> {
    if e == 0 {
        return Ratio::from_integer(1);
    }
    let sign = if e % 2 == 0 { 1 } else { -1 };
    let divides = t % p as i64 == 0;
    if p == 2 {
        if !divides {
            return Ratio::from_integer(sign);
        }
        if t % 4 == 0 {
            return Ratio::new(1 - sign, 4);
        }
        let sixteen = 16i64.pow(e / 2);
        let num = 15 + sixteen - 1;
        return Ratio::new(2 * num, 15 * 4i64.pow(e));
    }
    if divides {
        return Ratio::new(1 + sign, 2);
    }
    let p = p as i64;
    let phi = |j: u32| if j == 0 { 1 } else { p.pow(j) - p.pow(j - 1) };
    let mut num = -p.pow(2 * e - 1);
    for k in 0..=e / 2 {
        num += phi(4 * k);
    }
    Ratio::new(num, phi(2 * e))
}

/// ψ̄_t(m) assembled from its Euler factors.
pub fn psi_bar(t: i64, m: u64, sieve: &FactorSieve) -> Result<Ratio<i64>> {
    let mut acc = Ratio::from_integer(1);
    for (p, e) in sieve.factorize(m)? {
        acc *= psi_bar_local(t, p, e);
    }
    Ok(acc)
}

/// L(1, ψ̄_t) = C·f(t), with C the Euler product over the sieve primes.
#[derive(Debug, Clone)]
pub struct LocalAverageL1 {
    c: f64,
    sieve: FactorSieve,
    f_zero: f64,
}

impl LocalAverageL1 {
    /// Build over a factor sieve bounding both the Euler product for C and
    /// the |t| that will be queried.
    pub fn new(sieve: FactorSieve) -> Self {
        let c = sieve.euler_constant_c();
        let f_zero = sieve.f_at_zero().accelerated;
        Self { c, sieve, f_zero }
    }

    pub fn with_bound(bound: u64) -> Result<Self> {
        Ok(Self::new(FactorSieve::new(bound)?))
    }

    /// The constant C = L(1, ψ̄_1).
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sieve(&self) -> &FactorSieve {
        &self.sieve
    }

    /// f(t), with f(0) the accelerated full product.
    pub fn f(&self, t: i64) -> Result<f64> {
        if t == 0 {
            Ok(self.f_zero)
        } else {
            self.sieve.f_multiplicative(t)
        }
    }

    pub fn value(&self, t: i64) -> Result<f64> {
        Ok(self.c * self.f(t)?)
    }

    /// ∏_{p ∤ t} (p² − p − 1)/(p² − p) = C·f(t)/ζ(2).
    pub fn coprime_product(&self, t: i64) -> Result<f64> {
        Ok(self.value(t)? / crate::numeric::ZETA2)
    }
}
