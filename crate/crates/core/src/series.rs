//! Truncated formal power series over a [`CoefficientRing`].
//!
//! A series of order `N` stores the coefficients of `q^0 ..= q^N`; everything
//! above `q^N` is unknown and never stored. Binary operations on series of
//! different orders truncate to the smaller one.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::ring::{integer_unit_inverse, mod_inverse, reduce_bigint, CoefficientRing};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    data: Coeffs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Coeffs {
    Integer(Vec<BigInt>),
    Modular { modulus: u64, values: Vec<u64> },
}

impl Series {
    pub fn zero(ring: CoefficientRing, order: usize) -> Series {
        let data = match ring {
            CoefficientRing::Integer => Coeffs::Integer(vec![BigInt::zero(); order + 1]),
            CoefficientRing::Modular(modulus) => Coeffs::Modular {
                modulus,
                values: vec![0; order + 1],
            },
        };
        Series { data }
    }

    pub fn one(ring: CoefficientRing, order: usize) -> Series {
        Series::monomial(ring, order, 0, 1)
    }

    /// `c * q^k`, truncated at `order` (so zero when `k > order`).
    pub fn monomial(ring: CoefficientRing, order: usize, k: usize, c: i64) -> Series {
        Series::from_sparse(ring, order, std::iter::once((k, c)))
    }

    /// Builds a series from `(exponent, coefficient)` pairs, summing repeats
    /// and dropping exponents above `order`.
    pub fn from_sparse<I>(ring: CoefficientRing, order: usize, terms: I) -> Series
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let mut s = Series::zero(ring, order);
        match &mut s.data {
            Coeffs::Integer(v) => {
                for (k, c) in terms {
                    if k <= order {
                        v[k] += c;
                    }
                }
            }
            Coeffs::Modular { modulus, values } => {
                let m = *modulus;
                for (k, c) in terms {
                    if k <= order {
                        let r = (c as i128).rem_euclid(m as i128) as u64;
                        values[k] = add_mod(values[k], r, m);
                    }
                }
            }
        }
        s
    }

    /// Order is `coeffs.len() - 1`; `coeffs` must be non-empty.
    pub fn from_i64(ring: CoefficientRing, coeffs: &[i64]) -> Result<Series> {
        if coeffs.is_empty() {
            return Err(contract("a series needs at least the constant coefficient"));
        }
        Ok(Series::from_sparse(
            ring,
            coeffs.len() - 1,
            coeffs.iter().copied().enumerate(),
        ))
    }

    pub fn from_bigints(ring: CoefficientRing, coeffs: Vec<BigInt>) -> Result<Series> {
        if coeffs.is_empty() {
            return Err(contract("a series needs at least the constant coefficient"));
        }
        let data = match ring {
            CoefficientRing::Integer => Coeffs::Integer(coeffs),
            CoefficientRing::Modular(modulus) => Coeffs::Modular {
                modulus,
                values: coeffs.iter().map(|c| reduce_bigint(c, modulus)).collect(),
            },
        };
        Ok(Series { data })
    }

    pub fn ring(&self) -> CoefficientRing {
        match &self.data {
            Coeffs::Integer(_) => CoefficientRing::Integer,
            Coeffs::Modular { modulus, .. } => CoefficientRing::Modular(*modulus),
        }
    }

    /// Truncation order `N`: coefficients of `q^0..=q^N` are known.
    pub fn order(&self) -> usize {
        self.len() - 1
    }

    fn len(&self) -> usize {
        match &self.data {
            Coeffs::Integer(v) => v.len(),
            Coeffs::Modular { values, .. } => values.len(),
        }
    }

    /// Coefficient of `q^n` (the canonical residue for modular rings).
    ///
    /// Panics if `n` exceeds the order.
    pub fn coeff(&self, n: usize) -> BigInt {
        match &self.data {
            Coeffs::Integer(v) => v[n].clone(),
            Coeffs::Modular { values, .. } => BigInt::from(values[n]),
        }
    }

    pub fn coefficients(&self) -> Vec<BigInt> {
        (0..self.len()).map(|n| self.coeff(n)).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Coeffs::Integer(v) => v.iter().all(Zero::is_zero),
            Coeffs::Modular { values, .. } => values.iter().all(|&x| x == 0),
        }
    }

    fn is_zero_at(&self, n: usize) -> bool {
        match &self.data {
            Coeffs::Integer(v) => v[n].is_zero(),
            Coeffs::Modular { values, .. } => values[n] == 0,
        }
    }

    /// Truncates to `order`; a no-op when `order` is not smaller.
    pub fn truncate(&self, order: usize) -> Series {
        let keep = order.min(self.order()) + 1;
        let data = match &self.data {
            Coeffs::Integer(v) => Coeffs::Integer(v[..keep].to_vec()),
            Coeffs::Modular { modulus, values } => Coeffs::Modular {
                modulus: *modulus,
                values: values[..keep].to_vec(),
            },
        };
        Series { data }
    }

    fn check_ring(&self, other: &Series) -> Result<()> {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch {
                left: self.ring(),
                right: other.ring(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_ring(other)?;
        let n = self.len().min(other.len());
        let data = match (&self.data, &other.data) {
            (Coeffs::Integer(a), Coeffs::Integer(b)) => {
                Coeffs::Integer(a[..n].iter().zip(&b[..n]).map(|(x, y)| x + y).collect())
            }
            (Coeffs::Modular { modulus, values: a }, Coeffs::Modular { values: b, .. }) => {
                let m = *modulus;
                Coeffs::Modular {
                    modulus: m,
                    values: a[..n].iter().zip(&b[..n]).map(|(&x, &y)| add_mod(x, y, m)).collect(),
                }
            }
            _ => unreachable!("rings checked"),
        };
        Ok(Series { data })
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        let data = match &self.data {
            Coeffs::Integer(v) => Coeffs::Integer(v.iter().map(|x| -x).collect()),
            Coeffs::Modular { modulus, values } => Coeffs::Modular {
                modulus: *modulus,
                values: values.iter().map(|&x| neg_mod(x, *modulus)).collect(),
            },
        };
        Series { data }
    }

    pub fn scale(&self, c: &BigInt) -> Series {
        let data = match &self.data {
            Coeffs::Integer(v) => Coeffs::Integer(v.iter().map(|x| x * c).collect()),
            Coeffs::Modular { modulus, values } => {
                let m = *modulus;
                let c = reduce_bigint(c, m);
                Coeffs::Modular {
                    modulus: m,
                    values: values.iter().map(|&x| mul_mod(x, c, m)).collect(),
                }
            }
        };
        Series { data }
    }

    pub fn scale_i64(&self, c: i64) -> Series {
        self.scale(&BigInt::from(c))
    }

    /// Multiplication by `q^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Series {
        let mut out = Series::zero(self.ring(), self.order());
        let n = self.len();
        if k < n {
            match (&mut out.data, &self.data) {
                (Coeffs::Integer(dst), Coeffs::Integer(src)) => dst[k..].clone_from_slice(&src[..n - k]),
                (Coeffs::Modular { values: dst, .. }, Coeffs::Modular { values: src, .. }) => {
                    dst[k..].copy_from_slice(&src[..n - k])
                }
                _ => unreachable!(),
            }
        }
        out
    }

    fn nonzero_count(&self) -> usize {
        (0..self.len()).filter(|&n| !self.is_zero_at(n)).count()
    }

    /// Truncated Cauchy product. The sparser operand drives the outer loop,
    /// so products with theta series cost `O(nnz * N)`.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_ring(other)?;
        let n = self.len().min(other.len());
        let (outer, inner) = if self.nonzero_count() <= other.nonzero_count() {
            (self, other)
        } else {
            (other, self)
        };
        let data = match (&outer.data, &inner.data) {
            (Coeffs::Integer(a), Coeffs::Integer(b)) => {
                let mut acc = vec![BigInt::zero(); n];
                for (i, x) in a[..n].iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (dst, y) in acc[i..].iter_mut().zip(&b[..n - i]) {
                        if !y.is_zero() {
                            *dst += x * y;
                        }
                    }
                }
                Coeffs::Integer(acc)
            }
            (Coeffs::Modular { modulus, values: a }, Coeffs::Modular { values: b, .. }) => Coeffs::Modular {
                modulus: *modulus,
                values: convolve_mod(&a[..n], &b[..n], *modulus),
            },
            _ => unreachable!("rings checked"),
        };
        Ok(Series { data })
    }

    /// `self^k` by repeated squaring; `k = 0` gives 1.
    pub fn pow(&self, k: u32) -> Result<Series> {
        let mut result = Series::one(self.ring(), self.order());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Multiplicative inverse through the series order, by the recurrence
    /// `b_0 = a_0^{-1}`, `b_n = -a_0^{-1} * sum_{j=1..n} a_j b_{n-j}`.
    pub fn inverse(&self) -> Result<Series> {
        let n = self.len();
        let support: Vec<usize> = (1..n).filter(|&j| !self.is_zero_at(j)).collect();
        let data = match &self.data {
            Coeffs::Integer(a) => {
                let inv0 = integer_unit_inverse(&a[0]).ok_or_else(|| Error::NonInvertible {
                    constant: a[0].to_string(),
                    ring: self.ring(),
                })?;
                let neg_inv0 = -inv0.clone();
                let mut b: Vec<BigInt> = Vec::with_capacity(n);
                b.push(inv0);
                for k in 1..n {
                    let mut s = BigInt::zero();
                    for &j in support.iter().take_while(|&&j| j <= k) {
                        if !b[k - j].is_zero() {
                            s += &a[j] * &b[k - j];
                        }
                    }
                    b.push(if neg_inv0.is_one() { s } else { -s });
                }
                Coeffs::Integer(b)
            }
            Coeffs::Modular { modulus, values: a } => {
                let m = *modulus;
                let inv0 = mod_inverse(a[0], m).ok_or_else(|| Error::NonInvertible {
                    constant: a[0].to_string(),
                    ring: self.ring(),
                })?;
                let neg_inv0 = neg_mod(inv0, m);
                let mut b = vec![0u64; n];
                b[0] = inv0;
                for k in 1..n {
                    let mut s: u128 = 0;
                    for &j in support.iter().take_while(|&&j| j <= k) {
                        s = (s + a[j] as u128 * b[k - j] as u128) % m as u128;
                    }
                    b[k] = mul_mod(s as u64, neg_inv0, m);
                }
                Coeffs::Modular { modulus: m, values: b }
            }
        };
        Ok(Series { data })
    }

    /// `f(q) -> f(q^m)`, keeping the order.
    pub fn substitute_power(&self, m: usize) -> Result<Series> {
        self.upsample(m, self.order())
    }

    /// `f(q) -> f(q^m)` as a series of the given order; `self` must be known
    /// through `q^(order / m)`.
    pub fn upsample(&self, m: usize, order: usize) -> Result<Series> {
        if m == 0 {
            return Err(contract("substitute_power needs m >= 1"));
        }
        if order / m > self.order() {
            return Err(Error::InsufficientOrder {
                required: order / m,
                available: self.order(),
            });
        }
        let mut out = Series::zero(self.ring(), order);
        let n = order + 1;
        match (&mut out.data, &self.data) {
            (Coeffs::Integer(dst), Coeffs::Integer(src)) => {
                for (k, c) in src.iter().enumerate().take_while(|(k, _)| k * m < n) {
                    dst[k * m] = c.clone();
                }
            }
            (Coeffs::Modular { values: dst, .. }, Coeffs::Modular { values: src, .. }) => {
                for (k, &c) in src.iter().enumerate().take_while(|(k, _)| k * m < n) {
                    dst[k * m] = c;
                }
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// `f(q) -> f(-q)`.
    pub fn negate_variable(&self) -> Series {
        let data = match &self.data {
            Coeffs::Integer(v) => Coeffs::Integer(
                v.iter()
                    .enumerate()
                    .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                    .collect(),
            ),
            Coeffs::Modular { modulus, values } => Coeffs::Modular {
                modulus: *modulus,
                values: values
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| if k % 2 == 1 { neg_mod(c, *modulus) } else { c })
                    .collect(),
            },
        };
        Series { data }
    }

    /// The series `sum_n a_{mn+r} q^n`: the residue-`r` part of an
    /// `m`-dissection, shifted down and reindexed.
    pub fn extract_progression(&self, m: usize, r: usize) -> Result<Series> {
        if m == 0 || r >= m {
            return Err(contract(format!(
                "extract_progression needs 0 <= r < m, got m={m}, r={r}"
            )));
        }
        if r > self.order() {
            return Err(Error::InsufficientOrder {
                required: r,
                available: self.order(),
            });
        }
        let data = match &self.data {
            Coeffs::Integer(v) => Coeffs::Integer(v[r..].iter().step_by(m).cloned().collect()),
            Coeffs::Modular { modulus, values } => Coeffs::Modular {
                modulus: *modulus,
                values: values[r..].iter().step_by(m).copied().collect(),
            },
        };
        Ok(Series { data })
    }

    /// Entrywise reduction into `Z/MZ`. A modular series can be reduced
    /// further when `M` divides its modulus.
    pub fn reduce_mod(&self, m: u64) -> Result<Series> {
        let target = CoefficientRing::modular(m)?;
        let values = match &self.data {
            Coeffs::Integer(v) => v.iter().map(|c| reduce_bigint(c, m)).collect(),
            Coeffs::Modular { modulus, values } => {
                if modulus % m != 0 {
                    return Err(contract(format!("cannot reduce a mod-{modulus} series modulo {m}")));
                }
                values.iter().map(|&c| c % m).collect()
            }
        };
        debug_assert_eq!(target.modulus(), Some(m));
        Ok(Series {
            data: Coeffs::Modular { modulus: m, values },
        })
    }

    /// Re-expresses the series in `ring`: identity, or a reduction.
    pub fn into_ring(&self, ring: CoefficientRing) -> Result<Series> {
        match ring {
            r if r == self.ring() => Ok(self.clone()),
            CoefficientRing::Modular(m) => self.reduce_mod(m),
            CoefficientRing::Integer => Err(contract("cannot lift a modular series to Z")),
        }
    }

    /// Index of the first coefficient where the two series differ, comparing
    /// through the smaller order.
    pub fn first_difference(&self, other: &Series) -> Result<Option<usize>> {
        self.check_ring(other)?;
        let n = self.len().min(other.len());
        Ok(match (&self.data, &other.data) {
            (Coeffs::Integer(a), Coeffs::Integer(b)) => (0..n).find(|&k| a[k] != b[k]),
            (Coeffs::Modular { values: a, .. }, Coeffs::Modular { values: b, .. }) => (0..n).find(|&k| a[k] != b[k]),
            _ => unreachable!(),
        })
    }

    /// Agreement of coefficients `0..=order`; both series must reach `order`.
    pub fn equals_to_order(&self, other: &Series, order: usize) -> Result<bool> {
        let available = self.order().min(other.order());
        if order > available {
            return Err(Error::InsufficientOrder {
                required: order,
                available,
            });
        }
        Ok(self.truncate(order).first_difference(&other.truncate(order))?.is_none())
    }

    /// In-place multiplication by `(1 - q^k)`.
    pub(crate) fn mul_one_minus_qk(&mut self, k: usize) {
        assert!(k >= 1);
        match &mut self.data {
            Coeffs::Integer(v) => {
                for n in (k..v.len()).rev() {
                    let (lo, hi) = v.split_at_mut(n);
                    hi[0] -= &lo[n - k];
                }
            }
            Coeffs::Modular { modulus, values } => {
                let m = *modulus;
                for n in (k..values.len()).rev() {
                    values[n] = add_mod(values[n], neg_mod(values[n - k], m), m);
                }
            }
        }
    }

    /// The largest absolute coefficient, for diagnostics.
    pub fn max_abs_coeff(&self) -> BigInt {
        (0..self.len()).map(|n| self.coeff(n).abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in 0..self.len() {
            if self.is_zero_at(n) {
                continue;
            }
            let c = self.coeff(n);
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*q")?,
                _ => write!(f, "{c}*q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{}) [{}]", self.len(), self.ring())
    }
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
fn neg_mod(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Truncated convolution of residue vectors of equal length. Reduction is
/// deferred as long as the worst-case accumulator fits the machine word.
fn convolve_mod(outer: &[u64], inner: &[u64], m: u64) -> Vec<u64> {
    let n = outer.len();
    let worst = (m as u128 - 1)
        .checked_mul(m as u128 - 1)
        .and_then(|sq| sq.checked_mul(n as u128));
    if worst.is_some_and(|w| w <= u64::MAX as u128) {
        let mut acc = vec![0u64; n];
        for (i, &x) in outer.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (dst, &y) in acc[i..].iter_mut().zip(&inner[..n - i]) {
                *dst += x * y;
            }
        }
        acc.into_iter().map(|v| v % m).collect()
    } else if worst.is_some() {
        let mut acc = vec![0u128; n];
        for (i, &x) in outer.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (dst, &y) in acc[i..].iter_mut().zip(&inner[..n - i]) {
                *dst += x as u128 * y as u128;
            }
        }
        acc.into_iter().map(|v| (v % m as u128) as u64).collect()
    } else {
        let mut acc = vec![0u64; n];
        for (i, &x) in outer.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (dst, &y) in acc[i..].iter_mut().zip(&inner[..n - i]) {
                *dst = add_mod(*dst, mul_mod(x, y, m), m);
            }
        }
        acc
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    ring: CoefficientRing,
    order: usize,
    coeffs: Vec<String>,
}

/// JSON form `{"ring": "Z" | {"mod": M}, "order": N, "coeffs": ["..", ...]}`.
impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            ring: self.ring(),
            order: self.order(),
            coeffs: self.coefficients().iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SeriesRepr::deserialize(d)?;
        if repr.coeffs.len() != repr.order + 1 {
            return Err(D::Error::custom(format!(
                "order {} needs {} coefficients, found {}",
                repr.order,
                repr.order + 1,
                repr.coeffs.len()
            )));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| c.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if let Some(m) = repr.ring.modulus() {
            if coeffs.iter().any(|c| c.is_negative() || *c >= BigInt::from(m)) {
                return Err(D::Error::custom("modular coefficient outside [0, M)"));
            }
        }
        Series::from_bigints(repr.ring, coeffs).map_err(D::Error::custom)
    }
}
