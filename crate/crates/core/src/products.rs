//! Infinite q-Pochhammer products, eta quotients and the Jacobi cube.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::ring::CoefficientRing;
use crate::series::Series;

/// One factor `(q^offset; q^step)_inf ^ exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PochhammerFactor {
    pub offset: usize,
    pub step: usize,
    pub exponent: i64,
}

/// A formal eta quotient: a product of Pochhammer symbols with integer
/// exponents, kept canonical (one factor per `(offset, step)`, sorted, no
/// zero exponents) so that equal quotients compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ProductSpec {
    factors: Vec<PochhammerFactor>,
}

impl ProductSpec {
    pub fn new<I>(factors: I) -> Result<ProductSpec>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        let mut merged: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (offset, step, exponent) in factors {
            check_offset_step(offset, step)?;
            *merged.entry((step, offset)).or_default() += exponent;
        }
        let factors = merged
            .into_iter()
            .filter(|&(_, e)| e != 0)
            .map(|((step, offset), exponent)| PochhammerFactor { offset, step, exponent })
            .collect();
        Ok(ProductSpec { factors })
    }

    /// Quotient of the `(q^b; q^b)_inf` symbols only, given as `(b, exponent)`.
    pub fn eta<I>(steps: I) -> Result<ProductSpec>
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        ProductSpec::new(steps.into_iter().map(|(b, e)| (b, b, e)))
    }

    pub fn one() -> ProductSpec {
        ProductSpec::default()
    }

    pub fn factors(&self) -> &[PochhammerFactor] {
        &self.factors
    }

    pub fn inverse(&self) -> ProductSpec {
        ProductSpec {
            factors: self
                .factors
                .iter()
                .map(|f| PochhammerFactor {
                    exponent: -f.exponent,
                    ..*f
                })
                .collect(),
        }
    }

    pub fn times(&self, other: &ProductSpec) -> ProductSpec {
        let all = self
            .factors
            .iter()
            .chain(&other.factors)
            .map(|f| (f.offset, f.step, f.exponent));
        ProductSpec::new(all).expect("factors already validated")
    }
}

// JSON form: [[a, b, e], ...]
impl Serialize for ProductSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let triples: Vec<(usize, usize, i64)> = self.factors.iter().map(|f| (f.offset, f.step, f.exponent)).collect();
        triples.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProductSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let triples = Vec::<(usize, usize, i64)>::deserialize(d)?;
        ProductSpec::new(triples).map_err(serde::de::Error::custom)
    }
}

fn check_offset_step(offset: usize, step: usize) -> Result<()> {
    if offset < 1 || offset > step {
        return Err(contract(format!(
            "Pochhammer symbol (q^{offset}; q^{step}) needs 1 <= offset <= step"
        )));
    }
    Ok(())
}

/// `prod_{k>=0} (1 - q^{offset + k*step})` through `q^order`.
///
/// `(q;q)_inf` goes through the pentagonal-number expansion; every other
/// symbol is multiplied out factor by factor.
pub fn pochhammer(offset: usize, step: usize, order: usize, ring: CoefficientRing) -> Result<Series> {
    check_offset_step(offset, step)?;
    if offset == 1 && step == 1 {
        return Ok(euler_pentagonal(order, ring));
    }
    Ok(pochhammer_direct(offset, step, order, ring))
}

pub(crate) fn pochhammer_direct(offset: usize, step: usize, order: usize, ring: CoefficientRing) -> Series {
    let mut s = Series::one(ring, order);
    let mut k = offset;
    while k <= order {
        s.mul_one_minus_qk(k);
        k += step;
    }
    s
}

/// Generalized pentagonal numbers `j(3j-1)/2` for `j = 0, 1, -1, 2, -2, ...`
/// up to `order`, with the sign `(-1)^j`.
pub fn pentagonal_terms(order: usize) -> Vec<(usize, i64)> {
    let mut terms = vec![(0, 1)];
    for j in 1usize.. {
        let sign = if j % 2 == 1 { -1 } else { 1 };
        let lo = j * (3 * j - 1) / 2;
        if lo > order {
            break;
        }
        terms.push((lo, sign));
        let hi = j * (3 * j + 1) / 2;
        if hi <= order {
            terms.push((hi, sign));
        }
    }
    terms
}

fn euler_pentagonal(order: usize, ring: CoefficientRing) -> Series {
    Series::from_sparse(ring, order, pentagonal_terms(order))
}

/// Expands an eta quotient. Negative exponents invert the base once and raise
/// the inverse to `|e|`.
pub fn eta_quotient(spec: &ProductSpec, order: usize, ring: CoefficientRing) -> Result<Series> {
    let mut out = Series::one(ring, order);
    for f in spec.factors() {
        let base = pochhammer(f.offset, f.step, order, ring)?;
        let base = if f.exponent < 0 { base.inverse()? } else { base };
        let e = u32::try_from(f.exponent.unsigned_abs()).map_err(|_| contract("eta quotient exponent too large"))?;
        out = out.mul(&base.pow(e)?)?;
    }
    Ok(out)
}

/// `sum_{n>=0} (-1)^n (2n+1) q^{n(n+1)/2}`, which is `(q;q)_inf^3`.
pub fn jacobi_cube(order: usize, ring: CoefficientRing) -> Series {
    let terms = (0usize..)
        .map(|n| (n * (n + 1) / 2, n))
        .take_while(|&(e, _)| e <= order)
        .map(|(e, n)| {
            let c = 2 * n as i64 + 1;
            (e, if n % 2 == 0 { c } else { -c })
        });
    Series::from_sparse(ring, order, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use CoefficientRing::{Integer, Modular};

    fn z(coeffs: &[i64]) -> Series {
        Series::from_i64(Integer, coeffs).unwrap()
    }

    #[test]
    fn euler_product_low_order() {
        assert_eq!(
            pochhammer(1, 1, 12, Integer).unwrap(),
            z(&[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1])
        );
    }

    #[test]
    fn pentagonal_fast_path_matches_direct_product() {
        for ring in [Integer, Modular(2187), Modular(4)] {
            for order in [0, 1, 7, 100, 777] {
                assert_eq!(
                    pochhammer(1, 1, order, ring).unwrap(),
                    pochhammer_direct(1, 1, order, ring)
                );
            }
        }
    }

    #[test]
    fn euler_product_support_is_pentagonal() {
        let e = pochhammer_direct(1, 1, 500, Integer);
        let pent: Vec<usize> = pentagonal_terms(500).iter().map(|t| t.0).collect();
        for n in 0..=500 {
            let c = e.coeff(n);
            assert!(c >= (-1).into() && c <= 1.into());
            assert_eq!(c != 0.into(), pent.contains(&n), "n = {n}");
        }
    }

    #[test]
    fn small_pochhammers() {
        assert_eq!(pochhammer(3, 3, 2, Integer).unwrap(), z(&[1, 0, 0]));
        // (1-q^2)(1-q^4)(1-q^6): the q^6 terms cancel.
        assert_eq!(pochhammer(2, 2, 6, Integer).unwrap(), z(&[1, 0, -1, 0, -1, 0, 0]));
        assert!(pochhammer(4, 3, 10, Integer).is_err());
        assert!(pochhammer(0, 3, 10, Integer).is_err());
    }

    #[test]
    fn spec_canonicalization() {
        let a = ProductSpec::new([(1, 1, 2), (2, 2, 1), (1, 1, -2), (4, 4, 3)]).unwrap();
        let b = ProductSpec::new([(4, 4, 3), (2, 2, 1)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.factors().len(), 2);
        assert!(ProductSpec::new([(5, 3, 1)]).is_err());
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, "[[2,2,1],[4,4,3]]");
        assert_eq!(serde_json::from_str::<ProductSpec>(&json).unwrap(), b);
        assert!(serde_json::from_str::<ProductSpec>("[[3,2,1]]").is_err());
    }

    #[test]
    fn eta_quotient_examples() {
        let p = eta_quotient(&ProductSpec::eta([(1, -1)]).unwrap(), 5, Integer).unwrap();
        assert_eq!(p, z(&[1, 1, 2, 3, 5, 7]));
        assert_eq!(
            eta_quotient(&ProductSpec::one(), 4, Integer).unwrap(),
            Series::one(Integer, 4)
        );
        let phi = ProductSpec::new([(2, 2, 5), (1, 1, -2), (4, 4, -2)]).unwrap();
        assert_eq!(
            eta_quotient(&phi, 9, Integer).unwrap(),
            z(&[1, 2, 0, 0, 2, 0, 0, 0, 0, 2])
        );
    }

    #[test]
    fn eta_quotient_times_its_inverse_is_one() {
        let spec = ProductSpec::new([(1, 1, -23), (3, 3, 9), (4, 4, 1), (1, 3, 2)]).unwrap();
        for ring in [Integer, Modular(243)] {
            let a = eta_quotient(&spec, 120, ring).unwrap();
            let b = eta_quotient(&spec.inverse(), 120, ring).unwrap();
            assert_eq!(a.mul(&b).unwrap(), Series::one(ring, 120));
        }
    }

    #[test]
    fn jacobi_cube_low_order() {
        assert_eq!(jacobi_cube(10, Integer), z(&[1, -3, 0, 5, 0, 0, -7, 0, 0, 0, 9]));
        assert_eq!(jacobi_cube(0, Integer), z(&[1]));
    }

    #[test]
    fn jacobi_cube_is_euler_product_cubed() {
        for order in [1, 2, 50, 200, 500] {
            let cube = pochhammer(1, 1, order, Integer).unwrap().pow(3).unwrap();
            assert_eq!(jacobi_cube(order, Integer), cube, "order {order}");
        }
    }
}
