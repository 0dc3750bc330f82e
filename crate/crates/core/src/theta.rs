//! Ramanujan's theta functions `phi`, `psi`, the cubic theta function `a(q)`
//! and the two auxiliary series `X(q)`, `Y(q)`.
//!
//! Each series has two independent constructions: its defining sum, and an
//! eta quotient (a Lambert series for `a`). Agreement of the two is the
//! module's main self-check.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::products::{eta_quotient, ProductSpec};
use crate::ring::CoefficientRing;
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaKind {
    /// `phi(q) = sum_{n in Z} q^{n^2}`
    #[serde(rename = "phi")]
    Phi,
    /// `psi(q) = sum_{n >= 0} q^{n(n+1)/2}`
    #[serde(rename = "psi")]
    Psi,
    /// `a(q) = sum_{m,n in Z} q^{m^2+mn+n^2}`
    #[serde(rename = "a")]
    A,
    /// `X(q) = sum_{n in Z} q^{3n^2+2n}`
    X,
    /// `Y(q) = sum_{n in Z} q^{n(3n+1)/2}`
    Y,
}

impl ThetaKind {
    pub const ALL: [ThetaKind; 5] = [ThetaKind::Phi, ThetaKind::Psi, ThetaKind::A, ThetaKind::X, ThetaKind::Y];

    pub fn tag(&self) -> &'static str {
        match self {
            ThetaKind::Phi => "phi",
            ThetaKind::Psi => "psi",
            ThetaKind::A => "a",
            ThetaKind::X => "X",
            ThetaKind::Y => "Y",
        }
    }

    /// The eta quotient equal to this series. `None` for `a(q)`, whose
    /// alternate form is a Lambert series.
    pub fn product_spec(&self) -> Option<ProductSpec> {
        let steps: &[(usize, i64)] = match self {
            ThetaKind::Phi => &[(2, 5), (1, -2), (4, -2)],
            ThetaKind::Psi => &[(2, 2), (1, -1)],
            ThetaKind::X => &[(2, 2), (3, 1), (12, 1), (1, -1), (4, -1), (6, -1)],
            ThetaKind::Y => &[(2, 1), (3, 2), (1, -1), (6, -1)],
            ThetaKind::A => return None,
        };
        Some(ProductSpec::eta(steps.iter().copied()).expect("valid steps"))
    }
}

impl fmt::Display for ThetaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ThetaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ThetaKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::Parse(format!("unknown theta kind `{s}`")))
    }
}

/// Which of the two constructions to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    #[default]
    Sum,
    Alt,
}

/// Largest `r` with `r*r <= n`.
fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Exponents of the defining sum, one per summation index, through `order`.
fn sum_exponents(kind: ThetaKind, order: usize) -> Vec<usize> {
    let n = order as i64;
    let r = isqrt(order) as i64 + 1;
    let all_integers = |f: &dyn Fn(i64) -> i64| -> Vec<usize> {
        (-r..=r)
            .map(f)
            .filter(|&e| (0..=n).contains(&e))
            .map(|e| e as usize)
            .collect()
    };
    match kind {
        ThetaKind::Phi => all_integers(&|k| k * k),
        ThetaKind::X => all_integers(&|k| 3 * k * k + 2 * k),
        ThetaKind::Y => all_integers(&|k| k * (3 * k + 1) / 2),
        ThetaKind::Psi => (0..=isqrt(2 * order) as i64 + 1)
            .map(|k| k * (k + 1) / 2)
            .filter(|&e| e <= n)
            .map(|e| e as usize)
            .collect(),
        ThetaKind::A => {
            // m^2 + mn + n^2 >= 3n^2/4, so |m|, |n| <= 2 sqrt(N) is a complete window.
            let w = 2 * r;
            let mut out = Vec::new();
            for a in -w..=w {
                for b in -w..=w {
                    let e = a * a + a * b + b * b;
                    if e <= n {
                        out.push(e as usize);
                    }
                }
            }
            out
        }
    }
}

/// The defining sum, truncated at `order`.
pub fn theta_sum(kind: ThetaKind, order: usize, ring: CoefficientRing) -> Series {
    Series::from_sparse(ring, order, sum_exponents(kind, order).into_iter().map(|e| (e, 1)))
}

/// The alternate construction: the eta quotient, or for `a(q)` the Lambert
/// series `1 + 6 sum_{n>=0} (q^{3n+1}/(1-q^{3n+1}) - q^{3n+2}/(1-q^{3n+2}))`.
pub fn theta_alt(kind: ThetaKind, order: usize, ring: CoefficientRing) -> Result<Series> {
    match kind.product_spec() {
        Some(spec) => eta_quotient(&spec, order, ring),
        None => Ok(cubic_lambert(order, ring)),
    }
}

fn cubic_lambert(order: usize, ring: CoefficientRing) -> Series {
    let mut terms = vec![(0, 1)];
    for j in 1..=order {
        let c = match j % 3 {
            1 => 6,
            2 => -6,
            _ => continue,
        };
        terms.extend((j..=order).step_by(j).map(|e| (e, c)));
    }
    Series::from_sparse(ring, order, terms)
}

pub fn theta(kind: ThetaKind, construction: Construction, order: usize, ring: CoefficientRing) -> Result<Series> {
    match construction {
        Construction::Sum => Ok(theta_sum(kind, order, ring)),
        Construction::Alt => theta_alt(kind, order, ring),
    }
}

/// The argument `sign * q^m` at which a series is evaluated, as in `psi(-q^9)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPower {
    pub sign: i8,
    pub m: usize,
}

impl SignedPower {
    pub fn new(sign: i8, m: usize) -> Result<SignedPower> {
        if sign != 1 && sign != -1 {
            return Err(contract(format!("sign must be +1 or -1, got {sign}")));
        }
        if m == 0 {
            return Err(contract("signed power needs m >= 1"));
        }
        Ok(SignedPower { sign, m })
    }

    /// Order the inner series needs so that the result reaches `order`.
    pub fn inner_order(&self, order: usize) -> usize {
        order / self.m
    }
}

/// `f(sign * q^m)` through `order`: flip odd coefficients of `f` for a
/// negative sign, then substitute `q -> q^m`. So `phi(-q^2)` has coefficient
/// `(-1)^n` at `q^{2n^2}`.
pub fn eval_at_signed_power(f: &Series, at: SignedPower, order: usize) -> Result<Series> {
    let SignedPower { sign, m } = SignedPower::new(at.sign, at.m)?;
    if sign < 0 {
        f.negate_variable().upsample(m, order)
    } else {
        f.upsample(m, order)
    }
}

/// The pair `(a(q^3), 6q (q^9;q^9)^3 / (q^3;q^3))`, whose sum is `a(q)`.
pub fn a_cube_root_dissection(order: usize, ring: CoefficientRing) -> Result<(Series, Series)> {
    let a3 = theta_sum(ThetaKind::A, order / 3, ring).upsample(3, order)?;
    let spec = ProductSpec::eta([(9, 3), (3, -1)])?;
    let correction = eta_quotient(&spec, order, ring)?.scale_i64(6).shift(1);
    Ok((a3, correction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use CoefficientRing::{Integer, Modular};

    fn z(coeffs: &[i64]) -> Series {
        Series::from_i64(Integer, coeffs).unwrap()
    }

    #[test]
    fn defining_sums_low_order() {
        assert_eq!(
            theta_sum(ThetaKind::Phi, 9, Integer),
            z(&[1, 2, 0, 0, 2, 0, 0, 0, 0, 2])
        );
        assert_eq!(theta_sum(ThetaKind::Y, 7, Integer), z(&[1, 1, 1, 0, 0, 1, 0, 1]));
        assert_eq!(theta_sum(ThetaKind::A, 4, Integer), z(&[1, 6, 0, 6, 6]));
        assert_eq!(
            theta_sum(ThetaKind::Psi, 10, Integer),
            z(&[1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1])
        );
        assert_eq!(theta_sum(ThetaKind::X, 0, Integer), z(&[1]));
    }

    #[test]
    fn alternate_forms_low_order() {
        assert_eq!(
            theta_alt(ThetaKind::Psi, 10, Integer).unwrap(),
            z(&[1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1])
        );
        assert_eq!(
            theta_alt(ThetaKind::X, 8, Integer).unwrap(),
            z(&[1, 1, 0, 0, 0, 1, 0, 0, 1])
        );
        assert_eq!(theta_alt(ThetaKind::A, 3, Integer).unwrap(), z(&[1, 6, 0, 6]));
    }

    #[test]
    fn sum_and_alternate_agree() {
        for kind in ThetaKind::ALL {
            for ring in [Integer, Modular(2187)] {
                assert_eq!(
                    theta_sum(kind, 500, ring),
                    theta_alt(kind, 500, ring).unwrap(),
                    "{kind} over {ring}"
                );
            }
        }
    }

    #[test]
    fn three_dissections_of_phi_and_psi() {
        let n = 500;
        let phi = theta_sum(ThetaKind::Phi, n, Integer);
        let x = theta_sum(ThetaKind::X, n, Integer);
        let rhs = phi
            .substitute_power(9)
            .unwrap()
            .add(&x.substitute_power(3).unwrap().scale_i64(2).shift(1))
            .unwrap();
        assert_eq!(phi, rhs);

        let psi = theta_sum(ThetaKind::Psi, n, Integer);
        let y = theta_sum(ThetaKind::Y, n, Integer);
        let rhs = y
            .substitute_power(3)
            .unwrap()
            .add(&psi.substitute_power(9).unwrap().shift(1))
            .unwrap();
        assert_eq!(psi, rhs);

        assert!(phi.extract_progression(3, 2).unwrap().is_zero());
        assert!(psi.extract_progression(3, 2).unwrap().is_zero());
    }

    #[test]
    fn cube_root_dissection() {
        let (a3, c) = a_cube_root_dissection(1, Integer).unwrap();
        assert_eq!((a3, c), (z(&[1, 0]), z(&[0, 6])));
        let (a3, c) = a_cube_root_dissection(3, Integer).unwrap();
        assert_eq!((a3, c), (z(&[1, 0, 0, 6]), z(&[0, 6, 0, 0])));
        let (a3, c) = a_cube_root_dissection(200, Integer).unwrap();
        assert_eq!(a3.add(&c).unwrap(), theta_sum(ThetaKind::A, 200, Integer));
    }

    #[test]
    fn signed_power_means_negated_argument() {
        // phi(-q^2) = (q^2;q^2)^2 / (q^4;q^4)
        let phi = theta_sum(ThetaKind::Phi, 100, Integer);
        let lhs = eval_at_signed_power(&phi, SignedPower::new(-1, 2).unwrap(), 200).unwrap();
        let rhs = eta_quotient(&ProductSpec::eta([(2, 2), (4, -1)]).unwrap(), 200, Integer).unwrap();
        assert_eq!(lhs, rhs);
        // psi(-q) = (q;q)(q^4;q^4)/(q^2;q^2)
        let psi = theta_sum(ThetaKind::Psi, 200, Integer);
        let lhs = eval_at_signed_power(&psi, SignedPower::new(-1, 1).unwrap(), 200).unwrap();
        let rhs = eta_quotient(&ProductSpec::eta([(1, 1), (4, 1), (2, -1)]).unwrap(), 200, Integer).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, psi.negate_variable());
        assert!(SignedPower::new(0, 2).is_err());
        assert!(SignedPower::new(1, 0).is_err());
    }

    #[test]
    fn substitute_power_matches_direct_sum() {
        let phi = theta_sum(ThetaKind::Phi, 100, Integer);
        let direct = Series::from_sparse(Integer, 100, (-4i64..=4).map(|n| ((9 * n * n) as usize, 1)));
        assert_eq!(phi.substitute_power(9).unwrap(), direct);
    }

    #[test]
    fn kind_tags_parse() {
        for kind in ThetaKind::ALL {
            assert_eq!(kind.tag().parse::<ThetaKind>().unwrap(), kind);
            assert_eq!(serde_json::to_string(&kind).unwrap(), format!("\"{}\"", kind.tag()));
        }
        assert!("theta".parse::<ThetaKind>().is_err());
    }
}
