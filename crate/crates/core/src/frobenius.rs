//! Generating functions for k-colored generalized Frobenius partitions.
//!
//! Three routes to the same numbers:
//! - [`cphi_oracle`]: theta series of the quadratic form
//!   `Q(m) = sum m_i^2 + sum_{i<j} m_i m_j` on `Z^{k-1}` over `(q;q)_inf^k`;
//! - [`cphi6_gen`]: the closed theta-function formula for `k = 6`;
//! - [`cphi6_3n1`]: the closed formula for the `3n+1` subsequence at `k = 6`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::products::{eta_quotient, ProductSpec};
use crate::ring::CoefficientRing;
use crate::series::Series;
use crate::theta::{theta_sum, ThetaKind};

pub const MAX_COLORS: usize = 8;

/// `Theta_k(q) = sum_{m in Z^{k-1}} q^{Q(m)}` with exact lattice-point counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadFormTheta {
    pub k: usize,
    pub series: Series,
}

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

/// Counts lattice vectors by `Q` through dynamic programming on
/// `2Q = (sum m_i)^2 + sum m_i^2`.
///
/// The state after `j` variables is `(s, t)` = (partial sum, partial sum of
/// squares). Every completion satisfies `t <= 2N` and `s^2 <= kN/2`, so the
/// table is finite and nothing reachable is pruned.
pub fn quadform_theta(k: usize, order: usize) -> Result<QuadFormTheta> {
    if !(1..=MAX_COLORS).contains(&k) {
        return Err(contract(format!("colors must be in 1..={MAX_COLORS}, got {k}")));
    }
    let vars = k - 1;
    let t_max = 2 * order;
    let s_max = isqrt(k * order / 2) as i64;
    let m_max = isqrt(t_max) as i64;
    let width = t_max + 1;
    let idx = |s: i64, t: usize| (s + s_max) as usize * width + t;

    let mut table = vec![0u64; (2 * s_max as usize + 1) * width];
    table[idx(0, 0)] = 1;
    for _ in 0..vars {
        let mut next = vec![0u64; table.len()];
        for s in -s_max..=s_max {
            for t in 0..=t_max {
                let count = table[idx(s, t)];
                if count == 0 {
                    continue;
                }
                for m in -m_max..=m_max {
                    let t2 = t + (m * m) as usize;
                    let s2 = s + m;
                    if t2 > t_max || s2.abs() > s_max {
                        continue;
                    }
                    let slot = &mut next[idx(s2, t2)];
                    *slot = slot.checked_add(count).expect("lattice count overflow");
                }
            }
        }
        table = next;
    }

    let mut counts = vec![0i64; order + 1];
    for s in -s_max..=s_max {
        for t in 0..=t_max {
            let count = table[idx(s, t)];
            if count == 0 {
                continue;
            }
            let two_q = (s * s) as usize + t;
            debug_assert!(two_q.is_multiple_of(2));
            if two_q / 2 <= order {
                counts[two_q / 2] += count as i64;
            }
        }
    }
    Ok(QuadFormTheta {
        k,
        series: Series::from_i64(CoefficientRing::Integer, &counts)?,
    })
}

/// `sum_n cphi_k(n) q^n` straight from the defining quadratic form.
pub fn cphi_oracle(k: usize, order: usize) -> Result<Series> {
    cphi_oracle_in(k, order, CoefficientRing::Integer)
}

pub fn cphi_oracle_in(k: usize, order: usize, ring: CoefficientRing) -> Result<Series> {
    let theta = quadform_theta(k, order)?.series.into_ring(ring)?;
    let denom = eta_quotient(&ProductSpec::eta([(1, -(k as i64))])?, order, ring)?;
    theta.mul(&denom)
}

/// `sum_n cphi_6(n) q^n` from
/// `(phi^3(q) phi(q^2) phi(q^6) + 24q psi^3(q) psi(q^2) psi(q^3)
///   + 4q^2 phi^3(q) psi(q^4) psi(q^12)) / (q;q)_inf^6`.
pub fn cphi6_gen(order: usize, ring: CoefficientRing) -> Result<Series> {
    let phi = theta_sum(ThetaKind::Phi, order, ring);
    let psi = theta_sum(ThetaKind::Psi, order, ring);
    let phi3 = phi.pow(3)?;

    let first = phi3.mul(&phi.substitute_power(2)?)?.mul(&phi.substitute_power(6)?)?;
    let second = psi
        .pow(3)?
        .mul(&psi.substitute_power(2)?)?
        .mul(&psi.substitute_power(3)?)?
        .scale_i64(24)
        .shift(1);
    let third = phi3
        .mul(&psi.substitute_power(4)?)?
        .mul(&psi.substitute_power(12)?)?
        .scale_i64(4)
        .shift(2);

    let numerator = first.add(&second)?.add(&third)?;
    let denom = eta_quotient(&ProductSpec::eta([(1, -6)])?, order, ring)?;
    numerator.mul(&denom)
}

/// One summand `coefficient * q^shift * a(q)^a_power * quotient`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeN1Term {
    pub coefficient: i64,
    pub q_shift: usize,
    pub a_power: u32,
    pub quotient: ProductSpec,
}

/// `sign * prefactor * (sum of terms)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeN1Group {
    pub sign: i64,
    pub prefactor: ProductSpec,
    pub terms: Vec<ThreeN1Term>,
}

/// The closed formula for `sum_n cphi_6(3n+1) q^n` as data:
/// `scale * (group_1 + group_2 + group_3)`. Keeping every literal in data
/// lets tests perturb them one at a time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeN1Formula {
    pub scale: i64,
    pub groups: Vec<ThreeN1Group>,
}

fn eta(steps: &[(usize, i64)]) -> ProductSpec {
    ProductSpec::eta(steps.iter().copied()).expect("valid steps")
}

fn term(coefficient: i64, q_shift: usize, a_power: u32, quotient: &[(usize, i64)]) -> ThreeN1Term {
    ThreeN1Term {
        coefficient,
        q_shift,
        a_power,
        quotient: eta(quotient),
    }
}

impl Default for ThreeN1Formula {
    fn default() -> Self {
        ThreeN1Formula {
            scale: 9,
            groups: vec![
                ThreeN1Group {
                    sign: 1,
                    prefactor: eta(&[(2, 5), (3, 6), (1, -22), (4, -2)]),
                    terms: vec![term(2, 0, 5, &[(3, 3), (1, -1)]), term(189, 1, 2, &[(3, 12), (1, -4)])],
                },
                ThreeN1Group {
                    sign: 1,
                    prefactor: eta(&[(3, 9), (4, 1), (6, 2), (1, -23), (2, -1), (12, -1)]),
                    terms: vec![
                        term(2, 0, 6, &[]),
                        // The printed (q^9;q^9)^9 does not reproduce the
                        // series; (q^3;q^3)^9 does, coefficient for coefficient.
                        term(378, 1, 3, &[(3, 9), (1, -3)]),
                        term(1458, 2, 0, &[(3, 18), (1, -6)]),
                    ],
                },
                ThreeN1Group {
                    sign: -1,
                    prefactor: eta(&[(3, 9), (12, 2), (1, -23), (6, -1)]),
                    terms: vec![
                        term(36, 1, 5, &[(3, 3), (1, -1)]),
                        term(1944, 2, 2, &[(3, 12), (1, -4)]),
                    ],
                },
            ],
        }
    }
}

impl ThreeN1Formula {
    pub fn evaluate(&self, order: usize, ring: CoefficientRing) -> Result<Series> {
        let a = theta_sum(ThetaKind::A, order, ring);
        let mut a_powers: BTreeMap<u32, Series> = BTreeMap::new();
        let mut total = Series::zero(ring, order);
        for group in &self.groups {
            let mut inner = Series::zero(ring, order);
            for t in &group.terms {
                if let std::collections::btree_map::Entry::Vacant(slot) = a_powers.entry(t.a_power) {
                    slot.insert(a.pow(t.a_power)?);
                }
                let summand = a_powers[&t.a_power]
                    .mul(&eta_quotient(&t.quotient, order, ring)?)?
                    .scale_i64(t.coefficient)
                    .shift(t.q_shift);
                inner = inner.add(&summand)?;
            }
            let g = eta_quotient(&group.prefactor, order, ring)?
                .mul(&inner)?
                .scale_i64(group.sign);
            total = total.add(&g)?;
        }
        Ok(total.scale(&BigInt::from(self.scale)))
    }

    /// Every variant obtained by changing exactly one literal of the formula
    /// (a coefficient, sign, shift, power of `a`, or Pochhammer exponent) by
    /// one, labelled by what changed.
    pub fn single_literal_mutations(&self) -> Vec<(String, ThreeN1Formula)> {
        let mut out = Vec::new();
        let mut push = |label: String, f: ThreeN1Formula| {
            if f != *self {
                out.push((label, f));
            }
        };
        let mut f = self.clone();
        f.scale += 1;
        push(format!("scale {} -> {}", self.scale, f.scale), f);

        for (gi, group) in self.groups.iter().enumerate() {
            let mut f = self.clone();
            f.groups[gi].sign = -group.sign;
            push(format!("group {gi} sign flipped"), f);
            for (fi, factor) in group.prefactor.factors().iter().enumerate() {
                let mut f = self.clone();
                f.groups[gi].prefactor = bump_exponent(&group.prefactor, fi);
                push(
                    format!(
                        "group {gi} prefactor (q^{};q^{}) exponent {} -> {}",
                        factor.offset,
                        factor.step,
                        factor.exponent,
                        factor.exponent + 1
                    ),
                    f,
                );
            }
            for (ti, t) in group.terms.iter().enumerate() {
                let mut f = self.clone();
                f.groups[gi].terms[ti].coefficient -= 1;
                push(
                    format!(
                        "group {gi} term {ti} coefficient {} -> {}",
                        t.coefficient,
                        t.coefficient - 1
                    ),
                    f,
                );
                let mut f = self.clone();
                f.groups[gi].terms[ti].q_shift += 1;
                push(format!("group {gi} term {ti} q-shift +1"), f);
                let mut f = self.clone();
                f.groups[gi].terms[ti].a_power += 1;
                push(format!("group {gi} term {ti} a-power +1"), f);
                for (fi, factor) in t.quotient.factors().iter().enumerate() {
                    let mut f = self.clone();
                    f.groups[gi].terms[ti].quotient = bump_exponent(&t.quotient, fi);
                    push(
                        format!(
                            "group {gi} term {ti} (q^{};q^{}) exponent {} -> {}",
                            factor.offset,
                            factor.step,
                            factor.exponent,
                            factor.exponent + 1
                        ),
                        f,
                    );
                }
            }
        }
        out
    }
}

fn bump_exponent(spec: &ProductSpec, index: usize) -> ProductSpec {
    let factors = spec.factors().iter().enumerate().map(|(i, f)| {
        let e = if i == index { f.exponent + 1 } else { f.exponent };
        (f.offset, f.step, e)
    });
    ProductSpec::new(factors).expect("same symbols")
}

/// `sum_n cphi_6(3n+1) q^n` from the closed formula.
pub fn cphi6_3n1(order: usize, ring: CoefficientRing) -> Result<Series> {
    ThreeN1Formula::default().evaluate(order, ring)
}
