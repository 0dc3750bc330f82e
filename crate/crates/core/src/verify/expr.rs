//! Expression trees over the series constructors, and their evaluation.
//!
//! Evaluation is demand-driven: `evaluate(expr, N)` asks each child for
//! exactly the order it needs, so `extract(f, m, r)` at order `N` evaluates
//! `f` at `m*N + r`, and `f(q^m)` evaluates `f` at `N / m`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::frobenius::{cphi6_gen, cphi_oracle_in, ThreeN1Formula};
use crate::products::{eta_quotient, jacobi_cube, pochhammer, ProductSpec};
use crate::ring::CoefficientRing;
use crate::series::Series;
use crate::theta::{a_cube_root_dissection, eval_at_signed_power, theta, Construction, SignedPower, ThetaKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeRootPart {
    /// `a(q^3)`
    AQ3,
    /// `6q (q^9;q^9)^3 / (q^3;q^3)`
    Correction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Const {
        value: i64,
    },
    /// The monomial `q^k`.
    QPower {
        k: usize,
    },
    Eta {
        factors: ProductSpec,
    },
    Pochhammer {
        a: usize,
        b: usize,
    },
    JacobiCube,
    Theta {
        kind: ThetaKind,
        #[serde(default, skip_serializing_if = "is_default_construction")]
        construction: Construction,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        at: Option<SignedPower>,
    },
    ACubeRootPart {
        part: CubeRootPart,
    },
    CphiOracle {
        k: usize,
    },
    Cphi6Gen,
    Cphi6ThreeN1 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        formula: Option<ThreeN1Formula>,
    },
    Add {
        terms: Vec<Expr>,
    },
    Sub {
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Mul {
        factors: Vec<Expr>,
    },
    Neg {
        arg: Box<Expr>,
    },
    Scale {
        by: i64,
        arg: Box<Expr>,
    },
    Pow {
        arg: Box<Expr>,
        k: u32,
    },
    Inverse {
        arg: Box<Expr>,
    },
    SubstitutePower {
        arg: Box<Expr>,
        m: usize,
    },
    NegateVariable {
        arg: Box<Expr>,
    },
    SignedPower {
        arg: Box<Expr>,
        sign: i8,
        m: usize,
    },
    Extract {
        arg: Box<Expr>,
        m: usize,
        r: usize,
    },
}

fn is_default_construction(c: &Construction) -> bool {
    *c == Construction::Sum
}

// Builders used by the shipped ledger and tests.
impl Expr {
    pub fn constant(value: i64) -> Expr {
        Expr::Const { value }
    }

    pub fn q(k: usize) -> Expr {
        Expr::QPower { k }
    }

    /// Quotient of `(q^b;q^b)_inf^e` symbols.
    pub fn eta(steps: &[(usize, i64)]) -> Expr {
        Expr::Eta {
            factors: ProductSpec::eta(steps.iter().copied()).expect("valid eta steps"),
        }
    }

    pub fn theta(kind: ThetaKind) -> Expr {
        Expr::Theta {
            kind,
            construction: Construction::Sum,
            at: None,
        }
    }

    pub fn theta_alt(kind: ThetaKind) -> Expr {
        Expr::Theta {
            kind,
            construction: Construction::Alt,
            at: None,
        }
    }

    /// `kind(sign * q^m)`.
    pub fn theta_at(kind: ThetaKind, sign: i8, m: usize) -> Expr {
        Expr::Theta {
            kind,
            construction: Construction::Sum,
            at: Some(SignedPower { sign, m }),
        }
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        Expr::Add { terms }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Sub {
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        Expr::Mul { factors }
    }

    pub fn scale(by: i64, arg: Expr) -> Expr {
        Expr::Scale { by, arg: Box::new(arg) }
    }

    pub fn pow(arg: Expr, k: u32) -> Expr {
        Expr::Pow { arg: Box::new(arg), k }
    }

    pub fn extract(arg: Expr, m: usize, r: usize) -> Expr {
        Expr::Extract {
            arg: Box::new(arg),
            m,
            r,
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Expr::Add { terms } => terms.iter_mut().collect(),
            Expr::Mul { factors } => factors.iter_mut().collect(),
            Expr::Sub { lhs, rhs } => vec![lhs.as_mut(), rhs.as_mut()],
            Expr::Neg { arg }
            | Expr::Scale { arg, .. }
            | Expr::Pow { arg, .. }
            | Expr::Inverse { arg }
            | Expr::SubstitutePower { arg, .. }
            | Expr::NegateVariable { arg }
            | Expr::SignedPower { arg, .. }
            | Expr::Extract { arg, .. } => vec![arg.as_mut()],
            _ => Vec::new(),
        }
    }

    /// Applies `f` to this node and every descendant.
    pub fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Expr)) {
        f(self);
        for child in self.children_mut() {
            child.visit_mut(f);
        }
    }

    fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Add { terms } => terms.iter().collect(),
            Expr::Mul { factors } => factors.iter().collect(),
            Expr::Sub { lhs, rhs } => vec![lhs.as_ref(), rhs.as_ref()],
            Expr::Neg { arg }
            | Expr::Scale { arg, .. }
            | Expr::Pow { arg, .. }
            | Expr::Inverse { arg }
            | Expr::SubstitutePower { arg, .. }
            | Expr::NegateVariable { arg }
            | Expr::SignedPower { arg, .. }
            | Expr::Extract { arg, .. } => vec![arg.as_ref()],
            _ => Vec::new(),
        }
    }

    /// Whether this node or any descendant satisfies `pred`.
    pub fn mentions(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.mentions(pred))
    }

    /// Highest order at which `target` gets evaluated when this expression is
    /// evaluated at `order`, or `None` if it does not occur.
    pub fn demand_for(&self, target: &Expr, order: usize) -> Option<usize> {
        if self == target {
            return Some(order);
        }
        let inner = match self {
            Expr::Extract { m, r, .. } => m * order + r,
            Expr::SubstitutePower { m, .. } if *m > 0 => order / m,
            Expr::SignedPower { sign, m, .. } => match SignedPower::new(*sign, *m) {
                Ok(at) => at.inner_order(order),
                Err(_) => return None,
            },
            _ => order,
        };
        self.children()
            .into_iter()
            .filter_map(|c| c.demand_for(target, inner))
            .max()
    }

    /// Distinct `cphi` source nodes (`Cphi6Gen`, `CphiOracle`) in the tree.
    pub fn sources(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        self.collect_sources(&mut out);
        out
    }

    fn collect_sources(&self, out: &mut Vec<Expr>) {
        if matches!(self, Expr::Cphi6Gen | Expr::CphiOracle { .. }) && !out.contains(self) {
            out.push(self.clone());
        }
        for c in self.children() {
            c.collect_sources(out);
        }
    }

    fn memoizable(&self) -> bool {
        matches!(
            self,
            Expr::Eta { .. }
                | Expr::Theta { .. }
                | Expr::JacobiCube
                | Expr::ACubeRootPart { .. }
                | Expr::CphiOracle { .. }
                | Expr::Cphi6Gen
                | Expr::Cphi6ThreeN1 { .. }
                | Expr::Pow { .. }
                | Expr::Extract { .. }
        )
    }
}

/// Evaluates expressions, sharing expensive intermediate series.
///
/// The memo keeps, per (expression, ring), the highest-order series computed
/// so far and serves lower orders by truncation, which is exact because every
/// operation here is truncation-coherent.
#[derive(Default)]
pub struct Evaluator {
    memo: Mutex<HashMap<(String, CoefficientRing), Series>>,
}

impl Evaluator {
    pub fn new() -> Evaluator {
        Evaluator::default()
    }

    fn lookup(&self, key: &(String, CoefficientRing), order: usize) -> Option<Series> {
        let memo = self.memo.lock().expect("memo lock");
        memo.get(key).filter(|s| s.order() >= order).map(|s| s.truncate(order))
    }

    fn store(&self, key: (String, CoefficientRing), series: &Series) {
        let mut memo = self.memo.lock().expect("memo lock");
        let keep = memo.get(&key).is_some_and(|old| old.order() >= series.order());
        if !keep {
            memo.insert(key, series.clone());
        }
    }

    /// Seeds the memo with a series for `expr` computed elsewhere (for
    /// instance loaded from the on-disk cache).
    pub fn seed(&self, expr: &Expr, series: &Series) {
        if let Ok(key) = serde_json::to_string(expr) {
            self.store((key, series.ring()), series);
        }
    }

    pub fn evaluate(&self, expr: &Expr, order: usize, ring: CoefficientRing) -> Result<Series> {
        if !expr.memoizable() {
            return self.compute(expr, order, ring);
        }
        let key = (serde_json::to_string(expr)?, ring);
        if let Some(hit) = self.lookup(&key, order) {
            return Ok(hit);
        }
        let series = self.compute(expr, order, ring)?;
        self.store(key, &series);
        Ok(series)
    }

    fn compute(&self, expr: &Expr, order: usize, ring: CoefficientRing) -> Result<Series> {
        let eval = |e: &Expr, n: usize| self.evaluate(e, n, ring);
        Ok(match expr {
            Expr::Const { value } => Series::monomial(ring, order, 0, *value),
            Expr::QPower { k } => Series::monomial(ring, order, *k, 1),
            Expr::Eta { factors } => eta_quotient(factors, order, ring)?,
            Expr::Pochhammer { a, b } => pochhammer(*a, *b, order, ring)?,
            Expr::JacobiCube => jacobi_cube(order, ring),
            Expr::Theta { kind, construction, at } => match at {
                None => theta(*kind, *construction, order, ring)?,
                Some(at) => {
                    let at = SignedPower::new(at.sign, at.m)?;
                    let inner = theta(*kind, *construction, at.inner_order(order), ring)?;
                    eval_at_signed_power(&inner, at, order)?
                }
            },
            Expr::ACubeRootPart { part } => {
                let (a3, correction) = a_cube_root_dissection(order, ring)?;
                match part {
                    CubeRootPart::AQ3 => a3,
                    CubeRootPart::Correction => correction,
                }
            }
            Expr::CphiOracle { k } => cphi_oracle_in(*k, order, ring)?,
            Expr::Cphi6Gen => cphi6_gen(order, ring)?,
            Expr::Cphi6ThreeN1 { formula } => match formula {
                Some(f) => f.evaluate(order, ring)?,
                None => ThreeN1Formula::default().evaluate(order, ring)?,
            },
            Expr::Add { terms } => {
                let mut acc = Series::zero(ring, order);
                for t in terms {
                    acc = acc.add(&eval(t, order)?)?;
                }
                acc
            }
            Expr::Sub { lhs, rhs } => eval(lhs, order)?.sub(&eval(rhs, order)?)?,
            Expr::Mul { factors } => {
                let mut acc = Series::one(ring, order);
                for f in factors {
                    acc = acc.mul(&eval(f, order)?)?;
                }
                acc
            }
            Expr::Neg { arg } => eval(arg, order)?.neg(),
            Expr::Scale { by, arg } => eval(arg, order)?.scale(&BigInt::from(*by)),
            Expr::Pow { arg, k } => eval(arg, order)?.pow(*k)?,
            Expr::Inverse { arg } => eval(arg, order)?.inverse()?,
            Expr::SubstitutePower { arg, m } => {
                if *m == 0 {
                    return Err(contract("substitute_power needs m >= 1"));
                }
                eval(arg, order / m)?.upsample(*m, order)?
            }
            Expr::NegateVariable { arg } => eval(arg, order)?.negate_variable(),
            Expr::SignedPower { arg, sign, m } => {
                let at = SignedPower::new(*sign, *m)?;
                eval_at_signed_power(&eval(arg, at.inner_order(order))?, at, order)?
            }
            Expr::Extract { arg, m, r } => {
                if *m == 0 || r >= m {
                    return Err(contract(format!(
                        "extract_progression needs 0 <= r < m, got m={m}, r={r}"
                    )));
                }
                eval(arg, m * order + r)?.extract_progression(*m, *r)?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::theta_sum;
    use CoefficientRing::{Integer, Modular};

    #[test]
    fn json_shape() {
        let e = Expr::mul(vec![
            Expr::theta_at(ThetaKind::Psi, -1, 9),
            Expr::eta(&[(1, -23), (3, 9)]),
            Expr::q(2),
        ]);
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(
            json,
            r#"{"op":"mul","factors":[{"op":"theta","kind":"psi","at":{"sign":-1,"m":9}},{"op":"eta","factors":[[1,1,-23],[3,3,9]]},{"op":"q_power","k":2}]}"#
        );
        assert_eq!(serde_json::from_str::<Expr>(&json).unwrap(), e);
    }

    #[test]
    fn extract_asks_for_the_deeper_order() {
        let ev = Evaluator::new();
        let e = Expr::extract(Expr::theta(ThetaKind::Phi), 9, 4);
        let s = ev.evaluate(&e, 10, Integer).unwrap();
        assert_eq!(s.order(), 10);
        let direct = theta_sum(ThetaKind::Phi, 94, Integer)
            .extract_progression(9, 4)
            .unwrap();
        assert_eq!(s, direct);
    }

    #[test]
    fn memo_serves_lower_orders_by_truncation() {
        let ev = Evaluator::new();
        let e = Expr::eta(&[(1, -6), (2, 3)]);
        let big = ev.evaluate(&e, 200, Modular(2187)).unwrap();
        let small = ev.evaluate(&e, 50, Modular(2187)).unwrap();
        assert_eq!(small, big.truncate(50));
        assert_eq!(small, Evaluator::new().evaluate(&e, 50, Modular(2187)).unwrap());
    }

    #[test]
    fn signed_power_node_matches_theta_wrapper() {
        let ev = Evaluator::new();
        let a = ev.evaluate(&Expr::theta_at(ThetaKind::X, -1, 6), 120, Integer).unwrap();
        let b = ev
            .evaluate(
                &Expr::SignedPower {
                    arg: Box::new(Expr::theta(ThetaKind::X)),
                    sign: -1,
                    m: 6,
                },
                120,
                Integer,
            )
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coeff(6), (-1).into());
    }

    #[test]
    fn demand_follows_extraction_and_substitution() {
        let gen = Expr::Cphi6Gen;
        let e = Expr::add(vec![
            Expr::extract(Expr::mul(vec![gen.clone(), Expr::q(1)]), 81, 61),
            Expr::SubstitutePower {
                arg: Box::new(gen.clone()),
                m: 3,
            },
        ]);
        assert_eq!(e.demand_for(&gen, 20), Some(81 * 20 + 61));
        assert_eq!(e.demand_for(&Expr::CphiOracle { k: 6 }, 20), None);
        assert_eq!(e.sources(), vec![gen]);
    }

    #[test]
    fn bad_parameters_are_errors() {
        let ev = Evaluator::new();
        let e = Expr::extract(Expr::constant(1), 3, 3);
        assert!(ev.evaluate(&e, 5, Integer).is_err());
        let e = Expr::Inverse {
            arg: Box::new(Expr::scale(3, Expr::constant(1))),
        };
        assert!(ev.evaluate(&e, 5, Integer).is_err());
        assert!(ev.evaluate(&Expr::theta_at(ThetaKind::Phi, 2, 3), 5, Integer).is_err());
    }
}
