//! The three kinds of check: series identities (exact or modulo `M`),
//! congruences along arithmetic progressions, and exact golden values.

use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::expr::{Evaluator, Expr};
use super::report::{VerificationReport, Witness};
use crate::error::{contract, Error, Result};
use crate::ring::CoefficientRing;
use crate::series::Series;

/// `3^7`. Every mod-`3^k` claim with `k <= 7` is evaluated in this one ring
/// and read off by reduction.
pub const WORKING_MODULUS: u64 = 2187;

/// Whether an identity holds exactly or only modulo `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Mod(u64),
}

impl Mode {
    /// The ring both sides are evaluated in.
    pub fn evaluation_ring(&self) -> CoefficientRing {
        match *self {
            Mode::Exact => CoefficientRing::Integer,
            Mode::Mod(m) => ring_for_modulus(m),
        }
    }
}

pub fn ring_for_modulus(m: u64) -> CoefficientRing {
    if WORKING_MODULUS.is_multiple_of(m) {
        CoefficientRing::Modular(WORKING_MODULUS)
    } else {
        CoefficientRing::Modular(m)
    }
}

// JSON: "exact" or {"mod": M}
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ModeRepr {
    Tag(String),
    Mod {
        #[serde(rename = "mod")]
        modulus: u64,
    },
}

impl Serialize for Mode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Mode::Exact => ModeRepr::Tag("exact".into()),
            Mode::Mod(modulus) => ModeRepr::Mod { modulus },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match ModeRepr::deserialize(d)? {
            ModeRepr::Tag(t) if t == "exact" => Ok(Mode::Exact),
            ModeRepr::Tag(t) => Err(D::Error::custom(format!("unknown mode `{t}`"))),
            ModeRepr::Mod { modulus } if modulus >= 2 => Ok(Mode::Mod(modulus)),
            ModeRepr::Mod { modulus } => Err(D::Error::custom(format!("modulus {modulus} < 2"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub name: String,
    pub lhs: Expr,
    pub rhs: Expr,
    pub mode: Mode,
    pub order: usize,
}

/// Evaluates both sides through `entry.order` and compares them
/// coefficientwise, after reduction when the mode is modular.
pub fn check_identity(entry: &IdentityEntry, evaluator: &Evaluator) -> VerificationReport {
    let start = Instant::now();
    let result = (|| -> Result<Option<Witness>> {
        let ring = entry.mode.evaluation_ring();
        let mut lhs = evaluator.evaluate(&entry.lhs, entry.order, ring)?;
        let mut rhs = evaluator.evaluate(&entry.rhs, entry.order, ring)?;
        if let Mode::Mod(m) = entry.mode {
            lhs = lhs.reduce_mod(m)?;
            rhs = rhs.reduce_mod(m)?;
        }
        Ok(lhs.first_difference(&rhs)?.map(|index| Witness {
            index,
            lhs: lhs.coeff(index).to_string(),
            rhs: rhs.coeff(index).to_string(),
        }))
    })();
    let elapsed = start.elapsed();
    match result {
        Ok(None) => VerificationReport::pass(&entry.name, entry.order, elapsed),
        Ok(Some(w)) => VerificationReport::fail(&entry.name, entry.order, w, elapsed),
        Err(e) => VerificationReport::error(&entry.name, e.to_string(), elapsed),
    }
}

/// `f(a'n + b')` scaled by `c`, the right side of a congruence relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub c: i64,
    pub a: usize,
    pub b: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimLabel {
    /// Stated with proof in the literature.
    Proved,
    /// Stated as an open conjecture.
    Conjectured,
    /// Found by scanning coefficients; nothing more.
    Empirical,
}

/// `f(an + b) ≡ 0 (mod M)`, or `f(an + b) ≡ c f(a'n + b') (mod M)`, checked
/// for `n = 0..n_range`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CongruenceClaim {
    pub source: String,
    pub a: usize,
    pub b: usize,
    pub modulus: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    pub n_range: usize,
    pub label: ClaimLabel,
}

impl CongruenceClaim {
    pub fn plain(source: &str, a: usize, b: usize, modulus: u64, n_range: usize, label: ClaimLabel) -> Self {
        CongruenceClaim {
            source: source.to_string(),
            a,
            b,
            modulus,
            relation: None,
            n_range,
            label,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let progression_ok = |a: usize, b: usize| a >= 1 && b < a;
        if !progression_ok(self.a, self.b) {
            return Err(contract(format!(
                "progression {}n+{} needs a >= 1, 0 <= b < a",
                self.a, self.b
            )));
        }
        if let Some(r) = self.relation {
            if !progression_ok(r.a, r.b) {
                return Err(contract(format!(
                    "progression {}n+{} needs a >= 1, 0 <= b < a",
                    r.a, r.b
                )));
            }
        }
        if self.modulus < 2 {
            return Err(contract("modulus must be at least 2"));
        }
        if self.n_range == 0 {
            return Err(contract("n_range must be positive"));
        }
        Ok(())
    }

    /// Highest coefficient index the check reads.
    pub fn required_order(&self) -> usize {
        let last = self.n_range.saturating_sub(1);
        let lhs = self.a * last + self.b;
        match self.relation {
            Some(r) => lhs.max(r.a * last + r.b),
            None => lhs,
        }
    }

    pub fn describe(&self) -> String {
        let rhs = match self.relation {
            Some(r) => format!("{}*{}({}n+{})", r.c, self.source, r.a, r.b),
            None => "0".to_string(),
        };
        let label = match self.label {
            ClaimLabel::Proved => "",
            ClaimLabel::Conjectured => ", conjectured",
            ClaimLabel::Empirical => ", empirical",
        };
        format!(
            "{}({}n+{}) = {} mod {} for n = 0..={}{}",
            self.source,
            self.a,
            self.b,
            rhs,
            self.modulus,
            self.n_range.saturating_sub(1),
            label
        )
    }
}

/// Parses a congruence source name: `cphi<k>`.
pub fn source_colors(source: &str) -> Result<usize> {
    source
        .strip_prefix("cphi")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| Error::Parse(format!("unknown series source `{source}`")))
}

pub fn check_congruence(name: &str, claim: &CongruenceClaim, coeffs: &Series) -> VerificationReport {
    let start = Instant::now();
    let result = (|| -> Result<Option<Witness>> {
        claim.validate()?;
        let needed = claim.required_order();
        if coeffs.order() < needed {
            return Err(Error::InsufficientOrder {
                required: needed,
                available: coeffs.order(),
            });
        }
        if !coeffs.ring().resolves_modulus(claim.modulus) {
            return Err(contract(format!(
                "coefficients over {} cannot decide congruences mod {}",
                coeffs.ring(),
                claim.modulus
            )));
        }
        let m = BigInt::from(claim.modulus);
        for n in 0..claim.n_range {
            let index = claim.a * n + claim.b;
            let lhs = coeffs.coeff(index).mod_floor(&m);
            let rhs = match claim.relation {
                Some(r) => (BigInt::from(r.c) * coeffs.coeff(r.a * n + r.b)).mod_floor(&m),
                None => BigInt::zero(),
            };
            if lhs != rhs {
                return Ok(Some(Witness {
                    index,
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                }));
            }
        }
        Ok(None)
    })();
    let elapsed = start.elapsed();
    let through = claim.n_range.saturating_sub(1);
    let report = match result {
        Ok(None) => VerificationReport::pass(name, through, elapsed),
        Ok(Some(w)) => VerificationReport::fail(name, through, w, elapsed),
        Err(e) => VerificationReport::error(name, e.to_string(), elapsed),
    };
    report.with_detail(claim.describe())
}

/// A prime power `p^e` in a stated factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePower {
    pub base: BigInt,
    pub exponent: u32,
}

impl FromStr for PrimePower {
    type Err = Error;

    /// `"409"` or `"3^5"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad factor `{s}`"));
        let (base, exponent) = match s.split_once('^') {
            Some((b, e)) => (b, e.parse().map_err(|_| bad())?),
            None => (s, 1),
        };
        Ok(PrimePower {
            base: base.parse().map_err(|_| bad())?,
            exponent,
        })
    }
}

/// The exact value of `cphi_k(index)` given as a factorization, plus the
/// exact power of a prime dividing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenValue {
    pub source: String,
    pub index: usize,
    pub factors: Vec<String>,
    pub sharp_prime: u64,
    pub sharp_exponent: u32,
}

impl GoldenValue {
    pub fn expected(&self) -> Result<BigInt> {
        let mut product = BigInt::one();
        for f in &self.factors {
            let pp: PrimePower = f.parse()?;
            product *= num_traits::pow(pp.base, pp.exponent as usize);
        }
        Ok(product)
    }
}

/// Exact power of `p` dividing a nonzero `value`.
pub fn valuation(value: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut v = value.clone();
    let mut k = 0;
    while !v.is_zero() && v.is_multiple_of(&p) {
        v /= &p;
        k += 1;
    }
    k
}

/// Compares an exact coefficient against the factorization, then checks that
/// `sharp_prime^sharp_exponent` divides it and the next power does not.
pub fn check_golden(name: &str, golden: &GoldenValue, coeffs: &Series) -> VerificationReport {
    let start = Instant::now();
    let result = (|| -> Result<Option<Witness>> {
        if coeffs.ring() != CoefficientRing::Integer {
            return Err(contract("golden values need exact coefficients"));
        }
        if coeffs.order() < golden.index {
            return Err(Error::InsufficientOrder {
                required: golden.index,
                available: coeffs.order(),
            });
        }
        let value = coeffs.coeff(golden.index);
        let expected = golden.expected()?;
        if value != expected {
            return Ok(Some(Witness {
                index: golden.index,
                lhs: value.to_string(),
                rhs: expected.to_string(),
            }));
        }
        let v = valuation(&value, golden.sharp_prime);
        if v != golden.sharp_exponent {
            return Ok(Some(Witness {
                index: golden.index,
                lhs: format!("{}-adic valuation {v}", golden.sharp_prime),
                rhs: format!("{}-adic valuation {}", golden.sharp_prime, golden.sharp_exponent),
            }));
        }
        Ok(None)
    })();
    let elapsed = start.elapsed();
    let report = match result {
        Ok(None) => VerificationReport::pass(name, golden.index, elapsed),
        Ok(Some(w)) => VerificationReport::fail(name, golden.index, w, elapsed),
        Err(e) => VerificationReport::error(name, e.to_string(), elapsed),
    };
    report.with_detail(format!(
        "{}({}) = {}, exactly divisible by {}^{}",
        golden.source,
        golden.index,
        golden.factors.join("*"),
        golden.sharp_prime,
        golden.sharp_exponent
    ))
}
