//! Coefficient rings: the integers, or the integers modulo `M`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// The ring a [`Series`](crate::Series) takes its coefficients in.
///
/// Modular residues are kept in the canonical range `[0, M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoefficientRing {
    Integer,
    Modular(u64),
}

impl CoefficientRing {
    pub fn modular(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(contract(format!("modulus must be at least 2, got {modulus}")));
        }
        Ok(CoefficientRing::Modular(modulus))
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            CoefficientRing::Integer => None,
            CoefficientRing::Modular(m) => Some(m),
        }
    }

    /// Image of an integer in this ring, as a canonical residue. `None` for
    /// the integer ring.
    pub fn residue(&self, value: &BigInt) -> Option<u64> {
        self.modulus().map(|m| reduce_bigint(value, m))
    }

    pub fn residue_i64(&self, value: i64) -> Option<u64> {
        self.modulus().map(|m| (value as i128).rem_euclid(m as i128) as u64)
    }

    /// Whether every statement mod `m` can be read off from this ring.
    pub fn resolves_modulus(&self, m: u64) -> bool {
        match *self {
            CoefficientRing::Integer => true,
            CoefficientRing::Modular(r) => r % m == 0,
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Integer => write!(f, "exact"),
            CoefficientRing::Modular(m) => write!(f, "mod:{m}"),
        }
    }
}

impl FromStr for CoefficientRing {
    type Err = Error;

    /// Accepts `exact` (or `Z`) and `mod:M`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "Z" | "z" => Ok(CoefficientRing::Integer),
            _ => {
                let m = s
                    .strip_prefix("mod:")
                    .ok_or_else(|| Error::Parse(format!("unknown ring `{s}`")))?;
                let m: u64 = m.parse().map_err(|_| Error::Parse(format!("bad modulus in `{s}`")))?;
                CoefficientRing::modular(m)
            }
        }
    }
}

// JSON form: "Z" or {"mod": M}.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RingRepr {
    Tag(String),
    Mod {
        #[serde(rename = "mod")]
        modulus: u64,
    },
}

impl Serialize for CoefficientRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            CoefficientRing::Integer => RingRepr::Tag("Z".into()),
            CoefficientRing::Modular(modulus) => RingRepr::Mod { modulus },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoefficientRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RingRepr::deserialize(d)? {
            RingRepr::Tag(t) if t == "Z" => Ok(CoefficientRing::Integer),
            RingRepr::Tag(t) => Err(serde::de::Error::custom(format!("unknown ring tag `{t}`"))),
            RingRepr::Mod { modulus } => CoefficientRing::modular(modulus).map_err(serde::de::Error::custom),
        }
    }
}

pub(crate) fn reduce_bigint(value: &BigInt, m: u64) -> u64 {
    let r = value.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// The unit inverse of an integer constant term, which must be ±1.
pub(crate) fn integer_unit_inverse(a: &BigInt) -> Option<BigInt> {
    if a.abs() == BigInt::from(1) {
        Some(a.clone())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_below_two_rejected() {
        assert!(CoefficientRing::modular(1).is_err());
        assert!(CoefficientRing::modular(0).is_err());
        assert!(CoefficientRing::modular(2).is_ok());
    }

    #[test]
    fn reduction_is_multiplicative() {
        let ring = CoefficientRing::Modular(243);
        for (a, b) in [(-17i64, 91i64), (1 << 40, -(1 << 33)), (242, 242), (0, 5)] {
            let ra = ring.residue_i64(a).unwrap() as u128;
            let rb = ring.residue_i64(b).unwrap() as u128;
            let ab = BigInt::from(a) * BigInt::from(b);
            assert_eq!((ra * rb % 243) as u64, ring.residue(&ab).unwrap());
        }
    }

    #[test]
    fn parse_and_json_forms() {
        assert_eq!("exact".parse::<CoefficientRing>().unwrap(), CoefficientRing::Integer);
        assert_eq!(
            "mod:2187".parse::<CoefficientRing>().unwrap(),
            CoefficientRing::Modular(2187)
        );
        assert!("mod:1".parse::<CoefficientRing>().is_err());
        assert!("gf:7".parse::<CoefficientRing>().is_err());
        assert_eq!(serde_json::to_string(&CoefficientRing::Integer).unwrap(), "\"Z\"");
        assert_eq!(
            serde_json::to_string(&CoefficientRing::Modular(27)).unwrap(),
            "{\"mod\":27}"
        );
        let back: CoefficientRing = serde_json::from_str("{\"mod\":27}").unwrap();
        assert_eq!(back, CoefficientRing::Modular(27));
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(2, 27), Some(14));
        assert_eq!(mod_inverse(3, 27), None);
        assert_eq!(integer_unit_inverse(&BigInt::from(-1)), Some(BigInt::from(-1)));
        assert_eq!(integer_unit_inverse(&BigInt::from(2)), None);
    }
}
