//! The identity and congruence ledger: every relation the checker knows,
//! with per-profile orders.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::check::{ClaimLabel, CongruenceClaim, GoldenValue, IdentityEntry, Mode, Relation};
use super::expr::{CubeRootPart, Expr};
use crate::error::{Error, Result};
use crate::frobenius::ThreeN1Formula;
use crate::theta::ThetaKind::{self, Phi, Psi, A, X, Y};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Quick,
    Full,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        })
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            _ => Err(Error::Parse(format!("unknown profile `{s}` (quick|full)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerProfile {
    pub quick: usize,
    pub full: usize,
}

impl PerProfile {
    pub fn new(quick: usize, full: usize) -> Self {
        PerProfile { quick, full }
    }

    pub fn get(&self, profile: Profile) -> usize {
        match profile {
            Profile::Quick => self.quick,
            Profile::Full => self.full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitySpec {
    pub name: String,
    pub lhs: Expr,
    pub rhs: Expr,
    pub mode: Mode,
    pub order: PerProfile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSpec {
    pub name: String,
    pub source: String,
    pub a: usize,
    pub b: usize,
    pub modulus: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    pub n_range: PerProfile,
    pub label: ClaimLabel,
}

impl CongruenceSpec {
    pub fn claim(&self, n_range: usize) -> CongruenceClaim {
        CongruenceClaim {
            source: self.source.clone(),
            a: self.a,
            b: self.b,
            modulus: self.modulus,
            relation: self.relation,
            n_range,
            label: self.label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenSpec {
    pub name: String,
    #[serde(flatten)]
    pub value: GoldenValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LedgerEntry {
    Identity(IdentitySpec),
    Congruence(CongruenceSpec),
    Golden(GoldenSpec),
}

impl LedgerEntry {
    pub fn name(&self) -> &str {
        match self {
            LedgerEntry::Identity(s) => &s.name,
            LedgerEntry::Congruence(s) => &s.name,
            LedgerEntry::Golden(s) => &s.name,
        }
    }

    /// The identity check at `profile`, or at `terms` coefficients if given.
    pub fn identity(&self, profile: Profile, terms: Option<usize>) -> Option<IdentityEntry> {
        match self {
            LedgerEntry::Identity(s) => Some(IdentityEntry {
                name: s.name.clone(),
                lhs: s.lhs.clone(),
                rhs: s.rhs.clone(),
                mode: s.mode,
                order: terms.unwrap_or_else(|| s.order.get(profile)),
            }),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn from_json(text: &str) -> Result<Ledger> {
        let ledger: Ledger = serde_json::from_str(text)?;
        let mut seen = std::collections::HashSet::new();
        for e in &ledger.entries {
            if !seen.insert(e.name()) {
                return Err(Error::Parse(format!("duplicate ledger entry `{}`", e.name())));
            }
        }
        Ok(ledger)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ledger serializes");
        s.push('\n');
        s
    }

    /// sha256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn get(&self, name: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.name() == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(LedgerEntry::name).collect()
    }

    /// Copy of the ledger with every `(3n1)` node using `formula`.
    pub fn with_three_n1(&self, formula: &ThreeN1Formula) -> Ledger {
        let mut out = self.clone();
        for entry in &mut out.entries {
            if let LedgerEntry::Identity(s) = entry {
                for side in [&mut s.lhs, &mut s.rhs] {
                    side.visit_mut(&mut |e| {
                        if let Expr::Cphi6ThreeN1 { formula: f } = e {
                            *f = Some(formula.clone());
                        }
                    });
                }
            }
        }
        out
    }
}

fn e(b: usize) -> Expr {
    Expr::eta(&[(b, 1)])
}

fn a() -> Expr {
    Expr::theta(A)
}

fn a3() -> Expr {
    Expr::theta_at(A, 1, 3)
}

fn at(kind: ThetaKind, sign: i8, m: usize) -> Expr {
    Expr::theta_at(kind, sign, m)
}

fn shifted(k: usize, c: i64, factors: Vec<Expr>) -> Expr {
    let mut fs = vec![Expr::q(k)];
    fs.extend(factors);
    Expr::scale(c, Expr::mul(fs))
}

fn gen() -> Expr {
    Expr::Cphi6Gen
}

fn three_n1() -> Expr {
    Expr::Cphi6ThreeN1 { formula: None }
}

// (q^9;q^9)^3 / (q^3;q^3)
fn r9() -> Expr {
    Expr::eta(&[(9, 3), (3, -1)])
}

// the three summands of the reduced (start) form
fn start_1() -> Expr {
    Expr::mul(vec![Expr::pow(a(), 5), Expr::eta(&[(2, 5), (1, 4), (4, -2)])])
}

fn start_2() -> Expr {
    Expr::mul(vec![
        Expr::pow(a(), 6),
        Expr::eta(&[(1, 4), (4, 1), (6, 2), (2, -1), (12, -1)]),
    ])
}

fn start_3() -> Expr {
    shifted(1, -18, vec![Expr::pow(a(), 5), Expr::eta(&[(3, 4), (12, 2), (6, -1)])])
}

fn i_q() -> Expr {
    Expr::extract(start_1(), 3, 2)
}

fn j_q() -> Expr {
    Expr::extract(start_2(), 3, 2)
}

fn k_q() -> Expr {
    Expr::extract(start_3(), 3, 2)
}

// (phi(-q^18) - 2q^2 X(-q^6)) a(q^3)^6 psi(-q^3) (q^3;q^3)^3
fn j_dissected() -> Expr {
    Expr::mul(vec![
        Expr::sub(at(Phi, -1, 18), shifted(2, 2, vec![at(X, -1, 6)])),
        Expr::pow(a3(), 6),
        at(Psi, -1, 3),
        Expr::eta(&[(3, 3)]),
    ])
}

fn lemma_3dis_rhs(a_inner: Expr, e3: Expr) -> Expr {
    Expr::sub(Expr::mul(vec![e3, a_inner]), shifted(1, 3, vec![Expr::eta(&[(9, 3)])]))
}

struct Builder {
    entries: Vec<LedgerEntry>,
}

impl Builder {
    fn identity(&mut self, name: &str, lhs: Expr, rhs: Expr, mode: Mode, quick: usize, full: usize) {
        self.entries.push(LedgerEntry::Identity(IdentitySpec {
            name: name.into(),
            lhs,
            rhs,
            mode,
            order: PerProfile::new(quick, full),
        }));
    }

    fn exact(&mut self, name: &str, lhs: Expr, rhs: Expr) {
        self.identity(name, lhs, rhs, Mode::Exact, 300, 400);
    }

    #[allow(clippy::too_many_arguments)]
    fn congruence(
        &mut self,
        name: &str,
        (a, b): (usize, usize),
        modulus: u64,
        relation: Option<Relation>,
        (quick, full): (usize, usize),
        label: ClaimLabel,
    ) {
        self.entries.push(LedgerEntry::Congruence(CongruenceSpec {
            name: name.into(),
            source: "cphi6".into(),
            a,
            b,
            modulus,
            relation,
            n_range: PerProfile::new(quick, full),
            label,
        }));
    }

    fn golden(&mut self, name: &str, index: usize, factors: &[&str], sharp_exponent: u32) {
        self.entries.push(LedgerEntry::Golden(GoldenSpec {
            name: name.into(),
            value: GoldenValue {
                source: "cphi6".into(),
                index,
                factors: factors.iter().map(|s| s.to_string()).collect(),
                sharp_prime: 3,
                sharp_exponent,
            },
        }));
    }
}

/// The shipped ledger.
pub fn default_ledger() -> Ledger {
    let mut l = Builder { entries: Vec::new() };
    let m27 = Mode::Mod(27);
    let m243 = Mode::Mod(243);

    // theta functions as products
    l.exact("phi-product", Expr::theta(Phi), Expr::eta(&[(2, 5), (1, -2), (4, -2)]));
    l.exact("phi-neg-product", at(Phi, -1, 1), Expr::eta(&[(1, 2), (2, -1)]));
    l.exact("psi-product", Expr::theta(Psi), Expr::eta(&[(2, 2), (1, -1)]));
    l.exact("psi-neg-product", at(Psi, -1, 1), Expr::eta(&[(1, 1), (4, 1), (2, -1)]));
    l.exact(
        "X-product",
        Expr::theta(X),
        Expr::eta(&[(2, 2), (3, 1), (12, 1), (1, -1), (4, -1), (6, -1)]),
    );
    l.exact(
        "Y-product",
        Expr::theta(Y),
        Expr::eta(&[(2, 1), (3, 2), (1, -1), (6, -1)]),
    );
    l.exact(
        "phi-3-dissection",
        Expr::theta(Phi),
        Expr::add(vec![at(Phi, 1, 9), shifted(1, 2, vec![at(X, 1, 3)])]),
    );
    l.exact(
        "psi-3-dissection",
        Expr::theta(Psi),
        Expr::add(vec![at(Y, 1, 3), shifted(1, 1, vec![at(Psi, 1, 9)])]),
    );
    l.exact("a-lambert", a(), Expr::theta_alt(A));
    l.exact("a-3-dissection", a(), Expr::add(vec![a3(), shifted(1, 6, vec![r9()])]));
    l.exact(
        "a-3-dissection-parts",
        Expr::add(vec![
            Expr::ACubeRootPart {
                part: CubeRootPart::AQ3,
            },
            Expr::ACubeRootPart {
                part: CubeRootPart::Correction,
            },
        ]),
        a(),
    );

    // powers of a(q)
    l.identity(
        "aq5",
        Expr::pow(a(), 5),
        Expr::add(vec![
            Expr::pow(a3(), 5),
            shifted(1, 3, vec![Expr::pow(a3(), 4), r9()]),
            shifted(2, 9, vec![Expr::pow(a3(), 3), Expr::pow(r9(), 2)]),
        ]),
        m27,
        300,
        300,
    );
    l.identity(
        "aq6",
        Expr::pow(a(), 6),
        Expr::add(vec![Expr::pow(a3(), 6), shifted(1, 9, vec![Expr::pow(a3(), 5), r9()])]),
        m27,
        300,
        300,
    );

    // (q;q)^(p^α) ≡ (q^p;q^p)^(p^(α-1)) mod p^α
    for (p, alpha) in [(2u32, 1u32), (2, 2), (3, 1), (3, 2), (3, 3), (5, 1)] {
        let pa = p.pow(alpha);
        l.identity(
            &format!("lemma-basic-{p}-{alpha}"),
            Expr::eta(&[(1, pa as i64)]),
            Expr::eta(&[(p as usize, p.pow(alpha - 1) as i64)]),
            Mode::Mod(pa as u64),
            300,
            300,
        );
    }

    l.exact("jacobi-cube", Expr::JacobiCube, Expr::eta(&[(1, 3)]));
    l.exact("lemma-3dis", Expr::eta(&[(1, 3)]), lemma_3dis_rhs(a3(), e(3)));
    l.exact(
        "P-lambert",
        Expr::extract(Expr::JacobiCube, 3, 0),
        Expr::mul(vec![e(1), a()]),
    );
    l.exact(
        "R-cube",
        Expr::extract(Expr::JacobiCube, 3, 1),
        Expr::scale(-3, Expr::eta(&[(3, 3)])),
    );

    // the generating function and the 3n+1 formula
    l.identity("gen-vs-oracle", gen(), Expr::CphiOracle { k: 6 }, Mode::Exact, 100, 200);
    l.identity(
        "3n1-vs-gen",
        three_n1(),
        Expr::extract(gen(), 3, 1),
        Mode::Exact,
        100,
        300,
    );
    l.identity(
        "3n1-vs-gen-mod2187",
        three_n1(),
        Expr::extract(gen(), 3, 1),
        Mode::Mod(2187),
        300,
        300,
    );

    // the proof chain
    l.identity(
        "start-intermediate",
        three_n1(),
        Expr::scale(
            18,
            Expr::add(vec![
                Expr::mul(vec![Expr::pow(a(), 5), Expr::eta(&[(2, 5), (3, 9), (1, -23), (4, -2)])]),
                Expr::mul(vec![
                    Expr::pow(a(), 6),
                    Expr::eta(&[(3, 9), (4, 1), (6, 2), (1, -23), (2, -1), (12, -1)]),
                ]),
                shifted(
                    1,
                    -18,
                    vec![Expr::pow(a(), 5), Expr::eta(&[(3, 12), (12, 2), (1, -24), (6, -1)])],
                ),
            ]),
        ),
        m243,
        300,
        300,
    );
    l.identity(
        "start",
        three_n1(),
        Expr::scale(18, Expr::add(vec![start_1(), start_2(), start_3()])),
        m243,
        300,
        300,
    );
    l.exact(
        "term1",
        Expr::eta(&[(2, 5), (1, 4), (4, -2)]),
        Expr::mul(vec![Expr::theta(Phi), Expr::eta(&[(1, 6)])]),
    );
    l.exact(
        "term2",
        Expr::eta(&[(1, 4), (4, 1), (2, -1)]),
        Expr::mul(vec![at(Psi, -1, 1), Expr::eta(&[(1, 3)])]),
    );
    l.identity(
        "eq-I",
        i_q(),
        Expr::scale(
            -6,
            Expr::mul(vec![Expr::pow(a(), 6), Expr::theta(X), e(1), Expr::eta(&[(3, 3)])]),
        ),
        m27,
        300,
        300,
    );
    l.identity(
        "eq-J",
        j_q(),
        Expr::scale(
            -6,
            Expr::mul(vec![
                Expr::eta(&[(2, 2), (4, -1)]),
                Expr::pow(a(), 6),
                at(Psi, -1, 3),
                Expr::eta(&[(3, 3)]),
            ]),
        ),
        m27,
        300,
        300,
    );
    l.identity("I-equiv-J", i_q(), j_q(), m27, 300, 300);
    l.identity(
        "K-reduction",
        start_3(),
        shifted(1, -18, vec![Expr::pow(a3(), 5), Expr::eta(&[(3, 4), (12, 2), (6, -1)])]),
        m27,
        300,
        300,
    );
    l.identity(
        "eq-K",
        Expr::extract(
            shifted(1, -18, vec![Expr::pow(a3(), 5), Expr::eta(&[(3, 4), (12, 2), (6, -1)])]),
            3,
            2,
        ),
        Expr::constant(0),
        m27,
        300,
        300,
    );
    l.identity("K-vanishes", k_q(), Expr::constant(0), m27, 300, 300);
    l.identity(
        "9n7",
        Expr::extract(gen(), 9, 7),
        Expr::scale(18, Expr::add(vec![i_q(), j_q(), k_q()])),
        m243,
        100,
        300,
    );
    l.identity(
        "9n7-36J",
        Expr::extract(gen(), 9, 7),
        Expr::scale(36, j_q()),
        m243,
        100,
        300,
    );
    l.identity("Jdisc", j_q(), Expr::scale(-6, j_dissected()), m27, 300, 300);
    l.identity(
        "Jdisc-3n1-vanishes",
        Expr::extract(j_q(), 3, 1),
        Expr::constant(0),
        m27,
        300,
        300,
    );
    l.identity(
        "27n7",
        Expr::extract(gen(), 27, 7),
        Expr::scale(
            -216,
            Expr::mul(vec![
                at(Phi, -1, 6),
                Expr::pow(a(), 6),
                at(Psi, -1, 1),
                Expr::eta(&[(1, 3)]),
            ]),
        ),
        m243,
        50,
        300,
    );
    l.identity(
        "27n7-dissected",
        Expr::extract(gen(), 27, 7),
        Expr::scale(
            27,
            Expr::mul(vec![
                at(Phi, -1, 6),
                Expr::pow(a3(), 6),
                Expr::sub(at(Y, -1, 3), shifted(1, 1, vec![at(Psi, -1, 9)])),
                lemma_3dis_rhs(a3(), e(3)),
            ]),
        ),
        m243,
        50,
        300,
    );
    l.identity(
        "mod81result",
        Expr::extract(gen(), 81, 61),
        Expr::scale(
            81,
            Expr::mul(vec![
                at(Phi, -1, 2),
                Expr::pow(a(), 6),
                at(Psi, -1, 3),
                Expr::eta(&[(3, 3)]),
            ]),
        ),
        m243,
        20,
        300,
    );
    l.identity(
        "mod81result-dissected",
        Expr::extract(gen(), 81, 61),
        Expr::scale(81, j_dissected()),
        m243,
        20,
        300,
    );

    // the theorem
    use ClaimLabel::{Conjectured, Proved};
    l.congruence("thm-27n16-mod243", (27, 16), 243, None, (10, 71), Proved);
    l.congruence("thm-81n61-mod81", (81, 61), 81, None, (4, 24), Proved);
    l.congruence("thm-243n142-mod243", (243, 142), 243, None, (2, 8), Proved);
    l.congruence("thm-729n547-mod243", (729, 547), 243, None, (1, 3), Proved);
    l.congruence(
        "thm-relation-81n61-9n7",
        (81, 61),
        243,
        Some(Relation { c: 3, a: 9, b: 7 }),
        (4, 24),
        Proved,
    );

    // earlier congruences
    l.congruence("hist-2n1-mod4", (2, 1), 4, None, (50, 1000), Proved);
    l.congruence("hist-3n1-mod9", (3, 1), 9, None, (50, 668), Proved);
    l.congruence("hist-3n2-mod9", (3, 2), 9, None, (50, 667), Proved);
    l.congruence("hist-3n2-mod27", (3, 2), 27, None, (50, 667), Proved);
    l.congruence("hist-9n7-mod27", (9, 7), 27, None, (50, 222), Proved);

    l.congruence("conjecture-729", (243, 142), 729, None, (2, 8), Conjectured);

    l.golden("golden-16", 16, &["2", "3^5", "1222049"], 5);
    l.golden("golden-61", 61, &["2^2", "3^4", "19", "701612098458871"], 4);
    l.golden(
        "golden-547",
        547,
        &[
            "2^5",
            "3^5",
            "409",
            "6661",
            "3949235117518927056389",
            "20029030597437898896898971631",
        ],
        5,
    );

    Ledger { entries: l.entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let l = default_ledger();
        let text = l.to_json();
        let back = Ledger::from_json(&text).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.hash(), l.hash());
        assert_eq!(l.hash().len(), 64);
    }

    #[test]
    fn names_are_unique() {
        let l = default_ledger();
        let mut names = l.names();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut l = default_ledger();
        l.entries.push(l.entries[0].clone());
        assert!(Ledger::from_json(&l.to_json()).is_err());
    }

    #[test]
    fn entry_kinds_in_json() {
        let json = serde_json::to_value(default_ledger()).unwrap();
        let kinds: Vec<&str> = json
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["kind"].as_str().unwrap())
            .collect();
        assert!(kinds.contains(&"identity"));
        assert!(kinds.contains(&"congruence"));
        assert!(kinds.contains(&"golden"));
    }

    #[test]
    fn three_n1_substitution_reaches_every_node() {
        let f = ThreeN1Formula {
            scale: 8,
            ..ThreeN1Formula::default()
        };
        let l = default_ledger().with_three_n1(&f);
        let mut count = 0;
        for e in &l.entries {
            if let LedgerEntry::Identity(s) = e {
                for side in [&s.lhs, &s.rhs] {
                    if side.mentions(&|x| matches!(x, Expr::Cphi6ThreeN1 { formula: Some(g) } if g.scale == 8)) {
                        count += 1;
                    }
                    assert!(!side.mentions(&|x| matches!(x, Expr::Cphi6ThreeN1 { formula: None })));
                }
            }
        }
        assert_eq!(count, 4);
    }
}
