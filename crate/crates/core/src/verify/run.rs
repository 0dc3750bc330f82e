//! Running a ledger on a bounded worker pool, and scanning for congruences.

use std::collections::HashMap;

use num_integer::Integer;
use rayon::prelude::*;

use super::check::{
    check_congruence, check_golden, check_identity, ring_for_modulus, source_colors, ClaimLabel, CongruenceClaim,
    GoldenValue, IdentityEntry,
};
use super::expr::{Evaluator, Expr};
use super::ledger::{Ledger, LedgerEntry, Profile};
use super::report::VerificationReport;
use crate::cache::SeriesCache;
use crate::error::{Error, Result};
use crate::frobenius::{cphi6_gen, cphi_oracle_in};
use crate::ring::CoefficientRing;
use crate::series::Series;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub profile: Profile,
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    /// Entry names to run; empty runs everything.
    pub entries: Vec<String>,
    /// Overrides identity orders, and caps congruence ranges so that no
    /// coefficient beyond `terms` is read.
    pub terms: Option<usize>,
    pub cache: SeriesCache,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            profile: Profile::Quick,
            jobs: 0,
            entries: Vec::new(),
            terms: None,
            cache: SeriesCache::disabled(),
        }
    }
}

enum Task {
    Identity(IdentityEntry),
    Congruence(String, CongruenceClaim),
    Golden(String, GoldenValue),
}

/// Series node a congruence source name stands for.
pub fn source_expr(source: &str) -> Result<Expr> {
    match source_colors(source)? {
        6 => Ok(Expr::Cphi6Gen),
        k => Ok(Expr::CphiOracle { k }),
    }
}

fn cache_name(source: &Expr) -> String {
    match source {
        Expr::CphiOracle { k } => format!("cphi{k}-oracle"),
        _ => "cphi6-gen".to_string(),
    }
}

fn compute_source(source: &Expr, order: usize, ring: CoefficientRing, cache: &SeriesCache) -> Result<Series> {
    let name = cache_name(source);
    if let Some(hit) = cache.load(&name, order, ring) {
        return Ok(hit);
    }
    let series = match source {
        Expr::CphiOracle { k } => cphi_oracle_in(*k, order, ring)?,
        _ => cphi6_gen(order, ring)?,
    };
    cache.store(&name, &series);
    Ok(series)
}

fn tasks(ledger: &Ledger, opts: &RunOptions) -> Result<Vec<Task>> {
    let selected: Vec<&LedgerEntry> = if opts.entries.is_empty() {
        ledger.entries.iter().collect()
    } else {
        opts.entries
            .iter()
            .map(|n| ledger.get(n).ok_or_else(|| Error::UnknownEntry(n.clone())))
            .collect::<Result<_>>()?
    };
    Ok(selected
        .into_iter()
        .map(|entry| match entry {
            LedgerEntry::Identity(_) => Task::Identity(entry.identity(opts.profile, opts.terms).expect("identity")),
            LedgerEntry::Congruence(s) => {
                let mut n_range = s.n_range.get(opts.profile);
                if let Some(t) = opts.terms {
                    let mut claim = s.claim(n_range);
                    while claim.n_range > 1 && claim.required_order() > t {
                        claim.n_range -= 1;
                    }
                    n_range = claim.n_range;
                }
                Task::Congruence(s.name.clone(), s.claim(n_range))
            }
            LedgerEntry::Golden(s) => Task::Golden(s.name.clone(), s.value.clone()),
        })
        .collect())
}

/// Runs the selected entries and returns their reports in ledger order.
///
/// Every `cphi` series the entries need is computed once per ring at the
/// deepest order any entry asks for, through the cache, before the entries
/// themselves run.
pub fn run_ledger(ledger: &Ledger, opts: &RunOptions) -> Result<Vec<VerificationReport>> {
    let tasks = tasks(ledger, opts)?;

    let mut demand: HashMap<(String, CoefficientRing), (Expr, usize)> = HashMap::new();
    let mut want = |source: Expr, ring: CoefficientRing, order: usize| {
        let key = (serde_json::to_string(&source).expect("expr serializes"), ring);
        let slot = demand.entry(key).or_insert((source, 0));
        slot.1 = slot.1.max(order);
    };
    for task in &tasks {
        match task {
            Task::Identity(e) => {
                let ring = e.mode.evaluation_ring();
                for side in [&e.lhs, &e.rhs] {
                    for src in side.sources() {
                        if let Some(order) = side.demand_for(&src, e.order) {
                            want(src, ring, order);
                        }
                    }
                }
            }
            Task::Congruence(_, c) => {
                if let Ok(src) = source_expr(&c.source) {
                    want(src, ring_for_modulus(c.modulus), c.required_order());
                }
            }
            Task::Golden(_, g) => {
                if let Ok(src) = source_expr(&g.source) {
                    want(src, CoefficientRing::Integer, g.index);
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Contract(format!("worker pool: {e}")))?;

    pool.install(|| {
        let demand: Vec<_> = demand.into_iter().collect();
        let sources: HashMap<(String, CoefficientRing), Result<Series>> = demand
            .into_par_iter()
            .map(|((key, ring), (src, order))| {
                let series = compute_source(&src, order, ring, &opts.cache);
                ((key, ring), series)
            })
            .collect();

        let evaluator = Evaluator::new();
        for ((key, _), series) in &sources {
            if let Ok(s) = series {
                let expr: Expr = serde_json::from_str(key).expect("key is an expr");
                evaluator.seed(&expr, s);
            }
        }
        let source_for = |name: &str, ring: CoefficientRing| -> Result<&Series> {
            let key = (serde_json::to_string(&source_expr(name)?)?, ring);
            match sources.get(&key) {
                Some(Ok(s)) => Ok(s),
                Some(Err(e)) => Err(Error::Contract(e.to_string())),
                None => Err(Error::Contract(format!("source `{name}` was not prepared"))),
            }
        };

        let reports = tasks
            .par_iter()
            .map(|task| match task {
                Task::Identity(e) => check_identity(e, &evaluator),
                Task::Congruence(name, c) => match source_for(&c.source, ring_for_modulus(c.modulus)) {
                    Ok(s) => check_congruence(name, c, s),
                    Err(e) => {
                        VerificationReport::error(name, e.to_string(), Default::default()).with_detail(c.describe())
                    }
                },
                Task::Golden(name, g) => match source_for(&g.source, CoefficientRing::Integer) {
                    Ok(s) => check_golden(name, g, s),
                    Err(e) => VerificationReport::error(name, e.to_string(), Default::default()),
                },
            })
            .collect();
        Ok(reports)
    })
}

/// All claims `cphi_k(an + b) ≡ 0 (mod M)` with `a <= max_a`, `M` in
/// `moduli`, that hold for every instance available below `order`.
/// Progressions with fewer than `min_witnesses` instances are skipped.
pub fn scan_congruences(
    k: usize,
    max_a: usize,
    moduli: &[u64],
    order: usize,
    min_witnesses: usize,
) -> Result<Vec<CongruenceClaim>> {
    if moduli.is_empty() || max_a == 0 {
        return Ok(Vec::new());
    }
    if let Some(&bad) = moduli.iter().find(|&&m| m < 2) {
        return Err(crate::error::contract(format!("modulus {bad} < 2")));
    }
    let lcm = moduli.iter().try_fold(1u64, |acc, &m| {
        let l = acc.lcm(&m);
        (l <= u32::MAX as u64).then_some(l)
    });
    let ring = match lcm {
        Some(l) => CoefficientRing::Modular(l),
        None => CoefficientRing::Integer,
    };
    let source = format!("cphi{k}");
    let coeffs = compute_source(&source_expr(&source)?, order, ring, &SeriesCache::disabled())?;

    let mut claims = Vec::new();
    for a in 1..=max_a {
        for b in 0..a.min(order + 1) {
            let n_range = (order - b) / a + 1;
            if n_range < min_witnesses.max(1) {
                continue;
            }
            for &m in moduli {
                let claim = CongruenceClaim::plain(&source, a, b, m, n_range, ClaimLabel::Empirical);
                if check_congruence("scan", &claim, &coeffs).passed() {
                    claims.push(claim);
                }
            }
        }
    }
    Ok(claims)
}

/// Drops claims implied by another claim in the list: `(a, b, M)` follows
/// from `(a', b', M')` when `a' | a`, `b ≡ b' (mod a')` and `M | M'`.
pub fn primitive_claims(claims: &[CongruenceClaim]) -> Vec<CongruenceClaim> {
    let implies = |p: &CongruenceClaim, c: &CongruenceClaim| {
        p.source == c.source
            && c.a.is_multiple_of(p.a)
            && c.b % p.a == p.b
            && p.modulus.is_multiple_of(c.modulus)
            && (p.a, p.b, p.modulus) != (c.a, c.b, c.modulus)
    };
    claims
        .iter()
        .filter(|c| !claims.iter().any(|p| implies(p, c)))
        .cloned()
        .collect()
}
