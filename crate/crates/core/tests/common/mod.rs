#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use qphi::frobenius::quadform_theta;
use qphi::verify::{Evaluator, Expr};
use qphi::{eta_quotient, CoefficientRing, ProductSpec, Series, ThetaKind};

pub type Outcome = Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

pub fn ring() -> impl Strategy<Value = CoefficientRing> {
    prop_oneof![
        Just(CoefficientRing::Integer),
        Just(CoefficientRing::Modular(4)),
        Just(CoefficientRing::Modular(27)),
        Just(CoefficientRing::Modular(2187)),
        Just(CoefficientRing::Modular(1_000_003)),
        Just(CoefficientRing::Modular(u64::MAX - 58)),
    ]
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    // mostly zeros, so both the sparse and the dense loops get exercised
    prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -5i64..=5, 1 => any::<i64>()], len)
}

/// Three series of one random order in one random ring.
pub fn triple() -> impl Strategy<Value = (Series, Series, Series)> {
    (ring(), 0usize..40).prop_flat_map(|(r, n)| {
        (coeffs(n + 1), coeffs(n + 1), coeffs(n + 1)).prop_map(move |(a, b, c)| {
            (
                Series::from_i64(r, &a).unwrap(),
                Series::from_i64(r, &b).unwrap(),
                Series::from_i64(r, &c).unwrap(),
            )
        })
    })
}

pub fn integer_series() -> impl Strategy<Value = Series> {
    (0usize..60)
        .prop_flat_map(coeffs_plus_one)
        .prop_map(|c| Series::from_i64(CoefficientRing::Integer, &c).unwrap())
}

fn coeffs_plus_one(n: usize) -> impl Strategy<Value = Vec<i64>> {
    coeffs(n + 1)
}

/// `a` with its constant term replaced by 1.
pub fn with_unit_constant(a: &Series) -> Series {
    let one = Series::one(a.ring(), a.order());
    a.sub(&one.scale(&a.coeff(0))).unwrap().add(&one).unwrap()
}

pub fn ring_laws(cases: u32) -> Outcome {
    run(cases, triple(), |(a, b, c)| {
        let r = a.ring();
        let zero = Series::zero(r, a.order());
        let one = Series::one(r, a.order());
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&zero).unwrap(), a.clone());
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
        prop_assert_eq!(a.sub(&b).unwrap(), a.add(&b.neg()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&one).unwrap(), a.clone());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.pow(3).unwrap(), a.mul(&a).unwrap().mul(&a).unwrap());
        prop_assert_eq!(a.pow(0).unwrap(), one.clone());
        // unit constant term: the inverse is two-sided
        let unit = with_unit_constant(&a);
        let inv = unit.inverse().unwrap();
        prop_assert_eq!(unit.mul(&inv).unwrap(), one);
        Ok(())
    })
}

/// `f = sum_r q^r * extract(f, m, r)(q^m)`.
pub fn dissection_reconstruction(cases: u32) -> Outcome {
    run(cases, (triple(), 1usize..8), |((f, _, _), m)| {
        let n = f.order();
        let mut acc = Series::zero(f.ring(), n);
        for r in 0..m.min(n + 1) {
            let part = f.extract_progression(m, r).unwrap();
            prop_assert_eq!(part.order(), (n - r) / m);
            let mut spread = vec![BigInt::from(0); n + 1];
            for (i, c) in part.coefficients().into_iter().enumerate() {
                spread[r + m * i] = c;
            }
            acc = acc.add(&Series::from_bigints(f.ring(), spread).unwrap()).unwrap();
        }
        prop_assert_eq!(acc, f);
        Ok(())
    })
}

fn small_spec() -> impl Strategy<Value = ProductSpec> {
    prop::collection::vec((1usize..=6, -4i64..=4), 0..4).prop_map(|steps| ProductSpec::eta(steps).unwrap())
}

fn pipeline() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        small_spec().prop_map(|factors| Expr::Eta { factors }),
        prop::sample::select(ThetaKind::ALL.to_vec()).prop_map(Expr::theta),
        (
            prop::sample::select(ThetaKind::ALL.to_vec()),
            prop::sample::select(vec![-1i8, 1]),
            1usize..5
        )
            .prop_map(|(k, s, m)| Expr::theta_at(k, s, m)),
        (0usize..4).prop_map(Expr::q),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::mul),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::add),
            (inner.clone(), 1u32..4).prop_map(|(e, k)| Expr::pow(e, k)),
            (inner.clone(), 1usize..5)
                .prop_flat_map(|(e, m)| (Just(e), Just(m), 0..m))
                .prop_map(|(e, m, r)| Expr::extract(e, m, r)),
            (inner.clone(), 1usize..4).prop_map(|(e, m)| Expr::SubstitutePower { arg: Box::new(e), m }),
            inner.prop_map(|e| Expr::NegateVariable { arg: Box::new(e) }),
        ]
    })
}

/// Evaluating a pipeline at `N` and truncating to `n` equals evaluating at
/// `n` directly, with and without a shared memo.
pub fn truncation_coherence(cases: u32) -> Outcome {
    run(cases, (pipeline(), ring(), 0usize..80, 0usize..80), |(e, r, n1, n2)| {
        let (lo, hi) = (n1.min(n2), n1.max(n2));
        let fresh = Evaluator::new();
        let high = fresh.evaluate(&e, hi, r);
        let low = Evaluator::new().evaluate(&e, lo, r);
        let low_shared = fresh.evaluate(&e, lo, r);
        match (high, low, low_shared) {
            (Ok(h), Ok(l), Ok(ls)) => {
                prop_assert_eq!(h.truncate(lo), l.clone());
                prop_assert_eq!(ls, l);
            }
            (Err(_), Err(_), Err(_)) => {}
            (h, l, ls) => {
                return Err(TestCaseError::fail(format!(
                    "ok-ness differs: {:?} {:?} {:?}",
                    h.is_ok(),
                    l.is_ok(),
                    ls.is_ok()
                )))
            }
        }
        Ok(())
    })
}

/// Reduction mod `M` commutes with every ring operation.
pub fn reduce_mod_commutes(cases: u32) -> Outcome {
    let moduli = prop::sample::select(vec![2u64, 3, 4, 9, 27, 243, 2187, 1_000_003]);
    run(
        cases,
        (integer_series(), integer_series(), moduli, 1usize..5),
        |(a, b, m, k)| {
            let red = |s: &Series| s.reduce_mod(m).unwrap();
            prop_assert_eq!(red(&a.add(&b).unwrap()), red(&a).add(&red(&b)).unwrap());
            prop_assert_eq!(red(&a.mul(&b).unwrap()), red(&a).mul(&red(&b)).unwrap());
            prop_assert_eq!(red(&a.pow(3).unwrap()), red(&a).pow(3).unwrap());
            prop_assert_eq!(red(&a.negate_variable()), red(&a).negate_variable());
            prop_assert_eq!(red(&a.scale_i64(-7)), red(&a).scale_i64(-7));
            prop_assert_eq!(
                red(&a.substitute_power(k).unwrap()),
                red(&a).substitute_power(k).unwrap()
            );
            if a.order() >= k - 1 {
                prop_assert_eq!(
                    red(&a.extract_progression(k, k - 1).unwrap()),
                    red(&a).extract_progression(k, k - 1).unwrap()
                );
            }
            // an integer unit stays a unit mod m
            let unit = with_unit_constant(&a);
            prop_assert_eq!(red(&unit.inverse().unwrap()), red(&unit).inverse().unwrap());
            Ok(())
        },
    )
}

/// Canonical `ProductSpec` does not depend on factor order or splitting.
pub fn product_spec_reorder(cases: u32) -> Outcome {
    let factors = prop::collection::vec((1usize..=5, 0usize..5, -3i64..=3), 0..6)
        .prop_map(|v| v.into_iter().map(|(b, off, e)| (1 + off % b, b, e)).collect::<Vec<_>>());
    run(cases, (factors, any::<u64>()), |(fs, seed)| {
        let mut shuffled = fs.clone();
        let len = shuffled.len();
        if len > 1 {
            shuffled.rotate_left((seed as usize) % len);
            shuffled.swap(0, (seed as usize / 7) % len);
        }
        let mut split = Vec::new();
        for &(a, b, e) in &shuffled {
            split.push((a, b, e - 1));
            split.push((a, b, 1));
        }
        let p = ProductSpec::new(fs).unwrap();
        let q = ProductSpec::new(shuffled).unwrap();
        let s = ProductSpec::new(split).unwrap();
        prop_assert_eq!(&p, &q);
        prop_assert_eq!(&p, &s);
        let r = CoefficientRing::Modular(2187);
        prop_assert_eq!(eta_quotient(&p, 40, r).unwrap(), eta_quotient(&s, 40, r).unwrap());
        Ok(())
    })
}

/// Brute-force count of `m in Z^(k-1)` with `Q(m) = n`.
pub fn naive_quadform_counts(k: usize, order: usize) -> Vec<u64> {
    let dims = k - 1;
    let mut counts = vec![0u64; order + 1];
    if dims == 0 {
        counts[0] = 1;
        return counts;
    }
    // 2Q = sum m_i^2 + (sum m_i)^2 >= m_i^2, so |m_i| <= sqrt(2N)
    let bound = (0i64..).take_while(|b| b * b <= 2 * order as i64).last().unwrap();
    let mut m = vec![-bound; dims];
    loop {
        let sq: i64 = m.iter().map(|x| x * x).sum();
        let s: i64 = m.iter().sum();
        let twice = sq + s * s;
        if twice % 2 == 0 && (twice / 2) as usize <= order {
            counts[(twice / 2) as usize] += 1;
        }
        let mut i = 0;
        loop {
            if i == dims {
                return counts;
            }
            if m[i] < bound {
                m[i] += 1;
                break;
            }
            m[i] = -bound;
            i += 1;
        }
    }
}

pub fn quadform_dp_vs_naive() -> Outcome {
    for k in 1..=6 {
        for order in [0, 1, 7, 30] {
            let dp = quadform_theta(k, order).map_err(|e| e.to_string())?.series;
            let naive = naive_quadform_counts(k, order);
            for (n, &c) in naive.iter().enumerate() {
                if dp.coeff(n) != BigInt::from(c) {
                    return Err(format!("k={k} N={order} n={n}: dp {} naive {c}", dp.coeff(n)));
                }
            }
        }
    }
    Ok(())
}
