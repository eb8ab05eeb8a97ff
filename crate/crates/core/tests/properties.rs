//! Randomized cross-module invariants: interval counts against brute
//! force, endpoint bookkeeping against column enumeration, LP duality and
//! caps, restricted-support monotonicity, and reduction under scrambling.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use colnum::lp::{self, VarKey};
use colnum::model::{family, ColumnSet, FamilyKind, TypedMatrix};
use colnum::numtheory::{phi_interval_bruteforce, ArithCache};
use colnum::oracle::row_index_cap;
use colnum::reduction::reduce;
use colnum::Error;

fn cache() -> &'static ArithCache {
    static CACHE: OnceLock<ArithCache> = OnceLock::new();
    CACHE.get_or_init(|| ArithCache::with_cache_dir(4_096, None))
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn interval_counts_match_brute_force(
        a in -500i64..=500,
        len in 0i64..=800,
        k in 1u64..=200,
    ) {
        let b = a + len;
        let fast = cache().phi_interval(a, b, k).unwrap();
        prop_assert_eq!(fast, phi_interval_bruteforce(a, b, k));
        let err = cache().phi_interval_error(a, b, k).unwrap();
        prop_assert!(err.abs() <= rat(cache().tau_unitary(k) as i64, 1));
    }
}

fn matrix_strategy() -> impl Strategy<Value = TypedMatrix> {
    proptest::collection::vec((-25i64..=25, -25i64..=25), 1..=4).prop_map(|rows| {
        let a = rows.iter().map(|r| r.0).collect();
        let b = rows.iter().map(|r| r.1).collect();
        TypedMatrix::new(a, b).expect("equal-length endpoint rows")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    // the counted, enumerated, and normalized views of a typed matrix agree,
    // and on normalized endpoints the determinant formula is exact
    #[test]
    fn endpoint_bookkeeping_matches_enumeration(matrix in matrix_strategy()) {
        let cols = matrix.enumerate_columns();
        prop_assert_eq!(matrix.column_count(cache()), cols.len() as u64);

        let normalized = matrix.normalize(cache());
        prop_assert_eq!(normalized.enumerate_columns(), cols.clone());

        if cols.len() >= 2 {
            prop_assert_eq!(
                normalized.delta_endpoints(cache()).unwrap(),
                cols.delta_bruteforce().unwrap()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn family_members_hit_their_counts(s in 1u64..=16, pick in 0u8..3) {
        let (kind, delta, extra) = match pick {
            0 => (FamilyKind::F1, s, 2),
            1 => (FamilyKind::F2, 2 * s + 1, 3),
            _ => {
                let delta = if s % 2 == 1 { 12 * (s / 2 + 1) + 2 } else { 12 * (s / 2) + 8 };
                (FamilyKind::F3, delta, 4)
            }
        };
        let matrix = family(kind, delta).unwrap();
        prop_assert_eq!(matrix.column_count(cache()), delta + extra);
        prop_assert_eq!(matrix.delta_endpoints(cache()).unwrap(), delta);
        prop_assert!(matrix.enumerate_columns().is_generic());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // scrambling family columns by a unimodular map and sign flips never
    // breaks the reduction guarantees
    #[test]
    fn reduction_survives_scrambling(
        delta in 2u64..=16,
        t1 in -3i64..=3,
        t2 in -3i64..=3,
        rotate in any::<bool>(),
        flips in any::<u64>(),
    ) {
        let base = family(FamilyKind::F1, delta).unwrap().enumerate_columns();
        // [[1, t1], [0, 1]] * [[1, 0], [t2, 1]], optionally rotated
        let mut u = [[1 + t1 * t2, t1], [t2, 1]];
        if rotate {
            u = [[u[1][0], u[1][1]], [-u[0][0], -u[0][1]]];
        }
        let scrambled = ColumnSet::new(
            base.columns()
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| {
                    let col = (u[0][0] * x + u[0][1] * y, u[1][0] * x + u[1][1] * y);
                    if flips >> (i % 64) & 1 == 1 { (-col.0, -col.1) } else { col }
                })
                .collect(),
        );
        let reduced = reduce(&scrambled, delta, cache()).unwrap();
        prop_assert!(reduced.column_count(cache()) >= base.len() as u64);
        prop_assert!(reduced.delta_endpoints(cache()).unwrap() <= delta);
        prop_assert!(reduced.m() <= row_index_cap(delta).unwrap());
    }
}

#[test]
fn duality_gap_is_zero_for_small_programs() {
    for m in 1..=8u32 {
        let primal = lp::build_primal(m, cache()).unwrap().solve().unwrap();
        let dual = lp::build_dual(m, cache()).unwrap().solve().unwrap();
        assert_eq!(primal.value, dual.value, "duality gap at m = {m}");
    }
}

#[test]
fn optimal_packings_respect_the_per_variable_caps() {
    for m in 1..=10u32 {
        let solution = lp::build_primal(m, cache()).unwrap().solve().unwrap();
        let mut total = BigRational::zero();
        for (key, x) in &solution.assignment {
            let VarKey::Single(k) = key else {
                panic!("primal variables are singletons")
            };
            let k = i64::from(*k);
            assert!(*x >= BigRational::zero());
            assert!(*x <= rat(1, k * k), "cap violated at k = {k}, m = {m}");
            total += rat(cache().phi(k as u64) as i64, 1) * x;
        }
        assert_eq!(total, solution.value, "objective mismatch at m = {m}");
    }
}

#[test]
fn restricted_values_tighten_with_larger_support() {
    for m in 4..=8u32 {
        let exact = lp::build_primal(m, cache()).unwrap().solve().unwrap().value;
        let mut last: Option<BigRational> = None;
        for doublings in 0..3u32 {
            let eps = rat(37 << doublings, 20 * i64::from(m));
            match lp::solve_restricted(m, &eps, cache()) {
                Ok(solve) => {
                    assert!(solve.value >= exact, "under the exact value at m = {m}");
                    if let Some(prev) = &last {
                        assert!(solve.value <= *prev, "not tightening at m = {m}");
                    }
                    last = Some(solve.value);
                }
                // a too-small support leaves rows uncovered; that rung of
                // the ladder simply does not produce a bound
                Err(Error::EmptyDualRows { .. }) => {}
                Err(e) => panic!("unexpected failure at m = {m}: {e}"),
            }
        }
    }
}
