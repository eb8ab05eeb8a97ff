//! The end-to-end verification suite: ten independent checks covering the
//! exact LP values, the certificate chain, the finite case analyses, and
//! the randomized reduction round trips. Each check reports pass/fail with
//! a human-readable detail line; failures carry the analysis inline.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use colnum::bounds;
use colnum::casecheck::{self, Relax};
use colnum::error::Result;
use colnum::lp;
use colnum::model::{family, g_tilde, ColumnSet, FamilyKind};
use colnum::numtheory::{phi_interval_bruteforce, ArithCache};
use colnum::oracle::{best_typed_matrix, row_index_cap, vertex_enumerate_lp_value, SearchConfig};
use colnum::reduction::reduce;

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    /// One-line rendering for logs: id, name, verdict.
    pub fn line(&self) -> String {
        format!(
            "check {:02} {:<28} {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn finish(id: u32, name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match body() {
        Ok((pass, detail)) => Check { id, name, pass, detail },
        Err(e) => Check { id, name, pass: false, detail: format!("errored: {e}") },
    }
}

/// Exact optimal values of the packing program at the pinned points,
/// each solve in under a second.
pub fn check_01_exact_lp_values() -> Check {
    finish(1, "exact-lp-values", || {
        let cache = ArithCache::with_cache_dir(64, None);
        let mut pass = true;
        let mut parts = Vec::new();
        for (m, num, den) in [(1u32, 1i64, 1i64), (2, 1, 1), (3, 1, 1), (5, 119, 120)] {
            let started = Instant::now();
            let solution = lp::build_primal(m, &cache)?.solve()?;
            let elapsed = started.elapsed();
            let ok = solution.value == rat(num, den) && elapsed.as_secs_f64() < 1.0;
            pass &= ok;
            parts.push(format!(
                "z_{m} = {} in {:.0} ms{}",
                solution.value,
                elapsed.as_secs_f64() * 1000.0,
                if ok { "" } else { " (MISMATCH)" }
            ));
        }
        Ok((pass, parts.join("; ")))
    })
}

/// The vertex-enumeration oracle and the simplex agree for every type up
/// to six, including the value 35/36 at four rows.
pub fn check_02_vertex_oracle_agreement() -> Check {
    finish(2, "vertex-oracle-agreement", || {
        let cache = ArithCache::with_cache_dir(64, None);
        let mut pass = true;
        let mut parts = Vec::new();
        for m in 1..=6u32 {
            let vertex = vertex_enumerate_lp_value(m, &cache)?;
            let simplex = lp::build_primal(m, &cache)?.solve()?.value;
            let ok = vertex == simplex && (m != 4 || vertex == rat(35, 36));
            pass &= ok;
            parts.push(format!(
                "m={m}: {vertex}{}",
                if ok { "" } else { " (DISAGREES)" }
            ));
        }
        Ok((pass, parts.join("; ")))
    })
}

/// The propagation sweep certifies the covering bound over [4, 500] within
/// the time budget, and the extended range [4, 3257] completes with every
/// recorded bound at most 999/1000. The extended run must also reproduce
/// the frozen solve profile (115 solves, exact fallback exactly at the
/// eleven small types), pinning the retry policy.
pub fn check_03_sweep_certification(jobs: usize) -> Check {
    finish(3, "sweep-certification", || {
        let cache = ArithCache::with_cache_dir(3_300, None);
        let w = rat(999, 1000);

        let started = Instant::now();
        let short = bounds::sweep(4, 500, &w, &cache, jobs)?;
        let short_secs = started.elapsed().as_secs_f64();
        let short_ok = short.records.iter().all(|r| r.bound <= w) && short_secs < 600.0;

        let started = Instant::now();
        let full = bounds::sweep(4, 3257, &w, &cache, jobs)?;
        let full_secs = started.elapsed().as_secs_f64();
        let full_ok = full.records.iter().all(|r| r.bound <= w);

        let fallbacks: Vec<u32> = full
            .records
            .iter()
            .filter(|r| r.solved && r.eps.is_none())
            .map(|r| r.m)
            .collect();
        let profile_ok = full.solves() == 115
            && fallbacks == [4, 5, 7, 8, 9, 11, 14, 15, 18, 23, 31];

        let pass = short_ok && full_ok && profile_ok;
        Ok((pass, format!(
            "[4,500] all <= 999/1000 in {short_secs:.1} s; [4,3257] all <= 999/1000 in \
             {full_secs:.1} s with {} solves (expected 115), exact fallbacks at {fallbacks:?}",
            full.solves()
        )))
    })
}

/// The three-rectangle certificate at the published constant is feasible
/// with objective at most 999/1000, and the admissible constant window is
/// nonempty and contains that constant.
pub fn check_04_analytic_certificate() -> Check {
    finish(4, "analytic-certificate", || {
        let cache = ArithCache::with_cache_dir(3_300, None);
        let m = 3257u32;
        let m2 = rat(i64::from(m) * i64::from(m), 1);
        let c = rat(496, 100) / &m2;
        let cert = bounds::analytic_certificate(m, &c, &cache)?;
        let feasible = lp::check_dual_feasible(&cert, &cache)?;
        let small = cert.objective <= rat(999, 1000);
        let (lo, hi) = bounds::c_window(m, &rat(1, 1000), &rat(999, 1000))?;
        let window_ok = lo <= c && c <= hi && lo < hi;
        let pass = feasible && small && window_ok;
        Ok((pass, format!(
            "feasible = {feasible}, objective ~ {}, window*m^2 ~ [{}, {}] around 4.96",
            colnum::interval::rational_to_decimal(&cert.objective, 6),
            colnum::interval::rational_to_decimal(&(&lo * &m2), 6),
            colnum::interval::rational_to_decimal(&(&hi * &m2), 6),
        )))
    })
}

/// Totient and divisor estimates: the relative-error check on [1880, 5000],
/// the coprime-count error against the unitary-divisor bound on 1000 random
/// windows, and the two summatory error-bound inequalities over [1, 10^4].
pub fn check_05_totient_estimates() -> Check {
    finish(5, "totient-estimates", || {
        let cache = ArithCache::with_cache_dir(10_000, None);
        let eps = rat(1, 1000);
        let rows = cache.asymptotic_check_range(1880, 5000, &eps)?;
        let range_ok = rows.iter().all(|r| r.pass);

        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
        let mut windows_ok = true;
        for _ in 0..1000 {
            let k = rng.gen_range(1..=300u64);
            let a = rng.gen_range(-1000..=1000i64);
            let b = a + rng.gen_range(0..=2000i64);
            let count = cache.phi_interval(a, b, k)?;
            if count != phi_interval_bruteforce(a, b, k) {
                windows_ok = false;
            }
            let err = cache.phi_interval_error(a, b, k)?;
            if err.abs() > rat(cache.tau_unitary(k) as i64, 1) {
                windows_ok = false;
            }
        }

        let tau_failures = cache.divisor_sum_bound_failures(10_000)?;
        let phi_failures = cache.totient_sum_error_failures(10_000)?;
        let sums_ok = tau_failures.is_empty() && phi_failures.is_empty();

        let pass = range_ok && windows_ok && sums_ok;
        Ok((pass, format!(
            "relative-error check holds on [1880, 5000] = {range_ok}; 1000 random \
             windows within the unitary-divisor bound = {windows_ok}; divisor-sum \
             bound failures in [1, 10^4] = {tau_failures:?} (the bound is false at \
             x = 1, where the sum is 1 but the right side is kappa/zeta(2) ~ 0.787, \
             and holds for every x in [2, 10^4]); totient-sum bound failures = \
             {phi_failures:?}"
        )))
    })
}

/// The three closed-form families hit their exact counts, exact
/// determinant budget, and genericity across sampled residue classes.
pub fn check_06_family_counts() -> Check {
    finish(6, "family-counts", || {
        let cache = ArithCache::with_cache_dir(1_000, None);
        let mut pass = true;
        let mut bad = Vec::new();
        let mut tested = 0u32;
        let mut run = |kind: FamilyKind, delta: u64, expect: u64| -> Result<()> {
            tested += 1;
            let m = family(kind, delta)?;
            let ok = m.column_count(&cache) == expect
                && m.delta_endpoints(&cache)? == delta
                && m.enumerate_columns().is_generic();
            if !ok {
                pass = false;
                bad.push(format!("{kind:?} at delta = {delta}"));
            }
            Ok(())
        };
        for delta in [6u64, 12, 48, 96, 150, 198, 1, 7, 55, 121, 193, 2, 8, 62, 140, 200,
                      3, 9, 57, 129, 4, 10, 64, 196, 5, 11, 59, 155] {
            run(FamilyKind::F1, delta, delta + 2)?;
        }
        for delta in [3u64, 5, 7, 9, 55, 99, 121, 155, 193] {
            run(FamilyKind::F2, delta, delta + 3)?;
        }
        for delta in [14u64, 20, 26, 44, 98, 140, 200] {
            run(FamilyKind::F3, delta, delta + 4)?;
        }
        Ok((pass, if pass {
            format!("{tested} family instances across all residue classes: counts, \
                     determinants, and genericity all exact")
        } else {
            format!("violations at: {}", bad.join(", "))
        }))
    })
}

/// The finite residue systems are unsatisfiable, and the one relaxation
/// that must revive solutions does so only in the expected configuration.
pub fn check_07_residue_case_checks() -> Check {
    finish(7, "residue-case-checks", || {
        let t2 = casecheck::check_type2(None)?;
        let t3_3 = casecheck::check_type3(3, None)?;
        let t3_4 = casecheck::check_type3(4, None)?;
        let relaxed = casecheck::check_type3(4, Some(Relax::DeltaResidues))?;
        let config_ok = relaxed.solutions_found == 54
            && relaxed.witnesses.iter().all(|w| {
                w.delta == 2 && w.e == [0, 0, 1, 1] && w.a3 % 3 == 1 && w.b3 % 3 == 2
            });
        let pass = t2.solutions_found == 0
            && t3_3.solutions_found == 0
            && t3_4.solutions_found == 0
            && config_ok;
        Ok((pass, format!(
            "two-row {}/{}, three-row d=3 {}/{}, d=4 {}/{}; delta relaxation \
             revives {} solutions, all in the single surviving configuration = {config_ok}",
            t2.solutions_found, t2.assignments_tested,
            t3_3.solutions_found, t3_3.assignments_tested,
            t3_4.solutions_found, t3_4.assignments_tested,
            relaxed.solutions_found,
        )))
    })
}

// random 2x2 unimodular matrix with all entries bounded by 10, built from
// elementary shears and swaps
fn random_unimodular(rng: &mut ChaCha8Rng) -> [[i64; 2]; 2] {
    loop {
        let mut u: [[i64; 2]; 2] = [[1, 0], [0, 1]];
        for _ in 0..rng.gen_range(1..=4) {
            let t = rng.gen_range(-3..=3i64);
            let next = match rng.gen_range(0..3u8) {
                0 => [[u[0][0] + t * u[1][0], u[0][1] + t * u[1][1]], u[1]],
                1 => [u[0], [u[1][0] + t * u[0][0], u[1][1] + t * u[0][1]]],
                _ => [[u[1][0], u[1][1]], [-u[0][0], -u[0][1]]],
            };
            u = next;
        }
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        let small = u.iter().flatten().all(|e| e.abs() <= 10);
        if det.abs() == 1 && small {
            return u;
        }
    }
}

/// 200 randomized reduction round trips: family columns hit with random
/// unimodular transforms (entries at most 10) and random per-column sign
/// flips always reduce to at least as many columns, within budget, and
/// within the type cap.
pub fn check_08_randomized_reduction(count: u32) -> Check {
    finish(8, "randomized-reduction", || {
        let cache = ArithCache::with_cache_dir(256, None);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
        let mut failures = Vec::new();
        for trial in 0..count {
            let (kind, delta) = match trial % 3 {
                0 => (FamilyKind::F1, rng.gen_range(2..=24u64)),
                1 => (FamilyKind::F2, 2 * rng.gen_range(1..=11u64) + 1),
                _ => (FamilyKind::F3, if rng.gen_bool(0.5) { 14 } else { 20 }),
            };
            let base = family(kind, delta)?.enumerate_columns();
            let u = random_unimodular(&mut rng);
            let scrambled = ColumnSet::new(
                base.columns()
                    .iter()
                    .map(|&(x, y)| {
                        let col = (u[0][0] * x + u[0][1] * y, u[1][0] * x + u[1][1] * y);
                        if rng.gen_bool(0.5) { (-col.0, -col.1) } else { col }
                    })
                    .collect(),
            );
            let ok = match reduce(&scrambled, delta, &cache) {
                Ok(m) => {
                    m.column_count(&cache) >= base.len() as u64
                        && m.delta_endpoints(&cache)? <= delta
                        && m.m() <= row_index_cap(delta)?
                }
                Err(_) => false,
            };
            if !ok {
                failures.push(format!("{kind:?} delta = {delta} (trial {trial})"));
            }
        }
        let pass = failures.is_empty();
        Ok((pass, if pass {
            format!("{count}/{count} randomized transforms reduced with every invariant intact")
        } else {
            format!("violations: {}", failures.join(", "))
        }))
    })
}

/// The counting threshold holds at 10^8 and honestly fails at 10^4.
pub fn check_09_counting_threshold() -> Check {
    finish(9, "counting-threshold", || {
        let w = rat(999, 1000);
        let high = bounds::verify_threshold(100_000_000, &w);
        let low = bounds::verify_threshold(10_000, &w);
        Ok((high && !low, format!(
            "delta = 10^8 -> {high}; delta = 10^4 -> {low} (expected true / false)"
        )))
    })
}

/// Exhaustive small-budget searches: the best endpoint-form count at every
/// budget in [2, 12] against the closed-form target and the refined
/// per-type bounds, and the three-row restriction against the target.
pub fn check_10_small_delta_search(jobs: usize) -> Check {
    finish(10, "small-delta-search", || {
        let cache = ArithCache::with_cache_dir(128, None);
        let mut pass = true;
        let mut parts = Vec::new();
        for delta in 2..=12u64 {
            let outcome = best_typed_matrix(&SearchConfig::new(delta)?, &cache, jobs)?;
            let target = g_tilde(delta);
            let m_won = outcome.matrix.m().max(1);
            let upper = if m_won <= 3 {
                rat(bounds::refined_small_type_bound(m_won, delta)? as i64, 1)
            } else {
                bounds::column_bound(m_won, delta, &rat(35, 36)).ceil()
            };
            let in_range = rat(target as i64, 1) <= rat(outcome.count as i64, 1)
                && rat(outcome.count as i64, 1) <= upper;

            let capped = SearchConfig::new(delta)?
                .with_m_max(row_index_cap(delta)?.min(3))?;
            let three_rows = best_typed_matrix(&capped, &cache, jobs)?;
            let capped_ok = three_rows.count <= target;

            pass &= in_range && capped_ok;
            parts.push(format!(
                "delta = {delta}: best {} vs target {target}{}",
                outcome.count,
                if in_range && capped_ok { "" } else { " (OUT OF RANGE)" }
            ));
        }
        Ok((pass, format!(
            "{} -- the budget-2 search is exhaustive and its best count 4 genuinely \
             falls short of the closed-form 6: every endpoint-form column is a \
             (k, j) with k <= delta(M) <= 2, and no such matrix reaches 6 columns, \
             so the closed form is unattainable in endpoint form at delta = 2",
            parts.join("; ")
        )))
    })
}

/// The full verdict, in suite order.
pub fn run_all(jobs: usize) -> Vec<Check> {
    vec![
        check_01_exact_lp_values(),
        check_02_vertex_oracle_agreement(),
        check_03_sweep_certification(jobs),
        check_04_analytic_certificate(),
        check_05_totient_estimates(),
        check_06_family_counts(),
        check_07_residue_case_checks(),
        check_08_randomized_reduction(200),
        check_09_counting_threshold(),
        check_10_small_delta_search(jobs),
    ]
}
