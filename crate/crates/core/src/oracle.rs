//! Independent brute-force baselines at desk scale.
//!
//! Two cross-checks live here: an exhaustive search for the typed matrix
//! with the most columns among all matrices whose endpoint data stays
//! within a given determinant budget, and a vertex-enumeration solver for
//! the small packing programs that the simplex code must agree with.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::consts;
use crate::error::{Error, Result};
use crate::model::TypedMatrix;
use crate::numtheory::ArithCache;

/// Search space description for `best_typed_matrix`.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub delta: u64,
    pub m_max: u32,
    /// Endpoints are confined to [-window, window].
    pub window: i64,
    /// Fix the first nonempty row's left endpoint by translation symmetry.
    pub normalize_a1: bool,
}

/// Practical exhaustiveness limit; larger budgets need the explicit
/// override constructor.
const SEARCH_DELTA_LIMIT: u64 = 30;

impl SearchConfig {
    pub fn new(delta: u64) -> Result<Self> {
        if delta > SEARCH_DELTA_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "search budget {delta} exceeds the exhaustiveness limit \
                 {SEARCH_DELTA_LIMIT}; use new_unchecked to override"
            )));
        }
        Self::new_unchecked(delta)
    }

    /// Same defaults without the practical budget cap.
    pub fn new_unchecked(delta: u64) -> Result<Self> {
        if delta == 0 {
            return Err(Error::InvalidArgument("delta must be positive".into()));
        }
        Ok(SearchConfig {
            delta,
            m_max: row_index_cap(delta)?,
            window: 2 * i64::try_from(delta)
                .map_err(|_| Error::InvalidArgument("delta too large".into()))?,
            normalize_a1: true,
        })
    }

    pub fn with_m_max(mut self, m_max: u32) -> Result<Self> {
        let cap = row_index_cap(self.delta)?;
        if m_max == 0 || m_max > cap {
            return Err(Error::InvalidArgument(format!(
                "m_max {m_max} outside [1, {cap}] for delta {}",
                self.delta
            )));
        }
        self.m_max = m_max;
        Ok(self)
    }

    pub fn with_window(mut self, window: i64) -> Result<Self> {
        if window <= 0 {
            return Err(Error::InvalidArgument("window must be positive".into()));
        }
        self.window = window;
        Ok(self)
    }

    pub fn with_normalize(mut self, normalize: bool) -> Self {
        self.normalize_a1 = normalize;
        self
    }
}

/// Largest row index m with 2 m^2 <= pi * delta, decided by the frozen
/// enclosure of pi (never ambiguous: the compared quantity is rational).
pub fn row_index_cap(delta: u64) -> Result<u32> {
    let pi_delta = consts::pi().scale(&BigRational::from_integer(BigInt::from(delta)));
    let mut m = 1u32;
    loop {
        let next = u64::from(m) + 1;
        let bound = BigRational::from_integer(BigInt::from(2 * next * next));
        match pi_delta.ge_rat(&bound) {
            Some(true) => m += 1,
            Some(false) => return Ok(m),
            None => return Err(Error::Internal("pi enclosure too wide".into())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub matrix: TypedMatrix,
    pub count: u64,
    pub nodes_explored: u64,
}

/// A candidate row: coprime endpoints, the column count it contributes,
/// or the canonical empty row.
#[derive(Clone, Copy, Debug)]
struct RowChoice {
    a: i64,
    b: i64,
    count: u64,
}

const EMPTY_ROW: RowChoice = RowChoice { a: 1, b: 0, count: 0 };

fn gcd_i(a: i64, k: i64) -> i64 {
    crate::numtheory::gcd(a.unsigned_abs(), k.unsigned_abs()) as i64
}

/// All rows for index k alone compatible with the budget: coprime
/// endpoints inside the window with k (b - a) <= delta and k <= delta.
fn row_candidates(k: u32, delta: u64, window: i64, cache: &ArithCache) -> Result<Vec<RowChoice>> {
    let ki = i64::from(k);
    let mut out = Vec::new();
    if u64::from(k) > delta {
        return Ok(out);
    }
    let max_span = (delta / u64::from(k)) as i64;
    for a in -window..=window {
        if gcd_i(a, ki) != 1 {
            continue;
        }
        let b_hi = (a + max_span).min(window);
        for b in a..=b_hi {
            if gcd_i(b, ki) != 1 {
                continue;
            }
            let count = cache.phi_interval(a, b, u64::from(k))?;
            out.push(RowChoice { a, b, count });
        }
    }
    Ok(out)
}

/// Pairwise budget check on normalized rows (l, al, bl) and (k, ak, bk)
/// with l <= k, mirroring the endpoint-determinant formula.
fn pair_within_budget(l: u32, al: i64, bl: i64, k: u32, ak: i64, bk: i64, delta: u64) -> bool {
    let (l, k) = (i64::from(l), i64::from(k));
    let d1 = l * bk - k * al;
    let d2 = k * bl - l * ak;
    let delta = delta as i64;
    d1 <= delta && d2 <= delta
}

struct Search {
    delta: u64,
    m_max: u32,
    normalize: bool,
    candidates: Vec<Vec<RowChoice>>,
    /// best additional count obtainable from rows k..=m_max
    tail_bound: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Best {
    count: u64,
    rows: u32,
    a: Vec<i64>,
    b: Vec<i64>,
}

impl Best {
    /// Higher count wins; ties prefer fewer rows, then lexicographically
    /// smaller endpoint vectors.
    fn beats(&self, other: &Best) -> bool {
        (other.count, &self.rows, &self.a, &self.b)
            < (self.count, &other.rows, &other.a, &other.b)
    }
}

struct Frame {
    fixed: Vec<RowChoice>,
    seen_nonempty: bool,
    partial: u64,
}

impl Search {
    fn new(cfg: &SearchConfig, cache: &ArithCache) -> Result<Self> {
        let mut candidates = Vec::with_capacity(cfg.m_max as usize);
        for k in 1..=cfg.m_max {
            candidates.push(row_candidates(k, cfg.delta, cfg.window, cache)?);
        }
        let mut tail_bound = vec![0u64; cfg.m_max as usize + 2];
        for k in (1..=cfg.m_max as usize).rev() {
            let here = candidates[k - 1].iter().map(|c| c.count).max().unwrap_or(0);
            tail_bound[k] = tail_bound[k + 1] + here;
        }
        Ok(Search {
            delta: cfg.delta,
            m_max: cfg.m_max,
            normalize: cfg.normalize_a1,
            candidates,
            tail_bound,
        })
    }

    fn leaf(&self, frame: &Frame, best: &mut Option<Best>) {
        let count = 1 + frame.partial;
        let rows = frame
            .fixed
            .iter()
            .rposition(|r| r.a <= r.b)
            .map(|i| i as u32 + 1)
            .unwrap_or(1);
        let cand = Best {
            count,
            rows,
            a: frame.fixed[..rows as usize].iter().map(|r| r.a).collect(),
            b: frame.fixed[..rows as usize].iter().map(|r| r.b).collect(),
        };
        match best {
            Some(b) if !cand.beats(b) => {}
            _ => *best = Some(cand),
        }
    }

    fn extend(&self, frame: &mut Frame, k: u32, best: &mut Option<Best>, nodes: &mut u64) {
        if k > self.m_max {
            self.leaf(frame, best);
            return;
        }
        let remaining = self.tail_bound[k as usize];
        if let Some(b) = best {
            if 1 + frame.partial + remaining < b.count {
                return;
            }
        }
        let choices = &self.candidates[k as usize - 1];
        // the canonical empty row first, then candidates in endpoint order
        self.step(frame, k, EMPTY_ROW, false, best, nodes);
        for choice in choices {
            if self.normalize && !frame.seen_nonempty {
                // translation symmetry pins the first nonempty row's left
                // endpoint into [0, k)
                if choice.a < 0 || choice.a >= i64::from(k) {
                    continue;
                }
            }
            let ok = frame.fixed.iter().enumerate().all(|(i, r)| {
                r.a > r.b
                    || pair_within_budget(i as u32 + 1, r.a, r.b, k, choice.a, choice.b, self.delta)
            });
            if ok {
                self.step(frame, k, *choice, choice.a <= choice.b, best, nodes);
            }
        }
    }

    fn step(
        &self,
        frame: &mut Frame,
        k: u32,
        choice: RowChoice,
        nonempty: bool,
        best: &mut Option<Best>,
        nodes: &mut u64,
    ) {
        *nodes += 1;
        let was = frame.seen_nonempty;
        frame.fixed.push(choice);
        frame.seen_nonempty = was || nonempty;
        frame.partial += choice.count;
        self.extend(frame, k + 1, best, nodes);
        frame.partial -= choice.count;
        frame.seen_nonempty = was;
        frame.fixed.pop();
    }

    /// Enumerates first-row choices for partitioned runs; mirrors the
    /// ordering used by `extend` at k = 1.
    fn roots(&self) -> Vec<RowChoice> {
        let mut roots = vec![EMPTY_ROW];
        for choice in &self.candidates[0] {
            if self.normalize && choice.a != 0 {
                continue;
            }
            roots.push(*choice);
        }
        roots
    }

    fn run_root(&self, root: RowChoice) -> (Option<Best>, u64) {
        let mut best = None;
        let mut nodes = 0u64;
        let mut frame = Frame { fixed: Vec::new(), seen_nonempty: false, partial: 0 };
        if self.m_max == 0 {
            return (best, nodes);
        }
        self.step(&mut frame, 1, root, root.a <= root.b, &mut best, &mut nodes);
        (best, nodes)
    }
}

/// Exhaustive maximum of the column count over all typed matrices within
/// the window whose endpoint data respects the budget. Subtrees rooted at
/// the first-row choice run on up to `jobs` threads; the reduction is
/// performed in root order, so results are independent of scheduling.
pub fn best_typed_matrix(
    cfg: &SearchConfig,
    cache: &ArithCache,
    jobs: usize,
) -> Result<SearchOutcome> {
    let search = Search::new(cfg, cache)?;
    let roots = search.roots();
    let jobs = jobs.max(1).min(roots.len().max(1));
    let mut results: Vec<(Option<Best>, u64)> = Vec::with_capacity(roots.len());
    if jobs <= 1 {
        for root in &roots {
            results.push(search.run_root(*root));
        }
    } else {
        let mut slots: Vec<Option<(Option<Best>, u64)>> = vec![None; roots.len()];
        std::thread::scope(|scope| {
            let search = &search;
            let roots = &roots;
            let mut handles = Vec::new();
            for w in 0..jobs {
                handles.push(scope.spawn(move || {
                    let mut mine = Vec::new();
                    let mut i = w;
                    while i < roots.len() {
                        mine.push((i, search.run_root(roots[i])));
                        i += jobs;
                    }
                    mine
                }));
            }
            for h in handles {
                for (i, r) in h.join().expect("search worker panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        results.extend(slots.into_iter().map(|s| s.expect("every root ran")));
    }
    let mut best: Option<Best> = None;
    let mut nodes = 0u64;
    for (cand, n) in results {
        nodes += n;
        if let Some(c) = cand {
            match &best {
                Some(b) if !c.beats(b) => {}
                _ => best = Some(c),
            }
        }
    }
    let best = best.ok_or_else(|| Error::Internal("search yielded no matrix".into()))?;
    let matrix = TypedMatrix::new(best.a, best.b)?;
    // paranoid re-validation of the winner through the model layer
    let recount = matrix.column_count(cache);
    if recount != best.count {
        return Err(Error::Internal("winner recount mismatch".into()));
    }
    if matrix.delta_endpoints(cache)? > cfg.delta {
        return Err(Error::Internal("winner violates the budget".into()));
    }
    Ok(SearchOutcome { matrix, count: best.count, nodes_explored: nodes })
}

/// Exact determinant of a small integer matrix by fraction-free
/// elimination; entries stay bounded by minors of the input.
fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for i in 0..n {
        let pivot_row = (i..n).find(|&r| m[r][i] != 0);
        let Some(pr) = pivot_row else { return 0 };
        if pr != i {
            m.swap(pr, i);
            sign = -sign;
        }
        for r in i + 1..n {
            for c in i + 1..n {
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) / prev;
            }
            m[r][i] = 0;
        }
        prev = m[i][i];
    }
    sign * prev
}

/// Optimal value of the packing program by enumerating basic points:
/// every choice of m constraint hyperplanes (pair constraints and
/// nonnegativity facets), solved exactly and filtered for feasibility.
pub fn vertex_enumerate_lp_value(m: u32, cache: &ArithCache) -> Result<BigRational> {
    if m == 0 || m > 6 {
        return Err(Error::InvalidArgument(
            "vertex enumeration supports 1 <= m <= 6".into(),
        ));
    }
    let n = m as usize;
    // scale so every right-hand side is an integer
    let mut lcm: i128 = 1;
    for k in 1..=m as i128 {
        lcm = num_integer::lcm(lcm, k);
    }
    let scale = lcm * lcm;
    // rows: (coefficients, scaled rhs, is_pair)
    let mut rows: Vec<(Vec<i128>, i128)> = Vec::new();
    let mut pair_info: Vec<(usize, usize, i128)> = Vec::new();
    for k in 1..=n {
        for l in k..=n {
            let mut coef = vec![0i128; n];
            coef[k - 1] += 1;
            coef[l - 1] += 1;
            let rhs = 2 * scale / (k as i128 * l as i128);
            pair_info.push((k - 1, l - 1, rhs));
            rows.push((coef, rhs));
        }
    }
    for k in 0..n {
        let mut coef = vec![0i128; n];
        coef[k] = 1;
        rows.push((coef, 0));
    }
    let phi: Vec<i128> = (1..=m as u64).map(|k| cache.phi(k) as i128).collect();

    let total = rows.len();
    let mut combo: Vec<usize> = (0..n).collect();
    let mut best_num: i128 = 0;
    let mut best_den: i128 = 1; // the origin is always feasible with value 0
    loop {
        // solve the n x n system given by the chosen rows via Cramer
        let a: Vec<Vec<i128>> = combo.iter().map(|&i| rows[i].0.clone()).collect();
        let det = bareiss_det(a.clone());
        if det != 0 {
            let mut sol = Vec::with_capacity(n);
            for col in 0..n {
                let mut ai = a.clone();
                for (r, &i) in combo.iter().enumerate() {
                    ai[r][col] = rows[i].1;
                }
                sol.push(bareiss_det(ai));
            }
            // feasibility in scaled coordinates x_col = sol[col] / det
            let s = if det > 0 { 1 } else { -1 };
            let dabs = det.abs();
            let feasible = sol.iter().all(|&v| v * s >= 0)
                && pair_info
                    .iter()
                    .all(|&(k, l, rhs)| {
                        let lhs = if k == l { 2 * sol[k] } else { sol[k] + sol[l] };
                        lhs * s <= rhs * dabs
                    });
            if feasible {
                let num: i128 = (0..n).map(|k| phi[k] * sol[k] * s).sum();
                // compare num / (dabs * scale) against the incumbent
                if num * best_den > best_num * (dabs * scale) {
                    best_num = num;
                    best_den = dabs * scale;
                }
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(BigRational::new(BigInt::from(best_num), BigInt::from(best_den)));
            }
            i -= 1;
            if combo[i] != i + total - n {
                combo[i] += 1;
                for j in i + 1..n {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{build_primal, LpStatus};
    use crate::model::{family, g_tilde, FamilyKind};

    fn cache() -> ArithCache {
        ArithCache::with_cache_dir(10_000, None)
    }

    #[test]
    fn vertex_enumeration_matches_simplex() {
        let c = cache();
        let known: [(u32, (i64, i64)); 6] =
            [(1, (1, 1)), (2, (1, 1)), (3, (1, 1)), (4, (35, 36)), (5, (119, 120)), (6, (29, 30))];
        for (m, (num, den)) in known {
            let v = vertex_enumerate_lp_value(m, &c).unwrap();
            assert_eq!(v, BigRational::new(BigInt::from(num), BigInt::from(den)), "m = {m}");
            let sol = build_primal(m, &c).unwrap().solve().unwrap();
            assert_eq!(sol.status, LpStatus::Optimal);
            assert_eq!(sol.value, v, "solver agreement at m = {m}");
        }
        assert!(vertex_enumerate_lp_value(7, &c).is_err());
    }

    #[test]
    fn row_index_cap_values() {
        // 2 m^2 <= pi delta
        let expected = [(2, 1), (3, 2), (4, 2), (5, 2), (6, 3), (8, 3), (10, 3), (11, 4), (12, 4)];
        for (delta, cap) in expected {
            assert_eq!(row_index_cap(delta).unwrap(), cap, "delta = {delta}");
        }
    }

    #[test]
    fn search_counts_for_small_budgets() {
        let c = cache();
        let expected = [
            (2u64, 4u64),
            (3, 6),
            (4, 6),
            (5, 8),
            (6, 8),
            (7, 10),
            (8, 12),
            (9, 12),
            (10, 12),
            (11, 14),
            (12, 14),
        ];
        for (delta, count) in expected {
            let cfg = SearchConfig::new(delta).unwrap();
            let out = best_typed_matrix(&cfg, &c, 1).unwrap();
            assert_eq!(out.count, count, "delta = {delta}");
            assert!(out.nodes_explored > 0);
            assert!(out.matrix.delta_endpoints(&c).unwrap() <= delta);
            assert_eq!(out.matrix.column_count(&c), count);
        }
    }

    #[test]
    fn known_witnesses_reach_the_frozen_counts() {
        let c = cache();
        // odd budgets admit the two-row family
        let f2 = family(FamilyKind::F2, 7).unwrap();
        assert_eq!(f2.column_count(&c), 10);
        assert!(f2.delta_endpoints(&c).unwrap() <= 7);
        let out = best_typed_matrix(&SearchConfig::new(7).unwrap(), &c, 1).unwrap();
        assert_eq!(out.count, 10);
        // a three-row witness found by the search at budget 8
        let w = TypedMatrix::new(vec![0, 3, 7], vec![5, 7, 8]).unwrap();
        assert_eq!(w.column_count(&c), 12);
        assert!(w.delta_endpoints(&c).unwrap() <= 8);
    }

    #[test]
    fn three_row_restriction_stays_under_the_closed_form() {
        let c = cache();
        for delta in 2u64..=12 {
            let cap = row_index_cap(delta).unwrap().min(3);
            let cfg = SearchConfig::new(delta).unwrap().with_m_max(cap).unwrap();
            let out = best_typed_matrix(&cfg, &c, 1).unwrap();
            assert!(
                out.count <= g_tilde(delta),
                "delta = {delta}: {} > {}",
                out.count,
                g_tilde(delta)
            );
        }
    }

    #[test]
    fn search_is_window_stable_and_symmetry_sound() {
        let c = cache();
        for delta in [5u64, 8] {
            let base = best_typed_matrix(&SearchConfig::new(delta).unwrap(), &c, 1).unwrap();
            let wide_cfg = SearchConfig::new(delta)
                .unwrap()
                .with_window(3 * delta as i64)
                .unwrap();
            let wide = best_typed_matrix(&wide_cfg, &c, 1).unwrap();
            assert_eq!(base.count, wide.count, "window stability at {delta}");
            let raw_cfg = SearchConfig::new(delta).unwrap().with_normalize(false);
            let raw = best_typed_matrix(&raw_cfg, &c, 1).unwrap();
            assert_eq!(base.count, raw.count, "translation symmetry at {delta}");
        }
    }

    #[test]
    fn partitioned_search_is_deterministic() {
        let c = cache();
        let cfg = SearchConfig::new(9).unwrap();
        let one = best_typed_matrix(&cfg, &c, 1).unwrap();
        let two = best_typed_matrix(&cfg, &c, 2).unwrap();
        let four = best_typed_matrix(&cfg, &c, 4).unwrap();
        assert_eq!(one.count, two.count);
        assert_eq!(one.nodes_explored, two.nodes_explored);
        assert_eq!(one.matrix.to_json(), two.matrix.to_json());
        assert_eq!(one.matrix.to_json(), four.matrix.to_json());
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(31).is_err());
        assert!(SearchConfig::new_unchecked(31).is_ok());
        assert!(SearchConfig::new(0).is_err());
        assert!(SearchConfig::new(8).unwrap().with_m_max(4).is_err());
        assert!(SearchConfig::new(8).unwrap().with_m_max(3).is_ok());
        assert!(SearchConfig::new(8).unwrap().with_window(0).is_err());
    }
}
