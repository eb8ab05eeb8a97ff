//! Exact two-phase revised simplex over big rationals.
//!
//! The basis is refactorized from scratch every iteration by sparse LU
//! with greedy pivot selection (singleton columns and rows peel off with
//! no arithmetic, which covers almost every step for the edge-structured
//! bases this crate produces). Pricing is most-negative-reduced-cost with
//! an automatic switch to Bland's rule while a run of degenerate pivots
//! lasts, so termination is guaranteed in exact arithmetic while staying
//! fast in the common case.
//!
//! Large artificial-free programs first run the same pivot loop in f64 to
//! locate a candidate optimal basis cheaply; the exact loop then starts
//! from that basis, so it usually only has to verify optimality. Every
//! number that leaves this module comes from the exact loop, and a failed
//! warm start falls back to the pure exact path.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A column of the standard-form constraint matrix, sorted by row.
#[derive(Clone, Debug)]
pub(crate) struct SparseCol {
    pub entries: Vec<(usize, BigRational)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ColKind {
    /// Index into the caller's variable universe.
    Structural(usize),
    Slack(usize),
    Surplus(usize),
    Artificial(usize),
}

impl ColKind {
    fn is_artificial(self) -> bool {
        matches!(self, ColKind::Artificial(_))
    }
}

/// Minimization problem `min c.x  s.t.  A x = b, x >= 0` with `b >= 0`.
pub(crate) struct StandardForm {
    pub num_rows: usize,
    pub cols: Vec<SparseCol>,
    pub kinds: Vec<ColKind>,
    pub costs: Vec<BigRational>,
    pub b: Vec<BigRational>,
}

pub(crate) enum StdOutcome {
    Optimal {
        /// Objective of the minimization.
        value: BigRational,
        /// Values of all standard-form columns.
        x: Vec<BigRational>,
        /// Row multipliers y with y.B = c_B at the final basis.
        y: Vec<BigRational>,
    },
    Infeasible,
    Unbounded,
}

/// LU factors of a basis, as the recorded row operations plus the pivot
/// rows that remain; enough to solve in both directions exactly.
struct Lu {
    /// (pivot_row, pivot_slot, pivot_value) in elimination order.
    pivots: Vec<(usize, usize, BigRational)>,
    /// (target_row, pivot_row, multiplier) in application order.
    ops: Vec<(usize, usize, BigRational)>,
    /// Snapshot of each pivot row at its elimination time, sorted by slot;
    /// includes the pivot entry itself.
    u_rows: Vec<Vec<(usize, BigRational)>>,
}

impl Lu {
    /// Factorizes the matrix whose column in slot `s` is `cols[basis[s]]`.
    fn factorize(sf: &StandardForm, basis: &[usize]) -> Result<Lu> {
        let m = sf.num_rows;
        debug_assert_eq!(basis.len(), m);
        let mut rows: Vec<std::collections::BTreeMap<usize, BigRational>> =
            vec![std::collections::BTreeMap::new(); m];
        let mut slot_rows: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (slot, &col) in basis.iter().enumerate() {
            for (row, v) in &sf.cols[col].entries {
                rows[*row].insert(slot, v.clone());
                slot_rows[slot].push(*row);
            }
        }
        let mut row_active = vec![true; m];
        let mut slot_active = vec![true; m];
        let mut pivots = Vec::with_capacity(m);
        let mut ops = Vec::new();
        let mut u_rows = Vec::with_capacity(m);
        for _ in 0..m {
            let (pr, ps) = pick_pivot(&rows, &slot_rows, &row_active, &slot_active)?;
            let pivot_val = rows[pr].get(&ps).cloned().ok_or_else(|| {
                Error::Internal("pivot entry vanished during factorization".into())
            })?;
            // eliminate the pivot slot from every other active row
            let targets: Vec<usize> = slot_rows[ps]
                .iter()
                .copied()
                .filter(|&r| r != pr && row_active[r] && rows[r].contains_key(&ps))
                .collect();
            for r in targets {
                let mu = rows[r].remove(&ps).expect("target has the entry") / &pivot_val;
                // rows[r] -= mu * rows[pr] over the remaining entries
                let pivot_row_entries: Vec<(usize, BigRational)> = rows[pr]
                    .iter()
                    .filter(|(s, _)| **s != ps)
                    .map(|(s, v)| (*s, v.clone()))
                    .collect();
                for (s, v) in pivot_row_entries {
                    let delta = &mu * &v;
                    let slot_entry = rows[r].entry(s);
                    match slot_entry {
                        std::collections::btree_map::Entry::Occupied(mut e) => {
                            let nv = e.get() - &delta;
                            if nv.is_zero() {
                                e.remove();
                            } else {
                                *e.get_mut() = nv;
                            }
                        }
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(-delta);
                            slot_rows[s].push(r);
                        }
                    }
                }
                if !mu.is_zero() {
                    ops.push((r, pr, mu));
                }
            }
            row_active[pr] = false;
            slot_active[ps] = false;
            let snapshot: Vec<(usize, BigRational)> =
                rows[pr].iter().map(|(s, v)| (*s, v.clone())).collect();
            u_rows.push(snapshot);
            pivots.push((pr, ps, pivot_val));
        }
        Ok(Lu { pivots, ops, u_rows })
    }

    /// Solves `B z = rhs`; the result is indexed by basis slot.
    fn ftran(&self, rhs: &[BigRational]) -> Vec<BigRational> {
        let m = rhs.len();
        let mut work = rhs.to_vec();
        for (r, pr, mu) in &self.ops {
            if !work[*pr].is_zero() {
                let delta = mu * &work[*pr];
                work[*r] -= delta;
            }
        }
        let mut z = vec![BigRational::zero(); m];
        for t in (0..m).rev() {
            let (pr, ps, ref pv) = self.pivots[t];
            let mut acc = std::mem::take(&mut work[pr]);
            for (s, v) in &self.u_rows[t] {
                if *s != ps && !z[*s].is_zero() {
                    acc -= v * &z[*s];
                }
            }
            if !acc.is_zero() {
                z[ps] = acc / pv;
            }
        }
        z
    }

    /// Solves `y B = c_B`; the result is indexed by row.
    fn btran(&self, c_basic_by_slot: &[BigRational]) -> Vec<BigRational> {
        let m = c_basic_by_slot.len();
        let mut work = c_basic_by_slot.to_vec();
        let mut y = vec![BigRational::zero(); m];
        for t in 0..m {
            let (pr, ps, ref pv) = self.pivots[t];
            let w = std::mem::take(&mut work[ps]);
            if w.is_zero() {
                continue;
            }
            let w = w / pv;
            for (s, v) in &self.u_rows[t] {
                if *s != ps {
                    let delta = &w * v;
                    work[*s] -= delta;
                }
            }
            y[pr] = w;
        }
        for (r, pr, mu) in self.ops.iter().rev() {
            if !y[*r].is_zero() {
                let delta = mu * &y[*r];
                y[*pr] -= delta;
            }
        }
        y
    }
}

/// Greedy sparse pivot choice: singleton slots first, then singleton rows,
/// then the minimum-count slot/row pair; deterministic tie-breaks.
fn pick_pivot(
    rows: &[std::collections::BTreeMap<usize, BigRational>],
    slot_rows: &[Vec<usize>],
    row_active: &[bool],
    slot_active: &[bool],
) -> Result<(usize, usize)> {
    let m = rows.len();
    let slot_count = |s: usize| -> usize {
        slot_rows[s]
            .iter()
            .filter(|&&r| row_active[r] && rows[r].contains_key(&s))
            .count()
    };
    let mut best: Option<(usize, usize, usize)> = None; // (score, slot, row)
    for s in 0..m {
        if !slot_active[s] {
            continue;
        }
        let mut cnt = 0usize;
        let mut first_row = usize::MAX;
        let mut best_row = usize::MAX;
        let mut best_row_len = usize::MAX;
        for &r in &slot_rows[s] {
            if row_active[r] && rows[r].contains_key(&s) {
                cnt += 1;
                if r < first_row {
                    first_row = r;
                }
                let len = rows[r].len();
                if len < best_row_len || (len == best_row_len && r < best_row) {
                    best_row_len = len;
                    best_row = r;
                }
            }
        }
        if cnt == 0 {
            continue;
        }
        if cnt == 1 {
            // singleton slot: elimination-free
            return Ok((first_row, s));
        }
        let score = (cnt - 1) * (best_row_len.saturating_sub(1));
        match best {
            Some((bs, _, _)) if bs <= score => {}
            _ => best = Some((score, s, best_row)),
        }
    }
    let _ = slot_count;
    match best {
        Some((_, s, r)) => Ok((r, s)),
        None => Err(Error::Internal("singular basis in factorization".into())),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pricing {
    Dantzig,
    Bland,
}

/// How many consecutive degenerate pivots trigger Bland's rule.
const STALL_LIMIT: u32 = 24;

pub(crate) fn solve_standard(sf: &StandardForm) -> Result<StdOutcome> {
    let m = sf.num_rows;
    let n = sf.cols.len();
    for bv in &sf.b {
        debug_assert!(!bv.is_negative(), "standard form needs b >= 0");
    }
    // initial basis: slack where available, artificial otherwise
    let mut basis_of_row: Vec<Option<usize>> = vec![None; m];
    for (j, kind) in sf.kinds.iter().enumerate() {
        match kind {
            ColKind::Slack(r) | ColKind::Artificial(r) => {
                if basis_of_row[*r].is_none() || matches!(kind, ColKind::Slack(_)) {
                    basis_of_row[*r] = Some(j);
                }
            }
            _ => {}
        }
    }
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for (r, slot) in basis_of_row.iter().enumerate() {
        match slot {
            Some(j) => basis.push(*j),
            None => {
                return Err(Error::Internal(format!(
                    "row {r} has neither slack nor artificial start"
                )))
            }
        }
    }
    let mut in_basis = vec![false; n];
    for &j in &basis {
        in_basis[j] = true;
    }

    let has_artificials = sf.kinds.iter().any(|k| k.is_artificial());
    if !has_artificials && m >= 200 {
        if let Some(warm) = warm_start_f64(sf, &basis) {
            // accept the candidate only if it is exactly nonsingular and
            // primal feasible; otherwise the slack start stands
            if let Ok(lu) = Lu::factorize(sf, &warm) {
                let xb = lu.ftran(&sf.b);
                if xb.iter().all(|v| !v.is_negative()) {
                    for f in in_basis.iter_mut() {
                        *f = false;
                    }
                    for &j in &warm {
                        in_basis[j] = true;
                    }
                    basis = warm;
                }
            }
        }
    }
    if has_artificials {
        let phase1_costs: Vec<BigRational> = sf
            .kinds
            .iter()
            .map(|k| if k.is_artificial() { BigRational::one() } else { BigRational::zero() })
            .collect();
        let outcome = run_phase(sf, &phase1_costs, &mut basis, &mut in_basis, true)?;
        match outcome {
            PhaseEnd::Optimal(value) => {
                if value.is_positive() {
                    return Ok(StdOutcome::Infeasible);
                }
            }
            PhaseEnd::Unbounded => {
                return Err(Error::Internal("phase one cannot be unbounded".into()))
            }
        }
        purge_artificials(sf, &mut basis, &mut in_basis)?;
    }

    match run_phase(sf, &sf.costs, &mut basis, &mut in_basis, false)? {
        PhaseEnd::Unbounded => Ok(StdOutcome::Unbounded),
        PhaseEnd::Optimal(value) => {
            let lu = Lu::factorize(sf, &basis)?;
            let xb = lu.ftran(&sf.b);
            let mut x = vec![BigRational::zero(); n];
            for (slot, &j) in basis.iter().enumerate() {
                x[j] = xb[slot].clone();
            }
            let c_basic: Vec<BigRational> =
                basis.iter().map(|&j| sf.costs[j].clone()).collect();
            let y = lu.btran(&c_basic);
            Ok(StdOutcome::Optimal { value, x, y })
        }
    }
}

enum PhaseEnd {
    Optimal(BigRational),
    Unbounded,
}

fn run_phase(
    sf: &StandardForm,
    costs: &[BigRational],
    basis: &mut Vec<usize>,
    in_basis: &mut [bool],
    phase_one: bool,
) -> Result<PhaseEnd> {
    let m = sf.num_rows;
    let n = sf.cols.len();
    let mut pricing = Pricing::Dantzig;
    let mut stall: u32 = 0;
    let trace = std::env::var_os("COLNUM_LP_TRACE").is_some();
    let mut t_factor = std::time::Duration::ZERO;
    let mut t_solves = std::time::Duration::ZERO;
    let mut t_price = std::time::Duration::ZERO;
    let mut max_bits: u64 = 0;
    let t_start = std::time::Instant::now();
    // generous safety net; Bland's rule prevents cycling, so hitting this
    // indicates a bug rather than a hard instance
    let max_iters = 200usize * (m + n) + 20_000;
    for iter in 0..max_iters {
        let t0 = std::time::Instant::now();
        let lu = Lu::factorize(sf, basis)?;
        t_factor += t0.elapsed();
        let t0 = std::time::Instant::now();
        let xb = lu.ftran(&sf.b);
        let c_basic: Vec<BigRational> = basis.iter().map(|&j| costs[j].clone()).collect();
        let y = lu.btran(&c_basic);
        t_solves += t0.elapsed();
        if trace {
            for v in &y {
                let bits = v.numer().bits() + v.denom().bits();
                max_bits = max_bits.max(bits);
            }
            if iter % 200 == 0 {
                eprintln!(
                    "iter {iter}: {:.1}s total, factor {:.1}s, solves {:.1}s, price {:.1}s, max y bits {max_bits}",
                    t_start.elapsed().as_secs_f64(),
                    t_factor.as_secs_f64(),
                    t_solves.as_secs_f64(),
                    t_price.as_secs_f64()
                );
            }
        }
        let t0 = std::time::Instant::now();

        // price nonbasic columns; artificials may not re-enter in phase two
        let mut entering: Option<(usize, BigRational)> = None;
        for j in 0..n {
            if in_basis[j] || (!phase_one && sf.kinds[j].is_artificial()) {
                continue;
            }
            let mut rc = costs[j].clone();
            for (r, v) in &sf.cols[j].entries {
                if !y[*r].is_zero() {
                    rc -= &y[*r] * v;
                }
            }
            if !rc.is_negative() {
                continue;
            }
            match pricing {
                Pricing::Bland => {
                    entering = Some((j, rc));
                    break;
                }
                Pricing::Dantzig => match &entering {
                    Some((_, best)) if rc >= *best => {}
                    _ => entering = Some((j, rc)),
                },
            }
        }
        t_price += t0.elapsed();
        let Some((q, _)) = entering else {
            if trace {
                eprintln!(
                    "done at iter {iter}: {:.1}s total, factor {:.1}s, solves {:.1}s, price {:.1}s, max y bits {max_bits}",
                    t_start.elapsed().as_secs_f64(),
                    t_factor.as_secs_f64(),
                    t_solves.as_secs_f64(),
                    t_price.as_secs_f64()
                );
            }
            let value = c_basic
                .iter()
                .zip(&xb)
                .map(|(c, x)| c * x)
                .fold(BigRational::zero(), |a, b| a + b);
            return Ok(PhaseEnd::Optimal(value));
        };

        let d = lu.ftran(
            &{
                let mut col = vec![BigRational::zero(); m];
                for (r, v) in &sf.cols[q].entries {
                    col[*r] = v.clone();
                }
                col
            },
        );

        // ratio test; basic artificials are pinned at zero, so a negative
        // direction component there also blocks at zero
        let mut theta: Option<BigRational> = None;
        let mut leaving: Option<usize> = None;
        for slot in 0..m {
            let blocked = if d[slot].is_positive() {
                Some(&xb[slot] / &d[slot])
            } else if d[slot].is_negative()
                && sf.kinds[basis[slot]].is_artificial()
                && xb[slot].is_zero()
            {
                Some(BigRational::zero())
            } else {
                None
            };
            let Some(t) = blocked else { continue };
            let replace = match &theta {
                None => true,
                Some(best) => {
                    t < *best
                        || (t == *best
                            && better_leaving(sf, basis, slot, leaving.expect("set with theta")))
                }
            };
            if replace {
                theta = Some(t);
                leaving = Some(slot);
            }
        }
        let Some(theta) = theta else {
            return Ok(PhaseEnd::Unbounded);
        };
        let slot = leaving.expect("leaving set with theta");

        if theta.is_zero() {
            stall += 1;
            if stall >= STALL_LIMIT {
                pricing = Pricing::Bland;
            }
        } else {
            stall = 0;
            pricing = Pricing::Dantzig;
        }

        in_basis[basis[slot]] = false;
        in_basis[q] = true;
        basis[slot] = q;
    }
    Err(Error::Internal("simplex exceeded its iteration budget".into()))
}

/// Prefers kicking artificials out of the basis, then lower column index.
fn better_leaving(sf: &StandardForm, basis: &[usize], cand: usize, cur: usize) -> bool {
    let ca = sf.kinds[basis[cand]].is_artificial();
    let ua = sf.kinds[basis[cur]].is_artificial();
    if ca != ua {
        return ca;
    }
    basis[cand] < basis[cur]
}

/// After phase one, swaps basic zero-level artificials for usable structural
/// columns where possible; redundant rows keep their artificial pinned at 0.
fn purge_artificials(sf: &StandardForm, basis: &mut [usize], in_basis: &mut [bool]) -> Result<()> {
    let m = sf.num_rows;
    for slot in 0..m {
        if !sf.kinds[basis[slot]].is_artificial() {
            continue;
        }
        let lu = Lu::factorize(sf, basis)?;
        let mut unit = vec![BigRational::zero(); m];
        unit[slot] = BigRational::one();
        // row `slot` of B^-1 A is v.A_j with v = e_slot B^-1... but btran
        // expects slot-indexed input and returns row-indexed output, which
        // is exactly v here
        let v = lu.btran(&unit);
        let mut replacement = None;
        for j in 0..sf.cols.len() {
            if in_basis[j] || sf.kinds[j].is_artificial() {
                continue;
            }
            let mut pivot = BigRational::zero();
            for (r, val) in &sf.cols[j].entries {
                if !v[*r].is_zero() {
                    pivot += &v[*r] * val;
                }
            }
            if !pivot.is_zero() {
                replacement = Some(j);
                break;
            }
        }
        if let Some(j) = replacement {
            in_basis[basis[slot]] = false;
            in_basis[j] = true;
            basis[slot] = j;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// f64 warm start: the same pivot loop in hardware floats, used only to
// propose a starting basis for the exact loop. Nothing computed here is
// ever returned to a caller.
// ---------------------------------------------------------------------------

const F64_RC_TOL: f64 = 1e-9;
const F64_PIVOT_TOL: f64 = 1e-11;
const F64_DROP_TOL: f64 = 1e-14;

struct F64Lu {
    pivots: Vec<(usize, usize, f64)>,
    ops: Vec<(usize, usize, f64)>,
    u_rows: Vec<Vec<(usize, f64)>>,
}

impl F64Lu {
    fn factorize(m: usize, cols: &[Vec<(usize, f64)>], basis: &[usize]) -> Option<F64Lu> {
        // rows hold (slot, value) sorted by slot; counts drive the greedy
        // singleton-first pivot order
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut slot_rows: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut col_count = vec![0usize; m];
        for (slot, &col) in basis.iter().enumerate() {
            for &(row, v) in &cols[col] {
                rows[row].push((slot, v));
                slot_rows[slot].push(row);
                col_count[slot] += 1;
            }
        }
        for row in rows.iter_mut() {
            row.sort_unstable_by_key(|e| e.0);
        }
        let mut row_active = vec![true; m];
        let mut slot_active = vec![true; m];
        let mut singles: std::collections::VecDeque<usize> =
            (0..m).filter(|&s| col_count[s] == 1).collect();
        let mut pivots = Vec::with_capacity(m);
        let mut ops = Vec::new();
        let mut u_rows = Vec::with_capacity(m);
        for _ in 0..m {
            // choose a pivot slot: queued singleton if still valid, else the
            // active slot with the fewest rows
            let mut ps = None;
            while let Some(s) = singles.pop_front() {
                if slot_active[s] && col_count[s] == 1 {
                    ps = Some(s);
                    break;
                }
            }
            let ps = match ps {
                Some(s) => s,
                None => {
                    let mut best: Option<(usize, usize)> = None;
                    for s in 0..m {
                        if slot_active[s] && col_count[s] > 0 {
                            match best {
                                Some((c, _)) if c <= col_count[s] => {}
                                _ => best = Some((col_count[s], s)),
                            }
                        }
                    }
                    best?.1
                }
            };
            // pick its shortest valid row
            let mut pr = None;
            let mut pr_len = usize::MAX;
            for &r in &slot_rows[ps] {
                if row_active[r] && rows[r].binary_search_by_key(&ps, |e| e.0).is_ok() {
                    let len = rows[r].len();
                    if len < pr_len {
                        pr_len = len;
                        pr = Some(r);
                    }
                }
            }
            let pr = pr?;
            let pv = rows[pr][rows[pr].binary_search_by_key(&ps, |e| e.0).ok()?].1;
            if pv.abs() < F64_PIVOT_TOL {
                return None;
            }
            let pivot_row = std::mem::take(&mut rows[pr]);
            let targets: Vec<usize> = slot_rows[ps]
                .iter()
                .copied()
                .filter(|&r| {
                    r != pr && row_active[r] && rows[r].binary_search_by_key(&ps, |e| e.0).is_ok()
                })
                .collect();
            for r in targets {
                let target = std::mem::take(&mut rows[r]);
                let tp = target[target.binary_search_by_key(&ps, |e| e.0).expect("has ps")].1;
                let mu = tp / pv;
                // merged = target - mu * pivot_row, skipping slot ps
                let mut merged = Vec::with_capacity(target.len() + pivot_row.len());
                let mut ti = 0;
                let mut pi = 0;
                while ti < target.len() || pi < pivot_row.len() {
                    let ts = target.get(ti).map(|e| e.0).unwrap_or(usize::MAX);
                    let pss = pivot_row.get(pi).map(|e| e.0).unwrap_or(usize::MAX);
                    if ts < pss {
                        if ts != ps {
                            merged.push(target[ti]);
                        } else {
                            col_count[ps] -= 1;
                        }
                        ti += 1;
                    } else if pss < ts {
                        let v = -mu * pivot_row[pi].1;
                        if pss != ps && v.abs() > F64_DROP_TOL {
                            merged.push((pss, v));
                            col_count[pss] += 1;
                            slot_rows[pss].push(r);
                        }
                        pi += 1;
                    } else {
                        if ts != ps {
                            let v = target[ti].1 - mu * pivot_row[pi].1;
                            if v.abs() > F64_DROP_TOL {
                                merged.push((ts, v));
                            } else {
                                col_count[ts] -= 1;
                                if col_count[ts] == 1 {
                                    singles.push_back(ts);
                                }
                            }
                        } else {
                            col_count[ps] -= 1;
                        }
                        ti += 1;
                        pi += 1;
                    }
                }
                rows[r] = merged;
                if mu != 0.0 {
                    ops.push((r, pr, mu));
                }
            }
            row_active[pr] = false;
            slot_active[ps] = false;
            for &(s, _) in &pivot_row {
                if s != ps {
                    col_count[s] -= 1;
                    if col_count[s] == 1 {
                        singles.push_back(s);
                    }
                }
            }
            col_count[ps] = 0;
            u_rows.push(pivot_row);
            pivots.push((pr, ps, pv));
        }
        Some(F64Lu { pivots, ops, u_rows })
    }

    fn ftran(&self, rhs: &[f64]) -> Vec<f64> {
        let m = rhs.len();
        let mut work = rhs.to_vec();
        for &(r, pr, mu) in &self.ops {
            work[r] -= mu * work[pr];
        }
        let mut z = vec![0.0; m];
        for t in (0..m).rev() {
            let (pr, ps, pv) = self.pivots[t];
            let mut acc = work[pr];
            for &(s, v) in &self.u_rows[t] {
                if s != ps {
                    acc -= v * z[s];
                }
            }
            z[ps] = acc / pv;
        }
        z
    }

    fn btran(&self, c_by_slot: &[f64]) -> Vec<f64> {
        let m = c_by_slot.len();
        let mut work = c_by_slot.to_vec();
        let mut y = vec![0.0; m];
        for t in 0..m {
            let (pr, ps, pv) = self.pivots[t];
            let w = work[ps] / pv;
            if w != 0.0 {
                for &(s, v) in &self.u_rows[t] {
                    if s != ps {
                        work[s] -= w * v;
                    }
                }
            }
            y[pr] = w;
        }
        for &(r, pr, mu) in self.ops.iter().rev() {
            y[pr] -= mu * y[r];
        }
        y
    }
}

/// Runs the pivot loop in f64 from the given start basis and returns the
/// basis it stops at; `None` means the caller should not bother.
fn warm_start_f64(sf: &StandardForm, start: &[usize]) -> Option<Vec<usize>> {
    use num_traits::ToPrimitive;
    let m = sf.num_rows;
    let n = sf.cols.len();
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for col in &sf.cols {
        let mut c = Vec::with_capacity(col.entries.len());
        for (r, v) in &col.entries {
            c.push((*r, v.to_f64()?));
        }
        cols.push(c);
    }
    let costs: Vec<f64> = sf.costs.iter().map(|v| v.to_f64()).collect::<Option<_>>()?;
    let b: Vec<f64> = sf.b.iter().map(|v| v.to_f64()).collect::<Option<_>>()?;
    let mut basis = start.to_vec();
    let mut in_basis = vec![false; n];
    for &j in &basis {
        in_basis[j] = true;
    }
    let mut pricing = Pricing::Dantzig;
    let mut stall: u32 = 0;
    let max_iters = 60usize * (m + n) + 10_000;
    for _ in 0..max_iters {
        let Some(lu) = F64Lu::factorize(m, &cols, &basis) else {
            return Some(basis);
        };
        let xb = lu.ftran(&b);
        let c_basic: Vec<f64> = basis.iter().map(|&j| costs[j]).collect();
        let y = lu.btran(&c_basic);
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..n {
            if in_basis[j] {
                continue;
            }
            let mut rc = costs[j];
            for &(r, v) in &cols[j] {
                rc -= y[r] * v;
            }
            if rc >= -F64_RC_TOL {
                continue;
            }
            match pricing {
                Pricing::Bland => {
                    entering = Some((j, rc));
                    break;
                }
                Pricing::Dantzig => match entering {
                    Some((_, best)) if rc >= best => {}
                    _ => entering = Some((j, rc)),
                },
            }
        }
        let Some((q, _)) = entering else {
            return Some(basis);
        };
        let d = lu.ftran(&{
            let mut col = vec![0.0; m];
            for &(r, v) in &cols[q] {
                col[r] = v;
            }
            col
        });
        let mut theta = f64::INFINITY;
        let mut leaving: Option<usize> = None;
        for slot in 0..m {
            if d[slot] > F64_PIVOT_TOL {
                let t = xb[slot].max(0.0) / d[slot];
                if t < theta || (t <= theta && leaving.map_or(true, |l| basis[slot] < basis[l])) {
                    theta = t;
                    leaving = Some(slot);
                }
            }
        }
        let Some(slot) = leaving else {
            // looks unbounded; hand the current basis to the exact loop
            return Some(basis);
        };
        if theta < 1e-12 {
            stall += 1;
            if stall >= STALL_LIMIT {
                pricing = Pricing::Bland;
            }
        } else {
            stall = 0;
            pricing = Pricing::Dantzig;
        }
        in_basis[basis[slot]] = false;
        in_basis[q] = true;
        basis[slot] = q;
    }
    Some(basis)
}
