//! Exact linear programs over big rationals.
//!
//! Three related programs drive the column-count bounds:
//! * the packing program on x_1..x_m with pair constraints
//!   `x_k + x_l <= 2/(k*l)`, whose optimum is the per-type density bound;
//! * its covering dual on Y_{k,l} with row constraints
//!   `sum_l (Y_{k,l} + Y_{l,k}) >= phi(k)`;
//! * the restricted dual, whose variables are limited to a thin annulus
//!   support near `k^2 + l^2 = m^2`, which keeps the program small while
//!   still certifying an upper bound on the packing optimum.
//!
//! Any feasible dual vector is a self-contained certificate: weak duality
//! makes its objective an upper bound on the packing optimum, so callers
//! audit certificates with `check_dual_feasible` instead of trusting the
//! solver. Certificates exist in an explicit sparse form and in a
//! rectangle form whose entries are `scale * phi(k) * phi(l)` over a union
//! of index rectangles, stored symbolically so that huge certificates
//! never materialize.

mod simplex;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::parse_rational;
use crate::numtheory::ArithCache;
use simplex::{ColKind, SparseCol, StandardForm, StdOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
}

/// Variable names: `Single(k)` for the packing variables x_k,
/// `Pair(k, l)` for the covering variables Y_{k,l}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKey {
    Single(u32),
    Pair(u32, u32),
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub terms: Vec<(VarKey, BigRational)>,
    pub relation: Relation,
    pub rhs: BigRational,
}

#[derive(Clone, Debug)]
pub struct RationalLP {
    pub sense: Sense,
    pub objective: BTreeMap<VarKey, BigRational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; zero unless `status` is `Optimal`.
    pub value: BigRational,
    /// One value per variable appearing in the program; empty unless optimal.
    pub assignment: BTreeMap<VarKey, BigRational>,
    /// One multiplier per constraint, signed so that
    /// `sum_i duals[i] * rhs[i] == value` at the optimum; empty unless optimal.
    pub duals: Vec<BigRational>,
}

impl RationalLP {
    /// Solves exactly; optimal solutions are re-verified against the
    /// original constraints and objective before being returned.
    pub fn solve(&self) -> Result<LpSolution> {
        let mut universe: std::collections::BTreeSet<VarKey> =
            self.objective.keys().copied().collect();
        for c in &self.constraints {
            universe.extend(c.terms.iter().map(|(k, _)| *k));
        }
        let vars: Vec<VarKey> = universe.into_iter().collect();
        let index: BTreeMap<VarKey, usize> =
            vars.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let maximize = self.sense == Sense::Maximize;

        let num_rows = self.constraints.len();
        let mut cols: Vec<SparseCol> = (0..vars.len())
            .map(|_| SparseCol { entries: Vec::new() })
            .collect();
        let mut kinds: Vec<ColKind> = (0..vars.len()).map(ColKind::Structural).collect();
        let mut b = Vec::with_capacity(num_rows);
        let mut row_flip = Vec::with_capacity(num_rows);
        let mut surplus_rows = Vec::new();
        for (r, c) in self.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            let rel = match (c.relation, flip) {
                (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
                _ => Relation::Ge,
            };
            b.push(if flip { -c.rhs.clone() } else { c.rhs.clone() });
            row_flip.push(flip);
            let mut merged: BTreeMap<usize, BigRational> = BTreeMap::new();
            for (key, coef) in &c.terms {
                let j = index[key];
                let signed = if flip { -coef.clone() } else { coef.clone() };
                *merged.entry(j).or_insert_with(BigRational::zero) += signed;
            }
            for (j, coef) in merged {
                if !coef.is_zero() {
                    cols[j].entries.push((r, coef));
                }
            }
            match rel {
                Relation::Le => {
                    kinds.push(ColKind::Slack(r));
                    cols.push(SparseCol { entries: vec![(r, BigRational::one())] });
                }
                Relation::Ge => {
                    kinds.push(ColKind::Surplus(r));
                    cols.push(SparseCol { entries: vec![(r, -BigRational::one())] });
                    surplus_rows.push(r);
                }
            }
        }
        for r in surplus_rows {
            kinds.push(ColKind::Artificial(r));
            cols.push(SparseCol { entries: vec![(r, BigRational::one())] });
        }
        let mut costs = vec![BigRational::zero(); cols.len()];
        for (key, coef) in &self.objective {
            let j = index[key];
            costs[j] = if maximize { -coef.clone() } else { coef.clone() };
        }
        let sf = StandardForm { num_rows, cols, kinds, costs, b };

        match simplex::solve_standard(&sf)? {
            StdOutcome::Infeasible => Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: BigRational::zero(),
                assignment: BTreeMap::new(),
                duals: Vec::new(),
            }),
            StdOutcome::Unbounded => Ok(LpSolution {
                status: LpStatus::Unbounded,
                value: BigRational::zero(),
                assignment: BTreeMap::new(),
                duals: Vec::new(),
            }),
            StdOutcome::Optimal { value, x, y } => {
                let value = if maximize { -value } else { value };
                let assignment: BTreeMap<VarKey, BigRational> = vars
                    .iter()
                    .enumerate()
                    .map(|(i, k)| (*k, x[i].clone()))
                    .collect();
                let duals: Vec<BigRational> = y
                    .iter()
                    .zip(&row_flip)
                    .map(|(yi, flip)| {
                        let mut d = yi.clone();
                        if maximize {
                            d = -d;
                        }
                        if *flip {
                            d = -d;
                        }
                        d
                    })
                    .collect();
                self.verify_optimal(&assignment, &value, &duals)?;
                Ok(LpSolution { status: LpStatus::Optimal, value, assignment, duals })
            }
        }
    }

    /// Exact audit of a claimed optimum: primal feasibility, objective
    /// agreement, the dual pairing identity, and dual feasibility.
    fn verify_optimal(
        &self,
        assignment: &BTreeMap<VarKey, BigRational>,
        value: &BigRational,
        duals: &[BigRational],
    ) -> Result<()> {
        let fail = |what: &str| Err(Error::Internal(format!("optimum failed audit: {what}")));
        for c in &self.constraints {
            let lhs = c
                .terms
                .iter()
                .map(|(k, v)| v * &assignment[k])
                .fold(BigRational::zero(), |a, b| a + b);
            let ok = match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
            };
            if !ok {
                return fail("primal constraint violated");
            }
        }
        let obj = self
            .objective
            .iter()
            .map(|(k, v)| v * &assignment[k])
            .fold(BigRational::zero(), |a, b| a + b);
        if obj != *value {
            return fail("objective mismatch");
        }
        let paired = duals
            .iter()
            .zip(&self.constraints)
            .map(|(d, c)| d * &c.rhs)
            .fold(BigRational::zero(), |a, b| a + b);
        if paired != *value {
            return fail("dual pairing identity");
        }
        // dual feasibility: transpose(A) duals vs objective coefficients
        let mut col_sums: BTreeMap<VarKey, BigRational> = BTreeMap::new();
        for (d, c) in duals.iter().zip(&self.constraints) {
            for (k, v) in &c.terms {
                *col_sums.entry(*k).or_insert_with(BigRational::zero) += d * v;
            }
        }
        for key in assignment.keys() {
            let lhs = col_sums.remove(key).unwrap_or_else(BigRational::zero);
            let c = self.objective.get(key).cloned().unwrap_or_else(BigRational::zero);
            let ok = match self.sense {
                Sense::Maximize => lhs >= c,
                Sense::Minimize => lhs <= c,
            };
            if !ok {
                return fail("dual constraint violated");
            }
        }
        Ok(())
    }
}

/// 2/(k*l), the pair capacity.
fn pair_weight(k: u32, l: u32) -> BigRational {
    BigRational::new(BigInt::from(2u32), BigInt::from(u64::from(k) * u64::from(l)))
}

fn phi_rat(cache: &ArithCache, k: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(cache.phi(u64::from(k))))
}

fn require_m(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    Ok(())
}

/// Packing program: maximize sum phi(k) x_k subject to
/// x_k + x_l <= 2/(k*l) for 1 <= k <= l <= m and x >= 0.
/// The k = l constraints read 2 x_k <= 2/k^2.
pub fn build_primal(m: u32, cache: &ArithCache) -> Result<RationalLP> {
    require_m(m)?;
    let mut objective = BTreeMap::new();
    for k in 1..=m {
        objective.insert(VarKey::Single(k), phi_rat(cache, k));
    }
    let mut constraints = Vec::new();
    for k in 1..=m {
        for l in k..=m {
            let terms = if k == l {
                vec![(VarKey::Single(k), BigRational::from_integer(BigInt::from(2)))]
            } else {
                vec![
                    (VarKey::Single(k), BigRational::one()),
                    (VarKey::Single(l), BigRational::one()),
                ]
            };
            constraints.push(Constraint { terms, relation: Relation::Le, rhs: pair_weight(k, l) });
        }
    }
    Ok(RationalLP { sense: Sense::Maximize, objective, constraints })
}

/// Covering program over all ordered pairs: minimize sum 2/(k*l) Y_{k,l}
/// subject to sum_l (Y_{k,l} + Y_{l,k}) >= phi(k) for every k and Y >= 0.
pub fn build_dual(m: u32, cache: &ArithCache) -> Result<RationalLP> {
    require_m(m)?;
    let mut objective = BTreeMap::new();
    for k in 1..=m {
        for l in 1..=m {
            objective.insert(VarKey::Pair(k, l), pair_weight(k, l));
        }
    }
    let mut constraints = Vec::new();
    for k in 1..=m {
        let mut terms: BTreeMap<VarKey, BigRational> = BTreeMap::new();
        for l in 1..=m {
            *terms.entry(VarKey::Pair(k, l)).or_insert_with(BigRational::zero) +=
                BigRational::one();
            *terms.entry(VarKey::Pair(l, k)).or_insert_with(BigRational::zero) +=
                BigRational::one();
        }
        constraints.push(Constraint {
            terms: terms.into_iter().collect(),
            relation: Relation::Ge,
            rhs: phi_rat(cache, k),
        });
    }
    Ok(RationalLP { sense: Sense::Minimize, objective, constraints })
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    if !n.is_positive() {
        return BigInt::zero();
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        s
    } else {
        s + 1
    }
}

/// The thin annulus support S(m, eps): pairs (k, l) with 2k^2 < m^2,
/// 1 <= l <= m and (1 - eps) m^2 - k^2 <= l^2 <= (1 + eps) m^2 - k^2,
/// decided by exact integer comparisons. Sorted lexicographically.
pub fn approx_support(m: u32, eps: &BigRational) -> Result<Vec<(u32, u32)>> {
    require_m(m)?;
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let p = eps.numer().clone();
    let q = eps.denom().clone();
    let m_big = BigInt::from(m);
    let m_sq = &m_big * &m_big;
    let mut out = Vec::new();
    let mut k: u32 = 1;
    while u128::from(k) * u128::from(k) * 2 < u128::from(m) * u128::from(m) {
        let k_sq = BigInt::from(u64::from(k) * u64::from(k));
        let n_lo = (&q - &p) * &m_sq - &q * &k_sq;
        let n_hi = (&q + &p) * &m_sq - &q * &k_sq;
        // smallest l with q l^2 >= n_lo
        let l_lo = if n_lo.is_positive() {
            let c = num_integer::Integer::div_ceil(&n_lo, &q);
            ceil_sqrt(&c)
        } else {
            BigInt::one()
        };
        let l_lo = l_lo.max(BigInt::one());
        // largest l with q l^2 <= n_hi
        let f = num_integer::Integer::div_floor(&n_hi, &q);
        if !f.is_positive() {
            k += 1;
            continue;
        }
        let l_hi = f.sqrt().min(m_big.clone());
        let mut l = l_lo;
        while l <= l_hi {
            let l_u32 = u32::try_from(&l).expect("l <= m fits in u32");
            out.push((k, l_u32));
            l += 1;
        }
        k += 1;
    }
    Ok(out)
}

/// Rows k in [1, m] that no support pair touches on either side; such rows
/// make the restricted covering program infeasible.
pub fn uncovered_rows(m: u32, support: &[(u32, u32)]) -> Vec<u32> {
    let mut covered = vec![false; m as usize + 1];
    for &(k, l) in support {
        covered[k as usize] = true;
        covered[l as usize] = true;
    }
    (1..=m).filter(|&k| !covered[k as usize]).collect()
}

/// Covering program restricted to the support S(m, eps). Errors with the
/// uncovered row list when some row constraint cannot be satisfied.
pub fn build_approx_dual(m: u32, eps: &BigRational, cache: &ArithCache) -> Result<RationalLP> {
    let support = approx_support(m, eps)?;
    let missing = uncovered_rows(m, &support);
    if !missing.is_empty() {
        return Err(Error::EmptyDualRows { m, rows: missing });
    }
    let mut objective = BTreeMap::new();
    for &(k, l) in &support {
        objective.insert(VarKey::Pair(k, l), pair_weight(k, l));
    }
    let mut by_first: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut by_second: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(k, l) in &support {
        by_first.entry(k).or_default().push(l);
        by_second.entry(l).or_default().push(k);
    }
    let mut constraints = Vec::new();
    for k in 1..=m {
        let mut terms: BTreeMap<VarKey, BigRational> = BTreeMap::new();
        if let Some(ls) = by_first.get(&k) {
            for &l in ls {
                *terms.entry(VarKey::Pair(k, l)).or_insert_with(BigRational::zero) +=
                    BigRational::one();
            }
        }
        if let Some(ks) = by_second.get(&k) {
            for &kk in ks {
                *terms.entry(VarKey::Pair(kk, k)).or_insert_with(BigRational::zero) +=
                    BigRational::one();
            }
        }
        constraints.push(Constraint {
            terms: terms.into_iter().collect(),
            relation: Relation::Ge,
            rhs: phi_rat(cache, k),
        });
    }
    Ok(RationalLP { sense: Sense::Minimize, objective, constraints })
}

/// An axis-aligned index rectangle [k_lo, k_hi] x [l_lo, l_hi].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub k_lo: u32,
    pub k_hi: u32,
    pub l_lo: u32,
    pub l_hi: u32,
}

#[derive(Clone, Debug)]
pub enum CertificateForm {
    /// Sparse nonnegative entries Y_{k,l}, keyed by (k, l).
    Explicit(BTreeMap<(u32, u32), BigRational>),
    /// Y_{k,l} = scale * phi(k) * phi(l) summed over the rectangles that
    /// contain (k, l); kept symbolic so large certificates stay small.
    ScaledTotientRectangles { scale: BigRational, rects: Vec<Rect> },
}

/// A feasible point of the covering dual; by weak duality its objective
/// upper-bounds the packing optimum for the same m.
#[derive(Clone, Debug)]
pub struct DualCertificate {
    pub m: u32,
    pub form: CertificateForm,
    pub objective: BigRational,
}

impl DualCertificate {
    pub fn from_entries(m: u32, entries: BTreeMap<(u32, u32), BigRational>) -> Result<Self> {
        require_m(m)?;
        let mut objective = BigRational::zero();
        for (&(k, l), v) in &entries {
            if k == 0 || l == 0 || k > m || l > m {
                return Err(Error::InvalidArgument(format!(
                    "certificate entry ({k}, {l}) out of range for m = {m}"
                )));
            }
            if v.is_negative() {
                return Err(Error::InvalidArgument(format!(
                    "certificate entry ({k}, {l}) is negative"
                )));
            }
            objective += &pair_weight(k, l) * v;
        }
        Ok(DualCertificate { m, form: CertificateForm::Explicit(entries), objective })
    }

    pub fn from_rectangles(
        m: u32,
        scale: BigRational,
        rects: Vec<Rect>,
        cache: &ArithCache,
    ) -> Result<Self> {
        require_m(m)?;
        if scale.is_negative() {
            return Err(Error::InvalidArgument("certificate scale is negative".into()));
        }
        let mut objective = BigRational::zero();
        for r in &rects {
            if r.k_lo == 0 || r.l_lo == 0 || r.k_lo > r.k_hi || r.l_lo > r.l_hi
                || r.k_hi > m || r.l_hi > m
            {
                return Err(Error::InvalidArgument(format!(
                    "rectangle [{}, {}] x [{}, {}] out of range for m = {m}",
                    r.k_lo, r.k_hi, r.l_lo, r.l_hi
                )));
            }
            // sum over the rectangle of 2/(k*l) scale phi(k) phi(l)
            // factors into totient-ratio sums per axis
            let tk = ratio_sum_range(cache, r.k_lo, r.k_hi)?;
            let tl = ratio_sum_range(cache, r.l_lo, r.l_hi)?;
            objective += BigRational::from_integer(BigInt::from(2)) * &scale * tk * tl;
        }
        Ok(DualCertificate {
            m,
            form: CertificateForm::ScaledTotientRectangles { scale, rects },
            objective,
        })
    }

    /// Materializes the explicit entry map; additive over rectangles.
    /// Refuses absurdly large expansions.
    pub fn expand(&self, cache: &ArithCache) -> Result<BTreeMap<(u32, u32), BigRational>> {
        match &self.form {
            CertificateForm::Explicit(entries) => Ok(entries.clone()),
            CertificateForm::ScaledTotientRectangles { scale, rects } => {
                let cells: u64 = rects
                    .iter()
                    .map(|r| {
                        u64::from(r.k_hi - r.k_lo + 1) * u64::from(r.l_hi - r.l_lo + 1)
                    })
                    .sum();
                if cells > 2_000_000 {
                    return Err(Error::InvalidArgument(format!(
                        "refusing to expand a {cells}-cell certificate"
                    )));
                }
                let mut entries: BTreeMap<(u32, u32), BigRational> = BTreeMap::new();
                for r in rects {
                    for k in r.k_lo..=r.k_hi {
                        let pk = phi_rat(cache, k);
                        for l in r.l_lo..=r.l_hi {
                            let v = scale * &pk * phi_rat(cache, l);
                            *entries.entry((k, l)).or_insert_with(BigRational::zero) += v;
                        }
                    }
                }
                entries.retain(|_, v| !v.is_zero());
                Ok(entries)
            }
        }
    }

    /// Recomputes the objective from the stored form and compares.
    pub fn objective_consistent(&self, cache: &ArithCache) -> Result<bool> {
        let rebuilt = match &self.form {
            CertificateForm::Explicit(entries) => {
                Self::from_entries(self.m, entries.clone())?.objective
            }
            CertificateForm::ScaledTotientRectangles { scale, rects } => {
                Self::from_rectangles(self.m, scale.clone(), rects.clone(), cache)?.objective
            }
        };
        Ok(rebuilt == self.objective)
    }

    pub fn to_json(&self) -> String {
        let obj = match &self.form {
            CertificateForm::Explicit(entries) => {
                let rows: Vec<serde_json::Value> = entries
                    .iter()
                    .map(|(&(k, l), v)| {
                        serde_json::json!([k, l, rational_string(v)])
                    })
                    .collect();
                serde_json::json!({
                    "m": self.m,
                    "entries": rows,
                    "objective": rational_string(&self.objective),
                })
            }
            CertificateForm::ScaledTotientRectangles { scale, rects } => {
                let rows: Vec<serde_json::Value> = rects
                    .iter()
                    .map(|r| serde_json::json!([r.k_lo, r.k_hi, r.l_lo, r.l_hi]))
                    .collect();
                serde_json::json!({
                    "m": self.m,
                    "scaled_totient_rectangles": {
                        "scale": rational_string(scale),
                        "rects": rows,
                    },
                    "objective": rational_string(&self.objective),
                })
            }
        };
        serde_json::to_string(&obj).expect("certificate serializes")
    }

    pub fn from_json(s: &str, cache: &ArithCache) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("bad certificate JSON: {e}")))?;
        let m = v
            .get("m")
            .and_then(|x| x.as_u64())
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(|| Error::InvalidArgument("certificate JSON lacks m".into()))?;
        let objective = v
            .get("objective")
            .and_then(|x| x.as_str())
            .ok_or_else(|| Error::InvalidArgument("certificate JSON lacks objective".into()))?;
        let objective = parse_rational(objective)?;
        let cert = if let Some(entries) = v.get("entries") {
            let arr = entries
                .as_array()
                .ok_or_else(|| Error::InvalidArgument("entries must be an array".into()))?;
            let mut map = BTreeMap::new();
            for row in arr {
                let triple = row
                    .as_array()
                    .filter(|t| t.len() == 3)
                    .ok_or_else(|| Error::InvalidArgument("entry must be [k, l, value]".into()))?;
                let k = triple[0]
                    .as_u64()
                    .and_then(|x| u32::try_from(x).ok())
                    .ok_or_else(|| Error::InvalidArgument("bad entry index".into()))?;
                let l = triple[1]
                    .as_u64()
                    .and_then(|x| u32::try_from(x).ok())
                    .ok_or_else(|| Error::InvalidArgument("bad entry index".into()))?;
                let val = triple[2]
                    .as_str()
                    .ok_or_else(|| Error::InvalidArgument("entry value must be a string".into()))?;
                map.insert((k, l), parse_rational(val)?);
            }
            Self::from_entries(m, map)?
        } else if let Some(rect_form) = v.get("scaled_totient_rectangles") {
            let scale = rect_form
                .get("scale")
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::InvalidArgument("rectangle form lacks scale".into()))?;
            let scale = parse_rational(scale)?;
            let rows = rect_form
                .get("rects")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::InvalidArgument("rectangle form lacks rects".into()))?;
            let mut rects = Vec::with_capacity(rows.len());
            for row in rows {
                let quad = row
                    .as_array()
                    .filter(|t| t.len() == 4)
                    .ok_or_else(|| {
                        Error::InvalidArgument("rect must be [k_lo, k_hi, l_lo, l_hi]".into())
                    })?;
                let mut vals = [0u32; 4];
                for (i, cell) in quad.iter().enumerate() {
                    vals[i] = cell
                        .as_u64()
                        .and_then(|x| u32::try_from(x).ok())
                        .ok_or_else(|| Error::InvalidArgument("bad rect bound".into()))?;
                }
                rects.push(Rect { k_lo: vals[0], k_hi: vals[1], l_lo: vals[2], l_hi: vals[3] });
            }
            Self::from_rectangles(m, scale, rects, cache)?
        } else {
            return Err(Error::InvalidArgument(
                "certificate JSON has neither entries nor rectangles".into(),
            ));
        };
        if cert.objective != objective {
            return Err(Error::InvalidArgument(
                "certificate objective does not match its entries".into(),
            ));
        }
        Ok(cert)
    }
}

/// Canonical "p/q" rendering, denominator always present.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// sum over [lo, hi] of phi(k)/k.
fn ratio_sum_range(cache: &ArithCache, lo: u32, hi: u32) -> Result<BigRational> {
    let full = cache.sum_phi_over_k(u64::from(hi))?;
    if lo <= 1 {
        return Ok(full);
    }
    Ok(full - cache.sum_phi_over_k(u64::from(lo) - 1)?)
}

/// sum over [lo, hi] of phi(k), as a big integer.
fn phi_sum_range(cache: &ArithCache, lo: u32, hi: u32) -> Result<BigInt> {
    let full = cache.sum_phi(u64::from(hi))?;
    let head = if lo <= 1 { 0 } else { cache.sum_phi(u64::from(lo) - 1)? };
    Ok(BigInt::from(full) - BigInt::from(head))
}

/// Exact feasibility audit: does the certificate satisfy every row
/// constraint sum_l (Y_{k,l} + Y_{l,k}) >= phi(k) for k in [1, m]?
pub fn check_dual_feasible(cert: &DualCertificate, cache: &ArithCache) -> Result<bool> {
    let m = cert.m;
    match &cert.form {
        CertificateForm::Explicit(entries) => {
            let mut row_sums = vec![BigRational::zero(); m as usize + 1];
            for (&(k, l), v) in entries {
                if v.is_negative() {
                    return Ok(false);
                }
                row_sums[k as usize] += v;
                row_sums[l as usize] += v;
            }
            for k in 1..=m {
                if row_sums[k as usize] < phi_rat(cache, k) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        CertificateForm::ScaledTotientRectangles { scale, rects } => {
            if scale.is_negative() {
                return Ok(false);
            }
            // row k receives scale * phi(k) * W_k with W_k summing phi over
            // the l-span of rectangles whose k-span contains k plus the
            // k-span of rectangles whose l-span contains k; since phi(k) > 0
            // the row constraint reduces to scale * W_k >= 1
            let spans: Vec<(BigInt, BigInt)> = rects
                .iter()
                .map(|r| {
                    Ok((
                        phi_sum_range(cache, r.l_lo, r.l_hi)?,
                        phi_sum_range(cache, r.k_lo, r.k_hi)?,
                    ))
                })
                .collect::<Result<_>>()?;
            for k in 1..=m {
                let mut w = BigInt::zero();
                for (r, (l_span_phi, k_span_phi)) in rects.iter().zip(&spans) {
                    if r.k_lo <= k && k <= r.k_hi {
                        w += l_span_phi;
                    }
                    if r.l_lo <= k && k <= r.l_hi {
                        w += k_span_phi;
                    }
                }
                if scale * BigRational::from_integer(w) < BigRational::one() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Result of solving the packing program restricted to support pairs:
/// optimum, primal point, and an independently audited dual certificate
/// whose objective equals the optimum.
#[derive(Clone, Debug)]
pub struct RestrictedSolve {
    pub value: BigRational,
    pub x: BTreeMap<u32, BigRational>,
    pub certificate: DualCertificate,
}

/// Solves max sum phi(k) x_k over the pair constraints indexed by
/// S(m, eps) only. Its optimum equals the restricted covering optimum, and
/// the returned certificate is verified feasible here, so the value is a
/// sound upper bound on the full packing optimum regardless of solver
/// internals.
pub fn solve_restricted(m: u32, eps: &BigRational, cache: &ArithCache) -> Result<RestrictedSolve> {
    let support = approx_support(m, eps)?;
    let missing = uncovered_rows(m, &support);
    if !missing.is_empty() {
        return Err(Error::EmptyDualRows { m, rows: missing });
    }
    let num_rows = support.len();
    let mut cols: Vec<SparseCol> = (0..m as usize)
        .map(|_| SparseCol { entries: Vec::new() })
        .collect();
    for (r, &(k, l)) in support.iter().enumerate() {
        if k == l {
            cols[k as usize - 1]
                .entries
                .push((r, BigRational::from_integer(BigInt::from(2))));
        } else {
            cols[k as usize - 1].entries.push((r, BigRational::one()));
            cols[l as usize - 1].entries.push((r, BigRational::one()));
        }
    }
    let mut kinds: Vec<ColKind> = (0..m as usize).map(ColKind::Structural).collect();
    let mut costs: Vec<BigRational> = (1..=m).map(|k| -phi_rat(cache, k)).collect();
    let mut b = Vec::with_capacity(num_rows);
    for (r, &(k, l)) in support.iter().enumerate() {
        kinds.push(ColKind::Slack(r));
        cols.push(SparseCol { entries: vec![(r, BigRational::one())] });
        costs.push(BigRational::zero());
        b.push(pair_weight(k, l));
    }
    let sf = StandardForm { num_rows, cols, kinds, costs, b };
    let (value, x, y) = match simplex::solve_standard(&sf)? {
        StdOutcome::Optimal { value, x, y } => (-value, x, y),
        _ => {
            return Err(Error::Internal(
                "restricted packing program must have an optimum".into(),
            ))
        }
    };
    let x_map: BTreeMap<u32, BigRational> =
        (1..=m).map(|k| (k, x[k as usize - 1].clone())).collect();
    let mut entries: BTreeMap<(u32, u32), BigRational> = BTreeMap::new();
    for (r, &(k, l)) in support.iter().enumerate() {
        let d = -y[r].clone();
        if d.is_negative() {
            return Err(Error::Internal("negative multiplier at restricted optimum".into()));
        }
        if !d.is_zero() {
            entries.insert((k, l), d);
        }
    }
    let certificate = DualCertificate::from_entries(m, entries)?;
    if certificate.objective != value {
        return Err(Error::Internal("certificate objective differs from optimum".into()));
    }
    if !check_dual_feasible(&certificate, cache)? {
        return Err(Error::Internal("restricted dual certificate failed audit".into()));
    }
    // audit the primal side as well
    let mut primal = BigRational::zero();
    for (&k, xv) in &x_map {
        if xv.is_negative() {
            return Err(Error::Internal("negative primal value".into()));
        }
        primal += phi_rat(cache, k) * xv;
    }
    if primal != value {
        return Err(Error::Internal("primal objective differs from optimum".into()));
    }
    for &(k, l) in &support {
        let lhs = if k == l {
            BigRational::from_integer(BigInt::from(2)) * &x_map[&k]
        } else {
            &x_map[&k] + &x_map[&l]
        };
        if lhs > pair_weight(k, l) {
            return Err(Error::Internal("restricted pair constraint violated".into()));
        }
    }
    Ok(RestrictedSolve { value, x: x_map, certificate })
}
