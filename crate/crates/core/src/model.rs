//! Two-row column systems: typed matrices, their column sets, exact minor
//! statistics, the three extremal families, and the closed-form target count.
//!
//! A typed matrix of type m is described by integer endpoint vectors a, b of
//! length m. Row k contributes the columns (k, j) with a_k <= j <= b_k and
//! gcd(j, k) = 1, and every typed matrix implicitly carries the fixed column
//! (0, 1). Rows with a_k > b_k contribute nothing and are canonically stored
//! as (1, 0).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{gcd, ArithCache};

/// Endpoint description of a typed matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedMatrix {
    m: u32,
    a: Vec<i64>,
    b: Vec<i64>,
}

/// A finite set of integer column vectors, pairwise distinct and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColumnSet {
    columns: Vec<(i64, i64)>,
}

/// The extremal families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    F1,
    F2,
    F3,
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "F1" => Ok(FamilyKind::F1),
            "F2" => Ok(FamilyKind::F2),
            "F3" => Ok(FamilyKind::F3),
            other => Err(Error::InvalidArgument(format!("unknown family kind {other:?}"))),
        }
    }
}

impl TypedMatrix {
    /// Builds a typed matrix from endpoint vectors of equal positive length.
    pub fn new(a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "endpoint vectors must have equal positive length, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let m = u32::try_from(a.len())
            .map_err(|_| Error::InvalidArgument("matrix type out of range".into()))?;
        Ok(TypedMatrix { m, a, b })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    /// Endpoints of row k (1-based).
    pub fn row(&self, k: u32) -> (i64, i64) {
        (self.a[k as usize - 1], self.b[k as usize - 1])
    }

    /// True when row k contributes at least one column.
    pub fn row_nonempty(&self, k: u32, cache: &ArithCache) -> bool {
        let (a, b) = self.row(k);
        a <= b && cache.phi_interval(a, b, k as u64).map(|c| c > 0).unwrap_or(false)
    }

    /// Tightens every row to coprime endpoints; empty rows become (1, 0).
    pub fn normalize(&self, cache: &ArithCache) -> TypedMatrix {
        let mut a = Vec::with_capacity(self.a.len());
        let mut b = Vec::with_capacity(self.b.len());
        for k in 1..=self.m {
            match normalized_row(self.row(k), k as u64, cache) {
                Some((lo, hi)) => {
                    a.push(lo);
                    b.push(hi);
                }
                None => {
                    a.push(1);
                    b.push(0);
                }
            }
        }
        TypedMatrix { m: self.m, a, b }
    }

    /// All columns: the fixed (0, 1) plus every (k, j) with j in the row
    /// window and gcd(j, k) = 1.
    pub fn enumerate_columns(&self) -> ColumnSet {
        let mut cols = vec![(0i64, 1i64)];
        for k in 1..=self.m {
            let (a, b) = self.row(k);
            for j in a..=b {
                if gcd(j.unsigned_abs() % k as u64, k as u64) == 1 {
                    cols.push((k as i64, j));
                }
            }
        }
        ColumnSet::new(cols)
    }

    /// Exact column count: 1 + sum over rows of the coprime window count.
    pub fn column_count(&self, cache: &ArithCache) -> u64 {
        let mut count = 1u64;
        for k in 1..=self.m {
            let (a, b) = self.row(k);
            if a <= b {
                count += cache
                    .phi_interval(a, b, k as u64)
                    .expect("row window is ordered");
            }
        }
        count
    }

    /// The largest absolute 2x2 minor, computed from normalized endpoint
    /// submatrices only. Errors when every row is empty (rank one).
    pub fn delta_endpoints(&self, cache: &ArithCache) -> Result<u64> {
        let norm = self.normalize(cache);
        let rows: Vec<(u32, i64, i64)> = (1..=norm.m)
            .filter_map(|k| {
                let (a, b) = norm.row(k);
                (a <= b).then_some((k, a, b))
            })
            .collect();
        if rows.is_empty() {
            return Err(Error::InvalidArgument(
                "matrix has rank one: only the fixed column".into(),
            ));
        }
        let mut best: i64 = 0;
        for &(k, _, _) in &rows {
            // determinant against the fixed column (0, 1)
            best = best.max(k as i64);
        }
        for (i, &(k, ak, bk)) in rows.iter().enumerate() {
            for &(l, al, bl) in &rows[i..] {
                let (k, l) = (k as i64, l as i64);
                best = best.max(k * bl - l * ak).max(l * bk - k * al);
            }
        }
        Ok(best as u64)
    }

    /// Serialization helper matching the on-disk JSON shape.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("typed matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let parsed: TypedMatrix = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("bad typed-matrix JSON: {e}")))?;
        if parsed.m as usize != parsed.a.len() {
            return Err(Error::InvalidArgument(format!(
                "declared type {} disagrees with {} endpoint rows",
                parsed.m,
                parsed.a.len()
            )));
        }
        TypedMatrix::new(parsed.a, parsed.b)
    }
}

/// Smallest window [lo, hi] inside (a, b) with coprime endpoints, or None
/// when the window holds no integer coprime to k.
fn normalized_row((a, b): (i64, i64), k: u64, cache: &ArithCache) -> Option<(i64, i64)> {
    if a > b {
        return None;
    }
    if cache.phi_interval(a, b, k).ok()? == 0 {
        return None;
    }
    // a window of length k always contains a coprime, so both scans stop
    let lo = (a..=b).find(|j| gcd(j.unsigned_abs() % k, k) == 1)?;
    let hi = (a..=b).rev().find(|j| gcd(j.unsigned_abs() % k, k) == 1)?;
    Some((lo, hi))
}

impl ColumnSet {
    /// Deduplicates and sorts, so equal sets compare equal.
    pub fn new(columns: Vec<(i64, i64)>) -> Self {
        let mut columns = columns;
        columns.sort_unstable();
        columns.dedup();
        ColumnSet { columns }
    }

    pub fn columns(&self) -> &[(i64, i64)] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Largest |det| over all column pairs, by direct enumeration.
    pub fn delta_bruteforce(&self) -> Result<u64> {
        if self.columns.len() < 2 {
            return Err(Error::InvalidArgument(
                "delta needs at least two columns".into(),
            ));
        }
        let mut best: i64 = 0;
        for (i, &(x1, y1)) in self.columns.iter().enumerate() {
            for &(x2, y2) in &self.columns[i + 1..] {
                best = best.max((x1 * y2 - x2 * y1).abs());
            }
        }
        Ok(best as u64)
    }

    /// True when no 2x2 minor vanishes (vacuously true below two columns).
    pub fn is_generic(&self) -> bool {
        for (i, &(x1, y1)) in self.columns.iter().enumerate() {
            for &(x2, y2) in &self.columns[i + 1..] {
                if x1 * y2 == x2 * y1 {
                    return false;
                }
            }
        }
        true
    }
}

/// The closed-form target count 2*floor((d+5)/6) + 2*floor((d+1)/3) + 2.
pub fn g_tilde(delta: u64) -> u64 {
    assert!(delta >= 1);
    2 * ((delta + 5) / 6) + 2 * ((delta + 1) / 3) + 2
}

/// Member of one of the three extremal families.
pub fn family(kind: FamilyKind, delta: u64) -> Result<TypedMatrix> {
    if delta < 1 {
        return Err(Error::InvalidArgument("family needs delta >= 1".into()));
    }
    let d = delta as i64;
    match kind {
        FamilyKind::F1 => TypedMatrix::new(vec![0], vec![d]),
        FamilyKind::F2 => {
            // the k=2 column (2, delta) puts a determinant of 2 against
            // (0, 1), so the budget can only be met from delta = 3 up
            if delta % 2 == 0 || delta < 3 {
                return Err(Error::InvalidArgument(format!(
                    "the two-row family needs odd delta >= 3, got {delta}"
                )));
            }
            TypedMatrix::new(vec![0, d], vec![d, d])
        }
        FamilyKind::F3 => {
            if delta % 6 != 2 {
                return Err(Error::InvalidArgument(format!(
                    "the three-row family needs delta = 2 mod 6, got {delta}"
                )));
            }
            if delta % 12 == 2 {
                let s = (d - 2) / 12;
                if s < 1 {
                    return Err(Error::InvalidArgument(format!(
                        "the three-row family starts at delta = 14, got {delta}"
                    )));
                }
                TypedMatrix::new(
                    vec![0, 4 * s + 1, 9 * s + 1],
                    vec![7 * s + 1, 10 * s + 1, 12 * s + 2],
                )
            } else {
                let s = (d - 8) / 12;
                if s < 1 {
                    return Err(Error::InvalidArgument(format!(
                        "the three-row family starts at delta = 14, got {delta}"
                    )));
                }
                TypedMatrix::new(
                    vec![0, 4 * s + 3, 9 * s + 7],
                    vec![7 * s + 5, 10 * s + 7, 12 * s + 8],
                )
            }
        }
    }
}

/// The general extremal type-3 shape: a = (0, (delta+1)/3, a3) and
/// b = ((delta+a3)/3, (delta+2*a3-1)/3, delta), for delta = 2 mod 6 and
/// a3 = 1 mod 3 within [2*delta/3, 3*delta/4 + 1].
pub fn type3_extremal(delta: u64, a3: i64) -> Result<TypedMatrix> {
    if delta % 6 != 2 {
        return Err(Error::InvalidArgument(format!(
            "type-3 extremal shape needs delta = 2 mod 6, got {delta}"
        )));
    }
    let d = delta as i64;
    if a3.rem_euclid(3) != 1 {
        return Err(Error::InvalidArgument(format!(
            "type-3 extremal shape needs a3 = 1 mod 3, got {a3}"
        )));
    }
    // 2d/3 <= a3 <= 3d/4 + 1 without rounding: compare cross-multiplied
    if 3 * a3 < 2 * d || 4 * a3 > 3 * d + 4 {
        return Err(Error::InvalidArgument(format!(
            "a3 = {a3} outside [2*{delta}/3, 3*{delta}/4 + 1]"
        )));
    }
    for (label, v) in [("d+1", d + 1), ("d+a3", d + a3), ("d+2a3-1", d + 2 * a3 - 1)] {
        if v % 3 != 0 {
            return Err(Error::InvalidArgument(format!(
                "({label}) = {v} is not divisible by 3"
            )));
        }
    }
    TypedMatrix::new(
        vec![0, (d + 1) / 3, a3],
        vec![(d + a3) / 3, (d + 2 * a3 - 1) / 3, d],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cache() -> ArithCache {
        ArithCache::with_cache_dir(10_000, None)
    }

    #[test]
    fn enumerate_matches_examples() {
        let m = TypedMatrix::new(vec![0], vec![3]).unwrap();
        assert_eq!(
            m.enumerate_columns().columns(),
            &[(0, 1), (1, 0), (1, 1), (1, 2), (1, 3)]
        );
        let m = TypedMatrix::new(vec![0, 1], vec![2, 4]).unwrap();
        assert_eq!(
            m.enumerate_columns().columns(),
            &[(0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 3)]
        );
        let m = TypedMatrix::new(vec![1], vec![0]).unwrap();
        assert_eq!(m.enumerate_columns().columns(), &[(0, 1)]);
    }

    #[test]
    fn column_count_agrees_with_enumeration() {
        let c = cache();
        let samples = [
            TypedMatrix::new(vec![0], vec![10]).unwrap(),
            TypedMatrix::new(vec![1], vec![0]).unwrap(),
            TypedMatrix::new(vec![-7, 3, 2], vec![9, 3, 1]).unwrap(),
            family(FamilyKind::F3, 14).unwrap(),
        ];
        for m in samples {
            assert_eq!(m.column_count(&c), m.enumerate_columns().len() as u64);
        }
        assert_eq!(family(FamilyKind::F1, 10).unwrap().column_count(&c), 12);
        assert_eq!(family(FamilyKind::F3, 14).unwrap().column_count(&c), 18);
        assert_eq!(TypedMatrix::new(vec![1], vec![0]).unwrap().column_count(&c), 1);
    }

    #[test]
    fn delta_from_endpoints_matches_bruteforce() {
        let c = cache();
        let samples = [
            TypedMatrix::new(vec![0], vec![10]).unwrap(),
            TypedMatrix::new(vec![0], vec![1]).unwrap(),
            TypedMatrix::new(vec![-5, -3], vec![5, 7]).unwrap(),
            TypedMatrix::new(vec![2, 4, 1], vec![6, 4, 9]).unwrap(),
            family(FamilyKind::F2, 7).unwrap(),
            family(FamilyKind::F3, 20).unwrap(),
        ];
        for m in samples {
            let by_endpoints = m.delta_endpoints(&c).unwrap();
            let by_force = m.enumerate_columns().delta_bruteforce().unwrap();
            assert_eq!(by_endpoints, by_force, "matrix {m:?}");
        }
        assert_eq!(
            TypedMatrix::new(vec![0], vec![1]).unwrap().delta_endpoints(&c).unwrap(),
            1
        );
        assert!(TypedMatrix::new(vec![1], vec![0]).unwrap().delta_endpoints(&c).is_err());
    }

    #[test]
    fn normalization_tightens_to_coprime_endpoints() {
        let c = cache();
        // row 2 window [2, 6] tightens to [3, 5]; row 4 window [2, 2] dies
        let m = TypedMatrix::new(vec![0, 2, 5, 2], vec![3, 6, 4, 2]).unwrap();
        let n = m.normalize(&c);
        assert_eq!(n.a(), &[0, 3, 1, 1]);
        assert_eq!(n.b(), &[3, 5, 0, 0]);
        assert_eq!(m.column_count(&c), n.column_count(&c));
    }

    #[test]
    fn genericity_and_bruteforce_delta() {
        let a = ColumnSet::new(vec![(1, 0), (0, 1), (1, 1)]);
        assert_eq!(a.delta_bruteforce().unwrap(), 1);
        assert!(a.is_generic());
        let b = ColumnSet::new(vec![(1, 0), (2, 0)]);
        assert_eq!(b.delta_bruteforce().unwrap(), 0);
        assert!(!b.is_generic());
        let f2 = family(FamilyKind::F2, 7).unwrap().enumerate_columns();
        assert_eq!(f2.delta_bruteforce().unwrap(), 7);
        assert!(f2.is_generic());
    }

    #[test]
    fn families_hit_their_counts() {
        let c = cache();
        for (kind, delta, count) in [
            (FamilyKind::F1, 5, 7),
            (FamilyKind::F1, 10, 12),
            (FamilyKind::F2, 7, 10),
            (FamilyKind::F3, 14, 18),
            (FamilyKind::F3, 20, 24),
        ] {
            let m = family(kind, delta).unwrap();
            assert_eq!(m.column_count(&c), count, "{kind:?} at delta={delta}");
            assert_eq!(m.delta_endpoints(&c).unwrap(), delta);
            assert!(m.enumerate_columns().is_generic());
        }
        assert_eq!(family(FamilyKind::F1, 5).unwrap().row(1), (0, 5));
        assert_eq!(
            family(FamilyKind::F3, 14).unwrap(),
            TypedMatrix::new(vec![0, 5, 10], vec![8, 11, 14]).unwrap()
        );
        assert!(family(FamilyKind::F2, 6).is_err());
        assert!(family(FamilyKind::F3, 8).is_err());
        assert!(family(FamilyKind::F3, 15).is_err());
    }

    #[test]
    fn extremal_type3_shapes() {
        assert_eq!(
            type3_extremal(14, 10).unwrap(),
            family(FamilyKind::F3, 14).unwrap()
        );
        assert_eq!(
            type3_extremal(20, 16).unwrap(),
            family(FamilyKind::F3, 20).unwrap()
        );
        assert!(type3_extremal(14, 11).is_err());
        assert!(type3_extremal(15, 10).is_err());
        assert!(type3_extremal(14, 7).is_err());
        // every admissible a3 yields delta+4 columns and delta within bound
        let c = cache();
        for delta in [14u64, 20, 26, 32, 38, 44] {
            let d = delta as i64;
            let mut saw = 0;
            for a3 in (0..=d).filter(|x| x.rem_euclid(3) == 1) {
                if 3 * a3 < 2 * d || 4 * a3 > 3 * d + 4 {
                    continue;
                }
                let m = type3_extremal(delta, a3).unwrap();
                assert_eq!(m.column_count(&c), delta + 4, "delta={delta} a3={a3}");
                assert!(m.delta_endpoints(&c).unwrap() <= delta);
                assert!(m.enumerate_columns().is_generic());
                saw += 1;
            }
            assert!(saw >= 1, "no admissible a3 at delta={delta}");
        }
    }

    #[test]
    fn g_tilde_closed_form_and_cases() {
        assert_eq!(g_tilde(385), 388);
        assert_eq!(g_tilde(8), 12);
        assert_eq!(g_tilde(6), 8);
        for delta in 1..=100_000u64 {
            let expected = match delta % 6 {
                2 => delta + 4,
                1 | 3 | 5 => delta + 3,
                _ => delta + 2,
            };
            assert_eq!(g_tilde(delta), expected, "delta={delta}");
        }
    }

    #[test]
    fn json_round_trip() {
        let m = family(FamilyKind::F3, 14).unwrap();
        let s = m.to_json();
        assert_eq!(s, r#"{"m":3,"a":[0,5,10],"b":[8,11,14]}"#);
        assert_eq!(TypedMatrix::from_json(&s).unwrap(), m);
        let cols = serde_json::to_string(&ColumnSet::new(vec![(0, 1), (1, 0)])).unwrap();
        assert_eq!(cols, "[[0,1],[1,0]]");
    }
}
