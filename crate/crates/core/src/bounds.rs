//! The certification layer: the three-rectangle dual certificate with its
//! admissible constant window, the propagation sweep over the covering
//! values, and the column-count bounds that convert a certified value into
//! the final counting threshold.
//!
//! Every inequality reported here is rigorous: irrational quantities are
//! evaluated as interval enclosures with outward rounding, and comparisons
//! that an enclosure cannot decide are retried at doubled precision.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::consts;
use crate::error::{Error, Result};
use crate::interval::{ln_point, rational_to_decimal, Interval};
use crate::lp::{self, DualCertificate, Rect};
use crate::model::g_tilde;
use crate::numtheory::ArithCache;

// Boundary indices of the rectangle decomposition: the largest k below
// m/sqrt(3) and below m*sqrt(2/3). Neither cutoff is ever an integer, so
// strict comparisons 3k^2 < m^2 and 3k^2 < 2m^2 decide membership exactly.
fn beta_floor(m: u32) -> u32 {
    let mm = u128::from(m) * u128::from(m);
    let mut k = ((mm / 3) as u128).sqrt() as u32;
    while 3 * u128::from(k + 1) * u128::from(k + 1) < mm {
        k += 1;
    }
    while k > 0 && 3 * u128::from(k) * u128::from(k) >= mm {
        k -= 1;
    }
    k
}

fn gamma_floor(m: u32) -> u32 {
    let mm2 = 2 * u128::from(m) * u128::from(m);
    let mut k = ((mm2 / 3) as u128).sqrt() as u32;
    while 3 * u128::from(k + 1) * u128::from(k + 1) < mm2 {
        k += 1;
    }
    while k > 0 && 3 * u128::from(k) * u128::from(k) >= mm2 {
        k -= 1;
    }
    k
}

/// The three index rectangles covering the quarter circle k^2 + l^2 = m^2:
/// a flat one, the central square, and the flat one's mirror image.
pub fn analytic_rectangles(m: u32) -> [Rect; 3] {
    let kb = beta_floor(m);
    let kg = gamma_floor(m);
    [
        Rect { k_lo: 1, k_hi: kb, l_lo: kg + 1, l_hi: m },
        Rect { k_lo: kb + 1, k_hi: kg, l_lo: kb + 1, l_hi: kg },
        Rect { k_lo: kg + 1, k_hi: m, l_lo: 1, l_hi: kb },
    ]
}

/// The closed-form dual certificate Y = c * phi(k) * phi(l) supported on
/// the three rectangles. Feasibility is not checked here; pass the result
/// to `lp::check_dual_feasible`, which reduces each row constraint to
/// 2c * (range phi-sum) >= 1 without materializing the matrix.
pub fn analytic_certificate(
    m: u32,
    c: &BigRational,
    cache: &ArithCache,
) -> Result<DualCertificate> {
    if m < 4 {
        return Err(Error::InvalidArgument(format!(
            "the rectangle certificate needs m >= 4, got {m}"
        )));
    }
    DualCertificate::from_rectangles(m, c.clone(), analytic_rectangles(m).to_vec(), cache)
}

const WINDOW_BITS: u32 = 192;

/// Admissible window [lower, upper] for the certificate constant:
/// feasibility of every row forces c >= (pi^2/6) (1/3 - 5eps/3)^-1 / m^2,
/// and objective <= w forces c <= (w/2) (pi^2/6)^2 / (m^2 f(eps)) with
/// f(eps) = 2 (1+eps) b ((1+eps) - (1-eps) g) + ((1+eps) g - (1-eps) b)^2,
/// b = sqrt(1/3), g = sqrt(2/3). Endpoints are rounded towards each other,
/// so any c inside the returned window genuinely satisfies both bounds.
///
/// The window certifies the covering value only when eps is honest for the
/// row sums involved, i.e. when m/sqrt(3) clears the totient-sum threshold
/// for eps (1880 at eps = 1/1000, see `numtheory`). The caller owns that
/// check; this function is the pure formula.
pub fn c_window(
    m: u32,
    eps: &BigRational,
    w: &BigRational,
) -> Result<(BigRational, BigRational)> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let fifth = BigRational::new(BigInt::one(), BigInt::from(5));
    if eps.is_negative() || *eps >= fifth {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in [0, 1/5), got {}",
            rational_to_decimal(eps, 6)
        )));
    }
    if w.is_negative() {
        return Err(Error::InvalidArgument("w must be nonnegative".into()));
    }
    let m2 = BigRational::from_integer(BigInt::from(u64::from(m) * u64::from(m)));
    let one = BigRational::one();

    // lower bound: exact rational aside from the pi^2 enclosure
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let slack = &third - BigRational::new(BigInt::from(5), BigInt::from(3)) * eps;
    let lower_iv = consts::pi_sq().scale(&(&one / (BigRational::from_integer(BigInt::from(6)) * &m2 * slack)));

    // upper bound: beta and gamma need square-root enclosures
    let beta = Interval::point(third.clone()).sqrt(WINDOW_BITS);
    let gamma = Interval::point(BigRational::new(BigInt::from(2), BigInt::from(3))).sqrt(WINDOW_BITS);
    let up = &one + eps;
    let down = &one - eps;
    let first = beta
        .scale(&up)
        .mul(&Interval::point(up.clone()).sub(&gamma.scale(&down)))
        .scale(&BigRational::from_integer(BigInt::from(2)));
    let cross = gamma.scale(&up).sub(&beta.scale(&down));
    let f = first.add(&cross.mul(&cross));
    let upper_iv = consts::pi_sq()
        .mul(consts::pi_sq())
        .mul(&f.recip())
        .scale(&(w / (BigRational::from_integer(BigInt::from(72)) * &m2)));

    let lower = lower_iv.hi().clone();
    let upper = upper_iv.lo().clone();
    if lower > upper {
        return Err(Error::EmptyWindow {
            lower: rational_to_decimal(&lower, 12),
            upper: rational_to_decimal(&upper, 12),
        });
    }
    Ok((lower, upper))
}

/// One row of a sweep: the certified bound on the covering value at m,
/// whether it came from a solve or from propagation, and the eps that the
/// restricted program used (none for propagation and for the exact
/// fallback solve).
#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub m: u32,
    pub bound: BigRational,
    pub solved: bool,
    pub eps: Option<BigRational>,
    pub wall_ms: u64,
}

/// Sweep output: one record per m, bounds all at most `w` on success.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub w: BigRational,
    pub records: Vec<SweepRecord>,
}

impl SweepReport {
    /// Number of records that required an LP solve.
    pub fn solves(&self) -> usize {
        self.records.iter().filter(|r| r.solved).count()
    }
}

const EPS_RETRIES: u32 = 8;
const EXACT_FALLBACK_LIMIT: u32 = 64;

// One certified bound at m. The eps ladder starts at 1.85/m and doubles on
// an uncovered row or a bound above w; tiny m defeat the annulus shape
// entirely, so below EXACT_FALLBACK_LIMIT the exact packing program decides.
fn certify_one(m: u32, w: &BigRational, cache: &ArithCache) -> Result<(BigRational, Option<BigRational>)> {
    let mut eps = BigRational::new(BigInt::from(37), BigInt::from(20) * BigInt::from(m));
    for _ in 0..EPS_RETRIES {
        match lp::solve_restricted(m, &eps, cache) {
            Ok(sol) if sol.value <= *w => return Ok((sol.value, Some(eps))),
            Ok(_) | Err(Error::EmptyDualRows { .. }) => {
                eps = eps * BigRational::from_integer(BigInt::from(2));
            }
            Err(e) => return Err(e),
        }
    }
    if m <= EXACT_FALLBACK_LIMIT {
        let solution = lp::build_primal(m, cache)?.solve()?;
        if solution.value <= *w {
            return Ok((solution.value, None));
        }
    }
    Err(Error::SweepFailed { m })
}

fn sweep_chunk(m_lo: u32, m_hi: u32, w: &BigRational, cache: &ArithCache) -> Result<Vec<SweepRecord>> {
    let mut records: Vec<SweepRecord> = Vec::with_capacity((m_hi - m_lo + 1) as usize);
    for m in m_lo..=m_hi {
        let propagated = records.last().map(|prev| {
            let step = BigRational::new(
                BigInt::from(cache.phi(u64::from(m))),
                BigInt::from(u64::from(m) * u64::from(m)),
            );
            &prev.bound + step
        });
        let record = match propagated {
            // the covering value grows by at most phi(m)/m^2 per step, so a
            // still-small propagated bound needs no solve
            Some(bound) if bound <= *w => SweepRecord { m, bound, solved: false, eps: None, wall_ms: 0 },
            _ => {
                let started = Instant::now();
                let (bound, eps) = certify_one(m, w, cache)?;
                SweepRecord {
                    m,
                    bound,
                    solved: true,
                    eps,
                    wall_ms: started.elapsed().as_millis() as u64,
                }
            }
        };
        records.push(record);
    }
    Ok(records)
}

/// Certifies bound_on_z_m <= w for every m in [m_lo, m_hi], solving the
/// restricted covering program only where the propagated bound is not
/// already small enough. With jobs > 1 the range splits into contiguous
/// chunks; each chunk re-solves at its first m, so the concatenated report
/// stays sound (possibly with a few extra solves at the seams).
pub fn sweep(
    m_lo: u32,
    m_hi: u32,
    w: &BigRational,
    cache: &ArithCache,
    jobs: usize,
) -> Result<SweepReport> {
    if m_lo < 4 || m_lo > m_hi {
        return Err(Error::InvalidArgument(format!(
            "need 4 <= m_lo <= m_hi, got [{m_lo}, {m_hi}]"
        )));
    }
    if jobs == 0 {
        return Err(Error::InvalidArgument("jobs must be positive".into()));
    }
    let span = m_hi - m_lo + 1;
    let jobs = jobs.min(span as usize);
    let records = if jobs == 1 {
        sweep_chunk(m_lo, m_hi, w, cache)?
    } else {
        let mut bounds = Vec::with_capacity(jobs + 1);
        for i in 0..=jobs {
            bounds.push(m_lo + (span * i as u32) / jobs as u32);
        }
        let mut slots: Vec<Option<Result<Vec<SweepRecord>>>> = Vec::new();
        slots.resize_with(jobs, || None);
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (i, pair) in bounds.windows(2).enumerate() {
                let (lo, hi) = (pair[0], pair[1] - 1);
                handles.push((i, scope.spawn(move || sweep_chunk(lo, hi, w, cache))));
            }
            for (i, handle) in handles {
                slots[i] = Some(handle.join().expect("sweep worker panicked"));
            }
        });
        let mut all = Vec::with_capacity(span as usize);
        for slot in slots {
            all.extend(slot.expect("every chunk ran")?);
        }
        all
    };
    Ok(SweepReport { w: w.clone(), records })
}

const BOUND_BITS: u32 = 128;

/// Upper bound on the column count of an endpoint matrix of type m whose
/// covering value is at most z: z * delta + 1 + (m/zeta(2)) (log m + kappa)
/// + 15 sqrt(m) log m, rounded upward. For m in {1, 2, 3} the exact counts
/// delta + 2, delta + 3, delta + 4 replace the asymptotic error term.
pub fn column_bound(m: u32, delta: u64, z: &BigRational) -> BigRational {
    assert!(m >= 1, "type must be positive");
    let d = BigRational::from_integer(BigInt::from(delta));
    match m {
        1 => d + BigRational::from_integer(BigInt::from(2)),
        2 => d + BigRational::from_integer(BigInt::from(3)),
        3 => d + BigRational::from_integer(BigInt::from(4)),
        _ => {
            let m_rat = BigRational::from_integer(BigInt::from(m));
            let ln_m = ln_point(&m_rat, BOUND_BITS);
            let sqrt_m = Interval::point(m_rat.clone()).sqrt(BOUND_BITS);
            let main = consts::zeta2()
                .recip()
                .scale(&m_rat)
                .mul(&ln_m.add(consts::kappa()));
            let tail = sqrt_m
                .mul(&ln_m)
                .scale(&BigRational::from_integer(BigInt::from(15)));
            let exact = z * d + BigRational::one();
            main.add(&tail).add(&Interval::point(exact)).hi().clone()
        }
    }
}

/// Residue-refined exact column bounds for the smallest types: delta + 2
/// for one row; delta + 2 or + 3 by parity for two rows; the closed-form
/// target for three rows.
pub fn refined_small_type_bound(m: u32, delta: u64) -> Result<u64> {
    match m {
        1 => Ok(delta + 2),
        2 => Ok(delta + if delta % 2 == 1 { 3 } else { 2 }),
        3 => Ok(g_tilde(delta)),
        _ => Err(Error::InvalidArgument(format!(
            "refined bounds cover types 1..3, got {m}"
        ))),
    }
}

/// The sharpened five-row bound 119 delta / 120 + 7: the generic error
/// term of `column_bound` collapses to the exact constant 7 once the
/// five-row covering value 119/120 and the small-m sums are plugged in.
pub fn type_five_bound(delta: u64) -> BigRational {
    BigRational::new(BigInt::from(119) * BigInt::from(delta), BigInt::from(120))
        + BigRational::from_integer(BigInt::from(7))
}

/// Decides w * delta + 1 + (s/zeta(2)) (log s + kappa) + 15 sqrt(s) log s
/// <= delta for s = sqrt(pi delta / 2), the worst type the reduction can
/// produce. The left side is an outward-rounded enclosure; precision
/// doubles until the comparison is strict in one direction.
pub fn verify_threshold(delta: u64, w: &BigRational) -> bool {
    assert!(delta >= 1, "delta must be positive");
    let target = BigRational::from_integer(BigInt::from(delta));
    let exact = w * &target + BigRational::one();
    let mut bits = BOUND_BITS;
    loop {
        let s = consts::pi()
            .scale(&BigRational::new(BigInt::from(delta), BigInt::from(2)))
            .sqrt(bits);
        let ln_s = s.ln(bits);
        let lhs = consts::zeta2()
            .recip()
            .mul(&s)
            .mul(&ln_s.add(consts::kappa()))
            .add(&s.sqrt(bits).mul(&ln_s).scale(&BigRational::from_integer(BigInt::from(15))))
            .add(&Interval::point(exact.clone()));
        match lhs.le_rat(&target) {
            Some(verdict) => return verdict,
            None => {
                bits *= 2;
                assert!(bits <= 1 << 14, "threshold enclosure failed to separate");
            }
        }
    }
}
