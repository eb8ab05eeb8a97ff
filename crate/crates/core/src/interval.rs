//! Rational interval arithmetic with outward rounding.
//!
//! Every interval holds exact `BigRational` endpoints with `lo <= hi`.
//! Field operations are exact; `sqrt` and `ln` return enclosures whose
//! width is controlled by a bit-precision parameter, so comparisons that
//! come back `Some(_)` are rigorous and `None` means "tighten and retry".

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    /// Builds `[lo, hi]`; panics if the endpoints are out of order,
    /// which would indicate a bug in the calling code.
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        // min/max over the four endpoint products covers all sign cases
        let mut products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        products.sort();
        let [min, _, _, max] = products;
        Interval::new(min, max)
    }

    /// Reciprocal; the interval must not contain zero.
    pub fn recip(&self) -> Interval {
        assert!(
            self.lo.is_positive() || self.hi.is_negative(),
            "reciprocal of an interval containing zero"
        );
        Interval::new(self.hi.recip(), self.lo.recip())
    }

    pub fn div(&self, rhs: &Interval) -> Interval {
        self.mul(&rhs.recip())
    }

    pub fn abs(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            let mag = std::cmp::max(-self.lo.clone(), self.hi.clone());
            Interval::new(BigRational::zero(), mag)
        } else if self.hi.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, c: &BigRational) -> Interval {
        self.mul(&Interval::point(c.clone()))
    }

    /// Three-valued `self <= rhs`: `None` when the intervals overlap.
    pub fn le(&self, rhs: &Interval) -> Option<bool> {
        if self.hi <= rhs.lo {
            Some(true)
        } else if self.lo > rhs.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Three-valued `self <= x` for an exact rational `x`.
    pub fn le_rat(&self, x: &BigRational) -> Option<bool> {
        if &self.hi <= x {
            Some(true)
        } else if &self.lo > x {
            Some(false)
        } else {
            None
        }
    }

    /// Three-valued `self >= x` for an exact rational `x`.
    pub fn ge_rat(&self, x: &BigRational) -> Option<bool> {
        if &self.lo >= x {
            Some(true)
        } else if &self.hi < x {
            Some(false)
        } else {
            None
        }
    }

    /// Square root enclosure with `2^-bits` endpoint granularity.
    /// The lower endpoint must be nonnegative.
    pub fn sqrt(&self, bits: u32) -> Interval {
        assert!(!self.lo.is_negative(), "sqrt of a negative interval");
        Interval::new(sqrt_lower(&self.lo, bits), sqrt_upper(&self.hi, bits))
    }

    /// Natural logarithm enclosure; the lower endpoint must be positive.
    pub fn ln(&self, bits: u32) -> Interval {
        assert!(self.lo.is_positive(), "ln of a nonpositive interval");
        let lo = ln_point(&self.lo, bits);
        let hi = ln_point(&self.hi, bits);
        Interval::new(lo.lo, hi.hi)
    }

    /// Decimal rendering of the midpoint, for human-facing output only.
    pub fn to_decimal(&self, digits: usize) -> String {
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2));
        rational_to_decimal(&mid, digits)
    }

    /// Outward enclosure of an exact rational on the `2^-bits` grid.
    /// Caps denominator growth when a long-running exact sum feeds many
    /// interval computations: the enclosure is rigorous and cheap to use.
    pub fn round_point(x: &BigRational, bits: u32) -> Interval {
        let scaled = x * BigRational::from_integer(BigInt::one() << (bits as usize));
        let floor = scaled.floor().to_integer();
        let den = BigInt::one() << (bits as usize);
        if scaled.is_integer() {
            Interval::point(BigRational::new(floor, den))
        } else {
            Interval::new(
                BigRational::new(floor.clone(), den.clone()),
                BigRational::new(floor + BigInt::one(), den),
            )
        }
    }
}

/// Largest `s/2^bits`-grid rational at or below `sqrt(x)`.
fn sqrt_lower(x: &BigRational, bits: u32) -> BigRational {
    // sqrt(p/q) = sqrt(p q)/q; scaling by 4^bits gives the grid resolution
    let scaled = (x.numer() * x.denom()) << (2 * bits as usize);
    let root = scaled.sqrt();
    BigRational::new(root, x.denom() << (bits as usize))
}

/// Smallest grid rational at or above `sqrt(x)`.
fn sqrt_upper(x: &BigRational, bits: u32) -> BigRational {
    let scaled = (x.numer() * x.denom()) << (2 * bits as usize);
    let root = scaled.sqrt();
    let bump = if &root * &root == scaled {
        root
    } else {
        root + BigInt::one()
    };
    BigRational::new(bump, x.denom() << (bits as usize))
}

/// Enclosure of `ln 2` via 2*atanh(1/3) with a rigorous series tail.
pub fn ln2(bits: u32) -> Interval {
    atanh_scaled(
        &BigRational::new(BigInt::one(), BigInt::from(3)),
        bits,
    )
}

/// Enclosure of `ln x` for an exact rational `x > 0`.
pub fn ln_point(x: &BigRational, bits: u32) -> Interval {
    assert!(x.is_positive(), "ln of a nonpositive rational");
    // range-reduce to t in [3/4, 3/2) so the atanh argument stays small
    let three_halves = BigRational::new(BigInt::from(3), BigInt::from(2));
    let three_quarters = BigRational::new(BigInt::from(3), BigInt::from(4));
    let two = BigRational::from_integer(BigInt::from(2));
    let mut t = x.clone();
    let mut e: i64 = 0;
    while t >= three_halves {
        t /= &two;
        e += 1;
    }
    while t < three_quarters {
        t *= &two;
        e -= 1;
    }
    // ln x = e ln 2 + 2 atanh((t-1)/(t+1))
    let u = (&t - BigRational::one()) / (&t + BigRational::one());
    let ln_t = atanh_scaled(&u, bits);
    let ln2_enc = ln2(bits);
    let e_term = ln2_enc.scale(&BigRational::from_integer(BigInt::from(e)));
    e_term.add(&ln_t)
}

/// Enclosure of `2*atanh(u)` for |u| <= 1/3, by the odd power series
/// with tail bound 2|u|^(2n+1) / ((2n+1)(1-u^2)).
fn atanh_scaled(u: &BigRational, bits: u32) -> Interval {
    debug_assert!(u.abs() <= BigRational::new(BigInt::one(), BigInt::from(3)));
    let u2 = u * u;
    let mut term = u.clone();
    let mut sum = BigRational::zero();
    let mut n: u64 = 0;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (bits as usize + 2));
    loop {
        sum += &term / BigRational::from_integer(BigInt::from(2 * n + 1));
        n += 1;
        term *= &u2;
        // |u| <= 1/3 gives 1/(1-u^2) <= 9/8
        let tail = term.abs() * BigRational::new(BigInt::from(9), BigInt::from(8 * (2 * n + 1)));
        if tail <= eps {
            let two = BigRational::from_integer(BigInt::from(2));
            let s = &two * &sum;
            let r = &two * &tail;
            return Interval::new(&s - &r, &s + &r);
        }
    }
}

/// Parses "p/q", "p", or a plain decimal like "1.85" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse rational from {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10).pow(frac_part.len() as u32);
        let magnitude = int_digits.abs() * &scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Renders an exact rational as a rounded decimal string (for display).
pub fn rational_to_decimal(x: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = (x * BigRational::from_integer(scale.clone())).round();
    let (sign, mag) = (scaled.numer().sign(), scaled.numer().abs());
    let s = mag.to_string();
    let (int_part, frac_part) = if s.len() > digits {
        (s[..s.len() - digits].to_string(), s[s.len() - digits..].to_string())
    } else {
        ("0".to_string(), format!("{s:0>digits$}"))
    };
    let sign_str = if sign == Sign::Minus { "-" } else { "" };
    if digits == 0 {
        format!("{sign_str}{int_part}")
    } else {
        format!("{sign_str}{int_part}.{frac_part}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn arithmetic_is_exact_on_endpoints() {
        let a = Interval::new(rat(1, 3), rat(1, 2));
        let b = Interval::new(rat(-1, 4), rat(2, 1));
        let s = a.add(&b);
        assert_eq!(s.lo(), &rat(1, 12));
        assert_eq!(s.hi(), &rat(5, 2));
        let p = a.mul(&b);
        assert_eq!(p.lo(), &rat(-1, 8));
        assert_eq!(p.hi(), &rat(1, 1));
    }

    #[test]
    fn sqrt_brackets_the_true_root() {
        let two = Interval::from_int(2);
        let r = two.sqrt(64);
        assert!(r.lo() * r.lo() <= rat(2, 1));
        assert!(r.hi() * r.hi() >= rat(2, 1));
        assert!(r.width() < rat(1, 1 << 60));
        // perfect squares come back exact on the relevant side
        let nine = Interval::from_int(9);
        let r = nine.sqrt(16);
        assert_eq!(r.lo(), &rat(3, 1));
        assert_eq!(r.hi(), &rat(3, 1));
    }

    #[test]
    fn ln_encloses_known_values() {
        // ln 1 = 0
        let one = ln_point(&rat(1, 1), 64);
        assert!(one.contains(&BigRational::zero()));
        // ln 2 against a 30-digit reference
        let reference = parse_rational("0.693147180559945309417232121458").unwrap();
        let l2 = ln2(128);
        assert!((l2.lo() - &reference).abs() < rat(1, 1_000_000_000));
        let grid = BigRational::new(BigInt::one(), BigInt::one() << 100);
        assert!(l2.contains(&reference) || l2.width() < grid);
        // ln(e) ~ 1 sanity via ln(27/10) + ln(10/27*e) skipped; check monotonicity instead
        let a = ln_point(&rat(5, 1), 96);
        let b = ln_point(&rat(7, 1), 96);
        assert_eq!(a.le(&b), Some(true));
    }

    #[test]
    fn ln_of_huge_and_tiny_arguments() {
        let big = ln_point(&rat(1_000_000_007, 1), 96);
        // reference truncated at 28 decimals, so compare with that slack
        let reference = parse_rational("20.7232658439464111316619232065").unwrap();
        let slack = BigRational::new(BigInt::one(), BigInt::from(10).pow(27));
        assert!((big.lo() - &reference).abs() < slack);
        assert!((big.hi() - &reference).abs() < slack);
        let small = ln_point(&rat(1, 1024), 96);
        let minus_ten_ln2 = ln2(96).scale(&rat(-10, 1));
        assert!(small.lo() <= minus_ten_ln2.hi() && minus_ten_ln2.lo() <= small.hi());
    }

    #[test]
    fn parse_rational_accepts_all_forms() {
        assert_eq!(parse_rational("35/36").unwrap(), rat(35, 36));
        assert_eq!(parse_rational("-7").unwrap(), rat(-7, 1));
        assert_eq!(parse_rational("1.85").unwrap(), rat(37, 20));
        assert_eq!(parse_rational("0.001").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn decimal_rendering_rounds_half_away() {
        assert_eq!(rational_to_decimal(&rat(1, 3), 6), "0.333333");
        assert_eq!(rational_to_decimal(&rat(119, 120), 6), "0.991667");
        assert_eq!(rational_to_decimal(&rat(-1, 2), 1), "-0.5");
        assert_eq!(rational_to_decimal(&rat(7, 1), 0), "7");
    }
}
