//! Exact arithmetic kernel.
//!
//! Everything downstream counts integers n by where n^c falls relative to
//! integer boundaries, so [n^c] must never be decided by a misrounded
//! float. The exponent is kept as a reduced rational c = a/b; then
//! m = [n^(a/b)] is the unique integer with m^b ≤ n^a < (m+1)^b, a
//! statement about integers that arbitrary precision settles exactly.
//!
//! The fast path evaluates n^c in f64 and trusts it whenever the result
//! is farther than `GUARD_BAND` from an integer; inside the band the
//! answer is certified by big-integer power comparison. An irrational c
//! would admit no such finite certificate, which is why only rational
//! exponents are accepted.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use std::fmt;
use thiserror::Error;

/// Exact rational, re-exported so callers share one arbitrary-precision type.
pub type Rational = BigRational;

/// Fractional distance from an integer below which the float estimate of
/// n^c is not trusted and the exact integer-power comparison runs.
pub const GUARD_BAND: f64 = 1e-6;

/// Theorem range upper bound for c, as (numerator, denominator).
pub const THEOREM_RANGE_MAX: (u64, u64) = (3849, 3334);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactMathError {
    #[error("cannot parse `{0}` as a rational: expected the form a/b with integer a, b")]
    Parse(String),
    #[error(
        "decimal input `{0}` rejected: exact boundary certification needs c as a \
         reduced fraction a/b (for example 21/20), not a floating-point approximation"
    )]
    DecimalInput(String),
    #[error("c = {0} out of range: need 1 < c < 3849/3334 (use relaxed mode for 1 < c < 2)")]
    OutsideTheoremRange(String),
    #[error("c = {0} out of range: relaxed mode still requires 1 < c < 2")]
    OutsideRelaxedRange(String),
    #[error("numerator/denominator too large: need a, b <= {0}")]
    ExponentTooLarge(u64),
}

/// Largest accepted numerator/denominator of c. Keeps the certification
/// exponents in u32 territory; the theorem range only needs 3849/3334.
const MAX_EXPONENT_PART: u64 = 1_000_000;

/// Parse "a/b" (or a bare integer "n") into an exact rational.
///
/// Decimal notation is rejected on purpose: the whole point of the kernel
/// is exact boundary decisions, which a decimal approximation of c defeats.
pub fn parse_rational(s: &str) -> Result<BigRational, ExactMathError> {
    let s = s.trim();
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(ExactMathError::DecimalInput(s.to_string()));
    }
    let mk_err = || ExactMathError::Parse(s.to_string());
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i64 = num_s.parse().map_err(|_| mk_err())?;
    let den: i64 = den_s.parse().map_err(|_| mk_err())?;
    if den == 0 {
        return Err(mk_err());
    }
    Ok(BigRational::new(num.into(), den.into()))
}

/// A rational exponent c = a/b with 1 < c, reduced, carrying both the
/// exact form (for certificates) and cached f64 views (for fast paths).
#[derive(Debug, Clone, PartialEq)]
pub struct ExactC {
    a: u64,
    b: u64,
    c_f64: f64,
    gamma_f64: f64,
    in_theorem_range: bool,
}

impl ExactC {
    /// Theorem-range constructor: requires 1 < a/b < 3849/3334.
    pub fn new(a: u64, b: u64) -> Result<Self, ExactMathError> {
        let c = Self::build(a, b)?;
        if !c.in_theorem_range {
            return Err(ExactMathError::OutsideTheoremRange(format!("{}/{}", a, b)));
        }
        Ok(c)
    }

    /// Exploration constructor: any 1 < a/b < 2, flagged in reports when
    /// outside the theorem range.
    pub fn new_relaxed(a: u64, b: u64) -> Result<Self, ExactMathError> {
        Self::build(a, b)
    }

    fn build(a: u64, b: u64) -> Result<Self, ExactMathError> {
        if a == 0 || b == 0 || a > MAX_EXPONENT_PART || b > MAX_EXPONENT_PART {
            return Err(ExactMathError::ExponentTooLarge(MAX_EXPONENT_PART));
        }
        let g = gcd(a, b);
        let (a, b) = (a / g, b / g);
        // 1 < a/b < 2, exact cross-multiplied comparisons
        if a <= b || a >= 2 * b {
            return Err(ExactMathError::OutsideRelaxedRange(format!("{}/{}", a, b)));
        }
        let (tn, td) = THEOREM_RANGE_MAX;
        let in_theorem_range = (a as u128) * (td as u128) < (tn as u128) * (b as u128);
        Ok(ExactC {
            a,
            b,
            c_f64: a as f64 / b as f64,
            gamma_f64: b as f64 / a as f64,
            in_theorem_range,
        })
    }

    /// Parse "a/b" from the CLI; decimals rejected with an explanation.
    pub fn parse(s: &str, relaxed: bool) -> Result<Self, ExactMathError> {
        let r = parse_rational(s)?;
        if r.is_negative() || r.numer().to_u64().is_none() || r.denom().to_u64().is_none() {
            return Err(ExactMathError::Parse(s.to_string()));
        }
        let (a, b) = (r.numer().to_u64().unwrap(), r.denom().to_u64().unwrap());
        if relaxed {
            Self::new_relaxed(a, b)
        } else {
            Self::new(a, b)
        }
    }

    pub fn numer(&self) -> u64 {
        self.a
    }

    pub fn denom(&self) -> u64 {
        self.b
    }

    pub fn c_f64(&self) -> f64 {
        self.c_f64
    }

    /// γ = 1/c as f64, for phase evaluation (never for boundary decisions).
    pub fn gamma_f64(&self) -> f64 {
        self.gamma_f64
    }

    pub fn as_rational(&self) -> BigRational {
        BigRational::new(self.a.into(), self.b.into())
    }

    /// Whether 1 < c < 3849/3334 (exact cross-multiplied check).
    pub fn in_theorem_range(&self) -> bool {
        self.in_theorem_range
    }
}

impl fmt::Display for ExactC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.b)
    }
}

/// [n^c] for n ≥ 1, certified exactly at integer boundaries.
pub fn floor_pow(n: u64, c: &ExactC) -> u64 {
    assert!(n >= 1, "floor_pow requires n >= 1");
    floor_pow_frac(n, c.a as u32, c.b as u32)
}

/// [n^(num/den)] for n ≥ 1 and arbitrary positive exponent num/den.
///
/// Fast path: f64 powf, trusted when the fractional part is outside the
/// guard band. Otherwise the floor is found by exact comparison
/// m^den ≤ n^num < (m+1)^den.
pub fn floor_pow_frac(n: u64, num: u32, den: u32) -> u64 {
    assert!(n >= 1 && num >= 1 && den >= 1);
    if n == 1 {
        return 1;
    }
    let t = (n as f64).powf(num as f64 / den as f64);
    let fl = t.floor();
    let frac = t - fl;
    if frac > GUARD_BAND && frac < 1.0 - GUARD_BAND {
        return fl as u64;
    }
    certified_floor(n, num, den, fl.max(1.0) as u64)
}

/// ⌈n^(num/den)⌉: the least integer m with m ≥ n^(num/den).
pub fn ceil_pow_frac(n: u64, num: u32, den: u32) -> u64 {
    assert!(n >= 1 && num >= 1 && den >= 1);
    if n == 1 {
        return 1;
    }
    let t = (n as f64).powf(num as f64 / den as f64);
    let fl = t.floor();
    let frac = t - fl;
    if frac > GUARD_BAND && frac < 1.0 - GUARD_BAND {
        // certainly non-integer, so ceil = floor + 1
        return fl as u64 + 1;
    }
    let m = certified_floor(n, num, den, fl.max(1.0) as u64);
    // ceil equals the floor exactly when n^(num/den) is an integer,
    // i.e. m^den == n^num
    if BigUint::from(m).pow(den) == BigUint::from(n).pow(num) {
        m
    } else {
        m + 1
    }
}

/// Exact floor via big-integer power comparison, walking from a float guess.
fn certified_floor(n: u64, num: u32, den: u32, guess: u64) -> u64 {
    let n_pow = BigUint::from(n).pow(num);
    let mut m = guess.max(1);
    while m > 1 && BigUint::from(m).pow(den) > n_pow {
        m -= 1;
    }
    while BigUint::from(m + 1).pow(den) <= n_pow {
        m += 1;
    }
    m
}

/// #{k ≥ 1 : p^γ ≤ k·d² < (p+1)^γ} with γ = 1/c, resolved exactly:
/// k·d² ≥ p^γ  ⟺  (k·d²)^a ≥ p^b.
pub fn count_multiples_in_gamma_interval(p: u64, c: &ExactC, d: u64) -> u64 {
    assert!(p >= 2, "count_multiples_in_gamma_interval requires p >= 2");
    assert!(d >= 1 && d <= u32::MAX as u64, "d out of range");
    let (a, b) = (c.a as u32, c.b as u32);
    // least n with n >= p^gamma, i.e. n^a >= p^b
    let n0 = ceil_pow_frac(p, b, a);
    let n1 = ceil_pow_frac(p + 1, b, a);
    let dd = d * d;
    let k0 = n0.div_ceil(dd);
    let k1 = n1.div_ceil(dd);
    k1.saturating_sub(k0)
}

/// The n-interval [n0, n1) on which [n^c] = p, i.e. p^γ ≤ n < (p+1)^γ.
pub fn gamma_interval(p: u64, c: &ExactC) -> (u64, u64) {
    assert!(p >= 1);
    let (a, b) = (c.a as u32, c.b as u32);
    (ceil_pow_frac(p, b, a), ceil_pow_frac(p + 1, b, a))
}

/// ψ(t) = {t} − 1/2 ∈ [−1/2, 1/2), with {t} the fractional part.
pub fn frac_part_psi(t: f64) -> f64 {
    assert!(t.is_finite());
    (t - t.floor()) - 0.5
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: u64, b: u64) -> ExactC {
        ExactC::new_relaxed(a, b).unwrap()
    }

    #[test]
    fn floor_pow_of_one_is_one() {
        for cc in [c(21, 20), c(11, 10), c(23, 20)] {
            assert_eq!(floor_pow(1, &cc), 1);
        }
    }

    #[test]
    fn relaxed_mode_square() {
        // c = 2/1 is outside even the relaxed range (open interval)
        assert!(ExactC::new_relaxed(2, 1).is_err());
        // but the generic floor kernel handles integer exponents fine
        assert_eq!(floor_pow_frac(3, 2, 1), 9);
    }

    #[test]
    fn c_equal_one_disallowed() {
        assert!(ExactC::new(1, 1).is_err());
        assert!(ExactC::new_relaxed(1, 1).is_err());
        assert!(ExactC::new_relaxed(5, 5).is_err());
    }

    #[test]
    fn theorem_range_flags() {
        assert!(ExactC::new(21, 20).unwrap().in_theorem_range());
        assert!(ExactC::new(11, 10).unwrap().in_theorem_range());
        assert!(ExactC::new(23, 20).unwrap().in_theorem_range());
        // 3849/3334 itself is excluded, 6/5 = 1.2 is beyond it
        assert!(ExactC::new(3849, 3334).is_err());
        assert!(ExactC::new(6, 5).is_err());
        let relaxed = ExactC::new_relaxed(6, 5).unwrap();
        assert!(!relaxed.in_theorem_range());
    }

    #[test]
    fn parse_rejects_decimals_with_message() {
        let err = ExactC::parse("1.05", false).unwrap_err();
        assert!(matches!(err, ExactMathError::DecimalInput(_)));
        assert!(err.to_string().contains("reduced fraction"));
        assert!(ExactC::parse("21/20", false).is_ok());
        assert!(ExactC::parse("21/0", false).is_err());
        assert!(ExactC::parse("x/y", false).is_err());
    }

    #[test]
    fn parse_reduces() {
        let cc = ExactC::parse("42/40", false).unwrap();
        assert_eq!((cc.numer(), cc.denom()), (21, 20));
        assert_eq!(cc.to_string(), "21/20");
    }

    #[test]
    fn floor_pow_million_frozen() {
        // certified oracle value: m^20 <= (10^6)^21 < (m+1)^20
        assert_eq!(floor_pow(1_000_000, &c(21, 20)), 1_995_262);
    }

    #[test]
    fn floor_pow_certificate_sweep() {
        // every returned m satisfies m^b <= n^a < (m+1)^b, checked exactly
        for cc in [c(21, 20), c(11, 10)] {
            let (a, b) = (cc.numer() as u32, cc.denom() as u32);
            for n in 1..=100_000u64 {
                let m = floor_pow(n, &cc);
                let n_pow = BigUint::from(n).pow(a);
                assert!(BigUint::from(m).pow(b) <= n_pow, "n={} c={}", n, cc);
                assert!(BigUint::from(m + 1).pow(b) > n_pow, "n={} c={}", n, cc);
            }
        }
    }

    #[test]
    fn gamma_interval_example() {
        // p=2, c=21/20, d=1: 2^(20/21)≈1.94, 3^(20/21)≈2.85, so k=2 only
        assert_eq!(count_multiples_in_gamma_interval(2, &c(21, 20), 1), 1);
    }

    #[test]
    fn gamma_interval_empty_for_large_d() {
        // d^2 beyond (p+1)^gamma leaves nothing to count
        assert_eq!(count_multiples_in_gamma_interval(2, &c(21, 20), 100), 0);
    }

    #[test]
    fn gamma_intervals_partition() {
        // summing the d=1 interval counts over p <= [x^c] recovers
        // #{n <= x : any p has [n^c] = p} = x, after clipping at x
        let cc = c(21, 20);
        let x = 500u64;
        let xc = floor_pow(x, &cc);
        let mut total = 0u64;
        for p in 2..=xc {
            let (n0, n1) = gamma_interval(p, &cc);
            let n1 = n1.min(x + 1);
            total += n1.saturating_sub(n0.max(2));
        }
        // n = 1 maps to p = 1 which is excluded above
        assert_eq!(total, x - 1);
    }

    #[test]
    fn gamma_interval_matches_floor_images() {
        let cc = c(21, 20);
        for p in 2..2000u64 {
            let (n0, n1) = gamma_interval(p, &cc);
            let direct: Vec<u64> = (1..5000).filter(|&n| floor_pow(n, &cc) == p).collect();
            let from_interval: Vec<u64> = (n0..n1).collect();
            assert_eq!(direct, from_interval, "p={}", p);
        }
    }

    #[test]
    fn psi_values() {
        assert_eq!(frac_part_psi(0.25), -0.25);
        assert_eq!(frac_part_psi(3.0), -0.5);
        assert_eq!(frac_part_psi(-0.25), 0.25);
    }

    #[test]
    fn psi_periodic_on_grid() {
        for k in 0..10_000 {
            let t = -5.0 + (k as f64) * 1e-3;
            let a = frac_part_psi(t + 1.0);
            let b = frac_part_psi(t);
            assert!((a - b).abs() < 1e-12, "t={}", t);
            assert!((-0.5..0.5).contains(&b));
        }
    }

    #[test]
    #[should_panic(expected = "n >= 1")]
    fn floor_pow_rejects_zero() {
        floor_pow(0, &c(21, 20));
    }
}
