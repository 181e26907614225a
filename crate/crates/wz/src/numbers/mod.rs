//! Exact integers and rationals, plus arbitrary-precision floats with
//! directed error tracking, pi, and square roots of rationals.
//!
//! Everything downstream (polynomials, hypergeometric terms, the solver)
//! works over [`Rat`]; floats appear only at the numerical-verification
//! boundary.

mod bigfloat;
mod pi;
mod transcend;

pub use bigfloat::{decimal_tolerance_log2, BigFloat, Cmp3};
pub use pi::pi_approx;
pub use transcend::{exp, gamma_rat, ln, ln_gamma_rat, pow_rat};

use num_traits::{Signed, Zero};

pub type Int = num_bigint::BigInt;
pub type Rat = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumberError {
    #[error("division by zero denominator")]
    DivisionByZero,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
}

/// Shorthand for a rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(Int::from(num))
}

/// Canonical rational from an integer pair: reduced, positive denominator.
pub fn rational_normalize(num: Int, den: Int) -> Result<Rat, NumberError> {
    if den.is_zero() {
        return Err(NumberError::DivisionByZero);
    }
    Ok(Rat::new(num, den))
}

/// Bits needed to work comfortably at `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    // log2(10) = 3.3219...
    (digits as u64 * 3322 / 1000) as u32 + 64
}

/// An upper bound on log2|r|, or None for r = 0.
pub fn log2_bound_rat(r: &Rat) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let nb = r.numer().abs().bits() as i64;
    let db = r.denom().bits() as i64;
    // |r| < 2^nb / 2^(db-1)
    Some(nb - db + 1)
}

/// sqrt(x) to `digits` decimal digits; |result^2 - x| < 10^-digits.
pub fn sqrt_rational(x: &Rat, digits: u32) -> Result<BigFloat, NumberError> {
    if x.is_negative() {
        return Err(NumberError::DomainError(
            "square root of a negative rational".into(),
        ));
    }
    let prec = digits_to_bits(digits);
    Ok(BigFloat::from_rat(x, prec + 32).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_canonicalizes_sign_and_gcd() {
        let r = rational_normalize(Int::from(6), Int::from(-4)).unwrap();
        assert_eq!(r, rat(-3, 2));
        let z = rational_normalize(Int::from(0), Int::from(7)).unwrap();
        assert_eq!(z, rat(0, 1));
        let i = rational_normalize(Int::from(102), Int::from(2)).unwrap();
        assert_eq!(i, rat(51, 1));
    }

    #[test]
    fn normalize_rejects_zero_denominator() {
        assert_eq!(
            rational_normalize(Int::from(1), Int::from(0)),
            Err(NumberError::DivisionByZero)
        );
    }

    #[test]
    fn sqrt_of_432_over_30_digits() {
        // 432 = c^2 for the 12*sqrt(3)/pi series; sqrt(432) = 12*sqrt(3).
        let v = sqrt_rational(&rat(432, 1), 30).unwrap();
        let sq = v.clone().mul(&v);
        let diff = sq.sub(&BigFloat::from_rat(&rat(432, 1), 200));
        assert!(diff.abs_log2_upper() < -99); // far below 10^-30
        let s = v.to_decimal(12);
        assert!(s.starts_with("20.784609690"), "got {s}");
    }

    #[test]
    fn sqrt_perfect_square_and_zero() {
        let two = sqrt_rational(&rat(4, 1), 10).unwrap();
        assert_eq!(two.to_decimal(6), "2.000000");
        let zero = sqrt_rational(&rat(0, 1), 10).unwrap();
        assert!(zero.is_zero());
        assert!(sqrt_rational(&rat(-1, 1), 10).is_err());
    }
}
