//! pi by Machin-type arctangent series in integer fixed point, with a
//! second independent formula as a cross-check oracle.

use super::{digits_to_bits, BigFloat, Int};
use num_traits::{Signed, Zero};

/// floor(atan(1/x) * 2^prec), accurate to a few ulp.
fn atan_inv_fixed(x: u64, prec: u32) -> Int {
    let x2 = Int::from(x) * Int::from(x);
    let mut power = (Int::from(1) << prec as usize) / Int::from(x);
    let mut acc = Int::zero();
    let mut i: u64 = 0;
    while !power.is_zero() {
        let term = &power / Int::from(2 * i + 1);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        power /= &x2;
        i += 1;
    }
    acc
}

fn pi_fixed_machin(prec: u32) -> Int {
    // pi = 16 atan(1/5) - 4 atan(1/239)
    atan_inv_fixed(5, prec) * 16 - atan_inv_fixed(239, prec) * 4
}

fn pi_fixed_euler(prec: u32) -> Int {
    // pi = 4 atan(1/2) + 4 atan(1/3)
    (atan_inv_fixed(2, prec) + atan_inv_fixed(3, prec)) * 4
}

/// pi at `prec` bits with both series cross-checked against each other.
pub fn pi_bits(prec: u32) -> BigFloat {
    let guard = prec + 32;
    let a = pi_fixed_machin(guard);
    let b = pi_fixed_euler(guard);
    let diff = (&a - &b).abs();
    // Each series is good to a few ulp at the guard precision; if the two
    // disagree beyond that, something is broken beyond repair.
    assert!(
        diff < Int::from(1_000_000),
        "independent pi series disagree: {diff} ulp at {guard} bits"
    );
    BigFloat::from_int(a, prec).mul(&BigFloat::from_rat(
        &super::Rat::new(Int::from(1), Int::from(1) << guard as usize),
        prec,
    ))
    .widen_err(-(prec as f64))
}

/// pi with |result - pi| < 10^-digits.
pub fn pi_approx(digits: u32) -> BigFloat {
    assert!(digits >= 1);
    pi_bits(digits_to_bits(digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI_50: &str = "3.14159265358979323846264338327950288419716939937510";

    #[test]
    fn ten_digits() {
        let p = pi_approx(10);
        assert!(p.to_decimal(9).starts_with("3.141592653"));
    }

    #[test]
    fn one_digit() {
        let p = pi_approx(1);
        assert!(p.to_decimal(1).starts_with("3.1"));
    }

    #[test]
    fn fifty_digits_vs_reference() {
        let p = pi_approx(50);
        let s = p.to_decimal(50);
        // The two internal series already cross-checked; also pin against a
        // hard-coded reference to 48 digits (last digits may truncate).
        assert_eq!(&s[..48], &PI_50[..48]);
    }

    #[test]
    fn adjacent_precisions_agree() {
        let a = pi_approx(30);
        let b = pi_approx(40);
        let diff = a.sub(&b).abs();
        assert!(diff.mag2() < -(30.0 * std::f64::consts::LOG2_10) as i64);
    }
}
