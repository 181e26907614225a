//! Binary-mantissa arbitrary-precision floats with per-operation error
//! accounting.
//!
//! A value is `mant * 2^exp` together with a certified absolute error
//! bound `2^err` (None = exact so far). Every operation rounds back to
//! the working precision and widens the bound accordingly, so a final
//! comparison can report less / greater / indistinguishable honestly.

use super::{Int, Rat};
use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp3 {
    Less,
    Greater,
    Indistinguishable,
}

#[derive(Debug, Clone)]
pub struct BigFloat {
    mant: Int,
    exp: i64,
    prec: u32,
    /// |true value - represented value| <= 2^err.
    err: Option<f64>,
}

/// log2(2^a + 2^b), exact enough that long accumulation loops do not
/// inflate bounds by a whole bit per step.
fn log2_sum(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    let d = hi - lo;
    if d > 64.0 {
        hi
    } else {
        hi + (1.0 + (-d).exp2()).log2()
    }
}

fn combine_err(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x),
        (Some(x), Some(y)) => Some(log2_sum(x, y)),
    }
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat { mant: Int::zero(), exp: 0, prec, err: None }
    }

    pub fn from_int(i: Int, prec: u32) -> Self {
        BigFloat { mant: i, exp: 0, prec, err: None }.rounded()
    }

    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        if r.is_zero() {
            return Self::zero(prec);
        }
        let nbits = r.numer().abs().bits() as i64;
        let dbits = r.denom().bits() as i64;
        // Scale so the quotient has ~prec+8 bits.
        let shift = (prec as i64 + 8) - (nbits - dbits);
        let shift = shift.max(0);
        let scaled = r.numer() << shift as usize;
        let (q, rem) = scaled.div_rem(r.denom());
        let err = if rem.is_zero() { None } else { Some(-shift as f64) };
        BigFloat { mant: q, exp: -shift, prec, err }.rounded()
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Upper bound on log2|value| (i64::MIN for zero).
    pub fn mag2(&self) -> i64 {
        if self.mant.is_zero() {
            return i64::MIN / 2;
        }
        self.exp + self.mant.abs().bits() as i64
    }

    /// Upper bound on log2(|value| + error).
    pub fn abs_log2_upper(&self) -> i64 {
        let m = self.mag2();
        match self.err {
            None => m,
            Some(e) => log2_sum(m as f64, e).ceil() as i64,
        }
    }

    /// Certified error bound as a log2 exponent (None = exact).
    pub fn err_log2(&self) -> Option<f64> {
        self.err
    }

    /// Widen the error bound by an extra absolute term <= 2^extra_log2.
    pub fn widen_err(mut self, extra_log2: f64) -> Self {
        self.err = combine_err(self.err, Some(extra_log2));
        self
    }

    /// The represented (rounded) value as an exact rational.
    pub fn to_rat(&self) -> Rat {
        if self.exp >= 0 {
            Rat::from_integer(&self.mant << self.exp as usize)
        } else {
            Rat::new(self.mant.clone(), Int::from(1) << (-self.exp) as usize)
        }
    }

    fn rounded(mut self) -> Self {
        let bits = self.mant.abs().bits() as i64;
        let excess = bits - self.prec as i64;
        if excess > 0 {
            let half = Int::from(1) << (excess - 1) as usize;
            let adj = if self.mant.is_negative() { -half } else { half };
            self.mant = (self.mant + adj) >> excess as usize;
            self.exp += excess;
            // Rounding to nearest adds at most half an ulp.
            self.err = combine_err(self.err, Some((self.exp - 1) as f64));
        }
        self
    }

    pub fn neg(mut self) -> Self {
        self.mant = -self.mant;
        self
    }

    pub fn abs(mut self) -> Self {
        self.mant = self.mant.abs();
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        let lo = self.exp.min(other.exp);
        // Cap alignment cost: if one operand is negligible, skip the shift.
        let hi_mag = self.mag2().max(other.mag2());
        let lo_eff = lo.max(hi_mag - prec as i64 - 8);
        let a = shift_to(&self.mant, self.exp, lo_eff);
        let b = shift_to(&other.mant, other.exp, lo_eff);
        let trunc_err = if lo_eff > lo { Some((lo_eff + 1) as f64) } else { None };
        let err = combine_err(combine_err(self.err, other.err), trunc_err);
        BigFloat { mant: a + b, exp: lo_eff, prec, err }.rounded()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.clone().neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        let err = match (self.err, other.err) {
            (None, None) => None,
            _ => {
                // |d(ab)| <= |a||db| + |b||da| + |da||db|
                let ea = self.err.unwrap_or(f64::NEG_INFINITY);
                let eb = other.err.unwrap_or(f64::NEG_INFINITY);
                let t1 = self.mag2() as f64 + eb;
                let t2 = other.mag2() as f64 + ea;
                let t3 = ea + eb;
                Some(log2_sum(log2_sum(t1, t2), t3))
            }
        };
        BigFloat {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
            prec,
            err,
        }
        .rounded()
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.mant.is_zero(), "BigFloat division by zero");
        let prec = self.prec.max(other.prec);
        let shift = prec as i64 + 8 + (other.mant.abs().bits() as i64)
            - (self.mant.abs().bits() as i64).max(1);
        let shift = shift.max(0);
        let num = &self.mant << shift as usize;
        let (q, rem) = num.div_rem(&other.mant);
        let exp = self.exp - other.exp - shift;
        // Lower bound on log2|other|.
        let ob_lo = other.exp + other.mant.abs().bits() as i64 - 1;
        let err = {
            let quo_err = if rem.is_zero() { None } else { Some(exp as f64) };
            let prop = match (self.err, other.err) {
                (None, None) => None,
                _ => {
                    let ea = self.err.unwrap_or(f64::NEG_INFINITY);
                    let eb = other.err.unwrap_or(f64::NEG_INFINITY);
                    // |d(a/b)| <= (|da| + |a/b||db|) / (|b| - |db|)
                    let q_mag = (self.mag2() - ob_lo + 1) as f64;
                    let t1 = ea - ob_lo as f64 + 1.0;
                    let t2 = q_mag + eb - ob_lo as f64 + 1.0;
                    Some(log2_sum(t1, t2))
                }
            };
            combine_err(quo_err, prop)
        };
        BigFloat { mant: q, exp, prec, err }.rounded()
    }

    pub fn mul_rat(&self, r: &Rat) -> Self {
        self.mul(&BigFloat::from_rat(r, self.prec + 8))
    }

    /// Floor square root with error tracking; requires a non-negative value.
    pub fn sqrt(&self) -> Self {
        assert!(!self.mant.is_negative(), "sqrt of negative BigFloat");
        if self.mant.is_zero() {
            // sqrt(0 +- 2^e) <= 2^(e/2)
            let mut out = Self::zero(self.prec);
            out.err = self.err.map(|e| e / 2.0 + 1.0);
            return out;
        }
        let prec = self.prec;
        // Make exponent even and mantissa wide enough.
        let mut shift = 2 * (prec as i64 + 8);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as usize;
        let root = num_integer::Roots::sqrt(&m);
        let exp = (self.exp - shift) / 2;
        // Floor-sqrt error <= 1 ulp; propagated input error:
        // |d sqrt(x)| <= |dx| / (2 sqrt(x_lo)).
        let half_mag = self.mag2() / 2;
        let prop = self.err.map(|e| e - (half_mag - 1) as f64);
        let err = combine_err(Some(exp as f64), prop);
        BigFloat { mant: root, exp, prec, err }.rounded()
    }

    /// Three-valued comparison at tolerance |tol| (tol as log2 exponent).
    pub fn cmp3(&self, other: &Self, tol_log2: i64) -> Cmp3 {
        let diff = self.sub(other);
        let slack = match diff.err {
            None => tol_log2 as f64,
            Some(e) => log2_sum(e, tol_log2 as f64),
        };
        if (diff.mag2() as f64) <= slack {
            return Cmp3::Indistinguishable;
        }
        if diff.is_negative() {
            Cmp3::Less
        } else {
            Cmp3::Greater
        }
    }

    /// Decimal rendering with `digits` fractional digits (truncated).
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = self.to_rat() * Rat::from_integer(Int::from(10).pow(digits));
        let int = scaled.to_integer();
        let neg = int.is_negative();
        let abs = int.abs();
        let s = abs.to_string();
        let s = if s.len() <= digits as usize {
            format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s)
        } else {
            s
        };
        let (ip, fp) = s.split_at(s.len() - digits as usize);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{ip}")
        } else {
            format!("{sign}{ip}.{fp}")
        }
    }

    /// True if the certified error bound is below 10^-digits.
    pub fn error_below_decimal(&self, digits: u32) -> bool {
        match self.err {
            None => true,
            Some(e) => e < -(digits as f64) * std::f64::consts::LOG2_10,
        }
    }
}

fn shift_to(mant: &Int, exp: i64, target: i64) -> Int {
    if exp >= target {
        mant << (exp - target) as usize
    } else {
        mant >> (target - exp) as usize
    }
}

/// log2 of 10^-digits, rounded down (a tolerance exponent).
pub fn decimal_tolerance_log2(digits: u32) -> i64 {
    -((digits as f64 * std::f64::consts::LOG2_10).ceil() as i64)
}

impl std::fmt::Display for BigFloat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let digits = (self.prec as f64 / std::f64::consts::LOG2_10) as u32;
        write!(f, "{}", self.to_decimal(digits.min(50)))
    }
}

#[allow(unused)]
fn _bits_to_f64(x: &Int) -> f64 {
    x.to_f64().unwrap_or(f64::MAX)
}

#[cfg(test)]
mod tests {
    use super::super::rat;
    use super::*;

    #[test]
    fn rational_roundtrip_and_error() {
        let x = BigFloat::from_rat(&rat(1, 3), 128);
        let back = x.to_rat();
        let diff = (back - rat(1, 3)).abs();
        assert!(diff < rat(1, 1) / Rat::from_integer(Int::from(1) << 120));
        assert!(x.err_log2().unwrap() < -120.0);
    }

    #[test]
    fn arithmetic_tracks_error() {
        let a = BigFloat::from_rat(&rat(22, 7), 96);
        let b = BigFloat::from_rat(&rat(-3, 11), 96);
        let s = a.add(&b).mul(&a).div(&b).sqrt_checked();
        assert!(s.is_none()); // negative; sanity of sign handling
        let c = a.mul(&b).abs();
        assert!(c.err_log2().unwrap() < -80.0);
    }

    #[test]
    fn double_precision_agrees_within_reported_bound() {
        // Recomputing at double precision stays within the coarse bound.
        let compute = |prec: u32| {
            let a = BigFloat::from_rat(&rat(355, 113), prec);
            let b = BigFloat::from_rat(&rat(1, 99991), prec);
            a.div(&b).sqrt().mul(&a).sub(&b)
        };
        let lo = compute(80);
        let hi = compute(160);
        let diff = lo.sub(&hi);
        assert!((diff.mag2() as f64) <= lo.err_log2().unwrap() + 2.0);
    }

    #[test]
    fn cmp3_three_valued() {
        let a = BigFloat::from_rat(&rat(1, 1), 64);
        let b = BigFloat::from_rat(&(rat(1, 1) + rat(1, 1_000_000)), 64);
        assert_eq!(a.cmp3(&b, -100), Cmp3::Less);
        assert_eq!(b.cmp3(&a, -100), Cmp3::Greater);
        assert_eq!(a.cmp3(&b, -10), Cmp3::Indistinguishable);
    }

    impl BigFloat {
        fn sqrt_checked(&self) -> Option<BigFloat> {
            if self.is_negative() {
                None
            } else {
                Some(self.sqrt())
            }
        }
    }
}
