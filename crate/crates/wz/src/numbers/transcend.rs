//! exp, ln, rational powers, and log-gamma at positive rational
//! arguments. Used only by the terminating-series prefilter, which needs
//! Pochhammer values at rational (non-integer) lengths.

use super::{digits_to_bits, pi::pi_bits, BigFloat, Int, NumberError, Rat};
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

/// ln 2 = sum 1/(n 2^n), in fixed point.
fn ln2_bits(prec: u32) -> BigFloat {
    let guard = prec + 16;
    let mut acc = Int::zero();
    let mut n: u64 = 1;
    loop {
        let term = (Int::from(1) << guard as usize) / (Int::from(n) << n.min(guard as u64 + 1) as usize);
        if term.is_zero() {
            break;
        }
        acc += term;
        n += 1;
    }
    BigFloat::from_rat(
        &Rat::new(acc, Int::from(1) << guard as usize),
        prec,
    )
    .widen_err(-(prec as f64))
}

/// e^x with tracked error.
pub fn exp(x: &BigFloat, prec: u32) -> BigFloat {
    let wp = prec + 32;
    let ln2 = ln2_bits(wp);
    // x = m ln2 + r, |r| <= ln2/2
    let m_f = x.div(&ln2).to_rat();
    let m = m_f.round().to_integer();
    let r = x.sub(&ln2.mul(&BigFloat::from_int(m.clone(), wp)));
    // Reduce further: r / 2^s, then square s times.
    let s: u32 = 16;
    let rs = r.mul_rat(&Rat::new(Int::one(), Int::from(1) << s as usize));
    // Taylor for e^t, |t| < 2^-15.
    let mut term = BigFloat::from_int(Int::one(), wp);
    let mut acc = term.clone();
    let mut i: u64 = 1;
    loop {
        term = term.mul(&rs).mul_rat(&Rat::new(Int::one(), Int::from(i)));
        if term.mag2() < -(wp as i64) - 8 {
            break;
        }
        acc = acc.add(&term);
        i += 1;
    }
    acc = acc.widen_err(-(wp as f64) - 4.0);
    for _ in 0..s {
        acc = acc.square();
    }
    // Multiply by 2^m.
    let m_i: i64 = num_traits::ToPrimitive::to_i64(&m).expect("exp argument out of range");
    let two_m = if m_i >= 0 {
        Rat::from_integer(Int::from(1) << m_i as usize)
    } else {
        Rat::new(Int::one(), Int::from(1) << (-m_i) as usize)
    };
    acc.mul_rat(&two_m)
}

/// ln x for x > 0, with tracked error.
pub fn ln(x: &BigFloat, prec: u32) -> Result<BigFloat, NumberError> {
    if x.is_zero() || x.is_negative() {
        return Err(NumberError::DomainError("ln of non-positive value".into()));
    }
    let wp = prec + 32;
    // Normalize to m in [1, 2): x = m * 2^e.
    let e = x.mag2() - 1; // |x| in [2^e, 2^(e+1))
    let m = x.mul_rat(&if e >= 0 {
        Rat::new(Int::one(), Int::from(1) << e as usize)
    } else {
        Rat::from_integer(Int::from(1) << (-e) as usize)
    });
    // atanh series: ln m = 2 atanh((m-1)/(m+1)), t <= 1/3.
    let one = BigFloat::from_int(Int::one(), wp);
    let t = m.sub(&one).div(&m.add(&one));
    let t2 = t.square();
    let mut term = t.clone();
    let mut acc = t;
    let mut i: u64 = 1;
    loop {
        term = term.mul(&t2);
        let contrib = term.mul_rat(&Rat::new(Int::one(), Int::from(2 * i + 1)));
        if contrib.mag2() < -(wp as i64) - 8 {
            break;
        }
        acc = acc.add(&contrib);
        i += 1;
    }
    let ln_m = acc.mul_rat(&Rat::from_integer(Int::from(2))).widen_err(-(wp as f64) - 4.0);
    let ln2 = ln2_bits(wp);
    Ok(ln_m.add(&ln2.mul(&BigFloat::from_int(Int::from(e), wp))))
}

/// x^(p/q) for x > 0, via exp((p/q) ln x).
pub fn pow_rat(x: &BigFloat, power: &Rat, prec: u32) -> Result<BigFloat, NumberError> {
    if power.is_zero() {
        return Ok(BigFloat::from_int(Int::one(), prec));
    }
    let l = ln(x, prec + 16)?;
    Ok(exp(&l.mul_rat(power), prec))
}

/// Bernoulli numbers B_0..B_n (even indices carry the content).
static BERNOULLI: Lazy<Vec<Rat>> = Lazy::new(|| {
    let n = 120usize;
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
        let mut acc = Rat::zero();
        let mut binom = Int::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate().take(m) {
            acc += Rat::from_integer(binom.clone()) * bj;
            binom = &binom * Int::from(m as i64 + 1 - j as i64) / Int::from(j as i64 + 1);
        }
        if m == 0 {
            b.push(Rat::one());
        } else {
            b.push(-acc / Rat::from_integer(Int::from(m as i64 + 1)));
        }
    }
    b
});

/// ln Gamma(x) for rational x > 0: shift up then Stirling's series.
pub fn ln_gamma_rat(x: &Rat, digits: u32) -> Result<BigFloat, NumberError> {
    if !x.is_positive() {
        return Err(NumberError::DomainError(
            "ln_gamma requires a positive argument".into(),
        ));
    }
    let prec = digits_to_bits(digits) + 32;
    // Shift so the Stirling argument is comfortably large.
    let target = Rat::from_integer(Int::from((digits as i64).max(20) * 2));
    let mut shift: u64 = 0;
    let mut z = x.clone();
    while z < target {
        z += Rat::one();
        shift += 1;
    }
    // ln Gamma(x) = ln Gamma(z) - ln((x)_shift)
    let zf = BigFloat::from_rat(&z, prec);
    let ln_z = ln(&zf, prec)?;
    let half = Rat::new(Int::one(), Int::from(2));
    let mut acc = ln_z.mul(&BigFloat::from_rat(&(z.clone() - &half), prec));
    acc = acc.sub(&zf);
    // + ln(2 pi)/2
    let two_pi = pi_bits(prec).mul_rat(&Rat::from_integer(Int::from(2)));
    acc = acc.add(&ln(&two_pi, prec)?.mul_rat(&half));
    // + sum B_2m / (2m(2m-1) z^(2m-1))
    let z_inv = BigFloat::from_int(Int::one(), prec).div(&zf);
    let z_inv2 = z_inv.square();
    let mut zpow = z_inv.clone();
    let mut m = 1usize;
    loop {
        let b2m = &BERNOULLI[2 * m];
        let coeff = b2m / Rat::from_integer(Int::from((2 * m * (2 * m - 1)) as i64));
        let term = zpow.mul_rat(&coeff);
        if term.mag2() < -(prec as i64) || 2 * m + 2 >= BERNOULLI.len() {
            // Stirling is asymptotic: the truncation error is below the
            // first omitted term, which the loop guard just bounded.
            acc = acc.widen_err((term.mag2().max(-(prec as i64)) + 1) as f64);
            break;
        }
        acc = acc.add(&term);
        zpow = zpow.mul(&z_inv2);
        m += 1;
    }
    // Subtract ln of the exact rational rising factorial (x)_shift.
    if shift > 0 {
        let mut poch = Rat::one();
        let mut t = x.clone();
        for _ in 0..shift {
            poch *= &t;
            t += Rat::one();
        }
        acc = acc.sub(&ln(&BigFloat::from_rat(&poch, prec), prec)?);
    }
    Ok(acc)
}

/// Gamma(x) for rational x > 0.
pub fn gamma_rat(x: &Rat, digits: u32) -> Result<BigFloat, NumberError> {
    let lg = ln_gamma_rat(x, digits + 8)?;
    Ok(exp(&lg, digits_to_bits(digits) + 16))
}

#[cfg(test)]
mod tests {
    use super::super::rat;
    use super::*;

    fn close(a: &BigFloat, reference: &str, digits: u32) {
        let s = a.to_decimal(digits);
        assert!(
            s.starts_with(reference),
            "expected prefix {reference}, got {s}"
        );
    }

    #[test]
    fn exp_and_ln_roundtrip() {
        let prec = 200;
        let x = BigFloat::from_rat(&rat(7, 3), prec);
        let y = exp(&ln(&x, prec).unwrap(), prec);
        let diff = y.sub(&x).abs();
        assert!(diff.mag2() < -150, "mag {}", diff.mag2());
    }

    #[test]
    fn exp_one() {
        let e = exp(&BigFloat::from_rat(&rat(1, 1), 220), 220);
        close(&e, "2.718281828459045235360287471352662497757247093", 45);
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let g = gamma_rat(&rat(1, 2), 40).unwrap();
        // sqrt(pi) = 1.77245385090551602729816748334...
        close(&g, "1.7724538509055160272981674", 25);
    }

    #[test]
    fn gamma_small_integers() {
        let g5 = gamma_rat(&rat(5, 1), 30).unwrap();
        close(&g5, "24.0000000000", 10);
        let g1 = gamma_rat(&rat(1, 1), 30).unwrap();
        close(&g1, "1.0000000000", 10);
        // Or just below one: Gamma(0.99999...) ~ 1
    }

    #[test]
    fn gamma_third() {
        let g = gamma_rat(&rat(1, 3), 40).unwrap();
        close(&g, "2.6789385347077476336556929", 25);
    }
}
