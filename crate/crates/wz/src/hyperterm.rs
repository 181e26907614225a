//! The hypergeometric-term model: z^n * y^k times a product of
//! Pochhammer factors, exact shift quotients via Gamma-class balancing,
//! and the two search prefilters.

use crate::numbers::{
    gamma_rat, pi_approx, pow_rat, rat_int, BigFloat, NumberError, Rat,
};
use crate::polyalg::{Affine, FactoredRational};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    N,
    K,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::N => "n",
            Var::K => "k",
        }
    }
}

/// The geometric base in k: a known rational or the solver unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum YVal {
    Known(Rat),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperError {
    #[error("not hypergeometric in {var}: Gamma class {class} does not balance")]
    NotHypergeometric { var: &'static str, class: String },
    #[error("the geometric base y is unknown where a value is required")]
    UnknownY,
}

/// z^n * y^k * prod (base)_var^exp. Bases never involve their own
/// raising variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperTerm {
    pub z: Rat,
    pub y: YVal,
    factors: BTreeMap<(Var, Affine), i64>,
}

/// A shift quotient; `has_unknown_y` marks a symbolic extra factor y
/// multiplying `ratio` (only for var = k with unknown y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftQuotient {
    pub ratio: FactoredRational,
    pub has_unknown_y: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prefilter {
    Accept,
    Reject(Rat),
}

impl HyperTerm {
    pub fn new(z: Rat, y: YVal) -> Self {
        assert!(!z.is_zero(), "geometric base z must be nonzero");
        HyperTerm { z, y, factors: BTreeMap::new() }
    }

    pub fn push_factor(&mut self, var: Var, base: Affine, exp: i64) {
        let own = match var {
            Var::N => &base.cn,
            Var::K => &base.ck,
        };
        assert!(
            own.is_zero(),
            "Pochhammer base must not involve its raising variable"
        );
        if exp == 0 {
            return;
        }
        let key = (var, base);
        let e = self.factors.entry(key.clone()).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.factors.remove(&key);
        }
    }

    pub fn factors(&self) -> impl Iterator<Item = (&(Var, Affine), &i64)> {
        self.factors.iter()
    }

    pub fn y_known(&self) -> Result<Rat, HyperError> {
        match &self.y {
            YVal::Known(y) => Ok(y.clone()),
            YVal::Unknown => Err(HyperError::UnknownY),
        }
    }

    /// With the unknown y pinned to a concrete value.
    pub fn with_y(&self, y: Rat) -> Self {
        let mut out = self.clone();
        out.y = YVal::Known(y);
        out
    }

    /// B(n+1,k)/B(n,k) * z or B(n,k+1)/B(n,k) * y as an exact factored
    /// rational. Gamma atoms of the shifted and unshifted term are
    /// grouped into integer-difference classes; each class must balance.
    pub fn shift_quotient(&self, var: Var) -> Result<ShiftQuotient, HyperError> {
        let (dn, dk) = match var {
            Var::N => (1, 0),
            Var::K => (0, 1),
        };
        // Net Gamma-atom multiset of the quotient.
        let mut atoms: BTreeMap<Affine, i64> = BTreeMap::new();
        let mut add = |arg: Affine, e: i64| {
            if e == 0 {
                return;
            }
            let cur = atoms.entry(arg.clone()).or_insert(0);
            *cur += e;
            if *cur == 0 {
                atoms.remove(&arg);
            }
        };
        for ((v, base), e) in &self.factors {
            // (base)_v = Gamma(alpha)/Gamma(beta), alpha = base + v.
            let mut alpha = base.clone();
            match v {
                Var::N => alpha.cn += Rat::one(),
                Var::K => alpha.ck += Rat::one(),
            }
            let beta = base.clone();
            add(alpha.shift(dn, dk), *e);
            add(beta.shift(dn, dk), -*e);
            add(alpha, -*e);
            add(beta, *e);
        }
        // Classes: same variable coefficients, constant parts congruent
        // mod 1.
        let mut classes: BTreeMap<(Rat, Rat, Rat), Vec<(Rat, i64)>> = BTreeMap::new();
        for (arg, e) in atoms {
            let frac = &arg.c0 - arg.c0.floor();
            classes
                .entry((arg.cn.clone(), arg.ck.clone(), frac))
                .or_default()
                .push((arg.c0, e));
        }
        let mut ratio = FactoredRational::one();
        for ((cn, ck, _), mut entries) in classes {
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let net: i64 = entries.iter().map(|(_, e)| e).sum();
            if net != 0 {
                let rep = Affine::new(cn.clone(), ck.clone(), entries[0].0.clone());
                return Err(HyperError::NotHypergeometric {
                    var: var.symbol(),
                    class: rep.to_string(),
                });
            }
            // Telescope: Gamma(x+m)/Gamma(x) = x(x+1)...(x+m-1).
            let mut cum = 0i64;
            for w in entries.windows(2) {
                cum += w[0].1;
                let gap = (&w[1].0 - &w[0].0).to_integer();
                let gap = gap.to_i64().expect("gap fits in i64");
                for t in 0..gap {
                    let f = Affine::new(
                        cn.clone(),
                        ck.clone(),
                        &w[0].0 + rat_int(t),
                    );
                    ratio.push(&f, -cum);
                }
            }
        }
        let mut has_unknown_y = false;
        match var {
            Var::N => ratio.scale *= &self.z,
            Var::K => match &self.y {
                YVal::Known(y) => ratio.scale *= y,
                YVal::Unknown => has_unknown_y = true,
            },
        }
        Ok(ShiftQuotient { ratio, has_unknown_y })
    }

    /// The n-raised part z^n * prod_{var=n} (base)_n at integer n and
    /// rational k; None on a vanishing denominator factor.
    pub fn eval_n_part(&self, n: u64, k: &Rat) -> Option<Rat> {
        let mut acc = pow_i(&self.z, n as i64);
        for ((v, base), e) in &self.factors {
            if *v != Var::N {
                continue;
            }
            let b = base.eval(&Rat::zero(), k);
            let p = poch_int(&b, n);
            if p.is_zero() && *e < 0 {
                return None;
            }
            if p.is_zero() {
                return Some(Rat::zero());
            }
            acc *= pow_i(&p, *e);
        }
        Some(acc)
    }

    /// The k-raised part prod_{var=k} (base)_k at integer k (bases
    /// evaluated at the given n); excludes y^k.
    pub fn eval_k_part(&self, n: &Rat, k: u64) -> Option<Rat> {
        let mut acc = Rat::one();
        for ((v, base), e) in &self.factors {
            if *v != Var::K {
                continue;
            }
            let b = base.eval(n, &Rat::zero());
            let p = poch_int(&b, k);
            if p.is_zero() && *e < 0 {
                return None;
            }
            if p.is_zero() {
                return Some(Rat::zero());
            }
            acc *= pow_i(&p, *e);
        }
        Some(acc)
    }

    /// Full term z^n y^k B(n,k) at integer (n,k); requires y known.
    pub fn eval(&self, n: u64, k: u64) -> Result<Option<Rat>, HyperError> {
        let y = self.y_known()?;
        let kr = rat_int(k as i64);
        let nr = rat_int(n as i64);
        let Some(np) = self.eval_n_part(n, &kr) else {
            return Ok(None);
        };
        let Some(kp) = self.eval_k_part(&nr, k) else {
            return Ok(None);
        };
        Ok(Some(np * kp * pow_i(&y, k as i64)))
    }

    /// Reject when the prospective sum over n has a forced pole in k: at
    /// a candidate k* (a denominator n-raised base hitting a non-positive
    /// integer) the net zero-order of the summands is negative.
    pub fn pole_prefilter(&self) -> Prefilter {
        let mut cands: Vec<Rat> = Vec::new();
        for ((v, base), e) in &self.factors {
            if *v != Var::N || *e >= 0 || base.ck.is_zero() {
                continue;
            }
            for m in 0..=12i64 {
                let k_star = -(&base.c0 + rat_int(m)) / &base.ck;
                cands.push(k_star);
            }
        }
        cands.sort_by(|a, b| (a.abs(), a.clone()).cmp(&(b.abs(), b.clone())));
        cands.dedup();
        for k_star in cands {
            let mut ord = 0i64;
            for ((v, base), e) in &self.factors {
                match v {
                    Var::N => {
                        let b = base.eval(&Rat::zero(), &k_star);
                        if is_nonpositive_int(&b) {
                            ord += e;
                        }
                    }
                    Var::K => {
                        // (x)_k = Gamma(x+k)/Gamma(x): a pole of the
                        // numerator Gamma at x + k* in Z<=0.
                        let x = base.eval(&Rat::zero(), &Rat::zero());
                        if is_nonpositive_int(&(&x + &k_star)) {
                            ord -= e;
                        }
                    }
                }
            }
            if ord < 0 {
                return Prefilter::Reject(k_star);
            }
        }
        Prefilter::Accept
    }

    /// Reject when a terminating value of k (a numerator n-raised base
    /// vanishing exactly) leaves a single-summand value whose square
    /// times pi^2 fails bounded-height rationality.
    pub fn terminating_prefilter(
        &self,
        a: &Rat,
        rhs_geom: &Rat,
        precision: u32,
    ) -> Result<Prefilter, NumberError> {
        if !rhs_geom.is_positive() || a.is_zero() {
            return Ok(Prefilter::Accept);
        }
        let mut cands: Vec<Rat> = Vec::new();
        for ((v, base), e) in &self.factors {
            if *v != Var::N || *e <= 0 || base.ck.is_zero() {
                continue;
            }
            cands.push(-&base.c0 / &base.ck);
        }
        cands.sort_by(|a, b| (a.abs(), a.clone()).cmp(&(b.abs(), b.clone())));
        cands.dedup();
        let y_asm = Rat::one() / rhs_geom;
        let digits = precision + 15;
        'cand: for k_star in cands {
            // At k = k*, only n = 0 survives; the value is
            // y^k* D(k*) R(0,k*), with R(0,k*) approximated by a.
            let mut v = BigFloat::from_rat(a, crate::numbers::digits_to_bits(digits));
            for ((var, base), e) in &self.factors {
                if *var != Var::K {
                    continue;
                }
                let x = base.eval(&Rat::zero(), &Rat::zero());
                let xk = &x + &k_star;
                if !x.is_positive() || !xk.is_positive() {
                    // Gamma arguments out of range: borderline, let the
                    // full verification decide.
                    continue 'cand;
                }
                // (x)_k* = Gamma(x + k*) / Gamma(x)
                let g1 = gamma_rat(&xk, digits)?;
                let g0 = gamma_rat(&x, digits)?;
                let f = g1.div(&g0);
                let fe = pow_bigfloat_i(&f, *e);
                v = v.mul(&fe);
            }
            let yk = pow_rat(
                &BigFloat::from_rat(&y_asm, crate::numbers::digits_to_bits(digits)),
                &k_star,
                crate::numbers::digits_to_bits(digits),
            )?;
            v = v.mul(&yk);
            let w = pi_approx(digits).mul(&v).square();
            let tol = pow10_rat(-(precision as i64 - 8));
            if rational_reconstruct(&w.to_rat(), 1_000_000, &tol).is_none() {
                if precision < 25 {
                    return Err(NumberError::InsufficientPrecision(format!(
                        "rationality test indeterminate at {precision} digits"
                    )));
                }
                return Ok(Prefilter::Reject(k_star));
            }
        }
        Ok(Prefilter::Accept)
    }
}

fn is_nonpositive_int(r: &Rat) -> bool {
    r.is_integer() && !r.is_positive()
}

/// (base)(base+1)...(base+len-1), exactly.
pub fn poch_int(base: &Rat, len: u64) -> Rat {
    let mut acc = Rat::one();
    let mut t = base.clone();
    for _ in 0..len {
        acc *= &t;
        t += Rat::one();
    }
    acc
}

pub fn pow_i(base: &Rat, exp: i64) -> Rat {
    let mut acc = Rat::one();
    let b = if exp >= 0 {
        base.clone()
    } else {
        Rat::one() / base
    };
    for _ in 0..exp.unsigned_abs() {
        acc = acc * &b;
    }
    acc
}

fn pow_bigfloat_i(x: &BigFloat, exp: i64) -> BigFloat {
    let prec = x.precision();
    let mut acc = BigFloat::from_int(num_traits::one(), prec);
    for _ in 0..exp.unsigned_abs() {
        acc = acc.mul(x);
    }
    if exp < 0 {
        BigFloat::from_int(num_traits::one(), prec).div(&acc)
    } else {
        acc
    }
}

fn pow10_rat(e: i64) -> Rat {
    let p = crate::numbers::Int::from(10u32).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rat::from_integer(p)
    } else {
        Rat::new(num_traits::one(), p)
    }
}

/// Best rational p/q with q <= den_bound within tol of x, via continued
/// fractions; None when no bounded-height rational is that close.
pub fn rational_reconstruct(x: &Rat, den_bound: u64, tol: &Rat) -> Option<Rat> {
    let bound = crate::numbers::Int::from(den_bound);
    let mut a = x.clone();
    // Convergents p/q of the continued fraction of x.
    let (mut p0, mut q0) = (crate::numbers::Int::from(1), crate::numbers::Int::from(0));
    let (mut p1, mut q1) = (a.floor().to_integer(), crate::numbers::Int::from(1));
    loop {
        let conv = Rat::new(p1.clone(), q1.clone());
        if (x - &conv).abs() <= *tol {
            return Some(conv);
        }
        let f = a.floor();
        let rem = &a - &f;
        if rem.is_zero() {
            return None;
        }
        a = Rat::one() / rem;
        let af = a.floor().to_integer();
        let p2 = &af * &p1 + &p0;
        let q2 = &af * &q1 + &q0;
        if q2 > bound {
            return None;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    fn base(ck: Rat, c0: Rat) -> Affine {
        Affine::new(Rat::zero(), ck, c0)
    }

    fn base_k(c0: Rat) -> Affine {
        Affine::new(Rat::zero(), Rat::zero(), c0)
    }

    /// The worked example's first good term.
    pub fn good1() -> HyperTerm {
        let mut t = HyperTerm::new(rat(-1, 16), YVal::Unknown);
        t.push_factor(Var::N, base(rat(-1, 1), rat(1, 2)), 1);
        t.push_factor(Var::N, base(rat(1, 1), rat(1, 2)), 1);
        t.push_factor(Var::N, base_k(rat(1, 3)), 1);
        t.push_factor(Var::N, base_k(rat(2, 3)), 1);
        t.push_factor(Var::N, base(rat(1, 2), rat(1, 2)), -1);
        t.push_factor(Var::N, base(rat(1, 2), rat(1, 1)), -1);
        t.push_factor(Var::N, base(rat(1, 1), rat(1, 1)), -1);
        t.push_factor(Var::N, base_k(rat(1, 1)), -1);
        t.push_factor(Var::K, base_k(rat(1, 3)), 1);
        t.push_factor(Var::K, base_k(rat(2, 3)), 1);
        t.push_factor(Var::K, base_k(rat(1, 1)), -2);
        t
    }

    /// The worked example's second good term.
    pub fn good2() -> HyperTerm {
        let mut t = HyperTerm::new(rat(-1, 16), YVal::Unknown);
        t.push_factor(Var::N, base_k(rat(1, 2)), 1);
        t.push_factor(Var::N, base(rat(2, 1), rat(1, 2)), 1);
        t.push_factor(Var::N, base(rat(1, 1), rat(1, 3)), 1);
        t.push_factor(Var::N, base(rat(1, 1), rat(2, 3)), 1);
        t.push_factor(Var::N, base(rat(1, 2), rat(1, 2)), -1);
        t.push_factor(Var::N, base(rat(1, 2), rat(1, 1)), -1);
        t.push_factor(Var::N, base(rat(1, 1), rat(1, 1)), -1);
        t.push_factor(Var::N, base_k(rat(1, 1)), -1);
        t.push_factor(Var::K, base_k(rat(1, 4)), 1);
        t.push_factor(Var::K, base_k(rat(3, 4)), 1);
        t.push_factor(Var::K, base_k(rat(1, 1)), -2);
        t
    }

    fn aff(cn: i64, ck: i64, c0: i64) -> Affine {
        Affine::new(rat_int(cn), rat_int(ck), rat_int(c0))
    }

    #[test]
    fn trivial_single_factor_quotient() {
        let mut t = HyperTerm::new(rat(1, 1), YVal::Known(rat(1, 1)));
        t.push_factor(Var::N, base_k(rat(1, 2)), 1);
        t.push_factor(Var::N, base_k(rat(1, 1)), -1);
        let q = t.shift_quotient(Var::N).unwrap();
        let mut expect = FactoredRational::from_scale(rat(1, 2));
        expect.push(&aff(2, 0, 1), 1);
        expect.push(&aff(1, 0, 1), -1);
        assert_eq!(q.ratio, expect);
        assert!(!q.has_unknown_y);
    }

    #[test]
    fn n_quotient_matches_worked_example() {
        let q = good1().shift_quotient(Var::N).unwrap();
        let mut expect = FactoredRational::from_scale(rat(-1, 144));
        expect.push(&aff(2, -2, 1), 1);
        expect.push(&aff(2, 2, 1), 1);
        expect.push(&aff(3, 0, 1), 1);
        expect.push(&aff(3, 0, 2), 1);
        expect.push(&aff(2, 1, 1), -1);
        expect.push(&aff(2, 1, 2), -1);
        expect.push(&aff(1, 1, 1), -1);
        expect.push(&aff(1, 0, 1), -1);
        assert_eq!(q.ratio, expect);
        assert!(!q.has_unknown_y);
    }

    #[test]
    fn k_quotient_matches_worked_example() {
        // The half-integer k-coefficient denominators pair across
        // integer classes here.
        let q = good1().shift_quotient(Var::K).unwrap();
        let mut expect = FactoredRational::from_scale(rat(-1, 9));
        expect.push(&aff(2, 2, 1), 1);
        expect.push(&aff(0, 3, 1), 1);
        expect.push(&aff(0, 3, 2), 1);
        expect.push(&aff(2, -2, -1), -1);
        expect.push(&aff(2, 1, 1), -1);
        expect.push(&aff(1, 1, 1), -1);
        assert_eq!(q.ratio, expect);
        assert!(q.has_unknown_y);
    }

    #[test]
    fn quotient_agrees_with_direct_pochhammer_ratio() {
        for term in [good1().with_y(rat(1, 1)), good2().with_y(rat(1, 1))] {
            let qn = term.shift_quotient(Var::N).unwrap().ratio;
            let qk = term.shift_quotient(Var::K).unwrap().ratio;
            for (n, k) in [(0u64, 0u64), (1, 0), (2, 3), (5, 1), (4, 4)] {
                let b0 = term.eval(n, k).unwrap().unwrap();
                let b_n1 = term.eval(n + 1, k).unwrap().unwrap();
                let b_k1 = term.eval(n, k + 1).unwrap().unwrap();
                let nr = rat_int(n as i64);
                let kr = rat_int(k as i64);
                assert_eq!(&b_n1 / &b0, qn.eval(&nr, &kr).unwrap());
                assert_eq!(&b_k1 / &b0, qk.eval(&nr, &kr).unwrap());
            }
        }
    }

    #[test]
    fn unpaired_half_class_is_not_hypergeometric() {
        let mut t = HyperTerm::new(rat(1, 1), YVal::Known(rat(1, 1)));
        t.push_factor(Var::N, base(rat(1, 2), rat(1, 2)), -1);
        t.push_factor(Var::N, base_k(rat(1, 1)), 1);
        let err = t.shift_quotient(Var::K).unwrap_err();
        assert!(matches!(err, HyperError::NotHypergeometric { var: "k", .. }));
        // The n-quotient is still fine.
        assert!(t.shift_quotient(Var::N).is_ok());
    }

    #[test]
    fn pole_prefilter_rejects_forced_pole() {
        // (1/2-k)_n (1/3)_n (2/3)_n / ((1)_n (1+k)_n (1+2k)_n) times
        // (1/3)_k (2/3)_k / (1)_k^2: pole forced at k = -1/2.
        let mut t = HyperTerm::new(rat(-1, 16), YVal::Unknown);
        t.push_factor(Var::N, base(rat(-1, 1), rat(1, 2)), 1);
        t.push_factor(Var::N, base_k(rat(1, 3)), 1);
        t.push_factor(Var::N, base_k(rat(2, 3)), 1);
        t.push_factor(Var::N, base_k(rat(1, 1)), -1);
        t.push_factor(Var::N, base(rat(1, 1), rat(1, 1)), -1);
        t.push_factor(Var::N, base(rat(2, 1), rat(1, 1)), -1);
        t.push_factor(Var::K, base_k(rat(1, 3)), 1);
        t.push_factor(Var::K, base_k(rat(2, 3)), 1);
        t.push_factor(Var::K, base_k(rat(1, 1)), -2);
        assert_eq!(t.pole_prefilter(), Prefilter::Reject(rat(-1, 2)));
    }

    #[test]
    fn pole_prefilter_accepts_good_terms() {
        assert_eq!(good1().pole_prefilter(), Prefilter::Accept);
        assert_eq!(good2().pole_prefilter(), Prefilter::Accept);
    }

    #[test]
    fn terminating_prefilter_rejects_irrational_value() {
        // (1/2)_n (1/2+k)_n (1/2-5k)_n / ((1)_n (1+k)_n^2) times
        // (1/2)_k^2 / (1)_k^2: at k = 1/10 only n = 0 survives.
        let mut t = HyperTerm::new(rat(-9, 16), YVal::Unknown);
        t.push_factor(Var::N, base_k(rat(1, 2)), 1);
        t.push_factor(Var::N, base(rat(1, 1), rat(1, 2)), 1);
        t.push_factor(Var::N, base(rat(-5, 1), rat(1, 2)), 1);
        t.push_factor(Var::N, base_k(rat(1, 1)), -1);
        t.push_factor(Var::N, base(rat(1, 1), rat(1, 1)), -2);
        t.push_factor(Var::K, base_k(rat(1, 2)), 2);
        t.push_factor(Var::K, base_k(rat(1, 1)), -2);
        let r = t.terminating_prefilter(&rat(5, 1), &rat(4, 1), 40).unwrap();
        assert_eq!(r, Prefilter::Reject(rat(1, 10)));
    }

    #[test]
    fn terminating_prefilter_accepts_good_term() {
        let r = good1()
            .terminating_prefilter(&rat(7, 1), &rat(1, 1), 40)
            .unwrap();
        assert_eq!(r, Prefilter::Accept);
    }

    #[test]
    fn terminating_prefilter_vacuous_accept() {
        let mut t = HyperTerm::new(rat(1, 4), YVal::Known(rat(1, 1)));
        t.push_factor(Var::N, base_k(rat(1, 2)), 3);
        t.push_factor(Var::N, base_k(rat(1, 1)), -3);
        let r = t.terminating_prefilter(&rat(1, 1), &rat(1, 1), 40).unwrap();
        assert_eq!(r, Prefilter::Accept);
    }

    #[test]
    fn rational_reconstruct_bounds() {
        let close = rat(22, 7) + Rat::new(1.into(), crate::numbers::Int::from(10u64).pow(20));
        let tol = Rat::new(1.into(), crate::numbers::Int::from(10u64).pow(12));
        assert_eq!(rational_reconstruct(&close, 1000, &tol), Some(rat(22, 7)));
        // pi to many digits has no small-denominator representative.
        let pi = crate::numbers::pi_approx(40).to_rat();
        assert_eq!(rational_reconstruct(&pi, 1_000_000, &tol), None);
    }
}
