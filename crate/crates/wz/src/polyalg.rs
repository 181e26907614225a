//! Exact algebra in the two shift variables: affine forms, bivariate
//! polynomials over Q, factored rational functions, and linear
//! expressions in named unknowns for the ansatz solver.

use crate::numbers::{rat_int, Int, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// c0 + cn*n + ck*k.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affine {
    pub cn: Rat,
    pub ck: Rat,
    pub c0: Rat,
}

impl Affine {
    pub fn new(cn: Rat, ck: Rat, c0: Rat) -> Self {
        Affine { cn, ck, c0 }
    }

    pub fn constant(c0: Rat) -> Self {
        Affine { cn: Rat::zero(), ck: Rat::zero(), c0 }
    }

    pub fn is_constant(&self) -> bool {
        self.cn.is_zero() && self.ck.is_zero()
    }

    pub fn eval(&self, n: &Rat, k: &Rat) -> Rat {
        &self.cn * n + &self.ck * k + &self.c0
    }

    /// Substitute n -> n + dn, k -> k + dk (shifts only move c0).
    pub fn shift(&self, dn: i64, dk: i64) -> Self {
        Affine {
            cn: self.cn.clone(),
            ck: self.ck.clone(),
            c0: &self.c0 + &self.cn * rat_int(dn) + &self.ck * rat_int(dk),
        }
    }

    /// Primitive integer-coefficient representative with the first
    /// nonzero coefficient (in cn, ck, c0 order) positive; returns
    /// (primitive, scale) with self = scale * primitive.
    pub fn primitive(&self) -> (Affine, Rat) {
        let lead = if !self.cn.is_zero() {
            self.cn.clone()
        } else if !self.ck.is_zero() {
            self.ck.clone()
        } else {
            self.c0.clone()
        };
        if lead.is_zero() {
            return (Affine::constant(Rat::zero()), Rat::one());
        }
        // Common rational content: gcd of numerators over lcm of denominators.
        let mut num_gcd = num_integer::gcd(
            self.cn.numer().clone(),
            num_integer::gcd(self.ck.numer().clone(), self.c0.numer().clone()),
        );
        if num_gcd.is_zero() {
            num_gcd = num_traits::one();
        }
        let den_lcm = num_integer::lcm(
            self.cn.denom().clone(),
            num_integer::lcm(self.ck.denom().clone(), self.c0.denom().clone()),
        );
        let mut scale = Rat::new(num_gcd, den_lcm);
        if lead.is_negative() {
            scale = -scale;
        }
        let prim = Affine {
            cn: &self.cn / &scale,
            ck: &self.ck / &scale,
            c0: &self.c0 / &scale,
        };
        (prim, scale)
    }

    pub fn to_poly(&self) -> Poly2 {
        let mut p = Poly2::zero();
        p.set(1, 0, self.cn.clone());
        p.set(0, 1, self.ck.clone());
        p.set(0, 0, self.c0.clone());
        p
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (c, sym) in [(&self.cn, "n"), (&self.ck, "k")] {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(sym.to_string());
            } else if (-c.clone()).is_one() {
                parts.push(format!("-{sym}"));
            } else {
                parts.push(format!("{c}*{sym}"));
            }
        }
        if !self.c0.is_zero() || parts.is_empty() {
            parts.push(self.c0.to_string());
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

/// Polynomial in n and k over Q; keys are (deg_n, deg_k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly2::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly2::zero();
        p.set(0, 0, c);
        p
    }

    pub fn var_n() -> Self {
        let mut p = Poly2::zero();
        p.set(1, 0, Rat::one());
        p
    }

    pub fn var_k() -> Self {
        let mut p = Poly2::zero();
        p.set(0, 1, Rat::one());
        p
    }

    pub fn set(&mut self, dn: u32, dk: u32, c: Rat) {
        if c.is_zero() {
            self.terms.remove(&(dn, dk));
        } else {
            self.terms.insert((dn, dk), c);
        }
    }

    pub fn coeff(&self, dn: u32, dk: u32) -> Rat {
        self.terms.get(&(dn, dk)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((dn, dk), c) in &other.terms {
            let cur = out.coeff(*dn, *dk);
            out.set(*dn, *dk, cur + c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Poly2::zero();
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.clone() * s;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Poly2::zero();
        for ((an, ak), ac) in &self.terms {
            for ((bn, bk), bc) in &other.terms {
                let dn = an + bn;
                let dk = ak + bk;
                let cur = out.coeff(dn, dk);
                out.set(dn, dk, cur + ac * bc);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Poly2::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Substitute n -> n + dn, k -> k + dk by binomial expansion.
    pub fn shift(&self, dn: i64, dk: i64) -> Self {
        let mut out = Poly2::zero();
        let rn = rat_int(dn);
        let rk = rat_int(dk);
        for ((en, ek), c) in &self.terms {
            // (n + dn)^en expanded one variable at a time.
            let mut pn = Poly2::constant(c.clone());
            let base_n = Poly2::var_n().add(&Poly2::constant(rn.clone()));
            for _ in 0..*en {
                pn = pn.mul(&base_n);
            }
            let base_k = Poly2::var_k().add(&Poly2::constant(rk.clone()));
            for _ in 0..*ek {
                pn = pn.mul(&base_k);
            }
            out = out.add(&pn);
        }
        out
    }

    pub fn eval(&self, n: &Rat, k: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for ((dn, dk), c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..*dn {
                t *= n;
            }
            for _ in 0..*dk {
                t *= k;
            }
            acc += t;
        }
        acc
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn deg_n(&self) -> u32 {
        self.terms.keys().map(|(a, _)| *a).max().unwrap_or(0)
    }

    pub fn deg_k(&self) -> u32 {
        self.terms.keys().map(|(_, b)| *b).max().unwrap_or(0)
    }

    /// Coefficient polynomial of k^deg_k (a polynomial in n alone).
    pub fn leading_coeff_k(&self) -> Poly2 {
        let d = self.deg_k();
        let mut out = Poly2::zero();
        for ((dn, dk), c) in &self.terms {
            if *dk == d {
                out.set(*dn, 0, c.clone());
            }
        }
        out
    }

    /// Leading term under lex order with n > k.
    fn leading_lex(&self) -> Option<((u32, u32), Rat)> {
        self.terms
            .iter()
            .max_by_key(|((dn, dk), _)| (*dn, *dk))
            .map(|(key, c)| (*key, c.clone()))
    }

    /// Exact division; None when the divisor does not divide evenly.
    pub fn divide_exact(&self, divisor: &Self) -> Option<Poly2> {
        let (dkey, dc) = divisor.leading_lex()?;
        let mut rem = self.clone();
        let mut quo = Poly2::zero();
        while let Some((rkey, rc)) = rem.leading_lex() {
            if rkey.0 < dkey.0 || rkey.1 < dkey.1 {
                return None;
            }
            let qkey = (rkey.0 - dkey.0, rkey.1 - dkey.1);
            let qc = rc / &dc;
            let mut mono = Poly2::zero();
            mono.set(qkey.0, qkey.1, qc.clone());
            quo = quo.add(&mono);
            rem = rem.sub(&mono.mul(divisor));
        }
        Some(quo)
    }

    /// Primitive form: coefficients scaled to coprime integers, leading
    /// lex coefficient positive; returns (primitive, scale).
    pub fn primitive(&self) -> (Poly2, Rat) {
        let Some((_, lead)) = self.leading_lex() else {
            return (Poly2::zero(), Rat::one());
        };
        let mut num_gcd = num_traits::zero();
        let mut den_lcm = num_traits::one();
        for c in self.terms.values() {
            num_gcd = num_integer::gcd(num_gcd, c.numer().clone());
            den_lcm = num_integer::lcm(den_lcm, c.denom().clone());
        }
        let mut scale = Rat::new(num_gcd, den_lcm);
        if lead.is_negative() {
            scale = -scale;
        }
        (self.scale(&(Rat::one() / &scale)), scale)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Graded lex, highest first, n before k.
        let mut keys: Vec<(u32, u32)> = self.terms.keys().cloned().collect();
        keys.sort_by_key(|(dn, dk)| (std::cmp::Reverse(dn + dk), std::cmp::Reverse(*dn)));
        let mut out = String::new();
        for (i, (dn, dk)) in keys.iter().enumerate() {
            let c = &self.terms[&(*dn, *dk)];
            let mono = match (dn, dk) {
                (0, 0) => String::new(),
                (a, 0) if *a == 1 => "n".into(),
                (a, 0) => format!("n^{a}"),
                (0, b) if *b == 1 => "k".into(),
                (0, b) => format!("k^{b}"),
                (a, b) => {
                    let np = if *a == 1 { "n".into() } else { format!("n^{a}") };
                    let kp = if *b == 1 { "k".into() } else { format!("k^{b}") };
                    format!("{np}*{kp}")
                }
            };
            let abs = c.abs();
            let body = if mono.is_empty() {
                abs.to_string()
            } else if abs.is_one() {
                mono
            } else {
                format!("{abs}*{mono}")
            };
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&body);
        }
        write!(f, "{out}")
    }
}

/// Product of affine factors with a rational scale; exponents may be
/// negative. The canonical form keeps every factor primitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredRational {
    pub scale: Rat,
    pub factors: BTreeMap<Affine, i64>,
}

impl FactoredRational {
    pub fn one() -> Self {
        FactoredRational { scale: Rat::one(), factors: BTreeMap::new() }
    }

    pub fn from_scale(scale: Rat) -> Self {
        FactoredRational { scale, factors: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero()
    }

    /// Multiply in factor^exp, folding constants and non-primitive
    /// representatives into the scale.
    pub fn push(&mut self, factor: &Affine, exp: i64) {
        if exp == 0 || self.scale.is_zero() {
            return;
        }
        let (prim, s) = factor.primitive();
        if prim.is_constant() {
            // A constant factor (prim.c0 is then 1 or 0).
            let c = &s * &prim.c0;
            self.scale *= pow_rat_i(&c, exp);
            return;
        }
        self.scale *= pow_rat_i(&s, exp);
        let e = self.factors.entry(prim).or_insert(0);
        *e += exp;
        if *e == 0 {
            let key = factor.primitive().0;
            self.factors.remove(&key);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.scale *= &other.scale;
        for (f, e) in &other.factors {
            out.push(f, *e);
        }
        out
    }

    pub fn inv(&self) -> Self {
        assert!(!self.scale.is_zero(), "inverse of zero factored rational");
        FactoredRational {
            scale: Rat::one() / &self.scale,
            factors: self.factors.iter().map(|(f, e)| (f.clone(), -e)).collect(),
        }
    }

    pub fn shift(&self, dn: i64, dk: i64) -> Self {
        let mut out = FactoredRational::from_scale(self.scale.clone());
        for (f, e) in &self.factors {
            out.push(&f.shift(dn, dk), *e);
        }
        out
    }

    /// Expand into a (numerator, denominator) polynomial pair; the
    /// denominator has positive leading lex coefficient.
    pub fn expand(&self) -> (Poly2, Poly2) {
        let mut num = Poly2::constant(self.scale.clone());
        let mut den = Poly2::one();
        for (f, e) in &self.factors {
            let p = f.to_poly();
            if *e > 0 {
                num = num.mul(&p.pow(*e as u32));
            } else {
                den = den.mul(&p.pow((-e) as u32));
            }
        }
        // Each primitive factor already has a positive lex-leading
        // coefficient, so den does too.
        (num, den)
    }

    /// None when a negative-exponent factor vanishes at (n, k).
    pub fn eval(&self, n: &Rat, k: &Rat) -> Option<Rat> {
        let mut acc = self.scale.clone();
        for (f, e) in &self.factors {
            let v = f.eval(n, k);
            if v.is_zero() {
                if *e < 0 {
                    return None;
                }
                return Some(Rat::zero());
            }
            acc *= pow_rat_i(&v, *e);
        }
        Some(acc)
    }
}

fn pow_rat_i(base: &Rat, exp: i64) -> Rat {
    let mut acc = Rat::one();
    let b = if exp >= 0 { base.clone() } else { Rat::one() / base };
    for _ in 0..exp.unsigned_abs() {
        acc = acc * &b;
    }
    acc
}

impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num_parts: Vec<String> = Vec::new();
        let mut den_parts: Vec<String> = Vec::new();
        for (fac, e) in &self.factors {
            let base = format!("({fac})");
            let (dst, a) = if *e > 0 {
                (&mut num_parts, *e)
            } else {
                (&mut den_parts, -*e)
            };
            if a == 1 {
                dst.push(base);
            } else {
                dst.push(format!("{base}^{a}"));
            }
        }
        let num = if num_parts.is_empty() {
            self.scale.to_string()
        } else if self.scale.is_one() {
            num_parts.join("*")
        } else {
            format!("{}*{}", self.scale, num_parts.join("*"))
        };
        if den_parts.is_empty() {
            write!(f, "{num}")
        } else {
            write!(f, "{num} / [{}]", den_parts.join("*"))
        }
    }
}

/// Linear expression over named unknowns: constant + sum coeff * name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinExpr {
    pub constant: Rat,
    pub terms: BTreeMap<String, Rat>,
}

impl LinExpr {
    pub fn zero() -> Self {
        LinExpr { constant: Rat::zero(), terms: BTreeMap::new() }
    }

    pub fn constant(c: Rat) -> Self {
        LinExpr { constant: c, terms: BTreeMap::new() }
    }

    pub fn unknown(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.to_string(), Rat::one());
        LinExpr { constant: Rat::zero(), terms }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.values().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (name, c) in &other.terms {
            let cur = out.terms.entry(name.clone()).or_insert_with(Rat::zero);
            *cur += c;
        }
        out.prune();
        out
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let mut out = self.clone();
        out.constant *= s;
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    /// Multiply by the distinguished unknown `y`, renaming every present
    /// unknown u to the product unknown `y*u` (linearization).
    pub fn mul_y(&self) -> Self {
        let mut terms = BTreeMap::new();
        if !self.constant.is_zero() {
            terms.insert("y".to_string(), self.constant.clone());
        }
        for (name, c) in &self.terms {
            terms.insert(format!("y*{name}"), c.clone());
        }
        LinExpr { constant: Rat::zero(), terms }
    }

    /// Value under an assignment of all unknowns.
    pub fn eval(&self, assign: &BTreeMap<String, Rat>) -> Rat {
        let mut acc = self.constant.clone();
        for (name, c) in &self.terms {
            let v = assign
                .get(name)
                .unwrap_or_else(|| panic!("unassigned unknown {name}"));
            acc += c * v;
        }
        acc
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }
}

/// Polynomial in n, k whose coefficients are linear in named unknowns.
#[derive(Debug, Clone)]
pub struct Poly2U {
    terms: BTreeMap<(u32, u32), LinExpr>,
}

impl Poly2U {
    pub fn zero() -> Self {
        Poly2U { terms: BTreeMap::new() }
    }

    pub fn from_poly(p: &Poly2) -> Self {
        let mut out = Poly2U::zero();
        for (key, c) in p.terms() {
            out.terms.insert(*key, LinExpr::constant(c.clone()));
        }
        out
    }

    pub fn monomial(dn: u32, dk: u32, coeff: LinExpr) -> Self {
        let mut out = Poly2U::zero();
        if !coeff.is_zero() {
            out.terms.insert((dn, dk), coeff);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (key, le) in &other.terms {
            let cur = out.terms.entry(*key).or_insert_with(LinExpr::zero);
            *cur = cur.add(le);
        }
        out.terms.retain(|_, le| !le.is_zero());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let mut out = self.clone();
        for le in out.terms.values_mut() {
            *le = le.scale(s);
        }
        out.terms.retain(|_, le| !le.is_zero());
        out
    }

    /// Multiply by a known polynomial.
    pub fn mul_poly(&self, p: &Poly2) -> Self {
        let mut out = Poly2U::zero();
        for ((an, ak), le) in &self.terms {
            for ((bn, bk), c) in p.terms() {
                let key = (an + bn, ak + bk);
                let add = le.scale(c);
                let cur = out.terms.entry(key).or_insert_with(LinExpr::zero);
                *cur = cur.add(&add);
            }
        }
        out.terms.retain(|_, le| !le.is_zero());
        out
    }

    pub fn mul_y(&self) -> Self {
        let mut out = Poly2U::zero();
        for (key, le) in &self.terms {
            out.terms.insert(*key, le.mul_y());
        }
        out
    }

    /// Substitute n -> n + dn, k -> k + dk.
    pub fn shift(&self, dn: i64, dk: i64) -> Self {
        let mut out = Poly2U::zero();
        for ((en, ek), le) in &self.terms {
            let mut mono = Poly2::one();
            let base_n = Poly2::var_n().add(&Poly2::constant(rat_int(dn)));
            for _ in 0..*en {
                mono = mono.mul(&base_n);
            }
            let base_k = Poly2::var_k().add(&Poly2::constant(rat_int(dk)));
            for _ in 0..*ek {
                mono = mono.mul(&base_k);
            }
            out = out.add(&Poly2U::monomial(0, 0, le.clone()).mul_poly(&mono));
        }
        out
    }

    fn leading_lex(&self) -> Option<((u32, u32), LinExpr)> {
        self.terms
            .iter()
            .max_by_key(|((dn, dk), _)| (*dn, *dk))
            .map(|(key, le)| (*key, le.clone()))
    }

    /// Exact division by a known polynomial; None when it does not
    /// divide every coefficient path evenly.
    pub fn divide_exact(&self, divisor: &Poly2) -> Option<Poly2U> {
        let (dkey, dc) = divisor.leading_lex()?;
        let mut rem = self.clone();
        let mut quo = Poly2U::zero();
        while let Some((rkey, rc)) = rem.leading_lex() {
            if rkey.0 < dkey.0 || rkey.1 < dkey.1 {
                return None;
            }
            let qkey = (rkey.0 - dkey.0, rkey.1 - dkey.1);
            let qle = rc.scale(&(Rat::one() / &dc));
            let mono = Poly2U::monomial(qkey.0, qkey.1, qle);
            quo = quo.add(&mono);
            rem = rem.sub(&mono.mul_poly(divisor));
        }
        Some(quo)
    }

    /// Scale so every rational involved is an integer and their common
    /// content is 1, with the lexicographically first nonzero rational
    /// positive. Deterministic normal form for comparing assembled
    /// polynomials.
    pub fn normalize_content(&self) -> Poly2U {
        let mut num_gcd: Int = num_traits::zero();
        let mut den_lcm: Int = num_traits::one();
        let mut first_sign: Option<bool> = None;
        for (_, le) in self.terms.iter() {
            let mut visit = |c: &Rat| {
                if c.is_zero() {
                    return;
                }
                if first_sign.is_none() {
                    first_sign = Some(c.is_negative());
                }
                num_gcd = num_integer::gcd(num_gcd.clone(), c.numer().clone());
                den_lcm = num_integer::lcm(den_lcm.clone(), c.denom().clone());
            };
            visit(&le.constant);
            for c in le.terms.values() {
                visit(c);
            }
        }
        if num_gcd.is_zero() {
            return self.clone();
        }
        let mut content = Rat::new(num_gcd, den_lcm);
        if first_sign == Some(true) {
            content = -content;
        }
        self.scale(&(Rat::one() / content))
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&(u32, u32), &LinExpr)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Evaluate every coefficient under an assignment, giving a Poly2.
    pub fn substitute(&self, assign: &BTreeMap<String, Rat>) -> Poly2 {
        let mut out = Poly2::zero();
        for ((dn, dk), le) in &self.terms {
            out.set(*dn, *dk, le.eval(assign));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    fn aff(cn: i64, ck: i64, c0: i64) -> Affine {
        Affine::new(rat_int(cn), rat_int(ck), rat_int(c0))
    }

    #[test]
    fn affine_primitive_normalizes_sign_and_content() {
        let a = Affine::new(rat(-4, 6), rat(2, 3), rat(-8, 3));
        let (prim, scale) = a.primitive();
        assert_eq!(prim, aff(1, -1, 4));
        assert_eq!(scale, rat(-2, 3));
        // scale * primitive reproduces the original
        assert_eq!(prim.eval(&rat(5, 1), &rat(7, 1)) * &scale, a.eval(&rat(5, 1), &rat(7, 1)));
    }

    #[test]
    fn poly_shift_matches_pointwise_eval() {
        let p = aff(2, 1, 1).to_poly().mul(&aff(1, -2, 3).to_poly());
        let q = p.shift(1, -2);
        for (n, k) in [(0i64, 0i64), (3, 5), (-2, 7), (10, -4)] {
            assert_eq!(
                q.eval(&rat_int(n), &rat_int(k)),
                p.eval(&rat_int(n + 1), &rat_int(k - 2))
            );
        }
    }

    #[test]
    fn divide_exact_recovers_factor() {
        let a = aff(2, 3, -1).to_poly();
        let b = aff(1, -1, 4).to_poly().mul(&aff(5, 0, 2).to_poly());
        let prod = a.mul(&b);
        assert_eq!(prod.divide_exact(&a), Some(b.clone()));
        assert_eq!(prod.divide_exact(&b), Some(a.clone()));
        let off = prod.add(&Poly2::one());
        assert_eq!(off.divide_exact(&a), None);
    }

    #[test]
    fn factored_rational_expand_and_eval_agree() {
        let mut fr = FactoredRational::from_scale(rat(-1, 16));
        fr.push(&aff(2, -2, 1), 1);
        fr.push(&aff(2, 2, 1), 1);
        fr.push(&aff(2, 1, 1), -1);
        fr.push(&aff(1, 1, 1), -1);
        let (num, den) = fr.expand();
        for (n, k) in [(1i64, 1i64), (4, 2), (7, -5)] {
            let nv = rat_int(n);
            let kv = rat_int(k);
            let direct = fr.eval(&nv, &kv).unwrap();
            assert_eq!(direct, num.eval(&nv, &kv) / den.eval(&nv, &kv));
        }
    }

    #[test]
    fn factored_rational_folds_content_into_scale() {
        let mut fr = FactoredRational::one();
        fr.push(&Affine::new(rat(4, 1), rat(0, 1), rat(2, 1)), 2);
        // (4n+2)^2 = 4 * (2n+1)^2
        assert_eq!(fr.scale, rat(4, 1));
        assert_eq!(fr.factors.get(&aff(2, 0, 1)), Some(&2));
        let mut inv = fr.inv();
        assert_eq!(inv.scale, rat(1, 4));
        inv.push(&aff(2, 0, 1), 2);
        assert_eq!(inv, FactoredRational::from_scale(rat(1, 4)));
    }

    #[test]
    fn poly_display_graded_lex() {
        let p = aff(2, 1, 1).to_poly().mul(&aff(1, -1, 0).to_poly());
        assert_eq!(p.to_string(), "2*n^2 - n*k - k^2 + n - k");
    }

    #[test]
    fn linexpr_mul_y_linearizes() {
        let e = LinExpr::constant(rat(3, 1)).add(&LinExpr::unknown("d10").scale(&rat(2, 1)));
        let ey = e.mul_y();
        assert_eq!(ey.constant, rat(0, 1));
        assert_eq!(ey.terms.get("y"), Some(&rat(3, 1)));
        assert_eq!(ey.terms.get("y*d10"), Some(&rat(2, 1)));
    }

    #[test]
    fn poly2u_substitute_roundtrip() {
        let u = Poly2U::monomial(1, 0, LinExpr::unknown("a"))
            .add(&Poly2U::monomial(0, 1, LinExpr::unknown("b").scale(&rat(2, 1))))
            .mul_poly(&aff(1, 1, 1).to_poly());
        let mut assign = BTreeMap::new();
        assign.insert("a".to_string(), rat(3, 1));
        assign.insert("b".to_string(), rat(-1, 1));
        let p = u.substitute(&assign);
        let expect = Poly2::var_n()
            .scale(&rat(3, 1))
            .add(&Poly2::var_k().scale(&rat(-2, 1)))
            .mul(&aff(1, 1, 1).to_poly());
        assert_eq!(p, expect);
    }
}
