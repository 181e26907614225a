//! The discovery strategy: split shift-quotient denominators, build the
//! degree-parameterized R/S templates with undetermined coefficients,
//! assemble the cleared two-variable identity H(n,k) = 0, and solve the
//! linearized system exactly over Q. Search families live behind a
//! name-keyed registry so the grid runner can select them at runtime.

use crate::hyperterm::{HyperError, HyperTerm, Prefilter, Var, YVal};
use crate::numbers::{rat_int, Rat};
use crate::polyalg::{Affine, FactoredRational, LinExpr, Poly2, Poly2U};
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::collections::BTreeMap;

/// Denominator factors of a shift quotient, partitioned by vanishing at
/// the probe point. `kept` are the non-vanishing factors (they index the
/// template denominator); `r` is their total multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenomSplit {
    pub kept: Vec<(Affine, u32)>,
    pub dropped: Vec<(Affine, u32)>,
    pub r: u32,
}

pub fn split_denominators(q: &FactoredRational, test_point: (&Rat, &Rat)) -> DenomSplit {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut r = 0u32;
    for (f, e) in &q.factors {
        if *e >= 0 {
            continue;
        }
        let mult = (-e) as u32;
        if f.eval(test_point.0, test_point.1).is_zero() {
            dropped.push((f.clone(), mult));
        } else {
            kept.push((f.clone(), mult));
            r += mult;
        }
    }
    DenomSplit { kept, dropped, r }
}

/// R = [(a+bn) P(n,0) + k U(n,k)] / P(n,k), S = n V(n,k) / Q(n,k), with
/// U, V of total degree at most r*degree and s*degree.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub degree: u32,
    pub r_num: Poly2U,
    pub r_den: Vec<(Affine, u32)>,
    pub s_num: Poly2U,
    pub s_den: Vec<(Affine, u32)>,
    pub unknowns: Vec<String>,
}

fn dense_template(prefix: &str, max_degree: u32, unknowns: &mut Vec<String>) -> Poly2U {
    let mut out = Poly2U::zero();
    for i in 0..=max_degree {
        for j in 0..=(max_degree - i) {
            let name = format!("{prefix}{i}{j}");
            unknowns.push(name.clone());
            out = out.add(&Poly2U::monomial(i, j, LinExpr::unknown(&name)));
        }
    }
    out
}

fn factor_product(factors: &[(Affine, u32)]) -> Poly2 {
    let mut p = Poly2::one();
    for (f, m) in factors {
        p = p.mul(&f.to_poly().pow(*m));
    }
    p
}

pub fn build_ansatz(
    split_n: &DenomSplit,
    split_k: &DenomSplit,
    a: &Rat,
    b: &Rat,
    degree: u32,
) -> Ansatz {
    assert!(degree >= 1);
    let mut unknowns = Vec::new();
    // (a + bn) P(n,0)
    let p_at_k0 = {
        let mut p = Poly2::one();
        for (f, m) in &split_n.kept {
            let f0 = Affine::new(f.cn.clone(), Rat::zero(), f.c0.clone());
            p = p.mul(&f0.to_poly().pow(*m));
        }
        p
    };
    let a_bn = Poly2::constant(a.clone()).add(&Poly2::var_n().scale(b));
    let u = dense_template("d", split_n.r * degree, &mut unknowns);
    let r_num = Poly2U::from_poly(&a_bn.mul(&p_at_k0))
        .add(&u.mul_poly(&Poly2::var_k()));
    let v = dense_template("e", split_k.r * degree, &mut unknowns);
    let s_num = v.mul_poly(&Poly2::var_n());
    unknowns.push("y".to_string());
    Ansatz {
        degree,
        r_num,
        r_den: split_n.kept.clone(),
        s_num,
        s_den: split_k.kept.clone(),
        unknowns,
    }
}

/// The standard probe points: (-1, 0) for the n-quotient, (0, -1) for
/// the k-quotient.
pub fn standard_splits(t: &HyperTerm) -> Result<(DenomSplit, DenomSplit), HyperError> {
    let qn = t.shift_quotient(Var::N)?;
    // The k-quotient factors do not depend on y.
    let qk = t.clone().with_y_unknown().shift_quotient(Var::K)?;
    let minus1 = -Rat::one();
    let zero = Rat::zero();
    let sn = split_denominators(&qn.ratio, (&minus1, &zero));
    let sk = split_denominators(&qk.ratio, (&zero, &minus1));
    Ok((sn, sk))
}

impl HyperTerm {
    fn with_y_unknown(mut self) -> Self {
        self.y = YVal::Unknown;
        self
    }
}

/// Cleared form of the pair identity with every product y*d replaced by
/// a fresh linear unknown. Reduced by dividing out affine factors that
/// divide it exactly, then content-normalized, so the §-style integer
/// coefficient slots come out minimal and deterministic.
pub fn assemble_h(t: &HyperTerm, ans: &Ansatz) -> Result<Poly2U, HyperError> {
    let qn = t.shift_quotient(Var::N)?.ratio;
    let qk = t.clone().with_y_unknown().shift_quotient(Var::K)?.ratio;
    let (qn_num, qn_den) = split_factors(&qn);
    let (qk_num, qk_den) = split_factors(&qk);

    // Four summands: each a polynomial part and a factored denominator.
    let mut summands: Vec<(Poly2U, BTreeMap<Affine, u32>)> = Vec::new();
    // + qk * R(n,k+1) * y
    {
        let num = ans
            .r_num
            .shift(0, 1)
            .mul_poly(&factor_product(&qk_num))
            .scale(&qk.scale)
            .mul_y();
        let mut den = qk_den.clone();
        merge_factors(&mut den, &shift_factors(&ans.r_den, 0, 1));
        summands.push((num, den));
    }
    // - R(n,k)
    {
        let num = ans.r_num.scale(&-Rat::one());
        let den = to_factor_map(&ans.r_den);
        summands.push((num, den));
    }
    // - qn * S(n+1,k)   (qn's scale already includes z)
    {
        let num = ans
            .s_num
            .shift(1, 0)
            .mul_poly(&factor_product(&qn_num))
            .scale(&-qn.scale.clone());
        let mut den = qn_den.clone();
        merge_factors(&mut den, &shift_factors(&ans.s_den, 1, 0));
        summands.push((num, den));
    }
    // + S(n,k)
    {
        let num = ans.s_num.clone();
        let den = to_factor_map(&ans.s_den);
        summands.push((num, den));
    }

    // Least common denominator: every distinct factor at its maximal
    // multiplicity.
    let mut lcd: BTreeMap<Affine, u32> = BTreeMap::new();
    for (_, den) in &summands {
        for (f, m) in den {
            let cur = lcd.entry(f.clone()).or_insert(0);
            *cur = (*cur).max(*m);
        }
    }
    let mut h = Poly2U::zero();
    for (num, den) in &summands {
        let mut mult = Poly2::one();
        for (f, m) in &lcd {
            let have = den.get(f).copied().unwrap_or(0);
            mult = mult.mul(&f.to_poly().pow(m - have));
        }
        h = h.add(&num.mul_poly(&mult));
    }
    // The union denominator can overshoot the reduced one; peel off
    // affine factors dividing H exactly.
    for f in lcd.keys() {
        let fp = f.to_poly();
        while let Some(q) = h.divide_exact(&fp) {
            h = q;
        }
    }
    Ok(h.normalize_content())
}

fn split_factors(q: &FactoredRational) -> (Vec<(Affine, u32)>, BTreeMap<Affine, u32>) {
    let mut num = Vec::new();
    let mut den = BTreeMap::new();
    for (f, e) in &q.factors {
        if *e > 0 {
            num.push((f.clone(), *e as u32));
        } else {
            den.insert(f.clone(), (-e) as u32);
        }
    }
    (num, den)
}

fn to_factor_map(fs: &[(Affine, u32)]) -> BTreeMap<Affine, u32> {
    let mut m = BTreeMap::new();
    for (f, c) in fs {
        *m.entry(f.clone()).or_insert(0) += c;
    }
    m
}

fn shift_factors(fs: &[(Affine, u32)], dn: i64, dk: i64) -> BTreeMap<Affine, u32> {
    let mut m = BTreeMap::new();
    for (f, c) in fs {
        *m.entry(f.shift(dn, dk)).or_insert(0) += c;
    }
    m
}

fn merge_factors(into: &mut BTreeMap<Affine, u32>, other: &BTreeMap<Affine, u32>) {
    for (f, m) in other {
        *into.entry(f.clone()).or_insert(0) += m;
    }
}

/// A consistent assignment of all unknowns (d's, e's, y, and the
/// linearization products).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub y: Rat,
    pub assignment: BTreeMap<String, Rat>,
}

impl Solution {
    pub fn value(&self, name: &str) -> Option<&Rat> {
        self.assignment.get(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(Solution),
    NoSolution,
    Underdetermined(Vec<String>),
    /// A linear solution exists but violates some product relation
    /// w = y*d: the term is not good.
    InconsistentBilinear,
}

/// Exact Gaussian elimination of {every coefficient of h = 0} with the
/// post-hoc product-consistency check.
pub fn solve_h(h: &Poly2U) -> SolveOutcome {
    let mut vars: Vec<String> = Vec::new();
    for (_, le) in h.coefficients() {
        for name in le.terms.keys() {
            if !vars.contains(name) {
                vars.push(name.clone());
            }
        }
    }
    vars.sort();
    let rows: Vec<Vec<Rat>> = h
        .coefficients()
        .map(|(_, le)| {
            let mut row: Vec<Rat> = vars
                .iter()
                .map(|v| le.terms.get(v).cloned().unwrap_or_else(Rat::zero))
                .collect();
            row.push(-le.constant.clone());
            row
        })
        .collect();
    match eliminate(&vars, rows.clone()) {
        Elim::Inconsistent => SolveOutcome::NoSolution,
        Elim::Unique(assign) => finish(assign),
        Elim::Free(free, pinned) => {
            // If y is pinned, the product relations become linear;
            // substitute them once and re-solve.
            let Some(y) = pinned.get("y").cloned() else {
                return SolveOutcome::Underdetermined(free);
            };
            let mut rows2 = rows;
            for (i, v) in vars.iter().enumerate() {
                if let Some(base) = v.strip_prefix("y*") {
                    if let Some(j) = vars.iter().position(|u| u == base) {
                        let mut row = vec![Rat::zero(); vars.len() + 1];
                        row[i] = Rat::one();
                        row[j] = -y.clone();
                        rows2.push(row);
                    }
                }
            }
            match eliminate(&vars, rows2) {
                Elim::Inconsistent => SolveOutcome::NoSolution,
                Elim::Unique(assign) => finish(assign),
                Elim::Free(free, _) => SolveOutcome::Underdetermined(free),
            }
        }
    }
}

fn finish(assign: BTreeMap<String, Rat>) -> SolveOutcome {
    let y = assign.get("y").cloned().unwrap_or_else(Rat::one);
    for (name, val) in &assign {
        if let Some(base) = name.strip_prefix("y*") {
            let b = assign.get(base).cloned().unwrap_or_else(Rat::zero);
            if *val != &y * &b {
                return SolveOutcome::InconsistentBilinear;
            }
        }
    }
    SolveOutcome::Solved(Solution { y, assignment: assign })
}

enum Elim {
    Inconsistent,
    Unique(BTreeMap<String, Rat>),
    /// free variables, plus values of variables pinned independently of
    /// the free ones.
    Free(Vec<String>, BTreeMap<String, Rat>),
}

fn eliminate(vars: &[String], mut rows: Vec<Vec<Rat>>) -> Elim {
    let ncols = vars.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = Rat::one() / &rows[rank][col];
        for c in col..=ncols {
            rows[rank][c] = &rows[rank][c] * &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..=ncols {
                    rows[r][c] = &rows[r][c] - &f * &rows[rank][c];
                }
            }
        }
        pivots.push((rank, col));
        rank += 1;
    }
    for row in rows.iter().skip(rank) {
        if !row[ncols].is_zero() {
            return Elim::Inconsistent;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|(_, c)| *c).collect();
    let free: Vec<String> = (0..ncols)
        .filter(|c| !pivot_cols.contains(c))
        .map(|c| vars[c].clone())
        .collect();
    if free.is_empty() {
        let mut assign = BTreeMap::new();
        for (r, c) in pivots {
            assign.insert(vars[c].clone(), rows[r][ncols].clone());
        }
        return Elim::Unique(assign);
    }
    let mut pinned = BTreeMap::new();
    for (r, c) in pivots {
        let depends_on_free = (0..ncols)
            .any(|cc| cc != c && !pivot_cols.contains(&cc) && !rows[r][cc].is_zero());
        if !depends_on_free {
            pinned.insert(vars[c].clone(), rows[r][ncols].clone());
        }
    }
    Elim::Free(free, pinned)
}

/// One discovered pair: the instantiated term with its solved y, and
/// R, S as exact polynomial fractions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discovery {
    pub j: Vec<Rat>,
    pub term: HyperTerm,
    pub y: Rat,
    pub r: (Poly2, Poly2),
    pub s: (Poly2, Poly2),
}

/// Target data steering a search: the series left side (z, a, b) and
/// the right side's structural parameters.
#[derive(Debug, Clone)]
pub struct DiscoverTarget {
    pub z: Rat,
    pub a: Rat,
    pub b: Rat,
    pub s: Rat,
    pub t: Rat,
    pub rhs_geom: Rat,
}

/// A family of candidate-term shapes over a j-parameter grid.
pub trait SearchFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn slots(&self) -> usize;
    fn instantiate(&self, j: &[Rat], target: &DiscoverTarget) -> HyperTerm;
}

struct BasicFamily;
struct ExtendedHalfFamily;
struct ExtendedQuarterFamily;

fn base_of(coef: &Rat, c0: Rat) -> Affine {
    Affine::new(Rat::zero(), coef.clone(), c0)
}

fn basic_term(j: &[Rat], target: &DiscoverTarget) -> HyperTerm {
    let mut t = HyperTerm::new(target.z.clone(), YVal::Unknown);
    t.push_factor(Var::N, base_of(&j[0], Rat::new(1.into(), 2.into())), 1);
    t.push_factor(Var::N, base_of(&j[1], target.s.clone()), 1);
    t.push_factor(Var::N, base_of(&j[2], Rat::one() - &target.s), 1);
    t.push_factor(Var::N, base_of(&j[3], Rat::one()), -1);
    t.push_factor(Var::N, base_of(&j[4], Rat::one()), -1);
    t.push_factor(Var::N, base_of(&Rat::zero(), Rat::one()), -1);
    t.push_factor(Var::K, base_of(&Rat::zero(), target.t.clone()), 1);
    t.push_factor(Var::K, base_of(&Rat::zero(), Rat::one() - &target.t), 1);
    t.push_factor(Var::K, base_of(&Rat::zero(), Rat::one()), -2);
    t
}

impl SearchFamily for BasicFamily {
    fn name(&self) -> &'static str {
        "basic"
    }
    fn slots(&self) -> usize {
        5
    }
    fn instantiate(&self, j: &[Rat], target: &DiscoverTarget) -> HyperTerm {
        basic_term(j, target)
    }
}

impl SearchFamily for ExtendedHalfFamily {
    fn name(&self) -> &'static str {
        "extended-half"
    }
    fn slots(&self) -> usize {
        7
    }
    fn instantiate(&self, j: &[Rat], target: &DiscoverTarget) -> HyperTerm {
        let mut t = basic_term(j, target);
        let half = Rat::new(1.into(), 2.into());
        t.push_factor(Var::N, base_of(&j[5], half.clone()), 1);
        t.push_factor(Var::N, base_of(&j[6], half), -1);
        t
    }
}

impl SearchFamily for ExtendedQuarterFamily {
    fn name(&self) -> &'static str {
        "extended-quarter"
    }
    fn slots(&self) -> usize {
        7
    }
    fn instantiate(&self, j: &[Rat], target: &DiscoverTarget) -> HyperTerm {
        let mut t = basic_term(j, target);
        let quarter = Rat::new(1.into(), 4.into());
        let three_quarter = Rat::new(3.into(), 4.into());
        t.push_factor(Var::N, base_of(&j[5], quarter.clone()), 1);
        t.push_factor(Var::N, base_of(&j[5], three_quarter.clone()), 1);
        t.push_factor(Var::N, base_of(&j[6], quarter), -1);
        t.push_factor(Var::N, base_of(&j[6], three_quarter), -1);
        t
    }
}

static FAMILIES: Lazy<BTreeMap<&'static str, Box<dyn SearchFamily>>> = Lazy::new(|| {
    let mut m: BTreeMap<&'static str, Box<dyn SearchFamily>> = BTreeMap::new();
    for f in [
        Box::new(BasicFamily) as Box<dyn SearchFamily>,
        Box::new(ExtendedHalfFamily),
        Box::new(ExtendedQuarterFamily),
    ] {
        m.insert(f.name(), f);
    }
    m
});

pub fn lookup_family(name: &str) -> Option<&'static dyn SearchFamily> {
    FAMILIES.get(name).map(|b| b.as_ref())
}

pub fn family_names() -> Vec<&'static str> {
    FAMILIES.keys().copied().collect()
}

/// Default per-slot grid: small integers plus common half/third values.
pub fn default_slot_grid() -> Vec<Rat> {
    let mut g: Vec<Rat> = (-3..=3).map(rat_int).collect();
    for (p, q) in [(1, 2), (-1, 2), (1, 3), (-1, 3), (2, 3), (-2, 3), (3, 2), (-3, 2)] {
        g.push(Rat::new(p.into(), q.into()));
    }
    g.sort();
    g
}

/// "j1=-1,1;j2=0;..." into per-slot value lists; unmentioned slots get
/// the default grid.
pub fn parse_grid(spec: &str, slots: usize) -> Result<Vec<Vec<Rat>>, String> {
    let mut grid: Vec<Vec<Rat>> = vec![default_slot_grid(); slots];
    if spec.trim().is_empty() {
        return Ok(grid);
    }
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, vals) = part
            .split_once('=')
            .ok_or_else(|| format!("grid clause without '=': {part}"))?;
        let idx: usize = name
            .trim()
            .strip_prefix('j')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad slot name: {name}"))?;
        if idx == 0 || idx > slots {
            return Err(format!("slot {name} out of range 1..={slots}"));
        }
        let mut list = Vec::new();
        for v in vals.split(',') {
            let r: Rat = v
                .trim()
                .parse()
                .map_err(|_| format!("bad rational in grid: {v}"))?;
            list.push(r);
        }
        list.sort();
        list.dedup();
        if list.is_empty() {
            return Err(format!("empty value list for {name}"));
        }
        grid[idx - 1] = list;
    }
    Ok(grid)
}

/// Run the full pipeline on one candidate term.
pub fn solve_candidate(
    term: &HyperTerm,
    a: &Rat,
    b: &Rat,
    degree: u32,
) -> Result<SolveOutcome, HyperError> {
    let (sn, sk) = standard_splits(term)?;
    let ans = build_ansatz(&sn, &sk, a, b, degree);
    let h = assemble_h(term, &ans)?;
    Ok(match solve_h(&h) {
        SolveOutcome::Solved(sol) => SolveOutcome::Solved(sol),
        other => other,
    })
}

fn realize(term: &HyperTerm, a: &Rat, b: &Rat, degree: u32, j: Vec<Rat>) -> Option<Discovery> {
    let (sn, sk) = standard_splits(term).ok()?;
    let ans = build_ansatz(&sn, &sk, a, b, degree);
    let h = assemble_h(term, &ans).ok()?;
    let SolveOutcome::Solved(sol) = solve_h(&h) else {
        return None;
    };
    let r_num = ans.r_num.substitute(&sol.assignment);
    let s_num = ans.s_num.substitute(&sol.assignment);
    Some(Discovery {
        j,
        term: term.with_y(sol.y.clone()),
        y: sol.y,
        r: (r_num, factor_product(&ans.r_den)),
        s: (s_num, factor_product(&ans.s_den)),
    })
}

/// Grid search: instantiate, prefilter, solve; deterministic output
/// sorted by j-vector regardless of job count.
pub fn discover(
    family: &dyn SearchFamily,
    target: &DiscoverTarget,
    grid: &[Vec<Rat>],
    degree: u32,
    precision: u32,
    jobs: usize,
) -> Vec<Discovery> {
    assert_eq!(grid.len(), family.slots(), "grid arity mismatch");
    if grid.iter().any(|g| g.is_empty()) {
        return Vec::new();
    }
    let total: usize = grid.iter().map(|g| g.len()).product();
    let candidate = |idx: usize| -> Vec<Rat> {
        let mut rem = idx;
        let mut j = Vec::with_capacity(grid.len());
        for slot in grid.iter().rev() {
            j.push(slot[rem % slot.len()].clone());
            rem /= slot.len();
        }
        j.reverse();
        j
    };
    let run_one = |idx: usize| -> Option<Discovery> {
        let j = candidate(idx);
        let term = family.instantiate(&j, target);
        if term.pole_prefilter() != Prefilter::Accept {
            return None;
        }
        match term.terminating_prefilter(&target.a, &target.rhs_geom, precision) {
            Ok(Prefilter::Accept) => {}
            _ => return None,
        }
        realize(&term, &target.a, &target.b, degree, j)
    };
    let mut found: Vec<Discovery> = if jobs <= 1 {
        (0..total).filter_map(run_one).collect()
    } else {
        let mut out = Vec::new();
        std::thread::scope(|scope| {
            let chunk = total.div_ceil(jobs);
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(total);
                    scope.spawn(move || (lo..hi).filter_map(run_one).collect::<Vec<_>>())
                })
                .collect();
            for h in handles {
                out.extend(h.join().expect("search worker panicked"));
            }
        });
        out
    };
    found.sort_by(|a, b| a.j.cmp(&b.j));
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_rational_function, parse_term};
    use crate::numbers::rat;

    const GOOD1: &str = "z=-1/16 * poch(1/2-k;n)*poch(1/2+k;n)*poch(1/3;n)*poch(2/3;n) / (poch(1/2+k/2;n)*poch(1+k/2;n)*poch(1+k;n)*poch(1;n)) * poch(1/3;k)*poch(2/3;k)/poch(1;k)^2";
    const GOOD2: &str = "z=-1/16 * poch(1/2;n)*poch(1/2+2*k;n)*poch(1/3+k;n)*poch(2/3+k;n) / (poch(1/2+k/2;n)*poch(1+k/2;n)*poch(1+k;n)*poch(1;n)) * poch(1/4;k)*poch(3/4;k)/poch(1;k)^2";

    fn aff(cn: i64, ck: i64, c0: i64) -> Affine {
        Affine::new(rat_int(cn), rat_int(ck), rat_int(c0))
    }

    #[test]
    fn split_keeps_nonvanishing_factors() {
        let t = parse_term(GOOD1).unwrap();
        let (sn, sk) = standard_splits(&t).unwrap();
        assert_eq!(sn.kept, vec![(aff(2, 1, 1), 1)]);
        assert_eq!(sn.r, 1);
        assert_eq!(sn.dropped.len(), 3);
        assert_eq!(sk.kept, vec![(aff(2, -2, -1), 1)]);
        assert_eq!(sk.r, 1);
    }

    #[test]
    fn split_degenerate_all_vanish() {
        let mut q = FactoredRational::one();
        q.push(&aff(1, 0, 1), -1);
        let minus1 = rat(-1, 1);
        let zero = rat(0, 1);
        let s = split_denominators(&q, (&minus1, &zero));
        assert!(s.kept.is_empty());
        assert_eq!(s.r, 0);
    }

    #[test]
    fn ansatz_unknown_counts() {
        let t = parse_term(GOOD1).unwrap();
        let (sn, sk) = standard_splits(&t).unwrap();
        let ans = build_ansatz(&sn, &sk, &rat(7, 1), &rat(51, 1), 1);
        // r = s = 1: three d's, three e's, plus y.
        assert_eq!(ans.unknowns.len(), 7);
        // (a+bn)P(n,0) = (51n+7)(2n+1)
        let fixed = ans.r_num.substitute(
            &ans.unknowns
                .iter()
                .map(|u| (u.clone(), rat(0, 1)))
                .collect(),
        );
        let (expect, _) = parse_rational_function("(51*n+7)*(2*n+1)").unwrap();
        assert_eq!(fixed, expect);
    }

    #[test]
    fn worked_example_h_shape_and_solution() {
        let t = parse_term(GOOD1).unwrap();
        let (sn, sk) = standard_splits(&t).unwrap();
        let ans = build_ansatz(&sn, &sk, &rat(7, 1), &rat(51, 1), 1);
        let h = assemble_h(&t, &ans).unwrap();
        assert_eq!(h.total_degree(), 5);
        assert_eq!(h.num_terms(), 21);
        let SolveOutcome::Solved(sol) = solve_h(&h) else {
            panic!("expected a solution");
        };
        assert_eq!(sol.y, rat(1, 1));
        assert_eq!(sol.value("d10"), Some(&rat(90, 1)));
        assert_eq!(sol.value("d01"), Some(&rat(24, 1)));
        assert_eq!(sol.value("d00"), Some(&rat(28, 1)));
        assert_eq!(sol.value("e10"), Some(&rat(96, 1)));
        assert_eq!(sol.value("e01"), Some(&rat(-48, 1)));
        assert_eq!(sol.value("e00"), Some(&rat(-32, 1)));
        // The solution zeroes H identically.
        assert!(h.substitute(&sol.assignment).is_zero());
    }

    #[test]
    fn second_solution_matches_published_pair() {
        let t = parse_term(GOOD2).unwrap();
        let (sn, sk) = standard_splits(&t).unwrap();
        assert_eq!(sk.kept, vec![(aff(0, 3, 1), 1), (aff(0, 3, 2), 1)]);
        let ans = build_ansatz(&sn, &sk, &rat(7, 1), &rat(51, 1), 1);
        let h = assemble_h(&t, &ans).unwrap();
        let SolveOutcome::Solved(sol) = solve_h(&h) else {
            panic!("expected a solution");
        };
        assert_eq!(sol.y, rat(1, 1));
        let r_num = ans.r_num.substitute(&sol.assignment);
        let (expect_r, _) =
            parse_rational_function("(51*n+7)*(2*n+1)+k*(114*n+36*k+37)").unwrap();
        assert_eq!(r_num, expect_r);
        let s_num = ans.s_num.substitute(&sol.assignment);
        let (expect_s, _) =
            parse_rational_function("-9*n*(6*n^2+30*n*k+13*n-7*k-3)").unwrap();
        assert_eq!(s_num, expect_s);
    }

    #[test]
    fn solve_h_rejects_contradiction() {
        let h = Poly2U::monomial(0, 0, LinExpr::constant(rat(1, 1)));
        assert_eq!(solve_h(&h), SolveOutcome::NoSolution);
    }

    #[test]
    fn solve_h_reports_free_symbols() {
        // single equation u + v = 0
        let le = LinExpr::unknown("u").add(&LinExpr::unknown("v"));
        let h = Poly2U::monomial(0, 0, le);
        let SolveOutcome::Underdetermined(free) = solve_h(&h) else {
            panic!("expected underdetermined");
        };
        assert_eq!(free, vec!["v".to_string()]);
    }

    #[test]
    fn grid_parser_defaults_and_overrides() {
        let g = parse_grid("j1=-1,1;j3=0", 3).unwrap();
        assert_eq!(g[0], vec![rat(-1, 1), rat(1, 1)]);
        assert_eq!(g[1], default_slot_grid());
        assert_eq!(g[2], vec![rat(0, 1)]);
        assert!(parse_grid("j9=0", 3).is_err());
        assert!(parse_grid("jx=1", 3).is_err());
    }

    #[test]
    fn family_registry_contents() {
        assert_eq!(family_names(), vec!["basic", "extended-half", "extended-quarter"]);
        let f = lookup_family("extended-half").unwrap();
        assert_eq!(f.slots(), 7);
        assert!(lookup_family("nope").is_none());
    }

    #[test]
    fn extended_half_instantiates_worked_example() {
        let target = DiscoverTarget {
            z: rat(-1, 16),
            a: rat(7, 1),
            b: rat(51, 1),
            s: rat(1, 3),
            t: rat(1, 3),
            rhs_geom: rat(1, 1),
        };
        let j = vec![
            rat(-1, 1),
            rat(0, 1),
            rat(0, 1),
            rat(1, 1),
            rat(1, 2),
            rat(1, 1),
            rat(1, 2),
        ];
        let f = lookup_family("extended-half").unwrap();
        let t = f.instantiate(&j, &target);
        assert_eq!(t, parse_term(GOOD1).unwrap());
    }

    #[test]
    fn discover_small_grid_finds_worked_example() {
        let target = DiscoverTarget {
            z: rat(-1, 16),
            a: rat(7, 1),
            b: rat(51, 1),
            s: rat(1, 3),
            t: rat(1, 3),
            rhs_geom: rat(1, 1),
        };
        let grid = parse_grid("j1=-1;j2=0;j3=0;j4=1;j5=1/2,1;j6=1;j7=1/2,1/4", 7).unwrap();
        let f = lookup_family("extended-half").unwrap();
        let found = discover(f, &target, &grid, 1, 30, 1);
        assert!(!found.is_empty());
        let d = &found[0];
        assert_eq!(d.y, rat(1, 1));
        assert_eq!(d.term, parse_term(GOOD1).unwrap().with_y(rat(1, 1)));
        let (expect_r, _) =
            parse_rational_function("(51*n+7)*(2*n+1)+k*(90*n+24*k+28)").unwrap();
        assert_eq!(d.r.0, expect_r);
    }

    #[test]
    fn discover_empty_grid_is_empty() {
        let target = DiscoverTarget {
            z: rat(-1, 16),
            a: rat(7, 1),
            b: rat(51, 1),
            s: rat(1, 3),
            t: rat(1, 3),
            rhs_geom: rat(1, 1),
        };
        let f = lookup_family("basic").unwrap();
        let grid = vec![vec![], vec![], vec![], vec![], vec![]];
        assert!(discover(f, &target, &grid, 1, 30, 1).is_empty());
    }
}
