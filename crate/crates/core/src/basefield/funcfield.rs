//! `F_p(q, r, ...)(t)` with `v = ord_t`, and its residue tower: `F_p(q, r,
//! ...)` extended by roots of binomials `y^(p^k) - c`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::mpoly::{add_exps, exponent_denominator, inv_mod, mul_mod, Exp, Exps, MPoly, RatFn};
use crate::error::{Error, Result};
use crate::expr;
use crate::field::{render_tower, Field, FieldDescriptor, ResidueTower, ValuedField};
use crate::ordgroup::GroupValue;
use crate::poly::{self, Poly};

fn var_monomial(i: usize, n: usize, p: u64) -> RatFn {
    let mut e = vec![Exp::zero(); n];
    e[i] = Exp::from_integer(1);
    RatFn::monomial(1, e, p)
}

fn parse_with_names<F: Field<Elem = RatFn>>(k: &F, s: &str, names: &[String], p: u64) -> Result<RatFn> {
    let e = expr::parse(s)?;
    let n = names.len();
    expr::eval_field(k, &e, &|v| match names.iter().position(|x| x == v) {
        Some(i) => Ok(var_monomial(i, n, p)),
        None => Err(Error::Parse(format!("unknown name {v:?}"))),
    })
}

fn rat_from_bigint(n: &BigInt, nvars: usize, p: u64) -> RatFn {
    let c = n.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    RatFn::constant(c, nvars, p)
}

/// `F_p(vars)(t)` valued by the order in `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionField {
    pub p: u64,
    pub vars: Vec<String>,
    names: Vec<String>,
}

impl FunctionField {
    pub fn new(p: u64, vars: &[&str]) -> Self {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let mut names = vars.clone();
        names.push("t".into());
        FunctionField { p, vars, names }
    }

    fn n(&self) -> usize {
        self.names.len()
    }

    pub fn t(&self) -> RatFn {
        var_monomial(self.n() - 1, self.n(), self.p)
    }

    pub fn var(&self, name: &str) -> Option<RatFn> {
        self.names.iter().position(|x| x == name).map(|i| var_monomial(i, self.n(), self.p))
    }

    fn ord_t(m: &MPoly) -> Exp {
        m.terms.keys().map(|e| *e.last().unwrap()).min().unwrap()
    }

    fn at_t_zero(&self, m: &MPoly) -> MPoly {
        let low = Self::ord_t(m);
        let mut out = MPoly::zero();
        for (e, c) in &m.terms {
            if *e.last().unwrap() == low {
                out.terms.insert(e[..e.len() - 1].to_vec(), *c);
            }
        }
        out
    }
}

impl Field for FunctionField {
    type Elem = RatFn;

    fn zero(&self) -> RatFn {
        RatFn::zero(self.n(), self.p)
    }

    fn one(&self) -> RatFn {
        RatFn::constant(1, self.n(), self.p)
    }

    fn is_zero(&self, a: &RatFn) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.add(b, self.n(), self.p)
    }

    fn neg(&self, a: &RatFn) -> RatFn {
        a.neg(self.p)
    }

    fn mul(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.mul(b, self.n(), self.p)
    }

    fn inv(&self, a: &RatFn) -> Option<RatFn> {
        a.inv(self.n(), self.p)
    }

    fn from_bigint(&self, n: &BigInt) -> RatFn {
        rat_from_bigint(n, self.n(), self.p)
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn render(&self, a: &RatFn) -> String {
        a.render(&self.names, self.p)
    }

    fn equal(&self, a: &RatFn, b: &RatFn) -> bool {
        a.equal(b, self.p)
    }
}

impl ValuedField for FunctionField {
    type Residue = FnTower;

    fn rank(&self) -> usize {
        1
    }

    fn val(&self, a: &RatFn) -> GroupValue {
        if a.is_zero() {
            return GroupValue::Infinity;
        }
        let v = Self::ord_t(&a.num) - Self::ord_t(&a.den);
        GroupValue::Rank1(BigRational::new((*v.numer()).into(), (*v.denom()).into()))
    }

    fn section(&self, g: &GroupValue) -> RatFn {
        let m = g.components()[0].to_integer().to_i64().expect("small exponent");
        let mut e = vec![Exp::zero(); self.n()];
        e[self.n() - 1] = Exp::from_integer(m);
        RatFn::monomial(1, e, self.p)
    }

    fn residue(&self, a: &RatFn) -> Result<RatFn> {
        let k = self.vars.len();
        if a.is_zero() {
            return Ok(RatFn::zero(k, self.p));
        }
        let v = Self::ord_t(&a.num) - Self::ord_t(&a.den);
        if v < Exp::zero() {
            return Err(Error::NegativeValue);
        }
        if v > Exp::zero() {
            return Ok(RatFn::zero(k, self.p));
        }
        Ok(RatFn::new(self.at_t_zero(&a.num), self.at_t_zero(&a.den), k, self.p))
    }

    fn lift(&self, r: &RatFn) -> RatFn {
        let ext = |m: &MPoly| MPoly {
            terms: m
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e.push(Exp::zero());
                    (e, *c)
                })
                .collect(),
        };
        RatFn::new(ext(&r.num), ext(&r.den), self.n(), self.p)
    }

    fn residue_field(&self) -> FnTower {
        FnTower::new(self.p, &self.vars)
    }

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { kind: "Fp_rft".into(), p: self.p, vars: self.vars.clone() }
    }

    fn parse_elem(&self, s: &str) -> Result<RatFn> {
        parse_with_names(self, s, &self.names, self.p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct FnLevel {
    var: usize,
    degree: usize,
    lambda: u64,
    exps: Exps,
    minpoly: Vec<RatFn>,
    denoms_before: Vec<i64>,
}

/// `F_p(vars)` extended by `p`-power roots of monomials. Every level adjoins
/// a root of `y^(p^k) - lambda w^C` that refines the exponent lattice of one
/// variable, so elements remain quotients of polynomials with rational
/// exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnTower {
    pub p: u64,
    pub vars: Vec<String>,
    levels: Vec<FnLevel>,
    denoms: Vec<i64>,
}

impl FnTower {
    pub fn new(p: u64, vars: &[String]) -> Self {
        FnTower { p, vars: vars.to_vec(), levels: Vec::new(), denoms: vec![1; vars.len()] }
    }

    fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn var(&self, name: &str) -> Option<RatFn> {
        self.vars.iter().position(|x| x == name).map(|i| var_monomial(i, self.n(), self.p))
    }

    pub fn parse(&self, s: &str) -> Result<RatFn> {
        parse_with_names(self, s, &self.vars, self.p)
    }

    fn in_lattice(e: &[Exp], denoms: &[i64]) -> bool {
        e.iter().zip(denoms).all(|(x, d)| (x * *d).is_integer())
    }

    /// `N * D^(m-1)` as a polynomial, for an element `N / D`; its monomials
    /// decide membership questions after raising to `D^m`.
    fn spread(&self, a: &RatFn, m: u64) -> MPoly {
        if a.den.as_monomial().is_some() {
            let (e, c) = a.den.as_monomial().unwrap();
            let neg: Exps = e.iter().map(|x| -x).collect();
            return a.num.scale(inv_mod(c, self.p), &neg, self.p);
        }
        a.num.mul(&a.den.pow(m - 1, self.p, self.n()), self.p)
    }

    fn den_power(&self, a: &RatFn, m: u64) -> MPoly {
        if a.den.as_monomial().is_some() {
            return MPoly::constant(1, self.n(), self.p);
        }
        a.den.frobenius(m as i64)
    }

    /// `p`-th root inside the current top level, if there is one.
    pub fn pth_root(&self, a: &RatFn) -> Option<RatFn> {
        let p = self.p;
        let s = self.spread(a, p);
        let mut root = MPoly::zero();
        for (e, c) in &s.terms {
            let r: Exps = e.iter().map(|x| x / p as i64).collect();
            if !Self::in_lattice(&r, &self.denoms) {
                return None;
            }
            root.terms.insert(r, *c);
        }
        // (N D^(p-1))^(1/p) / D; monomial denominators were absorbed.
        let d = if a.den.as_monomial().is_some() { MPoly::constant(1, self.n(), p) } else { a.den.clone() };
        Some(RatFn::new(root, d, self.n(), p))
    }

    fn factor_rec(&self, f: &[RatFn], mult: usize, out: &mut Vec<(Poly<RatFn>, usize)>) -> Result<()> {
        let f = poly::make_monic(self, f);
        let n = poly::deg(&f);
        if n == 0 {
            return Ok(());
        }
        if n == 1 {
            out.push((f, mult));
            return Ok(());
        }
        let df = poly::derivative(self, &f);
        let p = self.p as usize;
        if df.is_empty() {
            // f = h(y^p)
            let h: Vec<RatFn> = f.iter().step_by(p).cloned().collect();
            let roots: Option<Vec<RatFn>> = h.iter().map(|c| self.pth_root(c)).collect();
            if let Some(r) = roots {
                return self.factor_rec(&r, mult * p, out);
            }
            let nonzero = f.iter().filter(|c| !self.is_zero(c)).count();
            if nonzero == 2 && !f[0].is_zero() && n.is_power_of(p) {
                // y^(p^j) - a with a not a p-th power: irreducible.
                out.push((f, mult));
                return Ok(());
            }
            return Err(Error::UnsupportedFactorization(poly::render(self, &f, "y")));
        }
        let g = poly::gcd(self, &f, &df);
        if poly::deg(&g) == 0 {
            return Err(Error::UnsupportedFactorization(poly::render(self, &f, "y")));
        }
        let q = poly::divrem(self, &f, &g).0;
        self.factor_rec(&g, mult, out)?;
        self.factor_rec(&q, mult, out)
    }
}

trait PowerOf {
    fn is_power_of(self, p: usize) -> bool;
}

impl PowerOf for usize {
    /// True when `self` is a power of `p`.
    fn is_power_of(self, p: usize) -> bool {
        let mut n = self;
        while n > 1 && n % p == 0 {
            n /= p;
        }
        n == 1
    }
}

impl Field for FnTower {
    type Elem = RatFn;

    fn zero(&self) -> RatFn {
        RatFn::zero(self.n(), self.p)
    }

    fn one(&self) -> RatFn {
        RatFn::constant(1, self.n(), self.p)
    }

    fn is_zero(&self, a: &RatFn) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.add(b, self.n(), self.p)
    }

    fn neg(&self, a: &RatFn) -> RatFn {
        a.neg(self.p)
    }

    fn mul(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.mul(b, self.n(), self.p)
    }

    fn inv(&self, a: &RatFn) -> Option<RatFn> {
        a.inv(self.n(), self.p)
    }

    fn from_bigint(&self, n: &BigInt) -> RatFn {
        rat_from_bigint(n, self.n(), self.p)
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn render(&self, a: &RatFn) -> String {
        render_tower(self, a, self.height())
    }

    fn equal(&self, a: &RatFn, b: &RatFn) -> bool {
        a.equal(b, self.p)
    }
}

impl ResidueTower for FnTower {
    fn height(&self) -> usize {
        self.levels.len()
    }

    fn level_degree(&self, level: usize) -> usize {
        self.levels[level].degree
    }

    fn generator(&self, level: usize) -> RatFn {
        let l = &self.levels[level];
        RatFn::monomial(l.lambda, l.exps.clone(), self.p)
    }

    fn adjoin(&mut self, minpoly: &[RatFn]) -> Result<RatFn> {
        let n = poly::deg(minpoly);
        let unsupported = || {
            Error::UnsupportedFactorization(format!(
                "tower step {} is not a monomial binomial of p-power degree",
                poly::render(self, minpoly, "y")
            ))
        };
        if !poly::is_monic(self, minpoly) || n < 2 || !n.is_power_of(self.p as usize) {
            return Err(unsupported());
        }
        if minpoly[1..n].iter().any(|c| !c.is_zero()) {
            return Err(unsupported());
        }
        let c = self.neg(&minpoly[0]);
        let (e, lambda) = c.as_monomial(self.p).ok_or_else(unsupported)?;
        let root: Exps = e.iter().map(|x| x / n as i64).collect();
        let off: Vec<usize> = (0..self.n())
            .filter(|&i| !(root[i] * self.denoms[i]).is_integer())
            .collect();
        if off.len() != 1 {
            return Err(unsupported());
        }
        let i = off[0];
        // The new coordinate must have order exactly n modulo the old lattice.
        let scaled = root[i] * self.denoms[i];
        if *scaled.denom() != n as i64 {
            return Err(unsupported());
        }
        let denoms_before = self.denoms.clone();
        self.denoms[i] *= n as i64;
        self.levels.push(FnLevel {
            var: i,
            degree: n,
            lambda,
            exps: root,
            minpoly: minpoly.to_vec(),
            denoms_before,
        });
        Ok(self.generator(self.height() - 1))
    }

    fn coordinates(&self, a: &RatFn, level: usize) -> Result<Vec<RatFn>> {
        let l = &self.levels[level];
        let n = l.degree as u64;
        let s = self.spread(a, n);
        let dn = self.den_power(a, n);
        let lam_inv = inv_mod(l.lambda, self.p);
        let mut classes: BTreeMap<usize, MPoly> = BTreeMap::new();
        for (e, c) in &s.terms {
            let m = (0..l.degree)
                .find(|&m| {
                    let shifted: Exps = e.iter().zip(&l.exps).map(|(x, g)| x - g * m as i64).collect();
                    Self::in_lattice(&shifted, &l.denoms_before)
                })
                .ok_or_else(|| Error::PreconditionViolated("element lies above the requested level".into()))?;
            let neg: Exps = l.exps.iter().map(|g| -(g * m as i64)).collect();
            let mut coef = *c;
            for _ in 0..m {
                coef = mul_mod(coef, lam_inv, self.p);
            }
            let term = MPoly::monomial(coef, add_exps(e, &neg), self.p);
            let slot = classes.entry(m).or_insert_with(MPoly::zero);
            *slot = slot.add(&term, self.p);
        }
        let top = classes.keys().next_back().map_or(0, |m| m + 1);
        let out = (0..top)
            .map(|m| match classes.get(&m) {
                Some(num) => RatFn::new(num.clone(), dn.clone(), self.n(), self.p),
                None => self.zero(),
            })
            .collect();
        Ok(poly::trim(self, out))
    }

    fn factor(&self, f: &[RatFn]) -> Result<Vec<(Vec<RatFn>, usize)>> {
        let mut raw = Vec::new();
        self.factor_rec(f, 1, &mut raw)?;
        let mut merged: Vec<(Poly<RatFn>, usize)> = Vec::new();
        for (g, m) in raw {
            match merged.iter_mut().find(|(h, _)| poly::equal(self, h, &g)) {
                Some(slot) => slot.1 += m,
                None => merged.push((g, m)),
            }
        }
        merged.sort_by_key(|(g, _)| (g.len(), poly::render(self, g, "y")));
        Ok(merged)
    }

    fn degree_over_base(&self, a: &RatFn) -> Result<usize> {
        let d = (0..self.n()).fold(1i64, |acc, i| acc.lcm(&exponent_denominator(a, i)));
        Ok(d as usize)
    }

    fn truncate(&mut self, height: usize) {
        if height < self.levels.len() {
            self.denoms = self.levels[height].denoms_before.clone();
            self.levels.truncate(height);
        }
    }

    fn render_base(&self, a: &RatFn) -> String {
        a.render(&self.vars, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> FunctionField {
        FunctionField::new(2, &["q", "r", "s"])
    }

    #[test]
    fn residue_kills_t() {
        let k = k2();
        let a = k.parse_elem("q + t*r").unwrap();
        let rf = k.residue_field();
        assert!(rf.equal(&k.residue(&a).unwrap(), &rf.parse("q").unwrap()));
        assert_eq!(k.val(&k.parse_elem("t^3*q/(1+t)").unwrap()), GroupValue::r1(3, 1));
        assert_eq!(k.residue(&k.parse_elem("1/t").unwrap()), Err(Error::NegativeValue));
        let back = k.residue(&k.lift(&rf.parse("q^2 + r").unwrap())).unwrap();
        assert!(rf.equal(&back, &rf.parse("q^2 + r").unwrap()));
    }

    #[test]
    fn perfect_power_of_binomial() {
        let rf = k2().residue_field();
        let q = rf.parse("q").unwrap();
        // (y^2 - q)^4 = y^8 + q^4 in characteristic 2.
        let f = vec![rf.mul(&rf.mul(&q, &q), &rf.mul(&q, &q)), rf.zero(), rf.zero(), rf.zero(), rf.zero(), rf.zero(), rf.zero(), rf.zero(), rf.one()];
        let fs = rf.factor(&f).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].1, 4);
        assert!(poly::equal(&rf, &fs[0].0, &[q.clone(), rf.zero(), rf.one()]));
        assert_eq!(poly::render(&rf, &fs[0].0, "y"), "y^2 + q");
    }

    #[test]
    fn unsupported_pattern_errors() {
        let rf = FunctionField::new(3, &["q"]).residue_field();
        let q = rf.parse("q").unwrap();
        // y^2 - q is separable and irreducible, but not a decidable pattern here.
        let f = vec![rf.neg(&q), rf.zero(), rf.one()];
        assert!(matches!(rf.factor(&f), Err(Error::UnsupportedFactorization(_))));
    }

    #[test]
    fn tower_coordinates() {
        let mut rf = FunctionField::new(3, &["q", "r"]).residue_field();
        let q = rf.parse("q").unwrap();
        let xi = rf.adjoin(&[rf.neg(&q), rf.zero(), rf.zero(), rf.one()]).unwrap();
        assert_eq!(rf.degree_over_base(&xi).unwrap(), 3);
        let a = rf.add(&rf.mul(&xi, &xi), &rf.parse("r").unwrap());
        let cs = rf.coordinates(&a, 0).unwrap();
        assert_eq!(cs.len(), 3);
        assert!(rf.equal(&cs[0], &rf.parse("r").unwrap()));
        assert!(cs[1].is_zero());
        assert!(rf.is_one(&cs[2]));
        assert_eq!(rf.render(&a), "xi0^2 + r");
        // q is a cube now: y^3 - q = (y - xi)^3.
        let fs = rf.factor(&[rf.neg(&q), rf.zero(), rf.zero(), rf.one()]).unwrap();
        assert_eq!(fs, vec![(vec![rf.neg(&xi), rf.one()], 3)]);
        // Non-monomial binomials are rejected as tower steps.
        let c = rf.parse("q + r").unwrap();
        assert!(rf.adjoin(&[c, rf.zero(), rf.zero(), rf.one()]).is_err());
    }
}
