//! Sparse multivariate Laurent polynomials over `F_p` with rational
//! exponents, and quotients of them.
//!
//! Rational exponents let the residue tower of a function field hold
//! `q^(1/p)` and friends as plain monomials.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Exp = Ratio<i64>;
pub type Exps = Vec<Exp>;

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (p as i128, (a % p) as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    assert!(r == 1, "not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Polynomial with coefficients in `1..p`, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MPoly {
    pub terms: BTreeMap<Exps, u64>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: u64, nvars: usize, p: u64) -> Self {
        MPoly::monomial(c, vec![Exp::zero(); nvars], p)
    }

    pub fn monomial(c: u64, e: Exps, p: u64) -> Self {
        let mut terms = BTreeMap::new();
        if c % p != 0 {
            terms.insert(e, c % p);
        }
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_monomial(&self) -> Option<(&Exps, u64)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (e, *c))
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Exps, u64)> {
        self.terms.iter().next_back().map(|(e, c)| (e, *c))
    }

    pub fn lowest(&self) -> Option<&Exps> {
        self.terms.keys().next()
    }

    fn add_term(&mut self, e: Exps, c: u64, p: u64) {
        let c = c % p;
        if c == 0 {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = (*v + c) % p;
                if *v == 0 {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, o: &Self, p: u64) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), *c, p);
        }
        out
    }

    pub fn neg(&self, p: u64) -> Self {
        MPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), p - c)).collect() }
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        self.add(&o.neg(p), p)
    }

    pub fn scale(&self, c: u64, e: &[Exp], p: u64) -> Self {
        if c % p == 0 {
            return MPoly::zero();
        }
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(x, d)| (add_exps(x, e), mul_mod(*d, c, p)))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        let mut out = MPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(add_exps(e1, e2), mul_mod(*c1, *c2, p), p);
            }
        }
        out
    }

    pub fn pow(&self, n: u64, p: u64, nvars: usize) -> Self {
        let mut acc = MPoly::constant(1, nvars, p);
        for _ in 0..n {
            acc = acc.mul(self, p);
        }
        acc
    }

    /// `f^(p^k)` in characteristic `p`: coefficients are fixed by Frobenius
    /// on `F_p`, exponents scale.
    pub fn frobenius(&self, factor: i64) -> Self {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|x| x * factor).collect(), *c))
                .collect(),
        }
    }

    /// Exact quotient by `d`, if one is found by leading-term division.
    /// Per-variable lowest and highest exponents.
    fn exponent_box(&self) -> Option<(Exps, Exps)> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        let (mut lo, mut hi) = (first.clone(), first);
        for e in it {
            for (j, x) in e.iter().enumerate() {
                lo[j] = lo[j].min(*x);
                hi[j] = hi[j].max(*x);
            }
        }
        Some((lo, hi))
    }

    pub fn exact_div(&self, d: &Self, p: u64) -> Option<Self> {
        let (dl, dc) = d.leading()?;
        let dl = dl.clone();
        let dci = inv_mod(dc, p);
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        // Degrees in each variable are additive, so the box of an exact
        // quotient is determined by the boxes of the operands.
        let (nlo, nhi) = self.exponent_box()?;
        let (dlo, dhi) = d.exponent_box()?;
        let lo = sub_exps(&nlo, &dlo);
        let hi = sub_exps(&nhi, &dhi);
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return None;
        }
        let mut rem = self.clone();
        let mut q = MPoly::zero();
        let mut steps = 0usize;
        while let Some((le, lc)) = rem.leading() {
            steps += 1;
            if steps > 4096 {
                return None;
            }
            let m = sub_exps(le, &dl);
            if m.iter().enumerate().any(|(j, x)| *x < lo[j] || *x > hi[j]) {
                return None;
            }
            let c = mul_mod(lc, dci, p);
            rem = rem.sub(&d.scale(c, &m, p), p);
            q.add_term(m, c, p);
        }
        Some(q)
    }

    pub fn render(&self, names: &[String], p: u64) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono = render_monomial(e, names);
            let cs = render_coeff(*c, p);
            let term = match (mono.is_empty(), cs.as_str()) {
                (true, _) => cs,
                (false, "1") => mono,
                (false, "-1") => format!("-{mono}"),
                (false, _) => format!("{cs}*{mono}"),
            };
            parts.push(term);
        }
        crate::field::join_terms(&parts)
    }
}

/// Coefficients render as balanced residues so `p - 1` shows as `-1`.
fn render_coeff(c: u64, p: u64) -> String {
    if p > 2 && c > p / 2 {
        format!("-{}", p - c)
    } else {
        format!("{c}")
    }
}

pub fn render_monomial(e: &[Exp], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (x, n) in e.iter().zip(names) {
        if x.is_zero() {
            continue;
        }
        if x.is_one() {
            parts.push(n.clone());
        } else if x.is_integer() {
            parts.push(format!("{n}^{x}"));
        } else {
            parts.push(format!("{n}^({x})"));
        }
    }
    parts.join("*")
}

pub fn add_exps(a: &[Exp], b: &[Exp]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_exps(a: &[Exp], b: &[Exp]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Quotient of two polynomials, kept with a monic (or trivial) denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    pub num: MPoly,
    pub den: MPoly,
}

impl RatFn {
    pub fn zero(nvars: usize, p: u64) -> Self {
        RatFn { num: MPoly::zero(), den: MPoly::constant(1, nvars, p) }
    }

    pub fn from_poly(num: MPoly, nvars: usize, p: u64) -> Self {
        RatFn { num, den: MPoly::constant(1, nvars, p) }
    }

    pub fn constant(c: u64, nvars: usize, p: u64) -> Self {
        RatFn::from_poly(MPoly::constant(c, nvars, p), nvars, p)
    }

    pub fn monomial(c: u64, e: Exps, p: u64) -> Self {
        let n = e.len();
        RatFn::from_poly(MPoly::monomial(c, e, p), n, p)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn new(num: MPoly, den: MPoly, nvars: usize, p: u64) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFn::zero(nvars, p);
        }
        if let Some((e, c)) = den.as_monomial() {
            let neg: Exps = e.iter().map(|x| -x).collect();
            return RatFn::from_poly(num.scale(inv_mod(c, p), &neg, p), nvars, p);
        }
        // Move the denominator's lowest monomial into the numerator so that
        // equal quotients get equal shapes, then make the leading term monic.
        let low: Exps = den.lowest().unwrap().iter().map(|x| -x).collect();
        let (_, lc) = den.leading().unwrap();
        let s = inv_mod(lc, p);
        let den = den.scale(s, &low, p);
        let num = num.scale(s, &low, p);
        if let Some(q) = num.exact_div(&den, p) {
            return RatFn::from_poly(q, nvars, p);
        }
        RatFn { num, den }
    }

    pub fn add(&self, o: &Self, nvars: usize, p: u64) -> Self {
        if self.den == o.den {
            return RatFn::new(self.num.add(&o.num, p), self.den.clone(), nvars, p);
        }
        RatFn::new(
            self.num.mul(&o.den, p).add(&o.num.mul(&self.den, p), p),
            self.den.mul(&o.den, p),
            nvars,
            p,
        )
    }

    pub fn neg(&self, p: u64) -> Self {
        RatFn { num: self.num.neg(p), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self, nvars: usize, p: u64) -> Self {
        RatFn::new(self.num.mul(&o.num, p), self.den.mul(&o.den, p), nvars, p)
    }

    pub fn inv(&self, nvars: usize, p: u64) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(RatFn::new(self.den.clone(), self.num.clone(), nvars, p))
    }

    pub fn equal(&self, o: &Self, p: u64) -> bool {
        self.num.mul(&o.den, p) == o.num.mul(&self.den, p)
    }

    pub fn frobenius(&self, factor: i64) -> Self {
        RatFn { num: self.num.frobenius(factor), den: self.den.frobenius(factor) }
    }

    /// Single monomial `c * w^e`, if the quotient is one.
    pub fn as_monomial(&self, p: u64) -> Option<(Exps, u64)> {
        let (dn, dc) = self.den.as_monomial()?;
        let (nn, nc) = self.num.as_monomial()?;
        Some((sub_exps(nn, dn), mul_mod(nc, inv_mod(dc, p), p)))
    }

    pub fn render(&self, names: &[String], p: u64) -> String {
        let n = self.num.render(names, p);
        if self.den.as_monomial().is_some_and(|(e, c)| c == 1 && e.iter().all(|x| x.is_zero())) {
            return n;
        }
        format!("({})/({})", n, self.den.render(names, p))
    }

    /// All exponents appearing in numerator and denominator.
    pub fn exponents(&self) -> impl Iterator<Item = &Exps> {
        self.num.terms.keys().chain(self.den.terms.keys())
    }
}

/// Least common multiple of the exponent denominators in coordinate `i`.
pub fn exponent_denominator(f: &RatFn, i: usize) -> i64 {
    f.exponents().fold(1i64, |acc, e| acc.lcm(e[i].denom()))
}
