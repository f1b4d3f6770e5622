//! `Q(t)` with the rank-2 valuation `v(u) = (ord_t u, ord_p in(u))`, where
//! `in(u)` is the lowest coefficient ratio of `u`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::finite::{FfElem, FiniteTower};
use super::padic::{ord_p, residue_mod, PadicRationals};
use crate::error::{Error, Result};
use crate::expr;
use crate::field::{Field, FieldDescriptor, ValuedField};
use crate::ordgroup::GroupValue;
use crate::poly::{self, Poly};

/// A reduced quotient of polynomials in `t`, denominator monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QtElem {
    pub num: Poly<BigRational>,
    pub den: Poly<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionsRank2 {
    pub p: u64,
    q: PadicRationals,
}

fn low(a: &[BigRational]) -> usize {
    a.iter().position(|c| !c.is_zero()).expect("nonzero polynomial")
}

impl RationalFunctionsRank2 {
    pub fn new(p: u64) -> Self {
        RationalFunctionsRank2 { p, q: PadicRationals::new(p) }
    }

    pub fn make(&self, num: Poly<BigRational>, den: Poly<BigRational>) -> QtElem {
        let k = &self.q;
        let num = poly::trim(k, num);
        let den = poly::trim(k, den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return QtElem { num, den: vec![BigRational::one()] };
        }
        let g = poly::gcd(k, &num, &den);
        let (mut n, mut d) = (poly::divrem(k, &num, &g).0, poly::divrem(k, &den, &g).0);
        let lc = d.last().unwrap().clone();
        if !lc.is_one() {
            n = poly::scale(k, &n, &lc.recip());
            d = poly::scale(k, &d, &lc.recip());
        }
        QtElem { num: n, den: d }
    }

    pub fn t(&self) -> QtElem {
        QtElem { num: vec![BigRational::zero(), BigRational::one()], den: vec![BigRational::one()] }
    }

    pub fn constant(&self, c: BigRational) -> QtElem {
        self.make(vec![c], vec![BigRational::one()])
    }

    /// Laurent expansion: `(start, coefficients)` with `u = sum c_j t^(start+j)`
    /// for the first `terms` coefficients.
    pub fn laurent(&self, u: &QtElem, terms: usize) -> (i64, Vec<BigRational>) {
        if u.num.is_empty() {
            return (0, vec![BigRational::zero(); terms]);
        }
        let (ln, ld) = (low(&u.num), low(&u.den));
        let n = &u.num[ln..];
        let d = &u.den[ld..];
        let d0inv = d[0].recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(terms);
        for j in 0..terms {
            let mut acc = n.get(j).cloned().unwrap_or_else(BigRational::zero);
            for i in 1..=j.min(d.len() - 1) {
                acc -= &d[i] * &out[j - i];
            }
            out.push(acc * &d0inv);
        }
        (ln as i64 - ld as i64, out)
    }
}

impl Field for RationalFunctionsRank2 {
    type Elem = QtElem;

    fn zero(&self) -> QtElem {
        QtElem { num: Vec::new(), den: vec![BigRational::one()] }
    }

    fn one(&self) -> QtElem {
        self.constant(BigRational::one())
    }

    fn is_zero(&self, a: &QtElem) -> bool {
        a.num.is_empty()
    }

    fn add(&self, a: &QtElem, b: &QtElem) -> QtElem {
        let k = &self.q;
        if a.den == b.den {
            return self.make(poly::add(k, &a.num, &b.num), a.den.clone());
        }
        self.make(
            poly::add(k, &poly::mul(k, &a.num, &b.den), &poly::mul(k, &b.num, &a.den)),
            poly::mul(k, &a.den, &b.den),
        )
    }

    fn neg(&self, a: &QtElem) -> QtElem {
        QtElem { num: poly::neg(&self.q, &a.num), den: a.den.clone() }
    }

    fn mul(&self, a: &QtElem, b: &QtElem) -> QtElem {
        let k = &self.q;
        self.make(poly::mul(k, &a.num, &b.num), poly::mul(k, &a.den, &b.den))
    }

    fn inv(&self, a: &QtElem) -> Option<QtElem> {
        (!a.num.is_empty()).then(|| self.make(a.den.clone(), a.num.clone()))
    }

    fn from_bigint(&self, n: &BigInt) -> QtElem {
        self.constant(BigRational::from_integer(n.clone()))
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn render(&self, a: &QtElem) -> String {
        let n = poly::render(&self.q, &a.num, "t");
        if a.den.len() == 1 {
            return n;
        }
        format!("({})/({})", n, poly::render(&self.q, &a.den, "t"))
    }

    fn equal(&self, a: &QtElem, b: &QtElem) -> bool {
        a == b
    }
}

impl ValuedField for RationalFunctionsRank2 {
    type Residue = FiniteTower;

    fn rank(&self) -> usize {
        2
    }

    fn val(&self, a: &QtElem) -> GroupValue {
        if a.num.is_empty() {
            return GroupValue::Infinity;
        }
        let (ln, ld) = (low(&a.num), low(&a.den));
        let init = &a.num[ln] / &a.den[ld];
        GroupValue::Rank2(
            BigRational::from_integer(BigInt::from(ln as i64 - ld as i64)),
            BigRational::from_integer(BigInt::from(ord_p(&init, self.p))),
        )
    }

    fn section(&self, g: &GroupValue) -> QtElem {
        let c = g.components();
        let a = c[0].to_integer().to_i64().expect("small exponent");
        let b = c[1].to_integer().to_i64().expect("small exponent");
        let pb = self.q.section(&GroupValue::Rank1(BigRational::from_integer(b.into())));
        let mut tp = vec![BigRational::zero(); a.unsigned_abs() as usize];
        tp.push(BigRational::one());
        if a >= 0 {
            self.make(poly::scale(&self.q, &tp, &pb), vec![BigRational::one()])
        } else {
            self.make(vec![pb], tp)
        }
    }

    fn residue(&self, a: &QtElem) -> Result<FfElem> {
        let v = self.val(a);
        if !v.is_finite() {
            return Ok(FfElem::Base(0));
        }
        if v < GroupValue::zero(2) {
            return Err(Error::NegativeValue);
        }
        if v > GroupValue::zero(2) {
            return Ok(FfElem::Base(0));
        }
        let init = &a.num[low(&a.num)] / &a.den[low(&a.den)];
        Ok(FfElem::Base(residue_mod(&init, self.p)))
    }

    fn lift(&self, r: &FfElem) -> QtElem {
        self.constant(self.q.lift(r))
    }

    fn residue_field(&self) -> FiniteTower {
        FiniteTower::new(self.p)
    }

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { kind: "Qt_rank2".into(), p: self.p, vars: vec!["t".into()] }
    }

    fn parse_elem(&self, s: &str) -> Result<QtElem> {
        let e = expr::parse(s)?;
        expr::eval_field(self, &e, &|v| match v {
            "t" => Ok(self.t()),
            _ => Err(Error::Parse(format!("unknown name {v:?}"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordgroup::rat;

    #[test]
    fn rank_two_values() {
        let k = RationalFunctionsRank2::new(5);
        assert_eq!(k.val(&k.parse_elem("5t^2/(1+t)").unwrap()), GroupValue::r2(2, 1));
        assert_eq!(k.val(&k.parse_elem("1/25 + t").unwrap()), GroupValue::r2(0, -2));
        assert_eq!(k.val(&k.parse_elem("t/(3+5t)").unwrap()), GroupValue::r2(1, 0));
        assert_eq!(k.residue(&k.parse_elem("7 + t/5").unwrap()).unwrap(), FfElem::Base(2));
        assert_eq!(k.residue(&k.parse_elem("1/5 + t").unwrap()), Err(Error::NegativeValue));
        let s = k.section(&GroupValue::r2(-1, 2));
        assert_eq!(k.val(&s), GroupValue::r2(-1, 2));
    }

    #[test]
    fn laurent_expansion() {
        let k = RationalFunctionsRank2::new(5);
        let u = k.parse_elem("1/(t - t^2)").unwrap();
        let (start, cs) = k.laurent(&u, 4);
        assert_eq!(start, -1);
        assert_eq!(cs, vec![rat(1, 1); 4]);
    }
}
