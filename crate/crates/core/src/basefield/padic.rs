//! `Q` with the `p`-adic valuation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::finite::{FfElem, FiniteTower};
use crate::error::{Error, Result};
use crate::expr;
use crate::field::{Field, FieldDescriptor, ValuedField};
use crate::ordgroup::GroupValue;

/// `ord_p` of a nonzero integer.
pub fn ord_p_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// `ord_p` of a nonzero rational.
pub fn ord_p(q: &BigRational, p: u64) -> i64 {
    ord_p_int(q.numer(), p) - ord_p_int(q.denom(), p)
}

/// Residue of a `p`-integral rational in `0..p`.
pub fn residue_mod(q: &BigRational, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let n = q.numer().mod_floor(&pb).to_u64().unwrap();
    let d = q.denom().mod_floor(&pb).to_u64().unwrap();
    super::mpoly::mul_mod(n, super::mpoly::inv_mod(d, p), p)
}

/// Residue of a `p`-integral rational modulo `p^k`, in `0..p^k`.
pub fn residue_mod_power(q: &BigRational, p: u64, k: u32) -> BigInt {
    let m = BigInt::from(p).pow(k);
    let d = q.denom().mod_floor(&m);
    let e = d.extended_gcd(&m);
    (q.numer() * e.x).mod_floor(&m)
}

pub fn render_rational(q: &BigRational) -> String {
    q.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicRationals {
    pub p: u64,
}

impl PadicRationals {
    pub fn new(p: u64) -> Self {
        PadicRationals { p }
    }
}

impl Field for PadicRationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }

    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn render(&self, a: &BigRational) -> String {
        render_rational(a)
    }

    fn equal(&self, a: &BigRational, b: &BigRational) -> bool {
        a == b
    }
}

impl ValuedField for PadicRationals {
    type Residue = FiniteTower;

    fn rank(&self) -> usize {
        1
    }

    fn val(&self, a: &BigRational) -> GroupValue {
        if a.is_zero() {
            return GroupValue::Infinity;
        }
        GroupValue::Rank1(BigRational::from_integer(ord_p(a, self.p).into()))
    }

    fn section(&self, g: &GroupValue) -> BigRational {
        let m = g.components()[0].to_integer().to_i64().expect("small exponent");
        let p = BigRational::from_integer(self.p.into());
        if m >= 0 {
            num_traits::pow(p, m as usize)
        } else {
            num_traits::pow(p.recip(), m.unsigned_abs() as usize)
        }
    }

    fn residue(&self, a: &BigRational) -> Result<FfElem> {
        if a.is_zero() {
            return Ok(FfElem::Base(0));
        }
        match ord_p(a, self.p) {
            v if v < 0 => Err(Error::NegativeValue),
            v if v > 0 => Ok(FfElem::Base(0)),
            _ => Ok(FfElem::Base(residue_mod(a, self.p))),
        }
    }

    fn lift(&self, r: &FfElem) -> BigRational {
        match r {
            FfElem::Base(c) => BigRational::from_integer((*c).into()),
            _ => panic!("lift of an element outside Kv"),
        }
    }

    fn residue_field(&self) -> FiniteTower {
        FiniteTower::new(self.p)
    }

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { kind: "Q_padic".into(), p: self.p, vars: Vec::new() }
    }

    fn parse_elem(&self, s: &str) -> Result<BigRational> {
        let e = expr::parse(s)?;
        expr::eval_field(self, &e, &|v| Err(Error::Parse(format!("unknown name {v:?}"))))
    }
}

/// `|q|` helper for rendering magnitudes.
pub fn abs(q: &BigRational) -> BigRational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordgroup::rat;
    use proptest::prelude::*;

    #[test]
    fn values_and_residues() {
        let k = PadicRationals::new(2);
        assert_eq!(k.val(&rat(12, 1)), GroupValue::r1(2, 1));
        assert_eq!(k.val(&rat(3, 8)), GroupValue::r1(-3, 1));
        assert_eq!(k.residue(&rat(3, 5)).unwrap(), FfElem::Base(1));
        assert_eq!(k.residue(&rat(1, 2)), Err(Error::NegativeValue));
        assert_eq!(k.residue(&k.lift(&FfElem::Base(1))).unwrap(), FfElem::Base(1));
        assert_eq!(k.section(&GroupValue::r1(3, 1)), rat(8, 1));
        assert_eq!(k.parse_elem("\u{2212}3/4").unwrap(), rat(-3, 4));
    }

    fn nonzero_rat() -> impl Strategy<Value = BigRational> {
        (-500i64..500, 1i64..500).prop_filter_map("nonzero", |(n, d)| (n != 0).then(|| rat(n, d)))
    }

    proptest! {
        #[test]
        fn valuation_laws(a in nonzero_rat(), b in nonzero_rat(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let k = PadicRationals::new(p);
            prop_assert_eq!(k.val(&(&a * &b)), k.val(&a).add(&k.val(&b)));
            prop_assert!(k.val(&(&a + &b)) >= k.val(&a).min(k.val(&b)));
        }

        #[test]
        fn residue_is_a_homomorphism(a in nonzero_rat(), b in nonzero_rat()) {
            let k = PadicRationals::new(3);
            let rf = k.residue_field();
            prop_assume!(k.val(&a) >= GroupValue::zero(1) && k.val(&b) >= GroupValue::zero(1));
            let (ra, rb) = (k.residue(&a).unwrap(), k.residue(&b).unwrap());
            prop_assert_eq!(k.residue(&(&a * &b)).unwrap(), rf.mul(&ra, &rb));
            prop_assert_eq!(k.residue(&(&a + &b)).unwrap(), rf.add(&ra, &rb));
            prop_assert_eq!(rf.is_zero(&ra), k.val(&a) > GroupValue::zero(1));
        }
    }
}
