//! Finite residue fields `F_p(xi0, xi1, ...)` as towers of simple
//! extensions, each generator with a monic minimal polynomial over the level
//! below.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

use super::ffactor::{self, FiniteField};
use super::mpoly::{inv_mod, mul_mod};
use crate::error::{Error, Result};
use crate::field::{render_tower, Field, ResidueTower};
use crate::poly;

/// Element of a finite tower. `Ext(l, cs)` is `sum cs[m] xi_l^m` with every
/// `cs[m]` living strictly below level `l`; the canonical form has at least
/// two coefficients and a nonzero top one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FfElem {
    Base(u64),
    Ext(usize, Vec<FfElem>),
}

impl FfElem {
    fn tag(&self) -> Option<usize> {
        match self {
            FfElem::Base(_) => None,
            FfElem::Ext(l, _) => Some(*l),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTower {
    p: u64,
    minpolys: Vec<Vec<FfElem>>,
}

impl FiniteTower {
    pub fn new(p: u64) -> Self {
        FiniteTower { p, minpolys: Vec::new() }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn coeffs_at(&self, a: &FfElem, l: usize) -> Vec<FfElem> {
        match a {
            FfElem::Ext(m, cs) if *m == l => cs.clone(),
            _ => vec![a.clone()],
        }
    }

    fn make(&self, l: usize, mut cs: Vec<FfElem>) -> FfElem {
        while cs.last().is_some_and(|c| self.is_zero(c)) {
            cs.pop();
        }
        match cs.len() {
            0 => FfElem::Base(0),
            1 => cs.pop().unwrap(),
            _ => FfElem::Ext(l, cs),
        }
    }

    fn max_tag(a: &FfElem, b: &FfElem) -> Option<usize> {
        match (a.tag(), b.tag()) {
            (None, t) | (t, None) => t,
            (Some(x), Some(y)) => Some(x.max(y)),
        }
    }

    fn random_at(&self, height: usize, rng: &mut ChaCha8Rng) -> FfElem {
        if height == 0 {
            return FfElem::Base(rng.next_u64() % self.p);
        }
        let l = height - 1;
        let d = poly::deg(&self.minpolys[l]);
        let cs = (0..d).map(|_| self.random_at(l, rng)).collect();
        self.make(l, cs)
    }
}

impl Field for FiniteTower {
    type Elem = FfElem;

    fn zero(&self) -> FfElem {
        FfElem::Base(0)
    }

    fn one(&self) -> FfElem {
        FfElem::Base(1)
    }

    fn is_zero(&self, a: &FfElem) -> bool {
        matches!(a, FfElem::Base(0))
    }

    fn add(&self, a: &FfElem, b: &FfElem) -> FfElem {
        match Self::max_tag(a, b) {
            None => match (a, b) {
                (FfElem::Base(x), FfElem::Base(y)) => FfElem::Base((x + y) % self.p),
                _ => unreachable!(),
            },
            Some(l) => {
                let (x, y) = (self.coeffs_at(a, l), self.coeffs_at(b, l));
                let n = x.len().max(y.len());
                let z = self.zero();
                let cs = (0..n)
                    .map(|i| self.add(x.get(i).unwrap_or(&z), y.get(i).unwrap_or(&z)))
                    .collect();
                self.make(l, cs)
            }
        }
    }

    fn neg(&self, a: &FfElem) -> FfElem {
        match a {
            FfElem::Base(x) => FfElem::Base((self.p - x) % self.p),
            FfElem::Ext(l, cs) => FfElem::Ext(*l, cs.iter().map(|c| self.neg(c)).collect()),
        }
    }

    fn mul(&self, a: &FfElem, b: &FfElem) -> FfElem {
        match (a, b) {
            (FfElem::Base(x), FfElem::Base(y)) => FfElem::Base(mul_mod(*x, *y, self.p)),
            _ => {
                let l = Self::max_tag(a, b).unwrap();
                if a.tag() != Some(l) || b.tag() != Some(l) {
                    // Scalar times element of level l.
                    let (s, v) = if a.tag() == Some(l) { (b, a) } else { (a, b) };
                    let cs = self.coeffs_at(v, l).iter().map(|c| self.mul(c, s)).collect();
                    return self.make(l, cs);
                }
                let prod = poly::mul(self, &self.coeffs_at(a, l), &self.coeffs_at(b, l));
                let r = poly::rem(self, &prod, &self.minpolys[l]);
                self.make(l, r)
            }
        }
    }

    fn inv(&self, a: &FfElem) -> Option<FfElem> {
        match a {
            FfElem::Base(0) => None,
            FfElem::Base(x) => Some(FfElem::Base(inv_mod(*x, self.p))),
            FfElem::Ext(l, cs) => {
                let (g, s, _) = poly::ext_gcd(self, cs, &self.minpolys[*l]);
                debug_assert_eq!(g.len(), 1);
                Some(self.make(*l, s))
            }
        }
    }

    fn from_bigint(&self, n: &BigInt) -> FfElem {
        FfElem::Base(n.mod_floor(&BigInt::from(self.p)).to_u64().unwrap())
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn render(&self, a: &FfElem) -> String {
        render_tower(self, a, self.height())
    }

    fn equal(&self, a: &FfElem, b: &FfElem) -> bool {
        a == b
    }
}

impl FiniteField for FiniteTower {
    fn extension_degree(&self) -> u64 {
        self.total_degree() as u64
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> FfElem {
        self.random_at(self.height(), rng)
    }
}

impl ResidueTower for FiniteTower {
    fn height(&self) -> usize {
        self.minpolys.len()
    }

    fn level_degree(&self, level: usize) -> usize {
        poly::deg(&self.minpolys[level])
    }

    fn generator(&self, level: usize) -> FfElem {
        FfElem::Ext(level, vec![FfElem::Base(0), FfElem::Base(1)])
    }

    fn adjoin(&mut self, minpoly: &[FfElem]) -> Result<FfElem> {
        if !poly::is_monic(self, minpoly) || poly::deg(minpoly) < 2 {
            return Err(Error::PreconditionViolated(
                "tower step needs a monic polynomial of degree at least 2".into(),
            ));
        }
        let f = ffactor::factor(self, minpoly);
        if f.len() != 1 || f[0].1 != 1 {
            return Err(Error::PreconditionViolated(format!(
                "{} is reducible",
                poly::render(self, minpoly, "y")
            )));
        }
        self.minpolys.push(minpoly.to_vec());
        Ok(self.generator(self.height() - 1))
    }

    fn coordinates(&self, a: &FfElem, level: usize) -> Result<Vec<FfElem>> {
        match a.tag() {
            Some(l) if l > level => Err(Error::PreconditionViolated(
                "element lies above the requested level".into(),
            )),
            _ => Ok(poly::trim(self, self.coeffs_at(a, level))),
        }
    }

    fn factor(&self, f: &[FfElem]) -> Result<Vec<(Vec<FfElem>, usize)>> {
        let mut out = ffactor::factor(self, f);
        out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        Ok(out)
    }

    fn degree_over_base(&self, a: &FfElem) -> Result<usize> {
        let mut c = self.pow(a, self.p as i64);
        let mut d = 1;
        while &c != a {
            c = self.pow(&c, self.p as i64);
            d += 1;
        }
        Ok(d)
    }

    fn truncate(&mut self, height: usize) {
        self.minpolys.truncate(height);
    }

    fn render_base(&self, a: &FfElem) -> String {
        match a {
            FfElem::Base(x) => x.to_string(),
            _ => format!("{a:?}"),
        }
    }
}
