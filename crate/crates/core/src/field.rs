//! Field abstractions. Fields are context objects: elements carry no
//! reference to their field, and every operation goes through the context.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::error::Result;
use crate::ordgroup::GroupValue;

pub trait Field: Clone + fmt::Debug {
    type Elem: Clone + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` exactly for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    /// 0 for characteristic zero.
    fn characteristic(&self) -> u64;
    fn render(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        self.equal(a, &self.one())
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b).expect("division by zero"))
    }

    /// `a^n` for an integer exponent; negative exponents invert.
    fn pow(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        let base = if n < 0 { self.inv(a).expect("zero to a negative power") } else { a.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }
}

/// Residue fields presented as towers of simple extensions of `Kv`.
///
/// Level `i` is the field obtained after adjoining generator `i`; level 0 is
/// `Kv` itself. Elements of lower levels are elements of higher ones.
pub trait ResidueTower: Field {
    fn height(&self) -> usize;
    /// Degree of generator `level` over the previous level.
    fn level_degree(&self, level: usize) -> usize;
    fn generator(&self, level: usize) -> Self::Elem;
    /// Adjoin a root of a monic polynomial irreducible over the current top
    /// level; returns the new generator.
    fn adjoin(&mut self, minpoly: &[Self::Elem]) -> Result<Self::Elem>;
    /// Coefficients `c_m` (over the field below generator `level`) with
    /// `a = sum c_m xi^m`, where `a` lies in the field just after `level`.
    fn coordinates(&self, a: &Self::Elem, level: usize) -> Result<Vec<Self::Elem>>;
    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted canonically. The leading coefficient is dropped.
    fn factor(&self, f: &[Self::Elem]) -> Result<Vec<(Vec<Self::Elem>, usize)>>;
    /// Degree of the element over `Kv`.
    fn degree_over_base(&self, a: &Self::Elem) -> Result<usize>;
    /// Drop every level above `height`.
    fn truncate(&mut self, height: usize);
    fn render_base(&self, a: &Self::Elem) -> String;
    /// Total order used to sort factors deterministically.
    fn sort_key(&self, a: &Self::Elem) -> String {
        self.render(a)
    }

    fn total_degree(&self) -> usize {
        (0..self.height()).map(|l| self.level_degree(l)).product()
    }
}

/// Render a tower element through its coordinates, naming generators
/// `xi0, xi1, ...`.
pub fn render_tower<T: ResidueTower>(t: &T, a: &T::Elem, height: usize) -> String {
    use alloc::format;
    if height == 0 {
        return t.render_base(a);
    }
    let Ok(cs) = t.coordinates(a, height - 1) else {
        return t.render_base(a);
    };
    let mut terms = Vec::new();
    for (m, c) in cs.iter().enumerate().rev() {
        if t.is_zero(c) {
            continue;
        }
        let inner = render_tower(t, c, height - 1);
        let g = match m {
            0 => String::new(),
            1 => format!("xi{}", height - 1),
            _ => format!("xi{}^{}", height - 1, m),
        };
        let term = if g.is_empty() {
            inner
        } else if t.is_one(c) {
            g
        } else if is_atomic(&inner) {
            format!("{inner}*{g}")
        } else {
            format!("({inner})*{g}")
        };
        terms.push(term);
    }
    if terms.is_empty() {
        return "0".into();
    }
    if terms.len() == 1 {
        return terms.pop().unwrap();
    }
    join_terms(&terms)
}

pub(crate) fn is_atomic(s: &str) -> bool {
    !s[1..].contains(['+', '-', ' '])
}

pub(crate) fn join_terms(terms: &[String]) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        if i == 0 {
            out.push_str(t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(t);
        }
    }
    out
}

/// How a backend describes itself in documents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub kind: String,
    pub p: u64,
    pub vars: Vec<String>,
}

/// A field with a valuation whose value group `vK` is `Z^rank`.
pub trait ValuedField: Field {
    type Residue: ResidueTower;

    fn rank(&self) -> usize;
    fn val(&self, a: &Self::Elem) -> GroupValue;
    /// Monomial section `vK -> K*`; the argument must have integer coordinates.
    fn section(&self, g: &GroupValue) -> Self::Elem;
    fn residue(&self, a: &Self::Elem) -> Result<<Self::Residue as Field>::Elem>;
    /// Canonical preimage of an element of `Kv` (tower level 0).
    fn lift(&self, r: &<Self::Residue as Field>::Elem) -> Self::Elem;
    fn residue_field(&self) -> Self::Residue;
    fn descriptor(&self) -> FieldDescriptor;
    /// Parse a coefficient in the backend's grammar.
    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;

    fn in_value_group(&self, g: &GroupValue) -> bool {
        g.is_finite() && g.components().iter().all(|c| c.is_integer())
    }
}
