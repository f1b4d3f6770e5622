//! Factorization over finite fields: squarefree decomposition, distinct
//! degree splitting, and Cantor–Zassenhaus equal-degree splitting (with the
//! trace map in characteristic 2).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::field::Field;
use crate::poly::{self, Poly};

pub trait FiniteField: Field {
    /// `[F : F_p]`.
    fn extension_degree(&self) -> u64;
    fn random(&self, rng: &mut ChaCha8Rng) -> Self::Elem;

    fn order(&self) -> BigUint {
        BigUint::from(self.characteristic()).pow(self.extension_degree() as u32)
    }

    /// The unique `p`-th root, `a^(q/p)`.
    fn pth_root(&self, a: &Self::Elem) -> Self::Elem {
        let mut r = a.clone();
        for _ in 1..self.extension_degree() {
            r = self.pow(&r, self.characteristic() as i64);
        }
        r
    }
}

fn pth_root_poly<F: FiniteField>(k: &F, f: &[F::Elem]) -> Poly<F::Elem> {
    let p = k.characteristic() as usize;
    let out = f.iter().step_by(p).map(|c| k.pth_root(c)).collect();
    poly::trim(k, out)
}

/// Squarefree decomposition of a monic polynomial: pairwise coprime
/// squarefree factors with multiplicities.
pub fn squarefree<F: FiniteField>(k: &F, f: &[F::Elem]) -> Vec<(Poly<F::Elem>, usize)> {
    let p = k.characteristic() as usize;
    let mut out = Vec::new();
    if poly::deg(f) == 0 {
        return out;
    }
    let fp = poly::derivative(k, f);
    if fp.is_empty() {
        for (g, m) in squarefree(k, &pth_root_poly(k, f)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = poly::gcd(k, f, &fp);
    let mut w = poly::divrem(k, f, &c).0;
    let mut i = 1;
    while poly::deg(&w) > 0 {
        let y = poly::gcd(k, &w, &c);
        let z = poly::divrem(k, &w, &y).0;
        if poly::deg(&z) > 0 {
            out.push((z, i));
        }
        i += 1;
        c = poly::divrem(k, &c, &y).0;
        w = y;
    }
    if poly::deg(&c) > 0 {
        for (g, m) in squarefree(k, &pth_root_poly(k, &c)) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of a
/// common degree.
pub fn distinct_degree<F: FiniteField>(k: &F, f: &[F::Elem]) -> Vec<(Poly<F::Elem>, usize)> {
    let q = k.order();
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let mut h = poly::rem(k, &poly::x(k), &rest);
    let mut i = 1;
    while poly::deg(&rest) >= 2 * i {
        h = poly::pow_mod(k, &h, &q, &rest);
        let g = poly::gcd(k, &rest, &poly::sub(k, &h, &poly::x(k)));
        if poly::deg(&g) > 0 {
            rest = poly::divrem(k, &rest, &g).0;
            h = poly::rem(k, &h, &rest);
            out.push((g, i));
        }
        i += 1;
    }
    if poly::deg(&rest) > 0 {
        let d = poly::deg(&rest);
        out.push((rest, d));
    }
    out
}

fn equal_degree<F: FiniteField>(
    k: &F,
    f: &[F::Elem],
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Poly<F::Elem>> {
    let n = poly::deg(f);
    if n == d {
        return vec![f.to_vec()];
    }
    let p = k.characteristic();
    let q = k.order();
    loop {
        let a: Poly<F::Elem> = poly::trim(k, (0..n).map(|_| k.random(rng)).collect());
        if poly::deg(&a) == 0 {
            continue;
        }
        let b = if p == 2 {
            // Trace from F_{q^d} to F_2.
            let steps = k.extension_degree() as usize * d;
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..steps {
                t = poly::mul_mod(k, &t, &t, f);
                acc = poly::add(k, &acc, &t);
            }
            acc
        } else {
            let e = (q.pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            poly::sub(k, &poly::pow_mod(k, &a, &e, f), &[k.one()])
        };
        let g = poly::gcd(k, f, &b);
        let dg = poly::deg(&g);
        if dg > 0 && dg < n {
            let h = poly::divrem(k, f, &g).0;
            let mut out = equal_degree(k, &g, d, rng);
            out.extend(equal_degree(k, &h, d, rng));
            return out;
        }
    }
}

/// Monic irreducible factors with multiplicities, unsorted.
pub fn factor<F: FiniteField>(k: &F, f: &[F::Elem]) -> Vec<(Poly<F::Elem>, usize)> {
    let f = poly::make_monic(k, f);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6c_7664 ^ f.len() as u64);
    let mut out = Vec::new();
    for (g, m) in squarefree(k, &f) {
        for (h, d) in distinct_degree(k, &g) {
            for irr in equal_degree(k, &h, d, &mut rng) {
                out.push((irr, m));
            }
        }
    }
    out
}
