//! Dense univariate polynomials over a [`Field`], lowest degree first.
//!
//! Polynomials are plain coefficient vectors kept trimmed (no trailing zeros);
//! the zero polynomial is the empty vector.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{join_terms, Field};

pub type Poly<E> = Vec<E>;

pub fn trim<F: Field>(k: &F, mut p: Poly<F::Elem>) -> Poly<F::Elem> {
    while p.last().is_some_and(|c| k.is_zero(c)) {
        p.pop();
    }
    p
}

pub fn degree<E>(p: &[E]) -> Option<usize> {
    p.len().checked_sub(1)
}

/// Degree with the zero polynomial mapped to 0.
pub fn deg<E>(p: &[E]) -> usize {
    p.len().saturating_sub(1)
}

pub fn constant<F: Field>(k: &F, c: F::Elem) -> Poly<F::Elem> {
    trim(k, vec![c])
}

pub fn x<F: Field>(k: &F) -> Poly<F::Elem> {
    vec![k.zero(), k.one()]
}

/// `x - a`.
pub fn x_minus<F: Field>(k: &F, a: &F::Elem) -> Poly<F::Elem> {
    vec![k.neg(a), k.one()]
}

/// `x^n`.
pub fn monomial<F: Field>(k: &F, c: F::Elem, n: usize) -> Poly<F::Elem> {
    let mut p = vec![k.zero(); n];
    p.push(c);
    trim(k, p)
}

pub fn lc<F: Field>(k: &F, p: &[F::Elem]) -> F::Elem {
    p.last().cloned().unwrap_or_else(|| k.zero())
}

pub fn is_monic<F: Field>(k: &F, p: &[F::Elem]) -> bool {
    p.last().is_some_and(|c| k.is_one(c))
}

pub fn add<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let z = k.zero();
    let out = (0..n)
        .map(|i| k.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    trim(k, out)
}

pub fn neg<F: Field>(k: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    a.iter().map(|c| k.neg(c)).collect()
}

pub fn sub<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let z = k.zero();
    let out = (0..n)
        .map(|i| k.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    trim(k, out)
}

pub fn scale<F: Field>(k: &F, a: &[F::Elem], c: &F::Elem) -> Poly<F::Elem> {
    if k.is_zero(c) {
        return Vec::new();
    }
    trim(k, a.iter().map(|x| k.mul(x, c)).collect())
}

pub fn mul<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if k.is_zero(y) {
                continue;
            }
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    trim(k, out)
}

pub fn pow<F: Field>(k: &F, a: &[F::Elem], n: usize) -> Poly<F::Elem> {
    let mut acc = vec![k.one()];
    for _ in 0..n {
        acc = mul(k, &acc, a);
    }
    acc
}

pub fn equal<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> bool {
    sub(k, a, b).is_empty()
}

pub fn make_monic<F: Field>(k: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(c) => scale(k, a, &k.inv(c).expect("trimmed polynomial")),
    }
}

/// Division with remainder by a nonzero polynomial.
pub fn divrem<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F::Elem>, Poly<F::Elem>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = k.inv(&b[db]).expect("trimmed polynomial");
    let monic = k.is_one(&b[db]);
    let mut r: Vec<F::Elem> = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), trim(k, r));
    }
    let mut q = vec![k.zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        if k.is_zero(&r[i]) {
            continue;
        }
        let c = if monic { r[i].clone() } else { k.mul(&r[i], &lead_inv) };
        let s = i - db;
        for (j, bj) in b.iter().enumerate() {
            if !k.is_zero(bj) {
                r[s + j] = k.sub(&r[s + j], &k.mul(&c, bj));
            }
        }
        q[s] = c;
    }
    r.truncate(db);
    (trim(k, q), trim(k, r))
}

pub fn rem<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    divrem(k, a, b).1
}

pub fn mul_mod<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Poly<F::Elem> {
    rem(k, &mul(k, a, b), m)
}

pub fn pow_mod<F: Field>(k: &F, a: &[F::Elem], e: &BigUint, m: &[F::Elem]) -> Poly<F::Elem> {
    let mut acc = rem(k, &[k.one()], m);
    let base = rem(k, a, m);
    for i in (0..e.bits()).rev() {
        acc = mul_mod(k, &acc, &acc, m);
        if e.bit(i) {
            acc = mul_mod(k, &acc, &base, m);
        }
    }
    acc
}

/// Coefficients `a_n` with `deg a_n < deg phi` and `f = sum a_n phi^n`.
pub fn phi_expansion<F: Field>(k: &F, f: &[F::Elem], phi: &[F::Elem]) -> Result<Vec<Poly<F::Elem>>> {
    if !is_monic(k, phi) || phi.len() < 2 {
        return Err(Error::NonMonic);
    }
    let mut out = Vec::new();
    let mut cur: Poly<F::Elem> = f.to_vec();
    while !cur.is_empty() {
        let (q, r) = divrem(k, &cur, phi);
        out.push(r);
        cur = q;
    }
    Ok(out)
}

/// Inverse of [`phi_expansion`].
pub fn from_phi_expansion<F: Field>(k: &F, coeffs: &[Poly<F::Elem>], phi: &[F::Elem]) -> Poly<F::Elem> {
    let mut acc = Vec::new();
    for c in coeffs.iter().rev() {
        acc = add(k, &mul(k, &acc, phi), c);
    }
    acc
}

/// Monic gcd; zero when both inputs are zero.
pub fn gcd<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = rem(k, &a, &b);
        a = b;
        b = r;
    }
    make_monic(k, &a)
}

/// `(g, s, t)` with `s a + t b = g`, `g` the monic gcd.
pub fn ext_gcd<F: Field>(
    k: &F,
    a: &[F::Elem],
    b: &[F::Elem],
) -> (Poly<F::Elem>, Poly<F::Elem>, Poly<F::Elem>) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![k.one()], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![k.one()]);
    while !r1.is_empty() {
        let (q, r) = divrem(k, &r0, &r1);
        let s = sub(k, &s0, &mul(k, &q, &s1));
        let t = sub(k, &t0, &mul(k, &q, &t1));
        r0 = core::mem::replace(&mut r1, r);
        s0 = core::mem::replace(&mut s1, s);
        t0 = core::mem::replace(&mut t1, t);
    }
    match r0.last() {
        None => (r0, s0, t0),
        Some(c) => {
            let ci = k.inv(c).unwrap();
            (scale(k, &r0, &ci), scale(k, &s0, &ci), scale(k, &t0, &ci))
        }
    }
}

pub fn derivative<F: Field>(k: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| k.mul(c, &k.from_int(i as i64)))
        .collect();
    trim(k, out)
}

pub fn eval<F: Field>(k: &F, a: &[F::Elem], at: &F::Elem) -> F::Elem {
    a.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, at), c))
}

/// Resultant by the Euclidean remainder sequence, exact over any field.
pub fn resultant<F: Field>(k: &F, f: &[F::Elem], g: &[F::Elem]) -> F::Elem {
    if f.is_empty() || g.is_empty() {
        return k.zero();
    }
    let (m, n) = (deg(f), deg(g));
    if n == 0 {
        return k.pow(&g[0], m as i64);
    }
    if m == 0 {
        return k.pow(&f[0], n as i64);
    }
    let r = rem(k, f, g);
    if r.is_empty() {
        return k.zero();
    }
    let sign = if (m * n) % 2 == 1 { k.from_int(-1) } else { k.one() };
    let lead = k.pow(&g[n], (m - deg(&r)) as i64);
    k.mul(&k.mul(&sign, &lead), &resultant(k, g, &r))
}

/// Characteristic polynomial `det(xI - A)` by Berkowitz's division-free
/// recursion.
pub fn characteristic_polynomial<F: Field>(k: &F, a: &[Vec<F::Elem>]) -> Poly<F::Elem> {
    // Vector of coefficients, highest degree first.
    fn berk<F: Field>(k: &F, a: &[Vec<F::Elem>]) -> Vec<F::Elem> {
        let n = a.len();
        if n == 0 {
            return vec![k.one()];
        }
        if n == 1 {
            return vec![k.one(), k.neg(&a[0][0])];
        }
        let a11 = &a[0][0];
        let row: Vec<F::Elem> = a[0][1..].to_vec();
        let col: Vec<F::Elem> = a[1..].iter().map(|r| r[0].clone()).collect();
        let sub: Vec<Vec<F::Elem>> = a[1..].iter().map(|r| r[1..].to_vec()).collect();
        let dot = |u: &[F::Elem], v: &[F::Elem]| {
            u.iter().zip(v).fold(k.zero(), |acc, (x, y)| k.add(&acc, &k.mul(x, y)))
        };
        let mut diags = vec![k.one(), k.neg(a11)];
        let mut cur = col;
        for i in 0..n - 1 {
            diags.push(k.neg(&dot(&row, &cur)));
            if i + 1 < n - 1 {
                cur = sub.iter().map(|r| dot(r, &cur)).collect();
            }
        }
        let inner = berk(k, &sub);
        // Toeplitz (n+1) x n lower triangular times inner (length n).
        (0..=n)
            .map(|i| {
                (0..n.min(i + 1)).fold(k.zero(), |acc, j| k.add(&acc, &k.mul(&diags[i - j], &inner[j])))
            })
            .collect()
    }
    let mut v = berk(k, a);
    v.reverse();
    trim(k, v)
}

/// Matrix of multiplication by `h` on `K[x]/(g)` in the basis `1, x, ...`;
/// column `j` holds `h x^j mod g`.
pub fn multiplication_matrix<F: Field>(k: &F, g: &[F::Elem], h: &[F::Elem]) -> Vec<Vec<F::Elem>> {
    let n = deg(g);
    let mut cols = Vec::with_capacity(n);
    let mut cur = rem(k, h, g);
    for _ in 0..n {
        cols.push(cur.clone());
        cur = rem(k, &mul(k, &cur, &x(k)), g);
    }
    (0..n)
        .map(|i| (0..n).map(|j| cols[j].get(i).cloned().unwrap_or_else(|| k.zero())).collect())
        .collect()
}

pub fn characteristic_polynomial_in_quotient<F: Field>(k: &F, g: &[F::Elem], h: &[F::Elem]) -> Poly<F::Elem> {
    characteristic_polynomial(k, &multiplication_matrix(k, g, h))
}

/// Norm of `h` from `K[x]/(g)` down to `K`, which is `Res(g, h)` for monic
/// `g`. Division-free, so it avoids the coefficient swell of the Euclidean
/// resultant over multivariate function fields.
pub fn norm_in_quotient<F: Field>(k: &F, g: &[F::Elem], h: &[F::Elem]) -> F::Elem {
    let cp = characteristic_polynomial_in_quotient(k, g, h);
    let c0 = cp.first().cloned().unwrap_or_else(|| k.zero());
    if deg(g) % 2 == 1 { k.neg(&c0) } else { c0 }
}

/// Minimal polynomial of the class of `h` in `K[x]/(g)`, found as the first
/// linear relation among `1, h, h^2, ...` (a divisor of the characteristic
/// polynomial, equal to it exactly when `h` generates).
pub fn minimal_polynomial_in_quotient<F: Field>(k: &F, g: &[F::Elem], h: &[F::Elem]) -> Poly<F::Elem> {
    let n = deg(g);
    let hm = rem(k, h, g);
    // Rows: (pivot, reduced vector, combination).
    let mut rows: Vec<(usize, Vec<F::Elem>, Vec<F::Elem>)> = Vec::new();
    let mut power = vec![k.one()];
    for j in 0..=n {
        let mut w: Vec<F::Elem> = (0..n).map(|i| power.get(i).cloned().unwrap_or_else(|| k.zero())).collect();
        let mut comb = vec![k.zero(); n + 1];
        comb[j] = k.one();
        for (piv, v, c) in &rows {
            if k.is_zero(&w[*piv]) {
                continue;
            }
            let f = w[*piv].clone();
            for i in 0..n {
                w[i] = k.sub(&w[i], &k.mul(&f, &v[i]));
            }
            for i in 0..=n {
                comb[i] = k.sub(&comb[i], &k.mul(&f, &c[i]));
            }
        }
        match w.iter().position(|c| !k.is_zero(c)) {
            None => return trim(k, comb),
            Some(piv) => {
                let s = k.inv(&w[piv]).unwrap();
                let v = w.iter().map(|c| k.mul(c, &s)).collect();
                let c = comb.iter().map(|c| k.mul(c, &s)).collect();
                rows.push((piv, v, c));
            }
        }
        power = mul_mod(k, &power, &hm, g);
    }
    unreachable!("n+1 vectors in an n-dimensional space are dependent")
}

/// Render with the highest degree first, e.g. `x^6 + 108`.
pub fn render<F: Field>(k: &F, p: &[F::Elem], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, c) in p.iter().enumerate().rev() {
        if k.is_zero(c) {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => String::from(var),
            _ => format!("{var}^{i}"),
        };
        let cs = k.render(c);
        let simple = !cs[1..].contains(['+', '-', ' ']);
        let term = if mono.is_empty() {
            cs
        } else if k.is_one(c) {
            mono
        } else if k.is_one(&k.neg(c)) {
            format!("-{mono}")
        } else if simple {
            format!("{cs}*{mono}")
        } else {
            format!("({cs})*{mono}")
        };
        terms.push(term);
    }
    if terms.is_empty() {
        return "0".into();
    }
    join_terms(&terms)
}

/// Reject polynomials that are zero; used by operations that need a degree.
pub fn nonzero<E>(p: &[E]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    Ok(())
}

/// Exponent helper: `q^d - 1` style big exponents for finite-field code.
pub fn big_pow(base: u64, e: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for _ in 0..e {
        acc *= base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::PadicRationals;
    use crate::field::ValuedField;
    use crate::ordgroup::rat;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q() -> PadicRationals {
        PadicRationals::new(2)
    }

    fn p(s: &str) -> Poly<BigRational> {
        let k = q();
        crate::expr::eval_poly(&k, &crate::expr::parse(s).unwrap(), "x", &|v| k.parse_elem(v)).unwrap()
    }

    fn ints(v: &[i64]) -> Poly<BigRational> {
        trim(&q(), v.iter().map(|&c| rat(c, 1)).collect())
    }

    #[test]
    fn expansions() {
        let k = q();
        assert_eq!(phi_expansion(&k, &p("x^2+2x+4"), &p("x")).unwrap(), vec![ints(&[4]), ints(&[2]), ints(&[1])]);
        assert_eq!(phi_expansion(&k, &p("x^2+1"), &p("x+1")).unwrap(), vec![ints(&[2]), ints(&[-2]), ints(&[1])]);
        assert_eq!(phi_expansion(&k, &p("x^2+1"), &p("2x+1")), Err(Error::NonMonic));
    }

    #[test]
    fn resultants() {
        let k = q();
        assert_eq!(resultant(&k, &p("x^2+1"), &p("x")), rat(1, 1));
        assert_eq!(resultant(&k, &p("x^2-2"), &p("x-3")), rat(7, 1));
        assert_eq!(resultant(&k, &p("x^6+108"), &p("x")), rat(108, 1));
    }

    #[test]
    fn minimal_polynomials() {
        let k = q();
        assert_eq!(minimal_polynomial_in_quotient(&k, &p("x^2+1"), &p("x")), p("x^2+1"));
        assert_eq!(minimal_polynomial_in_quotient(&k, &p("x^6+108"), &p("x^3")), p("x^2+108"));
        // Compositum of a^3 = 2 and e^2 + e + 1 = 0 presented by a + e.
        let g = p("x^6 + 3x^5 + 6x^4 + 3x^3 + 9x + 9");
        let e = p("-2/9x^5 - 1/3x^4 - 2/3x^3 + 2/3x^2 - 2");
        let a = p("2/9x^5 + 1/3x^4 + 2/3x^3 - 2/3x^2 + x + 2");
        // Independent check of the presentation before using it.
        assert!(rem(&k, &sub(&k, &pow(&k, &a, 3), &p("2")), &g).is_empty());
        assert!(rem(&k, &p_eval(&k, &e), &g).is_empty());
        let h = rem(&k, &mul(&k, &a, &sub(&k, &e, &p("1"))), &g);
        assert_eq!(minimal_polynomial_in_quotient(&k, &g, &h), p("x^6 + 108"));
        assert_eq!(characteristic_polynomial_in_quotient(&k, &g, &h), p("x^6 + 108"));
    }

    fn p_eval(k: &PadicRationals, e: &Poly<BigRational>) -> Poly<BigRational> {
        add(k, &add(k, &mul(k, e, e), e), &p("1"))
    }

    #[test]
    fn berkowitz_small() {
        let k = q();
        let m = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(4, 1)]];
        // x^2 - 5x - 2
        assert_eq!(characteristic_polynomial(&k, &m), ints(&[-2, -5, 1]));
    }

    #[test]
    fn render_shapes() {
        let k = q();
        assert_eq!(render(&k, &p("x^6+108"), "x"), "x^6 + 108");
        assert_eq!(render(&k, &p("x^2-x/2-1"), "y"), "y^2 - 1/2*y - 1");
    }

    fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly<BigRational>> {
        proptest::collection::vec((-9i64..=9, 1i64..=4), 0..=max_deg + 1)
            .prop_map(|v| trim(&q(), v.into_iter().map(|(n, d)| rat(n, d)).collect()))
    }

    fn monic_poly(max_deg: usize) -> impl Strategy<Value = Poly<BigRational>> {
        proptest::collection::vec(-9i64..=9, 1..=max_deg).prop_map(|mut v| {
            v.push(1);
            v.into_iter().map(|c| rat(c, 1)).collect()
        })
    }

    proptest! {
        #[test]
        fn expansion_round_trip(f in small_poly(9), phi in monic_poly(3)) {
            let k = q();
            let e = phi_expansion(&k, &f, &phi).unwrap();
            prop_assert!(e.iter().all(|a| a.len() < phi.len()));
            prop_assert_eq!(from_phi_expansion(&k, &e, &phi), f);
        }

        #[test]
        fn resultant_is_multiplicative(f in monic_poly(3), g in small_poly(3), h in small_poly(3)) {
            let k = q();
            prop_assume!(!g.is_empty() && !h.is_empty());
            let lhs = resultant(&k, &f, &mul(&k, &g, &h));
            prop_assert_eq!(lhs, resultant(&k, &f, &g) * resultant(&k, &f, &h));
        }

        #[test]
        fn norm_matches_resultant(g in monic_poly(4), h in small_poly(5)) {
            let k = q();
            prop_assert_eq!(norm_in_quotient(&k, &g, &h), resultant(&k, &g, &h));
        }

        #[test]
        fn minimal_polynomial_annihilates(g in monic_poly(5), h in small_poly(4)) {
            let k = q();
            let m = minimal_polynomial_in_quotient(&k, &g, &h);
            prop_assert!(is_monic(&k, &m));
            let hm = rem(&k, &h, &g);
            let mut acc = Vec::new();
            for c in m.iter().rev() {
                acc = add(&k, &mul_mod(&k, &acc, &hm, &g), &constant(&k, c.clone()));
            }
            prop_assert!(acc.is_empty());
            let cp = characteristic_polynomial_in_quotient(&k, &g, &h);
            prop_assert!(rem(&k, &cp, &m).is_empty());
        }
    }
}
