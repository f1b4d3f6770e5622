//! Truncated-series model of `theta = alpha + i` over `Q(t)` with the rank-2
//! valuation, where `alpha = sqrt(1 + t)` and `i^2 = -1` is taken `p`-adically.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::basefield::padic::ord_p;
use crate::basefield::rank2::{QtElem, RationalFunctionsRank2};
use crate::error::{Error, Result};
use crate::expr;
use crate::field::Field;
use crate::ordgroup::GroupValue;

/// Coefficients of `sqrt(1 + t) = sum j_n t^n`, the binomial numbers
/// `binom(1/2, n)`.
pub fn series_sqrt(terms: usize) -> Vec<BigRational> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut out = Vec::with_capacity(terms);
    let mut c = BigRational::one();
    for n in 0..terms {
        out.push(c.clone());
        let k = BigRational::from_integer(BigInt::from(n));
        c = c * (&half - &k) / (k + BigRational::one());
    }
    out
}

fn pow_big(p: u64, k: usize) -> BigInt {
    num_traits::pow(BigInt::from(p), k)
}

/// The square root of `-1` in `Z_p` with the least residue in `1..p`,
/// reduced modulo `p^precision`.
pub fn series_hensel_root(p: u64, precision: usize) -> Result<BigInt> {
    if p % 4 != 1 {
        return Err(Error::NoRoot);
    }
    let i0 = (1..p).find(|x| (x * x + 1) % p == 0).ok_or(Error::NoRoot)?;
    let mut x = BigInt::from(i0);
    let mut k = 1;
    while k < precision {
        k = (2 * k).min(precision);
        let m = pow_big(p, k);
        let f = (&x * &x + 1u32).mod_floor(&m);
        let d = (BigInt::from(2) * &x).mod_floor(&m);
        let inv = mod_inverse(&d, &m).expect("2x is a unit");
        x = (&x - f * inv).mod_floor(&m);
    }
    Ok(x.mod_floor(&pow_big(p, precision)))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Base-`p` digits, least significant first.
pub fn digits(x: &BigInt, p: u64, count: usize) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut y = x.clone();
    (0..count)
        .map(|_| {
            let (q, r) = y.div_mod_floor(&pb);
            y = q;
            r.to_u64().unwrap()
        })
        .collect()
}

/// `K(i, alpha)` with basis `1, i, alpha, i*alpha` over `Q(t)`.
#[derive(Clone, Debug)]
pub struct Biquadratic {
    pub base: RationalFunctionsRank2,
}

pub type BqElem = [QtElem; 4];

impl Biquadratic {
    pub fn new(p: u64) -> Self {
        Biquadratic { base: RationalFunctionsRank2::new(p) }
    }

    pub fn from_base(&self, c: QtElem) -> BqElem {
        let z = self.base.zero();
        [c, z.clone(), z.clone(), z]
    }

    pub fn i(&self) -> BqElem {
        let (z, o) = (self.base.zero(), self.base.one());
        [z.clone(), o, z.clone(), z]
    }

    pub fn alpha(&self) -> BqElem {
        let (z, o) = (self.base.zero(), self.base.one());
        [z.clone(), z.clone(), o, z]
    }

    pub fn theta(&self) -> BqElem {
        self.add(&self.i(), &self.alpha())
    }

    /// Names: `t`, `i`, `alpha`, `theta`.
    pub fn parse(&self, s: &str) -> Result<BqElem> {
        let e = expr::parse(s)?;
        expr::eval_field(self, &e, &|name| match name {
            "t" => Ok(self.from_base(self.base.t())),
            "i" => Ok(self.i()),
            "alpha" | "a" => Ok(self.alpha()),
            "theta" => Ok(self.theta()),
            _ => Err(Error::Parse(format!("unknown name {name:?}"))),
        })
    }

    fn gauss_mul(&self, a: &[QtElem; 2], b: &[QtElem; 2]) -> [QtElem; 2] {
        let k = &self.base;
        [
            k.sub(&k.mul(&a[0], &b[0]), &k.mul(&a[1], &b[1])),
            k.add(&k.mul(&a[0], &b[1]), &k.mul(&a[1], &b[0])),
        ]
    }

    fn gauss_add(&self, a: &[QtElem; 2], b: &[QtElem; 2]) -> [QtElem; 2] {
        [self.base.add(&a[0], &b[0]), self.base.add(&a[1], &b[1])]
    }

    fn split(a: &BqElem) -> ([QtElem; 2], [QtElem; 2]) {
        ([a[0].clone(), a[1].clone()], [a[2].clone(), a[3].clone()])
    }

    fn alpha_square(&self) -> [QtElem; 2] {
        let k = &self.base;
        [k.add(&k.one(), &k.t()), k.zero()]
    }
}

impl Field for Biquadratic {
    type Elem = BqElem;

    fn zero(&self) -> BqElem {
        self.from_base(self.base.zero())
    }

    fn one(&self) -> BqElem {
        self.from_base(self.base.one())
    }

    fn is_zero(&self, a: &BqElem) -> bool {
        a.iter().all(|c| self.base.is_zero(c))
    }

    fn add(&self, a: &BqElem, b: &BqElem) -> BqElem {
        core::array::from_fn(|j| self.base.add(&a[j], &b[j]))
    }

    fn neg(&self, a: &BqElem) -> BqElem {
        core::array::from_fn(|j| self.base.neg(&a[j]))
    }

    fn mul(&self, a: &BqElem, b: &BqElem) -> BqElem {
        let ((x, y), (u, w)) = (Self::split(a), Self::split(b));
        let s = self.alpha_square();
        let first = self.gauss_add(&self.gauss_mul(&x, &u), &self.gauss_mul(&self.gauss_mul(&y, &w), &s));
        let second = self.gauss_add(&self.gauss_mul(&x, &w), &self.gauss_mul(&y, &u));
        [first[0].clone(), first[1].clone(), second[0].clone(), second[1].clone()]
    }

    fn inv(&self, a: &BqElem) -> Option<BqElem> {
        if self.is_zero(a) {
            return None;
        }
        let k = &self.base;
        let (x, y) = Self::split(a);
        let s = self.alpha_square();
        let yy = self.gauss_mul(&self.gauss_mul(&y, &y), &s);
        let n = self.gauss_add(&self.gauss_mul(&x, &x), &[k.neg(&yy[0]), k.neg(&yy[1])]);
        let nn = k.add(&k.mul(&n[0], &n[0]), &k.mul(&n[1], &n[1]));
        let ninv = k.inv(&nn)?;
        let nbar = [k.mul(&n[0], &ninv), k.neg(&k.mul(&n[1], &ninv))];
        let conj = [x[0].clone(), x[1].clone(), k.neg(&y[0]), k.neg(&y[1])];
        Some(self.mul(&conj, &[nbar[0].clone(), nbar[1].clone(), k.zero(), k.zero()]))
    }

    fn from_bigint(&self, n: &BigInt) -> BqElem {
        self.from_base(self.base.from_bigint(n))
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn render(&self, a: &BqElem) -> String {
        let names = ["", "i", "alpha", "i*alpha"];
        let mut terms = Vec::new();
        for (c, name) in a.iter().zip(names) {
            if self.base.is_zero(c) {
                continue;
            }
            let cs = self.base.render(c);
            terms.push(match name {
                "" => cs,
                _ if self.base.is_one(c) => name.into(),
                _ if crate::field::is_atomic(&cs) => format!("{cs}*{name}"),
                _ => format!("({cs})*{name}"),
            });
        }
        if terms.is_empty() {
            return "0".into();
        }
        crate::field::join_terms(&terms)
    }
}

/// An element of `Q_p((t))` of the form `sum (A_m + B_m i) t^m`, known for
/// exponents below `t_precision` with `i` known modulo `p^p_precision`.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    pub t_precision: usize,
    pub p_precision: usize,
    /// `(m, A_m, B_m)` for every exponent below `t_precision` where some
    /// coefficient is nonzero.
    pub terms: Vec<(i64, BigRational, BigRational)>,
}

/// Distances `v(theta - b)` computed from truncated expansions, certified
/// or refused.
#[derive(Clone, Debug)]
pub struct SeriesOracle {
    pub field: Biquadratic,
    pub p: u64,
    pub t_precision: usize,
    pub p_precision: usize,
    pub i_approx: BigInt,
    pub sqrt_coeffs: Vec<BigRational>,
}

impl SeriesOracle {
    pub fn new(p: u64, t_precision: usize, p_precision: usize) -> Result<Self> {
        Ok(SeriesOracle {
            field: Biquadratic::new(p),
            p,
            t_precision,
            p_precision,
            i_approx: series_hensel_root(p, p_precision)?,
            sqrt_coeffs: series_sqrt(t_precision),
        })
    }

    /// `c` expanded at `t = 0`, exponents below the t-precision.
    fn expand(&self, c: &QtElem) -> Vec<(i64, BigRational)> {
        if self.field.base.is_zero(c) {
            return Vec::new();
        }
        let t = self.t_precision as i64;
        let (start, _) = self.field.base.laurent(c, 1);
        if start >= t {
            return Vec::new();
        }
        let (_, cs) = self.field.base.laurent(c, (t - start) as usize);
        cs.into_iter().enumerate().map(|(j, x)| (start + j as i64, x)).filter(|(_, x)| !x.is_zero()).collect()
    }

    /// `a + b*alpha` as a series.
    fn combine(&self, a: &QtElem, b: &QtElem) -> Vec<(i64, BigRational)> {
        let t = self.t_precision as i64;
        let mut out: alloc::collections::BTreeMap<i64, BigRational> = Default::default();
        for (m, x) in self.expand(a) {
            *out.entry(m).or_insert_with(BigRational::zero) += x;
        }
        for (m, x) in self.expand(b) {
            for (n, j) in self.sqrt_coeffs.iter().enumerate() {
                let e = m + n as i64;
                if e >= t {
                    break;
                }
                *out.entry(e).or_insert_with(BigRational::zero) += &x * j;
            }
        }
        out.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    pub fn series(&self, eta: &BqElem) -> TruncatedSeries {
        let a = self.combine(&eta[0], &eta[2]);
        let b = self.combine(&eta[1], &eta[3]);
        let mut all: alloc::collections::BTreeMap<i64, (BigRational, BigRational)> = Default::default();
        for (m, x) in a {
            all.entry(m).or_insert_with(|| (BigRational::zero(), BigRational::zero())).0 = x;
        }
        for (m, x) in b {
            all.entry(m).or_insert_with(|| (BigRational::zero(), BigRational::zero())).1 = x;
        }
        TruncatedSeries {
            t_precision: self.t_precision,
            p_precision: self.p_precision,
            terms: all.into_iter().map(|(m, (x, y))| (m, x, y)).collect(),
        }
    }

    fn exhausted(&self) -> Error {
        Error::PrecisionExhausted { t_precision: self.t_precision, p_precision: self.p_precision }
    }

    /// `v(eta) = (m, ord_p(A_m + B_m i))` for the lowest nonzero term.
    pub fn value(&self, eta: &BqElem) -> Result<GroupValue> {
        if self.field.is_zero(eta) {
            return Ok(GroupValue::Infinity);
        }
        let s = self.series(eta);
        let (m, a, b) = s.terms.first().ok_or_else(|| self.exhausted())?;
        let ord = if b.is_zero() {
            ord_p(a, self.p)
        } else {
            let approx = a + b * BigRational::from_integer(self.i_approx.clone());
            let limit = ord_p(b, self.p) + self.p_precision as i64;
            if approx.is_zero() {
                return Err(self.exhausted());
            }
            let o = ord_p(&approx, self.p);
            if o >= limit {
                return Err(self.exhausted());
            }
            o
        };
        Ok(GroupValue::r2(*m, ord))
    }

    pub fn distance(&self, b: &BqElem) -> Result<GroupValue> {
        self.value(&self.field.sub(&self.field.theta(), b))
    }

    /// `a_n + 1` for `n = 1..=count`, where `a_n` sums the first `n` nonzero
    /// base-`p` digit terms of `i`. Each comes with the exponent of the next
    /// nonzero digit.
    pub fn digit_family(&self, count: usize) -> Result<Vec<(String, BqElem, usize)>> {
        let ds = digits(&self.i_approx, self.p, self.p_precision);
        let nonzero: Vec<usize> = (0..ds.len()).filter(|&j| ds[j] != 0).collect();
        if nonzero.len() <= count {
            return Err(self.exhausted());
        }
        let mut acc = BigInt::zero();
        let mut out = Vec::new();
        for n in 1..=count {
            let pos = nonzero[n - 1];
            acc += BigInt::from(ds[pos]) * pow_big(self.p, pos);
            let c = self.field.base.constant(BigRational::from_integer(&acc + 1u32));
            out.push((format!("{}", &acc + 1u32), self.field.from_base(c), nonzero[n]));
        }
        Ok(out)
    }

    /// `i + b_m` for `m = 1..=count`, `b_m` the truncation of `alpha` below
    /// `t^m`.
    pub fn alpha_family(&self, count: usize) -> Vec<(String, BqElem)> {
        let k = &self.field.base;
        let js = series_sqrt(count + 1);
        (1..=count)
            .map(|m| {
                let b = k.make(js[..m].to_vec(), vec![BigRational::one()]);
                let mut e = self.field.from_base(b.clone());
                e[1] = k.one();
                let r = k.render(&b);
                let label = match r.strip_prefix('-') {
                    Some(rest) => format!("i - {rest}"),
                    None => format!("i + {r}"),
                };
                (label, e)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ValuedField;
    use crate::ordgroup::rat;
    use proptest::prelude::*;

    fn oracle() -> SeriesOracle {
        SeriesOracle::new(5, 16, 16).unwrap()
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(series_sqrt(3), vec![rat(1, 1), rat(1, 2), rat(-1, 8)]);
        let j = series_sqrt(12);
        // (sum j_n t^n)^2 = 1 + t up to the truncation.
        for n in 0..12 {
            let s: BigRational = (0..=n).map(|k| &j[k] * &j[n - k]).sum();
            let want = if n < 2 { rat(1, 1) } else { rat(0, 1) };
            assert_eq!(s, want, "coefficient {n}");
        }
    }

    #[test]
    fn square_root_of_minus_one() {
        assert_eq!(series_hensel_root(5, 1).unwrap(), BigInt::from(2));
        assert_eq!(series_hensel_root(5, 2).unwrap(), BigInt::from(7));
        let m = pow_big(13, 9);
        let r = series_hensel_root(13, 9).unwrap();
        assert!(((&r * &r) + 1u32).mod_floor(&m).is_zero());
        assert_eq!(series_hensel_root(3, 4), Err(Error::NoRoot));
        assert_eq!(series_hensel_root(2, 4), Err(Error::NoRoot));
        assert_eq!(digits(&BigInt::from(7), 5, 3), vec![2, 1, 0]);
    }

    #[test]
    fn theta_is_a_root_of_the_quartic() {
        let f = Biquadratic::new(5);
        let th = f.theta();
        let g = f.parse("theta^4 - 2*t*theta^2 + (t + 2)^2").unwrap();
        assert!(f.is_zero(&g));
        let conj = f.parse("alpha - i").unwrap();
        let prod = f.mul(&th, &conj);
        assert!(f.equal(&prod, &f.parse("t + 2").unwrap()));
        let inv = f.inv(&th).unwrap();
        assert!(f.is_one(&f.mul(&inv, &th)));
        assert_eq!(f.render(&f.parse("2*i*alpha + t").unwrap()), "t + 2*i*alpha");
    }

    #[test]
    fn rank_two_distances() {
        let o = oracle();
        let f = &o.field;
        assert_eq!(o.distance(&f.parse("3").unwrap()).unwrap(), GroupValue::r2(0, 1));
        assert_eq!(o.distance(&f.parse("i + 1").unwrap()).unwrap(), GroupValue::r2(1, 0));
        assert_eq!(o.distance(&f.theta()).unwrap(), GroupValue::Infinity);
        let fam = o.digit_family(4).unwrap();
        for (_, b, next) in &fam {
            assert_eq!(o.distance(b).unwrap(), GroupValue::r2(0, *next as i64));
        }
        let js = series_sqrt(8);
        for (m, (_, b)) in o.alpha_family(7).iter().enumerate() {
            let want = GroupValue::r2(m as i64 + 1, ord_p(&js[m + 1], 5));
            assert_eq!(o.distance(b).unwrap(), want);
        }
    }

    #[test]
    fn precision_is_refused_not_guessed() {
        let o = SeriesOracle::new(5, 6, 3).unwrap();
        let f = &o.field;
        let close = f.add(&f.alpha(), &f.from_base(f.base.constant(BigRational::from_integer(o.i_approx.clone()))));
        let err = Error::PrecisionExhausted { t_precision: 6, p_precision: 3 };
        assert_eq!(o.distance(&close), Err(err.clone()));
        let far = f.sub(&f.theta(), &f.parse("t^6").unwrap());
        assert_eq!(o.distance(&far), Err(err.clone()));
        assert_eq!(o.distance(&f.sub(&f.theta(), &f.parse("t^5").unwrap())).unwrap(), GroupValue::r2(5, 0));
        assert!(matches!(o.digit_family(10), Err(Error::PrecisionExhausted { .. })));
    }

    fn elem() -> impl Strategy<Value = [i64; 8]> {
        prop::array::uniform8(-6i64..7)
    }

    fn build(f: &Biquadratic, c: &[i64; 8]) -> BqElem {
        let k = &f.base;
        core::array::from_fn(|j| k.make(vec![rat(c[2 * j], 1), rat(c[2 * j + 1], 1)], vec![rat(1, 1)]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ultrametric_on_samples(a in elem(), b in elem()) {
            let o = oracle();
            let f = &o.field;
            let (x, y) = (build(f, &a), build(f, &b));
            let (vx, vy, vs) = (o.value(&x), o.value(&y), o.value(&f.add(&x, &y)));
            if let (Ok(vx), Ok(vy), Ok(vs)) = (vx, vy, vs) {
                prop_assert!(vs >= vx.clone().min(vy.clone()));
                if vx != vy {
                    prop_assert_eq!(vs, vx.min(vy));
                }
            }
        }

        #[test]
        fn scaling_by_base_elements(a in elem(), n in -3i64..4, c in 1i64..60) {
            let o = oracle();
            let f = &o.field;
            let x = build(f, &a);
            let k = &f.base;
            let s = k.mul(&k.constant(rat(c, 1)), &k.pow(&k.t(), n));
            if let Ok(vx) = o.value(&x) {
                let vsx = o.value(&f.mul(&f.from_base(s.clone()), &x)).unwrap();
                prop_assert_eq!(vsx, k.val(&s).add(&vx));
            }
        }

        #[test]
        fn certified_values_are_stable(a in elem()) {
            let o = SeriesOracle::new(5, 6, 4).unwrap();
            let big = SeriesOracle::new(5, 12, 8).unwrap();
            let x = build(&o.field, &a);
            if let Ok(v) = o.value(&x) {
                prop_assert_eq!(big.value(&x).unwrap(), v);
            }
        }
    }
}
