//! Graded units, the residual polynomial operator, key-polynomial
//! certification, root images and relative residue degrees.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{render_tower, Field, ResidueTower, ValuedField};
use crate::indval::{InductiveValuation, RElem};
use crate::ordgroup::GroupValue;
use crate::poly::{self, Poly};

/// `in a` for a polynomial of degree below the minimal key degree, as a
/// pair of grade and residue relative to the recorded normalization.
#[derive(Clone, Debug)]
pub struct GradedUnit<E> {
    pub value: GroupValue,
    pub residue: E,
}

#[derive(Clone, Debug)]
pub struct ResidualPolynomial<E> {
    /// Monic, lowest degree first, nonzero constant term.
    pub coeffs: Poly<E>,
    /// Indices attaining the minimum in the key expansion.
    pub support: Vec<usize>,
    pub l0: usize,
    pub l: usize,
    pub d: usize,
    pub e: u64,
}

/// Which alternative certified a key polynomial.
#[derive(Clone, Debug)]
pub enum KeyCertificate<E> {
    /// Same degree as the current key and `mu(Q - phi) >= gamma`.
    SameDegree,
    /// `R(Q)` irreducible of degree `deg Q / (e deg phi)`.
    Irreducible(ResidualPolynomial<E>),
}

impl<K: ValuedField> InductiveValuation<K> {
    pub fn unit_residue(&self, a: &[K::Elem]) -> Result<GradedUnit<RElem<K>>> {
        let k = self.top();
        if a.is_empty() {
            return Err(Error::PreconditionViolated("zero has no initial form".into()));
        }
        if k > 0 && a.len() > self.levels[k].phi.len() - 1 || k == 0 && a.len() > 1 {
            return Err(Error::DegreeTooLarge);
        }
        Ok(GradedUnit { value: self.evaluate(a), residue: self.unit_residue_at(k, a)? })
    }

    /// Residue of `a / x_(mu(a))`, where `x` is the multiplicative section of
    /// unit grades built from the base section and the keys.
    pub(crate) fn unit_residue_at(&self, k: usize, a: &[K::Elem]) -> Result<RElem<K>> {
        let t = &self.tower;
        if a.is_empty() {
            return Err(Error::PreconditionViolated("zero has no initial form".into()));
        }
        if k == 0 {
            let c = &a[0];
            let s = self.field.section(&self.field.val(c));
            let q = self.field.inv(&s).map(|i| self.field.mul(c, &i)).ok_or(Error::NegativeValue)?;
            return self.field.residue(&q);
        }
        let j = k - 1;
        let rp = self.residual_polynomial_at(j, a)?;
        let coeffs = poly::phi_expansion(&self.field, a, &self.levels[j].phi)?;
        let lower = &self.levels[j];
        let link = self.levels[k].link.as_ref().expect("link above level 0");
        let ru = lower.u_residue.as_ref().expect("finite value");
        let lead = self.unit_residue_at(j, &coeffs[rp.l])?;
        let at_z = poly::eval(t, &rp.coeffs, &link.z);
        let c = t.mul(&t.mul(&lead, &t.pow(ru, rp.d as i64)), &at_z);
        let bprime = self
            .evaluate_at(j, &coeffs[rp.l])
            .add(&lower.gamma.mul_int((rp.d as u64 * lower.e) as i64));
        let n = rp.l0 as i64;
        let m = bprime.add(&lower.gamma.mul_int(n));
        let (_, n_sigma) = self.split_grade(k, &m);
        let q = (n - n_sigma) / lower.e as i64;
        debug_assert_eq!((n - n_sigma) % lower.e as i64, 0);
        Ok(t.mul(&c, &t.pow(&link.rho, q)))
    }

    /// `R(g)` for the top level.
    pub fn residual_polynomial(&self, g: &[K::Elem]) -> Result<ResidualPolynomial<RElem<K>>> {
        if self.is_terminal() {
            return Err(Error::TerminalValuation);
        }
        self.residual_polynomial_at(self.top(), g)
    }

    pub fn residual_polynomial_at(&self, k: usize, g: &[K::Elem]) -> Result<ResidualPolynomial<RElem<K>>> {
        poly::nonzero(g)?;
        let t = &self.tower;
        let lvl = &self.levels[k];
        let coeffs = poly::phi_expansion(&self.field, g, &lvl.phi)?;
        let vals: Vec<Option<GroupValue>> = coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| {
                (!a.is_empty()).then(|| self.evaluate_at(k, a).add(&lvl.gamma.mul_int(n as i64)))
            })
            .collect();
        let min = vals.iter().flatten().min().expect("nonzero").clone();
        let support: Vec<usize> = (0..vals.len()).filter(|&n| vals[n].as_ref() == Some(&min)).collect();
        let l0 = support[0];
        let l = *support.last().unwrap();
        let e = lvl.e;
        let d = (l - l0) / e as usize;
        let ru = lvl.u_residue.as_ref().expect("finite value");
        let lead = self.unit_residue_at(k, &coeffs[l])?;
        let mut out = vec![t.zero(); d + 1];
        for (i, slot) in out.iter_mut().enumerate() {
            let n = l0 + i * e as usize;
            if !support.contains(&n) {
                continue;
            }
            let r = self.unit_residue_at(k, &coeffs[n])?;
            *slot = t.div(&r, &t.mul(&lead, &t.pow(ru, (d - i) as i64)));
        }
        Ok(ResidualPolynomial { coeffs: out, support, l0, l, d, e })
    }

    /// A polynomial of degree below `deg phi_k`, value `beta` and residue
    /// `c`. Zero for `c = 0`.
    pub fn lift_at(&self, k: usize, beta: &GroupValue, c: &RElem<K>) -> Result<Poly<K::Elem>> {
        let t = &self.tower;
        let kf = &self.field;
        if t.is_zero(c) {
            return Ok(Vec::new());
        }
        if !self.levels[k].units.contains(beta) {
            return Err(Error::NotInUnitGroup(format!("{beta}")));
        }
        if k == 0 {
            return Ok(poly::constant(kf, kf.mul(&kf.lift(c), &kf.section(beta))));
        }
        let j = k - 1;
        let lower = &self.levels[j];
        let link = self.levels[k].link.as_ref().expect("link above level 0");
        let e = lower.e as i64;
        let (bs, ns) = self.split_grade(k, beta);
        let n0 = ns.rem_euclid(e);
        let b2 = bs.add(&lower.gamma.mul_int(ns - n0));
        let q0 = (n0 - ns) / e;
        let c1 = t.mul(c, &t.pow(&link.rho, -q0));
        let parts = match link.tower_level {
            Some(level) => t.coordinates(&c1, level)?,
            None => vec![c1],
        };
        let ru = lower.u_residue.as_ref().expect("finite value");
        let mut out = Vec::new();
        for (m, cm) in parts.iter().enumerate() {
            if t.is_zero(cm) {
                continue;
            }
            let bm = t.mul(cm, &t.pow(ru, -(m as i64)));
            let grade = b2.sub(&lower.gamma.mul_int(m as i64 * e));
            let term = self.lift_at(j, &grade, &bm)?;
            let power = poly::pow(kf, &lower.phi, n0 as usize + m * e as usize);
            out = poly::add(kf, &out, &poly::mul(kf, &term, &power));
        }
        Ok(out)
    }

    /// Monic key polynomial `Q` with `R(Q) = psi`, for `psi` monic with
    /// nonzero constant term.
    pub fn lift_key(&self, psi: &[RElem<K>]) -> Result<Poly<K::Elem>> {
        if self.is_terminal() {
            return Err(Error::TerminalValuation);
        }
        let t = &self.tower;
        let kf = &self.field;
        let k = self.top();
        let lvl = self.top_level();
        let d = poly::deg(psi);
        let e = lvl.e as usize;
        let ru = lvl.u_residue.as_ref().unwrap();
        let mut q = poly::pow(kf, &lvl.phi, e * d);
        for (i, c) in psi.iter().enumerate().take(d) {
            let grade = lvl.gamma.mul_int(((d - i) * e) as i64);
            let res = t.mul(c, &t.pow(ru, (d - i) as i64));
            let a = self.lift_at(k, &grade, &res)?;
            q = poly::add(kf, &q, &poly::mul(kf, &a, &poly::pow(kf, &lvl.phi, e * i)));
        }
        let check = self.residual_polynomial(&q)?;
        if check.coeffs.len() != psi.len() || !check.coeffs.iter().zip(psi).all(|(a, b)| t.equal(a, b)) {
            return Err(Error::PreconditionViolated(format!(
                "lift does not reproduce {}",
                self.render_residual(psi)
            )));
        }
        Ok(q)
    }

    /// Key-polynomial test; `None` when `q` is not a key polynomial.
    pub fn is_key_polynomial(&self, q: &[K::Elem]) -> Result<Option<KeyCertificate<RElem<K>>>> {
        if self.is_terminal() {
            return Err(Error::TerminalValuation);
        }
        let kf = &self.field;
        if !poly::is_monic(kf, q) {
            return Ok(None);
        }
        let lvl = self.top_level();
        if q.len() == lvl.phi.len() {
            let diff = poly::sub(kf, q, &lvl.phi);
            return Ok((self.evaluate(&diff) >= lvl.gamma).then_some(KeyCertificate::SameDegree));
        }
        let r = self.residual_polynomial(q)?;
        if poly::deg(q) != lvl.e as usize * poly::deg(&lvl.phi) * r.d {
            return Ok(None);
        }
        let fs = self.tower.factor(&r.coeffs)?;
        let irreducible = fs.len() == 1 && fs[0].1 == 1;
        Ok(irreducible.then_some(KeyCertificate::Irreducible(r)))
    }

    /// `[kappa(nu) : kappa(mu)]` for the augmentation by `next`.
    pub fn relative_residue_degree(&self, next: &[K::Elem]) -> Result<usize> {
        match self.is_key_polynomial(next)? {
            None => Err(Error::NotKeyPolynomial(poly::render(&self.field, next, "x"))),
            Some(KeyCertificate::SameDegree) => Ok(1),
            Some(KeyCertificate::Irreducible(r)) => Ok(r.d),
        }
    }

    pub fn render_residual(&self, r: &[RElem<K>]) -> String {
        render_residual_poly(&self.tower, r)
    }
}

/// Render a polynomial in `y` over a residue tower.
pub fn render_residual_poly<T: ResidueTower>(t: &T, r: &[T::Elem]) -> String {
    if r.is_empty() {
        return "0".into();
    }
    let h = t.height();
    let mut terms = Vec::new();
    for (n, c) in r.iter().enumerate().rev() {
        if t.is_zero(c) {
            continue;
        }
        let mono = match n {
            0 => String::new(),
            1 => "y".into(),
            _ => format!("y^{n}"),
        };
        let cs = render_tower(t, c, h);
        terms.push(if mono.is_empty() {
            cs
        } else if t.is_one(c) {
            mono
        } else if t.is_one(&t.neg(c)) {
            format!("-{mono}")
        } else if crate::field::is_atomic(&cs) {
            format!("{cs}*{mono}")
        } else {
            format!("({cs})*{mono}")
        });
    }
    crate::field::join_terms(&terms)
}

/// `R_mu(g)(z)` for `z` the root image attached by `nu` to `mu`'s key.
/// Requires `nu` to extend `mu` by a new level above `mu`'s top,
/// `nu(phi) = mu(phi)` and `mu(g) < nu(g)`.
pub fn residual_root_check<K: ValuedField>(
    mu: &InductiveValuation<K>,
    nu: &InductiveValuation<K>,
    g: &[K::Elem],
) -> Result<bool> {
    let k = mu.top();
    let kf = &mu.field;
    let prefix = nu.levels.len() > k + 1
        && (0..=k).all(|i| {
            poly::equal(kf, &mu.levels[i].phi, &nu.levels[i].phi) && mu.levels[i].gamma == nu.levels[i].gamma
        });
    if !prefix {
        return Err(Error::PreconditionViolated("second valuation does not extend the first past its key".into()));
    }
    let phi = mu.key();
    if mu.evaluate(phi) != nu.evaluate(phi) {
        return Err(Error::PreconditionViolated("values of the key differ".into()));
    }
    if mu.evaluate(g) >= nu.evaluate(g) {
        return Err(Error::PreconditionViolated("value of g does not increase".into()));
    }
    let r = mu.residual_polynomial(g)?;
    let z = &nu.levels[k + 1].link.as_ref().unwrap().z;
    Ok(nu.tower.is_zero(&poly::eval(&nu.tower, &r.coeffs, z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::{FfElem, FunctionField, PadicRationals};
    use crate::expr::parse_poly;
    use crate::ordgroup::rat;
    use proptest::prelude::*;

    fn gv(n: i64) -> GroupValue {
        GroupValue::r1(n, 1)
    }

    fn chain32() -> (FunctionField, Poly<crate::basefield::mpoly::RatFn>, Vec<InductiveValuation<FunctionField>>) {
        let k = FunctionField::new(2, &["q", "r", "s"]);
        let g = parse_poly(&k, "x^8 + t^16*x + q^4 + t^4*r^2 + t^8*s").unwrap();
        let mu0 = InductiveValuation::gauss(&k);
        let mu1 = mu0.augment(&parse_poly(&k, "x^2 - q").unwrap(), gv(1)).unwrap();
        let mu2 = mu1.augment(&parse_poly(&k, "(x^2 - q)^2 - t^2*r").unwrap(), gv(4)).unwrap();
        (k, g, vec![mu0, mu1, mu2])
    }

    #[test]
    fn char_two_residual_polynomials() {
        let (_, g, mus) = chain32();
        let r: Vec<String> = mus
            .iter()
            .map(|m| m.render_residual(&m.residual_polynomial(&g).unwrap().coeffs))
            .collect();
        // (y^2 - q)^4, (y^2 - r)^2 and y^2 - s in characteristic 2.
        assert_eq!(r, vec!["y^8 + q^4", "y^4 + r^2", "y^2 + s"]);
        assert!(mus[2].is_key_polynomial(&g).unwrap().is_some());
        for m in &mus[..2] {
            assert!(m.is_key_polynomial(&g).unwrap().is_none());
        }
        let next = [mus[1].key().clone(), mus[2].key().clone(), g.clone()];
        let degs: Vec<usize> = mus.iter().zip(&next).map(|(m, n)| m.relative_residue_degree(n).unwrap()).collect();
        assert_eq!(degs, vec![2, 2, 2]);
        assert_eq!(mus[2].tower.total_degree(), 4);
    }

    #[test]
    fn char_two_units() {
        let (k, _, mus) = chain32();
        let a = parse_poly(&k, "t^2*r").unwrap();
        let u = mus[1].unit_residue(&a).unwrap();
        assert_eq!(u.value, gv(2));
        assert_eq!(mus[1].tower.render(&u.residue), "r");
        assert_eq!(mus[1].unit_residue(&parse_poly(&k, "x^2").unwrap()).unwrap_err(), Error::DegreeTooLarge);
        assert_eq!(mus[1].render_residual(&mus[1].residual_polynomial(&parse_poly(&k, "x + 1").unwrap()).unwrap().coeffs), "1");
    }

    #[test]
    fn root_images() {
        let (_, g, mus) = chain32();
        assert!(residual_root_check(&mus[0], &mus[1], &g).unwrap());
        assert!(residual_root_check(&mus[1], &mus[2], mus[2].key()).unwrap());
        assert!(matches!(residual_root_check(&mus[0], &mus[1], &[mus[0].field.one()]), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn two_adic_basics() {
        let k = PadicRationals::new(2);
        let g = InductiveValuation::gauss(&k);
        let u = g.unit_residue(&[rat(2, 1)]).unwrap();
        assert_eq!((u.value, u.residue), (gv(1), FfElem::Base(1)));
        assert!(matches!(g.is_key_polynomial(&parse_poly(&k, "x + 1").unwrap()).unwrap(), Some(KeyCertificate::SameDegree)));
        assert!(g.is_key_polynomial(&parse_poly(&k, "x^2 + x").unwrap()).unwrap().is_none());
        assert_eq!(g.relative_residue_degree(&parse_poly(&k, "x^2 + x + 1").unwrap()).unwrap(), 2);
        assert_eq!(g.relative_residue_degree(&parse_poly(&k, "x + 1").unwrap()).unwrap(), 1);
    }

    #[test]
    fn sextic_first_levels() {
        let k = PadicRationals::new(2);
        let f = parse_poly(&k, "x^6 + 108").unwrap();
        let mu = InductiveValuation::depth_zero(&k, &rat(0, 1), GroupValue::r1(1, 3));
        assert_eq!(mu.top_level().e, 3);
        assert_eq!(mu.top_level().u, vec![rat(2, 1)]);
        let r = mu.residual_polynomial(&f).unwrap();
        assert_eq!(mu.render_residual(&r.coeffs), "y^2 + 1");
        let fs = mu.tower.factor(&r.coeffs).unwrap();
        assert_eq!(fs.len(), 1);
        let key = mu.lift_key(&fs[0].0).unwrap();
        assert_eq!(poly::render(&k, &key, "x"), "x^3 + 2");
        let nu = mu.augment(&key, gv(2)).unwrap();
        let r2 = nu.residual_polynomial(&f).unwrap();
        assert_eq!(nu.render_residual(&r2.coeffs), "y^2 + y + 1");
        let top = nu.tower.factor(&r2.coeffs).unwrap();
        assert_eq!(top.len(), 1);
        let last = nu.lift_key(&top[0].0).unwrap();
        assert!(nu.is_key_polynomial(&last).unwrap().is_some());
    }

    fn small_poly(cs: &[i64]) -> Vec<BigRational> {
        poly::trim(&PadicRationals::new(2), cs.iter().map(|&c| rat(c, 1)).collect())
    }

    use num_rational::BigRational;

    fn depth_two() -> InductiveValuation<PadicRationals> {
        let k = PadicRationals::new(2);
        let mu = InductiveValuation::depth_zero(&k, &rat(0, 1), GroupValue::r1(1, 3));
        mu.augment(&parse_poly(&k, "x^3 + 2").unwrap(), gv(2)).unwrap()
    }

    // No multiplicativity law is claimed for residual polynomials, so this only
    // logs how often degrees fail to add.
    #[test]
    fn residual_degree_additivity_is_logged() {
        use rand_chacha::ChaCha8Rng;
        use rand_core::{RngCore, SeedableRng};
        let mu = depth_two();
        let mut r = ChaCha8Rng::seed_from_u64(11);
        let mut draw = || {
            let n = 1 + (r.next_u64() % 6) as usize;
            small_poly(&(0..n).map(|_| (r.next_u64() % 9) as i64 - 4).collect::<Vec<_>>())
        };
        let (mut sampled, mut misses) = (0, 0);
        for _ in 0..200 {
            let (a, b) = (draw(), draw());
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let ab = poly::mul(&mu.field, &a, &b);
            let (ra, rb, rab) = (mu.residual_polynomial(&a).unwrap(), mu.residual_polynomial(&b).unwrap(), mu.residual_polynomial(&ab).unwrap());
            sampled += 1;
            if poly::deg(&rab.coeffs) != poly::deg(&ra.coeffs) + poly::deg(&rb.coeffs) {
                misses += 1;
            }
        }
        std::eprintln!("residual degree additivity: {misses} of {sampled} products differ");
        assert!(sampled > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn unit_residues_multiply(a in prop::collection::vec(-20i64..20, 1..2), b in prop::collection::vec(-20i64..20, 1..3)) {
            let mu = depth_two();
            let t = &mu.tower;
            let (pa, pb) = (small_poly(&a), small_poly(&b));
            prop_assume!(!pa.is_empty() && !pb.is_empty());
            let pab = poly::mul(&mu.field, &pa, &pb);
            prop_assume!(pab.len() <= 3);
            let (ua, ub, uab) = (mu.unit_residue(&pa).unwrap(), mu.unit_residue(&pb).unwrap(), mu.unit_residue(&pab).unwrap());
            prop_assert_eq!(uab.value, ua.value.add(&ub.value));
            prop_assert!(t.equal(&uab.residue, &t.mul(&ua.residue, &ub.residue)));
        }

        #[test]
        fn residual_is_monic_with_unit_constant(c in prop::collection::vec(-40i64..40, 1..9)) {
            let mu = depth_two();
            let g = small_poly(&c);
            prop_assume!(!g.is_empty());
            let r = mu.residual_polynomial(&g).unwrap();
            prop_assert!(mu.tower.is_one(r.coeffs.last().unwrap()));
            prop_assert!(!mu.tower.is_zero(&r.coeffs[0]));
        }

        #[test]
        fn lift_round_trip(n in -3i64..6, c in 1u64..4) {
            let k = PadicRationals::new(2);
            let mu = InductiveValuation::gauss(&k)
                .augment(&parse_poly(&k, "x^2 + x + 1").unwrap(), GroupValue::r1(1, 2))
                .unwrap();
            let t = &mu.tower;
            let z = t.generator(0);
            let target = t.add(&t.from_int(c as i64 % 2), &t.mul(&z, &t.from_int((c / 2) as i64)));
            prop_assume!(!t.is_zero(&target));
            let beta = GroupValue::r1(n, 1);
            let a = mu.lift_at(mu.top(), &beta, &target).unwrap();
            let u = mu.unit_residue(&a).unwrap();
            prop_assert_eq!(u.value, beta);
            prop_assert!(t.equal(&u.residue, &target));
        }
    }
}
