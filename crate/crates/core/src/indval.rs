//! Inductive valuations on `K[x]`: depth-zero valuations, ordinary
//! augmentations, evaluation through nested expansions, value-group data and
//! Newton polygons.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, ResidueTower, ValuedField};
use crate::lattice::Lattice;
use crate::ordgroup::GroupValue;
use crate::poly::{self, Poly};

pub type Res<K> = <K as ValuedField>::Residue;
pub type RElem<K> = <<K as ValuedField>::Residue as Field>::Elem;

/// Data attached to the passage from level `k-1` to level `k`.
#[derive(Clone, Debug)]
pub struct Link<K: ValuedField> {
    /// Residual polynomial of `phi_k` at level `k-1`.
    pub psi: Poly<RElem<K>>,
    /// Chosen root of `psi` in the residue field at level `k`.
    pub z: RElem<K>,
    /// `z` times the residue of `u_(k-1)`.
    pub rho: RElem<K>,
    /// Tower level adjoined for `z`, if `deg psi > 1`.
    pub tower_level: Option<usize>,
    /// Tower height after this link.
    pub height: usize,
}

impl<K: ValuedField> Link<K> {
    pub fn degree(&self) -> usize {
        poly::deg(&self.psi)
    }
}

/// One level of a refinement-collapsed chain.
#[derive(Clone, Debug)]
pub struct Level<K: ValuedField> {
    pub phi: Poly<K::Elem>,
    pub gamma: GroupValue,
    /// Grades of units at this level.
    pub units: Lattice,
    /// For `k >= 1`: each unit basis vector as `beta' + n gamma_(k-1)`.
    pub unit_reps: Vec<(GroupValue, BigInt)>,
    /// Order of `gamma` modulo the unit grades; 1 when `gamma` is infinite.
    pub e: u64,
    /// Polynomial of value `e gamma` and degree below `deg phi`.
    pub u: Poly<K::Elem>,
    pub u_residue: Option<RElem<K>>,
    pub link: Option<Link<K>>,
}

/// A step as it was supplied, before collapsing refinements.
#[derive(Clone, Debug)]
pub struct RawStep<K: ValuedField> {
    pub phi: Poly<K::Elem>,
    pub gamma: GroupValue,
    pub refinement: bool,
}

#[derive(Clone, Debug)]
pub struct InductiveValuation<K: ValuedField> {
    pub field: K,
    pub tower: Res<K>,
    pub levels: Vec<Level<K>>,
    pub raw: Vec<RawStep<K>>,
}

/// One side of a Newton polygon: points `start..=end`, `slope` per unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    pub start: usize,
    pub end: usize,
    pub slope: GroupValue,
}

impl Side {
    /// Candidate augmentation value, `-slope`.
    pub fn value(&self) -> GroupValue {
        self.slope.neg()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub points: Vec<(usize, GroupValue)>,
    pub sides: Vec<Side>,
}

impl NewtonPolygon {
    /// Sides with `-slope > threshold`, steepest first, plus an infinite
    /// value when the expansion has no constant term.
    pub fn candidates(&self, threshold: &GroupValue) -> Vec<(GroupValue, usize)> {
        let mut out = Vec::new();
        if let Some((n0, _)) = self.points.first() {
            if *n0 > 0 {
                out.push((GroupValue::Infinity, *n0));
            }
        }
        for s in &self.sides {
            if &s.value() > threshold {
                out.push((s.value(), s.end - s.start));
            }
        }
        out
    }
}

fn int_of(n: &BigInt) -> i64 {
    n.to_i64().expect("small integer")
}

impl<K: ValuedField> InductiveValuation<K> {
    /// `mu(sum c_n (x - a)^n) = min v(c_n) + n gamma`.
    pub fn depth_zero(field: &K, a: &K::Elem, gamma: GroupValue) -> Self {
        let rank = field.rank();
        let units = Lattice::standard(rank);
        let mut mu = InductiveValuation {
            field: field.clone(),
            tower: field.residue_field(),
            levels: Vec::new(),
            raw: vec![RawStep { phi: poly::x_minus(field, a), gamma: gamma.clone(), refinement: false }],
        };
        let level = mu.make_level(poly::x_minus(field, a), gamma, units, Vec::new(), None);
        mu.levels.push(level);
        mu.finish_top();
        mu
    }

    /// The Gauss valuation `min v(c_n)`.
    pub fn gauss(field: &K) -> Self {
        Self::depth_zero(field, &field.zero(), GroupValue::zero(field.rank()))
    }

    fn make_level(
        &self,
        phi: Poly<K::Elem>,
        gamma: GroupValue,
        units: Lattice,
        unit_reps: Vec<(GroupValue, BigInt)>,
        link: Option<Link<K>>,
    ) -> Level<K> {
        let e = if gamma.is_finite() { int_of(&units.order_of(&gamma)) as u64 } else { 1 };
        Level { phi, gamma, units, unit_reps, e, u: Vec::new(), u_residue: None, link }
    }

    /// Fill in `u` and its residue for the top level.
    fn finish_top(&mut self) {
        let k = self.top();
        let lvl = &self.levels[k];
        if !lvl.gamma.is_finite() {
            return;
        }
        let target = lvl.gamma.mul_int(lvl.e as i64);
        let u = self.element_of_value_at(k, &target).expect("e gamma is a unit grade");
        let r = self.unit_residue_at(k, &u).expect("u is a unit");
        self.levels[k].u = u;
        self.levels[k].u_residue = Some(r);
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn top_level(&self) -> &Level<K> {
        &self.levels[self.top()]
    }

    pub fn key(&self) -> &Poly<K::Elem> {
        &self.top_level().phi
    }

    pub fn gamma(&self) -> &GroupValue {
        &self.top_level().gamma
    }

    pub fn is_terminal(&self) -> bool {
        !self.gamma().is_finite()
    }

    /// `[mu; phi, gamma]`. Certifies that `phi` is a key polynomial and that
    /// `gamma > mu(phi)`. An augmentation by a key of the same degree as the
    /// current one replaces the top level.
    pub fn augment(&self, phi: &[K::Elem], gamma: GroupValue) -> Result<Self> {
        if self.is_terminal() {
            return Err(Error::TerminalValuation);
        }
        let k = &self.field;
        if !poly::is_monic(k, phi) {
            return Err(Error::NonMonic);
        }
        let cert = self.is_key_polynomial(phi)?;
        if cert.is_none() {
            return Err(Error::NotKeyPolynomial(poly::render(k, phi, "x")));
        }
        if gamma <= self.evaluate(phi) {
            return Err(Error::NonIncreasingValue);
        }
        Ok(self.augment_unchecked(phi, gamma))
    }

    /// Augmentation without the key and value checks; callers must have
    /// established both.
    pub(crate) fn augment_unchecked(&self, phi: &[K::Elem], gamma: GroupValue) -> Self {
        let mut mu = self.clone();
        let top = self.top();
        let same = poly::deg(phi) == poly::deg(&self.levels[top].phi);
        mu.raw.push(RawStep { phi: phi.to_vec(), gamma: gamma.clone(), refinement: same });
        if same {
            let lvl = &mut mu.levels[top];
            lvl.phi = phi.to_vec();
            lvl.e = if gamma.is_finite() { int_of(&lvl.units.order_of(&gamma)) as u64 } else { 1 };
            lvl.gamma = gamma;
            lvl.u = Vec::new();
            lvl.u_residue = None;
            mu.finish_top();
            return mu;
        }
        let cur = &self.levels[top];
        let psi = self.residual_polynomial(phi).expect("finite top").coeffs;
        let f = poly::deg(&psi);
        let (z, tower_level) = if f > 1 {
            let z = mu.tower.adjoin(&psi).expect("residual polynomial of a key is irreducible");
            (z, Some(mu.tower.height() - 1))
        } else {
            (mu.tower.neg(&psi[0]), None)
        };
        let rho = mu.tower.mul(&z, cur.u_residue.as_ref().unwrap());
        let (units, reps) = cur.units.extend(&cur.gamma);
        let unit_reps = reps
            .iter()
            .map(|r| (cur.units.combine(&r.old), r.gen.clone()))
            .collect();
        let link = Link { psi, z, rho, tower_level, height: mu.tower.height() };
        let level = mu.make_level(phi.to_vec(), gamma, units, unit_reps, Some(link));
        mu.levels.push(level);
        mu.finish_top();
        mu
    }

    pub fn evaluate(&self, f: &[K::Elem]) -> GroupValue {
        self.evaluate_at(self.top(), f)
    }

    /// Value under the valuation truncated at level `k`.
    pub fn evaluate_at(&self, k: usize, f: &[K::Elem]) -> GroupValue {
        if f.is_empty() {
            return GroupValue::Infinity;
        }
        let lvl = &self.levels[k];
        if k > 0 && f.len() < lvl.phi.len() {
            return self.evaluate_at(k - 1, f);
        }
        let coeffs = poly::phi_expansion(&self.field, f, &lvl.phi).expect("keys are monic");
        let mut best = GroupValue::Infinity;
        for (n, a) in coeffs.iter().enumerate() {
            if a.is_empty() {
                continue;
            }
            if n > 0 && !lvl.gamma.is_finite() {
                break;
            }
            let v = if k == 0 { self.field.val(&a[0]) } else { self.evaluate_at(k - 1, a) };
            let w = v.add(&lvl.gamma.mul_int(n as i64));
            if w < best {
                best = w;
            }
        }
        best
    }

    /// Generators of the value group, generators of the unit grades, and the
    /// relative ramification index of the top level.
    pub fn value_group_data(&self) -> Result<(Vec<GroupValue>, Vec<GroupValue>, u64)> {
        let lvl = self.top_level();
        if !lvl.gamma.is_finite() {
            return Err(Error::TerminalValuation);
        }
        let (full, _) = lvl.units.extend(&lvl.gamma);
        Ok((full.basis_values(), lvl.units.basis_values(), lvl.e))
    }

    pub fn element_of_value(&self, beta: &GroupValue) -> Result<Poly<K::Elem>> {
        self.element_of_value_at(self.top(), beta)
    }

    /// A monomial product `s(b_0) prod phi_i^(c_i)` of value `beta`, of
    /// degree below `deg phi_k`.
    pub fn element_of_value_at(&self, k: usize, beta: &GroupValue) -> Result<Poly<K::Elem>> {
        let out = self.element_of_value_rec(k, beta)?;
        debug_assert_eq!(&self.evaluate_at(k, &out), beta);
        debug_assert!(k == 0 && out.len() == 1 || out.len() < self.levels[k].phi.len());
        Ok(out)
    }

    fn element_of_value_rec(&self, k: usize, beta: &GroupValue) -> Result<Poly<K::Elem>> {
        let lvl = &self.levels[k];
        if !lvl.units.contains(beta) {
            return Err(Error::NotInUnitGroup(format!("{beta}")));
        }
        if k == 0 {
            return Ok(poly::constant(&self.field, self.field.section(beta)));
        }
        let (prev, n) = self.split_grade(k, beta);
        let below = &self.levels[k - 1];
        let e = below.e as i64;
        let c = n.rem_euclid(e);
        let m = (n - c) / e;
        let rest = prev.add(&below.gamma.mul_int(m * e));
        let base = self.element_of_value_rec(k - 1, &rest)?;
        Ok(poly::mul(&self.field, &base, &poly::pow(&self.field, &below.phi, c as usize)))
    }

    /// For a unit grade at level `k >= 1`, its canonical decomposition
    /// `beta' + n gamma_(k-1)` with `beta'` a unit grade one level down.
    pub fn split_grade(&self, k: usize, beta: &GroupValue) -> (GroupValue, i64) {
        let lvl = &self.levels[k];
        let c = lvl.units.int_coords(beta).expect("unit grade");
        let rank = self.field.rank();
        let mut prev = GroupValue::zero(rank);
        let mut n = BigInt::zero();
        for (ci, (b, nb)) in c.iter().zip(&lvl.unit_reps) {
            prev = prev.add(&b.scale(&BigRational::from_integer(ci.clone())));
            n += ci * nb;
        }
        (prev, int_of(&n))
    }

    /// Newton polygon of `f` with respect to `phi`, with points valued by the
    /// current valuation.
    pub fn newton_polygon(&self, phi: &[K::Elem], f: &[K::Elem]) -> Result<NewtonPolygon> {
        let coeffs = poly::phi_expansion(&self.field, f, phi)?;
        let points: Vec<(usize, GroupValue)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_empty())
            .map(|(n, a)| (n, self.evaluate(a)))
            .collect();
        Ok(NewtonPolygon { sides: lower_hull(&points), points })
    }

    /// Chain of `(phi_i, gamma_i)` after collapsing refinements.
    pub fn steps(&self) -> Vec<(Poly<K::Elem>, GroupValue)> {
        self.levels.iter().map(|l| (l.phi.clone(), l.gamma.clone())).collect()
    }

    /// Tower truncated to the residue field of level `k`.
    pub fn tower_at(&self, k: usize) -> Res<K> {
        let h = self.height_at(k);
        let mut t = self.tower.clone();
        t.truncate(h);
        t
    }

    pub fn height_at(&self, k: usize) -> usize {
        (0..=k).rev().find_map(|i| self.levels[i].link.as_ref().map(|l| l.height)).unwrap_or(0)
    }
}

/// Lower convex hull of points sorted by abscissa; slopes strictly increase.
pub fn lower_hull(points: &[(usize, GroupValue)]) -> Vec<Side> {
    let mut hull: Vec<&(usize, GroupValue)> = Vec::new();
    for pt in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b when it is on or above the segment a..pt.
            let lhs = b.1.sub(&a.1).mul_int((pt.0 - a.0) as i64);
            let rhs = pt.1.sub(&a.1).mul_int((b.0 - a.0) as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull.windows(2)
        .map(|w| Side {
            start: w[0].0,
            end: w[1].0,
            slope: w[1].1.sub(&w[0].1).div_int((w[1].0 - w[0].0) as i64),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::{FunctionField, PadicRationals, RationalFunctionsRank2};
    use crate::expr::parse_poly;
    use crate::ordgroup::rat;

    fn q2() -> PadicRationals {
        PadicRationals::new(2)
    }

    fn gv(n: i64, d: i64) -> GroupValue {
        GroupValue::r1(n, d)
    }

    #[test]
    fn depth_zero_values() {
        let k = q2();
        let g = InductiveValuation::gauss(&k);
        assert_eq!(g.evaluate(&parse_poly(&k, "x^2 + 2*x + 4").unwrap()), gv(0, 1));
        let mu = InductiveValuation::depth_zero(&k, &rat(0, 1), gv(1, 2));
        assert_eq!(mu.evaluate(&parse_poly(&k, "x^2 + 2").unwrap()), gv(1, 1));
        assert_eq!(mu.evaluate(&parse_poly(&k, "x^2 + 2*x + 4").unwrap()), gv(1, 1));
        assert_eq!(mu.evaluate(&[]), GroupValue::Infinity);

        let r = RationalFunctionsRank2::new(5);
        let two = r.constant(rat(2, 1));
        let nu = InductiveValuation::depth_zero(&r, &two, GroupValue::r2(0, 1));
        assert_eq!(nu.evaluate(&poly::x_minus(&r, &two)), GroupValue::r2(0, 1));
    }

    #[test]
    fn value_group_and_sections() {
        let k = q2();
        let g = InductiveValuation::gauss(&k);
        assert_eq!(g.value_group_data().unwrap().2, 1);
        assert_eq!(g.element_of_value(&gv(3, 1)).unwrap(), vec![rat(8, 1)]);
        let mu = InductiveValuation::depth_zero(&k, &rat(0, 1), gv(1, 3));
        let (full, units, e) = mu.value_group_data().unwrap();
        assert_eq!(e, 3);
        assert_eq!(full, vec![gv(1, 3)]);
        assert_eq!(units, vec![gv(1, 1)]);
        assert!(matches!(mu.element_of_value(&gv(1, 3)), Err(Error::NotInUnitGroup(_))));
    }

    fn sec32() -> (FunctionField, Poly<crate::basefield::mpoly::RatFn>) {
        let k = FunctionField::new(2, &["q", "r", "s"]);
        let g = parse_poly(&k, "x^8 + t^16*x + q^4 + t^4*r^2 + t^8*s").unwrap();
        (k, g)
    }

    #[test]
    fn char_two_chain_values() {
        let (k, g) = sec32();
        let mu0 = InductiveValuation::gauss(&k);
        let phi1 = parse_poly(&k, "x^2 - q").unwrap();
        let mu1 = mu0.augment(&phi1, gv(1, 1)).unwrap();
        assert_eq!(mu1.evaluate(&phi1), gv(1, 1));
        assert_eq!(mu1.evaluate(&g), gv(4, 1));
        assert_eq!(mu1.value_group_data().unwrap().2, 1);
        assert!(k.equal(&mu1.element_of_value(&gv(1, 1)).unwrap()[0], &k.t()));
        let phi2 = parse_poly(&k, "(x^2 - q)^2 - t^2*r").unwrap();
        let np = mu1.newton_polygon(&phi2, &g).unwrap();
        assert_eq!(np.sides, vec![Side { start: 0, end: 2, slope: gv(-4, 1) }]);
        let mu2 = mu1.augment(&phi2, gv(4, 1)).unwrap();
        let u = mu2.element_of_value(&gv(4, 1)).unwrap();
        assert!(poly::equal(&k, &u, &parse_poly(&k, "t^4").unwrap()));
        assert_eq!(mu2.evaluate(&phi2), gv(4, 1));
        let mu3 = mu2.augment(&g, GroupValue::Infinity).unwrap();
        assert!(mu3.is_terminal());
        assert_eq!(mu3.augment(&g, GroupValue::Infinity).unwrap_err(), Error::TerminalValuation);
        assert_eq!(mu3.levels.len(), 4);
    }

    #[test]
    fn augment_rejections() {
        let k = q2();
        let g = InductiveValuation::gauss(&k);
        let x = poly::x(&k);
        assert_eq!(g.augment(&x, gv(0, 1)).unwrap_err(), Error::NonIncreasingValue);
        let xx = parse_poly(&k, "x^2 + x").unwrap();
        assert!(matches!(g.augment(&xx, gv(5, 1)), Err(Error::NotKeyPolynomial(_))));
        let (kf, _) = sec32();
        let m = InductiveValuation::gauss(&kf);
        let p = parse_poly(&kf, "x^2 - q").unwrap();
        assert!(m.augment(&p, gv(1, 1)).is_ok());
    }

    #[test]
    fn polygon_examples() {
        let k = q2();
        let g = InductiveValuation::gauss(&k);
        let x = poly::x(&k);
        let np = g.newton_polygon(&x, &parse_poly(&k, "x^2 + 2").unwrap()).unwrap();
        assert_eq!(np.sides, vec![Side { start: 0, end: 2, slope: gv(-1, 2) }]);
        let np = g.newton_polygon(&x, &parse_poly(&k, "x^6 + 108").unwrap()).unwrap();
        assert_eq!(np.sides, vec![Side { start: 0, end: 6, slope: gv(-1, 3) }]);
        assert_eq!(np.candidates(&gv(0, 1)), vec![(gv(1, 3), 6)]);
        let np = g.newton_polygon(&x, &parse_poly(&k, "x^3 + 4*x").unwrap()).unwrap();
        assert_eq!(np.candidates(&gv(0, 1)), vec![(GroupValue::Infinity, 1), (gv(1, 1), 2)]);
    }

    #[test]
    fn hull_drops_collinear_points() {
        let pts = vec![(0, gv(2, 1)), (1, gv(1, 1)), (2, gv(0, 1))];
        assert_eq!(lower_hull(&pts), vec![Side { start: 0, end: 2, slope: gv(-1, 1) }]);
    }
}
