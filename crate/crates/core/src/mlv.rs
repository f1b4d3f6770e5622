//! MacLane-Vaquié chains for the ordinary-augmentation case: automatic
//! construction, branch certificates, depth, invariants, depth-one
//! certificates and an exhaustive generator search.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::{render_tower, Field, ResidueTower, ValuedField};
use crate::indval::{InductiveValuation, NewtonPolygon, RElem};
use crate::lattice::Lattice;
use crate::ordgroup::GroupValue;
use crate::poly::{self, Poly};
use crate::residual::render_residual_poly;

/// What to do when more than one augmentation is available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Take the first option in canonical order.
    FollowFirst,
    /// Fail with `Branched`.
    Reject,
}

#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    /// Consecutive augmentations without degree growth before giving up.
    pub max_refinements: usize,
    pub policy: Policy,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_refinements: 25, policy: Policy::FollowFirst }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Ordinary,
    LimitAttested,
}

impl StepKind {
    pub fn label(&self) -> &'static str {
        match self {
            StepKind::Ordinary => "ordinary",
            StepKind::LimitAttested => "limit-attested",
        }
    }
}

/// A refinement-collapsed chain step with its ramification index and the
/// residue degree of the passage to the next step.
#[derive(Clone, Debug)]
pub struct ChainStep<E> {
    pub phi: Poly<E>,
    pub gamma: GroupValue,
    pub kind: StepKind,
    pub e: u64,
    pub f: usize,
}

/// What the loop saw at one valuation: `R(g)`, its factorization and the
/// polygon that fixed the next value.
#[derive(Clone, Debug)]
pub struct Trace {
    pub level: usize,
    pub key: String,
    pub gamma: GroupValue,
    pub residual: String,
    pub factors: Vec<(String, usize)>,
    pub factored: String,
    pub polygon: Option<NewtonPolygon>,
}

#[derive(Clone, Debug)]
pub struct MlvChain<K: ValuedField> {
    pub valuation: InductiveValuation<K>,
    pub steps: Vec<ChainStep<K::Elem>>,
    pub depth: usize,
    pub trace: Vec<Trace>,
    /// Polygon of `g` with respect to `x` over the base valuation.
    pub initial_polygon: NewtonPolygon,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainInvariants {
    pub e: u64,
    pub f: usize,
    pub defect_assumed_one: bool,
}

impl<K: ValuedField> MlvChain<K> {
    pub fn invariants(&self) -> ChainInvariants {
        ChainInvariants {
            e: self.steps.iter().map(|s| s.e).product(),
            f: self.steps.iter().map(|s| s.f).product(),
            defect_assumed_one: true,
        }
    }

    /// Rebuild the raw chain through the checked `augment` and confirm
    /// `v_theta(phi_i) = gamma_i` for every collapsed step.
    pub fn recertify(&self) -> Result<()> {
        let mu = &self.valuation;
        let first = &mu.raw[0];
        let a = mu.field.neg(&first.phi[0]);
        let mut nu = InductiveValuation::depth_zero(&mu.field, &a, first.gamma.clone());
        for s in &mu.raw[1..] {
            nu = nu.augment(&s.phi, s.gamma.clone())?;
        }
        for s in &self.steps {
            let v = if s.gamma.is_finite() { nu.evaluate(&s.phi) } else { GroupValue::Infinity };
            if v != s.gamma {
                return Err(Error::PreconditionViolated(format!("step value {v} differs from {}", s.gamma)));
            }
        }
        if !ends_at(&nu, self.steps.last().map(|s| &s.phi)) {
            return Err(Error::PreconditionViolated("terminal key does not vanish".into()));
        }
        Ok(())
    }

    /// Residual polynomials in factored form, one per non-terminal level in
    /// chain order, skipping refinements.
    pub fn residual_polynomials(&self) -> Vec<String> {
        let mut out: Vec<(usize, String)> = Vec::new();
        for t in &self.trace {
            match out.last_mut() {
                Some((lvl, s)) if *lvl == t.level => *s = t.factored.clone(),
                _ => out.push((t.level, t.factored.clone())),
            }
        }
        out.into_iter().map(|(_, s)| s).collect()
    }
}

/// True when `nu` is terminal with key `phi`.
fn ends_at<K: ValuedField>(nu: &InductiveValuation<K>, phi: Option<&Poly<K::Elem>>) -> bool {
    phi.map_or(false, |p| poly::equal(&nu.field, p, nu.key())) && nu.is_terminal()
}

/// Render a factorization as a product of powers.
pub fn render_factored<T: ResidueTower>(t: &T, fs: &[(Vec<T::Elem>, usize)]) -> String {
    if fs.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = fs
        .iter()
        .map(|(f, m)| {
            let s = render_residual_poly(t, f);
            match (fs.len(), *m) {
                (1, 1) => s,
                (_, 1) if !s.contains(' ') => s,
                (_, 1) => format!("({s})"),
                _ => format!("({s})^{m}"),
            }
        })
        .collect();
    parts.join("*")
}

fn check_input<K: ValuedField>(k: &K, g: &[K::Elem]) -> Result<()> {
    poly::nonzero(g)?;
    if !poly::is_monic(k, g) {
        return Err(Error::NonMonic);
    }
    if g.iter().any(|c| !k.is_zero(c) && k.val(c) < GroupValue::zero(k.rank())) {
        return Err(Error::NotIntegral);
    }
    Ok(())
}

/// Polygon of `g` in powers of `x` with points valued by `v`.
fn base_polygon<K: ValuedField>(k: &K, g: &[K::Elem]) -> NewtonPolygon {
    InductiveValuation::gauss(k).newton_polygon(&poly::x(k), g).expect("x is monic")
}

/// Depth-zero starting points, one per side of the base polygon; the
/// infinite value appears when `x` divides `g`.
fn initial_options(np: &NewtonPolygon) -> Vec<GroupValue> {
    let mut out = Vec::new();
    if np.points.first().map_or(false, |p| p.0 > 0) {
        out.push(GroupValue::Infinity);
    }
    out.extend(np.sides.iter().map(|s| s.value()));
    out
}

struct Candidate<E> {
    phi: Poly<E>,
    gamma: GroupValue,
    label: String,
}

/// Next augmentations of `mu` towards the roots of `g`: each residual factor
/// is lifted to a key polynomial and each admissible polygon side becomes an
/// option. Also returns the trace entry for this state.
fn next_options<K: ValuedField>(
    mu: &InductiveValuation<K>,
    g: &[K::Elem],
) -> Result<(Vec<Candidate<K::Elem>>, Vec<(Vec<RElem<K>>, usize)>, Trace)> {
    let k = &mu.field;
    let r = mu.residual_polynomial(g)?;
    let fs = mu.tower.factor(&r.coeffs)?;
    let mut options = Vec::new();
    let mut polygon = None;
    for (psi, _) in &fs {
        let phi = mu.lift_key(psi)?;
        let np = mu.newton_polygon(&phi, g)?;
        let threshold = mu.evaluate(&phi);
        for (lam, _) in np.candidates(&threshold) {
            options.push(Candidate {
                phi: phi.clone(),
                gamma: lam.clone(),
                label: format!("{} -> ({}, {})", render_residual_poly(&mu.tower, psi), poly::render(k, &phi, "x"), lam),
            });
        }
        if polygon.is_none() {
            polygon = Some(np);
        }
    }
    let trace = Trace {
        level: mu.top(),
        key: poly::render(k, mu.key(), "x"),
        gamma: mu.gamma().clone(),
        residual: render_residual_poly(&mu.tower, &r.coeffs),
        factors: fs.iter().map(|(f, m)| (render_residual_poly(&mu.tower, f), *m)).collect(),
        factored: render_factored(&mu.tower, &fs),
        polygon,
    };
    Ok((options, fs, trace))
}

/// Run the MacLane loop on a monic integral `g`.
pub fn compute_mlv_chain<K: ValuedField>(k: &K, g: &[K::Elem], bounds: &Bounds) -> Result<MlvChain<K>> {
    check_input(k, g)?;
    let initial_polygon = base_polygon(k, g);
    let starts = initial_options(&initial_polygon);
    if starts.len() > 1 && bounds.policy == Policy::Reject {
        return Err(Error::Branched(starts.iter().map(|l| format!("(x, {l})")).collect()));
    }
    let lam0 = starts[0].clone();
    if !lam0.is_finite() && g.len() > 2 {
        return Err(Error::Reducible("x".into()));
    }
    let mut mu = InductiveValuation::depth_zero(k, &k.zero(), lam0);
    let mut trace = Vec::new();
    let mut stalled = 0;
    while !mu.is_terminal() {
        if mu.is_key_polynomial(g)?.is_some() {
            let r = mu.residual_polynomial(g)?;
            let fs = mu.tower.factor(&r.coeffs)?;
            trace.push(Trace {
                level: mu.top(),
                key: poly::render(k, mu.key(), "x"),
                gamma: mu.gamma().clone(),
                residual: render_residual_poly(&mu.tower, &r.coeffs),
                factors: fs.iter().map(|(f, m)| (render_residual_poly(&mu.tower, f), *m)).collect(),
                factored: render_factored(&mu.tower, &fs),
                polygon: None,
            });
            mu = mu.augment(g, GroupValue::Infinity)?;
            break;
        }
        let (options, _, t) = next_options(&mu, g)?;
        trace.push(t);
        if options.is_empty() {
            return Err(Error::PreconditionViolated("no admissible augmentation".into()));
        }
        if options.len() > 1 && bounds.policy == Policy::Reject {
            return Err(Error::Branched(options.into_iter().map(|o| o.label).collect()));
        }
        let next = options.into_iter().next().unwrap();
        if !next.gamma.is_finite() && !poly::equal(k, &next.phi, g) {
            return Err(Error::Reducible(poly::render(k, &next.phi, "x")));
        }
        if next.phi.len() == mu.key().len() {
            stalled += 1;
            if stalled > bounds.max_refinements {
                return Err(Error::LimitSituation { refinements: stalled - 1 });
            }
        } else {
            stalled = 0;
        }
        mu = mu.augment(&next.phi, next.gamma)?;
    }
    Ok(finish(mu, trace, initial_polygon))
}

fn finish<K: ValuedField>(mu: InductiveValuation<K>, trace: Vec<Trace>, initial_polygon: NewtonPolygon) -> MlvChain<K> {
    let n = mu.levels.len();
    let steps = (0..n)
        .map(|i| {
            let l = &mu.levels[i];
            ChainStep {
                phi: l.phi.clone(),
                gamma: l.gamma.clone(),
                kind: StepKind::Ordinary,
                e: l.e,
                f: mu.levels.get(i + 1).and_then(|m| m.link.as_ref()).map_or(1, |x| x.degree()),
            }
        })
        .collect();
    MlvChain { depth: n - 1, valuation: mu, steps, trace, initial_polygon }
}

/// One branch of `g` over the completion, as far as the loop resolved it.
#[derive(Clone, Debug)]
pub struct Branch<E> {
    pub prefix: Vec<(Poly<E>, GroupValue)>,
    /// Residual factor (rendered) that closed the branch.
    pub factor: String,
    pub e: u64,
    pub f: usize,
    pub resolved: bool,
    pub note: Option<String>,
}

/// Explore every residual factor and every polygon side. Branches close at
/// residual multiplicity one, at an exact factor, or when the refinement
/// bound is hit (unresolved).
pub fn factor_certificate<K: ValuedField>(k: &K, g: &[K::Elem], bounds: &Bounds) -> Result<Vec<Branch<K::Elem>>> {
    check_input(k, g)?;
    let np = base_polygon(k, g);
    let mut out = Vec::new();
    for lam in initial_options(&np) {
        if !lam.is_finite() {
            out.push(Branch {
                prefix: vec![(poly::x(k), lam)],
                factor: "x".into(),
                e: 1,
                f: 1,
                resolved: true,
                note: None,
            });
            continue;
        }
        let mu = InductiveValuation::depth_zero(k, &k.zero(), lam);
        explore(&mu, g, bounds, 0, &mut out)?;
    }
    Ok(out)
}

fn explore<K: ValuedField>(
    mu: &InductiveValuation<K>,
    g: &[K::Elem],
    bounds: &Bounds,
    stalled: usize,
    out: &mut Vec<Branch<K::Elem>>,
) -> Result<()> {
    let e_here: u64 = mu.levels.iter().map(|l| l.e).product();
    let f_here = mu.tower.total_degree();
    let r = mu.residual_polynomial(g)?;
    let fs = mu.tower.factor(&r.coeffs)?;
    for (psi, m) in &fs {
        let label = render_residual_poly(&mu.tower, psi);
        if *m == 1 {
            out.push(Branch {
                prefix: mu.steps(),
                factor: label,
                e: e_here,
                f: f_here * poly::deg(psi),
                resolved: true,
                note: None,
            });
            continue;
        }
        let phi = mu.lift_key(psi)?;
        let np = mu.newton_polygon(&phi, g)?;
        let threshold = mu.evaluate(&phi);
        for (lam, _) in np.candidates(&threshold) {
            if !lam.is_finite() {
                let mut prefix = mu.steps();
                prefix.push((phi.clone(), lam));
                let f = f_here * poly::deg(psi);
                out.push(Branch { prefix, factor: label.clone(), e: e_here, f, resolved: true, note: None });
                continue;
            }
            let same = phi.len() == mu.key().len();
            let s = if same { stalled + 1 } else { 0 };
            if s > bounds.max_refinements {
                out.push(Branch {
                    prefix: mu.steps(),
                    factor: label.clone(),
                    e: e_here,
                    f: f_here,
                    resolved: false,
                    note: Some(format!("{} refinements without degree growth", s - 1)),
                });
                continue;
            }
            let nu = mu.augment(&phi, lam)?;
            explore(&nu, g, bounds, s, out)?;
        }
    }
    Ok(())
}

/// Outcome of the depth-one test for `alpha` in `K[x]/(g)`.
#[derive(Clone, Debug)]
pub struct DepthOneReport {
    pub value: GroupValue,
    /// Order of `v(alpha)` modulo `vK`.
    pub e: u64,
    /// `v(u)` for the section element `u` dividing `alpha^e`.
    pub u_value: GroupValue,
    pub residue: String,
    pub residue_degree: usize,
    pub expected_e: u64,
    pub expected_f: usize,
    pub failure: Option<Error>,
}

impl DepthOneReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that `v(alpha)` generates `vL/vK` and that the residue of
/// `alpha^e/u` generates `Lv/Kv`.
pub fn depth_one_certificate<K: ValuedField>(chain: &MlvChain<K>, alpha: &[K::Elem]) -> Result<DepthOneReport> {
    let mu = &chain.valuation;
    let k = &mu.field;
    let g = mu.key();
    if !mu.is_terminal() {
        return Err(Error::PreconditionViolated("chain is not complete".into()));
    }
    let a = poly::rem(k, alpha, g);
    poly::nonzero(&a).map_err(|_| Error::InvalidInput("alpha is zero".into()))?;
    let top = mu.top();
    let value = mu.evaluate(&a);
    let base = Lattice::standard(k.rank());
    let e = base.order_of(&value).to_u64().expect("small index");
    let (generated, _) = base.extend(&value);
    let vl = &mu.levels[top].units;
    let value_ok = vl.basis_values().iter().all(|b| generated.contains(b));
    let inv = chain.invariants();
    let u_value = value.mul_int(e as i64);
    let mut report = DepthOneReport {
        value,
        e,
        u_value: u_value.clone(),
        residue: String::new(),
        residue_degree: 0,
        expected_e: inv.e,
        expected_f: inv.f,
        failure: None,
    };
    let power = poly::rem(k, &poly::pow_mod(k, &a, &BigInt::from(e).to_biguint().unwrap(), g), g);
    let u = poly::constant(k, k.section(&u_value));
    let t = &mu.tower;
    let res = t.div(&mu.unit_residue_at(top, &power)?, &mu.unit_residue_at(top, &u)?);
    report.residue = render_tower(t, &res, t.height());
    report.residue_degree = t.degree_over_base(&res)?;
    if !value_ok {
        report.failure = Some(Error::ValueNotGenerating);
    } else if report.residue_degree != inv.f {
        report.failure = Some(Error::ResidueNotGenerating);
    }
    Ok(report)
}

/// Row of the generator search table.
#[derive(Clone, Debug)]
pub struct SearchEntry<E> {
    pub element: Poly<E>,
    pub minimal_polynomial: Poly<E>,
    pub depth: core::result::Result<usize, Error>,
}

#[derive(Clone, Debug)]
pub struct SearchReport<E> {
    /// Least depth found; an upper bound for the depth of the extension.
    pub min_depth: Option<usize>,
    pub witness: Option<Poly<E>>,
    pub table: Vec<SearchEntry<E>>,
    pub examined: usize,
    pub budget_exhausted: bool,
}

/// Candidate coefficient vectors for `sum c_i x^i`, `|c_i| <= radius`,
/// ordered by L1 norm, then degree, then coefficients from the top with
/// `0, 1, -1, 2, -2, ...`.
pub fn search_box(n: usize, radius: i64) -> Vec<Vec<i64>> {
    let side = (2 * radius + 1) as usize;
    let total = side.pow(n as u32);
    let mut out: Vec<Vec<i64>> = (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let c = (idx % side) as i64 - radius;
                    idx /= side;
                    c
                })
                .collect()
        })
        .collect();
    let rank = |c: i64| if c > 0 { 2 * c - 1 } else { -2 * c };
    out.sort_by_key(|v| {
        let l1: i64 = v.iter().map(|c| c.abs()).sum();
        let deg = v.iter().rposition(|c| *c != 0).map_or(0, |d| d + 1);
        (l1, deg, v.iter().rev().map(|c| rank(*c)).collect::<Vec<_>>())
    });
    out
}

/// Depths of the elements of a coefficient box that generate `K[x]/(g)`.
/// `budget` caps the number of chains computed.
pub fn generator_search<K: ValuedField>(
    k: &K,
    g: &[K::Elem],
    radius: i64,
    budget: Option<usize>,
    bounds: &Bounds,
) -> Result<SearchReport<K::Elem>> {
    check_input(k, g)?;
    let n = poly::deg(g);
    let mut report = SearchReport { min_depth: None, witness: None, table: Vec::new(), examined: 0, budget_exhausted: false };
    if n == 1 {
        report.min_depth = Some(0);
        report.witness = Some(poly::x(k));
        return Ok(report);
    }
    for cs in search_box(n, radius) {
        if cs.iter().skip(1).all(|c| *c == 0) {
            continue;
        }
        if budget.map_or(false, |b| report.examined >= b) {
            report.budget_exhausted = true;
            break;
        }
        if let Some(entry) = search_candidate(k, g, &cs, bounds) {
            record(&mut report, entry);
        }
    }
    Ok(report)
}

/// Chain depth of the minimal polynomial of `sum cs_i x^i`, or `None` when
/// that element does not generate `K[x]/(g)`.
pub fn search_candidate<K: ValuedField>(k: &K, g: &[K::Elem], cs: &[i64], bounds: &Bounds) -> Option<SearchEntry<K::Elem>> {
    let h: Poly<K::Elem> = poly::trim(k, cs.iter().map(|&c| k.from_int(c)).collect());
    let m = poly::minimal_polynomial_in_quotient(k, g, &h);
    if poly::deg(&m) != poly::deg(g) {
        return None;
    }
    let depth = compute_mlv_chain(k, &m, bounds).map(|c| c.depth);
    Some(SearchEntry { element: h, minimal_polynomial: m, depth })
}

/// Append an entry, keeping the first witness of the least depth.
pub fn record<E: Clone>(report: &mut SearchReport<E>, entry: SearchEntry<E>) {
    report.examined += 1;
    if let Ok(d) = entry.depth {
        if report.min_depth.map_or(true, |best| d < best) {
            report.min_depth = Some(d);
            report.witness = Some(entry.element.clone());
        }
    }
    report.table.push(entry);
}
