//! Distances to `theta`, their cuts, Okutsu-sequence verification over
//! sampled families, depth and step kinds from a sequence, and ball-degree
//! witnesses.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::ValuedField;
use crate::mlv::{MlvChain, StepKind};
use crate::ordgroup::{Cut, CutMode, DistanceSet, GroupValue, Unbounded};
use crate::poly::{self, Poly};
use crate::series::{BqElem, SeriesOracle};

/// Something that can measure `v(theta - b)`.
pub trait ThetaOracle {
    type Elem: Clone;
    fn distance(&self, b: &Self::Elem) -> Result<GroupValue>;
    /// `[K(theta) : K]`.
    fn degree(&self) -> usize;
    fn theta(&self) -> Self::Elem;
}

/// Exact distances for elements of `K[x]/(g)` through `v_theta`.
#[derive(Clone, Debug)]
pub struct ChainOracle<K: ValuedField> {
    pub chain: MlvChain<K>,
}

impl<K: ValuedField> ThetaOracle for ChainOracle<K> {
    type Elem = Poly<K::Elem>;

    fn distance(&self, b: &Poly<K::Elem>) -> Result<GroupValue> {
        let mu = &self.chain.valuation;
        let k = &mu.field;
        let diff = poly::rem(k, &poly::sub(k, &poly::x(k), b), mu.key());
        Ok(mu.evaluate(&diff))
    }

    fn degree(&self) -> usize {
        poly::deg(self.chain.valuation.key())
    }

    fn theta(&self) -> Poly<K::Elem> {
        poly::x(&self.chain.valuation.field)
    }
}

impl ThetaOracle for SeriesOracle {
    type Elem = BqElem;

    fn distance(&self, b: &BqElem) -> Result<GroupValue> {
        SeriesOracle::distance(self, b)
    }

    fn degree(&self) -> usize {
        4
    }

    fn theta(&self) -> BqElem {
        self.field.theta()
    }
}

/// A sampled family `A_l` of elements of degree `degree`, listed so that
/// distances should increase, with the caller's declarations about the
/// full distance set `D_degree`.
#[derive(Clone, Debug)]
pub struct Family<E> {
    pub degree: usize,
    pub members: Vec<(String, E)>,
    /// Where the unsampled tail of the distances escapes to, if anywhere.
    pub unbounded: Option<Unbounded>,
    /// Declared: `D_degree` has a maximum.
    pub max_exists: bool,
}

#[derive(Clone, Debug)]
pub struct OkutsuSequence<E> {
    pub families: Vec<Family<E>>,
}

#[derive(Clone, Debug)]
pub struct Challenger<E> {
    pub label: String,
    pub elem: E,
    /// Caller-asserted `deg_K b`.
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub rule: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct OkutsuReport {
    pub checks: Vec<Check>,
    pub distances: Vec<Vec<(String, GroupValue)>>,
    pub scope: String,
}

impl OkutsuReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self, rule: &str) -> usize {
        self.checks.iter().filter(|c| c.rule == rule && !c.ok).count()
    }
}

/// Cut `D_m^+` of a family's distances, improper for `m = deg theta`.
pub fn distance_cut<O: ThetaOracle>(oracle: &O, family: &Family<O::Elem>) -> Result<Cut> {
    if family.degree == oracle.degree() {
        return Ok(Cut::PlusInfinityMinus);
    }
    let values = family.members.iter().map(|(_, b)| oracle.distance(b)).collect::<Result<Vec<_>>>()?;
    DistanceSet { finite_values: values, unbounded: family.unbounded.clone() }.cut(CutMode::Plus)
}

/// Check the sequence against its sampled members and the challengers.
/// Precision failures of the oracle propagate.
pub fn verify_okutsu_sequence<O: ThetaOracle>(
    oracle: &O,
    seq: &OkutsuSequence<O::Elem>,
    challengers: &[Challenger<O::Elem>],
) -> Result<OkutsuReport> {
    let fams = &seq.families;
    if fams.is_empty() {
        return Err(Error::InvalidInput("empty sequence".into()));
    }
    let mut checks = Vec::new();
    let mut distances = Vec::new();
    for f in fams {
        let ds = f
            .members
            .iter()
            .map(|(l, b)| Ok((l.clone(), oracle.distance(b)?)))
            .collect::<Result<Vec<_>>>()?;
        distances.push(ds);
    }
    let degs: Vec<usize> = fams.iter().map(|f| f.degree).collect();
    let increasing = degs.windows(2).all(|w| w[0] < w[1]);
    let last = distances.last().unwrap();
    let ends_at_theta = degs.last() == Some(&oracle.degree())
        && last.len() == 1
        && last[0].1 == GroupValue::Infinity;
    checks.push(Check {
        rule: "degrees",
        ok: degs[0] == 1 && increasing && ends_at_theta,
        detail: format!("degrees {degs:?}, theta has degree {}", oracle.degree()),
    });
    for (l, (f, ds)) in fams.iter().zip(&distances).enumerate().take(fams.len() - 1) {
        if ds.is_empty() {
            checks.push(Check { rule: "OS0", ok: false, detail: format!("family {l} has no members") });
            continue;
        }
        checks.push(Check {
            rule: "OS1",
            ok: !f.max_exists || f.members.len() == 1,
            detail: format!(
                "family {l}: {} member(s), maximum {}",
                f.members.len(),
                if f.max_exists { "declared" } else { "not declared" }
            ),
        });
        let sorted = ds.windows(2).all(|w| w[0].1 < w[1].1);
        checks.push(Check {
            rule: "OS2",
            ok: sorted,
            detail: format!("family {l}: {} sampled distances strictly increase: {sorted}", ds.len()),
        });
        let next = &distances[l + 1];
        let top = ds.iter().map(|d| &d.1).max().unwrap();
        if let Some(low) = next.iter().map(|d| &d.1).min() {
            checks.push(Check {
                rule: "OS3",
                ok: top < low,
                detail: format!("family {l} reaches {top}, family {} starts at {low}", l + 1),
            });
        }
    }
    for c in challengers {
        let Some(l) = (0..fams.len()).rev().find(|&l| fams[l].degree <= c.degree) else {
            checks.push(Check { rule: "OS0", ok: false, detail: format!("{}: degree {} below every family", c.label, c.degree) });
            continue;
        };
        let d = oracle.distance(&c.elem)?;
        let best = distances[l].iter().find(|(_, a)| *a >= d);
        checks.push(Check {
            rule: "OS0",
            ok: best.is_some(),
            detail: match best {
                Some((lbl, a)) => format!("{} at {d} is matched by {lbl} at {a} in family {l}", c.label),
                None => format!("{} at {d} exceeds every sampled distance of family {l}", c.label),
            },
        });
    }
    let sampled: usize = fams.iter().map(|f| f.members.len()).sum();
    let scope = format!(
        "relative to {sampled} sampled members and {} challengers; unboundedness and maxima are caller declarations; OS2 for infinite families is an attestation",
        challengers.len()
    );
    Ok(OkutsuReport { checks, distances, scope })
}

/// Depth read off a sequence and the kind of each step: ordinary exactly
/// when the distance set of that degree has a declared maximum.
pub fn okutsu_depth_and_kinds<E>(seq: &OkutsuSequence<E>) -> (usize, Vec<StepKind>) {
    let r = seq.families.len() - 1;
    let kinds = seq.families[..r]
        .iter()
        .map(|f| if f.max_exists { StepKind::Ordinary } else { StepKind::LimitAttested })
        .collect();
    (r, kinds)
}

/// `v(theta - b) >= delta`, certifying `deg B(theta, delta) <= deg b`.
pub fn ball_degree_witness<O: ThetaOracle>(oracle: &O, delta: &GroupValue, b: &O::Elem) -> Result<bool> {
    Ok(&oracle.distance(b)? >= delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::PadicRationals;
    use crate::expr::parse_poly;
    use crate::mlv::{compute_mlv_chain, Bounds};
    use crate::ordgroup::rat;

    fn rank_two(samples: usize) -> (SeriesOracle, OkutsuSequence<BqElem>, Vec<Challenger<BqElem>>) {
        let o = SeriesOracle::new(5, 16, 24).unwrap();
        let f = o.field.clone();
        let digits = o.digit_family(samples).unwrap().into_iter().map(|(l, b, _)| (l, b)).collect();
        let a0 = Family { degree: 1, members: digits, unbounded: Some(Unbounded::AtLevel(rat(0, 1))), max_exists: false };
        let a1 = Family { degree: 2, members: o.alpha_family(samples), unbounded: Some(Unbounded::Full), max_exists: false };
        let top = Family { degree: 4, members: vec![("theta".into(), f.theta())], unbounded: None, max_exists: true };
        let ch = |s: &str, d| Challenger { label: s.into(), elem: f.parse(s).unwrap(), degree: d };
        let challengers = vec![ch("0", 1), ch("2 + t", 1), ch("7/3", 1), ch("1 + 1/2*t", 1), ch("i + 1", 2), ch("i", 2), ch("i + 1 + 1/2*t", 2), ch("alpha + 2", 2)];
        (o, OkutsuSequence { families: vec![a0, a1, top] }, challengers)
    }

    #[test]
    fn rank_two_sequence_verifies() {
        let (o, seq, ch) = rank_two(5);
        let rep = verify_okutsu_sequence(&o, &seq, &ch).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
        assert_eq!(okutsu_depth_and_kinds(&seq), (2, vec![StepKind::LimitAttested, StepKind::LimitAttested]));
        assert_eq!(distance_cut(&o, &seq.families[0]).unwrap(), Cut::LevelPlus(rat(0, 1)));
        assert_eq!(distance_cut(&o, &seq.families[2]).unwrap(), Cut::PlusInfinityMinus);
        assert!(rep.scope.contains("attestation"));
    }

    #[test]
    fn rank_two_broken_sequences() {
        let (o, seq, _) = rank_two(4);
        let f = &o.field;
        let mut short = seq.clone();
        short.families.remove(1);
        let ch = vec![Challenger { label: "i + 1".into(), elem: f.parse("i + 1").unwrap(), degree: 2 }];
        let rep = verify_okutsu_sequence(&o, &short, &ch).unwrap();
        assert_eq!(rep.failures("OS0"), 1);
        let mut swapped = seq.clone();
        swapped.families.swap(0, 1);
        let rep = verify_okutsu_sequence(&o, &swapped, &[]).unwrap();
        assert!(rep.failures("OS3") > 0);
        assert!(!rep.passed());
    }

    #[test]
    fn ball_witnesses() {
        let (o, _, _) = rank_two(1);
        let f = &o.field;
        let d = GroupValue::r2(1, 0);
        assert!(ball_degree_witness(&o, &d, &f.parse("i + 1").unwrap()).unwrap());
        assert!(!ball_degree_witness(&o, &d, &f.parse("3").unwrap()).unwrap());
        assert!(ball_degree_witness(&o, &GroupValue::r2(40, 0), &f.theta()).unwrap());
    }

    #[test]
    fn sextic_sequence_matches_chain() {
        let k = PadicRationals::new(2);
        let g = parse_poly(&k, "x^6 + 108").unwrap();
        let chain = compute_mlv_chain(&k, &g, &Bounds::default()).unwrap();
        let eps = parse_poly(&k, "x^3/12 - 1/2").unwrap();
        let cube = parse_poly(&k, "-x^4/36 - x/2").unwrap();
        let red = |p: &[_]| poly::rem(&k, p, &g);
        assert_eq!(red(&poly::pow(&k, &cube, 3)), vec![rat(2, 1)]);
        let b1 = red(&poly::neg(&k, &poly::mul(&k, &cube, &poly::mul(&k, &eps, &eps))));
        assert!(red(&poly::add(&k, &poly::pow(&k, &b1, 3), &[rat(2, 1)])).is_empty());
        let oracle = ChainOracle { chain: chain.clone() };
        assert_eq!(oracle.distance(&b1).unwrap(), GroupValue::r1(4, 3));
        let fam = |degree, label: &str, e| Family { degree, members: vec![(label.into(), e)], unbounded: None, max_exists: true };
        let seq = OkutsuSequence {
            families: vec![fam(1, "0", Vec::new()), fam(3, "cube root of -2", b1), fam(6, "theta", poly::x(&k))],
        };
        let ch = vec![
            Challenger { label: "1".into(), elem: vec![rat(1, 1)], degree: 1 },
            Challenger { label: "2".into(), elem: vec![rat(2, 1)], degree: 1 },
            Challenger { label: "-alpha".into(), elem: poly::neg(&k, &cube), degree: 3 },
        ];
        let rep = verify_okutsu_sequence(&oracle, &seq, &ch).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
        let (r, kinds) = okutsu_depth_and_kinds(&seq);
        assert_eq!(r, chain.depth);
        assert!(kinds.iter().all(|k| *k == StepKind::Ordinary));
        assert_eq!(distance_cut(&oracle, &seq.families[0]).unwrap(), Cut::PrincipalPlus(GroupValue::r1(1, 3)));
    }
}
