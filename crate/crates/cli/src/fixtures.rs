//! The shipped worked examples.

use clap::ValueEnum;
use mlvdepth_core::basefield::PadicRationals;
use mlvdepth_core::error::Result;
use mlvdepth_core::expr::parse_poly;
use mlvdepth_core::okutsu::{Challenger, Family, OkutsuSequence};
use mlvdepth_core::ordgroup::{rat, Unbounded};
use mlvdepth_core::poly::{self, Poly};
use mlvdepth_core::series::{BqElem, SeriesOracle};
use mlvdepth_core::field::Field;

type Q = Poly<<PadicRationals as Field>::Elem>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    /// Separable degree p^3 example over F_p(q,r,s)(t), depth 3.
    Sec32,
    /// x^6 + 108 over (Q, ord_2), depth 2 with no depth-one generator.
    Sec34,
    /// The biquadratic extension of Q(t) with two limit steps.
    Sec4,
}

impl Fixture {
    pub fn name(self) -> &'static str {
        match self {
            Fixture::Sec32 => "sec32",
            Fixture::Sec34 => "sec34",
            Fixture::Sec4 => "sec4",
        }
    }
}

pub fn sec32_field(p: u64) -> String {
    format!("fp:{p}:q,r,s")
}

pub fn sec32_polynomial(p: u64) -> String {
    format!("((x^{p} - q)^{p} - t^{p}*r)^{p} + t^{}*x - t^{}*s", p.pow(4), p.pow(3))
}

pub const SEC34_FIELD: &str = "qp:2";
pub const SEC34_POLYNOMIAL: &str = "x^6 + 108";

pub const SEC4_PRIME: u64 = 5;

/// Okutsu sequence for the sextic, with elements as classes modulo `g`.
///
/// The degree-three member is a cube root of `-2` inside `K[x]/(g)`: with
/// `alpha = -x^4/36 - x/2` (so `alpha^3 = 2`) and `eps = x^3/12 - 1/2` (a
/// primitive cube root of unity), it is `-alpha eps^2`.
pub fn sec34_sequence(k: &PadicRationals) -> Result<(OkutsuSequence<Q>, Vec<Challenger<Q>>)> {
    let g = parse_poly(k, SEC34_POLYNOMIAL)?;
    let red = |p: &[_]| poly::rem(k, p, &g);
    let eps = parse_poly(k, "x^3/12 - 1/2")?;
    let cube = parse_poly(k, "-x^4/36 - x/2")?;
    let b1 = red(&poly::neg(k, &poly::mul(k, &cube, &poly::mul(k, &eps, &eps))));
    let fam = |degree, label: &str, e: Poly<_>| Family { degree, members: vec![(label.to_string(), e)], unbounded: None, max_exists: true };
    let seq = OkutsuSequence {
        families: vec![fam(1, "0", Vec::new()), fam(3, "-alpha*eps^2", b1), fam(6, "theta", poly::x(k))],
    };
    let ch = vec![
        Challenger { label: "1".into(), elem: vec![rat(1, 1)], degree: 1 },
        Challenger { label: "2".into(), elem: vec![rat(2, 1)], degree: 1 },
        Challenger { label: "-alpha".into(), elem: poly::neg(k, &cube), degree: 3 },
        Challenger { label: "-alpha*eps".into(), elem: red(&poly::neg(k, &poly::mul(k, &cube, &eps))), degree: 3 },
    ];
    Ok((seq, ch))
}

/// Okutsu sequence for the rank-two example: the digit approximations of
/// `i` (shifted by one), then `i + b_m`, then `theta`.
pub fn sec4_sequence(o: &SeriesOracle, samples: usize) -> Result<(OkutsuSequence<BqElem>, Vec<Challenger<BqElem>>)> {
    let f = &o.field;
    let digits = o.digit_family(samples)?.into_iter().map(|(l, b, _)| (l, b)).collect();
    let a0 = Family { degree: 1, members: digits, unbounded: Some(Unbounded::AtLevel(rat(0, 1))), max_exists: false };
    let a1 = Family { degree: 2, members: o.alpha_family(samples), unbounded: Some(Unbounded::Full), max_exists: false };
    let top = Family { degree: 4, members: vec![("theta".into(), f.theta())], unbounded: None, max_exists: true };
    let mut ch = Vec::new();
    for (s, d) in [("0", 1), ("2 + t", 1), ("7/3", 1), ("1 + 1/2*t", 1), ("i + 1", 2), ("i", 2), ("i + 1 + 1/2*t", 2), ("alpha + 2", 2)] {
        ch.push(Challenger { label: s.into(), elem: f.parse(s)?, degree: d });
    }
    Ok((OkutsuSequence { families: vec![a0, a1, top] }, ch))
}

/// Depth-one controls: a totally ramified cubic and an unramified quadratic,
/// each with its two-member Okutsu sequence `0, theta`.
pub const DEPTH_ONE_CONTROLS: [(&str, &str); 2] = [("qp:2", "x^3 - 2"), ("qp:2", "x^2 + x + 1")];

pub fn depth_one_sequence(k: &PadicRationals, g: &[<PadicRationals as Field>::Elem]) -> OkutsuSequence<Q> {
    let fam = |degree, label: &str, e: Poly<_>| Family { degree, members: vec![(label.to_string(), e)], unbounded: None, max_exists: true };
    OkutsuSequence { families: vec![fam(1, "0", Vec::new()), fam(poly::deg(g), "theta", poly::x(k))] }
}
