//! Value groups `Q` and `Q^2` (lexicographic), extended by infinity, and the
//! closed family of cuts used for distances.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of `Gamma` extended by infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupValue {
    Rank1(BigRational),
    Rank2(BigRational, BigRational),
    Infinity,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl GroupValue {
    pub fn zero(rank: usize) -> Self {
        match rank {
            1 => GroupValue::Rank1(BigRational::zero()),
            _ => GroupValue::Rank2(BigRational::zero(), BigRational::zero()),
        }
    }

    pub fn r1(n: i64, d: i64) -> Self {
        GroupValue::Rank1(rat(n, d))
    }

    pub fn r2(a: i64, b: i64) -> Self {
        GroupValue::Rank2(int(a), int(b))
    }

    pub fn from_components(c: &[BigRational]) -> Self {
        match c.len() {
            1 => GroupValue::Rank1(c[0].clone()),
            2 => GroupValue::Rank2(c[0].clone(), c[1].clone()),
            _ => panic!("group values have rank 1 or 2"),
        }
    }

    /// Coordinates of a finite value; empty for infinity.
    pub fn components(&self) -> Vec<BigRational> {
        match self {
            GroupValue::Rank1(a) => vec![a.clone()],
            GroupValue::Rank2(a, b) => vec![a.clone(), b.clone()],
            GroupValue::Infinity => Vec::new(),
        }
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            GroupValue::Rank1(_) => Some(1),
            GroupValue::Rank2(..) => Some(2),
            GroupValue::Infinity => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, GroupValue::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero()) && self.is_finite()
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (GroupValue::Infinity, _) | (_, GroupValue::Infinity) => GroupValue::Infinity,
            (GroupValue::Rank1(a), GroupValue::Rank1(b)) => GroupValue::Rank1(a + b),
            (GroupValue::Rank2(a, b), GroupValue::Rank2(c, d)) => GroupValue::Rank2(a + c, b + d),
            _ => panic!("adding values of different rank"),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            GroupValue::Rank1(a) => GroupValue::Rank1(-a),
            GroupValue::Rank2(a, b) => GroupValue::Rank2(-a, -b),
            GroupValue::Infinity => panic!("negating infinity"),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        match self {
            GroupValue::Rank1(a) => GroupValue::Rank1(a * k),
            GroupValue::Rank2(a, b) => GroupValue::Rank2(a * k, b * k),
            GroupValue::Infinity => {
                if k.is_zero() {
                    panic!("zero times infinity")
                }
                GroupValue::Infinity
            }
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        if n == 0 && !self.is_finite() {
            return GroupValue::Infinity;
        }
        self.scale(&int(n))
    }

    /// Exact division by a positive integer.
    pub fn div_int(&self, n: i64) -> Self {
        assert!(n > 0);
        self.scale(&rat(1, n))
    }

    /// Least common multiple of the coordinate denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.components()
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    fn check_rank(&self, o: &Self) -> Result<()> {
        match (self.rank(), o.rank()) {
            (Some(a), Some(b)) if a != b => Err(Error::MixedRank),
            _ => Ok(()),
        }
    }

    pub fn try_cmp(&self, o: &Self) -> Result<Ordering> {
        self.check_rank(o)?;
        Ok(self.cmp(o))
    }
}

impl PartialOrd for GroupValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use GroupValue::*;
        match (self, other) {
            (Infinity, Infinity) => Ordering::Equal,
            (Infinity, _) => Ordering::Greater,
            (_, Infinity) => Ordering::Less,
            (Rank1(a), Rank1(b)) => a.cmp(b),
            (Rank2(a, b), Rank2(c, d)) => a.cmp(c).then_with(|| b.cmp(d)),
            (Rank1(_), Rank2(..)) => Ordering::Less,
            (Rank2(..), Rank1(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for GroupValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupValue::Rank1(a) => write!(f, "{a}"),
            GroupValue::Rank2(a, b) => write!(f, "({a}, {b})"),
            GroupValue::Infinity => write!(f, "inf"),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim().replace('\u{2212}', "-");
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(&s).map_err(|_| bad())?,
        )),
    }
}

impl FromStr for GroupValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "inf" || t == "\u{221e}" {
            return Ok(GroupValue::Infinity);
        }
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad pair {t:?}")))?;
            return Ok(GroupValue::Rank2(parse_rational(a)?, parse_rational(b)?));
        }
        Ok(GroupValue::Rank1(parse_rational(t)?))
    }
}

/// A cut of `Gamma`, restricted to the six shapes that arise from finite sets,
/// unbounded families and families unbounded in the second coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cut {
    MinusInfinity,
    /// Lower set `{x <= g}`.
    PrincipalPlus(GroupValue),
    /// Lower set `{x < g}`.
    PrincipalMinus(GroupValue),
    /// Rank 2 only: lower set `{(x, y) : x <= a}`.
    LevelPlus(BigRational),
    /// Rank 2 only: lower set `{(x, y) : x < a}`.
    LevelMinus(BigRational),
    PlusInfinityMinus,
}

/// Second-coordinate position used to order cuts inside one first coordinate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Inner {
    Bottom,
    At(BigRational, i8),
    Top,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Position {
    Bottom,
    At(BigRational, Inner),
    Top,
}

impl Cut {
    pub fn rank(&self) -> Option<usize> {
        match self {
            Cut::PrincipalPlus(g) | Cut::PrincipalMinus(g) => g.rank(),
            Cut::LevelPlus(_) | Cut::LevelMinus(_) => Some(2),
            _ => None,
        }
    }

    pub fn is_proper(&self) -> bool {
        !matches!(self, Cut::MinusInfinity | Cut::PlusInfinityMinus)
    }

    /// Membership of a finite value in the lower set.
    pub fn lower_contains(&self, x: &GroupValue) -> bool {
        match self {
            Cut::MinusInfinity => false,
            Cut::PlusInfinityMinus => x.is_finite(),
            Cut::PrincipalPlus(g) => x <= g,
            Cut::PrincipalMinus(g) => x < g,
            Cut::LevelPlus(a) => matches!(x, GroupValue::Rank2(u, _) if u <= a),
            Cut::LevelMinus(a) => matches!(x, GroupValue::Rank2(u, _) if u < a),
        }
    }

    fn position(&self) -> Position {
        match self {
            Cut::MinusInfinity => Position::Bottom,
            Cut::PlusInfinityMinus => Position::Top,
            Cut::PrincipalPlus(g) | Cut::PrincipalMinus(g) => {
                let sign = if matches!(self, Cut::PrincipalPlus(_)) { 1 } else { -1 };
                match g {
                    GroupValue::Rank1(a) => Position::At(a.clone(), Inner::At(BigRational::zero(), sign)),
                    GroupValue::Rank2(a, b) => Position::At(a.clone(), Inner::At(b.clone(), sign)),
                    GroupValue::Infinity => Position::Top,
                }
            }
            Cut::LevelPlus(a) => Position::At(a.clone(), Inner::Top),
            Cut::LevelMinus(a) => Position::At(a.clone(), Inner::Bottom),
        }
    }

    fn check_rank(&self, o: &Self) -> Result<()> {
        match (self.rank(), o.rank()) {
            (Some(a), Some(b)) if a != b => Err(Error::MixedRank),
            _ => Ok(()),
        }
    }

    /// Orders cuts by inclusion of their lower sets.
    pub fn compare(&self, o: &Self) -> Result<Ordering> {
        self.check_rank(o)?;
        Ok(self.position().cmp(&o.position()))
    }

    /// Sum of cuts: the cut whose lower set is the sum of the lower sets.
    pub fn add(&self, o: &Self) -> Result<Cut> {
        use Cut::*;
        self.check_rank(o)?;
        Ok(match (self, o) {
            (MinusInfinity, _) | (_, MinusInfinity) => MinusInfinity,
            (PlusInfinityMinus, _) | (_, PlusInfinityMinus) => PlusInfinityMinus,
            (PrincipalPlus(a), PrincipalPlus(b)) => PrincipalPlus(a.add(b)),
            (PrincipalPlus(a) | PrincipalMinus(a), PrincipalPlus(b) | PrincipalMinus(b)) => {
                PrincipalMinus(a.add(b))
            }
            (LevelPlus(a), LevelPlus(b)) => LevelPlus(a + b),
            (LevelPlus(a) | LevelMinus(a), LevelPlus(b) | LevelMinus(b)) => LevelMinus(a + b),
            (LevelPlus(a), PrincipalPlus(g) | PrincipalMinus(g))
            | (PrincipalPlus(g) | PrincipalMinus(g), LevelPlus(a)) => LevelPlus(a + first(g)),
            (LevelMinus(a), PrincipalPlus(g) | PrincipalMinus(g))
            | (PrincipalPlus(g) | PrincipalMinus(g), LevelMinus(a)) => LevelMinus(a + first(g)),
        })
    }

    /// Shift by a finite value, `g + delta`.
    pub fn shift(&self, g: &GroupValue) -> Result<Cut> {
        Cut::PrincipalPlus(g.clone()).add(self)
    }
}

fn first(g: &GroupValue) -> BigRational {
    g.components()[0].clone()
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cut::MinusInfinity => write!(f, "-inf"),
            Cut::PlusInfinityMinus => write!(f, "inf^-"),
            Cut::PrincipalPlus(g) => write!(f, "{g}^+"),
            Cut::PrincipalMinus(g) => write!(f, "{g}^-"),
            Cut::LevelPlus(a) => write!(f, "lvl({a})^+"),
            Cut::LevelMinus(a) => write!(f, "lvl({a})^-"),
        }
    }
}

impl FromStr for Cut {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace('\u{2212}', "-");
        if t == "-inf" {
            return Ok(Cut::MinusInfinity);
        }
        if t == "inf^-" {
            return Ok(Cut::PlusInfinityMinus);
        }
        let (body, plus) = if let Some(b) = t.strip_suffix("^+") {
            (b, true)
        } else if let Some(b) = t.strip_suffix("^-") {
            (b, false)
        } else {
            return Err(Error::Parse(format!("bad cut {t:?}")));
        };
        if let Some(a) = body.strip_prefix("lvl(").and_then(|r| r.strip_suffix(')')) {
            let a = parse_rational(a)?;
            return Ok(if plus { Cut::LevelPlus(a) } else { Cut::LevelMinus(a) });
        }
        let g: GroupValue = body.parse()?;
        if !g.is_finite() {
            return Err(Error::Parse(format!("bad cut {t:?}")));
        }
        Ok(if plus { Cut::PrincipalPlus(g) } else { Cut::PrincipalMinus(g) })
    }
}

/// Where a family of distances escapes to, if it is infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unbounded {
    /// Cofinal in `Gamma`.
    Full,
    /// Rank 2: first coordinate fixed at `a`, second coordinate unbounded.
    AtLevel(BigRational),
}

/// A set of distances: finitely many sampled values plus an optional marker
/// describing an unbounded tail.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistanceSet {
    pub finite_values: Vec<GroupValue>,
    pub unbounded: Option<Unbounded>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutMode {
    Plus,
    Minus,
}

impl DistanceSet {
    pub fn finite(values: Vec<GroupValue>) -> Self {
        DistanceSet { finite_values: values, unbounded: None }
    }

    fn rank(&self) -> Result<Option<usize>> {
        let mut rank = match &self.unbounded {
            Some(Unbounded::AtLevel(_)) => Some(2),
            _ => None,
        };
        for v in &self.finite_values {
            if let Some(r) = v.rank() {
                if rank.is_some_and(|q| q != r) {
                    return Err(Error::MixedRank);
                }
                rank = Some(r);
            }
        }
        Ok(rank)
    }

    /// The cut `D^+` (lower set: values below some element of `D`) or `D^-`
    /// (lower set: values below every element of `D`).
    pub fn cut(&self, mode: CutMode) -> Result<Cut> {
        if self.finite_values.is_empty() && self.unbounded.is_none() {
            return Err(Error::InvalidInput("empty distance set".to_string()));
        }
        let rank = self.rank()?;
        if let (Some(Unbounded::AtLevel(_)), Some(1)) = (&self.unbounded, rank) {
            return Err(Error::UnrepresentableCut(
                "level marker in a rank-1 group".to_string(),
            ));
        }
        let max = self.finite_values.iter().max();
        let min = self.finite_values.iter().min();
        match mode {
            CutMode::Plus => {
                if max == Some(&GroupValue::Infinity) {
                    return Ok(Cut::PlusInfinityMinus);
                }
                match &self.unbounded {
                    Some(Unbounded::Full) => Ok(Cut::PlusInfinityMinus),
                    Some(Unbounded::AtLevel(a)) => match max {
                        Some(m) if &m.components()[0] > a => Ok(Cut::PrincipalPlus(m.clone())),
                        _ => Ok(Cut::LevelPlus(a.clone())),
                    },
                    None => Ok(Cut::PrincipalPlus(max.unwrap().clone())),
                }
            }
            CutMode::Minus => match min {
                Some(GroupValue::Infinity) if self.unbounded.is_none() => Ok(Cut::PlusInfinityMinus),
                Some(m) if m.is_finite() => Ok(Cut::PrincipalMinus(m.clone())),
                _ => Err(Error::UnrepresentableCut(
                    "infimum of an unsampled family".to_string(),
                )),
            },
        }
    }
}

pub fn cut_from_set(d: &DistanceSet, mode: CutMode) -> Result<Cut> {
    d.cut(mode)
}

/// True when a rational is an integer.
pub fn is_integral(q: &BigRational) -> bool {
    q.is_integer()
}

/// Absolute value helper used by lattice code.
pub fn abs_int(n: &BigInt) -> BigInt {
    n.abs()
}
