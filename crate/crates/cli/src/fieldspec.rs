//! Field descriptors, value literals and valuation literals.

use mlvdepth_core::basefield::{FunctionField, PadicRationals, RationalFunctionsRank2};
use mlvdepth_core::error::{Error, Result};
use mlvdepth_core::expr::parse_poly;
use mlvdepth_core::field::ValuedField;
use mlvdepth_core::indval::InductiveValuation;
use mlvdepth_core::ordgroup::{parse_rational, GroupValue};
use mlvdepth_core::poly;

/// The backends a problem can name.
///
/// `qp:P` is Q with the P-adic valuation, `fp:P:q,r,s` is F_P(q,r,s)(t)
/// with the t-adic valuation, and `qt:P` is Q(t) with the rank-two
/// valuation `(ord_t, ord_P)`.
#[derive(Clone, Debug)]
pub enum AnyField {
    Padic(PadicRationals),
    Func(FunctionField),
    Rank2(RationalFunctionsRank2),
}

#[macro_export]
macro_rules! with_field {
    ($f:expr, $k:ident => $body:expr) => {
        match $f {
            $crate::fieldspec::AnyField::Padic($k) => $body,
            $crate::fieldspec::AnyField::Func($k) => $body,
            $crate::fieldspec::AnyField::Rank2($k) => $body,
        }
    };
}

fn prime(s: &str) -> Result<u64> {
    let p: u64 = s.trim().parse().map_err(|_| Error::InvalidInput(format!("bad prime {s:?}")))?;
    let composite = p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0);
    if composite {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    Ok(p)
}

pub fn parse_field(spec: &str) -> Result<AnyField> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["qp", p] => Ok(AnyField::Padic(PadicRationals::new(prime(p)?))),
        ["qt", p] => Ok(AnyField::Rank2(RationalFunctionsRank2::new(prime(p)?))),
        ["fp", p] => Ok(AnyField::Func(FunctionField::new(prime(p)?, &[]))),
        ["fp", p, vars] => {
            let vs: Vec<&str> = vars.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
            if vs.iter().any(|v| *v == "t" || *v == "x" || !v.chars().all(|c| c.is_ascii_alphabetic())) {
                return Err(Error::InvalidInput(format!("bad variable list {vars:?}")));
            }
            Ok(AnyField::Func(FunctionField::new(prime(p)?, &vs)))
        }
        _ => Err(Error::InvalidInput(format!("unknown field {spec:?}; expected qp:P, fp:P[:vars] or qt:P"))),
    }
}

/// `inf`, a rational, or a pair `(a, b)` / `a,b` for rank two.
pub fn parse_value(s: &str) -> Result<GroupValue> {
    let s = s.trim();
    if s == "inf" || s == "∞" {
        return Ok(GroupValue::Infinity);
    }
    let inner = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s);
    let cs = inner.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
    Ok(GroupValue::from_components(&cs))
}

/// Steps `phi @ gamma` separated by `;`. The first key must be linear; the
/// rest go through the checked augmentation.
pub fn parse_valuation<K: ValuedField>(k: &K, s: &str) -> Result<InductiveValuation<K>> {
    let mut steps = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (phi, gamma) = part
            .rsplit_once('@')
            .ok_or_else(|| Error::InvalidInput(format!("step {part:?} is not of the form phi @ gamma")))?;
        steps.push((parse_poly(k, phi)?, parse_value(gamma)?));
    }
    let Some(((phi, gamma), rest)) = steps.split_first() else {
        return Err(Error::InvalidInput("empty valuation".into()));
    };
    if poly::deg(phi) != 1 || !poly::is_monic(k, phi) {
        return Err(Error::InvalidInput("first key must be monic of degree one".into()));
    }
    if !gamma.is_finite() || gamma.rank() != Some(k.rank()) {
        return Err(Error::InvalidInput(format!("first value {gamma} does not suit this field")));
    }
    let mut mu = InductiveValuation::depth_zero(k, &k.neg(&phi[0]), gamma.clone());
    for (phi, gamma) in rest {
        mu = mu.augment(phi, gamma.clone())?;
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields() {
        assert!(matches!(parse_field("qp:5"), Ok(AnyField::Padic(_))));
        assert!(matches!(parse_field("fp:2:q,r,s"), Ok(AnyField::Func(f)) if f.vars.len() == 3));
        assert!(matches!(parse_field("qt:5"), Ok(AnyField::Rank2(_))));
        assert!(parse_field("qp:4").is_err());
        assert!(parse_field("fp:2:t").is_err());
        assert!(parse_field("zz:2").is_err());
    }

    #[test]
    fn values() {
        assert_eq!(parse_value("1/3").unwrap(), GroupValue::r1(1, 3));
        assert_eq!(parse_value("(1, 0)").unwrap(), GroupValue::r2(1, 0));
        assert_eq!(parse_value("inf").unwrap(), GroupValue::Infinity);
        assert!(parse_value("x").is_err());
    }

    #[test]
    fn valuations() {
        let k = PadicRationals::new(2);
        let mu = parse_valuation(&k, "x @ 1/3; x^3 + 2 @ 2").unwrap();
        assert_eq!(mu.steps().len(), 2);
        assert!(matches!(parse_valuation(&k, "x @ 1/3; x^3 + 2 @ 1/2"), Err(Error::NonIncreasingValue)));
        assert!(matches!(parse_valuation(&k, "x @ 1/3; x^3 + 4 @ 2"), Err(Error::NotKeyPolynomial(_))));
        assert!(parse_valuation(&k, "x^2 @ 1").is_err());
    }
}
