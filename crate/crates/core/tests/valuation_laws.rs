use mlvdepth_core::basefield::{FunctionField, PadicRationals, RationalFunctionsRank2};
use mlvdepth_core::expr::parse_poly;
use mlvdepth_core::field::{Field, ValuedField};
use mlvdepth_core::indval::InductiveValuation;
use mlvdepth_core::ordgroup::{rat, GroupValue};
use mlvdepth_core::poly::{self, Poly};
use proptest::prelude::*;
use std::sync::OnceLock;

fn two_adic_depth_two() -> InductiveValuation<PadicRationals> {
    let k = PadicRationals::new(2);
    InductiveValuation::depth_zero(&k, &rat(0, 1), GroupValue::r1(1, 3))
        .augment(&parse_poly(&k, "x^3 + 2").unwrap(), GroupValue::r1(2, 1))
        .unwrap()
}

fn char_two_depth_two() -> InductiveValuation<FunctionField> {
    let k = FunctionField::new(2, &["q", "r", "s"]);
    InductiveValuation::gauss(&k)
        .augment(&parse_poly(&k, "x^2 - q").unwrap(), GroupValue::r1(1, 1))
        .unwrap()
        .augment(&parse_poly(&k, "(x^2 - q)^2 - t^2*r").unwrap(), GroupValue::r1(4, 1))
        .unwrap()
}

fn rank_two_depth_one() -> InductiveValuation<RationalFunctionsRank2> {
    let k = RationalFunctionsRank2::new(5);
    InductiveValuation::depth_zero(&k, &k.zero(), GroupValue::r2(0, 1).div_int(2))
        .augment(&parse_poly(&k, "x^2 - 5").unwrap(), GroupValue::r2(1, 0))
        .unwrap()
}

fn from_ints<K: Field>(k: &K, gens: &[K::Elem], cs: &[i64]) -> Poly<K::Elem> {
    // Coefficient n is cs[n] times a generator of the base field cycled by n.
    let v = cs
        .iter()
        .enumerate()
        .map(|(n, c)| k.mul(&k.from_int(*c), &gens[n % gens.len()]))
        .collect();
    poly::trim(k, v)
}

fn laws<K: ValuedField>(mu: &InductiveValuation<K>, gens: &[K::Elem], a: &[i64], b: &[i64]) -> Result<(), TestCaseError> {
    let k = &mu.field;
    let (f, g) = (from_ints(k, gens, a), from_ints(k, gens, b));
    let (vf, vg) = (mu.evaluate(&f), mu.evaluate(&g));
    prop_assert_eq!(mu.evaluate(&poly::mul(k, &f, &g)), vf.add(&vg));
    let vs = mu.evaluate(&poly::add(k, &f, &g));
    prop_assert!(vs >= vf.clone().min(vg.clone()));
    if vf != vg {
        prop_assert_eq!(vs, vf.min(vg));
    }
    Ok(())
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-12i64..13, 0..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn two_adic_laws(a in coeffs(), b in coeffs()) {
        let mu = cached_two_adic_depth_two();
        let gens = [rat(1, 1), rat(2, 1), rat(1, 3), rat(4, 5)];
        laws(&mu, &gens, &a, &b)?;
    }

    #[test]
    fn char_two_laws(a in coeffs(), b in coeffs()) {
        let mu = cached_char_two_depth_two();
        let k = &mu.field;
        let gens: Vec<_> = ["1", "q", "t", "r + t*s", "q/(1 + t)"].iter().map(|s| k.parse_elem(s).unwrap()).collect();
        laws(&mu, &gens, &a, &b)?;
    }

    #[test]
    fn rank_two_laws(a in coeffs(), b in coeffs()) {
        let mu = cached_rank_two_depth_one();
        let k = &mu.field;
        let gens: Vec<_> = ["1", "t", "5", "1/(1 + t)", "t^2/5"].iter().map(|s| k.parse_elem(s).unwrap()).collect();
        laws(&mu, &gens, &a, &b)?;
    }

    #[test]
    fn augmentation_only_raises_values(a in coeffs()) {
        let k = PadicRationals::new(2);
        let mu = InductiveValuation::depth_zero(&k, &rat(0, 1), GroupValue::r1(1, 3));
        let nu = mu.augment(&parse_poly(&k, "x^3 + 2").unwrap(), GroupValue::r1(2, 1)).unwrap();
        let f = from_ints(&k, &[rat(1, 1), rat(2, 1)], &a);
        prop_assume!(!f.is_empty());
        prop_assert!(mu.evaluate(&f) <= nu.evaluate(&f));
        let phi = nu.key();
        let parts = poly::phi_expansion(&k, &f, phi).unwrap();
        let at_zero = nu.evaluate(&parts[0]);
        let rest_higher = parts.iter().enumerate().skip(1).filter(|(_, c)| !c.is_empty())
            .all(|(n, c)| mu.evaluate(c).add(&mu.evaluate(phi).mul_int(n as i64)) > at_zero);
        if !parts[0].is_empty() && rest_higher {
            prop_assert_eq!(mu.evaluate(&f), nu.evaluate(&f));
        }
    }
}

#[test]
fn section_values_are_exact() {
    let mu = cached_char_two_depth_two();
    let k = &mu.field;
    for n in 0..6 {
        let u = mu.element_of_value(&GroupValue::r1(n, 1)).unwrap();
        assert_eq!(mu.evaluate(&u), GroupValue::r1(n, 1));
        assert!(u.len() < mu.key().len());
        assert!(k.equal(&u[0], &k.pow(&k.t(), n)));
    }
    let nu = rank_two_depth_one();
    let g = GroupValue::r2(0, 1).div_int(2);
    assert!(nu.element_of_value(&g).is_ok());
    let u = nu.element_of_value(&g).unwrap();
    assert_eq!(nu.evaluate(&u), g);
}

fn cached_two_adic_depth_two() -> &'static InductiveValuation<PadicRationals> {
    static CELL: OnceLock<InductiveValuation<PadicRationals>> = OnceLock::new();
    CELL.get_or_init(two_adic_depth_two)
}

fn cached_char_two_depth_two() -> &'static InductiveValuation<FunctionField> {
    static CELL: OnceLock<InductiveValuation<FunctionField>> = OnceLock::new();
    CELL.get_or_init(char_two_depth_two)
}

fn cached_rank_two_depth_one() -> &'static InductiveValuation<RationalFunctionsRank2> {
    static CELL: OnceLock<InductiveValuation<RationalFunctionsRank2>> = OnceLock::new();
    CELL.get_or_init(rank_two_depth_one)
}
