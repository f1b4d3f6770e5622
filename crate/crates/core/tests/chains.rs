use mlvdepth_core::basefield::{FunctionField, PadicRationals};
use mlvdepth_core::expr::parse_poly;
use mlvdepth_core::field::{Field, ValuedField};
use mlvdepth_core::mlv::{compute_mlv_chain, factor_certificate, Bounds, MlvChain};
use mlvdepth_core::ordgroup::{rat, GroupValue};
use mlvdepth_core::poly;
use proptest::prelude::*;
use std::sync::OnceLock;

const UNIBRANCHED: [&str; 6] = ["x^6 + 108", "x^3 - 2", "x^2 + x + 1", "x^4 + 2", "x^2 + 1", "x^4 + x + 1"];

fn two_adic_chains() -> &'static Vec<MlvChain<PadicRationals>> {
    static CELL: OnceLock<Vec<MlvChain<PadicRationals>>> = OnceLock::new();
    CELL.get_or_init(|| {
        let k = PadicRationals::new(2);
        UNIBRANCHED
            .iter()
            .map(|s| compute_mlv_chain(&k, &parse_poly(&k, s).unwrap(), &Bounds::default()).unwrap())
            .collect()
    })
}

fn char_two_chain() -> &'static MlvChain<FunctionField> {
    static CELL: OnceLock<MlvChain<FunctionField>> = OnceLock::new();
    CELL.get_or_init(|| {
        let k = FunctionField::new(2, &["q", "r", "s"]);
        let g = parse_poly(&k, "((x^2 - q)^2 - t^2*r)^2 + t^16*x - t^8*s").unwrap();
        compute_mlv_chain(&k, &g, &Bounds::default()).unwrap()
    })
}

#[test]
fn every_chain_recertifies() {
    for c in two_adic_chains() {
        c.recertify().unwrap();
        let inv = c.invariants();
        let n = poly::deg(c.valuation.key());
        assert_eq!(inv.e as usize * inv.f, n, "e f = n for a defectless unibranched input");
        for w in c.steps.windows(2) {
            assert!(w[0].phi.len() < w[1].phi.len());
        }
    }
    char_two_chain().recertify().unwrap();
}

#[test]
fn branch_sums_match_degree() {
    let k = PadicRationals::new(2);
    for s in ["x^6 + 108", "(x - 1)*(x + 1)*(x - 5)", "(x^2 + x + 1)*(x^2 + 2)", "x^3 + x + 1", "(x^2 + 1)*(x^2 + 3)"] {
        let g = parse_poly(&k, s).unwrap();
        let bs = factor_certificate(&k, &g, &Bounds::default()).unwrap();
        assert!(bs.iter().all(|b| b.resolved), "{s}");
        assert_eq!(bs.iter().map(|b| b.e as usize * b.f).sum::<usize>(), poly::deg(&g), "{s}");
    }
}

#[test]
fn depth_ignores_translation_by_integers() {
    // x -> x + 2c moves the centre of the depth-zero valuation but not the depth.
    let k = PadicRationals::new(2);
    for (i, s) in UNIBRANCHED.iter().enumerate() {
        let g = parse_poly(&k, s).unwrap();
        let shifted: Vec<_> = {
            let mut acc = Vec::new();
            let lin = parse_poly(&k, "x + 4").unwrap();
            for c in g.iter().rev() {
                acc = poly::add(&k, &poly::mul(&k, &acc, &lin), &[c.clone()]);
            }
            acc
        };
        let c = compute_mlv_chain(&k, &shifted, &Bounds::default()).unwrap();
        assert_eq!(c.depth, two_adic_chains()[i].depth, "{s}");
    }
}

fn norm_check<K: ValuedField>(c: &MlvChain<K>, f: &[K::Elem]) -> Result<(), TestCaseError> {
    let k = &c.valuation.field;
    let g = c.valuation.key();
    let f = poly::rem(k, f, g);
    if f.is_empty() {
        return Ok(());
    }
    let lhs = c.valuation.evaluate(&f).mul_int(poly::deg(g) as i64);
    let rhs = k.val(&poly::norm_in_quotient(k, g, &f));
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn two_adic_norm_oracle(which in 0usize..6, cs in prop::collection::vec(-40i64..41, 1..6)) {
        let c = &two_adic_chains()[which];
        let k = &c.valuation.field;
        let f: Vec<_> = poly::trim(k, cs.iter().map(|&x| rat(x, 1)).collect());
        norm_check(c, &f)?;
    }

    #[test]
    fn char_two_norm_oracle(cs in prop::collection::vec(0usize..6, 1..8)) {
        let c = char_two_chain();
        let k = &c.valuation.field;
        let gens: Vec<_> = ["1", "q", "t", "r", "t^3*s + q", "0"].iter().map(|s| k.parse_elem(s).unwrap()).collect();
        let f: Vec<_> = poly::trim(k, cs.iter().map(|&j| gens[j].clone()).collect());
        norm_check(c, &f)?;
    }
}

#[test]
fn terminal_values_of_keys() {
    let c = char_two_chain();
    let want = [GroupValue::r1(0, 1), GroupValue::r1(1, 1), GroupValue::r1(4, 1), GroupValue::Infinity];
    for (s, w) in c.steps.iter().zip(want) {
        let v = if w.is_finite() { c.valuation.evaluate(&s.phi) } else { GroupValue::Infinity };
        assert_eq!(v, w);
    }
    assert!(c.valuation.field.is_zero(&c.valuation.field.zero()));
}
