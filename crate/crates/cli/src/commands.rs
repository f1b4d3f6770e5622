//! One function per subcommand, generic over the backend.

use std::collections::BTreeMap;

use mlvdepth_core::basefield::padic::ord_p;
use mlvdepth_core::error::Error;
use mlvdepth_core::expr::parse_poly;
use mlvdepth_core::field::ValuedField;
use mlvdepth_core::indval::NewtonPolygon;
use mlvdepth_core::mlv::{
    compute_mlv_chain, depth_one_certificate, factor_certificate, record, search_box, search_candidate, Bounds, MlvChain,
    Policy, SearchEntry, SearchReport, StepKind,
};
use mlvdepth_core::okutsu::{
    distance_cut, okutsu_depth_and_kinds, verify_okutsu_sequence, ChainOracle, Challenger, Family, OkutsuReport,
    OkutsuSequence, ThetaOracle,
};
use mlvdepth_core::ordgroup::{parse_rational, GroupValue, Unbounded};
use mlvdepth_core::poly::{self, Poly};
use mlvdepth_core::residual::KeyCertificate;
use mlvdepth_core::series::{series_sqrt, SeriesOracle};
use serde_json::{json, Value};

use crate::fieldspec::{parse_field, parse_valuation, AnyField};
use crate::fixtures::{self, Fixture};
use crate::{with_field, Command, Failure, Outcome, Request};

type Out = Result<Outcome, Failure>;

pub fn dispatch(command: Command, req: &Request) -> Out {
    if command == Command::SeriesValue {
        return series_value(req);
    }
    let spec = req.opts.field.as_deref().ok_or_else(|| Failure::input("missing --field"))?;
    let field = parse_field(spec)?;
    if command == Command::OkutsuVerify {
        if let AnyField::Rank2(_) = field {
            return okutsu_series(req);
        }
    }
    with_field!(&field, k => run_in(k, command, req))
}

fn run_in<K>(k: &K, command: Command, req: &Request) -> Out
where
    K: ValuedField + Sync,
    K::Elem: Send + Sync,
{
    let mut out = match command {
        Command::Eval => eval(k, req),
        Command::Residual => residual(k, req),
        Command::IsKey => is_key(k, req),
        Command::Chain => chain(k, req),
        Command::Branches => branches(k, req),
        Command::Depth => depth(k, req),
        Command::CertDepthOne => cert_depth_one(k, req),
        Command::SearchGenerators => search(k, req),
        Command::OkutsuVerify => okutsu_chain(k, req),
        Command::SeriesValue => unreachable!(),
    }?;
    if let Value::Object(m) = &mut out.result {
        let d = k.descriptor();
        m.insert("field".into(), json!({ "kind": d.kind, "p": d.p, "vars": d.vars }));
    }
    Ok(out)
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, Failure> {
    v.as_deref().ok_or_else(|| Failure::input(format!("missing --{flag}")))
}

fn bounds(req: &Request) -> Bounds {
    Bounds {
        max_refinements: req.opts.max_refinements,
        policy: if req.opts.reject_branching { Policy::Reject } else { Policy::FollowFirst },
    }
}

fn render<K: ValuedField>(k: &K, p: &[K::Elem]) -> String {
    poly::render(k, p, "x")
}

fn polygon_json(np: &NewtonPolygon) -> Value {
    json!({
        "points": np.points.iter().map(|(i, v)| json!([i, v.to_string()])).collect::<Vec<_>>(),
        "slopes": np.sides.iter().map(|s| json!({"from": s.start, "to": s.end, "slope": s.slope.to_string()})).collect::<Vec<_>>(),
    })
}

pub fn chain_json<K: ValuedField>(c: &MlvChain<K>) -> Value {
    let k = &c.valuation.field;
    let inv = c.invariants();
    json!({
        "depth": c.depth,
        "e": inv.e,
        "f": inv.f,
        "defect_assumed_one": inv.defect_assumed_one,
        "steps": c.steps.iter().map(|s| json!({
            "phi": render(k, &s.phi),
            "gamma": s.gamma.to_string(),
            "kind": s.kind.label(),
            "e": s.e,
            "f": s.f,
        })).collect::<Vec<_>>(),
        "residual_polynomials": c.residual_polynomials(),
        "trace": c.trace.iter().map(|t| json!({
            "level": t.level,
            "key": t.key,
            "gamma": t.gamma.to_string(),
            "residual": t.residual,
            "factored": t.factored,
            "polygon": t.polygon.as_ref().map(polygon_json),
        })).collect::<Vec<_>>(),
        "initial_polygon": polygon_json(&c.initial_polygon),
        // Every augmentation, refinements included, for offline re-checking.
        "augmentations": c.valuation.raw.iter().map(|s| json!([render(k, &s.phi), s.gamma.to_string()])).collect::<Vec<_>>(),
        "recertified": c.recertify().is_ok(),
    })
}

fn eval<K: ValuedField>(k: &K, req: &Request) -> Out {
    let f = parse_poly(k, need(&req.opts.f, "f")?)?;
    let value = match (&req.opts.mu, &req.opts.g) {
        (Some(mu), _) => parse_valuation(k, mu)?.evaluate(&f),
        (None, Some(g)) => {
            let c = compute_mlv_chain(k, &parse_poly(k, g)?, &bounds(req))?;
            c.valuation.evaluate(&poly::rem(k, &f, c.valuation.key()))
        }
        (None, None) => return Err(Failure::input("eval needs --mu or --g")),
    };
    Ok(Outcome::ok(json!({ "value": value.to_string() })))
}

fn residual<K: ValuedField>(k: &K, req: &Request) -> Out {
    let mu = parse_valuation(k, need(&req.opts.mu, "mu")?)?;
    let f = parse_poly(k, need(&req.opts.f, "f")?)?;
    let r = mu.residual_polynomial(&f)?;
    Ok(Outcome::ok(json!({
        "residual": mu.render_residual(&r.coeffs),
        "support": r.support,
        "l0": r.l0,
        "l": r.l,
        "d": r.d,
        "e": r.e,
        "value": mu.evaluate(&f).to_string(),
    })))
}

fn is_key<K: ValuedField>(k: &K, req: &Request) -> Out {
    let mu = parse_valuation(k, need(&req.opts.mu, "mu")?)?;
    let phi = parse_poly(k, need(&req.opts.phi, "phi")?)?;
    let res = match mu.is_key_polynomial(&phi)? {
        Some(KeyCertificate::SameDegree) => json!({ "key": true, "certificate": "same-degree" }),
        Some(KeyCertificate::Irreducible(r)) => json!({
            "key": true,
            "certificate": "irreducible-residual",
            "residual": mu.render_residual(&r.coeffs),
        }),
        None => json!({ "key": false }),
    };
    Ok(Outcome::ok(res))
}

fn chain<K: ValuedField>(k: &K, req: &Request) -> Out {
    let g = parse_poly(k, need(&req.opts.g, "g")?)?;
    let c = compute_mlv_chain(k, &g, &bounds(req))?;
    Ok(Outcome::ok(chain_json(&c)))
}

fn branches<K: ValuedField>(k: &K, req: &Request) -> Out {
    let g = parse_poly(k, need(&req.opts.g, "g")?)?;
    let bs = factor_certificate(k, &g, &bounds(req))?;
    let unresolved = bs.iter().filter(|b| !b.resolved).count();
    let result = json!({
        "branches": bs.iter().map(|b| json!({
            "prefix": b.prefix.iter().map(|(p, v)| json!([render(k, p), v.to_string()])).collect::<Vec<_>>(),
            "factor": b.factor,
            "e": b.e,
            "f": b.f,
            "resolved": b.resolved,
            "note": b.note,
        })).collect::<Vec<_>>(),
        "count": bs.len(),
        "unibranched": bs.len() == 1 && unresolved == 0,
        "ef_sum": bs.iter().filter(|b| b.resolved).map(|b| b.e as usize * b.f).sum::<usize>(),
    });
    let failure = (unresolved > 0).then(|| {
        Failure::check("Unresolved", format!("{unresolved} branch(es) hit the refinement bound"))
    });
    Ok(Outcome { result, failure })
}

fn depth<K: ValuedField>(k: &K, req: &Request) -> Out {
    let g = parse_poly(k, need(&req.opts.g, "g")?)?;
    let c = compute_mlv_chain(k, &g, &bounds(req))?;
    let inv = c.invariants();
    Ok(Outcome::ok(json!({ "depth": c.depth, "e": inv.e, "f": inv.f, "defect_assumed_one": inv.defect_assumed_one })))
}

fn cert_depth_one<K: ValuedField>(k: &K, req: &Request) -> Out {
    let g = parse_poly(k, need(&req.opts.g, "g")?)?;
    let alpha = parse_poly(k, need(&req.opts.alpha, "alpha")?)?;
    let c = compute_mlv_chain(k, &g, &bounds(req))?;
    let r = depth_one_certificate(&c, &alpha)?;
    let result = json!({
        "holds": r.holds(),
        "value": r.value.to_string(),
        "e": r.e,
        "u_value": r.u_value.to_string(),
        "residue": r.residue,
        "residue_degree": r.residue_degree,
        "expected_e": r.expected_e,
        "expected_f": r.expected_f,
        "chain_depth": c.depth,
    });
    Ok(Outcome { result, failure: r.failure.map(Failure::from) })
}

/// The sequential search of the core, spread over `threads` workers. Batches
/// are merged in box order, so the report does not depend on `threads`.
pub fn parallel_search<K>(
    k: &K,
    g: &[K::Elem],
    radius: i64,
    budget: Option<usize>,
    bounds: &Bounds,
    threads: usize,
) -> Result<SearchReport<K::Elem>, Error>
where
    K: ValuedField + Sync,
    K::Elem: Send + Sync,
{
    if threads <= 1 || poly::deg(g) <= 1 {
        return mlvdepth_core::mlv::generator_search(k, g, radius, budget, bounds);
    }
    if !poly::is_monic(k, g) {
        return Err(Error::NonMonic);
    }
    let cands: Vec<Vec<i64>> = search_box(poly::deg(g), radius).into_iter().filter(|cs| cs.iter().skip(1).any(|c| *c != 0)).collect();
    let mut report = SearchReport { min_depth: None, witness: None, table: Vec::new(), examined: 0, budget_exhausted: false };
    let batch = threads * 16;
    let mut pos = 0;
    while pos < cands.len() {
        let end = (pos + batch).min(cands.len());
        let slice = &cands[pos..end];
        let chunk = slice.len().div_ceil(threads);
        let results: Vec<Option<SearchEntry<K::Elem>>> = std::thread::scope(|s| {
            let handles: Vec<_> = slice
                .chunks(chunk)
                .map(|part| s.spawn(move || part.iter().map(|cs| search_candidate(k, g, cs, bounds)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("search worker panicked")).collect()
        });
        for entry in results.into_iter().flatten() {
            if budget.map_or(false, |b| report.examined >= b) {
                report.budget_exhausted = true;
                return Ok(report);
            }
            record(&mut report, entry);
        }
        pos = end;
    }
    Ok(report)
}

fn search<K>(k: &K, req: &Request) -> Out
where
    K: ValuedField + Sync,
    K::Elem: Send + Sync,
{
    let g = parse_poly(k, need(&req.opts.g, "g")?)?;
    let radius = req.opts.radius.unwrap_or(1);
    if !(0..=4).contains(&radius) {
        return Err(Failure::input("--radius must lie in 0..=4"));
    }
    let rep = parallel_search(k, &g, radius, req.opts.budget, &bounds(req), req.opts.parallel)?;
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    for e in &rep.table {
        let key = match &e.depth {
            Ok(d) => d.to_string(),
            Err(err) => Failure::from(err.clone()).kind,
        };
        *histogram.entry(key).or_default() += 1;
    }
    let witness_entry = rep.witness.as_ref().and_then(|w| rep.table.iter().find(|e| poly::equal(k, &e.element, w)));
    let result = json!({
        "min_depth": rep.min_depth,
        "witness": rep.witness.as_ref().map(|w| render(k, w)),
        "witness_minimal_polynomial": witness_entry.map(|e| render(k, &e.minimal_polynomial)),
        "examined": rep.examined,
        "budget_exhausted": rep.budget_exhausted,
        "radius": radius,
        "histogram": histogram,
        "table": rep.table.iter().map(|e| json!([
            render(k, &e.element),
            match &e.depth { Ok(d) => json!(d), Err(err) => json!(Failure::from(err.clone()).kind) },
        ])).collect::<Vec<_>>(),
        "scope": "minimum over the box; an upper bound for the depth of the extension",
    });
    Ok(Outcome::ok(result))
}

fn unbounded(s: &Option<String>) -> Result<Option<Unbounded>, Failure> {
    match s.as_deref() {
        None => Ok(None),
        Some("full") => Ok(Some(Unbounded::Full)),
        Some(x) => match x.strip_prefix("level:") {
            Some(a) => Ok(Some(Unbounded::AtLevel(parse_rational(a)?))),
            None => Err(Failure::input(format!("bad unbounded marker {x:?}"))),
        },
    }
}

fn sequence_from_file<E>(
    req: &Request,
    parse: impl Fn(&str) -> Result<E, Error>,
) -> Result<(OkutsuSequence<E>, Vec<Challenger<E>>), Failure> {
    let fams = req.families.as_ref().ok_or_else(|| Failure::input("okutsu-verify needs families in the problem file"))?;
    let mut families = Vec::new();
    for f in fams {
        let members = f.members.iter().map(|(l, e)| Ok((l.clone(), parse(e)?))).collect::<Result<Vec<_>, Error>>()?;
        families.push(Family { degree: f.degree, members, unbounded: unbounded(&f.unbounded)?, max_exists: f.max_exists });
    }
    let challengers = req
        .challengers
        .iter()
        .flatten()
        .map(|c| Ok(Challenger { label: c.label.clone(), elem: parse(&c.elem)?, degree: c.degree }))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((OkutsuSequence { families }, challengers))
}

fn okutsu_json<O: ThetaOracle>(o: &O, seq: &OkutsuSequence<O::Elem>, rep: &OkutsuReport) -> Result<Value, Failure> {
    let (r, kinds) = okutsu_depth_and_kinds(seq);
    let cuts = seq.families.iter().map(|f| Ok(distance_cut(o, f)?.to_string())).collect::<Result<Vec<_>, Error>>()?;
    Ok(json!({
        "passed": rep.passed(),
        "depth": r,
        "kinds": kinds.iter().map(|k| k.label()).collect::<Vec<_>>(),
        "cuts": cuts,
        "degrees": seq.families.iter().map(|f| f.degree).collect::<Vec<_>>(),
        "checks": rep.checks.iter().map(|c| json!({"rule": c.rule, "ok": c.ok, "detail": c.detail})).collect::<Vec<_>>(),
        "distances": rep.distances.iter().map(|ds| ds.iter().map(|(l, v)| json!([l, v.to_string()])).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "scope": rep.scope,
    }))
}

fn okutsu_failure(rep: &OkutsuReport) -> Option<Failure> {
    (!rep.passed()).then(|| {
        let bad: Vec<&str> = rep.checks.iter().filter(|c| !c.ok).map(|c| c.rule).collect();
        Failure::check("OkutsuRejected", format!("failed rules: {}", bad.join(", ")))
    })
}

fn okutsu_chain<K: ValuedField>(k: &K, req: &Request) -> Out {
    let g = parse_poly(k, need(&req.opts.g, "g")?)?;
    let chain = compute_mlv_chain(k, &g, &bounds(req))?;
    let (seq, ch) = match (req.opts.fixture, &req.families) {
        (_, Some(_)) => sequence_from_file(req, |s| parse_poly(k, s).map(|p| poly::rem(k, &p, &g)))?,
        (Some(Fixture::Sec34), None) => {
            let q = mlvdepth_core::basefield::PadicRationals::new(2);
            let (seq, ch) = fixtures::sec34_sequence(&q)?;
            // Same arithmetic, re-read through this backend's parser.
            let conv = |p: &Poly<_>| parse_poly(k, &poly::render(&q, p, "x"));
            let families = seq
                .families
                .iter()
                .map(|f| {
                    let members = f.members.iter().map(|(l, e)| Ok((l.clone(), conv(e)?))).collect::<Result<Vec<_>, Error>>()?;
                    Ok(Family { degree: f.degree, members, unbounded: f.unbounded.clone(), max_exists: f.max_exists })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let ch = ch
                .iter()
                .map(|c| Ok(Challenger { label: c.label.clone(), elem: conv(&c.elem)?, degree: c.degree }))
                .collect::<Result<Vec<_>, Error>>()?;
            (OkutsuSequence { families }, ch)
        }
        _ => return Err(Failure::input("okutsu-verify needs families in the problem file or a fixture")),
    };
    let oracle = ChainOracle { chain: chain.clone() };
    let rep = verify_okutsu_sequence(&oracle, &seq, &ch)?;
    let mut result = okutsu_json(&oracle, &seq, &rep)?;
    let (r, kinds) = okutsu_depth_and_kinds(&seq);
    let chain_kinds: Vec<StepKind> = chain.steps[..chain.depth].iter().map(|s| s.kind).collect();
    result["chain"] = json!({
        "depth": chain.depth,
        "kinds": chain_kinds.iter().map(|k| k.label()).collect::<Vec<_>>(),
        "agrees": r == chain.depth && kinds == chain_kinds,
    });
    Ok(Outcome { failure: okutsu_failure(&rep), result })
}

fn series_oracle(req: &Request) -> Result<SeriesOracle, Failure> {
    let p = match (req.opts.p, req.opts.field.as_deref()) {
        (Some(p), _) => p,
        (None, Some(spec)) => match parse_field(spec)? {
            AnyField::Rank2(k) => k.p,
            _ => return Err(Failure::input("the series model lives over qt:P")),
        },
        (None, None) => fixtures::SEC4_PRIME,
    };
    Ok(SeriesOracle::new(p, req.opts.t_precision, req.opts.p_precision)?)
}

fn okutsu_series(req: &Request) -> Out {
    let o = series_oracle(req)?;
    let (seq, ch) = match (&req.families, req.opts.fixture) {
        (Some(_), _) => sequence_from_file(req, |s| o.field.parse(s))?,
        (None, Some(Fixture::Sec4)) => fixtures::sec4_sequence(&o, 4)?,
        _ => return Err(Failure::input("okutsu-verify needs families in the problem file or a fixture")),
    };
    let rep = verify_okutsu_sequence(&o, &seq, &ch)?;
    let result = okutsu_json(&o, &seq, &rep)?;
    Ok(Outcome { failure: okutsu_failure(&rep), result })
}

/// The distance table of the rank-two example at one precision.
fn sec4_table(o: &SeriesOracle, n: usize) -> Result<Vec<(String, GroupValue, GroupValue)>, Failure> {
    let mut rows = Vec::new();
    for (label, b, next) in o.digit_family(n)? {
        rows.push((label, o.distance(&b)?, GroupValue::r2(0, next as i64)));
    }
    rows.push(("i + 1".into(), o.distance(&o.field.parse("i + 1")?)?, GroupValue::r2(1, 0)));
    let js = series_sqrt(n + 1);
    for (m, (label, b)) in o.alpha_family(n).into_iter().enumerate() {
        let m = m + 1;
        rows.push((label, o.distance(&b)?, GroupValue::r2(m as i64, ord_p(&js[m], o.p))));
    }
    Ok(rows)
}

fn series_value(req: &Request) -> Out {
    let o = series_oracle(req)?;
    if req.opts.fixture == Some(Fixture::Sec4) && req.opts.eta.is_none() && req.opts.b.is_none() {
        let n = 4;
        let rows = sec4_table(&o, n)?;
        let wide = SeriesOracle::new(o.p, 2 * o.t_precision, 2 * o.p_precision)?;
        let again = sec4_table(&wide, n)?;
        let stable = rows.iter().zip(&again).all(|(a, b)| a.0 == b.0 && a.1 == b.1);
        let matches = rows.iter().all(|(_, got, want)| got == want);
        let digits = mlvdepth_core::series::digits(&o.i_approx, o.p, o.p_precision);
        let result = json!({
            "p": o.p,
            "i_digits": digits,
            "rows": rows.iter().map(|(l, got, want)| json!({
                "b": l,
                "distance": got.to_string(),
                "expected": want.to_string(),
                "ok": got == want,
            })).collect::<Vec<_>>(),
            "matches": matches,
            "stable_under_doubled_precision": stable,
        });
        let failure = (!matches || !stable).then(|| Failure::check("TableMismatch", "series table differs from the expected values"));
        return Ok(Outcome { result, failure });
    }
    let mut result = json!({ "p": o.p });
    if let Some(eta) = &req.opts.eta {
        let x = o.field.parse(eta)?;
        let s = o.series(&x);
        result["value"] = o.value(&x)?.to_string().into();
        result["series"] = s.terms.iter().take(8).map(|(m, a, b)| json!([m, a.to_string(), b.to_string()])).collect::<Vec<_>>().into();
    }
    if let Some(b) = &req.opts.b {
        result["distance"] = o.distance(&o.field.parse(b)?)?.to_string().into();
    }
    if result.get("value").is_none() && result.get("distance").is_none() {
        return Err(Failure::input("series-value needs --eta, --b or --fixture sec4"));
    }
    Ok(Outcome::ok(result))
}
