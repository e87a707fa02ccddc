//! One function per subcommand, each returning its JSON report.

use nodal_theta::arcs::{
    arc_contact, make_arc, minimal_arc, minimal_arc_through_z, sample_arcs_check, sample_general_arcs_check,
    Contact, CuspParametrization, GeneralArc, SampleReport, TestArc, ThroughZ,
};
use nodal_theta::curve::{classify_theta_point, cohomology, theta_invariants, ThetaReport};
use nodal_theta::family::{family_cohomology, make_minimal_family, verify_theorem_a, AuxDivisor, SheafFamily};
use nodal_theta::multiplicity::{check_eqnmat, hilbert_samuel, mult_divisor_branchsum, oracle_order, RingSpec};
use nodal_theta::parse::parse_series;
use nodal_theta::powerseries::vars;
use nodal_theta::{Error, LocalModel, QSeries, QTruncSeries, Rational};
use serde_json::{json, Map, Value};

use crate::input::{curve_and_sheaf, parse_arc_images, parse_element, parse_family, parse_model, read_json};
use crate::report::{hs_table, opt, rational, t_series};
use crate::{CliError, Settings};

type Out = Result<Value, CliError>;

fn with_common(mut v: Value, s: &Settings, extra: &[(&str, Value)]) -> Value {
    let map = v.as_object_mut().expect("reports are objects");
    map.insert("seed".into(), json!(s.seed));
    for (k, x) in extra {
        map.insert((*k).into(), x.clone());
    }
    v
}

/// Truncation for parsed elements: enough for arcs of precision `N` and for
/// Hilbert–Samuel tables up to `t_max`.
fn working_truncation(s: &Settings) -> u32 {
    s.n.max(s.tmax)
}

pub fn mult(s: &Settings, model: &str, f: &str, bind: Option<&str>) -> Out {
    let model = parse_model(model)?;
    let t = working_truncation(s);
    let f = parse_element(&model, f, bind, t)?;
    let eq = check_eqnmat(&f)?;
    let bs = mult_divisor_branchsum(&f)?;
    let table = hilbert_samuel(&RingSpec::for_model(model, Some(&f), t)?, s.tmax)?;
    if table.stabilized && table.multiplicity != Some(bs.total) {
        return Err(Error::AssertionFailed(format!(
            "Hilbert–Samuel multiplicity {:?} disagrees with the branch sum {}",
            table.multiplicity, bs.total
        ))
        .into());
    }
    let branches: Vec<Value> =
        bs.per_branch.iter().map(|(b, o)| json!({"branch": b.to_string(), "order": o})).collect();
    Ok(with_common(
        json!({
            "model": model.to_string(),
            "f": f.series().to_string(),
            "ord": eq.ord_d,
            "mult_V": eq.mult_v,
            "mult_D": bs.total,
            "per_branch": bs.per_branch.iter().map(|(_, o)| *o).collect::<Vec<_>>(),
            "branches": branches,
            "hs_table": hs_table(&table),
            "eqnmat": {"holds": eq.holds, "equality": eq.equality},
        }),
        s,
        &[("tmax", json!(s.tmax))],
    ))
}

pub fn ord(s: &Settings, model: &str, f: &str, bind: Option<&str>) -> Out {
    let model = parse_model(model)?;
    let t = working_truncation(s);
    let f = parse_element(&model, f, bind, t)?;
    let orders = f.branch_orders()?;
    let oracle = oracle_order(&RingSpec::for_model(model, None, t)?, f.series(), s.tmax)?;
    let ord = f.series().order();
    if let (Some(a), Some(b)) = (ord, oracle) {
        if a != b && b < s.tmax {
            return Err(Error::AssertionFailed(format!("order {a} disagrees with the oracle order {b}")).into());
        }
    }
    let branches: Vec<Value> =
        orders.entries.iter().map(|(b, o)| json!({"branch": b.to_string(), "order": opt(*o)})).collect();
    Ok(with_common(
        json!({
            "model": model.to_string(),
            "f": f.series().to_string(),
            "ord": opt(ord),
            "oracle_ord": opt(oracle),
            "branch_orders": branches,
            "truncation": t,
        }),
        s,
        &[("tmax", json!(s.tmax))],
    ))
}

fn images_json<I: IntoIterator<Item = (String, QTruncSeries)>>(images: I) -> Value {
    Value::Object(images.into_iter().map(|(k, v)| (k, t_series(&v))).collect::<Map<_, _>>())
}

fn arc_images(model: &LocalModel, arc: &TestArc<Rational>) -> Value {
    images_json(model.var_names().into_iter().zip(arc.images().iter().cloned()))
}

fn contact_json(c: Contact) -> Value {
    match c {
        Contact::Finite(k) => json!(k),
        Contact::InsideDivisor => Value::Null,
    }
}

pub fn arc(s: &Settings, model: &str, f: &str, bind: Option<&str>, arc: Option<&str>, through_z: bool) -> Out {
    let model = parse_model(model)?;
    let t = working_truncation(s);
    let f = parse_element(&model, f, bind, t)?;
    let ord = f.series().order();
    let base = |v: Value| with_common(v, s, &[("N", json!(s.n)), ("ord", opt(ord))]);
    if let Some(arc) = arc {
        let (images, n) = parse_arc_images(&read_json(arc)?, &model, s.n)?;
        let arc = make_arc(model, &images, n)?;
        let contact = arc_contact(&arc, &f)?;
        let mut out = base(json!({
            "contact": contact_json(contact),
            "inside_divisor": contact == Contact::InsideDivisor,
            "pulled_back": t_series(&arc.pull_back(&f)?),
            "through_z": arc.factors_through_z(),
            "images": arc_images(&model, &arc),
        }));
        out["N"] = json!(arc.precision());
        return Ok(out);
    }
    if through_z {
        return Ok(base(match minimal_arc_through_z(&f, s.n, s.seed)? {
            ThroughZ::Found { arc, contact } => {
                json!({"found": true, "contact": contact, "images": arc_images(&model, &arc)})
            }
            ThroughZ::NoneFound { best_contact, ord: _ } => json!({"found": false, "best_contact": opt(best_contact)}),
        }));
    }
    let m = minimal_arc(&f, s.n, s.seed)?;
    Ok(base(json!({
        "contact": m.contact,
        "branch": m.branch.to_string(),
        "attempts": m.attempts,
        "images": arc_images(&model, &m.arc),
    })))
}

fn sample_json(r: &SampleReport) -> Value {
    json!({
        "ord": r.ord,
        "count": r.count,
        "inside": r.inside,
        "min_contact": opt(r.min_contact),
        "violations": r.violations,
        "histogram": r.histogram.iter().map(|(c, k)| json!([c, k])).collect::<Vec<_>>(),
    })
}

fn check_violations(r: &SampleReport) -> Result<(), CliError> {
    if r.violations > 0 {
        return Err(Error::AssertionFailed(format!("{} sampled arcs have contact below ord = {}", r.violations, r.ord)).into());
    }
    Ok(())
}

pub const CUSP_VARS: [&str; 3] = ["x", "y", "z"];
pub const CUSP_RELATION: &str = "y^2 - x^3";
pub const CUSP_DIVISOR: &str = "x - z^3";

pub fn arcs_sample(
    s: &Settings,
    model: Option<&str>,
    f: Option<&str>,
    bind: Option<&str>,
    count: usize,
    cusp: bool,
) -> Out {
    let t = working_truncation(s);
    if cusp {
        let v = vars(&CUSP_VARS);
        let rel: QSeries = parse_series(CUSP_RELATION, &v, t)?;
        let f: QSeries = parse_series(f.unwrap_or(CUSP_DIVISOR), &v, t)?;
        let spec = RingSpec::new(v.clone(), vec![rel], Some(f.clone()))?;
        let ord = oracle_order(&spec, &f, s.tmax)?.ok_or(Error::ZeroSeries { truncation: t })?;
        let report = sample_general_arcs_check(&spec, &f, &CuspParametrization, ord, count, s.n, s.seed)?;
        check_violations(&report)?;
        let n = s.n as usize;
        let witness = vec![
            QTruncSeries::monomial(Rational::from_integer(1.into()), 2, n),
            QTruncSeries::monomial(Rational::from_integer(1.into()), 3, n),
            QTruncSeries::zero(n),
        ];
        let witness_contact = GeneralArc::from_dense(spec, witness.clone())?.contact(&f)?;
        let mut out = sample_json(&report);
        out["witness"] = json!({
            "images": images_json(CUSP_VARS.iter().map(|s| s.to_string()).zip(witness)),
            "contact": contact_json(witness_contact),
        });
        out["f"] = json!(f.to_string());
        out["relation"] = json!(CUSP_RELATION);
        return Ok(with_common(out, s, &[("N", json!(s.n))]));
    }
    let model = parse_model(model.ok_or_else(|| CliError::Input("--model is required without --cusp".into()))?)?;
    let f = parse_element(&model, f.ok_or_else(|| CliError::Input("--f is required".into()))?, bind, t)?;
    let report = sample_arcs_check(&f, count, s.n, s.seed)?;
    check_violations(&report)?;
    let mut out = sample_json(&report);
    out["model"] = json!(model.to_string());
    out["f"] = json!(f.series().to_string());
    Ok(with_common(out, s, &[("N", json!(s.n))]))
}

pub fn hs(s: &Settings, var_list: &str, rels: &[String], f: Option<&str>) -> Out {
    let names: Vec<&str> = var_list.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
    let v = vars(&names);
    let t = working_truncation(s);
    let relations = rels.iter().map(|r| parse_series(r, &v, t)).collect::<Result<Vec<QSeries>, _>>()?;
    let f = f.map(|f| parse_series::<Rational>(f, &v, t)).transpose()?;
    let spec = RingSpec::new(v, relations, f.clone())?;
    let table = hilbert_samuel(&spec, s.tmax)?;
    let mut out = hs_table(&table);
    if let Some(f) = &f {
        let ambient = hilbert_samuel(&spec.ambient(), s.tmax)?;
        out["ambient"] = hs_table(&ambient);
        out["ord"] = opt(oracle_order(&spec, f, s.tmax)?);
    }
    Ok(with_common(out, s, &[("tmax", json!(s.tmax))]))
}

pub fn curve_h0(s: &Settings, curve: &str, sheaf: Option<&str>) -> Out {
    let (curve, sheaf) = curve_and_sheaf(curve, sheaf)?;
    let c = cohomology(&curve, &sheaf)?;
    Ok(with_common(
        json!({
            "genus": curve.genus(),
            "n": sheaf.n(),
            "totalDegree": sheaf.total_degree(),
            "h0": c.h0,
            "h1": c.h1,
        }),
        s,
        &[],
    ))
}

fn theta_json(r: &ThetaReport) -> Value {
    json!({
        "n": r.n,
        "h0": r.h0,
        "h1": r.h1,
        "ord": r.ord,
        "multJ": r.mult_j,
        "multTheta": r.mult_theta,
        "onTheta": r.on_theta,
        "singular": r.singular,
        "exponents": opt(r.exponents.clone()),
    })
}

pub fn theta(s: &Settings, curve: &str, sheaf: Option<&str>) -> Out {
    let (curve, sheaf) = curve_and_sheaf(curve, sheaf)?;
    Ok(with_common(theta_json(&theta_invariants(&curve, &sheaf)?), s, &[]))
}

pub fn classify(s: &Settings, curve: &str, sheaf: Option<&str>) -> Out {
    let (curve, sheaf) = curve_and_sheaf(curve, sheaf)?;
    let c = classify_theta_point(&curve, &sheaf)?;
    Ok(with_common(
        json!({"onTheta": c.on_theta, "inW1": c.in_w1, "inBoundary": c.in_boundary, "singular": c.singular}),
        s,
        &[],
    ))
}

fn family_json(fam: &SheafFamily<Rational>) -> Value {
    json!({
        "glue": fam.gluing().iter().map(|(j, l)| (j.to_string(), t_series(l))).collect::<Map<_, _>>(),
        "moving": fam.moving().iter().map(|m| json!({"point": rational(&m.base), "trajectory": t_series(&m.trajectory)})).collect::<Vec<_>>(),
    })
}

pub fn family(s: &Settings, curve: &str, sheaf: Option<&str>, family: Option<&str>) -> Out {
    let (curve, sheaf) = curve_and_sheaf(curve, sheaf)?;
    let (fam, aux, minimal) = match family {
        Some(doc) => {
            let (fam, aux) = parse_family(&read_json(doc)?, &curve, &sheaf, s.n as usize, s.seed)?;
            (fam, aux, false)
        }
        None => (make_minimal_family(&curve, &sheaf, s.n as usize, s.seed)?, AuxDivisor::Seeded(s.seed), true),
    };
    let fc = family_cohomology(&curve, &fam, &aux)?;
    Ok(with_common(
        json!({
            "h0_rank": fc.h0_rank,
            "exponents": fc.exponents,
            "theta_order": fc.theta_order,
            "aux": fc.aux.iter().map(rational).collect::<Vec<_>>(),
            "minimal": minimal,
            "family": family_json(&fam),
        }),
        s,
        &[("N", json!(fam.precision()))],
    ))
}

pub fn verify_a(s: &Settings, curve: &str, sheaf: Option<&str>, families: usize) -> Out {
    let (curve, sheaf) = curve_and_sheaf(curve, sheaf)?;
    let r = verify_theorem_a(&curve, &sheaf, s.n as usize, s.seed, families)?;
    let mut out = theta_json(&r.theta);
    out["minimal_order"] = json!(r.minimal_order);
    out["random_orders"] = json!(r.random_orders);
    Ok(with_common(out, s, &[("N", json!(s.n))]))
}
