use std::fmt::Write as _;
use std::fs;

use mahler_lab::curves::{
    bad_primes, component_orders, delta_p, divisors_t1_t2_on_pk, genus2_split, global_minimal_model, parse_curve,
    pk_curve, pk_points, reduction_data, ReductionType,
};
use mahler_lab::lfunctions::{dirichlet_l, dirichlet_lprime_minus1_complex, ell_lprime_0, zeta_prime_minus2, DirichletCharacter};
use mahler_lab::mahler::{mahler_2var, mahler_2var_tracked, mahler_3var};
use mahler_lab::numerics::PrecisionBudget;
use mahler_lab::poly::{is_tempered, newton_polygon, parse_laurent2, parse_laurent3, LaurentPoly2};
use mahler_lab::relations::{discover, parse_basis_spec, DiscoverOptions, DiscoveryReport, RelationStatus};
use mahler_lab::torus::{singular_points, torus_intersections};
use mahler_lab::tracker::track;
use mahler_lab::{Error, Result};
use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::{Cli, Cmd, CurveCmd, Format, LvalueArgs, MethodArg};

pub const SCHEMA_VERSION: &str = "1.0";
const DEFAULT_DIGITS: u32 = 30;
const DEFAULT_DIGITS_3VAR: u32 = 8;

fn json_mode(cli: &Cli) -> bool {
    cli.json || cli.format == Format::Json
}

fn digits(cli: &Cli, default: u32, min: u32) -> Result<PrecisionBudget> {
    let d = cli.digits.unwrap_or(default);
    if d < min || d > 280 {
        return Err(Error::Domain(format!("--digits must be in {min}..=280, got {d}")));
    }
    Ok(PrecisionBudget::from_digits(d))
}

fn poly2(s: &str) -> Result<LaurentPoly2> {
    parse_laurent2(s)
}

fn envelope(command: &str, budget: Option<&PrecisionBudget>, result: Value) -> String {
    let mut v = json!({ "schema_version": SCHEMA_VERSION, "command": command, "result": result });
    if let Some(b) = budget {
        v["digits"] = json!(b.digits());
    }
    serde_json::to_string_pretty(&v).expect("serializable")
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

pub fn run(cli: &Cli) -> Result<String> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Error::Domain("--jobs must be positive".into()));
        }
        // A second initialisation only fails if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    if cli.unity_bound == 0 {
        return Err(Error::Domain("--unity-bound must be positive".into()));
    }
    match &cli.cmd {
        Cmd::Measure { poly, method } => measure(cli, poly, *method),
        Cmd::Track { poly, dump_arcs } => {
            let b = digits(cli, DEFAULT_DIGITS, 10)?;
            let p = poly2(poly)?;
            let d = track(&p, &b)?;
            if let Some(path) = dump_arcs {
                let dump = json!({ "schema_version": SCHEMA_VERSION, "polynomial": p.to_string(), "decomposition": to_value(&d) });
                fs::write(path, serde_json::to_string_pretty(&dump).expect("serializable"))
                    .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?;
            }
            if json_mode(cli) {
                return Ok(envelope("track", Some(&b), to_value(&d)));
            }
            let mut s = String::new();
            let _ = writeln!(s, "pieces: {}", d.subdivision.len().saturating_sub(1));
            let _ = writeln!(s, "arcs: {} ({} inside)", d.arcs.len(), d.inside_arcs.len());
            let _ = writeln!(s, "closed paths: {}", d.closed_paths.len());
            let _ = writeln!(s, "open paths: {}", d.open_paths.len());
            let _ = write!(s, "boundary points: {}", d.boundary_set.len());
            for pt in &d.boundary_set {
                let _ = write!(s, "\n  {}", point_text(pt));
            }
            Ok(s)
        }
        Cmd::Torus { poly } => {
            let b = digits(cli, DEFAULT_DIGITS, 10)?;
            let p = poly2(poly)?;
            let rep = torus_intersections(&p, &b, cli.unity_bound)?;
            let sing = singular_points(&p, &b)?;
            if json_mode(cli) {
                let mut v = to_value(&rep);
                v["singular_points"] = to_value(&sing);
                return Ok(envelope("torus", Some(&b), v));
            }
            let mut s = String::new();
            let _ = writeln!(s, "one-dimensional: {}", rep.one_dimensional);
            let _ = write!(s, "torus points: {}", rep.points.len());
            for pt in &rep.points {
                let _ = write!(s, "\n  {}", point_text(pt));
            }
            let _ = write!(s, "\nsingular points: {}", sing.len());
            for sp in &sing {
                let _ = write!(s, "\n  ({}, {})", sp.z1, sp.z2);
            }
            Ok(s)
        }
        Cmd::Newton { poly } => {
            let p = poly2(poly)?;
            let np = newton_polygon(&p)?;
            if json_mode(cli) {
                return Ok(envelope("newton", None, to_value(&np)));
            }
            let mut s = format!("vertices: {:?}", np.vertices);
            for side in &np.sides {
                let _ = write!(s, "\nside {:?} -> {:?}: {}", side.start, side.end, side.polynomial);
            }
            Ok(s)
        }
        Cmd::Tempered { poly } => {
            let p = poly2(poly)?;
            let rep = is_tempered(&p)?;
            if json_mode(cli) {
                return Ok(envelope("tempered", None, to_value(&rep)));
            }
            let mut s = format!("tempered: {}", rep.tempered);
            for o in &rep.obstructions {
                let _ = write!(
                    s,
                    "\nobstruction on side {:?} -> {:?}: {}",
                    o.start, o.end, o.factorization.residual
                );
            }
            Ok(s)
        }
        Cmd::Curve { cmd } => curve(cli, cmd),
        Cmd::Genus2 { poly } => {
            let p = poly2(poly)?;
            let g = genus2_split(&p)?;
            if json_mode(cli) {
                return Ok(envelope("genus2", None, to_value(&g)));
            }
            Ok(format!(
                "r = {}\nD = {}\nD~ = {}\npalindromic: {}\nQ = {}\nE1 = {}\nE2 = {}",
                g.r,
                g.d.display_in("t1"),
                g.d_tilde.display_in("t1"),
                g.palindromic,
                g.q.display_in("z"),
                g.e1,
                g.e2
            ))
        }
        Cmd::Lvalue(args) => lvalue(cli, args),
        Cmd::Discover { poly, height, basis, no_verify } => {
            let b = digits(cli, DEFAULT_DIGITS, 10)?;
            let p = poly2(poly)?;
            let opts = discover_options(cli, *height, basis.as_deref(), *no_verify)?;
            let r = discover(&p, &opts, &b)?;
            if json_mode(cli) {
                return Ok(envelope("discover", Some(&b), to_value(&r)));
            }
            Ok(discover_text(&r))
        }
        Cmd::Batch { input, output, height, basis, no_verify } => {
            let b = digits(cli, DEFAULT_DIGITS, 10)?;
            let opts = discover_options(cli, *height, basis.as_deref(), *no_verify)?;
            batch(cli, &b, &opts, basis.as_deref().unwrap_or("auto"), input, output)
        }
    }
}

fn point_text(pt: &mahler_lab::torus::TorusPoint) -> String {
    let contact = pt.contact.map(|c| format!(" [{c:?}]").to_lowercase()).unwrap_or_default();
    match pt.unity {
        Some([n1, d1, n2, d2]) => format!("t1 = e({n1}/{d1}), t2 = e({n2}/{d2}){contact}"),
        None => format!("theta1 = {}, theta2 = {}{contact}", pt.theta1, pt.theta2),
    }
}

fn measure(cli: &Cli, poly: &str, method: MethodArg) -> Result<String> {
    let three = poly.contains("t3");
    if three {
        let b = digits(cli, DEFAULT_DIGITS_3VAR, 4)?;
        let p = parse_laurent3(poly)?;
        let v = mahler_3var(&p, &b)?;
        if json_mode(cli) {
            return Ok(envelope(
                "measure",
                Some(&b),
                json!({ "polynomial": p.to_string(), "value": to_value(&v), "method": "nested_3var" }),
            ));
        }
        return Ok(format!("m(P) = {v}"));
    }
    let b = digits(cli, DEFAULT_DIGITS, 10)?;
    let p = poly2(poly)?;
    let r = match method {
        MethodArg::Quad => mahler_2var(&p, &b)?,
        MethodArg::Track => mahler_2var_tracked(&p, &b)?,
    };
    if json_mode(cli) {
        let mut v = to_value(&r);
        v["polynomial"] = json!(p.to_string());
        return Ok(envelope("measure", Some(&b), v));
    }
    Ok(format!("m(P) = {}", r.value))
}

fn curve(cli: &Cli, cmd: &CurveCmd) -> Result<String> {
    match cmd {
        CurveCmd::Pk { k, prime } => {
            let k: Rational = k.trim().parse().map_err(|_| Error::Parse(format!("bad k {k:?}")))?;
            let (c, _) = pk_curve(&k)?;
            let pts = pk_points(&k);
            let (d1, d2) = divisors_t1_t2_on_pk(&k)?;
            let primes = match prime {
                Some(p) => vec![*p],
                None => bad_primes(&c),
            };
            let mut local = Vec::new();
            for p in primes {
                let rd = reduction_data(&c, p)?;
                let mut entry = to_value(&rd);
                if rd.kind.is_multiplicative() {
                    let a = component_orders(&c, &pts, &rd)?;
                    entry["component_orders"] = json!(a.orders);
                    if rd.kind == ReductionType::MultiplicativeSplit {
                        let set = delta_p(&c, &d1, &d2, &rd, &a)?;
                        entry["delta_p"] = json!(set.iter().map(|q| q.to_string()).collect::<Vec<_>>());
                    }
                }
                local.push(entry);
            }
            let result = json!({
                "k": k.to_string(),
                "curve": to_value(&c),
                "invariants": to_value(&c.invariants()),
                "points": to_value(&pts),
                "div_t1": to_value(&d1),
                "div_t2": to_value(&d2),
                "primes": local,
            });
            if json_mode(cli) {
                return Ok(envelope("curve pk", None, result));
            }
            let inv = c.invariants();
            let mut s = format!("C_{k}: {c}\nc4 = {}\ndisc = {}", inv.c4, inv.disc);
            for e in result["primes"].as_array().expect("array") {
                let _ = write!(s, "\np = {}: {}", e["prime"], e["type"].as_str().unwrap_or("?"));
                if let Some(o) = e.get("component_orders") {
                    let _ = write!(s, ", N = {}, orders {}", e["n"], o);
                }
                if let Some(d) = e.get("delta_p") {
                    let _ = write!(s, ", delta_p {d}");
                }
            }
            Ok(s)
        }
        CurveCmd::Info { coeffs } => {
            let c = parse_curve(coeffs)?;
            let (min, _) = global_minimal_model(&c)?;
            let mut local = Vec::new();
            for p in bad_primes(&min) {
                local.push(to_value(&reduction_data(&min, p)?));
            }
            let result = json!({
                "curve": to_value(&c),
                "invariants": to_value(&c.invariants()),
                "minimal_model": to_value(&min),
                "primes": local,
            });
            if json_mode(cli) {
                return Ok(envelope("curve info", None, result));
            }
            let inv = c.invariants();
            let mut s = format!("E: {c}\nminimal model: {min}\nj = {}\ndisc = {}", inv.j, inv.disc);
            for e in &local {
                let _ = write!(s, "\np = {}: {}", e["prime"], e["type"].as_str().unwrap_or("?"));
            }
            Ok(s)
        }
    }
}

fn lvalue(cli: &Cli, args: &LvalueArgs) -> Result<String> {
    let b = digits(cli, DEFAULT_DIGITS, 10)?;
    let (label, result) = if let Some(label) = &args.dirichlet {
        let chi = DirichletCharacter::parse(label)?;
        if args.at_minus1 {
            let v = dirichlet_lprime_minus1_complex(&chi, &b)?;
            let name = format!("L'(chi_{chi},-1)");
            let value = if v.im.contains_zero() { to_value(&v.re) } else { to_value(&v) };
            (name, json!({ "character": chi.to_string(), "conductor": chi.conductor(), "parity": chi.parity(), "value": value }))
        } else if let Some(s) = &args.at {
            let s = Float::with_val(b.working_bits, Float::parse(s).map_err(|_| Error::Parse(format!("bad point {s:?}")))?);
            let v = dirichlet_l(&chi, &s, &b)?;
            let value = if v.im.contains_zero() { to_value(&v.re) } else { to_value(&v) };
            (format!("L(chi_{chi},{})", args.at.as_deref().unwrap_or("")), json!({ "character": chi.to_string(), "value": value }))
        } else {
            return Err(Error::Domain("--dirichlet needs --at-minus1 or --at S".into()));
        }
    } else if let Some(coeffs) = &args.curve {
        if !args.lprime0 {
            return Err(Error::Domain("--curve needs --Lprime0".into()));
        }
        let c = parse_curve(coeffs)?;
        let r = ell_lprime_0(&c, &b)?;
        ("L'(E,0)".to_string(), json!({
            "curve": to_value(&c),
            "value": to_value(&r.value),
            "conductor": r.conductor,
            "sign": r.sign,
            "terms": r.terms,
            "consistency": r.consistency,
        }))
    } else if args.zeta_prime_minus2 {
        ("zeta'(-2)".to_string(), json!({ "value": to_value(&zeta_prime_minus2(&b)?) }))
    } else {
        return Err(Error::Domain("lvalue needs --dirichlet, --curve or --zeta-prime-minus2".into()));
    };
    if json_mode(cli) {
        let mut r = result;
        r["label"] = json!(label);
        return Ok(envelope("lvalue", Some(&b), r));
    }
    let v = &result["value"];
    let text = match (v.get("value"), v.get("radius")) {
        (Some(x), Some(r)) => format!("{} ± {:.2e}", x.as_str().unwrap_or(""), r.as_f64().unwrap_or(0.0)),
        _ => v.to_string(),
    };
    let mut s = format!("{label} = {text}");
    if let Some(n) = result.get("conductor").filter(|_| args.curve.is_some()) {
        let _ = write!(s, "\nconductor = {n}, sign = {}", result["sign"]);
    }
    Ok(s)
}

fn discover_options(cli: &Cli, height: u64, basis: Option<&str>, no_verify: bool) -> Result<DiscoverOptions> {
    Ok(DiscoverOptions {
        height_bound: height,
        unity_bound: cli.unity_bound,
        basis: basis.map(parse_basis_spec).transpose()?,
        verify: !no_verify,
    })
}

fn discover_text(r: &DiscoveryReport) -> String {
    let mut s = format!("m(P) = {}", r.measure);
    for e in r.basis.iter().skip(1) {
        let _ = write!(s, "\n{} = {}", e.label, e.value);
    }
    match (&r.status, &r.identity, &r.relation) {
        (RelationStatus::Found, Some(id), Some(rel)) => {
            let _ = write!(s, "\n{id}\nresidual {:.2e}", rel.residual.to_f64());
        }
        (RelationStatus::Found, None, Some(rel)) => {
            let _ = write!(s, "\nrelation among the basis constants: {:?}", rel.coeffs);
        }
        (RelationStatus::Excluded, _, _) => {
            let _ = write!(s, "\nno relation: none exists with norm below {:.3e}", r.exclusion_norm.to_f64());
        }
        _ => {
            let _ = write!(s, "\ninconclusive (exclusion norm {:.3e})", r.exclusion_norm.to_f64());
        }
    }
    for n in &r.notes {
        let _ = write!(s, "\nnote: {n}");
    }
    s
}

fn batch(
    cli: &Cli,
    budget: &PrecisionBudget,
    opts: &DiscoverOptions,
    basis_label: &str,
    input: &std::path::Path,
    output: &std::path::Path,
) -> Result<String> {
    let text = fs::read_to_string(input).map_err(|e| Error::Domain(format!("cannot read {}: {e}", input.display())))?;
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let mut w = csv::Writer::from_path(output).map_err(|e| Error::Domain(format!("cannot write {}: {e}", output.display())))?;
    let header = [
        "polynomial", "digits", "height", "unity_bound", "basis", "measure", "measure_radius", "status", "identity",
        "coefficients", "residual", "exclusion_norm", "verified", "error",
    ];
    let csv_err = |e: csv::Error| Error::Domain(format!("CSV output: {e}"));
    w.write_record(header).map_err(csv_err)?;
    let mut failures = 0;
    for line in &lines {
        let cfg = [
            line.to_string(),
            budget.digits().to_string(),
            opts.height_bound.to_string(),
            cli.unity_bound.to_string(),
            basis_label.to_string(),
        ];
        let row: Vec<String> = match poly2(line).and_then(|p| discover(&p, opts, budget)) {
            Ok(r) => {
                let status = to_value(&r.status).as_str().unwrap_or("").to_string();
                cfg.into_iter()
                    .chain([
                        r.measure.display(r.measure.meaningful_digits()).split(" ± ").next().unwrap_or("").to_string(),
                        format!("{:e}", r.measure.rad()),
                        status,
                        r.identity.clone().unwrap_or_default(),
                        r.relation.as_ref().map(|x| format!("{:?}", x.coeffs)).unwrap_or_default(),
                        r.relation.as_ref().map(|x| format!("{:e}", x.residual.to_f64())).unwrap_or_default(),
                        format!("{:e}", r.exclusion_norm.to_f64()),
                        r.verified.map(|v| v.to_string()).unwrap_or_default(),
                        String::new(),
                    ])
                    .collect()
            }
            Err(e) => {
                failures += 1;
                cfg.into_iter().chain(std::iter::repeat_n(String::new(), 8)).chain([e.to_string()]).collect()
            }
        };
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Domain(format!("CSV output: {e}")))?;
    Ok(format!("{} polynomials, {} failed; results in {}", lines.len(), failures, output.display()))
}
