use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use divisor_series::eval::{
    self, check_bounds_with, rational_grid, BoundConstants, BoundsPoint, BoundsRecord, BoundsStatus,
    EvalOptions, QPoint, TheoremId,
};
use divisor_series::lemma::{self, PhiPoint};
use divisor_series::real::constants::parse_number;
use divisor_series::real::{DEFAULT_PRECISION, MAX_PRECISION};
use divisor_series::series::{build_representation, identity_report, RepresentationId};
use divisor_series::verifier::{self, combine_theorem_3_2, verify_lemma, LemmaId, VerifyOptions};
use divisor_series::{Approx, Error, Interval, Mode, Real};
use rayon::prelude::*;
use rug::Rational;
use serde_json::{json, Map, Value};

use crate::output::{csv_preamble, emit, enclosure_fields, pretty, CliError, CliResult, CSV_HEADER};
use crate::{
    CoeffsArgs, EvalArgs, FnName, Format, IdentityArgs, LemmaArgs, ReportArgs, ScanArgs, Section, VerifyArgs,
    PRECISION_ENV, SCHEMA_VERSION,
};

/// Working precision from the environment, else the library default.
fn precision() -> CliResult<u32> {
    match std::env::var(PRECISION_ENV) {
        Err(_) => Ok(DEFAULT_PRECISION),
        Ok(text) => match text.trim().parse::<u32>() {
            Ok(p) if (16..=65536).contains(&p) => Ok(p),
            _ => Err(CliError::Usage(format!("{PRECISION_ENV}={text} is not a precision in [16, 65536] bits"))),
        },
    }
}

fn number(text: &str, what: &str) -> CliResult<Rational> {
    parse_number(text).ok_or_else(|| CliError::Usage(format!("--{what} '{text}' is not a number")))
}

fn parse<T: FromStr<Err = Error>>(text: &str) -> CliResult<T> {
    Ok(text.parse::<T>()?)
}

pub fn with_jobs(jobs: Option<usize>, run: impl FnOnce() -> CliResult<bool> + Send) -> CliResult<bool> {
    match jobs {
        None => run(),
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
            pool.install(run)
        }
    }
}

pub fn coeffs(a: &CoeffsArgs) -> CliResult<bool> {
    let id: RepresentationId = parse(&a.repr)?;
    let series = build_representation(id, a.order)?;
    let text = match a.format {
        Format::Csv => {
            let mut s = csv_preamble(SCHEMA_VERSION);
            s.push_str("index,coefficient\n");
            for (k, c) in series.coeffs().iter().enumerate() {
                s.push_str(&format!("{k},{c}\n"));
            }
            s
        }
        Format::Json => pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "representation": id,
            "order": a.order,
            "coefficients": series.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })),
    };
    emit(&text, None)?;
    Ok(true)
}

fn identity_json(order: usize) -> CliResult<(Value, bool)> {
    let report = identity_report(order)?;
    let passed = report.values().all(|o| o.matches);
    let v = json!({ "schema_version": SCHEMA_VERSION, "order": order, "passed": passed, "report": report });
    Ok((v, passed))
}

pub fn identity_check(a: &IdentityArgs) -> CliResult<bool> {
    let (v, passed) = identity_json(a.order)?;
    emit(&pretty(&v), None)?;
    Ok(passed)
}

pub fn eval(a: &EvalArgs) -> CliResult<bool> {
    let q: QPoint = parse(&a.q)?;
    let prec = precision()?;
    let opts = EvalOptions {
        eps: a.eps,
        mode: a.mode.into(),
        precision: prec,
        max_precision: MAX_PRECISION.max(prec),
        ..EvalOptions::default()
    };
    let repr: RepresentationId = parse(&a.repr)?;
    let (name, report) = match a.function {
        FnName::T => ("T", eval::eval_t(&q, repr, &opts)?),
        FnName::H => ("H", eval::eval_h_with(&q, repr, &opts)?),
        FnName::F => ("F", eval::eval_f_with(&q, repr, &opts)?),
        FnName::Psi => ("psi", eval::eval_psi_q(&q, &number(&a.x, "x")?, &opts)?),
    };
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("fn".into(), json!(name));
    m.insert("q".into(), json!(q.rational().to_string()));
    if a.function == FnName::Psi {
        m.insert("x".into(), json!(number(&a.x, "x")?.to_string()));
    }
    m.insert("representation".into(), json!(report.representation.to_string()));
    m.insert("mode".into(), json!(report.mode));
    m.insert("precision".into(), json!(report.precision));
    m.extend(enclosure_fields(&report.value, a.digits));
    m.insert("terms".into(), json!(report.terms_used));
    m.insert("tail_bound".into(), json!(report.tail_bound));
    emit(&pretty(&Value::Object(m)), None)?;
    Ok(true)
}

/// Arguments of an auxiliary function, already lifted into one back end.
struct LemmaInput<R> {
    q: Option<R>,
    x: Option<R>,
    y: Option<R>,
    n: Option<u32>,
}

fn need<'a, T>(v: &'a Option<T>, flag: &str, name: &str) -> CliResult<&'a T> {
    v.as_ref().ok_or_else(|| CliError::Usage(format!("{name} needs --{flag}")))
}

fn lemma_value<R: Real>(name: &str, inp: &LemmaInput<R>) -> CliResult<R> {
    let q = || need(&inp.q, "q", name);
    let point = || -> CliResult<PhiPoint<R>> { Ok(PhiPoint::new(q()?, need(&inp.x, "x", name)?)) };
    let n = || need(&inp.n, "n", name).copied();
    Ok(match name {
        "phi" => lemma::phi(&point()?),
        "phi_prime" => lemma::phi_prime(&point()?),
        "phi_second" => lemma::phi_second(&point()?),
        "a" => lemma::a_q(&point()?),
        "b" => lemma::b_q(&point()?),
        "Phi" => lemma::big_phi(&point()?),
        "Theta" => lemma::theta(&point()?),
        "K" => lemma::k_fn(&point()?),
        "A" => lemma::a_const(q()?),
        "U" => lemma::u_fn(q()?),
        "h1" => lemma::h1(q()?),
        "h2" => lemma::h2(q()?),
        "h3" => lemma::h3(q()?),
        "Delta" => lemma::delta(q()?),
        "G" => lemma::g_fn(q()?),
        "G0" => lemma::g0(q()?),
        "V" => lemma::v_fn(need(&inp.y, "y", name)?),
        "V_prime" => lemma::v_prime(need(&inp.y, "y", name)?),
        "sigma" | "rho" | "C" | "D" => {
            let n = n()?;
            let sums = lemma::correction_sums_generic(q()?, n)?;
            match name {
                "sigma" => sums.sigma[n as usize - 1].clone(),
                "rho" => sums.rho[n as usize - 1].clone(),
                "C" => sums.c_n,
                _ => sums.d_n,
            }
        }
        other => return Err(CliError::Usage(format!("unknown function '{other}'"))),
    })
}

fn check_lemma_domain(name: &str, q: &Option<Rational>, x: &Option<Rational>, y: &Option<Rational>) -> CliResult<()> {
    if let Some(q) = q {
        if *q <= 0 || *q >= 1 {
            return Err(Error::Domain(format!("q = {} is outside (0, 1)", q.to_f64())).into());
        }
    }
    let point_fn = ["phi", "phi_prime", "phi_second", "a", "Phi"].contains(&name);
    if let Some(x) = x {
        if point_fn && *x < 1 {
            return Err(Error::Domain(format!("{name} needs x >= 1")).into());
        }
        if *x <= 0 {
            return Err(Error::Domain(format!("{name} needs x > 0")).into());
        }
    }
    if let Some(y) = y {
        if *y <= 0 {
            return Err(Error::Domain("V needs y > 0".into()).into());
        }
    }
    Ok(())
}

pub fn lemma_fn(a: &LemmaArgs) -> CliResult<bool> {
    let q = a.q.as_deref().map(|s| number(s, "q")).transpose()?;
    let x = a.x.as_deref().map(|s| number(s, "x")).transpose()?;
    let y = a.y.as_deref().map(|s| number(s, "y")).transpose()?;
    check_lemma_domain(&a.name, &q, &x, &y)?;
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("name".into(), json!(a.name));
    for (key, v) in [("q", &q), ("x", &x), ("y", &y)] {
        if let Some(v) = v {
            m.insert(key.into(), json!(v.to_string()));
        }
    }
    if let Some(n) = a.n {
        m.insert("n".into(), json!(n));
    }

    if a.name == "M" || a.name == "N" {
        let q = need(&q, "q", &a.name)?;
        let cp = lemma::critical_points(q)?;
        let v = if a.name == "M" { cp.m_q } else { cp.n_q };
        m.insert("mode".into(), json!(Mode::Certified));
        m.insert("value".into(), json!(v));
        m.insert("bracket_width".into(), json!(cp.bracket_width));
        emit(&pretty(&Value::Object(m)), None)?;
        return Ok(true);
    }

    let mode: Mode = a.mode.into();
    let prec = precision()?;
    let value = match mode {
        Mode::Certified => {
            let lift = |r: &Option<Rational>| r.as_ref().map(|r| Interval::from_rational(prec, r));
            let inp = LemmaInput { q: lift(&q), x: lift(&x), y: lift(&y), n: a.n };
            lemma_value(&a.name, &inp)?
        }
        Mode::Fast => {
            let lift = |r: &Option<Rational>| r.as_ref().map(|r| Approx::exact(0.0).rat(r));
            let inp = LemmaInput { q: lift(&q), x: lift(&x), y: lift(&y), n: a.n };
            lemma_value(&a.name, &inp)?.to_enclosure()
        }
    };
    m.insert("mode".into(), json!(mode));
    m.insert("value".into(), json!(value.mid_f64()));
    m.extend(enclosure_fields(&value, a.digits));
    if let (Some(q), true) = (&q, a.name == "Delta" || a.name == "G0") {
        let poly = if a.name == "Delta" { lemma::delta_polynomial() } else { lemma::g0_polynomial() };
        m.insert("exact".into(), json!(poly.eval(q).to_string()));
    }
    emit(&pretty(&Value::Object(m)), None)?;
    Ok(true)
}

fn scan_rows(
    theorem: TheoremId,
    grid: &[Rational],
    consts: &BoundConstants,
    opts: &EvalOptions,
) -> CliResult<Vec<(Rational, BoundsRecord)>> {
    let points: Vec<(Rational, BoundsPoint)> = if theorem == TheoremId::C33 {
        grid.windows(2)
            .map(|w| Ok((w[0].clone(), BoundsPoint::Pair(QPoint::new(w[0].clone())?, QPoint::new(w[1].clone())?))))
            .collect::<Result<_, Error>>()?
    } else {
        grid.iter().map(|q| Ok((q.clone(), BoundsPoint::Single(QPoint::new(q.clone())?)))).collect::<Result<_, Error>>()?
    };
    let rows: Result<Vec<_>, Error> = points
        .par_iter()
        .map(|(q, p)| check_bounds_with(theorem, p, consts, opts).map(|rec| (q.clone(), rec)))
        .collect();
    Ok(rows?)
}

fn scan_csv(theorem: TheoremId, rows: &[(Rational, BoundsRecord)]) -> String {
    let mut s = csv_preamble(SCHEMA_VERSION);
    if theorem == TheoremId::C33 {
        s.push_str("# C3_3 rows pair q = r with the next grid point s\n");
    }
    s.push_str(CSV_HEADER);
    s.push('\n');
    for (q, rec) in rows {
        s.push_str(&format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
            q.numer().to_f64() / q.denom().to_f64(),
            rec.lhs.lo_f64(),
            rec.lhs.hi_f64(),
            rec.mid.lo_f64(),
            rec.mid.hi_f64(),
            rec.rhs.lo_f64(),
            rec.rhs.hi_f64(),
            rec.status
        ));
    }
    s
}

fn scan_options(mode: Mode) -> CliResult<EvalOptions> {
    let prec = precision()?;
    Ok(EvalOptions { mode, precision: prec, max_precision: MAX_PRECISION.max(prec), ..EvalOptions::default() })
}

pub fn bounds_scan(a: &ScanArgs) -> CliResult<bool> {
    let theorem: TheoremId = parse(&a.theorem)?;
    let grid = rational_grid(
        &number(&a.grid_start, "grid-start")?,
        &number(&a.grid_end, "grid-end")?,
        &number(&a.grid_step, "grid-step")?,
    )?;
    let consts = BoundConstants {
        lower: a.lower.as_deref().map(|s| number(s, "lower")).transpose()?,
        upper: a.upper.as_deref().map(|s| number(s, "upper")).transpose()?,
    };
    let rows = scan_rows(theorem, &grid, &consts, &scan_options(a.mode.into())?)?;
    emit(&scan_csv(theorem, &rows), a.out.as_deref())?;
    Ok(rows.iter().all(|(_, r)| r.status == BoundsStatus::Pass))
}

enum Target {
    Lemma(LemmaId),
    RollUp,
}

fn parse_target(text: &str) -> CliResult<Target> {
    let norm = text.to_ascii_lowercase().replace(['.', '_', '-'], "");
    if norm == "thm32" {
        return Ok(Target::RollUp);
    }
    Ok(Target::Lemma(parse(text)?))
}

fn verify_options(mode: Mode) -> CliResult<VerifyOptions> {
    let prec = precision()?;
    Ok(VerifyOptions { mode, precision: prec, max_precision: MAX_PRECISION.max(prec), ..VerifyOptions::default() })
}

pub fn verify(a: &VerifyArgs) -> CliResult<bool> {
    let opts = verify_options(a.mode.into())?;
    let cert = match parse_target(&a.lemma)? {
        Target::Lemma(id) => verify_lemma(id, &opts)?,
        Target::RollUp => combine_theorem_3_2(&verifier::verify_all(&LemmaId::ALL, &opts)?),
    };
    emit(&cert.to_json(), a.out.as_deref())?;
    Ok(cert.passed)
}

fn section_identities() -> CliResult<(Value, bool)> {
    let start = Instant::now();
    let (mut v, passed) = identity_json(200)?;
    v["seconds"] = json!(start.elapsed().as_secs_f64());
    Ok((v, passed))
}

fn section_verify() -> CliResult<(Value, bool)> {
    let start = Instant::now();
    let certs = verifier::verify_all(&LemmaId::ALL, &verify_options(Mode::Certified)?)?;
    let roll = combine_theorem_3_2(&certs);
    let summary: Vec<Value> = certs
        .iter()
        .chain(std::iter::once(&roll))
        .map(|c| {
            json!({
                "target": c.target,
                "passed": c.passed,
                "cells_checked": c.cells_checked,
                "min_margin": c.min_margin,
                "failed_stages": c.failed_stages(),
            })
        })
        .collect();
    let passed = roll.passed;
    Ok((json!({ "passed": passed, "certificates": summary, "seconds": start.elapsed().as_secs_f64() }), passed))
}

fn section_bounds(format: Format, out_dir: &Path) -> CliResult<(Value, bool)> {
    let start = Instant::now();
    let grid = rational_grid(&Rational::from((1, 100)), &Rational::from((99, 100)), &Rational::from((1, 100)))?;
    let opts = scan_options(Mode::Certified)?;
    let mut theorems = BTreeMap::new();
    let mut files = Vec::new();
    let mut all = true;
    for th in TheoremId::ALL {
        let rows = scan_rows(th, &grid, &BoundConstants::default(), &opts)?;
        let count = |s: BoundsStatus| rows.iter().filter(|(_, r)| r.status == s).count();
        let passed = rows.iter().all(|(_, r)| r.strict_ok());
        all &= passed;
        theorems.insert(
            th.name(),
            json!({
                "points": rows.len(),
                "pass": count(BoundsStatus::Pass),
                "fail": count(BoundsStatus::Fail),
                "indeterminate": count(BoundsStatus::Indeterminate),
                "passed": passed,
            }),
        );
        if format == Format::Csv {
            std::fs::create_dir_all(out_dir)?;
            let path = out_dir.join(format!("bounds_{}.csv", th.name()));
            std::fs::write(&path, scan_csv(th, &rows))?;
            files.push(path.display().to_string());
        }
    }
    let mut v = json!({ "passed": all, "theorems": theorems, "seconds": start.elapsed().as_secs_f64() });
    if format == Format::Csv {
        v["files"] = json!(files);
    }
    Ok((v, all))
}

pub fn report(a: &ReportArgs) -> CliResult<bool> {
    let mut sections = Map::new();
    let mut failures = Vec::new();
    let wanted = |s: Section| !a.skip.contains(&s);
    if wanted(Section::Identities) {
        let (v, ok) = section_identities()?;
        if !ok {
            failures.push("identities");
        }
        sections.insert("identities".into(), v);
    }
    if wanted(Section::Verify) {
        let (v, ok) = section_verify()?;
        if !ok {
            failures.push("verify");
        }
        sections.insert("verify".into(), v);
    }
    if wanted(Section::Bounds) {
        let (v, ok) = section_bounds(a.format, &a.out_dir)?;
        if !ok {
            failures.push("bounds");
        }
        sections.insert("bounds".into(), v);
    }
    let passed = failures.is_empty();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "passed": passed,
        "failures": failures,
        "sections": sections,
    });
    emit(&pretty(&doc), None)?;
    Ok(passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use divisor_series::eval::check_bounds;

    #[test]
    fn targets_parse() {
        assert!(matches!(parse_target("thm3.2").unwrap(), Target::RollUp));
        assert!(matches!(parse_target("2.4ii").unwrap(), Target::Lemma(LemmaId::L2_4Ii)));
        assert!(parse_target("7.1").is_err());
    }

    #[test]
    fn lemma_values_in_both_back_ends() {
        let q = Some(Rational::from((1, 2)));
        let x = Some(Rational::from(2));
        let iv = LemmaInput { q: q.as_ref().map(|r| Interval::from_rational(128, r)), x: x.as_ref().map(|r| Interval::from_rational(128, r)), y: None, n: None };
        assert!(lemma_value("phi", &iv).unwrap().contains_rational(&Rational::from((1, 9))));
        assert!(lemma_value("C", &iv).is_err());
        assert!(lemma_value("nope", &iv).is_err());
        let ap = LemmaInput { q: Some(Approx::exact(0.5)), x: Some(Approx::exact(2.0)), y: None, n: None };
        assert!((lemma_value("phi", &ap).unwrap().value - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn check_bounds_rows_match_library() {
        let grid = vec![Rational::from((1, 2)), Rational::from((3, 5))];
        let opts = EvalOptions::certified();
        let rows = scan_rows(TheoremId::T41, &grid, &BoundConstants::default(), &opts).unwrap();
        let direct = check_bounds(TheoremId::T41, &BoundsPoint::Single(QPoint::from_ratio(1, 2).unwrap()), &opts).unwrap();
        assert_eq!(rows[0].1.status, direct.status);
        assert_eq!(scan_rows(TheoremId::C33, &grid, &BoundConstants::default(), &opts).unwrap().len(), 1);
    }
}
