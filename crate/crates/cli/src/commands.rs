use crate::args::*;
use crate::cache::{provider, zero_rows, ZeroCache, ZERO_HEADER};
use crate::error::CliError;
use crate::output::{fmt_bool, fmt_f, fmt_opt, Artifacts, Manifest};
use lowlying::characters::{enumerate_characters, DirichletCharacter};
use lowlying::density::{density_averaged, EXPLICIT_SLACK, density_prime_side, predict, DensityReport, PredictParams, Source};
use lowlying::hypotheses::{deaveraging_ratio, deaveraging_scan, gv_variance, montgomery_scan};
use lowlying::lfunction::{family_zero_sum_with, ZeroSet, ENGINE_VERSION};
use lowlying::primes::PrimeTable;
use lowlying::special::{all_constants, constants_at, totient_sum_asymptotic, totient_sum_direct, TotientVariant};
use lowlying::{Error, TestFn};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const DEFAULT_OUT: &str = "lowlying-out";
pub const DEFAULT_HEIGHT: f64 = 60.0;
pub const DEFAULT_R: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

/// Result of a command: a summary for stdout, and an error to report after
/// the artifacts and manifest are written.
struct Outcome {
    summary: Value,
    failure: Option<CliError>,
}

impl Outcome {
    fn ok(summary: Value) -> Self {
        Self { summary, failure: None }
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn execute(mut cli: Cli) -> Result<i32, CliError> {
    if let Command::Replay(r) = &cli.command {
        let m = Manifest::load(&r.manifest)?;
        let out = cli.global.out.take();
        cli = Cli { global: Global { out: out.or(m.global.out), ..m.global }, command: m.command };
        if let Command::Replay(_) = cli.command {
            return Err(CliError::config("a manifest cannot record a replay"));
        }
    }
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    let out = cli
        .global
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    cli.global.out = Some(out.clone());

    let start = Instant::now();
    let mut art = Artifacts::new(&out)?;
    let outcome = run(&mut cli, &mut art)?;
    let code = outcome.failure.as_ref().map_or(0, CliError::exit_code);
    let manifest = Manifest {
        tool: "lowlying".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        zero_engine_version: ENGINE_VERSION.into(),
        global: cli.global.clone(),
        command: cli.command.clone(),
        artifacts: art.files().to_vec(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        exit_code: code,
    };
    let mpath = art.json(&Manifest::file_name(&cli.command), &manifest)?;
    let mut summary = outcome.summary;
    summary["manifest"] = json!(mpath.display().to_string());
    // A closed pipe downstream is not an error of the run.
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&summary)?);
    if let Some(e) = outcome.failure {
        eprintln!("{}", e.to_json());
    }
    Ok(code)
}

fn run(cli: &mut Cli, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let g = &mut cli.global;
    match &mut cli.command {
        Command::Chars(a) => chars(a, art),
        Command::Zeros(a) => zeros(g, a, art),
        Command::Density(a) => density(g, a, art),
        Command::VerifyExplicit(a) => verify(g, a, art),
        Command::Lemma24(a) => lemma24(a, art),
        Command::Constants(a) => constants(a, art),
        Command::Variance(a) => variance(g, a, art),
        Command::Deavg(a) => deavg(g, a, art),
        Command::Montgomery(a) => montgomery(g, a, art),
        Command::Replay(_) => unreachable!("resolved before dispatch"),
    }
}

fn required<T: Copy>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::config(format!("missing required value `{what}`")))
}

fn nonempty<T>(v: &[T], what: &str) -> Result<(), CliError> {
    if v.is_empty() {
        Err(CliError::config(format!("missing required list `{what}`")))
    } else {
        Ok(())
    }
}

/// Builds the test function, recording the defaults it used.
fn test_function(g: &mut Global) -> Result<TestFn, CliError> {
    let family = g.tf_family.get_or_insert_with(|| "bump".into()).clone();
    let sigma = *g.sigma.get_or_insert(1.0);
    match family.as_str() {
        "bump" => {
            let power = *g.power.get_or_insert(3);
            Ok(TestFn::polynomial_bump(sigma, power)?)
        }
        "table" => {
            let path = g
                .tf_file
                .clone()
                .ok_or_else(|| CliError::config("test-function family `table` needs --tf-file"))?;
            let mut r = csv::Reader::from_path(&path)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for rec in r.records() {
                let rec = rec?;
                let num = |i: usize| -> Result<f64, CliError> {
                    rec.get(i)
                        .and_then(|s| s.trim().parse().ok())
                        .ok_or_else(|| CliError::config(format!("{}: bad row {rec:?}", path.display())))
                };
                xs.push(num(0)?);
                ys.push(num(1)?);
            }
            let tf = TestFn::tabulated(&xs, &ys)?;
            g.sigma = Some(tf.sigma());
            Ok(tf)
        }
        other => Err(CliError::config(format!("unknown test-function family `{other}` (bump, table)"))),
    }
}

/// Prime table covering `needed`, checked against an explicit limit.
fn prime_table(g: &mut Global, needed: f64, what: &str) -> Result<PrimeTable, CliError> {
    let needed = needed.ceil().max(100.0) as u64;
    let limit = *g.table_limit.get_or_insert(needed);
    if limit < needed {
        return Err(CliError::config(format!(
            "prime-table limit {limit} is below {needed} needed for {what}"
        )));
    }
    Ok(PrimeTable::new(limit)?)
}

fn cache(g: &Global) -> ZeroCache {
    if g.no_cache {
        ZeroCache::new(None)
    } else {
        let out = g.out.clone().expect("resolved");
        ZeroCache::new(Some(g.cache_dir.clone().unwrap_or_else(|| out.join("cache"))))
    }
}

fn chars(a: &CharsArgs, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let q = required(a.q, "q")?;
    let chars = enumerate_characters(q)?;
    let rows: Vec<Vec<String>> = chars
        .iter()
        .map(|c| {
            vec![
                q.to_string(),
                c.index().to_string(),
                c.order().to_string(),
                c.parity().to_string(),
                c.conductor().to_string(),
                c.is_primitive().to_string(),
                c.is_real().to_string(),
            ]
        })
        .collect();
    art.csv("chars.csv", &["q", "chi_index", "order", "parity", "conductor", "primitive", "real"], &rows)?;
    let odd = chars.iter().filter(|c| c.parity() == 1).count();
    let summary = json!({
        "q": q,
        "characters": chars.len(),
        "even": chars.len() - odd,
        "odd": odd,
        "primitive": chars.iter().filter(|c| c.is_primitive()).count(),
    });
    art.json("chars.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn zeros(g: &mut Global, a: &mut ZerosArgs, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let q = required(a.q, "q")?;
    let height = *a.height.get_or_insert(DEFAULT_HEIGHT);
    let cache = cache(g);
    let chars = enumerate_characters(q)?;
    let sets: Vec<(DirichletCharacter, ZeroSet)> = chars
        .into_par_iter()
        .map(|chi| {
            let inducer = chi.conductor_and_inducer().1;
            cache.zeros(&inducer, height).map(|z| (chi, z))
        })
        .collect::<Result<_, Error>>()?;
    let rows: Vec<Vec<String>> = sets.iter().flat_map(|(chi, z)| zero_rows(q, chi.index(), z)).collect();
    art.csv("zeros.csv", &ZERO_HEADER, &rows)?;
    let per_char: Vec<Value> = sets
        .iter()
        .map(|(chi, z)| {
            json!({
                "chi_index": chi.index(),
                "conductor": z.conductor,
                "parity": z.parity,
                "inducer_index": z.index,
                "zeros": z.ordinates.len(),
                "certificate": z.certificate,
                "max_fe_residual": z.max_fe_residual,
                "central_zero": z.central_zero,
            })
        })
        .collect();
    art.json("zeros.json", &json!({ "q": q, "height": height, "characters": per_char }))?;
    let worst = sets.iter().map(|(_, z)| z.max_fe_residual).fold(0.0, f64::max);
    let mismatches = sets.iter().filter(|(_, z)| z.certificate.mismatch() != 0).count();
    Ok(Outcome::ok(json!({
        "q": q,
        "height": height,
        "zeros": rows.len(),
        "certificate_mismatches": mismatches,
        "max_fe_residual": worst,
    })))
}

fn report_rows(r: &DensityReport) -> Vec<Vec<String>> {
    let row = |kind: &str, name: &str, v: f64, env: Option<f64>, within: Option<bool>| {
        vec![kind.to_string(), name.to_string(), fmt_f(v), fmt_opt(env), fmt_bool(within)]
    };
    let t = &r.terms;
    let mut rows = vec![
        row("term", "t1", t.t1, None, None),
        row("term", "t2", t.t2, None, None),
        row("term", "t3", t.t3, None, None),
        row("term", "t4", t.t4, None, None),
        row("term", "t3_series", r.t3_series, None, None),
        row("total", "prime_side", r.prime_side, Some(r.slack), None),
    ];
    if let Some(c) = r.main_term_closed_form {
        rows.push(row("total", "main_term_closed_form", c, None, None));
    }
    if let Some(z) = &r.zero_side {
        rows.push(row("total", "zero_side", z.value, Some(z.tail_bound), None));
    }
    for p in &r.predictions {
        rows.push(row("prediction", p.source.as_str(), p.value, p.envelope, None));
    }
    for res in &r.residuals {
        rows.push(row("residual", &format!("{}-{}", res.lhs, res.rhs), res.value, res.envelope, res.within_envelope));
    }
    rows
}

const REPORT_HEADER: [&str; 5] = ["kind", "name", "value", "envelope", "within_envelope"];

fn density(g: &mut Global, a: &DensityArgs, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let tf = test_function(g)?;
    let sources = a
        .sources
        .iter()
        .map(|s| s.parse::<Source>())
        .collect::<Result<Vec<_>, _>>()?;
    let mu0 = match (a.mu0_a, a.mu0_m) {
        (Some(x), Some(m)) => Some((x, m)),
        (None, None) => None,
        _ => return Err(CliError::config("mu0-a and mu0-m must be given together")),
    };
    let (scale, mut params) = match (a.q, a.range) {
        (Some(q), None) => (q as f64, PredictParams::for_modulus(&tf, q)),
        (None, Some(r)) => (r, PredictParams::for_range(&tf, r)),
        _ => return Err(CliError::config("give exactly one of --q and --range")),
    };
    params.kappa = a.kappa;
    params.inner_edge = a.inner_edge;
    params.mu0 = mu0;
    // Predictions first: a support-gate violation should not wait for the sieve.
    let predictions = sources.iter().map(|&s| predict(s, &params)).collect::<Result<Vec<_>, _>>()?;
    let table = prime_table(g, scale.powf(tf.sigma()), "Q^σ")?;
    let mut report = match a.q {
        Some(q) => density_prime_side(q, scale, &tf, &table)?,
        None => density_averaged(scale, &tf, a.weighted, &table)?,
    };
    for p in predictions {
        report.attach_prediction(p);
    }
    art.csv("density.csv", &REPORT_HEADER, &report_rows(&report))?;
    art.json("density.json", &report)?;
    Ok(Outcome::ok(json!({
        "family": report.family,
        "prime_side": report.prime_side,
        "predictions": report.predictions,
    })))
}

fn verify(g: &mut Global, a: &mut VerifyArgs, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let q = required(a.q, "q")?;
    let height = *a.height.get_or_insert(DEFAULT_HEIGHT);
    let tf = test_function(g)?;
    let scale = q as f64;
    let table = prime_table(g, scale.powf(tf.sigma()), "Q^σ")?;
    let cache = cache(g);
    let zero = family_zero_sum_with(q, &tf, scale, height, &provider(&cache))?;
    let mut report = density_prime_side(q, scale, &tf, &table)?;
    let slack = *a.explicit_slack.get_or_insert(EXPLICIT_SLACK);
    if !(slack >= 0.0) {
        return Err(CliError::config(format!("explicit-slack must be nonnegative, got {slack}")));
    }
    report.attach_zero_side_with_slack(&zero, slack);
    art.csv("verify-explicit.csv", &REPORT_HEADER, &report_rows(&report))?;
    art.json("verify-explicit.json", &report)?;
    let res = report.residual("zero_side", "prime_side").expect("attached");
    let failure = (res.within_envelope != Some(true)).then(|| {
        CliError::numeric(format!(
            "zero side and prime side differ by {:e}, beyond the envelope {:e}",
            res.value,
            res.envelope.unwrap_or(f64::NAN)
        ))
    });
    Ok(Outcome {
        summary: json!({
            "q": q,
            "height": height,
            "zero_side": zero.value,
            "prime_side": report.prime_side,
            "residual": res.value,
            "envelope": res.envelope,
            "within_envelope": res.within_envelope,
        }),
        failure,
    })
}

fn lemma24(a: &mut Lemma24Args, art: &mut Artifacts) -> Result<Outcome, CliError> {
    if a.r.is_empty() {
        a.r = DEFAULT_R.to_vec();
    }
    let name = a.variant.get_or_insert_with(|| "plain".into()).clone();
    if name != "plain" && a.coeffs.is_empty() {
        a.coeffs = vec![1.0];
    }
    let variant = match name.as_str() {
        "plain" => TotientVariant::Plain,
        "polynomial" => TotientVariant::Polynomial(a.coeffs.clone()),
        "halved" => TotientVariant::Halved(a.coeffs.clone()),
        other => return Err(CliError::config(format!("unknown variant `{other}` (plain, polynomial, halved)"))),
    };
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &r in &a.r {
        let d = totient_sum_direct(r, &variant)?;
        let s = totient_sum_asymptotic(r, &variant)?;
        let normalized = (d - s).abs() * r.sqrt() / r.ln();
        rows.push(vec![fmt_f(r), name.clone(), fmt_f(d), fmt_f(s), fmt_f(d - s), fmt_f(normalized)]);
        points.push(json!({ "R": r, "direct": d, "asymptotic": s, "residual": d - s, "normalized": normalized }));
    }
    art.csv("lemma24.csv", &["R", "variant", "direct", "asymptotic", "residual", "normalized"], &rows)?;
    let summary = json!({ "variant": name, "coeffs": a.coeffs, "points": points });
    art.json("lemma24.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn constants(a: &ConstantsArgs, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let list = match a.p0 {
        Some(p0) => constants_at(p0)?,
        None => all_constants(),
    };
    let rows: Vec<Vec<String>> = list
        .iter()
        .map(|c| {
            vec![
                c.id.to_string(),
                fmt_f(c.value),
                fmt_f(c.error),
                serde_json::to_value(c.definition).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                c.description.to_string(),
            ]
        })
        .collect();
    art.csv("constants.csv", &["id", "value", "error", "definition", "description"], &rows)?;
    art.json("constants.json", &list)?;
    Ok(Outcome::ok(json!({ "constants": list })))
}

fn max_x(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(0.0, f64::max)
}

fn variance(g: &mut Global, a: &VarianceArgs, art: &mut Artifacts) -> Result<Outcome, CliError> {
    nonempty(&a.x, "x")?;
    nonempty(&a.q_max, "Q")?;
    let table = prime_table(g, max_x(&a.x), "x")?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for &x in &a.x {
        for &q in &a.q_max {
            let s = gv_variance(&table, x, q)?;
            rows.push(vec![
                fmt_f(x),
                q.to_string(),
                fmt_f(s.variance),
                fmt_f(s.class_one),
                fmt_f(s.range_variance),
                fmt_f(s.main_term),
                fmt_f(s.c),
                fmt_f(s.ratio),
            ]);
            samples.push(s);
        }
    }
    art.csv(
        "variance.csv",
        &["x", "Q", "variance", "class_one", "range_variance", "main_term", "c", "ratio"],
        &rows,
    )?;
    art.json("variance.json", &samples)?;
    Ok(Outcome::ok(json!({ "samples": samples })))
}

const SCAN_HEADER: [&str; 5] = ["x", "q", "a_class", "statistic", "normalized"];

fn deavg(g: &mut Global, a: &DeavgArgs, art: &mut Artifacts) -> Result<Outcome, CliError> {
    nonempty(&a.x, "x")?;
    nonempty(&a.q_max, "Q")?;
    let table = prime_table(g, max_x(&a.x), "x")?;
    let pairs: Vec<(f64, u64)> = a.x.iter().flat_map(|&x| a.q_max.iter().map(move |&q| (x, q))).collect();
    let (points, fit, note) = match deaveraging_scan(&table, &pairs) {
        Ok(fit) => {
            let pts = fit.points.iter().map(|p| (p.x, p.q, p.statistic, p.normalized)).collect::<Vec<_>>();
            (pts, Some(fit), None)
        }
        Err(Error::DegenerateFit(msg)) => {
            let mut pts = Vec::new();
            for &(x, q) in &pairs {
                let s = deaveraging_ratio(&table, x, q)?;
                pts.push((x, q, s.ratio, s.eta_hat));
            }
            (pts, None, Some(format!("no exponent fit: {msg}")))
        }
        Err(e) => return Err(e.into()),
    };
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|&(x, q, s, n)| vec![fmt_f(x), q.to_string(), "1".into(), fmt_f(s), fmt_f(n)])
        .collect();
    art.csv("deavg.csv", &SCAN_HEADER, &rows)?;
    let eta: Vec<Value> = points.iter().map(|&(x, q, s, n)| json!({ "x": x, "Q": q, "ratio": s, "eta_hat": n })).collect();
    let summary = json!({ "samples": eta, "fit": fit, "note": note });
    art.json("deavg.json", &summary)?;
    Ok(Outcome::ok(summary))
}

fn montgomery(g: &mut Global, a: &MontgomeryArgs, art: &mut Artifacts) -> Result<Outcome, CliError> {
    nonempty(&a.x, "x")?;
    nonempty(&a.q, "q")?;
    let table = prime_table(g, max_x(&a.x), "x")?;
    let fit = montgomery_scan(&table, &a.x, &a.q, a.smoothed)?;
    let rows: Vec<Vec<String>> = fit
        .points
        .iter()
        .map(|p| vec![fmt_f(p.x), p.q.to_string(), "1".into(), fmt_f(p.statistic), fmt_f(p.normalized)])
        .collect();
    art.csv("montgomery.csv", &SCAN_HEADER, &rows)?;
    art.json("montgomery.json", &fit)?;
    Ok(Outcome::ok(json!({
        "smoothed": fit.smoothed,
        "exponent": fit.exponent,
        "slope": fit.slope,
        "residual_norm": fit.residual_norm,
        "points": fit.points.len(),
    })))
}
