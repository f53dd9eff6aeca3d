//! Command-line front end: scenario loading, dispatch and report output.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::arcs::{Arc, ArcFamily, Variety};
use crate::error::{Error, Result};
use crate::invariants::{
    evaluate_family, family_search_in, isolated_verdict, phi_sample, sharp_bound, ContactContext,
    ContactReport, FamilyWitness, IsolatedVerdict, Pin, Settings, Verification,
    DEFAULT_FAMILY_RANGE,
};
use crate::nash::{nash_sequence, NashTrace, Termination};
use crate::rees::{ord_at_origin, tau_lower_bound, WeightedAlgebra};
use crate::scenario::{parse_linear_exponent, parse_scenario, Scenario};
use crate::symcore::{format_rational, Rational};

/// Environment variable overriding the default working precision.
pub const PREC_ENV: &str = "ARC_CONTACT_PREC";

#[derive(Debug, Parser)]
#[command(name = "arc-contact", version, about = "Exact arc-based invariants of singularities")]
struct Cli {
    /// Emit a JSON report instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Working precision for truncated series.
    #[arg(long, global = true, value_name = "K")]
    prec: Option<u32>,
    /// Shuffle evaluation order of sweeps; output does not depend on it.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Differential closure of the variety's weighted algebra.
    Closure {
        file: PathBuf,
        #[arg(long, value_name = "NAME")]
        poly: Option<String>,
    },
    /// r, r̄, ρ and ρ̄ of one arc.
    Contact {
        file: PathBuf,
        #[arg(long, value_name = "NAME")]
        arc: String,
    },
    /// Nash multiplicity sequence along one arc.
    Nash {
        file: PathBuf,
        #[arg(long, value_name = "NAME")]
        arc: String,
        /// Continue past the first drop until the strict transform is smooth.
        #[arg(long)]
        full: bool,
    },
    /// Whether the origin is isolated in the maximum multiplicity locus.
    Isolated { file: PathBuf },
    /// r̄ along a declared or synthesized one-parameter family.
    Family {
        file: PathBuf,
        #[arg(long, value_name = "NAME", required_unless_present = "auto_axis", conflicts_with = "auto_axis")]
        family: Option<String>,
        #[arg(long, value_name = "VAR")]
        auto_axis: Option<String>,
        /// Range of N, as `a..b`.
        #[arg(long, value_name = "A..B")]
        range: Option<String>,
        /// Fix one exponent of the synthesized family, as `var=lin`.
        #[arg(long = "pin", value_name = "VAR=LIN", requires = "auto_axis")]
        pins: Vec<String>,
    },
    /// r̄ over every monomial arc with exponents up to the cap.
    Sample {
        file: PathBuf,
        #[arg(long, value_name = "K")]
        cap: Option<u32>,
    },
    /// Cross-check ρ = ⌊r⌋ and the elimination identity on every arc.
    Verify { file: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Closure { .. } => "closure",
            Command::Contact { .. } => "contact",
            Command::Nash { .. } => "nash",
            Command::Isolated { .. } => "isolated",
            Command::Family { .. } => "family",
            Command::Sample { .. } => "sample",
            Command::Verify { .. } => "verify",
        }
    }

    fn file(&self) -> &PathBuf {
        match self {
            Command::Closure { file, .. }
            | Command::Contact { file, .. }
            | Command::Nash { file, .. }
            | Command::Isolated { file }
            | Command::Family { file, .. }
            | Command::Sample { file, .. }
            | Command::Verify { file } => file,
        }
    }
}

/// What a run prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Records and table text of one command; `failure` is set when the command
/// ran but its result is a domain error.
struct Output {
    records: Vec<Value>,
    table: String,
    failure: Option<Error>,
}

impl Output {
    fn ok(records: Vec<Value>, table: String) -> Self {
        Output {
            records,
            table,
            failure: None,
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 1,
                }
            } else {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                }
            };
        }
    };
    let env_prec = std::env::var(PREC_ENV).ok();
    let result = load(&cli, env_prec.as_deref()).and_then(|(sc, settings)| {
        execute(&cli.command, &sc, settings)
    });
    let (records, table, error) = match result {
        Ok(out) => (out.records, out.table, out.failure),
        Err(e) => (Vec::new(), String::new(), Some(e)),
    };
    let code = match &error {
        None => 0,
        Some(e) if e.is_domain_error() => 2,
        Some(_) => 1,
    };
    if cli.json {
        let errors: Vec<Value> = error
            .iter()
            .map(|e| json!({"name": e.name(), "message": e.to_string()}))
            .collect();
        let report = json!({
            "command": cli.command.name(),
            "scenario": cli.command.file().display().to_string(),
            "results": records,
            "errors": errors,
        });
        let mut stdout = serde_json::to_string_pretty(&report).expect("report serializes");
        stdout.push('\n');
        return Outcome {
            stdout,
            stderr: String::new(),
            code,
        };
    }
    let stderr = error
        .map(|e| format!("error: {}: {e}\n", e.name()))
        .unwrap_or_default();
    Outcome {
        stdout: table,
        stderr,
        code,
    }
}

/// Reads the scenario and resolves settings: built-in defaults, then the
/// environment, then `set` lines, then flags.
fn load(cli: &Cli, env_prec: Option<&str>) -> Result<(Scenario, Settings)> {
    let path = cli.command.file();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    let sc = parse_scenario(&text)?;
    let mut settings = Settings::default();
    if let Some(p) = env_prec {
        settings.precision = p
            .trim()
            .parse()
            .ok()
            .filter(|&p: &u32| p > 0)
            .ok_or_else(|| Error::Usage(format!("{PREC_ENV} must be a positive integer")))?;
    }
    if let Some(p) = sc.options.prec {
        settings.precision = p;
    }
    if let Some(c) = sc.options.cap {
        settings.cap = c;
    }
    if let Some(m) = sc.options.max_steps {
        settings.max_steps = m;
    }
    if let Some(p) = cli.prec {
        if p == 0 {
            return Err(Error::Usage("--prec must be positive".into()));
        }
        settings.precision = p;
    }
    settings.seed = cli.seed;
    Ok((sc, settings))
}

fn execute(cmd: &Command, sc: &Scenario, settings: Settings) -> Result<Output> {
    match cmd {
        Command::Closure { poly, .. } => {
            let v = match poly {
                Some(name) => sc.variety_of(name)?,
                None => sc.variety()?,
            };
            closure(&v, settings)
        }
        Command::Contact { arc, .. } => contact(&sc.variety()?, sc.arc(arc)?, settings),
        Command::Nash { arc, full, .. } => nash(&sc.variety()?, sc.arc(arc)?, *full, settings),
        Command::Isolated { .. } => {
            let families: Vec<(String, ArcFamily)> = sc
                .families
                .iter()
                .map(|f| (f.name.clone(), f.family.clone()))
                .collect();
            let v = sc.variety()?;
            Ok(isolated(&v, isolated_verdict(&v, &families, settings)))
        }
        Command::Family {
            family,
            auto_axis,
            range,
            pins,
            ..
        } => {
            let v = sc.variety()?;
            let range = range.as_deref().map(parse_range).transpose()?;
            let ctx = ContactContext::new(&v, settings)?;
            let witness = match (family, auto_axis) {
                (Some(name), _) => {
                    let fam = sc.family(name)?;
                    let fam = match range {
                        Some(r) => fam.with_range(r)?,
                        None => fam.clone(),
                    };
                    evaluate_family(&ctx, name, &fam)?
                }
                (None, Some(axis)) => {
                    let axis = sc.variable_index(axis)?;
                    let pins = pins
                        .iter()
                        .map(|p| parse_pin(p, sc))
                        .collect::<Result<Vec<_>>>()?;
                    family_search_in(&ctx, axis, range.unwrap_or(DEFAULT_FAMILY_RANGE), &pins)?
                }
                (None, None) => return Err(Error::Usage("give --family or --auto-axis".into())),
            };
            Ok(family_output(&witness, v.variables()))
        }
        Command::Sample { cap, .. } => {
            let ctx = ContactContext::new(&sc.variety()?, settings)?;
            sample(&ctx, cap.unwrap_or(settings.cap))
        }
        Command::Verify { .. } => verify(sc, settings),
    }
}

fn rat_str(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn parse_range(text: &str) -> Result<(i64, i64)> {
    let bad = || Error::Usage(format!("range must look like a..b, got '{text}'"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let lo: i64 = a.trim().parse().map_err(|_| bad())?;
    let hi: i64 = b.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_pin(text: &str, sc: &Scenario) -> Result<Pin> {
    let (var, lin) = text
        .split_once('=')
        .ok_or_else(|| Error::Usage(format!("pin must look like var=lin, got '{text}'")))?;
    let var = sc.variable_index(var.trim())?;
    let exponent = parse_linear_exponent(lin)
        .map_err(|e| Error::Usage(format!("pin '{text}': {e}")))?;
    Ok(Pin { var, exponent })
}

fn algebra_records(g: &WeightedAlgebra) -> Vec<Value> {
    g.generators()
        .iter()
        .map(|gen| {
            json!({
                "poly": gen.poly.display(g.variables()).to_string(),
                "weight": gen.weight,
            })
        })
        .collect()
}

fn algebra_table(out: &mut String, g: &WeightedAlgebra) {
    let _ = writeln!(out, "  weight  generator");
    for gen in g.generators() {
        let _ = writeln!(out, "  {:<6}  {}", gen.weight, gen.poly.display(g.variables()));
    }
}

fn closure(v: &Variety, settings: Settings) -> Result<Output> {
    let ctx = ContactContext::new(v, settings)?;
    let g = ctx.closure();
    let ord = ord_at_origin(g).to_string();
    let tau = tau_lower_bound(g);
    let mut record = json!({
        "generators": algebra_records(g),
        "ord": ord,
        "tau": tau,
        "elimination": Value::Null,
        "sharp_bound": Value::Null,
    });
    let mut table = String::new();
    let weights: Vec<String> = v.weights().iter().map(u32::to_string).collect();
    let _ = writeln!(table, "closure (input weights {})", weights.join(", "));
    algebra_table(&mut table, g);
    let _ = writeln!(table, "ord at origin: {ord}");
    let _ = writeln!(table, "tau >= {tau}");
    if let Some((dropped, e)) = ctx.elimination() {
        let names: Vec<String> = dropped.iter().map(|&i| v.variables()[i].clone()).collect();
        let eord = ord_at_origin(e).to_string();
        record["elimination"] = json!({
            "dropped": names,
            "generators": algebra_records(e),
            "ord": eord,
        });
        let _ = writeln!(table, "elimination of {}:", names.join(", "));
        algebra_table(&mut table, e);
        let _ = writeln!(table, "ord at origin: {eord}");
    }
    if let Some(sb) = sharp_bound(g) {
        let kept = &v.variables()[sb.kept];
        record["sharp_bound"] = json!({
            "kept": kept,
            "generators": algebra_records(&sb.eliminated),
            "bound": rat_str(&sb.bound),
        });
        let _ = writeln!(table, "elimination down to {kept}:");
        algebra_table(&mut table, &sb.eliminated);
        let _ = writeln!(table, "sharp bound: {}", format_rational(&sb.bound));
    }
    Ok(Output::ok(vec![record], table))
}

fn contact_record(r: &ContactReport) -> Value {
    json!({
        "ord": r.ord_phi.to_string(),
        "r": rat_str(&r.r),
        "r_bar": rat_str(&r.r_bar),
        "rho": r.rho,
        "rho_bar": rat_str(&r.rho_bar),
    })
}

fn contact(v: &Variety, arc: &Arc, settings: Settings) -> Result<Output> {
    let r = ContactContext::new(v, settings)?.report(arc)?;
    let mut table = String::new();
    let _ = writeln!(table, "arc     {arc}");
    let _ = writeln!(table, "ord     {}", r.ord_phi);
    let _ = writeln!(table, "r       {}", format_rational(&r.r));
    let _ = writeln!(table, "r_bar   {}", format_rational(&r.r_bar));
    let _ = writeln!(table, "rho     {} ({})", r.rho, r.rho_source.as_str());
    let _ = writeln!(table, "rho_bar {}", format_rational(&r.rho_bar));
    Ok(Output::ok(vec![contact_record(&r)], table))
}

fn termination_str(t: Termination) -> &'static str {
    match t {
        Termination::FirstDrop => "first_drop",
        Termination::Smooth => "smooth",
        Termination::MaxSteps => "max_steps",
    }
}

fn nash(v: &Variety, arc: &Arc, full: bool, settings: Settings) -> Result<Output> {
    if !v.is_hypersurface() {
        return Err(Error::NotHypersurface(v.polynomials().len()));
    }
    let mut opts = settings.nash_options();
    opts.stop_at_first_drop = !full;
    let trace = nash_sequence(&v.polynomials()[0], arc, opts)?;
    let mut names = v.variables().to_vec();
    names.push("w".into());
    Ok(nash_output(&trace, &names, full))
}

fn nash_output(trace: &NashTrace, names: &[String], full: bool) -> Output {
    let rho = trace.first_drop();
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "step": i + 1,
                "chart": names[s.chart],
                "center": s.center.iter().map(rat_str).collect::<Vec<_>>(),
                "multiplicity": s.multiplicity,
                "strict_transform": s.strict_transform.display(names).to_string(),
            })
        })
        .collect();
    let record = json!({
        "m": trace.m,
        "rho": rho,
        "terminated": termination_str(trace.terminated),
        "steps": steps,
    });
    let mut table = String::new();
    let _ = writeln!(table, "step  chart  m");
    let _ = writeln!(table, "{:<4}  {:<5}  {}", 0, "-", trace.m[0]);
    for (i, s) in trace.steps.iter().enumerate() {
        let _ = writeln!(table, "{:<4}  {:<5}  {}", i + 1, names[s.chart], s.multiplicity);
    }
    match rho {
        Some(r) => {
            let _ = writeln!(table, "rho = {r}");
        }
        None => {
            let _ = writeln!(table, "no drop ({})", termination_str(trace.terminated));
        }
    }
    let failure = (!full && trace.terminated == Termination::MaxSteps)
        .then(|| Error::MaxStepsExceeded(Box::new(trace.clone())));
    Output {
        records: vec![record],
        table,
        failure,
    }
}

fn exponent_map(names: &[String], exps: &[u32]) -> Value {
    let mut m = Map::new();
    for (n, e) in names.iter().zip(exps) {
        m.insert(n.clone(), json!(e));
    }
    Value::Object(m)
}

fn isolated(v: &Variety, verdict: IsolatedVerdict) -> Output {
    let names = v.variables();
    let mut table = String::new();
    let _ = writeln!(table, "verdict: {}", verdict.label());
    let record = match &verdict {
        IsolatedVerdict::Isolated(e) => {
            let _ = writeln!(table, "Q = {}", e.q);
            let pows: Vec<String> = names
                .iter()
                .zip(&e.exponents)
                .map(|(n, a)| format!("{n}^{a}"))
                .collect();
            let _ = writeln!(table, "in I1: {}", pows.join(", "));
            let _ = writeln!(table, "tau >= {}", e.tau);
            if let Some(s) = &e.sharp {
                let _ = writeln!(
                    table,
                    "sharp bound along {}: {}",
                    names[s.kept],
                    format_rational(&s.bound)
                );
            }
            if let Some(s) = &e.sample {
                let _ = writeln!(
                    table,
                    "sample (cap {}): {} arcs, max r_bar {}, above Q: {}",
                    s.cap,
                    s.entries.len(),
                    s.max_observed().map_or("-".into(), format_rational),
                    e.violations()
                );
            }
            json!({
                "verdict": verdict.label(),
                "q": e.q,
                "exponents": exponent_map(names, &e.exponents),
                "tau": e.tau,
                "sharp_bound": e.sharp.as_ref().map(|s| json!({
                    "kept": names[s.kept],
                    "bound": rat_str(&s.bound),
                })),
                "sample": e.sample.as_ref().map(|s| json!({
                    "cap": s.cap,
                    "count": s.entries.len(),
                    "max": s.max_observed().map(rat_str),
                    "above_q": e.violations(),
                })),
            })
        }
        IsolatedVerdict::NotIsolated(e) => {
            let _ = writeln!(table, "axis: {}", names[e.axis]);
            if let Some(w) = &e.witness {
                table.push_str(&family_table(w, names));
            }
            if let Some(n) = &e.note {
                let _ = writeln!(table, "note: {n}");
            }
            json!({
                "verdict": verdict.label(),
                "axis": names[e.axis],
                "witness": e.witness.as_ref().map(|w| family_record(w, names)),
                "note": e.note,
            })
        }
        IsolatedVerdict::Unknown(reason) => {
            let _ = writeln!(table, "reason: {reason}");
            json!({"verdict": verdict.label(), "reason": reason})
        }
    };
    Output::ok(vec![record], table)
}

fn family_images(w: &FamilyWitness, names: &[String]) -> Map<String, Value> {
    let mut m = Map::new();
    for (v, img) in w.family.images().iter().enumerate() {
        if let Some(img) = img {
            let coeff = if img.coeff == Rational::from_integer(1.into()) {
                String::new()
            } else {
                format!("{}*", format_rational(&img.coeff))
            };
            m.insert(names[v].clone(), json!(format!("{coeff}t^({})", img.exponent)));
        }
    }
    m
}

fn family_record(w: &FamilyWitness, names: &[String]) -> Value {
    let (lo, hi) = w.family.range();
    let rows: Vec<Value> = w
        .rows
        .iter()
        .map(|row| {
            let mut rec = contact_record(&row.report);
            rec["n"] = json!(row.n);
            rec["arc"] = json!(row.arc.to_string());
            rec
        })
        .collect();
    json!({
        "family": w.name,
        "images": family_images(w, names),
        "range": [lo, hi],
        "r_bar_increasing": w.r_bar_increasing(),
        "rows": rows,
    })
}

fn family_table(w: &FamilyWitness, names: &[String]) -> String {
    let mut t = String::new();
    let images: Vec<String> = family_images(w, names)
        .into_iter()
        .map(|(k, v)| format!("{k} -> {}", v.as_str().unwrap_or_default()))
        .collect();
    let _ = writeln!(t, "family {}: {}", w.name, images.join(", "));
    let _ = writeln!(t, "  N    ord  r        r_bar    rho");
    for row in &w.rows {
        let r = &row.report;
        let _ = writeln!(
            t,
            "  {:<4} {:<4} {:<8} {:<8} {}",
            row.n,
            r.ord_phi,
            format_rational(&r.r),
            format_rational(&r.r_bar),
            r.rho
        );
    }
    let _ = writeln!(
        t,
        "r_bar strictly increasing: {}",
        if w.r_bar_increasing() { "yes" } else { "no" }
    );
    t
}

fn family_output(w: &FamilyWitness, names: &[String]) -> Output {
    Output::ok(vec![family_record(w, names)], family_table(w, names))
}

fn sample(ctx: &ContactContext, cap: u32) -> Result<Output> {
    let s = phi_sample(ctx, cap)?;
    let names = ctx.variety().variables();
    let mut histogram: Vec<(Rational, usize)> = Vec::new();
    let mut values: Vec<&Rational> = s.entries.iter().map(|e| &e.r_bar).collect();
    values.sort();
    for v in values {
        match histogram.last_mut() {
            Some((last, n)) if last == v => *n += 1,
            _ => histogram.push((v.clone(), 1)),
        }
    }
    let record = json!({
        "cap": s.cap,
        "count": s.entries.len(),
        "in_max_mult": s.in_max_mult,
        "truncated": s.truncated,
        "min": s.min_observed().map(rat_str),
        "max": s.max_observed().map(rat_str),
        "argmax": s.argmax().map(|e| exponent_map(names, &e.exponents)),
        "histogram": histogram
            .iter()
            .map(|(v, n)| json!({"r_bar": rat_str(v), "count": n}))
            .collect::<Vec<_>>(),
    });
    let mut table = String::new();
    let _ = writeln!(
        table,
        "{} arcs with exponents in [1, {}]{}",
        s.entries.len(),
        s.cap,
        if s.truncated { " (truncated)" } else { "" }
    );
    if s.in_max_mult > 0 {
        let _ = writeln!(table, "{} arcs inside the maximum multiplicity locus", s.in_max_mult);
    }
    let _ = writeln!(table, "  r_bar    count");
    for (v, n) in &histogram {
        let _ = writeln!(table, "  {:<8} {n}", format_rational(v));
    }
    if let Some(e) = s.argmax() {
        let exps: Vec<String> = e.exponents.iter().map(u32::to_string).collect();
        let _ = writeln!(
            table,
            "max r_bar {} at exponents ({})",
            format_rational(&e.r_bar),
            exps.join(", ")
        );
    }
    Ok(Output::ok(vec![record], table))
}

fn verify(sc: &Scenario, settings: Settings) -> Result<Output> {
    let v = sc.variety()?;
    let ctx = ContactContext::new(&v, settings)?;
    let mut arcs: Vec<(String, Arc)> = sc
        .arcs
        .iter()
        .map(|a| (a.name.clone(), a.arc.clone()))
        .collect();
    for f in &sc.families {
        let (lo, hi) = f.family.range();
        for n in lo..=hi {
            arcs.push((format!("{}[N={n}]", f.name), f.family.instantiate(n)?));
        }
    }
    if arcs.is_empty() {
        return Err(Error::Usage("the scenario declares no arcs or families".into()));
    }
    let mut records = Vec::new();
    let mut table = String::new();
    let _ = writeln!(table, "arc            r        floor  rho  elim  nash  result");
    let mut failed = Vec::new();
    for (name, arc) in &arcs {
        let ver: Verification = ctx.verify(arc)?;
        let r = &ver.report;
        let elim = r.elimination.as_ref().map(|e| e.consistent());
        let nash_ok = ver.nash.as_ref().map(|n| {
            n.weakly_decreasing && n.starts_at_order && n.first_drop_shape && n.charts_agree
        });
        if !ver.passed() {
            failed.push(name.clone());
        }
        let flag = |b: Option<bool>| match b {
            Some(true) => "ok",
            Some(false) => "FAIL",
            None => "-",
        };
        let _ = writeln!(
            table,
            "{:<14} {:<8} {:<6} {:<4} {:<5} {:<5} {}",
            name,
            format_rational(&r.r),
            r.floor_r,
            r.rho,
            flag(elim),
            flag(nash_ok),
            if ver.passed() { "pass" } else { "FAIL" }
        );
        records.push(json!({
            "arc": name,
            "r": rat_str(&r.r),
            "floor_r": r.floor_r,
            "rho": r.rho,
            "rho_source": r.rho_source.as_str(),
            "rho_matches_floor": ver.rho_matches_floor(),
            "elimination_consistent": elim,
            "nash_consistent": nash_ok,
            "passed": ver.passed(),
        }));
    }
    let failure = (!failed.is_empty())
        .then(|| Error::OracleMismatch(format!("checks failed on {}", failed.join(", "))));
    Ok(Output {
        records,
        table,
        failure,
    })
}
