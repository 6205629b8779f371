//! Command-line front end.
//!
//! Tables are printed as TSV, reports as pretty JSON. Exit codes: 0 success,
//! 1 invalid input, 2 inconclusive, 3 failed internal verification.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cremona::{degree_sequence, parse_map, CremonaMap};
use crate::error::{Error, Result};
use crate::fields::Field;
use crate::fixpoint::{decent_fixpoint_with, verify_report, GroupSpec, Horizons, Outcome};
use crate::growth::{classify_growth, degree_table, growth_summary, DegreeTable, Element, GrowthClass, DEFAULT_BALL_BUDGET};
use crate::halphen::{
    check_parabolic_system, closed_form_degree, finite_order_on_quotient, halphen_coefficients, push_forward_degree,
    HalphenSystem,
};
use crate::jonquieres::{parse_jonq, JonqElem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cremona", version, about = "Exact computations in the plane Cremona and Jonquières groups")]
pub struct Cli {
    /// JSON job file with field, generators and parameters.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Q, F_p or Q(sqrt(d)).
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Certificate horizon for fixed-point searches.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Largest power or ball radius.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// f₁∘f₂∘…, printed in homogeneous form.
    Compose { maps: Vec<String> },
    /// Degree of a map.
    Deg { map: String },
    /// n and deg(fⁿ), one row per n.
    Powers { map: String },
    /// n, |B_T(n)| and D_T(n).
    Ball { gens: Vec<String> },
    /// Degree table and growth verdict.
    Growth { gens: Vec<String> },
    /// Element type of a single map from its degree sequence and, for
    /// Jonquières maps, a fixed-point search for the cyclic group.
    Classify { map: Option<String> },
    /// Fixed vertex or certificate for a Jonquières group.
    Fixpoint { gens: Vec<String> },
    /// Validate a lattice system and tabulate its degrees.
    Halphen { system: Option<PathBuf> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum FieldSpec {
    Q,
    Fp(u64),
    QuadExt(i64),
}

impl FieldSpec {
    pub fn field(self) -> Result<Field> {
        match self {
            FieldSpec::Q => Ok(Field::Rational),
            FieldSpec::Fp(p) => Field::prime(p),
            FieldSpec::QuadExt(d) => Field::quad(d),
        }
    }
}

/// Accepts `Q`, `F_7`, `F7`, `Q(sqrt(2))` and `Q(sqrt2)`.
pub fn parse_field(text: &str) -> Result<Field> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t == "Q" {
        return Ok(Field::Rational);
    }
    if let Some(p) = t.strip_prefix("F_").or_else(|| t.strip_prefix('F')) {
        return Field::prime(p.parse().map_err(|_| Error::invalid(format!("bad prime in field {text}")))?);
    }
    if let Some(rest) = t.strip_prefix("Q(sqrt").and_then(|r| r.strip_suffix(')')) {
        let d = rest.trim_start_matches('(').trim_end_matches(')');
        return Field::quad(d.parse().map_err(|_| Error::invalid(format!("bad radicand in field {text}")))?);
    }
    Err(Error::invalid(format!("unknown field {text}")))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GenSpec {
    Map(String),
    WithInverse { map: String, inverse: String },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Generators {
    Named(BTreeMap<String, GenSpec>),
    List(Vec<GenSpec>),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub field: Option<FieldSpec>,
    pub generators: Option<Generators>,
    pub horizon: Option<usize>,
    pub n_max: Option<usize>,
    pub ball_budget: Option<usize>,
    pub system: Option<HalphenSystem>,
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) => EXIT_VERIFICATION,
        _ => EXIT_INVALID,
    }
}

struct Job {
    field: Field,
    gens: Vec<(String, String, Option<String>)>,
    horizon: Option<usize>,
    n_max: Option<usize>,
    budget: usize,
    system: Option<HalphenSystem>,
}

fn name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{i}")
    }
}

/// `name=MAP`, `MAP | INVERSE` or plain `MAP`.
fn split_generator(i: usize, text: &str) -> (String, String, Option<String>) {
    let (n, rest) = match text.split_once('=') {
        Some((n, r)) if !n.trim().is_empty() && n.trim().chars().all(|c| c.is_alphanumeric() || c == '_') => {
            (n.trim().to_string(), r)
        }
        _ => (name(i), text),
    };
    match rest.split_once('|') {
        Some((m, inv)) => (n, m.trim().to_string(), Some(inv.trim().to_string())),
        None => (n, rest.trim().to_string(), None),
    }
}

fn load_job(cli: &Cli, positional: &[String]) -> Result<Job> {
    let cfg: JobConfig = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::invalid(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::invalid(format!("bad config: {e}")))?
        }
        None => JobConfig::default(),
    };
    let field = match (&cli.field, cfg.field) {
        (Some(f), _) => parse_field(f)?,
        (None, Some(f)) => f.field()?,
        (None, None) => Field::Rational,
    };
    let gens = if !positional.is_empty() {
        positional.iter().enumerate().map(|(i, s)| split_generator(i, s)).collect()
    } else {
        let spec = |n: String, g: GenSpec| match g {
            GenSpec::Map(m) => (n, m, None),
            GenSpec::WithInverse { map, inverse } => (n, map, Some(inverse)),
        };
        match cfg.generators {
            Some(Generators::Named(m)) => m.into_iter().map(|(n, g)| spec(n, g)).collect(),
            Some(Generators::List(v)) => v.into_iter().enumerate().map(|(i, g)| spec(name(i), g)).collect(),
            None => Vec::new(),
        }
    };
    Ok(Job {
        field,
        gens,
        horizon: cli.horizon.or(cfg.horizon),
        n_max: cli.nmax.or(cfg.n_max),
        budget: cfg.ball_budget.unwrap_or(DEFAULT_BALL_BUDGET),
        system: cfg.system,
    })
}

impl Job {
    fn need_gens(&self) -> Result<()> {
        if self.gens.is_empty() {
            return Err(Error::invalid("no generators given"));
        }
        Ok(())
    }

    fn jonquieres(&self) -> Result<Vec<JonqElem>> {
        self.gens.iter().map(|(_, m, _)| parse_jonq(m, self.field)).collect()
    }

    fn cremona(&self, (_, m, inv): &(String, String, Option<String>)) -> Result<CremonaMap> {
        let f = parse_map(m, self.field)?;
        match inv {
            Some(i) => f.with_inverse(parse_map(i, self.field)?),
            None => Ok(f),
        }
    }

    fn cremonas(&self) -> Result<Vec<CremonaMap>> {
        self.gens.iter().map(|g| self.cremona(g)).collect()
    }

    fn group(&self) -> Result<GroupSpec> {
        self.need_gens()?;
        GroupSpec::new(self.gens.iter().map(|g| g.0.clone()).collect(), self.jonquieres()?)
    }
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Verification(format!("serialization: {e}")))
}

fn big(n: &BigInt) -> Value {
    n.to_i64().map_or_else(|| Value::String(n.to_string()), Value::from)
}

fn rat(r: &BigRational) -> Value {
    if r.is_integer() {
        big(&r.to_integer())
    } else {
        Value::String(r.to_string())
    }
}

/// Ball and degree table, over Jonquières elements when every generator is
/// one and over Cremona maps with supplied inverses otherwise.
fn table_for(job: &Job, n_max: usize) -> Result<(DegreeTable, Vec<usize>)> {
    job.need_gens()?;
    fn run<E: Element + std::fmt::Display>(gens: &[E], n: usize, budget: usize) -> Result<(DegreeTable, Vec<usize>)> {
        let t = degree_table(gens, n, budget)?;
        let sizes = t.sizes.clone();
        Ok((t, sizes))
    }
    match job.jonquieres() {
        Ok(gens) => run(&gens, n_max, job.budget),
        Err(Error::NotJonquieres) => run(&job.cremonas()?, n_max, job.budget),
        Err(e) => Err(e),
    }
}

fn compose(job: &Job) -> Result<String> {
    job.need_gens()?;
    let maps = job.cremonas()?;
    let mut acc = maps[0].clone();
    for m in &maps[1..] {
        acc = acc.compose(m)?;
    }
    Ok(format!("{acc}\n"))
}

fn powers(job: &Job) -> Result<String> {
    job.need_gens()?;
    let f = job.cremona(&job.gens[0])?;
    let seq = degree_sequence(&f, job.n_max.unwrap_or(10))?;
    Ok(seq.degrees.iter().enumerate().map(|(i, d)| format!("{}\t{d}\n", i + 1)).collect())
}

fn ball_table(job: &Job) -> Result<String> {
    let (t, sizes) = table_for(job, job.n_max.unwrap_or(6))?;
    Ok(t.rows.iter().zip(sizes).map(|((n, d), s)| format!("{n}\t{s}\t{d}\n")).collect())
}

fn growth(job: &Job) -> Result<(String, bool)> {
    let (t, _) = table_for(job, job.n_max.unwrap_or(8))?;
    let v = classify_growth(&t)?;
    let mut s = growth_summary(&t, &v);
    if let Some(b) = t.base_point_bound {
        s["base_point_bound"] = Value::Bool(b);
    }
    Ok((pretty(&s)?, v.class == GrowthClass::Inconclusive))
}

fn horizons(job: &Job) -> Horizons {
    let mut h = Horizons::default();
    if let Some(c) = job.horizon {
        h.certificate = c;
    }
    h
}

fn fixpoint(job: &Job) -> Result<(String, bool)> {
    let g = job.group()?;
    let hz = horizons(job);
    let report = decent_fixpoint_with(&g, hz)?;
    if !report.is_inconclusive() && !verify_report(&g, &report, hz.certificate)? {
        return Err(Error::Verification("the report did not re-verify".into()));
    }
    Ok((pretty(&report)?, report.is_inconclusive()))
}

/// Element-type labels of the degree-growth classification.
fn label(c: &GrowthClass) -> Option<&'static str> {
    match c {
        GrowthClass::Bounded => Some("elliptic"),
        GrowthClass::Linear => Some("parabolic, rational fibration"),
        GrowthClass::Quadratic => Some("parabolic, genus one fibration"),
        GrowthClass::Exponential { .. } => Some("loxodromic"),
        GrowthClass::Inconclusive => None,
    }
}

fn classify(job: &Job) -> Result<(String, bool)> {
    job.need_gens()?;
    let (n0, m, _) = &job.gens[0];
    let f = job.cremona(&job.gens[0])?;
    let n_max = job.n_max.unwrap_or(10).max(6);
    let seq = degree_sequence(&f, n_max)?;
    let mut rows = vec![(0, 1)];
    rows.extend(seq.degrees.iter().enumerate().map(|(i, &d)| (i + 1, d)));
    let table = DegreeTable {
        rows,
        generators: vec![f.to_string()],
        fingerprint: String::new(),
        sizes: Vec::new(),
        base_point_bound: None,
    };
    let verdict = classify_growth(&table)?;
    let mut out = json!({
        "map": f.to_string(),
        "degrees": seq.degrees,
        "growth": verdict,
    });
    let mut lbl = label(&verdict.class);
    match parse_jonq(m, job.field) {
        Ok(j) => {
            let g = GroupSpec::new(vec![n0.clone()], vec![j])?;
            let report = decent_fixpoint_with(&g, horizons(job))?;
            let elliptic = match &report.outcome {
                Outcome::FixedVertex { .. } => Some(true),
                Outcome::NoFixedPoint { .. } => Some(false),
                Outcome::Inconclusive { .. } => None,
            };
            let bounded = verdict.class == GrowthClass::Bounded;
            match (elliptic, lbl) {
                (Some(e), Some(_)) if e != bounded => {
                    return Err(Error::Verification(format!(
                        "fixed-point search and degree growth disagree for {m}"
                    )))
                }
                (Some(true), None) => lbl = label(&GrowthClass::Bounded),
                _ => {}
            }
            out["fixpoint"] = serde_json::to_value(&report).map_err(|e| Error::Verification(e.to_string()))?;
        }
        Err(Error::NotJonquieres) => {}
        Err(e) => return Err(e),
    }
    out["label"] = lbl.map_or(Value::Null, Value::from);
    Ok((pretty(&out)?, lbl.is_none()))
}

fn halphen(job: &Job, path: Option<&PathBuf>) -> Result<String> {
    let sys = match (path, &job.system) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::invalid(format!("{}: {e}", p.display())))?;
            HalphenSystem::from_json(&text)?
        }
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(Error::invalid("no lattice system given")),
    };
    let sys = check_parabolic_system(&sys).map_err(|v| {
        Error::invalid(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "))
    })?;
    let c = halphen_coefficients(&sys)?;
    let k = sys.autos.len();
    let n_max = job.n_max.unwrap_or(10) as i64;
    // each axis, then the diagonal when there are several autos
    let mut dirs: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
    if k > 1 {
        dirs.push(vec![1; k]);
    }
    let mut rows = Vec::new();
    for d in &dirs {
        for n in 0..=n_max {
            let e: Vec<i64> = d.iter().map(|x| x * n).collect();
            let closed = closed_form_degree(&sys, &e)?;
            let pushed = push_forward_degree(&sys, &e)?;
            if closed != pushed {
                return Err(Error::Verification(format!("closed form and push-forward differ at {e:?}")));
            }
            rows.push(json!({ "n": e, "degree": big(&closed) }));
        }
    }
    let orders = sys
        .autos
        .iter()
        .map(|f| finite_order_on_quotient(f, &sys))
        .collect::<Result<Vec<_>>>()?;
    let out = json!({
        "rank": sys.rank(),
        "r": c.r.iter().map(|v| v.iter().map(big).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "t": c.t.iter().map(|row| row.iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "quotient_orders": orders,
        "degrees": rows,
    });
    pretty(&out)
}

fn dispatch(cli: &Cli) -> Result<(String, bool)> {
    let positional: Vec<String> = match &cli.command {
        Command::Compose { maps } => maps.clone(),
        Command::Deg { map } | Command::Powers { map } => vec![map.clone()],
        Command::Classify { map } => map.iter().cloned().collect(),
        Command::Ball { gens } | Command::Growth { gens } | Command::Fixpoint { gens } => gens.clone(),
        Command::Halphen { .. } => Vec::new(),
    };
    let job = load_job(cli, &positional)?;
    let done = |s: String| Ok((s, false));
    match &cli.command {
        Command::Compose { .. } => done(compose(&job)?),
        Command::Deg { .. } => {
            job.need_gens()?;
            done(format!("{}\n", job.cremona(&job.gens[0])?.degree()))
        }
        Command::Powers { .. } => done(powers(&job)?),
        Command::Ball { .. } => done(ball_table(&job)?),
        Command::Growth { .. } => growth(&job),
        Command::Classify { .. } => classify(&job),
        Command::Fixpoint { .. } => fixpoint(&job),
        Command::Halphen { system } => done(halphen(&job, system.as_ref())?),
    }
}

pub fn execute(cli: &Cli) -> Execution {
    match dispatch(cli) {
        Ok((text, inconclusive)) => {
            let code = if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK };
            match &cli.out {
                Some(p) => match std::fs::write(p, &text) {
                    Ok(()) => Execution { code, stdout: String::new(), stderr: String::new() },
                    Err(e) => Execution {
                        code: EXIT_INVALID,
                        stdout: String::new(),
                        stderr: format!("error: {}: {e}\n", p.display()),
                    },
                },
                None => Execution { code, stdout: text, stderr: String::new() },
            }
        }
        Err(e) => Execution { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Parses arguments and runs; argument errors exit with code 1 (help and
/// version with 0).
pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Execution { code, stdout: text, stderr: String::new() }
            } else {
                Execution { code, stdout: String::new(), stderr: text }
            }
        }
    }
}
