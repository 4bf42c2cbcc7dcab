use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use mulrep::detforms::{self, DetError, DetFormInstance};
use mulrep::form::{nu, MultilinearForm, ProductForm};
use mulrep::intlinalg::{determinant, smith_normal_form, IntMatrix};
use mulrep::oracle::{self, OracleError, ProbeConfig, SearchConfig, Target, DEFAULT_BUDGET};
use mulrep::solver::{self, AutoOptions, Method, SolveError};
use mulrep::Execution;
use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Map, Value};

pub const BUDGET_VAR: &str = "MULREP_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Solved,
    Success,
    Unrepresentable,
    Obstructed,
    Unknown,
}

impl Outcome {
    fn name(self) -> &'static str {
        match self {
            Outcome::Solved => "solved",
            Outcome::Success => "success",
            Outcome::Unrepresentable => "unrepresentable",
            Outcome::Obstructed => "obstructed",
            Outcome::Unknown => "unknown",
        }
    }

    fn exit_code(self) -> u8 {
        match self {
            Outcome::Solved | Outcome::Success => 0,
            Outcome::Unrepresentable | Outcome::Obstructed => 1,
            Outcome::Unknown => 2,
        }
    }
}

pub struct CommandResult {
    outcome: Outcome,
    payload: Map<String, Value>,
    text: Vec<String>,
    /// Output was already written line by line.
    streamed: bool,
}

impl CommandResult {
    fn new(outcome: Outcome) -> Self {
        CommandResult {
            outcome,
            payload: Map::new(),
            text: vec![format!("outcome: {}", outcome.name())],
            streamed: false,
        }
    }

    fn field(mut self, key: &str, json: Value, text: impl Display) -> Self {
        self.text.push(format!("{}: {}", key.replace('_', " "), text));
        self.payload.insert(key.to_string(), json);
        self
    }

    fn json_only(mut self, key: &str, json: Value) -> Self {
        self.payload.insert(key.to_string(), json);
        self
    }

    fn line(mut self, text: impl Display) -> Self {
        self.text.push(text.to_string());
        self
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("outcome".into(), json!(self.outcome.name()));
        obj.extend(self.payload.clone());
        Value::Object(obj)
    }

    pub fn emit(self, json: bool, out: Option<&Path>) -> ExitCode {
        let report = self.to_json();
        if !self.streamed {
            if json {
                println!("{report}");
            } else {
                for line in &self.text {
                    println!("{line}");
                }
            }
        }
        if let Some(path) = out {
            let body = serde_json::to_string_pretty(&report).expect("serializable");
            if let Err(e) = fs::write(path, body + "\n") {
                return CliError::input(format!("cannot write {}: {e}", path.display())).report(json);
            }
        }
        ExitCode::from(self.outcome.exit_code())
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Verification(String),
}

impl CliError {
    pub fn input(e: impl Display) -> Self {
        CliError::Input(e.to_string())
    }

    fn verification(e: impl Display) -> Self {
        CliError::Verification(e.to_string())
    }

    pub fn report(&self, json: bool) -> ExitCode {
        let (kind, msg, code) = match self {
            CliError::Input(m) => ("input", m, 3),
            CliError::Verification(m) => ("verification", m, 4),
        };
        if json {
            println!("{}", json!({"outcome": "error", "kind": kind, "message": msg}));
        }
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

pub struct Context {
    pub search: SearchConfig,
    pub json: bool,
}

impl Context {
    pub fn from_env(json: bool, sequential: bool) -> Result<Self, CliError> {
        let budget = match std::env::var(BUDGET_VAR) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::input(format!("{BUDGET_VAR} must be a nonnegative integer, got {v:?}")))?,
            Err(_) => DEFAULT_BUDGET,
        };
        let execution = if sequential {
            Execution::Sequential
        } else {
            Execution::default()
        };
        Ok(Context {
            search: SearchConfig { budget, execution },
            json,
        })
    }
}

fn read_arg(text: &str) -> Result<String, CliError> {
    match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

fn parse_form(text: &str) -> Result<MultilinearForm, CliError> {
    MultilinearForm::parse_any(&read_arg(text)?).map_err(CliError::input)
}

fn parse_matrix(text: &str) -> Result<IntMatrix, CliError> {
    IntMatrix::parse_any(&read_arg(text)?).map_err(CliError::input)
}

fn parse_int(text: &str) -> Result<BigInt, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::input(format!("not an integer: {text:?}")))
}

fn parse_vector(text: &str) -> Result<Vec<BigInt>, CliError> {
    text.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(parse_int)
        .collect()
}

enum Input {
    Form(MultilinearForm),
    Product(ProductForm),
}

impl Input {
    fn target(&self) -> Target<'_> {
        match self {
            Input::Form(f) => Target::Form(f),
            Input::Product(p) => Target::Product(p),
        }
    }

    fn evaluate(&self, a: &[BigInt]) -> Result<BigInt, CliError> {
        match self {
            Input::Form(f) => f.evaluate(a),
            Input::Product(p) => p.evaluate(a),
        }
        .map_err(CliError::input)
    }

    fn describe(&self) -> String {
        match self {
            Input::Form(f) => f.to_string(),
            Input::Product(p) => p.to_string(),
        }
    }
}

fn parse_input(forms: &[String], n: Option<usize>) -> Result<Input, CliError> {
    let parsed = forms.iter().map(|s| parse_form(s)).collect::<Result<Vec<_>, _>>()?;
    let highest = parsed.iter().map(MultilinearForm::max_index).max().unwrap_or(0);
    let n = n.unwrap_or(highest);
    if n < highest {
        return Err(CliError::input(format!("{n} values given but x{highest} is used")));
    }
    if parsed.len() == 1 {
        let f = parsed.into_iter().next().expect("one form");
        Ok(Input::Form(f.with_arity(n).map_err(CliError::input)?))
    } else {
        Ok(Input::Product(ProductForm::new(n, parsed).map_err(CliError::input)?))
    }
}

/// Splits `FORM... B`.
fn forms_and_target(args: &[String]) -> Result<(&[String], BigInt), CliError> {
    let (b, forms) = args
        .split_last()
        .ok_or_else(|| CliError::input("expected forms followed by a target"))?;
    Ok((forms, parse_int(b)?))
}

fn show(a: &[BigInt]) -> String {
    let parts: Vec<String> = a.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn jint(x: &BigInt) -> Value {
    json!(x.to_string())
}

fn jvec(a: &[BigInt]) -> Value {
    Value::Array(a.iter().map(jint).collect())
}

fn jmatrix(m: &IntMatrix) -> Value {
    serde_json::to_value(m.to_json()).expect("serializable")
}

fn show_option(x: Option<&BigInt>) -> String {
    x.map_or_else(|| "none".to_string(), ToString::to_string)
}

/// Re-evaluates before anything is reported as solved.
fn solved(input: &Input, b: &BigInt, a: &[BigInt]) -> Result<CommandResult, CliError> {
    let value = input.evaluate(a)?;
    if &value != b {
        return Err(CliError::verification(format!(
            "solution {} evaluates to {value}, not {b}",
            show(a)
        )));
    }
    Ok(CommandResult::new(Outcome::Solved)
        .field("solution", jvec(a), show(a))
        .field("evaluation", jint(&value), &value)
        .field("b", jint(b), b))
}

fn unknown(radius: &BigInt, reason: &str) -> CommandResult {
    CommandResult::new(Outcome::Unknown)
        .field("reason", json!(reason), reason)
        .field("radius", jint(radius), radius)
}

pub fn solve(
    ctx: &Context,
    form: &str,
    b: &BigInt,
    method: Option<&str>,
    radius: Option<BigInt>,
) -> Result<CommandResult, CliError> {
    let f = parse_form(form)?;
    let opts = AutoOptions {
        radius,
        search: ctx.search,
    };
    let result = match method {
        Some(m) => {
            let m: Method = m.parse().map_err(CliError::input)?;
            solver::solve_with(&f, b, m, &opts)
        }
        None => solver::solve_auto(&f, b, &opts),
    };
    match result {
        Ok(report) => {
            let bound = report.bound_value().cloned();
            let within = report.within_bound();
            Ok(solved(&Input::Form(f), b, report.solution())?
                .field("method", json!(report.method().tag()), report.method())
                .field(
                    "bound_value",
                    bound.as_ref().map_or(Value::Null, jint),
                    show_option(bound.as_ref()),
                )
                .field(
                    "within_bound",
                    json!(within),
                    within.map_or_else(|| "n/a".to_string(), |w| w.to_string()),
                ))
        }
        Err(SolveError::Unrepresentable { gcd, .. }) => Ok(CommandResult::new(Outcome::Unrepresentable)
            .field("gcd", jint(&gcd), &gcd)
            .line(format!("reason: gcd {gcd} of the coefficients does not divide {b}"))),
        Err(SolveError::Unknown { radius, reason }) => {
            let reason = match reason {
                oracle::UnknownReason::NotFound => "not_found",
                oracle::UnknownReason::Budget => "budget",
            };
            Ok(unknown(&radius, reason))
        }
        Err(e @ SolveError::Verification { .. }) => Err(CliError::verification(e)),
        Err(e) => Err(CliError::input(e)),
    }
}

pub fn check(form: &str) -> Result<CommandResult, CliError> {
    let f = parse_form(form)?;
    let profile = f.coprimality_profile();
    let methods = solver::classify(&f);
    let p = solver::factored_parameter(&f);
    let names: Vec<String> = methods
        .iter()
        .map(|m| match (m, &p) {
            (Method::Factored, Some(p)) => format!("prop2(p={p})"),
            _ => m.tag().to_string(),
        })
        .collect();
    let nu_d = nu(f.degree());
    let bound = solver::general_bound(&f, &BigInt::from(1));
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let coprime = num_traits::One::is_one(&profile.overall_gcd);
    Ok(CommandResult::new(Outcome::Success)
        .field("form", json!(f.to_string()), &f)
        .field("n", json!(f.n()), f.n())
        .field("d", json!(f.degree()), f.degree())
        .field("sup_norm", jint(&f.sup_norm()), f.sup_norm())
        .field("gcd", jint(&profile.overall_gcd), &profile.overall_gcd)
        .field("coprime", json!(coprime), yes_no(coprime))
        .field(
            "pairwise_coprime",
            json!(profile.pairwise_coprime),
            yes_no(profile.pairwise_coprime),
        )
        .field(
            "has_coprime_pair",
            json!(profile.has_coprime_pair),
            yes_no(profile.has_coprime_pair),
        )
        .field(
            "methods",
            json!(methods.iter().map(|m| m.tag()).collect::<Vec<_>>()),
            if names.is_empty() {
                "none".to_string()
            } else {
                names.join(", ")
            },
        )
        .json_only("prop2_parameter", p.as_ref().map_or(Value::Null, jint))
        .field("nu", jint(&nu_d), &nu_d)
        .field(
            "bound_for_unit_target",
            bound.as_ref().map_or(Value::Null, jint),
            show_option(bound.as_ref()),
        ))
}

pub fn eval(forms: &[String], at: &str) -> Result<CommandResult, CliError> {
    let a = parse_vector(at)?;
    let input = parse_input(forms, Some(a.len()))?;
    let value = input.evaluate(&a)?;
    Ok(CommandResult::new(Outcome::Success)
        .field("form", json!(input.describe()), input.describe())
        .field("point", jvec(&a), show(&a))
        .field("value", jint(&value), &value))
}

pub fn bound(form: &str, b: &BigInt) -> Result<CommandResult, CliError> {
    let f = parse_form(form)?;
    let nu_d = nu(f.degree());
    let general = solver::general_bound(&f, b);
    let mut result = CommandResult::new(Outcome::Success)
        .field("nu", jint(&nu_d), &nu_d)
        .field(
            "general_bound",
            general.as_ref().map_or(Value::Null, jint),
            general.as_ref().map_or_else(
                || format!("|b| (2|F|)^{nu_d} (too large to print)"),
                ToString::to_string,
            ),
        );
    if f.degree() == 2 {
        let q = solver::quadratic_bound(&f, b);
        result = result.field("quadratic_bound", jint(&q), &q);
    }
    Ok(result)
}

pub fn snf(matrix: &str) -> Result<CommandResult, CliError> {
    let a = parse_matrix(matrix)?;
    let snf = smith_normal_form(&a);
    if snf.reconstruct() != a {
        return Err(CliError::verification("U * S * V does not reproduce the input"));
    }
    let factors: Vec<String> = snf.invariant_factors.iter().map(ToString::to_string).collect();
    Ok(CommandResult::new(Outcome::Success)
        .field("invariant_factors", jvec(&snf.invariant_factors), factors.join(", "))
        .field("rank", json!(snf.rank()), snf.rank())
        .field("u", jmatrix(&snf.u), &snf.u)
        .field("v", jmatrix(&snf.v), &snf.v)
        .line("verified: U * S * V = A"))
}

fn instance(matrix: &str, n: usize) -> Result<DetFormInstance, CliError> {
    DetFormInstance::new(parse_matrix(matrix)?, n).map_err(CliError::input)
}

fn det_error(e: DetError) -> Result<CommandResult, CliError> {
    match e {
        DetError::NotRepresentable { order, gcd } => Ok(CommandResult::new(Outcome::Unrepresentable)
            .field("minor_order", json!(order), order)
            .field("minor_gcd", jint(&gcd), &gcd)),
        e @ (DetError::CompletionFailed { .. } | DetError::BoroshViolated { .. }) => Err(CliError::verification(e)),
        DetError::Search(OracleError::BudgetExceeded { needed, budget }) => {
            Ok(unknown(&BigInt::from(0), "budget")
                .line(format!("search needs {needed} evaluations, budget is {budget}")))
        }
        e => Err(CliError::input(e)),
    }
}

pub fn detsolve(matrix: &str, n: usize, b: &BigInt) -> Result<CommandResult, CliError> {
    let inst = instance(matrix, n)?;
    let sol = match detforms::solve_detform(&inst, b) {
        Ok(sol) => sol,
        Err(e) => return det_error(e),
    };
    let full = sol.assemble(&inst);
    let det = determinant(&full).map_err(CliError::verification)?;
    if &det != b {
        return Err(CliError::verification(format!("determinant {det}, expected {b}")));
    }
    Ok(CommandResult::new(Outcome::Solved)
        .field(
            "x",
            jmatrix(&sol.x),
            if sol.x.rows() == 0 {
                "(empty)".to_string()
            } else {
                sol.x.to_string()
            },
        )
        .field("y", jmatrix(&sol.y), &sol.y)
        .field("matrix", jmatrix(&full), &full)
        .field("evaluation", jint(&det), &det)
        .field("b", jint(b), b))
}

pub fn detbound(matrix: &str, n: usize, b: &BigInt) -> Result<CommandResult, CliError> {
    let inst = instance(matrix, n)?;
    match detforms::detform_bound(&inst, b) {
        Ok(v) => Ok(CommandResult::new(Outcome::Success)
            .field("bound", jint(&v), &v)
            .line("note: informational; solutions are not checked against this value")),
        Err(e) => det_error(e),
    }
}

pub fn prodsolve(ctx: &Context, args: &[String], bounded: bool, n: Option<usize>) -> Result<CommandResult, CliError> {
    let (forms, b) = forms_and_target(args)?;
    let parsed = forms.iter().map(|s| parse_form(s)).collect::<Result<Vec<_>, _>>()?;
    let sol = match detforms::solve_product_linear(&parsed, n, &b, bounded, &ctx.search) {
        Ok(sol) => sol,
        Err(e) => return det_error(e),
    };
    let report = &sol.report;
    let input = Input::Product(ProductForm::new(report.solution().len(), parsed).map_err(CliError::input)?);
    let within = report.within_bound().unwrap_or(false);
    if bounded && !within {
        return Err(CliError::verification("bounded solution exceeds the Borosh radius"));
    }
    Ok(solved(&input, &b, report.solution())?
        .field("method", json!(report.method().tag()), report.method())
        .field("borosh_radius", jint(&sol.borosh_radius), &sol.borosh_radius)
        .field("within_bound", json!(within), within))
}

pub fn search(ctx: &Context, args: &[String], radius: &BigInt) -> Result<CommandResult, CliError> {
    if radius.is_negative() {
        return Err(CliError::input("radius must be nonnegative"));
    }
    let (forms, b) = forms_and_target(args)?;
    let input = parse_input(forms, None)?;
    let found = match &input {
        Input::Form(f) => oracle::box_search(f, &b, radius, &ctx.search),
        Input::Product(p) => oracle::product_box_search(p, &b, radius, &ctx.search),
    };
    match found {
        Ok(Some(a)) => solved(&input, &b, &a),
        Ok(None) => Ok(unknown(radius, "not_found")),
        Err(_) => Ok(unknown(radius, "budget")),
    }
}

pub fn obstruct(ctx: &Context, args: &[String], modulus: Option<u64>, mmax: u64) -> Result<CommandResult, CliError> {
    let (forms, b) = forms_and_target(args)?;
    let input = parse_input(forms, None)?;
    let target = input.target();
    let found = match modulus {
        Some(m) => oracle::modular_obstruction(target, &b, m, &ctx.search),
        None => oracle::find_obstruction(target, &b, mmax, &ctx.search),
    };
    match found {
        Ok(Some(cert)) => {
            if !cert.verify(target) {
                return Err(CliError::verification("certificate failed re-enumeration"));
            }
            Ok(CommandResult::new(Outcome::Obstructed)
                .field("modulus", json!(cert.modulus), cert.modulus)
                .field("target_residue", json!(cert.target_residue), cert.target_residue)
                .line(format!(
                    "no integer point reaches {b} mod {}: {} is not represented",
                    cert.modulus, b
                )))
        }
        Ok(None) => Ok(CommandResult::new(Outcome::Unknown).field("reason", json!("no_obstruction"), "no_obstruction")),
        Err(OracleError::InvalidModulus(m)) => Err(CliError::input(format!("modulus must be at least 2, got {m}"))),
        Err(e) => Ok(CommandResult::new(Outcome::Unknown)
            .field("reason", json!("budget"), "budget")
            .line(e)),
    }
}

pub fn minrep(ctx: &Context, form: &str, b: &BigInt, radius: u64) -> Result<CommandResult, CliError> {
    let f = parse_form(form)?;
    match oracle::minimal_representation(&f, b, radius, &ctx.search) {
        Ok(Some(a)) => {
            let norm = solver::sup_norm(&a);
            Ok(solved(&Input::Form(f), b, &a)?.field("sup_norm", jint(&norm), &norm))
        }
        Ok(None) => Ok(unknown(&BigInt::from(radius), "not_found")),
        Err(_) => Ok(unknown(&BigInt::from(radius), "budget")),
    }
}

pub fn probe(
    ctx: &Context,
    form: &str,
    bmin: &BigInt,
    bmax: &BigInt,
    radius: BigInt,
    mmax: u64,
) -> Result<CommandResult, CliError> {
    if radius.is_negative() {
        return Err(CliError::input("radius must be nonnegative"));
    }
    if bmin > bmax {
        return Err(CliError::input(format!("empty range {bmin}..={bmax}")));
    }
    let f = parse_form(form)?;
    let cfg = ProbeConfig {
        radius: radius.clone(),
        m_max: mmax,
        search: ctx.search,
    };
    let mut entries = Vec::new();
    let stdout = std::io::stdout();
    let mut b = bmin.clone();
    while &b <= bmax {
        let entry = oracle::probe_one(&f, &b, &cfg);
        let line = if ctx.json {
            serde_json::to_string(&entry).expect("serializable")
        } else {
            match &entry.outcome {
                oracle::ProbeOutcome::Solved { solution } => format!("{b}: solved {}", show(solution)),
                oracle::ProbeOutcome::Obstructed { certificate } => {
                    format!("{b}: obstructed mod {}", certificate.modulus)
                }
                oracle::ProbeOutcome::Unknown { reason } => {
                    let reason = match reason {
                        oracle::UnknownReason::NotFound => "not found",
                        oracle::UnknownReason::Budget => "budget",
                    };
                    format!("{b}: unknown ({reason})")
                }
            }
        };
        let mut lock = stdout.lock();
        let _ = writeln!(lock, "{line}");
        let _ = lock.flush();
        entries.push(serde_json::to_value(&entry).expect("serializable"));
        b += 1;
    }
    let mut result = CommandResult::new(Outcome::Success)
        .json_only("entries", Value::Array(entries))
        .json_only("radius", jint(&radius))
        .json_only("modulus_ceiling", json!(mmax));
    result.streamed = true;
    Ok(result)
}
