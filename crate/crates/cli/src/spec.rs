//! Mini-languages for operators, weights and surrogates.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use tailtrace_core::limits::{Direction, LimitSurrogate, SurrogateKind};
use tailtrace_core::rearrange::{Horizon, MatrixOperator, SingularValueList, StepFunction};
use tailtrace_core::traces::OperatorInput;
use tailtrace_core::weights::WeightFunction;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum HorizonJson {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJson {
    horizon: HorizonJson,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ListJson {
    values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Option<Vec<Vec<f64>>>,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn read(path: &str) -> CliResult<String> {
    fs::read_to_string(Path::new(path)).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Parses `1e12`, `0.5`, `inf` and powers such as `2^40`.
pub fn parse_number(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let v = match s.split_once('^') {
        Some((b, e)) => {
            let b: f64 = b.parse().map_err(|_| input(format!("bad number '{s}'")))?;
            let e: f64 = e.parse().map_err(|_| input(format!("bad number '{s}'")))?;
            b.powf(e)
        }
        None if s == "inf" => f64::INFINITY,
        None => s.parse().map_err(|_| input(format!("bad number '{s}'")))?,
    };
    if v.is_nan() {
        return Err(input(format!("bad number '{s}'")));
    }
    Ok(v)
}

fn horizon(h: HorizonJson) -> CliResult<Horizon> {
    let b = match h {
        HorizonJson::Number(b) => b,
        HorizonJson::Text(s) if s == "inf" => f64::INFINITY,
        HorizonJson::Text(s) => return Err(input(format!("horizon must be a number or \"inf\", got \"{s}\""))),
    };
    Ok(Horizon::new(b)?)
}

/// A `file:` operator: a step function or a singular value list.
fn operator_file(path: &str) -> CliResult<OperatorInput> {
    let text = read(path)?;
    if let Ok(s) = serde_json::from_str::<StepJson>(&text) {
        return Ok(OperatorInput::Step(StepFunction::new(horizon(s.horizon)?, s.breakpoints, s.values)?));
    }
    match serde_json::from_str::<ListJson>(&text) {
        Ok(l) => Ok(OperatorInput::List(SingularValueList::new(l.values)?)),
        Err(e) => Err(input(format!("{path}: not a step function or singular value list ({e})"))),
    }
}

fn matrix_file(path: &str) -> CliResult<OperatorInput> {
    let m: MatrixJson = serde_json::from_str(&read(path)?).map_err(|e| input(format!("{path}: {e}")))?;
    if m.re.len() != m.dim || m.im.as_ref().is_some_and(|im| im.len() != m.dim) {
        return Err(input(format!("{path}: expected {} rows", m.dim)));
    }
    Ok(OperatorInput::Matrix(MatrixOperator::from_parts(&m.re, m.im.as_deref())?))
}

/// Resolves an operator spec. `rng` feeds `random-psd:<n>`.
pub fn operator(spec: &str, weight: &WeightFunction, rng: &mut ChaCha8Rng) -> CliResult<OperatorInput> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "file" => operator_file(rest),
        "matrix" => matrix_file(rest),
        "steps" => {
            let values = rest.split(',').map(parse_number).collect::<CliResult<Vec<_>>>()?;
            Ok(OperatorInput::Step(StepFunction::unit_steps(&values)?))
        }
        "mu" if rest == "neg-hprime" => Ok(OperatorInput::neg_hprime(weight.clone())),
        "random-psd" => {
            let n: usize = rest.parse().map_err(|_| input(format!("bad dimension in '{spec}'")))?;
            if n == 0 || n > 64 {
                return Err(input("random-psd dimension must be in 1..=64"));
            }
            Ok(OperatorInput::Matrix(random_psd(rng, n)))
        }
        _ => Err(input(format!("unknown operator spec '{spec}'"))),
    }
}

/// `B·B*` with entries of `B` uniform in `[-1, 1]²`, drawn row by row as
/// (re, im) pairs.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> MatrixOperator {
    use rand::Rng;
    let mut re = vec![vec![0.0; n]; n];
    let mut im = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            re[i][j] = rng.gen_range(-1.0..1.0);
            im[i][j] = rng.gen_range(-1.0..1.0);
        }
    }
    let b = MatrixOperator::from_parts(&re, Some(&im)).expect("square by construction");
    b.mul(&b.adjoint()).expect("same dimension")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weight table: CSV with header `t,h`.
fn weight_table(path: &str) -> CliResult<WeightFunction> {
    let text = read(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut points = Vec::new();
    for row in reader.deserialize::<(f64, f64)>() {
        points.push(row?);
    }
    Ok(WeightFunction::tabulated(points)?)
}

pub fn weight(spec: &str) -> CliResult<WeightFunction> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match (head, rest) {
        ("power", a) => Ok(WeightFunction::power_law(parse_number(a)?)?),
        ("logrec", "") => Ok(WeightFunction::log_reciprocal()),
        ("exp", "") => Ok(WeightFunction::exp_decay()),
        ("papertail", "") => Ok(WeightFunction::paper_tail()),
        ("table", path) => weight_table(path),
        _ => Err(input(format!("unknown weight spec '{spec}'"))),
    }
}

pub fn surrogate(spec: &str, tol: Option<f64>, direction: Direction) -> CliResult<LimitSurrogate> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let kind = match head {
        "logcesaro" => SurrogateKind::LogCesaro,
        "pd" => SurrogateKind::DilationPD,
        "bracket" => SurrogateKind::RawBracket,
        _ => return Err(input(format!("unknown surrogate spec '{spec}'"))),
    };
    let default = LimitSurrogate::new(kind);
    let (mut t, mut a) = (default.final_horizon(), *default.a_grid().last().unwrap_or(&1.0));
    let tol = tol.unwrap_or(default.tol());
    for kv in rest.split(',').filter(|s| !s.is_empty()) {
        match kv.split_once('=') {
            Some(("t", v)) => t = parse_number(v)?,
            Some(("a", v)) if kind == SurrogateKind::DilationPD => a = parse_number(v)?,
            _ => return Err(input(format!("unknown surrogate parameter '{kv}' in '{spec}'"))),
        }
    }
    let s = if rest.is_empty() { default.with_tol(tol)? } else { LimitSurrogate::ending_at(kind, t, a, tol)? };
    Ok(s.with_direction(direction))
}
