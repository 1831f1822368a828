//! `mpres` command line: JSON in, JSON out.
//!
//! Exit codes: 0 when the checked property holds, 1 when it fails (the payload
//! carries a witness), 2 for unusable input.

use std::fmt;
use std::io::Read;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classposet::{
    build_extension, check_class_preserving, compare_classes, counterexample_fn, extremes,
    is_totally_ordered, poset_u, ran_u, ClassError, SpaceClass,
};
use crate::finspace::{
    all_isometries, apply_fn, embed_min_dimension, gram_rank, isometry_search, range,
    validate_ultrametric, DistanceMatrixCandidate, FiniteUltrametricSpace,
};
use crate::funspec::{
    check_euclid_preserving_sampled, check_metric_preserving_sampled, check_ultra_to_metric,
    check_ultrametric_preserving, default_samples, euclid_grid, is_strong_triplet,
    is_triangle_triplet, sufficient_conditions, FunctionSpec, SampleSet, DEFAULT_SHIFT_BOUND,
};
use crate::padic::{digits, dp, ord, padic_abs, Prime};
use crate::preserve::{
    check_p_metric_preserving, check_p_ultrametric_preserving, extend_to_ultrametric_preserving,
    prime_swap, psi_step, witness_triple, ExponentWindow, PreservationVerdict, PreserveError,
};
use crate::rational::Rational;
use crate::reproduce::reproduce_all;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub payload: Value,
}

impl CommandResult {
    fn verdict(passed: bool, payload: Value) -> Self {
        CommandResult {
            exit_code: if passed { EXIT_PASS } else { EXIT_VIOLATION },
            payload,
        }
    }

    fn ok(payload: Value) -> Self {
        Self::verdict(true, payload)
    }

    /// Compact JSON, or the bare text for help and version output.
    pub fn render(&self) -> String {
        match &self.payload {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
}

/// An input problem, reported as `{"error":{"kind":..,"message":..}}`.
#[derive(Debug)]
struct InputError {
    kind: String,
    message: String,
}

impl InputError {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        InputError {
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    fn into_result(self) -> CommandResult {
        CommandResult {
            exit_code: EXIT_INPUT,
            payload: json!({"error": {"kind": self.kind, "message": self.message}}),
        }
    }
}

/// Uses the error's variant name as its kind.
fn input<E: fmt::Debug + fmt::Display>(e: E) -> InputError {
    let debug = format!("{e:?}");
    let kind: String = debug.chars().take_while(|c| c.is_alphanumeric()).collect();
    InputError::new(&kind, e.to_string())
}

type Outcome = Result<CommandResult, InputError>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable payload")
}

fn parse_prime(s: &str) -> Result<Prime, String> {
    let n: u64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a nonnegative integer"))?;
    Prime::new(n).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "mpres",
    version,
    about = "Exact checks for metric- and ultrametric-preserving functions"
)]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// p-adic absolute value, order, distance and digits.
    #[command(subcommand)]
    Padic(PadicCmd),
    /// Function specifications and preservation checks.
    #[command(subcommand)]
    Fn(FnCmd),
    /// Finite ultrametric spaces given as distance matrices.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Finite classes of finite ultrametric spaces.
    #[command(subcommand)]
    Class(ClassCmd),
    /// Worked examples.
    #[command(subcommand)]
    Examples(ExamplesCmd),
}

#[derive(Args, Debug)]
struct PrimeArg {
    #[arg(long, value_parser = parse_prime)]
    p: Prime,
}

#[derive(Subcommand, Debug)]
enum PadicCmd {
    Abs {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
    },
    Ord {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
    },
    Dist {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
        #[arg(long, allow_hyphen_values = true)]
        y: Rational,
    },
    Digits {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
        /// Highest digit index to extract.
        #[arg(long, allow_hyphen_values = true, default_value_t = 11)]
        high: i64,
    },
}

/// A function specification given inline or read from a file (`-` is stdin).
#[derive(Args, Debug)]
struct SpecSource {
    #[arg(long, conflicts_with = "file")]
    spec: Option<String>,
    #[arg(long)]
    file: Option<String>,
}

#[derive(Args, Debug)]
struct WindowArg {
    #[arg(long, allow_hyphen_values = true, default_value = "-16:16")]
    window: ExponentWindow,
}

#[derive(Args, Debug)]
struct SamplesArg {
    /// Comma-separated sample points; 0 is added if missing.
    #[arg(long, value_delimiter = ',')]
    samples: Option<Vec<Rational>>,
}

#[derive(Subcommand, Debug)]
enum FnCmd {
    Eval {
        #[command(flatten)]
        src: SpecSource,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
    },
    Triplet {
        #[arg(long, allow_hyphen_values = true)]
        a: Rational,
        #[arg(long, allow_hyphen_values = true)]
        b: Rational,
        #[arg(long, allow_hyphen_values = true)]
        c: Rational,
    },
    /// Sampled metric, ultrametric and ultrametric-to-metric verdicts, plus
    /// p-adic verdicts when `--p` is given.
    Classify {
        #[command(flatten)]
        src: SpecSource,
        #[command(flatten)]
        samples: SamplesArg,
        #[arg(long, value_parser = parse_prime)]
        p: Option<Prime>,
        #[command(flatten)]
        window: WindowArg,
    },
    Euclid {
        #[command(flatten)]
        src: SpecSource,
        #[arg(long, default_value = "1/8")]
        step: Rational,
        #[arg(long, default_value = "8")]
        max: Rational,
    },
    Sufficient {
        #[command(flatten)]
        src: SpecSource,
        #[command(flatten)]
        samples: SamplesArg,
    },
    PadicCheck {
        #[command(flatten)]
        src: SpecSource,
        #[command(flatten)]
        p: PrimeArg,
        #[command(flatten)]
        window: WindowArg,
    },
    PadicUltraCheck {
        #[command(flatten)]
        src: SpecSource,
        #[command(flatten)]
        p: PrimeArg,
        #[command(flatten)]
        window: WindowArg,
    },
    Psi {
        #[command(flatten)]
        src: SpecSource,
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long)]
        x: Option<Rational>,
    },
    Extend {
        #[command(flatten)]
        src: SpecSource,
        #[command(flatten)]
        p: PrimeArg,
        #[command(flatten)]
        window: WindowArg,
    },
    PrimeSwap {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        x: Option<Rational>,
    },
    PrimeShift {
        #[arg(long, default_value_t = DEFAULT_SHIFT_BOUND)]
        bound: u64,
        #[arg(long)]
        x: Option<Rational>,
    },
    /// Rationals x, y, z with d(x,z) = d(z,y) = p^m and d(x,y) = p^n.
    Witness {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
}

#[derive(Subcommand, Debug)]
enum SpaceCmd {
    Validate {
        #[arg(long)]
        file: String,
    },
    Apply {
        #[arg(long)]
        file: String,
        #[arg(long)]
        spec: String,
    },
    Range {
        #[arg(long)]
        file: String,
    },
    Isometry {
        #[arg(long)]
        file: String,
        #[arg(long)]
        to: String,
        /// List every isometry instead of the least one.
        #[arg(long)]
        all: bool,
    },
    EmbedDim {
        #[arg(long)]
        file: String,
    },
}

#[derive(Subcommand, Debug)]
enum ClassCmd {
    Ran {
        #[arg(long)]
        file: String,
    },
    Poset {
        #[arg(long)]
        file: String,
    },
    Check {
        #[arg(long)]
        file: String,
        #[arg(long)]
        spec: String,
    },
    Extend {
        #[arg(long)]
        file: String,
        #[arg(long)]
        spec: String,
    },
    Counterexample {
        #[arg(long)]
        file: String,
    },
    Compare {
        #[arg(long)]
        file: String,
        #[arg(long)]
        with: String,
    },
}

#[derive(Subcommand, Debug)]
enum ExamplesCmd {
    Reproduce,
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, InputError> {
        if path == "-" {
            if self.stdin_used {
                return Err(InputError::new(
                    "StdinReused",
                    "standard input can be read only once",
                ));
            }
            self.stdin_used = true;
            let mut buf = String::new();
            self.stdin
                .read_to_string(&mut buf)
                .map_err(|e| InputError::new("Io", format!("stdin: {e}")))?;
            Ok(buf)
        } else {
            std::fs::read_to_string(path).map_err(|e| InputError::new("Io", format!("{path}: {e}")))
        }
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, path: &str) -> Result<T, InputError> {
        let text = self.read(path)?;
        serde_json::from_str(&text)
            .map_err(|e| InputError::new("InvalidJson", format!("{path}: {e}")))
    }

    fn spec(&mut self, src: &SpecSource) -> Result<FunctionSpec, InputError> {
        let text = match (&src.spec, &src.file) {
            (Some(inline), _) => inline.clone(),
            (None, Some(path)) => self.read(path)?,
            (None, None) => {
                return Err(InputError::new(
                    "MissingSpec",
                    "give --spec <json> or --file <path>",
                ))
            }
        };
        parse_spec(&text)
    }

    /// A space file holds a candidate; structural problems are input errors.
    fn candidate(&mut self, path: &str) -> Result<DistanceMatrixCandidate, InputError> {
        self.json(path)
    }

    fn space(&mut self, path: &str) -> Result<FiniteUltrametricSpace, InputError> {
        validate_ultrametric(self.candidate(path)?).map_err(input)
    }
}

fn parse_spec(text: &str) -> Result<FunctionSpec, InputError> {
    let spec: FunctionSpec =
        serde_json::from_str(text).map_err(|e| InputError::new("InvalidSpec", e.to_string()))?;
    spec.validate().map_err(input)?;
    Ok(spec)
}

fn samples_for(f: &FunctionSpec, arg: &SamplesArg) -> Result<SampleSet, InputError> {
    match &arg.samples {
        Some(points) => {
            SampleSet::new(points.iter().cloned().chain([Rational::zero()])).map_err(input)
        }
        None => Ok(default_samples(f)),
    }
}

fn value_or_spec(f: FunctionSpec, x: &Option<Rational>) -> Outcome {
    Ok(CommandResult::ok(match x {
        Some(x) => json!({"value": f.eval(x).map_err(input)?}),
        None => to_value(&f),
    }))
}

fn padic_verdict(v: PreservationVerdict) -> CommandResult {
    CommandResult::verdict(v.passed, to_value(&v))
}

/// Runs one command. `argv[0]` is the program name.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandResult {
                    exit_code: EXIT_PASS,
                    payload: Value::String(e.render().to_string()),
                },
                _ => InputError::new("Usage", e.render().to_string()).into_result(),
            };
        }
    };
    let mut io = Io {
        stdin,
        stdin_used: false,
    };
    let outcome = match cli.group {
        Group::Padic(cmd) => padic(cmd),
        Group::Fn(cmd) => function(cmd, &mut io),
        Group::Space(cmd) => space(cmd, &mut io),
        Group::Class(cmd) => class(cmd, &mut io),
        Group::Examples(ExamplesCmd::Reproduce) => Ok(examples()),
    };
    outcome.unwrap_or_else(InputError::into_result)
}

fn padic(cmd: PadicCmd) -> Outcome {
    Ok(CommandResult::ok(match cmd {
        PadicCmd::Abs { p, x } => json!({"value": padic_abs(&x, p.p).to_rational()}),
        PadicCmd::Ord { p, x } => json!({"value": ord(&x, p.p).map_err(input)?}),
        PadicCmd::Dist { p, x, y } => json!({"value": dp(&x, &y, p.p)}),
        PadicCmd::Digits { p, x, high } => to_value(&digits(&x, p.p, high).map_err(input)?),
    }))
}

fn function(cmd: FnCmd, io: &mut Io) -> Outcome {
    match cmd {
        FnCmd::Eval { src, x } => {
            let f = io.spec(&src)?;
            Ok(CommandResult::ok(
                json!({"value": f.eval(&x).map_err(input)?}),
            ))
        }
        FnCmd::Triplet { a, b, c } => Ok(CommandResult::ok(json!({
            "triangle": is_triangle_triplet(&a, &b, &c).map_err(input)?,
            "strong": is_strong_triplet(&a, &b, &c).map_err(input)?,
        }))),
        FnCmd::Classify {
            src,
            samples,
            p,
            window,
        } => {
            let f = io.spec(&src)?;
            let s = samples_for(&f, &samples)?;
            let mut out = json!({
                "metric": check_metric_preserving_sampled(&f, &s).map_err(input)?,
                "ultrametric": check_ultrametric_preserving(&f, &s).map_err(input)?,
                "ultra_to_metric": check_ultra_to_metric(&f, &s).map_err(input)?,
            });
            if let Some(p) = p {
                out["padic_metric"] =
                    to_value(&check_p_metric_preserving(&f, p, window.window).map_err(input)?);
                out["padic_ultrametric"] =
                    to_value(&check_p_ultrametric_preserving(&f, p, window.window).map_err(input)?);
            }
            Ok(CommandResult::ok(out))
        }
        FnCmd::Euclid { src, step, max } => {
            let f = io.spec(&src)?;
            if !step.is_positive() {
                return Err(InputError::new(
                    "NonPositiveStep",
                    "--step must be positive",
                ));
            }
            let v = check_euclid_preserving_sampled(&f, &euclid_grid(&f, &step, &max))
                .map_err(input)?;
            Ok(CommandResult::verdict(v.passed, to_value(&v)))
        }
        FnCmd::Sufficient { src, samples } => {
            let f = io.spec(&src)?;
            let s = samples_for(&f, &samples)?;
            Ok(CommandResult::ok(to_value(
                &sufficient_conditions(&f, &s).map_err(input)?,
            )))
        }
        FnCmd::PadicCheck { src, p, window } => {
            let f = io.spec(&src)?;
            Ok(padic_verdict(
                check_p_metric_preserving(&f, p.p, window.window).map_err(input)?,
            ))
        }
        FnCmd::PadicUltraCheck { src, p, window } => {
            let f = io.spec(&src)?;
            Ok(padic_verdict(
                check_p_ultrametric_preserving(&f, p.p, window.window).map_err(input)?,
            ))
        }
        FnCmd::Psi { src, p, x } => value_or_spec(psi_step(io.spec(&src)?, p.p), &x),
        FnCmd::Extend { src, p, window } => {
            let f = io.spec(&src)?;
            match extend_to_ultrametric_preserving(&f, p.p, window.window) {
                Ok(g) => Ok(CommandResult::ok(to_value(&g))),
                Err(PreserveError::NotPreserving(w)) => Ok(CommandResult::verdict(
                    false,
                    json!({"passed": false, "window": window.window, "witness": w}),
                )),
                Err(e) => Err(input(e)),
            }
        }
        FnCmd::PrimeSwap { p, q, x } => value_or_spec(prime_swap(p, q).map_err(input)?, &x),
        FnCmd::PrimeShift { bound, x } => {
            let f = FunctionSpec::PrimeShift { bound };
            f.validate().map_err(input)?;
            value_or_spec(f, &x)
        }
        FnCmd::Witness { p, m, n } => {
            let [x, y, z] = witness_triple(p.p, m, n).map_err(input)?;
            let distances = [dp(&x, &z, p.p), dp(&z, &y, p.p), dp(&x, &y, p.p)];
            Ok(CommandResult::ok(
                json!({"triple": [x, y, z], "distances": distances}),
            ))
        }
    }
}

fn space(cmd: SpaceCmd, io: &mut Io) -> Outcome {
    match cmd {
        SpaceCmd::Validate { file } => Ok(match validate_ultrametric(io.candidate(&file)?) {
            Ok(s) => CommandResult::ok(json!({"valid": true, "points": s.len()})),
            Err(v) => CommandResult::verdict(false, json!({"valid": false, "violation": v})),
        }),
        SpaceCmd::Apply { file, spec } => {
            let s = io.space(&file)?;
            let f = parse_spec(&spec)?;
            let image = apply_fn(&s, &f).map_err(input)?;
            Ok(match validate_ultrametric(image.clone()) {
                Ok(_) => CommandResult::ok(json!({"image": image, "ultrametric": true})),
                Err(v) => CommandResult::verdict(
                    false,
                    json!({"image": image, "ultrametric": false, "violation": v}),
                ),
            })
        }
        SpaceCmd::Range { file } => Ok(CommandResult::ok(
            json!({"range": range(&io.space(&file)?)}),
        )),
        SpaceCmd::Isometry { file, to, all } => {
            let (a, b) = (io.space(&file)?, io.space(&to)?);
            if all {
                let maps = all_isometries(&a, &b).map_err(input)?;
                Ok(CommandResult::ok(
                    json!({"isometric": !maps.is_empty(), "isometries": maps}),
                ))
            } else {
                let map = isometry_search(&a, &b).map_err(input)?;
                Ok(CommandResult::ok(
                    json!({"isometric": map.is_some(), "isometry": map}),
                ))
            }
        }
        SpaceCmd::EmbedDim { file } => {
            let s = io.space(&file)?;
            let dimension = embed_min_dimension(&s).map_err(input)?;
            Ok(CommandResult::ok(
                json!({"dimension": dimension, "gram_rank": gram_rank(&s)}),
            ))
        }
    }
}

fn class(cmd: ClassCmd, io: &mut Io) -> Outcome {
    match cmd {
        ClassCmd::Ran { file } => {
            let u: SpaceClass = io.json(&file)?;
            let mut out = json!({"range": ran_u(&u)});
            if let Ok(e) = extremes(&u) {
                out["extremes"] = to_value(&e);
            }
            Ok(CommandResult::ok(out))
        }
        ClassCmd::Poset { file } => {
            let u: SpaceClass = io.json(&file)?;
            let p = poset_u(&u);
            let mut out = to_value(&p);
            out["totally_ordered"] = Value::Bool(is_totally_ordered(&p));
            Ok(CommandResult::ok(out))
        }
        ClassCmd::Check { file, spec } => {
            let u: SpaceClass = io.json(&file)?;
            let r = check_class_preserving(&parse_spec(&spec)?, &u).map_err(input)?;
            Ok(CommandResult::verdict(r.preserving, to_value(&r)))
        }
        ClassCmd::Extend { file, spec } => {
            let u: SpaceClass = io.json(&file)?;
            match build_extension(&parse_spec(&spec)?, &u) {
                Ok(g) => Ok(CommandResult::ok(to_value(&g))),
                Err(ClassError::NotPreserving(r)) => {
                    Ok(CommandResult::verdict(false, to_value(&r)))
                }
                Err(e) => Err(input(e)),
            }
        }
        ClassCmd::Counterexample { file } => {
            let u: SpaceClass = io.json(&file)?;
            Ok(CommandResult::ok(to_value(
                &counterexample_fn(&u).map_err(input)?,
            )))
        }
        ClassCmd::Compare { file, with } => {
            let (u1, u2): (SpaceClass, SpaceClass) = (io.json(&file)?, io.json(&with)?);
            Ok(CommandResult::ok(to_value(&compare_classes(&u1, &u2))))
        }
    }
}

fn examples() -> CommandResult {
    let outcomes = reproduce_all();
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name)
        .collect();
    CommandResult::verdict(
        failed.is_empty(),
        json!({"fixtures": outcomes, "failed": failed}),
    )
}
