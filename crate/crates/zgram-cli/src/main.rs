//! `zgram` — batch CLI over the Gram-point library.
//!
//! One subcommand per workload; everything is deterministic, so the same
//! invocation always produces byte-identical output. Tabular commands
//! default to CSV, single records to JSON; `--format` overrides either way.
//! Computation failures exit 1 with a machine-readable JSON error object on
//! standard output, usage failures exit 2.

mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use emit::{csv, num, J};
use zgram_core::{
    blocks, classify, classify_range, discriminant, discriminant_gradient, gram_point,
    gram_point_gradient, gram_point_with, hessian_entry, hessian_form, repulsion_scan, scan,
    sign_violations, suggest_shift_indices, term_table, trace_discriminant, CurveSpec, Error,
    GramClassRecord, GramPoint, ParameterVector, ScanRow, SectionContext, ThetaSeries,
    DEFAULT_CORRECTION_ORDER, DEFAULT_GRID,
};

#[derive(Parser)]
#[command(name = "zgram", version, about = "Gram points, Z-sections and Gram discriminants")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format (default: csv for tabular commands, json for single records).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to a file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for range scans (default: all cores). Affects
    /// throughput only, never results or output order.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve theta(g_n) = pi n for Gram points.
    Gram(GramArgs),
    /// Good/bad classification with viscosity, one point or a range.
    Classify(PickArgs),
    /// Range survey: classification plus isolation and corruption flags.
    Scan(RangeArgs),
    /// Gram blocks (good endpoints, bad interior) touching a range.
    Blocks(RangeArgs),
    /// Viscosity rows for the bad points of a range.
    Repulsion(RangeArgs),
    /// Gram discriminant at a shift vector.
    Discriminant(VectorAtArgs),
    /// Closed-form discriminant and extremum gradients at the reference shift.
    Gradient(GradientArgs),
    /// Discriminant Hessian at the reference shift: one entry or a quadratic form.
    Hessian(HessianArgs),
    /// Discriminant trace along a curve through parameter space.
    Trace(TraceArgs),
    /// Leading resonance terms at a Gram point.
    Table(TableArgs),
    /// Pick the highest-leverage shift indices from the term table.
    SuggestShift(SuggestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Pick {
    /// Single Gram index.
    #[arg(
        long,
        allow_negative_numbers = true,
        conflicts_with = "range",
        required_unless_present = "range"
    )]
    n: Option<i64>,

    /// Inclusive index range.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    range: Option<Vec<i64>>,
}

enum Sel {
    One(i64),
    Many(i64, i64),
}

impl Pick {
    fn sel(&self) -> Sel {
        match (self.n, &self.range) {
            (Some(n), None) => Sel::One(n),
            (None, Some(r)) => Sel::Many(r[0], r[1]),
            _ => unreachable!("clap enforces exactly one of --n/--range"),
        }
    }
}

#[derive(Args)]
struct PickArgs {
    #[command(flatten)]
    pick: Pick,
}

#[derive(Args)]
struct RangeArgs {
    /// Inclusive index range.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, required = true)]
    range: Vec<i64>,
}

#[derive(Args)]
struct GramArgs {
    #[command(flatten)]
    pick: Pick,

    /// Phase-series correction order (0, 1 or 2).
    #[arg(long, default_value_t = DEFAULT_CORRECTION_ORDER)]
    correction_order: u8,
}

#[derive(Args)]
struct VectorSpec {
    /// Base shift vector: `zeros`, `ones` or `uniform:V`.
    #[arg(long, default_value = "ones")]
    at: String,

    /// Coefficient override `K=V` (1-based); repeatable.
    #[arg(long = "set", value_name = "K=V")]
    set: Vec<String>,

    /// Coefficient count (default: the full section length at g_n).
    #[arg(long)]
    len: Option<usize>,
}

#[derive(Args)]
struct VectorAtArgs {
    /// Gram index.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,

    #[command(flatten)]
    vector: VectorSpec,
}

#[derive(Args)]
struct GradientArgs {
    /// Gram index.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,

    /// Truncate to the first K coefficients (default: full section length).
    #[arg(long, value_name = "K")]
    k_max: Option<usize>,
}

#[derive(Args)]
struct HessianArgs {
    /// Gram index.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,

    /// Row index of a single entry; pairs with --k2.
    #[arg(long, requires = "k2")]
    k1: Option<usize>,

    /// Column index of a single entry; pairs with --k1.
    #[arg(long, requires = "k1")]
    k2: Option<usize>,

    #[command(flatten)]
    vector: VectorSpec,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    Linear,
    Split,
}

#[derive(Args)]
struct TraceArgs {
    /// Gram index.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,

    /// Curve family.
    #[arg(long, value_enum, default_value_t = CurveKind::Linear)]
    curve: CurveKind,

    /// Fast-rate coefficient indices for a split curve, e.g. `1,2,4,6,12`.
    #[arg(long, value_name = "K,K,...", required_if_eq("curve", "split"))]
    shift: Option<String>,

    /// Split-curve waypoints `R1,R2:R1,R2:...`, from `0,0` to `1,1`.
    #[arg(long, value_name = "R1,R2:...", required_if_eq("curve", "split"))]
    waypoints: Option<String>,

    /// Samples per curve segment.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
}

#[derive(Args)]
struct TableArgs {
    /// Gram index.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,

    /// Number of leading terms.
    #[arg(long, default_value_t = 15)]
    k_max: usize,
}

#[derive(Args)]
struct SuggestArgs {
    /// Gram index.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,

    /// Number of leading terms to rank.
    #[arg(long, default_value_t = 15)]
    k_max: usize,

    /// How many indices to pick.
    #[arg(long, default_value_t = 5)]
    count: usize,
}

enum Failure {
    Usage(String),
    Compute(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let body = run(&cli).and_then(|body| match &cli.out {
        Some(path) => std::fs::write(path, &body).map(|()| None).map_err(Failure::Io),
        None => Ok(Some(body)),
    });
    match body {
        Ok(Some(body)) => {
            print!("{body}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            print!("{}", error_body(&e));
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            print!(
                "{}",
                J::Obj(vec![
                    ("code", J::Str("io".into())),
                    ("message", J::Str(e.to_string())),
                    ("context", J::Obj(vec![])),
                ])
                .render()
            );
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let fmt = cli.format;
    match &cli.command {
        Command::Gram(args) => gram_out(args, fmt),
        Command::Classify(args) => classify_out(args, fmt),
        Command::Scan(args) => scan_out(args, fmt),
        Command::Blocks(args) => blocks_out(args, fmt),
        Command::Repulsion(args) => repulsion_out(args, fmt),
        Command::Discriminant(args) => discriminant_out(args, fmt),
        Command::Gradient(args) => gradient_out(args, fmt),
        Command::Hessian(args) => hessian_out(args, fmt),
        Command::Trace(args) => trace_out(args, fmt),
        Command::Table(args) => table_out(args, fmt),
        Command::SuggestShift(args) => suggest_out(args, fmt),
    }
}

// ---- shared pieces ----------------------------------------------------

fn section_len(n: i64) -> Result<usize, Failure> {
    Ok(SectionContext::spira_terms(gram_point(n)?.t))
}

/// Builds the shift vector described by `--at`/`--set`/`--len`.
fn resolve_vector(spec: &VectorSpec, default_len: usize) -> Result<ParameterVector, Failure> {
    let len = spec.len.unwrap_or(default_len);
    let mut a = if spec.at == "zeros" {
        ParameterVector::zeros(len)
    } else if spec.at == "ones" {
        ParameterVector::ones(len)
    } else if let Some(v) = spec.at.strip_prefix("uniform:") {
        let v: f64 = v
            .parse()
            .map_err(|_| usage(format!("bad --at value `{}`", spec.at)))?;
        ParameterVector::uniform(len, v)
    } else {
        return Err(usage(format!(
            "bad --at value `{}` (expected zeros, ones or uniform:V)",
            spec.at
        )));
    };
    for pair in &spec.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| usage(format!("bad --set `{pair}`, expected K=V")))?;
        let k: usize = k
            .parse()
            .map_err(|_| usage(format!("bad --set index `{k}`")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| usage(format!("bad --set value `{v}`")))?;
        a = a.with_set(k, v)?;
    }
    Ok(a)
}

fn parse_shift(raw: &str) -> Result<Vec<usize>, Failure> {
    raw.split(',')
        .map(|k| {
            k.trim()
                .parse()
                .map_err(|_| usage(format!("bad --shift entry `{k}`")))
        })
        .collect()
}

fn parse_waypoints(raw: &str) -> Result<Vec<(f64, f64)>, Failure> {
    raw.split(':')
        .map(|pair| {
            let (r1, r2) = pair
                .split_once(',')
                .ok_or_else(|| usage(format!("bad --waypoints entry `{pair}`, expected R1,R2")))?;
            let r1 = r1
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad waypoint rate `{r1}`")))?;
            let r2 = r2
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad waypoint rate `{r2}`")))?;
            Ok((r1, r2))
        })
        .collect()
}

fn error_body(e: &Error) -> String {
    use Error::*;
    let (code, context) = match e {
        BelowDomain(t) => ("below_domain", vec![("t", J::Num(*t))]),
        LambertDomain(x) => ("lambert_domain", vec![("x", J::Num(*x))]),
        BadCorrectionOrder(o) => ("bad_correction_order", vec![("order", J::Int(*o as i64))]),
        GramIndex(n) => ("gram_index", vec![("n", J::Int(*n))]),
        CoreZeroIndex(n) => ("core_zero_index", vec![("n", J::Int(*n))]),
        SolverStalled { t } => ("solver_stalled", vec![("t", J::Num(*t))]),
        NoConvergence { s, t } => ("no_convergence", vec![("s", J::Num(*s)), ("t", J::Num(*t))]),
        ExtremumLost { s, t } => ("extremum_lost", vec![("s", J::Num(*s)), ("t", J::Num(*t))]),
        NonFiniteCoefficient(k) => ("non_finite_coefficient", vec![("k", J::Int(*k as i64))]),
        CoefficientIndex { index, len } => (
            "coefficient_index",
            vec![("index", J::Int(*index as i64)), ("len", J::Int(*len as i64))],
        ),
        LengthMismatch { got, cap } => (
            "length_mismatch",
            vec![("got", J::Int(*got as i64)), ("cap", J::Int(*cap as i64))],
        ),
        BlendShape { left, right } => (
            "blend_shape",
            vec![("left", J::Int(*left as i64)), ("right", J::Int(*right as i64))],
        ),
        BadRange { lo, hi } => ("bad_range", vec![("lo", J::Int(*lo)), ("hi", J::Int(*hi))]),
        NoGoodEndpoint { n, searched } => (
            "no_good_endpoint",
            vec![("n", J::Int(*n)), ("searched", J::Int(*searched))],
        ),
        BadCurve(_) => ("bad_curve", vec![]),
        BadSelection { count, k_max } => (
            "bad_selection",
            vec![("count", J::Int(*count as i64)), ("k_max", J::Int(*k_max as i64))],
        ),
        EmptyTermTable => ("empty_term_table", vec![]),
    };
    J::Obj(vec![
        ("code", J::Str(code.into())),
        ("message", J::Str(e.to_string())),
        ("context", J::Obj(context)),
    ])
    .render()
}

// ---- per-command output -----------------------------------------------

fn gram_obj(g: &GramPoint) -> J {
    J::Obj(vec![
        ("n", J::Int(g.n)),
        ("t", J::Num(g.t)),
        ("residual", J::Num(g.residual)),
    ])
}

fn gram_row(g: &GramPoint) -> Vec<String> {
    vec![g.n.to_string(), num(g.t), num(g.residual)]
}

fn gram_out(args: &GramArgs, fmt: Option<Format>) -> Result<String, Failure> {
    let series = ThetaSeries::new(args.correction_order)?;
    match args.pick.sel() {
        Sel::One(n) => {
            let g = gram_point_with(series, n)?;
            Ok(match fmt.unwrap_or(Format::Json) {
                Format::Json => gram_obj(&g).render(),
                Format::Csv => csv("n,t,residual", [gram_row(&g)]),
            })
        }
        Sel::Many(lo, hi) => {
            if lo > hi {
                return Err(Error::BadRange { lo, hi }.into());
            }
            let points: Vec<GramPoint> = (lo..=hi)
                .map(|n| gram_point_with(series, n))
                .collect::<Result<_, _>>()?;
            Ok(match fmt.unwrap_or(Format::Csv) {
                Format::Csv => csv("n,t,residual", points.iter().map(gram_row)),
                Format::Json => J::Obj(vec![
                    ("lo", J::Int(lo)),
                    ("hi", J::Int(hi)),
                    ("points", J::Arr(points.iter().map(gram_obj).collect())),
                ])
                .render(),
            })
        }
    }
}

fn class_obj(r: &GramClassRecord) -> J {
    J::Obj(vec![
        ("n", J::Int(r.n)),
        ("t", J::Num(r.t)),
        ("z", J::Num(r.z)),
        ("z_prime", J::Num(r.z_prime)),
        ("good", J::Bool(r.good)),
        ("viscosity", J::Num(r.viscosity)),
        ("uncertain", J::Bool(r.uncertain)),
    ])
}

fn class_fields(r: &GramClassRecord) -> Vec<String> {
    vec![
        r.n.to_string(),
        num(r.t),
        num(r.z),
        num(r.z_prime),
        r.good.to_string(),
        num(r.viscosity),
        r.uncertain.to_string(),
    ]
}

const CLASS_HEADER: &str = "n,t,z,z_prime,good,viscosity,uncertain";

fn classify_out(args: &PickArgs, fmt: Option<Format>) -> Result<String, Failure> {
    match args.pick.sel() {
        Sel::One(n) => {
            let r = classify(n)?;
            Ok(match fmt.unwrap_or(Format::Json) {
                Format::Json => class_obj(&r).render(),
                Format::Csv => csv(CLASS_HEADER, [class_fields(&r)]),
            })
        }
        Sel::Many(lo, hi) => {
            let rows = classify_range(lo, hi)?;
            Ok(match fmt.unwrap_or(Format::Csv) {
                Format::Csv => csv(CLASS_HEADER, rows.iter().map(class_fields)),
                Format::Json => J::Obj(vec![
                    ("lo", J::Int(lo)),
                    ("hi", J::Int(hi)),
                    ("rows", J::Arr(rows.iter().map(class_obj).collect())),
                ])
                .render(),
            })
        }
    }
}

fn summary_obj(
    lo: i64,
    hi: i64,
    bad: usize,
    isolated: usize,
    violations: usize,
    corrupt: &[i64],
) -> J {
    J::Obj(vec![
        ("range", J::Arr(vec![J::Int(lo), J::Int(hi)])),
        ("bad_count", J::Int(bad as i64)),
        ("isolated_count", J::Int(isolated as i64)),
        ("violations", J::Int(violations as i64)),
        ("corrupt", J::Arr(corrupt.iter().map(|&n| J::Int(n)).collect())),
    ])
}

fn scan_out(args: &RangeArgs, fmt: Option<Format>) -> Result<String, Failure> {
    let report = scan(args.range[0], args.range[1])?;
    let row = |r: &ScanRow| {
        let mut fields = class_fields(&r.class);
        // Header order puts the survey flags between viscosity and uncertain.
        let uncertain = fields.pop().unwrap();
        fields.push(r.isolated.to_string());
        fields.push(r.corrupt.to_string());
        fields.push(uncertain);
        fields
    };
    Ok(match fmt.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            "n,t,z,z_prime,good,viscosity,isolated,corrupt,uncertain",
            report.rows.iter().map(row),
        ),
        Format::Json => summary_obj(
            report.lo,
            report.hi,
            report.bad_count,
            report.isolated_count,
            report.violations,
            &report.corrupt,
        )
        .render(),
    })
}

fn blocks_out(args: &RangeArgs, fmt: Option<Format>) -> Result<String, Failure> {
    let found = blocks(args.range[0], args.range[1])?;
    Ok(match fmt.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            "start_n,length",
            found
                .iter()
                .map(|b| vec![b.start_n.to_string(), b.length.to_string()]),
        ),
        Format::Json => J::Obj(vec![
            ("range", J::Arr(vec![J::Int(args.range[0]), J::Int(args.range[1])])),
            (
                "blocks",
                J::Arr(
                    found
                        .iter()
                        .map(|b| {
                            J::Obj(vec![
                                ("start_n", J::Int(b.start_n)),
                                ("length", J::Int(b.length as i64)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ])
        .render(),
    })
}

fn repulsion_out(args: &RangeArgs, fmt: Option<Format>) -> Result<String, Failure> {
    let report = repulsion_scan(args.range[0], args.range[1])?;
    Ok(match fmt.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            "n,viscosity,isolated,satisfies_bound,corrupt",
            report.rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    num(r.viscosity),
                    r.isolated.to_string(),
                    r.satisfies_bound.to_string(),
                    r.corrupt.to_string(),
                ]
            }),
        ),
        Format::Json => summary_obj(
            report.lo,
            report.hi,
            report.bad_count,
            report.isolated_count,
            report.violations,
            &report.corrupt,
        )
        .render(),
    })
}

fn discriminant_out(args: &VectorAtArgs, fmt: Option<Format>) -> Result<String, Failure> {
    let a = resolve_vector(&args.vector, section_len(args.n)?)?;
    let rec = discriminant(args.n, &a)?;
    let spec = rec.a().describe();
    Ok(match fmt.unwrap_or(Format::Json) {
        Format::Json => J::Obj(vec![
            ("n", J::Int(rec.n)),
            ("a_spec", J::Str(spec)),
            ("t", J::Num(rec.t())),
            ("delta", J::Num(rec.delta)),
            ("signed", J::Num(rec.signed)),
            ("steps", J::Int(rec.point.steps as i64)),
            ("converged", J::Bool(rec.point.converged)),
        ])
        .render(),
        Format::Csv => csv(
            "n,a_spec,t,delta,signed,steps,converged",
            [vec![
                rec.n.to_string(),
                spec,
                num(rec.t()),
                num(rec.delta),
                num(rec.signed),
                rec.point.steps.to_string(),
                rec.point.converged.to_string(),
            ]],
        ),
    })
}

fn gradient_out(args: &GradientArgs, fmt: Option<Format>) -> Result<String, Failure> {
    let full = section_len(args.n)?;
    let k_max = args.k_max.unwrap_or(full);
    if k_max == 0 || k_max > full {
        return Err(Error::CoefficientIndex {
            index: k_max,
            len: full,
        }
        .into());
    }
    let d_delta = discriminant_gradient(args.n)?;
    let d_g = gram_point_gradient(args.n)?;
    Ok(match fmt.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            "k,d_delta,d_g",
            (0..k_max).map(|i| vec![(i + 1).to_string(), num(d_delta[i]), num(d_g[i])]),
        ),
        Format::Json => J::Obj(vec![
            ("n", J::Int(args.n)),
            ("k_max", J::Int(k_max as i64)),
            (
                "d_delta",
                J::Arr(d_delta[..k_max].iter().map(|&x| J::Num(x)).collect()),
            ),
            ("d_g", J::Arr(d_g[..k_max].iter().map(|&x| J::Num(x)).collect())),
        ])
        .render(),
    })
}

fn hessian_out(args: &HessianArgs, fmt: Option<Format>) -> Result<String, Failure> {
    if let (Some(k1), Some(k2)) = (args.k1, args.k2) {
        let entry = hessian_entry(args.n, k1, k2)?;
        return Ok(match fmt.unwrap_or(Format::Json) {
            Format::Json => J::Obj(vec![
                ("n", J::Int(args.n)),
                ("k1", J::Int(k1 as i64)),
                ("k2", J::Int(k2 as i64)),
                ("entry", J::Num(entry)),
            ])
            .render(),
            Format::Csv => csv(
                "n,k1,k2,entry",
                [vec![
                    args.n.to_string(),
                    k1.to_string(),
                    k2.to_string(),
                    num(entry),
                ]],
            ),
        });
    }
    let a = resolve_vector(&args.vector, section_len(args.n)?)?;
    let form = hessian_form(args.n, &a)?;
    let spec = a.describe();
    Ok(match fmt.unwrap_or(Format::Json) {
        Format::Json => J::Obj(vec![
            ("n", J::Int(args.n)),
            ("a_spec", J::Str(spec)),
            ("form", J::Num(form)),
        ])
        .render(),
        Format::Csv => csv(
            "n,a_spec,form",
            [vec![args.n.to_string(), spec, num(form)]],
        ),
    })
}

fn trace_out(args: &TraceArgs, fmt: Option<Format>) -> Result<String, Failure> {
    let spec = match args.curve {
        CurveKind::Linear => CurveSpec::linear().with_grid(args.grid),
        CurveKind::Split => {
            let shift = parse_shift(args.shift.as_deref().expect("required by clap"))?;
            let waypoints = parse_waypoints(args.waypoints.as_deref().expect("required by clap"))?;
            CurveSpec::split(shift, waypoints).with_grid(args.grid)
        }
    };
    let trace = trace_discriminant(args.n, &spec)?;
    Ok(match fmt.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            "s,r1,r2,t,delta,signed",
            trace.samples.iter().map(|p| {
                vec![num(p.s), num(p.r1), num(p.r2), num(p.t), num(p.delta), num(p.signed)]
            }),
        ),
        Format::Json => {
            let runs = sign_violations(&trace);
            J::Obj(vec![
                ("n", J::Int(trace.n)),
                ("spec", J::Str(spec.describe())),
                ("min_signed", J::Num(trace.min_signed)),
                (
                    "violations",
                    J::Arr(
                        runs.iter()
                            .map(|&(a, b)| J::Arr(vec![J::Num(a), J::Num(b)]))
                            .collect(),
                    ),
                ),
                ("failed_at", trace.failed_at.map_or(J::Null, J::Num)),
            ])
            .render()
        }
    })
}

fn table_out(args: &TableArgs, fmt: Option<Format>) -> Result<String, Failure> {
    let rows = term_table(args.n, args.k_max)?;
    Ok(match fmt.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            "k,cos,sin,A,B",
            rows.iter().map(|r| {
                vec![r.k.to_string(), num(r.cos), num(r.sin), num(r.a), num(r.b)]
            }),
        ),
        Format::Json => J::Obj(vec![
            ("n", J::Int(args.n)),
            ("k_max", J::Int(args.k_max as i64)),
            (
                "rows",
                J::Arr(
                    rows.iter()
                        .map(|r| {
                            J::Obj(vec![
                                ("k", J::Int(r.k as i64)),
                                ("cos", J::Num(r.cos)),
                                ("sin", J::Num(r.sin)),
                                ("A", J::Num(r.a)),
                                ("B", J::Num(r.b)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ])
        .render(),
    })
}

fn suggest_out(args: &SuggestArgs, fmt: Option<Format>) -> Result<String, Failure> {
    let indices = suggest_shift_indices(args.n, args.k_max, args.count)?;
    Ok(match fmt.unwrap_or(Format::Json) {
        Format::Json => J::Obj(vec![
            ("n", J::Int(args.n)),
            ("k_max", J::Int(args.k_max as i64)),
            ("count", J::Int(args.count as i64)),
            (
                "indices",
                J::Arr(indices.iter().map(|&k| J::Int(k as i64)).collect()),
            ),
        ])
        .render(),
        Format::Csv => csv("k", indices.iter().map(|k| vec![k.to_string()])),
    })
}
