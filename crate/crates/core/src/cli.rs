//! Command-line front end. The binary is a thin wrapper around [`run`].

use crate::construction::{NaturalParameter, RepKind};
use crate::error::{Error, Result};
use crate::families::fit::fit_mle_report;
use crate::families::sample::sample;
use crate::families::schema::{classical_field_order, classical_from_json, natural_from_json, ParameterDocument};
use crate::families::{FamilySpec, FamilyTag, FAMILY_NAMES};
use crate::space::{Point, SpaceTag};
use crate::verify::{run_suite, SuiteOptions, DEFAULT_MC_BUDGET, DEFAULT_QUADRATURE_TOL, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "homfam", version, about = "Exponential families on homogeneous spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the catalog: family, sample space, G, H, V and v0.
    List,
    /// Describe one family: domain, classical map, normalizer and measure.
    Describe {
        family: String,
        #[command(flatten)]
        variant: VariantArgs,
    },
    /// Write log-densities of points as CSV.
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Points as JSON: an array of numbers (one-coordinate charts) or of coordinate arrays.
        #[arg(long, conflicts_with = "input")]
        points: Option<String>,
        /// CSV file of points with a header row.
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw samples and write them as CSV.
    Sample {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum likelihood fit of CSV data; writes both parameterizations as JSON.
    Fit {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite and write one JSON report per line.
    Verify {
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        variant: VariantArgs,
        #[arg(long, default_value_t = DEFAULT_MC_BUDGET)]
        mc_budget: usize,
        #[arg(long, default_value_t = DEFAULT_QUADRATURE_TOL)]
        tolerance: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct VariantArgs {
    #[arg(long = "variant-n")]
    pub n: Option<usize>,
    #[arg(long = "variant-lambda", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Family name; may be omitted when a parameter document names it.
    #[arg(long)]
    pub family: Option<String>,
    #[command(flatten)]
    pub variant: VariantArgs,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Natural parameter as JSON (flat array or {"phi", "chi_exponents"}), or @PATH.
    #[arg(long, group = "param")]
    pub natural: Option<String>,
    /// Classical parameter as JSON (named object or flat array), or @PATH.
    #[arg(long, group = "param")]
    pub classical: Option<String>,
    /// Full versioned parameter document, or @PATH.
    #[arg(long, group = "param")]
    pub params: Option<String>,
}

/// Parse arguments, run the command and return the process exit code.
/// Errors are reported as one line on `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let first = text.lines().next().unwrap_or("usage error");
                let _ = writeln!(err, "{first}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}

fn read_arg(text: &str) -> Result<String> {
    match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read {path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(&read_arg(text)?).map_err(|e| Error::Schema(format!("invalid JSON: {e}")))
}

fn family_spec(args: &FamilyArgs) -> Result<FamilySpec> {
    let name = args
        .family
        .as_deref()
        .ok_or_else(|| Error::Schema("--family is required".into()))?;
    FamilySpec::from_name(name, args.variant.n, args.variant.lambda)
}

fn resolve_params(family: &FamilyArgs, params: &ParamArgs) -> Result<(FamilySpec, NaturalParameter)> {
    if let Some(doc) = &params.params {
        let doc: ParameterDocument =
            serde_json::from_value(parse_json(doc)?).map_err(|e| Error::Schema(e.to_string()))?;
        let (spec, theta) = doc.resolve()?;
        if let Some(name) = &family.family {
            let requested = FamilySpec::from_name(name, family.variant.n, family.variant.lambda)?;
            if requested.tag != spec.tag {
                return Err(Error::Schema(format!(
                    "--family {} does not match the document family {}",
                    requested.name(),
                    spec.name()
                )));
            }
        }
        spec.check_theta(&theta)?;
        return Ok((spec, theta));
    }
    let spec = family_spec(family)?;
    let theta = if let Some(text) = &params.natural {
        natural_from_json(&spec, &parse_json(text)?)?
    } else if let Some(text) = &params.classical {
        spec.from_classical(&classical_from_json(&spec, &parse_json(text)?)?)?
    } else {
        return Err(Error::Schema("one of --natural, --classical or --params is required".into()));
    };
    spec.check_theta(&theta)?;
    Ok((spec, theta))
}

fn parse_points_json(space: &SpaceTag, text: &str) -> Result<Vec<Point>> {
    let v = parse_json(text)?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Schema("--points must be a JSON array".into()))?;
    arr.iter()
        .map(|p| {
            let coords: Vec<f64> = match p {
                Value::Number(n) => vec![n.as_f64().unwrap_or(f64::NAN)],
                Value::Array(a) => a
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| Error::Schema(format!("non-numeric coordinate {x}"))))
                    .collect::<Result<_>>()?,
                other => return Err(Error::Schema(format!("cannot read point {other}"))),
            };
            Point::from_coords(space, &coords)
        })
        .collect()
}

/// Read points from CSV; the header must match the chart's column names.
pub fn read_points_csv(space: &SpaceTag, path: &PathBuf) -> Result<Vec<Point>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
    let expected = space.column_names();
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Schema(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header != expected {
        return Err(Error::Schema(format!("CSV header {header:?} does not match {expected:?}")));
    }
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Schema(e.to_string()))?;
        let coords: Vec<f64> = record
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Schema(format!("row {}: {e}", row + 1)))
            })
            .collect::<Result<_>>()?;
        points.push(Point::from_coords(space, &coords).map_err(|e| match e {
            Error::Domain(m) => Error::Domain(format!("row {}: {m}", row + 1)),
            other => other,
        })?);
    }
    Ok(points)
}

fn emit(bytes: &[u8], out: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Error::Schema(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(bytes).map_err(|e| Error::Internal(e.to_string())),
    }
}

fn write_rows(header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Internal(e.to_string()))?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| Error::Internal(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Internal(e.to_string()))
}

fn rep_name(kind: &RepKind) -> String {
    match *kind {
        RepKind::Sign => "R (sign)".into(),
        RepKind::PermutationSubrep { n } => format!("W = {{v in R^{n} : sum v = 0}}"),
        RepKind::AffineConjugation { k } => format!("Sym({k},R)"),
        RepKind::Power { lambda } => format!("R (g^{lambda})"),
        RepKind::Conjugation { n } => format!("Sym({n},R)"),
        RepKind::NaturalRotation { n } => format!("R^{n}"),
        RepKind::VectorPlusConjugation { n } => format!("R^{n} + Sym({n},R)"),
        RepKind::NaturalLorentz { n } => format!("R^(1,{n})"),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Internal(e.to_string());
    match command {
        Command::List => {
            let mut text = String::from("family\tsample_space\tG\tH\tV\tv0\n");
            for tag in FamilyTag::defaults() {
                let spec = FamilySpec::new(tag)?;
                let pair = spec.pair();
                text.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    spec.name(),
                    spec.space().name(),
                    pair.group_name(),
                    pair.subgroup_name(),
                    rep_name(&spec.construction.rep.kind),
                    json!(spec.construction.v0)
                ));
            }
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Describe { family, variant } => {
            let spec = FamilySpec::from_name(&family, variant.n, variant.lambda)?;
            let pair = spec.pair();
            let variant_text = match (spec.tag.variant_n(), spec.tag.variant_lambda()) {
                (Some(n), _) => format!("n = {n}"),
                (_, Some(l)) => format!("lambda = {l}"),
                _ => "none".into(),
            };
            let lines = [
                format!("family: {}", spec.name()),
                format!("variant: {variant_text}"),
                format!("sample space: {}", spec.space().name()),
                format!("group pair: G = {}, H = {}", pair.group_name(), pair.subgroup_name()),
                format!("representation: {}", rep_name(&spec.construction.rep.kind)),
                format!("v0: {}", json!(spec.construction.v0)),
                format!("base measure: {}", spec.measure_description()),
                format!("characters: {} generator(s)", spec.chi_len()),
                format!("domain: {}", spec.theta_description()),
                format!("classical map: {}", spec.classical_description()),
                format!("normalizer: {}", spec.normalizer_description()),
                format!("classical fields: {}", classical_field_order(&spec.tag).join(", ")),
                format!("point columns: {}", spec.space().column_names().join(", ")),
            ];
            writeln!(out, "{}", lines.join("\n")).map_err(io)?;
            Ok(0)
        }
        Command::Eval { family, params, points, input, out: path } => {
            let (spec, theta) = resolve_params(&family, &params)?;
            let space = spec.space();
            let pts = match (points, input) {
                (Some(text), _) => parse_points_json(&space, &text)?,
                (None, Some(p)) => read_points_csv(&space, &p)?,
                (None, None) => return Err(Error::Schema("--points or --in is required".into())),
            };
            let dens = spec.log_density_many(&theta, &pts)?;
            let mut header = space.column_names();
            header.push("log_density".into());
            let bytes = write_rows(
                &header,
                pts.iter().zip(&dens).map(|(p, d)| {
                    let mut row = p.coords();
                    row.push(*d);
                    row
                }),
            )?;
            emit(&bytes, path.as_ref(), out)?;
            Ok(0)
        }
        Command::Sample { family, params, count, seed, out: path } => {
            let (spec, theta) = resolve_params(&family, &params)?;
            let draws = sample(&spec, &theta, count, seed)?;
            let bytes = write_rows(&spec.space().column_names(), draws.iter().map(|p| p.coords()))?;
            emit(&bytes, path.as_ref(), out)?;
            Ok(0)
        }
        Command::Fit { family, input, out: path } => {
            let spec = family_spec(&family)?;
            let data = read_points_csv(&spec.space(), &input)?;
            let report = fit_mle_report(&spec, &data)?;
            let classical = spec.to_classical(&report.theta)?;
            let doc = json!({
                "natural": ParameterDocument::natural(&spec, &report.theta)?,
                "classical": ParameterDocument::classical(&spec, &classical)?,
                "observations": data.len(),
                "iterations": report.iterations,
                "mean_log_likelihood": report.mean_log_likelihood,
            });
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Internal(e.to_string()))?;
            text.push('\n');
            emit(text.as_bytes(), path.as_ref(), out)?;
            Ok(0)
        }
        Command::Verify { family, variant, mc_budget, tolerance, seed, out: path } => {
            if mc_budget < 2 {
                return Err(Error::Schema("--mc-budget must be at least 2".into()));
            }
            if !(tolerance > 0.0) {
                return Err(Error::Schema("--tolerance must be positive".into()));
            }
            let family = match family {
                Some(name) => Some(FamilyTag::parse(&name, variant.n, variant.lambda)?),
                None if variant.n.is_some() || variant.lambda.is_some() => {
                    return Err(Error::Schema("variant flags need --family".into()))
                }
                None => None,
            };
            let reports = run_suite(&SuiteOptions { family, mc_budget, tolerance, seed });
            let mut text = String::new();
            for r in &reports {
                text.push_str(&r.to_json_line());
                text.push('\n');
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            text.push_str(
                &json!({ "summary": { "checks": reports.len(), "failed": failed, "passed": failed == 0 } }).to_string(),
            );
            text.push('\n');
            emit(text.as_bytes(), path.as_ref(), out)?;
            Ok(if failed == 0 { 0 } else { 4 })
        }
    }
}

/// Names accepted by `--family`, for help output and tests.
pub fn family_names() -> &'static [&'static str] {
    &FAMILY_NAMES
}
