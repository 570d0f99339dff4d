//! Argument definitions, validation and dispatch.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde_json::{json, Value};

use ribbonlab::chain::{verify_witten_cycle, witten_chain};
use ribbonlab::enumerate::{enumerate_graphs, orbifold_euler_characteristic, EnumerationParams};
use ribbonlab::forms::EtaNormalization;
use ribbonlab::json::{
    chain_to_jsonl, graph_to_json, metric_from_json, metric_to_json, volume_report_to_json, witten_certificate_to_json,
};
use ribbonlab::ops::{close_hole, contract_edge, forget_univalent, open_univalent_vertex, quotient, stabilize, Stabilizer};
use ribbonlab::volume::kontsevich_volume;
use ribbonlab::{canonical_form, ExactField, MetricGraph, Rational, RibbonError, Systole, ValenceProfile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] RibbonError),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io { .. } => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "ribbonlab", version, about = "Exact ribbon-graph computations for moduli of curves")]
pub struct Cli {
    /// Report elapsed_ms as 0 so that repeated runs give identical output.
    #[arg(long, global = true)]
    pub reproducible: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List isomorphism classes of ribbon graphs.
    Enum(EnumArgs),
    /// Orbifold Euler characteristic of the moduli space.
    Euler(EulerArgs),
    /// Check that a Witten subcomplex is a cycle.
    Witten(WittenArgs),
    /// Integral of Ω^d/d! over the fixed-perimeter moduli slice.
    Volume(VolumeArgs),
    /// Apply one operation to a graph read from a JSON file.
    Transform(TransformArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Jsonl,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct EnumArgs {
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub holes: usize,
    #[arg(long, default_value_t = 3)]
    pub min_valence: usize,
    /// Counts m₀,m₁,… of vertices of valence 3,5,…
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long, conflicts_with = "unlabeled")]
    pub labeled: bool,
    #[arg(long)]
    pub unlabeled: bool,
    #[arg(long)]
    pub allow_tails: bool,
    #[arg(long)]
    pub max_edges: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EulerArgs {
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub holes: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct WittenArgs {
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub holes: usize,
    #[arg(long)]
    pub profile: String,
    #[arg(long)]
    pub perimeters: String,
    /// Also write the oriented top chain as JSON lines.
    #[arg(long)]
    pub chain_output: Option<PathBuf>,
    /// Leave the per-face details out of the report.
    #[arg(long)]
    pub brief: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SideCoordinate {
    /// ẽ = ℓ/(2p)
    Half,
    /// ẽ = ℓ/p
    Full,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub holes: usize,
    #[arg(long)]
    pub perimeters: String,
    /// Defaults to the top degree 3g-3+n.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, value_enum, default_value = "half")]
    pub side_coordinate: SideCoordinate,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Op {
    Info,
    Canonical,
    Contract,
    Quotient,
    Stabilize,
    Forget,
    Open,
    Close,
    Systole,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Generator {
    S1,
    S2,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Graph in the JSON interchange format.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub op: Op,
    /// Edge index; repeat for quotients.
    #[arg(long)]
    pub edge: Vec<usize>,
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long, value_enum)]
    pub generator: Option<Generator>,
    /// Longest closed path searched by the systole.
    #[arg(long)]
    pub bound: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

fn parse_rational(s: &str) -> CliResult<Rational> {
    Rational::parse_exact(s.trim()).ok_or_else(|| CliError::Usage(RibbonError::BadRational(s.to_string()).to_string()))
}

fn parse_perimeters(s: &str, holes: usize) -> CliResult<Vec<Rational>> {
    let p = s.split(',').map(parse_rational).collect::<CliResult<Vec<_>>>()?;
    if p.len() != holes {
        return Err(CliError::Usage(format!("expected {holes} perimeters, got {}", p.len())));
    }
    if p.iter().any(|x| !x.is_positive()) {
        return Err(CliError::Usage(RibbonError::NonPositivePerimeter.to_string()));
    }
    Ok(p)
}

fn parse_profile(s: &str) -> CliResult<ValenceProfile> {
    let counts = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad profile entry {x:?}"))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ValenceProfile::new(counts))
}

fn only_json(c: &Common) -> CliResult<()> {
    match c.format {
        None | Some(Format::Json) => Ok(()),
        Some(f) => Err(CliError::Usage(format!("format {f:?} is only available for enum"))),
    }
}

struct Reporter {
    start: Instant,
    reproducible: bool,
}

impl Reporter {
    fn summary(&self, inputs: Value, result: Value) -> Value {
        let elapsed = if self.reproducible { 0 } else { self.start.elapsed().as_millis() as u64 };
        json!({
            "tool_version": env!("CARGO_PKG_VERSION"),
            "inputs": inputs,
            "result": result,
            "elapsed_ms": elapsed,
        })
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io { path: "stdout".into(), message: e.to_string() })
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let rep = Reporter { start: Instant::now(), reproducible: cli.reproducible };
    match &cli.command {
        Command::Enum(a) => run_enum(a, &rep),
        Command::Euler(a) => run_euler(a, &rep),
        Command::Witten(a) => run_witten(a, &rep),
        Command::Volume(a) => run_volume(a, &rep),
        Command::Transform(a) => run_transform(a, &rep),
    }
}

fn run_enum(a: &EnumArgs, rep: &Reporter) -> CliResult<()> {
    let profile = a.profile.as_deref().map(parse_profile).transpose()?;
    let format = a.common.format.unwrap_or(Format::Jsonl);
    let mut params = EnumerationParams::new(a.genus, a.holes)
        .labeled(a.labeled)
        .min_valence(a.min_valence)
        .allow_tails(a.allow_tails);
    if let Some(p) = &profile {
        params = params.profile(p.clone());
    }
    if let Some(e) = a.max_edges {
        params = params.max_edges(e);
    }
    let graphs = enumerate_graphs(&params)?;
    let standard = a.min_valence == 3 && profile.is_none() && !a.allow_tails && a.max_edges.is_none();
    let chi = if standard {
        Some(orbifold_euler_characteristic::<Rational>(a.genus, a.holes)?.to_exact_string())
    } else {
        None
    };
    let records: Vec<Value> = graphs
        .iter()
        .map(|g| {
            json!({
                "canonical_code": g.code.to_key(),
                "aut_order": g.code.aut_order,
                "vertices": g.graph.num_vertices(),
                "edges": g.graph.num_edges(),
                "graph": graph_to_json(&g.graph),
            })
        })
        .collect();
    let inputs = json!({
        "genus": a.genus,
        "holes": a.holes,
        "min_valence": a.min_valence,
        "profile": profile.as_ref().map(|p| p.counts().to_vec()),
        "labeled": a.labeled,
        "allow_tails": a.allow_tails,
        "max_edges": a.max_edges,
    });
    let result = json!({"count": graphs.len(), "chi": chi});
    match format {
        Format::Json => {
            let mut s = rep.summary(inputs, result);
            s["graphs"] = Value::Array(records);
            write_out(a.common.output.as_ref(), &pretty(&s))
        }
        Format::Jsonl | Format::Csv => {
            let body = if matches!(format, Format::Jsonl) {
                records.iter().map(|r| format!("{r}\n")).collect::<String>()
            } else {
                let mut s = String::from("canonical_code,aut_order,vertices,edges,sigma0\n");
                for g in &graphs {
                    let sigma: Vec<String> = g.graph.sigma0_array().iter().map(|d| d.to_string()).collect();
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        g.code.to_key(),
                        g.code.aut_order,
                        g.graph.num_vertices(),
                        g.graph.num_edges(),
                        sigma.join(" ")
                    ));
                }
                s
            };
            write_out(a.common.output.as_ref(), &body)?;
            let summary = rep.summary(inputs, result).to_string();
            if a.common.output.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            Ok(())
        }
    }
}

fn run_euler(a: &EulerArgs, rep: &Reporter) -> CliResult<()> {
    only_json(&a.common)?;
    let chi: Rational = orbifold_euler_characteristic(a.genus, a.holes)?;
    let cells = enumerate_graphs(&EnumerationParams::new(a.genus, a.holes).labeled(true))?.len();
    let summary = rep.summary(
        json!({"genus": a.genus, "holes": a.holes}),
        json!({"chi": chi.to_exact_string(), "labeled_cells": cells}),
    );
    write_out(a.common.output.as_ref(), &pretty(&summary))
}

fn run_witten(a: &WittenArgs, rep: &Reporter) -> CliResult<()> {
    only_json(&a.common)?;
    let profile = parse_profile(&a.profile)?;
    let p = parse_perimeters(&a.perimeters, a.holes)?;
    if !profile.satisfies_witten(a.genus, a.holes) {
        return Err(RibbonError::ProfileMismatch.into());
    }
    let cert = verify_witten_cycle(a.genus, a.holes, &profile, &p)?;
    if let Some(path) = &a.chain_output {
        let chain = witten_chain(a.genus, a.holes, &profile, &p)?;
        write_out(Some(path), &chain_to_jsonl(&chain))?;
    }
    let mut result = witten_certificate_to_json(&cert);
    if a.brief {
        result.as_object_mut().unwrap().remove("faces");
    }
    let inputs = json!({
        "genus": a.genus,
        "holes": a.holes,
        "profile": profile.counts(),
        "perimeters": p.iter().map(|x| x.to_exact_string()).collect::<Vec<_>>(),
    });
    write_out(a.common.output.as_ref(), &pretty(&rep.summary(inputs, result)))
}

fn run_volume(a: &VolumeArgs, rep: &Reporter) -> CliResult<()> {
    only_json(&a.common)?;
    let p = parse_perimeters(&a.perimeters, a.holes)?;
    let top = 3 * a.genus as i64 - 3 + a.holes as i64;
    let degree = a.degree.unwrap_or(top.max(0) as usize);
    let norm = match a.side_coordinate {
        SideCoordinate::Half => EtaNormalization::HalfPerimeter,
        SideCoordinate::Full => EtaNormalization::Perimeter,
    };
    let r = kontsevich_volume(a.genus, a.holes, &p, degree, norm)?;
    let inputs = json!({
        "genus": a.genus,
        "holes": a.holes,
        "degree": degree,
        "perimeters": p.iter().map(|x| x.to_exact_string()).collect::<Vec<_>>(),
    });
    write_out(a.common.output.as_ref(), &pretty(&rep.summary(inputs, volume_report_to_json(&r))))
}

fn need<'a, T>(x: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
    x.as_ref().ok_or_else(|| CliError::Usage(format!("--{flag} is required for this operation")))
}

fn single_edge(a: &TransformArgs) -> CliResult<usize> {
    match a.edge.as_slice() {
        [e] => Ok(*e),
        _ => Err(CliError::Usage("exactly one --edge is required".into())),
    }
}

fn run_transform(a: &TransformArgs, rep: &Reporter) -> CliResult<()> {
    only_json(&a.common)?;
    let text = fs::read_to_string(&a.input).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.input.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid JSON: {e}")))?;
    let g: MetricGraph = metric_from_json(&value)?;
    let result = match a.op {
        Op::Info => info(&g)?,
        Op::Canonical => {
            let f = canonical_form(g.graph())?;
            json!({"canonical_code": f.code.to_key(), "aut_order": f.code.aut_order, "graph": graph_to_json(&f.graph)})
        }
        Op::Contract => json!({"graph": metric_to_json(&contract_edge(&g, single_edge(a)?)?)}),
        Op::Quotient => {
            if a.edge.is_empty() {
                return Err(CliError::Usage("--edge is required for quotient".into()));
            }
            json!({"graph": graph_to_json(&quotient(g.graph(), &a.edge, true)?)})
        }
        Op::Stabilize => {
            let generator = match need(&a.generator, "generator")? {
                Generator::S1 => Stabilizer::S1,
                Generator::S2 => Stabilizer::S2,
            };
            json!({"graph": metric_to_json(&stabilize(&g, generator)?)})
        }
        Op::Forget => json!({"graph": metric_to_json(&forget_univalent(&g, need(&a.label, "label")?)?)}),
        Op::Open => {
            let eps = parse_rational(need(&a.eps, "eps")?)?;
            json!({"graph": metric_to_json(&open_univalent_vertex(&g, need(&a.label, "label")?, &eps)?)})
        }
        Op::Close => json!({"graph": metric_to_json(&close_hole(&g, need(&a.label, "label")?)?)}),
        Op::Systole => {
            let bound = a.bound.unwrap_or(2 * g.graph().num_edges());
            if bound == 0 {
                return Err(CliError::Usage("--bound must be at least 1".into()));
            }
            let s = match g.systole_bounded(bound) {
                Systole::Finite(x) => Value::String(x.to_exact_string()),
                Systole::Unbounded => Value::String("unbounded".into()),
            };
            json!({"bound": bound, "systole": s})
        }
    };
    let inputs = json!({
        "input": a.input.display().to_string(),
        "op": format!("{:?}", a.op).to_lowercase(),
        "edge": a.edge,
        "label": a.label,
        "eps": a.eps,
        "generator": a.generator.map(|x| format!("{x:?}").to_lowercase()),
        "bound": a.bound,
    });
    write_out(a.common.output.as_ref(), &pretty(&rep.summary(inputs, result)))
}

fn info(g: &MetricGraph) -> CliResult<Value> {
    let graph = g.graph();
    let report = graph.valence_profile();
    Ok(json!({
        "vertices": graph.num_vertices(),
        "edges": graph.num_edges(),
        "holes": graph.num_holes(),
        "genus": graph.genus()?,
        "euler_characteristic": graph.euler_characteristic(),
        "profile": report.profile.counts(),
        "even_vertices": report.even,
        "tails": report.tails,
        "perimeters": g.ordered_perimeters().iter().map(|x| x.to_exact_string()).collect::<Vec<_>>(),
    }))
}
