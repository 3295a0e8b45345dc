//! `mgl`: membership verdicts, majorization-body checks, minimal graph
//! solves, geodesic homotopies, second-variation profiles, and uniqueness
//! experiments over map files.
//!
//! Exit codes follow a fixed contract: 0 means the command ran to
//! completion (inconclusive study outcomes included), 2 means the input
//! was unusable, 3 means an internal invariant failed. All randomness is
//! seeded, and report floats print in shortest round-trip form, so a fixed
//! command line reproduces its output byte for byte. `MGL_THREADS` caps
//! worker parallelism.

mod plots;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mgl_core::grid::{map_to_json, GridMap, MapData};
use mgl_core::homotopy::{self, build_homotopy, uniform_t_samples, HomotopyTrace, InterpolantMu};
use mgl_core::majorization;
use mgl_core::region::{self, RegionVerdict};
use mgl_core::report;
use mgl_core::solver::{self, SolverOptions};
use mgl_core::variation;
use mgl_core::{Error as CoreError, SquaredSpectrum};

#[derive(Parser)]
#[command(
    name = "mgl",
    version,
    about = "Minimal graph analysis on model manifolds",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Membership verdicts for inline spectra or every node of a map file
    Region(RegionArgs),
    /// Sampled confinement check of the weak-majorization body of a vector
    Majorize(MajorizeArgs),
    /// Solve the minimal graph equation from boundary data
    Solve(SolveArgs),
    /// Geodesic homotopy between two maps, with confinement, chord
    /// domination, and energy convexity diagnostics
    Homotopy(HomotopyArgs),
    /// Area derivatives and the five-term second variation profile along
    /// the geodesic homotopy between two maps
    Variation(VariationArgs),
    /// Multi-start uniqueness experiment on one boundary file
    Uniqueness(UniquenessArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Named membership regions for squared singular value spectra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RegionChoice {
    /// Pairwise products ≤ 1 and non-negative product-sum expression
    Stable,
    /// Entry sum ≤ 3 − 1/(m−1) and pairwise sums ≤ 2
    SumCap,
    /// Slope ≤ √3·(2 − 1/(m−1))^(1/2) and pairwise sums ≤ 2
    SlopeCap,
    /// Slope ≤ √3, independent of m
    SlopeSqrt3,
}

impl RegionChoice {
    fn label(self) -> &'static str {
        match self {
            RegionChoice::Stable => "stable",
            RegionChoice::SumCap => "sum-cap",
            RegionChoice::SlopeCap => "slope-cap",
            RegionChoice::SlopeSqrt3 => "slope-sqrt3",
        }
    }

    fn verdict(self, a: &SquaredSpectrum) -> RegionVerdict {
        match self {
            RegionChoice::Stable => region::squared_stable(a),
            RegionChoice::SumCap => region::sum_cap(a),
            RegionChoice::SlopeCap => region::slope_cap(a),
            RegionChoice::SlopeSqrt3 => {
                let product: f64 = a.values().iter().map(|&v| 1.0 + v).product();
                let margin = 3.0 - product;
                let member = margin >= -region::BOUNDARY_TOL;
                RegionVerdict {
                    member,
                    on_boundary: member && margin <= region::BOUNDARY_TOL,
                    margin,
                }
            }
        }
    }

    /// The slope-cap uniqueness statement needs m ≥ 3; other regions have
    /// no such restriction.
    fn out_of_scope(self, m: usize) -> bool {
        self == RegionChoice::SlopeCap && !region::slope_cap_in_scope(m)
    }
}

#[derive(Args)]
struct RegionArgs {
    /// Inline spectrum "a1,a2,..." of squared entries, or a map file path;
    /// repeatable for inline spectra
    #[arg(long, required = true)]
    input: Vec<String>,
    #[arg(long, value_enum, default_value_t = RegionChoice::Stable)]
    region: RegionChoice,
    /// Expected spectrum length; inline inputs of any other length are
    /// rejected
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MajorizeArgs {
    /// Source vector "x1,x2,..." of squared entries
    #[arg(long)]
    input: String,
    /// Stated convex subset the source vector must belong to
    #[arg(long, value_enum, default_value_t = RegionChoice::SumCap)]
    region: RegionChoice,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Expected vector length
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Map file carrying at least every boundary node
    #[arg(long)]
    boundary: PathBuf,
    /// Residual tolerance override
    #[arg(long)]
    tol: Option<f64>,
    /// Outer iteration cap override
    #[arg(long)]
    max_outer: Option<usize>,
    /// json embeds the solved map; csv is the graph volume trace per
    /// outer iteration
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the solved map alone, in the map file format
    #[arg(long)]
    map_output: Option<PathBuf>,
}

#[derive(Args)]
struct HomotopyArgs {
    /// Complete map file; give exactly two, the endpoints
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    #[arg(long, default_value_t = 9)]
    t_samples: usize,
    /// Sub-region tested at the endpoints by the confinement check
    #[arg(long, value_enum, default_value_t = RegionChoice::SumCap)]
    region: RegionChoice,
    /// json summarizes diagnostics; csv lists per-node spectra over t
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write here instead of stdout; a .svg path switches to plot
    /// emission with a sidecar csv
    #[arg(long)]
    output: Option<PathBuf>,
    /// Node "i,j" to plot in .svg mode; repeatable, default grid center
    #[arg(long)]
    node: Vec<String>,
}

#[derive(Args)]
struct VariationArgs {
    /// Complete map file; give exactly two, the endpoints
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    #[arg(long, default_value_t = 17)]
    t_samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write here instead of stdout; a .svg path switches to plot
    /// emission with a sidecar csv
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct UniquenessArgs {
    /// Map file carrying at least every boundary node
    #[arg(long)]
    boundary: PathBuf,
    /// Region whose membership lets the uniqueness argument speak
    #[arg(long, value_enum, default_value_t = RegionChoice::SumCap)]
    region: RegionChoice,
    /// Pairwise sup-distance under which converged runs count as one map
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Seed for the perturbed second initialization
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Internal(_) => Failure::Internal(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    mgl_core::exec::init_threads_from_env();
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Region(args) => cmd_region(args),
        Command::Majorize(args) => cmd_majorize(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Homotopy(args) => cmd_homotopy(args),
        Command::Variation(args) => cmd_variation(args),
        Command::Uniqueness(args) => cmd_uniqueness(args),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn input_err(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text)
        .map_err(|e| input_err(format!("cannot write {}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, text: &str) -> CmdResult {
    match output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty_json(value: &serde_json::Value) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Internal(format!("json encoding failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Splits "a,b,c" into floats; `None` when any token fails to parse, which
/// is how inline spectra are told apart from file paths.
fn parse_inline(raw: &str) -> Option<Vec<f64>> {
    let parts: Vec<_> = raw.split(',').map(str::trim).collect();
    if parts.is_empty() || parts.iter().any(|p| p.is_empty()) {
        return None;
    }
    parts.iter().map(|p| p.parse::<f64>().ok()).collect()
}

fn expect_length(m: Option<usize>, len: usize, what: &str) -> CmdResult {
    match m {
        Some(m) if m != len => Err(input_err(format!(
            "{what} has {len} entries, expected m = {m}"
        ))),
        _ => Ok(()),
    }
}

fn csv_quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

fn svg_requested(output: &Option<PathBuf>) -> bool {
    output
        .as_deref()
        .and_then(Path::extension)
        .is_some_and(|ext| ext.eq_ignore_ascii_case("svg"))
}

fn load_complete_map(path: &Path) -> Result<GridMap, Failure> {
    let data = MapData::from_json(&read_file(path)?)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    data.into_map()
        .map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_boundary(path: &Path) -> Result<MapData, Failure> {
    let data = MapData::from_json(&read_file(path)?)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    if !data.covers_boundary() {
        return Err(input_err(format!(
            "{}: every boundary node needs a value",
            path.display()
        )));
    }
    Ok(data)
}

fn endpoint_pair(inputs: &[PathBuf]) -> Result<(GridMap, GridMap), Failure> {
    if inputs.len() != 2 {
        return Err(input_err(format!(
            "give exactly two --input map files, got {}",
            inputs.len()
        )));
    }
    Ok((load_complete_map(&inputs[0])?, load_complete_map(&inputs[1])?))
}

fn build_trace(inputs: &[PathBuf], t_samples: usize) -> Result<HomotopyTrace, Failure> {
    if t_samples < 2 {
        return Err(input_err("--t-samples must be at least 2"));
    }
    let (f0, f1) = endpoint_pair(inputs)?;
    Ok(build_homotopy(&f0, &f1, &uniform_t_samples(t_samples))?)
}

fn cmd_region(args: RegionArgs) -> CmdResult {
    let mut inline = Vec::new();
    let mut files = Vec::new();
    for (idx, raw) in args.input.iter().enumerate() {
        match parse_inline(raw) {
            Some(values) => inline.push((raw.clone(), values)),
            None if raw.contains(',') => {
                let bad = raw
                    .split(',')
                    .map(str::trim)
                    .find(|p| p.parse::<f64>().is_err())
                    .unwrap_or(raw);
                return Err(input_err(format!(
                    "input {} ({raw}): {bad:?} is not a number",
                    idx + 1
                )));
            }
            None => files.push(PathBuf::from(raw)),
        }
    }
    if !files.is_empty() && (!inline.is_empty() || files.len() > 1) {
        return Err(input_err(
            "map file input must be the only --input; inline spectra can repeat",
        ));
    }

    if let Some(path) = files.first() {
        return region_over_map(&args, path);
    }

    let mut rows = Vec::new();
    let mut scope_note = false;
    for (idx, (raw, values)) in inline.iter().enumerate() {
        expect_length(args.m, values.len(), &format!("input {} ({raw})", idx + 1))?;
        let spectrum = SquaredSpectrum::new(values.clone())
            .map_err(|e| input_err(format!("input {} ({raw}): {e}", idx + 1)))?;
        let verdict = args.region.verdict(&spectrum);
        let out_of_scope = args.region.out_of_scope(spectrum.len());
        scope_note |= out_of_scope;
        rows.push((raw.clone(), spectrum, verdict, out_of_scope));
    }
    if scope_note {
        eprintln!(
            "note: the slope-cap uniqueness statement needs m >= 3; \
             verdicts below that are reported but out of theorem scope"
        );
    }

    let text = match args.format {
        Format::Json => {
            let entries: Vec<_> = rows
                .iter()
                .map(|(raw, spectrum, verdict, out_of_scope)| {
                    serde_json::json!({
                        "input": raw,
                        "region": args.region.label(),
                        "values": spectrum.values(),
                        "member": verdict.member,
                        "on_boundary": verdict.on_boundary,
                        "margin": verdict.margin,
                        "out_of_theorem_scope": out_of_scope,
                    })
                })
                .collect();
            pretty_json(&serde_json::Value::Array(entries))?
        }
        Format::Csv => {
            let mut out =
                String::from("input,region,m,member,on_boundary,margin,out_of_theorem_scope\n");
            for (raw, spectrum, verdict, out_of_scope) in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    csv_quote(raw),
                    args.region.label(),
                    spectrum.len(),
                    verdict.member,
                    verdict.on_boundary,
                    report::float_field(verdict.margin),
                    out_of_scope,
                ));
            }
            out
        }
    };
    emit(&args.output, &text)
}

fn region_over_map(args: &RegionArgs, path: &Path) -> CmdResult {
    let map = load_complete_map(path)?;
    let m = map.manifold().dim().min(2);
    expect_length(args.m, m, &format!("map {}", path.display()))?;
    let out_of_scope = args.region.out_of_scope(m);
    if out_of_scope {
        eprintln!(
            "note: node spectra on a planar domain have m = {m}; the \
             slope-cap uniqueness statement needs m >= 3"
        );
    }
    let choice = args.region;
    let field = map.region_field(move |a| choice.verdict(a))?;
    let text = match args.format {
        Format::Csv => report::region_field_csv(&map, &field)?,
        Format::Json => pretty_json(&serde_json::json!({
            "input": path.display().to_string(),
            "region": args.region.label(),
            "m": m,
            "nodes": field.verdicts.iter().filter(|v| v.is_some()).count(),
            "all_member": field.all_member,
            "min_margin": field.min_margin,
            "out_of_theorem_scope": out_of_scope,
        }))?,
    };
    emit(&args.output, &text)
}

fn cmd_majorize(args: MajorizeArgs) -> CmdResult {
    let x = parse_inline(&args.input)
        .ok_or_else(|| input_err(format!("--input {:?} is not a comma-separated vector", args.input)))?;
    expect_length(args.m, x.len(), "source vector")?;
    let choice = args.region;
    let report_data =
        majorization::confinement_check(move |a| choice.verdict(a), &x, args.samples, args.seed)?;
    let text = match args.format {
        Format::Json => pretty_json(&serde_json::json!({
            "input": args.input,
            "region": args.region.label(),
            "seed": args.seed,
            "report": report_data,
        }))?,
        Format::Csv => format!(
            "input,region,seed,samples,escapes,min_region_margin,boundary_hits,worst_sum_gap\n\
             {},{},{},{},{},{},{},{}\n",
            csv_quote(&args.input),
            args.region.label(),
            args.seed,
            report_data.samples,
            report_data.escapes,
            report::float_field(report_data.min_region_margin),
            report_data.boundary_hits,
            report::float_field(report_data.worst_sum_gap),
        ),
    };
    emit(&args.output, &text)
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let data = load_boundary(&args.boundary)?;
    let init = solver::harmonic_extension(&data)?;
    let mut opts = SolverOptions::default();
    if let Some(tol) = args.tol {
        opts.tol_residual = tol;
    }
    if let Some(cap) = args.max_outer {
        opts.max_outer = cap;
    }
    opts.validate()?;
    let outcome = solver::solve(&init, &opts)?;
    if !outcome.converged {
        eprintln!(
            "note: stopped after {} iterations with residual {:e}; \
             the report is still written",
            outcome.iterations, outcome.final_residual
        );
    }
    let text = match args.format {
        Format::Json => {
            let mut text = report::solve_outcome_json(&outcome)?;
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut out = String::from("iteration,graph_volume\n");
            for (k, v) in outcome.volume_history.iter().enumerate() {
                out.push_str(&format!("{k},{}\n", report::float_field(*v)));
            }
            out
        }
    };
    emit(&args.output, &text)?;
    if let Some(path) = &args.map_output {
        write_file(path, &map_to_json(&outcome.map))?;
    }
    Ok(())
}

fn cmd_homotopy(args: HomotopyArgs) -> CmdResult {
    let trace = build_trace(&args.input, args.t_samples)?;
    if svg_requested(&args.output) {
        return homotopy_plots(&args, &trace);
    }
    let text = match args.format {
        Format::Csv => report::trace_csv(&trace)?,
        Format::Json => {
            let choice = args.region;
            let confinement = homotopy::confinement_check(&trace, move |a| choice.verdict(a))?;
            let width = trace.manifold().dim().min(2);
            let mut domination = Vec::new();
            let mut convexity = Vec::new();
            for l in 1..=width {
                domination.push(homotopy::partial_sum_domination(&trace, l, 0.0, 1.0)?);
                convexity.push(homotopy::fk_convexity(&trace, l)?);
            }
            pretty_json(&serde_json::json!({
                "t_samples": trace.t_samples(),
                "region": args.region.label(),
                "confinement": confinement,
                "chord_domination": domination,
                "energy_convexity": convexity,
            }))?
        }
    };
    emit(&args.output, &text)
}

/// Per-node spectrum plots with the chord envelope, one file per node,
/// plus a graph area panel and the trace csv next to them. Everything is
/// rendered before the first write, so a bad node leaves no files behind.
fn homotopy_plots(args: &HomotopyArgs, trace: &HomotopyTrace) -> CmdResult {
    let out = args.output.as_deref().expect("svg mode has a path");
    let domain = trace.domain();
    let mut nodes = Vec::new();
    if args.node.is_empty() {
        nodes.push((domain.nx() / 2, domain.ny() / 2));
    }
    for raw in &args.node {
        let pair: Vec<_> = raw.split(',').map(str::trim).collect();
        let parsed = match pair.as_slice() {
            [a, b] => a.parse::<usize>().ok().zip(b.parse::<usize>().ok()),
            _ => None,
        };
        nodes.push(parsed.ok_or_else(|| input_err(format!("--node {raw:?} is not \"i,j\"")))?);
    }
    for &(i, j) in &nodes {
        if i >= domain.nx() || j >= domain.ny() || !domain.is_active(i, j) {
            return Err(input_err(format!(
                "node ({i},{j}) is not an active node of the {}x{} grid",
                domain.nx(),
                domain.ny()
            )));
        }
    }

    let last = trace.sample_count() - 1;
    let palette = plots::PALETTE;
    let mut rendered = Vec::new();
    for &(i, j) in &nodes {
        let spectrum = |s: usize| {
            trace.spectrum_at(s, i, j).ok_or_else(|| {
                input_err(format!("node ({i},{j}) is not an active grid node"))
            })
        };
        let width = spectrum(0)?.len();
        let chord = InterpolantMu::new(
            0.0,
            1.0,
            spectrum(0)?.clone(),
            spectrum(last)?.clone(),
        )?;
        let mut series = Vec::new();
        for l in 0..width {
            let color = palette[l % palette.len()];
            let curve = trace
                .t_samples()
                .iter()
                .enumerate()
                .map(|(s, &t)| Ok((t, spectrum(s)?.values()[l])))
                .collect::<Result<Vec<_>, Failure>>()?;
            series.push(plots::Series {
                label: format!("lambda_sq_{}", l + 1),
                color,
                dashed: false,
                points: curve,
            });
            let envelope = trace
                .t_samples()
                .iter()
                .map(|&t| (t, chord.eval(t)[l]))
                .collect();
            series.push(plots::Series {
                label: format!("chord_{}", l + 1),
                color,
                dashed: true,
                points: envelope,
            });
        }
        let svg = plots::line_plot(&format!("node ({i},{j}) spectrum over t"), "t", &series)
            .map_err(Failure::Internal)?;
        rendered.push((plot_sibling(out, &format!("_node_{i}_{j}")), svg));
    }

    let area_points = trace
        .t_samples()
        .iter()
        .enumerate()
        .map(|(s, &t)| Ok((t, trace.map_at(s).graph_volume()?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    let area_svg = plots::line_plot(
        "graph area over t",
        "t",
        &[plots::Series {
            label: "area".into(),
            color: palette[0],
            dashed: false,
            points: area_points,
        }],
    )
    .map_err(Failure::Internal)?;
    rendered.push((plot_sibling(out, "_area"), area_svg));

    let csv = report::trace_csv(trace)?;
    for (path, svg) in &rendered {
        write_file(path, svg)?;
    }
    write_file(&out.with_extension("csv"), &csv)
}

fn plot_sibling(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    base.with_file_name(format!("{stem}{suffix}.svg"))
}

fn cmd_variation(args: VariationArgs) -> CmdResult {
    if args.t_samples < 5 {
        return Err(input_err("--t-samples must be at least 5"));
    }
    let trace = build_trace(&args.input, args.t_samples)?;
    let samples = variation::area_derivatives(&trace)?;
    let mut reports = Vec::new();
    for s in 1..trace.sample_count() - 1 {
        reports.push(variation::second_variation_terms(
            &trace,
            trace.t_samples()[s],
        )?);
    }

    if svg_requested(&args.output) {
        let out = args.output.as_deref().expect("svg mode has a path");
        let svg = variation_plot(&reports).map_err(Failure::Internal)?;
        write_file(out, &svg)?;
        return write_file(
            &out.with_extension("csv"),
            &report::variation_csv(&samples, &reports),
        );
    }

    let text = match args.format {
        Format::Csv => report::variation_csv(&samples, &reports),
        Format::Json => pretty_json(&serde_json::json!({
            "samples": samples,
            "reports": reports,
        }))?,
    };
    emit(&args.output, &text)
}

/// Stacked second-variation terms with the analytic total and its finite
/// difference overlay.
fn variation_plot(reports: &[variation::VariationReport]) -> Result<String, String> {
    if reports.is_empty() {
        return Err("variation profile has no interior samples".into());
    }
    let palette = plots::PALETTE;
    let pick = |f: fn(&variation::VariationReport) -> f64| -> Vec<(f64, f64)> {
        reports.iter().map(|r| (r.t, f(r))).collect()
    };
    let series = [
        ("term_i", false, pick(|r| r.term_i)),
        ("term_ii", false, pick(|r| r.term_ii)),
        ("term_iii", false, pick(|r| r.term_iii)),
        ("term_iv", false, pick(|r| r.term_iv)),
        ("term_v", false, pick(|r| r.term_v)),
        ("total", false, pick(|r| r.total)),
        ("fd_total", true, pick(|r| r.fd_total)),
    ];
    let series: Vec<_> = series
        .into_iter()
        .enumerate()
        .map(|(k, (label, dashed, points))| plots::Series {
            label: label.into(),
            color: palette[k % palette.len()],
            dashed,
            points,
        })
        .collect();
    plots::line_plot("second variation terms over t", "t", &series)
}

fn cmd_uniqueness(args: UniquenessArgs) -> CmdResult {
    let data = load_boundary(&args.boundary)?;
    let m = data.manifold.dim().min(2);
    if args.region.out_of_scope(m) {
        eprintln!(
            "note: node spectra on a planar domain have m = {m}; the \
             slope-cap uniqueness statement needs m >= 3"
        );
    }
    let opts = SolverOptions {
        seed: args.seed,
        ..SolverOptions::default()
    };
    let choice = args.region;
    let report_data =
        solver::uniqueness_experiment(&data, move |a| choice.verdict(a), &opts, args.tol)?;
    let mut text = report::uniqueness_json(&report_data)?;
    text.push('\n');
    emit(&args.output, &text)
}
