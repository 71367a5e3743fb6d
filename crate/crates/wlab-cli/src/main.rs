//! Command-line front end. Every subcommand writes one CSV or JSON table to
//! standard output; progress and notes go to standard error. Identical
//! invocations produce identical bytes: no randomness, no threads, sorted
//! emission everywhere.

use std::fmt::Display;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use wlab::energy::{dirichlet_solve, energy, resistance, resistance_dimension, Normalization};
use wlab::geometry::{box_dimension_fit, edge_heights, fixed_point, polygons, vertex_chain, Word};
use wlab::measure::{cell_measure, WeightMode};
use wlab::reference::{
    gasket_constants, interval_energy_table, interval_resistance, IntervalWeight,
};
use wlab::spectral::{
    counting_function, decimation_tree, direct_spectrum, oracle_spectrum, weyl_analysis,
    CountingScale, NodeOrigin, Provenance, Spectrum,
};
use wlab::WeierstrassParams;

#[derive(Parser)]
#[command(
    name = "wlab",
    version,
    about = "Self-affine graph toolkit: geometry, measures, energy forms, and Dirichlet spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate parameters and print the derived constants.
    Params(ParamArgs),
    /// Vertex chain of a level: index, coordinates, boundary flag.
    Vertices(LevelArgs),
    /// Level polygons, one row per polygon vertex.
    Polygons(LevelArgs),
    /// Edge widths and heights with the two-sided bounds.
    Heights(LevelArgs),
    /// Per-level box counts and the log-log dimension estimate.
    Boxdim(BoxdimArgs),
    /// Raw and normalized cell measures at a level.
    Measure(LevelArgs),
    /// Energy of the canonical harmonic function, level by level.
    Energy(EnergyArgs),
    /// Values of the canonical harmonic function on a level chain.
    Harmonic(LevelArgs),
    /// Effective resistances between boundary vertices.
    Resistance(EnergyArgs),
    /// Box and resistance dimensions with the regime case.
    Dimension(ParamArgs),
    /// Dirichlet spectrum of a level, dense solve or closed form.
    Spectrum(SpectrumArgs),
    /// Spectral-decimation tree with branch bookkeeping.
    Decimate(LevelArgs),
    /// Eigenvalue counting function at one threshold.
    Counting(CountingArgs),
    /// Counting-growth table and log-periodic samples.
    Weyl(LevelArgs),
    /// Closed-form anchors: gasket constants and interval energies.
    Reference(FormatArgs),
}

#[derive(Args)]
struct ParamArgs {
    /// Vertical contraction ratio, in (0, 1).
    #[arg(long)]
    lambda: f64,
    /// Horizontal subdivision base, an integer >= 2.
    #[arg(long)]
    nb: usize,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct LevelArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    nb: usize,
    /// Construction level (tree depth for decimate, top level for weyl).
    #[arg(long)]
    level: usize,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    nb: usize,
    #[arg(long)]
    level: usize,
    /// Edge-weight normalization.
    #[arg(long, value_enum, default_value_t = Mode::Paper)]
    mode: Mode,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct BoxdimArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    nb: usize,
    /// Top level of the fit range 2..=level (at least 3).
    #[arg(long)]
    level: usize,
    /// Extra sampling depth: each level m is sampled on the level m+refine chain.
    #[arg(long, default_value_t = 4)]
    refine: usize,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    nb: usize,
    #[arg(long)]
    level: usize,
    /// Dense eigensolve or the closed-form path spectrum.
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    method: Method,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct CountingArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    nb: usize,
    #[arg(long)]
    level: usize,
    /// Eigenvalue scale applied before thresholding.
    #[arg(long, value_enum, default_value_t = Scale::Paper)]
    scale: Scale,
    /// Threshold, a real number or "max" for the top of the scaled spectrum.
    #[arg(long, default_value = "max")]
    x: String,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct FormatArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Weight ratio nb/lambda^2 per level.
    Paper,
    /// Weight ratio nb per level (level-invariant energies).
    Conservative,
}

impl Mode {
    fn normalization(self) -> Normalization {
        match self {
            Mode::Paper => Normalization::Scaling,
            Mode::Conservative => Normalization::Conservative,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Mode::Paper => "paper",
            Mode::Conservative => "conservative",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    /// Raw eigenvalues in (0, 4).
    None,
    /// Eigenvalues multiplied by eta * nb^level.
    Paper,
}

impl Scale {
    fn counting(self) -> CountingScale {
        match self {
            Scale::None => CountingScale::Raw,
            Scale::Paper => CountingScale::Renormalized,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Scale::None => "none",
            Scale::Paper => "paper",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    Oracle,
}

enum Field {
    UInt(u64),
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::UInt(v) => v.to_string(),
            Field::Int(v) => v.to_string(),
            Field::Float(v) => format!("{v:.14e}"),
            Field::Text(v) => v.clone(),
            Field::Bool(v) => v.to_string(),
            Field::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Field::UInt(v) => (*v).into(),
            Field::Int(v) => (*v).into(),
            Field::Float(v) => (*v).into(),
            Field::Text(v) => v.clone().into(),
            Field::Bool(v) => (*v).into(),
            Field::Empty => serde_json::Value::Null,
        }
    }
}

struct Table {
    columns: &'static [&'static str],
    rows: Vec<Vec<Field>>,
}

enum RunError {
    Validation(String),
    Internal(anyhow::Error),
}

fn invalid<E: Display>(e: E) -> RunError {
    RunError::Validation(e.to_string())
}

fn emit(table: &Table, format: Format) -> Result<(), RunError> {
    let internal = |e: anyhow::Error| RunError::Internal(e);
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(std::io::stdout().lock());
            writer
                .write_record(table.columns)
                .map_err(|e| internal(e.into()))?;
            for row in &table.rows {
                debug_assert_eq!(row.len(), table.columns.len());
                writer
                    .write_record(row.iter().map(Field::csv))
                    .map_err(|e| internal(e.into()))?;
            }
            writer.flush().map_err(|e| internal(e.into()))?;
        }
        Format::Json => {
            let records: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    // serde_json's default map is ordered by key, so the
                    // serialization is deterministic.
                    let map: serde_json::Map<String, serde_json::Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, f)| (c.to_string(), f.json()))
                        .collect();
                    serde_json::Value::Object(map)
                })
                .collect();
            let doc = serde_json::json!({ "schema_version": "1", "records": records });
            let mut out = std::io::stdout().lock();
            serde_json::to_writer(&mut out, &doc).map_err(|e| internal(e.into()))?;
            writeln!(out).map_err(|e| internal(e.into()))?;
        }
    }
    Ok(())
}

fn strict_params(lambda: f64, nb: usize) -> Result<WeierstrassParams, RunError> {
    WeierstrassParams::new(lambda, nb, true).map_err(invalid)
}

/// Boundary data used by the energy, harmonic, and resistance commands: the
/// heights of the level-0 vertices.
fn canonical_boundary(p: &WeierstrassParams) -> Result<Vec<f64>, RunError> {
    (0..p.nb())
        .map(|i| fixed_point(p, i).map(|pt| pt.y).map_err(invalid))
        .collect()
}

fn spectrum_table(s: &Spectrum) -> Table {
    let provenance = match s.provenance() {
        Provenance::Direct => "direct",
        Provenance::Decimation => "decimation",
        Provenance::Oracle => "oracle",
    };
    Table {
        columns: &["value", "multiplicity", "provenance"],
        rows: s
            .entries()
            .iter()
            .map(|e| {
                vec![
                    Field::Float(e.value),
                    Field::UInt(e.multiplicity as u64),
                    Field::Text(provenance.to_string()),
                ]
            })
            .collect(),
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Params(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let table = Table {
                columns: &["lambda", "nb", "d_w", "eta"],
                rows: vec![vec![
                    Field::Float(p.lambda()),
                    Field::UInt(p.nb() as u64),
                    Field::Float(p.d_w()),
                    Field::Float(p.eta()),
                ]],
            };
            emit(&table, args.format.format)
        }
        Command::Vertices(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let chain = vertex_chain(&p, args.level).map_err(invalid)?;
            let table = Table {
                columns: &["index", "x", "y", "boundary"],
                rows: chain
                    .vertices()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        vec![
                            Field::UInt(i as u64),
                            Field::Float(v.x),
                            Field::Float(v.y),
                            Field::Bool(chain.is_boundary(i)),
                        ]
                    })
                    .collect(),
            };
            emit(&table, args.format.format)
        }
        Command::Polygons(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let cells = polygons(&p, args.level).map_err(invalid)?;
            let mut rows = Vec::new();
            for poly in &cells {
                for (t, v) in poly.vertices.iter().enumerate() {
                    rows.push(vec![
                        Field::UInt(poly.index as u64),
                        Field::UInt(t as u64),
                        Field::Float(v.x),
                        Field::Float(v.y),
                    ]);
                }
            }
            let table = Table {
                columns: &["polygon", "vertex", "x", "y"],
                rows,
            };
            emit(&table, args.format.format)
        }
        Command::Heights(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let heights = edge_heights(&p, args.level).map_err(invalid)?;
            let table = Table {
                columns: &[
                    "polygon",
                    "edge",
                    "width",
                    "height",
                    "lower_bound",
                    "upper_bound",
                ],
                rows: heights
                    .iter()
                    .map(|h| {
                        vec![
                            Field::UInt(h.polygon as u64),
                            Field::UInt(h.edge as u64),
                            Field::Float(h.width),
                            Field::Float(h.height),
                            Field::Float(h.lower_bound),
                            Field::Float(h.upper_bound),
                        ]
                    })
                    .collect(),
            };
            emit(&table, args.format.format)
        }
        Command::Boxdim(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            if args.level < 3 {
                return Err(RunError::Validation(
                    "boxdim needs --level >= 3 for a two-point fit over 2..=level".into(),
                ));
            }
            eprintln!(
                "fitting levels 2..={} at sampling depth +{} ...",
                args.level, args.refine
            );
            let fit = box_dimension_fit(&p, 2..=args.level, 1, args.refine).map_err(invalid)?;
            let table = Table {
                columns: &["level", "n_sub", "depth", "side", "count", "bound", "slope"],
                rows: fit
                    .points
                    .iter()
                    .map(|b| {
                        vec![
                            Field::UInt(b.level as u64),
                            Field::UInt(b.n_sub as u64),
                            Field::UInt(b.depth as u64),
                            Field::Float(b.side),
                            Field::UInt(b.count),
                            Field::Float(b.bound),
                            Field::Float(fit.slope),
                        ]
                    })
                    .collect(),
            };
            emit(&table, args.format.format)
        }
        Command::Measure(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let cells = p.nb_pow(args.level).ok_or_else(|| {
                RunError::Validation(format!("level {} overflows the cell index", args.level))
            })?;
            let mut rows = Vec::with_capacity(cells);
            for j in 0..cells {
                let word = Word::from_index(j, args.level, p.nb());
                let raw = cell_measure(&p, &word, WeightMode::Raw).map_err(invalid)?;
                let normalized =
                    cell_measure(&p, &word, WeightMode::Normalized).map_err(invalid)?;
                rows.push(vec![
                    Field::UInt(j as u64),
                    Field::Float(raw),
                    Field::Float(normalized),
                ]);
            }
            let table = Table {
                columns: &["cell", "raw", "normalized"],
                rows,
            };
            emit(&table, args.format.format)
        }
        Command::Energy(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let boundary = canonical_boundary(&p)?;
            let mode = args.mode.normalization();
            let mut rows = Vec::new();
            for m in 0..=args.level {
                let u = dirichlet_solve(&p, m, &boundary).map_err(invalid)?;
                let e = energy(&p, m, &u, mode).map_err(invalid)?;
                rows.push(vec![
                    Field::UInt(m as u64),
                    Field::Text(args.mode.label().to_string()),
                    Field::Float(mode.weight_ratio(&p).powi(m as i32) / (p.eta() * p.eta())),
                    Field::Float(e),
                ]);
            }
            let table = Table {
                columns: &["level", "mode", "weight", "energy"],
                rows,
            };
            emit(&table, args.format.format)
        }
        Command::Harmonic(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let boundary = canonical_boundary(&p)?;
            let u = dirichlet_solve(&p, args.level, &boundary).map_err(invalid)?;
            let width = p.width(args.level);
            let table = Table {
                columns: &["index", "x", "u"],
                rows: u
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        vec![
                            Field::UInt(i as u64),
                            Field::Float(i as f64 * width),
                            Field::Float(v),
                        ]
                    })
                    .collect(),
            };
            emit(&table, args.format.format)
        }
        Command::Resistance(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let chain = vertex_chain(&p, args.level).map_err(invalid)?;
            let mode = args.mode.normalization();
            let mut rows = Vec::new();
            let boundary = chain.boundary_indices();
            for (a, &i) in boundary.iter().enumerate() {
                for &j in &boundary[a + 1..] {
                    let r = resistance(&p, args.level, i, j, mode).map_err(invalid)?;
                    rows.push(vec![
                        Field::UInt(i as u64),
                        Field::UInt(j as u64),
                        Field::Float(r),
                    ]);
                }
            }
            let table = Table {
                columns: &["i", "j", "resistance"],
                rows,
            };
            emit(&table, args.format.format)
        }
        Command::Dimension(args) => {
            let p = WeierstrassParams::new(args.lambda, args.nb, false).map_err(invalid)?;
            let (case, d) = resistance_dimension(&p).map_err(invalid)?;
            let table = Table {
                columns: &["lambda", "nb", "d_w", "case", "d", "alpha"],
                rows: vec![vec![
                    Field::Float(p.lambda()),
                    Field::UInt(p.nb() as u64),
                    Field::Float(p.d_w()),
                    Field::Text(case.label().to_string()),
                    Field::Float(d),
                    Field::Float(wlab::energy::weyl_exponent(d)),
                ]],
            };
            emit(&table, args.format.format)
        }
        Command::Spectrum(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let s = match args.method {
                Method::Direct => direct_spectrum(&p, args.level).map_err(invalid)?,
                Method::Oracle => oracle_spectrum(&p, args.level).map_err(invalid)?,
            };
            emit(&spectrum_table(&s), args.format.format)
        }
        Command::Decimate(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let tree = decimation_tree(&p, args.level).map_err(invalid)?;
            // Rows sorted by (level, value); parents always precede children,
            // so the parent column can reference earlier row numbers.
            let mut order: Vec<usize> = (0..tree.nodes.len()).collect();
            order.sort_by(|&a, &b| {
                let (na, nb_) = (&tree.nodes[a], &tree.nodes[b]);
                na.level
                    .cmp(&nb_.level)
                    .then(na.value.total_cmp(&nb_.value))
            });
            let mut row_of = vec![0usize; tree.nodes.len()];
            for (row, &node) in order.iter().enumerate() {
                row_of[node] = row;
            }
            let rows = order
                .iter()
                .map(|&idx| {
                    let node = &tree.nodes[idx];
                    let (newborn, parent, epsilon, root) = match node.origin {
                        NodeOrigin::Newborn => (true, Field::Empty, Field::Empty, Field::Empty),
                        NodeOrigin::Continued {
                            parent,
                            epsilon,
                            root_index,
                        } => (
                            false,
                            Field::UInt(row_of[parent] as u64),
                            Field::Int(epsilon.signum() as i64),
                            Field::UInt(root_index as u64),
                        ),
                    };
                    vec![
                        Field::UInt(node.level as u64),
                        Field::Float(node.value),
                        Field::Bool(newborn),
                        parent,
                        epsilon,
                        root,
                    ]
                })
                .collect();
            for report in &tree.reports {
                if !report.unmatched.is_empty() {
                    eprintln!(
                        "note: level {}: {} decimation values missing from the spectrum",
                        report.level,
                        report.unmatched.len()
                    );
                }
                let (claimed, observed): (usize, usize) = report
                    .claims
                    .iter()
                    .fold((0, 0), |acc, c| (acc.0 + c.claimed, acc.1 + c.observed));
                if report.claims.iter().any(|c| c.claimed != c.observed) {
                    eprintln!(
                        "note: level {}: stated multiplicities sum to {claimed} over the \
                         tracked values, eigensolve observes {observed}",
                        report.level
                    );
                }
            }
            let table = Table {
                columns: &[
                    "level",
                    "value",
                    "is_newborn",
                    "parent",
                    "epsilon",
                    "root_index",
                ],
                rows,
            };
            emit(&table, args.format.format)
        }
        Command::Counting(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let scale = args.scale.counting();
            let factor = scale.factor(&p, args.level);
            let x = if args.x == "max" {
                let top = direct_spectrum(&p, args.level)
                    .map_err(invalid)?
                    .max_value()
                    .expect("a level >= 1 spectrum is nonempty");
                top * factor
            } else {
                args.x.parse::<f64>().map_err(|_| {
                    RunError::Validation(format!(
                        "--x expects a real number or \"max\", got {:?}",
                        args.x
                    ))
                })?
            };
            let count = counting_function(&p, args.level, x, scale).map_err(invalid)?;
            let table = Table {
                columns: &["level", "scale", "x", "count"],
                rows: vec![vec![
                    Field::UInt(args.level as u64),
                    Field::Text(args.scale.label().to_string()),
                    Field::Float(x),
                    Field::UInt(count as u64),
                ]],
            };
            emit(&table, args.format.format)
        }
        Command::Weyl(args) => {
            let p = strict_params(args.lambda, args.nb)?;
            let analysis = weyl_analysis(&p, 1..=args.level).map_err(invalid)?;
            let mut rows = Vec::new();
            for g in &analysis.growth {
                rows.push(vec![
                    Field::Text("growth".into()),
                    Field::UInt(g.level as u64),
                    Field::UInt(g.total as u64),
                    Field::Float(g.ln_total_over_level),
                    Field::Empty,
                    Field::Empty,
                    Field::Empty,
                ]);
            }
            for s in &analysis.samples {
                rows.push(vec![
                    Field::Text("sample".into()),
                    Field::UInt(s.level as u64),
                    Field::Empty,
                    Field::Empty,
                    Field::Float(s.x),
                    Field::UInt(s.count as u64),
                    Field::Float(s.ratio),
                ]);
            }
            let table = Table {
                columns: &[
                    "kind",
                    "level",
                    "total",
                    "ln_total_over_level",
                    "x",
                    "count",
                    "ratio",
                ],
                rows,
            };
            emit(&table, args.format.format)
        }
        Command::Reference(args) => {
            let g = gasket_constants();
            let mut rows = vec![
                vec![
                    Field::Text("constant".into()),
                    Field::Text("r_sg".into()),
                    Field::Empty,
                    Field::Float(g.r_sg),
                ],
                vec![
                    Field::Text("constant".into()),
                    Field::Text("beta_sg".into()),
                    Field::Empty,
                    Field::Float(g.beta_sg),
                ],
                vec![
                    Field::Text("constant".into()),
                    Field::Text("d_sg".into()),
                    Field::Empty,
                    Field::Float(g.d_sg),
                ],
            ];
            let (x, y) = (0.25, 0.75);
            let r = interval_resistance(x, y).map_err(invalid)?;
            rows.push(vec![
                Field::Text("interval".into()),
                Field::Text("x".into()),
                Field::Empty,
                Field::Float(x),
            ]);
            rows.push(vec![
                Field::Text("interval".into()),
                Field::Text("y".into()),
                Field::Empty,
                Field::Float(y),
            ]);
            rows.push(vec![
                Field::Text("interval".into()),
                Field::Text("resistance".into()),
                Field::Empty,
                Field::Float(r),
            ]);
            rows.push(vec![
                Field::Text("interval".into()),
                Field::Text("energy_limit".into()),
                Field::Empty,
                Field::Float(1.0 / r),
            ]);
            for weight in [IntervalWeight::Doubling, IntervalWeight::Halving] {
                for row in interval_energy_table(x, y, 12, weight).map_err(invalid)? {
                    rows.push(vec![
                        Field::Text("energy".into()),
                        Field::Text(weight.label().into()),
                        Field::UInt(row.p as u64),
                        Field::Float(row.energy),
                    ]);
                }
            }
            let table = Table {
                columns: &["kind", "name", "p", "value"],
                rows,
            };
            emit(&table, args.format)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion)
                || e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // One parse-failure line; clap's multi-line usage text stays out
            // of the stream.
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Internal(e)) => {
            // A reader that stops early (wlab ... | head) is not worth a
            // diagnostic.
            let broken_pipe = e.chain().any(|c| {
                c.downcast_ref::<std::io::Error>()
                    .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            });
            if !broken_pipe {
                eprintln!("error: {e}");
            }
            ExitCode::FAILURE
        }
    }
}
