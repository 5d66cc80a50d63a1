//! Command-line front end. `metsym --help` lists the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::carnot::{build_cc_space, heisenberg_geometry, jerison_check, CCGrid, GridSpec};
use crate::error::{Error, Result};
use crate::functions::Generator;
use crate::maximal::{hl_maximal, sharp_maximal};
use crate::rearrange::{rearrangement, RISpaceSpec};
use crate::space::{doubling_stats_auto, BallIndexSet, Grid, MetricMeasureSpace};
use crate::verify::{
    bi_curve_with, bi_lhs_curve, counterexample_run, embedding_check, faber_krahn, faber_krahn_sup,
    hardy_safeguard, poincare_constant, whole_ball, BiOptions, InequalityReport, SobolevPair,
};

#[derive(Debug, Parser)]
#[command(name = "metsym", version, about = "Symmetrization inequalities on finite metric measure spaces")]
pub struct Cli {
    /// Worker threads (outputs do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write `<out>.json` / `<out>.csv` instead of printing JSON.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Space utilities.
    #[command(subcommand)]
    Space(SpaceCommand),
    /// Decreasing rearrangement of a sampled function, as a step-function CSV.
    Rearrange {
        /// One value per line.
        #[arg(long = "in")]
        input: PathBuf,
        /// One weight per line (unit weights when absent).
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Hardy–Littlewood or sharp maximal function, as a field CSV.
    Maximal {
        #[command(flatten)]
        data: DataArgs,
        /// `hl` or `sharp`.
        #[arg(long, default_value = "hl")]
        kind: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// Inequality scanners.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Ratio table for `f_k = min(1, k|x|)` on `[-1,1]²`.
    Counterexample {
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        k: Vec<f64>,
        #[arg(long, default_value_t = 512)]
        n: usize,
        /// Probe points `t = τ·|Ω|`.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.999")]
        tau: Vec<f64>,
    },
    /// Carnot–Carathéodory lattices.
    #[command(subcommand)]
    Carnot(CarnotCommand),
}

#[derive(Debug, Subcommand)]
pub enum SpaceCommand {
    /// Sampled doubling constant.
    Stats {
        #[arg(long)]
        space: String,
        /// Number of sampled centers.
        #[arg(long)]
        centers: Option<usize>,
    },
    /// Dense JSON export of a space.
    Export {
        #[arg(long)]
        space: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    Poincare(VerifyArgs),
    Bi(VerifyArgs),
    BiLhs(VerifyArgs),
    Embed(VerifyArgs),
    FaberKrahn(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// `grid1d:N`, `grid2d:N`, `grid3d:N` (unit cube), `grid2d:N:a:b`, or a space JSON path.
    #[arg(long)]
    pub space: String,
    /// A generator (`sinprod`, `cone:R`, `hat:R`, `fk:k`, `coord:i`, `const:c`) or a values file.
    #[arg(long)]
    pub f: Option<String>,
    /// Gradient surrogate; defaults to the grid gradient of `f`.
    #[arg(long)]
    pub g: Option<String>,
    /// Enclosing ball as `center:radius` (default: the whole space).
    #[arg(long)]
    pub b0: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub c2: f64,
    /// Target space of the embedding, e.g. `lp:2`, `lorentz:2,1`, `hbw:2`.
    #[arg(long, default_value = "lp:2")]
    pub y: String,
    /// Space of the gradient in Faber–Krahn.
    #[arg(long, default_value = "lp:1")]
    pub z: String,
    /// Subtract the `B0` mean of `f` first.
    #[arg(long)]
    pub zero_average: bool,
    /// Faber–Krahn: run only the sup-norm part.
    #[arg(long)]
    pub sup: bool,
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    /// Grid spec JSON; overrides the flags below.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, default_value = "heisenberg")]
    pub fields: String,
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    #[arg(long, default_value_t = 16)]
    pub directions: usize,
    /// Lattice box, `lo:hi` per axis separated by commas.
    #[arg(long, default_value = "-0.6:0.6,-0.6:0.6,-0.08:0.08")]
    pub extent: String,
    /// Window box in the same format.
    #[arg(long, default_value = "-0.3:0.3,-0.3:0.3,-0.02:0.02")]
    pub window: String,
}

#[derive(Debug, Subcommand)]
pub enum CarnotCommand {
    /// Builds the window space; writes the space JSON and the dense distance CSV.
    Build(LatticeArgs),
    /// Poincaré constant of `(f, |Xf|)` on the window.
    Jerison {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value = "coord:0")]
        f: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
    /// Heisenberg distances and volume growth from the origin.
    Geometry {
        #[arg(long, default_value_t = 0.02)]
        h: f64,
        #[arg(long, default_value_t = 16)]
        directions: usize,
    },
}

/// A loaded space, with its grid when it came from a grid spec.
pub struct Domain {
    pub space: MetricMeasureSpace,
    pub grid: Option<Grid>,
}

pub fn load_space(spec: &str) -> Result<Domain> {
    let parts: Vec<&str> = spec.split(':').collect();
    let dim = match parts[0] {
        "grid1d" => Some(1),
        "grid2d" => Some(2),
        "grid3d" => Some(3),
        _ => None,
    };
    match dim {
        Some(d) => {
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?} in {spec:?}")));
            let n: usize = parts
                .get(1)
                .and_then(|s| s.parse().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Parse(format!("{spec:?} needs a positive cell count")))?;
            let (a, b) = match parts.len() {
                2 => (0.0, 1.0),
                4 => (num(parts[2])?, num(parts[3])?),
                _ => return Err(Error::Parse(format!("expected {}:N or {}:N:a:b", parts[0], parts[0]))),
            };
            if !(a < b) {
                return Err(Error::Parse(format!("empty box [{a}, {b}]")));
            }
            let grid = Grid::cube(d, a, b, n);
            Ok(Domain { space: grid.space(), grid: Some(grid) })
        }
        None => Ok(Domain { space: MetricMeasureSpace::load(spec)?, grid: None }),
    }
}

/// Numbers one per line (commas also split); a non-numeric first line is a header.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for cell in line.split(',').map(str::trim).filter(|c| !c.is_empty()) {
            match cell.parse::<f64>() {
                Ok(v) => out.push(v),
                Err(_) if i == 0 => break,
                Err(_) => return Err(Error::Parse(format!("{}:{}: not a number: {cell:?}", path.display(), i + 1))),
            }
        }
    }
    Ok(out)
}

fn values(source: &str, domain: &Domain) -> Result<Vec<f64>> {
    if Path::new(source).exists() {
        return read_values(Path::new(source));
    }
    let gen: Generator = source.parse()?;
    match &domain.grid {
        Some(grid) => Ok(gen.sample(grid)),
        None => Err(Error::Argument(format!("generator {source:?} needs a grid space"))),
    }
}

fn pair(data: &DataArgs, domain: &Domain) -> Result<SobolevPair> {
    let f = values(data.f.as_deref().ok_or_else(|| Error::Argument("--f is required".into()))?, domain)?;
    match (&data.g, &domain.grid) {
        (Some(g), _) => SobolevPair::new(f, values(g, domain)?, crate::verify::GradientSource::Supplied),
        (None, Some(grid)) => SobolevPair::euclidean(grid, f),
        (None, None) => Err(Error::Argument("--g is required off grids".into())),
    }
}

fn enclosing(data: &DataArgs, space: &MetricMeasureSpace) -> Result<BallIndexSet> {
    match &data.b0 {
        None => whole_ball(space),
        Some(s) => {
            let (c, r) = s.split_once(':').ok_or_else(|| Error::Parse(format!("--b0 expects center:radius, got {s:?}")))?;
            let c: usize = c.parse().map_err(|_| Error::Parse(format!("bad center {c:?}")))?;
            let r: f64 = r.parse().map_err(|_| Error::Parse(format!("bad radius {r:?}")))?;
            space.ball(c, r)
        }
    }
}

fn parse_box(s: &str) -> Result<Vec<[f64; 2]>> {
    s.split(',')
        .map(|axis| {
            let (a, b) = axis.split_once(':').ok_or_else(|| Error::Parse(format!("expected lo:hi, got {axis:?}")))?;
            let num = |x: &str| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {x:?}")));
            Ok([num(a)?, num(b)?])
        })
        .collect()
}

fn lattice(args: &LatticeArgs) -> Result<CCGrid> {
    let spec = match &args.grid {
        Some(path) => serde_json::from_str::<GridSpec>(&fs::read_to_string(path)?)?,
        None => {
            let extents = parse_box(&args.extent)?;
            let fields: crate::carnot::VectorFieldSystem = args.fields.parse()?;
            if extents.len() != fields.dim() {
                return Err(Error::Argument(format!("{} needs {} extents", args.fields, fields.dim())));
            }
            match fields.kind() {
                crate::carnot::FieldKind::Heisenberg => GridSpec::heisenberg(args.h, extents[0], extents[2], args.directions),
                _ => {
                    let resolution = extents.iter().map(|[a, b]| ((b - a) / args.h).round() as usize + 1).collect();
                    GridSpec { extents, resolution, fields: args.fields.clone(), h: args.h, directions: args.directions }
                }
            }
        }
    };
    CCGrid::new(spec)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn stdout(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

/// Output sink: prints the JSON or writes `<out>.json` and `<out>.csv`.
struct Sink<'a> {
    out: Option<&'a Path>,
}

impl Sink<'_> {
    fn emit(&self, json: &str, csv: Option<&str>) -> Result<()> {
        match self.out {
            None => stdout(&format!("{json}\n"))?,
            Some(prefix) => {
                fs::write(prefix.with_extension("json"), json)?;
                if let Some(csv) = csv {
                    fs::write(prefix.with_extension("csv"), csv)?;
                }
            }
        }
        Ok(())
    }

    fn csv(&self, csv: &str) -> Result<()> {
        match self.out {
            None => stdout(csv)?,
            Some(prefix) => fs::write(prefix.with_extension("csv"), csv)?,
        }
        Ok(())
    }

    fn report(&self, r: &InequalityReport) -> Result<()> {
        self.emit(&r.to_json()?, Some(&r.to_csv()))
    }

    fn value(&self, v: &impl Serialize) -> Result<()> {
        self.emit(&serde_json::to_string_pretty(v)?, None)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Argument(e.to_string()))?
            .install(|| dispatch(&cli)),
        None => dispatch(&cli),
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let sink = Sink { out: cli.out.as_deref() };
    match &cli.command {
        Command::Space(SpaceCommand::Stats { space, centers }) => {
            let d = load_space(space)?;
            let picked: Option<Vec<usize>> =
                centers.map(|k| (0..d.space.len()).step_by((d.space.len() / k.max(1)).max(1)).collect());
            let stats = doubling_stats_auto(&d.space, picked.as_deref())?;
            sink.emit(&serde_json::to_string_pretty(&stats)?, Some(&stats.to_csv()))
        }
        Command::Space(SpaceCommand::Export { space }) => {
            let d = load_space(space)?;
            sink.emit(&d.space.to_json()?, None)
        }
        Command::Rearrange { input, weights } => {
            let f = read_values(input)?;
            let w = match weights {
                Some(p) => read_values(p)?,
                None => vec![1.0; f.len()],
            };
            sink.csv(&rearrangement(&f, &w)?.to_csv())
        }
        Command::Maximal { data, kind, p, q } => {
            let d = load_space(&data.space)?;
            let field = match kind.as_str() {
                "hl" => {
                    let src = data.g.as_deref().or(data.f.as_deref()).ok_or_else(|| Error::Argument("--g or --f is required".into()))?;
                    hl_maximal(&d.space, &values(src, &d)?)?
                }
                "sharp" => {
                    let f = values(data.f.as_deref().ok_or_else(|| Error::Argument("--f is required".into()))?, &d)?;
                    sharp_maximal(&d.space, &f, &enclosing(data, &d.space)?, *p, *q)?
                }
                other => return Err(Error::Parse(format!("unknown maximal kind {other:?}"))),
            };
            sink.csv(&field.to_csv())
        }
        Command::Verify(v) => verify(v, cli.seed, &sink),
        Command::Counterexample { k, n, tau } => {
            let table = counterexample_run(k, *n, tau)?;
            sink.emit(&serde_json::to_string_pretty(&table)?, Some(&table.to_csv()))
        }
        Command::Carnot(CarnotCommand::Build(args)) => {
            let grid = lattice(args)?;
            let cc = build_cc_space(&grid, &parse_box(&args.window)?)?;
            sink.emit(&cc.space.to_json()?, Some(&cc.distance_csv()))
        }
        Command::Carnot(CarnotCommand::Jerison { lattice: args, f, p, radii }) => {
            let grid = lattice(args)?;
            let cc = build_cc_space(&grid, &parse_box(&args.window)?)?;
            let gen: Generator = f.parse()?;
            let fv: Vec<f64> = (0..grid.len()).map(|i| gen.eval(&grid.coords(i))).collect();
            sink.report(&jerison_check(&cc, &grid, &fv, *p, radii.as_deref())?)
        }
        Command::Carnot(CarnotCommand::Geometry { h, directions }) => sink.value(&heisenberg_geometry(*h, *directions)?),
    }
}

fn verify(cmd: &VerifyCommand, seed: u64, sink: &Sink) -> Result<()> {
    let a = match cmd {
        VerifyCommand::Poincare(a)
        | VerifyCommand::Bi(a)
        | VerifyCommand::BiLhs(a)
        | VerifyCommand::Embed(a)
        | VerifyCommand::FaberKrahn(a) => a,
    };
    let d = load_space(&a.data.space)?;
    let b0 = enclosing(&a.data, &d.space)?;
    let opts = BiOptions { zero_average: a.zero_average, ..BiOptions::default() };
    let report = match cmd {
        VerifyCommand::Poincare(_) => poincare_constant(&d.space, &pair(&a.data, &d)?, a.p, a.q, a.sigma, &b0)?,
        VerifyCommand::Bi(_) => bi_curve_with(&d.space, &b0, &pair(&a.data, &d)?, a.p, a.q, a.s, a.c2, &opts)?,
        VerifyCommand::BiLhs(_) => {
            let f = values(a.data.f.as_deref().ok_or_else(|| Error::Argument("--f is required".into()))?, &d)?;
            bi_lhs_curve(&d.space, &b0, &f, a.p, a.q, a.c2, &opts)?
        }
        VerifyCommand::Embed(_) => {
            let y: RISpaceSpec = a.y.parse()?;
            let mut r = embedding_check(&d.space, &b0, &pair(&a.data, &d)?, a.p, a.q, a.s, &y, a.zero_average)?;
            let guard = hardy_safeguard(&y, a.p, seed)?;
            r = r.param("hardy_stable", guard.stable).param("hardy_max", guard.max);
            r
        }
        VerifyCommand::FaberKrahn(_) => {
            let z: RISpaceSpec = a.z.parse()?;
            let pr = pair(&a.data, &d)?;
            if a.sup {
                faber_krahn_sup(&d.space, &b0, &pr, a.q, a.s, &z, a.c2)?
            } else {
                let fk = faber_krahn(&d.space, &b0, &pr, a.p, a.q, a.s, &z, a.c2)?;
                if let Some(n) = &fk.notice {
                    eprintln!("{n}");
                }
                return sink.value(&fk);
            }
        }
    };
    sink.report(&report)
}

/// Process exit status for an error: 2 for violated hypotheses, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_hypothesis_violation() {
        2
    } else {
        1
    }
}
