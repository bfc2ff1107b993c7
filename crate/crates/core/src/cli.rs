//! Command-line front end.
//!
//! Exit codes: 0 success (including non-exact `gh` results), 1 invalid input,
//! 2 resource limit exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::chain::{chain_witness, components_at_scale};
use crate::error::{Error, Result};
use crate::generators;
use crate::gh::{gh_bounds, gh_exact, GhLimits};
use crate::io::{self, PartitionDoc, SampledDtDoc, UltrametricDoc};
use crate::kuratowski::{dt_connectivity_check, sample_dt};
use crate::metric::{
    product, validate_metric, FiniteMetricSpace, ProductNorm, DEFAULT_MAX_POINTS, DEFAULT_TOL,
};
use crate::ultra::{minimum_spanning_tree, subdominant};

/// Names a TOML file with `tolerance`, `max_nodes` and `timeout` defaults.
pub const CONFIG_ENV: &str = "ULTRAGH_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ultragh",
    version,
    about = "Finite metric spaces, ultrametrics and Gromov-Hausdorff distances"
)]
struct Cli {
    /// Emit JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    /// Write results to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Absolute tolerance for metric validation.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the metric axioms.
    Validate { file: PathBuf },
    /// Subdominant ultrametric U(X).
    Ultra { file: PathBuf },
    /// Largest minimum-spanning-tree edge, i.e. diam U(X).
    Bottleneck { file: PathBuf },
    /// Chain components or a chain witness at scale eps.
    Chain {
        file: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, conflicts_with = "witness")]
        components: bool,
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
        witness: Option<Vec<String>>,
    },
    /// Gromov-Hausdorff distance.
    Gh {
        file_x: PathBuf,
        file_y: PathBuf,
        #[arg(long, conflicts_with = "bounds")]
        exact: bool,
        #[arg(long)]
        bounds: bool,
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Seconds.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Product space.
    Product {
        file_x: PathBuf,
        file_y: PathBuf,
        #[arg(long, value_enum)]
        metric: MetricArg,
    },
    /// Sampled segment space D_t(X).
    Dt {
        file: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        step: f64,
        /// Instead of printing the sample, check that D_C(X) sampled at
        /// `--step` is step-chain connected.
        #[arg(long, value_name = "C")]
        check_connect: Option<f64>,
    },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    L1,
    Linf,
}

#[derive(Debug, Subcommand)]
enum GenKind {
    Polygon {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        radius: f64,
    },
    Geomprog {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        count: usize,
    },
    Grid {
        #[arg(long)]
        length: f64,
        #[arg(long)]
        step: f64,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: u64,
    },
    UltraRandom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
}

/// Effective settings after merging the config file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub tolerance: f64,
    pub max_nodes: u64,
    pub timeout: Duration,
    pub json: bool,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    tolerance: Option<f64>,
    max_nodes: Option<u64>,
    timeout: Option<f64>,
}

impl Default for CliConfig {
    fn default() -> Self {
        let limits = GhLimits::default();
        Self {
            tolerance: DEFAULT_TOL,
            max_nodes: limits.max_nodes,
            timeout: limits.timeout,
            json: false,
            output: None,
        }
    }
}

impl CliConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = Self::default();
        let Some(path) = path else {
            return Ok(cfg);
        };
        let text = std::fs::read_to_string(path)?;
        let file: ConfigFile = toml::from_str(&text)
            .map_err(|e| Error::input(format!("config {}: {e}", path.display())))?;
        if let Some(t) = file.tolerance {
            cfg.tolerance = t;
        }
        if let Some(n) = file.max_nodes {
            cfg.max_nodes = n;
        }
        if let Some(s) = file.timeout {
            cfg.timeout = seconds(s)?;
        }
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::input("tolerance must be nonnegative"));
        }
        if self.max_nodes == 0 {
            return Err(Error::input("node cap must be positive"));
        }
        if self.timeout.is_zero() {
            return Err(Error::input("time cap must be positive"));
        }
        Ok(())
    }

    fn limits(&self) -> GhLimits {
        GhLimits {
            max_nodes: self.max_nodes,
            timeout: self.timeout,
        }
    }
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| Error::input(format!("bad duration {s}")))
}

/// Runs the CLI against the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INVALID
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };

    let config_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let result = CliConfig::load(config_path.as_deref()).and_then(|mut cfg| {
        if let Some(t) = cli.tol {
            cfg.tolerance = t;
        }
        cfg.json = cli.json;
        cfg.output = cli.output.clone();
        cfg.check()?;
        execute(&cli.command, &cfg)
    });

    match result {
        Ok(Report { text, code }) => {
            let written = match &cli.output {
                Some(p) => std::fs::write(p, &text),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INVALID;
            }
            code
        }
        Err(e) => {
            let code = match e {
                Error::Resource { .. } => EXIT_RESOURCE,
                _ => EXIT_INVALID,
            };
            let _ = writeln!(err, "error: {e}");
            if let Error::InvalidMetric(report) = &e {
                for v in &report.violations {
                    let _ = writeln!(err, "  {v}");
                }
            }
            code
        }
    }
}

struct Report {
    text: String,
    code: i32,
}

impl Report {
    fn ok(text: String) -> Self {
        Self {
            text,
            code: EXIT_OK,
        }
    }
}

fn emit<T: Serialize>(cfg: &CliConfig, value: &T, human: impl FnOnce() -> String) -> Report {
    Report::ok(if cfg.json {
        io::to_json(value)
    } else {
        human()
    })
}

fn resolve_point(x: &FiniteMetricSpace, key: &str) -> Result<usize> {
    x.index_of(key)
        .or_else(|| key.parse::<usize>().ok().filter(|&i| i < x.len()))
        .ok_or_else(|| Error::input(format!("no point {key:?}")))
}

fn fmt_labels(x: &FiniteMetricSpace, idx: &[usize]) -> String {
    idx.iter()
        .map(|&i| x.label(i))
        .collect::<Vec<_>>()
        .join(", ")
}

fn execute(cmd: &Command, cfg: &CliConfig) -> Result<Report> {
    let read = |p: &Path| io::read_space(p, cfg.tolerance);
    match cmd {
        Command::Validate { file } => {
            let doc = io::read_doc(file)?;
            let report = validate_metric(&doc.matrix, cfg.tolerance)?;
            let code = if report.ok { EXIT_OK } else { EXIT_INVALID };
            let mut r = emit(cfg, &report, || {
                if report.ok {
                    "ok\n".to_owned()
                } else {
                    report.violations.iter().map(|v| format!("{v}\n")).collect()
                }
            });
            r.code = code;
            // labels are checked only once the matrix itself is fine
            if report.ok {
                doc.into_space(cfg.tolerance)?;
            }
            Ok(r)
        }
        Command::Ultra { file } => {
            let x = read(file)?;
            let u = subdominant(&x);
            Ok(Report::ok(io::to_json(&UltrametricDoc::new(&u, &x))))
        }
        Command::Bottleneck { file } => {
            let x = read(file)?;
            let mst = minimum_spanning_tree(&x);
            #[derive(Serialize)]
            struct Doc {
                bottleneck: f64,
                mst: Vec<(String, String, f64)>,
            }
            let doc = Doc {
                bottleneck: mst.max_weight,
                mst: mst
                    .edges
                    .iter()
                    .map(|&(i, j, w)| (x.label(i).to_owned(), x.label(j).to_owned(), w))
                    .collect(),
            };
            Ok(emit(cfg, &doc, || format!("{}\n", mst.max_weight)))
        }
        Command::Chain {
            file, eps, witness, ..
        } => {
            let x = read(file)?;
            if eps.is_nan() || *eps < 0.0 {
                return Err(Error::input("eps must be nonnegative"));
            }
            match witness {
                Some(ends) => {
                    let (a, b) = (resolve_point(&x, &ends[0])?, resolve_point(&x, &ends[1])?);
                    let w = chain_witness(&x, a, b, *eps);
                    #[derive(Serialize)]
                    struct Doc {
                        scale: f64,
                        chain: Option<Vec<String>>,
                        max_step: Option<f64>,
                    }
                    let doc = Doc {
                        scale: *eps,
                        chain: w
                            .as_ref()
                            .map(|w| w.indices.iter().map(|&i| x.label(i).to_owned()).collect()),
                        max_step: w.as_ref().map(|w| w.max_step),
                    };
                    Ok(emit(cfg, &doc, || match &w {
                        Some(w) => {
                            format!("{} (max step {})\n", fmt_labels(&x, &w.indices), w.max_step)
                        }
                        None => format!("no chain at scale {eps}\n"),
                    }))
                }
                None => {
                    let p = components_at_scale(&x, *eps);
                    let doc = PartitionDoc::new(&p, &x);
                    Ok(emit(cfg, &doc, || {
                        p.components
                            .iter()
                            .map(|c| format!("{{{}}}\n", fmt_labels(&x, c)))
                            .collect()
                    }))
                }
            }
        }
        Command::Gh {
            file_x,
            file_y,
            bounds,
            max_nodes,
            timeout,
            ..
        } => {
            let (x, y) = (read(file_x)?, read(file_y)?);
            let mut limits = cfg.limits();
            if let Some(n) = max_nodes {
                if *n == 0 {
                    return Err(Error::input("node cap must be positive"));
                }
                limits.max_nodes = *n;
            }
            if let Some(s) = timeout {
                limits.timeout = seconds(*s)?;
            }
            let res = if *bounds {
                gh_bounds(&x, &y, &limits)
            } else {
                gh_exact(&x, &y, &limits)
            };
            let report = res.report(&x, &y);
            Ok(emit(cfg, &report, || {
                let mut s = if res.exact {
                    format!("d_GH = {}\n", res.upper)
                } else {
                    format!("{} <= d_GH <= {}\n", res.lower, res.upper)
                };
                for b in &res.provenance {
                    s.push_str(&format!("  {}: {}\n", b.name, b.value));
                }
                if let Some(w) = &res.witness {
                    let pairs: Vec<_> = w
                        .pairs()
                        .iter()
                        .map(|&(i, j)| format!("{}~{}", x.label(i), y.label(j)))
                        .collect();
                    s.push_str(&format!("  witness: {}\n", pairs.join(" ")));
                }
                if res.timed_out {
                    s.push_str("  (search limits reached)\n");
                }
                s
            }))
        }
        Command::Product {
            file_x,
            file_y,
            metric,
        } => {
            let (x, y) = (read(file_x)?, read(file_y)?);
            let norm = match metric {
                MetricArg::L1 => ProductNorm::L1,
                MetricArg::Linf => ProductNorm::LInf,
            };
            let p = product(&x, &y, norm, DEFAULT_MAX_POINTS)?;
            Ok(Report::ok(io::space_to_json(&p)))
        }
        Command::Dt {
            file,
            t,
            step,
            check_connect,
        } => {
            let x = read(file)?;
            match check_connect {
                Some(c) => {
                    let connected = dt_connectivity_check(&x, *c, *step)?;
                    #[derive(Serialize)]
                    struct Doc {
                        c: f64,
                        step: f64,
                        connected: bool,
                    }
                    let doc = Doc {
                        c: *c,
                        step: *step,
                        connected,
                    };
                    Ok(emit(cfg, &doc, || format!("{connected}\n")))
                }
                None => {
                    let dt = sample_dt(&x, *t, *step)?;
                    Ok(Report::ok(io::to_json(&SampledDtDoc::new(&dt, &x))))
                }
            }
        }
        Command::Gen { kind } => {
            let space = match *kind {
                GenKind::Polygon { n, radius } => generators::polygon_vertices(n, radius)?,
                GenKind::Geomprog { p, count } => generators::geometric_progression(p, count)?,
                GenKind::Grid { length, step } => generators::grid_segment(length, step)?,
                GenKind::Random { n, dim, seed } => generators::random_euclidean(n, dim, seed)?,
                GenKind::UltraRandom { n, seed } => generators::random_ultrametric(n, seed)?,
            };
            Ok(Report::ok(io::space_to_json(&space)))
        }
    }
}
