//! Command-line front end: `analyze`, `simulate`, `compare`, `scale` and
//! `check`.
//!
//! Each command takes a [`RunConfig`] and returns a [`Report`] holding the
//! rendered output and the process exit code, so commands can be driven
//! from tests without spawning a process.

mod commands;
mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::corpus;
use crate::dsl::{parse_program, AffineProgram};
use crate::sim::CacheGeometry;
use crate::trace::Bindings;

pub use commands::{cmd_analyze, cmd_check, cmd_compare, cmd_scale, cmd_simulate};

/// Exit code for parse, validation, binding and I/O errors.
pub const EXIT_INPUT: i32 = 1;
/// Exit code when a symbolic table cannot be derived.
pub const EXIT_DERIVATION: i32 = 2;
/// Exit code for a failed invariant or accuracy threshold.
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "locality",
    version,
    about = "Reuse-interval and cache-size polynomial analysis of affine loop nests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
    /// Block size in array elements.
    #[arg(long, global = true, default_value_t = 8)]
    pub b: i64,
    /// Parameter to derive symbolic tables in.
    #[arg(long, global = true)]
    pub param: Option<String>,
    /// Fixes a parameter, as `name=value`; repeatable.
    #[arg(long = "bind", global = true, value_parser = parse_binding)]
    pub bind: Vec<(String, i64)>,
    /// Sample values as `start:stop:step` (inclusive) or a comma list.
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// Cache as `ways:sets:block_bytes` or `full:blocks:block_bytes`;
    /// repeatable.
    #[arg(long = "geometry", global = true)]
    pub geometry: Vec<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest acceptable mean error for `compare`.
    #[arg(long, global = true, default_value_t = 0.02)]
    pub threshold: f64,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Derive symbolic reuse-interval and cache tables.
    Analyze { input: PathBuf },
    /// Run the LRU simulator at bound parameter values.
    Simulate {
        input: PathBuf,
        /// Fully associative capacities in blocks, as a list or range.
        #[arg(long)]
        sweep: Option<String>,
        /// Write the access trace as CSV.
        #[arg(long)]
        dump_trace: Option<PathBuf>,
        /// Keep declared extents instead of prime padding.
        #[arg(long)]
        unpadded: bool,
    },
    /// Compare predicted and simulated misses.
    Compare {
        input: PathBuf,
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Min-max cache scaling table.
    Scale {
        input: PathBuf,
        /// Parameter values to evaluate the rows at.
        #[arg(long, value_delimiter = ',')]
        eval: Vec<i64>,
    },
    /// Reuse-interval sum test only.
    Check { input: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Simulate,
    Compare,
    Scale,
    Check,
}

/// Fully resolved options of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub bindings: Bindings,
    pub param: Option<String>,
    pub b: i64,
    pub geometries: Vec<CacheGeometry>,
    pub samples: Option<Vec<i64>>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threshold: f64,
    /// Extra fully associative capacities, in blocks.
    pub sweep: Vec<usize>,
    pub eval: Vec<i64>,
    pub dump_trace: Option<PathBuf>,
    pub padded: bool,
}

impl RunConfig {
    /// Defaults for `command` on `input`: b = 8, a 6 KB fully associative
    /// cache of 64-byte blocks, table output.
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input: input.into(),
            bindings: Bindings::new(),
            param: None,
            b: 8,
            geometries: Vec::new(),
            samples: None,
            format: Format::Table,
            out: None,
            threshold: 0.02,
            sweep: Vec::new(),
            eval: Vec::new(),
            dump_trace: None,
            padded: true,
        }
    }

    pub fn bind(mut self, name: &str, v: i64) -> Self {
        self.bindings.insert(name.to_string(), v);
        self
    }

    pub fn format(mut self, f: Format) -> Self {
        self.format = f;
        self
    }
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub output: String,
    /// Messages for stderr.
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

impl Report {
    fn fail(code: i32, msg: impl Into<String>) -> Self {
        Report {
            output: String::new(),
            warnings: vec![msg.into()],
            exit_code: code,
        }
    }
}

fn parse_binding(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = v.trim().parse().map_err(|_| format!("`{v}` is not an integer"))?;
    Ok((k.trim().to_string(), v))
}

/// Parses `start:stop:step` (stop inclusive) or `a,b,c`.
pub fn parse_list(s: &str) -> Result<Vec<i64>, String> {
    let bad = || format!("cannot read `{s}` as start:stop:step or a comma list");
    if s.contains(':') {
        let p: Vec<i64> = s
            .split(':')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = p[..] else {
            return Err(bad());
        };
        if step <= 0 {
            return Err(bad());
        }
        Ok((start..=stop).step_by(step as usize).collect())
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
    }
}

impl TryFrom<Cli> for RunConfig {
    type Error = String;

    fn try_from(cli: Cli) -> Result<Self, String> {
        let (command, input) = match &cli.command {
            CommandArgs::Analyze { input } => (Command::Analyze, input),
            CommandArgs::Simulate { input, .. } => (Command::Simulate, input),
            CommandArgs::Compare { input, .. } => (Command::Compare, input),
            CommandArgs::Scale { input, .. } => (Command::Scale, input),
            CommandArgs::Check { input } => (Command::Check, input),
        };
        let mut cfg = RunConfig::new(command, input.clone());
        cfg.b = cli.b;
        cfg.param = cli.param.clone();
        cfg.bindings = cli.bind.iter().cloned().collect();
        cfg.samples = cli.samples.as_deref().map(parse_list).transpose()?;
        cfg.geometries = cli
            .geometry
            .iter()
            .map(|g| CacheGeometry::parse(g, cli.b).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        cfg.format = cli.format;
        cfg.out = cli.out.clone();
        cfg.threshold = cli.threshold;
        match cli.command {
            CommandArgs::Simulate {
                sweep,
                dump_trace,
                unpadded,
                ..
            } => {
                cfg.sweep = capacities(sweep.as_deref())?;
                cfg.dump_trace = dump_trace;
                cfg.padded = !unpadded;
            }
            CommandArgs::Compare { sweep, .. } => cfg.sweep = capacities(sweep.as_deref())?,
            CommandArgs::Scale { eval, .. } => cfg.eval = eval,
            _ => {}
        }
        Ok(cfg)
    }
}

fn capacities(s: Option<&str>) -> Result<Vec<usize>, String> {
    match s {
        None => Ok(Vec::new()),
        Some(s) => parse_list(s)?
            .into_iter()
            .map(|c| usize::try_from(c).map_err(|_| format!("capacity {c} is negative")))
            .collect(),
    }
}

/// Reads a program from `path`, or from the bundled corpus when no such
/// file exists and the file stem names a corpus program.
pub fn load_program(path: &Path) -> Result<AffineProgram, String> {
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(corpus::source)
            .ok_or_else(|| format!("{}: {e}", path.display()))?,
    };
    parse_program(&src).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs the configured command.
pub fn run(cfg: &RunConfig) -> Report {
    match cfg.command {
        Command::Analyze => cmd_analyze(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Compare => cmd_compare(cfg),
        Command::Scale => cmd_scale(cfg),
        Command::Check => cmd_check(cfg),
    }
}

/// Process entry point; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let cfg = match RunConfig::try_from(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let report = run(&cfg);
    for w in &report.warnings {
        eprintln!("{w}");
    }
    match &cfg.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &report.output) {
                eprintln!("error: {}: {e}", p.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{}", report.output),
    }
    report.exit_code
}
