//! Command-line flags, the flat `key=value` config file, and their merge into
//! a [`RunConfig`]. Flags override file values; file values override defaults.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use auction_core::{MarketParams, ModelKind};
use clap::{Args, Parser, Subcommand};

pub const DEFAULT_SIGMA0: f64 = 1.0;
pub const DEFAULT_SIGMA_U: f64 = 0.5;
pub const DEFAULT_PATHS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "auction",
    version,
    about = "Sequential-auction insider trading equilibria"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Simulate,
    Figures,
    Limits,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the equilibrium and write coefficients.csv and path.csv
    Solve(Flags),
    /// Monte Carlo the auction and check the statistical gates
    Simulate(Flags),
    /// Write CSV + SVG for the figure series
    Figures(Flags),
    /// Compare discrete paths against their continuous-trading limits
    Limits(Flags),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Solve(_) => CommandKind::Solve,
            Command::Simulate(_) => CommandKind::Simulate,
            Command::Figures(_) => CommandKind::Figures,
            Command::Limits(_) => CommandKind::Limits,
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Solve(f) | Command::Simulate(f) | Command::Figures(f) | Command::Limits(f) => {
                f
            }
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// kyle | averse | neutral | seeking
    #[arg(long)]
    pub model: Option<String>,
    /// Number of auctions, or a comma-separated list
    #[arg(long)]
    pub periods: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma0: Option<f64>,
    #[arg(long = "sigma-u", allow_hyphen_values = true)]
    pub sigma_u: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<f64>,
    /// Monte Carlo paths
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads for the simulation (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Order offset `d,e`: insider adds d*y_{n-1} + e every period
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<String>,
    /// One-period deviation `period,multiplier`
    #[arg(long)]
    pub deviation: Option<String>,
    /// Figures to emit, e.g. `1,4,8b` (default: all)
    #[arg(long)]
    pub figures: Option<String>,
    /// Interior grid points for `limits` (t = i/(grid+1))
    #[arg(long)]
    pub grid: Option<usize>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Option<ModelKind>,
    pub periods: Vec<usize>,
    pub sigma0: f64,
    pub sigma_u: f64,
    pub p0: f64,
    pub paths: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub offset: Option<(f64, f64)>,
    pub deviation: Option<(usize, f64)>,
    pub figures: Option<Vec<String>>,
    pub grid: usize,
}

impl RunConfig {
    pub fn model(&self) -> Result<ModelKind> {
        self.model.ok_or_else(|| anyhow!("--model is required"))
    }

    pub fn params(&self, n_periods: usize) -> Result<MarketParams> {
        Ok(MarketParams {
            sigma0_sq: self.sigma0,
            sigma_u: self.sigma_u,
            n_periods,
            p0: self.p0,
        }
        .validate()?)
    }
}

/// Parses a flat `key=value` file. `#` starts a comment; keys use the long
/// flag names (`sigma-u` or `sigma_u`).
pub fn parse_config_file(text: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value", lineno + 1))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| anyhow!("invalid {what}: `{p}`"))
        })
        .collect()
}

fn parse_pair<A: std::str::FromStr, B: std::str::FromStr>(s: &str, what: &str) -> Result<(A, B)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("{what} expects two comma-separated values"))?;
    let a = a
        .trim()
        .parse()
        .map_err(|_| anyhow!("invalid {what}: `{s}`"))?;
    let b = b
        .trim()
        .parse()
        .map_err(|_| anyhow!("invalid {what}: `{s}`"))?;
    Ok((a, b))
}

fn default_periods(kind: CommandKind) -> Vec<usize> {
    match kind {
        CommandKind::Limits => vec![1000],
        CommandKind::Figures => vec![5, 20, 100],
        _ => vec![20],
    }
}

/// Merges flags over the optional config file over defaults.
pub fn resolve(kind: CommandKind, flags: &Flags) -> Result<RunConfig> {
    let file = match &flags.config {
        Some(path) => load_file(path)?,
        None => HashMap::new(),
    };
    let pick = |flag: Option<String>, key: &str| flag.or_else(|| file.get(key).cloned());

    let model = pick(flags.model.clone(), "model")
        .map(|s| s.parse::<ModelKind>())
        .transpose()?;
    let periods = match pick(flags.periods.clone(), "periods") {
        Some(s) => parse_list::<usize>(&s, "periods")?,
        None => default_periods(kind),
    };
    if periods.is_empty() || periods.contains(&0) {
        bail!("periods must be >= 1");
    }
    let num = |flag: Option<f64>, key: &str, default: f64| -> Result<f64> {
        match flag {
            Some(v) => Ok(v),
            None => match file.get(key) {
                Some(s) => s.parse().map_err(|_| anyhow!("invalid {key}: `{s}`")),
                None => Ok(default),
            },
        }
    };
    let int = |flag: Option<u64>, key: &str| -> Result<Option<u64>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => file
                .get(key)
                .map(|s| s.parse().map_err(|_| anyhow!("invalid {key}: `{s}`")))
                .transpose(),
        }
    };

    let sigma0 = num(flags.sigma0, "sigma0", DEFAULT_SIGMA0)?;
    let sigma_u = num(flags.sigma_u, "sigma-u", DEFAULT_SIGMA_U)?;
    let p0 = num(flags.p0, "p0", 0.0)?;
    let paths =
        int(flags.paths.map(|v| v as u64), "paths")?.unwrap_or(DEFAULT_PATHS as u64) as usize;
    if paths == 0 {
        bail!("paths must be >= 1");
    }
    let seed = int(flags.seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let threads = int(flags.threads.map(|v| v as u64), "threads")?.map(|v| v as usize);
    if threads == Some(0) {
        bail!("threads must be >= 1");
    }
    let grid = int(flags.grid.map(|v| v as u64), "grid")?.unwrap_or(9) as usize;
    if grid == 0 {
        bail!("grid must be >= 1");
    }
    let out = flags
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let offset = pick(flags.offset.clone(), "offset")
        .map(|s| parse_pair::<f64, f64>(&s, "offset"))
        .transpose()?;
    let deviation = pick(flags.deviation.clone(), "deviation")
        .map(|s| parse_pair::<usize, f64>(&s, "deviation"))
        .transpose()?;
    let figures = pick(flags.figures.clone(), "figures")
        .map(|s| s.split(',').map(|p| p.trim().to_lowercase()).collect());

    let cfg = RunConfig {
        model,
        periods,
        sigma0,
        sigma_u,
        p0,
        paths,
        seed,
        out,
        threads,
        offset,
        deviation,
        figures,
        grid,
    };
    // surface parameter errors before any work starts
    for &n in &cfg.periods {
        cfg.params(n)?;
    }
    Ok(cfg)
}

fn load_file(path: &Path) -> Result<HashMap<String, String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_reference_parameterization() {
        let cfg = resolve(CommandKind::Solve, &Flags::default()).unwrap();
        assert_eq!(cfg.sigma0, 1.0);
        assert_eq!(cfg.sigma_u, 0.5);
        assert_eq!(cfg.p0, 0.0);
        assert_eq!(cfg.model, None);
        assert!(cfg.model().is_err());
    }

    #[test]
    fn config_file_syntax() {
        let m = parse_config_file("# header\nmodel = kyle\nsigma_u=0.25 # inline\n\n").unwrap();
        assert_eq!(m["model"], "kyle");
        assert_eq!(m["sigma-u"], "0.25");
        assert!(parse_config_file("nonsense").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("auction-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        fs::write(&path, "model=kyle\nperiods=2,5\nsigma0=4\nseed=9\n").unwrap();
        let flags = Flags {
            config: Some(path),
            model: Some("neutral".into()),
            ..Flags::default()
        };
        let cfg = resolve(CommandKind::Solve, &flags).unwrap();
        assert_eq!(cfg.model, Some(ModelKind::RiskNeutral));
        assert_eq!(cfg.periods, vec![2, 5]);
        assert_eq!(cfg.sigma0, 4.0);
        assert_eq!(cfg.seed, 9);
        fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |f: Flags| resolve(CommandKind::Solve, &f).is_err();
        assert!(bad(Flags {
            periods: Some("0".into()),
            ..Flags::default()
        }));
        assert!(bad(Flags {
            periods: Some("x".into()),
            ..Flags::default()
        }));
        assert!(bad(Flags {
            sigma0: Some(0.0),
            ..Flags::default()
        }));
        assert!(bad(Flags {
            sigma_u: Some(-1.0),
            ..Flags::default()
        }));
        assert!(bad(Flags {
            model: Some("bogus".into()),
            ..Flags::default()
        }));
        assert!(bad(Flags {
            offset: Some("0.3".into()),
            ..Flags::default()
        }));
    }

    #[test]
    fn pairs_parse() {
        let f = Flags {
            offset: Some("0.3,-0.1".into()),
            deviation: Some("1,1.2".into()),
            ..Flags::default()
        };
        let cfg = resolve(CommandKind::Simulate, &f).unwrap();
        assert_eq!(cfg.offset, Some((0.3, -0.1)));
        assert_eq!(cfg.deviation, Some((1, 1.2)));
    }
}
