//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 input that
//! parses but fails validation, 3 a failed internal identity or a FAIL line
//! in an oracle report.

pub mod config;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::boseck::{BoseckContext, BoseckError};
use crate::decomp::{DecompError, Decomposer};
use crate::oracle::{run_sweep, verify_with, OracleError, SweepParams};
use crate::ramdata::{RamError, TowerData};
use crate::weier::{self, WeierError};

pub use config::{parse, Config, ConfigError};

#[derive(Parser, Debug)]
#[command(name = "holodiff", about = "Holomorphic differentials of cyclic covers in characteristic p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Multiplicities d(lambda,k) of the indecomposable summands.
    Decompose {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Boseck invariants Gamma_{k,lambda}, k = 0..p^ell-1.
    Boseck {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Gap structure at a totally ramified branch point.
    Gaps {
        path: PathBuf,
        #[arg(long)]
        place: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a curve against the explicit oracle, or run a random sweep
    /// (`--sweep p=2,3,5 n=1,2,3,4 count=100 seed=42`).
    Verify {
        path: Option<PathBuf>,
        #[arg(long, num_args = 0.., value_name = "KEY=VALUE")]
        sweep: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Gaps, Frobenius number and descriptors of a numerical semigroup.
    Semigroup {
        #[arg(long, value_delimiter = ',', required = true)]
        generators: Vec<u64>,
        #[arg(long)]
        bound: Option<u64>,
        /// Element used for the descriptors; default the least generator.
        #[arg(long)]
        d: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn fail(code: i32, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        fail(1, e)
    }
}

impl From<RamError> for Failure {
    fn from(e: RamError) -> Self {
        fail(2, e)
    }
}

impl From<BoseckError> for Failure {
    fn from(e: BoseckError) -> Self {
        fail(2, e)
    }
}

impl From<DecompError> for Failure {
    fn from(e: DecompError) -> Self {
        match e {
            DecompError::Boseck(b) => b.into(),
            DecompError::Ram(r) => r.into(),
            DecompError::Unsupported(_) => fail(2, e),
            _ => fail(3, e),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Invalid(_) | OracleError::Ram(_) => fail(2, e),
            _ => fail(3, e),
        }
    }
}

impl From<WeierError> for Failure {
    fn from(e: WeierError) -> Self {
        match e {
            WeierError::Boseck(b) => b.into(),
            WeierError::Count { .. } | WeierError::ClassCollision { .. } => fail(3, e),
            _ => fail(2, e),
        }
    }
}

fn load(path: &PathBuf) -> Result<Config, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    Ok(parse(&text)?)
}

fn load_tower(path: &PathBuf) -> Result<(Config, TowerData), Failure> {
    let cfg = load(path)?;
    let tower = cfg.tower()?;
    tower.validate()?;
    Ok((cfg, tower))
}

fn warnings(tower: &TowerData, out: &mut String) {
    for w in tower.warnings() {
        let _ = writeln!(out, "warning: {w}");
    }
}

pub fn decompose_cmd(path: &PathBuf, format: Format) -> Result<String, Failure> {
    let (_, tower) = load_tower(path)?;
    let table = Decomposer::new(&tower)?.decompose()?;
    Ok(match format {
        Format::Csv => table.to_csv(),
        Format::Text => {
            let mut s = String::new();
            warnings(&tower, &mut s);
            s + &table.to_text()
        }
    })
}

pub fn boseck_cmd(path: &PathBuf, format: Format) -> Result<String, Failure> {
    let (_, tower) = load_tower(path)?;
    let ctx = BoseckContext::new(&tower)?;
    let (n, pl) = (tower.group.n, tower.group.p_ell());
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("k,lambda,gamma\n");
            for k in 0..pl {
                for lambda in 0..n {
                    let _ = writeln!(s, "{k},{lambda},{}", ctx.gamma(k, lambda)?);
                }
            }
        }
        Format::Text => {
            s.push_str("k\\lambda");
            for lambda in 0..n {
                let _ = write!(s, " {lambda:>4}");
            }
            s.push('\n');
            for k in 0..pl {
                let _ = write!(s, "{k:>8}");
                for lambda in 0..n {
                    let _ = write!(s, " {:>4}", ctx.gamma(k, lambda)?);
                }
                s.push('\n');
            }
        }
    }
    Ok(s)
}

fn default_place(tower: &TowerData) -> Option<String> {
    let (n, p) = (tower.group.n, tower.group.p);
    let pl = tower.group.p_ell();
    tower
        .branch_points
        .iter()
        .find(|b| b.e_prime(n) == n && b.wild.as_ref().map(|w| w.e(p)).unwrap_or(1) == pl)
        .map(|b| b.id.clone())
}

pub fn gaps_cmd(path: &PathBuf, place: Option<&str>, format: Format) -> Result<String, Failure> {
    let (_, tower) = load_tower(path)?;
    let dec = Decomposer::new(&tower)?;
    let table = dec.decompose()?;
    let place = match place {
        Some(p) => p.to_string(),
        None => default_place(&tower).ok_or_else(|| fail(2, "no totally ramified branch point"))?,
    };
    let profile = weier::gap_classes(dec.context(), &table, &place)?;
    let descriptors = match &profile.full_gaps {
        Some(g) => Some(weier::descriptors(g, profile.d)?),
        None => None,
    };
    let mut s = String::new();
    match format {
        Format::Csv => match &profile.full_gaps {
            Some(g) => s.push_str(&weier::gaps_csv(g)),
            None => {
                s.push_str("i0,i1,count\n");
                for ((a, b), c) in &profile.classes {
                    let _ = writeln!(s, "{a},{b},{c}");
                }
            }
        },
        Format::Text => {
            let _ = writeln!(s, "place {place}, d = {}, g_F = {}", profile.d, table.genera.g_f);
            s.push_str(&profile.grid());
            if let Some(small) = &profile.small_gaps {
                let list: Vec<String> = small.iter().map(u64::to_string).collect();
                let _ = writeln!(s, "small gaps: {}", list.join(","));
            }
            match &profile.full_gaps {
                Some(g) => {
                    let list: Vec<String> = g.iter().map(u64::to_string).collect();
                    let _ = writeln!(s, "gaps: {}", list.join(","));
                }
                None => s.push_str("gaps: full list unavailable (genus of F^P > 0)\n"),
            }
            if let Some(ds) = &descriptors {
                let b: Vec<String> = ds.iter().map(|x| x.b.to_string()).collect();
                let nu: Vec<String> = ds.iter().map(|x| x.nu.to_string()).collect();
                let _ = writeln!(s, "descriptors d={}: b=({}) nu=({})", profile.d, b.join(","), nu.join(","));
            }
        }
    }
    Ok(s)
}

fn sweep_params(items: &[String]) -> Result<(SweepParams, usize, u64), Failure> {
    let mut params = SweepParams::default();
    let (mut count, mut seed) = (100usize, 42u64);
    for item in items {
        let Some((k, v)) = item.split_once('=') else { return Err(fail(1, format!("sweep option '{item}' is not key=value"))) };
        let list = || -> Result<Vec<u64>, Failure> {
            v.split(',').map(|x| x.trim().parse().map_err(|_| fail(1, format!("bad value in '{item}'")))).collect()
        };
        let one = || -> Result<u64, Failure> { v.trim().parse().map_err(|_| fail(1, format!("bad value in '{item}'"))) };
        match k.trim() {
            "p" => params.primes = list()?,
            "n" => params.ns = list()?,
            "count" => count = one()? as usize,
            "seed" => seed = one()?,
            "values" => params.max_values = one()?,
            "pole" => params.max_pole = one()?,
            other => return Err(fail(1, format!("unknown sweep option '{other}'"))),
        }
    }
    let ok = !params.primes.is_empty()
        && params.primes.iter().all(|&p| crate::exactmath::field::is_prime(p))
        && params.primes.iter().any(|&p| params.ns.iter().any(|&n| n > 0 && num_integer::gcd(n, p) == 1))
        && params.max_values > 0
        && params.max_pole > 1;
    if !ok {
        return Err(fail(2, "sweep options admit no curve"));
    }
    Ok((params, count, seed))
}

/// The report, and whether every check passed.
pub fn verify_cmd(path: Option<&PathBuf>, sweep: Option<&[String]>, format: Format) -> Result<(String, bool), Failure> {
    let reports = match (path, sweep) {
        (_, Some(items)) => {
            let (params, count, seed) = sweep_params(items)?;
            run_sweep(seed, count, &params).into_iter().map(|o| o.report).collect()
        }
        (Some(path), None) => {
            let cfg = load(path)?;
            let Some(curve) = &cfg.curve else { return Err(fail(2, "config has no [curve] section")) };
            curve.validate()?;
            let tower = (!cfg.branches.is_empty()).then(|| cfg.explicit_tower());
            vec![verify_with(curve, tower.as_ref())]
        }
        (None, None) => return Err(fail(1, "give a config path or --sweep")),
    };
    let mut s = String::new();
    let passed = reports.iter().filter(|r| r.passed()).count();
    for r in &reports {
        match format {
            Format::Text => {
                s.push_str(&r.to_text());
                s.push('\n');
            }
            Format::Csv => {
                let csv = r.to_csv();
                s.push_str(if s.is_empty() { &csv } else { csv.split_once('\n').unwrap().1 });
            }
        }
    }
    if format == Format::Text {
        let _ = writeln!(s, "{passed}/{} PASS", reports.len());
    }
    Ok((s, passed == reports.len()))
}

pub fn semigroup_cmd(generators: &[u64], bound: Option<u64>, d: Option<u64>, format: Format) -> Result<String, Failure> {
    let mut sorted: Vec<u64> = generators.iter().copied().filter(|&g| g > 0).collect();
    sorted.sort_unstable();
    if sorted.is_empty() {
        return Err(fail(2, "no positive generators"));
    }
    let bound = bound.unwrap_or(if sorted.len() > 1 { sorted[0] * sorted[1] } else { sorted[0] });
    let gaps = weier::semigroup_gaps(&sorted, bound)?;
    let d = d.unwrap_or(sorted[0]);
    let ds = weier::descriptors(&gaps, d)?;
    Ok(match format {
        Format::Csv => weier::gaps_csv(&gaps) + "\n" + &weier::descriptors_csv(&ds),
        Format::Text => {
            let list: Vec<String> = gaps.iter().map(u64::to_string).collect();
            let mut s = format!("gaps: {}\n", if list.is_empty() { "none".into() } else { list.join(",") });
            match weier::frobenius(&gaps) {
                Some(f) => {
                    let _ = writeln!(s, "frobenius: {f}");
                }
                None => s.push_str("frobenius: none\n"),
            }
            let _ = writeln!(s, "descriptors d={d}:");
            for d in &ds {
                let _ = writeln!(s, "  i={} b={} nu={}", d.i, d.b, d.nu);
            }
            s
        }
    })
}

/// Output text and exit code.
pub fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    let ok = |s: String| (s, 0);
    match &cli.command {
        Command::Decompose { path, format } => decompose_cmd(path, *format).map(ok),
        Command::Boseck { path, format } => boseck_cmd(path, *format).map(ok),
        Command::Gaps { path, place, format } => gaps_cmd(path, place.as_deref(), *format).map(ok),
        Command::Verify { path, sweep, format } => {
            verify_cmd(path.as_ref(), sweep.as_deref(), *format).map(|(s, pass)| (s, if pass { 0 } else { 3 }))
        }
        Command::Semigroup { generators, bound, d, format } => semigroup_cmd(generators, *bound, *d, *format).map(ok),
    }
}

/// Parses `args` (including the program name), runs, writes, and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok((s, code)) => {
            let _ = out.write_all(s.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
