//! Command-line front end.

pub mod expr;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bv_profile::Profile;
use crate::counterexamples::{self, cantor_interval, CertificationRow, WitnessSet};
use crate::error::Error;
use crate::numeric_oracle::{oracle_density, oracle_perimeter};
use crate::rigidity::{decide, FailureWitness};
use crate::symmetral::{
    check_inequality, perimeter_symmetral, perimeter_tube, volume, PerimeterBreakdown, TubeSet,
};
use crate::window::Window;

pub use spec::{parse_spec, write_spec, ParseError, SpecDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable holding the default oracle seed.
pub const SEED_ENV: &str = "SCHWARZ_SEED";
const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser, Debug)]
#[command(name = "schwarz", version, about = "Schwarz symmetrals, perimeters and rigidity")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Split,
    Jump,
    Cantor,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Perimeter breakdown of the set described by the spec.
    Perimeter {
        spec: PathBuf,
        /// Open window a,b (expressions and inf allowed).
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Volume of the set.
    Volume { spec: PathBuf },
    /// Rigidity verdict for the profile.
    Rigidity { spec: PathBuf },
    /// Build an equality-case witness, write it as a spec and verify it.
    Witness {
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, allow_hyphen_values = true)]
        zbar: Option<String>,
        /// Shift vector x,y,...
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        /// Unit direction for the Cantor witness.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        /// Output path (default: <spec>.witness.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare analytic perimeter with the independent oracles.
    Verify {
        spec: PathBuf,
        #[arg(long, default_value_t = 400)]
        resolution: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Discretisation depth used when the profile has Cantor pieces.
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// CSV of staircase perimeters over a range of depths.
    Report {
        spec: PathBuf,
        /// Depth range k1..k2 (inclusive).
        #[arg(long)]
        depths: String,
        #[arg(long, default_value = "0.5")]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
}

enum Failure {
    Io(String),
    Parse(String),
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let seed_env = std::env::var(SEED_ENV).ok();
    match dispatch(&cli, seed_env.as_deref(), out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Io(m) => (EXIT_IO, m),
                Failure::Parse(m) => (EXIT_PARSE, format!("parse error: {m}")),
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Engine(e @ (Error::InvalidFunction(_) | Error::InvalidProfile(_))) => {
                    (EXIT_PARSE, e.to_string())
                }
                Failure::Engine(e) => (EXIT_PRECONDITION, e.to_string()),
            };
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn load(path: &Path) -> Result<SpecDocument, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_spec(&text)?)
}

fn value(s: &str, what: &str) -> Result<f64, Failure> {
    expr::evaluate(s.trim()).map_err(|e| Failure::Usage(format!("--{what}: {e}")))
}

fn vector(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(',').map(|x| value(x, what)).collect()
}

fn parse_window(s: &str) -> Result<Window, Failure> {
    let v = vector(s, "window")?;
    if v.len() != 2 {
        return Err(Failure::Usage("--window expects a,b".into()));
    }
    let bound = |x: f64| {
        if x.is_infinite() {
            crate::window::Bound::Unbounded
        } else {
            crate::window::Bound::Open(x)
        }
    };
    Ok(Window { lo: bound(v[0]), hi: bound(v[1]) })
}

fn parse_depths(s: &str) -> Result<std::ops::RangeInclusive<u32>, Failure> {
    let bad = || Failure::Usage(format!("--depths expects k1..k2, got '{s}'"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

/// Decimal with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn measure(tube: &TubeSet, window: &Window) -> crate::Result<PerimeterBreakdown> {
    if tube.drift().is_zero() {
        perimeter_symmetral(tube.profile(), window)
    } else {
        perimeter_tube(tube, window)
    }
}

fn breakdown_json(p: &PerimeterBreakdown) -> serde_json::Value {
    json!({
        "window": p.window.to_string(),
        "ac_part": p.ac_part,
        "jump_part": p.jump_part,
        "cantor_part": p.cantor_part,
        "total": p.total,
    })
}

fn dispatch(cli: &Cli, seed_env: Option<&str>, out: &mut dyn Write) -> Outcome {
    let io = |e: std::io::Error| Failure::Io(e.to_string());
    match &cli.command {
        Command::Perimeter { spec, window } => {
            let doc = load(spec)?;
            let w = window.as_deref().map(parse_window).transpose()?.unwrap_or_else(Window::real_line);
            let p = measure(&doc.tube, &w)?;
            if cli.json {
                writeln!(out, "{}", breakdown_json(&p)).map_err(io)?;
            } else {
                writeln!(out, "window  {}", p.window).map_err(io)?;
                writeln!(out, "ac      {}", fmt_sig(p.ac_part)).map_err(io)?;
                writeln!(out, "jump    {}", fmt_sig(p.jump_part)).map_err(io)?;
                writeln!(out, "cantor  {}", fmt_sig(p.cantor_part)).map_err(io)?;
                writeln!(out, "total   {}", fmt_sig(p.total)).map_err(io)?;
            }
        }
        Command::Volume { spec } => {
            let v = volume(&load(spec)?.tube);
            if cli.json {
                writeln!(out, "{}", json!({ "volume": v })).map_err(io)?;
            } else {
                writeln!(out, "{}", fmt_sig(v)).map_err(io)?;
            }
        }
        Command::Rigidity { spec } => {
            let verdict = decide(load(spec)?.tube.profile());
            if cli.json {
                let failures: Vec<_> = verdict
                    .failures
                    .iter()
                    .map(|f| match *f {
                        FailureWitness::Disconnected { at } => json!({"kind": "disconnected", "at": at}),
                        FailureWitness::Jump { at, lower, upper } => {
                            json!({"kind": "jump", "at": at, "lower": lower, "upper": upper})
                        }
                        FailureWitness::CantorMass { start, end, mass } => {
                            json!({"kind": "cantor", "start": start, "end": end, "mass": mass})
                        }
                    })
                    .collect();
                writeln!(
                    out,
                    "{}",
                    json!({"rigid": verdict.rigid, "interval": verdict.interval, "failures": failures})
                )
                .map_err(io)?;
            } else {
                writeln!(out, "{verdict}").map_err(io)?;
            }
        }
        Command::Witness { spec, kind, zbar, tau, lambda, direction, out: target } => {
            let profile = load(spec)?.tube.profile().clone();
            let w = build_witness(&profile, *kind, zbar.as_deref(), tau.as_deref(), lambda.as_deref(), direction.as_deref())?;
            let target = target.clone().unwrap_or_else(|| {
                let mut s = spec.as_os_str().to_owned();
                s.push(".witness.json");
                PathBuf::from(s)
            });
            let doc = SpecDocument::from(w.clone());
            std::fs::write(&target, write_spec(&doc))
                .map_err(|e| Failure::Io(format!("cannot write {}: {e}", target.display())))?;
            let c = check_inequality(&w.tube)?;
            if cli.json {
                writeln!(
                    out,
                    "{}",
                    json!({
                        "kind": w.kind.name(),
                        "path": target.display().to_string(),
                        "perimeter_set": c.p_e,
                        "perimeter_symmetral": c.p_f,
                        "gap": c.gap,
                        "holds": c.holds,
                        "nonconstant_drift": w.tube.drift_is_nonconstant(),
                    })
                )
                .map_err(io)?;
            } else {
                writeln!(out, "wrote {} witness to {}", w.kind.name(), target.display()).map_err(io)?;
                writeln!(out, "P(E)    {}", fmt_sig(c.p_e)).map_err(io)?;
                writeln!(out, "P(F)    {}", fmt_sig(c.p_f)).map_err(io)?;
                writeln!(out, "gap     {:e}", c.gap).map_err(io)?;
                let eq = c.gap.abs() <= 1e-6 * (1.0 + c.p_f);
                writeln!(out, "{}", if eq { "EQUALITY" } else { "STRICT" }).map_err(io)?;
            }
        }
        Command::Verify { spec, resolution, seed, depth } => {
            let seed = match (seed, seed_env) {
                (Some(s), _) => *s,
                (None, Some(s)) => s
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("{SEED_ENV} must be an unsigned integer")))?,
                (None, None) => DEFAULT_SEED,
            };
            verify(&load(spec)?.tube, *resolution, seed, *depth, cli.json, out)?;
        }
        Command::Report { spec, depths, lambda, window } => {
            let profile = load(spec)?.tube.profile().clone();
            let range = parse_depths(depths)?;
            let lambda = value(lambda, "lambda")?;
            let interval = match cantor_interval(&profile) {
                Ok(iv) => iv,
                Err(_) => profile.support(),
            };
            let w = match window {
                Some(s) => parse_window(s)?,
                None => Window::open(interval.0, interval.1),
            };
            let rows = counterexamples::certify(&profile, interval, lambda, None, &w, range)?;
            write_csv(&rows, out).map_err(io)?;
        }
    }
    Ok(())
}

/// Writes certification rows as CSV (LF endings, 12 significant digits).
pub fn write_csv(rows: &[CertificationRow], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "k,perimeter_symmetral,perimeter_staircase")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.depth, fmt_sig(r.perimeter_symmetral), fmt_sig(r.perimeter_staircase))?;
    }
    Ok(())
}

fn build_witness(
    profile: &Profile,
    kind: Kind,
    zbar: Option<&str>,
    tau: Option<&str>,
    lambda: Option<&str>,
    direction: Option<&str>,
) -> Result<WitnessSet, Failure> {
    let m = profile.dimension() - 1;
    match kind {
        Kind::Split | Kind::Jump => {
            let verdict = decide(profile);
            let z = match zbar {
                Some(s) => value(s, "zbar")?,
                None => verdict
                    .failures
                    .iter()
                    .find_map(|f| match (kind, *f) {
                        (Kind::Split, FailureWitness::Disconnected { at }) => Some(at),
                        (Kind::Jump, FailureWitness::Jump { at, .. }) => Some(at),
                        _ => None,
                    })
                    .ok_or_else(|| Failure::Engine(Error::Precondition("no matching rigidity failure; pass --zbar".into())))?,
            };
            let t = match tau {
                Some(s) => vector(s, "tau")?,
                None => {
                    let (lo, hi) = profile.radius().approx_limits(z);
                    let len = if matches!(kind, Kind::Jump) { 0.5 * (hi - lo) } else { 1.0 };
                    let mut v = vec![0.0; m];
                    v[0] = len;
                    v
                }
            };
            Ok(match kind {
                Kind::Split => counterexamples::split_witness(profile, z, &t)?,
                _ => counterexamples::jump_witness(profile, z, &t)?,
            })
        }
        Kind::Cantor => {
            let l = lambda.map(|s| value(s, "lambda")).transpose()?.unwrap_or(0.5);
            let e = direction.map(|s| vector(s, "direction")).transpose()?;
            Ok(counterexamples::cantor_witness(profile, l, e.as_deref())?)
        }
    }
}

fn verify(tube: &TubeSet, resolution: usize, seed: u64, depth: u32, json_out: bool, out: &mut dyn Write) -> Outcome {
    let io = |e: std::io::Error| Failure::Io(e.to_string());
    let has_cantor = tube.profile().base().has_cantor_pieces() || tube.drift().function().has_cantor_pieces();
    let measured = if has_cantor {
        if !tube.drift().is_zero() {
            return Err(Failure::Engine(Error::CantorPresent(
                "verify discretises symmetrals only; run report for Cantor witnesses".into(),
            )));
        }
        TubeSet::symmetral(counterexamples::discretize_profile(tube.profile(), depth)?.profile)
    } else {
        tube.clone()
    };
    let analytic = measure(&measured, &Window::real_line())?.total;
    let oracle = oracle_perimeter(&measured, resolution)?;
    let rel = (oracle - analytic).abs() / analytic.abs().max(f64::MIN_POSITIVE);

    // Density probes at the centre and on the lateral boundary of the longest
    // smooth stretch of the first positivity interval.
    let profile = measured.profile();
    let probes = match profile.positivity_intervals().first() {
        Some(&(a, b)) => {
            let mut knots = vec![a, b];
            knots.extend(measured.breakpoints().into_iter().filter(|&z| z > a && z < b));
            knots.sort_by(f64::total_cmp);
            let (lo, hi) = knots
                .windows(2)
                .map(|w| (w[0], w[1]))
                .max_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0)))
                .expect("two knots");
            let z = 0.5 * (lo + hi);
            let g = measured.drift_value(z);
            let r = profile.radius().eval(z);
            let e = measured.direction();
            let point = |s: f64| {
                let mut x = vec![z];
                x.extend(e.iter().map(|c| (g + s) * c));
                x
            };
            let radii: Vec<f64> = [0.1, 0.05, 0.02, 0.01].iter().map(|k| k * r.min(hi - lo)).collect();
            let inside = oracle_density(&measured, &point(0.0), &radii, 20_000, seed)?;
            let edge = oracle_density(&measured, &point(r), &radii, 20_000, seed)?;
            Some((inside, edge))
        }
        None => None,
    };

    if json_out {
        let dens = probes.as_ref().map(|(i, e)| {
            json!({
                "interior": [i.theta_lower, i.theta_upper],
                "boundary": [e.theta_lower, e.theta_upper],
            })
        });
        writeln!(
            out,
            "{}",
            json!({
                "analytic": analytic,
                "oracle": oracle,
                "relative_difference": rel,
                "resolution": resolution,
                "seed": seed,
                "discretised_depth": if has_cantor { Some(depth) } else { None },
                "density": dens,
            })
        )
        .map_err(io)?;
    } else {
        if has_cantor {
            writeln!(out, "discretised at depth {depth}").map_err(io)?;
        }
        writeln!(out, "analytic  {}", fmt_sig(analytic)).map_err(io)?;
        writeln!(out, "oracle    {}  (resolution {resolution})", fmt_sig(oracle)).map_err(io)?;
        writeln!(out, "rel diff  {rel:.3e}").map_err(io)?;
        writeln!(out, "seed      {seed}").map_err(io)?;
        if let Some((i, e)) = probes {
            writeln!(out, "density interior  [{:.4}, {:.4}]", i.theta_lower, i.theta_upper).map_err(io)?;
            writeln!(out, "density boundary  [{:.4}, {:.4}]", e.theta_lower, e.theta_upper).map_err(io)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(43.982297150257104), "43.9822971503");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-1.5), "-1.50000000000");
        assert_eq!(fmt_sig(1234.5), "1234.50000000");
    }

    #[test]
    fn depth_ranges() {
        assert_eq!(parse_depths("1..14").ok(), Some(1..=14));
        assert!(parse_depths("3..1").is_err());
        assert!(parse_depths("x").is_err());
    }

    #[test]
    fn usage_errors() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["schwarz", "frobnicate"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["schwarz"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["schwarz", "--help"], &mut o, &mut e), EXIT_OK);
    }
}
