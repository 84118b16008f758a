//! Command-line front end: majorant discretization, modulus sweeps, the
//! dominating-function pipeline, embedding classification with best-constant
//! estimators, the Hardy-split check, Bernstein ratios, and weight
//! representations. Every command is deterministic given its flags and
//! `--seed`; reports are JSON (or CSV for tabular output).
//!
//! Exit codes: 0 success, 1 property/acceptance failure, 2 usage or
//! configuration error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use lipap::embedding::{
    analyze, sharpness_witness, AnalyzeOptions, EmbeddingQuery, Flag, WitnessOptions,
};
use lipap::kkdl::{construct_dominating, ConstructOptions};
use lipap::majorant::{
    discretize, represent_weights, verify_discretizing_properties, Majorant,
};
use lipap::smoothness::{
    bernstein_ratio, modulus, modulus_to_csv, reverse_bernstein_ratio, ModulusQuery, SampleNorm,
};
use lipap::synth;
use lipap::trigpoly::TrigPoly;

#[derive(Parser)]
#[command(name = "lipap", version, about = "Lipschitz-to-Wiener-space toolkit")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for tabular commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// JSON file whose keys override the command's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build and verify a discretizing sequence for a majorant.
    Discretize(DiscretizeArgs),
    /// Sweep a modulus of smoothness over a t-grid.
    Modulus(ModulusArgs),
    /// Run the dominating-function construction end to end.
    Kkdl(KkdlArgs),
    /// Classify a Lipschitz-to-A_p embedding query.
    Embed(EmbedArgs),
    /// Evaluate both sides of the discrete Hardy split.
    Lemma22(Lemma22Args),
    /// Direct (and optionally reverse) Bernstein ratio of a polynomial.
    Bernstein(BernsteinArgs),
    /// Weight representation of a majorant via its concave majorant.
    Represent(RepresentArgs),
}

#[derive(Args)]
struct DiscretizeArgs {
    /// Majorant: pow(A), log(B), pow(A)*log(B), or table:FILE. `A` may use
    /// `*r`, e.g. pow(0.5*r).
    #[arg(long)]
    omega: String,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 10_000)]
    nmax: u64,
}

#[derive(Args)]
struct ModulusArgs {
    /// Coefficient file (.csv layout or .json).
    #[arg(long, conflicts_with = "family")]
    poly: Option<PathBuf>,
    /// Synthesized input: wave:K, random:N, decay:N,GAMMA.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long, default_value_t = 0)]
    l: u32,
    /// Which norm: 2 or inf.
    #[arg(long, default_value = "2")]
    q: String,
    #[arg(long, default_value_t = 0.5)]
    tmax: f64,
    #[arg(long, default_value_t = 1.0 / 128.0)]
    tmin: f64,
    #[arg(long, default_value_t = 8)]
    tcount: usize,
    #[arg(long, default_value_t = 8)]
    directions: usize,
    #[arg(long, default_value_t = 4)]
    oversample: usize,
}

#[derive(Args)]
struct KkdlArgs {
    #[arg(long, conflicts_with = "family")]
    poly: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[arg(long, default_value_t = 16)]
    trials: u32,
    #[arg(long, default_value_t = 4)]
    oversample: usize,
    /// Exit 1 when max/min of the modulus-ratio table exceeds this.
    #[arg(long, default_value_t = 256.0)]
    max_ratio_spread: f64,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    omega: String,
    #[arg(long, default_value_t = 1)]
    d: u32,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long, default_value_t = 0)]
    l: u32,
    /// Also run the three best-constant estimators.
    #[arg(long)]
    constants: bool,
    /// On failing queries, emit the sharpness growth table.
    #[arg(long)]
    witness: bool,
    #[arg(long, default_value = "witness.csv")]
    witness_out: PathBuf,
    #[arg(long, default_value_t = 1024)]
    nmax: u64,
    #[arg(long, default_value_t = 8)]
    iterations: u64,
    #[arg(long, default_value_t = 32)]
    quadrature_points: usize,
    /// Label the report as the continuous-variable criterion.
    #[arg(long)]
    continuous: bool,
}

#[derive(Args)]
struct Lemma22Args {
    /// JSON array file of nonnegative weights alpha.
    #[arg(long)]
    alpha: Option<PathBuf>,
    /// JSON array file of nonnegative values f.
    #[arg(long)]
    f: Option<PathBuf>,
    /// Generate seeded random alpha and f of this size instead.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 5.0)]
    lambda: f64,
}

#[derive(Args)]
struct BernsteinArgs {
    #[arg(long, conflicts_with = "family")]
    poly: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Also compute the reverse ratio, with this high-pass threshold.
    #[arg(long)]
    nmin: Option<u64>,
    #[arg(long, default_value_t = 8)]
    oversample: usize,
}

#[derive(Args)]
struct RepresentArgs {
    #[arg(long)]
    omega: String,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 256)]
    m: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn config_map(path: &Option<PathBuf>) -> anyhow::Result<Map<String, Value>> {
    match path {
        None => Ok(Map::new()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let v: Value = serde_json::from_str(&text).context("parsing config JSON")?;
            match v {
                Value::Object(map) => Ok(map),
                _ => bail!("config must be a JSON object"),
            }
        }
    }
}

macro_rules! apply_config {
    ($args:ident, $cfg:expr, { $($key:literal => $field:ident),* $(,)? }) => {
        for (k, v) in $cfg {
            match k.as_str() {
                $( $key => {
                    $args.$field = serde_json::from_value(v.clone())
                        .with_context(|| format!("config key '{k}'"))?;
                } )*
                other => bail!("unknown config key '{other}'"),
            }
        }
    };
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let cfg = config_map(&cli.config)?;
    let seed = cli.seed;
    let (payload, code) = match cli.cmd {
        Cmd::Discretize(mut a) => {
            apply_config!(a, &cfg, {
                "omega" => omega, "r" => r, "lambda" => lambda, "nmax" => nmax,
            });
            cmd_discretize(a)?
        }
        Cmd::Modulus(mut a) => {
            apply_config!(a, &cfg, {
                "poly" => poly, "family" => family, "d" => d, "r" => r, "l" => l,
                "q" => q, "tmax" => tmax, "tmin" => tmin, "tcount" => tcount,
                "directions" => directions, "oversample" => oversample,
            });
            cmd_modulus(a, seed, cli.format)?
        }
        Cmd::Kkdl(mut a) => {
            apply_config!(a, &cfg, {
                "poly" => poly, "family" => family, "d" => d, "r" => r, "l" => l,
                "trials" => trials, "oversample" => oversample,
                "max_ratio_spread" => max_ratio_spread,
            });
            cmd_kkdl(a, seed)?
        }
        Cmd::Embed(mut a) => {
            apply_config!(a, &cfg, {
                "omega" => omega, "d" => d, "p" => p, "r" => r, "l" => l,
                "constants" => constants, "witness" => witness,
                "witness_out" => witness_out, "nmax" => nmax,
                "iterations" => iterations, "quadrature_points" => quadrature_points,
                "continuous" => continuous,
            });
            cmd_embed(a, seed)?
        }
        Cmd::Lemma22(mut a) => {
            apply_config!(a, &cfg, {
                "alpha" => alpha, "f" => f, "random" => random,
                "p" => p, "q" => q, "r" => r, "lambda" => lambda,
            });
            cmd_lemma22(a, seed)?
        }
        Cmd::Bernstein(mut a) => {
            apply_config!(a, &cfg, {
                "poly" => poly, "family" => family, "d" => d, "l" => l, "r" => r,
                "nmin" => nmin, "oversample" => oversample,
            });
            cmd_bernstein(a, seed)?
        }
        Cmd::Represent(mut a) => {
            apply_config!(a, &cfg, {
                "omega" => omega, "p" => p, "r" => r, "m" => m,
            });
            cmd_represent(a)?
        }
    };

    match &cli.out {
        Some(path) => fs::write(path, payload).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{payload}"),
    }
    Ok(code)
}

/// Parse the majorant mini-language: pow(A), log(B), pow(A)*log(B),
/// table:FILE. Exponents may reference the order, e.g. pow(0.5*r).
fn parse_majorant(spec: &str, r: f64) -> anyhow::Result<Majorant> {
    let s: String = spec.replace('\u{b7}', "*").split_whitespace().collect();
    if let Some(path) = s.strip_prefix("table:") {
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let values: Vec<f64> = serde_json::from_str(&text).context("table file must be a JSON array")?;
        return Ok(Majorant::tabulated(values)?);
    }
    let mut a = 0.0f64;
    let mut b = 0.0f64;
    let mut rest = s.as_str();
    let mut saw_factor = false;
    while !rest.is_empty() {
        let (kind, tail) = if let Some(t) = rest.strip_prefix("pow(") {
            ('p', t)
        } else if let Some(t) = rest.strip_prefix("log(") {
            ('l', t)
        } else {
            bail!("cannot parse majorant at '{rest}' (expected pow(...) or log(...))");
        };
        let close = tail.find(')').context("missing ')' in majorant")?;
        let coef = parse_exponent(&tail[..close], r)?;
        match kind {
            'p' => a += coef,
            _ => b += coef,
        }
        saw_factor = true;
        rest = &tail[close + 1..];
        rest = rest.strip_prefix('*').unwrap_or(rest);
    }
    if !saw_factor {
        bail!("empty majorant expression");
    }
    if a < 0.0 {
        bail!("power exponent must be nonnegative, got {a}");
    }
    Ok(Majorant::power_log(a, b))
}

// Exponent forms: X, X*r, r*X, r, -X*r ...
fn parse_exponent(text: &str, r: f64) -> anyhow::Result<f64> {
    let mut value = 1.0f64;
    let mut saw = false;
    for part in text.split('*') {
        let part = part.trim();
        if part == "r" {
            value *= r;
        } else {
            let x: f64 = part.parse().with_context(|| format!("bad exponent part '{part}'"))?;
            value *= x;
        }
        saw = true;
    }
    if !saw {
        bail!("empty exponent");
    }
    Ok(value)
}

fn load_poly(
    poly: &Option<PathBuf>,
    family: &Option<String>,
    d: usize,
    seed: u64,
) -> anyhow::Result<TrigPoly> {
    if let Some(path) = poly {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).context("parsing polynomial JSON")?
        } else {
            TrigPoly::from_csv(&text)?
        };
        return Ok(parsed);
    }
    let Some(spec) = family else {
        bail!("one of --poly or --family is required");
    };
    let (name, rest) = spec.split_once(':').unwrap_or((spec.as_str(), ""));
    match name {
        "wave" => {
            let k: i64 = rest.parse().context("wave:K needs an integer frequency")?;
            Ok(synth::wave(k))
        }
        "random" => {
            let n: i64 = rest.parse().context("random:N needs a box radius")?;
            Ok(synth::random_box(d, n, seed)?)
        }
        "decay" => {
            let (n, gamma) = rest.split_once(',').context("decay:N,GAMMA")?;
            let n: i64 = n.parse().context("decay box radius")?;
            let gamma: f64 = gamma.parse().context("decay exponent")?;
            Ok(synth::random_shell_decay(d, n, gamma, seed)?)
        }
        other => bail!("unknown family '{other}' (wave:K, random:N, decay:N,GAMMA)"),
    }
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_discretize(a: DiscretizeArgs) -> anyhow::Result<(String, ExitCode)> {
    let omega = parse_majorant(&a.omega, a.r)?;
    let seq = discretize(&omega, a.lambda, a.r, a.nmax)?;
    let report = verify_discretizing_properties(&seq, &omega);
    let payload = to_json(&json!({
        "sequence": seq,
        "report": report,
    }));
    let code = if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) };
    Ok((payload, code))
}

fn cmd_modulus(a: ModulusArgs, seed: u64, format: Format) -> anyhow::Result<(String, ExitCode)> {
    let f = load_poly(&a.poly, &a.family, a.d, seed)?;
    let q = match a.q.as_str() {
        "2" => SampleNorm::L2,
        "inf" | "infinity" | "sup" => SampleNorm::Sup,
        other => bail!("q must be 2 or inf, got '{other}'"),
    };
    if !(a.tmin > 0.0 && a.tmin < a.tmax && a.tmax <= 1.0) {
        bail!("need 0 < tmin < tmax <= 1");
    }
    let count = a.tcount.max(2);
    let ratio = (a.tmin / a.tmax).powf(1.0 / (count as f64 - 1.0));
    let t_grid: Vec<f64> = (0..count).map(|i| a.tmax * ratio.powi(i as i32)).collect();
    let mut query = ModulusQuery::new(a.r, a.l, q, t_grid);
    query.direction_count = a.directions;
    query.oversample = a.oversample;
    let points = modulus(&f, &query)?;
    let payload = match format {
        Format::Csv => modulus_to_csv(&points),
        Format::Json => to_json(&serde_json::to_value(&points)?),
    };
    Ok((payload, ExitCode::SUCCESS))
}

fn cmd_kkdl(a: KkdlArgs, seed: u64) -> anyhow::Result<(String, ExitCode)> {
    let g = load_poly(&a.poly, &a.family, a.d, seed)?;
    let opts = ConstructOptions {
        trials: a.trials,
        oversample: a.oversample,
        ..ConstructOptions::default()
    };
    let report = construct_dominating(&g, a.r, a.l, seed, &opts)?;
    let ratios: Vec<f64> = report.modulus_ratios.iter().map(|(_, v)| *v).collect();
    let spread = match (
        ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        ratios.iter().cloned().fold(0.0f64, f64::max),
    ) {
        (lo, hi) if lo > 0.0 && hi.is_finite() => hi / lo,
        _ if ratios.is_empty() => 1.0,
        _ => f64::INFINITY,
    };
    let ok = report.domination_ok && spread <= a.max_ratio_spread;
    let payload = to_json(&json!({
        "report": report,
        "ratio_spread": spread,
    }));
    Ok((payload, if ok { ExitCode::SUCCESS } else { ExitCode::from(1) }))
}

fn flag_json(flag: &Option<Flag>) -> Value {
    match flag {
        None => Value::Null,
        Some(Flag::Finite(v)) => json!(v),
        Some(Flag::Divergent) => json!("divergent"),
        Some(Flag::Undecided) => json!("undecided"),
    }
}

fn cmd_embed(a: EmbedArgs, seed: u64) -> anyhow::Result<(String, ExitCode)> {
    let omega = parse_majorant(&a.omega, a.r as f64)?;
    let query = EmbeddingQuery {
        d: a.d,
        r: a.r,
        l: a.l,
        p: a.p,
        omega,
        continuous: a.continuous,
    };
    let opts = AnalyzeOptions {
        nmax: a.nmax,
        iterations: a.iterations,
        seed,
        quadrature_points: a.quadrature_points,
    };
    let report = if a.constants {
        analyze(&query, &opts)?
    } else {
        lipap::embedding::classify(&query, a.quadrature_points)?
    };

    let mut witness_path = Value::Null;
    if a.witness && report.verdict == lipap::embedding::Verdict::Fails {
        let wopts = WitnessOptions {
            iterations: a.iterations,
            ..WitnessOptions::default()
        };
        let res = sharpness_witness(&query, a.nmax.min(512), seed, &wopts)?;
        let mut csv = String::from("nmax,ap_norm,lip_functional\n");
        for row in &res.rows {
            csv.push_str(&format!(
                "{},{:.16e},{:.16e}\n",
                row.nmax, row.ap_norm, row.lip_functional
            ));
        }
        fs::write(&a.witness_out, csv)
            .with_context(|| format!("writing {}", a.witness_out.display()))?;
        witness_path = json!(a.witness_out.display().to_string());
    }

    let payload = to_json(&json!({
        "query": query,
        "theta": report.theta,
        "case": report.case,
        "verdict": report.verdict,
        "integral_value": flag_json(&report.integral_value),
        "K": {
            "bruteforce": flag_json(&report.k_bruteforce),
            "discretized": flag_json(&report.k_discretized),
            "integral": flag_json(&report.k_integral),
        },
        "agreement_bracket": report.agreement_bracket,
        "witness_path": witness_path,
    }));
    Ok((payload, ExitCode::SUCCESS))
}

fn cmd_lemma22(a: Lemma22Args, seed: u64) -> anyhow::Result<(String, ExitCode)> {
    let (alpha, f) = if let Some(size) = a.random {
        (synth::random_nonneg(size, seed), synth::random_nonneg(size, seed ^ 0x5eed))
    } else {
        let load = |path: &Option<PathBuf>, what: &str| -> anyhow::Result<Vec<f64>> {
            let Some(p) = path else { bail!("--{what} file or --random is required") };
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("{what} must be a JSON array"))
        };
        (load(&a.alpha, "alpha")?, load(&a.f, "f")?)
    };
    let res = lipap::embedding::lemma22_equivalence(&alpha, &f, a.p, a.q, a.r, a.lambda)?;
    Ok((to_json(&serde_json::to_value(&res)?), ExitCode::SUCCESS))
}

fn cmd_bernstein(a: BernsteinArgs, seed: u64) -> anyhow::Result<(String, ExitCode)> {
    let f = load_poly(&a.poly, &a.family, a.d, seed)?;
    let direct = bernstein_ratio(&f, a.l, a.r, a.oversample)?;
    let reverse = match a.nmin {
        Some(nmin) => Some(reverse_bernstein_ratio(&f, a.l, a.r, nmin, a.oversample)?),
        None => None,
    };
    let payload = to_json(&json!({
        "bernstein_ratio": direct,
        "reverse_bernstein_ratio": reverse,
        "l": a.l,
        "r": a.r,
        "box_radius": f.box_radius(),
    }));
    Ok((payload, ExitCode::SUCCESS))
}

fn cmd_represent(a: RepresentArgs) -> anyhow::Result<(String, ExitCode)> {
    let omega = parse_majorant(&a.omega, a.r)?;
    let rep = represent_weights(&omega, a.p, a.r, a.m)?;
    let ok = rep.alpha.iter().all(|v| *v >= 0.0) && rep.lower > 0.0 && rep.upper.is_finite();
    let payload = to_json(&serde_json::to_value(&rep)?);
    Ok((payload, if ok { ExitCode::SUCCESS } else { ExitCode::from(1) }))
}
