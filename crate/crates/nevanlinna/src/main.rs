use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nevanlinna::bounds::{
    holder_curve, lower_count_curve, lower_k4_curve, upper_k49_curve, upper_k66_curve,
    upper_k79_curve, upper_k89_curve, AnalyticTails, BoundCurve, InverseVariant,
};
use nevanlinna::experiments::{
    eval_grid, sandwich_report_with, EvalPolicy, FamilyKind, FamilySpec, TruncationRule,
};
use nevanlinna::exponents::{convergence_exponent, ExponentMethod};
use nevanlinna::grid::geometric_grid;
use nevanlinna::hamiltonian::HamburgerHamiltonian;
use nevanlinna::io::{
    hamiltonian_from_json, hamiltonian_to_json, jacobi_from_json, jacobi_to_json, parse_system,
    SystemJson,
};
use nevanlinna::jacobi::{hamiltonian_to_jacobi, jacobi_to_hamiltonian};

#[derive(Parser)]
#[command(
    name = "nevanlinna",
    about = "Monodromy growth of limit-circle Jacobi matrices and canonical systems"
)]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for sampled hypothesis checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert Jacobi parameters to Hamiltonian lengths/angles (or back).
    Convert {
        #[arg(long)]
        input: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Evaluate log|w22(ir)| on a geometric r-grid as CSV.
    Eval {
        /// System JSON ({"lengths","angles"} or {"a","b"}).
        #[arg(long, conflicts_with = "preset")]
        input: Option<PathBuf>,
        /// Preset family name (alternating-power, pure-power, mixed-peaks, berezanskii).
        #[arg(long)]
        preset: Option<String>,
        /// Preset parameters, e.g. alpha0=2,alpha1=3.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 1e2)]
        r_lo: f64,
        #[arg(long, default_value_t = 1e6)]
        r_hi: f64,
        #[arg(long, default_value_t = 20)]
        per_decade: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Evaluate growth-bound curves for a system as CSV.
    Bounds {
        #[arg(long)]
        input: PathBuf,
        /// e.g. lower-count:s=2,upper-k89:alpha=2,beta=1
        #[arg(long)]
        methods: String,
        #[arg(long, default_value_t = 1e2)]
        r_lo: f64,
        #[arg(long, default_value_t = 1e6)]
        r_hi: f64,
        #[arg(long, default_value_t = 20)]
        per_decade: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run a preset family end to end: order fit, bounds, sandwich report.
    Experiment {
        #[arg(long)]
        preset: String,
        /// Preset parameters, e.g. alpha0=2,alpha1=3.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 1e4)]
        r_lo: f64,
        #[arg(long, default_value_t = 1e7)]
        r_hi: f64,
        #[arg(long, default_value_t = 10)]
        per_decade: usize,
        /// Directory for report.json and curves.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Convergence-exponent estimate of a sequence.
    Exponents {
        /// JSON array, or a system document (Jacobi: off-diagonal sequence;
        /// Hamiltonian: reciprocal lengths).
        #[arg(long)]
        input: PathBuf,
        /// ratio-limsup | counting-slope | exact-power:RATE
        #[arg(long, default_value = "counting-slope")]
        method: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: could not size thread pool: {e}");
        }
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Convert { input, out, format } => cmd_convert(&input, out.as_deref(), &format),
        Cmd::Eval {
            input,
            preset,
            params,
            r_lo,
            r_hi,
            per_decade,
            out,
            format,
        } => {
            let kind = resolve_system(input.as_deref(), preset.as_deref(), &params)?;
            cmd_eval(&kind, r_lo, r_hi, per_decade, out.as_deref(), &format)
        }
        Cmd::Bounds {
            input,
            methods,
            r_lo,
            r_hi,
            per_decade,
            out,
            format,
        } => cmd_bounds(
            &input, &methods, r_lo, r_hi, per_decade, out.as_deref(), &format, cli.seed,
        ),
        Cmd::Experiment {
            preset,
            params,
            r_lo,
            r_hi,
            per_decade,
            out,
        } => cmd_experiment(&preset, &params, r_lo, r_hi, per_decade, &out),
        Cmd::Exponents { input, method, out } => cmd_exponents(&input, &method, out.as_deref()),
    }
}

fn parse_params(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for part in text.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("parameter `{part}` is not of the form key=value"))?;
        let v: f64 = v.parse().with_context(|| format!("parameter `{part}`"))?;
        map.insert(k.trim().to_string(), v);
    }
    Ok(map)
}

fn preset_kind(preset: &str, params: &BTreeMap<String, f64>) -> Result<FamilyKind> {
    let need = |key: &str| -> Result<f64> {
        params
            .get(key)
            .copied()
            .ok_or_else(|| anyhow!("preset `{preset}` needs parameter `{key}`"))
    };
    let kind = match preset {
        "alternating-power" => FamilyKind::AlternatingPower {
            alpha0: need("alpha0")?,
            alpha1: need("alpha1")?,
        },
        "pure-power" => FamilyKind::PurePower {
            alpha: need("alpha")?,
            beta: need("beta")?,
        },
        "mixed-peaks" => FamilyKind::MixedPeaks {
            alpha: need("alpha")?,
            nu: need("nu")?,
            beta: need("beta")?,
            gamma: params.get("gamma").copied(),
        },
        "berezanskii" => FamilyKind::BerezanskiiPower {
            beta: need("beta")?,
            diag_ratio: params.get("diag_ratio").copied().unwrap_or(0.0),
        },
        other => bail!("unknown preset `{other}`"),
    };
    kind.validate()?;
    Ok(kind)
}

fn load_system(path: &Path) -> Result<FamilyKind> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match parse_system(&text)? {
        SystemJson::Hamiltonian(doc) => {
            let h = hamiltonian_from_json(doc)?;
            Ok(FamilyKind::ExplicitHamiltonian {
                lengths: h.lengths().to_vec(),
                angles: h.angles().to_vec(),
            })
        }
        SystemJson::Jacobi(doc) => {
            let j = jacobi_from_json(doc)?;
            Ok(FamilyKind::ExplicitJacobi {
                a: j.a().to_vec(),
                b: j.b().to_vec(),
            })
        }
    }
}

fn resolve_system(
    input: Option<&Path>,
    preset: Option<&str>,
    params: &str,
) -> Result<FamilyKind> {
    match (input, preset) {
        (Some(path), None) => load_system(path),
        (None, Some(name)) => preset_kind(name, &parse_params(params)?),
        (None, None) => bail!("either --input or --preset is required"),
        (Some(_), Some(_)) => bail!("--input and --preset are mutually exclusive"),
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

fn cmd_convert(input: &Path, out: Option<&Path>, format: &str) -> Result<()> {
    if format != "json" {
        bail!("convert emits JSON only");
    }
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let content = match parse_system(&text)? {
        SystemJson::Jacobi(doc) => {
            let j = jacobi_from_json(doc)?;
            let h = jacobi_to_hamiltonian(&j)?;
            let back = hamiltonian_to_jacobi(&h)?;
            let mut max_rel = 0.0f64;
            for n in 0..j.len() {
                let da = (back.a()[n] - j.a()[n]).abs() / j.a()[n].abs().max(1.0);
                let db = (back.b()[n] - j.b()[n]).abs() / j.b()[n];
                max_rel = max_rel.max(da).max(db);
            }
            eprintln!("round-trip max relative error: {max_rel:e}");
            serde_json::to_string_pretty(&hamiltonian_to_json(&h))?
        }
        SystemJson::Hamiltonian(doc) => {
            let h = hamiltonian_from_json(doc)?;
            let j = hamiltonian_to_jacobi(&h)?;
            let again = jacobi_to_hamiltonian(&j)?;
            let mut max_rel = 0.0f64;
            for n in 0..h.len().min(again.len()) {
                let dl = (again.lengths()[n] - h.lengths()[n]).abs() / h.lengths()[n];
                max_rel = max_rel.max(dl);
            }
            eprintln!("round-trip max relative error: {max_rel:e}");
            serde_json::to_string_pretty(&jacobi_to_json(&j))?
        }
    };
    write_output(out, &format!("{content}\n"))
}

fn cmd_eval(
    kind: &FamilyKind,
    r_lo: f64,
    r_hi: f64,
    per_decade: usize,
    out: Option<&Path>,
    format: &str,
) -> Result<()> {
    let grid = geometric_grid(r_lo, r_hi, per_decade)?;
    let points = eval_grid(kind, &grid, &EvalPolicy::default());
    let content = match format {
        "csv" => {
            let mut s = String::from("r,logw22,N_used,flags\n");
            for p in &points {
                let flags = if p.truncation_limited {
                    "truncation-limited"
                } else {
                    ""
                };
                s.push_str(&format!("{},{},{},{flags}\n", p.r, p.log_w22, p.n_used));
            }
            s
        }
        "json" => format!("{}\n", serde_json::to_string_pretty(&points)?),
        other => bail!("unknown format `{other}`"),
    };
    write_output(out, &content)
}

struct MethodSpec {
    name: String,
    params: BTreeMap<String, f64>,
}

/// Parse `lower-count:s=2,upper-k89:alpha=2,beta=1`: a token containing `:`
/// (or a bare method name) starts a method, bare k=v tokens attach to it.
fn parse_methods(text: &str) -> Result<Vec<MethodSpec>> {
    let mut specs: Vec<MethodSpec> = Vec::new();
    for token in text.split(',').filter(|t| !t.is_empty()) {
        if let Some((name, kv)) = token.split_once(':') {
            let mut params = BTreeMap::new();
            if !kv.is_empty() {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| anyhow!("bad method parameter `{kv}`"))?;
                params.insert(k.to_string(), v.parse::<f64>()?);
            }
            specs.push(MethodSpec {
                name: name.to_string(),
                params,
            });
        } else if token.contains('=') {
            let (k, v) = token.split_once('=').unwrap();
            let spec = specs
                .last_mut()
                .ok_or_else(|| anyhow!("parameter `{token}` before any method"))?;
            spec.params.insert(k.to_string(), v.parse::<f64>()?);
        } else {
            specs.push(MethodSpec {
                name: token.to_string(),
                params: BTreeMap::new(),
            });
        }
    }
    if specs.is_empty() {
        bail!("no methods requested");
    }
    Ok(specs)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bounds(
    input: &Path,
    methods: &str,
    r_lo: f64,
    r_hi: f64,
    per_decade: usize,
    out: Option<&Path>,
    format: &str,
    seed: u64,
) -> Result<()> {
    let kind = load_system(input)?;
    let h: HamburgerHamiltonian = match &kind {
        FamilyKind::ExplicitHamiltonian { lengths, angles } => {
            HamburgerHamiltonian::new(lengths.clone(), angles.clone())?
        }
        FamilyKind::ExplicitJacobi { .. } => {
            let n = kind.available_intervals().unwrap();
            kind.hamiltonian_truncation(n)?
        }
        _ => unreachable!("load_system returns explicit kinds"),
    };
    let grid = geometric_grid(r_lo, r_hi, per_decade)?;
    let tails = AnalyticTails::default();
    let mut curves: Vec<BoundCurve> = Vec::new();
    for m in parse_methods(methods)? {
        let get = |key: &str, default: Option<f64>| -> Result<f64> {
            m.params
                .get(key)
                .copied()
                .or(default)
                .ok_or_else(|| anyhow!("method `{}` needs parameter `{key}`", m.name))
        };
        let curve = match m.name.as_str() {
            "lower-count" => lower_count_curve(&h, get("s", Some(2.0))? as usize, &grid)?,
            "lower-k4" => lower_k4_curve(&h, get("s", Some(2.0))? as usize, &grid)?,
            "upper-k89" => {
                upper_k89_curve(&h, get("alpha", None)?, get("beta", None)?, &grid, &tails)?
            }
            "upper-k66" => upper_k66_curve(&h, &grid, &tails)?,
            "upper-k79" => upper_k79_curve(
                &h,
                get("alpha", None)?,
                get("omega", None)?,
                get("psi", Some(0.0))?,
                &grid,
                &tails,
            )?,
            "upper-k49" => upper_k49_curve(
                &h,
                get("alpha", None)?,
                get("beta", None)?,
                get("psi", Some(0.0))?,
                &grid,
                &tails,
                InverseVariant::Literal,
            )?,
            "upper-k49-geq" => upper_k49_curve(
                &h,
                get("alpha", None)?,
                get("beta", None)?,
                get("psi", Some(0.0))?,
                &grid,
                &tails,
                InverseVariant::Geq,
            )?,
            "upper-holder" => {
                holder_curve(&h, get("alpha", None)?, get("d", None)?, &grid, seed)?
            }
            other => bail!("unknown bound method `{other}`"),
        };
        curves.push(curve);
    }
    let content = match format {
        "csv" => curves_csv(&grid, &curves),
        "json" => format!("{}\n", serde_json::to_string_pretty(&curves)?),
        other => bail!("unknown format `{other}`"),
    };
    write_output(out, &content)
}

fn curves_csv(grid: &[f64], curves: &[BoundCurve]) -> String {
    let mut s = String::from("r");
    for c in curves {
        s.push(',');
        s.push_str(c.method);
    }
    s.push_str(",flags\n");
    for (i, &r) in grid.iter().enumerate() {
        s.push_str(&format!("{r}"));
        let mut flags: Vec<String> = Vec::new();
        for c in curves {
            let sample = &c.samples[i];
            s.push_str(&format!(",{}", sample.value));
            for f in &sample.flags {
                flags.push(format!("{}:{f:?}", c.method));
            }
            for f in &c.flags {
                flags.push(format!("{}:{f:?}", c.method));
            }
        }
        flags.dedup();
        s.push_str(&format!(",{}\n", flags.join(";")));
    }
    s
}

fn cmd_experiment(
    preset: &str,
    params: &str,
    r_lo: f64,
    r_hi: f64,
    per_decade: usize,
    out: &Path,
) -> Result<()> {
    let kind = preset_kind(preset, &parse_params(params)?)?;
    let spec = FamilySpec {
        kind,
        truncation: TruncationRule::AutoForR(r_hi),
    };
    let points = ((r_hi / r_lo).log10() * per_decade as f64).round() as usize + 1;
    let report = sandwich_report_with(&spec, r_lo, r_hi, points.max(10), &EvalPolicy::default())?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let report_path = out.join("report.json");
    fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    let grid: Vec<f64> = report.fit.points.iter().map(|p| p.r).collect();
    let mut csv = String::from("r,logw22");
    for c in &report.curves {
        csv.push(',');
        csv.push_str(c.method);
    }
    csv.push('\n');
    for (i, p) in report.fit.points.iter().enumerate() {
        csv.push_str(&format!("{},{}", grid[i], p.log_w22));
        for c in &report.curves {
            csv.push_str(&format!(",{}", c.samples[i].value));
        }
        csv.push('\n');
    }
    fs::write(out.join("curves.csv"), csv)?;
    eprintln!(
        "fitted slope {:.4} (lower {:?}, upper {:?}, pass {:?}); report at {}",
        report.fit.slope,
        report.best_lower_slope,
        report.best_upper_slope,
        report.pass,
        report_path.display()
    );
    Ok(())
}

fn cmd_exponents(input: &Path, method: &str, out: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let seq: Vec<f64> = if let Ok(raw) = serde_json::from_str::<Vec<f64>>(&text) {
        raw
    } else {
        match parse_system(&text)? {
            SystemJson::Jacobi(doc) => jacobi_from_json(doc)?.b().to_vec(),
            SystemJson::Hamiltonian(doc) => hamiltonian_from_json(doc)?
                .lengths()
                .iter()
                .map(|l| 1.0 / l)
                .collect(),
        }
    };
    let method = match method {
        "ratio-limsup" => ExponentMethod::RatioLimsup,
        "counting-slope" => ExponentMethod::CountingSlope,
        other => match other.split_once(':') {
            Some(("exact-power", rate)) => ExponentMethod::ExactPower(rate.parse()?),
            _ => bail!("unknown exponent method `{other}`"),
        },
    };
    let estimate = convergence_exponent(&seq, method)?;
    write_output(
        out,
        &format!("{}\n", serde_json::to_string_pretty(&estimate)?),
    )
}
