//! Command-line harness: configuration, experiment orchestration, and
//! reproducible CSV outputs.
//!
//! Subcommands: `norm`, `greedy`, `democracy`, `embeddings`, `besov`,
//! `selftest`. Every parameter can come from a flat `key = value` config
//! file (`--config`); flags override file values. Outputs are deterministic
//! given the seed: identical invocations produce byte-identical CSVs.
//! `ORLICZ_GREEDY_THREADS` caps the worker pool.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use orlicz_greedy::besov::besov_identification_check;
use orlicz_greedy::config::{function_from_spec, parse_config, weight_from_spec, young_from_spec};
use orlicz_greedy::democracy::{democracy_probe, Generator};
use orlicz_greedy::greedy::{RankedExpansion, SigmaMode, SigmaSolver};
use orlicz_greedy::grid::GridGeometry;
use orlicz_greedy::lorentz::{embedding_check, optimality_witness};
use orlicz_greedy::selftest::{fmt_f64, probe_rows_csv, run_all};
use orlicz_greedy::wavelets::{analyze, WaveletFamily};
use orlicz_greedy::OrliczSpace;

#[derive(Parser)]
#[command(
    name = "orlicz-greedy",
    version,
    about = "Greedy wavelet approximation in weighted Orlicz spaces"
)]
struct Cli {
    /// Flat `key = value` config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Grid and space options shared by the experiment subcommands.
#[derive(Args, Clone)]
struct SpaceArgs {
    /// Dimension (1 or 2).
    #[arg(long)]
    d: Option<usize>,
    /// Finest level J (cells of side 2^-J).
    #[arg(long = "J")]
    j: Option<i32>,
    /// Domain exponent M (domain is [0, 2^M)^d).
    #[arg(long = "M")]
    m: Option<i32>,
    /// Young function: power:p=..., zygmund:p=...,a=..., table:<path>.
    #[arg(long)]
    young: Option<String>,
    /// Weight: const, power:gamma=...,center=..., prod:..., file:<path>.
    #[arg(long)]
    weight: Option<String>,
    /// Wavelet family: haar, daubechies:2, daubechies:3.
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit a generic plotting script next to the CSV (needs --out).
    #[arg(long)]
    plotscript: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Luxemburg norm of a grid function.
    Norm {
        #[command(flatten)]
        space: SpaceArgs,
        /// Function: file:<path>, random:seed=..., bump, sawtooth.
        #[arg(long)]
        function: Option<String>,
    },
    /// Greedy error vs sigma_N over N = 0..=N.
    Greedy {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        function: Option<String>,
        /// Largest N to report.
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        /// exhaustive | support.
        #[arg(long = "sigma-mode")]
        sigma_mode: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Democracy probe: brick norms vs h± over family generators.
    Democracy {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "Nmax")]
        n_max: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma list: disjoint,tower,random (or a,b,c).
        #[arg(long)]
        generators: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Embedding chain or optimality witnesses.
    Embeddings {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        /// chain | optimality.
        #[arg(long)]
        mode: Option<String>,
        /// Witness sizes (comma list) for optimality mode.
        #[arg(long = "N-list")]
        n_list: Option<String>,
        /// Trial-function count for chain mode.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Besov identification norms.
    Besov {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the acceptance suite and write its CSV artifacts.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for CSV artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parameter resolution: flag > config file > default.
struct Resolver {
    cfg: BTreeMap<String, String>,
}

impl Resolver {
    fn load(path: &Option<PathBuf>) -> Result<Self> {
        let cfg = match path {
            None => BTreeMap::new(),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                parse_config(&text)?
            }
        };
        Ok(Resolver { cfg })
    }

    fn string(&self, flag: &Option<String>, key: &str, default: &str) -> String {
        flag.clone()
            .or_else(|| self.cfg.get(key).cloned())
            .unwrap_or_else(|| default.to_string())
    }

    fn parse<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.cfg.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| anyhow::anyhow!("config key {key}: cannot parse {raw:?}")),
        }
    }
}

struct SpaceSetup {
    geometry: GridGeometry,
    space: OrliczSpace,
    family: WaveletFamily,
}

fn build_space(r: &Resolver, args: &SpaceArgs) -> Result<SpaceSetup> {
    let d = r.parse(args.d, "d", 1usize)?;
    let j = r.parse(args.j, "J", 8i32)?;
    let m = r.parse(args.m, "M", 4i32)?;
    let geometry = GridGeometry::new(d, j, m)?;
    let young = young_from_spec(&r.string(&args.young, "young", "power:p=2"))?;
    let weight = weight_from_spec(geometry, &r.string(&args.weight, "weight", "const"))?;
    let family = WaveletFamily::parse(&r.string(&args.family, "family", "haar"))?;
    Ok(SpaceSetup {
        geometry,
        space: OrliczSpace::new(weight, young)?,
        family,
    })
}

fn emit(csv: &str, out: &OutArgs) -> Result<()> {
    match &out.out {
        None => {
            print!("{csv}");
            if out.plotscript {
                bail!("--plotscript needs --out");
            }
        }
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
            if out.plotscript {
                let script = path.with_extension("py");
                fs::write(&script, plot_script(path))
                    .with_context(|| format!("writing {}", script.display()))?;
            }
        }
    }
    Ok(())
}

fn plot_script(csv_path: &Path) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Generic plot for {name}: numeric columns vs the first column."""
import csv, sys
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{name}"
with open(path) as fh:
    rows = list(csv.DictReader(fh))
cols = rows[0].keys()
x_key = list(cols)[0]

def numeric(key):
    out = []
    for r in rows:
        try:
            out.append(float(r[key]))
        except (TypeError, ValueError):
            return None
    return out

x = numeric(x_key)
plt.figure(figsize=(7, 5))
for key in cols:
    if key == x_key:
        continue
    y = numeric(key)
    if y is not None and x is not None:
        plt.plot(x, y, marker="o", label=key)
plt.xlabel(x_key)
plt.xscale("log")
plt.yscale("log")
plt.legend()
plt.tight_layout()
plt.savefig(path + ".png", dpi=150)
print("wrote", path + ".png")
"#,
        name = csv_path.display()
    )
}

fn parse_sigma_mode(s: &str) -> Result<SigmaMode> {
    match s {
        "exhaustive" => Ok(SigmaMode::Exhaustive),
        "support" => Ok(SigmaMode::Support),
        other => bail!("sigma-mode must be exhaustive or support, got {other:?}"),
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    init_thread_pool()?;
    let r = Resolver::load(&cli.config)?;

    match cli.command {
        Command::Norm { space, function } => {
            let setup = build_space(&r, &space)?;
            let f =
                function_from_spec(setup.geometry, &r.string(&function, "function", "sawtooth"))?;
            let value = setup.space.norm(&f)?;
            println!("{}", fmt_f64(value));
        }
        Command::Greedy {
            space,
            function,
            n,
            alpha,
            q,
            sigma_mode,
            out,
        } => {
            let setup = build_space(&r, &space)?;
            let f =
                function_from_spec(setup.geometry, &r.string(&function, "function", "sawtooth"))?;
            let n_max = r.parse(n, "N", 8usize)?;
            let want_approx = alpha.is_some()
                || q.is_some()
                || r.cfg.contains_key("alpha")
                || r.cfg.contains_key("q");
            let alpha = r.parse(alpha, "alpha", 0.5f64)?;
            let q = r.parse(q, "q", 1.0f64)?;
            let mode = parse_sigma_mode(&r.string(&sigma_mode, "sigma_mode", "support"))?;
            let e = analyze(&f, setup.family)?;
            let ranked = RankedExpansion::new(e, &setup.space)?;
            let solver = SigmaSolver::new(&ranked, &setup.space)?;
            if want_approx {
                let a_norm = orlicz_greedy::greedy::approx_space_norm(
                    &ranked,
                    alpha,
                    q,
                    &setup.space,
                    mode,
                )?;
                eprintln!(
                    "approx_space_norm(alpha={alpha}, q={q}) = {}",
                    fmt_f64(a_norm)
                );
            }
            let mut csv = String::from("N,greedy_error,sigma_support,sigma_exhaustive,ratio\n");
            for n in 0..=n_max {
                let err = ranked.greedy_error(n, &setup.space)?;
                let support = solver.sigma_n(n, SigmaMode::Support)?;
                let (exhaustive, reference) = match mode {
                    SigmaMode::Exhaustive => {
                        let v = solver.sigma_n(n, SigmaMode::Exhaustive)?;
                        (fmt_f64(v), v)
                    }
                    SigmaMode::Support => (String::new(), support),
                };
                let ratio = if reference > 0.0 {
                    err / reference
                } else {
                    1.0
                };
                csv.push_str(&format!(
                    "{n},{},{},{exhaustive},{}\n",
                    fmt_f64(err),
                    fmt_f64(support),
                    fmt_f64(ratio)
                ));
            }
            emit(&csv, &out)?;
        }
        Command::Democracy {
            space,
            n_max,
            trials,
            seed,
            generators,
            out,
        } => {
            let setup = build_space(&r, &space)?;
            let n_max = r.parse(n_max, "Nmax", 64usize)?;
            let trials = r.parse(trials, "trials", 10usize)?;
            let seed = r.parse(seed, "seed", 0u64)?;
            let gens: Vec<Generator> = r
                .string(&generators, "generators", "disjoint,tower,random")
                .split(',')
                .map(|s| Generator::parse(s.trim()))
                .collect::<orlicz_greedy::Result<_>>()?;
            let mut ns = Vec::new();
            let mut n = 1usize;
            while n <= n_max {
                ns.push(n);
                n *= 2;
            }
            let rows = democracy_probe(&setup.space, setup.family, &ns, trials, seed, &gens)?;
            emit(&probe_rows_csv(&rows), &out)?;
        }
        Command::Embeddings {
            space,
            alpha,
            q,
            mode,
            n_list,
            trials,
            seed,
            out,
        } => {
            let setup = build_space(&r, &space)?;
            let alpha = r.parse(alpha, "alpha", 0.5f64)?;
            let q = r.parse(q, "q", 1.0f64)?;
            let mode = r.string(&mode, "mode", "chain");
            let seed = r.parse(seed, "seed", 0u64)?;
            match mode.as_str() {
                "chain" => {
                    let trials = r.parse(trials, "trials", 3usize)?;
                    let mut csv = String::from(
                        "trial,lorentz_hplus,approx_space,lorentz_hminus,ratio_middle_left,ratio_right_middle\n",
                    );
                    for t in 0..trials {
                        let f = function_from_spec(
                            setup.geometry,
                            &format!("random:seed={}", seed.wrapping_add(t as u64)),
                        )?;
                        let e = analyze(&f, setup.family)?;
                        let rep = embedding_check(&e, alpha, q, &setup.space)?;
                        csv.push_str(&format!(
                            "{t},{},{},{},{},{}\n",
                            fmt_f64(rep.left),
                            fmt_f64(rep.middle),
                            fmt_f64(rep.right),
                            fmt_f64(rep.ratio_middle_left),
                            fmt_f64(rep.ratio_right_middle)
                        ));
                    }
                    emit(&csv, &out)?;
                }
                "optimality" => {
                    let list = r.string(&n_list, "N_list", "2,4,8");
                    let mut csv = String::from(
                        "N,tau,phi_ratio,h_plus,h_minus,approx_norm,lower_witness,upper_witness\n",
                    );
                    for tok in list.split(',') {
                        let n: usize = tok.trim().parse().context("bad N in N-list")?;
                        let rep = optimality_witness(&setup.space, setup.family, alpha, q, n)?;
                        csv.push_str(&format!(
                            "{n},{},{},{},{},{},{},{}\n",
                            fmt_f64(rep.tau),
                            fmt_f64(rep.phi_ratio),
                            fmt_f64(rep.h_plus),
                            fmt_f64(rep.h_minus),
                            fmt_f64(rep.approx_norm),
                            fmt_f64(rep.lower_witness),
                            fmt_f64(rep.upper_witness)
                        ));
                    }
                    emit(&csv, &out)?;
                }
                other => bail!("embeddings mode must be chain or optimality, got {other:?}"),
            }
        }
        Command::Besov {
            space,
            gamma,
            p,
            trials,
            seed,
            out,
        } => {
            let setup = build_space(&r, &space)?;
            let gamma = r.parse(gamma, "gamma", 0.25f64)?;
            let p = r.parse(p, "p", 2.0f64)?;
            let trials = r.parse(trials, "trials", 3usize)?;
            let seed = r.parse(seed, "seed", 0u64)?;
            let mut csv =
                String::from("trial,tau,norm_a,norm_b,norm_c,ratio_ab,ratio_bc,ratio_ac\n");
            for t in 0..trials {
                let f = function_from_spec(
                    setup.geometry,
                    &format!("random:seed={}", seed.wrapping_add(t as u64)),
                )?;
                let e = analyze(&f, setup.family)?;
                let rep = besov_identification_check(&e, gamma, p, setup.space.weight())?;
                csv.push_str(&format!(
                    "{t},{},{},{},{},{},{},{}\n",
                    fmt_f64(rep.tau),
                    fmt_f64(rep.coef_norm),
                    fmt_f64(rep.besov_norm),
                    fmt_f64(rep.approx_norm),
                    fmt_f64(rep.coef_norm / rep.besov_norm),
                    fmt_f64(rep.besov_norm / rep.approx_norm),
                    fmt_f64(rep.coef_norm / rep.approx_norm)
                ));
            }
            emit(&csv, &out)?;
        }
        Command::Selftest { seed, out } => {
            let seed = r.parse(seed, "seed", 20260810u64)?;
            let out_dir = out
                .or_else(|| r.cfg.get("out").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("selftest_out"));
            let reports = run_all(seed)?;
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            let mut all_ok = true;
            for rep in &reports {
                let status = if rep.passed { "PASS" } else { "FAIL" };
                println!(
                    "[{status}] criterion {:>2} ({}): {}",
                    rep.id, rep.name, rep.details
                );
                all_ok &= rep.passed;
                for (name, csv) in &rep.csvs {
                    let path = out_dir.join(name);
                    fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
                }
            }
            if !all_ok {
                bail!("acceptance criteria failed");
            }
        }
    }
    Ok(())
}

fn init_thread_pool() -> Result<()> {
    if let Ok(raw) = std::env::var("ORLICZ_GREEDY_THREADS") {
        let n: usize = raw
            .parse()
            .with_context(|| format!("ORLICZ_GREEDY_THREADS = {raw:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
