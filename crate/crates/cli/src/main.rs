use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eha_core::analysis::{
    avg_entropy, exact_ground, ground_state, lanczos_ground, LanczosOptions, SpectrumResult, DEFAULT_DEGENERACY_TOL,
};
use eha_core::experiment::{
    self, preset, preset_names, run_experiment, run_suite, suite_names, table2_presets, table2_report,
    ExperimentConfig, RunOptions, Suite,
};
use eha_core::hamiltonians::ModelSpec;
use eha_core::pauli::parse_pauli_file;
use eha_core::PauliSum;

#[derive(Parser)]
#[command(name = "eha", version, about = "Train and benchmark variational eigensolver ansatzes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct RunFlags {
    /// Master seed overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for realizations (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shots per Pauli term; switches to sampled expectations.
    #[arg(long)]
    shots: Option<u64>,
    /// Suppress per-realization progress lines.
    #[arg(long, short)]
    quiet: bool,
}

impl RunFlags {
    fn options(&self, out_dir: Option<PathBuf>) -> RunOptions {
        RunOptions {
            out_dir,
            workers: self.workers,
            master_seed: self.seed,
            shots: self.shots,
            progress: !self.quiet,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file or preset name.
    Run {
        config: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a named suite, or `table2` for the benchmark-table presets.
    Suite {
        name: String,
        /// With `table2`: include the 12- and 16-qubit rows.
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Render a report from existing outputs.
    Report {
        #[arg(value_enum)]
        kind: ReportKind,
        /// Directory holding one subdirectory per preset.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// Include the 12- and 16-qubit rows.
        #[arg(long)]
        full: bool,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Exact ground energy of a model: preset name, config file, Pauli file,
    /// or `hm:N`, `tfim:N:JZ:HX`, `bhm:N`.
    Exact {
        model: String,
        #[arg(long, value_enum, default_value_t = Solver::Auto)]
        solver: Solver,
    },
    /// List presets and suites.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    Table2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Auto,
    Dense,
    Lanczos,
}

fn load_config(arg: &str) -> Result<ExperimentConfig> {
    let path = Path::new(arg);
    if path.is_file() {
        return ExperimentConfig::from_file(path).with_context(|| format!("loading {arg}"));
    }
    preset(arg).with_context(|| format!("`{arg}` is neither a readable file nor a preset"))
}

fn report_run(s: &experiment::Summary) {
    println!(
        "{}: {} {} blocks={} cx={} E0={:.6} ({:?}, degeneracy {})",
        s.name,
        s.model_label,
        s.ansatz.family,
        s.ansatz.blocks,
        s.ansatz.cx_count,
        s.exact.ground_energy,
        s.exact.solver,
        s.exact.degeneracy
    );
    println!(
        "  energy best {:.6} mean {:.6} std {:.6}; fidelity best {:.6} mean {:.6} std {:.6}",
        s.energy.best, s.energy.mean, s.energy.std, s.fidelity.best, s.fidelity.mean, s.fidelity.std
    );
    for c in s.checks.iter().filter(|c| !c.passed) {
        println!("  check {} failed: {}", c.name, c.detail);
    }
}

fn parse_shorthand(spec: &str) -> Result<ModelSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| -> Result<f64> {
        parts
            .get(i)
            .with_context(|| format!("`{spec}` is missing field {i}"))?
            .parse::<f64>()
            .with_context(|| format!("bad number in `{spec}`"))
    };
    let sites = || -> Result<usize> {
        parts
            .get(1)
            .with_context(|| format!("`{spec}` is missing the site count"))?
            .parse::<usize>()
            .with_context(|| format!("bad site count in `{spec}`"))
    };
    Ok(match parts[0] {
        "hm" if parts.len() == 2 => ModelSpec::Hm {
            sites: sites()?,
            j: 1.0,
            boundary: Default::default(),
        },
        "tfim" if parts.len() == 4 => ModelSpec::Tfim {
            sites: sites()?,
            jz: num(2)?,
            hx: num(3)?,
        },
        "bhm" if parts.len() == 2 => ModelSpec::Bhm {
            sites: sites()?,
            t: 1.0,
            u: 7.0,
            cutoff: 2,
        },
        _ => bail!("unrecognized model `{spec}`"),
    })
}

fn load_model(arg: &str) -> Result<(String, PauliSum)> {
    let path = Path::new(arg);
    if path.is_file() {
        if path.extension().is_some_and(|e| e == "toml") {
            let c = ExperimentConfig::from_file(path)?;
            return Ok((c.model.label(), c.model.build()?));
        }
        return Ok((arg.to_string(), parse_pauli_file(path)?));
    }
    let spec = match preset(arg) {
        Ok(c) => c.model,
        Err(_) => parse_shorthand(arg)?,
    };
    Ok((spec.label(), spec.build()?))
}

fn solve(h: &PauliSum, solver: Solver) -> Result<SpectrumResult> {
    Ok(match solver {
        Solver::Auto => ground_state(h, DEFAULT_DEGENERACY_TOL)?,
        Solver::Dense => exact_ground(h, DEFAULT_DEGENERACY_TOL)?,
        Solver::Lanczos => lanczos_ground(h, DEFAULT_DEGENERACY_TOL, &LanczosOptions::default())?,
    })
}

fn run_named_suite(name: &str, full: bool, flags: &RunFlags) -> Result<bool> {
    let root = flags.out.clone().unwrap_or_else(|| PathBuf::from("runs"));
    if name == "table2" {
        let mut ok = true;
        for p in table2_presets(full) {
            let res = run_experiment(&preset(p)?, &flags.options(Some(root.join(p))))?;
            report_run(&res.summary);
            ok &= res.summary.all_checks_passed;
        }
        let report = table2_report(&root, &table2_presets(full))?;
        print!("{}", report.render());
        return Ok(ok);
    }
    let s: Suite = experiment::suite(name)?;
    let res = run_suite(&s, &flags.options(Some(root)))?;
    for r in &res.runs {
        report_run(&r.summary);
    }
    println!("index written to {}", res.out_dir.join(experiment::SUITE_INDEX_FILE).display());
    Ok(res.index.all_checks_passed)
}

fn main_inner() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, flags } => {
            let cfg = load_config(&config)?;
            let res = run_experiment(&cfg, &flags.options(flags.out.clone()))?;
            report_run(&res.summary);
            if let Some(d) = &res.out_dir {
                println!("outputs in {}", d.display());
            }
            Ok(res.summary.all_checks_passed)
        }
        Command::Suite { name, full, flags } => run_named_suite(&name, full, &flags),
        Command::Report { kind, out, full, json } => match kind {
            ReportKind::Table2 => {
                let report = table2_report(&out, &table2_presets(full))?;
                if json {
                    println!("{}", serde_json::to_string_pretty(&report)?);
                } else {
                    print!("{}", report.render());
                }
                Ok(report.passed())
            }
        },
        Command::Exact { model, solver } => {
            let (label, h) = load_model(&model)?;
            let s = solve(&h, solver)?;
            println!("model: {label}");
            println!("qubits: {}", h.num_qubits());
            println!("terms: {}", h.len());
            println!("solver: {:?}", s.solver);
            println!("ground_energy: {:.10}", s.ground_energy);
            println!("degeneracy: {}", s.degeneracy());
            if s.degeneracy() == 1 {
                println!("ground_entropy: {:.10}", avg_entropy(&s.ground_space[0]));
            }
            Ok(true)
        }
        Command::List => {
            println!("presets: {}", preset_names().collect::<Vec<_>>().join(", "));
            println!("suites: table2, {}", suite_names().collect::<Vec<_>>().join(", "));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
