use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use hk_core::liegroups::{carnot_split, free_nilpotent};
use hk_core::model_file::ModelFile;
use hk_core::pipeline::Pipeline;
use hk_core::{commands, Error};

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "hk", version, about = "Horizontal holonomy and totally geodesic foliation checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Model file (.toml chart model or .json algebra model).
    file: PathBuf,
    /// Overrides the seed in the model's config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the holonomy derivative-order bound.
    #[arg(long)]
    depth: Option<usize>,
    /// Also run the numeric parallel-transport oracle.
    #[arg(long)]
    oracle: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Criterion {
    /// Totally geodesic foliation with D orthogonal to V.
    Tg,
    /// Principal bundle structure (trivial holonomy).
    Principal,
    /// The criterion for one-dimensional V.
    Onedim,
}

#[derive(Subcommand)]
enum Command {
    /// Growth vector and regularity of the flag.
    Flag(Common),
    /// Build and verify the selector.
    Selector(Common),
    /// Curvature, flattening and cross-checks.
    Curvature(Common),
    /// Horizontal holonomy algebra at the base point.
    Holonomy(Common),
    /// Decide a structure question.
    Decide {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "tg")]
        criterion: Criterion,
    },
    /// Generate model files.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Subcommand)]
enum Gen {
    /// Free nilpotent algebra split as p₁ ⊕ p₂ | 𝔨.
    FreeNilpotent {
        #[arg(long, default_value_t = 2)]
        generators: usize,
        #[arg(long)]
        step: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("HK_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hk: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn load(c: &Common) -> Result<Pipeline, Error> {
    let mut file = ModelFile::load(&c.file)?;
    if let Some(s) = c.seed {
        file.config.seed = s;
    }
    if let Some(d) = c.depth {
        file.config.depth_bound = Some(d);
    }
    Pipeline::new(file)
}

fn emit(out: Option<&Path>, v: &Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(v).expect("reports serialize") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<u8, Error> {
    let (command, common) = match cmd {
        Command::Flag(c) => (commands::Command::Flag, c),
        Command::Selector(c) => (commands::Command::Selector, c),
        Command::Curvature(c) => (commands::Command::Curvature, c),
        Command::Holonomy(c) => (commands::Command::Holonomy { oracle: c.oracle }, c),
        Command::Decide { common, criterion } => {
            let criterion = match criterion {
                Criterion::Tg => commands::Criterion::Tg,
                Criterion::Principal => commands::Criterion::Principal,
                Criterion::Onedim => commands::Criterion::OneDim,
            };
            (commands::Command::Decide(criterion), common)
        }
        Command::Gen(Gen::FreeNilpotent { generators, step, out }) => {
            let (spec, _) = free_nilpotent(generators, step)?;
            let split = carnot_split(&spec)?;
            let text = ModelFile::from_carnot(&spec, &split).to_json()?;
            match out {
                Some(p) => std::fs::write(&p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
                None => print!("{text}"),
            }
            return Ok(0);
        }
    };
    let p = load(&common)?;
    let input = common.file.display().to_string();
    let (value, outcome) = commands::run(&p, command, &input)?;
    emit(common.out.as_deref(), &value)?;
    Ok(outcome.exit_code())
}
