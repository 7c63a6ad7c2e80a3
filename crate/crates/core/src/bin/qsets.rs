use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use qsets::coloring::{self, ColoringFamily, Graph, SearchBudget};
use qsets::config::{Config, CONFIG_ENV};
use qsets::laws::{run_laws, Fault, LawConfig};
use qsets::opalg::{fission_from_function, spectral_function, star_map};
use qsets::pred::{corange_factor, direct_image, inverse_image, Predicate};
use qsets::qfun::check_axioms;
use qsets::{BlockOperator, Error, Relation, Tolerance};

#[derive(Parser)]
#[command(name = "qsets", version, about = "Quantum sets, relations, functions and colorings")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Global {
    /// JSON config file (tolerances, seed, trials, default output path).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Write JSON output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    rank_cut: Option<f64>,
    #[arg(long, global = true)]
    eq_tol: Option<f64>,
}

#[derive(Subcommand)]
enum Verb {
    /// Run the randomized law suite.
    Laws {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max_atoms: usize,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        /// Corrupt a primitive to check that the suite notices.
        #[arg(long, value_parser = ["dagger"])]
        inject_fault: Option<String>,
    },
    /// Check the function axioms of a relation.
    Check { relation: PathBuf },
    /// Compose two relations: FIRST then SECOND.
    Compose { first: PathBuf, second: PathBuf },
    /// Pull an operator on the target back along a partial function.
    Star { function: PathBuf, operator: PathBuf },
    /// Fission of a partial function.
    Fission { function: PathBuf },
    /// Direct (default) or inverse image of a predicate along a relation.
    PredImage {
        relation: PathBuf,
        predicate: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
    /// Corange of a partial function and its factorization.
    Corange { function: PathBuf },
    /// Spectral function of a self-adjoint operator.
    Spectral { operator: PathBuf },
    #[command(subcommand)]
    Coloring(ColoringVerb),
}

#[derive(Subcommand)]
enum ColoringVerb {
    /// Verify a projection family against a graph.
    Verify { graph: PathBuf, family: PathBuf },
    /// Search for a projection family.
    Search {
        graph: PathBuf,
        /// Number of colors, named "0", "1", ...
        #[arg(long)]
        colors: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = SearchBudget::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = SearchBudget::default().sweeps)]
        sweeps: usize,
    },
}

enum Failure {
    Input(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Math(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        Failure::Input(format!("{}: at `{at}`: {}", path.display(), e.into_inner()))
    })
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn emit<T: Serialize>(&self, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        match &self.path {
            Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
            None => {
                let _ = std::io::stdout().write_all(text.as_bytes());
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.global.config {
        Some(p) => Config::load(p).map_err(Failure::Input)?,
        None => Config::default(),
    };
    let base = cfg.tolerance()?;
    let tol = Tolerance::new(
        cli.global.rank_cut.unwrap_or(base.rank_cut),
        cli.global.eq_tol.unwrap_or(base.eq_tol),
    )?;
    let out = Output {
        path: cli.global.out.clone().or(cfg.out.clone()),
    };
    match cli.verb {
        Verb::Laws {
            seed,
            trials,
            max_atoms,
            max_dim,
            inject_fault,
        } => {
            let fault = inject_fault.map(|f| f.parse::<Fault>()).transpose()?;
            let lc = LawConfig {
                seed: seed.or(cfg.seed).unwrap_or(0),
                trials: trials.or(cfg.trials).unwrap_or(50),
                max_atoms,
                max_dim,
                fault,
            };
            let report = run_laws(&lc, &tol)?;
            out.emit(&report)?;
            if !report.pass {
                let law = report.counterexample.as_ref().map_or("?", |c| c.law.as_str());
                return Err(Failure::Math(format!("law `{law}` violated; counterexample in the report")));
            }
        }
        Verb::Check { relation } => {
            let r: Relation = read_json(&relation)?;
            out.emit(&check_axioms(&r, &tol))?;
        }
        Verb::Compose { first, second } => {
            let r: Relation = read_json(&first)?;
            let s: Relation = read_json(&second)?;
            out.emit(&Relation::compose(&s, &r, &tol)?)?;
        }
        Verb::Star { function, operator } => {
            let f: Relation = read_json(&function)?;
            let b: BlockOperator = read_json(&operator)?;
            out.emit(&star_map(&f, &b, &tol)?)?;
        }
        Verb::Fission { function } => {
            let f: Relation = read_json(&function)?;
            out.emit(&fission_from_function(&f, &tol)?)?;
        }
        Verb::PredImage {
            relation,
            predicate,
            inverse,
        } => {
            let r: Relation = read_json(&relation)?;
            let p: Predicate = read_json(&predicate)?;
            let img = if inverse {
                inverse_image(&r, &p, &tol)?
            } else {
                direct_image(&r, &p, &tol)?
            };
            out.emit(&img)?;
        }
        Verb::Corange { function } => {
            let g: Relation = read_json(&function)?;
            out.emit(&corange_factor(&g, &tol)?)?;
        }
        Verb::Spectral { operator } => {
            let a: BlockOperator = read_json(&operator)?;
            out.emit(&spectral_function(&a, &tol)?)?;
        }
        Verb::Coloring(ColoringVerb::Verify { graph, family }) => {
            let g: Graph = read_json(&graph)?;
            let fam: ColoringFamily = read_json(&family)?;
            let report = coloring::verify(&g, &fam, &tol)?;
            out.emit(&report)?;
            if !report.pass {
                return Err(Failure::Math(format!(
                    "not a coloring: max violation {:.3e}",
                    report.max_violation
                )));
            }
        }
        Verb::Coloring(ColoringVerb::Search {
            graph,
            colors,
            dim,
            seed,
            restarts,
            sweeps,
        }) => {
            let g: Graph = read_json(&graph)?;
            let names: Vec<String> = (0..colors).map(|t| t.to_string()).collect();
            let budget = SearchBudget { restarts, sweeps };
            let outcome = coloring::search(&g, &names, dim, seed.or(cfg.seed).unwrap_or(0), budget, &tol)?;
            out.emit(&outcome)?;
            if outcome.family.is_none() {
                return Err(Failure::Math(format!(
                    "no family found within {restarts} restarts (best violation {:.3e}); \
                     this is not a proof of nonexistence",
                    outcome.best_violation
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
