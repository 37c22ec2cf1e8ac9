//! The `manlab` command-line workbench.

mod report;
mod spec;

pub use report::{
    emit_csv, rows_from_results, Analysis, CsvRow, InputSummary, RunReport, RunResult,
};
pub use spec::{
    from_matrix, parse_spec, parse_spec_with, parse_unitary, to_matrix, AlgebraSpec, MatrixJson,
    SpecKind, MAX_DIM,
};

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::algebra::OperatorAlgebra;
use crate::error::ManError;
use crate::man::{self, LogBase};
use crate::protocol::{self, DEFAULT_SAMPLES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Spec { path: String, message: String },
    #[error("{path}: {message}")]
    Csv { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Man(#[from] ManError),
}

#[derive(Debug, Parser)]
#[command(
    name = "manlab",
    version,
    about = "Mutual averaged non-commutativity of operator algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Monte-Carlo samples (10000 by default, 1000 pairs for markov-check).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Swap-test shots per measured overlap; exact overlaps when absent.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    #[arg(long, global = true, env = "MANLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Threshold ε of the Markov check; comma-separated list for sweeps.
    #[arg(long, global = true, value_delimiter = ',')]
    pub epsilon: Vec<f64>,
    /// Also write a CSV table to this path.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[arg(long, global = true, default_value = "2")]
    pub log_base: LogBase,
    /// Omit structural summaries from the report.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Accept ambient dimensions above the cap.
    #[arg(long, global = true)]
    pub allow_large: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ManMethod {
    Omega,
    Projection,
    Collinear,
    Entropy,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolKind {
    Choi,
    Stochastic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structure of an algebra and its commutant.
    Analyze { spec: PathBuf },
    /// S(A:B) by the chosen method.
    Man {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "omega")]
        method: ManMethod,
    },
    /// Self-MAN NC(A).
    Selfman { spec: PathBuf },
    /// Upper bounds on S(A:B) with the exact value.
    Bounds { a: PathBuf, b: PathBuf },
    /// Average of S(A:U(B)) over Haar U.
    OrbitAvg {
        a: PathBuf,
        b: PathBuf,
        /// Add a Monte-Carlo estimate with --samples draws.
        #[arg(long)]
        mc: bool,
    },
    /// Closed forms for region algebras on identical sites (1-based regions).
    Lattice {
        #[arg(long, value_delimiter = ',', required = true)]
        sites: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        s1: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        s2: Vec<usize>,
        /// Also evaluate on the explicitly constructed algebras.
        #[arg(long)]
        explicit: bool,
    },
    /// MAN of two maximal abelian algebras.
    Masa { a: PathBuf, b: PathBuf },
    /// Quantumness of one basis against another.
    Quantumness { a: PathBuf, b: PathBuf },
    /// G_A(U) = S(A : U(A')).
    Aotoc {
        spec: PathBuf,
        #[arg(long)]
        unitary: PathBuf,
    },
    /// Simulated measurement protocols; self-MAN when B is omitted.
    Protocol {
        #[arg(value_enum)]
        kind: ProtocolKind,
        a: PathBuf,
        b: Option<PathBuf>,
        /// Evaluate expectations exactly instead of sampling.
        #[arg(long)]
        exact: bool,
    },
    /// Empirical restricted-distance probability against its bound.
    MarkovCheck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 32)]
        state_samples: usize,
    },
    /// Parameter grids written as tables.
    Sweep {
        #[command(subcommand)]
        grid: Sweep,
    },
}

#[derive(Debug, Subcommand)]
pub enum Sweep {
    /// S1 = S2 = first k sites for k = 0..=sites.
    Lattice {
        #[arg(long, default_value_t = 2)]
        site_dim: usize,
        #[arg(long, default_value_t = 3)]
        sites: usize,
    },
    /// NC over spec files and over single blocks (1, d_J) for d_J = 1..=max_irrep.
    Selfman {
        specs: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        max_irrep: usize,
    },
    /// Markov check over the --epsilon list.
    Markov {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 32)]
        state_samples: usize,
    },
}

struct Loaded {
    algebra: OperatorAlgebra,
    spec: AlgebraSpec,
    source: String,
}

struct Context<'a> {
    opts: &'a GlobalOpts,
    inputs: Vec<InputSummary>,
    results: Vec<RunResult>,
    bounds: Option<man::ManBounds>,
    rows: Vec<CsvRow>,
}

impl Context<'_> {
    fn load(&mut self, path: &Path) -> Result<Loaded, CliError> {
        let spec = parse_spec_with(path, self.opts.allow_large)?;
        let algebra = spec.build()?;
        let source = path.display().to_string();
        self.inputs.push(InputSummary {
            source: source.clone(),
            kind: spec.kind_name().to_string(),
            structure: Some(algebra.summary()?),
        });
        Ok(Loaded {
            algebra,
            spec,
            source,
        })
    }

    fn label(items: &[&Loaded]) -> String {
        items
            .iter()
            .map(|l| l.source.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn man(&mut self, inputs: &str, r: man::ManReport) {
        self.rows.push(CsvRow::from_man(inputs, &r));
        self.results.push(RunResult::Man(r));
    }

    fn estimate(&mut self, inputs: &str, r: protocol::EstimatorResult) {
        self.rows
            .push(CsvRow::from_estimate(inputs, &r, self.opts.log_base));
        self.results.push(RunResult::Estimate(r));
    }

    fn samples(&self) -> usize {
        self.opts.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    fn epsilons(&self) -> Result<Vec<f64>, CliError> {
        if self.opts.epsilon.is_empty() {
            return Err(CliError::Usage("--epsilon is required".into()));
        }
        Ok(self.opts.epsilon.clone())
    }

    fn markov(&mut self, a: &Path, b: &Path, state_samples: usize) -> Result<(), CliError> {
        let eps = self.epsilons()?;
        let (la, lb) = (self.load(a)?, self.load(b)?);
        let reports = protocol::markov_sweep(
            &la.algebra,
            &lb.algebra,
            &eps,
            self.opts.samples.unwrap_or(1_000),
            state_samples,
            self.opts.seed,
        )?;
        let label = Self::label(&[&la, &lb]);
        for r in reports {
            self.rows.push(CsvRow {
                inputs: format!("{label} eps={}", r.epsilon),
                method: "markov".into(),
                s: r.man,
                s2: man::log_man(r.man, self.opts.log_base),
                commutant_bound: None,
                weak_bound: None,
                intersection_bound: None,
                std_error: Some(r.std_error),
                samples: Some(r.samples),
                seed: Some(r.seed),
            });
            self.results.push(RunResult::Markov(r));
        }
        Ok(())
    }
}

fn execute(cmd: &Command, ctx: &mut Context<'_>) -> Result<(), CliError> {
    let base = ctx.opts.log_base;
    let seed = ctx.opts.seed;
    match cmd {
        Command::Analyze { spec } => {
            let l = ctx.load(spec)?;
            let dec = l.algebra.decomposition()?;
            ctx.results.push(RunResult::Analysis(Analysis {
                summary: dec.summary(),
                collinearity: dec.is_collinear(),
                commutant_summary: dec.dual().summary(),
            }));
        }
        Command::Man { a, b, method } => {
            let (la, lb) = (ctx.load(a)?, ctx.load(b)?);
            let label = Context::label(&[&la, &lb]);
            let (x, y) = (&la.algebra, &lb.algebra);
            match method {
                ManMethod::Omega => ctx.man(&label, man::man_omega(x, y, base)?),
                ManMethod::Projection => ctx.man(&label, man::man_projection(x, y, base)?),
                ManMethod::Collinear => ctx.man(&label, man::man_collinear(x, y, base)?),
                ManMethod::Entropy => {
                    let (report, blocks) = man::entropy_decomposition_man(x, y, base)?;
                    ctx.rows.push(CsvRow::from_man(&label, &report));
                    ctx.results.push(RunResult::Entropy { report, blocks });
                }
                ManMethod::Mc => {
                    let r = protocol::mc_man_direct(x, y, ctx.samples(), seed)?;
                    ctx.estimate(&label, r);
                }
            }
        }
        Command::Selfman { spec } => {
            let l = ctx.load(spec)?;
            let r = man::self_man(&l.algebra, base)?;
            ctx.man(&l.source.clone(), r);
        }
        Command::Bounds { a, b } => {
            let (la, lb) = (ctx.load(a)?, ctx.load(b)?);
            let bounds = man::man_bounds(&la.algebra, &lb.algebra, base)?;
            let r = man::man_projection(&la.algebra, &lb.algebra, base)?;
            let respected = if bounds.respected_by(r.s) { 1.0 } else { 0.0 };
            let r = r
                .with_check("bounds-respected", respected)
                .with_bounds(bounds.clone());
            ctx.bounds = Some(bounds);
            ctx.man(&Context::label(&[&la, &lb]), r);
        }
        Command::OrbitAvg { a, b, mc } => {
            let (la, lb) = (ctx.load(a)?, ctx.load(b)?);
            let label = Context::label(&[&la, &lb]);
            ctx.man(
                &label,
                man::orbit_averaged_report(&la.algebra, &lb.algebra, base)?,
            );
            if *mc {
                let r =
                    protocol::mc_orbit_averaged_man(&la.algebra, &lb.algebra, ctx.samples(), seed)?;
                ctx.estimate(&label, r);
            }
        }
        Command::Lattice {
            sites,
            s1,
            s2,
            explicit,
        } => {
            let zb = |r: &[usize]| -> Result<Vec<usize>, CliError> {
                r.iter()
                    .map(|&i| {
                        if i == 0 || i > sites.len() {
                            Err(CliError::Usage(format!(
                                "site {i} outside 1..={}",
                                sites.len()
                            )))
                        } else {
                            Ok(i - 1)
                        }
                    })
                    .collect()
            };
            let (r1, r2) = (zb(s1)?, zb(s2)?);
            let label = format!("sites={sites:?} s1={s1:?} s2={s2:?}");
            ctx.man(&label, man::lattice_man(sites, &r1, &r2, base)?);
            if *explicit {
                let total: usize = sites.iter().product();
                if total > MAX_DIM && !ctx.opts.allow_large {
                    return Err(CliError::Usage(format!(
                        "lattice dimension {total} exceeds the cap {MAX_DIM}; pass --allow-large"
                    )));
                }
                let a1 = OperatorAlgebra::lattice(sites, &r1)?;
                let a2 = OperatorAlgebra::lattice(sites, &r2)?;
                ctx.man(&label, man::man_omega(&a1, &a2, base)?);
            }
        }
        Command::Masa { a, b } => {
            let (la, lb) = (ctx.load(a)?, ctx.load(b)?);
            let (ba, bb) = masa_pair(&la, &lb)?;
            let r = man::masa_man(&ba, &bb, base)?.with_summaries(&[&la.algebra, &lb.algebra])?;
            ctx.man(&Context::label(&[&la, &lb]), r);
        }
        Command::Quantumness { a, b } => {
            let (la, lb) = (ctx.load(a)?, ctx.load(b)?);
            let (ba, bb) = masa_pair(&la, &lb)?;
            ctx.results
                .push(RunResult::Quantumness(man::quantumness(&ba, &bb)?));
        }
        Command::Aotoc { spec, unitary } => {
            let l = ctx.load(spec)?;
            let u = parse_unitary(unitary)?;
            let r = man::a_otoc(&l.algebra, &u, base)?;
            ctx.man(&format!("{} U={}", l.source, unitary.display()), r);
        }
        Command::Protocol { kind, a, b, exact } => {
            let la = ctx.load(a)?;
            let lb = match b {
                Some(p) => Some(ctx.load(p)?),
                None => None,
            };
            let label = match &lb {
                Some(lb) => Context::label(&[&la, lb]),
                None => la.source.clone(),
            };
            let x = &la.algebra;
            let shots = ctx.opts.shots;
            let samples = ctx.samples();
            let r = match (kind, &lb, exact) {
                (ProtocolKind::Choi, Some(lb), false) => {
                    protocol::protocol_choi(x, &lb.algebra, shots, seed)?
                }
                (ProtocolKind::Choi, None, false) => protocol::protocol_choi_self(x, shots, seed)?,
                (ProtocolKind::Choi, Some(lb), true) => {
                    protocol::protocol_choi(x, &lb.algebra, None, seed)?
                }
                (ProtocolKind::Choi, None, true) => protocol::protocol_choi_self(x, None, seed)?,
                (ProtocolKind::Stochastic, Some(lb), false) => {
                    protocol::protocol_stochastic(x, &lb.algebra, samples, shots, seed)?
                }
                (ProtocolKind::Stochastic, None, false) => {
                    protocol::protocol_stochastic_self(x, samples, shots, seed)?
                }
                (ProtocolKind::Stochastic, Some(lb), true) => {
                    protocol::protocol_stochastic_exact(x, &lb.algebra)?
                }
                (ProtocolKind::Stochastic, None, true) => {
                    protocol::protocol_stochastic_self_exact(x)?
                }
            };
            ctx.estimate(&label, r);
        }
        Command::MarkovCheck {
            a,
            b,
            state_samples,
        } => ctx.markov(a, b, *state_samples)?,
        Command::Sweep { grid } => match grid {
            Sweep::Lattice { site_dim, sites } => {
                let dims = vec![*site_dim; *sites];
                for k in 0..=*sites {
                    let region: Vec<usize> = (0..k).collect();
                    let label = format!("site_dim={site_dim} sites={sites} overlap={k}");
                    ctx.man(&label, man::lattice_man(&dims, &region, &region, base)?);
                }
            }
            Sweep::Selfman { specs, max_irrep } => {
                for path in specs {
                    let l = ctx.load(path)?;
                    let r = man::self_man(&l.algebra, base)?;
                    ctx.man(&l.source.clone(), r);
                }
                for dj in 1..=*max_irrep {
                    let a = OperatorAlgebra::structural(&[(1, dj)], None)?;
                    ctx.man(&format!("structural [[1,{dj}]]"), man::self_man(&a, base)?);
                }
            }
            Sweep::Markov {
                a,
                b,
                state_samples,
            } => ctx.markov(a, b, *state_samples)?,
        },
    }
    Ok(())
}

fn masa_pair(
    a: &Loaded,
    b: &Loaded,
) -> Result<(Vec<crate::linalg::CVector>, Vec<crate::linalg::CVector>), CliError> {
    let basis = |l: &Loaded| {
        l.spec
            .masa_basis()
            .ok_or_else(|| CliError::Usage(format!("{}: expected a spec of kind masa", l.source)))
    };
    Ok((basis(a)?, basis(b)?))
}

/// Parses `argv` (program name first), runs the command and returns the report.
pub fn run_report(argv: &[String]) -> Result<RunReport, CliError> {
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    execute_cli(&cli, argv)
}

fn execute_cli(cli: &Cli, argv: &[String]) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut ctx = Context {
        opts: &cli.global,
        inputs: Vec::new(),
        results: Vec::new(),
        bounds: None,
        rows: Vec::new(),
    };
    execute(&cli.command, &mut ctx)?;
    if let Some(path) = &cli.global.csv {
        emit_csv(&ctx.rows, path)?;
    }
    let mut report = RunReport {
        command: argv.iter().skip(1).cloned().collect(),
        inputs: ctx.inputs,
        results: ctx.results,
        bounds: ctx.bounds,
        wall_time_s: start.elapsed().as_secs_f64(),
        seed: cli.global.seed,
    };
    if cli.global.quiet {
        report.strip_summaries();
    }
    Ok(report)
}

/// Entry point of the binary: prints the report as JSON and returns the exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute_cli(&cli, argv) {
        Ok(report) => {
            println!("{}", report.to_json());
            0
        }
        Err(e) => {
            eprintln!("manlab: {e}");
            1
        }
    }
}
