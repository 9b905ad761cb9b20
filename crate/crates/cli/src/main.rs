//! Command-line front end: scenario ingestion, optimization, evaluation,
//! sweeps, near-field reports and the brute-force oracle, with CSV/JSON
//! artifacts and a reproducibility manifest per run.

// `!(x > 0)` rejects NaN overrides along with non-positive ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stripeplan::channel::channel_gain;
use stripeplan::deploy::{optimize_line, optimize_polygon, OptimizerSettings};
use stripeplan::eval::{
    grid_search_oracle, monte_carlo, near_field_report, sweep_frequency, sweep_length,
    AllocationPolicy, ArrayKind, DeployKind, EvalOptions, EvalTarget, MonteCarloSpec,
    NearFieldAxis, OracleShape, SweepContext,
};
use stripeplan::precoding::maxmin_power_allocation;
use stripeplan::scene::{
    elements_from_length, place_center_fd_array, place_center_square_stripe, Deployment,
};
use stripeplan::{Scenario64, SPEED_OF_LIGHT};

use crate::config::parse_scenario;
use crate::output::{
    dbm, eval_summary_csv, eval_trials_csv, json_pretty, nearfield_csv, read_deployment, sweep_csv,
    trace_csv, write_artifact, DeploymentDoc,
};

/// Failure classes mapped to exit codes 2, 3 and 4.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Optimizer(String),
    Eval(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "config error: {m}"),
            AppError::Optimizer(m) => write!(f, "optimizer failure: {m}"),
            AppError::Eval(m) => write!(f, "evaluation failure: {m}"),
        }
    }
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Optimizer(_) => 3,
            AppError::Eval(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "stripeplan",
    version,
    about = "Plan and evaluate ceiling radio-stripe deployments for indoor wireless power transfer"
)]
struct Cli {
    /// Scenario TOML file.
    #[arg(long, global = true, default_value = "scenarios/default.toml")]
    scenario: PathBuf,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Monte Carlo base seed.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Monte Carlo trials.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,

    /// Trust-region parameter (> 1).
    #[arg(long, global = true, default_value_t = 1.1)]
    omega: f64,

    /// Successive-GP convergence threshold.
    #[arg(long, global = true, default_value_t = 1e-6)]
    epsilon: f64,

    /// Successive-GP iteration cap.
    #[arg(long, global = true, default_value_t = 100)]
    imax: usize,

    /// Number of line angles searched.
    #[arg(long, global = true, default_value_t = 10)]
    zeta: usize,

    /// Speed of light override, m/s (affects "auto" spacing and wavelengths).
    #[arg(long, global = true, default_value_t = SPEED_OF_LIGHT)]
    c_light: f64,

    /// Weight the line-angle selection by hotspot density.
    #[arg(long, global = true, default_value_t = false)]
    weighted_selection: bool,

    /// Power allocation policy at evaluation time.
    #[arg(long, global = true, value_enum, default_value_t = AllocPolicyArg::PerTrial)]
    alloc: AllocPolicyArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AllocPolicyArg {
    PerTrial,
    DeploymentTime,
}

impl From<AllocPolicyArg> for AllocationPolicy {
    fn from(v: AllocPolicyArg) -> Self {
        match v {
            AllocPolicyArg::PerTrial => AllocationPolicy::PerTrial,
            AllocPolicyArg::DeploymentTime => AllocationPolicy::DeploymentTime,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShapeArg {
    Polygon,
    Line,
    CenterSquare,
    CenterFd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleShapeArg {
    Polygon,
    Line,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NearFieldKindArg {
    Line,
    SquareFd,
}

#[derive(Debug, Args)]
struct SizeArgs {
    /// Element count (exactly one of --n / --length).
    #[arg(long, conflicts_with = "length")]
    n: Option<usize>,

    /// Stripe length in meters; the element count follows from the spacing.
    #[arg(long)]
    length: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize (or construct) one deployment and write it as JSON.
    Optimize {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        #[command(flatten)]
        size: SizeArgs,
        /// Also dump the first GP approximation in text form.
        #[arg(long, default_value_t = false)]
        dump_gp: bool,
    },
    /// Monte Carlo evaluation of deployment JSON files.
    Evaluate {
        /// Deployment files written by `optimize` (repeatable).
        #[arg(long, required = true, num_args = 1..)]
        deployment: Vec<PathBuf>,
    },
    /// Re-optimize and evaluate across stripe lengths.
    SweepLength {
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "polygon,line,center-square,center-fd"
        )]
        kinds: Vec<String>,
    },
    /// Re-optimize and evaluate across frequencies at a fixed length.
    SweepFrequency {
        #[arg(long, value_delimiter = ',', required = true)]
        freqs: Vec<f64>,
        #[arg(long)]
        length: f64,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "polygon,line,center-square,center-fd"
        )]
        kinds: Vec<String>,
    },
    /// Fresnel/Fraunhofer boundary table across lengths or frequencies.
    Nearfield {
        #[arg(long, value_delimiter = ',', conflicts_with = "freqs")]
        lengths: Option<Vec<f64>>,
        #[arg(long, conflicts_with = "freqs")]
        freq: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        freqs: Option<Vec<f64>>,
        #[arg(long, conflicts_with = "lengths")]
        length: Option<f64>,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "line,square-fd"
        )]
        kinds: Vec<NearFieldKindArg>,
    },
    /// Brute-force grid search over centers (and line angles).
    Oracle {
        #[arg(long, value_enum)]
        shape: OracleShapeArg,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long, default_value_t = 0.1)]
        grid_step: f64,
    },
}

/// Everything a run needs beyond its subcommand arguments.
struct Context {
    scenario: Scenario64,
    scenario_path: PathBuf,
    out: PathBuf,
    lambda: f64,
    optimizer: OptimizerSettings<f64>,
    mc: MonteCarloSpec<f64>,
    policy: AllocationPolicy,
    c_light: f64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a, T: Serialize> {
    command: &'a str,
    scenario: String,
    seed: u64,
    trials: usize,
    omega: f64,
    epsilon: f64,
    imax: usize,
    zeta: usize,
    c_light: f64,
    weighted_selection: bool,
    alloc: &'a str,
    version: &'a str,
    args: T,
}

impl Context {
    fn manifest<T: Serialize>(&self, command: &str, args: T) -> String {
        json_pretty(&Manifest {
            command,
            scenario: self.scenario_path.display().to_string(),
            seed: self.mc.base_seed,
            trials: self.mc.trials,
            omega: self.optimizer.omega,
            epsilon: self.optimizer.epsilon,
            imax: self.optimizer.max_iters,
            zeta: self.optimizer.zeta,
            c_light: self.c_light,
            weighted_selection: self.optimizer.weighted_selection,
            alloc: self.policy.as_str(),
            version: env!("CARGO_PKG_VERSION"),
            args,
        })
    }

    fn resolve_n(&self, size: &SizeArgs) -> Result<usize, AppError> {
        match (size.n, size.length) {
            (Some(n), None) => Ok(n),
            (None, Some(l)) => elements_from_length(l, self.scenario.spacing)
                .map_err(|e| AppError::Config(e.to_string())),
            _ => Err(AppError::Config(
                "exactly one of --n or --length is required".into(),
            )),
        }
    }

    /// Closed-form allocation on hotspot centers; powers and objective for
    /// deployments that were constructed rather than optimized.
    fn center_allocation(&self, deployment: &Deployment<f64>) -> Result<(Vec<f64>, f64), AppError> {
        let gains = self
            .scenario
            .hotspots
            .iter()
            .map(|h| {
                channel_gain(
                    deployment,
                    &h.position,
                    self.scenario.boresight_gain,
                    self.lambda,
                    self.scenario.ceiling_height,
                )
            })
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| AppError::Eval(e.to_string()))?;
        let densities: Vec<f64> = self.scenario.hotspots.iter().map(|h| h.density).collect();
        let alloc = maxmin_power_allocation(&gains, &densities, self.scenario.power_budget)
            .map_err(|e| AppError::Eval(e.to_string()))?;
        Ok((alloc.powers, alloc.t))
    }

    fn write(
        &self,
        name: &str,
        content: &str,
        code: fn(String) -> AppError,
    ) -> Result<(), AppError> {
        write_artifact(&self.out, name, content)
            .map(|_| ())
            .map_err(|e| code(format!("writing {name}: {e}")))
    }
}

fn parse_kinds(kinds: &[String]) -> Result<Vec<DeployKind>, AppError> {
    kinds
        .iter()
        .map(|k| {
            k.parse()
                .map_err(|e: stripeplan::Error| AppError::Config(e.to_string()))
        })
        .collect()
}

fn shape_tag(shape: ShapeArg) -> &'static str {
    match shape {
        ShapeArg::Polygon => "polygon",
        ShapeArg::Line => "line",
        ShapeArg::CenterSquare => "center_square",
        ShapeArg::CenterFd => "center_fd",
    }
}

fn run_optimize(
    ctx: &Context,
    shape: ShapeArg,
    size: &SizeArgs,
    dump_gp: bool,
) -> Result<(), AppError> {
    let n = ctx.resolve_n(size)?;
    let kappa = ctx.scenario.spacing;
    let tag = shape_tag(shape);
    let opt_err = |e: stripeplan::Error| AppError::Optimizer(e.to_string());

    let (doc, trace) = match shape {
        ShapeArg::Polygon | ShapeArg::Line => {
            let solution = match shape {
                ShapeArg::Polygon => {
                    optimize_polygon(&ctx.scenario, n, kappa, ctx.lambda, &ctx.optimizer)
                }
                _ => optimize_line(&ctx.scenario, n, kappa, ctx.lambda, &ctx.optimizer),
            }
            .map_err(opt_err)?;
            if dump_gp {
                let angle = solution.angle;
                let point = stripeplan::deploy::initial_point(&ctx.scenario, n, kappa, angle)
                    .map_err(opt_err)?;
                let problem = match shape {
                    ShapeArg::Polygon => {
                        stripeplan::deploy::build_polygon_gp(&ctx.scenario, n, kappa, &point)
                    }
                    _ => stripeplan::deploy::build_line_gp(
                        &ctx.scenario,
                        n,
                        kappa,
                        angle.unwrap_or(std::f64::consts::PI),
                        &point,
                    ),
                }
                .map_err(opt_err)?;
                ctx.write(
                    &format!("gp_initial_{tag}.txt"),
                    &problem.dump(),
                    AppError::Optimizer,
                )?;
            }
            if solution.out_of_room {
                return Err(AppError::Optimizer(
                    "optimized deployment extends outside the room footprint".into(),
                ));
            }
            let doc = DeploymentDoc {
                shape_tag: solution.deployment.shape.as_str().to_string(),
                n: solution.deployment.len(),
                kappa,
                elements: solution.deployment.elements.clone(),
                powers: solution.powers.clone(),
                objective_watts: solution.objective_watts,
            };
            (doc, Some(trace_csv(&solution)))
        }
        ShapeArg::CenterSquare | ShapeArg::CenterFd => {
            let deployment = match shape {
                ShapeArg::CenterSquare => place_center_square_stripe(&ctx.scenario, n, kappa),
                _ => place_center_fd_array(&ctx.scenario, n, ctx.lambda / 2.0),
            }
            .map_err(opt_err)?;
            let (powers, objective) = ctx.center_allocation(&deployment)?;
            let doc = DeploymentDoc {
                shape_tag: deployment.shape.as_str().to_string(),
                n: deployment.len(),
                kappa,
                elements: deployment.elements,
                powers,
                objective_watts: objective,
            };
            (doc, None)
        }
    };

    ctx.write(
        &format!("deployment_{tag}.json"),
        &json_pretty(&doc),
        AppError::Optimizer,
    )?;
    if let Some(trace) = trace {
        ctx.write(&format!("trace_{tag}.csv"), &trace, AppError::Optimizer)?;
    }
    #[derive(Serialize)]
    struct OptimizeArgs<'a> {
        shape: &'a str,
        n: usize,
        kappa: f64,
        objective_watts: f64,
        objective_dbm: f64,
    }
    let manifest = ctx.manifest(
        "optimize",
        OptimizeArgs {
            shape: tag,
            n: doc.n,
            kappa,
            objective_watts: doc.objective_watts,
            objective_dbm: dbm(doc.objective_watts),
        },
    );
    ctx.write(
        &format!("manifest_optimize_{tag}.json"),
        &manifest,
        AppError::Optimizer,
    )?;
    println!(
        "optimize {tag}: N={} objective {:.6e} W ({:.2} dBm) -> {}",
        doc.n,
        doc.objective_watts,
        dbm(doc.objective_watts),
        ctx.out.join(format!("deployment_{tag}.json")).display()
    );
    Ok(())
}

fn run_evaluate(ctx: &Context, files: &[PathBuf]) -> Result<(), AppError> {
    let mut targets = Vec::new();
    for path in files {
        let doc = read_deployment(path)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| doc.shape_tag.clone());
        targets.push(EvalTarget {
            tag: stem,
            deployment: doc.to_deployment()?,
        });
    }
    let options = EvalOptions {
        policy: ctx.policy,
        weighted: false,
        lambda: ctx.lambda,
    };
    let results = monte_carlo(&targets, &ctx.scenario, &ctx.mc, &options)
        .map_err(|e| AppError::Eval(e.to_string()))?;
    ctx.write(
        "eval_summary.csv",
        &eval_summary_csv(&results),
        AppError::Eval,
    )?;
    ctx.write(
        "eval_trials.csv",
        &eval_trials_csv(&results),
        AppError::Eval,
    )?;
    #[derive(Serialize)]
    struct EvaluateArgs {
        deployments: Vec<String>,
    }
    let manifest = ctx.manifest(
        "evaluate",
        EvaluateArgs {
            deployments: files.iter().map(|p| p.display().to_string()).collect(),
        },
    );
    ctx.write("manifest_evaluate.json", &manifest, AppError::Eval)?;
    for r in &results {
        println!(
            "evaluate {}: avg min power {:.6e} W ({:.2} dBm) over {} trials",
            r.tag,
            r.average_min_power,
            dbm(r.average_min_power),
            r.per_trial.len()
        );
    }
    Ok(())
}

fn sweep_context(ctx: &Context, kinds: Vec<DeployKind>) -> SweepContext<f64> {
    SweepContext {
        mc: ctx.mc.clone(),
        optimizer: ctx.optimizer.clone(),
        policy: ctx.policy,
        weighted: false,
        c_light: ctx.c_light,
        kinds,
    }
}

fn run_sweep_length(ctx: &Context, lengths: &[f64], kinds: &[String]) -> Result<(), AppError> {
    let sctx = sweep_context(ctx, parse_kinds(kinds)?);
    let rows =
        sweep_length(&ctx.scenario, lengths, &sctx).map_err(|e| AppError::Eval(e.to_string()))?;
    ctx.write("sweep_length.csv", &sweep_csv(&rows), AppError::Eval)?;
    #[derive(Serialize)]
    struct SweepArgs<'a> {
        lengths: &'a [f64],
        kinds: &'a [String],
    }
    let manifest = ctx.manifest("sweep-length", SweepArgs { lengths, kinds });
    ctx.write("manifest_sweep_length.json", &manifest, AppError::Eval)?;
    println!(
        "sweep-length: {} rows -> {}",
        rows.len(),
        ctx.out.join("sweep_length.csv").display()
    );
    Ok(())
}

fn run_sweep_frequency(
    ctx: &Context,
    freqs: &[f64],
    length: f64,
    kinds: &[String],
) -> Result<(), AppError> {
    let sctx = sweep_context(ctx, parse_kinds(kinds)?);
    let rows = sweep_frequency(&ctx.scenario, freqs, length, &sctx)
        .map_err(|e| AppError::Eval(e.to_string()))?;
    ctx.write("sweep_frequency.csv", &sweep_csv(&rows), AppError::Eval)?;
    #[derive(Serialize)]
    struct SweepArgs<'a> {
        freqs: &'a [f64],
        length: f64,
        kinds: &'a [String],
    }
    let manifest = ctx.manifest(
        "sweep-frequency",
        SweepArgs {
            freqs,
            length,
            kinds,
        },
    );
    ctx.write("manifest_sweep_frequency.json", &manifest, AppError::Eval)?;
    println!(
        "sweep-frequency: {} rows -> {}",
        rows.len(),
        ctx.out.join("sweep_frequency.csv").display()
    );
    Ok(())
}

fn run_nearfield(
    ctx: &Context,
    lengths: Option<Vec<f64>>,
    freq: Option<f64>,
    freqs: Option<Vec<f64>>,
    length: Option<f64>,
    kinds: &[NearFieldKindArg],
) -> Result<(), AppError> {
    let kinds: Vec<ArrayKind> = kinds
        .iter()
        .map(|k| match k {
            NearFieldKindArg::Line => ArrayKind::Line,
            NearFieldKindArg::SquareFd => ArrayKind::SquareFd,
        })
        .collect();
    let (axis, values) = match (lengths, freqs) {
        (Some(lengths), None) => {
            let frequency = freq.unwrap_or(ctx.scenario.frequency);
            (NearFieldAxis::Lengths { frequency }, lengths)
        }
        (None, Some(freqs)) => {
            let length = length.ok_or_else(|| {
                AppError::Config("--freqs needs --length for the stripe size".into())
            })?;
            (NearFieldAxis::Frequencies { length }, freqs)
        }
        _ => {
            return Err(AppError::Config(
                "provide either --lengths [--freq] or --freqs --length".into(),
            ))
        }
    };
    let rows = near_field_report(axis, &values, &kinds, ctx.c_light)
        .map_err(|e| AppError::Eval(e.to_string()))?;
    ctx.write("nearfield.csv", &nearfield_csv(&rows), AppError::Eval)?;
    #[derive(Serialize)]
    struct NearfieldArgs {
        values: Vec<f64>,
        axis: String,
        kinds: Vec<String>,
    }
    let manifest = ctx.manifest(
        "nearfield",
        NearfieldArgs {
            values,
            axis: match axis {
                NearFieldAxis::Lengths { frequency } => format!("lengths@{frequency}Hz"),
                NearFieldAxis::Frequencies { length } => format!("freqs@{length}m"),
            },
            kinds: kinds.iter().map(|k| k.tag().to_string()).collect(),
        },
    );
    ctx.write("manifest_nearfield.json", &manifest, AppError::Eval)?;
    println!(
        "nearfield: {} rows -> {}",
        rows.len(),
        ctx.out.join("nearfield.csv").display()
    );
    Ok(())
}

fn run_oracle(
    ctx: &Context,
    shape: OracleShapeArg,
    size: &SizeArgs,
    grid_step: f64,
) -> Result<(), AppError> {
    let n = ctx.resolve_n(size)?;
    let kappa = ctx.scenario.spacing;
    let (tag, oracle_shape) = match shape {
        OracleShapeArg::Polygon => ("polygon", OracleShape::Polygon),
        OracleShapeArg::Line => (
            "line",
            OracleShape::Line {
                angles: ctx.optimizer.zeta * 4,
            },
        ),
    };
    let result = grid_search_oracle(&ctx.scenario, n, kappa, ctx.lambda, oracle_shape, grid_step)
        .map_err(|e| AppError::Optimizer(e.to_string()))?;
    #[derive(Serialize)]
    struct OracleDoc<'a> {
        shape: &'a str,
        n: usize,
        kappa: f64,
        grid_step: f64,
        center: [f64; 2],
        angle: Option<f64>,
        objective_watts: f64,
        objective_dbm: f64,
        evaluated: usize,
    }
    let doc = OracleDoc {
        shape: tag,
        n,
        kappa,
        grid_step,
        center: result.center,
        angle: result.angle,
        objective_watts: result.objective_watts,
        objective_dbm: dbm(result.objective_watts),
        evaluated: result.evaluated,
    };
    ctx.write(
        &format!("oracle_{tag}.json"),
        &json_pretty(&doc),
        AppError::Optimizer,
    )?;
    let manifest = ctx.manifest("oracle", &doc);
    ctx.write(
        &format!("manifest_oracle_{tag}.json"),
        &manifest,
        AppError::Optimizer,
    )?;
    println!(
        "oracle {tag}: best {:.6e} W at ({:.3}, {:.3}) after {} placements",
        doc.objective_watts, doc.center[0], doc.center[1], doc.evaluated
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), AppError> {
    if !(cli.omega > 1.0) {
        return Err(AppError::Config("--omega must exceed 1".into()));
    }
    if !(cli.epsilon > 0.0) {
        return Err(AppError::Config("--epsilon must be positive".into()));
    }
    if cli.imax == 0 || cli.zeta == 0 || cli.trials == 0 {
        return Err(AppError::Config(
            "--imax, --zeta and --trials must be at least 1".into(),
        ));
    }
    if !(cli.c_light > 0.0) {
        return Err(AppError::Config("--c-light must be positive".into()));
    }

    let scenario = parse_scenario(&cli.scenario, cli.c_light)?;
    let lambda = cli.c_light / scenario.frequency;
    let ctx = Context {
        lambda,
        optimizer: OptimizerSettings {
            omega: cli.omega,
            epsilon: cli.epsilon,
            max_iters: cli.imax,
            zeta: cli.zeta,
            initial_center: None,
            weighted_selection: cli.weighted_selection,
            solver: Default::default(),
        },
        mc: MonteCarloSpec {
            trials: cli.trials,
            user_radius_override: None,
            base_seed: cli.seed,
            users_per_hotspot: 1,
        },
        policy: cli.alloc.into(),
        scenario,
        scenario_path: cli.scenario,
        out: cli.out,
        c_light: cli.c_light,
    };

    match &cli.command {
        Command::Optimize {
            shape,
            size,
            dump_gp,
        } => run_optimize(&ctx, *shape, size, *dump_gp),
        Command::Evaluate { deployment } => run_evaluate(&ctx, deployment),
        Command::SweepLength { lengths, kinds } => run_sweep_length(&ctx, lengths, kinds),
        Command::SweepFrequency {
            freqs,
            length,
            kinds,
        } => run_sweep_frequency(&ctx, freqs, *length, kinds),
        Command::Nearfield {
            lengths,
            freq,
            freqs,
            length,
            kinds,
        } => run_nearfield(&ctx, lengths.clone(), *freq, freqs.clone(), *length, kinds),
        Command::Oracle {
            shape,
            size,
            grid_step,
        } => run_oracle(&ctx, *shape, size, *grid_step),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
