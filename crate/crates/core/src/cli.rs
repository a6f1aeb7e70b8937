//! Command-line surface: scenario-driven channel synthesis, beamforming,
//! budgets, sweeps, heatmaps, and the Monte Carlo reciprocity report.
//!
//! Exit codes: 0 on success, 2 on validation errors (bad flags, scenario or
//! file schema violations), 1 on runtime errors (I/O).

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;

use crate::analysis::{
    beam_sweep, device_direction, heatmap, reciprocity_report, xy_grid, SweepBeamformer,
    SweepGrid,
};
use crate::beamform::{
    mrt_weights, path_gain, pw_weights, smc_composite_weights, sw_los_weights, PwVariant,
};
use crate::channel::ChannelVector;
use crate::io;
use crate::optimize::{
    optimize_phases_observed, optimize_reflcoeffs_observed, per_smc_budget, phase_objective,
    GammaGrid, GammaSearch, PhaseSearch,
};
use crate::scenario::{load_scenario, Scenario};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "wptbeam",
    version,
    about = "Geometry-based XL-MIMO beamforming for wireless power transfer"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize the channel vector towards a device and export it.
    Synth(SynthArgs),
    /// Compute beamforming weights and report the achieved path gain.
    Beamform(BeamformArgs),
    /// Per-component power budgets of the specular beams.
    Budget(BudgetArgs),
    /// Exhaustive beam sweep over angles or focus positions.
    Sweep(SweepArgs),
    /// Path-gain field of fixed weights over a receiver grid.
    Heatmap(HeatmapArgs),
    /// Monte Carlo vs analytic efficiency of reciprocity beamforming.
    McReciprocity(McArgs),
    /// Search the composite-beam phases.
    OptimizePhases(OptimizePhasesArgs),
    /// Search the per-wall reflection coefficients.
    OptimizeGammas(OptimizeGammasArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Scenario configuration file (JSON).
    #[arg(long, value_name = "FILE")]
    scenario: std::path::PathBuf,
    /// 1-based device index into the scenario's device list.
    #[arg(long, default_value_t = 1, value_name = "K")]
    device: usize,
    /// Measured channel CSV; overrides synthesis as the evaluation channel.
    #[arg(long, value_name = "FILE")]
    channel: Option<std::path::PathBuf>,
    /// RNG seed for every stochastic step of the subcommand.
    #[arg(long, default_value_t = 0, value_name = "N")]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BfKind {
    Mrt,
    Pw,
    #[value(name = "sw-los")]
    SwLos,
    #[value(name = "sw-smc")]
    SwSmc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OptimizeKind {
    None,
    Phases,
    PhasesGammas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SearchKind {
    Grid,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GammaSearchKind {
    Coordinate,
    Joint,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output channel CSV.
    #[arg(long, value_name = "FILE")]
    out: std::path::PathBuf,
}

#[derive(Debug, Args)]
struct BeamformArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Beamforming strategy.
    #[arg(long, value_enum)]
    bf: BfKind,
    /// Output weights CSV.
    #[arg(long, value_name = "FILE")]
    out: std::path::PathBuf,
    /// Optional summary CSV (one row: pg, pg_db).
    #[arg(long, value_name = "FILE")]
    summary: Option<std::path::PathBuf>,
    /// Planar-wavefront elevation (deg); defaults to the device direction.
    #[arg(long, value_name = "DEG")]
    theta_deg: Option<f64>,
    /// Planar-wavefront azimuth (deg); defaults to the device direction.
    #[arg(long, value_name = "DEG")]
    phi_deg: Option<f64>,
    /// Parameter search applied to the sw-smc composite beams.
    #[arg(long, value_enum, default_value_t = OptimizeKind::None)]
    optimize: OptimizeKind,
    /// Fixed beam phases in degrees (comma separated, one per component)
    /// when no optimization runs.
    #[arg(long, value_name = "DEGS", allow_hyphen_values = true)]
    phases_deg: Option<String>,
    /// Search strategy for the beam phases.
    #[arg(long, value_enum, default_value_t = SearchKind::Grid)]
    search: SearchKind,
    /// Phase grid step in degrees.
    #[arg(long, default_value_t = 5.0, value_name = "DEG")]
    grid_step: f64,
    /// Random-search budget.
    #[arg(long, default_value_t = 10_000, value_name = "N")]
    budget: usize,
    /// Points of the reflection-coefficient grid on [0, 1].
    #[arg(long, default_value_t = 41, value_name = "N")]
    gamma_points: usize,
    /// Reflection-coefficient search strategy.
    #[arg(long, value_enum, default_value_t = GammaSearchKind::Coordinate)]
    gamma_search: GammaSearchKind,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output budget CSV.
    #[arg(long, value_name = "FILE")]
    out: std::path::PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Beamformer to sweep (pw, sw-los, or sw-smc).
    #[arg(long, value_enum)]
    bf: BfKind,
    /// Output sweep CSV.
    #[arg(long, value_name = "FILE")]
    out: std::path::PathBuf,
    /// Elevation range `start:step:stop` in degrees (pw sweeps).
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    theta_deg: Option<String>,
    /// Azimuth range `start:step:stop` in degrees (pw sweeps).
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    phi_deg: Option<String>,
    /// X range `start:step:stop` in meters (spherical sweeps).
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    x: Option<String>,
    /// Y range `start:step:stop` in meters (spherical sweeps).
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    y: Option<String>,
    /// Z range `start:step:stop` in meters (spherical sweeps).
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    z: Option<String>,
}

#[derive(Debug, Args)]
struct HeatmapArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Beamformer producing the fixed weights.
    #[arg(long, value_enum, conflicts_with = "weights")]
    bf: Option<BfKind>,
    /// Fixed weights CSV (alternative to --bf).
    #[arg(long, value_name = "FILE")]
    weights: Option<std::path::PathBuf>,
    /// Output heatmap CSV.
    #[arg(long, value_name = "FILE")]
    out: std::path::PathBuf,
    /// Grid columns (x direction).
    #[arg(long, default_value_t = 8, value_name = "N")]
    nx: usize,
    /// Grid rows (y direction).
    #[arg(long, default_value_t = 8, value_name = "N")]
    ny: usize,
    /// Grid spacing in wavelengths.
    #[arg(long, default_value_t = 0.375, value_name = "WL")]
    spacing_wavelengths: f64,
}

#[derive(Debug, Args)]
struct McArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Channel-SNR grid `start:step:stop` in dB.
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    snr_db: String,
    /// Monte Carlo realizations per grid point.
    #[arg(long, default_value_t = 10_000, value_name = "M")]
    realizations: usize,
    /// Output report CSV.
    #[arg(long, value_name = "FILE")]
    out: std::path::PathBuf,
}

#[derive(Debug, Args)]
struct OptimizePhasesArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output CSV (summary row plus optional candidates).
    #[arg(long, value_name = "FILE")]
    out: std::path::PathBuf,
    /// Search strategy.
    #[arg(long, value_enum, default_value_t = SearchKind::Grid)]
    search: SearchKind,
    /// Grid step in degrees.
    #[arg(long, default_value_t = 5.0, value_name = "DEG")]
    grid_step: f64,
    /// Random-search budget.
    #[arg(long, default_value_t = 10_000, value_name = "N")]
    budget: usize,
    /// Also write one row per evaluated candidate.
    #[arg(long)]
    emit_candidates: bool,
}

#[derive(Debug, Args)]
struct OptimizeGammasArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output CSV (summary row plus optional candidates).
    #[arg(long, value_name = "FILE")]
    out: std::path::PathBuf,
    /// Beam phases in degrees applied before the search (comma separated).
    #[arg(long, value_name = "DEGS", allow_hyphen_values = true)]
    phases_deg: Option<String>,
    /// Points of the reflection-coefficient grid.
    #[arg(long, default_value_t = 41, value_name = "N")]
    gamma_points: usize,
    /// Search strategy.
    #[arg(long, value_enum, default_value_t = GammaSearchKind::Coordinate)]
    gamma_search: GammaSearchKind,
    /// Also write one row per evaluated candidate.
    #[arg(long)]
    emit_candidates: bool,
}

/// Entry point returning the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(args) => synth(args),
        Command::Beamform(args) => beamform(args),
        Command::Budget(args) => budget(args),
        Command::Sweep(args) => sweep(args),
        Command::Heatmap(args) => heatmap_cmd(args),
        Command::McReciprocity(args) => mc_reciprocity(args),
        Command::OptimizePhases(args) => optimize_phases_cmd(args),
        Command::OptimizeGammas(args) => optimize_gammas_cmd(args),
    }
}

/// Loads the scenario, printing parse warnings to stderr.
fn setup(common: &CommonArgs) -> Result<(Scenario, Vector3<f64>)> {
    let scenario = load_scenario(&common.scenario)?;
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
    let device_pos = scenario.device(common.device)?.position;
    Ok((scenario, device_pos))
}

/// The channel every beamformer is evaluated against: an imported
/// measurement when given, the synthesized model channel otherwise.
fn eval_channel(
    common: &CommonArgs,
    scenario: &Scenario,
    device_pos: &Vector3<f64>,
) -> Result<ChannelVector> {
    match &common.channel {
        Some(path) => {
            let h = io::read_channel_csv(path)?;
            if h.len() != scenario.rw.len() {
                return Err(Error::Dimension(format!(
                    "imported channel has {} entries, scenario array has {}",
                    h.len(),
                    scenario.rw.len()
                )));
            }
            if (h.wavelength - scenario.wavelength).abs() / scenario.wavelength > 1e-6 {
                eprintln!(
                    "warning: imported channel wavelength {} differs from scenario {}",
                    h.wavelength, scenario.wavelength
                );
            }
            Ok(h)
        }
        None => scenario.total_channel_at(device_pos, Some(common.seed)),
    }
}

/// Inclusive `start:step:stop` range.
fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "range '{text}' must be start:step:stop"
        )));
    }
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad number '{s}' in range '{text}'")))
    };
    let (start, step, stop) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "range '{text}': step must be positive"
        )));
    }
    if stop < start {
        return Err(Error::InvalidArgument(format!(
            "range '{text}': stop below start"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + step * i as f64).collect())
}

fn parse_phase_list(text: &str, expected: usize) -> Result<Vec<f64>> {
    let phases: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map(f64::to_radians)
                .map_err(|_| Error::InvalidArgument(format!("bad phase '{s}'")))
        })
        .collect::<Result<_>>()?;
    if phases.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "{} phases given, scenario has {} components",
            phases.len(),
            expected
        )));
    }
    Ok(phases)
}

fn synth(args: SynthArgs) -> Result<()> {
    let (scenario, device_pos) = setup(&args.common)?;
    let h = match &args.common.channel {
        Some(_) => eval_channel(&args.common, &scenario, &device_pos)?,
        None => scenario.total_channel_at(&device_pos, Some(args.common.seed))?,
    };
    io::write_channel_csv(&args.out, &h)?;
    println!(
        "synth: device {} L={} P_ch={} ({} dB)",
        args.common.device,
        h.len(),
        io::g17(crate::channel::channel_power(&h)),
        format_db(crate::channel::channel_power(&h)),
    );
    Ok(())
}

/// Model components that exist towards the device (nonzero channel), with
/// their 1-based indices and unit-reflection base channels.
struct SmcSet {
    indices: Vec<usize>,
    model: Vec<ChannelVector>,
    base: Vec<ChannelVector>,
}

fn live_smc_set(scenario: &Scenario, device_pos: &Vector3<f64>) -> Result<SmcSet> {
    let model_all = scenario.per_smc_channels_at(device_pos)?;
    let base_all = scenario.unit_gamma_channels_at(device_pos)?;
    let mut indices = Vec::new();
    let mut model = Vec::new();
    let mut base = Vec::new();
    for (i, (m, b)) in model_all.into_iter().zip(base_all).enumerate() {
        if m.norm() > 0.0 {
            indices.push(i + 1);
            model.push(m);
            base.push(b);
        }
    }
    if indices.is_empty() {
        return Err(Error::InvalidArgument(
            "no visible specular component towards the device".into(),
        ));
    }
    Ok(SmcSet {
        indices,
        model,
        base,
    })
}

fn beamform(args: BeamformArgs) -> Result<()> {
    let (scenario, device_pos) = setup(&args.common)?;
    let h_eval = eval_channel(&args.common, &scenario, &device_pos)?;
    let weights = match args.bf {
        BfKind::Mrt => mrt_weights(&h_eval)?,
        BfKind::Pw => {
            let (theta, phi) = match (args.theta_deg, args.phi_deg) {
                (Some(t), Some(p)) => (t.to_radians(), p.to_radians()),
                (None, None) => device_direction(&scenario, &device_pos)?,
                _ => {
                    return Err(Error::InvalidArgument(
                        "give both --theta-deg and --phi-deg or neither".into(),
                    ));
                }
            };
            pw_weights(&scenario.rw, theta, phi, PwVariant::Centered, scenario.wavelength)?
        }
        BfKind::SwLos => sw_los_weights(&scenario.rw, &device_pos, scenario.wavelength)?,
        BfKind::SwSmc => {
            let set = live_smc_set(&scenario, &device_pos)?;
            let k = set.model.len();
            let mut phases = match &args.phases_deg {
                Some(text) => parse_phase_list(text, k)?,
                None => vec![0.0; k],
            };
            let mut gammas: Option<Vec<f64>> = None;
            if args.optimize != OptimizeKind::None {
                let objective = phase_objective(&h_eval, &set.model)?;
                let method = match args.search {
                    SearchKind::Grid => PhaseSearch::Grid {
                        step_rad: args.grid_step.to_radians(),
                    },
                    SearchKind::Random => PhaseSearch::Random {
                        budget: args.budget,
                        seed: args.common.seed,
                    },
                };
                let (best, _) = optimize_phases_observed(objective, k, method, |_, _| {})?;
                phases = best;
            }
            if args.optimize == OptimizeKind::PhasesGammas {
                let grid = GammaGrid {
                    min: 0.0,
                    max: 1.0,
                    points: args.gamma_points,
                };
                let method = match args.gamma_search {
                    GammaSearchKind::Coordinate => GammaSearch::CoordinateWise,
                    GammaSearchKind::Joint => GammaSearch::Joint,
                };
                let (best, _) = optimize_reflcoeffs_observed(
                    &h_eval,
                    &set.base,
                    &phases,
                    grid,
                    method,
                    |_, _| {},
                )?;
                gammas = Some(best);
            }
            match gammas {
                None => smc_composite_weights(&set.model, &phases, None)?,
                Some(gammas) => {
                    // Direction sum_k gamma_k conj(base_k) e^{j phi_k} via
                    // per-beam amplitude scales gamma_k * ||base_k||.
                    let amps: Vec<f64> = gammas
                        .iter()
                        .zip(&set.base)
                        .map(|(g, b)| g * b.norm())
                        .collect();
                    smc_composite_weights(&set.base, &phases, Some(&amps))?
                }
            }
        }
    };
    io::write_weights_csv(&args.out, &weights)?;
    let pg = path_gain(&h_eval, &weights)?;
    if let Some(summary) = &args.summary {
        let mut out = String::from("pg,pg_db\n");
        out.push_str(&format!("{},{}\n", io::g17(pg), io::g17(crate::db(pg))));
        std::fs::write(summary, out)?;
    }
    println!(
        "beamform: bf={:?} device={} L={} PG={} ({} dB)",
        args.bf,
        args.common.device,
        weights.len(),
        io::g17(pg),
        format_db(pg)
    );
    Ok(())
}

fn budget(args: BudgetArgs) -> Result<()> {
    let (scenario, device_pos) = setup(&args.common)?;
    let h_eval = eval_channel(&args.common, &scenario, &device_pos)?;
    let per_smc = scenario.per_smc_channels_at(&device_pos)?;
    let budgets = per_smc_budget(&h_eval, &per_smc)?;
    io::write_budget_csv(&args.out, &budgets)?;
    for (k, pg) in budgets.iter().enumerate() {
        println!("budget: k={} PG={} ({} dB)", k + 1, io::g17(*pg), format_db(*pg));
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let (scenario, device_pos) = setup(&args.common)?;
    let h_eval = eval_channel(&args.common, &scenario, &device_pos)?;
    let (beamformer, grid) = match args.bf {
        BfKind::Mrt => {
            return Err(Error::InvalidArgument(
                "mrt has no sweep parameters; use --bf pw, sw-los, or sw-smc".into(),
            ));
        }
        BfKind::Pw => {
            let thetas = parse_range(args.theta_deg.as_deref().ok_or_else(|| {
                Error::InvalidArgument("pw sweep needs --theta-deg start:step:stop".into())
            })?)?;
            let phis = parse_range(args.phi_deg.as_deref().ok_or_else(|| {
                Error::InvalidArgument("pw sweep needs --phi-deg start:step:stop".into())
            })?)?;
            (
                SweepBeamformer::Pw {
                    variant: PwVariant::Centered,
                },
                SweepGrid::Angles {
                    thetas: thetas.iter().map(|t| t.to_radians()).collect(),
                    phis: phis.iter().map(|p| p.to_radians()).collect(),
                },
            )
        }
        BfKind::SwLos | BfKind::SwSmc => {
            let missing =
                || Error::InvalidArgument("spherical sweep needs --x/--y/--z ranges".into());
            let xs = parse_range(args.x.as_deref().ok_or_else(missing)?)?;
            let ys = parse_range(args.y.as_deref().ok_or_else(missing)?)?;
            let zs = parse_range(args.z.as_deref().ok_or_else(missing)?)?;
            let mut positions = Vec::with_capacity(xs.len() * ys.len() * zs.len());
            for x in &xs {
                for y in &ys {
                    for z in &zs {
                        positions.push(Vector3::new(*x, *y, *z));
                    }
                }
            }
            let bf = if args.bf == BfKind::SwLos {
                SweepBeamformer::SwLos
            } else {
                SweepBeamformer::SwSmc { phases: None }
            };
            (bf, SweepGrid::Positions(positions))
        }
    };
    let result = beam_sweep(&h_eval, &scenario, &beamformer, &grid)?;
    io::write_sweep_csv(&args.out, &result)?;
    let best = &result.params[result.argmax];
    if result.angular {
        println!(
            "sweep: argmax theta={} deg phi={} deg PG={} ({} dB)",
            io::g17(best[0].to_degrees()),
            io::g17(best[1].to_degrees()),
            io::g17(result.pg_max),
            format_db(result.pg_max)
        );
    } else {
        println!(
            "sweep: argmax x={} y={} z={} PG={} ({} dB)",
            io::g17(best[0]),
            io::g17(best[1]),
            io::g17(best[2]),
            io::g17(result.pg_max),
            format_db(result.pg_max)
        );
    }
    Ok(())
}

fn heatmap_cmd(args: HeatmapArgs) -> Result<()> {
    let (scenario, device_pos) = setup(&args.common)?;
    let weights = match (&args.bf, &args.weights) {
        (None, Some(path)) => io::read_weights_csv(path)?,
        (Some(kind), None) => {
            let h_eval = eval_channel(&args.common, &scenario, &device_pos)?;
            match kind {
                BfKind::Mrt => mrt_weights(&h_eval)?,
                BfKind::Pw => {
                    let (theta, phi) = device_direction(&scenario, &device_pos)?;
                    pw_weights(
                        &scenario.rw,
                        theta,
                        phi,
                        PwVariant::Centered,
                        scenario.wavelength,
                    )?
                }
                BfKind::SwLos => {
                    sw_los_weights(&scenario.rw, &device_pos, scenario.wavelength)?
                }
                BfKind::SwSmc => scenario.sw_smc_weights(&device_pos, None)?,
            }
        }
        _ => {
            return Err(Error::InvalidArgument(
                "give exactly one of --bf or --weights".into(),
            ));
        }
    };
    if args.nx == 0 || args.ny == 0 {
        return Err(Error::InvalidArgument("grid counts must be positive".into()));
    }
    let spacing = args.spacing_wavelengths * scenario.wavelength;
    let grid = xy_grid(&device_pos, args.nx, args.ny, spacing);
    let field = heatmap(&weights, &grid, &scenario)?;
    io::write_heatmap_csv(&args.out, &grid, &field)?;
    let max = field.iter().cloned().fold(f64::MIN, f64::max);
    println!(
        "heatmap: {}x{} at {} wavelengths, max PG={} ({} dB)",
        args.nx,
        args.ny,
        args.spacing_wavelengths,
        io::g17(max),
        format_db(max)
    );
    Ok(())
}

fn mc_reciprocity(args: McArgs) -> Result<()> {
    let (scenario, device_pos) = setup(&args.common)?;
    let h_eval = eval_channel(&args.common, &scenario, &device_pos)?;
    let grid = parse_range(&args.snr_db)?;
    let report = reciprocity_report(&h_eval, &grid, args.realizations, args.common.seed)?;
    io::write_reciprocity_csv(&args.out, &report)?;
    println!(
        "mc-reciprocity: L={} P_ch={} points={} realizations={}",
        report.elements,
        io::g17(report.p_ch),
        report.points.len(),
        args.realizations
    );
    Ok(())
}

fn optimize_phases_cmd(args: OptimizePhasesArgs) -> Result<()> {
    let (scenario, device_pos) = setup(&args.common)?;
    let h_eval = eval_channel(&args.common, &scenario, &device_pos)?;
    let set = live_smc_set(&scenario, &device_pos)?;
    let objective = phase_objective(&h_eval, &set.model)?;
    let method = match args.search {
        SearchKind::Grid => PhaseSearch::Grid {
            step_rad: args.grid_step.to_radians(),
        },
        SearchKind::Random => PhaseSearch::Random {
            budget: args.budget,
            seed: args.common.seed,
        },
    };
    let mut candidates = Vec::new();
    let (best, pg) = optimize_phases_observed(&objective, set.model.len(), method, |p, g| {
        if args.emit_candidates {
            candidates.push((p.iter().map(|x| x.to_degrees()).collect(), g));
        }
    })?;
    let best_deg: Vec<f64> = best.iter().map(|p| p.to_degrees()).collect();
    io::write_search_csv(
        &args.out,
        "phi_deg",
        (&best_deg, pg),
        args.emit_candidates.then_some(candidates.as_slice()),
    )?;
    println!(
        "optimize-phases: components k={:?} phases_deg={:?} PG={} ({} dB)",
        set.indices,
        best_deg.iter().map(|p| p.round()).collect::<Vec<_>>(),
        io::g17(pg),
        format_db(pg)
    );
    Ok(())
}

fn optimize_gammas_cmd(args: OptimizeGammasArgs) -> Result<()> {
    let (scenario, device_pos) = setup(&args.common)?;
    let h_eval = eval_channel(&args.common, &scenario, &device_pos)?;
    let set = live_smc_set(&scenario, &device_pos)?;
    let phases = match &args.phases_deg {
        Some(text) => parse_phase_list(text, set.model.len())?,
        None => vec![0.0; set.model.len()],
    };
    let grid = GammaGrid {
        min: 0.0,
        max: 1.0,
        points: args.gamma_points,
    };
    let method = match args.gamma_search {
        GammaSearchKind::Coordinate => GammaSearch::CoordinateWise,
        GammaSearchKind::Joint => GammaSearch::Joint,
    };
    let mut candidates = Vec::new();
    let (best, pg) =
        optimize_reflcoeffs_observed(&h_eval, &set.base, &phases, grid, method, |g, p| {
            if args.emit_candidates {
                candidates.push((g.to_vec(), p));
            }
        })?;
    io::write_search_csv(
        &args.out,
        "gamma",
        (&best, pg),
        args.emit_candidates.then_some(candidates.as_slice()),
    )?;
    println!(
        "optimize-gammas: components k={:?} gammas={:?} PG={} ({} dB)",
        set.indices,
        best,
        io::g17(pg),
        format_db(pg)
    );
    Ok(())
}

fn format_db(pg: f64) -> String {
    format!("{:.2}", crate::db(pg))
}
