//! The five subcommands, each producing deterministic output files.

use crate::output;
use harmloss::config::RunConfig;
use harmloss::cycle::{ingest_cycle, simulate_cycle, CycleReport};
use harmloss::modulation::{synthesize_waveform, TopologyKind};
use harmloss::powertrain::{electrical_frequency, OperatingPoint};
use harmloss::spectrum::{park_transform, ripple_spectrum};
use harmloss::strategy::{
    build_loss_map, operating_setpoint, optimize_dc_link, select_mode, ModeConstraint,
};
use harmloss::Error;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub stamp: bool,
}

#[derive(Debug)]
pub enum CommandError {
    Sim(Error),
    Io(String),
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        CommandError::Sim(e)
    }
}

type CmdResult = Result<(), CommandError>;

fn write_file(path: &Path, contents: &str) -> CmdResult {
    std::fs::write(path, contents)
        .map_err(|e| CommandError::Io(format!("cannot write {}: {e}", path.display())))
}

fn parse_grid(grid: &str) -> Result<(usize, usize), CommandError> {
    let parts: Vec<&str> = grid.split(['x', 'X']).collect();
    if parts.len() == 2 {
        if let (Ok(r), Ok(c)) = (parts[0].parse::<usize>(), parts[1].parse::<usize>()) {
            if r >= 1 && c >= 1 {
                return Ok((r, c));
            }
        }
    }
    Err(CommandError::Sim(Error::InvalidConfig(format!(
        "grid '{grid}' is not ROWSxCOLS"
    ))))
}

fn parse_mode_list(modes: &str) -> Result<Vec<TopologyKind>, CommandError> {
    let kinds: Result<Vec<_>, _> = modes.split(',').map(TopologyKind::parse).collect();
    let kinds = kinds.map_err(CommandError::Sim)?;
    if kinds.is_empty() {
        return Err(CommandError::Sim(Error::InvalidConfig(
            "empty mode list".into(),
        )));
    }
    Ok(kinds)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Grid axes from the configured map ranges.
fn grid_axes(cfg: &RunConfig, grid: &str) -> Result<(Vec<f64>, Vec<f64>), CommandError> {
    let (rows, cols) = parse_grid(grid)?;
    let g = &cfg.map_grid;
    Ok((
        linspace(g.torque_min_nm, g.torque_max_nm, rows),
        linspace(g.speed_min_radps, g.speed_max_radps, cols),
    ))
}

/// The configured constraint for a mode, falling back to the machine
/// current limit when the mode is not listed.
fn constraint_for(ctx: &Context, kind: TopologyKind) -> Result<ModeConstraint, CommandError> {
    let constraints = ctx.config.constraints().map_err(CommandError::Sim)?;
    if let Some(c) = constraints.iter().find(|c| c.kind == kind) {
        return Ok(*c);
    }
    let motor = ctx.config.motor().map_err(CommandError::Sim)?;
    let mut c = ModeConstraint::new(kind, motor.i_max);
    if kind == TopologyKind::Buck2L {
        c = c.with_vdc_range(0.25 * ctx.config.vdc_nominal_v, ctx.config.vdc_nominal_v);
    }
    Ok(c)
}

// ──────────────────────────────────────────────────────────────────────────
// spectrum
// ──────────────────────────────────────────────────────────────────────────

pub fn spectrum(ctx: &Context, mode_str: &str, torque: f64, speed: f64) -> CmdResult {
    let kinds = parse_mode_list(mode_str)?;
    if kinds.len() != 1 {
        return Err(CommandError::Sim(Error::InvalidConfig(
            "spectrum takes exactly one mode".into(),
        )));
    }
    let kind = kinds[0];
    let motor = ctx.config.motor()?;
    let tables = ctx.config.tables()?;
    let cfg = ctx.config.strategy_config()?;
    let constraint = constraint_for(ctx, kind)?;
    let op = OperatingPoint::new(torque, speed);

    let mode = if kind == TopologyKind::Buck2L {
        let o = optimize_dc_link(op, &motor, &tables, &constraint, &cfg)?;
        kind.to_mode(o.vdc_set)
    } else {
        kind.to_mode(cfg.vdc_nominal)
    };
    let (_currents, u_ref) = operating_setpoint(op, &motor, &mode, &constraint, &cfg)?;
    let f_e = electrical_frequency(op, motor.pole_pairs);
    let waveform = synthesize_waveform(mode, cfg.vdc_nominal, u_ref, f_e, &cfg.pwm)?;
    let series = park_transform(&waveform);
    let spec = ripple_spectrum(&series, u_ref, &tables)?;

    write_file(
        &ctx.out_dir.join("waveform.csv"),
        &output::waveform_csv(&waveform),
    )?;
    write_file(
        &ctx.out_dir.join("spectrum.csv"),
        &output::spectrum_csv(&spec),
    )?;
    println!(
        "{}: vdc {} V, f_e {} Hz (snapped {} Hz, ratio {}), |u_ref| {:.2} V, {} spectral bins",
        mode.label(),
        waveform.vdc_used,
        waveform.f_e_requested,
        waveform.f_e_used,
        waveform.pulse_ratio,
        u_ref.magnitude(),
        spec.bins.len()
    );
    Ok(())
}

// ──────────────────────────────────────────────────────────────────────────
// lossmap / compare
// ──────────────────────────────────────────────────────────────────────────

pub fn lossmap(ctx: &Context, mode_str: &str, grid: &str) -> CmdResult {
    let kinds = parse_mode_list(mode_str)?;
    if kinds.len() != 1 {
        return Err(CommandError::Sim(Error::InvalidConfig(
            "lossmap takes exactly one mode (use compare for several)".into(),
        )));
    }
    let maps = build_maps(ctx, &kinds, grid)?;
    let path = ctx.out_dir.join(format!("lossmap_{}.csv", kinds[0].label()));
    write_file(&path, &output::lossmap_csv(&maps[0]))?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn compare(ctx: &Context, mode_str: &str, grid: &str) -> CmdResult {
    let kinds = parse_mode_list(mode_str)?;
    let maps = build_maps(ctx, &kinds, grid)?;
    for map in &maps {
        let path = ctx.out_dir.join(format!("lossmap_{}.csv", map.kind.label()));
        write_file(&path, &output::lossmap_csv(map))?;
    }
    let summary = ctx.out_dir.join("compare_summary.csv");
    write_file(&summary, &output::compare_summary_csv(&maps))?;
    println!(
        "wrote {} loss maps and {}",
        maps.len(),
        summary.display()
    );
    Ok(())
}

fn build_maps(
    ctx: &Context,
    kinds: &[TopologyKind],
    grid: &str,
) -> Result<Vec<harmloss::strategy::LossMap>, CommandError> {
    let (torques, speeds) = grid_axes(&ctx.config, grid)?;
    let motor = ctx.config.motor()?;
    let tables = ctx.config.tables()?;
    let cfg = ctx.config.strategy_config()?;
    kinds
        .iter()
        .map(|&kind| {
            let constraint = constraint_for(ctx, kind)?;
            Ok(build_loss_map(
                &torques, &speeds, kind, &motor, &tables, &constraint, &cfg,
            ))
        })
        .collect()
}

// ──────────────────────────────────────────────────────────────────────────
// optimize
// ──────────────────────────────────────────────────────────────────────────

pub fn optimize(
    ctx: &Context,
    torque: Option<f64>,
    speed: Option<f64>,
    grid: Option<&str>,
    modes: Option<&str>,
) -> CmdResult {
    let motor = ctx.config.motor()?;
    let tables = ctx.config.tables()?;
    let cfg = ctx.config.strategy_config()?;
    let mut constraints = ctx.config.constraints()?;
    if let Some(list) = modes {
        let kinds = parse_mode_list(list)?;
        constraints.retain(|c| kinds.contains(&c.kind));
        if constraints.is_empty() {
            return Err(CommandError::Sim(Error::InvalidConfig(
                "mode filter leaves no configured modes".into(),
            )));
        }
    }

    let points: Vec<OperatingPoint> = match (torque, speed, grid) {
        (Some(t), Some(w), None) => vec![OperatingPoint::new(t, w)],
        (None, None, Some(g)) => {
            let (torques, speeds) = grid_axes(&ctx.config, g)?;
            speeds
                .iter()
                .flat_map(|&w| torques.iter().map(move |&t| OperatingPoint::new(t, w)))
                .collect()
        }
        _ => {
            return Err(CommandError::Sim(Error::InvalidConfig(
                "optimize needs either --torque and --speed, or --grid".into(),
            )))
        }
    };

    let mut csv = String::from(
        "torque_Nm,speed_radps,mode,vdc_set_V,feasible,p_cu_f,p_fe_f,p_cu_h,p_fe_h,p_mag_h,p_inv_cond,p_inv_sw,p_dcdc,p_total\n",
    );
    let single = points.len() == 1;
    for op in points {
        match select_mode(op, &motor, &tables, &constraints, &cfg) {
            Ok(d) => {
                let b = &d.losses;
                csv.push_str(&format!(
                    "{},{},{},{},true,{},{},{},{},{},{},{},{},{}\n",
                    op.torque,
                    op.speed,
                    d.mode.label(),
                    d.vdc_set,
                    b.copper_fund,
                    b.iron_fund,
                    b.copper_harm,
                    b.iron_harm,
                    b.magnet_harm,
                    b.inverter_conduction,
                    b.inverter_switching,
                    b.dcdc,
                    b.total()
                ));
                println!(
                    "({:.1} N·m, {:.1} rad/s) -> {} at {:.0} V, {:.1} W total",
                    op.torque,
                    op.speed,
                    d.mode.label(),
                    d.vdc_set,
                    d.losses.total()
                );
            }
            Err(Error::NoFeasibleMode { .. }) if !single => {
                csv.push_str(&format!(
                    "{},{},,,false,,,,,,,,,\n",
                    op.torque, op.speed
                ));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let path = ctx.out_dir.join("decisions.csv");
    write_file(&path, &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}

// ──────────────────────────────────────────────────────────────────────────
// cycle
// ──────────────────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct ReportDocument<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    #[serde(flatten)]
    report: &'a CycleReport,
}

pub fn cycle(ctx: &Context, cycle_path: &Path, exact: bool) -> CmdResult {
    let text = std::fs::read_to_string(cycle_path)
        .map_err(|e| CommandError::Io(format!("cannot read cycle {}: {e}", cycle_path.display())))?;
    let cycle = ingest_cycle(&text)?;

    let motor = ctx.config.motor()?;
    let tables = ctx.config.tables()?;
    let cfg = ctx.config.strategy_config()?;
    let constraints = ctx.config.constraints()?;
    let vehicle = ctx.config.vehicle();
    let opts = ctx.config.cycle_options(exact);

    let report = simulate_cycle(&cycle, &vehicle, &motor, &tables, &constraints, &cfg, &opts)?;

    let doc = ReportDocument {
        generated_at: ctx
            .stamp
            .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        report: &report,
    };
    let json = serde_json::to_string_pretty(&doc)
        .map_err(|e| CommandError::Io(format!("report serialisation: {e}")))?;
    write_file(&ctx.out_dir.join("report.json"), &(json + "\n"))?;
    write_file(&ctx.out_dir.join("report.txt"), &output::report_text(&report))?;
    write_file(
        &ctx.out_dir.join("report_long.csv"),
        &output::report_long_csv(&report),
    )?;
    println!(
        "cycle {:.0} s / {:.2} km: eDrive losses {:.1} Wh (harmonic {:.1}%), wrote report.json / report.txt / report_long.csv",
        report.duration_s,
        report.distance_m / 1000.0,
        report.edrive_total_wh,
        report.edrive_shares_pct.harmonic()
    );
    Ok(())
}
