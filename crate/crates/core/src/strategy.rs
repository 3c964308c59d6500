//! Operating-strategy layer: per-point mode feasibility, DC-link setpoint
//! optimization for the buck-fed bridge, minimum-loss mode selection and
//! loss-map generation over a torque-speed lattice.

use crate::error::{Error, Result};
use crate::harmonic::total_harmonic;
use crate::inverter::{buck_losses, inverter_losses, BuckParameters, SwitchParameters};
use crate::modulation::{synthesize_waveform, PwmConfig, TopologyKind, TopologyMode, SQRT_3};
use crate::powertrain::{
    electrical_frequency, field_weakening_currents, fundamental_losses, steady_state_voltages,
    HarmonicParameterTables, MotorParameters, OperatingPoint,
};
use crate::spectrum::{park_transform, ripple_spectrum};
use rayon::prelude::*;

/// Headroom left between the fundamental voltage requirement and the PWM
/// capability (ripple and regulation margin).
pub const VOLTAGE_MARGIN: f64 = 0.05;

// ──────────────────────────────────────────────────────────────────────────
// Types
// ──────────────────────────────────────────────────────────────────────────

/// Per-mode operating constraints: device sizing and voltage capability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeConstraint {
    pub kind: TopologyKind,
    /// Peak phase current the mode's devices are sized for (A).
    pub max_phase_current: f64,
    /// Admissible DC-link setpoint range for the buck-fed bridge (V).
    pub vdc_range: Option<(f64, f64)>,
    /// Multiplier on the mode's phase-voltage capability.
    pub voltage_capability_factor: f64,
}

impl ModeConstraint {
    pub fn new(kind: TopologyKind, max_phase_current: f64) -> Self {
        Self {
            kind,
            max_phase_current,
            vdc_range: None,
            voltage_capability_factor: 1.0,
        }
    }

    pub fn with_vdc_range(mut self, lo: f64, hi: f64) -> Self {
        self.vdc_range = Some((lo, hi));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_phase_current > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "modes.{}.max_phase_current: must be > 0",
                self.kind.label()
            )));
        }
        if !(self.voltage_capability_factor > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "modes.{}.voltage_capability_factor: must be > 0",
                self.kind.label()
            )));
        }
        if let Some((lo, hi)) = self.vdc_range {
            if !(lo > 0.0 && lo <= hi) {
                return Err(Error::InvalidConfig(format!(
                    "modes.{}.vdc_range: must be ordered and positive",
                    self.kind.label()
                )));
            }
        }
        if self.kind == TopologyKind::Buck2L && self.vdc_range.is_none() {
            return Err(Error::InvalidConfig(
                "modes.buck_2l: vdc_range is required".into(),
            ));
        }
        Ok(())
    }
}

/// Shared evaluation context for the strategy layer.
#[derive(Debug, Clone)]
pub struct StrategyConfig {
    pub vdc_nominal: f64,
    pub pwm: PwmConfig,
    pub switch: SwitchParameters,
    pub buck: BuckParameters,
    /// DC-link optimization grid step (V).
    pub dc_link_step: f64,
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.vdc_nominal > 0.0) {
            return Err(Error::InvalidConfig("vdc_nominal: must be > 0".into()));
        }
        if !(self.dc_link_step > 0.0) {
            return Err(Error::InvalidConfig("dc_link_step: must be > 0".into()));
        }
        self.pwm.validate()?;
        self.switch.validate("switch")?;
        self.buck.validate()
    }
}

/// Full loss breakdown of one evaluated operating point (W).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossBreakdown {
    pub copper_fund: f64,
    pub iron_fund: f64,
    pub copper_harm: f64,
    pub iron_harm: f64,
    pub magnet_harm: f64,
    pub inverter_conduction: f64,
    pub inverter_switching: f64,
    pub dcdc: f64,
}

impl LossBreakdown {
    pub fn total(&self) -> f64 {
        self.copper_fund
            + self.iron_fund
            + self.copper_harm
            + self.iron_harm
            + self.magnet_harm
            + self.inverter_conduction
            + self.inverter_switching
            + self.dcdc
    }

    pub fn harmonic_total(&self) -> f64 {
        self.copper_harm + self.iron_harm + self.magnet_harm
    }
}

/// Outcome of the per-point mode selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDecision {
    pub mode: TopologyMode,
    /// DC-link setpoint in effect (nominal for non-buck modes).
    pub vdc_set: f64,
    pub losses: LossBreakdown,
    pub feasible: bool,
}

/// One evaluated DC-link candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcLinkCandidate {
    pub vdc: f64,
    /// Optimization objective: harmonic + inverter + converter losses (W).
    pub objective: f64,
}

/// Result of the DC-link grid search.
#[derive(Debug, Clone)]
pub struct OptimizedDcLink {
    pub vdc_set: f64,
    pub losses: LossBreakdown,
    /// The exhaustively evaluated grid, ascending in vdc.
    pub candidates: Vec<DcLinkCandidate>,
}

/// One entry of a loss map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossMapPoint {
    pub torque: f64,
    pub speed: f64,
    pub vdc_set: f64,
    pub feasible: bool,
    pub breakdown: Option<LossBreakdown>,
}

/// Loss map over a torque-speed lattice, rows in speed-major order.
#[derive(Debug, Clone)]
pub struct LossMap {
    pub kind: TopologyKind,
    pub torques: Vec<f64>,
    pub speeds: Vec<f64>,
    pub points: Vec<LossMapPoint>,
}

impl LossMap {
    pub fn at(&self, torque_idx: usize, speed_idx: usize) -> &LossMapPoint {
        &self.points[speed_idx * self.torques.len() + torque_idx]
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Voltage capability
// ──────────────────────────────────────────────────────────────────────────

/// Phase-voltage amplitude limit of a mode at the given DC link.
/// Star-connected bridges reach vdc/√3, the open-winding H mode twice
/// that, and the star-switched open-winding Y mode 1/√3 of the H-mode
/// capability.
pub fn voltage_capability(mode: &TopologyMode, vdc: f64) -> f64 {
    match mode {
        TopologyMode::B62L | TopologyMode::Tnpc3L | TopologyMode::Ml5L => vdc / SQRT_3,
        TopologyMode::Buck2L { vdc_set } => vdc_set / SQRT_3,
        TopologyMode::OwH => 2.0 * vdc / SQRT_3,
        TopologyMode::OwY => (2.0 * vdc / SQRT_3) / SQRT_3,
    }
}

/// Fundamental voltage budget used for feasibility and setpoint solving:
/// the declared capability (scaled by the constraint factor) capped at
/// what the PWM construction can realise, with the headroom margin taken
/// off.
fn fundamental_voltage_limit(mode: &TopologyMode, vdc_nominal: f64, factor: f64) -> f64 {
    let cap = voltage_capability(mode, vdc_nominal) * factor;
    cap.min(mode.linear_voltage_limit(vdc_nominal)) / (1.0 + VOLTAGE_MARGIN)
}

// ──────────────────────────────────────────────────────────────────────────
// Point evaluation
// ──────────────────────────────────────────────────────────────────────────

/// Setpoint currents and the fundamental voltage vector a mode applies at
/// an operating point, under its effective voltage budget and device
/// current limit.
pub fn operating_setpoint(
    op: OperatingPoint,
    motor: &MotorParameters,
    mode: &TopologyMode,
    constraint: &ModeConstraint,
    cfg: &StrategyConfig,
) -> Result<(crate::powertrain::DqCurrents, crate::powertrain::DqVoltages)> {
    let f_e = electrical_frequency(op, motor.pole_pairs);
    let v_limit =
        fundamental_voltage_limit(mode, cfg.vdc_nominal, constraint.voltage_capability_factor);
    let currents = field_weakening_currents(motor, op.torque, f_e, v_limit)?;
    if currents.magnitude() > constraint.max_phase_current {
        return Err(Error::Infeasible(format!(
            "peak current {:.1} A above the {} device limit {:.1} A",
            currents.magnitude(),
            mode.label(),
            constraint.max_phase_current
        )));
    }
    Ok((currents, steady_state_voltages(motor, currents, f_e)))
}

/// Runs the full loss pipeline for one mode at one operating point:
/// setpoint currents, switched waveform, ripple spectrum, harmonic and
/// fundamental motor losses, inverter losses and (for the buck-fed
/// bridge) converter losses.
pub fn evaluate_mode(
    op: OperatingPoint,
    motor: &MotorParameters,
    tables: &HarmonicParameterTables,
    mode: TopologyMode,
    constraint: &ModeConstraint,
    cfg: &StrategyConfig,
) -> Result<LossBreakdown> {
    let f_e = electrical_frequency(op, motor.pole_pairs);
    let (currents, u_ref) = operating_setpoint(op, motor, &mode, constraint, cfg)?;
    let fund = fundamental_losses(motor, currents, f_e);

    let waveform = synthesize_waveform(mode, cfg.vdc_nominal, u_ref, f_e, &cfg.pwm)?;
    let series = park_transform(&waveform);
    let spec = ripple_spectrum(&series, u_ref, tables)?;
    let harm = total_harmonic(&spec, tables)?;

    let vdc_eff = mode.vdc_effective(cfg.vdc_nominal);
    let i_rms = currents.magnitude() / std::f64::consts::SQRT_2;
    let inv = inverter_losses(&mode, vdc_eff, i_rms, cfg.pwm.f_sw, &cfg.switch);

    let dcdc = if let TopologyMode::Buck2L { vdc_set } = mode {
        let p_shaft = (op.torque * op.speed).abs();
        let p_transfer =
            p_shaft + fund.copper + fund.iron + harm.total() + inv.total();
        buck_losses(cfg.vdc_nominal, vdc_set, p_transfer, &cfg.buck)?
    } else {
        0.0
    };

    Ok(LossBreakdown {
        copper_fund: fund.copper,
        iron_fund: fund.iron,
        copper_harm: harm.copper,
        iron_harm: harm.iron,
        magnet_harm: harm.magnet,
        inverter_conduction: inv.conduction,
        inverter_switching: inv.switching,
        dcdc,
    })
}

fn feasible_with(
    op: OperatingPoint,
    motor: &MotorParameters,
    mode: &TopologyMode,
    constraint: &ModeConstraint,
    vdc_nominal: f64,
) -> bool {
    let f_e = electrical_frequency(op, motor.pole_pairs);
    let v_limit =
        fundamental_voltage_limit(mode, vdc_nominal, constraint.voltage_capability_factor);
    match field_weakening_currents(motor, op.torque, f_e, v_limit) {
        Ok(i) => i.magnitude() <= constraint.max_phase_current,
        Err(_) => false,
    }
}

/// Modes able to serve the operating point, in declaration order. The
/// buck-fed bridge is probed at the top of its setpoint range.
pub fn feasible_modes(
    op: OperatingPoint,
    motor: &MotorParameters,
    vdc_nominal: f64,
    constraints: &[ModeConstraint],
) -> Vec<TopologyKind> {
    constraints
        .iter()
        .filter(|c| {
            let vdc_set = best_buck_vdc(c, vdc_nominal);
            let mode = c.kind.to_mode(vdc_set);
            feasible_with(op, motor, &mode, c, vdc_nominal)
        })
        .map(|c| c.kind)
        .collect()
}

fn best_buck_vdc(c: &ModeConstraint, vdc_nominal: f64) -> f64 {
    match c.vdc_range {
        Some((_, hi)) => hi.min(vdc_nominal),
        None => vdc_nominal,
    }
}

// ──────────────────────────────────────────────────────────────────────────
// DC-link optimization
// ──────────────────────────────────────────────────────────────────────────

/// Smallest DC link meeting the raw (un-margined) fundamental voltage
/// requirement of the operating point, by bisection over the setpoint
/// range.
fn minimum_dc_link(
    op: OperatingPoint,
    motor: &MotorParameters,
    constraint: &ModeConstraint,
    range: (f64, f64),
) -> Result<f64> {
    let f_e = electrical_frequency(op, motor.pole_pairs);
    let factor = constraint.voltage_capability_factor;
    let raw_feasible = |vdc: f64| -> bool {
        match field_weakening_currents(motor, op.torque, f_e, vdc * factor / SQRT_3) {
            Ok(i) => i.magnitude() <= constraint.max_phase_current,
            Err(_) => false,
        }
    };
    if !raw_feasible(range.1) {
        return Err(Error::Infeasible(format!(
            "operating point not servable even at vdc = {:.0} V",
            range.1
        )));
    }
    if raw_feasible(range.0) {
        return Ok(range.0);
    }
    let (mut lo, mut hi) = range;
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if raw_feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Finds the DC-link setpoint minimising harmonic + inverter + converter
/// losses over the discrete grid between the margined feasibility minimum
/// and the top of the setpoint range. Deterministic tie-break towards the
/// lower voltage.
pub fn optimize_dc_link(
    op: OperatingPoint,
    motor: &MotorParameters,
    tables: &HarmonicParameterTables,
    constraint: &ModeConstraint,
    cfg: &StrategyConfig,
) -> Result<OptimizedDcLink> {
    let range = constraint.vdc_range.ok_or_else(|| {
        Error::InvalidConfig("buck_2l constraint needs a vdc_range".into())
    })?;
    let cap = range.1.min(cfg.vdc_nominal);
    let v_min = minimum_dc_link(op, motor, constraint, (range.0, cap))?;

    let start = (v_min * (1.0 + VOLTAGE_MARGIN)).max(range.0).min(cap);
    let mut grid = Vec::new();
    let mut v = start;
    while v < cap - 1e-9 {
        grid.push(v);
        v += cfg.dc_link_step;
    }
    grid.push(cap);

    let mut best: Option<(f64, LossBreakdown, f64)> = None;
    let mut candidates = Vec::with_capacity(grid.len());
    for vdc in grid {
        let mode = TopologyMode::Buck2L { vdc_set: vdc };
        match evaluate_mode(op, motor, tables, mode, constraint, cfg) {
            Ok(b) => {
                let objective = b.harmonic_total()
                    + b.inverter_conduction
                    + b.inverter_switching
                    + b.dcdc;
                candidates.push(DcLinkCandidate { vdc, objective });
                let better = match &best {
                    Some((_, _, best_obj)) => objective < *best_obj,
                    None => true,
                };
                if better {
                    best = Some((vdc, b, objective));
                }
            }
            Err(Error::Infeasible(_)) | Err(Error::Overmodulation { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    match best {
        Some((vdc_set, losses, _)) => Ok(OptimizedDcLink {
            vdc_set,
            losses,
            candidates,
        }),
        None => Err(Error::Infeasible(format!(
            "no DC-link setpoint serves torque {:.1} N·m at {:.1} rad/s",
            op.torque, op.speed
        ))),
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Mode selection and maps
// ──────────────────────────────────────────────────────────────────────────

/// Evaluates every feasible mode through the full pipeline and returns the
/// one with the lowest total losses. Ties resolve to the earlier
/// declaration. The buck-fed bridge is entered with its optimised
/// setpoint.
pub fn select_mode(
    op: OperatingPoint,
    motor: &MotorParameters,
    tables: &HarmonicParameterTables,
    constraints: &[ModeConstraint],
    cfg: &StrategyConfig,
) -> Result<ModeDecision> {
    let mut best: Option<ModeDecision> = None;
    for c in constraints {
        let outcome: Result<(TopologyMode, f64, LossBreakdown)> = if c.kind == TopologyKind::Buck2L
        {
            optimize_dc_link(op, motor, tables, c, cfg).map(|o| {
                (
                    TopologyMode::Buck2L { vdc_set: o.vdc_set },
                    o.vdc_set,
                    o.losses,
                )
            })
        } else {
            let mode = c.kind.to_mode(cfg.vdc_nominal);
            evaluate_mode(op, motor, tables, mode, c, cfg)
                .map(|b| (mode, cfg.vdc_nominal, b))
        };
        match outcome {
            Ok((mode, vdc_set, losses)) => {
                let better = match &best {
                    Some(b) => losses.total() < b.losses.total(),
                    None => true,
                };
                if better {
                    best = Some(ModeDecision {
                        mode,
                        vdc_set,
                        losses,
                        feasible: true,
                    });
                }
            }
            Err(Error::Infeasible(_)) | Err(Error::Overmodulation { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(Error::NoFeasibleMode {
        torque: op.torque,
        speed: op.speed,
    })
}

/// Builds a loss map for one mode over the torque × speed lattice, in
/// speed-major row order. Points the mode cannot serve are marked
/// infeasible. Lattice points are independent, so they evaluate in
/// parallel; the output order is fixed by the lattice alone.
pub fn build_loss_map(
    torques: &[f64],
    speeds: &[f64],
    kind: TopologyKind,
    motor: &MotorParameters,
    tables: &HarmonicParameterTables,
    constraint: &ModeConstraint,
    cfg: &StrategyConfig,
) -> LossMap {
    let indices: Vec<(usize, usize)> = speeds
        .iter()
        .enumerate()
        .flat_map(|(si, _)| torques.iter().enumerate().map(move |(ti, _)| (si, ti)))
        .collect();

    let points: Vec<LossMapPoint> = indices
        .par_iter()
        .map(|&(si, ti)| {
            let op = OperatingPoint::new(torques[ti], speeds[si]);
            let outcome = if kind == TopologyKind::Buck2L {
                optimize_dc_link(op, motor, tables, constraint, cfg)
                    .map(|o| (o.vdc_set, o.losses))
            } else {
                let mode = kind.to_mode(cfg.vdc_nominal);
                evaluate_mode(op, motor, tables, mode, constraint, cfg)
                    .map(|b| (cfg.vdc_nominal, b))
            };
            match outcome {
                Ok((vdc_set, b)) => LossMapPoint {
                    torque: torques[ti],
                    speed: speeds[si],
                    vdc_set,
                    feasible: true,
                    breakdown: Some(b),
                },
                Err(_) => LossMapPoint {
                    torque: torques[ti],
                    speed: speeds[si],
                    vdc_set: cfg.vdc_nominal,
                    feasible: false,
                    breakdown: None,
                },
            }
        })
        .collect();

    LossMap {
        kind,
        torques: torques.to_vec(),
        speeds: speeds.to_vec(),
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn setup() -> (MotorParameters, HarmonicParameterTables, StrategyConfig) {
        (
            presets::synthetic_motor(),
            presets::synthetic_tables(),
            presets::synthetic_strategy_config(),
        )
    }

    fn constraints() -> Vec<ModeConstraint> {
        presets::synthetic_constraints()
    }

    // -- voltage capability -------------------------------------------------

    #[test]
    fn capability_two_level() {
        let v = voltage_capability(&TopologyMode::B62L, 800.0);
        assert!((v - 461.880).abs() < 1e-2, "v = {v}");
    }

    #[test]
    fn capability_buck_uses_setpoint() {
        let v = voltage_capability(&TopologyMode::Buck2L { vdc_set: 400.0 }, 800.0);
        assert!((v - 230.940).abs() < 1e-2, "v = {v}");
    }

    #[test]
    fn capability_open_winding_ratio() {
        let h = voltage_capability(&TopologyMode::OwH, 800.0);
        let y = voltage_capability(&TopologyMode::OwY, 800.0);
        assert!((h / y - SQRT_3).abs() < 1e-12);
        assert!((h - 2.0 * 800.0 / SQRT_3).abs() < 1e-9);
    }

    // -- feasibility ------------------------------------------------------------

    #[test]
    fn all_modes_feasible_at_standstill() {
        let (motor, _, cfg) = setup();
        let cs = constraints();
        let feasible = feasible_modes(OperatingPoint::new(0.0, 0.0), &motor, cfg.vdc_nominal, &cs);
        assert_eq!(feasible.len(), cs.len());
    }

    #[test]
    fn y_mode_region_smaller_than_h_mode() {
        let (motor, _, cfg) = setup();
        let cs = constraints();
        // scan upward in speed at a fixed torque until Y drops out
        let mut y_dropped_at = None;
        for k in 1..=40 {
            let op = OperatingPoint::new(300.0, 50.0 * k as f64);
            let feasible = feasible_modes(op, &motor, cfg.vdc_nominal, &cs);
            let has_h = feasible.contains(&TopologyKind::OwH);
            let has_y = feasible.contains(&TopologyKind::OwY);
            // monotone containment
            assert!(!has_y || has_h, "Y feasible without H at {op:?}");
            if has_h && !has_y && y_dropped_at.is_none() {
                y_dropped_at = Some(op.speed);
            }
        }
        assert!(y_dropped_at.is_some(), "expected a speed where only H serves");
    }

    #[test]
    fn undersized_midpoint_devices_excluded_at_rated_torque() {
        let (motor, _, cfg) = setup();
        let mut cs = constraints();
        for c in &mut cs {
            if c.kind == TopologyKind::Tnpc3L {
                c.max_phase_current = 150.0;
            }
        }
        let op = OperatingPoint::new(400.0, 200.0);
        let feasible = feasible_modes(op, &motor, cfg.vdc_nominal, &cs);
        assert!(!feasible.contains(&TopologyKind::Tnpc3L));
        assert!(feasible.contains(&TopologyKind::B62L));
    }

    // -- DC-link optimization -------------------------------------------------------

    fn buck_constraint() -> ModeConstraint {
        constraints()
            .into_iter()
            .find(|c| c.kind == TopologyKind::Buck2L)
            .unwrap()
    }

    #[test]
    fn near_full_voltage_point_keeps_nominal_link() {
        let (motor, tables, cfg) = setup();
        // close to the nominal-link envelope: no useful headroom left
        let op = OperatingPoint::new(450.0, 800.0);
        let o = optimize_dc_link(op, &motor, &tables, &buck_constraint(), &cfg).unwrap();
        assert_eq!(o.vdc_set, cfg.vdc_nominal);
        assert!(o.candidates.first().unwrap().vdc > 0.85 * cfg.vdc_nominal);
    }

    #[test]
    fn light_point_drops_to_grid_minimum() {
        let (motor, tables, cfg) = setup();
        let op = OperatingPoint::new(0.0, 200.0);
        let o = optimize_dc_link(op, &motor, &tables, &buck_constraint(), &cfg).unwrap();
        let first = o.candidates.first().unwrap().vdc;
        assert_eq!(o.vdc_set, first, "expected the lowest feasible setpoint");
        assert!(o.vdc_set < 0.5 * cfg.vdc_nominal);
        // objective grows away from the minimum here (2% sampling noise)
        for w in o.candidates.windows(2) {
            assert!(
                w[1].objective >= w[0].objective * 0.98,
                "dip at {} V: {} -> {}",
                w[1].vdc,
                w[0].objective,
                w[1].objective
            );
        }
    }

    #[test]
    fn optimizer_is_argmin_of_candidate_grid() {
        let (motor, tables, cfg) = setup();
        let op = OperatingPoint::new(80.0, 250.0);
        let o = optimize_dc_link(op, &motor, &tables, &buck_constraint(), &cfg).unwrap();
        let best = o
            .candidates
            .iter()
            .fold(None::<DcLinkCandidate>, |acc, &c| match acc {
                Some(a) if a.objective <= c.objective => Some(a),
                _ => Some(c),
            })
            .unwrap();
        assert_eq!(o.vdc_set, best.vdc);
    }

    // -- mode selection -----------------------------------------------------------------

    #[test]
    fn single_configured_mode_always_selected() {
        let (motor, tables, cfg) = setup();
        let cs = vec![ModeConstraint::new(TopologyKind::B62L, motor.i_max)];
        let d = select_mode(OperatingPoint::new(100.0, 300.0), &motor, &tables, &cs, &cfg)
            .unwrap();
        assert_eq!(d.mode.kind(), TopologyKind::B62L);
        assert!(d.feasible);
    }

    #[test]
    fn partial_load_never_picks_plain_two_level() {
        let (motor, tables, cfg) = setup();
        let cs = constraints();
        for (t, w) in [(40.0, 200.0), (90.0, 350.0), (25.0, 100.0)] {
            let d = select_mode(OperatingPoint::new(t, w), &motor, &tables, &cs, &cfg).unwrap();
            assert_ne!(
                d.mode.kind(),
                TopologyKind::B62L,
                "partial-load point ({t}, {w}) picked the baseline bridge"
            );
        }
    }

    #[test]
    fn no_feasible_mode_reported() {
        let (motor, tables, cfg) = setup();
        let cs = vec![ModeConstraint::new(TopologyKind::OwY, 40.0)];
        let r = select_mode(OperatingPoint::new(400.0, 900.0), &motor, &tables, &cs, &cfg);
        assert!(matches!(r, Err(Error::NoFeasibleMode { .. })));
    }

    // -- loss maps -------------------------------------------------------------------------

    #[test]
    fn single_cell_map_equals_direct_evaluation() {
        let (motor, tables, cfg) = setup();
        let c = ModeConstraint::new(TopologyKind::Tnpc3L, motor.i_max);
        let map = build_loss_map(&[120.0], &[300.0], c.kind, &motor, &tables, &c, &cfg);
        assert_eq!(map.points.len(), 1);
        let direct = evaluate_mode(
            OperatingPoint::new(120.0, 300.0),
            &motor,
            &tables,
            TopologyKind::Tnpc3L.to_mode(cfg.vdc_nominal),
            &c,
            &cfg,
        )
        .unwrap();
        assert_eq!(map.points[0].breakdown.unwrap(), direct);
    }

    #[test]
    fn maps_are_deterministic_across_reruns() {
        let (motor, tables, cfg) = setup();
        let c = ModeConstraint::new(TopologyKind::B62L, motor.i_max);
        let torques = [50.0, 150.0];
        let speeds = [100.0, 400.0];
        let a = build_loss_map(&torques, &speeds, c.kind, &motor, &tables, &c, &cfg);
        let b = build_loss_map(&torques, &speeds, c.kind, &motor, &tables, &c, &cfg);
        for (pa, pb) in a.points.iter().zip(b.points.iter()) {
            assert_eq!(pa, pb);
        }
    }

    #[test]
    fn map_rows_are_speed_major() {
        let (motor, tables, cfg) = setup();
        let c = ModeConstraint::new(TopologyKind::B62L, motor.i_max);
        let map = build_loss_map(&[10.0, 20.0], &[100.0, 200.0], c.kind, &motor, &tables, &c, &cfg);
        let order: Vec<(f64, f64)> = map.points.iter().map(|p| (p.speed, p.torque)).collect();
        assert_eq!(
            order,
            vec![(100.0, 10.0), (100.0, 20.0), (200.0, 10.0), (200.0, 20.0)]
        );
    }
}
