//! Drive-cycle simulation: CSV ingestion, a longitudinal vehicle model
//! mapping the speed trace to motor operating points, per-sample loss
//! evaluation through the strategy layer and energy/share reporting.

use crate::error::{Error, Result};
use crate::modulation::TopologyKind;
use crate::powertrain::{HarmonicParameterTables, MotorParameters, OperatingPoint};
use crate::strategy::{
    build_loss_map, select_mode, LossBreakdown, LossMap, ModeConstraint, StrategyConfig,
};
use serde::{Deserialize, Serialize};

pub const STANDARD_GRAVITY: f64 = 9.806_65;

// ──────────────────────────────────────────────────────────────────────────
// Types
// ──────────────────────────────────────────────────────────────────────────

/// Longitudinal vehicle parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParameters {
    /// Vehicle mass (kg).
    pub mass: f64,
    /// Drag area c_d·A (m²).
    pub cd_a: f64,
    /// Rolling-resistance coefficient.
    pub c_rr: f64,
    /// Wheel radius (m).
    pub wheel_radius: f64,
    /// Total gear ratio motor:wheel.
    pub gear_ratio: f64,
    /// Scalar driveline efficiency, (0, 1].
    pub driveline_efficiency: f64,
    /// Air density (kg/m³).
    pub air_density: f64,
}

impl VehicleParameters {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("vehicle.mass", self.mass),
            ("vehicle.cd_a", self.cd_a),
            ("vehicle.c_rr", self.c_rr),
            ("vehicle.wheel_radius", self.wheel_radius),
            ("vehicle.gear_ratio", self.gear_ratio),
            ("vehicle.driveline_efficiency", self.driveline_efficiency),
            ("vehicle.air_density", self.air_density),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name}: must be > 0, got {v}")));
            }
        }
        if self.driveline_efficiency > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "vehicle.driveline_efficiency: must be <= 1, got {}",
                self.driveline_efficiency
            )));
        }
        Ok(())
    }
}

/// One time-speed sample of a drive cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSample {
    pub t: f64,
    pub v: f64,
}

/// A validated time-speed trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveCycle {
    pub samples: Vec<CycleSample>,
}

impl DriveCycle {
    pub fn new(samples: Vec<CycleSample>) -> Result<Self> {
        let cycle = Self { samples };
        cycle.validate()?;
        Ok(cycle)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(Error::InvalidConfig(
                "drive cycle needs at least 2 samples".into(),
            ));
        }
        for (i, w) in self.samples.windows(2).enumerate() {
            if !(w[1].t > w[0].t) {
                return Err(Error::NonMonotonicTime { line: i + 3 });
            }
        }
        for (i, s) in self.samples.iter().enumerate() {
            if s.v < 0.0 {
                return Err(Error::NegativeSpeed { line: i + 2 });
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().unwrap().t - self.samples.first().unwrap().t
    }
}

/// Parses a drive cycle from CSV text with the header `t_s,v_mps`.
/// Line numbers in errors are 1-based and include the header.
pub fn ingest_cycle(csv: &str) -> Result<DriveCycle> {
    let mut lines = csv.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::MalformedRow {
        line: 1,
        detail: "empty input".into(),
    })?;
    if header.trim() != "t_s,v_mps" {
        return Err(Error::MalformedRow {
            line: 1,
            detail: format!("expected header 't_s,v_mps', got '{}'", header.trim()),
        });
    }
    let mut samples = Vec::new();
    let mut prev_t: Option<f64> = None;
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let mut parts = row.split(',');
        let t_str = parts.next().unwrap_or("");
        let v_str = parts.next().ok_or_else(|| Error::MalformedRow {
            line,
            detail: "missing speed column".into(),
        })?;
        if parts.next().is_some() {
            return Err(Error::MalformedRow {
                line,
                detail: "too many columns".into(),
            });
        }
        let t: f64 = t_str.trim().parse().map_err(|_| Error::MalformedRow {
            line,
            detail: format!("bad time value '{}'", t_str.trim()),
        })?;
        let v: f64 = v_str.trim().parse().map_err(|_| Error::MalformedRow {
            line,
            detail: format!("bad speed value '{}'", v_str.trim()),
        })?;
        if let Some(p) = prev_t {
            if t <= p {
                return Err(Error::NonMonotonicTime { line });
            }
        }
        if v < 0.0 {
            return Err(Error::NegativeSpeed { line });
        }
        prev_t = Some(t);
        samples.push(CycleSample { t, v });
    }
    if samples.len() < 2 {
        return Err(Error::InvalidConfig(
            "drive cycle needs at least 2 rows".into(),
        ));
    }
    Ok(DriveCycle { samples })
}

/// Serialises a cycle back to the CSV exchange format.
pub fn export_cycle(cycle: &DriveCycle) -> String {
    let mut out = String::from("t_s,v_mps\n");
    for s in &cycle.samples {
        out.push_str(&format!("{},{}\n", s.t, s.v));
    }
    out
}

/// Maps a speed/acceleration pair to the motor shaft operating point
/// through the road-load equation
///   F = m·a + ½ρ·c_dA·v² + c_rr·m·g.
/// Traction demand divides by the driveline efficiency, recuperation
/// multiplies by it. Torque is signed; negative means regeneration.
pub fn road_load_operating_point(v: f64, a: f64, veh: &VehicleParameters) -> OperatingPoint {
    let force = veh.mass * a
        + 0.5 * veh.air_density * veh.cd_a * v * v
        + veh.c_rr * veh.mass * STANDARD_GRAVITY;
    let wheel_torque = force * veh.wheel_radius;
    let motor_torque = if force >= 0.0 {
        wheel_torque / (veh.gear_ratio * veh.driveline_efficiency)
    } else {
        wheel_torque * veh.driveline_efficiency / veh.gear_ratio
    };
    let motor_speed = v * veh.gear_ratio / veh.wheel_radius;
    OperatingPoint::new(motor_torque, motor_speed)
}

// ──────────────────────────────────────────────────────────────────────────
// Report
// ──────────────────────────────────────────────────────────────────────────

/// Per-category energies over the cycle (Wh).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyByCategory {
    pub copper_fund: f64,
    pub iron_fund: f64,
    pub copper_harm: f64,
    pub iron_harm: f64,
    pub magnet_harm: f64,
    pub inverter_conduction: f64,
    pub inverter_switching: f64,
    pub dcdc: f64,
    pub road_load: f64,
    pub driveline: f64,
    pub battery: f64,
    pub auxiliary: f64,
}

impl EnergyByCategory {
    pub fn edrive_total(&self) -> f64 {
        self.copper_fund
            + self.iron_fund
            + self.copper_harm
            + self.iron_harm
            + self.magnet_harm
            + self.inverter_conduction
            + self.inverter_switching
            + self.dcdc
    }

    pub fn vehicle_total(&self) -> f64 {
        self.edrive_total() + self.road_load + self.driveline + self.battery + self.auxiliary
    }
}

/// Percentage shares of the electric-drive loss categories.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EdriveShares {
    pub copper_fund: f64,
    pub iron_fund: f64,
    pub copper_harm: f64,
    pub iron_harm: f64,
    pub magnet_harm: f64,
    pub inverter_conduction: f64,
    pub inverter_switching: f64,
    pub dcdc: f64,
}

impl EdriveShares {
    pub fn sum(&self) -> f64 {
        self.copper_fund
            + self.iron_fund
            + self.copper_harm
            + self.iron_harm
            + self.magnet_harm
            + self.inverter_conduction
            + self.inverter_switching
            + self.dcdc
    }

    /// Combined share of the harmonic loss categories.
    pub fn harmonic(&self) -> f64 {
        self.copper_harm + self.iron_harm + self.magnet_harm
    }

    /// Combined share of the fundamental motor loss categories.
    pub fn fundamental_motor(&self) -> f64 {
        self.copper_fund + self.iron_fund
    }
}

/// Percentage shares of the vehicle-level energy categories.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleShares {
    pub road_load: f64,
    pub driveline: f64,
    pub edrive: f64,
    pub battery: f64,
    pub auxiliary: f64,
}

impl VehicleShares {
    pub fn sum(&self) -> f64 {
        self.road_load + self.driveline + self.edrive + self.battery + self.auxiliary
    }
}

/// Time share of one operating mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTimeShare {
    pub mode: String,
    pub share_pct: f64,
}

/// Aggregated result of a drive-cycle simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub duration_s: f64,
    pub distance_m: f64,
    pub energies_wh: EnergyByCategory,
    pub edrive_total_wh: f64,
    pub vehicle_total_wh: f64,
    /// True when no energy was converted (shares are defined as zero).
    pub empty: bool,
    pub edrive_shares_pct: EdriveShares,
    pub vehicle_shares_pct: VehicleShares,
    pub mode_time_shares_pct: Vec<ModeTimeShare>,
}

/// Simulation options for a cycle run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleOptions {
    /// Evaluate every sample through the full pipeline instead of the
    /// bilinear loss-map interpolation.
    pub exact: bool,
    /// Interpolation lattice resolution (torque points, speed points).
    pub lattice: (usize, usize),
    /// Constant battery loss reported at vehicle level (W).
    pub battery_loss_w: f64,
    /// Constant auxiliary consumption reported at vehicle level (W).
    pub aux_power_w: f64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            exact: false,
            lattice: (20, 20),
            battery_loss_w: 0.0,
            aux_power_w: 0.0,
        }
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Simulation
// ──────────────────────────────────────────────────────────────────────────

/// Central-difference accelerations (forward/backward at the ends).
fn accelerations(samples: &[CycleSample]) -> Vec<f64> {
    let n = samples.len();
    (0..n)
        .map(|i| {
            let (i0, i1) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            (samples[i1].v - samples[i0].v) / (samples[i1].t - samples[i0].t)
        })
        .collect()
}

struct MapInterpolator {
    maps: Vec<(TopologyKind, LossMap)>,
    torques: Vec<f64>,
    speeds: Vec<f64>,
}

impl MapInterpolator {
    fn cell(axis: &[f64], x: f64) -> (usize, f64) {
        let n = axis.len();
        if x <= axis[0] {
            return (0, 0.0);
        }
        if x >= axis[n - 1] {
            return (n - 2, 1.0);
        }
        let mut i = axis.partition_point(|&g| g <= x);
        i = i.clamp(1, n - 1);
        let lo = i - 1;
        ((lo), (x - axis[lo]) / (axis[i] - axis[lo]))
    }

    /// Bilinear interpolation of every loss category for one mode, or
    /// `None` when any surrounding lattice point is infeasible.
    fn interpolate(&self, map: &LossMap, torque: f64, speed: f64) -> Option<LossBreakdown> {
        let (ti, wt) = Self::cell(&self.torques, torque);
        let (si, ws) = Self::cell(&self.speeds, speed);
        let corners = [
            map.at(ti, si),
            map.at(ti + 1, si),
            map.at(ti, si + 1),
            map.at(ti + 1, si + 1),
        ];
        if corners.iter().any(|p| !p.feasible) {
            return None;
        }
        let b: Vec<LossBreakdown> = corners.iter().map(|p| p.breakdown.unwrap()).collect();
        let lerp2 = |f: fn(&LossBreakdown) -> f64| -> f64 {
            let top = f(&b[0]) * (1.0 - wt) + f(&b[1]) * wt;
            let bot = f(&b[2]) * (1.0 - wt) + f(&b[3]) * wt;
            top * (1.0 - ws) + bot * ws
        };
        Some(LossBreakdown {
            copper_fund: lerp2(|x| x.copper_fund),
            iron_fund: lerp2(|x| x.iron_fund),
            copper_harm: lerp2(|x| x.copper_harm),
            iron_harm: lerp2(|x| x.iron_harm),
            magnet_harm: lerp2(|x| x.magnet_harm),
            inverter_conduction: lerp2(|x| x.inverter_conduction),
            inverter_switching: lerp2(|x| x.inverter_switching),
            dcdc: lerp2(|x| x.dcdc),
        })
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

/// Simulates a drive cycle and aggregates energies per loss category.
///
/// Losses default to bilinear interpolation on per-mode loss maps built
/// over the cycle's torque-speed envelope; `opts.exact` switches to a full
/// per-sample pipeline evaluation. Both paths are deterministic.
pub fn simulate_cycle(
    cycle: &DriveCycle,
    veh: &VehicleParameters,
    motor: &MotorParameters,
    tables: &HarmonicParameterTables,
    constraints: &[ModeConstraint],
    cfg: &StrategyConfig,
    opts: &CycleOptions,
) -> Result<CycleReport> {
    cycle.validate()?;
    veh.validate()?;
    if constraints.is_empty() {
        return Err(Error::InvalidConfig(
            "cycle simulation needs at least one configured mode".into(),
        ));
    }

    let n = cycle.samples.len();
    let accel = accelerations(&cycle.samples);
    let ops: Vec<OperatingPoint> = cycle
        .samples
        .iter()
        .zip(accel.iter())
        .map(|(s, &a)| {
            if s.v == 0.0 && a == 0.0 {
                // parked: no rolling contact motion, the drive is idle
                OperatingPoint::new(0.0, 0.0)
            } else {
                road_load_operating_point(s.v, a, veh)
            }
        })
        .collect();

    // Loss-map interpolator over the cycle envelope (skipped in exact mode).
    let interpolator = if opts.exact {
        None
    } else {
        let t_max = ops.iter().map(|o| o.torque.abs()).fold(0.0, f64::max);
        let s_max = ops.iter().map(|o| o.speed).fold(0.0, f64::max);
        let torques = linspace(0.0, (t_max * 1.02).max(1.0), opts.lattice.0.max(2));
        let speeds = linspace(0.0, (s_max * 1.02).max(1.0), opts.lattice.1.max(2));
        let maps: Vec<(TopologyKind, LossMap)> = constraints
            .iter()
            .map(|c| {
                (
                    c.kind,
                    build_loss_map(&torques, &speeds, c.kind, motor, tables, c, cfg),
                )
            })
            .collect();
        Some(MapInterpolator {
            maps,
            torques,
            speeds,
        })
    };

    // Per-sample loss breakdown and selected mode label.
    let mut breakdowns: Vec<LossBreakdown> = Vec::with_capacity(n);
    let mut mode_labels: Vec<&'static str> = Vec::with_capacity(n);
    for (i, op) in ops.iter().enumerate() {
        if op.torque == 0.0 && op.speed == 0.0 {
            breakdowns.push(LossBreakdown::default());
            mode_labels.push("idle");
            continue;
        }
        let interpolated = interpolator.as_ref().and_then(|ip| {
            let mut best: Option<(&'static str, LossBreakdown)> = None;
            for (kind, map) in &ip.maps {
                if let Some(b) = ip.interpolate(map, op.torque.abs(), op.speed) {
                    let better = match &best {
                        Some((_, cur)) => b.total() < cur.total(),
                        None => true,
                    };
                    if better {
                        best = Some((kind.label(), b));
                    }
                }
            }
            best
        });
        match interpolated {
            Some((label, b)) => {
                breakdowns.push(b);
                mode_labels.push(label);
            }
            None => {
                // exact path (always in exact mode, fallback otherwise)
                let decision =
                    select_mode(*op, motor, tables, constraints, cfg).map_err(|e| match e {
                        Error::NoFeasibleMode { torque, speed } => Error::InfeasiblePoint {
                            t: cycle.samples[i].t,
                            torque,
                            speed,
                        },
                        other => other,
                    })?;
                breakdowns.push(decision.losses);
                mode_labels.push(decision.mode.label());
            }
        }
    }

    // Per-sample vehicle-level powers.
    let mut road_power = vec![0.0; n];
    let mut driveline_power = vec![0.0; n];
    for i in 0..n {
        let v = cycle.samples[i].v;
        if v > 0.0 {
            let resist = 0.5 * veh.air_density * veh.cd_a * v * v
                + veh.c_rr * veh.mass * STANDARD_GRAVITY;
            road_power[i] = resist * v;
            let force = veh.mass * accel[i] + resist;
            let wheel_power = force * v;
            driveline_power[i] = if wheel_power >= 0.0 {
                wheel_power * (1.0 / veh.driveline_efficiency - 1.0)
            } else {
                -wheel_power * (1.0 - veh.driveline_efficiency)
            };
        }
    }

    // Trapezoidal integration of every category.
    let mut e = EnergyByCategory::default();
    let mut distance = 0.0;
    let duration = cycle.duration();
    let mut mode_time: Vec<(&'static str, f64)> = Vec::new();
    for i in 0..n - 1 {
        let dt = cycle.samples[i + 1].t - cycle.samples[i].t;
        let w = dt / 2.0 / 3600.0; // trapezoid half-weight, Wh per W
        let (a, b) = (&breakdowns[i], &breakdowns[i + 1]);
        e.copper_fund += (a.copper_fund + b.copper_fund) * w;
        e.iron_fund += (a.iron_fund + b.iron_fund) * w;
        e.copper_harm += (a.copper_harm + b.copper_harm) * w;
        e.iron_harm += (a.iron_harm + b.iron_harm) * w;
        e.magnet_harm += (a.magnet_harm + b.magnet_harm) * w;
        e.inverter_conduction += (a.inverter_conduction + b.inverter_conduction) * w;
        e.inverter_switching += (a.inverter_switching + b.inverter_switching) * w;
        e.dcdc += (a.dcdc + b.dcdc) * w;
        e.road_load += (road_power[i] + road_power[i + 1]) * w;
        e.driveline += (driveline_power[i] + driveline_power[i + 1]) * w;
        distance += (cycle.samples[i].v + cycle.samples[i + 1].v) * dt / 2.0;

        // sample-weighted mode dwell time
        for (label, half) in [(mode_labels[i], dt / 2.0), (mode_labels[i + 1], dt / 2.0)] {
            match mode_time.iter_mut().find(|(l, _)| *l == label) {
                Some((_, acc)) => *acc += half,
                None => mode_time.push((label, half)),
            }
        }
    }
    e.battery = opts.battery_loss_w * duration / 3600.0;
    e.auxiliary = opts.aux_power_w * duration / 3600.0;

    let edrive_total = e.edrive_total();
    let vehicle_total = e.vehicle_total();
    let empty = !(edrive_total > 0.0);

    let pct = |part: f64, total: f64| if total > 0.0 { 100.0 * part / total } else { 0.0 };
    let edrive_shares = EdriveShares {
        copper_fund: pct(e.copper_fund, edrive_total),
        iron_fund: pct(e.iron_fund, edrive_total),
        copper_harm: pct(e.copper_harm, edrive_total),
        iron_harm: pct(e.iron_harm, edrive_total),
        magnet_harm: pct(e.magnet_harm, edrive_total),
        inverter_conduction: pct(e.inverter_conduction, edrive_total),
        inverter_switching: pct(e.inverter_switching, edrive_total),
        dcdc: pct(e.dcdc, edrive_total),
    };
    let vehicle_shares = VehicleShares {
        road_load: pct(e.road_load, vehicle_total),
        driveline: pct(e.driveline, vehicle_total),
        edrive: pct(edrive_total, vehicle_total),
        battery: pct(e.battery, vehicle_total),
        auxiliary: pct(e.auxiliary, vehicle_total),
    };

    let mode_time_shares_pct = mode_time
        .into_iter()
        .map(|(label, secs)| ModeTimeShare {
            mode: label.to_string(),
            share_pct: if duration > 0.0 {
                100.0 * secs / duration
            } else {
                0.0
            },
        })
        .collect();

    Ok(CycleReport {
        duration_s: duration,
        distance_m: distance,
        energies_wh: e,
        edrive_total_wh: edrive_total,
        vehicle_total_wh: vehicle_total,
        empty,
        edrive_shares_pct: edrive_shares,
        vehicle_shares_pct: vehicle_shares,
        mode_time_shares_pct,
    })
}
