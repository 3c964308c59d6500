//! Run configuration: a single JSON document with explicit SI units in the
//! field names, mapping onto the core parameter types. Loading validates
//! every component invariant and reports path-qualified messages.

use crate::cycle::{CycleOptions, VehicleParameters};
use crate::error::{Error, Result};
use crate::inverter::{BuckParameters, SwitchParameters};
use crate::modulation::{PwmConfig, TopologyKind};
use crate::powertrain::{HarmonicParameterTables, MotorParameters};
use crate::presets;
use crate::strategy::{ModeConstraint, StrategyConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MotorSection {
    pub pole_pairs: u32,
    pub psi_pm_vs: f64,
    pub ld_fund_h: f64,
    pub lq_fund_h: f64,
    pub rs_ohm: f64,
    pub i_max_a: f64,
    pub rated_power_w: f64,
    pub iron_hyst_coeff: f64,
    pub iron_eddy_coeff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicTablesSection {
    pub grid_hz: Vec<f64>,
    pub ld_h_h: Vec<f64>,
    pub lq_h_h: Vec<f64>,
    pub rcu_h_ohm: Vec<f64>,
    pub riron_h_ohm: Vec<f64>,
    pub rmag_h_ohm: Vec<f64>,
    pub k_cu: f64,
    pub k_iron: f64,
    pub k_mag: f64,
    pub f_min_hz: f64,
    pub f_max_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwitchSection {
    pub r_on_ohm: f64,
    pub e_sw_ref_j: f64,
    pub v_ref_v: f64,
    pub i_ref_a: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuckSection {
    pub inductor_dcr_ohm: f64,
    pub switch: SwitchSection,
    pub f_sw_dc_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VehicleSection {
    pub mass_kg: f64,
    pub cd_a_m2: f64,
    pub c_rr: f64,
    pub wheel_radius_m: f64,
    pub gear_ratio: f64,
    pub driveline_efficiency: f64,
    #[serde(default = "default_air_density")]
    pub air_density_kg_m3: f64,
}

fn default_air_density() -> f64 {
    1.204
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PwmSection {
    #[serde(default = "default_f_sw")]
    pub f_sw_hz: f64,
    #[serde(default = "default_samples")]
    pub samples_per_switching_period: u32,
    #[serde(default = "default_periods")]
    pub fundamental_periods: u32,
}

fn default_f_sw() -> f64 {
    10_000.0
}
fn default_samples() -> u32 {
    128
}
fn default_periods() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeSection {
    pub mode: String,
    pub max_phase_current_a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vdc_range_v: Option<[f64; 2]>,
    #[serde(default = "default_capability_factor")]
    pub voltage_capability_factor: f64,
}

fn default_capability_factor() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapGridSection {
    pub torque_min_nm: f64,
    pub torque_max_nm: f64,
    pub speed_min_radps: f64,
    pub speed_max_radps: f64,
}

impl Default for MapGridSection {
    fn default() -> Self {
        Self {
            torque_min_nm: 20.0,
            torque_max_nm: 200.0,
            speed_min_radps: 50.0,
            speed_max_radps: 600.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleSection {
    #[serde(default)]
    pub battery_loss_w: f64,
    #[serde(default)]
    pub aux_power_w: f64,
    #[serde(default = "default_lattice")]
    pub lattice_torque_points: usize,
    #[serde(default = "default_lattice")]
    pub lattice_speed_points: usize,
}

fn default_lattice() -> usize {
    20
}

impl Default for CycleSection {
    fn default() -> Self {
        Self {
            battery_loss_w: 0.0,
            aux_power_w: 0.0,
            lattice_torque_points: 20,
            lattice_speed_points: 20,
        }
    }
}

/// Complete run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub vdc_nominal_v: f64,
    pub motor: MotorSection,
    pub harmonic_tables: HarmonicTablesSection,
    pub switch: SwitchSection,
    pub buck: BuckSection,
    pub vehicle: VehicleSection,
    #[serde(default = "default_pwm_section")]
    pub pwm: PwmSection,
    pub modes: Vec<ModeSection>,
    #[serde(default = "default_dc_step")]
    pub dc_link_step_v: f64,
    #[serde(default)]
    pub map_grid: MapGridSection,
    #[serde(default)]
    pub cycle: CycleSection,
}

fn default_dc_step() -> f64 {
    10.0
}

fn default_pwm_section() -> PwmSection {
    PwmSection {
        f_sw_hz: default_f_sw(),
        samples_per_switching_period: default_samples(),
        fundamental_periods: default_periods(),
    }
}

impl RunConfig {
    /// Parses and validates a configuration from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.motor()?.validate()?;
        self.tables()?.validate()?;
        self.vehicle().validate()?;
        self.strategy_config()?.validate()?;
        let constraints = self.constraints()?;
        if constraints.is_empty() {
            return Err(Error::InvalidConfig("modes: at least one required".into()));
        }
        for c in &constraints {
            c.validate()?;
        }
        if !(self.map_grid.torque_min_nm <= self.map_grid.torque_max_nm)
            || !(self.map_grid.speed_min_radps <= self.map_grid.speed_max_radps)
        {
            return Err(Error::InvalidConfig("map_grid: ranges must be ordered".into()));
        }
        Ok(())
    }

    pub fn motor(&self) -> Result<MotorParameters> {
        let m = &self.motor;
        Ok(MotorParameters {
            pole_pairs: m.pole_pairs,
            psi_pm: m.psi_pm_vs,
            ld_fund: m.ld_fund_h,
            lq_fund: m.lq_fund_h,
            rs: m.rs_ohm,
            i_max: m.i_max_a,
            rated_power: m.rated_power_w,
            iron_hyst_coeff: m.iron_hyst_coeff,
            iron_eddy_coeff: m.iron_eddy_coeff,
        })
    }

    pub fn tables(&self) -> Result<HarmonicParameterTables> {
        let t = &self.harmonic_tables;
        Ok(HarmonicParameterTables {
            grid: t.grid_hz.clone(),
            ld_h: t.ld_h_h.clone(),
            lq_h: t.lq_h_h.clone(),
            rcu_h: t.rcu_h_ohm.clone(),
            riron_h: t.riron_h_ohm.clone(),
            rmag_h: t.rmag_h_ohm.clone(),
            k_cu: t.k_cu,
            k_iron: t.k_iron,
            k_mag: t.k_mag,
            f_min: t.f_min_hz,
            f_max: t.f_max_hz,
        })
    }

    pub fn vehicle(&self) -> VehicleParameters {
        let v = &self.vehicle;
        VehicleParameters {
            mass: v.mass_kg,
            cd_a: v.cd_a_m2,
            c_rr: v.c_rr,
            wheel_radius: v.wheel_radius_m,
            gear_ratio: v.gear_ratio,
            driveline_efficiency: v.driveline_efficiency,
            air_density: v.air_density_kg_m3,
        }
    }

    fn switch_params(s: &SwitchSection) -> SwitchParameters {
        SwitchParameters {
            r_on: s.r_on_ohm,
            e_sw_ref: s.e_sw_ref_j,
            v_ref: s.v_ref_v,
            i_ref: s.i_ref_a,
        }
    }

    pub fn strategy_config(&self) -> Result<StrategyConfig> {
        Ok(StrategyConfig {
            vdc_nominal: self.vdc_nominal_v,
            pwm: PwmConfig {
                f_sw: self.pwm.f_sw_hz,
                samples_per_switching_period: self.pwm.samples_per_switching_period,
                fundamental_periods: self.pwm.fundamental_periods,
            },
            switch: Self::switch_params(&self.switch),
            buck: BuckParameters {
                inductor_dcr: self.buck.inductor_dcr_ohm,
                switch: Self::switch_params(&self.buck.switch),
                f_sw_dc: self.buck.f_sw_dc_hz,
            },
            dc_link_step: self.dc_link_step_v,
        })
    }

    pub fn constraints(&self) -> Result<Vec<ModeConstraint>> {
        self.modes
            .iter()
            .map(|m| {
                let kind = TopologyKind::parse(&m.mode)?;
                Ok(ModeConstraint {
                    kind,
                    max_phase_current: m.max_phase_current_a,
                    vdc_range: m.vdc_range_v.map(|[lo, hi]| (lo, hi)),
                    voltage_capability_factor: m.voltage_capability_factor,
                })
            })
            .collect()
    }

    pub fn cycle_options(&self, exact: bool) -> CycleOptions {
        CycleOptions {
            exact,
            lattice: (
                self.cycle.lattice_torque_points,
                self.cycle.lattice_speed_points,
            ),
            battery_loss_w: self.cycle.battery_loss_w,
            aux_power_w: self.cycle.aux_power_w,
        }
    }

    /// The shipped synthetic 300 kW configuration.
    pub fn synthetic_default() -> Self {
        let motor = presets::synthetic_motor();
        let tables = presets::synthetic_tables();
        let switch = presets::synthetic_switch();
        let buck = presets::synthetic_buck();
        let vehicle = presets::synthetic_vehicle();
        let cycle_opts = presets::synthetic_cycle_options();
        RunConfig {
            vdc_nominal_v: presets::VDC_NOMINAL,
            motor: MotorSection {
                pole_pairs: motor.pole_pairs,
                psi_pm_vs: motor.psi_pm,
                ld_fund_h: motor.ld_fund,
                lq_fund_h: motor.lq_fund,
                rs_ohm: motor.rs,
                i_max_a: motor.i_max,
                rated_power_w: motor.rated_power,
                iron_hyst_coeff: motor.iron_hyst_coeff,
                iron_eddy_coeff: motor.iron_eddy_coeff,
            },
            harmonic_tables: HarmonicTablesSection {
                grid_hz: tables.grid.clone(),
                ld_h_h: tables.ld_h.clone(),
                lq_h_h: tables.lq_h.clone(),
                rcu_h_ohm: tables.rcu_h.clone(),
                riron_h_ohm: tables.riron_h.clone(),
                rmag_h_ohm: tables.rmag_h.clone(),
                k_cu: tables.k_cu,
                k_iron: tables.k_iron,
                k_mag: tables.k_mag,
                f_min_hz: tables.f_min,
                f_max_hz: tables.f_max,
            },
            switch: SwitchSection {
                r_on_ohm: switch.r_on,
                e_sw_ref_j: switch.e_sw_ref,
                v_ref_v: switch.v_ref,
                i_ref_a: switch.i_ref,
            },
            buck: BuckSection {
                inductor_dcr_ohm: buck.inductor_dcr,
                switch: SwitchSection {
                    r_on_ohm: buck.switch.r_on,
                    e_sw_ref_j: buck.switch.e_sw_ref,
                    v_ref_v: buck.switch.v_ref,
                    i_ref_a: buck.switch.i_ref,
                },
                f_sw_dc_hz: buck.f_sw_dc,
            },
            vehicle: VehicleSection {
                mass_kg: vehicle.mass,
                cd_a_m2: vehicle.cd_a,
                c_rr: vehicle.c_rr,
                wheel_radius_m: vehicle.wheel_radius,
                gear_ratio: vehicle.gear_ratio,
                driveline_efficiency: vehicle.driveline_efficiency,
                air_density_kg_m3: vehicle.air_density,
            },
            pwm: default_pwm_section(),
            modes: presets::synthetic_constraints()
                .into_iter()
                .map(|c| ModeSection {
                    mode: c.kind.label().to_string(),
                    max_phase_current_a: c.max_phase_current,
                    vdc_range_v: c.vdc_range.map(|(lo, hi)| [lo, hi]),
                    voltage_capability_factor: c.voltage_capability_factor,
                })
                .collect(),
            dc_link_step_v: 10.0,
            map_grid: MapGridSection::default(),
            cycle: CycleSection {
                battery_loss_w: cycle_opts.battery_loss_w,
                aux_power_w: cycle_opts.aux_power_w,
                lattice_torque_points: cycle_opts.lattice.0,
                lattice_speed_points: cycle_opts.lattice.1,
            },
        }
    }
}
