//! Shipped synthetic parameter set: a 300 kW-class 800 V interior-PMSM
//! drive with plausible frequency-dependent harmonic loss parameters, plus
//! a short synthetic drive cycle for tests and demos.
//!
//! The harmonic table values and scaling factors are synthetic; they are
//! shaped to physically sensible curves and calibrated so the shipped
//! configuration produces loss shares in the expected range for a 2-level
//! SiC drive, not fitted to any measured machine.

use crate::cycle::{CycleOptions, CycleSample, DriveCycle, VehicleParameters};
use crate::inverter::{BuckParameters, SwitchParameters};
use crate::modulation::{PwmConfig, TopologyKind};
use crate::powertrain::{HarmonicParameterTables, MotorParameters};
use crate::strategy::{ModeConstraint, StrategyConfig};

/// Nominal DC-link voltage of the synthetic drive (V).
pub const VDC_NOMINAL: f64 = 800.0;

/// Synthetic 300 kW interior PMSM.
pub fn synthetic_motor() -> MotorParameters {
    MotorParameters {
        pole_pairs: 4,
        psi_pm: 0.09,
        ld_fund: 110e-6,
        lq_fund: 220e-6,
        rs: 5.0e-3,
        i_max: 700.0,
        rated_power: 300e3,
        iron_hyst_coeff: 35.5,
        iron_eddy_coeff: 0.49,
    }
}

/// Synthetic frequency-dependent harmonic loss parameter tables.
pub fn synthetic_tables() -> HarmonicParameterTables {
    HarmonicParameterTables {
        grid: vec![1e3, 2.5e3, 5e3, 1e4, 2e4, 4e4, 8e4, 1.6e5, 3.2e5, 6.6e5],
        ld_h: vec![
            105e-6, 100e-6, 95e-6, 90e-6, 85e-6, 80e-6, 75e-6, 70e-6, 65e-6, 60e-6,
        ],
        lq_h: vec![
            210e-6, 200e-6, 190e-6, 180e-6, 170e-6, 160e-6, 150e-6, 140e-6, 130e-6, 120e-6,
        ],
        rcu_h: vec![0.007, 0.012, 0.024, 0.06, 0.15, 0.4, 1.1, 3.0, 8.0, 24.0],
        riron_h: vec![
            80.0, 120.0, 180.0, 260.0, 380.0, 520.0, 700.0, 900.0, 1100.0, 1300.0,
        ],
        rmag_h: vec![
            800.0, 700.0, 600.0, 500.0, 420.0, 360.0, 300.0, 260.0, 230.0, 200.0,
        ],
        k_cu: 8.0e-3,
        k_iron: 0.6,
        k_mag: 1.35,
        f_min: 2.5e3,
        f_max: 2.5e5,
    }
}

/// Main inverter SiC switch.
pub fn synthetic_switch() -> SwitchParameters {
    SwitchParameters {
        r_on: 2.0e-3,
        e_sw_ref: 32.0e-3,
        v_ref: 800.0,
        i_ref: 400.0,
    }
}

/// Partial-load buck converter stage.
pub fn synthetic_buck() -> BuckParameters {
    BuckParameters {
        inductor_dcr: 5.0e-3,
        switch: SwitchParameters {
            r_on: 2.0e-3,
            e_sw_ref: 8.0e-3,
            v_ref: 800.0,
            i_ref: 400.0,
        },
        f_sw_dc: 20e3,
    }
}

/// Mid-size battery-electric vehicle.
pub fn synthetic_vehicle() -> VehicleParameters {
    VehicleParameters {
        mass: 2100.0,
        cd_a: 0.58,
        c_rr: 0.009,
        wheel_radius: 0.34,
        gear_ratio: 9.5,
        driveline_efficiency: 0.97,
        air_density: 1.204,
    }
}

/// Strategy configuration: 10 kHz SVPWM, 10 V DC-link search step.
pub fn synthetic_strategy_config() -> StrategyConfig {
    StrategyConfig {
        vdc_nominal: VDC_NOMINAL,
        pwm: PwmConfig::default(),
        switch: synthetic_switch(),
        buck: synthetic_buck(),
        dc_link_step: 10.0,
    }
}

/// Default mode constraints: all six configurations, with the T-type
/// midpoint switches sized for partial load only and the buck converter
/// allowed to pull the link down to 250 V.
pub fn synthetic_constraints() -> Vec<ModeConstraint> {
    vec![
        ModeConstraint::new(TopologyKind::B62L, 700.0),
        ModeConstraint::new(TopologyKind::Tnpc3L, 400.0),
        ModeConstraint::new(TopologyKind::Ml5L, 700.0),
        ModeConstraint::new(TopologyKind::Buck2L, 700.0).with_vdc_range(250.0, VDC_NOMINAL),
        ModeConstraint::new(TopologyKind::OwH, 700.0),
        ModeConstraint::new(TopologyKind::OwY, 700.0),
    ]
}

/// Cycle reporting constants for the synthetic vehicle.
pub fn synthetic_cycle_options() -> CycleOptions {
    CycleOptions {
        exact: false,
        lattice: (20, 20),
        battery_loss_w: 300.0,
        aux_power_w: 500.0,
    }
}

/// Synthetic mixed urban/rural/highway drive cycle, 1 Hz samples.
/// Piecewise-linear speed ramps with moderate accelerations so the whole
/// trace stays inside the synthetic drive's operating envelope.
pub fn synthetic_cycle() -> DriveCycle {
    // (end_time_s, end_speed_mps) knots; speed is linear between knots
    let knots: [(f64, f64); 13] = [
        (0.0, 0.0),
        (10.0, 0.0),
        (25.0, 12.0),
        (55.0, 12.0),
        (65.0, 0.0),
        (75.0, 0.0),
        (95.0, 20.0),
        (155.0, 20.0),
        (170.0, 8.0),
        (200.0, 8.0),
        (220.0, 24.0),
        (280.0, 24.0),
        (310.0, 0.0),
    ];
    let t_end = knots[knots.len() - 1].0 as usize;
    let mut samples = Vec::with_capacity(t_end + 1);
    for ti in 0..=t_end {
        let t = ti as f64;
        let mut v = 0.0;
        for w in knots.windows(2) {
            let (t0, v0) = w[0];
            let (t1, v1) = w[1];
            if t >= t0 && t <= t1 {
                v = v0 + (v1 - v0) * (t - t0) / (t1 - t0);
                break;
            }
        }
        samples.push(CycleSample { t, v });
    }
    DriveCycle { samples }
}
