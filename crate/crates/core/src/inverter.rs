//! First-order switching and conduction loss models for the inverter
//! stages and the partial-load buck converter. Device counts follow the
//! circuit topology of each mode; switching energy scales linearly in
//! blocked voltage and commutated current.

use crate::error::{Error, Result};
use crate::modulation::TopologyMode;
use std::f64::consts::PI;

/// Semiconductor switch parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchParameters {
    /// On-resistance (Ω).
    pub r_on: f64,
    /// Switching energy per event at the reference point (J).
    pub e_sw_ref: f64,
    /// Reference blocking voltage for `e_sw_ref` (V).
    pub v_ref: f64,
    /// Reference commutated current for `e_sw_ref` (A).
    pub i_ref: f64,
}

impl SwitchParameters {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        for (name, v) in [
            ("r_on", self.r_on),
            ("e_sw_ref", self.e_sw_ref),
            ("v_ref", self.v_ref),
            ("i_ref", self.i_ref),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{prefix}.{name}: must be > 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Buck converter stage parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuckParameters {
    /// Inductor DC resistance (Ω).
    pub inductor_dcr: f64,
    /// Converter switch.
    pub switch: SwitchParameters,
    /// Converter switching frequency (Hz).
    pub f_sw_dc: f64,
}

impl BuckParameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.inductor_dcr > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "buck.inductor_dcr: must be > 0, got {}",
                self.inductor_dcr
            )));
        }
        if !(self.f_sw_dc > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "buck.f_sw_dc: must be > 0, got {}",
                self.f_sw_dc
            )));
        }
        self.switch.validate("buck.switch")
    }
}

/// Inverter loss split (W).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InverterLosses {
    pub conduction: f64,
    pub switching: f64,
}

impl InverterLosses {
    pub fn total(&self) -> f64 {
        self.conduction + self.switching
    }
}

/// Effective number of series devices in the phase current path.
/// The T-type midpoint path carries two devices, the rail path one; with
/// no modulation-index input the dwell split is taken as even. The
/// open-winding H mode always conducts through both bridge halves.
fn series_device_count(mode: &TopologyMode) -> f64 {
    match mode {
        TopologyMode::B62L | TopologyMode::Buck2L { .. } | TopologyMode::OwY => 1.0,
        TopologyMode::Tnpc3L => 1.5,
        TopologyMode::Ml5L => 2.0,
        TopologyMode::OwH => 2.0,
    }
}

/// Conduction and switching losses of the inverter stage at an RMS phase
/// current. Switching energy scales as E(v, i) = e_ref·(v/v_ref)·(i/i_ref)
/// with the rectified-average phase current; the open-winding H mode
/// switches two legs per winding and doubles the switching term.
pub fn inverter_losses(
    mode: &TopologyMode,
    vdc: f64,
    i_rms_phase: f64,
    f_sw: f64,
    sp: &SwitchParameters,
) -> InverterLosses {
    let conduction = series_device_count(mode) * 3.0 * i_rms_phase * i_rms_phase * sp.r_on;
    let i_avg = 2.0 * std::f64::consts::SQRT_2 / PI * i_rms_phase;
    let mut switching = 3.0 * f_sw * sp.e_sw_ref * (vdc / sp.v_ref) * (i_avg / sp.i_ref);
    if matches!(mode, TopologyMode::OwH) {
        switching *= 2.0;
    }
    InverterLosses {
        conduction,
        switching,
    }
}

/// Buck converter loss at a transferred power. The converter is bypassed
/// (zero loss) when the output equals the input; otherwise the average
/// inductor current p/v_out drives the conduction terms and the switching
/// term scales with input voltage and current.
pub fn buck_losses(v_in: f64, v_out: f64, p_transfer: f64, bp: &BuckParameters) -> Result<f64> {
    if !(v_out > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "buck v_out must be > 0, got {v_out}"
        )));
    }
    if v_out > v_in {
        return Err(Error::InvalidRatio { v_in, v_out });
    }
    if p_transfer < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "buck p_transfer must be >= 0, got {p_transfer}"
        )));
    }
    if v_out == v_in {
        return Ok(0.0); // pass-through
    }
    let i_avg = p_transfer / v_out;
    let conduction = i_avg * i_avg * (bp.inductor_dcr + bp.switch.r_on);
    let switching = bp.f_sw_dc
        * bp.switch.e_sw_ref
        * (v_in / bp.switch.v_ref)
        * (i_avg / bp.switch.i_ref);
    Ok(conduction + switching)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn switch() -> SwitchParameters {
        SwitchParameters {
            r_on: 5e-3,
            e_sw_ref: 10e-3,
            v_ref: 800.0,
            i_ref: 400.0,
        }
    }

    fn buck() -> BuckParameters {
        BuckParameters {
            inductor_dcr: 10e-3,
            switch: switch(),
            f_sw_dc: 20e3,
        }
    }

    #[test]
    fn zero_current_zero_losses() {
        let l = inverter_losses(&TopologyMode::B62L, 800.0, 0.0, 10e3, &switch());
        assert_eq!(l.conduction, 0.0);
        assert_eq!(l.switching, 0.0);
    }

    #[test]
    fn conduction_hand_value() {
        let l = inverter_losses(&TopologyMode::B62L, 800.0, 100.0, 10e3, &switch());
        assert!((l.conduction - 150.0).abs() < 1e-12, "p = {}", l.conduction);
    }

    #[test]
    fn switching_linear_in_vdc() {
        let sp = switch();
        let full = inverter_losses(&TopologyMode::B62L, 800.0, 100.0, 10e3, &sp);
        let half = inverter_losses(&TopologyMode::B62L, 400.0, 100.0, 10e3, &sp);
        assert!((half.switching - 0.5 * full.switching).abs() < 1e-12);
    }

    #[test]
    fn switching_monotone_in_frequency() {
        let sp = switch();
        let a = inverter_losses(&TopologyMode::B62L, 800.0, 100.0, 10e3, &sp);
        let b = inverter_losses(&TopologyMode::B62L, 800.0, 100.0, 20e3, &sp);
        assert!(b.switching > a.switching);
    }

    #[test]
    fn conduction_monotone_in_current() {
        let sp = switch();
        let mut prev = -1.0;
        for i in [0.0, 50.0, 120.0, 300.0] {
            let l = inverter_losses(&TopologyMode::Tnpc3L, 800.0, i, 10e3, &sp);
            assert!(l.conduction > prev || (i == 0.0 && l.conduction == 0.0));
            prev = l.conduction;
        }
    }

    #[test]
    fn tnpc_conduction_above_two_level() {
        let sp = switch();
        let two = inverter_losses(&TopologyMode::B62L, 800.0, 150.0, 10e3, &sp);
        let three = inverter_losses(&TopologyMode::Tnpc3L, 800.0, 150.0, 10e3, &sp);
        assert!(three.conduction >= two.conduction);
    }

    #[test]
    fn open_winding_h_doubles_both_terms() {
        let sp = switch();
        let star = inverter_losses(&TopologyMode::B62L, 800.0, 150.0, 10e3, &sp);
        let ow = inverter_losses(&TopologyMode::OwH, 800.0, 150.0, 10e3, &sp);
        assert!((ow.conduction - 2.0 * star.conduction).abs() < 1e-12);
        assert!((ow.switching - 2.0 * star.switching).abs() < 1e-12);
    }

    #[test]
    fn buck_zero_power_bypass() {
        assert_eq!(buck_losses(400.0, 400.0, 0.0, &buck()).unwrap(), 0.0);
        // bypass ignores power
        assert_eq!(buck_losses(400.0, 400.0, 50e3, &buck()).unwrap(), 0.0);
    }

    #[test]
    fn buck_hand_value() {
        let bp = buck();
        let p = buck_losses(800.0, 400.0, 50e3, &bp).unwrap();
        // inductor + switch conduction at 125 A
        let i = 125.0;
        let conduction = i * i * (bp.inductor_dcr + bp.switch.r_on);
        assert!((conduction - 156.25 - i * i * bp.switch.r_on).abs() < 1e-9);
        let switching = bp.f_sw_dc * bp.switch.e_sw_ref * (800.0 / 800.0) * (i / 400.0);
        assert!((p - (conduction + switching)).abs() < 1e-9, "p = {p}");
        assert!(p > 156.25);
    }

    #[test]
    fn buck_invalid_ratio() {
        assert!(matches!(
            buck_losses(400.0, 500.0, 1e3, &buck()),
            Err(Error::InvalidRatio { .. })
        ));
        assert!(buck_losses(400.0, 0.0, 1e3, &buck()).is_err());
    }

    #[test]
    fn losses_nonnegative_over_sweep() {
        let sp = switch();
        for mode in [
            TopologyMode::B62L,
            TopologyMode::Tnpc3L,
            TopologyMode::Ml5L,
            TopologyMode::OwH,
            TopologyMode::OwY,
        ] {
            for i in [0.0, 10.0, 400.0] {
                let l = inverter_losses(&mode, 800.0, i, 10e3, &sp);
                assert!(l.conduction >= 0.0 && l.switching >= 0.0);
            }
        }
    }
}
