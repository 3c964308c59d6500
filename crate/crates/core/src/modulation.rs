//! Switched-waveform synthesis for the supported inverter/motor
//! configurations: carrier-based SVPWM for the star-connected two-level
//! bridge, phase-disposition multilevel PWM for the 3L/5L bridges, the
//! buck-fed two-level bridge at a reduced DC link, and unipolar PWM for
//! the open-winding drive.
//!
//! The synthesised waveforms are ideal (no dead time, no device drops);
//! they feed the ripple-spectrum and harmonic-loss stages.

use crate::error::{Error, Result};
use crate::powertrain::DqVoltages;
use crate::spectrum::inverse_park_abc;
use std::f64::consts::PI;

pub const SQRT_3: f64 = 1.732_050_808_568_877_3;

/// Largest allowed carrier-to-fundamental pulse ratio. Below the matching
/// fundamental frequency the synthesis window is held at this ratio so
/// that near-standstill points still get a finite, coherent FFT window.
pub const MAX_PULSE_RATIO: u32 = 256;
/// Smallest allowed pulse ratio; PWM makes no sense below this.
pub const MIN_PULSE_RATIO: u32 = 4;

// ──────────────────────────────────────────────────────────────────────────
// Topology modes
// ──────────────────────────────────────────────────────────────────────────

/// Discriminant of a topology mode, without per-decision data. Used for
/// constraint declarations, CLI flags and report labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    B62L,
    Tnpc3L,
    Ml5L,
    Buck2L,
    OwH,
    OwY,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 6] = [
        TopologyKind::B62L,
        TopologyKind::Tnpc3L,
        TopologyKind::Ml5L,
        TopologyKind::Buck2L,
        TopologyKind::OwH,
        TopologyKind::OwY,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TopologyKind::B62L => "b6_2l",
            TopologyKind::Tnpc3L => "tnpc_3l",
            TopologyKind::Ml5L => "ml_5l",
            TopologyKind::Buck2L => "buck_2l",
            TopologyKind::OwH => "ow_h",
            TopologyKind::OwY => "ow_y",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "b6_2l" | "2l" => Ok(TopologyKind::B62L),
            "tnpc_3l" | "3l" => Ok(TopologyKind::Tnpc3L),
            "ml_5l" | "5l" => Ok(TopologyKind::Ml5L),
            "buck_2l" | "buck" => Ok(TopologyKind::Buck2L),
            "ow_h" | "h" => Ok(TopologyKind::OwH),
            "ow_y" | "y" => Ok(TopologyKind::OwY),
            other => Err(Error::InvalidConfig(format!(
                "unknown topology mode '{other}' (expected one of b6_2l, tnpc_3l, ml_5l, buck_2l, ow_h, ow_y)"
            ))),
        }
    }

    /// Concrete mode for synthesis; the buck-fed bridge needs its DC-link
    /// setpoint, everything else runs at the nominal link.
    pub fn to_mode(self, vdc_set: f64) -> TopologyMode {
        match self {
            TopologyKind::B62L => TopologyMode::B62L,
            TopologyKind::Tnpc3L => TopologyMode::Tnpc3L,
            TopologyKind::Ml5L => TopologyMode::Ml5L,
            TopologyKind::Buck2L => TopologyMode::Buck2L { vdc_set },
            TopologyKind::OwH => TopologyMode::OwH,
            TopologyKind::OwY => TopologyMode::OwY,
        }
    }
}

/// Inverter/motor configuration being simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopologyMode {
    /// Standard six-switch two-level bridge, star-connected machine.
    B62L,
    /// T-type neutral-point-clamped three-level bridge.
    Tnpc3L,
    /// Generic five-level bridge (phase-disposition carriers).
    Ml5L,
    /// Two-level bridge fed from a buck converter at `vdc_set`.
    Buck2L { vdc_set: f64 },
    /// Open-winding drive, both winding ends actively driven (H mode).
    OwH,
    /// Open-winding hardware switched to star-point operation (Y mode).
    OwY,
}

impl TopologyMode {
    pub fn kind(&self) -> TopologyKind {
        match self {
            TopologyMode::B62L => TopologyKind::B62L,
            TopologyMode::Tnpc3L => TopologyKind::Tnpc3L,
            TopologyMode::Ml5L => TopologyKind::Ml5L,
            TopologyMode::Buck2L { .. } => TopologyKind::Buck2L,
            TopologyMode::OwH => TopologyKind::OwH,
            TopologyMode::OwY => TopologyKind::OwY,
        }
    }

    pub fn label(&self) -> &'static str {
        self.kind().label()
    }

    /// Number of pole-voltage levels of the bridge driving each winding end.
    pub fn pole_levels(&self) -> usize {
        match self {
            TopologyMode::Tnpc3L => 3,
            TopologyMode::Ml5L => 5,
            _ => 2,
        }
    }

    /// DC-link voltage actually applied by this mode.
    pub fn vdc_effective(&self, vdc_nominal: f64) -> f64 {
        match self {
            TopologyMode::Buck2L { vdc_set } => *vdc_set,
            _ => vdc_nominal,
        }
    }

    /// Checks the mode's own invariants against the nominal DC link.
    pub fn validate(&self, vdc_nominal: f64) -> Result<()> {
        if let TopologyMode::Buck2L { vdc_set } = self {
            if !(*vdc_set > 0.0 && *vdc_set <= vdc_nominal) {
                return Err(Error::InvalidConfig(format!(
                    "buck_2l vdc_set {vdc_set} V outside (0, {vdc_nominal}] V"
                )));
            }
        }
        Ok(())
    }

    /// Largest fundamental phase-voltage amplitude the PWM construction of
    /// this mode can realise without overmodulation.
    pub fn linear_voltage_limit(&self, vdc_nominal: f64) -> f64 {
        let vdc = self.vdc_effective(vdc_nominal);
        match self {
            TopologyMode::OwH => 2.0 * vdc / SQRT_3,
            _ => vdc / SQRT_3,
        }
    }

    /// Discrete set of winding-voltage values the mode can output,
    /// ascending. For star-connected modes these are the line-to-neutral
    /// values reconstructed from the pole-voltage combinations.
    pub fn winding_levels(&self, vdc_nominal: f64) -> Vec<f64> {
        let vdc = self.vdc_effective(vdc_nominal);
        if matches!(self, TopologyMode::OwH) {
            return vec![-vdc, 0.0, vdc];
        }
        let n = self.pole_levels();
        let pole: Vec<f64> = (0..n)
            .map(|i| (i as f64 / (n - 1) as f64 - 0.5) * vdc)
            .collect();
        let mut levels = Vec::new();
        for &a in &pole {
            for &b in &pole {
                for &c in &pole {
                    let v = (2.0 * a - b - c) / 3.0;
                    if !levels.iter().any(|&x: &f64| (x - v).abs() < 1e-9 * vdc.max(1.0)) {
                        levels.push(v);
                    }
                }
            }
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels
    }
}

// ──────────────────────────────────────────────────────────────────────────
// PWM configuration
// ──────────────────────────────────────────────────────────────────────────

/// Carrier and sampling configuration of the modulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwmConfig {
    /// Switching (carrier) frequency (Hz).
    pub f_sw: f64,
    /// Time-domain samples per switching period; even, >= 32.
    pub samples_per_switching_period: u32,
    /// Number of fundamental periods to synthesise.
    pub fundamental_periods: u32,
}

impl Default for PwmConfig {
    fn default() -> Self {
        Self {
            f_sw: 10_000.0,
            samples_per_switching_period: 128,
            fundamental_periods: 1,
        }
    }
}

impl PwmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_sw > 0.0) {
            return Err(Error::InvalidConfig("pwm.f_sw: must be > 0".into()));
        }
        if self.samples_per_switching_period < 32 {
            return Err(Error::InvalidConfig(
                "pwm.samples_per_switching_period: must be >= 32".into(),
            ));
        }
        if !self.samples_per_switching_period.is_multiple_of(2) {
            return Err(Error::InvalidConfig(
                "pwm.samples_per_switching_period: must be even".into(),
            ));
        }
        if self.fundamental_periods < 1 {
            return Err(Error::InvalidConfig(
                "pwm.fundamental_periods: must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Time-domain sample rate (Hz).
    pub fn sample_rate(&self) -> f64 {
        self.f_sw * f64::from(self.samples_per_switching_period)
    }

    /// Integer carrier-to-fundamental ratio after snapping, and the snapped
    /// fundamental frequency. Near-zero fundamentals are held at the
    /// maximum ratio so standstill points stay synthesisable.
    pub fn snap_fundamental(&self, f_e: f64) -> (u32, f64) {
        let ratio = if f_e > self.f_sw / f64::from(MAX_PULSE_RATIO) {
            let r = (self.f_sw / f_e).round() as i64;
            r.clamp(i64::from(MIN_PULSE_RATIO), i64::from(MAX_PULSE_RATIO)) as u32
        } else {
            MAX_PULSE_RATIO
        };
        (ratio, self.f_sw / f64::from(ratio))
    }
}

/// Switched three-winding voltage waveform with its sampling metadata.
#[derive(Debug, Clone)]
pub struct PhaseVoltageWaveform {
    /// Sample rate (Hz).
    pub sample_rate: f64,
    /// Electrical angle at each sample (rad).
    pub theta_e: Vec<f64>,
    /// Per-winding voltage samples (V), three windings.
    pub windings: [Vec<f64>; 3],
    /// DC-link voltage used by the modulator (V).
    pub vdc_used: f64,
    /// Mode the waveform was synthesised for.
    pub mode: TopologyMode,
    /// Fundamental frequency requested by the caller (Hz).
    pub f_e_requested: f64,
    /// Fundamental frequency after integer-ratio snapping (Hz).
    pub f_e_used: f64,
    /// Integer carrier-to-fundamental ratio.
    pub pulse_ratio: u32,
}

impl PhaseVoltageWaveform {
    pub fn len(&self) -> usize {
        self.theta_e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_e.is_empty()
    }

    /// Samples making up one fundamental period.
    pub fn samples_per_fundamental(&self) -> usize {
        self.len() / self.fundamental_periods()
    }

    fn fundamental_periods(&self) -> usize {
        let n_f = (self.sample_rate / self.f_e_used).round() as usize;
        (self.len() / n_f).max(1)
    }
}

// ──────────────────────────────────────────────────────────────────────────
// References
// ──────────────────────────────────────────────────────────────────────────

fn min_max_injection(u: [f64; 3]) -> f64 {
    let max = u[0].max(u[1]).max(u[2]);
    let min = u[0].min(u[1]).min(u[2]);
    -0.5 * (max + min)
}

/// Normalised phase-leg duty references in [−1, 1] for space-vector PWM:
/// inverse Park of `u_ref` at angle 2π·f_e·t, plus min–max common-mode
/// injection, scaled by 2/vdc.
pub fn svpwm_reference(u_ref: DqVoltages, f_e: f64, vdc: f64, t: f64) -> Result<[f64; 3]> {
    let limit = vdc / SQRT_3;
    let mag = u_ref.magnitude();
    if mag > limit * (1.0 + 1e-12) {
        return Err(Error::Overmodulation {
            requested: mag,
            limit,
        });
    }
    let theta = 2.0 * PI * f_e * t;
    Ok(normalized_leg_references_star(u_ref, theta, vdc))
}

fn normalized_leg_references_star(u_ref: DqVoltages, theta: f64, vdc: f64) -> [f64; 3] {
    let u = inverse_park_abc(u_ref.d, u_ref.q, theta);
    let inj = min_max_injection(u);
    [
        2.0 * (u[0] + inj) / vdc,
        2.0 * (u[1] + inj) / vdc,
        2.0 * (u[2] + inj) / vdc,
    ]
}

fn normalized_winding_references_ow(u_ref: DqVoltages, theta: f64, vdc: f64) -> [f64; 3] {
    let u = inverse_park_abc(u_ref.d, u_ref.q, theta);
    let inj = min_max_injection(u);
    [
        (u[0] + inj) / vdc,
        (u[1] + inj) / vdc,
        (u[2] + inj) / vdc,
    ]
}

/// Commanded winding voltage (V) for each winding at electrical angle
/// `theta`. For star-connected modes the common-mode injection cancels in
/// the line-to-neutral reconstruction, so the winding reference is the
/// plain inverse-Park phase voltage; the open-winding H mode applies the
/// injected voltage directly across the winding.
pub fn winding_reference(mode: TopologyMode, u_ref: DqVoltages, theta: f64) -> [f64; 3] {
    let u = inverse_park_abc(u_ref.d, u_ref.q, theta);
    if matches!(mode, TopologyMode::OwH) {
        let inj = min_max_injection(u);
        [u[0] + inj, u[1] + inj, u[2] + inj]
    } else {
        u
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Synthesis
// ──────────────────────────────────────────────────────────────────────────

/// Splits the ideal on-sample counts of the two half periods so the total
/// rounds to the nearest sample while each half stays within one sample of
/// its own ideal count.
fn split_counts(x1: f64, x2: f64, half: i64) -> (i64, i64) {
    let n_tot = (x1 + x2).round() as i64;
    let n_tot = n_tot.clamp(0, 2 * half);
    let n1 = (x1.round() as i64).clamp((n_tot - half).max(0), n_tot.min(half));
    (n1, n_tot - n1)
}

/// Synthesises the switched winding-voltage waveform for `mode` at the
/// commanded fundamental voltage vector.
///
/// The fundamental frequency is snapped so the carrier ratio is an
/// integer, which makes every synthesised window an exact whole number of
/// fundamental periods (coherent FFT, no leakage). The snap is reported in
/// the returned metadata.
pub fn synthesize_waveform(
    mode: TopologyMode,
    vdc_nominal: f64,
    u_ref: DqVoltages,
    f_e: f64,
    cfg: &PwmConfig,
) -> Result<PhaseVoltageWaveform> {
    cfg.validate()?;
    mode.validate(vdc_nominal)?;
    if !(vdc_nominal > 0.0) {
        return Err(Error::InvalidConfig("vdc_nominal must be > 0".into()));
    }
    let vdc = mode.vdc_effective(vdc_nominal);
    let limit = mode.linear_voltage_limit(vdc_nominal);
    if u_ref.magnitude() > limit * (1.0 + 1e-12) {
        return Err(Error::Overmodulation {
            requested: u_ref.magnitude(),
            limit,
        });
    }
    if f_e > 0.0 && cfg.f_sw < 10.0 * f_e {
        log::warn!(
            "switching frequency {:.0} Hz below 10× fundamental {:.0} Hz",
            cfg.f_sw,
            f_e
        );
    }

    let (ratio, f_e_used) = cfg.snap_fundamental(f_e);
    let k = cfg.samples_per_switching_period as usize;
    let half = k / 2;
    let n_fund = k * ratio as usize;
    let n = n_fund * cfg.fundamental_periods as usize;
    let theta_at = |s: usize| 2.0 * PI * ((s % n_fund) as f64) / (n_fund as f64);

    let theta_e: Vec<f64> = (0..n).map(theta_at).collect();
    let mut windings = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];

    let n_periods_sw = ratio as usize * cfg.fundamental_periods as usize;

    if matches!(mode, TopologyMode::OwH) {
        // Unipolar three-level pattern per winding: one centred pulse per
        // half period, equivalent to two interleaved-carrier legs, giving
        // the characteristic doubled effective switching frequency.
        for p in 0..n_periods_sw {
            let s1 = p * k;
            let s2 = p * k + half;
            let r1 = normalized_winding_references_ow(u_ref, theta_at(s1), vdc);
            let r2 = normalized_winding_references_ow(u_ref, theta_at(s2), vdc);
            for w in 0..3 {
                let (a, b) = (r1[w].clamp(-1.0, 1.0), r2[w].clamp(-1.0, 1.0));
                let same_sign = a * b >= 0.0;
                let (n1, n2) = if same_sign {
                    split_counts(a.abs() * half as f64, b.abs() * half as f64, half as i64)
                } else {
                    (
                        (a.abs() * half as f64).round() as i64,
                        (b.abs() * half as f64).round() as i64,
                    )
                };
                let lvl1 = if a < 0.0 { -vdc } else { vdc };
                let lvl2 = if b < 0.0 { -vdc } else { vdc };
                let off1 = (half - n1 as usize) / 2;
                for j in 0..n1 as usize {
                    windings[w][s1 + off1 + j] = lvl1;
                }
                let off2 = (half - n2 as usize) / 2;
                for j in 0..n2 as usize {
                    windings[w][s2 + off2 + j] = lvl2;
                }
            }
        }
    } else {
        // Star-connected bridge with n_lvl pole levels and phase-disposition
        // carriers: pole voltages first, then line-to-neutral reconstruction.
        let n_lvl = mode.pole_levels();
        let bands = (n_lvl - 1) as f64;
        let pole_value = |i: usize| (i as f64 / bands - 0.5) * vdc;
        let mut poles = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];

        for p in 0..n_periods_sw {
            let s1 = p * k;
            let s2 = p * k + half;
            let r1 = normalized_leg_references_star(u_ref, theta_at(s1), vdc);
            let r2 = normalized_leg_references_star(u_ref, theta_at(s2), vdc);
            for leg in 0..3 {
                let pos1 = (r1[leg].clamp(-1.0, 1.0) + 1.0) / 2.0 * bands;
                let pos2 = (r2[leg].clamp(-1.0, 1.0) + 1.0) / 2.0 * bands;
                let b1 = (pos1.floor() as usize).min(n_lvl - 2);
                let b2 = (pos2.floor() as usize).min(n_lvl - 2);
                let d1 = pos1 - b1 as f64;
                let d2 = pos2 - b2 as f64;
                let (n1, n2) = if b1 == b2 {
                    split_counts(d1 * half as f64, d2 * half as f64, half as i64)
                } else {
                    (
                        (d1 * half as f64).round() as i64,
                        (d2 * half as f64).round() as i64,
                    )
                };
                // carrier valley sits at the period centre: upper level at
                // the end of the first half and the start of the second
                let (lo1, hi1) = (pole_value(b1), pole_value(b1 + 1));
                for j in 0..half {
                    poles[leg][s1 + j] = if j >= half - n1 as usize { hi1 } else { lo1 };
                }
                let (lo2, hi2) = (pole_value(b2), pole_value(b2 + 1));
                for j in 0..half {
                    poles[leg][s2 + j] = if j < n2 as usize { hi2 } else { lo2 };
                }
            }
        }
        for s in 0..n {
            let mean = (poles[0][s] + poles[1][s] + poles[2][s]) / 3.0;
            windings[0][s] = poles[0][s] - mean;
            windings[1][s] = poles[1][s] - mean;
            windings[2][s] = poles[2][s] - mean;
        }
    }

    Ok(PhaseVoltageWaveform {
        sample_rate: cfg.sample_rate(),
        theta_e,
        windings,
        vdc_used: vdc,
        mode,
        f_e_requested: f_e,
        f_e_used,
        pulse_ratio: ratio,
    })
}

// ──────────────────────────────────────────────────────────────────────────
// Tests
// ──────────────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PwmConfig {
        PwmConfig::default()
    }

    const VDC: f64 = 800.0;

    fn u_at_index(mode: TopologyMode, m_index: f64, angle: f64, vdc_nom: f64) -> DqVoltages {
        let a = m_index * mode.linear_voltage_limit(vdc_nom);
        DqVoltages::new(a * angle.cos(), a * angle.sin())
    }

    // -- svpwm references ------------------------------------------------------

    #[test]
    fn reference_zero_voltage() {
        let r = svpwm_reference(DqVoltages::new(0.0, 0.0), 200.0, VDC, 1e-4).unwrap();
        assert_eq!(r, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn reference_peak_is_one_at_linear_boundary() {
        let u = DqVoltages::new(VDC / SQRT_3, 0.0);
        let mut peak: f64 = 0.0;
        let f_e = 100.0;
        for i in 0..2000 {
            let t = i as f64 / 2000.0 / f_e;
            let r = svpwm_reference(u, f_e, VDC, t).unwrap();
            for v in r {
                peak = peak.max(v.abs());
            }
        }
        assert!((peak - 1.0).abs() < 1e-3, "peak = {peak}");
    }

    #[test]
    fn reference_overmodulation_rejected() {
        let u = DqVoltages::new(1.01 * VDC / SQRT_3, 0.0);
        assert!(matches!(
            svpwm_reference(u, 100.0, VDC, 0.0),
            Err(Error::Overmodulation { .. })
        ));
    }

    #[test]
    fn reference_injection_is_common_mode() {
        let u = DqVoltages::new(150.0, -220.0);
        let f_e = 150.0;
        for i in 0..97 {
            let t = i as f64 * 7.3e-5;
            let theta = 2.0 * PI * f_e * t;
            let phases = inverse_park_abc(u.d, u.q, theta);
            let inj = min_max_injection(phases);
            let r = svpwm_reference(u, f_e, VDC, t).unwrap();
            let sum: f64 = r.iter().sum();
            // the three references sum to exactly 3× the injected component
            assert!((sum - 3.0 * 2.0 * inj / VDC).abs() < 1e-12);
        }
    }

    // -- level sets ---------------------------------------------------------------

    #[test]
    fn winding_level_sets_per_mode() {
        assert_eq!(TopologyMode::B62L.winding_levels(VDC).len(), 5);
        assert_eq!(TopologyMode::Tnpc3L.winding_levels(VDC).len(), 9);
        assert_eq!(TopologyMode::Ml5L.winding_levels(VDC).len(), 17);
        assert_eq!(TopologyMode::OwH.winding_levels(VDC), vec![-VDC, 0.0, VDC]);
        let buck = TopologyMode::Buck2L { vdc_set: 400.0 };
        let lv = buck.winding_levels(VDC);
        assert!((lv[0] + 2.0 / 3.0 * 400.0).abs() < 1e-9);
    }

    fn assert_level_membership(w: &PhaseVoltageWaveform, vdc_nom: f64) {
        let levels = w.mode.winding_levels(vdc_nom);
        for ph in &w.windings {
            for &v in ph {
                let ok = levels.iter().any(|&l| (v - l).abs() <= 1e-12 * w.vdc_used);
                assert!(ok, "sample {v} not in level set of {:?}", w.mode);
            }
        }
    }

    #[test]
    fn all_samples_on_mode_levels() {
        for mode in [
            TopologyMode::B62L,
            TopologyMode::Tnpc3L,
            TopologyMode::Ml5L,
            TopologyMode::Buck2L { vdc_set: 420.0 },
            TopologyMode::OwH,
            TopologyMode::OwY,
        ] {
            let u = u_at_index(mode, 0.7, 0.4, VDC);
            let w = synthesize_waveform(mode, VDC, u, 200.0, &cfg()).unwrap();
            assert_level_membership(&w, VDC);
        }
    }

    #[test]
    fn distinct_value_counts_shrink_with_levels() {
        let count_distinct = |xs: &[f64]| {
            let mut seen: Vec<f64> = Vec::new();
            for &x in xs {
                if !seen.iter().any(|&s| (s - x).abs() < 1e-9) {
                    seen.push(x);
                }
            }
            seen.len()
        };
        let u = DqVoltages::new(0.5 * VDC / SQRT_3, 0.0);
        let w2 = synthesize_waveform(TopologyMode::B62L, VDC, u, 200.0, &cfg()).unwrap();
        assert!(count_distinct(&w2.windings[0]) <= 5);
        let w3 = synthesize_waveform(TopologyMode::Tnpc3L, VDC, u, 200.0, &cfg()).unwrap();
        assert!(count_distinct(&w3.windings[0]) <= 9);
        let w5 = synthesize_waveform(TopologyMode::Ml5L, VDC, u, 200.0, &cfg()).unwrap();
        assert!(count_distinct(&w5.windings[0]) <= 17);
        let wh = synthesize_waveform(TopologyMode::OwH, VDC, u, 200.0, &cfg()).unwrap();
        assert!(count_distinct(&wh.windings[0]) <= 3);
    }

    // -- volt-second balance --------------------------------------------------------

    fn check_volt_seconds(mode: TopologyMode, m_index: f64) {
        let c = cfg();
        let u = u_at_index(mode, m_index, 0.3, VDC);
        let f_e = 200.0;
        let w = synthesize_waveform(mode, VDC, u, f_e, &c).unwrap();
        let k = c.samples_per_switching_period as usize;
        let tol = w.vdc_used / k as f64;
        let periods = w.len() / k;
        for p in 0..periods {
            let s1 = p * k;
            let s2 = p * k + k / 2;
            let r1 = winding_reference(mode, u, w.theta_e[s1]);
            let r2 = winding_reference(mode, u, w.theta_e[s2]);
            for ph in 0..3 {
                let mean: f64 =
                    w.windings[ph][s1..s1 + k].iter().sum::<f64>() / k as f64;
                let reference = 0.5 * (r1[ph] + r2[ph]);
                assert!(
                    (mean - reference).abs() <= tol,
                    "{:?} m={m_index} period {p} phase {ph}: mean {mean:.4} vs ref {reference:.4} (tol {tol:.4})",
                    mode
                );
            }
        }
    }

    #[test]
    fn volt_second_balance_all_modes() {
        for mode in [
            TopologyMode::B62L,
            TopologyMode::Tnpc3L,
            TopologyMode::Ml5L,
            TopologyMode::Buck2L { vdc_set: 500.0 },
            TopologyMode::OwH,
            TopologyMode::OwY,
        ] {
            for m_index in [0.1, 0.5, 0.9] {
                check_volt_seconds(mode, m_index);
            }
        }
    }

    #[test]
    fn zero_reference_zero_period_means() {
        let c = cfg();
        let w =
            synthesize_waveform(TopologyMode::B62L, VDC, DqVoltages::new(0.0, 0.0), 200.0, &c)
                .unwrap();
        let k = c.samples_per_switching_period as usize;
        let tol = VDC / k as f64;
        for p in 0..w.len() / k {
            for ph in 0..3 {
                let mean: f64 =
                    w.windings[ph][p * k..(p + 1) * k].iter().sum::<f64>() / k as f64;
                assert!(mean.abs() <= tol);
            }
        }
    }

    // -- periodicity -----------------------------------------------------------------

    #[test]
    fn waveform_repeats_exactly_over_periods() {
        let mut c = cfg();
        c.fundamental_periods = 3;
        let u = DqVoltages::new(120.0, 85.0);
        let w = synthesize_waveform(TopologyMode::Tnpc3L, VDC, u, 250.0, &c).unwrap();
        let n_f = w.samples_per_fundamental();
        assert_eq!(w.len(), 3 * n_f);
        for ph in 0..3 {
            for s in 0..n_f {
                assert_eq!(w.windings[ph][s], w.windings[ph][s + n_f]);
                assert_eq!(w.windings[ph][s], w.windings[ph][s + 2 * n_f]);
            }
        }
    }

    // -- fundamental extraction ---------------------------------------------------------

    /// Single-bin DFT magnitude at the fundamental.
    fn fundamental_amplitude(w: &PhaseVoltageWaveform, phase: usize) -> f64 {
        let n = w.len() as f64;
        let n_f = w.samples_per_fundamental() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (s, &v) in w.windings[phase].iter().enumerate() {
            let ang = 2.0 * PI * (s as f64) / n_f;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        2.0 * (re * re + im * im).sqrt() / n
    }

    #[test]
    fn fundamental_recovered_within_one_percent() {
        for m_index in [0.2, 0.5, 0.8] {
            for mode in [TopologyMode::B62L, TopologyMode::OwH] {
                let u = u_at_index(mode, m_index, 0.0, VDC);
                let w = synthesize_waveform(mode, VDC, u, 200.0, &cfg()).unwrap();
                let amp = fundamental_amplitude(&w, 0);
                let rel = (amp - u.magnitude()).abs() / u.magnitude();
                assert!(rel < 0.01, "{:?} m={m_index}: amp {amp} vs {}", mode, u.magnitude());
            }
        }
    }

    // -- ripple ordering ---------------------------------------------------------------

    fn peak_ripple(w: &PhaseVoltageWaveform, k: usize) -> f64 {
        let mut peak: f64 = 0.0;
        for ph in 0..3 {
            for p in 0..w.len() / k {
                let window = &w.windings[ph][p * k..(p + 1) * k];
                let mean: f64 = window.iter().sum::<f64>() / k as f64;
                for &v in window {
                    peak = peak.max((v - mean).abs());
                }
            }
        }
        peak
    }

    #[test]
    fn three_level_peak_ripple_below_two_level() {
        let c = cfg();
        let k = c.samples_per_switching_period as usize;
        for m_index in [0.2, 0.5, 0.8] {
            let u = DqVoltages::new(m_index * VDC / SQRT_3, 0.0);
            let w2 = synthesize_waveform(TopologyMode::B62L, VDC, u, 200.0, &c).unwrap();
            let w3 = synthesize_waveform(TopologyMode::Tnpc3L, VDC, u, 200.0, &c).unwrap();
            assert!(
                peak_ripple(&w3, k) <= peak_ripple(&w2, k) + 1e-9,
                "m={m_index}"
            );
        }
    }

    // -- snapping and config ------------------------------------------------------------

    #[test]
    fn fundamental_snap_reported() {
        let c = cfg();
        let w = synthesize_waveform(
            TopologyMode::B62L,
            VDC,
            DqVoltages::new(50.0, 0.0),
            333.0,
            &c,
        )
        .unwrap();
        assert_eq!(w.pulse_ratio, 30);
        assert!((w.f_e_used - 10_000.0 / 30.0).abs() < 1e-9);
        assert_eq!(w.f_e_requested, 333.0);
        assert_eq!(w.len(), 128 * 30);
    }

    #[test]
    fn standstill_uses_max_ratio() {
        let c = cfg();
        let (ratio, f_used) = c.snap_fundamental(0.0);
        assert_eq!(ratio, MAX_PULSE_RATIO);
        assert!(f_used > 0.0);
    }

    #[test]
    fn bad_configs_rejected() {
        let mut c = cfg();
        c.samples_per_switching_period = 31;
        assert!(c.validate().is_err());
        c.samples_per_switching_period = 34;
        assert!(c.validate().is_ok());
        c.fundamental_periods = 0;
        assert!(c.validate().is_err());
        let buck = TopologyMode::Buck2L { vdc_set: 900.0 };
        assert!(buck.validate(800.0).is_err());
    }

    #[test]
    fn mode_labels_roundtrip() {
        for kind in TopologyKind::ALL {
            assert_eq!(TopologyKind::parse(kind.label()).unwrap(), kind);
        }
        assert!(TopologyKind::parse("nope").is_err());
    }
}
