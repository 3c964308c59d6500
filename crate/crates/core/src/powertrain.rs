//! Fundamental-frequency dq model of the traction machine: torque
//! production, MTPA and field-weakening current setpoints, steady-state
//! voltages and fundamental copper/iron losses.
//!
//! Conventions used throughout the crate: amplitude-invariant (peak) dq
//! quantities with the 3/2 power factor, mechanical speed in rad/s,
//! electrical frequency in Hz.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Convergence tolerance for the MTPA angle search (rad).
const MTPA_ANGLE_TOL: f64 = 1e-9;
/// Convergence tolerance for field-weakening bisection on i_d (A).
const FW_CURRENT_TOL: f64 = 1e-6;
/// Golden ratio step for the 1-D searches.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

// ──────────────────────────────────────────────────────────────────────────
// Domain types
// ──────────────────────────────────────────────────────────────────────────

/// Fundamental machine constants of the interior PMSM.
#[derive(Debug, Clone, PartialEq)]
pub struct MotorParameters {
    /// Number of pole pairs.
    pub pole_pairs: u32,
    /// Permanent-magnet flux linkage (V·s).
    pub psi_pm: f64,
    /// d-axis inductance at fundamental frequency (H).
    pub ld_fund: f64,
    /// q-axis inductance at fundamental frequency (H).
    pub lq_fund: f64,
    /// Stator resistance per phase (Ω).
    pub rs: f64,
    /// Peak phase current limit (A).
    pub i_max: f64,
    /// Rated shaft power (W).
    pub rated_power: f64,
    /// Fundamental iron-loss hysteresis coefficient (loss ∝ f·ψ²).
    pub iron_hyst_coeff: f64,
    /// Fundamental iron-loss eddy coefficient (loss ∝ f²·ψ²).
    pub iron_eddy_coeff: f64,
}

impl MotorParameters {
    /// Checks the type invariants, returning a field-qualified error.
    pub fn validate(&self) -> Result<()> {
        if self.pole_pairs < 1 {
            return Err(Error::InvalidConfig("motor.pole_pairs: must be >= 1".into()));
        }
        let positive = [
            ("motor.psi_pm", self.psi_pm),
            ("motor.ld_fund", self.ld_fund),
            ("motor.lq_fund", self.lq_fund),
            ("motor.rs", self.rs),
            ("motor.i_max", self.i_max),
            ("motor.rated_power", self.rated_power),
            ("motor.iron_hyst_coeff", self.iron_hyst_coeff),
            ("motor.iron_eddy_coeff", self.iron_eddy_coeff),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name}: must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Frequency-dependent harmonic loss parameters: per-frequency inductances,
/// equivalent loss resistances and the fitted scaling factors, together
/// with the evaluation band bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicParameterTables {
    /// Strictly increasing frequency samples (Hz).
    pub grid: Vec<f64>,
    /// d-axis harmonic inductance per grid point (H).
    pub ld_h: Vec<f64>,
    /// q-axis harmonic inductance per grid point (H).
    pub lq_h: Vec<f64>,
    /// Equivalent copper loss resistance per grid point (Ω).
    pub rcu_h: Vec<f64>,
    /// Equivalent iron loss resistance per grid point (Ω).
    pub riron_h: Vec<f64>,
    /// Equivalent magnet loss resistance per grid point (Ω).
    pub rmag_h: Vec<f64>,
    /// Copper loss scaling factor (dimensionless).
    pub k_cu: f64,
    /// Iron loss scaling factor (dimensionless).
    pub k_iron: f64,
    /// Magnet loss scaling factor (dimensionless).
    pub k_mag: f64,
    /// Lower bound of the evaluated harmonic band (Hz).
    pub f_min: f64,
    /// Upper bound of the evaluated harmonic band (Hz).
    pub f_max: f64,
}

impl HarmonicParameterTables {
    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if n < 2 {
            return Err(Error::InvalidConfig(
                "harmonic_tables.grid: needs at least 2 samples".into(),
            ));
        }
        for w in self.grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidConfig(
                    "harmonic_tables.grid: must be strictly increasing".into(),
                ));
            }
        }
        for (name, col) in [
            ("ld_h", &self.ld_h),
            ("lq_h", &self.lq_h),
            ("rcu_h", &self.rcu_h),
            ("riron_h", &self.riron_h),
            ("rmag_h", &self.rmag_h),
        ] {
            if col.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "harmonic_tables.{name}: length {} does not match grid length {n}",
                    col.len()
                )));
            }
            if col.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::InvalidConfig(format!(
                    "harmonic_tables.{name}: all entries must be > 0"
                )));
            }
        }
        for (name, v) in [("k_cu", self.k_cu), ("k_iron", self.k_iron), ("k_mag", self.k_mag)] {
            if !(v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "harmonic_tables.{name}: must be >= 0, got {v}"
                )));
            }
        }
        if !(self.f_min < self.f_max) {
            return Err(Error::InvalidConfig(
                "harmonic_tables: f_min must be < f_max".into(),
            ));
        }
        if self.f_min < self.grid[0] || self.f_max > self.grid[n - 1] {
            return Err(Error::InvalidConfig(format!(
                "harmonic_tables.grid: [{}, {}] Hz does not cover the band [{}, {}] Hz",
                self.grid[0],
                self.grid[n - 1],
                self.f_min,
                self.f_max
            )));
        }
        Ok(())
    }

    fn interp(&self, column: &[f64], f_hz: f64) -> Result<f64> {
        let grid = &self.grid;
        let n = grid.len();
        if f_hz < grid[0] || f_hz > grid[n - 1] {
            return Err(Error::BandOutsideTables {
                f_hz,
                grid_min: grid[0],
                grid_max: grid[n - 1],
            });
        }
        // partition_point gives the first index with grid[i] > f_hz
        let hi = grid.partition_point(|&g| g <= f_hz);
        if hi == 0 {
            return Ok(column[0]);
        }
        if hi == n {
            return Ok(column[n - 1]);
        }
        let lo = hi - 1;
        if f_hz == grid[lo] {
            return Ok(column[lo]);
        }
        let w = (f_hz - grid[lo]) / (grid[hi] - grid[lo]);
        Ok(column[lo] + w * (column[hi] - column[lo]))
    }

    /// d-axis harmonic inductance at `f_hz`, linearly interpolated.
    pub fn ld_at(&self, f_hz: f64) -> Result<f64> {
        self.interp(&self.ld_h, f_hz)
    }

    /// q-axis harmonic inductance at `f_hz`, linearly interpolated.
    pub fn lq_at(&self, f_hz: f64) -> Result<f64> {
        self.interp(&self.lq_h, f_hz)
    }

    /// Equivalent copper loss resistance at `f_hz`.
    pub fn rcu_at(&self, f_hz: f64) -> Result<f64> {
        self.interp(&self.rcu_h, f_hz)
    }

    /// Equivalent iron loss resistance at `f_hz`.
    pub fn riron_at(&self, f_hz: f64) -> Result<f64> {
        self.interp(&self.riron_h, f_hz)
    }

    /// Equivalent magnet loss resistance at `f_hz`.
    pub fn rmag_at(&self, f_hz: f64) -> Result<f64> {
        self.interp(&self.rmag_h, f_hz)
    }
}

/// One shaft operating point: torque demand and mechanical speed.
///
/// Torque is positive for traction; regenerative points carry a negative
/// torque and are evaluated through the i_q sign symmetry of the machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Shaft torque (N·m).
    pub torque: f64,
    /// Mechanical angular speed (rad/s), >= 0.
    pub speed: f64,
}

impl OperatingPoint {
    pub fn new(torque: f64, speed: f64) -> Self {
        Self { torque, speed }
    }
}

/// dq current vector, peak amplitudes (A).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqCurrents {
    pub d: f64,
    pub q: f64,
}

impl DqCurrents {
    pub fn new(d: f64, q: f64) -> Self {
        Self { d, q }
    }

    /// Current vector magnitude, equal to the peak phase current.
    pub fn magnitude(&self) -> f64 {
        self.d.hypot(self.q)
    }
}

/// dq voltage vector, peak amplitudes (V).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqVoltages {
    pub d: f64,
    pub q: f64,
}

impl DqVoltages {
    pub fn new(d: f64, q: f64) -> Self {
        Self { d, q }
    }

    pub fn magnitude(&self) -> f64 {
        self.d.hypot(self.q)
    }
}

/// Fundamental-frequency loss split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalLosses {
    /// Ohmic stator loss (W).
    pub copper: f64,
    /// Hysteresis + eddy iron loss (W).
    pub iron: f64,
}

// ──────────────────────────────────────────────────────────────────────────
// Operations
// ──────────────────────────────────────────────────────────────────────────

/// Electrical fundamental frequency of an operating point (Hz).
pub fn electrical_frequency(op: OperatingPoint, pole_pairs: u32) -> f64 {
    op.speed * f64::from(pole_pairs) / (2.0 * PI)
}

/// Shaft torque produced by a dq current vector:
/// T = 3/2 · p · (ψ_pm·i_q + (L_d − L_q)·i_d·i_q).
pub fn torque_from_currents(m: &MotorParameters, i: DqCurrents) -> f64 {
    if i.magnitude() > m.i_max {
        log::warn!(
            "current magnitude {:.1} A exceeds i_max {:.1} A",
            i.magnitude(),
            m.i_max
        );
    }
    1.5 * f64::from(m.pole_pairs) * (m.psi_pm * i.q + (m.ld_fund - m.lq_fund) * i.d * i.q)
}

/// Steady-state dq voltages at electrical frequency `f_e`:
/// u_d = R_s·i_d − ω·L_q·i_q, u_q = R_s·i_q + ω·(L_d·i_d + ψ_pm).
pub fn steady_state_voltages(m: &MotorParameters, i: DqCurrents, f_e: f64) -> DqVoltages {
    let w = 2.0 * PI * f_e;
    DqVoltages {
        d: m.rs * i.d - w * m.lq_fund * i.q,
        q: m.rs * i.q + w * (m.ld_fund * i.d + m.psi_pm),
    }
}

/// Fundamental copper and iron losses of a dq current setpoint.
///
/// Copper: 3/2·R_s·|i|². Iron: (c_hyst·f_e + c_eddy·f_e²)·ψ_tot² with
/// ψ_tot² = (L_d·i_d + ψ_pm)² + (L_q·i_q)².
pub fn fundamental_losses(m: &MotorParameters, i: DqCurrents, f_e: f64) -> FundamentalLosses {
    let copper = 1.5 * m.rs * (i.d * i.d + i.q * i.q);
    let psi_d = m.ld_fund * i.d + m.psi_pm;
    let psi_q = m.lq_fund * i.q;
    let psi_sq = psi_d * psi_d + psi_q * psi_q;
    let iron = (m.iron_hyst_coeff * f_e + m.iron_eddy_coeff * f_e * f_e) * psi_sq;
    FundamentalLosses { copper, iron }
}

/// Current amplitude on the constant-torque locus at current angle `gamma`
/// (i_d = −I·sin γ, i_q = I·cos γ), or `None` when the torque is not
/// reachable at that angle.
fn amplitude_for_angle(m: &MotorParameters, torque_abs: f64, gamma: f64) -> Option<f64> {
    let t_norm = torque_abs / (1.5 * f64::from(m.pole_pairs));
    let (sin_g, cos_g) = gamma.sin_cos();
    if cos_g <= 0.0 {
        return None;
    }
    // t_norm = psi·I·cos + (lq − ld)·I²·sin·cos, solved for I >= 0 with
    // the cancellation-free conjugate root form
    let a = (m.lq_fund - m.ld_fund) * sin_g * cos_g;
    let b = m.psi_pm * cos_g;
    let disc = b * b + 4.0 * a * t_norm;
    if disc < 0.0 {
        return None;
    }
    let denom = b + disc.sqrt();
    if denom <= 0.0 {
        return None;
    }
    let i = 2.0 * t_norm / denom;
    if i.is_finite() && i >= 0.0 {
        Some(i)
    } else {
        None
    }
}

/// q-axis current on the constant-torque hyperbola for a given i_d.
fn iq_on_torque_locus(m: &MotorParameters, torque_abs: f64, id: f64) -> Option<f64> {
    let t_norm = torque_abs / (1.5 * f64::from(m.pole_pairs));
    if t_norm == 0.0 {
        return Some(0.0);
    }
    let denom = m.psi_pm + (m.ld_fund - m.lq_fund) * id;
    if denom.abs() < 1e-30 {
        return None;
    }
    let iq = t_norm / denom;
    if iq > 0.0 {
        Some(iq)
    } else {
        None
    }
}

/// Minimum-current (MTPA) dq setpoint for a torque request.
///
/// Solved by a coarse scan plus golden-section refinement of the current
/// amplitude over the current angle; negative torque maps through the
/// i_q sign symmetry.
pub fn mtpa_currents(m: &MotorParameters, torque: f64) -> Result<DqCurrents> {
    if torque == 0.0 {
        return Ok(DqCurrents::new(0.0, 0.0));
    }
    let torque_abs = torque.abs();

    // No saliency: the amplitude is minimised at gamma = 0 analytically.
    if m.ld_fund == m.lq_fund {
        let iq = torque_abs / (1.5 * f64::from(m.pole_pairs) * m.psi_pm);
        if iq > m.i_max {
            return Err(Error::Infeasible(format!(
                "torque {torque:.1} N·m needs {iq:.1} A, above i_max {:.1} A",
                m.i_max
            )));
        }
        return Ok(DqCurrents::new(0.0, torque.signum() * iq));
    }

    let eval = |gamma: f64| amplitude_for_angle(m, torque_abs, gamma).unwrap_or(f64::INFINITY);

    // Coarse scan over (−π/2, π/2) to bracket the minimum, then refine.
    let scan = 181;
    let lo_edge = -0.5 * PI + 1e-6;
    let hi_edge = 0.5 * PI - 1e-6;
    let mut best_k = 0;
    let mut best_v = f64::INFINITY;
    for k in 0..scan {
        let g = lo_edge + (hi_edge - lo_edge) * k as f64 / (scan - 1) as f64;
        let v = eval(g);
        if v < best_v {
            best_v = v;
            best_k = k;
        }
    }
    if !best_v.is_finite() {
        return Err(Error::Infeasible(format!(
            "torque {torque:.1} N·m unreachable at any current angle"
        )));
    }
    let step = (hi_edge - lo_edge) / (scan - 1) as f64;
    let mut a = (lo_edge + (best_k as f64 - 1.0) * step).max(lo_edge);
    let mut b = (lo_edge + (best_k as f64 + 1.0) * step).min(hi_edge);

    // Golden-section search on the bracketed interval.
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while b - a > MTPA_ANGLE_TOL {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2);
        }
    }
    let gamma = 0.5 * (a + b);
    let amp = eval(gamma);
    if amp > m.i_max {
        return Err(Error::Infeasible(format!(
            "torque {torque:.1} N·m needs {amp:.1} A, above i_max {:.1} A",
            m.i_max
        )));
    }
    let (sin_g, cos_g) = gamma.sin_cos();
    Ok(DqCurrents::new(
        -amp * sin_g,
        torque.signum() * amp * cos_g,
    ))
}

/// Voltage magnitude on the torque locus at a given i_d, or +inf when the
/// locus does not exist there.
fn voltage_on_locus(m: &MotorParameters, torque_abs: f64, id: f64, f_e: f64) -> f64 {
    match iq_on_torque_locus(m, torque_abs, id) {
        Some(iq) => steady_state_voltages(m, DqCurrents::new(id, iq), f_e).magnitude(),
        None => f64::INFINITY,
    }
}

/// Current magnitude on the torque locus at a given i_d.
fn current_on_locus(m: &MotorParameters, torque_abs: f64, id: f64) -> f64 {
    match iq_on_torque_locus(m, torque_abs, id) {
        Some(iq) => id.hypot(iq),
        None => f64::INFINITY,
    }
}

/// Current setpoint meeting `torque` at electrical frequency `f_e` while
/// keeping the steady-state voltage magnitude within `v_limit`.
///
/// Prefers the MTPA point; when that exceeds the voltage limit, i_d is
/// pushed negative along the constant-torque locus by bisection until the
/// limit is met. Returns `Infeasible` when no point inside the current
/// disk satisfies both constraints — this is what shrinks the reachable
/// envelope of reduced-voltage modes.
pub fn field_weakening_currents(
    m: &MotorParameters,
    torque: f64,
    f_e: f64,
    v_limit: f64,
) -> Result<DqCurrents> {
    let torque_abs = torque.abs();
    let sign = if torque < 0.0 { -1.0 } else { 1.0 };

    let mtpa = mtpa_currents(m, torque_abs)?;
    if steady_state_voltages(m, mtpa, f_e).magnitude() <= v_limit {
        return Ok(DqCurrents::new(mtpa.d, sign * mtpa.q));
    }

    // Most negative i_d still inside the current disk: |i(i_d)| grows
    // monotonically as i_d moves away from the MTPA point.
    let id_mtpa = mtpa.d;
    let mut lo = -m.i_max;
    let mut hi = id_mtpa;
    if current_on_locus(m, torque_abs, lo) <= m.i_max {
        // whole locus down to −i_max stays inside the disk
    } else {
        while hi - lo > FW_CURRENT_TOL {
            let mid = 0.5 * (lo + hi);
            if current_on_locus(m, torque_abs, mid) <= m.i_max {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let id_floor = hi;

    // Voltage minimum over [id_floor, id_mtpa] by golden section.
    let volt = |id: f64| voltage_on_locus(m, torque_abs, id, f_e);
    let (mut a, mut b) = (id_floor, id_mtpa);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = volt(x1);
    let mut f2 = volt(x2);
    while b - a > FW_CURRENT_TOL {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = volt(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = volt(x2);
        }
    }
    let id_vmin = 0.5 * (a + b);
    let v_floor = volt(id_vmin).min(volt(id_floor));
    if v_floor > v_limit {
        return Err(Error::Infeasible(format!(
            "torque {torque:.1} N·m at f_e {f_e:.1} Hz needs at least {v_floor:.1} V, limit {v_limit:.1} V"
        )));
    }

    // Voltage decreases from the MTPA point towards id_vmin; bisect for
    // the crossing |u| = v_limit.
    let (mut lo, mut hi) = if volt(id_vmin) <= v_limit {
        (id_vmin, id_mtpa)
    } else {
        (id_floor, id_mtpa)
    };
    while hi - lo > FW_CURRENT_TOL {
        let mid = 0.5 * (lo + hi);
        if volt(mid) <= v_limit {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let id = lo;
    let iq = iq_on_torque_locus(m, torque_abs, id).ok_or_else(|| {
        Error::Infeasible(format!("torque locus vanished at i_d = {id:.1} A"))
    })?;
    let i = DqCurrents::new(id, sign * iq);
    if i.magnitude() > m.i_max * (1.0 + 1e-9) {
        return Err(Error::Infeasible(format!(
            "field weakening solution {:.1} A exceeds i_max {:.1} A",
            i.magnitude(),
            m.i_max
        )));
    }
    Ok(i)
}

// ──────────────────────────────────────────────────────────────────────────
// Tests
// ──────────────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;

    fn test_motor() -> MotorParameters {
        MotorParameters {
            pole_pairs: 4,
            psi_pm: 0.09,
            ld_fund: 110e-6,
            lq_fund: 220e-6,
            rs: 5e-3,
            i_max: 700.0,
            rated_power: 300e3,
            iron_hyst_coeff: 120.0,
            iron_eddy_coeff: 0.5,
        }
    }

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // -- electrical frequency ----------------------------------------------

    #[test]
    fn frequency_zero_speed() {
        assert_eq!(electrical_frequency(OperatingPoint::new(0.0, 0.0), 4), 0.0);
    }

    #[test]
    fn frequency_identity() {
        let f = electrical_frequency(OperatingPoint::new(0.0, 2.0 * PI * 50.0), 1);
        assert!(approx(f, 50.0, 1e-12), "f = {f}");
    }

    #[test]
    fn frequency_hand_value() {
        let f = electrical_frequency(OperatingPoint::new(0.0, 314.159_265_358_979_3), 4);
        assert!(approx(f, 200.0, 1e-9), "f = {f}");
    }

    // -- torque --------------------------------------------------------------

    #[test]
    fn torque_zero_q_current() {
        let m = test_motor();
        assert_eq!(torque_from_currents(&m, DqCurrents::new(-100.0, 0.0)), 0.0);
    }

    #[test]
    fn torque_hand_value_no_saliency() {
        let mut m = test_motor();
        m.ld_fund = 100e-6;
        m.lq_fund = 100e-6;
        m.psi_pm = 0.1;
        let t = torque_from_currents(&m, DqCurrents::new(-50.0, 100.0));
        assert!(approx(t, 60.0, 1e-9), "T = {t}");
    }

    #[test]
    fn torque_odd_in_iq() {
        let mut m = test_motor();
        m.lq_fund = m.ld_fund;
        let t1 = torque_from_currents(&m, DqCurrents::new(-30.0, 80.0));
        let t2 = torque_from_currents(&m, DqCurrents::new(-30.0, -80.0));
        assert!(approx(t1, -t2, 1e-12));
    }

    // -- steady-state voltages ------------------------------------------------

    #[test]
    fn voltages_all_zero() {
        let m = test_motor();
        let u = steady_state_voltages(&m, DqCurrents::new(0.0, 0.0), 0.0);
        assert_eq!(u.d, 0.0);
        // u_q = ω·ψ = 0 at f_e = 0
        assert_eq!(u.q, 0.0);
    }

    #[test]
    fn voltages_resistive_at_standstill() {
        let m = test_motor();
        let u = steady_state_voltages(&m, DqCurrents::new(-40.0, 120.0), 0.0);
        assert!(approx(u.d, m.rs * -40.0, 1e-12));
        assert!(approx(u.q, m.rs * 120.0, 1e-12));
    }

    #[test]
    fn voltages_hand_value() {
        let mut m = test_motor();
        m.rs = 0.01;
        m.ld_fund = 100e-6;
        m.lq_fund = 100e-6;
        m.psi_pm = 0.05;
        let u = steady_state_voltages(&m, DqCurrents::new(0.0, 100.0), 200.0);
        assert!(approx(u.d, -12.566, 1e-3), "u_d = {}", u.d);
        assert!(approx(u.q, 63.832, 1e-3), "u_q = {}", u.q);
    }

    // -- fundamental losses ----------------------------------------------------

    #[test]
    fn losses_zero_at_rest() {
        let m = test_motor();
        let l = fundamental_losses(&m, DqCurrents::new(0.0, 0.0), 0.0);
        assert_eq!(l.copper, 0.0);
        assert_eq!(l.iron, 0.0);
    }

    #[test]
    fn copper_hand_value() {
        let mut m = test_motor();
        m.rs = 0.01;
        let l = fundamental_losses(&m, DqCurrents::new(0.0, 100.0), 0.0);
        assert!(approx(l.copper, 150.0, 1e-9), "copper = {}", l.copper);
    }

    #[test]
    fn copper_quadratic_scaling() {
        let m = test_motor();
        let i = DqCurrents::new(-60.0, 150.0);
        let i2 = DqCurrents::new(-120.0, 300.0);
        let l1 = fundamental_losses(&m, i, 100.0).copper;
        let l2 = fundamental_losses(&m, i2, 100.0).copper;
        assert!(approx(l2, 4.0 * l1, 1e-9 * l2.abs()));
    }

    // -- MTPA -------------------------------------------------------------------

    #[test]
    fn mtpa_zero_torque() {
        let m = test_motor();
        let i = mtpa_currents(&m, 0.0).unwrap();
        assert_eq!(i.d, 0.0);
        assert_eq!(i.q, 0.0);
    }

    #[test]
    fn mtpa_no_saliency_zero_id() {
        let mut m = test_motor();
        m.lq_fund = m.ld_fund;
        for t in [10.0, 55.0, 120.0] {
            let i = mtpa_currents(&m, t).unwrap();
            assert_eq!(i.d, 0.0, "torque {t}");
            let back = torque_from_currents(&m, i);
            assert!(approx(back, t, 1e-3 * t));
        }
    }

    /// Brute-force angle sweep at 0.01° steps as the independent oracle.
    fn mtpa_brute_force(m: &MotorParameters, torque: f64) -> f64 {
        let step = 0.01_f64.to_radians();
        let mut best = f64::INFINITY;
        let mut g = -0.5 * PI + step;
        while g < 0.5 * PI {
            if let Some(amp) = amplitude_for_angle(m, torque.abs(), g) {
                if amp <= m.i_max && amp < best {
                    best = amp;
                }
            }
            g += step;
        }
        best
    }

    #[test]
    fn mtpa_matches_brute_force_sweep() {
        let m = test_motor();
        for t in [20.0, 80.0, 150.0, 260.0, 371.5] {
            let i = mtpa_currents(&m, t).unwrap();
            assert!(i.d < 0.0, "salient machine picks negative i_d (torque {t})");
            let oracle = mtpa_brute_force(&m, t);
            let rel = (i.magnitude() - oracle).abs() / oracle;
            assert!(rel < 1e-3, "torque {t}: {} vs oracle {oracle}", i.magnitude());
            // the search never beats the oracle by more than its resolution
            assert!(i.magnitude() <= oracle * (1.0 + 1e-3));
        }
    }

    #[test]
    fn mtpa_reproduces_requested_torque() {
        let m = test_motor();
        for t in [-200.0, -35.0, 12.5, 90.0, 333.0] {
            let i = mtpa_currents(&m, t).unwrap();
            let back = torque_from_currents(&m, i);
            assert!(
                (back - t).abs() <= 1e-3 * t.abs(),
                "torque {t} -> {back}"
            );
        }
    }

    #[test]
    fn mtpa_infeasible_above_current_limit() {
        let m = test_motor();
        assert!(matches!(mtpa_currents(&m, 5000.0), Err(Error::Infeasible(_))));
    }

    // -- field weakening -----------------------------------------------------

    #[test]
    fn fw_inactive_limit_returns_mtpa() {
        let m = test_motor();
        let i_fw = field_weakening_currents(&m, 100.0, 100.0, 1e6).unwrap();
        let i_mtpa = mtpa_currents(&m, 100.0).unwrap();
        assert!(approx(i_fw.d, i_mtpa.d, 1e-6));
        assert!(approx(i_fw.q, i_mtpa.q, 1e-6));
    }

    #[test]
    fn fw_zero_limit_infeasible() {
        let m = test_motor();
        assert!(matches!(
            field_weakening_currents(&m, 50.0, 300.0, 0.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn fw_solution_sits_on_voltage_limit() {
        let m = test_motor();
        let f_e = 600.0;
        let v_limit = 250.0;
        let i = field_weakening_currents(&m, 150.0, f_e, v_limit).unwrap();
        let u = steady_state_voltages(&m, i, f_e).magnitude();
        assert!(u <= v_limit + 1e-3, "u = {u}");
        assert!(u >= v_limit - 0.5, "solution should be near the limit, u = {u}");
        let t = torque_from_currents(&m, i);
        assert!(approx(t, 150.0, 0.15), "torque {t}");
        // deeper field weakening than MTPA
        let mtpa = mtpa_currents(&m, 150.0).unwrap();
        assert!(i.d < mtpa.d);
    }

    #[test]
    fn fw_feasibility_monotone_in_voltage_limit() {
        let m = test_motor();
        let f_e = 800.0;
        for t in [40.0, 120.0, 240.0] {
            let mut prev_feasible = false;
            for v in (100..=500).step_by(25) {
                let feasible = field_weakening_currents(&m, t, f_e, f64::from(v)).is_ok();
                assert!(
                    !prev_feasible || feasible,
                    "feasible at lower limit but not at higher (t={t}, v={v})"
                );
                prev_feasible = feasible;
            }
        }
    }

    /// Dense (i_d, i_q) grid oracle for the feasible-torque envelope.
    fn max_feasible_torque_grid(m: &MotorParameters, f_e: f64, v_limit: f64) -> f64 {
        let n = 600;
        let mut best: f64 = 0.0;
        for a in 0..=n {
            let id = -m.i_max + 2.0 * m.i_max * a as f64 / n as f64;
            for b in 0..=n {
                let iq = m.i_max * b as f64 / n as f64;
                let i = DqCurrents::new(id, iq);
                if i.magnitude() > m.i_max {
                    continue;
                }
                if steady_state_voltages(m, i, f_e).magnitude() > v_limit {
                    continue;
                }
                best = best.max(1.5 * f64::from(m.pole_pairs)
                    * (m.psi_pm * iq + (m.ld_fund - m.lq_fund) * id * iq));
            }
        }
        best
    }

    #[test]
    fn fw_envelope_matches_grid_oracle() {
        let m = test_motor();
        for (f_e, v_full, v_reduced) in [(700.0, 460.0, 300.0), (500.0, 460.0, 250.0)] {
            for v_limit in [v_full, v_reduced] {
                let t_env = max_feasible_torque_grid(&m, f_e, v_limit);
                assert!(t_env > 0.0);
                let below = 0.97 * t_env;
                let above = 1.03 * t_env;
                assert!(
                    field_weakening_currents(&m, below, f_e, v_limit).is_ok(),
                    "expected feasible at {below:.1} N·m (env {t_env:.1}, f_e {f_e}, v {v_limit})"
                );
                assert!(
                    field_weakening_currents(&m, above, f_e, v_limit).is_err(),
                    "expected infeasible at {above:.1} N·m (env {t_env:.1}, f_e {f_e}, v {v_limit})"
                );
            }
            // reduced limit shrinks the envelope
            let env_full = max_feasible_torque_grid(&m, f_e, v_full);
            let env_red = max_feasible_torque_grid(&m, f_e, v_reduced);
            assert!(env_red < env_full);
        }
    }

    #[test]
    fn fw_regenerative_torque_symmetry() {
        let m = test_motor();
        let pos = field_weakening_currents(&m, 120.0, 600.0, 280.0).unwrap();
        let neg = field_weakening_currents(&m, -120.0, 600.0, 280.0).unwrap();
        assert!(approx(pos.d, neg.d, 1e-9));
        assert!(approx(pos.q, -neg.q, 1e-9));
    }

    // -- parameter tables ------------------------------------------------------

    #[test]
    fn table_interpolation_endpoints_and_midpoint() {
        let t = HarmonicParameterTables {
            grid: vec![1000.0, 2000.0, 4000.0],
            ld_h: vec![100e-6, 90e-6, 80e-6],
            lq_h: vec![200e-6, 180e-6, 160e-6],
            rcu_h: vec![0.01, 0.02, 0.04],
            riron_h: vec![100.0, 200.0, 400.0],
            rmag_h: vec![500.0, 400.0, 300.0],
            k_cu: 1.0,
            k_iron: 1.0,
            k_mag: 1.0,
            f_min: 1000.0,
            f_max: 4000.0,
        };
        t.validate().unwrap();
        assert_eq!(t.rcu_at(1000.0).unwrap(), 0.01);
        assert_eq!(t.rcu_at(4000.0).unwrap(), 0.04);
        assert!(approx(t.rcu_at(1500.0).unwrap(), 0.015, 1e-15));
        assert!(approx(t.riron_at(3000.0).unwrap(), 300.0, 1e-12));
        assert!(matches!(
            t.rcu_at(999.0),
            Err(Error::BandOutsideTables { .. })
        ));
        assert!(matches!(
            t.rcu_at(4001.0),
            Err(Error::BandOutsideTables { .. })
        ));
    }

    #[test]
    fn invalid_parameters_rejected() {
        let mut m = test_motor();
        m.rs = 0.0;
        assert!(m.validate().is_err());
        let mut m = test_motor();
        m.pole_pairs = 0;
        assert!(m.validate().is_err());
    }
}
