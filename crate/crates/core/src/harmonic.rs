//! Harmonic motor-loss evaluation on a banded voltage ripple spectrum.
//!
//! Copper losses follow the skin/proximity form
//!   P_cu,h  = k_cu  · Σ R_cu(f_h)/f_h² · (U_d,h²/L_d(f_h)² + U_q,h²/L_q(f_h)²),
//! iron losses the eddy-equivalent form
//!   P_fe,h  = k_iron · Σ (U_d,h² + U_q,h²) / R_iron(f_h),
//! and magnet losses the d-axis form
//!   P_mag,h = k_mag · Σ U_d,h² / R_mag(f_h).
//!
//! Table values are linearly interpolated in frequency; bins outside the
//! table grid are an error, never extrapolated.

use crate::error::Result;
use crate::powertrain::HarmonicParameterTables;
use crate::spectrum::HarmonicSpectrum;

/// Harmonic loss components (W).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HarmonicLossBreakdown {
    pub copper: f64,
    pub iron: f64,
    pub magnet: f64,
}

impl HarmonicLossBreakdown {
    pub fn total(&self) -> f64 {
        self.copper + self.iron + self.magnet
    }
}

/// Harmonic copper loss (W).
pub fn copper_harmonic(spec: &HarmonicSpectrum, t: &HarmonicParameterTables) -> Result<f64> {
    let mut sum = 0.0;
    for b in &spec.bins {
        let r = t.rcu_at(b.f_hz)?;
        let ld = t.ld_at(b.f_hz)?;
        let lq = t.lq_at(b.f_hz)?;
        sum += (r / (b.f_hz * b.f_hz))
            * (b.u_d * b.u_d / (ld * ld) + b.u_q * b.u_q / (lq * lq));
    }
    Ok(t.k_cu * sum)
}

/// Harmonic iron loss (W).
pub fn iron_harmonic(spec: &HarmonicSpectrum, t: &HarmonicParameterTables) -> Result<f64> {
    let mut sum = 0.0;
    for b in &spec.bins {
        sum += (b.u_d * b.u_d + b.u_q * b.u_q) / t.riron_at(b.f_hz)?;
    }
    Ok(t.k_iron * sum)
}

/// Harmonic magnet loss (W); driven by the d-axis ripple only.
pub fn magnet_harmonic(spec: &HarmonicSpectrum, t: &HarmonicParameterTables) -> Result<f64> {
    let mut sum = 0.0;
    for b in &spec.bins {
        sum += b.u_d * b.u_d / t.rmag_at(b.f_hz)?;
    }
    Ok(t.k_mag * sum)
}

/// All three harmonic components, packaged.
pub fn total_harmonic(
    spec: &HarmonicSpectrum,
    t: &HarmonicParameterTables,
) -> Result<HarmonicLossBreakdown> {
    Ok(HarmonicLossBreakdown {
        copper: copper_harmonic(spec, t)?,
        iron: iron_harmonic(spec, t)?,
        magnet: magnet_harmonic(spec, t)?,
    })
}
