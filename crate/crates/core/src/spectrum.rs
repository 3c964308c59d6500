//! dq-frame transformation of the switched winding voltages and FFT
//! extraction of the banded harmonic ripple components.
//!
//! Waveforms are synthesised over an integer number of fundamental
//! periods, so a rectangular window is coherent and the bin amplitudes
//! are exact. Amplitudes use the single-sided peak convention; the DC bin
//! (the removed fundamental) and the Nyquist bin are never part of the
//! retained band.

use crate::error::{Error, Result};
use crate::modulation::PhaseVoltageWaveform;
use crate::powertrain::{DqVoltages, HarmonicParameterTables};
use rustfft::{num_complex::Complex, FftPlanner};
use std::cell::RefCell;

const TWO_THIRDS: f64 = 2.0 / 3.0;
// sin/cos of the 2π/3 phase shifts, for the angle-addition forms
const SIN_2PI_3: f64 = 0.866_025_403_784_438_6;
const COS_2PI_3: f64 = -0.5;

thread_local! {
    // the planner caches twiddle tables per FFT size
    static FFT_PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[inline]
fn phase_trig(theta: f64) -> [(f64, f64); 3] {
    let (s0, c0) = theta.sin_cos();
    // θ ∓ 2π/3 by angle addition
    let s1 = s0 * COS_2PI_3 - c0 * SIN_2PI_3;
    let c1 = c0 * COS_2PI_3 + s0 * SIN_2PI_3;
    let s2 = s0 * COS_2PI_3 + c0 * SIN_2PI_3;
    let c2 = c0 * COS_2PI_3 - s0 * SIN_2PI_3;
    [(s0, c0), (s1, c1), (s2, c2)]
}

/// Inverse Park (amplitude-invariant): dq vector to instantaneous
/// three-phase values at electrical angle `theta`.
pub fn inverse_park_abc(d: f64, q: f64, theta: f64) -> [f64; 3] {
    let t = phase_trig(theta);
    [
        d * t[0].1 - q * t[0].0,
        d * t[1].1 - q * t[1].0,
        d * t[2].1 - q * t[2].0,
    ]
}

/// Forward Park (amplitude-invariant): three-phase values to the dq pair
/// at electrical angle `theta`. The zero-sequence component is discarded.
pub fn park_dq(a: f64, b: f64, c: f64, theta: f64) -> (f64, f64) {
    let t = phase_trig(theta);
    let d = TWO_THIRDS * (a * t[0].1 + b * t[1].1 + c * t[2].1);
    let q = -TWO_THIRDS * (a * t[0].0 + b * t[1].0 + c * t[2].0);
    (d, q)
}

/// dq voltage time series of a waveform.
#[derive(Debug, Clone)]
pub struct DqVoltageSeries {
    pub d: Vec<f64>,
    pub q: Vec<f64>,
    pub sample_rate: f64,
}

impl DqVoltageSeries {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

/// Transforms the winding voltages into the dq frame using the electrical
/// angle stored with each sample.
pub fn park_transform(waveform: &PhaseVoltageWaveform) -> DqVoltageSeries {
    let n = waveform.len();
    let mut d = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for s in 0..n {
        let (vd, vq) = park_dq(
            waveform.windings[0][s],
            waveform.windings[1][s],
            waveform.windings[2][s],
            waveform.theta_e[s],
        );
        d.push(vd);
        q.push(vq);
    }
    DqVoltageSeries {
        d,
        q,
        sample_rate: waveform.sample_rate,
    }
}

/// One retained spectral bin: frequency and single-sided peak amplitudes
/// of the d- and q-axis ripple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBin {
    pub f_hz: f64,
    pub u_d: f64,
    pub u_q: f64,
}

/// Banded harmonic voltage spectrum of the dq ripple.
#[derive(Debug, Clone)]
pub struct HarmonicSpectrum {
    /// Retained bins, frequencies strictly increasing.
    pub bins: Vec<SpectrumBin>,
    /// Requested evaluation band (Hz).
    pub band: (f64, f64),
    /// Frequency resolution of the underlying FFT (Hz).
    pub resolution: f64,
}

impl HarmonicSpectrum {
    /// Sum of the mean-square ripple carried by the retained bins
    /// (peak amplitudes, so each bin contributes amp²/2).
    pub fn mean_square(&self) -> f64 {
        self.bins
            .iter()
            .map(|b| 0.5 * (b.u_d * b.u_d + b.u_q * b.u_q))
            .sum()
    }

    /// Copy with every amplitude scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            bins: self
                .bins
                .iter()
                .map(|b| SpectrumBin {
                    f_hz: b.f_hz,
                    u_d: b.u_d * factor,
                    u_q: b.u_q * factor,
                })
                .collect(),
            band: self.band,
            resolution: self.resolution,
        }
    }
}

fn single_sided_amplitudes(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let fft = FFT_PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(&mut buf);
    // interior bins only: k = 1 .. n/2 (exclusive)
    (1..n.div_ceil(2))
        .map(|k| 2.0 * buf[k].norm() / n as f64)
        .collect()
}

/// Removes the commanded fundamental (a constant in the dq frame) from the
/// series, FFTs both axes over the rectangular window and retains the bins
/// inside the table band `[f_min, f_max]`.
pub fn ripple_spectrum(
    series: &DqVoltageSeries,
    u_ref: DqVoltages,
    tables: &HarmonicParameterTables,
) -> Result<HarmonicSpectrum> {
    let n = series.len();
    if n < 2 {
        return Err(Error::InvalidConfig(
            "ripple spectrum needs at least 2 samples".into(),
        ));
    }
    let ripple_d: Vec<f64> = series.d.iter().map(|&v| v - u_ref.d).collect();
    let ripple_q: Vec<f64> = series.q.iter().map(|&v| v - u_ref.q).collect();

    let amp_d = single_sided_amplitudes(&ripple_d);
    let amp_q = single_sided_amplitudes(&ripple_q);

    let resolution = series.sample_rate / n as f64;
    let mut bins = Vec::new();
    for (idx, (&ad, &aq)) in amp_d.iter().zip(amp_q.iter()).enumerate() {
        let f = (idx + 1) as f64 * resolution;
        if f >= tables.f_min && f <= tables.f_max {
            bins.push(SpectrumBin {
                f_hz: f,
                u_d: ad,
                u_q: aq,
            });
        }
    }
    if bins.is_empty() {
        return Err(Error::BandEmpty {
            f_min: tables.f_min,
            f_max: tables.f_max,
        });
    }
    Ok(HarmonicSpectrum {
        bins,
        band: (tables.f_min, tables.f_max),
        resolution,
    })
}
