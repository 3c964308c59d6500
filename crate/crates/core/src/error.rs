//! Error types shared across the simulation pipeline.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The requested operating point cannot be reached within the current
    /// and voltage limits.
    #[error("infeasible operating point: {0}")]
    Infeasible(String),

    /// Commanded fundamental voltage exceeds the linear modulation range.
    #[error("overmodulation: |u_ref| = {requested:.3} V exceeds the linear limit {limit:.3} V")]
    Overmodulation { requested: f64, limit: f64 },

    /// A configuration value violates an invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// No FFT bin falls inside the requested evaluation band.
    #[error("no spectral bin inside the band [{f_min:.1}, {f_max:.1}] Hz")]
    BandEmpty { f_min: f64, f_max: f64 },

    /// A spectral bin frequency lies outside the harmonic parameter grid.
    #[error("bin at {f_hz:.1} Hz outside the parameter table grid [{grid_min:.1}, {grid_max:.1}] Hz")]
    BandOutsideTables {
        f_hz: f64,
        grid_min: f64,
        grid_max: f64,
    },

    /// Buck converter output must not exceed its input.
    #[error("invalid conversion ratio: v_out = {v_out:.1} V > v_in = {v_in:.1} V")]
    InvalidRatio { v_in: f64, v_out: f64 },

    /// No configured mode can serve the operating point.
    #[error("no feasible mode at torque {torque:.1} N·m, speed {speed:.1} rad/s")]
    NoFeasibleMode { torque: f64, speed: f64 },

    /// Drive-cycle timestamps must be strictly increasing.
    #[error("line {line}: cycle time not strictly increasing")]
    NonMonotonicTime { line: usize },

    /// Drive-cycle speeds must be non-negative.
    #[error("line {line}: negative speed")]
    NegativeSpeed { line: usize },

    /// A drive-cycle CSV row could not be parsed.
    #[error("line {line}: malformed row: {detail}")]
    MalformedRow { line: usize, detail: String },

    /// A drive-cycle sample has no feasible mode.
    #[error("infeasible cycle point at t = {t:.1} s (torque {torque:.1} N·m, speed {speed:.1} rad/s)")]
    InfeasiblePoint { t: f64, torque: f64, speed: f64 },
}
