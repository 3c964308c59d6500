//! Harmonic motor-loss simulation for battery-electric traction drives.
//!
//! The crate models the loss impact of the switching-frequency voltage
//! ripple that a traction inverter imposes on the machine windings, and
//! compares inverter/motor configurations that reduce it at partial load:
//! a plain two-level bridge, T-type three-level and generic five-level
//! bridges, a buck-fed two-level bridge with a dynamically lowered DC
//! link, and an open-winding machine that can switch between H-mode and
//! star (Y-mode) operation.
//!
//! Pipeline per operating point:
//!
//! 1. [`powertrain`] — dq current setpoints (MTPA / field weakening) and
//!    fundamental losses,
//! 2. [`modulation`] — switched winding-voltage waveform for the selected
//!    topology mode,
//! 3. [`spectrum`] — dq transformation and banded FFT ripple spectrum,
//! 4. [`harmonic`] — harmonic copper/iron/magnet losses from the spectrum,
//! 5. [`inverter`] — switching/conduction and DC/DC converter losses,
//! 6. [`strategy`] — feasibility, DC-link optimization and mode selection,
//! 7. [`cycle`] — drive-cycle aggregation into energies and shares.
//!
//! All computations are pure and deterministic; parallel map evaluation
//! never changes results.

// validators use `!(v > 0.0)` so NaN fails validation like any bad value
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod cycle;
pub mod error;
pub mod harmonic;
pub mod inverter;
pub mod modulation;
pub mod powertrain;
pub mod presets;
pub mod spectrum;
pub mod strategy;

pub use error::{Error, Result};
