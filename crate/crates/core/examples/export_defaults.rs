//! Writes the built-in synthetic 300 kW configuration and drive cycle to
//! a directory (default `data/`), as a starting point for custom setups.
//!
//! ```sh
//! cargo run --example export_defaults -- data
//! ```

use harmloss::config::RunConfig;
use harmloss::cycle::export_cycle;
use harmloss::presets;
use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir)?;

    let config = RunConfig::synthetic_default();
    let config_path = dir.join("config.json");
    std::fs::write(&config_path, config.to_json() + "\n")?;

    let cycle_path = dir.join("synthetic_cycle.csv");
    std::fs::write(&cycle_path, export_cycle(&presets::synthetic_cycle()))?;

    println!("wrote {}", config_path.display());
    println!("wrote {}", cycle_path.display());
    Ok(())
}
