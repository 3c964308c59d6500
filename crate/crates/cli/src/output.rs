//! File emission helpers: CSV builders and the human-readable report
//! table. All numeric formatting uses the shortest round-trip form, so
//! identical inputs always produce identical bytes.

use harmloss::cycle::CycleReport;
use harmloss::modulation::PhaseVoltageWaveform;
use harmloss::spectrum::HarmonicSpectrum;
use harmloss::strategy::{LossBreakdown, LossMap};

pub const LOSSMAP_HEADER: &str = "torque_Nm,speed_radps,mode,feasible,p_cu_f,p_fe_f,p_cu_h,p_fe_h,p_mag_h,p_inv_cond,p_inv_sw,p_dcdc,p_total";

fn loss_columns(b: &LossBreakdown) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        b.copper_fund,
        b.iron_fund,
        b.copper_harm,
        b.iron_harm,
        b.magnet_harm,
        b.inverter_conduction,
        b.inverter_switching,
        b.dcdc,
        b.total()
    )
}

pub fn lossmap_csv(map: &LossMap) -> String {
    let mut out = String::from(LOSSMAP_HEADER);
    out.push('\n');
    for p in &map.points {
        match &p.breakdown {
            Some(b) => out.push_str(&format!(
                "{},{},{},true,{}\n",
                p.torque,
                p.speed,
                map.kind.label(),
                loss_columns(b)
            )),
            None => out.push_str(&format!(
                "{},{},{},false,,,,,,,,,\n",
                p.torque,
                p.speed,
                map.kind.label()
            )),
        }
    }
    out
}

/// Per-point harmonic totals for several maps over the same lattice, with
/// ratios against the first mode.
pub fn compare_summary_csv(maps: &[LossMap]) -> String {
    let first = &maps[0];
    let mut header = String::from("torque_Nm,speed_radps");
    for m in maps {
        header.push_str(&format!(",p_harm_{}", m.kind.label()));
    }
    for m in &maps[1..] {
        header.push_str(&format!(",ratio_{}_vs_{}", m.kind.label(), first.kind.label()));
    }
    let mut out = header;
    out.push('\n');
    for i in 0..first.points.len() {
        let mut row = format!("{},{}", first.points[i].torque, first.points[i].speed);
        let harm: Vec<Option<f64>> = maps
            .iter()
            .map(|m| m.points[i].breakdown.map(|b| b.harmonic_total()))
            .collect();
        for h in &harm {
            match h {
                Some(v) => row.push_str(&format!(",{v}")),
                None => row.push(','),
            }
        }
        for h in &harm[1..] {
            match (h, &harm[0]) {
                (Some(v), Some(base)) if *base > 0.0 => row.push_str(&format!(",{}", v / base)),
                _ => row.push(','),
            }
        }
        row.push('\n');
        out.push_str(&row);
    }
    out
}

pub fn waveform_csv(w: &PhaseVoltageWaveform) -> String {
    let mut out = String::from("t_s,va_V,vb_V,vc_V\n");
    for s in 0..w.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s as f64 / w.sample_rate,
            w.windings[0][s],
            w.windings[1][s],
            w.windings[2][s]
        ));
    }
    out
}

pub fn spectrum_csv(spec: &HarmonicSpectrum) -> String {
    let mut out = String::from("f_hz,ud_V,uq_V\n");
    for b in &spec.bins {
        out.push_str(&format!("{},{},{}\n", b.f_hz, b.u_d, b.u_q));
    }
    out
}

pub fn report_long_csv(r: &CycleReport) -> String {
    let e = &r.energies_wh;
    let s = &r.edrive_shares_pct;
    let v = &r.vehicle_shares_pct;
    let mut out = String::from("category,energy_Wh,share_pct\n");
    let edrive_rows = [
        ("edrive.copper_fund", e.copper_fund, s.copper_fund),
        ("edrive.iron_fund", e.iron_fund, s.iron_fund),
        ("edrive.copper_harm", e.copper_harm, s.copper_harm),
        ("edrive.iron_harm", e.iron_harm, s.iron_harm),
        ("edrive.magnet_harm", e.magnet_harm, s.magnet_harm),
        (
            "edrive.inverter_conduction",
            e.inverter_conduction,
            s.inverter_conduction,
        ),
        (
            "edrive.inverter_switching",
            e.inverter_switching,
            s.inverter_switching,
        ),
        ("edrive.dcdc", e.dcdc, s.dcdc),
    ];
    let vehicle_rows = [
        ("vehicle.road_load", e.road_load, v.road_load),
        ("vehicle.driveline", e.driveline, v.driveline),
        ("vehicle.edrive", r.edrive_total_wh, v.edrive),
        ("vehicle.battery", e.battery, v.battery),
        ("vehicle.auxiliary", e.auxiliary, v.auxiliary),
    ];
    for (name, energy, share) in edrive_rows.iter().chain(vehicle_rows.iter()) {
        out.push_str(&format!("{name},{energy},{share}\n"));
    }
    out
}

pub fn report_text(r: &CycleReport) -> String {
    let e = &r.energies_wh;
    let s = &r.edrive_shares_pct;
    let v = &r.vehicle_shares_pct;
    let mut out = String::new();
    out.push_str(&format!(
        "cycle: {:.0} s, {:.2} km\n\n",
        r.duration_s,
        r.distance_m / 1000.0
    ));
    out.push_str("electric drive losses            energy_Wh   share_pct\n");
    let rows = [
        ("fundamental copper", e.copper_fund, s.copper_fund),
        ("fundamental iron", e.iron_fund, s.iron_fund),
        ("harmonic copper", e.copper_harm, s.copper_harm),
        ("harmonic iron", e.iron_harm, s.iron_harm),
        ("harmonic magnet", e.magnet_harm, s.magnet_harm),
        ("inverter conduction", e.inverter_conduction, s.inverter_conduction),
        ("inverter switching", e.inverter_switching, s.inverter_switching),
        ("dc/dc converter", e.dcdc, s.dcdc),
    ];
    for (name, energy, share) in rows {
        out.push_str(&format!("  {name:<30} {energy:>9.2}   {share:>8.2}\n"));
    }
    out.push_str(&format!(
        "  {:<30} {:>9.2}   {:>8.2}\n\n",
        "total", r.edrive_total_wh, s.sum()
    ));
    out.push_str("vehicle energy                   energy_Wh   share_pct\n");
    let rows = [
        ("road load", e.road_load, v.road_load),
        ("driveline", e.driveline, v.driveline),
        ("electric drive", r.edrive_total_wh, v.edrive),
        ("battery", e.battery, v.battery),
        ("auxiliary", e.auxiliary, v.auxiliary),
    ];
    for (name, energy, share) in rows {
        out.push_str(&format!("  {name:<30} {energy:>9.2}   {share:>8.2}\n"));
    }
    out.push_str(&format!(
        "  {:<30} {:>9.2}   {:>8.2}\n\n",
        "total",
        r.vehicle_total_wh,
        v.sum()
    ));
    out.push_str("mode time shares\n");
    for m in &r.mode_time_shares_pct {
        out.push_str(&format!("  {:<30} {:>8.2} %\n", m.mode, m.share_pct));
    }
    out
}
