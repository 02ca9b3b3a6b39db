//! Share of a satellite pass during which each rate series clears a threshold.

use sqcc_core::channels::{duty_cycle, key_window};

use crate::config::{Axis, ChannelKind, RunConfig};
use crate::sweep::run_sweep;
use crate::{fmt, CliError, Table};

/// Duty cycle of every rate column of the elevation sweep.
///
/// Columns: series, fraction, duration_h, window_start_deg, window_end_deg.
/// The window columns are empty when a series never clears the threshold.
pub fn run_duty_cycle(cfg: &RunConfig) -> Result<Table, CliError> {
    if cfg.channel.kind != ChannelKind::Satellite || cfg.sweep.axis != Axis::Elevation {
        return Err(CliError::Config(
            "duty-cycle needs channel.kind = \"satellite\" and sweep.axis = \"elevation\"".into(),
        ));
    }
    let sweep = run_sweep(cfg)?;
    let dc = &cfg.duty_cycle;
    let map = cfg.time_map()?;
    let elevations = sweep.numeric("elevation_deg").expect("sweep emits the axis column");
    let series: Vec<&String> = sweep
        .header
        .iter()
        .filter(|h| h.starts_with("key_rate_"))
        .collect();
    let mut rows = Vec::with_capacity(series.len());
    for name in series {
        let rates: Vec<(f64, f64)> = elevations
            .iter()
            .copied()
            .zip(sweep.numeric(name).expect("numeric rate column"))
            .collect();
        let d = duty_cycle(&rates, dc.threshold_bits_per_use, dc.window_hours, map)?;
        let (lo, hi) = key_window(&rates, dc.threshold_bits_per_use)
            .map_or((String::new(), String::new()), |(a, b)| (fmt(a), fmt(b)));
        rows.push(vec![
            name.trim_start_matches("key_rate_").to_owned(),
            fmt(d.fraction),
            fmt(d.duration),
            lo,
            hi,
        ]);
    }
    Ok(Table {
        header: ["series", "fraction", "duration_h", "window_start_deg", "window_end_deg"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}
