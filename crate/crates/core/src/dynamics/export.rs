use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::simulate::{SimConfig, StepStats, Termination, Trajectory};
use crate::error::Result;

/// Writes `t,x_0,..,x_{n-1},V_max,nu_min`, one row per stored sample.
pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let n = traj.states.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|i| format!("x_{i}")));
    header.push("V_max".into());
    header.push("nu_min".into());
    w.write_record(&header)?;
    for ((t, x), m) in traj.times.iter().zip(&traj.states).zip(&traj.monitors) {
        let mut row = Vec::with_capacity(n + 3);
        row.push(t.to_string());
        row.extend(x.iter().map(f64::to_string));
        row.push(m.v_max.to_string());
        row.push(m.nu_min.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Summary stored next to a trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    /// Hex sha256 of the serialized model.
    pub model_hash: String,
    pub config: SimConfig,
    pub initial_state: Vec<f64>,
    pub termination: Termination,
    pub stats: StepStats,
    pub samples: usize,
    pub events: usize,
}

impl RunMetadata {
    pub fn new(model_bytes: &[u8], config: &SimConfig, traj: &Trajectory) -> Self {
        let model_hash = format!("{:x}", Sha256::digest(model_bytes));
        Self {
            model_hash,
            config: config.clone(),
            initial_state: traj.states.first().cloned().unwrap_or_default(),
            termination: traj.termination.clone(),
            stats: traj.stats.clone(),
            samples: traj.times.len(),
            events: traj.events.len(),
        }
    }
}
