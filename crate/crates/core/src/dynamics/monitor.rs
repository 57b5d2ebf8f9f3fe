use serde::Serialize;

use super::model::{HypergraphModel, Region};

/// Slack allowed before an invariant-set excursion counts as a violation.
pub const INVARIANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantSet {
    PositiveOrthant,
    UnitBox,
    AboveShift(Vec<f64>),
    /// `{x >= x*}` for a target equilibrium, monitored when the run starts there.
    AboveTarget(Vec<f64>),
}

impl InvariantSet {
    /// Largest distance by which `x` leaves the set (0 inside).
    pub fn excursion(&self, x: &[f64]) -> f64 {
        let below = |lo: &[f64]| x.iter().zip(lo).map(|(v, l)| l - v).fold(0.0f64, f64::max);
        match self {
            InvariantSet::PositiveOrthant => x.iter().map(|v| -v).fold(0.0f64, f64::max),
            InvariantSet::UnitBox => x.iter().map(|&v| (-v).max(v - 1.0)).fold(0.0f64, f64::max),
            InvariantSet::AboveShift(a) => below(a),
            InvariantSet::AboveTarget(t) => below(t),
        }
    }

    pub fn holds(&self, x: &[f64]) -> bool {
        self.excursion(x) <= INVARIANT_TOL
    }
}

/// Invariant sets that apply to a run of `model` from `x0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantMonitor {
    pub sets: Vec<InvariantSet>,
}

impl InvariantMonitor {
    pub fn flags(&self, x: &[f64]) -> Vec<bool> {
        self.sets.iter().map(|s| s.holds(x)).collect()
    }
}

/// Positive orthant for plain and logistic models, `[0,1]^n` for SIS,
/// `{x >= a}` for shifted models, plus `{x >= x*}` when a target is given and
/// `x0` already dominates it.
pub fn invariant_monitor(model: &HypergraphModel, x0: &[f64], target: Option<&[f64]>) -> InvariantMonitor {
    let mut sets = vec![match model.region() {
        Region::PositiveOrthant => InvariantSet::PositiveOrthant,
        Region::UnitBox => InvariantSet::UnitBox,
        Region::AboveShift(a) => InvariantSet::AboveShift(a),
    }];
    if let Some(t) = target {
        if x0.iter().zip(t).all(|(a, b)| a >= b) {
            sets.push(InvariantSet::AboveTarget(t.to_vec()));
        }
    }
    InvariantMonitor { sets }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovSample {
    pub t: f64,
    /// `max_i (x_i / delta_i)^{k-1}`
    pub v_max: f64,
    /// `min_i (x_i / delta_i)^{k-1}`
    pub nu_min: f64,
}

pub fn lyapunov_values(x: &[f64], delta: &[f64], order: usize) -> (f64, f64) {
    let p = (order - 1) as i32;
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (v, d) in x.iter().zip(delta) {
        let r = v / d;
        hi = hi.max(r);
        lo = lo.min(r);
    }
    (hi.powi(p), lo.powi(p))
}

/// Samples `V_max` and `nu_min` along a stored trajectory.
pub fn lyapunov_trace(times: &[f64], states: &[Vec<f64>], delta: &[f64], order: usize) -> Vec<LyapunovSample> {
    times
        .iter()
        .zip(states)
        .map(|(&t, x)| {
            let (v_max, nu_min) = lyapunov_values(x, delta, order);
            LyapunovSample { t, v_max, nu_min }
        })
        .collect()
}
