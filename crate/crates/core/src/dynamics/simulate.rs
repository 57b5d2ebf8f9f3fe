//! Fixed-step RK4 integration with invariant-preserving step halving.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::model::{HypergraphModel, Region, Wrapper};
use super::monitor::{invariant_monitor, lyapunov_values, InvariantMonitor, INVARIANT_TOL};
use crate::error::{Error, Result};
use crate::spectral::{perron_metzler, PowerConfig};
use crate::stability::rate_estimate;
use crate::tensor::linf;

/// Maximum number of step halvings before a state is clamped to its region.
pub const MAX_HALVINGS: u32 = 40;
/// Sub-steps are halved until `h |J|_inf` is below this, inside the real
/// stability interval of RK4 (about 2.785).
pub const STABILITY_LIMIT: f64 = 2.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub conv_eps: f64,
    pub blowup_cap: f64,
    /// Positive vector for the Lyapunov monitors; defaults to the Perron
    /// vector of the highest-order layer.
    pub monitor_vector: Option<Vec<f64>>,
    /// Equilibrium to converge to; the origin when absent.
    pub target: Option<Vec<f64>>,
    /// Store every `record_every`-th step (the first and last states are always stored).
    pub record_every: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 50.0,
            conv_eps: 1e-6,
            blowup_cap: 1e6,
            monitor_vector: None,
            target: None,
            record_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Converged {
        time: f64,
    },
    /// `estimate` is the comparison-ODE blowup time, when available.
    Blowup {
        time: f64,
        estimate: Option<f64>,
        non_finite: bool,
    },
    HorizonReached,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSample {
    pub v_max: f64,
    pub nu_min: f64,
    pub flags: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    /// Step halving was exhausted and the state was projected onto the region.
    Clamp,
    /// A monitored invariant set was left by more than the tolerance.
    InvariantViolation { set: usize, excursion: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub steps: usize,
    pub substeps: usize,
    pub halvings: usize,
    pub clamps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub monitors: Vec<MonitorSample>,
    pub monitor_vector: Vec<f64>,
    pub invariant_sets: InvariantMonitor,
    pub termination: Termination,
    pub stats: StepStats,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn converged(&self) -> bool {
        matches!(self.termination, Termination::Converged { .. })
    }

    pub fn blew_up(&self) -> bool {
        matches!(self.termination, Termination::Blowup { .. })
    }

    /// All invariant flags held at every stored sample.
    pub fn invariants_held(&self) -> bool {
        self.monitors.iter().all(|m| m.flags.iter().all(|&f| f))
    }
}

fn in_region(region: &Region, x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
        && match region {
            Region::PositiveOrthant => x.iter().all(|&v| v >= 0.0),
            Region::UnitBox => x.iter().all(|&v| (0.0..=1.0).contains(&v)),
            Region::AboveShift(a) => x.iter().zip(a).all(|(v, l)| v >= l),
        }
}

fn clamp_to_region(region: &Region, x: &mut [f64]) {
    match region {
        Region::PositiveOrthant => x.iter_mut().for_each(|v| *v = v.max(0.0)),
        Region::UnitBox => x.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0)),
        Region::AboveShift(a) => x.iter_mut().zip(a).for_each(|(v, l)| *v = v.max(*l)),
    }
}

fn rk4(model: &HypergraphModel, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let axpy = |a: &[f64], k: &[f64], s: f64| -> Vec<f64> { a.iter().zip(k).map(|(u, v)| u + s * v).collect() };
    let k1 = model.field(x)?;
    let k2 = model.field(&axpy(x, &k1, 0.5 * h))?;
    let k3 = model.field(&axpy(x, &k2, 0.5 * h))?;
    let k4 = model.field(&axpy(x, &k3, h))?;
    Ok((0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

fn default_monitor_vector(model: &HypergraphModel) -> Vec<f64> {
    let n = model.dim();
    perron_metzler(&model.layers()[0], &PowerConfig::default())
        .map(|p| p.vector)
        .unwrap_or_else(|_| vec![1.0 / n as f64; n])
}

fn validate(model: &HypergraphModel, x0: &[f64], cfg: &SimConfig) -> Result<()> {
    if x0.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: x0.len(),
        });
    }
    if !in_region(&model.region(), x0) {
        return Err(Error::InvalidInitialState(format!(
            "{x0:?} is not in {:?}",
            model.region()
        )));
    }
    let positive = |v: f64| v > 0.0 && v.is_finite();
    if !(positive(cfg.dt) && positive(cfg.horizon) && positive(cfg.conv_eps) && positive(cfg.blowup_cap)) {
        return Err(Error::InvalidConfig(
            "dt, horizon, conv_eps and blowup_cap must be positive".into(),
        ));
    }
    if cfg.record_every == 0 {
        return Err(Error::InvalidConfig("record_every must be >= 1".into()));
    }
    for (name, v) in [("monitor_vector", &cfg.monitor_vector), ("target", &cfg.target)] {
        if let Some(v) = v {
            if v.len() != model.dim() {
                return Err(Error::InvalidConfig(format!("{name} has wrong length")));
            }
        }
    }
    if let Some(d) = &cfg.monitor_vector {
        if d.iter().any(|&v| !positive(v)) {
            return Err(Error::InvalidConfig("monitor_vector must be positive".into()));
        }
    }
    Ok(())
}

/// Blowup time from the comparison ODE, for homogeneous single-layer models.
fn blowup_estimate(model: &HypergraphModel, x0: &[f64]) -> Option<f64> {
    let plain = model.layers().len() == 1
        && model.constant().is_none()
        && model.shift().is_none()
        && matches!(model.wrapper(), Wrapper::None);
    if !plain {
        return None;
    }
    rate_estimate(&model.layers()[0], x0).ok()?.blowup_time
}

struct Recorder<'a> {
    traj: Trajectory,
    delta: Vec<f64>,
    order: usize,
    shift: Option<&'a [f64]>,
}

impl Recorder<'_> {
    fn record(&mut self, t: f64, x: &[f64]) {
        let monitored: Vec<f64> = match self.shift {
            Some(a) => x.iter().zip(a).map(|(u, v)| u - v).collect(),
            None => x.to_vec(),
        };
        let (v_max, nu_min) = lyapunov_values(&monitored, &self.delta, self.order);
        let flags = self.traj.invariant_sets.flags(x);
        for (set, s) in self.traj.invariant_sets.sets.iter().enumerate() {
            let excursion = s.excursion(x);
            if excursion > INVARIANT_TOL {
                self.traj.events.push(Event {
                    time: t,
                    kind: EventKind::InvariantViolation { set, excursion },
                });
            }
        }
        self.traj.times.push(t);
        self.traj.states.push(x.to_vec());
        self.traj.monitors.push(MonitorSample { v_max, nu_min, flags });
    }
}

/// Integrates `model` from `x0` until convergence, blowup or the horizon.
pub fn simulate(model: &HypergraphModel, x0: &[f64], cfg: &SimConfig) -> Result<Trajectory> {
    validate(model, x0, cfg)?;
    let region = model.region();
    let delta = cfg
        .monitor_vector
        .clone()
        .unwrap_or_else(|| default_monitor_vector(model));
    let invariant_sets = invariant_monitor(model, x0, cfg.target.as_deref());
    let mut rec = Recorder {
        traj: Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            monitors: Vec::new(),
            monitor_vector: delta.clone(),
            invariant_sets,
            termination: Termination::HorizonReached,
            stats: StepStats::default(),
            events: Vec::new(),
        },
        delta,
        order: model.order(),
        shift: model.shift(),
    };
    let distance = |x: &[f64]| match &cfg.target {
        Some(t) => linf(&x.iter().zip(t).map(|(a, b)| a - b).collect::<Vec<_>>()),
        None => linf(x),
    };

    let mut x = x0.to_vec();
    rec.record(0.0, &x);
    if distance(&x) < cfg.conv_eps {
        rec.traj.termination = Termination::Converged { time: 0.0 };
        return Ok(rec.traj);
    }
    let n_steps = (cfg.horizon / cfg.dt).ceil() as usize;
    for step in 1..=n_steps {
        let t_prev = (step - 1) as f64 * cfg.dt;
        let t = step as f64 * cfg.dt;
        let mut remaining = cfg.dt;
        let mut h = cfg.dt;
        let mut halvings = 0u32;
        let mut blew_up = false;
        while remaining > 0.0 {
            let h_try = h.min(remaining);
            if halvings < MAX_HALVINGS && h_try * model.jacobian_bound(&x)? > STABILITY_LIMIT {
                halvings += 1;
                rec.traj.stats.halvings += 1;
                h = h_try * 0.5;
                continue;
            }
            let trial = rk4(model, &x, h_try)?;
            rec.traj.stats.substeps += 1;
            let finite = trial.iter().all(|v| v.is_finite());
            if finite && linf(&trial) > cfg.blowup_cap {
                x = trial;
                blew_up = true;
                break;
            }
            if in_region(&region, &trial) {
                x = trial;
                remaining -= h_try;
                if remaining <= cfg.dt * 1e-12 {
                    remaining = 0.0;
                }
                continue;
            }
            if halvings < MAX_HALVINGS {
                halvings += 1;
                rec.traj.stats.halvings += 1;
                h = h_try * 0.5;
                continue;
            }
            if !finite {
                rec.traj.stats.steps = step;
                rec.traj.termination = Termination::Blowup {
                    time: t_prev + (cfg.dt - remaining),
                    estimate: blowup_estimate(model, x0),
                    non_finite: true,
                };
                rec.record(t_prev + (cfg.dt - remaining), &x);
                return Ok(rec.traj);
            }
            let mut clamped = trial;
            clamp_to_region(&region, &mut clamped);
            rec.traj.stats.clamps += 1;
            rec.traj.events.push(Event {
                time: t_prev + (cfg.dt - remaining) + h_try,
                kind: EventKind::Clamp,
            });
            x = clamped;
            remaining -= h_try;
            halvings = 0;
            h = cfg.dt;
        }
        rec.traj.stats.steps = step;
        let t_now = if blew_up { t_prev + (cfg.dt - remaining) } else { t };
        if blew_up {
            rec.record(t_now, &x);
            rec.traj.termination = Termination::Blowup {
                time: t_now,
                estimate: blowup_estimate(model, x0),
                non_finite: false,
            };
            return Ok(rec.traj);
        }
        if distance(&x) < cfg.conv_eps {
            rec.record(t, &x);
            rec.traj.termination = Termination::Converged { time: t };
            return Ok(rec.traj);
        }
        if step % cfg.record_every == 0 || step == n_steps {
            rec.record(t, &x);
        }
    }
    Ok(rec.traj)
}

/// Independent runs from several initial states, in input order.
pub fn simulate_batch(model: &HypergraphModel, starts: &[Vec<f64>], cfg: &SimConfig) -> Vec<Result<Trajectory>> {
    starts.par_iter().map(|x0| simulate(model, x0, cfg)).collect()
}

/// `count` seeded uniform draws from `(lo, hi]^n`.
pub fn random_starts(seed: u64, count: usize, dim: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    // (lo, hi]: map [0, 1) to (0, 1]
                    let u: f64 = 1.0 - rng.gen::<f64>();
                    lo + (hi - lo) * u
                })
                .collect()
        })
        .collect()
}
