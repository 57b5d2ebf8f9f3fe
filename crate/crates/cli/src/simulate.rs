use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

use hypermetzler::dynamics::{
    random_starts, simulate_batch, write_csv, RunMetadata, SimConfig, Termination, Trajectory,
};
use hypermetzler::io::{model_to_json, ModelSpec};
use hypermetzler::solve::{equilibrium_affine, SolveConfig};
use hypermetzler::stability::{rate_estimate, RateEstimate};
use hypermetzler::tensor::uniform_tensor;
use hypermetzler::{CubicalTensor, Error};

use crate::Ctx;

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    /// Run a canned setup instead of reading --input.
    #[arg(long, value_enum)]
    repro: Option<Repro>,

    #[arg(long)]
    dt: Option<f64>,

    #[arg(long)]
    horizon: Option<f64>,

    #[arg(long)]
    blowup_cap: Option<f64>,

    /// Store every n-th step.
    #[arg(long)]
    record_every: Option<usize>,

    /// Explicit initial state; overrides the random starts.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,

    /// Number of seeded random starts drawn from (lo, hi]^n.
    #[arg(long, default_value_t = 1)]
    starts: usize,

    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lo: f64,

    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Repro {
    /// Stable homogeneous system, random starts.
    Fig3,
    /// Unstable homogeneous system from the ones vector and random starts.
    Fig4,
    /// Affine system from below and above its equilibrium.
    Fig5,
    /// Two-layer system with a shared Perron vector.
    Fig6,
    /// SIS epidemic with triadic infection.
    Fig7,
}

struct Setup {
    spec: ModelSpec,
    starts: Vec<(String, Vec<f64>)>,
    target: Option<Vec<f64>>,
    seed: u64,
}

fn stable_quartic() -> CubicalTensor {
    uniform_tensor(4, 4, 1.0, -64.0).expect("fixed shape")
}

fn labelled(prefix: &str, xs: Vec<Vec<f64>>) -> Vec<(String, Vec<f64>)> {
    xs.into_iter()
        .enumerate()
        .map(|(i, x)| (format!("{prefix}{i:03}"), x))
        .collect()
}

fn repro_setup(r: Repro, seed: Option<u64>) -> Result<Setup> {
    let seed = seed.unwrap_or(match r {
        Repro::Fig3 => 3,
        Repro::Fig4 => 4,
        Repro::Fig5 => 5,
        Repro::Fig6 => 6,
        Repro::Fig7 => 7,
    });
    let setup = match r {
        Repro::Fig3 => Setup {
            spec: ModelSpec::Homogeneous {
                tensor: stable_quartic(),
            },
            starts: labelled("run_", random_starts(seed, 5, 4, 0.0, 1.0)),
            target: None,
            seed,
        },
        Repro::Fig4 => {
            let mut starts = vec![("ones".to_string(), vec![1.0; 4])];
            starts.extend(labelled("run_", random_starts(seed, 4, 4, 0.0, 1.0)));
            Setup {
                spec: ModelSpec::Homogeneous {
                    tensor: uniform_tensor(4, 4, 1.0, -62.0)?,
                },
                starts,
                target: None,
                seed,
            }
        }
        Repro::Fig5 => {
            let a = stable_quartic();
            let b = vec![1.0; 4];
            let eq = equilibrium_affine(&a, &b, &SolveConfig::default())?.solution;
            // interior draw from (0, x*), dominating draw from [x*, 2 x*)
            let below: Vec<f64> = random_starts(seed, 1, 4, 0.0, 1.0)[0]
                .iter()
                .zip(&eq)
                .map(|(u, e)| u * e * (1.0 - 1e-3))
                .collect();
            let above: Vec<f64> = random_starts(seed.wrapping_add(1), 1, 4, 0.0, 1.0)[0]
                .iter()
                .zip(&eq)
                .map(|(u, e)| e * (1.0 + u))
                .collect();
            Setup {
                spec: ModelSpec::Affine { tensor: a, b },
                starts: vec![("below".into(), below), ("above".into(), above)],
                target: Some(eq),
                seed,
            }
        }
        Repro::Fig6 => Setup {
            spec: ModelSpec::Polynomial {
                layers: vec![stable_quartic(), uniform_tensor(2, 4, 1.0, -5.0)?],
                constant: None,
            },
            starts: labelled("run_", random_starts(seed, 5, 4, 0.0, 1.0)),
            target: None,
            seed,
        },
        Repro::Fig7 => Setup {
            spec: ModelSpec::Sis {
                pairwise: None,
                triadic: uniform_tensor(3, 4, 0.01, 0.0)?,
                beta1: 0.0,
                beta2: 1.0,
                recovery: vec![0.9; 4],
            },
            starts: labelled("run_", random_starts(seed, 5, 4, 0.0, 1.0)),
            target: None,
            seed,
        },
    };
    Ok(setup)
}

fn input_setup(ctx: &Ctx, args: &SimulateArgs) -> Result<Setup> {
    let spec = ctx.model()?;
    let n = spec.build()?.dim();
    let seed = ctx.seed.unwrap_or(0);
    let starts = match &args.x0 {
        Some(x) => vec![("run_000".to_string(), x.clone())],
        None => {
            if args.starts == 0 {
                return Err(Error::InvalidConfig("--starts must be at least 1".into()).into());
            }
            if !(args.lo.is_finite() && args.hi.is_finite() && args.lo < args.hi) {
                return Err(Error::InvalidConfig(format!("empty start range ({}, {}]", args.lo, args.hi)).into());
            }
            labelled("run_", random_starts(seed, args.starts, n, args.lo, args.hi))
        }
    };
    let target = match &spec {
        ModelSpec::Affine { tensor, b } => equilibrium_affine(tensor, b, &SolveConfig::default())
            .ok()
            .map(|r| r.solution),
        _ => None,
    };
    Ok(Setup {
        spec,
        starts,
        target,
        seed,
    })
}

#[derive(Serialize)]
struct RunSummary {
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
    final_state: Vec<f64>,
    converged: bool,
    blew_up: bool,
    invariants_held: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate_estimate: Option<RateEstimate>,
    metadata: RunMetadata,
}

#[derive(Serialize)]
struct Summary {
    model: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    repro: Option<Repro>,
    seed: u64,
    runs: Vec<RunSummary>,
}

fn config(ctx: &Ctx, args: &SimulateArgs, target: Option<Vec<f64>>) -> Result<SimConfig> {
    let d = SimConfig::default();
    Ok(SimConfig {
        dt: args.dt.unwrap_or(d.dt),
        horizon: args.horizon.unwrap_or(d.horizon),
        conv_eps: ctx.tol_or(d.conv_eps)?,
        blowup_cap: args.blowup_cap.unwrap_or(d.blowup_cap),
        record_every: args.record_every.unwrap_or(d.record_every),
        target,
        ..d
    })
}

pub fn run(ctx: &Ctx, args: &SimulateArgs) -> Result<()> {
    let setup = match args.repro {
        Some(r) => {
            if ctx.input.is_some() {
                return Err(Error::InvalidConfig("--repro and --input are exclusive".into()).into());
            }
            repro_setup(r, ctx.seed)?
        }
        None => input_setup(ctx, args)?,
    };
    let model = setup.spec.build()?;
    let model_json = model_to_json(&setup.spec);
    let cfg = config(ctx, args, setup.target.clone())?;
    let x0s: Vec<Vec<f64>> = setup.starts.iter().map(|(_, x)| x.clone()).collect();
    let results = simulate_batch(&model, &x0s, &cfg);

    let homogeneous = match &setup.spec {
        ModelSpec::Homogeneous { tensor } if tensor.order() > 2 => Some(tensor),
        _ => None,
    };
    let out_dir = ctx.out_dir()?;
    if out_dir.is_some() {
        ctx.write_file("model.json", model_json.as_bytes())?;
    }
    let mut runs = Vec::with_capacity(results.len());
    for ((label, x0), traj) in setup.starts.iter().zip(results) {
        let traj: Trajectory = traj?;
        let csv = match out_dir {
            Some(_) => {
                let mut buf = Vec::new();
                write_csv(&traj, &mut buf)?;
                let name = format!("{label}.csv");
                ctx.write_file(&name, &buf)?;
                Some(name)
            }
            None => None,
        };
        let metadata = RunMetadata::new(model_json.as_bytes(), &cfg, &traj);
        ctx.write_file(
            &format!("{label}.json"),
            serde_json::to_string_pretty(&metadata)?.as_bytes(),
        )?;
        runs.push(RunSummary {
            label: label.clone(),
            csv,
            final_state: traj.final_state().to_vec(),
            converged: traj.converged(),
            blew_up: traj.blew_up(),
            invariants_held: traj.invariants_held(),
            rate_estimate: homogeneous.and_then(|t| rate_estimate(t, x0).ok()),
            metadata,
        });
    }
    let summary = Summary {
        model: setup.spec.kind(),
        repro: args.repro,
        seed: setup.seed,
        runs,
    };
    ctx.emit("summary.json", &summary, || {
        let mut s = format!("model {} (seed {})\n", summary.model, summary.seed);
        for r in &summary.runs {
            let end = match r.metadata.termination {
                Termination::Converged { time } => format!("converged at t={time:.3}"),
                Termination::Blowup { time, estimate, .. } => match estimate {
                    Some(e) => format!("blowup at t={time:.4} (bound {e:.4})"),
                    None => format!("blowup at t={time:.4}"),
                },
                Termination::HorizonReached => "horizon reached".into(),
            };
            s += &format!(
                "{:<10} {end:<36} final {}  invariants {}\n",
                r.label,
                crate::fmt_vec(&r.final_state),
                if r.invariants_held { "held" } else { "violated" }
            );
        }
        s
    })
}
