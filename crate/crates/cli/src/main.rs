use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hypermetzler::control::{
    closed_loop, design_scalar_gain, design_tensor_gain, GainDesign, GainKind, Mask, DEFAULT_BISECTION_TOL,
};
use hypermetzler::io::{parse_model, parse_tensor, tensor_to_json, ModelSpec};
use hypermetzler::solve::{equilibrium_affine, equilibrium_lv, SolveConfig};
use hypermetzler::spectral::{hec_centrality, perron_metzler, PowerConfig};
use hypermetzler::stability::{
    certify_cascade, certify_sis, certify_uniform, CascadeReport, StabilityCertificate, DEFAULT_TOL,
};
use hypermetzler::tensor::{
    gershgorin_bounds, is_irreducible, is_strongly_connected, is_supersymmetric, sunflower_tensor, uniform_tensor,
    GershgorinBounds, EXACT_IRREDUCIBILITY_CAP,
};
use hypermetzler::CubicalTensor;

mod simulate;

#[derive(Debug, Parser)]
#[command(
    name = "hypermetzler",
    version,
    about = "Spectra, stability certificates and simulation for polynomial systems on hypergraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tensor or model JSON file ("-" for stdin).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Directory for output files; created if missing.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Tolerance of the underlying method (eigensolver, certificate,
    /// solver residual, bisection, or convergence radius for `simulate`).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Perron value and vector of a Metzler tensor.
    Spectrum,
    /// Global stability certificate for a model.
    Certify,
    /// Integrate a model (or a canned setup) and write trajectories.
    Simulate(simulate::SimulateArgs),
    /// Positive equilibrium of an affine or Lotka-Volterra model.
    Equilibrium,
    /// Design a stabilizing feedback gain.
    Control(ControlArgs),
    /// H-eigenvector centrality of a hypergraph tensor.
    Centrality,
    /// Write a generated tensor as JSON.
    Generate {
        #[command(subcommand)]
        generator: Generator,
    },
}

#[derive(Debug, clap::Args)]
struct ControlArgs {
    /// Required closed-loop Perron value bound is `-margin`.
    #[arg(long, default_value_t = 0.0)]
    margin: f64,

    #[arg(long, value_enum, default_value_t = GainArg::Scalar)]
    gain: GainArg,

    /// Mask JSON for tensor gains; all off-diagonal entries when omitted.
    #[arg(long)]
    mask: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GainArg {
    Scalar,
    Tensor,
}

#[derive(Debug, Subcommand)]
enum Generator {
    /// Constant off-diagonal and diagonal entries.
    Uniform {
        #[arg(long = "k", visible_alias = "order")]
        order: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        off_diag: f64,
        #[arg(long, allow_hyphen_values = true)]
        diag: f64,
    },
    /// Sunflower hypergraph with one core node.
    Sunflower {
        #[arg(long = "k", visible_alias = "order")]
        order: usize,
        #[arg(long)]
        petals: usize,
        #[arg(long, default_value_t = 1.0)]
        weight: f64,
    },
}

/// Global options shared by every command.
pub(crate) struct Ctx {
    input: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    tol: Option<f64>,
    seed: Option<u64>,
    json: bool,
}

impl Ctx {
    fn read_input(&self) -> Result<String> {
        let path = self
            .input
            .as_deref()
            .ok_or_else(|| anyhow!("--input is required for this command"))?;
        if path == Path::new("-") {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            return Ok(s);
        }
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }

    pub(crate) fn tensor(&self) -> Result<CubicalTensor> {
        let text = self.read_input()?;
        parse_tensor(&text).with_context(|| self.input_name())
    }

    pub(crate) fn model(&self) -> Result<ModelSpec> {
        let text = self.read_input()?;
        parse_model(&text).with_context(|| self.input_name())
    }

    fn input_name(&self) -> String {
        self.input
            .as_deref()
            .map_or_else(String::new, |p| p.display().to_string())
    }

    fn tol_or(&self, default: f64) -> Result<f64> {
        match self.tol {
            None => Ok(default),
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            Some(t) => Err(hypermetzler::Error::InvalidConfig(format!("--tol must be positive, got {t}")).into()),
        }
    }

    pub(crate) fn out_dir(&self) -> Result<Option<&Path>> {
        if let Some(d) = &self.out_dir {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(self.out_dir.as_deref())
    }

    pub(crate) fn write_file(&self, name: &str, contents: &[u8]) -> Result<()> {
        if let Some(dir) = self.out_dir()? {
            let path = dir.join(name);
            fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }

    /// JSON to stdout under `--json`, `text` otherwise; the JSON is also saved
    /// as `name` when an output directory is set.
    pub(crate) fn emit<T: Serialize>(&self, name: &str, value: &T, text: impl FnOnce() -> String) -> Result<()> {
        let json = serde_json::to_string_pretty(value)?;
        self.write_file(name, json.as_bytes())?;
        if self.json {
            stdout(&format!("{json}\n"))
        } else {
            stdout(&text())
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
pub(crate) fn stdout(s: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(s.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Serialize)]
struct SpectrumOut {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
    iterations: usize,
    bracket: (f64, f64),
    strongly_connected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    irreducible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gershgorin: Option<GershgorinBounds>,
}

fn cmd_spectrum(ctx: &Ctx) -> Result<()> {
    let t = ctx.tensor()?;
    let pair = perron_metzler(&t, &PowerConfig::with_tol(ctx.tol_or(PowerConfig::default().tol)?))?;
    let out = SpectrumOut {
        value: pair.value,
        vector: pair.vector,
        residual: pair.residual,
        iterations: pair.iterations,
        bracket: pair.bracket,
        strongly_connected: is_strongly_connected(&t),
        irreducible: if t.dim() <= EXACT_IRREDUCIBILITY_CAP {
            Some(is_irreducible(&t)?)
        } else {
            None
        },
        gershgorin: if is_supersymmetric(&t) {
            Some(gershgorin_bounds(&t)?)
        } else {
            None
        },
    };
    ctx.emit("spectrum.json", &out, || {
        let mut s = format!(
            "perron value  {:.12}\nvector        {}\nresidual      {:.3e} after {} iterations\n",
            out.value,
            fmt_vec(&out.vector),
            out.residual,
            out.iterations
        );
        if let Some(g) = &out.gershgorin {
            s += &format!("gershgorin    [{}, {}]\n", g.union.0, g.union.1);
        }
        s
    })
}

fn certificate_text(c: &StabilityCertificate) -> String {
    let mut s = format!(
        "verdict  {:?}\nmethod   {:?}\nmargin   {}\n",
        c.verdict, c.method, c.margin
    );
    for d in &c.diagnostics {
        s += &format!("note     {d}\n");
    }
    s
}

fn cmd_certify(ctx: &Ctx) -> Result<()> {
    let spec = ctx.model()?;
    let tol = ctx.tol_or(DEFAULT_TOL)?;
    let report = match spec.sis() {
        Some(sis) => {
            let cert = certify_sis(&sis?, tol)?;
            CascadeReport {
                result: cert.clone(),
                attempts: vec![hypermetzler::stability::Attempt {
                    method: cert.method,
                    certificate: Some(cert),
                    error: None,
                }],
            }
        }
        None => certify_cascade(&spec.layers(), &[], tol)?,
    };
    ctx.emit("certificate.json", &report, || {
        let mut s = certificate_text(&report.result);
        for a in &report.attempts {
            let what = match (&a.certificate, &a.error) {
                (Some(c), _) => format!("{:?}", c.verdict),
                (None, Some(e)) => e.clone(),
                (None, None) => "skipped".into(),
            };
            s += &format!("tried    {:?}: {what}\n", a.method);
        }
        s
    })
}

fn cmd_equilibrium(ctx: &Ctx) -> Result<()> {
    let spec = ctx.model()?;
    let cfg = SolveConfig {
        tol: ctx.tol_or(SolveConfig::default().tol)?,
        ..SolveConfig::default()
    };
    match &spec {
        ModelSpec::Affine { tensor, b } => {
            let rep = equilibrium_affine(tensor, b, &cfg)?;
            ctx.emit("equilibrium.json", &rep, || {
                format!(
                    "equilibrium  {}\nresidual     {:.3e} after {} iterations\n",
                    fmt_vec(&rep.solution),
                    rep.residual,
                    rep.iterations
                )
            })
        }
        ModelSpec::Lv { tensor, b } => {
            let rep = equilibrium_lv(tensor, b, &cfg)?;
            ctx.emit("equilibrium.json", &rep, || {
                format!(
                    "positive     {}\nboundary     {}\nresidual     {:.3e}\n",
                    fmt_vec(&rep.positive.solution),
                    fmt_vec(&rep.boundary),
                    rep.positive.residual
                )
            })
        }
        other => Err(hypermetzler::Error::InvalidModel(format!(
            "equilibrium needs an affine or lv model, got {}",
            other.kind()
        ))
        .into()),
    }
}

#[derive(Serialize)]
struct ControlOut {
    design: GainDesign,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<StabilityCertificate>,
}

fn cmd_control(ctx: &Ctx, args: &ControlArgs) -> Result<()> {
    let a = ctx.tensor()?;
    let design = match args.gain {
        GainArg::Scalar => {
            if args.mask.is_some() {
                bail!(hypermetzler::Error::InvalidConfig(
                    "--mask applies to tensor gains only".into()
                ));
            }
            design_scalar_gain(&a, args.margin)?
        }
        GainArg::Tensor => {
            let mask = match &args.mask {
                Some(p) => {
                    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str::<Mask>(&text)
                        .map_err(hypermetzler::Error::from)
                        .with_context(|| p.display().to_string())?
                }
                None => Mask::AllOffDiagonal,
            };
            design_tensor_gain(&a, &mask, args.margin, ctx.tol_or(DEFAULT_BISECTION_TOL)?)?
        }
    };
    let cl = closed_loop(&a, &design)?;
    let certificate = if is_strongly_connected(&cl) {
        Some(certify_uniform(&cl, DEFAULT_TOL)?)
    } else {
        None
    };
    ctx.write_file("closed_loop.json", tensor_to_json(&cl).as_bytes())?;
    let out = ControlOut { design, certificate };
    ctx.emit("control.json", &out, || {
        let d = &out.design;
        let mut s = match &d.kind {
            GainKind::ScalarDiag { q } => format!("scalar gain, q = {q}\n"),
            GainKind::TensorGain { alpha, .. } => format!("tensor gain, alpha = {alpha}\n"),
        };
        s += &format!(
            "open loop    {}\nclosed loop  {}\ncost         {}\n",
            d.open_loop_value, d.closed_loop_value, d.cost
        );
        if d.unnecessary {
            s += "open loop already meets the margin\n";
        }
        if let Some(c) = &out.certificate {
            s += &certificate_text(c);
        }
        s
    })
}

fn cmd_centrality(ctx: &Ctx) -> Result<()> {
    let t = ctx.tensor()?;
    let c = hec_centrality(&t)?;
    ctx.emit("centrality.json", &c, || {
        let mut s = format!("eigenvalue {}\n", c.eigenvalue);
        for (i, v) in c.scores.iter().enumerate() {
            s += &format!("{i:>6} {v:.10}\n");
        }
        s
    })
}

fn cmd_generate(ctx: &Ctx, g: &Generator) -> Result<()> {
    let t = match *g {
        Generator::Uniform {
            order,
            dim,
            off_diag,
            diag,
        } => uniform_tensor(order, dim, off_diag, diag)?,
        Generator::Sunflower { order, petals, weight } => sunflower_tensor(order, petals, weight)?,
    };
    let json = tensor_to_json(&t);
    ctx.write_file("tensor.json", json.as_bytes())?;
    stdout(&format!("{json}\n"))
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        input: cli.input,
        out_dir: cli.out_dir,
        tol: cli.tol,
        seed: cli.seed,
        json: cli.json,
    };
    match &cli.command {
        Command::Spectrum => cmd_spectrum(&ctx),
        Command::Certify => cmd_certify(&ctx),
        Command::Simulate(args) => simulate::run(&ctx, args),
        Command::Equilibrium => cmd_equilibrium(&ctx),
        Command::Control(args) => cmd_control(&ctx, args),
        Command::Centrality => cmd_centrality(&ctx),
        Command::Generate { generator } => cmd_generate(&ctx, generator),
    }
}

/// 3 for numerical failures of an otherwise valid request, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<hypermetzler::Error>())
        .any(hypermetzler::Error::is_numerical);
    if numerical {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
