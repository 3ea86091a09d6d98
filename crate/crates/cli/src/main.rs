//! `conformal`: transformations, atlas bookkeeping, potential scans, series
//! fits, masses and the invariant suites from the command line.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage, 3 domain error.

mod config;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use conformal_core::atlas::{lambda_of_sq, Branch, Region};
use conformal_core::conformal::{parse_four_momentum, ConformalElement};
use conformal_core::models::{HiggsParams, Phi4Params, PotentialModel, SigmaParams};
use conformal_core::verify;
use conformal_core::{apply, classify, lift, project, Error, FourMomentum, ScaleM};

use config::{Format, RunConfig};
use output::{emit, Range};

#[derive(Parser, Debug)]
#[command(name = "conformal", version, about = "Momentum-space conformal group and symmetry-breaking models")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Scale parameter M.
    #[arg(long = "M", global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply one element, e.g. `inv`, `dil:0.5`, `trans:0,1,0,0`, `sct:0,0.1,0,0`.
    Transform {
        #[arg(long)]
        el: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Lift a momentum to the cone and project it back.
    Lift {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        kappa_plus: f64,
    },
    /// Region, branch, q5 and λ of a momentum or of a value of q².
    Classify {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "q_sq", required_unless_present = "q_sq")]
        q: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q_sq: Option<f64>,
    },
    /// Sweep one parameter of an element family over a range.
    Orbit {
        /// `dil`, `trans`, `sct`, `boost:AXIS` or `rot:AXIS`.
        #[arg(long)]
        family: String,
        /// Direction for `trans` and `sct`, scaled by the parameter.
        #[arg(long, allow_hyphen_values = true, default_value = "1,0,0,0")]
        dir: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true, default_value = "-1:1:0.1")]
        range: String,
    },
    /// Interaction Lagrangian on both branches over a field range.
    Scan {
        #[arg(long)]
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        #[command(flatten)]
        params: ModelFlags,
    },
    /// Laurent coefficients of the σ-model interaction.
    Series {
        #[command(flatten)]
        params: ModelFlags,
    },
    /// Pion and Higgs mass coefficients.
    Masses {
        #[command(flatten)]
        params: ModelFlags,
    },
    /// Run invariant suites: group, cone, atlas, fifthdim, modes, models,
    /// sigma-series, higgs or all.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Args, Debug, Default)]
struct ModelFlags {
    #[arg(long, allow_hyphen_values = true)]
    g: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    #[arg(long)]
    f_pi: Option<f64>,
    #[arg(long)]
    f: Option<f64>,
    #[arg(long)]
    m_pi: Option<f64>,
}

enum Failure {
    Usage(String),
    Domain(String),
    Verification,
    /// Downstream reader closed the pipe.
    Closed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::InvalidScale(_) | Error::InvalidGrid(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Domain(format!("output error: {e}"))
    }
}

struct Ctx {
    m: ScaleM,
    format: Format,
    seed: u64,
    cfg: RunConfig,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) | Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.global.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    let m = ScaleM::new(cli.global.m.unwrap_or(cfg.m))?;
    let default_format = match cli.command {
        Command::Orbit { .. } | Command::Scan { .. } => Format::Csv,
        _ => Format::Json,
    };
    let ctx = Ctx {
        m,
        format: cli.global.format.or(cfg.format).unwrap_or(default_format),
        seed: cli.global.seed.unwrap_or(cfg.seed),
        cfg,
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    match cli.command {
        Command::Transform { el, q } => transform(&ctx, &el, &q, &mut out)?,
        Command::Lift { q, kappa_plus } => lift_cmd(&ctx, &q, kappa_plus, &mut out)?,
        Command::Classify { q, q_sq } => classify_cmd(&ctx, q.as_deref(), q_sq, &mut out)?,
        Command::Orbit { family, dir, q, range } => orbit(&ctx, &family, &dir, &q, &range, &mut out)?,
        Command::Scan { model, range, params } => scan(&ctx, &model, range.as_deref(), &params, &mut out)?,
        Command::Series { params } => series(&ctx, &params, &mut out)?,
        Command::Masses { params } => masses(&ctx, &params, &mut out)?,
        Command::Verify { suite } => {
            let passed = verify_cmd(&ctx, &suite, &mut out)?;
            out.flush()?;
            if !passed {
                return Err(Failure::Verification);
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn momentum(s: &str) -> Result<FourMomentum, Failure> {
    parse_four_momentum(s).map_err(|e| Failure::Usage(format!("--q: {e}")))
}

fn region_name(q: &FourMomentum, m: ScaleM) -> Region {
    classify(q.minkowski_sq(), m)
}

#[derive(Serialize)]
struct TransformRecord {
    element: String,
    q0: f64,
    q1: f64,
    q2: f64,
    q3: f64,
    q_sq: f64,
    region: Region,
    out0: f64,
    out1: f64,
    out2: f64,
    out3: f64,
    out_q_sq: f64,
    out_region: Region,
}

fn transform(ctx: &Ctx, el: &str, q: &str, out: &mut impl Write) -> Result<(), Failure> {
    let e: ConformalElement = el.parse().map_err(|e: Error| Failure::Usage(format!("--el: {e}")))?;
    let q = momentum(q)?;
    let r = apply(&e, &q, ctx.m)?;
    let rec = TransformRecord {
        element: e.to_string(),
        q0: q[0],
        q1: q[1],
        q2: q[2],
        q3: q[3],
        q_sq: q.minkowski_sq(),
        region: region_name(&q, ctx.m),
        out0: r[0],
        out1: r[1],
        out2: r[2],
        out3: r[3],
        out_q_sq: r.minkowski_sq(),
        out_region: region_name(&r, ctx.m),
    };
    emit(out, ctx.format, &[rec])
}

#[derive(Serialize)]
struct LiftRecord {
    kappa0: f64,
    kappa1: f64,
    kappa2: f64,
    kappa3: f64,
    kappa5: f64,
    kappa6: f64,
    cone_residual: f64,
    projected_rel_error: f64,
}

fn lift_cmd(ctx: &Ctx, q: &str, kp: f64, out: &mut impl Write) -> Result<(), Failure> {
    let q = momentum(q)?;
    let k = lift(&q, kp, ctx.m)?;
    let back = project(&k, ctx.m)?;
    let rec = LiftRecord {
        kappa0: k.0[0],
        kappa1: k.0[1],
        kappa2: k.0[2],
        kappa3: k.0[3],
        kappa5: k.0[4],
        kappa6: k.0[5],
        cone_residual: k.cone_residual(),
        projected_rel_error: back.rel_diff(&q),
    };
    emit(out, ctx.format, &[rec])
}

#[derive(Serialize)]
struct ClassifyRecord {
    q_sq: f64,
    region: Region,
    branch: &'static str,
    q5: f64,
    lambda: Option<f64>,
}

fn classify_cmd(ctx: &Ctx, q: Option<&str>, q_sq: Option<f64>, out: &mut impl Write) -> Result<(), Failure> {
    let q_sq = match (q, q_sq) {
        (Some(q), _) => momentum(q)?.minkowski_sq(),
        (None, Some(v)) => v,
        (None, None) => return Err(Failure::Usage("one of --q or --q-sq is required".into())),
    };
    if !q_sq.is_finite() {
        return Err(Failure::Usage(format!("q^2 must be finite, got {q_sq}")));
    }
    let region = classify(q_sq, ctx.m);
    let branch = region.branch();
    let rec = ClassifyRecord {
        q_sq,
        region,
        branch: branch.name(),
        q5: branch.q5_sq(q_sq, ctx.m).max(0.0).sqrt(),
        lambda: lambda_of_sq(q_sq, ctx.m).ok(),
    };
    emit(out, ctx.format, &[rec])
}

#[derive(Serialize)]
struct OrbitRow {
    t: f64,
    q0: Option<f64>,
    q1: Option<f64>,
    q2: Option<f64>,
    q3: Option<f64>,
    q_sq: Option<f64>,
    region: Option<Region>,
    singular: bool,
}

fn orbit(ctx: &Ctx, family: &str, dir: &str, q: &str, range: &str, out: &mut impl Write) -> Result<(), Failure> {
    let q = momentum(q)?;
    let dir = parse_four_momentum(dir).map_err(|e| Failure::Usage(format!("--dir: {e}")))?;
    let range: Range = range.parse().map_err(Failure::Usage)?;
    let make = |t: f64| -> Result<ConformalElement, Failure> {
        let spec = match family {
            "dil" => format!("dil:{t}"),
            "trans" | "sct" => {
                let v = dir * t;
                format!("{family}:{},{},{},{}", v[0], v[1], v[2], v[3])
            }
            f if f.starts_with("boost:") || f.starts_with("rot:") => format!("{f}:{t}"),
            _ => return Err(Failure::Usage(format!("unknown family {family:?}"))),
        };
        spec.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
    };
    let mut rows = Vec::new();
    for t in range.values() {
        let e = make(t)?;
        rows.push(match apply(&e, &q, ctx.m) {
            Ok(r) => OrbitRow {
                t,
                q0: Some(r[0]),
                q1: Some(r[1]),
                q2: Some(r[2]),
                q3: Some(r[3]),
                q_sq: Some(r.minkowski_sq()),
                region: Some(region_name(&r, ctx.m)),
                singular: false,
            },
            Err(Error::SingularSpecialConformal { .. }) | Err(Error::LightlikeInversion { .. }) => OrbitRow {
                t,
                q0: None,
                q1: None,
                q2: None,
                q3: None,
                q_sq: None,
                region: None,
                singular: true,
            },
            Err(e) => return Err(e.into()),
        });
    }
    emit(out, ctx.format, &rows)
}

#[derive(Serialize)]
struct ScanRow {
    field: f64,
    l_int_internal: Option<f64>,
    l_int_external: Option<f64>,
    pole: bool,
    outside_domain: bool,
}

fn build_model(ctx: &Ctx, name: &str, p: &ModelFlags) -> Result<PotentialModel, Failure> {
    let c = &ctx.cfg.models;
    Ok(match name {
        "phi4" => PotentialModel::Phi4(Phi4Params::with_eta(
            p.g.unwrap_or(c.g),
            p.eta.unwrap_or(c.eta),
            ctx.m,
            Branch::Internal,
        )),
        "sigma" => PotentialModel::Sigma(SigmaParams::new(p.f_pi.unwrap_or(c.f_pi), ctx.m, Branch::Internal)?),
        "higgs" => PotentialModel::Higgs(HiggsParams::new(p.f.unwrap_or(c.f), ctx.m, Branch::Internal)?),
        _ => return Err(Failure::Usage(format!("unknown model {name:?}; expected phi4, sigma or higgs"))),
    })
}

fn scan(ctx: &Ctx, name: &str, range: Option<&str>, p: &ModelFlags, out: &mut impl Write) -> Result<(), Failure> {
    let model = build_model(ctx, name, p)?;
    let range: Range = match (range, &model) {
        (Some(r), _) => r.parse().map_err(Failure::Usage)?,
        (None, PotentialModel::Sigma(s)) => Range::new(0.0, s.f_pi, s.f_pi / 200.0).map_err(Failure::Usage)?,
        (None, _) => Range::new(-3.0, 3.0, 0.01).map_err(Failure::Usage)?,
    };
    let header = serde_json::json!({ "model": model, "units": ctx.cfg.units, "range": range.to_string() });
    let mut rows = Vec::new();
    for x in range.values() {
        let (a, b) = (model.l_int(x, Branch::Internal), model.l_int(x, Branch::External));
        let row = match (a, b) {
            (Ok(a), Ok(b)) => ScanRow { field: x, l_int_internal: Some(a), l_int_external: Some(b), pole: false, outside_domain: false },
            (Err(Error::PionPole { .. }), _) => ScanRow { field: x, l_int_internal: None, l_int_external: None, pole: true, outside_domain: false },
            (Err(Error::NoRealBranch { .. }), _) => ScanRow { field: x, l_int_internal: None, l_int_external: None, pole: false, outside_domain: true },
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        };
        rows.push(row);
    }
    output::emit_with_header(out, ctx.format, &header, &rows)
}

fn series(ctx: &Ctx, p: &ModelFlags, out: &mut impl Write) -> Result<(), Failure> {
    let f = p.f_pi.unwrap_or(ctx.cfg.models.f_pi);
    let params = SigmaParams::new(f, ctx.m, Branch::Internal)?;
    let c = params.series_coefficients()?;
    #[derive(Serialize)]
    struct Row {
        coefficient: &'static str,
        fitted: f64,
        expected: f64,
        relative_error: f64,
        max_residual: f64,
        condition: f64,
    }
    let rows: Vec<Row> = c
        .entries(f)
        .into_iter()
        .map(|e| Row {
            coefficient: e.name,
            fitted: e.fitted,
            expected: e.expected,
            relative_error: e.relative_error,
            max_residual: c.max_residual,
            condition: c.condition,
        })
        .collect();
    emit(out, ctx.format, &rows)
}

#[derive(Serialize)]
struct MassRecord {
    quantity: &'static str,
    #[serde(rename = "M")]
    m: f64,
    value: f64,
    expected: f64,
}

fn masses(ctx: &Ctx, p: &ModelFlags, out: &mut impl Write) -> Result<(), Failure> {
    let c = &ctx.cfg.models;
    let m_pi = p.m_pi.unwrap_or(c.m_pi);
    let f_pi = p.f_pi.unwrap_or(c.f_pi);
    let pion_scale = ScaleM::new(m_pi / 2f64.sqrt())?;
    let ext = SigmaParams::new(f_pi, pion_scale, Branch::External)?.pion_mass_sq()?;
    let int = SigmaParams::new(f_pi, pion_scale, Branch::Internal)?.pion_mass_sq()?;
    let h = HiggsParams::new(p.f.unwrap_or(c.f), ctx.m, Branch::Internal)?;
    let hm = h.mass_sq()?;
    let m2 = ctx.m.sq();
    let rows = [
        MassRecord { quantity: "pion_mass_sq_external", m: pion_scale.value(), value: ext, expected: m_pi * m_pi },
        MassRecord { quantity: "pion_mass_sq_internal", m: pion_scale.value(), value: int, expected: -m_pi * m_pi },
        MassRecord { quantity: "higgs_raw_curvature", m: ctx.m.value(), value: hm.raw_curvature, expected: 2.25 * m2 },
        MassRecord { quantity: "higgs_normalization", m: ctx.m.value(), value: hm.normalization, expected: 0.5 },
        MassRecord { quantity: "higgs_mass_sq", m: ctx.m.value(), value: hm.mass_sq, expected: 9.0 / 8.0 * m2 },
    ];
    emit(out, ctx.format, &rows)
}

#[derive(Serialize)]
struct VerifyRow<'a> {
    suite: &'a str,
    check: &'a str,
    samples: usize,
    failures: usize,
    max_residual: f64,
    tolerance: f64,
    passed: bool,
    note: Option<&'a str>,
}

fn verify_cmd(ctx: &Ctx, suite: &str, out: &mut impl Write) -> Result<bool, Failure> {
    let reports = verify::run(suite, ctx.seed)?;
    let passed = reports.iter().all(|r| r.passed());
    match ctx.format {
        Format::Json => {
            for r in &reports {
                serde_json::to_writer(&mut *out, r).map_err(|e| Failure::Domain(e.to_string()))?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let rows: Vec<VerifyRow> = reports
                .iter()
                .flat_map(|r| {
                    r.details.iter().map(move |c| VerifyRow {
                        suite: r.suite,
                        check: c.name,
                        samples: c.samples,
                        failures: c.failures,
                        max_residual: c.max_residual,
                        tolerance: c.tolerance,
                        passed: c.passed,
                        note: c.note.as_deref(),
                    })
                })
                .collect();
            emit(out, Format::Csv, &rows)?;
        }
    }
    Ok(passed)
}
