use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dec_ym::axioms::{self, AxiomOptions, GlueCase};
use dec_ym::dynamics::{gluing_check, verify_lagrangian};
use dec_ym::hodge::{betti_oracle, harmonic_dirichlet_basis_dec, harmonic_neumann_basis_dec, hmf_report, relative_betti_oracle};
use dec_ym::linalg::RankPolicy;
use dec_ym::mesh::{load_off, write_off, BuiltinSpec, RegionMesh};
use dec_ym::ym2d::{lagrangian_line_check, reduced_form_check, sweep, KAPPA_FORMULA};
use dec_ym::dec::Dec;
use dec_ym::{Error, Tolerances};

const SCHEMA_VERSION: u32 = axioms::SCHEMA_VERSION;
const OUT_DIR_ENV: &str = "DEC_YM_OUT_DIR";

#[derive(Parser)]
#[command(name = "dec-ym", version, about = "Boundary data of abelian Yang-Mills on simplicial regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Four-way orthogonal decomposition of random cochains.
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Harmonic field dimensions against the Betti numbers.
    Harmonic {
        #[command(flatten)]
        common: Common,
    },
    /// Lagrangian embedding of boundary data of solutions.
    VerifyLagrangian {
        #[command(flatten)]
        common: Common,
    },
    /// Per-axiom verification suite.
    VerifyAxioms {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = axioms::DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Glue two faces of a region and compare solution spaces.
    Glue {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        face0: Option<String>,
        #[arg(long)]
        face1: Option<String>,
        /// JSON object mapping face1 vertices to face0 vertices.
        #[arg(long)]
        matching: Option<PathBuf>,
        /// Write the glued region as OFF (labels go next to it as .labels.json).
        #[arg(long)]
        glued_off: Option<PathBuf>,
    },
    /// Two-dimensional line check and reduced symplectic form.
    Ym2d {
        #[command(flatten)]
        common: Common,
        /// Comma-separated disk sizes for a refinement sweep.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Builtin spec (e.g. disk:N=64) or path to an OFF file.
    #[arg(long)]
    mesh: String,
    /// Face-label sidecar for OFF input.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol")]
    tol: Vec<String>,
    /// Report path; defaults to $DEC_YM_OUT_DIR/<command>.<ext> or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = axioms::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema_version: u32,
    command: &'static str,
    mesh: String,
    seed: u64,
    passed: bool,
    #[serde(flatten)]
    summary: BTreeMap<&'static str, serde_json::Value>,
    report: T,
}

struct Output {
    json: String,
    csv: Vec<u8>,
    passed: bool,
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

fn envelope<T: Serialize>(
    command: &'static str,
    common: &Common,
    passed: bool,
    summary: BTreeMap<&'static str, serde_json::Value>,
    report: T,
) -> String {
    let e = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        mesh: common.mesh.clone(),
        seed: common.seed,
        passed,
        summary,
        report,
    };
    serde_json::to_string_pretty(&e).expect("report serializes") + "\n"
}

fn load_mesh(common: &Common) -> Result<(RegionMesh, Option<BuiltinSpec>), Failure> {
    if let Ok(spec) = BuiltinSpec::parse(&common.mesh) {
        let mesh = spec.build().map_err(|e| Failure::Config(e.to_string()))?;
        return Ok((mesh, Some(spec)));
    }
    let path = Path::new(&common.mesh);
    if !path.is_file() {
        return Err(Failure::Config(format!(
            "`{}` is neither a builtin mesh spec nor a readable file",
            common.mesh
        )));
    }
    let mesh = load_off(path, common.labels.as_deref()).map_err(|e| Failure::Config(e.to_string()))?;
    Ok((mesh, None))
}

fn tolerances(common: &Common) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    for t in &common.tol {
        tol.apply_override(t).map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(tol)
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn decompose(common: &Common, mesh: &RegionMesh, tol: &Tolerances, degree: usize, trials: usize) -> Result<Output, Failure> {
    if degree > mesh.dim() {
        return Err(Failure::Config(format!("degree {degree} exceeds mesh dimension {}", mesh.dim())));
    }
    let r = hmf_report(mesh, degree, tol, trials, common.seed)?;
    let d = &r.dimensions;
    let csv = csv_table(
        &[
            "degree",
            "cochain_dim",
            "exact_dirichlet",
            "coexact_neumann",
            "harmonic_neumann",
            "harmonic_exact",
            "max_orthogonality",
            "max_reconstruction",
            "max_idempotence",
            "passed",
        ],
        vec![vec![
            d.degree.to_string(),
            d.cochain_dim.to_string(),
            d.exact_dirichlet.to_string(),
            d.coexact_neumann.to_string(),
            d.harmonic_neumann.to_string(),
            d.harmonic_exact.to_string(),
            fmt(r.max_orthogonality),
            fmt(r.max_reconstruction),
            fmt(r.max_idempotence),
            r.passed.to_string(),
        ]],
    );
    let passed = r.passed;
    Ok(Output {
        json: envelope("decompose", common, passed, BTreeMap::new(), r),
        csv,
        passed,
    })
}

#[derive(Serialize)]
struct HarmonicRow {
    degree: usize,
    neumann: usize,
    betti: usize,
    dirichlet: usize,
    relative_betti: usize,
    max_residual: f64,
}

fn harmonic(common: &Common, mesh: &RegionMesh, tol: &Tolerances) -> Result<Output, Failure> {
    let dec = Dec::region(mesh);
    let policy = RankPolicy::from(tol);
    let cx = mesh.complex();
    let mut rows = Vec::new();
    for k in 0..=mesh.dim() {
        let n = harmonic_neumann_basis_dec(&dec, k, policy)?;
        let d = harmonic_dirichlet_basis_dec(&dec, k, policy)?;
        rows.push(HarmonicRow {
            degree: k,
            neumann: n.dim(),
            betti: betti_oracle(cx, k),
            dirichlet: d.dim(),
            relative_betti: relative_betti_oracle(cx, k),
            max_residual: n.max_residual(&dec)?.max(d.max_residual(&dec)?),
        });
    }
    let passed = rows
        .iter()
        .all(|r| r.neumann == r.betti && r.dirichlet == r.relative_betti && r.max_residual <= tol.harmonic_residual);
    let csv = csv_table(
        &["degree", "neumann", "betti", "dirichlet", "relative_betti", "max_residual"],
        rows.iter()
            .map(|r| {
                vec![
                    r.degree.to_string(),
                    r.neumann.to_string(),
                    r.betti.to_string(),
                    r.dirichlet.to_string(),
                    r.relative_betti.to_string(),
                    fmt(r.max_residual),
                ]
            })
            .collect(),
    );
    let summary = BTreeMap::from([("harmonic_residual_tolerance", tol.harmonic_residual.into())]);
    Ok(Output {
        json: envelope("harmonic", common, passed, summary, rows),
        csv,
        passed,
    })
}

fn lagrangian(common: &Common, mesh: &RegionMesh, tol: &Tolerances) -> Result<Output, Failure> {
    let r = verify_lagrangian(mesh, tol)?;
    let d = &r.dims;
    let csv = csv_table(
        &[
            "solutions",
            "gauge_fixed_solutions",
            "boundary_phase_space",
            "image",
            "isotropy",
            "max_angle",
            "lagrangian",
            "passed",
        ],
        vec![vec![
            d.solutions.to_string(),
            d.gauge_fixed_solutions.to_string(),
            d.boundary_phase_space.to_string(),
            d.image.to_string(),
            fmt(r.isotropy.relative),
            fmt(r.lagrangian.max_angle),
            r.lagrangian.lagrangian.to_string(),
            r.passed.to_string(),
        ]],
    );
    let passed = r.passed;
    let summary = BTreeMap::from([("lagrangian", r.lagrangian.lagrangian.into())]);
    Ok(Output {
        json: envelope("verify-lagrangian", common, passed, summary, r),
        csv,
        passed,
    })
}

fn verify_axioms(common: &Common, mesh: &RegionMesh, spec: Option<&BuiltinSpec>, tol: &Tolerances, trials: usize) -> Result<Output, Failure> {
    let mut options = AxiomOptions {
        seed: common.seed,
        trials,
        extra_gluings: Vec::new(),
    };
    if let Some((face0, face1, matching)) = spec.and_then(BuiltinSpec::glue_data) {
        options.extra_gluings.push(GlueCase {
            mesh: mesh.clone(),
            face0,
            face1,
            matching,
        });
    }
    let r = axioms::verify_axioms(mesh, tol, &options)?;
    let mut rows = Vec::new();
    for a in &r.axioms {
        let status = serde_json::to_value(a.status).expect("status serializes");
        let status = status.as_str().unwrap_or_default().to_string();
        if a.checks.is_empty() {
            rows.push(vec![a.id.clone(), status.clone(), String::new(), String::new(), String::new(), String::new()]);
        }
        for (name, c) in &a.checks {
            rows.push(vec![
                a.id.clone(),
                status.clone(),
                name.clone(),
                fmt(c.value),
                fmt(c.tolerance),
                c.passed.to_string(),
            ]);
        }
    }
    let csv = csv_table(&["axiom", "status", "check", "value", "tolerance", "passed"], rows);
    let passed = r.passed;
    let json = serde_json::to_string_pretty(&r).expect("report serializes") + "\n";
    Ok(Output { json, csv, passed })
}

fn read_matching(path: &Path) -> Result<BTreeMap<usize, usize>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

#[allow(clippy::too_many_arguments)]
fn glue(
    common: &Common,
    mesh: &RegionMesh,
    spec: Option<&BuiltinSpec>,
    tol: &Tolerances,
    face0: Option<&str>,
    face1: Option<&str>,
    matching: Option<&Path>,
    glued_off: Option<&Path>,
) -> Result<Output, Failure> {
    let defaults = spec.and_then(BuiltinSpec::glue_data);
    let (f0, f1, m) = match (face0, face1, matching, defaults) {
        (Some(a), Some(b), Some(p), _) => (a.to_string(), b.to_string(), read_matching(p)?),
        (None, None, None, Some(d)) => d,
        (a, b, None, Some((d0, d1, m))) if a.is_none_or(|a| a == d0) && b.is_none_or(|b| b == d1) => (d0, d1, m),
        _ => {
            return Err(Failure::Config(
                "glue needs --face0, --face1 and --matching unless the builtin mesh has a natural gluing".into(),
            ))
        }
    };
    let (r, glued) = gluing_check(mesh, &f0, &f1, &m, tol).map_err(|e| match e {
        Error::UnknownLabel(_) | Error::Glue(_) => Failure::Config(e.to_string()),
        e => Failure::Run(e.to_string()),
    })?;
    if let Some(path) = glued_off {
        let labels = path.with_extension("labels.json");
        write_off(&glued, path, Some(&labels))?;
    }
    let csv = csv_table(
        &[
            "identified_edges",
            "flux_constraints",
            "source_solutions",
            "equalizer_dim",
            "glued_solutions",
            "angle_glued_in_equalizer",
            "angle_equalizer_in_glued",
            "action_residual",
            "betti_1_before",
            "betti_1_after",
            "passed",
        ],
        vec![vec![
            r.identified_edges.to_string(),
            r.flux_constraints.to_string(),
            r.source_solutions.to_string(),
            r.equalizer_dim.to_string(),
            r.glued_solutions.to_string(),
            fmt(r.angle_glued_in_equalizer),
            fmt(r.angle_equalizer_in_glued),
            fmt(r.action_residual),
            r.betti_1_before.to_string(),
            r.betti_1_after.to_string(),
            r.passed.to_string(),
        ]],
    );
    let passed = r.passed;
    Ok(Output {
        json: envelope("glue", common, passed, BTreeMap::new(), r),
        csv,
        passed,
    })
}

#[derive(Serialize)]
struct Ym2dReport {
    line: dec_ym::ym2d::LineReport,
    reduced_form: dec_ym::ym2d::ReducedFormReport,
    kappa_flag_gate: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sweep: Vec<dec_ym::ym2d::SweepRow>,
}

fn ym2d(common: &Common, mesh: &RegionMesh, tol: &Tolerances, sizes: &[usize]) -> Result<Output, Failure> {
    let line = lagrangian_line_check(mesh, tol)?;
    let sigma = mesh.boundary_complex()?;
    let reduced_form = reduced_form_check(&sigma, (1.0, 0.0), (0.0, 1.0))?;
    // the discrepancy flag must be raised with the coefficient of the formula
    let kappa_flag_gate = reduced_form.kappa_discrepancy
        && reduced_form.kappa.is_some_and(|k| (k - KAPPA_FORMULA).abs() <= tol.bracket_identity);
    let sweep = sweep(sizes, tol)?;
    let sweep_ok = sweep.iter().all(|r| r.residual <= tol.line_residual);
    let passed = line.passed && kappa_flag_gate && sweep_ok;
    let csv = if sweep.is_empty() {
        csv_table(
            &["c", "c_dot", "boundary_integral", "residual", "relative", "ratio_error"],
            line.samples
                .iter()
                .map(|s| {
                    vec![
                        fmt(s.datum.c),
                        fmt(s.datum.c_dot),
                        fmt(s.boundary_integral),
                        fmt(s.residual),
                        fmt(s.relative),
                        s.ratio_error.map(fmt).unwrap_or_default(),
                    ]
                })
                .collect(),
        )
    } else {
        let mut buf = Vec::new();
        dec_ym::ym2d::write_sweep_csv(&sweep, &mut buf)?;
        buf
    };
    let summary = BTreeMap::from([
        ("kappa", reduced_form.kappa.into()),
        ("kappa_discrepancy", reduced_form.kappa_discrepancy.into()),
    ]);
    let report = Ym2dReport {
        line,
        reduced_form,
        kappa_flag_gate,
        sweep,
    };
    Ok(Output {
        json: envelope("ym2d", common, passed, summary, report),
        csv,
        passed,
    })
}

fn destination(common: &Common, command: &str) -> Option<PathBuf> {
    if let Some(p) = &common.out {
        return Some(p.clone());
    }
    std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(format!("{command}.{}", common.format.extension())))
}

fn emit(common: &Common, command: &str, out: &Output) -> Result<(), Failure> {
    let bytes = match common.format {
        Format::Json => out.json.as_bytes(),
        Format::Csv => out.csv.as_slice(),
    };
    match destination(common, command) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Failure::Config(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&path, bytes).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Config(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let (name, common) = match &cli.command {
        Command::Decompose { common, .. } => ("decompose", common),
        Command::Harmonic { common } => ("harmonic", common),
        Command::VerifyLagrangian { common } => ("verify-lagrangian", common),
        Command::VerifyAxioms { common, .. } => ("verify-axioms", common),
        Command::Glue { common, .. } => ("glue", common),
        Command::Ym2d { common, .. } => ("ym2d", common),
    };
    let tol = tolerances(common)?;
    let (mesh, spec) = load_mesh(common)?;
    let out = match &cli.command {
        Command::Decompose { degree, trials, .. } => decompose(common, &mesh, &tol, *degree, *trials)?,
        Command::Harmonic { .. } => harmonic(common, &mesh, &tol)?,
        Command::VerifyLagrangian { .. } => lagrangian(common, &mesh, &tol)?,
        Command::VerifyAxioms { trials, .. } => verify_axioms(common, &mesh, spec.as_ref(), &tol, *trials)?,
        Command::Glue {
            face0,
            face1,
            matching,
            glued_off,
            ..
        } => glue(
            common,
            &mesh,
            spec.as_ref(),
            &tol,
            face0.as_deref(),
            face1.as_deref(),
            matching.as_deref(),
            glued_off.as_deref(),
        )?,
        Command::Ym2d { sweep, .. } => ym2d(common, &mesh, &tol, sweep)?,
    };
    emit(common, name, &out)?;
    Ok(out.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("verification error: {msg}");
            ExitCode::from(1)
        }
    }
}
