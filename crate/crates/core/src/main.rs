use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use convex_radii::affine::{
    general_dr_lower, maximize_wr_affine, minimize_dr_affine, radial_profile, wr_bounds, SearchOptions,
};
use convex_radii::asymmetry::{construction_minkowski, john_asymmetry, minkowski_asymmetry, AsymmetryReport};
use convex_radii::bodies::{ConvexBody, Ellipsoid, Subspace};
use convex_radii::constructions::{construct, Construction, Position, ScalarParams, FAMILIES};
use convex_radii::ellipsoid::{john_verify, normalize_john, normalize_loewner, PositionCertificate};
use convex_radii::error::GeomError;
use convex_radii::harness::{
    all_pass, body_json, decomposition_json, ellipsoid_json, kball_json, number, object, plot2d, read_body, rows,
    run_suite, to_string, vector, vectors, write_csv, BodyFile, HarnessError, Suite, SuiteConfig,
};
use convex_radii::radii::{inner_bound_report, outer_kradius, search_inner_kball, BoundReport};

#[derive(Parser)]
#[command(name = "geo", version, about = "Ellipsoid radii, asymmetry and affine ratios of convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named body with its certificate.
    Construct {
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        /// Index set for the enclosing polytope, e.g. `0,2`.
        #[arg(long, value_delimiter = ',')]
        j: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = PositionArg::John)]
        position: PositionArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Loewner ellipsoid of a body.
    Loewner {
        body: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// John ellipsoid of a body.
    John {
        body: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Contact decomposition certifying John or Loewner position.
    Decomposition {
        body: PathBuf,
        #[arg(long, value_enum, default_value_t = PositionArg::John)]
        position: PositionArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Minkowski or John asymmetry with its certificate
    Asymmetry {
        body: PathBuf,
        #[arg(long, value_enum, default_value_t = Measure::Minkowski)]
        measure: Measure,
    },
    /// Outer or inner k-radius against its asymmetry bound.
    Kradius {
        body: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Coordinate indices spanning the subspace (outer mode).
        #[arg(long, value_delimiter = ',')]
        subspace: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Width, diameter, circumradius and inradius.
    Ratios {
        body: PathBuf,
        #[arg(long)]
        gauge: Option<PathBuf>,
        #[arg(long)]
        optimize_affine: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a verification suite and write a CSV report.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        /// Check one body file instead of the built-in cases.
        #[arg(long)]
        body: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// SVG picture of a planar body.
    Plot2d {
        body: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PositionArg {
    John,
    Loewner,
}

impl From<PositionArg> for Position {
    fn from(p: PositionArg) -> Self {
        match p {
            PositionArg::John => Position::John,
            PositionArg::Loewner => Position::Loewner,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Minkowski,
    John,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Outer,
    Inner,
}

/// What a command produced: a document and whether every check passed.
struct Outcome {
    output: String,
    pass: bool,
}

impl Outcome {
    fn json(v: Value, pass: bool) -> Self {
        Self { output: to_string(&v), pass }
    }
}

fn exit_code(e: &HarnessError) -> u8 {
    match e {
        HarnessError::Geom(GeomError::NoConvergence { .. } | GeomError::ContainmentViolated { .. }) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("GEO_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let output = match &cli.command {
        Command::Construct { output, .. }
        | Command::Loewner { output, .. }
        | Command::John { output, .. }
        | Command::Decomposition { output, .. }
        | Command::Verify { output, .. }
        | Command::Plot2d { output, .. } => output.clone(),
        _ => None,
    };
    let result = run(cli.command).and_then(|out| {
        match &output {
            Some(path) => fs::write(path, &out.output).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?,
            None => print!("{}", out.output),
        }
        Ok(out.pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("geo: some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("geo: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> Result<Outcome, HarnessError> {
    match command {
        Command::Construct { family, n, k, s, t, tau, j, position, .. } => {
            if !FAMILIES.contains(&family.as_str()) {
                return Err(HarnessError::Format {
                    field: "family".into(),
                    message: format!("unknown family '{family}', expected one of {}", FAMILIES.join(", ")),
                });
            }
            let params = ScalarParams { k, s, t, tau, j, ..ScalarParams::new(n) };
            let c = construct(&family, &params, position.into()).map_err(|e| input_error(&e))?;
            Ok(Outcome::json(body_json(&BodyFile::from(c)), true))
        }
        Command::Loewner { body, .. } => position_ellipsoid(&body, Position::Loewner),
        Command::John { body, .. } => position_ellipsoid(&body, Position::John),
        Command::Decomposition { body, position, .. } => {
            let file = read_body(&body)?;
            let (normalized, cert) = normalize(&file.body, position.into())?;
            let rep = john_verify(&cert.decomposition, &normalized);
            let mut v = decomposition_json(&cert.decomposition);
            let extra = object(vec![
                ("position", Value::from(Position::from(position).name())),
                ("map_linear", rows(cert.map.linear())),
                ("map_translation", vector(cert.map.translation())),
                ("max_residual", number(rep.max_residual())),
                ("pass", Value::from(rep.pass)),
            ]);
            merge(&mut v, extra);
            Ok(Outcome::json(v, rep.pass))
        }
        Command::Asymmetry { body, measure } => {
            let file = read_body(&body)?;
            let rep = match measure {
                Measure::John => john_asymmetry(&file.body)?,
                Measure::Minkowski => minkowski(&file)?,
            };
            Ok(Outcome::json(asymmetry_json(&rep, measure), true))
        }
        Command::Kradius { body, k, mode, subspace, seed } => {
            let file = read_body(&body)?;
            let n = file.body.dim();
            if k == 0 || k >= n {
                return Err(HarnessError::Format { field: "k".into(), message: format!("must lie in [1, {}]", n - 1) });
            }
            match mode {
                Mode::Outer => kradius_outer(&file, k, subspace),
                Mode::Inner => kradius_inner(&file, k, seed),
            }
        }
        Command::Ratios { body, gauge, optimize_affine, seed } => {
            let k = read_body(&body)?;
            let c = gauge.as_deref().map(read_body).transpose()?;
            ratios(&k.body, c.as_ref().map(|f| &f.body), optimize_affine, seed)
        }
        Command::Verify { suite, n_max, samples, seed, tol, body, .. } => {
            let suite: Suite = suite.parse()?;
            let body = body.as_deref().map(read_body).transpose()?;
            let cfg = SuiteConfig { suite, n_max, samples, seed, tol, body };
            let rows = run_suite(&cfg)?;
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            eprintln!("{suite}: {} rows, {failed} failed", rows.len());
            Ok(Outcome { output: String::from_utf8(buf).expect("csv is utf-8"), pass: all_pass(&rows) })
        }
        Command::Plot2d { body, .. } => Ok(Outcome { output: plot2d(&read_body(&body)?)?, pass: true }),
    }
}

/// Parameter problems in a construction are input errors.
fn input_error(e: &GeomError) -> HarnessError {
    match e {
        GeomError::ParameterOutOfRange(m) | GeomError::InvalidInput(m) => {
            HarnessError::Format { field: "parameters".into(), message: m.clone() }
        }
        other => HarnessError::Geom(other.clone()),
    }
}

fn merge(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(e)) = (target, extra) {
        t.extend(e);
    }
}

fn normalize(body: &ConvexBody, position: Position) -> Result<(ConvexBody, PositionCertificate), HarnessError> {
    Ok(match position {
        Position::John => normalize_john(body)?,
        Position::Loewner => normalize_loewner(body)?,
    })
}

/// The John or Loewner ellipsoid: the preimage of `B^n` under the
/// normalizing map.
fn position_ellipsoid(path: &Path, position: Position) -> Result<Outcome, HarnessError> {
    let file = read_body(path)?;
    let (_, cert) = normalize(&file.body, position)?;
    let inv = cert.map.inverse();
    let e = Ellipsoid::from_map(inv.translation().clone(), inv.linear())?;
    Ok(Outcome::json(ellipsoid_json(&e), true))
}

fn minkowski(file: &BodyFile) -> Result<AsymmetryReport, HarnessError> {
    if let (Some(family), Some(params), Some(certificate)) = (&file.family, &file.params, &file.certificate) {
        if let Some(name) = FAMILIES.iter().find(|f| *f == family) {
            let c = Construction {
                family: name,
                params: params.clone(),
                body: file.body.clone(),
                certificate: certificate.clone(),
            };
            return Ok(construction_minkowski(&c)?);
        }
    }
    Ok(minkowski_asymmetry(&file.body)?)
}

fn asymmetry_json(rep: &AsymmetryReport, measure: Measure) -> Value {
    object(vec![
        ("measure", Value::from(match measure {
            Measure::Minkowski => "minkowski",
            Measure::John => "john",
        })),
        ("value", number(rep.value)),
        ("witness_center", vector(&rep.witness_center)),
        ("binding_directions", vectors(&rep.binding_directions)),
        ("method", Value::from(rep.method.name())),
    ])
}

fn report_json(r: &BoundReport) -> Value {
    let mut v = object(vec![
        ("quantity", Value::from(r.quantity.clone())),
        ("measured", number(r.measured)),
        ("bound", number(r.bound)),
        ("slack", number(r.slack)),
        ("pass", Value::from(r.pass)),
    ]);
    if let Some(eq) = &r.equality {
        merge(
            &mut v,
            object(vec![(
                "equality",
                object(vec![
                    ("center_norm", number(eq.center_norm)),
                    ("expected_center_norm", number(eq.expected_center_norm)),
                    ("perpendicularity", number(eq.perpendicularity)),
                    ("radius_spread", number(eq.radius_spread)),
                    ("holds", Value::from(eq.holds)),
                ]),
            )]),
        );
    }
    v
}

/// Outer bound, after moving the body to Loewner position.
fn kradius_outer(file: &BodyFile, k: usize, subspace: Option<Vec<usize>>) -> Result<Outcome, HarnessError> {
    let n = file.body.dim();
    let idx = subspace.unwrap_or_else(|| (0..k).collect());
    if idx.len() != k || idx.iter().any(|&i| i >= n) {
        return Err(HarnessError::Format {
            field: "subspace".into(),
            message: format!("expected {k} distinct coordinates below {n}"),
        });
    }
    let (body, _) = normalize_loewner(&file.body)?;
    let f = Subspace::coordinate(n, &idx).map_err(|e| HarnessError::Format { field: "subspace".into(), message: e.to_string() })?;
    let r = outer_kradius(&body, &f)?;
    let pass = r.ball.pass && r.volume.pass;
    Ok(Outcome::json(
        object(vec![
            ("mode", Value::from("outer")),
            ("k", Value::from(k)),
            ("subspace", Value::from(idx)),
            ("ball", report_json(&r.ball)),
            ("volume", report_json(&r.volume)),
            ("meb_center", vector(&r.meb.center)),
        ]),
        pass,
    ))
}

/// Inner bound for a body in John position; uses an attached k-ball when
/// the file carries one, otherwise searches for a large inscribed k-ball.
fn kradius_inner(file: &BodyFile, k: usize, seed: u64) -> Result<Outcome, HarnessError> {
    let attached = file
        .certificate
        .as_ref()
        .filter(|c| c.kball.as_ref().is_some_and(|e| e.k() == k))
        .filter(|c| john_verify(&c.decomposition, &file.body).pass);
    let (body, contacts, kball, inner_points, s) = match attached {
        Some(c) => {
            let s = match c.john_asymmetry {
                Some(s) => s,
                None => john_asymmetry(&file.body)?.value,
            };
            (file.body.clone(), c.decomposition.contacts.clone(), c.kball.clone().expect("filtered"), c.inner_points.clone(), s)
        }
        None => {
            let (body, cert) = normalize_john(&file.body)?;
            let s = john_asymmetry(&body)?.value;
            let e = search_inner_kball(&body, k, 2, seed)?;
            (body, cert.decomposition.contacts, e, Vec::new(), s)
        }
    };
    let rep = inner_bound_report(&body, s, &kball, &inner_points, &contacts)?;
    let pass = rep.theorem.pass && rep.ball.pass && rep.containment.certifying;
    let mut fields = vec![
        ("mode", Value::from("inner")),
        ("k", Value::from(k)),
        ("john_asymmetry", number(s)),
        ("kball", kball_json(&kball)),
        ("containment_slack", number(rep.containment.slack)),
        ("containment_method", Value::from(rep.containment.method.name())),
        ("theorem", report_json(&rep.theorem)),
        ("simplex_bound", report_json(&rep.ball)),
    ];
    if let Some(sym) = &rep.symmetric {
        fields.push(("symmetric_bound", report_json(sym)));
    }
    Ok(Outcome::json(object(fields), pass))
}

fn ratios(k: &ConvexBody, c: Option<&ConvexBody>, optimize: bool, seed: u64) -> Result<Outcome, HarnessError> {
    let p = radial_profile(k, c)?;
    let mut fields = vec![
        ("width", number(p.w.upper)),
        ("width_lower", number(p.w.lower)),
        ("diameter", number(p.d)),
        ("circumradius", number(p.big_r)),
        ("inradius", number(p.r)),
        ("w_over_2R", number(p.w.upper / (2.0 * p.big_r))),
        ("D_over_2r", number(p.d / (2.0 * p.r))),
    ];
    let mut pass = p.consistent(1e-9);
    if optimize {
        let opts = SearchOptions { seed, ..SearchOptions::default() };
        let dr = minimize_dr_affine(k, c, opts)?;
        let sk = minkowski_asymmetry(k)?.value;
        let sc = match c {
            Some(c) => minkowski_asymmetry(c)?.value,
            None => 1.0,
        };
        let lower = general_dr_lower(sk, sc);
        pass &= dr.best_ratio >= lower - 1e-6 && dr.best_ratio <= k.dim() as f64 + 1e-6;
        fields.push(("min_D_over_2r", number(dr.best_ratio)));
        fields.push(("min_D_over_2r_lower_bound", number(lower)));
        fields.push(("min_D_over_2r_method", Value::from(dr.method.name())));
        if c.is_none() && k.dim() <= 3 {
            let wr = maximize_wr_affine(k, opts)?;
            let (lo, hi) = wr_bounds(k.dim(), sk);
            pass &= wr.best_ratio <= hi + 1e-6;
            fields.push(("max_w_over_2R", number(wr.best_ratio)));
            fields.push(("max_w_over_2R_bounds", Value::Array(vec![number(lo), number(hi)])));
        }
    }
    fields.push(("pass", Value::from(pass)));
    Ok(Outcome::json(object(fields), pass))
}
