//! Verification suites: each one expands into seeded cases, runs them on
//! the rayon pool and emits flat rows sorted by case id.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::json::BodyFile;
use super::random::random_john_body;
use super::HarnessError;
use crate::affine::{
    general_dr_lower, maximize_wr_affine, minimize_dr_affine, shear_inflation_check, dr_bounds, wr_bounds,
    SearchOptions,
};
use crate::asymmetry::{asymmetry_gap_scan, construction_minkowski, john_asymmetry, minkowski_asymmetry};
use crate::bodies::{self, ConvexBody, Subspace, VPolytope};
use crate::constructions::{
    construct, construction_tau_range, d_s, f_s, high_asym_body, mid_asym_body, mu, outer_family, regular_body,
    rounding_body, s_threshold, simplex_alignment_exists, small_asym_body, tau, tau_equation, tau_other_root,
    xi_star, Construction, Position, RegularKind, ScalarParams,
};
use crate::ellipsoid::{john_decomposition, john_verify, normalize_loewner, CONTACT_TOL};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Vector};
use crate::radii::{
    ball_lemma_equality_instance, hyperplane_projection_radius, inner_bound_report,
    oracle_ball_lemma, oracle_ellip_support, oracle_john_vectors, outer_kradius, planar_diameter_report,
    regular_outer_kradius, sampled_ellip_support, search_inner_kball, simplex_min_halfwidth, InnerReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    JohnIdentities,
    OuterBound,
    InnerBound,
    PlanarDiameter,
    ScalarLemmas,
    Rounding,
    AffineRatios,
    Oracles,
}

pub const SUITES: [Suite; 8] = [
    Suite::JohnIdentities,
    Suite::OuterBound,
    Suite::InnerBound,
    Suite::PlanarDiameter,
    Suite::ScalarLemmas,
    Suite::Rounding,
    Suite::AffineRatios,
    Suite::Oracles,
];

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::JohnIdentities => "john-identities",
            Suite::OuterBound => "outer-bound",
            Suite::InnerBound => "inner-bound",
            Suite::PlanarDiameter => "planar-diameter",
            Suite::ScalarLemmas => "scalar-lemmas",
            Suite::Rounding => "rounding",
            Suite::AffineRatios => "affine-ratios",
            Suite::Oracles => "oracles",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SUITES.iter().copied().find(|x| x.name() == s).ok_or_else(|| HarnessError::Format {
            field: "suite".into(),
            message: format!(
                "unknown suite '{s}', expected one of {}",
                SUITES.map(Suite::name).join(", ")
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Largest dimension visited; each suite also has its own cap.
    pub n_max: usize,
    /// Number of random instances (or batches, for the oracles).
    pub samples: usize,
    pub seed: u64,
    /// Replaces every per-row tolerance when set.
    pub tol: Option<f64>,
    /// Runs the suite on this body alone.
    pub body: Option<BodyFile>,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        Self { suite, n_max: 4, samples: 20, seed: 0, tol: None, body: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub suite: &'static str,
    pub case_id: String,
    pub n: usize,
    pub k: Option<usize>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub quantity: String,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
    pub method: String,
    pub seed: u64,
}

impl Row {
    fn and(mut self, ok: bool) -> Self {
        self.pass &= ok;
        self
    }
}

#[derive(Debug, Clone, Copy)]
enum Check {
    /// `|measured - bound| <= tol`
    Equal(f64),
    /// `measured <= bound + tol`
    AtMost(f64),
    /// `measured >= bound - tol`
    AtLeast(f64),
    /// `measured < bound`
    Below,
}

/// Where a row comes from; every row of a case shares these columns.
#[derive(Debug, Clone)]
struct Case {
    suite: Suite,
    id: String,
    n: usize,
    k: Option<usize>,
    s: Option<f64>,
    t: Option<f64>,
    seed: u64,
    tol: Option<f64>,
}

impl Case {
    fn row(&self, quantity: &str, measured: f64, bound: f64, check: Check, method: &str) -> Row {
        let tol = |t: f64| self.tol.unwrap_or(t);
        let (slack, pass) = match check {
            Check::Equal(t) => (bound - measured, (bound - measured).abs() <= tol(t)),
            Check::AtMost(t) => (bound - measured, bound - measured >= -tol(t)),
            Check::AtLeast(t) => (measured - bound, measured - bound >= -tol(t)),
            Check::Below => (bound - measured, measured < bound),
        };
        Row {
            suite: self.suite.name(),
            case_id: self.id.clone(),
            n: self.n,
            k: self.k,
            s: self.s,
            t: self.t,
            quantity: quantity.to_string(),
            measured,
            bound,
            slack,
            pass: pass && measured.is_finite(),
            method: method.to_string(),
            seed: self.seed,
        }
    }

    /// A residual that must not exceed `tol`; the tolerance is the bound.
    fn residual(&self, quantity: &str, measured: f64, tol: f64, method: &str) -> Row {
        let bound = self.tol.unwrap_or(tol);
        self.row(quantity, measured, bound, Check::AtMost(0.0), method)
            .and(measured <= bound)
    }

    fn failure(&self, err: &GeomError) -> Row {
        self.row("error", f64::NAN, f64::NAN, Check::Below, &err.to_string()).and(false)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    fn s(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }

    fn t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }
}

type Job = Box<dyn Fn(&Case) -> Result<Vec<Row>> + Send + Sync>;

struct Plan {
    cfg: SuiteConfig,
    tasks: Vec<(Case, Job)>,
}

/// The `index`-th seed split off `master`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

impl Plan {
    fn new(cfg: &SuiteConfig) -> Self {
        Self { cfg: cfg.clone(), tasks: Vec::new() }
    }

    fn case(&self, id: String, n: usize) -> Case {
        Case {
            suite: self.cfg.suite,
            id,
            n,
            k: None,
            s: None,
            t: None,
            seed: split_seed(self.cfg.seed, self.tasks.len() as u64),
            tol: self.cfg.tol,
        }
    }

    fn push(&mut self, case: Case, job: impl Fn(&Case) -> Result<Vec<Row>> + Send + Sync + 'static) {
        self.tasks.push((case, Box::new(job)));
    }

    fn add(&mut self, id: String, n: usize, edit: impl FnOnce(Case) -> Case, job: impl Fn(&Case) -> Result<Vec<Row>> + Send + Sync + 'static) {
        let case = edit(self.case(id, n));
        self.push(case, job);
    }

    fn dims(&self, cap: usize) -> std::ops::RangeInclusive<usize> {
        2..=self.cfg.n_max.min(cap)
    }

    fn run(self) -> Vec<Row> {
        let mut rows: Vec<Row> = self
            .tasks
            .par_iter()
            .flat_map_iter(|(case, job)| job(case).unwrap_or_else(|e| vec![case.failure(&e)]))
            .collect();
        rows.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        rows
    }
}

/// `m` evenly spaced points of `[lo, hi]`, or `lo` alone for a degenerate
/// interval.
fn grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    if m <= 1 || hi - lo <= 1e-12 {
        return vec![lo];
    }
    (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
}

pub fn run_suite(cfg: &SuiteConfig) -> std::result::Result<Vec<Row>, HarnessError> {
    if cfg.n_max < 2 {
        return Err(HarnessError::Format { field: "n-max".into(), message: "must be at least 2".into() });
    }
    let mut plan = Plan::new(cfg);
    if let Some(body) = &cfg.body {
        single_body(&mut plan, body.clone())?;
        return Ok(plan.run());
    }
    match cfg.suite {
        Suite::JohnIdentities => john_identities(&mut plan),
        Suite::OuterBound => outer_bound(&mut plan),
        Suite::InnerBound => inner_bound(&mut plan),
        Suite::PlanarDiameter => planar_diameter(&mut plan),
        Suite::ScalarLemmas => scalar_lemmas(&mut plan),
        Suite::Rounding => rounding(&mut plan),
        Suite::AffineRatios => affine_ratios(&mut plan),
        Suite::Oracles => oracles(&mut plan),
    }
    Ok(plan.run())
}

pub fn all_pass(rows: &[Row]) -> bool {
    !rows.is_empty() && rows.iter().all(|r| r.pass)
}

pub fn write_csv<W: std::io::Write>(rows: &[Row], out: W) -> std::result::Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))
}

// ---------------------------------------------------------------- bodies

fn single_body(plan: &mut Plan, file: BodyFile) -> std::result::Result<(), HarnessError> {
    let n = file.body.dim();
    let id = file.family.clone().unwrap_or_else(|| "body".into());
    let s_hint = file.certificate.as_ref().and_then(|c| c.john_asymmetry);
    let edit = |c: Case| Case { k: file.params.as_ref().and_then(|p| p.k), s: s_hint, ..c };
    match plan.cfg.suite {
        Suite::JohnIdentities => plan.add(id, n, edit, move |case| {
            let (decomposition, position) = match &file.certificate {
                Some(c) => (c.decomposition.clone(), c.position),
                None => (john_decomposition(&file.body, CONTACT_TOL)?, Position::John),
            };
            Ok(vec![identity_row(case, &decomposition, &file.body, position.name())])
        }),
        Suite::PlanarDiameter => plan.add(id, n, edit, move |case| {
            let s = match s_hint {
                Some(s) => s,
                None => john_asymmetry(&file.body)?.value,
            };
            Ok(planar_rows(case, &file.body, s.min(2.0), false)?)
        }),
        Suite::InnerBound => {
            let cert = file.certificate.clone().filter(|c| c.kball.is_some()).ok_or_else(|| HarnessError::Format {
                field: "certificate.kball".into(),
                message: "inner-bound on a single body needs an attached k-ball".into(),
            })?;
            plan.add(id, n, edit, move |case| {
                let s = match cert.john_asymmetry {
                    Some(s) => s,
                    None => john_asymmetry(&file.body)?.value,
                };
                let e = cert.kball.as_ref().expect("checked above");
                let rep = inner_bound_report(&file.body, s, e, &cert.inner_points, &cert.decomposition.contacts)?;
                Ok(inner_rows(case, &rep, rep.theorem.near_equality()))
            })
        }
        other => {
            return Err(HarnessError::Format {
                field: "body".into(),
                message: format!("suite {other} does not run on a single body"),
            })
        }
    }
    Ok(())
}

fn identity_row(case: &Case, d: &crate::ellipsoid::JohnDecomposition, body: &ConvexBody, method: &str) -> Row {
    let rep = john_verify(d, body);
    case.residual("john decomposition residual", rep.max_residual(), 1e-6, method)
        .and(rep.min_weight > 0.0)
}

/// Parameter grids for the three inner-bound regimes: `[s_{n,k}, n]`,
/// `[1 + 2/n, s_{n,k}]` and `[1, 1 + 2/n]`.
fn regimes(n: usize, k: usize, m: usize) -> Vec<(&'static str, Vec<f64>)> {
    let nf = n as f64;
    let st = s_threshold(n, k).expect("1 <= k < n");
    vec![
        ("high-asym", grid(st, nf, m)),
        ("mid-asym", grid(1.0 + 2.0 / nf, st, m)),
        ("small-asym", grid(1.0, 1.0 + 2.0 / nf, m)),
    ]
}

fn family_body(family: &str, n: usize, k: usize, s: f64) -> Result<Construction> {
    match family {
        "high-asym" => high_asym_body(n, k, s),
        "mid-asym" => mid_asym_body(n, k, s),
        _ => small_asym_body(n, k, s),
    }
}

// ------------------------------------------------------- john-identities

fn john_identities(plan: &mut Plan) {
    for n in plan.dims(6) {
        for kind in [RegularKind::Simplex, RegularKind::Cube, RegularKind::CrossPolytope] {
            for pos in [Position::John, Position::Loewner] {
                let family = match kind {
                    RegularKind::Simplex => "simplex",
                    RegularKind::Cube => "cube",
                    RegularKind::CrossPolytope => "cross-polytope",
                };
                plan.add(format!("{family}/n{n}/{}", pos.name()), n, |c| c, move |case| {
                    let c = regular_body(kind, n, pos)?;
                    Ok(vec![identity_row(case, &c.certificate.decomposition, &c.body, pos.name())])
                });
            }
        }
        for k in 1..n {
            for (i, t) in grid(0.0, 2.0, 5).into_iter().enumerate() {
                plan.add(format!("outer/n{n}/k{k}/t{i}"), n, |c| c.k(k).t(t), move |case| {
                    let c = outer_family(n, k, t)?;
                    Ok(vec![identity_row(case, &c.certificate.decomposition, &c.body, "loewner")])
                });
            }
        }
        for j in 1..n {
            let (lo, hi) = construction_tau_range(n, j);
            for (i, tau) in grid(lo, hi, 3).into_iter().enumerate() {
                plan.add(format!("polytope/n{n}/j{j}/tau{i}"), n, |c| c, move |case| {
                    let p = ScalarParams { j: Some((0..j).collect()), tau: Some(tau), ..ScalarParams::new(n) };
                    let c = construct("polytope", &p, Position::John)?;
                    Ok(vec![identity_row(case, &c.certificate.decomposition, &c.body, "john")])
                });
            }
        }
        for k in 1..n {
            for (family, ss) in regimes(n, k, 4) {
                for (i, s) in ss.into_iter().enumerate() {
                    plan.add(format!("{family}/n{n}/k{k}/s{i}"), n, |c| c.k(k).s(s), move |case| {
                        let c = family_body(family, n, k, s)?;
                        Ok(vec![identity_row(case, &c.certificate.decomposition, &c.body, "john")])
                    });
                }
            }
        }
        for (i, s) in grid(1.0, n as f64, 4).into_iter().enumerate() {
            plan.add(format!("rounding/n{n}/s{i}"), n, |c| c.s(s), move |case| {
                let c = rounding_body(n, s)?;
                Ok(vec![identity_row(case, &c.certificate.decomposition, &c.body, "john")])
            });
        }
    }
    let dims: Vec<usize> = plan.dims(6).collect();
    for i in 0..plan.cfg.samples {
        let n = dims[i % dims.len()];
        plan.add(format!("random/{i:05}"), n, |c| c, move |case| {
            let b = random_john_body(n, 1 + i % 6, case.seed)?;
            Ok(vec![identity_row(case, &b.decomposition, &b.body, b.generator.name())])
        });
    }
}

// ----------------------------------------------------------- outer-bound

fn outer_bound(plan: &mut Plan) {
    for n in plan.dims(5) {
        for k in 1..n {
            let t_max = if simplex_alignment_exists(n, k) { 2.0 } else { 1.0 };
            for (i, t) in grid(0.0, t_max, 50).into_iter().enumerate() {
                plan.add(format!("family/n{n}/k{k}/t{i:02}"), n, |c| c.k(k).t(t), move |case| {
                    let c = outer_family(n, k, t)?;
                    let f = Subspace::coordinate(n, &(0..k).collect::<Vec<_>>())?;
                    let r = outer_kradius(&c.body, &f)?;
                    let eq = r.volume.equality.as_ref().is_some_and(|e| e.holds);
                    Ok(vec![
                        case.row("outer k-ball radius", r.ball.measured, r.ball.bound, Check::Equal(1e-6), "meb"),
                        case.row("outer k-ellipsoid volume radius", r.volume.measured, r.volume.bound, Check::Equal(1e-6), "mvee")
                            .and(eq),
                    ])
                });
            }
        }
        if n % 2 == 0 {
            plan.add(format!("simplex/n{n}/k1"), n, |c| c.k(1), move |case| {
                let c = regular_body(RegularKind::Simplex, n, Position::Loewner)?;
                let (hw, _) = simplex_min_halfwidth(&bodies::extreme_points(&c.body)?)?;
                let expect = regular_outer_kradius(RegularKind::Simplex, n, 1);
                Ok(vec![case.row("simplex outer 1-radius", hw, expect, Check::Equal(1e-6), "vertex-splits")])
            });
            plan.add(format!("simplex/n{n}/k{}", n - 1), n, |c| c.k(n - 1), move |case| {
                let c = regular_body(RegularKind::Simplex, n, Position::Loewner)?;
                let v = bodies::extreme_points(&c.body)?;
                let starts = crate::radii::split_directions(&v);
                let (r, _) = hyperplane_projection_radius(&v, &starts);
                let expect = regular_outer_kradius(RegularKind::Simplex, n, n - 1);
                Ok(vec![case.row("simplex outer (n-1)-radius", r, expect, Check::Equal(1e-6), "hyperplane-search")])
            });
        }
    }
    let dims: Vec<usize> = plan.dims(5).collect();
    for i in 0..plan.cfg.samples {
        let n = dims[i % dims.len()];
        plan.add(format!("random/{i:05}"), n, |c| c, move |case| {
            let mut rng = case.rng();
            let k = rng.gen_range(1..n);
            let pts: Vec<Vector> = (0..n + 2 + i % 5).map(|_| linalg::random_gaussian(&mut rng, n)).collect();
            let (body, _) = normalize_loewner(&VPolytope::new(pts)?.into())?;
            let dirs: Vec<Vector> = (0..k).map(|_| linalg::random_gaussian(&mut rng, n)).collect();
            let f = Subspace::span(&dirs)?;
            let r = outer_kradius(&body, &f)?;
            let case = case.clone().k(k);
            Ok(vec![
                case.row("outer k-ball radius", r.ball.measured, r.ball.bound, Check::AtLeast(1e-7), "meb"),
                case.row("outer k-ellipsoid volume radius", r.volume.measured, r.volume.bound, Check::AtLeast(1e-7), "mvee"),
            ])
        });
    }
}

// ----------------------------------------------------------- inner-bound

fn inner_rows(case: &Case, rep: &InnerReport, tight: bool) -> Vec<Row> {
    let method = rep.containment.method.name();
    let th = &rep.theorem;
    let mut rows = vec![
        case.row("containment slack", rep.containment.slack, 0.0, Check::AtLeast(1e-7), method)
            .and(rep.containment.certifying),
        if tight {
            case.row("inner k-ball volume radius", th.measured, th.bound, Check::Equal(1e-7), method)
        } else {
            case.row("inner k-ball volume radius", th.measured, th.bound, Check::AtMost(1e-7), method)
        },
        case.row("inner k-ball volume radius (simplex bound)", rep.ball.measured, rep.ball.bound, Check::AtMost(1e-7), method),
    ];
    if let Some(sym) = &rep.symmetric {
        rows.push(case.row("inner k-ball volume radius (symmetric bound)", sym.measured, sym.bound, Check::AtMost(1e-7), method));
    }
    if tight {
        match &th.equality {
            Some(eq) => {
                rows.push(case.row(
                    "k-ball center norm squared",
                    eq.center_norm * eq.center_norm,
                    eq.expected_center_norm * eq.expected_center_norm,
                    Check::Equal(1e-7),
                    "equality-certificate",
                ));
                rows.push(case.residual("carrier perpendicularity", eq.perpendicularity, 1e-7, "equality-certificate"));
                rows.push(case.residual("k-ball semi-axis spread", eq.radius_spread, 1e-7, "equality-certificate"));
            }
            None => rows.push(case.row("equality certificate", f64::NAN, 0.0, Check::Below, "missing").and(false)),
        }
    }
    rows
}

fn inner_bound(plan: &mut Plan) {
    for n in plan.dims(6) {
        let nf = n as f64;
        for k in 1..n {
            for (family, ss) in regimes(n, k, 5) {
                let small = family == "small-asym";
                for (i, s) in ss.into_iter().enumerate() {
                    // the bound is attained for s outside (1, 1 + 2/n)
                    let tight = !small || s <= 1.0 || s >= 1.0 + 2.0 / nf;
                    plan.add(format!("{family}/n{n}/k{k}/s{i}"), n, |c| c.k(k).s(s), move |case| {
                        let c = family_body(family, n, k, s)?;
                        let e = c.kball().ok_or(GeomError::RepresentationUnavailable("k-ball".into()))?;
                        let cert = &c.certificate;
                        let rep = inner_bound_report(&c.body, s, e, &cert.inner_points, &cert.decomposition.contacts)?;
                        Ok(inner_rows(case, &rep, tight))
                    });
                }
            }
        }
    }
    let dims: Vec<usize> = plan.dims(4).collect();
    for i in 0..plan.cfg.samples {
        let n = dims[i % dims.len()];
        plan.add(format!("random/{i:05}"), n, |c| c, move |case| {
            let b = random_john_body(n, 1 + i % 5, case.seed)?;
            let k = 1 + (case.seed % (n as u64 - 1)) as usize;
            let s = john_asymmetry(&b.body)?.value;
            let e = search_inner_kball(&b.body, k, 1, case.seed)?;
            let rep = inner_bound_report(&b.body, s, &e, &[], &b.decomposition.contacts)?;
            let case = case.clone().k(k).s(s);
            Ok(inner_rows(&case, &rep, false))
        });
    }
}

// ------------------------------------------------------- planar-diameter

fn planar_rows(case: &Case, body: &ConvexBody, s: f64, tight: bool) -> Result<Vec<Row>> {
    let r = planar_diameter_report(body, s)?;
    let rep = &r.report;
    let mut rows = vec![if tight {
        case.row("planar diameter", rep.measured, rep.bound, Check::Equal(1e-8), "john-asymmetry-bound")
    } else {
        case.row("planar diameter", rep.measured, rep.bound, Check::AtMost(1e-8), "john-asymmetry-bound")
    }];
    match &rep.equality {
        Some(eq) => {
            rows.push(case.residual("diameter endpoint norm error", eq.radius_error, 1e-7, "equality-certificate"));
            rows.push(case.residual(
                "diameter midpoint norm error",
                (eq.center_norm - eq.expected_center_norm).abs(),
                1e-7,
                "equality-certificate",
            ));
        }
        None if tight => rows.push(case.row("equality certificate", f64::NAN, 0.0, Check::Below, "missing").and(false)),
        None => {}
    }
    Ok(rows)
}

fn planar_diameter(plan: &mut Plan) {
    for (i, s) in grid(1.0, 2.0, 21).into_iter().enumerate() {
        plan.add(format!("small-asym/s{i:02}"), 2, |c| c.k(1).s(s), move |case| {
            let c = small_asym_body(2, 1, s)?;
            planar_rows(case, &c.body, s, true)
        });
    }
    for i in 0..plan.cfg.samples {
        plan.add(format!("random/{i:05}"), 2, |c| c, move |case| {
            let b = random_john_body(2, 1 + i % 6, case.seed)?;
            let s = john_asymmetry(&b.body)?.value.min(2.0);
            planar_rows(&case.clone().s(s), &b.body, s, false)
        });
    }
}

// ---------------------------------------------------------- scalar-lemmas

fn scalar_lemmas(plan: &mut Plan) {
    const GRID: usize = 200;
    for n in plan.dims(12) {
        let nf = n as f64;
        for k in 1..n {
            plan.add(format!("mu-tau/n{n:02}/k{k:02}"), n, |c| c.k(k), move |case| {
                let kf = k as f64;
                let (lo, hi) = (1.0, 1.0 + 2.0 / nf);
                let ss = grid(lo, hi, GRID);
                let mus: Vec<f64> = ss.iter().map(|&s| mu(n, k, s)).collect::<Result<_>>()?;
                let taus: Vec<f64> = mus.iter().map(|&m| tau(n, k, m.clamp(nf, nf + 1.0))).collect::<Result<_>>()?;
                let min_step = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                let root = mus
                    .iter()
                    .zip(&taus)
                    .map(|(&m, &t)| tau_equation(n, k, m, t).abs())
                    .fold(0.0, f64::max);
                let other = mus
                    .iter()
                    .map(|&m| tau_other_root(n, k, m.clamp(nf, nf + 1.0)))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max);
                let identity = ss
                    .iter()
                    .zip(&mus)
                    .zip(&taus)
                    .map(|((&s, &m), &t)| ((s - 1.0) * t - 2.0 / nf * (m - nf).max(0.0).sqrt()).abs())
                    .fold(0.0, f64::max);
                let m_n = nf;
                Ok(vec![
                    case.row("mu at s = 1", mu(n, k, lo)?, nf, Check::Equal(1e-12), "closed-form"),
                    case.row("mu at s = 1 + 2/n", mu(n, k, hi)?, nf + 1.0, Check::Equal(1e-12), "closed-form"),
                    case.row("mu grid increment (min)", min_step(&mus), 0.0, Check::AtLeast(0.0), "grid")
                        .and(min_step(&mus) > 0.0),
                    case.row("tau at mu = n", tau(n, k, m_n)?, ((nf - kf) / nf).sqrt(), Check::Equal(1e-12), "closed-form"),
                    case.row("tau at mu = n + 1", tau(n, k, nf + 1.0)?, 1.0, Check::Equal(1e-12), "closed-form"),
                    case.row("tau grid increment (min)", min_step(&taus), 0.0, Check::AtLeast(0.0), "grid")
                        .and(min_step(&taus) > 0.0),
                    case.residual("tau root residual (max)", root, 1e-10, "grid"),
                    case.row("other root (max)", other, 0.0, Check::Below, "grid"),
                    case.residual("tau-mu identity residual (max)", identity, 1e-10, "grid"),
                ])
            });
        }
    }
    for (i, s) in grid(1.1, 1.9, 9).into_iter().enumerate() {
        plan.add(format!("planar/s{i}"), 2, |c| c.s(s), move |case| {
            let xs = xi_star(s)?;
            let top = f_s(s, xs)?;
            let d = d_s(s)?;
            let hi = (2.0 * s).sqrt();
            let worst = (1..=1000)
                .map(|j| f_s(s, xs + (hi - xs) * j as f64 / 1000.0))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(vec![
                case.residual("f at maximizer minus (D^2 - 5)", (top - (d * d - 5.0)).abs(), 1e-10, "closed-form"),
                case.row("maximizer inside (s, sqrt(2s))", xs, hi, Check::Below, "closed-form").and(xs > s),
                case.row("f on grid past maximizer (max)", worst, top, Check::Below, "grid"),
            ])
        });
    }
}

// --------------------------------------------------------------- rounding

fn rounding(plan: &mut Plan) {
    for n in plan.dims(6) {
        let nf = n as f64;
        for (i, s) in grid(1.0, nf, 9).into_iter().enumerate() {
            plan.add(format!("spindle/n{n}/s{i}"), n, |c| c.s(s), move |case| {
                let c = rounding_body(n, s)?;
                let far = bodies::max_norm(&c.body)?;
                let sj = john_asymmetry(&c.body)?.value;
                let mk = construction_minkowski(&c)?;
                Ok(vec![
                    case.row("circumradius from origin", far, (nf * s).sqrt(), Check::Equal(1e-8), "apexes"),
                    case.row("john asymmetry", sj, s, Check::Equal(1e-7), "apex-gauges"),
                    case.row("minkowski asymmetry", mk.value, 2.0 * s / (s + 1.0), Check::Equal(1e-6), mk.method.name()),
                ])
            });
        }
        plan.add(format!("gap/n{n}"), n, |c| c.s(nf), move |case| {
            let row = &asymmetry_gap_scan(n, &[nf])?[0];
            Ok(vec![case.row("john over minkowski asymmetry", row.ratio, (nf + 1.0) / 2.0, Check::Equal(1e-6), row.minkowski_method.name())])
        });
    }
    let dims: Vec<usize> = plan.dims(4).collect();
    for i in 0..plan.cfg.samples {
        let n = dims[i % dims.len()];
        plan.add(format!("random/{i:05}"), n, |c| c, move |case| {
            let b = random_john_body(n, 1 + i % 6, case.seed)?;
            let sj = john_asymmetry(&b.body)?.value;
            let far = bodies::max_norm(&b.body)?;
            let case = case.clone().s(sj);
            Ok(vec![
                case.row("circumradius from origin (upper)", far, (n as f64 * sj).sqrt(), Check::AtMost(1e-7), b.generator.name()),
                case.row("circumradius from origin (lower)", far, sj, Check::AtLeast(1e-7), b.generator.name()),
            ])
        });
    }
}

// ---------------------------------------------------------- affine-ratios

fn search_opts(seed: u64, restarts: usize) -> SearchOptions {
    SearchOptions { restarts, seed, max_iters: 1500 }
}

fn random_polygon<R: Rng>(rng: &mut R, m: usize) -> Result<ConvexBody> {
    let pts = (0..m).map(|_| linalg::random_gaussian(rng, 2)).collect();
    Ok(VPolytope::new(pts)?.into())
}

/// `C - λC` for a triangle `C`.
pub fn difference_body(c: &[Vector], lambda: f64) -> Result<ConvexBody> {
    let pts = c.iter().flat_map(|x| c.iter().map(move |y| x - y * lambda)).collect();
    Ok(VPolytope::new(pts)?.into())
}

fn affine_ratios(plan: &mut Plan) {
    for n in plan.dims(3) {
        let nf = n as f64;
        plan.add(format!("simplex/n{n}"), n, |c| c, move |case| {
            let t = regular_body(RegularKind::Simplex, n, Position::John)?;
            let r = minimize_dr_affine(&t.body, None, search_opts(case.seed, 6))?;
            let expect = (nf * (nf + 1.0) / 2.0).sqrt();
            Ok(vec![case.row("min D/2r", r.best_ratio, expect, Check::Equal(1e-5), r.method.name())])
        });
        for (name, kind) in [("cube", RegularKind::Cube), ("cross-polytope", RegularKind::CrossPolytope)] {
            plan.add(format!("{name}/n{n}"), n, |c| c, move |case| {
                let c = regular_body(kind, n, Position::John)?;
                let r = maximize_wr_affine(&c.body, search_opts(case.seed, 6))?;
                Ok(vec![case.row("max w/2R", r.best_ratio, 1.0 / nf.sqrt(), Check::Equal(1e-5), r.method.name())])
            });
        }
    }
    let triangle = vec![
        Vector::from_vec(vec![0.0, 0.0]),
        Vector::from_vec(vec![1.0, 0.0]),
        Vector::from_vec(vec![0.3, 0.8]),
    ];
    for (i, lambda) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
        let tri = triangle.clone();
        plan.add(format!("difference/l{i}"), 2, |c| c.t(lambda), move |case| {
            let c: ConvexBody = VPolytope::new(tri.clone())?.into();
            let k = difference_body(&tri, lambda)?;
            let (sk, sc) = (minkowski_asymmetry(&k)?.value, minkowski_asymmetry(&c)?.value);
            let r = minimize_dr_affine(&k, Some(&c), search_opts(case.seed, 6))?;
            Ok(vec![case.row("min D/2r relative to C", r.best_ratio, general_dr_lower(sk, sc), Check::Equal(1e-5), r.method.name())])
        });
    }
    for i in 0..plan.cfg.samples {
        plan.add(format!("random-pair/{i:05}"), 2, |c| c, move |case| {
            let mut rng = case.rng();
            let k = random_polygon(&mut rng, 3 + i % 5)?;
            let c = random_polygon(&mut rng, 3 + (i / 5) % 5)?;
            let r = minimize_dr_affine(&k, Some(&c), search_opts(case.seed, 3))?;
            let (sk, sc) = (minkowski_asymmetry(&k)?.value, minkowski_asymmetry(&c)?.value);
            Ok(vec![
                case.row("min D/2r relative to C (lower)", r.best_ratio, 1.0, Check::AtLeast(1e-9), r.method.name()),
                case.row("min D/2r relative to C (upper)", r.best_ratio, 2.0, Check::AtMost(1e-9), r.method.name()),
                case.row("min D/2r relative to C (asymmetry bound)", r.best_ratio, general_dr_lower(sk, sc), Check::AtLeast(1e-7), r.method.name()),
            ])
        });
        plan.add(format!("random-body/{i:05}"), 2, |c| c, move |case| {
            let b = random_john_body(2, 1 + i % 6, case.seed)?;
            let s = minkowski_asymmetry(&b.body)?.value;
            let sj = john_asymmetry(&b.body)?.value.min(2.0);
            let dr = minimize_dr_affine(&b.body, None, search_opts(case.seed, 3))?;
            let wr = maximize_wr_affine(&b.body, search_opts(case.seed, 3))?;
            let (dr_lo, dr_hi) = dr_bounds(2, s, sj)?;
            let (_, wr_hi) = wr_bounds(2, s);
            let case = case.clone().s(s);
            Ok(vec![
                case.row("min D/2r (asymmetry lower bound)", dr.best_ratio, dr_lo, Check::AtLeast(1e-7), dr.method.name()),
                case.row("D/2r at john position (upper bound)", dr.start_ratio, dr_hi, Check::AtMost(1e-7), "john-position"),
                case.row("min D/2r (absolute bound)", dr.best_ratio, 3f64.sqrt(), Check::AtMost(1e-7), dr.method.name()),
                case.row("max w/2R (asymmetry upper bound)", wr.best_ratio, wr_hi, Check::AtMost(1e-7), wr.method.name()),
            ])
        });
    }
    for n in plan.dims(4) {
        for k in 1..n {
            plan.add(format!("shear/n{n}/k{k}"), n, |c| c.k(k), move |case| {
                let mut rng = case.rng();
                let u = Subspace::coordinate(n, &(0..k).collect::<Vec<_>>())?;
                let c = linalg::unit(n, n - 1) * rng.gen_range(0.2..0.9);
                let alpha = rng.gen_range(1.05..2.0);
                let mu = rng.gen_range(1.05..1.5);
                let r = shear_inflation_check(&u, &c, alpha, mu, 500, case.seed)?;
                let method = if r.exact_body { "exact-disc" } else { "sampled-disc" };
                Ok(vec![case.row("unit ball margin in inflated body", r.ball_margin, 0.0, Check::AtLeast(1e-9), method)
                    .and(r.holds)])
            });
        }
    }
}

// ---------------------------------------------------------------- oracles

const BATCH: usize = 100;

fn oracle_bodies(n: usize) -> Result<Vec<(String, crate::ellipsoid::JohnDecomposition, ConvexBody)>> {
    let mut out = Vec::new();
    for kind in [RegularKind::Simplex, RegularKind::Cube, RegularKind::CrossPolytope] {
        let c = regular_body(kind, n, Position::John)?;
        out.push((format!("{kind:?}").to_lowercase(), c.certificate.decomposition, c.body));
    }
    let c = rounding_body(n, (1.0 + n as f64) / 2.0)?;
    out.push(("rounding".into(), c.certificate.decomposition, c.body));
    let c = high_asym_body(n, 1, n as f64)?;
    out.push(("high-asym".into(), c.certificate.decomposition, c.body));
    Ok(out)
}

/// A random point of `body`: a convex combination of extreme points, or
/// for a ball hull of apexes and a point of the ball.
fn random_point<R: Rng>(rng: &mut R, body: &ConvexBody) -> Result<Vector> {
    let mut pts = match body {
        ConvexBody::Ball(b) => b.apexes().to_vec(),
        _ => bodies::extreme_points(body)?,
    };
    if let ConvexBody::Ball(b) = body {
        let r = rng.gen::<f64>().powf(1.0 / b.dim() as f64);
        pts.push(b.center() + linalg::random_unit(rng, b.dim()) * (b.radius() * r));
    }
    let w: Vec<f64> = pts.iter().map(|_| rng.gen::<f64>().powi(6)).collect();
    let total: f64 = w.iter().sum();
    Ok(pts.iter().zip(&w).fold(Vector::zeros(body.dim()), |acc, (p, &x)| acc + p * (x / total)))
}

fn oracles(plan: &mut Plan) {
    let dims: Vec<usize> = plan.dims(5).collect();
    for b in 0..plan.cfg.samples {
        let n = dims[b % dims.len()];
        let pool = dims.clone();
        plan.add(format!("ball-lemma/{b:05}"), n, |c| c, move |case| {
            let dims = &pool;
            let mut rng = case.rng();
            let mut worst = f64::INFINITY;
            let mut violations = 0usize;
            for _ in 0..BATCH {
                let n = dims[rng.gen_range(0..dims.len())];
                let m = rng.gen_range(2..=8);
                let mut xs: Vec<Vector> = (0..m).map(|_| linalg::random_gaussian(&mut rng, n)).collect();
                let mean = linalg::centroid(&xs);
                xs.iter_mut().for_each(|x| *x -= &mean);
                let us: Vec<Vector> = (0..m).map(|_| linalg::random_unit(&mut rng, n)).collect();
                let r = oracle_ball_lemma(&xs, &us)?;
                worst = worst.min((r.gamma - r.lhs) / r.gamma.max(1.0));
                violations += usize::from(!r.holds);
            }
            Ok(vec![case.row("ball lemma relative gap (min)", worst, 0.0, Check::AtLeast(1e-9), "random").and(violations == 0)])
        });
        plan.add(format!("john-vectors/{b:05}"), dims[b % dims.len()], |c| c, move |case| {
            let n = case.n;
            let mut rng = case.rng();
            let bodies = oracle_bodies(n)?;
            let (mut inner, mut dist, mut diam) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
            let mut ok = true;
            for _ in 0..BATCH {
                let (_, d, body) = &bodies[rng.gen_range(0..bodies.len())];
                let x = random_point(&mut rng, body)?;
                let y = random_point(&mut rng, body)?;
                let r = oracle_john_vectors(d, &x, &y);
                inner = inner.min(r.inner_product + n as f64);
                dist = dist.min(r.distance_bound - r.distance);
                diam = diam.min(r.diameter_bound - r.distance);
                ok &= r.inner_holds && r.distance_holds && r.diameter_holds;
            }
            Ok(vec![
                case.row("inner product plus n (min)", inner, 0.0, Check::AtLeast(1e-9), "random").and(ok),
                case.row("distance bound slack (min)", dist, 0.0, Check::AtLeast(1e-9), "random"),
                case.row("diameter bound slack (min)", diam, 0.0, Check::AtLeast(1e-9), "random"),
            ])
        });
    }
    for n in plan.dims(5) {
        plan.add(format!("equality/n{n}"), n, |c| c, move |case| {
            let (xs, us) = ball_lemma_equality_instance(n, 2 + case.seed as usize % 5, case.seed)?;
            let r = oracle_ball_lemma(&xs, &us)?;
            let simplex = regular_body(RegularKind::Simplex, n, Position::John)?;
            let v = bodies::extreme_points(&simplex.body)?;
            let jv = oracle_john_vectors(&simplex.certificate.decomposition, &v[0], &v[1]);
            Ok(vec![
                case.residual("ball lemma characterization residual", r.characterization_residual.unwrap_or(f64::NAN), 1e-6, "equality-instance")
                    .and(r.near_equality),
                case.row("simplex vertex distance", jv.distance, jv.diameter_bound, Check::Equal(1e-9), "equality-instance")
                    .and(jv.diameter_near_equality && jv.equality_norms == Some(true)),
            ])
        });
        plan.add(format!("ellipsoid-support/n{n}"), n, |c| c, move |case| {
            let mut rng = case.rng();
            let c = high_asym_body(n, 1, n as f64)?;
            let e = c.kball().expect("high-asym carries a k-ball").clone();
            let b = linalg::random_gaussian(&mut rng, n);
            let exact = oracle_ellip_support(&e, &b);
            let sampled = sampled_ellip_support(&e, &b, 4000, case.seed);
            let on_body = (bodies::support(&c.body, &b)? - exact.value).max(0.0);
            Ok(vec![
                case.row("sampled minus closed-form support", sampled, exact.value, Check::AtMost(1e-12), "closed-form"),
                case.row("closed-form support within body support", on_body, 0.0, Check::AtLeast(0.0), "closed-form"),
            ])
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite) -> SuiteConfig {
        SuiteConfig { n_max: 3, samples: 2, seed: 5, ..SuiteConfig::new(suite) }
    }

    fn csv(rows: &[Row]) -> String {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn scalar_lemmas_pass() {
        let rows = run_suite(&small(Suite::ScalarLemmas)).unwrap();
        let bad: Vec<&Row> = rows.iter().filter(|r| !r.pass).collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn deterministic_csv() {
        let cfg = small(Suite::Oracles);
        let a = csv(&run_suite(&cfg).unwrap());
        let b = csv(&run_suite(&cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with("suite,case_id,n,k,s,t,quantity,measured,bound,slack,pass,method,seed\n"));
    }

    #[test]
    fn rows_are_sorted() {
        let rows = run_suite(&small(Suite::PlanarDiameter)).unwrap();
        assert!(rows.windows(2).all(|w| w[0].case_id <= w[1].case_id));
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
    }

    #[test]
    fn seeds_split() {
        assert_ne!(split_seed(1, 0), split_seed(1, 1));
        assert_eq!(split_seed(9, 3), split_seed(9, 3));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in SUITES {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
