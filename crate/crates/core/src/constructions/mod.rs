//! Extremal bodies with attached certificates, and the closed-form scalar
//! functions that parametrize them.

mod families;
mod polytope;
mod regular;
mod scalar;

pub use families::{asym_body, high_asym_body, mid_asym_body, rounding_body, small_asym_body};
pub use polytope::{construction_polytope, construction_tau_range};
pub use regular::{outer_family, regular_body, regular_body_aligned, simplex_alignment_exists, RegularKind};
pub use scalar::{d_s, f_s, mu, s_threshold, tau, tau_equation, tau_other_root, xi_star, zeta};

use crate::bodies::{ConvexBody, HPolytope, KEllipsoid};
use crate::ellipsoid::JohnDecomposition;
use crate::error::{GeomError, Result};
use crate::linalg::Vector;

/// Which ellipsoid a body is normalized against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    John,
    Loewner,
}

impl Position {
    pub fn name(self) -> &'static str {
        match self {
            Position::John => "john",
            Position::Loewner => "loewner",
        }
    }
}

/// Parameters a construction was built from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalarParams {
    pub n: usize,
    pub k: Option<usize>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub tau: Option<f64>,
    pub j: Option<Vec<usize>>,
}

impl ScalarParams {
    pub fn new(n: usize) -> Self {
        Self { n, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |m: String| Err(GeomError::ParameterOutOfRange(m));
        if n < 2 {
            return bad(format!("n must be at least 2, got {n}"));
        }
        if let Some(k) = self.k {
            if k == 0 || k >= n {
                return bad(format!("k must lie in [1, {}], got {k}", n - 1));
            }
        }
        if let Some(s) = self.s {
            if !(1.0 - 1e-12..=n as f64 + 1e-12).contains(&s) {
                return bad(format!("s must lie in [1, {n}], got {s}"));
            }
        }
        if let Some(t) = self.t {
            if !(0.0..=2.0).contains(&t) {
                return bad(format!("t must lie in [0, 2], got {t}"));
            }
        }
        if let Some(j) = &self.j {
            if j.iter().any(|&i| i + 1 >= n) {
                return bad(format!("J must be a subset of 0..{}", n - 1));
            }
            if let Some(t) = self.tau {
                let (lo, hi) = construction_tau_range(n, j.len());
                if !(lo - 1e-12..=hi + 1e-12).contains(&t) {
                    return bad(format!("tau must lie in [{lo}, {hi}], got {t}"));
                }
            }
        }
        Ok(())
    }
}

/// The enclosing polytope `P(J, τ)` that certifies a ball hull's position.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosing {
    pub j: Vec<usize>,
    pub tau: f64,
    pub polytope: HPolytope,
}

/// A point `center` together with the claimed Minkowski asymmetry and the
/// directions where the support inequality is tight.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiCertificate {
    pub center: Vector,
    pub value: f64,
    pub equality_directions: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub position: Position,
    pub decomposition: JohnDecomposition,
    pub kball: Option<KEllipsoid>,
    pub enclosing: Option<Enclosing>,
    /// Points of the body whose hull contains `kball`.
    pub inner_points: Vec<Vector>,
    pub john_asymmetry: Option<f64>,
    pub minkowski: Option<MinkowskiCertificate>,
}

impl Certificate {
    pub fn new(position: Position, decomposition: JohnDecomposition) -> Self {
        Self {
            position,
            decomposition,
            kball: None,
            enclosing: None,
            inner_points: Vec::new(),
            john_asymmetry: None,
            minkowski: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub family: &'static str,
    pub params: ScalarParams,
    pub body: ConvexBody,
    pub certificate: Certificate,
}

impl Construction {
    pub fn kball(&self) -> Option<&KEllipsoid> {
        self.certificate.kball.as_ref()
    }
}

/// Family names accepted by [`construct`].
pub const FAMILIES: &[&str] = &[
    "simplex",
    "cube",
    "cross-polytope",
    "outer",
    "polytope",
    "high-asym",
    "mid-asym",
    "small-asym",
    "asym",
    "rounding",
];

/// Builds a named family; `position` applies to the regular bodies only.
pub fn construct(family: &str, params: &ScalarParams, position: Position) -> Result<Construction> {
    params.validate()?;
    let n = params.n;
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| GeomError::ParameterOutOfRange(format!("{family} needs --{name}")))
    };
    let need_k = || params.k.ok_or_else(|| GeomError::ParameterOutOfRange(format!("{family} needs --k")));
    match family {
        "simplex" => regular_body(RegularKind::Simplex, n, position),
        "cube" => regular_body(RegularKind::Cube, n, position),
        "cross-polytope" => regular_body(RegularKind::CrossPolytope, n, position),
        "outer" => outer_family(n, params.k.unwrap_or(1), need(params.t, "t")?),
        "polytope" => {
            let j = params.j.clone().unwrap_or_else(|| (0..n - 1).collect());
            let tau = need(params.tau, "tau")?;
            let (p, d) = construction_polytope(&j, tau, n)?;
            let mut cert = Certificate::new(Position::John, d);
            cert.enclosing = Some(Enclosing { j: j.clone(), tau, polytope: p.clone() });
            Ok(Construction {
                family: "polytope",
                params: ScalarParams { j: Some(j), tau: Some(tau), ..ScalarParams::new(n) },
                body: p.into(),
                certificate: cert,
            })
        }
        "high-asym" => high_asym_body(n, need_k()?, need(params.s, "s")?),
        "mid-asym" => mid_asym_body(n, need_k()?, need(params.s, "s")?),
        "small-asym" => small_asym_body(n, need_k()?, need(params.s, "s")?),
        "asym" => asym_body(n, need_k()?, need(params.s, "s")?),
        "rounding" => rounding_body(n, need(params.s, "s")?),
        other => Err(GeomError::InvalidInput(format!(
            "unknown family '{other}', expected one of {}",
            FAMILIES.join(", ")
        ))),
    }
}
