//! Inner and outer k-radii: bound evaluators, equality checkers, and
//! randomized oracles for the supporting inequalities.

mod inner;
mod meb;
mod oracles;
mod outer;
mod planar;

pub use inner::{
    inner_bound, inner_bound_report, kball_containment, search_inner_kball, Containment, ContainmentMethod,
    InnerReport,
};
pub use meb::{min_enclosing_ball, EnclosingBall};
pub use oracles::{
    ball_lemma_equality_instance, oracle_ball_lemma, oracle_ellip_support, oracle_john_vectors, sampled_ellip_support,
    BallLemmaReport, EllipSupport, JohnVectorsReport,
};
pub use outer::{
    hyperplane_projection_radius, outer_kradius, regular_outer_kradius, simplex_min_halfwidth, split_directions,
    OuterReport,
};
pub use planar::{diameter_pair, planar_diameter_report, PlanarReport};

/// Tolerance on the signed slack of every bound report.
pub const BOUND_TOL: f64 = 1e-7;
/// Relative gap under which equality certificates are evaluated.
pub const NEAR_EQUALITY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The measured value must not fall below the bound.
    AtLeast,
    /// The measured value must not exceed the bound.
    AtMost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualityCertificate {
    pub center_norm: f64,
    pub expected_center_norm: f64,
    /// `‖V^T c‖` for the carrier basis `V`.
    pub perpendicularity: f64,
    /// Largest minus smallest semi-axis.
    pub radius_spread: f64,
    pub radius_error: f64,
    /// Distinct values of `c^T u` over the contact vectors.
    pub contact_products: Vec<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub quantity: String,
    pub measured: f64,
    pub bound: f64,
    /// Positive when the inequality holds strictly.
    pub slack: f64,
    pub pass: bool,
    pub equality: Option<EqualityCertificate>,
}

impl BoundReport {
    pub fn new(quantity: impl Into<String>, measured: f64, bound: f64, side: Side) -> Self {
        let slack = match side {
            Side::AtLeast => measured - bound,
            Side::AtMost => bound - measured,
        };
        Self {
            quantity: quantity.into(),
            measured,
            bound,
            slack,
            pass: slack >= -BOUND_TOL,
            equality: None,
        }
    }

    pub fn near_equality(&self) -> bool {
        self.slack.abs() <= NEAR_EQUALITY * self.bound.abs().max(1.0)
    }
}

/// Distinct values within `tol`, ascending.
pub(crate) fn distinct(mut values: Vec<f64>, tol: f64) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if out.last().is_none_or(|l| (v - l).abs() > tol) {
            out.push(v);
        }
    }
    out
}
