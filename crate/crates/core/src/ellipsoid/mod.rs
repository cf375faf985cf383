//! Loewner and John ellipsoids, John decompositions and normalization.

mod inscribed;
mod john;
mod mvee;

pub use inscribed::{inscribed_ellipsoid, InscribedEllipsoid, CONTACT_TOL, DEFAULT_KKT_TOL};
pub use john::{
    fit_weights, john_decomposition, john_verify, loewner_decomposition, nnls, normalize_john, normalize_loewner,
    IdentityResiduals, JohnDecomposition, JohnReport, PositionCertificate, NNLS_TOL, VERIFY_TOL,
};
pub use mvee::{mvee, mvee_with_weights, MveeResult, DEFAULT_EPS, DEFAULT_MAX_ITER};
