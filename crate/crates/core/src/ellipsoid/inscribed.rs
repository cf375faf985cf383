//! Maximum-volume inscribed ellipsoid of an H-polytope:
//! maximize log det B subject to ‖B a_i‖ + a_i^T d <= b_i.

use crate::bodies::{Ellipsoid, HPolytope};
use crate::conic::{BarrierOptions, Cone, ConeProgram, SymBlock};
use crate::error::{GeomError, Result};
use crate::linalg::{Matrix, Vector};

pub const DEFAULT_KKT_TOL: f64 = 1e-8;
pub const CONTACT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct InscribedEllipsoid {
    pub ellipsoid: Ellipsoid,
    /// Symmetric positive definite `B` with `E = center + B·B^n`.
    pub map: Matrix,
    pub center: Vector,
    /// Indices of halfspaces whose slack is within `CONTACT_TOL`.
    pub contacts: Vec<usize>,
    /// Duality-gap bound on `log det B` at termination.
    pub gap: f64,
}

pub fn inscribed_ellipsoid(p: &HPolytope, tol: f64) -> Result<InscribedEllipsoid> {
    let n = p.dim();
    let (cheb, r0) = p.chebyshev()?;
    if r0 <= 1e-12 {
        return Err(GeomError::EmptyInterior);
    }
    for j in 0..n {
        for sign in [1.0, -1.0] {
            p.support_lp(&(crate::linalg::unit(n, j) * sign)).map_err(|e| match e {
                GeomError::UnboundedBody => GeomError::Unbounded,
                other => other,
            })?;
        }
    }
    let unit_p = p.normalized();
    let blk = SymBlock { offset: 0, dim: n };
    let nz = blk.len() + n;
    let mut prog = ConeProgram::new(Vector::zeros(nz));
    prog.logdet = Some((blk, 1.0));
    for (a, b) in unit_p.halfspaces() {
        let mut am = Matrix::zeros(n, nz);
        for r in 0..n {
            for s in 0..n {
                am[(r, blk.index(r, s))] += a[s];
            }
        }
        let mut c = Vector::zeros(nz);
        for s in 0..n {
            c[blk.len() + s] = -a[s];
        }
        prog.cones.push(Cone {
            a: am,
            b: Vector::zeros(n),
            c,
            d: b,
        });
    }
    let mut z = Vector::zeros(nz);
    blk.write(&mut z, &(Matrix::identity(n, n) * (0.5 * r0)));
    for s in 0..n {
        z[blk.len() + s] = cheb[s];
    }
    let opts = BarrierOptions {
        gap_tol: tol.min(1e-12),
        ..BarrierOptions::default()
    };
    let sol = prog.solve(z, opts)?;
    let map = blk.read(&sol.z);
    let center = Vector::from_iterator(n, sol.z.iter().skip(blk.len()).copied());
    let contacts = unit_p
        .halfspaces()
        .enumerate()
        .filter(|(_, (a, b))| b - a.dot(&center) - (&map * *a).norm() <= CONTACT_TOL)
        .map(|(i, _)| i)
        .collect();
    Ok(InscribedEllipsoid {
        ellipsoid: Ellipsoid::from_map(center.clone(), &map)?,
        map,
        center,
        contacts,
        gap: sol.gap,
    })
}
