//! Liouville field, deflection d-tensors, identity residuals, and the
//! sampling verifier.

mod bianchi;
mod residual;
mod ricci;
mod verify;

use thiserror::Error;

use crate::dconnect::{cov_deriv, DConnectError, DTensor, Direction, GammaConnection, IndexSlot};
use crate::symexpr::{Expr, Point};
use IndexSlot::*;

pub use bianchi::{
    bianchi_residuals, bianchi_residuals_with, general_bianchi_residuals, BIANCHI_STARRED, GENERAL_BIANCHI_NAMES,
};
pub use residual::{alternate, cyclic, residual_indices, shifted, stack, swapped, FreeSlot, ResidualTensor};
pub use ricci::{
    deflection_identity_residuals, deflection_identity_residuals_with, ricci_names, ricci_residuals,
    ricci_residuals_many, ricci_residuals_with,
};
pub use verify::{
    apply_arbiter, verify, ArbiterSummary, Domain, IdentityReport, SamplingPlan, Verdict, VerificationReport,
    DEFAULT_TOL,
};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum IdentityError {
    #[error(transparent)]
    Connection(#[from] DConnectError),
    #[error("{0} disagree between closed form and covariant derivative of the Liouville field")]
    Inconsistent(String),
    #[error("invalid sampling plan: {0}")]
    InvalidPlan(String),
    #[error("could not find an admissible point for `{name}` after {tries} tries")]
    Domain { name: String, tries: usize },
}

/// The Liouville field `𝐂⁽ⁱ⁾₍₁₎ = y₁ⁱ`, signature `[FU]`.
pub fn liouville(n: usize) -> DTensor {
    DTensor::from_fn(vec![FiberUpper], n, |ix| Expr::y(ix[0]))
}

/// The three nonmetrical deflection d-tensors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deflections {
    /// `D̄⁽ⁱ⁾₍₁₎₁`, `[FU, TL]`
    pub d_bar: DTensor,
    /// `D⁽ⁱ⁾₍₁₎ⱼ`, `[FU, SL]`
    pub d: DTensor,
    /// `d⁽ⁱ⁾⁽¹⁾₍₁₎₍ⱼ₎`, `[FU, FL]`
    pub d_v: DTensor,
}

impl Deflections {
    pub fn entries(&self) -> [(&'static str, &DTensor); 3] {
        [("D_bar", &self.d_bar), ("D", &self.d), ("d", &self.d_v)]
    }
}

/// Closed forms `D̄ = −M + Gy − κy`, `D = −N + Ly`, `d = δ + Cy`.
pub fn deflections_closed_form(conn: &GammaConnection) -> Result<Deflections, DConnectError> {
    let info = conn.require_h_normal()?;
    let n = conn.dim();
    let nlc = conn.nlc();
    let d_bar = DTensor::from_fn(vec![FiberUpper, TimeLower], n, |ix| {
        let i = ix[0];
        let mut terms = vec![-nlc.m(i), -(&info.kappa * Expr::y(i))];
        terms.extend((0..n).map(|r| conn.g(i, r) * Expr::y(r)));
        Expr::sum(terms)
    });
    let d = DTensor::from_fn(vec![FiberUpper, SpaceLower], n, |ix| {
        let (i, j) = (ix[0], ix[1]);
        let mut terms = vec![-nlc.n(i, j)];
        terms.extend((0..n).map(|r| conn.l(i, r, j) * Expr::y(r)));
        Expr::sum(terms)
    });
    let d_v = DTensor::from_fn(vec![FiberUpper, FiberLower], n, |ix| {
        let (i, j) = (ix[0], ix[1]);
        let mut terms: Vec<Expr> = (0..n).map(|r| conn.c(i, r, j) * Expr::y(r)).collect();
        if i == j {
            terms.push(Expr::one());
        }
        Expr::sum(terms)
    });
    Ok(Deflections { d_bar, d, d_v })
}

/// `𝐂/₁`, `𝐂|ⱼ`, `𝐂|₍ⱼ₎` computed by covariant differentiation.
pub fn deflections_via_liouville(conn: &GammaConnection) -> Deflections {
    let c = liouville(conn.dim());
    Deflections {
        d_bar: cov_deriv(&c, conn, Direction::Temporal),
        d: cov_deriv(&c, conn, Direction::Spatial),
        d_v: cov_deriv(&c, conn, Direction::Vertical),
    }
}

const CONSISTENCY_TOL: f64 = 1e-10;

/// Deflections in closed form, cross-checked against the covariant
/// derivatives of the Liouville field (symbolically, then at fixed probe
/// points when simplification is inconclusive).
pub fn deflections(conn: &GammaConnection) -> Result<Deflections, IdentityError> {
    let closed = deflections_closed_form(conn)?;
    let via = deflections_via_liouville(conn);
    let n = conn.dim();
    let probes: Vec<Point<f64>> = (0..8)
        .map(|s| {
            let v = |k: usize| -0.9 + ((s * 331 + k * 97 + 5) % 181) as f64 / 100.0;
            Point::new(v(0), (0..n).map(|i| v(1 + i)).collect(), (0..n).map(|i| v(1 + n + i)).collect())
        })
        .collect();
    for ((name, a), (_, b)) in closed.entries().iter().zip(via.entries().iter()) {
        for (x, y) in a.components().iter().zip(b.components()) {
            let diff = (x - y).simplify();
            if diff.is_zero() {
                continue;
            }
            let ok = probes.iter().all(|p| match diff.eval::<f64>(p) {
                Ok(v) => v.abs() <= CONSISTENCY_TOL,
                Err(_) => true,
            });
            if !ok {
                return Err(IdentityError::Inconsistent(name.to_string()));
            }
        }
    }
    Ok(closed)
}

/// Names of every identity family in report order.
pub fn identity_names() -> Vec<String> {
    let mut v = ricci_names();
    v.extend((1..=5).map(|k| format!("Defl-{k}")));
    v.extend((1..=19).map(|k| format!("Bianchi-{k:02}")));
    v.extend(GENERAL_BIANCHI_NAMES.iter().map(|s| s.to_string()));
    v
}
