//! Levi form of a real hypersurface given by a defining function.
//!
//! For a boundary point with gradient `d rho = (rho_{z_1}, ..., rho_{z_n})`
//! the complex tangent space is `{X : sum rho_{z_j} X_j = 0}` and the Levi
//! form is `L(X) = sum rho_{z_j zbar_k} X_j conj(X_k)`. The matrix of `L` on an
//! orthonormal tangent frame is divided by `|d rho|`, which makes it
//! invariant under `rho -> c rho`.

use serde::Serialize;

use crate::error::{LeviError, Result};
use crate::linalg::{hermitian_eigen, norm, orthonormalize, HermitianMatrix, SubspaceBasis, C64};

/// Default relative threshold for null Levi eigenvalues.
pub const DEFAULT_EPS_REL: f64 = 1e-6;
const BOUNDARY_TOL: f64 = 1e-9;

/// `rho`, its `d/dz_j` derivatives and `H[j][k] = rho_{z_j zbar_k}`.
#[derive(Clone, Debug)]
pub struct DefiningValues {
    pub rho: f64,
    pub grad: Vec<C64>,
    pub hessian: HermitianMatrix,
}

pub trait DefiningFunction: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, p: &[C64]) -> Result<DefiningValues>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    StronglyPseudoconvex,
    WeaklyPseudoconvex,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::StronglyPseudoconvex => "strongly_pseudoconvex",
            Classification::WeaklyPseudoconvex => "weakly_pseudoconvex",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LeviAnalysis {
    pub point: Vec<C64>,
    pub grad_norm: f64,
    pub tangent_basis: SubspaceBasis,
    pub levi_matrix: HermitianMatrix,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<C64>>,
}

impl LeviAnalysis {
    /// `max(1, ||levi_matrix||_2)`.
    pub fn scale(&self) -> f64 {
        self.eigenvalues.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::INFINITY)
    }

    /// Span in `C^n` of the eigenvectors with `|lambda| <= eps_rel * scale`.
    pub fn null_space(&self, eps_rel: f64) -> SubspaceBasis {
        let bound = eps_rel * self.scale();
        let n = self.point.len();
        let lifted: Vec<Vec<C64>> = self
            .eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .filter(|(lam, _)| lam.abs() <= bound)
            .map(|(_, coeffs)| {
                let mut v = vec![C64::new(0.0, 0.0); n];
                for (c, b) in coeffs.iter().zip(self.tangent_basis.vectors()) {
                    for (o, x) in v.iter_mut().zip(b) {
                        *o += c * x;
                    }
                }
                v
            })
            .collect();
        orthonormalize(n, &lifted, 1e-12)
    }

    pub fn classify(&self, eps_rel: f64) -> Result<Classification> {
        let bound = eps_rel * self.scale();
        let min = self.min_eigenvalue();
        if min < -bound {
            return Err(LeviError::NonPseudoconvex { min, bound });
        }
        Ok(if min > bound {
            Classification::StronglyPseudoconvex
        } else {
            Classification::WeaklyPseudoconvex
        })
    }
}

/// Orthonormal basis of `{X : sum grad_j X_j = 0}`.
pub fn complex_tangent_basis(grad: &[C64]) -> Result<SubspaceBasis> {
    let n = grad.len();
    let g = norm(grad);
    if g == 0.0 || !g.is_finite() {
        return Err(LeviError::ZeroGradient);
    }
    // the annihilator of grad is the Hermitian complement of conj(grad)
    let mut gens: Vec<Vec<C64>> = vec![grad.iter().map(|x| x.conj() / g).collect()];
    for k in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[k] = C64::new(1.0, 0.0);
        gens.push(e);
    }
    let full = orthonormalize(n, &gens, 1e-10);
    Ok(SubspaceBasis::from_orthonormal(n, full.vectors()[1..].to_vec(), 1e-10))
}

/// Levi analysis at a point already known to be on the boundary.
pub fn levi_form_from_values(point: &[C64], values: &DefiningValues) -> Result<LeviAnalysis> {
    if values.rho.abs() > BOUNDARY_TOL {
        return Err(LeviError::OffBoundary(values.rho.abs()));
    }
    let n = point.len();
    if values.grad.len() != n || values.hessian.dim() != n {
        return Err(LeviError::DimensionMismatch("defining data does not match the point".into()));
    }
    let tangent = complex_tangent_basis(&values.grad)?;
    let grad_norm = norm(&values.grad);
    // L(X) = X* H^T X for column vectors X
    let levi_matrix = values
        .hessian
        .transpose()
        .congruence(tangent.vectors())?
        .scaled(1.0 / grad_norm);
    let eig = hermitian_eigen(&levi_matrix);
    Ok(LeviAnalysis {
        point: point.to_vec(),
        grad_norm,
        tangent_basis: tangent,
        levi_matrix,
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    })
}

pub fn levi_form<D: DefiningFunction + ?Sized>(oracle: &D, p: &[C64]) -> Result<LeviAnalysis> {
    let values = oracle.eval(p)?;
    levi_form_from_values(p, &values)
}
