use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classical excess Gibbs energy models with closed-form activity
/// coefficients.
///
/// Two-suffix Margules: `gᴱ/RT = A x1 x2`, `ln γ1 = A x2²`, `ln γ2 = A x1²`.
///
/// NRTL with `G_ij = exp(-α τ_ij)`:
///
/// ```text
/// gᴱ/RT = x1 x2 [τ21 G21 / (x1 + x2 G21) + τ12 G12 / (x2 + x1 G12)]
/// ln γ1 = x2² [τ21 (G21 / (x1 + x2 G21))² + τ12 G12 / (x2 + x1 G12)²]
/// ln γ2 = x1² [τ12 (G12 / (x2 + x1 G12))² + τ21 G21 / (x1 + x2 G21)²]
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReferenceGeModel {
    Margules { a12: f64 },
    Nrtl { tau12: f64, tau21: f64, alpha: f64 },
}

impl ReferenceGeModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ReferenceGeModel::Margules { a12 } if a12.is_finite() => Ok(()),
            ReferenceGeModel::Nrtl { tau12, tau21, alpha }
                if tau12.is_finite() && tau21.is_finite() && alpha > 0.0 && alpha <= 1.0 =>
            {
                Ok(())
            }
            _ => Err(Error::Invalid(format!("invalid reference model {self:?}"))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ReferenceGeModel::Margules { .. } => "margules",
            ReferenceGeModel::Nrtl { .. } => "nrtl",
        }
    }

    /// The same mixture with component order exchanged.
    pub fn swapped(&self) -> Self {
        match *self {
            m @ ReferenceGeModel::Margules { .. } => m,
            ReferenceGeModel::Nrtl { tau12, tau21, alpha } => ReferenceGeModel::Nrtl {
                tau12: tau21,
                tau21: tau12,
                alpha,
            },
        }
    }

    /// `(ln γ1, ln γ2)` at `x1`.
    pub fn ln_gammas(&self, x1: f64) -> (f64, f64) {
        let x2 = 1.0 - x1;
        match *self {
            ReferenceGeModel::Margules { a12 } => (a12 * x2 * x2, a12 * x1 * x1),
            ReferenceGeModel::Nrtl { tau12, tau21, alpha } => {
                let g12 = (-alpha * tau12).exp();
                let g21 = (-alpha * tau21).exp();
                let d1 = x1 + x2 * g21;
                let d2 = x2 + x1 * g12;
                let l1 = x2 * x2 * (tau21 * (g21 / d1).powi(2) + tau12 * g12 / (d2 * d2));
                let l2 = x1 * x1 * (tau12 * (g12 / d2).powi(2) + tau21 * g21 / (d1 * d1));
                (l1, l2)
            }
        }
    }

    pub fn ge_over_rt(&self, x1: f64) -> f64 {
        let x2 = 1.0 - x1;
        match *self {
            ReferenceGeModel::Margules { a12 } => a12 * x1 * x2,
            ReferenceGeModel::Nrtl { tau12, tau21, alpha } => {
                let g12 = (-alpha * tau12).exp();
                let g21 = (-alpha * tau21).exp();
                x1 * x2 * (tau21 * g21 / (x1 + x2 * g21) + tau12 * g12 / (x2 + x1 * g12))
            }
        }
    }
}

pub fn reference_gammas(model: &ReferenceGeModel, x1: f64) -> (f64, f64) {
    model.ln_gammas(x1)
}
