use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::descriptors::DEFAULT_DIM;
use crate::error::{Error, Result};

/// Which output head sits on top of the shared deep-set trunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `gᴱ/RT` with the hard-constraint correction; `ln γ` by differentiation.
    #[default]
    Hanna,
    /// `ln γ_i = f_φ([f_α(C_i), f_α(C_j)])`, no constraints.
    Ablation1,
    /// `ln γ_i = f_φ(f_α(C_i))`, no constraints.
    Ablation2,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Hanna, Variant::Ablation1, Variant::Ablation2];

    pub fn is_constrained(self) -> bool {
        self == Variant::Hanna
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Hanna => "hanna",
            Variant::Ablation1 => "ablation1",
            Variant::Ablation2 => "ablation2",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hanna" => Ok(Variant::Hanna),
            "ablation1" => Ok(Variant::Ablation1),
            "ablation2" => Ok(Variant::Ablation2),
            other => Err(Error::Invalid(format!("unknown variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Silu,
}

/// Network sizes. Every hidden layer has `hidden` nodes; layer counts are
/// numbers of hidden layers, each network ending in a linear output layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureConfig {
    pub descriptor_dim: usize,
    pub hidden: usize,
    pub theta_layers: usize,
    pub alpha_layers: usize,
    pub phi_layers: usize,
    pub activation: Activation,
    pub variant: Variant,
}

impl Default for ArchitectureConfig {
    fn default() -> Self {
        ArchitectureConfig {
            descriptor_dim: DEFAULT_DIM,
            hidden: 96,
            theta_layers: 1,
            alpha_layers: 2,
            phi_layers: 1,
            activation: Activation::Silu,
            variant: Variant::Hanna,
        }
    }
}

impl ArchitectureConfig {
    pub fn new(descriptor_dim: usize, hidden: usize, variant: Variant) -> Self {
        ArchitectureConfig {
            descriptor_dim,
            hidden,
            variant,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::Invalid("hidden width must be positive".into()));
        }
        if self.descriptor_dim == 0 {
            return Err(Error::Invalid("descriptor dimension must be positive".into()));
        }
        Ok(())
    }

    /// Layer widths of `f_θ`, `f_α` and `f_φ`, input first.
    pub fn widths(&self) -> [Vec<usize>; 3] {
        let h = self.hidden;
        let mlp = |input: usize, n_hidden: usize, output: usize| {
            let mut w = vec![input];
            w.extend(std::iter::repeat_n(h, n_hidden));
            w.push(output);
            w
        };
        let phi_in = match self.variant {
            Variant::Ablation1 => 2 * h,
            Variant::Hanna | Variant::Ablation2 => h,
        };
        [
            mlp(self.descriptor_dim, self.theta_layers, h),
            mlp(h + 2, self.alpha_layers, h),
            mlp(phi_in, self.phi_layers, 1),
        ]
    }
}
