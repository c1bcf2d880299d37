use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::irreps::IrrepFeatures;

/// A gate `g` with `sigma(x) = g(x) * x`.
///
/// Implementing this trait is all that is needed for a new equivariant activation.
pub trait Gate {
    fn gate(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Gate for F {
    fn gate(&self, x: f64) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActivationKind {
    Relu,
    /// `x * sigmoid(x)`, also known as SiLU.
    Swish,
    Tanh,
    Elu,
    Identity,
}

impl ActivationKind {
    pub const ALL: [ActivationKind; 5] = [
        ActivationKind::Relu,
        ActivationKind::Swish,
        ActivationKind::Tanh,
        ActivationKind::Elu,
        ActivationKind::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Relu => "relu",
            ActivationKind::Swish => "swish",
            ActivationKind::Tanh => "tanh",
            ActivationKind::Elu => "elu",
            ActivationKind::Identity => "identity",
        }
    }

    /// The ordinary scalar function `sigma`.
    pub fn scalar(self, x: f64) -> f64 {
        match self {
            ActivationKind::Relu => x.max(0.0),
            ActivationKind::Swish => x / (1.0 + (-x).exp()),
            ActivationKind::Tanh => x.tanh(),
            ActivationKind::Elu => {
                if x > 0.0 {
                    x
                } else {
                    x.exp_m1()
                }
            }
            ActivationKind::Identity => x,
        }
    }
}

impl Gate for ActivationKind {
    fn gate(&self, x: f64) -> f64 {
        match self {
            ActivationKind::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Swish => 1.0 / (1.0 + (-x).exp()),
            // tanh(x)/x and expm1(x)/x extend continuously by 1 at the origin
            ActivationKind::Tanh => {
                if x == 0.0 {
                    1.0
                } else {
                    x.tanh() / x
                }
            }
            ActivationKind::Elu => {
                if x >= 0.0 {
                    1.0
                } else {
                    x.exp_m1() / x
                }
            }
            ActivationKind::Identity => 1.0,
        }
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(ActivationKind::Relu),
            "swish" | "silu" => Ok(ActivationKind::Swish),
            "tanh" => Ok(ActivationKind::Tanh),
            "elu" => Ok(ActivationKind::Elu),
            "identity" | "linear" => Ok(ActivationKind::Identity),
            other => Err(Error::InvalidArgument(format!(
                "unknown activation {other:?}"
            ))),
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Gated activation: every component of channel `i` is scaled by `g(x_i^(0+))`.
pub fn activation(x: &IrrepFeatures, kind: ActivationKind) -> IrrepFeatures {
    activation_with(x, &kind)
}

pub fn activation_with<G: Gate + ?Sized>(x: &IrrepFeatures, gate: &G) -> IrrepFeatures {
    let f = x.num_features();
    let gates: Vec<f64> = x.scalars().iter().map(|&s| gate.gate(s)).collect();
    let mut out = x.clone();
    for chunk in out.data_mut().chunks_exact_mut(f) {
        for (v, g) in chunk.iter_mut().zip(&gates) {
            *v *= g;
        }
    }
    out
}
