use serde::{Deserialize, Serialize};

/// Scalar field of the Gaussian entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Number of real degrees of freedom per entry.
    pub fn real_dim(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

/// Which upper constant C to pair with the smallest singular value bound.
///
/// `Derivation` uses `1 + √λ + √(2μ)`, the smallest C for which the σ₁ tail
/// `exp(-(C-1-√λ)² n / 2)` is at most `exp(-μ n)`. `Theorem` uses the shorter
/// `1 + √λ + √μ`. The two coincide for complex matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantConvention {
    #[default]
    Derivation,
    Theorem,
}
