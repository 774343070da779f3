//! Truncated Fock-space kernel: ladder operators, matrix exponentials and
//! quadrature statistics for a single bosonic mode.

mod expm;
mod matrix;

use num_complex::Complex64;
use thiserror::Error;

pub use expm::{expm_multiply, expm_multiply_sparse, matrix_exponential};
pub use matrix::ComplexMatrix;

/// Norm slack allowed above one before a state is rejected.
pub const NORM_SLACK: f64 = 1e-9;

/// Minimum norm accepted by [`quadrature_variances`].
pub const MIN_STATISTICS_NORM: f64 = 0.999;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("truncation dimension {0} is below 2")]
    InvalidDimension(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry")]
    NonFinite,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("state norm {0} exceeds 1")]
    NormExceeded(f64),
    #[error("state norm {0} is too small; raise the truncation dimension")]
    Truncation(f64),
}

/// Amplitudes over the photon-number basis `|0⟩ .. |dim-1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, FockError> {
        if amps.len() < 2 {
            return Err(FockError::InvalidDimension(amps.len()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FockError::NonFinite);
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if norm > 1.0 + NORM_SLACK {
            return Err(FockError::NormExceeded(norm));
        }
        Ok(Self { amps })
    }

    /// Number state `|n⟩`.
    pub fn basis(dim: usize, n: usize) -> Result<Self, FockError> {
        if dim < 2 {
            return Err(FockError::InvalidDimension(dim));
        }
        if n >= dim {
            return Err(FockError::Shape(format!("|{n}⟩ outside dimension {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn vacuum(dim: usize) -> Result<Self, FockError> {
        Self::basis(dim, 0)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Squared norm; below one when the truncation cut off part of the state.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Photon-number probabilities `|⟨n|ψ⟩|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Annihilation and creation matrices on a truncated space.
#[derive(Debug, Clone)]
pub struct LadderPair {
    pub annihilate: ComplexMatrix,
    pub create: ComplexMatrix,
}

impl LadderPair {
    pub fn dim(&self) -> usize {
        self.annihilate.rows()
    }

    /// `a†a`, diagonal with entries `0..dim-1`.
    pub fn number(&self) -> ComplexMatrix {
        self.create.matmul_unchecked(&self.annihilate)
    }
}

/// Builds `a` with `a|n⟩ = √n |n-1⟩` and its adjoint.
pub fn ladder_pair(dim: usize) -> Result<LadderPair, FockError> {
    if dim < 2 {
        return Err(FockError::InvalidDimension(dim));
    }
    let mut annihilate = ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        annihilate[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let create = annihilate.adjoint();
    Ok(LadderPair { annihilate, create })
}

/// Variances of `x̂ = (a + a†)/2` and `p̂ = (a - a†)/(2i)`.
///
/// In this normalization the vacuum has both variances equal to 1/4 and a
/// squeezed vacuum of strength `r` has `e^{∓2r}/4`. Expectations are taken
/// with respect to the renormalized state.
pub fn quadrature_variances(state: &FockVector) -> Result<(f64, f64), FockError> {
    let norm = state.norm_sqr();
    if norm < MIN_STATISTICS_NORM {
        return Err(FockError::Truncation(norm));
    }
    let psi = state.amplitudes();
    let dim = psi.len();
    let zero = Complex64::new(0.0, 0.0);
    // (a ψ)_m = √(m+1) ψ_{m+1}, (a† ψ)_m = √m ψ_{m-1}
    let lower = |m: usize| {
        if m + 1 < dim {
            psi[m + 1] * ((m + 1) as f64).sqrt()
        } else {
            zero
        }
    };
    let raise = |m: usize| {
        if m > 0 {
            psi[m - 1] * (m as f64).sqrt()
        } else {
            zero
        }
    };
    let i = Complex64::new(0.0, 1.0);
    let x_psi: Vec<Complex64> = (0..dim).map(|m| (lower(m) + raise(m)) * 0.5).collect();
    let p_psi: Vec<Complex64> = (0..dim).map(|m| (lower(m) - raise(m)) / (2.0 * i)).collect();

    let moments = |op_psi: &[Complex64]| {
        let mean: Complex64 = psi.iter().zip(op_psi).map(|(a, b)| a.conj() * b).sum();
        let second: f64 = op_psi.iter().map(|z| z.norm_sqr()).sum();
        let mean = mean.re / norm;
        second / norm - mean * mean
    };
    Ok((moments(&x_psi), moments(&p_psi)))
}
