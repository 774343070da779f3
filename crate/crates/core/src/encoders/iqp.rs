//! Instantaneous quantum polynomial circuits `H^⊗n · D(x) · H^⊗n |0…0⟩` with
//! `D(x) = exp(i(Σ xᵢZᵢ + Σ_{i<j} xᵢxⱼZᵢZⱼ))`.

use num_complex::Complex64;

use super::EncodeError;
use crate::linalg::exact_sum;

/// Largest block accepted by [`iqp_encode`].
pub const MAX_IQP_QUBITS: usize = 10;

/// Diagonal phases of `D(x)`, one per computational basis string.
///
/// Basis index `z` reads qubit 1 as its most significant bit, so for two
/// qubits the order is `00, 01, 10, 11`.
#[derive(Debug, Clone, PartialEq)]
pub struct IqpPhaseVector {
    pub n: usize,
    pub phases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitStateVector {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl QubitStateVector {
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Sign `(-1)^{zᵢ}` of qubit `i` (0-based, most significant first).
fn z_sign(z: usize, i: usize, n: usize) -> f64 {
    if (z >> (n - 1 - i)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The linear and pairwise terms whose sum is the phase of basis string `z`.
pub fn iqp_phase_terms(x: &[f64], z: usize) -> Vec<f64> {
    let n = x.len();
    let mut terms = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        terms.push(x[i] * z_sign(z, i, n));
    }
    for i in 0..n {
        for j in i + 1..n {
            terms.push(x[i] * x[j] * z_sign(z, i, n) * z_sign(z, j, n));
        }
    }
    terms
}

pub fn iqp_phases(x: &[f64], n: usize) -> Result<IqpPhaseVector, EncodeError> {
    if x.len() != n {
        return Err(EncodeError::Shape(format!(
            "{} features for {n} qubits",
            x.len()
        )));
    }
    if n == 0 || n > MAX_IQP_QUBITS {
        return Err(EncodeError::Shape(format!(
            "qubit count {n} outside 1..={MAX_IQP_QUBITS}"
        )));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(EncodeError::NonFinite(i));
    }
    // Correctly rounded sums make the phase independent of term order.
    let phases = (0..1usize << n)
        .map(|z| exact_sum(iqp_phase_terms(x, z)))
        .collect();
    Ok(IqpPhaseVector { n, phases })
}

/// In-place unnormalized Walsh-Hadamard transform.
fn hadamard_all(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for start in (0..v.len()).step_by(2 * h) {
            for k in start..start + h {
                let (a, b) = (v[k], v[k + h]);
                v[k] = a + b;
                v[k + h] = a - b;
            }
        }
        h *= 2;
    }
}

pub fn iqp_encode(x: &[f64], n: usize) -> Result<QubitStateVector, EncodeError> {
    let phases = iqp_phases(x, n)?;
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    // H^⊗n |0…0⟩ is uniform; apply the diagonal, then H^⊗n again.
    let mut amps: Vec<Complex64> = phases
        .phases
        .iter()
        .map(|&p| Complex64::from_polar(scale, p))
        .collect();
    hadamard_all(&mut amps);
    amps.iter_mut().for_each(|z| *z *= scale);
    Ok(QubitStateVector { n, amps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_phases() {
        let ph = iqp_phases(&[0.5, 0.8], 2).unwrap();
        let want = [1.7, -0.7, -0.1, -0.9];
        for (p, w) in ph.phases.iter().zip(want) {
            assert!((p - w).abs() <= 4.0 * f64::EPSILON * 2.0, "{p} vs {w}");
        }
    }

    #[test]
    fn zero_input_zero_phases() {
        assert_eq!(iqp_phases(&[0.0, 0.0], 2).unwrap().phases, vec![0.0; 4]);
    }

    #[test]
    fn three_qubit_signs() {
        let ph = iqp_phases(&[1.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(ph.phases, vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn length_mismatch_is_shape_error() {
        assert!(matches!(iqp_phases(&[0.1], 2), Err(EncodeError::Shape(_))));
        assert!(matches!(iqp_encode(&[0.0; 11], 11), Err(EncodeError::Shape(_))));
    }

    #[test]
    fn zero_input_returns_all_zero_string() {
        let s = iqp_encode(&[0.0, 0.0], 2).unwrap();
        let p = s.probabilities();
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert!(p[1..].iter().all(|&q| q < 1e-30));
    }

    #[test]
    fn global_phase_leaves_probabilities() {
        // Shift every diagonal phase by c and rerun the Hadamard sandwich.
        let x = [0.3, -1.1, 0.7];
        let base = iqp_encode(&x, 3).unwrap();
        let ph = iqp_phases(&x, 3).unwrap();
        let c = 0.917;
        let scale = 1.0 / 8f64.sqrt();
        let mut shifted: Vec<Complex64> = ph
            .phases
            .iter()
            .map(|&p| Complex64::from_polar(scale, p + c))
            .collect();
        hadamard_all(&mut shifted);
        for (a, b) in base.amps.iter().zip(&shifted) {
            assert!((a.norm_sqr() - (b * scale).norm_sqr()).abs() < 1e-12);
        }
    }
}
