//! Single-mode continuous-variable states: coherent (displaced vacuum) and
//! squeezed vacuum.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::EncodeError;
use crate::fock::{expm_multiply_sparse, ladder_pair, matrix_exponential, FockVector};

pub const DEFAULT_ALPHA_CLAMP: f64 = 1.5;
pub const DEFAULT_R_CLAMP: f64 = 1.0;

/// Displacement amplitude `α` with the magnitude bound it is checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementParams {
    pub alpha: Complex64,
    pub clamp: f64,
}

impl DisplacementParams {
    pub fn new(alpha: Complex64) -> Self {
        Self {
            alpha,
            clamp: DEFAULT_ALPHA_CLAMP,
        }
    }

    pub fn real(alpha: f64) -> Self {
        Self::new(Complex64::new(alpha, 0.0))
    }

    pub fn with_clamp(self, clamp: f64) -> Self {
        Self { clamp, ..self }
    }

    fn check(&self) -> Result<(), EncodeError> {
        let a = self.alpha;
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(EncodeError::Domain(format!("non-finite displacement {a}")));
        }
        if a.norm() > self.clamp {
            return Err(EncodeError::Domain(format!(
                "|alpha| = {} exceeds clamp {}",
                a.norm(),
                self.clamp
            )));
        }
        Ok(())
    }
}

/// Squeezing parameter `ζ = r e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    r: f64,
    phi: f64,
    pub clamp: f64,
}

impl SqueezeParams {
    /// `r` must be non-negative; `phi` is wrapped into `[0, 2π)`.
    pub fn new(r: f64, phi: f64) -> Result<Self, EncodeError> {
        if !r.is_finite() || !phi.is_finite() || r < 0.0 {
            return Err(EncodeError::Domain(format!(
                "invalid squeezing r = {r}, phi = {phi}"
            )));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self {
            r,
            phi,
            clamp: DEFAULT_R_CLAMP,
        })
    }

    /// Real squeezing `ζ = x`: `r = |x|`, `φ = 0` for `x ≥ 0` and `π` otherwise.
    pub fn real(x: f64) -> Result<Self, EncodeError> {
        let phi = if x < 0.0 { std::f64::consts::PI } else { 0.0 };
        Self::new(x.abs(), phi)
    }

    pub fn with_clamp(self, clamp: f64) -> Self {
        Self { clamp, ..self }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn zeta(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.phi)
    }

    fn check(&self) -> Result<(), EncodeError> {
        if self.r > self.clamp {
            return Err(EncodeError::Domain(format!(
                "r = {} exceeds clamp {}",
                self.r, self.clamp
            )));
        }
        Ok(())
    }
}

/// Coherent state `|α⟩` from the closed form `e^{-|α|²/2} αⁿ / √n!`.
pub fn displace_vacuum(p: DisplacementParams, dim: usize) -> Result<FockVector, EncodeError> {
    p.check()?;
    if dim < 2 {
        return Err(crate::fock::FockError::InvalidDimension(dim).into());
    }
    let mut amps = Vec::with_capacity(dim);
    let mut amp = Complex64::new((-0.5 * p.alpha.norm_sqr()).exp(), 0.0);
    amps.push(amp);
    for n in 1..dim {
        amp = amp * p.alpha / (n as f64).sqrt();
        amps.push(amp);
    }
    Ok(FockVector::new(amps)?)
}

/// Coherent state built as `exp(α a† - α* a) |0⟩` with a dense matrix
/// exponential. Slower than [`displace_vacuum`]; kept as an independent route.
pub fn displace_vacuum_expm(p: DisplacementParams, dim: usize) -> Result<FockVector, EncodeError> {
    p.check()?;
    let lp = ladder_pair(dim)?;
    let generator = lp
        .create
        .scale(p.alpha)
        .sub(&lp.annihilate.scale(p.alpha.conj()))?;
    let d = matrix_exponential(&generator)?;
    let vacuum = FockVector::vacuum(dim)?;
    Ok(FockVector::new(d.mul_vec(vacuum.amplitudes())?)?)
}

/// Squeezed vacuum `exp(½(ζ* a² - ζ a†²)) |0⟩`.
///
/// The generator is banded (`a²` and `a†²` move two levels), so only its
/// nonzero entries `<n-2| a² |n> = sqrt(n(n-1))` are formed.
pub fn squeeze_vacuum(p: SqueezeParams, dim: usize) -> Result<FockVector, EncodeError> {
    p.check()?;
    let vacuum = FockVector::vacuum(dim)?;
    let zeta = p.zeta();
    let mut entries = Vec::with_capacity(2 * dim);
    for n in 2..dim {
        let s = ((n * (n - 1)) as f64).sqrt();
        entries.push((n - 2, n, zeta.conj() * (0.5 * s)));
        entries.push((n, n - 2, -zeta * (0.5 * s)));
    }
    Ok(FockVector::new(expm_multiply_sparse(
        dim,
        &entries,
        vacuum.amplitudes(),
    )?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::quadrature_variances;

    /// Poisson law evaluated directly from its definition.
    fn poisson(lambda: f64, n: u32) -> f64 {
        let fact: f64 = (1..=n).map(f64::from).product();
        lambda.powi(n as i32) * (-lambda).exp() / fact
    }

    #[test]
    fn coherent_probabilities_follow_poisson() {
        let state = displace_vacuum(DisplacementParams::real(0.8), 30).unwrap();
        let p = state.probabilities();
        for n in 0..10 {
            assert!((p[n] - poisson(0.64, n as u32)).abs() < 1e-15);
        }
        // four-decimal values of the Poisson law at mean 0.64
        let rounded: Vec<f64> = p[..5].iter().map(|x| (x * 1e4).round() / 1e4).collect();
        assert_eq!(rounded, vec![0.5273, 0.3375, 0.1080, 0.0230, 0.0037]);
    }

    #[test]
    fn coherent_small_alpha_oracle() {
        let p = displace_vacuum(DisplacementParams::real(0.5), 20)
            .unwrap()
            .probabilities();
        assert!((p[0] - 0.778801).abs() < 5e-7);
        assert!((p[1] - 0.194700).abs() < 5e-7);
        assert!((p[2] - 0.024338).abs() < 5e-7);
    }

    #[test]
    fn zero_displacement_is_vacuum() {
        for state in [
            displace_vacuum(DisplacementParams::real(0.0), 8).unwrap(),
            displace_vacuum_expm(DisplacementParams::real(0.0), 8).unwrap(),
        ] {
            assert_eq!(state, FockVector::vacuum(8).unwrap());
        }
    }

    #[test]
    fn displacement_clamp_is_hard_error() {
        assert!(matches!(
            displace_vacuum(DisplacementParams::real(1.6), 30),
            Err(EncodeError::Domain(_))
        ));
        assert!(displace_vacuum(DisplacementParams::real(1.6).with_clamp(2.0), 30).is_ok());
    }

    #[test]
    fn expm_route_matches_closed_form() {
        let p = DisplacementParams::real(0.8);
        let a = displace_vacuum(p, 30).unwrap();
        let b = displace_vacuum_expm(p, 30).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-8);
        }
        assert!(b.norm_sqr() >= 1.0 - 1e-10);
    }

    #[test]
    fn complex_alpha_matches_closed_form() {
        let p = DisplacementParams::new(Complex64::new(0.6, -0.7));
        let a = displace_vacuum(p, 30).unwrap();
        let b = displace_vacuum_expm(p, 30).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn zero_squeezing_is_vacuum() {
        for phi in [0.0, 1.0, 4.0] {
            let s = squeeze_vacuum(SqueezeParams::new(0.0, phi).unwrap(), 10).unwrap();
            assert_eq!(s, FockVector::vacuum(10).unwrap());
        }
    }

    /// Squeezed-vacuum amplitudes from the series
    /// c₂ₙ = (-e^{iφ} tanh r)ⁿ √((2n)!) / (2ⁿ n! √cosh r).
    fn squeezed_series(r: f64, phi: f64, dim: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        let ratio = -Complex64::from_polar(r.tanh(), phi);
        for n in 0..dim.div_ceil(2) {
            let mut log_mag = -0.5 * r.cosh().ln();
            for k in 1..=2 * n {
                log_mag += 0.5 * (k as f64).ln();
            }
            for k in 1..=n {
                log_mag -= (k as f64).ln();
            }
            log_mag -= n as f64 * 2f64.ln();
            out[2 * n] = ratio.powu(n as u32) * log_mag.exp();
        }
        out
    }

    #[test]
    fn squeezed_vacuum_matches_series_oracle() {
        for (r, phi) in [(0.8, 0.0), (0.5, 1.3), (0.3, std::f64::consts::PI)] {
            let state = squeeze_vacuum(SqueezeParams::new(r, phi).unwrap(), 60).unwrap();
            let want = squeezed_series(r, phi, 60);
            for (n, (x, y)) in state.amplitudes().iter().zip(&want).take(30).enumerate() {
                assert!((x - y).norm() < 1e-9, "r={r} n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn squeezed_vacuum_statistics() {
        let state = squeeze_vacuum(SqueezeParams::new(0.8, 0.0).unwrap(), 60).unwrap();
        let p = state.probabilities();
        assert!((p[0] - 1.0 / 0.8f64.cosh()).abs() < 1e-9);
        assert!(p.iter().skip(1).step_by(2).all(|&q| q < 1e-12));
        let (vx, vp) = quadrature_variances(&state).unwrap();
        let (wx, wp) = ((-1.6f64).exp() / 4.0, 1.6f64.exp() / 4.0);
        assert!(((vx - wx) / wx).abs() < 1e-6);
        assert!(((vp - wp) / wp).abs() < 1e-6);
    }

    #[test]
    fn squeeze_matches_dense_exponential() {
        let p = SqueezeParams::new(0.7, 0.4).unwrap();
        let lp = ladder_pair(40).unwrap();
        let a2 = lp.annihilate.matmul(&lp.annihilate).unwrap();
        let ad2 = lp.create.matmul(&lp.create).unwrap();
        let z = p.zeta();
        let g = a2.scale(z.conj() * 0.5).sub(&ad2.scale(z * 0.5)).unwrap();
        let dense = matrix_exponential(&g).unwrap();
        let want: Vec<Complex64> = (0..40).map(|r| dense[(r, 0)]).collect();
        let got = squeeze_vacuum(p, 40).unwrap();
        for (x, y) in got.amplitudes().iter().zip(&want) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn squeeze_clamp_and_sign() {
        assert!(matches!(
            squeeze_vacuum(SqueezeParams::new(1.2, 0.0).unwrap(), 60),
            Err(EncodeError::Domain(_))
        ));
        assert!(SqueezeParams::new(-0.1, 0.0).is_err());
        let neg = SqueezeParams::real(-0.4).unwrap();
        assert_eq!(neg.r(), 0.4);
        assert!((neg.phi() - std::f64::consts::PI).abs() < 1e-15);
        let wrapped = SqueezeParams::new(0.1, -1.0).unwrap();
        assert!((wrapped.phi() - (TAU - 1.0)).abs() < 1e-15);
    }
}
