//! Matrix exponential by scaling and squaring with a degree-13 Padé core,
//! plus a Taylor-based routine for the action `exp(M) v`.

use num_complex::Complex64;

use super::{ComplexMatrix, FockError};

/// Padé(13) numerator coefficients.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// 1-norm bound under which Padé(13) needs no scaling.
const THETA13: f64 = 5.371_920_351_148_152;

/// Squaring steps beyond this indicate the result would overflow.
const MAX_SQUARINGS: i32 = 1000;

/// Computes `exp(m)`.
///
/// Diagonal inputs are exponentiated entrywise. Everything else goes through
/// scaling and squaring around a Padé(13) approximant.
pub fn matrix_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix, FockError> {
    if !m.is_square() {
        return Err(FockError::Shape(format!(
            "matrix exponential of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if m.is_diagonal() {
        let diag: Vec<Complex64> = m.diagonal().iter().map(|z| z.exp()).collect();
        let out = ComplexMatrix::from_diagonal(&diag);
        return if out.all_finite() {
            Ok(out)
        } else {
            Err(FockError::Numeric("diagonal exponential overflowed".into()))
        };
    }

    let n = m.rows();
    let norm = m.norm_one();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    if squarings > MAX_SQUARINGS {
        return Err(FockError::Numeric(format!(
            "norm {norm:e} needs {squarings} squarings"
        )));
    }
    let a = m.scale(Complex64::new(0.5f64.powi(squarings), 0.0));

    let ident = ComplexMatrix::identity(n);
    let a2 = a.matmul_unchecked(&a);
    let a4 = a2.matmul_unchecked(&a2);
    let a6 = a4.matmul_unchecked(&a2);
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);

    let lin = |terms: &[(&ComplexMatrix, usize)]| {
        let mut acc = ComplexMatrix::zeros(n, n);
        for (mat, k) in terms {
            acc = acc.add(&mat.scale(b(*k))).expect("square operands");
        }
        acc
    };

    let u_inner = a6.matmul_unchecked(&lin(&[(&a6, 13), (&a4, 11), (&a2, 9)]));
    let u_tail = lin(&[(&a6, 7), (&a4, 5), (&a2, 3), (&ident, 1)]);
    let u = a.matmul_unchecked(&u_inner.add(&u_tail)?);

    let v_inner = a6.matmul_unchecked(&lin(&[(&a6, 12), (&a4, 10), (&a2, 8)]));
    let v_tail = lin(&[(&a6, 6), (&a4, 4), (&a2, 2), (&ident, 0)]);
    let v = v_inner.add(&v_tail)?;

    let mut result = lu_solve(&v.sub(&u)?, &v.add(&u)?)?;
    for _ in 0..squarings {
        result = result.matmul_unchecked(&result);
        if !result.all_finite() {
            return Err(FockError::Numeric("overflow while squaring".into()));
        }
    }
    if !result.all_finite() {
        return Err(FockError::Numeric("non-finite Padé result".into()));
    }
    Ok(result)
}

/// Solves `lhs * X = rhs` with partially pivoted Gaussian elimination.
fn lu_solve(lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix, FockError> {
    let n = lhs.rows();
    let m = rhs.cols();
    let mut a: Vec<Complex64> = lhs.as_slice().to_vec();
    let mut b: Vec<Complex64> = rhs.as_slice().to_vec();

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .expect("non-empty range");
        if a[pivot * n + col].norm() == 0.0 {
            return Err(FockError::Numeric("singular Padé denominator".into()));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            for k in 0..m {
                b.swap(col * m + k, pivot * m + k);
            }
        }
        let inv = Complex64::new(1.0, 0.0) / a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] * inv;
            if factor.re == 0.0 && factor.im == 0.0 {
                continue;
            }
            for k in col..n {
                let t = a[col * n + k];
                a[row * n + k] -= factor * t;
            }
            for k in 0..m {
                let t = b[col * m + k];
                b[row * m + k] -= factor * t;
            }
        }
    }

    for row in (0..n).rev() {
        let inv = Complex64::new(1.0, 0.0) / a[row * n + row];
        for k in 0..m {
            let mut acc = b[row * m + k];
            for j in row + 1..n {
                acc -= a[row * n + j] * b[j * m + k];
            }
            b[row * m + k] = acc * inv;
        }
    }
    ComplexMatrix::new(n, m, b)
}

/// Computes `exp(m) v` without forming `exp(m)`.
///
/// Only the nonzero entries of `m` take part; see [`expm_multiply_sparse`].
pub fn expm_multiply(m: &ComplexMatrix, v: &[Complex64]) -> Result<Vec<Complex64>, FockError> {
    if !m.is_square() {
        return Err(FockError::Shape(format!(
            "exponential action of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let entries: Vec<(usize, usize, Complex64)> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .filter_map(|(r, c)| {
            let z = m[(r, c)];
            (z.re != 0.0 || z.im != 0.0).then_some((r, c, z))
        })
        .collect();
    expm_multiply_sparse(n, &entries, v)
}

/// `exp(M) v` for the `n x n` matrix with the given `(row, col, value)`
/// entries (repeats are summed).
///
/// The exponent is split into `s` steps with `‖M/s‖₁ ≤ 2` and each step is
/// a Taylor series run until the next term no longer changes the iterate.
pub fn expm_multiply_sparse(
    n: usize,
    entries: &[(usize, usize, Complex64)],
    v: &[Complex64],
) -> Result<Vec<Complex64>, FockError> {
    if v.len() != n {
        return Err(FockError::Shape(format!(
            "vector of length {} against {n} columns",
            v.len()
        )));
    }
    if let Some(&(r, c, _)) = entries.iter().find(|(r, c, _)| *r >= n || *c >= n) {
        return Err(FockError::Shape(format!("entry ({r}, {c}) outside {n}x{n}")));
    }
    if entries.iter().any(|(_, _, z)| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(FockError::NonFinite);
    }
    let mut col_sums = vec![0.0; n];
    for &(_, c, z) in entries {
        col_sums[c] += z.norm();
    }
    let norm = col_sums.iter().copied().fold(0.0, f64::max);
    let steps = (norm / 2.0).ceil().max(1.0);
    if steps > 1e7 {
        return Err(FockError::Numeric(format!("norm {norm:e} too large")));
    }
    let steps = steps as usize;
    let inv_steps = 1.0 / steps as f64;
    let scaled: Vec<(usize, usize, Complex64)> =
        entries.iter().map(|&(r, c, z)| (r, c, z * inv_steps)).collect();
    let apply = |x: &[Complex64], out: &mut [Complex64]| {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for &(r, c, z) in &scaled {
            out[r] += z * x[c];
        }
    };

    let mut state = v.to_vec();
    let mut term = vec![Complex64::new(0.0, 0.0); n];
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..steps {
        term.copy_from_slice(&state);
        for k in 1..=80 {
            apply(&term, &mut next);
            let inv_k = 1.0 / k as f64;
            next.iter_mut().for_each(|z| *z *= inv_k);
            std::mem::swap(&mut term, &mut next);
            let mut changed = false;
            for (s, t) in state.iter_mut().zip(&term) {
                let before = *s;
                *s += t;
                changed |= *s != before;
            }
            if !changed {
                break;
            }
        }
    }
    if state.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(FockError::Numeric("non-finite exponential action".into()));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let e = matrix_exponential(&ComplexMatrix::zeros(4, 4)).unwrap();
        assert_eq!(e, ComplexMatrix::identity(4));
    }

    #[test]
    fn diagonal_phases_exponentiate_entrywise() {
        let phases = [1.7, -0.7, -0.1, -0.9];
        let m = ComplexMatrix::from_diagonal(&phases.map(|p| c(0.0, p)));
        let e = matrix_exponential(&m).unwrap();
        for (i, p) in phases.iter().enumerate() {
            let want = c(p.cos(), p.sin());
            assert!((e[(i, i)] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn nilpotent_matches_closed_form() {
        // exp([[0, t], [0, 0]]) = [[1, t], [0, 1]]
        let m = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(3.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let e = matrix_exponential(&m).unwrap();
        let want =
            ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(3.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)])
                .unwrap();
        assert!(e.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn rotation_generator_with_large_norm() {
        // exp(t [[0, -1], [1, 0]]) is a rotation by t; t = 40 forces squaring.
        let t = 40.0;
        let m = ComplexMatrix::from_real(2, 2, &[0.0, -t, t, 0.0]).unwrap();
        let e = matrix_exponential(&m).unwrap();
        let want = ComplexMatrix::from_real(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]).unwrap();
        assert!(e.max_abs_diff(&want) < 1e-11);
    }

    #[test]
    fn non_square_is_shape_error() {
        assert!(matches!(
            matrix_exponential(&ComplexMatrix::zeros(2, 3)),
            Err(FockError::Shape(_))
        ));
    }

    #[test]
    fn overflow_is_numeric_error() {
        let m = ComplexMatrix::from_real(2, 2, &[1e300, 1e300, 0.0, 1e300]).unwrap();
        assert!(matches!(matrix_exponential(&m), Err(FockError::Numeric(_))));
    }

    #[test]
    fn action_matches_dense_exponential() {
        let m = ComplexMatrix::new(
            3,
            3,
            vec![
                c(0.0, 0.3),
                c(1.2, -0.4),
                c(0.0, 0.0),
                c(-1.2, -0.4),
                c(0.0, -0.2),
                c(2.5, 0.0),
                c(0.0, 0.0),
                c(-2.5, 0.0),
                c(0.0, 0.1),
            ],
        )
        .unwrap();
        let v = [c(1.0, 0.0), c(0.0, 0.5), c(-0.3, 0.2)];
        let dense = matrix_exponential(&m).unwrap().mul_vec(&v).unwrap();
        let action = expm_multiply(&m, &v).unwrap();
        for (a, b) in dense.iter().zip(&action) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }
}
