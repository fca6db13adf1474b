//! Ladder matrices, the oscillator Hamiltonian and its spectral calculus in
//! the truncated Hermite basis.
//!
//! Operators act on coefficient vectors: column alpha of a matrix holds the
//! expansion of (operator applied to the alpha-th basis function). Raising
//! past the degree cutoff is silently dropped, so identities involving a
//! creation step hold on columns of degree <= k_max - 1 only.

use crate::basis::{CMatrix, HermiteBasis};
use crate::error::{FockError, Result};
use crate::scalar::{cr, fp, fu, Scalar};

/// Matrix of the creation operator on axis `j` (zero-based):
/// raises alpha_j by one with coefficient sqrt((2 alpha_j + 2)|lambda|).
pub fn creation_matrix<S: Scalar>(basis: &HermiteBasis<S>, j: usize) -> Result<CMatrix<S>> {
    check_axis(basis, j)?;
    let mut m = basis.zeros();
    let two_l = fp::<S>(2.0) * basis.lambda.abs();
    for (col, alpha) in basis.indices().iter().enumerate() {
        let up = alpha.raised(j);
        if let Some(row) = basis.rank(&up) {
            let coeff = (two_l * fu::<S>(alpha.alpha[j] + 1)).sqrt();
            m[(row, col)] = cr(coeff);
        }
    }
    Ok(m)
}

/// Matrix of the annihilation operator on axis `j` (zero-based):
/// lowers alpha_j by one with coefficient sqrt(2 alpha_j |lambda|).
pub fn annihilation_matrix<S: Scalar>(basis: &HermiteBasis<S>, j: usize) -> Result<CMatrix<S>> {
    check_axis(basis, j)?;
    let mut m = basis.zeros();
    let two_l = fp::<S>(2.0) * basis.lambda.abs();
    for (col, alpha) in basis.indices().iter().enumerate() {
        if let Some(down) = alpha.lowered(j) {
            let row = basis.rank(&down).expect("lowering stays inside the cutoff");
            let coeff = (two_l * fu::<S>(alpha.alpha[j])).sqrt();
            m[(row, col)] = cr(coeff);
        }
    }
    Ok(m)
}

/// Diagonal matrix of the oscillator eigenvalues (2|alpha| + n)|lambda|.
pub fn hermite_hamiltonian<S: Scalar>(basis: &HermiteBasis<S>) -> CMatrix<S> {
    let mut m = basis.zeros();
    for r in 0..basis.dim() {
        m[(r, r)] = cr(basis.energy(r));
    }
    m
}

/// Orthogonal projection onto the degree-k eigenspace.
pub fn spectral_projection<S: Scalar>(basis: &HermiteBasis<S>, k: usize) -> Result<CMatrix<S>> {
    if k > basis.k_max {
        return Err(FockError::InvalidParameter(format!(
            "projection degree {k} exceeds the cutoff {}",
            basis.k_max
        )));
    }
    let mut m = basis.zeros();
    for r in basis.degree_block(k) {
        m[(r, r)] = cr(S::one());
    }
    Ok(m)
}

/// Heat semigroup e^{-tH} as a diagonal matrix. Negative t is allowed and
/// amplifies high modes; callers own that risk.
pub fn hermite_semigroup<S: Scalar>(basis: &HermiteBasis<S>, t: S) -> CMatrix<S> {
    let mut m = basis.zeros();
    for r in 0..basis.dim() {
        m[(r, r)] = cr((-t * basis.energy(r)).exp());
    }
    m
}

/// Spectral multiplier m(H): diagonal with entries m((2|alpha| + n)|lambda|).
pub fn spectral_multiplier<S: Scalar, F>(basis: &HermiteBasis<S>, m: F) -> CMatrix<S>
where
    F: Fn(S) -> S,
{
    let mut out = basis.zeros();
    for r in 0..basis.dim() {
        out[(r, r)] = cr(m(basis.energy(r)));
    }
    out
}

fn check_axis<S: Scalar>(basis: &HermiteBasis<S>, j: usize) -> Result<()> {
    if j >= basis.n {
        return Err(FockError::InvalidParameter(format!(
            "axis {j} out of range for dimension {}",
            basis.n
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::hermite_eval;
    use crate::indices::MultiIndex;
    use crate::linalg::adjoint;
    use crate::quad::gauss_hermite_grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hamiltonian_spectrum_n1() {
        let b = HermiteBasis::<f64>::new(1, 2, 1.0).unwrap();
        let h = hermite_hamiltonian(&b);
        assert_abs_diff_eq!(h[(0, 0)].re, 1.0);
        assert_abs_diff_eq!(h[(1, 1)].re, 3.0);
        assert_abs_diff_eq!(h[(2, 2)].re, 5.0);
    }

    #[test]
    fn ground_state_ladder_actions() {
        let b = HermiteBasis::<f64>::new(1, 3, 1.0).unwrap();
        let a = annihilation_matrix(&b, 0).unwrap();
        let c = creation_matrix(&b, 0).unwrap();
        // A kills the ground state; A* sends it to sqrt(2) times degree 1.
        for r in 0..b.dim() {
            assert_abs_diff_eq!(a[(r, 0)].norm(), 0.0);
        }
        assert_abs_diff_eq!(c[(1, 0)].re, 2.0f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn annihilation_entry_matches_quadrature() {
        // (A Phi_2, Phi_1) at lambda = 3 with A = d/dx + |l|x, the derivative
        // taken by Richardson-extrapolated central differences.
        let lambda = 3.0f64;
        let b = HermiteBasis::<f64>::new(1, 3, lambda).unwrap();
        let a = annihilation_matrix(&b, 0).unwrap();
        let grid = gauss_hermite_grid(lambda, 1, 48);
        let phi = |k: usize, x: f64| hermite_eval(&MultiIndex::new(vec![k]), lambda, &[x]);
        let mut acc = 0.0;
        for (x, w) in grid.points() {
            let h = 1e-4;
            let d1 = (phi(2, x[0] + h / 2.0) - phi(2, x[0] - h / 2.0)) / h;
            let d2 = (phi(2, x[0] + h) - phi(2, x[0] - h)) / (2.0 * h);
            let deriv = (4.0 * d1 - d2) / 3.0;
            acc += w * (deriv + lambda * x[0] * phi(2, x[0])) * phi(1, x[0]);
        }
        assert_abs_diff_eq!(acc, 12.0f64.sqrt(), epsilon = 1e-7);
        assert_abs_diff_eq!(a[(1, 2)].re, 12.0f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn adjointness_on_interior() {
        let b = HermiteBasis::<f64>::new(2, 5, 1.7).unwrap();
        let interior = b.degree_block(0).start..b.degree_block(4).end;
        for j in 0..2 {
            let c = creation_matrix(&b, j).unwrap();
            let a = annihilation_matrix(&b, j).unwrap();
            let ct = adjoint(&c);
            for r in interior.clone() {
                for s in interior.clone() {
                    let d = (a[(r, s)] - ct[(r, s)]).norm();
                    assert!(d < 1e-14, "adjoint mismatch at ({r},{s}): {d}");
                }
            }
        }
    }

    #[test]
    fn hamiltonian_factorization_interior() {
        // H = (1/2) sum_j (A_j A_j* + A_j* A_j) on columns of degree < k_max.
        let b = HermiteBasis::<f64>::new(2, 4, 2.5).unwrap();
        let h = hermite_hamiltonian(&b);
        let mut sum = b.zeros();
        for j in 0..2 {
            let c = creation_matrix(&b, j).unwrap();
            let a = annihilation_matrix(&b, j).unwrap();
            sum = sum + a.dot(&c) + c.dot(&a);
        }
        let interior_cols = b.degree_block(3).end;
        for s in 0..interior_cols {
            for r in 0..b.dim() {
                let d = (sum[(r, s)] * cr(0.5) - h[(r, s)]).norm();
                assert!(d < 1e-12, "factorization off at ({r},{s}): {d}");
            }
        }
    }

    #[test]
    fn projections_resolve_identity() {
        let b = HermiteBasis::<f64>::new(2, 3, 1.0).unwrap();
        let mut sum = b.zeros();
        for k in 0..=3 {
            sum = sum + spectral_projection(&b, k).unwrap();
        }
        let eye = b.eye();
        assert_eq!(sum, eye);
        let p0 = spectral_projection(&b, 0).unwrap();
        let p1 = spectral_projection(&b, 1).unwrap();
        let prod = p0.dot(&p1);
        assert!(prod.iter().all(|x| x.norm() == 0.0));
        assert!(spectral_projection(&b, 4).is_err());
    }

    #[test]
    fn semigroup_law_and_identity() {
        let b = HermiteBasis::<f64>::new(1, 6, 2.0).unwrap();
        let s = hermite_semigroup(&b, 0.3);
        let t = hermite_semigroup(&b, 0.9);
        let st = hermite_semigroup(&b, 1.2);
        for r in 0..b.dim() {
            assert_abs_diff_eq!((s[(r, r)] * t[(r, r)]).re, st[(r, r)].re, epsilon = 1e-15);
        }
        let id = hermite_semigroup(&b, 0.0);
        assert_eq!(id, b.eye());
    }

    #[test]
    fn multiplier_applies_to_energies() {
        let b = HermiteBasis::<f64>::new(1, 4, 1.5).unwrap();
        let m = spectral_multiplier(&b, |e| 1.0 / (1.0 + e));
        for r in 0..b.dim() {
            assert_abs_diff_eq!(m[(r, r)].re, 1.0 / (1.0 + b.energy(r)), epsilon = 1e-15);
        }
    }

    #[test]
    fn axis_validation() {
        let b = HermiteBasis::<f64>::new(2, 2, 1.0).unwrap();
        assert!(creation_matrix(&b, 2).is_err());
        assert!(annihilation_matrix(&b, 5).is_err());
    }
}
