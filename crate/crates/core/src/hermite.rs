//! Pointwise evaluation of the L^2-orthonormal Hermite functions and their
//! scaled tensor products.
//!
//! The one-dimensional family is generated by the stable three-term
//! recurrence with the Gaussian folded in from degree zero, so values never
//! pass through the raw Hermite polynomials (which overflow long before the
//! degrees used here become interesting).

use crate::indices::MultiIndex;
use crate::scalar::{fp, fu, Scalar};

/// Values of the orthonormal Hermite functions h_0..h_{k_max} at x:
/// h_0(x) = pi^{-1/4} e^{-x^2/2},
/// h_{k+1}(x) = x sqrt(2/(k+1)) h_k(x) - sqrt(k/(k+1)) h_{k-1}(x).
pub fn hermite_values_1d<S: Scalar>(k_max: usize, x: S) -> Vec<S> {
    let mut out = Vec::with_capacity(k_max + 1);
    let h0 = fp::<S>(std::f64::consts::PI).powf(fp(-0.25)) * (-(x * x) / fp(2.0)).exp();
    out.push(h0);
    if k_max == 0 {
        return out;
    }
    out.push(x * fp::<S>(2.0).sqrt() * h0);
    for k in 1..k_max {
        let kk = fu::<S>(k);
        let next = (x * (fp::<S>(2.0) / (kk + S::one())).sqrt()) * out[k]
            - (kk / (kk + S::one())).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Scaled multi-dimensional Hermite function at x in R^n:
/// |lambda|^{n/4} prod_j h_{alpha_j}(|lambda|^{1/2} x_j).
/// Orthonormal in L^2(R^n) for each fixed lambda != 0.
pub fn hermite_eval<S: Scalar>(alpha: &MultiIndex, lambda: S, x: &[S]) -> S {
    let n = alpha.len();
    assert_eq!(x.len(), n, "point dimension must match the multi-index");
    let root = lambda.abs().sqrt();
    let mut v = lambda.abs().powf(fu::<S>(n) / fp(4.0));
    for j in 0..n {
        let table = hermite_values_1d(alpha.alpha[j], root * x[j]);
        v = v * table[alpha.alpha[j]];
    }
    v
}

/// Values of every scaled Hermite function of degree <= k_max at one point,
/// in the same graded order as `indices::enumerate_indices`. Shares the
/// per-axis recurrence tables across all indices.
pub fn hermite_eval_all<S: Scalar>(
    indices: &[MultiIndex],
    k_max: usize,
    lambda: S,
    x: &[S],
) -> Vec<S> {
    let n = x.len();
    let root = lambda.abs().sqrt();
    let scale = lambda.abs().powf(fu::<S>(n) / fp(4.0));
    let tables: Vec<Vec<S>> = x
        .iter()
        .map(|&xj| hermite_values_1d(k_max, root * xj))
        .collect();
    indices
        .iter()
        .map(|alpha| {
            let mut v = scale;
            for j in 0..n {
                v = v * tables[j][alpha.alpha[j]];
            }
            v
        })
        .collect()
}
