//! Gauss-Hermite quadrature in Lebesgue form, tensor grids over R^m, and
//! deterministic summation helpers.
//!
//! All rules are stored with plain Lebesgue weights: `sum_i w_i f(x_i)`
//! approximates `int f(x) dx` for integrands of the form
//! (polynomial) x (Gaussian at the scale the rule was built for). The
//! Gaussian factor of the classical rule is divided out at construction so
//! callers never have to reason about weight functions.

use crate::scalar::{fp, fu, Scalar, C};
use rayon::prelude::*;

/// One quadrature axis: nodes and Lebesgue weights, both sorted by node.
#[derive(Clone, Debug)]
pub struct QuadAxis<S: Scalar> {
    pub nodes: Vec<S>,
    pub weights: Vec<S>,
}

/// Tensor-product quadrature grid over R^m.
///
/// Invariant: every axis has the same positive node count; `len()` is the
/// product of the per-axis counts and enumerates points in row-major order
/// (last axis fastest).
#[derive(Clone, Debug)]
pub struct QuadratureGrid<S: Scalar> {
    pub axes: Vec<QuadAxis<S>>,
}

impl<S: Scalar> QuadratureGrid<S> {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.nodes.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point and Lebesgue weight at flat index `i` (row-major, last axis
    /// fastest).
    pub fn point(&self, i: usize) -> (Vec<S>, S) {
        let m = self.dim();
        let mut idx = i;
        let mut x = vec![S::zero(); m];
        let mut w = S::one();
        for axis in (0..m).rev() {
            let q = self.axes[axis].nodes.len();
            let j = idx % q;
            idx /= q;
            x[axis] = self.axes[axis].nodes[j];
            w = w * self.axes[axis].weights[j];
        }
        (x, w)
    }

    /// Iterator over (point, weight) pairs in flat order.
    pub fn points(&self) -> impl Iterator<Item = (Vec<S>, S)> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Deterministic quadrature of a complex-valued integrand: weights are
    /// applied per node and the node values are combined by chunked tree
    /// summation, so the result does not depend on thread count.
    pub fn integrate<F>(&self, f: F) -> C<S>
    where
        F: Fn(&[S]) -> C<S> + Sync,
    {
        par_tree_sum(self.len(), |i| {
            let (x, w) = self.point(i);
            f(&x) * C::new(w, S::zero())
        })
    }
}

/// Classical Q-point Gauss-Hermite rule for the weight e^{-x^2}:
/// returns (nodes, weights) with sum_i w_i f(x_i) ~ int f(x) e^{-x^2} dx.
///
/// Nodes are the eigenvalues of the Jacobi matrix (Golub-Welsch), computed
/// by an implicit-shift QL iteration on the symmetric tridiagonal matrix;
/// weights come from the Christoffel formula w = 1 / sum_k p_k(x)^2 over the
/// orthonormal polynomials, which avoids needing eigenvectors.
pub fn gauss_hermite_rule<S: Scalar>(q: usize) -> (Vec<S>, Vec<S>) {
    assert!(q >= 1, "quadrature order must be positive");
    let mut diag = vec![S::zero(); q];
    let mut off = vec![S::zero(); q];
    for k in 1..q {
        // Jacobi off-diagonal beta_k = sqrt(k/2) for orthonormal Hermite.
        off[k - 1] = (fu::<S>(k) / fp(2.0)).sqrt();
    }
    symtri_eigenvalues(&mut diag, &mut off);
    diag.sort_by(|a, b| a.partial_cmp(b).expect("nodes are finite"));
    let weights = diag.iter().map(|&x| christoffel_weight(q, x)).collect();
    (diag, weights)
}

/// Lebesgue-form Gauss rule matched to integrands (polynomial) x e^{-c x^2}:
/// sum w_i f(x_i) ~ int f dx. Nodes are the classical ones scaled by
/// 1/sqrt(c); the classical weights are divided by the Gaussian so the rule
/// integrates against plain Lebesgue measure.
pub fn gauss_axis_scaled<S: Scalar>(c: S, q: usize) -> QuadAxis<S> {
    assert!(c > S::zero(), "Gaussian scale must be positive");
    let (xs, _) = gauss_hermite_rule::<S>(q);
    let s = c.sqrt();
    let mut nodes = Vec::with_capacity(q);
    let mut weights = Vec::with_capacity(q);
    for &x in &xs {
        nodes.push(x / s);
        // Lebesgue weight: w_i e^{x_i^2} / sqrt(c), evaluated via the
        // Christoffel sum of e^{x^2/2}-scaled polynomials so the product
        // never overflows even at large Q.
        weights.push(christoffel_weight_lebesgue(q, x) / s);
    }
    QuadAxis { nodes, weights }
}

/// Tensor grid over R^m for integrands at Gaussian scale |lambda|
/// (f = polynomial x e^{-c|x|^2} with c near |lambda|): the classical rule
/// rescaled per axis, Lebesgue weights.
pub fn gauss_hermite_grid<S: Scalar>(lambda: S, m: usize, q: usize) -> QuadratureGrid<S> {
    let axis = gauss_axis_scaled(lambda.abs(), q);
    QuadratureGrid {
        axes: vec![axis; m],
    }
}

/// w_i = 1 / sum_{k<q} p_k(x)^2 with p_k orthonormal for e^{-x^2} dx.
fn christoffel_weight<S: Scalar>(q: usize, x: S) -> S {
    let mut sum = S::zero();
    let mut pkm1 = S::zero();
    // p_0 = pi^{-1/4}
    let mut pk = fp::<S>(std::f64::consts::PI).powf(fp(-0.25));
    sum = sum + pk * pk;
    for k in 0..q - 1 {
        let beta_k = (fu::<S>(k) / fp(2.0)).sqrt();
        let beta_k1 = (fu::<S>(k + 1) / fp(2.0)).sqrt();
        let pk1 = (x * pk - beta_k * pkm1) / beta_k1;
        pkm1 = pk;
        pk = pk1;
        sum = sum + pk * pk;
    }
    sum.recip()
}

/// Lebesgue-converted Christoffel weight w_i e^{x^2}: computed as
/// 1 / sum_k (p_k(x) e^{-x^2/2})^2 so the scaled polynomial values stay
/// bounded near 1 and no large exponential is ever formed.
fn christoffel_weight_lebesgue<S: Scalar>(q: usize, x: S) -> S {
    let damp = (-(x * x) / fp(2.0)).exp();
    let mut sum = S::zero();
    let mut pkm1 = S::zero();
    let mut pk = fp::<S>(std::f64::consts::PI).powf(fp(-0.25)) * damp;
    sum = sum + pk * pk;
    for k in 0..q - 1 {
        let beta_k = (fu::<S>(k) / fp(2.0)).sqrt();
        let beta_k1 = (fu::<S>(k + 1) / fp(2.0)).sqrt();
        let pk1 = (x * pk - beta_k * pkm1) / beta_k1;
        pkm1 = pk;
        pk = pk1;
        sum = sum + pk * pk;
    }
    sum.recip()
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.
/// `diag` is overwritten with the eigenvalues (unsorted); `off[0..n-1]`
/// holds the subdiagonal and is destroyed.
fn symtri_eigenvalues<S: Scalar>(diag: &mut [S], off: &mut [S]) {
    let n = diag.len();
    if n <= 1 {
        return;
    }
    off[n - 1] = S::zero();
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            // Find a negligible subdiagonal element.
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= S::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "QL iteration failed to converge");
            let mut g = (diag[l + 1] - diag[l]) / (fp::<S>(2.0) * off[l]);
            let mut r = g.hypot(S::one());
            let sign_r = if g >= S::zero() { r.abs() } else { -r.abs() };
            g = diag[m] - diag[l] + off[l] / (g + sign_r);
            let mut s = S::one();
            let mut c = S::one();
            let mut p = S::zero();
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == S::zero() {
                    diag[i + 1] = diag[i + 1] - p;
                    off[m] = S::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + fp::<S>(2.0) * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] = diag[l] - p;
            off[l] = g;
            off[m] = S::zero();
        }
    }
}

/// Pairwise (tree) sum: deterministic and accurate independent of length.
pub fn tree_sum<S: Scalar>(xs: &[C<S>]) -> C<S> {
    match xs.len() {
        0 => C::new(S::zero(), S::zero()),
        1 => xs[0],
        n => {
            let mid = n / 2;
            tree_sum(&xs[..mid]) + tree_sum(&xs[mid..])
        }
    }
}

/// Chunk size for the parallel reduction. Fixed so that the partial-sum
/// boundaries (hence the floating-point result) never depend on thread
/// count.
const CHUNK: usize = 4096;

/// Error-free split of a + b: the returned pair is (fl(a + b), residual)
/// and sums to a + b exactly.
#[inline]
pub fn two_sum<S: Scalar>(a: S, b: S) -> (S, S) {
    let s = a + b;
    let ap = s - b;
    let bp = s - ap;
    (s, (a - ap) + (b - bp))
}

/// Error-free split of a * b via a fused multiply-add.
#[inline]
pub fn two_prod<S: Scalar>(a: S, b: S) -> (S, S) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Folds x into a compensated accumulator (running sum plus error carry).
/// Finishing a sum means adding the carry back once.
#[inline]
pub fn comp_push<S: Scalar>(sum: &mut S, carry: &mut S, x: S) {
    let (s, e) = two_sum(*sum, x);
    *sum = s;
    *carry += e;
}

/// Deterministic parallel sum of f(0..len): each fixed 4096-element chunk is
/// tree-summed independently (in parallel), then the chunk results are
/// tree-summed in index order.
pub fn par_tree_sum<S: Scalar, F>(len: usize, f: F) -> C<S>
where
    F: Fn(usize) -> C<S> + Sync,
{
    let n_chunks = len.div_ceil(CHUNK);
    let partials: Vec<C<S>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = (lo + CHUNK).min(len);
            let vals: Vec<C<S>> = (lo..hi).map(&f).collect();
            tree_sum(&vals)
        })
        .collect();
    tree_sum(&partials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_point_rule_is_classical() {
        // Classical 2-point rule: nodes +-1/sqrt(2), weights sqrt(pi)/2.
        let (x, w) = gauss_hermite_rule::<f64>(2);
        assert_abs_diff_eq!(x[0], -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(w[0], std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn lebesgue_two_point_grid() {
        let grid = gauss_hermite_grid::<f64>(1.0, 1, 2);
        let (x0, w0) = grid.point(0);
        assert_abs_diff_eq!(x0[0], -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        // Lebesgue weight = (sqrt(pi)/2) e^{1/2}.
        let expect = std::f64::consts::PI.sqrt() / 2.0 * (0.5f64).exp();
        assert_abs_diff_eq!(w0, expect, epsilon = 1e-13);
    }

    #[test]
    fn gaussian_mass_1d() {
        let grid = gauss_hermite_grid::<f64>(1.0, 1, 20);
        let got = grid.integrate(|x| C::new((-x[0] * x[0]).exp(), 0.0));
        assert_abs_diff_eq!(got.re, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn polynomial_exactness_high_degree() {
        // int x^8 e^{-2x^2} dx = 105/16 * sqrt(pi/2) / 2^4
        let grid = gauss_hermite_grid::<f64>(2.0, 1, 24);
        let got = grid.integrate(|x| C::new(x[0].powi(8) * (-2.0 * x[0] * x[0]).exp(), 0.0));
        let expect = 105.0 / 16.0 * (std::f64::consts::PI / 2.0).sqrt() / 16.0;
        assert_abs_diff_eq!(got.re, expect, epsilon = 1e-12 * expect);
    }

    #[test]
    fn tensor_grid_2d_mass() {
        let grid = gauss_hermite_grid::<f64>(1.5, 2, 16);
        let got = grid.integrate(|x| {
            C::new((-1.5 * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0)
        });
        assert_abs_diff_eq!(got.re, std::f64::consts::PI / 1.5, epsilon = 1e-12);
    }

    #[test]
    fn tree_sum_matches_sequential() {
        let xs: Vec<C<f64>> = (0..1000)
            .map(|i| C::new((i as f64).sin(), (i as f64).cos()))
            .collect();
        let seq: C<f64> = xs.iter().fold(C::new(0.0, 0.0), |a, b| a + b);
        let tree = tree_sum(&xs);
        assert_abs_diff_eq!(seq.re, tree.re, epsilon = 1e-10);
        assert_abs_diff_eq!(seq.im, tree.im, epsilon = 1e-10);
    }

    #[test]
    fn par_tree_sum_deterministic() {
        let a = par_tree_sum(100_000, |i| C::new(1.0 / (i as f64 + 1.0), 0.0));
        let b = par_tree_sum(100_000, |i| C::new(1.0 / (i as f64 + 1.0), 0.0));
        assert_eq!(a, b);
    }

    #[test]
    fn large_q_weights_stay_finite() {
        let (x, w) = gauss_hermite_rule::<f64>(64);
        for (&xi, &wi) in x.iter().zip(&w) {
            assert!(xi.is_finite());
            assert!(wi.is_finite() && wi > 0.0);
        }
        // Total mass sqrt(pi).
        let total: f64 = w.iter().sum();
        assert_abs_diff_eq!(total, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
    }
}
