//! Closed-form kernels and weights: heat kernels, the Gaussian weights of
//! the twisted Bergman and Fock spaces, their reproducing kernels, and the
//! Laguerre functions spanning the commutative multiplier algebra.
//!
//! Everything here is an entire function evaluated directly from its
//! formula. Complex squares mean sum of squares (never the modulus), so all
//! evaluators extend holomorphically off the real points.

use crate::error::{FockError, Result};
use crate::scalar::{ci, cr, fp, fu, Scalar, C};

/// Shape parameters shared by the kernel family.
#[derive(Clone, Copy, Debug)]
pub struct KernelParams<S: Scalar> {
    pub lambda: S,
    pub t: S,
    pub n: usize,
}

impl<S: Scalar> KernelParams<S> {
    pub fn new(lambda: S, t: S, n: usize) -> Result<Self> {
        if lambda == S::zero() || !lambda.is_finite() {
            return Err(FockError::InvalidParameter(
                "kernel parameter lambda must be finite and nonzero".into(),
            ));
        }
        if t <= S::zero() || !t.is_finite() {
            return Err(FockError::InvalidParameter(
                "kernel time t must be positive".into(),
            ));
        }
        if n == 0 {
            return Err(FockError::InvalidParameter(
                "kernel dimension n must be at least 1".into(),
            ));
        }
        Ok(Self { lambda, t, n })
    }

    /// coth(lambda t), the spectral damping slope at time t.
    pub fn coth_lt(&self) -> S {
        coth(self.lambda * self.t)
    }

    /// coth(2 lambda t), the weight slope of the space at time t.
    pub fn coth_2lt(&self) -> S {
        coth(fp::<S>(2.0) * self.lambda * self.t)
    }
}

pub fn coth<S: Scalar>(x: S) -> S {
    // cosh/sinh in one tanh call; fine for all x != 0 at our scales.
    x.tanh().recip()
}

fn dot_c<S: Scalar>(a: &[C<S>], b: &[C<S>]) -> C<S> {
    let mut s = C::new(S::zero(), S::zero());
    for (x, y) in a.iter().zip(b.iter()) {
        s += *x * *y;
    }
    s
}

fn sum_sq<S: Scalar>(a: &[C<S>]) -> C<S> {
    dot_c(a, a)
}

fn norm_sq<S: Scalar>(a: &[C<S>]) -> S {
    a.iter().map(|x| x.norm_sqr()).fold(S::zero(), |p, q| p + q)
}

/// Heat kernel at time t, evaluated at a pair (y, v) of complex n-vectors:
/// (4 pi)^{-n} (lambda / sinh(lambda t))^n
///   exp(-(lambda/4) coth(lambda t) (y^2 + v^2)),
/// with y^2 = sum_j y_j^2. Even in lambda; entire in (y, v).
pub fn heat_kernel<S: Scalar>(params: &KernelParams<S>, y: &[C<S>], v: &[C<S>]) -> C<S> {
    let l = params.lambda;
    let lt = l * params.t;
    let amp = (l / lt.sinh()).powi(params.n as i32)
        / (fp::<S>(4.0) * fp::<S>(std::f64::consts::PI)).powi(params.n as i32);
    let quad = (sum_sq(y) + sum_sq(v)) * cr(l * coth(lt) / fp(4.0));
    (-quad).exp() * cr(amp)
}

/// Heat kernel at a real phase-space point laid out as [x_1..x_n, u_1..u_n].
pub fn heat_kernel_real<S: Scalar>(params: &KernelParams<S>, xu: &[S]) -> C<S> {
    debug_assert_eq!(xu.len(), 2 * params.n);
    let l = params.lambda;
    let lt = l * params.t;
    let amp = (l / lt.sinh()).powi(params.n as i32)
        / (fp::<S>(4.0) * fp::<S>(std::f64::consts::PI)).powi(params.n as i32);
    let r2 = xu.iter().map(|&s| s * s).fold(S::zero(), |p, q| p + q);
    cr(amp * (-(l * coth(lt) / fp(4.0)) * r2).exp())
}

/// Weight of the twisted Fock space at time t:
/// w(z, w) = exp(lambda Im(z . conj(w))) exp(-(lambda/2) coth(2 t lambda) (|z|^2 + |w|^2)).
pub fn fock_weight<S: Scalar>(params: &KernelParams<S>, z: &[C<S>], w: &[C<S>]) -> S {
    let l = params.lambda;
    let mut im_zw = S::zero();
    for (zj, wj) in z.iter().zip(w.iter()) {
        im_zw = im_zw + (*zj * wj.conj()).im;
    }
    let r2 = norm_sq(z) + norm_sq(w);
    (l * im_zw - l * params.coth_2lt() * r2 / fp(2.0)).exp()
}

/// Weight of the twisted Bergman space at time t:
/// W(z, w) = 4^n exp(lambda (u.y - v.x)) p_{2t}(2y, 2v)
/// with z = x + iy, w = u + iv. Real and positive.
pub fn bergman_weight<S: Scalar>(params: &KernelParams<S>, z: &[C<S>], w: &[C<S>]) -> S {
    let l = params.lambda;
    let mut cross = S::zero();
    for (zj, wj) in z.iter().zip(w.iter()) {
        // u.y - v.x per axis.
        cross = cross + wj.re * zj.im - wj.im * zj.re;
    }
    let y2: Vec<C<S>> = z.iter().map(|zj| C::new(fp::<S>(2.0) * zj.im, S::zero())).collect();
    let v2: Vec<C<S>> = w.iter().map(|wj| C::new(fp::<S>(2.0) * wj.im, S::zero())).collect();
    let doubled = KernelParams {
        lambda: params.lambda,
        t: fp::<S>(2.0) * params.t,
        n: params.n,
    };
    let p = heat_kernel(&doubled, &y2, &v2);
    fp::<S>(4.0).powi(params.n as i32) * (l * cross).exp() * p.re
}

/// Reproducing kernel of the twisted Bergman space:
/// p_{2t}(z - conj(a), w - conj(b)) exp(-(i lambda/2)(w.conj(a) - z.conj(b))).
pub fn bergman_kernel<S: Scalar>(
    params: &KernelParams<S>,
    z: &[C<S>],
    w: &[C<S>],
    a: &[C<S>],
    b: &[C<S>],
) -> C<S> {
    let za: Vec<C<S>> = z.iter().zip(a.iter()).map(|(zj, aj)| *zj - aj.conj()).collect();
    let wb: Vec<C<S>> = w.iter().zip(b.iter()).map(|(wj, bj)| *wj - bj.conj()).collect();
    let doubled = KernelParams {
        lambda: params.lambda,
        t: fp::<S>(2.0) * params.t,
        n: params.n,
    };
    heat_kernel(&doubled, &za, &wb) * twist_phase(params.lambda, z, w, a, b)
}

/// Reproducing kernel of the twisted Fock space:
/// exp((lambda/2) coth(2 t lambda) (z.conj(a) + w.conj(b)))
///   exp(-(i lambda/2)(w.conj(a) - z.conj(b))).
pub fn fock_kernel<S: Scalar>(
    params: &KernelParams<S>,
    z: &[C<S>],
    w: &[C<S>],
    a: &[C<S>],
    b: &[C<S>],
) -> C<S> {
    let abar: Vec<C<S>> = a.iter().map(|x| x.conj()).collect();
    let bbar: Vec<C<S>> = b.iter().map(|x| x.conj()).collect();
    let pairing = dot_c(z, &abar) + dot_c(w, &bbar);
    let grow = pairing * cr(params.lambda * params.coth_2lt() / fp(2.0));
    grow.exp() * twist_phase(params.lambda, z, w, a, b)
}

/// The oscillatory factor exp(-(i lambda/2)(w.conj(a) - z.conj(b))) shared by
/// both reproducing kernels.
pub fn twist_phase<S: Scalar>(lambda: S, z: &[C<S>], w: &[C<S>], a: &[C<S>], b: &[C<S>]) -> C<S> {
    let abar: Vec<C<S>> = a.iter().map(|x| x.conj()).collect();
    let bbar: Vec<C<S>> = b.iter().map(|x| x.conj()).collect();
    let arg = dot_c(w, &abar) - dot_c(z, &bbar);
    (-ci::<S>(lambda / fp(2.0)) * arg).exp()
}

/// Generalized Laguerre polynomial L_k^a(x) by the forward recurrence,
/// stable for the moderate degrees used here.
pub fn laguerre<S: Scalar>(k: usize, a: S, x: S) -> S {
    if k == 0 {
        return S::one();
    }
    let mut prev = S::one();
    let mut cur = S::one() + a - x;
    for m in 1..k {
        let mm = fu::<S>(m);
        let next = ((fp::<S>(2.0) * mm + S::one() + a - x) * cur - (mm + a) * prev) / (mm + S::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Laguerre function of type n-1 at scale lambda:
/// L_k^{n-1}(|lambda| r^2 / 2) exp(-|lambda| r^2 / 4) with r^2 the squared
/// Euclidean norm of the (complex) point. For a pair (z, w) pass the
/// concatenated coordinates; only |point|^2 enters.
pub fn laguerre_special_hermite<S: Scalar>(params: &KernelParams<S>, k: usize, point: &[C<S>]) -> S {
    let r2 = norm_sq(point);
    let l = params.lambda.abs();
    laguerre(k, fu::<S>(params.n - 1), l * r2 / fp(2.0)) * (-l * r2 / fp(4.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    type C64 = C<f64>;

    fn p(lambda: f64, t: f64, n: usize) -> KernelParams<f64> {
        KernelParams::new(lambda, t, n).unwrap()
    }

    fn cv(parts: &[(f64, f64)]) -> Vec<C64> {
        parts.iter().map(|&(re, im)| C64::new(re, im)).collect()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(KernelParams::new(0.0, 1.0, 1).is_err());
        assert!(KernelParams::new(1.0, 0.0, 1).is_err());
        assert!(KernelParams::new(1.0, -1.0, 1).is_err());
        assert!(KernelParams::new(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn heat_kernel_origin() {
        let k = p(1.0, 1.0, 1);
        let v = heat_kernel(&k, &cv(&[(0.0, 0.0)]), &cv(&[(0.0, 0.0)]));
        let expect = 1.0 / (4.0 * std::f64::consts::PI) * (1.0 / 1.0f64.sinh());
        assert_abs_diff_eq!(v.re, expect, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn heat_kernel_even_in_lambda() {
        let y = cv(&[(0.3, 0.1)]);
        let v = cv(&[(-0.2, 0.4)]);
        let a = heat_kernel(&p(1.7, 0.5, 1), &y, &v);
        let b = heat_kernel(&p(-1.7, 0.5, 1), &y, &v);
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-15);
    }

    #[test]
    fn heat_kernel_small_lambda_limit() {
        // At lambda -> 0 the kernel becomes the Euclidean heat kernel
        // (4 pi t)^{-n} exp(-r^2/(4t)).
        let k = p(1e-6, 0.7, 1);
        let y = cv(&[(0.9, 0.0)]);
        let v = cv(&[(-0.4, 0.0)]);
        let got = heat_kernel(&k, &y, &v);
        let r2 = 0.9f64 * 0.9 + 0.4 * 0.4;
        let expect = (4.0 * std::f64::consts::PI * 0.7).powi(-1) * (-r2 / (4.0 * 0.7)).exp();
        assert_abs_diff_eq!(got.re, expect, epsilon = 1e-10);
    }

    #[test]
    fn heat_kernel_mass_is_sech_power() {
        // int p_t dx du over R^{2n} = cosh(lambda t)^{-n}: Gaussian integral
        // of the closed form. Checked by quadrature at n=1.
        use crate::quad::gauss_hermite_grid;
        let k = p(1.3, 0.6, 1);
        let grid = gauss_hermite_grid(0.5 * 1.3, 2, 48);
        let got = grid.integrate(|xu| heat_kernel_real(&k, xu));
        let expect = 1.0 / (1.3f64 * 0.6).cosh();
        assert_abs_diff_eq!(got.re, expect, epsilon = 1e-10);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fock_weight_basics() {
        let k = p(1.0, 0.5, 1);
        let z0 = cv(&[(0.0, 0.0)]);
        assert_abs_diff_eq!(fock_weight(&k, &z0, &z0), 1.0, epsilon = 1e-15);
        // At t = 1/2 the slope is coth(lambda).
        let z = cv(&[(0.7, -0.2)]);
        let w = cv(&[(0.1, 0.5)]);
        let im_zw = (z[0] * w[0].conj()).im;
        let r2 = z[0].norm_sqr() + w[0].norm_sqr();
        let expect = (im_zw - 1.0f64.tanh().recip() * r2 / 2.0).exp();
        assert_abs_diff_eq!(fock_weight(&k, &z, &w), expect, epsilon = 1e-15);
    }

    #[test]
    fn weights_and_kernels_are_consistent() {
        // |p_{2t}(z,w)|^2 W_t(z,w) = 4^n (4 pi)^{-3n} (lambda/sinh(2 lambda t))^{3n} w_t(z,w):
        // all three Gaussians share one quadratic form.
        let k = p(1.4, 0.5, 1);
        let z = cv(&[(0.4, -0.7)]);
        let w = cv(&[(-0.3, 0.2)]);
        let doubled = p(1.4, 1.0, 1);
        let p2t = heat_kernel(&doubled, &z, &w);
        let lhs = p2t.norm_sqr() * bergman_weight(&k, &z, &w);
        let gamma = 4.0 / (4.0 * std::f64::consts::PI).powi(3) * (1.4 / (2.0f64 * 1.4 * 0.5).sinh()).powi(3);
        let rhs = gamma * fock_weight(&k, &z, &w);
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-15 * rhs.abs().max(1.0));
    }

    #[test]
    fn kernel_factorization() {
        // bergman_kernel = fock_kernel * p_{2t}(z,w) p_{2t}(conj a, conj b) / p_{2t}(0,0).
        let k = p(0.9, 0.5, 1);
        let z = cv(&[(0.3, 0.2)]);
        let w = cv(&[(-0.1, 0.6)]);
        let a = cv(&[(0.5, -0.4)]);
        let b = cv(&[(0.2, 0.1)]);
        let doubled = p(0.9, 1.0, 1);
        let abar = cv(&[(0.5, 0.4)]);
        let bbar = cv(&[(0.2, -0.1)]);
        let zero = cv(&[(0.0, 0.0)]);
        let lhs = bergman_kernel(&k, &z, &w, &a, &b);
        let rhs = fock_kernel(&k, &z, &w, &a, &b) * heat_kernel(&doubled, &z, &w)
            * heat_kernel(&doubled, &abar, &bbar)
            / heat_kernel(&doubled, &zero, &zero);
        assert_abs_diff_eq!(lhs.re, rhs.re, epsilon = 1e-14 * lhs.norm().max(1.0));
        assert_abs_diff_eq!(lhs.im, rhs.im, epsilon = 1e-14 * lhs.norm().max(1.0));
    }

    #[test]
    fn fock_kernel_small_lambda_is_classical() {
        // lambda -> 0, t = 1/2: kernel tends to exp((z.conj(a) + w.conj(b))/2)
        // because lambda coth(lambda) -> 1 and the phase dies. The residual
        // phase is O(lambda |probe|^2), so the 1e-8 comparison needs probes
        // of modest size.
        let k = p(1e-6, 0.5, 1);
        let z = cv(&[(0.06, 0.03)]);
        let w = cv(&[(-0.02, 0.04)]);
        let a = cv(&[(0.01, -0.05)]);
        let b = cv(&[(0.07, 0.02)]);
        let got = fock_kernel(&k, &z, &w, &a, &b);
        let expect = ((z[0] * a[0].conj() + w[0] * b[0].conj()) / 2.0).exp();
        assert_abs_diff_eq!(got.re, expect.re, epsilon = 1e-8);
        assert_abs_diff_eq!(got.im, expect.im, epsilon = 1e-8);
    }

    #[test]
    fn laguerre_low_degrees() {
        // L_2^0(x) = 1 - 2x + x^2/2, L_1^1(x) = 2 - x.
        let x = 0.83;
        assert_abs_diff_eq!(laguerre(2, 0.0, x), 1.0 - 2.0 * x + x * x / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(laguerre(1, 1.0, x), 2.0 - x, epsilon = 1e-14);
        assert_abs_diff_eq!(laguerre(0, 3.0, x), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn laguerre_function_ground_level() {
        let k = p(2.0, 0.5, 1);
        let z = cv(&[(0.5, -0.3)]);
        let r2 = z[0].norm_sqr();
        assert_abs_diff_eq!(
            laguerre_special_hermite(&k, 0, &z),
            (-2.0 * r2 / 4.0).exp(),
            epsilon = 1e-15
        );
    }

    proptest! {
        #[test]
        fn fock_weight_invariant_under_i_rotation(
            zr in -1.5f64..1.5, zi in -1.5f64..1.5,
            wr in -1.5f64..1.5, wi in -1.5f64..1.5,
        ) {
            let k = p(1.0, 0.5, 1);
            let z = cv(&[(zr, zi)]);
            let w = cv(&[(wr, wi)]);
            let iz = cv(&[(-zi, zr)]);
            let iw = cv(&[(-wi, wr)]);
            let a = fock_weight(&k, &z, &w);
            let b = fock_weight(&k, &iz, &iw);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }

        #[test]
        fn heat_semigroup_scalar_composition(t1 in 0.2f64..1.0, t2 in 0.2f64..1.0) {
            // Diagonal sanity: mass of p_{t1+t2} equals sech, matching the
            // product law of the spectral coefficients at the origin in the
            // Laguerre expansion; here we only pin evenness and positivity.
            let k = p(1.0, t1 + t2, 1);
            let z0 = cv(&[(0.0, 0.0)]);
            let v = heat_kernel(&k, &z0, &z0);
            prop_assert!(v.re > 0.0 && v.im.abs() < 1e-18);
        }
    }
}
