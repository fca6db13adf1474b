//! Twisted Fock and Bergman spaces over C^{2n}: elements as entire
//! functions backed by trace evaluators, the Gauss map from operators to
//! functions and its guarded adjoint, weighted norms by tailored complex
//! quadrature, and the square-root-of-inversion dilation U.
//!
//! All integrals over C^{2n} run on a `CGrid`: a tensor product of 2n
//! two-dimensional Gauss rules, one per coordinate pair, each rotated to the
//! principal axes of the integrand's Gaussian envelope. The envelope is
//! described by a `FormHint`; transported elements carry their transported
//! hints so norms stay cheap after compositions.

use std::sync::Arc;

use crate::basis::{CMatrix, HermiteBasis};
use crate::error::{FockError, Result};
use crate::kernels::{fock_kernel, fock_weight, heat_kernel, KernelParams};
use crate::quad::{gauss_axis_scaled, par_tree_sum, QuadAxis, QuadratureGrid};
use crate::scalar::{cr, fp, fu, Scalar, C};
use crate::spectral::hermite_semigroup;
use crate::weyl::{pi_matrix, weyl_grid, weyl_transform, GridFunction, PhasePoint};

/// Gaussian envelope of |F|^2 w_t as a quadratic form in the real
/// coordinates, one 2x2 block per coupled pair. With z = x + iy and
/// w = u + iv (componentwise), the pairs are (x_j, v_j) and (u_j, y_j);
/// the same blocks apply to every axis j.
#[derive(Clone, Copy, Debug)]
pub struct FormHint<S: Scalar> {
    pub xv: [[S; 2]; 2],
    pub uy: [[S; 2]; 2],
}

impl<S: Scalar> FormHint<S> {
    /// Envelope of the standard family: F = image of a banded operator
    /// under the Gauss map at time t.
    pub fn standard(lambda: S, t: S) -> Self {
        let l = lambda.abs();
        let c2 = (fp::<S>(2.0) * l * t).tanh().recip();
        let half = l / fp(2.0);
        let d = half * (fp::<S>(2.0) * c2 - S::one());
        FormHint {
            xv: [[half, half], [half, d]],
            uy: [[half, -half], [-half, d]],
        }
    }

    /// Envelope of F(-iz, -iw) given the envelope of F: the pair blocks
    /// trade places and flip orientation.
    pub fn u_transformed(&self) -> Self {
        fn swap<S: Scalar>(b: [[S; 2]; 2]) -> [[S; 2]; 2] {
            [[b[1][1], -b[0][1]], [-b[1][0], b[0][0]]]
        }
        FormHint {
            xv: swap(self.uy),
            uy: swap(self.xv),
        }
    }
}

/// One rotated two-dimensional Gauss rule: q^2 planar points with Lebesgue
/// weights, aligned with the eigenvectors of a 2x2 envelope block.
#[derive(Clone, Debug)]
struct PairRule<S: Scalar> {
    pts: Vec<(S, S, S)>,
}

fn pair_rule<S: Scalar>(block: [[S; 2]; 2], q: usize, margin: S) -> Result<PairRule<S>> {
    let (a, b, c) = (block[0][0], block[0][1], block[1][1]);
    let avg = (a + c) / fp(2.0);
    let r = ((a - c) * (a - c) / fp(4.0) + b * b).sqrt();
    let k1 = avg + r;
    let k2 = avg - r;
    if k2 <= S::zero() {
        return Err(FockError::InvalidParameter(
            "envelope block is not positive definite".into(),
        ));
    }
    let theta = if b.abs() < fp::<S>(1e-14) * (a.abs() + c.abs()) {
        S::zero()
    } else {
        (fp::<S>(2.0) * b).atan2(a - c) / fp(2.0)
    };
    let (ct, st) = (theta.cos(), theta.sin());
    let relax = S::one() - margin;
    let ax1 = gauss_axis_scaled(relax * k1, q);
    let ax2 = gauss_axis_scaled(relax * k2, q);
    let mut pts = Vec::with_capacity(q * q);
    for (s1, w1) in ax1.nodes.iter().zip(ax1.weights.iter()) {
        for (s2, w2) in ax2.nodes.iter().zip(ax2.weights.iter()) {
            // Rotation back to physical coordinates has unit Jacobian.
            let p = ct * *s1 - st * *s2;
            let qq = st * *s1 + ct * *s2;
            pts.push((p, qq, *w1 * *w2));
        }
    }
    Ok(PairRule { pts })
}

/// Quadrature over C^{2n} with points assembled into complex pairs
/// (z, w) in C^n x C^n. Flat enumeration is row-major over the 2n pair
/// rules: axis j contributes its (x_j, v_j) rule then its (u_j, y_j) rule.
#[derive(Clone, Debug)]
pub struct CGrid<S: Scalar> {
    n: usize,
    xv: PairRule<S>,
    uy: PairRule<S>,
}

/// Hard cap on the total point count so misconfigured calls fail fast
/// instead of allocating for hours.
const CGRID_MAX_POINTS: usize = 50_000_000;

impl<S: Scalar> CGrid<S> {
    pub fn build(n: usize, hint: &FormHint<S>, q: usize, margin: S) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(FockError::InvalidParameter(
                "complex grid needs n >= 1 and q >= 1".into(),
            ));
        }
        let total = (q as u128).pow(4 * n as u32);
        if total > CGRID_MAX_POINTS as u128 {
            return Err(FockError::Unsupported(format!(
                "complex grid would need {total} points; lower q or n"
            )));
        }
        Ok(CGrid {
            n,
            xv: pair_rule(hint.xv, q, margin)?,
            uy: pair_rule(hint.uy, q, margin)?,
        })
    }

    pub fn len(&self) -> usize {
        self.xv.pts.len().pow(self.n as u32) * self.uy.pts.len().pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point at flat index: returns (z, w, weight).
    pub fn point(&self, i: usize) -> (Vec<C<S>>, Vec<C<S>>, S) {
        let qx = self.xv.pts.len();
        let qu = self.uy.pts.len();
        let mut idx = i;
        let mut z = vec![C::new(S::zero(), S::zero()); self.n];
        let mut w = vec![C::new(S::zero(), S::zero()); self.n];
        let mut wt = S::one();
        // Last axis fastest; per axis the uy rule is the faster sub-index.
        for j in (0..self.n).rev() {
            let iu = idx % qu;
            idx /= qu;
            let ix = idx % qx;
            idx /= qx;
            let (x, v, wxv) = self.xv.pts[ix];
            let (u, y, wuy) = self.uy.pts[iu];
            z[j] = C::new(x, y);
            w[j] = C::new(u, v);
            wt = wt * wxv * wuy;
        }
        (z, w, wt)
    }

    /// Deterministic chunked quadrature of f(z, w) against Lebesgue measure.
    pub fn integrate<F>(&self, f: F) -> C<S>
    where
        F: Fn(&[C<S>], &[C<S>]) -> C<S> + Sync,
    {
        par_tree_sum(self.len(), |i| {
            let (z, w, wt) = self.point(i);
            f(&z, &w) * cr(wt)
        })
    }
}

type FockEval<S> = Arc<dyn Fn(&[C<S>], &[C<S>]) -> C<S> + Send + Sync>;

/// An element of the twisted Fock space at time t: an entire function on
/// C^{2n} with an exact evaluator, the operator it came from when known,
/// and the envelope hint its integrals should use.
#[derive(Clone)]
pub struct FockElement<S: Scalar> {
    pub basis: HermiteBasis<S>,
    pub t: S,
    pub m: Option<CMatrix<S>>,
    eval: FockEval<S>,
    pub form_hint: FormHint<S>,
}

impl<S: Scalar> FockElement<S> {
    pub fn from_parts(
        basis: HermiteBasis<S>,
        t: S,
        m: Option<CMatrix<S>>,
        eval: FockEval<S>,
        form_hint: FormHint<S>,
    ) -> Self {
        Self {
            basis,
            t,
            m,
            eval,
            form_hint,
        }
    }

    pub fn eval(&self, z: &[C<S>], w: &[C<S>]) -> C<S> {
        (self.eval)(z, w)
    }

    pub fn evaluator(&self) -> FockEval<S> {
        self.eval.clone()
    }

    pub fn operator_side(&self) -> Result<&CMatrix<S>> {
        self.m.as_ref().ok_or_else(|| {
            FockError::MissingOperator(
                "element carries no operator; it was built through a function-level path".into(),
            )
        })
    }

    pub fn params(&self) -> KernelParams<S> {
        KernelParams::new(self.basis.lambda, self.t, self.basis.n)
            .expect("element parameters were validated at construction")
    }

    /// The same entire function viewed on another truncation of the same
    /// oscillator family. The operator side is dropped: it belongs to the
    /// original cutoff.
    pub fn with_basis(&self, basis: &HermiteBasis<S>) -> Result<Self> {
        if basis.n != self.basis.n || basis.lambda != self.basis.lambda {
            return Err(FockError::DimensionMismatch(
                "rebasing must preserve the dimension and the scale".into(),
            ));
        }
        Ok(Self {
            basis: basis.clone(),
            t: self.t,
            m: None,
            eval: self.eval.clone(),
            form_hint: self.form_hint.clone(),
        })
    }

    /// Restriction to real phase space as a grid function, sampled on the
    /// natural grid of the carrying basis.
    pub fn restrict_real(&self, q: usize) -> GridFunction<S> {
        let n = self.basis.n;
        let eval = self.eval.clone();
        let grid = weyl_grid(n, self.basis.k_max, self.basis.lambda, q);
        GridFunction::from_fn(grid, move |xu| {
            let z: Vec<C<S>> = xu[..n].iter().map(|&s| C::new(s, S::zero())).collect();
            let w: Vec<C<S>> = xu[n..].iter().map(|&s| C::new(s, S::zero())).collect();
            eval(&z, &w)
        })
    }
}

/// (2 pi)^{-n} |lambda|^n, the constant normalizing every inversion-style
/// trace evaluation here.
pub fn trace_constant<S: Scalar>(n: usize, lambda: S) -> S {
    (lambda.abs() / (fp::<S>(2.0) * fp::<S>(std::f64::consts::PI))).powi(n as i32)
}

fn validate_t<S: Scalar>(t: S) -> Result<()> {
    if t <= S::zero() || !t.is_finite() {
        return Err(FockError::InvalidParameter(
            "time parameter t must be positive".into(),
        ));
    }
    Ok(())
}

/// Gauss map: carries a dense operator M on the truncated oscillator basis
/// to the entire function
///   (z,w) -> p_{2t}(z,w)^{-1} c tr(Pi(-z,-w) e^{-tH} M e^{-tH}),
/// an element of the twisted Fock space at time t.
pub fn gauss_bargmann<S: Scalar>(
    basis: &HermiteBasis<S>,
    t: S,
    m: &CMatrix<S>,
) -> Result<FockElement<S>> {
    validate_t(t)?;
    let d = basis.dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(FockError::DimensionMismatch(format!(
            "operator is {}x{}, basis dimension is {d}",
            m.nrows(),
            m.ncols()
        )));
    }
    let half = hermite_semigroup(basis, t);
    let damped = half.dot(m).dot(&half);
    let c = trace_constant(basis.n, basis.lambda);
    let params = KernelParams::new(basis.lambda, fp::<S>(2.0) * t, basis.n)?;
    let b = basis.clone();
    let eval: FockEval<S> = Arc::new(move |z: &[C<S>], w: &[C<S>]| {
        let p = PhasePoint::new(z.iter().map(|c| -*c).collect(), w.iter().map(|c| -*c).collect());
        let pi = pi_matrix(&b, &p).expect("phase point dimension matches basis");
        let mut tr = C::new(S::zero(), S::zero());
        for r in 0..pi.nrows() {
            for s in 0..pi.ncols() {
                tr += pi[(r, s)] * damped[(s, r)];
            }
        }
        tr * cr(c) / heat_kernel(&params, z, w)
    });
    Ok(FockElement::from_parts(
        basis.clone(),
        t,
        Some(m.clone()),
        eval,
        FormHint::standard(basis.lambda, t),
    ))
}

/// An element of the twisted Bergman space at time t: entire on C^{2n},
/// square-integrable against the Bergman weight under plain Lebesgue
/// measure.
#[derive(Clone)]
pub struct BergmanElement<S: Scalar> {
    pub basis: HermiteBasis<S>,
    pub t: S,
    eval: FockEval<S>,
    pub form_hint: FormHint<S>,
}

impl<S: Scalar> BergmanElement<S> {
    pub fn eval(&self, z: &[C<S>], w: &[C<S>]) -> C<S> {
        (self.eval)(z, w)
    }

    pub fn evaluator(&self) -> FockEval<S> {
        self.eval.clone()
    }
}

/// Heat-kernel transform into the Bergman space: f on R^{2n} goes to the
/// entire extension of the twisted convolution f * p_t, evaluated as
/// c tr(Pi(-z,-w) T e^{-tH}) with T the integrated representation of f.
pub fn segal_bargmann<S: Scalar>(
    basis: &HermiteBasis<S>,
    t: S,
    f: &GridFunction<S>,
) -> Result<BergmanElement<S>> {
    validate_t(t)?;
    let transform = weyl_transform(basis, f)?;
    let damped = transform.dot(&hermite_semigroup(basis, t));
    let c = trace_constant(basis.n, basis.lambda);
    let b = basis.clone();
    let eval: FockEval<S> = Arc::new(move |z: &[C<S>], w: &[C<S>]| {
        let p = PhasePoint::new(z.iter().map(|c| -*c).collect(), w.iter().map(|c| -*c).collect());
        let pi = pi_matrix(&b, &p).expect("phase point dimension matches basis");
        let mut tr = C::new(S::zero(), S::zero());
        for r in 0..pi.nrows() {
            for s in 0..pi.ncols() {
                tr += pi[(r, s)] * damped[(s, r)];
            }
        }
        tr * cr(c)
    });
    Ok(BergmanElement {
        basis: basis.clone(),
        t,
        eval,
        form_hint: FormHint::standard(basis.lambda, t),
    })
}

/// Squared Bergman norm: int |F|^2 W_t over C^{2n}, plain Lebesgue measure.
pub fn bergman_norm_sq<S: Scalar>(el: &BergmanElement<S>, q: usize) -> Result<S> {
    let params = KernelParams::new(el.basis.lambda, el.t, el.basis.n)?;
    let grid = CGrid::build(el.basis.n, &el.form_hint, q, fp(0.15))?;
    let v = grid.integrate(|z, w| {
        let f = el.eval(z, w);
        cr(f.norm_sqr() * crate::kernels::bergman_weight(&params, z, w))
    });
    Ok(v.re)
}

/// Normalized volume element of the Fock norm at time t:
/// (lambda^2 / (8 pi^2 sinh^3(2|lambda|t)))^n per complex pair.
pub fn fock_volume_constant<S: Scalar>(n: usize, lambda: S, t: S) -> S {
    let l = lambda.abs();
    let sh = (fp::<S>(2.0) * l * t).sinh();
    let pi2 = fp::<S>(std::f64::consts::PI) * fp::<S>(std::f64::consts::PI);
    (l * l / (fp::<S>(8.0) * pi2 * sh * sh * sh)).powi(n as i32)
}

/// Reproducing measure constant: (|lambda| / (2 pi sinh(2|lambda|t)))^{2n}.
pub fn reproducing_constant<S: Scalar>(n: usize, lambda: S, t: S) -> S {
    let l = lambda.abs();
    let sh = (fp::<S>(2.0) * l * t).sinh();
    (l / (fp::<S>(2.0) * fp::<S>(std::f64::consts::PI) * sh)).powi(2 * n as i32)
}

/// Squared Fock norm against the normalized volume element.
pub fn fock_norm_sq<S: Scalar>(el: &FockElement<S>, q: usize) -> Result<S> {
    let params = el.params();
    let grid = CGrid::build(el.basis.n, &el.form_hint, q, fp(0.15))?;
    let v = grid.integrate(|z, w| {
        let f = el.eval(z, w);
        cr(f.norm_sqr() * fock_weight(&params, z, w))
    });
    Ok(v.re * fock_volume_constant(el.basis.n, el.basis.lambda, el.t))
}

/// Fock inner product <f, g>, conjugate-linear in g, on f's envelope grid.
pub fn fock_inner<S: Scalar>(f: &FockElement<S>, g: &FockElement<S>, q: usize) -> Result<C<S>> {
    f.basis.check_same(&g.basis)?;
    if f.t != g.t {
        return Err(FockError::InvalidParameter(
            "inner product requires elements at the same time".into(),
        ));
    }
    let params = f.params();
    let grid = CGrid::build(f.basis.n, &f.form_hint, q, fp(0.15))?;
    let v = grid.integrate(|z, w| {
        f.eval(z, w) * g.eval(z, w).conj() * cr(fock_weight(&params, z, w))
    });
    Ok(v * cr(fock_volume_constant(f.basis.n, f.basis.lambda, f.t)))
}

/// Evaluates the reproducing integral of the space at (z, w):
/// m_t int F(a,b) K((z,w),(a,b)) w_t(a,b) da db, which returns F(z,w) for
/// elements of the space.
pub fn reproduce_at<S: Scalar>(
    el: &FockElement<S>,
    z: &[C<S>],
    w: &[C<S>],
    q: usize,
) -> Result<C<S>> {
    let params = el.params();
    let grid = CGrid::build(el.basis.n, &el.form_hint, q, fp(0.15))?;
    let v = grid.integrate(|a, b| {
        el.eval(a, b) * fock_kernel(&params, z, w, a, b) * cr(fock_weight(&params, a, b))
    });
    Ok(v * cr(reproducing_constant(el.basis.n, el.basis.lambda, el.t)))
}

/// Adjoint of the Gauss map at t = 1/2: recovers the operator block
/// e^{H/2} T e^{H/2} with T the integrated representation of the element's
/// real restriction times p_1. Exponential amplification makes high layers
/// hopeless, so the requested block is guarded: the call fails unless the
/// boosted quadrature discrepancy stays below 1e-3 relative to the size of
/// the recovered block.
///
/// The transform grid is matched to the integrand's own Gaussian rate,
/// read off the envelope hint. For elements in the image of the Gauss map
/// the central phases of the trace and of the transform kernel cancel and
/// the integrand is exactly polynomial times that Gaussian, so the rule is
/// exact up to roundoff; a generic rate would leave a systematic rule error
/// that the amplification turns into garbage long before the guard's
/// fine-versus-coarse comparison could see it.
pub fn gauss_bargmann_adjoint<S: Scalar>(
    el: &FockElement<S>,
    k_inner: usize,
    q: usize,
) -> Result<CMatrix<S>> {
    let half = fp::<S>(0.5);
    if (el.t - half).abs() > fp::<S>(1e-12) {
        return Err(FockError::Unsupported(
            "adjoint recovery is only available at t = 1/2".into(),
        ));
    }
    if k_inner > el.basis.k_max {
        return Err(FockError::InvalidParameter(format!(
            "inner degree {k_inner} exceeds the basis cutoff {}",
            el.basis.k_max
        )));
    }
    if q <= 8 {
        return Err(FockError::InvalidParameter(
            "adjoint quadrature needs q > 8 to estimate its own error".into(),
        ));
    }
    let basis = &el.basis;
    let n = basis.n;
    let params = KernelParams::new(basis.lambda, S::one(), n)?;
    let eval = el.eval.clone();
    let sample = move |xu: &[S]| -> C<S> {
        let z: Vec<C<S>> = xu[..n].iter().map(|&s| C::new(s, S::zero())).collect();
        let w: Vec<C<S>> = xu[n..].iter().map(|&s| C::new(s, S::zero())).collect();
        eval(&z, &w) * crate::kernels::heat_kernel_real(&params, xu)
    };

    // Per-axis rate of the restricted integrand. The hint stores the
    // envelope of |F|^2 w_t; unwinding w_t and folding in p_1 and the
    // transform kernel telescopes to hint/2 + |lambda|/4 on each axis.
    let labs = basis.lambda.abs();
    let quarter = labs / fp::<S>(4.0);
    let cx = el.form_hint.xv[0][0] / fp(2.0) + quarter;
    let cu = el.form_hint.uy[0][0] / fp(2.0) + quarter;
    let transform_at = |qq: usize| -> Result<CMatrix<S>> {
        let grid = if cx > S::zero() && cu > S::zero() {
            let mut axes = vec![gauss_axis_scaled(cx, qq); n];
            axes.extend(std::iter::repeat(gauss_axis_scaled(cu, qq)).take(n));
            QuadratureGrid { axes }
        } else {
            weyl_grid(n, basis.k_max, basis.lambda, qq)
        };
        let f = GridFunction::from_fn(grid, sample.clone());
        weyl_transform(basis, &f)
    };
    let fine = transform_at(q)?;
    let coarse = transform_at(q - 8)?;

    let block: Vec<usize> = (0..basis.dim())
        .filter(|&r| basis.indices()[r].degree() <= k_inner)
        .collect();
    // Compare the rules after amplification: what corrupts the recovery is
    // the boosted discrepancy, measured against the recovered block itself.
    let mut noise = S::zero();
    let mut scale = S::one();
    for &r in &block {
        let er = basis.energy(r);
        for &s in &block {
            let boost = ((er + basis.energy(s)) / fp(2.0)).exp();
            noise = noise.max((fine[(r, s)] - coarse[(r, s)]).norm() * boost);
            scale = scale.max(fine[(r, s)].norm() * boost);
        }
    }
    let amplified = noise / scale;
    let limit = fp::<S>(1e-3);
    if amplified > limit {
        return Err(FockError::AdjointGuard {
            k_inner,
            amplified: amplified.to_f64().unwrap_or(f64::INFINITY),
            limit: 1e-3,
        });
    }

    let mut out = basis.zeros();
    for &r in &block {
        let er = basis.energy(r);
        for &s in &block {
            let es = basis.energy(s);
            let boost = ((er + es) / fp(2.0)).exp();
            out[(r, s)] = fine[(r, s)] * cr(boost);
        }
    }
    Ok(out)
}

/// The dilation (U F)(z, w) = F(-iz, -iw), unitary on the Fock space and of
/// order four. The operator side is dropped; the envelope hint is
/// transported.
pub fn apply_u<S: Scalar>(el: &FockElement<S>) -> FockElement<S> {
    let inner = el.eval.clone();
    let eval: FockEval<S> = Arc::new(move |z: &[C<S>], w: &[C<S>]| {
        let zi: Vec<C<S>> = z.iter().map(|c| C::new(c.im, -c.re)).collect();
        let wi: Vec<C<S>> = w.iter().map(|c| C::new(c.im, -c.re)).collect();
        inner(&zi, &wi)
    });
    FockElement::from_parts(
        el.basis.clone(),
        el.t,
        None,
        eval,
        el.form_hint.u_transformed(),
    )
}

/// Inverse dilation (U* F)(z, w) = F(iz, iw), the adjoint of apply_u.
pub fn apply_u_inv<S: Scalar>(el: &FockElement<S>) -> FockElement<S> {
    let inner = el.eval.clone();
    let eval: FockEval<S> = Arc::new(move |z: &[C<S>], w: &[C<S>]| {
        let zi: Vec<C<S>> = z.iter().map(|c| C::new(-c.im, c.re)).collect();
        let wi: Vec<C<S>> = w.iter().map(|c| C::new(-c.im, c.re)).collect();
        inner(&zi, &wi)
    });
    FockElement::from_parts(
        el.basis.clone(),
        el.t,
        None,
        eval,
        el.form_hint.u_transformed(),
    )
}

/// Function-level dilation on phase space:
/// (U_lambda f)(x, u) = c^n fhat(c (x, u)) with c = (lambda/2) coth(t lambda)
/// and fhat the (2 pi)^{-n}-normalized Fourier transform over R^{2n}.
pub fn u_lambda<S: Scalar>(lambda: S, t: S, f: &GridFunction<S>) -> Result<GridFunction<S>> {
    validate_t(t)?;
    let m = f.grid.dim();
    if m % 2 != 0 {
        return Err(FockError::DimensionMismatch(
            "phase-space grid must have even dimension".into(),
        ));
    }
    let n = m / 2;
    let c = lambda * (t * lambda).tanh().recip() / fp(2.0);
    let fc = f.clone();
    let norm = c.powi(n as i32) * (fp::<S>(2.0) * fp::<S>(std::f64::consts::PI)).powi(-(n as i32));
    let eval = move |xu: &[S]| -> C<S> {
        let s = par_tree_sum(fc.grid.len(), |i| {
            let (y, w) = fc.grid.point(i);
            let mut dot = S::zero();
            for k in 0..m {
                dot += y[k] * c * xu[k];
            }
            fc.values[i] * C::new(S::zero(), -dot).exp() * cr(w)
        });
        s * cr(norm)
    };
    let degraded = f.degraded;
    let grid = (*f.grid).clone();
    let mut out = GridFunction::from_fn(grid, eval);
    out.degraded = degraded;
    Ok(out)
}

/// Convenience axis for real sections of Fock elements.
pub fn real_section_axis<S: Scalar>(half_width: S, q: usize) -> QuadAxis<S> {
    let axis = gauss_axis_scaled(S::one(), q);
    let scale = half_width / axis.nodes.last().copied().unwrap_or(S::one()).abs();
    QuadAxis {
        nodes: axis.nodes.iter().map(|&x| x * scale).collect(),
        weights: axis.weights.iter().map(|&w| w * scale).collect(),
    }
}

/// Uniform grid helper for plotting-style probes (not quadrature).
pub fn probe_points<S: Scalar>(half_width: S, per_axis: usize) -> Vec<Vec<S>> {
    let mut pts = Vec::new();
    let k = per_axis.max(2);
    for i in 0..k {
        for j in 0..k {
            let s = fp::<S>(2.0) * half_width / fu::<S>(k - 1);
            pts.push(vec![
                -half_width + s * fu::<S>(i),
                -half_width + s * fu::<S>(j),
            ]);
        }
    }
    pts
}

/// Grid at the natural scale of a basis, re-exported where Fock-side code
/// needs matching real quadrature.
pub fn natural_grid<S: Scalar>(basis: &HermiteBasis<S>, q: usize) -> QuadratureGrid<S> {
    weyl_grid(basis.n, basis.k_max, basis.lambda, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::heat_kernel_real;
    use crate::linalg::hs_norm;
    use crate::spectral::spectral_projection;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C64 = C<f64>;

    fn basis(k: usize, lambda: f64) -> HermiteBasis<f64> {
        HermiteBasis::new(1, k, lambda).unwrap()
    }

    fn cpt(re: f64, im: f64) -> Vec<C64> {
        vec![C64::new(re, im)]
    }

    #[test]
    fn cgrid_integrates_its_own_envelope() {
        // A pure Gaussian exp(-Q) with the hint's own form integrates to
        // pi^2 / sqrt(det_xv det_uy), here with the standard t = 1/2 blocks.
        let hint = FormHint::standard(1.0, 0.5);
        let grid = CGrid::build(1, &hint, 20, 0.15).unwrap();
        let q = move |z: &[C64], w: &[C64]| {
            let (x, y) = (z[0].re, z[0].im);
            let (u, v) = (w[0].re, w[0].im);
            let hxv = hint.xv;
            let huy = hint.uy;
            let qf = hxv[0][0] * x * x + 2.0 * hxv[0][1] * x * v + hxv[1][1] * v * v
                + huy[0][0] * u * u + 2.0 * huy[0][1] * u * y + huy[1][1] * y * y;
            C64::new((-qf).exp(), 0.0)
        };
        let got = grid.integrate(q).re;
        let det = |b: [[f64; 2]; 2]| b[0][0] * b[1][1] - b[0][1] * b[1][0];
        let expect = std::f64::consts::PI.powi(2) / (det(hint.xv) * det(hint.uy)).sqrt();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-10 * expect);
    }

    #[test]
    fn cgrid_rejects_oversized_requests() {
        let hint = FormHint::standard(1.0, 0.5);
        assert!(matches!(
            CGrid::build(2, &hint, 24, 0.15),
            Err(FockError::Unsupported(_))
        ));
    }

    #[test]
    fn gauss_map_of_identity_is_constant_one() {
        let b = basis(20, 1.0);
        let one = gauss_bargmann(&b, 0.5, &b.eye()).unwrap();
        for (z, w) in [
            (cpt(0.0, 0.0), cpt(0.0, 0.0)),
            (cpt(0.4, -0.3), cpt(0.2, 0.6)),
            (cpt(-0.9, 0.1), cpt(0.8, -0.5)),
        ] {
            let v = one.eval(&z, &w);
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn gauss_map_of_ground_projection_closed_form() {
        // G(P_0) = (1 - e^{-4 t lambda})^n exp((lambda/4)(coth(2 t lambda) - 1)(z^2 + w^2)).
        let (lambda, t) = (1.0, 0.5);
        let b = basis(20, lambda);
        let p0 = spectral_projection(&b, 0).unwrap();
        let phi = gauss_bargmann(&b, t, &p0).unwrap();
        let c2 = (2.0f64 * lambda * t).tanh().recip();
        for (z, w) in [
            (cpt(0.3, -0.2), cpt(0.5, 0.1)),
            (cpt(-0.7, 0.4), cpt(0.0, -0.6)),
        ] {
            let zz = z[0] * z[0] + w[0] * w[0];
            let expect = (1.0 - (-4.0f64 * t * lambda).exp())
                * (zz * C64::new(lambda / 4.0 * (c2 - 1.0), 0.0)).exp();
            let got = phi.eval(&z, &w);
            assert_abs_diff_eq!(got.re, expect.re, epsilon = 1e-10);
            assert_abs_diff_eq!(got.im, expect.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn gauss_map_of_projection_is_radial() {
        let b = basis(16, 1.0);
        let p0 = spectral_projection(&b, 0).unwrap();
        let phi = gauss_bargmann(&b, 0.5, &p0).unwrap();
        let (z, w) = (cpt(0.5, 0.2), cpt(-0.3, 0.4));
        let mut vals = Vec::new();
        for j in 0..16 {
            let th = 2.0 * std::f64::consts::PI * (j as f64) / 16.0;
            let (c, s) = (th.cos(), th.sin());
            let zr = vec![z[0] * c + w[0] * s];
            let wr = vec![-(z[0] * s) + w[0] * c];
            vals.push(phi.eval(&zr, &wr));
        }
        let mean = vals.iter().sum::<C64>() / 16.0;
        let var: f64 = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / 16.0;
        assert!(var < 1e-16, "variance {var}");
    }

    #[test]
    fn fock_norm_matches_damped_hs_norm() {
        // |G(T)|_F^2 = |e^{-tH} T|_HS^2, the isometry the volume constant
        // was fixed by. Identity and a rank-one check at two times.
        for t in [0.25, 0.5] {
            let b = basis(16, 1.0);
            let one = gauss_bargmann(&b, t, &b.eye()).unwrap();
            let got = fock_norm_sq(&one, 32).unwrap();
            // The element comes from the truncated identity, so its exact
            // norm is the truncated spectral sum.
            let expect: f64 = (0..=16).map(|k| (-2.0 * t * (2.0 * k as f64 + 1.0)).exp()).sum();
            assert_abs_diff_eq!(got, expect, epsilon = 1e-8 * expect);
        }
    }

    #[test]
    fn fock_norm_isometry_on_random_operators() {
        let b = basis(12, 1.0);
        let t = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = b.dim();
        for _ in 0..5 {
            let mut m = b.zeros();
            for r in 0..d {
                for s in 0..d {
                    m[(r, s)] = C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
                }
            }
            let phi = gauss_bargmann(&b, t, &m).unwrap();
            let got = fock_norm_sq(&phi, 32).unwrap();
            let half = hermite_semigroup(&b, t);
            let expect = hs_norm(&half.dot(&m)).powi(2);
            assert_abs_diff_eq!(got, expect, epsilon = 2e-6 * expect.max(1.0));
        }
    }

    #[test]
    fn fock_inner_is_conjugate_linear_in_second_slot() {
        let b = basis(10, 1.0);
        let p0 = spectral_projection(&b, 0).unwrap();
        let p1 = spectral_projection(&b, 1).unwrap();
        let f = gauss_bargmann(&b, 0.5, &p0).unwrap();
        let g = gauss_bargmann(&b, 0.5, &p1).unwrap();
        let fg = fock_inner(&f, &g, 28).unwrap();
        let gf = fock_inner(&g, &f, 28).unwrap();
        assert_abs_diff_eq!(fg.re, gf.re, epsilon = 1e-9);
        assert_abs_diff_eq!(fg.im, -gf.im, epsilon = 1e-9);
        // Distinct spectral layers are orthogonal in the Fock space.
        assert!(fg.norm() < 1e-9, "cross inner product {fg}");
    }

    #[test]
    fn reproducing_integral_returns_the_element() {
        let b = basis(14, 1.0);
        let mut m = b.zeros();
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(2, 1)] = C64::new(0.7, -0.4);
        m[(1, 3)] = C64::new(-0.2, 0.5);
        let phi = gauss_bargmann(&b, 0.5, &m).unwrap();
        for (z, w) in [
            (cpt(0.0, 0.0), cpt(0.0, 0.0)),
            (cpt(0.4, 0.1), cpt(-0.2, 0.3)),
            (cpt(-0.5, -0.3), cpt(0.6, 0.0)),
        ] {
            let direct = phi.eval(&z, &w);
            let reproduced = reproduce_at(&phi, &z, &w, 32).unwrap();
            assert!(
                (direct - reproduced).norm() < 1e-6 * direct.norm().max(1.0),
                "{direct} vs {reproduced}"
            );
        }
    }

    #[test]
    fn segal_bargmann_is_unitary_onto_bergman() {
        // |B f|_W^2 = |f|_2^2 with plain Lebesgue measure on both sides.
        let lambda = 1.0;
        let b = basis(16, lambda);
        let grid = natural_grid(&b, 48);
        let f = GridFunction::from_fn(grid, |xu| {
            C64::new(
                (-0.7 * (xu[0] * xu[0] + xu[1] * xu[1])).exp() * (1.0 + 0.4 * xu[0]),
                0.1 * xu[1] * (-0.6 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(),
            )
        });
        let bf = segal_bargmann(&b, 0.5, &f).unwrap();
        let lhs = bergman_norm_sq(&bf, 32).unwrap();
        let rhs = f.l2_norm().powi(2);
        assert_abs_diff_eq!(lhs, rhs, epsilon = 2e-5 * rhs);
    }

    #[test]
    fn segal_bargmann_restricts_to_twisted_convolution() {
        let lambda = 1.0;
        let b = basis(18, lambda);
        let grid = natural_grid(&b, 64);
        let params = KernelParams::new(lambda, 0.5, 1).unwrap();
        let f = GridFunction::from_fn(grid.clone(), |xu| {
            C64::new((-0.8 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.0)
        });
        let pt = GridFunction::from_fn(grid, move |xu| heat_kernel_real(&params, xu));
        let conv = crate::weyl::twisted_convolution(lambda, &f, &pt).unwrap();
        let bf = segal_bargmann(&b, 0.5, &f).unwrap();
        for probe in [[0.0, 0.0], [0.5, -0.2], [-0.7, 0.4]] {
            let via_trace = bf.eval(&cpt(probe[0], 0.0), &cpt(probe[1], 0.0));
            let via_conv = conv.eval_at(&probe);
            assert!(
                (via_trace - via_conv).norm() < 1e-7,
                "{via_trace} vs {via_conv}"
            );
        }
    }

    #[test]
    fn adjoint_round_trip_recovers_the_operator() {
        let b = basis(10, 1.0);
        let mut m = b.zeros();
        m[(0, 0)] = C64::new(0.9, 0.0);
        m[(1, 2)] = C64::new(0.3, 0.2);
        m[(4, 4)] = C64::new(-0.5, 0.0);
        m[(3, 0)] = C64::new(0.0, 0.7);
        let phi = gauss_bargmann(&b, 0.5, &m).unwrap();
        let rec = gauss_bargmann_adjoint(&phi, 4, 64).unwrap();
        for r in 0..b.dim() {
            for s in 0..b.dim() {
                let expect = if b.indices()[r].degree() <= 4 && b.indices()[s].degree() <= 4 {
                    m[(r, s)]
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!(
                    (rec[(r, s)] - expect).norm() < 1e-8,
                    "entry ({r},{s}): {} vs {expect}",
                    rec[(r, s)]
                );
            }
        }
    }

    #[test]
    fn adjoint_guard_rejects_hopeless_layers() {
        let b = basis(30, 1.0);
        let phi = gauss_bargmann(&b, 0.5, &b.eye()).unwrap();
        let err = gauss_bargmann_adjoint(&phi, 28, 40).unwrap_err();
        assert!(matches!(err, FockError::AdjointGuard { .. }), "got {err}");
    }

    #[test]
    fn adjoint_needs_half_time() {
        let b = basis(8, 1.0);
        let phi = gauss_bargmann(&b, 0.25, &b.eye()).unwrap();
        assert!(matches!(
            gauss_bargmann_adjoint(&phi, 2, 32),
            Err(FockError::Unsupported(_))
        ));
    }

    #[test]
    fn dilation_has_order_four_and_preserves_norms() {
        let b = basis(12, 1.0);
        let mut m = b.zeros();
        m[(0, 1)] = C64::new(0.8, 0.1);
        m[(2, 0)] = C64::new(-0.3, 0.4);
        m[(1, 1)] = C64::new(0.5, 0.0);
        let phi = gauss_bargmann(&b, 0.5, &m).unwrap();
        let u4 = apply_u(&apply_u(&apply_u(&apply_u(&phi))));
        let (z, w) = (cpt(0.4, -0.1), cpt(0.2, 0.3));
        assert!((u4.eval(&z, &w) - phi.eval(&z, &w)).norm() < 1e-12);

        let n0 = fock_norm_sq(&phi, 32).unwrap();
        let n1 = fock_norm_sq(&apply_u(&phi), 32).unwrap();
        assert_abs_diff_eq!(n0, n1, epsilon = 2e-6 * n0);
    }

    #[test]
    fn function_dilation_fixes_the_heat_kernel() {
        let (lambda, t) = (1.0, 0.5);
        let params = KernelParams::new(lambda, t, 1).unwrap();
        let grid = weyl_grid(1, 16, lambda, 64);
        let f = GridFunction::from_fn(grid, move |xu| heat_kernel_real(&params, xu));
        let uf = u_lambda(lambda, t, &f).unwrap();
        for probe in [[0.0, 0.0], [0.6, -0.3], [-1.1, 0.8]] {
            let got = uf.eval_at(&probe);
            let expect = heat_kernel_real(&params, &probe);
            assert!((got - expect).norm() < 1e-8, "{got} vs {expect}");
        }
    }

    #[test]
    fn function_dilation_is_an_involution_up_to_reflection() {
        // U_lambda is the Fourier transform at a fixed scale; applying it
        // twice returns the reflection f(-x, -u) times a constant 1 at the
        // self-dual scale c = 1 (lambda = 1, t such that coth(t) = 2).
        let lambda = 1.0;
        let t = 0.5f64.atanh();
        let grid = weyl_grid(1, 12, 1.0f64, 48);
        let f = GridFunction::from_fn(grid, |xu| {
            C64::new((1.0 + 0.3 * xu[0]) * (-(xu[0] * xu[0] + xu[1] * xu[1]) / 2.0).exp(), 0.0)
        });
        let uuf = u_lambda(lambda, t, &u_lambda(lambda, t, &f).unwrap()).unwrap();
        for probe in [[0.4, 0.2], [-0.5, 0.7]] {
            let got = uuf.eval_at(&probe);
            let expect = f.eval_at(&[-probe[0], -probe[1]]);
            assert!((got - expect).norm() < 1e-8, "{got} vs {expect}");
        }
    }

    #[test]
    fn intertwining_with_the_heat_semigroup() {
        // (U_lambda f * p_t)(x, u) = e^{-(lambda/2) coth(2 t lambda)(x^2+u^2)}
        //   (f * p_t)(-ix, -iu), the right side through the entire extension.
        let (lambda, t) = (1.0, 0.5);
        let b = basis(20, lambda);
        let grid = natural_grid(&b, 64);
        // Non-even probe function pins the sign convention.
        let f = GridFunction::from_fn(grid, |xu| {
            C64::new(
                ((xu[0] - 0.3) * (xu[0] - 0.3) + xu[1] * xu[1]).exp() * 0.0
                    + (-0.75 * ((xu[0] - 0.3) * (xu[0] - 0.3) + (xu[1] + 0.1) * (xu[1] + 0.1))).exp(),
                0.0,
            )
        });
        let uf = u_lambda(lambda, t, &f).unwrap();
        let buf = segal_bargmann(&b, t, &uf).unwrap();
        let bf = segal_bargmann(&b, t, &f).unwrap();
        let c2 = (2.0f64 * lambda * t).tanh().recip();
        for probe in [[0.0, 0.0], [0.5, -0.4], [-0.3, 0.6], [0.9, 0.2]] {
            let lhs = buf.eval(&cpt(probe[0], 0.0), &cpt(probe[1], 0.0));
            let damp = (-lambda / 2.0 * c2 * (probe[0] * probe[0] + probe[1] * probe[1])).exp();
            let rhs = bf.eval(&cpt(0.0, -probe[0]), &cpt(0.0, -probe[1])) * damp;
            assert!((lhs - rhs).norm() < 1e-7, "probe {probe:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn missing_operator_side_is_an_error() {
        let b = basis(8, 1.0);
        let phi = gauss_bargmann(&b, 0.5, &b.eye()).unwrap();
        let u = apply_u(&phi);
        assert!(phi.operator_side().is_ok());
        assert!(matches!(u.operator_side(), Err(FockError::MissingOperator(_))));
    }

}
