//! The projective phase-space representation, its integrated transform, and
//! the twisted operations it intertwines: twisted convolution, twisted
//! translation, and the symplectic Fourier transform.
//!
//! Phase-space points carry complex coordinates throughout; real points are
//! the common case and the constructors make them cheap. A point (a, b)
//! acts on the oscillator side through the generator
//!
//!   L = sum_j nu_j A_j + mu_j A_j^dag,
//!   nu_j = i lambda a_j / (2|lambda|) + b_j / 2,
//!   mu_j = i lambda a_j / (2|lambda|) - b_j / 2,
//!
//! and the unitary (for real points) is exp(L). `pi_matrix` evaluates the
//! same operator through its normal-ordered factorization, which gives the
//! truncation of the exact infinite matrix rather than the exponential of
//! the truncated generator; the two agree away from the cutoff.

use std::sync::Arc;

use ndarray::Array2;

use crate::basis::{CMatrix, HermiteBasis};
use crate::error::{FockError, Result};
use crate::linalg::expm;
use crate::quad::{
    comp_push, gauss_axis_scaled, gauss_hermite_rule, par_tree_sum, two_prod, QuadratureGrid,
};
use crate::scalar::{ci, cr, fp, fu, Scalar, C};
use crate::spectral::{annihilation_matrix, creation_matrix};

/// A point (a, b) of complexified phase space, a and b both length n.
#[derive(Clone, Debug)]
pub struct PhasePoint<S: Scalar> {
    pub a: Vec<C<S>>,
    pub b: Vec<C<S>>,
}

impl<S: Scalar> PhasePoint<S> {
    pub fn new(a: Vec<C<S>>, b: Vec<C<S>>) -> Self {
        assert_eq!(a.len(), b.len(), "phase point components must match");
        Self { a, b }
    }

    pub fn from_real(x: &[S], u: &[S]) -> Self {
        assert_eq!(x.len(), u.len(), "phase point components must match");
        Self {
            a: x.iter().map(|&s| C::new(s, S::zero())).collect(),
            b: u.iter().map(|&s| C::new(s, S::zero())).collect(),
        }
    }

    /// Splits a flat real point [x_1..x_n, u_1..u_n].
    pub fn from_flat(xu: &[S]) -> Self {
        assert!(xu.len() % 2 == 0, "flat phase point must have even length");
        let n = xu.len() / 2;
        Self::from_real(&xu[..n], &xu[n..])
    }

    pub fn zero(n: usize) -> Self {
        Self {
            a: vec![C::new(S::zero(), S::zero()); n],
            b: vec![C::new(S::zero(), S::zero()); n],
        }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn is_real(&self) -> bool {
        self.a.iter().chain(self.b.iter()).all(|c| c.im == S::zero())
    }

    pub fn neg(&self) -> Self {
        Self {
            a: self.a.iter().map(|c| -*c).collect(),
            b: self.b.iter().map(|c| -*c).collect(),
        }
    }

    /// Euclidean norm of the underlying 4n real coordinates.
    pub fn norm(&self) -> S {
        self.a
            .iter()
            .chain(self.b.iter())
            .map(|c| c.norm_sqr())
            .fold(S::zero(), |p, q| p + q)
            .sqrt()
    }

    fn coefficients(&self, lambda: S) -> (Vec<C<S>>, Vec<C<S>>) {
        let half = cr::<S>(fp(0.5));
        let il = ci::<S>(lambda / (fp::<S>(2.0) * lambda.abs()));
        let nu: Vec<C<S>> = self
            .a
            .iter()
            .zip(self.b.iter())
            .map(|(aj, bj)| il * *aj + half * *bj)
            .collect();
        let mu: Vec<C<S>> = self
            .a
            .iter()
            .zip(self.b.iter())
            .map(|(aj, bj)| il * *aj - half * *bj)
            .collect();
        (nu, mu)
    }
}

/// The cocycle exp(-(i lambda / 2)(u.a - x.b)) attached to translating by
/// (a, b) and evaluating at (x, u), all points real and flat-layout.
pub fn twist_cocycle<S: Scalar>(lambda: S, xu: &[S], ab: &[S]) -> C<S> {
    let n = xu.len() / 2;
    let mut arg = S::zero();
    for j in 0..n {
        arg = arg + xu[n + j] * ab[j] - xu[j] * ab[n + j];
    }
    (-ci::<S>(lambda / fp(2.0)) * cr(arg)).exp()
}

/// Generator of the representation at a phase-space point, as a dense matrix
/// on the truncated oscillator basis. Skew-Hermitian for real points.
pub fn rep_generator<S: Scalar>(basis: &HermiteBasis<S>, p: &PhasePoint<S>) -> Result<CMatrix<S>> {
    if p.n() != basis.n {
        return Err(FockError::DimensionMismatch(format!(
            "phase point has {} axes, basis has {}",
            p.n(),
            basis.n
        )));
    }
    let (nu, mu) = p.coefficients(basis.lambda);
    let mut l = basis.zeros();
    for j in 0..basis.n {
        let low = annihilation_matrix(basis, j)?;
        let raise = creation_matrix(basis, j)?;
        l = l + low.mapv(|e| e * nu[j]) + raise.mapv(|e| e * mu[j]);
    }
    Ok(l)
}

/// The representation operator exp(rep_generator) via the dense matrix
/// exponential. Exact group element of the truncated generator; see
/// `pi_matrix` for the truncation of the exact operator instead.
pub fn weyl_operator<S: Scalar>(basis: &HermiteBasis<S>, p: &PhasePoint<S>) -> Result<CMatrix<S>> {
    expm(&rep_generator(basis, p)?)
}

fn factorials<S: Scalar>(k: usize) -> Vec<S> {
    let mut f = Vec::with_capacity(k + 1);
    f.push(S::one());
    for m in 1..=k {
        let prev = f[m - 1];
        f.push(prev * fu::<S>(m));
    }
    f
}

/// Per-axis table of bounded entries e^{|lambda| mu nu} <phi_r, exp(mu A^dag)
/// exp(nu A) phi_s> for a real axis, where nu = -conj(mu) and the whole entry
/// collapses to a direction phase times a normalized Laguerre function of
/// xi = 2|lambda||mu|^2. The three-term recurrence keeps every intermediate
/// bounded; the closed power sum loses e^{xi/2} digits to cancellation, which
/// the Gauss-map adjoint would amplify into garbage.
fn bounded_axis_table<S: Scalar>(kk: usize, labs: S, mu: C<S>) -> Array2<C<S>> {
    let mut b = Array2::from_elem((kk + 1, kk + 1), C::new(S::zero(), S::zero()));
    let xi = fp::<S>(2.0) * labs * mu.norm_sqr();
    let modulus = mu.norm();
    let dir = if modulus > S::zero() {
        mu / cr(modulus)
    } else {
        C::new(S::one(), S::zero())
    };
    let fact = factorials::<S>(kk);
    for alpha in 0..=kk {
        // g_s = sqrt(s!/(s+alpha)!) xi^{alpha/2} e^{-xi/2} L_s^{(alpha)}(xi)
        let g0 = xi.powf(fu::<S>(alpha) / fp(2.0)) / fact[alpha].sqrt() * (-xi / fp(2.0)).exp();
        let mut gm1 = S::zero();
        let mut g = g0;
        let up = dir.powi(alpha as i32);
        let down = (-dir.conj()).powi(alpha as i32);
        for s in 0..=(kk - alpha) {
            b[(s + alpha, s)] = up * cr(g);
            b[(s, s + alpha)] = down * cr(g);
            let sf = fu::<S>(s);
            let af = fu::<S>(alpha);
            let next = ((fp::<S>(2.0) * sf + S::one() + af - xi) * g
                - (sf * (sf + af)).sqrt() * gm1)
                / ((sf + S::one()) * (sf + S::one() + af)).sqrt();
            gm1 = g;
            g = next;
        }
    }
    b
}

/// Matrix of the representation operator computed from its normal-ordered
/// form exp(L) = exp(|lambda| mu nu) exp(mu A^dag) exp(nu A) per axis.
/// Annihilation acts first, so the entry block at degrees <= k_max is the
/// exact infinite-dimensional entry, not a truncation artifact. Real points
/// go through the stable normalized-Laguerre recurrence; complex probe
/// points keep the direct power sum, which is accurate at the small radii
/// they are used at.
pub fn pi_matrix<S: Scalar>(basis: &HermiteBasis<S>, p: &PhasePoint<S>) -> Result<CMatrix<S>> {
    if p.n() != basis.n {
        return Err(FockError::DimensionMismatch(format!(
            "phase point has {} axes, basis has {}",
            p.n(),
            basis.n
        )));
    }
    let (nu, mu) = p.coefficients(basis.lambda);
    let labs = basis.lambda.abs();
    let kk = basis.k_max;

    if p.is_real() {
        let tables: Vec<Array2<C<S>>> = (0..basis.n)
            .map(|j| bounded_axis_table(kk, labs, mu[j]))
            .collect();
        let d = basis.dim();
        let idx = basis.indices();
        let mut m = basis.zeros();
        for (ri, alpha) in idx.iter().enumerate() {
            for ci_ in 0..d {
                let beta = &idx[ci_];
                let mut v = C::new(S::one(), S::zero());
                for j in 0..basis.n {
                    v *= tables[j][(alpha.alpha[j], beta.alpha[j])];
                }
                m[(ri, ci_)] = v;
            }
        }
        return Ok(m);
    }

    let fact = factorials::<S>(kk);
    let sqrt2l = (fp::<S>(2.0) * labs).sqrt();

    // Per-axis tables E[r][s] = <phi_r, exp(mu A^dag) exp(nu A) phi_s>.
    let mut tables: Vec<Array2<C<S>>> = Vec::with_capacity(basis.n);
    let mut phase = C::new(S::zero(), S::zero());
    for j in 0..basis.n {
        phase += cr::<S>(labs) * mu[j] * nu[j];
        let mut e = Array2::from_elem((kk + 1, kk + 1), C::new(S::zero(), S::zero()));
        let mu_pow = powers(mu[j], kk);
        let nu_pow = powers(nu[j], kk);
        for r in 0..=kk {
            for s in 0..=kk {
                let mut acc = C::new(S::zero(), S::zero());
                for k in 0..=r.min(s) {
                    let amp = (fact[r] * fact[s]).sqrt()
                        / (fact[r - k] * fact[s - k] * fact[k])
                        * sqrt2l.powi((r + s - 2 * k) as i32);
                    acc += mu_pow[r - k] * nu_pow[s - k] * cr(amp);
                }
                e[(r, s)] = acc;
            }
        }
        tables.push(e);
    }
    let phase = phase.exp();

    let d = basis.dim();
    let idx = basis.indices();
    let mut m = basis.zeros();
    for (ri, alpha) in idx.iter().enumerate() {
        for ci_ in 0..d {
            let beta = &idx[ci_];
            let mut v = phase;
            for j in 0..basis.n {
                v *= tables[j][(alpha.alpha[j], beta.alpha[j])];
            }
            m[(ri, ci_)] = v;
        }
    }
    Ok(m)
}

fn powers<S: Scalar>(z: C<S>, k: usize) -> Vec<C<S>> {
    let mut p = Vec::with_capacity(k + 1);
    p.push(C::new(S::one(), S::zero()));
    for m in 1..=k {
        let prev = p[m - 1];
        p.push(prev * z);
    }
    p
}

/// Quadrature grid over phase space R^{2n} sized for functions built from
/// oscillator data up to degree k_max at scale lambda: the half-width covers
/// the classical support radius sqrt(2(2 k_max + n)/|lambda|) with a floor
/// of 6, and the node density stays at the natural Gaussian scale.
pub fn weyl_grid<S: Scalar>(n: usize, k_max: usize, lambda: S, q: usize) -> QuadratureGrid<S> {
    let labs = lambda.abs();
    let radius = (fp::<S>(2.0) * fu::<S>(2 * k_max + n) / labs).sqrt().max(fp(6.0));
    let (nodes, _) = gauss_hermite_rule::<S>(q);
    let x_max = nodes[q - 1];
    let c = labs.min((x_max / radius) * (x_max / radius));
    let axis = gauss_axis_scaled(c, q);
    QuadratureGrid {
        axes: vec![axis; 2 * n],
    }
}

/// A function sampled on a quadrature grid, optionally carrying the closure
/// it was sampled from. Values are stored in the grid's flat point order.
///
/// `eval_at` prefers the closure; without one it falls back to separable
/// cubic interpolation between grid nodes (zero outside the node hull) and
/// any result built from such fallback evaluations is marked `degraded`.
#[derive(Clone)]
pub struct GridFunction<S: Scalar> {
    pub grid: Arc<QuadratureGrid<S>>,
    pub values: Vec<C<S>>,
    evaluator: Option<Arc<dyn Fn(&[S]) -> C<S> + Send + Sync>>,
    pub degraded: bool,
}

impl<S: Scalar> GridFunction<S> {
    pub fn from_fn<F>(grid: QuadratureGrid<S>, f: F) -> Self
    where
        F: Fn(&[S]) -> C<S> + Send + Sync + 'static,
    {
        let grid = Arc::new(grid);
        let f = Arc::new(f);
        let values: Vec<C<S>> = {
            use rayon::prelude::*;
            (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let (x, _) = grid.point(i);
                    f(&x)
                })
                .collect()
        };
        Self {
            grid,
            values,
            evaluator: Some(f),
            degraded: false,
        }
    }

    /// Wraps raw samples. Off-node evaluation will interpolate.
    pub fn from_values(grid: QuadratureGrid<S>, values: Vec<C<S>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FockError::DimensionMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: Arc::new(grid),
            values,
            evaluator: None,
            degraded: false,
        })
    }

    pub fn has_evaluator(&self) -> bool {
        self.evaluator.is_some()
    }

    pub fn eval_at(&self, x: &[S]) -> C<S> {
        match &self.evaluator {
            Some(f) => f(x),
            None => self.interpolate(x),
        }
    }

    /// Separable 4-point Lagrange interpolation on the stored samples.
    fn interpolate(&self, x: &[S]) -> C<S> {
        let m = self.grid.dim();
        debug_assert_eq!(x.len(), m);
        let mut windows: Vec<(usize, [S; 4])> = Vec::with_capacity(m);
        for axis in 0..m {
            let nodes = &self.grid.axes[axis].nodes;
            let q = nodes.len();
            if x[axis] < nodes[0] || x[axis] > nodes[q - 1] {
                return C::new(S::zero(), S::zero());
            }
            if q < 4 {
                // Degenerate axis; nearest node wins.
                let mut best = 0;
                for j in 1..q {
                    if (nodes[j] - x[axis]).abs() < (nodes[best] - x[axis]).abs() {
                        best = j;
                    }
                }
                let mut w = [S::zero(); 4];
                w[0] = S::one();
                windows.push((best, w));
                continue;
            }
            // First node >= x, then a centered window of 4.
            let mut hi = nodes.partition_point(|&nd| nd < x[axis]);
            if hi < 2 {
                hi = 2;
            }
            if hi > q - 2 {
                hi = q - 2;
            }
            let lo = hi - 2;
            let xs = [nodes[lo], nodes[lo + 1], nodes[lo + 2], nodes[lo + 3]];
            let mut w = [S::zero(); 4];
            for i in 0..4 {
                let mut num = S::one();
                let mut den = S::one();
                for k in 0..4 {
                    if k != i {
                        num = num * (x[axis] - xs[k]);
                        den = den * (xs[i] - xs[k]);
                    }
                }
                w[i] = num / den;
            }
            windows.push((lo, w));
        }
        // Strides for the flat row-major layout.
        let mut strides = vec![1usize; m];
        for axis in (0..m.saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * self.grid.axes[axis + 1].nodes.len();
        }
        let mut acc = C::new(S::zero(), S::zero());
        let corners = 1usize << (2 * m);
        for corner in 0..corners {
            let mut idx = 0usize;
            let mut w = S::one();
            let mut live = true;
            let mut c = corner;
            for axis in 0..m {
                let o = c & 3;
                c >>= 2;
                let (lo, ws) = &windows[axis];
                if ws[o] == S::zero() && o > 0 {
                    // Degenerate window; only offset 0 carries weight.
                    live = false;
                    break;
                }
                idx += (lo + o) * strides[axis];
                w = w * ws[o];
            }
            if live {
                acc += self.values[idx] * cr(w);
            }
        }
        acc
    }

    /// Samples f at every grid node through `eval_at`, in parallel.
    pub fn resample<F>(&self, f: F) -> Vec<C<S>>
    where
        F: Fn(&[S]) -> C<S> + Sync,
    {
        use rayon::prelude::*;
        (0..self.grid.len())
            .into_par_iter()
            .map(|i| {
                let (x, _) = self.grid.point(i);
                f(&x)
            })
            .collect()
    }

    /// L^2 norm over the grid measure.
    pub fn l2_norm(&self) -> S {
        let s = par_tree_sum(self.grid.len(), |i| {
            let (_, w) = self.grid.point(i);
            cr::<S>(self.values[i].norm_sqr() * w)
        });
        s.re.max(S::zero()).sqrt()
    }

    pub fn integral(&self) -> C<S> {
        par_tree_sum(self.grid.len(), |i| {
            let (_, w) = self.grid.point(i);
            self.values[i] * cr(w)
        })
    }
}

/// Integrated representation of a grid function: the dense matrix
/// sum_i w_i f(p_i) Pi(p_i) on the truncated basis, accumulated chunkwise in
/// a fixed order so the result is independent of thread count.
pub fn weyl_transform<S: Scalar>(
    basis: &HermiteBasis<S>,
    f: &GridFunction<S>,
) -> Result<CMatrix<S>> {
    use rayon::prelude::*;
    if f.grid.dim() != 2 * basis.n {
        return Err(FockError::DimensionMismatch(format!(
            "grid dimension {} does not match phase space of dimension {}",
            f.grid.dim(),
            2 * basis.n
        )));
    }
    let len = f.grid.len();
    const CHUNK: usize = 256;
    let chunks = len.div_ceil(CHUNK);
    let d = basis.dim();
    // Entries are accumulated with error-free products and compensated
    // sums. The adjoint of the Gauss map amplifies entry errors by up to
    // e^{E_r + E_s}, so the plain-summation floor is not good enough there.
    let partials: Vec<(CMatrix<S>, CMatrix<S>)> = (0..chunks)
        .into_par_iter()
        .map(|ci_| {
            let start = ci_ * CHUNK;
            let stop = (start + CHUNK).min(len);
            let mut acc = basis.zeros();
            let mut carry = basis.zeros();
            for i in start..stop {
                let (x, w) = f.grid.point(i);
                let p = PhasePoint::from_flat(&x);
                let pi = pi_matrix(basis, &p).expect("grid point dimension already checked");
                let scale = f.values[i] * cr(w);
                for r in 0..d {
                    for s in 0..d {
                        let a = pi[(r, s)];
                        let (p1, e1) = two_prod(a.re, scale.re);
                        let (p2, e2) = two_prod(a.im, scale.im);
                        let (p3, e3) = two_prod(a.re, scale.im);
                        let (p4, e4) = two_prod(a.im, scale.re);
                        let t = &mut acc[(r, s)];
                        let c = &mut carry[(r, s)];
                        comp_push(&mut t.re, &mut c.re, p1);
                        comp_push(&mut t.re, &mut c.re, -p2);
                        c.re += e1 - e2;
                        comp_push(&mut t.im, &mut c.im, p3);
                        comp_push(&mut t.im, &mut c.im, p4);
                        c.im += e3 + e4;
                    }
                }
            }
            (acc, carry)
        })
        .collect();
    let mut total = basis.zeros();
    let mut tcarry = basis.zeros();
    for (pa, pc) in partials {
        for r in 0..d {
            for s in 0..d {
                let t = &mut total[(r, s)];
                let c = &mut tcarry[(r, s)];
                comp_push(&mut t.re, &mut c.re, pa[(r, s)].re);
                comp_push(&mut t.im, &mut c.im, pa[(r, s)].im);
                c.re += pc[(r, s)].re;
                c.im += pc[(r, s)].im;
            }
        }
    }
    Ok(total + tcarry)
}

/// Twisted convolution (f *_lambda g)(z) = int f(z - w) g(w) cocycle dz,
/// returned on g's grid. Values are computed by quadrature over g's grid;
/// off-node values of f come from its evaluator or by interpolation, and the
/// result is marked degraded whenever interpolation was involved.
pub fn twisted_convolution<S: Scalar>(
    lambda: S,
    f: &GridFunction<S>,
    g: &GridFunction<S>,
) -> Result<GridFunction<S>> {
    if f.grid.dim() != g.grid.dim() {
        return Err(FockError::DimensionMismatch(
            "convolution factors live on grids of different dimension".into(),
        ));
    }
    let fc = f.clone();
    let gc = g.clone();
    let eval = move |z: &[S]| -> C<S> {
        let m = gc.grid.dim();
        par_tree_sum(gc.grid.len(), |i| {
            let (w, wt) = gc.grid.point(i);
            let mut sh = vec![S::zero(); m];
            for k in 0..m {
                sh[k] = z[k] - w[k];
            }
            // Convolution twists with the opposite phase orientation to
            // translation: exp(+(i lambda/2)(u.a - x.b)).
            fc.eval_at(&sh) * gc.values[i] * twist_cocycle(lambda, z, &w).conj() * cr(wt)
        })
    };
    let grid = (*g.grid).clone();
    let degraded = f.degraded || g.degraded || !f.has_evaluator();
    let mut out = GridFunction::from_fn(grid, eval);
    out.degraded = degraded;
    Ok(out)
}

/// Twisted translation: (tau(a,b) f)(x,u) = f(x-a, u-b) cocycle(a,b; x,u).
/// The point must be real.
pub fn twisted_translation<S: Scalar>(
    lambda: S,
    p: &PhasePoint<S>,
    f: &GridFunction<S>,
) -> Result<GridFunction<S>> {
    if !p.is_real() {
        return Err(FockError::Unsupported(
            "twisted translation needs a real phase-space point".into(),
        ));
    }
    if 2 * p.n() != f.grid.dim() {
        return Err(FockError::DimensionMismatch(
            "translation point does not match the grid dimension".into(),
        ));
    }
    let n = p.n();
    let mut ab = vec![S::zero(); 2 * n];
    for j in 0..n {
        ab[j] = p.a[j].re;
        ab[n + j] = p.b[j].re;
    }
    let fc = f.clone();
    let abm = ab.clone();
    let eval = move |xu: &[S]| -> C<S> {
        let mut sh = xu.to_vec();
        for k in 0..2 * n {
            sh[k] = xu[k] - abm[k];
        }
        fc.eval_at(&sh) * twist_cocycle(lambda, xu, &abm)
    };
    let degraded = f.degraded || !f.has_evaluator();
    let grid = (*f.grid).clone();
    let mut out = GridFunction::from_fn(grid, eval);
    out.degraded = degraded;
    Ok(out)
}

/// Symplectic Fourier transform: (F f)(x, u) = fhat((lambda/2)(u, -x)) with
/// the normalized transform fhat(xi) = (2 pi)^{-n-type} int f(y) e^{-i y.xi} dy
/// over the full phase space R^{2n}. Applying it twice scales the argument
/// by the factor (2/lambda)^{2n}.
pub fn symplectic_fourier<S: Scalar>(lambda: S, f: &GridFunction<S>) -> Result<GridFunction<S>> {
    let m = f.grid.dim();
    if m % 2 != 0 {
        return Err(FockError::DimensionMismatch(
            "phase-space grid must have even dimension".into(),
        ));
    }
    let n = m / 2;
    let fc = f.clone();
    let norm = (fp::<S>(2.0) * fp::<S>(std::f64::consts::PI)).powi(-(m as i32) / 2);
    let eval = move |xu: &[S]| -> C<S> {
        let mut xi = vec![S::zero(); m];
        for j in 0..n {
            xi[j] = lambda * xu[n + j] / fp(2.0);
            xi[n + j] = -lambda * xu[j] / fp(2.0);
        }
        let s = par_tree_sum(fc.grid.len(), |i| {
            let (y, w) = fc.grid.point(i);
            let mut dot = S::zero();
            for k in 0..m {
                dot = dot + y[k] * xi[k];
            }
            fc.values[i] * (-ci::<S>(S::one()) * cr(dot)).exp() * cr(w)
        });
        s * cr(norm)
    };
    let degraded = f.degraded;
    let grid = (*f.grid).clone();
    let mut out = GridFunction::from_fn(grid, eval);
    out.degraded = degraded;
    Ok(out)
}

/// Operator assigned to the harmonic monomial with holomorphic degree p and
/// antiholomorphic degree q by the transform's correspondence on polynomial
/// symbols. For n = 1 the monomial is z^p conj(z)^q with pq = 0; for n = 2
/// it is z_1^p conj(z_2)^q. Positive lambda sends holomorphic powers to
/// annihilation ladders; negative lambda swaps the roles.
pub fn weyl_correspondence_monomial<S: Scalar>(
    basis: &HermiteBasis<S>,
    p: usize,
    q: usize,
) -> Result<CMatrix<S>> {
    let (axis_hol, axis_anti) = match basis.n {
        1 => {
            if p != 0 && q != 0 {
                return Err(FockError::Unsupported(
                    "n = 1 monomials must be purely holomorphic or antiholomorphic".into(),
                ));
            }
            (0usize, 0usize)
        }
        2 => (0usize, 1usize),
        _ => {
            return Err(FockError::Unsupported(
                "monomial correspondence is implemented for n in {1, 2}".into(),
            ));
        }
    };
    let mut m = basis.eye();
    if basis.lambda > S::zero() {
        // conj(z) powers raise, z powers lower; creations compose on the left.
        for _ in 0..q {
            m = creation_matrix(basis, axis_anti)?.dot(&m);
        }
        for _ in 0..p {
            m = m.dot(&annihilation_matrix(basis, axis_hol)?);
        }
    } else {
        for _ in 0..p {
            m = creation_matrix(basis, axis_hol)?.dot(&m);
        }
        for _ in 0..q {
            m = m.dot(&annihilation_matrix(basis, axis_anti)?);
        }
    }
    Ok(m)
}

/// One-time calibration of the transform's normalization at n = 1,
/// lambda = 1, t = 1: returns the measured semigroup ratio (the constant c
/// with transform(p_t) = c e^{-tH}) and the measured Plancherel constant
/// kappa with int |f|^2 = kappa |transform(f)|_HS^2.
pub fn weyl_normalization<S: Scalar>(q: usize) -> Result<(S, S)> {
    use crate::kernels::{heat_kernel_real, KernelParams};
    let basis = HermiteBasis::<S>::new(1, 16, S::one())?;
    let grid = weyl_grid(1, 16, S::one(), q);
    let params = KernelParams::new(S::one(), S::one(), 1)?;
    let f = GridFunction::from_fn(grid, move |xu| heat_kernel_real(&params, xu));
    let m = weyl_transform(&basis, &f)?;
    // Semigroup ratio from the lowest diagonal entries, where truncation is
    // immaterial.
    let mut c = S::zero();
    for r in 0..4 {
        let e = basis.energy(r);
        c = c + m[(r, r)].re * e.exp() / fp(4.0);
    }
    let norm2 = f.l2_norm();
    let mut hs = S::zero();
    for r in 0..basis.dim() {
        for s in 0..basis.dim() {
            hs = hs + m[(r, s)].norm_sqr();
        }
    }
    let kappa = norm2 * norm2 / hs;
    Ok((c, kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::HermiteBasis;
    use crate::kernels::{heat_kernel_real, KernelParams};
    use crate::linalg::{adjoint, operator_norm};
    use crate::quad::gauss_hermite_grid;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    type C64 = C<f64>;

    fn basis(k: usize, lambda: f64) -> HermiteBasis<f64> {
        HermiteBasis::new(1, k, lambda).unwrap()
    }

    fn real_point(x: f64, u: f64) -> PhasePoint<f64> {
        PhasePoint::from_real(&[x], &[u])
    }

    fn max_block_diff(a: &CMatrix<f64>, b: &CMatrix<f64>, block: usize) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..block {
            for c in 0..block {
                worst = worst.max((a[(r, c)] - b[(r, c)]).norm());
            }
        }
        worst
    }

    #[test]
    fn generator_is_skew_hermitian_for_real_points() {
        let b = basis(10, 1.7);
        let l = rep_generator(&b, &real_point(0.4, -0.8)).unwrap();
        let neg_adj = adjoint(&l).mapv(|e| -e);
        assert!(max_block_diff(&l, &neg_adj, b.dim()) < 1e-14);
    }

    #[test]
    fn identity_at_the_origin() {
        let b = basis(8, 1.0);
        let w = weyl_operator(&b, &PhasePoint::zero(1)).unwrap();
        assert!(max_block_diff(&w, &b.eye(), b.dim()) < 1e-14);
    }

    #[test]
    fn vacuum_matrix_element_matches_direct_integral() {
        // <Pi(x,u) h_0, h_0> computed from the defining action
        // (Pi(x,u) f)(xi) = e^{i lambda (x.xi + x.u/2)} f(xi + u)
        // by one-dimensional quadrature, against the ladder evaluation.
        let lambda = 1.3f64;
        let (x, u) = (0.4, -0.7);
        let b = basis(12, lambda);
        let m = pi_matrix(&b, &real_point(x, u)).unwrap();
        let grid = gauss_hermite_grid(lambda, 1, 48);
        let h0 = |t: f64| (lambda / std::f64::consts::PI).powf(0.25) * (-lambda * t * t / 2.0).exp();
        let direct = grid.integrate(|xi| {
            let t = xi[0];
            let phase = C64::new(0.0, lambda * (x * t + 0.5 * x * u)).exp();
            phase * h0(t + u) * h0(t)
        });
        assert_abs_diff_eq!(m[(0, 0)].re, direct.re, epsilon = 1e-12);
        assert_abs_diff_eq!(m[(0, 0)].im, direct.im, epsilon = 1e-12);
        // Closed form of the same entry.
        let closed = (-lambda * (x * x + u * u) / 4.0).exp();
        assert_abs_diff_eq!(m[(0, 0)].norm(), closed, epsilon = 1e-13);
    }

    #[test]
    fn ladder_and_exponential_paths_agree_inside() {
        let b = basis(20, 1.0);
        for p in [
            real_point(0.3, -0.2),
            PhasePoint::new(vec![C64::new(0.2, 0.1)], vec![C64::new(-0.3, 0.05)]),
        ] {
            let fast = pi_matrix(&b, &p).unwrap();
            let slow = weyl_operator(&b, &p).unwrap();
            assert!(max_block_diff(&fast, &slow, 14) < 1e-10);
        }
    }

    #[test]
    fn composition_law_on_interior_block() {
        let lambda = 1.0f64;
        let b = basis(20, lambda);
        let (a1, b1) = (0.2, -0.1);
        let (x2, u2) = (-0.15, 0.25);
        let lhs = pi_matrix(&b, &real_point(a1, b1))
            .unwrap()
            .dot(&pi_matrix(&b, &real_point(x2, u2)).unwrap());
        let phase = C64::new(0.0, -lambda / 2.0 * (u2 * a1 - x2 * b1)).exp();
        let rhs = pi_matrix(&b, &real_point(a1 + x2, b1 + u2))
            .unwrap()
            .mapv(|e| e * phase);
        // Truncation only pollutes entries near the cutoff degree.
        assert!(max_block_diff(&lhs, &rhs, 13) < 1e-9);
    }

    #[test]
    fn transform_of_heat_kernel_is_the_semigroup() {
        let (c, kappa) = weyl_normalization::<f64>(64).unwrap();
        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(kappa, 1.0 / (2.0 * std::f64::consts::PI), epsilon = 1e-7);
    }

    #[test]
    fn unitary_for_real_points() {
        let b = basis(16, 0.9);
        let w = pi_matrix(&b, &real_point(0.3, 0.2)).unwrap();
        let prod = adjoint(&w).dot(&w);
        // Interior block of W*W is the identity; cutoff rows lose mass.
        assert!(max_block_diff(&prod, &b.eye(), 10) < 1e-10);
    }

    #[test]
    fn negative_lambda_conjugates_the_generator() {
        let bp = basis(10, 1.4);
        let bm = basis(10, -1.4);
        let p = real_point(0.5, -0.3);
        let lp = rep_generator(&bp, &p).unwrap();
        let lm = rep_generator(&bm, &p).unwrap();
        let conj = lp.mapv(|e| e.conj());
        assert!(max_block_diff(&lm, &conj, bp.dim()) < 1e-14);
    }

    #[test]
    fn heat_kernels_compose_under_twisted_convolution() {
        let lambda = 1.0f64;
        let grid = weyl_grid(1, 20, lambda, 64);
        let p1 = KernelParams::new(lambda, 0.4, 1).unwrap();
        let p2 = KernelParams::new(lambda, 0.7, 1).unwrap();
        let p3 = KernelParams::new(lambda, 1.1, 1).unwrap();
        let f = GridFunction::from_fn(grid.clone(), move |xu| heat_kernel_real(&p1, xu));
        let g = GridFunction::from_fn(grid, move |xu| heat_kernel_real(&p2, xu));
        let conv = twisted_convolution(lambda, &f, &g).unwrap();
        for probe in [[0.0, 0.0], [0.5, -0.3], [1.0, 0.7], [-0.8, 0.2]] {
            let got = conv.eval_at(&probe);
            let expect = heat_kernel_real(&p3, &probe);
            assert_abs_diff_eq!(got.re, expect.re, epsilon = 1e-8);
            assert_abs_diff_eq!(got.im, expect.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn transform_is_a_homomorphism_for_twisted_convolution() {
        let lambda = 1.0f64;
        let b = basis(20, lambda);
        let grid = weyl_grid(1, 20, lambda, 64);
        let f = GridFunction::from_fn(grid.clone(), |xu| {
            C64::new((-0.6 * (xu[0] * xu[0] + xu[1] * xu[1])).exp() * (1.0 + 0.3 * xu[0]), 0.0)
        });
        let g = GridFunction::from_fn(grid, |xu| {
            C64::new(
                (-0.8 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(),
                0.2 * xu[1] * (-0.5 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(),
            )
        });
        let conv = twisted_convolution(lambda, &f, &g).unwrap();
        let lhs = weyl_transform(&b, &conv).unwrap();
        let rhs = weyl_transform(&b, &f).unwrap().dot(&weyl_transform(&b, &g).unwrap());
        assert!(max_block_diff(&lhs, &rhs, 15) < 1e-5);
    }

    #[test]
    fn translation_intertwines_with_the_representation() {
        let lambda = 1.0f64;
        let b = basis(18, lambda);
        let grid = weyl_grid(1, 18, lambda, 64);
        let f = GridFunction::from_fn(grid, |xu| {
            C64::new((-0.7 * (xu[0] * xu[0] + xu[1] * xu[1])).exp() * (1.0 - 0.2 * xu[1]), 0.0)
        });
        let p = real_point(0.3, 0.4);
        let shifted = twisted_translation(lambda, &p, &f).unwrap();
        let lhs = weyl_transform(&b, &shifted).unwrap();
        let rhs = pi_matrix(&b, &p).unwrap().dot(&weyl_transform(&b, &f).unwrap());
        assert!(max_block_diff(&lhs, &rhs, 12) < 1e-6);
    }

    #[test]
    fn translation_distributes_over_twisted_convolution() {
        let lambda = 0.9f64;
        let grid = weyl_grid(1, 16, lambda, 48);
        let f = GridFunction::from_fn(grid.clone(), |xu| {
            C64::new((-0.5 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.0)
        });
        let g = GridFunction::from_fn(grid, |xu| {
            C64::new((1.0 + 0.4 * xu[0]) * (-0.9 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.0)
        });
        let p = real_point(-0.2, 0.35);
        let lhs = twisted_translation(lambda, &p, &twisted_convolution(lambda, &f, &g).unwrap()).unwrap();
        let rhs = twisted_convolution(lambda, &twisted_translation(lambda, &p, &f).unwrap(), &g).unwrap();
        for probe in [[0.0, 0.0], [0.4, -0.6], [-0.3, 0.2]] {
            let a = lhs.eval_at(&probe);
            let bb = rhs.eval_at(&probe);
            assert_abs_diff_eq!(a.re, bb.re, epsilon = 1e-7);
            assert_abs_diff_eq!(a.im, bb.im, epsilon = 1e-7);
        }
    }

    #[test]
    fn symplectic_fourier_of_standard_gaussian() {
        // f(y) = e^{-|y|^2/2} on R^2 has normalized transform e^{-|xi|^2/2},
        // so (F f)(x, u) = e^{-lambda^2 (x^2+u^2)/8}.
        let lambda = 1.2f64;
        let grid = gauss_hermite_grid::<f64>(0.5, 2, 48);
        let f = GridFunction::from_fn(grid, |xu| {
            C64::new((-(xu[0] * xu[0] + xu[1] * xu[1]) / 2.0).exp(), 0.0)
        });
        let tf = symplectic_fourier(lambda, &f).unwrap();
        for probe in [[0.0, 0.0], [0.7, -0.4], [1.1, 0.9]] {
            let got = tf.eval_at(&probe);
            let expect = (-(lambda * lambda) * (probe[0] * probe[0] + probe[1] * probe[1]) / 8.0).exp();
            assert_abs_diff_eq!(got.re, expect, epsilon = 1e-10);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn symplectic_fourier_squares_to_a_dilation() {
        let lambda = 1.0f64;
        let grid = gauss_hermite_grid::<f64>(0.5, 2, 48);
        let f = GridFunction::from_fn(grid, |xu| {
            C64::new(
                (1.0 + 0.5 * xu[0]) * (-(xu[0] * xu[0] + xu[1] * xu[1]) / 2.0).exp(),
                0.0,
            )
        });
        let ff = symplectic_fourier(lambda, &symplectic_fourier(lambda, &f).unwrap()).unwrap();
        let scale = (2.0 / lambda).powi(2);
        for probe in [[0.3, 0.1], [-0.6, 0.4]] {
            let got = ff.eval_at(&probe);
            let expect = f.eval_at(&probe).scale(scale);
            assert_abs_diff_eq!(got.re, expect.re, epsilon = 1e-8);
            assert_abs_diff_eq!(got.im, expect.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn monomial_correspondence_ladders() {
        let b = basis(8, 1.0);
        let m = weyl_correspondence_monomial(&b, 2, 0).unwrap();
        let a = annihilation_matrix(&b, 0).unwrap();
        let expect = a.dot(&a);
        assert!(max_block_diff(&m, &expect, b.dim()) < 1e-14);

        let bm = basis(8, -1.0);
        let mm = weyl_correspondence_monomial(&bm, 2, 0).unwrap();
        let c = creation_matrix(&bm, 0).unwrap();
        let expect_m = c.dot(&c);
        assert!(max_block_diff(&mm, &expect_m, bm.dim()) < 1e-14);

        assert!(weyl_correspondence_monomial(&b, 1, 1).is_err());
    }

    #[test]
    fn monomial_entries_obey_the_energy_bound() {
        let b2 = HermiteBasis::<f64>::new(2, 12, 1.0).unwrap();
        let (p, q) = (2usize, 1usize);
        let m = weyl_correspondence_monomial(&b2, p, q).unwrap();
        let half = ((p + q) as f64) / 2.0;
        for (col, alpha) in b2.indices().iter().enumerate() {
            let cap = 2f64.powf(half)
                * ((q + 1) as f64).powf(q as f64 / 2.0)
                * b2.energy(col).powf(half);
            for row in 0..b2.dim() {
                assert!(
                    m[(row, col)].norm() <= cap * (1.0 + 1e-12),
                    "entry ({row},{col}) = {} exceeds cap {cap} at alpha {:?}",
                    m[(row, col)].norm(),
                    alpha.alpha
                );
            }
        }
    }

    #[test]
    fn interpolation_matches_smooth_samples() {
        let grid = weyl_grid(1, 12, 1.0, 48);
        let truth = |xu: &[f64]| C64::new((-0.4 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.1 * xu[0]);
        let sampled = GridFunction::from_fn(grid.clone(), truth);
        let bare = GridFunction::from_values(grid, sampled.values.clone()).unwrap();
        assert!(!bare.has_evaluator());
        for probe in [[0.13, -0.41], [0.92, 0.37], [-1.4, 0.05]] {
            let got = bare.eval_at(&probe);
            let expect = truth(&probe);
            assert!((got - expect).norm() < 2e-3, "probe {probe:?}: {got} vs {expect}");
        }
        // Far outside the node hull the fallback is zero.
        let far = bare.eval_at(&[60.0, 0.0]);
        assert_eq!(far, C64::new(0.0, 0.0));
    }

    #[test]
    fn convolution_flags_interpolated_inputs() {
        let lambda = 1.0f64;
        let grid = weyl_grid(1, 8, lambda, 24);
        let f = GridFunction::from_fn(grid.clone(), |xu| {
            C64::new((-(xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.0)
        });
        let bare = GridFunction::from_values((*f.grid).clone(), f.values.clone()).unwrap();
        let clean = twisted_convolution(lambda, &f, &f).unwrap();
        let dirty = twisted_convolution(lambda, &bare, &f).unwrap();
        assert!(!clean.degraded);
        assert!(dirty.degraded);
    }

    #[test]
    fn operator_norm_of_real_point_unitary_is_one() {
        let b = basis(14, 1.0);
        let w = pi_matrix(&b, &real_point(0.2, -0.1)).unwrap();
        // Truncation can only shrink columns, so the norm sits at most at 1.
        let n = operator_norm(&w);
        assert!(n <= 1.0 + 1e-9 && n > 0.9, "norm {n}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn translation_preserves_modulus(a in -0.8f64..0.8, bb in -0.8f64..0.8) {
            let lambda = 1.0f64;
            let grid = weyl_grid(1, 8, lambda, 24);
            let f = GridFunction::from_fn(grid, |xu| {
                C64::new((-(xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.0)
            });
            let p = real_point(a, bb);
            let shifted = twisted_translation(lambda, &p, &f).unwrap();
            let probe = [0.3, -0.2];
            let lhs = shifted.eval_at(&probe).norm();
            let rhs = f.eval_at(&[probe[0] - a, probe[1] - bb]).norm();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn cocycle_is_antisymmetric(x in -1.0f64..1.0, u in -1.0f64..1.0,
                                    a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let lambda = 1.3f64;
            let fwd = twist_cocycle(lambda, &[x, u], &[a, b]);
            let bwd = twist_cocycle(lambda, &[a, b], &[x, u]);
            prop_assert!((fwd * bwd - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }
}
