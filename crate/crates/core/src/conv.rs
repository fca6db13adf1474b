//! Convolution operators on the twisted Fock space: the kernel family
//! S / S-tilde and the translations rho(a, b) they commute with, the
//! operator-side convolution algebra, circle averaging and its isotypic
//! components, the graded ladder basis built from monomial multipliers, and
//! the truncated-norm experiments that probe boundedness.

use std::sync::Arc;

use ndarray::Array2;

use crate::basis::{CMatrix, HermiteBasis};
use crate::error::{FockError, Result};
use crate::fock::{
    apply_u, apply_u_inv, gauss_bargmann, gauss_bargmann_adjoint, reproducing_constant,
    trace_constant, u_lambda, CGrid, FockElement,
};
use crate::kernels::{fock_kernel, fock_weight, heat_kernel_real, KernelParams};
use crate::linalg::{adjoint, one_norm, operator_norm, trace_prod};
use crate::scalar::{cr, fp, fu, Scalar, C};
use crate::spectral::{hermite_hamiltonian, hermite_semigroup, spectral_projection};
use crate::weyl::{
    pi_matrix, weyl_correspondence_monomial, weyl_grid, weyl_transform, GridFunction, PhasePoint,
};

/// A convolution symbol: the entire function together with its operator
/// side, cached at the symbol's truncation level.
#[derive(Clone)]
pub struct Symbol<S: Scalar> {
    pub phi: FockElement<S>,
    pub m: CMatrix<S>,
}

impl<S: Scalar> Symbol<S> {
    /// Symbol from its operator side; the function side is the Gauss map.
    pub fn from_operator(basis: &HermiteBasis<S>, t: S, m: &CMatrix<S>) -> Result<Self> {
        Ok(Self {
            phi: gauss_bargmann(basis, t, m)?,
            m: m.clone(),
        })
    }

    /// Symbol from a function-side element. Uses the element's operator when
    /// it carries one, otherwise recovers it through the guarded adjoint.
    pub fn from_element(phi: &FockElement<S>, k_inner: usize, q: usize) -> Result<Self> {
        let m = match &phi.m {
            Some(m) => m.clone(),
            None => gauss_bargmann_adjoint(phi, k_inner, q)?,
        };
        Ok(Self {
            phi: phi.clone(),
            m,
        })
    }
}

/// Bigraded circle type (p, q). For n = 1 only the degenerate types with
/// p q = 0 occur.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaIndex {
    pub p: usize,
    pub q: usize,
}

impl DeltaIndex {
    pub fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    pub fn weight(&self) -> usize {
        self.p + self.q
    }
}

/// Verdict attached to a sequence of truncated multiplier norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceVerdict {
    /// The last two increments are each below 5% relative growth.
    BoundedConsistent,
    /// Every consecutive step grows by more than 25%.
    Divergent,
    Inconclusive,
}

/// Operator norms of the truncated multipliers of a symbol across
/// increasing cutoff levels, with levels the quadrature guard refused.
#[derive(Clone, Debug)]
pub struct NormTrace<S: Scalar> {
    pub levels: Vec<usize>,
    pub norms: Vec<S>,
    pub skipped: Vec<usize>,
    pub verdict: TraceVerdict,
}

fn verdict_for<S: Scalar>(norms: &[S]) -> TraceVerdict {
    // Guard-skipped levels can shorten a trace; two computed levels still
    // witness a plateau, while divergence needs two growing increments so a
    // single jump is never mistaken for it.
    if norms.len() < 2 {
        return TraceVerdict::Inconclusive;
    }
    let m = norms.len();
    let floor = fp::<S>(1e-300);
    let rel = |i: usize| (norms[i + 1] - norms[i]) / norms[i].max(floor);
    let settled = |i: usize| rel(i).abs() < fp(0.05);
    let plateau = if m >= 3 {
        settled(m - 2) && settled(m - 3)
    } else {
        settled(0)
    };
    if plateau {
        return TraceVerdict::BoundedConsistent;
    }
    if m >= 3 && (0..m - 1).all(|i| rel(i) > fp(0.25)) {
        return TraceVerdict::Divergent;
    }
    TraceVerdict::Inconclusive
}

/// The translations rho(a, b) on the Fock space:
///   (rho(a, b) F)(z, w) = K((z, w), (a, b)) F(z - a, w - b)
/// with K the reproducing kernel, so the factor is
/// exp((lambda/2) coth(2 t lambda)(z.conj(a) + w.conj(b))) times the twist
/// phase. Real translations scale the norm by exp((lambda/4) coth(2 t
/// lambda) (|a|^2 + |b|^2)); dividing by that factor makes them unitary.
pub fn rho_translation<S: Scalar>(p: &PhasePoint<S>, f: &FockElement<S>) -> FockElement<S> {
    let params = f.params();
    let a = p.a.clone();
    let b = p.b.clone();
    let inner = f.evaluator();
    let eval: Arc<dyn Fn(&[C<S>], &[C<S>]) -> C<S> + Send + Sync> =
        Arc::new(move |z: &[C<S>], w: &[C<S>]| {
            let zs: Vec<C<S>> = z.iter().zip(a.iter()).map(|(zj, aj)| *zj - *aj).collect();
            let ws: Vec<C<S>> = w.iter().zip(b.iter()).map(|(wj, bj)| *wj - *bj).collect();
            fock_kernel(&params, z, w, &a, &b) * inner(&zs, &ws)
        });
    FockElement::from_parts(f.basis.clone(), f.t, None, eval, f.form_hint.clone())
}

fn operator_of<S: Scalar>(el: &FockElement<S>, q: usize) -> Result<CMatrix<S>> {
    match &el.m {
        Some(m) => Ok(m.clone()),
        None => gauss_bargmann_adjoint(el, el.basis.k_max, q),
    }
}

fn check_compatible<S: Scalar>(sym: &Symbol<S>, f: &FockElement<S>) -> Result<()> {
    let (bp, bf) = (&sym.phi.basis, &f.basis);
    if bp.n != bf.n || bp.lambda != bf.lambda || (sym.phi.t - f.t).abs() > fp(1e-12) {
        return Err(FockError::DimensionMismatch(
            "symbol and argument live on different spaces".into(),
        ));
    }
    Ok(())
}

/// Which computation path a convolution operator should take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvPath {
    /// Quadrature of the defining integral over C^{2n}.
    Integral,
    /// Operator-side product composed with the Gauss map.
    Algebraic,
}

fn integral_apply<S: Scalar>(
    sym: &Symbol<S>,
    f: &FockElement<S>,
    q: usize,
    reflected: bool,
) -> Result<FockElement<S>> {
    check_compatible(sym, f)?;
    let params = f.params();
    let mt = reproducing_constant(f.basis.n, f.basis.lambda, f.t);
    let grid = Arc::new(CGrid::build(f.basis.n, &f.form_hint, q, fp(0.15))?);
    let ff = f.evaluator();
    let pf = sym.phi.evaluator();
    let eval: Arc<dyn Fn(&[C<S>], &[C<S>]) -> C<S> + Send + Sync> =
        Arc::new(move |z: &[C<S>], w: &[C<S>]| {
            let s = grid.integrate(|a, b| {
                let za: Vec<C<S>> = z
                    .iter()
                    .zip(a.iter())
                    .map(|(zj, aj)| if reflected { *zj + aj.conj() } else { *zj - aj.conj() })
                    .collect();
                let wb: Vec<C<S>> = w
                    .iter()
                    .zip(b.iter())
                    .map(|(wj, bj)| if reflected { *wj + bj.conj() } else { *wj - bj.conj() })
                    .collect();
                ff(a, b)
                    * pf(&za, &wb)
                    * fock_kernel(&params, z, w, a, b)
                    * cr(fock_weight(&params, a, b))
            });
            s * cr(mt)
        });
    Ok(FockElement::from_parts(
        f.basis.clone(),
        f.t,
        None,
        eval,
        f.form_hint.clone(),
    ))
}

/// The convolution operator S of a symbol. The integral path quadratures
///   (S F)(z, w) = m_t Int F(a, b) phi(z - conj(a), w - conj(b))
///                 K((z, w), (a, b)) weight(a, b) da db,
/// the algebraic path computes G(N M) from the operator sides N, M of the
/// argument and the symbol.
pub fn apply_s<S: Scalar>(
    sym: &Symbol<S>,
    f: &FockElement<S>,
    path: ConvPath,
    q: usize,
) -> Result<FockElement<S>> {
    match path {
        ConvPath::Integral => integral_apply(sym, f, q, false),
        ConvPath::Algebraic => {
            check_compatible(sym, f)?;
            let nf = operator_of(f, q)?;
            if nf.dim() != sym.m.dim() {
                return Err(FockError::DimensionMismatch(
                    "operator sides have different truncation levels".into(),
                ));
            }
            gauss_bargmann(&f.basis, f.t, &nf.dot(&sym.m))
        }
    }
}

/// The reflected family S-tilde. The integral path quadratures the same
/// kernel with the symbol argument reflected to (z + conj(a), w + conj(b));
/// the algebraic path conjugates by the dilation U, using the identity
/// S-tilde of psi = U* . S of (U psi) . U.
pub fn apply_s_tilde<S: Scalar>(
    sym: &Symbol<S>,
    f: &FockElement<S>,
    path: ConvPath,
    q: usize,
) -> Result<FockElement<S>> {
    match path {
        ConvPath::Integral => integral_apply(sym, f, q, true),
        ConvPath::Algebraic => {
            check_compatible(sym, f)?;
            let u_phi = apply_u(&sym.phi);
            let u_sym = Symbol::from_element(&u_phi, u_phi.basis.k_max, q)?;
            let sf = apply_s(&u_sym, &apply_u(f), ConvPath::Algebraic, q)?;
            Ok(apply_u_inv(&sf))
        }
    }
}

/// Convolution product on the Fock space: F * phi = G(N M) with N, M the
/// operator sides. Associative, non-commutative; the symbol with M = I is a
/// right identity.
pub fn algebra_convolve<S: Scalar>(
    f: &FockElement<S>,
    sym: &Symbol<S>,
    q: usize,
) -> Result<FockElement<S>> {
    apply_s(sym, f, ConvPath::Algebraic, q)
}

/// Truncated multiplier norms of a symbol across cutoff levels: at each
/// level K the operator side is recovered through the guarded adjoint on a
/// fresh basis of that cutoff and its spectral norm recorded. Levels where
/// the guard fires are reported in `skipped` rather than failing the run.
pub fn boundedness_diagnostic<S: Scalar>(
    phi: &FockElement<S>,
    k_list: &[usize],
    q: usize,
) -> Result<NormTrace<S>> {
    if k_list.is_empty() || k_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FockError::InvalidParameter(
            "cutoff levels must be nonempty and strictly increasing".into(),
        ));
    }
    let mut levels = Vec::new();
    let mut norms = Vec::new();
    let mut skipped = Vec::new();
    for &k in k_list {
        let basis_k = HermiteBasis::new(phi.basis.n, k, phi.basis.lambda)?;
        let el = phi.with_basis(&basis_k)?;
        match gauss_bargmann_adjoint(&el, k, q) {
            Ok(mk) => {
                levels.push(k);
                norms.push(operator_norm(&mk));
            }
            Err(FockError::AdjointGuard { .. }) => skipped.push(k),
            Err(e) => return Err(e),
        }
    }
    let verdict = verdict_for(&norms);
    Ok(NormTrace {
        levels,
        norms,
        skipped,
        verdict,
    })
}

const CIRCLE_POINTS: usize = 64;

fn circle_thetas<S: Scalar>() -> Vec<S> {
    let step = fp::<S>(2.0) * fp::<S>(std::f64::consts::PI) / fu::<S>(CIRCLE_POINTS);
    (0..CIRCLE_POINTS).map(|j| fu::<S>(j) * step).collect()
}

/// The circle action sigma_theta (z, w) = (cos z - sin w, sin z + cos w)
/// applied componentwise; `inverse` applies sigma_{-theta}.
fn rotate_point<S: Scalar>(
    theta: S,
    z: &[C<S>],
    w: &[C<S>],
    inverse: bool,
) -> (Vec<C<S>>, Vec<C<S>>) {
    let (c, s) = (theta.cos(), theta.sin());
    let s = if inverse { -s } else { s };
    let zr: Vec<C<S>> = z
        .iter()
        .zip(w.iter())
        .map(|(zj, wj)| *zj * cr(c) - *wj * cr(s))
        .collect();
    let wr: Vec<C<S>> = z
        .iter()
        .zip(w.iter())
        .map(|(zj, wj)| *zj * cr(s) + *wj * cr(c))
        .collect();
    (zr, wr)
}

/// Conjugation of an operator by the circle rotation sigma_theta: entries
/// pick up exp(i sgn(lambda) theta (deg r - deg s)). This is the operator
/// side of F -> F(sigma_{-theta} (z, w)) under the Gauss map.
pub fn rotate_operator<S: Scalar>(basis: &HermiteBasis<S>, theta: S, m: &CMatrix<S>) -> CMatrix<S> {
    let sgn = if basis.lambda > S::zero() {
        S::one()
    } else {
        -S::one()
    };
    let d = basis.dim();
    Array2::from_shape_fn((d, d), |(r, s)| {
        let dr = basis.indices()[r].degree() as f64;
        let ds = basis.indices()[s].degree() as f64;
        let ph = sgn * theta * fp::<S>(dr - ds);
        m[(r, s)] * C::new(ph.cos(), ph.sin())
    })
}

fn require_n1<S: Scalar>(el: &FockElement<S>) -> Result<()> {
    if el.basis.n != 1 {
        return Err(FockError::Unsupported(
            "circle averaging is implemented for n = 1 only".into(),
        ));
    }
    Ok(())
}

/// Average of a Fock element over the circle action, by the 64-point
/// trapezoidal rule (exact on the isotypic bandwidths reachable at these
/// cutoffs). When the element carries an operator, the averaged operator is
/// its compression onto the degree blocks.
pub fn radialize<S: Scalar>(phi: &FockElement<S>) -> Result<FockElement<S>> {
    require_n1(phi)?;
    let inner = phi.evaluator();
    let thetas = circle_thetas::<S>();
    let eval: Arc<dyn Fn(&[C<S>], &[C<S>]) -> C<S> + Send + Sync> =
        Arc::new(move |z: &[C<S>], w: &[C<S>]| {
            let mut acc = C::new(S::zero(), S::zero());
            for &th in &thetas {
                let (zr, wr) = rotate_point(th, z, w, true);
                acc += inner(&zr, &wr);
            }
            acc / cr(fu(CIRCLE_POINTS))
        });
    let m = phi.m.as_ref().map(|m| {
        let b = &phi.basis;
        Array2::from_shape_fn(m.dim(), |(r, s)| {
            if b.indices()[r].degree() == b.indices()[s].degree() {
                m[(r, s)]
            } else {
                C::new(S::zero(), S::zero())
            }
        })
    });
    Ok(FockElement::from_parts(
        phi.basis.clone(),
        phi.t,
        m,
        eval,
        phi.form_hint.clone(),
    ))
}

/// Degree offset (col - row) kept by the (p, q) component of the circle
/// action, for the convention chi_{(p,0)}(theta) = e^{i p theta},
/// chi_{(0,q)}(theta) = e^{-i q theta}; the orientation flips with the sign
/// of lambda.
fn delta_band<S: Scalar>(lambda: S, delta: &DeltaIndex) -> i64 {
    let band = if delta.q == 0 {
        delta.p as i64
    } else {
        -(delta.q as i64)
    };
    if lambda > S::zero() {
        band
    } else {
        -band
    }
}

/// Isotypic component of a Fock element under the circle action: the
/// Fourier coefficient of theta -> R_theta phi against the character of
/// (p, q), by the same 64-point rule. n = 1 only, and the bigraded type
/// must be degenerate (p q = 0). When the element carries an operator the
/// component keeps exactly one degree offset of its entries.
pub fn delta_component<S: Scalar>(
    phi: &FockElement<S>,
    delta: &DeltaIndex,
) -> Result<FockElement<S>> {
    require_n1(phi)?;
    if delta.p > 0 && delta.q > 0 {
        return Err(FockError::Unsupported(
            "n = 1 carries only the degenerate types (p, 0) and (0, q)".into(),
        ));
    }
    let inner = phi.evaluator();
    let thetas = circle_thetas::<S>();
    let freq = if delta.q == 0 {
        fp::<S>(delta.p as f64)
    } else {
        -fp::<S>(delta.q as f64)
    };
    let eval: Arc<dyn Fn(&[C<S>], &[C<S>]) -> C<S> + Send + Sync> =
        Arc::new(move |z: &[C<S>], w: &[C<S>]| {
            let mut acc = C::new(S::zero(), S::zero());
            for &th in &thetas {
                let (zr, wr) = rotate_point(th, z, w, true);
                let ph = freq * th;
                acc += inner(&zr, &wr) * C::new(ph.cos(), ph.sin());
            }
            acc / cr(fu(CIRCLE_POINTS))
        });
    let band = delta_band(phi.basis.lambda, delta);
    let m = phi.m.as_ref().map(|m| {
        let b = &phi.basis;
        Array2::from_shape_fn(m.dim(), |(r, s)| {
            let dr = b.indices()[r].degree() as i64;
            let ds = b.indices()[s].degree() as i64;
            if ds - dr == band {
                m[(r, s)]
            } else {
                C::new(S::zero(), S::zero())
            }
        })
    });
    Ok(FockElement::from_parts(
        phi.basis.clone(),
        phi.t,
        m,
        eval,
        phi.form_hint.clone(),
    ))
}

/// Graded inner product on operators:
///   (T, S)_k = [k! (n-1)! / (k+n-1)!] sum_{|alpha| = k} (T Phi_a, S Phi_a),
/// conjugate-linear in S.
pub fn ok_inner<S: Scalar>(
    basis: &HermiteBasis<S>,
    t: &CMatrix<S>,
    s: &CMatrix<S>,
    k: usize,
) -> Result<C<S>> {
    if k > basis.k_max {
        return Err(FockError::InvalidParameter(format!(
            "degree {k} exceeds the basis cutoff {}",
            basis.k_max
        )));
    }
    let d = basis.dim();
    if t.dim() != (d, d) || s.dim() != (d, d) {
        return Err(FockError::DimensionMismatch(
            "operators must match the basis dimension".into(),
        ));
    }
    // k!(n-1)!/(k+n-1)! = prod_{j=1}^{n-1} j/(k+j), the reciprocal of the
    // degree-k multiplicity.
    let mut weight = S::one();
    for j in 1..basis.n {
        weight = weight * fu::<S>(j) / fu::<S>(k + j);
    }
    let mut acc = C::new(S::zero(), S::zero());
    for col in basis.degree_block(k) {
        for row in 0..d {
            acc += t[(row, col)] * s[(row, col)].conj();
        }
    }
    Ok(acc * cr(weight))
}

/// Normalizer of the graded ladder at level k: the square root of
/// (W, W)_k with W the monomial multiplier of the type. Zero exactly when
/// the annihilation power of W empties the level.
pub fn geller_constant<S: Scalar>(
    basis: &HermiteBasis<S>,
    k: usize,
    delta: &DeltaIndex,
) -> Result<S> {
    let w = weyl_correspondence_monomial(basis, delta.p, delta.q)?;
    let v = ok_inner(basis, &w, &w, k)?.re;
    Ok(v.max(S::zero()).sqrt())
}

/// A ladder element W P_k scaled to unit Hilbert-Schmidt norm, which
/// divides by the graded normalizer times the square root of the level
/// multiplicity. `defined` is false when the level is emptied (k below the
/// annihilation power), in which case the operator is zero.
#[derive(Clone, Debug)]
pub struct GellerLevel<S: Scalar> {
    pub op: CMatrix<S>,
    pub defined: bool,
}

pub fn geller_basis<S: Scalar>(
    basis: &HermiteBasis<S>,
    k: usize,
    delta: &DeltaIndex,
) -> Result<GellerLevel<S>> {
    let w = weyl_correspondence_monomial(basis, delta.p, delta.q)?;
    let pk = spectral_projection(basis, k)?;
    let c = geller_constant(basis, k, delta)?;
    if c <= S::zero() {
        return Ok(GellerLevel {
            op: basis.zeros(),
            defined: false,
        });
    }
    let mult = fu::<S>(basis.degree_block(k).len());
    let scale = (c * mult.sqrt()).recip();
    Ok(GellerLevel {
        op: w.dot(&pk).mapv(|x| x * cr(scale)),
        defined: true,
    })
}

/// Projection of an operator onto the multiplier family of one bigraded
/// type: sum over admissible levels of C_k^{-2} (T, W)_k P_k. Levels whose
/// normalizer vanishes are listed in `skipped_low`.
#[derive(Clone, Debug)]
pub struct ProjectedMultiplier<S: Scalar> {
    pub op: CMatrix<S>,
    pub coefficients: Vec<(usize, C<S>)>,
    pub skipped_low: Vec<usize>,
}

pub fn t_j_delta<S: Scalar>(
    basis: &HermiteBasis<S>,
    t: &CMatrix<S>,
    delta: &DeltaIndex,
) -> Result<ProjectedMultiplier<S>> {
    let w = weyl_correspondence_monomial(basis, delta.p, delta.q)?;
    let mut op = basis.zeros();
    let mut coefficients = Vec::new();
    let mut skipped_low = Vec::new();
    for k in 0..=basis.k_max {
        let c = geller_constant(basis, k, delta)?;
        if c <= S::zero() {
            skipped_low.push(k);
            continue;
        }
        let coef = ok_inner(basis, t, &w, k)? / cr(c * c);
        let pk = spectral_projection(basis, k)?;
        op = op + pk.mapv(|x| x * coef);
        coefficients.push((k, coef));
    }
    Ok(ProjectedMultiplier {
        op,
        coefficients,
        skipped_low,
    })
}

/// Spectral norms of W H^{-(p+q)/2} across cutoffs 6, 8, 10, 12, with W the
/// monomial multiplier of the type.
#[derive(Clone, Debug)]
pub struct WeightBound<S: Scalar> {
    pub levels: Vec<usize>,
    pub norms: Vec<S>,
    pub max: S,
}

pub fn weight_bound_check<S: Scalar>(
    n: usize,
    lambda: S,
    delta: &DeltaIndex,
) -> Result<WeightBound<S>> {
    let levels = vec![6usize, 8, 10, 12];
    let power = -(delta.weight() as f64) / 2.0;
    let mut norms = Vec::new();
    for &k in &levels {
        let basis = HermiteBasis::new(n, k, lambda)?;
        let w = weyl_correspondence_monomial(&basis, delta.p, delta.q)?;
        let hpow = crate::spectral::spectral_multiplier(&basis, |e| e.powf(fp(power)));
        norms.push(operator_norm(&w.dot(&hpow)));
    }
    let max = norms.iter().cloned().fold(S::zero(), S::max);
    Ok(WeightBound { levels, norms, max })
}

/// Outcome of the two-sided boundedness experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UncertaintyVerdict {
    /// Both multiplier traces plateau (the symbol is effectively constant
    /// or radial).
    BothPlateau,
    /// Exactly one trace plateaus while the other fails to.
    Dichotomy,
    Inconclusive,
}

/// Report of the uncertainty experiment: the two norm traces, the combined
/// verdict, and the pointwise / spectral witnesses of the heat-envelope
/// bound.
#[derive(Clone, Debug)]
pub struct UncertaintyReport<S: Scalar> {
    pub phi_trace: NormTrace<S>,
    pub u_trace: NormTrace<S>,
    pub verdict: UncertaintyVerdict,
    pub norm_bound: S,
    pub ratio_max: S,
    pub pointwise_ok: bool,
    pub spectral_ok: Option<bool>,
    /// Norm of the transformed function's multiplier, present when the
    /// spectral witness ran; it is the constant that witness uses.
    pub transformed_norm: Option<S>,
}

/// Runs the boundedness diagnostic on phi = G(M) and on its dilation U phi,
/// then checks the heat-envelope witnesses: the pointwise ratio
/// |g(x, u)| / p_1(x, u) with g the convolution of U_lambda f against
/// p_{1/2} (f the function with multiplier e^{-H/2} M), and, when M
/// commutes with H, the diagonal inequality pi(g)* pi(g) <= C^2 e^{-2H} on
/// the low-degree block, with C the multiplier norm of the transformed
/// function.
pub fn uncertainty_experiment<S: Scalar>(
    basis: &HermiteBasis<S>,
    m: &CMatrix<S>,
    k_list: &[usize],
    q: usize,
) -> Result<UncertaintyReport<S>> {
    let half = fp::<S>(0.5);
    let phi = gauss_bargmann(basis, half, m)?;
    let phi_trace = boundedness_diagnostic(&phi, k_list, q)?;
    let u_trace = boundedness_diagnostic(&apply_u(&phi), k_list, q)?;
    let plateau = |t: &NormTrace<S>| t.verdict == TraceVerdict::BoundedConsistent;
    let verdict = match (plateau(&phi_trace), plateau(&u_trace)) {
        (true, true) => UncertaintyVerdict::BothPlateau,
        (true, false) | (false, true) => UncertaintyVerdict::Dichotomy,
        (false, false) => UncertaintyVerdict::Inconclusive,
    };

    let n = basis.n;
    let lambda = basis.lambda;
    let cg = trace_constant(n, lambda);
    let eh = hermite_semigroup(basis, half);
    let em = eh.dot(m);
    let b2 = basis.clone();
    let grid = weyl_grid(n, basis.k_max, lambda, q);
    let f_grid = GridFunction::from_fn(grid, move |xu| {
        let p = PhasePoint::from_flat(xu).neg();
        let pi = pi_matrix(&b2, &p).expect("grid point dimension matches basis");
        trace_prod(&pi, &em) * cr(cg)
    });
    let uf = u_lambda(lambda, half, &f_grid)?;
    let tu = weyl_transform(basis, &uf)?;
    let pg = tu.dot(&eh);

    let params1 = KernelParams::new(lambda, S::one(), n)?;
    let norm_bound = operator_norm(m);
    let mut ratio_max = S::zero();
    for ix in 0..5 {
        for iu in 0..5 {
            let mut xu = vec![S::zero(); 2 * n];
            xu[0] = fp::<S>(ix as f64 - 2.0);
            xu[n] = fp::<S>(iu as f64 - 2.0);
            let p = PhasePoint::from_flat(&xu).neg();
            let pi = pi_matrix(basis, &p)?;
            let g = trace_prod(&pi, &pg) * cr(cg);
            let denom = heat_kernel_real(&params1, &xu).re;
            ratio_max = ratio_max.max(g.norm() / denom);
        }
    }
    let pointwise_ok = ratio_max <= norm_bound * fp(1.1);

    let h = hermite_hamiltonian(basis);
    let comm = one_norm(&(h.dot(m) - m.dot(&h)));
    let commutes = comm <= fp::<S>(1e-10) * one_norm(&h) * one_norm(m).max(S::one());
    let (spectral_ok, transformed_norm) = if commutes {
        // The envelope constant belongs to the transformed function's own
        // multiplier, recovered by peeling one heat factor off its
        // transform. It matches the input norm only when the multiplier is
        // scalar.
        let m2 = hermite_semigroup(basis, -half).dot(&tu);
        let c = operator_norm(&m2) * fp::<S>(1.1);
        let d = adjoint(&pg).dot(&pg);
        let slack = fp::<S>(1.01);
        let mut ok = true;
        for r in 0..basis.dim() {
            if basis.indices()[r].degree() > 5.min(basis.k_max) {
                continue;
            }
            let er = basis.energy(r);
            let bound = c * c * (-fp::<S>(2.0) * er).exp() * slack;
            if d[(r, r)].re > bound {
                ok = false;
            }
        }
        (Some(ok), Some(operator_norm(&m2)))
    } else {
        (None, None)
    };

    Ok(UncertaintyReport {
        phi_trace,
        u_trace,
        verdict,
        norm_bound,
        ratio_max,
        pointwise_ok,
        spectral_ok,
        transformed_norm,
    })
}
