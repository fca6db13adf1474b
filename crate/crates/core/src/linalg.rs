//! Dense complex matrix helpers: exponential, linear solves, norms.
//!
//! Matrices here are small (dimension a few hundred at most), so everything
//! is direct and allocation-friendly rather than clever.

use crate::basis::CMatrix;
use crate::error::{FockError, Result};
use crate::scalar::{cr, fp, Scalar, C};
use ndarray::Array2;

/// Conjugate transpose.
pub fn adjoint<S: Scalar>(a: &CMatrix<S>) -> CMatrix<S> {
    let (r, c) = a.dim();
    Array2::from_shape_fn((c, r), |(i, j)| a[(j, i)].conj())
}

pub fn trace<S: Scalar>(a: &CMatrix<S>) -> C<S> {
    let n = a.nrows().min(a.ncols());
    let mut t = C::new(S::zero(), S::zero());
    for i in 0..n {
        t += a[(i, i)];
    }
    t
}

/// tr(A B) without forming the product.
pub fn trace_prod<S: Scalar>(a: &CMatrix<S>, b: &CMatrix<S>) -> C<S> {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut t = C::new(S::zero(), S::zero());
    for r in 0..a.nrows() {
        for s in 0..a.ncols() {
            t += a[(r, s)] * b[(s, r)];
        }
    }
    t
}

/// Hilbert-Schmidt inner product tr(A^* B), conjugate-linear in A.
pub fn hs_inner<S: Scalar>(a: &CMatrix<S>, b: &CMatrix<S>) -> C<S> {
    debug_assert_eq!(a.dim(), b.dim());
    let mut acc = C::new(S::zero(), S::zero());
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * *y;
    }
    acc
}

pub fn hs_norm<S: Scalar>(a: &CMatrix<S>) -> S {
    let mut acc = S::zero();
    for x in a.iter() {
        acc = acc + x.norm_sqr();
    }
    acc.sqrt()
}

/// Maximum absolute column sum.
pub fn one_norm<S: Scalar>(a: &CMatrix<S>) -> S {
    let mut best = S::zero();
    for j in 0..a.ncols() {
        let mut s = S::zero();
        for i in 0..a.nrows() {
            s = s + a[(i, j)].norm();
        }
        if s > best {
            best = s;
        }
    }
    best
}

/// Largest singular value by power iteration on A^* A.
///
/// The start vector is a fixed quasi-random direction, so results are
/// reproducible. Convergence to ~1e-13 relative change or 1000 sweeps;
/// multiplicity of the top singular value only slows this down, it does not
/// break the estimate.
pub fn operator_norm<S: Scalar>(a: &CMatrix<S>) -> S {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return S::zero();
    }
    let mut v: Vec<C<S>> = (0..n)
        .map(|i| {
            let t = fp::<S>(0.7) * fp::<S>(i as f64) + fp::<S>(0.3);
            C::new(t.cos(), (t + t).sin() * fp(0.5))
        })
        .collect();
    normalize(&mut v);
    let mut sigma2 = S::zero();
    for _ in 0..1000 {
        let av = matvec(a, &v);
        let mut bv = matvec_adjoint(a, &av);
        // Rayleigh quotient for A^*A at unit v is |Av|^2.
        let new_sigma2 = av.iter().map(|x| x.norm_sqr()).fold(S::zero(), |p, q| p + q);
        let nb = normalize(&mut bv);
        if nb == S::zero() {
            return S::zero();
        }
        v = bv;
        let done = (new_sigma2 - sigma2).abs() <= fp::<S>(1e-13) * new_sigma2.max(S::one());
        sigma2 = new_sigma2;
        if done {
            break;
        }
    }
    sigma2.sqrt()
}

fn matvec<S: Scalar>(a: &CMatrix<S>, v: &[C<S>]) -> Vec<C<S>> {
    let (r, c) = a.dim();
    debug_assert_eq!(c, v.len());
    let mut out = vec![C::new(S::zero(), S::zero()); r];
    for i in 0..r {
        let mut acc = C::new(S::zero(), S::zero());
        for j in 0..c {
            acc += a[(i, j)] * v[j];
        }
        out[i] = acc;
    }
    out
}

fn matvec_adjoint<S: Scalar>(a: &CMatrix<S>, v: &[C<S>]) -> Vec<C<S>> {
    let (r, c) = a.dim();
    debug_assert_eq!(r, v.len());
    let mut out = vec![C::new(S::zero(), S::zero()); c];
    for i in 0..r {
        for j in 0..c {
            out[j] += a[(i, j)].conj() * v[i];
        }
    }
    out
}

fn normalize<S: Scalar>(v: &mut [C<S>]) -> S {
    let n2 = v.iter().map(|x| x.norm_sqr()).fold(S::zero(), |p, q| p + q);
    let n = n2.sqrt();
    if n > S::zero() {
        for x in v.iter_mut() {
            *x /= cr(n);
        }
    }
    n
}

/// Solves A X = B by LU with partial pivoting. A must be square and
/// nonsingular to working precision.
pub fn solve<S: Scalar>(a: &CMatrix<S>, b: &CMatrix<S>) -> Result<CMatrix<S>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(FockError::DimensionMismatch(format!(
            "solve expects square A and matching B, got {:?} and {:?}",
            a.dim(),
            b.dim()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = x.ncols();
    for k in 0..n {
        let mut piv = k;
        let mut best = lu[(k, k)].norm();
        for i in k + 1..n {
            let c = lu[(i, k)].norm();
            if c > best {
                best = c;
                piv = i;
            }
        }
        if best == S::zero() || !best.is_finite() {
            return Err(FockError::Linalg(format!(
                "singular or non-finite pivot at column {k}"
            )));
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for j in 0..m {
                let t = x[(k, j)];
                x[(k, j)] = x[(piv, j)];
                x[(piv, j)] = t;
            }
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= f * t;
            }
            for j in 0..m {
                let t = x[(k, j)];
                x[(i, j)] -= f * t;
            }
        }
    }
    for k in (0..n).rev() {
        let d = lu[(k, k)];
        for j in 0..m {
            x[(k, j)] /= d;
        }
        for i in 0..k {
            let f = lu[(i, k)];
            for j in 0..m {
                let t = x[(k, j)];
                x[(i, j)] -= f * t;
            }
        }
    }
    Ok(x)
}

/// Matrix exponential by Pade(13) with scaling and squaring.
///
/// Accurate to close to unit roundoff for the matrix sizes used here; the
/// crate-wide contract is agreement with dense spectral references to 1e-12
/// for dimensions up to a few hundred.
pub fn expm<S: Scalar>(a: &CMatrix<S>) -> Result<CMatrix<S>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(FockError::DimensionMismatch(format!(
            "expm expects a square matrix, got {:?}",
            a.dim()
        )));
    }
    if n == 0 {
        return Ok(a.clone());
    }
    let theta13 = fp::<S>(5.371920351148152);
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(FockError::Linalg("expm input has non-finite entries".into()));
    }
    let mut s = 0u32;
    if norm > theta13 {
        let ratio = (norm / theta13).log2().ceil();
        s = ratio.to_f64().map(|v| v.max(0.0) as u32).unwrap_or(0);
    }
    let scale = cr::<S>(fp::<S>(2.0).powi(-(s as i32)));
    let a_s: CMatrix<S> = a.mapv(|x| x * scale);

    let b: [S; 14] = [
        fp(64764752532480000.0),
        fp(32382376266240000.0),
        fp(7771770303897600.0),
        fp(1187353796428800.0),
        fp(129060195264000.0),
        fp(10559470521600.0),
        fp(670442572800.0),
        fp(33522128640.0),
        fp(1323241920.0),
        fp(40840800.0),
        fp(960960.0),
        fp(16380.0),
        fp(182.0),
        fp(1.0),
    ];

    let eye: CMatrix<S> = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            C::new(S::one(), S::zero())
        } else {
            C::new(S::zero(), S::zero())
        }
    });
    let a2 = a_s.dot(&a_s);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let w1 = a6.mapv(|x| x * cr(b[13])) + &a4.mapv(|x| x * cr(b[11])) + &a2.mapv(|x| x * cr(b[9]));
    let w2 = a6.mapv(|x| x * cr(b[7]))
        + &a4.mapv(|x| x * cr(b[5]))
        + &a2.mapv(|x| x * cr(b[3]))
        + &eye.mapv(|x| x * cr(b[1]));
    let u = a_s.dot(&(a6.dot(&w1) + &w2));

    let z1 = a6.mapv(|x| x * cr(b[12])) + &a4.mapv(|x| x * cr(b[10])) + &a2.mapv(|x| x * cr(b[8]));
    let v = a6.dot(&z1)
        + &a6.mapv(|x| x * cr(b[6]))
        + &a4.mapv(|x| x * cr(b[4]))
        + &a2.mapv(|x| x * cr(b[2]))
        + &eye.mapv(|x| x * cr(b[0]));

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut f = solve(&lhs, &rhs)?;
    for _ in 0..s {
        f = f.dot(&f);
    }
    Ok(f)
}
