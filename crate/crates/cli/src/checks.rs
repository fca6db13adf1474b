//! The verification suite: every identity the toolkit promises, run as a
//! named check at a configurable tolerance. Checks are independent and run
//! in parallel; report assembly is single-threaded and sorted by name.

use std::time::Instant;

use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;

use twisted_fock::basis::HermiteBasis;
use twisted_fock::conv::{
    algebra_convolve, apply_s, apply_s_tilde, delta_component, geller_basis, geller_constant,
    rho_translation, rotate_operator, weight_bound_check, ConvPath, DeltaIndex, Symbol,
};
use twisted_fock::fock::{
    apply_u_inv, bergman_norm_sq, fock_norm_sq, gauss_bargmann, gauss_bargmann_adjoint,
    natural_grid, reproduce_at, segal_bargmann, trace_constant, u_lambda,
};
use twisted_fock::kernels::{fock_kernel, heat_kernel_real, KernelParams};
use twisted_fock::linalg::{adjoint, hs_norm, trace_prod};
use twisted_fock::quad::gauss_hermite_grid;
use twisted_fock::spectral::{
    annihilation_matrix, creation_matrix, hermite_hamiltonian, hermite_semigroup,
    spectral_multiplier,
};
use twisted_fock::weyl::{
    pi_matrix, symplectic_fourier, twist_cocycle, twisted_convolution, twisted_translation,
    weyl_grid, weyl_transform, GridFunction, PhasePoint,
};
use twisted_fock::{Basis64, Matrix64, C64};

use crate::config::RunConfig;
use crate::presets::stream;
use crate::report::{Record, Report};

fn basis(n: usize, k: usize, lambda: f64) -> Basis64 {
    HermiteBasis::new(n, k, lambda).expect("check sizes are valid")
}

fn cpt(re: f64, im: f64) -> Vec<C64> {
    vec![C64::new(re, im)]
}

fn probes() -> Vec<(Vec<C64>, Vec<C64>)> {
    vec![
        (cpt(0.0, 0.0), cpt(0.0, 0.0)),
        (cpt(0.4, 0.1), cpt(-0.2, 0.3)),
        (cpt(-0.5, -0.3), cpt(0.6, 0.0)),
    ]
}

fn max_block_diff(a: &Matrix64, b: &Matrix64, block: usize) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..block {
        for s in 0..block {
            worst = worst.max((a[(r, s)] - b[(r, s)]).norm());
        }
    }
    worst
}

fn rand_banded(b: &Basis64, band: usize, rng: &mut impl Rng) -> Matrix64 {
    let d = b.dim();
    Array2::from_shape_fn((d, d), |(r, s)| {
        let dr = b.indices()[r].degree() as i64;
        let ds = b.indices()[s].degree() as i64;
        if (dr - ds).unsigned_abs() as usize <= band {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

type Check = fn(&RunConfig) -> Record;

/// The registry: every check, by name. `run_verify` executes all of them.
pub const CHECKS: &[(&str, Check)] = &[
    ("algebra-associative", algebra_associative),
    ("algebra-commutes", algebra_commutes),
    ("algebra-right-identity", algebra_right_identity),
    ("bargmann-convolution", bargmann_convolution),
    ("bargmann-unitary", bargmann_unitary),
    ("bilinear-invariance", bilinear_invariance),
    ("delta-equivariance", delta_equivariance),
    ("delta-u-commute", delta_u_commute),
    ("fock-kernel-limit", fock_kernel_limit),
    ("fock-reproducing", fock_reproducing),
    ("gauss-adjoint-roundtrip", gauss_adjoint_roundtrip),
    ("gauss-homomorphism", gauss_homomorphism),
    ("gauss-isometry", gauss_isometry),
    ("geller-gamma-ratio", geller_gamma_ratio),
    ("geller-orthonormal", geller_orthonormal),
    ("heat-semigroup", heat_semigroup_check),
    ("heat-weyl", heat_weyl),
    ("hermite-factorization", hermite_factorization),
    ("hermite-orthonormal", hermite_orthonormal),
    ("ladder-adjoint", ladder_adjoint),
    ("laguerre-ground", laguerre_ground),
    ("metaplectic-rotation", metaplectic_rotation),
    ("rep-composition", rep_composition),
    ("rep-unitary", rep_unitary),
    ("rho-norm-scaling", rho_norm_scaling),
    ("s-paths-agree", s_paths_agree),
    ("s-tilde-paths", s_tilde_paths),
    ("semigroup-diagonal", semigroup_diagonal),
    ("symbol-recovery", symbol_recovery),
    ("symplectic-involution", symplectic_involution),
    ("tau-intertwine", tau_intertwine),
    ("twisted-homomorphism", twisted_homomorphism),
    ("twisted-translation-conv", twisted_translation_conv),
    ("u-fixes-heat", u_fixes_heat),
    ("u-intertwine", u_intertwine),
    ("weight-bound-plateau", weight_bound_plateau),
    ("weight-bound-root2", weight_bound_root2),
    ("weight-bound-unit", weight_bound_unit),
    ("weyl-plancherel", weyl_plancherel),
];

pub fn run_verify(cfg: &RunConfig) -> Report {
    let mut report = Report::new("verify", cfg);
    for r in run_subset(cfg, |_| true) {
        report.push(r);
    }
    report.finish();
    report
}

/// Runs every registered check whose name the filter accepts, in parallel,
/// timing each one.
pub fn run_subset(cfg: &RunConfig, keep: impl Fn(&str) -> bool + Sync) -> Vec<Record> {
    CHECKS
        .par_iter()
        .filter(|(name, _)| keep(name))
        .map(|(_, f)| {
            let start = Instant::now();
            let mut r = f(cfg);
            r.wall_ms = start.elapsed().as_millis() as u64;
            r
        })
        .collect()
}

fn hermite_orthonormal(cfg: &RunConfig) -> Record {
    let b = basis(1, 12, cfg.lambda);
    let grid = gauss_hermite_grid::<f64>(cfg.lambda.abs(), 1, 64);
    let d = b.dim();
    let mut gram = b.zeros();
    for (x, wt) in grid.points() {
        let vals: Vec<f64> = (0..d)
            .map(|r| twisted_fock::hermite::hermite_eval(b.index(r), b.lambda, &x))
            .collect();
        for r in 0..d {
            for s in 0..d {
                gram[(r, s)] += C64::new(vals[r] * vals[s] * wt, 0.0);
            }
        }
    }
    let worst = max_block_diff(&gram, &b.eye(), d);
    Record::below(
        "hermite-orthonormal",
        "int h_a h_b = delta_ab",
        worst,
        cfg.tol("hermite-orthonormal", 1e-10),
    )
}

fn hermite_factorization(cfg: &RunConfig) -> Record {
    let b = basis(2, 6, cfg.lambda);
    let h = hermite_hamiltonian(&b);
    let mut sum = b.zeros();
    for j in 0..2 {
        let c = creation_matrix(&b, j).unwrap();
        let a = annihilation_matrix(&b, j).unwrap();
        sum = sum + a.dot(&c) + c.dot(&a);
    }
    let interior = b.degree_block(5).end;
    let mut worst = 0.0f64;
    for s in 0..interior {
        for r in 0..b.dim() {
            worst = worst.max((sum[(r, s)] * C64::new(0.5, 0.0) - h[(r, s)]).norm());
        }
    }
    Record::below(
        "hermite-factorization",
        "H = (1/2) sum_j (A_j A_j* + A_j* A_j)",
        worst,
        cfg.tol("hermite-factorization", 1e-12),
    )
}

fn ladder_adjoint(cfg: &RunConfig) -> Record {
    let b = basis(2, 6, cfg.lambda);
    let interior = b.degree_block(5).end;
    let mut worst = 0.0f64;
    for j in 0..2 {
        let c = creation_matrix(&b, j).unwrap();
        let at = adjoint(&annihilation_matrix(&b, j).unwrap());
        worst = worst.max(max_block_diff(&c, &at, interior));
    }
    Record::below(
        "ladder-adjoint",
        "A_j* is the adjoint of A_j",
        worst,
        cfg.tol("ladder-adjoint", 1e-14),
    )
}

fn semigroup_diagonal(cfg: &RunConfig) -> Record {
    let b = basis(1, 16, cfg.lambda);
    let s = hermite_semigroup(&b, cfg.t);
    let mut worst = 0.0f64;
    for r in 0..b.dim() {
        let expect = (-cfg.t * b.energy(r)).exp();
        worst = worst.max((s[(r, r)].re - expect).abs().max(s[(r, r)].im.abs()));
    }
    Record::below(
        "semigroup-diagonal",
        "e^{-tH} phi_a = e^{-t(2|a|+n)|lambda|} phi_a",
        worst,
        cfg.tol("semigroup-diagonal", 1e-12),
    )
}

fn rep_unitary(cfg: &RunConfig) -> Record {
    // Interior block of W*W is the identity; cutoff rows lose mass, and the
    // leakage grows with the probe radius, so probes stay small.
    let b = basis(1, 16, cfg.lambda);
    let mut worst = 0.0f64;
    for (x, u) in [(0.3, 0.2), (-0.2, 0.25), (0.15, -0.35)] {
        let w = pi_matrix(&b, &PhasePoint::from_real(&[x], &[u])).unwrap();
        let prod = adjoint(&w).dot(&w);
        worst = worst.max(max_block_diff(&prod, &b.eye(), 10));
    }
    Record::below(
        "rep-unitary",
        "pi(x,u)* pi(x,u) = id",
        worst,
        cfg.tol("rep-unitary", 1e-9),
    )
}

fn rep_composition(cfg: &RunConfig) -> Record {
    let b = basis(1, 20, cfg.lambda);
    let p = PhasePoint::from_real(&[0.2], &[-0.15]);
    let q = PhasePoint::from_real(&[-0.1], &[0.25]);
    let lhs = pi_matrix(&b, &p).unwrap().dot(&pi_matrix(&b, &q).unwrap());
    let sum = PhasePoint::from_real(&[0.1], &[0.1]);
    let phase = twist_cocycle(cfg.lambda, &[0.2, -0.15], &[-0.1, 0.25]).conj();
    let rhs = pi_matrix(&b, &sum).unwrap().mapv(|e| e * phase);
    let worst = max_block_diff(&lhs, &rhs, 8);
    Record::below(
        "rep-composition",
        "pi(p) pi(q) = cocycle(p,q) pi(p+q)",
        worst,
        cfg.tol("rep-composition", 1e-8),
    )
}

fn weyl_plancherel(cfg: &RunConfig) -> Record {
    let b = basis(1, 16, cfg.lambda);
    let cg = trace_constant(1, cfg.lambda);
    let rate = cfg.lambda.abs() / 4.0;
    let polys: [fn(f64, f64) -> f64; 5] = [
        |_, _| 1.0,
        |x, _| 1.0 + 0.5 * x,
        |x, u| x * u - 0.2,
        |x, u| 1.0 + 0.3 * x - 0.2 * u + 0.1 * x * u * u,
        |x, u| x * x - u,
    ];
    let mut worst = 0.0f64;
    for p in polys {
        let grid = weyl_grid(1, 16, cfg.lambda, cfg.q.min(64));
        let f = GridFunction::from_fn(grid, move |xu| {
            C64::new(p(xu[0], xu[1]) * (-rate * (xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.0)
        });
        let l2 = f.l2_norm().powi(2);
        let hs = hs_norm(&weyl_transform(&b, &f).unwrap()).powi(2);
        worst = worst.max((l2 - cg * hs).abs() / l2);
    }
    Record::below(
        "weyl-plancherel",
        "|f|_2^2 = (|lambda|/2pi)^n |W(f)|_HS^2",
        worst,
        cfg.tol("weyl-plancherel", 1e-6),
    )
}

fn twisted_homomorphism(cfg: &RunConfig) -> Record {
    let b = basis(1, 18, cfg.lambda);
    let grid = weyl_grid(1, 18, cfg.lambda, cfg.q.min(64));
    let f = GridFunction::from_fn(grid.clone(), |xu| {
        C64::new((-0.6 * (xu[0] * xu[0] + xu[1] * xu[1])).exp() * (1.0 + 0.3 * xu[0]), 0.0)
    });
    let g = GridFunction::from_fn(grid, |xu| {
        C64::new(
            (-0.8 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(),
            0.2 * xu[1] * (-0.5 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(),
        )
    });
    let conv = twisted_convolution(cfg.lambda, &f, &g).unwrap();
    let lhs = weyl_transform(&b, &conv).unwrap();
    let rhs = weyl_transform(&b, &f)
        .unwrap()
        .dot(&weyl_transform(&b, &g).unwrap());
    let worst = max_block_diff(&lhs, &rhs, b.degree_block(8).end);
    Record::below(
        "twisted-homomorphism",
        "W(f *_l g) = W(f) W(g)",
        worst,
        cfg.tol("twisted-homomorphism", 1e-5),
    )
}

fn tau_intertwine(cfg: &RunConfig) -> Record {
    let b = basis(1, 18, cfg.lambda);
    let grid = weyl_grid(1, 18, cfg.lambda, cfg.q.min(64));
    let f = GridFunction::from_fn(grid, |xu| {
        C64::new((-0.7 * (xu[0] * xu[0] + xu[1] * xu[1])).exp() * (1.0 - 0.2 * xu[1]), 0.0)
    });
    let p = PhasePoint::from_real(&[0.3], &[0.4]);
    let shifted = twisted_translation(cfg.lambda, &p, &f).unwrap();
    let lhs = weyl_transform(&b, &shifted).unwrap();
    let rhs = pi_matrix(&b, &p).unwrap().dot(&weyl_transform(&b, &f).unwrap());
    let worst = max_block_diff(&lhs, &rhs, b.degree_block(8).end);
    Record::below(
        "tau-intertwine",
        "W(tau(p) f) = pi(p) W(f)",
        worst,
        cfg.tol("tau-intertwine", 1e-6),
    )
}

fn twisted_translation_conv(cfg: &RunConfig) -> Record {
    let grid = weyl_grid(1, 16, cfg.lambda, 48);
    let f = GridFunction::from_fn(grid.clone(), |xu| {
        C64::new((-0.5 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.0)
    });
    let g = GridFunction::from_fn(grid, |xu| {
        C64::new((1.0 + 0.4 * xu[0]) * (-0.9 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.0)
    });
    let p = PhasePoint::from_real(&[-0.2], &[0.35]);
    let lhs = twisted_translation(
        cfg.lambda,
        &p,
        &twisted_convolution(cfg.lambda, &f, &g).unwrap(),
    )
    .unwrap();
    let rhs = twisted_convolution(
        cfg.lambda,
        &twisted_translation(cfg.lambda, &p, &f).unwrap(),
        &g,
    )
    .unwrap();
    let mut worst = 0.0f64;
    for probe in [[0.0, 0.0], [0.4, -0.6], [-0.3, 0.2]] {
        worst = worst.max((lhs.eval_at(&probe) - rhs.eval_at(&probe)).norm());
    }
    Record::below(
        "twisted-translation-conv",
        "tau(p)(f *_l g) = (tau(p) f) *_l g",
        worst,
        cfg.tol("twisted-translation-conv", 1e-6),
    )
}

fn symplectic_involution(cfg: &RunConfig) -> Record {
    let grid = gauss_hermite_grid::<f64>(0.5, 2, 48);
    let f = GridFunction::from_fn(grid, |xu| {
        C64::new((1.0 + 0.5 * xu[0]) * (-(xu[0] * xu[0] + xu[1] * xu[1]) / 2.0).exp(), 0.0)
    });
    let ff = symplectic_fourier(cfg.lambda, &symplectic_fourier(cfg.lambda, &f).unwrap()).unwrap();
    let scale = (2.0 / cfg.lambda).powi(2);
    let mut worst = 0.0f64;
    for probe in [[0.3, 0.1], [-0.6, 0.4]] {
        worst = worst.max((ff.eval_at(&probe) - f.eval_at(&probe).scale(scale)).norm());
    }
    Record::below(
        "symplectic-involution",
        "F_l^2 = (2/lambda)^{2n} id",
        worst,
        cfg.tol("symplectic-involution", 1e-6),
    )
}

fn heat_semigroup_check(cfg: &RunConfig) -> Record {
    let grid = weyl_grid(1, 20, cfg.lambda, cfg.q.min(64));
    let p1 = KernelParams::new(cfg.lambda, 0.4, 1).unwrap();
    let p2 = KernelParams::new(cfg.lambda, 0.7, 1).unwrap();
    let p3 = KernelParams::new(cfg.lambda, 1.1, 1).unwrap();
    let f = GridFunction::from_fn(grid.clone(), move |xu| heat_kernel_real(&p1, xu));
    let g = GridFunction::from_fn(grid, move |xu| heat_kernel_real(&p2, xu));
    let conv = twisted_convolution(cfg.lambda, &f, &g).unwrap();
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let probe = [-1.0 + 0.5 * i as f64, -1.0 + 0.5 * j as f64];
            worst = worst.max((conv.eval_at(&probe) - heat_kernel_real(&p3, &probe)).norm());
        }
    }
    Record::below(
        "heat-semigroup",
        "p_t *_l p_s = p_{t+s}",
        worst,
        cfg.tol("heat-semigroup", 1e-6),
    )
}

fn heat_weyl(cfg: &RunConfig) -> Record {
    let b = basis(1, 16, cfg.lambda);
    let params = KernelParams::new(cfg.lambda, cfg.t, 1).unwrap();
    let grid = weyl_grid(1, 16, cfg.lambda, cfg.q.min(64));
    let f = GridFunction::from_fn(grid, move |xu| heat_kernel_real(&params, xu));
    let w = weyl_transform(&b, &f).unwrap();
    let worst = max_block_diff(&w, &hermite_semigroup(&b, cfg.t), b.dim());
    Record::below(
        "heat-weyl",
        "W(p_t) = e^{-tH}",
        worst,
        cfg.tol("heat-weyl", 1e-8),
    )
}

fn fock_kernel_limit(cfg: &RunConfig) -> Record {
    let k = KernelParams::new(1e-6, 0.5, 1).unwrap();
    let mut worst = 0.0f64;
    for (z, w, a, bb) in [
        (cpt(0.06, 0.03), cpt(-0.02, 0.04), cpt(0.01, -0.05), cpt(0.07, 0.02)),
        (cpt(-0.04, 0.01), cpt(0.05, 0.02), cpt(0.03, 0.03), cpt(-0.01, 0.06)),
    ] {
        let got = fock_kernel(&k, &z, &w, &a, &bb);
        let expect = ((z[0] * a[0].conj() + w[0] * bb[0].conj()) / 2.0).exp();
        worst = worst.max((got - expect).norm());
    }
    Record::below(
        "fock-kernel-limit",
        "K -> exp((z.conj(a)+w.conj(b))/2) as lambda -> 0",
        worst,
        cfg.tol("fock-kernel-limit", 1e-8),
    )
}

fn laguerre_ground(cfg: &RunConfig) -> Record {
    use twisted_fock::kernels::laguerre_special_hermite;
    let k = KernelParams::new(2.0, 0.5, 1).unwrap();
    let z = cpt(0.5, -0.3);
    let got = laguerre_special_hermite(&k, 0, &z);
    let expect = (-2.0 * z[0].norm_sqr() / 4.0).exp();
    Record::below(
        "laguerre-ground",
        "phi_0 = e^{-|lambda| r^2 / 4}",
        (got - expect).abs(),
        cfg.tol("laguerre-ground", 1e-10),
    )
}

fn gauss_isometry(cfg: &RunConfig) -> Record {
    let b = basis(1, 12, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.gauss-isometry");
    let d = b.dim();
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let m = Array2::from_shape_fn((d, d), |_| {
            C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
        });
        let phi = gauss_bargmann(&b, cfg.t, &m).unwrap();
        let got = fock_norm_sq(&phi, 24).unwrap();
        let expect = hs_norm(&hermite_semigroup(&b, cfg.t).dot(&m)).powi(2);
        worst = worst.max((got - expect).abs() / expect.max(1.0));
    }
    Record::below(
        "gauss-isometry",
        "|G(T)|_F^2 = |e^{-tH} T|_HS^2",
        worst,
        cfg.tol("gauss-isometry", 1e-4),
    )
}

fn fock_reproducing(cfg: &RunConfig) -> Record {
    let b = basis(1, 12, cfg.lambda);
    let mut m = b.zeros();
    m[(0, 0)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(0.7, -0.4);
    m[(1, 3)] = C64::new(-0.2, 0.5);
    let phi = gauss_bargmann(&b, cfg.t, &m).unwrap();
    let mut rng = stream(cfg.seed, "check.fock-reproducing");
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let z = cpt(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
        let w = cpt(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
        let direct = phi.eval(&z, &w);
        let reproduced = reproduce_at(&phi, &z, &w, 20).unwrap();
        worst = worst.max((direct - reproduced).norm() / direct.norm().max(1.0));
    }
    Record::below(
        "fock-reproducing",
        "F(z,w) = <F, K((z,w), .)>_F",
        worst,
        cfg.tol("fock-reproducing", 1e-4),
    )
}

fn gauss_adjoint_roundtrip(cfg: &RunConfig) -> Record {
    let b = basis(1, 10, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.gauss-adjoint-roundtrip");
    let m = rand_banded(&b, 2, &mut rng);
    let phi = gauss_bargmann(&b, 0.5, &m).unwrap();
    match gauss_bargmann_adjoint(&phi, 4, 64) {
        Ok(rec) => {
            let mut worst = 0.0f64;
            for r in 0..b.dim() {
                for s in 0..b.dim() {
                    if b.indices()[r].degree() <= 4 && b.indices()[s].degree() <= 4 {
                        worst = worst.max((rec[(r, s)] - m[(r, s)]).norm());
                    }
                }
            }
            Record::below(
                "gauss-adjoint-roundtrip",
                "G*(G(M)) = M on the inner block",
                worst,
                cfg.tol("gauss-adjoint-roundtrip", 1e-4),
            )
        }
        Err(e) => Record::skipped("gauss-adjoint-roundtrip", "G*(G(M)) = M on the inner block", &format!("guard: {e}")),
    }
}

fn bargmann_unitary(cfg: &RunConfig) -> Record {
    let b = basis(1, 16, cfg.lambda);
    let grid = natural_grid(&b, 48);
    let f = GridFunction::from_fn(grid, |xu| {
        C64::new(
            (-0.7 * (xu[0] * xu[0] + xu[1] * xu[1])).exp() * (1.0 + 0.4 * xu[0]),
            0.1 * xu[1] * (-0.6 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(),
        )
    });
    let bf = segal_bargmann(&b, cfg.t, &f).unwrap();
    let lhs = bergman_norm_sq(&bf, 24).unwrap();
    let rhs = f.l2_norm().powi(2);
    Record::below(
        "bargmann-unitary",
        "|B f|_W^2 = |f|_2^2",
        (lhs - rhs).abs() / rhs,
        cfg.tol("bargmann-unitary", 1e-4),
    )
}

fn bargmann_convolution(cfg: &RunConfig) -> Record {
    let b = basis(1, 18, cfg.lambda);
    let grid = natural_grid(&b, cfg.q.min(64));
    let params = KernelParams::new(cfg.lambda, cfg.t, 1).unwrap();
    let f = GridFunction::from_fn(grid.clone(), |xu| {
        C64::new((-0.8 * (xu[0] * xu[0] + xu[1] * xu[1])).exp(), 0.0)
    });
    let pt = GridFunction::from_fn(grid, move |xu| heat_kernel_real(&params, xu));
    let conv = twisted_convolution(cfg.lambda, &f, &pt).unwrap();
    let bf = segal_bargmann(&b, cfg.t, &f).unwrap();
    let mut worst = 0.0f64;
    for probe in [[0.0, 0.0], [0.5, -0.2], [-0.7, 0.4]] {
        let via_trace = bf.eval(&cpt(probe[0], 0.0), &cpt(probe[1], 0.0));
        worst = worst.max((via_trace - conv.eval_at(&probe)).norm());
    }
    Record::below(
        "bargmann-convolution",
        "B f on the real section = f *_l p_t",
        worst,
        cfg.tol("bargmann-convolution", 1e-4),
    )
}

fn u_fixes_heat(cfg: &RunConfig) -> Record {
    let params = KernelParams::new(cfg.lambda, cfg.t, 1).unwrap();
    let grid = weyl_grid(1, 16, cfg.lambda, cfg.q.min(64));
    let pf = params.clone();
    let f = GridFunction::from_fn(grid, move |xu| heat_kernel_real(&pf, xu));
    let uf = u_lambda(cfg.lambda, cfg.t, &f).unwrap();
    let mut worst = 0.0f64;
    for probe in [[0.0, 0.0], [0.6, -0.3], [-1.1, 0.8]] {
        worst = worst.max((uf.eval_at(&probe) - heat_kernel_real(&params, &probe)).norm());
    }
    Record::below(
        "u-fixes-heat",
        "U_{t,lambda} p_t = p_t",
        worst,
        cfg.tol("u-fixes-heat", 1e-6),
    )
}

fn u_intertwine(cfg: &RunConfig) -> Record {
    let b = basis(1, 20, cfg.lambda);
    let grid = natural_grid(&b, cfg.q.min(64));
    let f = GridFunction::from_fn(grid, |xu| {
        C64::new(
            (-0.75 * ((xu[0] - 0.3) * (xu[0] - 0.3) + (xu[1] + 0.1) * (xu[1] + 0.1))).exp(),
            0.0,
        )
    });
    let uf = u_lambda(cfg.lambda, cfg.t, &f).unwrap();
    let buf = segal_bargmann(&b, cfg.t, &uf).unwrap();
    let bf = segal_bargmann(&b, cfg.t, &f).unwrap();
    let c2 = (2.0 * cfg.lambda * cfg.t).tanh().recip();
    let mut rng = stream(cfg.seed, "check.u-intertwine");
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let probe = [rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)];
        let lhs = buf.eval(&cpt(probe[0], 0.0), &cpt(probe[1], 0.0));
        let damp = (-cfg.lambda / 2.0 * c2 * (probe[0] * probe[0] + probe[1] * probe[1])).exp();
        let rhs = bf.eval(&cpt(0.0, -probe[0]), &cpt(0.0, -probe[1])) * damp;
        worst = worst.max((lhs - rhs).norm());
    }
    Record::below(
        "u-intertwine",
        "(U f) *_l p_t = damped (f *_l p_t)(-ix, -iu)",
        worst,
        cfg.tol("u-intertwine", 1e-5),
    )
}

fn s_paths_agree(cfg: &RunConfig) -> Record {
    let b = basis(1, 8, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.s-paths-agree");
    let f = gauss_bargmann(&b, 0.5, &rand_banded(&b, 4, &mut rng)).unwrap();
    let presets = ["identity", "diag-m", "rank-one"];
    let mut worst = 0.0f64;
    for name in presets {
        let p = crate::presets::build(name, &b, cfg.seed).unwrap();
        let sym = Symbol::from_operator(&b, 0.5, &p.m).unwrap();
        let alg = apply_s(&sym, &f, ConvPath::Algebraic, 64).unwrap();
        let int = apply_s(&sym, &f, ConvPath::Integral, 24).unwrap();
        for (z, w) in probes() {
            let a = alg.eval(&z, &w);
            let i = int.eval(&z, &w);
            worst = worst.max((a - i).norm() / a.norm().max(1.0));
        }
    }
    Record::below(
        "s-paths-agree",
        "S integral path = operator path",
        worst,
        cfg.tol("s-paths-agree", 1e-3),
    )
}

fn s_tilde_paths(cfg: &RunConfig) -> Record {
    let b = basis(1, 8, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.s-tilde-paths");
    let psi = apply_u_inv(&gauss_bargmann(&b, 0.5, &rand_banded(&b, 2, &mut rng)).unwrap());
    let sym = Symbol {
        phi: psi,
        m: b.eye(),
    };
    let f = gauss_bargmann(&b, 0.5, &rand_banded(&b, 2, &mut rng)).unwrap();
    let alg = apply_s_tilde(&sym, &f, ConvPath::Algebraic, 64).unwrap();
    let int = apply_s_tilde(&sym, &f, ConvPath::Integral, 24).unwrap();
    let mut worst = 0.0f64;
    for (z, w) in probes() {
        let a = alg.eval(&z, &w);
        let i = int.eval(&z, &w);
        worst = worst.max((a - i).norm() / a.norm().max(1.0));
    }
    Record::below(
        "s-tilde-paths",
        "S~ integral path = U-conjugated operator path",
        worst,
        cfg.tol("s-tilde-paths", 2e-3),
    )
}

fn symbol_recovery(cfg: &RunConfig) -> Record {
    let b = basis(1, 8, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.symbol-recovery");
    let sym = Symbol::from_operator(&b, 0.5, &rand_banded(&b, 3, &mut rng)).unwrap();
    let one = gauss_bargmann(&b, 0.5, &b.eye()).unwrap();
    let out = apply_s(&sym, &one, ConvPath::Integral, 24).unwrap();
    let mut worst = 0.0f64;
    for (z, w) in probes() {
        let got = out.eval(&z, &w);
        let want = sym.phi.eval(&z, &w);
        worst = worst.max((got - want).norm() / want.norm().max(1.0));
    }
    Record::below(
        "symbol-recovery",
        "S(1) = phi",
        worst,
        cfg.tol("symbol-recovery", 1e-4),
    )
}

fn gauss_homomorphism(cfg: &RunConfig) -> Record {
    let b = basis(1, 10, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.gauss-homomorphism");
    let m1 = rand_banded(&b, 2, &mut rng);
    let m2 = rand_banded(&b, 2, &mut rng);
    let phi = gauss_bargmann(&b, 0.5, &m1).unwrap();
    let sym2 = Symbol::from_operator(&b, 0.5, &m2).unwrap();
    let prod = algebra_convolve(&phi, &sym2, 64).unwrap();
    match gauss_bargmann_adjoint(&prod, 4, 64) {
        Ok(rec) => {
            let want = m1.dot(&m2);
            let mut worst = 0.0f64;
            for r in 0..b.dim() {
                for s in 0..b.dim() {
                    if b.indices()[r].degree() <= 4 && b.indices()[s].degree() <= 4 {
                        worst = worst.max((rec[(r, s)] - want[(r, s)]).norm());
                    }
                }
            }
            Record::below(
                "gauss-homomorphism",
                "G*(F * phi) = G*(F) G*(phi)",
                worst,
                cfg.tol("gauss-homomorphism", 1e-3),
            )
        }
        Err(e) => Record::skipped("gauss-homomorphism", "G*(F * phi) = G*(F) G*(phi)", &format!("guard: {e}")),
    }
}

fn algebra_commutes(cfg: &RunConfig) -> Record {
    let b = basis(1, 8, cfg.lambda);
    let m1 = spectral_multiplier(&b, |e| 1.0 / (1.0 + e));
    let m2 = spectral_multiplier(&b, |e| (-e / 2.0).exp());
    let s1 = Symbol::from_operator(&b, 0.5, &m1).unwrap();
    let s2 = Symbol::from_operator(&b, 0.5, &m2).unwrap();
    let a = algebra_convolve(&s1.phi, &s2, 64).unwrap();
    let c = algebra_convolve(&s2.phi, &s1, 64).unwrap();
    let mut worst = 0.0f64;
    for (z, w) in probes() {
        let x = a.eval(&z, &w);
        let y = c.eval(&z, &w);
        worst = worst.max((x - y).norm() / x.norm().max(1.0));
    }
    Record::below(
        "algebra-commutes",
        "radial multiplier symbols commute",
        worst,
        cfg.tol("algebra-commutes", 1e-4),
    )
}

fn algebra_right_identity(cfg: &RunConfig) -> Record {
    let b = basis(1, 8, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.algebra-right-identity");
    let f = gauss_bargmann(&b, 0.5, &rand_banded(&b, 3, &mut rng)).unwrap();
    let ident = Symbol::from_operator(&b, 0.5, &b.eye()).unwrap();
    let idd = algebra_convolve(&f, &ident, 64).unwrap();
    let mut worst = 0.0f64;
    for (z, w) in probes() {
        let x = idd.eval(&z, &w);
        let y = f.eval(&z, &w);
        worst = worst.max((x - y).norm() / y.norm().max(1.0));
    }
    Record::below(
        "algebra-right-identity",
        "F * G(I) = F",
        worst,
        cfg.tol("algebra-right-identity", 1e-10),
    )
}

fn algebra_associative(cfg: &RunConfig) -> Record {
    let b = basis(1, 8, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.algebra-associative");
    let ms: Vec<Matrix64> = (0..3).map(|_| rand_banded(&b, 2, &mut rng)).collect();
    let syms: Vec<Symbol<f64>> = ms
        .iter()
        .map(|m| Symbol::from_operator(&b, 0.5, m).unwrap())
        .collect();
    let left = algebra_convolve(
        &algebra_convolve(&syms[0].phi, &syms[1], 64).unwrap(),
        &syms[2],
        64,
    )
    .unwrap();
    let oracle = gauss_bargmann(&b, 0.5, &ms[0].dot(&ms[1]).dot(&ms[2])).unwrap();
    let mut worst = 0.0f64;
    for (z, w) in probes() {
        let x = left.eval(&z, &w);
        let y = oracle.eval(&z, &w);
        worst = worst.max((x - y).norm() / y.norm().max(1.0));
    }
    Record::below(
        "algebra-associative",
        "(F * phi) * psi = G(N M_1 M_2)",
        worst,
        cfg.tol("algebra-associative", 1e-3),
    )
}

fn delta_equivariance(cfg: &RunConfig) -> Record {
    let b = basis(1, 8, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.delta-equivariance");
    let m = rand_banded(&b, 4, &mut rng);
    let nf = rand_banded(&b, 4, &mut rng);
    let f = gauss_bargmann(&b, 0.5, &nf).unwrap();
    let delta = DeltaIndex::new(1, 0);
    let phi = gauss_bargmann(&b, 0.5, &m).unwrap();
    let comp = delta_component(&phi, &delta).unwrap();
    let sym_d = Symbol::from_element(&comp, 6, 64).unwrap();
    let lhs = apply_s(&sym_d, &f, ConvPath::Algebraic, 64).unwrap();
    let points = 64usize;
    let mut acc = b.zeros();
    for j in 0..points {
        let th = 2.0 * std::f64::consts::PI * (j as f64) / (points as f64);
        let rot_n = rotate_operator(&b, -th, &nf);
        let term = rotate_operator(&b, th, &rot_n.dot(&m));
        let chi = C64::new((delta.p as f64 * th).cos(), (delta.p as f64 * th).sin());
        acc = acc + term.mapv(|x| x * chi);
    }
    acc = acc.mapv(|x| x / C64::new(points as f64, 0.0));
    let rhs = gauss_bargmann(&b, 0.5, &acc).unwrap();
    let mut worst = 0.0f64;
    for (z, w) in probes() {
        let x = lhs.eval(&z, &w);
        let y = rhs.eval(&z, &w);
        worst = worst.max((x - y).norm() / y.norm().max(1.0));
    }
    Record::below(
        "delta-equivariance",
        "S of the delta component = chi-average of rotated S",
        worst,
        cfg.tol("delta-equivariance", 1e-3),
    )
}

fn delta_u_commute(cfg: &RunConfig) -> Record {
    let b = basis(1, 8, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.delta-u-commute");
    let m = rand_banded(&b, 4, &mut rng);
    let phi = gauss_bargmann(&b, 0.5, &m).unwrap();
    let delta = DeltaIndex::new(2, 0);
    let lhs = delta_component(&apply_u_inv(&phi), &delta).unwrap();
    let rhs = apply_u_inv(&delta_component(&phi, &delta).unwrap());
    let mut worst = 0.0f64;
    for (z, w) in probes() {
        worst = worst.max((lhs.eval(&z, &w) - rhs.eval(&z, &w)).norm());
    }
    Record::below(
        "delta-u-commute",
        "(U* phi)_delta = U*(phi_delta)",
        worst,
        cfg.tol("delta-u-commute", 1e-6),
    )
}

fn rho_norm_scaling(cfg: &RunConfig) -> Record {
    let b = basis(1, 10, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.rho-norm-scaling");
    let f = gauss_bargmann(&b, 0.5, &rand_banded(&b, 10, &mut rng)).unwrap();
    let (a, bb) = (0.3, -0.5);
    let p = PhasePoint::from_real(&[a], &[bb]);
    let shifted = rho_translation(&p, &f);
    let base = fock_norm_sq(&f, 32).unwrap();
    let got = fock_norm_sq(&shifted, 32).unwrap();
    let factor = (0.5 * cfg.lambda * f.params().coth_2lt() * (a * a + bb * bb)).exp();
    Record::below(
        "rho-norm-scaling",
        "|rho(a,b) F|^2 = e^{(lambda/2) coth(2tl)(a^2+b^2)} |F|^2",
        (got / base - factor).abs() / factor,
        cfg.tol("rho-norm-scaling", 1e-5),
    )
}

fn metaplectic_rotation(cfg: &RunConfig) -> Record {
    let b = basis(1, 8, cfg.lambda);
    let mut rng = stream(cfg.seed, "check.metaplectic-rotation");
    let m = rand_banded(&b, 8, &mut rng);
    let phi = gauss_bargmann(&b, 0.5, &m).unwrap();
    let theta = 0.7;
    let rotated = gauss_bargmann(&b, 0.5, &rotate_operator(&b, theta, &m)).unwrap();
    let (c, s) = (theta.cos(), theta.sin());
    let mut worst = 0.0f64;
    for (z, w) in probes() {
        let zr = vec![z[0] * c + w[0] * s];
        let wr = vec![-(z[0] * s) + w[0] * c];
        let x = phi.eval(&zr, &wr);
        let y = rotated.eval(&z, &w);
        worst = worst.max((x - y).norm() / y.norm().max(1.0));
    }
    Record::below(
        "metaplectic-rotation",
        "R_theta G(M) = G(D_theta M D_theta*)",
        worst,
        cfg.tol("metaplectic-rotation", 1e-9),
    )
}

fn bilinear_invariance(cfg: &RunConfig) -> Record {
    let b1 = |z: &[C64], w: &[C64], a: &[C64], bb: &[C64]| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..z.len() {
            acc += z[j] * a[j].conj() + w[j] * bb[j].conj();
        }
        acc
    };
    let b2 = |z: &[C64], w: &[C64], a: &[C64], bb: &[C64]| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..z.len() {
            acc += w[j] * a[j].conj() - z[j] * bb[j].conj();
        }
        acc
    };
    let qf = |z: &[C64], w: &[C64]| -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..z.len() {
            acc += z[j] * w[j].conj();
        }
        acc.im
    };
    let rot = |th: f64, z: &[C64], w: &[C64]| -> (Vec<C64>, Vec<C64>) {
        let (c, s) = (th.cos(), th.sin());
        let zr: Vec<C64> = z.iter().zip(w).map(|(zj, wj)| zj * c - wj * s).collect();
        let wr: Vec<C64> = z.iter().zip(w).map(|(zj, wj)| zj * s + wj * c).collect();
        (zr, wr)
    };
    let mut rng = stream(cfg.seed, "check.bilinear-invariance");
    let mut rc = |n: usize| -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };
    let mut worst = 0.0f64;
    for i in 0..20 {
        let (z, w, a, bb) = (rc(1), rc(1), rc(1), rc(1));
        let theta = 0.31 * (i as f64) + 0.17;
        let (zr, wr) = rot(theta, &z, &w);
        let (ar, br) = rot(theta, &a, &bb);
        worst = worst.max((b1(&zr, &wr, &ar, &br) - b1(&z, &w, &a, &bb)).norm());
        worst = worst.max((b2(&zr, &wr, &ar, &br) - b2(&z, &w, &a, &bb)).norm());
        worst = worst.max((qf(&zr, &wr) - qf(&z, &w)).abs());
    }
    // n = 2 generators: a one-axis phase and a real two-axis rotation act
    // through the same alpha/beta block pattern.
    let sigma = |al: [[f64; 2]; 2], be: [[f64; 2]; 2], z: &[C64], w: &[C64]| {
        let mut zo = vec![C64::new(0.0, 0.0); 2];
        let mut wo = vec![C64::new(0.0, 0.0); 2];
        for i in 0..2 {
            for j in 0..2 {
                zo[i] += z[j] * al[i][j] - w[j] * be[i][j];
                wo[i] += z[j] * be[i][j] + w[j] * al[i][j];
            }
        }
        (zo, wo)
    };
    let (th1, th2) = (0.9f64, 0.6f64);
    let gens = [
        (
            [[th1.cos(), 0.0], [0.0, 1.0]],
            [[th1.sin(), 0.0], [0.0, 0.0]],
        ),
        (
            [[th2.cos(), -th2.sin()], [th2.sin(), th2.cos()]],
            [[0.0, 0.0], [0.0, 0.0]],
        ),
    ];
    for (al, be) in gens {
        let (z, w, a, bb) = (rc(2), rc(2), rc(2), rc(2));
        let (zr, wr) = sigma(al, be, &z, &w);
        let (ar, br) = sigma(al, be, &a, &bb);
        worst = worst.max((b1(&zr, &wr, &ar, &br) - b1(&z, &w, &a, &bb)).norm());
        worst = worst.max((b2(&zr, &wr, &ar, &br) - b2(&z, &w, &a, &bb)).norm());
        worst = worst.max((qf(&zr, &wr) - qf(&z, &w)).abs());
    }
    Record::below(
        "bilinear-invariance",
        "B1, B2, Q invariant under sigma.(z,w)",
        worst,
        cfg.tol("bilinear-invariance", 1e-12),
    )
}

fn geller_orthonormal(cfg: &RunConfig) -> Record {
    let b = HermiteBasis::new(2, 12, cfg.lambda).unwrap();
    let items = [
        (DeltaIndex::new(0, 0), 2usize),
        (DeltaIndex::new(0, 0), 5),
        (DeltaIndex::new(1, 0), 2),
        (DeltaIndex::new(1, 0), 4),
        (DeltaIndex::new(0, 1), 3),
        (DeltaIndex::new(0, 1), 6),
        (DeltaIndex::new(1, 1), 3),
        (DeltaIndex::new(1, 1), 5),
        (DeltaIndex::new(2, 1), 4),
        (DeltaIndex::new(2, 1), 6),
    ];
    let ops: Vec<Matrix64> = items
        .iter()
        .map(|(d, k)| geller_basis(&b, *k, d).unwrap().op)
        .collect();
    let mut worst = 0.0f64;
    for i in 0..ops.len() {
        for j in 0..ops.len() {
            let got = trace_prod(&adjoint(&ops[i]), &ops[j]);
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((got.re - want).abs().max(got.im.abs()));
        }
    }
    Record::below(
        "geller-orthonormal",
        "<S_{j,k}, S_{j',k'}>_HS = delta",
        worst,
        cfg.tol("geller-orthonormal", 1e-8),
    )
}

fn geller_gamma_ratio(cfg: &RunConfig) -> Record {
    let gamma_int = |m: usize| -> f64 { (1..m).map(|j| j as f64).product() };
    let mut worst = 0.0f64;
    for (n, delta, kmin, kmax) in [
        (2usize, DeltaIndex::new(2, 1), 3usize, 7usize),
        (1, DeltaIndex::new(3, 0), 3, 8),
    ] {
        let b = HermiteBasis::new(n, kmax + 1, cfg.lambda).unwrap();
        for k in kmin..kmax {
            let c0 = geller_constant(&b, k, &delta).unwrap();
            let c1 = geller_constant(&b, k + 1, &delta).unwrap();
            let got = (c1 / c0).powi(2);
            let (p, q) = (delta.p, delta.q);
            let want = gamma_int(k + 1 + n + q) * gamma_int(k - p + 1) * gamma_int(k + 2)
                * gamma_int(k + n)
                / (gamma_int(k + n + q)
                    * gamma_int(k - p + 2)
                    * gamma_int(k + 1)
                    * gamma_int(k + 1 + n));
            worst = worst.max((got - want).abs() / want);
        }
    }
    Record::below(
        "geller-gamma-ratio",
        "C_{k+1}^2 / C_k^2 follows the factorial ratio",
        worst,
        cfg.tol("geller-gamma-ratio", 1e-8),
    )
}

fn weight_bound_unit(cfg: &RunConfig) -> Record {
    let wb = weight_bound_check(2, cfg.lambda, &DeltaIndex::new(0, 0)).unwrap();
    Record::below(
        "weight-bound-unit",
        "|W(P^0) H^0| = 1",
        (wb.max - 1.0).abs(),
        cfg.tol("weight-bound-unit", 1e-12),
    )
}

fn weight_bound_root2(cfg: &RunConfig) -> Record {
    let wb = weight_bound_check(2, cfg.lambda, &DeltaIndex::new(1, 0)).unwrap();
    Record::at_most(
        "weight-bound-root2",
        "|W(P^{(1,0)}) H^{-1/2}| <= sqrt(2)",
        wb.max,
        2.0f64.sqrt(),
        cfg.tol("weight-bound-root2", 1e-10),
    )
}

fn weight_bound_plateau(cfg: &RunConfig) -> Record {
    let wb = weight_bound_check(2, cfg.lambda, &DeltaIndex::new(1, 1)).unwrap();
    let hi = wb.norms.iter().cloned().fold(f64::MIN, f64::max);
    let lo = wb.norms.iter().cloned().fold(f64::MAX, f64::min);
    Record::below(
        "weight-bound-plateau",
        "|W(P^{(1,1)}) H^{-1}| plateaus across cutoffs",
        (hi - lo) / hi,
        cfg.tol("weight-bound-plateau", 0.01),
    )
}
