//! Named multiplier presets. Each builds an operator on a given basis
//! together with its exact norm and the behavior the experiments assert.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twisted_fock::basis::HermiteBasis;
use twisted_fock::conv::UncertaintyVerdict;
use twisted_fock::spectral::spectral_multiplier;
use twisted_fock::{Matrix64, C64};

use crate::config::ConfigError;

pub const PRESET_NAMES: [&str; 5] = [
    "identity",
    "diag-m",
    "rank-one",
    "rank-one-rotated",
    "laguerre-multiplier",
];

/// A multiplier preset instantiated on a basis.
pub struct Preset {
    pub name: String,
    pub m: Matrix64,
    /// Exact operator norm of the full (untruncated) multiplier.
    pub norm: f64,
    /// Whether the multiplier commutes with the oscillator Hamiltonian.
    pub commutes: bool,
    pub expected: UncertaintyVerdict,
}

/// Derives an independent generator for a named consumer from the run seed,
/// so parallel checks never share a stream.
pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn rank_one_from(v: &[C64], d: usize) -> Matrix64 {
    Array2::from_shape_fn((d, d), |(r, s)| v[r] * v[s].conj())
}

/// Normalizes v so the rank-one projector has operator norm 2.
fn scale_to_norm_two(v: &mut [C64]) {
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in v.iter_mut() {
        *c *= 2.0f64.sqrt() / norm;
    }
}

pub fn build(name: &str, basis: &HermiteBasis<f64>, seed: u64) -> Result<Preset, ConfigError> {
    let d = basis.dim();
    let (m, norm, commutes, expected) = match name {
        "identity" => (
            basis.eye(),
            1.0,
            true,
            UncertaintyVerdict::BothPlateau,
        ),
        // Bounded decreasing spectral multiplier with supremum 3, attained
        // on the lowest level.
        "diag-m" => {
            let floor = basis.n as f64 * basis.lambda.abs();
            (
                spectral_multiplier(basis, |e| 3.0 / (1.0 + (e - floor))),
                3.0,
                true,
                UncertaintyVerdict::Dichotomy,
            )
        }
        // Projector onto a real vector with geometric decay across degrees;
        // mixes degrees, so it does not commute with the Hamiltonian.
        "rank-one" => {
            let mut v: Vec<C64> = basis
                .indices()
                .iter()
                .map(|a| C64::new(0.75f64.powi(a.degree() as i32), 0.0))
                .collect();
            scale_to_norm_two(&mut v);
            (
                rank_one_from(&v, d),
                2.0,
                false,
                UncertaintyVerdict::Dichotomy,
            )
        }
        // Same decay profile with seeded random complex phases on every
        // component.
        "rank-one-rotated" => {
            let mut rng = stream(seed, "preset.rank-one-rotated");
            let mut v: Vec<C64> = basis
                .indices()
                .iter()
                .map(|a| {
                    C64::new(rng.gen_range(0.5..1.0), rng.gen_range(-0.5..0.5))
                        * 0.75f64.powi(a.degree() as i32)
                })
                .collect();
            scale_to_norm_two(&mut v);
            (
                rank_one_from(&v, d),
                2.0,
                false,
                UncertaintyVerdict::Dichotomy,
            )
        }
        "laguerre-multiplier" => {
            let floor = basis.n as f64 * basis.lambda.abs();
            (
                spectral_multiplier(basis, |e| 1.0 / (1.0 + e)),
                1.0 / (1.0 + floor),
                true,
                UncertaintyVerdict::Dichotomy,
            )
        }
        other => {
            return Err(ConfigError(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(Preset {
        name: name.into(),
        m,
        norm,
        commutes,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use twisted_fock::linalg::operator_norm;

    fn basis() -> HermiteBasis<f64> {
        HermiteBasis::new(1, 10, 1.0).unwrap()
    }

    #[test]
    fn stated_norms_match() {
        for name in PRESET_NAMES {
            let p = build(name, &basis(), 42).unwrap();
            let got = operator_norm(&p.m);
            assert!(
                (got - p.norm).abs() < 2e-3 * p.norm,
                "{name}: {got} vs {}",
                p.norm
            );
        }
    }

    #[test]
    fn rotated_preset_is_seed_deterministic() {
        let a = build("rank-one-rotated", &basis(), 7).unwrap();
        let b = build("rank-one-rotated", &basis(), 7).unwrap();
        let c = build("rank-one-rotated", &basis(), 8).unwrap();
        assert_eq!(a.m, b.m);
        assert_ne!(a.m, c.m);
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(build("nope", &basis(), 42).is_err());
    }
}
