//! `eval`: print a named kernel or transform at user-given points. Meant
//! for spot checks and for feeding external plots, so output is one plain
//! line per value.

use twisted_fock::basis::HermiteBasis;
use twisted_fock::fock::gauss_bargmann;
use twisted_fock::kernels::{
    bergman_weight, fock_weight, heat_kernel_real, laguerre, laguerre_special_hermite,
    KernelParams,
};
use twisted_fock::C64;

use crate::config::{ConfigError, RunConfig};
use crate::presets;

pub const EVAL_NAMES: &[&str] = &[
    "heat",
    "fock-weight",
    "bergman-weight",
    "laguerre",
    "laguerre-hermite",
    "gauss-bargmann",
];

/// Evaluates `name` at the flat list of real arguments and returns the
/// printed lines. Point layout per name:
///   heat: x_1..x_n u_1..u_n
///   fock-weight / bergman-weight: re z, im z (n pairs), re w, im w (n pairs)
///   laguerre: k alpha x
///   laguerre-hermite: k, then re z, im z (n pairs)
///   gauss-bargmann: same complex layout, through the configured preset
pub fn run_eval(cfg: &RunConfig, name: &str, args: &[f64]) -> Result<Vec<String>, ConfigError> {
    match name {
        "heat" => {
            let n = even_half(args.len(), "heat expects x_1..x_n u_1..u_n")?;
            let p = params(cfg, n)?;
            let v = heat_kernel_real(&p, args);
            Ok(vec![format!("heat(t={}, lambda={}) = {}", cfg.t, cfg.lambda, fmt_c(v))])
        }
        "fock-weight" | "bergman-weight" => {
            if args.len() % 4 != 0 || args.is_empty() {
                return Err(ConfigError(format!(
                    "{name} expects 4n reals: re/im of z then of w"
                )));
            }
            let n = args.len() / 4;
            let (z, w) = complex_pair(args);
            let p = params(cfg, n)?;
            let v = if name == "fock-weight" {
                fock_weight(&p, &z, &w)
            } else {
                bergman_weight(&p, &z, &w)
            };
            Ok(vec![format!("{name}(t={}, lambda={}) = {v:.12e}", cfg.t, cfg.lambda)])
        }
        "laguerre" => {
            if args.len() != 3 {
                return Err(ConfigError("laguerre expects: k alpha x".into()));
            }
            let k = as_index(args[0], "k")?;
            let v = laguerre(k, args[1], args[2]);
            Ok(vec![format!("L_{k}^{}({}) = {v:.12e}", args[1], args[2])])
        }
        "laguerre-hermite" => {
            if args.len() < 3 || (args.len() - 1) % 2 != 0 {
                return Err(ConfigError(
                    "laguerre-hermite expects: k, then re/im pairs of the complex point".into(),
                ));
            }
            let k = as_index(args[0], "k")?;
            let z: Vec<C64> = args[1..].chunks(2).map(|c| C64::new(c[0], c[1])).collect();
            let p = params(cfg, z.len())?;
            let v = laguerre_special_hermite(&p, k, &z);
            Ok(vec![format!("phi_{k}(t={}, lambda={}) = {v:.12e}", cfg.t, cfg.lambda)])
        }
        "gauss-bargmann" => {
            if args.len() != 4 * cfg.n {
                return Err(ConfigError(format!(
                    "gauss-bargmann expects 4n = {} reals (re/im of z then of w); n comes from the config",
                    4 * cfg.n
                )));
            }
            let basis = HermiteBasis::new(cfg.n, cfg.k, cfg.lambda)
                .map_err(|e| ConfigError(format!("basis construction: {e}")))?;
            let preset = presets::build(&cfg.preset, &basis, cfg.seed)?;
            let phi = gauss_bargmann(&basis, cfg.t, &preset.m)
                .map_err(|e| ConfigError(format!("transform setup: {e}")))?;
            let (z, w) = complex_pair(args);
            let v = phi.eval(&z, &w);
            Ok(vec![format!(
                "G(t={}, lambda={}, preset={}) = {}",
                cfg.t,
                cfg.lambda,
                preset.name,
                fmt_c(v)
            )])
        }
        other => Err(ConfigError(format!(
            "unknown eval target '{other}'; known: {}",
            EVAL_NAMES.join(", ")
        ))),
    }
}

fn params(cfg: &RunConfig, n: usize) -> Result<KernelParams<f64>, ConfigError> {
    KernelParams::new(cfg.lambda, cfg.t, n).map_err(|e| ConfigError(format!("parameters: {e}")))
}

fn even_half(len: usize, msg: &str) -> Result<usize, ConfigError> {
    if len == 0 || len % 2 != 0 {
        return Err(ConfigError(msg.into()));
    }
    Ok(len / 2)
}

fn as_index(x: f64, what: &str) -> Result<usize, ConfigError> {
    if x < 0.0 || x.fract() != 0.0 {
        return Err(ConfigError(format!("{what} must be a nonnegative integer")));
    }
    Ok(x as usize)
}

fn complex_pair(args: &[f64]) -> (Vec<C64>, Vec<C64>) {
    let half = args.len() / 2;
    let z = args[..half].chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    let w = args[half..].chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    (z, w)
}

fn fmt_c(v: C64) -> String {
    format!("{:.12e} {:+.12e}i", v.re, v.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_at_origin_matches_kernel() {
        let cfg = RunConfig::default();
        let lines = run_eval(&cfg, "heat", &[0.0, 0.0]).unwrap();
        let p = KernelParams::new(cfg.lambda, cfg.t, 1).unwrap();
        let expect = heat_kernel_real(&p, &[0.0, 0.0]);
        assert!(lines[0].contains(&format!("{:.12e}", expect.re)));
    }

    #[test]
    fn unknown_name_is_an_error() {
        let cfg = RunConfig::default();
        assert!(run_eval(&cfg, "nonsense", &[]).is_err());
    }

    #[test]
    fn laguerre_low_degree() {
        let cfg = RunConfig::default();
        let lines = run_eval(&cfg, "laguerre", &[1.0, 1.0, 0.5]).unwrap();
        // L_1^1(x) = 2 - x
        assert!(lines[0].contains(&format!("{:.12e}", 1.5f64)));
    }
}
