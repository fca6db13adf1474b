//! Command-line front end for the twisted Fock toolkit: `verify` runs the
//! identity suite, `experiment` the named experiments, `eval` prints a
//! kernel or transform at given points.

use std::env;

use twisted_fock_cli::config::{ConfigError, RunConfig};
use twisted_fock_cli::{checks, evalcmd, experiments};

enum Cmd {
    Verify,
    Experiment,
    Eval { name: String },
}

fn usage() -> String {
    [
        "usage: twisted-fock <verify|experiment|eval> [options]",
        "",
        "  verify                     run the full identity suite",
        "  experiment                 run the configured experiment",
        "  eval <name> <numbers...>   print a kernel/transform value",
        "",
        "options:",
        "  --config PATH   key=value file applied over the defaults",
        "  --out DIR       report directory (default .)",
        "  --seed INT      generator seed (default 42)",
        "  --k-list LIST   comma-separated increasing cutoffs, e.g. 8,12,16,20",
        "  --preset NAME   operator preset for experiment/eval",
        "  --key VALUE     any config key (n, lambda, k, q, t, experiment, tol.NAME)",
        "",
        "eval names: heat, fock-weight, bergman-weight, laguerre,",
        "            laguerre-hermite, gauss-bargmann",
        "",
        "TWISTED_FOCK_THREADS caps the worker pool.",
        "exit codes: 0 pass, 1 check failure, 2 usage or config error",
    ]
    .join("\n")
}

fn main() {
    init_threads();
    let code = match parse_and_run() {
        Ok(code) => code,
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn init_threads() {
    if let Ok(v) = env::var("TWISTED_FOCK_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}

fn parse_and_run() -> Result<i32, ConfigError> {
    let argv: Vec<String> = env::args().skip(1).collect();
    if argv.is_empty() || argv[0] == "--help" || argv[0] == "-h" {
        println!("{}", usage());
        return Ok(if argv.is_empty() { 2 } else { 0 });
    }

    let mut cfg = RunConfig::default();
    // The config file is applied before any flag, wherever --config sits.
    let mut iter = argv.iter();
    while let Some(a) = iter.next() {
        if a == "--config" {
            let path = iter
                .next()
                .ok_or_else(|| ConfigError("missing value for --config".into()))?;
            cfg.load_file(path)?;
        }
    }

    let cmd = match argv[0].as_str() {
        "verify" => Cmd::Verify,
        "experiment" => Cmd::Experiment,
        "eval" => {
            let name = argv
                .get(1)
                .filter(|s| !s.starts_with("--"))
                .ok_or_else(|| ConfigError("eval needs a target name".into()))?
                .clone();
            Cmd::Eval { name }
        }
        other => return Err(ConfigError(format!("unknown subcommand '{other}'"))),
    };

    let mut points = Vec::new();
    let skip = if matches!(cmd, Cmd::Eval { .. }) { 2 } else { 1 };
    let mut args = argv.iter().skip(skip);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--help" | "-h" => {
                println!("{}", usage());
                return Ok(0);
            }
            "--config" => {
                args.next();
            }
            flag if flag.starts_with("--") => {
                let key = &flag[2..];
                let value = args
                    .next()
                    .ok_or_else(|| ConfigError(format!("missing value for --{key}")))?;
                cfg.set(key, value)?;
            }
            number => {
                let v: f64 = number
                    .parse()
                    .map_err(|_| ConfigError(format!("expected a number, got '{number}'")))?;
                points.push(v);
            }
        }
    }
    if !points.is_empty() && !matches!(cmd, Cmd::Eval { .. }) {
        return Err(ConfigError("positional numbers only make sense for eval".into()));
    }
    cfg.validate()?;

    match cmd {
        Cmd::Verify => {
            let rep = checks::run_verify(&cfg);
            rep.print();
            let (json, _) = rep
                .write(&cfg.out)
                .map_err(|e| ConfigError(format!("writing report: {e}")))?;
            println!("report: {}", json.display());
            Ok(if rep.all_pass() { 0 } else { 1 })
        }
        Cmd::Experiment => {
            let rep = experiments::run_experiment(&cfg)?;
            rep.print();
            let (json, csv) = rep
                .write(&cfg.out)
                .map_err(|e| ConfigError(format!("writing report: {e}")))?;
            println!("report: {}", json.display());
            if let Some(csv) = csv {
                println!("traces: {}", csv.display());
            }
            Ok(if rep.all_pass() { 0 } else { 1 })
        }
        Cmd::Eval { name } => {
            for line in evalcmd::run_eval(&cfg, &name, &points)? {
                println!("{line}");
            }
            Ok(0)
        }
    }
}
