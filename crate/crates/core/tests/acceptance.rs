//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; the process exits nonzero if any
//! criterion fails.

use parkrelay::cli::Run;
use parkrelay::config::RunConfig;
use parkrelay::engine::Execution;
use parkrelay::parking::ParkingModel;
use parkrelay::validation::{self, Check, ValidationOptions};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

struct Criterion {
    name: &'static str,
    checks: Vec<Check>,
    note: String,
}

impl Criterion {
    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

fn criterion(name: &'static str, checks: parkrelay::Result<Vec<Check>>) -> Criterion {
    match checks {
        Ok(checks) => Criterion {
            name,
            checks,
            note: String::new(),
        },
        Err(e) => Criterion {
            name,
            checks: Vec::new(),
            note: format!("error: {e}"),
        },
    }
}

fn opts() -> ValidationOptions {
    ValidationOptions::default()
}

fn outage_agreement(model: &ParkingModel) -> Criterion {
    let start = Instant::now();
    let mut c = criterion("closed-form outage agrees with simulation", validation::outage_agreement(model, &opts()));
    let elapsed = start.elapsed();
    c.checks.push(Check {
        name: "runtime under five minutes".into(),
        passed: elapsed < Duration::from_secs(300),
        measured: elapsed.as_secs_f64(),
        tolerance: 300.0,
        detail: "seconds".into(),
    });
    c
}

#[cfg(feature = "parallel")]
fn thread_count_invariance(model: &ParkingModel) -> parkrelay::Result<Vec<Check>> {
    use parkrelay::channel::RadioConfig;
    use parkrelay::engine::StreamSeed;
    use parkrelay::simulation::estimate_outage;
    let relays = validation::fig2_relays(15.0)?;
    let cfg = RadioConfig::default();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| estimate_outage(&relays, model, &cfg, 300_000, StreamSeed(11), Execution::Parallel))
    };
    let (a, b) = (run(1)?, run(4)?);
    Ok(vec![Check {
        name: "1-thread and 4-thread pools agree".into(),
        passed: a == b,
        measured: (a.point - b.point).abs(),
        tolerance: 0.0,
        detail: format!("{} vs {}", a.point, b.point),
    }])
}

#[cfg(not(feature = "parallel"))]
fn thread_count_invariance(_: &ParkingModel) -> parkrelay::Result<Vec<Check>> {
    Ok(Vec::new())
}

/// Every command, run twice through the binary with different worker
/// counts, must write identical bytes.
fn cli_reruns() -> parkrelay::Result<Vec<Check>> {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("run.toml");
    let mut cfg = RunConfig::default();
    cfg.trials = 20_000;
    cfg.scenario.replications = 40;
    cfg.fig3.days = 3;
    std::fs::write(&cfg_path, cfg.to_toml_string()).expect("write config");
    let mut checks = Vec::new();
    for fig in ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"] {
        let mut outputs = Vec::new();
        for (i, threads) in ["1", "4"].iter().enumerate() {
            let out = dir.path().join(format!("run{i}"));
            let status = Command::new(env!("CARGO_BIN_EXE_parkrelay"))
                .args(["--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap(), fig])
                .env("RAYON_NUM_THREADS", threads)
                .output()
                .expect("run binary");
            assert!(status.status.success(), "{fig}: {}", String::from_utf8_lossy(&status.stderr));
            outputs.push(std::fs::read(out.join(format!("{fig}.csv"))).expect("read csv"));
        }
        checks.push(Check {
            name: format!("{fig} byte-identical across reruns"),
            passed: outputs[0] == outputs[1],
            measured: outputs[0].len() as f64,
            tolerance: 0.0,
            detail: "bytes".into(),
        });
    }
    Ok(checks)
}

fn determinism(model: &ParkingModel) -> Criterion {
    let mut checks = Vec::new();
    let mut note = String::new();
    for part in [validation::determinism(model, &opts()), thread_count_invariance(model), cli_reruns()] {
        match part {
            Ok(c) => checks.extend(c),
            Err(e) => note = format!("error: {e}"),
        }
    }
    if !note.is_empty() {
        checks.clear();
    }
    Criterion {
        name: "reruns are byte-identical for any worker count",
        checks,
        note,
    }
}

fn day_profiles(model: &ParkingModel) -> Criterion {
    // Same scenario the CLI uses by default.
    let run = Run::new(RunConfig::default()).expect("default config");
    criterion(
        "simulated day has the expected qualitative shape",
        validation::day_shape(model, &run.cfg.scenario(), Execution::default()),
    )
}

fn main() -> ExitCode {
    let model = ParkingModel::synthetic_default();
    let o = opts();
    let criteria = vec![
        outage_agreement(&model),
        criterion("select-combining capacity series", validation::capacity_series()),
        criterion("surviving-relay distribution", validation::surviving_relays(o.seed)),
        criterion("conditional survival closed form", validation::conditional_survival(&model, o.exec)),
        criterion("link SNR distribution", validation::link_cdf(o.seed, o.ks_draws, o.exec)),
        day_profiles(&model),
        criterion("arrival hour matters more than elapsed time", validation::sensitivity(&model)),
        criterion("special functions", validation::special_functions(o.seed)),
        determinism(&model),
    ];

    let mut failed = 0;
    for c in &criteria {
        println!("{} {}{}", if c.passed() { "PASS" } else { "FAIL" }, c.name, if c.note.is_empty() { String::new() } else { format!(" ({})", c.note) });
        for check in &c.checks {
            println!("    {}", check.line());
        }
        failed += !c.passed() as usize;
    }
    println!("{} criteria, {} failed", criteria.len(), failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
