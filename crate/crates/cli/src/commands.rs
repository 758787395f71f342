//! Subcommand implementations: run the requested computation, write CSV/SVG
//! outputs into `--out`, and record a replayable manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use tfbm::testing::{default_tau, power_study_scaled};
use tfbm::{
    Method, NullModel, PowerCurve, ProcessSpec, StatKind, StatisticSpec, TestConfig,
};

use crate::manifest::RunManifest;
use crate::svg::{self, Series};
use crate::{Cli, CliError, PowerArgs, QlinesArgs, SimulateArgs, TestArgs};

fn finish(
    cli: &Cli,
    command: &str,
    argv: &[String],
    outputs: Vec<String>,
    started: Instant,
) -> Result<(), CliError> {
    let mut m = RunManifest::new(command, argv.to_vec(), cli.seed);
    m.outputs = outputs;
    m.duration_secs = started.elapsed().as_secs_f64();
    m.save(&cli.out.join("manifest.json"))?;
    Ok(())
}

fn out_file(cli: &Cli, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    let path = cli.out.join(name);
    let f = File::create(&path)?;
    Ok((path, BufWriter::new(f)))
}

/// Map a spec to the unit-grid equivalent of sampling at spacing `delta`.
/// By the scaling law, X(k*delta) equals amp * X'(k) in distribution, where
/// X' has tempering delta*lambda and amp is a power of delta set by H.
fn scaled_spec(spec: &ProcessSpec, delta: f64) -> Result<(ProcessSpec, f64), CliError> {
    use tfbm::ProcessKind;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(CliError::usage(format!("horizon must be positive and finite, got spacing {delta}")));
    }
    let amp = match spec.kind {
        ProcessKind::TfbmIII => delta.powf(1.0 - spec.hurst),
        _ => delta.powf(spec.hurst),
    };
    let eff = match spec.kind {
        ProcessKind::Fbm => *spec,
        k => ProcessSpec::new(k, spec.hurst, spec.lambda * delta)?,
    };
    Ok((eff, amp))
}

pub fn simulate(cli: &Cli, args: &SimulateArgs, argv: &[String]) -> Result<(), CliError> {
    let started = Instant::now();
    let spec = args.spec.to_spec()?;
    let (eff, amp) = match args.horizon {
        Some(t) => scaled_spec(&spec, t / args.n.max(1) as f64)?,
        None => (spec, 1.0),
    };
    let mut batch =
        tfbm::simulate::simulate_process(&eff, args.n, args.m, args.spec_method(), cli.seed)?;
    if amp != 1.0 {
        batch.values *= amp;
    }
    let (path, mut w) = out_file(cli, "simulate.csv")?;
    batch.write_csv(&mut w)?;
    w.flush()?;
    println!(
        "simulated {} paths of length {} ({} H={} lambda={}) via {} -> {}",
        args.m,
        args.n,
        spec.kind.label(),
        spec.hurst,
        spec.lambda,
        batch.method_used.label(),
        path.display()
    );
    finish(cli, "simulate", argv, vec!["simulate.csv".into()], started)
}

impl SimulateArgs {
    fn spec_method(&self) -> Method {
        self.method.into()
    }
}

/// Read a trajectory CSV: `#` lines skipped, one comma-separated path per row,
/// all rows the same length.
fn read_paths(path: &std::path::Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> =
            line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| {
            CliError::usage(format!("{}:{}: bad number: {e}", path.display(), ln + 1))
        })?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::usage(format!(
                    "{}:{}: row has {} values, expected {}",
                    path.display(),
                    ln + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::usage(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

pub fn test(cli: &Cli, args: &TestArgs, argv: &[String]) -> Result<(), CliError> {
    let started = Instant::now();
    let spec = args.spec.to_spec()?;
    let mut paths = read_paths(&args.input)?;
    let n = paths[0].len();
    // on a physical grid, rescale data to the unit-grid null equivalent
    let (spec, amp) = match args.horizon {
        Some(t) => scaled_spec(&spec, t / n as f64)?,
        None => (spec, 1.0),
    };
    if amp != 1.0 {
        for p in &mut paths {
            for v in p.iter_mut() {
                *v /= amp;
            }
        }
    }
    let kind: StatKind = args.stat.into();
    let tau = args.tau.unwrap_or_else(|| default_tau(kind));
    let config = TestConfig {
        null_spec: spec,
        statistic: StatisticSpec { kind, tau },
        n,
        significance: args.significance,
        null_draws: args.null_draws,
        seed: cli.seed,
    };
    let model = NullModel::build(&config)?;
    if kind == StatKind::Acvf {
        println!("acvf statistic is computed on first differences of each path");
    }
    let (out_path, mut w) = out_file(cli, "test.csv")?;
    writeln!(
        w,
        "# kind={},H={},lambda={},stat={},tau={},N={},significance={},null_draws={},seed={}",
        spec.kind.label(),
        spec.hurst,
        spec.lambda,
        kind.label(),
        tau,
        n,
        args.significance,
        args.null_draws,
        cli.seed
    )?;
    writeln!(w, "# path,statistic,lower,upper,rejected")?;
    let mut rejected = 0usize;
    for (i, p) in paths.iter().enumerate() {
        let outcome = model.judge(p)?;
        if outcome.rejected {
            rejected += 1;
        }
        writeln!(
            w,
            "{},{},{},{},{}",
            i,
            outcome.statistic_value,
            outcome.region.lower,
            outcome.region.upper,
            outcome.rejected as u8
        )?;
    }
    w.flush()?;
    println!(
        "tested {} path(s): {} rejected at level {} (acceptance region [{:.6}, {:.6}]) -> {}",
        paths.len(),
        rejected,
        args.significance,
        model.region.lower,
        model.region.upper,
        out_path.display()
    );
    finish(cli, "test", argv, vec!["test.csv".into()], started)
}

struct PowerJob {
    null: ProcessSpec,
    /// Alternatives with their amplitude relative to the null (1 on the unit grid).
    alts: Vec<(ProcessSpec, f64)>,
    /// x-axis values as the user gave them (pre horizon scaling).
    axis_values: Vec<f64>,
    stats: Vec<StatKind>,
    axis: &'static str,
    n: usize,
}

fn apply_horizon(
    null: ProcessSpec,
    alts: Vec<ProcessSpec>,
    horizon: Option<f64>,
    n: usize,
) -> Result<(ProcessSpec, Vec<(ProcessSpec, f64)>), CliError> {
    match horizon {
        None => Ok((null, alts.into_iter().map(|a| (a, 1.0)).collect())),
        Some(t) => {
            let delta = t / n as f64;
            let (eff_null, amp0) = scaled_spec(&null, delta)?;
            let eff_alts = alts
                .into_iter()
                .map(|a| scaled_spec(&a, delta).map(|(e, amp)| (e, amp / amp0)))
                .collect::<Result<_, _>>()?;
            Ok((eff_null, eff_alts))
        }
    }
}

fn power_job(args: &PowerArgs) -> Result<PowerJob, CliError> {
    if let Some(name) = &args.preset {
        let p = crate::presets::lookup(name).ok_or_else(|| {
            CliError::usage(format!(
                "unknown preset {name}; available:\n  {}",
                crate::presets::names().join("\n  ")
            ))
        })?;
        let stats = if args.stat.is_empty() {
            vec![StatKind::Acvf, StatKind::Dma, StatKind::Tamsd]
        } else {
            args.stat.iter().map(|&s| s.into()).collect()
        };
        let n = args.n.unwrap_or(p.default_n);
        let axis_values = p
            .alts
            .iter()
            .map(|a| if p.axis == "H" { a.hurst } else { a.lambda })
            .collect();
        let (null, alts) = apply_horizon(p.null, p.alts, args.horizon, n)?;
        return Ok(PowerJob { null, alts, axis_values, stats, axis: p.axis, n });
    }
    let kind = args
        .kind
        .ok_or_else(|| CliError::usage("power needs --preset or --kind/--hurst"))?;
    let hurst =
        args.hurst.ok_or_else(|| CliError::usage("power needs --hurst (or --preset)"))?;
    let spec_args = crate::SpecArgs {
        kind,
        hurst,
        lambda: args.lambda,
        lambda_is_tau_star: args.lambda_is_tau_star,
    };
    let null = spec_args.to_spec()?;
    let alt_kind: tfbm::ProcessKind = args.alt_kind.map(Into::into).unwrap_or(null.kind);
    let (alts, axis): (Vec<ProcessSpec>, &'static str) =
        match (args.alt_hurst.is_empty(), args.alt_lambda.is_empty()) {
            (false, true) => (
                args.alt_hurst
                    .iter()
                    .map(|&h| ProcessSpec::new(alt_kind, h, null.lambda))
                    .collect::<tfbm::Result<_>>()?,
                "H",
            ),
            (true, false) => (
                args.alt_lambda
                    .iter()
                    .map(|&l| ProcessSpec::new(alt_kind, null.hurst, l))
                    .collect::<tfbm::Result<_>>()?,
                "lambda",
            ),
            (true, true) => {
                return Err(CliError::usage("power needs --alt-hurst or --alt-lambda"))
            }
            (false, false) => {
                return Err(CliError::usage(
                    "give either --alt-hurst or --alt-lambda, not both",
                ))
            }
        };
    let stats: Vec<StatKind> = if args.stat.is_empty() {
        return Err(CliError::usage("power needs --stat (or --preset)"));
    } else {
        args.stat.iter().map(|&s| s.into()).collect()
    };
    let n = args.n.ok_or_else(|| CliError::usage("power needs --n (or --preset)"))?;
    let axis_values =
        alts.iter().map(|a| if axis == "H" { a.hurst } else { a.lambda }).collect();
    let (null, alts) = apply_horizon(null, alts, args.horizon, n)?;
    Ok(PowerJob { null, alts, axis_values, stats, axis, n })
}

pub fn power(cli: &Cli, args: &PowerArgs, argv: &[String]) -> Result<(), CliError> {
    let started = Instant::now();
    if args.m == 0 {
        return Err(CliError::usage("power requires --m >= 1"));
    }
    let job = power_job(args)?;
    let (csv_path, mut w) = out_file(cli, "power.csv")?;
    let mut series: Vec<Series> = Vec::new();
    let mut curves: Vec<(StatKind, PowerCurve)> = Vec::new();
    for (si, &stat) in job.stats.iter().enumerate() {
        let tau = args.tau.unwrap_or_else(|| default_tau(stat));
        let config = TestConfig {
            null_spec: job.null,
            statistic: StatisticSpec { kind: stat, tau },
            n: job.n,
            significance: args.significance,
            null_draws: args.null_draws,
            seed: cli.seed,
        };
        let curve = power_study_scaled(&config, &job.alts, args.m, cli.seed)?;
        let points: Vec<(f64, f64)> = job
            .axis_values
            .iter()
            .zip(&curve.powers)
            .filter_map(|(&x, p)| p.map(|pw| (x, pw)))
            .collect();
        series.push(Series { label: stat.label().to_string(), points });
        if si == 0 {
            curve.write_csv(&mut w)?;
        } else {
            // single aggregated CSV: repeat rows, keep one header
            let mut buf = Vec::new();
            curve.write_csv(&mut buf)?;
            let text = String::from_utf8(buf).expect("csv is ascii");
            for line in text.lines().filter(|l| !l.starts_with('#')) {
                writeln!(w, "{line}")?;
            }
        }
        curves.push((stat, curve));
    }
    w.flush()?;
    let (svg_path, mut sw) = out_file(cli, "power.svg")?;
    let title = format!(
        "power vs {} | null {} H={} lambda={} N={} M={}",
        job.axis,
        job.null.kind.label(),
        job.null.hurst,
        job.null.lambda,
        job.n,
        args.m
    );
    svg::write_plot(&mut sw, &title, job.axis, "rejection rate", &series)?;
    sw.flush()?;
    for (stat, curve) in &curves {
        let failed = curve.powers.iter().filter(|p| p.is_none()).count();
        let shown: Vec<String> = curve
            .powers
            .iter()
            .map(|p| p.map(|v| format!("{v:.3}")).unwrap_or_else(|| "failed".into()))
            .collect();
        println!("{}: [{}]{}", stat.label(), shown.join(", "), if failed > 0 {
            format!(" ({failed} alternative(s) failed)")
        } else {
            String::new()
        });
    }
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    finish(cli, "power", argv, vec!["power.csv".into(), "power.svg".into()], started)
}

pub fn qlines(cli: &Cli, args: &QlinesArgs, argv: &[String]) -> Result<(), CliError> {
    let started = Instant::now();
    let spec = args.spec.to_spec()?;
    let (eff, amp) = match args.horizon {
        Some(t) => scaled_spec(&spec, t / args.n.max(1) as f64)?,
        None => (spec, 1.0),
    };
    let mut batch = tfbm::simulate::simulate_process(&eff, args.n, args.m, Method::Auto, cli.seed)?;
    if amp != 1.0 {
        batch.values *= amp;
    }
    let ql = tfbm::qlines::quantile_lines(&batch, &args.probs)?;
    let (csv_path, mut w) = out_file(cli, "qlines.csv")?;
    ql.write_csv(&mut w)?;
    w.flush()?;
    let series: Vec<Series> = ql
        .probs
        .iter()
        .enumerate()
        .map(|(j, p)| Series {
            label: format!("p={p}"),
            points: (0..args.n).map(|t| ((t + 1) as f64, ql.lines[(j, t)])).collect(),
        })
        .collect();
    let (svg_path, mut sw) = out_file(cli, "qlines.svg")?;
    let title = format!(
        "quantile lines | {} H={} lambda={} M={}",
        spec.kind.label(),
        spec.hurst,
        spec.lambda,
        args.m
    );
    svg::write_plot(&mut sw, &title, "t", "quantile", &series)?;
    sw.flush()?;
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    finish(cli, "qlines", argv, vec!["qlines.csv".into(), "qlines.svg".into()], started)
}
