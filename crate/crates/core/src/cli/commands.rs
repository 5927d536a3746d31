use rayon::prelude::*;
use serde::Serialize;

use super::output::OutDir;
use super::{ChainArgs, CliError, GridArgs, Mode, OptimizeArgs, SweepArgs, ValidateArgs};
use super::{EXIT_OK, EXIT_VALIDATION};
use crate::fidelity::FidelityPair;
use crate::grid_wavefunction::{
    density, overlap, GaussianSpec, GridPolicy, StateSpec, WaveFunction,
};
use crate::measurement_chain::{
    conditional_output, homodyne_distribution, sample_outcomes, Outcome, Phase,
};
use crate::optimizer::{optimize_closed, optimize_numeric, trade_off, NumericTradeOff};
use crate::validation::{Suite, Validator};

fn policy(grid: &GridArgs) -> Result<GridPolicy, CliError> {
    GridPolicy::new(grid.grid_n, grid.grid_span).map_err(|e| CliError::Usage(e.to_string()))
}

fn signal(text: &str, policy: &GridPolicy) -> Result<WaveFunction, CliError> {
    let spec: StateSpec = text.parse()?;
    Ok(spec.build(policy)?)
}

enum OutcomeRequest {
    Fixed(f64),
    Sample(usize),
}

fn parse_outcome(text: &str) -> Result<OutcomeRequest, CliError> {
    if let Some(n) = text.strip_prefix("sample:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Usage(format!("bad sample count in '{text}'")))?;
        if n == 0 {
            return Err(CliError::Usage("sample count must be at least 1".into()));
        }
        return Ok(OutcomeRequest::Sample(n));
    }
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(OutcomeRequest::Fixed)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "outcome '{text}' is neither a number nor sample:<n>"
            ))
        })
}

#[derive(Serialize)]
struct Moments {
    norm: f64,
    mean: f64,
    variance: f64,
}

#[derive(Serialize)]
struct ConditionalSummary {
    #[serde(flatten)]
    outcome: Outcome,
    feedback_displacement: f64,
    file: String,
    norm: f64,
    mean: f64,
    variance: f64,
    overlap_with_signal: f64,
}

#[derive(Serialize)]
struct SampleSummary {
    count: usize,
    seed: u64,
    mean: f64,
    variance: f64,
    file: String,
}

#[derive(Serialize)]
struct ChainSummary {
    phi: f64,
    transmittivity: f64,
    output_squeeze_r: f64,
    probe_variance: f64,
    signal: String,
    signal_moments: Moments,
    homodyne: Moments,
    conditionals: Vec<ConditionalSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<SampleSummary>,
}

pub(super) fn chain(args: &ChainArgs, out: &mut OutDir) -> Result<i32, CliError> {
    let policy = policy(&args.grid)?;
    let request = parse_outcome(&args.outcome)?;
    let spec: StateSpec = args.signal.parse()?;
    let phase = Phase::new(args.phi)?;
    let probe_spec = GaussianSpec::new(0.0, args.probe_var)?;
    let signal = spec.build(&policy)?;
    let probe = policy.gaussian(probe_spec)?;

    let dist = homodyne_distribution(&signal, &probe, args.phi)?;
    out.csv(
        "homodyne.csv",
        &["x0", "p"],
        dist.grid()
            .points()
            .zip(dist.values())
            .map(|(x, &p)| [x, p]),
    )?;

    let (targets, samples) = match request {
        OutcomeRequest::Fixed(x0) => (vec![x0], None),
        OutcomeRequest::Sample(n) => {
            let xs = sample_outcomes(&dist, n, args.seed)?;
            out.csv(
                "samples.csv",
                &["index", "x0"],
                xs.iter().enumerate().map(|(k, &x)| [k as f64, x]),
            )?;
            let mean = xs.iter().sum::<f64>() / n as f64;
            let variance = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
            let summary = SampleSummary {
                count: n,
                seed: args.seed,
                mean,
                variance,
                file: "samples.csv".into(),
            };
            let keep = xs.iter().copied().take(args.max_conditionals).collect();
            (keep, Some(summary))
        }
    };

    let mut conditionals = Vec::new();
    for (k, &x0) in targets.iter().enumerate() {
        let psi = conditional_output(&signal, &probe, args.phi, x0)?;
        let d = density(&psi);
        let file = format!("conditional_{k:04}.csv");
        out.csv(
            &file,
            &["x", "density"],
            d.grid().points().zip(d.values()).map(|(x, &p)| [x, p]),
        )?;
        conditionals.push(ConditionalSummary {
            outcome: Outcome::new(x0, args.phi, &dist)?,
            feedback_displacement: phase.feedback_displacement(x0),
            file,
            norm: psi.norm_squared(),
            mean: d.mean(),
            variance: d.variance(),
            overlap_with_signal: overlap(&signal, &psi)?.norm_sqr(),
        });
    }

    let sd = density(&signal);
    let summary = ChainSummary {
        phi: args.phi,
        transmittivity: phase.transmittivity(),
        output_squeeze_r: phase.output_squeeze_parameter(),
        probe_variance: args.probe_var,
        signal: spec.to_string(),
        signal_moments: Moments {
            norm: signal.norm_squared(),
            mean: sd.mean(),
            variance: sd.variance(),
        },
        homodyne: Moments {
            norm: dist.mass(),
            mean: dist.mean(),
            variance: dist.variance(),
        },
        conditionals,
        samples,
    };
    out.json("summary.json", &summary)?;
    Ok(EXIT_OK)
}

pub(super) fn sweep(args: &SweepArgs, out: &mut OutDir) -> Result<i32, CliError> {
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if !(args.x_min > 0.0 && args.x_max >= args.x_min && args.x_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "need 0 < x-min <= x-max, got [{}, {}]",
            args.x_min, args.x_max
        )));
    }
    let policy = policy(&args.grid)?;
    let xs: Vec<f64> = if args.steps == 1 {
        vec![args.x_min]
    } else {
        let h = (args.x_max - args.x_min) / (args.steps - 1) as f64;
        (0..args.steps).map(|k| args.x_min + k as f64 * h).collect()
    };
    let pairs: Vec<FidelityPair> = match args.mode {
        Mode::Closed => xs.iter().map(|&x| trade_off(x)).collect::<Result<_, _>>()?,
        Mode::Numeric => {
            let signal = signal(&args.signal, &policy)?;
            let objective = NumericTradeOff::new(&signal, args.phi, policy)?;
            xs.par_iter()
                .map(|&x| objective.pair_at(x))
                .collect::<Result<_, _>>()?
        }
    };
    out.csv(
        "sweep.csv",
        &["x", "F", "G", "F_plus_G"],
        xs.iter().zip(&pairs).map(|(&x, p)| [x, p.f, p.g, p.sum()]),
    )?;
    Ok(EXIT_OK)
}

pub(super) fn optimize(args: &OptimizeArgs, out: &mut OutDir) -> Result<i32, CliError> {
    let policy = policy(&args.grid)?;
    let signal = signal(&args.signal, &policy)?;
    let mut report = match args.mode {
        Mode::Closed => optimize_closed(args.x_min, args.x_max, args.tol)?,
        Mode::Numeric => {
            let objective = NumericTradeOff::new(&signal, args.phi, policy)?;
            optimize_numeric(&objective, args.x_min, args.x_max, args.tol)?
        }
    };
    if let Some(sigma_p) = args.sigma_probe {
        report = report.with_tuned_phase(density(&signal).std_dev(), sigma_p)?;
    }
    out.json("report.json", &report)?;
    Ok(EXIT_OK)
}

pub(super) fn validate(args: &ValidateArgs, out: &mut OutDir) -> Result<i32, CliError> {
    let suite: Suite = args.suite.parse()?;
    let policy = policy(&args.grid)?;
    let signal = signal(&args.signal, &policy)?;
    let report = Validator::new(signal, args.signal.clone(), policy).run(suite);
    out.json("validation.json", &report)?;
    for check in &report.checks {
        eprintln!(
            "{} {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name
        );
    }
    Ok(if report.all_passed {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    })
}
