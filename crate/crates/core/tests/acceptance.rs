//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::time::{Duration, Instant};

use qnd_core::fidelity::{output_ensemble, state_fidelity};
use qnd_core::grid_wavefunction::{
    build_cat, density, l2_distance, overlap, Distribution, GaussianSpec, Grid, GridPolicy,
    WaveFunction,
};
use qnd_core::measurement_chain::{
    beam_splitter_transform, conditional_output, conditional_state_raw, feedback_displace,
    homodyne_density_at, homodyne_distribution, homodyne_distribution_on, output_squeeze,
    sample_outcomes,
};
use qnd_core::optimizer::{numeric_trade_off_curve, optimize_closed, NumericTradeOff};
use qnd_core::validation::gaussian_convolution;
use statrs::distribution::{ContinuousCDF, Normal};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn vacuum(n: usize) -> WaveFunction {
    GridPolicy::new(n, 10.0)
        .unwrap()
        .gaussian(GaussianSpec::vacuum())
        .unwrap()
}

fn probe(variance: f64) -> WaveFunction {
    GridPolicy::default()
        .gaussian(GaussianSpec::new(0.0, variance).unwrap())
        .unwrap()
}

fn c1_optimal_trade_off() -> Outcome {
    let r = optimize_closed(0.05, 20.0, 1e-4).map_err(err)?;
    let detail = format!("x_m={:.6} F={:.6} G={:.6}", r.x_m, r.f_at_xm, r.g_at_xm);
    ensure(
        (r.x_m - 1.2).abs() <= 0.05
            && (r.f_at_xm - 0.86).abs() <= 0.01
            && (r.g_at_xm - 0.91).abs() <= 0.01,
        detail,
    )
}

fn c2_equal_fidelity() -> Outcome {
    let r = optimize_closed(0.05, 20.0, 1e-4).map_err(err)?;
    let detail = format!("x_e={:.6} F={:.6} G={:.6}", r.x_e, r.f_at_xe, r.g_at_xe);
    ensure(
        (r.x_e - 1.3).abs() <= 0.1
            && (r.f_at_xe - 0.88).abs() <= 0.01
            && (r.g_at_xe - 0.88).abs() <= 0.01
            && (r.f_at_xe - r.g_at_xe).abs() <= r.tolerance,
        detail,
    )
}

fn c3_closed_vs_numeric() -> Outcome {
    let signal = vacuum(2048);
    let objective = NumericTradeOff::new(&signal, FRAC_PI_4, GridPolicy::default()).map_err(err)?;
    let (mut df, mut dg) = (0.0f64, 0.0f64);
    for x in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let pair = objective.pair_at(x).map_err(err)?;
        let f = x * 2f64.sqrt() / (1.0 + 2.0 * x * x).sqrt();
        let g = 2.0 * (1.0 + x * x).sqrt() / (2.0 + x * x);
        df = df.max((pair.f - f).abs());
        dg = dg.max((pair.g - g).abs());
    }
    ensure(
        df < 1e-3 && dg < 1e-3,
        format!("max|dF|={df:.2e} max|dG|={dg:.2e}"),
    )
}

fn c4_pipeline_equivalence() -> Outcome {
    let signal = vacuum(2048);
    let mut worst = 0.0f64;
    for phi in [FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8] {
        for var in [0.05, 0.25, 1.0] {
            let p = probe(var);
            for x0 in [-0.25, 0.0, 0.25] {
                let raw = conditional_state_raw(&signal, &p, phi, x0).map_err(err)?;
                let shifted = feedback_displace(&raw, x0, phi).map_err(err)?;
                let out = output_squeeze(&shifted, phi).map_err(err)?;
                let closed = conditional_output(&signal, &p, phi, x0).map_err(err)?;
                worst = worst.max(l2_distance(&out, &closed).map_err(err)?);
            }
        }
    }
    ensure(
        worst < 1e-6,
        format!("27 configurations, max L2={worst:.2e}"),
    )
}

fn c5_projective_limit() -> Outcome {
    let sigma2: f64 = 0.25;
    let sigma = sigma2.sqrt();
    let signal = vacuum(4096);
    let phi = FRAC_PI_4;
    let tan2 = phi.tan().powi(2);
    let p = probe(1e-4 * sigma2 * tan2);
    let dist = homodyne_distribution_on(&signal, &p, phi, *signal.grid()).map_err(err)?;
    let l1 = dist.l1_distance(&density(&signal)).map_err(err)?;
    let (mut spread, mut offset) = (0.0f64, 0.0f64);
    for x0 in [-sigma, 0.0, sigma] {
        let out = density(&conditional_output(&signal, &p, phi, x0).map_err(err)?);
        spread = spread.max(out.std_dev());
        offset = offset.max((out.mean() - x0).abs());
    }
    ensure(
        l1 < 0.02 && spread < 0.02 * sigma && offset < 0.02 * sigma,
        format!(
            "L1={l1:.2e} std/sigma_s={:.2e} offset/sigma_s={:.2e}",
            spread / sigma,
            offset / sigma
        ),
    )
}

fn c6_non_destructive_limit() -> Outcome {
    let sigma2: f64 = 0.25;
    let sigma = sigma2.sqrt();
    let signal = vacuum(2048);
    let phi = FRAC_PI_4;
    let tan2 = phi.tan().powi(2);
    let probe_var = 1e4 * sigma2 * tan2;
    let p = probe(probe_var);
    let mut min_overlap = f64::INFINITY;
    for k in 0..=8 {
        let x0 = -2.0 * sigma + k as f64 * 0.5 * sigma;
        let out = conditional_output(&signal, &p, phi, x0).map_err(err)?;
        min_overlap = min_overlap.min(overlap(&signal, &out).map_err(err)?.norm_sqr());
    }
    let dist = homodyne_distribution(&signal, &p, phi).map_err(err)?;
    // probe variance is 1/Σ²
    let expected = probe_var / tan2;
    let rel = (dist.variance() - expected).abs() / expected;
    ensure(
        min_overlap > 0.99 && rel < 0.01 && dist.mean().abs() < 0.01 * expected.sqrt(),
        format!("min |<psi_s|psi_x0>|^2={min_overlap:.8} rel. variance error={rel:.2e}"),
    )
}

fn c7_vacuum_convolution() -> Outcome {
    let signal = vacuum(2048);
    let vac = probe(0.25);
    let phi = FRAC_PI_4;
    let dist = homodyne_distribution(&signal, &vac, phi).map_err(err)?;
    let var = 0.25 + 0.25 / phi.tan().powi(2);
    let exact = Distribution::new(
        *dist.grid(),
        dist.grid()
            .points()
            .map(|x| (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
            .collect(),
    )
    .map_err(err)?;
    let l1 = dist.l1_distance(&exact).map_err(err)?;

    let cat_grid = Grid::centered(0.0, 7.0, 2048).map_err(err)?;
    let cat = build_cat(1.5, 0.25, cat_grid).map_err(err)?;
    let phi_cat = 1.0;
    let cat_dist = homodyne_distribution_on(&cat, &vac, phi_cat, cat_grid).map_err(err)?;
    let conv = gaussian_convolution(&density(&cat), 0.25 / phi_cat.tan().powi(2), &cat_dist)
        .map_err(err)?;
    let l1_cat = cat_dist.l1_distance(&conv).map_err(err)?;

    let dv = (dist.variance() - 0.5).abs();
    ensure(
        l1 < 1e-6 && l1_cat < 1e-6 && dv <= 1e-4,
        format!(
            "L1 gaussian={l1:.2e} L1 cat={l1_cat:.2e} variance={:.8}",
            dist.variance()
        ),
    )
}

fn c8_unitarity() -> Outcome {
    let signal = vacuum(512);
    let (mut bs, mut mass, mut cond) = (0.0f64, 0.0f64, 0.0f64);
    for phi in [0.3, FRAC_PI_4, 1.2] {
        for var in [0.05, 0.25, 1.0] {
            let p = GridPolicy::new(512, 10.0)
                .unwrap()
                .gaussian(GaussianSpec::new(0.0, var).unwrap())
                .map_err(err)?;
            let joint = beam_splitter_transform(&signal, &p, phi).map_err(err)?;
            bs = bs.max((joint.norm_squared() - 1.0).abs());

            let dist = homodyne_distribution(&signal, &p, phi).map_err(err)?;
            let grid = dist.grid();
            let raw: Vec<f64> = grid
                .points()
                .map(|x0| homodyne_density_at(&signal, &p, phi, x0))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            mass = mass.max((grid.integrate(&raw) - 1.0).abs());
            mass = mass.max((dist.mass() - 1.0).abs());

            for x0 in [-0.5, 0.0, 0.3] {
                let out = conditional_output(&signal, &p, phi, x0).map_err(err)?;
                cond = cond.max((out.norm_squared() - 1.0).abs());
            }
        }
    }
    ensure(
        bs < 1e-6 && mass < 1e-8 && cond < 1e-9,
        format!("|joint norm-1|={bs:.2e} |mass-1|={mass:.2e} |cond norm-1|={cond:.2e}"),
    )
}

fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

fn c9_monte_carlo() -> Outcome {
    let n = 100_000;
    let signal = vacuum(2048);
    let p = probe(0.25);
    let phi = FRAC_PI_4;
    let dist = homodyne_distribution(&signal, &p, phi).map_err(err)?;
    let mut xs = sample_outcomes(&dist, n, 7).map_err(err)?;
    let again = sample_outcomes(&dist, n, 7).map_err(err)?;
    let other = sample_outcomes(&dist, n, 8).map_err(err)?;
    let repeatable = xs == again && xs != other;
    xs.sort_by(f64::total_cmp);
    let exact = Normal::new(0.0, 0.5f64.sqrt()).unwrap();
    let d = ks_statistic(&xs, |x| exact.cdf(x));
    let critical = 1.63 / (n as f64).sqrt();
    ensure(
        d < critical && repeatable,
        format!("D={d:.5} critical={critical:.5} repeatable={repeatable}"),
    )
}

fn c10_output_ensemble() -> Outcome {
    let n = 512;
    let policy = GridPolicy::new(n, 10.0).unwrap();
    let signals = [
        ("gaussian", vacuum(n)),
        (
            "cat",
            build_cat(1.0, 0.25, policy.grid_for_cat(1.0, 0.25).unwrap()).map_err(err)?,
        ),
    ];
    let (mut dfid, mut dtr, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    for (_, signal) in &signals {
        let p = policy
            .gaussian(GaussianSpec::new(0.0, 0.2).unwrap())
            .map_err(err)?;
        let phi = 0.9;
        let rho = output_ensemble(signal, &p, phi).map_err(err)?;
        let f = state_fidelity(signal, &p, phi).map_err(err)?;
        dfid = dfid.max((rho.expectation(signal).map_err(err)? - f).abs());
        dtr = dtr.max((rho.trace() - 1.0).abs());
        min_eig = min_eig.min(rho.min_eigenvalue());
    }
    ensure(
        dfid < 1e-4 && dtr < 1e-6 && min_eig >= -1e-8,
        format!("|<rho>-F|={dfid:.2e} |tr-1|={dtr:.2e} min eig={min_eig:.2e} (n={n})"),
    )
}

fn c11_non_gaussian() -> Outcome {
    let policy = GridPolicy::new(1024, 10.0).unwrap();
    let signal = build_cat(1.0, 0.25, policy.grid_for_cat(1.0, 0.25).unwrap()).map_err(err)?;
    let sigma_s = density(&signal).std_dev();
    let phi = FRAC_PI_4;
    let widths: Vec<f64> = (0..9)
        .map(|k| sigma_s * 10f64.powf(-1.0 + 0.25 * k as f64))
        .collect();
    // filter width σ_p / tan φ
    let variances: Vec<f64> = widths.iter().map(|w| (w * phi.tan()).powi(2)).collect();
    let curve = numeric_trade_off_curve(&signal, &variances, phi).map_err(err)?;
    let f_up = curve.windows(2).all(|w| w[1].f >= w[0].f);
    let g_down = curve.windows(2).all(|w| w[1].g <= w[0].g);
    let sums: Vec<f64> = curve.iter().map(|p| p.sum()).collect();
    let best = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let interior = sums[0] < best && sums[sums.len() - 1] < best;
    ensure(
        f_up && g_down && interior,
        format!(
            "F non-decreasing={f_up} G non-increasing={g_down} F+G ends {:.4}/{:.4} max {:.4}",
            sums[0],
            sums[sums.len() - 1],
            best
        ),
    )
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "optimal trade-off",
            budget: Some(Duration::from_secs(1)),
            run: c1_optimal_trade_off,
        },
        Criterion {
            id: 2,
            name: "equal-fidelity point",
            budget: Some(Duration::from_secs(1)),
            run: c2_equal_fidelity,
        },
        Criterion {
            id: 3,
            name: "closed-form vs numeric fidelities",
            budget: Some(Duration::from_secs(30)),
            run: c3_closed_vs_numeric,
        },
        Criterion {
            id: 4,
            name: "pipeline equivalence",
            budget: Some(Duration::from_secs(10)),
            run: c4_pipeline_equivalence,
        },
        Criterion {
            id: 5,
            name: "projective limit",
            budget: None,
            run: c5_projective_limit,
        },
        Criterion {
            id: 6,
            name: "non-destructive limit",
            budget: None,
            run: c6_non_destructive_limit,
        },
        Criterion {
            id: 7,
            name: "vacuum-probe convolution",
            budget: None,
            run: c7_vacuum_convolution,
        },
        Criterion {
            id: 8,
            name: "unitarity and normalization",
            budget: None,
            run: c8_unitarity,
        },
        Criterion {
            id: 9,
            name: "Monte Carlo consistency",
            budget: Some(Duration::from_secs(5)),
            run: c9_monte_carlo,
        },
        Criterion {
            id: 10,
            name: "output ensemble consistency",
            budget: None,
            run: c10_output_ensemble,
        },
        Criterion {
            id: 11,
            name: "non-Gaussian properties",
            budget: None,
            run: c11_non_gaussian,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let over = c.budget.is_some_and(|b| elapsed > b);
        let (passed, detail) = match result {
            Ok(d) => (!over, d),
            Err(d) => (false, d),
        };
        if !passed {
            failures += 1;
        }
        let budget = c.budget.map_or(String::new(), |b| format!(" / {:.0?}", b));
        println!(
            "{} [{:>2}] {}: {} ({:.2?}{})",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed,
            budget
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
