//! Locating the best information/disturbance compromise.
//!
//! The objective `F + G` is maximized with a 64-point coarse scan followed by
//! golden-section refinement inside the best scan cell; the equal-fidelity
//! point is the bisection root of `F − G`.

use serde::Serialize;

use crate::error::{ensure_positive, QndError, Result};
use crate::fidelity::{
    fidelity_pair, gaussian_distribution_fidelity, gaussian_state_fidelity, FidelityPair,
};
use crate::grid_wavefunction::{density, GaussianSpec, GridPolicy, WaveFunction};
use crate::measurement_chain::Phase;

/// Default search interval for the trade-off parameter.
pub const DEFAULT_BRACKET: (f64, f64) = (0.05, 20.0);

/// Points in the unimodality pre-scan.
pub const COARSE_SCAN_POINTS: usize = 64;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;
const MAX_BISECTIONS: usize = 200;

/// Closed-form fidelities for Gaussian signal and probe.
pub fn trade_off(x: f64) -> Result<FidelityPair> {
    Ok(FidelityPair {
        f: gaussian_state_fidelity(x)?,
        g: gaussian_distribution_fidelity(x)?,
        x: Some(x),
    })
}

/// `σ_p / (σ_s tan φ)`.
pub fn trade_off_parameter(sigma_s: f64, sigma_p: f64, phi: f64) -> Result<f64> {
    ensure_positive("signal width", sigma_s)?;
    ensure_positive("probe width", sigma_p)?;
    Ok(sigma_p / (sigma_s * Phase::new(phi)?.tan))
}

/// Interferometer phase realizing `x_target` for the given widths.
pub fn tune_phase(sigma_s: f64, sigma_p: f64, x_target: f64) -> Result<f64> {
    ensure_positive("signal width", sigma_s)?;
    ensure_positive("probe width", sigma_p)?;
    ensure_positive("x", x_target)?;
    let phi = (sigma_p / (sigma_s * x_target)).atan();
    Phase::new(phi).map_err(|_| QndError::PhaseOutOfRange { phi })?;
    Ok(phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    /// The coarse scan saw more than one strict local maximum.
    pub multimodal: bool,
}

fn checked(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QndError::NonFiniteObjective { x })
    }
}

fn check_bracket(lo: f64, hi: f64) -> Result<()> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(QndError::InvalidBracket { lo, hi });
    }
    Ok(())
}

/// Maximizes `objective` on `[lo, hi]` until the bracket is narrower than `tol`.
pub fn maximize_trade_off(
    mut objective: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Maximum> {
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(QndError::InvalidBracket { lo, hi });
    }
    ensure_positive("tolerance", tol)?;
    let mut evaluations = 0;
    let mut eval = |x: f64| -> Result<f64> {
        evaluations += 1;
        checked(x, objective(x)?)
    };

    let step = (hi - lo) / (COARSE_SCAN_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..COARSE_SCAN_POINTS)
        .map(|k| lo + k as f64 * step)
        .collect();
    let fs = xs.iter().map(|&x| eval(x)).collect::<Result<Vec<f64>>>()?;
    let peaks = (0..fs.len())
        .filter(|&k| {
            let left = k == 0 || fs[k] > fs[k - 1];
            let right = k + 1 == fs.len() || fs[k] > fs[k + 1];
            left && right
        })
        .count();
    let multimodal = peaks > 1;
    if multimodal {
        log::warn!("objective has {peaks} local maxima on the coarse scan of [{lo}, {hi}]");
    }
    let best = fs
        .iter()
        .enumerate()
        .fold(0, |b, (k, &v)| if v > fs[b] { k } else { b });

    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(xs.len() - 1)];
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a >= tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = eval(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let value = eval(x)?;
    Ok(Maximum {
        x,
        value,
        evaluations,
        multimodal,
    })
}

/// Result of a root search for `F = G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub x: f64,
    pub pair: FidelityPair,
    pub evaluations: usize,
}

/// Bisection for `F(x) = G(x)` with residual `|F − G| < tol`.
pub fn equal_fidelity_crossing(
    mut pair_at: impl FnMut(f64) -> Result<FidelityPair>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Crossing> {
    check_bracket(lo, hi)?;
    ensure_positive("tolerance", tol)?;
    let mut evaluations = 0;
    let mut eval = |x: f64| -> Result<FidelityPair> {
        evaluations += 1;
        let p = pair_at(x)?;
        checked(x, p.f - p.g)?;
        Ok(p)
    };
    let (mut a, mut b) = (lo, hi);
    let pa = eval(a)?;
    let pb = eval(b)?;
    let fa = pa.f - pa.g;
    if fa.abs() < tol {
        return Ok(Crossing {
            x: a,
            pair: pa,
            evaluations,
        });
    }
    if (pb.f - pb.g).abs() < tol {
        return Ok(Crossing {
            x: b,
            pair: pb,
            evaluations,
        });
    }
    if fa.signum() == (pb.f - pb.g).signum() {
        return Err(QndError::NoSignChange { lo, hi });
    }
    let mut sign_a = fa.signum();
    for _ in 0..MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        let pm = eval(m)?;
        let r = pm.f - pm.g;
        if r.abs() < tol || b - a <= f64::EPSILON * m {
            return Ok(Crossing {
                x: m,
                pair: pm,
                evaluations,
            });
        }
        if r.signum() == sign_a {
            a = m;
            sign_a = r.signum();
        } else {
            b = m;
        }
    }
    let m = 0.5 * (a + b);
    Ok(Crossing {
        x: m,
        pair: eval(m)?,
        evaluations,
    })
}

/// Closed-form equal-fidelity point on `[lo, hi]`.
pub fn equal_fidelity_point(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    Ok(equal_fidelity_crossing(trade_off, lo, hi, tol)?.x)
}

/// Optimization summary written by the `optimize` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeOffReport {
    pub mode: String,
    pub x_m: f64,
    #[serde(rename = "F_at_xm")]
    pub f_at_xm: f64,
    #[serde(rename = "G_at_xm")]
    pub g_at_xm: f64,
    pub x_e: f64,
    #[serde(rename = "F_at_xe")]
    pub f_at_xe: f64,
    #[serde(rename = "G_at_xe")]
    pub g_at_xe: f64,
    pub evaluations: usize,
    pub tolerance: f64,
    pub multimodal_warning: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuned_phase: Option<f64>,
}

impl TradeOffReport {
    /// Adds the phase that realizes `x_m` for the given signal and probe
    /// standard deviations.
    pub fn with_tuned_phase(mut self, sigma_s: f64, sigma_p: f64) -> Result<Self> {
        self.tuned_phase = Some(tune_phase(sigma_s, sigma_p, self.x_m)?);
        Ok(self)
    }
}

fn report(
    mode: &str,
    mut pair_at: impl FnMut(f64) -> Result<FidelityPair>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<TradeOffReport> {
    let max = maximize_trade_off(|x| pair_at(x).map(|p| p.sum()), lo, hi, tol)?;
    let at_max = pair_at(max.x)?;
    let cross = equal_fidelity_crossing(&mut pair_at, lo, hi, tol)?;
    Ok(TradeOffReport {
        mode: mode.to_string(),
        x_m: max.x,
        f_at_xm: at_max.f,
        g_at_xm: at_max.g,
        x_e: cross.x,
        f_at_xe: cross.pair.f,
        g_at_xe: cross.pair.g,
        evaluations: max.evaluations + 1 + cross.evaluations,
        tolerance: tol,
        multimodal_warning: max.multimodal,
        tuned_phase: None,
    })
}

/// Optimization over the Gaussian closed forms.
pub fn optimize_closed(lo: f64, hi: f64, tol: f64) -> Result<TradeOffReport> {
    report("closed", trade_off, lo, hi, tol)
}

/// Numeric fidelities as a function of the trade-off parameter for a fixed
/// signal and phase. The probe is a centred Gaussian whose standard deviation
/// is `x σ_s tan φ`, `σ_s` being the standard deviation of the signal's
/// quadrature density.
pub struct NumericTradeOff<'a> {
    signal: &'a WaveFunction,
    phase: Phase,
    sigma_s: f64,
    policy: GridPolicy,
}

impl<'a> NumericTradeOff<'a> {
    pub fn new(signal: &'a WaveFunction, phi: f64, policy: GridPolicy) -> Result<Self> {
        Ok(Self {
            signal,
            phase: Phase::new(phi)?,
            sigma_s: density(signal).std_dev(),
            policy,
        })
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    pub fn probe_variance(&self, x: f64) -> f64 {
        (x * self.sigma_s * self.phase.tan).powi(2)
    }

    pub fn pair_at(&self, x: f64) -> Result<FidelityPair> {
        ensure_positive("x", x)?;
        let probe = self
            .policy
            .gaussian(GaussianSpec::new(0.0, self.probe_variance(x))?)?;
        let mut pair = fidelity_pair(self.signal, &probe, self.phase.phi)?;
        if pair.x.is_some() {
            pair.x = Some(x);
        }
        Ok(pair)
    }
}

/// Optimization over numerically evaluated fidelities.
pub fn optimize_numeric(
    objective: &NumericTradeOff<'_>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<TradeOffReport> {
    report("numeric", |x| objective.pair_at(x), lo, hi, tol)
}

/// Numeric `(F, G)` for each probe variance, in input order. The probe
/// lattice has as many nodes as the signal lattice.
pub fn numeric_trade_off_curve(
    signal: &WaveFunction,
    probe_variances: &[f64],
    phi: f64,
) -> Result<Vec<FidelityPair>> {
    Phase::new(phi)?;
    let policy = GridPolicy {
        n_points: signal.grid().n_points(),
        ..GridPolicy::default()
    };
    probe_variances
        .iter()
        .enumerate()
        .map(|(index, &v)| {
            GaussianSpec::new(0.0, v)
                .and_then(|spec| policy.gaussian(spec))
                .and_then(|probe| fidelity_pair(signal, &probe, phi))
                .map_err(|e| QndError::AtPoint {
                    index,
                    source: Box::new(e),
                })
        })
        .collect()
}
