//! Limit and consistency checks run by `qnd-sim validate`.
//!
//! * `squeezed_limit`: filter width `1e-4 σ_s²`; the homodyne density must
//!   match `|ψ_s|²` and conditional outputs must collapse onto `x0`.
//! * `anti_squeezed_limit`: filter width `1e4 σ_s²`; outputs must stay close
//!   to the input and the homodyne density must flatten into a wide Gaussian.
//! * `vacuum_convolution`: vacuum probe against an explicit Gaussian
//!   convolution of `|ψ_s|²`.
//! * `pipeline_equivalence`: projection, displacement and squeezing composed
//!   against the closed-form output on a 3×3×3 sweep.
//! * `joint_marginal`: homodyne density against the mode-2 marginal of the
//!   two-mode state.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{QndError, Result};
use crate::grid_wavefunction::{
    density, l2_distance, overlap, Distribution, GaussianSpec, GridPolicy, WaveFunction,
};
use crate::measurement_chain::{
    beam_splitter_transform, conditional_output, conditional_state_raw, feedback_displace,
    homodyne_distribution, output_squeeze, Phase,
};

pub const SQUEEZED_FILTER_RATIO: f64 = 1e-4;
pub const ANTI_SQUEEZED_FILTER_RATIO: f64 = 1e4;
pub const SQUEEZED_L1_MAX: f64 = 0.02;
pub const SQUEEZED_COLLAPSE_MAX: f64 = 0.02;
pub const ANTI_SQUEEZED_OVERLAP_MIN: f64 = 0.99;
pub const ANTI_SQUEEZED_VARIANCE_REL_MAX: f64 = 0.01;
pub const VACUUM_L1_MAX: f64 = 1e-6;
pub const VACUUM_VARIANCE_TOL: f64 = 1e-4;
pub const PIPELINE_L2_MAX: f64 = 1e-6;
pub const MARGINAL_L1_MAX: f64 = 1e-4;

/// Lattice size for the two-mode marginal check; storage is quadratic.
const JOINT_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Limits,
    Pipeline,
    All,
}

impl FromStr for Suite {
    type Err = QndError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "limits" => Ok(Suite::Limits),
            "pipeline" => Ok(Suite::Pipeline),
            "all" => Ok(Suite::All),
            other => Err(QndError::Parse(format!("unknown suite '{other}'"))),
        }
    }
}

/// One measured quantity against its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// `"<"` or `">"`: which side of `bound` passes.
    pub relation: &'static str,
    pub passed: bool,
}

impl Measurement {
    fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            relation: "<",
            passed: value < bound,
        }
    }

    fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            relation: ">",
            passed: value > bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn from_result(name: &'static str, result: Result<Vec<Measurement>>) -> Self {
        match result {
            Ok(measurements) => Check {
                name,
                passed: measurements.iter().all(|m| m.passed),
                measurements,
                error: None,
            },
            Err(e) => Check {
                name,
                passed: false,
                measurements: Vec::new(),
                error: Some(e.to_string()),
            },
        }
    }

    /// Worst value among measurements whose name starts with `prefix`.
    pub fn worst(&self, prefix: &str) -> Option<f64> {
        let mut it = self
            .measurements
            .iter()
            .filter(|m| m.name.starts_with(prefix));
        let first = it.next()?;
        let pick = |a: f64, m: &Measurement| {
            if m.relation == "<" {
                a.max(m.value)
            } else {
                a.min(m.value)
            }
        };
        Some(it.fold(first.value, pick))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub suite: Suite,
    pub signal: String,
    pub all_passed: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Signal and lattice policy the checks run against.
pub struct Validator {
    signal: WaveFunction,
    label: String,
    policy: GridPolicy,
    sigma_s: f64,
    mean_s: f64,
}

impl Validator {
    pub fn new(signal: WaveFunction, label: impl Into<String>, policy: GridPolicy) -> Self {
        let d = density(&signal);
        Self {
            sigma_s: d.std_dev(),
            mean_s: d.mean(),
            signal,
            label: label.into(),
            policy,
        }
    }

    /// Vacuum signal on the default lattice.
    pub fn default_signal() -> Result<Self> {
        let policy = GridPolicy::default();
        let signal = policy.gaussian(GaussianSpec::vacuum())?;
        Ok(Self::new(signal, "gaussian:0,0.25", policy))
    }

    pub fn signal(&self) -> &WaveFunction {
        &self.signal
    }

    fn probe(&self, variance: f64) -> Result<WaveFunction> {
        self.policy.gaussian(GaussianSpec::new(0.0, variance)?)
    }

    pub fn run(&self, suite: Suite) -> ValidationReport {
        let mut checks = Vec::new();
        if matches!(suite, Suite::Limits | Suite::All) {
            checks.push(Check::from_result("squeezed_limit", self.squeezed_limit()));
            checks.push(Check::from_result(
                "anti_squeezed_limit",
                self.anti_squeezed_limit(),
            ));
            checks.push(Check::from_result(
                "vacuum_convolution",
                self.vacuum_convolution(),
            ));
        }
        if matches!(suite, Suite::Pipeline | Suite::All) {
            checks.push(Check::from_result(
                "pipeline_equivalence",
                self.pipeline_equivalence(),
            ));
            checks.push(Check::from_result("joint_marginal", self.joint_marginal()));
        }
        ValidationReport {
            suite,
            signal: self.label.clone(),
            all_passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// Outcomes at the signal mean and ±1 standard deviation.
    fn probe_outcomes(&self) -> [f64; 3] {
        [
            self.mean_s - self.sigma_s,
            self.mean_s,
            self.mean_s + self.sigma_s,
        ]
    }

    pub fn squeezed_limit(&self) -> Result<Vec<Measurement>> {
        let phi = FRAC_PI_4;
        let t = Phase::new(phi)?.tan;
        let s2 = self.sigma_s * self.sigma_s;
        // filter width Σ²/tan²φ = 1e-4 σ_s²
        let probe = self.probe(SQUEEZED_FILTER_RATIO * s2 * t * t)?;
        let p = homodyne_distribution(&self.signal, &probe, phi)?;
        let l1 = p.l1_distance(&density(&self.signal))?;
        let mut out = vec![Measurement::below(
            "l1_homodyne_vs_intrinsic",
            l1,
            SQUEEZED_L1_MAX,
        )];
        let bound = SQUEEZED_COLLAPSE_MAX * self.sigma_s;
        for x0 in self.probe_outcomes() {
            let psi = conditional_output(&self.signal, &probe, phi, x0)?;
            let d = density(&psi);
            out.push(Measurement::below(
                format!("output_std@{x0}"),
                d.std_dev(),
                bound,
            ));
            out.push(Measurement::below(
                format!("output_offset@{x0}"),
                (d.mean() - x0).abs(),
                bound,
            ));
        }
        Ok(out)
    }

    pub fn anti_squeezed_limit(&self) -> Result<Vec<Measurement>> {
        let phi = FRAC_PI_4;
        let t = Phase::new(phi)?.tan;
        let s2 = self.sigma_s * self.sigma_s;
        // anti-squeezed probe of parameter Σ² has variance 1/Σ²; the filter
        // variance 1/(Σ² tan²φ) is set to 1e4 σ_s²
        let filter = ANTI_SQUEEZED_FILTER_RATIO * s2;
        let sigma2 = 1.0 / (filter * t * t);
        let probe = self.policy.gaussian(GaussianSpec::anti_squeezed(sigma2)?)?;
        let mut out = Vec::new();
        for k in 0..=8 {
            let x0 = self.mean_s + self.sigma_s * (-2.0 + 0.5 * k as f64);
            let psi = conditional_output(&self.signal, &probe, phi, x0)?;
            let f = overlap(&psi, &self.signal)?.norm_sqr();
            out.push(Measurement::above(
                format!("overlap_sq@{x0}"),
                f,
                ANTI_SQUEEZED_OVERLAP_MIN,
            ));
        }
        let p = homodyne_distribution(&self.signal, &probe, phi)?;
        let rel = (p.moment(|x| x * x) - filter).abs() / filter;
        out.push(Measurement::below(
            "variance_rel_error",
            rel,
            ANTI_SQUEEZED_VARIANCE_REL_MAX,
        ));
        Ok(out)
    }

    pub fn vacuum_convolution(&self) -> Result<Vec<Measurement>> {
        let probe = self.probe(GaussianSpec::vacuum().variance)?;
        let rho = density(&self.signal);
        let mut out = Vec::new();
        for phi in [FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8] {
            let t = Phase::new(phi)?.tan;
            let p = homodyne_distribution(&self.signal, &probe, phi)?;
            let reference = gaussian_convolution(&rho, 1.0 / (4.0 * t * t), &p)?;
            out.push(Measurement::below(
                format!("l1_vs_convolution@phi={phi:.6}"),
                p.l1_distance(&reference)?,
                VACUUM_L1_MAX,
            ));
            let expected = rho.variance() + 1.0 / (4.0 * t * t);
            out.push(Measurement::below(
                format!("variance_error@phi={phi:.6}"),
                (p.variance() - expected).abs(),
                VACUUM_VARIANCE_TOL,
            ));
        }
        Ok(out)
    }

    pub fn pipeline_equivalence(&self) -> Result<Vec<Measurement>> {
        let mut out = Vec::new();
        for phi in [PI / 8.0, PI / 4.0, 3.0 * PI / 8.0] {
            for sigma2 in [0.05, 0.25, 1.0] {
                let probe = self.probe(sigma2)?;
                for x0 in [
                    self.mean_s - 0.5 * self.sigma_s,
                    self.mean_s,
                    self.mean_s + 0.5 * self.sigma_s,
                ] {
                    let raw = conditional_state_raw(&self.signal, &probe, phi, x0)?;
                    let chained = output_squeeze(&feedback_displace(&raw, x0, phi)?, phi)?;
                    let direct = conditional_output(&self.signal, &probe, phi, x0)?;
                    let d = l2_distance(&chained.resample(direct.grid())?, &direct)?;
                    out.push(Measurement::below(
                        format!("l2@phi={phi:.6},var={sigma2},x0={x0}"),
                        d,
                        PIPELINE_L2_MAX,
                    ));
                }
            }
        }
        Ok(out)
    }

    pub fn joint_marginal(&self) -> Result<Vec<Measurement>> {
        let signal = self.signal.resample(&crate::grid_wavefunction::Grid::new(
            self.signal.grid().x_min(),
            self.signal.grid().x_max(),
            JOINT_POINTS,
        )?)?;
        let policy = GridPolicy {
            n_points: JOINT_POINTS,
            ..self.policy
        };
        let mut out = Vec::new();
        for (phi, sigma2) in [(FRAC_PI_4, 0.25), (0.5, 0.1), (1.1, 0.6)] {
            let probe = policy.gaussian(GaussianSpec::new(0.0, sigma2)?)?;
            let joint = beam_splitter_transform(&signal, &probe, phi)?;
            let marginal = joint.marginal_mode2()?;
            let p = homodyne_distribution(&signal, &probe, phi)?;
            let s = Phase::new(phi)?.sin;
            let diff: Vec<f64> = p
                .grid()
                .points()
                .zip(p.values())
                .map(|(x0, &v)| (v - s * marginal.value_at(-x0 * s)).abs())
                .collect();
            out.push(Measurement::below(
                format!("l1@phi={phi:.6},var={sigma2}"),
                p.grid().integrate(&diff),
                MARGINAL_L1_MAX,
            ));
            out.push(Measurement::below(
                format!("norm_error@phi={phi:.6},var={sigma2}"),
                (joint.norm_squared() - 1.0).abs(),
                1e-6,
            ));
        }
        Ok(out)
    }
}

/// `∫ ρ(y) N(y; x0, variance) dy` at the nodes of `like`, with the Gaussian
/// evaluated analytically.
pub fn gaussian_convolution(
    rho: &Distribution,
    variance: f64,
    like: &Distribution,
) -> Result<Distribution> {
    let g = rho.grid();
    let norm = (2.0 * PI * variance).sqrt().recip();
    let vals = like
        .grid()
        .points()
        .map(|x0| {
            let integrand: Vec<f64> = g
                .points()
                .zip(rho.values())
                .map(|(y, &r)| r * norm * (-(y - x0) * (y - x0) / (2.0 * variance)).exp())
                .collect();
            g.integrate(&integrand)
        })
        .collect();
    Distribution::from_unnormalized(*like.grid(), vals)
}
