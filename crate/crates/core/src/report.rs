//! Machine-readable reports.
//!
//! These are the JSON payloads the CLI prints and the C API returns as
//! strings. Field order is fixed by declaration order, and complex numbers
//! are always `[re, im]` pairs, so identical inputs serialize to identical
//! bytes.

use serde::Serialize;

use crate::contextuality::{
    build_nc_problem_with, check_conditions, nc_bound_lp, ConditionReport, NcBoundResult,
};
use crate::error::Result;
use crate::hilbert::Operator;
use crate::montecarlo::{
    estimate_p_minus, estimate_p_minus_conditional, estimate_pass_rate, Estimate, SampleBatch,
};
use crate::pointer::{
    abc, disturbance, p_minus, p_minus_quadrature_with, povm_completeness_residual,
    s_by_quadrature, Scenario,
};
use crate::quad::{adaptive_simpson, QuadratureConfig};
use crate::scenario::{from_complex, operator_to_rows};
use crate::weakvalues::{detect_anomaly, projector_weak_values, weak_value};

#[derive(Debug, Clone, Serialize)]
pub struct ProjectorWeakValueEntry {
    pub eigenvalue: f64,
    pub weak_value: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub re_weak_value: f64,
    pub weak_value: [f64; 2],
    pub projector: Vec<Vec<[f64; 2]>>,
}

/// Output of the `weakvalue` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct WeakValueReport {
    pub observable: String,
    pub weak_value: [f64; 2],
    pub projector_weak_values: Vec<ProjectorWeakValueEntry>,
    pub eigen_range: [f64; 2],
    pub anomalous: bool,
    pub witness: Option<WitnessReport>,
}

impl WeakValueReport {
    /// Weak-value analysis of `observable`, defaulting to the scenario's
    /// measured projector when no observable is supplied.
    pub fn build(scenario: &Scenario, observable: Option<&Operator>) -> Result<WeakValueReport> {
        let (op, label) = match observable {
            Some(a) => (a.clone(), "observable".to_string()),
            None => (scenario.pi().clone(), "projector".to_string()),
        };
        let value = weak_value(&op, scenario.psi(), scenario.phi())?;
        let projectors = projector_weak_values(&op, scenario.psi(), scenario.phi())?;
        let anomaly = detect_anomaly(&op, scenario.psi(), scenario.phi())?;
        let witness = match (&anomaly.witness_projector, &anomaly.witness_weak_value) {
            (Some(p), Some(w)) => Some(WitnessReport {
                re_weak_value: w.re,
                weak_value: from_complex(*w),
                projector: operator_to_rows(p),
            }),
            _ => None,
        };
        Ok(WeakValueReport {
            observable: label,
            weak_value: from_complex(value.value),
            projector_weak_values: projectors
                .into_iter()
                .map(|(eigenvalue, w)| ProjectorWeakValueEntry {
                    eigenvalue,
                    weak_value: from_complex(w.value),
                })
                .collect(),
            eigen_range: [anomaly.eigen_range.0, anomaly.eigen_range.1],
            anomalous: anomaly.anomalous,
            witness,
        })
    }
}

/// Output of the `measure` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub sigma: f64,
    pub delta: f64,
    pub p_d: f64,
    pub normalization_sq: f64,
    pub pass_rate: f64,
    pub e_d: Vec<Vec<[f64; 2]>>,
    pub s: Vec<Vec<[f64; 2]>>,
}

impl MeasureReport {
    pub fn build(scenario: &Scenario) -> MeasureReport {
        let m = disturbance(scenario);
        MeasureReport {
            sigma: scenario.sigma(),
            delta: m.delta,
            p_d: m.p_d,
            normalization_sq: m.normalization_sq,
            pass_rate: m.s_expectation(),
            e_d: operator_to_rows(&m.e_d),
            s: operator_to_rows(&m.s),
        }
    }
}

/// Output of the `check` subcommand: the condition report plus `p_-` detail.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub sigma: f64,
    #[serde(flatten)]
    pub conditions: ConditionReport,
    pub p_minus_conditional: f64,
    pub p_minus_asymptotic: f64,
}

impl CheckReport {
    pub fn build(scenario: &Scenario) -> CheckReport {
        let conditions = check_conditions(scenario);
        let p = p_minus(scenario);
        CheckReport {
            sigma: scenario.sigma(),
            conditions,
            p_minus_conditional: p.conditional,
            p_minus_asymptotic: p.asymptotic,
        }
    }
}

/// Output of the `bound` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub sigma: f64,
    pub n_bins: usize,
    pub p_phi: f64,
    pub p_d: f64,
    pub quantum_p_minus: f64,
    #[serde(flatten)]
    pub result: NcBoundResult,
    pub bin_edges: Vec<f64>,
}

impl BoundReport {
    pub fn build(scenario: &Scenario, n_bins: usize, tail_sigmas: f64) -> Result<BoundReport> {
        let problem = build_nc_problem_with(scenario, n_bins, tail_sigmas)?;
        let result = nc_bound_lp(&problem)?;
        Ok(BoundReport {
            sigma: scenario.sigma(),
            n_bins,
            p_phi: problem.p_phi,
            p_d: problem.p_d,
            quantum_p_minus: problem.quantum_p_minus,
            result,
            bin_edges: problem.bin_edges,
        })
    }
}

/// Output of the `sample` subcommand in JSON mode.
#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub n: usize,
    pub seed: u64,
    pub p_minus: Estimate,
    pub p_minus_conditional: Option<Estimate>,
    pub pass_rate: Estimate,
    pub closed_form_p_minus: f64,
    pub closed_form_pass_rate: f64,
}

impl SampleReport {
    pub fn build(scenario: &Scenario, batch: &SampleBatch) -> Result<SampleReport> {
        Ok(SampleReport {
            n: batch.len(),
            seed: batch.seed(),
            p_minus: estimate_p_minus(batch, scenario)?,
            p_minus_conditional: estimate_p_minus_conditional(batch).ok(),
            pass_rate: estimate_pass_rate(batch)?,
            closed_form_p_minus: p_minus(scenario).exact,
            closed_form_pass_rate: disturbance(scenario).s_expectation(),
        })
    }
}

/// Output of the `xcheck` subcommand: closed forms against their defining
/// integrals.
#[derive(Debug, Clone, Serialize)]
pub struct XcheckReport {
    pub sigma: f64,
    pub tolerance: f64,
    pub p_minus_exact: f64,
    pub p_minus_quadrature: f64,
    pub p_minus_residual: f64,
    pub s_quadrature_residual: f64,
    pub s_decomposition_residual: f64,
    pub povm_completeness_residual: f64,
    pub abc_residuals: [f64; 3],
    pub pass: bool,
}

impl XcheckReport {
    pub fn build(
        scenario: &Scenario,
        config: &QuadratureConfig,
        tail_sigmas: f64,
        tolerance: f64,
    ) -> Result<XcheckReport> {
        let exact = p_minus(scenario).exact;
        let quadrature = p_minus_quadrature_with(scenario, config, tail_sigmas)?;
        let p_minus_residual = (exact - quadrature).abs();

        let m = disturbance(scenario);
        let s_quadrature_residual =
            m.s.sub(&s_by_quadrature(scenario, config, tail_sigmas)?)
                .max_norm();
        let s_decomposition_residual = m.s.sub(&m.s_from_projector_blocks()).max_norm();
        let completeness = povm_completeness_residual(scenario, config, tail_sigmas)?;

        let sigma = scenario.sigma();
        let closed = abc(sigma)?;
        let lo = -tail_sigmas * sigma;
        let a_quad = adaptive_simpson(|x| scenario.noise_density(x - 1.0), lo, 0.0, config)?;
        let b_quad = adaptive_simpson(|x| scenario.noise_density(x), lo, 0.0, config)?;
        let c_quad = adaptive_simpson(
            |x| (scenario.noise_density(x - 1.0) * scenario.noise_density(x)).sqrt(),
            lo,
            0.0,
            config,
        )?;
        let abc_residuals = [
            (closed.a - a_quad).abs(),
            (closed.b - b_quad).abs(),
            (closed.c - c_quad).abs(),
        ];

        let worst = p_minus_residual
            .max(s_quadrature_residual)
            .max(s_decomposition_residual)
            .max(completeness)
            .max(abc_residuals[0])
            .max(abc_residuals[1])
            .max(abc_residuals[2]);
        Ok(XcheckReport {
            sigma,
            tolerance,
            p_minus_exact: exact,
            p_minus_quadrature: quadrature,
            p_minus_residual,
            s_quadrature_residual,
            s_decomposition_residual,
            povm_completeness_residual: completeness,
            abc_residuals,
            pass: worst <= tolerance,
        })
    }
}
