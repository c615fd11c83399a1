//! Noncontextuality analysis: condition checking and the LP bound.
//!
//! Four operational conditions together rule out any measurement
//! noncontextual, outcome-deterministic model of a scenario:
//!
//! 1. non-orthogonal selections, `p_phi > 0`;
//! 2. the POVM is a projector plus unbiased noise,
//!    `E_x = p_n(x-1) Pi + p_n(x) Pi~` with the noise median at 0;
//! 3. the averaged post-selection effect decomposes as
//!    `S = (1-p_d)|phi><phi| + p_d E_d`;
//! 4. the post-selected negative-reading probability beats the classical
//!    threshold: `p_- > 1/2 + p_d / p_phi`.
//!
//! [`check_conditions`] reports signed margins for all four. The classical
//! threshold itself is rederived here by linear programming over the
//! response tables an ontic model could assign: outcome determinism for the
//! two sharp measurements (the projector pair and the post-selection) leaves
//! four deterministic ontic classes, measurement noncontextuality forces
//! their responses to the pointer POVM to follow the noise masses, and the
//! disturbance decomposition caps how much post-selection response the
//! non-post-selected region can carry. Discretizing the pointer axis turns
//! that into a finite LP whose optimum reproduces `1/2 + p_d/p_phi`.

use serde::Serialize;

use crate::erf::erf;
use crate::error::{Error, Result};
use crate::hilbert::{Operator, State};
use crate::pointer::{disturbance, kraus, p_minus, povm_element, Scenario};
use crate::simplex::{solve_maximize, Constraint, LinearProgram, Relation};

/// Conditions 2 and 3 hold when their reconstruction residuals stay below
/// this; closed forms should match to near machine precision.
pub const CONDITION_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Truth values and signed margins for the four conditions.
///
/// `margins[0] = p_phi`, `margins[1]` and `margins[2]` are the residual
/// tolerances minus the reconstruction residuals of the POVM and disturbance
/// decompositions, and `margins[3] = p_minus - threshold`. All four
/// conditions hold iff every margin is positive.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub p_phi: f64,
    pub p_d: f64,
    pub p_minus: f64,
    pub threshold: f64,
    pub margins: [f64; 4],
    pub all_hold: bool,
}

/// Pointer positions probed when checking the POVM reconstruction: the
/// Gaussian centres, points between them, and a few widths into both tails.
fn probe_points(sigma: f64) -> [f64; 13] {
    [
        -3.0 * sigma,
        -2.0 * sigma,
        -sigma,
        -0.5 * sigma,
        0.0,
        0.25,
        0.5,
        0.75,
        1.0,
        1.0 + 0.5 * sigma,
        1.0 + sigma,
        1.0 + 2.0 * sigma,
        1.0 + 3.0 * sigma,
    ]
}

/// Evaluates all four conditions with margins; never fails on a valid
/// scenario.
pub fn check_conditions(scenario: &Scenario) -> ConditionReport {
    let p_phi = scenario.p_phi();

    // Condition 2: E_x reconstructs as noise-weighted projectors. The two
    // routes are the closed form and the literal M_x^dag M_x product.
    let mut povm_residual = 0.0f64;
    for x in probe_points(scenario.sigma()) {
        let m = kraus(scenario, x);
        let residual = m.mul(&m).sub(&povm_element(scenario, x)).max_norm();
        povm_residual = povm_residual.max(residual);
    }

    // Condition 3: S decomposes into (1-p_d)|phi><phi| + p_d E_d. The
    // independent route keeps the projector blocks unreduced.
    let measurement = disturbance(scenario);
    let disturbance_residual = measurement
        .s
        .sub(&measurement.s_from_projector_blocks())
        .max_norm();

    // Condition 4: negative bias outweighs the disturbance.
    let p_minus_value = p_minus(scenario).exact;
    let threshold = 0.5 + measurement.p_d / p_phi;

    let margins = [
        p_phi,
        CONDITION_RESIDUAL_TOLERANCE - povm_residual,
        CONDITION_RESIDUAL_TOLERANCE - disturbance_residual,
        p_minus_value - threshold,
    ];
    ConditionReport {
        p_phi,
        p_d: measurement.p_d,
        p_minus: p_minus_value,
        threshold,
        margins,
        all_hold: margins.iter().all(|m| *m > 0.0),
    }
}

/// One scan point.
#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    pub sigma: f64,
    pub report: ConditionReport,
}

/// Condition reports over a grid of pointer widths.
#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    /// Smallest grid sigma at which all four conditions hold.
    pub sigma_threshold: Option<f64>,
}

/// Runs [`check_conditions`] across a strictly increasing sigma grid.
pub fn sigma_scan(
    psi: &State,
    phi: &State,
    pi: &Operator,
    sigma_grid: &[f64],
) -> Result<ScanResult> {
    if sigma_grid.is_empty() {
        return Err(Error::InvalidInput("sigma grid is empty".into()));
    }
    if sigma_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "sigma grid must be strictly increasing".into(),
        ));
    }
    let mut points = Vec::with_capacity(sigma_grid.len());
    let mut sigma_threshold = None;
    for &sigma in sigma_grid {
        let scenario = Scenario::new(psi.clone(), phi.clone(), pi.clone(), sigma)?;
        let report = check_conditions(&scenario);
        if report.all_hold && sigma_threshold.is_none() {
            sigma_threshold = Some(sigma);
        }
        points.push(ScanPoint { sigma, report });
    }
    Ok(ScanResult {
        points,
        sigma_threshold,
    })
}

/// One deterministic ontic class: its fixed answers to the sharp projector
/// measurement and to the post-selection measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OnticClass {
    pub responds_projector: bool,
    pub responds_post_selection: bool,
}

/// The four deterministic classes, in fixed order. Outcome determinism for
/// the two sharp measurements makes this pair of bits a sufficient statistic
/// for an ontic state, and the remaining response freedom is convex within
/// each class, so extreme points lose nothing.
pub const ONTIC_CLASSES: [OnticClass; 4] = [
    OnticClass {
        responds_projector: false,
        responds_post_selection: false,
    },
    OnticClass {
        responds_projector: false,
        responds_post_selection: true,
    },
    OnticClass {
        responds_projector: true,
        responds_post_selection: false,
    },
    OnticClass {
        responds_projector: true,
        responds_post_selection: true,
    },
];

/// Discretized input to the noncontextual-bound LP.
#[derive(Debug, Clone, Serialize)]
pub struct NcBoundProblem {
    /// Strictly increasing bin edges with one edge pinned exactly at 0, so
    /// the noise median constraint is exact rather than approximated.
    pub bin_edges: Vec<f64>,
    /// Per-bin mass of the unshifted noise `p_n(x)`.
    pub noise_mass_unshifted: Vec<f64>,
    /// Per-bin mass of the shifted noise `p_n(x-1)`.
    pub noise_mass_shifted: Vec<f64>,
    pub p_phi: f64,
    pub p_d: f64,
    /// Quantum value of `p_-` for the same scenario, carried along so the
    /// bound result can report its distance from the quantum prediction.
    pub quantum_p_minus: f64,
}

impl NcBoundProblem {
    pub fn n_bins(&self) -> usize {
        self.noise_mass_unshifted.len()
    }

    /// Indices of bins entirely on the negative axis.
    fn negative_bins(&self) -> Vec<usize> {
        (0..self.n_bins())
            .filter(|&b| self.bin_edges[b + 1] <= 0.0)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let bins = self.n_bins();
        if bins < 4 {
            return Err(Error::InvalidInput(format!(
                "need at least 4 bins, got {bins}"
            )));
        }
        if self.bin_edges.len() != bins + 1 || self.noise_mass_shifted.len() != bins {
            return Err(Error::InvalidInput(
                "bin arrays have mismatched lengths".into(),
            ));
        }
        if self.bin_edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "bin edges must strictly increase".into(),
            ));
        }
        if !self.bin_edges.contains(&0.0) {
            return Err(Error::InvalidInput(
                "one bin edge must sit exactly at 0".into(),
            ));
        }
        // Negated forms so that NaN parameters are rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.p_phi > 0.0) {
            return Err(Error::InvalidInput(format!(
                "p_phi must be positive, got {}",
                self.p_phi
            )));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.p_d >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "p_d must be nonnegative, got {}",
                self.p_d
            )));
        }
        Ok(())
    }
}

/// Builds the discretized LP input from a scenario: bins spanning
/// `[-12 sigma, 1 + 12 sigma]` with an edge pinned at 0, noise masses from
/// erf differences, and the scenario's closed-form `p_d`, `p_phi`, `p_-`.
pub fn build_nc_problem(scenario: &Scenario, n_bins: usize) -> Result<NcBoundProblem> {
    build_nc_problem_with(scenario, n_bins, crate::pointer::TAIL_SIGMAS)
}

/// [`build_nc_problem`] with an explicit tail truncation multiplier.
pub fn build_nc_problem_with(
    scenario: &Scenario,
    n_bins: usize,
    tail_sigmas: f64,
) -> Result<NcBoundProblem> {
    if n_bins < 4 {
        return Err(Error::InvalidInput(format!(
            "need at least 4 bins, got {n_bins}"
        )));
    }
    if !(tail_sigmas > 0.0 && tail_sigmas.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "tail multiplier must be positive, got {tail_sigmas}"
        )));
    }
    let sigma = scenario.sigma();
    let lo = -tail_sigmas * sigma;
    let hi = 1.0 + tail_sigmas * sigma;

    // Split bins across [lo, 0] and [0, hi] proportionally, keeping at least
    // one on each side and the shared edge exactly at zero.
    let n_neg = ((n_bins as f64 * -lo / (hi - lo)).round() as usize).clamp(1, n_bins - 1);
    let n_pos = n_bins - n_neg;
    let mut bin_edges = Vec::with_capacity(n_bins + 1);
    for k in 0..n_neg {
        bin_edges.push(lo * (1.0 - k as f64 / n_neg as f64));
    }
    bin_edges.push(0.0);
    for k in 1..=n_pos {
        bin_edges.push(hi * k as f64 / n_pos as f64);
    }

    // Mass of p_n over [a, b] is (erf(b/sigma) - erf(a/sigma)) / 2.
    let mass =
        |a: f64, b: f64, shift: f64| 0.5 * (erf((b - shift) / sigma) - erf((a - shift) / sigma));
    let noise_mass_unshifted: Vec<f64> = bin_edges
        .windows(2)
        .map(|w| mass(w[0], w[1], 0.0))
        .collect();
    let noise_mass_shifted: Vec<f64> = bin_edges
        .windows(2)
        .map(|w| mass(w[0], w[1], 1.0))
        .collect();

    Ok(NcBoundProblem {
        bin_edges,
        noise_mass_unshifted,
        noise_mass_shifted,
        p_phi: scenario.p_phi(),
        p_d: disturbance(scenario).p_d,
        quantum_p_minus: p_minus(scenario).exact,
    })
}

/// Optimal noncontextual strategy: class weights and per-unit-weight bin
/// responses `s_c[b]`, emitted for audit.
#[derive(Debug, Clone, Serialize)]
pub struct NcCertificate {
    pub weights: [f64; 4],
    pub responses: Vec<Vec<f64>>,
}

/// Output of [`nc_bound_lp`].
#[derive(Debug, Clone, Serialize)]
pub struct NcBoundResult {
    /// Exact LP optimum: the largest `p_-` any noncontextual model can show.
    pub lp_optimum: f64,
    /// The closed-form threshold `1/2 + p_d/p_phi` the LP rederives.
    pub analytic_bound: f64,
    /// `quantum p_- - lp_optimum`; positive in the contextual regime.
    pub gap_to_quantum: f64,
    pub certificate: NcCertificate,
}

/// Maximizes the model `p_-` over all noncontextual response tables.
///
/// Variables are class weights `w_c >= 0` and weighted responses
/// `t_c[b] >= 0` (the probability mass the class assigns to landing in bin
/// `b` *and* passing post-selection). Constraints:
///
/// * `sum_c w_c = 1` and `sum_{post-selecting c} w_c = p_phi` (the model
///   reproduces the post-selection statistics);
/// * `t_c[b] <= w_c * n_c[b]` where `n_c` is the shifted noise mass for
///   projector-responding classes and the unshifted mass otherwise (first
///   noncontextuality application: ignoring the post-selection outcome must
///   look like classical noise sampling);
/// * `sum_b t_c[b] <= p_d` summed over the non-post-selecting region, and
///   `<= (1-p_d) sum w_c + p_d` over the post-selecting one (second
///   application, with the disturbed effect's response relaxed to its upper
///   bound 1, which keeps this an upper bound on every model).
///
/// Objective: maximize `(1/p_phi) sum_c sum_{bins left of 0} t_c[b]`.
pub fn nc_bound_lp(problem: &NcBoundProblem) -> Result<NcBoundResult> {
    problem.validate()?;
    let bins = problem.n_bins();
    let negative: Vec<usize> = problem.negative_bins();
    let n_vars = 4 + 4 * bins;
    let t_index = |class: usize, bin: usize| 4 + class * bins + bin;

    let mut objective = vec![0.0f64; n_vars];
    for class in 0..4 {
        for &b in &negative {
            objective[t_index(class, b)] = 1.0 / problem.p_phi;
        }
    }

    let mut constraints = Vec::with_capacity(2 + 4 * bins + 2);

    // Total weight and post-selection reproduction.
    let mut total = vec![0.0; n_vars];
    let mut selected = vec![0.0; n_vars];
    for (class_index, class) in ONTIC_CLASSES.iter().enumerate() {
        total[class_index] = 1.0;
        if class.responds_post_selection {
            selected[class_index] = 1.0;
        }
    }
    constraints.push(Constraint {
        coefficients: total,
        relation: Relation::Equal,
        rhs: 1.0,
    });
    constraints.push(Constraint {
        coefficients: selected,
        relation: Relation::Equal,
        rhs: problem.p_phi,
    });

    // Per-bin response caps from the noise masses.
    for (class_index, class) in ONTIC_CLASSES.iter().enumerate() {
        let masses = if class.responds_projector {
            &problem.noise_mass_shifted
        } else {
            &problem.noise_mass_unshifted
        };
        for b in 0..bins {
            let mut row = vec![0.0; n_vars];
            row[t_index(class_index, b)] = 1.0;
            row[class_index] = -masses[b];
            constraints.push(Constraint {
                coefficients: row,
                relation: Relation::LessEq,
                rhs: 0.0,
            });
        }
    }

    // Disturbance caps per region.
    let mut no_select = vec![0.0; n_vars];
    let mut select = vec![0.0; n_vars];
    for (class_index, class) in ONTIC_CLASSES.iter().enumerate() {
        for b in 0..bins {
            if class.responds_post_selection {
                select[t_index(class_index, b)] = 1.0;
            } else {
                no_select[t_index(class_index, b)] = 1.0;
            }
        }
        if class.responds_post_selection {
            select[class_index] = -(1.0 - problem.p_d);
        }
    }
    constraints.push(Constraint {
        coefficients: no_select,
        relation: Relation::LessEq,
        rhs: problem.p_d,
    });
    constraints.push(Constraint {
        coefficients: select,
        relation: Relation::LessEq,
        rhs: problem.p_d,
    });

    let solution = solve_maximize(&LinearProgram {
        objective,
        constraints,
    })?;

    let mut weights = [0.0f64; 4];
    for (class_index, w) in weights.iter_mut().enumerate() {
        *w = solution.x[class_index].max(0.0);
    }
    let mut responses = Vec::with_capacity(4);
    for (class_index, &w) in weights.iter().enumerate() {
        let row: Vec<f64> = (0..bins)
            .map(|b| {
                if w > 1e-12 {
                    (solution.x[t_index(class_index, b)] / w).max(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        responses.push(row);
    }

    let analytic_bound = 0.5 + problem.p_d / problem.p_phi;
    Ok(NcBoundResult {
        lp_optimum: solution.objective_value,
        analytic_bound,
        gap_to_quantum: problem.quantum_p_minus - solution.objective_value,
        certificate: NcCertificate { weights, responses },
    })
}

/// Re-checks a certificate against the problem: weights and responses must be
/// feasible and reproduce the reported optimum to `tolerance`.
pub fn verify_certificate(
    problem: &NcBoundProblem,
    result: &NcBoundResult,
    tolerance: f64,
) -> Result<()> {
    let bins = problem.n_bins();
    let weights = &result.certificate.weights;
    let fail = |msg: String| Err(Error::InvalidInput(msg));

    if weights.iter().any(|&w| w < -tolerance) {
        return fail("negative class weight".into());
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > tolerance {
        return fail(format!("weights sum to {total}, not 1"));
    }
    let selected: f64 = ONTIC_CLASSES
        .iter()
        .zip(weights)
        .filter(|(c, _)| c.responds_post_selection)
        .map(|(_, w)| w)
        .sum();
    if (selected - problem.p_phi).abs() > tolerance {
        return fail(format!(
            "post-selecting weight {selected} does not reproduce p_phi = {}",
            problem.p_phi
        ));
    }

    let mut objective = 0.0;
    let mut region_sums = [0.0f64; 2]; // [no-select, select]
    for (class_index, class) in ONTIC_CLASSES.iter().enumerate() {
        let masses = if class.responds_projector {
            &problem.noise_mass_shifted
        } else {
            &problem.noise_mass_unshifted
        };
        let responses = &result.certificate.responses[class_index];
        if responses.len() != bins {
            return fail("certificate response row has wrong length".into());
        }
        let mut row_sum = 0.0;
        for b in 0..bins {
            let s = responses[b];
            if s < -tolerance || s > masses[b] + tolerance {
                return fail(format!(
                    "response s[{class_index}][{b}] = {s} outside [0, {}]",
                    masses[b]
                ));
            }
            row_sum += s;
            if problem.bin_edges[b + 1] <= 0.0 {
                objective += weights[class_index] * s;
            }
        }
        region_sums[class.responds_post_selection as usize] += weights[class_index] * row_sum;
    }
    if region_sums[0] > problem.p_d + tolerance {
        return fail(format!(
            "non-post-selecting region response {} exceeds p_d = {}",
            region_sums[0], problem.p_d
        ));
    }
    let select_cap = (1.0 - problem.p_d) * problem.p_phi + problem.p_d;
    if region_sums[1] > select_cap + tolerance {
        return fail(format!(
            "post-selecting region response {} exceeds cap {select_cap}",
            region_sums[1]
        ));
    }

    let objective = objective / problem.p_phi;
    if (objective - result.lp_optimum).abs() > tolerance {
        return fail(format!(
            "certificate objective {objective} does not reproduce optimum {}",
            result.lp_optimum
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tilted_scenario(cos2t: f64, sigma: f64) -> Scenario {
        let t = 0.5 * cos2t.acos();
        let psi = State::new(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)]).unwrap();
        let phi = State::new(vec![c(t.cos(), 0.0), c(-t.sin(), 0.0)]).unwrap();
        let pi = Operator::basis_projector(2, &[1]).unwrap();
        Scenario::new(psi, phi, pi, sigma).unwrap()
    }

    fn eigenstate_scenario(sigma: f64) -> Scenario {
        let zero = State::basis(2, 0);
        let pi = Operator::basis_projector(2, &[1]).unwrap();
        Scenario::new(zero.clone(), zero, pi, sigma).unwrap()
    }

    #[test]
    fn conditions_hold_with_expected_margin_at_sigma_10() {
        let report = check_conditions(&tilted_scenario(0.5, 10.0));
        assert!(report.all_hold, "margins: {:?}", report.margins);
        // Frozen oracle values (closed forms, cross-checked by quadrature).
        assert!((report.threshold - 0.504993755205079752).abs() < 1e-12);
        assert!(
            (report.margins[3] - 0.0249944563957228269).abs() < 1e-12,
            "margin4 = {}",
            report.margins[3]
        );
    }

    #[test]
    fn conditions_hold_in_aav_regime() {
        let report = check_conditions(&tilted_scenario(0.01, 1000.0));
        assert!(report.all_hold);
        assert!((report.threshold - 0.501249999843750013).abs() < 1e-12);
        assert!(
            (report.margins[3] - 0.0273023126545626425).abs() < 1e-9,
            "margin4 = {}",
            report.margins[3]
        );
    }

    #[test]
    fn condition_four_fails_without_anomaly() {
        let report = check_conditions(&eigenstate_scenario(10.0));
        assert!(!report.all_hold);
        assert!(
            report.margins[3] < 0.0,
            "p_- = 1/2 cannot beat the threshold"
        );
        // Conditions 1-3 still hold: the construction is sound regardless.
        assert!(report.margins[0] > 0.0);
        assert!(report.margins[1] > 0.0);
        assert!(report.margins[2] > 0.0);
    }

    #[test]
    fn scan_finds_threshold_on_increasing_grid() {
        let s = tilted_scenario(0.5, 1.0);
        let grid = [0.5, 1.0, 2.0, 5.0, 10.0, 100.0];
        let scan = sigma_scan(s.psi(), s.phi(), s.pi(), &grid).unwrap();
        assert_eq!(scan.points.len(), grid.len());
        assert_eq!(scan.sigma_threshold, Some(2.0));
        // all_hold from the threshold onward.
        for point in &scan.points {
            assert_eq!(
                point.report.all_hold,
                point.sigma >= 2.0,
                "at {}",
                point.sigma
            );
        }
    }

    #[test]
    fn scan_with_nonnegative_weak_value_never_satisfies_condition_four() {
        // Pi = |0><0| makes the projector weak value 1.5 >= 0; also check the
        // eigenstate cases with weak values 0 and 1.
        let t = 0.5 * 0.5f64.acos();
        let psi = State::new(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)]).unwrap();
        let phi = State::new(vec![c(t.cos(), 0.0), c(-t.sin(), 0.0)]).unwrap();
        let pi0 = Operator::basis_projector(2, &[0]).unwrap();
        let grid: Vec<f64> = (0..40).map(|k| 1.0 * 1.27f64.powi(k)).collect(); // 1 .. ~1.4e4
        let scan = sigma_scan(&psi, &phi, &pi0, &grid).unwrap();
        assert_eq!(scan.sigma_threshold, None);

        let zero = State::basis(2, 0);
        let scan = sigma_scan(&zero, &zero, &pi0, &grid).unwrap();
        assert_eq!(scan.sigma_threshold, None);
    }

    #[test]
    fn scan_single_point_grid() {
        let s = tilted_scenario(0.5, 10.0);
        let scan = sigma_scan(s.psi(), s.phi(), s.pi(), &[10.0]).unwrap();
        assert_eq!(scan.sigma_threshold, Some(10.0));
    }

    #[test]
    fn scan_rejects_bad_grids() {
        let s = tilted_scenario(0.5, 1.0);
        assert!(sigma_scan(s.psi(), s.phi(), s.pi(), &[]).is_err());
        assert!(sigma_scan(s.psi(), s.phi(), s.pi(), &[1.0, 1.0]).is_err());
        assert!(sigma_scan(s.psi(), s.phi(), s.pi(), &[2.0, 1.0]).is_err());
    }

    #[test]
    fn margin_four_decays_to_zero_with_sigma() {
        let s = tilted_scenario(0.5, 1.0);
        let grid = [10.0, 100.0, 1000.0, 10000.0];
        let scan = sigma_scan(s.psi(), s.phi(), s.pi(), &grid).unwrap();
        let mut last = f64::MAX;
        for point in &scan.points {
            assert!(point.report.all_hold);
            assert!(point.report.margins[3] < last, "margin must shrink");
            last = point.report.margins[3];
        }
        assert!(last < 1e-3, "margin tends to zero, got {last}");
    }

    #[test]
    fn problem_masses_are_normalized_with_exact_median_split() {
        let s = tilted_scenario(0.5, 10.0);
        let problem = build_nc_problem(&s, 200).unwrap();
        assert_eq!(problem.n_bins(), 200);
        let sum0: f64 = problem.noise_mass_unshifted.iter().sum();
        let sum1: f64 = problem.noise_mass_shifted.iter().sum();
        assert!((sum0 - 1.0).abs() < 1e-10, "unshifted mass {sum0}");
        assert!((sum1 - 1.0).abs() < 1e-10, "shifted mass {sum1}");

        let negative = problem.negative_bins();
        let neg0: f64 = negative
            .iter()
            .map(|&b| problem.noise_mass_unshifted[b])
            .sum();
        assert!((neg0 - 0.5).abs() < 1e-10, "median split {neg0}");

        // Negative-axis shifted mass equals the closed-form A integral.
        let neg1: f64 = negative
            .iter()
            .map(|&b| problem.noise_mass_shifted[b])
            .sum();
        let a = crate::pointer::abc(10.0).unwrap().a;
        assert!((neg1 - a).abs() < 1e-10, "{neg1} vs A = {a}");
    }

    #[test]
    fn build_rejects_too_few_bins() {
        let s = tilted_scenario(0.5, 10.0);
        assert!(build_nc_problem(&s, 3).is_err());
        assert!(build_nc_problem(&s, 4).is_ok());
    }

    #[test]
    fn lp_without_disturbance_caps_at_one_half() {
        let s = tilted_scenario(0.5, 10.0);
        let mut problem = build_nc_problem(&s, 40).unwrap();
        problem.p_d = 0.0;
        let result = nc_bound_lp(&problem).unwrap();
        assert!(
            (result.lp_optimum - 0.5).abs() < 1e-9,
            "optimum {}",
            result.lp_optimum
        );
    }

    #[test]
    fn lp_reproduces_analytic_bound_and_quantum_gap() {
        let s = tilted_scenario(0.5, 10.0);
        let problem = build_nc_problem(&s, 200).unwrap();
        let result = nc_bound_lp(&problem).unwrap();
        assert!(
            (result.lp_optimum - 0.504993755205079752).abs() < 1e-6,
            "optimum {}",
            result.lp_optimum
        );
        assert!(result.lp_optimum <= result.analytic_bound + 1e-9);
        assert!(
            result.gap_to_quantum > 0.023,
            "gap {}",
            result.gap_to_quantum
        );
        verify_certificate(&problem, &result, 1e-9).unwrap();
    }

    #[test]
    fn lp_certificate_survives_grid_refinement() {
        let s = tilted_scenario(0.5, 10.0);
        let coarse = nc_bound_lp(&build_nc_problem(&s, 50).unwrap()).unwrap();
        let fine = nc_bound_lp(&build_nc_problem(&s, 100).unwrap()).unwrap();
        assert!(
            fine.lp_optimum >= coarse.lp_optimum - 1e-9,
            "refinement decreased the optimum: {} -> {}",
            coarse.lp_optimum,
            fine.lp_optimum
        );
    }

    #[test]
    fn lp_soundness_and_tightness_on_random_problems() {
        let mut rng = ChaCha12Rng::seed_from_u64(71);
        for trial in 0..40 {
            let sigma = [0.5, 1.0, 3.0, 10.0][rng.gen_range(0..4)];
            let s = tilted_scenario(0.5, sigma);
            let mut problem = build_nc_problem(&s, 24).unwrap();
            problem.p_phi = rng.gen_range(0.05..0.95);
            problem.p_d = rng.gen_range(0.0..0.5);
            let result = nc_bound_lp(&problem).unwrap();
            let bound = 0.5 + problem.p_d / problem.p_phi;
            assert!(
                result.lp_optimum <= bound + 1e-9,
                "trial {trial}: optimum {} above bound {bound}",
                result.lp_optimum
            );
            // Grid-independent closed form of this LP's optimum.
            let expected = 0.5 + problem.p_d.min((1.0 - problem.p_phi) * 0.5) / problem.p_phi;
            assert!(
                (result.lp_optimum - expected).abs() < 1e-8,
                "trial {trial}: optimum {} vs expected {expected}",
                result.lp_optimum
            );
            verify_certificate(&problem, &result, 1e-8).unwrap();
        }
    }

    #[test]
    fn lp_infeasible_on_malformed_reproduction_data() {
        let s = tilted_scenario(0.5, 10.0);
        let mut problem = build_nc_problem(&s, 24).unwrap();
        problem.p_phi = 1.5; // cannot be a sub-probability of total weight 1
        assert!(matches!(
            nc_bound_lp(&problem),
            Err(Error::LpInfeasible { .. })
        ));
    }

    #[test]
    fn contextuality_witness_accompanies_all_hold() {
        for (cos2t, sigma) in [(0.5, 2.0), (0.5, 10.0), (0.5, 100.0), (0.01, 1000.0)] {
            let s = tilted_scenario(cos2t, sigma);
            let report = check_conditions(&s);
            if report.all_hold {
                let result = nc_bound_lp(&build_nc_problem(&s, 60).unwrap()).unwrap();
                assert!(
                    result.gap_to_quantum > 0.0,
                    "cos2t={cos2t}, sigma={sigma}: gap {}",
                    result.gap_to_quantum
                );
            }
        }
    }

    #[test]
    fn duplicate_classes_do_not_change_the_optimum() {
        // Convexity check: running the LP with the class list doubled gives
        // the same optimum because the regional caps aggregate over classes.
        let s = tilted_scenario(0.5, 10.0);
        let problem = build_nc_problem(&s, 24).unwrap();
        let baseline = nc_bound_lp(&problem).unwrap();
        let doubled = solve_with_class_multiplicity(&problem, 2);
        assert!(
            (baseline.lp_optimum - doubled).abs() < 1e-9,
            "{} vs {doubled}",
            baseline.lp_optimum
        );
    }

    /// LP with each ontic class duplicated `multiplicity` times; test-only.
    fn solve_with_class_multiplicity(problem: &NcBoundProblem, multiplicity: usize) -> f64 {
        let bins = problem.n_bins();
        let classes: Vec<OnticClass> = ONTIC_CLASSES
            .iter()
            .flat_map(|c| std::iter::repeat_n(*c, multiplicity))
            .collect();
        let k = classes.len();
        let n_vars = k + k * bins;
        let t_index = |class: usize, bin: usize| k + class * bins + bin;
        let negative = problem.negative_bins();

        let mut objective = vec![0.0f64; n_vars];
        for class in 0..k {
            for &b in &negative {
                objective[t_index(class, b)] = 1.0 / problem.p_phi;
            }
        }
        let mut constraints = Vec::new();
        let mut total = vec![0.0; n_vars];
        let mut selected = vec![0.0; n_vars];
        for (i, class) in classes.iter().enumerate() {
            total[i] = 1.0;
            if class.responds_post_selection {
                selected[i] = 1.0;
            }
        }
        constraints.push(Constraint {
            coefficients: total,
            relation: Relation::Equal,
            rhs: 1.0,
        });
        constraints.push(Constraint {
            coefficients: selected,
            relation: Relation::Equal,
            rhs: problem.p_phi,
        });
        for (i, class) in classes.iter().enumerate() {
            let masses = if class.responds_projector {
                &problem.noise_mass_shifted
            } else {
                &problem.noise_mass_unshifted
            };
            for b in 0..bins {
                let mut row = vec![0.0; n_vars];
                row[t_index(i, b)] = 1.0;
                row[i] = -masses[b];
                constraints.push(Constraint {
                    coefficients: row,
                    relation: Relation::LessEq,
                    rhs: 0.0,
                });
            }
        }
        let mut no_select = vec![0.0; n_vars];
        let mut select = vec![0.0; n_vars];
        for (i, class) in classes.iter().enumerate() {
            for b in 0..bins {
                if class.responds_post_selection {
                    select[t_index(i, b)] = 1.0;
                } else {
                    no_select[t_index(i, b)] = 1.0;
                }
            }
            if class.responds_post_selection {
                select[i] = -(1.0 - problem.p_d);
            }
        }
        constraints.push(Constraint {
            coefficients: no_select,
            relation: Relation::LessEq,
            rhs: problem.p_d,
        });
        constraints.push(Constraint {
            coefficients: select,
            relation: Relation::LessEq,
            rhs: problem.p_d,
        });
        solve_maximize(&LinearProgram {
            objective,
            constraints,
        })
        .unwrap()
        .objective_value
    }
}
