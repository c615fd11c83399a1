//! The Gaussian-pointer realization of a weak projector measurement.
//!
//! A probe Gaussian of width `sigma` is coupled to the system so that the
//! projector `Pi` shifts the pointer by one unit (hbar = 1, shift = 1; `sigma`
//! is the only free parameter). Reading the pointer at position `x` applies
//! the Kraus operator
//!
//! `M_x = N exp(-(x-1)^2 / 2 sigma^2) Pi + N exp(-x^2 / 2 sigma^2) Pi~`
//!
//! with `N^2 = (pi sigma^2)^{-1/2}` and `Pi~ = I - Pi`. Everything derived
//! from it is available in closed form:
//!
//! * the POVM `E_x = M_x^2 = p_n(x-1) Pi + p_n(x) Pi~`, a projector plus
//!   unbiased noise `p_n(x) = N^2 exp(-x^2/sigma^2)` with median 0;
//! * the averaged post-selection effect
//!   `S = integral M_x |phi><phi| M_x dx = (1-p_d)|phi><phi| + p_d E_d` with
//!   `Delta = exp(-1/4 sigma^2)`, `p_d = (1-Delta)/2` and the rank-one
//!   projector `E_d = (Pi-Pi~)|phi><phi|(Pi-Pi~)`;
//! * the negative-reading probability
//!   `p_- = A|Pi_w|^2 + B|Pi~_w|^2 + 2C re(Pi_w Pi~_w*)` with erf closed
//!   forms for the integrals A, B = 1/2, C.
//!
//! Each closed form is paired with an adaptive-quadrature route over the
//! defining integral so the two can be cross-checked to 1e-9 or better.

use num_complex::Complex64;

use crate::erf::erfc;
use crate::error::{Error, Result};
use crate::hilbert::{validate_projector, Operator, State};
use crate::quad::{adaptive_simpson, adaptive_simpson_complex, QuadratureConfig};
use crate::weakvalues::selection_overlap;

/// Default truncation of pointer-position integrals, in units of `sigma`,
/// beyond the two Gaussian centres at 0 and 1. Tails past 12 sigma contribute
/// less than 1e-31 of the mass.
pub const TAIL_SIGMAS: f64 = 12.0;

/// A complete measurement setup: pre-selection, post-selection, measured
/// projector and pointer width. Validated on construction, immutable after.
#[derive(Debug, Clone)]
pub struct Scenario {
    psi: State,
    phi: State,
    pi: Operator,
    sigma: f64,
    // Derived quantities cached at construction.
    pi_complement: Operator,
    overlap: Complex64,
    pi_weak: Complex64,
    pi_complement_weak: Complex64,
}

impl Scenario {
    pub fn new(psi: State, phi: State, pi: Operator, sigma: f64) -> Result<Scenario> {
        if psi.dim() != phi.dim() || psi.dim() != pi.dim() {
            return Err(Error::DimensionMismatch {
                left: psi.dim(),
                right: phi.dim().max(pi.dim()),
            });
        }
        if !validate_projector(&pi) {
            let residual = pi
                .mul(&pi)
                .sub(&pi)
                .max_norm()
                .max(pi.hermitian_deviation());
            return Err(Error::NotProjector { residual });
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidSigma(sigma));
        }
        let overlap = selection_overlap(&psi, &phi)?;
        let pi_complement = Operator::identity(pi.dim()).sub(&pi);
        let pi_weak = pi.matrix_element(&phi, &psi)? / overlap;
        let pi_complement_weak = pi_complement.matrix_element(&phi, &psi)? / overlap;
        Ok(Scenario {
            psi,
            phi,
            pi,
            sigma,
            pi_complement,
            overlap,
            pi_weak,
            pi_complement_weak,
        })
    }

    /// Same selections and projector, different pointer width.
    pub fn with_sigma(&self, sigma: f64) -> Result<Scenario> {
        Scenario::new(self.psi.clone(), self.phi.clone(), self.pi.clone(), sigma)
    }

    pub fn psi(&self) -> &State {
        &self.psi
    }

    pub fn phi(&self) -> &State {
        &self.phi
    }

    pub fn pi(&self) -> &Operator {
        &self.pi
    }

    pub fn pi_complement(&self) -> &Operator {
        &self.pi_complement
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    /// Post-selection probability `p_phi = |<phi|psi>|^2`.
    pub fn p_phi(&self) -> f64 {
        self.overlap.norm_sqr()
    }

    /// `<phi|psi>`.
    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }

    /// Weak value of the measured projector.
    pub fn pi_weak_value(&self) -> Complex64 {
        self.pi_weak
    }

    /// Weak value of the complement projector; the two sum to 1.
    pub fn pi_complement_weak_value(&self) -> Complex64 {
        self.pi_complement_weak
    }

    /// Squared Gaussian normalization `N^2 = (pi sigma^2)^{-1/2}`.
    pub fn normalization_sq(&self) -> f64 {
        1.0 / (self.sigma * std::f64::consts::PI.sqrt())
    }

    /// Pointer noise density `p_n(x) = N^2 exp(-x^2/sigma^2)`; a Gaussian of
    /// variance `sigma^2 / 2` with median 0.
    pub fn noise_density(&self, x: f64) -> f64 {
        self.normalization_sq() * (-x * x / (self.sigma * self.sigma)).exp()
    }

    /// Gaussian Kraus coefficient `g(y) = N exp(-y^2 / 2 sigma^2)`, so that
    /// `g(y)^2 = p_n(y)`.
    fn kraus_coefficient(&self, y: f64) -> f64 {
        self.normalization_sq().sqrt() * (-y * y / (2.0 * self.sigma * self.sigma)).exp()
    }

    /// `<phi|M_x|psi>` without forming the matrix.
    pub(crate) fn post_selected_amplitude(&self, x: f64) -> Complex64 {
        let g1 = self.kraus_coefficient(x - 1.0);
        let g0 = self.kraus_coefficient(x);
        self.overlap * (self.pi_weak * g1 + self.pi_complement_weak * g0)
    }

    /// Integration window `[min(0,1) - k sigma, max(0,1) + k sigma]`.
    fn window(&self, tail_sigmas: f64) -> (f64, f64) {
        (-tail_sigmas * self.sigma, 1.0 + tail_sigmas * self.sigma)
    }
}

/// Kraus operator `M_x`; Hermitian and positive semidefinite.
pub fn kraus(scenario: &Scenario, x: f64) -> Operator {
    let g1 = scenario.kraus_coefficient(x - 1.0);
    let g0 = scenario.kraus_coefficient(x);
    scenario.pi.scale(g1).add(&scenario.pi_complement.scale(g0))
}

/// POVM element `E_x = p_n(x-1) Pi + p_n(x) Pi~`; equals `kraus(x)^2`.
pub fn povm_element(scenario: &Scenario, x: f64) -> Operator {
    let p1 = scenario.noise_density(x - 1.0);
    let p0 = scenario.noise_density(x);
    scenario.pi.scale(p1).add(&scenario.pi_complement.scale(p0))
}

/// The disturbance decomposition of the averaged post-selection effect.
#[derive(Debug, Clone)]
pub struct PointerMeasurement {
    scenario: Scenario,
    /// Gaussian overlap `Delta = exp(-1/4 sigma^2)`.
    pub delta: f64,
    /// Probability of disturbance `p_d = (1 - Delta)/2`.
    pub p_d: f64,
    /// The disturbed effect `E_d = (Pi-Pi~)|phi><phi|(Pi-Pi~)`, a projector.
    pub e_d: Operator,
    /// `S = (1-p_d)|phi><phi| + p_d E_d`.
    pub s: Operator,
    /// `N^2 = (pi sigma^2)^{-1/2}`.
    pub normalization_sq: f64,
}

impl PointerMeasurement {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Independent algebraic route to the same operator:
    /// `S = Pi|phi><phi|Pi + Pi~|phi><phi|Pi~ + Delta (cross terms)`.
    pub fn s_from_projector_blocks(&self) -> Operator {
        let phi =
            Operator::outer(&self.scenario.phi, &self.scenario.phi).expect("matching dimensions");
        let pi = &self.scenario.pi;
        let pit = &self.scenario.pi_complement;
        let direct = pi.mul(&phi).mul(pi).add(&pit.mul(&phi).mul(pit));
        let cross = pi.mul(&phi).mul(pit).add(&pit.mul(&phi).mul(pi));
        direct.add(&cross.scale(self.delta))
    }

    /// `<psi|S|psi>`, the total post-selection pass probability.
    pub fn s_expectation(&self) -> f64 {
        self.s
            .expectation(&self.scenario.psi)
            .expect("matching dimensions")
            .re
    }
}

/// Closed-form disturbance analysis of a scenario.
pub fn disturbance(scenario: &Scenario) -> PointerMeasurement {
    let sigma = scenario.sigma;
    let delta = (-1.0 / (4.0 * sigma * sigma)).exp();
    let p_d = (1.0 - delta) / 2.0;
    let phi_projector = Operator::outer(&scenario.phi, &scenario.phi).expect("matching dimensions");
    // Pi - Pi~ is the unitary reflection about the range of Pi, so E_d is a
    // rank-one projector.
    let reflection = scenario.pi.sub(&scenario.pi_complement);
    let e_d = reflection.mul(&phi_projector).mul(&reflection);
    let s = phi_projector.scale(1.0 - p_d).add(&e_d.scale(p_d));
    PointerMeasurement {
        scenario: scenario.clone(),
        delta,
        p_d,
        e_d,
        s,
        normalization_sq: scenario.normalization_sq(),
    }
}

/// The three negative-axis integrals of the noise density and its shifted
/// geometric mean.
#[derive(Debug, Clone, Copy)]
pub struct AbcIntegrals {
    /// `A = integral_{-inf}^0 p_n(x-1) dx = (1 - erf(1/sigma))/2`.
    pub a: f64,
    /// `B = integral_{-inf}^0 p_n(x) dx = 1/2` exactly (median at 0).
    pub b: f64,
    /// `C = integral_{-inf}^0 sqrt(p_n(x-1) p_n(x)) dx
    ///    = exp(-1/4 sigma^2)(1 - erf(1/2 sigma))/2`.
    pub c: f64,
}

/// Closed forms for A, B, C at pointer width `sigma`.
pub fn abc(sigma: f64) -> Result<AbcIntegrals> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidSigma(sigma));
    }
    let a = 0.5 * erfc(1.0 / sigma);
    let c = 0.5 * (-1.0 / (4.0 * sigma * sigma)).exp() * erfc(1.0 / (2.0 * sigma));
    Ok(AbcIntegrals { a, b: 0.5, c })
}

/// The negative-reading probability in its three flavours.
#[derive(Debug, Clone, Copy)]
pub struct PMinus {
    /// `p_- = (1/p_phi) integral_{-inf}^0 |<phi|M_x|psi>|^2 dx`, evaluated
    /// through the A, B, C closed form. Normalized by `p_phi`, so it can
    /// leave `[0, 1]`; see `exact_outside_unit`.
    pub exact: f64,
    /// True conditional probability of a negative reading among post-selected
    /// runs: the same integral divided by `<psi|S|psi>` instead of `p_phi`.
    pub conditional: f64,
    /// Large-sigma expansion `1/2 - re(Pi_w) / (sqrt(pi) sigma)`.
    pub asymptotic: f64,
    /// Set when `exact` falls outside `[0, 1]` through the `p_phi`
    /// normalization; the value is reported unclamped.
    pub exact_outside_unit: bool,
}

/// Closed-form `p_-` for a scenario.
pub fn p_minus(scenario: &Scenario) -> PMinus {
    let integrals = abc(scenario.sigma).expect("scenario sigma already validated");
    let w = scenario.pi_weak_value();
    let wt = scenario.pi_complement_weak_value();
    let exact = integrals.a * w.norm_sqr()
        + integrals.b * wt.norm_sqr()
        + 2.0 * integrals.c * (w * wt.conj()).re;

    let measurement = disturbance(scenario);
    let s_psi = measurement.s_expectation();
    let conditional = exact * scenario.p_phi() / s_psi;

    let asymptotic = 0.5 - w.re / (std::f64::consts::PI.sqrt() * scenario.sigma);
    PMinus {
        exact,
        conditional,
        asymptotic,
        exact_outside_unit: !(0.0..=1.0).contains(&exact),
    }
}

/// `p_-` by adaptive quadrature of the defining integral; the independent
/// oracle for [`p_minus`].
pub fn p_minus_quadrature(scenario: &Scenario) -> Result<f64> {
    p_minus_quadrature_with(scenario, &QuadratureConfig::default(), TAIL_SIGMAS)
}

/// [`p_minus_quadrature`] with explicit quadrature configuration and tail
/// truncation.
pub fn p_minus_quadrature_with(
    scenario: &Scenario,
    config: &QuadratureConfig,
    tail_sigmas: f64,
) -> Result<f64> {
    let (lo, _) = scenario.window(tail_sigmas);
    // Normalize inside the integrand so the absolute panel tolerance acts on
    // the p_phi-normalized scale even for tiny selection overlaps.
    let p_phi = scenario.p_phi();
    adaptive_simpson(
        |x| {
            let value = scenario.post_selected_amplitude(x).norm_sqr() / p_phi;
            debug_assert!(value >= 0.0, "negative integrand at x = {x}");
            value
        },
        lo,
        0.0,
        config,
    )
}

/// `<psi|S|psi>/p_phi` by quadrature over the full line; extending the upper
/// limit of the `p_-` integral recovers this.
pub fn post_selection_rate_quadrature(
    scenario: &Scenario,
    config: &QuadratureConfig,
    tail_sigmas: f64,
) -> Result<f64> {
    let (lo, hi) = scenario.window(tail_sigmas);
    let p_phi = scenario.p_phi();
    adaptive_simpson(
        |x| scenario.post_selected_amplitude(x).norm_sqr() / p_phi,
        lo,
        hi,
        config,
    )
}

/// `S` by entrywise adaptive quadrature of `M_x |phi><phi| M_x`; the
/// independent oracle for the closed-form decomposition.
pub fn s_by_quadrature(
    scenario: &Scenario,
    config: &QuadratureConfig,
    tail_sigmas: f64,
) -> Result<Operator> {
    let (lo, hi) = scenario.window(tail_sigmas);
    let d = scenario.dim();
    // u(x) = M_x |phi>; S_ij = integral u_i(x) conj(u_j(x)) dx.
    let pi_phi = scenario.pi.apply(scenario.phi.amplitudes());
    let pit_phi = scenario.pi_complement.apply(scenario.phi.amplitudes());
    let mut out = Operator::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let entry = adaptive_simpson_complex(
                |x| {
                    let g1 = scenario.kraus_coefficient(x - 1.0);
                    let g0 = scenario.kraus_coefficient(x);
                    let ui = pi_phi[i] * g1 + pit_phi[i] * g0;
                    let uj = pi_phi[j] * g1 + pit_phi[j] * g0;
                    ui * uj.conj()
                },
                lo,
                hi,
                config,
            )?;
            out.set(i, j, entry);
        }
    }
    Ok(out)
}

/// Max-norm distance of the quadrature of `E_x` from the identity over the
/// truncated window; near zero by POVM completeness.
pub fn povm_completeness_residual(
    scenario: &Scenario,
    config: &QuadratureConfig,
    tail_sigmas: f64,
) -> Result<f64> {
    let (lo, hi) = scenario.window(tail_sigmas);
    let mass_shifted = adaptive_simpson(|x| scenario.noise_density(x - 1.0), lo, hi, config)?;
    let mass_centred = adaptive_simpson(|x| scenario.noise_density(x), lo, hi, config)?;
    let total = scenario
        .pi
        .scale(mass_shifted)
        .add(&scenario.pi_complement.scale(mass_centred));
    Ok(total.sub(&Operator::identity(scenario.dim())).max_norm())
}
