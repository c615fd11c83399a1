//! Simulation toolkit for Gaussian-pointer weak measurements of projectors.
//!
//! The crate models the textbook pre- and post-selected weak measurement: a
//! system prepared in `|psi>`, coupled to a Gaussian pointer of width `sigma`
//! through a projector `Pi`, read out in pointer position, and post-selected
//! on `|phi>`. Everything downstream of that setup is available in closed
//! form and is cross-checked here by independent quadrature:
//!
//! * [`hilbert`] — finite-dimensional states, operators and spectral
//!   decompositions (Jacobi rotations, no external linear algebra).
//! * [`weakvalues`] — weak values `<phi|A|psi>/<phi|psi>`, the reduction to
//!   projector weak values, and anomaly detection.
//! * [`pointer`] — the Kraus family `M_x`, its POVM, the disturbance
//!   decomposition of the averaged post-selection effect, and the
//!   negative-reading probability `p_-`.
//! * [`contextuality`] — the four operational conditions that rule out
//!   noncontextual models, sigma scans, and an LP computing the maximal
//!   noncontextual `p_-`.
//! * [`montecarlo`] — event-level sampling of (pointer reading, post-selection
//!   outcome) pairs with reproducible seeding.
//! * [`scenario`]/[`cli`] — JSON scenario files and the `weakctx` command-line
//!   frontend.

pub mod cli;
pub mod contextuality;
pub mod erf;
pub mod error;
pub mod hilbert;
pub mod montecarlo;
pub mod pointer;
pub mod quad;
pub mod report;
pub mod scenario;
pub mod simplex;
pub mod weakvalues;

pub use contextuality::{
    build_nc_problem, check_conditions, nc_bound_lp, sigma_scan, ConditionReport, NcBoundProblem,
    NcBoundResult, ScanResult,
};
pub use error::{Error, Result};
pub use hilbert::{
    inner, spectral_decompose, validate_projector, Operator, SpectralDecomposition, State,
};
pub use montecarlo::{estimate_p_minus, sample, Estimate, SampleBatch};
pub use pointer::{
    abc, disturbance, kraus, p_minus, p_minus_quadrature, povm_element, AbcIntegrals, PMinus,
    PointerMeasurement, Scenario,
};
pub use weakvalues::{detect_anomaly, projector_weak_values, weak_value, AnomalyReport, WeakValue};
