//! Weak values and anomaly detection.
//!
//! The weak value of an observable `A` between pre-selection `|psi>` and
//! post-selection `|phi>` is `A_w = <phi|A|psi> / <phi|psi>`. Its real part
//! decomposes over the spectral projectors of `A`,
//! `re(A_w) = sum_a a re(P^(a)_w)`, with `sum_a P^(a)_w = 1`. A weak value is
//! anomalous when `re(A_w)` falls outside the eigenvalue range; whenever that
//! happens some spectral projector has `re(P_w) < 0`, and that projector is
//! what the rest of the crate feeds on.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{inner, spectral_decompose, Operator, State, ORTHOGONALITY_THRESHOLD};

/// Slack beyond the eigenvalue interval before a real part counts as
/// anomalous; separates genuine anomalies from roundoff at the endpoints.
pub const ANOMALY_TOLERANCE: f64 = 1e-12;

/// A finite weak value together with a human-readable operator label.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValue {
    pub value: Complex64,
    pub label: String,
}

/// Outcome of [`detect_anomaly`].
#[derive(Debug, Clone)]
pub struct AnomalyReport {
    /// Smallest and largest eigenvalue of the observable.
    pub eigen_range: (f64, f64),
    /// `re(A_w)` evaluated directly from the defining ratio.
    pub re_weak_value: f64,
    /// True iff `re(A_w)` lies outside `eigen_range` by more than
    /// [`ANOMALY_TOLERANCE`].
    pub anomalous: bool,
    /// A spectral projector with `re(P_w) < 0`; present iff `anomalous`.
    pub witness_projector: Option<Operator>,
    /// Weak value of the witness projector.
    pub witness_weak_value: Option<Complex64>,
}

/// `<phi|psi>`, failing when the selection states are orthogonal.
pub(crate) fn selection_overlap(psi: &State, phi: &State) -> Result<Complex64> {
    let overlap = inner(phi, psi)?;
    let p_phi = overlap.norm_sqr();
    if p_phi <= ORTHOGONALITY_THRESHOLD {
        return Err(Error::OrthogonalSelection { p_phi });
    }
    Ok(overlap)
}

/// Weak value `<phi|A|psi> / <phi|psi>`.
pub fn weak_value(a: &Operator, psi: &State, phi: &State) -> Result<WeakValue> {
    let overlap = selection_overlap(psi, phi)?;
    let numerator = a.matrix_element(phi, psi)?;
    Ok(WeakValue {
        value: numerator / overlap,
        label: "observable".to_string(),
    })
}

/// Weak value of every spectral projector of a Hermitian observable, paired
/// with its eigenvalue and sorted by increasing eigenvalue.
pub fn projector_weak_values(
    a: &Operator,
    psi: &State,
    phi: &State,
) -> Result<Vec<(f64, WeakValue)>> {
    let overlap = selection_overlap(psi, phi)?;
    let decomposition = spectral_decompose(a)?;
    decomposition
        .pairs()
        .iter()
        .map(|pair| {
            let numerator = pair.projector.matrix_element(phi, psi)?;
            Ok((
                pair.eigenvalue,
                WeakValue {
                    value: numerator / overlap,
                    label: format!("eigenprojector({})", pair.eigenvalue),
                },
            ))
        })
        .collect()
}

/// Flags anomalous weak values and extracts a negative-real-part witness
/// projector.
///
/// When several projectors have negative real weak value, the witness is the
/// most negative one, ties broken toward the smaller eigenvalue; that choice
/// maximizes the downstream negative-bias margin.
pub fn detect_anomaly(a: &Operator, psi: &State, phi: &State) -> Result<AnomalyReport> {
    let direct = weak_value(a, psi, phi)?;
    let decomposition = spectral_decompose(a)?;
    let eigen_range = decomposition.eigen_range();
    let re = direct.value.re;
    let anomalous =
        re < eigen_range.0 - ANOMALY_TOLERANCE || re > eigen_range.1 + ANOMALY_TOLERANCE;

    let mut witness_projector = None;
    let mut witness_weak_value = None;
    if anomalous {
        let overlap = selection_overlap(psi, phi)?;
        let mut best: Option<(f64, &crate::hilbert::SpectralPair, Complex64)> = None;
        for pair in decomposition.pairs() {
            let w = pair.projector.matrix_element(phi, psi)? / overlap;
            let better = match &best {
                None => true,
                // Strict comparison keeps the first (smallest eigenvalue)
                // entry on ties; pairs are sorted by eigenvalue.
                Some((best_re, _, _)) => w.re < *best_re,
            };
            if better {
                best = Some((w.re, pair, w));
            }
        }
        let (best_re, pair, w) =
            best.expect("Hermitian operator has at least one spectral projector");
        // An anomalous real part forces some projector weak value below zero;
        // this is a mathematical identity, not a tolerance question.
        assert!(
            best_re < 0.0,
            "anomaly without a negative-real-part projector (re = {best_re})"
        );
        witness_projector = Some(pair.projector.clone());
        witness_weak_value = Some(w);
    }

    Ok(AnomalyReport {
        eigen_range,
        re_weak_value: re,
        anomalous,
        witness_projector,
        witness_weak_value,
    })
}
