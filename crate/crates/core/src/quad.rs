//! Adaptive Simpson quadrature.
//!
//! Deliberately plain: recursive bisection with the standard Richardson
//! error estimate `|S_fine - S_coarse| / 15` per panel. A panel is accepted
//! once that estimate drops below the configured absolute tolerance;
//! exceeding the depth or panel budget is reported as
//! [`Error::QuadratureDidNotConverge`] rather than silently returning a bad
//! value. Integrands here are Gaussians and products of Gaussians truncated
//! many widths out, so convergence is fast in practice.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tuning knobs for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Absolute tolerance each accepted panel must meet.
    pub panel_tolerance: f64,
    /// Maximum bisection depth per panel.
    pub max_depth: u32,
    /// Budget on the total number of panel evaluations.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panel_tolerance: 1e-12,
            max_depth: 60,
            max_panels: 1_000_000,
        }
    }
}

impl QuadratureConfig {
    /// Same budget, different panel tolerance.
    pub fn with_tolerance(self, panel_tolerance: f64) -> Self {
        QuadratureConfig {
            panel_tolerance,
            ..self
        }
    }
}

struct Tracker {
    panels: usize,
    max_panels: usize,
    worst_error: f64,
}

/// Integrate `f` over `[a, b]`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, config: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidInput(format!(
            "quadrature interval [{a}, {b}] must be finite and increasing"
        )));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut tracker = Tracker {
        panels: 0,
        max_panels: config.max_panels,
        worst_error: 0.0,
    };
    recurse(
        &f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        config.panel_tolerance,
        config.max_depth,
        &mut tracker,
    )
}

/// Integrate a complex-valued function by integrating the real and imaginary
/// parts separately.
pub fn adaptive_simpson_complex<F>(
    f: F,
    a: f64,
    b: f64,
    config: &QuadratureConfig,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let re = adaptive_simpson(|x| f(x).re, a, b, config)?;
    let im = adaptive_simpson(|x| f(x).im, a, b, config)?;
    Ok(Complex64::new(re, im))
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tolerance: f64,
    depth: u32,
    tracker: &mut Tracker,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    tracker.panels += 1;
    if tracker.panels > tracker.max_panels {
        return Err(Error::QuadratureDidNotConverge {
            panels: tracker.panels,
            worst_error: tracker.worst_error,
        });
    }
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let estimate = (left + right - whole) / 15.0;
    if estimate.abs() <= tolerance {
        return Ok(left + right + estimate);
    }
    if depth == 0 {
        tracker.worst_error = tracker.worst_error.max(estimate.abs());
        return Err(Error::QuadratureDidNotConverge {
            panels: tracker.panels,
            worst_error: tracker.worst_error,
        });
    }
    let l = recurse(f, a, m, fa, flm, fm, left, tolerance, depth - 1, tracker)?;
    let r = recurse(f, m, b, fm, frm, fb, right, tolerance, depth - 1, tracker)?;
    Ok(l + r)
}
