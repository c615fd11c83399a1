//! Finite-dimensional complex Hilbert space primitives.
//!
//! States are unit vectors, operators are dense `d x d` complex matrices
//! (`d` is small throughout, a qubit up to a handful of levels), and
//! Hermitian operators decompose into eigenvalue/eigenprojector pairs via
//! cyclic Jacobi rotations. Everything is immutable after construction.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest tolerated deviation of a constructed state's norm from 1 before
/// construction fails instead of rescaling.
pub const NORM_TOLERANCE: f64 = 1e-6;
/// An operator counts as Hermitian when `max |A - A^dag|` is below this.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// An operator counts as a projector when `max |P^2 - P|` is below this.
pub const PROJECTOR_TOLERANCE: f64 = 1e-10;
/// Eigenvalues closer than this are merged into one degenerate cluster.
pub const EIGENVALUE_CLUSTER_TOLERANCE: f64 = 1e-8;
/// Overlaps with `|<phi|psi>|^2` at or below this count as orthogonal.
pub const ORTHOGONALITY_THRESHOLD: f64 = 1e-24;

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    amplitudes: Vec<Complex64>,
}

impl State {
    /// Builds a state from amplitudes, renormalizing exactly. Fails if the
    /// input norm deviates from 1 by more than [`NORM_TOLERANCE`] (silent
    /// rescaling of wildly unnormalized data hides bugs) or if `d < 2`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<State> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "state dimension must be at least 2, got {}",
                amplitudes.len()
            )));
        }
        for (i, a) in amplitudes.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: 0 });
            }
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                norm,
                tolerance: NORM_TOLERANCE,
            });
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(State { amplitudes })
    }

    /// Computational basis state `|index>` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> State {
        assert!(dim >= 2, "dimension must be at least 2");
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        State { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// Hermitian inner product `<u|v>`, conjugate-linear in the first argument.
pub fn inner(u: &State, v: &State) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(u.amplitudes
        .iter()
        .zip(&v.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// A dense `d x d` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Operator {
        Operator {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Operator {
        let mut op = Operator::zeros(dim);
        for i in 0..dim {
            op.set(i, i, Complex64::new(1.0, 0.0));
        }
        op
    }

    /// Builds an operator from rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Operator> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                data.push(*v);
            }
        }
        Ok(Operator { dim, data })
    }

    /// Builds an operator entrywise from a closure.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Operator {
        let mut op = Operator::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                op.set(i, j, f(i, j));
            }
        }
        op
    }

    /// Rank-one operator `|u><v|`.
    pub fn outer(u: &State, v: &State) -> Result<Operator> {
        if u.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                left: u.dim(),
                right: v.dim(),
            });
        }
        Ok(Operator::from_fn(u.dim(), |i, j| {
            u.amplitudes[i] * v.amplitudes[j].conj()
        }))
    }

    /// Projector onto the span of the listed computational basis states.
    pub fn basis_projector(dim: usize, indices: &[usize]) -> Result<Operator> {
        let mut op = Operator::zeros(dim);
        for &k in indices {
            if k >= dim {
                return Err(Error::InvalidInput(format!(
                    "basis index {k} out of range for dimension {dim}"
                )));
            }
            if op.get(k, k).re != 0.0 {
                return Err(Error::InvalidInput(format!("duplicate basis index {k}")));
            }
            op.set(k, k, Complex64::new(1.0, 0.0));
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn adjoint(&self) -> Operator {
        Operator::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn add(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        Operator::from_fn(self.dim, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        Operator::from_fn(self.dim, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn mul(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let d = self.dim;
        let mut out = Operator::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Operator {
        Operator::from_fn(self.dim, |i, j| self.get(i, j) * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Operator {
        Operator::from_fn(self.dim, |i, j| self.get(i, j) * s)
    }

    /// Matrix-vector product `A v`, returned as raw (possibly unnormalized)
    /// amplitudes.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "operator/vector dimension mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `<phi|A|psi>`.
    pub fn matrix_element(&self, phi: &State, psi: &State) -> Result<Complex64> {
        if phi.dim() != self.dim || psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: phi.dim().max(psi.dim()),
            });
        }
        let av = self.apply(psi.amplitudes());
        Ok(phi
            .amplitudes()
            .iter()
            .zip(&av)
            .map(|(p, a)| p.conj() * a)
            .sum())
    }

    /// `<psi|A|psi>`.
    pub fn expectation(&self, psi: &State) -> Result<Complex64> {
        self.matrix_element(psi, psi)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus, the max norm used by every tolerance here.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A^dag|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOLERANCE
    }
}

/// True iff `p` is Hermitian and idempotent within [`PROJECTOR_TOLERANCE`].
pub fn validate_projector(p: &Operator) -> bool {
    if !p.is_hermitian() {
        return false;
    }
    p.mul(p).sub(p).max_norm() <= PROJECTOR_TOLERANCE
}

/// One `(eigenvalue, eigenprojector)` pair of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct SpectralPair {
    pub eigenvalue: f64,
    pub projector: Operator,
}

/// Full spectral decomposition `A = sum_a a P^(a)`, eigenvalues strictly
/// increasing, projectors mutually orthogonal and summing to the identity.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pairs: Vec<SpectralPair>,
}

impl SpectralDecomposition {
    pub fn pairs(&self) -> &[SpectralPair] {
        &self.pairs
    }

    /// Smallest and largest eigenvalue.
    pub fn eigen_range(&self) -> (f64, f64) {
        (
            self.pairs.first().expect("nonempty spectrum").eigenvalue,
            self.pairs.last().expect("nonempty spectrum").eigenvalue,
        )
    }

    /// `sum_a a P^(a)`, for reconstruction checks.
    pub fn reconstruct(&self) -> Operator {
        let dim = self.pairs[0].projector.dim();
        let mut out = Operator::zeros(dim);
        for pair in &self.pairs {
            out = out.add(&pair.projector.scale(pair.eigenvalue));
        }
        out
    }
}

/// Spectral decomposition of a Hermitian operator by cyclic Jacobi rotations.
///
/// Eigenvalues within [`EIGENVALUE_CLUSTER_TOLERANCE`] of each other are
/// merged into a single degenerate eigenprojector. Dimensions here are tiny,
/// so the quadratically convergent Jacobi sweep is accurate and dependency
/// free.
pub fn spectral_decompose(a: &Operator) -> Result<SpectralDecomposition> {
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    let (eigenvalues, vectors) = jacobi_hermitian(a);
    let dim = a.dim();

    // Sort eigenpairs ascending, then merge near-degenerate clusters.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));

    let mut pairs: Vec<SpectralPair> = Vec::new();
    let mut cluster: Vec<usize> = Vec::new();
    let flush = |cluster: &mut Vec<usize>, pairs: &mut Vec<SpectralPair>| {
        if cluster.is_empty() {
            return;
        }
        let mean = cluster.iter().map(|&k| eigenvalues[k]).sum::<f64>() / cluster.len() as f64;
        let mut projector = Operator::zeros(dim);
        for &k in cluster.iter() {
            for i in 0..dim {
                for j in 0..dim {
                    let v = projector.get(i, j) + vectors.get(i, k) * vectors.get(j, k).conj();
                    projector.set(i, j, v);
                }
            }
        }
        pairs.push(SpectralPair {
            eigenvalue: mean,
            projector,
        });
        cluster.clear();
    };

    for &k in &order {
        if let Some(&last) = cluster.last() {
            if eigenvalues[k] - eigenvalues[last] > EIGENVALUE_CLUSTER_TOLERANCE {
                flush(&mut cluster, &mut pairs);
            }
        }
        cluster.push(k);
    }
    flush(&mut cluster, &mut pairs);

    Ok(SpectralDecomposition { pairs })
}

/// Eigenvalues and an orthonormal eigenvector matrix (columns) of a Hermitian
/// matrix via cyclic complex Jacobi rotations.
fn jacobi_hermitian(a: &Operator) -> (Vec<f64>, Operator) {
    let d = a.dim();
    let mut w = a.clone();
    let mut v = Operator::identity(d);

    let scale = w.max_norm().max(1e-300);
    let stop = scale * 1e-15;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(w.get(p, q).norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = w.get(p, q);
                let r = apq.norm();
                if r <= stop * 1e-2 {
                    continue;
                }
                let app = w.get(p, p).re;
                let aqq = w.get(q, q).re;
                let phase = apq / r; // e^{i arg(apq)}
                let tau = (aqq - app) / (2.0 * r);
                // Stable small-magnitude root of t^2 - 2*tau*t - 1 = 0, the
                // zeroing condition for the rotation convention used below.
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // W <- U^dag W U with U = I except
                // U[p][p] = c, U[p][q] = -s*phase, U[q][p] = s*conj(phase), U[q][q] = c.
                let sp = s * phase;
                let spc = s * phase.conj();
                for k in 0..d {
                    let wkp = w.get(k, p);
                    let wkq = w.get(k, q);
                    w.set(k, p, wkp * c + wkq * spc);
                    w.set(k, q, -wkp * sp + wkq * c);
                }
                for k in 0..d {
                    let wpk = w.get(p, k);
                    let wqk = w.get(q, k);
                    w.set(p, k, wpk * c + wqk * sp);
                    w.set(q, k, -wpk * spc + wqk * c);
                }
                // Clean the rotated entries so roundoff cannot accumulate.
                w.set(p, q, Complex64::new(0.0, 0.0));
                w.set(q, p, Complex64::new(0.0, 0.0));
                w.set(p, p, Complex64::new(w.get(p, p).re, 0.0));
                w.set(q, q, Complex64::new(w.get(q, q).re, 0.0));

                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * spc);
                    v.set(k, q, -vkp * sp + vkq * c);
                }
            }
        }
    }

    let eigenvalues = (0..d).map(|i| w.get(i, i).re).collect();
    (eigenvalues, v)
}
