//! Exact diagonalization, gaps and degeneracy, and golden-section refinement
//! of the minimum gap.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::HermitianOperator;

/// Default relative tolerance for counting degenerate ground levels.
pub const DEFAULT_DEGENERACY_REL_TOL: f64 = 1e-9;

const NORM_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 10_000;

/// Normalized amplitude vector in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<Complex64>,
}

impl QuantumState {
    /// Wraps `amplitudes`, requiring power-of-two length and unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: DVector<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::validation(format!(
                "state length {dim} is not a positive power of two"
            )));
        }
        let norm = amplitudes.norm();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::validation(format!(
                "state is not normalized: norm = {norm}"
            )));
        }
        Ok(QuantumState { amplitudes })
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::validation("cannot normalize a zero or non-finite vector"));
        }
        Self::from_vector(v.unscale(norm))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(Error::validation(format!(
                "basis index {index} out of range for {n_sites} sites"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { amplitudes: v })
    }

    /// Equal-weight superposition of all basis states.
    pub fn uniform(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        QuantumState {
            amplitudes: DVector::from_element(dim, a),
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn n_sites(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// Multiplies every amplitude by `exp(i phi)`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        let p = Complex64::from_polar(1.0, phi);
        QuantumState {
            amplitudes: self.amplitudes.map(|a| a * p),
        }
    }

    /// Removes the global phase so that the largest-magnitude amplitude is
    /// real and non-negative. Near-ties go to the lowest index.
    pub fn canonical_phase(mut self) -> Self {
        let max = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let Some(k) = self.amplitudes.iter().position(|a| a.norm() >= max - NORM_TOL) else {
            return self;
        };
        let pivot = self.amplitudes[k];
        let mag = pivot.norm();
        if mag > 0.0 {
            let rot = pivot.conj() / mag;
            self.amplitudes.apply(|a| *a *= rot);
            self.amplitudes[k] = Complex64::new(mag, 0.0);
        }
        self
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::validation(format!(
                "state dimensions differ: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// Full eigendecomposition with energies ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub energies: Vec<f64>,
    pub states: Vec<QuantumState>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground_state(&self) -> &QuantumState {
        &self.states[0]
    }

    /// Eigenvectors spanning the (numerically) degenerate ground level.
    pub fn ground_space(&self, rel_tol: f64) -> &[QuantumState] {
        &self.states[..ground_degeneracy(self, rel_tol)]
    }

    pub fn spectral_range(&self) -> f64 {
        self.energies[self.dim() - 1] - self.energies[0]
    }
}

/// Diagonalizes a Hermitian operator.
///
/// Eigenvectors carry the canonical phase of [`QuantumState::canonical_phase`],
/// so identical inputs give identical output.
pub fn diagonalize(h: &HermitianOperator) -> Result<EigenSystem> {
    let deviation = h.hermiticity_deviation();
    if !(deviation <= crate::operators::HERMITICITY_TOL) {
        return Err(Error::validation(format!(
            "cannot diagonalize a non-Hermitian operator (deviation {deviation:e})"
        )));
    }
    let dim = h.dim();
    let fingerprint = || {
        let tr = h.trace();
        format!(
            "dim = {dim}, max|H| = {:e}, trace = {:e}{:+e}i",
            h.max_abs(),
            tr.re,
            tr.im
        )
    };
    let eig = SymmetricEigen::try_new(h.matrix().clone(), f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| Error::numerical(format!("eigensolver did not converge ({})", fingerprint())))?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let scale = 1f64.max(h.max_abs() * dim as f64);
    let mut energies = Vec::with_capacity(dim);
    let mut states = Vec::with_capacity(dim);
    for &k in &order {
        let e = eig.eigenvalues[k];
        if !e.is_finite() {
            return Err(Error::numerical(format!("non-finite eigenvalue ({})", fingerprint())));
        }
        let v = eig.eigenvectors.column(k).into_owned();
        let v = v.unscale(v.norm());
        let residual = (h.matrix() * &v - &v * Complex64::new(e, 0.0)).norm();
        if !(residual <= RESIDUAL_TOL * scale) {
            return Err(Error::numerical(format!(
                "eigenpair residual {residual:e} exceeds tolerance ({})",
                fingerprint()
            )));
        }
        energies.push(e);
        states.push(QuantumState::from_vector(v)?.canonical_phase());
    }
    Ok(EigenSystem { energies, states })
}

/// `E1 - E0`.
pub fn energy_gap(es: &EigenSystem) -> Result<f64> {
    if es.dim() < 2 {
        return Err(Error::validation("energy gap needs at least two levels"));
    }
    Ok((es.energies[1] - es.energies[0]).max(0.0))
}

/// Number of levels within `rel_tol * max(1, spectral range)` of the ground
/// energy.
pub fn ground_degeneracy(es: &EigenSystem, rel_tol: f64) -> usize {
    let threshold = rel_tol * 1f64.max(es.spectral_range());
    es.energies
        .iter()
        .take_while(|&&e| e - es.energies[0] <= threshold)
        .count()
}

/// Golden-section search for the minimum of `gap_fn` on `bracket`.
///
/// Iterates until the bracket is narrower than `tol` and returns the best
/// point evaluated, bracket endpoints included.
pub fn refine_min_gap<F>(mut gap_fn: F, bracket: (f64, f64), tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = bracket;
    if !(a < b && a >= 0.0 && b <= 1.0) {
        return Err(Error::validation(format!(
            "refinement bracket ({a}, {b}) must satisfy 0 <= lo < hi <= 1"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::validation(format!("refinement tolerance must be positive, got {tol}")));
    }
    let mut eval = |x: f64| -> Result<f64> {
        let y = gap_fn(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::numerical(format!("gap evaluated to {y} at lambda = {x}")))
        }
    };
    let mut best = (a, eval(a)?);
    let consider = |x: f64, y: f64, best: &mut (f64, f64)| {
        if y < best.1 {
            *best = (x, y);
        }
    };
    let fb = eval(b)?;
    consider(b, fb, &mut best);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
            consider(d, fd, &mut best);
        }
    }
    Ok(best)
}
