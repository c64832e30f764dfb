//! Dense Hamiltonians on the 2^N-dimensional computational basis.
//!
//! Spin operators are bare Pauli matrices with eigenvalues ±1. Basis index
//! bits are read with site 1 as the most significant bit, and bit value 0 is
//! the +1 eigenstate of σz, so `|11…1⟩` is the last basis vector.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpinGraph;

/// Absolute elementwise tolerance for the Hermiticity check.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Trigger strength used when a trigger is requested without one.
pub const DEFAULT_TRIGGER_STRENGTH: f64 = 2.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A dense complex matrix that is Hermitian and of power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n_sites: usize,
    matrix: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Wraps `matrix`, checking that it is square, of dimension 2^n and
    /// Hermitian within [`HERMITICITY_TOL`].
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::validation(format!(
                "operator must be square, got {}x{}",
                dim,
                matrix.ncols()
            )));
        }
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::validation(format!(
                "operator dimension {dim} is not a positive power of two"
            )));
        }
        let deviation = hermiticity_deviation(&matrix);
        if !(deviation <= HERMITICITY_TOL) {
            return Err(Error::validation(format!(
                "operator is not Hermitian: max |H - H^dagger| = {deviation:e}"
            )));
        }
        Ok(HermitianOperator {
            n_sites: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn zeros(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        HermitianOperator {
            n_sites,
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Largest absolute deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|c| (0..d).all(|r| r == c || self.matrix[(r, c)] == ZERO))
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `self += weight * pauli_string`, applied in place without
    /// materializing the string.
    fn add_pauli_string(&mut self, weight: f64, factors: &[(Axis, usize)]) {
        for (col, row, phase) in pauli_string_entries(self.n_sites, factors) {
            self.matrix[(row, col)] += phase * weight;
        }
    }

    fn scaled_add(&mut self, weight: f64, other: &HermitianOperator) {
        self.matrix.zip_apply(&other.matrix, |a, b| *a += b * weight);
    }
}

fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for c in 0..d {
        for r in c..d {
            let dev = (m[(r, c)] - m[(c, r)].conj()).norm();
            if dev.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(dev);
        }
    }
    worst
}

/// Bit position of a zero-based site; site 0 is the most significant bit.
fn bit_of(site: usize, n_sites: usize) -> usize {
    n_sites - 1 - site
}

/// Nonzero entries `(col, row, value)` of a product of Pauli matrices on
/// distinct zero-based sites. Every column has exactly one nonzero entry.
fn pauli_string_entries(
    n_sites: usize,
    factors: &[(Axis, usize)],
) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
    let flip_mask = factors
        .iter()
        .filter(|(axis, _)| *axis != Axis::Z)
        .fold(0usize, |m, &(_, s)| m | (1 << bit_of(s, n_sites)));
    (0..1usize << n_sites).map(move |col| {
        let phase = factors.iter().fold(ONE, |acc, &(axis, site)| {
            let up = (col >> bit_of(site, n_sites)) & 1 == 0;
            acc * match (axis, up) {
                (Axis::X, _) => ONE,
                (Axis::Y, true) => I,
                (Axis::Y, false) => -I,
                (Axis::Z, true) => ONE,
                (Axis::Z, false) => -ONE,
            }
        });
        (col, col ^ flip_mask, phase)
    })
}

fn pauli_string(n_sites: usize, factors: &[(Axis, usize)]) -> HermitianOperator {
    let mut op = HermitianOperator::zeros(n_sites);
    op.add_pauli_string(1.0, factors);
    op
}

/// Pauli matrix for `axis` acting on the one-based `site` of an
/// `n_sites`-qubit register.
pub fn site_operator(axis: Axis, site: usize, n_sites: usize) -> Result<HermitianOperator> {
    if site == 0 || site > n_sites {
        return Err(Error::validation(format!(
            "site {site} is out of range 1..={n_sites}"
        )));
    }
    Ok(pauli_string(n_sites, &[(axis, site - 1)]))
}

/// Antisymmetric exchange term `Z_i X_j - X_i Z_j` for the zero-based ordered
/// pair `(i, j)`.
pub fn dm_pair_term(i: usize, j: usize, n_sites: usize) -> Result<HermitianOperator> {
    if i == j || i >= n_sites || j >= n_sites {
        return Err(Error::validation(format!(
            "invalid site pair ({}, {}) for {n_sites} sites",
            i + 1,
            j + 1
        )));
    }
    let mut op = HermitianOperator::zeros(n_sites);
    op.add_pauli_string(1.0, &[(Axis::Z, i), (Axis::X, j)]);
    op.add_pauli_string(-1.0, &[(Axis::X, i), (Axis::Z, j)]);
    Ok(op)
}

/// Transverse-field driver `-Σ_i X_i`.
pub fn build_driver(n_sites: usize) -> Result<HermitianOperator> {
    if n_sites == 0 {
        return Err(Error::validation("driver needs at least one site"));
    }
    let mut op = HermitianOperator::zeros(n_sites);
    for s in 0..n_sites {
        op.add_pauli_string(-1.0, &[(Axis::X, s)]);
    }
    Ok(op)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Ising,
    Xy,
    Dm,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Ising, Model::Xy, Model::Dm];

    pub fn name(self) -> &'static str {
        match self {
            Model::Ising => "ising",
            Model::Xy => "xy",
            Model::Dm => "dm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerKind {
    Xx,
    Yy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    #[default]
    None,
    Xx,
    Yy,
}

impl Trigger {
    pub fn kind(self) -> Option<TriggerKind> {
        match self {
            Trigger::None => None,
            Trigger::Xx => Some(TriggerKind::Xx),
            Trigger::Yy => Some(TriggerKind::Yy),
        }
    }
}

/// Target model plus optional trigger term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub model: Model,
    #[serde(default)]
    pub trigger: Trigger,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trigger_strength: Option<f64>,
}

impl ModelSpec {
    pub fn new(model: Model) -> Self {
        ModelSpec {
            model,
            trigger: Trigger::None,
            trigger_strength: None,
        }
    }

    pub fn with_trigger(model: Model, kind: TriggerKind, strength: f64) -> Self {
        ModelSpec {
            model,
            trigger: match kind {
                TriggerKind::Xx => Trigger::Xx,
                TriggerKind::Yy => Trigger::Yy,
            },
            trigger_strength: Some(strength),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.trigger, self.trigger_strength) {
            (Trigger::None, Some(g)) if g != 0.0 => Err(Error::config(format!(
                "model.trigger_strength = {g} given but model.trigger is none"
            ))),
            (_, Some(g)) if !g.is_finite() => Err(Error::config(format!(
                "model.trigger_strength must be finite, got {g}"
            ))),
            _ => Ok(()),
        }
    }

    /// Trigger kind and strength, defaulting the strength when absent.
    pub fn effective_trigger(&self) -> Option<(TriggerKind, f64)> {
        self.trigger
            .kind()
            .map(|k| (k, self.trigger_strength.unwrap_or(DEFAULT_TRIGGER_STRENGTH)))
    }
}

/// Problem Hamiltonian of `model` on `graph`. Pair terms run once over each
/// undirected edge with its canonical `i < j` orientation.
pub fn build_target(graph: &SpinGraph, model: Model) -> HermitianOperator {
    let n = graph.n_sites();
    let mut op = HermitianOperator::zeros(n);
    for e in graph.edges() {
        let (i, j, w) = (e.i, e.j, e.coupling);
        match model {
            Model::Ising => op.add_pauli_string(w, &[(Axis::Z, i), (Axis::Z, j)]),
            Model::Xy => {
                op.add_pauli_string(w, &[(Axis::X, i), (Axis::X, j)]);
                op.add_pauli_string(w, &[(Axis::Y, i), (Axis::Y, j)]);
            }
            Model::Dm => {
                op.add_pauli_string(w, &[(Axis::Z, i), (Axis::X, j)]);
                op.add_pauli_string(-w, &[(Axis::X, i), (Axis::Z, j)]);
            }
        }
    }
    for (s, &h) in graph.fields().iter().enumerate() {
        op.add_pauli_string(h, &[(Axis::Z, s)]);
    }
    op
}

/// Trigger term `g Σ J_ij P_i P_j` with `P = X` or `P = Y`.
pub fn build_trigger(graph: &SpinGraph, kind: TriggerKind, strength: f64) -> Result<HermitianOperator> {
    if !strength.is_finite() {
        return Err(Error::validation(format!(
            "trigger strength must be finite, got {strength}"
        )));
    }
    let axis = match kind {
        TriggerKind::Xx => Axis::X,
        TriggerKind::Yy => Axis::Y,
    };
    let mut op = HermitianOperator::zeros(graph.n_sites());
    for e in graph.edges() {
        op.add_pauli_string(strength * e.coupling, &[(axis, e.i), (axis, e.j)]);
    }
    Ok(op)
}

/// `λ H1 + (1 - λ) H0 + λ (1 - λ) Ht`.
///
/// Returns exact copies of `h0` at λ = 0 and of `h1` at λ = 1.
pub fn interpolate(
    h0: &HermitianOperator,
    h1: &HermitianOperator,
    ht: Option<&HermitianOperator>,
    lambda: f64,
) -> Result<HermitianOperator> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::validation(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let dim = h0.dim();
    if h1.dim() != dim || ht.is_some_and(|t| t.dim() != dim) {
        return Err(Error::validation(format!(
            "operator dimensions differ: H0 {dim}, H1 {}, Ht {}",
            h1.dim(),
            ht.map_or("absent".to_string(), |t| t.dim().to_string())
        )));
    }
    if lambda == 0.0 {
        return Ok(h0.clone());
    }
    if lambda == 1.0 {
        return Ok(h1.clone());
    }
    let mut out = HermitianOperator::zeros(h0.n_sites());
    out.scaled_add(1.0 - lambda, h0);
    out.scaled_add(lambda, h1);
    if let Some(t) = ht {
        out.scaled_add(lambda * (1.0 - lambda), t);
    }
    Ok(out)
}
