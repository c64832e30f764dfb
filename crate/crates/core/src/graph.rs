//! Spin-network topologies with couplings and on-site fields.
//!
//! Sites are zero-based inside the crate. Files and human-facing listings use
//! one-based site labels, so edge `(0, 1)` prints and serializes as `(1, 2)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected coupling between two sites, stored with `i < j`.
///
/// The orientation matters for the antisymmetric exchange term, which is
/// always evaluated for the ordered pair `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub coupling: f64,
}

/// Four-site topologies studied in the annealing comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Chain,
    Square,
    ChainLoops,
    Complete,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Chain,
        Preset::Square,
        Preset::ChainLoops,
        Preset::Complete,
    ];

    pub const N_SITES: usize = 4;

    pub fn name(self) -> &'static str {
        match self {
            Preset::Chain => "chain",
            Preset::Square => "square",
            Preset::ChainLoops => "chain_loops",
            Preset::Complete => "complete",
        }
    }

    /// Zero-based site pairs of the preset, in canonical order.
    pub fn pairs(self) -> &'static [(usize, usize)] {
        match self {
            Preset::Chain => &[(0, 1), (1, 2), (2, 3)],
            Preset::Square => &[(0, 1), (0, 3), (1, 2), (2, 3)],
            // K4 without the end-to-end edge (1,4): chain plus both diagonals.
            Preset::ChainLoops => &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)],
            Preset::Complete => &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        }
    }

    pub fn contains(self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.pairs().contains(&(a, b))
    }

    fn valid_names() -> String {
        Preset::ALL
            .iter()
            .map(|p| p.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown preset `{s}`; valid presets are: {}",
                    Preset::valid_names()
                ))
            })
    }
}

/// Couplings of the complete four-site graph in the fixed order
/// `[J12, J13, J14, J23, J24, J34]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingVector(pub [f64; 6]);

impl CouplingVector {
    /// Zero-based pairs matching the entries of the vector.
    pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        let arr: [f64; 6] = values.try_into().map_err(|_| {
            Error::validation(format!(
                "coupling vector must have 6 entries [J12, J13, J14, J23, J24, J34], got {}",
                values.len()
            ))
        })?;
        if let Some(bad) = arr.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "coupling vector entries must be finite, got {bad}"
            )));
        }
        Ok(CouplingVector(arr))
    }

    pub fn uniform(j: f64) -> Self {
        CouplingVector([j; 6])
    }

    pub fn values(&self) -> &[f64; 6] {
        &self.0
    }
}

/// A spin network: site count, weighted undirected edges and per-site fields.
///
/// Edges are kept sorted by `(i, j)` so that equal graphs compare and
/// serialize identically.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinGraph {
    n_sites: usize,
    edges: Vec<Edge>,
    fields: Vec<f64>,
}

impl SpinGraph {
    /// Builds a graph from zero-based edges. Edges must satisfy `i < j`.
    pub fn new(n_sites: usize, edges: Vec<Edge>, fields: Vec<f64>) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::validation("n_sites must be positive"));
        }
        if fields.len() != n_sites {
            return Err(Error::validation(format!(
                "fields must have exactly n_sites = {n_sites} entries, got {}",
                fields.len()
            )));
        }
        if let Some((k, h)) = fields.iter().enumerate().find(|(_, h)| !h.is_finite()) {
            return Err(Error::validation(format!(
                "field at site {} is not finite: {h}",
                k + 1
            )));
        }
        let mut edges = edges;
        for e in &edges {
            if e.i >= e.j {
                return Err(Error::validation(format!(
                    "edge ({}, {}) must satisfy i < j",
                    e.i + 1,
                    e.j + 1
                )));
            }
            if e.j >= n_sites {
                return Err(Error::validation(format!(
                    "edge ({}, {}) references a site beyond n_sites = {n_sites}",
                    e.i + 1,
                    e.j + 1
                )));
            }
            if !e.coupling.is_finite() {
                return Err(Error::validation(format!(
                    "coupling on edge ({}, {}) is not finite",
                    e.i + 1,
                    e.j + 1
                )));
            }
        }
        edges.sort_by_key(|e| (e.i, e.j));
        if let Some(w) = edges.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::validation(format!(
                "duplicate edge ({}, {})",
                w[0].i + 1,
                w[0].j + 1
            )));
        }
        Ok(SpinGraph {
            n_sites,
            edges,
            fields,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// Uniform coupling `j` on every edge of `preset` and uniform field `h`.
    pub fn preset(preset: Preset, j: f64, h: f64) -> Result<Self> {
        if !j.is_finite() || !h.is_finite() {
            return Err(Error::validation(format!(
                "preset couplings and fields must be finite, got J = {j}, h = {h}"
            )));
        }
        let edges = preset
            .pairs()
            .iter()
            .map(|&(i, j_site)| Edge {
                i,
                j: j_site,
                coupling: j,
            })
            .collect();
        SpinGraph::new(Preset::N_SITES, edges, vec![h; Preset::N_SITES])
    }

    /// Projects a coupling vector onto `topology`.
    ///
    /// Every entry whose pair is absent from the topology must be zero.
    pub fn from_coupling_vector(
        topology: Preset,
        couplings: &CouplingVector,
        fields: &[f64],
    ) -> Result<Self> {
        if fields.len() != Preset::N_SITES {
            return Err(Error::validation(format!(
                "fields must have {} entries, got {}",
                Preset::N_SITES,
                fields.len()
            )));
        }
        let mut edges = Vec::with_capacity(6);
        for (&(i, j), &value) in CouplingVector::PAIRS.iter().zip(couplings.values()) {
            if topology.contains(i, j) {
                edges.push(Edge { i, j, coupling: value });
            } else if value != 0.0 {
                return Err(Error::validation(format!(
                    "coupling J{}{} = {value} is nonzero but edge ({}, {}) is not part of the {topology} topology",
                    i + 1,
                    j + 1,
                    i + 1,
                    j + 1
                )));
            }
        }
        SpinGraph::new(Preset::N_SITES, edges, fields.to_vec())
    }

    /// Space-separated one-based edge list, e.g. `(1,2) (2,3) (3,4)`.
    pub fn edge_listing(&self) -> String {
        self.edges
            .iter()
            .map(|e| format!("({},{})", e.i + 1, e.j + 1))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n_sites: usize,
    edges: Vec<(usize, usize, f64)>,
    fields: Vec<f64>,
}

impl TryFrom<GraphFile> for SpinGraph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        let mut edges = Vec::with_capacity(file.edges.len());
        for (i, j, coupling) in file.edges {
            if i == 0 || j == 0 {
                return Err(Error::validation(format!(
                    "edge ({i}, {j}): site labels are 1-based"
                )));
            }
            edges.push(Edge {
                i: i - 1,
                j: j - 1,
                coupling,
            });
        }
        SpinGraph::new(file.n_sites, edges, file.fields)
    }
}

impl From<&SpinGraph> for GraphFile {
    fn from(g: &SpinGraph) -> Self {
        GraphFile {
            n_sites: g.n_sites,
            edges: g.edges.iter().map(|e| (e.i + 1, e.j + 1, e.coupling)).collect(),
            fields: g.fields.clone(),
        }
    }
}

impl Serialize for SpinGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpinGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = GraphFile::deserialize(deserializer)?;
        SpinGraph::try_from(file).map_err(serde::de::Error::custom)
    }
}
