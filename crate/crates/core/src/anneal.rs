//! λ sweeps: build the interpolated Hamiltonian on a uniform grid, record
//! every merit of its ground state and locate the minimum gap.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpinGraph;
use crate::merits::{Bipartition, LogBase, MeritSet};
use crate::operators::{build_driver, build_target, build_trigger, interpolate, HermitianOperator, ModelSpec};
use crate::spectrum::{
    diagonalize, energy_gap, ground_degeneracy, refine_min_gap, QuantumState, DEFAULT_DEGENERACY_REL_TOL,
};

fn default_lambda_points() -> usize {
    201
}

fn default_degeneracy_rel_tol() -> f64 {
    DEFAULT_DEGENERACY_REL_TOL
}

fn default_refine_gap() -> bool {
    true
}

fn default_refine_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Number of grid points on [0, 1], both ends included.
    #[serde(default = "default_lambda_points")]
    pub lambda_points: usize,
    /// Entropy partitions; `None` selects [`Bipartition::default_set`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<Vec<Bipartition>>,
    #[serde(default = "default_degeneracy_rel_tol")]
    pub degeneracy_rel_tol: f64,
    #[serde(default = "default_refine_gap")]
    pub refine_gap: bool,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    #[serde(default)]
    pub entropy_base: LogBase,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lambda_points: default_lambda_points(),
            partitions: None,
            degeneracy_rel_tol: default_degeneracy_rel_tol(),
            refine_gap: default_refine_gap(),
            refine_tol: default_refine_tol(),
            entropy_base: LogBase::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_points < 2 {
            return Err(Error::config(format!(
                "sweep.lambda_points must be at least 2, got {}",
                self.lambda_points
            )));
        }
        if !(self.degeneracy_rel_tol > 0.0 && self.degeneracy_rel_tol.is_finite()) {
            return Err(Error::config(format!(
                "sweep.degeneracy_rel_tol must be positive, got {}",
                self.degeneracy_rel_tol
            )));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol.is_finite()) {
            return Err(Error::config(format!(
                "sweep.refine_tol must be positive, got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }

    /// Uniform grid with exact endpoints 0 and 1.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.lambda_points - 1;
        (0..self.lambda_points)
            .map(|k| if k == last { 1.0 } else { k as f64 / last as f64 })
            .collect()
    }

    /// Copy with the partition set filled in for `n_sites`.
    pub fn resolved(&self, n_sites: usize) -> Result<SweepConfig> {
        let partitions = match &self.partitions {
            Some(ps) => {
                for p in ps {
                    if p.n_sites() != n_sites {
                        return Err(Error::config(format!(
                            "sweep.partitions entry `{p}` covers {} sites but the graph has {n_sites}",
                            p.n_sites()
                        )));
                    }
                }
                ps.clone()
            }
            None => Bipartition::default_set(n_sites),
        };
        Ok(SweepConfig {
            partitions: Some(partitions),
            ..self.clone()
        })
    }

    pub fn partition_list(&self) -> &[Bipartition] {
        self.partitions.as_deref().unwrap_or(&[])
    }
}

/// All merits at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub lambda: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub ground_degeneracy: usize,
    /// One entry per partition of the resolved config.
    pub entropies: Vec<f64>,
    pub magnetization: f64,
    pub coherence_l1: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinGap {
    pub lambda: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub graph: SpinGraph,
    pub spec: ModelSpec,
    /// Config echo with partitions resolved.
    pub config: SweepConfig,
    pub records: Vec<SweepRecord>,
    pub min_gap: MinGap,
    pub target_ground_energy: f64,
    pub target_ground_degeneracy: usize,
}

impl SweepResult {
    pub fn lambdas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lambda).collect()
    }

    pub fn partitions(&self) -> &[Bipartition] {
        self.config.partition_list()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// The three Hamiltonian pieces of one experiment.
struct Pipeline {
    driver: HermitianOperator,
    target: HermitianOperator,
    trigger: Option<HermitianOperator>,
}

impl Pipeline {
    fn new(graph: &SpinGraph, spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        let trigger = spec
            .effective_trigger()
            .map(|(kind, g)| build_trigger(graph, kind, g))
            .transpose()?;
        Ok(Pipeline {
            driver: build_driver(graph.n_sites())?,
            target: build_target(graph, spec.model),
            trigger,
        })
    }

    fn hamiltonian(&self, lambda: f64) -> Result<HermitianOperator> {
        interpolate(&self.driver, &self.target, self.trigger.as_ref(), lambda)
    }

    fn gap(&self, lambda: f64) -> Result<f64> {
        let es = diagonalize(&self.hamiltonian(lambda)?)?;
        energy_gap(&es)
    }
}

/// Runs a sweep, evaluating grid points in parallel.
pub fn run_sweep(graph: &SpinGraph, spec: &ModelSpec, cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(graph, spec, cfg, Execution::Parallel)
}

/// Runs a sweep. Records are ordered by λ and identical for both execution
/// modes.
pub fn run_sweep_with(
    graph: &SpinGraph,
    spec: &ModelSpec,
    cfg: &SweepConfig,
    execution: Execution,
) -> Result<SweepResult> {
    cfg.validate()?;
    if graph.n_sites() < 2 {
        return Err(Error::validation("a sweep needs at least two sites"));
    }
    let config = cfg.resolved(graph.n_sites())?;
    let pipeline = Pipeline::new(graph, spec)?;

    let target_es = diagonalize(&pipeline.target).map_err(|e| e.at_lambda(1.0))?;
    let target_space: Vec<QuantumState> = target_es.ground_space(config.degeneracy_rel_tol).to_vec();

    let evaluate = |lambda: f64| -> Result<SweepRecord> {
        let point = || -> Result<SweepRecord> {
            let es = diagonalize(&pipeline.hamiltonian(lambda)?)?;
            let merits = MeritSet::evaluate(
                es.ground_state(),
                config.partition_list(),
                &target_space,
                config.entropy_base,
            )?;
            Ok(SweepRecord {
                lambda,
                e0: es.energies[0],
                e1: es.energies[1],
                gap: energy_gap(&es)?,
                ground_degeneracy: ground_degeneracy(&es, config.degeneracy_rel_tol),
                entropies: merits.entropies,
                magnetization: merits.magnetization,
                coherence_l1: merits.coherence_l1,
                fidelity: merits.fidelity,
            })
        };
        point().map_err(|e| e.at_lambda(lambda))
    };

    let grid = config.grid();
    let records: Vec<SweepRecord> = match execution {
        Execution::Parallel => grid.par_iter().map(|&l| evaluate(l)).collect::<Result<_>>()?,
        Execution::Sequential => grid.iter().map(|&l| evaluate(l)).collect::<Result<_>>()?,
    };

    let min_gap = locate_min_gap(&records, &config, |l| pipeline.gap(l))?;

    Ok(SweepResult {
        graph: graph.clone(),
        spec: *spec,
        config,
        records,
        min_gap,
        target_ground_energy: target_es.ground_energy(),
        target_ground_degeneracy: target_space.len(),
    })
}

/// Grid minimum, optionally refined by golden section between the grid
/// neighbours of the best point. Never worse than the grid minimum.
fn locate_min_gap<F>(records: &[SweepRecord], cfg: &SweepConfig, gap_fn: F) -> Result<MinGap>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (k, best) = records
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.gap.total_cmp(&b.1.gap).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::validation("no records"))?;
    let grid_min = MinGap {
        lambda: best.lambda,
        gap: best.gap,
    };
    if !cfg.refine_gap {
        return Ok(grid_min);
    }
    let lo = records[k.saturating_sub(1)].lambda;
    let hi = records[(k + 1).min(records.len() - 1)].lambda;
    let (lambda, gap) = refine_min_gap(gap_fn, (lo, hi), cfg.refine_tol)?;
    Ok(if gap < grid_min.gap {
        MinGap { lambda, gap }
    } else {
        grid_min
    })
}

/// Trapezoidal integral of `ys` over `xs`.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakEntropy {
    pub partition: String,
    pub lambda: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalMerits {
    pub lambda: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub ground_degeneracy: usize,
    pub entropy: BTreeMap<String, f64>,
    pub magnetization: f64,
    pub coherence_l1: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub min_gap: MinGap,
    /// Fidelity averaged over λ with the trapezoidal rule.
    pub mean_fidelity: f64,
    pub peak_entropy: Vec<PeakEntropy>,
    #[serde(rename = "final")]
    pub final_merits: FinalMerits,
    pub target_ground_energy: f64,
    pub target_ground_degeneracy: usize,
    /// Number of grid points whose ground level is degenerate.
    pub degenerate_points: usize,
}

pub fn summarize(result: &SweepResult) -> Result<Summary> {
    let records = &result.records;
    let last = records
        .last()
        .ok_or_else(|| Error::validation("cannot summarize an empty sweep"))?;
    let lambdas = result.lambdas();
    let fid: Vec<f64> = records.iter().map(|r| r.fidelity).collect();
    let span = lambdas[lambdas.len() - 1] - lambdas[0];
    let mean_fidelity = if span > 0.0 {
        trapezoid(&lambdas, &fid) / span
    } else {
        fid[0]
    };

    let peak_entropy = result
        .partitions()
        .iter()
        .enumerate()
        .map(|(p, part)| {
            let best = records
                .iter()
                .max_by(|a, b| a.entropies[p].total_cmp(&b.entropies[p]))
                .expect("non-empty");
            PeakEntropy {
                partition: part.label(),
                lambda: best.lambda,
                value: best.entropies[p],
            }
        })
        .collect();

    let entropy = result
        .partitions()
        .iter()
        .zip(&last.entropies)
        .map(|(p, &v)| (p.label(), v))
        .collect();

    Ok(Summary {
        min_gap: result.min_gap,
        mean_fidelity,
        peak_entropy,
        final_merits: FinalMerits {
            lambda: last.lambda,
            e0: last.e0,
            e1: last.e1,
            gap: last.gap,
            ground_degeneracy: last.ground_degeneracy,
            entropy,
            magnetization: last.magnetization,
            coherence_l1: last.coherence_l1,
            fidelity: last.fidelity,
        },
        target_ground_energy: result.target_ground_energy,
        target_ground_degeneracy: result.target_ground_degeneracy,
        degenerate_points: records.iter().filter(|r| r.ground_degeneracy >= 2).count(),
    })
}
