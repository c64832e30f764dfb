//! Run configuration files, result tables, summaries and plot data.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::anneal::{SweepConfig, SweepResult, Summary};
use crate::error::{Error, Result};
use crate::graph::{CouplingVector, Preset, SpinGraph};
use crate::operators::ModelSpec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// How the graph of a run is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    /// Uniform coupling on a preset topology.
    Preset { preset: Preset, coupling: f64, fields: Fields },
    /// `[J12, J13, J14, J23, J24, J34]` projected onto a preset topology.
    CouplingVector {
        preset: Preset,
        couplings: CouplingVector,
        fields: Fields,
    },
    Inline(SpinGraph),
}

/// Field values: one shared value or one per site.
#[derive(Debug, Clone, PartialEq)]
pub enum Fields {
    Uniform(f64),
    PerSite(Vec<f64>),
}

impl Fields {
    fn expand(&self, n_sites: usize) -> Vec<f64> {
        match self {
            Fields::Uniform(h) => vec![*h; n_sites],
            Fields::PerSite(v) => v.clone(),
        }
    }

    fn to_value(&self) -> Value {
        match self {
            Fields::Uniform(h) => Value::from(*h),
            Fields::PerSite(v) => Value::from(v.clone()),
        }
    }

    fn from_value(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .map(Fields::Uniform)
                .ok_or_else(|| Error::config("graph.h: not a finite number")),
            Value::Array(items) => items
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::config("graph.h: entries must be numbers")))
                .collect::<Result<Vec<_>>>()
                .map(Fields::PerSite),
            _ => Err(Error::config("graph.h: expected a number or a list of numbers")),
        }
    }
}

impl GraphSpec {
    pub fn build(&self) -> Result<SpinGraph> {
        match self {
            GraphSpec::Preset {
                preset,
                coupling,
                fields: Fields::Uniform(h),
            } => SpinGraph::preset(*preset, *coupling, *h),
            GraphSpec::Preset {
                preset,
                coupling,
                fields,
            } => {
                let mut values = [0.0; 6];
                for (v, &(i, j)) in values.iter_mut().zip(&CouplingVector::PAIRS) {
                    if preset.contains(i, j) {
                        *v = *coupling;
                    }
                }
                SpinGraph::from_coupling_vector(*preset, &CouplingVector(values), &fields.expand(Preset::N_SITES))
            }
            GraphSpec::CouplingVector {
                preset,
                couplings,
                fields,
            } => SpinGraph::from_coupling_vector(*preset, couplings, &fields.expand(Preset::N_SITES)),
            GraphSpec::Inline(g) => Ok(g.clone()),
        }
        .map_err(|e| Error::config(format!("graph: {e}")))
    }

    /// The same couplings and fields on another preset topology. Inline
    /// graphs cannot be moved.
    pub fn on_topology(&self, target: Preset) -> Result<GraphSpec> {
        match self {
            GraphSpec::Preset { coupling, fields, .. } => Ok(GraphSpec::Preset {
                preset: target,
                coupling: *coupling,
                fields: fields.clone(),
            }),
            GraphSpec::CouplingVector { couplings, fields, .. } => {
                let mut values = *couplings.values();
                for (v, &(i, j)) in values.iter_mut().zip(&CouplingVector::PAIRS) {
                    if !target.contains(i, j) {
                        *v = 0.0;
                    }
                }
                Ok(GraphSpec::CouplingVector {
                    preset: target,
                    couplings: CouplingVector(values),
                    fields: fields.clone(),
                })
            }
            GraphSpec::Inline(_) => Err(Error::config(
                "compare needs a preset graph (preset + J or coupling_vector), not an inline graph",
            )),
        }
    }

    fn from_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::config("graph: expected a JSON object"))?;
        if obj.contains_key("n_sites") || obj.contains_key("edges") || obj.contains_key("fields") {
            if let Some(k) = obj.keys().find(|k| matches!(k.as_str(), "preset" | "J" | "h" | "coupling_vector")) {
                return Err(Error::config(format!(
                    "graph.{k}: an inline graph (n_sites/edges/fields) cannot be mixed with preset keys"
                )));
            }
            let g: SpinGraph =
                serde_json::from_value(v.clone()).map_err(|e| Error::config(format!("graph: {e}")))?;
            return Ok(GraphSpec::Inline(g));
        }
        let preset_name = obj
            .get("preset")
            .ok_or_else(|| Error::config("graph: missing `preset` (or an inline n_sites/edges/fields graph)"))?
            .as_str()
            .ok_or_else(|| Error::config("graph.preset: expected a string"))?;
        let preset: Preset = preset_name
            .parse()
            .map_err(|e: Error| Error::config(format!("graph.preset: {}", strip_prefix(&e))))?;
        if let Some(k) = obj
            .keys()
            .find(|k| !matches!(k.as_str(), "preset" | "J" | "h" | "coupling_vector"))
        {
            return Err(Error::config(format!(
                "graph.{k}: unknown key; expected preset, J, coupling_vector, h"
            )));
        }
        let fields = Fields::from_value(obj.get("h").ok_or_else(|| Error::config("graph.h: missing"))?)?;
        match (obj.get("J"), obj.get("coupling_vector")) {
            (Some(_), Some(_)) => Err(Error::config(
                "graph.coupling_vector: give either J or coupling_vector, not both",
            )),
            (None, None) => Err(Error::config("graph.J: missing (or give coupling_vector)")),
            (Some(j), None) => {
                let coupling = j.as_f64().ok_or_else(|| Error::config("graph.J: expected a number"))?;
                Ok(GraphSpec::Preset {
                    preset,
                    coupling,
                    fields,
                })
            }
            (None, Some(cv)) => {
                let values: Vec<f64> = serde_json::from_value(cv.clone())
                    .map_err(|e| Error::config(format!("graph.coupling_vector: {e}")))?;
                let couplings = CouplingVector::from_slice(&values)
                    .map_err(|e| Error::config(format!("graph.coupling_vector: {}", strip_prefix(&e))))?;
                Ok(GraphSpec::CouplingVector {
                    preset,
                    couplings,
                    fields,
                })
            }
        }
    }

    fn to_value(&self) -> Value {
        match self {
            GraphSpec::Preset {
                preset,
                coupling,
                fields,
            } => serde_json::json!({"preset": preset.name(), "J": coupling, "h": fields.to_value()}),
            GraphSpec::CouplingVector {
                preset,
                couplings,
                fields,
            } => serde_json::json!({
                "preset": preset.name(),
                "coupling_vector": couplings.values().to_vec(),
                "h": fields.to_value(),
            }),
            GraphSpec::Inline(g) => serde_json::to_value(g).expect("graph serializes"),
        }
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) | Error::Validation(m) | Error::Numerical(m) => m.clone(),
        other => other.to_string(),
    }
}

fn default_results() -> String {
    "results.csv".into()
}

fn default_summary() -> String {
    "summary.json".into()
}

/// File names, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_results")]
    pub results: String,
    #[serde(default = "default_summary")]
    pub summary: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            results: default_results(),
            summary: default_summary(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph: GraphSpec,
    pub model: ModelSpec,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRunConfig {
    graph: Value,
    model: Value,
    #[serde(default)]
    sweep: Option<Value>,
    #[serde(default)]
    output: Option<Value>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawRunConfig = serde_json::from_str(text).map_err(|e| Error::config(format!("config: {e}")))?;
        let graph = GraphSpec::from_value(&raw.graph)?;
        let model: ModelSpec =
            serde_json::from_value(raw.model).map_err(|e| Error::config(format!("model: {e}")))?;
        model.validate()?;
        let sweep: SweepConfig = match raw.sweep {
            Some(v) => serde_json::from_value(v).map_err(|e| Error::config(format!("sweep: {e}")))?,
            None => SweepConfig::default(),
        };
        sweep.validate()?;
        let output: OutputConfig = match raw.output {
            Some(v) => serde_json::from_value(v).map_err(|e| Error::config(format!("output: {e}")))?,
            None => OutputConfig::default(),
        };
        let cfg = RunConfig {
            graph,
            model,
            sweep,
            output,
        };
        let graph = cfg.graph.build()?;
        cfg.sweep.resolved(graph.n_sites())?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "graph": self.graph.to_value(),
            "model": self.model,
            "sweep": self.sweep,
            "output": self.output,
        })
    }
}

/// Reads and validates a run configuration. Unknown keys are rejected.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::parse(&text)
}

/// Configuration that reproduces `result` exactly (graph given inline).
pub fn config_echo(result: &SweepResult) -> Value {
    serde_json::json!({
        "graph": GraphSpec::Inline(result.graph.clone()).to_value(),
        "model": result.spec,
        "sweep": result.config,
    })
}

/// 12 significant digits; lowercase scientific when |x| < 1e-4 or
/// |x| >= 1e6. Zero prints as `0.00000000000`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let sci = format!("{x:.11e}");
    let a = x.abs();
    if !(1e-4..1e6).contains(&a) {
        return sci;
    }
    // Place the decimal point of the correctly rounded mantissa by hand so
    // rounding across a power of ten cannot add a digit.
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let body = if exp >= 0 {
        let split = (exp + 1) as usize;
        if split >= digits.len() {
            format!("{digits}{}", "0".repeat(split - digits.len()))
        } else {
            format!("{}.{}", &digits[..split], &digits[split..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{body}")
}

/// Column names of the result table in their fixed order.
pub fn columns(result: &SweepResult) -> Vec<String> {
    let mut cols: Vec<String> = ["lambda", "E0", "E1", "gap", "ground_degeneracy"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(result.partitions().iter().map(|p| p.column_name()));
    cols.extend(["magnetization", "coherence_l1", "fidelity"].iter().map(|s| s.to_string()));
    cols
}

/// Values of one column as floats.
pub fn column_values(result: &SweepResult, column: &str) -> Result<Vec<f64>> {
    let pick: Box<dyn Fn(&crate::anneal::SweepRecord) -> f64> = match column {
        "lambda" => Box::new(|r| r.lambda),
        "E0" => Box::new(|r| r.e0),
        "E1" => Box::new(|r| r.e1),
        "gap" => Box::new(|r| r.gap),
        "ground_degeneracy" => Box::new(|r| r.ground_degeneracy as f64),
        "magnetization" => Box::new(|r| r.magnetization),
        "coherence_l1" => Box::new(|r| r.coherence_l1),
        "fidelity" => Box::new(|r| r.fidelity),
        other => match result.partitions().iter().position(|p| p.column_name() == other) {
            Some(k) => Box::new(move |r| r.entropies[k]),
            None => {
                return Err(Error::config(format!(
                    "unknown merit column `{other}`; valid columns are: {}",
                    columns(result).join(", ")
                )))
            }
        },
    };
    Ok(result.records.iter().map(pick).collect())
}

/// Renders the CSV document for `result` with the given timestamp.
pub fn render_results(result: &SweepResult, timestamp: &str) -> Result<String> {
    if result.records.is_empty() {
        return Err(Error::validation("refusing to write a result table with no records"));
    }
    let mut out = String::new();
    writeln!(out, "# spinanneal results").unwrap();
    writeln!(out, "# version: {VERSION}").unwrap();
    writeln!(out, "# timestamp: {timestamp}").unwrap();
    writeln!(out, "# config: {}", config_echo(result)).unwrap();
    writeln!(out, "# target_ground_energy: {}", format_float(result.target_ground_energy)).unwrap();
    writeln!(out, "# target_ground_degeneracy: {}", result.target_ground_degeneracy).unwrap();
    writeln!(out, "# min_gap_lambda: {}", format_float(result.min_gap.lambda)).unwrap();
    writeln!(out, "# min_gap: {}", format_float(result.min_gap.gap)).unwrap();
    writeln!(out, "{}", columns(result).join(",")).unwrap();
    for r in &result.records {
        let mut cells = vec![
            format_float(r.lambda),
            format_float(r.e0),
            format_float(r.e1),
            format_float(r.gap),
            r.ground_degeneracy.to_string(),
        ];
        cells.extend(r.entropies.iter().map(|&s| format_float(s)));
        cells.push(format_float(r.magnetization));
        cells.push(format_float(r.coherence_l1));
        cells.push(format_float(r.fidelity));
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    Ok(out)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn write_results(result: &SweepResult, path: &Path) -> Result<()> {
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let text = render_results(result, &timestamp)?;
    write_file(path, &text)
}

pub fn write_summary(summary: &Summary, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    write_file(path, &text)
}

/// Whitespace-delimited `(λ, value)` blocks, one per labeled result,
/// separated by blank lines.
pub fn render_plot_data(results: &[(String, &SweepResult)], merit: &str) -> Result<String> {
    let Some((_, first)) = results.first() else {
        return Err(Error::validation("no results to plot"));
    };
    let grid = first.lambdas();
    let mut out = String::new();
    writeln!(out, "# merit: {merit}").unwrap();
    for (k, (label, result)) in results.iter().enumerate() {
        if result.lambdas() != grid {
            return Err(Error::validation(format!(
                "result `{label}` uses a different lambda grid from `{}`",
                results[0].0
            )));
        }
        let values = column_values(result, merit)?;
        if k > 0 {
            out.push_str("\n\n");
        }
        writeln!(out, "# {label}").unwrap();
        for (l, v) in grid.iter().zip(values) {
            writeln!(out, "{} {}", format_float(*l), format_float(v)).unwrap();
        }
    }
    Ok(out)
}

pub fn emit_plot_data(results: &[(String, &SweepResult)], merit: &str, path: &Path) -> Result<()> {
    let text = render_plot_data(results, merit)?;
    write_file(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::run_sweep;
    use crate::operators::{Model, Trigger};

    #[test]
    fn float_format() {
        assert_eq!(format_float(2.0), "2.00000000000");
        assert_eq!(format_float(-2.0), "-2.00000000000");
        assert_eq!(format_float(0.0), "0.00000000000");
        assert_eq!(format_float(-0.0), "0.00000000000");
        assert_eq!(format_float(15.0), "15.0000000000");
        assert_eq!(format_float(0.001234), "0.00123400000000");
        assert_eq!(format_float(123456.7), "123456.700000");
        assert_eq!(format_float(1e6), "1.00000000000e6");
        assert_eq!(format_float(3.2e-5), "3.20000000000e-5");
        assert_eq!(format_float(9.99999999999999), "10.0000000000");
        assert_eq!(format_float(0.3333333333333333), "0.333333333333");
    }

    #[test]
    fn parse_preset_config() {
        let cfg = RunConfig::parse(r#"{"graph":{"preset":"complete","J":-1,"h":1},"model":{"model":"ising"}}"#)
            .unwrap();
        assert_eq!(cfg.sweep, SweepConfig::default());
        assert_eq!(cfg.model.trigger, Trigger::None);
        assert_eq!(cfg.graph.build().unwrap(), SpinGraph::preset(Preset::Complete, -1.0, 1.0).unwrap());
    }

    #[test]
    fn parse_coupling_vector_config() {
        let cfg = RunConfig::parse(
            r#"{"graph":{"preset":"complete","coupling_vector":[-1,-0.5,-1,-1,-0.5,-1],"h":1},"model":{"model":"ising"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.graph.build().unwrap().edges().len(), 6);
    }

    #[test]
    fn rejects_unknown_preset() {
        let err = RunConfig::parse(r#"{"graph":{"preset":"nope"},"model":{"model":"ising"}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("graph.preset"), "{msg}");
        for p in Preset::ALL {
            assert!(msg.contains(p.name()), "{msg}");
        }
    }

    #[test]
    fn rejects_unknown_keys() {
        let cases = [
            (r#"{"graph":{"preset":"chain","J":-1,"h":1},"model":{"model":"dm","trigger":"xx","trigger_strenght":2}}"#, "trigger_strenght"),
            (r#"{"graph":{"preset":"chain","J":-1,"h":1,"g":2},"model":{"model":"dm"}}"#, "graph.g"),
            (r#"{"graph":{"preset":"chain","J":-1,"h":1},"model":{"model":"dm"},"swep":{}}"#, "swep"),
            (r#"{"graph":{"preset":"chain","J":-1,"h":1},"model":{"model":"dm"},"sweep":{"points":3}}"#, "points"),
        ];
        for (text, key) in cases {
            let msg = RunConfig::parse(text).unwrap_err().to_string();
            assert!(msg.contains(key), "{msg}");
        }
    }

    #[test]
    fn rejects_inconsistent_graph_forms() {
        let bad = [
            r#"{"graph":{"preset":"chain","J":-1,"coupling_vector":[-1,0,0,-1,0,-1],"h":1},"model":{"model":"ising"}}"#,
            r#"{"graph":{"preset":"chain","h":1},"model":{"model":"ising"}}"#,
            r#"{"graph":{"preset":"chain","J":-1},"model":{"model":"ising"}}"#,
            r#"{"graph":{"preset":"chain","n_sites":4,"edges":[],"fields":[0,0,0,0]},"model":{"model":"ising"}}"#,
            r#"{"graph":{"preset":"chain","coupling_vector":[-1,-1,0,-1,0,-1],"h":1},"model":{"model":"ising"}}"#,
            r#"{"graph":{"preset":"chain","coupling_vector":[-1,0,0,-1,0],"h":1},"model":{"model":"ising"}}"#,
            r#"{"graph":{"preset":"chain","J":-1,"h":1},"model":{"model":"ising","trigger_strength":1}}"#,
            r#"{"graph":{"preset":"chain","J":-1,"h":1},"model":{"model":"ising"},"sweep":{"lambda_points":1}}"#,
            r#"{"graph":{"preset":"chain","J":-1,"h":1},"model":{"model":"ising"},"sweep":{"partitions":["1|1"]}}"#,
            r#"not json"#,
        ];
        for text in bad {
            assert!(RunConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn inline_graph_config() {
        let cfg = RunConfig::parse(
            r#"{"graph":{"n_sites":3,"edges":[[1,2,-1],[2,3,-0.5]],"fields":[1,1,1]},"model":{"model":"xy"},"sweep":{"lambda_points":11}}"#,
        )
        .unwrap();
        let g = cfg.graph.build().unwrap();
        assert_eq!(g.n_sites(), 3);
        assert!(cfg.graph.on_topology(Preset::Chain).is_err());
    }

    fn small_result() -> SweepResult {
        let g = SpinGraph::preset(Preset::Chain, -1.0, 1.0).unwrap();
        let cfg = SweepConfig {
            lambda_points: 5,
            ..SweepConfig::default()
        };
        run_sweep(&g, &ModelSpec::new(Model::Ising), &cfg).unwrap()
    }

    #[test]
    fn results_layout() {
        let r = small_result();
        let text = render_results(&r, "T").unwrap();
        let header = "lambda,E0,E1,gap,ground_degeneracy,entropy_2_2,entropy_1_3,entropy_3_1,magnetization,coherence_l1,fidelity";
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines[0], header);
        assert_eq!(lines.len(), 6);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0], "0.00000000000");
        assert_eq!(first[3], "2.00000000000");
        assert_eq!(first[4], "1");
        assert!(lines[1].contains(",2.00000000000,1,"));
        assert_eq!(text, render_results(&r, "T").unwrap());
    }

    #[test]
    fn empty_results_rejected() {
        let mut r = small_result();
        r.records.clear();
        assert!(render_results(&r, "T").is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        assert!(write_results(&r, &path).is_err());
        assert!(!path.exists());
    }

    #[test]
    fn plot_blocks() {
        let r = small_result();
        let text = render_plot_data(&[("chain".into(), &r), ("again".into(), &r)], "fidelity").unwrap();
        let blocks: Vec<&str> = text.split("\n\n\n").collect();
        assert_eq!(blocks.len(), 2);
        assert!(blocks[0].contains("# chain"));
        assert!(blocks[1].starts_with("# again"));
        assert_eq!(blocks[1].lines().count(), 6);
        let err = render_plot_data(&[("chain".into(), &r)], "bogus").unwrap_err().to_string();
        assert!(err.contains("fidelity") && err.contains("entropy_2_2"), "{err}");
    }

    #[test]
    fn plot_rejects_mismatched_grid() {
        let r = small_result();
        let mut other = r.clone();
        other.records.pop();
        assert!(render_plot_data(&[("a".into(), &r), ("b".into(), &other)], "gap").is_err());
    }
}
