//! Command-line entry points: `run`, `compare` and `presets`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::anneal::{run_sweep, summarize, SweepResult};
use crate::error::{Error, Result};
use crate::graph::{Preset, SpinGraph};
use crate::io::{columns, emit_plot_data, load_config, write_results, write_summary, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "spinanneal", version, about = "Quantum annealing sweeps on small spin networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one sweep and write results.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides sweep.lambda_points from the config.
        #[arg(long)]
        lambda_points: Option<usize>,
    },
    /// Run the config on all four preset topologies and write plot data.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        lambda_points: Option<usize>,
        /// Merit column(s) to emit as plot data; defaults to every merit.
        #[arg(long)]
        merit: Vec<String>,
    },
    /// Print the edge sets of the preset topologies.
    Presets,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn cli_main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Run {
            config,
            out,
            lambda_points,
        } => run(&config, &out, lambda_points, stdout),
        Command::Compare {
            config,
            out,
            lambda_points,
            merit,
        } => compare(&config, &out, lambda_points, &merit, stdout),
        Command::Presets => presets(stdout),
    }
}

fn console(stdout: &mut dyn Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    writeln!(stdout, "{line}").map_err(|e| Error::io(Path::new("<stdout>"), e))
}

fn prepare(config: &Path, lambda_points: Option<usize>) -> Result<RunConfig> {
    let mut cfg = load_config(config)?;
    if let Some(n) = lambda_points {
        cfg.sweep.lambda_points = n;
        cfg.sweep.validate()?;
    }
    Ok(cfg)
}

fn create_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

fn run(config: &Path, out: &Path, lambda_points: Option<usize>, stdout: &mut dyn Write) -> Result<()> {
    let cfg = prepare(config, lambda_points)?;
    let graph = cfg.graph.build()?;
    let result = run_sweep(&graph, &cfg.model, &cfg.sweep)?;
    let summary = summarize(&result)?;
    create_dir(out)?;
    let results_path = out.join(&cfg.output.results);
    let summary_path = out.join(&cfg.output.summary);
    write_results(&result, &results_path)?;
    write_summary(&summary, &summary_path)?;
    console(
        stdout,
        format_args!(
            "{} model, {} points: min gap {:.6e} at lambda {:.6}, mean fidelity {:.6}",
            cfg.model.model.name(),
            result.records.len(),
            summary.min_gap.gap,
            summary.min_gap.lambda,
            summary.mean_fidelity
        ),
    )?;
    console(stdout, format_args!("wrote {}", results_path.display()))?;
    console(stdout, format_args!("wrote {}", summary_path.display()))
}

fn compare(
    config: &Path,
    out: &Path,
    lambda_points: Option<usize>,
    merits: &[String],
    stdout: &mut dyn Write,
) -> Result<()> {
    let cfg = prepare(config, lambda_points)?;
    let mut results: Vec<(String, SweepResult)> = Vec::with_capacity(Preset::ALL.len());
    for preset in Preset::ALL {
        let graph = cfg.graph.on_topology(preset)?.build()?;
        let result = run_sweep(&graph, &cfg.model, &cfg.sweep)
            .map_err(|e| Error::config(format!("{preset}: {e}")))?;
        results.push((preset.name().to_string(), result));
    }
    let merits: Vec<String> = if merits.is_empty() {
        columns(&results[0].1)
            .into_iter()
            .filter(|c| !matches!(c.as_str(), "lambda" | "E0" | "E1" | "ground_degeneracy"))
            .collect()
    } else {
        merits.to_vec()
    };
    // Validate merit names before writing anything.
    for m in &merits {
        crate::io::column_values(&results[0].1, m)?;
    }

    create_dir(out)?;
    console(
        stdout,
        format_args!("{:<12} {:>14} {:>10} {:>14}", "preset", "min_gap", "lambda*", "mean_fidelity"),
    )?;
    for (label, result) in &results {
        let summary = summarize(result)?;
        write_results(result, &out.join(format!("results_{label}.csv")))?;
        write_summary(&summary, &out.join(format!("summary_{label}.json")))?;
        console(
            stdout,
            format_args!(
                "{:<12} {:>14.6e} {:>10.6} {:>14.6}",
                label, summary.min_gap.gap, summary.min_gap.lambda, summary.mean_fidelity
            ),
        )?;
    }
    let labeled: Vec<(String, &SweepResult)> = results.iter().map(|(l, r)| (l.clone(), r)).collect();
    for m in &merits {
        let path = out.join(format!("plot_{m}.dat"));
        emit_plot_data(&labeled, m, &path)?;
        console(stdout, format_args!("wrote {}", path.display()))?;
    }
    Ok(())
}

fn presets(stdout: &mut dyn Write) -> Result<()> {
    for preset in Preset::ALL {
        let g = SpinGraph::preset(preset, 1.0, 0.0)?;
        console(stdout, format_args!("{}: {}", preset.name(), g.edge_listing()))?;
    }
    Ok(())
}
