use approx::assert_abs_diff_eq;
use spinanneal::io::{render_plot_data, render_results};
use spinanneal::{
    run_sweep, summarize, Model, ModelSpec, Preset, SpinGraph, SweepConfig, SweepResult, TriggerKind,
};

fn ising(preset: Preset, points: usize) -> SweepResult {
    let g = SpinGraph::preset(preset, -1.0, 1.0).unwrap();
    let cfg = SweepConfig {
        lambda_points: points,
        ..SweepConfig::default()
    };
    run_sweep(&g, &ModelSpec::new(Model::Ising), &cfg).unwrap()
}

#[test]
fn doubling_the_grid_barely_moves_mean_fidelity() {
    for preset in Preset::ALL {
        let coarse = summarize(&ising(preset, 201)).unwrap().mean_fidelity;
        let fine = summarize(&ising(preset, 401)).unwrap().mean_fidelity;
        assert!((coarse - fine).abs() < 1e-3, "{preset}: {coarse} vs {fine}");
    }
}

#[test]
fn refined_gap_is_never_above_grid_minimum() {
    for preset in Preset::ALL {
        for spec in [
            ModelSpec::new(Model::Dm),
            ModelSpec::with_trigger(Model::Dm, TriggerKind::Yy, 2.0),
            ModelSpec::new(Model::Xy),
        ] {
            let g = SpinGraph::preset(preset, -1.0, 1.0).unwrap();
            let r = run_sweep(&g, &spec, &SweepConfig::default()).unwrap();
            let grid_min = r.records.iter().map(|x| x.gap).fold(f64::INFINITY, f64::min);
            assert!(r.min_gap.gap <= grid_min, "{preset}");
            assert!((0.0..=1.0).contains(&r.min_gap.lambda));
        }
    }
}

#[test]
fn records_respect_invariants() {
    let r = ising(Preset::Square, 51);
    for rec in &r.records {
        assert_abs_diff_eq!(rec.gap, rec.e1 - rec.e0, epsilon = 1e-15);
        assert!(rec.gap >= 0.0);
        assert!((0.0..=1.0).contains(&rec.fidelity));
        assert!((-1.0..=1.0).contains(&rec.magnetization));
        assert!(rec.coherence_l1 >= 0.0);
        assert!(rec.entropies.iter().all(|s| *s >= 0.0 && *s <= 2f64.ln() + 1e-12));
    }
    assert_eq!(r.target_ground_degeneracy, 1);
    // |1111⟩: four bonds at -1 plus four fields at -1.
    assert_abs_diff_eq!(r.target_ground_energy, -8.0, epsilon = 1e-12);
}

#[test]
fn mean_fidelity_matches_trapezoid_of_records() {
    let r = ising(Preset::Chain, 11);
    let f: Vec<f64> = r.records.iter().map(|x| x.fidelity).collect();
    let manual = (0..10).map(|k| 0.05 * (f[k] + f[k + 1])).sum::<f64>();
    assert_abs_diff_eq!(summarize(&r).unwrap().mean_fidelity, manual, epsilon = 1e-14);
}

#[test]
fn rendering_is_a_pure_function_of_the_result() {
    let a = ising(Preset::ChainLoops, 17);
    let b = ising(Preset::ChainLoops, 17);
    assert_eq!(
        render_results(&a, "2000-01-01T00:00:00Z").unwrap(),
        render_results(&b, "2000-01-01T00:00:00Z").unwrap()
    );
}

#[test]
fn plot_data_requires_matching_grids() {
    let a = ising(Preset::Chain, 11);
    let b = ising(Preset::Square, 13);
    let err = render_plot_data(&[("chain".into(), &a), ("square".into(), &b)], "fidelity").unwrap_err();
    assert!(err.to_string().contains("square"));

    let single = ising(Preset::Chain, 201);
    let text = render_plot_data(&[("chain".into(), &single)], "gap").unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 201);
}

#[test]
fn sweep_rejects_single_site_graphs() {
    let g = SpinGraph::new(1, vec![], vec![1.0]).unwrap();
    assert!(run_sweep(&g, &ModelSpec::new(Model::Ising), &SweepConfig::default()).is_err());
}
