mod common;

use common::*;
use ieobs_core::harness::{
    compare_runs, emit_plot, load_config, parse_csv, run_experiment, run_experiment_with,
    trace_to_csv, write_csv, PlotOptions, Quantity, RunOptions, Series,
};
use ieobs_core::{DenseMatrix, Error, PlantDefinition};

#[test]
fn bundled_configs_load_from_disk() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    for name in [
        "reference.toml",
        "ablation_sustained.toml",
        "ablation_gated.toml",
    ] {
        let cfg = load_config(format!("{dir}/{name}")).unwrap();
        assert_eq!(cfg.dims().psi_len(), 12, "{name}");
    }
    assert!(matches!(
        load_config(format!("{dir}/missing.toml")),
        Err(Error::Io(_))
    ));
}

#[test]
fn csv_round_trip_of_real_run() {
    let cfg = reference_with_steps(60);
    let run = run_experiment_with(&cfg, RunOptions { full_dump: true }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    write_csv(&run.trace, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 61);
    assert!(text.starts_with("t,y_0,u_0,u_1,psi_err,x_err,gamma_sq,gram_min_eig,eta,p_hat_0,"));
    assert_eq!(parse_csv(&text).unwrap(), run.trace);
    assert!(run.trace.windows(2).all(|w| w[1].t == w[0].t + 1));
}

#[test]
fn csv_bytes_are_deterministic() {
    let cfg = reference_with_steps(400);
    let a = trace_to_csv(&run_experiment(&cfg).unwrap().trace);
    let b = trace_to_csv(&run_experiment(&cfg).unwrap().trace);
    assert_eq!(a, b);
}

#[test]
fn plot_is_byte_stable_and_marks_switch() {
    let cfg = reference_with_steps(200);
    let run = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let series = [Series {
        label: "ie",
        trace: &run.trace,
        sie_step: run.summary.sie_step(),
    }];
    let opts = PlotOptions {
        quantity: Quantity::PsiErr,
        log_scale: true,
        title: "parameter error",
    };
    let (p1, p2) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    emit_plot(&series, opts, &p1).unwrap();
    emit_plot(&series, opts, &p2).unwrap();
    let a = std::fs::read(&p1).unwrap();
    assert_eq!(a, std::fs::read(&p2).unwrap());
    let svg = String::from_utf8(a).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("stroke-dasharray"));
}

#[test]
fn compare_identical_configs_gives_identical_rows() {
    let cfg = reference_with_steps(300);
    let cmp = compare_runs(&[cfg.clone(), cfg]).unwrap();
    assert_eq!(cmp.rows[0], cmp.rows[1]);
    assert_eq!(cmp.runs[0].trace, cmp.runs[1].trace);
    assert_eq!(cmp.table().lines().count(), 3);
}

#[test]
fn compare_rejects_plant_mismatch() {
    let a = reference_with_steps(10);
    let mut b = a.clone();
    b.plant = PlantDefinition::new(
        a.plant.a_blocks().to_vec(),
        DenseMatrix::zeros(3, 2),
        a.plant.x0().to_vec(),
    )
    .unwrap();
    assert!(matches!(
        compare_runs(&[a.clone(), b]),
        Err(Error::PlantMismatch(_))
    ));
    assert!(compare_runs(&[a]).is_err());
}

#[test]
fn ablation_trio_orders_final_errors() {
    let cfgs: Vec<_> = [REFERENCE, SUSTAINED, GATED]
        .into_iter()
        .map(|t| {
            let mut c = load(t);
            c.steps = 2000;
            c
        })
        .collect();
    let cmp = compare_runs(&cfgs).unwrap();
    let r: Vec<f64> = cmp.rows.iter().map(|r| r.psi_err_ratio).collect();
    assert!(r[0] < r[1] && r[1] < r[2], "{r:?}");
    assert!(r[2] > 1e-2);
    assert!(cmp
        .rows
        .iter()
        .all(|r| r.monotone_ok && r.sie_step == Some(12)));
}

#[test]
fn nan_state_reports_step() {
    let mut cfg = reference_with_steps(50);
    cfg.plant = PlantDefinition::new(
        vec![DenseMatrix::new(1, 1, vec![1e200]).unwrap(); 3],
        cfg.plant.b().clone(),
        cfg.plant.x0().to_vec(),
    )
    .unwrap();
    match run_experiment(&cfg) {
        Err(Error::NumericFailure { step, .. }) => assert!(step < 50),
        other => panic!("expected numeric failure, got {other:?}"),
    }
}
