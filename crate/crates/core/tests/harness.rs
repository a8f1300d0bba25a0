use std::path::Path;

use danzer_core::harness::{
    alignedbox_summary, metric_suite, random_unit_box, run, sub_seed, write_atomic, Experiment,
    ExperimentConfig, Format, EXIT_GAP, EXIT_OK,
};
use danzer_core::pointset::NetOracle;
use danzer_core::{Error, Exec};

fn configs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::from_path(&configs_dir().join(name)).unwrap()
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::from_path(&path).unwrap();
            let text = cfg.to_toml_string().unwrap();
            assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg, "{}", path.display());
        }
    }
}

#[test]
fn unknown_fields_are_named() {
    let text = "experiment = \"schedule\"\n[params]\nn = 3\nwobble = 1\n";
    match ExperimentConfig::from_toml_str(text) {
        Err(Error::Config { field, message }) => {
            assert_eq!(field, "wobble");
            assert!(message.contains("line 4"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn stochastic_experiments_need_a_seed() {
    let cfg = ExperimentConfig::new(Experiment::Boxes);
    assert!(matches!(cfg.validate(), Err(Error::Config { field, .. }) if field == "seed"));
}

#[test]
fn witness_report_is_deterministic() {
    let cfg = load("witness.toml");
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.exit_code, EXIT_OK);
    assert_eq!(a.render(Format::Json).unwrap(), b.render(Format::Json).unwrap());
    let doc = &a.document;
    assert_eq!(doc["experiment"], "witness");
    assert!(doc["verification"]["recount"].as_u64().unwrap() >= 4);
    assert!(doc["config"].get("output").is_none());
}

#[test]
fn empty_net_exits_with_gap() {
    let report = run(&load("empty.toml")).unwrap();
    assert_eq!(report.exit_code, EXIT_GAP);
}

#[test]
fn sweep_table() {
    let cfg = load("sweep.toml");
    let report = run(&cfg).unwrap();
    assert_eq!(report.exit_code, EXIT_OK);
    let table = report.table.as_ref().unwrap();
    let counts: Vec<usize> = table.column("count_found").unwrap().iter().map(|c| c.parse().unwrap()).collect();
    assert_eq!(counts, vec![0, 1, 2, 3]);
    assert_eq!(table.column("status").unwrap(), vec!["NO_N", "CONCENTRATION", "CONCENTRATION", "CONCENTRATION"]);
    let csv = report.render(Format::Csv).unwrap();
    assert!(csv.starts_with("format_version,eps,n_selected,count_found,recount,diam,bound,status,certificate\n"));
    assert_eq!(csv, run(&cfg).unwrap().render(Format::Csv).unwrap());
}

#[test]
fn execution_modes_give_identical_results() {
    let net = NetOracle::ring_lattice_z_sqrt2_scaled(0.4).unwrap();
    let a = alignedbox_summary(&net, 2000, 50.0, 1e4, 16, 3, Exec::Sequential).unwrap();
    let b = alignedbox_summary(&net, 2000, 50.0, 1e4, 16, 3, Exec::Parallel).unwrap();
    assert_eq!(a.histogram, b.histogram);
    let m1 = metric_suite(2, 10, 10, &[0.5], 4, Exec::Sequential).unwrap();
    let m2 = metric_suite(2, 10, 10, &[0.5], 4, Exec::Parallel).unwrap();
    for (x, y) in m1.iter().zip(&m2) {
        assert_eq!(x.worst_residual, y.worst_residual);
    }
}

#[test]
fn unit_boxes_have_unit_volume() {
    for i in 0..100 {
        let b = random_unit_box(3, 10.0, 100.0, 9, i).unwrap();
        assert!((b.volume() - 1.0).abs() < 1e-12);
        assert!(b.reach() <= 10.0 + 100f64.sqrt() * 3f64.sqrt());
    }
}

#[test]
fn sub_seeds_differ_by_label() {
    assert_eq!(sub_seed(1, "a"), sub_seed(1, "a"));
    assert_ne!(sub_seed(1, "a"), sub_seed(1, "b"));
    assert_ne!(sub_seed(1, "a"), sub_seed(2, "a"));
}

#[test]
fn atomic_write_replaces_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    write_atomic(&path, b"one\n").unwrap();
    write_atomic(&path, b"two\n").unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "two\n");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn report_files_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load("metric.toml");
    let (p1, p2) = (dir.path().join("a.json"), dir.path().join("b.json"));
    run(&cfg).unwrap().write(Some(&p1), Format::Json).unwrap();
    run(&cfg).unwrap().write(Some(&p2), Format::Json).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}
