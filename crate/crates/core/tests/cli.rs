use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ising-gof"))
}

#[test]
fn bounds_prints_a_number() {
    let out = bin()
        .args(["bounds", "--theorem", "forest-upper", "--p", "127", "--alpha", "0.1", "--s", "24"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((value - 127.0 / (0.1f64.sinh().powi(2) * 576.0)).abs() < 1e-9);
}

#[test]
fn exit_statuses() {
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));
    let capacity = bin().args(["sample", "--shape", "path", "--p", "30", "--n", "1", "--sampler", "exact"]).output();
    assert_eq!(capacity.unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["heatmap", "--trials", "0"]).output().unwrap().status.code(), Some(1));
}

#[test]
fn seeded_heatmaps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, "p = 15\ntrials = 8\ns_grid = 2,6\nn_grid = 20:60:20\nburn_in = 200\n").unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let svg = dir.path().join(format!("{name}.svg"));
        let status = bin()
            .args(["heatmap", "--config"])
            .arg(&cfg)
            .args(["--seed", "7", "--out"])
            .arg(&csv)
            .arg("--svg")
            .arg(&svg)
            .status()
            .unwrap();
        assert!(status.success());
        assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
        std::fs::read(csv).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 2 * 3);
}

#[test]
fn verify_widgets_reports_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let status = bin().args(["verify-widgets", "--grid", "default", "--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("family,lambda,mu,d,ell,exact_chi2,closed_form,bound,valid,pass"));
    assert!(!text.lines().any(|l| l.contains(",true,false,")));
}

#[test]
fn samples_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.txt");
    std::fs::write(&model, "4\n1 2 0.5\n2 3 -0.25\n3 4 1.0\n").unwrap();
    let out = dir.path().join("s.txt");
    let status = bin()
        .args(["sample", "--model"])
        .arg(&model)
        .args(["--n", "25", "--seed", "3", "--sampler", "exact", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let batch = ising_gof::io::read_samples(&out).unwrap();
    assert_eq!((batch.p(), batch.n()), (4, 25));
}
