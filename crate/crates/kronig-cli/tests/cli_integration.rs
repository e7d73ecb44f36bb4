//! End-to-end tests of the `kronig` binary: flags, config files, exit
//! codes, CSV schemas and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kronig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kronig"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

#[test]
fn edges_analytic_small_run_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = kronig(&[
        "--command",
        "edges",
        "--method",
        "analytic",
        "--bands",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = read(dir.path(), "edges.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "band,e_min_hartree,e_max_hartree");
    assert_eq!(lines.count(), 3);
    let manifest = read(dir.path(), "manifest.txt");
    assert!(manifest.contains("command = edges"));
    assert!(manifest.contains("potential.kind = kp"));
    assert!(manifest.contains("file = edges.csv"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "potential.v0 = 0.5\nbands = 2\ngrid.n = 90\n").unwrap();
    let out = kronig(&[
        "--command",
        "edges",
        "--method",
        "analytic",
        "--config",
        cfg.to_str().unwrap(),
        "--v0",
        "1.0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let manifest = read(dir.path(), "manifest.txt");
    assert!(manifest.contains("potential.v0 = 1"), "{manifest}");
    assert!(manifest.contains("bands = 2"), "{manifest}");
}

#[test]
fn config_errors_exit_1_with_key_in_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "grid.n = -5\n").unwrap();
    let out = kronig(&[
        "--command",
        "bands",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("grid.n"), "{err}");
    // Nothing written on failure.
    assert!(!dir.path().join("bands.csv").exists());
}

#[test]
fn unknown_key_and_unknown_command_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "nonsense = 1\n").unwrap();
    let out = kronig(&[
        "--command",
        "bands",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));

    let out = kronig(&["--command", "dance"]);
    assert_eq!(out.status.code(), Some(1));

    let out = kronig(&["--command", "bands", "--grid-n", "-4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bands_csv_is_deterministic_and_well_formed() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "--command".to_string(),
            "bands".to_string(),
            "--grid-n".to_string(),
            "150".to_string(),
            "--samples".to_string(),
            "7".to_string(),
            "--bands".to_string(),
            "3".to_string(),
            "--normalize".to_string(),
            "true".to_string(),
            "--out".to_string(),
            out.to_string(),
        ]
    };
    let a1: Vec<String> = args(dir1.path().to_str().unwrap());
    let a2: Vec<String> = args(dir2.path().to_str().unwrap());
    let out1 = kronig(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    let out2 = kronig(&a2.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out1.status.success() && out2.status.success());
    let csv1 = fs::read(dir1.path().join("bands.csv")).unwrap();
    let csv2 = fs::read(dir2.path().join("bands.csv")).unwrap();
    assert_eq!(csv1, csv2, "bands.csv not byte-identical across runs");
    let man1 = fs::read(dir1.path().join("manifest.txt")).unwrap();
    let man2 = fs::read(dir2.path().join("manifest.txt")).unwrap();
    assert_eq!(man1, man2);

    let text = String::from_utf8(csv1).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kappa_frac,E_1_hartree,E_2_hartree,E_3_hartree,E_1_over_E1,E_2_over_E1,E_3_over_E1"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 7);
    // First sample is kappa_frac = 0 and its normalized E_1 column is 1.
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first[0], "0.00000000000e0");
    assert_eq!(first[4], "1.00000000000e0");
}

#[test]
fn compare_csv_schema_and_content() {
    let dir = tempfile::tempdir().unwrap();
    let out = kronig(&[
        "--command",
        "compare",
        "--grid-n",
        "600",
        "--bands",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = read(dir.path(), "compare.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "band,analytic_min_hartree,analytic_max_hartree,fdm_min_hartree,fdm_max_hartree,dev_min_hartree,dev_max_hartree"
    );
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[0], (i + 1).to_string());
        let dev: f64 = fields[5].parse().unwrap();
        assert!(dev < 1e-3);
    }
}

#[test]
fn compare_analytic_column_matches_reference_table() {
    // The analytic column of compare.csv is grid-independent; check it
    // against the reference edges for V0 = 0.5, a = 10, b = 2.
    let reference: [(f64, f64); 7] = [
        (0.030796, 0.037141),
        (0.121302, 0.148295),
        (0.266337, 0.332651),
        (0.459674, 0.588875),
        (0.698950, 0.915166),
        (0.989655, 1.309390),
        (1.342598, 1.767130),
    ];
    let dir = tempfile::tempdir().unwrap();
    let out = kronig(&[
        "--command",
        "compare",
        "--grid-n",
        "600",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = read(dir.path(), "compare.csv");
    for (line, &(lo, hi)) in csv.lines().skip(1).zip(reference.iter()) {
        let fields: Vec<&str> = line.split(',').collect();
        let a_min: f64 = fields[1].parse().unwrap();
        let a_max: f64 = fields[2].parse().unwrap();
        assert!((a_min - lo).abs() < 1e-5, "{a_min} vs {lo}");
        assert!((a_max - hi).abs() < 1e-5, "{a_max} vs {hi}");
    }
}

#[test]
fn bands_free_particle_reproduces_folded_parabolas() {
    let dir = tempfile::tempdir().unwrap();
    let out = kronig(&[
        "--command",
        "bands",
        "--v0",
        "0",
        "--grid-n",
        "400",
        "--samples",
        "5",
        "--bands",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = read(dir.path(), "bands.csv");
    let c = 12.0;
    let h = c / 400.0;
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let frac: f64 = fields[0].parse().unwrap();
        let e1: f64 = fields[1].parse().unwrap();
        let e2: f64 = fields[2].parse().unwrap();
        // Folded free dispersion: lowest two of (2 pi (frac + m)/c)^2 / 2.
        let mut folded: Vec<f64> = (-2i32..=2)
            .map(|m| {
                let k = 2.0 * std::f64::consts::PI * (frac + m as f64) / c;
                0.5 * k * k
            })
            .collect();
        folded.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let tol = |e: f64| 2.0 * e * e * h * h + 1e-9;
        assert!((e1 - folded[0]).abs() <= tol(folded[0]), "{e1} vs {}", folded[0]);
        assert!((e2 - folded[1]).abs() <= tol(folded[1]), "{e2} vs {}", folded[1]);
    }
}

#[test]
fn wavefunction_csv_six_periods_is_cell_periodic() {
    let dir = tempfile::tempdir().unwrap();
    let out = kronig(&[
        "--command",
        "wavefunction",
        "--grid-n",
        "180",
        "--periods",
        "6",
        "--kappa-frac",
        "1",
        "--states",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = read(dir.path(), "wavefunction.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "state,x_bohr,re_psi,im_psi,abs2_per_bohr"
    );
    let n = 180 * 6;
    let mut per_state: Vec<Vec<f64>> = vec![Vec::new(); 3];
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let s: usize = fields[0].parse().unwrap();
        per_state[s - 1].push(fields[4].parse().unwrap());
    }
    for density in &per_state {
        assert_eq!(density.len(), n);
        let lag = n / 6;
        let mean = density.iter().sum::<f64>() / n as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let a = density[i] - mean;
            let b = density[(i + lag) % n] - mean;
            num += a * b;
            den += a * a;
        }
        assert!(num / den > 0.99, "autocorrelation {}", num / den);
    }
}

#[test]
fn spectrum_csv_lists_all_ring_momenta() {
    let dir = tempfile::tempdir().unwrap();
    let out = kronig(&[
        "--command",
        "spectrum",
        "--grid-n",
        "120",
        "--periods",
        "5",
        "--bands",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = read(dir.path(), "spectrum.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "l,kappa_per_bohr,band,energy_hartree");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5 * 2);
}

#[test]
fn converge_reports_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = kronig(&[
        "--command",
        "converge",
        "--grid-sizes",
        "150,300,600",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let manifest = read(dir.path(), "manifest.txt");
    let order: f64 = manifest
        .lines()
        .find_map(|l| l.strip_prefix("fitted_order = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((1.7..=2.3).contains(&order), "order {order}");
}
