use std::process::{Command, Output};

use uavcov_cli::config::RunConfig;

fn uavcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uavcov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(bytes: &[u8]) -> Table {
        let mut r = csv::ReaderBuilder::new().from_reader(bytes);
        let header = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|x| x.unwrap().iter().map(String::from).collect())
            .collect();
        Table { header, rows }
    }

    fn col(&self, name: &str) -> Vec<Option<f64>> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }
}

fn stdout_str(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_str(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn strictly(values: &[f64], increasing: bool) -> bool {
    values
        .windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

#[test]
fn theta_sweep_matches_simulation() {
    let o = uavcov(&[
        "sweep",
        "--axis",
        "theta_db",
        "--from",
        "-20",
        "--to",
        "20",
        "--step",
        "1",
        "--ple",
        "4",
        "--height-m",
        "100",
        "--density-per-km2",
        "1",
        "--snr-db",
        "20",
        "--method",
        "exact-quadrature",
        "--method",
        "monte-carlo",
        "--trials",
        "20000",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr_str(&o));
    let t = Table::parse(&o.stdout);
    assert_eq!(t.rows.len(), 41);
    assert_eq!(t.header.len(), 1 + 2 * 2);
    let a = t.col("exact-quadrature");
    let m = t.col("monte-carlo");
    let h = t.col("monte-carlo_err");
    for i in 0..41 {
        let (a, m, h) = (a[i].unwrap(), m[i].unwrap(), h[i].unwrap());
        assert!((a - m).abs() <= h.max(0.01), "row {i}: {a} vs {m} ± {h}");
    }
    assert!(stderr_str(&o).contains("within_max(0.01,ci)=true"));
}

#[test]
fn ple_sweep_trend_flips_with_snr() {
    for (snr, increasing) in [("50", true), ("10", false)] {
        let o = uavcov(&[
            "sweep",
            "--axis",
            "ple",
            "--from",
            "2",
            "--to",
            "5",
            "--step",
            "0.5",
            "--snr-db",
            snr,
            "--theta-db",
            "-5",
            "--height-m",
            "100",
            "--method",
            "exact-quadrature,monte-carlo",
            "--trials",
            "20000",
        ]);
        // the quadrature cell at n = 2 diverges and is left empty
        assert_eq!(code(&o), 3);
        assert!(stderr_str(&o).contains("ple=2: exact-quadrature"));
        let t = Table::parse(&o.stdout);
        assert_eq!(t.rows.len(), 7);
        let exact = t.col("exact-quadrature");
        assert!(exact[0].is_none() && t.rows[0][2].is_empty());
        let exact: Vec<f64> = exact.into_iter().flatten().collect();
        assert_eq!(exact.len(), 6);
        assert!(strictly(&exact, increasing), "SNR {snr}: {exact:?}");
        let mc: Vec<f64> = t.col("monte-carlo").into_iter().map(Option::unwrap).collect();
        assert!(strictly(&mc, increasing), "SNR {snr}: {mc:?}");
    }
}

#[test]
fn csv_format_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = uavcov(&[
        "sweep",
        "--axis",
        "z",
        "--from",
        "50",
        "--to",
        "150",
        "--step",
        "50",
        "--ple",
        "4",
        "--method",
        "exact-quadrature,closed-n4,no-noise",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    // summary on stdout when the table goes to a file
    assert!(stdout_str(&o).starts_with("sweep axis=z_m points=3"));
    let bytes = std::fs::read(&out).unwrap();
    assert!(!bytes.contains(&b'\r'));
    let text = String::from_utf8(bytes).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[0],
        "z_m,exact-quadrature,exact-quadrature_err,closed-n4,closed-n4_err,no-noise,no-noise_err"
    );
    for l in &lines[1..] {
        let cells: Vec<&str> = l.split(',').collect();
        assert_eq!(cells.len(), 7);
        for c in cells {
            let mantissa = c.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{c}");
        }
    }
}

#[test]
fn sweep_is_byte_identical_for_a_seed() {
    let args = [
        "sweep",
        "--axis",
        "snr_db",
        "--from",
        "0",
        "--to",
        "30",
        "--step",
        "10",
        "--method",
        "monte-carlo,nakagami-semianalytic",
        "--fading",
        "nakagami:2",
        "--trials",
        "5000",
        "--seed",
        "42",
    ];
    let a = uavcov(&args);
    let b = uavcov(&args);
    assert_eq!(code(&a), 0, "{}", stderr_str(&a));
    assert_eq!(a.stdout, b.stdout);
    let mut other = args.to_vec();
    let last = other.len() - 1;
    other[last] = "43";
    assert_ne!(uavcov(&other).stdout, a.stdout);
}

#[test]
fn bad_configs_exit_2() {
    assert_eq!(code(&uavcov(&["sweep", "--from", "0", "--to", "1", "--step", "1"])), 2);
    assert_eq!(
        code(&uavcov(&[
            "sweep", "--axis", "z", "--from", "0", "--to", "1", "--step", "1", "--method", "bogus"
        ])),
        2
    );
    assert_eq!(
        code(&uavcov(&[
            "sweep", "--axis", "z", "--from", "200", "--to", "100", "--step", "10"
        ])),
        2
    );
    assert_eq!(
        code(&uavcov(&[
            "sweep", "--axis", "z", "--from", "100", "--to", "200", "--step", "0"
        ])),
        2
    );
    assert_eq!(
        code(&uavcov(&[
            "sweep", "--axis", "lambda", "--from", "-1", "--to", "1", "--step", "1"
        ])),
        2
    );
    assert_eq!(code(&uavcov(&["sweep", "--ple", "4", "--sui", "--axis", "z"])), 2);
    assert_eq!(code(&uavcov(&["optimize"])), 2);
    assert_eq!(
        code(&uavcov(&[
            "optimize", "--target", "height", "--min", "300", "--max", "100"
        ])),
        2
    );
    assert_eq!(code(&uavcov(&["optimize", "--target", "height", "--min", "5"])), 2);
    assert_eq!(code(&uavcov(&["validate", "--config", "/nonexistent/cfg.toml"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "snr_db = \"loud\"\n").unwrap();
    let o = uavcov(&["validate", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr_str(&o).contains("config file"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "ple = 4.0\nsnr_db = 40.0\naxis = \"theta_db\"\nfrom = -10.0\nto = 10.0\nstep = 10.0\nmethods = [\"closed-n4\"]\n",
    )
    .unwrap();
    let from_file = uavcov(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&from_file), 0);
    let flags = uavcov(&[
        "sweep",
        "--ple",
        "4",
        "--snr-db",
        "40",
        "--axis",
        "theta_db",
        "--from",
        "-10",
        "--to",
        "10",
        "--step",
        "10",
        "--method",
        "closed-n4",
    ]);
    assert_eq!(from_file.stdout, flags.stdout);
    let overridden = uavcov(&["sweep", "--config", cfg.to_str().unwrap(), "--snr-db", "20"]);
    assert_eq!(code(&overridden), 0);
    assert_ne!(overridden.stdout, from_file.stdout);
    let t = Table::parse(&overridden.stdout);
    assert_eq!(t.rows.len(), 3);
}

#[test]
fn config_round_trip_is_a_fixed_point() {
    let text = r#"
        terrain_a = 4.6
        d0_m = 100.0
        ple = 3.3
        density_per_km2 = 0.3
        theta_db = -7.25
        snr_db = 33.3
        fading = "rician:10"
        axis = "lambda"
        from = 0.1
        to = 10.0
        step = 0.1
        methods = ["exact-quadrature", "monte-carlo"]
        trials = 12345
        seed = 9
        region_radius_m = 4000.0
        target = "density"
        min = 0.01
        max = 3.0
    "#;
    let first = RunConfig::from_toml(text).unwrap();
    let formatted = first.to_toml();
    let second = RunConfig::from_toml(&formatted).unwrap();
    assert_eq!(first, second);
    assert_eq!(second.to_toml(), formatted);
    // SI values derived from either parse agree bit for bit
    assert_eq!(first.scenario(None).unwrap(), second.scenario(None).unwrap());
    let d = RunConfig::default();
    assert_eq!(RunConfig::from_toml(&d.to_toml()).unwrap(), d);
}

#[test]
fn optimize_height_near_350m() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = uavcov(&[
        "optimize",
        "--target",
        "height",
        "--sui",
        "--snr-db",
        "0",
        "--theta-db",
        "-15",
        "--density-per-km2",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr_str(&o));
    let t = Table::parse(&std::fs::read(&out).unwrap());
    let flagged: Vec<&Vec<String>> = t.rows.iter().filter(|r| r[5] == "1").collect();
    assert_eq!(flagged.len(), 1);
    let z: f64 = flagged[0][0].parse().unwrap();
    assert!((z - 350.0).abs() <= 25.0, "optimum {z}");
    let cov: Vec<f64> = t.col("coverage").into_iter().map(Option::unwrap).collect();
    let best = cov.iter().copied().fold(0.0, f64::max);
    assert_eq!(flagged[0][2].parse::<f64>().unwrap(), best);
    // 20..600 every 5 m plus the refined optimum
    assert_eq!(t.rows.len(), 117 + 1);
    assert!(stdout_str(&o).contains("optimum target=height"));
}

#[test]
fn optimize_degenerate_bounds_give_one_row() {
    let o = uavcov(&["optimize", "--target", "height", "--min", "120", "--max", "120"]);
    assert_eq!(code(&o), 0);
    let t = Table::parse(&o.stdout);
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.rows[0][0].parse::<f64>().unwrap(), 120.0);
    assert_eq!(t.rows[0][5], "1");

    let o = uavcov(&[
        "optimize", "--target", "density", "--ple", "4", "--min", "2", "--max", "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr_str(&o));
    let t = Table::parse(&o.stdout);
    assert_eq!(t.rows.len(), 1);
    assert!((t.rows[0][0].parse::<f64>().unwrap() - 2.0).abs() < 1e-12);
    assert!(t.rows[0][4].contains("numeric"));
}

fn density_gap(snr: &str, theta: &str) -> f64 {
    let o = uavcov(&[
        "optimize",
        "--target",
        "density",
        "--ple",
        "4",
        "--snr-db",
        snr,
        "--theta-db",
        theta,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr_str(&o));
    let log = stderr_str(&o);
    assert!(log.contains("matches=standard-27"));
    let gap = log
        .split_whitespace()
        .find_map(|w| w.strip_prefix("relative_gap="))
        .expect("gap reported");
    gap.parse().unwrap()
}

#[test]
fn density_gap_shrinks_with_theta() {
    for snr in ["20", "40", "60"] {
        let gaps: Vec<f64> = ["-10", "0", "10"].iter().map(|t| density_gap(snr, t)).collect();
        assert!(strictly(&gaps, false), "SNR {snr}: {gaps:?}");
    }
}

#[test]
fn density_csv_flags_both_optima() {
    let o = uavcov(&[
        "optimize",
        "--target",
        "density",
        "--ple",
        "4",
        "--snr-db",
        "40",
        "--theta-db",
        "0",
    ]);
    let t = Table::parse(&o.stdout);
    assert_eq!(
        t.header,
        [
            "lambda_per_km2",
            "closed_n4",
            "closed_n4_err",
            "density_approx",
            "optimum"
        ]
    );
    assert_eq!(t.rows.len(), 101 + 2);
    let flags: Vec<&str> = t.rows.iter().map(|r| r[4].as_str()).filter(|f| !f.is_empty()).collect();
    assert_eq!(flags, ["closed", "numeric"]);
    let x: Vec<f64> = t.col("lambda_per_km2").into_iter().map(Option::unwrap).collect();
    assert!(strictly(&x, true));
}

#[test]
fn validate_passes_fails_on_perturbation_and_repeats() {
    let ok = uavcov(&["validate", "--trials", "20000"]);
    assert_eq!(code(&ok), 0, "{}", stdout_str(&ok));
    let report = stdout_str(&ok);
    assert_eq!(report.lines().filter(|l| l.starts_with("check=")).count(), 4);
    assert!(report.lines().all(|l| l.contains("status=PASS")));
    assert_eq!(uavcov(&["validate", "--trials", "20000"]).stdout, ok.stdout);

    let bad = uavcov(&["validate", "--trials", "20000", "--perturb-rho", "1.01"]);
    assert_eq!(code(&bad), 1);
    let report = stdout_str(&bad);
    assert!(report.contains("check=closed-identity status=FAIL"));
    assert!(report.lines().last().unwrap().contains("failures=closed-identity"));
}

#[test]
fn help_lists_subcommands() {
    let o = uavcov(&["--help"]);
    assert_eq!(code(&o), 0);
    let s = stdout_str(&o);
    for sub in ["sweep", "optimize", "validate"] {
        assert!(s.contains(sub));
    }
    assert!(!stdout_str(&uavcov(&["validate", "--help"])).contains("perturb"));
}
