use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rof-bench")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn run_dir(o: &Output) -> PathBuf {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    PathBuf::from(stdout(o).trim())
}

fn only_file(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn dimension_worked_example() {
    let o = bench(&["dimension", "--carrier-ghz", "28", "--bw-per-wavelength-ghz", "1", "--tx", "16", "--sectors", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "bw_per_wavelength_ghz,fs_ghz,nz,arof_bw_ghz,arof_rate_gbps,drof_bw_ghz,drof_rate_gbps,ratio_b,ratio_c"
    );
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cols.len(), 9);
    assert_eq!((cols[2], cols[3], cols[4]), ("28", "48", "384"));
    assert!((cols[5].parse::<f64>().unwrap() - 1954.29).abs() < 0.01);
}

#[test]
fn dimension_json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let o = bench(&[
        "dimension",
        "--bw-per-wavelength-ghz",
        "0.05:1:5",
        "--control-overhead",
        "16/15",
        "--output",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    for key in ["\"bw_per_wavelength_ghz\"", "\"fs_ghz\"", "\"nz\"", "\"ratio_b\"", "\"ratio_c\""] {
        assert_eq!(text.matches(key).count(), 5, "{key}");
    }
}

#[test]
fn power_columns_and_kind_filter() {
    let o = bench(&["power", "--sweep-tx", "1:64:9", "--sectors", "3"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "n_t,arof_watts,drof_watts");
    assert_eq!(text.lines().count(), 9);
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1] < v[2]);
    }
    let o = bench(&["power", "--tx", "8", "--kind", "arof"]);
    assert_eq!(stdout(&o).lines().next().unwrap(), "n_t,arof_watts");
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[fiber]\nlength = 3\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["dimension", "--qam", "3"],
        vec!["power", "--sweep-tx", "5:1:1"],
        vec!["link", "--set", "wdm_channels=0"],
        vec!["figure3", "--config", cfg.to_str().unwrap()],
        vec!["figure3", "--config", "/nonexistent/run.toml"],
        vec!["nonsense"],
    ];
    for args in cases {
        assert_eq!(bench(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = bench(&["figure4", "--out", blocker.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn figure_tables_carry_the_config_hash_and_repeat_exactly() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_dir(&bench(&["figure3", "--out", a.path().to_str().unwrap()]));
    let rb = run_dir(&bench(&["figure3", "--out", b.path().to_str().unwrap()]));
    let (fa, fb) = (only_file(&ra, "figure3.csv"), only_file(&rb, "figure3.csv"));
    assert_eq!(fa, fb);
    let hash = fa.lines().nth(1).unwrap().rsplit(',').next().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert!(ra.file_name().unwrap().to_str().unwrap().ends_with(&hash[..8]));
    assert!(fa.lines().skip(1).all(|l| l.ends_with(&hash)));

    let rc = run_dir(&bench(&["figure4", "--out", a.path().to_str().unwrap(), "--set", "figure4.tx_stop=8"]));
    assert_eq!(only_file(&rc, "figure4.csv").lines().count(), 9);
}

#[test]
fn link_and_sweep_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let small = ["--set", "payload_symbols=1000", "--set", "wdm_channels=1", "--seed", "3"];
    let mut args = vec!["link", "--out", out];
    args.extend(small);
    let r = run_dir(&bench(&args));
    let link = only_file(&r, "link.csv");
    assert_eq!(link.lines().next().unwrap(), "kind,wdm,laser_dbm,channel,evm_percent,scenario_hash");
    assert_eq!(link.lines().count(), 2);

    let mut args = vec![
        "sweep",
        "--out",
        out,
        "--jobs",
        "2",
        "--set",
        "sweep.kinds=[\"drof\"]",
        "--set",
        "sweep.wdm_counts=[1, 2]",
        "--set",
        "sweep.laser_start_dbm=0",
        "--set",
        "sweep.laser_stop_dbm=2",
        "--output",
        "json",
    ];
    args.extend(small);
    let r = run_dir(&bench(&args));
    let sweep = only_file(&r, "sweep.jsonl");
    assert_eq!(sweep.lines().count(), 3 + 3 * 2);
    let dynrange = only_file(&r, "dynrange.jsonl");
    assert_eq!(dynrange.lines().count(), 2);
    assert!(dynrange.contains("\"dynamic_range_db\":2"));
}
