use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_parking-ilu");

fn write_config(dir: &Path, model: &str, extra: &str) -> PathBuf {
    let path = dir.join("c.toml");
    let out = dir.join("out");
    let text = format!(
        "[env]\nS = -2.0\nL = 2.0\n\n[intensity]\nmodel = \"{model}\"\n\n[experiment]\nT = 150\nreplications = 12\nseed = 9\n\n[output]\ndirectory = '{}'\n{extra}",
        out.display()
    );
    std::fs::write(&path, text).unwrap();
    path
}

fn cli(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(csv: &str, name: &str) -> f64 {
    let mut lines = csv.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let row: Vec<_> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    row[i].parse().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "constant(1.0)", "");
    let c = c.to_str().unwrap();
    assert_eq!(code(&cli(&["validate", c])), 0);

    let low = cli(&["validate", c, "--set", "intensity.model=constant(0.5)"]);
    assert_eq!(code(&low), 2);
    assert!(String::from_utf8_lossy(&low.stderr).contains("property 2"));

    let sin = cli(&["validate", c, "--set", "intensity.model=sinusoidal(1.5, 0.3, 1.0)"]);
    assert_eq!(code(&sin), 0);
}

#[test]
fn parse_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[env]\nL = 2.0\n[intensity]\nmodel = \"constant(1.0)\"\n").unwrap();
    let o = cli(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("missing field `S`") && err.contains("line 1"), "{err}");

    std::fs::write(&bad, "[env]\nS = -2.0\nL = 2.0\nwidth = 3\n[intensity]\nmodel = \"constant(1.0)\"\n").unwrap();
    assert_eq!(code(&cli(&["validate", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&cli(&["validate", "/nonexistent/c.toml"])), 1);
    assert_eq!(code(&cli(&["frobnicate"])), 1);
    assert_eq!(code(&cli(&["--version"])), 0);
}

#[test]
fn solve_constant_models() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "constant(1.0)", "");
    let c = c.to_str().unwrap();
    let one = stdout(&cli(&["solve", c]));
    assert!((field(&one, "b_star") + 2f64.ln()).abs() < 1e-8);
    assert!(field(&one, "residual").abs() <= 1e-10);
    let two = stdout(&cli(&["solve", c, "--set", "intensity.model=constant(2.0)"]));
    assert!((field(&two, "b_star") + 2f64.ln() / 2.0).abs() < 1e-8);
}

#[test]
fn run_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "constant(1.0)", "");
    let c = c.to_str().unwrap();
    let out = dir.path().join("out");
    let names = ["regret.csv", "diagnostics.csv", "fit.csv"];
    assert_eq!(code(&cli(&["run", c, "--jobs", "1"])), 0);
    let first: Vec<Vec<u8>> = names.iter().map(|n| std::fs::read(out.join(n)).unwrap()).collect();
    assert_eq!(code(&cli(&["run", c, "--jobs", "3"])), 0);
    for (n, bytes) in names.iter().zip(&first) {
        assert_eq!(&std::fs::read(out.join(n)).unwrap(), bytes, "{n} differs");
    }
    let regret = String::from_utf8(first[0].clone()).unwrap();
    assert_eq!(regret.lines().next().unwrap(), "round,mean_gap,se,cumulative");
    assert_eq!(regret.lines().count(), 152);
}

#[test]
fn fixed_zero_regret_is_linear() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "constant(1.0)", "");
    let o = cli(&["run", c.to_str().unwrap(), "--set", "experiment.policy=fixed(0)"]);
    assert_eq!(code(&o), 0);
    let regret = std::fs::read_to_string(dir.path().join("out/regret.csv")).unwrap();
    let last: f64 = regret.lines().last().unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((last - 151.0 * (1.0 - 2f64.ln())).abs() < 1e-9);
}

#[test]
fn bounds_report_c_prime() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "constant(1.0)", "");
    let text = stdout(&cli(&["bounds", c.to_str().unwrap()]));
    let get = |k: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{k},")))
            .unwrap()
            .parse()
            .unwrap()
    };
    let (a, b) = (get("a"), get("b"));
    assert!((get("C_prime") - 1.0 / (40.0 / ((b - a) * (b - a)) + 1.0 / a)).abs() < 1e-12);
    assert!((a - (2f64.ln() / 2.0 + 0.5)).abs() < 1e-15);
}

#[test]
fn brute_agrees_with_solve_on_sinusoid() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "sinusoidal(1.5, 0.3, 1.0)", "");
    let o = cli(&["brute", c.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!((field(&s, "refined") - field(&s, "b_star")).abs() <= 1e-2, "{s}");
    assert!(dir.path().join("out/brute.csv").exists());
}

#[test]
fn simulate_and_mse_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(
        dir.path(),
        "constant(1.0)",
        "\n[simulate]\nthreshold = -0.5\nrounds = 4\nreplications = 2\n\n[mse]\nn_values = [5, 20]\nreplications = 50\n",
    );
    let c = c.to_str().unwrap();
    assert_eq!(code(&cli(&["simulate", c])), 0);
    let paths = std::fs::read_to_string(dir.path().join("out/paths.csv")).unwrap();
    assert_eq!(paths.lines().count(), 9);
    for line in paths.lines().skip(1) {
        let cols: Vec<_> = line.split(',').collect();
        let count: usize = cols[4].parse().unwrap();
        assert_eq!(cols[5].split(';').count(), count);
        assert!(cols[3].parse::<f64>().unwrap() > -0.5);
    }
    assert_eq!(code(&cli(&["mse", c])), 0);
    let mse = std::fs::read_to_string(dir.path().join("out/mse.csv")).unwrap();
    assert_eq!(mse.lines().count(), 1 + 2 * 4);
}

#[test]
fn empty_class_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "constant(1.0)", "");
    let o = cli(&["solve", c.to_str().unwrap(), "--set", "env.S=-0.1", "--set", "env.L=1.05"]);
    assert_eq!(code(&o), 2);
}
