use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mbm::experiment::{parse_config, run_bound, run_build, run_ranks, run_simulate, run_spectrum};

const CODED: &str = "scheme = mic-sq\nN = 4\nK = 2\nm_rf = 4\nM = 2\nn_r = 4\n";

fn mbm(args: &[&str], env_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mbm"));
    cmd.args(args).env_remove("MBM_OUTPUT_DIR");
    if let Some(d) = env_dir {
        cmd.env("MBM_OUTPUT_DIR", d);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn single_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(f)
}

fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn spectrum_matches_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", CODED);
    let out = mbm(&["spectrum", cfg.to_str().unwrap()], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        body(&text),
        vec![
            "distance,count,percent",
            "12,15360,11.7417",
            "16,99840,76.3209",
            "20,15360,11.7417",
            "32,256,0.1957"
        ]
    );
    assert!(text.starts_with("# mbm "));
    assert!(text.contains("# scheme = mic-sq\n"));
}

#[test]
fn ranks_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", CODED);
    let out = mbm(&["ranks", cfg.to_str().unwrap()], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("min_rank=1 rank_one_pairs=1 total_pairs=130816"));
}

#[test]
fn standalone_constellation_dump() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "scheme = mic-sq\nm_rf = 4\nM = 4\nL = 2\n");
    let out = mbm(&["build", cfg.to_str().unwrap()], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines = body(&text);
    assert_eq!(lines.len(), 16);
    assert!(text.contains("# squaring M=4 L=2 size=16 dmin=16\n"));
    assert!(lines.contains(&"-3:-3 1:1"));
    assert!(lines.contains(&"3:-1 -1:3"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.cfg", "scheme = mic-sq\nN = 4\nK = 2\nm_rf = 4\nM = 3\n");
    let out = mbm(&["spectrum", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 5") && err.contains("M must be a power of two"), "{err}");

    let unknown = write_config(dir.path(), "u.cfg", "scheme = mic-sq\ncolour = red\n");
    assert_eq!(mbm(&["ranks", unknown.to_str().unwrap()], None).status.code(), Some(2));

    let missing = dir.path().join("nope.cfg");
    assert_eq!(mbm(&["ranks", missing.to_str().unwrap()], None).status.code(), Some(2));

    // 2^16 codewords x 2 constellation vectors is above the pair-sweep cap
    let big = write_config(dir.path(), "big.cfg", "scheme = mic-sq\nN = 4\nK = 2\nm_rf = 8\nM = 2\n");
    assert_eq!(mbm(&["spectrum", big.to_str().unwrap()], None).status.code(), Some(3));

    assert_eq!(mbm(&["figure", "12"], None).status.code(), Some(2));
    assert_eq!(mbm(&["frobnicate"], None).status.code(), Some(2));
}

#[test]
fn cli_output_is_library_output() {
    let dir = tempfile::tempdir().unwrap();
    let sim_text = "scheme = conventional\nm_rf = 2\nM = 2\nn_r = 2\nsnr_start = 0\nsnr_stop = 6\nsnr_step = 3\nseed = 9\nmax_blocks = 20000\n";
    let cases: [(&str, &str, fn(&_) -> _); 5] = [
        ("build", CODED, run_build),
        ("spectrum", CODED, run_spectrum),
        ("bound", CODED, run_bound),
        ("ranks", CODED, run_ranks),
        ("simulate", sim_text, run_simulate),
    ];
    for (cmd, text, lib) in cases {
        let cfg_path = write_config(dir.path(), &format!("{cmd}.cfg"), text);
        let out_path = dir.path().join(format!("{cmd}.out"));
        let out = mbm(
            &[
                "--workers",
                "1",
                cmd,
                cfg_path.to_str().unwrap(),
                "-o",
                out_path.to_str().unwrap(),
            ],
            None,
        );
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let from_cli = std::fs::read(&out_path).unwrap();
        let cfg = parse_config(text).unwrap();
        let from_lib = single_thread(|| lib(&cfg).unwrap());
        assert_eq!(from_cli, from_lib.into_bytes(), "{cmd}");
    }
}

#[test]
fn simulate_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.cfg",
        "scheme = mic-sq\nN = 4\nK = 2\nm_rf = 4\nM = 2\nn_r = 1\nsnr_start = 0\nsnr_stop = 4\nchunk_blocks = 256\nmax_blocks = 3000\n",
    );
    let run = |w: &str| {
        let out = mbm(&["--workers", w, "simulate", cfg.to_str().unwrap()], None);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(body(&a), body(&b));
    assert!(a.contains("# workers = 1\n") && b.contains("# workers = 3\n"));
}

#[test]
fn output_key_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("sub/ber.csv");
    let text = format!(
        "scheme = conventional\nm_rf = 1\nM = 2\nn_r = 1\nsnr_start = 0\nsnr_stop = 0\nmax_blocks = 5000\noutput = {}\n",
        target.display()
    );
    let cfg = write_config(dir.path(), "o.cfg", &text);
    let out = mbm(&["simulate", cfg.to_str().unwrap(), "--seed", "77"], None);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    assert!(written.contains("# seed = 77\n"));
    assert!(written.lines().last().unwrap().ends_with(",77"));
}

#[test]
fn figure_uses_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = mbm(&["figure", "7"], Some(dir.path()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let coded = std::fs::read_to_string(dir.path().join("fig7_mic-sq_bound.csv")).unwrap();
    let conv = std::fs::read_to_string(dir.path().join("fig7_conventional_bound.csv")).unwrap();
    for text in [&coded, &conv] {
        assert!(text.contains("# command = figure 7\n"));
        assert_eq!(body(text)[0], "snr_db,ber_bound");
    }
    let last: f64 = body(&coded).last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(last < 1e-20, "{last}");
}
