use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn esp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn field(out: &Output, name: &str) -> f64 {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{name}: ")))
        .unwrap_or_else(|| panic!("no {name:?} in {}", stdout(out)))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn roundtrip_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let text = "the quick brown fox jumps over the lazy dog\n".repeat(200);
    let binary: Vec<u8> = (0..20_000u32)
        .map(|i| (i.wrapping_mul(2_654_435_761) >> 13) as u8)
        .collect();
    let samples: Vec<(&str, Vec<u8>)> = vec![("text", text.into_bytes()), ("binary", binary), ("empty", Vec::new())];
    let schedule_flags: [&[&str]; 3] = [
        &["--auto-n"],
        &["--schedule", "decaying"],
        &["--schedule", "count", "--lambda", "0.98", "--m", "3"],
    ];
    for (name, data) in &samples {
        let src = dir.path().join(name);
        fs::write(&src, data).unwrap();
        for flags in schedule_flags {
            let packed = dir.path().join(format!("{name}.esp"));
            let back = dir.path().join(format!("{name}.out"));
            let mut args = vec!["compress", p(&src), p(&packed)];
            args.extend_from_slice(flags);
            let out = esp(&args);
            assert!(
                out.status.success(),
                "{name} {flags:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            assert_eq!(field(&out, "original bits") as usize, data.len() * 8);
            let out = esp(&["decompress", p(&packed), p(&back)]);
            assert!(out.status.success());
            assert_eq!(&fs::read(&back).unwrap(), data, "{name} {flags:?}");

            // an already-compressed sample
            let twice = dir.path().join(format!("{name}.esp.esp"));
            let again = dir.path().join(format!("{name}.esp.out"));
            assert!(esp(&["compress", p(&packed), p(&twice), "--auto-n"]).status.success());
            assert!(esp(&["decompress", p(&twice), p(&again)]).status.success());
            assert_eq!(fs::read(&again).unwrap(), fs::read(&packed).unwrap());
        }
    }
}

#[test]
fn zero_megabyte_compresses_below_one_percent() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("zeros");
    fs::write(&src, vec![0u8; 1 << 20]).unwrap();
    let out = esp(&["compress", p(&src), p(&dir.path().join("z.esp")), "--auto-n"]);
    assert!(out.status.success());
    let payload = field(&out, "payload bits");
    assert!(payload < 0.01 * (8 << 20) as f64, "{payload}");
}

#[test]
fn identical_invocations_give_identical_containers() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in");
    fs::write(&src, b"abracadabra".repeat(100)).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for dst in [&a, &b] {
        assert!(esp(&["compress", p(&src), p(dst), "--alpha", "0.97", "--prior", "0.3"])
            .status
            .success());
    }
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn count_with_small_m_warns() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in");
    fs::write(&src, b"xyz").unwrap();
    let out = esp(&[
        "compress",
        p(&src),
        p(&dir.path().join("o")),
        "--schedule",
        "count",
        "--lambda",
        "0.96",
        "--m",
        "1",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let out = esp(&["compress", p(&src), p(&dir.path().join("o2")), "--alpha", "0.9"]);
    assert!(!String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("never");
    let missing = dir.path().join("missing");
    let out = esp(&["compress", p(&missing), p(&out_path), "--auto-n"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());

    assert_eq!(esp(&["bounds"]).status.code(), Some(1));
    assert_eq!(esp(&["bounds", "--n", "10", "--bogus"]).status.code(), Some(1));
    assert_eq!(esp(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(esp(&[]).status.code(), Some(1));

    let src = dir.path().join("in");
    fs::write(&src, b"data").unwrap();
    // fixed rate without a rate is a usage error
    assert_eq!(esp(&["compress", p(&src), p(&out_path)]).status.code(), Some(1));
    assert!(!out_path.exists());
    // not a container
    assert_eq!(esp(&["decompress", p(&src), p(&out_path)]).status.code(), Some(3));
    assert!(!out_path.exists());
    assert!(esp(&["--help"]).status.success());
}

#[test]
fn bounds_output() {
    let out = esp(&[
        "bounds",
        "--schedule",
        "fixed",
        "--n",
        "1000",
        "--segments",
        "1",
        "--pmin",
        "0.5",
    ]);
    assert!(out.status.success());
    let one = field(&out, "bound bits");
    assert!((one - 118.03).abs() < 0.02, "{one}");
    let three = field(&esp(&["bounds", "--n", "1000", "--segments", "3"]), "bound bits");
    assert!((three - 3.0 * one).abs() < 1e-5);
    assert_eq!(esp(&["bounds", "--n", "1000", "--pmin", "1.0"]).status.code(), Some(3));
    assert_eq!(esp(&["bounds", "--n", "1000", "--pmin", "0"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let out = esp(&["bounds", "--schedule", "decaying", "--n", "50", "--csv", p(&csv)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 51);
    assert_eq!(lines[0], "k,bound_bits");
    let last: f64 = lines[50].split(',').nth(1).unwrap().parse().unwrap();
    assert!((last - field(&out, "bound bits")).abs() < 1e-5);
}

#[test]
fn simulate_is_deterministic_and_dominated() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = esp(&[
            "simulate",
            "--schedule",
            "count",
            "--n",
            "150",
            "--partition",
            "0,50,150",
            "--q-step",
            "0.3",
            "--repeats",
            "2",
            "--seed",
            "42",
            "--out",
            p(&path),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("dominance: true"));
        fs::read(path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert!(a.starts_with(b"k,r_measured_bits,bound_bits\n"));

    let cfg = dir.path().join("study.cfg");
    fs::write(
        &cfg,
        "# small study\nn = 60\npartition = 0,20,60\nq_step = 0.45\nrepeats = 1\nschedule = decaying\n",
    )
    .unwrap();
    let out = esp(&["simulate", "--config", p(&cfg)]);
    assert!(out.status.success());
    assert_eq!(field(&out, "simulations"), 27.0);

    let plan = esp(&["simulate", "--full", "--plan"]);
    assert!(plan.status.success());
    assert_eq!(field(&plan, "simulations"), 13_032_100.0);

    fs::write(&cfg, "n = 60\npartition = 0,20,50\n").unwrap();
    assert_eq!(esp(&["simulate", "--config", p(&cfg)]).status.code(), Some(3));
}

#[test]
fn entropy_output() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = dir.path().join("zeros");
    fs::write(&zeros, [0u8; 64]).unwrap();
    let out = esp(&["entropy", p(&zeros), "--partition", "0,100,512"]);
    assert_eq!(field(&out, "entropy bits"), 0.0);
    assert_eq!(field(&out, "segment entropy bits"), 0.0);

    let alt = dir.path().join("alt");
    fs::write(&alt, [0x55u8; 32]).unwrap();
    let out = esp(&["entropy", p(&alt)]);
    assert_eq!(field(&out, "entropy bits"), 256.0);
    assert_eq!(field(&out, "segment entropy bits"), 256.0);

    assert_eq!(
        esp(&["entropy", p(&alt), "--partition", "0,100"]).status.code(),
        Some(3)
    );
    assert_eq!(esp(&["entropy", p(&dir.path().join("none"))]).status.code(), Some(2));
}
