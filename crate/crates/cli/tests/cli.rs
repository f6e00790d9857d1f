use std::path::Path;
use std::process::{Command, Output};

fn hgc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn verify_small_instance_passes() {
    let out = hgc(&[
        "verify", "--r", "3", "--n", "10", "--edges", "15", "--seed", "7", "--kind", "weak",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("failures=0"), "{text}");
}

#[test]
fn verify_reports_are_byte_identical() {
    let args = [
        "verify", "--r", "3", "--n", "9", "--edges", "12", "--seed", "3", "--format", "records",
    ];
    let a = hgc(&args);
    let b = hgc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // a different seed changes the report
    let c = hgc(&[
        "verify", "--r", "3", "--n", "9", "--edges", "12", "--seed", "4", "--format", "records",
    ]);
    assert_ne!(a.stdout, c.stdout);
    // the report does not depend on the worker count
    let mut one = args.to_vec();
    one.extend(["--jobs", "1"]);
    let mut four = args.to_vec();
    four.extend(["--jobs", "4"]);
    assert_eq!(hgc(&one).stdout, hgc(&four).stdout);
}

#[test]
fn containers_emits_container_for_empty_fingerprint() {
    let dir = std::env::temp_dir().join("hgc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let graph = dir.join("single.txt");
    write(&graph, "3 3\n1 2 3\n");
    let out = hgc(&[
        "containers",
        graph.to_str().unwrap(),
        "--mode",
        "build",
        "--input-set",
        "",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("C="), "{text}");

    // prune trace of the worked example
    let traced = hgc(&[
        "containers",
        graph.to_str().unwrap(),
        "--mode",
        "prune",
        "--input-set",
        "1,2",
        "--tau",
        "0.5",
        "--zeta",
        "0.5",
        "--trace",
    ]);
    let text = String::from_utf8_lossy(&traced.stdout);
    assert!(text.contains("output T=1,2"), "{text}");
    assert!(text.contains("gamma s=1 sigma=3"), "{text}");
}

#[test]
fn lineq_rejects_non_abundant_with_exit_one() {
    let dir = std::env::temp_dir().join("hgc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let sys = dir.join("pair.txt");
    write(&sys, "1 2 ZN 8\n1 1\n0\n");
    let out = hgc(&["lineq", sys.to_str().unwrap(), "--epsilon", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("abundant=false"), "{text}");
}

#[test]
fn lineq_full_pipeline_on_sum_system() {
    let dir = std::env::temp_dir().join("hgc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let sys = dir.join("sum.txt");
    write(&sys, "1 3 ZN 10\n1 1 -1\n0\n");
    let out = hgc(&[
        "lineq",
        sys.to_str().unwrap(),
        "--gamma",
        "1.0",
        "--format",
        "records",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("abundant=true m=2"), "{text}");
    assert!(text.contains("ordering-ok=true"), "{text}");
    assert!(text.contains("container T="), "{text}");
}

#[test]
fn sidon_table_runs() {
    let out = hgc(&["sidon", "--n", "8", "--n", "10"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().count() >= 3, "{text}");
}

#[test]
fn sparse_sweep_is_deterministic() {
    let dir = std::env::temp_dir().join("hgc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let sys = dir.join("ap.txt");
    write(&sys, "1 3 ZN 20\n1 -2 1\n0\nZ norepeat\n");
    let args = [
        "sparse",
        sys.to_str().unwrap(),
        "--p-grid",
        "0.2,0.5",
        "--trials",
        "40",
        "--seed",
        "11",
    ];
    let a = hgc(&args);
    let b = hgc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two_scale_guard_exits_three() {
    let out = hgc(&["containers", "/nonexistent/file.txt"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = std::env::temp_dir().join("hgc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let sys = dir.join("huge.txt");
    write(&sys, "1 3 ZN 4000\n1 1 -1\n0\n");
    let out = hgc(&["lineq", sys.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn iterate_chain_reports_stages() {
    let dir = std::env::temp_dir().join("hgc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let graph = dir.join("chain.txt");
    write(
        &graph,
        "8 3\n1 2 3\n2 3 4\n3 4 5\n4 5 6\n5 6 7\n6 7 8\n1 4 7\n2 5 8\n",
    );
    let out = hgc(&[
        "iterate",
        graph.to_str().unwrap(),
        "--epsilon",
        "0.25",
        "--tau",
        "0.5",
        "--input-set",
        "1,5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("chain completed=true"), "{text}");
}
