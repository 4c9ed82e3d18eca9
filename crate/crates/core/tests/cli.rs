//! End-to-end runs of the `ssemc` binary.

use std::path::Path;
use std::process::{Command, Output};

use ssemc::cli::{EXIT_INVALID_FORMAT, EXIT_OK, EXIT_OUT_OF_DOMAIN, EXIT_USAGE};
use ssemc::store::load_registry;

fn ssemc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssemc"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn trained(dir: &Path) {
    for args in [&["dataset-gen", "--rows", "400"][..], &["train"]] {
        let out = ssemc(dir, args);
        assert_eq!(
            code(&out),
            EXIT_OK,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

fn write_doc(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn non_text_documents_are_rejected_before_anything_else() {
    let dir = tempfile::tempdir().unwrap();
    let out = ssemc(dir.path(), &["classify", "report.pdf"]);
    assert_eq!(code(&out), EXIT_INVALID_FORMAT);
    let empty = write_doc(dir.path(), "blank.txt", "  \n");
    assert_eq!(code(&ssemc(dir.path(), &["classify", &empty])), EXIT_INVALID_FORMAT);
    let binary = dir.path().join("bytes.txt");
    std::fs::write(&binary, [0xff, 0xfe, 0x00]).unwrap();
    assert_eq!(
        code(&ssemc(dir.path(), &["classify", binary.to_str().unwrap()])),
        EXIT_INVALID_FORMAT
    );
}

#[test]
fn missing_inputs_and_bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ssemc(dir.path(), &["train"])), EXIT_USAGE);
    assert_eq!(code(&ssemc(dir.path(), &["dataset-gen", "--rows", "0"])), EXIT_USAGE);
    assert_eq!(code(&ssemc(dir.path(), &["--lambda", "1.5", "train"])), EXIT_USAGE);
    assert_eq!(code(&ssemc(dir.path(), &["frobnicate"])), EXIT_USAGE);
    trained(dir.path());
    assert_eq!(code(&ssemc(dir.path(), &["compare", "--sizes", "5000"])), EXIT_USAGE);
}

#[test]
fn classify_reports_domain_known_and_novel() {
    let dir = tempfile::tempdir().unwrap();
    trained(dir.path());

    let weather = write_doc(dir.path(), "weather.txt", "Rain tomorrow, sunshine on Sunday.");
    let out = ssemc(dir.path(), &["classify", &weather]);
    assert_eq!(code(&out), EXIT_OUT_OF_DOMAIN);
    assert_eq!(stdout(&out), "weather.txt OutOfDomain - p=0\n");

    let car = write_doc(
        dir.path(),
        "car.txt",
        "buying low maintenance low price 15 mileage 24 safety high",
    );
    let out = ssemc(dir.path(), &["classify", &car]);
    assert_eq!(code(&out), EXIT_OK);
    assert!(stdout(&out).starts_with("car.txt Known "), "{}", stdout(&out));

    let odd = write_doc(
        dir.path(),
        "odd.txt",
        "buying low maintenance low price 900 mileage 400 safety high",
    );
    let out = ssemc(dir.path(), &["classify", &odd]);
    assert_eq!(code(&out), EXIT_OK);
    assert!(stdout(&out).starts_with("odd.txt Novel - p="), "{}", stdout(&out));
    assert!(!dir.path().join("registry.csv").exists());

    let out = ssemc(dir.path(), &["classify", "--spawn", &odd]);
    assert_eq!(code(&out), EXIT_OK);
    assert!(stdout(&out).starts_with("odd.txt Novel novel-1 p="), "{}", stdout(&out));
    assert!(dir.path().join("spawned/novel-1/odd.txt").exists());
    let registry = load_registry(&dir.path().join("registry.csv")).unwrap();
    assert!(registry.contains("novel-1"));
    assert!(std::fs::read_to_string(dir.path().join("model.ssemc"))
        .unwrap()
        .contains("novel-1"));

    let other = write_doc(
        dir.path(),
        "other.txt",
        "buying high maintenance high price 2000 mileage 1 safety low",
    );
    let out = ssemc(dir.path(), &["classify", "--spawn", &other]);
    assert!(
        stdout(&out).starts_with("other.txt Novel novel-2 p="),
        "{}",
        stdout(&out)
    );
    assert_eq!(load_registry(&dir.path().join("registry.csv")).unwrap().len(), 5);
}

#[test]
fn zero_lambda_matches_supervised_training() {
    let dir = tempfile::tempdir().unwrap();
    trained(dir.path());
    assert_eq!(code(&ssemc(dir.path(), &["--lambda", "0", "train"])), EXIT_OK);
    let em = std::fs::read(dir.path().join("model.ssemc")).unwrap();
    assert_eq!(code(&ssemc(dir.path(), &["train", "--supervised-only"])), EXIT_OK);
    let sup = std::fs::read(dir.path().join("model.ssemc")).unwrap();
    assert_eq!(em, sup);
}

#[test]
fn outputs_are_reproducible_and_seed_dependent() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        for args in [
            &["--seed", seed, "dataset-gen", "--rows", "300"][..],
            &["--seed", seed, "train"],
            &["--seed", seed, "evaluate"],
            &["--seed", seed, "compare", "--sizes", "10,40"],
        ] {
            assert_eq!(code(&ssemc(dir.path(), args)), EXIT_OK, "{args:?}");
        }
        ["cars.csv", "model.ssemc", "trace.csv", "metrics.csv", "compare.csv"]
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
    };
    let a = run("3");
    assert_eq!(a, run("3"));
    assert_ne!(a[0], run("4")[0]);

    let compare = String::from_utf8(a[4].clone()).unwrap();
    assert!(compare.starts_with("n,accuracy_supervised,accuracy_semisupervised,f1_supervised,f1_semisupervised\n"));
    assert_eq!(compare.lines().count(), 3);
    let trace = String::from_utf8(a[2].clone()).unwrap();
    assert!(trace.starts_with("iteration,objective,max_resp_change\n0,"));
}

#[test]
fn config_file_values_apply_and_flags_override_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "labeled_count = 30\nlambda = 0\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(
        code(&ssemc(dir.path(), &["--config", cfg, "dataset-gen", "--rows", "200"])),
        EXIT_OK
    );
    let out = ssemc(dir.path(), &["--config", cfg, "train"]);
    assert!(stdout(&out).contains("from 30 labeled"), "{}", stdout(&out));
    let out = ssemc(dir.path(), &["--config", cfg, "--labeled", "12", "train"]);
    assert!(stdout(&out).contains("from 12 labeled"), "{}", stdout(&out));
    std::fs::write(dir.path().join("bad.conf"), "colour = red\n").unwrap();
    let bad = dir.path().join("bad.conf");
    assert_eq!(
        code(&ssemc(dir.path(), &["--config", bad.to_str().unwrap(), "train"])),
        EXIT_USAGE
    );
}
