use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn separable_lines_are_predicted_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let mut text = String::from("x,y,label\n");
    for i in 0..20 {
        let t = i as f64 * 0.5 - 5.0;
        text += &format!("{t},0,10\n0,{t},20\n");
    }
    fs::write(&train, text).unwrap();
    let model = dir.path().join("lines.model");
    let o = nss(&[
        "fit",
        "--data",
        p(&train),
        "--dim",
        "1",
        "--model",
        p(&model),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let held_out = dir.path().join("held.csv");
    fs::write(&held_out, "x,y\n7.25,0.01\n-0.02,-8.5\n3.3,0.2\n").unwrap();
    let o = nss(&["predict", "--model", p(&model), "--data", p(&held_out)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "label\n10\n20\n10\n");
}

#[test]
fn training_accuracy_is_printed_and_residuals_written() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sub.csv");
    let o = nss(&[
        "gen",
        "--data",
        "builtin:subspace-paper",
        "--samples",
        "300",
        "--seed",
        "4",
        "--out",
        p(&data),
    ]);
    assert!(o.status.success());
    let meta = fs::read_to_string(dir.path().join("sub.csv.meta")).unwrap();
    assert!(meta.contains("generator=subspace-paper") && meta.contains("seed=4"));

    let model = dir.path().join("m.model");
    let o = nss(&[
        "fit",
        "--data",
        p(&data),
        "--cv-dims",
        "1,2,3",
        "--folds",
        "5",
        "--model",
        p(&model),
    ]);
    assert!(stdout(&o).contains("training accuracy"));

    let preds = dir.path().join("p.csv");
    let o = nss(&[
        "predict",
        "--model",
        p(&model),
        "--data",
        p(&data),
        "--residuals",
        "--out",
        p(&preds),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("accuracy"));
    let text = fs::read_to_string(&preds).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("label,residual_1,residual_2,residual_3"));
    assert_eq!(lines.count(), 300);
}

#[test]
fn libsvm_input_and_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("g.svm");
    let o = nss(&[
        "gen",
        "--data",
        "builtin:gaussian-paper",
        "--format",
        "libsvm",
        "--out",
        p(&data),
    ]);
    assert!(o.status.success());
    let model = dir.path().join("lda.model");
    let o = nss(&[
        "fit",
        "--data",
        p(&data),
        "--classifier",
        "lda",
        "--scale",
        "sym",
        "--pca-var",
        "0.99",
        "--model",
        p(&model),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = nss(&["predict", "--model", p(&model), "--data", p(&data)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1201);
}

#[test]
fn bench_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = nss(&[
            "bench",
            "--data",
            "builtin:gaussian-paper",
            "--classifier",
            "nss",
            "--classifier",
            "lda",
            "--repeats",
            "4",
            "--seed",
            "9",
            "--out",
            p(&out),
        ]);
        assert!(o.status.success());
        (stdout(&o), fs::read(out).unwrap())
    };
    let (a, csv_a) = run("a.csv");
    let (b, csv_b) = run("b.csv");
    assert_eq!(a, b);
    assert_eq!(csv_a, csv_b);
    assert!(a.contains("nss") && a.contains("lda") && !a.contains("centroid"));
    assert!(a.contains(" ± "));
}

#[test]
fn consistency_smoke_run_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let args = [
        "consistency",
        "--train-sizes",
        "30,60,100,200,400",
        "--trials",
        "1",
        "--n-test",
        "500",
        "--mc-samples",
        "200",
        "--seed",
        "2",
        "--out",
        p(&out),
    ];
    let o = nss(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read(&out).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.starts_with("n,trial,R_n,R_star,gap,lemma1_bound"));
    assert!(text.lines().count() > 5);
    nss(&args);
    assert_eq!(fs::read(&out).unwrap(), first);
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(
        nss(&[
            "bench",
            "--data",
            "builtin:gaussian-paper",
            "--train-frac",
            "1.5"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(nss(&["fit"]).status.code(), Some(1));
    assert_eq!(
        nss(&["bench", "--data", "builtin:unknown"]).status.code(),
        Some(1)
    );

    // parse
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2,1\n3,x,2\n").unwrap();
    let model = dir.path().join("m.model");
    let o = nss(&["fit", "--data", p(&bad), "--model", p(&model)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, column 2"));

    // numeric: features of the wrong dimension
    let data = dir.path().join("s.csv");
    nss(&[
        "gen",
        "--data",
        "builtin:gaussian-paper",
        "--samples",
        "90",
        "--out",
        p(&data),
    ]);
    nss(&[
        "fit",
        "--data",
        p(&data),
        "--dim",
        "1",
        "--model",
        p(&model),
    ]);
    let wrong = dir.path().join("w.csv");
    fs::write(&wrong, "1,2,3,4,5\n").unwrap();
    assert_eq!(
        nss(&["predict", "--model", p(&model), "--data", p(&wrong)])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn help_exits_cleanly() {
    let o = nss(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for cmd in ["fit", "predict", "bench", "consistency", "gen"] {
        assert!(stdout(&o).contains(cmd));
    }
}
