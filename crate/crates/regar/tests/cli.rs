use std::path::Path;
use std::process::{Command, Output};

use regar::audio::{read_wav, write_wav, AudioBuffer, WavFormat};
use regar::cli::{parse_accel, parse_lambda_s, MaskFile};
use regar::synth::synthetic_ar_signal;
use regar_core::SignalWeight;

fn regar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regar")).args(args).env_remove("REGAR_THREADS").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = regar(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = regar(args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn clean_file(dir: &Path, channels: usize) -> std::path::PathBuf {
    let path = dir.join("clean.wav");
    let chans = (0..channels).map(|c| synthetic_ar_signal(20 + c as u64, 8, 3000, 0.9).unwrap().0).collect();
    write_wav(&path, &AudioBuffer::new(chans, 16_000).unwrap(), WavFormat::F32).unwrap();
    path
}

const SMALL: [&str; 8] = ["--order", "8", "--frame", "512", "--outer", "2", "--inner", "100"];

#[test]
fn quantizing_to_five_bits_reports_the_step() {
    let dir = tempfile::tempdir().unwrap();
    let clean = clean_file(dir.path(), 1);
    let q = dir.path().join("q.wav");
    let stdout = ok(&["degrade", "--input", s(&clean), "--output", s(&q), "--mode", "quantize", "--bits", "5"]);
    assert!(stdout.contains("quantization step 0.0625"), "{stdout}");
    let (y, _) = read_wav(&q).unwrap();
    assert!(y.channels[0].iter().all(|v| ((v / 0.0625) - 0.5).fract() == 0.0));
}

#[test]
fn evaluating_the_reference_against_itself_gives_inf() {
    let dir = tempfile::tempdir().unwrap();
    let clean = clean_file(dir.path(), 1);
    let report = dir.path().join("r.json");
    let stdout = ok(&["evaluate", "--reference", s(&clean), "--input", s(&clean), "--report", s(&report)]);
    assert!(stdout.contains("sdr_db inf"), "{stdout}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["aggregate"]["sdr_db"], "inf");
    assert!(v["frames"].as_array().unwrap().iter().all(|f| f["sdr_db"] == "inf"));
}

#[test]
fn consistent_declipping_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let clean = clean_file(dir.path(), 1);
    let clipped = dir.path().join("clipped.wav");
    let restored = dir.path().join("restored.wav");
    let csv = dir.path().join("r.csv");
    let out = ok(&["degrade", "--input", s(&clean), "--output", s(&clipped), "--mode", "clip", "--theta", "0.3"]);
    assert!(out.contains("clipped samples"));
    let mut args = vec![
        "reconstruct", "--input", s(&clipped), "--output", s(&restored), "--strategy", "declip",
        "--lambda-s", "inf", "--reference", s(&clean), "--report", s(&csv),
    ];
    args.extend(SMALL);
    ok(&args);

    let mut rows = csv::Reader::from_path(&csv).unwrap();
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 24);
    for r in &records {
        assert_eq!(&r[3], "0", "frame {} is not feasible", &r[0]);
        assert_eq!(&r[4], "2");
        assert!(r[1].parse::<f64>().is_ok() && r[2].parse::<f64>().is_ok());
    }

    let evaluated = ok(&[
        "evaluate", "--reference", s(&clean), "--input", s(&restored), "--degraded", s(&clipped),
        "--theta", "0.3", "--frame", "512",
    ]);
    assert!(evaluated.contains("consistency_sq 0"), "{evaluated}");
}

#[test]
fn drop_mask_sidecar_drives_inpainting() {
    let dir = tempfile::tempdir().unwrap();
    let clean = clean_file(dir.path(), 1);
    let dropped = dir.path().join("dropped.wav");
    let restored = dir.path().join("restored.wav");
    ok(&["degrade", "--input", s(&clean), "--output", s(&dropped), "--mode", "drop", "--ratio", "0.05", "--seed", "3"]);
    let mask_path = dir.path().join("dropped.wav.mask.json");
    let mask: MaskFile = serde_json::from_str(&std::fs::read_to_string(&mask_path).unwrap()).unwrap();
    assert_eq!(mask.len, 3000);
    assert_eq!(mask.missing[0].len(), 150);

    let mut args = vec![
        "reconstruct", "--input", s(&dropped), "--output", s(&restored), "--strategy", "inpaint",
        "--mask", s(&mask_path),
    ];
    args.extend(SMALL);
    ok(&args);
    let (x, _) = read_wav(&clean).unwrap();
    let (r, _) = read_wav(&restored).unwrap();
    for k in 0..3000 {
        if mask.missing[0].binary_search(&k).is_err() {
            assert!((x.channels[0][k] - r.channels[0][k]).abs() <= 1e-6);
        }
    }
}

#[test]
fn stereo_frames_are_numbered_globally() {
    let dir = tempfile::tempdir().unwrap();
    let clean = clean_file(dir.path(), 2);
    let out = dir.path().join("out.wav");
    let csv = dir.path().join("r.csv");
    ok(&["reconstruct", "--input", s(&clean), "--output", s(&out), "--outer", "0", "--frame", "512", "--report", s(&csv)]);
    let mut rows = csv::Reader::from_path(&csv).unwrap();
    let index: Vec<usize> = rows.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(index, (0..48).collect::<Vec<_>>());

    // no iterations: the frames pass through overlap-add untouched
    let (a, _) = read_wav(&clean).unwrap();
    let (b, _) = read_wav(&out).unwrap();
    assert_eq!(a, b);
}

#[test]
fn conflicting_or_incomplete_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let clean = clean_file(dir.path(), 1);
    let o = dir.path().join("o.wav");
    let (c, o) = (s(&clean), s(&o));
    fails(&["degrade", "--input", c, "--output", o, "--mode", "quantize", "--theta", "0.3"]);
    fails(&["degrade", "--input", c, "--output", o, "--mode", "clip"]);
    fails(&["reconstruct", "--input", c, "--output", o, "--inner", "5", "--inner-schedule", "2,3"]);
    fails(&["reconstruct", "--input", c, "--output", o, "--accel", "linesearch,extrapolate"]);
    fails(&["reconstruct", "--input", c, "--output", o, "--strategy", "dequant"]);
    fails(&["reconstruct", "--input", c, "--output", o, "--theta", "0.3", "--bits", "4"]);
    fails(&["reconstruct", "--input", c, "--output", o, "--lambda-s", "lots"]);
    let err = fails(&["reconstruct", "--input", "/nonexistent/x.wav", "--output", o]);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn thread_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let clean = clean_file(dir.path(), 1);
    let o = dir.path().join("o.wav");
    let run = |threads: &str, extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_regar"))
            .args(["reconstruct", "--input", s(&clean), "--output", s(&o), "--outer", "0", "--frame", "512"])
            .args(extra)
            .env("REGAR_THREADS", threads)
            .output()
            .unwrap()
            .status
            .success()
    };
    assert!(run("2", &[]));
    assert!(!run("many", &[]));
    assert!(run("many", &["--workers", "2"]));
}

#[test]
fn flag_parsers() {
    assert_eq!(parse_lambda_s("inf").unwrap(), SignalWeight::Indicator);
    assert_eq!(parse_lambda_s("Infinity").unwrap(), SignalWeight::Indicator);
    assert_eq!(parse_lambda_s("2.5").unwrap(), SignalWeight::Finite(2.5));
    assert!(parse_lambda_s("-1").is_err());

    let tokens = |t: &str| t.split(',').map(String::from).collect::<Vec<_>>();
    let acc = parse_accel(&tokens("fft,extrapolate-coefs,extrapolate")).unwrap();
    assert!(acc.fft && acc.extrapolate_coefs && acc.extrapolate_signal && !acc.line_search);
    assert!(parse_accel(&tokens("linesearch")).unwrap().line_search);
    assert!(parse_accel(&tokens("warp")).is_err());
}
