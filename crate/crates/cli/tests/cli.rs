use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use combipyr::raster::Image;
use combipyr::roadsign::fixtures::{arrow_sign, flag_sign, BLUE, RED, WHITE};
use combipyr::{Pyramid, PyramidRecord};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combipyr")).args(args).output().expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_image(dir: &TempDir, name: &str, img: &Image) -> PathBuf {
    let p = path(dir, name);
    fs::write(&p, img.to_pnm()).unwrap();
    p
}

fn build(dir: &TempDir, img: &Path) -> PathBuf {
    let out = path(dir, "sign.pyr");
    let o = run(&["build", "--input", s(img), "--threshold", "24", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn load(p: &Path) -> Pyramid {
    let record: PyramidRecord = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
    Pyramid::from_record(&record).unwrap()
}

/// Region id of the first pixel with this colour.
fn region_with(pyr: &Pyramid, img: &Image, color: [u8; 3]) -> String {
    let i = img.pixels.iter().position(|&c| c == color).unwrap();
    pyr.top().pixel_labels()[i].id().to_string()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn build_query_validate() {
    let dir = TempDir::new().unwrap();
    let img = arrow_sign(32);
    let input = write_image(&dir, "sign.ppm", &img);
    let pyr_path = build(&dir, &input);
    let o = run(&["build", "--input", s(&input), "--threshold", "24", "--out", s(&pyr_path)]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("regions: 3"));

    let pyr = load(&pyr_path);
    let (border, arrow) = (region_with(&pyr, &img, RED), region_with(&pyr, &img, BLUE));
    let p = s(&pyr_path);
    let v = json(&run(&["query", "--pyr", p, "--level", "top", "--contains", &border, &arrow]));
    assert_eq!(v["contains"], Value::Bool(true));
    let v = json(&run(&["query", "--pyr", p, "--contains", &arrow, &border]));
    assert_eq!(v["contains"], Value::Bool(false));
    let v = json(&run(&["query", "--pyr", p, "--inside", &arrow, &border]));
    assert_eq!(v["inside"], Value::Bool(true));
    let v = json(&run(&["query", "--pyr", p, "--inside-all", &border]));
    assert_eq!(v["inside_all"].as_array().unwrap().len(), 2);

    let background = region_with(&pyr, &img, WHITE);
    let v = json(&run(&["query", "--pyr", p, "--meets", &background, &arrow]));
    assert_eq!(v["meets_exists"], Value::Bool(true));
    let freeman = v["meets_each"][0]["freeman"].as_str().unwrap();
    assert!(combipyr::CrackChain::parse_freeman(freeman).is_some());

    let v = json(&run(&["query", "--pyr", p, "--report", "--region", &arrow]));
    assert!(!v["pairs"].as_array().unwrap().is_empty());

    let o = run(&["validate", "--pyr", p]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ok:"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write_image(&dir, "sign.ppm", &arrow_sign(24));
    let a = fs::read(build(&dir, &input)).unwrap();
    let b = fs::read(build(&dir, &input)).unwrap();
    assert_eq!(a, b);
    let p = path(&dir, "sign.pyr");
    let r1 = run(&["query", "--pyr", s(&p), "--report"]);
    let r2 = run(&["query", "--pyr", s(&p), "--report"]);
    assert_eq!(r1.stdout, r2.stdout);
}

#[test]
fn tampered_pyramid_fails_validation() {
    let dir = TempDir::new().unwrap();
    let input = write_image(&dir, "sign.ppm", &arrow_sign(16));
    let p = build(&dir, &input);
    let mut record: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    let top = record["states"].as_array().unwrap().len() + 1;
    let levels = record["level"].as_array_mut().unwrap();
    let i = levels.iter().position(|l| l.as_u64() == Some(top as u64)).unwrap();
    let orientation = record["orientation"].as_array_mut().unwrap();
    orientation[i] = Value::from(orientation[i].as_i64().unwrap() + 1);
    fs::write(&p, record.to_string()).unwrap();
    let o = run(&["validate", "--pyr", s(&p)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stale"));

    fs::write(&p, "{\"format\": \"other\"}").unwrap();
    let o = run(&["validate", "--pyr", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn roadsign_masks_the_arrow_and_rejects_the_flag() {
    let dir = TempDir::new().unwrap();
    let img = arrow_sign(32);
    let input = write_image(&dir, "sign.ppm", &img);
    let mask = path(&dir, "mask.pgm");
    let o = run(&["roadsign", "--input", s(&input), "--k", "5", "--out", s(&mask)]);
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 1);
    let mask = Image::parse(&fs::read(&mask).unwrap()).unwrap();
    for (m, c) in mask.pixels.iter().zip(&img.pixels) {
        assert_eq!(m[0] == 255, *c == BLUE);
    }

    let flag = write_image(&dir, "flag.ppm", &flag_sign(30));
    let o = run(&["roadsign", "--input", s(&flag), "--out", s(&path(&dir, "none.pgm"))]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no sign found"));
}

#[test]
fn exports() {
    let dir = TempDir::new().unwrap();
    let input = write_image(&dir, "sign.ppm", &arrow_sign(16));
    let p = build(&dir, &input);
    let o = run(&["export", "--pyr", s(&p), "--format", "rag-dot"]);
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.starts_with("graph rag {"));
    assert_eq!(dot.matches(" -- ").count(), 2);
    let o = run(&["export", "--pyr", s(&p), "--level", "0", "--format", "map-dot"]);
    assert!(o.status.success());
    let labels = path(&dir, "labels.ppm");
    let o = run(&["export", "--pyr", s(&p), "--format", "labels", "--out", s(&labels)]);
    assert!(o.status.success());
    let img = Image::parse(&fs::read(&labels).unwrap()).unwrap();
    let distinct: std::collections::BTreeSet<[u8; 3]> = img.pixels.into_iter().collect();
    assert_eq!(distinct.len(), 3);
}

#[test]
fn bad_inputs_report_errors() {
    let dir = TempDir::new().unwrap();
    let truncated = path(&dir, "bad.ppm");
    fs::write(&truncated, b"P6\n4 4\n255\n\x00\x00").unwrap();
    let o = run(&["build", "--input", s(&truncated), "--out", s(&path(&dir, "x.pyr"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte"));

    let input = write_image(&dir, "sign.ppm", &arrow_sign(16));
    let p = build(&dir, &input);
    let o = run(&["query", "--pyr", s(&p), "--contains", "0", "1"]);
    assert!(!o.status.success());
    let o = run(&["query", "--pyr", s(&p), "--level", "99", "--report"]);
    assert!(!o.status.success());
    let o = run(&["query", "--pyr", s(&p)]);
    assert_eq!(o.status.code(), Some(2));
}
