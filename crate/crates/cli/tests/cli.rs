mod common;

use common::*;
use image::{DynamicImage, GrayImage, Luma};
use mangaseg::io::decode_binary;
use mangaseg::metrics::{MetricsReport, Summary};
use mangaseg::{BinaryMask, ClassMask, TextClass};
use serde_json::Value;
use tempfile::tempdir;

fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> T {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eval_reports_watershed_fixture() {
    let t = tempdir().unwrap();
    let (gt, pred, out) = (t.path().join("gt"), t.path().join("pred"), t.path().join("out"));
    std::fs::create_dir_all(&gt).unwrap();
    std::fs::create_dir_all(&pred).unwrap();
    save_classes(&watershed_gt(), &gt.join("page.png"));
    save_mask(&watershed_pred(), &pred.join("page.png"));
    let o = mangaseg(&["eval", "--gt", p(&gt), "--pred", p(&pred), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for mode in ["normal", "relaxed"] {
        let v: Value = read_json(&out.join(format!("page.{mode}.json")));
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["counts"]["tp"], 5);
        assert_eq!(v["counts"]["fp"], 1);
        assert_eq!(v["component"]["p_quant"].as_f64().unwrap(), 5.0 / 6.0);
    }
    let s: Summary = read_json(&out.join("summary.json"));
    assert_eq!(s.n_reports, 2);
}

#[test]
fn eval_skips_unpaired_unless_strict() {
    let t = tempdir().unwrap();
    let (gt, pred, out) = (t.path().join("gt"), t.path().join("pred"), t.path().join("out"));
    std::fs::create_dir_all(&gt).unwrap();
    std::fs::create_dir_all(&pred).unwrap();
    let m = BinaryMask::from_ascii("##..\n##..\n....").unwrap();
    save_mask(&m, &gt.join("a.png"));
    save_mask(&m, &pred.join("a.png"));
    save_mask(&m, &gt.join("lonely.png"));
    let o = mangaseg(&["eval", "--gt", p(&gt), "--pred", p(&pred), "--out", p(&out), "--mode", "normal"]);
    assert!(o.status.success());
    assert!(out.join("a.normal.json").exists() && !out.join("lonely.normal.json").exists());
    let o = mangaseg(&["eval", "--gt", p(&gt), "--pred", p(&pred), "--out", p(&out), "--strict"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lonely"));
}

#[test]
fn eval_lists_size_mismatch_and_continues() {
    let t = tempdir().unwrap();
    let (gt, pred, out) = (t.path().join("gt"), t.path().join("pred"), t.path().join("out"));
    std::fs::create_dir_all(&gt).unwrap();
    std::fs::create_dir_all(&pred).unwrap();
    let m = BinaryMask::from_ascii("##..\n##..").unwrap();
    save_mask(&m, &gt.join("good.png"));
    save_mask(&m, &pred.join("good.png"));
    save_mask(&m, &gt.join("bad.png"));
    save_mask(&BinaryMask::new(3, 3), &pred.join("bad.png"));
    let o = mangaseg(&["eval", "--gt", p(&gt), "--pred", p(&pred), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad") && err.contains("dimension mismatch"), "{err}");
    assert!(out.join("good.relaxed.json").exists() && out.join("summary.json").exists());
}

#[test]
fn eval_folds_of_identical_pages() {
    let t = tempdir().unwrap();
    let (gt, pred, out) = (t.path().join("gt"), t.path().join("pred"), t.path().join("out"));
    std::fs::create_dir_all(&gt).unwrap();
    std::fs::create_dir_all(&pred).unwrap();
    let mut folds = serde_json::Map::new();
    for k in 0..5 {
        save_classes(&watershed_gt(), &gt.join(format!("p{k}.png")));
        save_mask(&watershed_pred(), &pred.join(format!("p{k}.png")));
        folds.insert(format!("fold{k}"), serde_json::json!([format!("p{k}")]));
    }
    let manifest = t.path().join("folds.json");
    std::fs::write(&manifest, Value::Object(folds).to_string()).unwrap();
    let o = mangaseg(&["eval", "--gt", p(&gt), "--pred", p(&pred), "--out", p(&out), "--folds", p(&manifest)]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("normal.p_quant\t83.33 ± 0.0"), "{stdout}");
    let s: Summary = read_json(&out.join("summary.json"));
    assert_eq!(s.groups.len(), 5);
    assert!(s.overall.values().all(|v| v.std == 0.0));
}

#[test]
fn fuzzy_palette_accepts_near_colors() {
    let t = tempdir().unwrap();
    let (gt, pred, out) = (t.path().join("gt"), t.path().join("pred"), t.path().join("out"));
    std::fs::create_dir_all(&gt).unwrap();
    std::fs::create_dir_all(&pred).unwrap();
    let mut img = mangaseg::io::encode_classes(&ClassMask::from_ascii("ee..\nee..").unwrap());
    img.put_pixel(3, 1, image::Rgb([250, 252, 6]));
    img.save(gt.join("a.png")).unwrap();
    save_mask(&BinaryMask::from_ascii("##..\n##..").unwrap(), &pred.join("a.png"));
    let o = mangaseg(&["eval", "--gt", p(&gt), "--pred", p(&pred), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown palette color"));
    let o = mangaseg(&["eval", "--gt", p(&gt), "--pred", p(&pred), "--out", p(&out), "--fuzzy-palette", "10"]);
    assert!(o.status.success());
}

fn speckled_mask() -> BinaryMask {
    BinaryMask::from_fn(80, 60, |x, y| {
        let block = (10..30).contains(&x) && (10..30).contains(&y);
        let near_dot = (33..35).contains(&x) && (20..22).contains(&y);
        let lone = (70..72).contains(&x) && (50..52).contains(&y);
        block || near_dot || lone
    })
}

#[test]
fn denoise_is_idempotent() {
    let t = tempdir().unwrap();
    let (inp, out1, out2) = (t.path().join("in"), t.path().join("o1"), t.path().join("o2"));
    std::fs::create_dir_all(&inp).unwrap();
    save_mask(&speckled_mask(), &inp.join("m.png"));
    assert!(mangaseg(&["denoise", p(&inp), "--out", p(&out1)]).status.success());
    assert!(mangaseg(&["denoise", p(&out1.join("m.png")), "--out", p(&out2)]).status.success());
    let first = std::fs::read(out1.join("m.png")).unwrap();
    assert_eq!(first, std::fs::read(out2.join("m.png")).unwrap());
    let cleaned = decode_binary(&image::open(out1.join("m.png")).unwrap()).unwrap();
    assert!(cleaned.get(33, 20) && !cleaned.get(70, 50));
    assert_eq!(cleaned.count(), 400 + 4);
}

#[test]
fn expand_union_contains_input() {
    let t = tempdir().unwrap();
    let (masks, pages, out) = (t.path().join("m"), t.path().join("pages"), t.path().join("out"));
    std::fs::create_dir_all(&masks).unwrap();
    std::fs::create_dir_all(&pages).unwrap();
    // light page with a dark stroke; the mask catches part of it plus a spot
    // away from any ink
    let page = GrayImage::from_fn(60, 40, |x, y| Luma([if (10..40).contains(&x) && (18..22).contains(&y) { 20 } else { 230 }]));
    DynamicImage::ImageLuma8(page).save(pages.join("a.png")).unwrap();
    let mask = BinaryMask::from_fn(60, 40, |x, y| ((10..22).contains(&x) && (18..22).contains(&y)) || (x == 50 && y == 5));
    save_mask(&mask, &masks.join("a.png"));
    assert!(mangaseg(&["expand", p(&masks), "--images", p(&pages), "--out", p(&out), "--union"]).status.success());
    let grown = decode_binary(&image::open(out.join("a.png")).unwrap()).unwrap();
    assert!(mask.is_subset_of(&grown));
    assert!(grown.get(39, 20), "whole stroke painted");
    assert!(mangaseg(&["expand", p(&masks), "--images", p(&pages), "--out", p(&out)]).status.success());
    let plain = decode_binary(&image::open(out.join("a.png")).unwrap()).unwrap();
    assert!(!plain.get(50, 5) && plain.get(39, 20));
}

#[test]
fn synth_outputs_validate() {
    let t = tempdir().unwrap();
    let (imgs, fonts, out) = (t.path().join("imgs"), t.path().join("fonts"), t.path().join("out"));
    std::fs::create_dir_all(&imgs).unwrap();
    write_fonts(&fonts);
    artwork(96, 80, 1).save(imgs.join("a.png")).unwrap();
    artwork(64, 96, 2).save(imgs.join("b.png")).unwrap();
    let o = mangaseg(&["synth", "--images", p(&imgs), "--fonts", p(&fonts), "--out", p(&out), "--count", "6", "--seed", "100"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let files = dir_contents(&out);
    assert_eq!(files.len(), 18);
    for k in 0..6u64 {
        let stem = if k % 2 == 0 { "a" } else { "b" };
        let name = format!("{stem}_{}", 100 + k);
        let src = image::open(imgs.join(format!("{stem}.png"))).unwrap().to_rgb8();
        let img = image::open(out.join(format!("{name}.png"))).unwrap().to_rgb8();
        let mask = decode_binary(&image::open(out.join(format!("{name}.mask.png"))).unwrap()).unwrap();
        let diff = BinaryMask::from_fn(src.width() as usize, src.height() as usize, |x, y| {
            src.get_pixel(x as u32, y as u32) != img.get_pixel(x as u32, y as u32)
        });
        assert_eq!(diff, mask, "{name}");
        let manifest: Value = read_json(&out.join(format!("{name}.manifest.json")));
        assert_eq!(manifest["seed"], 100 + k);
        assert_eq!(manifest["fonts"], serde_json::json!(["kana.ttf", "kanji.ttf"]));
        for style in manifest["styles"].as_array().unwrap() {
            assert!(!style["text"].as_str().unwrap().contains('無'));
        }
    }
}

#[test]
fn synth_zero_count_and_missing_fonts() {
    let t = tempdir().unwrap();
    let (imgs, fonts, out) = (t.path().join("imgs"), t.path().join("fonts"), t.path().join("out"));
    std::fs::create_dir_all(&imgs).unwrap();
    std::fs::create_dir_all(&fonts).unwrap();
    artwork(32, 32, 0).save(imgs.join("a.png")).unwrap();
    let o = mangaseg(&["synth", "--images", p(&imgs), "--fonts", p(&fonts), "--out", p(&out), "--count", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no usable font"));
    write_fonts(&fonts);
    let o = mangaseg(&["synth", "--images", p(&imgs), "--fonts", p(&fonts), "--out", p(&out), "--count", "0"]);
    assert!(o.status.success());
    assert!(dir_contents(&out).is_empty());
}

#[test]
fn histogram_counts_every_component() {
    let t = tempdir().unwrap();
    let (gt, pred, out) = (t.path().join("gt"), t.path().join("pred"), t.path().join("out"));
    std::fs::create_dir_all(&gt).unwrap();
    std::fs::create_dir_all(&pred).unwrap();
    save_classes(&watershed_gt(), &gt.join("x.png"));
    save_mask(&watershed_pred(), &pred.join("x.png"));
    assert!(mangaseg(&["eval", "--gt", p(&gt), "--pred", p(&pred), "--out", p(&out)]).status.success());
    let csv = t.path().join("h.csv");
    let svg = t.path().join("h.svg");
    let o = mangaseg(&["histogram", p(&out), "--out", p(&csv), "--svg", p(&svg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("class,mode,bin_lo,bin_hi,count"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 10);
    let total: usize = rows.iter().map(|r| r[4].parse::<usize>().unwrap()).sum();
    let reports: Vec<MetricsReport> = ["normal", "relaxed"]
        .iter()
        .map(|m| read_json(&out.join(format!("x.{m}.json"))))
        .collect();
    let recount: usize = reports.iter().map(|r| r.per_component_f1.len()).sum();
    assert_eq!(total, recount);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let empty = t.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    assert_eq!(mangaseg(&["histogram", p(&empty), "--out", p(&csv)]).status.code(), Some(2));
}

#[test]
fn histogram_of_perfect_report() {
    let t = tempdir().unwrap();
    let (gt, out) = (t.path().join("gt"), t.path().join("out"));
    std::fs::create_dir_all(&gt).unwrap();
    save_classes(&watershed_gt(), &gt.join("x.png"));
    assert!(mangaseg(&["eval", "--gt", p(&gt), "--pred", p(&gt), "--out", p(&out)]).status.success());
    let csv = t.path().join("h.csv");
    assert!(mangaseg(&["histogram", p(&out), "--out", p(&csv)]).status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let nonzero: Vec<&str> = text.lines().skip(1).filter(|l| !l.ends_with(",0")).collect();
    assert_eq!(nonzero.len(), 4, "{nonzero:?}");
    assert!(nonzero.iter().all(|l| l.contains(",0.9,1,")));
}

#[test]
fn loss_of_perfect_prediction() {
    let t = tempdir().unwrap();
    let m = BinaryMask::from_ascii("##..\n.##.").unwrap();
    save_mask(&m, &t.path().join("gt.png"));
    save_mask(&m, &t.path().join("p.png"));
    let o = mangaseg(&["loss", "--pred", p(&t.path().join("p.png")), "--gt", p(&t.path().join("gt.png"))]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["mix"].as_f64().unwrap().abs() < 1e-5);
    assert!((v["dice"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn wrap_command() {
    let t = tempdir().unwrap();
    let fonts = write_fonts(&t.path().join("f"));
    // 'a' is 550 units, so 11 px at size 20: four fit in 48 px
    for algo in ["exact", "fast"] {
        let o = mangaseg(&[
            "wrap", "--font", p(&fonts[0]), "--size", "20", "--max-width", "48", "--max-height", "40",
            "--algorithm", algo, "abcdefghij",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["lines"], serde_json::json!(["abcd", "efgh"]));
    }
}

#[test]
fn gt_classes_round_trip_through_eval() {
    let m = watershed_gt();
    assert_eq!(m.data().iter().filter(|&&c| c == TextClass::Hard).count(), 96);
}
