#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use image::{DynamicImage, Rgb, RgbImage};
use mangaseg::io::{encode_binary, encode_classes};
use mangaseg::synth::fontgen::FontBuilder;
use mangaseg::{BinaryMask, ClassMask, TextClass};

pub fn mangaseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mangaseg"))
        .args(args)
        .env("MANGASEG_LOG", "error")
        .output()
        .expect("binary runs")
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub fn save(img: DynamicImage, path: &Path) {
    img.save(path).unwrap();
}

pub fn save_mask(mask: &BinaryMask, path: &Path) {
    save(DynamicImage::ImageLuma8(encode_binary(mask)), path);
}

pub fn save_classes(mask: &ClassMask, path: &Path) {
    save(DynamicImage::ImageRgb8(encode_classes(mask)), path);
}

fn boxes(w: usize, h: usize, rects: &[(usize, usize, usize, usize)]) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| rects.iter().any(|&(rx, ry, rw, rh)| x >= rx && x < rx + rw && y >= ry && y < ry + rh))
}

/// Five 6×8 ground-truth blocks in a row; the first three are easy text,
/// the last two hard.
pub fn watershed_gt() -> ClassMask {
    let text = boxes(60, 20, &[(2, 2, 6, 8), (14, 2, 6, 8), (26, 2, 6, 8), (38, 2, 6, 8), (50, 2, 6, 8)]);
    let data = (0..60 * 20)
        .map(|i| {
            if !text.data()[i] {
                TextClass::NonText
            } else if i % 60 < 34 {
                TextClass::Easy
            } else {
                TextClass::Hard
            }
        })
        .collect();
    ClassMask::from_vec(60, 20, data).unwrap()
}

/// One bar straddling the first two blocks, partial hits on the other
/// three, and a stray blob under the row.
pub fn watershed_pred() -> BinaryMask {
    boxes(60, 20, &[(3, 4, 16, 4), (27, 3, 4, 6), (39, 5, 5, 3), (50, 3, 3, 7), (24, 14, 6, 4)])
}

/// Artwork with some texture.
pub fn artwork(w: u32, h: u32, salt: u32) -> RgbImage {
    RgbImage::from_fn(w, h, |x, y| {
        Rgb([
            ((x * 3 + salt * 17) % 200 + 40) as u8,
            ((y * 5 + salt * 7) % 180 + 50) as u8,
            (((x ^ y) + salt) % 160 + 80) as u8,
        ])
    })
}

/// Two small fixture fonts: kana and Latin in one, ideographs plus a
/// placeholder alias in the other.
pub fn write_fonts(dir: &Path) -> Vec<PathBuf> {
    std::fs::create_dir_all(dir).unwrap();
    let mut a = FontBuilder::new();
    for c in "あいうえおかきくけこさしすせそabcdefghijXYZ".chars() {
        a.add_char(c, if c.is_ascii() { 550 } else { 1000 });
    }
    let mut b = FontBuilder::new();
    for c in "漢字日本語文書".chars() {
        b.add_char(c, 1000);
    }
    b.add_tofu_alias('無');
    let pa = dir.join("kana.ttf");
    let pb = dir.join("kanji.ttf");
    std::fs::write(&pa, a.build()).unwrap();
    std::fs::write(&pb, b.build()).unwrap();
    vec![pa, pb]
}

/// File name → bytes for every file of a directory.
pub fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}
