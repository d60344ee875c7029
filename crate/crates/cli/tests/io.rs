use std::fs;

use steffensen_cli::io::{decode_pgm, encode_pgm, quantize};
use steffensen_cli::{load_image, save_image, CliError};
use steffensen_core::ImageMatrix;

fn quantized(rows: usize, cols: usize) -> ImageMatrix {
    ImageMatrix::new(
        rows,
        cols,
        (0..rows * cols)
            .map(|i| ((i * 37) % 256) as f64 / 255.0)
            .collect(),
    )
    .unwrap()
}

#[test]
fn pgm_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.pgm");
    let img = quantized(5, 7);
    save_image(&img, &path).unwrap();
    assert_eq!(load_image(&path).unwrap(), img);
    let bytes = fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P5\n7 5\n255\n"));
    assert_eq!(bytes.len(), 11 + 35);
}

#[test]
fn png_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.png");
    let img = quantized(9, 4);
    save_image(&img, &path).unwrap();
    assert_eq!(load_image(&path).unwrap(), img);
}

#[test]
fn large_png_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.png");
    save_image(&ImageMatrix::filled(512, 512, 0.25), &path).unwrap();
    let img = load_image(&path).unwrap();
    assert_eq!(img.shape(), (512, 512));
    assert_eq!(img.get(100, 200), 64.0 / 255.0);
}

#[test]
fn save_clamps_and_rounds() {
    let img = ImageMatrix::new(1, 3, vec![0.5, 1.2, -0.1]).unwrap();
    let bytes = encode_pgm(&img);
    assert_eq!(&bytes[bytes.len() - 3..], &[128, 255, 0]);
    assert_eq!(
        decode_pgm(&bytes).unwrap().as_slice(),
        &[128.0 / 255.0, 1.0, 0.0]
    );
    assert_eq!(quantize(0.5 / 255.0), 1);
}

#[test]
fn load_errors_are_io() {
    let dir = tempfile::tempdir().unwrap();
    let missing = load_image(dir.path().join("missing.pgm")).unwrap_err();
    assert_eq!(missing.exit_code(), 2);

    let junk = dir.path().join("junk.pgm");
    fs::write(&junk, b"hello").unwrap();
    let err = load_image(&junk).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    assert!(err.to_string().contains("junk.pgm"));

    let truncated = dir.path().join("short.pgm");
    fs::write(&truncated, b"P5\n4 4\n255\n\x01\x02").unwrap();
    assert_eq!(load_image(&truncated).unwrap_err().exit_code(), 2);
}

#[test]
fn color_png_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rgb.png");
    image::RgbImage::new(2, 2).save(&path).unwrap();
    assert!(matches!(load_image(&path), Err(CliError::Io { .. })));
}

#[test]
fn save_errors() {
    let dir = tempfile::tempdir().unwrap();
    let img = ImageMatrix::filled(2, 2, 0.5);
    assert_eq!(
        save_image(&img, dir.path().join("x.bmp"))
            .unwrap_err()
            .exit_code(),
        1
    );
    assert_eq!(
        save_image(&img, dir.path().join("no/such/dir/x.pgm"))
            .unwrap_err()
            .exit_code(),
        2
    );
}

#[test]
fn shipped_pattern_asset_matches_generator() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/assets/pattern64.pgm");
    let loaded = steffensen_cli::load_image(path).unwrap();
    let expected = steffensen_core::pattern::checker_gradient(64);
    assert_eq!(loaded.shape(), (64, 64));
    for (&got, &want) in loaded.as_slice().iter().zip(expected.as_slice()) {
        let q = steffensen_cli::io::quantize(want);
        assert_eq!(got, q as f64 / 255.0);
    }
}
