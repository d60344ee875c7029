//! Synthetic test images.

use alloc::vec::Vec;

use crate::vector::ImageMatrix;

/// A `size x size` checkerboard over a diagonal gradient, values in `[0.1, 0.9]`.
///
/// Eight checker squares per side (or one-pixel squares for `size < 8`).
pub fn checker_gradient(size: usize) -> ImageMatrix {
    assert!(size >= 1, "empty pattern");
    let block = (size / 8).max(1);
    let span = if size > 1 {
        (2 * (size - 1)) as f64
    } else {
        1.0
    };
    let data: Vec<f64> = (0..size)
        .flat_map(|r| {
            (0..size).map(move |c| {
                let ramp = 0.5 * (r + c) as f64 / span;
                let checker = if (r / block + c / block).is_multiple_of(2) {
                    0.3
                } else {
                    0.0
                };
                0.1 + ramp + checker
            })
        })
        .collect();
    ImageMatrix::new(size, size, data).expect("square pattern")
}
