//! Procedural test images.

use std::f64::consts::TAU;

use ndarray::Array2;
use zenn::data::ImageDataset;

/// A smooth color field with oriented gratings and rings at several
/// frequencies, all below the Nyquist limit of the pixel grid. Low-frequency
/// content alone reconstructs it poorly.
pub fn pattern(width: usize, height: usize) -> zenn::Result<ImageDataset> {
    let colors = Array2::from_shape_fn((width * height, 3), |(p, c)| {
        let u = (p % width) as f64 / (width.max(2) - 1) as f64;
        let v = (p / width) as f64 / (height.max(2) - 1) as f64;
        let r = ((u - 0.42).powi(2) + (v - 0.57).powi(2)).sqrt();
        let value = match c {
            0 => 0.5 + 0.18 * (TAU * (1.5 * u + 0.5 * v)).sin() + 0.16 * (TAU * (9.0 * u + 4.0 * v)).sin() + 0.1 * (TAU * 11.0 * r).cos(),
            1 => 0.5 + 0.2 * (TAU * (0.5 * u - 1.2 * v)).cos() + 0.15 * (TAU * (3.0 * u - 12.0 * v)).sin() * (TAU * 2.0 * u).cos(),
            _ => 0.45 + 0.2 * (TAU * 1.2 * r).cos() + 0.14 * (TAU * (7.0 * u + 7.0 * v)).cos() + 0.1 * (TAU * 13.0 * u).sin(),
        };
        value.clamp(0.0, 1.0)
    });
    ImageDataset::from_colors(width, height, colors)
}
