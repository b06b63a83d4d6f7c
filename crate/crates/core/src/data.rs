//! Datasets for the regression experiments: the synthetic multi-frequency
//! curve, the Jena temperature series and binary PPM images.

use std::fs;
use std::io::Read;
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, ZennError};
use crate::rng;
use crate::training::{Dataset, Split};

/// The synthetic target `y = x + 0.125 sin 10x + 0.135 cos 5x + 0.115 sin 50x`.
pub fn synth1d_target(x: f64) -> f64 {
    x + 0.125 * (10.0 * x).sin() + 0.135 * (5.0 * x).cos() + 0.115 * (50.0 * x).sin()
}

/// `n` points drawn uniformly from `range` (sorted ascending) with targets
/// from [`synth1d_target`] plus optional Gaussian noise.
pub fn synth1d(n: usize, range: (f64, f64), seed: u64, noise_std: f64) -> Result<Dataset> {
    let (lo, hi) = range;
    if n == 0 {
        return Err(ZennError::Empty("synth1d sample"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ZennError::InvalidParameter(format!("empty input range [{lo}, {hi}]")));
    }
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(ZennError::InvalidParameter(format!("noise std must be nonnegative, got {noise_std}")));
    }
    let mut xr = rng::stream(rng::sub_seed(seed, "synth1d"), 0);
    let mut xs: Vec<f64> = (0..n).map(|_| xr.random_range(lo..hi)).collect();
    xs.sort_by(f64::total_cmp);
    let mut ys: Vec<f64> = xs.iter().map(|&x| synth1d_target(x)).collect();
    if noise_std > 0.0 {
        let mut nr = rng::stream(rng::sub_seed(seed, "synth1d"), 1);
        let noise = Normal::new(0.0, noise_std).expect("validated std");
        for y in &mut ys {
            *y += noise.sample(&mut nr);
        }
    }
    Dataset::from_scalars(&xs, &ys)
}

/// Temperature column of the Jena climate CSV.
pub const JENA_COLUMN: &str = "T (degC)";
pub const JENA_ROWS: usize = 3000;

/// Reads the first `max_rows` values of `column` from a headed CSV file.
/// Inputs are the row index rescaled to `[0, 1]`.
///
/// A file with fewer rows than requested is accepted with a warning.
pub fn load_jena_csv(path: impl AsRef<Path>, column: &str, max_rows: usize) -> Result<Dataset> {
    let file = fs::File::open(path.as_ref())?;
    read_series_csv(file, column, max_rows)
}

/// [`load_jena_csv`] over any reader.
pub fn read_series_csv<R: Read>(reader: R, column: &str, max_rows: usize) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let idx = rdr
        .headers()?
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| ZennError::MissingColumn(column.to_string()))?;
    let mut values = Vec::with_capacity(max_rows.min(1 << 20));
    for (i, rec) in rdr.records().take(max_rows).enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| ZennError::MalformedRow { row, reason: e.to_string() })?;
        let field = rec
            .get(idx)
            .ok_or_else(|| ZennError::MalformedRow { row, reason: format!("no field {}", idx + 1) })?;
        let v: f64 = field
            .trim()
            .parse()
            .map_err(|_| ZennError::MalformedRow { row, reason: format!("not a number: {field:?}") })?;
        if !v.is_finite() {
            return Err(ZennError::MalformedRow { row, reason: format!("non-finite value {v}") });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(ZennError::Empty("series"));
    }
    if values.len() < max_rows {
        log::warn!("requested {max_rows} rows of {column:?}, only {} available", values.len());
    }
    let n = values.len();
    let xs: Vec<f64> = (0..n).map(|i| normalized_index(i, n)).collect();
    Dataset::from_scalars(&xs, &values)
}

/// `i / (n - 1)`, or 0 when `n == 1`.
pub fn normalized_index(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

/// An RGB image as a regression dataset: one sample per pixel in row-major
/// order, input `(col/(w−1), row/(h−1))`, target RGB in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageDataset {
    width: usize,
    height: usize,
    coords: Array2<f64>,
    colors: Array2<f64>,
    split: Vec<Split>,
}

impl ImageDataset {
    /// Builds an image from row-major colors (`width·height × 3`).
    pub fn from_colors(width: usize, height: usize, colors: Array2<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ZennError::Empty("image"));
        }
        let n = width * height;
        if colors.dim() != (n, 3) {
            return Err(ZennError::DimensionMismatch { expected: n * 3, got: colors.len() });
        }
        let coords = Array2::from_shape_fn((n, 2), |(p, k)| {
            let (row, col) = (p / width, p % width);
            if k == 0 {
                normalized_index(col, width)
            } else {
                normalized_index(row, height)
            }
        });
        Ok(Self { width, height, coords, colors, split: vec![Split::Train; n] })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self) -> ArrayView2<'_, f64> {
        self.coords.view()
    }

    pub fn colors(&self) -> ArrayView2<'_, f64> {
        self.colors.view()
    }

    pub fn split(&self) -> &[Split] {
        &self.split
    }

    pub fn with_split(mut self, split: Vec<Split>) -> Result<Self> {
        if split.len() != self.len() {
            return Err(ZennError::DimensionMismatch { expected: self.len(), got: split.len() });
        }
        self.split = split;
        Ok(self)
    }

    /// Same geometry and split with different colors, e.g. model predictions.
    pub fn with_colors(&self, colors: Array2<f64>) -> Result<Self> {
        let mut out = Self::from_colors(self.width, self.height, colors)?;
        out.split = self.split.clone();
        Ok(out)
    }

    pub fn to_dataset(&self) -> Result<Dataset> {
        Dataset::new(self.coords.clone(), self.colors.clone())?.with_split(self.split.clone())
    }

    /// Binary P6 encoding with a canonical `P6\n<w> <h>\n255\n` header.
    /// Channels are rounded to the nearest integer and clamped to `[0, 255]`.
    pub fn to_ppm_bytes(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.colors.iter().map(|&c| {
            let v = (c * 255.0).round();
            if v.is_nan() {
                0
            } else {
                v.clamp(0.0, 255.0) as u8
            }
        }));
        out
    }

    pub fn from_ppm_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let magic = header_token(bytes, &mut pos)?;
        if magic != b"P6" {
            return Err(ZennError::Ppm(format!("bad magic number {:?}", String::from_utf8_lossy(magic))));
        }
        let width = header_number(bytes, &mut pos, "width")?;
        let height = header_number(bytes, &mut pos, "height")?;
        let maxval = header_number(bytes, &mut pos, "maxval")?;
        if maxval != 255 {
            return Err(ZennError::Ppm(format!("unsupported maxval {maxval}, expected 255")));
        }
        // Exactly one whitespace byte separates the header from the raster.
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(ZennError::Ppm("truncated header".into()));
        }
        pos += 1;
        let n = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| ZennError::Ppm("image dimensions overflow".into()))?;
        let raster = &bytes[pos..];
        if raster.len() < n {
            return Err(ZennError::Ppm(format!("truncated payload: {} of {n} bytes", raster.len())));
        }
        let colors = Array2::from_shape_fn((width * height, 3), |(p, c)| raster[3 * p + c] as f64 / 255.0);
        Self::from_colors(width, height, colors)
    }
}

fn header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(ZennError::Ppm("truncated header".into()));
    }
    Ok(&bytes[start..*pos])
}

fn header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = header_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&v: &usize| v > 0)
        .ok_or_else(|| ZennError::Ppm(format!("invalid {what} {:?}", String::from_utf8_lossy(tok))))
}

pub fn load_ppm(path: impl AsRef<Path>) -> Result<ImageDataset> {
    ImageDataset::from_ppm_bytes(&fs::read(path)?)
}

pub fn save_ppm(image: &ImageDataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, image.to_ppm_bytes())?;
    Ok(())
}

/// Split labels with exactly `⌊fraction · n⌋` training samples chosen
/// uniformly at random.
pub fn split_labels(n: usize, fraction: f64, seed: u64) -> Result<Vec<Split>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(ZennError::InvalidParameter(format!("train fraction must lie in (0, 1), got {fraction}")));
    }
    // The relative nudge keeps decimal fractions such as 0.29 · 100 from
    // flooring one short because of binary rounding.
    let k = (fraction * n as f64 * (1.0 + 1e-12)).floor() as usize;
    if k == 0 || k >= n {
        return Err(ZennError::InvalidParameter(format!(
            "{n} samples cannot be split {fraction} with both parts nonempty"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::rng(rng::sub_seed(seed, "split")));
    let mut labels = vec![Split::Validation; n];
    for &i in &order[..k] {
        labels[i] = Split::Train;
    }
    Ok(labels)
}

pub fn random_split(dataset: Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    let labels = split_labels(dataset.len(), fraction, seed)?;
    dataset.with_split(labels)
}

pub fn random_split_image(image: ImageDataset, fraction: f64, seed: u64) -> Result<ImageDataset> {
    let labels = split_labels(image.len(), fraction, seed)?;
    image.with_split(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn synth_target_examples() {
        assert!((synth1d_target(0.0) - 0.135).abs() < 1e-15);
        assert!((synth1d_target(FRAC_PI_2) - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn synth_dataset_is_deterministic_and_exact() {
        let a = synth1d(200, (0.0, 2.0), 4, 0.0).unwrap();
        assert_eq!(a, synth1d(200, (0.0, 2.0), 4, 0.0).unwrap());
        assert_ne!(a, synth1d(200, (0.0, 2.0), 5, 0.0).unwrap());
        for (x, y) in a.inputs().iter().zip(a.targets().iter()) {
            assert!((0.0..2.0).contains(x));
            assert!((y - synth1d_target(*x)).abs() < 1e-15);
        }
        let noisy = synth1d(200, (0.0, 2.0), 4, 0.1).unwrap();
        assert_eq!(noisy.inputs(), a.inputs());
        assert!(synth1d(0, (0.0, 1.0), 0, 0.0).is_err());
        assert!(synth1d(5, (1.0, 1.0), 0, 0.0).is_err());
    }

    #[test]
    fn series_csv_fixture() {
        let csv = "Date Time,T (degC),p (mbar)\na,1.0,9\nb,2.0,9\nc,3.0,9\n";
        let d = read_series_csv(csv.as_bytes(), JENA_COLUMN, 3).unwrap();
        assert_eq!(d.inputs().iter().copied().collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        assert_eq!(d.targets().iter().copied().collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
        let short = read_series_csv(csv.as_bytes(), JENA_COLUMN, 3000).unwrap();
        assert_eq!(short.len(), 3);
        assert!(matches!(read_series_csv(csv.as_bytes(), "rh (%)", 3), Err(ZennError::MissingColumn(_))));
        let bad = "T (degC)\n1.0\nwarm\n";
        assert!(matches!(read_series_csv(bad.as_bytes(), JENA_COLUMN, 3), Err(ZennError::MalformedRow { row: 2, .. })));
    }

    #[test]
    fn ppm_single_white_pixel() {
        let img = ImageDataset::from_ppm_bytes(b"P6\n1 1\n255\n\xff\xff\xff").unwrap();
        assert_eq!(img.coords().row(0).to_vec(), vec![0.0, 0.0]);
        assert_eq!(img.colors().row(0).to_vec(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn ppm_two_by_two_fixture() {
        let bytes = b"P6\n2 2\n255\n\x00\x00\x00\xff\x00\x00\x00\xff\x00\x00\x00\xff";
        let img = ImageDataset::from_ppm_bytes(bytes).unwrap();
        let coords: Vec<Vec<f64>> = img.coords().rows().into_iter().map(|r| r.to_vec()).collect();
        assert_eq!(coords, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        let colors: Vec<Vec<f64>> = img.colors().rows().into_iter().map(|r| r.to_vec()).collect();
        assert_eq!(
            colors,
            vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]
        );
        assert_eq!(img.to_ppm_bytes(), bytes.to_vec());
    }

    #[test]
    fn ppm_errors() {
        let err = |b: &[u8]| ImageDataset::from_ppm_bytes(b).unwrap_err();
        assert!(matches!(err(b"P3\n1 1\n255\n0 0 0"), ZennError::Ppm(m) if m.contains("magic")));
        assert!(matches!(err(b"P6\n2 2\n255\n\x00\x00"), ZennError::Ppm(m) if m.contains("truncated")));
        assert!(matches!(err(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00"), ZennError::Ppm(m) if m.contains("maxval")));
        assert!(matches!(err(b"P6\n1"), ZennError::Ppm(_)));
    }

    #[test]
    fn ppm_comments_and_clamping() {
        let img = ImageDataset::from_ppm_bytes(b"P6\n# made by hand\n1 1\n255\n\x10\x20\x30").unwrap();
        assert_eq!(img.to_ppm_bytes(), b"P6\n1 1\n255\n\x10\x20\x30".to_vec());
        let wild = img.with_colors(ndarray::array![[-0.3, 1.7, 0.5]]).unwrap();
        assert_eq!(&wild.to_ppm_bytes()[11..], &[0, 255, 128]);
    }

    #[test]
    fn split_examples() {
        let l = split_labels(4, 0.75, 1).unwrap();
        assert_eq!(l.iter().filter(|&&s| s == Split::Train).count(), 3);
        assert_eq!(l, split_labels(4, 0.75, 1).unwrap());
        let big = split_labels(10_000, 0.75, 9).unwrap();
        assert_eq!(big.iter().filter(|&&s| s == Split::Train).count(), 7500);
        assert!(split_labels(1, 0.5, 0).is_err());
        assert!(split_labels(10, 1.0, 0).is_err());
        assert_eq!(split_labels(100, 0.29, 0).unwrap().iter().filter(|&&s| s == Split::Train).count(), 29);
    }
}
