use proptest::prelude::*;
use std::collections::HashSet;
use zenn::data::{
    load_jena_csv, load_ppm, random_split, random_split_image, read_series_csv, save_ppm, synth1d, synth1d_target,
    ImageDataset, JENA_COLUMN, JENA_ROWS,
};
use zenn::{Split, ZennError};

#[test]
fn synth1d_targets_are_exact_without_noise() {
    let d = synth1d(200, (0.0, 2.0), 11, 0.0).unwrap();
    let xs = d.inputs().column(0).to_vec();
    assert!(xs.windows(2).all(|w| w[0] <= w[1]));
    assert!(xs.iter().all(|x| (0.0..2.0).contains(x)));
    for (x, y) in xs.iter().zip(d.targets().column(0)) {
        assert!((y - synth1d_target(*x)).abs() < 1e-15);
    }
    assert_eq!(synth1d(200, (0.0, 2.0), 11, 0.0).unwrap(), d);
    assert_ne!(synth1d(200, (0.0, 2.0), 12, 0.0).unwrap(), d);
}

#[test]
fn synth1d_noise_keeps_inputs_and_has_the_requested_spread() {
    let clean = synth1d(4000, (0.0, 1.0), 3, 0.0).unwrap();
    let noisy = synth1d(4000, (0.0, 1.0), 3, 0.1).unwrap();
    assert_eq!(clean.inputs(), noisy.inputs());
    let resid: Vec<f64> = (&noisy.targets() - &clean.targets()).iter().copied().collect();
    let var = resid.iter().map(|r| r * r).sum::<f64>() / resid.len() as f64;
    assert!((var.sqrt() - 0.1).abs() < 0.01, "noise std {}", var.sqrt());
}

#[test]
fn series_csv_fixture_and_errors() {
    let text = "Date Time,T (degC),p (mbar)\n01.01.2009 00:10:00,1.0,996\n01.01.2009 00:20:00,2.0,996\n01.01.2009 00:30:00,3.0,997\n";
    let d = read_series_csv(text.as_bytes(), JENA_COLUMN, JENA_ROWS).unwrap();
    assert_eq!(d.inputs().column(0).to_vec(), vec![0.0, 0.5, 1.0]);
    assert_eq!(d.targets().column(0).to_vec(), vec![1.0, 2.0, 3.0]);
    let first_two = read_series_csv(text.as_bytes(), JENA_COLUMN, 2).unwrap();
    assert_eq!(first_two.targets().column(0).to_vec(), vec![1.0, 2.0]);
    assert!(matches!(read_series_csv(text.as_bytes(), "rh (%)", 10), Err(ZennError::MissingColumn(_))));
    let bad = "T (degC)\n1.0\nwarm\n";
    assert!(matches!(read_series_csv(bad.as_bytes(), JENA_COLUMN, 10), Err(ZennError::MalformedRow { row: 2, .. })));
    assert!(load_jena_csv("/nonexistent/jena.csv", JENA_COLUMN, 10).is_err());
}

/// Schema check on the public Jena climate file, when one is available.
#[test]
fn real_jena_file_if_present() {
    let Some(path) = std::env::var_os("ZENN_JENA_CSV") else {
        eprintln!("ZENN_JENA_CSV unset; skipping the real-file check");
        return;
    };
    let d = load_jena_csv(path, JENA_COLUMN, JENA_ROWS).unwrap();
    assert_eq!(d.len(), JENA_ROWS);
    assert!(d.targets().iter().all(|v| v.is_finite()));
}

fn fixture(width: usize, height: usize) -> ImageDataset {
    let colors = ndarray::Array2::from_shape_fn((width * height, 3), |(p, c)| ((p * 37 + c * 101) % 256) as f64 / 255.0);
    ImageDataset::from_colors(width, height, colors).unwrap()
}

#[test]
fn ppm_files_round_trip_through_disk() {
    let dir = std::env::temp_dir().join(format!("zenn-data-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fixture.ppm");
    let img = fixture(5, 3);
    save_ppm(&img, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P6\n5 3\n255\n"));
    let back = load_ppm(&path).unwrap();
    assert_eq!(back.to_ppm_bytes(), bytes);
    assert_eq!(back.colors(), img.colors());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn coordinates_are_monotone_and_reach_both_ends() {
    let img = fixture(4, 3);
    let c = img.coords();
    let (xs, ys): (Vec<f64>, Vec<f64>) = c.rows().into_iter().map(|r| (r[0], r[1])).unzip();
    for axis in [&xs, &ys] {
        assert_eq!(axis.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
        assert_eq!(axis.iter().copied().fold(f64::NEG_INFINITY, f64::max), 1.0);
    }
    // Row-major: x advances along a row.
    assert!(xs[..4].windows(2).all(|w| w[0] < w[1]));
    assert_eq!(ys[0], ys[3]);
    assert!(ys[0] < ys[4]);
}

#[test]
fn split_is_a_partition_with_the_requested_size() {
    let d = synth1d(10_000, (0.0, 1.0), 1, 0.0).unwrap();
    let s = random_split(d, 0.75, 42).unwrap();
    assert_eq!(s.count(Split::Train), 7500);
    assert_eq!(s.count(Split::Validation), 2500);
    let train: HashSet<usize> = (0..s.len()).filter(|&i| s.split()[i] == Split::Train).collect();
    let val: HashSet<usize> = (0..s.len()).filter(|&i| s.split()[i] == Split::Validation).collect();
    assert!(train.is_disjoint(&val));
    assert_eq!(train.len() + val.len(), s.len());

    let img = random_split_image(fixture(8, 8), 0.75, 42).unwrap();
    assert_eq!(img.split().iter().filter(|l| **l == Split::Train).count(), 48);
    assert_eq!(random_split_image(fixture(8, 8), 0.75, 42).unwrap().split(), img.split());
}

#[test]
fn split_rejects_degenerate_requests() {
    let tiny = synth1d(1, (0.0, 1.0), 1, 0.0).unwrap();
    assert!(random_split(tiny, 0.75, 0).is_err());
    let d = synth1d(4, (0.0, 1.0), 1, 0.0).unwrap();
    assert!(random_split(d.clone(), 0.0, 0).is_err());
    assert!(random_split(d.clone(), 1.0, 0).is_err());
    assert_eq!(random_split(d, 0.75, 0).unwrap().count(Split::Train), 3);
}

fn sized_payload() -> impl Strategy<Value = (usize, usize, Vec<u8>)> {
    (1usize..9, 1usize..9).prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(any::<u8>(), w * h * 3)))
}

proptest! {
    #[test]
    fn arbitrary_ppm_payloads_round_trip((w, h, payload) in sized_payload()) {
        let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
        bytes.extend_from_slice(&payload);
        let img = ImageDataset::from_ppm_bytes(&bytes).unwrap();
        prop_assert_eq!(img.len(), w * h);
        prop_assert!(img.colors().iter().chain(img.coords().iter()).all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(img.to_ppm_bytes(), bytes);
    }
}
