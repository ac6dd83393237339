//! XOR dataset variants, train/test splitting and dataset files.
//!
//! * A: the four corners of the unit square with XOR labels.
//! * B: `n` Gaussian samples around each corner (Box–Muller draws).
//! * C: uniform points on `[0,1]²`, class 1 iff exactly one coordinate
//!   exceeds the threshold `t`.
//!
//! Files are CSV with header `x1,x2,y` and floats written with 17
//! significant digits; the provenance lives next to it as JSON.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::SeededRng;

pub type Point = [f64; 2];

pub const CORNERS: [(Point, u8); 4] = [
    ([0.0, 0.0], 0),
    ([0.0, 1.0], 1),
    ([1.0, 0.0], 1),
    ([1.0, 1.0], 0),
];

pub const DEFAULT_DATA_SEED: u64 = 42;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_C_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    A,
    B,
    C,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::A => "A",
            Variant::B => "B",
            Variant::C => "C",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub variant: Variant,
    pub sigma: f64,
    pub n_per_cluster: usize,
    pub threshold_t: f64,
    /// Total points for variant C; derived for A and B.
    pub n_total: usize,
    pub data_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub points: Vec<Point>,
    pub labels: Vec<u8>,
    pub provenance: Provenance,
}

impl LabeledDataset {
    pub fn new(points: Vec<Point>, labels: Vec<u8>, provenance: Provenance) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(invalid(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(invalid("labels must be 0 or 1"));
        }
        Ok(Self {
            points,
            labels,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, u8)> {
        self.points.iter().zip(self.labels.iter().copied())
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&y| y == 1).count();
        [self.len() - ones, ones]
    }

    /// Subset by index, keeping the provenance.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            points: idx.iter().map(|&i| self.points[i]).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Regenerates a dataset from a provenance record.
    pub fn regenerate(p: &Provenance) -> Result<Self> {
        match p.variant {
            Variant::A => Ok(gen_dataset_a()),
            Variant::B => gen_dataset_b(p.sigma, p.n_per_cluster, p.data_seed),
            Variant::C => gen_dataset_c(p.n_total, p.threshold_t, p.data_seed),
        }
    }
}

pub fn xor_label(x: &Point, t: f64) -> u8 {
    u8::from((x[0] > t) != (x[1] > t))
}

pub fn gen_dataset_a() -> LabeledDataset {
    LabeledDataset {
        points: CORNERS.iter().map(|(p, _)| *p).collect(),
        labels: CORNERS.iter().map(|(_, y)| *y).collect(),
        provenance: Provenance {
            variant: Variant::A,
            sigma: 0.0,
            n_per_cluster: 1,
            threshold_t: DEFAULT_THRESHOLD,
            n_total: 4,
            data_seed: 0,
        },
    }
}

/// `n_per_cluster` samples of `corner + N(0, σ²I)` per corner, corner-major.
pub fn gen_dataset_b(sigma: f64, n_per_cluster: usize, seed: u64) -> Result<LabeledDataset> {
    if !sigma.is_finite() || !(0.0..=1.0).contains(&sigma) {
        return Err(invalid(format!("sigma must be in [0, 1], got {sigma}")));
    }
    if n_per_cluster == 0 {
        return Err(invalid("n_per_cluster must be >= 1"));
    }
    let mut rng = SeededRng::new(seed);
    let mut points = Vec::with_capacity(4 * n_per_cluster);
    let mut labels = Vec::with_capacity(4 * n_per_cluster);
    for (corner, y) in CORNERS {
        for _ in 0..n_per_cluster {
            let dx = rng.standard_normal();
            let dy = rng.standard_normal();
            points.push([corner[0] + sigma * dx, corner[1] + sigma * dy]);
            labels.push(y);
        }
    }
    Ok(LabeledDataset {
        points,
        labels,
        provenance: Provenance {
            variant: Variant::B,
            sigma,
            n_per_cluster,
            threshold_t: DEFAULT_THRESHOLD,
            n_total: 4 * n_per_cluster,
            data_seed: seed,
        },
    })
}

pub fn gen_dataset_c(n_total: usize, threshold_t: f64, seed: u64) -> Result<LabeledDataset> {
    if n_total < 4 {
        return Err(invalid(format!("n_total must be >= 4, got {n_total}")));
    }
    if !(threshold_t > 0.0 && threshold_t < 1.0) {
        return Err(invalid(format!("threshold must be in (0, 1), got {threshold_t}")));
    }
    let mut rng = SeededRng::new(seed);
    let points: Vec<Point> = (0..n_total)
        .map(|_| {
            let a = rng.uniform();
            let b = rng.uniform();
            [a, b]
        })
        .collect();
    let labels = points.iter().map(|p| xor_label(p, threshold_t)).collect();
    Ok(LabeledDataset {
        points,
        labels,
        provenance: Provenance {
            variant: Variant::C,
            sigma: 0.0,
            n_per_cluster: 0,
            threshold_t,
            n_total,
            data_seed: seed,
        },
    })
}

fn shuffled(n: usize, rng: &mut SeededRng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.index(i + 1);
        idx.swap(i, j);
    }
    idx
}

fn train_count(fraction: f64, n: usize) -> usize {
    // 0.8 * 400 is 320.00000000000006 in binary; trim rounding noise before ceil
    ((fraction * n as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Shuffled prefix split: `⌈f·N⌉` training points, the rest for testing.
/// With `stratified`, each class is shuffled and split separately.
pub fn split_train_test(
    ds: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(invalid(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    if ds.len() < 2 {
        return Err(invalid("need at least 2 points to split"));
    }
    let mut rng = SeededRng::new(seed);
    let (train_idx, test_idx) = if stratified {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in [0u8, 1] {
            let members: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == class).collect();
            let order = shuffled(members.len(), &mut rng);
            let k = train_count(train_fraction, members.len());
            for (pos, &o) in order.iter().enumerate() {
                if pos < k {
                    train.push(members[o]);
                } else {
                    test.push(members[o]);
                }
            }
        }
        let t = shuffled(train.len(), &mut rng);
        let s = shuffled(test.len(), &mut rng);
        (
            t.iter().map(|&i| train[i]).collect::<Vec<_>>(),
            s.iter().map(|&i| test[i]).collect::<Vec<_>>(),
        )
    } else {
        let order = shuffled(ds.len(), &mut rng);
        let k = train_count(train_fraction, ds.len());
        (order[..k].to_vec(), order[k..].to_vec())
    };
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(invalid(format!(
            "split of {} points at fraction {train_fraction} leaves an empty side",
            ds.len()
        )));
    }
    Ok((ds.select(&train_idx), ds.select(&test_idx)))
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn provenance_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_dataset(ds: &LabeledDataset, csv_path: &Path) -> Result<()> {
    let mut out = String::from("x1,x2,y\n");
    for (p, y) in ds.iter() {
        out.push_str(&format!("{},{},{}\n", fmt_f64(p[0]), fmt_f64(p[1]), y));
    }
    fs::write(csv_path, out)?;
    let json = serde_json::to_string_pretty(&ds.provenance).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(provenance_path(csv_path), json + "\n")?;
    Ok(())
}

pub fn read_dataset(csv_path: &Path) -> Result<LabeledDataset> {
    let text = fs::read_to_string(csv_path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "x1,x2,y" => {}
        other => {
            return Err(Error::Parse(format!(
                "{}: expected header 'x1,x2,y', found {:?}",
                csv_path.display(),
                other
            )))
        }
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("{}:{}: malformed row '{line}'", csv_path.display(), lineno + 2));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(bad());
        }
        let x1: f64 = fields[0].trim().parse().map_err(|_| bad())?;
        let x2: f64 = fields[1].trim().parse().map_err(|_| bad())?;
        let y: u8 = fields[2].trim().parse().map_err(|_| bad())?;
        points.push([x1, x2]);
        labels.push(y);
    }
    let prov_text = fs::read_to_string(provenance_path(csv_path))?;
    let provenance: Provenance = serde_json::from_str(&prov_text).map_err(|e| Error::Parse(e.to_string()))?;
    LabeledDataset::new(points, labels, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_a_is_canonical_xor() {
        let a = gen_dataset_a();
        assert_eq!(a.len(), 4);
        assert_eq!(a.labels, vec![0, 1, 1, 0]);
        assert_eq!(a.points, vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]);
        for (p, y) in a.iter() {
            assert_eq!(y, u8::from(p[0] != p[1]));
        }
    }

    #[test]
    fn dataset_b_zero_noise_replicates_corners() {
        let b = gen_dataset_b(0.0, 3, 1).unwrap();
        assert_eq!(b.len(), 12);
        for (p, y) in b.iter() {
            let corner = CORNERS.iter().find(|(c, _)| c == p).expect("point on a corner");
            assert_eq!(corner.1, y);
        }
    }

    #[test]
    fn dataset_b_cluster_statistics() {
        let b = gen_dataset_b(0.10, 100, 42).unwrap();
        for (k, (corner, _)) in CORNERS.iter().enumerate() {
            let pts = &b.points[k * 100..(k + 1) * 100];
            for d in 0..2 {
                let mean = pts.iter().map(|p| p[d]).sum::<f64>() / 100.0;
                let std = (pts.iter().map(|p| (p[d] - mean).powi(2)).sum::<f64>() / 99.0).sqrt();
                assert!((mean - corner[d]).abs() < 0.03, "cluster {k} dim {d} mean {mean}");
                assert!((0.08..=0.12).contains(&std), "cluster {k} dim {d} std {std}");
            }
        }
    }

    #[test]
    fn dataset_b_labels_balanced_exactly() {
        let b = gen_dataset_b(0.30, 500, 9).unwrap();
        assert_eq!(b.class_counts(), [1000, 1000]);
    }

    #[test]
    fn dataset_b_rejects_bad_args() {
        assert!(gen_dataset_b(-0.1, 10, 0).is_err());
        assert!(gen_dataset_b(f64::NAN, 10, 0).is_err());
        assert!(gen_dataset_b(0.1, 0, 0).is_err());
    }

    #[test]
    fn dataset_c_labels() {
        assert_eq!(xor_label(&[0.9, 0.1], 0.5), 1);
        assert_eq!(xor_label(&[0.9, 0.9], 0.5), 0);
        let c = gen_dataset_c(10_000, 0.5, 7).unwrap();
        let frac = c.class_counts()[1] as f64 / 10_000.0;
        assert!((frac - 0.5).abs() < 0.02, "class-1 fraction {frac}");
        for (p, y) in c.iter() {
            assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
            assert_eq!(y, xor_label(p, 0.5));
        }
        assert!(gen_dataset_c(10, 0.0, 1).is_err());
        assert!(gen_dataset_c(10, 1.0, 1).is_err());
        assert!(gen_dataset_c(3, 0.5, 1).is_err());
    }

    #[test]
    fn split_sizes_and_partition() {
        let b = gen_dataset_b(0.1, 100, 42).unwrap();
        let (train, test) = split_train_test(&b, 0.8, 42, false).unwrap();
        assert_eq!((train.len(), test.len()), (320, 80));
        let (train2, test2) = split_train_test(&b, 0.8, 42, false).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);

        let mut all: Vec<(u64, u64, u8)> = train
            .iter()
            .chain(test.iter())
            .map(|(p, y)| (p[0].to_bits(), p[1].to_bits(), y))
            .collect();
        let mut orig: Vec<(u64, u64, u8)> = b.iter().map(|(p, y)| (p[0].to_bits(), p[1].to_bits(), y)).collect();
        all.sort_unstable();
        orig.sort_unstable();
        assert_eq!(all, orig);
    }

    #[test]
    fn stratified_split_balances_classes() {
        let b = gen_dataset_b(0.1, 100, 42).unwrap();
        let (train, test) = split_train_test(&b, 0.8, 42, true).unwrap();
        assert_eq!(train.class_counts(), [160, 160]);
        assert_eq!(test.class_counts(), [40, 40]);
    }

    #[test]
    fn split_rejects_degenerate() {
        let a = gen_dataset_a();
        assert!(split_train_test(&a, 0.0, 1, false).is_err());
        assert!(split_train_test(&a, 1.0, 1, false).is_err());
        assert!(split_train_test(&a, 0.9, 1, false).is_err());
        let one = a.select(&[0]);
        assert!(split_train_test(&one, 0.5, 1, false).is_err());
    }

    #[test]
    fn provenance_regenerates() {
        for ds in [
            gen_dataset_a(),
            gen_dataset_b(0.2, 25, 5).unwrap(),
            gen_dataset_c(50, 0.3, 8).unwrap(),
        ] {
            assert_eq!(LabeledDataset::regenerate(&ds.provenance).unwrap(), ds);
        }
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.csv");
        let ds = gen_dataset_b(0.1, 10, 3).unwrap();
        write_dataset(&ds, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x1,x2,y\n"));
        assert_eq!(read_dataset(&path).unwrap(), ds);
    }
}
