//! Image-level color reduction: histogram, clustering, hard assignment and rendering.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clustering::{
    run, ClusterCenter, ClusterConfig, ClusterRun, MembershipMatrix, WeightedSample,
};
use crate::colorspace::{hsl_to_rgb_approx, quantize, rgb_to_hsl, HslColor, RgbColor};
use crate::distance::{dist_sq, DistanceKind};
use crate::error::Result;
use crate::image::Image;
use crate::scalar::Real;

/// Packs an 8-bit triple into a 24-bit key.
pub fn rgb_key(rgb: [u8; 3]) -> u32 {
    (rgb[0] as u32) << 16 | (rgb[1] as u32) << 8 | rgb[2] as u32
}

pub fn key_rgb(key: u32) -> [u8; 3] {
    [(key >> 16) as u8, (key >> 8) as u8, key as u8]
}

/// Distinct colors of an image with their pixel counts, sorted by key.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<T> {
    entries: Vec<(u32, u64)>,
    samples: Vec<WeightedSample<T>>,
}

impl<T: Real> Histogram<T> {
    pub fn entries(&self) -> &[(u32, u64)] {
        &self.entries
    }

    pub fn samples(&self) -> &[WeightedSample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Position of an 8-bit color in the histogram.
    pub fn index_of(&self, rgb: [u8; 3]) -> Option<usize> {
        let key = rgb_key(rgb);
        self.entries.binary_search_by_key(&key, |e| e.0).ok()
    }
}

pub fn build_histogram<T: Real>(img: &Image) -> Histogram<T> {
    let mut keys: Vec<u32> = img.pixels().iter().map(|&p| rgb_key(p)).collect();
    keys.sort_unstable();
    let mut entries: Vec<(u32, u64)> = Vec::new();
    for key in keys {
        match entries.last_mut() {
            Some((k, count)) if *k == key => *count += 1,
            _ => entries.push((key, 1)),
        }
    }
    let samples = entries
        .iter()
        .map(|&(key, count)| {
            let color = rgb_to_hsl(RgbColor::<T>::from_u8(key_rgb(key)));
            WeightedSample::new(color, count).expect("histogram counts are positive")
        })
        .collect();
    Histogram { entries, samples }
}

/// Index of the nearest center; ties go to the lowest index.
pub fn nearest_center<T: Real>(
    color: &HslColor<T>,
    centers: &[ClusterCenter<T>],
    kind: DistanceKind,
) -> usize {
    let mut best = 0;
    let mut best_d = dist_sq(color, &centers[0], kind);
    for (j, c) in centers.iter().enumerate().skip(1) {
        let d = dist_sq(color, c, kind);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

/// Labels every pixel with its nearest center.
pub fn assign<T: Real>(
    img: &Image,
    histogram: &Histogram<T>,
    centers: &[ClusterCenter<T>],
    kind: DistanceKind,
) -> Vec<usize> {
    assert!(!centers.is_empty(), "at least one center required");
    let per_color: Vec<usize> = histogram
        .samples()
        .iter()
        .map(|s| nearest_center(s.color(), centers, kind))
        .collect();
    img.pixels()
        .iter()
        .map(|&p| {
            per_color[histogram
                .index_of(p)
                .expect("pixel color present in histogram")]
        })
        .collect()
}

/// Display color per cluster: the mean member RGB weighted by `t_i w_ij^omega`.
///
/// A cluster without any membership mass falls back to an approximate
/// inversion of its HSL center.
pub fn render_cluster_colors<T: Real>(
    histogram: &Histogram<T>,
    memberships: &MembershipMatrix<T>,
    centers: &[ClusterCenter<T>],
    cfg: &ClusterConfig<T>,
) -> Vec<[u8; 3]> {
    assert_eq!(
        memberships.n(),
        histogram.len(),
        "membership rows must match histogram"
    );
    assert_eq!(
        memberships.k(),
        centers.len(),
        "membership columns must match centers"
    );
    (0..centers.len())
        .map(|j| {
            let mut mass = T::zero();
            let mut acc = [T::zero(); 3];
            for (i, &(key, count)) in histogram.entries().iter().enumerate() {
                let u = T::lit(count as f64) * memberships.get(i, j).powf(cfg.omega);
                let rgb = RgbColor::<T>::from_u8(key_rgb(key)).channels();
                mass = mass + u;
                for (a, v) in acc.iter_mut().zip(rgb) {
                    *a = *a + u * v;
                }
            }
            if mass > T::zero() {
                acc.map(|a| quantize(a / mass))
            } else {
                hsl_to_rgb_approx(centers[j], T::lit(1e-2)).to_u8()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub k: usize,
    pub omega: f64,
    pub distance: DistanceKind,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl ConfigEcho {
    pub fn from_config<T: Real>(cfg: &ClusterConfig<T>) -> Self {
        ConfigEcho {
            k: cfg.k,
            omega: cfg.omega.as_f64(),
            distance: cfg.distance,
            max_iters: cfg.max_iters,
            tol: cfg.tol.as_f64(),
            seed: cfg.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub h: f64,
    pub s: f64,
    pub l: f64,
    pub rgb: [u8; 3],
    /// Fraction of pixels labeled with this cluster.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub config: ConfigEcho,
    pub iterations: usize,
    pub objective_history: Vec<f64>,
    pub clusters: Vec<ClusterSummary>,
}

impl ReductionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

pub fn save_report(report: &ReductionReport, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, report.to_json()?)?;
    Ok(())
}

/// Everything produced by [`reduce_image`].
#[derive(Debug, Clone)]
pub struct Reduction<T> {
    pub image: Image,
    pub report: ReductionReport,
    /// Cluster index per pixel, row-major.
    pub labels: Vec<usize>,
    pub histogram: Histogram<T>,
    pub run: ClusterRun<T>,
}

pub fn reduce_image<T: Real>(img: &Image, cfg: &ClusterConfig<T>) -> Result<Reduction<T>> {
    cfg.validate()?;
    let histogram = build_histogram::<T>(img);
    let outcome = run(histogram.samples(), cfg)?;
    let labels = assign(img, &histogram, &outcome.centers, cfg.distance);
    let palette = render_cluster_colors(&histogram, &outcome.memberships, &outcome.centers, cfg);

    let mut counts = vec![0u64; cfg.k];
    for &label in &labels {
        counts[label] += 1;
    }
    let total = labels.len() as f64;
    let clusters = outcome
        .centers
        .iter()
        .zip(&palette)
        .zip(&counts)
        .map(|((c, &rgb), &n)| ClusterSummary {
            h: c.h().as_f64(),
            s: c.s().as_f64(),
            l: c.l().as_f64(),
            rgb,
            share: n as f64 / total,
        })
        .collect();

    let pixels = labels.iter().map(|&j| palette[j]).collect();
    let image = Image::new(img.width(), img.height(), pixels)?;
    let report = ReductionReport {
        config: ConfigEcho::from_config(cfg),
        iterations: outcome.iterations,
        objective_history: outcome
            .objective_history
            .iter()
            .map(|v| v.as_f64())
            .collect(),
        clusters,
    };
    Ok(Reduction {
        image,
        report,
        labels,
        histogram,
        run: outcome,
    })
}

/// Fraction of pixel pairs on which two labelings agree (both together or
/// both apart). Equals 1 exactly when the partitions match up to renaming.
pub fn label_agreement(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must cover the same pixels");
    let n = a.len() as u128;
    if n < 2 {
        return 1.0;
    }
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![0u128; ka * kb];
    let mut rows = vec![0u128; ka];
    let mut cols = vec![0u128; kb];
    for (&x, &y) in a.iter().zip(b) {
        table[x * kb + y] += 1;
        rows[x] += 1;
        cols[y] += 1;
    }
    let pairs = |c: u128| c * c.saturating_sub(1) / 2;
    let total = pairs(n);
    let both: u128 = table.iter().map(|&c| pairs(c)).sum();
    let same_a: u128 = rows.iter().map(|&c| pairs(c)).sum();
    let same_b: u128 = cols.iter().map(|&c| pairs(c)).sum();
    // together in both + apart in both
    let agree = total + 2 * both - same_a - same_b;
    agree as f64 / total as f64
}
