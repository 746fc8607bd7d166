//! Fuzzy c-means over weighted HSL samples.
//!
//! Memberships follow the usual inverse distance-ratio rule
//!
//! ```text
//! w_ij = 1 / (1 + sum_{m != j} (D(Q_i, q_j) / D(Q_i, q_m))^(2 / (omega - 1)))
//! ```
//!
//! evaluated on squared distances with exponent `1 / (omega - 1)`. Centers are
//! updated per component with `u_ij = t_i w_ij^omega`:
//!
//! * hue is the circular mean of the sample hues weighted by `u_ij sqrt(S_i)`,
//! * luminosity is the mean of `L_i` weighted by `u_ij sqrt(1 - S_i)`,
//! * saturation is the mean of `S_i` weighted by `u_ij`.
//!
//! All reductions run in sample order so results are bit-reproducible.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::colorspace::HslColor;
use crate::distance::{achroma_index, chroma_index, dist_sq, DistanceKind};
use crate::error::{Error, Result};
use crate::scalar::{atan2_or_zero, Real};

/// A unique color and the number of pixels carrying it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSample<T> {
    color: HslColor<T>,
    weight: u64,
}

impl<T: Real> WeightedSample<T> {
    pub fn new(color: HslColor<T>, weight: u64) -> Result<Self> {
        if weight == 0 {
            return Err(Error::ZeroWeight);
        }
        Ok(WeightedSample { color, weight })
    }

    pub fn color(&self) -> &HslColor<T> {
        &self.color
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }
}

/// Cluster prototypes live in the same space as the samples.
pub type ClusterCenter<T> = HslColor<T>;

/// Row-major `n x k` fuzzy assignment weights; every row sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix<T> {
    n: usize,
    k: usize,
    values: Vec<T>,
}

impl<T: Real> MembershipMatrix<T> {
    /// Builds a matrix from explicit rows, checking shape, range and row sums (within 1e-9).
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if k == 0 {
            return Err(Error::DimensionMismatch(
                "membership rows must be non-empty".into(),
            ));
        }
        let mut values = Vec::with_capacity(n * k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &w in &row {
                if !(w >= T::zero() && w <= T::one()) {
                    return Err(Error::InvalidConfig(format!(
                        "membership {w} in row {i} outside [0, 1]"
                    )));
                }
                sum += w.as_f64();
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig(format!(
                    "row {i} sums to {sum}, not 1"
                )));
            }
            values.extend(row);
        }
        Ok(MembershipMatrix { n, k, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.values.chunks_exact(self.k)
    }

    /// Index of the largest membership in row `i`; ties go to the lowest index.
    pub fn argmax_row(&self, i: usize) -> usize {
        let row = self.row(i);
        let mut best = 0;
        for (j, &w) in row.iter().enumerate().skip(1) {
            if w > row[best] {
                best = j;
            }
        }
        best
    }

    /// Largest absolute entry-wise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(
            (self.n, self.k),
            (other.n, other.k),
            "membership shapes differ"
        );
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig<T> {
    pub k: usize,
    /// Fuzzifier, strictly inside (1, 1.5).
    pub omega: T,
    pub max_iters: usize,
    pub tol: T,
    pub seed: u64,
    pub distance: DistanceKind,
    /// Squared distances below this count as coincident.
    pub eps_sing: T,
}

impl<T: Real> ClusterConfig<T> {
    pub const DEFAULT_OMEGA: f64 = 1.3;
    pub const DEFAULT_MAX_ITERS: usize = 100;
    pub const DEFAULT_TOL: f64 = 1e-5;
    pub const DEFAULT_SEED: u64 = 42;
    pub const DEFAULT_EPS_SING: f64 = 1e-12;

    pub fn new(k: usize) -> Self {
        ClusterConfig {
            k,
            omega: T::lit(Self::DEFAULT_OMEGA),
            max_iters: Self::DEFAULT_MAX_ITERS,
            tol: T::lit(Self::DEFAULT_TOL),
            seed: Self::DEFAULT_SEED,
            distance: DistanceKind::default(),
            eps_sing: T::lit(Self::DEFAULT_EPS_SING),
        }
    }

    pub fn with_distance(mut self, distance: DistanceKind) -> Self {
        self.distance = distance;
        self
    }

    pub fn with_omega(mut self, omega: T) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.omega > T::one() && self.omega < T::lit(1.5)) {
            return Err(Error::InvalidConfig(format!(
                "omega {} outside (1, 1.5)",
                self.omega
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.tol > T::zero() && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tol {} must be positive",
                self.tol
            )));
        }
        if !(self.eps_sing > T::zero() && self.eps_sing.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eps_sing {} must be positive",
                self.eps_sing
            )));
        }
        Ok(())
    }
}

fn color_key<T: Real>(q: &HslColor<T>) -> [u64; 3] {
    [
        q.h().as_f64().to_bits(),
        q.s().as_f64().to_bits(),
        q.l().as_f64().to_bits(),
    ]
}

fn weighted_pick(rng: &mut ChaCha8Rng, weights: &[f64]) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return None;
    }
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = Some(i);
            if target < acc {
                return Some(i);
            }
        }
    }
    last
}

/// Weighted farthest-point seeding.
///
/// The first center is drawn proportionally to sample weight, every further
/// one proportionally to weight times squared distance to the nearest chosen
/// center. When all remaining mass sits at distance zero (possible for the
/// saturation-weighted distance, which ignores luminosity between fully
/// saturated colors) the draw falls back to weight alone over colors not yet
/// chosen.
pub fn init_centers<T: Real>(
    samples: &[WeightedSample<T>],
    k: usize,
    seed: u64,
    kind: DistanceKind,
) -> Result<Vec<ClusterCenter<T>>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let distinct: HashSet<[u64; 3]> = samples.iter().map(|s| color_key(&s.color)).collect();
    if k > distinct.len() {
        return Err(Error::TooFewColors {
            k,
            distinct: distinct.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = samples.iter().map(|s| s.weight as f64).collect();
    let first = weighted_pick(&mut rng, &weights).expect("weights are positive");

    let mut centers = vec![samples[first].color];
    let mut chosen: HashSet<[u64; 3]> = HashSet::from([color_key(&samples[first].color)]);
    let mut nearest: Vec<T> = samples
        .iter()
        .map(|s| dist_sq(&s.color, &centers[0], kind))
        .collect();

    while centers.len() < k {
        let scores: Vec<f64> = samples
            .iter()
            .zip(&nearest)
            .map(|(s, d)| {
                if chosen.contains(&color_key(&s.color)) {
                    0.0
                } else {
                    s.weight as f64 * d.as_f64().max(0.0)
                }
            })
            .collect();
        let pick = match weighted_pick(&mut rng, &scores) {
            Some(i) => i,
            None => {
                let fallback: Vec<f64> = samples
                    .iter()
                    .map(|s| {
                        if chosen.contains(&color_key(&s.color)) {
                            0.0
                        } else {
                            s.weight as f64
                        }
                    })
                    .collect();
                weighted_pick(&mut rng, &fallback).expect("an unchosen distinct color remains")
            }
        };
        let center = samples[pick].color;
        chosen.insert(color_key(&center));
        for (d, s) in nearest.iter_mut().zip(samples) {
            *d = d.min(dist_sq(&s.color, &center, kind));
        }
        centers.push(center);
    }
    Ok(centers)
}

/// Membership row for a single color against all centers.
pub fn membership_row<T: Real>(
    color: &HslColor<T>,
    centers: &[ClusterCenter<T>],
    cfg: &ClusterConfig<T>,
    out: &mut [T],
) {
    debug_assert_eq!(out.len(), centers.len());
    let d2: Vec<T> = centers
        .iter()
        .map(|c| dist_sq(color, c, cfg.distance))
        .collect();

    let singular = d2.iter().filter(|&&d| d < cfg.eps_sing).count();
    if singular > 0 {
        let share = T::one() / T::lit(singular as f64);
        for (w, &d) in out.iter_mut().zip(&d2) {
            *w = if d < cfg.eps_sing { share } else { T::zero() };
        }
        return;
    }

    let power = T::one() / (cfg.omega - T::one());
    for (j, w) in out.iter_mut().enumerate() {
        let mut denom = T::one();
        for (m, &dm) in d2.iter().enumerate() {
            if m != j {
                denom = denom + (d2[j] / dm).powf(power);
            }
        }
        *w = T::one() / denom;
    }
}

pub fn update_memberships<T: Real>(
    samples: &[WeightedSample<T>],
    centers: &[ClusterCenter<T>],
    cfg: &ClusterConfig<T>,
) -> MembershipMatrix<T> {
    assert!(!centers.is_empty(), "at least one center required");
    let k = centers.len();
    let mut values = vec![T::zero(); samples.len() * k];
    for (s, row) in samples.iter().zip(values.chunks_exact_mut(k)) {
        membership_row(&s.color, centers, cfg, row);
    }
    MembershipMatrix {
        n: samples.len(),
        k,
        values,
    }
}

/// Recomputes every center from the memberships.
///
/// A component whose weighting mass vanishes keeps its previous value: the hue
/// when the chroma-weighted mass (or the resulting mean vector) is below
/// `eps_sing` relative to the cluster mass, the luminosity when the
/// achroma-weighted mass is, and the whole center when the cluster has no
/// mass at all.
pub fn update_centers<T: Real>(
    samples: &[WeightedSample<T>],
    memberships: &MembershipMatrix<T>,
    cfg: &ClusterConfig<T>,
    previous: &[ClusterCenter<T>],
) -> Vec<ClusterCenter<T>> {
    assert_eq!(
        memberships.n(),
        samples.len(),
        "membership rows must match samples"
    );
    assert_eq!(
        memberships.k(),
        previous.len(),
        "membership columns must match centers"
    );

    let eps = cfg.eps_sing;
    (0..previous.len())
        .map(|j| {
            let prev = previous[j];
            let mut mass = T::zero();
            let mut sat = T::zero();
            let mut chroma_mass = T::zero();
            let mut hue_sin = T::zero();
            let mut hue_cos = T::zero();
            let mut achroma_mass = T::zero();
            let mut lum = T::zero();

            for (i, s) in samples.iter().enumerate() {
                let u = T::lit(s.weight as f64) * memberships.get(i, j).powf(cfg.omega);
                let q = &s.color;
                let cu = u * chroma_index(q.s());
                let au = u * achroma_index(q.s());
                mass = mass + u;
                sat = sat + u * q.s();
                chroma_mass = chroma_mass + cu;
                hue_sin = hue_sin + cu * q.h().sin();
                hue_cos = hue_cos + cu * q.h().cos();
                achroma_mass = achroma_mass + au;
                lum = lum + au * q.l();
            }

            if mass.is_nan() || mass <= T::zero() {
                return prev;
            }

            let s = sat / mass;
            let h = if chroma_mass / mass < eps {
                prev.h()
            } else {
                let y = hue_sin / chroma_mass;
                let x = hue_cos / chroma_mass;
                if y.hypot(x) < eps {
                    prev.h()
                } else {
                    atan2_or_zero(y, x)
                }
            };
            let l = if achroma_mass / mass < eps {
                prev.l()
            } else {
                lum / achroma_mass
            };
            HslColor::from_parts(h, s, l)
        })
        .collect()
}

/// `J = sum_i t_i sum_j w_ij^omega D^2(Q_i, q_j)`.
pub fn objective<T: Real>(
    samples: &[WeightedSample<T>],
    memberships: &MembershipMatrix<T>,
    centers: &[ClusterCenter<T>],
    cfg: &ClusterConfig<T>,
) -> T {
    assert_eq!(
        memberships.n(),
        samples.len(),
        "membership rows must match samples"
    );
    assert_eq!(
        memberships.k(),
        centers.len(),
        "membership columns must match centers"
    );
    let mut total = T::zero();
    for (s, row) in samples.iter().zip(memberships.rows()) {
        let mut inner = T::zero();
        for (&w, c) in row.iter().zip(centers) {
            inner = inner + w.powf(cfg.omega) * dist_sq(&s.color, c, cfg.distance);
        }
        total = total + T::lit(s.weight as f64) * inner;
    }
    total
}

/// Outcome of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRun<T> {
    pub centers: Vec<ClusterCenter<T>>,
    /// Memberships against the final centers.
    pub memberships: MembershipMatrix<T>,
    pub iterations: usize,
    /// Objective after each iteration.
    pub objective_history: Vec<T>,
    /// False when the loop stopped at `max_iters`.
    pub converged: bool,
}

/// Alternates membership and center updates starting from [`init_centers`].
///
/// Stops when the largest membership change drops below `tol`, when the
/// largest center displacement (squared, configured distance) drops below
/// `tol^2`, or after `max_iters` iterations.
pub fn run<T: Real>(
    samples: &[WeightedSample<T>],
    cfg: &ClusterConfig<T>,
) -> Result<ClusterRun<T>> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut centers = init_centers(samples, cfg.k, cfg.seed, cfg.distance)?;
    let mut previous: Option<MembershipMatrix<T>> = None;
    let mut history = Vec::new();
    let mut converged = false;
    let tol_sq = cfg.tol * cfg.tol;

    while history.len() < cfg.max_iters {
        let memberships = update_memberships(samples, &centers, cfg);
        let next = update_centers(samples, &memberships, cfg, &centers);
        history.push(objective(samples, &memberships, &next, cfg));

        let displacement = centers.iter().zip(&next).fold(T::zero(), |acc, (a, b)| {
            acc.max(dist_sq(a, b, cfg.distance))
        });
        let membership_change = previous.as_ref().map(|p| p.max_abs_diff(&memberships));

        centers = next;
        previous = Some(memberships);
        if displacement < tol_sq || membership_change.is_some_and(|c| c < cfg.tol) {
            converged = true;
            break;
        }
    }

    let memberships = update_memberships(samples, &centers, cfg);
    Ok(ClusterRun {
        centers,
        memberships,
        iterations: history.len(),
        objective_history: history,
        converged,
    })
}
