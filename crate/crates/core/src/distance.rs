//! Inter-color distances in HSL.
//!
//! Two squared distances are provided:
//!
//! * the cylindrical Euclidean distance
//!   `4 S1 S2 sin^2((H1 - H2)/2) + (S1 - S2)^2 + (L1 - L2)^2`,
//! * the saturation-weighted distance
//!   `alpha sin^2((H1 - H2)/2) + beta (L1 - L2)^2 + (S1 - S2)^2`
//!   with `alpha = c(S1) c(S2)`, `beta = a(S1) a(S2)`, `c(S) = sqrt(S)` and
//!   `a(S) = sqrt(1 - S)`.
//!
//! The hue term of the second one is gated by chromaticity and the luminosity
//! term by achromaticity: gray colors are compared by luminosity only, fully
//! saturated colors by hue and saturation only.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::colorspace::HslColor;
use crate::error::Error;
use crate::scalar::Real;

/// Which squared distance drives clustering and assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DistanceKind {
    /// Saturation-weighted distance (`"hslp"`).
    #[default]
    #[serde(rename = "hslp")]
    Proposed,
    /// Cylindrical Euclidean distance (`"hsleuclid"`).
    #[serde(rename = "hsleuclid")]
    Euclid,
}

impl DistanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceKind::Proposed => "hslp",
            DistanceKind::Euclid => "hsleuclid",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "hslp" => Ok(DistanceKind::Proposed),
            "hsleuclid" => Ok(DistanceKind::Euclid),
            other => Err(Error::InvalidConfig(format!(
                "unknown distance {other:?} (expected hslp or hsleuclid)"
            ))),
        }
    }
}

/// `sin^2((h1 - h2) / 2)`, in `[0, 1]` and 2pi-periodic in both arguments.
#[inline]
pub fn hue_dist_sq<T: Real>(h1: T, h2: T) -> T {
    let s = ((h1 - h2) / T::lit(2.0)).sin();
    s * s
}

/// Chromaticity index `c(s) = sqrt(s)`.
#[inline]
pub fn chroma_index<T: Real>(s: T) -> T {
    s.max(T::zero()).sqrt()
}

/// Achromaticity index `a(s) = sqrt(1 - s)`.
#[inline]
pub fn achroma_index<T: Real>(s: T) -> T {
    (T::one() - s).max(T::zero()).sqrt()
}

/// Hue multiplier `alpha = c(s1) c(s2)` and luminosity multiplier `beta = a(s1) a(s2)`.
#[inline]
pub fn multipliers<T: Real>(s1: T, s2: T) -> (T, T) {
    (
        chroma_index(s1) * chroma_index(s2),
        achroma_index(s1) * achroma_index(s2),
    )
}

pub fn dist_sq_euclid<T: Real>(q1: &HslColor<T>, q2: &HslColor<T>) -> T {
    let ds = q1.s() - q2.s();
    let dl = q1.l() - q2.l();
    T::lit(4.0) * q1.s() * q2.s() * hue_dist_sq(q1.h(), q2.h()) + ds * ds + dl * dl
}

pub fn dist_sq_proposed<T: Real>(q1: &HslColor<T>, q2: &HslColor<T>) -> T {
    let (alpha, beta) = multipliers(q1.s(), q2.s());
    let ds = q1.s() - q2.s();
    let dl = q1.l() - q2.l();
    alpha * hue_dist_sq(q1.h(), q2.h()) + beta * dl * dl + ds * ds
}

#[inline]
pub fn dist_sq<T: Real>(q1: &HslColor<T>, q2: &HslColor<T>, kind: DistanceKind) -> T {
    match kind {
        DistanceKind::Proposed => dist_sq_proposed(q1, q2),
        DistanceKind::Euclid => dist_sq_euclid(q1, q2),
    }
}

/// Unsquared distance. Clustering works on squared values; this is for reporting.
pub fn dist<T: Real>(q1: &HslColor<T>, q2: &HslColor<T>, kind: DistanceKind) -> T {
    dist_sq(q1, q2, kind).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn q(h: f64, s: f64, l: f64) -> HslColor<f64> {
        HslColor::new(h, s, l).unwrap()
    }

    #[test]
    fn hue_chord_values() {
        assert_eq!(hue_dist_sq(1.234_f64, 1.234), 0.0);
        assert!((hue_dist_sq(0.0_f64, 2.0 * PI / 3.0) - 0.75).abs() < 1e-15);
        assert!((hue_dist_sq(0.0_f64, PI) - 1.0).abs() < 1e-15);
        assert!((hue_dist_sq(0.3_f64, 2.0) - hue_dist_sq(0.3 + 2.0 * PI, 2.0)).abs() < 1e-14);
    }

    #[test]
    fn index_functions() {
        assert_eq!(chroma_index(0.0_f64), 0.0);
        assert_eq!(chroma_index(1.0_f64), 1.0);
        assert_eq!(chroma_index(0.25_f64), 0.5);
        assert_eq!(achroma_index(0.0_f64), 1.0);
        assert_eq!(achroma_index(1.0_f64), 0.0);
        assert_eq!(achroma_index(0.75_f64), 0.5);
    }

    #[test]
    fn multiplier_values() {
        assert_eq!(multipliers(0.0_f64, 0.7).0, 0.0);
        assert_eq!(multipliers(1.0_f64, 1.0), (1.0, 0.0));
        let (a, b) = multipliers(0.5_f64, 0.5);
        assert!((a - 0.5).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn red_versus_blue() {
        let red = q(0.0, 1.0, 0.5);
        let blue = q(2.0 * PI / 3.0, 1.0, 0.5);
        assert!((dist_sq_euclid(&red, &blue) - 3.0).abs() < 1e-12);
        assert!((dist_sq_proposed(&red, &blue) - 0.75).abs() < 1e-12);
        assert!((dist_sq(&red, &blue, DistanceKind::Euclid) - 3.0).abs() < 1e-12);
        assert!((dist_sq(&red, &blue, DistanceKind::Proposed) - 0.75).abs() < 1e-12);
        assert_eq!(dist_sq(&red, &red, DistanceKind::Proposed), 0.0);
    }

    #[test]
    fn gray_pairs() {
        assert_eq!(dist_sq_euclid(&q(0.0, 0.0, 0.0), &q(0.0, 0.0, 1.0)), 1.0);
        let d = dist_sq_proposed(&q(0.0, 0.0, 0.2), &q(0.0, 0.0, 0.9));
        assert!((d - 0.49).abs() < 1e-12);
    }

    #[test]
    fn saturated_luminosity_is_ignored() {
        assert_eq!(dist_sq_proposed(&q(0.4, 1.0, 0.3), &q(0.4, 1.0, 0.7)), 0.0);
    }

    #[test]
    fn kind_names() {
        assert_eq!(
            "hslp".parse::<DistanceKind>().unwrap(),
            DistanceKind::Proposed
        );
        assert_eq!(
            "hsleuclid".parse::<DistanceKind>().unwrap(),
            DistanceKind::Euclid
        );
        assert!("lab".parse::<DistanceKind>().is_err());
        assert_eq!(
            serde_json::to_string(&DistanceKind::Euclid).unwrap(),
            "\"hsleuclid\""
        );
        assert_eq!(DistanceKind::Proposed.to_string(), "hslp");
    }

    #[test]
    fn unsquared_is_root() {
        let red = q(0.0, 1.0, 0.5);
        let blue = q(2.0 * PI / 3.0, 1.0, 0.5);
        assert!((dist(&red, &blue, DistanceKind::Proposed) - 0.75_f64.sqrt()).abs() < 1e-12);
    }
}
