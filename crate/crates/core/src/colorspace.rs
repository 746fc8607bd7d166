//! RGB unit cube to HSL conversion.
//!
//! Hue is the opponent-axis angle `atan2((B - G)/sqrt(2), (2R - B - G)/sqrt(6))`
//! in `(-pi, pi]`, luminosity is `M / (1 + M - m)` and saturation is
//! `2(M - m) / (1 + |M - 1/2| + |m - 1/2|)`, where `M` and `m` are the largest
//! and smallest channel. Achromatic colors get hue 0.
//!
//! There is no closed-form inverse; [`hsl_to_rgb_approx`] searches the cube.

use crate::error::{Error, Result};
use crate::scalar::{atan2_or_zero, normalize_angle, Real};

/// A point in the unit RGB cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgbColor<T> {
    r: T,
    g: T,
    b: T,
}

impl<T: Real> RgbColor<T> {
    pub fn new(r: T, g: T, b: T) -> Result<Self> {
        for (channel, v) in [("red", r), ("green", g), ("blue", b)] {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::ChannelOutOfRange {
                    channel,
                    value: v.as_f64(),
                });
            }
        }
        Ok(RgbColor { r, g, b })
    }

    /// Maps 8-bit channels to the cube by `v / 255`.
    pub fn from_u8(rgb: [u8; 3]) -> Self {
        let d = T::lit(255.0);
        RgbColor {
            r: T::lit(rgb[0] as f64) / d,
            g: T::lit(rgb[1] as f64) / d,
            b: T::lit(rgb[2] as f64) / d,
        }
    }

    /// Quantizes to 8 bits by `round(255 v)`.
    pub fn to_u8(self) -> [u8; 3] {
        [quantize(self.r), quantize(self.g), quantize(self.b)]
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn g(&self) -> T {
        self.g
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn channels(&self) -> [T; 3] {
        [self.r, self.g, self.b]
    }

    fn clamped(r: T, g: T, b: T) -> Self {
        let c = |v: T| v.max(T::zero()).min(T::one());
        RgbColor {
            r: c(r),
            g: c(g),
            b: c(b),
        }
    }
}

pub(crate) fn quantize<T: Real>(v: T) -> u8 {
    let x = (v * T::lit(255.0)).round().as_f64();
    x.clamp(0.0, 255.0) as u8
}

/// Hue (radians, `(-pi, pi]`), saturation and luminosity (both `[0, 1]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HslColor<T> {
    h: T,
    s: T,
    l: T,
}

impl<T: Real> HslColor<T> {
    /// Builds a color, reducing `h` to `(-pi, pi]`. `s` and `l` must lie in `[0, 1]`.
    pub fn new(h: T, s: T, l: T) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::InvalidHsl(format!("hue {h} is not finite")));
        }
        if !(s >= T::zero() && s <= T::one()) {
            return Err(Error::InvalidHsl(format!("saturation {s} outside [0, 1]")));
        }
        if !(l >= T::zero() && l <= T::one()) {
            return Err(Error::InvalidHsl(format!("luminosity {l} outside [0, 1]")));
        }
        Ok(HslColor {
            h: normalize_angle(h),
            s,
            l,
        })
    }

    /// Caller guarantees the ranges; hue is still normalized and `s`, `l` clamped.
    pub(crate) fn from_parts(h: T, s: T, l: T) -> Self {
        let c = |v: T| v.max(T::zero()).min(T::one());
        HslColor {
            h: normalize_angle(h),
            s: c(s),
            l: c(l),
        }
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn l(&self) -> T {
        self.l
    }

    /// Same color with every component converted to `f64`.
    pub fn to_f64(self) -> HslColor<f64> {
        HslColor {
            h: self.h.as_f64(),
            s: self.s.as_f64(),
            l: self.l.as_f64(),
        }
    }
}

pub fn rgb_to_hsl<T: Real>(c: RgbColor<T>) -> HslColor<T> {
    let (r, g, b) = (c.r, c.g, c.b);
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    let y = (b - g) / two.sqrt();
    let x = (two * r - b - g) / T::lit(6.0).sqrt();
    let h = atan2_or_zero(y, x);

    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let l = max / (T::one() + (max - min));
    let s = two * (max - min) / (T::one() + (max - half).abs() + (min - half).abs());

    HslColor::from_parts(h, s, l)
}

const GRID_STEPS: usize = 32;
const REFINE_SEEDS: usize = 4;

/// Squared mismatch between two HSL colors used by the inverse search:
/// chroma-scaled hue chord plus squared saturation and luminosity errors.
fn inverse_mismatch<T: Real>(target: &HslColor<T>, probe: &HslColor<T>) -> T {
    let half_dh = (target.h - probe.h) / T::lit(2.0);
    let chord = half_dh.sin();
    let ds = target.s - probe.s;
    let dl = target.l - probe.l;
    T::lit(4.0) * target.s * probe.s * chord * chord + ds * ds + dl * dl
}

/// Approximate inverse of [`rgb_to_hsl`].
///
/// Coarse grid search over the cube followed by a shrinking pattern search
/// around the best grid points. Refinement stops once the step falls below
/// `tol * 1e-3`. Targets outside the achievable `(s, l)` gamut come back as the
/// nearest reachable point under the search metric.
pub fn hsl_to_rgb_approx<T: Real>(q: HslColor<T>, tol: T) -> RgbColor<T> {
    let steps = T::lit(GRID_STEPS as f64);
    let mut best: Vec<(T, [T; 3])> = Vec::with_capacity(REFINE_SEEDS + 1);

    for ri in 0..=GRID_STEPS {
        for gi in 0..=GRID_STEPS {
            for bi in 0..=GRID_STEPS {
                let p = [
                    T::lit(ri as f64) / steps,
                    T::lit(gi as f64) / steps,
                    T::lit(bi as f64) / steps,
                ];
                let e = mismatch_at(&q, p);
                if best.len() < REFINE_SEEDS || e < best[best.len() - 1].0 {
                    let pos = best
                        .iter()
                        .position(|(be, _)| e < *be)
                        .unwrap_or(best.len());
                    best.insert(pos, (e, p));
                    best.truncate(REFINE_SEEDS);
                }
            }
        }
    }

    let floor = (tol * T::lit(1e-3)).max(T::lit(1e-12));
    let mut winner = best[0];
    for &(e, p) in &best {
        let refined = refine(&q, p, e, T::one() / steps, floor);
        if refined.0 < winner.0 {
            winner = refined;
        }
    }
    let [r, g, b] = winner.1;
    RgbColor::clamped(r, g, b)
}

fn mismatch_at<T: Real>(q: &HslColor<T>, p: [T; 3]) -> T {
    inverse_mismatch(q, &rgb_to_hsl(RgbColor::clamped(p[0], p[1], p[2])))
}

fn refine<T: Real>(q: &HslColor<T>, start: [T; 3], start_err: T, step: T, floor: T) -> (T, [T; 3]) {
    let mut p = start;
    let mut err = start_err;
    let mut step = step;
    let clamp = |v: T| v.max(T::zero()).min(T::one());
    while step >= floor && err > T::zero() {
        let mut improved = false;
        for dr in -1i8..=1 {
            for dg in -1i8..=1 {
                for db in -1i8..=1 {
                    if dr == 0 && dg == 0 && db == 0 {
                        continue;
                    }
                    let cand = [
                        clamp(p[0] + step * T::lit(dr as f64)),
                        clamp(p[1] + step * T::lit(dg as f64)),
                        clamp(p[2] + step * T::lit(db as f64)),
                    ];
                    let e = mismatch_at(q, cand);
                    if e < err {
                        err = e;
                        p = cand;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step = step / T::lit(2.0);
        }
    }
    (err, p)
}
