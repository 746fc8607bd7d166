//! Color reduction by fuzzy c-means clustering in HSL.
//!
//! Colors are mapped from the RGB cube to an opponent-axis HSL space
//! ([`colorspace`]), compared with either the cylindrical Euclidean distance
//! or a saturation-weighted distance that ignores hue between grays and
//! luminosity between fully saturated colors ([`distance`]), and clustered
//! with a fuzzy c-means variant whose hue update is a chroma-weighted
//! circular mean ([`clustering`]). [`pipeline`] applies all of it to images.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

pub mod clustering;
pub mod colorspace;
pub mod distance;
pub mod error;
pub mod image;
pub mod pipeline;
pub mod scalar;

pub use clustering::{
    init_centers, objective, run, update_centers, update_memberships, ClusterCenter, ClusterConfig,
    ClusterRun, MembershipMatrix, WeightedSample,
};
pub use colorspace::{hsl_to_rgb_approx, rgb_to_hsl, HslColor, RgbColor};
pub use distance::{
    achroma_index, chroma_index, dist, dist_sq, dist_sq_euclid, dist_sq_proposed, hue_dist_sq,
    multipliers, DistanceKind,
};
pub use error::{Error, Result};
pub use image::{load_image, save_image, Image, ImageFormat};
pub use pipeline::{
    assign, build_histogram, label_agreement, reduce_image, render_cluster_colors, save_report,
    Histogram, Reduction, ReductionReport,
};
pub use scalar::Real;

pub type Rgb = RgbColor<f64>;
pub type Hsl = HslColor<f64>;
pub type Sample = WeightedSample<f64>;
pub type Center = ClusterCenter<f64>;
pub type Memberships = MembershipMatrix<f64>;
pub type Config = ClusterConfig<f64>;
pub type Run = ClusterRun<f64>;

pub type Rgb32 = RgbColor<f32>;
pub type Hsl32 = HslColor<f32>;
pub type Config32 = ClusterConfig<f32>;
