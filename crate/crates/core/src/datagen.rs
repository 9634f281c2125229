//! Deterministic dataset generators.
//!
//! Every generator is a pure function of its spec: randomness comes from
//! [`stream_rng`]`(seed, 0)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{config, Result};
use crate::model::Dataset;
use crate::solvers::stream_rng;

/// Isotropic Gaussian blobs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlobSpec {
    pub n_total: usize,
    pub k_blobs: usize,
    pub dims: usize,
    /// `k_blobs × dims`; `None` places the centers on a square lattice.
    pub centers: Option<Vec<Vec<f64>>>,
    pub std: f64,
    /// Lattice spacing of `3·std` when true (neighbouring blobs overlap),
    /// `12·std` otherwise. Ignored when `centers` is given.
    pub allow_overlap: bool,
    pub seed: u64,
}

impl BlobSpec {
    pub fn new(n_total: usize, k_blobs: usize, seed: u64) -> Self {
        Self { n_total, k_blobs, dims: 2, centers: None, std: 1.0, allow_overlap: true, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.k_blobs == 0 || self.n_total < self.k_blobs {
            return Err(config("blobs need 1 <= k_blobs <= n_total"));
        }
        if self.dims == 0 {
            return Err(config("blobs need at least one dimension"));
        }
        if !(self.std.is_finite() && self.std > 0.0) {
            return Err(config("blob std must be positive"));
        }
        if let Some(c) = &self.centers {
            if c.len() != self.k_blobs
                || c.iter().any(|row| row.len() != self.dims || row.iter().any(|v| !v.is_finite()))
            {
                return Err(config("centers must be a finite k_blobs x dims matrix"));
            }
        }
        Ok(())
    }

    /// Blob centers as used by [`gaussian_blobs`].
    pub fn resolved_centers(&self) -> Vec<Vec<f64>> {
        if let Some(c) = &self.centers {
            return c.clone();
        }
        let spacing = if self.allow_overlap { 3.0 } else { 12.0 } * self.std;
        let side = (1..).find(|s| s * s >= self.k_blobs).expect("finite");
        (0..self.k_blobs)
            .map(|a| {
                let mut c = vec![0.0; self.dims];
                c[0] = (a % side) as f64 * spacing;
                if self.dims > 1 {
                    c[1] = (a / side) as f64 * spacing;
                } else {
                    c[0] = a as f64 * spacing;
                }
                c
            })
            .collect()
    }
}

/// `n_total` points split as evenly as possible over the blobs (earlier
/// blobs take the remainder), listed blob by blob, with generator labels.
pub fn gaussian_blobs(spec: &BlobSpec) -> Result<Dataset> {
    spec.validate()?;
    let centers = spec.resolved_centers();
    let mut rng = stream_rng(spec.seed, 0);
    let base = spec.n_total / spec.k_blobs;
    let extra = spec.n_total % spec.k_blobs;
    let mut coords = Vec::with_capacity(spec.n_total * spec.dims);
    let mut labels = Vec::with_capacity(spec.n_total);
    for (a, c) in centers.iter().enumerate() {
        let size = base + usize::from(a < extra);
        for _ in 0..size {
            for &m in c {
                let z: f64 = rng.sample(StandardNormal);
                coords.push(m + spec.std * z);
            }
            labels.push(a);
        }
    }
    Dataset::from_flat(spec.dims, coords, Some(labels))
}

/// Uniform points inside a rotated, translated ellipse.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EllipseSpec {
    pub n_total: usize,
    pub semi_axis_a: f64,
    pub semi_axis_b: f64,
    /// Radians, counter-clockwise.
    pub rotation: f64,
    pub center: [f64; 2],
    pub seed: u64,
}

impl EllipseSpec {
    pub fn new(n_total: usize, a: f64, b: f64, seed: u64) -> Self {
        Self { n_total, semi_axis_a: a, semi_axis_b: b, rotation: 0.0, center: [0.0, 0.0], seed }
    }

    /// Whether `p` lies in the closed ellipse.
    pub fn contains(&self, p: &[f64]) -> bool {
        let (s, c) = (libm::sin(self.rotation), libm::cos(self.rotation));
        let (dx, dy) = (p[0] - self.center[0], p[1] - self.center[1]);
        let u = c * dx + s * dy;
        let v = -s * dx + c * dy;
        let r = (u / self.semi_axis_a) * (u / self.semi_axis_a) + (v / self.semi_axis_b) * (v / self.semi_axis_b);
        r <= 1.0 + 1e-12
    }
}

/// Rejection sampling from the bounding box in the ellipse frame.
pub fn ellipse_uniform(spec: &EllipseSpec) -> Result<Dataset> {
    let (a, b) = (spec.semi_axis_a, spec.semi_axis_b);
    if spec.n_total == 0 || !(b > 0.0 && a >= b && a.is_finite()) {
        return Err(config("ellipse needs n_total >= 1 and a >= b > 0"));
    }
    if !spec.rotation.is_finite() || spec.center.iter().any(|v| !v.is_finite()) {
        return Err(config("ellipse rotation and center must be finite"));
    }
    let mut rng = stream_rng(spec.seed, 0);
    let (s, c) = (libm::sin(spec.rotation), libm::cos(spec.rotation));
    let mut coords = Vec::with_capacity(2 * spec.n_total);
    while coords.len() < 2 * spec.n_total {
        let u = rng.random_range(-a..=a);
        let v = rng.random_range(-b..=b);
        if (u / a) * (u / a) + (v / b) * (v / b) <= 1.0 {
            coords.push(spec.center[0] + c * u - s * v);
            coords.push(spec.center[1] + s * u + c * v);
        }
    }
    Dataset::from_flat(2, coords, None)
}

const GROUP_SITES: [[f64; 2]; 4] = [[0.0, 0.0], [0.0, 10.0], [10.0, 0.0], [10.0, 10.0]];
const GROUP_OFFSETS: [[f64; 2]; 3] = [[-0.5, -0.3], [0.5, -0.3], [0.0, 0.6]];

/// Twelve points in four groups of three at the corners of a square, and
/// a k-means initialization that traps Lloyd's algorithm: one centroid
/// halfway between groups 0 and 1, two inside group 2, one on group 3.
pub fn pedagogical_instance() -> (Dataset, Vec<Vec<f64>>) {
    let mut points = Vec::with_capacity(12);
    let mut labels = Vec::with_capacity(12);
    for (g, site) in GROUP_SITES.iter().enumerate() {
        for off in GROUP_OFFSETS {
            points.push(vec![site[0] + off[0], site[1] + off[1]]);
            labels.push(g);
        }
    }
    let data = Dataset::new(points, Some(labels)).expect("fixed coordinates are valid");
    let centroids = vec![vec![0.0, 5.0], vec![9.4, -0.3], vec![10.4, 0.3], vec![10.0, 10.0]];
    (data, centroids)
}
