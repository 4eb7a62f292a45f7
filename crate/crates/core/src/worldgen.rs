//! Synthetic observation world: two labeled Gaussian mixtures whose
//! components sit equidistantly on lines parallel to the main diagonal of
//! the unit hypercube.
//!
//! Lines of the two classes interleave on alternating sides of the diagonal,
//! so the classes are separated but adjacent: a kernel classifier can tell
//! them apart everywhere while no single hyperplane can.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Parameters describing the generative world before center placement.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureConfig {
    pub dimension: usize,
    pub lines_per_class: usize,
    pub components_per_line: usize,
    /// Perpendicular distance of the innermost line pair from the diagonal.
    pub line_offset: f64,
    /// Euclidean distance between consecutive component centers on a line.
    pub component_spacing: f64,
    /// Isotropic standard deviation of every component.
    pub component_stddev: f64,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        MixtureConfig {
            dimension: 2,
            lines_per_class: 2,
            components_per_line: 5,
            line_offset: 0.12,
            component_spacing: 0.18,
            component_stddev: 0.05,
        }
    }
}

/// A fully resolved two-class Gaussian mixture over the unit hypercube.
///
/// Component centers are explicit; mixing weights are uniform within each
/// class and the class priors are fixed at 1/2 each.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    dimension: usize,
    stddev: f64,
    /// Component centers, indexed `[class][component][coordinate]`.
    centers: [Vec<Vec<f64>>; 2],
    /// Per-component mixing weights within each class; each sums to 1.
    weights: [Vec<f64>; 2],
}

/// One observation with its ground-truth class.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub point: Vec<f64>,
    /// `true` is the positive class (observations to be registered).
    pub label: bool,
}

/// An ordered labeled sample drawn from the world.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<LabeledSample>,
    pub dimension: usize,
}

/// Builds the mixture geometry and validates that every implied center lies
/// inside the unit hypercube.
///
/// Line `k` of the positive class sits at signed perpendicular offset
/// `(-1)^k (k+1) * line_offset`; the negative class mirrors it. Sweeping the
/// perpendicular axis therefore meets the classes alternately.
pub fn build_mixture(config: &MixtureConfig) -> Result<MixtureSpec> {
    let d = config.dimension;
    if d < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if config.lines_per_class < 1 || config.components_per_line < 1 {
        return Err(Error::InvalidParameter(
            "lines_per_class and components_per_line must be >= 1".into(),
        ));
    }
    if !(config.component_spacing > 0.0) {
        return Err(Error::InvalidParameter("component_spacing must be > 0".into()));
    }
    if !(config.component_stddev > 0.0) {
        return Err(Error::InvalidParameter("component_stddev must be > 0".into()));
    }
    if !(config.line_offset >= 0.0) {
        return Err(Error::InvalidParameter("line_offset must be >= 0".into()));
    }
    if d == 1 && config.line_offset > 0.0 {
        return Err(Error::InvalidParameter(
            "line_offset must be 0 in one dimension (no perpendicular axis)".into(),
        ));
    }

    // Unit diagonal direction and a fixed unit perpendicular.
    let diag = 1.0 / (d as f64).sqrt();
    let mut perp = vec![0.0; d];
    if d >= 2 {
        perp[0] = -std::f64::consts::FRAC_1_SQRT_2;
        perp[1] = std::f64::consts::FRAC_1_SQRT_2;
    }

    let n_comp = config.components_per_line;
    let mut centers: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
    for class in 0..2 {
        for k in 0..config.lines_per_class {
            let side = if k % 2 == 0 { 1.0 } else { -1.0 };
            let sign = if class == 0 { side } else { -side };
            let offset = sign * (k as f64 + 1.0) * config.line_offset;
            for j in 0..n_comp {
                let along = (j as f64 - (n_comp as f64 - 1.0) / 2.0) * config.component_spacing;
                let center: Vec<f64> = (0..d)
                    .map(|i| 0.5 + offset * perp[i] + along * diag)
                    .collect();
                centers[class].push(center);
            }
        }
    }

    for (class, class_centers) in centers.iter().enumerate() {
        for (i, c) in class_centers.iter().enumerate() {
            if c.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::CenterOutOfBounds {
                    index: class * class_centers.len() + i,
                    coords: c.clone(),
                });
            }
        }
    }

    let m = centers[0].len();
    debug_assert_eq!(m, centers[1].len());
    let weights = [vec![1.0 / m as f64; m], vec![1.0 / m as f64; m]];

    Ok(MixtureSpec {
        dimension: d,
        stddev: config.component_stddev,
        centers,
        weights,
    })
}

impl MixtureSpec {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn stddev(&self) -> f64 {
        self.stddev
    }

    /// Component centers of one class.
    pub fn class_centers(&self, label: bool) -> &[Vec<f64>] {
        &self.centers[usize::from(label)]
    }

    /// Mixture density of one class, or the equal-weight joint density when
    /// `class` is `None`. Exact Gaussian formula; tails are not truncated at
    /// the hypercube boundary.
    pub fn pdf(&self, x: &[f64], class: Option<bool>) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(match class {
            Some(c) => self.class_pdf(x, usize::from(c)),
            None => 0.5 * self.class_pdf(x, 0) + 0.5 * self.class_pdf(x, 1),
        })
    }

    fn class_pdf(&self, x: &[f64], class: usize) -> f64 {
        let d = self.dimension as f64;
        let var = self.stddev * self.stddev;
        let norm = (2.0 * std::f64::consts::PI * var).powf(-d / 2.0);
        self.centers[class]
            .iter()
            .zip(&self.weights[class])
            .map(|(c, w)| {
                let sq: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                w * norm * (-sq / (2.0 * var)).exp()
            })
            .sum()
    }

    /// The class with the larger posterior at `x`; ties go positive.
    pub fn bayes_label(&self, x: &[f64]) -> Result<bool> {
        Ok(self.pdf(x, Some(true))? >= self.pdf(x, Some(false))?)
    }

    /// Draws one unlabeled observation from the joint distribution.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.sample_one(rng).point
    }

    fn sample_one<R: Rng>(&self, rng: &mut R) -> LabeledSample {
        let label = rng.random_bool(0.5);
        let class = usize::from(label);
        let comp = rng.random_range(0..self.centers[class].len());
        let center = &self.centers[class][comp];
        let point = center
            .iter()
            .map(|&c| c + self.stddev * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect();
        LabeledSample { point, label }
    }
}

/// Draws `n` labeled observations: a fair class choice, a uniform component
/// within the class, then an isotropic Gaussian draw around its center.
pub fn sample_labeled<R: Rng>(spec: &MixtureSpec, n: usize, rng: &mut R) -> Result<Dataset> {
    if n < 1 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let samples = (0..n).map(|_| spec.sample_one(rng)).collect();
    Ok(Dataset {
        samples,
        dimension: spec.dimension,
    })
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.iter().map(|s| s.point.as_slice())
    }

    pub fn labels(&self) -> impl Iterator<Item = bool> + '_ {
        self.samples.iter().map(|s| s.label)
    }

    /// Serializes to CSV with header `y,x_0,…,x_{d-1}`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y");
        for i in 0..self.dimension {
            out.push_str(&format!(",x_{i}"));
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(if s.label { "1" } else { "0" });
            for x in &s.point {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Dataset> {
        let malformed = |detail: &str| Error::MalformedData {
            what: "dataset csv".into(),
            detail: detail.into(),
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| malformed("missing header"))?;
        let dimension = header.split(',').count().checked_sub(1).unwrap_or(0);
        if dimension == 0 || !header.starts_with("y,") {
            return Err(malformed("header must be y,x_0,…"));
        }
        let mut samples = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let label = match fields.next() {
                Some("0") => false,
                Some("1") => true,
                _ => return Err(malformed(&format!("bad label on data row {i}"))),
            };
            let point: Vec<f64> = fields
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| malformed(&format!("bad float on data row {i}")))?;
            if point.len() != dimension {
                return Err(malformed(&format!("row {i} has wrong arity")));
            }
            samples.push(LabeledSample { point, label });
        }
        Ok(Dataset { samples, dimension })
    }
}
