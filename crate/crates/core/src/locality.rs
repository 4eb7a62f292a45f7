//! Locality capture: the sphere enclosing a window of recent observations
//! and selection of training points inside it.
//!
//! Coverage 1 is the exact minimum enclosing ball (Welzl's randomized
//! algorithm, any dimension). Fractional coverage keeps the full-ball center
//! and shrinks the radius to the nearest-rank distance quantile; the exact
//! minimum ball over a best point subset is NP-hard and the quantile
//! approximation preserves the intent (robustness to stray excursions).

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::worldgen::Dataset;

/// A locality: center, radius, and the realized fraction of the generating
/// window it encloses.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
    pub coverage: f64,
}

const CONTAIN_EPS: f64 = 1e-10;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug)]
struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    fn contains_slack(&self, p: &[f64]) -> bool {
        dist(&self.center, p) <= self.radius + CONTAIN_EPS
    }
}

/// Smallest ball with every point of `boundary` on its surface.
///
/// The center lies in the affine hull of the boundary set; it solves the
/// Gram system `2 (p_i - p_0)·(c - p_0) = ||p_i - p_0||^2`. Near-singular
/// pivots (duplicate or affinely dependent points) zero the corresponding
/// multiplier, which yields the minimal-norm center of the degenerate hull.
fn ball_from_boundary(boundary: &[&[f64]]) -> Option<Ball> {
    let m = boundary.len();
    let first = *boundary.first()?;
    if m == 1 {
        return Some(Ball {
            center: first.to_vec(),
            radius: 0.0,
        });
    }
    let d = first.len();
    let k = m - 1;
    let spans: Vec<Vec<f64>> = boundary[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = 2.0 * spans[i].iter().zip(&spans[j]).map(|(x, y)| x * y).sum::<f64>();
        }
        a[i][k] = spans[i].iter().map(|x| x * x).sum::<f64>();
    }

    // Gauss-Jordan with partial pivoting; columns without a usable pivot
    // leave their multiplier at zero.
    let mut row = 0;
    let mut pivot_cols = Vec::with_capacity(k);
    for col in 0..k {
        if row == k {
            break;
        }
        let pivot_row = (row..k)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())?;
        if a[pivot_row][col].abs() < 1e-12 {
            continue;
        }
        a.swap(row, pivot_row);
        let pivot = a[row][col];
        for c in col..=k {
            a[row][c] /= pivot;
        }
        for r in 0..k {
            if r != row && a[r][col] != 0.0 {
                let factor = a[r][col];
                for c in col..=k {
                    a[r][c] -= factor * a[row][c];
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let mut solution = vec![0.0; k];
    for (r, &c) in pivot_cols.iter().enumerate() {
        solution[c] = a[r][k];
    }

    let mut center = first.to_vec();
    for (l, span) in solution.iter().zip(&spans) {
        for i in 0..d {
            center[i] += l * span[i];
        }
    }
    let radius = boundary
        .iter()
        .map(|p| dist(&center, p))
        .fold(0.0_f64, f64::max);
    Some(Ball { center, radius })
}

fn welzl_rec<'a>(
    points: &[&'a [f64]],
    limit: usize,
    boundary: &mut Vec<&'a [f64]>,
    d: usize,
) -> Option<Ball> {
    let mut ball = ball_from_boundary(boundary);
    if boundary.len() == d + 1 {
        return ball;
    }
    for i in 0..limit {
        let p = points[i];
        let inside = ball.as_ref().is_some_and(|b| b.contains_slack(p));
        if !inside {
            boundary.push(p);
            ball = welzl_rec(points, i, boundary, d);
            boundary.pop();
        }
    }
    ball
}

fn minimum_enclosing_ball<R: Rng>(points: &[Vec<f64>], rng: &mut R) -> Ball {
    // Exact duplicates (rejected sampler steps repeat states) are dropped;
    // they cannot change the ball but would degenerate the boundary solve.
    let mut unique: Vec<&[f64]> = Vec::with_capacity(points.len());
    for p in points {
        if !unique.iter().any(|q| *q == p.as_slice()) {
            unique.push(p);
        }
    }
    unique.shuffle(rng);
    let d = unique[0].len();
    welzl_rec(&unique, unique.len(), &mut Vec::new(), d).expect("nonempty input yields a ball")
}

/// Sphere around a window of points.
///
/// `coverage` 1 gives the exact minimum enclosing ball; a fraction `q < 1`
/// keeps that ball's center and takes the nearest-rank (ceil) `q`-quantile
/// of the distances as the radius, so at least `ceil(q*m)` points are
/// enclosed. The random source only drives Welzl's internal shuffle.
pub fn enclosing_sphere<R: Rng>(
    points: &[Vec<f64>],
    coverage: f64,
    rng: &mut R,
) -> Result<Sphere> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = points[0].len();
    if let Some(bad) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.len(),
        });
    }
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::InvalidParameter("coverage must lie in (0, 1]".into()));
    }

    let ball = minimum_enclosing_ball(points, rng);
    let m = points.len();
    let (radius, enclosed) = if coverage >= 1.0 {
        (ball.radius, m)
    } else {
        let mut dists: Vec<f64> = points.iter().map(|p| dist(&ball.center, p)).collect();
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let rank = ((coverage * m as f64).ceil() as usize).clamp(1, m);
        let radius = dists[rank - 1];
        let enclosed = dists.iter().filter(|&&x| x <= radius).count();
        (radius, enclosed)
    };

    Ok(Sphere {
        center: ball.center,
        radius,
        coverage: enclosed as f64 / m as f64,
    })
}

impl Sphere {
    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    /// Boundary-inclusive containment.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.center.len() {
            return Err(Error::DimensionMismatch {
                expected: self.center.len(),
                got: x.len(),
            });
        }
        Ok(dist(&self.center, x) <= self.radius)
    }
}

/// Indices of dataset points inside the sphere, in dataset order.
pub fn inside_indices(data: &Dataset, sphere: &Sphere) -> Result<Vec<usize>> {
    if data.dimension != sphere.dimension() {
        return Err(Error::DimensionMismatch {
            expected: sphere.dimension(),
            got: data.dimension,
        });
    }
    let mut indices = Vec::new();
    for (i, sample) in data.samples.iter().enumerate() {
        if sphere.contains(&sample.point)? {
            indices.push(i);
        }
    }
    Ok(indices)
}

/// The subset of the dataset inside the sphere, preserving order.
pub fn select_within(data: &Dataset, sphere: &Sphere) -> Result<Dataset> {
    let indices = inside_indices(data, sphere)?;
    Ok(Dataset {
        samples: indices.iter().map(|&i| data.samples[i].clone()).collect(),
        dimension: data.dimension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use crate::worldgen::LabeledSample;
    use proptest::prelude::*;

    #[test]
    fn single_point_gives_degenerate_sphere() {
        let s = enclosing_sphere(&[vec![0.3, 0.4]], 1.0, &mut rng_from(1)).unwrap();
        assert_eq!(s.center, vec![0.3, 0.4]);
        assert_eq!(s.radius, 0.0);
        assert_eq!(s.coverage, 1.0);
    }

    #[test]
    fn two_points_give_midpoint_sphere() {
        let a = vec![0.0, 0.0];
        let b = vec![1.0, 0.0];
        let s = enclosing_sphere(&[a, b], 1.0, &mut rng_from(2)).unwrap();
        assert!(dist(&s.center, &[0.5, 0.0]) < 1e-12);
        assert!((s.radius - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fractional_coverage_excludes_planted_outliers() {
        let mut rng = rng_from(3);
        let mut points: Vec<Vec<f64>> = (0..95)
            .map(|_| vec![0.5 + 0.05 * rng.random::<f64>(), 0.5 + 0.05 * rng.random::<f64>()])
            .collect();
        // excursions scattered around the cloud
        points.push(vec![5.5, 0.5]);
        points.push(vec![-4.5, 0.5]);
        points.push(vec![0.5, 5.5]);
        points.push(vec![0.5, -4.5]);
        points.push(vec![3.5, 3.5]);
        let full = enclosing_sphere(&points, 1.0, &mut rng_from(4)).unwrap();
        let s = enclosing_sphere(&points, 0.95, &mut rng_from(4)).unwrap();
        assert!(s.radius < full.radius);
        let inliers_inside = points[..95]
            .iter()
            .filter(|p| s.contains(p).unwrap())
            .count();
        assert_eq!(inliers_inside, 95);
        assert!(s.coverage >= 0.95);
    }

    #[test]
    fn radius_is_nondecreasing_in_coverage() {
        let mut rng = rng_from(5);
        let points: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let mut last = 0.0;
        for q in [0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 1.0] {
            let s = enclosing_sphere(&points, q, &mut rng_from(6)).unwrap();
            assert!(s.radius >= last, "radius shrank at coverage {q}");
            last = s.radius;
        }
    }

    #[test]
    fn containment_is_boundary_inclusive() {
        let s = Sphere {
            center: vec![0.0, 0.0],
            radius: 0.1,
            coverage: 1.0,
        };
        assert!(s.contains(&[0.0, 0.0]).unwrap());
        assert!(s.contains(&[0.1, 0.0]).unwrap());
        assert!(!s.contains(&[0.1 + 1e-6, 0.0]).unwrap());
    }

    fn toy_dataset(points: Vec<Vec<f64>>) -> Dataset {
        Dataset {
            samples: points
                .into_iter()
                .enumerate()
                .map(|(i, point)| LabeledSample {
                    point,
                    label: i % 2 == 0,
                })
                .collect(),
            dimension: 2,
        }
    }

    #[test]
    fn zero_radius_off_data_selects_nothing() {
        let data = toy_dataset(vec![vec![0.1, 0.1], vec![0.9, 0.9]]);
        let s = Sphere {
            center: vec![0.5, 0.5],
            radius: 0.0,
            coverage: 1.0,
        };
        assert!(select_within(&data, &s).unwrap().is_empty());
    }

    #[test]
    fn all_enclosing_sphere_selects_everything() {
        let mut rng = rng_from(7);
        let data = toy_dataset(
            (0..40)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect(),
        );
        let s = Sphere {
            center: vec![0.5, 0.5],
            radius: 10.0,
            coverage: 1.0,
        };
        assert_eq!(select_within(&data, &s).unwrap(), data);
    }

    #[test]
    fn selection_matches_naive_distance_loop_and_is_idempotent() {
        let mut rng = rng_from(8);
        let data = toy_dataset(
            (0..200)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect(),
        );
        let s = Sphere {
            center: vec![0.4, 0.6],
            radius: 0.3,
            coverage: 1.0,
        };
        let selected = select_within(&data, &s).unwrap();
        let naive: Vec<LabeledSample> = data
            .samples
            .iter()
            .filter(|smp| {
                let dx = smp.point[0] - 0.4;
                let dy = smp.point[1] - 0.6;
                (dx * dx + dy * dy).sqrt() <= 0.3
            })
            .cloned()
            .collect();
        assert_eq!(selected.samples, naive);
        assert_eq!(select_within(&selected, &s).unwrap(), selected);
    }

    #[test]
    fn duplicate_points_are_handled() {
        let p = vec![0.25, 0.75];
        let points = vec![p.clone(), p.clone(), p.clone(), vec![0.75, 0.25]];
        let s = enclosing_sphere(&points, 1.0, &mut rng_from(9)).unwrap();
        for q in &points {
            assert!(s.contains(q).unwrap() || dist(&s.center, q) <= s.radius + 1e-9);
        }
        assert!((s.radius - dist(&points[0], &points[3]) / 2.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn meb_contains_every_point(
            raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..30),
            seed in 0u64..1000,
        ) {
            let points: Vec<Vec<f64>> = raw.iter().map(|&(a, b)| vec![a, b]).collect();
            let s = enclosing_sphere(&points, 1.0, &mut rng_from(seed)).unwrap();
            for p in &points {
                prop_assert!(dist(&s.center, p) <= s.radius + 1e-9);
            }
            prop_assert_eq!(s.coverage, 1.0);
        }

        #[test]
        fn fractional_coverage_encloses_enough(
            raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..40),
            q in 0.05f64..1.0,
            seed in 0u64..1000,
        ) {
            let points: Vec<Vec<f64>> = raw.iter().map(|&(a, b)| vec![a, b]).collect();
            let s = enclosing_sphere(&points, q, &mut rng_from(seed)).unwrap();
            let needed = (q * points.len() as f64).ceil() as usize;
            let inside = points.iter().filter(|p| dist(&s.center, p) <= s.radius + 1e-9).count();
            prop_assert!(inside >= needed, "{inside} < {needed}");
        }
    }
}
