//! Deterministic instance generators.
//!
//! Random generators use `ChaCha8Rng` from `rand_chacha` 0.9 seeded with
//! `seed_from_u64`; the stream is stable for a pinned crate version, so the
//! same seed always produces the same space.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, DEFAULT_TOL};

pub type SpaceRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SpaceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The one-point space.
pub fn one_point() -> FiniteMetricSpace {
    FiniteMetricSpace::from_raw(vec!["0".into()], vec![0.0], Some("point".into()))
}

/// Points on the real line with `|a - b|` distances, labelled by value.
pub fn line_points(points: &[f64]) -> Result<FiniteMetricSpace> {
    if points.is_empty() {
        return Err(Error::input("no points"));
    }
    let labels = points.iter().map(|p| p.to_string()).collect();
    let rows = points
        .iter()
        .map(|a| points.iter().map(|b| (a - b).abs()).collect())
        .collect();
    FiniteMetricSpace::new(labels, rows, DEFAULT_TOL)
}

/// `{0, step, 2*step, ..., length}`; the last gap is shorter when `step`
/// does not divide `length`.
pub fn grid_segment(length: f64, step: f64) -> Result<FiniteMetricSpace> {
    if !(length > 0.0 && length.is_finite()) || step.is_nan() || step <= 0.0 || step > length {
        return Err(Error::input(format!(
            "grid needs 0 < step <= length, got length {length}, step {step}"
        )));
    }
    let mut m = (length / step).ceil() as usize;
    // multiples of step that land on (or round to) length are dropped
    while m > 1 && (m - 1) as f64 * step >= length - 1e-9 * step {
        m -= 1;
    }
    let mut pts: Vec<f64> = (0..m).map(|k| k as f64 * step).collect();
    pts.push(length);
    Ok(line_points(&pts)?.with_name(format!("grid(length={length},step={step})")))
}

/// `{p, p^2, ..., p^count}` on the line.
pub fn geometric_progression(ratio: f64, count: usize) -> Result<FiniteMetricSpace> {
    if !(ratio > 1.0 && ratio.is_finite()) || count == 0 {
        return Err(Error::input(format!(
            "geometric progression needs ratio > 1 and count >= 1, got {ratio}, {count}"
        )));
    }
    let pts: Vec<f64> = (1..=count as i32).map(|k| ratio.powi(k)).collect();
    Ok(line_points(&pts)?.with_name(format!("geomprog(p={ratio},n={count})")))
}

/// Vertices of a regular `n`-gon inscribed in a circle of radius `radius`,
/// with chord distances `2R sin(pi k / n)`.
pub fn polygon_vertices(n: usize, radius: f64) -> Result<FiniteMetricSpace> {
    if n == 0 || !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::input(format!(
            "polygon needs n >= 1 and radius > 0, got {n}, {radius}"
        )));
    }
    let chord = |i: usize, j: usize| {
        let k = i.abs_diff(j);
        let k = k.min(n - k);
        if k == 0 {
            0.0
        } else {
            2.0 * radius * (std::f64::consts::PI * k as f64 / n as f64).sin()
        }
    };
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let dist = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| chord(i, j))
        .collect();
    Ok(FiniteMetricSpace::from_raw(
        labels,
        dist,
        Some(format!("polygon(n={n},radius={radius})")),
    ))
}

/// `n` points drawn uniformly from `[0,1)^dim`.
pub fn random_points(n: usize, dim: usize, rng: &mut SpaceRng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}

/// Euclidean distances between the given points, labelled `p0, p1, ...`.
pub fn euclidean_space(points: &[Vec<f64>]) -> Result<FiniteMetricSpace> {
    let n = points.len();
    if n == 0 {
        return Err(Error::input("no points"));
    }
    let euclid = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclid(&points[i], &points[j]);
            if d == 0.0 {
                return Err(Error::input(format!("points {i} and {j} coincide")));
            }
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    Ok(FiniteMetricSpace::from_raw(labels, dist, None))
}

pub fn random_euclidean(n: usize, dim: usize, seed: u64) -> Result<FiniteMetricSpace> {
    if n == 0 || dim == 0 {
        return Err(Error::input("random_euclidean needs n >= 1 and dim >= 1"));
    }
    let mut rng = rng_from_seed(seed);
    let pts = random_points(n, dim, &mut rng);
    Ok(euclidean_space(&pts)?.with_name(format!("random(n={n},dim={dim},seed={seed})")))
}

/// Cophenetic distances of a random binary merge tree.
///
/// Merge heights are distinct multiples of 1/8, so every distance is exact
/// and no two merges tie.
pub fn random_ultrametric(n: usize, seed: u64) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::input("random_ultrametric needs n >= 1"));
    }
    let mut rng = rng_from_seed(seed);
    Ok(random_ultrametric_with(n, &mut rng).with_name(format!("ultra-random(n={n},seed={seed})")))
}

pub fn random_ultrametric_with(n: usize, rng: &mut SpaceRng) -> FiniteMetricSpace {
    let mut heights: Vec<u32> = (1..=(4 * n as u32).max(1)).collect();
    heights.shuffle(rng);
    heights.truncate(n.saturating_sub(1));
    heights.sort_unstable();

    let mut dist = vec![0.0; n * n];
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for h in heights {
        let h = f64::from(h) / 8.0;
        let a = rng.random_range(0..clusters.len());
        let mut b = rng.random_range(0..clusters.len() - 1);
        if b >= a {
            b += 1;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let moved = clusters.swap_remove(hi);
        for &i in &clusters[lo] {
            for &j in &moved {
                dist[i * n + j] = h;
                dist[j * n + i] = h;
            }
        }
        clusters[lo].extend(moved);
    }
    let labels = (0..n).map(|i| format!("u{i}")).collect();
    FiniteMetricSpace::from_raw(labels, dist, None)
}
