#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use ultragh::generators::{
    euclidean_space, random_points, random_ultrametric_with, rng_from_seed, SpaceRng,
};
use ultragh::gh::enumerate_correspondences;
use ultragh::metric::{pair_index, FiniteMetricSpace, ProductMetricTable};

pub fn rng(seed: u64) -> SpaceRng {
    rng_from_seed(seed)
}

/// Shortest-path closure of random weights in {1/4, ..., 2}; exact in
/// floating point since every value is a small dyadic rational.
pub fn random_graph_metric(rng: &mut SpaceRng, n: usize) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = f64::from(rng.random_range(1..=8u32)) / 4.0;
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    floyd_warshall(&mut d);
    FiniteMetricSpace::from_rows(d).unwrap()
}

pub fn floyd_warshall(d: &mut [Vec<f64>]) {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
}

/// Distinct small integers on the line, scaled by 1/4.
pub fn random_dyadic_line(rng: &mut SpaceRng, n: usize) -> FiniteMetricSpace {
    let mut pts: Vec<u32> = Vec::new();
    while pts.len() < n {
        let p = rng.random_range(0..(6 * n as u32).max(2));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let rows = pts
        .iter()
        .map(|&a| {
            pts.iter()
                .map(|&b| f64::from(a.abs_diff(b)) / 4.0)
                .collect()
        })
        .collect();
    FiniteMetricSpace::from_rows(rows).unwrap()
}

pub fn random_euclid(rng: &mut SpaceRng, n: usize) -> FiniteMetricSpace {
    let dim = rng.random_range(1..=3);
    euclidean_space(&random_points(n, dim, rng)).unwrap()
}

/// A random space of size `n` from one of four families.
pub fn random_space(rng: &mut SpaceRng, n: usize) -> FiniteMetricSpace {
    match rng.random_range(0..4) {
        0 => random_euclid(rng, n),
        1 => random_ultrametric_with(n, rng),
        2 => random_graph_metric(rng, n),
        _ => random_dyadic_line(rng, n),
    }
}

/// A random space whose distances are all small dyadic rationals.
pub fn random_dyadic_space(rng: &mut SpaceRng, n: usize) -> FiniteMetricSpace {
    match rng.random_range(0..3) {
        0 => random_ultrametric_with(n, rng),
        1 => random_graph_metric(rng, n),
        _ => random_dyadic_line(rng, n),
    }
}

/// Fair product metric dominating l-infinity: l-infinity plus random upward
/// dyadic bumps on off-slice pairs, then shortest-path closure. Returns the
/// table and how many entries ended strictly above l-infinity.
pub fn random_fair_table(
    rng: &mut SpaceRng,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> (ProductMetricTable, usize) {
    let (n, m) = (x.len(), y.len());
    let size = n * m;
    let mut rho = vec![vec![0.0; size]; size];
    for p in 0..size {
        for q in p + 1..size {
            let (i, j, i2, j2) = (p / m, p % m, q / m, q % m);
            let mut v = x.d(i, i2).max(y.d(j, j2));
            if i != i2 && j != j2 {
                v += f64::from(rng.random_range(0..=8u32)) / 8.0;
            }
            rho[p][q] = v;
            rho[q][p] = v;
        }
    }
    floyd_warshall(&mut rho);
    let above = (0..size)
        .flat_map(|p| (0..size).map(move |q| (p, q)))
        .filter(|&(p, q)| rho[p][q] > x.d(p / m, q / m).max(y.d(p % m, q % m)))
        .count();
    debug_assert_eq!(pair_index(n - 1, m - 1, m), size - 1);
    (
        ProductMetricTable::new(x.clone(), y.clone(), rho).unwrap(),
        above,
    )
}

/// `min dis R / 2` over every correspondence.
pub fn brute_force_gh(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    enumerate_correspondences(x.len(), y.len())
        .unwrap()
        .map(|r| r.distortion(x, y).unwrap())
        .fold(f64::INFINITY, f64::min)
        / 2.0
}

/// `sup_a inf_b` by direct double loop.
pub fn brute_force_hausdorff(s: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for &p in a {
        let mut near = f64::INFINITY;
        for &q in b {
            near = near.min(s.d(p, q));
        }
        best = best.max(near);
    }
    for &q in b {
        let mut near = f64::INFINITY;
        for &p in a {
            near = near.min(s.d(p, q));
        }
        best = best.max(near);
    }
    best
}
