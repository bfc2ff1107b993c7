//! Kuratowski embedding into a sup-norm coordinate space and the sampled
//! segment space `D_t(X)`.

use std::collections::HashMap;

use crate::chain::is_chain_connected;
use crate::error::{Error, Result};
use crate::exec::{map_indices, Exec};
use crate::gh::Correspondence;
use crate::metric::{FiniteMetricSpace, DEFAULT_MAX_POINTS};

/// Slack added to the step when testing chain connectivity of a sample.
pub const CONNECT_SLACK: f64 = 1e-12;

/// Row `i` is `d(x_i, .) - d(x_0, .)`; sup-norm distance between rows equals
/// the original distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub coords: Vec<Vec<f64>>,
    pub basepoint: usize,
}

impl Embedding {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        sup_distance(&self.coords[i], &self.coords[j])
    }
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn embed(x: &FiniteMetricSpace, basepoint: usize) -> Result<Embedding> {
    if basepoint >= x.len() {
        return Err(Error::input(format!("basepoint {basepoint} out of range")));
    }
    let base = x.row(basepoint);
    let coords = (0..x.len())
        .map(|i| x.row(i).iter().zip(base).map(|(d, b)| d - b).collect())
        .collect();
    Ok(Embedding { coords, basepoint })
}

/// Where a sampled point came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    Original(usize),
    /// `(1 - s) * Phi(x_from) + s * Phi(x_to)` with `from < to`.
    Segment {
        from: usize,
        to: usize,
        s: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledDt {
    pub space: FiniteMetricSpace,
    pub coords: Vec<Vec<f64>>,
    pub origins: Vec<Origin>,
    pub t: f64,
    pub step: f64,
}

pub fn sample_dt(x: &FiniteMetricSpace, t: f64, step: f64) -> Result<SampledDt> {
    sample_dt_with(x, t, step, 0, DEFAULT_MAX_POINTS, Exec::default())
}

/// Embeds `x`, then samples the straight segment between every pair at
/// distance `<= t` at parameters `k / ceil(d / step)`, so consecutive samples
/// are at most `step` apart. Coincident samples are kept once.
///
/// Points are ordered originals first, then by segment `(from, to)`, then by
/// parameter.
pub fn sample_dt_with(
    x: &FiniteMetricSpace,
    t: f64,
    step: f64,
    basepoint: usize,
    max_points: usize,
    exec: Exec,
) -> Result<SampledDt> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::input(format!(
            "t must be a nonnegative number, got {t}"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::input(format!("step must be positive, got {step}")));
    }
    let emb = embed(x, basepoint)?;
    let n = x.len();

    let mut planned = n;
    for i in 0..n {
        for j in i + 1..n {
            let d = x.d(i, j);
            if d <= t {
                planned += (d / step).ceil() as usize - 1;
            }
        }
    }
    if planned > max_points {
        return Err(Error::Resource {
            what: "sampled D_t",
            requested: planned,
            cap: max_points,
        });
    }

    let mut coords = emb.coords.clone();
    let mut origins: Vec<Origin> = (0..n).map(Origin::Original).collect();
    let mut labels: Vec<String> = x.labels().to_vec();
    let mut seen: HashMap<Vec<u64>, usize> = coords
        .iter()
        .enumerate()
        .map(|(i, c)| (bit_key(c), i))
        .collect();

    for i in 0..n {
        for j in i + 1..n {
            let d = x.d(i, j);
            if d > t {
                continue;
            }
            let parts = (d / step).ceil() as usize;
            for k in 1..parts {
                let s = k as f64 / parts as f64;
                let c: Vec<f64> = emb.coords[i]
                    .iter()
                    .zip(&emb.coords[j])
                    .map(|(a, b)| (1.0 - s) * a + s * b)
                    .collect();
                let key = bit_key(&c);
                if seen.contains_key(&key) {
                    continue;
                }
                seen.insert(key, coords.len());
                labels.push(format!("{}~{}@{k}/{parts}", x.label(i), x.label(j)));
                origins.push(Origin::Segment { from: i, to: j, s });
                coords.push(c);
            }
        }
    }

    let total = coords.len();
    let rows = map_indices(exec, total, |a| {
        (0..total)
            .map(|b| sup_distance(&coords[a], &coords[b]))
            .collect::<Vec<_>>()
    });
    let space = FiniteMetricSpace::from_raw(
        labels,
        rows.into_iter().flatten().collect(),
        x.name().map(|nm| format!("D_{t}({nm})")),
    );
    Ok(SampledDt {
        space,
        coords,
        origins,
        t,
        step,
    })
}

// +0.0 and -0.0 compare equal as coordinates
fn bit_key(c: &[f64]) -> Vec<u64> {
    c.iter().map(|v| (v + 0.0).to_bits()).collect()
}

/// Relates every sampled point `q` to each original `x` with
/// `|Phi(x) q| <= t/2`. Every sample on a segment is within half its length
/// of the nearer endpoint, so that endpoint is always included.
pub fn dt_correspondence(x: &FiniteMetricSpace, dt: &SampledDt) -> Result<Correspondence> {
    let n = x.len();
    if dt.space.len() < n || dt.origins.len() != dt.space.len() {
        return Err(Error::input("sample was not built from this space"));
    }
    let half = dt.t / 2.0;
    let mut pairs = Vec::new();
    for (q, origin) in dt.origins.iter().enumerate() {
        match *origin {
            Origin::Original(i) => pairs.push((i, q)),
            Origin::Segment { from, to, s } => pairs.push((if s <= 0.5 { from } else { to }, q)),
        }
        for i in 0..n {
            if dt.space.d(i, q) <= half {
                pairs.push((i, q));
            }
        }
    }
    Correspondence::new(pairs, n, dt.space.len())
}

/// Whether the sample of `D_c(X)` at spacing `step` is `step`-chain
/// connected. Holds whenever `c` is at least the bottleneck of `X`.
pub fn dt_connectivity_check(x: &FiniteMetricSpace, c: f64, step: f64) -> Result<bool> {
    let dt = sample_dt(x, c, step)?;
    Ok(is_chain_connected(&dt.space, step + CONNECT_SLACK))
}
