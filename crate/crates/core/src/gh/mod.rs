//! Relations, distortion and the Gromov–Hausdorff distance between finite
//! metric spaces.
//!
//! For finite spaces `2 d_GH(X, Y)` is the least distortion of a
//! correspondence, and that minimum is attained. [`gh_exact`] finds it by
//! searching over the finitely many values a distortion can take.

mod mask;
mod solver;

use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{diameter, pair_index, FiniteMetricSpace};
use crate::ultra::subdominant;

pub use solver::{gh_exact, gh_exact_with, MAX_SEARCH_PAIRS};

/// Largest `|X|*|Y|` accepted by [`enumerate_correspondences`].
pub const ENUMERATION_CAP: usize = 12;

/// A relation between `X` and `Y` whose projections onto both factors are
/// onto. Pairs are stored sorted and without repeats.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
    n_x: usize,
    n_y: usize,
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>, n_x: usize, n_y: usize) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        let mut hit_x = vec![false; n_x];
        let mut hit_y = vec![false; n_y];
        for &(i, j) in &pairs {
            if i >= n_x || j >= n_y {
                return Err(Error::input(format!("pair ({i},{j}) out of range")));
            }
            hit_x[i] = true;
            hit_y[j] = true;
        }
        if let Some(i) = hit_x.iter().position(|h| !h) {
            return Err(Error::input(format!(
                "point {i} of X is not related to anything"
            )));
        }
        if let Some(j) = hit_y.iter().position(|h| !h) {
            return Err(Error::input(format!(
                "point {j} of Y is not related to anything"
            )));
        }
        Ok(Self { pairs, n_x, n_y })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            pairs: (0..n).map(|i| (i, i)).collect(),
            n_x: n,
            n_y: n,
        }
    }

    /// All of `X x Y`.
    pub fn full(n_x: usize, n_y: usize) -> Self {
        Self {
            pairs: (0..n_x)
                .flat_map(|i| (0..n_y).map(move |j| (i, j)))
                .collect(),
            n_x,
            n_y,
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.n_x, self.n_y)
    }

    pub fn inverse(&self) -> Self {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(i, j)| (j, i)).collect();
        pairs.sort_unstable();
        Self {
            pairs,
            n_x: self.n_y,
            n_y: self.n_x,
        }
    }

    pub fn distortion(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
        if x.len() != self.n_x || y.len() != self.n_y {
            return Err(Error::input(
                "correspondence does not match the spaces' sizes",
            ));
        }
        distortion(&self.pairs, x, y)
    }

    pub fn label_pairs(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Vec<[String; 2]> {
        self.pairs
            .iter()
            .map(|&(i, j)| [x.label(i).to_owned(), y.label(j).to_owned()])
            .collect()
    }
}

/// `max | d_X(x,x') - d_Y(y,y') |` over all pairs of related pairs.
pub fn distortion(
    rel: &[(usize, usize)],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<f64> {
    if rel.is_empty() {
        return Err(Error::input("distortion of an empty relation"));
    }
    if let Some(&(i, j)) = rel.iter().find(|&&(i, j)| i >= x.len() || j >= y.len()) {
        return Err(Error::input(format!("pair ({i},{j}) out of range")));
    }
    let mut worst = 0.0f64;
    for (a, &(i, j)) in rel.iter().enumerate() {
        for &(i2, j2) in &rel[a..] {
            worst = worst.max((x.d(i, i2) - y.d(j, j2)).abs());
        }
    }
    Ok(worst)
}

/// Hausdorff distance between two nonempty index sets of one space.
pub fn hausdorff(ambient: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::input("hausdorff distance needs nonempty sets"));
    }
    let n = ambient.len();
    if let Some(&i) = a.iter().chain(b).find(|&&i| i >= n) {
        return Err(Error::input(format!("index {i} out of range")));
    }
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&p| {
                to.iter()
                    .map(|&q| ambient.d(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Every correspondence between spaces of sizes `n_x` and `n_y`, in order of
/// the bitmask over row-major pairs. Exponential; capped at
/// [`ENUMERATION_CAP`] pairs.
pub fn enumerate_correspondences(
    n_x: usize,
    n_y: usize,
) -> Result<impl Iterator<Item = Correspondence>> {
    let size = n_x * n_y;
    if size > ENUMERATION_CAP {
        return Err(Error::Resource {
            what: "correspondence enumeration",
            requested: size,
            cap: ENUMERATION_CAP,
        });
    }
    if size == 0 {
        return Err(Error::input("spaces must be nonempty"));
    }
    let row_mask = move |i: usize| ((1u32 << n_y) - 1) << (i * n_y);
    let col_mask = move |j: usize| (0..n_x).fold(0u32, |m, i| m | 1 << (i * n_y + j));
    Ok((1u32..1 << size).filter_map(move |bits| {
        let covers =
            (0..n_x).all(|i| bits & row_mask(i) != 0) && (0..n_y).all(|j| bits & col_mask(j) != 0);
        covers.then(|| Correspondence {
            pairs: (0..size)
                .filter(|p| bits >> p & 1 == 1)
                .map(|p| (p / n_y, p % n_y))
                .collect(),
            n_x,
            n_y,
        })
    }))
}

/// `{((x,a),(y,a)) : (x,y) in R, a in A}` between `X x A` and `Y x A`, using
/// the row-major pair indices of [`crate::metric::product`].
pub fn product_correspondence(r: &Correspondence, a: &FiniteMetricSpace) -> Correspondence {
    let k = a.len();
    let mut pairs: Vec<_> = r
        .pairs
        .iter()
        .flat_map(|&(i, j)| (0..k).map(move |t| (pair_index(i, t, k), pair_index(j, t, k))))
        .collect();
    pairs.sort_unstable();
    Correspondence {
        pairs,
        n_x: r.n_x * k,
        n_y: r.n_y * k,
    }
}

/// Caps for the exact search. Hitting either one yields a certified interval
/// instead of an exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhLimits {
    pub max_nodes: u64,
    pub timeout: Duration,
}

impl Default for GhLimits {
    fn default() -> Self {
        Self {
            max_nodes: 10_000_000,
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    #[serde(rename = "bound")]
    pub name: String,
    pub value: f64,
}

impl Bound {
    fn new(name: &str, value: f64) -> Self {
        Self {
            name: name.to_owned(),
            value,
        }
    }
}

/// Outcome of a distance computation: `lower <= d_GH <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhResult {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    /// A correspondence of distortion exactly `2 * upper`.
    pub witness: Option<Correspondence>,
    pub provenance: Vec<Bound>,
    pub nodes_explored: u64,
    pub timed_out: bool,
}

impl GhResult {
    /// The distance when it is known exactly.
    pub fn value(&self) -> Option<f64> {
        self.exact.then_some(self.upper)
    }

    pub fn report(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> GhReport {
        GhReport {
            lower: self.lower,
            upper: self.upper,
            exact: self.exact,
            witness: self.witness.as_ref().map(|w| w.label_pairs(x, y)),
            provenance: self.provenance.clone(),
            nodes: self.nodes_explored,
            timed_out: self.timed_out,
        }
    }
}

/// JSON shape of a [`GhResult`], with the witness written as label pairs.
#[derive(Debug, Clone, Serialize)]
pub struct GhReport {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    pub witness: Option<Vec<[String; 2]>>,
    pub provenance: Vec<Bound>,
    pub nodes: u64,
    pub timed_out: bool,
}

/// `|diam X - diam Y| / 2`.
pub fn diam_lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    (diameter(x) - diameter(y)).abs() / 2.0
}

/// Half the distortion of the full relation `X x Y`, which is
/// `max(diam X, diam Y) / 2`.
pub fn gh_upper_bound_trivial(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    diameter(x).max(diameter(y)) / 2.0
}

/// Certified lower bounds on `d_GH(X, Y)`.
///
/// `"diam"` is the diameter gap. `"ultra"` is `d_GH(U(X), U(Y))`, which never
/// exceeds `d_GH(X, Y)`; if the nested search on the ultrametric images runs
/// out of budget its certified lower end is reported as `"ultra_partial"`.
pub fn gh_lower_bounds(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    limits: &GhLimits,
) -> Vec<Bound> {
    let mut out = vec![Bound::new("diam", diam_lower_bound(x, y))];
    let (ux, uy) = (subdominant(x).space, subdominant(y).space);
    let nested = gh_exact(&ux, &uy, limits);
    match nested.value() {
        Some(v) => out.push(Bound::new("ultra", v)),
        None => out.push(Bound::new(
            "ultra_partial",
            nested.lower.max(diam_lower_bound(&ux, &uy)),
        )),
    }
    out
}

/// Bounds only, without the exact search on `(X, Y)` itself.
pub fn gh_bounds(x: &FiniteMetricSpace, y: &FiniteMetricSpace, limits: &GhLimits) -> GhResult {
    let mut provenance = gh_lower_bounds(x, y, limits);
    let lower = provenance.iter().map(|b| b.value).fold(0.0, f64::max);
    let upper = gh_upper_bound_trivial(x, y);
    provenance.push(Bound::new("full_relation", upper));
    GhResult {
        lower,
        upper,
        exact: lower == upper,
        witness: Some(Correspondence::full(x.len(), y.len())),
        provenance,
        nodes_explored: 0,
        timed_out: false,
    }
}
