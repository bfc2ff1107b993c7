//! Finite metric spaces, axiom validation and metric products.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_indices, Exec};

/// Absolute tolerance used when validating user-supplied matrices.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest point count a product (or other derived space) may have by default.
pub const DEFAULT_MAX_POINTS: usize = 4096;

/// A finite metric space: unique labels plus a symmetric distance matrix.
///
/// Values are immutable once built; every constructor that accepts outside
/// data checks the metric axioms first.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    name: Option<String>,
    labels: Vec<String>,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Builds a space from labels and matrix rows, rejecting anything that
    /// fails [`validate_metric`] at `tol`.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::input("a metric space needs at least one point"));
        }
        if labels.len() != n {
            return Err(Error::input(format!(
                "{} labels for a {n}x{n} matrix",
                labels.len()
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::input(format!("duplicate label {l:?}")));
            }
        }
        let report = validate_metric(&rows, tol)?;
        if !report.ok {
            return Err(Error::InvalidMetric(report));
        }
        let dist = rows.into_iter().flatten().collect();
        Ok(Self {
            name: None,
            labels,
            dist,
        })
    }

    /// Builds a space with labels `"0"`, `"1"`, ... at the default tolerance.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(labels, rows, DEFAULT_TOL)
    }

    /// Trusted constructor for matrices produced by this crate.
    pub(crate) fn from_raw(labels: Vec<String>, dist: Vec<f64>, name: Option<String>) -> Self {
        debug_assert_eq!(labels.len() * labels.len(), dist.len());
        Self { name, labels, dist }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn set_name(&mut self, name: Option<String>) {
        self.name = name;
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Row-major `n*n` distances.
    pub fn flat(&self) -> &[f64] {
        &self.dist
    }

    /// Distinct distance values (including 0), sorted ascending.
    pub fn distance_values(&self) -> Vec<f64> {
        let mut v = self.dist.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_metric(&self.rows(), tol).expect("stored matrices are square")
    }

    pub fn diameter(&self) -> f64 {
        diameter(self)
    }

    pub fn is_ultrametric(&self, tol: f64) -> bool {
        is_ultrametric(self, tol)
    }

    pub fn ultrametric_defect(&self) -> f64 {
        ultrametric_defect(self)
    }

    /// The subspace on `indices`, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::input("empty subspace"));
        }
        let mut seen = HashSet::new();
        for &i in indices {
            if i >= self.len() || !seen.insert(i) {
                return Err(Error::input(format!("bad subspace index {i}")));
            }
        }
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = indices
            .iter()
            .flat_map(|&i| indices.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .collect();
        Ok(Self::from_raw(labels, dist, None))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Asymmetry,
    Negative,
    Diagonal,
    Triangle,
    ZeroOffDiagonal,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Asymmetry => "asymmetry",
            ViolationKind::Negative => "negative",
            ViolationKind::Diagonal => "diagonal",
            ViolationKind::Triangle => "triangle",
            ViolationKind::ZeroOffDiagonal => "zero-off-diagonal",
        };
        f.write_str(s)
    }
}

/// One failed axiom.
///
/// `indices` is `[i, i]` for diagonal entries, `[i, j]` for pair checks and
/// `[i, j, k]` for a triangle violation of `d(i,j)` routed through `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub indices: Vec<usize>,
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.indices.as_slice() {
            [i, j, k] => write!(
                f,
                "{} at ({i},{j}) via {k}, magnitude {}",
                self.kind, self.magnitude
            ),
            [i, j] => write!(
                f,
                "{} at ({i},{j}), magnitude {}",
                self.kind, self.magnitude
            ),
            other => write!(
                f,
                "{} at {other:?}, magnitude {}",
                self.kind, self.magnitude
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort_by(|a, b| a.indices.cmp(&b.indices).then(a.kind.cmp(&b.kind)));
        Self {
            ok: violations.is_empty(),
            violations,
        }
    }
}

/// Checks every metric axiom on a square matrix, reporting each violation
/// larger than `tol`.
pub fn validate_metric(matrix: &[Vec<f64>], tol: f64) -> Result<ValidationReport> {
    validate_metric_with(matrix, tol, Exec::default())
}

pub fn validate_metric_with(matrix: &[Vec<f64>], tol: f64, exec: Exec) -> Result<ValidationReport> {
    let n = matrix.len();
    if let Some((i, row)) = matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::input(format!(
            "matrix is not square: row {i} has {} entries, expected {n}",
            row.len()
        )));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::input("tolerance must be nonnegative"));
    }
    if matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::input("matrix has a non-finite entry"));
    }

    let per_row = map_indices(exec, n, |i| {
        let mut out = Vec::new();
        let row = &matrix[i];
        if row[i].abs() > tol {
            out.push(Violation {
                kind: ViolationKind::Diagonal,
                indices: vec![i, i],
                magnitude: row[i].abs(),
            });
        }
        for j in 0..n {
            if j == i {
                continue;
            }
            let dij = row[j];
            if dij < -tol {
                out.push(Violation {
                    kind: ViolationKind::Negative,
                    indices: vec![i, j],
                    magnitude: -dij,
                });
            }
            if j < i {
                continue;
            }
            let asym = (dij - matrix[j][i]).abs();
            if asym > tol {
                out.push(Violation {
                    kind: ViolationKind::Asymmetry,
                    indices: vec![i, j],
                    magnitude: asym,
                });
            }
            if dij.abs() <= tol {
                out.push(Violation {
                    kind: ViolationKind::ZeroOffDiagonal,
                    indices: vec![i, j],
                    magnitude: dij.abs(),
                });
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let excess = dij - (row[k] + matrix[k][j]);
                if excess > tol {
                    out.push(Violation {
                        kind: ViolationKind::Triangle,
                        indices: vec![i, j, k],
                        magnitude: excess,
                    });
                }
            }
        }
        out
    });
    Ok(ValidationReport::from_violations(
        per_row.into_iter().flatten().collect(),
    ))
}

/// `d(x,z) <= max(d(x,y), d(y,z)) + tol` for all triples.
pub fn is_ultrametric(x: &FiniteMetricSpace, tol: f64) -> bool {
    let n = x.len();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let dij = x.d(i, j);
            (0..n).all(|k| x.d(i, k) <= dij.max(x.d(j, k)) + tol)
        })
    })
}

/// Largest amount by which any triple breaks the ultrametric inequality,
/// clamped at zero.
pub fn ultrametric_defect(x: &FiniteMetricSpace) -> f64 {
    let n = x.len();
    let rows = map_indices(Exec::default(), n, |i| {
        let mut worst = 0.0f64;
        for j in 0..n {
            let dij = x.d(i, j);
            for k in 0..n {
                worst = worst.max(x.d(i, k) - dij.max(x.d(j, k)));
            }
        }
        worst
    });
    rows.into_iter().fold(0.0, f64::max)
}

pub fn diameter(x: &FiniteMetricSpace) -> f64 {
    x.flat().iter().copied().fold(0.0, f64::max)
}

/// Norm used to combine factor distances in a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductNorm {
    L1,
    LInf,
}

impl ProductNorm {
    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            ProductNorm::L1 => a + b,
            ProductNorm::LInf => a.max(b),
        }
    }
}

/// Row-major index of the pair `(i, j)` in a product whose right factor has
/// `m` points.
#[inline]
pub fn pair_index(i: usize, j: usize, m: usize) -> usize {
    i * m + j
}

/// `X x Y` with the given norm; labels are `"x|y"` in row-major pair order.
pub fn product(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    norm: ProductNorm,
    max_points: usize,
) -> Result<FiniteMetricSpace> {
    let (n, m) = (x.len(), y.len());
    let size = n.saturating_mul(m);
    if size > max_points {
        return Err(Error::Resource {
            what: "product space",
            requested: size,
            cap: max_points,
        });
    }
    let labels = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| format!("{}|{}", x.label(i), y.label(j)))
        .collect();
    let rows = map_indices(Exec::default(), size, |p| {
        let (i, j) = (p / m, p % m);
        (0..size)
            .map(|q| norm.combine(x.d(i, q / m), y.d(j, q % m)))
            .collect::<Vec<_>>()
    });
    Ok(FiniteMetricSpace::from_raw(
        labels,
        rows.into_iter().flatten().collect(),
        None,
    ))
}

pub fn product_l1(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    product(x, y, ProductNorm::L1, DEFAULT_MAX_POINTS)
}

pub fn product_linf(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    product(x, y, ProductNorm::LInf, DEFAULT_MAX_POINTS)
}

/// An arbitrary metric on the pair set of `left x right`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMetricTable {
    left: FiniteMetricSpace,
    right: FiniteMetricSpace,
    rho: Vec<f64>,
}

impl ProductMetricTable {
    pub fn new(
        left: FiniteMetricSpace,
        right: FiniteMetricSpace,
        rho: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let size = left.len() * right.len();
        if rho.len() != size || rho.iter().any(|r| r.len() != size) {
            return Err(Error::input(format!(
                "product table must be {size}x{size} for factors of size {} and {}",
                left.len(),
                right.len()
            )));
        }
        Ok(Self {
            left,
            right,
            rho: rho.into_iter().flatten().collect(),
        })
    }

    pub fn from_norm(
        left: FiniteMetricSpace,
        right: FiniteMetricSpace,
        norm: ProductNorm,
    ) -> Result<Self> {
        let space = product(&left, &right, norm, DEFAULT_MAX_POINTS)?;
        Ok(Self {
            left,
            right,
            rho: space.flat().to_vec(),
        })
    }

    pub fn left(&self) -> &FiniteMetricSpace {
        &self.left
    }

    pub fn right(&self) -> &FiniteMetricSpace {
        &self.right
    }

    pub fn size(&self) -> usize {
        self.left.len() * self.right.len()
    }

    #[inline]
    pub fn rho(&self, p: usize, q: usize) -> f64 {
        self.rho[p * self.size() + q]
    }

    /// Restrictions to every slice `X x {y}` and `{x} x Y` reproduce the
    /// factor metrics.
    pub fn check_fair(&self, tol: f64) -> bool {
        let (n, m) = (self.left.len(), self.right.len());
        let x_slices = (0..m).all(|j| {
            (0..n).all(|i| {
                (0..n).all(|i2| {
                    let r = self.rho(pair_index(i, j, m), pair_index(i2, j, m));
                    (r - self.left.d(i, i2)).abs() <= tol
                })
            })
        });
        x_slices
            && (0..n).all(|i| {
                (0..m).all(|j| {
                    (0..m).all(|j2| {
                        let r = self.rho(pair_index(i, j, m), pair_index(i, j2, m));
                        (r - self.right.d(j, j2)).abs() <= tol
                    })
                })
            })
    }

    /// `rho(p, p') >= max(d_X(x,x'), d_Y(y,y'))` pointwise.
    pub fn check_dominates_linf(&self, tol: f64) -> bool {
        let m = self.right.len();
        let size = self.size();
        (0..size).all(|p| {
            (0..size).all(|q| {
                let linf = self.left.d(p / m, q / m).max(self.right.d(p % m, q % m));
                self.rho(p, q) + tol >= linf
            })
        })
    }

    /// The pair set with `rho` as a validated metric space.
    pub fn to_space(&self, tol: f64) -> Result<FiniteMetricSpace> {
        let m = self.right.len();
        let labels = (0..self.size())
            .map(|p| format!("{}|{}", self.left.label(p / m), self.right.label(p % m)))
            .collect();
        let rows = self.rho.chunks(self.size()).map(<[f64]>::to_vec).collect();
        FiniteMetricSpace::new(labels, rows, tol)
    }
}
