//! The subdominant ultrametric `u_X` and the quotient space `U(X)`.
//!
//! For a finite space the infimum over chains is a minimax path weight in the
//! complete graph, and the minimax path between two points runs along the
//! minimum spanning tree. So `u_X(a, b)` is the heaviest edge on the MST path
//! from `a` to `b`, and every value of `u_X` is one of the input distances.

use crate::error::{Error, Result};
use crate::exec::{map_indices, Exec};
use crate::metric::FiniteMetricSpace;

/// Default largest input accepted by [`minimax_closure_oracle`].
pub const DEFAULT_ORACLE_CAP: usize = 64;

/// `U(X)` together with the classes of input points merged into each point.
#[derive(Debug, Clone, PartialEq)]
pub struct UltrametricSpace {
    pub space: FiniteMetricSpace,
    /// One entry per point of `space`, listing input indices in ascending
    /// order. All singletons for a true metric and zero merge tolerance.
    pub source_classes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MstEdgeList {
    /// `(i, j, weight)` with `i < j`, in the order Prim added them.
    pub edges: Vec<(usize, usize, f64)>,
    pub max_weight: f64,
}

/// Dense Prim, `O(n^2)`. Ties go to the lexicographically smallest
/// `(min, max)` index pair, so the edge list is reproducible.
pub fn minimum_spanning_tree(x: &FiniteMetricSpace) -> MstEdgeList {
    let n = x.len();
    let mut in_tree = vec![false; n];
    // (weight, tree endpoint) of the cheapest known connection
    let mut best: Vec<(f64, usize)> = vec![(f64::INFINITY, usize::MAX); n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut max_weight = 0.0f64;

    let key = |v: usize, b: (f64, usize)| (b.0, b.1.min(v), b.1.max(v));
    let better = |a: (f64, usize, usize), b: (f64, usize, usize)| {
        a.0 < b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2))
    };

    in_tree[0] = true;
    for v in 1..n {
        best[v] = (x.d(0, v), 0);
    }
    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            match pick {
                Some(p) if !better(key(v, best[v]), key(p, best[p])) => {}
                _ => pick = Some(v),
            }
        }
        let v = pick.expect("n > 1 leaves a vertex outside the tree");
        let (w, parent) = best[v];
        in_tree[v] = true;
        edges.push((parent.min(v), parent.max(v), w));
        max_weight = max_weight.max(w);
        for u in 0..n {
            if !in_tree[u] {
                let cand = (x.d(v, u), v);
                if better(key(u, cand), key(u, best[u])) {
                    best[u] = cand;
                }
            }
        }
    }
    MstEdgeList { edges, max_weight }
}

/// Full `u_X` matrix (row-major) by one tree traversal per root.
pub fn subdominant_matrix(x: &FiniteMetricSpace, exec: Exec) -> Vec<f64> {
    let n = x.len();
    let mst = minimum_spanning_tree(x);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(i, j, w) in &mst.edges {
        adj[i].push((j, w));
        adj[j].push((i, w));
    }
    let rows = map_indices(exec, n, |root| {
        let mut row = vec![0.0f64; n];
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            for &(u, w) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    row[u] = row[v].max(w);
                    stack.push(u);
                }
            }
        }
        row
    });
    rows.into_iter().flatten().collect()
}

/// `U(X)` for a valid metric space, with no merging.
pub fn subdominant(x: &FiniteMetricSpace) -> UltrametricSpace {
    subdominant_with(x, 0.0, Exec::default())
}

/// `U(X)`, merging points whose `u` distance is at most `merge_tolerance`.
///
/// Since `u` is an ultrametric, `u <= tol` is an equivalence relation and the
/// distance between two classes does not depend on the representatives.
pub fn subdominant_with(
    x: &FiniteMetricSpace,
    merge_tolerance: f64,
    exec: Exec,
) -> UltrametricSpace {
    let n = x.len();
    let u = subdominant_matrix(x, exec);

    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (i..n)
            .filter(|&j| class_of[j] == usize::MAX && u[i * n + j] <= merge_tolerance)
            .collect();
        for &j in &members {
            class_of[j] = classes.len();
        }
        classes.push(members);
    }

    let k = classes.len();
    let labels = classes
        .iter()
        .map(|c| c.iter().map(|&i| x.label(i)).collect::<Vec<_>>().join("+"))
        .collect();
    let mut dist = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            if a != b {
                dist[a * k + b] = u[classes[a][0] * n + classes[b][0]];
            }
        }
    }
    UltrametricSpace {
        space: FiniteMetricSpace::from_raw(labels, dist, x.name().map(str::to_owned)),
        source_classes: classes,
    }
}

/// `diam U(X)`: the heaviest MST edge, 0 for a single point.
pub fn bottleneck(x: &FiniteMetricSpace) -> f64 {
    minimum_spanning_tree(x).max_weight
}

/// Minimax matrix by relaxing `u(i,j) <- min_k max(u(i,k), u(k,j))` from `d`
/// until nothing changes. Independent of the spanning-tree route; meant for
/// cross-checking [`subdominant`].
pub fn minimax_closure_oracle(x: &FiniteMetricSpace) -> Result<Vec<Vec<f64>>> {
    minimax_closure_oracle_capped(x, DEFAULT_ORACLE_CAP)
}

pub fn minimax_closure_oracle_capped(x: &FiniteMetricSpace, cap: usize) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    if n > cap {
        return Err(Error::Resource {
            what: "minimax oracle",
            requested: n,
            cap,
        });
    }
    let mut u = x.rows();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                let via = (0..n)
                    .map(|k| u[i][k].max(u[k][j]))
                    .fold(f64::INFINITY, f64::min);
                if via < u[i][j] {
                    u[i][j] = via;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(u);
        }
    }
}
