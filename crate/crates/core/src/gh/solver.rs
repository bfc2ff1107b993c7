//! Exact `d_GH` by threshold search.
//!
//! Any distortion is one of the values `|d_X(i,i') - d_Y(j,j')|`, so the
//! optimum is the least candidate `c` for which some correspondence has all
//! pairs of pairs within `c`. Feasibility at a fixed `c` asks for a set of
//! pairwise compatible pairs covering every point of both spaces. It is
//! decided by depth-first search: always cover the point with the fewest
//! remaining candidate pairs, and once a candidate has been tried, drop it
//! from its later siblings.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use super::mask::{Mask, MASK_BITS};
use super::{diam_lower_bound, gh_upper_bound_trivial, Bound, Correspondence, GhLimits, GhResult};
use crate::exec::{map_slice, Exec};
use crate::metric::FiniteMetricSpace;

/// Largest `|X|*|Y|` the exact search accepts.
pub const MAX_SEARCH_PAIRS: usize = MASK_BITS;

/// Thresholds probed per round when running in parallel.
const PARALLEL_PROBES: usize = 3;

/// Nodes between clock reads.
const CLOCK_STRIDE: u64 = 1024;

enum Outcome {
    Feasible(Mask),
    Infeasible,
    Aborted,
}

struct Budget {
    nodes: AtomicU64,
    max_nodes: u64,
    deadline: Instant,
}

impl Budget {
    /// Counts one node; false once a cap is hit.
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.max_nodes {
            return false;
        }
        !n.is_multiple_of(CLOCK_STRIDE) || Instant::now() < self.deadline
    }
}

struct Search<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    /// Pair indices `i*m + j` grouped by X point.
    row: Vec<Mask>,
    /// Pair indices grouped by Y point.
    col: Vec<Mask>,
    /// Tie-break rank per point, X first then Y: larger eccentricity first.
    rank: Vec<usize>,
    budget: &'a Budget,
}

impl<'a> Search<'a> {
    fn new(x: &'a FiniteMetricSpace, y: &'a FiniteMetricSpace, budget: &'a Budget) -> Self {
        let (n, m) = (x.len(), y.len());
        let row = (0..n)
            .map(|i| (0..m).fold(Mask::EMPTY, |k, j| k.with(i * m + j)))
            .collect();
        let col = (0..m)
            .map(|j| (0..n).fold(Mask::EMPTY, |k, i| k.with(i * m + j)))
            .collect();

        let ecc = |s: &FiniteMetricSpace, i: usize| s.row(i).iter().copied().fold(0.0, f64::max);
        let mut points: Vec<(f64, usize)> = (0..n)
            .map(|i| (ecc(x, i), i))
            .chain((0..m).map(|j| (ecc(y, j), n + j)))
            .collect();
        points.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut rank = vec![0; n + m];
        for (r, &(_, p)) in points.iter().enumerate() {
            rank[p] = r;
        }
        Self {
            x,
            y,
            row,
            col,
            rank,
            budget,
        }
    }

    fn compatibility(&self, c: f64) -> Vec<Mask> {
        let (n, m) = (self.x.len(), self.y.len());
        (0..n * m)
            .map(|p| {
                let (i, j) = (p / m, p % m);
                let (dx, dy) = (self.x.row(i), self.y.row(j));
                let mut k = Mask::EMPTY;
                for q in 0..n * m {
                    if (dx[q / m] - dy[q % m]).abs() <= c {
                        k.set(q);
                    }
                }
                k
            })
            .collect()
    }

    fn feasible(&self, c: f64) -> Outcome {
        let (n, m) = (self.x.len(), self.y.len());
        let compat = self.compatibility(c);
        self.dfs(
            &compat,
            Mask::EMPTY,
            Mask::full(n * m),
            Mask::EMPTY,
            Mask::EMPTY,
        )
    }

    fn dfs(
        &self,
        compat: &[Mask],
        chosen: Mask,
        allowed: Mask,
        cov_x: Mask,
        cov_y: Mask,
    ) -> Outcome {
        if !self.budget.tick() {
            return Outcome::Aborted;
        }
        let (n, m) = (self.x.len(), self.y.len());

        // most constrained uncovered point: (candidates, rank, is_y, index)
        let mut best: Option<(u32, usize, bool, usize)> = None;
        let mut consider = |cands: Mask, rank: usize, is_y: bool, idx: usize| -> bool {
            let cnt = cands.count();
            if cnt == 0 {
                return false;
            }
            if best.is_none_or(|b| (cnt, rank) < (b.0, b.1)) {
                best = Some((cnt, rank, is_y, idx));
            }
            true
        };
        for i in 0..n {
            if !cov_x.get(i) && !consider(self.row[i].and(allowed), self.rank[i], false, i) {
                return Outcome::Infeasible;
            }
        }
        for j in 0..m {
            if !cov_y.get(j) && !consider(self.col[j].and(allowed), self.rank[n + j], true, j) {
                return Outcome::Infeasible;
            }
        }
        let Some((_, _, is_y, idx)) = best else {
            return Outcome::Feasible(chosen);
        };

        let cands = if is_y { self.col[idx] } else { self.row[idx] }.and(allowed);
        // pairs that also cover the other side's point go first
        let other_uncovered = |p: usize| {
            if is_y {
                !cov_x.get(p / m)
            } else {
                !cov_y.get(p % m)
            }
        };
        let order = cands
            .iter()
            .filter(|&p| other_uncovered(p))
            .chain(cands.iter().filter(|&p| !other_uncovered(p)));

        let mut allowed = allowed;
        for p in order {
            let (i, j) = (p / m, p % m);
            let mut cx = cov_x;
            let mut cy = cov_y;
            cx.set(i);
            cy.set(j);
            match self.dfs(compat, chosen.with(p), allowed.and(compat[p]), cx, cy) {
                Outcome::Infeasible => allowed.clear(p),
                done => return done,
            }
        }
        Outcome::Infeasible
    }
}

/// Every value `|a - b|` with `a` a distance of `X` and `b` one of `Y`,
/// sorted and deduplicated by exact equality.
fn candidate_thresholds(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Vec<f64> {
    let (dx, dy) = (x.distance_values(), y.distance_values());
    let mut c: Vec<f64> = dx
        .iter()
        .flat_map(|a| dy.iter().map(move |b| (a - b).abs()))
        .collect();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

fn mask_to_correspondence(mask: Mask, n: usize, m: usize) -> Correspondence {
    Correspondence::new(mask.iter().map(|p| (p / m, p % m)).collect(), n, m)
        .expect("search only accepts covering sets")
}

pub fn gh_exact(x: &FiniteMetricSpace, y: &FiniteMetricSpace, limits: &GhLimits) -> GhResult {
    gh_exact_with(x, y, limits, Exec::default())
}

/// Exact distance, or a certified interval if `limits` run out.
///
/// The value and witness do not depend on `exec`; the node count does, since
/// the parallel policy probes several thresholds per round.
pub fn gh_exact_with(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    limits: &GhLimits,
    exec: Exec,
) -> GhResult {
    let (n, m) = (x.len(), y.len());
    let diam_lb = diam_lower_bound(x, y);
    let trivial_ub = gh_upper_bound_trivial(x, y);
    let mut provenance = vec![
        Bound::new("diam", diam_lb),
        Bound::new("full_relation", trivial_ub),
    ];

    if n * m > MAX_SEARCH_PAIRS {
        provenance.push(Bound::new("search_skipped", (n * m) as f64));
        return GhResult {
            lower: diam_lb,
            upper: trivial_ub,
            exact: diam_lb == trivial_ub,
            witness: Some(Correspondence::full(n, m)),
            provenance,
            nodes_explored: 0,
            timed_out: diam_lb != trivial_ub,
        };
    }

    let cands = candidate_thresholds(x, y);
    // 2 * diam_lb is itself a candidate, so this lands on it exactly
    let mut lo = cands.partition_point(|&c| c < 2.0 * diam_lb);
    let mut hi = cands.len() - 1;
    let mut witness = Mask::full(n * m);
    let mut aborted = false;

    let budget = Budget {
        nodes: AtomicU64::new(0),
        max_nodes: limits.max_nodes,
        deadline: Instant::now() + limits.timeout,
    };
    let search = Search::new(x, y, &budget);
    let width = if exec.is_parallel() {
        PARALLEL_PROBES
    } else {
        1
    };

    while lo < hi && !aborted {
        let span = hi - lo;
        let mut probes: Vec<usize> = (1..=width).map(|t| lo + t * span / (width + 1)).collect();
        probes.dedup();
        let outcomes = map_slice(exec, &probes, |&k| search.feasible(cands[k]));
        for (&k, outcome) in probes.iter().zip(outcomes) {
            match outcome {
                Outcome::Infeasible => lo = lo.max(k + 1),
                Outcome::Feasible(w) => {
                    hi = k;
                    witness = w;
                    break;
                }
                Outcome::Aborted => aborted = true,
            }
        }
    }

    let exact = lo == hi;
    let (lower, upper) = (cands[lo] / 2.0, cands[hi] / 2.0);
    provenance.push(Bound::new("search_lower", lower));
    provenance.push(Bound::new("search_upper", upper));
    GhResult {
        lower,
        upper,
        exact,
        witness: Some(mask_to_correspondence(witness, n, m)),
        provenance,
        nodes_explored: budget.nodes.load(Ordering::Relaxed),
        timed_out: !exact,
    }
}
