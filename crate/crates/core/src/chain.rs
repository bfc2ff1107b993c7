//! Connectivity by chains with bounded steps.
//!
//! Two points share a component at scale `eps` when some chain between them
//! has every step `<= eps` (closed condition).

use std::collections::VecDeque;

use serde::Serialize;

use crate::metric::FiniteMetricSpace;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.sets -= 1;
        true
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }

    /// Sets as sorted index lists, ordered by smallest member.
    pub fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainPartition {
    pub scale: f64,
    pub components: Vec<Vec<usize>>,
}

impl ChainPartition {
    pub fn component_of(&self, i: usize) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.binary_search(&i).is_ok())
    }

    /// Every component of `self` sits inside one component of `coarser`.
    pub fn refines(&self, coarser: &ChainPartition) -> bool {
        self.components.iter().all(|c| {
            let home = coarser.component_of(c[0]);
            c.iter().all(|&i| coarser.component_of(i) == home)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainWitness {
    pub indices: Vec<usize>,
    pub max_step: f64,
}

/// Edges of the complete graph sorted by weight, so the partition at any
/// scale is a prefix of one Kruskal sweep.
#[derive(Debug, Clone)]
pub struct ScaleSweep {
    n: usize,
    edges: Vec<(f64, usize, usize)>,
}

impl ScaleSweep {
    pub fn new(x: &FiniteMetricSpace) -> Self {
        let n = x.len();
        let mut edges: Vec<(f64, usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (x.d(i, j), i, j))
            .collect();
        edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        Self { n, edges }
    }

    pub fn partition_at(&self, eps: f64) -> ChainPartition {
        let mut uf = UnionFind::new(self.n);
        for &(w, i, j) in &self.edges {
            if w > eps {
                break;
            }
            uf.union(i, j);
        }
        ChainPartition {
            scale: eps,
            components: uf.groups(),
        }
    }

    /// The weight of the edge that finally joins everything.
    pub fn connecting_scale(&self) -> f64 {
        let mut uf = UnionFind::new(self.n);
        if self.n <= 1 {
            return 0.0;
        }
        for &(w, i, j) in &self.edges {
            if uf.union(i, j) && uf.set_count() == 1 {
                return w;
            }
        }
        unreachable!("a complete graph is connected")
    }
}

pub fn components_at_scale(x: &FiniteMetricSpace, eps: f64) -> ChainPartition {
    ScaleSweep::new(x).partition_at(eps)
}

pub fn is_chain_connected(x: &FiniteMetricSpace, eps: f64) -> bool {
    components_at_scale(x, eps).components.len() == 1
}

/// Smallest `eps` at which the space is one component.
pub fn min_connecting_scale(x: &FiniteMetricSpace) -> f64 {
    ScaleSweep::new(x).connecting_scale()
}

/// A chain from `from` to `to` with steps `<= eps`, found by breadth-first
/// search with neighbours visited in index order. `None` if the two points
/// are in different components at this scale or an index is out of range.
pub fn chain_witness(
    x: &FiniteMetricSpace,
    from: usize,
    to: usize,
    eps: f64,
) -> Option<ChainWitness> {
    let n = x.len();
    if from >= n || to >= n {
        return None;
    }
    let mut prev = vec![usize::MAX; n];
    let mut queue = VecDeque::from([from]);
    prev[from] = from;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for u in 0..n {
            if prev[u] == usize::MAX && x.d(v, u) <= eps {
                prev[u] = v;
                queue.push_back(u);
            }
        }
    }
    if prev[to] == usize::MAX {
        return None;
    }
    let mut indices = vec![to];
    while *indices.last().unwrap() != from {
        let last = *indices.last().unwrap();
        indices.push(prev[last]);
    }
    indices.reverse();
    let max_step = indices
        .windows(2)
        .map(|w| x.d(w[0], w[1]))
        .fold(0.0, f64::max);
    Some(ChainWitness { indices, max_step })
}
