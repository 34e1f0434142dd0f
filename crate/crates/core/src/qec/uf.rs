//! Union-Find decoder: cluster growth by half-edges, spanning forest, peeling.
//!
//! Work units count half-edge growths, `find`/`union` calls and peeled edges.

use super::DecodingGraph;

/// Grown edges after clustering. `support[e] == 2` marks a fully grown edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterForest {
    pub support: Vec<u8>,
    pub sweeps: usize,
    pub work_units: u64,
}

impl ClusterForest {
    pub fn is_grown(&self, e: usize) -> bool {
        self.support[e] == 2
    }
}

struct Clusters {
    parent: Vec<usize>,
    size: Vec<usize>,
    odd: Vec<bool>,
    touches_boundary: Vec<bool>,
    frontier: Vec<Vec<usize>>,
    work: u64,
}

impl Clusters {
    fn find(&mut self, mut v: usize) -> usize {
        self.work += 1;
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        self.work += 1;
        let (big, small) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.odd[big] ^= self.odd[small];
        self.touches_boundary[big] |= self.touches_boundary[small];
        let moved = std::mem::take(&mut self.frontier[small]);
        self.frontier[big].extend(moved);
        big
    }

    fn is_active(&self, root: usize) -> bool {
        self.odd[root] && !self.touches_boundary[root]
    }
}

/// Grows every odd cluster by half an edge per sweep until none is left.
/// Clusters joined to the boundary vertex count as even.
pub fn grow_clusters(graph: &DecodingGraph, hot: &[usize]) -> ClusterForest {
    let n = graph.n_vertices();
    let boundary = graph.boundary();
    let mut cl = Clusters {
        parent: (0..n).collect(),
        size: vec![1; n],
        odd: vec![false; n],
        touches_boundary: vec![false; n],
        frontier: vec![Vec::new(); n],
        work: 0,
    };
    cl.touches_boundary[boundary] = true;
    for &v in hot {
        cl.odd[v] = true;
        cl.frontier[v].push(v);
    }
    let mut support = vec![0u8; graph.n_edges()];
    let mut active: Vec<usize> = hot.to_vec();
    let mut sweeps = 0;
    let mut fused = Vec::new();

    loop {
        let mut roots: Vec<usize> = active.iter().map(|&v| cl.find(v)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.retain(|&r| cl.is_active(r));
        if roots.is_empty() {
            break;
        }
        sweeps += 1;

        fused.clear();
        for &r in &roots {
            for &v in &cl.frontier[r] {
                for &e in graph.incident(v) {
                    if support[e] < 2 {
                        support[e] += 1;
                        cl.work += 1;
                        if support[e] == 2 {
                            fused.push(e);
                        }
                    }
                }
            }
        }

        for &e in &fused {
            let (u, w) = graph.endpoints(e);
            let (ru, rw) = (cl.find(u), cl.find(w));
            let root = if ru != rw { cl.union(ru, rw) } else { ru };
            for x in [u, w] {
                if x != boundary {
                    cl.frontier[root].push(x);
                }
            }
        }

        for &r in &roots {
            let r = cl.find(r);
            let mut f = std::mem::take(&mut cl.frontier[r]);
            f.sort_unstable();
            f.dedup();
            f.retain(|&v| graph.incident(v).iter().any(|&e| support[e] < 2));
            cl.frontier[r] = f;
        }
        active = roots;
    }

    ClusterForest {
        support,
        sweeps,
        work_units: cl.work,
    }
}

/// Tree edge discovered from `parent` towards `child`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeEdge {
    pub edge: usize,
    pub parent: usize,
    pub child: usize,
}

/// Depth-first spanning forest of the grown edges, in discovery order.
/// A tree that contains the boundary vertex is rooted there.
pub fn spanning_forest(graph: &DecodingGraph, forest: &ClusterForest) -> Vec<TreeEdge> {
    let n = graph.n_vertices();
    let mut visited = vec![false; n];
    let mut tree = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let starts = std::iter::once(graph.boundary()).chain(0..graph.boundary());
    for s in starts {
        if visited[s] || !graph.incident(s).iter().any(|&e| forest.is_grown(e)) {
            continue;
        }
        visited[s] = true;
        stack.push((s, 0));
        while let Some(top) = stack.last_mut() {
            let (v, i) = *top;
            let inc = graph.incident(v);
            if i == inc.len() {
                stack.pop();
                continue;
            }
            top.1 += 1;
            let e = inc[i];
            if !forest.is_grown(e) {
                continue;
            }
            let (a, b) = graph.endpoints(e);
            let w = if a == v { b } else { a };
            if !visited[w] {
                visited[w] = true;
                tree.push(TreeEdge { edge: e, parent: v, child: w });
                stack.push((w, 0));
            }
        }
    }
    tree
}

/// Peels leaves of `tree` (processed in reverse), returning the sorted
/// correction and the number of peeled edges.
pub fn peel(graph: &DecodingGraph, tree: &[TreeEdge], hot: &[usize]) -> (Vec<usize>, u64) {
    let mut is_hot = vec![false; graph.n_vertices()];
    for &v in hot {
        is_hot[v] = true;
    }
    let mut correction = Vec::new();
    for t in tree.iter().rev() {
        if is_hot[t.child] {
            correction.push(t.edge);
            is_hot[t.child] = false;
            is_hot[t.parent] ^= true;
        }
    }
    correction.sort_unstable();
    (correction, tree.len() as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub correction: Vec<usize>,
    pub work_units: u64,
    pub sweeps: usize,
}

pub fn decode(graph: &DecodingGraph, hot: &[usize]) -> Decoded {
    let forest = grow_clusters(graph, hot);
    let tree = spanning_forest(graph, &forest);
    let (correction, peeled) = peel(graph, &tree, hot);
    Decoded {
        correction,
        work_units: forest.work_units + peeled,
        sweeps: forest.sweeps,
    }
}
