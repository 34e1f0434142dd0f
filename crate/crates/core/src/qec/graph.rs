use crate::error::Result;

use super::SurfaceCodeLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Flip of the data qubit at `(row, col)` during `round`.
    Data { row: usize, col: usize, round: usize },
    /// Faulty readout of `ancilla` in `round`, joining it to the next round.
    Measurement { ancilla: usize, round: usize },
}

/// Space-time decoding graph for the X-ancillas, with one virtual boundary
/// vertex shared by the left and right rough edges.
///
/// Vertex `t·A + i` is ancilla `i` in round `t`; the boundary vertex comes last.
#[derive(Debug, Clone)]
pub struct DecodingGraph {
    d: usize,
    rounds: usize,
    per_round: usize,
    edges: Vec<(usize, usize)>,
    kinds: Vec<EdgeKind>,
    incident: Vec<Vec<usize>>,
}

impl DecodingGraph {
    /// `rounds` counts syndrome layers; the last one is read out without error.
    pub fn new(d: usize, rounds: usize) -> Result<Self> {
        SurfaceCodeLayout::new(d)?;
        if rounds == 0 {
            return Err(crate::Error::param("rounds", "must be at least 1"));
        }
        let per_round = d * (d - 1);
        let n_vertices = per_round * rounds + 1;
        let boundary = n_vertices - 1;
        let side = 2 * d - 1;
        let ancilla = |r: usize, c: usize| (r / 2) * (d - 1) + (c - 1) / 2;

        let mut edges = Vec::new();
        let mut kinds = Vec::new();
        for t in 0..rounds {
            let base = t * per_round;
            for r in 0..side {
                for c in 0..side {
                    let ends = match (r % 2, c % 2) {
                        (0, 0) => {
                            let left = (c > 0).then(|| base + ancilla(r, c - 1));
                            let right = (c + 1 < side).then(|| base + ancilla(r, c + 1));
                            match (left, right) {
                                (Some(a), Some(b)) => (a, b),
                                (Some(a), None) | (None, Some(a)) => (a, boundary),
                                (None, None) => unreachable!("d >= 3"),
                            }
                        }
                        (1, 1) => (base + ancilla(r - 1, c), base + ancilla(r + 1, c)),
                        _ => continue,
                    };
                    edges.push(ends);
                    kinds.push(EdgeKind::Data { row: r, col: c, round: t });
                }
            }
            if t + 1 < rounds {
                for i in 0..per_round {
                    edges.push((base + i, base + per_round + i));
                    kinds.push(EdgeKind::Measurement { ancilla: i, round: t });
                }
            }
        }

        let mut incident = vec![Vec::new(); n_vertices];
        for (e, &(u, v)) in edges.iter().enumerate() {
            incident[u].push(e);
            incident[v].push(e);
        }
        Ok(DecodingGraph {
            d,
            rounds,
            per_round,
            edges,
            kinds,
            incident,
        })
    }

    pub fn distance(&self) -> usize {
        self.d
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Syndrome vertices in one round.
    pub fn per_round(&self) -> usize {
        self.per_round
    }

    /// Including the boundary vertex.
    pub fn n_vertices(&self) -> usize {
        self.incident.len()
    }

    pub fn boundary(&self) -> usize {
        self.incident.len() - 1
    }

    pub fn vertex(&self, ancilla: usize, round: usize) -> usize {
        round * self.per_round + ancilla
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_kind(&self, e: usize) -> EdgeKind {
        self.kinds[e]
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// Data edges on the left rough boundary. A residual error is a logical
    /// flip exactly when it uses an odd number of them.
    pub fn crosses_cut(&self, e: usize) -> bool {
        matches!(self.kinds[e], EdgeKind::Data { col: 0, .. })
    }

    /// Sorted non-boundary vertices touched an odd number of times.
    pub fn syndrome(&self, edges: &[usize]) -> Vec<usize> {
        let mut parity = vec![false; self.n_vertices()];
        for &e in edges {
            let (u, v) = self.edges[e];
            parity[u] ^= true;
            parity[v] ^= true;
        }
        let b = self.boundary();
        (0..b).filter(|&v| parity[v]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d3_sizes() {
        let g = DecodingGraph::new(3, 3).unwrap();
        assert_eq!(g.per_round(), 6);
        assert_eq!(g.n_vertices(), 19);
        let meas = (0..g.n_edges())
            .filter(|&e| matches!(g.edge_kind(e), EdgeKind::Measurement { .. }))
            .count();
        assert_eq!(meas, 12);
        assert_eq!(g.n_edges() - meas, 3 * 13);
        let cut = (0..g.n_edges()).filter(|&e| g.crosses_cut(e)).count();
        assert_eq!(cut, 9);
    }

    #[test]
    fn every_vertex_reaches_boundary() {
        let g = DecodingGraph::new(5, 2).unwrap();
        let mut seen = vec![false; g.n_vertices()];
        let mut stack = vec![g.boundary()];
        seen[g.boundary()] = true;
        while let Some(v) = stack.pop() {
            for &e in g.incident(v) {
                let (a, b) = g.endpoints(e);
                let w = if a == v { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
