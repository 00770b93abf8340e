//! Variable interaction graph.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::similarity::SimilarityMatrix;

/// Undirected simple graph with an edge between every two variables that
/// are read by a common subfunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vig {
    adjacency: Vec<Vec<usize>>,
}

impl Vig {
    /// Builds the graph from subfunction input sets over `ell` variables.
    pub fn from_inputs(ell: usize, inputs: &[Vec<usize>]) -> Self {
        let mut adjacency = vec![Vec::new(); ell];
        for set in inputs {
            for (a, &u) in set.iter().enumerate() {
                for &v in &set[a + 1..] {
                    if u != v {
                        adjacency[u].push(v);
                        adjacency[v].push(u);
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self { adjacency }
    }

    pub fn from_edges(ell: usize, edges: &[(usize, usize)]) -> Self {
        let inputs: Vec<Vec<usize>> = edges.iter().map(|&(u, v)| vec![u, v]).collect();
        Self::from_inputs(ell, &inputs)
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Sorted neighbors of `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected component label of every vertex, labels in order of first
    /// appearance.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        for s in 0..self.len() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &self.adjacency[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Breadth-first order covering every component: each component starts
    /// at its smallest unvisited vertex and neighbors are visited in
    /// ascending index order.
    pub fn breadth_first_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = Vec::with_capacity(self.len());
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        order
    }

    /// Connectivity similarity: 1 for adjacent variables, `1 / (1 + d)` for
    /// hop distance `d >= 2`, 0 when no path exists.
    pub fn similarity(&self) -> SimilarityMatrix {
        let n = self.len();
        let mut m = SimilarityMatrix::zeros(n);
        for u in 0..n {
            let dist = self.distances_from(u);
            for v in u + 1..n {
                let s = match dist[v] {
                    None => 0.0,
                    Some(1) => 1.0,
                    Some(d) => 1.0 / (1.0 + d as f64),
                };
                m.set(u, v, s);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{MaxCut, Rosenbrock, Trap};
    use crate::fitness::SubfunctionDecomposition;

    #[test]
    fn rosenbrock_is_a_path() {
        let f = Rosenbrock::new(4).unwrap();
        let d = SubfunctionDecomposition::<f64>::new(&f).unwrap();
        let g = Vig::from_inputs(4, d.inputs());
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && g.has_edge(2, 3));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn trap_is_two_cliques() {
        let t = Trap::new(10, 5).unwrap();
        let d = SubfunctionDecomposition::<u8>::new(&t).unwrap();
        let g = Vig::from_inputs(10, d.inputs());
        assert_eq!(g.edge_count(), 20);
        assert_eq!(g.components(), vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        for u in 0..5 {
            assert_eq!(g.neighbors(u).len(), 4);
        }
    }

    #[test]
    fn torus_is_four_regular() {
        let m = MaxCut::torus(4).unwrap();
        let g = Vig::from_edges(16, m.edges());
        assert_eq!(g.edge_count(), 32);
        assert!((0..16).all(|u| g.neighbors(u).len() == 4));
    }

    #[test]
    fn connectivity_similarity_decays() {
        let g = Vig::from_edges(5, &[(0, 1), (1, 2), (2, 3)]);
        let s = g.similarity();
        assert_eq!(s.get(0, 1), 1.0);
        assert_eq!(s.get(0, 2), 1.0 / 3.0);
        assert_eq!(s.get(0, 3), 0.25);
        assert_eq!(s.get(0, 4), 0.0);
        assert_eq!(g.breadth_first_order(), vec![0, 1, 2, 3, 4]);
    }
}
