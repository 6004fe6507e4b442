//! Unit-capacity max-flow for counting edge-disjoint paths, stopping at a
//! caller-supplied limit.

use std::collections::VecDeque;

#[derive(Debug, Clone, Default)]
pub struct FlowGraph {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        FlowGraph {
            head: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.head.push(Vec::new());
        self.head.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cap: u32) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(cap);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Augment along shortest paths until `limit` units reach `sink`.
    pub fn max_flow(&mut self, source: usize, sink: usize, limit: u32) -> u32 {
        let mut flow = 0;
        let n = self.head.len();
        while flow < limit {
            let mut prev = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && !seen[v] {
                        seen[v] = true;
                        prev[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[sink] {
                break;
            }
            let mut v = sink;
            while v != source {
                let e = prev[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

/// Number of edge-disjoint `source → sink` paths, capped at `limit`.
pub fn edge_disjoint_paths(
    nodes: usize,
    edges: &[(usize, usize)],
    source: usize,
    sink: usize,
    limit: u32,
) -> u32 {
    if source == sink {
        return limit;
    }
    let mut g = FlowGraph::new(nodes);
    for &(u, v) in edges {
        g.add_edge(u, v, 1);
    }
    g.max_flow(source, sink, limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_has_two() {
        let e = [(0, 1), (0, 2), (1, 3), (2, 3)];
        assert_eq!(edge_disjoint_paths(4, &e, 0, 3, 2), 2);
        assert_eq!(edge_disjoint_paths(4, &e[..3], 0, 3, 2), 1);
    }

    #[test]
    fn shared_bond_blocks_second_path() {
        let e = [(0, 1), (1, 2), (1, 3), (2, 4), (3, 4)];
        assert_eq!(edge_disjoint_paths(5, &e, 0, 4, 2), 1);
    }

    #[test]
    fn needs_reverse_residual() {
        // The shortest first path uses the middle edge; the second needs to undo it.
        let e = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)];
        assert_eq!(edge_disjoint_paths(4, &e, 0, 3, 3), 2);
    }
}
