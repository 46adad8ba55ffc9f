use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::graph::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `values[y] = d(source, y)`.
    Forward,
    /// `values[y] = d(y, source)`.
    Backward,
}

const NO_PREDECESSOR: usize = usize::MAX;

/// Single-source shortest-path distances over the active nodes.
#[derive(Debug, Clone)]
pub struct DistanceField {
    pub source: usize,
    pub direction: Direction,
    pub values: Vec<f64>,
    predecessor: Vec<usize>,
    /// Nodes left at infinite distance.
    pub unreachable: usize,
}

impl DistanceField {
    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    /// Neighbour of `node` one step closer to the source along the tree.
    pub fn predecessor(&self, node: usize) -> Option<usize> {
        match self.predecessor[node] {
            NO_PREDECESSOR => None,
            p => Some(p),
        }
    }

    /// Node sequence of the minimizing path, oriented along the travel
    /// direction: `source .. target` for forward fields and
    /// `target .. source` for backward ones. `None` when unreachable.
    pub fn path(&self, target: usize) -> Option<Vec<usize>> {
        if !self.values[target].is_finite() {
            return None;
        }
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.predecessor(cur) {
            path.push(p);
            cur = p;
        }
        if self.direction == Direction::Forward {
            path.reverse();
        }
        Some(path)
    }
}

#[derive(Debug, Clone, Copy)]
struct State {
    cost: f64,
    node: usize,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for State {}

impl Ord for State {
    // Reversed for a min-heap keyed by (cost, node).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(graph: &Graph, source: usize, direction: Direction) -> Result<DistanceField> {
    let n = graph.node_count();
    if source >= n {
        return Err(Error::IndexOutOfRange { index: source, n });
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PREDECESSOR; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State {
        cost: 0.0,
        node: source,
    });
    while let Some(State { cost, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        let mut relax = |next: usize, w: f64| {
            if done[next] {
                return;
            }
            let c = cost + w;
            if c < dist[next] || (c == dist[next] && node < pred[next]) {
                dist[next] = c;
                pred[next] = node;
                heap.push(State { cost: c, node: next });
            }
        };
        match direction {
            Direction::Forward => graph.out_edges(node).for_each(|(v, w)| relax(v, w)),
            Direction::Backward => graph.in_edges(node).for_each(|(v, w)| relax(v, w)),
        }
    }
    let unreachable = dist.iter().filter(|d| d.is_infinite()).count();
    Ok(DistanceField {
        source,
        direction,
        values: dist,
        predecessor: pred,
        unreachable,
    })
}

/// `d(source, y)` for every node `y`.
pub fn forward_distances(graph: &Graph, source: usize) -> Result<DistanceField> {
    dijkstra(graph, source, Direction::Forward)
}

/// `d(y, source)` for every node `y`, computed on the edge-reversed graph.
pub fn backward_distances(graph: &Graph, source: usize) -> Result<DistanceField> {
    dijkstra(graph, source, Direction::Backward)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 0 -> 1 -> 2 with a slower direct edge and a cheap way back.
    fn small() -> Graph {
        Graph::from_edges(vec![vec![(1, 1.0), (2, 3.0)], vec![(2, 1.0)], vec![(0, 0.5)]]).unwrap()
    }

    #[test]
    fn forward_and_backward() {
        let g = small();
        let f = forward_distances(&g, 0).unwrap();
        assert_eq!(f.values, vec![0.0, 1.0, 2.0]);
        assert_eq!(f.path(2).unwrap(), vec![0, 1, 2]);
        let b = backward_distances(&g, 0).unwrap();
        assert_eq!(b.values, vec![0.0, 1.5, 0.5]);
        assert_eq!(b.path(1).unwrap(), vec![1, 2, 0]);
        for x in 0..3 {
            let fx = forward_distances(&g, x).unwrap();
            for y in 0..3 {
                assert_eq!(backward_distances(&g, y).unwrap().values[x], fx.values[y]);
            }
        }
    }

    #[test]
    fn unreachable_is_flagged() {
        let g = Graph::from_edges(vec![vec![(1, 1.0)], vec![], vec![]]).unwrap();
        let f = forward_distances(&g, 0).unwrap();
        assert_eq!(f.unreachable, 1);
        assert!(f.values[2].is_infinite());
        assert!(f.path(2).is_none());
        assert!(forward_distances(&g, 7).is_err());
    }

    #[test]
    fn ties_prefer_lower_predecessor() {
        // Two equal routes 0 -> 1 -> 3 and 0 -> 2 -> 3.
        let g = Graph::from_edges(vec![vec![(2, 1.0), (1, 1.0)], vec![(3, 1.0)], vec![(3, 1.0)], vec![]]).unwrap();
        let f = forward_distances(&g, 0).unwrap();
        assert_eq!(f.predecessor(3), Some(1));
    }
}
