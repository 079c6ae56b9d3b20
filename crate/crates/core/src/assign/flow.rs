//! Successive-shortest-path min-cost flow with Johnson potentials.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy)]
struct Edge {
    to: usize,
    cap: i64,
    cost: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct MinCostFlow {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl MinCostFlow {
    pub(crate) fn new(nodes: usize) -> Self {
        Self { edges: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    /// Adds `from -> to`; returns the edge id for [`Self::flow_on`].
    pub(crate) fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge { to: from, cap: 0, cost: -cost });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub(crate) fn flow_on(&self, id: usize) -> i64 {
        self.edges[id ^ 1].cap
    }

    /// Bellman-Ford distances from `s`; handles negative edge costs.
    fn initial_potentials(&self, s: usize) -> Vec<i64> {
        let n = self.adj.len();
        let mut dist = vec![i64::MAX; n];
        dist[s] = 0;
        for _ in 0..n {
            let mut changed = false;
            for v in 0..n {
                if dist[v] == i64::MAX {
                    continue;
                }
                for &e in &self.adj[v] {
                    let ed = self.edges[e];
                    if ed.cap > 0 && dist[v] + ed.cost < dist[ed.to] {
                        dist[ed.to] = dist[v] + ed.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist.iter().map(|&d| if d == i64::MAX { 0 } else { d }).collect()
    }

    /// Sends up to `limit` units from `s` to `t` at minimum cost.
    /// Returns the amount actually sent and its cost. Every augmentation
    /// follows a shortest path, so the result is optimal among flows of
    /// that value.
    pub(crate) fn run(&mut self, s: usize, t: usize, limit: i64) -> (i64, i64) {
        let n = self.adj.len();
        let mut pot = self.initial_potentials(s);
        let (mut flow, mut cost) = (0i64, 0i64);
        while flow < limit {
            let mut dist = vec![i64::MAX; n];
            let mut via = vec![usize::MAX; n];
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, s)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for &e in &self.adj[v] {
                    let ed = self.edges[e];
                    if ed.cap <= 0 {
                        continue;
                    }
                    let nd = d + ed.cost + pot[v] - pot[ed.to];
                    if nd < dist[ed.to] {
                        dist[ed.to] = nd;
                        via[ed.to] = e;
                        heap.push(Reverse((nd, ed.to)));
                    }
                }
            }
            if dist[t] == i64::MAX {
                break;
            }
            for v in 0..n {
                if dist[v] != i64::MAX {
                    pot[v] += dist[v];
                }
            }
            let mut push = limit - flow;
            let mut v = t;
            while v != s {
                let e = via[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                cost += push * self.edges[e].cost;
                v = self.edges[e ^ 1].to;
            }
            flow += push;
        }
        (flow, cost)
    }
}
