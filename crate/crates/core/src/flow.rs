//! Dinic max-flow on small dense-ish networks, with access to the two
//! extreme minimum cuts.

use std::collections::VecDeque;

pub(crate) const INF: i64 = i64::MAX / 4;

pub(crate) struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { head: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    pub fn add_node(&mut self) -> usize {
        self.head.push(Vec::new());
        self.head.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, c: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn levels(&self, s: usize) -> Vec<i32> {
        let mut level = vec![-1; self.head.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && level[v] < 0 {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, pushed: i64, level: &[i32], iter: &mut [usize]) -> i64 {
        if u == t {
            return pushed;
        }
        while iter[u] < self.head[u].len() {
            let e = self.head[u][iter[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let got = self.augment(v, t, pushed.min(self.cap[e]), level, iter);
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            iter[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        loop {
            let level = self.levels(s);
            if level[t] < 0 {
                return flow;
            }
            let mut iter = vec![0; self.head.len()];
            loop {
                let f = self.augment(s, t, INF, &level, &mut iter);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network: the source side of
    /// the inclusion-least minimum cut.
    pub fn least_source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Complement of the nodes that can still reach `t` in the residual
    /// network: the source side of the inclusion-greatest minimum cut.
    pub fn greatest_source_side(&self, t: usize) -> Vec<bool> {
        let mut reaches = vec![false; self.head.len()];
        reaches[t] = true;
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            // residual edge u -> v exists when the reverse of edge e (v -> u) has capacity on e^1
            for &e in &self.head[v] {
                let u = self.to[e];
                if self.cap[e ^ 1] > 0 && !reaches[u] {
                    reaches[u] = true;
                    stack.push(u);
                }
            }
        }
        reaches.into_iter().map(|r| !r).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_network() {
        // classic 4-node example
        let mut g = FlowNetwork::new(4);
        g.add_edge(0, 1, 3);
        g.add_edge(0, 2, 2);
        g.add_edge(1, 2, 1);
        g.add_edge(1, 3, 2);
        g.add_edge(2, 3, 3);
        assert_eq!(g.max_flow(0, 3), 5);
        let least = g.least_source_side(0);
        assert_eq!(least, vec![true, false, false, false]);
    }

    #[test]
    fn extreme_cuts_differ_when_ties() {
        // 0 -> 1 -> 2 with equal capacities: both cuts are minimum
        let mut g = FlowNetwork::new(3);
        g.add_edge(0, 1, 1);
        g.add_edge(1, 2, 1);
        assert_eq!(g.max_flow(0, 2), 1);
        assert_eq!(g.least_source_side(0), vec![true, false, false]);
        assert_eq!(g.greatest_source_side(2), vec![true, true, false]);
    }
}
