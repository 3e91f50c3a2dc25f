//! Dinic's maximum flow on integer capacities.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    /// Adds an arc and returns its handle for [`FlowNetwork::flow_on`].
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    /// Flow currently routed along the arc `id`.
    pub fn flow_on(&self, id: usize) -> i64 {
        self.arcs[id ^ 1].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.out[v] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[v] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        // Iterative blocking-flow search; `path` holds arc ids from `s`.
        let mut path: Vec<usize> = Vec::new();
        let mut v = s;
        loop {
            if v == t {
                let push = path
                    .iter()
                    .map(|&a| self.arcs[a].cap)
                    .min()
                    .unwrap_or(limit)
                    .min(limit);
                for &a in &path {
                    self.arcs[a].cap -= push;
                    self.arcs[a ^ 1].cap += push;
                }
                return push;
            }
            let mut advanced = false;
            while self.iter[v] < self.out[v].len() {
                let a = self.out[v][self.iter[v]];
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && self.level[to] == self.level[v] + 1 {
                    path.push(a);
                    v = to;
                    advanced = true;
                    break;
                }
                self.iter[v] += 1;
            }
            if !advanced {
                if v == s {
                    return 0;
                }
                self.level[v] = -1;
                let a = path.pop().expect("non-source vertex has an entry arc");
                v = self.arcs[a ^ 1].to;
                self.iter[v] += 1;
            }
        }
    }

    /// Pushes as much flow as possible from `s` to `t`, up to `limit`.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        let mut total = 0;
        while total < limit && self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, limit - total);
                if f == 0 {
                    break;
                }
                total += f;
                if total >= limit {
                    break;
                }
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        // CLRS figure 26.1, max flow 23.
        let mut g = FlowNetwork::new(6);
        let arcs = [
            (0, 1, 16),
            (0, 2, 13),
            (1, 3, 12),
            (2, 1, 4),
            (2, 4, 14),
            (3, 2, 9),
            (3, 5, 20),
            (4, 3, 7),
            (4, 5, 4),
        ];
        for (a, b, c) in arcs {
            g.add_arc(a, b, c);
        }
        assert_eq!(g.max_flow(0, 5, i64::MAX), 23);
    }

    #[test]
    fn respects_limit_and_reports_arc_flow() {
        let mut g = FlowNetwork::new(3);
        let a = g.add_arc(0, 1, 5);
        g.add_arc(1, 2, 5);
        assert_eq!(g.max_flow(0, 2, 3), 3);
        assert_eq!(g.flow_on(a), 3);
    }
}
