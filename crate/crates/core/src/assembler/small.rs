//! Small hosts: Palmer's rotation for a Hamilton cycle, then a local search
//! over 2-opt and vertex moves that maximises the number of colours.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::graph::{ColouredGraph, Vertex};
use crate::rng::{derive_seed, rng_from_seed, Rng, Stage};

/// Repairs a cyclic ordering into a Hamilton cycle by Palmer's gap-closing
/// rotations. Always succeeds when `deg u + deg v >= n` for non-adjacent
/// pairs; otherwise gives up after `n^2` rotations.
pub fn palmer(g: &ColouredGraph, mut order: Vec<Vertex>) -> Option<Vec<Vertex>> {
    let n = order.len();
    if n < 3 {
        return None;
    }
    for _ in 0..n * n + n {
        let Some(i) = (0..n).find(|&i| !g.has_edge(order[i], order[(i + 1) % n])) else {
            return Some(order);
        };
        // Rotate so the gap sits between positions n-1 and 0.
        order.rotate_left((i + 1) % n);
        let (a, b) = (order[n - 1], order[0]);
        // Find j with a~order[j] and b~order[j+1]; reverse order[0..=j].
        let j = (0..n - 2).find(|&j| g.has_edge(b, order[j + 1]) && g.has_edge(a, order[j]))?;
        order[..=j].reverse();
        debug_assert!(g.has_edge(order[n - 1], order[0]));
    }
    None
}

/// A Hamilton cycle from a random start order.
pub fn random_hamilton(g: &ColouredGraph, rng: &mut Rng) -> Option<Vec<Vertex>> {
    let mut order: Vec<Vertex> = (0..g.n()).collect();
    order.shuffle(rng);
    palmer(g, order)
}

struct Counter {
    counts: Vec<u32>,
    distinct: usize,
}

impl Counter {
    fn add(&mut self, c: usize) {
        if self.counts[c] == 0 {
            self.distinct += 1;
        }
        self.counts[c] += 1;
    }

    fn remove(&mut self, c: usize) {
        self.counts[c] -= 1;
        if self.counts[c] == 0 {
            self.distinct -= 1;
        }
    }
}

/// Improves `cycle` in place; returns its distinct colour count.
pub fn improve_colours(
    g: &ColouredGraph,
    cycle: &mut Vec<Vertex>,
    iterations: usize,
    rng: &mut Rng,
) -> usize {
    let n = cycle.len();
    let (canon, _) = g.canonicalize();
    let k = canon.colour_set().len();
    let ceiling = n.min(k);
    let col = |a: Vertex, b: Vertex| canon.colour(a, b).map(|c| c.0 as usize);
    let mut ctr = Counter {
        counts: vec![0; k],
        distinct: 0,
    };
    for i in 0..n {
        ctr.add(col(cycle[i], cycle[(i + 1) % n]).expect("input is a Hamilton cycle"));
    }
    let mut best = (ctr.distinct, cycle.clone());
    let mut sideways = 0usize;
    for _ in 0..iterations {
        if best.0 == ceiling {
            break;
        }
        let before = ctr.distinct;
        if rng.random_bool(0.5) {
            // 2-opt: edges (i, i+1), (j, j+1) become (i, j), (i+1, j+1).
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            let (i, j) = (i.min(j), i.max(j));
            if j - i < 2 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b, c, d) = (cycle[i], cycle[i + 1], cycle[j], cycle[(j + 1) % n]);
            let (Some(ac), Some(bd)) = (col(a, c), col(b, d)) else {
                continue;
            };
            let (ab, cd) = (
                col(a, b).expect("cycle edge"),
                col(c, d).expect("cycle edge"),
            );
            ctr.remove(ab);
            ctr.remove(cd);
            ctr.add(ac);
            ctr.add(bd);
            if accept(ctr.distinct, before, &mut sideways, n) {
                cycle[i + 1..=j].reverse();
            } else {
                ctr.remove(ac);
                ctr.remove(bd);
                ctr.add(ab);
                ctr.add(cd);
                continue;
            }
        } else {
            // Move vertex at k between positions i and i+1.
            let k_pos = rng.random_range(0..n);
            let i = rng.random_range(0..n);
            let prev = (k_pos + n - 1) % n;
            if i == k_pos || i == prev {
                continue;
            }
            let (p, x, s) = (cycle[prev], cycle[k_pos], cycle[(k_pos + 1) % n]);
            let (a, b) = (cycle[i], cycle[(i + 1) % n]);
            let (Some(ps), Some(ax), Some(xb)) = (col(p, s), col(a, x), col(x, b)) else {
                continue;
            };
            let (px, xs, ab) = (
                col(p, x).expect("cycle edge"),
                col(x, s).expect("cycle edge"),
                col(a, b).expect("cycle edge"),
            );
            for c in [px, xs, ab] {
                ctr.remove(c);
            }
            for c in [ps, ax, xb] {
                ctr.add(c);
            }
            if accept(ctr.distinct, before, &mut sideways, n) {
                cycle.remove(k_pos);
                let at = cycle
                    .iter()
                    .position(|&v| v == a)
                    .expect("a stays on the cycle");
                cycle.insert(at + 1, x);
            } else {
                for c in [ps, ax, xb] {
                    ctr.remove(c);
                }
                for c in [px, xs, ab] {
                    ctr.add(c);
                }
                continue;
            }
        }
        if ctr.distinct > best.0 {
            best = (ctr.distinct, cycle.clone());
        }
    }
    *cycle = best.1;
    best.0
}

fn accept(after: usize, before: usize, sideways: &mut usize, n: usize) -> bool {
    if after > before {
        *sideways = 0;
        true
    } else if after == before && *sideways < 50 * n {
        *sideways += 1;
        true
    } else {
        false
    }
}

#[derive(Debug, Clone)]
pub struct SmallOutcome {
    pub cycle: Vec<Vertex>,
    pub distinct: usize,
    pub restarts: usize,
}

/// Best cycle over `restarts` Palmer starts, each improved by local search.
pub fn small_n_cycle(g: &ColouredGraph, restarts: usize, seed: u64) -> Option<SmallOutcome> {
    let n = g.n();
    let ceiling = n.min(g.colour_set().len());
    let iterations = (200 * n * n).clamp(2_000, 400_000);
    let mut best: Option<SmallOutcome> = None;
    for r in 0..restarts.max(1) {
        let mut rng = rng_from_seed(derive_seed(seed, Stage::SmallN, r as u64));
        let Some(mut cycle) = random_hamilton(g, &mut rng) else {
            continue;
        };
        let distinct = improve_colours(g, &mut cycle, iterations, &mut rng);
        if best.as_ref().is_none_or(|b| distinct > b.distinct) {
            best = Some(SmallOutcome {
                cycle,
                distinct,
                restarts: r + 1,
            });
        }
        if distinct == ceiling {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::distinct_colours_of;
    use crate::graph::{cycle_pairs, fixtures::rainbow_complete};
    use crate::oracle::is_hamilton_cycle;

    #[test]
    fn palmer_on_complete_and_dirac_hosts() {
        let g = rainbow_complete(9);
        let c = palmer(&g, (0..9).collect()).unwrap();
        assert!(is_hamilton_cycle(&g, &c));
        // K_{4,4}: every degree is n/2, so Ore holds.
        let mut t = Vec::new();
        for i in 0..4 {
            for j in 4..8 {
                t.push((i, j, (i * 8 + j) as u32));
            }
        }
        let g = ColouredGraph::new(8, t).unwrap();
        let c = palmer(&g, (0..8).collect()).unwrap();
        assert!(is_hamilton_cycle(&g, &c));
    }

    #[test]
    fn local_search_reaches_rainbow_on_rainbow_host() {
        let g = rainbow_complete(10);
        let out = small_n_cycle(&g, 3, 1).unwrap();
        assert_eq!(out.distinct, 10);
        assert!(is_hamilton_cycle(&g, &out.cycle));
        assert_eq!(
            distinct_colours_of(&g, &cycle_pairs(&out.cycle)).unwrap(),
            10
        );
    }
}
