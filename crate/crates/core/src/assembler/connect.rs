//! Joining path pieces into one cycle through reservoir vertices.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Colour, ColouredGraph, Vertex};
use crate::matching::bipartite_max_matching;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectError {
    #[error("no pieces to connect")]
    NoPieces,
    #[error("{demand} junctions but only {supply} reservoir vertices")]
    Demand { demand: usize, supply: usize },
    #[error("junction {index} between {from} and {to} has no free reservoir vertex")]
    Stuck {
        index: usize,
        from: Vertex,
        to: Vertex,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Connection {
    pub cycle: Vec<Vertex>,
    /// Connector used at each junction, in cycle order.
    pub connectors: Vec<Vertex>,
    pub unused: Vec<Vertex>,
    /// Junctions whose two edges both brought new colours.
    pub fresh_junctions: usize,
    pub matching_fallback: bool,
}

/// Closes `pieces` (paths, in order) into a cycle: junction `i` joins the
/// end of piece `i` to the start of piece `i + 1` (cyclically) through a
/// distinct vertex of `reservoir`. Greedy first, preferring connectors whose
/// edges avoid `used_colours`; if greedy gets stuck, a bipartite matching of
/// junctions to reservoir vertices decides.
pub fn connect_through_reservoir(
    g: &ColouredGraph,
    pieces: &[Vec<Vertex>],
    reservoir: &[Vertex],
    used_colours: &HashSet<Colour>,
) -> Result<Connection, ConnectError> {
    let k = pieces.len();
    if k == 0 || pieces.iter().any(Vec::is_empty) {
        return Err(ConnectError::NoPieces);
    }
    if k > reservoir.len() {
        return Err(ConnectError::Demand {
            demand: k,
            supply: reservoir.len(),
        });
    }
    let junction = |i: usize| {
        (
            *pieces[i].last().expect("non-empty"),
            pieces[(i + 1) % k][0],
        )
    };
    let bits = g.adjacency_bits();
    let mut used = used_colours.clone();
    let mut taken = vec![false; reservoir.len()];
    let mut chosen = vec![usize::MAX; k];
    let mut fresh = 0;
    let mut greedy_ok = true;
    for (i, slot) in chosen.iter_mut().enumerate() {
        let (a, b) = junction(i);
        let mut best: Option<(u8, usize)> = None;
        for (ri, &z) in reservoir.iter().enumerate() {
            if taken[ri] || !bits.contains(a, z) || !bits.contains(z, b) {
                continue;
            }
            let (ca, cb) = (
                g.colour(a, z).expect("adjacent"),
                g.colour(z, b).expect("adjacent"),
            );
            let score = u8::from(!used.contains(&ca)) + u8::from(!used.contains(&cb) && ca != cb);
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, ri));
                if score == 2 {
                    break;
                }
            }
        }
        match best {
            Some((score, ri)) => {
                taken[ri] = true;
                *slot = ri;
                let z = reservoir[ri];
                used.insert(g.colour(a, z).expect("adjacent"));
                used.insert(g.colour(z, b).expect("adjacent"));
                fresh += usize::from(score == 2);
            }
            None => {
                greedy_ok = false;
                break;
            }
        }
    }
    if !greedy_ok {
        let adj: Vec<Vec<usize>> = (0..k)
            .map(|i| {
                let (a, b) = junction(i);
                (0..reservoir.len())
                    .filter(|&ri| {
                        bits.contains(a, reservoir[ri]) && bits.contains(reservoir[ri], b)
                    })
                    .collect()
            })
            .collect();
        let mate = bipartite_max_matching(k, reservoir.len(), &adj);
        if let Some(i) = (0..k).find(|&i| mate[i].is_none()) {
            let (from, to) = junction(i);
            return Err(ConnectError::Stuck { index: i, from, to });
        }
        taken.fill(false);
        fresh = 0;
        for i in 0..k {
            chosen[i] = mate[i].expect("perfect on the junction side");
            taken[chosen[i]] = true;
        }
    }
    let mut cycle = Vec::with_capacity(pieces.iter().map(Vec::len).sum::<usize>() + k);
    let mut connectors = Vec::with_capacity(k);
    for (i, p) in pieces.iter().enumerate() {
        cycle.extend_from_slice(p);
        let z = reservoir[chosen[i]];
        cycle.push(z);
        connectors.push(z);
    }
    let unused = reservoir
        .iter()
        .enumerate()
        .filter(|&(ri, _)| !taken[ri])
        .map(|(_, &z)| z)
        .collect();
    Ok(Connection {
        cycle,
        connectors,
        unused,
        fresh_junctions: fresh,
        matching_fallback: !greedy_ok,
    })
}

/// Result of [`extend_junctions`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Extension {
    pub cycle: Vec<Vertex>,
    /// Reservoir vertices between piece `i` and piece `i + 1`.
    pub junction_paths: Vec<Vec<Vertex>>,
    pub inserted: usize,
    pub unused: Vec<Vertex>,
}

/// Threads unused reservoir vertices into the junctions of `conn`, so that
/// connectors become short paths inside the reservoir. A vertex `r` goes
/// between consecutive junction vertices `p, q` with `r ~ p, q`; the slot
/// losing the fewest colours is taken. Piece edges are never touched.
pub fn extend_junctions(g: &ColouredGraph, pieces: &[Vec<Vertex>], conn: &Connection) -> Extension {
    let k = pieces.len();
    let colour = |a: Vertex, b: Vertex| g.colour(a, b).expect("junction edges lie in the host");
    let mut count: std::collections::HashMap<Colour, usize> = std::collections::HashMap::new();
    for (a, b) in crate::graph::cycle_pairs(&conn.cycle) {
        *count.entry(colour(a, b)).or_insert(0) += 1;
    }
    let mut paths: Vec<Vec<Vertex>> = conn.connectors.iter().map(|&z| vec![z]).collect();
    let mut unused = Vec::new();
    let mut inserted = 0;
    for &r in &conn.unused {
        let mut best: Option<(i32, usize, usize)> = None;
        for (j, path) in paths.iter().enumerate() {
            let (a, b) = (
                *pieces[j].last().expect("non-empty"),
                pieces[(j + 1) % k][0],
            );
            let seq: Vec<Vertex> = std::iter::once(a)
                .chain(path.iter().copied())
                .chain(std::iter::once(b))
                .collect();
            for pos in 0..seq.len() - 1 {
                let (p, q) = (seq[pos], seq[pos + 1]);
                let (Some(cp), Some(cq)) = (g.colour(p, r), g.colour(r, q)) else {
                    continue;
                };
                let old = colour(p, q);
                let lost = i32::from(count.get(&old).copied().unwrap_or(0) == 1);
                let gain = i32::from(!count.contains_key(&cp) || (cp == old && lost == 1))
                    + i32::from(cq != cp && (!count.contains_key(&cq) || (cq == old && lost == 1)));
                let score = gain - lost;
                if best.is_none_or(|(s, _, _)| score > s) {
                    best = Some((score, j, pos));
                }
            }
        }
        match best {
            Some((_, j, pos)) => {
                let (a, b) = (
                    *pieces[j].last().expect("non-empty"),
                    pieces[(j + 1) % k][0],
                );
                let seq: Vec<Vertex> = std::iter::once(a)
                    .chain(paths[j].iter().copied())
                    .chain(std::iter::once(b))
                    .collect();
                let (p, q) = (seq[pos], seq[pos + 1]);
                let old = colour(p, q);
                let e = count.get_mut(&old).expect("counted");
                *e -= 1;
                if *e == 0 {
                    count.remove(&old);
                }
                *count.entry(colour(p, r)).or_insert(0) += 1;
                *count.entry(colour(r, q)).or_insert(0) += 1;
                paths[j].insert(pos, r);
                inserted += 1;
            }
            None => unused.push(r),
        }
    }
    let mut cycle = Vec::with_capacity(conn.cycle.len() + inserted);
    for (p, path) in pieces.iter().zip(&paths) {
        cycle.extend_from_slice(p);
        cycle.extend_from_slice(path);
    }
    Extension {
        cycle,
        junction_paths: paths,
        inserted,
        unused,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::rainbow_complete;

    #[test]
    fn single_piece_closes_through_one_vertex() {
        let g = rainbow_complete(6);
        let c = connect_through_reservoir(&g, &[vec![0, 1, 2]], &[4, 5], &HashSet::new()).unwrap();
        assert_eq!(c.cycle, vec![0, 1, 2, 4]);
        assert_eq!(c.unused, vec![5]);
        assert_eq!(c.fresh_junctions, 1);
    }

    #[test]
    fn three_pieces_use_three_distinct_connectors() {
        let g = rainbow_complete(10);
        let c = connect_through_reservoir(
            &g,
            &[vec![0, 1], vec![2, 3], vec![4]],
            &[7, 8, 9],
            &HashSet::new(),
        )
        .unwrap();
        let set: HashSet<Vertex> = c.connectors.iter().copied().collect();
        assert_eq!(set.len(), 3);
        assert!(c.unused.is_empty());
    }

    #[test]
    fn tiny_reservoir_is_a_controlled_failure() {
        let g = rainbow_complete(8);
        assert!(matches!(
            connect_through_reservoir(&g, &[vec![0], vec![1], vec![2]], &[7], &HashSet::new()),
            Err(ConnectError::Demand { .. })
        ));
        // 5 sees 0 but not 2; 4 is isolated.
        let g = ColouredGraph::new(6, [(0, 1, 0), (0, 5, 1), (1, 5, 2), (2, 3, 3)]).unwrap();
        assert!(matches!(
            connect_through_reservoir(&g, &[vec![0], vec![2]], &[5, 4], &HashSet::new()),
            Err(ConnectError::Stuck { .. })
        ));
    }

    #[test]
    fn extension_threads_unused_reservoir_vertices() {
        let g = rainbow_complete(10);
        let pieces = vec![vec![0, 1, 2], vec![3, 4]];
        let conn = connect_through_reservoir(&g, &pieces, &[6, 7, 8, 9], &HashSet::new()).unwrap();
        let ext = extend_junctions(&g, &pieces, &conn);
        assert_eq!(ext.inserted, 2);
        assert!(ext.unused.is_empty());
        assert_eq!(ext.cycle.len(), 9);
        let distinct: HashSet<Vertex> = ext.cycle.iter().copied().collect();
        assert_eq!(distinct.len(), 9);
        assert!(crate::graph::cycle_pairs(&ext.cycle)
            .iter()
            .all(|&(a, b)| g.has_edge(a, b)));
        assert_eq!(&ext.cycle[..3], &[0, 1, 2]);
        assert_eq!(ext.junction_paths.iter().map(Vec::len).sum::<usize>(), 4);
    }

    #[test]
    fn matching_fallback_rescues_bad_greedy_choice() {
        // Junction 0 (1 -> 2) sees 6 and 7; junction 1 (3 -> 0) sees only 6.
        // Greedy hands 6 to junction 0, so the matching has to step in.
        let g = ColouredGraph::new(
            8,
            [
                (0, 1, 0),
                (2, 3, 1),
                (1, 6, 10),
                (2, 6, 11),
                (3, 6, 12),
                (0, 6, 13),
                (1, 7, 20),
                (2, 7, 21),
            ],
        )
        .unwrap();
        let c = connect_through_reservoir(&g, &[vec![0, 1], vec![2, 3]], &[6, 7], &HashSet::new())
            .unwrap();
        assert!(c.matching_fallback);
        assert_eq!(c.cycle, vec![0, 1, 7, 2, 3, 6]);
        assert!(matches!(
            connect_through_reservoir(&g, &[vec![0, 1], vec![]], &[6, 7], &HashSet::new()),
            Err(ConnectError::NoPieces)
        ));
    }
}
