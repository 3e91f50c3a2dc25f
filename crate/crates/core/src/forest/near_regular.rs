//! Near-regularity: every degree within `(1 ± gamma) * delta * n_ref`.

use serde::{Deserialize, Serialize};

use crate::graph::{ColouredGraph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearRegularityParams {
    pub gamma: f64,
    pub delta: f64,
    pub n_ref: f64,
}

impl NearRegularityParams {
    pub fn new(gamma: f64, delta: f64, n_ref: f64) -> Self {
        debug_assert!(gamma > 0.0 && gamma <= 1.0, "gamma out of range: {gamma}");
        debug_assert!(delta > 0.0 && delta <= 1.0, "delta out of range: {delta}");
        debug_assert!(n_ref >= 1.0);
        NearRegularityParams {
            gamma,
            delta,
            n_ref,
        }
    }

    pub fn lower(&self) -> f64 {
        (1.0 - self.gamma) * self.delta * self.n_ref
    }

    pub fn upper(&self) -> f64 {
        (1.0 + self.gamma) * self.delta * self.n_ref
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearRegularityReport {
    pub ok: bool,
    pub lower: f64,
    pub upper: f64,
    /// The vertex furthest outside (or closest to leaving) the window.
    pub worst_vertex: Option<Vertex>,
    pub worst_degree: usize,
    /// Distance outside the window; negative when every degree is inside.
    pub worst_excess: f64,
}

/// Checks `(vertex, degree)` pairs against the window.
pub fn check_degrees<I>(degrees: I, params: &NearRegularityParams) -> NearRegularityReport
where
    I: IntoIterator<Item = (Vertex, usize)>,
{
    let (lower, upper) = (params.lower(), params.upper());
    let mut report = NearRegularityReport {
        ok: true,
        lower,
        upper,
        worst_vertex: None,
        worst_degree: 0,
        worst_excess: f64::NEG_INFINITY,
    };
    for (v, d) in degrees {
        let excess = (lower - d as f64).max(d as f64 - upper);
        if excess > report.worst_excess {
            report.worst_excess = excess;
            report.worst_vertex = Some(v);
            report.worst_degree = d;
        }
        // Tiny tolerance for windows computed in floating point.
        if excess > 1e-9 {
            report.ok = false;
        }
    }
    report
}

pub fn check_near_regular(
    h: &ColouredGraph,
    params: &NearRegularityParams,
) -> NearRegularityReport {
    check_degrees((0..h.n()).map(|v| (v, h.degree(v))), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{cycle, rainbow_complete};

    #[test]
    fn regular_graph_passes() {
        let g = rainbow_complete(7);
        let p = NearRegularityParams::new(0.01, 6.0 / 7.0, 7.0);
        assert!(check_near_regular(&g, &p).ok);
        assert!(
            check_near_regular(
                &cycle(9, &[0, 1, 2]),
                &NearRegularityParams::new(0.5, 2.0 / 9.0, 9.0)
            )
            .ok
        );
    }

    #[test]
    fn star_fails_at_a_leaf() {
        let star = ColouredGraph::new(6, (1..6).map(|i| (0, i, i as u32))).unwrap();
        let r = check_near_regular(&star, &NearRegularityParams::new(0.1, 5.0 / 6.0, 6.0));
        assert!(!r.ok);
        assert_ne!(r.worst_vertex, Some(0));
        assert_eq!(r.worst_degree, 1);
    }

    #[test]
    fn degrees_four_to_six_fit_window() {
        let p = NearRegularityParams::new(0.2, 0.5, 10.0);
        assert!((p.lower() - 4.0).abs() < 1e-12 && (p.upper() - 6.0).abs() < 1e-12);
        let r = check_degrees([(0, 4), (1, 5), (2, 6)], &p);
        assert!(r.ok);
        assert!(!check_degrees([(0, 3), (1, 5)], &p).ok);
        assert!(!check_degrees([(0, 7)], &p).ok);
    }
}
