//! Population census, the coexistence value, trace CSV and grid snapshots.

use std::fmt::Write as _;

use crate::dynamics::SimState;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::payoff::Strategy;

/// Strategy counts over connected (degree >= 1) nodes at one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountsSnapshot {
    pub tick: u64,
    pub counts: [usize; 4],
    pub phi: f64,
}

impl CountsSnapshot {
    pub fn count(&self, s: Strategy) -> usize {
        self.counts[s.index()]
    }

    pub fn as_f64(&self) -> [f64; 4] {
        self.counts.map(|c| c as f64)
    }
}

/// Geometric mean of the four counts: zero when any strategy is absent.
pub fn coexistence_value(counts: [f64; 4]) -> f64 {
    if counts.iter().any(|&c| c <= 0.0) {
        return 0.0;
    }
    counts.iter().product::<f64>().sqrt().sqrt()
}

/// Census of `state`. Degree-0 nodes hold strategies but are not counted.
pub fn census(graph: &Graph, state: &SimState) -> Result<CountsSnapshot> {
    if state.strategies.len() != graph.node_count() {
        return Err(Error::Argument(format!(
            "state has {} entries but graph has {} nodes",
            state.strategies.len(),
            graph.node_count()
        )));
    }
    let mut counts = [0usize; 4];
    for (v, &s) in state.strategies.iter().enumerate() {
        if graph.degree(v) > 0 {
            counts[s.index()] += 1;
        }
    }
    Ok(CountsSnapshot { tick: state.tick, counts, phi: coexistence_value(counts.map(|c| c as f64)) })
}

pub const TRACE_HEADER: &str = "tick,n_c,n_d,n_l,n_p,phi";

pub fn trace_row(snap: &CountsSnapshot) -> String {
    let [c, d, l, p] = snap.counts;
    format!("{},{c},{d},{l},{p},{}", snap.tick, snap.phi)
}

/// Per-tick time series in CSV form, header included.
pub fn trace_csv(snapshots: &[CountsSnapshot]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for s in snapshots {
        out.push_str(&trace_row(s));
        out.push('\n');
    }
    out
}

pub fn strategy_color(s: Strategy) -> [u8; 3] {
    match s {
        Strategy::Cooperator => [255, 0, 0],
        Strategy::Defector => [0, 0, 255],
        Strategy::Loner => [0, 255, 0],
        Strategy::Punisher => [0, 0, 0],
    }
}

/// Plain-text (P3) pixel map, one pixel per agent, row `y` holding nodes `y*width..`.
pub fn render_grid_ppm(state: &SimState, width: usize, height: usize) -> Result<String> {
    if width * height != state.strategies.len() || width == 0 {
        return Err(Error::Sizing(format!(
            "{width}x{height} grid does not match {} agents",
            state.strategies.len()
        )));
    }
    let mut out = String::with_capacity(16 + state.strategies.len() * 12);
    writeln!(out, "P3\n{width} {height}\n255").unwrap();
    for row in state.strategies.chunks(width) {
        let line: Vec<String> = row
            .iter()
            .map(|&s| {
                let [r, g, b] = strategy_color(s);
                format!("{r} {g} {b}")
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{grid_torus, Neighborhood};
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use Strategy::*;

    /// Minimal independent P3 reader: returns (width, height, pixels).
    fn parse_p3(text: &str) -> (usize, usize, Vec<[u8; 3]>) {
        let mut tok = text.split_whitespace();
        assert_eq!(tok.next(), Some("P3"));
        let w: usize = tok.next().unwrap().parse().unwrap();
        let h: usize = tok.next().unwrap().parse().unwrap();
        assert_eq!(tok.next(), Some("255"));
        let vals: Vec<u8> = tok.map(|t| t.parse().unwrap()).collect();
        assert_eq!(vals.len(), w * h * 3);
        (w, h, vals.chunks(3).map(|c| [c[0], c[1], c[2]]).collect())
    }

    #[test]
    fn census_of_path_with_each_strategy() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = census(&g, &SimState::new(vec![Cooperator, Defector, Loner, Punisher])).unwrap();
        assert_eq!(s.counts, [1, 1, 1, 1]);
        assert_eq!(s.phi, 1.0);
    }

    #[test]
    fn census_skips_isolated_nodes() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2)]).unwrap();
        let s = census(&g, &SimState::uniform(5, Loner)).unwrap();
        assert_eq!(s.counts, [0, 0, 3, 0]);
        assert_eq!(s.phi, 0.0);
    }

    #[test]
    fn phi_examples() {
        assert!((coexistence_value([250.0; 4]) - 250.0).abs() < 1e-12);
        assert!((coexistence_value([269.1, 201.2, 335.2, 194.4]) - 243.7).abs() < 0.1);
        assert_eq!(coexistence_value([1000.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn ppm_colors() {
        let ppm = render_grid_ppm(&SimState::new(vec![Cooperator, Loner]), 2, 1).unwrap();
        assert_eq!(ppm, "P3\n2 1\n255\n255 0 0 0 255 0\n");
        let ppm = render_grid_ppm(&SimState::uniform(2500, Defector), 50, 50).unwrap();
        let (w, h, px) = parse_p3(&ppm);
        assert_eq!((w, h), (50, 50));
        assert!(px.iter().all(|&p| p == [0, 0, 255]));
    }

    #[test]
    fn ppm_size_mismatch() {
        assert!(matches!(render_grid_ppm(&SimState::uniform(10, Loner), 3, 3), Err(Error::Sizing(_))));
    }

    #[test]
    fn trace_format() {
        let g = grid_torus(3, 3, Neighborhood::Moore).unwrap();
        let snap = census(&g, &SimState::uniform(9, Punisher)).unwrap();
        assert_eq!(trace_csv(&[snap]), "tick,n_c,n_d,n_l,n_p,phi\n0,0,0,0,9,0\n");
    }

    proptest! {
        #[test]
        fn render_round_trips(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
            let strategies: Vec<Strategy> = (0..w * h)
                .map(|i| Strategy::ALL[((seed >> (i % 60)) as usize + i) % 4])
                .collect();
            let state = SimState::new(strategies.clone());
            let (pw, ph, px) = parse_p3(&render_grid_ppm(&state, w, h).unwrap());
            prop_assert_eq!((pw, ph), (w, h));
            for (p, s) in px.iter().zip(&strategies) {
                prop_assert_eq!(*p, strategy_color(*s));
            }
        }

        #[test]
        fn phi_am_gm_symmetry_scaling(a in 0.0f64..1e4, b in 0.0f64..1e4, c in 0.0f64..1e4, d in 0.0f64..1e4, k in 0.01f64..100.0) {
            let phi = coexistence_value([a, b, c, d]);
            prop_assert!(phi <= (a + b + c + d) / 4.0 * (1.0 + 1e-12));
            let perm = coexistence_value([c, a, d, b]);
            prop_assert!((phi - perm).abs() <= 1e-9 * phi.max(1.0));
            let scaled = coexistence_value([k * a, k * b, k * c, k * d]);
            prop_assert!((scaled - k * phi).abs() <= 1e-9 * (k * phi).max(1.0));
        }
    }
}
