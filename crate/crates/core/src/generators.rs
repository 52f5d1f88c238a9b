//! Seeded generators for the stylized networks compared in the sweeps.
//!
//! The complex-network generators all aim at a fixed number of undirected
//! edges (8000 for 1000 nodes, mean degree 16) so that structure, not
//! density, is what varies between them.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{grid_torus, Graph, Neighborhood};
use crate::rng::{stream, Stream, StreamLabel};

/// Parameters for one network family.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSpec {
    GridMoore {
        width: usize,
        height: usize,
    },
    GridVonNeumann {
        width: usize,
        height: usize,
    },
    /// Each node linked to the `k / 2` nearest nodes on either side of a ring.
    RingLattice {
        n: usize,
        k: usize,
    },
    /// Dense blocks of near-equal size, topped up with random inter-block edges.
    Cellular {
        n: usize,
        cells: usize,
        inner_density: f64,
        target_edges: usize,
    },
    /// Dense core, core-periphery links, no periphery-periphery links.
    CorePeriphery {
        n: usize,
        core_fraction: f64,
        core_density: f64,
        target_edges: usize,
    },
    /// Uniform sample of `target_edges` distinct pairs.
    ErdosRenyi {
        n: usize,
        target_edges: usize,
    },
    /// Preferential attachment grown from a sparse seed core.
    ScaleFree {
        n: usize,
        seed_core_size: usize,
        seed_core_density: f64,
        attach_count: usize,
        /// Trailing nodes left with degree zero.
        isolated_extra: usize,
        /// Top up with degree-proportional edges to this count.
        target_edges: Option<usize>,
    },
    /// Ring lattice with edge rewiring plus random shortcuts.
    SmallWorld {
        n: usize,
        k: usize,
        rewire_prob: f64,
        add_prob: f64,
        target_edges: Option<usize>,
    },
}

impl NetworkSpec {
    pub fn node_count(&self) -> usize {
        match *self {
            NetworkSpec::GridMoore { width, height } | NetworkSpec::GridVonNeumann { width, height } => {
                width * height
            }
            NetworkSpec::RingLattice { n, .. }
            | NetworkSpec::Cellular { n, .. }
            | NetworkSpec::CorePeriphery { n, .. }
            | NetworkSpec::ErdosRenyi { n, .. }
            | NetworkSpec::ScaleFree { n, .. }
            | NetworkSpec::SmallWorld { n, .. } => n,
        }
    }

    /// `(width, height)` when the network is a torus grid.
    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        match *self {
            NetworkSpec::GridMoore { width, height } | NetworkSpec::GridVonNeumann { width, height } => {
                Some((width, height))
            }
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NetworkSpec::GridMoore { .. } => "grid_moore",
            NetworkSpec::GridVonNeumann { .. } => "grid_von_neumann",
            NetworkSpec::RingLattice { .. } => "ring_lattice",
            NetworkSpec::Cellular { .. } => "cellular",
            NetworkSpec::CorePeriphery { .. } => "core_periphery",
            NetworkSpec::ErdosRenyi { .. } => "erdos_renyi",
            NetworkSpec::ScaleFree { .. } => "scale_free",
            NetworkSpec::SmallWorld { .. } => "small_world",
        }
    }

    /// The 1000-node configurations used in the network-structure comparison.
    pub fn preset(name: &str) -> Option<NetworkSpec> {
        let spec = match name {
            "grid_moore" => NetworkSpec::GridMoore { width: 40, height: 25 },
            "grid_von_neumann" => NetworkSpec::GridVonNeumann { width: 40, height: 25 },
            "ring_lattice" => NetworkSpec::RingLattice { n: 1000, k: 16 },
            "cellular" => {
                NetworkSpec::Cellular { n: 1000, cells: 52, inner_density: 0.40, target_edges: 7995 }
            }
            "core_periphery" => NetworkSpec::CorePeriphery {
                n: 1000,
                core_fraction: 0.13,
                core_density: 0.50,
                target_edges: 8003,
            },
            "erdos_renyi" => NetworkSpec::ErdosRenyi { n: 1000, target_edges: 8000 },
            "scale_free" => NetworkSpec::ScaleFree {
                n: 1000,
                seed_core_size: 40,
                seed_core_density: 0.01,
                attach_count: 8,
                isolated_extra: 109,
                target_edges: Some(8004),
            },
            "small_world" => NetworkSpec::SmallWorld {
                n: 1000,
                k: 16,
                rewire_prob: 0.05,
                add_prob: 0.055,
                target_edges: Some(8005),
            },
            _ => return None,
        };
        Some(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::Argument(format!("{name} must lie in [0, 1], got {x}")))
            }
        };
        if self.node_count() == 0 {
            return Err(Error::Argument("network needs at least one node".into()));
        }
        match *self {
            NetworkSpec::Cellular { inner_density, cells, n, .. } => {
                prob("inner_density", inner_density)?;
                if cells == 0 || cells > n {
                    return Err(Error::Argument(format!("cell count {cells} must be in 1..={n}")));
                }
            }
            NetworkSpec::CorePeriphery { core_fraction, core_density, .. } => {
                prob("core_fraction", core_fraction)?;
                prob("core_density", core_density)?;
            }
            NetworkSpec::ScaleFree { n, seed_core_size, seed_core_density, isolated_extra, .. } => {
                prob("seed_core_density", seed_core_density)?;
                if seed_core_size + isolated_extra > n {
                    return Err(Error::Argument(format!(
                        "seed core {seed_core_size} plus {isolated_extra} isolated nodes exceeds n={n}"
                    )));
                }
            }
            NetworkSpec::SmallWorld { rewire_prob, add_prob, .. } => {
                prob("rewire_prob", rewire_prob)?;
                prob("add_prob", add_prob)?;
            }
            _ => {}
        }
        Ok(())
    }
}

fn pair_capacity(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Build the network described by `spec`; identical `(spec, seed)` give identical graphs.
pub fn generate_network(spec: &NetworkSpec, seed: u64) -> Result<Graph> {
    spec.validate()?;
    let mut rng = stream(seed, StreamLabel::Graph);
    let graph = match *spec {
        NetworkSpec::GridMoore { width, height } => grid_torus(width, height, Neighborhood::Moore)?,
        NetworkSpec::GridVonNeumann { width, height } => grid_torus(width, height, Neighborhood::VonNeumann)?,
        NetworkSpec::RingLattice { n, k } => finish(n, ring_edges(n, k)?)?,
        NetworkSpec::ErdosRenyi { n, target_edges } => erdos_renyi(n, target_edges, &mut rng)?,
        NetworkSpec::Cellular { n, cells, inner_density, target_edges } => {
            cellular(n, cells, inner_density, target_edges, &mut rng)?
        }
        NetworkSpec::CorePeriphery { n, core_fraction, core_density, target_edges } => {
            core_periphery(n, core_fraction, core_density, target_edges, &mut rng)?
        }
        NetworkSpec::ScaleFree {
            n,
            seed_core_size,
            seed_core_density,
            attach_count,
            isolated_extra,
            target_edges,
        } => scale_free(
            n,
            seed_core_size,
            seed_core_density,
            attach_count,
            isolated_extra,
            target_edges,
            &mut rng,
        )?,
        NetworkSpec::SmallWorld { n, k, rewire_prob, add_prob, target_edges } => {
            small_world(n, k, rewire_prob, add_prob, target_edges, &mut rng)?
        }
    };
    debug_assert!(graph.validate().is_ok());
    Ok(graph)
}

type EdgeSet = BTreeSet<(usize, usize)>;

fn ordered(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

fn finish(n: usize, edges: EdgeSet) -> Result<Graph> {
    Graph::from_edges(n, &edges.into_iter().collect::<Vec<_>>())
}

fn ring_edges(n: usize, k: usize) -> Result<EdgeSet> {
    if !k.is_multiple_of(2) {
        return Err(Error::Infeasible(format!("ring lattice degree k={k} must be even")));
    }
    if k >= n {
        return Err(Error::Infeasible(format!("ring lattice degree k={k} must be below n={n}")));
    }
    let mut edges = EdgeSet::new();
    for u in 0..n {
        for j in 1..=k / 2 {
            edges.insert(ordered(u, (u + j) % n));
        }
    }
    Ok(edges)
}

/// Insert pairs from `draw` until `edges` holds `target` entries.
fn fill_random<F>(edges: &mut EdgeSet, target: usize, mut draw: F, rng: &mut Stream)
where
    F: FnMut(&mut Stream) -> (usize, usize),
{
    while edges.len() < target {
        let (u, v) = draw(rng);
        if u != v {
            edges.insert(ordered(u, v));
        }
    }
}

fn erdos_renyi(n: usize, target: usize, rng: &mut Stream) -> Result<Graph> {
    let cap = pair_capacity(n);
    if target > cap {
        return Err(Error::Infeasible(format!(
            "{target} edges exceeds the complete-graph bound {cap} for n={n}"
        )));
    }
    if target * 2 <= cap {
        let mut edges = EdgeSet::new();
        fill_random(&mut edges, target, |r| (r.random_range(0..n), r.random_range(0..n)), rng);
        return finish(n, edges);
    }
    // Dense: sample the complement instead.
    let mut missing = EdgeSet::new();
    fill_random(&mut missing, cap - target, |r| (r.random_range(0..n), r.random_range(0..n)), rng);
    let mut edges = EdgeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if !missing.contains(&(u, v)) {
                edges.insert((u, v));
            }
        }
    }
    finish(n, edges)
}

/// Contiguous blocks whose sizes differ by at most one.
fn block_bounds(n: usize, blocks: usize) -> Vec<usize> {
    (0..=blocks).map(|i| i * n / blocks).collect()
}

fn cellular(n: usize, cells: usize, inner_density: f64, target: usize, rng: &mut Stream) -> Result<Graph> {
    let bounds = block_bounds(n, cells);
    let mut cell_of = vec![0usize; n];
    let mut inner_pairs = 0usize;
    for c in 0..cells {
        cell_of[bounds[c]..bounds[c + 1]].fill(c);
        inner_pairs += pair_capacity(bounds[c + 1] - bounds[c]);
    }
    let outer_pairs = pair_capacity(n) - inner_pairs;

    let mut edges = EdgeSet::new();
    for c in 0..cells {
        for u in bounds[c]..bounds[c + 1] {
            for v in u + 1..bounds[c + 1] {
                if rng.random_bool(inner_density) {
                    edges.insert((u, v));
                }
            }
        }
    }
    if edges.len() > target {
        return Err(Error::Infeasible(format!(
            "cells alone produced {} edges, above the target {target}",
            edges.len()
        )));
    }
    if target - edges.len() > outer_pairs {
        return Err(Error::Infeasible(format!(
            "target {target} needs more than the {outer_pairs} available inter-cell pairs"
        )));
    }
    fill_random(
        &mut edges,
        target,
        |r| loop {
            let (u, v) = (r.random_range(0..n), r.random_range(0..n));
            if cell_of[u] != cell_of[v] {
                break (u, v);
            }
        },
        rng,
    );
    finish(n, edges)
}

fn core_periphery(
    n: usize,
    core_fraction: f64,
    core_density: f64,
    target: usize,
    rng: &mut Stream,
) -> Result<Graph> {
    let core = ((n as f64) * core_fraction).round() as usize;
    let periphery = n - core;
    let mut edges = EdgeSet::new();
    for u in 0..core {
        for v in u + 1..core {
            if rng.random_bool(core_density) {
                edges.insert((u, v));
            }
        }
    }
    if edges.len() > target {
        return Err(Error::Infeasible(format!(
            "core block alone produced {} edges, above the target {target}",
            edges.len()
        )));
    }
    if target - edges.len() > core * periphery {
        return Err(Error::Infeasible(format!(
            "target {target} needs more than the {} available core-periphery pairs",
            core * periphery
        )));
    }
    fill_random(&mut edges, target, |r| (r.random_range(0..core), core + r.random_range(0..periphery)), rng);
    finish(n, edges)
}

/// Growing graph with a degree-proportional sampling pool.
struct Growth {
    edges: EdgeSet,
    /// One entry per edge endpoint; uniform draws from it are degree-proportional.
    endpoints: Vec<usize>,
    degree: Vec<usize>,
    live: usize,
}

impl Growth {
    fn new(n: usize) -> Self {
        Growth { edges: EdgeSet::new(), endpoints: Vec::new(), degree: vec![0; n], live: 0 }
    }

    fn link(&mut self, u: usize, v: usize) {
        self.edges.insert(ordered(u, v));
        for w in [u, v] {
            self.endpoints.push(w);
            if self.degree[w] == 0 {
                self.live += 1;
            }
            self.degree[w] += 1;
        }
    }

    fn preferential(&self, rng: &mut Stream) -> usize {
        self.endpoints[rng.random_range(0..self.endpoints.len())]
    }
}

#[allow(clippy::too_many_arguments)]
fn scale_free(
    n: usize,
    seed_core_size: usize,
    seed_core_density: f64,
    attach_count: usize,
    isolated_extra: usize,
    target: Option<usize>,
    rng: &mut Stream,
) -> Result<Graph> {
    let grown = n - isolated_extra;
    let mut g = Growth::new(n);

    for u in 0..seed_core_size {
        for v in u + 1..seed_core_size {
            if rng.random_bool(seed_core_density) {
                g.link(u, v);
            }
        }
    }

    for u in seed_core_size..grown {
        let wanted = attach_count.min(u);
        let mut chosen: Vec<usize> = Vec::with_capacity(wanted);
        while chosen.len() < wanted {
            // Fall back to uniform picks once every connected node is taken.
            let taken_live = chosen.iter().filter(|&&c| g.degree[c] > 0).count();
            let v = if g.live > taken_live { g.preferential(rng) } else { rng.random_range(0..u) };
            if !chosen.contains(&v) {
                chosen.push(v);
            }
        }
        for v in chosen {
            g.link(u, v);
        }
    }

    if let Some(target) = target {
        let cap = pair_capacity(grown);
        if g.edges.len() > target {
            return Err(Error::Infeasible(format!(
                "growth alone produced {} edges, above the target {target}",
                g.edges.len()
            )));
        }
        if target > cap {
            return Err(Error::Infeasible(format!(
                "{target} edges exceeds the bound {cap} for {grown} connected nodes"
            )));
        }
        while g.edges.len() < target {
            let u = rng.random_range(0..grown);
            let v = if g.endpoints.is_empty() { rng.random_range(0..grown) } else { g.preferential(rng) };
            if u != v && !g.edges.contains(&ordered(u, v)) {
                g.link(u, v);
            }
        }
    }
    finish(n, g.edges)
}

fn small_world(
    n: usize,
    k: usize,
    rewire_prob: f64,
    add_prob: f64,
    target: Option<usize>,
    rng: &mut Stream,
) -> Result<Graph> {
    let mut edges = ring_edges(n, k)?;
    if let Some(target) = target {
        if target < edges.len() {
            return Err(Error::Infeasible(format!(
                "target {target} is below the {} edges of the underlying lattice",
                edges.len()
            )));
        }
    }
    let cap = pair_capacity(n);

    // Rewire the far endpoint of each lattice edge, in lattice order.
    for j in 1..=k / 2 {
        for u in 0..n {
            let old = ordered(u, (u + j) % n);
            if !rng.random_bool(rewire_prob) || !edges.contains(&old) {
                continue;
            }
            let degree_u = edges.iter().filter(|&&(a, b)| a == u || b == u).count();
            if degree_u >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !edges.contains(&ordered(u, w)) {
                    break w;
                }
            };
            edges.remove(&old);
            edges.insert(ordered(u, w));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for u in order {
        if target.is_some_and(|t| edges.len() >= t) || edges.len() >= cap {
            break;
        }
        if !rng.random_bool(add_prob) {
            continue;
        }
        for _ in 0..n {
            let w = rng.random_range(0..n);
            if w != u && edges.insert(ordered(u, w)) {
                break;
            }
        }
    }
    finish(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn within_one_percent(actual: usize, target: usize) -> bool {
        (actual as f64 - target as f64).abs() <= 0.01 * target as f64
    }

    #[test]
    fn ring_lattice_16() {
        let g = generate_network(&NetworkSpec::RingLattice { n: 1000, k: 16 }, 0).unwrap();
        assert_eq!(g.edge_count(), 8000);
        assert!((0..1000).all(|v| g.degree(v) == 16));
        assert!(g.has_edge(0, 8) && g.has_edge(0, 992) && !g.has_edge(0, 9));
    }

    #[test]
    fn ring_lattice_rejects_bad_k() {
        assert!(matches!(
            generate_network(&NetworkSpec::RingLattice { n: 10, k: 12 }, 0),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            generate_network(&NetworkSpec::RingLattice { n: 10, k: 3 }, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn erdos_renyi_exact_count() {
        let spec = NetworkSpec::ErdosRenyi { n: 1000, target_edges: 8000 };
        let a = generate_network(&spec, 11).unwrap();
        assert_eq!(a.edge_count(), 8000);
        assert_eq!(a, generate_network(&spec, 11).unwrap());
        assert_ne!(a, generate_network(&spec, 12).unwrap());
    }

    #[test]
    fn erdos_renyi_complete_and_dense() {
        let g = generate_network(&NetworkSpec::ErdosRenyi { n: 30, target_edges: 435 }, 3).unwrap();
        assert!((0..30).all(|v| g.degree(v) == 29));
        let g = generate_network(&NetworkSpec::ErdosRenyi { n: 30, target_edges: 400 }, 3).unwrap();
        assert_eq!(g.edge_count(), 400);
        assert!(matches!(
            generate_network(&NetworkSpec::ErdosRenyi { n: 30, target_edges: 436 }, 3),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn erdos_renyi_pairs_are_roughly_uniform() {
        // Each of the 45 pairs of K10 appears with probability 20/45 per draw.
        let mut hits = vec![0usize; 100];
        let trials = 4000;
        for s in 0..trials {
            let g = generate_network(&NetworkSpec::ErdosRenyi { n: 10, target_edges: 20 }, s).unwrap();
            for (u, v) in g.edges() {
                hits[u * 10 + v] += 1;
            }
        }
        let expected = trials as f64 * 20.0 / 45.0;
        for u in 0..10 {
            for v in u + 1..10 {
                let h = hits[u * 10 + v] as f64;
                assert!((h - expected).abs() < 0.1 * expected, "pair {u}-{v}: {h}");
            }
        }
    }

    #[test]
    fn presets_hit_edge_targets() {
        for (name, target) in [
            ("cellular", 7995),
            ("core_periphery", 8003),
            ("erdos_renyi", 8000),
            ("scale_free", 8004),
            ("small_world", 8005),
        ] {
            let spec = NetworkSpec::preset(name).unwrap();
            let g = generate_network(&spec, 5).unwrap();
            g.validate().unwrap();
            assert_eq!(g.node_count(), 1000);
            assert!(within_one_percent(g.edge_count(), target), "{name}: {}", g.edge_count());
            assert_eq!(g, generate_network(&spec, 5).unwrap(), "{name} not deterministic");
        }
    }

    #[test]
    fn core_periphery_has_no_periphery_links() {
        let g = generate_network(&NetworkSpec::preset("core_periphery").unwrap(), 1).unwrap();
        assert!(g.edges().all(|(u, _)| u < 130));
        let core_edges = g.edges().filter(|&(_, v)| v < 130).count();
        // 8385 core pairs at density 0.5
        assert!((3900..4500).contains(&core_edges), "{core_edges}");
    }

    #[test]
    fn cellular_blocks_are_dense() {
        let g = generate_network(&NetworkSpec::preset("cellular").unwrap(), 1).unwrap();
        let bounds = block_bounds(1000, 52);
        let cell = |v: usize| bounds.partition_point(|&b| b <= v) - 1;
        let inner = g.edges().filter(|&(u, v)| cell(u) == cell(v)).count();
        let inner_pairs: usize = (0..52).map(|c| pair_capacity(bounds[c + 1] - bounds[c])).sum();
        let density = inner as f64 / inner_pairs as f64;
        assert!((0.37..0.43).contains(&density), "{density}");
    }

    #[test]
    fn scale_free_heavy_tail() {
        let spec = NetworkSpec::ScaleFree {
            n: 1000,
            seed_core_size: 40,
            seed_core_density: 0.01,
            attach_count: 8,
            isolated_extra: 0,
            target_edges: None,
        };
        for seed in 0..5 {
            let g = generate_network(&spec, seed).unwrap();
            assert!(g.max_degree() as f64 > 3.0 * g.mean_degree(), "seed {seed}");
        }
    }

    #[test]
    fn scale_free_preset_isolates() {
        let g = generate_network(&NetworkSpec::preset("scale_free").unwrap(), 9).unwrap();
        assert!((891..1000).all(|v| g.degree(v) == 0));
        assert_eq!(g.isolated_count(), 109 + (0..891).filter(|&v| g.degree(v) == 0).count());
        assert!(g.max_degree() as f64 > 3.0 * g.mean_degree());
    }

    #[test]
    fn small_world_rejects_low_target() {
        let spec = NetworkSpec::SmallWorld {
            n: 100,
            k: 4,
            rewire_prob: 0.1,
            add_prob: 0.1,
            target_edges: Some(150),
        };
        assert!(matches!(generate_network(&spec, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn bad_probabilities_rejected() {
        let spec =
            NetworkSpec::CorePeriphery { n: 100, core_fraction: 1.5, core_density: 0.5, target_edges: 10 };
        assert!(matches!(generate_network(&spec, 0), Err(Error::Argument(_))));
    }
}
