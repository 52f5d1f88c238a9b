//! Tick-by-tick population dynamics: participation, best response, mutation.

use rand::distr::{Bernoulli, Distribution};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::payoff::{best_response, NeighborCounts, PayoffParams, Strategy};
use crate::rng::{stream, Stream, StreamLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateMode {
    /// Every participant responds to the state at the start of the tick.
    Synchronous,
    /// Participants update one at a time in random order, seeing earlier updates.
    #[default]
    SequentialRandomOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: PayoffParams,
    pub participation_rate: f64,
    pub mutation_rate: f64,
    pub ticks: u64,
    pub master_seed: u64,
    pub update_mode: UpdateMode,
}

impl SimConfig {
    pub fn new(participation_rate: f64, mutation_rate: f64, ticks: u64, master_seed: u64) -> Self {
        SimConfig {
            params: PayoffParams::DEFAULT,
            participation_rate,
            mutation_rate,
            ticks,
            master_seed,
            update_mode: UpdateMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for (name, x) in
            [("participation rate", self.participation_rate), ("mutation rate", self.mutation_rate)]
        {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Argument(format!("{name} must lie in [0, 1], got {x}")));
            }
        }
        if self.ticks == 0 {
            return Err(Error::Argument("ticks must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimState {
    pub strategies: Vec<Strategy>,
    pub tick: u64,
}

impl SimState {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        SimState { strategies, tick: 0 }
    }

    pub fn uniform(node_count: usize, s: Strategy) -> Self {
        SimState::new(vec![s; node_count])
    }

    /// Count of each strategy over all nodes.
    pub fn totals(&self) -> [usize; 4] {
        let mut t = [0usize; 4];
        for &s in &self.strategies {
            t[s.index()] += 1;
        }
        t
    }
}

/// The four independent random streams of one run.
#[derive(Debug, Clone)]
pub struct Streams {
    pub init: Stream,
    pub participation: Stream,
    pub tie: Stream,
    pub mutation: Stream,
}

impl Streams {
    pub fn from_seed(master_seed: u64) -> Self {
        Streams {
            init: stream(master_seed, StreamLabel::Init),
            participation: stream(master_seed, StreamLabel::Participation),
            tie: stream(master_seed, StreamLabel::Tie),
            mutation: stream(master_seed, StreamLabel::Mutation),
        }
    }
}

/// Independent uniform strategy per node, tick 0.
pub fn init_uniform<R: Rng + ?Sized>(graph: &Graph, rng: &mut R) -> SimState {
    let strategies = (0..graph.node_count()).map(|_| Strategy::ALL[rng.random_range(0..4)]).collect();
    SimState::new(strategies)
}

#[inline]
fn census_unchecked(graph: &Graph, strategies: &[Strategy], node: usize) -> NeighborCounts {
    let mut counts = [0u32; 4];
    for &w in graph.neighbors(node) {
        counts[strategies[w as usize].index()] += 1;
    }
    NeighborCounts(counts)
}

/// Strategy counts among the neighbors of `node`.
pub fn census_neighbors(graph: &Graph, state: &SimState, node: usize) -> Result<NeighborCounts> {
    if node >= graph.node_count() {
        return Err(Error::Index { node, count: graph.node_count() });
    }
    Ok(census_unchecked(graph, &state.strategies, node))
}

fn check_state(graph: &Graph, state: &SimState) -> Result<()> {
    if state.strategies.len() != graph.node_count() {
        return Err(Error::Argument(format!(
            "state has {} entries but graph has {} nodes",
            state.strategies.len(),
            graph.node_count()
        )));
    }
    Ok(())
}

/// A run in progress. Holds the state, the streams and scratch space.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    state: SimState,
    streams: Streams,
    participate: Option<Bernoulli>,
    mutate: Option<Bernoulli>,
    scratch: Vec<Strategy>,
    order: Vec<u32>,
}

impl Simulation {
    /// Seed streams from `config.master_seed` and draw a uniform initial state.
    pub fn new(graph: &Graph, config: SimConfig) -> Result<Self> {
        config.validate()?;
        let mut streams = Streams::from_seed(config.master_seed);
        let state = init_uniform(graph, &mut streams.init);
        Self::with_state(graph, config, state, streams)
    }

    pub fn with_state(graph: &Graph, config: SimConfig, state: SimState, streams: Streams) -> Result<Self> {
        config.validate()?;
        check_state(graph, &state)?;
        let rate = |x: f64| (x > 0.0).then(|| Bernoulli::new(x).expect("rate validated"));
        Ok(Simulation {
            participate: rate(config.participation_rate),
            mutate: rate(config.mutation_rate),
            config,
            scratch: Vec::with_capacity(state.strategies.len()),
            order: Vec::new(),
            state,
            streams,
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn into_state(self) -> SimState {
        self.state
    }

    /// Advance one tick. `graph` must be the graph the simulation was built on.
    pub fn step(&mut self, graph: &Graph) {
        debug_assert_eq!(graph.node_count(), self.state.strategies.len());
        let n = graph.node_count();
        let params = self.config.params;
        if let Some(participate) = self.participate {
            match self.config.update_mode {
                UpdateMode::Synchronous => {
                    let current = &self.state.strategies;
                    self.scratch.clear();
                    self.scratch.extend_from_slice(current);
                    for v in 0..n {
                        if participate.sample(&mut self.streams.participation) {
                            let counts = census_unchecked(graph, current, v);
                            self.scratch[v] = best_response(counts, &params, &mut self.streams.tie);
                        }
                    }
                    std::mem::swap(&mut self.state.strategies, &mut self.scratch);
                }
                UpdateMode::SequentialRandomOrder => {
                    self.order.clear();
                    for v in 0..n {
                        if participate.sample(&mut self.streams.participation) {
                            self.order.push(v as u32);
                        }
                    }
                    self.order.shuffle(&mut self.streams.participation);
                    let strategies = &mut self.state.strategies;
                    for &v in &self.order {
                        let counts = census_unchecked(graph, strategies, v as usize);
                        strategies[v as usize] = best_response(counts, &params, &mut self.streams.tie);
                    }
                }
            }
        }
        if let Some(mutate) = self.mutate {
            let rng = &mut self.streams.mutation;
            for s in self.state.strategies.iter_mut() {
                if mutate.sample(rng) {
                    let shift = rng.random_range(1..4);
                    *s = Strategy::ALL[(s.index() + shift) % 4];
                }
            }
        }
        self.state.tick += 1;
    }
}

/// One tick from `state`, returning the next state. `streams` advance in place.
pub fn step(graph: &Graph, state: &SimState, config: &SimConfig, streams: &mut Streams) -> Result<SimState> {
    let mut sim = Simulation::with_state(graph, *config, state.clone(), streams.clone())?;
    sim.step(graph);
    *streams = sim.streams;
    Ok(sim.state)
}

/// Run `config.ticks` steps from a uniform random start.
///
/// `recorder` sees the initial state (tick 0) and the state after every step.
pub fn run<F>(graph: &Graph, config: &SimConfig, mut recorder: F) -> Result<SimState>
where
    F: FnMut(&SimState),
{
    let mut sim = Simulation::new(graph, *config)?;
    recorder(sim.state());
    for _ in 0..config.ticks {
        sim.step(graph);
        recorder(sim.state());
    }
    Ok(sim.into_state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{grid_torus, Neighborhood};
    use crate::payoff::aggregate_payoffs;
    use Strategy::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn config(p: f64, mu: f64, seed: u64) -> SimConfig {
        SimConfig { update_mode: UpdateMode::Synchronous, ..SimConfig::new(p, mu, 1, seed) }
    }

    #[test]
    fn init_is_reproducible() {
        let g = path(4);
        let a = init_uniform(&g, &mut stream(9, StreamLabel::Init));
        let b = init_uniform(&g, &mut stream(9, StreamLabel::Init));
        assert_eq!(a, b);
        assert_eq!(a.tick, 0);
    }

    #[test]
    fn init_single_node_covers_all_strategies() {
        let g = Graph::from_edges(1, &[]).unwrap();
        let mut seen = [0usize; 4];
        for seed in 0..400 {
            let s = init_uniform(&g, &mut stream(seed, StreamLabel::Init));
            seen[s.strategies[0].index()] += 1;
        }
        assert!(seen.iter().all(|&c| c > 60), "{seen:?}");
    }

    #[test]
    fn init_frequencies_large_population() {
        let g = Graph::from_edges(100_000, &[]).unwrap();
        let s = init_uniform(&g, &mut stream(1, StreamLabel::Init));
        for t in s.totals() {
            let f = t as f64 / 100_000.0;
            assert!((0.24..=0.26).contains(&f), "{f}");
        }
    }

    #[test]
    fn census_examples() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let st = SimState::new(vec![Loner, Cooperator, Cooperator, Defector]);
        assert_eq!(census_neighbors(&g, &st, 0).unwrap(), NeighborCounts::new(2, 1, 0, 0));
        let g = Graph::from_edges(2, &[]).unwrap();
        let st = SimState::uniform(2, Cooperator);
        assert_eq!(census_neighbors(&g, &st, 1).unwrap(), NeighborCounts::default());
        assert!(matches!(census_neighbors(&g, &st, 2), Err(Error::Index { .. })));
        let k9 = grid_torus(3, 3, Neighborhood::Moore).unwrap();
        let st = SimState::uniform(9, Loner);
        for v in 0..9 {
            assert_eq!(census_neighbors(&k9, &st, v).unwrap(), NeighborCounts::new(0, 0, 8, 0));
        }
    }

    #[test]
    fn frozen_dynamics() {
        let g = grid_torus(5, 5, Neighborhood::Moore).unwrap();
        let start = init_uniform(&g, &mut stream(4, StreamLabel::Init));
        let mut streams = Streams::from_seed(4);
        let next = step(&g, &start, &config(0.0, 0.0, 4), &mut streams).unwrap();
        assert_eq!(next.strategies, start.strategies);
        assert_eq!(next.tick, 1);
    }

    #[test]
    fn all_cooperators_are_not_absorbing() {
        let g = grid_torus(6, 6, Neighborhood::Moore).unwrap();
        // Counts (8,0,0,0): C=760, D=800, L=100, P=800.
        assert_eq!(aggregate_payoffs(NeighborCounts::new(8, 0, 0, 0), &PayoffParams::DEFAULT)[0], 760.0);
        let start = SimState::uniform(36, Cooperator);
        let mut streams = Streams::from_seed(5);
        let next = step(&g, &start, &config(1.0, 0.0, 5), &mut streams).unwrap();
        assert!(next.strategies.iter().all(|&s| s == Defector || s == Punisher));
        let t = next.totals();
        assert!(t[1] > 0 && t[3] > 0, "{t:?}");
    }

    #[test]
    fn forced_mutation_never_keeps_strategy() {
        let g = grid_torus(10, 10, Neighborhood::VonNeumann).unwrap();
        let start = init_uniform(&g, &mut stream(6, StreamLabel::Init));
        let mut streams = Streams::from_seed(6);
        let next = step(&g, &start, &config(0.0, 1.0, 6), &mut streams).unwrap();
        assert!(start.strategies.iter().zip(&next.strategies).all(|(a, b)| a != b));
    }

    #[test]
    fn non_participants_keep_strategy_without_mutation() {
        // With p = 1/2 some nodes sit out; replay the participation stream to find them.
        let g = grid_torus(8, 8, Neighborhood::Moore).unwrap();
        let start = init_uniform(&g, &mut stream(7, StreamLabel::Init));
        let mut streams = Streams::from_seed(7);
        let mut replay = streams.participation.clone();
        let next = step(&g, &start, &config(0.5, 0.0, 7), &mut streams).unwrap();
        let bern = Bernoulli::new(0.5).unwrap();
        for v in 0..64 {
            if !bern.sample(&mut replay) {
                assert_eq!(next.strategies[v], start.strategies[v]);
            }
        }
    }

    #[test]
    fn mutation_marginal() {
        // One isolated node, p=0: each other strategy reached with probability mu/3.
        let g = Graph::from_edges(1, &[]).unwrap();
        let mu = 0.3;
        let trials = 30_000;
        let mut hits = [0usize; 4];
        let mut streams = Streams::from_seed(8);
        let start = SimState::uniform(1, Loner);
        for _ in 0..trials {
            let next = step(&g, &start, &config(0.0, mu, 8), &mut streams).unwrap();
            hits[next.strategies[0].index()] += 1;
        }
        let expect = trials as f64 * mu / 3.0;
        let sd = (trials as f64 * (mu / 3.0) * (1.0 - mu / 3.0)).sqrt();
        for s in [Cooperator, Defector, Punisher] {
            assert!((hits[s.index()] as f64 - expect).abs() < 5.0 * sd, "{hits:?}");
        }
    }

    #[test]
    fn mutation_applies_after_best_response() {
        // Two connected nodes, both Defector: counts (0,1,0,0) give C=-5, D=0, L=12.5, P=-50,
        // so both become Loner first and a forced mutation then leaves {C, D, P}.
        let g = path(2);
        let start = SimState::uniform(2, Defector);
        let mut seen = [[false; 4]; 2];
        for seed in 0..200 {
            let mut streams = Streams::from_seed(seed);
            let next = step(&g, &start, &config(1.0, 1.0, seed), &mut streams).unwrap();
            for v in 0..2 {
                seen[v][next.strategies[v].index()] = true;
            }
        }
        for row in seen {
            assert_eq!(row, [true, true, false, true]);
        }
    }

    #[test]
    fn population_is_conserved() {
        let g = grid_torus(10, 10, Neighborhood::Moore).unwrap();
        let cfg = SimConfig { ticks: 50, ..SimConfig::new(0.3, 0.05, 50, 3) };
        run(&g, &cfg, |s| assert_eq!(s.totals().iter().sum::<usize>(), 100)).unwrap();
    }

    #[test]
    fn run_of_one_tick_matches_step() {
        let g = grid_torus(7, 7, Neighborhood::Moore).unwrap();
        let cfg = SimConfig::new(0.7, 0.1, 1, 21);
        let via_run = run(&g, &cfg, |_| {}).unwrap();
        let mut streams = Streams::from_seed(21);
        let start = init_uniform(&g, &mut streams.init);
        let via_step = step(&g, &start, &cfg, &mut streams).unwrap();
        assert_eq!(via_run, via_step);
    }

    #[test]
    fn recorder_sees_every_tick() {
        let g = path(5);
        let cfg = SimConfig::new(1.0, 0.0, 12, 2);
        let mut ticks = Vec::new();
        run(&g, &cfg, |s| ticks.push(s.tick)).unwrap();
        assert_eq!(ticks, (0..=12).collect::<Vec<_>>());
    }

    #[test]
    fn sequential_all_cooperators_first_mover_defects_or_punishes() {
        // The first updater sees eight cooperators.
        let g = grid_torus(6, 6, Neighborhood::Moore).unwrap();
        let start = SimState::uniform(36, Cooperator);
        let cfg = SimConfig::new(1.0, 0.0, 1, 5);
        let mut streams = Streams::from_seed(5);
        let mut replay = streams.participation.clone();
        let next = step(&g, &start, &cfg, &mut streams).unwrap();
        let mut order: Vec<u32> = (0..36).collect();
        order.shuffle(&mut replay);
        let first = next.strategies[order[0] as usize];
        assert!(first == Defector || first == Punisher);
    }

    #[test]
    fn sequential_mode_sees_earlier_updates() {
        let g = grid_torus(10, 10, Neighborhood::Moore).unwrap();
        let mut cfg = SimConfig::new(1.0, 0.0, 30, 17);
        assert_eq!(cfg.update_mode, UpdateMode::SequentialRandomOrder);
        let a = run(&g, &cfg, |_| {}).unwrap();
        let b = run(&g, &cfg, |_| {}).unwrap();
        assert_eq!(a, b);
        cfg.update_mode = UpdateMode::Synchronous;
        assert_ne!(a, run(&g, &cfg, |_| {}).unwrap());
    }

    #[test]
    fn invalid_config_rejected() {
        let g = path(3);
        assert!(Simulation::new(&g, SimConfig::new(1.5, 0.0, 1, 0)).is_err());
        assert!(Simulation::new(&g, SimConfig::new(1.0, 0.0, 0, 0)).is_err());
        let start = SimState::uniform(2, Loner);
        assert!(step(&g, &start, &SimConfig::new(1.0, 0.0, 1, 0), &mut Streams::from_seed(0)).is_err());
    }
}
