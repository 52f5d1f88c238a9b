//! Self-motivated agents playing a four-strategy prisoner's dilemma on networks.
//!
//! Agents sit on the nodes of a [`Graph`]. Each tick a random subset of them
//! switches to whichever of cooperate, defect, stay out (loner) or punish pays
//! best against their current neighbors; afterwards any agent may mutate to a
//! random other strategy. [`experiment`] sweeps the participation and mutation
//! rates over seeded replications and t-tests the outcomes.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod manifest;
pub mod metrics;
pub mod payoff;
pub mod rng;
pub mod stats;

pub use dynamics::{
    census_neighbors, init_uniform, run, step, SimConfig, SimState, Simulation, Streams, UpdateMode,
};
pub use error::{Error, Result};
pub use experiment::{
    run_condition, run_plan, summarize_plan, write_summary_csv, ConditionResult, ConditionSummary,
    ExperimentPlan, Measurement,
};
pub use generators::{generate_network, NetworkSpec};
pub use graph::{grid_torus, load_edge_list, save_edge_list, Graph, Neighborhood};
pub use manifest::RunManifest;
pub use metrics::{census, coexistence_value, render_grid_ppm, CountsSnapshot};
pub use payoff::{aggregate_payoffs, best_response, pairwise_payoff, NeighborCounts, PayoffParams, Strategy};
pub use stats::{significance_flag, summarize, welch_t, SampleSummary, WelchTest};
