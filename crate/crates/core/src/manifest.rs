//! Run manifests: a strict TOML document describing network, game, run and sweep.
//!
//! ```toml
//! network.kind = "grid_moore"
//! network.width = 40
//! network.height = 25
//! params.preset = "default"
//! plan.p_values = [0.1, 1.0]
//! plan.mu_values = [0.0, 0.01]
//! plan.replications = 30
//! output.dir = "results"
//! ```
//!
//! Unknown keys and keys that do not apply to the chosen network kind are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::{SimConfig, UpdateMode};
use crate::error::{Error, Result};
use crate::experiment::{ExperimentPlan, Measurement};
use crate::generators::{generate_network, NetworkSpec};
use crate::graph::{load_edge_list, Graph};
use crate::payoff::PayoffParams;

/// Per-family network settings. Unset fields fall back to the family's preset.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFields {
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub edges: Option<usize>,
    pub cells: Option<usize>,
    pub inner_density: Option<f64>,
    pub core_fraction: Option<f64>,
    pub core_density: Option<f64>,
    pub seed_core: Option<usize>,
    pub seed_density: Option<f64>,
    pub attach: Option<usize>,
    pub isolated: Option<usize>,
    pub rewire: Option<f64>,
    pub add: Option<f64>,
}

impl NetworkFields {
    fn set_names(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $( if self.$f.is_some() { names.push(stringify!($f)); } )* };
        }
        check!(
            width,
            height,
            n,
            k,
            edges,
            cells,
            inner_density,
            core_fraction,
            core_density,
            seed_core,
            seed_density,
            attach,
            isolated,
            rewire,
            add
        );
        names
    }

    /// Build a spec of family `kind`, overriding the family preset with any set fields.
    pub fn build(&self, kind: &str) -> Result<NetworkSpec> {
        let base = NetworkSpec::preset(kind)
            .ok_or_else(|| Error::Argument(format!("unknown network kind {kind:?}")))?;
        let allowed: &[&str] = match kind {
            "grid_moore" | "grid_von_neumann" => &["width", "height"],
            "ring_lattice" => &["n", "k"],
            "cellular" => &["n", "cells", "inner_density", "edges"],
            "core_periphery" => &["n", "core_fraction", "core_density", "edges"],
            "erdos_renyi" => &["n", "edges"],
            "scale_free" => &["n", "seed_core", "seed_density", "attach", "isolated", "edges"],
            "small_world" => &["n", "k", "rewire", "add", "edges"],
            _ => unreachable!("preset exists"),
        };
        if let Some(bad) = self.set_names().into_iter().find(|f| !allowed.contains(f)) {
            return Err(Error::Argument(format!("`{bad}` does not apply to a {kind} network")));
        }
        let spec = match base {
            NetworkSpec::GridMoore { width, height } => NetworkSpec::GridMoore {
                width: self.width.unwrap_or(width),
                height: self.height.unwrap_or(height),
            },
            NetworkSpec::GridVonNeumann { width, height } => NetworkSpec::GridVonNeumann {
                width: self.width.unwrap_or(width),
                height: self.height.unwrap_or(height),
            },
            NetworkSpec::RingLattice { n, k } => {
                NetworkSpec::RingLattice { n: self.n.unwrap_or(n), k: self.k.unwrap_or(k) }
            }
            NetworkSpec::Cellular { n, cells, inner_density, target_edges } => NetworkSpec::Cellular {
                n: self.n.unwrap_or(n),
                cells: self.cells.unwrap_or(cells),
                inner_density: self.inner_density.unwrap_or(inner_density),
                target_edges: self.edges.unwrap_or(target_edges),
            },
            NetworkSpec::CorePeriphery { n, core_fraction, core_density, target_edges } => {
                NetworkSpec::CorePeriphery {
                    n: self.n.unwrap_or(n),
                    core_fraction: self.core_fraction.unwrap_or(core_fraction),
                    core_density: self.core_density.unwrap_or(core_density),
                    target_edges: self.edges.unwrap_or(target_edges),
                }
            }
            NetworkSpec::ErdosRenyi { n, target_edges } => NetworkSpec::ErdosRenyi {
                n: self.n.unwrap_or(n),
                target_edges: self.edges.unwrap_or(target_edges),
            },
            NetworkSpec::ScaleFree {
                n,
                seed_core_size,
                seed_core_density,
                attach_count,
                isolated_extra,
                target_edges,
            } => {
                // A custom size without an explicit target grows freely.
                let target_edges = match (self.edges, self.n) {
                    (Some(e), _) => Some(e),
                    (None, Some(_)) => None,
                    (None, None) => target_edges,
                };
                NetworkSpec::ScaleFree {
                    n: self.n.unwrap_or(n),
                    seed_core_size: self.seed_core.unwrap_or(seed_core_size),
                    seed_core_density: self.seed_density.unwrap_or(seed_core_density),
                    attach_count: self.attach.unwrap_or(attach_count),
                    isolated_extra: self.isolated.unwrap_or(if self.n.is_some() {
                        0
                    } else {
                        isolated_extra
                    }),
                    target_edges,
                }
            }
            NetworkSpec::SmallWorld { n, k, rewire_prob, add_prob, target_edges } => {
                let target_edges = match (self.edges, self.n) {
                    (Some(e), _) => Some(e),
                    (None, Some(_)) => None,
                    (None, None) => target_edges,
                };
                NetworkSpec::SmallWorld {
                    n: self.n.unwrap_or(n),
                    k: self.k.unwrap_or(k),
                    rewire_prob: self.rewire.unwrap_or(rewire_prob),
                    add_prob: self.add.unwrap_or(add_prob),
                    target_edges,
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    kind: Option<String>,
    path: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(flatten)]
    fields: NetworkFields,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    preset: Option<String>,
    b: Option<f64>,
    c: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    sigma: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    p: f64,
    mu: f64,
    ticks: Option<u64>,
    seed: Option<u64>,
    update: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    p_values: Option<Vec<f64>>,
    mu_values: Option<Vec<f64>>,
    replications: Option<usize>,
    ticks: Option<u64>,
    base_seed: Option<u64>,
    null_p: Option<f64>,
    null_mu: Option<f64>,
    measurement: Option<String>,
    update: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    network: RawNetwork,
    #[serde(default)]
    params: RawParams,
    sim: Option<RawSim>,
    plan: Option<RawPlan>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSource {
    Spec(NetworkSpec),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub network: NetworkSource,
    /// Seed for stochastic network generators.
    pub network_seed: u64,
    pub params: PayoffParams,
    pub sim: Option<SimConfig>,
    pub plan: Option<ExperimentPlan>,
    pub output_dir: Option<PathBuf>,
}

pub fn parse_update_mode(text: &str) -> Result<UpdateMode> {
    match text {
        "synchronous" | "sync" => Ok(UpdateMode::Synchronous),
        "sequential" | "sequential_random_order" => Ok(UpdateMode::SequentialRandomOrder),
        other => Err(Error::Manifest(format!("unknown update mode {other:?}"))),
    }
}

/// `final` or `tail:<window>`.
pub fn parse_measurement(text: &str) -> Result<Measurement> {
    if text == "final" {
        return Ok(Measurement::FinalTick);
    }
    text.strip_prefix("tail:")
        .and_then(|w| w.parse::<u64>().ok())
        .filter(|&w| w > 0)
        .map(Measurement::TailMean)
        .ok_or_else(|| {
            Error::Manifest(format!("measurement must be `final` or `tail:<ticks>`, got {text:?}"))
        })
}

fn manifest_err(e: Error) -> Error {
    match e {
        Error::Manifest(_) => e,
        other => Error::Manifest(other.to_string()),
    }
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Manifest(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parse manifest text; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawManifest = toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;

        let network = match (raw.network.kind, raw.network.path) {
            (Some(_), Some(_)) => {
                return Err(Error::Manifest("network.kind and network.path are exclusive".into()))
            }
            (None, None) => return Err(Error::Manifest("network needs a kind or a path".into())),
            (Some(kind), None) => NetworkSource::Spec(raw.network.fields.build(&kind).map_err(manifest_err)?),
            (None, Some(path)) => {
                if raw.network.fields != NetworkFields::default() {
                    return Err(Error::Manifest("generator settings given alongside network.path".into()));
                }
                let path = base_dir.join(path);
                if !path.is_file() {
                    return Err(Error::Manifest(format!("graph file {} does not exist", path.display())));
                }
                NetworkSource::File(path)
            }
        };

        let mut params = match raw.params.preset.as_deref() {
            None => PayoffParams::DEFAULT,
            Some(name) => PayoffParams::preset(name)
                .ok_or_else(|| Error::Manifest(format!("unknown payoff preset {name:?}")))?,
        };
        let p = &raw.params;
        params.b = p.b.unwrap_or(params.b);
        params.c = p.c.unwrap_or(params.c);
        params.beta = p.beta.unwrap_or(params.beta);
        params.gamma = p.gamma.unwrap_or(params.gamma);
        params.sigma = p.sigma.unwrap_or(params.sigma);
        params.validate().map_err(manifest_err)?;

        let sim = match raw.sim {
            None => None,
            Some(s) => {
                let mut cfg = SimConfig::new(s.p, s.mu, s.ticks.unwrap_or(10_000), s.seed.unwrap_or(0));
                cfg.params = params;
                if let Some(mode) = s.update.as_deref() {
                    cfg.update_mode = parse_update_mode(mode)?;
                }
                cfg.validate().map_err(manifest_err)?;
                Some(cfg)
            }
        };

        let plan = match raw.plan {
            None => None,
            Some(rp) => {
                let defaults = ExperimentPlan::default();
                let plan = ExperimentPlan {
                    p_values: rp.p_values.unwrap_or(defaults.p_values),
                    mu_values: rp.mu_values.unwrap_or(defaults.mu_values),
                    replications: rp.replications.unwrap_or(defaults.replications),
                    ticks: rp.ticks.unwrap_or(defaults.ticks),
                    base_seed: rp.base_seed.unwrap_or(defaults.base_seed),
                    params,
                    null_condition: (
                        rp.null_p.unwrap_or(defaults.null_condition.0),
                        rp.null_mu.unwrap_or(defaults.null_condition.1),
                    ),
                    measurement: rp
                        .measurement
                        .as_deref()
                        .map(parse_measurement)
                        .transpose()?
                        .unwrap_or_default(),
                    update_mode: rp.update.as_deref().map(parse_update_mode).transpose()?.unwrap_or_default(),
                };
                Some(plan)
            }
        };

        Ok(RunManifest {
            network,
            network_seed: raw.network.seed.unwrap_or(0),
            params,
            sim,
            plan,
            output_dir: raw.output.dir.map(|d| base_dir.join(d)),
        })
    }

    /// Generate or load the network.
    pub fn build_graph(&self) -> Result<Graph> {
        match &self.network {
            NetworkSource::Spec(spec) => generate_network(spec, self.network_seed),
            NetworkSource::File(path) => load_edge_list(&fs::read_to_string(path)?),
        }
    }

    /// `(width, height)` when the network is a generated torus grid.
    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        match &self.network {
            NetworkSource::Spec(spec) => spec.grid_dims(),
            NetworkSource::File(_) => None,
        }
    }
}
