//! Participation x mutation sweeps with seeded replications and t-tested summaries.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::dynamics::{SimConfig, Simulation, UpdateMode};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{census, coexistence_value};
use crate::payoff::PayoffParams;
use crate::rng::mix_words;
use crate::stats::{significance_flag, summarize, welch_t};

/// What each replication reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measurement {
    /// Census after the last tick.
    #[default]
    FinalTick,
    /// Mean census over the last `window` ticks.
    TailMean(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub p_values: Vec<f64>,
    pub mu_values: Vec<f64>,
    pub replications: usize,
    pub ticks: u64,
    pub base_seed: u64,
    pub params: PayoffParams,
    /// Baseline for the mu = 0 rows.
    pub null_condition: (f64, f64),
    pub measurement: Measurement,
    pub update_mode: UpdateMode,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            p_values: vec![0.001, 0.01, 0.1, 1.0],
            mu_values: vec![0.0, 0.0001, 0.001, 0.01, 0.1],
            replications: 30,
            ticks: 10_000,
            base_seed: 0,
            params: PayoffParams::DEFAULT,
            null_condition: (1.0, 0.0),
            measurement: Measurement::FinalTick,
            update_mode: UpdateMode::default(),
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.replications < 2 {
            return Err(Error::Argument(format!(
                "t-tests need at least 2 replications, got {}",
                self.replications
            )));
        }
        if self.ticks == 0 {
            return Err(Error::Argument("ticks must be at least 1".into()));
        }
        if self.p_values.is_empty() || self.mu_values.is_empty() {
            return Err(Error::Argument("sweep needs at least one p and one mu".into()));
        }
        for &x in self.p_values.iter().chain(&self.mu_values) {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Argument(format!("rate {x} outside [0, 1]")));
            }
        }
        if let Measurement::TailMean(0) = self.measurement {
            return Err(Error::Argument("tail window must be at least 1 tick".into()));
        }
        let (np, nmu) = self.null_condition;
        if !self.p_values.contains(&np) || !self.mu_values.contains(&nmu) {
            return Err(Error::Argument(format!(
                "null condition (p={np}, mu={nmu}) is not in the sweep grid"
            )));
        }
        Ok(())
    }

    /// Every `(p, mu)` cell of the sweep, in plan order.
    pub fn conditions(&self) -> Vec<(f64, f64)> {
        self.p_values.iter().flat_map(|&p| self.mu_values.iter().map(move |&mu| (p, mu))).collect()
    }

    pub fn sim_config(&self, p: f64, mu: f64, master_seed: u64) -> SimConfig {
        SimConfig {
            params: self.params,
            participation_rate: p,
            mutation_rate: mu,
            ticks: self.ticks,
            master_seed,
            update_mode: self.update_mode,
        }
    }
}

/// Master seed for replication `rep` of condition `(p, mu)`.
pub fn replication_seed(base_seed: u64, p: f64, mu: f64, rep: u64) -> u64 {
    base_seed ^ mix_words(&[p.to_bits(), mu.to_bits(), rep])
}

/// Per-replication measurements for one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult {
    pub p: f64,
    pub mu: f64,
    /// One `[n_c, n_d, n_l, n_p]` per replication, in replication order.
    pub replications: Vec<[f64; 4]>,
}

impl ConditionResult {
    pub fn strategy_samples(&self, index: usize) -> Vec<f64> {
        self.replications.iter().map(|r| r[index]).collect()
    }
}

/// Run one replication to completion and take its measurement.
pub fn measure_run(graph: &Graph, config: &SimConfig, measurement: Measurement) -> Result<[f64; 4]> {
    let mut sim = Simulation::new(graph, *config)?;
    let window_start = match measurement {
        Measurement::FinalTick => config.ticks,
        Measurement::TailMean(w) => config.ticks.saturating_sub(w - 1),
    };
    let mut sum = [0f64; 4];
    let mut samples = 0u64;
    let mut record = |sim: &Simulation| -> Result<()> {
        if sim.state().tick >= window_start {
            let snap = census(graph, sim.state())?;
            for (acc, c) in sum.iter_mut().zip(snap.counts) {
                *acc += c as f64;
            }
            samples += 1;
        }
        Ok(())
    };
    record(&sim)?;
    for _ in 0..config.ticks {
        sim.step(graph);
        record(&sim)?;
    }
    Ok(sum.map(|s| s / samples as f64))
}

/// Run replications with explicitly supplied master seeds.
pub fn run_condition_with_seeds(
    graph: &Graph,
    plan: &ExperimentPlan,
    p: f64,
    mu: f64,
    seeds: &[u64],
) -> Result<ConditionResult> {
    let replications = seeds
        .par_iter()
        .map(|&seed| measure_run(graph, &plan.sim_config(p, mu, seed), plan.measurement))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionResult { p, mu, replications })
}

/// All replications of one sweep cell, seeded by [`replication_seed`].
pub fn run_condition(graph: &Graph, plan: &ExperimentPlan, p: f64, mu: f64) -> Result<ConditionResult> {
    plan.validate()?;
    let seeds: Vec<u64> =
        (0..plan.replications as u64).map(|r| replication_seed(plan.base_seed, p, mu, r)).collect();
    run_condition_with_seeds(graph, plan, p, mu, &seeds)
}

/// Every cell of the plan. Replications across all cells share one parallel pool.
pub fn run_plan(graph: &Graph, plan: &ExperimentPlan) -> Result<Vec<ConditionResult>> {
    plan.validate()?;
    let conditions = plan.conditions();
    let reps = plan.replications;
    let flat = (0..conditions.len() * reps)
        .into_par_iter()
        .map(|job| {
            let (p, mu) = conditions[job / reps];
            let seed = replication_seed(plan.base_seed, p, mu, (job % reps) as u64);
            measure_run(graph, &plan.sim_config(p, mu, seed), plan.measurement)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(conditions
        .iter()
        .zip(flat.chunks(reps))
        .map(|(&(p, mu), chunk)| ConditionResult { p, mu, replications: chunk.to_vec() })
        .collect())
}

/// One row of a results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSummary {
    pub p: f64,
    pub mu: f64,
    pub replications: usize,
    pub mean: [f64; 4],
    pub sd: [f64; 4],
    /// Welch t of this condition against its baseline, signed condition minus baseline.
    pub t: [f64; 4],
    pub p_value: [f64; 4],
    pub flag: [&'static str; 4],
    /// Coexistence value of the mean counts.
    pub phi: f64,
}

/// Baseline cell for `(p, mu)`: the plan's null condition when `mu = 0`, else `(p, 0)`.
pub fn baseline_for(plan: &ExperimentPlan, p: f64, mu: f64) -> (f64, f64) {
    if mu == 0.0 {
        plan.null_condition
    } else {
        (p, 0.0)
    }
}

/// Summaries with mu > 0 rows ordered by (p, mu), then the mu = 0 rows by p.
pub fn summarize_plan(results: &[ConditionResult], plan: &ExperimentPlan) -> Result<Vec<ConditionSummary>> {
    let find = |p: f64, mu: f64| results.iter().find(|r| r.p == p && r.mu == mu);
    let mut rows = Vec::with_capacity(results.len());
    for result in results {
        let (bp, bmu) = baseline_for(plan, result.p, result.mu);
        let baseline = find(bp, bmu).ok_or_else(|| {
            Error::Plan(format!(
                "condition (p={}, mu={}) needs baseline (p={bp}, mu={bmu}), which was not run",
                result.p, result.mu
            ))
        })?;
        let mut row = ConditionSummary {
            p: result.p,
            mu: result.mu,
            replications: result.replications.len(),
            mean: [0.0; 4],
            sd: [0.0; 4],
            t: [0.0; 4],
            p_value: [1.0; 4],
            flag: [""; 4],
            phi: 0.0,
        };
        for i in 0..4 {
            let samples = result.strategy_samples(i);
            let summary = summarize(&samples)?;
            row.mean[i] = summary.mean;
            row.sd[i] = summary.sd.unwrap_or(0.0);
            let test = welch_t(&samples, &baseline.strategy_samples(i))?;
            row.t[i] = test.t;
            row.p_value[i] = test.p_two_tailed;
            row.flag[i] = significance_flag(test.p_two_tailed);
        }
        row.phi = coexistence_value(row.mean);
        rows.push(row);
    }
    rows.sort_by(|a, b| {
        (a.mu == 0.0, a.p, a.mu).partial_cmp(&(b.mu == 0.0, b.p, b.mu)).expect("rates are finite")
    });
    Ok(rows)
}

pub const SUMMARY_HEADER: &str = "p,mu,coop_mean,coop_t,coop_flag,def_mean,def_t,def_flag,\
lon_mean,lon_t,lon_flag,pun_mean,pun_t,pun_flag,phi";

pub fn write_summary_csv(summaries: &[ConditionSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        write!(out, "{},{}", s.p, s.mu).unwrap();
        for i in 0..4 {
            write!(out, ",{},{},{}", s.mean[i], s.t[i], s.flag[i]).unwrap();
        }
        writeln!(out, ",{}", s.phi).unwrap();
    }
    out
}

/// A summary row as read back from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub p: f64,
    pub mu: f64,
    pub mean: [f64; 4],
    pub t: [f64; 4],
    pub flag: [String; 4],
    pub phi: f64,
}

pub fn read_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == SUMMARY_HEADER => {}
        Some((i, _)) => {
            return Err(Error::Parse {
                line: i + 1,
                message: "header does not match the summary schema".into(),
            })
        }
        None => return Err(Error::Parse { line: 1, message: "missing header".into() }),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 15 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 15 fields, found {}", fields.len()),
            });
        }
        let num = |j: usize| -> Result<f64> {
            fields[j].parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("field {} is not a number: {:?}", j + 1, fields[j]),
            })
        };
        let mut row = SummaryRow {
            p: num(0)?,
            mu: num(1)?,
            mean: [0.0; 4],
            t: [0.0; 4],
            flag: Default::default(),
            phi: num(14)?,
        };
        for k in 0..4 {
            row.mean[k] = num(2 + 3 * k)?;
            row.t[k] = num(3 + 3 * k)?;
            let flag = fields[4 + 3 * k];
            if !matches!(flag, "" | "+" | "*") {
                return Err(Error::Parse { line: line_no, message: format!("bad flag {flag:?}") });
            }
            row.flag[k] = flag.to_string();
        }
        rows.push(row);
    }
    Ok(rows)
}

pub const RAW_HEADER: &str = "p,mu,rep,n_c,n_d,n_l,n_p";

pub fn write_raw_csv(results: &[ConditionResult]) -> String {
    let mut out = String::from(RAW_HEADER);
    out.push('\n');
    for r in results {
        for (rep, c) in r.replications.iter().enumerate() {
            writeln!(out, "{},{},{rep},{},{},{},{}", r.p, r.mu, c[0], c[1], c[2], c[3]).unwrap();
        }
    }
    out
}
