//! Driver over [`SimState::advance`] with a recording schedule.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::ModelKind;
use crate::rng::run_rng;
use crate::sim::state::{SimConfig, SimState};

pub const CSV_HEADER: &str = "n,q,x,y,red_fraction";

/// One recorded row.
///
/// For the plain and multiplicative models `x` is the red share of attachment
/// mass, `y = 1 - x` and `q` the probability that one draw is red. For the
/// additive model `(x, y)` are the per-step masses and `q = x/(x+y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub n: u64,
    pub q: f64,
    pub x: f64,
    pub y: f64,
    pub red_fraction: f64,
}

impl Record {
    pub fn of(state: &SimState) -> Self {
        let q = state.red_draw_probability();
        let (x, y) = match state.fitness().kind() {
            ModelKind::Additive => state.additive_coordinates(),
            _ => {
                let x = state.mass_share();
                (x, 1.0 - x)
            }
        };
        Self {
            n: state.n(),
            q,
            x,
            y,
            red_fraction: state.red_fraction(),
        }
    }

    /// The statistic the limit theory is about: `x` or, for additive, `q`.
    pub fn statistic(&self, kind: ModelKind) -> f64 {
        match kind {
            ModelKind::Additive => self.q,
            _ => self.x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalSummary {
    pub n: u64,
    pub red_degree: u64,
    pub blue_degree: u64,
    pub reds: u64,
    pub blues: u64,
    pub red_statistic: f64,
}

impl TerminalSummary {
    pub fn of(state: &SimState) -> Self {
        Self {
            n: state.n(),
            red_degree: state.red_degree(),
            blue_degree: state.blue_degree(),
            reds: state.reds(),
            blues: state.blues(),
            red_statistic: state.red_statistic(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub model: ModelKind,
    pub m: usize,
    pub records: Vec<Record>,
    pub terminal: TerminalSummary,
}

impl Trajectory {
    pub fn record_at(&self, n: u64) -> Option<&Record> {
        self.records
            .binary_search_by_key(&n, |r| r.n)
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn statistic_at(&self, n: u64) -> Option<f64> {
        self.record_at(n).map(|r| r.statistic(self.model))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            writeln!(out, "{},{},{},{},{}", r.n, r.q, r.x, r.y, r.red_fraction).unwrap();
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "model": self.model,
            "m": self.m,
            "records": self.records.len(),
            "terminal": self.terminal,
        })
    }
}

/// Steps at which `cfg` asks for a record: always `0` and `steps`.
pub fn schedule(cfg: &SimConfig) -> BTreeSet<u64> {
    let mut set: BTreeSet<u64> = cfg.record_at.iter().copied().filter(|&n| n <= cfg.steps).collect();
    set.insert(0);
    set.insert(cfg.steps);
    if cfg.record_every > 0 {
        set.extend((0..=cfg.steps).step_by(cfg.record_every as usize));
    }
    set
}

/// Runs `cfg` using stream 0 of its seed.
pub fn run(cfg: &SimConfig) -> Result<Trajectory> {
    run_with_rng(cfg, &mut run_rng(cfg.seed, 0))
}

pub fn run_with_rng<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<Trajectory> {
    cfg.validate()?;
    let mut state = SimState::from_config(cfg)?;
    let marks = schedule(cfg);
    let mut records = Vec::with_capacity(marks.len());
    for &mark in &marks {
        while state.n() < mark {
            state.advance(rng);
        }
        if cfg.check_invariants {
            state.check_invariants()?;
        }
        records.push(Record::of(&state));
    }
    Ok(Trajectory {
        model: cfg.fitness.kind(),
        m: state.m(),
        records,
        terminal: TerminalSummary::of(&state),
    })
}
