//! Parallel tempering over symmetric zero-diagonal phase matrices, minimising
//! the rank-deficit cost.
//!
//! Replicas sit on a geometric temperature ladder and advance independently
//! for `exchange_interval` steps at a time; between blocks they meet at a
//! barrier where the global best is merged, caches are optionally audited and
//! adjacent slots try to exchange configurations. Every replica draws from
//! its own ChaCha stream and the exchange decisions from another, so results
//! depend only on the seed, never on thread scheduling.

mod replica;
mod tempering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError, FieldSpec};
use crate::phasecore::{certify_ame, CertificationReport, PhaseError, PhaseMatrix};

pub use self::replica::{Delta, Move, ReplicaState};
pub use self::tempering::{
    exchange_probability, exchange_sweep, geometric_ladder, metropolis_accept,
};

/// The rank cache holds `2^(n-1)` bytes per replica.
pub const MAX_SEARCH_PARTIES: usize = 26;

const EXCHANGE_STREAM: u64 = 1 << 32;
const LADDER_STREAM: u64 = (1 << 32) + 1;
const LADDER_SAMPLES: usize = 1000;
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("move drawn at epoch {found} applied to a state at epoch {expected}")]
    StaleCache { expected: u64, found: u64 },
    #[error("move is out of range for this matrix")]
    InvalidMove,
    #[error("rank cache of replica {replica} disagrees with a full recompute at step {step}")]
    CacheIncoherent { replica: usize, step: u64 },
    #[error("search reported cost {cost} but certification disagrees")]
    UnsoundCertificate { cost: u64 },
    #[error("search has not finished")]
    Unfinished,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T, E = SearchError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_parties: usize,
    pub field: FieldSpec,
    pub replicas: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Budget in sweeps; one sweep advances every replica by one move.
    pub max_steps: u64,
    /// Steps without a new low (since the last restart) before a replica is
    /// re-seeded with a random matrix.
    pub stall_limit: u64,
    pub exchange_interval: u64,
    /// Chance per step that a cold replica copies the global best instead of
    /// moving. Only slots below the median temperature are eligible.
    pub guide_probability: f64,
    pub rng_seed: u64,
    /// Cap on restarts per replica; `None` means unlimited.
    pub max_restarts: Option<u64>,
    /// Steps between full cache audits.
    pub coherence_interval: u64,
    /// Steps between trace records; 0 disables tracing.
    pub trace_interval: u64,
    /// Replace `t_min`/`t_max` with percentiles of sampled `|ΔC|`.
    pub auto_ladder: bool,
}

impl SearchConfig {
    pub fn new(n_parties: usize, field: FieldSpec) -> Self {
        SearchConfig {
            n_parties,
            field,
            replicas: 8,
            t_min: 0.2,
            t_max: 5.0,
            max_steps: 100_000,
            stall_limit: 5000,
            exchange_interval: 50,
            guide_probability: 0.05,
            rng_seed: 0,
            max_restarts: None,
            coherence_interval: 10_000,
            trace_interval: 0,
            auto_ladder: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SearchError::InvalidConfig(m));
        if !(2..=MAX_SEARCH_PARTIES).contains(&self.n_parties) {
            return bad(format!(
                "n must be in 2..={MAX_SEARCH_PARTIES}, got {}",
                self.n_parties
            ));
        }
        self.field.validate()?;
        if !self.field.is_field() {
            return bad("search needs a prime or prime-power field; split composites first".into());
        }
        if self.replicas == 0 {
            return bad("at least one replica is required".into());
        }
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return bad(format!("t_min must be positive, got {}", self.t_min));
        }
        if self.replicas > 1 && !(self.t_max > self.t_min && self.t_max.is_finite()) {
            return bad(format!(
                "t_max {} must exceed t_min {}",
                self.t_max, self.t_min
            ));
        }
        if !(0.0..=1.0).contains(&self.guide_probability) {
            return bad(format!(
                "guide probability {} outside [0, 1]",
                self.guide_probability
            ));
        }
        for (name, v) in [
            ("max_steps", self.max_steps),
            ("stall_limit", self.stall_limit),
            ("exchange_interval", self.exchange_interval),
            ("coherence_interval", self.coherence_interval),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    CostZero,
    StepBudget,
}

/// One line of the optional search trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub replica: usize,
    pub temperature: f64,
    pub cost: u64,
    pub best_cost: u64,
}

/// Global best after a barrier where it changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostSample {
    pub step: u64,
    pub best_cost: u64,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: PhaseMatrix,
    pub best_cost: u64,
    /// Step at which `best` was first reached, and by which slot.
    pub best_step: u64,
    pub best_replica: usize,
    pub steps_taken: u64,
    pub restarts_used: u64,
    pub cost_trace: Vec<CostSample>,
    pub terminated_by: Termination,
    pub temperatures: Vec<f64>,
    /// Full certification of `best`, recomputed from scratch.
    pub report: CertificationReport,
}

#[derive(Debug, Clone)]
struct Best {
    cost: u64,
    step: u64,
    replica: usize,
    matrix: PhaseMatrix,
}

impl Best {
    fn key(&self) -> (u64, u64, usize) {
        (self.cost, self.step, self.replica)
    }
}

struct Slot {
    temperature: f64,
    rng: ChaCha8Rng,
    restarts: u64,
    state: ReplicaState,
    /// Lowest configuration found during the current block.
    found: Option<Best>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Resumable parallel-tempering run.
pub struct Search {
    config: SearchConfig,
    field: Field,
    slots: Vec<Slot>,
    exchange_rng: ChaCha8Rng,
    step: u64,
    sweeps: u64,
    best: Option<Best>,
    cost_trace: Vec<CostSample>,
    terminated: Option<Termination>,
}

impl Search {
    pub fn new(config: SearchConfig) -> Result<Self> {
        config.validate()?;
        let field = Field::new(config.field.clone())?;
        let temperatures = if config.auto_ladder {
            auto_ladder(&config, &field)?
        } else {
            geometric_ladder(config.t_min, config.t_max, config.replicas)
        };
        let slots = temperatures
            .into_iter()
            .enumerate()
            .map(|(r, temperature)| {
                let mut rng = stream(config.rng_seed, r as u64);
                let p = PhaseMatrix::random(field.clone(), config.n_parties, &mut rng)?;
                Ok(Slot {
                    temperature,
                    rng,
                    restarts: 0,
                    state: ReplicaState::new(p)?,
                    found: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut search = Search {
            exchange_rng: stream(config.rng_seed, EXCHANGE_STREAM),
            config,
            field,
            slots,
            step: 0,
            sweeps: 0,
            best: None,
            cost_trace: Vec::new(),
            terminated: None,
        };
        for (r, slot) in search.slots.iter_mut().enumerate() {
            slot.found = Some(Best {
                cost: slot.state.cost(),
                step: 0,
                replica: r,
                matrix: slot.state.matrix().clone(),
            });
        }
        search.merge_found();
        search.cost_trace.push(CostSample {
            step: 0,
            best_cost: search.best_cost(),
        });
        if search.best_cost() == 0 {
            search.terminated = Some(Termination::CostZero);
        }
        Ok(search)
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.slots.iter().map(|s| s.temperature).collect()
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn best_cost(&self) -> u64 {
        self.best.as_ref().map_or(u64::MAX, |b| b.cost)
    }

    pub fn is_finished(&self) -> bool {
        self.terminated.is_some()
    }

    pub fn replicas(&self) -> impl Iterator<Item = &ReplicaState> {
        self.slots.iter().map(|s| &s.state)
    }

    pub fn run(&mut self, trace: &mut dyn FnMut(&TraceRecord)) -> Result<()> {
        self.run_until(u64::MAX, trace)
    }

    /// Advances whole blocks until the run ends or the step count reaches
    /// `limit`. Stopping only at barriers keeps a resumed run identical to an
    /// uninterrupted one.
    pub fn run_until(&mut self, limit: u64, trace: &mut dyn FnMut(&TraceRecord)) -> Result<()> {
        while self.terminated.is_none() && self.step < limit {
            self.block(trace)?;
        }
        Ok(())
    }

    fn block(&mut self, trace: &mut dyn FnMut(&TraceRecord)) -> Result<()> {
        let cfg = &self.config;
        let len = cfg.exchange_interval.min(cfg.max_steps - self.step);
        let start = self.step;
        let eligible = self.slots.len() / 2;
        let guide = self.best.as_ref();
        let field = &self.field;
        self.slots
            .par_iter_mut()
            .enumerate()
            .try_for_each(|(r, slot)| {
                let guide = guide.filter(|_| r < eligible && cfg.guide_probability > 0.0);
                slot.advance(r, start, len, cfg, field, guide)
            })?;
        self.step += len;
        let prev_best = self.best_cost();
        self.merge_found();

        let best = self.best_cost();
        if best < prev_best {
            self.cost_trace.push(CostSample {
                step: self.step,
                best_cost: best,
            });
        }
        if best == 0 {
            self.terminated = Some(Termination::CostZero);
            return Ok(());
        }
        let k = self.config.coherence_interval;
        if self.step / k > start / k {
            self.audit()?;
        }
        let t = self.config.trace_interval;
        if t > 0 && self.step / t > start / t {
            for (r, slot) in self.slots.iter().enumerate() {
                trace(&TraceRecord {
                    step: self.step,
                    replica: r,
                    temperature: slot.temperature,
                    cost: slot.state.cost(),
                    best_cost: best,
                });
            }
        }
        if self.slots.len() > 1 {
            let costs: Vec<u64> = self.slots.iter().map(|s| s.state.cost()).collect();
            let temps = self.temperatures();
            let parity = (self.sweeps % 2) as usize;
            for r in exchange_sweep(&costs, &temps, parity, &mut self.exchange_rng) {
                let (lo, hi) = self.slots.split_at_mut(r + 1);
                std::mem::swap(&mut lo[r].state, &mut hi[0].state);
            }
            self.sweeps += 1;
        }
        if self.step >= self.config.max_steps {
            self.terminated = Some(Termination::StepBudget);
        }
        Ok(())
    }

    /// Lowest `(cost, step, replica)` wins, so ties go to the earliest find.
    fn merge_found(&mut self) {
        for slot in &mut self.slots {
            if let Some(f) = slot.found.take() {
                if self.best.as_ref().is_none_or(|b| f.key() < b.key()) {
                    self.best = Some(f);
                }
            }
        }
    }

    fn audit(&mut self) -> Result<()> {
        let step = self.step;
        let bad = self
            .slots
            .par_iter_mut()
            .enumerate()
            .filter_map(|(r, s)| (!s.state.is_coherent()).then_some(r))
            .min();
        match bad {
            Some(replica) => Err(SearchError::CacheIncoherent { replica, step }),
            None => Ok(()),
        }
    }

    /// Best configuration and certification; re-verifies any claimed
    /// certificate from scratch.
    pub fn result(&self) -> Result<SearchResult> {
        let terminated_by = self.terminated.ok_or(SearchError::Unfinished)?;
        let best = self.best.as_ref().expect("initial states are merged");
        let report = certify_ame(&best.matrix)?;
        if report.squared_deficit() != best.cost
            || (terminated_by == Termination::CostZero && !report.is_ame)
        {
            return Err(SearchError::UnsoundCertificate { cost: best.cost });
        }
        let steps_taken = match terminated_by {
            Termination::CostZero => best.step,
            Termination::StepBudget => self.step,
        };
        Ok(SearchResult {
            best: best.matrix.clone(),
            best_cost: best.cost,
            best_step: best.step,
            best_replica: best.replica,
            steps_taken,
            restarts_used: self.slots.iter().map(|s| s.restarts).sum(),
            cost_trace: self.cost_trace.clone(),
            terminated_by,
            temperatures: self.temperatures(),
            report,
        })
    }

    pub fn checkpoint(&self) -> Checkpoint {
        let best = self.best.as_ref().expect("initial states are merged");
        Checkpoint {
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            step: self.step,
            sweeps: self.sweeps,
            terminated: self.terminated,
            exchange_word_pos: self.exchange_rng.get_word_pos().to_string(),
            replicas: self
                .slots
                .iter()
                .map(|s| ReplicaSnapshot {
                    temperature: s.temperature,
                    word_pos: s.rng.get_word_pos().to_string(),
                    restarts: s.restarts,
                    upper: s.state.matrix().upper(),
                    epoch: s.state.epoch(),
                    steps_since_improvement: s.state.steps_since_improvement(),
                    lowest_since_restart: s.state.lowest_since_restart(),
                })
                .collect(),
            best: BestSnapshot {
                cost: best.cost,
                step: best.step,
                replica: best.replica,
                upper: best.matrix.upper(),
            },
            cost_trace: self.cost_trace.clone(),
        }
    }

    pub fn resume(cp: Checkpoint) -> Result<Self> {
        let fail = |m: &str| SearchError::Checkpoint(m.to_string());
        if cp.version != CHECKPOINT_VERSION {
            return Err(fail("unsupported checkpoint version"));
        }
        cp.config.validate()?;
        if cp.replicas.len() != cp.config.replicas {
            return Err(fail("replica count does not match the configuration"));
        }
        let field = Field::new(cp.config.field.clone())?;
        let n = cp.config.n_parties;
        let word_pos = |s: &str| s.parse::<u128>().map_err(|_| fail("bad rng position"));
        let mut slots = Vec::with_capacity(cp.replicas.len());
        for (r, snap) in cp.replicas.iter().enumerate() {
            let mut rng = stream(cp.config.rng_seed, r as u64);
            rng.set_word_pos(word_pos(&snap.word_pos)?);
            let p = PhaseMatrix::from_upper(field.clone(), n, &snap.upper)?;
            let mut state = ReplicaState::new(p)?;
            state.restore_counters(
                snap.steps_since_improvement,
                snap.lowest_since_restart,
                snap.epoch,
            );
            slots.push(Slot {
                temperature: snap.temperature,
                rng,
                restarts: snap.restarts,
                state,
                found: None,
            });
        }
        let mut exchange_rng = stream(cp.config.rng_seed, EXCHANGE_STREAM);
        exchange_rng.set_word_pos(word_pos(&cp.exchange_word_pos)?);
        let best = Best {
            cost: cp.best.cost,
            step: cp.best.step,
            replica: cp.best.replica,
            matrix: PhaseMatrix::from_upper(field.clone(), n, &cp.best.upper)?,
        };
        if crate::phasecore::cost(&best.matrix)? != best.cost {
            return Err(fail("stored best cost does not match its matrix"));
        }
        Ok(Search {
            config: cp.config,
            field,
            slots,
            exchange_rng,
            step: cp.step,
            sweeps: cp.sweeps,
            best: Some(best),
            cost_trace: cp.cost_trace,
            terminated: cp.terminated,
        })
    }
}

impl Slot {
    fn advance(
        &mut self,
        r: usize,
        start: u64,
        len: u64,
        cfg: &SearchConfig,
        field: &Field,
        guide: Option<&Best>,
    ) -> Result<()> {
        let global = guide.map_or(u64::MAX, |g| g.cost);
        for k in 1..=len {
            let step = start + k;
            let guided = match guide {
                Some(g) => {
                    self.rng.gen::<f64>() < cfg.guide_probability && g.cost < self.state.cost()
                }
                None => false,
            };
            if guided {
                self.state.reset(guide.expect("guided").matrix.clone());
            } else {
                let mv = self.state.propose_move(&mut self.rng);
                let d = self.state.delta_cost(&mv)?;
                if metropolis_accept(d.delta, self.temperature, &mut self.rng) {
                    self.state.apply(&mv, &d)?;
                }
            }
            self.state.note_step();

            let cost = self.state.cost();
            let floor = self.found.as_ref().map_or(global, |f| f.cost.min(global));
            if cost < floor {
                self.found = Some(Best {
                    cost,
                    step,
                    replica: r,
                    matrix: self.state.matrix().clone(),
                });
            }
            if cost == 0 {
                break;
            }
            if self.state.steps_since_improvement() >= cfg.stall_limit
                && cfg.max_restarts.is_none_or(|m| self.restarts < m)
            {
                let p = PhaseMatrix::random(field.clone(), cfg.n_parties, &mut self.rng)?;
                self.state.reset(p);
                self.restarts += 1;
            }
        }
        Ok(())
    }
}

/// Random-walk sample of `|ΔC|` setting `t_max` to the 90th percentile and
/// `t_min` to a tenth of the 10th percentile of the nonzero values. Falls
/// back to the configured ladder if the sample is degenerate.
fn auto_ladder(cfg: &SearchConfig, field: &Field) -> Result<Vec<f64>> {
    let mut rng = stream(cfg.rng_seed, LADDER_STREAM);
    let p = PhaseMatrix::random(field.clone(), cfg.n_parties, &mut rng)?;
    let mut state = ReplicaState::new(p)?;
    let mut deltas = Vec::with_capacity(LADDER_SAMPLES);
    for _ in 0..LADDER_SAMPLES {
        let mv = state.propose_move(&mut rng);
        let d = state.delta_cost(&mv)?;
        if d.delta != 0 {
            deltas.push(d.delta.unsigned_abs());
        }
        state.apply(&mv, &d)?;
    }
    deltas.sort_unstable();
    let (mut t_min, mut t_max) = (cfg.t_min, cfg.t_max);
    if !deltas.is_empty() {
        let hi = tempering::percentile(&deltas, 0.9) as f64;
        let lo = tempering::percentile(&deltas, 0.1) as f64 / 10.0;
        if hi > lo {
            (t_min, t_max) = (lo, hi);
        }
    }
    Ok(geometric_ladder(t_min, t_max, cfg.replicas))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaSnapshot {
    pub temperature: f64,
    /// ChaCha word position, decimal (it is a `u128`).
    pub word_pos: String,
    pub restarts: u64,
    pub upper: Vec<u64>,
    pub epoch: u64,
    pub steps_since_improvement: u64,
    pub lowest_since_restart: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSnapshot {
    pub cost: u64,
    pub step: u64,
    pub replica: usize,
    pub upper: Vec<u64>,
}

/// Everything needed to continue a run bit-for-bit. Rank caches are rebuilt
/// from the matrices on resume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: SearchConfig,
    pub step: u64,
    pub sweeps: u64,
    pub terminated: Option<Termination>,
    pub exchange_word_pos: String,
    pub replicas: Vec<ReplicaSnapshot>,
    pub best: BestSnapshot,
    pub cost_trace: Vec<CostSample>,
}

pub fn run_search(config: SearchConfig) -> Result<SearchResult> {
    let mut search = Search::new(config)?;
    search.run(&mut |_| {})?;
    search.result()
}
