//! Seeded Monte Carlo harness: random misinformation games, the full
//! adaptation pipeline per run, and CSV emission.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adaptation::{compute_sme, naive_adaptation, parallel_traverse};
use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::misinfo::MisinformationGame;
use crate::rational::rat_int;
use crate::Options;

#[derive(Debug, Clone)]
pub struct Setting {
    pub label: String,
    pub strategy_counts: Vec<usize>,
    /// Payoffs are integers drawn uniformly from this inclusive range.
    pub payoff_range: (i64, i64),
    pub runs: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Setting {
    pub fn new(strategy_counts: Vec<usize>, runs: usize, seed: u64) -> Self {
        let label = strategy_counts
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("x");
        Setting {
            label,
            strategy_counts,
            payoff_range: (-10, 10),
            runs,
            seed,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunMetrics {
    pub run: usize,
    /// Attempts needed before a non-degenerate game came up (1 = first try).
    pub attempts: u32,
    /// Games generated by the naive fixpoint, duplicates included.
    pub naive_nodes: u64,
    pub unique_mgs: usize,
    pub leaves: usize,
    pub smes: usize,
    pub lad: usize,
    /// Size of the position-set search space, 2^cells.
    pub search_space: u128,
    pub wall_total: Duration,
    /// Traversal + SME extraction + naive fixpoint only (generation and
    /// retries excluded).
    pub wall_core: Duration,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub setting: Setting,
    pub metrics: Vec<RunMetrics>,
    /// Runs that stayed degenerate after every retry; excluded from metrics.
    pub failures: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Averages {
    pub naive_nodes: f64,
    pub unique_mgs: f64,
    pub leaves: f64,
    pub smes: f64,
    pub lad: f64,
    pub wall_total_s: f64,
    pub wall_core_s: f64,
}

impl ExperimentSummary {
    pub fn averages(&self) -> Option<Averages> {
        if self.metrics.is_empty() {
            return None;
        }
        let n = self.metrics.len() as f64;
        let sum = |f: &dyn Fn(&RunMetrics) -> f64| self.metrics.iter().map(|m| f(m)).sum::<f64>();
        Some(Averages {
            naive_nodes: sum(&|m| m.naive_nodes as f64) / n,
            unique_mgs: sum(&|m| m.unique_mgs as f64) / n,
            leaves: sum(&|m| m.leaves as f64) / n,
            smes: sum(&|m| m.smes as f64) / n,
            lad: sum(&|m| m.lad as f64) / n,
            wall_total_s: sum(&|m| m.wall_total.as_secs_f64()) / n,
            wall_core_s: sum(&|m| m.wall_core.as_secs_f64()) / n,
        })
    }
}

pub fn random_game(
    rng: &mut impl Rng,
    strategy_counts: &[usize],
    range: (i64, i64),
) -> NormalFormGame {
    NormalFormGame::from_fn(strategy_counts.to_vec(), |_, _| {
        rat_int(rng.gen_range(range.0..=range.1))
    })
    .expect("valid shape")
}

/// Random canonical misinformation game: a random actual game plus one
/// independent random subjective view per player, all of the same shape.
pub fn random_misinfo(
    rng: &mut impl Rng,
    strategy_counts: &[usize],
    range: (i64, i64),
) -> MisinformationGame {
    let actual = random_game(rng, strategy_counts, range);
    let subjective = (0..strategy_counts.len())
        .map(|_| random_game(rng, strategy_counts, range))
        .collect();
    MisinformationGame::new(actual, subjective)
}

/// Deterministic generator for run `run`, attempt `attempt` (< 8): one
/// fixed stream of a seeded generator per (run, attempt) pair, so results
/// do not depend on thread count or retry history of other runs.
pub fn rng_for(seed: u64, run: usize, attempt: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64 * 8 + attempt as u64);
    rng
}

const MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub unique_mgs: usize,
    pub leaves: usize,
    pub smes: usize,
    pub lad: usize,
    pub naive_nodes: u64,
}

/// Runs the full pipeline on one game: parallel traversal, SME extraction,
/// and the naive fixpoint as a cross-check.
pub fn run_pipeline(
    mg: &MisinformationGame,
    opts: &Options,
    threads: usize,
) -> Result<PipelineOutcome> {
    let result = parallel_traverse(mg, opts, threads)?;
    let smes = compute_sme(&result);
    let naive = naive_adaptation(mg, opts, mg.actual.num_cells() + 2)?;
    Ok(PipelineOutcome {
        unique_mgs: result.unique_mgs,
        leaves: result.leaves(),
        smes: smes.len(),
        lad: naive.lad,
        naive_nodes: naive.total_nodes,
    })
}

/// Monte Carlo over random games. Runs hitting a degenerate subjective game
/// are regenerated up to two times from their own fresh streams; a run still
/// degenerate after that counts as a failure and is excluded.
pub fn monte_carlo(setting: &Setting, opts: &Options) -> Result<ExperimentSummary> {
    let mut metrics = Vec::with_capacity(setting.runs);
    let mut failures = 0usize;
    for run in 0..setting.runs {
        let total_start = Instant::now();
        let mut done = false;
        for attempt in 1..=MAX_ATTEMPTS {
            let mut rng = rng_for(setting.seed, run, attempt - 1);
            let mg = random_misinfo(&mut rng, &setting.strategy_counts, setting.payoff_range);
            let core_start = Instant::now();
            match run_pipeline(&mg, opts, setting.threads) {
                Ok(out) => {
                    let wall_core = core_start.elapsed();
                    metrics.push(RunMetrics {
                        run,
                        attempts: attempt,
                        naive_nodes: out.naive_nodes,
                        unique_mgs: out.unique_mgs,
                        leaves: out.leaves,
                        smes: out.smes,
                        lad: out.lad,
                        search_space: 1u128 << mg.actual.num_cells().min(127),
                        wall_total: total_start.elapsed(),
                        wall_core,
                    });
                    done = true;
                    break;
                }
                Err(Error::DegenerateGame(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        if !done {
            failures += 1;
        }
    }
    Ok(ExperimentSummary {
        setting: setting.clone(),
        metrics,
        failures,
    })
}

/// Worst-case instance for the adaptation depth: all payoff vectors of the
/// (shared) subjective view are distinct constants descending from the
/// lexicographically largest cell, and the actual game is its negation.
/// Every update moves the unique subjective equilibrium to the next cell
/// down, so learning proceeds one position at a time.
pub fn adversarial_lad(strategy_counts: &[usize]) -> MisinformationGame {
    let cells: usize = strategy_counts.iter().product();
    let n = strategy_counts.len();
    let mut idx = 0usize;
    let subjective_view = NormalFormGame::from_fn(strategy_counts.to_vec(), |_, player| {
        if player == 0 {
            idx += 1;
        }
        rat_int(idx as i64)
    })
    .expect("valid shape");
    let actual = NormalFormGame::from_fn(strategy_counts.to_vec(), |profile, player| {
        -subjective_view.payoff(profile, player).unwrap().clone()
    })
    .expect("valid shape");
    debug_assert_eq!(idx, cells);
    MisinformationGame::new(actual, vec![subjective_view; n])
}

/// CSV with one row per successful run plus an `avg` row; durations in
/// seconds with millisecond precision.
pub fn emit_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from(
        "setting,run,attempts,naive_nodes,unique_mgs,leaves,smes,lad,search_space,wall_total_s,wall_core_s\n",
    );
    for m in &summary.metrics {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{:.3},{:.3}\n",
            summary.setting.label,
            m.run,
            m.attempts,
            m.naive_nodes,
            m.unique_mgs,
            m.leaves,
            m.smes,
            m.lad,
            m.search_space,
            m.wall_total.as_secs_f64(),
            m.wall_core.as_secs_f64(),
        ));
    }
    if let Some(avg) = summary.averages() {
        out.push_str(&format!(
            "{},avg,,{:.3},{:.3},{:.3},{:.3},{:.3},,{:.3},{:.3}\n",
            summary.setting.label,
            avg.naive_nodes,
            avg.unique_mgs,
            avg.leaves,
            avg.smes,
            avg.lad,
            avg.wall_total_s,
            avg.wall_core_s,
        ));
    }
    out
}
