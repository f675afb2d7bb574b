use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::Hyperparams;
use super::model::{backward_with, init_model, Propagator};
use super::optim::optimizer_step;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::heuristics::purify;
use crate::potts::{self, Coloring, Couplings, SoftAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StopReason {
    /// No loss improvement beyond `tolerance` for `patience` epochs.
    Patience,
    MaxEpochs,
    /// The projected coloring of an epoch had zero energy.
    ZeroCost,
    /// Wall-clock limit supplied by the caller ran out.
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    /// Snapshot with the lowest projected energy, ties broken by lower loss.
    pub best_soft: SoftAssignment,
    pub best_coloring: Coloring,
    /// Projected hard energy of the snapshot.
    pub best_energy: f64,
    /// Epoch at which the snapshot was taken.
    pub best_epoch: usize,
    /// Lowest loss over the whole run.
    pub best_loss: f64,
    pub epochs_run: usize,
    pub loss_history: Vec<f64>,
    pub stop_reason: StopReason,
}

impl TrainResult {
    /// Clash count of the snapshot under clash-counting couplings.
    pub fn cost(&self) -> u64 {
        self.best_energy.round().max(0.0) as u64
    }
}

/// Seed of the dropout stream, kept apart from the initialization stream.
fn dropout_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Full-graph training: every epoch runs one forward/backward pass followed by
/// one optimizer step.
///
/// Every epoch the soft output is projected by argmax and scored with the hard
/// energy. Training stops at zero energy (only for antiferromagnetic uniform
/// couplings, where zero is the known ground state), after `patience` epochs
/// without loss improvement beyond `tolerance`, or at `max_epochs`.
pub fn train(g: &Graph, hp: &Hyperparams, couplings: &Couplings) -> Result<TrainResult> {
    train_with_limit(g, hp, couplings, None)
}

/// [`train`] with an optional wall-clock limit (which makes the result timing dependent).
pub fn train_with_limit(
    g: &Graph,
    hp: &Hyperparams,
    couplings: &Couplings,
    time_limit: Option<Duration>,
) -> Result<TrainResult> {
    hp.validate()?;
    couplings.check_nodes(g.node_count())?;
    if g.node_count() == 0 {
        let probs = ndarray::Array2::zeros((0, hp.num_colors));
        return Ok(TrainResult {
            best_soft: SoftAssignment::from_softmax(probs),
            best_coloring: Coloring::new(Vec::new(), hp.num_colors)?,
            best_energy: 0.0,
            best_epoch: 0,
            best_loss: 0.0,
            epochs_run: 0,
            loss_history: Vec::new(),
            stop_reason: StopReason::ZeroCost,
        });
    }
    let started = Instant::now();
    let zero_is_ground = matches!(couplings, Couplings::Uniform(j) if *j < 0.0);
    let mut model = init_model(g, hp)?;
    let prop = Propagator::new(g, model.kind);
    let mut rng = dropout_rng(hp.seed);

    let mut history = Vec::new();
    let mut best: Option<(f64, f64, usize, SoftAssignment, Coloring)> = None;
    let mut reference_loss = f64::INFINITY;
    let mut stale = 0usize;
    let mut stop_reason = StopReason::MaxEpochs;

    for epoch in 0..hp.max_epochs {
        let out = backward_with(&model.params, g, &prop, hp.dropout, couplings, &mut rng);
        history.push(out.loss);
        let coloring = out.soft.project_argmax();
        let energy = potts::hard_energy(g, &coloring, couplings)?;
        let improves = best
            .as_ref()
            .is_none_or(|(e, l, ..)| energy < *e || (energy == *e && out.loss < *l));
        if improves {
            best = Some((energy, out.loss, epoch, out.soft, coloring));
        }
        if zero_is_ground && energy == 0.0 {
            stop_reason = StopReason::ZeroCost;
            break;
        }
        if out.loss < reference_loss - hp.tolerance {
            reference_loss = out.loss;
            stale = 0;
        } else {
            stale += 1;
            if stale >= hp.patience {
                stop_reason = StopReason::Patience;
                break;
            }
        }
        if time_limit.is_some_and(|limit| started.elapsed() >= limit) {
            stop_reason = StopReason::TimeLimit;
            break;
        }
        optimizer_step(&mut model, &out.grads, hp);
    }

    let (best_energy, _, best_epoch, best_soft, best_coloring) = best.expect("at least one epoch runs");
    Ok(TrainResult {
        best_soft,
        best_coloring,
        best_energy,
        best_epoch,
        best_loss: history.iter().copied().fold(f64::INFINITY, f64::min),
        epochs_run: history.len(),
        loss_history: history,
        stop_reason,
    })
}

/// Argmax projection of a soft assignment; ties go to the smallest color.
pub fn project_argmax(p: &SoftAssignment) -> Coloring {
    p.project_argmax()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchStrategy {
    Sequential,
    Binary,
}

#[derive(Debug, Clone)]
pub struct QSearchOptions {
    pub strategy: SearchStrategy,
    pub q_max: usize,
    /// Repair infeasible results by spending extra colors.
    pub purify: bool,
    pub purify_rounds: usize,
}

impl QSearchOptions {
    pub fn new(strategy: SearchStrategy, q_max: usize) -> Self {
        QSearchOptions {
            strategy,
            q_max,
            purify: false,
            purify_rounds: 1_000,
        }
    }
}

/// One color count tried by [`find_q_upper`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAttempt {
    pub q: usize,
    pub cost: u64,
    pub epochs_run: usize,
    pub stop_reason: Option<StopReason>,
    /// Colors used after purification, when it produced a feasible coloring.
    pub purified_colors: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct QSearchResult {
    /// Upper bound on the chromatic number.
    pub q: usize,
    pub coloring: Coloring,
    pub attempts: Vec<QAttempt>,
}

struct Outcome {
    cost: u64,
    coloring: Coloring,
    purified: Option<Coloring>,
}

fn attempt(g: &Graph, template: &Hyperparams, q: usize, opts: &QSearchOptions, log: &mut Vec<QAttempt>) -> Result<Outcome> {
    let (cost, coloring, epochs_run, stop_reason) = if q == 1 {
        // A single color admits exactly one coloring.
        let c = Coloring::new(vec![0; g.node_count()], 1)?;
        (g.edge_count() as u64, c, 0, None)
    } else {
        let mut hp = template.clone();
        hp.num_colors = q;
        let r = train(g, &hp, &Couplings::default())?;
        (r.cost(), r.best_coloring, r.epochs_run, Some(r.stop_reason))
    };
    let purified = if cost > 0 && opts.purify {
        let seed = template.seed.wrapping_add(q as u64);
        let p = purify(g, &coloring, seed, opts.purify_rounds);
        p.feasible.then_some(p.coloring)
    } else {
        None
    };
    log.push(QAttempt {
        q,
        cost,
        epochs_run,
        stop_reason,
        purified_colors: purified.as_ref().map(Coloring::colors_used),
    });
    Ok(Outcome { cost, coloring, purified })
}

/// Searches for the smallest color count at which the solver finds a zero-cost
/// coloring.
///
/// The result is an upper bound on the chromatic number only: a failed attempt at
/// `q` does not prove that `q` colors are insufficient, so the binary strategy
/// may skip feasible counts.
pub fn find_q_upper(g: &Graph, template: &Hyperparams, opts: &QSearchOptions) -> Result<QSearchResult> {
    if opts.q_max == 0 {
        return Err(Error::Input("q_max must be at least 1".into()));
    }
    let mut attempts = Vec::new();
    let mut found: Option<(usize, Coloring)> = None;
    let mut worst_case: Option<(usize, u64, Coloring)> = None;
    let mut consider_infeasible = |q: usize, out: &Outcome, found: &mut Option<(usize, Coloring)>| {
        if let Some(p) = &out.purified {
            let used = p.colors_used();
            if used <= opts.q_max && found.as_ref().is_none_or(|(fq, _)| used < *fq) {
                *found = Some((used, p.clone()));
            }
        }
        if worst_case.as_ref().is_none_or(|(_, c, _)| out.cost < *c) {
            worst_case = Some((q, out.cost, out.coloring.clone()));
        }
    };

    match opts.strategy {
        SearchStrategy::Sequential => {
            for q in 1..=opts.q_max {
                if found.as_ref().is_some_and(|(fq, _)| q >= *fq) {
                    break;
                }
                let out = attempt(g, template, q, opts, &mut attempts)?;
                if out.cost == 0 {
                    found = Some((q, out.coloring));
                    break;
                }
                consider_infeasible(q, &out, &mut found);
            }
        }
        SearchStrategy::Binary => {
            let (mut lo, mut hi) = (1, opts.q_max);
            while lo <= hi {
                let mid = lo + (hi - lo) / 2;
                let out = attempt(g, template, mid, opts, &mut attempts)?;
                if out.cost == 0 {
                    if found.as_ref().is_none_or(|(fq, _)| mid < *fq) {
                        found = Some((mid, out.coloring));
                    }
                    hi = mid - 1;
                } else {
                    consider_infeasible(mid, &out, &mut found);
                    lo = mid + 1;
                }
            }
        }
    }

    match found {
        Some((q, coloring)) => Ok(QSearchResult { q, coloring, attempts }),
        None => {
            let (best_q, best_cost, best) = worst_case.expect("at least one attempt");
            Err(Error::Exhausted {
                q_max: opts.q_max,
                best_q,
                best_cost,
                best_coloring: best.into_colors(),
            })
        }
    }
}
