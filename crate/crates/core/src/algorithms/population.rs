use rand::Rng;

use super::{
    check_common, expect_kind, AlgorithmConfig, AlgorithmKind, Observer, RunOptions, RunTrace,
    TieBreak,
};
use crate::bitstring::Bitstring;
use crate::error::{LabError, Result};
use crate::fitness::FitnessFunction;
use crate::mutation::StandardBitMutation;
use crate::rng::RngStream;

/// (μ+λ) EA: parents and offspring compete for the μ slots.
pub fn run_mu_plus_lambda_ea<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
) -> Result<RunTrace> {
    expect_kind(cfg, AlgorithmKind::MuPlusLambdaEa)?;
    check_common(f, cfg, opts)?;
    Ok(plus(f, cfg, opts, rng, None))
}

/// (μ,λ) EA: the next parents are the μ best offspring, ties broken
/// uniformly at random.
pub fn run_mu_comma_lambda_ea<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
) -> Result<RunTrace> {
    expect_kind(cfg, AlgorithmKind::MuCommaLambdaEa)?;
    check_common(f, cfg, opts)?;
    Ok(comma(f, cfg, opts, rng, None))
}

/// Indices of `mu` entries with the largest fitness. Entries tied at the
/// cut-off value are chosen uniformly at random; no randomness is consumed
/// when there is nothing to choose.
pub fn select_best_mu<R: Rng + ?Sized>(
    fitness: &[f64],
    mu: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if mu == 0 || mu > fitness.len() {
        return Err(LabError::Config(format!(
            "cannot select {mu} of {} candidates",
            fitness.len()
        )));
    }
    let mut sel = Selector::default();
    let mut out = Vec::with_capacity(mu);
    sel.best_mu(fitness, mu, rng, &mut out);
    Ok(out)
}

#[derive(Default)]
struct Selector {
    values: Vec<f64>,
    tied: Vec<usize>,
}

impl Selector {
    fn best_mu<R: Rng + ?Sized>(
        &mut self,
        fitness: &[f64],
        mu: usize,
        rng: &mut R,
        out: &mut Vec<usize>,
    ) {
        out.clear();
        if mu == fitness.len() {
            out.extend(0..mu);
            return;
        }
        self.values.clear();
        self.values.extend_from_slice(fitness);
        let (_, &mut cut, _) = self
            .values
            .select_nth_unstable_by(mu - 1, |a, b| b.total_cmp(a));
        self.tied.clear();
        for (i, &v) in fitness.iter().enumerate() {
            if v > cut {
                out.push(i);
            } else if v == cut {
                self.tied.push(i);
            }
        }
        let need = mu - out.len();
        if need < self.tied.len() {
            for i in 0..need {
                let j = rng.gen_range(i..self.tied.len());
                self.tied.swap(i, j);
            }
        }
        out.extend_from_slice(&self.tied[..need]);
    }
}

#[inline]
fn pick_parent(mu: usize, rng: &mut RngStream) -> usize {
    if mu == 1 {
        0
    } else {
        rng.gen_range(0..mu)
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn initial_population<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
    trace: &mut RunTrace,
) -> (Vec<Bitstring>, Vec<f64>) {
    let mut pop = Vec::with_capacity(cfg.mu);
    let mut fit = Vec::with_capacity(cfg.mu);
    for _ in 0..cfg.mu {
        let x = opts.start.sample(cfg.n(), rng);
        let fx = f.evaluate(&x);
        trace.evaluated(fx, opts.target.reached(&x));
        pop.push(x);
        fit.push(fx);
    }
    (pop, fit)
}

/// Creates λ offspring from uniformly chosen parents. The whole generation is
/// always completed, even after a target point appears.
#[allow(clippy::too_many_arguments)]
fn breed<F: FitnessFunction + ?Sized>(
    f: &F,
    op: &StandardBitMutation,
    opts: &RunOptions,
    parents: &[Bitstring],
    offspring: &mut [Bitstring],
    off_fit: &mut [f64],
    rng: &mut RngStream,
    trace: &mut RunTrace,
) {
    for (y, fy) in offspring.iter_mut().zip(off_fit.iter_mut()) {
        let p = pick_parent(parents.len(), rng);
        y.copy_from(&parents[p]);
        op.mutate_in_place(y, rng);
        *fy = f.evaluate(y);
        trace.evaluated(*fy, opts.target.reached(y));
    }
    trace.generations += 1;
}

pub(super) fn plus<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
    mut observer: Option<Observer<'_>>,
) -> RunTrace {
    let (mu, lambda) = (cfg.mu, cfg.lambda);
    let op = StandardBitMutation::new(cfg.mutation);
    let mut trace = RunTrace::new();
    let (mut pop, mut fit) = initial_population(f, cfg, opts, rng, &mut trace);
    trace.track(trace.best_fitness);
    if let Some(obs) = observer.as_mut() {
        obs(&pop[argmax(&fit)]);
    }

    let mut offspring = vec![Bitstring::zeros(cfg.n()); lambda];
    let mut off_fit = vec![0.0; lambda];
    let mut next = pop.clone();
    let mut next_fit = fit.clone();
    let mut order: Vec<usize> = Vec::with_capacity(mu + lambda);
    let mut all_fit: Vec<f64> = Vec::with_capacity(mu + lambda);
    let mut chosen: Vec<usize> = Vec::with_capacity(mu);
    let mut selector = Selector::default();

    while trace.hit_time.is_none()
        && trace.evaluations + lambda as u64 <= opts.budget.max_evaluations
    {
        breed(
            f,
            &op,
            opts,
            &pop,
            &mut offspring,
            &mut off_fit,
            rng,
            &mut trace,
        );

        // candidate c < lambda is offspring c, otherwise parent c - lambda
        all_fit.clear();
        all_fit.extend_from_slice(&off_fit);
        all_fit.extend_from_slice(&fit);
        match cfg.tie_break {
            TieBreak::PreferOffspring => {
                order.clear();
                order.extend(0..mu + lambda);
                order.sort_by(|&a, &b| all_fit[b].total_cmp(&all_fit[a]));
                chosen.clear();
                chosen.extend_from_slice(&order[..mu]);
            }
            TieBreak::UniformRandom => selector.best_mu(&all_fit, mu, rng, &mut chosen),
        }
        for (slot, &c) in chosen.iter().enumerate() {
            let src = if c < lambda {
                &offspring[c]
            } else {
                &pop[c - lambda]
            };
            next[slot].copy_from(src);
            next_fit[slot] = all_fit[c];
        }
        std::mem::swap(&mut pop, &mut next);
        std::mem::swap(&mut fit, &mut next_fit);

        let best = argmax(&fit);
        trace.track(fit[best]);
        if let Some(obs) = observer.as_mut() {
            obs(&pop[best]);
        }
    }
    trace.finish()
}

pub(super) fn comma<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
    mut observer: Option<Observer<'_>>,
) -> RunTrace {
    let (mu, lambda) = (cfg.mu, cfg.lambda);
    let op = StandardBitMutation::new(cfg.mutation);
    let mut trace = RunTrace::new();
    let (mut parents, _) = initial_population(f, cfg, opts, rng, &mut trace);
    trace.track(trace.best_fitness);
    if let Some(obs) = observer.as_mut() {
        let fit: Vec<f64> = parents.iter().map(|x| f.evaluate(x)).collect();
        obs(&parents[argmax(&fit)]);
    }

    let mut offspring = vec![Bitstring::zeros(cfg.n()); lambda];
    let mut off_fit = vec![0.0; lambda];
    let mut chosen: Vec<usize> = Vec::with_capacity(mu);
    let mut selector = Selector::default();

    while trace.hit_time.is_none()
        && trace.evaluations + lambda as u64 <= opts.budget.max_evaluations
    {
        breed(
            f,
            &op,
            opts,
            &parents,
            &mut offspring,
            &mut off_fit,
            rng,
            &mut trace,
        );
        selector.best_mu(&off_fit, mu, rng, &mut chosen);
        let mut best = chosen[0];
        for (slot, &c) in chosen.iter().enumerate() {
            parents[slot].copy_from(&offspring[c]);
            if off_fit[c] > off_fit[best] {
                best = c;
            }
        }
        trace.track(off_fit[best]);
        if let Some(obs) = observer.as_mut() {
            obs(&offspring[best]);
        }
    }
    trace.finish()
}
