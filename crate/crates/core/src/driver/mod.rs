//! The three-stage search: pool training, alternate training (a
//! multi-objective genetic loop) and final retraining.

mod config;
mod record;

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::GsaConfig;
pub use record::{mse, RunRecord, TracePoint, Tracer, COST_CONVENTION};

use crate::error::Result;
use crate::gramo::{rank_fronts, Objectives, RankedFronts};
use crate::optimize::{
    descend, line_search_step, normalized_gradient_magnitude, Charge, Ledger, Objective, Stage, Termination,
};
use crate::pool::{CandidateTree, ParameterPool};
use crate::space::{canonicalize, propose, AnsatzPath, GeneticOperator, StateSpace, MAX_OPERATOR_RETRIES};

/// Shared state of one seeded run.
pub struct GsaContext<'a> {
    pub obj: &'a dyn Objective,
    pub space: &'a StateSpace,
    pub cfg: &'a GsaConfig,
    pub ledger: &'a Ledger,
    pub tracer: Tracer,
    pub rng: ChaCha8Rng,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoolStop {
    IterationLimit,
    LeavesStable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlternateStop {
    GenerationLimit,
    BestStable,
}

#[derive(Debug, Clone)]
pub struct PoolOutcome {
    pub pool: ParameterPool,
    pub tree: CandidateTree,
    pub iterations: usize,
    pub stop: PoolStop,
}

#[derive(Debug, Clone)]
pub struct AlternateOutcome {
    pub path: AnsatzPath,
    pub params: Vec<f64>,
    pub cost: f64,
    pub generations: usize,
    pub stop: AlternateStop,
}

/// Per-path parameters owned during alternate training, with cached scores.
#[derive(Debug, Clone)]
struct Owned {
    params: Vec<f64>,
    cost: Option<f64>,
    grad: Option<Vec<f64>>,
}

struct Scored {
    cost: Option<f64>,
    grad: Option<(Vec<f64>, u64)>,
}

impl<'a> GsaContext<'a> {
    pub fn new(obj: &'a dyn Objective, space: &'a StateSpace, cfg: &'a GsaConfig, ledger: &'a Ledger) -> Self {
        Self { obj, space, cfg, ledger, tracer: Tracer::new(), rng: ChaCha8Rng::seed_from_u64(cfg.seed) }
    }

    fn note(&mut self, cost: f64) {
        let stage = self.ledger.stage();
        self.tracer.record(self.ledger.total(), cost, stage);
    }

    /// Evaluates the requested costs and gradients in parallel, then charges
    /// the ledger in input order.
    fn score(&mut self, jobs: &[(&AnsatzPath, &[f64], bool, bool)]) -> Result<Vec<Scored>> {
        let obj = self.obj;
        let results: Vec<Result<Scored>> = jobs
            .par_iter()
            .map(|&(path, params, want_cost, want_grad)| {
                let cost = if want_cost { Some(obj.evaluate(path, params)?) } else { None };
                let grad = if want_grad { Some(obj.gradient_uncounted(path, params)?) } else { None };
                Ok(Scored { cost, grad })
            })
            .collect();
        let mut out = Vec::with_capacity(jobs.len());
        for (r, job) in results.into_iter().zip(jobs) {
            let s = r?;
            let rotations = job.0.rotation_count();
            if let Some(c) = s.cost {
                self.ledger.charge_with(Charge::Cost, 1, rotations);
                self.note(c);
            }
            if let Some((_, evals)) = &s.grad {
                self.ledger.charge_with(Charge::Gradient, *evals, rotations);
            }
            out.push(s);
        }
        Ok(out)
    }

    fn pool_iteration(&mut self, pool: &mut ParameterPool, tree: &mut CandidateTree, epsilon1: f64) -> Result<()> {
        let greedy = self.cfg.greedy(epsilon1);
        let paths: Vec<AnsatzPath> =
            (0..self.cfg.pool_samples).map(|_| tree.sample_path(self.space, &greedy, &mut self.rng).0).collect();
        let params: Vec<Vec<f64>> = paths.iter().map(|p| pool.lookup(p)).collect();
        let jobs: Vec<_> = paths.iter().zip(&params).map(|(p, t)| (p, t.as_slice(), true, true)).collect();
        let scores = self.score(&jobs)?;
        let costs: Vec<f64> = scores.iter().map(|s| s.cost.expect("cost requested")).collect();
        let grads: Vec<Vec<f64>> = scores.into_iter().map(|s| s.grad.expect("gradient requested").0).collect();
        let objectives: Vec<Objectives> = (0..paths.len())
            .map(|i| Objectives::new(costs[i], normalized_gradient_magnitude(&grads[i], params[i].len())))
            .collect();
        let fronts = rank_fronts(&objectives, self.cfg.pool_ranks);
        let mut trained: Vec<&AnsatzPath> = Vec::new();
        let line = self.cfg.line_search();
        for i in fronts.top(self.cfg.pool_ranks) {
            if trained.contains(&&paths[i]) {
                continue;
            }
            let step = line_search_step(self.obj, &paths[i], &params[i], &grads[i], costs[i], &line, self.ledger)?;
            self.note(step.cost);
            pool.update(&paths[i], &step.params)?;
            tree.insert(&paths[i])?;
            trained.push(&paths[i]);
        }
        Ok(())
    }

    /// Warm-up with a ramped tree probability, then the main loop until the
    /// leaf count stops growing.
    pub fn pool_training(&mut self) -> Result<PoolOutcome> {
        self.ledger.set_stage(Stage::PoolTraining);
        let mut pool = ParameterPool::new();
        let mut tree = CandidateTree::new(self.space.n_layers());
        let warm = self.cfg.warmup_iterations;
        for i in 1..=warm {
            let eps = (i - 1) as f64 * self.cfg.epsilon1 / warm as f64;
            self.pool_iteration(&mut pool, &mut tree, eps)?;
        }
        let mut stable = 0;
        let mut iterations = 0;
        let mut stop = PoolStop::IterationLimit;
        for _ in 0..self.cfg.pool_iterations {
            let before = tree.leaf_count();
            self.pool_iteration(&mut pool, &mut tree, self.cfg.epsilon1)?;
            iterations += 1;
            if tree.leaf_count() == before {
                stable += 1;
            } else {
                stable = 0;
            }
            if stable >= self.cfg.pool_patience {
                stop = PoolStop::LeavesStable;
                break;
            }
        }
        Ok(PoolOutcome { pool, tree, iterations, stop })
    }

    /// Child of `parent` under `op`: surviving parent layers keep their
    /// slices, new layers read the pool.
    fn offspring(
        &mut self,
        parent: &AnsatzPath,
        parent_params: &[f64],
        op: GeneticOperator,
        pool: &ParameterPool,
    ) -> Result<(AnsatzPath, Vec<f64>)> {
        let offsets = parent.slot_offsets();
        for _ in 0..MAX_OPERATOR_RETRIES {
            let Some(raw) = propose(self.space, parent, op, &mut self.rng) else { break };
            let mut params = Vec::new();
            for (i, state) in raw.layers.iter().enumerate() {
                match raw.origin[i] {
                    Some(j) => params.extend_from_slice(&parent_params[offsets[j]..offsets[j + 1]]),
                    None => params.extend(pool.entry(state, i)),
                }
            }
            let (child, child_params) =
                canonicalize(parent.n_qubits(), parent.n_layers(), &raw.layers, &params)?;
            if &child != parent {
                return Ok((child, child_params));
            }
        }
        Ok((parent.clone(), parent_params.to_vec()))
    }

    fn ensure_owned(&self, owned: &mut HashMap<AnsatzPath, Owned>, path: &AnsatzPath, pool: &ParameterPool) {
        owned
            .entry(path.clone())
            .or_insert_with(|| Owned { params: pool.lookup(path), cost: None, grad: None });
    }

    fn fill_scores(
        &mut self,
        owned: &mut HashMap<AnsatzPath, Owned>,
        paths: &[AnsatzPath],
        need_grad: bool,
    ) -> Result<()> {
        let mut distinct: Vec<&AnsatzPath> = Vec::new();
        for p in paths {
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }
        let jobs: Vec<_> = distinct
            .iter()
            .filter_map(|&p| {
                let o = &owned[p];
                let want_cost = o.cost.is_none();
                let want_grad = need_grad && o.grad.is_none();
                (want_cost || want_grad).then_some((p, o.params.as_slice(), want_cost, want_grad))
            })
            .collect();
        let keys: Vec<AnsatzPath> = jobs.iter().map(|j| j.0.clone()).collect();
        let scores = self.score(&jobs)?;
        for (p, s) in keys.iter().zip(scores) {
            let o = owned.get_mut(p).expect("owned entry");
            if let Some(c) = s.cost {
                o.cost = Some(c);
            }
            if let Some((g, _)) = s.grad {
                o.grad = Some(g);
            }
        }
        Ok(())
    }

    fn fresh_gradient(&mut self, owned: &mut HashMap<AnsatzPath, Owned>, path: &AnsatzPath) -> Result<Vec<f64>> {
        if owned[path].grad.is_none() || owned[path].cost.is_none() {
            self.fill_scores(owned, std::slice::from_ref(path), true)?;
        }
        Ok(owned[path].grad.clone().expect("gradient filled"))
    }

    /// The genetic loop over owned parameters.
    pub fn alternate_training(&mut self, pool: &ParameterPool, tree: &CandidateTree) -> Result<AlternateOutcome> {
        self.ledger.set_stage(Stage::AlternateTraining);
        let cfg = self.cfg;
        let greedy = cfg.greedy(cfg.epsilon1);
        let line = cfg.line_search();
        let half = cfg.population / 2;
        let mut owned: HashMap<AnsatzPath, Owned> = HashMap::new();
        let mut population: Vec<AnsatzPath> =
            (0..cfg.population).map(|_| tree.sample_path(self.space, &greedy, &mut self.rng).0).collect();
        let mut best: Option<(AnsatzPath, Vec<f64>, f64)> = None;
        let mut stable = 0;
        let mut generations = 0;
        let mut stop = AlternateStop::GenerationLimit;

        for _ in 0..cfg.generations {
            generations += 1;
            for p in &population {
                self.ensure_owned(&mut owned, p, pool);
            }
            self.fill_scores(&mut owned, &population, true)?;
            let objectives: Vec<Objectives> = population
                .iter()
                .map(|p| {
                    let o = &owned[p];
                    let g = o.grad.as_deref().expect("scored");
                    Objectives::new(o.cost.expect("scored"), normalized_gradient_magnitude(g, o.params.len()))
                })
                .collect();
            let fronts = rank_fronts(&objectives, usize::MAX);

            let mut trained: Vec<AnsatzPath> = Vec::new();
            for i in fronts.top(cfg.train_ranks) {
                let path = population[i].clone();
                if trained.contains(&path) {
                    continue;
                }
                for _ in 0..cfg.train_steps {
                    let g = self.fresh_gradient(&mut owned, &path)?;
                    let o = &owned[&path];
                    let step = line_search_step(self.obj, &path, &o.params, &g, o.cost.expect("scored"), &line, self.ledger)?;
                    self.note(step.cost);
                    let o = owned.get_mut(&path).expect("owned entry");
                    if step.alpha > 0.0 {
                        o.params = step.params;
                        o.cost = Some(step.cost);
                        o.grad = None;
                    }
                }
                trained.push(path);
            }

            let survivors = select_survivors(&fronts, &population, &owned, half);
            let beaten = best
                .as_ref()
                .is_some_and(|b| survivors.iter().any(|&i| owned[&population[i]].cost.expect("scored") < b.2));
            let before = best.as_ref().map(|b| (b.0.clone(), b.2));
            if beaten {
                best = None;
            }

            let mut offspring = Vec::with_capacity(survivors.len());
            for &i in &survivors {
                let op = GeneticOperator::random(&mut self.rng);
                let parent = population[i].clone();
                let parent_params = owned[&parent].params.clone();
                let (child, params) = self.offspring(&parent, &parent_params, op, pool)?;
                owned.entry(child.clone()).or_insert(Owned { params, cost: None, grad: None });
                offspring.push(child);
            }

            let mut kept = Vec::with_capacity(survivors.len());
            let mut verdicts: Vec<(AnsatzPath, bool)> = Vec::new();
            for &i in &survivors {
                let path = population[i].clone();
                let eliminated = match verdicts.iter().find(|v| v.0 == path) {
                    Some(v) => v.1,
                    None => {
                        let g = self.fresh_gradient(&mut owned, &path)?;
                        let o = &owned[&path];
                        let cost = o.cost.expect("scored");
                        let probe = line_search_step(self.obj, &path, &o.params, &g, cost, &line, self.ledger)?;
                        let done = probe.alpha * normalized_gradient_magnitude(&g, o.params.len()) < cfg.xi;
                        if done && best.as_ref().is_none_or(|b| cost < b.2) {
                            best = Some((path.clone(), o.params.clone(), cost));
                        }
                        verdicts.push((path.clone(), done));
                        done
                    }
                };
                if !eliminated {
                    kept.push(path);
                }
            }

            population = kept;
            population.extend(offspring);
            population.truncate(cfg.population);
            while population.len() < cfg.population {
                population.push(tree.sample_path(self.space, &greedy, &mut self.rng).0);
            }

            let after = best.as_ref().map(|b| (b.0.clone(), b.2));
            if after.is_none() || after != before {
                stable = 0;
            } else {
                stable += 1;
            }
            if stable >= cfg.best_patience {
                stop = AlternateStop::BestStable;
                break;
            }
        }

        for p in &population {
            self.ensure_owned(&mut owned, p, pool);
        }
        self.fill_scores(&mut owned, &population, false)?;
        let mut winner: Option<(AnsatzPath, Vec<f64>, f64)> = None;
        for p in &population {
            let o = &owned[p];
            let c = o.cost.expect("scored");
            if winner.as_ref().is_none_or(|w| c < w.2) {
                winner = Some((p.clone(), o.params.clone(), c));
            }
        }
        if let Some(b) = best {
            if winner.as_ref().is_none_or(|w| b.2 < w.2) {
                winner = Some(b);
            }
        }
        let (path, params, cost) = winner.expect("population is never empty");
        Ok(AlternateOutcome { path, params, cost, generations, stop })
    }

    /// Plain descent on a fixed path until convergence or the iteration cap.
    pub fn vqe_retraining(&mut self, path: &AnsatzPath, params: &[f64]) -> Result<(Vec<f64>, f64, Termination)> {
        self.ledger.set_stage(Stage::Retraining);
        let cfg = self.cfg.retraining();
        let mut costs = Vec::new();
        let out = descend(self.obj, path, params, &cfg, self.ledger, |q, c| costs.push((q, c)))?;
        for (q, c) in costs {
            self.tracer.record(q, c, Stage::Retraining);
        }
        Ok((out.params, out.cost, out.termination))
    }
}

/// First fronts whole while they fit in `half`, then the next front by
/// ascending cost (stable in population order).
fn select_survivors(
    fronts: &RankedFronts,
    population: &[AnsatzPath],
    owned: &HashMap<AnsatzPath, Owned>,
    half: usize,
) -> Vec<usize> {
    let mut chosen = Vec::with_capacity(half);
    for front in &fronts.fronts {
        if chosen.len() + front.len() <= half {
            chosen.extend_from_slice(front);
            continue;
        }
        let mut rest = front.clone();
        rest.sort_by(|&a, &b| {
            let ca = owned[&population[a]].cost.expect("scored");
            let cb = owned[&population[b]].cost.expect("scored");
            ca.total_cmp(&cb).then(a.cmp(&b))
        });
        chosen.extend(rest.into_iter().take(half - chosen.len()));
        break;
    }
    chosen
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct GsaOutcome {
    pub record: RunRecord,
    pub pool: PoolOutcome,
    pub alternate: AlternateOutcome,
}

/// Runs all three stages and assembles the record. `exact` is the reference
/// optimum used for the absolute error, when known.
pub fn run_gsa(
    obj: &dyn Objective,
    space: &StateSpace,
    cfg: &GsaConfig,
    exact: Option<f64>,
    ledger: &Ledger,
) -> Result<GsaOutcome> {
    cfg.validate()?;
    let mut ctx = GsaContext::new(obj, space, cfg, ledger);
    let pool = ctx.pool_training()?;
    let alternate = ctx.alternate_training(&pool.pool, &pool.tree)?;
    let (params, cost, retrain_stop) = ctx.vqe_retraining(&alternate.path, &alternate.params)?;
    let mut terminations = BTreeMap::new();
    terminations.insert("pool".to_string(), format!("{:?}", pool.stop));
    terminations.insert("alternate".to_string(), format!("{:?}", alternate.stop));
    terminations.insert("retrain".to_string(), format!("{retrain_stop:?}"));
    let record = RunRecord {
        method: "gsa".into(),
        seed: cfg.seed,
        n_qubits: space.n_qubits(),
        n_layers: space.n_layers(),
        path: alternate.path.to_text(),
        params,
        cost,
        exact_energy: exact,
        abs_error: exact.map(|e| (cost - e).abs()),
        quantum_cost: ledger.total(),
        breakdown: ledger.summary(),
        terminations,
        sampling: Some(space.sampling_mode()),
        cost_convention: COST_CONVENTION.into(),
        trace: ctx.tracer.into_points(),
    };
    Ok(GsaOutcome { record, pool, alternate })
}

/// Uniform angle in `(-pi, pi]`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    std::f64::consts::PI - rng.gen::<f64>() * std::f64::consts::TAU
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gramo::Objectives;

    #[test]
    fn survivors_fill_by_cost() {
        let paths: Vec<AnsatzPath> = ["q0:Ry", "q1:Ry", "q2:Ry", "q0:Ry q1:Ry"]
            .iter()
            .map(|t| AnsatzPath::parse(3, t).unwrap())
            .collect();
        let costs = [0.5, 0.2, 0.9, 0.1];
        let mut owned = HashMap::new();
        for (p, c) in paths.iter().zip(costs) {
            owned.insert(p.clone(), Owned { params: vec![], cost: Some(c), grad: None });
        }
        let fronts = RankedFronts { fronts: vec![vec![0], vec![1, 2, 3]] };
        assert_eq!(select_survivors(&fronts, &paths, &owned, 2), vec![0, 3]);
        assert_eq!(select_survivors(&fronts, &paths, &owned, 4), vec![0, 1, 2, 3]);
        let _ = Objectives::new(0.0, 0.0);
    }

    #[test]
    fn angles_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let a = random_angle(&mut rng);
            assert!(a > -std::f64::consts::PI && a <= std::f64::consts::PI);
        }
    }
}
