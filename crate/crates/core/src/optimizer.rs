//! Maximization of intricacies over the probability simplex.
//!
//! The objective is neither convex nor concave, so the search is
//! multi-start: every warm start (lower-bound witnesses from
//! [`generators::witnesses`]) and every Dirichlet(1) random start is
//! climbed by exponentiated-gradient ascent
//!
//! ```text
//! p ← p · exp(η ∇I(p)) / Z
//! ```
//!
//! with a backtracking step size. Multiplicative updates keep iterates
//! strictly positive, which the gradient needs, and keep them exactly on
//! the simplex. True maximizers sit on the boundary and are approached
//! asymptotically; entries are floored at [`FLOOR`] instead of reaching 0.

use std::borrow::Cow;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::coeffs::{binomial, CoefficientTable};
use crate::engine::{intricacy_exact, intricacy_of_probs};
use crate::error::{invalid, Error, Result};
use crate::exec::{map_slice, Execution};
use crate::generators::{self, type_weights_to_probs};
use crate::info::{entropy, entropy_of, Nats, NATS_TOL};
use crate::lattice;
use crate::system::{JointDistribution, SystemShape};

pub use crate::system::exchangeability_distance;

/// Smallest probability kept during ascent.
pub const FLOOR: f64 = 1e-300;

const MAX_BACKTRACK: usize = 60;
const MAX_STEP: f64 = 1e6;
/// Consecutive sub-`value_tol` gains required before declaring convergence.
const PATIENCE: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// Random Dirichlet(1) starts, in addition to warm starts; at least 1.
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    pub value_tol: f64,
    pub grad_tol: f64,
    pub seed: u64,
    /// Entropy constraint `H = x · n · log d`, when set.
    pub entropy_target_fraction: Option<f64>,
    /// Half-width δ of the window `|H / (n log d) − x| ≤ δ`.
    pub entropy_tol: f64,
    pub support_threshold: f64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 20,
            max_iters: 2000,
            initial_step: 1.0,
            value_tol: 1e-12,
            grad_tol: 1e-10,
            seed: 0,
            entropy_target_fraction: None,
            entropy_tol: 1e-3,
            support_threshold: 1e-6,
            exec: Execution::default(),
        }
    }
}

impl OptimizerConfig {
    fn check(&self) -> Result<()> {
        if self.restarts == 0 {
            return invalid("restarts must be at least 1");
        }
        for (name, v) in [
            ("initial_step", self.initial_step),
            ("value_tol", self.value_tol),
            ("grad_tol", self.grad_tol),
            ("support_threshold", self.support_threshold),
        ] {
            if !(v > 0.0) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    pub dist: JointDistribution,
    pub value: Nats,
    pub entropy: Nats,
    pub iterations: usize,
    pub converged: bool,
    /// Position of the winning start: warm starts first, then random ones.
    pub restart_index: usize,
    /// Final value reached from every start, in start order.
    pub restart_values: Vec<f64>,
}

/// Counts of configurations above and below a probability threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SupportStats {
    pub support: usize,
    pub forbidden: usize,
}

pub fn support_stats(dist: &JointDistribution, threshold: f64) -> Result<SupportStats> {
    if !(threshold > 0.0) {
        return invalid("support threshold must be positive");
    }
    let forbidden = dist.probs().iter().filter(|&&p| p < threshold).count();
    Ok(SupportStats { support: dist.probs().len() - forbidden, forbidden })
}

/// `∂I/∂p_ω = −2 Σ_S c_S log m_S(ω_S) + log p_ω − 1`, treating the `p_ω` as free coordinates.
pub fn intricacy_gradient(dist: &JointDistribution, table: &CoefficientTable) -> Result<Vec<f64>> {
    check_table(dist.shape(), table)?;
    if let Some(i) = dist.probs().iter().position(|&p| p <= 0.0) {
        return Err(Error::Domain(format!(
            "gradient is undefined on the simplex boundary (entry {i} is zero)"
        )));
    }
    Ok(raw_gradient(dist.probs(), dist.shape(), table, Execution::default()))
}

fn raw_gradient(probs: &[f64], shape: SystemShape, table: &CoefficientTable, exec: Execution) -> Vec<f64> {
    let logs = lattice::weighted_log_marginals(probs, shape, table.coefficients(), exec);
    logs.iter().zip(probs).map(|(l, p)| -2.0 * l + p.ln() - 1.0).collect()
}

/// Largest system for which [`intricacy_hessian`] builds the dense matrix.
pub const MAX_HESSIAN_STATES: usize = 256;

/// Dense Hessian of `I^c` in the free coordinates `p_ω`, row-major.
pub fn intricacy_hessian(dist: &JointDistribution, table: &CoefficientTable) -> Result<Vec<f64>> {
    let shape = dist.shape();
    check_table(shape, table)?;
    let states = shape.num_states();
    if states > MAX_HESSIAN_STATES {
        return Err(Error::Unsupported(format!(
            "dense Hessian limited to {MAX_HESSIAN_STATES} states, system has {states}"
        )));
    }
    let probs = dist.probs();
    if probs.iter().any(|&p| p <= 0.0) {
        return Err(Error::Domain("Hessian is undefined on the simplex boundary".into()));
    }
    let n = shape.n();
    let mut hess = vec![0.0; states * states];
    let mut digits = vec![0; n];
    let configs: Vec<Vec<usize>> = (0..states)
        .map(|i| {
            shape.write_digits(i, &mut digits);
            digits.clone()
        })
        .collect();
    for bits in 0..1u32 << n {
        let c = table.get(bits.count_ones() as usize);
        if c == 0.0 {
            continue;
        }
        let m = crate::system::marginal_probs(probs, shape, bits);
        let project = |cfg: &[usize]| {
            (0..n).filter(|&i| bits >> i & 1 == 1).fold(0, |acc, i| acc * shape.d() + cfg[i])
        };
        let keys: Vec<usize> = configs.iter().map(|cfg| project(cfg)).collect();
        for a in 0..states {
            for b in 0..states {
                if keys[a] == keys[b] {
                    hess[a * states + b] -= 2.0 * c / m[keys[a]];
                }
            }
        }
    }
    for a in 0..states {
        hess[a * states + a] += 1.0 / probs[a];
    }
    Ok(hess)
}

fn check_table(shape: SystemShape, table: &CoefficientTable) -> Result<()> {
    if table.n() != shape.n() {
        return invalid(format!("coefficient table is for n={}, system has n={}", table.n(), shape.n()));
    }
    table.ensure_valid()
}

/// Moves `dist` along a segment until `|H − x·n·log d| ≤ tol`.
///
/// Entropy that is too low is raised by mixing with the uniform law, entropy
/// that is too high is lowered by mixing with the point mass on the most
/// likely configuration. Inputs already inside the window are returned as is.
pub fn adjust_entropy(dist: &JointDistribution, x: f64, tol: f64) -> Result<JointDistribution> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("entropy fraction must lie in [0,1], got {x}"));
    }
    let shape = dist.shape();
    let target = x * shape.n() as f64 * (shape.d() as f64).ln();
    let probs = adjust_probs(dist.probs(), target, tol.max(0.0));
    Ok(JointDistribution::from_parts(shape, probs))
}

fn adjust_probs(probs: &[f64], target: f64, tol: f64) -> Vec<f64> {
    let h0 = entropy_of(probs);
    if (h0 - target).abs() <= tol {
        return probs.to_vec();
    }
    let endpoint: Vec<f64> = if h0 < target {
        vec![1.0 / probs.len() as f64; probs.len()]
    } else {
        let top = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i);
        let mut e = vec![0.0; probs.len()];
        e[top] = 1.0;
        e
    };
    let blend = |t: f64| -> Vec<f64> { probs.iter().zip(&endpoint).map(|(p, e)| (1.0 - t) * p + t * e).collect() };
    // Along either segment {t : H(t) on the same side as H(0)} is an interval
    // [0, t*) by concavity of entropy, so plain bisection applies.
    let below = h0 < target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = blend(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let cand = blend(mid);
        let h = entropy_of(&cand);
        if (h - target).abs() <= tol {
            return cand;
        }
        if (h < target) == below {
            lo = mid;
        } else {
            hi = mid;
        }
        best = cand;
    }
    best
}

struct EntropyWindow {
    target: f64,
    half_width: f64,
}

enum Param {
    Full,
    /// Binary exchangeable laws parametrized by count-of-ones weights.
    TypeWeights(TypeModel),
}

/// Closed-form objective on type weights `q`.
///
/// A fixed word with `j` ones among the first `k` coordinates has probability
/// `p_{k,j} = Σ_m q_m · C(n−k, m−j) / C(n, m)`, and under exchangeability
/// `I^c = 2 Σ_k C(n,k) c_k H_k − H_n` with `H_k = −Σ_j C(k,j) p_{k,j} log p_{k,j}`.
struct TypeModel {
    n: usize,
    /// `share[k][j][m] = C(n−k, m−j) / C(n, m)`, zero outside `j ≤ m ≤ n−k+j`.
    share: Vec<Vec<Vec<f64>>>,
    /// `2 C(n,k) c_k`, minus 1 at `k = n`.
    weight: Vec<f64>,
}

impl TypeModel {
    fn new(n: usize, table: &CoefficientTable) -> Self {
        let share = (0..=n)
            .map(|k| {
                (0..=k)
                    .map(|j| {
                        (0..=n)
                            .map(|m| {
                                if m >= j && m - j <= n - k {
                                    binomial(n - k, m - j) / binomial(n, m)
                                } else {
                                    0.0
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut weight: Vec<f64> = (0..=n).map(|k| 2.0 * binomial(n, k) * table.get(k)).collect();
        weight[n] -= 1.0;
        TypeModel { n, share, weight }
    }

    fn word_probs(&self, q: &[f64], k: usize) -> impl Iterator<Item = f64> + '_ {
        let q = q.to_vec();
        self.share[k].iter().map(move |row| row.iter().zip(&q).map(|(a, b)| a * b).sum())
    }

    fn value(&self, q: &[f64]) -> f64 {
        (1..=self.n)
            .map(|k| {
                let h: f64 = self
                    .word_probs(q, k)
                    .enumerate()
                    .filter(|&(_, p)| p > 0.0)
                    .map(|(j, p)| -binomial(k, j) * p * p.ln())
                    .sum();
                self.weight[k] * h
            })
            .sum()
    }

    fn gradient(&self, q: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n + 1];
        // k = 0 only shifts every component by a constant; kept so the result
        // is the class average of the full free-coordinate gradient.
        for k in 0..=self.n {
            for (j, p) in self.word_probs(q, k).enumerate() {
                let factor = -self.weight[k] * binomial(k, j) * (p.ln() + 1.0);
                for (gm, a) in g.iter_mut().zip(&self.share[k][j]) {
                    *gm += factor * a;
                }
            }
        }
        g
    }
}

struct Problem<'a> {
    shape: SystemShape,
    table: &'a CoefficientTable,
    param: Param,
    window: Option<EntropyWindow>,
    exec: Execution,
}

impl Problem<'_> {
    fn dim(&self) -> usize {
        match &self.param {
            Param::Full => self.shape.num_states(),
            Param::TypeWeights(model) => model.n + 1,
        }
    }

    fn probs<'x>(&self, x: &'x [f64]) -> Cow<'x, [f64]> {
        match &self.param {
            Param::Full => Cow::Borrowed(x),
            Param::TypeWeights(_) => Cow::Owned(type_weights_to_probs(x, self.shape.n())),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match &self.param {
            Param::Full => intricacy_of_probs(x, self.shape, self.table, self.exec),
            Param::TypeWeights(model) => model.value(x),
        }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.param {
            Param::Full => raw_gradient(x, self.shape, self.table, self.exec),
            Param::TypeWeights(model) => model.gradient(x),
        }
    }

    /// Window membership; `slack` absorbs rounding from renormalizing the final iterate.
    fn in_window(&self, x: &[f64], slack: f64) -> bool {
        self.window
            .as_ref()
            .is_none_or(|w| (entropy_of(&self.probs(x)) - w.target).abs() <= w.half_width + slack)
    }

    fn repair(&self, x: Vec<f64>) -> Vec<f64> {
        match (&self.window, &self.param) {
            (Some(w), Param::Full) if !self.in_window(&x, 0.0) => {
                interiorize(adjust_probs(&x, w.target, w.half_width / 4.0))
            }
            _ => x,
        }
    }
}

fn interiorize(mut x: Vec<f64>) -> Vec<f64> {
    x.iter_mut().for_each(|v| *v = v.max(FLOOR));
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    x
}

struct Run {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

fn ascend(problem: &Problem<'_>, start: Vec<f64>, cfg: &OptimizerConfig) -> Run {
    let mut x = problem.repair(interiorize(start));
    let mut value = problem.value(&x);
    let mut step = cfg.initial_step;
    let mut stall = 0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        iterations += 1;
        let g = problem.gradient(&x);
        let mean: f64 = x.iter().zip(&g).map(|(p, gi)| p * gi).sum();
        let spread: f64 = x.iter().zip(&g).map(|(p, gi)| p * (gi - mean).powi(2)).sum();
        if spread.sqrt() < cfg.grad_tol {
            converged = true;
            break;
        }
        let top = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(p, gi)| p * (step * (gi - top)).exp()).collect();
            let cand = problem.repair(interiorize(cand));
            let v = problem.value(&cand);
            if v >= value {
                accepted = Some((cand, v));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, v)) = accepted else {
            converged = true;
            break;
        };
        let gain = v - value;
        x = cand;
        value = v;
        step = (step * 2.0).min(MAX_STEP);
        if gain < cfg.value_tol {
            stall += 1;
            if stall >= PATIENCE {
                converged = true;
                break;
            }
        } else {
            stall = 0;
        }
    }
    Run { x, value, iterations, converged }
}

fn random_start(dim: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let w: Vec<f64> = (0..dim).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Runs every start and keeps the best; ties within `value_tol` go to the earliest start.
fn multi_start(problem: &Problem<'_>, warm: Vec<Vec<f64>>, cfg: &OptimizerConfig) -> (Run, usize, Vec<f64>) {
    let dim = problem.dim();
    let mut starts = warm;
    starts.extend((0..cfg.restarts).map(|r| random_start(dim, cfg.seed, r as u64)));
    let runs = map_slice(&starts, cfg.exec, |s| ascend(problem, s.clone(), cfg));
    let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        let feasible = problem.in_window(&run.x, 0.0);
        let best_feasible = problem.in_window(&runs[best].x, 0.0);
        if (feasible && !best_feasible) || (feasible == best_feasible && run.value > runs[best].value + cfg.value_tol) {
            best = i;
        }
    }
    let run = runs.into_iter().nth(best).expect("restarts ≥ 1");
    (run, best, values)
}

fn finish(shape: SystemShape, table: &CoefficientTable, run: Run, index: usize, values: Vec<f64>) -> Result<OptResult> {
    let dist = JointDistribution::from_weights(shape, run.x)?;
    let value = intricacy_exact(&dist, table)?;
    Ok(OptResult {
        entropy: entropy(&dist),
        dist,
        value,
        iterations: run.iterations,
        converged: run.converged,
        restart_index: index,
        restart_values: values,
    })
}

/// Maximizes `I^c` over `M(d,n)`, warm-started from the built-in witnesses.
///
/// Dispatches to [`maximize_with_entropy`] when the config carries an entropy target.
pub fn maximize(shape: SystemShape, table: &CoefficientTable, config: &OptimizerConfig) -> Result<OptResult> {
    if let Some(x) = config.entropy_target_fraction {
        return maximize_with_entropy(shape, table, x, config);
    }
    maximize_from(shape, table, config, &generators::witnesses(shape, None))
}

/// Like [`maximize`] with caller-supplied warm starts only.
pub fn maximize_from(
    shape: SystemShape,
    table: &CoefficientTable,
    config: &OptimizerConfig,
    warm_starts: &[JointDistribution],
) -> Result<OptResult> {
    config.check()?;
    check_table(shape, table)?;
    if let Some(bad) = warm_starts.iter().find(|w| w.shape() != shape) {
        return invalid(format!("warm start has shape {}, expected {shape}", bad.shape()));
    }
    let problem = Problem { shape, table, param: Param::Full, window: None, exec: config.exec };
    let warm = warm_starts.iter().map(|w| w.probs().to_vec()).collect();
    let (run, index, values) = multi_start(&problem, warm, config);
    finish(shape, table, run, index, values)
}

/// Maximizes `I^c` subject to `|H / (n log d) − x| ≤ config.entropy_tol`.
pub fn maximize_with_entropy(
    shape: SystemShape,
    table: &CoefficientTable,
    x: f64,
    config: &OptimizerConfig,
) -> Result<OptResult> {
    maximize_with_entropy_from(shape, table, x, config, &[])
}

/// [`maximize_with_entropy`] with extra warm starts; every start is repaired into the window.
pub fn maximize_with_entropy_from(
    shape: SystemShape,
    table: &CoefficientTable,
    x: f64,
    config: &OptimizerConfig,
    extra_starts: &[JointDistribution],
) -> Result<OptResult> {
    config.check()?;
    check_table(shape, table)?;
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("entropy fraction must lie in [0,1], got {x}"));
    }
    if !(config.entropy_tol > 0.0) {
        return invalid("entropy window must have positive width");
    }
    let full = shape.n() as f64 * (shape.d() as f64).ln();
    let window = EntropyWindow { target: x * full, half_width: config.entropy_tol * full };
    let problem = Problem { shape, table, param: Param::Full, window: Some(window), exec: config.exec };
    let warm = generators::witnesses(shape, Some(x))
        .iter()
        .chain(extra_starts)
        .map(|w| w.probs().to_vec())
        .collect();
    let (run, index, values) = multi_start(&problem, warm, config);
    let result = finish(shape, table, run, index, values)?;
    if !problem.in_window(result.dist.probs(), NATS_TOL) {
        return Err(Error::Domain(format!(
            "no start could be brought into the entropy window around x={x}"
        )));
    }
    Ok(result)
}

/// Maximizes `I^c` over binary exchangeable laws, searching the `n+1` type weights.
pub fn maximize_exchangeable(n: usize, table: &CoefficientTable, config: &OptimizerConfig) -> Result<OptResult> {
    config.check()?;
    let shape = SystemShape::new(2, n)?;
    check_table(shape, table)?;
    let model = TypeModel::new(n, table);
    let problem = Problem { shape, table, param: Param::TypeWeights(model), window: None, exec: config.exec };
    let mut sync = vec![0.0; n + 1];
    sync[0] = 0.5;
    sync[n] = 0.5;
    let (run, index, values) = multi_start(&problem, vec![sync], config);
    let probs = type_weights_to_probs(&run.x, n);
    let run = Run { x: probs, ..run };
    finish(shape, table, run, index, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{build_table, LambdaSpec};
    use crate::generators::{generate, ExampleKind};
    use std::f64::consts::LN_2;

    fn ets(n: usize) -> CoefficientTable {
        build_table(&LambdaSpec::Lebesgue, n).unwrap()
    }

    fn shape(d: usize, n: usize) -> SystemShape {
        SystemShape::new(d, n).unwrap()
    }

    #[test]
    fn gradient_at_uniform_is_constant() {
        for (d, n) in [(2, 3), (3, 2), (2, 5)] {
            let u = JointDistribution::uniform(shape(d, n));
            let g = intricacy_gradient(&u, &ets(n)).unwrap();
            assert!(g.iter().all(|&v| (v + 1.0).abs() < 1e-12), "{g:?}");
        }
    }

    #[test]
    fn gradient_rejects_boundary_points() {
        let pm = JointDistribution::point_mass(shape(2, 2), &[0, 0]).unwrap();
        assert!(matches!(intricacy_gradient(&pm, &ets(2)), Err(Error::Domain(_))));
    }

    #[test]
    fn hessian_is_symmetric() {
        let dist = JointDistribution::from_weights(shape(2, 3), (1..=8).map(f64::from).collect()).unwrap();
        let h = intricacy_hessian(&dist, &ets(3)).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                assert!((h[a * 8 + b] - h[b * 8 + a]).abs() < 1e-12);
            }
        }
        let big = JointDistribution::uniform(shape(2, 9));
        assert!(intricacy_hessian(&big, &ets(9)).is_err());
    }

    #[test]
    fn support_stats_examples() {
        let u = JointDistribution::uniform(shape(2, 3));
        assert_eq!(support_stats(&u, 1e-6).unwrap(), SupportStats { support: 8, forbidden: 0 });
        assert!(support_stats(&u, 0.0).is_err());
    }

    #[test]
    fn adjust_entropy_examples() {
        let u = JointDistribution::uniform(shape(2, 3));
        assert_eq!(adjust_entropy(&u, 1.0, 1e-9).unwrap(), u);
        let pm = JointDistribution::point_mass(shape(2, 3), &[1, 0, 1]).unwrap();
        assert_eq!(adjust_entropy(&pm, 0.0, 1e-9).unwrap(), pm);

        let sync = generate(&ExampleKind::Synchronized, shape(2, 2)).unwrap();
        let adjusted = adjust_entropy(&sync, 0.75, 1e-9).unwrap();
        assert!((entropy(&adjusted).value() - 1.5 * LN_2).abs() <= 1e-9);

        let down = adjust_entropy(&u, 0.3, 1e-9).unwrap();
        assert!((entropy(&down).value() - 0.9 * LN_2).abs() <= 1e-9);
        assert!(adjust_entropy(&u, 1.5, 1e-9).is_err());
    }

    #[test]
    fn warm_start_is_never_lost() {
        let s = shape(2, 3);
        let xor = generate(&ExampleKind::N3Xor, s).unwrap();
        let cfg = OptimizerConfig { restarts: 1, max_iters: 50, ..Default::default() };
        let best = maximize_from(s, &ets(3), &cfg, &[xor]).unwrap();
        assert!(best.value.value() >= LN_2 / 2.0 - 1e-12);
    }

    #[test]
    fn entropy_window_errors() {
        let cfg = OptimizerConfig { entropy_tol: 0.0, ..Default::default() };
        assert!(maximize_with_entropy(shape(2, 2), &ets(2), 0.5, &cfg).is_err());
    }

    #[test]
    fn type_model_matches_the_full_law() {
        let n = 5;
        let table = build_table(&LambdaSpec::two_point(0.2).unwrap(), n).unwrap();
        let model = TypeModel::new(n, &table);
        let q: Vec<f64> = [3.0, 1.0, 0.5, 2.0, 0.25, 1.25].iter().map(|v| v / 8.0).collect();
        let probs = type_weights_to_probs(&q, n);
        let s = shape(2, n);
        let exact = intricacy_of_probs(&probs, s, &table, Execution::Sequential);
        assert!((model.value(&q) - exact).abs() < 1e-12);
        let full = raw_gradient(&probs, s, &table, Execution::Sequential);
        let mut class = vec![0.0; n + 1];
        for (i, g) in full.iter().enumerate() {
            class[i.count_ones() as usize] += g / binomial(n, i.count_ones() as usize);
        }
        for (a, b) in model.gradient(&q).iter().zip(&class) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn exchangeable_search_on_two_coordinates_finds_the_copy_law() {
        let cfg = OptimizerConfig { restarts: 4, ..Default::default() };
        let best = maximize_exchangeable(2, &ets(2), &cfg).unwrap();
        assert!((best.value.value() - LN_2 / 3.0).abs() < 1e-6);
        assert!(exchangeability_distance(&best.dist) < 1e-12);
    }
}
