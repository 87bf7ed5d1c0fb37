//! Constructors for the worked example systems and for random test systems.
//!
//! The examples double as closed-form regression oracles and as warm
//! starts (lower-bound witnesses) for the optimizer.

use itertools::Itertools;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::coeffs::binomial;
use crate::error::{invalid, Error, Result};
use crate::info::entropy_of;
use crate::system::{check_permutation, JointDistribution, SystemShape};

/// Bisection stops once the bracket is narrower than this.
const BISECTION_TOL: f64 = 1e-12;

/// Largest `n` accepted by [`symmetrize`].
pub const MAX_SYMMETRIZE_N: usize = 8;

/// The catalogue of example systems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExampleKind {
    /// Independent uniform coordinates (total disorder).
    IidUniform,
    /// All coordinates a.s. zero (total order).
    PointMass,
    /// `X_1` uniform and every other coordinate equal to it.
    Synchronized,
    /// Uniform coordinates, those in `k` (0-based) all equal to the first of them.
    SynchronizedSubsystem { k: Vec<usize> },
    /// `X_i = Y_i + b·Y_{i+1}`, `X_n = Y_n` over the alphabet `b²`, with `Y` i.i.d. uniform on `b` symbols.
    ChainPair,
    /// Two coordinates with `H(X) = x · log d²` and positive mutual information.
    EntropyPair { x: f64 },
    /// Independent copies of `EntropyPair(x)`, plus one free coordinate of entropy `x · log d` when `n` is odd.
    ReplicatedPairChain { x: f64 },
    /// `(X_1, X_2)` uniform and `X_3 = X_1 + X_2 mod d`.
    N3Xor,
    /// `X_1` uniform and `X_2 = σ(X_1)`.
    N2Permutation { sigma: Vec<usize> },
}

pub fn generate(kind: &ExampleKind, shape: SystemShape) -> Result<JointDistribution> {
    let (d, n) = (shape.d(), shape.n());
    match kind {
        ExampleKind::IidUniform => Ok(JointDistribution::uniform(shape)),
        ExampleKind::PointMass => JointDistribution::point_mass(shape, &vec![0; n]),
        ExampleKind::Synchronized => {
            let weights = (0..d).map(|x| (vec![x; n], 1.0)).collect::<Vec<_>>();
            from_atoms(shape, &weights)
        }
        ExampleKind::SynchronizedSubsystem { k } => synchronized_subsystem(shape, k),
        ExampleKind::ChainPair => chain_pair(shape),
        ExampleKind::EntropyPair { x } => {
            if n != 2 {
                return invalid("entropy-pair systems have exactly two coordinates");
            }
            entropy_pair(d, *x)
        }
        ExampleKind::ReplicatedPairChain { x } => replicated_pair_chain(shape, *x),
        ExampleKind::N3Xor => {
            if n != 3 {
                return invalid("the xor example has exactly three coordinates");
            }
            let atoms = (0..d)
                .cartesian_product(0..d)
                .map(|(a, b)| (vec![a, b, (a + b) % d], 1.0))
                .collect::<Vec<_>>();
            from_atoms(shape, &atoms)
        }
        ExampleKind::N2Permutation { sigma } => {
            if n != 2 {
                return invalid("the permutation example has exactly two coordinates");
            }
            check_permutation(sigma, d)?;
            let atoms = (0..d).map(|a| (vec![a, sigma[a]], 1.0)).collect::<Vec<_>>();
            from_atoms(shape, &atoms)
        }
    }
}

fn from_atoms(shape: SystemShape, atoms: &[(Vec<usize>, f64)]) -> Result<JointDistribution> {
    let mut w = vec![0.0; shape.num_states()];
    for (config, weight) in atoms {
        w[shape.index_of(config)?] += weight;
    }
    JointDistribution::from_weights(shape, w)
}

fn synchronized_subsystem(shape: SystemShape, k: &[usize]) -> Result<JointDistribution> {
    let n = shape.n();
    if k.is_empty() {
        return invalid("synchronized block K must be nonempty");
    }
    if let Some(bad) = k.iter().find(|&&i| i >= n) {
        return invalid(format!("coordinate {bad} outside 0..{n}"));
    }
    let lead = *k.iter().min().unwrap_or(&0);
    let in_k = |i: usize| k.contains(&i);
    // A configuration is charged iff every coordinate of K copies the lead.
    let mut w = vec![0.0; shape.num_states()];
    let mut digits = vec![0; n];
    for (index, slot) in w.iter_mut().enumerate() {
        shape.write_digits(index, &mut digits);
        if (0..n).filter(|&i| in_k(i)).all(|i| digits[i] == digits[lead]) {
            *slot = 1.0;
        }
    }
    JointDistribution::from_weights(shape, w)
}

fn chain_pair(shape: SystemShape) -> Result<JointDistribution> {
    let (alphabet, n) = (shape.d(), shape.n());
    let base = (alphabet as f64).sqrt().round() as usize;
    if base < 2 || base * base != alphabet {
        return invalid(format!("chain-pair needs an alphabet of size b² with b ≥ 2, got {alphabet}"));
    }
    let hidden = SystemShape::new(base, n)?;
    let mut w = vec![0.0; shape.num_states()];
    let mut y = vec![0; n];
    let mut x = vec![0; n];
    for index in 0..hidden.num_states() {
        hidden.write_digits(index, &mut y);
        for i in 0..n - 1 {
            x[i] = y[i] + base * y[i + 1];
        }
        x[n - 1] = y[n - 1];
        w[shape.index_of(&x)?] += 1.0;
    }
    JointDistribution::from_weights(shape, w)
}

/// Bisection for the root of an increasing function on `[0,1]`.
fn bisect_increasing<F: Fn(f64) -> f64>(f: F, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Law `(1−t)·δ_0 + t·uniform` on `d` symbols.
fn dirac_uniform_blend(d: usize, t: f64) -> Vec<f64> {
    let mut p = vec![t / d as f64; d];
    p[0] += 1.0 - t;
    p
}

/// A single variable on `d` symbols with entropy `target` nats, `0 ≤ target ≤ log d`.
pub fn variable_with_entropy(d: usize, target: f64) -> Result<Vec<f64>> {
    let max = (d as f64).ln();
    if !(0.0..=max + 1e-12).contains(&target) {
        return invalid(format!("entropy {target} outside [0, log {d}]"));
    }
    // H is increasing along the blend since the uniform law maximizes entropy.
    let t = bisect_increasing(|t| entropy_of(&dirac_uniform_blend(d, t)), target);
    Ok(dirac_uniform_blend(d, t))
}

fn entropy_pair(d: usize, x: f64) -> Result<JointDistribution> {
    if !(x > 0.0 && x < 1.0) {
        return invalid(format!("entropy fraction x must lie in (0,1), got {x}"));
    }
    let shape = SystemShape::new(d, 2)?;
    let log_d = (d as f64).ln();
    let target = 2.0 * x * log_d;
    if x <= 0.5 {
        let first = variable_with_entropy(d, target)?;
        let atoms = (0..d).map(|a| (vec![a, a], first[a])).collect::<Vec<_>>();
        return from_atoms(shape, &atoms);
    }
    // X_2 copies X_1 unless an independent coin (probability p) resamples it.
    let law = |p: f64| {
        let df = d as f64;
        let mut v = vec![p / (df * df); d * d];
        for a in 0..d {
            v[a * d + a] += (1.0 - p) / df;
        }
        v
    };
    let p = bisect_increasing(|p| entropy_of(&law(p)), target);
    JointDistribution::from_weights(shape, law(p))
}

fn replicated_pair_chain(shape: SystemShape, x: f64) -> Result<JointDistribution> {
    let (d, n) = (shape.d(), shape.n());
    if n < 2 {
        return invalid("replicated-pair-chain needs at least two coordinates");
    }
    let pair = entropy_pair(d, x)?;
    let mut out = pair.clone();
    for _ in 1..n / 2 {
        out = out.product(&pair)?;
    }
    if n % 2 == 1 {
        let single = variable_with_entropy(d, x * (d as f64).ln())?;
        out = out.product(&JointDistribution::from_weights(SystemShape::new(d, 1)?, single)?)?;
    }
    Ok(out)
}

/// Count-of-ones weights `q[k]` of a binary exchangeable law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeWeights {
    q: Vec<f64>,
}

impl TypeWeights {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.len() < 2 {
            return invalid("type weights need entries for k = 0..=n with n ≥ 1");
        }
        if q.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("type weights must be non-negative");
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("type weights sum to {total}"));
        }
        Ok(TypeWeights { q })
    }

    /// `q[k] = binom(n,k) θ^k (1−θ)^(n−k)`: i.i.d. coins of bias `θ`.
    pub fn binomial(n: usize, theta: f64) -> Result<Self> {
        let q = (0..=n)
            .map(|k| binomial(n, k) * theta.powi(k as i32) * (1.0 - theta).powi((n - k) as i32))
            .collect::<Vec<f64>>();
        let total: f64 = q.iter().sum();
        TypeWeights::new(q.into_iter().map(|v| v / total).collect())
    }

    pub fn n(&self) -> usize {
        self.q.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.q
    }
}

/// `p_ω = q[k(ω)] / binom(n, k(ω))` with `k(ω)` the number of ones.
pub fn exchangeable_from_type_weights(weights: &TypeWeights, shape: SystemShape) -> Result<JointDistribution> {
    if shape.d() != 2 {
        return Err(Error::Unsupported("type weights are only implemented for d = 2".into()));
    }
    if weights.n() != shape.n() {
        return invalid(format!("type weights are for n={}, shape has n={}", weights.n(), shape.n()));
    }
    Ok(JointDistribution::from_parts(shape, type_weights_to_probs(&weights.q, shape.n())))
}

pub(crate) fn type_weights_to_probs(q: &[f64], n: usize) -> Vec<f64> {
    let per_state: Vec<f64> = (0..=n).map(|k| q[k] / binomial(n, k)).collect();
    (0..1usize << n).map(|i| per_state[i.count_ones() as usize]).collect()
}

/// Average of `permute(μ, σ)` over all `n!` permutations.
pub fn symmetrize(dist: &JointDistribution) -> Result<JointDistribution> {
    let shape = dist.shape();
    let n = shape.n();
    if n > MAX_SYMMETRIZE_N {
        return Err(Error::Unsupported(format!(
            "symmetrization enumerates n! permutations; n={n} exceeds {MAX_SYMMETRIZE_N}"
        )));
    }
    let strides: Vec<usize> = (0..n).map(|c| shape.stride(c)).collect();
    let mut acc = vec![0.0; shape.num_states()];
    let mut digits = vec![0; n];
    let mut count = 0usize;
    for perm in (0..n).permutations(n) {
        count += 1;
        for (index, &p) in dist.probs().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            shape.write_digits(index, &mut digits);
            let target: usize = (0..n).map(|i| digits[i] * strides[perm[i]]).sum();
            acc[target] += p;
        }
    }
    let scale = 1.0 / count as f64;
    acc.iter_mut().for_each(|v| *v *= scale);
    JointDistribution::new(shape, acc)
}

/// A random law for property tests and verification suites.
///
/// Weights are Gamma(α) with α drawn from {0.2, 1, 5}, so samples range from
/// spiky to nearly uniform; with probability `zero_fraction` each entry is
/// zeroed (one entry is always kept).
pub fn random_system<R: Rng + ?Sized>(shape: SystemShape, rng: &mut R, zero_fraction: f64) -> JointDistribution {
    let alpha = [0.2, 1.0, 5.0][rng.random_range(0..3)];
    let gamma = Gamma::new(alpha, 1.0).expect("positive shape");
    let mut w: Vec<f64> = (0..shape.num_states())
        .map(|_| if rng.random::<f64>() < zero_fraction { 0.0 } else { gamma.sample(rng) })
        .collect();
    if w.iter().all(|&v| v <= 0.0) {
        let i = rng.random_range(0..w.len());
        w[i] = 1.0;
    }
    JointDistribution::from_weights(shape, w).expect("non-negative weights")
}

/// A Dirichlet(1) point of the simplex: strictly positive almost surely.
pub fn dirichlet_uniform<R: Rng + ?Sized>(shape: SystemShape, rng: &mut R) -> JointDistribution {
    let w: Vec<f64> = (0..shape.num_states()).map(|_| Exp1.sample(rng)).collect();
    JointDistribution::from_weights(shape, w).expect("exponential draws are positive")
}

/// Lower-bound witnesses used as optimizer warm starts.
///
/// Without an entropy target, in this order: tilings by xor triples
/// (`n ≥ 3`), the synchronized system, and products of synchronized pairs.
/// At `n = 3` the xor triple and the synchronized system tie, so the
/// optimizer's lowest-index tie-break reports the xor law. With a target fraction `x ∈ (0,1)`, the replicated pair
/// chain at `x`, whose entropy is exactly `x·n·log d`.
pub fn witnesses(shape: SystemShape, entropy_x: Option<f64>) -> Vec<JointDistribution> {
    let (d, n) = (shape.d(), shape.n());
    let mut out = Vec::new();
    if let Some(x) = entropy_x {
        if x > 0.0 && x < 1.0 && n >= 2 {
            out.extend(replicated_pair_chain(shape, x).ok());
        }
        return out;
    }
    if n >= 3 {
        out.extend(xor_tiling(d, n).ok());
    }
    if n >= 2 {
        out.extend(generate(&ExampleKind::Synchronized, shape).ok());
        out.extend(replicated_pair_chain(shape, 0.5).ok());
    }
    out
}

/// Product of xor triples, padded with one synchronized pair or a
/// synchronized 4-block when `3 ∤ n`.
fn xor_tiling(d: usize, n: usize) -> Result<JointDistribution> {
    let triple = generate(&ExampleKind::N3Xor, SystemShape::new(d, 3)?)?;
    let (mut blocks, rest) = match n % 3 {
        0 => (n / 3, None),
        1 if n >= 4 => (n / 3 - 1, Some(4)),
        2 => (n / 3, Some(2)),
        _ => return invalid("xor tiling needs n ≥ 3"),
    };
    let mut out = match rest {
        Some(m) => generate(&ExampleKind::ReplicatedPairChain { x: 0.5 }, SystemShape::new(d, m)?)?,
        None => {
            blocks -= 1;
            triple.clone()
        }
    };
    for _ in 0..blocks {
        out = out.product(&triple)?;
    }
    Ok(out)
}
