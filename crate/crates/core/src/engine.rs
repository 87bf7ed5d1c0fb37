//! Evaluation of `I^c(X) = Σ_S c^n_{|S|} MI(X_S, X_{S^c})`.
//!
//! Four routes are provided:
//!
//! * [`intricacy_exact`] sums bipartition mutual informations taken from a
//!   single descent through the subset lattice;
//! * [`intricacy_via_entropies`] evaluates `2 Σ_S c_S H(X_S) − H(X)` with one
//!   independent marginalization pass per subset, and serves as a
//!   cross-check of the first;
//! * [`intricacy_exchangeable`] only needs the `n+1` prefix entropies and is
//!   valid for exchangeable laws;
//! * [`intricacy_mc`] draws random subsets from the paintbox measure `λ`
//!   and averages their mutual information.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeffs::{binomial, CoefficientTable, LambdaSpec};
use crate::error::{invalid, Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::info::{entropy_of, Nats};
use crate::lattice;
use crate::system::{exchangeability_distance, full_bits, marginal_probs, JointDistribution, SubsetMask, SystemShape};

/// L1 tolerance of the exchangeability pre-check.
pub const EXCHANGEABLE_TOL: f64 = 1e-9;

/// Samples per Monte Carlo batch; each batch owns one ChaCha stream.
pub const MC_BATCH: usize = 1024;

/// All `2^n` bipartition mutual informations, indexed by mask bits.
#[derive(Clone, Debug, PartialEq)]
pub struct MIProfile {
    n: usize,
    values: Vec<f64>,
}

impl MIProfile {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: &SubsetMask) -> Nats {
        Nats::new(self.values[s.bits() as usize])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn from_entropies(h: &[f64], n: usize) -> Self {
        let full = full_bits(n) as usize;
        let total = h[full];
        let values = (0..h.len())
            .map(|s| {
                if s == 0 || s == full {
                    0.0
                } else {
                    Nats::new(h[s] + h[full ^ s] - total).value()
                }
            })
            .collect();
        MIProfile { n, values }
    }
}

/// Monte Carlo estimate of an intricacy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: Nats,
    /// Sample standard deviation over `√samples`.
    pub stderr: Nats,
    pub samples: u64,
    pub seed: u64,
}

fn check_sizes(dist: &JointDistribution, table: &CoefficientTable) -> Result<()> {
    if table.n() != dist.shape().n() {
        return invalid(format!(
            "coefficient table is for n={}, system has n={}",
            table.n(),
            dist.shape().n()
        ));
    }
    table.ensure_valid()
}

pub fn mi_profile(dist: &JointDistribution) -> MIProfile {
    mi_profile_with(dist, Execution::default())
}

pub fn mi_profile_with(dist: &JointDistribution, exec: Execution) -> MIProfile {
    let shape = dist.shape();
    MIProfile::from_entropies(&lattice::subset_entropies(dist.probs(), shape, exec), shape.n())
}

pub fn intricacy_exact(dist: &JointDistribution, table: &CoefficientTable) -> Result<Nats> {
    intricacy_exact_with(dist, table, Execution::default())
}

pub fn intricacy_exact_with(dist: &JointDistribution, table: &CoefficientTable, exec: Execution) -> Result<Nats> {
    check_sizes(dist, table)?;
    Ok(Nats::new(intricacy_of_probs(dist.probs(), dist.shape(), table, exec)))
}

/// Unchecked evaluation on a raw probability vector.
pub(crate) fn intricacy_of_probs(probs: &[f64], shape: SystemShape, table: &CoefficientTable, exec: Execution) -> f64 {
    let h = lattice::subset_entropies(probs, shape, exec);
    intricacy_from_entropies(&h, shape.n(), table)
}

/// Sums over masks with `|S| ≤ n/2` only, doubling all but the middle layer.
fn intricacy_from_entropies(h: &[f64], n: usize, table: &CoefficientTable) -> f64 {
    let full = full_bits(n) as usize;
    let total = h[full];
    let mut acc = 0.0;
    for s in 1..full {
        let k = s.count_ones() as usize;
        if 2 * k > n {
            continue;
        }
        let weight = if 2 * k == n { 1.0 } else { 2.0 };
        let mi = (h[s] + h[full ^ s] - total).max(0.0);
        acc += weight * table.get(k) * mi;
    }
    acc
}

pub fn intricacy_via_entropies(dist: &JointDistribution, table: &CoefficientTable) -> Result<Nats> {
    intricacy_via_entropies_with(dist, table, Execution::default())
}

pub fn intricacy_via_entropies_with(
    dist: &JointDistribution,
    table: &CoefficientTable,
    exec: Execution,
) -> Result<Nats> {
    check_sizes(dist, table)?;
    let shape = dist.shape();
    let n = shape.n();
    let full = full_bits(n);
    let h = map_indexed(1usize << n, exec, |s| match s as u32 {
        0 => 0.0,
        bits if bits == full => entropy_of(dist.probs()),
        bits => entropy_of(&marginal_probs(dist.probs(), shape, bits)),
    });
    let weighted: f64 = h.iter().enumerate().map(|(s, hs)| table.get(s.count_ones() as usize) * hs).sum();
    Ok(Nats::new(2.0 * weighted - h[full as usize]))
}

/// Prefix-entropy evaluation `2 Σ_k binom(n,k) c_k H(X_{1..k}) − H(X)`.
pub fn intricacy_exchangeable(dist: &JointDistribution, table: &CoefficientTable) -> Result<Nats> {
    check_sizes(dist, table)?;
    let gap = exchangeability_distance(dist);
    if gap > EXCHANGEABLE_TOL {
        return Err(Error::Precondition(format!(
            "law is not exchangeable: transposition L1 distance {gap:e} exceeds {EXCHANGEABLE_TOL:e}"
        )));
    }
    let shape = dist.shape();
    let n = shape.n();
    let h = lattice::prefix_entropies(dist.probs(), shape);
    let weighted: f64 = (0..=n).map(|k| binomial(n, k) * table.get(k) * h[k]).sum();
    Ok(Nats::new(2.0 * weighted - h[n]))
}

pub fn intricacy_mc(dist: &JointDistribution, lambda: &LambdaSpec, samples: u64, seed: u64) -> Result<MCEstimate> {
    intricacy_mc_with(dist, lambda, samples, seed, Execution::default())
}

/// Paintbox sampler: `W ~ λ`, then `S = {i : Y_i ≥ W}` with `Y_i` uniform.
///
/// Batch `b` always draws from ChaCha stream `b`, and batch statistics are
/// merged in batch order, so the estimate depends only on `seed`.
pub fn intricacy_mc_with(
    dist: &JointDistribution,
    lambda: &LambdaSpec,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<MCEstimate> {
    if samples < 2 {
        return invalid("Monte Carlo estimation needs at least two samples");
    }
    let shape = dist.shape();
    let n = shape.n();
    let oracle = MiOracle::new(dist, samples, exec);
    let batches = samples.div_ceil(MC_BATCH as u64) as usize;
    let stats = map_indexed(batches, exec, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let start = b as u64 * MC_BATCH as u64;
        let count = (samples - start).min(MC_BATCH as u64);
        let mut acc = Running::default();
        for _ in 0..count {
            let w = lambda.sample(&mut rng);
            let mut bits = 0u32;
            for i in 0..n {
                if rng.random::<f64>() >= w {
                    bits |= 1 << i;
                }
            }
            acc.push(oracle.mi(bits));
        }
        acc
    });
    let total = stats.into_iter().fold(Running::default(), Running::merge);
    let variance = total.m2 / (total.count - 1.0);
    Ok(MCEstimate {
        mean: Nats::new(total.mean),
        stderr: Nats::new((variance / total.count).sqrt()),
        samples,
        seed,
    })
}

/// Source of `MI(S)` during sampling: a precomputed profile when the
/// lattice is cheaper than evaluating each draw, otherwise direct passes.
enum MiOracle<'a> {
    Profile(MIProfile),
    Direct(&'a JointDistribution, f64),
}

impl<'a> MiOracle<'a> {
    fn new(dist: &'a JointDistribution, samples: u64, exec: Execution) -> Self {
        let shape = dist.shape();
        let (d, n) = (shape.d() as f64, shape.n() as i32);
        let lattice_cost = d * (d + 1.0).powi(n);
        let direct_cost = samples as f64 * 3.0 * d.powi(n);
        if lattice_cost <= direct_cost {
            MiOracle::Profile(mi_profile_with(dist, exec))
        } else {
            MiOracle::Direct(dist, entropy_of(dist.probs()))
        }
    }

    fn mi(&self, bits: u32) -> f64 {
        match self {
            MiOracle::Profile(p) => p.values[bits as usize],
            MiOracle::Direct(dist, total) => {
                let shape = dist.shape();
                let full = full_bits(shape.n());
                if bits == 0 || bits == full {
                    return 0.0;
                }
                let h_s = entropy_of(&marginal_probs(dist.probs(), shape, bits));
                let h_c = entropy_of(&marginal_probs(dist.probs(), shape, full ^ bits));
                (h_s + h_c - total).max(0.0)
            }
        }
    }
}

/// Welford accumulator with Chan's pairwise merge.
#[derive(Clone, Copy, Default)]
struct Running {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Running {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Running) -> Running {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Running {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}
