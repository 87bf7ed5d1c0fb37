//! Randomized and closed-form check suites.
//!
//! Each check keeps the largest residual seen over its cases; a residual is
//! the amount by which an inequality is violated (0 when it holds) or the
//! absolute error against a closed form. A check passes when its residual
//! does not exceed its tolerance.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coeffs::{build_table, check_projectivity, check_table, kappa, Atom, CoefficientTable, LambdaSpec};
use crate::engine::{intricacy_exact, intricacy_via_entropies};
use crate::error::{Error, Result};
use crate::generators::{generate, random_system, ExampleKind};
use crate::info::subset_entropy;
use crate::optimizer::{maximize, OptimizerConfig};
use crate::system::{mix, JointDistribution, SubsetMask, SystemShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Appendix,
    Coefficients,
    Additivity,
    Bounds,
    Oracles,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Appendix, Suite::Coefficients, Suite::Additivity, Suite::Bounds, Suite::Oracles];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Appendix => "appendix",
            Suite::Coefficients => "coefficients",
            Suite::Additivity => "additivity",
            Suite::Bounds => "bounds",
            Suite::Oracles => "oracles",
            Suite::All => "all",
        }
    }

    fn default_trials(self) -> usize {
        match self {
            Suite::Appendix => 1000,
            Suite::Additivity | Suite::Bounds => 100,
            _ => 0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random cases per randomized check; `None` uses the suite default.
    pub trials: Option<usize>,
    /// Overrides every check tolerance when set.
    pub tolerance: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, trials: None, tolerance: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: Option<usize>,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn cases(&self) -> usize {
        self.checks.iter().map(|c| c.cases).sum()
    }
}

struct Tally {
    name: String,
    cases: usize,
    max_residual: f64,
    tolerance: f64,
}

impl Tally {
    fn new(suite: Suite, name: &str, tolerance: f64, opts: &VerifyOptions) -> Self {
        Tally {
            name: format!("{suite}/{name}"),
            cases: 0,
            max_residual: 0.0,
            tolerance: opts.tolerance.unwrap_or(tolerance),
        }
    }

    /// Records a case; NaN residuals count as failures.
    fn record(&mut self, residual: f64) {
        self.cases += 1;
        let r = if residual.is_nan() { f64::INFINITY } else { residual.max(0.0) };
        self.max_residual = self.max_residual.max(r);
    }

    fn close(&mut self, target: f64, got: f64) {
        self.record((got - target).abs());
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            pass: self.max_residual <= self.tolerance,
            name: self.name,
            cases: self.cases,
            max_residual: self.max_residual,
            tolerance: self.tolerance,
        }
    }
}

/// Runs one suite (or all of them) deterministically from `opts.seed`.
pub fn verify_suites(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let selected: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in selected {
        let trials = opts.trials.unwrap_or(s.default_trials());
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(s as u64);
        let tallies = match s {
            Suite::Appendix => appendix(trials, &mut rng, opts),
            Suite::Coefficients => coefficients(&mut rng, opts)?,
            Suite::Additivity => additivity(trials, &mut rng, opts)?,
            Suite::Bounds => bounds(trials, &mut rng, opts)?,
            Suite::Oracles => oracles(opts)?,
            Suite::All => unreachable!(),
        };
        checks.extend(tallies.into_iter().map(Tally::finish));
    }
    Ok(VerifyReport { suite, seed: opts.seed, trials: opts.trials, checks })
}

fn h(dist: &JointDistribution, bits: u32) -> f64 {
    subset_entropy(dist, &SubsetMask::from_raw(bits, dist.shape().n())).value()
}

fn mi(dist: &JointDistribution, a: u32, b: u32) -> f64 {
    h(dist, a) + h(dist, b) - h(dist, a | b)
}

/// Four disjoint nonempty coordinate blocks, as bit masks.
fn four_blocks<R: Rng>(n: usize, rng: &mut R) -> [u32; 4] {
    let mut coords: Vec<usize> = (0..n).collect();
    coords.shuffle(rng);
    let used = rng.random_range(4..=n);
    let mut cuts = rand::seq::index::sample(rng, used - 1, 3).into_vec();
    cuts.iter_mut().for_each(|c| *c += 1);
    cuts.sort_unstable();
    let bounds = [0, cuts[0], cuts[1], cuts[2], used];
    let mut out = [0u32; 4];
    for (b, slot) in out.iter_mut().enumerate() {
        *slot = coords[bounds[b]..bounds[b + 1]].iter().fold(0, |m, &i| m | 1 << i);
    }
    out
}

fn random_shape<R: Rng>(rng: &mut R, d_max: usize, n_min: usize, n_max: usize) -> SystemShape {
    SystemShape::new(rng.random_range(2..=d_max), rng.random_range(n_min..=n_max)).expect("small shape")
}

fn appendix<R: Rng>(trials: usize, rng: &mut R, opts: &VerifyOptions) -> Vec<Tally> {
    const TOL: f64 = 1e-10;
    let s = Suite::Appendix;
    let mut orly = Tally::new(s, "entropy-range", TOL, opts);
    let mut coco = Tally::new(s, "conditional-entropy-range", TOL, opts);
    let mut geq = Tally::new(s, "joint-dominates-parts", TOL, opts);
    let mut leq = Tally::new(s, "subadditivity", TOL, opts);
    let mut birge = Tally::new(s, "conditioning-reduces-entropy", TOL, opts);
    let mut mono = Tally::new(s, "mi-monotone", TOL, opts);
    let mut add = Tally::new(s, "mi-almost-additive", TOL, opts);
    for _ in 0..trials {
        let shape = random_shape(rng, 3, 4, 5);
        let zeros = if rng.random_bool(0.5) { 0.3 } else { 0.0 };
        let dist = random_system(shape, rng, zeros);
        let log_d = (shape.d() as f64).ln();
        let [a, b, c, e] = four_blocks(shape.n(), rng);

        for m in [a, a | b, (1 << shape.n()) - 1] {
            let hm = h(&dist, m);
            orly.record((-hm).max(hm - m.count_ones() as f64 * log_d));
        }
        let (ha, hb, hab) = (h(&dist, a), h(&dist, b), h(&dist, a | b));
        let cond = hab - hb;
        coco.record((-cond).max(cond - ha).max(ha - hab));
        geq.record(ha.max(hb) - hab);
        leq.record(hab - ha - hb);
        let cond_more = h(&dist, a | b | c) - h(&dist, b | c);
        birge.record(cond_more - cond);
        mono.record(mi(&dist, a, c) - mi(&dist, a | b, c | e));
        // (X, Y, X', Y') = (a, b, c, e), X̂ = (X, X'), Ŷ = (Y, Y').
        let lhs = mi(&dist, a | b, c | e) - mi(&dist, a, c) - mi(&dist, b, e);
        add.record(lhs.abs() - mi(&dist, a | c, b | e));
    }
    vec![orly, coco, geq, leq, birge, mono, add]
}

/// `1/((n+1)·C(n,k))` as a running product, independent of the table builder.
fn ets_oracle(n: usize, k: usize) -> f64 {
    (1..=k).fold(1.0 / (n + 1) as f64, |acc, j| acc * j as f64 / (n - k + j) as f64)
}

fn families<R: Rng>(rng: &mut R) -> Result<Vec<LambdaSpec>> {
    let raw: Vec<(f64, f64)> = (0..3).map(|_| (rng.random::<f64>(), rng.random::<f64>() + 0.1)).collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    let atoms = raw.into_iter().map(|(x, w)| Atom { x, w: w / total }).collect();
    Ok(vec![
        LambdaSpec::Lebesgue,
        LambdaSpec::UniformPoint,
        LambdaSpec::two_point(0.3)?,
        LambdaSpec::two_point(0.0)?,
        LambdaSpec::atomic(atoms)?,
    ])
}

fn coefficients<R: Rng>(rng: &mut R, opts: &VerifyOptions) -> Result<Vec<Tally>> {
    const TOL: f64 = 1e-12;
    let s = Suite::Coefficients;
    let mut ets = Tally::new(s, "ets-closed-form", TOL, opts);
    let mut proj = Tally::new(s, "projectivity", TOL, opts);
    let mut valid = Tally::new(s, "symmetric-normalized", TOL, opts);
    let mut kap = Tally::new(s, "kappa", TOL, opts);
    for n in 1..=20 {
        let t = build_table(&LambdaSpec::Lebesgue, n)?;
        for k in 0..=n {
            ets.close(ets_oracle(n, k), t.get(k));
        }
    }
    for lambda in families(rng)? {
        let mut prev = build_table(&lambda, 1)?;
        for n in 1..=20 {
            let next = build_table(&lambda, n + 1)?;
            if n <= 19 {
                proj.record(check_projectivity(&prev, &next)?);
            }
            valid.record(check_table(&prev).max_violation());
            prev = next;
        }
        if !lambda.is_null() {
            kap.close(2.0 * build_table(&lambda, 2)?.get(1), kappa(&lambda)?.value());
        }
    }
    Ok(vec![ets, proj, valid, kap])
}

fn table_for(lambda: &LambdaSpec, n: usize) -> Result<CoefficientTable> {
    build_table(lambda, n)
}

fn additivity<R: Rng>(trials: usize, rng: &mut R, opts: &VerifyOptions) -> Result<Vec<Tally>> {
    const TOL: f64 = 1e-9;
    let s = Suite::Additivity;
    let mut weak = Tally::new(s, "independent-pairs", TOL, opts);
    let mut approx = Tally::new(s, "correlated-residual", TOL, opts);
    let mut dominate = Tally::new(s, "correlated-monotone", TOL, opts);
    let fams = [LambdaSpec::Lebesgue, LambdaSpec::UniformPoint, LambdaSpec::two_point(0.25)?];
    for _ in 0..trials {
        let lambda = &fams[rng.random_range(0..fams.len())];
        let d = rng.random_range(2..=3);
        let n1 = rng.random_range(1..=3);
        let n2 = rng.random_range(1..=3);
        let (s1, s2) = (SystemShape::new(d, n1)?, SystemShape::new(d, n2)?);
        let (t1, t2, t12) = (table_for(lambda, n1)?, table_for(lambda, n2)?, table_for(lambda, n1 + n2)?);

        let x = random_system(s1, rng, 0.0);
        let y = random_system(s2, rng, 0.0);
        let joint = x.product(&y)?;
        let (ix, iy) = (intricacy_exact(&x, &t1)?.value(), intricacy_exact(&y, &t2)?.value());
        weak.close(ix + iy, intricacy_exact(&joint, &t12)?.value());

        let z = random_system(SystemShape::new(d, n1 + n2)?, rng, 0.2);
        let first = (1u32 << n1) - 1;
        let second = ((1u32 << n2) - 1) << n1;
        let zx = z.marginal(&SubsetMask::new(first, n1 + n2)?)?;
        let zy = z.marginal(&SubsetMask::new(second, n1 + n2)?)?;
        let (ix, iy) = (intricacy_exact(&zx, &t1)?.value(), intricacy_exact(&zy, &t2)?.value());
        let ixy = intricacy_exact(&z, &t12)?.value();
        approx.record((ix + iy - ixy).abs() - mi(&z, first, second));
        dominate.record(ix.max(iy) - ixy);
    }
    Ok(vec![weak, approx, dominate])
}

fn bounds<R: Rng>(trials: usize, rng: &mut R, opts: &VerifyOptions) -> Result<Vec<Tally>> {
    const TOL: f64 = 1e-9;
    let s = Suite::Bounds;
    let mut range = Tally::new(s, "zero-to-half-n-log-d", TOL, opts);
    let mut indep = Tally::new(s, "independent-is-zero", TOL, opts);
    let mut perm = Tally::new(s, "permutation-invariance", TOL, opts);
    let mut mix_h = Tally::new(s, "mixture-entropy", TOL, opts);
    let mut mix_i = Tally::new(s, "mixture-intricacy", TOL, opts);
    let mut witness = Tally::new(s, "witness-lower-bound", TOL, opts);
    let mut sandwich = Tally::new(s, "maximizer-sandwich", 1e-6, opts);

    for _ in 0..trials {
        let shape = random_shape(rng, 3, 2, 5);
        let (d, n) = (shape.d(), shape.n());
        let table = build_table(&LambdaSpec::Lebesgue, n)?;
        let log_d = (d as f64).ln();
        let dist = random_system(shape, rng, 0.2);
        let v = intricacy_exact(&dist, &table)?.value();
        range.record((-v).max(v - 0.5 * n as f64 * log_d));

        let product = (1..n).try_fold(dist.marginal(&SubsetMask::from_coords(&[0], n)?)?, |acc, i| {
            acc.product(&dist.marginal(&SubsetMask::from_coords(&[i], n)?)?)
        })?;
        indep.record(intricacy_exact(&product, &table)?.value().abs());

        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(rng);
        perm.close(v, intricacy_exact(&dist.permute(&sigma)?, &table)?.value());

        let r = rng.random_range(2..=3);
        let parts: Vec<JointDistribution> = (0..r).map(|_| random_system(shape, rng, 0.3)).collect();
        let w: Vec<f64> = (0..r).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let m = mix(&parts, &w)?;
        let log_r = (r as f64).ln();
        let bits = rng.random_range(1..1u32 << n);
        let gap_h = h(&m, bits) - parts.iter().zip(&w).map(|(p, wi)| wi * h(p, bits)).sum::<f64>();
        mix_h.record((-gap_h).max(gap_h - log_r));
        let avg_i = parts
            .iter()
            .zip(&w)
            .map(|(p, wi)| Ok(wi * intricacy_exact(p, &table)?.value()))
            .sum::<Result<f64>>()?;
        let gap_i = intricacy_exact(&m, &table)?.value() - avg_i;
        mix_i.record((-log_r - gap_i).max(gap_i - 2.0 * log_r));
    }

    let k = kappa(&LambdaSpec::Lebesgue)?.value();
    for d in [2, 3] {
        for n in 2..=8 {
            let shape = SystemShape::new(d, n)?;
            let lower = 0.5 * k * (n - 1) as f64 * (d as f64).ln();
            let w = generate(&ExampleKind::ReplicatedPairChain { x: 0.5 }, shape)?;
            witness.record(lower - intricacy_exact(&w, &build_table(&LambdaSpec::Lebesgue, n)?)?.value());
        }
    }

    let config = OptimizerConfig { seed: opts.seed, ..Default::default() };
    for n in 2..=4 {
        let shape = SystemShape::new(2, n)?;
        let best = maximize(shape, &build_table(&LambdaSpec::Lebesgue, n)?, &config)?.value.value();
        let lower = 0.5 * k * (n - 1) as f64 * std::f64::consts::LN_2;
        let upper = 0.5 * n as f64 * std::f64::consts::LN_2;
        sandwich.record((lower - best).max(best - upper));
    }
    Ok(vec![range, indep, perm, mix_h, mix_i, witness, sandwich])
}

/// `I^c = Σ_S c_{|S|} MI(S)` from a closed form for the subset entropies.
fn from_entropy_formula(n: usize, table: &CoefficientTable, hs: impl Fn(u32) -> f64) -> f64 {
    let full = (1u32 << n) - 1;
    (0..=full).map(|s| table.get(s.count_ones() as usize) * (hs(s) + hs(full & !s) - hs(full))).sum()
}

fn oracles(opts: &VerifyOptions) -> Result<Vec<Tally>> {
    const TOL: f64 = 1e-9;
    let s = Suite::Oracles;
    let mut trivial = Tally::new(s, "disorder-and-order", TOL, opts);
    let mut sync = Tally::new(s, "synchronized", TOL, opts);
    let mut chain_u = Tally::new(s, "chain-uniform-table", TOL, opts);
    let mut chain_e = Tally::new(s, "chain-ets", TOL, opts);
    let mut block = Tally::new(s, "synchronized-subsystem", TOL, opts);
    let mut pair = Tally::new(s, "entropy-pair", TOL, opts);
    let mut small = Tally::new(s, "small-n-maximizers", TOL, opts);
    let mut paths = Tally::new(s, "exact-vs-entropies", 1e-10, opts);
    let ln2 = std::f64::consts::LN_2;

    let mut both = |dist: &JointDistribution, table: &CoefficientTable| -> Result<f64> {
        let v = intricacy_exact(dist, table)?.value();
        paths.close(v, intricacy_via_entropies(dist, table)?.value());
        Ok(v)
    };

    for n in 1..=12 {
        let shape = SystemShape::new(2, n)?;
        let t = build_table(&LambdaSpec::Lebesgue, n)?;
        trivial.record(both(&generate(&ExampleKind::IidUniform, shape)?, &t)?.abs());
        trivial.record(both(&generate(&ExampleKind::PointMass, shape)?, &t)?.abs());
    }
    for n in 2..=10 {
        let t = build_table(&LambdaSpec::Lebesgue, n)?;
        let v = both(&generate(&ExampleKind::Synchronized, SystemShape::new(2, n)?)?, &t)?;
        sync.close((1.0 - 2.0 / (n + 1) as f64) * ln2, v);
        let tp = build_table(&LambdaSpec::two_point(0.3)?, n)?;
        let v = both(&generate(&ExampleKind::Synchronized, SystemShape::new(3, n)?)?, &tp)?;
        sync.close((1.0 - tp.get(0) - tp.get(n)) * 3f64.ln(), v);

        let chain = generate(&ExampleKind::ChainPair, SystemShape::new(4, n)?)?;
        let v = intricacy_exact(&chain, &build_table(&LambdaSpec::UniformPoint, n)?)?.value();
        chain_u.close((n - 1) as f64 / 4.0 * 4f64.ln(), v);
        chain_e.close((n - 1) as f64 / 6.0 * 4f64.ln(), intricacy_exact(&chain, &t)?.value());
    }
    for (d, n, k) in [(2, 4, vec![1, 2]), (3, 4, vec![0, 3]), (2, 5, vec![0, 2, 4]), (2, 6, vec![1, 2, 3, 4, 5])] {
        let in_k = k.iter().fold(0u32, |m, &i| m | 1 << i);
        let t = build_table(&LambdaSpec::Lebesgue, n)?;
        let dist = generate(&ExampleKind::SynchronizedSubsystem { k }, SystemShape::new(d, n)?)?;
        let log_d = (d as f64).ln();
        let expected = from_entropy_formula(n, &t, |s| {
            ((s & !in_k).count_ones() as f64 + f64::from(u8::from(s & in_k != 0))) * log_d
        });
        block.close(expected, both(&dist, &t)?);
    }
    for d in [2, 3] {
        let t = build_table(&LambdaSpec::Lebesgue, 2)?;
        for x in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let dist = generate(&ExampleKind::EntropyPair { x }, SystemShape::new(d, 2)?)?;
            pair.close(4.0 * x.min(1.0 - x) * t.get(1) * (d as f64).ln(), both(&dist, &t)?);
        }
    }
    for d in [2, 3, 4] {
        let log_d = (d as f64).ln();
        let t2 = build_table(&LambdaSpec::Lebesgue, 2)?;
        let sigma: Vec<usize> = (0..d).rev().collect();
        let perm = generate(&ExampleKind::N2Permutation { sigma }, SystemShape::new(d, 2)?)?;
        small.close(log_d / 3.0, both(&perm, &t2)?);
        let xor = generate(&ExampleKind::N3Xor, SystemShape::new(d, 3)?)?;
        small.close(log_d / 2.0, both(&xor, &build_table(&LambdaSpec::Lebesgue, 3)?)?);
    }
    Ok(vec![trivial, sync, chain_u, chain_e, block, pair, small, paths])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn ets_oracle_small_values() {
        assert_eq!(ets_oracle(3, 0), 0.25);
        assert!((ets_oracle(3, 1) - 1.0 / 12.0).abs() < 1e-15);
        assert!((ets_oracle(4, 2) - 1.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn small_appendix_run_passes_and_is_deterministic() {
        let opts = VerifyOptions { seed: 7, trials: Some(40), tolerance: None };
        let a = verify_suites(Suite::Appendix, &opts).unwrap();
        assert!(a.passed(), "{a:?}");
        assert_eq!(a, verify_suites(Suite::Appendix, &opts).unwrap());
    }
}
