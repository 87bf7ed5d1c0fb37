//! Finite random systems over `{0,…,d−1}^n`.
//!
//! A system is identified with its law: a dense vector of `d^n`
//! probabilities in mixed-radix order with coordinate 0 the most
//! significant digit. The same order is used on disk.

use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Largest number of variables accepted for exact enumeration.
pub const MAX_EXACT_N: usize = 24;

/// Tolerance on `Σ p − 1` accepted (and corrected) at construction.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Alphabet size and number of variables of a system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SystemShape {
    d: usize,
    n: usize,
    states: usize,
}

impl SystemShape {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 2 {
            return invalid(format!("alphabet size d must be at least 2, got {d}"));
        }
        if n < 1 {
            return invalid("number of variables n must be at least 1");
        }
        if n > MAX_EXACT_N {
            return invalid(format!("n = {n} exceeds the exact-mode cap {MAX_EXACT_N}"));
        }
        let states = u32::try_from(n)
            .ok()
            .and_then(|n| d.checked_pow(n))
            .ok_or_else(|| Error::InvalidArgument(format!("d^n overflows for d={d}, n={n}")))?;
        Ok(SystemShape { d, n, states })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `d^n`, the number of configurations.
    pub fn num_states(&self) -> usize {
        self.states
    }

    /// Index weight of coordinate `coord` (0-based): `d^(n−1−coord)`.
    pub fn stride(&self, coord: usize) -> usize {
        self.d.pow((self.n - 1 - coord) as u32)
    }

    pub fn index_of(&self, config: &[usize]) -> Result<usize> {
        if config.len() != self.n {
            return invalid(format!(
                "configuration has {} symbols, expected {}",
                config.len(),
                self.n
            ));
        }
        let mut index = 0;
        for (i, &x) in config.iter().enumerate() {
            if x >= self.d {
                return invalid(format!("symbol {x} at coordinate {i} is not below d={}", self.d));
            }
            index = index * self.d + x;
        }
        Ok(index)
    }

    pub fn config_of(&self, index: usize) -> Result<Configuration> {
        if index >= self.states {
            return invalid(format!("index {index} out of range for {} states", self.states));
        }
        let mut symbols = vec![0; self.n];
        self.write_digits(index, &mut symbols);
        Ok(Configuration(symbols))
    }

    /// Writes the base-`d` digits of `index` into `out` (length `n`).
    pub(crate) fn write_digits(&self, mut index: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = index % self.d;
            index /= self.d;
        }
    }
}

impl fmt::Display for SystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, n={})", self.d, self.n)
    }
}

/// One point of `{0,…,d−1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration(Vec<usize>);

impl Configuration {
    pub fn new(symbols: Vec<usize>) -> Self {
        Configuration(symbols)
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }
}

impl std::ops::Deref for Configuration {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// A subset of the coordinates `{0,…,n−1}`; bit `i` set means coordinate `i` is in the set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    bits: u32,
    n: usize,
}

impl SubsetMask {
    pub fn new(bits: u32, n: usize) -> Result<Self> {
        if n > MAX_EXACT_N {
            return invalid(format!("mask width {n} exceeds {MAX_EXACT_N}"));
        }
        if bits >> n != 0 {
            return invalid(format!("mask {bits:#b} has bits at or above width {n}"));
        }
        Ok(SubsetMask { bits, n })
    }

    pub(crate) fn from_raw(bits: u32, n: usize) -> Self {
        debug_assert!(bits >> n == 0);
        SubsetMask { bits, n }
    }

    pub fn from_coords(coords: &[usize], n: usize) -> Result<Self> {
        let mut bits = 0u32;
        for &c in coords {
            if c >= n {
                return invalid(format!("coordinate {c} out of range for width {n}"));
            }
            bits |= 1 << c;
        }
        SubsetMask::new(bits, n)
    }

    pub fn empty(n: usize) -> Self {
        SubsetMask { bits: 0, n }
    }

    pub fn full(n: usize) -> Self {
        SubsetMask { bits: full_bits(n), n }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == full_bits(self.n)
    }

    pub fn contains(&self, coord: usize) -> bool {
        coord < self.n && self.bits >> coord & 1 == 1
    }

    pub fn complement(&self) -> Self {
        SubsetMask { bits: !self.bits & full_bits(self.n), n: self.n }
    }

    pub fn union(&self, other: &SubsetMask) -> Self {
        SubsetMask { bits: self.bits | other.bits, n: self.n.max(other.n) }
    }

    pub fn is_disjoint(&self, other: &SubsetMask) -> bool {
        self.bits & other.bits == 0
    }

    /// Coordinates in ascending order.
    pub fn coords(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.contains(i))
    }
}

pub(crate) fn full_bits(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Report produced by [`validate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Validation {
    pub negative_entries: usize,
    pub min_entry: f64,
    pub non_finite_entries: usize,
    /// `|Σ p − 1|`
    pub sum_deviation: f64,
    pub support_size: usize,
    pub ok: bool,
}

/// Checks a raw probability vector without constructing a distribution.
pub fn validate(probs: &[f64]) -> Validation {
    let negative_entries = probs.iter().filter(|&&p| p < 0.0).count();
    let non_finite_entries = probs.iter().filter(|p| !p.is_finite()).count();
    let min_entry = probs.iter().copied().fold(f64::INFINITY, f64::min);
    let sum_deviation = (probs.iter().sum::<f64>() - 1.0).abs();
    let support_size = probs.iter().filter(|&&p| p > 0.0).count();
    Validation {
        negative_entries,
        min_entry,
        non_finite_entries,
        sum_deviation,
        support_size,
        ok: negative_entries == 0 && non_finite_entries == 0 && sum_deviation <= NORMALIZATION_TOL,
    }
}

/// The law of a system: `d^n` non-negative probabilities summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    shape: SystemShape,
    probs: Vec<f64>,
}

impl JointDistribution {
    /// Builds a distribution, renormalizing when `|Σ p − 1| ≤ 1e-12`.
    pub fn new(shape: SystemShape, probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(shape, probs, NORMALIZATION_TOL)
    }

    /// Like [`JointDistribution::new`] with a caller-chosen normalization tolerance.
    pub fn with_tolerance(shape: SystemShape, mut probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.len() != shape.num_states() {
            return invalid(format!(
                "expected {} probabilities for shape {shape}, got {}",
                shape.num_states(),
                probs.len()
            ));
        }
        if let Some(i) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return invalid(format!("entry {i} is negative or not finite: {}", probs[i]));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return invalid(format!("probabilities sum to {total}, not 1 (tolerance {tol:e})"));
        }
        if total != 1.0 {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        Ok(JointDistribution { shape, probs })
    }

    /// Internal constructor for vectors that are normalized by construction.
    pub(crate) fn from_parts(shape: SystemShape, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), shape.num_states());
        JointDistribution { shape, probs }
    }

    pub fn uniform(shape: SystemShape) -> Self {
        let p = 1.0 / shape.num_states() as f64;
        JointDistribution { shape, probs: vec![p; shape.num_states()] }
    }

    pub fn point_mass(shape: SystemShape, config: &[usize]) -> Result<Self> {
        let index = shape.index_of(config)?;
        let mut probs = vec![0.0; shape.num_states()];
        probs[index] = 1.0;
        Ok(JointDistribution { shape, probs })
    }

    /// Builds a distribution from unnormalized non-negative weights.
    pub fn from_weights(shape: SystemShape, mut weights: Vec<f64>) -> Result<Self> {
        if weights.len() != shape.num_states() {
            return invalid("weight vector length does not match shape");
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return invalid("weights must be finite and non-negative");
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return invalid("weights sum to zero");
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(JointDistribution { shape, probs: weights })
    }

    pub fn shape(&self) -> SystemShape {
        self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn prob(&self, config: &[usize]) -> Result<f64> {
        Ok(self.probs[self.shape.index_of(config)?])
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// Law of the coordinates in `s`, kept in ascending order.
    pub fn marginal(&self, s: &SubsetMask) -> Result<JointDistribution> {
        if s.width() != self.shape.n {
            return invalid(format!("mask width {} does not match n={}", s.width(), self.shape.n));
        }
        if s.is_empty() {
            return invalid("marginal onto the empty subset is undefined; use H(X_∅) = 0");
        }
        let shape = SystemShape::new(self.shape.d, s.len())?;
        let probs = marginal_probs(&self.probs, self.shape, s.bits());
        Ok(JointDistribution { shape, probs })
    }

    /// Law of the pair `(self, other)` of independent systems.
    pub fn product(&self, other: &JointDistribution) -> Result<JointDistribution> {
        if self.shape.d != other.shape.d {
            return invalid(format!(
                "cannot take the product of systems with d={} and d={}",
                self.shape.d, other.shape.d
            ));
        }
        let shape = SystemShape::new(self.shape.d, self.shape.n + other.shape.n)?;
        let mut probs = Vec::with_capacity(shape.num_states());
        for &a in &self.probs {
            probs.extend(other.probs.iter().map(|&b| a * b));
        }
        Ok(JointDistribution { shape, probs })
    }

    /// Relabels coordinates: variable `i` of `self` becomes coordinate `perm[i]` of the result.
    pub fn permute(&self, perm: &[usize]) -> Result<JointDistribution> {
        let n = self.shape.n;
        check_permutation(perm, n)?;
        let strides: Vec<usize> = perm.iter().map(|&target| self.shape.stride(target)).collect();
        let mut probs = vec![0.0; self.probs.len()];
        let mut digits = vec![0; n];
        for (index, &p) in self.probs.iter().enumerate() {
            self.shape.write_digits(index, &mut digits);
            let target: usize = digits.iter().zip(&strides).map(|(x, s)| x * s).sum();
            probs[target] = p;
        }
        Ok(JointDistribution { shape: self.shape, probs })
    }

    /// Image law under a deterministic map of configurations.
    pub fn pushforward<F>(&self, target: SystemShape, map: F) -> Result<JointDistribution>
    where
        F: Fn(&[usize]) -> Vec<usize>,
    {
        let mut probs = vec![0.0; target.num_states()];
        let mut digits = vec![0; self.shape.n];
        for (index, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            self.shape.write_digits(index, &mut digits);
            probs[target.index_of(&map(&digits))?] += p;
        }
        Ok(JointDistribution { shape: target, probs })
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return invalid(format!("permutation has length {}, expected {n}", perm.len()));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return invalid(format!("{perm:?} is not a permutation of 0..{n}"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Single pass over the joint vector, accumulating into `d^|S|` bins.
pub(crate) fn marginal_probs(probs: &[f64], shape: SystemShape, bits: u32) -> Vec<f64> {
    let d = shape.d;
    let kept: Vec<usize> = (0..shape.n).filter(|&i| bits >> i & 1 == 1).collect();
    let m = kept.len();
    let strides: Vec<usize> = kept.iter().map(|&c| shape.stride(c)).collect();
    let weights: Vec<usize> = (0..m).map(|r| d.pow((m - 1 - r) as u32)).collect();
    let mut out = vec![0.0; d.pow(m as u32)];
    for (index, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut target = 0;
        for (s, w) in strides.iter().zip(&weights) {
            target += (index / s) % d * w;
        }
        out[target] += p;
    }
    out
}

/// Convex combination `Σ_u w_u μ_u` of same-shape distributions.
pub fn mix(dists: &[JointDistribution], weights: &[f64]) -> Result<JointDistribution> {
    let Some(first) = dists.first() else {
        return invalid("mixture needs at least one component");
    };
    if dists.len() != weights.len() {
        return invalid("one weight per component is required");
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return invalid("mixture weights must be non-negative");
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return invalid(format!("mixture weights sum to {total}"));
    }
    let shape = first.shape;
    if let Some(bad) = dists.iter().find(|m| m.shape != shape) {
        return invalid(format!("shape mismatch in mixture: {} vs {}", shape, bad.shape));
    }
    let mut probs = vec![0.0; shape.num_states()];
    for (dist, &w) in dists.iter().zip(weights) {
        for (acc, &p) in probs.iter_mut().zip(&dist.probs) {
            *acc += w * p;
        }
    }
    JointDistribution::new(shape, probs)
}

/// Largest L1 displacement `‖permute(μ, τ) − μ‖₁` over adjacent transpositions τ.
///
/// Zero exactly when the law is exchangeable, since adjacent transpositions
/// generate the symmetric group.
pub fn exchangeability_distance(dist: &JointDistribution) -> f64 {
    let shape = dist.shape;
    let d = shape.d;
    let p = &dist.probs;
    let mut worst: f64 = 0.0;
    for j in 0..shape.n.saturating_sub(1) {
        let (hi, lo) = (shape.stride(j), shape.stride(j + 1));
        let mut l1 = 0.0;
        for (index, &v) in p.iter().enumerate() {
            let a = index / hi % d;
            let b = index / lo % d;
            let swapped = index + b * hi + a * lo - a * hi - b * lo;
            l1 += (v - p[swapped]).abs();
        }
        worst = worst.max(l1);
    }
    worst
}
