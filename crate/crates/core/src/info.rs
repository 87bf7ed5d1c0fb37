//! Entropy, conditional entropy, mutual information and relative entropy,
//! all in nats, with `0 · log 0 = 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::system::{marginal_probs, JointDistribution, SubsetMask};

/// Round-off below this magnitude is clamped to zero.
pub const NATS_TOL: f64 = 1e-12;

/// An information quantity in natural-log units.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Nats(f64);

impl Nats {
    pub const ZERO: Nats = Nats(0.0);
    pub const INFINITY: Nats = Nats(f64::INFINITY);

    /// Wraps a computed value, clamping `[−1e-12, 0)` to zero.
    pub fn new(value: f64) -> Self {
        if value < 0.0 && value >= -NATS_TOL {
            Nats(0.0)
        } else {
            Nats(value)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl From<Nats> for f64 {
    fn from(n: Nats) -> f64 {
        n.0
    }
}

impl fmt::Display for Nats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

/// `−Σ p log p` over a raw vector, skipping zero entries.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    h
}

pub fn entropy(dist: &JointDistribution) -> Nats {
    Nats::new(entropy_of(dist.probs()))
}

/// `H(X_S)`, with `H(X_∅) = 0`.
pub fn subset_entropy(dist: &JointDistribution, s: &SubsetMask) -> Nats {
    debug_assert_eq!(s.width(), dist.shape().n());
    if s.is_empty() {
        return Nats::ZERO;
    }
    if s.is_full() {
        return entropy(dist);
    }
    Nats::new(entropy_of(&marginal_probs(dist.probs(), dist.shape(), s.bits())))
}

fn check_width(dist: &JointDistribution, masks: &[&SubsetMask]) -> Result<()> {
    for m in masks {
        if m.width() != dist.shape().n() {
            return invalid(format!("mask width {} does not match n={}", m.width(), dist.shape().n()));
        }
    }
    Ok(())
}

/// `H(X_a | X_b) = H(X_{a∪b}) − H(X_b)`.
pub fn conditional_entropy(dist: &JointDistribution, a: &SubsetMask, b: &SubsetMask) -> Result<Nats> {
    check_width(dist, &[a, b])?;
    if !a.is_disjoint(b) {
        return invalid("conditional entropy needs disjoint masks");
    }
    if a.is_empty() {
        return invalid("conditioned block must be nonempty");
    }
    let joint = subset_entropy(dist, &a.union(b)).value();
    Ok(Nats::new(joint - subset_entropy(dist, b).value()))
}

/// Bipartition mutual information `MI(X_S, X_{S^c})`; zero for `S ∈ {∅, I}`.
pub fn mutual_information(dist: &JointDistribution, s: &SubsetMask) -> Nats {
    debug_assert_eq!(s.width(), dist.shape().n());
    if s.is_empty() || s.is_full() {
        return Nats::ZERO;
    }
    let h_s = subset_entropy(dist, s).value();
    let h_c = subset_entropy(dist, &s.complement()).value();
    Nats::new(h_s + h_c - entropy(dist).value())
}

/// `MI(X_a, X_b)` for disjoint blocks that need not cover all coordinates.
pub fn mutual_information_between(dist: &JointDistribution, a: &SubsetMask, b: &SubsetMask) -> Result<Nats> {
    check_width(dist, &[a, b])?;
    if !a.is_disjoint(b) {
        return invalid("mutual information needs disjoint masks");
    }
    let h_a = subset_entropy(dist, a).value();
    let h_b = subset_entropy(dist, b).value();
    let h_ab = subset_entropy(dist, &a.union(b)).value();
    Ok(Nats::new(h_a + h_b - h_ab))
}

/// `D(p ‖ q)`; returns [`Nats::INFINITY`] when `p` charges a point `q` does not.
pub fn relative_entropy(p: &JointDistribution, q: &JointDistribution) -> Result<Nats> {
    if p.shape() != q.shape() {
        return invalid(format!("shape mismatch: {} vs {}", p.shape(), q.shape()));
    }
    let mut total = 0.0;
    for (&a, &b) in p.probs().iter().zip(q.probs()) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(Nats::INFINITY);
        }
        total += a * (a / b).ln();
    }
    Ok(Nats::new(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::SystemShape;
    use std::f64::consts::LN_2;

    fn shape(d: usize, n: usize) -> SystemShape {
        SystemShape::new(d, n).unwrap()
    }

    fn mask(coords: &[usize], n: usize) -> SubsetMask {
        SubsetMask::from_coords(coords, n).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let s = shape(3, 2);
        assert_eq!(entropy(&JointDistribution::point_mass(s, &[1, 2]).unwrap()).value(), 0.0);
        let h = entropy(&JointDistribution::uniform(s)).value();
        assert!((h - 2.0 * 3f64.ln()).abs() < 1e-14);
        let sync = JointDistribution::new(shape(2, 2), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((entropy(&sync).value() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn subset_entropy_conventions() {
        let u = JointDistribution::uniform(shape(2, 3));
        assert_eq!(subset_entropy(&u, &SubsetMask::empty(3)).value(), 0.0);
        assert_eq!(subset_entropy(&u, &SubsetMask::full(3)), entropy(&u));
        assert!((subset_entropy(&u, &mask(&[0, 2], 3)).value() - 2.0 * LN_2).abs() < 1e-14);
    }

    #[test]
    fn conditional_entropy_examples() {
        let u = JointDistribution::uniform(shape(2, 2));
        let h = conditional_entropy(&u, &mask(&[0], 2), &mask(&[1], 2)).unwrap();
        assert!((h.value() - LN_2).abs() < 1e-15);

        let copy = JointDistribution::new(shape(2, 2), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let h = conditional_entropy(&copy, &mask(&[1], 2), &mask(&[0], 2)).unwrap();
        assert_eq!(h.value(), 0.0);

        assert!(conditional_entropy(&u, &mask(&[0], 2), &mask(&[0, 1], 2)).is_err());
        assert!(conditional_entropy(&u, &SubsetMask::empty(2), &mask(&[0], 2)).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let s = shape(2, 1);
        let a = JointDistribution::new(s, vec![0.3, 0.7]).unwrap();
        let b = JointDistribution::new(s, vec![0.9, 0.1]).unwrap();
        let prod = a.product(&b).unwrap();
        assert_eq!(mutual_information(&prod, &mask(&[0], 2)).value(), 0.0);

        let copy = JointDistribution::new(shape(2, 2), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((mutual_information(&copy, &mask(&[0], 2)).value() - LN_2).abs() < 1e-15);
        assert_eq!(mutual_information(&copy, &SubsetMask::empty(2)).value(), 0.0);
        assert_eq!(mutual_information(&copy, &SubsetMask::full(2)).value(), 0.0);
    }

    #[test]
    fn relative_entropy_examples() {
        let s = shape(2, 1);
        let pm = JointDistribution::point_mass(s, &[0]).unwrap();
        let u = JointDistribution::uniform(s);
        assert_eq!(relative_entropy(&u, &u).unwrap().value(), 0.0);
        assert!((relative_entropy(&pm, &u).unwrap().value() - LN_2).abs() < 1e-15);
        assert!(relative_entropy(&u, &pm).unwrap().is_infinite());
        assert!(relative_entropy(&u, &JointDistribution::uniform(shape(2, 2))).is_err());
    }

    #[test]
    fn relative_entropy_to_product_of_marginals_is_mutual_information() {
        let s2 = shape(3, 2);
        let joint =
            JointDistribution::from_weights(s2, vec![4.0, 1.0, 0.5, 0.2, 3.0, 1.0, 0.1, 0.7, 2.0]).unwrap();
        let left = joint.marginal(&mask(&[0], 2)).unwrap();
        let right = joint.marginal(&mask(&[1], 2)).unwrap();
        let indep = left.product(&right).unwrap();
        let kl = relative_entropy(&joint, &indep).unwrap().value();
        let mi = mutual_information(&joint, &mask(&[0], 2)).value();
        assert!((kl - mi).abs() < 1e-14);
    }
}
