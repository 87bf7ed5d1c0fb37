//! Descent through the subset lattice.
//!
//! Every subset `S ⊆ {0,…,n−1}` is reached exactly once from its parent
//! `S ∪ {j}` by summing coordinate `j` out of the parent's marginal table,
//! where coordinates are always removed in increasing order. Visiting all
//! `2^n` marginals therefore costs `Σ_S d^{|S|+1} = d (d+1)^n` additions
//! instead of `2^n d^n` for independent passes.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::exec::{map_indexed, Execution};
use crate::info::entropy_of;
use crate::system::{full_bits, SystemShape};

/// Tables at least this long fan their children out to worker threads.
const PAR_MIN_LEN: usize = 1 << 10;

struct Node<'a> {
    table: &'a [f64],
    mask: u32,
    /// Smallest coordinate that may still be removed.
    next: usize,
}

impl Node<'_> {
    fn children(&self, n: usize) -> Vec<usize> {
        (self.next..n).filter(|&j| self.mask >> j & 1 == 1).collect()
    }
}

/// Stride of coordinate `j` inside the marginal table of `mask`.
fn inner_stride(d: usize, mask: u32, j: usize) -> usize {
    let m = mask.count_ones();
    let rank = (mask & ((1u32 << j) - 1)).count_ones();
    d.pow(m - 1 - rank)
}

fn sum_out(table: &[f64], d: usize, stride: usize) -> Vec<f64> {
    let block = stride * d;
    let mut out = vec![0.0; table.len() / d];
    for (hi, chunk) in table.chunks_exact(block).enumerate() {
        let dst = &mut out[hi * stride..(hi + 1) * stride];
        for slab in chunk.chunks_exact(stride) {
            for (o, &v) in dst.iter_mut().zip(slab) {
                *o += v;
            }
        }
    }
    out
}

fn broadcast_add(target: &mut [f64], child: &[f64], d: usize, stride: usize) {
    let block = stride * d;
    for (hi, chunk) in target.chunks_exact_mut(block).enumerate() {
        let src = &child[hi * stride..(hi + 1) * stride];
        for slab in chunk.chunks_exact_mut(stride) {
            for (t, &v) in slab.iter_mut().zip(src) {
                *t += v;
            }
        }
    }
}

fn child_exec(len: usize, exec: Execution) -> Execution {
    if len >= PAR_MIN_LEN {
        exec
    } else {
        Execution::Sequential
    }
}

/// `H(X_S)` for every mask `S`, indexed by the mask bits; `H(X_∅) = 0`.
pub(crate) fn subset_entropies(probs: &[f64], shape: SystemShape, exec: Execution) -> Vec<f64> {
    let n = shape.n();
    let slots: Vec<AtomicU64> = (0..1usize << n).map(|_| AtomicU64::new(0)).collect();
    let root = Node { table: probs, mask: full_bits(n), next: 0 };
    entropy_visit(&root, shape.d(), n, &slots, exec);
    slots.into_iter().map(|a| f64::from_bits(a.into_inner())).collect()
}

fn entropy_visit(node: &Node<'_>, d: usize, n: usize, slots: &[AtomicU64], exec: Execution) {
    let h = if node.mask == 0 { 0.0 } else { entropy_of(node.table) };
    slots[node.mask as usize].store(h.to_bits(), Ordering::Relaxed);
    let children = node.children(n);
    map_indexed(children.len(), child_exec(node.table.len(), exec), |i| {
        let j = children[i];
        let table = sum_out(node.table, d, inner_stride(d, node.mask, j));
        let child = Node { table: &table, mask: node.mask & !(1 << j), next: j + 1 };
        entropy_visit(&child, d, n, slots, exec);
    });
}

/// For every configuration `ω`, `Σ_S weights[|S|] · log m_S(ω_S)` where `m_S`
/// is the marginal of `S`. Entries with zero weight are skipped, so zero
/// marginals only matter where their weight is positive.
pub(crate) fn weighted_log_marginals(
    probs: &[f64],
    shape: SystemShape,
    weights: &[f64],
    exec: Execution,
) -> Vec<f64> {
    let n = shape.n();
    debug_assert_eq!(weights.len(), n + 1);
    let root = Node { table: probs, mask: full_bits(n), next: 0 };
    accumulate_visit(&root, shape.d(), n, weights, exec)
}

fn accumulate_visit(node: &Node<'_>, d: usize, n: usize, weights: &[f64], exec: Execution) -> Vec<f64> {
    let w = weights[node.mask.count_ones() as usize];
    let mut acc: Vec<f64> = if w == 0.0 {
        vec![0.0; node.table.len()]
    } else {
        node.table.iter().map(|&m| w * m.ln()).collect()
    };
    let children = node.children(n);
    let partials = map_indexed(children.len(), child_exec(node.table.len(), exec), |i| {
        let j = children[i];
        let table = sum_out(node.table, d, inner_stride(d, node.mask, j));
        let child = Node { table: &table, mask: node.mask & !(1 << j), next: j + 1 };
        accumulate_visit(&child, d, n, weights, exec)
    });
    for (&j, partial) in children.iter().zip(&partials) {
        broadcast_add(&mut acc, partial, d, inner_stride(d, node.mask, j));
    }
    acc
}

/// Entropies of the prefixes `X_{0..k}` for `k = 0..=n`.
pub(crate) fn prefix_entropies(probs: &[f64], shape: SystemShape) -> Vec<f64> {
    let d = shape.d();
    let mut out = vec![0.0; shape.n() + 1];
    let mut table = probs.to_vec();
    for k in (1..=shape.n()).rev() {
        out[k] = entropy_of(&table);
        table = table.chunks_exact(d).map(|c| c.iter().sum()).collect();
    }
    out
}
