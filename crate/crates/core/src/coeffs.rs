//! Exchangeable coefficient systems `c^n_k` and their paintbox measures.
//!
//! Every intricacy is generated by a symmetric probability measure `λ` on
//! `[0,1]` through `c^n_k = ∫ x^k (1−x)^(n−k) λ(dx)`. Only closed-form
//! families and finite atomic mixtures are supported, so every table is
//! evaluated without quadrature.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest size accepted by [`build_table`].
pub const MAX_TABLE_N: usize = 64;

/// Atoms closer than this are merged after symmetrization.
const ATOM_MERGE_TOL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub w: f64,
}

/// A symmetric probability measure on `[0,1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", try_from = "RawSpec", into = "RawSpec")]
pub enum LambdaSpec {
    /// Lebesgue measure; yields the Edelman–Sporns–Tononi neural complexity.
    Lebesgue,
    /// `δ_{1/2}`; the uniform intricacy `c^n_k = 2^{−n}`.
    UniformPoint,
    /// `½(δ_p + δ_{1−p})`; the p-symmetric intricacy.
    TwoPoint(f64),
    /// A finite mixture of atoms, stored symmetrized and sorted.
    Atomic(Vec<Atom>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
enum RawSpec {
    Ets,
    Uniform,
    PSymmetric { p: f64 },
    Atomic { atoms: Vec<Atom> },
}

impl TryFrom<RawSpec> for LambdaSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw {
            RawSpec::Ets => Ok(LambdaSpec::Lebesgue),
            RawSpec::Uniform => Ok(LambdaSpec::UniformPoint),
            RawSpec::PSymmetric { p } => LambdaSpec::two_point(p),
            RawSpec::Atomic { atoms } => LambdaSpec::atomic(atoms),
        }
    }
}

impl From<LambdaSpec> for RawSpec {
    fn from(spec: LambdaSpec) -> Self {
        match spec {
            LambdaSpec::Lebesgue => RawSpec::Ets,
            LambdaSpec::UniformPoint => RawSpec::Uniform,
            LambdaSpec::TwoPoint(p) => RawSpec::PSymmetric { p },
            LambdaSpec::Atomic(atoms) => RawSpec::Atomic { atoms },
        }
    }
}

impl LambdaSpec {
    pub fn two_point(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("p-symmetric parameter must lie in [0,1], got {p}"));
        }
        Ok(LambdaSpec::TwoPoint(p))
    }

    /// Builds an atomic measure, replacing it by `½(spec + reflected spec)`.
    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return invalid("atomic measure needs at least one atom");
        }
        for a in &atoms {
            if !(0.0..=1.0).contains(&a.x) {
                return invalid(format!("atom position {} outside [0,1]", a.x));
            }
            if !a.w.is_finite() || a.w < 0.0 {
                return invalid(format!("atom weight {} is negative", a.w));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("atom weights sum to {total}, not 1"));
        }
        let mut sym: Vec<Atom> = atoms
            .iter()
            .flat_map(|a| [Atom { x: a.x, w: a.w / 2.0 }, Atom { x: 1.0 - a.x, w: a.w / 2.0 }])
            .filter(|a| a.w > 0.0)
            .collect();
        sym.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<Atom> = Vec::with_capacity(sym.len());
        for a in sym {
            match merged.last_mut() {
                Some(last) if (last.x - a.x).abs() <= ATOM_MERGE_TOL => last.w += a.w,
                _ => merged.push(a),
            }
        }
        Ok(LambdaSpec::Atomic(merged))
    }

    /// Name used in JSON records and on the command line.
    pub fn family(&self) -> &'static str {
        match self {
            LambdaSpec::Lebesgue => "ets",
            LambdaSpec::UniformPoint => "uniform",
            LambdaSpec::TwoPoint(_) => "p-symmetric",
            LambdaSpec::Atomic(_) => "atomic",
        }
    }

    /// `λ(]0,1[)`.
    pub fn interior_mass(&self) -> f64 {
        match self {
            LambdaSpec::Lebesgue | LambdaSpec::UniformPoint => 1.0,
            LambdaSpec::TwoPoint(p) => {
                if *p > 0.0 && *p < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            LambdaSpec::Atomic(atoms) => atoms.iter().filter(|a| a.x > 0.0 && a.x < 1.0).map(|a| a.w).sum(),
        }
    }

    pub fn is_null(&self) -> bool {
        self.interior_mass() == 0.0
    }

    /// Draws `W ~ λ`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            LambdaSpec::Lebesgue => rng.random::<f64>(),
            LambdaSpec::UniformPoint => 0.5,
            LambdaSpec::TwoPoint(p) => {
                if rng.random::<bool>() {
                    *p
                } else {
                    1.0 - p
                }
            }
            LambdaSpec::Atomic(atoms) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.w;
                    if u < acc {
                        return a.x;
                    }
                }
                atoms.last().map_or(0.5, |a| a.x)
            }
        }
    }
}

/// Binomial coefficient by the multiplicative recurrence; exact in `f64` for `n ≤ 56`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b.round()
}

/// Coefficients `c[k] = c^n_k`, the weight of any subset of size `k` of an `n`-system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    n: usize,
    c: Vec<f64>,
}

/// Worst violations of the table invariants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TableCheck {
    /// `max_k max(0, −c[k])`
    pub negativity: f64,
    /// `max_k |c[k] − c[n−k]|`
    pub symmetry: f64,
    /// `|Σ_k binom(n,k) c[k] − 1|`
    pub normalization: f64,
}

impl TableCheck {
    pub fn max_violation(&self) -> f64 {
        self.negativity.max(self.symmetry).max(self.normalization)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

impl CoefficientTable {
    /// Wraps raw coefficients `c[0..=n]` without validation; see [`check_table`].
    pub fn from_raw(c: Vec<f64>) -> Result<Self> {
        if c.len() < 2 {
            return invalid("a coefficient table needs entries for k = 0..=n with n ≥ 1");
        }
        Ok(CoefficientTable { n: c.len() - 1, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn get(&self, k: usize) -> f64 {
        self.c[k]
    }

    /// Fails unless the invariants hold within `1e-9`.
    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let check = check_table(self);
        if !check.passes(1e-9) {
            return invalid(format!("coefficient table violates its invariants: {check:?}"));
        }
        Ok(())
    }
}

pub fn build_table(lambda: &LambdaSpec, n: usize) -> Result<CoefficientTable> {
    if n < 1 {
        return invalid("table size n must be at least 1");
    }
    if n > MAX_TABLE_N {
        return invalid(format!("table size {n} exceeds {MAX_TABLE_N}"));
    }
    let mut c: Vec<f64> = match lambda {
        LambdaSpec::Lebesgue => (0..=n).map(|k| 1.0 / ((n + 1) as f64 * binomial(n, k))).collect(),
        LambdaSpec::UniformPoint => vec![0.5f64.powi(n as i32); n + 1],
        LambdaSpec::TwoPoint(p) => {
            let q = 1.0 - p;
            (0..=n)
                .map(|k| {
                    let (k, r) = (k as i32, (n - k) as i32);
                    0.5 * (p.powi(k) * q.powi(r) + q.powi(k) * p.powi(r))
                })
                .collect()
        }
        LambdaSpec::Atomic(atoms) => (0..=n)
            .map(|k| {
                atoms
                    .iter()
                    .map(|a| a.w * a.x.powi(k as i32) * (1.0 - a.x).powi((n - k) as i32))
                    .sum()
            })
            .collect(),
    };
    for k in 0..=n / 2 {
        let avg = 0.5 * (c[k] + c[n - k]);
        c[k] = avg;
        c[n - k] = avg;
    }
    Ok(CoefficientTable { n, c })
}

/// `κ_c = 2∫ x(1−x) λ(dx) ∈ (0, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct Kappa(f64);

impl Kappa {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn kappa(lambda: &LambdaSpec) -> Result<Kappa> {
    if lambda.is_null() {
        return Err(Error::Domain(
            "null intricacy: λ puts no mass on ]0,1[ so κ vanishes".into(),
        ));
    }
    let value = match lambda {
        LambdaSpec::Lebesgue => 1.0 / 3.0,
        LambdaSpec::UniformPoint => 0.5,
        LambdaSpec::TwoPoint(p) => 2.0 * p * (1.0 - p),
        LambdaSpec::Atomic(atoms) => atoms.iter().map(|a| 2.0 * a.w * a.x * (1.0 - a.x)).sum(),
    };
    Ok(Kappa(value))
}

pub fn check_table(table: &CoefficientTable) -> TableCheck {
    let n = table.n;
    let c = &table.c;
    let negativity = c.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
    let symmetry = (0..=n).map(|k| (c[k] - c[n - k]).abs()).fold(0.0, f64::max);
    let total: f64 = (0..=n).map(|k| binomial(n, k) * c[k]).sum();
    TableCheck { negativity, symmetry, normalization: (total - 1.0).abs() }
}

/// `max_k |c^n_k − c^{n+1}_k − c^{n+1}_{k+1}|`.
pub fn check_projectivity(t_n: &CoefficientTable, t_n1: &CoefficientTable) -> Result<f64> {
    if t_n1.n != t_n.n + 1 {
        return invalid(format!("projectivity compares sizes n and n+1, got {} and {}", t_n.n, t_n1.n));
    }
    Ok((0..=t_n.n)
        .map(|k| (t_n.c[k] - t_n1.c[k] - t_n1.c[k + 1]).abs())
        .fold(0.0, f64::max))
}
