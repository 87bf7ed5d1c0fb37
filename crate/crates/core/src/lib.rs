//! Intricacies of finite discrete systems.
//!
//! A system is a joint law `μ` of `n` random variables on `{0,…,d−1}`. An
//! intricacy is a weighted average of bipartition mutual informations
//!
//! ```text
//! I^c(X) = Σ_{S ⊆ {0,…,n−1}} c^n_{|S|} · MI(X_S, X_{S^c})
//! ```
//!
//! whose coefficients come from a symmetric probability measure `λ` on
//! `[0,1]` via `c^n_k = ∫ x^k (1−x)^{n−k} dλ(x)`. The crate provides the
//! coefficient families, exact and Monte Carlo evaluation, example systems,
//! a multi-start maximizer over the simplex, and inequality test suites.
//!
//! ```
//! use intricacy::{build_table, generate, intricacy_exact, ExampleKind, LambdaSpec, SystemShape};
//!
//! let shape = SystemShape::new(2, 3).unwrap();
//! let xor = generate(&ExampleKind::N3Xor, shape).unwrap();
//! let table = build_table(&LambdaSpec::Lebesgue, 3).unwrap();
//! let value = intricacy_exact(&xor, &table).unwrap();
//! assert!((value.value() - 0.5 * 2f64.ln()).abs() < 1e-12);
//! ```
//!
//! Heavy loops run on rayon when the `parallel` feature (default) is on;
//! see [`Execution`].

pub mod coeffs;
pub mod engine;
pub mod error;
pub mod exec;
pub mod generators;
pub mod info;
pub mod io;
mod lattice;
pub mod optimizer;
pub mod system;
pub mod verify;

pub use coeffs::{
    binomial, build_table, check_projectivity, check_table, kappa, Atom, CoefficientTable, Kappa, LambdaSpec,
    TableCheck,
};
pub use engine::{
    intricacy_exact, intricacy_exact_with, intricacy_exchangeable, intricacy_mc, intricacy_mc_with,
    intricacy_via_entropies, intricacy_via_entropies_with, mi_profile, mi_profile_with, MCEstimate, MIProfile,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use generators::{
    dirichlet_uniform, exchangeable_from_type_weights, generate, random_system, symmetrize, variable_with_entropy,
    witnesses, ExampleKind, TypeWeights,
};
pub use info::{
    conditional_entropy, entropy, entropy_of, mutual_information, mutual_information_between, relative_entropy,
    subset_entropy, Nats,
};
pub use io::{load_system, save_system, system_from_json, system_to_json};
pub use optimizer::{
    adjust_entropy, intricacy_gradient, intricacy_hessian, maximize, maximize_exchangeable, maximize_from,
    maximize_with_entropy, maximize_with_entropy_from, support_stats, OptResult, OptimizerConfig, SupportStats,
};
pub use system::{
    exchangeability_distance, mix, validate, Configuration, JointDistribution, SubsetMask, SystemShape, Validation,
};
pub use verify::{verify_suites, CheckResult, Suite, VerifyOptions, VerifyReport};
