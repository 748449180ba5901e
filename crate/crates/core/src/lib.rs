//! Correlation tensors on star networks: hidden-variable models, canonical
//! strategy forms, separable quantum realizations and membership tests.
//!
//! Parties are `n` edges `A_1..A_n` around a hub `B`; each edge shares one
//! independent source with the hub. Tripartite tensors are the `n = 2` case
//! stored in `(A, C, B)` order.

pub mod certify;
pub mod codec;
mod contract;
pub mod error;
pub mod examples;
mod index;
pub mod lp;
pub mod models;
pub mod quantum;
pub mod random;
pub mod strategies;
pub mod tensor;

pub use certify::{
    bell_local_lp, factorization_check, hull_membership_sample, nlocal_search, CertReport,
    SearchConfig, Verdict,
};
pub use codec::Document;
pub use error::{Error, Result};
pub use models::{
    canonicalize, evaluate_bilocal, evaluate_nlocal, evaluate_triangle, expand_full, path_point,
    relabel_hub, star_mix, sun, CanonicalNLocalForm, DiscreteNLocalModel, FullExpansion,
    TriangleModel,
};
pub use quantum::{
    born_evaluate, extract_model, realize, validate_realization, QuantumRealization,
};
pub use strategies::{
    decode, decompose_rs, deterministic_ct, encode, strategy_matrix, DeterministicStrategy,
    RsDecomposition,
};
pub use tensor::{
    distance, inner, marginal, mix, nonsignaling_check, party_marginal, product_ct, uniform_ct,
    validate, CorrelationTensor, Party, ResponseMatrix, Scenario, TensorDiagnostics, Tolerances,
};
