//! Seeded sampling of distributions, response tables and models.
//!
//! Distributions are uniform on the simplex (normalized `Exp(1)` draws).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::Result;
use crate::models::{CanonicalNLocalForm, DiscreteNLocalModel};
use crate::tensor::{Party, ResponseMatrix, Scenario};

/// Deterministic generator for a recorded seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A draw from the flat Dirichlet distribution on `len` points.
pub fn dirichlet<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let sum: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= sum);
    v
}

/// `rows` independent Dirichlet rows of width `outcomes`, concatenated.
pub fn stochastic_rows<R: Rng + ?Sized>(rows: usize, outcomes: usize, rng: &mut R) -> Vec<f64> {
    (0..rows).flat_map(|_| dirichlet(outcomes, rng)).collect()
}

pub fn response_matrix<R: Rng + ?Sized>(
    inputs: usize,
    outcomes: usize,
    rng: &mut R,
) -> ResponseMatrix {
    ResponseMatrix::new(inputs, outcomes, stochastic_rows(inputs, outcomes, rng))
        .expect("shape fixed")
}

/// Random model with hidden dimensions `dims`.
pub fn model<R: Rng + ?Sized>(
    s: &Scenario,
    dims: &[usize],
    rng: &mut R,
) -> Result<DiscreteNLocalModel> {
    let n = s.edges();
    let sources = dims.iter().map(|&d| dirichlet(d, rng)).collect();
    let edges = (0..n)
        .map(|i| stochastic_rows(dims[i] * s.edge_inputs()[i], s.edge_outcomes()[i], rng))
        .collect();
    let hidden: usize = dims.iter().product();
    let hub = stochastic_rows(hidden * s.hub_inputs(), s.hub_outcomes(), rng);
    DiscreteNLocalModel::new(s.clone(), sources, edges, hub)
}

/// Random canonical form: Dirichlet strategy weights and hub rows.
pub fn canonical<R: Rng + ?Sized>(s: &Scenario, rng: &mut R) -> Result<CanonicalNLocalForm> {
    let dims: Vec<usize> = (0..s.edges())
        .map(|i| s.strategy_count(Party::Edge(i)))
        .collect();
    let pis = dims.iter().map(|&d| dirichlet(d, rng)).collect();
    let k: usize = dims.iter().product();
    let hub = stochastic_rows(k * s.hub_inputs(), s.hub_outcomes(), rng);
    CanonicalNLocalForm::new(s.clone(), pis, hub)
}
