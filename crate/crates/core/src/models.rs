//! Discrete hidden-variable models on star networks and the triangle.
//!
//! Response tables are flat arrays with the output index fastest:
//!
//! ```text
//! edge i : P_i(a | x, λ_i)  at  (λ_i * m_i + x) * o_i + a
//! hub    : P_B(b | y, λ)    at  (λ * m_B + y) * o_B + b,   λ = λ_1 + d_1 (λ_2 + d_2 (..))
//! ```
//!
//! Canonical forms use the same hub layout with `λ_i` replaced by the
//! strategy index `k_i ∈ [N_i]`.

use serde::{Deserialize, Serialize};

use crate::contract::{contract, EdgeFactor};
use crate::error::{Error, Result};
use crate::index;
use crate::strategies::{decompose_rs, output_table, RsTerm, STRATEGY_ENCODING};
use crate::tensor::{product_ct, CorrelationTensor, Party, ResponseMatrix, Scenario};

/// Layout tag for model documents.
pub const MODEL_LAYOUT: &str = "hidden-input-output-fastest";

/// Slack for probability distributions and stochastic rows in models.
pub const MODEL_TOL: f64 = 1e-12;

/// Largest hub table (entries) a canonical form may allocate.
pub const CANONICAL_CAP: usize = 1 << 24;

fn check_pd(what: &str, q: &[f64]) -> Result<()> {
    if q.is_empty() {
        return Err(Error::Distribution(format!("{what} is empty")));
    }
    if let Some(v) = q.iter().find(|v| !v.is_finite() || **v < -MODEL_TOL) {
        return Err(Error::Distribution(format!("{what} has entry {v}")));
    }
    let sum: f64 = q.iter().sum();
    if (sum - 1.0).abs() > MODEL_TOL {
        return Err(Error::Distribution(format!("{what} sums to {sum}")));
    }
    Ok(())
}

fn check_rows(what: &str, data: &[f64], outcomes: usize, rows: usize) -> Result<()> {
    if data.len() != rows * outcomes {
        return Err(Error::Shape {
            expected: rows * outcomes,
            found: data.len(),
        });
    }
    for (r, row) in data.chunks(outcomes).enumerate() {
        check_pd(&format!("{what} row {r}"), row)?;
    }
    Ok(())
}

fn uniform_rows(rows: usize, outcomes: usize) -> Vec<f64> {
    vec![1.0 / outcomes as f64; rows * outcomes]
}

/// A D-nLHVM: independent finite sources `q_i`, one per edge, each shared
/// between edge party `A_i` and the hub.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct DiscreteNLocalModel {
    scenario: Scenario,
    source_dists: Vec<Vec<f64>>,
    edge_responses: Vec<Vec<f64>>,
    hub_response: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    scenario: Scenario,
    layout: String,
    source_dims: Vec<usize>,
    #[serde(serialize_with = "crate::codec::precise::serialize_nested")]
    source_dists: Vec<Vec<f64>>,
    #[serde(serialize_with = "crate::codec::precise::serialize_nested")]
    edge_responses: Vec<Vec<f64>>,
    #[serde(serialize_with = "crate::codec::precise::serialize")]
    hub_response: Vec<f64>,
}

impl TryFrom<ModelRepr> for DiscreteNLocalModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        if r.layout != MODEL_LAYOUT {
            return Err(Error::Codec(format!(
                "unexpected model layout `{}`",
                r.layout
            )));
        }
        let dims: Vec<usize> = r.source_dists.iter().map(Vec::len).collect();
        if dims != r.source_dims {
            return Err(Error::Codec(
                "source_dims disagree with source_dists".into(),
            ));
        }
        DiscreteNLocalModel::new(r.scenario, r.source_dists, r.edge_responses, r.hub_response)
    }
}

impl From<DiscreteNLocalModel> for ModelRepr {
    fn from(m: DiscreteNLocalModel) -> Self {
        ModelRepr {
            layout: MODEL_LAYOUT.into(),
            source_dims: m.source_dims(),
            scenario: m.scenario,
            source_dists: m.source_dists,
            edge_responses: m.edge_responses,
            hub_response: m.hub_response,
        }
    }
}

impl DiscreteNLocalModel {
    pub fn new(
        scenario: Scenario,
        source_dists: Vec<Vec<f64>>,
        edge_responses: Vec<Vec<f64>>,
        hub_response: Vec<f64>,
    ) -> Result<Self> {
        let n = scenario.edges();
        if source_dists.len() != n || edge_responses.len() != n {
            return Err(Error::Shape {
                expected: n,
                found: source_dists.len().min(edge_responses.len()),
            });
        }
        for (i, q) in source_dists.iter().enumerate() {
            check_pd(&format!("source {}", i + 1), q)?;
            let (o, m) = (scenario.edge_outcomes()[i], scenario.edge_inputs()[i]);
            check_rows(
                &format!("edge {} response", i + 1),
                &edge_responses[i],
                o,
                q.len() * m,
            )?;
        }
        let hidden: usize = source_dists.iter().map(Vec::len).product();
        check_rows(
            "hub response",
            &hub_response,
            scenario.hub_outcomes(),
            hidden * scenario.hub_inputs(),
        )?;
        Ok(DiscreteNLocalModel {
            scenario,
            source_dists,
            edge_responses,
            hub_response,
        })
    }

    /// Single-valued sources: the product model `P_1 ⊗ .. ⊗ P_n ⊗ P_B`.
    pub fn product(edges: &[ResponseMatrix], hub: &ResponseMatrix) -> Result<Self> {
        let s = Scenario::new(
            edges.iter().map(ResponseMatrix::outcomes).collect(),
            edges.iter().map(ResponseMatrix::inputs).collect(),
            hub.outcomes(),
            hub.inputs(),
        )?;
        DiscreteNLocalModel::new(
            s,
            vec![vec![1.0]; edges.len()],
            edges.iter().map(|e| e.data().to_vec()).collect(),
            hub.data().to_vec(),
        )
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn edges(&self) -> usize {
        self.scenario.edges()
    }

    pub fn source_dims(&self) -> Vec<usize> {
        self.source_dists.iter().map(Vec::len).collect()
    }

    pub fn source_dist(&self, i: usize) -> &[f64] {
        &self.source_dists[i]
    }

    pub fn edge_response(&self, i: usize) -> &[f64] {
        &self.edge_responses[i]
    }

    pub fn hub_response(&self) -> &[f64] {
        &self.hub_response
    }

    /// `P_i(·|·, λ_i)` as a response matrix.
    pub fn edge_matrix(&self, i: usize, lambda: usize) -> ResponseMatrix {
        let (o, m) = (
            self.scenario.edge_outcomes()[i],
            self.scenario.edge_inputs()[i],
        );
        let block = &self.edge_responses[i][lambda * m * o..(lambda + 1) * m * o];
        ResponseMatrix::new(m, o, block.to_vec()).expect("validated at construction")
    }

    /// `Σ_λ q_i(λ) P_i(a|x,λ)`.
    pub fn edge_marginal(&self, i: usize) -> ResponseMatrix {
        let (o, m) = (
            self.scenario.edge_outcomes()[i],
            self.scenario.edge_inputs()[i],
        );
        let mut data = vec![0.0; m * o];
        for (lam, &q) in self.source_dists[i].iter().enumerate() {
            for (acc, v) in data.iter_mut().zip(&self.edge_responses[i][lam * m * o..]) {
                *acc += q * v;
            }
        }
        ResponseMatrix::new(m, o, data).expect("shape fixed")
    }

    fn edge_factors(&self) -> Vec<EdgeFactor> {
        (0..self.edges())
            .map(|i| {
                let (o, m) = (
                    self.scenario.edge_outcomes()[i],
                    self.scenario.edge_inputs()[i],
                );
                let q = &self.source_dists[i];
                let d = q.len();
                let mut data = vec![0.0; m * o * d];
                for (lam, &ql) in q.iter().enumerate() {
                    for x in 0..m {
                        for a in 0..o {
                            data[(x * o + a) * d + lam] =
                                ql * self.edge_responses[i][(lam * m + x) * o + a];
                        }
                    }
                }
                EdgeFactor { dim: d, data }
            })
            .collect()
    }
}

/// `P(a b | x y) = Σ_λ Π q_i(λ_i) Π P_i(a_i|x_i,λ_i) P_B(b|y,λ)`.
pub fn evaluate_nlocal(m: &DiscreteNLocalModel) -> Result<CorrelationTensor> {
    let values = contract(&m.scenario, &m.edge_factors(), &m.hub_response);
    CorrelationTensor::new(m.scenario.clone(), values)
}

/// Two-edge evaluation; the result is stored in `(A, C, B)` order, so
/// [`CorrelationTensor::tripartite`] reads it as `P(abc|xyz)`.
pub fn evaluate_bilocal(m: &DiscreteNLocalModel) -> Result<CorrelationTensor> {
    if m.edges() != 2 {
        return Err(Error::Scenario(format!(
            "bilocal evaluation needs two edges, model has {}",
            m.edges()
        )));
    }
    evaluate_nlocal(m)
}

/// Normal form with one hidden value per deterministic strategy of each edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CanonicalRepr", into = "CanonicalRepr")]
pub struct CanonicalNLocalForm {
    scenario: Scenario,
    strategy_dists: Vec<Vec<f64>>,
    hub_table: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CanonicalRepr {
    scenario: Scenario,
    layout: String,
    strategy_encoding: String,
    strategy_dims: Vec<usize>,
    #[serde(serialize_with = "crate::codec::precise::serialize_nested")]
    strategy_dists: Vec<Vec<f64>>,
    #[serde(serialize_with = "crate::codec::precise::serialize")]
    hub_table: Vec<f64>,
}

impl TryFrom<CanonicalRepr> for CanonicalNLocalForm {
    type Error = Error;

    fn try_from(r: CanonicalRepr) -> Result<Self> {
        if r.layout != MODEL_LAYOUT || r.strategy_encoding != STRATEGY_ENCODING {
            return Err(Error::Codec(
                "unexpected layout or strategy encoding".into(),
            ));
        }
        let dims: Vec<usize> = r.strategy_dists.iter().map(Vec::len).collect();
        if dims != r.strategy_dims {
            return Err(Error::Codec(
                "strategy_dims disagree with strategy_dists".into(),
            ));
        }
        CanonicalNLocalForm::new(r.scenario, r.strategy_dists, r.hub_table)
    }
}

impl From<CanonicalNLocalForm> for CanonicalRepr {
    fn from(c: CanonicalNLocalForm) -> Self {
        CanonicalRepr {
            layout: MODEL_LAYOUT.into(),
            strategy_encoding: STRATEGY_ENCODING.into(),
            strategy_dims: c.strategy_dims(),
            scenario: c.scenario,
            strategy_dists: c.strategy_dists,
            hub_table: c.hub_table,
        }
    }
}

fn canonical_dims(s: &Scenario) -> Result<Vec<usize>> {
    let dims: Vec<usize> = (0..s.edges())
        .map(|i| s.strategy_count(Party::Edge(i)))
        .collect();
    let size = dims
        .iter()
        .try_fold(s.hub_inputs() * s.hub_outcomes(), |acc, &d| {
            acc.checked_mul(d)
        })
        .unwrap_or(usize::MAX);
    if size > CANONICAL_CAP {
        return Err(Error::CapExceeded {
            what: "canonical hub table",
            size,
            cap: CANONICAL_CAP,
        });
    }
    Ok(dims)
}

impl CanonicalNLocalForm {
    pub fn new(
        scenario: Scenario,
        strategy_dists: Vec<Vec<f64>>,
        hub_table: Vec<f64>,
    ) -> Result<Self> {
        let dims = canonical_dims(&scenario)?;
        if strategy_dists.len() != dims.len() {
            return Err(Error::Shape {
                expected: dims.len(),
                found: strategy_dists.len(),
            });
        }
        for (i, (pi, &n)) in strategy_dists.iter().zip(&dims).enumerate() {
            if pi.len() != n {
                return Err(Error::Shape {
                    expected: n,
                    found: pi.len(),
                });
            }
            check_pd(&format!("strategy distribution {}", i + 1), pi)?;
        }
        let k: usize = dims.iter().product();
        check_rows(
            "hub table",
            &hub_table,
            scenario.hub_outcomes(),
            k * scenario.hub_inputs(),
        )?;
        Ok(CanonicalNLocalForm {
            scenario,
            strategy_dists,
            hub_table,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// `N_i = o_i^{m_i}` per edge.
    pub fn strategy_dims(&self) -> Vec<usize> {
        self.strategy_dists.iter().map(Vec::len).collect()
    }

    pub fn strategy_dist(&self, i: usize) -> &[f64] {
        &self.strategy_dists[i]
    }

    pub fn hub_table(&self) -> &[f64] {
        &self.hub_table
    }

    /// `P_B(·|y, k)` for the flat strategy tuple `k`.
    pub fn hub_row(&self, k: usize, y: usize) -> &[f64] {
        let (ob, mb) = (self.scenario.hub_outcomes(), self.scenario.hub_inputs());
        &self.hub_table[(k * mb + y) * ob..(k * mb + y + 1) * ob]
    }

    pub fn evaluate(&self) -> Result<CorrelationTensor> {
        let factors: Vec<EdgeFactor> = (0..self.scenario.edges())
            .map(|i| {
                let (o, m) = (
                    self.scenario.edge_outcomes()[i],
                    self.scenario.edge_inputs()[i],
                );
                let pi = &self.strategy_dists[i];
                let n = pi.len();
                let table = output_table(m, o);
                let mut data = vec![0.0; m * o * n];
                for (k, &p) in pi.iter().enumerate() {
                    for x in 0..m {
                        data[(x * o + table[k * m + x]) * n + k] = p;
                    }
                }
                EdgeFactor { dim: n, data }
            })
            .collect();
        let values = contract(&self.scenario, &factors, &self.hub_table);
        CorrelationTensor::new(self.scenario.clone(), values)
    }

    /// The same form as a general model with deterministic edge responses.
    pub fn to_model(&self) -> DiscreteNLocalModel {
        let s = &self.scenario;
        let edge_responses = (0..s.edges())
            .map(|i| {
                let (o, m) = (s.edge_outcomes()[i], s.edge_inputs()[i]);
                let n = self.strategy_dists[i].len();
                let table = output_table(m, o);
                let mut data = vec![0.0; n * m * o];
                for k in 0..n {
                    for x in 0..m {
                        data[(k * m + x) * o + table[k * m + x]] = 1.0;
                    }
                }
                data
            })
            .collect();
        DiscreteNLocalModel {
            scenario: s.clone(),
            source_dists: self.strategy_dists.clone(),
            edge_responses,
            hub_response: self.hub_table.clone(),
        }
    }
}

/// Rewrites a model in canonical form: every edge response is decomposed
/// into deterministic strategies at each hidden value, and the hub table is
/// the conditional expectation of `P_B` given the strategy tuple (uniform
/// where the tuple has zero mass).
pub fn canonicalize(m: &DiscreteNLocalModel) -> Result<CanonicalNLocalForm> {
    let s = &m.scenario;
    let n = s.edges();
    let dims = canonical_dims(s)?;
    let (ob, mb) = (s.hub_outcomes(), s.hub_inputs());
    let hidden = m.source_dims();

    let mut decomps: Vec<Vec<Vec<RsTerm>>> = Vec::with_capacity(n);
    let mut pis = Vec::with_capacity(n);
    for i in 0..n {
        let mut pi = vec![0.0; dims[i]];
        let mut per_lambda = Vec::with_capacity(hidden[i]);
        for (lam, &q) in m.source_dists[i].iter().enumerate() {
            let terms = decompose_rs(&m.edge_matrix(i, lam), MODEL_TOL)?.terms;
            for t in &terms {
                pi[t.strategy] += q * t.weight;
            }
            per_lambda.push(terms);
        }
        decomps.push(per_lambda);
        pis.push(pi);
    }

    let kcount: usize = dims.iter().product();
    let mut num = vec![0.0; kcount * mb * ob];
    let mut lam = vec![0usize; n];
    let mut lam_flat = 0;
    let mut radices = vec![0usize; n];
    let mut pick = vec![0usize; n];
    let mut ks = vec![0usize; n];
    loop {
        let w: f64 = (0..n).map(|i| m.source_dists[i][lam[i]]).product();
        if w > 0.0 {
            for i in 0..n {
                radices[i] = decomps[i][lam[i]].len();
            }
            pick.fill(0);
            loop {
                let mut c = w;
                for i in 0..n {
                    let t = decomps[i][lam[i]][pick[i]];
                    c *= t.weight;
                    ks[i] = t.strategy;
                }
                let k = index::join(&ks, &dims);
                let src = &m.hub_response[lam_flat * mb * ob..(lam_flat + 1) * mb * ob];
                for (acc, v) in num[k * mb * ob..(k + 1) * mb * ob].iter_mut().zip(src) {
                    *acc += c * v;
                }
                if !index::advance(&mut pick, &radices) {
                    break;
                }
            }
        }
        lam_flat += 1;
        if !index::advance(&mut lam, &hidden) {
            break;
        }
    }

    let mut kd = vec![0usize; n];
    for k in 0..kcount {
        index::split(k, &dims, &mut kd);
        let mass: f64 = (0..n).map(|i| pis[i][kd[i]]).product();
        for y in 0..mb {
            let row = &mut num[(k * mb + y) * ob..(k * mb + y + 1) * ob];
            let sum: f64 = row.iter().sum();
            if mass > 0.0 && sum > 0.0 {
                row.iter_mut().for_each(|v| *v /= sum);
            } else {
                row.fill(1.0 / ob as f64);
            }
        }
    }
    CanonicalNLocalForm::new(s.clone(), pis, num)
}

/// Bell-local weights `q(k, j) = Π π_i(k_i) · p(j|k)` over edge strategy
/// tuples `k` and hub strategies `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExpansionRepr", into = "ExpansionRepr")]
pub struct FullExpansion {
    scenario: Scenario,
    strategy_dists: Vec<Vec<f64>>,
    hub_strategy_dists: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ExpansionRepr {
    scenario: Scenario,
    strategy_encoding: String,
    strategy_dims: Vec<usize>,
    hub_strategy_dim: usize,
    #[serde(serialize_with = "crate::codec::precise::serialize_nested")]
    strategy_dists: Vec<Vec<f64>>,
    /// `p(j|k)` at `k * N_B + j`.
    #[serde(serialize_with = "crate::codec::precise::serialize")]
    hub_strategy_dists: Vec<f64>,
}

impl TryFrom<ExpansionRepr> for FullExpansion {
    type Error = Error;

    fn try_from(r: ExpansionRepr) -> Result<Self> {
        if r.strategy_encoding != STRATEGY_ENCODING {
            return Err(Error::Codec("unexpected strategy encoding".into()));
        }
        let e = FullExpansion::new(r.scenario, r.strategy_dists, r.hub_strategy_dists)?;
        if e.strategy_dims() != r.strategy_dims || e.hub_strategy_dim() != r.hub_strategy_dim {
            return Err(Error::Codec(
                "declared dimensions disagree with data".into(),
            ));
        }
        Ok(e)
    }
}

impl From<FullExpansion> for ExpansionRepr {
    fn from(e: FullExpansion) -> Self {
        ExpansionRepr {
            strategy_encoding: STRATEGY_ENCODING.into(),
            strategy_dims: e.strategy_dims(),
            hub_strategy_dim: e.hub_strategy_dim(),
            scenario: e.scenario,
            strategy_dists: e.strategy_dists,
            hub_strategy_dists: e.hub_strategy_dists,
        }
    }
}

impl FullExpansion {
    pub fn new(
        scenario: Scenario,
        strategy_dists: Vec<Vec<f64>>,
        hub_strategy_dists: Vec<f64>,
    ) -> Result<Self> {
        let dims = canonical_dims(&scenario)?;
        if strategy_dists.iter().map(Vec::len).ne(dims.iter().copied()) {
            return Err(Error::Shape {
                expected: dims.len(),
                found: strategy_dists.len(),
            });
        }
        for (i, pi) in strategy_dists.iter().enumerate() {
            check_pd(&format!("strategy distribution {}", i + 1), pi)?;
        }
        let nb = scenario.strategy_count(Party::Hub);
        check_rows(
            "hub strategy distribution",
            &hub_strategy_dists,
            nb,
            dims.iter().product(),
        )?;
        Ok(FullExpansion {
            scenario,
            strategy_dists,
            hub_strategy_dists,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn strategy_dims(&self) -> Vec<usize> {
        self.strategy_dists.iter().map(Vec::len).collect()
    }

    pub fn hub_strategy_dim(&self) -> usize {
        self.scenario.strategy_count(Party::Hub)
    }

    pub fn strategy_dist(&self, i: usize) -> &[f64] {
        &self.strategy_dists[i]
    }

    /// `p(j | k)` for the flat edge-strategy tuple `k`.
    pub fn hub_strategy_dist(&self, k: usize) -> &[f64] {
        let nb = self.hub_strategy_dim();
        &self.hub_strategy_dists[k * nb..(k + 1) * nb]
    }

    /// `q(k, j)` for edge strategy digits `k`.
    pub fn weight(&self, k: &[usize], j: usize) -> f64 {
        let dims = self.strategy_dims();
        let pi: f64 = k
            .iter()
            .enumerate()
            .map(|(i, &ki)| self.strategy_dists[i][ki])
            .product();
        pi * self.hub_strategy_dist(index::join(k, &dims))[j]
    }

    /// Every nonzero weight as `(edge strategies, hub strategy, q)`.
    pub fn nonzero_weights(&self) -> Vec<(Vec<usize>, usize, f64)> {
        let dims = self.strategy_dims();
        let nb = self.hub_strategy_dim();
        let mut out = Vec::new();
        let mut k = vec![0usize; dims.len()];
        let mut flat = 0;
        loop {
            let pi: f64 = k
                .iter()
                .enumerate()
                .map(|(i, &ki)| self.strategy_dists[i][ki])
                .product();
            if pi > 0.0 {
                for j in 0..nb {
                    let q = pi * self.hub_strategy_dists[flat * nb + j];
                    if q > 0.0 {
                        out.push((k.clone(), j, q));
                    }
                }
            }
            flat += 1;
            if !index::advance(&mut k, &dims) {
                break;
            }
        }
        out
    }

    /// `Σ q(k, j) · D_{k, j}`.
    pub fn tensor(&self) -> Result<CorrelationTensor> {
        let s = &self.scenario;
        let parties: Vec<Party> = s.parties().collect();
        let tables: Vec<Vec<usize>> = parties
            .iter()
            .map(|&p| output_table(s.inputs(p), s.outcomes(p)))
            .collect();
        let m = s.input_radices();
        let o = s.outcome_radices();
        let outs = s.output_tuples();
        let mut values = vec![0.0; s.len()];
        let mut x = vec![0usize; m.len()];
        let mut a = vec![0usize; m.len()];
        for (k, j, q) in self.nonzero_weights() {
            let strategies: Vec<usize> = k.iter().copied().chain([j]).collect();
            x.fill(0);
            let mut in_flat = 0;
            loop {
                for p in 0..m.len() {
                    a[p] = tables[p][strategies[p] * m[p] + x[p]];
                }
                values[index::join(&a, &o) + outs * in_flat] += q;
                in_flat += 1;
                if !index::advance(&mut x, &m) {
                    break;
                }
            }
        }
        CorrelationTensor::new(s.clone(), values)
    }
}

/// Decomposes each hub row block of a canonical form into hub strategies.
pub fn expand_full(c: &CanonicalNLocalForm) -> Result<FullExpansion> {
    let s = &c.scenario;
    let (ob, mb) = (s.hub_outcomes(), s.hub_inputs());
    let kcount: usize = c.strategy_dims().iter().product();
    let nb = s.strategy_count(Party::Hub);
    let mut p = Vec::with_capacity(kcount * nb);
    for k in 0..kcount {
        let block = &c.hub_table[k * mb * ob..(k + 1) * mb * ob];
        let b = ResponseMatrix::new(mb, ob, block.to_vec())?;
        p.extend(decompose_rs(&b, MODEL_TOL)?.dense_weights());
    }
    FullExpansion::new(s.clone(), c.strategy_dists.clone(), p)
}

/// Three sources on a triangle: `λ_1` feeds A and B, `λ_2` feeds B and C,
/// `λ_3` feeds C and A. No inputs.
///
/// ```text
/// P_A(a | λ_3, λ_1) at (λ_3 * n_1 + λ_1) * o_A + a
/// P_B(b | λ_1, λ_2) at (λ_1 * n_2 + λ_2) * o_B + b
/// P_C(c | λ_2, λ_3) at (λ_2 * n_3 + λ_3) * o_C + c
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TriangleRepr", into = "TriangleRepr")]
pub struct TriangleModel {
    outcomes: [usize; 3],
    source_dists: [Vec<f64>; 3],
    responses: [Vec<f64>; 3],
}

#[derive(Serialize, Deserialize)]
struct TriangleRepr {
    /// `[o_A, o_B, o_C]`.
    outcomes: [usize; 3],
    source_dims: [usize; 3],
    #[serde(serialize_with = "crate::codec::precise::serialize_nested")]
    source_dists: [Vec<f64>; 3],
    /// `[P_A, P_B, P_C]`.
    #[serde(serialize_with = "crate::codec::precise::serialize_nested")]
    responses: [Vec<f64>; 3],
}

impl TryFrom<TriangleRepr> for TriangleModel {
    type Error = Error;

    fn try_from(r: TriangleRepr) -> Result<Self> {
        if r.source_dists.iter().map(Vec::len).ne(r.source_dims) {
            return Err(Error::Codec(
                "source_dims disagree with source_dists".into(),
            ));
        }
        TriangleModel::new(r.outcomes, r.source_dists, r.responses)
    }
}

impl From<TriangleModel> for TriangleRepr {
    fn from(t: TriangleModel) -> Self {
        TriangleRepr {
            outcomes: t.outcomes,
            source_dims: t.source_dims(),
            source_dists: t.source_dists,
            responses: t.responses,
        }
    }
}

impl TriangleModel {
    pub fn new(
        outcomes: [usize; 3],
        source_dists: [Vec<f64>; 3],
        responses: [Vec<f64>; 3],
    ) -> Result<Self> {
        if outcomes.contains(&0) {
            return Err(Error::Scenario(
                "all outcome counts must be at least 1".into(),
            ));
        }
        for (i, q) in source_dists.iter().enumerate() {
            check_pd(&format!("source {}", i + 1), q)?;
        }
        let d = [
            source_dists[0].len(),
            source_dists[1].len(),
            source_dists[2].len(),
        ];
        for (p, name) in ["A", "B", "C"].iter().enumerate() {
            // A sees (λ_3, λ_1), B (λ_1, λ_2), C (λ_2, λ_3).
            let rows = d[(p + 2) % 3] * d[p];
            check_rows(
                &format!("response {name}"),
                &responses[p],
                outcomes[p],
                rows,
            )?;
        }
        Ok(TriangleModel {
            outcomes,
            source_dists,
            responses,
        })
    }

    /// A bilocal PT model with the third source trivial.
    pub fn from_bilocal(m: &DiscreteNLocalModel) -> Result<Self> {
        let s = m.scenario();
        if m.edges() != 2 || !s.is_probability() {
            return Err(Error::Scenario(
                "triangle embedding needs a two-edge model without inputs".into(),
            ));
        }
        let (d1, d2, ob) = (
            m.source_dist(0).len(),
            m.source_dist(1).len(),
            s.hub_outcomes(),
        );
        // star hub index λ_1 + d_1 λ_2, triangle B index λ_1 n_2 + λ_2
        let mut pb = vec![0.0; d1 * d2 * ob];
        for l1 in 0..d1 {
            for l2 in 0..d2 {
                let src = (l1 + d1 * l2) * ob;
                pb[(l1 * d2 + l2) * ob..(l1 * d2 + l2 + 1) * ob]
                    .copy_from_slice(&m.hub_response()[src..src + ob]);
            }
        }
        TriangleModel::new(
            [s.edge_outcomes()[0], ob, s.edge_outcomes()[1]],
            [
                m.source_dist(0).to_vec(),
                m.source_dist(1).to_vec(),
                vec![1.0],
            ],
            [m.edge_response(0).to_vec(), pb, m.edge_response(1).to_vec()],
        )
    }

    pub fn outcomes(&self) -> [usize; 3] {
        self.outcomes
    }

    pub fn source_dims(&self) -> [usize; 3] {
        [
            self.source_dists[0].len(),
            self.source_dists[1].len(),
            self.source_dists[2].len(),
        ]
    }

    pub fn source_dist(&self, k: usize) -> &[f64] {
        &self.source_dists[k]
    }

    pub fn response(&self, party: usize) -> &[f64] {
        &self.responses[party]
    }
}

/// `P(a,b,c) = Σ q_1 q_2 q_3 P_A(a|λ_3λ_1) P_B(b|λ_1λ_2) P_C(c|λ_2λ_3)`,
/// returned as a PT over edges `(A, C)` and hub `B`.
pub fn evaluate_triangle(m: &TriangleModel) -> Result<CorrelationTensor> {
    let [oa, ob, oc] = m.outcomes;
    let [n1, n2, n3] = m.source_dims();
    let [q1, q2, q3] = &m.source_dists;
    let [pa, pb, pc] = &m.responses;
    let mut values = vec![0.0; oa * ob * oc];
    for l1 in 0..n1 {
        for l2 in 0..n2 {
            let w12 = q1[l1] * q2[l2];
            if w12 == 0.0 {
                continue;
            }
            let rb = &pb[(l1 * n2 + l2) * ob..(l1 * n2 + l2 + 1) * ob];
            for l3 in 0..n3 {
                let w = w12 * q3[l3];
                if w == 0.0 {
                    continue;
                }
                let ra = &pa[(l3 * n1 + l1) * oa..(l3 * n1 + l1 + 1) * oa];
                let rc = &pc[(l2 * n3 + l3) * oc..(l2 * n3 + l3 + 1) * oc];
                for (b, &vb) in rb.iter().enumerate() {
                    for (c, &vc) in rc.iter().enumerate() {
                        for (a, &va) in ra.iter().enumerate() {
                            values[a + oa * (c + oc * b)] += w * va * vb * vc;
                        }
                    }
                }
            }
        }
    }
    CorrelationTensor::new(Scenario::probability(vec![oa, oc], ob)?, values)
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(format!("t = {t} is outside [0, 1]")));
    }
    Ok(())
}

/// The sun `S_k`: edge marginals of `m` on every edge but `k`, uniform on
/// edge `k` and on the hub.
pub fn sun(m: &DiscreteNLocalModel, k: usize) -> Result<CorrelationTensor> {
    let s = m.scenario();
    if k >= s.edges() {
        return Err(Error::OutOfRange(format!("edge {k} of {}", s.edges())));
    }
    let mut factors: Vec<ResponseMatrix> = (0..s.edges())
        .map(|i| {
            if i == k {
                ResponseMatrix::uniform(s.edge_inputs()[i], s.edge_outcomes()[i])
            } else {
                m.edge_marginal(i)
            }
        })
        .collect();
    factors.push(ResponseMatrix::uniform(s.hub_inputs(), s.hub_outcomes()));
    product_ct(&factors)
}

/// Model evaluating to `(1 - t) S_k + t · evaluate(m)`: source `k` gains a
/// coin `s`, and `s = 0` switches edge `k` and the hub to uniform noise.
///
/// Hidden value `(λ_k, s)` is stored at `λ_k + d_k s`.
pub fn star_mix(m: &DiscreteNLocalModel, k: usize, t: f64) -> Result<DiscreteNLocalModel> {
    check_t(t)?;
    let s = m.scenario();
    let n = s.edges();
    if k >= n {
        return Err(Error::OutOfRange(format!("edge {k} of {n}")));
    }
    let dims = m.source_dims();
    let (ok, mk) = (s.edge_outcomes()[k], s.edge_inputs()[k]);
    let (ob, mb) = (s.hub_outcomes(), s.hub_inputs());

    let mut sources = m.source_dists.clone();
    let qk = &m.source_dists[k];
    sources[k] = qk
        .iter()
        .map(|q| (1.0 - t) * q)
        .chain(qk.iter().map(|q| t * q))
        .collect();

    let mut edges = m.edge_responses.clone();
    edges[k] = uniform_rows(dims[k] * mk, ok);
    edges[k].extend_from_slice(&m.edge_responses[k]);

    let mut new_dims = dims.clone();
    new_dims[k] *= 2;
    let hidden: usize = new_dims.iter().product();
    let mut hub = Vec::with_capacity(hidden * mb * ob);
    let mut lam = vec![0usize; n];
    loop {
        if lam[k] < dims[k] {
            hub.extend(std::iter::repeat_n(1.0 / ob as f64, mb * ob));
        } else {
            let mut orig = lam.clone();
            orig[k] -= dims[k];
            let f = index::join(&orig, &dims);
            hub.extend_from_slice(&m.hub_response[f * mb * ob..(f + 1) * mb * ob]);
        }
        if !index::advance(&mut lam, &new_dims) {
            break;
        }
    }
    DiscreteNLocalModel::new(s.clone(), sources, edges, hub)
}

fn blend(rows: &[f64], outcomes: usize, s: f64) -> Vec<f64> {
    let u = 1.0 / outcomes as f64;
    rows.iter().map(|v| (1.0 - s) * v + s * u).collect()
}

fn noisy(m: &DiscreteNLocalModel, s: f64) -> DiscreteNLocalModel {
    let sc = &m.scenario;
    DiscreteNLocalModel {
        scenario: sc.clone(),
        source_dists: m.source_dists.clone(),
        edge_responses: m
            .edge_responses
            .iter()
            .zip(sc.edge_outcomes())
            .map(|(r, &o)| blend(r, o, s))
            .collect(),
        hub_response: blend(&m.hub_response, sc.hub_outcomes(), s),
    }
}

/// A point on a path from `evaluate(mp)` (t = 0) through the uniform tensor
/// (t = 1/2) to `evaluate(mq)` (t = 1). Every response is blended with
/// uniform noise; sources come from `mp` on the first half and `mq` on the
/// second.
pub fn path_point(
    mp: &DiscreteNLocalModel,
    mq: &DiscreteNLocalModel,
    t: f64,
) -> Result<DiscreteNLocalModel> {
    check_t(t)?;
    if mp.scenario != mq.scenario {
        return Err(Error::ScenarioMismatch(
            "path endpoints differ in scenario".into(),
        ));
    }
    Ok(if t <= 0.5 {
        noisy(mp, 2.0 * t)
    } else {
        noisy(mq, 2.0 * (1.0 - t))
    })
}

/// Swaps a tripartite tensor's hub with `new_hub`, so bilocality with
/// another party in the middle becomes ordinary bilocality.
pub fn relabel_hub(t: &CorrelationTensor, new_hub: Party) -> Result<CorrelationTensor> {
    let s = t.scenario();
    if s.edges() != 2 {
        return Err(Error::Scenario(format!(
            "hub relabeling is defined for tripartite tensors, got {} edges",
            s.edges()
        )));
    }
    let e = match new_hub {
        Party::Hub => return Ok(t.clone()),
        Party::Edge(e) if e < 2 => e,
        Party::Edge(e) => return Err(Error::OutOfRange(format!("edge {e} of 2"))),
    };
    let mut eo = s.edge_outcomes().to_vec();
    let mut ei = s.edge_inputs().to_vec();
    eo[e] = s.hub_outcomes();
    ei[e] = s.hub_inputs();
    let ns = Scenario::new(eo, ei, s.edge_outcomes()[e], s.edge_inputs()[e])?;
    let mut oa = [0usize; 3];
    let mut ox = [0usize; 3];
    CorrelationTensor::from_fn(ns, |a, x| {
        oa.copy_from_slice(a);
        ox.copy_from_slice(x);
        oa.swap(e, 2);
        ox.swap(e, 2);
        t.get(&oa, &ox)
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::tensor::{distance, marginal, nonsignaling_check, uniform_ct, validate, Tolerances};

    fn rm(rows: &[&[f64]]) -> ResponseMatrix {
        ResponseMatrix::from_rows(rows).unwrap()
    }

    // q_1 = q_2 uniform on {0,1}, A = λ_1, C = λ_2, B = λ_1 xor λ_2, at 2/2/2.
    pub(crate) fn parity_model() -> DiscreteNLocalModel {
        let s = Scenario::homogeneous(2, 2, 2).unwrap();
        let delta = |lam: usize| -> Vec<f64> {
            let mut r = [0.0; 2];
            r[lam] = 1.0;
            r.repeat(2)
        };
        let edge: Vec<f64> = (0..2).flat_map(delta).collect();
        let hub: Vec<f64> = (0..4).flat_map(|l| delta((l % 2) ^ (l / 2))).collect();
        DiscreteNLocalModel::new(s, vec![vec![0.5, 0.5]; 2], vec![edge.clone(), edge], hub).unwrap()
    }

    fn brute(m: &DiscreteNLocalModel) -> CorrelationTensor {
        let s = m.scenario().clone();
        let dims = m.source_dims();
        let (ob, mb) = (s.hub_outcomes(), s.hub_inputs());
        CorrelationTensor::from_fn(s.clone(), |a, x| {
            let n = s.edges();
            let mut total = 0.0;
            let mut lam = vec![0; n];
            loop {
                let mut v = 1.0;
                for i in 0..n {
                    let (o, mi) = (s.edge_outcomes()[i], s.edge_inputs()[i]);
                    v *= m.source_dist(i)[lam[i]]
                        * m.edge_response(i)[(lam[i] * mi + x[i]) * o + a[i]];
                }
                let l = index::join(&lam, &dims);
                total += v * m.hub_response()[(l * mb + x[n]) * ob + a[n]];
                if !index::advance(&mut lam, &dims) {
                    break;
                }
            }
            total
        })
        .unwrap()
    }

    #[test]
    fn parity_model_matches_oracle() {
        let m = parity_model();
        let t = evaluate_bilocal(&m).unwrap();
        assert_eq!(t, brute(&m));
        t.for_each(|a, _, v| {
            let want = if a[2] == a[0] ^ a[1] { 0.25 } else { 0.0 };
            assert_eq!(v, want);
        });
        let ac = marginal(&t, &[Party::Edge(0), Party::Edge(1)], 1e-12)
            .unwrap()
            .tensor;
        ac.for_each(|_, _, v| assert_eq!(v, 0.25));
        assert!(nonsignaling_check(&t, &Tolerances::default()).max_signaling_defect <= 1e-12);
    }

    #[test]
    fn trivial_sources_give_product() {
        let pa = rm(&[&[0.3, 0.7], &[0.9, 0.1]]);
        let pc = rm(&[&[0.5, 0.5], &[0.2, 0.8]]);
        let pb = rm(&[&[0.6, 0.4], &[0.0, 1.0]]);
        let m = DiscreteNLocalModel::product(&[pa.clone(), pc.clone()], &pb).unwrap();
        let t = evaluate_nlocal(&m).unwrap();
        assert!(
            distance(&t, &product_ct(&[pa, pc, pb]).unwrap())
                .unwrap()
                .max_abs
                <= 1e-15
        );
    }

    #[test]
    fn uniform_product_is_uniform() {
        let u = ResponseMatrix::uniform(2, 3);
        let m = DiscreteNLocalModel::product(&[u.clone(), u.clone()], &u).unwrap();
        let t = evaluate_bilocal(&m).unwrap();
        assert!(distance(&t, &uniform_ct(t.scenario())).unwrap().max_abs <= 1e-15);
    }

    #[test]
    fn rejects_bad_distributions() {
        let s = Scenario::homogeneous(1, 2, 1).unwrap();
        let err = DiscreteNLocalModel::new(
            s.clone(),
            vec![vec![0.6, 0.6]],
            vec![vec![1.0, 0.0, 1.0, 0.0]],
            vec![0.5; 8],
        );
        assert!(matches!(err, Err(Error::Distribution(_))));
        let err = DiscreteNLocalModel::new(s, vec![vec![1.0]], vec![vec![1.0, 0.0]], vec![0.5; 3]);
        assert!(matches!(err, Err(Error::Shape { .. })));
    }

    #[test]
    fn parity_canonical_form() {
        let m = parity_model();
        let c = canonicalize(&m).unwrap();
        assert_eq!(c.strategy_dims(), vec![4, 4]);
        // constant-0 is strategy 0, constant-1 is strategy 3
        for i in 0..2 {
            assert_eq!(c.strategy_dist(i), &[0.5, 0.0, 0.0, 0.5]);
        }
        for (k1, k2) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            let b = (k1 / 3) ^ (k2 / 3);
            for y in 0..2 {
                let row = c.hub_row(k1 + 4 * k2, y);
                assert_eq!(row[b], 1.0);
                assert_eq!(row[1 - b], 0.0);
            }
        }
        assert_eq!(c.hub_row(1 + 4 * 2, 0), &[0.5, 0.5]);
        let d = distance(&c.evaluate().unwrap(), &evaluate_nlocal(&m).unwrap()).unwrap();
        assert!(d.max_abs <= 1e-15);
    }

    #[test]
    fn canonical_form_is_fixed_point() {
        let c = canonicalize(&parity_model()).unwrap();
        let again = canonicalize(&c.to_model()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn zero_mass_source_value_falls_back_to_uniform() {
        let s = Scenario::homogeneous(1, 2, 1).unwrap();
        // λ = 1 carries no mass and would answer 1; only strategy 0 survives
        let m = DiscreteNLocalModel::new(
            s,
            vec![vec![1.0, 0.0]],
            vec![vec![1.0, 0.0, 0.0, 1.0]],
            vec![0.2, 0.8, 0.9, 0.1],
        )
        .unwrap();
        let c = canonicalize(&m).unwrap();
        assert_eq!(c.strategy_dist(0), &[1.0, 0.0]);
        assert_eq!(c.hub_row(0, 0), &[0.2, 0.8]);
        assert_eq!(c.hub_row(1, 0), &[0.5, 0.5]);
    }

    #[test]
    fn parity_expansion_has_four_quarter_weights() {
        let c = canonicalize(&parity_model()).unwrap();
        let e = expand_full(&c).unwrap();
        let w = e.nonzero_weights();
        assert_eq!(w.len(), 4);
        for (k, j, q) in &w {
            assert_eq!(*q, 0.25);
            // hub strategy answers the parity for both inputs
            let b = (k[0] / 3) ^ (k[1] / 3);
            assert_eq!(*j, b * 3);
        }
        assert!(
            distance(&e.tensor().unwrap(), &c.evaluate().unwrap())
                .unwrap()
                .max_abs
                <= 1e-15
        );
    }

    #[test]
    fn expansion_of_uniform_single_input_hub() {
        let s = Scenario::new(vec![2], vec![1], 2, 1).unwrap();
        let c = CanonicalNLocalForm::new(s, vec![vec![1.0, 0.0]], vec![0.5; 4]).unwrap();
        let e = expand_full(&c).unwrap();
        assert_eq!(e.hub_strategy_dist(0), &[0.5, 0.5]);
    }

    #[test]
    fn triangle_embeds_bilocal() {
        let s = Scenario::probability(vec![2, 3], 2).unwrap();
        let m = DiscreteNLocalModel::new(
            s,
            vec![vec![0.25, 0.75], vec![0.5, 0.5]],
            vec![vec![0.1, 0.9, 0.6, 0.4], vec![0.2, 0.3, 0.5, 1.0, 0.0, 0.0]],
            vec![0.3, 0.7, 1.0, 0.0, 0.0, 1.0, 0.45, 0.55],
        )
        .unwrap();
        let tri = evaluate_triangle(&TriangleModel::from_bilocal(&m).unwrap()).unwrap();
        assert!(
            distance(&tri, &evaluate_bilocal(&m).unwrap())
                .unwrap()
                .max_abs
                <= 1e-15
        );
    }

    #[test]
    fn triangle_brute_force() {
        // q_k uniform on {0,1}; A = λ_1, B = λ_1 xor λ_2, C = λ_2 xor λ_3
        let id = |f: &dyn Fn(usize, usize) -> usize| -> Vec<f64> {
            (0..4)
                .flat_map(|r| {
                    let mut v = vec![0.0; 2];
                    v[f(r / 2, r % 2)] = 1.0;
                    v
                })
                .collect()
        };
        let m = TriangleModel::new(
            [2, 2, 2],
            [vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]],
            [
                id(&|_, l1| l1),
                id(&|l1, l2| l1 ^ l2),
                id(&|l2, l3| l2 ^ l3),
            ],
        )
        .unwrap();
        let t = evaluate_triangle(&m).unwrap();
        t.for_each(|o, _, v| {
            let (a, c, b) = (o[0], o[1], o[2]);
            let mut want = 0.0;
            for l in 0..8 {
                let (l1, l2, l3) = (l & 1, (l >> 1) & 1, l >> 2);
                if a == l1 && b == l1 ^ l2 && c == l2 ^ l3 {
                    want += 0.125;
                }
            }
            assert_eq!(v, want);
        });
    }

    #[test]
    fn star_mix_half_on_parity() {
        let m = parity_model();
        let mixed = star_mix(&m, 1, 0.5).unwrap();
        let got = evaluate_nlocal(&mixed).unwrap();
        let want = crate::tensor::mix(&[
            (0.5, &sun(&m, 1).unwrap()),
            (0.5, &evaluate_nlocal(&m).unwrap()),
        ])
        .unwrap();
        assert!(distance(&got, &want).unwrap().max_abs <= 1e-12);
        assert_eq!(mixed.source_dims(), vec![2, 4]);
    }

    #[test]
    fn star_mix_endpoints() {
        let m = parity_model();
        let t = evaluate_nlocal(&m).unwrap();
        let one = evaluate_nlocal(&star_mix(&m, 0, 1.0).unwrap()).unwrap();
        let zero = evaluate_nlocal(&star_mix(&m, 0, 0.0).unwrap()).unwrap();
        assert!(distance(&one, &t).unwrap().max_abs <= 1e-15);
        assert!(distance(&zero, &sun(&m, 0).unwrap()).unwrap().max_abs <= 1e-15);
        assert!(star_mix(&m, 0, 1.5).is_err());
    }

    #[test]
    fn path_midpoint_is_uniform() {
        let m = parity_model();
        let d = DiscreteNLocalModel::product(
            &[
                rm(&[&[1.0, 0.0], &[0.0, 1.0]]),
                rm(&[&[0.0, 1.0], &[0.0, 1.0]]),
            ],
            &rm(&[&[1.0, 0.0], &[1.0, 0.0]]),
        )
        .unwrap();
        let mid = evaluate_nlocal(&path_point(&m, &d, 0.5).unwrap()).unwrap();
        assert!(distance(&mid, &uniform_ct(m.scenario())).unwrap().max_abs <= 1e-15);
        let end = evaluate_nlocal(&path_point(&m, &d, 1.0).unwrap()).unwrap();
        assert_eq!(end, evaluate_nlocal(&d).unwrap());
        let start = evaluate_nlocal(&path_point(&m, &d, 0.0).unwrap()).unwrap();
        assert_eq!(start, evaluate_nlocal(&m).unwrap());
    }

    #[test]
    fn path_quarter_on_deterministic_product() {
        let da = rm(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let dc = rm(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let u = ResponseMatrix::uniform(2, 2);
        let m = DiscreteNLocalModel::product(&[da.clone(), dc.clone()], &u).unwrap();
        let t = evaluate_nlocal(&path_point(&m, &m, 0.25).unwrap()).unwrap();
        let half = |r: &ResponseMatrix| {
            ResponseMatrix::new(2, 2, r.data().iter().map(|v| 0.5 * v + 0.25).collect()).unwrap()
        };
        let want = product_ct(&[half(&da), half(&dc), u]).unwrap();
        assert!(distance(&t, &want).unwrap().max_abs <= 1e-15);
        assert!(validate(&t, &Tolerances::default()).ok);
    }

    #[test]
    fn relabel_is_involution() {
        let t = crate::examples::not_bilocal();
        assert_eq!(relabel_hub(&t, Party::Hub).unwrap(), t);
        for e in 0..2 {
            let r = relabel_hub(&t, Party::Edge(e)).unwrap();
            assert_eq!(relabel_hub(&r, Party::Edge(e)).unwrap(), t);
        }
        let r = relabel_hub(&t, Party::Edge(0)).unwrap();
        // (a, c, b | x, z, y) -> (b, c, a | y, z, x)
        assert_eq!(r.get(&[1, 0, 0], &[0, 1, 1]), t.get(&[0, 0, 1], &[1, 1, 0]));
        let four = crate::tensor::Scenario::homogeneous(3, 2, 1).unwrap();
        assert!(relabel_hub(&uniform_ct(&four), Party::Edge(0)).is_err());
    }
}
