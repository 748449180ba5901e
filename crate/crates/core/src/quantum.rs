//! Separable quantum realizations of star-network correlations.
//!
//! Source `i` prepares a separable state on `H_{A_i} ⊗ H_{B_i}`; party
//! `A_i` measures `H_{A_i}` and the hub measures `H_{B_1} ⊗ .. ⊗ H_{B_n}`.
//! Kronecker products put the first factor in the most significant digit.
//! The wiring maps the state order `(A_1 B_1)(A_2 B_2)..` onto the
//! measurement order `A_1 .. A_n B_1 .. B_n`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contract::{contract, EdgeFactor};
use crate::error::{Error, Result};
use crate::index;
use crate::models::{CanonicalNLocalForm, DiscreteNLocalModel};
use crate::strategies::output_table;
use crate::tensor::{CorrelationTensor, Scenario};

/// Product dimension beyond which dense operators and the full trace are refused.
pub const DENSE_CAP: usize = 4096;

/// A Hermitian operator, stored either as a real diagonal or densely
/// (row-major, complex entries as `[re, im]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum Operator {
    Diagonal {
        #[serde(serialize_with = "crate::codec::precise::serialize")]
        diag: Vec<f64>,
    },
    Dense {
        dim: usize,
        entries: Vec<Complex64>,
    },
}

impl Operator {
    pub fn diagonal(diag: Vec<f64>) -> Self {
        Operator::Diagonal { diag }
    }

    pub fn dense(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim > DENSE_CAP {
            return Err(Error::CapExceeded {
                what: "dense operator dimension",
                size: dim,
                cap: DENSE_CAP,
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Operator::Dense { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        Operator::Diagonal {
            diag: vec![1.0; dim],
        }
    }

    pub fn from_matrix(m: &DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Realization("operator must be square".into()));
        }
        let dim = m.nrows();
        Operator::dense(dim, (0..dim * dim).map(|k| m[(k / dim, k % dim)]).collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::Diagonal { diag } => diag.len(),
            Operator::Dense { dim, .. } => *dim,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Operator::Diagonal { .. })
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        match self {
            Operator::Diagonal { diag } => {
                if r == c {
                    Complex64::new(diag[r], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Operator::Dense { dim, entries } => entries[r * dim + c],
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Operator::Diagonal { diag } => Operator::Diagonal {
                diag: diag.iter().map(|v| v * s).collect(),
            },
            Operator::Dense { dim, entries } => Operator::Dense {
                dim: *dim,
                entries: entries.iter().map(|v| v * s).collect(),
            },
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        let d = self.dim();
        if d > DENSE_CAP {
            return Err(Error::CapExceeded {
                what: "dense operator dimension",
                size: d,
                cap: DENSE_CAP,
            });
        }
        Ok(DMatrix::from_fn(d, d, |r, c| self.entry(r, c)))
    }

    /// Nonzero entries as `(row, col, value)`.
    fn nonzeros(&self) -> Vec<(usize, usize, Complex64)> {
        match self {
            Operator::Diagonal { diag } => diag
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, &v)| (i, i, Complex64::new(v, 0.0)))
                .collect(),
            Operator::Dense { dim, entries } => entries
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
                .map(|(k, &v)| (k / dim, k % dim, v))
                .collect(),
        }
    }

    /// `⟨v|O|v⟩` (real part).
    fn expectation(&self, v: &[Complex64]) -> f64 {
        match self {
            Operator::Diagonal { diag } => diag.iter().zip(v).map(|(d, c)| d * c.norm_sqr()).sum(),
            Operator::Dense { dim, entries } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..*dim {
                    for c in 0..*dim {
                        acc += v[r].conj() * entries[r * dim + c] * v[c];
                    }
                }
                acc.re
            }
        }
    }
}

/// One term `w |a⟩⟨a| ⊗ |b⟩⟨b|` of a separable decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub weight: f64,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

/// A state on `H_A ⊗ H_B` together with the separable decomposition it was
/// built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableState {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: Operator,
    pub decomposition: Vec<ProductTerm>,
}

impl SeparableState {
    /// `Σ w |a⟩⟨a| ⊗ |b⟩⟨b|`, stored diagonally when every factor is a
    /// basis vector up to phase.
    pub fn from_terms(dim_a: usize, dim_b: usize, terms: Vec<ProductTerm>) -> Result<Self> {
        let d = dim_a * dim_b;
        for t in &terms {
            if t.a.len() != dim_a || t.b.len() != dim_b {
                return Err(Error::Realization(
                    "product term has wrong factor dimension".into(),
                ));
            }
        }
        let basis_like = |v: &[Complex64]| v.iter().filter(|c| c.norm_sqr() != 0.0).count() <= 1;
        let matrix = if terms.iter().all(|t| basis_like(&t.a) && basis_like(&t.b)) {
            let mut diag = vec![0.0; d];
            for t in &terms {
                for (i, ai) in t.a.iter().enumerate() {
                    for (j, bj) in t.b.iter().enumerate() {
                        diag[i * dim_b + j] += t.weight * ai.norm_sqr() * bj.norm_sqr();
                    }
                }
            }
            Operator::diagonal(diag)
        } else {
            Operator::from_matrix(&decomposition_matrix(dim_a, dim_b, &terms)?)?
        };
        Ok(SeparableState {
            dim_a,
            dim_b,
            matrix,
            decomposition: terms,
        })
    }
}

fn decomposition_matrix(
    dim_a: usize,
    dim_b: usize,
    terms: &[ProductTerm],
) -> Result<DMatrix<Complex64>> {
    let d = dim_a * dim_b;
    if d > DENSE_CAP {
        return Err(Error::CapExceeded {
            what: "state dimension",
            size: d,
            cap: DENSE_CAP,
        });
    }
    let mut m = DMatrix::zeros(d, d);
    for t in terms {
        let v: Vec<Complex64> =
            t.a.iter()
                .flat_map(|ai| t.b.iter().map(move |bj| ai * bj))
                .collect();
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] += v[r] * v[c].conj() * t.weight;
            }
        }
    }
    Ok(m)
}

/// States, local measurements and the factor wiring of a star network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RealizationRepr")]
pub struct QuantumRealization {
    scenario: Scenario,
    states: Vec<SeparableState>,
    /// `edge_effects[i][x][a]` acts on `H_{A_i}`.
    edge_effects: Vec<Vec<Vec<Operator>>>,
    /// `hub_effects[y][b]` acts on `H_{B_1} ⊗ .. ⊗ H_{B_n}`.
    hub_effects: Vec<Vec<Operator>>,
    /// State factor `p` (order `A_1 B_1 A_2 B_2 ..`) sits in measurement slot `wiring[p]`.
    wiring: Vec<usize>,
}

#[derive(Deserialize)]
struct RealizationRepr {
    scenario: Scenario,
    states: Vec<SeparableState>,
    edge_effects: Vec<Vec<Vec<Operator>>>,
    hub_effects: Vec<Vec<Operator>>,
    wiring: Vec<usize>,
}

impl TryFrom<RealizationRepr> for QuantumRealization {
    type Error = Error;

    fn try_from(r: RealizationRepr) -> Result<Self> {
        QuantumRealization::new(
            r.scenario,
            r.states,
            r.edge_effects,
            r.hub_effects,
            r.wiring,
        )
    }
}

/// The wiring `(A_1 B_1)(A_2 B_2).. → A_1 .. A_n B_1 .. B_n`.
pub fn canonical_wiring(n: usize) -> Vec<usize> {
    (0..2 * n)
        .map(|p| if p % 2 == 0 { p / 2 } else { n + p / 2 })
        .collect()
}

impl QuantumRealization {
    pub fn new(
        scenario: Scenario,
        states: Vec<SeparableState>,
        edge_effects: Vec<Vec<Vec<Operator>>>,
        hub_effects: Vec<Vec<Operator>>,
        wiring: Vec<usize>,
    ) -> Result<Self> {
        let n = scenario.edges();
        let bad = |msg: String| Err(Error::Realization(msg));
        if states.len() != n || edge_effects.len() != n {
            return bad(format!("expected {n} states and edge measurement families"));
        }
        let mut seen = vec![false; 2 * n];
        if wiring.len() != 2 * n
            || wiring
                .iter()
                .any(|&w| w >= 2 * n || std::mem::replace(&mut seen[w], true))
        {
            return bad(format!(
                "wiring {wiring:?} is not a permutation of {} factors",
                2 * n
            ));
        }
        for (i, st) in states.iter().enumerate() {
            if st.matrix.dim() != st.dim_a * st.dim_b {
                return bad(format!("state {} has dimension {}", i + 1, st.matrix.dim()));
            }
        }
        let slot_dims = |w: &[usize]| -> Vec<usize> {
            let mut d = vec![0; 2 * n];
            for (p, &slot) in w.iter().enumerate() {
                let st = &states[p / 2];
                d[slot] = if p % 2 == 0 { st.dim_a } else { st.dim_b };
            }
            d
        };
        let dims = slot_dims(&wiring);
        for i in 0..n {
            let (o, m) = (scenario.edge_outcomes()[i], scenario.edge_inputs()[i]);
            let fam = &edge_effects[i];
            if fam.len() != m || fam.iter().any(|e| e.len() != o) {
                return bad(format!(
                    "edge {} needs {m} measurements with {o} outcomes",
                    i + 1
                ));
            }
            if fam.iter().flatten().any(|e| e.dim() != dims[i]) {
                return bad(format!(
                    "edge {} effects do not act on a {}-dimensional space",
                    i + 1,
                    dims[i]
                ));
            }
        }
        let hub_dim: usize = dims[n..].iter().product();
        let (ob, mb) = (scenario.hub_outcomes(), scenario.hub_inputs());
        if hub_effects.len() != mb || hub_effects.iter().any(|e| e.len() != ob) {
            return bad(format!("hub needs {mb} measurements with {ob} outcomes"));
        }
        if hub_effects.iter().flatten().any(|e| e.dim() != hub_dim) {
            return bad(format!(
                "hub effects do not act on a {hub_dim}-dimensional space"
            ));
        }
        Ok(QuantumRealization {
            scenario,
            states,
            edge_effects,
            hub_effects,
            wiring,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn states(&self) -> &[SeparableState] {
        &self.states
    }

    pub fn edge_effect(&self, i: usize, x: usize, a: usize) -> &Operator {
        &self.edge_effects[i][x][a]
    }

    pub fn hub_effect(&self, y: usize, b: usize) -> &Operator {
        &self.hub_effects[y][b]
    }

    pub fn wiring(&self) -> &[usize] {
        &self.wiring
    }

    /// Mutable access for building perturbed realizations.
    pub fn edge_effect_mut(&mut self, i: usize, x: usize, a: usize) -> &mut Operator {
        &mut self.edge_effects[i][x][a]
    }

    pub fn state_mut(&mut self, i: usize) -> &mut SeparableState {
        &mut self.states[i]
    }

    pub fn hub_effects_mut(&mut self) -> &mut Vec<Vec<Operator>> {
        &mut self.hub_effects
    }

    fn is_canonical(&self) -> bool {
        self.wiring == canonical_wiring(self.scenario.edges())
    }

    fn is_diagonal(&self) -> bool {
        self.states.iter().all(|s| s.matrix.is_diagonal())
            && self
                .edge_effects
                .iter()
                .flatten()
                .flatten()
                .all(Operator::is_diagonal)
            && self.hub_effects.iter().flatten().all(Operator::is_diagonal)
    }

    fn b_dims(&self) -> Vec<usize> {
        self.states.iter().map(|s| s.dim_b).collect()
    }
}

/// `H_{A_i} = H_{B_i} = C^{N_i}`, classically correlated states
/// `Σ_k π_i(k) |kk⟩⟨kk|`, edge effects projecting onto the strategies that
/// answer `a` on `x`, and hub effects `Σ_k P_B(b|y,k) |k⟩⟨k|`.
pub fn realize(c: &CanonicalNLocalForm) -> Result<QuantumRealization> {
    let s = c.scenario();
    let n = s.edges();
    let dims = c.strategy_dims();
    let mut states = Vec::with_capacity(n);
    let mut edge_effects = Vec::with_capacity(n);
    for (i, &d) in dims.iter().enumerate() {
        let terms = c
            .strategy_dist(i)
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let mut e = vec![Complex64::new(0.0, 0.0); d];
                e[k] = Complex64::new(1.0, 0.0);
                ProductTerm {
                    weight: p,
                    a: e.clone(),
                    b: e,
                }
            })
            .collect();
        states.push(SeparableState::from_terms(d, d, terms)?);
        let (o, m) = (s.edge_outcomes()[i], s.edge_inputs()[i]);
        let table = output_table(m, o);
        let fam = (0..m)
            .map(|x| {
                (0..o)
                    .map(|a| {
                        Operator::diagonal(
                            (0..d)
                                .map(|k| f64::from(u8::from(table[k * m + x] == a)))
                                .collect(),
                        )
                    })
                    .collect()
            })
            .collect();
        edge_effects.push(fam);
    }
    let (ob, mb) = (s.hub_outcomes(), s.hub_inputs());
    let kcount: usize = dims.iter().product();
    let mut digits = vec![0usize; n];
    let hub_effects = (0..mb)
        .map(|y| {
            (0..ob)
                .map(|b| {
                    let mut diag = vec![0.0; kcount];
                    for k in 0..kcount {
                        index::split(k, &dims, &mut digits);
                        diag[big_endian(&digits, &dims)] = c.hub_row(k, y)[b];
                    }
                    Operator::diagonal(diag)
                })
                .collect()
        })
        .collect();
    QuantumRealization::new(
        s.clone(),
        states,
        edge_effects,
        hub_effects,
        canonical_wiring(n),
    )
}

fn big_endian(digits: &[usize], radices: &[usize]) -> usize {
    digits
        .iter()
        .zip(radices)
        .fold(0, |acc, (&d, &r)| acc * r + d)
}

/// Born statistics `tr[(⊗ M ⊗ N) T (⊗ ρ) T†]`. Diagonal realizations with the
/// canonical wiring are contracted directly; anything else goes through
/// [`born_trace`].
pub fn born_evaluate(r: &QuantumRealization) -> Result<CorrelationTensor> {
    if !(r.is_diagonal() && r.is_canonical()) {
        return born_trace(r);
    }
    let s = &r.scenario;
    let n = s.edges();
    let factors: Vec<EdgeFactor> = (0..n)
        .map(|i| {
            let st = &r.states[i];
            let (da, db) = (st.dim_a, st.dim_b);
            let Operator::Diagonal { diag: rho } = &st.matrix else {
                unreachable!("checked diagonal")
            };
            let (o, m) = (s.edge_outcomes()[i], s.edge_inputs()[i]);
            let mut data = vec![0.0; m * o * db];
            for x in 0..m {
                for a in 0..o {
                    let Operator::Diagonal { diag: eff } = &r.edge_effects[i][x][a] else {
                        unreachable!("checked diagonal")
                    };
                    for beta in 0..db {
                        data[(x * o + a) * db + beta] =
                            (0..da).map(|al| rho[al * db + beta] * eff[al]).sum();
                    }
                }
            }
            EdgeFactor { dim: db, data }
        })
        .collect();
    let db = r.b_dims();
    let (ob, mb) = (s.hub_outcomes(), s.hub_inputs());
    let hidden: usize = db.iter().product();
    let mut hub = vec![0.0; hidden * mb * ob];
    let mut digits = vec![0usize; n];
    for lam in 0..hidden {
        index::split(lam, &db, &mut digits);
        let be = big_endian(&digits, &db);
        for y in 0..mb {
            for b in 0..ob {
                let Operator::Diagonal { diag } = &r.hub_effects[y][b] else {
                    unreachable!("checked diagonal")
                };
                hub[(lam * mb + y) * ob + b] = diag[be];
            }
        }
    }
    CorrelationTensor::new(s.clone(), contract(s, &factors, &hub))
}

/// Reference Born evaluation: an explicit trace over the permuted product
/// space for any operators and any wiring, limited to [`DENSE_CAP`].
pub fn born_trace(r: &QuantumRealization) -> Result<CorrelationTensor> {
    let s = &r.scenario;
    let n = s.edges();
    let total: usize = r.states.iter().map(|st| st.dim_a * st.dim_b).product();
    if total > DENSE_CAP {
        return Err(Error::CapExceeded {
            what: "product dimension",
            size: total,
            cap: DENSE_CAP,
        });
    }
    let mut slot_dims = vec![0; 2 * n];
    for (p, &slot) in r.wiring.iter().enumerate() {
        let st = &r.states[p / 2];
        slot_dims[slot] = if p % 2 == 0 { st.dim_a } else { st.dim_b };
    }
    let hub_dims = &slot_dims[n..];

    // Nonzero entries of T(⊗ρ)T†, each as per-slot (row, col) digits.
    let per_state: Vec<_> = r.states.iter().map(|st| st.matrix.nonzeros()).collect();
    let radices: Vec<usize> = per_state.iter().map(Vec::len).collect();
    let mut entries: Vec<(Vec<usize>, Vec<usize>, Complex64)> = Vec::new();
    if radices.iter().all(|&k| k > 0) {
        let mut pick = vec![0usize; n];
        loop {
            let mut rows = vec![0; 2 * n];
            let mut cols = vec![0; 2 * n];
            let mut v = Complex64::new(1.0, 0.0);
            for i in 0..n {
                let (rr, cc, val) = per_state[i][pick[i]];
                let db = r.states[i].dim_b;
                rows[r.wiring[2 * i]] = rr / db;
                cols[r.wiring[2 * i]] = cc / db;
                rows[r.wiring[2 * i + 1]] = rr % db;
                cols[r.wiring[2 * i + 1]] = cc % db;
                v *= val;
            }
            entries.push((rows, cols, v));
            if !index::advance(&mut pick, &radices) {
                break;
            }
        }
    }

    let mut values = Vec::with_capacity(s.len());
    let o = s.outcome_radices();
    let m = s.input_radices();
    let mut x = vec![0usize; n + 1];
    loop {
        let mut a = vec![0usize; n + 1];
        loop {
            let mut acc = Complex64::new(0.0, 0.0);
            for (rows, cols, v) in &entries {
                // tr(E ρ') = Σ E[u, v] ρ'[v, u]
                let mut e = *v;
                for i in 0..n {
                    e *= r.edge_effects[i][x[i]][a[i]].entry(cols[i], rows[i]);
                }
                e *= r.hub_effects[x[n]][a[n]].entry(
                    big_endian(&cols[n..], hub_dims),
                    big_endian(&rows[n..], hub_dims),
                );
                acc += e;
            }
            values.push(acc.re);
            if !index::advance(&mut a, &o) {
                break;
            }
        }
        if !index::advance(&mut x, &m) {
            break;
        }
    }
    CorrelationTensor::new(s.clone(), values)
}

/// Reads a discrete model off the recorded decompositions:
/// `q_i` are the weights, `P_i(a|x,λ) = ⟨e_λ|M_{a|x}|e_λ⟩` and
/// `P_B(b|y,λ) = ⟨f_{λ_1} .. f_{λ_n}|N_{b|y}|f_{λ_1} .. f_{λ_n}⟩`.
pub fn extract_model(r: &QuantumRealization) -> Result<DiscreteNLocalModel> {
    let s = &r.scenario;
    let n = s.edges();
    if !r.is_canonical() {
        return Err(Error::Realization(
            "extraction needs the canonical wiring".into(),
        ));
    }
    for (i, st) in r.states.iter().enumerate() {
        if st.decomposition.is_empty() {
            return Err(Error::Realization(format!(
                "state {} has no recorded decomposition",
                i + 1
            )));
        }
        for t in &st.decomposition {
            let na: f64 = t.a.iter().map(Complex64::norm_sqr).sum();
            let nb: f64 = t.b.iter().map(Complex64::norm_sqr).sum();
            if (na - 1.0).abs() > 1e-10 || (nb - 1.0).abs() > 1e-10 {
                return Err(Error::Realization(format!(
                    "state {} decomposition uses non-normalized vectors",
                    i + 1
                )));
            }
        }
    }
    let sources: Vec<Vec<f64>> = r
        .states
        .iter()
        .map(|st| st.decomposition.iter().map(|t| t.weight).collect())
        .collect();
    let edges = (0..n)
        .map(|i| {
            let (o, m) = (s.edge_outcomes()[i], s.edge_inputs()[i]);
            let mut data = Vec::new();
            for t in &r.states[i].decomposition {
                for x in 0..m {
                    for a in 0..o {
                        data.push(r.edge_effects[i][x][a].expectation(&t.a).max(0.0));
                    }
                }
            }
            data
        })
        .collect();
    let dims: Vec<usize> = sources.iter().map(Vec::len).collect();
    let (ob, mb) = (s.hub_outcomes(), s.hub_inputs());
    let hidden: usize = dims.iter().product();
    let all_diag = r.hub_effects.iter().flatten().all(Operator::is_diagonal);
    let mut hub = Vec::with_capacity(hidden * mb * ob);
    let mut lam = vec![0usize; n];
    loop {
        let fs: Vec<&[Complex64]> = (0..n)
            .map(|i| r.states[i].decomposition[lam[i]].b.as_slice())
            .collect();
        if all_diag {
            // Σ_u N(u) Π |f_i(u_i)|², u big-endian over the B factors
            let weights = kron_abs2(&fs);
            for y in 0..mb {
                for b in 0..ob {
                    let Operator::Diagonal { diag } = &r.hub_effects[y][b] else {
                        unreachable!()
                    };
                    hub.push(
                        weights
                            .iter()
                            .map(|&(u, w)| diag[u] * w)
                            .sum::<f64>()
                            .max(0.0),
                    );
                }
            }
        } else {
            let v = kron(&fs);
            if v.len() > DENSE_CAP {
                return Err(Error::CapExceeded {
                    what: "hub dimension",
                    size: v.len(),
                    cap: DENSE_CAP,
                });
            }
            for y in 0..mb {
                for b in 0..ob {
                    hub.push(r.hub_effects[y][b].expectation(&v).max(0.0));
                }
            }
        }
        if !index::advance(&mut lam, &dims) {
            break;
        }
    }
    DiscreteNLocalModel::new(s.clone(), sources, edges, hub)
}

fn kron(fs: &[&[Complex64]]) -> Vec<Complex64> {
    fs.iter().fold(vec![Complex64::new(1.0, 0.0)], |acc, f| {
        acc.iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect()
    })
}

/// Nonzero entries of `⊗ |f_i|²` as `(index, weight)`.
fn kron_abs2(fs: &[&[Complex64]]) -> Vec<(usize, f64)> {
    fs.iter().fold(vec![(0, 1.0)], |acc, f| {
        let d = f.len();
        acc.iter()
            .flat_map(|&(u, w)| {
                f.iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm_sqr() != 0.0)
                    .map(move |(j, c)| (u * d + j, w * c.norm_sqr()))
            })
            .collect()
    })
}

/// Worst defects of a realization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationReport {
    pub max_hermiticity_defect: f64,
    /// `max(0, -λ_min)` over states and effects.
    pub max_psd_defect: f64,
    pub max_trace_defect: f64,
    /// Largest entry of `|Σ_a M_{a|x} - I|`.
    pub max_completeness_defect: f64,
    /// Largest entry of `|ρ - Σ w |a⟩⟨a| ⊗ |b⟩⟨b||`.
    pub max_decomposition_defect: f64,
    pub ok: bool,
}

fn hermiticity(op: &Operator) -> f64 {
    match op {
        Operator::Diagonal { .. } => 0.0,
        Operator::Dense { dim, entries } => {
            let mut worst = 0.0f64;
            for r in 0..*dim {
                for c in r..*dim {
                    worst = worst.max((entries[r * dim + c] - entries[c * dim + r].conj()).norm());
                }
            }
            worst
        }
    }
}

fn psd_defect(op: &Operator) -> Result<f64> {
    let min = match op {
        Operator::Diagonal { diag } => diag.iter().copied().fold(f64::INFINITY, f64::min),
        Operator::Dense { .. } => {
            let m = op.to_matrix()?;
            let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
            h.symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        }
    };
    Ok((-min).max(0.0))
}

fn completeness(ops: &[Operator]) -> Result<f64> {
    let d = ops[0].dim();
    if ops.iter().all(Operator::is_diagonal) {
        let mut sum = vec![0.0; d];
        for op in ops {
            let Operator::Diagonal { diag } = op else {
                unreachable!()
            };
            sum.iter_mut().zip(diag).for_each(|(s, v)| *s += v);
        }
        return Ok(sum.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max));
    }
    let mut sum = DMatrix::<Complex64>::zeros(d, d);
    for op in ops {
        sum += op.to_matrix()?;
    }
    sum -= DMatrix::identity(d, d);
    Ok(sum.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

fn trace(op: &Operator) -> Complex64 {
    (0..op.dim()).map(|i| op.entry(i, i)).sum()
}

/// Checks Hermiticity, positivity, normalization and completeness of every
/// operator, and that each state equals its recorded decomposition.
pub fn validate_realization(r: &QuantumRealization) -> Result<RealizationReport> {
    let mut rep = RealizationReport {
        max_hermiticity_defect: 0.0,
        max_psd_defect: 0.0,
        max_trace_defect: 0.0,
        max_completeness_defect: 0.0,
        max_decomposition_defect: 0.0,
        ok: true,
    };
    let effects = r.edge_effects.iter().flatten().chain(&r.hub_effects);
    for fam in effects {
        rep.max_completeness_defect = rep.max_completeness_defect.max(completeness(fam)?);
        for op in fam {
            rep.max_hermiticity_defect = rep.max_hermiticity_defect.max(hermiticity(op));
            rep.max_psd_defect = rep.max_psd_defect.max(psd_defect(op)?);
        }
    }
    for st in &r.states {
        rep.max_hermiticity_defect = rep.max_hermiticity_defect.max(hermiticity(&st.matrix));
        rep.max_psd_defect = rep.max_psd_defect.max(psd_defect(&st.matrix)?);
        rep.max_trace_defect = rep.max_trace_defect.max((trace(&st.matrix) - 1.0).norm());
        let defect = if st.decomposition.iter().any(|t| t.weight < 0.0) {
            f64::INFINITY
        } else {
            let want = decomposition_matrix(st.dim_a, st.dim_b, &st.decomposition)?;
            let d = st.matrix.dim();
            let mut worst = 0.0f64;
            for row in 0..d {
                for col in 0..d {
                    worst = worst.max((st.matrix.entry(row, col) - want[(row, col)]).norm());
                }
            }
            worst
        };
        rep.max_decomposition_defect = rep.max_decomposition_defect.max(defect);
    }
    rep.ok = rep.max_hermiticity_defect <= 1e-12
        && rep.max_psd_defect <= 1e-10
        && rep.max_trace_defect <= 1e-10
        && rep.max_completeness_defect <= 1e-10
        && rep.max_decomposition_defect <= 1e-12;
    Ok(rep)
}
