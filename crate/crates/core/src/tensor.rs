//! Dense correlation tensors over star-network scenarios.
//!
//! A scenario has `n >= 1` edge parties `A_1..A_n` and one hub `B`. A
//! correlation tensor stores `P(a_1..a_n b | x_1..x_n y)` in a single dense
//! array with all outputs varying faster than all inputs, and party 1
//! innermost within each block:
//!
//! ```text
//! flat = out + (o_1 * .. * o_n * o_B) * in
//! out  = a_1 + o_1 * (a_2 + o_2 * (.. + o_n * b))
//! in   = x_1 + m_1 * (x_2 + m_2 * (.. + m_n * y))
//! ```
//!
//! Probability tensors are the special case where every input count is 1.
//! Tripartite bilocal tensors use the order `(A, C, B)`: `A` is edge 0, `C`
//! is edge 1 and `B` is the hub; see [`CorrelationTensor::tripartite`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index;

/// Layout tag embedded in serialized tensors.
pub const TENSOR_LAYOUT: &str = "outputs-fastest-party1-innermost";

/// A party of a star network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    /// Edge party `A_{i+1}` (zero-based).
    Edge(usize),
    Hub,
}

impl Party {
    /// Position of the party among the `n + 1` tensor axes.
    pub fn axis(self, edges: usize) -> usize {
        match self {
            Party::Edge(i) => i,
            Party::Hub => edges,
        }
    }

    pub fn from_axis(axis: usize, edges: usize) -> Party {
        if axis == edges {
            Party::Hub
        } else {
            Party::Edge(axis)
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Edge(i) => write!(f, "A{}", i + 1),
            Party::Hub => write!(f, "B"),
        }
    }
}

impl FromStr for Party {
    type Err = Error;

    /// Accepts `B`/`hub`, `A<i>` (one-based), and the tripartite aliases
    /// `A` (edge 0) and `C` (edge 1).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "B" | "b" | "hub" => return Ok(Party::Hub),
            "A" | "a" => return Ok(Party::Edge(0)),
            "C" | "c" => return Ok(Party::Edge(1)),
            _ => {}
        }
        let digits = t
            .strip_prefix('A')
            .or_else(|| t.strip_prefix('a'))
            .ok_or_else(|| Error::Config(format!("unknown party `{s}`")))?;
        match digits.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(Party::Edge(i - 1)),
            _ => Err(Error::Config(format!("unknown party `{s}`"))),
        }
    }
}

/// Outcome and input counts of an `n`-edge star network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr")]
pub struct Scenario {
    edge_outcomes: Vec<usize>,
    edge_inputs: Vec<usize>,
    hub_outcomes: usize,
    hub_inputs: usize,
}

#[derive(Deserialize)]
struct ScenarioRepr {
    edge_outcomes: Vec<usize>,
    edge_inputs: Vec<usize>,
    hub_outcomes: usize,
    hub_inputs: usize,
}

impl TryFrom<ScenarioRepr> for Scenario {
    type Error = Error;

    fn try_from(r: ScenarioRepr) -> Result<Self> {
        Scenario::new(r.edge_outcomes, r.edge_inputs, r.hub_outcomes, r.hub_inputs)
    }
}

impl Scenario {
    pub fn new(
        edge_outcomes: Vec<usize>,
        edge_inputs: Vec<usize>,
        hub_outcomes: usize,
        hub_inputs: usize,
    ) -> Result<Self> {
        if edge_outcomes.is_empty() {
            return Err(Error::Scenario(
                "at least one edge party is required".into(),
            ));
        }
        if edge_outcomes.len() != edge_inputs.len() {
            return Err(Error::Scenario(format!(
                "{} edge outcome counts but {} edge input counts",
                edge_outcomes.len(),
                edge_inputs.len()
            )));
        }
        if edge_outcomes
            .iter()
            .chain(&edge_inputs)
            .chain([&hub_outcomes, &hub_inputs])
            .any(|&c| c == 0)
        {
            return Err(Error::Scenario("all counts must be at least 1".into()));
        }
        Ok(Scenario {
            edge_outcomes,
            edge_inputs,
            hub_outcomes,
            hub_inputs,
        })
    }

    /// `n` edges and a hub, every party with `outcomes` outcomes and `inputs` inputs.
    pub fn homogeneous(edges: usize, outcomes: usize, inputs: usize) -> Result<Self> {
        Scenario::new(vec![outcomes; edges], vec![inputs; edges], outcomes, inputs)
    }

    /// Tripartite scenario with parties given in `(A, B, C)` order; `B` is the hub.
    pub fn tripartite(a: (usize, usize), b: (usize, usize), c: (usize, usize)) -> Result<Self> {
        Scenario::new(vec![a.0, c.0], vec![a.1, c.1], b.0, b.1)
    }

    /// Probability-tensor scenario (all input counts 1).
    pub fn probability(edge_outcomes: Vec<usize>, hub_outcomes: usize) -> Result<Self> {
        let n = edge_outcomes.len();
        Scenario::new(edge_outcomes, vec![1; n], hub_outcomes, 1)
    }

    pub fn edges(&self) -> usize {
        self.edge_outcomes.len()
    }

    pub fn parties(&self) -> impl Iterator<Item = Party> + '_ {
        (0..self.edges()).map(Party::Edge).chain([Party::Hub])
    }

    pub fn edge_outcomes(&self) -> &[usize] {
        &self.edge_outcomes
    }

    pub fn edge_inputs(&self) -> &[usize] {
        &self.edge_inputs
    }

    pub fn hub_outcomes(&self) -> usize {
        self.hub_outcomes
    }

    pub fn hub_inputs(&self) -> usize {
        self.hub_inputs
    }

    pub fn outcomes(&self, p: Party) -> usize {
        match p {
            Party::Edge(i) => self.edge_outcomes[i],
            Party::Hub => self.hub_outcomes,
        }
    }

    pub fn inputs(&self, p: Party) -> usize {
        match p {
            Party::Edge(i) => self.edge_inputs[i],
            Party::Hub => self.hub_inputs,
        }
    }

    /// Number of deterministic strategies `o^m` of a party.
    pub fn strategy_count(&self, p: Party) -> usize {
        crate::strategies::strategy_count(self.inputs(p), self.outcomes(p))
    }

    pub fn is_probability(&self) -> bool {
        self.hub_inputs == 1 && self.edge_inputs.iter().all(|&m| m == 1)
    }

    pub fn contains(&self, p: Party) -> bool {
        match p {
            Party::Edge(i) => i < self.edges(),
            Party::Hub => true,
        }
    }

    /// Outcome counts of all `n + 1` axes, hub last.
    pub fn outcome_radices(&self) -> Vec<usize> {
        let mut r = self.edge_outcomes.clone();
        r.push(self.hub_outcomes);
        r
    }

    /// Input counts of all `n + 1` axes, hub last.
    pub fn input_radices(&self) -> Vec<usize> {
        let mut r = self.edge_inputs.clone();
        r.push(self.hub_inputs);
        r
    }

    pub fn output_tuples(&self) -> usize {
        index::product(&self.edge_outcomes) * self.hub_outcomes
    }

    pub fn input_tuples(&self) -> usize {
        index::product(&self.edge_inputs) * self.hub_inputs
    }

    /// Number of entries of a correlation tensor over this scenario.
    pub fn len(&self) -> usize {
        self.output_tuples() * self.input_tuples()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Replaces the counts of the listed parties by 1.
    pub(crate) fn collapse(&self, parties: &[Party]) -> Scenario {
        let mut s = self.clone();
        for &p in parties {
            match p {
                Party::Edge(i) => {
                    s.edge_outcomes[i] = 1;
                    s.edge_inputs[i] = 1;
                }
                Party::Hub => {
                    s.hub_outcomes = 1;
                    s.hub_inputs = 1;
                }
            }
        }
        s
    }

    fn check_party(&self, p: Party) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!(
                "party {p} in a scenario with {} edges",
                self.edges()
            )))
        }
    }
}

/// Defect tolerances used by validation and marginalization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub negativity: f64,
    pub normalization: f64,
    pub signaling: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            negativity: 1e-12,
            normalization: 1e-10,
            signaling: 1e-10,
        }
    }
}

impl Tolerances {
    /// Uses `tol` for normalization and signaling, keeping the negativity default.
    pub fn with(tol: f64) -> Self {
        Tolerances {
            normalization: tol,
            signaling: tol,
            ..Tolerances::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorDiagnostics {
    pub max_negativity: f64,
    pub max_normalization_error: f64,
    pub max_signaling_defect: f64,
    pub ok: bool,
}

/// A real `m x o` matrix of conditional probabilities `P(a|x)`, one row per input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseMatrix {
    inputs: usize,
    outcomes: usize,
    data: Vec<f64>,
}

impl ResponseMatrix {
    pub fn new(inputs: usize, outcomes: usize, data: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outcomes == 0 {
            return Err(Error::Scenario(
                "response matrix needs at least one row and column".into(),
            ));
        }
        if data.len() != inputs * outcomes {
            return Err(Error::Shape {
                expected: inputs * outcomes,
                found: data.len(),
            });
        }
        Ok(ResponseMatrix {
            inputs,
            outcomes,
            data,
        })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let outcomes = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != outcomes) {
            return Err(Error::Scenario("ragged response matrix".into()));
        }
        ResponseMatrix::new(rows.len(), outcomes, rows.concat())
    }

    pub fn uniform(inputs: usize, outcomes: usize) -> Self {
        ResponseMatrix {
            inputs,
            outcomes,
            data: vec![1.0 / outcomes as f64; inputs * outcomes],
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn get(&self, x: usize, a: usize) -> f64 {
        self.data[x * self.outcomes + a]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.outcomes..(x + 1) * self.outcomes]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Largest deviation from row-stochasticity (negative entries or row sums off 1).
    pub fn stochastic_defect(&self) -> f64 {
        (0..self.inputs)
            .map(|x| {
                let row = self.row(x);
                let neg = row.iter().fold(0.0f64, |m, &v| m.max(-v));
                let sum: f64 = row.iter().sum();
                neg.max((sum - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Dense correlation tensor `P(a_1..a_n b | x_1..x_n y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTensor {
    scenario: Scenario,
    values: Vec<f64>,
}

impl CorrelationTensor {
    pub fn new(scenario: Scenario, values: Vec<f64>) -> Result<Self> {
        if values.len() != scenario.len() {
            return Err(Error::Shape {
                expected: scenario.len(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite tensor entry {v}")));
        }
        Ok(CorrelationTensor { scenario, values })
    }

    /// Builds a tensor entry by entry; `f` receives output and input digits
    /// for all `n + 1` axes (hub last).
    pub fn from_fn(
        scenario: Scenario,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(scenario.len());
        let o = scenario.outcome_radices();
        let m = scenario.input_radices();
        let mut x = vec![0; m.len()];
        loop {
            let mut a = vec![0; o.len()];
            loop {
                values.push(f(&a, &x));
                if !index::advance(&mut a, &o) {
                    break;
                }
            }
            if !index::advance(&mut x, &m) {
                break;
            }
        }
        CorrelationTensor::new(scenario, values)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn flat_index(&self, outputs: &[usize], inputs: &[usize]) -> usize {
        let o = self.scenario.outcome_radices();
        let m = self.scenario.input_radices();
        index::join(outputs, &o) + self.scenario.output_tuples() * index::join(inputs, &m)
    }

    /// Entry at zero-based output and input digits (hub last).
    pub fn get(&self, outputs: &[usize], inputs: &[usize]) -> f64 {
        self.values[self.flat_index(outputs, inputs)]
    }

    /// Tripartite accessor in `(a, b, c | x, y, z)` order with `B` the hub.
    pub fn tripartite(&self, a: usize, b: usize, c: usize, x: usize, y: usize, z: usize) -> f64 {
        assert_eq!(
            self.scenario.edges(),
            2,
            "tripartite access needs two edges"
        );
        self.get(&[a, c, b], &[x, z, y])
    }

    /// Entries of one input tuple (contiguous block of all outputs).
    pub fn block(&self, input_flat: usize) -> &[f64] {
        let o = self.scenario.output_tuples();
        &self.values[input_flat * o..(input_flat + 1) * o]
    }

    /// Visits every entry with its output and input digits.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], &[usize], f64)) {
        let o = self.scenario.outcome_radices();
        let m = self.scenario.input_radices();
        let mut x = vec![0; m.len()];
        let mut a = vec![0; o.len()];
        let mut values = self.values.iter();
        loop {
            loop {
                f(
                    &a,
                    &x,
                    *values.next().expect("shape checked at construction"),
                );
                if !index::advance(&mut a, &o) {
                    break;
                }
            }
            if !index::advance(&mut x, &m) {
                break;
            }
        }
    }

    /// Spread across `party`'s inputs of the marginal obtained by summing out
    /// its outputs, with the pair of inputs attaining it.
    fn signaling_spread(&self, party: Party) -> (f64, (usize, usize)) {
        let n = self.scenario.edges();
        let axis = party.axis(n);
        let op = self.scenario.outcome_radices()[axis];
        let mp = self.scenario.input_radices()[axis];
        if mp == 1 {
            return (0.0, (0, 0));
        }
        let rest_out = self.scenario.output_tuples() / op;
        let rest_in = self.scenario.input_tuples() / mp;
        let o = self.scenario.outcome_radices();
        let m = self.scenario.input_radices();
        let stride_out: usize = o[..axis].iter().product();
        let stride_in: usize = m[..axis].iter().product();
        let mut acc = vec![0.0; rest_out * rest_in * mp];
        for (flat, &v) in self.values.iter().enumerate() {
            let out = flat % self.scenario.output_tuples();
            let inp = flat / self.scenario.output_tuples();
            let out_rest = out % stride_out + (out / (stride_out * op)) * stride_out;
            let xp = (inp / stride_in) % mp;
            let in_rest = inp % stride_in + (inp / (stride_in * mp)) * stride_in;
            acc[out_rest + rest_out * (in_rest + rest_in * xp)] += v;
        }
        let mut best = (0.0, (0, 0));
        for r in 0..rest_out * rest_in {
            let (mut lo, mut hi) = (0usize, 0usize);
            for xp in 1..mp {
                let v = acc[r + rest_out * rest_in * xp];
                if v < acc[r + rest_out * rest_in * lo] {
                    lo = xp;
                }
                if v > acc[r + rest_out * rest_in * hi] {
                    hi = xp;
                }
            }
            let spread = acc[r + rest_out * rest_in * hi] - acc[r + rest_out * rest_in * lo];
            if spread > best.0 {
                best = (spread, (lo.min(hi), lo.max(hi)));
            }
        }
        best
    }
}

fn negativity_and_normalization(t: &CorrelationTensor) -> (f64, f64) {
    let neg = t.values.iter().fold(0.0f64, |m, &v| m.max(-v));
    let norm = (0..t.scenario.input_tuples())
        .map(|i| (t.block(i).iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    (neg, norm)
}

/// Reports negativity and per-input normalization defects.
pub fn validate(t: &CorrelationTensor, tol: &Tolerances) -> TensorDiagnostics {
    let (neg, norm) = negativity_and_normalization(t);
    TensorDiagnostics {
        max_negativity: neg,
        max_normalization_error: norm,
        max_signaling_defect: 0.0,
        ok: neg <= tol.negativity && norm <= tol.normalization,
    }
}

/// Full validity report including the nonsignaling defect.
pub fn nonsignaling_check(t: &CorrelationTensor, tol: &Tolerances) -> TensorDiagnostics {
    let (neg, norm) = negativity_and_normalization(t);
    let sig = t
        .scenario
        .parties()
        .map(|p| t.signaling_spread(p).0)
        .fold(0.0, f64::max);
    TensorDiagnostics {
        max_negativity: neg,
        max_normalization_error: norm,
        max_signaling_defect: sig,
        ok: neg <= tol.negativity && norm <= tol.normalization && sig <= tol.signaling,
    }
}

/// Result of [`marginal`]: discarded parties are collapsed to a single
/// outcome and input, so the tensor keeps its `n + 1` axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginal {
    pub tensor: CorrelationTensor,
    /// Largest deviation between the reference-input marginal and the one
    /// obtained at any other choice of discarded inputs.
    pub input_deviation: f64,
}

/// Sums out every party not in `keep`, fixing discarded inputs at 0.
pub fn marginal(t: &CorrelationTensor, keep: &[Party], tol: f64) -> Result<Marginal> {
    let s = &t.scenario;
    for &p in keep {
        s.check_party(p)?;
    }
    let discard: Vec<Party> = s.parties().filter(|p| !keep.contains(p)).collect();
    for &p in &discard {
        let (defect, inputs) = t.signaling_spread(p);
        if defect > tol {
            return Err(Error::Signaling {
                party: p,
                inputs,
                defect,
            });
        }
    }
    let n = s.edges();
    let target = s.collapse(&discard);
    let kept_axis: Vec<bool> = (0..=n)
        .map(|ax| keep.contains(&Party::from_axis(ax, n)))
        .collect();
    let to = target.outcome_radices();
    let tm = target.input_radices();
    let mut full = vec![0.0; target.output_tuples() * s.input_tuples()];
    let mut proj_a = vec![0; n + 1];
    t.for_each(|a, x, v| {
        for ax in 0..=n {
            proj_a[ax] = if kept_axis[ax] { a[ax] } else { 0 };
        }
        let inp = index::join(x, &s.input_radices());
        full[index::join(&proj_a, &to) + target.output_tuples() * inp] += v;
    });
    let mut values = vec![0.0; target.len()];
    let mut deviation = 0.0f64;
    let mut proj_x = vec![0; n + 1];
    let mut x = vec![0; n + 1];
    let m = s.input_radices();
    loop {
        for ax in 0..=n {
            proj_x[ax] = if kept_axis[ax] { x[ax] } else { 0 };
        }
        let reference = index::join(&proj_x, &m);
        let here = index::join(&x, &m);
        let dst = index::join(&proj_x, &tm);
        for out in 0..target.output_tuples() {
            let v = full[out + target.output_tuples() * here];
            if here == reference {
                values[out + target.output_tuples() * dst] = v;
            }
            deviation = deviation.max((v - full[out + target.output_tuples() * reference]).abs());
        }
        if !index::advance(&mut x, &m) {
            break;
        }
    }
    Ok(Marginal {
        tensor: CorrelationTensor::new(target, values)?,
        input_deviation: deviation,
    })
}

/// Single-party marginal `P_p(a|x)` as a response matrix.
pub fn party_marginal(t: &CorrelationTensor, party: Party, tol: f64) -> Result<ResponseMatrix> {
    let m = marginal(t, &[party], tol)?;
    let s = t.scenario();
    let (op, mp) = (s.outcomes(party), s.inputs(party));
    let n = s.edges();
    let axis = party.axis(n);
    let mut data = vec![0.0; op * mp];
    m.tensor
        .for_each(|a, x, v| data[x[axis] * op + a[axis]] = v);
    ResponseMatrix::new(mp, op, data)
}

/// Convex combination of tensors over a common scenario.
pub fn mix(terms: &[(f64, &CorrelationTensor)]) -> Result<CorrelationTensor> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::Config("mixture needs at least one term".into()))?;
    let sum: f64 = terms.iter().map(|(w, _)| w).sum();
    if terms.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum { sum });
    }
    let mut values = vec![0.0; first.values.len()];
    for (w, t) in terms {
        if t.scenario != first.scenario {
            return Err(Error::ScenarioMismatch(
                "mixture terms differ in scenario".into(),
            ));
        }
        for (acc, v) in values.iter_mut().zip(&t.values) {
            *acc += w * v;
        }
    }
    CorrelationTensor::new(first.scenario.clone(), values)
}

/// Product tensor `P_1 ⊗ .. ⊗ P_n ⊗ P_B`; `factors` lists the edges then the hub.
pub fn product_ct(factors: &[ResponseMatrix]) -> Result<CorrelationTensor> {
    if factors.len() < 2 {
        return Err(Error::Scenario(
            "a product needs at least one edge and a hub".into(),
        ));
    }
    let (hub, edges) = factors.split_last().expect("length checked");
    let scenario = Scenario::new(
        edges.iter().map(|f| f.outcomes).collect(),
        edges.iter().map(|f| f.inputs).collect(),
        hub.outcomes,
        hub.inputs,
    )?;
    CorrelationTensor::from_fn(scenario, |a, x| {
        factors
            .iter()
            .enumerate()
            .map(|(p, f)| f.get(x[p], a[p]))
            .product()
    })
}

/// The maximally mixed tensor, every entry `1 / (o_1 .. o_n o_B)`.
pub fn uniform_ct(s: &Scenario) -> CorrelationTensor {
    let v = 1.0 / s.output_tuples() as f64;
    CorrelationTensor {
        scenario: s.clone(),
        values: vec![v; s.len()],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub max_abs: f64,
    pub l2: f64,
}

/// Sup-norm and Hilbert–Schmidt distance between two tensors.
pub fn distance(t1: &CorrelationTensor, t2: &CorrelationTensor) -> Result<Distance> {
    if t1.scenario != t2.scenario {
        return Err(Error::ScenarioMismatch(
            "distance between different scenarios".into(),
        ));
    }
    let (max_abs, sq) = t1
        .values
        .iter()
        .zip(&t2.values)
        .fold((0.0f64, 0.0), |(m, s), (a, b)| {
            let d = (a - b).abs();
            (m.max(d), s + d * d)
        });
    Ok(Distance {
        max_abs,
        l2: sq.sqrt(),
    })
}

/// Inner product `<P|Q> = Σ P Q`.
pub fn inner(t1: &CorrelationTensor, t2: &CorrelationTensor) -> Result<f64> {
    if t1.scenario != t2.scenario {
        return Err(Error::ScenarioMismatch(
            "inner product between different scenarios".into(),
        ));
    }
    Ok(t1.values.iter().zip(&t2.values).map(|(a, b)| a * b).sum())
}

// Serialized form: {"scenario", "layout", "values"} with 17 significant digits.
#[derive(Serialize, Deserialize)]
pub(crate) struct TensorRepr {
    scenario: Scenario,
    layout: String,
    #[serde(serialize_with = "crate::codec::precise::serialize")]
    values: Vec<f64>,
}

impl Serialize for CorrelationTensor {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        TensorRepr {
            scenario: self.scenario.clone(),
            layout: TENSOR_LAYOUT.to_string(),
            values: self.values.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CorrelationTensor {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TensorRepr::deserialize(deserializer)?;
        if r.layout != TENSOR_LAYOUT {
            return Err(D::Error::custom(format!(
                "layout tag mismatch: expected `{TENSOR_LAYOUT}`, found `{}`",
                r.layout
            )));
        }
        CorrelationTensor::new(r.scenario, r.values).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn s222() -> Scenario {
        Scenario::homogeneous(2, 2, 2).unwrap()
    }

    #[test]
    fn scenario_rejects_zero_counts_and_empty_edges() {
        assert!(Scenario::new(vec![], vec![], 2, 2).is_err());
        assert!(Scenario::new(vec![2, 0], vec![2, 2], 2, 2).is_err());
        assert!(Scenario::new(vec![2], vec![2, 2], 2, 2).is_err());
        assert!(Scenario::new(vec![2], vec![2], 2, 0).is_err());
    }

    #[test]
    fn party_parsing() {
        assert_eq!("B".parse::<Party>().unwrap(), Party::Hub);
        assert_eq!("A".parse::<Party>().unwrap(), Party::Edge(0));
        assert_eq!("C".parse::<Party>().unwrap(), Party::Edge(1));
        assert_eq!("A3".parse::<Party>().unwrap(), Party::Edge(2));
        assert!("A0".parse::<Party>().is_err());
        assert!("Z".parse::<Party>().is_err());
        assert_eq!(Party::Edge(1).to_string(), "A2");
    }

    #[test]
    fn layout_is_outputs_fastest_party_one_innermost() {
        let s = Scenario::new(vec![2, 3], vec![2, 1], 2, 2).unwrap();
        let t = CorrelationTensor::from_fn(s.clone(), |a, x| {
            (a[0] + 10 * a[1] + 100 * a[2] + 1000 * x[0] + 10000 * x[2]) as f64
        })
        .unwrap();
        assert_eq!(t.values()[0], 0.0);
        assert_eq!(t.values()[1], 1.0);
        assert_eq!(t.values()[2], 10.0);
        assert_eq!(t.values()[6], 100.0);
        assert_eq!(t.values()[12], 1000.0);
        assert_eq!(t.values()[24], 10000.0);
        assert_eq!(t.get(&[1, 2, 1], &[1, 0, 1]), 11121.0);
    }

    #[test]
    fn uniform_validates() {
        let t = uniform_ct(&s222());
        assert!(t.values().iter().all(|&v| v == 0.125));
        assert!(validate(&t, &Tolerances::default()).ok);
    }

    #[test]
    fn perturbed_entry_breaks_normalization() {
        let mut values = uniform_ct(&s222()).into_values();
        values[5] += 1e-3;
        let t = CorrelationTensor::new(s222(), values).unwrap();
        let d = validate(&t, &Tolerances::default());
        assert!((d.max_normalization_error - 1e-3).abs() < 1e-15);
        assert!(!d.ok);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        assert!(matches!(
            CorrelationTensor::new(s222(), vec![0.0; 7]),
            Err(Error::Shape {
                expected: 64,
                found: 7
            })
        ));
    }

    #[test]
    fn hub_copying_first_input_signals_fully() {
        let t = examples::hub_copies_first_input();
        let d = nonsignaling_check(&t, &Tolerances::default());
        assert_eq!(d.max_signaling_defect, 1.0);
        assert!(!d.ok);
        match marginal(&t, &[Party::Hub], 1e-10) {
            Err(Error::Signaling { party, inputs, .. }) => {
                assert_eq!(party, Party::Edge(0));
                assert_eq!(inputs, (0, 1));
            }
            other => panic!("expected signaling error, got {other:?}"),
        }
    }

    #[test]
    fn marginal_of_product_is_factor() {
        let f1 = ResponseMatrix::from_rows(&[&[0.2, 0.8], &[0.6, 0.4]]).unwrap();
        let f2 = ResponseMatrix::from_rows(&[&[0.1, 0.2, 0.7]]).unwrap();
        let fb = ResponseMatrix::from_rows(&[&[0.3, 0.7], &[0.5, 0.5], &[1.0, 0.0]]).unwrap();
        let t = product_ct(&[f1.clone(), f2.clone(), fb.clone()]).unwrap();
        for (p, f) in [
            (Party::Edge(0), &f1),
            (Party::Edge(1), &f2),
            (Party::Hub, &fb),
        ] {
            let got = party_marginal(&t, p, 1e-12).unwrap();
            for (g, e) in got.data().iter().zip(f.data()) {
                assert!((g - e).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn mix_rejects_bad_weights() {
        let u = uniform_ct(&s222());
        assert!(matches!(
            mix(&[(0.5, &u), (0.6, &u)]),
            Err(Error::WeightSum { .. })
        ));
        assert!(matches!(
            mix(&[(-0.5, &u), (1.5, &u)]),
            Err(Error::WeightSum { .. })
        ));
        let other = uniform_ct(&Scenario::homogeneous(2, 2, 1).unwrap());
        assert!(matches!(
            mix(&[(0.5, &u), (0.5, &other)]),
            Err(Error::ScenarioMismatch(_))
        ));
        assert_eq!(mix(&[(1.0, &u)]).unwrap(), u);
    }

    #[test]
    fn distance_to_self_is_zero() {
        let t = examples::not_bilocal();
        let d = distance(&t, &t).unwrap();
        assert_eq!((d.max_abs, d.l2), (0.0, 0.0));
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let t = mix(&[(0.3, &examples::not_bilocal()), (0.7, &uniform_ct(&s222()))]).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.contains(TENSOR_LAYOUT));
        let back: CorrelationTensor = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn json_rejects_foreign_layout() {
        let text = serde_json::to_string(&uniform_ct(&s222()))
            .unwrap()
            .replace(TENSOR_LAYOUT, "inputs-fastest");
        assert!(serde_json::from_str::<CorrelationTensor>(&text).is_err());
    }
}
