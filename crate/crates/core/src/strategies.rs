//! Deterministic strategies and the greedy decomposition of row-stochastic
//! matrices into them.
//!
//! A deterministic strategy maps each of `m` inputs to one of `o` outputs.
//! Strategies are numbered `0..o^m` with input 0 as the least significant
//! base-`o` digit:
//!
//! ```text
//! k = Σ_x assignment(x) · o^x
//! ```
//!
//! so `k = 0` always answers 0 and `k = o^m - 1` always answers `o - 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{CorrelationTensor, ResponseMatrix, Scenario};

/// Encoding tag embedded in documents that carry strategy indices.
pub const STRATEGY_ENCODING: &str = "little-endian-input-1";

/// `outcomes^inputs`, panicking on overflow.
pub fn strategy_count(inputs: usize, outcomes: usize) -> usize {
    u32::try_from(inputs)
        .ok()
        .and_then(|m| outcomes.checked_pow(m))
        .expect("strategy count overflows usize")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    outcomes: usize,
    assignment: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn new(outcomes: usize, assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() || outcomes == 0 {
            return Err(Error::Scenario(
                "strategies need at least one input and one output".into(),
            ));
        }
        if let Some(&a) = assignment.iter().find(|&&a| a >= outcomes) {
            return Err(Error::OutOfRange(format!(
                "output {a} with {outcomes} outcomes"
            )));
        }
        Ok(DeterministicStrategy {
            outcomes,
            assignment,
        })
    }

    pub fn constant(inputs: usize, outcomes: usize, output: usize) -> Result<Self> {
        DeterministicStrategy::new(outcomes, vec![output; inputs])
    }

    pub fn inputs(&self) -> usize {
        self.assignment.len()
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn output(&self, x: usize) -> usize {
        self.assignment[x]
    }
}

pub fn encode(s: &DeterministicStrategy) -> usize {
    s.assignment
        .iter()
        .rev()
        .fold(0, |acc, &a| acc * s.outcomes + a)
}

pub fn decode(k: usize, inputs: usize, outcomes: usize) -> Result<DeterministicStrategy> {
    let n = strategy_count(inputs, outcomes);
    if k >= n {
        return Err(Error::OutOfRange(format!("strategy {k} of {n}")));
    }
    let mut rest = k;
    let assignment = (0..inputs)
        .map(|_| {
            let a = rest % outcomes;
            rest /= outcomes;
            a
        })
        .collect();
    DeterministicStrategy::new(outcomes, assignment)
}

/// `table[k * inputs + x]` is the output of strategy `k` on input `x`.
pub fn output_table(inputs: usize, outcomes: usize) -> Vec<usize> {
    let n = strategy_count(inputs, outcomes);
    let mut table = Vec::with_capacity(n * inputs);
    for k in 0..n {
        let mut rest = k;
        for _ in 0..inputs {
            table.push(rest % outcomes);
            rest /= outcomes;
        }
    }
    table
}

/// The `{0,1}` row-stochastic matrix of a strategy.
pub fn strategy_matrix(s: &DeterministicStrategy) -> ResponseMatrix {
    let (m, o) = (s.inputs(), s.outcomes);
    let mut data = vec![0.0; m * o];
    for (x, &a) in s.assignment.iter().enumerate() {
        data[x * o + a] = 1.0;
    }
    ResponseMatrix::new(m, o, data).expect("strategy has at least one row")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsTerm {
    pub weight: f64,
    pub strategy: usize,
}

/// Convex decomposition of a row-stochastic matrix into deterministic strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsDecomposition {
    pub inputs: usize,
    pub outcomes: usize,
    pub terms: Vec<RsTerm>,
}

impl RsDecomposition {
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// Weights indexed by strategy, summing repeated strategies.
    pub fn dense_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; strategy_count(self.inputs, self.outcomes)];
        for t in &self.terms {
            w[t.strategy] += t.weight;
        }
        w
    }

    /// `Σ weight · strategy_matrix(strategy)`.
    pub fn reconstruct(&self) -> ResponseMatrix {
        let (m, o) = (self.inputs, self.outcomes);
        let mut data = vec![0.0; m * o];
        for t in &self.terms {
            let mut rest = t.strategy;
            for x in 0..m {
                data[x * o + rest % o] += t.weight;
                rest /= o;
            }
        }
        ResponseMatrix::new(m, o, data).expect("shape preserved")
    }
}

/// Greedy decomposition: repeatedly pick the first maximal entry of every
/// row, peel off the smallest of those entries times the induced
/// deterministic strategy, and stop once the residual is exhausted.
///
/// Every round zeroes at least one more entry, so at most `m(o-1) + 1`
/// terms are emitted. Entries with magnitude at most `tol` are snapped to
/// zero after each subtraction.
pub fn decompose_rs(b: &ResponseMatrix, tol: f64) -> Result<RsDecomposition> {
    let (m, o) = (b.inputs(), b.outcomes());
    let defect = b.stochastic_defect();
    if defect > tol {
        return Err(Error::Distribution(format!(
            "matrix is not row-stochastic (defect {defect:.3e} > {tol:.3e})"
        )));
    }
    // Exact row sums keep the rows exhausting together.
    let mut residual: Vec<f64> = Vec::with_capacity(m * o);
    for x in 0..m {
        let row = b.row(x);
        let sum: f64 = row.iter().map(|v| v.max(0.0)).sum();
        residual.extend(row.iter().map(|v| v.max(0.0) / sum));
    }
    for v in residual.iter_mut() {
        if *v <= tol {
            *v = 0.0;
        }
    }

    let max_terms = m * (o - 1) + 1;
    let mut terms = Vec::new();
    let mut picks = vec![0usize; m];
    loop {
        let remaining = (0..m)
            .map(|x| residual[x * o..(x + 1) * o].iter().sum::<f64>())
            .fold(0.0, f64::max);
        if remaining <= tol {
            break;
        }
        if terms.len() == max_terms {
            return Err(Error::Numerical(format!(
                "decomposition did not terminate within {max_terms} terms"
            )));
        }
        for (x, pick) in picks.iter_mut().enumerate() {
            let row = &residual[x * o..(x + 1) * o];
            *pick = row
                .iter()
                .enumerate()
                .fold(0, |best, (j, &v)| if v > row[best] { j } else { best });
        }
        let alpha = (0..m)
            .map(|x| residual[x * o + picks[x]])
            .fold(f64::INFINITY, f64::min);
        if alpha <= 0.0 {
            return Err(Error::Numerical(
                "a row was exhausted while others still carry mass".into(),
            ));
        }
        for (x, &j) in picks.iter().enumerate() {
            let v = &mut residual[x * o + j];
            *v -= alpha;
            if *v < -tol {
                return Err(Error::Numerical(format!("negative residual {v:.3e}")));
            }
            if v.abs() <= tol {
                *v = 0.0;
            }
        }
        let strategy = picks.iter().rev().fold(0, |acc, &a| acc * o + a);
        terms.push(RsTerm {
            weight: alpha,
            strategy,
        });
    }
    Ok(RsDecomposition {
        inputs: m,
        outcomes: o,
        terms,
    })
}

/// The deterministic tensor `D = Π_p δ(a_p, J_p(x_p))`; `strategies` lists
/// one index per edge followed by the hub's.
pub fn deterministic_ct(s: &Scenario, strategies: &[usize]) -> Result<CorrelationTensor> {
    let parties: Vec<_> = s.parties().collect();
    if strategies.len() != parties.len() {
        return Err(Error::Shape {
            expected: parties.len(),
            found: strategies.len(),
        });
    }
    let decoded = parties
        .iter()
        .zip(strategies)
        .map(|(&p, &k)| decode(k, s.inputs(p), s.outcomes(p)))
        .collect::<Result<Vec<_>>>()?;
    CorrelationTensor::from_fn(s.clone(), |a, x| {
        let hit = decoded
            .iter()
            .enumerate()
            .all(|(p, d)| d.output(x[p]) == a[p]);
        if hit {
            1.0
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_identity_strategy() {
        let s = DeterministicStrategy::new(2, vec![0, 1]).unwrap();
        assert_eq!(encode(&s), 2);
        assert_eq!(decode(2, 2, 2).unwrap(), s);
    }

    #[test]
    fn extreme_indices_are_constants() {
        assert_eq!(decode(0, 3, 4).unwrap().assignment(), &[0, 0, 0]);
        assert_eq!(decode(63, 3, 4).unwrap().assignment(), &[3, 3, 3]);
        assert!(matches!(decode(64, 3, 4), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn encode_decode_bijection() {
        for (m, o) in [(1, 1), (1, 5), (3, 2), (2, 3), (4, 3)] {
            for k in 0..strategy_count(m, o) {
                assert_eq!(encode(&decode(k, m, o).unwrap()), k);
            }
        }
    }

    #[test]
    fn output_table_matches_decode() {
        let table = output_table(3, 3);
        for k in 0..27 {
            assert_eq!(
                &table[k * 3..k * 3 + 3],
                decode(k, 3, 3).unwrap().assignment()
            );
        }
    }

    #[test]
    fn strategy_matrices() {
        let id = DeterministicStrategy::new(2, vec![0, 1]).unwrap();
        assert_eq!(strategy_matrix(&id).data(), &[1.0, 0.0, 0.0, 1.0]);
        let second = DeterministicStrategy::new(2, vec![1, 1]).unwrap();
        assert_eq!(strategy_matrix(&second).data(), &[0.0, 1.0, 0.0, 1.0]);
        let c = DeterministicStrategy::constant(3, 2, 0).unwrap();
        assert_eq!(strategy_matrix(&c).data(), &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn worked_decomposition() {
        // Rounds: picks (0,1) α=1/2; picks (1,0) α=1/4; picks (1,1) α=1/4.
        let b = ResponseMatrix::from_rows(&[&[0.5, 0.5], &[0.25, 0.75]]).unwrap();
        let d = decompose_rs(&b, 1e-12).unwrap();
        let expected = [(0.5, vec![0, 1]), (0.25, vec![1, 0]), (0.25, vec![1, 1])];
        assert_eq!(d.terms.len(), 3);
        for (t, (w, assignment)) in d.terms.iter().zip(expected) {
            assert_eq!(t.weight, w);
            assert_eq!(
                decode(t.strategy, 2, 2).unwrap().assignment(),
                &assignment[..]
            );
        }
    }

    #[test]
    fn single_row_split_evenly() {
        let b = ResponseMatrix::from_rows(&[&[0.5, 0.5]]).unwrap();
        let d = decompose_rs(&b, 1e-12).unwrap();
        assert_eq!(
            d.terms,
            vec![
                RsTerm {
                    weight: 0.5,
                    strategy: 0
                },
                RsTerm {
                    weight: 0.5,
                    strategy: 1
                }
            ]
        );
    }

    #[test]
    fn vertex_is_consumed_in_one_round() {
        let s = DeterministicStrategy::new(3, vec![2, 0, 1]).unwrap();
        let d = decompose_rs(&strategy_matrix(&s), 1e-12).unwrap();
        assert_eq!(
            d.terms,
            vec![RsTerm {
                weight: 1.0,
                strategy: encode(&s)
            }]
        );
    }

    #[test]
    fn rejects_non_stochastic_input() {
        let neg = ResponseMatrix::from_rows(&[&[1.2, -0.2]]).unwrap();
        assert!(matches!(
            decompose_rs(&neg, 1e-12),
            Err(Error::Distribution(_))
        ));
        let short = ResponseMatrix::from_rows(&[&[0.4, 0.4]]).unwrap();
        assert!(matches!(
            decompose_rs(&short, 1e-12),
            Err(Error::Distribution(_))
        ));
    }

    #[test]
    fn deterministic_tensor_entries() {
        // J = identity, K = constant first output, L = flip.
        let s = Scenario::homogeneous(2, 2, 2).unwrap();
        let ident = encode(&DeterministicStrategy::new(2, vec![0, 1]).unwrap());
        let flip = encode(&DeterministicStrategy::new(2, vec![1, 0]).unwrap());
        let t = deterministic_ct(&s, &[ident, flip, 0]).unwrap();
        for (a, b, c, x, y, z) in itertools(2) {
            let expected = (a == x && b == 0 && c == 1 - z) as u8 as f64;
            assert_eq!(t.tripartite(a, b, c, x, y, z), expected);
        }
        assert!(deterministic_ct(&s, &[0, 0, 4]).is_err());
    }

    fn itertools(r: usize) -> impl Iterator<Item = (usize, usize, usize, usize, usize, usize)> {
        (0..r.pow(6)).map(move |k| {
            let d = |i: u32| (k / r.pow(i)) % r;
            (d(0), d(1), d(2), d(3), d(4), d(5))
        })
    }
}
