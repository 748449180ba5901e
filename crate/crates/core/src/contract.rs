//! Evaluation of star-shaped hidden-variable sums
//!
//! ```text
//! P(a b | x y) = Σ_λ Π_i W_i(x_i, a_i, λ_i) · H(y, b, λ_1..λ_n)
//! ```
//!
//! by contracting one hidden index at a time (last edge first), which keeps
//! the cost near `|inputs| · o_B · o_n · Π d_i` instead of the naive
//! `|entries| · Π d_i`.

use crate::tensor::Scenario;

/// Edge factor `W_i` stored as `[(x * o_i + a) * d_i + λ]`.
pub(crate) struct EdgeFactor {
    pub dim: usize,
    pub data: Vec<f64>,
}

/// Contracts edge factors against a hub table laid out as
/// `[(λ * m_B + y) * o_B + b]`, `λ = λ_1 + d_1 (λ_2 + ..)`, and returns
/// tensor values in the standard layout.
pub(crate) fn contract(s: &Scenario, edges: &[EdgeFactor], hub: &[f64]) -> Vec<f64> {
    let n = s.edges();
    debug_assert_eq!(edges.len(), n);
    let (ob, mb) = (s.hub_outcomes(), s.hub_inputs());
    let hidden: usize = edges.iter().map(|e| e.dim).product();
    debug_assert_eq!(hub.len(), hidden * mb * ob);
    let o = s.edge_outcomes();
    let m = s.edge_inputs();
    let outs = s.output_tuples();
    let mut values = vec![0.0; s.len()];

    let mut cur = Vec::new();
    let mut next = Vec::new();
    let mut x = vec![0usize; n];
    for y in 0..mb {
        loop {
            cur.clear();
            cur.resize(hidden * ob, 0.0);
            for b in 0..ob {
                for lam in 0..hidden {
                    cur[lam + hidden * b] = hub[(lam * mb + y) * ob + b];
                }
            }
            let mut lead = hidden;
            let mut outer = ob;
            for j in (0..n).rev() {
                let d = edges[j].dim;
                let rest = lead / d;
                let w = &edges[j].data[x[j] * o[j] * d..(x[j] + 1) * o[j] * d];
                next.clear();
                next.resize(rest * o[j] * outer, 0.0);
                for q in 0..outer {
                    for a in 0..o[j] {
                        let wa = &w[a * d..(a + 1) * d];
                        let dst = &mut next[rest * (a + o[j] * q)..rest * (a + o[j] * q + 1)];
                        for (lj, &wv) in wa.iter().enumerate() {
                            if wv == 0.0 {
                                continue;
                            }
                            let src = &cur[rest * (lj + d * q)..rest * (lj + d * q + 1)];
                            for (acc, &c) in dst.iter_mut().zip(src) {
                                *acc += wv * c;
                            }
                        }
                    }
                }
                std::mem::swap(&mut cur, &mut next);
                lead = rest;
                outer *= o[j];
            }
            debug_assert_eq!(cur.len(), outs);
            let in_flat = x
                .iter()
                .zip(m)
                .rev()
                .fold(y, |acc, (&xi, &mi)| acc * mi + xi);
            values[in_flat * outs..(in_flat + 1) * outs].copy_from_slice(&cur);
            if !crate::index::advance(&mut x, m) {
                break;
            }
        }
    }
    values
}
