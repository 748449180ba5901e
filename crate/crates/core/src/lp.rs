//! Dense two-phase simplex for `min c·x  s.t.  A x = b, x ≥ 0`.
//!
//! Bland's rule (lowest eligible index enters, lowest basic index leaves on
//! ties) rules out cycling. Redundant equality rows are detected after
//! phase 1 and dropped.

use crate::error::{Error, Result};

/// Largest tableau (entries) the solver will allocate.
pub const TABLEAU_CAP: usize = 60_000_000;

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub rows: usize,
    pub cols: usize,
    /// Row-major constraint matrix.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Optimal phase-1 value: the least total constraint violation.
    pub infeasibility: f64,
    pub pivots: usize,
}

struct Tableau {
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    rows: usize,
    pivots: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    /// Objective row lives at index `rows`.
    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.t[pr * w + pc];
        for v in &mut self.t[pr * w..(pr + 1) * w] {
            *v /= p;
        }
        let (before, rest) = self.t.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Runs Bland's rule over columns `< allowed`; false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let obj = self.rows;
            let Some(pc) = (0..allowed).find(|&j| self.at(obj, j) < -COST_EPS) else {
                return true;
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    best = match best {
                        Some((br, bv))
                            if ratio > bv + 1e-12
                                || ((ratio - bv).abs() <= 1e-12
                                    && self.basis[r] > self.basis[br]) =>
                        {
                            Some((br, bv))
                        }
                        _ => Some((r, ratio)),
                    };
                }
            }
            match best {
                Some((pr, _)) => self.pivot(pr, pc),
                None => return false,
            }
        }
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width;
        self.t.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.rows -= 1;
    }
}

impl LinearProgram {
    pub fn new(rows: usize, cols: usize, a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if a.len() != rows * cols || b.len() != rows || c.len() != cols {
            return Err(Error::Shape {
                expected: rows * cols,
                found: a.len(),
            });
        }
        Ok(LinearProgram {
            rows,
            cols,
            a,
            b,
            c,
        })
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let (m, n) = (self.rows, self.cols);
        let width = n + m + 1;
        let size = (m + 1).saturating_mul(width);
        if size > TABLEAU_CAP {
            return Err(Error::CapExceeded {
                what: "simplex tableau",
                size,
                cap: TABLEAU_CAP,
            });
        }
        let mut t = vec![0.0; size];
        for r in 0..m {
            let sign = if self.b[r] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[r * width + j] = sign * self.a[r * n + j];
            }
            t[r * width + n + r] = 1.0;
            t[r * width + width - 1] = sign * self.b[r];
        }
        // phase-1 objective: minimize the sum of artificials
        for r in 0..m {
            for j in 0..width {
                if !(n..n + m).contains(&j) {
                    t[m * width + j] -= t[r * width + j];
                }
            }
        }
        let mut tab = Tableau {
            width,
            t,
            basis: (n..n + m).collect(),
            rows: m,
            pivots: 0,
        };
        tab.optimize(n + m);
        let infeasibility = (-tab.rhs(tab.rows)).max(0.0);

        // drive artificials out of the basis; rows where that fails are redundant
        let mut r = 0;
        while r < tab.rows {
            if tab.basis[r] >= n {
                match (0..n).find(|&j| tab.at(r, j).abs() > PIVOT_EPS) {
                    Some(j) => {
                        tab.pivot(r, j);
                        r += 1;
                    }
                    None => tab.remove_row(r),
                }
            } else {
                r += 1;
            }
        }

        let extract = |tab: &Tableau| {
            let mut x = vec![0.0; n];
            for (r, &bv) in tab.basis.iter().enumerate() {
                if bv < n {
                    x[bv] = tab.rhs(r).max(0.0);
                }
            }
            x
        };
        let scale = self.b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > 1e-9 * scale {
            let x = extract(&tab);
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: f64::NAN,
                x,
                infeasibility,
                pivots: tab.pivots,
            });
        }

        // phase 2 objective row: reduced costs c_j - c_B B^-1 A_j
        let obj = tab.rows;
        for j in 0..width {
            tab.t[obj * width + j] = if j < n { self.c[j] } else { 0.0 };
        }
        for r in 0..tab.rows {
            let cb = self.c[tab.basis[r]];
            if cb != 0.0 {
                for j in 0..width {
                    tab.t[obj * width + j] -= cb * tab.t[r * width + j];
                }
            }
        }
        let bounded = tab.optimize(n);
        let x = extract(&tab);
        let objective = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            status: if bounded {
                LpStatus::Optimal
            } else {
                LpStatus::Unbounded
            },
            x,
            objective,
            infeasibility,
            pivots: tab.pivots,
        })
    }
}
