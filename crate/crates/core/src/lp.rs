//! A small dense simplex solver over exact rationals.
//!
//! Solves `maximize c·x subject to A x = b, x >= 0` with a two-phase method and
//! Bland's rule, so it terminates on degenerate problems. Sizes here are tiny
//! (Picard rank by number of cone generators), so no effort goes into sparsity.

use crate::rational::{Rational, RationalExt, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, x: Vec<Rational> },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for j in 0..self.rows[i].len() {
                let d = &f * &self.rows[r][j];
                self.rows[i][j] -= d;
            }
            let d = &f * &self.rhs[r];
            self.rhs[i] -= d;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations maximizing `cost·x`; returns false if unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        let ncols = cost.len();
        loop {
            let entering = (0..ncols).filter(|&j| allowed[j]).find(|&j| {
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    r -= &cost[b] * &self.rows[i][j];
                }
                r.is_positive()
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, v)| &cost[b] * v)
            .fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Maximizes `c·x` over `{x >= 0 : a x = b}`.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r: Vec<Rational> = row
            .iter()
            .map(|x| if flip { -x.clone() } else { x.clone() })
            .collect();
        r.extend((0..m).map(|k| {
            if k == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        rows.push(r);
        rhs.push(if flip { -b[i].clone() } else { b[i].clone() });
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
    };

    // phase one: drive the artificials to zero
    let mut cost1 = vec![Rational::zero(); n + m];
    for v in cost1.iter_mut().skip(n) {
        *v = -Rational::one();
    }
    let all = vec![true; n + m];
    t.optimize(&cost1, &all);
    if t.value(&cost1).is_negative() {
        return LpOutcome::Infeasible;
    }
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            }
        }
    }

    let mut cost2: Vec<Rational> = c.to_vec();
    cost2.extend((0..m).map(|_| Rational::zero()));
    let allowed: Vec<bool> = (0..n + m).map(|j| j < n).collect();
    if !t.optimize(&cost2, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            x[bi] = t.rhs[i].clone();
        }
    }
    LpOutcome::Optimal {
        value: t.value(&cost2),
        x,
    }
}
