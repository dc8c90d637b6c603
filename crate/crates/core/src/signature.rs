//! Inertia of symmetric rational forms by congruence (Sylvester's law).

use crate::rational::{Rational, RationalExt, Scalar};

/// Counts of positive, negative and zero diagonal entries after diagonalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn is_hyperbolic(&self, rank: usize) -> bool {
        self.positive == 1 && self.negative + 1 == rank && self.zero == 0
    }

    pub fn is_positive_definite(&self, rank: usize) -> bool {
        self.positive == rank
    }
}

/// Diagonalizes `m` by symmetric row/column operations and reads off the signs.
///
/// `m` must be square and symmetric; only the upper triangle is trusted.
pub fn inertia(m: &[Vec<Rational>]) -> Inertia {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| m[i.min(j)][i.max(j)].clone()).collect())
        .collect();
    let mut out = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
    };

    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(p) = (k + 1..n).find(|&p| !a[p][p].is_zero()) {
                swap_sym(&mut a, k, p);
            } else if let Some(p) = (k + 1..n).find(|&p| !a[k][p].is_zero()) {
                // a_kk = a_pp = 0 and a_kp != 0: e_k += e_p gives a_kk = 2 a_kp.
                add_sym(&mut a, k, p);
            } else if let Some((p, q)) = (k + 1..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .find(|&(p, q)| !a[p][q].is_zero())
            {
                // row k is already zero; bring a nonzero pair forward.
                swap_sym(&mut a, k, p);
                add_sym(&mut a, k, q);
            }
        }
        let pivot = a[k][k].clone();
        if pivot.is_zero() {
            out.zero += 1;
            continue;
        }
        if pivot.is_positive() {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
        // Schur complement of the pivot.
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &pivot;
            let (top, rest) = a.split_at_mut(i);
            for (x, y) in rest[0][k + 1..].iter_mut().zip(&top[k][k + 1..]) {
                *x -= &factor * y;
            }
        }
        for row in &mut a[k + 1..] {
            row[k] = Rational::zero();
        }
        for x in &mut a[k][k + 1..] {
            *x = Rational::zero();
        }
    }
    out
}

fn swap_sym(a: &mut [Vec<Rational>], i: usize, j: usize) {
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Congruence by the elementary matrix sending e_i to e_i + e_j.
fn add_sym(a: &mut [Vec<Rational>], i: usize, j: usize) {
    let row_j = a[j].clone();
    for (x, v) in a[i].iter_mut().zip(row_j) {
        *x += v;
    }
    for row in a.iter_mut() {
        let v = row[j].clone();
        row[i] += v;
    }
}
