//! Exact small linear programs by vertex enumeration.

use num_traits::Zero;

use super::Cone;
use crate::linalg::{self, Q, QVec};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Q, point: QVec },
    Unbounded,
    Infeasible,
}

/// Affine constraint `row·x >= rhs` or `row·x = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub row: QVec,
    pub rhs: Q,
}

impl Constraint {
    pub fn new(row: QVec, rhs: Q) -> Self {
        Constraint { row, rhs }
    }

    fn holds_ge(&self, x: &[Q]) -> bool {
        linalg::dot(&self.row, x) >= self.rhs
    }

    fn holds_eq(&self, x: &[Q]) -> bool {
        linalg::dot(&self.row, x) == self.rhs
    }
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        if idx[i] == i + n - k {
            return;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Vertices of `{x | eq, ineq}` in dimension `dim`, sorted and deduplicated.
/// The polyhedron is assumed pointed; a non-pointed polyhedron has none.
pub fn vertices(dim: usize, eqs: &[Constraint], ineqs: &[Constraint]) -> Vec<QVec> {
    let eq_rank = linalg::rank(&eqs.iter().map(|c| c.row.clone()).collect::<Vec<_>>(), dim);
    let need = dim - eq_rank.min(dim);
    let mut out: Vec<QVec> = Vec::new();
    combinations(ineqs.len(), need, |sel| {
        let mut rows: Vec<QVec> = eqs.iter().map(|c| c.row.clone()).collect();
        let mut rhs: QVec = eqs.iter().map(|c| c.rhs.clone()).collect();
        for &i in sel {
            rows.push(ineqs[i].row.clone());
            rhs.push(ineqs[i].rhs.clone());
        }
        if linalg::rank(&rows, dim) != dim {
            return;
        }
        let Some(x) = solve_overdetermined(&rows, &rhs, dim) else { return };
        if eqs.iter().all(|c| c.holds_eq(&x)) && ineqs.iter().all(|c| c.holds_ge(&x)) && !out.contains(&x) {
            out.push(x);
        }
    });
    out.sort();
    out
}

/// Unique solution of a consistent full-column-rank system.
fn solve_overdetermined(rows: &[QVec], rhs: &[Q], dim: usize) -> Option<QVec> {
    let aug: Vec<QVec> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let (red, piv) = linalg::rref(&aug, dim + 1);
    if piv.contains(&dim) || piv.len() != dim {
        return None;
    }
    Some(red.iter().take(dim).map(|r| r[dim].clone()).collect())
}

/// Minimizes `c·x` subject to `row·x >= rhs` for every constraint.
pub fn minimize(c: &[Q], ineqs: &[Constraint]) -> LpOutcome {
    let dim = c.len();
    if dim == 0 {
        return if ineqs.iter().all(|k| k.rhs <= Q::zero()) {
            LpOutcome::Optimal { value: Q::zero(), point: Vec::new() }
        } else {
            LpOutcome::Infeasible
        };
    }
    let rows: Vec<QVec> = ineqs.iter().map(|k| k.row.clone()).collect();
    let recession = Cone::from_inequalities(dim, &rows);
    // Restrict to the orthogonal complement of the lineality so that the
    // feasible set is pointed; translating along lineality changes nothing.
    let lin = recession.lineality().basis().to_vec();
    let eqs: Vec<Constraint> = lin.iter().map(|l| Constraint::new(l.clone(), Q::zero())).collect();
    let verts = vertices(dim, &eqs, ineqs);
    if verts.is_empty() {
        return LpOutcome::Infeasible;
    }
    if recession.generators().iter().any(|g| linalg::dot(c, g) < Q::zero())
        || lin.iter().any(|l| !linalg::dot(c, l).is_zero())
    {
        return LpOutcome::Unbounded;
    }
    let best = verts.into_iter().min_by(|a, b| linalg::dot(c, a).cmp(&linalg::dot(c, b))).unwrap();
    LpOutcome::Optimal { value: linalg::dot(c, &best), point: best }
}
