//! Exact rational linear algebra: elimination with a caller-controlled row
//! order, positive-definite Gram pivot extraction, dense solves and a small
//! exact LP used for convex-hull membership.
//!
//! Row order matters semantically here: essential multi-exponents are defined
//! as the rows at which the rank jumps when rows are processed in ascending
//! monomial order, so none of these routines reorder rows for pivot quality.

use crate::rat::{rat, Rat};
use num::{Signed, Zero};

/// Incremental row-space basis over the rationals.
///
/// Rows are inserted in the caller's order; `insert` returns true when the row
/// enlarged the span (i.e. the row is a pivot row).
#[derive(Default, Clone)]
pub struct RowBasis {
    /// Reduced rows, each paired with its leading column.
    rows: Vec<(usize, Vec<Rat>)>,
}

impl RowBasis {
    pub fn new() -> Self {
        RowBasis { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis; returns true and stores the remainder
    /// when it is nonzero.
    pub fn insert(&mut self, mut row: Vec<Rat>) -> bool {
        for (lead, basis_row) in &self.rows {
            if !row[*lead].is_zero() {
                let c = row[*lead].clone();
                for (x, b) in row.iter_mut().zip(basis_row.iter()) {
                    *x -= &c * b;
                }
            }
        }
        match row.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(lead) => {
                let inv = row[lead].clone();
                for x in row.iter_mut() {
                    *x /= &inv;
                }
                self.rows.push((lead, row));
                true
            }
        }
    }
}

/// Rank of a rational matrix (rows processed in the given order).
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut basis = RowBasis::new();
    for r in rows {
        basis.insert(r.clone());
    }
    basis.rank()
}

/// Rank of an integer matrix over the rationals.
pub fn int_rank(rows: &[Vec<i64>]) -> usize {
    let rat_rows: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| rat(x)).collect())
        .collect();
    rank(&rat_rows)
}

/// Solves the square system `a * x = b` by exact Gaussian elimination.
///
/// Returns None when `a` is singular.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let c = m[r][col].clone();
                for k in col..=n {
                    let v = &c * &m[col][k];
                    m[r][k] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Incremental pivot extraction for a positive semidefinite Gram pairing.
///
/// Vectors are presented in ascending order through their pairings with the
/// current pivots and with themselves; a vector is a pivot exactly when its
/// residual norm against the span of the previous pivots is nonzero. For a
/// positive semidefinite form this residual test is equivalent to the rank
/// jump of the nested Gram matrices.
pub struct GramPivoter {
    /// Gram matrix of the accepted pivots.
    gram: Vec<Vec<Rat>>,
}

impl Default for GramPivoter {
    fn default() -> Self {
        Self::new()
    }
}

impl GramPivoter {
    pub fn new() -> Self {
        GramPivoter { gram: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    /// `cross[i]` must be the pairing of the candidate with the i-th accepted
    /// pivot and `norm` its pairing with itself. Returns true when the
    /// candidate is a new pivot.
    pub fn offer(&mut self, cross: &[Rat], norm: &Rat) -> bool {
        assert_eq!(cross.len(), self.gram.len());
        let residual = match self.residual(cross, norm) {
            Some(r) => r,
            None => return false,
        };
        if residual.is_zero() {
            return false;
        }
        assert!(
            residual.is_positive(),
            "Gram residual must be nonnegative for a contravariant form"
        );
        for (row, c) in self.gram.iter_mut().zip(cross.iter()) {
            row.push(c.clone());
        }
        let mut new_row: Vec<Rat> = cross.to_vec();
        new_row.push(norm.clone());
        self.gram.push(new_row);
        true
    }

    /// Coordinates of a dependent vector in the pivot basis, via a Gram solve.
    pub fn coordinates(&self, cross: &[Rat]) -> Vec<Rat> {
        if self.gram.is_empty() {
            return Vec::new();
        }
        solve(&self.gram, cross).expect("pivot Gram matrix must be invertible")
    }

    fn residual(&self, cross: &[Rat], norm: &Rat) -> Option<Rat> {
        if self.gram.is_empty() {
            return Some(norm.clone());
        }
        let x = solve(&self.gram, cross)?;
        let mut res = norm.clone();
        for (c, xi) in cross.iter().zip(x.iter()) {
            res -= c * xi;
        }
        Some(res)
    }
}

/// Exact feasibility test for `z in conv(points)` via Phase-I simplex with
/// Bland's rule.
pub fn in_convex_hull(points: &[Vec<i64>], z: &[i64]) -> bool {
    if points.is_empty() {
        return false;
    }
    let dim = z.len();
    let rows = dim + 1;
    let cols = points.len();
    // Equality system: sum_j t_j * p_j = z, sum_j t_j = 1, t >= 0.
    // Phase I: minimize the sum of artificial variables.
    let mut b: Vec<Rat> = z.iter().map(|&v| rat(v)).collect();
    b.push(rat(1));
    let mut a: Vec<Vec<Rat>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    if i < dim {
                        rat(points[j][i])
                    } else {
                        rat(1)
                    }
                })
                .collect()
        })
        .collect();
    // Make all right-hand sides nonnegative.
    for i in 0..rows {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            for x in a[i].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    // Tableau with artificial basis: columns 0..cols are the t_j, columns
    // cols..cols+rows the artificials.
    let total = cols + rows;
    let mut tab: Vec<Vec<Rat>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rat> = Vec::with_capacity(total + 1);
            row.extend(a[i].iter().cloned());
            for k in 0..rows {
                row.push(if k == i { rat(1) } else { rat(0) });
            }
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    // Objective row: sum of artificial rows (to be driven to zero).
    let mut obj: Vec<Rat> = vec![rat(0); total + 1];
    for row in tab.iter() {
        for (o, v) in obj.iter_mut().zip(row.iter()) {
            *o += v;
        }
    }
    loop {
        // Bland: first column with positive reduced cost among the real vars
        // and artificials not in the basis.
        let entering = (0..total).find(|&j| obj[j].is_positive() && !basis.contains(&j));
        let Some(col) = entering else {
            break;
        };
        // Ratio test; Bland tie-break by smallest basis variable index.
        let mut best: Option<(Rat, usize)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[total] / &row[col];
                let better = match &best {
                    None => true,
                    Some((r, pi)) => ratio < *r || (ratio == *r && basis[i] < basis[*pi]),
                };
                if better {
                    best = Some((ratio, i));
                }
            }
        }
        let Some((_, pr)) = best else {
            // Unbounded Phase-I objective cannot happen; treat as infeasible.
            return false;
        };
        let inv = tab[pr][col].clone();
        for x in tab[pr].iter_mut() {
            *x /= &inv;
        }
        for i in 0..rows {
            if i != pr && !tab[i][col].is_zero() {
                let c = tab[i][col].clone();
                for k in 0..=total {
                    let v = &c * &tab[pr][k];
                    tab[i][k] -= v;
                }
            }
        }
        if !obj[col].is_zero() {
            let c = obj[col].clone();
            for k in 0..=total {
                let v = &c * &tab[pr][k];
                obj[k] -= v;
            }
        }
        basis[pr] = col;
    }
    obj[total].is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    #[test]
    fn rank_and_solve() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4], &[0, 1]])), 2);
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[rat(5), rat(10)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(3)]);
        assert!(solve(&m(&[&[1, 2], &[2, 4]]), &[rat(1), rat(2)]).is_none());
    }

    #[test]
    fn gram_pivots_detect_dependence() {
        // Vectors (1,0), (0,1), (1,1) with the standard inner product.
        let mut g = GramPivoter::new();
        assert!(g.offer(&[], &rat(1)));
        assert!(g.offer(&[rat(0)], &rat(1)));
        assert!(!g.offer(&[rat(1), rat(1)], &rat(2)));
        let coords = g.coordinates(&[rat(1), rat(1)]);
        assert_eq!(coords, vec![rat(1), rat(1)]);
    }

    #[test]
    fn hull_membership() {
        let square = vec![vec![0, 0], vec![2, 0], vec![0, 2], vec![2, 2]];
        assert!(in_convex_hull(&square, &[1, 1]));
        assert!(in_convex_hull(&square, &[2, 2]));
        assert!(!in_convex_hull(&square, &[3, 1]));
        // Degenerate (lower-dimensional) hulls work too.
        let seg = vec![vec![0, 0], vec![2, 2]];
        assert!(in_convex_hull(&seg, &[1, 1]));
        assert!(!in_convex_hull(&seg, &[1, 0]));
    }
}
