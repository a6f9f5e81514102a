//! H-descriptions of the explicitly known cones and polytopes, exact lattice
//! point enumeration, convex-hull saturation reports and set comparisons.

use crate::essential::EssentialSet;
use crate::orders::MultiExp;
use crate::pbw::BirationalSequence;
use crate::rat::{rat, Rat};
use crate::rootsys::{Family, RootId, RootSystem};
use crate::{Error, Result};
use num::{Signed, Zero};
use std::collections::BTreeSet;

/// Finite list of rational inequalities <a, x> <= b.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolyhedron {
    pub dim: usize,
    pub inequalities: Vec<(Vec<Rat>, Rat, String)>,
}

impl HPolyhedron {
    pub fn new(dim: usize) -> Self {
        HPolyhedron {
            dim,
            inequalities: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<Rat>, bound: Rat, label: impl Into<String>) {
        assert_eq!(coeffs.len(), self.dim);
        self.inequalities.push((coeffs, bound, label.into()));
    }

    /// Adds x_i >= 0 for every coordinate.
    pub fn with_nonnegativity(mut self) -> Self {
        for i in 0..self.dim {
            let mut coeffs = vec![rat(0); self.dim];
            coeffs[i] = rat(-1);
            self.inequalities
                .push((coeffs, rat(0), format!("nonneg:x{}", i + 1)));
        }
        self
    }

    pub fn contains_int(&self, point: &[i64]) -> bool {
        assert_eq!(point.len(), self.dim);
        self.inequalities.iter().all(|(a, b, _)| {
            let lhs: Rat = a.iter().zip(point.iter()).map(|(c, &x)| c * rat(x)).sum();
            lhs <= *b
        })
    }

    pub fn intersect(mut self, other: &HPolyhedron) -> Self {
        assert_eq!(self.dim, other.dim);
        self.inequalities.extend(other.inequalities.iter().cloned());
        self
    }
}

// ---------------------------------------------------------------------
// Dyck paths and the FFLV polytopes
// ---------------------------------------------------------------------

/// Type A root label alpha_{i,j} (one-based, i <= j).
fn type_a_label(rs: &RootSystem, root: RootId) -> (usize, usize) {
    let coords = &rs.positive_roots[root];
    let i = coords.iter().position(|&c| c == 1).unwrap();
    let j = coords.iter().rposition(|&c| c == 1).unwrap();
    (i + 1, j + 1)
}

/// Enumerates all type A Dyck paths as root-id sequences.
pub fn dyck_paths_a(rs: &RootSystem) -> Vec<Vec<RootId>> {
    let n = rs.rank();
    let id_of = |p: usize, q: usize| -> RootId {
        let mut v = vec![0i64; n];
        for c in v.iter_mut().take(q).skip(p - 1) {
            *c = 1;
        }
        rs.root_id(&v).expect("alpha_{p,q}")
    };
    let mut out = Vec::new();
    for start in 1..=n {
        let mut stack = vec![vec![(start, start)]];
        while let Some(path) = stack.pop() {
            let &(p, q) = path.last().unwrap();
            if p == q {
                out.push(path.iter().map(|&(a, b)| id_of(a, b)).collect());
            }
            if q + 1 <= n {
                let mut next = path.clone();
                next.push((p, q + 1));
                stack.push(next);
            }
            if p + 1 <= q {
                let mut next = path.clone();
                next.push((p + 1, q));
                stack.push(next);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Root id of alpha_{i,j} (barred = alpha_{i, bar j}) in type C.
fn type_c_id(rs: &RootSystem, i: usize, j: usize, barred: bool) -> Option<RootId> {
    let n = rs.rank();
    if i > j || j > n {
        return None;
    }
    let mut v = vec![0i64; n];
    if !barred {
        for c in v.iter_mut().take(j).skip(i - 1) {
            *c = 1;
        }
    } else {
        // alpha_i + ... + alpha_n + alpha_{n-1} + ... + alpha_j
        for (k, c) in v.iter_mut().enumerate().take(n).skip(i - 1) {
            *c = if k + 1 >= j && k + 1 <= n - 1 { 2 } else { 1 };
        }
    }
    rs.root_id(&v)
}

/// Symplectic Dyck paths as (row, column, barred) label sequences over the
/// alphabet 1 < ... < n < bar(n-1) < ... < bar(1).
fn symplectic_paths(n: usize) -> Vec<Vec<(usize, usize, bool)>> {
    let succ = |q: usize, barred: bool| -> Option<(usize, bool)> {
        if !barred {
            if q < n {
                Some((q + 1, false))
            } else if n >= 2 {
                Some((n - 1, true))
            } else {
                None
            }
        } else if q > 1 {
            Some((q - 1, true))
        } else {
            None
        }
    };
    let valid = |r: usize, q: usize, barred: bool| -> bool {
        if barred {
            r <= q && q <= n - 1
        } else {
            r <= q && q <= n
        }
    };
    let mut out = Vec::new();
    for start in 1..=n {
        let mut stack = vec![vec![(start, start, false)]];
        while let Some(path) = stack.pop() {
            let &(r, q, barred) = path.last().unwrap();
            if r == q {
                // Ends at a simple root (unbarred) or at alpha_{j, bar j}.
                out.push(path.clone());
            }
            if let Some((q2, b2)) = succ(q, barred) {
                if valid(r, q2, b2) {
                    let mut next = path.clone();
                    next.push((r, q2, b2));
                    stack.push(next);
                }
            }
            let r2 = r + 1;
            if r2 <= n && valid(r2, q, barred) {
                let mut next = path.clone();
                next.push((r2, q, barred));
                stack.push(next);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The Dyck-path polytope in position coordinates of the given PBW-type
/// sequence, with the weight lambda substituted on the right-hand sides.
pub fn fflv_polytope(
    rs: &RootSystem,
    seq: &BirationalSequence,
    lambda: &[i64],
) -> Result<HPolyhedron> {
    if !seq.is_repetition_free() {
        return Err(Error::Invalid(
            "the Dyck-path polytope needs a PBW-type sequence".into(),
        ));
    }
    let n = rs.rank();
    let pos_of_root = |r: RootId| seq.roots.iter().position(|&x| x == r).unwrap();
    let mut poly = HPolyhedron::new(seq.len());
    match rs.spec.family {
        Family::A => {
            for path in dyck_paths_a(rs) {
                let (i, _) = type_a_label(rs, path[0]);
                let (j, _) = type_a_label(rs, *path.last().unwrap());
                let mut coeffs = vec![rat(0); seq.len()];
                for &root in &path {
                    coeffs[pos_of_root(root)] += rat(1);
                }
                let bound: i64 = lambda[(i - 1)..j].iter().sum();
                let label = format!(
                    "dyck:{}->{}",
                    rs.root_name(path[0]),
                    rs.root_name(*path.last().unwrap())
                );
                poly.push(coeffs, rat(bound), label);
            }
        }
        Family::C => {
            for path in symplectic_paths(n) {
                let (i, _, _) = path[0];
                let &(j, _, barred) = path.last().unwrap();
                let mut coeffs = vec![rat(0); seq.len()];
                let mut ids = Vec::new();
                for &(r, q, b) in &path {
                    let id = type_c_id(rs, r, q, b)
                        .ok_or_else(|| Error::Inconsistent("bad symplectic label".into()))?;
                    ids.push(id);
                    coeffs[pos_of_root(id)] += rat(1);
                }
                // Paths ending at alpha_j bound x_i + .. + x_j; paths ending
                // at alpha_{j, bar j} bound x_i + .. + x_n.
                let hi = if barred { n } else { j };
                let bound: i64 = lambda[(i - 1)..hi].iter().sum();
                let label = format!(
                    "dyck:{}->{}",
                    rs.root_name(ids[0]),
                    rs.root_name(*ids.last().unwrap())
                );
                poly.push(coeffs, rat(bound), label);
            }
        }
        _ => {
            return Err(Error::Invalid(
                "Dyck-path polytopes exist for types A and C only".into(),
            ))
        }
    }
    Ok(poly.with_nonnegativity())
}

/// The chain cone of sl_{n+1} for the word w0 = s1 (s2 s1) ... (sn ... s1),
/// in the coordinates (p_{1,1}, p_{2,2}, p_{2,1}, ..., p_{n,n}, ..., p_{n,1}).
pub fn gt_cone(n: usize) -> HPolyhedron {
    let total = n * (n + 1) / 2;
    let mut poly = HPolyhedron::new(total);
    let mut offset = 0;
    for k in 1..=n {
        // Row k occupies positions offset..offset + k as (p_{k,k}, ..., p_{k,1}).
        for t in 0..(k - 1) {
            let mut coeffs = vec![rat(0); total];
            coeffs[offset + t] = rat(-1);
            coeffs[offset + t + 1] = rat(1);
            poly.push(
                coeffs,
                rat(0),
                format!("chain:p[{k},{}]>=p[{k},{}]", k - t, k - t - 1),
            );
        }
        offset += k;
    }
    poly.with_nonnegativity()
}

/// The explicit sp4 polytope at weight (l1, l2).
pub fn sp4_polytope(l1: i64, l2: i64) -> HPolyhedron {
    assert!(l1 >= 0 && l2 >= 0);
    let mut poly = HPolyhedron::new(4);
    poly.push(vec![rat(1), rat(0), rat(0), rat(0)], rat(l1), "x1<=l1");
    poly.push(vec![rat(0), rat(0), rat(0), rat(1)], rat(l2), "x4<=l2");
    poly.push(
        vec![rat(2), rat(1), rat(2), rat(2)],
        rat(2 * (l1 + l2)),
        "2x1+x2+2x3+2x4<=2(l1+l2)",
    );
    poly.push(
        vec![rat(1), rat(1), rat(1), rat(2)],
        rat(l1 + 2 * l2),
        "x1+x2+x3+2x4<=l1+2l2",
    );
    poly.with_nonnegativity()
}

/// Appends the string-cone weight inequalities
/// m_k <= <lambda, alpha_{i_k}^vee> - sum_{l>k} <alpha_{i_l}, alpha_{i_k}^vee> m_l.
pub fn string_weight_truncation(
    cone: &HPolyhedron,
    rs: &RootSystem,
    word: &[usize],
    lambda: &[i64],
) -> Result<HPolyhedron> {
    let n = word.len();
    if cone.dim != n {
        return Err(Error::Invalid(format!(
            "word length {} must match the cone dimension {}",
            n, cone.dim
        )));
    }
    rs.roots_from_reduced_word(word)?;
    let mut out = cone.clone();
    for k in 0..n {
        let ik = word[k];
        let mut coeffs = vec![rat(0); n];
        coeffs[k] = rat(1);
        for (l, &il) in word.iter().enumerate().skip(k + 1) {
            // <alpha_{i_l}, alpha_{i_k}^vee>
            coeffs[l] += rat(rs.cartan[ik][il]);
        }
        out.push(coeffs, rat(lambda[ik]), format!("weight:k={}", k + 1));
    }
    Ok(out)
}


fn propagate_intervals(poly: &HPolyhedron) -> (Vec<Option<Rat>>, Vec<Option<Rat>>) {
    let mut lo: Vec<Option<Rat>> = vec![None; poly.dim];
    let mut hi: Vec<Option<Rat>> = vec![None; poly.dim];
    for _ in 0..poly.dim + 2 {
        for (a, b, _) in &poly.inequalities {
            for i in 0..poly.dim {
                if a[i].is_zero() {
                    continue;
                }
                let mut rest = b.clone();
                let mut ok = true;
                for j in 0..poly.dim {
                    if j == i || a[j].is_zero() {
                        continue;
                    }
                    let contrib = if a[j].is_positive() {
                        lo[j].clone().map(|v| &a[j] * v)
                    } else {
                        hi[j].clone().map(|v| &a[j] * v)
                    };
                    match contrib {
                        Some(c) => rest -= c,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let value = &rest / &a[i];
                if a[i].is_positive() {
                    if hi[i].as_ref().map(|h| value < *h).unwrap_or(true) {
                        hi[i] = Some(value);
                    }
                } else if lo[i].as_ref().map(|l| value > *l).unwrap_or(true) {
                    lo[i] = Some(value);
                }
            }
        }
    }
    (lo, hi)
}

/// Exact lattice-point enumeration by recursive interval bounding inside a
/// caller-provided box. Fails with a witness direction when the inequality
/// system cannot certify boundedness by interval propagation.
pub fn lattice_points(poly: &HPolyhedron, box_bound: &[(i64, i64)]) -> Result<BTreeSet<Vec<i64>>> {
    assert_eq!(box_bound.len(), poly.dim);
    let (lo, hi) = propagate_intervals(poly);
    for i in 0..poly.dim {
        if lo[i].is_none() || hi[i].is_none() {
            let mut ray = vec![0i64; poly.dim];
            ray[i] = if hi[i].is_none() { 1 } else { -1 };
            return Err(Error::Invalid(format!(
                "unbounded direction detected: ray {ray:?}"
            )));
        }
    }
    let mut out = BTreeSet::new();
    let mut point = vec![0i64; poly.dim];
    enumerate(poly, box_bound, 0, &mut point, &mut out);
    Ok(out)
}

fn enumerate(
    poly: &HPolyhedron,
    box_bound: &[(i64, i64)],
    depth: usize,
    point: &mut Vec<i64>,
    out: &mut BTreeSet<Vec<i64>>,
) {
    if depth == poly.dim {
        out.insert(point.clone());
        return;
    }
    let mut lo = rat(box_bound[depth].0);
    let mut hi = rat(box_bound[depth].1);
    for (a, b, _) in &poly.inequalities {
        if a[depth].is_zero() {
            continue;
        }
        let mut rest = b.clone();
        for (j, aj) in a.iter().enumerate() {
            if j == depth || aj.is_zero() {
                continue;
            }
            if j < depth {
                rest -= aj * rat(point[j]);
            } else {
                // Minimal possible contribution over the box.
                let extreme = if aj.is_positive() {
                    rat(box_bound[j].0)
                } else {
                    rat(box_bound[j].1)
                };
                rest -= aj * extreme;
            }
        }
        let value = &rest / &a[depth];
        if a[depth].is_positive() {
            if value < hi {
                hi = value;
            }
        } else if value > lo {
            lo = value;
        }
    }
    let lo_int = lo.ceil().to_integer();
    let hi_int = hi.floor().to_integer();
    let mut v = lo_int.clone();
    while v <= hi_int {
        point[depth] = i64::try_from(&v).expect("coordinate fits i64");
        enumerate(poly, box_bound, depth + 1, point, out);
        v += 1;
    }
}

/// A safe integer enumeration box from interval propagation over the
/// inequality system alone; fails when some direction stays unbounded.
pub fn propagated_box(poly: &HPolyhedron) -> Result<Vec<(i64, i64)>> {
    let (lo, hi) = propagate_intervals(poly);
    let mut out = Vec::with_capacity(poly.dim);
    for i in 0..poly.dim {
        match (&lo[i], &hi[i]) {
            (Some(l), Some(h)) => out.push((
                i64::try_from(&l.ceil().to_integer()).unwrap(),
                i64::try_from(&h.floor().to_integer()).unwrap(),
            )),
            _ => {
                return Err(Error::Invalid(format!(
                    "unbounded direction in coordinate {}",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

/// A safe enumeration box from single-inequality relaxations over the
/// nonnegative orthant.
pub fn nonnegative_box(poly: &HPolyhedron) -> Result<Vec<(i64, i64)>> {
    let mut out = Vec::with_capacity(poly.dim);
    for i in 0..poly.dim {
        let mut best: Option<Rat> = None;
        for (a, b, _) in &poly.inequalities {
            if !a[i].is_positive() {
                continue;
            }
            if a.iter().enumerate().any(|(j, c)| j != i && c.is_negative()) {
                continue;
            }
            // With x >= 0 and all other coefficients >= 0: x_i <= b / a_i.
            let bound = b / &a[i];
            if best.as_ref().map(|v| bound < *v).unwrap_or(true) {
                best = Some(bound);
            }
        }
        match best {
            Some(b) if !b.is_negative() => {
                out.push((0, i64::try_from(&b.floor().to_integer()).unwrap()))
            }
            Some(_) => out.push((0, -1)), // empty polytope
            None => {
                return Err(Error::Invalid(format!(
                    "no single-inequality bound for coordinate {}",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Exact symmetric-difference report between two integer point sets.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SetComparison {
    pub equal: bool,
    pub only_in_a: Vec<Vec<i64>>,
    pub only_in_b: Vec<Vec<i64>>,
}

pub fn compare_sets(a: &BTreeSet<Vec<i64>>, b: &BTreeSet<Vec<i64>>) -> Result<SetComparison> {
    if let (Some(x), Some(y)) = (a.iter().next(), b.iter().next()) {
        if x.len() != y.len() {
            return Err(Error::Invalid("ambient dimension mismatch".into()));
        }
    }
    let only_in_a: Vec<Vec<i64>> = a.difference(b).cloned().collect();
    let only_in_b: Vec<Vec<i64>> = b.difference(a).cloned().collect();
    Ok(SetComparison {
        equal: only_in_a.is_empty() && only_in_b.is_empty(),
        only_in_a,
        only_in_b,
    })
}

/// Searches the coordinate permutations sigma with sigma(A) = B; returns the
/// first match in lexicographic order.
pub fn compare_sets_up_to_permutation(
    a: &BTreeSet<Vec<i64>>,
    b: &BTreeSet<Vec<i64>>,
) -> Option<Vec<usize>> {
    let dim = a.iter().next().map(|v| v.len()).unwrap_or(0);
    let mut perm: Vec<usize> = (0..dim).collect();
    let mut perms = Vec::new();
    permutations(&mut perm, 0, &mut perms);
    perms.sort();
    for sigma in perms {
        let mapped: BTreeSet<Vec<i64>> = a
            .iter()
            .map(|v| {
                let mut w = vec![0i64; dim];
                for (i, &x) in v.iter().enumerate() {
                    w[sigma[i]] = x;
                }
                w
            })
            .collect();
        if &mapped == b {
            return Some(sigma);
        }
    }
    None
}

fn permutations(perm: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == perm.len() {
        out.push(perm.clone());
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permutations(perm, k + 1, out);
        perm.swap(k, i);
    }
}

/// Lattice points of conv(es) missing from es; an empty difference is
/// evidence of saturation at this level. Candidates are the weight blocks of
/// the essential weights, which exhaust the lattice points of the hull.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HullReport {
    pub hull_points: usize,
    pub missing_from_es: Vec<MultiExp>,
}

pub fn empirical_hull_report(
    rs: &RootSystem,
    seq: &BirationalSequence,
    es: &EssentialSet,
) -> HullReport {
    let points: Vec<Vec<i64>> = es
        .exponents
        .iter()
        .map(|m| m.iter().map(|&x| x as i64).collect())
        .collect();
    let mut missing = Vec::new();
    let mut hull_points = 0;
    let mut weights: BTreeSet<Vec<i64>> = BTreeSet::new();
    for m in &es.exponents {
        weights.insert(seq.weight_of(rs, m));
    }
    for nu in weights {
        for k in seq.weight_block(rs, &nu) {
            if es.contains(&k) {
                hull_points += 1;
                continue;
            }
            let as_int: Vec<i64> = k.iter().map(|&x| x as i64).collect();
            if crate::linalg::in_convex_hull(&points, &as_int) {
                hull_points += 1;
                missing.push(k);
            }
        }
    }
    missing.sort();
    HullReport {
        hull_points,
        missing_from_es: missing,
    }
}
