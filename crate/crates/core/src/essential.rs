//! Essential multi-exponents, the global essential monoid, dual-basis
//! structure constants, pullback polynomials with their lowest-term
//! valuations, and the dominance test for candidate sequences.

use crate::linalg::RowBasis;
use crate::orders::{MultiExp, OrderSpec};
use crate::pbw::{BirationalSequence, Straightener};
use crate::rat::{factorial, rat, Rat};
use crate::rootsys::RootSystem;
use crate::shapovalov::RepSpace;
use crate::{Error, Result};
use num::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// The essential multi-exponents of V(lambda) for one (S, >) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EssentialSet {
    pub lambda: Vec<i64>,
    pub exponents: BTreeSet<MultiExp>,
}

impl EssentialSet {
    pub fn contains(&self, m: &MultiExp) -> bool {
        self.exponents.contains(m)
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

/// The essential basis of V(lambda): essential exponents sorted ascending in
/// the order, with per-weight-block expansion data.
pub struct EssentialBasis<'a> {
    pub rep: &'a RepSpace<'a>,
    pub seq: BirationalSequence,
    pub order: OrderSpec,
    /// Essential exponents, ascending in the order; index 0 is the zero
    /// exponent (the highest weight vector).
    pub basis: Vec<MultiExp>,
    index: HashMap<MultiExp, usize>,
    /// Per weight nu: global basis indices of the block and the inverse of
    /// the matrix whose columns are their RepSpace coordinates.
    block_data: HashMap<Vec<i64>, (Vec<usize>, Vec<Vec<Rat>>)>,
}

impl<'a> EssentialBasis<'a> {
    pub fn new(
        rep: &'a RepSpace<'a>,
        seq: &BirationalSequence,
        order: &OrderSpec,
    ) -> Result<Self> {
        let rs = rep.rs();
        if order.len() != seq.len() {
            return Err(Error::Invalid("order arity must match the sequence".into()));
        }
        let mut nus: Vec<Vec<i64>> = rep.blocks.keys().cloned().collect();
        nus.sort();
        let mut per_block: HashMap<Vec<i64>, Vec<(MultiExp, Vec<Rat>)>> = HashMap::new();
        for nu in &nus {
            let block = &rep.blocks[nu];
            let mut exps = seq.weight_block(rs, nu);
            exps.sort_by(|a, b| order.cmp(a, b));
            let mut basis = RowBasis::new();
            let mut pivots: Vec<(MultiExp, Vec<Rat>)> = Vec::new();
            for m in exps {
                let (_, v) = rep.s_exponent_vector(seq, &m);
                if v.is_empty() {
                    continue;
                }
                if basis.insert(v.clone()) {
                    pivots.push((m, v));
                }
            }
            if pivots.len() != block.mult {
                return Err(Error::Inconsistent(format!(
                    "block {nu:?}: {} essential exponents but multiplicity {}",
                    pivots.len(),
                    block.mult
                )));
            }
            per_block.insert(nu.clone(), pivots);
        }
        let mut basis: Vec<(Vec<i64>, MultiExp, Vec<Rat>)> = Vec::new();
        for nu in &nus {
            for (m, v) in &per_block[nu] {
                basis.push((nu.clone(), m.clone(), v.clone()));
            }
        }
        basis.sort_by(|a, b| order.cmp(&a.1, &b.1));
        let index: HashMap<MultiExp, usize> = basis
            .iter()
            .enumerate()
            .map(|(i, (_, m, _))| (m.clone(), i))
            .collect();
        let mut block_data = HashMap::new();
        for nu in &nus {
            let members: Vec<usize> = basis
                .iter()
                .enumerate()
                .filter(|(_, (bnu, _, _))| bnu == nu)
                .map(|(i, _)| i)
                .collect();
            let cols: Vec<&Vec<Rat>> = members.iter().map(|&i| &basis[i].2).collect();
            let dim = cols.len();
            let mat: Vec<Vec<Rat>> = (0..dim)
                .map(|r| (0..dim).map(|c| cols[c][r].clone()).collect())
                .collect();
            let inv = invert(&mat).ok_or_else(|| {
                Error::Inconsistent("essential block matrix must be invertible".into())
            })?;
            block_data.insert(nu.clone(), (members, inv));
        }
        Ok(EssentialBasis {
            rep,
            seq: seq.clone(),
            order: order.clone(),
            basis: basis.into_iter().map(|(_, m, _)| m).collect(),
            index,
            block_data,
        })
    }

    pub fn essential_set(&self) -> EssentialSet {
        EssentialSet {
            lambda: self.rep.lambda().to_vec(),
            exponents: self.basis.iter().cloned().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, m: &MultiExp) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of f^S(a) v_lambda in the essential basis (sparse).
    pub fn expand(&self, a: &MultiExp) -> Vec<(usize, Rat)> {
        let (nu, v) = self.rep.s_exponent_vector(&self.seq, a);
        self.expand_block_vector(&nu, &v)
    }

    fn expand_block_vector(&self, nu: &[i64], v: &[Rat]) -> Vec<(usize, Rat)> {
        if v.is_empty() {
            return Vec::new();
        }
        let Some((members, inv)) = self.block_data.get(nu) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (r, row) in inv.iter().enumerate() {
            let mut acc = rat(0);
            for (c, x) in row.iter().zip(v.iter()) {
                if !c.is_zero() && !x.is_zero() {
                    acc += c * x;
                }
            }
            if !acc.is_zero() {
                out.push((members[r], acc));
            }
        }
        out
    }

    /// xi_{lambda,p}(f^S(a) v_lambda).
    pub fn eval_dual(&self, p: &MultiExp, a: &MultiExp) -> Rat {
        let rs = self.rep.rs();
        if self.seq.weight_of(rs, p) != self.seq.weight_of(rs, a) {
            return rat(0);
        }
        let p_idx = self.index[p];
        for (i, c) in self.expand(a) {
            if i == p_idx {
                return c;
            }
        }
        rat(0)
    }

    /// Matrix of f_{beta_pos} on the essential basis.
    pub fn rep_matrix(&self, pos: usize) -> Vec<Vec<Rat>> {
        let dim = self.dim();
        let root = self.seq.roots[pos];
        let mut mat = vec![vec![rat(0); dim]; dim];
        for (col, m) in self.basis.iter().enumerate() {
            let (nu, v) = self.rep.s_exponent_vector(&self.seq, m);
            let (nu2, w) = self.rep.apply_f(root, &nu, &v);
            for (row, c) in self.expand_block_vector(&nu2, &w) {
                mat[row][col] = c;
            }
        }
        mat
    }
}

fn invert(mat: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = mat.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![rat(0); n];
        e[j] = rat(1);
        cols.push(crate::linalg::solve(mat, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Essential multi-exponents of V(lambda).
pub fn essential_set(
    rs: &RootSystem,
    seq: &BirationalSequence,
    order: &OrderSpec,
    lambda: &[i64],
) -> Result<EssentialSet> {
    let rep = RepSpace::new(rs, lambda.to_vec())?;
    let basis = EssentialBasis::new(&rep, seq, order)?;
    Ok(basis.essential_set())
}

/// Essential exponents of the weight-nu block of U(n^-) itself (no lambda):
/// pivots of the canonical-coordinate rank filtration.
pub fn essential_block_nminus(
    rs: &RootSystem,
    seq: &BirationalSequence,
    order: &OrderSpec,
    nu: &[i64],
) -> Vec<MultiExp> {
    let st = Straightener::canonical(rs);
    let mut exps = seq.weight_block(rs, nu);
    exps.sort_by(|a, b| order.cmp(a, b));
    let mut col_index: BTreeMap<MultiExp, usize> = BTreeMap::new();
    let mut sparse: Vec<(MultiExp, Vec<(usize, Rat)>)> = Vec::new();
    for m in exps {
        let letters: Vec<(usize, u32)> = m
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(pos, &e)| (st.slot_of_root(seq.roots[pos]), e))
            .collect();
        let elt = st.word_to_element(&letters);
        let row = elt
            .terms
            .iter()
            .map(|(k, c)| {
                let next = col_index.len();
                (*col_index.entry(k.clone()).or_insert(next), c.clone())
            })
            .collect();
        sparse.push((m, row));
    }
    let width = col_index.len();
    let mut basis = RowBasis::new();
    let mut pivots = Vec::new();
    for (m, row) in sparse {
        let mut dense = vec![rat(0); width];
        for (i, c) in row {
            dense[i] = c;
        }
        if basis.insert(dense) {
            pivots.push(m);
        }
    }
    pivots
}

/// Membership of a single exponent in es(n^-).
pub fn essential_for_nminus(
    rs: &RootSystem,
    seq: &BirationalSequence,
    order: &OrderSpec,
    m: &MultiExp,
) -> bool {
    let nu = seq.weight_of(rs, m);
    essential_block_nminus(rs, seq, order, &nu).contains(m)
}

// ---------------------------------------------------------------------
// Dual structure constants
// ---------------------------------------------------------------------

/// Expansion of xi_{lambda,p} xi_{mu,q} over xi_{lambda+mu,r}; the returned
/// map carries the nonzero coefficients. The triangularity of the dual
/// essential basis is enforced: the coefficient at p+q must be one and no
/// r below p+q may appear, otherwise this is an internal-consistency error.
pub fn dual_structure_constants(
    left: &EssentialBasis<'_>,
    right: &EssentialBasis<'_>,
    product: &EssentialBasis<'_>,
    p: &MultiExp,
    q: &MultiExp,
) -> Result<BTreeMap<MultiExp, Rat>> {
    let rs = left.rep.rs();
    if left.index_of(p).is_none() {
        return Err(Error::Invalid(format!("{p:?} is not essential for V(lambda)")));
    }
    if right.index_of(q).is_none() {
        return Err(Error::Invalid(format!("{q:?} is not essential for V(mu)")));
    }
    let target_weight: Vec<i64> = left
        .seq
        .weight_of(rs, p)
        .iter()
        .zip(right.seq.weight_of(rs, q).iter())
        .map(|(&a, &b)| a + b)
        .collect();
    let pq: MultiExp = p.iter().zip(q.iter()).map(|(&a, &b)| a + b).collect();
    let mut out = BTreeMap::new();
    for r in product.basis.iter() {
        if product.seq.weight_of(rs, r) != target_weight {
            continue;
        }
        // c_r = sum over splits a + b = r of xi_p(f^(a) v) xi_q(f^(b) v);
        // only splits with wt(a) = wt(p) contribute.
        let mut c = rat(0);
        for (a, b) in crate::pbw::coproduct_splits(r) {
            if left.seq.weight_of(rs, &a) != left.seq.weight_of(rs, p) {
                continue;
            }
            let xa = left.eval_dual(p, &a);
            if xa.is_zero() {
                continue;
            }
            let xb = right.eval_dual(q, &b);
            if !xb.is_zero() {
                c += xa * xb;
            }
        }
        if !c.is_zero() {
            if product.order.cmp(r, &pq) == std::cmp::Ordering::Less {
                return Err(Error::Inconsistent(format!(
                    "dual product has support {r:?} below p+q = {pq:?}"
                )));
            }
            out.insert(r.clone(), c);
        }
    }
    match out.get(&pq) {
        Some(c) if *c == rat(1) => Ok(out),
        other => Err(Error::Inconsistent(format!(
            "leading dual coefficient at {pq:?} is {other:?}, expected 1"
        ))),
    }
}

// ---------------------------------------------------------------------
// Pullback polynomials and lowest-term valuations
// ---------------------------------------------------------------------

/// Sparse polynomial in x_1..x_N with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValuedPolynomial {
    pub terms: BTreeMap<MultiExp, Rat>,
}

impl ValuedPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        let mut p = Self::default();
        if !c.is_zero() {
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: MultiExp, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scale(&mut self, c: &Rat) {
        if c.is_zero() {
            self.terms.clear();
        } else {
            for v in self.terms.values_mut() {
                *v *= c;
            }
        }
    }

    /// Multiplies by c * x_var^k.
    pub fn shift(&self, var: usize, k: u32, c: &Rat) -> Self {
        let mut out = Self::default();
        for (m, v) in &self.terms {
            let mut m2 = m.clone();
            m2[var] += k;
            out.add_term(m2, v * c);
        }
        out
    }
}

/// The pullback of the dual basis vector along the product of root-subgroup
/// exponentials: xi_{lambda,p}(exp(x_1 F_1) ... exp(x_N F_N) v_lambda).
pub fn pullback_polynomial(basis: &EssentialBasis<'_>, p: &MultiExp) -> Result<ValuedPolynomial> {
    let Some(p_idx) = basis.index_of(p) else {
        return Err(Error::Invalid(format!("{p:?} is not essential")));
    };
    let n = basis.seq.len();
    let dim = basis.dim();
    let zero_idx = basis
        .index_of(&vec![0; n])
        .expect("zero exponent is essential");
    let mut w: Vec<ValuedPolynomial> = (0..dim).map(|_| ValuedPolynomial::zero()).collect();
    w[zero_idx] = ValuedPolynomial::constant(n, rat(1));
    for pos in (0..n).rev() {
        let f = basis.rep_matrix(pos);
        // exp(x_pos F) w = sum_k x^k (F^k w) / k!.
        let mut result = w.clone();
        let mut current = w;
        let mut k = 1u32;
        loop {
            // current <- F . current
            let mut next: Vec<ValuedPolynomial> =
                (0..dim).map(|_| ValuedPolynomial::zero()).collect();
            let mut all_zero = true;
            for (r, row) in f.iter().enumerate() {
                for (c, coeff) in row.iter().enumerate() {
                    if !coeff.is_zero() && !current[c].is_zero() {
                        let mut piece = current[c].clone();
                        piece.scale(coeff);
                        next[r].add(&piece);
                    }
                }
                if !next[r].is_zero() {
                    all_zero = false;
                }
            }
            if all_zero {
                break;
            }
            let inv_fact = Rat::new(num::BigInt::one(), factorial(k));
            for (r, poly) in next.iter().enumerate() {
                if !poly.is_zero() {
                    result[r].add(&poly.shift(pos, k, &inv_fact));
                }
            }
            current = next;
            k += 1;
        }
        w = result;
    }
    Ok(w[p_idx].clone())
}

/// Order-minimal exponent with nonzero coefficient.
pub fn lowest_term_valuation(poly: &ValuedPolynomial, order: &OrderSpec) -> Result<MultiExp> {
    if poly.is_zero() {
        return Err(Error::Invalid("valuation of the zero polynomial".into()));
    }
    Ok(order
        .min(poly.terms.keys())
        .expect("nonzero polynomial")
        .clone())
}

/// nu(p/p') = nu(p) - nu(p'), an integer vector.
pub fn valuation_of_quotient(
    num: &ValuedPolynomial,
    den: &ValuedPolynomial,
    order: &OrderSpec,
) -> Result<Vec<i64>> {
    let a = lowest_term_valuation(num, order)?;
    let b = lowest_term_valuation(den, order)?;
    Ok(a.iter().zip(b.iter()).map(|(&x, &y)| x as i64 - y as i64).collect())
}

/// Polynomial with terms indexed by (lambda, m) pairs, as on C[Z_S].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LambdaPolynomial {
    pub terms: BTreeMap<(Vec<i64>, MultiExp), Rat>,
}

/// Minimal (lambda, m) term under the order of the valuation: graded-lex on
/// the dominant coordinates of lambda first, then the monomial order.
pub fn lowest_term_valuation_pairs(
    poly: &LambdaPolynomial,
    order: &OrderSpec,
) -> Result<(Vec<i64>, MultiExp)> {
    poly.terms
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, _)| k)
        .min_by(|(la, ma), (lb, mb)| {
            let ga = (la.iter().sum::<i64>(), la.clone());
            let gb = (lb.iter().sum::<i64>(), lb.clone());
            ga.cmp(&gb).then_with(|| order.cmp(ma, mb))
        })
        .cloned()
        .ok_or_else(|| Error::Invalid("valuation of the zero polynomial".into()))
}

// ---------------------------------------------------------------------
// The global essential monoid
// ---------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct GammaReport {
    pub box_bound: Vec<i64>,
    pub element_count: usize,
    pub closure_violations: Vec<((Vec<i64>, MultiExp), (Vec<i64>, MultiExp))>,
    pub lattice_rank: usize,
    pub expected_rank: usize,
    pub generator_candidates: Vec<(Vec<i64>, MultiExp)>,
}

/// Computes es(lambda) for every lambda in the box and reports monoid
/// closure violations, the lattice rank of the sample, and the elements not
/// expressible as sums of two nonzero sample elements.
pub fn gamma_sample(
    rs: &RootSystem,
    seq: &BirationalSequence,
    order: &OrderSpec,
    box_bound: &[i64],
) -> Result<GammaReport> {
    let mut lambdas = vec![vec![]];
    for &b in box_bound {
        let mut next = Vec::new();
        for l in &lambdas {
            for v in 0..=b {
                let mut l2: Vec<i64> = l.clone();
                l2.push(v);
                next.push(l2);
            }
        }
        lambdas = next;
    }
    let mut sets: BTreeMap<Vec<i64>, EssentialSet> = BTreeMap::new();
    for lam in &lambdas {
        sets.insert(lam.clone(), essential_set(rs, seq, order, lam)?);
    }
    let mut violations = Vec::new();
    for (lam, es1) in &sets {
        for (mu, es2) in &sets {
            let sum: Vec<i64> = lam.iter().zip(mu.iter()).map(|(&a, &b)| a + b).collect();
            let Some(target) = sets.get(&sum) else {
                continue; // only in-box sums are checkable
            };
            for m in &es1.exponents {
                for m2 in &es2.exponents {
                    let s: MultiExp = m.iter().zip(m2.iter()).map(|(&a, &b)| a + b).collect();
                    if !target.contains(&s) {
                        violations.push(((lam.clone(), m.clone()), (mu.clone(), m2.clone())));
                    }
                }
            }
        }
    }
    let mut elements: Vec<(Vec<i64>, MultiExp)> = Vec::new();
    for (lam, es) in &sets {
        for m in &es.exponents {
            elements.push((lam.clone(), m.clone()));
        }
    }
    let rows: Vec<Vec<i64>> = elements
        .iter()
        .map(|(lam, m)| {
            lam.iter()
                .copied()
                .chain(m.iter().map(|&x| x as i64))
                .collect()
        })
        .collect();
    let lattice_rank = crate::linalg::int_rank(&rows);
    let element_set: BTreeSet<(Vec<i64>, MultiExp)> = elements.iter().cloned().collect();
    let mut generators = Vec::new();
    for (lam, m) in &elements {
        if lam.iter().all(|&x| x == 0) && m.iter().all(|&x| x == 0) {
            continue;
        }
        let mut decomposable = false;
        'outer: for (lam1, m1) in &element_set {
            if lam1.iter().all(|&x| x == 0) && m1.iter().all(|&x| x == 0) {
                continue;
            }
            if lam1.iter().zip(lam.iter()).any(|(&a, &b)| a > b) {
                continue;
            }
            if m1.iter().zip(m.iter()).any(|(&a, &b)| a > b) {
                continue;
            }
            let lam2: Vec<i64> = lam.iter().zip(lam1.iter()).map(|(&a, &b)| a - b).collect();
            let m2: MultiExp = m.iter().zip(m1.iter()).map(|(&a, &b)| a - b).collect();
            if lam2.iter().all(|&x| x == 0) && m2.iter().all(|&x| x == 0) {
                continue;
            }
            if element_set.contains(&(lam2, m2)) {
                decomposable = true;
                break 'outer;
            }
        }
        if !decomposable {
            generators.push((lam.clone(), m.clone()));
        }
    }
    Ok(GammaReport {
        box_bound: box_bound.to_vec(),
        element_count: elements.len(),
        closure_violations: violations,
        lattice_rank,
        expected_rank: rs.rank() + seq.len(),
        generator_candidates: generators,
    })
}

// ---------------------------------------------------------------------
// Dominance check
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum Dominance {
    /// Certified: the Jacobian reached full rank at some rational point.
    Dominant,
    /// Probabilistic: full rank was not reached at any sampled point.
    LikelyNotDominant,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct DominanceReport {
    pub status: Dominance,
    pub trials: usize,
    pub max_rank: usize,
    pub expected_rank: usize,
}

/// Generic Jacobian rank of pi(z) = exp(z_1 f_{beta_1}) ... exp(z_N f_{beta_N})
/// in the adjoint representation, at random integer points.
pub fn dominance_check(
    rs: &RootSystem,
    seq: &BirationalSequence,
    trials: usize,
    seed: u64,
) -> DominanceReport {
    let n = seq.len();
    let ad: Vec<Vec<Vec<Rat>>> = seq.roots.iter().map(|&r| rs.ad_f_matrix(r)).collect();
    let dim = ad[0].len();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut max_rank = 0;
    for _ in 0..trials.max(1) {
        let z: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=7)).collect();
        let exps: Vec<Vec<Vec<Rat>>> = (0..n)
            .map(|i| mat_exp_nilpotent(&ad[i], z[i]))
            .collect();
        // Prefix and suffix products of the exponentials.
        let mut prefix = vec![identity(dim)];
        for e in &exps {
            let last = prefix.last().unwrap();
            prefix.push(mat_mul(last, e));
        }
        let mut suffix = vec![identity(dim); n + 1];
        for i in (0..n).rev() {
            suffix[i] = mat_mul(&exps[i], &suffix[i + 1]);
        }
        let rows: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let d = mat_mul(&mat_mul(&prefix[i], &ad[i]), &suffix[i]);
                d.into_iter().flatten().collect()
            })
            .collect();
        let rank = crate::linalg::rank(&rows);
        max_rank = max_rank.max(rank);
        if rank == n {
            return DominanceReport {
                status: Dominance::Dominant,
                trials,
                max_rank: rank,
                expected_rank: n,
            };
        }
    }
    DominanceReport {
        status: Dominance::LikelyNotDominant,
        trials,
        max_rank,
        expected_rank: n,
    }
}

fn identity(n: usize) -> Vec<Vec<Rat>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
        .collect()
}

fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![rat(0); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

fn mat_exp_nilpotent(m: &[Vec<Rat>], z: i64) -> Vec<Vec<Rat>> {
    let dim = m.len();
    let mut out = identity(dim);
    let mut power = identity(dim);
    for k in 1u32.. {
        power = mat_mul(&power, m);
        if power.iter().all(|row| row.iter().all(|x| x.is_zero())) {
            break;
        }
        let c = Rat::new(num::BigInt::from(z).pow(k), factorial(k));
        for i in 0..dim {
            for j in 0..dim {
                if !power[i][j].is_zero() {
                    out[i][j] += &power[i][j] * &c;
                }
            }
        }
    }
    out
}

/// Re-tests essentiality of all of es(lambda) at lambda + offset (then at a
/// doubled offset if the first re-test disagrees). Returns the exponents
/// whose pivot status is unstable even after escalation.
pub fn essential_stability_at_large(
    rs: &RootSystem,
    seq: &BirationalSequence,
    order: &OrderSpec,
    lambda: &[i64],
    offset: i64,
) -> Result<Vec<MultiExp>> {
    let es = essential_set(rs, seq, order, lambda)?;
    let bump = |k: i64| -> Vec<i64> { lambda.iter().map(|&a| a + k).collect() };
    let big = essential_set(rs, seq, order, &bump(offset))?;
    let mut unstable: Vec<MultiExp> = es
        .exponents
        .iter()
        .filter(|m| !big.contains(m))
        .cloned()
        .collect();
    if !unstable.is_empty() {
        let bigger = essential_set(rs, seq, order, &bump(2 * offset))?;
        unstable.retain(|m| !bigger.contains(m));
    }
    Ok(unstable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::{OrderSpec, OrderVariant, WeightFunction, WeightPreset};
    use crate::rootsys::{build_root_system, Family, RootSystemSpec};

    fn rs(family: Family, rank: usize) -> RootSystem {
        build_root_system(RootSystemSpec::new(family, rank).unwrap()).unwrap()
    }

    fn order_for(
        r: &RootSystem,
        seq: &BirationalSequence,
        preset: WeightPreset,
        variant: OrderVariant,
    ) -> OrderSpec {
        let psi = crate::orders::make_weight_function(&preset, r, seq).unwrap();
        OrderSpec::new(psi, variant).unwrap()
    }

    #[test]
    fn sl2_essential_sets() {
        let r = rs(Family::A, 1);
        let seq = BirationalSequence::pbw(&r, vec![0]).unwrap();
        let order = order_for(&r, &seq, WeightPreset::Height, OrderVariant::OpWLex);
        let es = essential_set(&r, &seq, &order, &[2]).unwrap();
        let expect: BTreeSet<MultiExp> = [vec![0], vec![1], vec![2]].into_iter().collect();
        assert_eq!(es.exponents, expect);
    }

    #[test]
    fn sl3_reduced_word_omega1() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        let order = order_for(&r, &seq, WeightPreset::Height, OrderVariant::OpWLex);
        let es = essential_set(&r, &seq, &order, &[1, 0]).unwrap();
        let expect: BTreeSet<MultiExp> = [vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 1]]
            .into_iter()
            .collect();
        assert_eq!(es.exponents, expect);
    }

    #[test]
    fn a2_good_ordering_omega1() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::good_ordering(&r);
        let order = order_for(&r, &seq, WeightPreset::Homogeneous, OrderVariant::WRLex);
        let es = essential_set(&r, &seq, &order, &[1, 0]).unwrap();
        // Positions: (a1+a2, a1, a2) after height-descending sort (ties lex desc).
        let expect: BTreeSet<MultiExp> = [vec![0, 0, 0], vec![0, 1, 0], vec![1, 0, 0]]
            .into_iter()
            .collect();
        assert_eq!(es.exponents, expect);
    }

    #[test]
    fn essential_set_sizes_match_weyl_dim() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        let order = order_for(&r, &seq, WeightPreset::Height, OrderVariant::OpWLex);
        for lam in [[1, 1], [2, 1], [2, 2]] {
            let es = essential_set(&r, &seq, &order, &lam).unwrap();
            assert_eq!(num::BigInt::from(es.len() as u64), r.weyl_dim(&lam));
        }
    }

    #[test]
    fn rep_matrix_sl2() {
        let r = rs(Family::A, 1);
        let seq = BirationalSequence::pbw(&r, vec![0]).unwrap();
        let order = order_for(&r, &seq, WeightPreset::Height, OrderVariant::OpWLex);
        let rep = RepSpace::new(&r, vec![1]).unwrap();
        let basis = EssentialBasis::new(&rep, &seq, &order).unwrap();
        let f = basis.rep_matrix(0);
        assert_eq!(f, vec![vec![rat(0), rat(0)], vec![rat(1), rat(0)]]);
    }

    #[test]
    fn rep_matrices_nilpotent_and_weight_graded() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::good_ordering(&r);
        let order = order_for(&r, &seq, WeightPreset::Homogeneous, OrderVariant::WRLex);
        let rep = RepSpace::new(&r, vec![1, 1]).unwrap();
        let basis = EssentialBasis::new(&rep, &seq, &order).unwrap();
        for pos in 0..seq.len() {
            let f = basis.rep_matrix(pos);
            // Nilpotency within dim V steps.
            let mut power = f.clone();
            for _ in 0..basis.dim() {
                power = mat_mul(&power, &f);
            }
            assert!(power.iter().all(|row| row.iter().all(|x| x.is_zero())));
        }
    }

    #[test]
    fn dual_structure_constants_sl2() {
        let r = rs(Family::A, 1);
        let seq = BirationalSequence::pbw(&r, vec![0]).unwrap();
        let order = order_for(&r, &seq, WeightPreset::Height, OrderVariant::OpWLex);
        let rep1 = RepSpace::new(&r, vec![1]).unwrap();
        let rep2 = RepSpace::new(&r, vec![2]).unwrap();
        let b1 = EssentialBasis::new(&rep1, &seq, &order).unwrap();
        let b2 = EssentialBasis::new(&rep2, &seq, &order).unwrap();
        // xi_{w,(1)} xi_{w,(0)} = xi_{2w,(1)}
        let c = dual_structure_constants(&b1, &b1, &b2, &vec![1], &vec![0]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[&vec![1u32]], rat(1));
        // xi_{w,(1)} xi_{w,(1)} = xi_{2w,(2)}
        let c2 = dual_structure_constants(&b1, &b1, &b2, &vec![1], &vec![1]).unwrap();
        assert_eq!(c2.len(), 1);
        assert_eq!(c2[&vec![2u32]], rat(1));
    }

    #[test]
    fn pullback_sl2() {
        let r = rs(Family::A, 1);
        let seq = BirationalSequence::pbw(&r, vec![0]).unwrap();
        let order = order_for(&r, &seq, WeightPreset::Height, OrderVariant::OpWLex);
        let rep = RepSpace::new(&r, vec![1]).unwrap();
        let basis = EssentialBasis::new(&rep, &seq, &order).unwrap();
        let p0 = pullback_polynomial(&basis, &vec![0]).unwrap();
        assert_eq!(p0.terms.len(), 1);
        assert_eq!(p0.terms[&vec![0u32]], rat(1));
        let p1 = pullback_polynomial(&basis, &vec![1]).unwrap();
        assert_eq!(p1.terms.len(), 1);
        assert_eq!(p1.terms[&vec![1u32]], rat(1));
    }

    #[test]
    fn pullback_sl3_dual_monomial() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        let order = order_for(&r, &seq, WeightPreset::Height, OrderVariant::OpWLex);
        let rep = RepSpace::new(&r, vec![1, 0]).unwrap();
        let basis = EssentialBasis::new(&rep, &seq, &order).unwrap();
        let p = pullback_polynomial(&basis, &vec![0, 1, 1]).unwrap();
        let lowest = lowest_term_valuation(&p, &order).unwrap();
        assert_eq!(lowest, vec![0, 1, 1]);
        assert_eq!(p.terms[&vec![0u32, 1, 1]], rat(1));
    }

    #[test]
    fn valuation_examples() {
        let lex = OrderSpec::new(
            WeightFunction { coeffs: vec![0, 0] },
            OrderVariant::WLex,
        )
        .unwrap();
        let mut p = ValuedPolynomial::zero();
        p.add_term(vec![1, 1], rat(1));
        p.add_term(vec![2, 0], rat(1));
        assert_eq!(lowest_term_valuation(&p, &lex).unwrap(), vec![1, 1]);
        let weighted = OrderSpec::new(
            WeightFunction { coeffs: vec![1, 2] },
            OrderVariant::WLex,
        )
        .unwrap();
        assert_eq!(lowest_term_valuation(&p, &weighted).unwrap(), vec![2, 0]);
        // Quotient of monomials: a - b.
        let mut num_p = ValuedPolynomial::zero();
        num_p.add_term(vec![1, 3], rat(2));
        let mut den_p = ValuedPolynomial::zero();
        den_p.add_term(vec![2, 1], rat(5));
        assert_eq!(
            valuation_of_quotient(&num_p, &den_p, &lex).unwrap(),
            vec![-1, 2]
        );
        assert!(lowest_term_valuation(&ValuedPolynomial::zero(), &lex).is_err());
    }

    #[test]
    fn gamma_closure_and_rank_a2() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        let order = order_for(&r, &seq, WeightPreset::Height, OrderVariant::OpWLex);
        let report = gamma_sample(&r, &seq, &order, &[2, 2]).unwrap();
        assert!(report.closure_violations.is_empty());
        assert_eq!(report.lattice_rank, 5);
        // (lambda, 0) is never reported as decomposable into lower lambda
        // plus nonzero unless both parts are sample members.
        assert!(report
            .generator_candidates
            .iter()
            .any(|(lam, m)| lam == &vec![1, 0] && m.iter().all(|&x| x == 0)));
    }

    #[test]
    fn dominance_examples() {
        let r = rs(Family::A, 2);
        let good = BirationalSequence::good_ordering(&r);
        assert_eq!(dominance_check(&r, &good, 5, 42).status, Dominance::Dominant);
        let word = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        assert_eq!(dominance_check(&r, &word, 5, 42).status, Dominance::Dominant);
        let a1 = r.root_id(&[1, 0]).unwrap();
        let a2 = r.root_id(&[0, 1]).unwrap();
        let degenerate = BirationalSequence::custom(&r, vec![a1, a1, a2]).unwrap();
        let report = dominance_check(&r, &degenerate, 5, 42);
        assert_eq!(report.status, Dominance::LikelyNotDominant);
        assert!(report.max_rank <= 2);
    }

    #[test]
    fn lemma_deriving_on_box() {
        // Quasi-commutative case: m not essential implies m + e_i not essential.
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::good_ordering(&r);
        let order = order_for(&r, &seq, WeightPreset::Homogeneous, OrderVariant::WRLex);
        for lam in [[1, 0], [1, 1], [2, 1]] {
            let rep = RepSpace::new(&r, lam.to_vec()).unwrap();
            let basis = EssentialBasis::new(&rep, &seq, &order).unwrap();
            let es = basis.essential_set();
            let mut nus: Vec<Vec<i64>> = rep.blocks.keys().cloned().collect();
            nus.sort();
            for nu in nus {
                for m in seq.weight_block(&r, &nu) {
                    if es.contains(&m) {
                        continue;
                    }
                    for i in 0..seq.len() {
                        let mut m2 = m.clone();
                        m2[i] += 1;
                        assert!(
                            !es.contains(&m2),
                            "lambda {lam:?}: {m:?} not essential but {m2:?} is"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn essential_stability() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        let order = order_for(&r, &seq, WeightPreset::Height, OrderVariant::OpWLex);
        let unstable = essential_stability_at_large(&r, &seq, &order, &[1, 1], 3).unwrap();
        assert!(unstable.is_empty());
    }

    #[test]
    fn es_nminus_serre_example() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        let order = OrderSpec::new(
            WeightFunction {
                coeffs: vec![0, 0, 0],
            },
            OrderVariant::WRLex,
        )
        .unwrap();
        assert!(!essential_for_nminus(&r, &seq, &order, &vec![0, 1, 2]));
        assert!(essential_for_nminus(&r, &seq, &order, &vec![2, 1, 0]));
        assert!(essential_for_nminus(&r, &seq, &order, &vec![1, 1, 1]));
    }
}
