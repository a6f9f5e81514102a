//! The contravariant (Shapovalov) form on U(n^-) v_lambda and the derived
//! linear-independence oracle.
//!
//! Pairings are computed inside the Verma module: tau(f^(m)) f^(n) v_lambda
//! is evaluated by commuting the e's past the f's with the mixed Chevalley
//! table, h-terms evaluated at lambda, and reading off the coefficient of
//! v_lambda. The form descends to V(lambda) with the maximal submodule as
//! radical, and is positive definite there over the rationals, so Gram ranks
//! of weight blocks equal weight multiplicities and incremental residual
//! tests detect linear dependence exactly.

use crate::orders::{MultiExp, OrderSpec};
use crate::pbw::{BirationalSequence, PBWElement, Straightener};
use crate::rat::{factorial, rat, Rat};
use crate::rootsys::{RootId, RootSystem, Sym};
use crate::{Error, Result};
use num::{One, Zero};
use std::cell::RefCell;
use std::collections::HashMap;

/// U(n^-) v_lambda with the canonical PBW basis; elements are reused
/// PBWElement maps over canonical monomials.
pub struct VermaModule<'a> {
    pub rs: &'a RootSystem,
    pub st: Straightener<'a>,
    pub lambda: Vec<i64>,
    e_cache: RefCell<HashMap<(RootId, MultiExp), PBWElement>>,
}

impl<'a> VermaModule<'a> {
    pub fn new(rs: &'a RootSystem, lambda: Vec<i64>) -> Self {
        assert_eq!(lambda.len(), rs.rank());
        VermaModule {
            rs,
            st: Straightener::canonical(rs),
            lambda,
            e_cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn highest_weight_vector(&self) -> PBWElement {
        let mut v = PBWElement::zero();
        v.add_term(vec![0; self.rs.num_positive_roots()], rat(1));
        v
    }

    /// Root coordinates of wt(mono).
    fn mono_weight(&self, mono: &[u32]) -> Vec<i64> {
        let mut acc = vec![0i64; self.rs.rank()];
        for (slot, &e) in mono.iter().enumerate() {
            let root = &self.rs.positive_roots[self.st.ordering[slot]];
            for (a, &c) in acc.iter_mut().zip(root.iter()) {
                *a += c * e as i64;
            }
        }
        acc
    }

    pub fn act_f(&self, root: RootId, elt: &PBWElement) -> PBWElement {
        let slot = self.st.slot_of_root(root);
        let mut out = PBWElement::zero();
        for (m, c) in &elt.terms {
            let mut piece = self.st.insert(slot, m);
            piece.scale(c);
            out.add(&piece);
        }
        out
    }

    /// h_i acting on f^(mono) v: the eigenvalue <lambda - wt(mono), alpha_i^vee>.
    pub fn act_h(&self, i: usize, elt: &PBWElement) -> PBWElement {
        let mut out = PBWElement::zero();
        for (m, c) in &elt.terms {
            let nu = self.mono_weight(m);
            let eigen = self.lambda[i] - self.rs.pairing_simple_coroot(&nu, i);
            out.add_term(m.clone(), c * rat(eigen));
        }
        out
    }

    pub fn act_e(&self, root: RootId, elt: &PBWElement) -> PBWElement {
        let mut out = PBWElement::zero();
        for (m, c) in &elt.terms {
            let mut piece = self.act_e_mono(root, m);
            piece.scale(c);
            out.add(&piece);
        }
        out
    }

    fn act_e_mono(&self, root: RootId, mono: &MultiExp) -> PBWElement {
        if mono.iter().all(|&x| x == 0) {
            return PBWElement::zero();
        }
        let key = (root, mono.clone());
        if let Some(hit) = self.e_cache.borrow().get(&key) {
            return hit.clone();
        }
        let t = mono.iter().position(|&x| x > 0).unwrap();
        let delta = self.st.ordering[t];
        let a = mono[t];
        let mut rest = mono.clone();
        rest[t] = 0;
        let mut rest_elt = PBWElement::zero();
        rest_elt.add_term(rest, rat(1));

        // e f_delta^(a) rest = f_delta^(a) (e rest) + sum_j f_delta^(a-j) ((D^j e)/j!) rest,
        // with D(x) = [x, f_delta].
        let inner = self.act_e(root, &rest_elt);
        let mut out = self.st.pow_mul(t, a, &inner);
        let mut z: Vec<(Sym, Rat)> = vec![(Sym::E(root), rat(1))];
        for j in 1..=a {
            z = self.rs.bracket(&z, &[(Sym::F(delta), rat(1))]);
            if z.is_empty() {
                break;
            }
            for (_, c) in z.iter_mut() {
                *c /= rat(j as i64);
            }
            let applied = self.apply_lie(&z, &rest_elt);
            out.add(&self.st.pow_mul(t, a - j, &applied));
        }
        self.e_cache.borrow_mut().insert(key, out.clone());
        out
    }

    pub fn apply_lie(&self, z: &[(Sym, Rat)], elt: &PBWElement) -> PBWElement {
        let mut out = PBWElement::zero();
        for (sym, c) in z {
            let mut piece = match *sym {
                Sym::E(r) => self.act_e(r, elt),
                Sym::F(r) => self.act_f(r, elt),
                Sym::H(i) => self.act_h(i, elt),
            };
            piece.scale(c);
            out.add(&piece);
        }
        out
    }

    /// <f^(p) v, u> for a canonical monomial p: apply tau(f^(p)) and read the
    /// coefficient of v_lambda.
    pub fn pairing_mono_elt(&self, p: &MultiExp, u: &PBWElement) -> Rat {
        let mut acc = u.clone();
        for slot in 0..p.len() {
            let e = p[slot];
            if e == 0 {
                continue;
            }
            let root = self.st.ordering[slot];
            for _ in 0..e {
                acc = self.act_e(root, &acc);
                if acc.is_zero() {
                    return rat(0);
                }
            }
            if e > 1 {
                acc.scale(&Rat::new(num::BigInt::one(), factorial(e)));
            }
        }
        acc.terms
            .get(&vec![0u32; self.rs.num_positive_roots()])
            .cloned()
            .unwrap_or_else(|| rat(0))
    }

    pub fn pairing(&self, u: &PBWElement, w: &PBWElement) -> Rat {
        let mut acc = rat(0);
        for (p, c) in &u.terms {
            acc += c * self.pairing_mono_elt(p, w);
        }
        acc
    }

    /// Canonical expansion of the S-monomial f^S(m) v_lambda.
    pub fn s_monomial(&self, seq: &BirationalSequence, m: &[u32]) -> PBWElement {
        let mut acc = self.highest_weight_vector();
        for pos in (0..seq.len()).rev() {
            if m[pos] == 0 {
                continue;
            }
            let slot = self.st.slot_of_root(seq.roots[pos]);
            acc = self.st.pow_mul(slot, m[pos], &acc);
        }
        acc
    }
}

/// <f^S(m) v, f^S(n) v> under the contravariant form.
pub fn shapovalov_pairing(
    rs: &RootSystem,
    lambda: &[i64],
    m: &[u32],
    n: &[u32],
    seq: &BirationalSequence,
) -> Rat {
    if seq.weight_of(rs, m) != seq.weight_of(rs, n) {
        return rat(0);
    }
    let vm = VermaModule::new(rs, lambda.to_vec());
    let w = vm.s_monomial(seq, n);
    let mut acc = w;
    for pos in 0..seq.len() {
        let e = m[pos];
        if e == 0 {
            continue;
        }
        let root = seq.roots[pos];
        for _ in 0..e {
            acc = vm.act_e(root, &acc);
            if acc.is_zero() {
                return rat(0);
            }
        }
        if e > 1 {
            acc.scale(&Rat::new(num::BigInt::one(), factorial(e)));
        }
    }
    acc.terms
        .get(&vec![0u32; rs.num_positive_roots()])
        .cloned()
        .unwrap_or_else(|| rat(0))
}

/// A weight block of V(lambda): a chosen basis of canonical pivot monomials,
/// their Gram matrix, and coordinates of every canonical monomial.
pub struct Block {
    /// lambda - weight, in simple-root coordinates.
    pub nu: Vec<i64>,
    pub mult: usize,
    pub pivots: Vec<MultiExp>,
    coords: HashMap<MultiExp, Vec<Rat>>,
}

impl Block {
    pub fn coords_of(&self, mono: &MultiExp) -> Vec<Rat> {
        let mut v = self
            .coords
            .get(mono)
            .cloned()
            .unwrap_or_else(|| vec![rat(0); self.mult]);
        v.resize(self.mult, rat(0));
        v
    }
}

/// V(lambda) realized through per-weight coordinates; the quotient of the
/// Verma module by its maximal submodule.
///
/// Blocks are built by increasing height: a vector of weight lambda - nu maps
/// to zero in V(lambda) iff every simple e_i sends its image to zero in the
/// (already constructed) block above, since V(lambda) has no singular vectors
/// below the highest weight. Kernel elimination against the stacked e-action
/// thus yields pivot monomials and exact coordinates for all the others.
pub struct RepSpace<'a> {
    pub vm: VermaModule<'a>,
    pub blocks: HashMap<Vec<i64>, Block>,
    transitions: RefCell<HashMap<(RootId, Vec<i64>), Vec<Vec<Rat>>>>,
}

impl<'a> RepSpace<'a> {
    pub fn new(rs: &'a RootSystem, lambda: Vec<i64>) -> Result<Self> {
        let vm = VermaModule::new(rs, lambda.clone());
        let canonical_seq = BirationalSequence::ascending_ordering(rs);
        let simple_roots: Vec<RootId> = (0..rs.rank())
            .map(|i| {
                let mut v = vec![0i64; rs.rank()];
                v[i] = 1;
                rs.root_id(&v).expect("simple root")
            })
            .collect();
        let mut blocks: HashMap<Vec<i64>, Block> = HashMap::new();
        // weight_system is sorted by the height of nu, so lower blocks are
        // always finished first.
        for (_, nu, mult) in rs.weight_system(&lambda) {
            let mult = mult as usize;
            if nu.iter().all(|&x| x == 0) {
                let mut coords = HashMap::new();
                let zero = vec![0u32; rs.num_positive_roots()];
                coords.insert(zero.clone(), vec![rat(1)]);
                blocks.insert(
                    nu.clone(),
                    Block {
                        nu,
                        mult,
                        pivots: vec![zero],
                        coords,
                    },
                );
                continue;
            }
            let mut monos = canonical_seq.weight_block(rs, &nu);
            monos.sort();
            // Stacked e-action coordinates of each candidate monomial.
            let uppers: Vec<(usize, Vec<i64>)> = (0..rs.rank())
                .filter_map(|i| {
                    let target: Vec<i64> = nu
                        .iter()
                        .zip(rs.positive_roots[simple_roots[i]].iter())
                        .map(|(&a, &b)| a - b)
                        .collect();
                    if target.iter().all(|&x| x >= 0) && blocks.contains_key(&target) {
                        Some((i, target))
                    } else {
                        None
                    }
                })
                .collect();
            let stacked_dim: usize = uppers
                .iter()
                .map(|(_, t)| blocks[t].mult)
                .sum();
            let mut pivots: Vec<MultiExp> = Vec::new();
            let mut coords: HashMap<MultiExp, Vec<Rat>> = HashMap::new();
            // Reduced rows with their expressions over the pivot columns.
            let mut basis: Vec<(usize, Vec<Rat>, Vec<Rat>)> = Vec::new();
            for k in &monos {
                let mut elt = PBWElement::zero();
                elt.add_term(k.clone(), rat(1));
                let mut stacked = Vec::with_capacity(stacked_dim);
                for (i, target) in &uppers {
                    let image = vm.act_e(simple_roots[*i], &elt);
                    let upper = &blocks[target];
                    let mut v = vec![rat(0); upper.mult];
                    for (mono, c) in &image.terms {
                        for (r, x) in upper.coords_of(mono).iter().enumerate() {
                            if !x.is_zero() {
                                v[r] += c * x;
                            }
                        }
                    }
                    stacked.extend(v);
                }
                // Reduce against the basis, accumulating the pivot expression.
                let mut x = stacked;
                let mut acc = vec![rat(0); pivots.len()];
                for (lead, brow, bexpr) in &basis {
                    if !x[*lead].is_zero() {
                        let c = x[*lead].clone();
                        for (xi, bi) in x.iter_mut().zip(brow.iter()) {
                            *xi -= &c * bi;
                        }
                        for (ai, bi) in acc.iter_mut().zip(bexpr.iter()) {
                            *ai += &c * bi;
                        }
                    }
                }
                match x.iter().position(|v| !v.is_zero()) {
                    None => {
                        coords.insert(k.clone(), acc);
                    }
                    Some(lead) => {
                        let r = pivots.len();
                        let scale = x[lead].clone();
                        for xi in x.iter_mut() {
                            *xi /= &scale;
                        }
                        let mut bexpr = vec![rat(0); r + 1];
                        for (b, a) in bexpr.iter_mut().zip(acc.iter()) {
                            *b = -(a / &scale);
                        }
                        bexpr[r] = rat(1) / &scale;
                        basis.push((lead, x, bexpr));
                        let mut unit = vec![rat(0); r + 1];
                        unit[r] = rat(1);
                        pivots.push(k.clone());
                        coords.insert(k.clone(), unit);
                    }
                }
            }
            if pivots.len() != mult {
                return Err(Error::Inconsistent(format!(
                    "weight block {nu:?}: kernel rank {} but multiplicity {mult}",
                    pivots.len()
                )));
            }
            // Expressions over earlier pivots were recorded before later
            // pivots existed; pad them.
            blocks.insert(
                nu.clone(),
                Block {
                    nu,
                    mult,
                    pivots,
                    coords,
                },
            );
        }
        Ok(RepSpace {
            vm,
            blocks,
            transitions: RefCell::new(HashMap::new()),
        })
    }

    pub fn rs(&self) -> &RootSystem {
        self.vm.rs
    }

    pub fn lambda(&self) -> &[i64] {
        &self.vm.lambda
    }

    pub fn dim(&self) -> u64 {
        self.blocks.values().map(|b| b.mult as u64).sum()
    }

    pub fn block(&self, nu: &[i64]) -> Option<&Block> {
        self.blocks.get(nu)
    }

    /// Transition matrix of f_root from block nu to block nu + root.
    fn transition(&self, root: RootId, nu: &[i64]) -> Vec<Vec<Rat>> {
        let key = (root, nu.to_vec());
        if let Some(hit) = self.transitions.borrow().get(&key) {
            return hit.clone();
        }
        let target_nu: Vec<i64> = nu
            .iter()
            .zip(self.rs().positive_roots[root].iter())
            .map(|(&a, &b)| a + b)
            .collect();
        let source = self.blocks.get(nu).expect("source block exists");
        let rows = self.blocks.get(&target_nu).map(|b| b.mult).unwrap_or(0);
        let mut mat = vec![vec![rat(0); source.mult]; rows];
        if rows > 0 {
            let target = &self.blocks[&target_nu];
            let slot = self.vm.st.slot_of_root(root);
            for (col, pivot) in source.pivots.iter().enumerate() {
                let expanded = self.vm.st.insert(slot, pivot);
                for (mono, c) in &expanded.terms {
                    let coords = target.coords_of(mono);
                    for (r, x) in coords.iter().enumerate() {
                        if !x.is_zero() {
                            mat[r][col] += c * x;
                        }
                    }
                }
            }
        }
        self.transitions.borrow_mut().insert(key, mat.clone());
        mat
    }

    /// Applies f_root to a coordinate vector in block nu.
    pub fn apply_f(&self, root: RootId, nu: &[i64], v: &[Rat]) -> (Vec<i64>, Vec<Rat>) {
        let target_nu: Vec<i64> = nu
            .iter()
            .zip(self.rs().positive_roots[root].iter())
            .map(|(&a, &b)| a + b)
            .collect();
        if v.is_empty() || !self.blocks.contains_key(nu) {
            return (target_nu, Vec::new());
        }
        let mat = self.transition(root, nu);
        let out: Vec<Rat> = mat
            .iter()
            .map(|row| {
                let mut acc = rat(0);
                for (a, b) in row.iter().zip(v.iter()) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect();
        (target_nu, out)
    }

    /// Coordinates of f^S(m) v_lambda in its weight block.
    pub fn s_exponent_vector(&self, seq: &BirationalSequence, m: &[u32]) -> (Vec<i64>, Vec<Rat>) {
        let mut nu = vec![0i64; self.rs().rank()];
        let mut v = vec![rat(1)];
        for pos in (0..seq.len()).rev() {
            let e = m[pos];
            for _ in 0..e {
                let (nu2, v2) = self.apply_f(seq.roots[pos], &nu, &v);
                nu = nu2;
                v = v2;
                if v.iter().all(|x| x.is_zero()) {
                    // Stay exact but cheap once the vector dies.
                    let target: Vec<i64> = seq.weight_of(self.rs(), m);
                    let dim = self.blocks.get(&target).map(|b| b.mult).unwrap_or(0);
                    return (target, vec![rat(0); dim]);
                }
            }
            if e > 1 {
                let inv = Rat::new(num::BigInt::one(), factorial(e));
                for x in v.iter_mut() {
                    *x *= &inv;
                }
            }
        }
        (nu, v)
    }
}

/// Rank and pivot subset of an order-sorted weight block of S-exponents.
///
/// The block must be sorted strictly ascending in the active order and all
/// exponents must share the same weight; the pivots are exactly the
/// essential multi-exponents of the block.
pub fn gram_rank_pivots(
    rep: &RepSpace<'_>,
    seq: &BirationalSequence,
    order: &OrderSpec,
    block: &[MultiExp],
) -> Result<(usize, Vec<MultiExp>)> {
    for w in block.windows(2) {
        if order.cmp(&w[0], &w[1]) != std::cmp::Ordering::Less {
            return Err(Error::Invalid(
                "block must be sorted strictly ascending in the order".into(),
            ));
        }
    }
    if let Some(first) = block.first() {
        let nu = seq.weight_of(rep.rs(), first);
        for m in block.iter().skip(1) {
            if seq.weight_of(rep.rs(), m) != nu {
                return Err(Error::Invalid("block exponents must share one weight".into()));
            }
        }
    }
    let mut basis = crate::linalg::RowBasis::new();
    let mut pivots = Vec::new();
    for m in block {
        let (_, v) = rep.s_exponent_vector(seq, m);
        if v.is_empty() {
            continue;
        }
        if basis.insert(v) {
            pivots.push(m.clone());
        }
    }
    Ok((basis.rank(), pivots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::{OrderSpec, OrderVariant, WeightFunction};
    use crate::rat::binomial;
    use crate::rootsys::{build_root_system, Family, RootSystemSpec};

    fn rs(family: Family, rank: usize) -> RootSystem {
        build_root_system(RootSystemSpec::new(family, rank).unwrap()).unwrap()
    }

    #[test]
    fn sl2_binomial_oracle() {
        let r = rs(Family::A, 1);
        let seq = BirationalSequence::pbw(&r, vec![0]).unwrap();
        for n in 0..=5i64 {
            for m in 0..=6u32 {
                let got = shapovalov_pairing(&r, &[n], &[m], &[m], &seq);
                // Independent oracle: e f^(m) v = (n - m + 1) f^(m-1) v gives
                // <f^(m)v, f^(m)v> = C(n, m).
                let expected = Rat::from_integer(binomial(n as u32, m));
                assert_eq!(got, expected, "n={n}, m={m}");
            }
        }
    }

    #[test]
    fn weight_orthogonality() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::good_ordering(&r);
        let p = shapovalov_pairing(&r, &[1, 1], &[1, 0, 0], &[0, 0, 1], &seq);
        assert!(p.is_zero());
    }

    #[test]
    fn a2_one_step() {
        let r = rs(Family::A, 2);
        // m = n = the exponent picking the alpha1 position once.
        let a1 = r.root_id(&[1, 0]).unwrap();
        let seq = BirationalSequence::good_ordering(&r);
        let pos = seq.roots.iter().position(|&x| x == a1).unwrap();
        let mut m = vec![0u32; 3];
        m[pos] = 1;
        let p = shapovalov_pairing(&r, &[1, 0], &m, &m, &seq);
        assert_eq!(p, rat(1));
    }

    #[test]
    fn pairing_symmetry() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::good_ordering(&r);
        let lambda = vec![2, 1];
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        for _ in 0..40 {
            let m: Vec<u32> = (0..3).map(|_| rand::Rng::gen_range(&mut rng, 0..3)).collect();
            let n: Vec<u32> = (0..3).map(|_| rand::Rng::gen_range(&mut rng, 0..3)).collect();
            let a = shapovalov_pairing(&r, &lambda, &m, &n, &seq);
            let b = shapovalov_pairing(&r, &lambda, &n, &m, &seq);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn block_rank_matches_multiplicity() {
        let r = rs(Family::A, 2);
        let rep = RepSpace::new(&r, vec![1, 1]).unwrap();
        assert_eq!(rep.dim(), 8);
        let rep2 = RepSpace::new(&r, vec![2, 2]).unwrap();
        assert_eq!(rep2.dim(), 27);
        let c2 = rs(Family::C, 2);
        let repc = RepSpace::new(&c2, vec![1, 1]).unwrap();
        assert_eq!(repc.dim(), 16);
    }

    #[test]
    fn sl2_pivots() {
        let r = rs(Family::A, 1);
        let seq = BirationalSequence::pbw(&r, vec![0]).unwrap();
        let order = OrderSpec::new(
            WeightFunction { coeffs: vec![1] },
            OrderVariant::WLex,
        )
        .unwrap();
        let rep = RepSpace::new(&r, vec![3]).unwrap();
        // Block of weight m alpha: rank 1 for m <= 3, rank 0 beyond.
        for m in 0..=3u32 {
            let (rank, pivots) = gram_rank_pivots(&rep, &seq, &order, &[vec![m]]).unwrap();
            assert_eq!(rank, 1);
            assert_eq!(pivots, vec![vec![m]]);
        }
        let (rank, pivots) = gram_rank_pivots(&rep, &seq, &order, &[vec![4]]).unwrap();
        assert_eq!(rank, 0);
        assert!(pivots.is_empty());
    }

    #[test]
    fn sl3_serre_block_pivots() {
        // S = (a1, a2, a1) with the right lexicographic order; the weight
        // block of 2a1+a2 for large lambda has rank 2, and (0,1,2) is not
        // essential.
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        let order = OrderSpec::new(
            WeightFunction {
                coeffs: vec![0, 0, 0],
            },
            OrderVariant::WRLex,
        )
        .unwrap();
        let rep = RepSpace::new(&r, vec![3, 3]).unwrap();
        let block = vec![vec![2, 1, 0], vec![1, 1, 1], vec![0, 1, 2]];
        let (rank, pivots) = gram_rank_pivots(&rep, &seq, &order, &block).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(pivots, vec![vec![2, 1, 0], vec![1, 1, 1]]);
    }

    #[test]
    fn sl3_omega1_alpha1_block() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        let order = OrderSpec::new(
            WeightFunction {
                coeffs: vec![0, 0, 0],
            },
            OrderVariant::WRLex,
        )
        .unwrap();
        let rep = RepSpace::new(&r, vec![1, 0]).unwrap();
        let block = vec![vec![1, 0, 0], vec![0, 0, 1]];
        let (rank, pivots) = gram_rank_pivots(&rep, &seq, &order, &block).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(pivots, vec![vec![1, 0, 0]]);
    }

    #[test]
    fn unsorted_block_rejected() {
        let r = rs(Family::A, 1);
        let seq = BirationalSequence::pbw(&r, vec![0]).unwrap();
        let order = OrderSpec::new(
            WeightFunction { coeffs: vec![1] },
            OrderVariant::WLex,
        )
        .unwrap();
        let rep = RepSpace::new(&r, vec![3]).unwrap();
        assert!(gram_rank_pivots(&rep, &seq, &order, &[vec![2], vec![1]]).is_err());
    }

    #[test]
    fn rescaling_leaves_pivots_invariant() {
        // Scaling root vectors conjugates the Gram matrix by a diagonal
        // matrix; the pivot subset must not change.
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        let lambda = vec![2, 2];
        let block = vec![vec![2, 1, 0], vec![1, 1, 1], vec![0, 1, 2]];
        let gram: Vec<Vec<Rat>> = block
            .iter()
            .map(|m| {
                block
                    .iter()
                    .map(|n| shapovalov_pairing(&r, &lambda, m, n, &seq))
                    .collect()
            })
            .collect();
        let pivot_set = |g: &[Vec<Rat>]| -> Vec<usize> {
            let mut piv = crate::linalg::GramPivoter::new();
            let mut out = Vec::new();
            for (i, row) in g.iter().enumerate() {
                let cross: Vec<Rat> = out.iter().map(|&j: &usize| row[j].clone()).collect();
                if piv.offer(&cross, &row[i]) {
                    out.push(i);
                }
            }
            out
        };
        let base = pivot_set(&gram);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
        for _ in 0..5 {
            let scales: Vec<Rat> = (0..block.len())
                .map(|_| {
                    let num: i64 = rand::Rng::gen_range(&mut rng, 1..7);
                    let den: i64 = rand::Rng::gen_range(&mut rng, 1..7);
                    let sign: i64 = if rand::Rng::gen_bool(&mut rng, 0.5) { 1 } else { -1 };
                    crate::rat::frac(sign * num, den)
                })
                .collect();
            let scaled: Vec<Vec<Rat>> = (0..block.len())
                .map(|i| {
                    (0..block.len())
                        .map(|j| &scales[i] * &scales[j] * &gram[i][j])
                        .collect()
                })
                .collect();
            // Congruence by an invertible diagonal preserves semidefiniteness
            // and the ranks of all leading principal blocks.
            assert_eq!(pivot_set(&scaled), base);
        }
    }

    #[test]
    fn single_root_blocks_match_sl2() {
        // Along a single root position the pairing reproduces the sl2
        // binomial pattern with n = <lambda, beta^vee>.
        let r = rs(Family::C, 2);
        let seq = BirationalSequence::good_ordering(&r);
        let lambda = vec![2, 1];
        for (pos, &root) in seq.roots.iter().enumerate() {
            let n = r.pairing_weight_coroot(&lambda, root);
            for k in 0..=3u32 {
                let mut m = vec![0u32; seq.len()];
                m[pos] = k;
                let got = shapovalov_pairing(&r, &lambda, &m, &m, &seq);
                assert_eq!(got, Rat::from_integer(binomial(n as u32, k)), "pos {pos} k {k}");
            }
        }
    }
}
