//! Straightening in U(n^-): rewriting words in root vectors into ordered
//! divided-power monomials relative to a birational sequence, plus the
//! bracket-condition and quasi-commutativity checks.
//!
//! Internally every rewriting runs over a fixed total order on the distinct
//! positive roots (the "ambient ordering"). For a repetition-free sequence
//! this is the sequence itself and the ordered monomials form a genuine PBW
//! basis; for sequences with repeated roots (the reduced-word case) a word is
//! first expanded in the canonical basis and then re-expressed on the
//! position-indexed spanning monomials by a deterministic triangular solve.

use crate::orders::{MultiExp, OrderSpec};
use crate::rat::{factorial, rat, Rat};
use crate::rootsys::{RootId, RootSystem, Sym};
use crate::{Error, Result};
use num::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum Provenance {
    PbwEnumeration,
    ReducedWord(Vec<usize>),
    Custom,
}

/// The sequence S = (beta_1, ..., beta_N); repetitions allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirationalSequence {
    pub roots: Vec<RootId>,
    pub provenance: Provenance,
}

impl BirationalSequence {
    /// PBW-type sequence: an enumeration of the positive roots.
    pub fn pbw(rs: &RootSystem, roots: Vec<RootId>) -> Result<Self> {
        let mut sorted = roots.clone();
        sorted.sort_unstable();
        let expect: Vec<usize> = (0..rs.num_positive_roots()).collect();
        if sorted != expect {
            return Err(Error::Invalid(
                "a PBW sequence must enumerate the positive roots exactly once".into(),
            ));
        }
        Ok(BirationalSequence {
            roots,
            provenance: Provenance::PbwEnumeration,
        })
    }

    /// Good ordering: dominance-larger roots first (height descending).
    pub fn good_ordering(rs: &RootSystem) -> Self {
        let mut roots: Vec<RootId> = (0..rs.num_positive_roots()).collect();
        roots.reverse();
        BirationalSequence {
            roots,
            provenance: Provenance::PbwEnumeration,
        }
    }

    /// Height-ascending enumeration; satisfies the left bracket condition.
    pub fn ascending_ordering(rs: &RootSystem) -> Self {
        BirationalSequence {
            roots: (0..rs.num_positive_roots()).collect(),
            provenance: Provenance::PbwEnumeration,
        }
    }

    /// Simple-root sequence of a reduced word for w0 (zero-based letters).
    pub fn from_reduced_word(rs: &RootSystem, word: &[usize]) -> Result<Self> {
        rs.roots_from_reduced_word(word)?;
        if word.len() != rs.num_positive_roots() {
            return Err(Error::Invalid(format!(
                "a reduced word for w0 must have length {}",
                rs.num_positive_roots()
            )));
        }
        let roots = word
            .iter()
            .map(|&i| {
                let mut v = vec![0i64; rs.rank()];
                v[i] = 1;
                rs.root_id(&v).expect("simple root")
            })
            .collect();
        Ok(BirationalSequence {
            roots,
            provenance: Provenance::ReducedWord(word.to_vec()),
        })
    }

    /// PBW enumeration attached to a reduced word:
    /// beta_k = s_{i_1} ... s_{i_{k-1}}(alpha_{i_k}).
    pub fn lusztig(rs: &RootSystem, word: &[usize]) -> Result<Self> {
        if word.len() != rs.num_positive_roots() {
            return Err(Error::Invalid(format!(
                "a reduced word for w0 must have length {}",
                rs.num_positive_roots()
            )));
        }
        let roots = rs.roots_from_reduced_word(word)?;
        Ok(BirationalSequence {
            roots,
            provenance: Provenance::PbwEnumeration,
        })
    }

    pub fn custom(rs: &RootSystem, roots: Vec<RootId>) -> Result<Self> {
        if roots.len() != rs.num_positive_roots() {
            return Err(Error::Invalid(format!(
                "a birational sequence must have length {}",
                rs.num_positive_roots()
            )));
        }
        for &r in &roots {
            if r >= rs.num_positive_roots() {
                return Err(Error::Invalid("root index out of range".into()));
            }
        }
        Ok(BirationalSequence {
            roots,
            provenance: Provenance::Custom,
        })
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn is_repetition_free(&self) -> bool {
        let mut sorted = self.roots.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// wt(m) = sum m_i beta_i in simple-root coordinates.
    pub fn weight_of(&self, rs: &RootSystem, m: &[u32]) -> Vec<i64> {
        let mut acc = vec![0i64; rs.rank()];
        for (&pos_root, &mult) in self.roots.iter().zip(m.iter()) {
            for (a, &c) in acc.iter_mut().zip(rs.positive_roots[pos_root].iter()) {
                *a += c * mult as i64;
            }
        }
        acc
    }

    pub fn describe(&self, rs: &RootSystem) -> String {
        self.roots
            .iter()
            .map(|&r| rs.root_name(r))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// All multi-exponents of the given weight (simple-root coordinates).
    pub fn weight_block(&self, rs: &RootSystem, nu: &[i64]) -> Vec<MultiExp> {
        fn rec(
            seq: &BirationalSequence,
            rs: &RootSystem,
            pos: usize,
            remaining: &mut Vec<i64>,
            current: &mut Vec<u32>,
            out: &mut Vec<MultiExp>,
        ) {
            if pos == seq.len() {
                if remaining.iter().all(|&x| x == 0) {
                    out.push(current.clone());
                }
                return;
            }
            let coords = rs.positive_roots[seq.roots[pos]].clone();
            let mut max = i64::MAX;
            for (i, &c) in coords.iter().enumerate() {
                if c > 0 {
                    max = max.min(remaining[i] / c);
                }
            }
            for k in 0..=max {
                current[pos] = k as u32;
                for (r, &c) in remaining.iter_mut().zip(coords.iter()) {
                    *r -= c * k;
                }
                rec(seq, rs, pos + 1, remaining, current, out);
                for (r, &c) in remaining.iter_mut().zip(coords.iter()) {
                    *r += c * k;
                }
            }
            current[pos] = 0;
        }
        let mut out = Vec::new();
        if nu.iter().any(|&x| x < 0) {
            return out;
        }
        let mut remaining = nu.to_vec();
        let mut current = vec![0u32; self.len()];
        rec(self, rs, 0, &mut remaining, &mut current, &mut out);
        out
    }
}

/// A word in the root vectors of S: (position, divided-power exponent) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeWord {
    pub letters: Vec<(usize, u32)>,
}

impl FreeWord {
    pub fn new(letters: Vec<(usize, u32)>) -> Self {
        assert!(letters.iter().all(|&(_, e)| e >= 1), "exponents must be >= 1");
        FreeWord { letters }
    }

    /// Total degree counting divided-power exponents.
    pub fn degree(&self) -> u32 {
        self.letters.iter().map(|&(_, e)| e).sum()
    }
}

/// exp(m): per-position exponent sums of a word.
pub fn exp_of_word(word: &FreeWord, positions: usize) -> MultiExp {
    let mut out = vec![0u32; positions];
    for &(pos, e) in &word.letters {
        out[pos] += e;
    }
    out
}

/// Sparse element of U(n^-) in ordered divided-power monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PBWElement {
    pub terms: BTreeMap<MultiExp, Rat>,
}

impl PBWElement {
    pub fn zero() -> Self {
        PBWElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: MultiExp, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
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

    pub fn scale(&mut self, c: &Rat) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    pub fn add(&mut self, other: &PBWElement) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

/// Straightening engine over a fixed ambient enumeration of the positive roots.
pub struct Straightener<'a> {
    pub rs: &'a RootSystem,
    /// ordering[slot] = root id; a permutation of all positive roots.
    pub ordering: Vec<RootId>,
    slot_of: Vec<usize>,
    insert_cache: RefCell<HashMap<(usize, MultiExp), PBWElement>>,
    append_cache: RefCell<HashMap<(usize, MultiExp), PBWElement>>,
}

impl<'a> Straightener<'a> {
    pub fn new(rs: &'a RootSystem, ordering: Vec<RootId>) -> Self {
        let mut slot_of = vec![usize::MAX; rs.num_positive_roots()];
        for (slot, &r) in ordering.iter().enumerate() {
            slot_of[r] = slot;
        }
        assert!(
            slot_of.iter().all(|&s| s != usize::MAX),
            "ambient ordering must cover all positive roots"
        );
        Straightener {
            rs,
            ordering,
            slot_of,
            insert_cache: RefCell::new(HashMap::new()),
            append_cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn canonical(rs: &'a RootSystem) -> Self {
        Straightener::new(rs, (0..rs.num_positive_roots()).collect())
    }

    pub fn slot_of_root(&self, r: RootId) -> usize {
        self.slot_of[r]
    }

    fn n(&self) -> usize {
        self.ordering.len()
    }

    /// Divided-power commutation chain (D^j x)/j!, D(x) = [x, f_t], starting
    /// from x = f_root. Entry j-1 holds (root after j steps, coefficient).
    fn down_chain(&self, root: RootId, t_slot: usize) -> Vec<(RootId, Rat)> {
        let t_root = self.ordering[t_slot];
        let mut chain = Vec::new();
        let mut current: (RootId, Rat) = (root, rat(1));
        for j in 1i64.. {
            let bracket = self.rs.bracket_sym(Sym::F(current.0), Sym::F(t_root));
            let Some((sym, c)) = bracket.into_iter().next() else {
                break;
            };
            let Sym::F(next) = sym else { unreachable!() };
            let coeff = &current.1 * c / rat(j);
            current = (next, coeff.clone());
            chain.push(current.clone());
        }
        chain
    }

    /// ((ad f_t)^j x)/j! chain starting from x = f_root.
    fn up_chain(&self, root: RootId, t_slot: usize) -> Vec<(RootId, Rat)> {
        let t_root = self.ordering[t_slot];
        let mut chain = Vec::new();
        let mut current: (RootId, Rat) = (root, rat(1));
        for j in 1i64.. {
            let bracket = self.rs.bracket_sym(Sym::F(t_root), Sym::F(current.0));
            let Some((sym, c)) = bracket.into_iter().next() else {
                break;
            };
            let Sym::F(next) = sym else { unreachable!() };
            let coeff = &current.1 * c / rat(j);
            current = (next, coeff.clone());
            chain.push(current.clone());
        }
        chain
    }

    /// Left multiplication by f at `slot`: f_slot * f^(mono).
    pub fn insert(&self, slot: usize, mono: &MultiExp) -> PBWElement {
        if let Some(hit) = self.insert_cache.borrow().get(&(slot, mono.clone())) {
            return hit.clone();
        }
        let result = self.insert_uncached(slot, mono);
        self.insert_cache
            .borrow_mut()
            .insert((slot, mono.clone()), result.clone());
        result
    }

    fn insert_uncached(&self, slot: usize, mono: &MultiExp) -> PBWElement {
        let mut out = PBWElement::zero();
        let first = mono.iter().position(|&x| x > 0);
        match first {
            None => {
                let mut m = vec![0u32; self.n()];
                m[slot] = 1;
                out.add_term(m, rat(1));
            }
            Some(t) if slot <= t => {
                let mut m = mono.clone();
                m[slot] += 1;
                out.add_term(m, rat(mono[slot] as i64 + 1));
            }
            Some(t) => {
                let a = mono[t];
                let mut rest = mono.clone();
                rest[t] = 0;
                // j = 0: f_t^(a) . (f_slot . rest)
                let inner = self.insert(slot, &rest);
                out.add(&self.pow_mul(t, a, &inner));
                // j >= 1: f_t^(a-j) . ((D^j f_slot)/j! . rest)
                for (idx, (root_j, coeff)) in
                    self.down_chain(self.ordering[slot], t).into_iter().enumerate()
                {
                    let j = (idx + 1) as u32;
                    if j > a {
                        break;
                    }
                    let mut inner = self.insert(self.slot_of[root_j], &rest);
                    inner.scale(&coeff);
                    out.add(&self.pow_mul(t, a - j, &inner));
                }
            }
        }
        out
    }

    /// Left multiplication by the divided power f_slot^(b).
    pub fn pow_mul(&self, slot: usize, b: u32, elt: &PBWElement) -> PBWElement {
        let mut acc = elt.clone();
        for _ in 0..b {
            let mut next = PBWElement::zero();
            for (m, c) in &acc.terms {
                let mut piece = self.insert(slot, m);
                piece.scale(c);
                next.add(&piece);
            }
            acc = next;
        }
        if b > 1 {
            acc.scale(&Rat::new(num::BigInt::one(), factorial(b)));
        }
        acc
    }

    /// Right multiplication by f at `slot`: f^(mono) * f_slot.
    pub fn append(&self, slot: usize, mono: &MultiExp) -> PBWElement {
        if let Some(hit) = self.append_cache.borrow().get(&(slot, mono.clone())) {
            return hit.clone();
        }
        let result = self.append_uncached(slot, mono);
        self.append_cache
            .borrow_mut()
            .insert((slot, mono.clone()), result.clone());
        result
    }

    fn append_uncached(&self, slot: usize, mono: &MultiExp) -> PBWElement {
        let mut out = PBWElement::zero();
        let last = mono.iter().rposition(|&x| x > 0);
        match last {
            None => {
                let mut m = vec![0u32; self.n()];
                m[slot] = 1;
                out.add_term(m, rat(1));
            }
            Some(t) if slot >= t => {
                let mut m = mono.clone();
                m[slot] += 1;
                out.add_term(m, rat(mono[slot] as i64 + 1));
            }
            Some(t) => {
                let a = mono[t];
                let mut rest = mono.clone();
                rest[t] = 0;
                // f^(rest) f_t^(a) f_slot with f_t^(a) x = sum_j ((ad f_t)^j x)/j! f_t^(a-j).
                let inner = self.append(slot, &rest);
                out.add(&self.pow_mul_right(t, a, &inner));
                for (idx, (root_j, coeff)) in
                    self.up_chain(self.ordering[slot], t).into_iter().enumerate()
                {
                    let j = (idx + 1) as u32;
                    if j > a {
                        break;
                    }
                    let mut inner = self.append(self.slot_of[root_j], &rest);
                    inner.scale(&coeff);
                    out.add(&self.pow_mul_right(t, a - j, &inner));
                }
            }
        }
        out
    }

    pub fn pow_mul_right(&self, slot: usize, b: u32, elt: &PBWElement) -> PBWElement {
        let mut acc = elt.clone();
        for _ in 0..b {
            let mut next = PBWElement::zero();
            for (m, c) in &acc.terms {
                let mut piece = self.append(slot, m);
                piece.scale(c);
                next.add(&piece);
            }
            acc = next;
        }
        if b > 1 {
            acc.scale(&Rat::new(num::BigInt::one(), factorial(b)));
        }
        acc
    }

    /// Expands a word of (slot, divided exponent) letters, folding from the right.
    pub fn word_to_element(&self, letters: &[(usize, u32)]) -> PBWElement {
        let mut acc = PBWElement::zero();
        acc.add_term(vec![0u32; self.n()], rat(1));
        for &(slot, e) in letters.iter().rev() {
            acc = self.pow_mul(slot, e, &acc);
        }
        acc
    }

    /// Same expansion folding from the left (right multiplications).
    pub fn word_to_element_leftfold(&self, letters: &[(usize, u32)]) -> PBWElement {
        let mut acc = PBWElement::zero();
        acc.add_term(vec![0u32; self.n()], rat(1));
        for &(slot, e) in letters {
            acc = self.pow_mul_right(slot, e, &acc);
        }
        acc
    }
}

/// Straightens a word into ordered divided-power monomials on S-positions.
pub fn straighten(rs: &RootSystem, seq: &BirationalSequence, word: &FreeWord) -> PBWElement {
    for &(pos, _) in &word.letters {
        assert!(pos < seq.len(), "word position out of range");
    }
    if seq.is_repetition_free() {
        // Positions coincide with ambient slots: S is its own ambient ordering.
        let st = Straightener::new(rs, seq.roots.clone());
        return st.word_to_element(&word.letters);
    }
    // Repeated roots: expand canonically, then re-express on the block of
    // position monomials of the same weight, taken in plain lexicographic
    // order (a deterministic choice among the non-unique expansions).
    let st = Straightener::canonical(rs);
    let letters: Vec<(usize, u32)> = word
        .letters
        .iter()
        .map(|&(pos, e)| (st.slot_of_root(seq.roots[pos]), e))
        .collect();
    let canonical = st.word_to_element(&letters);
    if canonical.is_zero() {
        return PBWElement::zero();
    }
    let nu = {
        let m = exp_of_word(word, seq.len());
        seq.weight_of(rs, &m)
    };
    let mut block = seq.weight_block(rs, &nu);
    block.sort();
    let mut col_index: BTreeMap<MultiExp, usize> = BTreeMap::new();
    let expand = |elt: &PBWElement, col_index: &mut BTreeMap<MultiExp, usize>| {
        elt.terms
            .iter()
            .map(|(m, c)| {
                let next = col_index.len();
                let idx = *col_index.entry(m.clone()).or_insert(next);
                (idx, c.clone())
            })
            .collect::<Vec<_>>()
    };
    let mut sparse_rows: Vec<Vec<(usize, Rat)>> = Vec::new();
    for k in &block {
        let letters: Vec<(usize, u32)> = k
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(pos, &e)| (st.slot_of_root(seq.roots[pos]), e))
            .collect();
        let elt = st.word_to_element(&letters);
        sparse_rows.push(expand(&elt, &mut col_index));
    }
    let target_sparse = expand(&canonical, &mut col_index);
    let width = col_index.len();
    let densify = |sparse: &[(usize, Rat)]| {
        let mut row = vec![rat(0); width];
        for (i, c) in sparse {
            row[*i] = c.clone();
        }
        row
    };
    // Eliminate through the block rows in order, tracking the expression of
    // the reduced rows in the original monomials.
    let mut basis: Vec<(usize, Vec<Rat>, Vec<Rat>)> = Vec::new();
    for (ridx, sr) in sparse_rows.iter().enumerate() {
        let mut row = densify(sr);
        let mut expr = vec![rat(0); block.len()];
        expr[ridx] = rat(1);
        for (lead, brow, bexpr) in &basis {
            if !row[*lead].is_zero() {
                let c = row[*lead].clone();
                for (x, b) in row.iter_mut().zip(brow.iter()) {
                    *x -= &c * b;
                }
                for (x, b) in expr.iter_mut().zip(bexpr.iter()) {
                    *x -= &c * b;
                }
            }
        }
        if let Some(lead) = row.iter().position(|x| !x.is_zero()) {
            let inv = row[lead].clone();
            for x in row.iter_mut() {
                *x /= &inv;
            }
            for x in expr.iter_mut() {
                *x /= &inv;
            }
            basis.push((lead, row, expr));
        }
    }
    let mut coeffs = vec![rat(0); block.len()];
    let mut residual = densify(&target_sparse);
    for (lead, brow, bexpr) in &basis {
        if !residual[*lead].is_zero() {
            let c = residual[*lead].clone();
            for (x, b) in residual.iter_mut().zip(brow.iter()) {
                *x -= &c * b;
            }
            for (x, b) in coeffs.iter_mut().zip(bexpr.iter()) {
                *x += &c * b;
            }
        }
    }
    assert!(
        residual.iter().all(|x| x.is_zero()),
        "ordered monomials must span the weight space of U(n^-)"
    );
    let mut out = PBWElement::zero();
    for (k, c) in block.into_iter().zip(coeffs.into_iter()) {
        out.add_term(k, c);
    }
    out
}

/// All componentwise splits a + b = m; divided powers absorb binomials so
/// every split carries coefficient one.
pub fn coproduct_splits(m: &[u32]) -> Vec<(MultiExp, MultiExp)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for &total in m {
        let mut next = Vec::with_capacity(out.len() * (total as usize + 1));
        for (a, b) in &out {
            for x in 0..=total {
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                a2.push(x);
                b2.push(total - x);
                next.push((a2, b2));
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketSide {
    Left,
    Right,
}

/// Checks the (left/right) bracket condition of the sequence; the witness is
/// the first violating position pair (zero-based).
pub fn check_bracket_condition(
    rs: &RootSystem,
    seq: &BirationalSequence,
    side: BracketSide,
) -> std::result::Result<(), (usize, usize)> {
    let n = seq.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let bi = seq.roots[i];
            let bj = seq.roots[j];
            let sum: Vec<i64> = rs.positive_roots[bi]
                .iter()
                .zip(rs.positive_roots[bj].iter())
                .map(|(&x, &y)| x + y)
                .collect();
            if bi == bj || !rs.is_positive_root(&sum) {
                continue; // bracket vanishes
            }
            let target = rs.root_id(&sum).unwrap();
            let ok = match side {
                BracketSide::Left => seq.roots[(i + 1)..].contains(&target),
                BracketSide::Right => seq.roots[..j].contains(&target),
            };
            if !ok {
                return Err((i, j));
            }
        }
    }
    Ok(())
}

/// Outcome of the randomized quasi-commutativity check.
#[derive(Debug, Clone)]
pub enum QuasiCommutative {
    Pass { words_checked: usize },
    Fail { word: Vec<usize>, offending: MultiExp },
}

/// Samples random words of single letters and checks the straightening
/// normal form: full multinomial coefficient at exp(m), all other terms
/// strictly smaller in the order.
pub fn check_quasi_commutative(
    rs: &RootSystem,
    seq: &BirationalSequence,
    order: &OrderSpec,
    word_samples: usize,
    max_degree: u32,
    seed: u64,
) -> Result<QuasiCommutative> {
    if !seq.is_repetition_free() {
        return Err(Error::Invalid(
            "quasi-commutativity is defined for PBW-type sequences".into(),
        ));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..word_samples {
        let degree = rng.gen_range(2..=max_degree.max(2));
        let positions: Vec<usize> = (0..degree).map(|_| rng.gen_range(0..seq.len())).collect();
        if let Some(offending) = quasi_comm_violation(rs, seq, order, &positions) {
            return Ok(QuasiCommutative::Fail {
                word: positions,
                offending,
            });
        }
    }
    Ok(QuasiCommutative::Pass {
        words_checked: word_samples,
    })
}

/// Returns the offending exponent of a single word of plain letters, if any.
pub fn quasi_comm_violation(
    rs: &RootSystem,
    seq: &BirationalSequence,
    order: &OrderSpec,
    positions: &[usize],
) -> Option<MultiExp> {
    let word = FreeWord::new(positions.iter().map(|&p| (p, 1)).collect());
    let exp = exp_of_word(&word, seq.len());
    let elt = straighten(rs, seq, &word);
    let expected: Rat = Rat::from_integer(
        exp.iter()
            .map(|&e| factorial(e))
            .fold(num::BigInt::one(), |a, b| a * b),
    );
    match elt.terms.get(&exp) {
        Some(c) if *c == expected => {}
        _ => return Some(exp),
    }
    for m in elt.terms.keys() {
        if m != &exp && order.cmp(m, &exp) != std::cmp::Ordering::Less {
            return Some(m.clone());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::{OrderSpec, OrderVariant, WeightFunction};
    use crate::rootsys::{build_root_system, Family, RootSystemSpec};

    fn rs(family: Family, rank: usize) -> RootSystem {
        build_root_system(RootSystemSpec::new(family, rank).unwrap()).unwrap()
    }

    fn order(coeffs: Vec<u64>, variant: OrderVariant) -> OrderSpec {
        OrderSpec::new(WeightFunction { coeffs }, variant).unwrap()
    }

    #[test]
    fn sl2_divided_powers() {
        let r = rs(Family::A, 1);
        let seq = BirationalSequence::pbw(&r, vec![0]).unwrap();
        let w = FreeWord::new(vec![(0, 1), (0, 1)]);
        let elt = straighten(&r, &seq, &w);
        assert_eq!(elt.terms.len(), 1);
        assert_eq!(elt.terms[&vec![2u32]], rat(2));
    }

    #[test]
    fn a2_single_commutator() {
        let r = rs(Family::A, 2);
        let a1 = r.root_id(&[1, 0]).unwrap();
        let a12 = r.root_id(&[1, 1]).unwrap();
        let a2 = r.root_id(&[0, 1]).unwrap();
        let seq = BirationalSequence::pbw(&r, vec![a1, a12, a2]).unwrap();
        // f_{a2} . f_{a1}
        let w = FreeWord::new(vec![(2, 1), (0, 1)]);
        let elt = straighten(&r, &seq, &w);
        assert_eq!(elt.terms.len(), 2);
        assert_eq!(elt.terms[&vec![1, 0, 1]], rat(1));
        let n = r.chevalley_f(a2, a1);
        assert_eq!(n.abs(), 1);
        assert_eq!(elt.terms[&vec![0, 1, 0]], rat(n));
    }

    #[test]
    fn serre_combination_vanishes() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        // f1^(2) f2 - f1 f2 f1 + f2 f1^(2), the f1 letters at position 0.
        let w1 = FreeWord::new(vec![(0, 2), (1, 1)]);
        let w2 = FreeWord::new(vec![(0, 1), (1, 1), (0, 1)]);
        let w3 = FreeWord::new(vec![(1, 1), (0, 2)]);
        let mut total = straighten(&r, &seq, &w1);
        let mut mid = straighten(&r, &seq, &w2);
        mid.scale(&rat(-1));
        total.add(&mid);
        total.add(&straighten(&r, &seq, &w3));
        assert!(total.is_zero(), "Serre relation must straighten to zero: {total:?}");
    }

    #[test]
    fn ordered_word_is_fixed() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::good_ordering(&r);
        let w = FreeWord::new(vec![(0, 2), (1, 1), (2, 3)]);
        let elt = straighten(&r, &seq, &w);
        assert_eq!(elt.terms.len(), 1);
        assert_eq!(elt.terms[&vec![2, 1, 3]], rat(1));
        // Same position split across letters: multinomial coefficient.
        let w2 = FreeWord::new(vec![(0, 1), (0, 1)]);
        let elt2 = straighten(&r, &seq, &w2);
        assert_eq!(elt2.terms[&vec![2, 0, 0]], rat(2));
    }

    #[test]
    fn exp_of_word_examples() {
        let w = FreeWord::new(vec![(2, 1), (0, 1), (2, 1)]);
        assert_eq!(exp_of_word(&w, 3), vec![1, 0, 2]);
        let empty = FreeWord::new(vec![]);
        assert_eq!(exp_of_word(&empty, 3), vec![0, 0, 0]);
        let dp = FreeWord::new(vec![(0, 2)]);
        assert_eq!(exp_of_word(&dp, 4), vec![2, 0, 0, 0]);
    }

    #[test]
    fn weight_homogeneity() {
        let r = rs(Family::C, 2);
        let seq = BirationalSequence::good_ordering(&r);
        let w = FreeWord::new(vec![(3, 1), (1, 1), (0, 1), (2, 2)]);
        let elt = straighten(&r, &seq, &w);
        let nu = seq.weight_of(&r, &exp_of_word(&w, 4));
        assert!(!elt.is_zero());
        for m in elt.terms.keys() {
            assert_eq!(seq.weight_of(&r, m), nu);
        }
    }

    #[test]
    fn confluence_left_vs_right_fold() {
        let r = rs(Family::C, 2);
        let st = Straightener::new(&r, BirationalSequence::good_ordering(&r).roots);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        for _ in 0..60 {
            let len = rand::Rng::gen_range(&mut rng, 1..=5);
            let letters: Vec<(usize, u32)> = (0..len)
                .map(|_| {
                    (
                        rand::Rng::gen_range(&mut rng, 0..4usize),
                        rand::Rng::gen_range(&mut rng, 1..=2u32),
                    )
                })
                .collect();
            let lhs = st.word_to_element(&letters);
            let rhs = st.word_to_element_leftfold(&letters);
            assert_eq!(lhs, rhs, "strategies disagree on {letters:?}");
        }
    }

    #[test]
    fn bracket_conditions() {
        let r = rs(Family::A, 2);
        // Lusztig sequence of the word (1,2,1): (a1, a1+a2, a2).
        let lus = BirationalSequence::lusztig(&r, &[0, 1, 0]).unwrap();
        assert!(check_bracket_condition(&r, &lus, BracketSide::Left).is_ok());
        assert!(check_bracket_condition(&r, &lus, BracketSide::Right).is_ok());

        let a1 = r.root_id(&[1, 0]).unwrap();
        let a2 = r.root_id(&[0, 1]).unwrap();
        let a12 = r.root_id(&[1, 1]).unwrap();
        let s = BirationalSequence::pbw(&r, vec![a1, a2, a12]).unwrap();
        assert!(check_bracket_condition(&r, &s, BracketSide::Left).is_ok());
        assert_eq!(
            check_bracket_condition(&r, &s, BracketSide::Right),
            Err((0, 1))
        );

        let a3 = rs(Family::A, 3);
        let good = BirationalSequence::good_ordering(&a3);
        assert!(check_bracket_condition(&a3, &good, BracketSide::Right).is_ok());
    }

    #[test]
    fn quasi_commutativity_positive_cases() {
        let r = rs(Family::A, 2);
        let good = BirationalSequence::good_ordering(&r);
        let hom_rlex = order(vec![1, 1, 1], OrderVariant::WRLex);
        match check_quasi_commutative(&r, &good, &hom_rlex, 100, 5, 42).unwrap() {
            QuasiCommutative::Pass { .. } => {}
            QuasiCommutative::Fail { word, offending } => {
                panic!("unexpected failure at {word:?} / {offending:?}")
            }
        }
        let asc = BirationalSequence::ascending_ordering(&r);
        let lex = order(vec![0, 0, 0], OrderVariant::WLex);
        assert!(matches!(
            check_quasi_commutative(&r, &asc, &lex, 100, 5, 42).unwrap(),
            QuasiCommutative::Pass { .. }
        ));
    }

    #[test]
    fn quasi_commutativity_mismatch_witness() {
        // Right-bracket (good) ordering with the plain lex order fails.
        let r = rs(Family::A, 2);
        let good = BirationalSequence::good_ordering(&r);
        let lex = order(vec![0, 0, 0], OrderVariant::WLex);
        let mut found = None;
        'search: for d in 2..=4u32 {
            for w in all_words(good.len(), d) {
                if let Some(off) = quasi_comm_violation(&r, &good, &lex, &w) {
                    found = Some((w, off));
                    break 'search;
                }
            }
        }
        assert!(found.is_some(), "exhaustive search found no witness");
    }

    fn all_words(positions: usize, degree: u32) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..degree {
            let mut next = Vec::new();
            for w in &out {
                for p in 0..positions {
                    let mut w2 = w.clone();
                    w2.push(p);
                    next.push(w2);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn coproduct_split_examples() {
        let splits = coproduct_splits(&[1, 1]);
        assert_eq!(splits.len(), 4);
        assert!(splits.contains(&(vec![1, 0], vec![0, 1])));
        assert_eq!(coproduct_splits(&[0, 0]).len(), 1);
        assert_eq!(coproduct_splits(&[2]).len(), 3);
    }

    #[test]
    fn weight_block_enumeration() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        // Weight 2a1 + a2: (2,1,0), (1,1,1), (0,1,2).
        let block = seq.weight_block(&r, &[2, 1]);
        assert_eq!(block.len(), 3);
        assert!(block.contains(&vec![2, 1, 0]));
        assert!(block.contains(&vec![1, 1, 1]));
        assert!(block.contains(&vec![0, 1, 2]));
    }

    #[test]
    fn straighten_with_repeated_roots() {
        let r = rs(Family::A, 2);
        let seq = BirationalSequence::from_reduced_word(&r, &[0, 1, 0]).unwrap();
        // f2 f1 has weight a1+a2; the expansion must reproduce the input in
        // U(n^-) when recombined through the canonical basis.
        let w = FreeWord::new(vec![(1, 1), (0, 1)]);
        let elt = straighten(&r, &seq, &w);
        let st = Straightener::canonical(&r);
        let direct = st.word_to_element(&[
            (st.slot_of_root(seq.roots[1]), 1),
            (st.slot_of_root(seq.roots[0]), 1),
        ]);
        let mut recombined = PBWElement::zero();
        for (m, c) in &elt.terms {
            let letters: Vec<(usize, u32)> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(pos, &e)| (st.slot_of_root(seq.roots[pos]), e))
                .collect();
            let mut piece = st.word_to_element(&letters);
            piece.scale(c);
            recombined.add(&piece);
        }
        assert_eq!(recombined, direct);
    }
}
