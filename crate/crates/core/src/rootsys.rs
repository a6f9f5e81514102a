//! Root systems of types A, B, C, D and G2 with a fixed Chevalley basis.
//!
//! Positive roots are stored in simple-root coordinates, sorted by height and
//! then lexicographically; this sorted position is the canonical root index
//! used everywhere else. Structure constants are built by the classical
//! extraspecial-pair convention: for each non-simple positive root the
//! lexicographically minimal decomposition gets a positive constant, and all
//! remaining constants are forced by antisymmetry, `N(-a,-b) = -N(a,b)` and
//! the Jacobi identity.

use crate::rat::{rat, Rat};
use crate::{Error, Result};
use num::{Signed, Zero};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::G => 'G',
        };
        write!(f, "{c}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootSystemSpec {
    pub family: Family,
    pub rank: usize,
}

impl RootSystemSpec {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            // D2 is A1 x A1, hence not simple; reject it explicitly.
            Family::D => rank >= 3,
            Family::G => rank == 2,
        };
        if ok {
            Ok(RootSystemSpec { family, rank })
        } else {
            Err(Error::InvalidRootSystem(format!(
                "{family}{rank} is not a supported simple type"
            )))
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() < 2 {
            return Err(Error::Invalid(format!("cannot parse root system `{s}`")));
        }
        let family = match &s[..1] {
            "A" | "a" => Family::A,
            "B" | "b" => Family::B,
            "C" | "c" => Family::C,
            "D" | "d" => Family::D,
            "G" | "g" => Family::G,
            other => {
                return Err(Error::Invalid(format!("unknown family `{other}`")));
            }
        };
        let rank: usize = s[1..]
            .parse()
            .map_err(|_| Error::Invalid(format!("bad rank in `{s}`")))?;
        RootSystemSpec::new(family, rank)
    }
}

/// Index of a positive root in `RootSystem::positive_roots`.
pub type RootId = usize;

/// Basis symbols of the Chevalley basis of g.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    E(RootId),
    F(RootId),
    H(usize),
}

/// Sparse element of g in the Chevalley basis.
pub type LieElt = Vec<(Sym, Rat)>;

pub struct RootSystem {
    pub spec: RootSystemSpec,
    /// cartan[i][j] = <alpha_j, alpha_i^vee>.
    pub cartan: Vec<Vec<i64>>,
    /// Positive roots in simple-root coordinates, canonical (height, lex) order.
    pub positive_roots: Vec<Vec<i64>>,
    pub heights: Vec<i64>,
    /// Symmetrizer: (alpha_i, alpha_i) = 2 d_i.
    pub d: Vec<i64>,
    /// Coefficients of beta^vee on the simple coroots.
    pub coroot_coeffs: Vec<Vec<i64>>,
    root_index: HashMap<Vec<i64>, RootId>,
    /// Structure constants in the e-convention: [e_a, e_b] = n e_{a+b}.
    pos_n: HashMap<(RootId, RootId), i64>,
    inv_cartan: Vec<Vec<Rat>>,
}

pub fn build_root_system(spec: RootSystemSpec) -> Result<RootSystem> {
    let n = spec.rank;
    let cartan = cartan_matrix(spec);
    let d = symmetrizer(&cartan);

    // Positive roots by string closure from the simple roots.
    let mut roots: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut v = vec![0i64; n];
            v[i] = 1;
            v
        })
        .collect();
    let mut seen: HashMap<Vec<i64>, ()> = roots.iter().cloned().map(|r| (r, ())).collect();
    let mut frontier = roots.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for beta in &frontier {
            for i in 0..n {
                if beta.iter().enumerate().all(|(j, &c)| c == i64::from(j == i)) {
                    continue; // beta = alpha_i, 2 alpha_i is never a root
                }
                let mut p = 0i64;
                let mut v = beta.clone();
                loop {
                    v[i] -= 1;
                    if seen.contains_key(&v) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i64 = (0..n).map(|j| beta[j] * cartan[i][j]).sum();
                if p - pairing >= 1 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if !seen.contains_key(&up) {
                        seen.insert(up.clone(), ());
                        next.push(up);
                    }
                }
            }
        }
        roots.extend(next.iter().cloned());
        frontier = next;
    }
    roots.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
    let heights: Vec<i64> = roots.iter().map(|r| r.iter().sum()).collect();
    let root_index: HashMap<Vec<i64>, usize> = roots
        .iter()
        .enumerate()
        .map(|(k, r)| (r.clone(), k))
        .collect();

    let coroot_coeffs = roots
        .iter()
        .map(|beta| {
            let nb = norm2(beta, &cartan, &d);
            beta.iter()
                .enumerate()
                .map(|(i, &b)| {
                    let num = 2 * b * d[i];
                    assert_eq!(num % nb, 0, "coroot coefficients must be integral");
                    num / nb
                })
                .collect()
        })
        .collect();

    let inv_cartan = invert_cartan(&cartan);

    let mut rs = RootSystem {
        spec,
        cartan,
        positive_roots: roots,
        heights,
        d,
        coroot_coeffs,
        root_index,
        pos_n: HashMap::new(),
        inv_cartan,
    };
    rs.build_chevalley();
    Ok(rs)
}

fn cartan_matrix(spec: RootSystemSpec) -> Vec<Vec<i64>> {
    let n = spec.rank;
    let mut c = vec![vec![0i64; n]; n];
    for i in 0..n {
        c[i][i] = 2;
        if i + 1 < n {
            c[i][i + 1] = -1;
            c[i + 1][i] = -1;
        }
    }
    match spec.family {
        Family::A => {}
        Family::B => {
            // alpha_n short: <alpha_{n-1}, alpha_n^vee> = -2.
            c[n - 1][n - 2] = -2;
        }
        Family::C => {
            // alpha_n long: <alpha_n, alpha_{n-1}^vee> = -2.
            c[n - 2][n - 1] = -2;
        }
        Family::D => {
            c[n - 1][n - 2] = 0;
            c[n - 2][n - 1] = 0;
            c[n - 1][n - 3] = -1;
            c[n - 3][n - 1] = -1;
        }
        Family::G => {
            // alpha_1 short, alpha_2 long; highest root 3a + 2b.
            c[0][1] = -3;
            c[1][0] = -1;
        }
    }
    c
}

fn symmetrizer(cartan: &[Vec<i64>]) -> Vec<i64> {
    let n = cartan.len();
    let mut d: Vec<Option<Rat>> = vec![None; n];
    d[0] = Some(rat(1));
    let mut progress = true;
    while progress {
        progress = false;
        for i in 0..n {
            for j in 0..n {
                if i != j && cartan[i][j] != 0 {
                    if let (Some(di), None) = (d[i].clone(), &d[j]) {
                        // d_i c_ij = d_j c_ji
                        d[j] = Some(di * rat(cartan[i][j]) / rat(cartan[j][i]));
                        progress = true;
                    }
                }
            }
        }
    }
    let vals: Vec<Rat> = d.into_iter().map(|x| x.expect("connected diagram")).collect();
    let denom_lcm = vals
        .iter()
        .map(|v| v.denom().clone())
        .fold(num::BigInt::from(1), num::integer::lcm);
    vals.iter()
        .map(|v| {
            let scaled = v * Rat::from_integer(denom_lcm.clone());
            crate::rat::rat_to_i64(&scaled)
        })
        .collect()
}

/// (beta, beta) in the scaled normalization (alpha_i, alpha_i) = 2 d_i.
fn norm2(beta: &[i64], cartan: &[Vec<i64>], d: &[i64]) -> i64 {
    let n = beta.len();
    let mut acc = 0i64;
    for i in 0..n {
        for j in 0..n {
            acc += beta[i] * beta[j] * d[i] * cartan[i][j];
        }
    }
    acc
}

fn invert_cartan(cartan: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    let n = cartan.len();
    let mut cols = Vec::new();
    let a: Vec<Vec<Rat>> = cartan
        .iter()
        .map(|row| row.iter().map(|&x| rat(x)).collect())
        .collect();
    for j in 0..n {
        let mut e = vec![rat(0); n];
        e[j] = rat(1);
        cols.push(crate::linalg::solve(&a, &e).expect("Cartan matrix is invertible"));
    }
    // cols[j][i] = (C^{-1})_{ij}; transpose into row-major inverse.
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect()
}

impl RootSystem {
    pub fn rank(&self) -> usize {
        self.spec.rank
    }

    /// Number of positive roots.
    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn root_id(&self, coords: &[i64]) -> Option<RootId> {
        self.root_index.get(coords).copied()
    }

    pub fn is_positive_root(&self, coords: &[i64]) -> bool {
        self.root_index.contains_key(coords)
    }

    fn is_root(&self, coords: &[i64]) -> bool {
        if self.root_index.contains_key(coords) {
            return true;
        }
        let neg: Vec<i64> = coords.iter().map(|&x| -x).collect();
        self.root_index.contains_key(&neg)
    }

    pub fn norm2(&self, coords: &[i64]) -> i64 {
        norm2(coords, &self.cartan, &self.d)
    }

    /// <v, alpha_i^vee> for v in simple-root coordinates.
    pub fn pairing_simple_coroot(&self, v: &[i64], i: usize) -> i64 {
        (0..self.rank()).map(|j| v[j] * self.cartan[i][j]).sum()
    }

    /// <lambda, beta^vee> for lambda in fundamental-weight coordinates.
    pub fn pairing_weight_coroot(&self, lambda: &[i64], beta: RootId) -> i64 {
        lambda
            .iter()
            .zip(self.coroot_coeffs[beta].iter())
            .map(|(&a, &c)| a * c)
            .sum()
    }

    /// Root coordinates of a weight given in fundamental-weight coordinates.
    pub fn weight_to_root_coords(&self, lambda: &[i64]) -> Vec<Rat> {
        (0..self.rank())
            .map(|k| {
                (0..self.rank())
                    .map(|j| &self.inv_cartan[k][j] * rat(lambda[j]))
                    .sum()
            })
            .collect()
    }

    /// Symmetric bilinear form on weights (fundamental-weight coordinates).
    pub fn weight_inner(&self, a: &[i64], b: &[i64]) -> Rat {
        let xa = self.weight_to_root_coords(a);
        let xb = self.weight_to_root_coords(b);
        let n = self.rank();
        let mut acc = rat(0);
        for i in 0..n {
            for j in 0..n {
                acc += &xa[i] * &xb[j] * rat(self.d[i] * self.cartan[i][j]);
            }
        }
        acc
    }

    // ------------------------------------------------------------------
    // Chevalley structure constants
    // ------------------------------------------------------------------

    fn build_chevalley(&mut self) {
        let count = self.num_positive_roots();
        for g in 0..count {
            if self.heights[g] == 1 {
                continue;
            }
            let gamma = self.positive_roots[g].clone();
            // Special pairs (a, b), a < b in canonical order, summing to gamma.
            let mut pairs = Vec::new();
            for a in 0..count {
                for b in (a + 1)..count {
                    let sum: Vec<i64> = gamma
                        .iter()
                        .zip(self.positive_roots[a].iter().zip(self.positive_roots[b].iter()))
                        .map(|(&g, (&x, &y))| g - x - y)
                        .collect();
                    if sum.iter().all(|&x| x == 0) {
                        pairs.push((a, b));
                    }
                }
            }
            assert!(!pairs.is_empty(), "non-simple root without decomposition");
            let (a1, b1) = pairs[0];
            let p1 = self.string_down(b1, a1);
            self.set_pos_n(a1, b1, p1 + 1);
            let denom = rat(self.norm2(&self.positive_roots[b1]))
                / rat(self.norm2(&gamma))
                * rat(p1 + 1);
            for &(a, b) in pairs.iter().skip(1) {
                let ra = self.positive_roots[a].clone();
                let rb = self.positive_roots[b].clone();
                let ra1 = self.positive_roots[a1].clone();
                let neg_a1: Vec<i64> = ra1.iter().map(|&x| -x).collect();
                let mut total = rat(0);
                let diff_a: Vec<i64> = ra.iter().zip(ra1.iter()).map(|(&x, &y)| x - y).collect();
                if self.is_root(&diff_a) {
                    let first = self.n_const(&neg_a1, &ra);
                    let second = self.n_const(&diff_a, &rb);
                    total += first * second;
                }
                let diff_b: Vec<i64> = rb.iter().zip(ra1.iter()).map(|(&x, &y)| x - y).collect();
                if self.is_root(&diff_b) {
                    let first = self.n_const(&neg_a1, &rb);
                    let second = self.n_const(&ra, &diff_b);
                    total += first * second;
                }
                let value = total / &denom;
                let n_ab = crate::rat::rat_to_i64(&value);
                let p = self.string_down(b, a);
                assert_eq!(
                    n_ab.abs(),
                    p + 1,
                    "structure constant magnitude must match the root string"
                );
                self.set_pos_n(a, b, n_ab);
            }
        }
    }

    fn set_pos_n(&mut self, a: RootId, b: RootId, n: i64) {
        self.pos_n.insert((a, b), n);
        self.pos_n.insert((b, a), -n);
    }

    /// Down length of the a-string through b inside the full root system.
    fn string_down(&self, b: RootId, a: RootId) -> i64 {
        let ra = &self.positive_roots[a];
        let mut v = self.positive_roots[b].clone();
        let mut p = 0;
        loop {
            for (x, y) in v.iter_mut().zip(ra.iter()) {
                *x -= y;
            }
            if self.is_root(&v) {
                p += 1;
            } else {
                return p;
            }
        }
    }

    /// Structure constant [e_u, e_v] = n_const(u, v) e_{u+v} for arbitrary
    /// (signed) roots u, v with u + v a root. Zero when u + v is not a root.
    pub fn n_const(&self, u: &[i64], v: &[i64]) -> Rat {
        let sum: Vec<i64> = u.iter().zip(v.iter()).map(|(&x, &y)| x + y).collect();
        if !self.is_root(&sum) {
            return rat(0);
        }
        let u_pos = self.root_index.contains_key(u);
        let v_pos = self.root_index.contains_key(v);
        let neg = |w: &[i64]| -> Vec<i64> { w.iter().map(|&x| -x).collect() };
        if u_pos && v_pos {
            let a = self.root_index[u];
            let b = self.root_index[v];
            return rat(*self.pos_n.get(&(a, b)).expect("positive pair in table"));
        }
        if !u_pos && !v_pos {
            return -self.n_const(&neg(u), &neg(v));
        }
        if !u_pos && v_pos {
            return -self.n_const(v, u);
        }
        // u positive, v negative.
        if self.root_index.contains_key(&sum) {
            // zeta = -(u+v) negative; N_{u,v} = (sum,sum)/(u,u) * N_{v,zeta}
            let scale = rat(self.norm2(&sum)) / rat(self.norm2(u));
            let nv = neg(v);
            scale * -self.n_const(&nv, &sum)
        } else {
            // u + v negative; zeta = -(u+v) positive; N_{u,v} = (sum,sum)/(v,v) * N_{zeta,u}
            let zeta = neg(&sum);
            let scale = rat(self.norm2(&sum)) / rat(self.norm2(v));
            scale * self.n_const(&zeta, u)
        }
    }

    /// f-convention constant: [f_b, f_g] = chevalley_f(b, g) f_{b+g}.
    pub fn chevalley_f(&self, b: RootId, g: RootId) -> i64 {
        let sum: Vec<i64> = self.positive_roots[b]
            .iter()
            .zip(self.positive_roots[g].iter())
            .map(|(&x, &y)| x + y)
            .collect();
        if !self.is_positive_root(&sum) {
            return 0;
        }
        -*self.pos_n.get(&(b, g)).expect("pair in table")
    }

    /// Bracket of two Chevalley basis symbols.
    pub fn bracket_sym(&self, x: Sym, y: Sym) -> LieElt {
        match (x, y) {
            (Sym::H(_), Sym::H(_)) => Vec::new(),
            (Sym::H(i), Sym::E(b)) => {
                let c = self.pairing_simple_coroot(&self.positive_roots[b], i);
                scaled(Sym::E(b), rat(c))
            }
            (Sym::H(i), Sym::F(b)) => {
                let c = self.pairing_simple_coroot(&self.positive_roots[b], i);
                scaled(Sym::F(b), rat(-c))
            }
            (Sym::E(_), Sym::H(_)) | (Sym::F(_), Sym::H(_)) => neg_elt(self.bracket_sym(y, x)),
            (Sym::E(a), Sym::E(b)) => {
                if a == b {
                    return Vec::new();
                }
                let sum: Vec<i64> = self.positive_roots[a]
                    .iter()
                    .zip(self.positive_roots[b].iter())
                    .map(|(&x, &y)| x + y)
                    .collect();
                match self.root_id(&sum) {
                    Some(s) => scaled(Sym::E(s), rat(self.pos_n[&(a, b)])),
                    None => Vec::new(),
                }
            }
            (Sym::F(a), Sym::F(b)) => {
                if a == b {
                    return Vec::new();
                }
                let sum: Vec<i64> = self.positive_roots[a]
                    .iter()
                    .zip(self.positive_roots[b].iter())
                    .map(|(&x, &y)| x + y)
                    .collect();
                match self.root_id(&sum) {
                    Some(s) => scaled(Sym::F(s), rat(-self.pos_n[&(a, b)])),
                    None => Vec::new(),
                }
            }
            (Sym::E(a), Sym::F(b)) => {
                if a == b {
                    return self.coroot_coeffs[a]
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, &c)| (Sym::H(i), rat(c)))
                        .collect();
                }
                let diff: Vec<i64> = self.positive_roots[a]
                    .iter()
                    .zip(self.positive_roots[b].iter())
                    .map(|(&x, &y)| x - y)
                    .collect();
                let neg_rb: Vec<i64> = self.positive_roots[b].iter().map(|&x| -x).collect();
                let c = self.n_const(&self.positive_roots[a].clone(), &neg_rb);
                if c.is_zero() {
                    return Vec::new();
                }
                if let Some(s) = self.root_id(&diff) {
                    scaled(Sym::E(s), c)
                } else {
                    let neg_diff: Vec<i64> = diff.iter().map(|&x| -x).collect();
                    let s = self.root_id(&neg_diff).expect("difference is a root");
                    scaled(Sym::F(s), c)
                }
            }
            (Sym::F(_), Sym::E(_)) => neg_elt(self.bracket_sym(y, x)),
        }
    }

    /// Bracket of sparse Lie algebra elements.
    pub fn bracket(&self, x: &[(Sym, Rat)], y: &[(Sym, Rat)]) -> LieElt {
        let mut acc: HashMap<Sym, Rat> = HashMap::new();
        for (sx, cx) in x {
            for (sy, cy) in y {
                for (s, c) in self.bracket_sym(*sx, *sy) {
                    let e = acc.entry(s).or_insert_with(|| rat(0));
                    *e += c * cx * cy;
                }
            }
        }
        let mut out: Vec<(Sym, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.sort_by_key(|(s, _)| *s);
        out
    }

    /// Matrix of ad(f_beta) on the Chevalley basis, ordered E(0..N), F(0..N), H(0..n).
    pub fn ad_f_matrix(&self, beta: RootId) -> Vec<Vec<Rat>> {
        let nr = self.num_positive_roots();
        let dim = 2 * nr + self.rank();
        let idx = |s: Sym| -> usize {
            match s {
                Sym::E(k) => k,
                Sym::F(k) => nr + k,
                Sym::H(i) => 2 * nr + i,
            }
        };
        let mut m = vec![vec![rat(0); dim]; dim];
        for col in 0..dim {
            let sym = if col < nr {
                Sym::E(col)
            } else if col < 2 * nr {
                Sym::F(col - nr)
            } else {
                Sym::H(col - 2 * nr)
            };
            for (s, c) in self.bracket_sym(Sym::F(beta), sym) {
                m[idx(s)][col] = c;
            }
        }
        m
    }

    // ------------------------------------------------------------------
    // Weyl group words
    // ------------------------------------------------------------------

    /// s_i acting on simple-root coordinates.
    pub fn reflect_simple(&self, i: usize, v: &[i64]) -> Vec<i64> {
        let pairing = self.pairing_simple_coroot(v, i);
        let mut out = v.to_vec();
        out[i] -= pairing;
        out
    }

    /// beta_k = s_{i_1} ... s_{i_{k-1}}(alpha_{i_k}); errors if the word is
    /// not reduced. Indices are zero-based.
    pub fn roots_from_reduced_word(&self, word: &[usize]) -> Result<Vec<RootId>> {
        let n = self.rank();
        for &i in word {
            if i >= n {
                return Err(Error::Invalid(format!("simple-root index {i} out of range")));
            }
        }
        let mut out = Vec::with_capacity(word.len());
        for (k, &ik) in word.iter().enumerate() {
            let mut v = vec![0i64; n];
            v[ik] = 1;
            for &i in word[..k].iter().rev() {
                v = self.reflect_simple(i, &v);
            }
            match self.root_id(&v) {
                Some(id) => out.push(id),
                None => {
                    return Err(Error::NotReduced(format!(
                        "prefix of length {} sends alpha_{} to a negative root",
                        k + 1,
                        ik + 1
                    )))
                }
            }
        }
        let mut distinct = out.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != out.len() {
            return Err(Error::NotReduced("repeated root in the induced sequence".into()));
        }
        Ok(out)
    }

    /// Fundamental-weight coordinates of s_i(lambda).
    pub fn reflect_weight(&self, i: usize, lambda: &[i64]) -> Vec<i64> {
        let li = lambda[i];
        (0..self.rank())
            .map(|j| lambda[j] - li * self.cartan[j][i])
            .collect()
    }

    /// Dominant representative of the Weyl orbit of a weight.
    pub fn dominantize(&self, lambda: &[i64]) -> Vec<i64> {
        let mut v = lambda.to_vec();
        loop {
            match v.iter().position(|&x| x < 0) {
                None => return v,
                Some(i) => v = self.reflect_weight(i, &v),
            }
        }
    }

    // ------------------------------------------------------------------
    // Dimension and multiplicity oracles
    // ------------------------------------------------------------------

    /// Weyl dimension formula, exact.
    pub fn weyl_dim(&self, lambda: &[i64]) -> num::BigInt {
        assert_eq!(lambda.len(), self.rank());
        assert!(lambda.iter().all(|&a| a >= 0), "weight must be dominant");
        let mut acc = rat(1);
        for beta in 0..self.num_positive_roots() {
            let num: i64 = self
                .coroot_coeffs[beta]
                .iter()
                .zip(lambda.iter())
                .map(|(&c, &a)| c * (a + 1))
                .sum();
            let den: i64 = self.coroot_coeffs[beta].iter().sum();
            acc *= rat(num) / rat(den);
        }
        assert!(acc.is_integer(), "Weyl dimension must be an integer");
        acc.to_integer()
    }

    /// All weights of V(lambda) with their multiplicities, by Freudenthal.
    ///
    /// Returns (fundamental coordinates, root coordinates of lambda - mu,
    /// multiplicity) triples for every weight mu with nonzero multiplicity.
    pub fn weight_system(&self, lambda: &[i64]) -> Vec<(Vec<i64>, Vec<i64>, u64)> {
        let n = self.rank();
        let lowest_neg = self.dominantize(&lambda.iter().map(|&a| -a).collect::<Vec<_>>());
        // Box bound: lambda - w0(lambda) in root coordinates.
        let spread: Vec<i64> = {
            let sum: Vec<i64> = lambda
                .iter()
                .zip(lowest_neg.iter())
                .map(|(&a, &b)| a + b)
                .collect();
            let rc = self.weight_to_root_coords(&sum);
            rc.iter().map(crate::rat::rat_to_i64).collect()
        };
        // Dominant candidates mu = lambda - sum k_i alpha_i.
        let mut dominant: Vec<(Vec<i64>, Vec<i64>)> = Vec::new(); // (mu fund, k)
        let mut k = vec![0i64; n];
        loop {
            let mu: Vec<i64> = (0..n)
                .map(|i| lambda[i] - (0..n).map(|j| self.cartan[i][j] * k[j]).sum::<i64>())
                .collect();
            if mu.iter().all(|&x| x >= 0) {
                dominant.push((mu, k.clone()));
            }
            // Increment k within the box.
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                k[pos] += 1;
                if k[pos] <= spread[pos] {
                    break;
                }
                k[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
        dominant.sort_by_key(|(_, k)| (k.iter().sum::<i64>(), k.clone()));
        let rho = vec![1i64; n];
        let lam_rho: Vec<i64> = lambda.iter().zip(rho.iter()).map(|(&a, &r)| a + r).collect();
        let c_lam = self.weight_inner(&lam_rho, &lam_rho);
        let mut mult: HashMap<Vec<i64>, u64> = HashMap::new();
        let lookup = |table: &HashMap<Vec<i64>, u64>, rs: &RootSystem, w: &[i64]| -> u64 {
            *table.get(&rs.dominantize(w)).unwrap_or(&0)
        };
        for (mu, kvec) in &dominant {
            if kvec.iter().all(|&x| x == 0) {
                mult.insert(mu.clone(), 1);
                continue;
            }
            let mut acc = rat(0);
            for beta in 0..self.num_positive_roots() {
                // Fundamental coordinates of beta.
                let beta_fund: Vec<i64> = (0..n)
                    .map(|j| self.pairing_simple_coroot(&self.positive_roots[beta], j))
                    .collect();
                let mut step = 1i64;
                loop {
                    // mu + step*beta must satisfy lambda - it in N.Phi+.
                    let rem: Vec<i64> = (0..n)
                        .map(|i| kvec[i] - step * self.positive_roots[beta][i])
                        .collect();
                    if rem.iter().any(|&x| x < 0) {
                        break;
                    }
                    let w: Vec<i64> = (0..n).map(|i| mu[i] + step * beta_fund[i]).collect();
                    let m = lookup(&mult, self, &w);
                    if m > 0 {
                        let inner = self.weight_inner(&w, &beta_fund);
                        acc += inner * rat(m as i64);
                    }
                    step += 1;
                }
            }
            let mu_rho: Vec<i64> = mu.iter().zip(rho.iter()).map(|(&a, &r)| a + r).collect();
            let denom = &c_lam - self.weight_inner(&mu_rho, &mu_rho);
            let value = acc * rat(2) / denom;
            assert!(value.is_integer() && !value.is_negative(), "Freudenthal failure");
            let m = crate::rat::rat_to_i64(&value) as u64;
            if m > 0 {
                mult.insert(mu.clone(), m);
            }
        }
        // Expand over the full box, reading multiplicities off the dominant table.
        let mut out = Vec::new();
        let mut k = vec![0i64; n];
        loop {
            let mu: Vec<i64> = (0..n)
                .map(|i| lambda[i] - (0..n).map(|j| self.cartan[i][j] * k[j]).sum::<i64>())
                .collect();
            let m = lookup(&mult, self, &mu);
            if m > 0 {
                out.push((mu, k.clone(), m));
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                k[pos] += 1;
                if k[pos] <= spread[pos] {
                    break;
                }
                k[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
        out.sort_by_key(|(_, k, _)| (k.iter().sum::<i64>(), k.clone()));
        out
    }

    /// Multiplicity of the weight mu in V(lambda).
    pub fn freudenthal_multiplicity(&self, lambda: &[i64], mu: &[i64]) -> u64 {
        let dom = self.dominantize(mu);
        for (w, _, m) in self.weight_system(lambda) {
            if w == dom {
                return m;
            }
        }
        0
    }

    /// Name of a positive root, e.g. "a1", "2a1+a2"; G2 uses "a" and "b".
    pub fn root_name(&self, id: RootId) -> String {
        let coords = &self.positive_roots[id];
        let letter = |i: usize| -> String {
            if self.spec.family == Family::G {
                if i == 0 {
                    "a".to_string()
                } else {
                    "b".to_string()
                }
            } else {
                format!("a{}", i + 1)
            }
        };
        let mut parts = Vec::new();
        for (i, &c) in coords.iter().enumerate() {
            if c == 1 {
                parts.push(letter(i));
            } else if c > 1 {
                parts.push(format!("{c}{}", letter(i)));
            }
        }
        parts.join("+")
    }

    /// Parses a root name in the same grammar as `root_name`.
    pub fn parse_root(&self, s: &str) -> Result<RootId> {
        let n = self.rank();
        let mut coords = vec![0i64; n];
        for part in s.split('+') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::Invalid(format!("bad root name `{s}`")));
            }
            let split = part
                .find(|c: char| c.is_ascii_alphabetic())
                .ok_or_else(|| Error::Invalid(format!("bad root name `{s}`")))?;
            let coef: i64 = if split == 0 {
                1
            } else {
                part[..split]
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad coefficient in `{s}`")))?
            };
            let sym = &part[split..];
            let idx = match sym {
                "a" => 0,
                "b" => 1,
                _ if sym.starts_with('a') => sym[1..]
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad root name `{s}`")))?
                    .checked_sub(1)
                    .ok_or_else(|| Error::Invalid(format!("bad root name `{s}`")))?,
                _ => return Err(Error::Invalid(format!("bad root name `{s}`"))),
            };
            if idx >= n {
                return Err(Error::Invalid(format!("root index out of range in `{s}`")));
            }
            coords[idx] += coef;
        }
        self.root_id(&coords)
            .ok_or_else(|| Error::Invalid(format!("`{s}` is not a positive root")))
    }
}

fn scaled(s: Sym, c: Rat) -> LieElt {
    if c.is_zero() {
        Vec::new()
    } else {
        vec![(s, c)]
    }
}

fn neg_elt(e: LieElt) -> LieElt {
    e.into_iter().map(|(s, c)| (s, -c)).collect()
}
