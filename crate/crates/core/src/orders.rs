//! Weight functions and the four weighted lexicographic total orders on
//! multi-exponents, together with the special linear form used to turn a
//! monoid filtration into an N-filtration.

use crate::pbw::BirationalSequence;
use crate::rat::{rat, Rat};
use crate::rootsys::RootSystem;
use crate::{Error, Result};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use std::cmp::Ordering;

/// Multi-exponent in N^N.
pub type MultiExp = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFunction {
    pub coeffs: Vec<u64>,
}

impl WeightFunction {
    pub fn eval(&self, m: &[u32]) -> u128 {
        self.coeffs
            .iter()
            .zip(m.iter())
            .map(|(&c, &x)| c as u128 * x as u128)
            .sum()
    }

    pub fn strictly_positive(&self) -> bool {
        self.coeffs.iter().all(|&c| c > 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum OrderVariant {
    /// Psi-weighted lexicographic.
    WLex,
    /// Psi-weighted right lexicographic.
    WRLex,
    /// Psi-weighted opposite lexicographic (requires Psi > 0 off zero).
    OpWLex,
    /// Psi-weighted opposite right lexicographic (requires Psi > 0 off zero).
    OpWRLex,
}

impl OrderVariant {
    pub fn name(&self) -> &'static str {
        match self {
            OrderVariant::WLex => "lex",
            OrderVariant::WRLex => "rlex",
            OrderVariant::OpWLex => "oplex",
            OrderVariant::OpWRLex => "oprlex",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lex" | "wlex" => Ok(OrderVariant::WLex),
            "rlex" | "wrlex" => Ok(OrderVariant::WRLex),
            "oplex" | "op-wlex" => Ok(OrderVariant::OpWLex),
            "oprlex" | "op-wrlex" => Ok(OrderVariant::OpWRLex),
            _ => Err(Error::Invalid(format!("unknown order variant `{s}`"))),
        }
    }

    fn is_opposite(&self) -> bool {
        matches!(self, OrderVariant::OpWLex | OrderVariant::OpWRLex)
    }

    fn is_right(&self) -> bool {
        matches!(self, OrderVariant::WRLex | OrderVariant::OpWRLex)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderSpec {
    pub psi: WeightFunction,
    pub variant: OrderVariant,
}

impl OrderSpec {
    pub fn new(psi: WeightFunction, variant: OrderVariant) -> Result<Self> {
        if variant.is_opposite() && !psi.strictly_positive() {
            return Err(Error::Invalid(
                "opposite variants require a strictly positive weight function".into(),
            ));
        }
        Ok(OrderSpec { psi, variant })
    }

    pub fn len(&self) -> usize {
        self.psi.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.coeffs.is_empty()
    }

    /// Total order of Definition 5.2-type: weight first, lex tie-break.
    pub fn cmp(&self, m: &[u32], m2: &[u32]) -> Ordering {
        assert_eq!(m.len(), m2.len(), "multi-exponent length mismatch");
        assert_eq!(m.len(), self.psi.coeffs.len(), "order arity mismatch");
        let w = self.psi.eval(m).cmp(&self.psi.eval(m2));
        if w != Ordering::Equal {
            return w;
        }
        let lex = if self.variant.is_right() {
            m.iter().rev().cmp(m2.iter().rev())
        } else {
            m.iter().cmp(m2.iter())
        };
        if self.variant.is_opposite() {
            lex.reverse()
        } else {
            lex
        }
    }

    pub fn lt(&self, m: &[u32], m2: &[u32]) -> bool {
        self.cmp(m, m2) == Ordering::Less
    }

    /// Order-minimal element of a nonempty iterator.
    pub fn min<'a, I: IntoIterator<Item = &'a MultiExp>>(&self, it: I) -> Option<&'a MultiExp> {
        it.into_iter().min_by(|a, b| self.cmp(a, b))
    }

    pub fn describe(&self) -> String {
        format!(
            "{}:{}",
            self.variant.name(),
            self.psi
                .coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightPreset {
    Zero,
    Homogeneous,
    Height,
    /// Strongly admissible function for type A: Psi(e_{i,j}) = (j-i+1)(n-j+1).
    AdmissibleA,
    /// The sp4 weight function: 1 on a1, a1+a2, 2a1+a2 and 2 on a2.
    Sp4W,
    Custom(Vec<u64>),
}

/// Builds a weight function for the ambient sequence.
pub fn make_weight_function(
    preset: &WeightPreset,
    rs: &RootSystem,
    seq: &BirationalSequence,
) -> Result<WeightFunction> {
    let n = seq.roots.len();
    let coeffs = match preset {
        WeightPreset::Zero => vec![0; n],
        WeightPreset::Homogeneous => vec![1; n],
        WeightPreset::Height => seq
            .roots
            .iter()
            .map(|&r| rs.heights[r] as u64)
            .collect(),
        WeightPreset::AdmissibleA => {
            if rs.spec.family != crate::rootsys::Family::A {
                return Err(Error::Invalid(
                    "the strongly admissible preset is specific to type A".into(),
                ));
            }
            let rank = rs.rank() as u64;
            seq.roots
                .iter()
                .map(|&r| {
                    let coords = &rs.positive_roots[r];
                    let i = coords.iter().position(|&c| c == 1).unwrap() as u64;
                    let j = coords.iter().rposition(|&c| c == 1).unwrap() as u64;
                    (j - i + 1) * (rank - j)
                })
                .collect()
        }
        WeightPreset::Sp4W => {
            if rs.spec.family != crate::rootsys::Family::C || rs.rank() != 2 {
                return Err(Error::Invalid("the sp4 weight function requires C2".into()));
            }
            let alpha2 = rs.root_id(&[0, 1]).unwrap();
            seq.roots
                .iter()
                .map(|&r| if r == alpha2 { 2 } else { 1 })
                .collect()
        }
        WeightPreset::Custom(values) => {
            if values.len() != n {
                return Err(Error::Invalid(format!(
                    "custom weight function needs {n} coefficients, got {}",
                    values.len()
                )));
            }
            values.clone()
        }
    };
    Ok(WeightFunction { coeffs })
}

/// Randomized monomial-order check: m > m' implies m + m'' > m' + m'' > m'.
///
/// Returns Ok(()) on success, or the witness triple on failure. Generic over
/// the comparator so corrupted comparators can be exercised in tests.
pub fn validate_comparator<F>(
    n: usize,
    cmp: F,
    sample_count: usize,
    seed: u64,
) -> std::result::Result<(), (MultiExp, MultiExp, MultiExp)>
where
    F: Fn(&[u32], &[u32]) -> Ordering,
{
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| -> MultiExp {
        (0..n).map(|_| rng.gen_range(0..6u32)).collect()
    };
    for _ in 0..sample_count {
        let a = sample(&mut rng);
        let b = sample(&mut rng);
        let mut c = sample(&mut rng);
        if c.iter().all(|&x| x == 0) {
            if n == 0 {
                continue;
            }
            c[0] = 1;
        }
        let (hi, lo) = match cmp(&a, &b) {
            Ordering::Greater => (&a, &b),
            Ordering::Less => (&b, &a),
            Ordering::Equal => {
                if a != b {
                    return Err((a.clone(), b.clone(), c));
                }
                continue;
            }
        };
        let hi_c: MultiExp = hi.iter().zip(c.iter()).map(|(&x, &y)| x + y).collect();
        let lo_c: MultiExp = lo.iter().zip(c.iter()).map(|(&x, &y)| x + y).collect();
        if cmp(&hi_c, &lo_c) != Ordering::Greater || cmp(&lo_c, lo) != Ordering::Greater {
            return Err((hi.clone(), lo.clone(), c));
        }
    }
    Ok(())
}

pub fn validate_monomial_order(
    order: &OrderSpec,
    sample_count: usize,
    seed: u64,
) -> std::result::Result<(), (MultiExp, MultiExp, MultiExp)> {
    validate_comparator(order.len(), |a, b| order.cmp(a, b), sample_count, seed)
}

/// An integral linear form on Lambda_R x R^N, e(lambda, m) =
/// sum_i lambda_coeffs[i] lambda_i + sum_k m_coeffs[k] m_k,
/// with lambda in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub lambda_coeffs: Vec<BigInt>,
    pub m_coeffs: Vec<BigInt>,
    pub a: BigInt,
    pub b: BigInt,
}

impl LinearForm {
    pub fn eval(&self, lambda: &[i64], m: &[u32]) -> BigInt {
        let mut acc = BigInt::zero();
        for (c, &x) in self.lambda_coeffs.iter().zip(lambda.iter()) {
            acc += c * BigInt::from(x);
        }
        for (c, &x) in self.m_coeffs.iter().zip(m.iter()) {
            acc += c * BigInt::from(x);
        }
        acc
    }
}

/// The algebra order: (lambda, p) > (mu, q) iff lambda strictly dominates mu
/// in the root order, or lambda = mu and p < q in the monomial order.
pub fn alg_gt(
    rs: &RootSystem,
    order: &OrderSpec,
    a: (&[i64], &[u32]),
    b: (&[i64], &[u32]),
) -> bool {
    if a.0 == b.0 {
        return order.lt(a.1, b.1) && a.1 != b.1;
    }
    let diff: Vec<i64> = a.0.iter().zip(b.0.iter()).map(|(&x, &y)| x - y).collect();
    let rc = rs.weight_to_root_coords(&diff);
    rc.iter().all(|c| !c.is_negative()) && rc.iter().any(|c| c.is_positive())
}

/// Constructs a linear form that is nonnegative integral on the given
/// generators, strictly positive on generators with nonzero weight, and
/// strictly decreasing along the algebra order on the finite set `m_set`.
pub fn special_linear_form(
    rs: &RootSystem,
    generators: &[(Vec<i64>, MultiExp)],
    m_set: &[(Vec<i64>, MultiExp)],
    order: &OrderSpec,
) -> Result<LinearForm> {
    let n = rs.rank();
    let nn = order.len();
    // In the semisimple setting the only character is 0.
    for (lam, m) in generators {
        if m.iter().any(|&x| x > 0) && lam.iter().all(|&a| a == 0) {
            return Err(Error::Invalid(
                "generator set has an exceptional character".into(),
            ));
        }
    }
    // e1: integral coweight with e1(beta) > 0 on positive roots,
    // e1(Lambda+) in N: solve sum_i c_i <alpha_j, alpha_i^vee> = 1 and clear
    // denominators, so e1(lambda) = d * <lambda, rho^vee>.
    let a_mat: Vec<Vec<Rat>> = (0..n)
        .map(|j| (0..n).map(|i| rat(rs.cartan[i][j])).collect())
        .collect();
    let ones = vec![rat(1); n];
    let c = crate::linalg::solve(&a_mat, &ones).expect("Cartan matrix invertible");
    let denom_lcm = c
        .iter()
        .map(|v| v.denom().clone())
        .fold(BigInt::one(), num::integer::lcm);
    let e1: Vec<BigInt> = c
        .iter()
        .map(|v| (v * Rat::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    // e2: lex (or rlex) compatible on the finite data.
    let max_coord = m_set
        .iter()
        .chain(generators.iter())
        .flat_map(|(_, m)| m.iter())
        .copied()
        .max()
        .unwrap_or(0) as u64;
    let c_base = BigInt::from(max_coord + 1).max(BigInt::from(2u32));
    let e2: Vec<BigInt> = (0..nn)
        .map(|i| {
            let power = if order.variant.is_right() { i } else { nn - 1 - i };
            num::pow::pow(c_base.clone(), power)
        })
        .collect();
    let e2_sign: i64 = if order.variant.is_opposite() { 1 } else { -1 };

    let eval = |a: &BigInt, b: &BigInt, lam: &[i64], m: &[u32]| -> BigInt {
        let mut acc = BigInt::zero();
        for (c, &x) in e1.iter().zip(lam.iter()) {
            acc += a * c * BigInt::from(x);
        }
        let psi = BigInt::from(order.psi.eval(m));
        acc -= b * psi;
        for (c, &x) in e2.iter().zip(m.iter()) {
            acc += BigInt::from(e2_sign) * c * BigInt::from(x);
        }
        acc
    };

    let mut b = BigInt::one();
    for _ in 0..64 {
        // A0 makes e nonnegative on the generators (and positive off characters).
        let mut a0 = BigInt::one();
        for (_, m) in generators {
            let mut bound = &b * BigInt::from(order.psi.eval(m));
            for (c, &x) in e2.iter().zip(m.iter()) {
                bound += c * BigInt::from(x);
            }
            bound += BigInt::one();
            if bound > a0 {
                a0 = bound;
            }
        }
        let mut a = a0.clone();
        for _ in 0..64 {
            let mut ok = true;
            for (lam, m) in generators {
                let v = eval(&a, &b, lam, m);
                if v.is_negative() || (lam.iter().any(|&x| x != 0) && v.is_zero()) {
                    ok = false;
                    break;
                }
            }
            if ok {
                'outer: for x in m_set {
                    for y in m_set {
                        if alg_gt(rs, order, (&x.0, &x.1), (&y.0, &y.1))
                            && eval(&a, &b, &x.0, &x.1) <= eval(&a, &b, &y.0, &y.1)
                        {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
            if ok {
                let lambda_coeffs = e1.iter().map(|c| &a * c).collect();
                let m_coeffs = (0..nn)
                    .map(|i| {
                        BigInt::from(e2_sign) * &e2[i] - &b * BigInt::from(order.psi.coeffs[i])
                    })
                    .collect();
                return Ok(LinearForm {
                    lambda_coeffs,
                    m_coeffs,
                    a,
                    b,
                });
            }
            a *= BigInt::from(2u32);
        }
        b *= BigInt::from(2u32);
    }
    Err(Error::Inconsistent(
        "special linear form search did not converge".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, Family, RootSystemSpec};

    fn order(coeffs: &[u64], variant: OrderVariant) -> OrderSpec {
        OrderSpec::new(
            WeightFunction {
                coeffs: coeffs.to_vec(),
            },
            variant,
        )
        .unwrap()
    }

    #[test]
    fn lex_example() {
        let o = order(&[0, 0, 0], OrderVariant::WLex);
        assert_eq!(o.cmp(&[1, 0, 5], &[0, 9, 9]), Ordering::Greater);
    }

    #[test]
    fn op_lex_with_weights() {
        let o = order(&[1, 2, 1], OrderVariant::OpWLex);
        // Psi ties at 2; the lex-smaller element wins in the opposite order.
        assert_eq!(o.cmp(&[1, 0, 1], &[0, 1, 0]), Ordering::Less);
    }

    #[test]
    fn homogeneous_rlex() {
        let o = order(&[1, 1, 1], OrderVariant::WRLex);
        assert_eq!(o.cmp(&[1, 1, 0], &[0, 0, 2]), Ordering::Less);
    }

    #[test]
    fn opposite_requires_positive_psi() {
        assert!(OrderSpec::new(
            WeightFunction { coeffs: vec![1, 0] },
            OrderVariant::OpWLex
        )
        .is_err());
    }

    #[test]
    fn presets() {
        let rs = build_root_system(RootSystemSpec::new(Family::A, 2).unwrap()).unwrap();
        let seq = crate::pbw::BirationalSequence::custom(
            &rs,
            vec![
                rs.root_id(&[1, 0]).unwrap(),
                rs.root_id(&[1, 1]).unwrap(),
                rs.root_id(&[0, 1]).unwrap(),
            ],
        )
        .unwrap();
        let h = make_weight_function(&WeightPreset::Height, &rs, &seq).unwrap();
        assert_eq!(h.coeffs, vec![1, 2, 1]);
        let hom = make_weight_function(&WeightPreset::Homogeneous, &rs, &seq).unwrap();
        assert_eq!(hom.coeffs, vec![1, 1, 1]);
        // Strongly admissible in type A: alpha_{i,j} -> (j-i+1)(n-j+1), n = 2.
        let adm = make_weight_function(&WeightPreset::AdmissibleA, &rs, &seq).unwrap();
        assert_eq!(adm.coeffs, vec![2, 2, 1]);
    }

    #[test]
    fn monomial_order_validates() {
        for variant in [
            OrderVariant::WLex,
            OrderVariant::WRLex,
            OrderVariant::OpWLex,
            OrderVariant::OpWRLex,
        ] {
            let o = order(&[1, 2, 1], variant);
            assert!(validate_monomial_order(&o, 10_000, 42).is_ok());
        }
        let one = order(&[0], OrderVariant::WLex);
        assert!(validate_monomial_order(&one, 1000, 7).is_ok());
    }

    #[test]
    fn scaled_psi_gives_identical_comparator() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let o1 = order(&[1, 2, 1], OrderVariant::OpWLex);
        let o2 = order(&[3, 6, 3], OrderVariant::OpWLex);
        for _ in 0..2000 {
            let a: MultiExp = (0..3).map(|_| rand::Rng::gen_range(&mut rng, 0..7)).collect();
            let b: MultiExp = (0..3).map(|_| rand::Rng::gen_range(&mut rng, 0..7)).collect();
            assert_eq!(o1.cmp(&a, &b), o2.cmp(&a, &b));
        }
    }

    #[test]
    fn corrupted_comparator_fails_with_witness() {
        // Comparing by the sum of squared entries is not additive, hence not
        // a monomial order.
        let bad = |a: &[u32], b: &[u32]| -> Ordering {
            let da: u64 = a.iter().map(|&x| (x as u64) * (x as u64)).sum();
            let db: u64 = b.iter().map(|&x| (x as u64) * (x as u64)).sum();
            da.cmp(&db).then_with(|| a.cmp(b))
        };
        let res = validate_comparator(3, bad, 10_000, 42);
        assert!(res.is_err());
    }

    #[test]
    fn special_form_reverses_alg_order() {
        let rs = build_root_system(RootSystemSpec::new(Family::A, 1).unwrap()).unwrap();
        let o = order(&[1], OrderVariant::WLex);
        let gens = vec![(vec![1], vec![0]), (vec![1], vec![1])];
        let form = special_linear_form(&rs, &gens, &gens, &o).unwrap();
        let at_zero = form.eval(&[1], &[0]);
        let at_one = form.eval(&[1], &[1]);
        assert!(at_zero > at_one);
        assert!(at_one >= BigInt::one());
        // The proof's bound A >= A0 >= B + 2 in this instance.
        assert!(form.a >= &form.b + BigInt::from(2));
    }

    #[test]
    fn special_form_empty_mset() {
        let rs = build_root_system(RootSystemSpec::new(Family::A, 2).unwrap()).unwrap();
        let o = order(&[1, 1, 1], OrderVariant::WLex);
        let gens = vec![(vec![1, 0], vec![1, 0, 0]), (vec![0, 1], vec![0, 0, 1])];
        let form = special_linear_form(&rs, &gens, &[], &o).unwrap();
        for (lam, m) in &gens {
            assert!(form.eval(lam, m) >= BigInt::one());
        }
    }

    #[test]
    fn exceptional_character_rejected() {
        let rs = build_root_system(RootSystemSpec::new(Family::A, 1).unwrap()).unwrap();
        let o = order(&[1], OrderVariant::WLex);
        let gens = vec![(vec![0], vec![1])];
        assert!(special_linear_form(&rs, &gens, &[], &o).is_err());
    }
}
