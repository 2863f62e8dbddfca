//! Exact Hecke algebra arithmetic.
//!
//! Elements are finitely supported maps from group elements to exact
//! rational coefficients. Multiplication follows the defining rules
//!
//! ```text
//! T_s T_w = T_{sw}                    if l(sw) = l(w) + 1
//! T_s T_w = (1-q) T_w + q T_{sw}      if l(sw) = l(w) - 1
//! ```
//!
//! Coefficients and `q` are arbitrary-precision rationals, so algebraic
//! identities (quadratic, braid, associativity, the involution) can be
//! asserted with zero tolerance.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterFamily, Family, GroupElement};

#[derive(Debug, Error)]
pub enum HeckeError {
    #[error("family/q mismatch between operands")]
    Mismatch,
    #[error("parameter {0} outside [0,1]")]
    ParameterRange(String),
    #[error("block [{a};{b}] invalid or too large for exact enumeration")]
    BadBlock { a: usize, b: usize },
    #[error("element is not stochastic: {0}")]
    NotStochastic(String),
    #[error("bad rational literal: {0}")]
    BadRational(String),
}

/// Parse a rational from `"p/r"` or integer/decimal literals.
pub fn parse_rational(s: &str) -> Result<BigRational, HeckeError> {
    let s = s.trim();
    if let Some((p, r)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| HeckeError::BadRational(s.into()))?;
        let r: BigInt = r
            .trim()
            .parse()
            .map_err(|_| HeckeError::BadRational(s.into()))?;
        if r.is_zero() {
            return Err(HeckeError::BadRational(s.into()));
        }
        Ok(BigRational::new(p, r))
    } else if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let int: BigInt = int.parse().map_err(|_| HeckeError::BadRational(s.into()))?;
        let frac_val: BigInt = frac
            .parse()
            .map_err(|_| HeckeError::BadRational(s.into()))?;
        let denom = BigInt::from(10u32).pow(digits);
        let sign = if s.starts_with('-') {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        Ok(BigRational::new(&int * &denom + sign * frac_val, denom))
    } else {
        let p: BigInt = s.parse().map_err(|_| HeckeError::BadRational(s.into()))?;
        Ok(BigRational::from(p))
    }
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// The deformation parameter, an exact rational in `[0,1]` for all
/// stochastic uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QParameter(BigRational);

impl QParameter {
    pub fn new(q: BigRational) -> Result<Self, HeckeError> {
        if q.is_negative() || q > BigRational::one() {
            return Err(HeckeError::ParameterRange(format_rational(&q)));
        }
        Ok(QParameter(q))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self, HeckeError> {
        Self::new(BigRational::new(num.into(), den.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Exact for small values; falls back to a scaled division otherwise.
    match (n.to_string().parse::<f64>(), d.to_string().parse::<f64>()) {
        (Ok(nf), Ok(df)) if nf.is_finite() && df.is_finite() && df != 0.0 => nf / df,
        _ => {
            let float = BigRational::from_float(1e300).unwrap();
            rational_to_f64(&(r / float)) * 1e300
        }
    }
}

/// An element of the Hecke algebra in canonical sparse form: all stored
/// coefficients are nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeElement {
    family: CoxeterFamily,
    q: BigRational,
    coeffs: BTreeMap<GroupElement, BigRational>,
}

/// Result of an exact stochasticity check.
#[derive(Debug, Clone)]
pub struct StochasticReport {
    pub is_stochastic: bool,
    pub coefficient_sum: BigRational,
    pub min_coefficient: BigRational,
}

impl fmt::Display for StochasticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stochastic={} sum={} min={}",
            self.is_stochastic,
            format_rational(&self.coefficient_sum),
            format_rational(&self.min_coefficient)
        )
    }
}

impl HeckeElement {
    pub fn zero(family: CoxeterFamily, q: BigRational) -> Self {
        HeckeElement {
            family,
            q,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis element `T_w` with single coefficient 1.
    pub fn basis(w: GroupElement, q: BigRational) -> Self {
        let family = w.family;
        let mut coeffs = BTreeMap::new();
        coeffs.insert(w, BigRational::one());
        HeckeElement { family, q, coeffs }
    }

    /// `T_e`, the multiplicative identity.
    pub fn one(family: CoxeterFamily, q: BigRational) -> Self {
        Self::basis(GroupElement::identity(family), q)
    }

    pub fn from_terms(
        family: CoxeterFamily,
        q: BigRational,
        terms: impl IntoIterator<Item = (GroupElement, BigRational)>,
    ) -> Self {
        let mut out = Self::zero(family, q);
        for (w, c) in terms {
            out.add_term(w, c);
        }
        out
    }

    pub fn family(&self) -> CoxeterFamily {
        self.family
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn coeffs(&self) -> &BTreeMap<GroupElement, BigRational> {
        &self.coeffs
    }

    pub fn coeff(&self, w: &GroupElement) -> BigRational {
        self.coeffs.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    fn add_term(&mut self, w: GroupElement, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&w) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.coeffs.remove(&w);
                }
            }
            None => {
                self.coeffs.insert(w, c);
            }
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.family, self.q.clone());
        }
        HeckeElement {
            family: self.family,
            q: self.q.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(w, c)| (w.clone(), c * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &HeckeElement) -> Result<Self, HeckeError> {
        if self.family != other.family || self.q != other.q {
            return Err(HeckeError::Mismatch);
        }
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    /// Left multiplication by the generator basis element: `T_s · self`.
    pub fn mul_gen_left(&self, s: usize) -> Self {
        let mut out = Self::zero(self.family, self.q.clone());
        let q = &self.q;
        let one_minus_q = BigRational::one() - q;
        for (w, c) in &self.coeffs {
            let sw = w.apply_generator_left(s).expect("valid generator");
            if w.length_delta(s).expect("valid generator") == 1 {
                out.add_term(sw, c.clone());
            } else {
                out.add_term(w.clone(), c * &one_minus_q);
                out.add_term(sw, c * q);
            }
        }
        out
    }

    /// Full product `self · other`, bilinear in both arguments.
    ///
    /// Each left basis term `T_w` is factored into a reduced word by
    /// greedy descent and folded through `mul_gen_left`; any reduced word
    /// gives the same result by associativity.
    pub fn mul(&self, other: &HeckeElement) -> Result<Self, HeckeError> {
        if self.family != other.family || self.q != other.q {
            return Err(HeckeError::Mismatch);
        }
        let mut out = Self::zero(self.family, self.q.clone());
        for (w, c) in &self.coeffs {
            let word = w.reduced_word();
            let mut acc = other.clone();
            for &s in word.iter().rev() {
                acc = acc.mul_gen_left(s);
            }
            for (u, d) in acc.coeffs {
                out.add_term(u, c * d);
            }
        }
        Ok(out)
    }

    /// The involution `i(T_w) = T_{w^{-1}}`, an anti-homomorphism.
    pub fn involution(&self) -> Self {
        HeckeElement {
            family: self.family,
            q: self.q.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(w, c)| (w.inverse(), c.clone()))
                .collect(),
        }
    }

    /// Exact stochasticity test with a residual report.
    pub fn stochastic_report(&self) -> StochasticReport {
        let sum: BigRational = self.coeffs.values().cloned().sum();
        let min = self
            .coeffs
            .values()
            .min()
            .cloned()
            .unwrap_or_else(BigRational::zero);
        StochasticReport {
            is_stochastic: sum.is_one() && !min.is_negative(),
            coefficient_sum: sum,
            min_coefficient: min,
        }
    }

    pub fn is_stochastic(&self) -> bool {
        self.stochastic_report().is_stochastic
    }

    /// Divide by the coefficient sum, producing a stochastic element.
    pub fn normalized(&self) -> Result<Self, HeckeError> {
        let sum: BigRational = self.coeffs.values().cloned().sum();
        if sum.is_zero() {
            return Err(HeckeError::NotStochastic("zero element".into()));
        }
        Ok(self.scale(&(BigRational::one() / sum)))
    }
}

/// The stochastic six-vertex element `Y_{s,x} = x T_s + (1-x) T_e`.
pub fn six_vertex_element(
    family: CoxeterFamily,
    s: usize,
    x: BigRational,
    q: BigRational,
) -> Result<HeckeElement, HeckeError> {
    if x.is_negative() || x > BigRational::one() {
        return Err(HeckeError::ParameterRange(format_rational(&x)));
    }
    let e = GroupElement::identity(family);
    let sw = e
        .apply_generator_left(s)
        .map_err(|err| HeckeError::ParameterRange(err.to_string()))?;
    Ok(HeckeElement::from_terms(
        family,
        q,
        [(e, BigRational::one() - &x), (sw, x)],
    ))
}

/// Enumerate the block subgroup `S_{a;b}` of `S_n` as group elements that
/// permute the values `a..=b` and fix everything else.
fn block_subgroup(family: CoxeterFamily, a: usize, b: usize) -> Vec<GroupElement> {
    use itertools::Itertools;
    let m = b - a + 1;
    let mut out = Vec::new();
    for perm in (0..m).permutations(m) {
        let mut images: Vec<i32> = (1..=family.rank as i32).collect();
        for (offset, &p) in perm.iter().enumerate() {
            images[a - 1 + offset] = (a + p) as i32;
        }
        out.push(GroupElement::from_images(family, images).expect("valid permutation"));
    }
    out
}

/// The unnormalized Mallows block element
/// `M_{a;b} = sum_{w in S_{a;b}} q^{m(m-1)/2 - N(w)} T_w` with
/// `m = b - a + 1`. Its coefficient sum is the q-factorial `[m]_q!`;
/// use [`HeckeElement::normalized`] for the stochastic variant.
pub fn mallows_block(
    family: CoxeterFamily,
    a: usize,
    b: usize,
    q: BigRational,
) -> Result<HeckeElement, HeckeError> {
    if family.family != Family::TypeA || a < 1 || b <= a || b > family.rank || b - a + 1 > 7 {
        return Err(HeckeError::BadBlock { a, b });
    }
    let m = b - a + 1;
    let max_inv = m * (m - 1) / 2;
    let terms = block_subgroup(family, a, b).into_iter().map(|w| {
        let exp = max_inv - w.length();
        let coeff = num::pow::pow(q.clone(), exp);
        (w, coeff)
    });
    Ok(HeckeElement::from_terms(family, q.clone(), terms))
}

/// JSON wire format for a Hecke element: rationals as `"p/r"`, support
/// elements in one-line notation.
#[derive(Debug, Serialize, Deserialize)]
pub struct HeckeElementJson {
    pub family: String,
    pub rank: usize,
    pub q: String,
    pub terms: Vec<HeckeTermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HeckeTermJson {
    pub word: Vec<i32>,
    pub coeff: String,
}

impl HeckeElement {
    pub fn to_json(&self) -> HeckeElementJson {
        HeckeElementJson {
            family: match self.family.family {
                Family::TypeA => "A".into(),
                Family::TypeB => "B".into(),
            },
            rank: self.family.rank,
            q: format_rational(&self.q),
            terms: self
                .coeffs
                .iter()
                .map(|(w, c)| HeckeTermJson {
                    word: w.images().to_vec(),
                    coeff: format_rational(c),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &HeckeElementJson) -> Result<Self, HeckeError> {
        let family = match json.family.as_str() {
            "A" => CoxeterFamily::type_a(json.rank),
            "B" => CoxeterFamily::type_b(json.rank),
            other => return Err(HeckeError::BadRational(format!("unknown family {other}"))),
        };
        let q = parse_rational(&json.q)?;
        let mut terms = Vec::with_capacity(json.terms.len());
        for t in &json.terms {
            let w = GroupElement::from_images(family, t.word.clone())
                .map_err(|e| HeckeError::BadRational(e.to_string()))?;
            terms.push((w, parse_rational(&t.coeff)?));
        }
        Ok(Self::from_terms(family, q, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::enumerate_group;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn random_stochastic(
        fam: CoxeterFamily,
        qv: &BigRational,
        rng: &mut impl Rng,
    ) -> HeckeElement {
        let elems = enumerate_group(fam).unwrap();
        let k = rng.gen_range(1..=4usize);
        let mut terms = Vec::new();
        let mut weights = Vec::new();
        for _ in 0..k {
            let w = elems.choose(rng).unwrap().clone();
            let weight = rng.gen_range(1..20i64);
            terms.push(w);
            weights.push(weight);
        }
        let total: i64 = weights.iter().sum();
        HeckeElement::from_terms(
            fam,
            qv.clone(),
            terms
                .into_iter()
                .zip(weights)
                .map(|(w, wt)| (w, q(wt, total))),
        )
    }

    #[test]
    fn basis_identity_and_involution() {
        let fam = CoxeterFamily::type_a(3);
        let e = HeckeElement::one(fam, q(1, 2));
        assert!(e.is_stochastic());
        let w = GroupElement::identity(fam)
            .apply_generator_left(1)
            .unwrap()
            .apply_generator_left(2)
            .unwrap(); // s_2 s_1
        let t = HeckeElement::basis(w.clone(), q(1, 2));
        assert!(t.is_stochastic());
        assert_eq!(
            t.involution(),
            HeckeElement::basis(w.inverse(), q(1, 2))
        );
    }

    #[test]
    fn generator_rules() {
        let fam = CoxeterFamily::type_a(2);
        let qv = q(1, 2);
        let e = HeckeElement::one(fam, qv.clone());
        let s = e.mul_gen_left(1);
        let s_elem = GroupElement::identity(fam).apply_generator_left(1).unwrap();
        assert_eq!(s, HeckeElement::basis(s_elem.clone(), qv.clone()));
        // T_s T_s = (1-q) T_s + q T_e
        let ss = s.mul_gen_left(1);
        assert_eq!(ss.coeff(&s_elem), q(1, 2));
        assert_eq!(ss.coeff(&GroupElement::identity(fam)), q(1, 2));
        // s applied to (1/2 T_e + 1/2 T_s) -> 3/4 T_s + 1/4 T_e
        let h = HeckeElement::from_terms(
            fam,
            qv,
            [
                (GroupElement::identity(fam), q(1, 2)),
                (s_elem.clone(), q(1, 2)),
            ],
        );
        let sh = h.mul_gen_left(1);
        assert_eq!(sh.coeff(&s_elem), q(3, 4));
        assert_eq!(sh.coeff(&GroupElement::identity(fam)), q(1, 4));
    }

    #[test]
    fn quadratic_and_braid_relations() {
        for fam in [CoxeterFamily::type_a(4), CoxeterFamily::type_b(3)] {
            for qv in [q(0, 1), q(1, 3), q(1, 2), q(1, 1)] {
                let e = GroupElement::identity(fam);
                for s in fam.generators() {
                    let ts = HeckeElement::basis(e.apply_generator_left(s).unwrap(), qv.clone());
                    let tsts = ts.mul(&ts).unwrap();
                    let mut expect = ts.scale(&(BigRational::one() - &qv));
                    expect = expect
                        .add(&HeckeElement::one(fam, qv.clone()).scale(&qv))
                        .unwrap();
                    assert_eq!(tsts, expect);
                    for t in fam.generators() {
                        if t == s {
                            continue;
                        }
                        let tt =
                            HeckeElement::basis(e.apply_generator_left(t).unwrap(), qv.clone());
                        let m = fam.coxeter_matrix(s, t);
                        let mut left = HeckeElement::one(fam, qv.clone());
                        let mut right = HeckeElement::one(fam, qv.clone());
                        for r in 0..m {
                            let (a, b) = if r % 2 == 0 { (&ts, &tt) } else { (&tt, &ts) };
                            left = left.mul(a).unwrap();
                            right = right.mul(b).unwrap();
                        }
                        assert_eq!(left, right, "braid failure s={s} t={t} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn associativity_on_random_triples() {
        let fam = CoxeterFamily::type_a(4);
        let qv = q(1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = random_stochastic(fam, &qv, &mut rng);
            let b = random_stochastic(fam, &qv, &mut rng);
            let c = random_stochastic(fam, &qv, &mut rng);
            let left = a.mul(&b).unwrap().mul(&c).unwrap();
            let right = a.mul(&b.mul(&c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn involution_anti_homomorphism() {
        let fam = CoxeterFamily::type_a(4);
        let qv = q(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_stochastic(fam, &qv, &mut rng);
            let b = random_stochastic(fam, &qv, &mut rng);
            let lhs = a.mul(&b).unwrap().involution();
            let rhs = b.involution().mul(&a.involution()).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(a.involution().involution(), a);
        }
    }

    #[test]
    fn stochastic_closure() {
        let fam = CoxeterFamily::type_a(4);
        for qv in [q(0, 1), q(1, 2), q(1, 1)] {
            let mut rng = ChaCha8Rng::seed_from_u64(23);
            for _ in 0..20 {
                let a = random_stochastic(fam, &qv, &mut rng);
                let b = random_stochastic(fam, &qv, &mut rng);
                assert!(a.is_stochastic());
                assert!(a.mul(&b).unwrap().is_stochastic());
            }
        }
    }

    #[test]
    fn non_stochastic_detected() {
        let fam = CoxeterFamily::type_a(2);
        let s_elem = GroupElement::identity(fam).apply_generator_left(1).unwrap();
        let h = HeckeElement::from_terms(
            fam,
            q(1, 2),
            [(GroupElement::identity(fam), q(2, 1)), (s_elem, q(-1, 1))],
        );
        let report = h.stochastic_report();
        assert!(!report.is_stochastic);
        assert_eq!(report.min_coefficient, q(-1, 1));
        assert_eq!(report.coefficient_sum, q(1, 1));
    }

    #[test]
    fn mallows_block_small_cases() {
        let fam = CoxeterFamily::type_a(3);
        let qv = q(1, 2);
        // m = 2: q T_e + T_s
        let m = mallows_block(fam, 1, 2, qv.clone()).unwrap();
        let e = GroupElement::identity(fam);
        let s = e.apply_generator_left(1).unwrap();
        assert_eq!(m.coeff(&e), qv);
        assert_eq!(m.coeff(&s), BigRational::one());
        let norm = m.normalized().unwrap();
        assert_eq!(norm.coeff(&e), q(1, 3)); // q/(1+q) at q=1/2
        assert_eq!(norm.coeff(&s), q(2, 3));
        assert!(norm.is_stochastic());
        // q = 0: concentrated on the longest block element
        let m0 = mallows_block(fam, 1, 3, q(0, 1)).unwrap().normalized().unwrap();
        assert_eq!(m0.support_len(), 1);
        let (w, c) = m0.coeffs().iter().next().unwrap();
        assert_eq!(w.length(), 3);
        assert!(c.is_one());
    }

    #[test]
    fn mallows_block_absorption() {
        let fam = CoxeterFamily::type_a(4);
        for qv in [q(0, 1), q(1, 3), q(1, 2)] {
            let m = mallows_block(fam, 2, 4, qv.clone()).unwrap();
            for w in block_subgroup(fam, 2, 4) {
                let t = HeckeElement::basis(w, qv.clone());
                assert_eq!(t.mul(&m).unwrap(), m);
                assert_eq!(m.mul(&t).unwrap(), m);
            }
        }
    }

    #[test]
    fn mallows_block_sum_is_q_factorial() {
        let fam = CoxeterFamily::type_a(4);
        let qv = q(1, 2);
        let m = mallows_block(fam, 1, 4, qv.clone()).unwrap();
        // [4]_q! = 1 (1+q) (1+q+q^2) (1+q+q^2+q^3)
        let mut expect = BigRational::one();
        for j in 2..=4u32 {
            let mut row = BigRational::zero();
            for p in 0..j {
                row += num::pow::pow(qv.clone(), p as usize);
            }
            expect *= row;
        }
        assert_eq!(m.stochastic_report().coefficient_sum, expect);
    }

    #[test]
    fn six_vertex_cases() {
        let fam = CoxeterFamily::type_a(2);
        let qv = q(1, 2);
        let e = GroupElement::identity(fam);
        let s = e.apply_generator_left(1).unwrap();
        let y0 = six_vertex_element(fam, 1, q(0, 1), qv.clone()).unwrap();
        assert_eq!(y0, HeckeElement::one(fam, qv.clone()));
        let y1 = six_vertex_element(fam, 1, q(1, 1), qv.clone()).unwrap();
        assert_eq!(y1, HeckeElement::basis(s.clone(), qv.clone()));
        let y = six_vertex_element(fam, 1, q(1, 2), qv.clone()).unwrap();
        let yy = y.mul(&y).unwrap();
        assert_eq!(yy.coeff(&e), q(3, 8));
        assert_eq!(yy.coeff(&s), q(5, 8));
        assert!(six_vertex_element(fam, 1, q(3, 2), qv).is_err());
    }

    #[test]
    fn json_round_trip() {
        let fam = CoxeterFamily::type_a(3);
        let m = mallows_block(fam, 1, 3, q(1, 3)).unwrap().normalized().unwrap();
        let json = m.to_json();
        let text = serde_json::to_string(&json).unwrap();
        let parsed: HeckeElementJson = serde_json::from_str(&text).unwrap();
        assert_eq!(HeckeElement::from_json(&parsed).unwrap(), m);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-2").unwrap(), q(-2, 1));
        assert!(parse_rational("1/0").is_err());
    }
}
