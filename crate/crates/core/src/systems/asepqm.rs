//! ASEP(q,M): blocks of M particles interacting through equilibrated
//! bonds.
//!
//! The generator for bond `x` is the sandwich "equilibrate blocks `x`
//! and `x+1`, let their facing particles interact through one bond
//! update, equilibrate again". Simulation composes the three pieces
//! directly; for small systems the exact normalized Hecke product is
//! attached for oracle testing.

use std::sync::Arc;

use num::BigRational;

use super::{SystemSpec, SystemsError, TypeMap};
use crate::coxeter::{CoxeterFamily, Family, GroupElement};
use crate::hecke::{mallows_block, rational_to_f64, HeckeElement};
use crate::mallows::equilibrate_block;
use crate::walks::{step_basis, GeneratorKernel, Schedule, SimKernel};

/// Largest group size for which the exact sandwich element is computed.
const EXACT_RANK_LIMIT: usize = 6;

/// Normalized `M_{a;b}`, or the identity element when the block is a
/// single site.
fn equilibrator(
    family: CoxeterFamily,
    a: usize,
    b: usize,
    q: &BigRational,
) -> Result<HeckeElement, SystemsError> {
    if a == b {
        Ok(HeckeElement::one(family, q.clone()))
    } else {
        Ok(mallows_block(family, a, b, q.clone())?.normalized()?)
    }
}

/// The exact sandwich `M (bond element) M` with `M` the product of the
/// two normalized block equilibrators.
fn exact_sandwich(
    family: CoxeterFamily,
    m: usize,
    x: usize,
    bond_element: &HeckeElement,
    q: &BigRational,
) -> Result<HeckeElement, SystemsError> {
    let m1 = equilibrator(family, (x - 1) * m + 1, x * m, q)?;
    let m2 = equilibrator(family, x * m + 1, (x + 1) * m, q)?;
    let mhat = m1.mul(&m2)?;
    Ok(mhat.mul(bond_element)?.mul(&mhat)?)
}

fn sandwich_step(
    state: &GroupElement,
    m: usize,
    x: usize,
    q: f64,
    bond: &dyn Fn(&GroupElement, &mut crate::rngstream::TrialRng) -> GroupElement,
    rng: &mut crate::rngstream::TrialRng,
) -> GroupElement {
    let (a1, b1) = ((x - 1) * m + 1, x * m);
    let (a2, b2) = (x * m + 1, (x + 1) * m);
    let mut s = state.clone();
    if m > 1 {
        s = equilibrate_block(&s, a1, b1, q, rng).expect("valid block");
        s = equilibrate_block(&s, a2, b2, q, rng).expect("valid block");
    }
    s = bond(&s, rng);
    if m > 1 {
        s = equilibrate_block(&s, a1, b1, q, rng).expect("valid block");
        s = equilibrate_block(&s, a2, b2, q, rng).expect("valid block");
    }
    s
}

/// Multi-species ASEP(q,M) on `n_blocks` blocks of `M` sites: one
/// sandwich generator per adjacent block pair, rate 1 each.
pub fn make_asep_qm(n_blocks: usize, m: usize, q: f64) -> Result<SystemSpec, SystemsError> {
    if n_blocks < 2 || m < 1 {
        return Err(SystemsError::ParameterRange("need N >= 2 and M >= 1".into()));
    }
    let rank = n_blocks * m;
    let family = CoxeterFamily::type_a(rank);
    let q_exact = BigRational::from_float(q)
        .ok_or_else(|| SystemsError::ParameterRange("q is not finite".into()))?;
    let mut kernels = Vec::with_capacity(n_blocks - 1);
    for x in 1..n_blocks {
        let exact = if rank <= EXACT_RANK_LIMIT {
            let bond_pos = x * m;
            let e = GroupElement::identity(family);
            let ts = HeckeElement::basis(e.apply_generator_left(bond_pos)?, q_exact.clone());
            Some(exact_sandwich(family, m, x, &ts, &q_exact)?)
        } else {
            None
        };
        let bond_pos = x * m;
        let step = Arc::new(move |w: &GroupElement, rng: &mut crate::rngstream::TrialRng| {
            sandwich_step(
                w,
                m,
                x,
                q,
                &|s, rng| step_basis(s, bond_pos, q, rng),
                rng,
            )
        });
        kernels.push(GeneratorKernel::sim(SimKernel { step, exact }, q, 1.0));
    }
    Ok(SystemSpec {
        family,
        kernels,
        schedule: Schedule::Uniform,
        initial: GroupElement::identity(family),
        type_map: Some(TypeMap::identity(family)),
        window: None,
    })
}

/// Generalized M-exclusion: the same sandwich construction with an
/// arbitrary stochastic element `y` on `2M` letters in place of the bond
/// transposition, shifted onto each adjacent block pair.
pub fn make_general_m_exclusion(
    n_blocks: usize,
    m: usize,
    q: f64,
    y: &HeckeElement,
) -> Result<SystemSpec, SystemsError> {
    if n_blocks < 2 || m < 1 {
        return Err(SystemsError::ParameterRange("need N >= 2 and M >= 1".into()));
    }
    if y.family().family != Family::TypeA || y.family().rank != 2 * m {
        return Err(SystemsError::ParameterRange(format!(
            "interaction element must live on S_{}",
            2 * m
        )));
    }
    if !y.is_stochastic() {
        return Err(SystemsError::ParameterRange(
            "interaction element is not stochastic".into(),
        ));
    }
    if (rational_to_f64(y.q()) - q).abs() > 1e-12 {
        return Err(SystemsError::ParameterRange(
            "interaction element built with a different q".into(),
        ));
    }
    let rank = n_blocks * m;
    let family = CoxeterFamily::type_a(rank);
    let mut kernels = Vec::with_capacity(n_blocks - 1);
    for x in 1..n_blocks {
        let shifted = shift_element(y, family, (x - 1) * m)?;
        let exact = if rank <= EXACT_RANK_LIMIT {
            Some(exact_sandwich(family, m, x, &shifted, y.q())?)
        } else {
            None
        };
        let sampler = crate::walks::ElementSampler::new(&shifted)?;
        let step = Arc::new(move |w: &GroupElement, rng: &mut crate::rngstream::TrialRng| {
            sandwich_step(w, m, x, q, &|s, rng| sampler.step(s, rng), rng)
        });
        kernels.push(GeneratorKernel::sim(SimKernel { step, exact }, q, 1.0));
    }
    Ok(SystemSpec {
        family,
        kernels,
        schedule: Schedule::Uniform,
        initial: GroupElement::identity(family),
        type_map: Some(TypeMap::identity(family)),
        window: None,
    })
}

/// Embed an element of `S_{1..2M}` into the larger family by shifting
/// its letters `offset` places to the right.
fn shift_element(
    y: &HeckeElement,
    family: CoxeterFamily,
    offset: usize,
) -> Result<HeckeElement, SystemsError> {
    let rank = family.rank;
    let small = y.family().rank;
    let mut terms = Vec::with_capacity(y.support_len());
    for (u, c) in y.coeffs() {
        let mut images: Vec<i32> = (1..=rank as i32).collect();
        for t in 1..=small {
            images[offset + t - 1] = u.image(t as i32) + offset as i32;
        }
        terms.push((GroupElement::from_images(family, images)?, c.clone()));
    }
    Ok(HeckeElement::from_terms(family, y.q().clone(), terms))
}

/// Single-species ASEP(q,M) right-jump probability from block counts
/// `(n1, n2)`: `(1-q^{n1})(1-q^{M-n2}) / (1-q^M)^2`.
pub fn asep_qm_right_jump(n1: usize, n2: usize, m: usize, q: &BigRational) -> BigRational {
    let one = BigRational::from_integer(1.into());
    let denom = &one - num::pow::pow(q.clone(), m);
    (&one - num::pow::pow(q.clone(), n1)) * (&one - num::pow::pow(q.clone(), m - n2))
        / (&denom * &denom)
}

/// Single-species ASEP(q,M) left-jump probability from `(n1, n2)`:
/// `q^{M-n2+n1+1} (1-q^{n2})(1-q^{M-n1}) / (1-q^M)^2`.
pub fn asep_qm_left_jump(n1: usize, n2: usize, m: usize, q: &BigRational) -> BigRational {
    let one = BigRational::from_integer(1.into());
    let denom = &one - num::pow::pow(q.clone(), m);
    num::pow::pow(q.clone(), m - n2 + n1 + 1)
        * (&one - num::pow::pow(q.clone(), n2))
        * (&one - num::pow::pow(q.clone(), m - n1))
        / (&denom * &denom)
}
