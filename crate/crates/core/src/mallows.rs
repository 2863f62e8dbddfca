//! Mallows measures on permutations: pmf, the truncated-geometric
//! deletion sampler, the infinite-reservoir variant, and the block
//! q-equilibration kernel used by ASEP(q,M).
//!
//! The measure on arrangements of labels `a_1 < ... < a_n` gives the word
//! `a_{c_1} ... a_{c_n}` probability proportional to
//! `q^{n(n-1)/2 - N(c)}`, so for `q < 1` the unique mode is the fully
//! reversed word `a_n ... a_1`.

use num::{BigRational, One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::coxeter::{Family, GroupElement};
use crate::hecke::rational_to_f64;

#[derive(Debug, Error)]
pub enum MallowsError {
    #[error("q = {0} outside [0,1)")]
    ParameterRange(f64),
    #[error("arrangement is not a permutation of 0..{0}")]
    BadArrangement(usize),
    #[error("invalid block [{a};{b}] for rank {rank}")]
    BadBlock { a: usize, b: usize, rank: usize },
}

/// A Mallows measure on arrangements of `n` linearly ordered items.
///
/// Items are identified with their ranks `0..n` (`0` is the smallest).
#[derive(Debug, Clone)]
pub struct MallowsSpec {
    pub q: f64,
    pub n: usize,
}

impl MallowsSpec {
    pub fn new(q: f64, n: usize) -> Result<Self, MallowsError> {
        if !(0.0..1.0).contains(&q) {
            return Err(MallowsError::ParameterRange(q));
        }
        Ok(MallowsSpec { q, n })
    }
}

/// One truncated geometric draw `G_{q,m}` on `{1..m}` with
/// `P(G = z) = q^{z-1}(1-q)/(1-q^m)`, by inverse CDF from a single
/// uniform variate.
pub fn truncated_geometric(q: f64, m: usize, rng: &mut impl Rng) -> usize {
    debug_assert!(m >= 1);
    if q == 0.0 || m == 1 {
        return 1;
    }
    let u: f64 = rng.gen();
    // CDF(z) = (1 - q^z) / (1 - q^m); solve for the smallest z with CDF >= u.
    let target = 1.0 - u * (1.0 - q.powi(m as i32));
    let z = (target.ln() / q.ln()).ceil() as usize;
    z.clamp(1, m)
}

/// One standard geometric draw on `{1, 2, ...}` with
/// `P(G = z) = q^{z-1}(1-q)`.
pub fn geometric(q: f64, rng: &mut impl Rng) -> usize {
    if q == 0.0 {
        return 1;
    }
    let u: f64 = rng.gen();
    let z = ((1.0 - u).ln() / q.ln()).floor() as usize + 1;
    z.max(1)
}

/// Exact Mallows sample via the deletion algorithm.
///
/// The reservoir is written in the order `a_n a_{n-1} ... a_1`; step `k`
/// draws `G_{q,n-k+1}` and takes the letter in that position from the
/// left, counting only undeleted letters. Returns the ranks
/// `xi_1 ... xi_n`.
pub fn sample_mallows(spec: &MallowsSpec, rng: &mut impl Rng) -> Vec<usize> {
    let n = spec.n;
    // reservoir in word order: largest rank first
    let mut reservoir: Vec<usize> = (0..n).rev().collect();
    let mut out = Vec::with_capacity(n);
    for remaining in (1..=n).rev() {
        let g = truncated_geometric(spec.q, remaining, rng);
        out.push(reservoir.remove(g - 1));
    }
    out
}

/// First `depth` letters of the half-infinite sampler.
///
/// The reservoir is the ordered sequence `a_1 a_2 a_3 ...` and each step
/// uses an untruncated geometric draw; returned values are 0-based
/// reservoir indices.
pub fn sample_infinite_prefix(q: f64, depth: usize, rng: &mut impl Rng) -> Vec<usize> {
    assert!((0.0..1.0).contains(&q));
    let mut taken: Vec<usize> = Vec::new(); // sorted deleted indices
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        let g = geometric(q, rng);
        // g-th undeleted index (1-based) in 0,1,2,...
        let mut idx = g - 1;
        for &t in taken.iter() {
            if t <= idx {
                idx += 1;
            }
        }
        let pos = taken.partition_point(|&t| t < idx);
        taken.insert(pos, idx);
        out.push(idx);
    }
    out
}

/// Number of inversions of an arrangement.
pub fn inversions(word: &[usize]) -> usize {
    let mut inv = 0;
    for i in 0..word.len() {
        for j in (i + 1)..word.len() {
            if word[i] > word[j] {
                inv += 1;
            }
        }
    }
    inv
}

/// Exact pmf of an arrangement of ranks `0..n` under the Mallows measure
/// with rational `q`. The normalization is the q-factorial
/// `[n]_q! = prod_j (1 - q^j)/(1 - q)`.
pub fn mallows_pmf_exact(arrangement: &[usize], q: &BigRational) -> Result<BigRational, MallowsError> {
    let n = arrangement.len();
    let mut seen = vec![false; n];
    for &x in arrangement {
        if x >= n || seen[x] {
            return Err(MallowsError::BadArrangement(n));
        }
        seen[x] = true;
    }
    let max_inv = n * (n - 1) / 2;
    let weight = num::pow::pow(q.clone(), max_inv - inversions(arrangement));
    let mut z = BigRational::one();
    for j in 2..=n {
        let mut row = BigRational::zero();
        for p in 0..j {
            row += num::pow::pow(q.clone(), p);
        }
        z *= row;
    }
    Ok(weight / z)
}

/// Float pmf for large-`n` paths; the exact variant is the source of
/// truth in tests.
pub fn mallows_pmf(arrangement: &[usize], spec: &MallowsSpec) -> Result<f64, MallowsError> {
    let q = BigRational::from_float(spec.q)
        .ok_or(MallowsError::ParameterRange(spec.q))?;
    Ok(rational_to_f64(&mallows_pmf_exact(arrangement, &q)?))
}

/// Brute-force normalization oracle: sums the weights over all of `S_n`.
/// Only for `n <= 6`; retained as the independent check of the
/// q-factorial identity.
pub fn mallows_partition_oracle(n: usize, q: &BigRational) -> BigRational {
    use itertools::Itertools;
    assert!(n <= 6);
    let max_inv = n * (n - 1) / 2;
    (0..n)
        .permutations(n)
        .map(|word| num::pow::pow(q.clone(), max_inv - inversions(&word)))
        .sum()
}

/// Markov kernel of left multiplication by the normalized Mallows block
/// element: the types occupying positions `a..=b` are rearranged within
/// those positions by a fresh Mallows sample in their natural order;
/// everything outside the interval is untouched.
pub fn equilibrate_block(
    state: &GroupElement,
    a: usize,
    b: usize,
    q: f64,
    rng: &mut impl Rng,
) -> Result<GroupElement, MallowsError> {
    let rank = state.family.rank;
    if state.family.family != Family::TypeA || a < 1 || b <= a || b > rank {
        return Err(MallowsError::BadBlock { a, b, rank });
    }
    // types currently inside the interval, ascending
    let mut block_types: Vec<i32> = (1..=rank as i32)
        .filter(|&t| {
            let pos = state.image(t);
            pos >= a as i32 && pos <= b as i32
        })
        .collect();
    block_types.sort_unstable();
    let m = b - a + 1;
    debug_assert_eq!(block_types.len(), m);
    let spec = MallowsSpec::new(q, m)?;
    let word = sample_mallows(&spec, rng);
    Ok(arrange_block(state, a, &block_types, &word))
}

/// Deterministic arrangement step of [`equilibrate_block`]: place the
/// ascending `block_types` into positions `a..` according to
/// `word` (entry `offset` names the rank of the type put at position
/// `a + offset`).
pub fn arrange_block(
    state: &GroupElement,
    a: usize,
    block_types: &[i32],
    word: &[usize],
) -> GroupElement {
    let mut images = state.images().to_vec();
    for (offset, &rank_in_block) in word.iter().enumerate() {
        let t = block_types[rank_in_block];
        images[(t - 1) as usize] = (a + offset) as i32;
    }
    GroupElement::from_images(state.family, images).expect("permutation preserved")
}
