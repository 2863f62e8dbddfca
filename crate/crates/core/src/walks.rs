//! Random-walk drivers on Hecke algebras.
//!
//! A stochastic Hecke element induces a Markov kernel on the group: from
//! `w`, draw `u` from the coefficients and push `T_u T_w` through the
//! multiplication rules one generator at a time. The module provides the
//! sampling side (discrete and Poisson-clock drivers), the exact side
//! (kernel matrices and distribution propagation at small rank), and
//! stationarity diagnostics against the Mallows measure.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigRational, One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

use crate::coxeter::{enumerate_group, CoxeterError, CoxeterFamily, GroupElement};
use crate::hecke::{rational_to_f64, HeckeElement};
use crate::rngstream::TrialRng;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("element is not stochastic")]
    NotStochastic,
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("empty kernel set")]
    NoKernels,
}

/// One Monte Carlo step of the basis kernel `T_s`: ascents always apply
/// the swap, descents apply it with probability `q`.
pub fn step_basis(w: &GroupElement, s: usize, q: f64, rng: &mut impl Rng) -> GroupElement {
    let ascent = w.length_delta(s).expect("valid generator") == 1;
    if ascent || rng.gen::<f64>() < q {
        w.apply_generator_left(s).expect("valid generator")
    } else {
        w.clone()
    }
}

/// Pre-processed sampler for a stochastic Hecke element: support terms as
/// reduced words with cumulative probabilities.
#[derive(Debug, Clone)]
pub struct ElementSampler {
    q: f64,
    terms: Vec<(Vec<usize>, f64)>, // (reduced word of u, cumulative probability)
}

impl ElementSampler {
    pub fn new(h: &HeckeElement) -> Result<Self, WalkError> {
        if !h.is_stochastic() {
            return Err(WalkError::NotStochastic);
        }
        let mut cum = 0.0;
        let mut terms = Vec::with_capacity(h.support_len());
        for (u, c) in h.coeffs() {
            cum += rational_to_f64(c);
            terms.push((u.reduced_word(), cum));
        }
        Ok(ElementSampler {
            q: rational_to_f64(h.q()),
            terms,
        })
    }

    /// Sample `u` from the coefficients, then fold `step_basis` along a
    /// reduced word of `u`; the induced kernel equals left multiplication
    /// by the element in the algebra.
    pub fn step(&self, w: &GroupElement, rng: &mut impl Rng) -> GroupElement {
        let u: f64 = rng.gen();
        let word: &[usize] = self
            .terms
            .iter()
            .find(|(_, c)| u < *c)
            .map(|(word, _)| word.as_slice())
            .unwrap_or_else(|| self.terms.last().expect("nonempty support").0.as_slice());
        let mut state = w.clone();
        for &s in word.iter().rev() {
            state = step_basis(&state, s, self.q, rng);
        }
        state
    }
}

/// Sampling procedure used when exact enumeration is infeasible. When the
/// rank permits, `exact` declares the element the procedure simulates so
/// oracle tests can compare the two.
#[derive(Clone)]
pub struct SimKernel {
    pub step: Arc<dyn Fn(&GroupElement, &mut TrialRng) -> GroupElement + Send + Sync>,
    pub exact: Option<HeckeElement>,
}

impl std::fmt::Debug for SimKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimKernel")
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

/// How one generator of a walk moves the state.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// The basis kernel `T_s`.
    Generator(usize),
    /// A general stochastic element sampled exactly.
    Element(ElementSampler),
    /// A caller-supplied simulation procedure.
    Sim(SimKernel),
}

/// A walk generator: a kernel plus its Poisson clock rate.
#[derive(Debug, Clone)]
pub struct GeneratorKernel {
    pub spec: KernelSpec,
    pub rate: f64,
    /// `q` used by basis kernels.
    pub q: f64,
}

impl GeneratorKernel {
    pub fn basis(s: usize, q: f64, rate: f64) -> Self {
        GeneratorKernel {
            spec: KernelSpec::Generator(s),
            rate,
            q,
        }
    }

    pub fn element(h: &HeckeElement, rate: f64) -> Result<Self, WalkError> {
        Ok(GeneratorKernel {
            spec: KernelSpec::Element(ElementSampler::new(h)?),
            rate,
            q: rational_to_f64(h.q()),
        })
    }

    pub fn sim(kernel: SimKernel, q: f64, rate: f64) -> Self {
        GeneratorKernel {
            spec: KernelSpec::Sim(kernel),
            rate,
            q,
        }
    }

    pub fn step(&self, w: &GroupElement, rng: &mut TrialRng) -> GroupElement {
        match &self.spec {
            KernelSpec::Generator(s) => step_basis(w, *s, self.q, rng),
            KernelSpec::Element(sampler) => sampler.step(w, rng),
            KernelSpec::Sim(sim) => (sim.step)(w, rng),
        }
    }
}

/// State of a walk trajectory.
#[derive(Debug, Clone)]
pub struct WalkState {
    pub current: GroupElement,
    /// Continuous time, or the step count in discrete mode.
    pub time: f64,
    pub steps: u64,
    /// `(time, kernel index)` log, kept only when requested.
    pub events: Option<Vec<(f64, usize)>>,
}

/// Kernel selection rule for discrete walks.
#[derive(Debug, Clone)]
pub enum Schedule {
    /// i.i.d. uniform over the kernel set.
    Uniform,
    /// Fixed sequence of kernel indices, applied in order.
    Fixed(Vec<usize>),
}

pub fn run_discrete(
    initial: GroupElement,
    kernels: &[GeneratorKernel],
    schedule: &Schedule,
    steps: usize,
    rng: &mut TrialRng,
    log_events: bool,
) -> Result<WalkState, WalkError> {
    if kernels.is_empty() {
        return Err(WalkError::NoKernels);
    }
    let mut state = WalkState {
        current: initial,
        time: 0.0,
        steps: 0,
        events: log_events.then(Vec::new),
    };
    for step in 0..steps {
        let idx = match schedule {
            Schedule::Uniform => rng.gen_range(0..kernels.len()),
            Schedule::Fixed(seq) => {
                if seq.is_empty() {
                    break;
                }
                seq[step % seq.len()]
            }
        };
        state.current = kernels[idx].step(&state.current, rng);
        state.steps += 1;
        state.time = state.steps as f64;
        if let Some(log) = &mut state.events {
            log.push((state.time, idx));
        }
    }
    Ok(state)
}

/// Continuous-time walk via superposed Poisson clocks, simulated as an
/// embedded chain: exponential holding times at the total rate, then a
/// categorical pick proportional to the individual rates.
pub fn run_continuous(
    initial: GroupElement,
    kernels: &[GeneratorKernel],
    t_max: f64,
    rng: &mut TrialRng,
    log_events: bool,
) -> Result<WalkState, WalkError> {
    if kernels.is_empty() {
        return Err(WalkError::NoKernels);
    }
    let total_rate: f64 = kernels.iter().map(|k| k.rate).sum();
    assert!(total_rate > 0.0, "rates must be positive");
    let mut state = WalkState {
        current: initial,
        time: 0.0,
        steps: 0,
        events: log_events.then(Vec::new),
    };
    loop {
        let wait = -rng.gen::<f64>().ln() / total_rate;
        if state.time + wait > t_max {
            state.time = t_max;
            return Ok(state);
        }
        state.time += wait;
        let mut pick = rng.gen::<f64>() * total_rate;
        let mut idx = kernels.len() - 1;
        for (i, k) in kernels.iter().enumerate() {
            if pick < k.rate {
                idx = i;
                break;
            }
            pick -= k.rate;
        }
        state.current = kernels[idx].step(&state.current, rng);
        state.steps += 1;
        if let Some(log) = &mut state.events {
            log.push((state.time, idx));
        }
    }
}

/// Exact probabilities over the group, in sparse form.
pub type DistributionVector = BTreeMap<GroupElement, BigRational>;

pub fn delta_distribution(w: GroupElement) -> DistributionVector {
    let mut d = DistributionVector::new();
    d.insert(w, BigRational::one());
    d
}

/// The row of the exact kernel induced by left multiplication by `h`,
/// from state `from`: coefficients of `h · T_from`.
pub fn kernel_row(h: &HeckeElement, from: &GroupElement) -> BTreeMap<GroupElement, BigRational> {
    let t = HeckeElement::basis(from.clone(), h.q().clone());
    h.mul(&t).expect("same family and q").coeffs().clone()
}

/// One exact step of the distribution: pushforward through the kernel of
/// `h`.
pub fn propagate_exact(dist: &DistributionVector, h: &HeckeElement) -> DistributionVector {
    let mut out = DistributionVector::new();
    for (w, p) in dist {
        for (v, k) in kernel_row(h, w) {
            let entry = out.entry(v).or_insert_with(BigRational::zero);
            *entry += p * k;
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// Exact distribution after a fixed sequence of kernel elements applied
/// in order (first element of the slice acts first).
pub fn exact_distribution_discrete(
    initial: &DistributionVector,
    sequence: &[&HeckeElement],
) -> DistributionVector {
    let mut dist = initial.clone();
    for h in sequence {
        dist = propagate_exact(&dist, h);
    }
    dist
}

/// Mixture kernel of an i.i.d.-uniform schedule: the average of the
/// kernel elements.
pub fn uniform_mixture(kernels: &[HeckeElement]) -> Result<HeckeElement, WalkError> {
    let first = kernels.first().ok_or(WalkError::NoKernels)?;
    let weight = BigRational::new(1.into(), (kernels.len() as i64).into());
    let mut out = HeckeElement::zero(first.family(), first.q().clone());
    for h in kernels {
        out = out.add(&h.scale(&weight)).expect("same family");
    }
    Ok(out)
}

/// Dense float transition matrix of the kernel of `h` over an
/// enumeration of the group. `matrix[from][to]`.
pub fn kernel_matrix_f64(h: &HeckeElement, elems: &[GroupElement]) -> Vec<Vec<f64>> {
    let index: BTreeMap<&GroupElement, usize> =
        elems.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut matrix = vec![vec![0.0; elems.len()]; elems.len()];
    for (i, w) in elems.iter().enumerate() {
        for (v, p) in kernel_row(h, w) {
            matrix[i][index[&v]] = rational_to_f64(&p);
        }
    }
    matrix
}

/// Continuous-time marginal at time `t` by uniformization, truncating
/// when the Poisson tail mass drops below `1e-14`.
///
/// `kernels` pairs each stochastic element with its clock rate.
pub fn exact_distribution_continuous(
    initial: &BTreeMap<GroupElement, f64>,
    kernels: &[(HeckeElement, f64)],
    t: f64,
    family: CoxeterFamily,
) -> Result<BTreeMap<GroupElement, f64>, WalkError> {
    let elems = enumerate_group(family)?;
    let total_rate: f64 = kernels.iter().map(|(_, r)| r).sum();
    let n = elems.len();
    // uniformized step: P = sum_i (r_i / R) K_i
    let mut step = vec![vec![0.0; n]; n];
    for (h, r) in kernels {
        let k = kernel_matrix_f64(h, &elems);
        for i in 0..n {
            for j in 0..n {
                step[i][j] += (r / total_rate) * k[i][j];
            }
        }
    }
    let index: BTreeMap<&GroupElement, usize> =
        elems.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut v = vec![0.0; n];
    for (w, p) in initial {
        v[index[&w]] = *p;
    }
    let lambda_t = total_rate * t;
    let mut out = vec![0.0; n];
    let mut weight = (-lambda_t).exp();
    let mut tail = 1.0 - weight;
    let mut m = 0u64;
    loop {
        for i in 0..n {
            out[i] += weight * v[i];
        }
        if tail < 1e-14 {
            break;
        }
        // v <- v P (distribution as a row vector)
        let mut next = vec![0.0; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for j in 0..n {
                next[j] += vi * step[i][j];
            }
        }
        v = next;
        m += 1;
        weight *= lambda_t / m as f64;
        tail -= weight;
    }
    Ok(elems.into_iter().zip(out).filter(|(_, p)| *p > 0.0).collect())
}

/// Truncated uniformization with exact rational arithmetic: the partial
/// sum `sum_{m<=order} ((R t)^m / m!) P^m v` with the common factor
/// `e^{-R t}` dropped. Two walks related by an exact algebraic identity
/// produce equal partial sums at every truncation order, so equality can
/// be asserted without tolerances.
pub fn uniformized_partial_sum(
    initial: &DistributionVector,
    kernels: &[(HeckeElement, BigRational)],
    t: &BigRational,
    order: usize,
) -> DistributionVector {
    let total_rate: BigRational = kernels.iter().map(|(_, r)| r.clone()).sum();
    let lambda_t = &total_rate * t;
    let mut v = initial.clone();
    let mut out = v.clone();
    let mut weight = BigRational::one();
    for m in 1..=order {
        // v <- P v with P = sum_i (r_i / R) K_i
        let mut next = DistributionVector::new();
        for (h, r) in kernels {
            let share = r / &total_rate;
            for (w, p) in propagate_exact(&v, h) {
                let entry = next.entry(w).or_insert_with(BigRational::zero);
                *entry += p * &share;
            }
        }
        next.retain(|_, p| !p.is_zero());
        v = next;
        weight = weight * &lambda_t / BigRational::from_integer(m.into());
        for (w, p) in &v {
            let entry = out.entry(w.clone()).or_insert_with(BigRational::zero);
            *entry += p * &weight;
        }
    }
    out
}

/// Maximum detailed-balance residual `|pi(w) K(w,v) - pi(v) K(v,w)|`
/// over all pairs, with the unnormalized Mallows weights
/// `pi(w) = q^{L - l(w)}` (`L` the longest length). Exact; zero iff the
/// Mallows measure is reversible for the kernel.
pub fn detailed_balance_residual(h: &HeckeElement) -> Result<BigRational, WalkError> {
    let family = h.family();
    let elems = enumerate_group(family)?;
    let max_len = elems.iter().map(|w| w.length()).max().unwrap_or(0);
    let weights: Vec<BigRational> = elems
        .iter()
        .map(|w| num::pow::pow(h.q().clone(), max_len - w.length()))
        .collect();
    let rows: Vec<BTreeMap<GroupElement, BigRational>> =
        elems.iter().map(|w| kernel_row(h, w)).collect();
    let index: BTreeMap<&GroupElement, usize> =
        elems.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut residual = BigRational::zero();
    for (i, row) in rows.iter().enumerate() {
        for (v, p) in row {
            let j = index[&v];
            let back = rows[j].get(&elems[i]).cloned().unwrap_or_else(BigRational::zero);
            let r = (&weights[i] * p - &weights[j] * back).abs();
            if r > residual {
                residual = r;
            }
        }
    }
    Ok(residual)
}

/// Total variation distance between two sparse distributions (float).
pub fn total_variation_f64(a: &BTreeMap<GroupElement, f64>, b: &BTreeMap<GroupElement, f64>) -> f64 {
    let mut keys: Vec<&GroupElement> = a.keys().collect();
    for k in b.keys() {
        if !a.contains_key(k) {
            keys.push(k);
        }
    }
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}
