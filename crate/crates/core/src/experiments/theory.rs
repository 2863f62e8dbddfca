//! Closed-form limit values for the particle-system observables.
//!
//! Each function evaluates one published formula; the Monte Carlo
//! estimators compare against these. Alternating sums with factorially
//! large terms are evaluated in exact big-integer arithmetic and converted
//! to floating point only at the end.

use num::bigint::BigInt;
use num::{BigRational, One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("infinite q-Pochhammer product requires |q| < 1")]
    Divergent,
    #[error("kappa target {kappa} below the minimum {min} = 1/(1-q)")]
    KappaBelowRange { kappa: f64, min: f64 },
}

/// Number of factors in a q-Pochhammer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pochhammer {
    Finite(usize),
    Infinite,
}

/// `(a; q)_n = prod_{j=0}^{n-1} (1 - a q^j)`; the infinite product is
/// truncated once the next factor differs from 1 by less than `1e-16`.
pub fn q_pochhammer(a: f64, q: f64, n: Pochhammer) -> Result<f64, TheoryError> {
    match n {
        Pochhammer::Finite(n) => {
            let mut prod = 1.0;
            let mut aq = a;
            for _ in 0..n {
                prod *= 1.0 - aq;
                aq *= q;
            }
            Ok(prod)
        }
        Pochhammer::Infinite => {
            if q.abs() >= 1.0 {
                return Err(TheoryError::Divergent);
            }
            let mut prod = 1.0;
            let mut aq = a;
            while aq.abs() >= 1e-16 {
                prod *= 1.0 - aq;
                aq *= q;
            }
            Ok(prod)
        }
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn rational_from_f64(x: f64, name: &str) -> Result<BigRational, TheoryError> {
    BigRational::from_float(x)
        .ok_or_else(|| TheoryError::ParameterRange(format!("{name} is not finite")))
}

/// Stationary particle density at position `z` of the half-line TASEP
/// with injection rate `alpha >= 1/2` (`q = 0` regime).
///
/// `z = 1`: `1 - 1/(4 alpha)`. For `z >= 2` the alternating sum
/// `4^{-z} sum_{k=2}^{z} (2(z-1)-k)! (k-1) / ((z-1)! (z-k)!)
/// ((1+k) 2^k - alpha^{-k})` is evaluated exactly before one float
/// division.
pub fn rho_alpha(z: usize, alpha: f64) -> Result<f64, TheoryError> {
    if z < 1 {
        return Err(TheoryError::ParameterRange("z must be >= 1".into()));
    }
    if !(0.5..=1.0).contains(&alpha) {
        return Err(TheoryError::ParameterRange(format!(
            "alpha = {alpha} outside the [1/2, 1] formula regime"
        )));
    }
    let alpha_r = rational_from_f64(alpha, "alpha")?;
    if z == 1 {
        let rho = BigRational::one()
            - BigRational::one() / (BigRational::from_integer(4.into()) * alpha_r);
        return Ok(rho.to_f64().expect("finite"));
    }
    let mut sum = BigRational::zero();
    let denom_base = factorial(z - 1);
    for k in 2..=z {
        let coeff = BigRational::new(
            factorial(2 * (z - 1) - k) * BigInt::from(k - 1),
            &denom_base * factorial(z - k),
        );
        let alpha_pow = num::pow::pow(alpha_r.clone(), k);
        let term = BigRational::from_integer(BigInt::from((1 + k) as i64) << k)
            - BigRational::one() / alpha_pow;
        sum += coeff * term;
    }
    let rho = sum / BigRational::from_integer(BigInt::one() << (2 * z));
    Ok(rho.to_f64().expect("finite"))
}

/// Probability that positions `z, z+1, ..., z+m-1` are all occupied in
/// the stationary state: `(1 + (2 rho_alpha(z) - 1) m) / 2^m`.
pub fn block_occupancy_theory(z: usize, m: usize, alpha: f64) -> Result<f64, TheoryError> {
    let rho = rho_alpha(z, alpha)?;
    Ok((1.0 + (2.0 * rho - 1.0) * m as f64) / 2f64.powi(m as i32))
}

/// Probability that the second-class particle started at position `k`
/// behind a block reaching to `l` exits the system (`q = 0`).
///
/// The exit event is equivalent (via the type-position involution) to
/// finding the block of `l - k + 1` positions `k, ..., l` all occupied
/// under the stationary boundary measure, so both branches are block
/// probabilities of length `m = l - k + 1`. Lower branch
/// `alpha <= 1/2` (Bernoulli(`alpha`) product measure): `alpha^m`.
/// Upper branch `alpha >= 1/2`: the stationary block formula
/// `(1 + (2 rho_alpha(k) - 1) m) / 2^m`. Both give `2^{-m}` at
/// `alpha = 1/2`, where `rho_alpha = 1/2`.
pub fn exit_probability_theory(k: usize, l: usize, alpha: f64) -> Result<f64, TheoryError> {
    if k < 1 || l < k {
        return Err(TheoryError::ParameterRange("need 1 <= k <= l".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(TheoryError::ParameterRange(format!("alpha = {alpha}")));
    }
    let m = (l - k + 1) as i32;
    if alpha <= 0.5 {
        Ok(alpha.powi(m))
    } else {
        let rho = rho_alpha(k, alpha)?;
        Ok((1.0 + (2.0 * rho - 1.0) * m as f64) / 2f64.powi(m))
    }
}

/// Limit probability that the second-class particle survives:
/// `alpha (alpha + (1-alpha) q)^{l-k}`, valid for `alpha <= 1/2`.
pub fn survival_theory(k: usize, l: usize, alpha: f64, q: f64) -> Result<f64, TheoryError> {
    if k < 1 || l < k {
        return Err(TheoryError::ParameterRange("need 1 <= k <= l".into()));
    }
    if !(0.0..=0.5).contains(&alpha) {
        return Err(TheoryError::ParameterRange(format!(
            "alpha = {alpha}: the q != 0 stationary state is only identified for alpha <= 1/2"
        )));
    }
    if !(0.0..1.0).contains(&q) {
        return Err(TheoryError::ParameterRange(format!("q = {q}")));
    }
    Ok(alpha * (alpha + (1.0 - alpha) * q).powi((l - k) as i32))
}

/// `kappa(alpha) = sum_{k>=0} q^k / (1 - alpha q^k)^2`, the inverse
/// hydrodynamic speed of the q-TAZRP front.
pub fn kappa(alpha: f64, q: f64) -> Result<f64, TheoryError> {
    if !(0.0..1.0).contains(&alpha) || !(0.0..1.0).contains(&q) {
        return Err(TheoryError::ParameterRange(format!(
            "need 0 <= alpha < 1 and 0 <= q < 1, got alpha = {alpha}, q = {q}"
        )));
    }
    let mut sum = 0.0;
    let mut qk = 1.0;
    loop {
        let term = qk / (1.0 - alpha * qk).powi(2);
        sum += term;
        if term < 1e-16 {
            return Ok(sum);
        }
        qk *= q;
    }
}

/// Inverse of [`kappa`] in `alpha` by bisection; `kappa` is strictly
/// increasing on `[0, 1)` with minimum `1/(1-q)`.
pub fn alpha_of_kappa(target: f64, q: f64) -> Result<f64, TheoryError> {
    let min = kappa(0.0, q)?;
    if target < min {
        return Err(TheoryError::KappaBelowRange { kappa: target, min });
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0 - 1e-12;
    while kappa(hi, q)? < target {
        hi = 1.0 - (1.0 - hi) * 0.5;
        if 1.0 - hi < 1e-15 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (kappa(mid, q)? - target).abs() < 1e-12 {
            return Ok(mid);
        }
        if kappa(mid, q)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Limiting law of the front-site occupancy of the q-TAZRP at time
/// `kappa(alpha) N`: `Prob(X_N = l) = (alpha; q)_inf alpha^l / (q; q)_l`.
pub fn qtazrp_marginal_theory(l: usize, alpha: f64, q: f64) -> Result<f64, TheoryError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(TheoryError::ParameterRange(format!("alpha = {alpha}")));
    }
    let head = q_pochhammer(alpha, q, Pochhammer::Infinite)?;
    let denom = q_pochhammer(q, q, Pochhammer::Finite(l))?;
    Ok(head * alpha.powi(l as i32) / denom)
}

/// Tail probability `Prob(h(t)/t >= 1/kappa(alpha))` for a lone
/// second-class particle started at site `s`: `alpha` for `s = 0`,
/// `1 - alpha^2 (1-alpha)^{s-1}` for `s >= 1`.
pub fn second_class_speed_cdf_theory(s: usize, alpha: f64) -> Result<f64, TheoryError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(TheoryError::ParameterRange(format!("alpha = {alpha}")));
    }
    if s == 0 {
        Ok(alpha)
    } else {
        Ok(1.0 - alpha * alpha * (1.0 - alpha).powi(s as i32 - 1))
    }
}
