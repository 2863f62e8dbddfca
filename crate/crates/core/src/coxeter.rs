//! Finite Coxeter groups of types A (symmetric group `S_n`) and B
//! (hyperoctahedral group `B_N`): elements, generators, length and
//! inversion statistics.
//!
//! A group element stores the map from particle *types* to *positions* in
//! one-line notation, so left multiplication by the generator `s_i` is the
//! bond update at positions `(i, i+1)`. For type B the images are signed
//! and satisfy `w(-t) = -w(t)`; only the images of positive types are
//! stored.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which Coxeter family a group belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Symmetric group `S_n` acting on `{1..n}`.
    TypeA,
    /// Hyperoctahedral group `B_N` acting on `{-N..-1, 1..N}`.
    TypeB,
}

/// A Coxeter family together with its rank.
///
/// Type A of rank `n` has generators `s_1..s_{n-1}`; type B of rank `N`
/// has generators `s_0, s_1..s_{N-1}`, with `m(s_0, s_1) = 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoxeterFamily {
    pub family: Family,
    pub rank: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("invalid generator index {index} for {family:?} of rank {rank}")]
    InvalidGenerator {
        family: Family,
        rank: usize,
        index: usize,
    },
    #[error("rank {0} too large for exhaustive enumeration")]
    RankTooLarge(usize),
    #[error("invalid one-line notation: {0}")]
    InvalidElement(String),
}

impl CoxeterFamily {
    pub fn type_a(rank: usize) -> Self {
        assert!(rank >= 1, "rank must be positive");
        CoxeterFamily {
            family: Family::TypeA,
            rank,
        }
    }

    pub fn type_b(rank: usize) -> Self {
        assert!(rank >= 1, "rank must be positive");
        CoxeterFamily {
            family: Family::TypeB,
            rank,
        }
    }

    /// Generator indices valid for this family.
    pub fn generators(&self) -> std::ops::Range<usize> {
        match self.family {
            Family::TypeA => 1..self.rank,
            Family::TypeB => 0..self.rank,
        }
    }

    pub fn is_valid_generator(&self, s: usize) -> bool {
        self.generators().contains(&s)
    }

    /// Entry of the Coxeter matrix for two generator indices.
    pub fn coxeter_matrix(&self, s: usize, t: usize) -> usize {
        if s == t {
            return 1;
        }
        let (lo, hi) = if s < t { (s, t) } else { (t, s) };
        if hi - lo > 1 {
            2
        } else if self.family == Family::TypeB && lo == 0 {
            4
        } else {
            3
        }
    }

    /// Group order; `n!` for type A, `2^N N!` for type B.
    pub fn order(&self) -> u128 {
        let fact: u128 = (1..=self.rank as u128).product();
        match self.family {
            Family::TypeA => fact,
            Family::TypeB => fact << self.rank,
        }
    }
}

/// A group element in one-line notation mapping types to positions:
/// `images[t-1] = w(t)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub family: CoxeterFamily,
    images: Vec<i32>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.family.family, self.images)
    }
}

impl GroupElement {
    /// Build an element from one-line notation, validating the invariants.
    pub fn from_images(family: CoxeterFamily, images: Vec<i32>) -> Result<Self, CoxeterError> {
        if images.len() != family.rank {
            return Err(CoxeterError::InvalidElement(format!(
                "expected {} images, got {}",
                family.rank,
                images.len()
            )));
        }
        let n = family.rank as i32;
        let mut seen = vec![false; family.rank];
        for &v in &images {
            let a = v.abs();
            if a < 1 || a > n || (family.family == Family::TypeA && v < 0) {
                return Err(CoxeterError::InvalidElement(format!(
                    "image {v} out of range for rank {n}"
                )));
            }
            if seen[(a - 1) as usize] {
                return Err(CoxeterError::InvalidElement(format!(
                    "duplicate absolute image {a}"
                )));
            }
            seen[(a - 1) as usize] = true;
        }
        Ok(GroupElement { family, images })
    }

    /// The identity element, `w(t) = t`.
    pub fn identity(family: CoxeterFamily) -> Self {
        GroupElement {
            family,
            images: (1..=family.rank as i32).collect(),
        }
    }

    pub fn images(&self) -> &[i32] {
        &self.images
    }

    /// `w(t)` for a (signed) type `t`.
    pub fn image(&self, t: i32) -> i32 {
        debug_assert!(t != 0 && t.unsigned_abs() as usize <= self.family.rank);
        let v = self.images[(t.abs() - 1) as usize];
        if t > 0 {
            v
        } else {
            -v
        }
    }

    /// Index (1-based type) whose image has absolute value `v`; this is
    /// `|w^{-1}(v)|`.
    fn type_with_abs_image(&self, v: i32) -> usize {
        debug_assert!(v >= 1);
        self.images
            .iter()
            .position(|x| x.abs() == v)
            .expect("valid element covers all absolute values")
            + 1
    }

    /// `s · w` for a generator index `s`.
    ///
    /// For `s_i` (`i >= 1`) this swaps the values `±i` and `±(i+1)` inside
    /// the one-line notation, i.e. the occupants of positions `i` and
    /// `i+1` trade places. For type B `s_0` the value `±1` flips sign.
    pub fn apply_generator_left(&self, s: usize) -> Result<Self, CoxeterError> {
        if !self.family.is_valid_generator(s) {
            return Err(CoxeterError::InvalidGenerator {
                family: self.family.family,
                rank: self.family.rank,
                index: s,
            });
        }
        let mut images = self.images.clone();
        if s == 0 {
            let t = self.type_with_abs_image(1) - 1;
            images[t] = -images[t];
        } else {
            let (i, j) = (s as i32, s as i32 + 1);
            for v in images.iter_mut() {
                if v.abs() == i {
                    *v = v.signum() * j;
                } else if v.abs() == j {
                    *v = v.signum() * i;
                }
            }
        }
        Ok(GroupElement {
            family: self.family,
            images,
        })
    }

    /// Coxeter length.
    ///
    /// Type A counts inversions of the one-line word; type B uses the
    /// signed inversion statistic
    /// `#{i<j : w(i)>w(j)} + #{i<=j : -w(i)>w(j)}`.
    pub fn length(&self) -> usize {
        let w = &self.images;
        let n = w.len();
        let mut len = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                if w[i] > w[j] {
                    len += 1;
                }
            }
        }
        if self.family.family == Family::TypeB {
            for i in 0..n {
                for j in i..n {
                    if -w[i] > w[j] {
                        len += 1;
                    }
                }
            }
        }
        len
    }

    /// Sign of `length(s·w) - length(w)`, always `+1` or `-1`.
    pub fn length_delta(&self, s: usize) -> Result<i32, CoxeterError> {
        if !self.family.is_valid_generator(s) {
            return Err(CoxeterError::InvalidGenerator {
                family: self.family.family,
                rank: self.family.rank,
                index: s,
            });
        }
        if s == 0 {
            // Ascent iff the type occupying position 1 is positive,
            // i.e. the value +1 occurs in the one-line word.
            let positive = self.images.contains(&1);
            return Ok(if positive { 1 } else { -1 });
        }
        // Ascent iff w^{-1}(s) < w^{-1}(s+1) in the signed order.
        let (i, j) = (s as i32, s as i32 + 1);
        let mut inv_i = 0i32;
        let mut inv_j = 0i32;
        for (t, &v) in self.images.iter().enumerate() {
            let t = t as i32 + 1;
            if v == i {
                inv_i = t;
            } else if v == -i {
                inv_i = -t;
            }
            if v == j {
                inv_j = t;
            } else if v == -j {
                inv_j = -t;
            }
        }
        debug_assert!(inv_i != 0 && inv_j != 0);
        Ok(if inv_i < inv_j { 1 } else { -1 })
    }

    /// Group inverse. `inverse(w)(|v|) = sign(v) * t` whenever `w(t) = v`.
    pub fn inverse(&self) -> Self {
        let mut images = vec![0i32; self.family.rank];
        for (t, &v) in self.images.iter().enumerate() {
            let t = t as i32 + 1;
            images[(v.abs() - 1) as usize] = if v > 0 { t } else { -t };
        }
        GroupElement {
            family: self.family,
            images,
        }
    }

    /// Group product `self · other` (apply `other` first).
    pub fn compose(&self, other: &GroupElement) -> Self {
        assert_eq!(self.family, other.family);
        let images = (1..=self.family.rank as i32)
            .map(|t| self.image(other.image(t)))
            .collect();
        GroupElement {
            family: self.family,
            images,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(t, &v)| v == t as i32 + 1)
    }

    /// A reduced word for `w` obtained by greedy left-descent peeling,
    /// lowest generator index first. `w = word[0] · word[1] · ... · word[r-1]`.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut word = Vec::with_capacity(self.length());
        let mut w = self.clone();
        'outer: while !w.is_identity() {
            for s in w.family.generators() {
                if w.length_delta(s).expect("valid generator") == -1 {
                    word.push(s);
                    w = w.apply_generator_left(s).expect("valid generator");
                    continue 'outer;
                }
            }
            unreachable!("non-identity element must have a left descent");
        }
        word
    }
}

/// Exhaustive enumeration of the group by BFS over the Cayley graph.
///
/// Elements appear in BFS order from the identity, so lengths are
/// nondecreasing along the returned vector.
pub fn enumerate_group(family: CoxeterFamily) -> Result<Vec<GroupElement>, CoxeterError> {
    let limit = match family.family {
        Family::TypeA => 8,
        Family::TypeB => 5,
    };
    if family.rank > limit {
        return Err(CoxeterError::RankTooLarge(family.rank));
    }
    let mut seen = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let e = GroupElement::identity(family);
    seen.insert(e.clone(), 0usize);
    order.push(e.clone());
    queue.push_back(e);
    while let Some(w) = queue.pop_front() {
        let d = seen[&w];
        for s in family.generators() {
            let next = w.apply_generator_left(s).expect("valid generator");
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), d + 1);
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    debug_assert_eq!(order.len() as u128, family.order());
    Ok(order)
}

/// BFS distance from the identity in the Cayley graph; the independent
/// oracle for [`GroupElement::length`]. Only usable at small rank.
pub fn cayley_length_oracle(w: &GroupElement) -> Result<usize, CoxeterError> {
    let limit = match w.family.family {
        Family::TypeA => 7,
        Family::TypeB => 4,
    };
    if w.family.rank > limit {
        return Err(CoxeterError::RankTooLarge(w.family.rank));
    }
    let mut seen = HashMap::new();
    let mut queue = VecDeque::new();
    let e = GroupElement::identity(w.family);
    seen.insert(e.clone(), 0usize);
    queue.push_back(e);
    while let Some(u) = queue.pop_front() {
        let d = seen[&u];
        if &u == w {
            return Ok(d);
        }
        for s in w.family.generators() {
            let next = u.apply_generator_left(s).expect("valid generator");
            seen.entry(next.clone()).or_insert_with(|| {
                queue.push_back(next);
                d + 1
            });
        }
    }
    unreachable!("BFS covers the whole group");
}
