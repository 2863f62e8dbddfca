//! Particle-system frontends on top of the walk drivers.
//!
//! Each constructor assembles a [`SystemSpec`]: the Coxeter family, the
//! generator kernels with their Poisson rates, the initial element, and a
//! type projection that turns group elements into labeled particle
//! configurations.

mod asepqm;
mod fast;
mod qtazrp;
mod sixvertex;

pub use asepqm::{asep_qm_left_jump, asep_qm_right_jump, make_asep_qm, make_general_m_exclusion};
pub use fast::{FastHalfline, HalflineLabel};
pub use qtazrp::{make_qtazrp, OccupancyConfig, QtazrpSystem};
pub use sixvertex::{make_six_vertex, SixVertexSystem, Vertex, VertexLattice};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coxeter::{CoxeterError, CoxeterFamily, GroupElement};
use crate::rngstream::TrialRng;
use crate::walks::{GeneratorKernel, Schedule};

#[derive(Debug, Error)]
pub enum SystemsError {
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("type {0} has no label in the projection map")]
    UnmappedType(i32),
    #[error("type map is not monotone on positive types")]
    NonMonotoneMap,
    #[error("boundary contact: event at the window edge (bond {0})")]
    BoundaryContact(usize),
    #[error(transparent)]
    Mallows(#[from] crate::mallows::MallowsError),
    #[error(transparent)]
    Hecke(#[from] crate::hecke::HeckeError),
    #[error(transparent)]
    Walk(#[from] crate::walks::WalkError),
}

/// A fully assembled particle system ready for the walk drivers.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub family: CoxeterFamily,
    pub kernels: Vec<GeneratorKernel>,
    pub schedule: Schedule,
    pub initial: GroupElement,
    pub type_map: Option<TypeMap>,
    /// Number of positions the caller considers physically meaningful;
    /// events at the outermost bond signal window truncation.
    pub window: Option<usize>,
}

/// Whether a system runs on Poisson clocks or in discrete sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    Continuous,
    Discrete,
}

/// Identification of particle types with labels (classes, holes, and so
/// on). Labels are indices into `labels`; class semantics require the
/// assignment to be monotone on positive types.
#[derive(Debug, Clone)]
pub struct TypeMap {
    labels: Vec<String>,
    assignment: BTreeMap<i32, usize>,
}

impl TypeMap {
    pub fn new(
        labels: Vec<String>,
        assignment: BTreeMap<i32, usize>,
    ) -> Result<Self, SystemsError> {
        for (&t, &l) in &assignment {
            if t == 0 {
                return Err(SystemsError::ParameterRange("type 0 is not valid".into()));
            }
            if l >= labels.len() {
                return Err(SystemsError::ParameterRange(format!(
                    "label index {l} out of range for type {t}"
                )));
            }
        }
        Ok(TypeMap { labels, assignment })
    }

    /// Identity map on the positive types of the family: every type its
    /// own label.
    pub fn identity(family: CoxeterFamily) -> Self {
        let labels = (1..=family.rank as i32).map(|t| t.to_string()).collect();
        let assignment = (1..=family.rank as i32).map(|t| (t, (t - 1) as usize)).collect();
        TypeMap { labels, assignment }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_of(&self, t: i32) -> Result<usize, SystemsError> {
        self.assignment
            .get(&t)
            .copied()
            .ok_or(SystemsError::UnmappedType(t))
    }

    /// Class semantics: a smaller type (higher priority) must never map
    /// to a larger label index than a bigger type.
    pub fn is_monotone_on_positives(&self) -> bool {
        let mut last = None;
        for (&t, &l) in self.assignment.range(1..) {
            let _ = t;
            if let Some(prev) = last {
                if l < prev {
                    return false;
                }
            }
            last = Some(l);
        }
        true
    }
}

/// Label word of a group element under a type map: entry `p` is the
/// label of the type occupying position `p + 1`.
pub fn project_types(state: &GroupElement, map: &TypeMap) -> Result<Vec<usize>, SystemsError> {
    let inv = state.inverse();
    inv.images().iter().map(|&t| map.label_of(t)).collect()
}

/// Finite-window truncation check: the Harris construction argument only
/// covers trajectories that never touch the outermost bond. `events` is
/// the walk's `(time, kernel index)` log and `edge_kernel` the index of
/// the bond at the window edge.
pub fn window_guard(events: &[(f64, usize)], edge_kernel: usize) -> Result<(), SystemsError> {
    if events.iter().any(|&(_, idx)| idx == edge_kernel) {
        Err(SystemsError::BoundaryContact(edge_kernel))
    } else {
        Ok(())
    }
}

/// Multi-species ASEP on `n` types: bulk bond kernels `s_1..s_{n-1}`,
/// rate 1 each in continuous mode, uniform schedule in discrete mode.
pub fn make_masep(n: usize, q: f64, mode: TimeMode) -> Result<SystemSpec, SystemsError> {
    if n < 2 {
        return Err(SystemsError::ParameterRange("need n >= 2".into()));
    }
    let family = CoxeterFamily::type_a(n);
    let kernels = (1..n).map(|s| GeneratorKernel::basis(s, q, 1.0)).collect();
    Ok(SystemSpec {
        family,
        kernels,
        schedule: match mode {
            TimeMode::Continuous | TimeMode::Discrete => Schedule::Uniform,
        },
        initial: GroupElement::identity(family),
        type_map: Some(TypeMap::identity(family)),
        window: None,
    })
}

/// Half-line multi-species ASEP with open boundary: type-B walk with
/// bulk bonds `s_1..s_{N-1}` at rate 1 and the sign-flip boundary at
/// position 1 coupled to a reservoir of density `alpha`: the occupant
/// flips to its negative partner at rate `alpha` (injection) and back at
/// rate `q (1 - alpha)` (removal). These are the unique rates for which
/// the single-species marginal started from the empty configuration
/// converges to the Bernoulli product measure with parameter `alpha`
/// (for `alpha <= 1/2`); they coincide with the one-parameter Hecke
/// boundary at `q = 0` and correspond to the boundary-deformed
/// (two-parameter) walk otherwise.
pub fn make_halfline(n: usize, alpha: f64, q: f64) -> Result<SystemSpec, SystemsError> {
    if n < 1 || alpha <= 0.0 || alpha > 1.0 {
        return Err(SystemsError::ParameterRange(
            "need N >= 1 and 0 < alpha <= 1".into(),
        ));
    }
    let family = CoxeterFamily::type_b(n);
    let removal = q * (1.0 - alpha);
    let boundary_rate = alpha.max(removal).max(f64::MIN_POSITIVE);
    let flip_up = alpha / boundary_rate;
    let flip_down = removal / boundary_rate;
    let step = std::sync::Arc::new(move |w: &GroupElement, rng: &mut TrialRng| {
        // sign of the occupant of position 1
        let positive = w.images().iter().any(|&v| v == 1);
        let p = if positive { flip_up } else { flip_down };
        if rand::Rng::gen::<f64>(rng) < p {
            w.apply_generator_left(0).expect("boundary generator")
        } else {
            w.clone()
        }
    });
    let mut kernels = vec![GeneratorKernel::sim(
        crate::walks::SimKernel { step, exact: None },
        q,
        boundary_rate,
    )];
    kernels.extend((1..n).map(|s| GeneratorKernel::basis(s, q, 1.0)));
    Ok(SystemSpec {
        family,
        kernels,
        schedule: Schedule::Uniform,
        initial: GroupElement::identity(family),
        type_map: None,
        window: Some(n),
    })
}

/// Label indices used by [`second_class_type_map`], ordered by swap
/// priority (an occupant with a smaller index moves right through one
/// with a larger index at rate 1 and back at rate `q`).
pub mod second_class_labels {
    pub const NEG_HOLE: usize = 0;
    pub const NEG_TRACKED: usize = 1;
    pub const FIRST_CLASS: usize = 2;
    pub const SECOND_CLASS: usize = 3;
    pub const HOLE: usize = 4;
}

/// Projection for the second-class observable: types below `k` are first
/// class (either sign), `+k` is the tracked second-class particle, `-k`
/// its exited state, larger types are holes.
pub fn second_class_type_map(n: usize, k: usize) -> TypeMap {
    use second_class_labels::*;
    let labels = vec![
        "neg-hole".to_string(),
        "exited".to_string(),
        "first".to_string(),
        "second".to_string(),
        "hole".to_string(),
    ];
    let mut assignment = BTreeMap::new();
    for t in 1..=n as i32 {
        let (pos_label, neg_label) = if (t as usize) < k {
            (FIRST_CLASS, FIRST_CLASS)
        } else if t as usize == k {
            (SECOND_CLASS, NEG_TRACKED)
        } else {
            (HOLE, NEG_HOLE)
        };
        assignment.insert(t, pos_label);
        assignment.insert(-t, neg_label);
    }
    TypeMap::new(labels, assignment).expect("valid map")
}

/// The type-B walk behind the exit and survival theorems: first-class
/// particles at positions `1..k-1`, the tracked type `k` at position `l`,
/// holes elsewhere. The initial element is the transposition product
/// `(l-1,l)(l-2,l-1)...(k,k+1)`, which places type `k` at position `l`.
pub fn make_second_class_halfline(
    n: usize,
    alpha: f64,
    q: f64,
    k: usize,
    l: usize,
) -> Result<SystemSpec, SystemsError> {
    if !(1..=l).contains(&k) || l > n {
        return Err(SystemsError::ParameterRange(format!(
            "need 1 <= k <= l <= N, got k={k} l={l} N={n}"
        )));
    }
    let mut spec = make_halfline(n, alpha, q)?;
    let mut initial = spec.initial.clone();
    for s in k..l {
        initial = initial.apply_generator_left(s)?;
    }
    spec.initial = initial;
    spec.type_map = Some(second_class_type_map(n, k));
    Ok(spec)
}
