//! Event-driven simulator for the half-line second-class observable.
//!
//! The full type-B walk distinguishes every particle type, but the exit
//! and survival observables only see five labels: negative holes,
//! the tracked type with negative sign, small types (first class, either
//! sign), the tracked type with positive sign, and positive holes. The
//! projection onto these labels is an exact lumping of the walk: every
//! bond compares two occupants of *different* labels the same way
//! regardless of which representative types they carry, and sign flips of
//! small types at the boundary do not change the label word. The tests
//! check the lumped chain against the exact full kernel on B_3.
//!
//! Transitions: at a bond whose left occupant has the smaller label the
//! swap fires at rate 1, at rate `q` in the opposite order, never between
//! equal labels. At position 1 the boundary is coupled to a reservoir of
//! density `alpha`: holes and the tracked particle flip to their negative
//! partners at rate `alpha` (positive sign) and back at rate
//! `q (1 - alpha)` (negative sign); small types flip invisibly.
//!
//! Events are drawn by category (unit-rate bonds, `q`-rate bonds,
//! boundary), so no time is spent on the inert sorted regions far from
//! the front.

use rand::Rng;

use super::SystemsError;
use crate::rngstream::TrialRng;

/// Labels in swap-priority order: an occupant with a smaller label moves
/// right through a larger one at rate 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[repr(u8)]
pub enum HalflineLabel {
    /// Hole with negative sign (was flipped at the boundary).
    NegHole = 0,
    /// The tracked type after its sign flip ("exited" second class).
    NegTracked = 1,
    /// First-class particle (types below the tracked one, either sign).
    Small = 2,
    /// The tracked second-class particle.
    Tracked = 3,
    /// Ordinary hole.
    Hole = 4,
}

impl HalflineLabel {
    pub fn from_u8(v: u8) -> Self {
        match v {
            0 => HalflineLabel::NegHole,
            1 => HalflineLabel::NegTracked,
            2 => HalflineLabel::Small,
            3 => HalflineLabel::Tracked,
            4 => HalflineLabel::Hole,
            _ => panic!("invalid label {v}"),
        }
    }
}

const NH: u8 = 0;
const NK: u8 = 1;
const SC: u8 = 2;
const PK: u8 = 3;
const PH: u8 = 4;

/// The lumped half-line system with the second-class initial data:
/// first-class particles at positions `1..k-1`, the tracked particle at
/// position `l`, holes elsewhere, on a window of `window` positions.
#[derive(Debug, Clone)]
pub struct FastHalfline {
    pub window: usize,
    pub alpha: f64,
    pub q: f64,
    pub k: usize,
    pub l: usize,
}

/// Final state of one trajectory.
#[derive(Debug, Clone)]
pub struct FastRun {
    pub labels: Vec<u8>,
    /// Position of the tracked particle (1-based).
    pub tracked_pos: usize,
    /// Sign of the tracked type at the end.
    pub tracked_negative: bool,
    /// Whether the tracked sign was ever negative.
    pub ever_negative: bool,
    /// An event touched the outermost bond: the window was too small.
    pub boundary_contact: bool,
    pub events: u64,
}

/// Membership lists with O(1) insert/remove for one rate category.
#[derive(Debug, Clone)]
struct BondSet {
    members: Vec<u32>,
    position: Vec<u32>,
}

impl BondSet {
    fn new(bonds: usize) -> Self {
        BondSet {
            members: Vec::with_capacity(bonds),
            position: vec![u32::MAX; bonds],
        }
    }

    fn insert(&mut self, bond: u32) {
        debug_assert_eq!(self.position[bond as usize], u32::MAX);
        self.position[bond as usize] = self.members.len() as u32;
        self.members.push(bond);
    }

    fn remove(&mut self, bond: u32) {
        let pos = self.position[bond as usize];
        debug_assert_ne!(pos, u32::MAX);
        let last = *self.members.last().expect("nonempty");
        self.members[pos as usize] = last;
        self.position[last as usize] = pos;
        self.members.pop();
        self.position[bond as usize] = u32::MAX;
    }

    fn len(&self) -> usize {
        self.members.len()
    }
}

const STATUS_NONE: u8 = 0;
const STATUS_UNIT: u8 = 1;
const STATUS_Q: u8 = 2;

impl FastHalfline {
    pub fn new(
        window: usize,
        alpha: f64,
        q: f64,
        k: usize,
        l: usize,
    ) -> Result<Self, SystemsError> {
        if !(1..=l).contains(&k) || l > window {
            return Err(SystemsError::ParameterRange(format!(
                "need 1 <= k <= l <= window, got k={k} l={l} window={window}"
            )));
        }
        if alpha <= 0.0 || alpha > 1.0 || !(0.0..1.0).contains(&q) {
            return Err(SystemsError::ParameterRange(format!(
                "alpha = {alpha}, q = {q}"
            )));
        }
        Ok(FastHalfline {
            window,
            alpha,
            q,
            k,
            l,
        })
    }

    pub fn initial_labels(&self) -> Vec<u8> {
        let mut labels = vec![PH; self.window];
        for p in 0..self.k - 1 {
            labels[p] = SC;
        }
        labels[self.l - 1] = PK;
        labels
    }

    pub fn run(&self, t_max: f64, rng: &mut TrialRng) -> FastRun {
        let n = self.window;
        let bonds = n - 1;
        let mut labels = self.initial_labels();
        let mut status = vec![STATUS_NONE; bonds];
        let mut unit = BondSet::new(bonds);
        let mut qset = BondSet::new(bonds);
        let status_of = |labels: &[u8], i: usize| -> u8 {
            if labels[i] < labels[i + 1] {
                STATUS_UNIT
            } else if labels[i] > labels[i + 1] {
                STATUS_Q
            } else {
                STATUS_NONE
            }
        };
        for i in 0..bonds {
            let s = status_of(&labels, i);
            status[i] = s;
            match s {
                STATUS_UNIT => unit.insert(i as u32),
                STATUS_Q => qset.insert(i as u32),
                _ => {}
            }
        }
        let mut tracked_pos = self.l - 1;
        let mut tracked_negative = false;
        let mut ever_negative = false;
        let mut boundary_contact = false;
        let mut events = 0u64;
        let mut time = 0.0f64;
        loop {
            let b_rate = match labels[0] {
                PH | PK => self.alpha,
                NH | NK => self.q * (1.0 - self.alpha),
                _ => 0.0,
            };
            let total = unit.len() as f64 + self.q * qset.len() as f64 + b_rate;
            if total <= 0.0 {
                break;
            }
            let wait = -rng.gen::<f64>().ln() / total;
            time += wait;
            if time > t_max {
                break;
            }
            events += 1;
            let u = rng.gen::<f64>() * total;
            let n_unit = unit.len() as f64;
            let swapped_bond = if u < n_unit {
                Some(unit.members[(u as usize).min(unit.len() - 1)] as usize)
            } else if u < n_unit + self.q * qset.len() as f64 {
                let idx = (((u - n_unit) / self.q) as usize).min(qset.len() - 1);
                Some(qset.members[idx] as usize)
            } else {
                // boundary flip at position 1
                labels[0] = match labels[0] {
                    PH => NH,
                    PK => NK,
                    NH => PH,
                    NK => PK,
                    other => other,
                };
                if tracked_pos == 0 {
                    tracked_negative = !tracked_negative;
                    ever_negative |= tracked_negative;
                }
                None
            };
            if let Some(i) = swapped_bond {
                labels.swap(i, i + 1);
                if tracked_pos == i {
                    tracked_pos = i + 1;
                } else if tracked_pos == i + 1 {
                    tracked_pos = i;
                }
                if i == bonds - 1 {
                    boundary_contact = true;
                }
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(bonds - 1);
                for j in lo..=hi {
                    let s = status_of(&labels, j);
                    if s != status[j] {
                        match status[j] {
                            STATUS_UNIT => unit.remove(j as u32),
                            STATUS_Q => qset.remove(j as u32),
                            _ => {}
                        }
                        match s {
                            STATUS_UNIT => unit.insert(j as u32),
                            STATUS_Q => qset.insert(j as u32),
                            _ => {}
                        }
                        status[j] = s;
                    }
                }
            } else {
                // flip changed the occupant of position 1
                let s = status_of(&labels, 0);
                if s != status[0] {
                    match status[0] {
                        STATUS_UNIT => unit.remove(0),
                        STATUS_Q => qset.remove(0),
                        _ => {}
                    }
                    match s {
                        STATUS_UNIT => unit.insert(0),
                        STATUS_Q => qset.insert(0),
                        _ => {}
                    }
                    status[0] = s;
                }
            }
        }
        FastRun {
            labels,
            tracked_pos: tracked_pos + 1,
            tracked_negative,
            ever_negative,
            boundary_contact,
            events,
        }
    }
}
