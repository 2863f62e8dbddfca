//! q-TAZRP: totally asymmetric zero range process with q-deformed rates.
//!
//! Site `i` holding `l` first-class particles fires one of them to the
//! right at rate `1 - q^l`; a second-class particle sharing the site
//! jumps right at rate `q^l (1 - q)`; a reservoir left of site 0 feeds it
//! at rate 1 (the `l = infinity` rate). Event selection uses a Fenwick
//! tree over per-site rates so local rate updates stay logarithmic.

use rand::Rng;

use super::SystemsError;
use crate::rngstream::TrialRng;

/// Particle counts per site plus the optional second-class location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyConfig {
    pub counts: Vec<u64>,
    pub second_class: Option<usize>,
}

impl OccupancyConfig {
    pub fn empty(sites: usize) -> Self {
        OccupancyConfig {
            counts: vec![0; sites],
            second_class: None,
        }
    }

    pub fn total_particles(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Binary indexed tree over nonnegative site rates.
#[derive(Debug, Clone)]
struct Fenwick {
    tree: Vec<f64>,
    values: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            tree: vec![0.0; n + 1],
            values: vec![0.0; n],
        }
    }

    /// Returns the change in the total rate.
    fn set(&mut self, i: usize, value: f64) -> f64 {
        let delta = value - self.values[i];
        self.values[i] = value;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
        delta
    }

    fn total(&self) -> f64 {
        let mut sum = 0.0;
        let mut j = self.tree.len() - 1;
        while j > 0 {
            sum += self.tree[j];
            j -= j & j.wrapping_neg();
        }
        sum
    }

    /// Largest prefix with cumulative rate below `target`; returns the
    /// first index whose cumulative range contains `target`.
    fn find(&self, mut target: f64) -> usize {
        let n = self.values.len();
        let mut pos = 0usize;
        let mut mask = (self.tree.len() - 1).next_power_of_two();
        while mask > 0 {
            let next = pos + mask;
            if next < self.tree.len() && self.tree[next] < target {
                target -= self.tree[next];
                pos = next;
            }
            mask >>= 1;
        }
        pos.min(n - 1)
    }
}

/// A q-TAZRP instance: finite tracked window with a reservoir at the
/// left edge; particles leaving the last site exit the window.
#[derive(Debug, Clone)]
pub struct QtazrpSystem {
    pub sites: usize,
    pub q: f64,
    pub initial: OccupancyConfig,
    pub reservoir: bool,
}

/// Step initial data: all tracked sites empty, reservoir on, optionally
/// one second-class particle at `second_class_site`.
pub fn make_qtazrp(
    sites: usize,
    q: f64,
    second_class_site: Option<usize>,
) -> Result<QtazrpSystem, SystemsError> {
    if sites == 0 {
        return Err(SystemsError::ParameterRange("need at least one site".into()));
    }
    if !(0.0..1.0).contains(&q) {
        return Err(SystemsError::ParameterRange(format!("q = {q}")));
    }
    if let Some(s) = second_class_site {
        if s >= sites {
            return Err(SystemsError::ParameterRange(format!(
                "second-class site {s} outside the {sites}-site window"
            )));
        }
    }
    let mut initial = OccupancyConfig::empty(sites);
    initial.second_class = second_class_site;
    Ok(QtazrpSystem {
        sites,
        q,
        initial,
        reservoir: true,
    })
}

/// Outcome of one trajectory.
#[derive(Debug, Clone)]
pub struct QtazrpRun {
    pub config: OccupancyConfig,
    pub events: u64,
    /// The second-class particle reached the last tracked site: the
    /// window was too small and the trial should be discarded.
    pub boundary_contact: bool,
}

/// Powers of `q` cached up to a cap; larger exponents fall back to
/// `powi` (they are vanishingly rare).
struct PowerTable {
    q: f64,
    table: Vec<f64>,
}

impl PowerTable {
    fn new(q: f64) -> Self {
        let mut table = Vec::with_capacity(256);
        let mut p = 1.0;
        for _ in 0..256 {
            table.push(p);
            p *= q;
        }
        PowerTable { q, table }
    }

    #[inline]
    fn pow(&self, l: u64) -> f64 {
        match self.table.get(l as usize) {
            Some(&p) => p,
            None => self.q.powi(l as i32),
        }
    }
}

impl QtazrpSystem {
    #[cfg(test)]
    fn site_rate(&self, config: &OccupancyConfig, i: usize) -> f64 {
        let powers = PowerTable::new(self.q);
        self.site_rate_with(&powers, config, i)
    }

    #[inline]
    fn site_rate_with(&self, powers: &PowerTable, config: &OccupancyConfig, i: usize) -> f64 {
        let ql = powers.pow(config.counts[i]);
        let mut rate = 1.0 - ql;
        if config.second_class == Some(i) {
            rate += ql * (1.0 - self.q);
        }
        rate
    }

    /// Run the chain for time `t_max` from the initial configuration.
    pub fn run(&self, t_max: f64, rng: &mut TrialRng) -> QtazrpRun {
        let mut config = self.initial.clone();
        let n = self.sites;
        let powers = PowerTable::new(self.q);
        let mut fenwick = Fenwick::new(n);
        for i in 0..n {
            fenwick.set(i, self.site_rate_with(&powers, &config, i));
        }
        let reservoir_rate = if self.reservoir { 1.0 } else { 0.0 };
        // maintained incrementally; resynced periodically to cancel
        // floating-point drift
        let mut site_total = fenwick.total();
        let mut time = 0.0;
        let mut events = 0u64;
        let mut boundary_contact = config.second_class == Some(n - 1) && n > 1;
        loop {
            if events % 4096 == 0 {
                site_total = fenwick.total();
            }
            let total = site_total + reservoir_rate;
            if total <= 0.0 {
                break;
            }
            let wait = -rng.gen::<f64>().ln() / total;
            if time + wait > t_max {
                break;
            }
            time += wait;
            events += 1;
            let pick = rng.gen::<f64>() * total;
            if pick < reservoir_rate {
                config.counts[0] += 1;
                site_total += fenwick.set(0, self.site_rate_with(&powers, &config, 0));
                continue;
            }
            let i = fenwick.find((pick - reservoir_rate).min(site_total));
            let l = config.counts[i];
            // split the site rate between a first-class jump and the
            // second-class jump
            let first_rate = 1.0 - powers.pow(l);
            let within = rng.gen::<f64>() * fenwick.values[i];
            if within < first_rate && l > 0 {
                config.counts[i] -= 1;
                if i + 1 < n {
                    config.counts[i + 1] += 1;
                    site_total += fenwick.set(i + 1, self.site_rate_with(&powers, &config, i + 1));
                }
                site_total += fenwick.set(i, self.site_rate_with(&powers, &config, i));
            } else if config.second_class == Some(i) {
                if i + 1 < n {
                    config.second_class = Some(i + 1);
                    if i + 1 == n - 1 {
                        boundary_contact = true;
                    }
                    site_total += fenwick.set(i + 1, self.site_rate_with(&powers, &config, i + 1));
                } else {
                    boundary_contact = true;
                }
                site_total += fenwick.set(i, self.site_rate_with(&powers, &config, i));
            }
        }
        QtazrpRun {
            config,
            events,
            boundary_contact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rngstream::trial_rng;
    use std::collections::BTreeMap;

    #[test]
    fn fenwick_basic() {
        let mut f = Fenwick::new(5);
        f.set(0, 0.5);
        f.set(3, 2.0);
        f.set(4, 1.0);
        assert!((f.total() - 3.5).abs() < 1e-12);
        assert_eq!(f.find(0.25), 0);
        assert_eq!(f.find(0.75), 3);
        assert_eq!(f.find(2.4), 3);
        assert_eq!(f.find(2.6), 4);
        f.set(3, 0.0);
        assert!((f.total() - 1.5).abs() < 1e-12);
        assert_eq!(f.find(1.0), 4);
    }

    #[test]
    fn rate_identities() {
        let sys = make_qtazrp(3, 0.5, Some(1)).unwrap();
        // empty site fires at rate 0
        let mut cfg = OccupancyConfig::empty(3);
        cfg.second_class = Some(1);
        assert_eq!(sys.site_rate(&cfg, 0), 0.0);
        // site with only the second-class particle: q^0 (1-q) = 1-q
        assert!((sys.site_rate(&cfg, 1) - 0.5).abs() < 1e-12);
        // l first-class + second-class: total 1 - q^{l+1}
        for l in 0..6u64 {
            let mut cfg = OccupancyConfig::empty(3);
            cfg.counts[1] = l;
            cfg.second_class = Some(1);
            let expect = 1.0 - 0.5f64.powi(l as i32 + 1);
            assert!((sys.site_rate(&cfg, 1) - expect).abs() < 1e-12, "l={l}");
        }
    }

    #[test]
    fn reservoir_feeds_poisson() {
        // q -> counts frozen at site 0 if its outflow is suppressed:
        // with one site, particles only accumulate at rate 1
        let mut sys = make_qtazrp(1, 0.5, None).unwrap();
        sys.reservoir = true;
        let t = 50.0;
        let trials = 2_000;
        let mut total = 0u64;
        for i in 0..trials {
            let mut rng = trial_rng(60, i);
            let run = sys.run(t, &mut rng);
            // single tracked site: inflow Poisson(t), outflow exits
            total += run.events;
        }
        // events = injections + jumps out of site 0; injections are
        // Poisson(t) and all but the slowly growing queue jump out, so
        // events/trial sits slightly below 2t
        let mean = total as f64 / trials as f64;
        assert!(mean > 2.0 * t - 25.0 && mean < 2.0 * t + 5.0, "mean={mean}");
    }

    #[test]
    fn lone_second_class_moves_at_rate_one_minus_q() {
        let q = 0.3;
        let mut sys = make_qtazrp(400, q, Some(0)).unwrap();
        sys.reservoir = false;
        let t = 100.0;
        let trials = 4_000u64;
        let mut total = 0u64;
        for i in 0..trials {
            let mut rng = trial_rng(61, i);
            let run = sys.run(t, &mut rng);
            assert!(!run.boundary_contact);
            total += run.config.second_class.unwrap() as u64;
        }
        let mean = total as f64 / trials as f64;
        let expect = (1.0 - q) * t;
        let sigma = (expect / trials as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * sigma, "mean={mean}");
    }

    /// Merging the second-class particle into first class must give the
    /// ordinary q-TAZRP law for the total occupancy vector.
    #[test]
    fn class_merge_consistency() {
        let q = 0.4;
        let t = 2.0;
        let trials = 40_000u64;
        let merged_counts = |counts: &[u64], sc: Option<usize>| -> Vec<u64> {
            let mut v = counts.to_vec();
            if let Some(s) = sc {
                v[s] += 1;
            }
            v
        };
        // A: two first-class particles at site 0, no reservoir
        let mut sys_a = make_qtazrp(6, q, None).unwrap();
        sys_a.reservoir = false;
        sys_a.initial.counts[0] = 2;
        // B: one first-class + the second-class particle at site 0
        let mut sys_b = make_qtazrp(6, q, Some(0)).unwrap();
        sys_b.reservoir = false;
        sys_b.initial.counts[0] = 1;
        let mut hist_a: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        let mut hist_b: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for i in 0..trials {
            let mut rng = trial_rng(62, i);
            let run = sys_a.run(t, &mut rng);
            *hist_a.entry(run.config.counts).or_default() += 1.0;
            let mut rng = trial_rng(63, i);
            let run = sys_b.run(t, &mut rng);
            *hist_b
                .entry(merged_counts(&run.config.counts, run.config.second_class))
                .or_default() += 1.0;
        }
        // two-sample chi-square over the joint occupancy vectors
        let mut stat = 0.0;
        let mut cells = 0usize;
        let keys: Vec<_> = hist_a.keys().chain(hist_b.keys()).cloned().collect();
        let mut seen = std::collections::BTreeSet::new();
        for k in keys {
            if !seen.insert(k.clone()) {
                continue;
            }
            let a = hist_a.get(&k).copied().unwrap_or(0.0);
            let b = hist_b.get(&k).copied().unwrap_or(0.0);
            if a + b < 10.0 {
                continue;
            }
            stat += (a - b).powi(2) / (a + b);
            cells += 1;
        }
        let p = crate::experiments::chi_square_p_value(stat, (cells - 1) as f64);
        assert!(p > 1e-4, "p={p} stat={stat} cells={cells}");
    }

    #[test]
    fn boundary_contact_flagged() {
        let sys = make_qtazrp(3, 0.0, Some(0)).unwrap();
        let mut rng = trial_rng(64, 0);
        // q=0: the lone second-class particle moves at rate 1; by t=100
        // it has hit the window edge with overwhelming probability
        let run = sys.run(100.0, &mut rng);
        assert!(run.boundary_contact);
    }

    #[test]
    fn parameter_validation() {
        assert!(make_qtazrp(0, 0.5, None).is_err());
        assert!(make_qtazrp(3, 1.0, None).is_err());
        assert!(make_qtazrp(3, 0.5, Some(5)).is_err());
    }
}
