//! Command-line frontend: algebra checks, Mallows sampling, particle
//! system simulation, and theory-vs-Monte-Carlo experiments.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num::{BigRational, One};
use serde::Deserialize;
use serde_json::json;

use heckewalk::coxeter::{enumerate_group, GroupElement};
use heckewalk::experiments::{
    self, estimate_exit, estimate_qtazrp_marginal, estimate_second_class_speed,
    estimate_survival, reports_to_csv, EstimateReport, ExitConfig, Pochhammer,
    QtazrpMarginalConfig, SpeedConfig, SurvivalConfig,
};
use heckewalk::hecke::{HeckeElement, HeckeElementJson};
use heckewalk::mallows::{sample_mallows, MallowsSpec};
use heckewalk::rngstream::trial_rng;
use heckewalk::systems::{
    make_asep_qm, make_halfline, make_masep, make_qtazrp, make_second_class_halfline,
    make_six_vertex, project_types, TimeMode,
};
use heckewalk::walks::run_continuous;
use heckewalk::CoxeterFamily;

#[derive(Parser)]
#[command(name = "heckewalk", about = "Random walks on Hecke algebras", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the algebra identities (quadratic, braid, associativity,
    /// involution anti-homomorphism), either on the built-in suite or on
    /// an element loaded from JSON.
    AlgebraCheck {
        /// JSON file with a serialized Hecke element to check.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Sample Mallows-distributed arrangements.
    SampleMallows {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Aggregate counts per arrangement to CSV instead of streaming
        /// one arrangement per line.
        #[arg(long)]
        histogram: bool,
    },
    /// Run a particle system and write one JSON object per trial.
    Simulate {
        #[arg(long, value_enum)]
        model: Model,
        /// Model-specific JSON configuration file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Write the vertex lattice of the first six-vertex trial as CSV.
        #[arg(long)]
        lattice_csv: Option<PathBuf>,
    },
    /// Monte Carlo experiment against a theory oracle; exits non-zero if
    /// any z-score leaves the bound.
    Experiment {
        #[arg(long, value_enum)]
        name: ExperimentName,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Largest acceptable |z-score|.
        #[arg(long, default_value_t = 4.0)]
        z_bound: f64,
    },
    /// Print a closed-form theory value.
    Theory {
        #[arg(long)]
        name: String,
        /// JSON object with the formula parameters.
        #[arg(long)]
        params: String,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Model {
    Masep,
    Halfline,
    SecondClass,
    SixVertex,
    AsepQm,
    Qtazrp,
}

#[derive(Copy, Clone, ValueEnum)]
enum ExperimentName {
    Exit,
    Survival,
    QtazrpMarginal,
    SecondClassSpeed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::AlgebraCheck { file } => algebra_check(file),
        Command::SampleMallows {
            n,
            q,
            trials,
            seed,
            histogram,
        } => {
            sample_mallows_cmd(n, q, trials, seed, histogram)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            model,
            config,
            t_max,
            trials,
            seed,
            out,
            lattice_csv,
        } => {
            simulate(model, &config, t_max, trials, seed, &out, lattice_csv.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment {
            name,
            config,
            out,
            z_bound,
        } => experiment(name, &config, &out, z_bound),
        Command::Theory { name, params } => {
            let value = theory_value(&name, &params)?;
            println!("{value:.12e}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Identity suite for one family at one q: quadratic and braid relations
/// on basis kernels, associativity and the involution anti-homomorphism
/// on sampled elements.
fn check_family(family: CoxeterFamily, q: &BigRational) -> Result<()> {
    let e = GroupElement::identity(family);
    let one = HeckeElement::one(family, q.clone());
    for s in family.generators() {
        let ts = HeckeElement::basis(e.apply_generator_left(s)?, q.clone());
        // T_s^2 = (1-q) T_s + q T_e
        let lhs = ts.mul(&ts)?;
        let rhs = ts.scale(&(BigRational::one() - q.clone())).add(&one.scale(q))?;
        if lhs != rhs {
            bail!("quadratic relation failed at generator {s}");
        }
        for t in family.generators() {
            if t <= s {
                continue;
            }
            let tt = HeckeElement::basis(e.apply_generator_left(t)?, q.clone());
            let m = family.coxeter_matrix(s, t);
            let mut left = one.clone();
            let mut right = one.clone();
            for i in 0..m {
                let (a, b) = if i % 2 == 0 { (&ts, &tt) } else { (&tt, &ts) };
                left = left.mul(a)?;
                right = right.mul(b)?;
            }
            if left != right {
                bail!("braid relation failed at generators {s},{t}");
            }
        }
    }
    // associativity and involution on random basis products
    let elems = enumerate_group(family)?;
    let mut rng = trial_rng(2024, 0);
    use rand::Rng;
    for _ in 0..20 {
        let pick = |rng: &mut heckewalk::rngstream::TrialRng| {
            HeckeElement::basis(elems[rng.gen_range(0..elems.len())].clone(), q.clone())
        };
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        if a.mul(&b)?.mul(&c)? != a.mul(&b.mul(&c)?)? {
            bail!("associativity failed");
        }
        if a.mul(&b)?.involution() != b.involution().mul(&a.involution())? {
            bail!("involution anti-homomorphism failed");
        }
    }
    Ok(())
}

fn algebra_check(file: Option<PathBuf>) -> Result<ExitCode> {
    if let Some(path) = file {
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        let wire: HeckeElementJson = serde_json::from_str(&text).context("parsing element")?;
        let element = HeckeElement::from_json(&wire)?;
        check_family(element.family(), element.q())?;
        let report = element.stochastic_report();
        println!(
            "element: family {:?} rank {} terms {}",
            element.family().family,
            element.family().rank,
            element.support_len()
        );
        println!(
            "stochastic: {} (coefficient sum {}, min coefficient {})",
            report.is_stochastic, report.coefficient_sum, report.min_coefficient
        );
        println!("identities: ok");
        return Ok(if report.is_stochastic {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        });
    }
    for family in [CoxeterFamily::type_a(4), CoxeterFamily::type_b(3)] {
        for (num, den) in [(0i64, 1i64), (1, 3), (1, 2), (1, 1)] {
            let q = BigRational::new(num.into(), den.into());
            check_family(family, &q)?;
            println!(
                "ok: {:?} rank {} at q = {}/{}",
                family.family, family.rank, num, den
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sample_mallows_cmd(n: usize, q: f64, trials: u64, seed: u64, histogram: bool) -> Result<()> {
    let spec = MallowsSpec::new(q, n)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if histogram {
        let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial);
            *counts.entry(sample_mallows(&spec, &mut rng)).or_default() += 1;
        }
        writeln!(out, "arrangement,count")?;
        for (word, count) in counts {
            let text: Vec<String> = word.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{},{}", text.join(" "), count)?;
        }
    } else {
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial);
            let word = sample_mallows(&spec, &mut rng);
            let text: Vec<String> = word.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", text.join(" "))?;
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct MasepConfig {
    n: usize,
    q: f64,
}

#[derive(Deserialize)]
struct HalflineConfig {
    n: usize,
    alpha: f64,
    q: f64,
}

#[derive(Deserialize)]
struct SecondClassConfig {
    n: usize,
    alpha: f64,
    q: f64,
    k: usize,
    l: usize,
}

#[derive(Deserialize)]
struct SixVertexConfig {
    a: usize,
    b: usize,
    rows: usize,
    x: f64,
    q: f64,
}

#[derive(Deserialize)]
struct AsepQmConfig {
    n_blocks: usize,
    m: usize,
    q: f64,
}

#[derive(Deserialize)]
struct QtazrpConfig {
    sites: usize,
    q: f64,
    second_class_site: Option<usize>,
}

fn simulate(
    model: Model,
    config: &PathBuf,
    t_max: f64,
    trials: u64,
    seed: u64,
    out: &PathBuf,
    lattice_csv: Option<&std::path::Path>,
) -> Result<()> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("reading {}", config.display()))?;
    let mut file = fs::File::create(out)?;
    match model {
        Model::Masep | Model::Halfline | Model::SecondClass | Model::AsepQm => {
            let spec = match model {
                Model::Masep => {
                    let cfg: MasepConfig = serde_json::from_str(&text)?;
                    make_masep(cfg.n, cfg.q, TimeMode::Continuous)?
                }
                Model::Halfline => {
                    let cfg: HalflineConfig = serde_json::from_str(&text)?;
                    make_halfline(cfg.n, cfg.alpha, cfg.q)?
                }
                Model::SecondClass => {
                    let cfg: SecondClassConfig = serde_json::from_str(&text)?;
                    make_second_class_halfline(cfg.n, cfg.alpha, cfg.q, cfg.k, cfg.l)?
                }
                Model::AsepQm => {
                    let cfg: AsepQmConfig = serde_json::from_str(&text)?;
                    make_asep_qm(cfg.n_blocks, cfg.m, cfg.q)?
                }
                _ => unreachable!(),
            };
            for trial in 0..trials {
                let mut rng = trial_rng(seed, trial);
                let state = run_continuous(
                    spec.initial.clone(),
                    &spec.kernels,
                    t_max,
                    &mut rng,
                    false,
                )?;
                let labels = spec
                    .type_map
                    .as_ref()
                    .map(|map| project_types(&state.current, map))
                    .transpose()?;
                let obj = json!({
                    "trial": trial,
                    "time": state.time,
                    "events": state.steps,
                    "images": state.current.images(),
                    "labels": labels,
                });
                writeln!(file, "{obj}")?;
            }
        }
        Model::SixVertex => {
            let cfg: SixVertexConfig = serde_json::from_str(&text)?;
            let system = make_six_vertex(cfg.a, cfg.b, cfg.rows, cfg.x, cfg.q)?;
            for trial in 0..trials {
                let mut rng = trial_rng(seed, trial);
                let (state, lattice) = system.run(&mut rng);
                if trial == 0 {
                    if let Some(path) = lattice_csv {
                        fs::write(path, lattice.to_csv())?;
                    }
                }
                let obj = json!({
                    "trial": trial,
                    "images": state.images(),
                    "lattice": lattice,
                });
                writeln!(file, "{obj}")?;
            }
        }
        Model::Qtazrp => {
            let cfg: QtazrpConfig = serde_json::from_str(&text)?;
            let system = make_qtazrp(cfg.sites, cfg.q, cfg.second_class_site)?;
            for trial in 0..trials {
                let mut rng = trial_rng(seed, trial);
                let run = system.run(t_max, &mut rng);
                let obj = json!({
                    "trial": trial,
                    "events": run.events,
                    "counts": run.config.counts,
                    "second_class": run.config.second_class,
                    "boundary_contact": run.boundary_contact,
                });
                writeln!(file, "{obj}")?;
            }
        }
    }
    Ok(())
}

fn experiment(
    name: ExperimentName,
    config: &PathBuf,
    out: &PathBuf,
    z_bound: f64,
) -> Result<ExitCode> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("reading {}", config.display()))?;
    let reports: Vec<EstimateReport> = match name {
        ExperimentName::Exit => {
            let cfg: ExitConfig = serde_json::from_str(&text)?;
            vec![estimate_exit(&cfg)?]
        }
        ExperimentName::Survival => {
            let cfg: SurvivalConfig = serde_json::from_str(&text)?;
            vec![estimate_survival(&cfg)?]
        }
        ExperimentName::QtazrpMarginal => {
            let cfg: QtazrpMarginalConfig = serde_json::from_str(&text)?;
            estimate_qtazrp_marginal(&cfg)?.per_l
        }
        ExperimentName::SecondClassSpeed => {
            let cfg: SpeedConfig = serde_json::from_str(&text)?;
            estimate_second_class_speed(&cfg)?.per_alpha
        }
    };
    fs::write(out, reports_to_csv(&reports))?;
    let worst = reports
        .iter()
        .map(|r| r.zscore.abs())
        .fold(0.0f64, f64::max);
    println!("reports: {}  worst |z|: {worst:.3}", reports.len());
    Ok(if worst <= z_bound {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn theory_value(name: &str, params: &str) -> Result<f64> {
    let p: serde_json::Value = serde_json::from_str(params).context("parsing --params JSON")?;
    let get_f = |key: &str| -> Result<f64> {
        p.get(key)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| anyhow!("missing numeric parameter '{key}'"))
    };
    let get_u = |key: &str| -> Result<usize> {
        p.get(key)
            .and_then(|v| v.as_u64())
            .map(|v| v as usize)
            .ok_or_else(|| anyhow!("missing integer parameter '{key}'"))
    };
    Ok(match name {
        "q-pochhammer" => {
            let n = match p.get("n") {
                Some(v) if v.as_str() == Some("infinity") => Pochhammer::Infinite,
                Some(v) => Pochhammer::Finite(
                    v.as_u64().ok_or_else(|| anyhow!("bad 'n'"))? as usize,
                ),
                None => Pochhammer::Infinite,
            };
            experiments::q_pochhammer(get_f("a")?, get_f("q")?, n)?
        }
        "rho-alpha" => experiments::rho_alpha(get_u("z")?, get_f("alpha")?)?,
        "block-occupancy" => {
            experiments::block_occupancy_theory(get_u("z")?, get_u("m")?, get_f("alpha")?)?
        }
        "exit" => experiments::exit_probability_theory(get_u("k")?, get_u("l")?, get_f("alpha")?)?,
        "survival" => experiments::survival_theory(
            get_u("k")?,
            get_u("l")?,
            get_f("alpha")?,
            get_f("q")?,
        )?,
        "kappa" => experiments::kappa(get_f("alpha")?, get_f("q")?)?,
        "alpha-of-kappa" => experiments::alpha_of_kappa(get_f("kappa")?, get_f("q")?)?,
        "qtazrp-marginal" => {
            experiments::qtazrp_marginal_theory(get_u("l")?, get_f("alpha")?, get_f("q")?)?
        }
        "speed-cdf" => {
            experiments::second_class_speed_cdf_theory(get_u("s")?, get_f("alpha")?)?
        }
        other => bail!("unknown theory oracle '{other}'"),
    })
}
