//! Theory oracles, Monte Carlo estimators, and reporting.

mod estimators;
mod report;
mod stats;
mod theory;

pub use estimators::{
    estimate_exit, estimate_qtazrp_marginal, estimate_second_class_speed, estimate_survival,
    EstimatorError, ExitConfig, QtazrpMarginalConfig, QtazrpMarginalReport, SpeedConfig,
    SpeedReport, SurvivalConfig,
};
pub use report::{reports_to_csv, EstimateReport, ReportError, CSV_HEADER};
pub use stats::{chi_square_p_value, chi_square_stat};
pub use theory::{
    alpha_of_kappa, block_occupancy_theory, exit_probability_theory, kappa, q_pochhammer,
    qtazrp_marginal_theory, rho_alpha, second_class_speed_cdf_theory, survival_theory, Pochhammer,
    TheoryError,
};
