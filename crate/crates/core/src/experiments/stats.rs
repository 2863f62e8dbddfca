//! Small statistical helpers shared by sampler tests and estimators.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper-tail p-value of a chi-square statistic with `df` degrees of
/// freedom.
pub fn chi_square_p_value(stat: f64, df: f64) -> f64 {
    if df <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}

/// Pearson chi-square statistic for observed counts against expected
/// counts. Cells with expected count zero must have zero observations.
pub fn chi_square_stat(observed: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            if e == 0.0 {
                assert_eq!(o, 0.0, "observation in a zero-probability cell");
                0.0
            } else {
                (o - e).powi(2) / e
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_reference_points() {
        // chi-square with 1 df: P(X > 3.841) ~ 0.05
        assert!((chi_square_p_value(3.841, 1.0) - 0.05).abs() < 1e-3);
        // stat 0 has p-value 1
        assert!((chi_square_p_value(0.0, 5.0) - 1.0).abs() < 1e-12);
        // large stat has tiny p-value
        assert!(chi_square_p_value(100.0, 3.0) < 1e-10);
    }

    #[test]
    fn stat_matches_hand_computation() {
        let stat = chi_square_stat(&[12.0, 8.0], &[10.0, 10.0]);
        assert!((stat - 0.8).abs() < 1e-12);
    }
}
