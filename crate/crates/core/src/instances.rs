//! Named reward tables used by the experiments and tests.

use rand::Rng;
use thiserror::Error;

use crate::env::{ArmCurve, EnvError, RewardTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("delays are not dense: sum of 1/d_i is {0}")]
    NotDense(f64),
    #[error(transparent)]
    Table(#[from] EnvError),
}

/// Arm 0 pays `eps` on consecutive pulls and 1 otherwise, arm 1 pays
/// nothing. Greedy keeps pulling arm 0 while alternating earns 1/2 a step.
pub fn anti_kleinberg(eps: f64) -> Result<RewardTable, InstanceError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(InstanceError::Parameter(format!(
            "eps = {eps} must lie in (0, 1)"
        )));
    }
    Ok(RewardTable::from_fn(2, 1, |a, tau| match (a, tau > 0) {
        (0, true) => 1.0,
        (0, false) => eps,
        _ => 0.0,
    })?)
}

/// `mu_i(tau) = 1{tau >= K-1}` for `K` arms. The best cycle
/// `[0..K, 0..K-1]` averages `K / (2K - 1)`.
pub fn tight(k: usize) -> Result<RewardTable, InstanceError> {
    if k < 2 {
        return Err(InstanceError::Parameter(format!(
            "K = {k} must be at least 2"
        )));
    }
    let threshold = k as i64 - 1;
    Ok(RewardTable::from_fn(k, (k - 1).max(1), |_, tau| {
        if tau >= threshold {
            1.0
        } else {
            0.0
        }
    })?)
}

/// Five arms with delay-indexed means: arm 0 spikes to 0.95 exactly three
/// steps after its previous pull, arm 1 pays 0.96 after a rest of nine steps,
/// 0.16 at delay six and 0.14 otherwise, arms 2..5 pay 0.15.
pub fn sec4() -> RewardTable {
    RewardTable::from_delay_fn(5, 9, |a, delay| match a {
        0 => {
            if delay == 3 {
                0.95
            } else {
                0.0
            }
        }
        1 => match delay {
            6 => 0.16,
            d if d >= 9 => 0.96,
            _ => 0.14,
        },
        _ => 0.15,
    })
    .expect("valid table")
}

/// Two arms: arm 0 pays 0.06 on consecutive pulls and 0.95 otherwise, arm 1
/// pays 0.05.
pub fn appendix_c() -> RewardTable {
    RewardTable::from_delay_fn(2, 2, |a, delay| match (a, delay) {
        (0, 1) => 0.06,
        (0, _) => 0.95,
        _ => 0.05,
    })
    .expect("valid table")
}

/// Threshold arms `1{delay >= d_i}` plus a zero arm. With `dense_check`,
/// the delays must satisfy `sum 1/d_i = 1` within 1e-12.
pub fn pinwheel(delays: &[usize], dense_check: bool) -> Result<RewardTable, InstanceError> {
    if delays.is_empty() || delays.contains(&0) {
        return Err(InstanceError::Parameter(
            "delays must be positive and non-empty".into(),
        ));
    }
    let density: f64 = delays.iter().map(|&d| 1.0 / d as f64).sum();
    if dense_check && (density - 1.0).abs() > 1e-12 {
        return Err(InstanceError::NotDense(density));
    }
    let max_delay = *delays.iter().max().unwrap();
    Ok(RewardTable::from_delay_fn(
        delays.len() + 1,
        max_delay.max(2),
        |a, delay| match delays.get(a) {
            Some(&d) if delay >= d => 1.0,
            _ => 0.0,
        },
    )?)
}

/// Uniform random table. The negative side is constant when
/// `constant_negative`, otherwise nonincreasing outward from -1.
pub fn random(
    rng: &mut impl Rng,
    arms: usize,
    tau_max: usize,
    constant_negative: bool,
) -> RewardTable {
    let curves = (0..arms)
        .map(|_| {
            let values_pos: Vec<f64> = (0..tau_max).map(|_| rng.gen::<f64>()).collect();
            let first: f64 = rng.gen();
            let mut values_neg = vec![first; tau_max];
            if !constant_negative {
                for j in 1..tau_max {
                    values_neg[j] = values_neg[j - 1] * rng.gen::<f64>();
                }
            }
            ArmCurve {
                values_neg,
                values_pos,
            }
        })
        .collect();
    RewardTable::new(tau_max, curves).expect("generated values are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{cyclic_average, Block};

    #[test]
    fn sec4_values() {
        let t = sec4();
        assert_eq!(t.mean(1, 8), 0.96);
        assert_eq!(t.mean(1, 5), 0.16);
        assert_eq!(t.mean(1, 1), 0.14);
        assert_eq!(t.mean(0, 2), 0.95);
        assert_eq!(t.mean(0, -4), 0.0);
        assert!(t.constant_negative());
    }

    #[test]
    fn appendix_c_values() {
        let t = appendix_c();
        assert_eq!(t.mean(0, -1), 0.06);
        assert_eq!(t.mean(0, 1), 0.95);
        assert_eq!(t.mean(1, 3), 0.05);
    }

    #[test]
    fn pinwheel_density() {
        let t = pinwheel(&[2, 4, 4], true).unwrap();
        assert_eq!(t.arms(), 4);
        let b = Block::new(vec![0, 1, 0, 2], 4).unwrap();
        assert!((cyclic_average(&b, &t) - 1.0).abs() < 1e-12);
        assert!(matches!(
            pinwheel(&[2, 3], true),
            Err(InstanceError::NotDense(_))
        ));
        assert!(pinwheel(&[2, 3], false).is_ok());
        let t3 = pinwheel(&[3, 3, 3], true).unwrap();
        assert!((cyclic_average(&Block::new(vec![0, 1, 2], 4).unwrap(), &t3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_tables_are_valid() {
        let mut rng = crate::rng::seeded_rng(4);
        for _ in 0..20 {
            assert!(random(&mut rng, 3, 4, true).constant_negative());
            let t = random(&mut rng, 3, 4, false);
            for a in 0..3 {
                assert!(t.mean(a, -3) <= t.mean(a, -2) && t.mean(a, -2) <= t.mean(a, -1));
            }
        }
    }

    #[test]
    fn parameter_ranges() {
        assert!(anti_kleinberg(0.0).is_err());
        assert!(anti_kleinberg(1.0).is_err());
        assert!(tight(1).is_err());
        assert!(anti_kleinberg(0.3).unwrap().constant_negative());
        assert!(tight(3).unwrap().constant_negative());
    }
}
