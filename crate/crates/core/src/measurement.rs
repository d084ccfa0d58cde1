//! Single-shot projective measurements of sensor qubits and the batch
//! estimator that turns `m` binary outcomes back into a field value.
//!
//! A field value `f ∈ [0, π]` is read out with outcome probability
//! `p = (1 − cos f) / 2`; the estimator inverts that law on the observed
//! frequency of ones.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::Point2;

const FIELD_TOL: f64 = 1e-12;

/// Independent generator for one `(trial, stream)` cell of an experiment.
///
/// The ChaCha key is the master seed and trial index, the stream id selects
/// the sensor, so results never depend on the order in which cells are
/// consumed.
pub fn stream_rng(master_seed: u64, trial: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Probability of outcome 1 for field value `f`.
pub fn born_probability(f: f64) -> Result<f64> {
    if !(-FIELD_TOL..=PI + FIELD_TOL).contains(&f) {
        return Err(Error::Domain { value: f, lo: 0.0, hi: PI });
    }
    let f = f.clamp(0.0, PI);
    Ok(((1.0 - f.cos()) / 2.0).clamp(0.0, 1.0))
}

/// Number of ones in `m` independent Bernoulli(`p`) shots.
pub fn sample_shots<R: rand::Rng + ?Sized>(p: f64, m: u64, rng: &mut R) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument("shot count must be >= 1".into()));
    }
    let dist = Binomial::new(m, p).map_err(|e| Error::InvalidArgument(format!("p = {p}: {e}")))?;
    Ok(dist.sample(rng))
}

/// `arccos(1 − 2k/m)`, the inverse of [`born_probability`].
pub fn estimate_field(ones: u64, m: u64) -> Result<f64> {
    if m == 0 || ones > m {
        return Err(Error::InvalidArgument(format!("{ones} ones out of {m} shots")));
    }
    let z = (1.0 - 2.0 * ones as f64 / m as f64).clamp(-1.0, 1.0);
    Ok(z.acos().clamp(0.0, PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub sensor: Point2,
    pub shots: u64,
    pub ones: u64,
    pub estimate: f64,
}

impl MeasurementRecord {
    /// Simulates `shots` measurements of a sensor whose true value is `field_value`.
    pub fn simulate<R: rand::Rng + ?Sized>(sensor: Point2, field_value: f64, shots: u64, rng: &mut R) -> Result<Self> {
        let ones = sample_shots(born_probability(field_value)?, shots, rng)?;
        Ok(MeasurementRecord {
            sensor,
            shots,
            ones,
            estimate: estimate_field(ones, shots)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn born_law_examples() {
        assert_eq!(born_probability(0.0).unwrap(), 0.0);
        assert_eq!(born_probability(PI).unwrap(), 1.0);
        assert!((born_probability(FRAC_PI_2).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(born_probability(-5e-13).unwrap(), 0.0);
        assert!(born_probability(-1e-6).is_err());
        assert!(born_probability(PI + 1e-6).is_err());
    }

    #[test]
    fn born_law_is_increasing() {
        let v: Vec<f64> = (0..=1000).map(|i| born_probability(PI * i as f64 / 1000.0).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn shot_examples() {
        let mut rng = stream_rng(1, 0, 0);
        assert_eq!(sample_shots(0.0, 37, &mut rng).unwrap(), 0);
        assert_eq!(sample_shots(1.0, 37, &mut rng).unwrap(), 37);
        let k = sample_shots(0.5, 100_000, &mut rng).unwrap();
        assert!((k as f64 / 1e5 - 0.5).abs() < 0.01);
        assert!(sample_shots(0.5, 0, &mut rng).is_err());
        assert!(sample_shots(1.5, 10, &mut rng).is_err());
    }

    #[test]
    fn estimator_examples() {
        assert_eq!(estimate_field(0, 50).unwrap(), 0.0);
        assert_eq!(estimate_field(50, 50).unwrap(), PI);
        assert!((estimate_field(25, 50).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(estimate_field(51, 50).is_err());
    }

    #[test]
    fn exact_inverses() {
        for i in 0..=500 {
            let f = PI * i as f64 / 500.0;
            let p = born_probability(f).unwrap();
            let back = (1.0 - 2.0 * p).clamp(-1.0, 1.0).acos();
            // arccos loses digits next to the endpoints
            let tol = if f > 0.01 && f < PI - 0.01 { 1e-12 } else { 1e-7 };
            assert!((back - f).abs() < tol, "f={f}");
        }
        for m in [1u64, 7, 50, 1000] {
            for k in 0..=m {
                let f = estimate_field(k, m).unwrap();
                assert!((born_probability(f).unwrap() - k as f64 / m as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn records_are_deterministic() {
        let s = Point2 { x: 0.5, y: -0.5 };
        let a = MeasurementRecord::simulate(s, 1.2, 50, &mut stream_rng(9, 3, 4)).unwrap();
        let b = MeasurementRecord::simulate(s, 1.2, 50, &mut stream_rng(9, 3, 4)).unwrap();
        assert_eq!(a, b);
        assert!(a.ones <= a.shots);
        assert!((a.estimate - estimate_field(a.ones, a.shots).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn streams_are_distinct() {
        use rand::Rng;
        let draw = |t, s| stream_rng(5, t, s).random::<u64>();
        assert_ne!(draw(0, 0), draw(0, 1));
        assert_ne!(draw(0, 0), draw(1, 0));
        assert_ne!(stream_rng(5, 0, 0).random::<u64>(), stream_rng(6, 0, 0).random::<u64>());
    }
}
