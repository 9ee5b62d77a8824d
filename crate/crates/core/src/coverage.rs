//! Probabilistic air-to-ground path loss and the outage-constrained coverage
//! radius.
//!
//! Total loss is free-space loss plus an excess term. Each channel draw picks a
//! line-of-sight or non-line-of-sight group from an elevation-dependent
//! probability, then draws a Gaussian excess loss whose spread shrinks as the
//! elevation angle rises. Elevation angles are in degrees throughout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{non_negative, positive, ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEnvironment {
    /// Carrier frequency, MHz.
    pub frequency: f64,
    /// Mean excess loss of the LoS group, dB.
    pub mean_los: f64,
    /// Mean excess loss of the NLoS group, dB.
    pub mean_nlos: f64,
    pub sigma_scale_los: f64,
    pub sigma_scale_nlos: f64,
    /// Per degree.
    pub sigma_decay_los: f64,
    pub sigma_decay_nlos: f64,
    pub los_coeff: f64,
    pub los_exp: f64,
    /// Elevation below which LoS is impossible, degrees.
    pub theta0: f64,
}

impl ChannelEnvironment {
    /// Urban environment at 2 GHz.
    pub fn urban_2000mhz() -> Self {
        Self {
            frequency: 2000.0,
            mean_los: 1.0,
            mean_nlos: 20.0,
            sigma_scale_los: 10.39,
            sigma_scale_nlos: 29.6,
            sigma_decay_los: 0.05,
            sigma_decay_nlos: 0.03,
            los_coeff: 0.6,
            los_exp: 0.11,
            theta0: 15.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("env.frequency", self.frequency)?;
        positive("env.sigma_scale_los", self.sigma_scale_los)?;
        positive("env.sigma_scale_nlos", self.sigma_scale_nlos)?;
        non_negative("env.sigma_decay_los", self.sigma_decay_los)?;
        non_negative("env.sigma_decay_nlos", self.sigma_decay_nlos)?;
        non_negative("env.los_coeff", self.los_coeff)?;
        non_negative("env.los_exp", self.los_exp)?;
        non_negative("env.theta0", self.theta0)?;
        if self.theta0 >= 90.0 {
            return Err(ModelError::Domain {
                param: "env.theta0",
                value: self.theta0,
                reason: "must be below 90 degrees",
            });
        }
        let peak = self.los_coeff * (90.0 - self.theta0).powf(self.los_exp);
        if peak > 1.0 {
            return Err(ModelError::Domain {
                param: "env.los_coeff",
                value: self.los_coeff,
                reason: "LoS probability at 90 degrees exceeds 1",
            });
        }
        finite_means(self)
    }

    pub fn sigma(&self, group: PropagationGroup, theta: f64) -> f64 {
        match group {
            PropagationGroup::Los => self.sigma_scale_los * (-self.sigma_decay_los * theta).exp(),
            PropagationGroup::Nlos => self.sigma_scale_nlos * (-self.sigma_decay_nlos * theta).exp(),
        }
    }

    pub fn mean(&self, group: PropagationGroup) -> f64 {
        match group {
            PropagationGroup::Los => self.mean_los,
            PropagationGroup::Nlos => self.mean_nlos,
        }
    }
}

fn finite_means(env: &ChannelEnvironment) -> Result<()> {
    crate::error::finite("env.mean_los", env.mean_los)?;
    crate::error::finite("env.mean_nlos", env.mean_nlos)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationGroup {
    Los,
    Nlos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Platform altitude, m.
    pub altitude: f64,
    /// Horizontal distance to the ground user, m.
    pub ground_range: f64,
}

impl LinkGeometry {
    pub fn new(altitude: f64, ground_range: f64) -> Self {
        Self {
            altitude,
            ground_range,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("altitude", self.altitude)?;
        non_negative("ground_range", self.ground_range)?;
        Ok(())
    }

    pub fn slant_distance(&self) -> f64 {
        self.altitude.hypot(self.ground_range)
    }

    /// Elevation of the platform seen from the user, degrees in (0, 90].
    pub fn elevation(&self) -> f64 {
        self.altitude.atan2(self.ground_range).to_degrees()
    }
}

/// Free-space loss in dB for a distance in metres and frequency in MHz.
pub fn fspl_db(distance: f64, frequency: f64) -> f64 {
    20.0 * distance.log10() + 20.0 * frequency.log10() - 27.55
}

pub fn free_space_path_loss(geom: &LinkGeometry, frequency: f64) -> Result<f64> {
    let d = positive("slant_distance", geom.slant_distance())?;
    positive("frequency", frequency)?;
    Ok(fspl_db(d, frequency))
}

/// Probability of a line-of-sight link at elevation `theta` degrees.
pub fn los_probability(env: &ChannelEnvironment, theta: f64) -> f64 {
    if theta <= env.theta0 {
        return 0.0;
    }
    (env.los_coeff * (theta - env.theta0).powf(env.los_exp)).clamp(0.0, 1.0)
}

/// Expected excess loss at elevation `theta`, dB.
pub fn mean_excess_path_loss(env: &ChannelEnvironment, theta: f64) -> f64 {
    let p = los_probability(env, theta);
    env.mean_los * p + env.mean_nlos * (1.0 - p)
}

/// One random excess-loss draw, dB. May be negative.
pub fn excess_loss_sample<R: Rng + ?Sized>(env: &ChannelEnvironment, theta: f64, rng: &mut R) -> f64 {
    let group = if rng.random::<f64>() < los_probability(env, theta) {
        PropagationGroup::Los
    } else {
        PropagationGroup::Nlos
    };
    let z: f64 = rng.sample(StandardNormal);
    env.mean(group) + env.sigma(group, theta) * z
}

/// Received power in dBm after free-space and excess loss.
pub fn received_power(
    tx_power_dbm: f64,
    geom: &LinkGeometry,
    env: &ChannelEnvironment,
    excess_db: f64,
) -> Result<f64> {
    geom.validate()?;
    Ok(tx_power_dbm - free_space_path_loss(geom, env.frequency)? - excess_db)
}

/// Controls of the Monte Carlo radius search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageSearch {
    /// Fraction of draws that must clear the sensitivity, e.g. 0.99.
    pub reliability: f64,
    pub samples: usize,
    pub seed: u64,
    /// m
    pub radius_step: f64,
}

impl Default for CoverageSearch {
    fn default() -> Self {
        Self {
            reliability: 0.99,
            samples: 10_000,
            seed: 42,
            radius_step: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageResult {
    /// m
    pub radius: f64,
    pub outage_at_radius: f64,
    pub samples_per_point: usize,
    pub seed: u64,
    /// Set when no radius met the reliability target.
    pub diagnostic: Option<String>,
}

impl CoverageResult {
    pub fn has_coverage(&self) -> bool {
        self.diagnostic.is_none()
    }
}

/// Fraction of draws at one ground range whose received power clears
/// `rx_sensitivity`. Draws come from the ChaCha substream `stream` of `seed`.
pub fn empirical_reliability(
    tx_power_dbm: f64,
    rx_sensitivity: f64,
    geom: &LinkGeometry,
    env: &ChannelEnvironment,
    samples: usize,
    seed: u64,
    stream: u64,
) -> Result<f64> {
    let theta = geom.elevation();
    // excess loss must stay below this for the link to close
    let budget = received_power(tx_power_dbm, geom, env, 0.0)? - rx_sensitivity;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let ok = (0..samples)
        .filter(|_| budget - excess_loss_sample(env, theta, &mut rng) > 0.0)
        .count();
    Ok(ok as f64 / samples as f64)
}

/// Largest ground range at which the received power exceeds `rx_sensitivity`
/// in more than `search.reliability` of the draws.
///
/// Ranges are scanned on a `radius_step` grid from directly below the
/// platform out to where the elevation reaches `theta0`. Grid point `i` uses
/// substream `i`, so the result does not depend on evaluation order.
pub fn coverage_radius(
    tx_power_dbm: f64,
    rx_sensitivity: f64,
    altitude: f64,
    env: &ChannelEnvironment,
    search: &CoverageSearch,
) -> Result<CoverageResult> {
    env.validate()?;
    positive("altitude", altitude)?;
    positive("radius_step", search.radius_step)?;
    crate::error::finite("tx_power_dbm", tx_power_dbm)?;
    if rx_sensitivity.is_nan() {
        return Err(ModelError::Domain {
            param: "rx_sensitivity",
            value: rx_sensitivity,
            reason: "must not be NaN",
        });
    }
    if !(search.reliability > 0.0 && search.reliability < 1.0) {
        return Err(ModelError::Domain {
            param: "reliability",
            value: search.reliability,
            reason: "must lie strictly between 0 and 1",
        });
    }
    if search.samples == 0 {
        return Err(ModelError::Domain {
            param: "samples",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    if env.theta0 <= 0.0 {
        return Err(ModelError::Domain {
            param: "env.theta0",
            value: env.theta0,
            reason: "must be positive to bound the radius scan",
        });
    }

    let max_range = altitude / env.theta0.to_radians().tan();
    let points = (max_range / search.radius_step).floor() as u64;
    let reliabilities = (0..=points)
        .into_par_iter()
        .map(|i| {
            let geom = LinkGeometry::new(altitude, i as f64 * search.radius_step);
            empirical_reliability(tx_power_dbm, rx_sensitivity, &geom, env, search.samples, search.seed, i)
        })
        .collect::<Result<Vec<f64>>>()?;

    let best = reliabilities
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &r)| r > search.reliability);
    Ok(match best {
        Some((i, &r)) => CoverageResult {
            radius: i as f64 * search.radius_step,
            outage_at_radius: 1.0 - r,
            samples_per_point: search.samples,
            seed: search.seed,
            diagnostic: None,
        },
        None => CoverageResult {
            radius: 0.0,
            outage_at_radius: 1.0 - reliabilities[0],
            samples_per_point: search.samples,
            seed: search.seed,
            diagnostic: Some(format!(
                "no coverage: reliability {} not met even directly below the platform (achieved {})",
                search.reliability, reliabilities[0]
            )),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn urban() -> ChannelEnvironment {
        ChannelEnvironment::urban_2000mhz()
    }

    #[test]
    fn fspl_examples() {
        let unit = LinkGeometry::new(1.0, 0.0);
        assert_relative_eq!(free_space_path_loss(&unit, 1.0).unwrap(), -27.55, max_relative = 1e-15);
        let g = LinkGeometry::new(100.0, 251.0);
        assert_relative_eq!(g.slant_distance(), 270.186_972_298_813_8, max_relative = 1e-12);
        assert!((free_space_path_loss(&g, 2000.0).unwrap() - 87.10).abs() < 0.005);
        assert!(free_space_path_loss(&LinkGeometry::new(0.0, 0.0), 2000.0).is_err());
    }

    #[test]
    fn los_probability_examples() {
        let env = urban();
        assert!((los_probability(&env, 90.0) - 0.9647).abs() < 1e-4);
        assert_eq!(los_probability(&env, 15.0), 0.0);
        assert_eq!(los_probability(&env, 3.0), 0.0);
        let theta = LinkGeometry::new(100.0, 251.0).elevation();
        assert!((theta - 21.7227).abs() < 1e-4);
        assert!((los_probability(&env, theta) - 0.740).abs() < 5e-4);
    }

    #[test]
    fn sigma_examples() {
        let env = urban();
        assert!((env.sigma(PropagationGroup::Los, 90.0) - 0.1154).abs() < 1e-4);
        assert!((env.sigma(PropagationGroup::Nlos, 21.7227) - 15.43).abs() < 0.005);
        let flat = ChannelEnvironment { sigma_decay_los: 0.0, ..env };
        assert_eq!(flat.sigma(PropagationGroup::Los, 37.0), flat.sigma_scale_los);
    }

    #[test]
    fn mean_excess_examples() {
        let env = urban();
        let p = los_probability(&env, 90.0);
        assert_relative_eq!(mean_excess_path_loss(&env, 90.0), p + 20.0 * (1.0 - p), max_relative = 1e-15);
        assert!((mean_excess_path_loss(&env, 90.0) - 1.67).abs() < 0.005);
        let always = ChannelEnvironment { los_coeff: 1.0, los_exp: 0.0, ..env };
        assert_eq!(mean_excess_path_loss(&always, 60.0), env.mean_los);
        assert_eq!(mean_excess_path_loss(&env, 10.0), env.mean_nlos);
    }

    #[test]
    fn received_power_examples() {
        let env = urban();
        let pico = 10.0 * (130.0f64).log10();
        let rx = received_power(pico, &LinkGeometry::new(100.0, 251.0), &env, 47.3).unwrap();
        assert!((rx - -113.26).abs() < 0.05);
        let unit = ChannelEnvironment { frequency: 1.0, ..env };
        let rx = received_power(30.0, &LinkGeometry::new(1.0, 0.0), &unit, 0.0).unwrap();
        assert_relative_eq!(rx, 57.55, max_relative = 1e-12);
        let micro = 10.0 * (6400.0f64).log10();
        let geom = LinkGeometry::new(100.0, (365.0f64 * 365.0 - 100.0 * 100.0).sqrt());
        let rx = received_power(micro, &geom, &env, 56.1).unwrap();
        assert!((rx - -107.8).abs() < 0.05);
    }

    #[test]
    fn invalid_environment_rejected() {
        let env = ChannelEnvironment { los_coeff: 0.9, ..urban() };
        assert!(env.validate().is_err());
        let env = ChannelEnvironment { theta0: 90.0, ..urban() };
        assert!(env.validate().is_err());
    }

    #[test]
    fn unreachable_sensitivity_means_no_coverage() {
        let search = CoverageSearch { samples: 1000, ..Default::default() };
        let r = coverage_radius(21.14, f64::INFINITY, 100.0, &urban(), &search).unwrap();
        assert_eq!(r.radius, 0.0);
        assert!(!r.has_coverage());
        assert!(r.diagnostic.unwrap().contains("no coverage"));
    }

    #[test]
    fn search_controls_validated() {
        let env = urban();
        let bad = CoverageSearch { reliability: 1.0, ..Default::default() };
        assert!(coverage_radius(21.0, -110.0, 100.0, &env, &bad).is_err());
        let bad = CoverageSearch { samples: 0, ..Default::default() };
        assert!(coverage_radius(21.0, -110.0, 100.0, &env, &bad).is_err());
        let bad = CoverageSearch { radius_step: 0.0, ..Default::default() };
        assert!(coverage_radius(21.0, -110.0, 100.0, &env, &bad).is_err());
    }

    #[test]
    fn same_seed_same_result() {
        let search = CoverageSearch { samples: 2000, seed: 7, ..Default::default() };
        let a = coverage_radius(21.14, -113.3, 100.0, &urban(), &search).unwrap();
        let b = coverage_radius(21.14, -113.3, 100.0, &urban(), &search).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.outage_at_radius.to_bits(), b.outage_at_radius.to_bits());
    }

    #[test]
    fn radius_monotone_in_tx_power() {
        let search = CoverageSearch { samples: 2000, ..Default::default() };
        let mut last = 0.0;
        for tx in [10.0, 15.0, 20.0, 25.0, 30.0, 38.0] {
            let r = coverage_radius(tx, -108.0, 100.0, &urban(), &search).unwrap().radius;
            assert!(r >= last);
            last = r;
        }
    }

    proptest! {
        #[test]
        fn doubling_distance_adds_six_db(d in 0.1f64..1e6, f in 1.0f64..1e5) {
            let diff = fspl_db(2.0 * d, f) - fspl_db(d, f);
            prop_assert!((diff - 20.0 * 2f64.log10()).abs() < 1e-9);
        }

        #[test]
        fn los_probability_bounded_and_monotone(a in 0.0f64..90.0, b in 0.0f64..90.0) {
            let env = urban();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (plo, phi) = (los_probability(&env, lo), los_probability(&env, hi));
            prop_assert!((0.0..=1.0).contains(&plo) && (0.0..=1.0).contains(&phi));
            prop_assert!(plo <= phi);
        }
    }
}
