//! Safe stopping distance to a stop sign: the longitudinal RSS distance,
//! the safety predicate, and its circuit.
//!
//! The general minimum distance between a rear vehicle at `v_r` and a front
//! object at `v_f` is
//!
//! ```text
//! d_min = [ v_r t + a t^2 / 2 + (v_r + t a)^2 / (2 b_min) - v_f^2 / (2 b_max) ]+
//! ```
//!
//! For a stationary stop sign with no acceleration during the reaction time
//! and `b_min = mu g` this is `v t + v^2 / (2 mu g)`.

mod circuit;

use serde::{Deserialize, Serialize};

use crate::commitment::{commit, BlindingFactor, Commitment};
use crate::field::{scale, unscale, PrimeField, ScaleError, ScalingFactor};
use crate::pairing::Fr;
use crate::protocol::{nonce_to_limbs, DomainSeparator, Nonce, APP_RSS};
use crate::r1cs::{DIST_BITS, PROB_BITS};

pub use circuit::{build_rss_circuit, labels, RssCircuit};

/// Class id of a stop sign.
pub const STOP_SIGN_ID: u64 = 11;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RssError {
    #[error("braking capacity must be positive, got {0}")]
    Braking(f64),
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} = {value} does not fit in {bits} bits after scaling")]
    Range { name: &'static str, value: f64, bits: u32 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scale(#[from] ScaleError),
}

/// Kinematic parameters of the general distance formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RssParams {
    /// Ego speed, m/s.
    pub v: f64,
    /// Reaction time, s.
    pub t_rec: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Front object speed, m/s.
    pub v_f: f64,
}

impl RssParams {
    /// Stationary front object, no acceleration, braking at `mu g`.
    pub fn stationary(v: f64, t_rec: f64, mu: f64, g: f64) -> Self {
        RssParams {
            v,
            t_rec,
            alpha_max: 0.0,
            beta_min: mu * g,
            beta_max: mu * g,
            v_f: 0.0,
        }
    }
}

/// The two parts of the safe distance, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafeDistance {
    /// Distance covered during the reaction time.
    pub reaction: f64,
    /// Braking distance net of the front object's own stopping distance.
    pub braking: f64,
}

impl SafeDistance {
    pub fn total(&self) -> f64 {
        (self.reaction + self.braking).max(0.0)
    }
}

pub fn rss_safe_distance(p: &RssParams) -> Result<SafeDistance, RssError> {
    for (name, value) in [
        ("v", p.v),
        ("t_rec", p.t_rec),
        ("alpha_max", p.alpha_max),
        ("v_f", p.v_f),
    ] {
        if value < 0.0 || value.is_nan() {
            return Err(RssError::Negative { name, value });
        }
    }
    if p.beta_min.is_nan() || p.beta_min <= 0.0 {
        return Err(RssError::Braking(p.beta_min));
    }
    let front = if p.v_f == 0.0 {
        0.0
    } else if p.beta_max.is_nan() || p.beta_max <= 0.0 {
        return Err(RssError::Braking(p.beta_max));
    } else {
        p.v_f * p.v_f / (2.0 * p.beta_max)
    };
    let v_end = p.v + p.t_rec * p.alpha_max;
    Ok(SafeDistance {
        reaction: p.v * p.t_rec + p.alpha_max * p.t_rec * p.t_rec / 2.0,
        braking: v_end * v_end / (2.0 * p.beta_min) - front,
    })
}

/// `[Pr >= theta] AND [d_current >= d_safe]` on scaled integers.
pub fn evaluate_predicate(pr: u64, theta: u64, d_current: u64, d_safe: u64) -> bool {
    pr >= theta && d_current >= d_safe
}

/// The value the circuit assigns to SAFE: a detection below the threshold
/// leaves the vehicle safe.
pub fn circuit_outcome(pr: u64, theta: u64, d_current: u64, d_safe: u64) -> bool {
    pr < theta || d_current >= d_safe
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RssScaling {
    /// Probabilities and weather values.
    pub prob: u64,
    /// Latitudes and longitudes.
    pub geo: u64,
    /// Yaw.
    pub psi: u64,
    /// Distances, speeds and box coordinates.
    pub dist: u64,
}

impl Default for RssScaling {
    fn default() -> Self {
        RssScaling {
            prob: 100,
            geo: 1_000_000,
            psi: 100,
            dist: 100,
        }
    }
}

/// Build-time parameters of the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RssConfig {
    /// Detection threshold, scaled by `scaling.prob`.
    pub theta_s: u64,
    pub stop_sign_id: u64,
    pub prob_bits: u32,
    pub dist_bits: u32,
    pub scaling: RssScaling,
}

impl Default for RssConfig {
    fn default() -> Self {
        RssConfig {
            theta_s: 75,
            stop_sign_id: STOP_SIGN_ID,
            prob_bits: PROB_BITS,
            dist_bits: DIST_BITS,
            scaling: RssScaling::default(),
        }
    }
}

impl RssConfig {
    /// Threshold given as a fraction in `[0, 1]`.
    pub fn with_threshold(theta: f64) -> Result<Self, RssError> {
        let mut c = RssConfig::default();
        if !(0.0..=1.0).contains(&theta) {
            return Err(RssError::Config(format!("threshold {theta} outside [0, 1]")));
        }
        c.theta_s = (theta * c.scaling.prob as f64).floor() as u64;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), RssError> {
        let s = &self.scaling;
        if [s.prob, s.geo, s.psi, s.dist].contains(&0) {
            return Err(RssError::Config("scaling factors must be at least 1".into()));
        }
        if self.theta_s > s.prob {
            return Err(RssError::Config(format!(
                "threshold {} exceeds the probability scale {}",
                self.theta_s, s.prob
            )));
        }
        for bits in [self.prob_bits, self.dist_bits] {
            if bits == 0 || bits + 2 > Fr::CAPACITY {
                return Err(RssError::Config(format!("comparator width {bits} unsupported")));
            }
        }
        if self.theta_s >= 1 << self.prob_bits || s.prob >= 1 << self.prob_bits {
            return Err(RssError::Config(format!(
                "probability scale does not fit in {} bits",
                self.prob_bits
            )));
        }
        Ok(())
    }

    fn factor(rho: u64) -> ScalingFactor {
        ScalingFactor::new(rho).expect("validated nonzero")
    }
}

/// Real-valued inputs of one safe-distance claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RssScenario {
    pub object_id: u64,
    /// Detection probability in `[0, 1]`.
    pub pr: f64,
    /// `[x1, y1, x2, y2]`.
    pub bbox: [f64; 4],
    pub phi_v: f64,
    pub lambda_v: f64,
    /// Ego speed, m/s.
    pub v: f64,
    pub psi: f64,
    pub t_rec: f64,
    pub mu: f64,
    pub g: f64,
    /// Current distance to the stop sign, m.
    pub d_current: f64,
    pub phi_s: f64,
    pub lambda_s: f64,
    /// Cloud, precipitation and fog, each in `[0, 1]`.
    pub weather: [f64; 3],
}

impl Default for RssScenario {
    /// 30 mph with a one-second reaction time, 30 m from the sign.
    fn default() -> Self {
        RssScenario {
            object_id: STOP_SIGN_ID,
            pr: 0.92,
            bbox: [412.0, 188.0, 468.0, 246.0],
            phi_v: 42.279_594,
            lambda_v: -83.732_124,
            v: 13.41,
            psi: 87.5,
            t_rec: 1.0,
            mu: 0.75,
            g: 9.81,
            d_current: 30.0,
            phi_s: 42.279_860,
            lambda_s: -83.732_130,
            weather: [0.2, 0.0, 0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RssPublicInputs {
    pub delta_commit: u32,
    pub id: Fr,
    pub d_s: Fr,
    pub d_s_current: Fr,
    pub phi_s: Fr,
    pub lambda_s: Fr,
    pub rho_prob: Fr,
    pub rho_geo: Fr,
    pub rho_psi: Fr,
    pub weather: [Fr; 3],
    pub timestamp: u64,
    pub nonce: Nonce,
    pub commitment: Commitment<Fr>,
    pub safe: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RssWitness {
    pub pr: Fr,
    pub bbox: [Fr; 4],
    pub phi_v: Fr,
    pub lambda_v: Fr,
    pub v: Fr,
    pub psi: Fr,
    pub s_sec: BlindingFactor<Fr>,
}

/// The committed message `(Δ_commit, Pr, b, φ_V, λ_V, v, ψ, T, ν)`; the
/// commitment appends `s_sec`.
pub fn commitment_message(x: &RssPublicInputs, w: &RssWitness) -> Vec<Fr> {
    let mut m = vec![Fr::from_u64(x.delta_commit as u64), w.pr];
    m.extend_from_slice(&w.bbox);
    m.extend([w.phi_v, w.lambda_v, w.v, w.psi, Fr::from_u64(x.timestamp)]);
    m.extend(nonce_to_limbs::<Fr>(&x.nonce));
    m
}

fn bounded(name: &'static str, value: f64, rho: ScalingFactor, bits: u32) -> Result<Fr, RssError> {
    let range = || RssError::Range { name, value, bits };
    if value.is_nan() || value < 0.0 {
        return Err(RssError::Negative { name, value });
    }
    let z: Fr = scale(value, rho)?;
    match z.to_u64() {
        Some(n) if bits >= 64 || n < 1 << bits => Ok(z),
        _ => Err(range()),
    }
}

/// Scales a scenario into circuit inputs. `d_S` is computed here from the
/// scenario's speed and braking parameters.
pub fn make_rss_inputs(
    scenario: &RssScenario,
    config: &RssConfig,
    timestamp: u64,
    nonce: Nonce,
    s_sec: BlindingFactor<Fr>,
) -> Result<(RssPublicInputs, RssWitness), RssError> {
    config.validate()?;
    let s = &config.scaling;
    let (prob, geo, psi, dist) = (
        RssConfig::factor(s.prob),
        RssConfig::factor(s.geo),
        RssConfig::factor(s.psi),
        RssConfig::factor(s.dist),
    );
    let d_safe = rss_safe_distance(&RssParams::stationary(
        scenario.v,
        scenario.t_rec,
        scenario.mu,
        scenario.g,
    ))?
    .total();
    let mut bbox = [Fr::zero(); 4];
    for (out, value) in bbox.iter_mut().zip(scenario.bbox) {
        *out = bounded("bbox", value, dist, config.dist_bits)?;
    }
    let mut weather = [Fr::zero(); 3];
    for (out, value) in weather.iter_mut().zip(scenario.weather) {
        *out = bounded("weather", value, prob, config.prob_bits)?;
    }
    let witness = RssWitness {
        pr: bounded("pr", scenario.pr, prob, config.prob_bits)?,
        bbox,
        phi_v: scale(scenario.phi_v, geo)?,
        lambda_v: scale(scenario.lambda_v, geo)?,
        v: bounded("v", scenario.v, dist, config.dist_bits)?,
        psi: scale(scenario.psi, psi)?,
        s_sec,
    };
    let d_s = bounded("d_S", d_safe, dist, config.dist_bits)?;
    let d_s_current = bounded("d_current", scenario.d_current, dist, config.dist_bits)?;
    let n = |z: Fr| z.to_u64().expect("range-checked");
    let safe = circuit_outcome(n(witness.pr), config.theta_s, n(d_s_current), n(d_s));
    let mut x = RssPublicInputs {
        delta_commit: DomainSeparator::commit(APP_RSS).value(),
        id: Fr::from_u64(scenario.object_id),
        d_s,
        d_s_current,
        phi_s: scale(scenario.phi_s, geo)?,
        lambda_s: scale(scenario.lambda_s, geo)?,
        rho_prob: Fr::from_u64(s.prob),
        rho_geo: Fr::from_u64(s.geo),
        rho_psi: Fr::from_u64(s.psi),
        weather,
        timestamp,
        nonce,
        commitment: Commitment(Fr::zero()),
        safe,
    };
    x.commitment = commit(&commitment_message(&x, &witness), &witness.s_sec);
    Ok((x, witness))
}

/// Unscaled `d_S` in meters.
pub fn unscaled_distance(z: Fr, config: &RssConfig) -> f64 {
    unscale(z, RssConfig::factor(config.scaling.dist))
}
