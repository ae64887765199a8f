//! Scenario description, templates and overrides.

use serde::{Deserialize, Serialize};
use v2x_zk::rss::RssScenario;

use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attack {
    /// Re-broadcasts each captured package verbatim, inside the window.
    Replay,
    /// Re-broadcasts each captured package after the window has passed.
    StaleTimestamp,
    /// Re-signs each captured package with its own certified key under the
    /// audit application's signing context.
    CrossContext,
    /// Changes one field of each captured package.
    Tamper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusParams {
    pub drop_prob: f64,
    pub latency_min_ms: u64,
    pub latency_max_ms: u64,
}

impl Default for BusParams {
    fn default() -> Self {
        BusParams {
            drop_prob: 0.0,
            latency_min_ms: 5,
            latency_max_ms: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoSpec {
    pub name: String,
    pub broadcasts: u32,
    pub start_ms: u64,
    pub interval_ms: u64,
    #[serde(default)]
    pub scenario: RssScenario,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierSpec {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarySpec {
    pub name: String,
    pub attack: Attack,
    /// Delay between capturing a package and sending the attack.
    pub delay_ms: u64,
}

/// A complete, self-describing run. Times are logical milliseconds from the
/// start; package timestamps are `start_time` plus whole elapsed seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub name: String,
    pub seed: u64,
    pub start_time: u64,
    pub window_secs: u64,
    pub bus: BusParams,
    pub egos: Vec<EgoSpec>,
    pub verifiers: Vec<VerifierSpec>,
    #[serde(default)]
    pub adversaries: Vec<AdversarySpec>,
}

pub const TEMPLATES: [&str; 3] = ["occluded-stop-sign", "replay-storm", "mixed-fleet"];

fn ego(name: &str, broadcasts: u32, start_ms: u64) -> EgoSpec {
    EgoSpec {
        name: name.into(),
        broadcasts,
        start_ms,
        interval_ms: 500,
        scenario: RssScenario::default(),
    }
}

fn verifiers(names: &[&str]) -> Vec<VerifierSpec> {
    names.iter().map(|n| VerifierSpec { name: n.to_string() }).collect()
}

fn adversary(name: &str, attack: Attack, delay_ms: u64) -> AdversarySpec {
    AdversarySpec {
        name: name.into(),
        attack,
        delay_ms,
    }
}

impl SimScenario {
    fn base(name: &str) -> Self {
        SimScenario {
            name: name.into(),
            seed: 0,
            start_time: 1_700_000_000,
            window_secs: v2x_zk::protocol::DEFAULT_WINDOW_SECS,
            bus: BusParams::default(),
            egos: Vec::new(),
            verifiers: Vec::new(),
            adversaries: Vec::new(),
        }
    }

    pub fn template(name: &str) -> Result<Self, SimError> {
        let mut s = Self::base(name);
        match name {
            // a leading vehicle sees the sign; the trailing one cannot
            "occluded-stop-sign" => {
                s.egos = vec![ego("leader", 1, 0)];
                s.verifiers = verifiers(&["trailer"]);
            }
            "replay-storm" => {
                s.bus.drop_prob = 0.1;
                s.egos = vec![ego("ego", 10, 0)];
                s.verifiers = verifiers(&["v1", "v2", "v3"]);
                s.adversaries = vec![
                    adversary("replayer", Attack::Replay, 1000),
                    adversary("late-replayer", Attack::Replay, 2500),
                    adversary("hoarder", Attack::StaleTimestamp, 8000),
                ];
            }
            "mixed-fleet" => {
                s.bus.drop_prob = 0.05;
                s.egos = vec![ego("car-a", 4, 0), ego("car-b", 4, 250)];
                s.verifiers = verifiers(&["rsu", "car-c", "car-d"]);
                s.adversaries = vec![
                    adversary("replayer", Attack::Replay, 1500),
                    adversary("hoarder", Attack::StaleTimestamp, 9000),
                    adversary("insider", Attack::CrossContext, 700),
                    adversary("forger", Attack::Tamper, 300),
                ];
            }
            other => return Err(SimError::UnknownTemplate(other.into())),
        }
        Ok(s)
    }

    /// Applies `key=value` overrides: `seed`, `drop_prob`, `latency_min_ms`,
    /// `latency_max_ms`, `window_secs`, `start_time`, `broadcasts` (every
    /// ego).
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<(), SimError> {
        let bad = || SimError::Override(format!("{key}={value}"));
        let int = || value.parse::<u64>().map_err(|_| bad());
        match key {
            "seed" => self.seed = int()?,
            "drop_prob" => self.bus.drop_prob = value.parse().map_err(|_| bad())?,
            "latency_min_ms" => self.bus.latency_min_ms = int()?,
            "latency_max_ms" => self.bus.latency_max_ms = int()?,
            "window_secs" => self.window_secs = int()?,
            "start_time" => self.start_time = int()?,
            "broadcasts" => {
                let n = value.parse().map_err(|_| bad())?;
                self.egos.iter_mut().for_each(|e| e.broadcasts = n);
            }
            _ => return Err(bad()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let err = |m: String| Err(SimError::Config(m));
        let b = &self.bus;
        if !(0.0..=1.0).contains(&b.drop_prob) {
            return err(format!("drop probability {} outside [0, 1]", b.drop_prob));
        }
        if b.latency_min_ms > b.latency_max_ms {
            return err("latency bounds reversed".into());
        }
        let window_ms = self.window_secs * 1000;
        // whole-second timestamps lose up to one second on each side
        if b.latency_max_ms + 1000 > window_ms {
            return err(format!(
                "maximum latency {} ms does not fit in the {} s window",
                b.latency_max_ms, self.window_secs
            ));
        }
        if self.egos.is_empty() || self.verifiers.is_empty() {
            return err("need at least one ego and one verifier".into());
        }
        let mut names: Vec<&str> = self
            .egos
            .iter()
            .map(|e| e.name.as_str())
            .chain(self.verifiers.iter().map(|v| v.name.as_str()))
            .chain(self.adversaries.iter().map(|a| a.name.as_str()))
            .collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return err("node names must be unique".into());
        }
        for a in &self.adversaries {
            let late = a.delay_ms + b.latency_max_ms + 1000;
            let ok = match a.attack {
                Attack::StaleTimestamp => a.delay_ms >= window_ms + 2000,
                // the copy must trail the original and stay inside the window
                Attack::Replay => a.delay_ms > b.latency_max_ms && late <= window_ms,
                Attack::CrossContext | Attack::Tamper => late <= window_ms,
            };
            if !ok {
                return err(format!(
                    "delay {} ms of {} unsuitable for its attack",
                    a.delay_ms, a.name
                ));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))
    }
}

/// A template with `key=value` overrides applied, validated.
pub fn make_scenario(template: &str, overrides: &[(&str, &str)]) -> Result<SimScenario, SimError> {
    let mut s = SimScenario::template(template)?;
    for (k, v) in overrides {
        s.apply_override(k, v)?;
    }
    s.validate()?;
    Ok(s)
}
