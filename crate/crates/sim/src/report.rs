//! Run accounting.

use std::collections::BTreeMap;
use std::fmt::Write;

use v2x_zk::protocol::RejectReason;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodeReport {
    pub name: String,
    pub accepts: u64,
    /// Rejections by reason code.
    pub rejects: BTreeMap<&'static str, u64>,
    pub drops: u64,
    /// Set once the node has accepted a stop-sign claim.
    pub stop_sign_flag: bool,
}

impl NodeReport {
    pub fn total_rejects(&self) -> u64 {
        self.rejects.values().sum()
    }

    pub fn rejects_for(&self, code: &str) -> u64 {
        self.rejects.get(code).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimReport {
    pub scenario: String,
    pub seed: u64,
    pub honest_messages: u64,
    pub adversarial_messages: u64,
    /// Per-receiver copies that arrived.
    pub delivered: u64,
    /// Per-receiver copies the bus dropped.
    pub lost: u64,
    pub nodes: Vec<NodeReport>,
    /// Latency of every delivered copy, in delivery order.
    pub latencies_ms: Vec<u64>,
    /// Adversarial packages some verifier accepted.
    pub attack_successes: u64,
    /// Verbatim replays accepted by a verifier that never received the
    /// original; these carry no new claim.
    pub replay_first_deliveries: u64,
    /// Outcomes that differ from the expected one, described.
    pub unexpected: Vec<String>,
}

impl SimReport {
    pub fn node(&self, name: &str) -> Option<&NodeReport> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn accepts(&self) -> u64 {
        self.nodes.iter().map(|n| n.accepts).sum()
    }

    pub fn rejects(&self) -> u64 {
        self.nodes.iter().map(|n| n.total_rejects()).sum()
    }

    pub fn drops(&self) -> u64 {
        self.nodes.iter().map(|n| n.drops).sum()
    }

    pub fn rejects_for(&self, code: &str) -> u64 {
        self.nodes.iter().map(|n| n.rejects_for(code)).sum()
    }

    /// `accepts + rejects + drops = delivered + lost`, with each side
    /// matching on its own.
    pub fn is_conserved(&self) -> bool {
        self.accepts() + self.rejects() == self.delivered
            && self.drops() == self.lost
            && self.latencies_ms.len() as u64 == self.delivered
    }

    /// One row per verifier; one column per reject reason.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("node,accepts,drops");
        for code in RejectReason::CODES {
            let _ = write!(s, ",{code}");
        }
        s.push_str(",stop_sign_flag\n");
        for n in &self.nodes {
            let _ = write!(s, "{},{},{}", n.name, n.accepts, n.drops);
            for code in RejectReason::CODES {
                let _ = write!(s, ",{}", n.rejects_for(code));
            }
            let _ = writeln!(s, ",{}", n.stop_sign_flag as u8);
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario {} seed {}", self.scenario, self.seed);
        let _ = writeln!(
            s,
            "messages honest {} adversarial {}",
            self.honest_messages, self.adversarial_messages
        );
        let _ = writeln!(s, "copies delivered {} lost {}", self.delivered, self.lost);
        let _ = writeln!(
            s,
            "outcomes accepted {} rejected {} dropped {}",
            self.accepts(),
            self.rejects(),
            self.drops()
        );
        if let (Some(min), Some(max)) = (self.latencies_ms.iter().min(), self.latencies_ms.iter().max()) {
            let mean = self.latencies_ms.iter().sum::<u64>() as f64 / self.latencies_ms.len() as f64;
            let _ = writeln!(s, "latency ms min {min} mean {mean:.1} max {max}");
        }
        let _ = writeln!(s, "attack successes {}", self.attack_successes);
        let _ = writeln!(s, "replays first delivered {}", self.replay_first_deliveries);
        let _ = writeln!(s, "unexpected outcomes {}", self.unexpected.len());
        for u in &self.unexpected {
            let _ = writeln!(s, "  {u}");
        }
        s
    }

    /// CSV, summary and latencies: equal for equal runs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut s = self.to_csv();
        s.push_str(&self.summary());
        let lat: Vec<String> = self.latencies_ms.iter().map(u64::to_string).collect();
        s.push_str(&lat.join(","));
        s.into_bytes()
    }
}
