//! Per-stage timing of witness generation, proving and verification.

use std::fmt::Write as _;
use std::time::Instant;

use v2x_zk::groth16::{setup_for, verify};
use v2x_zk::pairing::Engine;

use crate::circuit::CircuitSpec;
use crate::{make_rng, CliError};

pub const STAGES: [&str; 3] = ["witness", "prove", "verify"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub circuit: String,
    pub runs: usize,
    pub constraints: usize,
    /// Mean wall-clock milliseconds per stage, in [`STAGES`] order.
    pub mean_ms: [f64; 3],
}

impl BenchReport {
    /// Each stage's share of the summed means, in percent.
    pub fn shares(&self) -> [f64; 3] {
        let total: f64 = self.mean_ms.iter().sum();
        self.mean_ms
            .map(|m| if total > 0.0 { 100.0 * m / total } else { 100.0 / 3.0 })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("stage,mean-ms,share-percent\n");
        for ((name, m), p) in STAGES.iter().zip(self.mean_ms).zip(self.shares()) {
            let _ = writeln!(s, "{name},{m:.4},{p:.2}");
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "{} circuit, {} constraints, {} runs\n{:<8} {:>12} {:>8}\n",
            self.circuit, self.constraints, self.runs, "stage", "mean ms", "share"
        );
        for ((name, m), p) in STAGES.iter().zip(self.mean_ms).zip(self.shares()) {
            let _ = writeln!(s, "{name:<8} {m:>12.3} {p:>7.2}%");
        }
        s
    }
}

/// Sets up once, then times `runs` rounds of the three stages on fresh
/// inputs read from `input` (an RSS scenario or audit detections).
pub fn cmd_bench(spec: &CircuitSpec, input: &str, runs: usize, seed: Option<u64>) -> Result<BenchReport, CliError> {
    if runs == 0 {
        return Err(CliError::Usage("runs must be at least 1".into()));
    }
    let circuit = spec.build()?;
    let cs = circuit.cs();
    let mut rng = make_rng(seed);
    let prover = setup_for::<Engine, _>(cs, &mut rng)?;
    let mut total = [0.0f64; 3];
    for i in 0..runs {
        let inputs = circuit.inputs(input, 1_700_000_000 + i as u64, &mut rng)?;
        let t0 = Instant::now();
        let w = cs.generate_witness(&inputs.assignment)?;
        let t1 = Instant::now();
        let proof = prover.prove(w.values(), &mut rng)?;
        let t2 = Instant::now();
        let ok = verify(prover.verifying_key(), &proof, w.public_inputs())?;
        let t3 = Instant::now();
        if !ok {
            return Err(CliError::Usage(format!("run {i}: honest proof failed to verify")));
        }
        for (acc, d) in total.iter_mut().zip([t1 - t0, t2 - t1, t3 - t2]) {
            *acc += d.as_secs_f64() * 1e3;
        }
    }
    Ok(BenchReport {
        circuit: spec.name().into(),
        runs,
        constraints: cs.num_constraints(),
        mean_ms: total.map(|t| t / runs as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shares_follow_means() {
        let r = BenchReport {
            circuit: "rss".into(),
            runs: 1,
            constraints: 10,
            mean_ms: [1.0, 6.0, 3.0],
        };
        assert_eq!(r.shares(), [10.0, 60.0, 30.0]);
        assert_eq!(
            r.to_csv(),
            "stage,mean-ms,share-percent\nwitness,1.0000,10.00\nprove,6.0000,60.00\nverify,3.0000,30.00\n"
        );
    }
}
