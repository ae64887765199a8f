//! The safe-distance circuit.
//!
//! Public inputs, in order: `Delta_commit`, `ID`, `d_S`, `d_S_C`, `phi_S`,
//! `lambda_S`, `rho_prob`, `rho_geo`, `rho_psi`, `w_cloud`, `w_precip`,
//! `w_fog`, `T`, the nonce limbs, then the outputs `SAFE` and `c`.
//!
//! Constraints:
//! - `ID` equals the stop sign class
//! - `is_detected = [Pr >= theta_S]`, `is_distant = [d_S_C >= d_S]`
//! - `SAFE = NOT(is_detected) OR is_distant`
//! - `Delta_commit` equals the commit separator of the application
//! - the scaling factors equal the build-time ones
//! - `c = sponge(Delta_commit, Pr, b, phi_V, lambda_V, v, psi, T, nu, s_sec)`
//!
//! The weather values are bound as public inputs and not otherwise
//! constrained. Neither are `b`, `phi_V`, `lambda_V`, `v` and `psi` outside
//! the commitment.

use super::{RssConfig, RssError, RssPublicInputs, RssWitness};
use crate::commitment::sponge_gadget;
use crate::field::PrimeField;
use crate::pairing::Fr;
use crate::protocol::{set_context, ContextWires, DomainSeparator, APP_RSS, COMMITMENT_LABEL};
use crate::r1cs::{Assignment, CircuitBuilder, ConstraintSystem, LinearCombination, Variable};

/// Input and output wire labels.
pub mod labels {
    pub const DELTA_COMMIT: &str = "Delta_commit";
    pub const ID: &str = "ID";
    pub const D_S: &str = "d_S";
    pub const D_S_CURRENT: &str = "d_S_C";
    pub const PHI_S: &str = "phi_S";
    pub const LAMBDA_S: &str = "lambda_S";
    pub const RHO_PROB: &str = "rho_prob";
    pub const RHO_GEO: &str = "rho_geo";
    pub const RHO_PSI: &str = "rho_psi";
    pub const WEATHER: [&str; 3] = ["w_cloud", "w_precip", "w_fog"];
    pub const SAFE: &str = "SAFE";
    pub const PR: &str = "Pr";
    pub const BBOX: [&str; 4] = ["b_x1", "b_y1", "b_x2", "b_y2"];
    pub const PHI_V: &str = "phi_V";
    pub const LAMBDA_V: &str = "lambda_V";
    pub const V: &str = "v";
    pub const PSI: &str = "psi";
    pub const S_SEC: &str = "s_sec";
}

/// A built circuit with the configuration it was built for.
pub struct RssCircuit {
    pub cs: ConstraintSystem<Fr>,
    pub config: RssConfig,
}

fn constant(v: u64) -> LinearCombination<Fr> {
    LinearCombination::constant(Fr::from_u64(v))
}

pub fn build_rss_circuit(config: &RssConfig) -> Result<RssCircuit, RssError> {
    use labels::*;
    config.validate()?;
    let mut cs = CircuitBuilder::<Fr>::new();

    let delta = cs.alloc_public(DELTA_COMMIT);
    let id = cs.alloc_public(ID);
    let d_s = cs.alloc_public(D_S);
    let d_c = cs.alloc_public(D_S_CURRENT);
    cs.alloc_public(PHI_S);
    cs.alloc_public(LAMBDA_S);
    let rho_prob = cs.alloc_public(RHO_PROB);
    let rho_geo = cs.alloc_public(RHO_GEO);
    let rho_psi = cs.alloc_public(RHO_PSI);
    for w in WEATHER {
        cs.alloc_public(w);
    }
    let ctx = ContextWires::alloc(&mut cs);

    let pr = cs.alloc_private(PR);
    let bbox: Vec<Variable> = BBOX.iter().map(|l| cs.alloc_private(l)).collect();
    let phi_v = cs.alloc_private(PHI_V);
    let lambda_v = cs.alloc_private(LAMBDA_V);
    let v = cs.alloc_private(V);
    let psi = cs.alloc_private(PSI);
    let s_sec = cs.alloc_private(S_SEC);

    let check_id = cs.is_equal(id, constant(config.stop_sign_id));
    cs.enforce_equal("check_id", check_id, Variable::ONE);

    let is_detected = cs.scoped("is_detected", |cs| {
        cs.geq(pr, constant(config.theta_s), config.prob_bits)
    });
    let is_distant = cs.scoped("is_distant", |cs| cs.geq(d_c, d_s, config.dist_bits));
    let not_detected = cs.not(is_detected);
    let condition = cs.or(not_detected, is_distant);
    let safe = cs.alloc_public_with(SAFE, move |v| Ok(v.get(condition)));
    cs.enforce_equal(SAFE, safe, condition);

    let s = &config.scaling;
    cs.enforce_equal(RHO_PROB, rho_prob, constant(s.prob));
    cs.enforce_equal(RHO_GEO, rho_geo, constant(s.geo));
    cs.enforce_equal(RHO_PSI, rho_psi, constant(s.psi));

    let delta_value = DomainSeparator::commit(APP_RSS).value() as u64;
    cs.enforce_equal(DELTA_COMMIT, delta, constant(delta_value));

    let mut message: Vec<LinearCombination<Fr>> = vec![delta.into(), pr.into()];
    message.extend(bbox.iter().map(|&b| b.into()));
    message.extend([phi_v, lambda_v, v, psi].map(LinearCombination::from));
    message.extend(ctx.variables().into_iter().map(LinearCombination::from));
    message.push(s_sec.into());
    let digest = sponge_gadget(&mut cs, &message);
    let c = cs.alloc_public_with(COMMITMENT_LABEL, move |v| Ok(v.get(digest)));
    cs.enforce_equal(COMMITMENT_LABEL, c, digest);

    Ok(RssCircuit {
        cs: cs.finalize().map_err(|e| RssError::Config(e.to_string()))?,
        config: *config,
    })
}

impl RssCircuit {
    /// Input assignment for `(x, w)`. The outputs `SAFE` and `c` are solved.
    pub fn assignment(&self, x: &RssPublicInputs, w: &RssWitness) -> Assignment<Fr> {
        use labels::*;
        let mut a = Assignment::new();
        a.set(DELTA_COMMIT, Fr::from_u64(x.delta_commit as u64))
            .set(ID, x.id)
            .set(D_S, x.d_s)
            .set(D_S_CURRENT, x.d_s_current)
            .set(PHI_S, x.phi_s)
            .set(LAMBDA_S, x.lambda_s)
            .set(RHO_PROB, x.rho_prob)
            .set(RHO_GEO, x.rho_geo)
            .set(RHO_PSI, x.rho_psi)
            .set(PR, w.pr)
            .set(PHI_V, w.phi_v)
            .set(LAMBDA_V, w.lambda_v)
            .set(V, w.v)
            .set(PSI, w.psi)
            .set(S_SEC, w.s_sec.value());
        for (l, v) in WEATHER.iter().zip(x.weather) {
            a.set(*l, v);
        }
        for (l, v) in BBOX.iter().zip(w.bbox) {
            a.set(*l, v);
        }
        set_context(&mut a, x.timestamp, &x.nonce);
        a
    }

    /// Index of `SAFE` in the public input vector.
    pub fn safe_position(&self) -> usize {
        self.public_position(labels::SAFE)
    }

    pub fn commitment_position(&self) -> usize {
        self.public_position(COMMITMENT_LABEL)
    }

    fn public_position(&self, label: &str) -> usize {
        self.cs
            .public_labels()
            .iter()
            .position(|l| l == label)
            .expect("label allocated by the builder")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commitment::BlindingFactor;
    use crate::rss::{circuit_outcome, make_rss_inputs, RssScenario};

    fn inputs(sc: &RssScenario, cfg: &RssConfig) -> (RssPublicInputs, RssWitness) {
        make_rss_inputs(sc, cfg, 1_700_000_000, [9; 16], BlindingFactor(Fr::from_u64(12345))).unwrap()
    }

    #[test]
    fn safe_scenario_is_satisfiable() {
        let cfg = RssConfig::default();
        let circuit = build_rss_circuit(&cfg).unwrap();
        let (x, w) = inputs(&RssScenario::default(), &cfg);
        let wit = circuit.cs.generate_witness(&circuit.assignment(&x, &w)).unwrap();
        let publics = wit.public_inputs();
        assert_eq!(publics[circuit.safe_position()], Fr::one());
        assert_eq!(publics[circuit.commitment_position()], x.commitment.0);
    }

    #[test]
    fn close_detection_only_satisfies_unsafe() {
        let cfg = RssConfig::default();
        let circuit = build_rss_circuit(&cfg).unwrap();
        let sc = RssScenario {
            d_current: 20.0,
            ..RssScenario::default()
        };
        let (x, w) = inputs(&sc, &cfg);
        assert!(!x.safe);
        let a = circuit.assignment(&x, &w);
        let wit = circuit.cs.generate_witness(&a).unwrap();
        assert_eq!(wit.public_inputs()[circuit.safe_position()], Fr::zero());
        let mut claim = Assignment::new();
        claim.set(labels::SAFE, Fr::one());
        let forged = circuit.cs.solve(&a, &claim).unwrap();
        assert!(!circuit.cs.is_satisfied(forged.values()).unwrap());
    }

    #[test]
    fn wrong_class_is_unsatisfiable() {
        let cfg = RssConfig::default();
        let circuit = build_rss_circuit(&cfg).unwrap();
        let sc = RssScenario {
            object_id: 12,
            ..RssScenario::default()
        };
        let (x, w) = inputs(&sc, &cfg);
        let err = circuit.cs.generate_witness(&circuit.assignment(&x, &w)).unwrap_err();
        assert!(err.to_string().contains("check_id"), "{err}");
    }

    #[test]
    fn wrong_context_tag_is_unsatisfiable() {
        let cfg = RssConfig::default();
        let circuit = build_rss_circuit(&cfg).unwrap();
        let (mut x, w) = inputs(&RssScenario::default(), &cfg);
        x.delta_commit = DomainSeparator::commit(crate::protocol::APP_AUDIT).value();
        assert!(circuit.cs.generate_witness(&circuit.assignment(&x, &w)).is_err());
    }

    #[test]
    fn perturbed_commitment_is_unsatisfiable() {
        let cfg = RssConfig::default();
        let circuit = build_rss_circuit(&cfg).unwrap();
        let (x, w) = inputs(&RssScenario::default(), &cfg);
        let a = circuit.assignment(&x, &w);
        let mut o = Assignment::new();
        o.set(COMMITMENT_LABEL, x.commitment.0 + Fr::one());
        let forged = circuit.cs.solve(&a, &o).unwrap();
        assert!(!circuit.cs.is_satisfied(forged.values()).unwrap());
    }

    #[test]
    fn below_threshold_is_reported_safe() {
        let cfg = RssConfig::default();
        let circuit = build_rss_circuit(&cfg).unwrap();
        let sc = RssScenario {
            pr: 0.5,
            d_current: 5.0,
            ..RssScenario::default()
        };
        let (x, w) = inputs(&sc, &cfg);
        assert!(x.safe);
        assert!(circuit_outcome(50, 75, 500, 2563));
        let wit = circuit.cs.generate_witness(&circuit.assignment(&x, &w)).unwrap();
        assert_eq!(wit.public_inputs()[circuit.safe_position()], Fr::one());
    }

    #[test]
    fn constraint_count_is_pinned() {
        let circuit = build_rss_circuit(&RssConfig::default()).unwrap();
        let n = circuit.cs.num_constraints();
        assert_eq!(
            n,
            build_rss_circuit(&RssConfig::default()).unwrap().cs.num_constraints()
        );
        assert_eq!(n, RSS_CONSTRAINTS);
    }

    // is_equal 2, check 1, geq against a constant 2*16+3, geq 3*32+4, or 1,
    // SAFE 1, scaling 3, tag 1, sponge over 15 inputs 8*92+1, c 1, and 19
    // public binding rows
    const RSS_CONSTRAINTS: usize = 2 + 1 + 35 + 100 + 1 + 1 + 3 + 1 + 737 + 1 + 19;
}
