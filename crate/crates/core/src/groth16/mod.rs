//! Groth16 trusted setup, proving and verification over any
//! [`PairingEngine`].
//!
//! The key layout is the canonical one. With trapdoor `(alpha, beta, gamma,
//! delta, tau)` and per-wire QAP evaluations `A_j, B_j, C_j` at `tau`:
//!
//! * proving key: `alpha, beta, delta` in G1, `beta, delta` in G2,
//!   `A_j` and `B_j` in G1, `B_j` in G2 for every wire,
//!   `tau^k t(tau) / delta` for `k < n - 1`, and
//!   `(beta A_j + alpha B_j + C_j) / delta` for every private wire;
//! * verification key: `alpha` in G1, `beta, gamma, delta` in G2 and
//!   `(beta A_j + alpha B_j + C_j) / gamma` for the constant wire and every
//!   public wire, plus the cached pairing `e(alpha, beta)`.
//!
//! A proof `(A, B, C)` is accepted iff
//! `e(A, B) = e(alpha, beta) * e(IC(x), gamma) * e(C, delta)`.

mod keys;

use rand::RngCore;

use crate::field::PrimeField;
use crate::pairing::{multi_scalar_mul, CurveGroup, PairingEngine};
use crate::qap::{QapError, QapInstance};

pub use keys::{Proof, ProvingKey, VerifyingKey, PK_MAGIC, PROOF_MAGIC, VK_MAGIC};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Groth16Error {
    #[error("witness does not satisfy the circuit")]
    InvalidWitness,
    #[error("expected {expected} public inputs, got {got}")]
    PublicInputLength { expected: usize, got: usize },
    #[error("witness has {got} entries, the key expects {expected}")]
    WitnessLength { expected: usize, got: usize },
    #[error("key was generated for a different circuit")]
    CircuitMismatch,
    #[error("qap: {0}")]
    Qap(QapError),
    #[error("malformed artifact: {0}")]
    Codec(#[from] crate::codec::CodecError),
}

impl From<QapError> for Groth16Error {
    fn from(e: QapError) -> Self {
        match e {
            QapError::InvalidWitness => Groth16Error::InvalidWitness,
            other => Groth16Error::Qap(other),
        }
    }
}

/// The setup trapdoor. Overwritten with zeros when dropped.
struct ToxicWaste<F: PrimeField> {
    alpha: F,
    beta: F,
    gamma: F,
    delta: F,
    tau: F,
}

impl<F: PrimeField> ToxicWaste<F> {
    fn sample<R: RngCore + ?Sized>(rng: &mut R, qap: &QapInstance<F>) -> Self {
        loop {
            let t = ToxicWaste {
                alpha: F::random(rng),
                beta: F::random(rng),
                gamma: F::random(rng),
                delta: F::random(rng),
                tau: F::random(rng),
            };
            let degenerate =
                [t.alpha, t.beta, t.gamma, t.delta, t.tau].iter().any(|x| x.is_zero()) || qap.domain().contains(&t.tau);
            if !degenerate {
                return t;
            }
            log::debug!("degenerate trapdoor sample, resampling");
        }
    }
}

impl<F: PrimeField> Drop for ToxicWaste<F> {
    fn drop(&mut self) {
        for x in [
            &mut self.alpha,
            &mut self.beta,
            &mut self.gamma,
            &mut self.delta,
            &mut self.tau,
        ] {
            // SAFETY: `x` is a valid, aligned, exclusive reference.
            unsafe { std::ptr::write_volatile(x, F::zero()) };
        }
    }
}

fn scale_all<G: CurveGroup>(base: &G, scalars: &[G::Scalar]) -> Vec<G> {
    scalars.iter().map(|s| base.mul_scalar(s)).collect()
}

/// Samples a trapdoor from `rng` and derives the key pair for `qap`. The
/// keys are deterministic in the RNG stream.
pub fn setup<E: PairingEngine, R: RngCore + ?Sized>(
    qap: &QapInstance<E::Scalar>,
    circuit_hash: [u8; 32],
    rng: &mut R,
) -> Result<(ProvingKey<E>, VerifyingKey<E>), Groth16Error> {
    let tw = ToxicWaste::sample(rng, qap);
    let (a, b, c, t) = qap.evaluate_at(&tw.tau)?;
    let g1 = E::G1::generator();
    let g2 = E::G2::generator();
    let l = qap.num_public();
    let n = qap.num_constraints();
    let gamma_inv = tw.gamma.inverse().expect("nonzero");
    let delta_inv = tw.delta.inverse().expect("nonzero");

    let mixed: Vec<E::Scalar> = (0..a.len()).map(|j| tw.beta * a[j] + tw.alpha * b[j] + c[j]).collect();
    let ic_scalars: Vec<E::Scalar> = mixed[..=l].iter().map(|v| *v * gamma_inv).collect();
    let l_scalars: Vec<E::Scalar> = mixed[l + 1..].iter().map(|v| *v * delta_inv).collect();
    let mut h_scalars = Vec::with_capacity(n.saturating_sub(1));
    let mut power = t * delta_inv;
    for _ in 0..n.saturating_sub(1) {
        h_scalars.push(power);
        power *= tw.tau;
    }

    let alpha_g1 = g1.mul_scalar(&tw.alpha);
    let beta_g2 = g2.mul_scalar(&tw.beta);
    let vk = VerifyingKey::new(
        circuit_hash,
        alpha_g1,
        beta_g2,
        g2.mul_scalar(&tw.gamma),
        g2.mul_scalar(&tw.delta),
        scale_all(&g1, &ic_scalars),
    );
    let pk = ProvingKey {
        circuit_hash,
        num_constraints: n,
        alpha_g1,
        beta_g1: g1.mul_scalar(&tw.beta),
        beta_g2,
        delta_g1: g1.mul_scalar(&tw.delta),
        delta_g2: g2.mul_scalar(&tw.delta),
        a_query: scale_all(&g1, &a),
        b_g1_query: scale_all(&g1, &b),
        b_g2_query: scale_all(&g2, &b),
        h_query: scale_all(&g1, &h_scalars),
        l_query: scale_all(&g1, &l_scalars),
        vk: vk.clone(),
    };
    Ok((pk, vk))
}

/// Proves knowledge of `w`, which must satisfy the circuit behind `qap`.
/// `qap` must belong to the key; see [`ProvingKey::check_qap`].
pub fn prove<E: PairingEngine, R: RngCore + ?Sized>(
    pk: &ProvingKey<E>,
    qap: &QapInstance<E::Scalar>,
    w: &[E::Scalar],
    rng: &mut R,
) -> Result<Proof<E>, Groth16Error> {
    if w.len() != pk.a_query.len() {
        return Err(Groth16Error::WitnessLength {
            expected: pk.a_query.len(),
            got: w.len(),
        });
    }
    if qap.num_wires() != pk.a_query.len() || qap.num_constraints() != pk.num_constraints {
        return Err(Groth16Error::CircuitMismatch);
    }
    let h = qap.compute_quotient(w)?;
    if h.coeffs().len() > pk.h_query.len() {
        return Err(Groth16Error::InvalidWitness);
    }
    let mut h_coeffs = h.coeffs().to_vec();
    h_coeffs.resize(pk.h_query.len(), E::Scalar::zero());

    let r = E::Scalar::random(rng);
    let s = E::Scalar::random(rng);
    let l = pk.vk.num_public();
    let msm1 = |scalars: &[E::Scalar], points: &[E::G1]| multi_scalar_mul(scalars, points).expect("lengths checked");

    let a = pk.alpha_g1 + msm1(w, &pk.a_query) + pk.delta_g1.mul_scalar(&r);
    let b_g2 = pk.beta_g2 + multi_scalar_mul(w, &pk.b_g2_query).expect("lengths checked") + pk.delta_g2.mul_scalar(&s);
    let b_g1 = pk.beta_g1 + msm1(w, &pk.b_g1_query) + pk.delta_g1.mul_scalar(&s);
    let c = msm1(&w[l + 1..], &pk.l_query) + msm1(&h_coeffs, &pk.h_query) + a.mul_scalar(&s) + b_g1.mul_scalar(&r)
        - pk.delta_g1.mul_scalar(&(r * s));
    Ok(Proof { a, b: b_g2, c })
}

/// Checks a proof against the public inputs `x = w[1..=l]`.
pub fn verify<E: PairingEngine>(
    vk: &VerifyingKey<E>,
    proof: &Proof<E>,
    public_inputs: &[E::Scalar],
) -> Result<bool, Groth16Error> {
    if public_inputs.len() != vk.num_public() {
        return Err(Groth16Error::PublicInputLength {
            expected: vk.num_public(),
            got: public_inputs.len(),
        });
    }
    if !(proof.a.is_in_subgroup() && proof.b.is_in_subgroup() && proof.c.is_in_subgroup()) {
        return Ok(false);
    }
    let ic = vk.ic[0] + multi_scalar_mul(public_inputs, &vk.ic[1..]).expect("lengths checked");
    let lhs = E::pair(&proof.a, &proof.b);
    let rhs = vk.alpha_beta * E::pair(&ic, &vk.gamma_g2) * E::pair(&proof.c, &vk.delta_g2);
    Ok(lhs == rhs)
}

/// A key paired with its QAP, checked once.
pub struct Prover<E: PairingEngine> {
    pk: ProvingKey<E>,
    qap: QapInstance<E::Scalar>,
}

impl<E: PairingEngine> Prover<E> {
    pub fn new(pk: ProvingKey<E>, qap: QapInstance<E::Scalar>) -> Result<Self, Groth16Error> {
        pk.check_qap(&qap)?;
        Ok(Prover { pk, qap })
    }

    pub fn prove<R: RngCore + ?Sized>(&self, w: &[E::Scalar], rng: &mut R) -> Result<Proof<E>, Groth16Error> {
        prove(&self.pk, &self.qap, w, rng)
    }

    pub fn proving_key(&self) -> &ProvingKey<E> {
        &self.pk
    }

    pub fn verifying_key(&self) -> &VerifyingKey<E> {
        &self.pk.vk
    }

    pub fn qap(&self) -> &QapInstance<E::Scalar> {
        &self.qap
    }
}

/// Builds the QAP for `cs` and runs [`setup`], binding the keys to the
/// circuit hash.
pub fn setup_for<E: PairingEngine, R: RngCore + ?Sized>(
    cs: &crate::r1cs::ConstraintSystem<E::Scalar>,
    rng: &mut R,
) -> Result<Prover<E>, Groth16Error> {
    let qap = QapInstance::from_r1cs(cs);
    let (pk, _) = setup::<E, R>(&qap, cs.digest(), rng)?;
    Ok(Prover { pk, qap })
}
