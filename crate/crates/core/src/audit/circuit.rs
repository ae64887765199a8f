//! The audit circuit, unrolled for one challenge set.
//!
//! Ground truths, thresholds and scaling factors are public inputs held equal
//! to the build-time constants; the circuit computes with the constants.
//! Each image has `capacity` detection slots of private
//! `[class, confidence, x1, y1, x2, y2]`; class 0 marks an empty slot.
//!
//! The prover supplies the matching as one-hot hint wires `m[j][k]`. For
//! every detection `j` in slot order the circuit checks:
//! - `m[j][k] = 1` only if `(j, k)` is valid (class, confidence, IoU) and
//!   `k` is still free
//! - at most one `k` per `j`
//! - an unmatched `j` has no valid free `k`
//! - a matched `j` has no valid free `k'` with a larger IoU, or an equal
//!   IoU and a lower index
//!
//! Given sorted slots this pins the matching to the greedy one, so `PASS`
//! has exactly one satisfying value.
//!
//! Wire costs per detection/ground-truth pair are dominated by the
//! intersection (six `coord_bits` comparators) and the IoU threshold; per
//! detection, by one IoU ordering comparator for each pair of ground truths.

use super::{AuditError, AuditPublicInputs, AuditWitness, ChallengeSet};
use crate::commitment::sponge_gadget;
use crate::field::PrimeField;
use crate::pairing::Fr;
use crate::protocol::{set_context, ContextWires, DomainSeparator, APP_AUDIT, COMMITMENT_LABEL};
use crate::r1cs::{Assignment, CircuitBuilder, ConstraintSystem, LinearCombination, Variable};

/// Input and output wire labels.
pub mod labels {
    pub const DATASET: &str = "H_I";
    pub const DELTA_COMMIT: &str = "Delta_commit";
    pub const THRESHOLDS: [&str; 4] = ["theta_conf", "theta_iou", "tau_prec", "tau_rec"];
    pub const RHO_PROB: &str = "rho_prob";
    pub const RHO_BBOX: &str = "rho_bbox";
    pub const PASS: &str = "PASS";
    pub const S_SEC: &str = "s_sec";
    /// Fields of a ground truth, in allocation order.
    pub const GT_FIELDS: [&str; 6] = ["x1", "y1", "x2", "y2", "class", "critical"];
    /// Fields of a detection slot, in allocation and commitment order.
    pub const DET_FIELDS: [&str; 6] = ["class", "conf", "x1", "y1", "x2", "y2"];

    pub fn ground_truth(image: usize, k: usize, field: &str) -> String {
        format!("gt/{image}/{k}/{field}")
    }

    pub fn detection(image: usize, j: usize, field: &str) -> String {
        format!("det/{image}/{j}/{field}")
    }

    /// The hint wire `m[j][k]` of image `image`.
    pub fn matching(image: usize, j: usize, k: usize) -> String {
        format!("image{image}/det{j}/match{k}")
    }
}

pub struct AuditCircuit {
    pub cs: ConstraintSystem<Fr>,
    pub challenge: ChallengeSet,
}

fn constant(v: u64) -> LinearCombination<Fr> {
    LinearCombination::constant(Fr::from_u64(v))
}

fn lc(v: Variable) -> LinearCombination<Fr> {
    v.into()
}

fn bits_of(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// Per-slot wires.
struct Slot {
    class: Variable,
    conf: Variable,
    coords: [Variable; 4],
}

/// Per-pair quantities.
#[derive(Clone)]
struct Pair {
    inter: LinearCombination<Fr>,
    union: LinearCombination<Fr>,
    valid: Variable,
}

/// `max(d, g)` and `min(d, g)` against a constant, both below `2^bits`.
fn max_const(cs: &mut CircuitBuilder<Fr>, d: Variable, g: u64, bits: u32) -> LinearCombination<Fr> {
    let s = cs.geq_unchecked(d, constant(g), bits);
    let t = cs.mul(s, lc(d) - constant(g));
    constant(g) + t
}

fn min_const(cs: &mut CircuitBuilder<Fr>, d: Variable, g: u64, bits: u32) -> LinearCombination<Fr> {
    let s = cs.geq_unchecked(d, constant(g), bits);
    let t = cs.mul(s, lc(d) - constant(g));
    lc(d) - t
}

pub fn build_audit_circuit(challenge: &ChallengeSet) -> Result<AuditCircuit, AuditError> {
    use labels::*;
    challenge.validate()?;
    let cb = challenge.coord_bits;
    let pb = challenge.prob_bits;
    let t = challenge.thresholds;
    let rho_prob = challenge.scaling.prob;
    let mut cs = CircuitBuilder::<Fr>::new();

    let dataset = cs.alloc_public(DATASET);
    let delta = cs.alloc_public(DELTA_COMMIT);
    for (i, img) in challenge.images.iter().enumerate() {
        for (k, g) in img.ground_truths.iter().enumerate() {
            let b = g.bbox;
            let values = [b.x1, b.y1, b.x2, b.y2, g.class_id, g.critical as u64];
            for (f, v) in GT_FIELDS.iter().zip(values) {
                let w = cs.alloc_public(&ground_truth(i, k, f));
                cs.enforce_equal("ground-truth", w, constant(v));
            }
        }
    }
    for (name, r) in THRESHOLDS
        .iter()
        .zip([t.theta_conf, t.theta_iou, t.tau_prec, t.tau_rec])
    {
        let num = cs.alloc_public(&format!("{name}/num"));
        let den = cs.alloc_public(&format!("{name}/den"));
        cs.enforce_equal(name, num, constant(r.num));
        cs.enforce_equal(name, den, constant(r.den));
    }
    let rho_p = cs.alloc_public(RHO_PROB);
    let rho_b = cs.alloc_public(RHO_BBOX);
    cs.enforce_equal(RHO_PROB, rho_p, constant(rho_prob));
    cs.enforce_equal(RHO_BBOX, rho_b, constant(challenge.scaling.bbox));
    let ctx = ContextWires::alloc(&mut cs);

    let slots: Vec<Vec<Slot>> = (0..challenge.num_images())
        .map(|i| {
            (0..challenge.capacity)
                .map(|j| {
                    let [class, conf, x1, y1, x2, y2] = DET_FIELDS.map(|f| cs.alloc_private(&detection(i, j, f)));
                    Slot {
                        class,
                        conf,
                        coords: [x1, y1, x2, y2],
                    }
                })
                .collect()
        })
        .collect();
    let s_sec = cs.alloc_private(S_SEC);

    let digest = challenge.digest_field();
    cs.enforce_equal(DATASET, dataset, LinearCombination::constant(digest));
    let delta_value = DomainSeparator::commit(APP_AUDIT).value() as u64;
    cs.enforce_equal(DELTA_COMMIT, delta, constant(delta_value));

    let mut all_pass = LinearCombination::constant(Fr::one());
    for (i, img) in challenge.images.iter().enumerate() {
        let ok = cs.scoped(&format!("image{i}"), |cs| {
            image_constraints(cs, challenge, &img.ground_truths, &slots[i], cb, pb, rho_prob)
        });
        all_pass = cs.and(all_pass, ok).into();
    }
    let pass = cs.alloc_public_with(PASS, {
        let all_pass = all_pass.clone();
        move |v| Ok(v.eval(&all_pass))
    });
    cs.enforce_equal(PASS, pass, all_pass);

    let mut message: Vec<LinearCombination<Fr>> = vec![delta.into(), constant(challenge.num_images() as u64)];
    for s in slots.iter().flatten() {
        message.push(s.class.into());
        message.push(s.conf.into());
        message.extend(s.coords.map(LinearCombination::from));
    }
    message.extend(ctx.variables().into_iter().map(LinearCombination::from));
    message.push(s_sec.into());
    let digest = sponge_gadget(&mut cs, &message);
    let c = cs.alloc_public_with(COMMITMENT_LABEL, move |v| Ok(v.get(digest)));
    cs.enforce_equal(COMMITMENT_LABEL, c, digest);

    Ok(AuditCircuit {
        cs: cs.finalize().map_err(|e| AuditError::Challenge(e.to_string()))?,
        challenge: challenge.clone(),
    })
}

/// Constraints of one image; returns `pass_i AND crit_pass_i`.
#[allow(clippy::too_many_arguments)]
fn image_constraints(
    cs: &mut CircuitBuilder<Fr>,
    challenge: &ChallengeSet,
    gts: &[crate::audit::GroundTruth],
    slots: &[Slot],
    cb: u32,
    pb: u32,
    rho_prob: u64,
) -> Variable {
    let t = challenge.thresholds;
    let kk = gts.len();

    // Slot ranges, box order, confidence at most the scale, sort order.
    let mut areas = Vec::with_capacity(slots.len());
    let mut present = LinearCombination::zero();
    let mut confident = Vec::with_capacity(slots.len());
    for (j, s) in slots.iter().enumerate() {
        cs.scoped(&format!("det{j}"), |cs| {
            cs.range_check(s.conf, pb);
            for c in s.coords {
                cs.range_check(c, cb);
            }
            let [x1, y1, x2, y2] = s.coords;
            let ox = cs.geq_unchecked(x2, x1, cb);
            cs.enforce_equal("x-order", ox, Variable::ONE);
            let oy = cs.geq_unchecked(y2, y1, cb);
            cs.enforce_equal("y-order", oy, Variable::ONE);
            let le = cs.geq_unchecked(constant(rho_prob), s.conf, pb);
            cs.enforce_equal("confidence-scale", le, Variable::ONE);
            areas.push(cs.mul(lc(x2) - lc(x1), lc(y2) - lc(y1)));
            let empty = cs.is_equal(s.class, constant(0));
            present = present.clone() + cs.not(empty);
            let cbits = pb + bits_of(t.theta_conf.den);
            confident.push(cs.geq_unchecked(
                lc(s.conf).scale(Fr::from_u64(t.theta_conf.den)),
                constant(t.theta_conf.num * rho_prob),
                cbits,
            ));
        });
    }
    for j in 1..slots.len() {
        let sorted = cs.scoped("sort", |cs| cs.geq_unchecked(slots[j - 1].conf, slots[j].conf, pb));
        cs.enforce_equal("sort", sorted, Variable::ONE);
    }

    // Intersection, union, validity of every pair.
    let iou_bits = 2 * cb + 1 + bits_of(t.theta_iou.num.max(t.theta_iou.den));
    let mut pairs: Vec<Vec<Pair>> = Vec::with_capacity(slots.len());
    for (j, s) in slots.iter().enumerate() {
        let row = gts
            .iter()
            .enumerate()
            .map(|(k, g)| {
                cs.scoped(&format!("pair{j}.{k}"), |cs| {
                    let b = g.bbox;
                    let [x1, y1, x2, y2] = s.coords;
                    let side = |cs: &mut CircuitBuilder<Fr>, lo: Variable, glo: u64, hi: Variable, ghi: u64| {
                        let lo = max_const(cs, lo, glo, cb);
                        let hi = min_const(cs, hi, ghi, cb);
                        let overlap = cs.geq_unchecked(hi.clone(), lo.clone(), cb);
                        cs.mul(overlap, hi - lo)
                    };
                    let w = side(cs, x1, b.x1, x2, b.x2);
                    let h = side(cs, y1, b.y1, y2, b.y2);
                    let inter = lc(cs.mul(w, h));
                    let union = lc(areas[j]) + constant(b.area()) - inter.clone();
                    let iou_ok = cs.geq_unchecked(
                        inter.scale(Fr::from_u64(t.theta_iou.den)),
                        union.scale(Fr::from_u64(t.theta_iou.num)),
                        iou_bits,
                    );
                    let same_class = cs.is_equal(s.class, constant(g.class_id));
                    let v = cs.and(same_class, iou_ok);
                    let valid = cs.and(v, confident[j]);
                    Pair { inter, union, valid }
                })
            })
            .collect();
        pairs.push(row);
    }

    // Greedy matching hints and their checks.
    let ratio_bits = 4 * cb + 1;
    let mut taken: Vec<LinearCombination<Fr>> = vec![LinearCombination::zero(); kk];
    let mut tp = LinearCombination::zero();
    let mut tp_crit = LinearCombination::zero();
    for j in 0..slots.len() {
        cs.scoped(&format!("det{j}"), |cs| {
            let avail: Vec<Variable> = (0..kk)
                .map(|k| {
                    let free = cs.not(taken[k].clone());
                    cs.mul(pairs[j][k].valid, free)
                })
                .collect();
            let scores: Vec<(LinearCombination<Fr>, LinearCombination<Fr>)> =
                pairs[j].iter().map(|p| (p.inter.clone(), p.union.clone())).collect();
            let m: Vec<Variable> = (0..kk)
                .map(|k| {
                    let (av, sc) = (avail.clone(), scores.clone());
                    let m = cs.alloc_private_with(&format!("match{k}"), move |v| {
                        Ok(if greedy_choice(v, &av, &sc)? == Some(k) {
                            Fr::one()
                        } else {
                            Fr::zero()
                        })
                    });
                    cs.assert_boolean(m);
                    cs.enforce_labeled("match-valid", m, cs.not(avail[k]), LinearCombination::zero());
                    m
                })
                .collect();
            let matched: LinearCombination<Fr> = m.iter().fold(LinearCombination::zero(), |a, &x| a + x);
            cs.assert_boolean(matched.clone());
            for &a in &avail {
                cs.enforce_labeled("maximal", cs.not(matched.clone()), a, LinearCombination::zero());
            }
            for k in 0..kk {
                for k2 in k + 1..kk {
                    let (ik, uk) = &scores[k];
                    let (ik2, uk2) = &scores[k2];
                    let lhs = cs.mul(ik.clone(), uk2.clone());
                    let rhs = cs.mul(ik2.clone(), uk.clone());
                    let k_first = cs.geq_unchecked(lhs, rhs, ratio_bits);
                    let a = cs.mul(m[k], avail[k2]);
                    cs.enforce_labeled("best", a, cs.not(k_first), LinearCombination::zero());
                    let b = cs.mul(m[k2], avail[k]);
                    cs.enforce_labeled("best", b, k_first, LinearCombination::zero());
                }
            }
            for k in 0..kk {
                taken[k] = taken[k].clone() + m[k];
                if gts[k].critical {
                    tp_crit = tp_crit.clone() + m[k];
                }
            }
            tp = tp.clone() + matched;
        });
    }

    // Thresholds for the image.
    let count_bits = bits_of(slots.len().max(kk) as u64);
    let tp_at = |r: crate::audit::Ratio| count_bits + bits_of(r.num.max(r.den));
    let precision = cs.geq_unchecked(
        tp.scale(Fr::from_u64(t.tau_prec.den)),
        present.scale(Fr::from_u64(t.tau_prec.num)),
        tp_at(t.tau_prec),
    );
    let recall = cs.geq_unchecked(
        tp.scale(Fr::from_u64(t.tau_rec.den)),
        constant(t.tau_rec.num * kk as u64),
        tp_at(t.tau_rec),
    );
    let total_crit = gts.iter().filter(|g| g.critical).count() as u64;
    let crit_pass = cs.is_equal(tp_crit, constant(total_crit));
    let pass = cs.and(precision, recall);
    cs.and(pass, crit_pass)
}

/// The index greedy matching picks among the available ground truths.
fn greedy_choice(
    v: &crate::r1cs::Values<'_, Fr>,
    avail: &[Variable],
    scores: &[(LinearCombination<Fr>, LinearCombination<Fr>)],
) -> Result<Option<usize>, String> {
    let int = |lc: &LinearCombination<Fr>| v.eval(lc).to_u64().ok_or("IoU term out of range");
    let mut best: Option<(usize, u128, u128)> = None;
    for (k, a) in avail.iter().enumerate() {
        if v.get(*a) != Fr::one() {
            continue;
        }
        let (i, u) = (int(&scores[k].0)? as u128, int(&scores[k].1)? as u128);
        if best.is_none_or(|(_, bi, bu)| i * bu > bi * u) {
            best = Some((k, i, u));
        }
    }
    Ok(best.map(|(k, _, _)| k))
}

impl AuditCircuit {
    /// Input assignment for `(x, w)`; `PASS`, `c` and the hints are solved.
    pub fn assignment(&self, x: &AuditPublicInputs, w: &AuditWitness) -> Assignment<Fr> {
        use labels::*;
        let c = &self.challenge;
        let t = c.thresholds;
        let mut a = Assignment::new();
        a.set(DATASET, x.dataset_digest)
            .set(DELTA_COMMIT, Fr::from_u64(x.delta_commit as u64))
            .set(RHO_PROB, Fr::from_u64(c.scaling.prob))
            .set(RHO_BBOX, Fr::from_u64(c.scaling.bbox))
            .set(S_SEC, w.s_sec.value());
        for (i, img) in c.images.iter().enumerate() {
            for (k, g) in img.ground_truths.iter().enumerate() {
                let b = g.bbox;
                let values = [b.x1, b.y1, b.x2, b.y2, g.class_id, g.critical as u64];
                for (f, v) in GT_FIELDS.iter().zip(values) {
                    a.set(ground_truth(i, k, f), Fr::from_u64(v));
                }
            }
        }
        for (name, r) in THRESHOLDS
            .iter()
            .zip([t.theta_conf, t.theta_iou, t.tau_prec, t.tau_rec])
        {
            a.set(format!("{name}/num"), Fr::from_u64(r.num));
            a.set(format!("{name}/den"), Fr::from_u64(r.den));
        }
        for (i, dets) in w.detections.iter().enumerate() {
            for (j, d) in dets.iter().enumerate() {
                let b = d.bbox;
                let values = [d.class_id, d.confidence, b.x1, b.y1, b.x2, b.y2];
                for (f, v) in DET_FIELDS.iter().zip(values) {
                    a.set(detection(i, j, f), Fr::from_u64(v));
                }
            }
        }
        set_context(&mut a, x.timestamp, &x.nonce);
        a
    }

    pub fn pass_position(&self) -> usize {
        self.public_position(labels::PASS)
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
