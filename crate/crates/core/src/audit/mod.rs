//! Model auditing on a challenge set: greedy IoU matching, per-image
//! precision and recall thresholds, full recall on safety-critical objects,
//! and the circuit that proves the outcome.
//!
//! All quantities are integers. Boxes are in scaled pixel coordinates,
//! confidences are scaled by `rho_prob`, and every threshold is a fraction
//! compared by cross-multiplication.

mod circuit;
mod format;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::commitment::{byte_hash, commit, BlindingFactor, Commitment};
use crate::field::PrimeField;
use crate::pairing::Fr;
use crate::protocol::{nonce_to_limbs, DomainSeparator, Nonce, APP_AUDIT};
use crate::r1cs::PROB_BITS;

pub use circuit::{build_audit_circuit, labels, AuditCircuit};
pub use format::{parse_challenge, parse_detections, write_detections};

/// Default coordinate width: boxes inside a 4096 x 4096 frame.
pub const COORD_BITS: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AuditError {
    #[error("image {image}: detections not sorted by confidence at position {index}")]
    Unsorted { image: usize, index: usize },
    #[error("image {image}: {count} detections exceed the capacity {capacity}")]
    Capacity {
        image: usize,
        count: usize,
        capacity: usize,
    },
    #[error("expected detections for {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("invalid box {0:?}")]
    InvalidBox(BBox),
    #[error("invalid threshold {name} = {value}")]
    Threshold { name: &'static str, value: Ratio },
    #[error("inconsistent counts: {0}")]
    Counts(String),
    #[error("invalid challenge set: {0}")]
    Challenge(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A non-negative fraction `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }

    /// `a / b >= self`, as `a * den >= num * b`.
    pub fn le_fraction(&self, a: u64, b: u64) -> bool {
        a as u128 * self.den as u128 >= self.num as u128 * b as u128
    }

    fn check_unit(self, name: &'static str) -> Result<(), AuditError> {
        if self.den == 0 || self.num > self.den {
            return Err(AuditError::Threshold { name, value: self });
        }
        Ok(())
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Axis-aligned box `[x1, x2] x [y1, y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BBox {
    pub x1: u64,
    pub y1: u64,
    pub x2: u64,
    pub y2: u64,
}

impl BBox {
    pub const fn new(x1: u64, y1: u64, x2: u64, y2: u64) -> Self {
        BBox { x1, y1, x2, y2 }
    }

    pub fn is_ordered(&self) -> bool {
        self.x1 <= self.x2 && self.y1 <= self.y2
    }

    pub fn area(&self) -> u64 {
        (self.x2 - self.x1) * (self.y2 - self.y1)
    }

    pub fn intersection(&self, other: &BBox) -> u64 {
        let w = self.x2.min(other.x2).saturating_sub(self.x1.max(other.x1));
        let h = self.y2.min(other.y2).saturating_sub(self.y1.max(other.y1));
        w * h
    }

    /// `(intersection, union)` areas.
    pub fn overlap(&self, other: &BBox) -> (u64, u64) {
        let i = self.intersection(other);
        (i, self.area() + other.area() - i)
    }

    fn coords(&self) -> [u64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub bbox: BBox,
    pub class_id: u64,
    pub critical: bool,
}

/// Class id 0 is reserved for empty detection slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: BBox,
    pub class_id: u64,
    /// Confidence scaled by `rho_prob`.
    pub confidence: u64,
}

impl Detection {
    pub const PADDING: Detection = Detection {
        bbox: BBox::new(0, 0, 0, 0),
        class_id: 0,
        confidence: 0,
    };
}

/// `IoU(a, b) >= theta`, as `inter * den >= num * union`. A zero-area union
/// passes only a zero threshold.
pub fn iou_compare(a: &BBox, b: &BBox, theta: Ratio) -> bool {
    let (inter, union) = a.overlap(b);
    if union == 0 {
        return theta.num == 0;
    }
    theta.le_fraction(inter, union)
}

/// Compares `i1 / u1` with `i2 / u2`; both unions must be positive.
fn cmp_iou((i1, u1): (u64, u64), (i2, u2): (u64, u64)) -> Ordering {
    (i1 as u128 * u2 as u128).cmp(&(i2 as u128 * u1 as u128))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditThresholds {
    pub theta_conf: Ratio,
    pub theta_iou: Ratio,
    pub tau_prec: Ratio,
    pub tau_rec: Ratio,
}

impl Default for AuditThresholds {
    fn default() -> Self {
        AuditThresholds {
            theta_conf: Ratio::new(1, 2),
            theta_iou: Ratio::new(1, 2),
            tau_prec: Ratio::new(1, 2),
            tau_rec: Ratio::new(1, 2),
        }
    }
}

impl AuditThresholds {
    pub fn validate(&self) -> Result<(), AuditError> {
        self.theta_conf.check_unit("theta_conf")?;
        self.theta_iou.check_unit("theta_iou")?;
        self.tau_prec.check_unit("tau_prec")?;
        self.tau_rec.check_unit("tau_rec")?;
        if self.theta_conf.num == 0 {
            return Err(AuditError::Threshold {
                name: "theta_conf",
                value: self.theta_conf,
            });
        }
        Ok(())
    }

    /// `confidence / rho_prob >= theta_conf`.
    pub fn confident(&self, confidence: u64, rho_prob: u64) -> bool {
        self.theta_conf.le_fraction(confidence, rho_prob)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditScaling {
    pub prob: u64,
    pub bbox: u64,
}

impl Default for AuditScaling {
    fn default() -> Self {
        AuditScaling { prob: 100, bbox: 1 }
    }
}

/// Outcome of matching one image.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchResult {
    pub tp: usize,
    pub tp_crit: usize,
    /// For each detection, the index of its ground truth.
    pub matches: Vec<Option<usize>>,
}

fn check_sorted(image: usize, dets: &[Detection]) -> Result<(), AuditError> {
    match dets.windows(2).position(|w| w[0].confidence < w[1].confidence) {
        Some(i) => Err(AuditError::Unsorted { image, index: i + 1 }),
        None => Ok(()),
    }
}

/// Greedy matching of `dets`, sorted by descending confidence. Each
/// detection takes the unmatched ground truth of its class with the highest
/// IoU at or above the threshold; ties go to the lowest index.
pub fn greedy_match(
    dets: &[Detection],
    gts: &[GroundTruth],
    thresholds: &AuditThresholds,
    rho_prob: u64,
) -> Result<MatchResult, AuditError> {
    check_sorted(0, dets)?;
    let mut taken = vec![false; gts.len()];
    let mut out = MatchResult::default();
    for d in dets {
        let mut best: Option<(usize, (u64, u64))> = None;
        if thresholds.confident(d.confidence, rho_prob) {
            for (k, g) in gts.iter().enumerate() {
                if taken[k] || g.class_id != d.class_id {
                    continue;
                }
                if !iou_compare(&d.bbox, &g.bbox, thresholds.theta_iou) {
                    continue;
                }
                let iou = d.bbox.overlap(&g.bbox);
                if best.is_none_or(|(_, b)| cmp_iou(iou, b) == Ordering::Greater) {
                    best = Some((k, iou));
                }
            }
        }
        let m = best.map(|(k, _)| k);
        if let Some(k) = m {
            taken[k] = true;
            out.tp += 1;
            out.tp_crit += gts[k].critical as usize;
        }
        out.matches.push(m);
    }
    Ok(out)
}

/// `(pass_i, crit_pass_i)`. An image without detections meets the precision
/// mark.
pub fn check_metrics(
    tp: usize,
    tp_crit: usize,
    m: usize,
    k: usize,
    total_crit: usize,
    thresholds: &AuditThresholds,
) -> Result<(bool, bool), AuditError> {
    if tp > m.min(k) || tp_crit > tp || tp_crit > total_crit || total_crit > k {
        return Err(AuditError::Counts(format!(
            "tp {tp}, tp_crit {tp_crit}, M {m}, K {k}, critical {total_crit}"
        )));
    }
    let precision = thresholds.tau_prec.le_fraction(tp as u64, m as u64);
    let recall = thresholds.tau_rec.le_fraction(tp as u64, k as u64);
    Ok((precision && recall, tp_crit == total_crit))
}

/// Stable sort by descending confidence. `perm[i]` is the input index of
/// the `i`-th output.
pub fn off_circuit_sort(dets: &[Detection]) -> (Vec<Detection>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..dets.len()).collect();
    perm.sort_by(|&a, &b| dets[b].confidence.cmp(&dets[a].confidence));
    (perm.iter().map(|&i| dets[i]).collect(), perm)
}

/// One challenge image: an opaque content digest and its labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChallengeImage {
    pub digest: [u8; 32],
    pub ground_truths: Vec<GroundTruth>,
}

impl ChallengeImage {
    pub fn total_critical(&self) -> usize {
        self.ground_truths.iter().filter(|g| g.critical).count()
    }
}

/// The challenge set issued by the authority, with everything the circuit
/// fixes at build time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChallengeSet {
    pub images: Vec<ChallengeImage>,
    pub thresholds: AuditThresholds,
    pub scaling: AuditScaling,
    /// Detection slots per image.
    pub capacity: usize,
    pub coord_bits: u32,
    pub prob_bits: u32,
}

impl ChallengeSet {
    pub fn new(images: Vec<ChallengeImage>, thresholds: AuditThresholds, capacity: usize) -> Self {
        ChallengeSet {
            images,
            thresholds,
            scaling: AuditScaling::default(),
            capacity,
            coord_bits: COORD_BITS,
            prob_bits: PROB_BITS,
        }
    }

    /// Ground truths must be ordered boxes of positive area with a class
    /// other than 0, inside the coordinate range.
    pub fn validate(&self) -> Result<(), AuditError> {
        self.thresholds.validate()?;
        let s = &self.scaling;
        if s.prob == 0 || s.bbox == 0 {
            return Err(AuditError::Challenge("scaling factors must be at least 1".into()));
        }
        if self.capacity == 0 {
            return Err(AuditError::Challenge("capacity must be at least 1".into()));
        }
        if self.coord_bits == 0 || 4 * self.coord_bits + 3 > Fr::CAPACITY {
            return Err(AuditError::Challenge(format!(
                "coordinate width {} unsupported",
                self.coord_bits
            )));
        }
        if self.prob_bits == 0 || s.prob >= 1 << self.prob_bits {
            return Err(AuditError::Challenge(format!(
                "probability scale {} does not fit in {} bits",
                s.prob, self.prob_bits
            )));
        }
        let t = &self.thresholds;
        for r in [t.theta_conf, t.theta_iou, t.tau_prec, t.tau_rec] {
            if r.den >= 1 << 16 {
                return Err(AuditError::Challenge(format!("denominator of {r} above 2^16")));
            }
        }
        let limit = 1u64 << self.coord_bits;
        for g in self.images.iter().flat_map(|i| &i.ground_truths) {
            let b = g.bbox;
            if b.x1 >= b.x2 || b.y1 >= b.y2 || b.x2 >= limit || b.y2 >= limit {
                return Err(AuditError::InvalidBox(b));
            }
            if g.class_id == 0 {
                return Err(AuditError::Challenge("class 0 is reserved for padding".into()));
            }
        }
        Ok(())
    }

    pub fn num_images(&self) -> usize {
        self.images.len()
    }

    /// Canonical text form; see [`parse_challenge`].
    pub fn to_canonical(&self) -> String {
        format::write_challenge(self)
    }

    /// `H(I)`: SHA-256 of the canonical form.
    pub fn digest(&self) -> [u8; 32] {
        byte_hash(self.to_canonical().as_bytes())
    }

    /// The digest reduced into the field.
    pub fn digest_field(&self) -> Fr {
        Fr::from_le_bytes_reduce(&self.digest())
    }

    /// Checks detections against the challenge: one list per image, within
    /// capacity, sorted, with ordered boxes and confidences in range.
    pub fn check_detections(&self, dets: &[Vec<Detection>]) -> Result<(), AuditError> {
        if dets.len() != self.images.len() {
            return Err(AuditError::ImageCount {
                expected: self.images.len(),
                got: dets.len(),
            });
        }
        let limit = 1u64 << self.coord_bits;
        for (i, d) in dets.iter().enumerate() {
            if d.len() > self.capacity {
                return Err(AuditError::Capacity {
                    image: i,
                    count: d.len(),
                    capacity: self.capacity,
                });
            }
            check_sorted(i, d)?;
            for det in d {
                let b = det.bbox;
                if !b.is_ordered() || b.x2 >= limit || b.y2 >= limit {
                    return Err(AuditError::InvalidBox(b));
                }
                if det.confidence > self.scaling.prob {
                    return Err(AuditError::Counts(format!(
                        "confidence {} above the scale {}",
                        det.confidence, self.scaling.prob
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Per-image and overall outcome of an audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditOutcome {
    pub per_image: Vec<ImageOutcome>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageOutcome {
    pub matching: MatchResult,
    pub pass: bool,
    pub crit_pass: bool,
}

impl AuditOutcome {
    pub fn tp(&self) -> usize {
        self.per_image.iter().map(|o| o.matching.tp).sum()
    }

    pub fn tp_crit(&self) -> usize {
        self.per_image.iter().map(|o| o.matching.tp_crit).sum()
    }
}

/// Native evaluation of the audit: PASS holds when every image meets both
/// marks and detects all of its critical objects.
pub fn evaluate_audit(challenge: &ChallengeSet, dets: &[Vec<Detection>]) -> Result<AuditOutcome, AuditError> {
    challenge.check_detections(dets)?;
    let t = &challenge.thresholds;
    let mut per_image = Vec::with_capacity(dets.len());
    for (i, (img, d)) in challenge.images.iter().zip(dets).enumerate() {
        let matching = greedy_match(d, &img.ground_truths, t, challenge.scaling.prob).map_err(|e| match e {
            AuditError::Unsorted { index, .. } => AuditError::Unsorted { image: i, index },
            e => e,
        })?;
        let real = d.iter().filter(|x| x.class_id != 0).count();
        let (pass, crit_pass) = check_metrics(
            matching.tp,
            matching.tp_crit,
            real,
            img.ground_truths.len(),
            img.total_critical(),
            t,
        )?;
        per_image.push(ImageOutcome {
            matching,
            pass,
            crit_pass,
        });
    }
    let pass = per_image.iter().all(|o| o.pass && o.crit_pass);
    Ok(AuditOutcome { per_image, pass })
}

/// Detections padded to `capacity` slots per image.
pub fn pad_detections(dets: &[Vec<Detection>], capacity: usize) -> Vec<Vec<Detection>> {
    dets.iter()
        .map(|d| {
            let mut d = d.clone();
            d.resize(capacity.max(d.len()), Detection::PADDING);
            d
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditPublicInputs {
    pub dataset_digest: Fr,
    pub delta_commit: u32,
    pub timestamp: u64,
    pub nonce: Nonce,
    pub commitment: Commitment<Fr>,
    pub pass: bool,
}

/// Padded detections and the blinding factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditWitness {
    pub detections: Vec<Vec<Detection>>,
    pub s_sec: BlindingFactor<Fr>,
}

/// `(Δ_commit, N, D, T, ν)` with `D` flattened slot by slot as
/// `[class, confidence, x1, y1, x2, y2]`.
pub fn audit_commitment_message(x: &AuditPublicInputs, w: &AuditWitness) -> Vec<Fr> {
    let mut m = vec![
        Fr::from_u64(x.delta_commit as u64),
        Fr::from_u64(w.detections.len() as u64),
    ];
    for d in w.detections.iter().flatten() {
        m.push(Fr::from_u64(d.class_id));
        m.push(Fr::from_u64(d.confidence));
        m.extend(d.bbox.coords().map(Fr::from_u64));
    }
    m.push(Fr::from_u64(x.timestamp));
    m.extend(nonce_to_limbs::<Fr>(&x.nonce));
    m
}

/// Sorts and pads the detections, evaluates the audit natively, and
/// computes the commitment.
pub fn make_audit_inputs(
    challenge: &ChallengeSet,
    detections: &[Vec<Detection>],
    timestamp: u64,
    nonce: Nonce,
    s_sec: BlindingFactor<Fr>,
) -> Result<(AuditPublicInputs, AuditWitness), AuditError> {
    let sorted: Vec<Vec<Detection>> = detections.iter().map(|d| off_circuit_sort(d).0).collect();
    let outcome = evaluate_audit(challenge, &sorted)?;
    let w = AuditWitness {
        detections: pad_detections(&sorted, challenge.capacity),
        s_sec,
    };
    let mut x = AuditPublicInputs {
        dataset_digest: challenge.digest_field(),
        delta_commit: DomainSeparator::commit(APP_AUDIT).value(),
        timestamp,
        nonce,
        commitment: Commitment(Fr::zero()),
        pass: outcome.pass,
    };
    x.commitment = commit(&audit_commitment_message(&x, &w), &w.s_sec);
    Ok((x, w))
}

/// A fleet audit over five images with four labelled objects each, one of
/// them critical. The model finds fifteen objects and reports one phantom.
/// It misses a critical object in the last image, so the audit fails.
pub fn sample_audit() -> (ChallengeSet, Vec<Vec<Detection>>) {
    const CLASSES: [u64; 4] = [1, 2, 3, 4];
    let mut images = Vec::new();
    let mut dets = Vec::new();
    for i in 0..5u64 {
        let gts: Vec<GroundTruth> = (0..4u64)
            .map(|k| GroundTruth {
                bbox: BBox::new(100 + 400 * k, 200 + 10 * i, 300 + 400 * k, 500 + 10 * i),
                class_id: CLASSES[k as usize],
                critical: k == 1,
            })
            .collect();
        let mut digest = [0u8; 32];
        digest[0] = i as u8;
        let missed = if i == 4 { 1 } else { 3 };
        let mut found: Vec<Detection> = gts
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != missed)
            .map(|(k, g)| Detection {
                bbox: BBox::new(g.bbox.x1 + 8, g.bbox.y1 + 6, g.bbox.x2 + 4, g.bbox.y2 - 10),
                class_id: g.class_id,
                confidence: 95 - 7 * k as u64 - i,
            })
            .collect();
        if i == 0 {
            found.push(Detection {
                bbox: BBox::new(3000, 3000, 3200, 3300),
                class_id: 1,
                confidence: 61,
            });
        }
        images.push(ChallengeImage {
            digest,
            ground_truths: gts,
        });
        dets.push(found);
    }
    (ChallengeSet::new(images, AuditThresholds::default(), 4), dets)
}
