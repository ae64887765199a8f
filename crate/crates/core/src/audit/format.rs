//! Text files for challenge sets and detections.
//!
//! Challenge set, canonical form (every line ends in `\n`, single spaces,
//! decimal integers without leading zeros, lowercase hex):
//!
//! ```text
//! challenge-set 1
//! capacity <M_max>
//! bits <coord_bits> <prob_bits>
//! scaling <rho_prob> <rho_bbox>
//! theta_conf <num>/<den>
//! theta_iou <num>/<den>
//! tau_prec <num>/<den>
//! tau_rec <num>/<den>
//! image <64 hex digits>
//! gt <class> <x1> <y1> <x2> <y2> <critical 0|1>
//! ...
//! ```
//!
//! The dataset digest is the SHA-256 of these bytes. The parser also accepts
//! blank lines and `#` comments, which the canonical form drops.
//!
//! Detections:
//!
//! ```text
//! detections 1
//! image <index>
//! det <class> <confidence> <x1> <y1> <x2> <y2>
//! ```

use std::fmt::Write;

use super::{
    AuditError, AuditScaling, AuditThresholds, BBox, ChallengeImage, ChallengeSet, Detection, GroundTruth, Ratio,
};

pub(super) fn write_challenge(c: &ChallengeSet) -> String {
    let t = &c.thresholds;
    let mut s = String::new();
    let _ = writeln!(s, "challenge-set 1");
    let _ = writeln!(s, "capacity {}", c.capacity);
    let _ = writeln!(s, "bits {} {}", c.coord_bits, c.prob_bits);
    let _ = writeln!(s, "scaling {} {}", c.scaling.prob, c.scaling.bbox);
    let _ = writeln!(s, "theta_conf {}", t.theta_conf);
    let _ = writeln!(s, "theta_iou {}", t.theta_iou);
    let _ = writeln!(s, "tau_prec {}", t.tau_prec);
    let _ = writeln!(s, "tau_rec {}", t.tau_rec);
    for img in &c.images {
        let _ = writeln!(s, "image {}", hex(&img.digest));
        for g in &img.ground_truths {
            let b = g.bbox;
            let _ = writeln!(
                s,
                "gt {} {} {} {} {} {}",
                g.class_id, b.x1, b.y1, b.x2, b.y2, g.critical as u8
            );
        }
    }
    s
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn unhex(s: &str) -> Option<[u8; 32]> {
    if s.len() != 64 || !s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        return None;
    }
    let mut out = [0u8; 32];
    for (i, o) in out.iter_mut().enumerate() {
        *o = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).ok()?;
    }
    Some(out)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    fn next_fields(&mut self) -> Option<Vec<&'a str>> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Some(l.split_whitespace().collect());
        }
        None
    }

    fn err(&self, message: impl Into<String>) -> AuditError {
        AuditError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn expect(&mut self, key: &str, arity: usize) -> Result<Vec<&'a str>, AuditError> {
        let f = self.next_fields().ok_or_else(|| self.err(format!("missing `{key}`")))?;
        if f[0] != key || f.len() != arity + 1 {
            return Err(self.err(format!("expected `{key}` with {arity} values")));
        }
        Ok(f[1..].to_vec())
    }

    fn int(&self, s: &str) -> Result<u64, AuditError> {
        s.parse().map_err(|_| self.err(format!("`{s}` is not an integer")))
    }

    fn ratio(&self, s: &str) -> Result<Ratio, AuditError> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| self.err(format!("`{s}` is not a fraction")))?;
        Ok(Ratio::new(self.int(n)?, self.int(d)?))
    }
}

pub fn parse_challenge(text: &str) -> Result<ChallengeSet, AuditError> {
    let mut l = Lines::new(text);
    if l.expect("challenge-set", 1)? != ["1"] {
        return Err(l.err("unsupported challenge-set version"));
    }
    let cap = l.expect("capacity", 1)?;
    let capacity = l.int(cap[0])? as usize;
    let bits = l.expect("bits", 2)?;
    let (coord_bits, prob_bits) = (l.int(bits[0])? as u32, l.int(bits[1])? as u32);
    let sc = l.expect("scaling", 2)?;
    let scaling = AuditScaling {
        prob: l.int(sc[0])?,
        bbox: l.int(sc[1])?,
    };
    let mut ratio = |key: &str| -> Result<Ratio, AuditError> {
        let v = l.expect(key, 1)?;
        l.ratio(v[0])
    };
    let thresholds = AuditThresholds {
        theta_conf: ratio("theta_conf")?,
        theta_iou: ratio("theta_iou")?,
        tau_prec: ratio("tau_prec")?,
        tau_rec: ratio("tau_rec")?,
    };
    let mut images: Vec<ChallengeImage> = Vec::new();
    while let Some(f) = l.next_fields() {
        match (f[0], f.len()) {
            ("image", 2) => {
                let digest = unhex(f[1]).ok_or_else(|| l.err("image digest must be 64 lowercase hex digits"))?;
                images.push(ChallengeImage {
                    digest,
                    ground_truths: Vec::new(),
                });
            }
            ("gt", 7) => {
                let v: Vec<u64> = f[1..].iter().map(|s| l.int(s)).collect::<Result<_, _>>()?;
                if v[5] > 1 {
                    return Err(l.err("critical flag must be 0 or 1"));
                }
                let img = images.last_mut().ok_or_else(|| l.err("`gt` before any `image`"))?;
                img.ground_truths.push(GroundTruth {
                    bbox: BBox::new(v[1], v[2], v[3], v[4]),
                    class_id: v[0],
                    critical: v[5] == 1,
                });
            }
            _ => return Err(l.err(format!("unexpected `{}`", f.join(" ")))),
        }
    }
    let c = ChallengeSet {
        images,
        thresholds,
        scaling,
        capacity,
        coord_bits,
        prob_bits,
    };
    c.validate()?;
    Ok(c)
}

pub fn write_detections(dets: &[Vec<Detection>]) -> String {
    let mut s = String::from("detections 1\n");
    for (i, d) in dets.iter().enumerate() {
        let _ = writeln!(s, "image {i}");
        for x in d {
            let b = x.bbox;
            let _ = writeln!(
                s,
                "det {} {} {} {} {} {}",
                x.class_id, x.confidence, b.x1, b.y1, b.x2, b.y2
            );
        }
    }
    s
}

/// Detections grouped by image; images must appear in order from 0.
pub fn parse_detections(text: &str) -> Result<Vec<Vec<Detection>>, AuditError> {
    let mut l = Lines::new(text);
    if l.expect("detections", 1)? != ["1"] {
        return Err(l.err("unsupported detections version"));
    }
    let mut out: Vec<Vec<Detection>> = Vec::new();
    while let Some(f) = l.next_fields() {
        match (f[0], f.len()) {
            ("image", 2) => {
                if l.int(f[1])? != out.len() as u64 {
                    return Err(l.err(format!("expected image {}", out.len())));
                }
                out.push(Vec::new());
            }
            ("det", 7) => {
                let v: Vec<u64> = f[1..].iter().map(|s| l.int(s)).collect::<Result<_, _>>()?;
                let img = out.last_mut().ok_or_else(|| l.err("`det` before any `image`"))?;
                img.push(Detection {
                    bbox: BBox::new(v[2], v[3], v[4], v[5]),
                    class_id: v[0],
                    confidence: v[1],
                });
            }
            _ => return Err(l.err(format!("unexpected `{}`", f.join(" ")))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::sample_audit;
    use super::*;

    #[test]
    fn challenge_roundtrip_is_canonical() {
        let (c, _) = sample_audit();
        let text = c.to_canonical();
        assert!(text.starts_with("challenge-set 1\ncapacity 4\nbits 12 16\nscaling 100 1\ntheta_conf 1/2\n"));
        let back = parse_challenge(&text).unwrap();
        assert_eq!(back, c);
        let noisy = text
            .replace("image ", "# next image\n\nimage ")
            .replace("gt 2", "gt   2");
        let back = parse_challenge(&noisy).unwrap();
        assert_eq!(back.to_canonical(), text);
        assert_eq!(back.digest(), c.digest());
    }

    #[test]
    fn detections_roundtrip() {
        let (_, d) = sample_audit();
        assert_eq!(parse_detections(&write_detections(&d)).unwrap(), d);
    }

    #[test]
    fn malformed_files_report_lines() {
        let (c, _) = sample_audit();
        let bad = c.to_canonical().replacen("gt 1 ", "gt x ", 1);
        assert!(matches!(parse_challenge(&bad), Err(AuditError::Parse { line: 10, .. })));
        let flipped = c
            .to_canonical()
            .replacen("gt 1 100 200 300 500", "gt 1 300 200 100 500", 1);
        assert!(matches!(parse_challenge(&flipped), Err(AuditError::InvalidBox(_))));
        assert!(parse_detections("detections 1\nimage 1\n").is_err());
        assert!(parse_detections("detections 1\ndet 1 2 3 4 5 6\n").is_err());
    }
}
