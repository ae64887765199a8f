//! Four-byte domain separators `[App] [Op] [Counter]`, packed big-endian.

use std::fmt;

use super::ProtocolError;

/// Application byte of the perception-integrity (safe distance) case.
pub const APP_RSS: u8 = 0x00;
/// Application byte of the model-audit case.
pub const APP_AUDIT: u8 = 0x01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Operation {
    Commit = 0x01,
    Sign = 0x02,
}

impl Operation {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(Operation::Commit),
            0x02 => Some(Operation::Sign),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomainSeparator {
    pub app_id: u8,
    pub op: Operation,
    pub counter: u16,
}

impl DomainSeparator {
    pub fn new(app_id: u8, op_id: u8, counter: u16) -> Result<Self, ProtocolError> {
        let op = Operation::from_byte(op_id).ok_or(ProtocolError::OpId(op_id))?;
        Ok(DomainSeparator { app_id, op, counter })
    }

    pub const fn commit(app_id: u8) -> Self {
        DomainSeparator {
            app_id,
            op: Operation::Commit,
            counter: 0,
        }
    }

    pub const fn sign(app_id: u8) -> Self {
        DomainSeparator {
            app_id,
            op: Operation::Sign,
            counter: 0,
        }
    }

    pub fn to_bytes(self) -> [u8; 4] {
        let c = self.counter.to_be_bytes();
        [self.app_id, self.op as u8, c[0], c[1]]
    }

    pub fn from_bytes(b: [u8; 4]) -> Result<Self, ProtocolError> {
        Self::new(b[0], b[1], u16::from_be_bytes([b[2], b[3]]))
    }

    /// The packed value as an integer.
    pub fn value(self) -> u32 {
        u32::from_be_bytes(self.to_bytes())
    }

    pub fn from_value(v: u32) -> Result<Self, ProtocolError> {
        Self::from_bytes(v.to_be_bytes())
    }
}

impl fmt::Display for DomainSeparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:08X}", self.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert_eq!(DomainSeparator::new(0x00, 0x01, 0).unwrap().value(), 65_536);
        assert_eq!(DomainSeparator::new(0x00, 0x02, 0).unwrap().value(), 131_072);
        assert_eq!(DomainSeparator::new(0x01, 0x01, 0).unwrap().value(), 16_842_752);
        assert_eq!(DomainSeparator::new(0x01, 0x02, 0).unwrap().value(), 16_908_288);
        assert_eq!(DomainSeparator::commit(APP_AUDIT).to_string(), "0x01010000");
    }

    #[test]
    fn rejects_unknown_operation() {
        assert_eq!(DomainSeparator::new(0, 3, 0), Err(ProtocolError::OpId(3)));
        assert_eq!(DomainSeparator::new(0, 0, 0), Err(ProtocolError::OpId(0)));
    }

    #[test]
    fn packing_roundtrips() {
        for app in [0u8, 1, 0x7f, 0xff] {
            for op in [1u8, 2] {
                for counter in [0u16, 1, 0x1234, u16::MAX] {
                    let d = DomainSeparator::new(app, op, counter).unwrap();
                    assert_eq!(DomainSeparator::from_value(d.value()).unwrap(), d);
                    assert_eq!(d.value(), (app as u32) << 24 | (op as u32) << 16 | counter as u32);
                }
            }
        }
    }
}
