//! Message framing.
//!
//! ```text
//! frame_id: u32 LE | kind: u8 | payload_len: u32 LE | payload
//! ```
//!
//! | kind | name          | payload                                            |
//! |------|---------------|----------------------------------------------------|
//! | 1    | Syndrome      | seed u64 LE, then ⌈m/8⌉ syndrome bytes, LSB first  |
//! | 2    | RevealRequest | count u32 LE, then count × position u32 LE         |
//! | 3    | Reveal        | count u32 LE, then count × (position u32 LE, u8)   |
//! | 4    | VerifyTag     | tag u64 LE                                         |
//! | 5    | Ack           | empty                                              |
//! | 6    | Fail          | empty                                              |

use std::io::{self, Read, Write};

use thiserror::Error;

pub const HEADER_LEN: usize = 9;

/// Upper bound on a payload accepted from the wire.
pub const MAX_PAYLOAD: usize = 1 << 26;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("unknown message kind {0}")]
    UnknownKind(u8),
    #[error("payload length {0} exceeds limit")]
    Oversized(usize),
    #[error("{kind:?} payload has {got} bytes, expected {expected}")]
    PayloadLength {
        kind: MessageKind,
        expected: usize,
        got: usize,
    },
    #[error("expected a {expected:?} message, got {got:?}")]
    WrongKind {
        expected: MessageKind,
        got: MessageKind,
    },
    #[error("syndrome padding bits are not zero")]
    Padding,
    #[error("revealed bit value {0} is not 0 or 1")]
    BitValue(u8),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MessageKind {
    Syndrome = 1,
    RevealRequest = 2,
    Reveal = 3,
    VerifyTag = 4,
    Ack = 5,
    Fail = 6,
}

impl TryFrom<u8> for MessageKind {
    type Error = WireError;

    fn try_from(b: u8) -> Result<Self, WireError> {
        Ok(match b {
            1 => Self::Syndrome,
            2 => Self::RevealRequest,
            3 => Self::Reveal,
            4 => Self::VerifyTag,
            5 => Self::Ack,
            6 => Self::Fail,
            other => return Err(WireError::UnknownKind(other)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolMessage {
    pub frame_id: u32,
    pub kind: MessageKind,
    pub payload: Vec<u8>,
}

/// Packs 0/1 bytes LSB-first.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (k, &b) in bits.iter().enumerate() {
        out[k / 8] |= (b & 1) << (k % 8);
    }
    out
}

pub fn unpack_bits(bytes: &[u8], count: usize) -> Vec<u8> {
    (0..count).map(|k| bytes[k / 8] >> (k % 8) & 1).collect()
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

impl ProtocolMessage {
    fn new(frame_id: u32, kind: MessageKind, payload: Vec<u8>) -> Self {
        Self {
            frame_id,
            kind,
            payload,
        }
    }

    pub fn syndrome(frame_id: u32, seed: u64, bits: &[u8]) -> Self {
        let mut payload = seed.to_le_bytes().to_vec();
        payload.extend(pack_bits(bits));
        Self::new(frame_id, MessageKind::Syndrome, payload)
    }

    pub fn reveal_request(frame_id: u32, positions: &[u32]) -> Self {
        let mut payload = (positions.len() as u32).to_le_bytes().to_vec();
        for p in positions {
            payload.extend(p.to_le_bytes());
        }
        Self::new(frame_id, MessageKind::RevealRequest, payload)
    }

    pub fn reveal(frame_id: u32, items: &[(u32, u8)]) -> Self {
        let mut payload = (items.len() as u32).to_le_bytes().to_vec();
        for &(p, v) in items {
            payload.extend(p.to_le_bytes());
            payload.push(v);
        }
        Self::new(frame_id, MessageKind::Reveal, payload)
    }

    pub fn verify_tag(frame_id: u32, tag: u64) -> Self {
        Self::new(frame_id, MessageKind::VerifyTag, tag.to_le_bytes().to_vec())
    }

    pub fn ack(frame_id: u32) -> Self {
        Self::new(frame_id, MessageKind::Ack, Vec::new())
    }

    pub fn fail(frame_id: u32) -> Self {
        Self::new(frame_id, MessageKind::Fail, Vec::new())
    }

    fn expect(&self, kind: MessageKind) -> Result<(), WireError> {
        if self.kind != kind {
            return Err(WireError::WrongKind {
                expected: kind,
                got: self.kind,
            });
        }
        Ok(())
    }

    fn expect_len(&self, expected: usize) -> Result<(), WireError> {
        if self.payload.len() != expected {
            return Err(WireError::PayloadLength {
                kind: self.kind,
                expected,
                got: self.payload.len(),
            });
        }
        Ok(())
    }

    /// Seed and `m` syndrome bits.
    pub fn parse_syndrome(&self, m: usize) -> Result<(u64, Vec<u8>), WireError> {
        self.expect(MessageKind::Syndrome)?;
        self.expect_len(8 + m.div_ceil(8))?;
        let bytes = &self.payload[8..];
        if m % 8 != 0 && bytes[bytes.len() - 1] >> (m % 8) != 0 {
            return Err(WireError::Padding);
        }
        Ok((u64_at(&self.payload, 0), unpack_bits(bytes, m)))
    }

    fn counted(&self, item: usize) -> Result<usize, WireError> {
        if self.payload.len() < 4 {
            return Err(WireError::PayloadLength {
                kind: self.kind,
                expected: 4,
                got: self.payload.len(),
            });
        }
        let count = u32_at(&self.payload, 0) as usize;
        self.expect_len(4 + count.saturating_mul(item))?;
        Ok(count)
    }

    pub fn parse_reveal_request(&self) -> Result<Vec<u32>, WireError> {
        self.expect(MessageKind::RevealRequest)?;
        let count = self.counted(4)?;
        Ok((0..count)
            .map(|k| u32_at(&self.payload, 4 + 4 * k))
            .collect())
    }

    pub fn parse_reveal(&self) -> Result<Vec<(u32, u8)>, WireError> {
        self.expect(MessageKind::Reveal)?;
        let count = self.counted(5)?;
        (0..count)
            .map(|k| {
                let at = 4 + 5 * k;
                let v = self.payload[at + 4];
                if v > 1 {
                    return Err(WireError::BitValue(v));
                }
                Ok((u32_at(&self.payload, at), v))
            })
            .collect()
    }

    pub fn parse_verify_tag(&self) -> Result<u64, WireError> {
        self.expect(MessageKind::VerifyTag)?;
        self.expect_len(8)?;
        Ok(u64_at(&self.payload, 0))
    }

    /// Bits of information about the key this message discloses, given the
    /// syndrome length `m`. Seeds, positions and counts are public.
    pub fn disclosed_bits(&self, m: usize) -> usize {
        match self.kind {
            MessageKind::Syndrome => m,
            MessageKind::Reveal => self.parse_reveal().map(|v| v.len()).unwrap_or(0),
            MessageKind::VerifyTag => 64,
            _ => 0,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend(self.frame_id.to_le_bytes());
        out.push(self.kind as u8);
        out.extend((self.payload.len() as u32).to_le_bytes());
        out.extend(&self.payload);
        out
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(&self.encode())?;
        w.flush()
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, WireError> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)?;
        let frame_id = u32_at(&header, 0);
        let kind = MessageKind::try_from(header[4])?;
        let len = u32_at(&header, 5) as usize;
        if len > MAX_PAYLOAD {
            return Err(WireError::Oversized(len));
        }
        let mut payload = vec![0u8; len];
        r.read_exact(&mut payload)?;
        Ok(Self::new(frame_id, kind, payload))
    }

    /// Decodes one message from the front of `bytes`, returning it and the
    /// number of bytes consumed.
    pub fn decode(bytes: &[u8]) -> Result<(Self, usize), WireError> {
        let mut cursor = io::Cursor::new(bytes);
        let msg = Self::read_from(&mut cursor)?;
        Ok((msg, cursor.position() as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn syndrome_layout_is_bit_exact() {
        let bits = [1, 0, 1, 1, 0, 0, 0, 0, 1, 1];
        let msg = ProtocolMessage::syndrome(0x0102_0304, 0x1122_3344_5566_7788, &bits);
        let enc = msg.encode();
        assert_eq!(&enc[..4], &[0x04, 0x03, 0x02, 0x01]);
        assert_eq!(enc[4], 1);
        assert_eq!(&enc[5..9], &[10, 0, 0, 0]);
        assert_eq!(
            &enc[9..17],
            &[0x88, 0x77, 0x66, 0x55, 0x44, 0x33, 0x22, 0x11]
        );
        assert_eq!(&enc[17..], &[0b0000_1101, 0b0000_0011]);
        let (seed, back) = msg.parse_syndrome(10).unwrap();
        assert_eq!(seed, 0x1122_3344_5566_7788);
        assert_eq!(back, bits);
    }

    #[test]
    fn reveal_layout_is_bit_exact() {
        let msg = ProtocolMessage::reveal(7, &[(258, 1), (3, 0)]);
        let enc = msg.encode();
        assert_eq!(enc[4], 3);
        assert_eq!(&enc[5..9], &[14, 0, 0, 0]);
        assert_eq!(&enc[9..], &[2, 0, 0, 0, 2, 1, 0, 0, 1, 3, 0, 0, 0, 0]);
        assert_eq!(msg.parse_reveal().unwrap(), vec![(258, 1), (3, 0)]);
        assert_eq!(msg.disclosed_bits(100), 2);
    }

    #[test]
    fn malformed_payloads() {
        let mut msg = ProtocolMessage::syndrome(1, 5, &[1; 12]);
        // 12 and 13 bits share a byte count; bit 12 is zero padding
        assert!(msg.parse_syndrome(13).is_ok());
        assert!(matches!(
            msg.parse_syndrome(20),
            Err(WireError::PayloadLength { .. })
        ));
        msg.payload[9] |= 0x80;
        assert!(matches!(msg.parse_syndrome(12), Err(WireError::Padding)));
        assert!(matches!(
            msg.parse_reveal(),
            Err(WireError::WrongKind { .. })
        ));
        let mut r = ProtocolMessage::reveal(1, &[(4, 1)]);
        r.payload[8] = 2;
        assert!(matches!(r.parse_reveal(), Err(WireError::BitValue(2))));
        r.payload.pop();
        assert!(r.parse_reveal().is_err());
        let req = ProtocolMessage {
            frame_id: 0,
            kind: MessageKind::RevealRequest,
            payload: vec![0xff, 0xff, 0xff, 0xff],
        };
        assert!(req.parse_reveal_request().is_err());
        assert!(ProtocolMessage::decode(&[0, 0, 0, 0, 9, 0, 0, 0, 0]).is_err());
        assert!(ProtocolMessage::decode(&[0, 0, 0, 0, 1, 0xff, 0xff, 0xff, 0xff]).is_err());
        assert!(ProtocolMessage::decode(&[0, 0, 0]).is_err());
    }

    #[test]
    fn disclosed_bit_accounting() {
        assert_eq!(
            ProtocolMessage::syndrome(0, 1, &[0; 37]).disclosed_bits(37),
            37
        );
        assert_eq!(ProtocolMessage::verify_tag(0, 9).disclosed_bits(37), 64);
        assert_eq!(
            ProtocolMessage::reveal_request(0, &[1, 2]).disclosed_bits(37),
            0
        );
        assert_eq!(ProtocolMessage::ack(0).disclosed_bits(37), 0);
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(
            frame_id in any::<u32>(),
            kind in 1u8..=6,
            payload in proptest::collection::vec(any::<u8>(), 0..64),
        ) {
            let msg = ProtocolMessage {
                frame_id,
                kind: MessageKind::try_from(kind).unwrap(),
                payload,
            };
            let mut bytes = msg.encode();
            bytes.extend([0xAA, 0xBB]);
            let (back, used) = ProtocolMessage::decode(&bytes).unwrap();
            prop_assert_eq!(back, msg);
            prop_assert_eq!(used, bytes.len() - 2);
        }

        #[test]
        fn bit_packing_round_trip(bits in proptest::collection::vec(0u8..2, 0..100)) {
            prop_assert_eq!(unpack_bits(&pack_bits(&bits), bits.len()), bits);
        }
    }
}
