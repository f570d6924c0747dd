//! Versioned binary encoding of named DFA sets.
//!
//! The runtime caches the automata it derives for a program, and the CLI can
//! export them; both use this one format so a cache file and an exported
//! file are interchangeable. The encoding is deliberately dumb: a magic tag,
//! a format version, and little-endian fixed-width tables. Decoding validates
//! every index so a truncated or corrupted file fails loudly instead of
//! producing a nonsense automaton.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      8 bytes  b"LETHEDFA"
//! version    u16
//! count      u32                      number of named automata
//! entry*     repeated `count` times:
//!   name_len u32, name utf-8 bytes
//!   n_states u32, start u32
//!   state*   repeated `n_states` times: next0 u32, next1 u32, flags u8
//! ```
//!
//! `flags` bit 0 marks a final state. Liveness of states is recomputed on
//! load rather than stored.

use crate::dfa::{LivenessDfa, StateId};
use crate::AutomataError;

/// Tag identifying the file type.
pub const MAGIC: &[u8; 8] = b"LETHEDFA";
/// Current encoding version; bump on any layout change.
pub const FORMAT_VERSION: u16 = 1;

/// Encode a set of named automata.
pub fn write_dfa_set(entries: &[(String, LivenessDfa)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
    for (name, dfa) in entries {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(dfa.n_states() as u32).to_le_bytes());
        out.extend_from_slice(&dfa.start().to_le_bytes());
        for q in 0..dfa.n_states() as StateId {
            out.extend_from_slice(&dfa.next(q, crate::Field::Car).to_le_bytes());
            out.extend_from_slice(&dfa.next(q, crate::Field::Cdr).to_le_bytes());
            out.push(u8::from(dfa.is_final(q)));
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], AutomataError> {
        if self.pos + n > self.bytes.len() {
            return Err(AutomataError::Serial(format!(
                "truncated file: wanted {n} bytes at offset {}, have {}",
                self.pos,
                self.bytes.len() - self.pos
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, AutomataError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, AutomataError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, AutomataError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Decode a file produced by [`write_dfa_set`].
pub fn read_dfa_set(bytes: &[u8]) -> Result<Vec<(String, LivenessDfa)>, AutomataError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(AutomataError::Serial("not an automata file".into()));
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(AutomataError::Serial(format!(
            "unsupported format version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let count = r.u32()? as usize;
    let mut entries = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let name_len = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|e| AutomataError::Serial(format!("bad name: {e}")))?
            .to_owned();
        let n_states = r.u32()? as usize;
        if n_states == 0 {
            return Err(AutomataError::Serial(format!(
                "automaton {name:?} has no states"
            )));
        }
        let start = r.u32()?;
        let mut next0 = Vec::with_capacity(n_states);
        let mut next1 = Vec::with_capacity(n_states);
        let mut finals = Vec::with_capacity(n_states);
        for _ in 0..n_states {
            next0.push(r.u32()?);
            next1.push(r.u32()?);
            finals.push(r.u8()? & 1 == 1);
        }
        let bad = |q: StateId| q as usize >= n_states;
        if bad(start) || next0.iter().chain(&next1).any(|&q| bad(q)) {
            return Err(AutomataError::Serial(format!(
                "automaton {name:?} has out-of-range state indices"
            )));
        }
        entries.push((name, LivenessDfa::from_tables(start, next0, next1, finals)));
    }
    if r.pos != bytes.len() {
        return Err(AutomataError::Serial(format!(
            "{} trailing bytes after last automaton",
            bytes.len() - r.pos
        )));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfa::LivenessDfa;
    use crate::Field;

    fn ones_star() -> LivenessDfa {
        // 1* : final start looping on Cdr, dead sink on Car.
        LivenessDfa::from_tables(0, vec![1, 1], vec![0, 1], vec![true, false])
    }

    #[test]
    fn round_trips_a_set() {
        let entries = vec![
            ("D1@length".to_owned(), ones_star()),
            ("sig@length".to_owned(), LivenessDfa::epsilon_only()),
            ("L@dead".to_owned(), LivenessDfa::empty()),
            ("S_all".to_owned(), LivenessDfa::all_paths()),
        ];
        let bytes = write_dfa_set(&entries);
        let back = read_dfa_set(&bytes).unwrap();
        assert_eq!(back.len(), entries.len());
        for ((n1, d1), (n2, d2)) in entries.iter().zip(&back) {
            assert_eq!(n1, n2);
            assert!(d1.equivalent(d2), "{n1} changed across the round trip");
            assert_eq!(d1.n_states(), d2.n_states());
            assert_eq!(d1.start(), d2.start());
        }
        // Liveness is recomputed, not trusted from the file.
        assert!(back[2].1.is_empty_language());
        assert!(back[0].1.accepts([Field::Cdr, Field::Cdr]));
        assert!(!back[0].1.accepts([Field::Car]));
    }

    #[test]
    fn rejects_corruption() {
        let entries = vec![("x".to_owned(), ones_star())];
        let good = write_dfa_set(&entries);

        // Wrong magic.
        let mut bad = good.clone();
        bad[0] ^= 0xff;
        assert!(read_dfa_set(&bad).is_err());

        // Wrong version.
        let mut bad = good.clone();
        bad[8] = 0xfe;
        assert!(read_dfa_set(&bad).is_err());

        // Truncation anywhere must error, never panic.
        for len in 0..good.len() {
            assert!(read_dfa_set(&good[..len]).is_err(), "truncated to {len}");
        }

        // Trailing garbage.
        let mut bad = good.clone();
        bad.push(0);
        assert!(read_dfa_set(&bad).is_err());

        // Out-of-range transition target.
        let mut bad = good;
        let last_state_off = bad.len() - 9; // next0 of final state
        bad[last_state_off] = 77;
        assert!(read_dfa_set(&bad).is_err());
    }
}
