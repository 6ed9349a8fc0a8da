//! Text and JSON grammars for group specs.
//!
//! Three forms are accepted, dispatched on the first non-space character:
//!
//! - composite: `Z(m1)+Z(m2)+...`, e.g. `Z(6)+Z(12)`; each `m_i >= 1`.
//! - p-primary text: `p=<prime>: q1^l1+q2^l2+...` where each `q_i` is a
//!   power of the prime and `l_i` its multiplicity, e.g. `p=2: 2^1+4^1`
//!   for `Z(2) + Z(4)`.
//! - p-primary JSON (first character `{`):
//!   `{"p": 2, "parts": [[1, 1], [2, 1]]}` with parts given as
//!   `[exponent, multiplicity]` pairs, equivalent to the text form above.
//!
//! Whitespace is allowed around every token. The renderers on
//! [`CompositeGroupSpec`] and [`PrimePowerSignature`](crate::group::PrimePowerSignature)
//! emit parseable text, so specs round-trip.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::{normalize_signature, CompositeGroupSpec, GroupSpec};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self
            .peek()
            .map(|b| b.is_ascii_digit())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("digits are ascii")
            .parse()
            .map_err(|_| Error::Parse {
                position: start,
                message: "number does not fit in 64 bits".into(),
            })
    }

    fn expect_end(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

fn parse_composite(cursor: &mut Cursor) -> Result<CompositeGroupSpec> {
    let mut moduli = Vec::new();
    loop {
        cursor.skip_ws();
        cursor.expect(b'Z')?;
        cursor.skip_ws();
        cursor.expect(b'(')?;
        cursor.skip_ws();
        let at = cursor.pos;
        let modulus = cursor.number()?;
        if modulus == 0 {
            return Err(Error::Parse {
                position: at,
                message: "modulus must be at least 1".into(),
            });
        }
        moduli.push(modulus);
        cursor.skip_ws();
        cursor.expect(b')')?;
        cursor.skip_ws();
        if cursor.peek() == Some(b'+') {
            cursor.pos += 1;
        } else {
            break;
        }
    }
    cursor.expect_end()?;
    CompositeGroupSpec::new(moduli)
}

fn power_exponent(q: u64, p: u64) -> Option<u32> {
    let mut value = q;
    let mut exponent = 0;
    while value > 1 {
        if value % p != 0 {
            return None;
        }
        value /= p;
        exponent += 1;
    }
    Some(exponent)
}

fn parse_p_primary(cursor: &mut Cursor) -> Result<GroupSpec> {
    cursor.skip_ws();
    cursor.expect(b'p')?;
    cursor.skip_ws();
    cursor.expect(b'=')?;
    cursor.skip_ws();
    let p = cursor.number()?;
    cursor.skip_ws();
    cursor.expect(b':')?;
    let mut raw = Vec::new();
    loop {
        cursor.skip_ws();
        let at = cursor.pos;
        let q = cursor.number()?;
        let exponent = power_exponent(q, p).ok_or(Error::Parse {
            position: at,
            message: format!("{q} is not a power of {p}"),
        })?;
        cursor.skip_ws();
        cursor.expect(b'^')?;
        cursor.skip_ws();
        let at = cursor.pos;
        let multiplicity = cursor.number()?;
        let multiplicity = u32::try_from(multiplicity).map_err(|_| Error::Parse {
            position: at,
            message: "multiplicity does not fit in 32 bits".into(),
        })?;
        if multiplicity == 0 {
            return Err(Error::Parse {
                position: at,
                message: "multiplicity must be at least 1".into(),
            });
        }
        raw.push((exponent, multiplicity));
        cursor.skip_ws();
        if cursor.peek() == Some(b'+') {
            cursor.pos += 1;
        } else {
            break;
        }
    }
    cursor.expect_end()?;
    Ok(GroupSpec::PPrimary(normalize_signature(p, &raw)?))
}

#[derive(Deserialize)]
struct JsonSpec {
    p: u64,
    parts: Vec<(u32, u32)>,
}

fn parse_json(text: &str) -> Result<GroupSpec> {
    let parsed: JsonSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
        position: e.column().saturating_sub(1),
        message: e.to_string(),
    })?;
    Ok(GroupSpec::PPrimary(normalize_signature(
        parsed.p,
        &parsed.parts,
    )?))
}

/// Parses any of the three spec forms.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let mut cursor = Cursor::new(text);
    cursor.skip_ws();
    match cursor.peek() {
        Some(b'{') => parse_json(text),
        Some(b'p') => parse_p_primary(&mut cursor),
        Some(b'Z') => Ok(GroupSpec::Composite(parse_composite(&mut cursor)?)),
        _ => Err(cursor.error("expected 'Z(', 'p=', or a JSON object")),
    }
}
