//! Recursive-descent parser for `ordinal := term ('+' term)*`,
//! `term := 'w' ('^' nat)? ('*' nat)? | nat`.

use super::{Ordinal, OrdinalError};

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, msg: impl Into<String>) -> OrdinalError {
        OrdinalError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a natural number"));
        }
        self.text[start..self.pos].parse().map_err(|_| OrdinalError::Overflow)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        self.skip_ws();
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.eat(b'^') {
                    u32::try_from(self.nat()?).map_err(|_| OrdinalError::Overflow)?
                } else {
                    1
                };
                let coefficient = if self.eat(b'*') { self.nat()? } else { 1 };
                Ok(Ordinal::omega_pow(exponent, coefficient))
            }
            Some(b'0'..=b'9') => Ok(Ordinal::nat(self.nat()?)),
            Some(_) => Err(self.error("expected 'w' or a natural number")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Ordinal, OrdinalError> {
    let mut cur = Cursor { text, pos: 0 };
    let mut acc = cur.term()?;
    while cur.eat(b'+') {
        let next = cur.term()?;
        acc = acc.checked_add(&next).ok_or(OrdinalError::Overflow)?;
    }
    cur.skip_ws();
    if cur.pos != text.len() {
        return Err(cur.error("trailing input"));
    }
    Ok(acc)
}
