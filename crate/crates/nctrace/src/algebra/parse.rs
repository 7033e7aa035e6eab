use super::decl::{Declaration, Letter, VarClass};
use super::poly::TracePolynomial;
use super::word::Word;
use crate::error::{NcError, Result};
use num_complex::Complex64;

/// Parses an expression string against a declaration.
///
/// Grammar (whitespace-insensitive):
///
/// ```text
/// poly   := ('-')? term (('+'|'-') term)*
/// term   := number ('*' factor)* | factor ('*' factor)*
/// factor := 'tr(' word ')' ('^' int)? | var | 'i' | '(' poly ')'
/// word   := var ('*' var)*
/// var    := ('x'|'xp'|'y'|'s') int ('_' int)? ('^' int)?
/// ```
///
/// Declared-multilinear slot classes are validated: if any term mentions a
/// Y-slot, every term must contain exactly one letter of that slot.
pub fn parse(text: &str, decl: &Declaration) -> Result<TracePolynomial> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, decl };
    let poly = p.parse_poly()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    for slot in 1..=decl.y_slots.len() {
        if !poly.is_free_of_slot(slot) && !poly.is_linear_in_slot(slot) {
            return Err(NcError::Grading(format!(
                "slot y{slot} is declared multilinear but terms are not uniformly linear in it"
            )));
        }
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    decl: &'a Declaration,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> NcError {
        NcError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", b as char)))
        }
    }

    fn parse_poly(&mut self) -> Result<TracePolynomial> {
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            let _ = self.eat(b'+');
        }
        let mut acc = self.parse_term()?;
        if negate {
            acc = acc.scale(Complex64::new(-1.0, 0.0));
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.parse_term()?;
                    acc = acc.try_add(&t)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.parse_term()?;
                    acc = acc.try_sub(&t)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<TracePolynomial> {
        let mut acc = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let n = self.parse_number()?;
                TracePolynomial::constant(self.decl.clone(), Complex64::new(n, 0.0))
            }
            _ => self.parse_factor()?,
        };
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.parse_factor()?;
            acc = acc.try_mul(&f)?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<TracePolynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_poly()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let n = self.parse_number()?;
                Ok(TracePolynomial::constant(self.decl.clone(), Complex64::new(n, 0.0)))
            }
            Some(_) if self.lookahead_keyword("tr(") => {
                self.pos += 2; // over "tr"
                self.expect(b'(')?;
                let w = self.parse_word()?;
                self.expect(b')')?;
                let base = TracePolynomial::trace_of(self.decl.clone(), w)?;
                if self.eat(b'^') {
                    let e = self.parse_int()?;
                    let mut acc = TracePolynomial::one(self.decl.clone());
                    for _ in 0..e {
                        acc = acc.try_mul(&base)?;
                    }
                    Ok(acc)
                } else {
                    Ok(base)
                }
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(TracePolynomial::constant(self.decl.clone(), Complex64::new(0.0, 1.0)))
            }
            Some(_) => {
                let (letter, exp) = self.parse_var()?;
                let mut w = Word::one();
                for _ in 0..exp {
                    w.0.push(letter);
                }
                let mut p = TracePolynomial::zero(self.decl.clone());
                self.decl.check(&letter)?;
                p.accumulate(
                    super::poly::MonomialKey::new(Vec::new(), w),
                    Complex64::new(1.0, 0.0),
                );
                Ok(p)
            }
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn lookahead_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(kw.as_bytes())
    }

    fn parse_word(&mut self) -> Result<Word> {
        let mut w = Word::one();
        loop {
            let (letter, exp) = self.parse_var()?;
            self.decl.check(&letter)?;
            for _ in 0..exp {
                w.0.push(letter);
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok(w)
    }

    /// var := class int ('_' int)? ('^' int)? ; returns the letter and its power.
    fn parse_var(&mut self) -> Result<(Letter, usize)> {
        self.skip_ws();
        let class = match self.src.get(self.pos) {
            Some(b'x') => {
                self.pos += 1;
                if self.src.get(self.pos) == Some(&b'p') {
                    self.pos += 1;
                    VarClass::XPrime
                } else {
                    VarClass::X
                }
            }
            Some(b'y') => {
                self.pos += 1;
                VarClass::Y(0)
            }
            Some(b's') => {
                self.pos += 1;
                VarClass::S(0)
            }
            _ => return Err(self.err("expected a variable (x/xp/y/s)")),
        };
        let first = self.parse_int()?;
        let (class, index) = match class {
            VarClass::Y(_) => {
                if self.src.get(self.pos) == Some(&b'_') {
                    self.pos += 1;
                    let idx = self.parse_int()?;
                    (VarClass::Y(first), idx)
                } else {
                    (VarClass::Y(first), 1)
                }
            }
            VarClass::S(_) => {
                if self.src.get(self.pos) == Some(&b'_') {
                    self.pos += 1;
                    let idx = self.parse_int()?;
                    (VarClass::S(first), idx)
                } else {
                    (VarClass::S(first), 1)
                }
            }
            c => (c, first),
        };
        let exp = if self.src.get(self.pos) == Some(&b'^') {
            self.pos += 1;
            self.parse_int()?
        } else {
            1
        };
        Ok((Letter { class, index }, exp))
    }

    fn parse_int(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }

    fn parse_number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit()
                || self.src[self.pos] == b'.'
                || self.src[self.pos] == b'e'
                || (self.pos > start
                    && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
                    && self.src[self.pos - 1] == b'e'))
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("malformed number"))
    }
}
