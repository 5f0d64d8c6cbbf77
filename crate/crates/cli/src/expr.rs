//! Arithmetic on numeric literals and `pi`, so angles can be written the way
//! they appear in the literature (`pi/7`, `pi/2+0.1`, `sqrt(0.5)`).
//!
//! Grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | primary
//! primary := number | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub input: String,
    pub position: usize,
    pub reason: &'static str,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cannot parse '{}' at offset {}: {}",
            self.input, self.position, self.reason
        )
    }
}

impl std::error::Error for ParseError {}

pub fn eval(input: &str) -> Result<f64, ParseError> {
    let mut p = Parser {
        src: input.as_bytes(),
        input,
        pos: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.fail("unexpected trailing input"));
    }
    if !v.is_finite() {
        return Err(p.fail("value is not finite"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    input: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn fail(&self, reason: &'static str) -> ParseError {
        ParseError {
            input: self.input.to_string(),
            position: self.pos,
            reason,
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        let end = self.pos + word.len();
        if self.src.get(self.pos..end) == Some(word.as_bytes())
            && !self.src.get(end).is_some_and(u8::is_ascii_alphanumeric)
        {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64, ParseError> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                v += self.term()?;
            } else if self.eat(b'-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, ParseError> {
        let mut v = self.unary()?;
        loop {
            if self.eat(b'*') {
                v *= self.unary()?;
            } else if self.eat(b'/') {
                let d = self.unary()?;
                if d == 0.0 {
                    return Err(self.fail("division by zero"));
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<f64, ParseError> {
        if self.eat(b'(') {
            let v = self.expr()?;
            if !self.eat(b')') {
                return Err(self.fail("expected ')'"));
            }
            return Ok(v);
        }
        if self.eat_word("pi") {
            return Ok(std::f64::consts::PI);
        }
        if self.eat_word("sqrt") {
            if !self.eat(b'(') {
                return Err(self.fail("expected '(' after sqrt"));
            }
            let v = self.expr()?;
            if !self.eat(b')') {
                return Err(self.fail("expected ')'"));
            }
            if v < 0.0 {
                return Err(self.fail("square root of a negative number"));
            }
            return Ok(v.sqrt());
        }
        self.number()
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.src.get(p.pos).is_some_and(u8::is_ascii_digit) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if self.pos > start && matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = mark;
            }
        }
        let text = &self.input[start..self.pos];
        text.parse::<f64>().map_err(|_| {
            self.pos = start;
            self.fail("expected a number, 'pi', 'sqrt(...)' or '('")
        })
    }
}
