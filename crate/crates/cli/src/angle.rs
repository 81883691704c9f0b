//! Angle expressions such as `7pi/32`, `-pi/2` or `3*pi/8 + 0.05`.

use std::f64::consts::PI;

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(format!("empty angle '{text}'"));
    }
    let mut p = Parser { tokens, pos: 0 };
    let value = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("unexpected trailing input in '{text}'"));
    }
    Ok(value)
}

/// Comma-separated list of angle expressions.
pub fn parse_angles(text: &str) -> Result<Vec<f64>, String> {
    text.split(',').map(parse_angle).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Num(f64),
    Pi,
    Op(char),
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' | '-' | '*' | '/' => {
                out.push(Token::Op(c));
                i += 1;
            }
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            'p' | 'P' | 'π' => {
                if c == 'π' {
                    i += 1;
                } else if chars.get(i + 1).is_some_and(|n| n.eq_ignore_ascii_case(&'i')) {
                    i += 2;
                } else {
                    return Err(format!("unexpected '{c}' in '{text}'"));
                }
                out.push(Token::Pi);
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let literal: String = chars[start..i].iter().collect();
                let value = literal
                    .parse()
                    .map_err(|_| format!("bad number '{literal}' in '{text}'"))?;
                out.push(Token::Num(value));
            }
            _ => return Err(format!("unexpected '{c}' in '{text}'")),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut value = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            value = if op == '+' { value + rhs } else { value - rhs };
        }
        Ok(value)
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut value = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Op(op @ ('*' | '/'))) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    value = if op == '*' { value * rhs } else { value / rhs };
                }
                // implicit product: `7pi`, `2(pi/3)`
                Some(Token::Pi | Token::Open) => value *= self.unary()?,
                _ => return Ok(value),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        let token = self.peek().ok_or("expression ends early")?;
        self.pos += 1;
        match token {
            Token::Num(v) => Ok(v),
            Token::Pi => Ok(PI),
            Token::Open => {
                let v = self.expr()?;
                match self.peek() {
                    Some(Token::Close) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    _ => Err("missing ')'".to_string()),
                }
            }
            other => Err(format!("unexpected {other:?}")),
        }
    }
}
