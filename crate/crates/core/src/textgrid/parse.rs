//! Long-format reader.
//!
//! The file is split into whitespace-separated words and double-quoted
//! strings (which may span lines; `""` is an escaped quote), each tagged with
//! its line number. The grammar is then matched token by token, so any
//! amount of indentation or line wrapping is accepted.

use super::{Interval, IntervalTier, TextGrid, TextGridError};

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Word(String),
    Str(String),
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    line: usize,
}

fn lex(content: &str) -> Result<Vec<Token>, TextGridError> {
    let mut tokens = Vec::new();
    let mut chars = content.chars().peekable();
    let mut line = 1;
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            line += 1;
            chars.next();
        } else if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            let start_line = line;
            chars.next();
            let mut text = String::new();
            loop {
                match chars.next() {
                    None => {
                        return Err(TextGridError::Syntax {
                            line: start_line,
                            message: "unterminated string".into(),
                        })
                    }
                    Some('"') => {
                        if chars.peek() == Some(&'"') {
                            chars.next();
                            text.push('"');
                        } else {
                            break;
                        }
                    }
                    Some(ch) => {
                        if ch == '\n' {
                            line += 1;
                        }
                        text.push(ch);
                    }
                }
            }
            tokens.push(Token {
                kind: Kind::Str(text),
                line: start_line,
            });
        } else {
            let mut word = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || ch == '"' {
                    break;
                }
                word.push(ch);
                chars.next();
            }
            tokens.push(Token {
                kind: Kind::Word(word),
                line,
            });
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    last_line: usize,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> TextGridError {
        let line = self
            .tokens
            .get(self.pos)
            .map(|t| t.line)
            .unwrap_or(self.last_line);
        TextGridError::Syntax {
            line,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<Token, TextGridError> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.error(format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn peek_word(&self) -> Option<&str> {
        match self.tokens.get(self.pos) {
            Some(Token {
                kind: Kind::Word(w),
                ..
            }) => Some(w),
            _ => None,
        }
    }

    fn word(&mut self, expected: &str) -> Result<(), TextGridError> {
        let at = self.pos;
        match self.next(&format!("'{expected}'"))?.kind {
            Kind::Word(w) if w == expected => Ok(()),
            other => {
                self.pos = at;
                Err(self.error(format!("expected '{expected}', found {}", describe(&other))))
            }
        }
    }

    fn string(&mut self) -> Result<String, TextGridError> {
        let at = self.pos;
        match self.next("a quoted string")?.kind {
            Kind::Str(s) => Ok(s),
            other => {
                self.pos = at;
                Err(self.error(format!("expected a quoted string, found {}", describe(&other))))
            }
        }
    }

    fn raw_word(&mut self, what: &str) -> Result<String, TextGridError> {
        let at = self.pos;
        match self.next(what)?.kind {
            Kind::Word(w) => Ok(w),
            other => {
                self.pos = at;
                Err(self.error(format!("expected {what}, found {}", describe(&other))))
            }
        }
    }

    fn number(&mut self) -> Result<f64, TextGridError> {
        let at = self.pos;
        let w = self.raw_word("a number")?;
        match w.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos = at;
                Err(self.error(format!("expected a finite number, found '{w}'")))
            }
        }
    }

    fn count(&mut self) -> Result<usize, TextGridError> {
        let at = self.pos;
        let w = self.raw_word("a count")?;
        w.parse::<usize>().map_err(|_| {
            self.pos = at;
            self.error(format!("expected a non-negative integer, found '{w}'"))
        })
    }

    /// `key = <value>` returning the value as a number.
    fn key_number(&mut self, key: &str) -> Result<f64, TextGridError> {
        self.word(key)?;
        self.word("=")?;
        self.number()
    }

    fn key_string(&mut self, key: &str) -> Result<String, TextGridError> {
        self.word(key)?;
        self.word("=")?;
        self.string()
    }

    /// `name [index]:`, also accepting the unspaced `name[index]:`.
    fn indexed(&mut self, name: &str, index: Option<usize>) -> Result<(), TextGridError> {
        let bracket = match index {
            Some(i) => format!("[{i}]:"),
            None => "[]:".to_string(),
        };
        let at = self.pos;
        let w = self.raw_word(&format!("'{name} {bracket}'"))?;
        if w == format!("{name}{bracket}") {
            return Ok(());
        }
        if w == name {
            let b = self.raw_word(&format!("'{bracket}'"))?;
            if b == bracket {
                return Ok(());
            }
        }
        self.pos = at;
        Err(self.error(format!("expected '{name} {bracket}'")))
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }
}

fn describe(kind: &Kind) -> String {
    match kind {
        Kind::Word(w) => format!("'{w}'"),
        Kind::Str(s) => format!("string \"{s}\""),
    }
}

fn parse_tokens(tokens: Vec<Token>) -> Result<TextGrid, TextGridError> {
    let last_line = tokens.last().map(|t| t.line).unwrap_or(1);
    let mut p = Parser {
        tokens,
        pos: 0,
        last_line,
    };

    p.word("File")?;
    p.word("type")?;
    p.word("=")?;
    let file_type = p.string()?;
    if file_type == "ooBinaryFile" {
        return Err(p.error("binary TextGrid files are not supported"));
    }
    if file_type != "ooTextFile" {
        return Err(p.error(format!("unsupported file type \"{file_type}\"")));
    }
    p.word("Object")?;
    p.word("class")?;
    p.word("=")?;
    let class = p.string()?;
    if class != "TextGrid" {
        return Err(p.error(format!("object class \"{class}\" is not TextGrid")));
    }
    if p.peek_word() != Some("xmin") {
        return Err(p.error("short text format is not supported; save as long text"));
    }
    let xmin = p.key_number("xmin")?;
    let xmax = p.key_number("xmax")?;
    p.word("tiers?")?;
    let flag = p.raw_word("'<exists>' or '<absent>'")?;
    let mut tiers = Vec::new();
    match flag.as_str() {
        "<absent>" => {
            if p.peek_word() == Some("size") {
                let n = p.key_count("size")?;
                if n != 0 {
                    return Err(p.error("tiers are marked absent but size is not zero"));
                }
            }
        }
        "<exists>" => {
            let n = p.key_count("size")?;
            if n > 0 || p.peek_word().is_some_and(|w| w.starts_with("item")) {
                p.indexed("item", None)?;
            }
            for k in 1..=n {
                tiers.push(parse_tier(&mut p, k)?);
            }
        }
        other => return Err(p.error(format!("expected '<exists>' or '<absent>', found '{other}'"))),
    }
    if !p.at_end() {
        return Err(p.error("unexpected trailing content"));
    }
    let grid = TextGrid { xmin, xmax, tiers };
    grid.validate()?;
    Ok(grid)
}

impl Parser {
    fn key_count(&mut self, key: &str) -> Result<usize, TextGridError> {
        self.word(key)?;
        self.word("=")?;
        self.count()
    }
}

fn parse_tier(p: &mut Parser, k: usize) -> Result<IntervalTier, TextGridError> {
    p.indexed("item", Some(k))?;
    let class_line = p.tokens.get(p.pos).map(|t| t.line).unwrap_or(p.last_line);
    let class = p.key_string("class")?;
    let name = p.key_string("name")?;
    match class.as_str() {
        "IntervalTier" => {}
        "TextTier" => {
            return Err(TextGridError::PointTier {
                line: class_line,
                name,
            })
        }
        other => {
            return Err(TextGridError::Syntax {
                line: class_line,
                message: format!("unknown tier class \"{other}\""),
            })
        }
    }
    let xmin = p.key_number("xmin")?;
    let xmax = p.key_number("xmax")?;
    p.word("intervals:")?;
    let n = p.key_count("size")?;
    let mut intervals = Vec::new();
    for j in 1..=n {
        p.indexed("intervals", Some(j))?;
        let ixmin = p.key_number("xmin")?;
        let ixmax = p.key_number("xmax")?;
        let text = p.key_string("text")?;
        intervals.push(Interval {
            xmin: ixmin,
            xmax: ixmax,
            text,
        });
    }
    Ok(IntervalTier {
        name,
        xmin,
        xmax,
        intervals,
    })
}

pub fn parse_textgrid(content: &str) -> Result<TextGrid, TextGridError> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    parse_tokens(lex(content)?)
}

fn decode_utf16(body: &[u8], little_endian: bool) -> Result<String, TextGridError> {
    if body.len() % 2 != 0 {
        return Err(TextGridError::Encoding(
            "UTF-16 content has an odd number of bytes".into(),
        ));
    }
    let units: Vec<u16> = body
        .chunks_exact(2)
        .map(|c| {
            if little_endian {
                u16::from_le_bytes([c[0], c[1]])
            } else {
                u16::from_be_bytes([c[0], c[1]])
            }
        })
        .collect();
    String::from_utf16(&units).map_err(|e| TextGridError::Encoding(e.to_string()))
}

/// Decodes UTF-8 or BOM-marked UTF-16 and parses.
pub fn parse_textgrid_bytes(bytes: &[u8]) -> Result<TextGrid, TextGridError> {
    let text = match bytes {
        [0xFF, 0xFE, rest @ ..] => decode_utf16(rest, true)?,
        [0xFE, 0xFF, rest @ ..] => decode_utf16(rest, false)?,
        _ => {
            let body = bytes.strip_prefix(&[0xEF, 0xBB, 0xBF]).unwrap_or(bytes);
            std::str::from_utf8(body)
                .map_err(|e| TextGridError::Encoding(e.to_string()))?
                .to_string()
        }
    };
    parse_textgrid(&text)
}
