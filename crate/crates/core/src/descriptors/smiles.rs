//! Lossless SMILES tokenizer.
//!
//! Only the lexical structure is checked: balanced branches and brackets,
//! paired ring-closure labels and the allowed alphabet. No valence or
//! aromaticity perception is attempted.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Organic-subset atom outside brackets (`C`, `Cl`, `c`, `*`, ...).
    Atom { symbol: String, aromatic: bool },
    /// Bracket atom such as `[13CH3-]`.
    Bracket(BracketAtom),
    Bond(char),
    RingClosure(u16),
    BranchOpen,
    BranchClose,
    /// Disconnected-structure separator `.`.
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BracketAtom {
    pub isotope: Option<u16>,
    pub symbol: String,
    pub aromatic: bool,
    pub chirality: Option<String>,
    pub hydrogens: u8,
    pub charge: i8,
    pub class: Option<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the token in the source string.
    pub offset: usize,
    /// The exact source text of the token.
    pub text: String,
}

impl Token {
    pub fn is_atom(&self) -> bool {
        matches!(self.kind, TokenKind::Atom { .. } | TokenKind::Bracket(_))
    }

    pub fn is_aromatic_atom(&self) -> bool {
        match &self.kind {
            TokenKind::Atom { aromatic, .. } => *aromatic,
            TokenKind::Bracket(b) => b.aromatic,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmilesTokenStream {
    pub tokens: Vec<Token>,
}

impl SmilesTokenStream {
    /// Concatenates token texts; equals the tokenized input.
    pub fn to_smiles(&self) -> String {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.is_atom())
    }
}

const ORGANIC_TWO: [&str; 2] = ["Cl", "Br"];
const ORGANIC_ONE: [char; 8] = ['B', 'C', 'N', 'O', 'P', 'S', 'F', 'I'];
const AROMATIC_ONE: [char; 6] = ['b', 'c', 'n', 'o', 'p', 's'];
const BONDS: [char; 7] = ['-', '=', '#', '$', ':', '/', '\\'];

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Smiles {
        offset,
        message: message.into(),
    }
}

pub fn tokenize_smiles(s: &str) -> Result<SmilesTokenStream> {
    if s.is_empty() {
        return Err(err(0, "empty SMILES"));
    }
    if let Some(pos) = s.bytes().position(|b| !b.is_ascii()) {
        return Err(err(pos, "non-ASCII character"));
    }
    let bytes = s.as_bytes();
    let mut tokens = Vec::new();
    let mut branch_stack: Vec<usize> = Vec::new();
    let mut open_rings: HashMap<u16, usize> = HashMap::new();
    let mut i = 0;

    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let kind = if c == '[' {
            let close = s[i..]
                .find(']')
                .map(|k| i + k)
                .ok_or_else(|| err(start, "unclosed bracket atom"))?;
            let atom = parse_bracket(&s[i + 1..close], i + 1)?;
            i = close + 1;
            TokenKind::Bracket(atom)
        } else if c == ']' {
            return Err(err(i, "unmatched ']'"));
        } else if ORGANIC_TWO.iter().any(|p| s[i..].starts_with(p)) {
            i += 2;
            TokenKind::Atom {
                symbol: s[start..i].to_string(),
                aromatic: false,
            }
        } else if ORGANIC_ONE.contains(&c) || c == '*' {
            i += 1;
            TokenKind::Atom {
                symbol: c.to_string(),
                aromatic: false,
            }
        } else if AROMATIC_ONE.contains(&c) {
            i += 1;
            TokenKind::Atom {
                symbol: c.to_string(),
                aromatic: true,
            }
        } else if BONDS.contains(&c) {
            i += 1;
            TokenKind::Bond(c)
        } else if c.is_ascii_digit() {
            i += 1;
            TokenKind::RingClosure(u16::from(bytes[start] - b'0'))
        } else if c == '%' {
            let digits = s.get(i + 1..i + 3).filter(|d| d.bytes().all(|b| b.is_ascii_digit()));
            let d = digits.ok_or_else(|| err(start, "'%' must be followed by two digits"))?;
            i += 3;
            TokenKind::RingClosure(d.parse().expect("two ASCII digits"))
        } else if c == '(' {
            branch_stack.push(i);
            i += 1;
            TokenKind::BranchOpen
        } else if c == ')' {
            if branch_stack.pop().is_none() {
                return Err(err(i, "unbalanced ')'"));
            }
            i += 1;
            TokenKind::BranchClose
        } else if c == '.' {
            i += 1;
            TokenKind::Dot
        } else {
            return Err(err(i, format!("unexpected character '{c}'")));
        };

        if let TokenKind::RingClosure(label) = kind {
            if open_rings.remove(&label).is_none() {
                open_rings.insert(label, start);
            }
        }
        tokens.push(Token {
            kind,
            offset: start,
            text: s[start..i].to_string(),
        });
    }

    if let Some(&open) = branch_stack.first() {
        return Err(err(open, "unbalanced '('"));
    }
    if let Some(&offset) = open_rings.values().min() {
        return Err(err(offset, "ring closure is never closed"));
    }
    Ok(SmilesTokenStream { tokens })
}

fn parse_bracket(body: &str, base: usize) -> Result<BracketAtom> {
    let b = body.as_bytes();
    let mut i = 0;
    let mut atom = BracketAtom::default();

    let digits_end = |from: usize| from + b[from..].iter().take_while(|c| c.is_ascii_digit()).count();

    let end = digits_end(0);
    if end > 0 {
        atom.isotope = Some(
            body[..end]
                .parse()
                .map_err(|_| err(base, "isotope out of range"))?,
        );
        i = end;
    }

    let rest = &body[i..];
    let symbol_len = if rest.starts_with('*') {
        1
    } else if ["se", "as", "te"].iter().any(|p| rest.starts_with(p)) {
        atom.aromatic = true;
        2
    } else if rest.starts_with(|c: char| AROMATIC_ONE.contains(&c)) {
        atom.aromatic = true;
        1
    } else if rest.starts_with(|c: char| c.is_ascii_uppercase()) {
        if rest[1..].starts_with(|c: char| c.is_ascii_lowercase()) {
            2
        } else {
            1
        }
    } else {
        return Err(err(base + i, "bracket atom has no element symbol"));
    };
    atom.symbol = rest[..symbol_len].to_string();
    i += symbol_len;

    if i < b.len() && b[i] == b'@' {
        let from = i;
        i += 1;
        while i < b.len() && (b[i] == b'@' || b[i].is_ascii_uppercase() && b[i] != b'H' || b[i].is_ascii_digit()) {
            i += 1;
        }
        atom.chirality = Some(body[from..i].to_string());
    }

    if i < b.len() && b[i] == b'H' {
        i += 1;
        let end = digits_end(i);
        atom.hydrogens = if end > i {
            body[i..end]
                .parse()
                .map_err(|_| err(base + i, "hydrogen count out of range"))?
        } else {
            1
        };
        i = end;
    }

    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        let sign: i8 = if b[i] == b'+' { 1 } else { -1 };
        let sym = b[i];
        i += 1;
        let end = digits_end(i);
        let magnitude: i8 = if end > i {
            let m = body[i..end]
                .parse()
                .map_err(|_| err(base + i, "charge out of range"))?;
            i = end;
            m
        } else {
            let mut n = 1;
            while i < b.len() && b[i] == sym {
                n += 1;
                i += 1;
            }
            n
        };
        atom.charge = sign * magnitude;
    }

    if i < b.len() && b[i] == b':' {
        i += 1;
        let end = digits_end(i);
        if end == i {
            return Err(err(base + i, "atom class needs digits"));
        }
        atom.class = Some(
            body[i..end]
                .parse()
                .map_err(|_| err(base + i, "atom class out of range"))?,
        );
        i = end;
    }

    if i != b.len() {
        return Err(err(base + i, format!("unexpected '{}' in bracket atom", b[i] as char)));
    }
    Ok(atom)
}
