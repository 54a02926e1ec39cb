//! Plain-text Pauli-sum format.
//!
//! ```text
//! # comment
//! qubits: 4
//! -1.0 Z0 Z1
//! 0.5 X0 Y3
//! 0.25
//! ```
//!
//! Each term line is a real coefficient followed by zero or more
//! `<letter><qubit>` factors. A bare coefficient is the identity. Without a
//! `qubits:` header the register size is one more than the largest index.

use std::fmt::Write as _;
use std::path::Path;

use super::{PauliString, PauliSum};
use crate::error::{Error, Result};
use crate::statevec::{PauliLetter, MAX_QUBITS};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_coefficient(token: &str, line: usize) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(parse_error(line, format!("non-finite coefficient `{v}`"))),
        Err(_) => {
            let looks_complex = token.ends_with(['j', 'i', 'J'])
                || token.contains(['(', ')'])
                || token.trim_start_matches(['+', '-']).contains(['+', '-']) && !token.contains(['e', 'E']);
            if looks_complex {
                Err(parse_error(line, format!("non-real coefficient `{token}`")))
            } else {
                Err(parse_error(line, format!("malformed coefficient `{token}`")))
            }
        }
    }
}

fn parse_factor(token: &str, line: usize) -> Result<(usize, PauliLetter)> {
    let mut chars = token.chars();
    let letter = match chars.next() {
        Some('X') | Some('x') => PauliLetter::X,
        Some('Y') | Some('y') => PauliLetter::Y,
        Some('Z') | Some('z') => PauliLetter::Z,
        Some('I') | Some('i') => PauliLetter::I,
        _ => return Err(parse_error(line, format!("malformed Pauli factor `{token}`"))),
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_error(line, format!("malformed Pauli factor `{token}`")));
    }
    let q: usize = digits
        .parse()
        .map_err(|_| parse_error(line, format!("qubit index out of range in `{token}`")))?;
    if q >= MAX_QUBITS {
        return Err(parse_error(
            line,
            format!("qubit index {q} exceeds the {MAX_QUBITS}-qubit limit"),
        ));
    }
    Ok((q, letter))
}

/// Parses the text format; errors carry 1-based line numbers.
pub fn parse_pauli_str(text: &str) -> Result<PauliSum> {
    let mut header: Option<(usize, usize)> = None;
    let mut raw: Vec<(usize, f64, Vec<(usize, PauliLetter)>)> = Vec::new();
    let mut max_index: Option<usize> = None;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("qubits:") {
            if header.is_some() {
                return Err(parse_error(lineno, "duplicate `qubits:` header"));
            }
            if !raw.is_empty() {
                return Err(parse_error(lineno, "`qubits:` header must precede all terms"));
            }
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| parse_error(lineno, format!("malformed qubit count `{}`", rest.trim())))?;
            if n == 0 || n > MAX_QUBITS {
                return Err(parse_error(lineno, format!("qubit count {n} outside 1..={MAX_QUBITS}")));
            }
            header = Some((n, lineno));
            continue;
        }
        let mut tokens = content.split_whitespace();
        let coeff = parse_coefficient(tokens.next().expect("non-empty line"), lineno)?;
        let mut factors: Vec<(usize, PauliLetter)> = Vec::new();
        for tok in tokens {
            let (q, letter) = parse_factor(tok, lineno)?;
            if factors.iter().any(|&(p, _)| p == q) {
                return Err(parse_error(lineno, format!("qubit {q} appears twice in one term")));
            }
            max_index = Some(max_index.map_or(q, |m| m.max(q)));
            factors.push((q, letter));
        }
        raw.push((lineno, coeff, factors));
    }

    if raw.is_empty() {
        return Err(parse_error(text.lines().count().max(1), "no terms"));
    }
    let num_qubits = match header {
        Some((n, lineno)) => {
            if let Some(m) = max_index {
                if m >= n {
                    return Err(parse_error(
                        lineno,
                        format!("header declares {n} qubits but index {m} is used"),
                    ));
                }
            }
            n
        }
        None => max_index.map_or(1, |m| m + 1),
    };
    let terms = raw
        .into_iter()
        .map(|(lineno, c, factors)| {
            PauliString::new(num_qubits, &factors)
                .map(|s| (c, s))
                .map_err(|e| parse_error(lineno, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    PauliSum::new(num_qubits, terms)
}

pub fn parse_pauli_file(path: impl AsRef<Path>) -> Result<PauliSum> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pauli_str(&text)
}

/// Canonical text: `qubits:` header, then one term per line in canonical order.
pub fn serialize_pauli_file(sum: &PauliSum) -> String {
    let mut out = format!("qubits: {}\n", sum.num_qubits());
    for t in sum.terms() {
        let word = t.string.to_string();
        if word.is_empty() {
            let _ = writeln!(out, "{}", t.coeff);
        } else {
            let _ = writeln!(out, "{} {}", t.coeff, word);
        }
    }
    out
}

pub fn write_pauli_file(sum: &PauliSum, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_pauli_file(sum)).map_err(|e| Error::io(path, e))
}
