use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{RangeQuery, Region};
use crate::data::{Column, Vocab};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Op(String),
}

const OP_CHARS: &[char] = &['=', '<', '>', '!'];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, ch)) = it.peek() {
        if ch.is_whitespace() {
            it.next();
        } else if ch == '"' {
            it.next();
            let mut s = String::new();
            loop {
                match it.next() {
                    Some((_, '"')) => break,
                    Some((_, '\\')) => match it.next() {
                        Some((_, c)) => s.push(c),
                        None => break,
                    },
                    Some((_, c)) => s.push(c),
                    None => {
                        return Err(Error::Parse {
                            position: pos,
                            token: text[pos..].to_string(),
                            message: "unterminated quote".into(),
                        })
                    }
                }
            }
            out.push((pos, Tok::Quoted(s)));
        } else if OP_CHARS.contains(&ch) {
            let mut s = String::new();
            while let Some(&(_, c)) = it.peek() {
                if !OP_CHARS.contains(&c) {
                    break;
                }
                s.push(c);
                it.next();
            }
            out.push((pos, Tok::Op(s)));
        } else {
            let mut s = String::new();
            while let Some(&(_, c)) = it.peek() {
                if c.is_whitespace() || c == '"' || OP_CHARS.contains(&c) {
                    break;
                }
                s.push(c);
                it.next();
            }
            out.push((pos, Tok::Word(s)));
        }
    }
    Ok(out)
}

fn tok_text(t: &Tok) -> String {
    match t {
        Tok::Word(s) | Tok::Op(s) => s.clone(),
        Tok::Quoted(s) => format!("\"{s}\""),
    }
}

fn parse_err(position: usize, token: &str, message: &str) -> Error {
    Error::Parse { position, token: token.to_string(), message: message.to_string() }
}

/// Parses `col7 >= 3 AND col2 == 1` style conjunctions.
///
/// Operators are `==`, `<=`, `>=`, `<` and `>`. A literal is a raw value,
/// optionally double-quoted, compared in the column's natural order; `#k`
/// names vocab index `k` directly. Several constraints on one column
/// intersect. Empty text is the unconstrained query.
pub fn parse_query(text: &str, columns: &[Column]) -> Result<RangeQuery> {
    let toks = lex(text)?;
    let mut query = RangeQuery::unconstrained(columns.len());
    let mut i = 0;
    let end = text.len();
    while i < toks.len() {
        let (cpos, ctok) = &toks[i];
        let Tok::Word(name) = ctok else {
            return Err(parse_err(*cpos, &tok_text(ctok), "expected a column name"));
        };
        let col =
            columns.iter().position(|c| &c.name == name).ok_or_else(|| parse_err(*cpos, name, "unknown column"))?;
        let (opos, otok) = toks.get(i + 1).ok_or_else(|| parse_err(end, "", "expected an operator"))?;
        let op = match otok {
            Tok::Op(s) if matches!(s.as_str(), "==" | "<=" | ">=" | "<" | ">") => s.as_str(),
            other => return Err(parse_err(*opos, &tok_text(other), "expected one of ==, <=, >=, <, >")),
        };
        let (lpos, ltok) = toks.get(i + 2).ok_or_else(|| parse_err(end, "", "expected a literal"))?;
        let region = match ltok {
            Tok::Word(s) => match s.strip_prefix('#') {
                Some(k) => {
                    let k: u32 = k.parse().map_err(|_| parse_err(*lpos, s, "bad index literal"))?;
                    index_region(op, k, columns[col].vocab.size())
                }
                None => literal_region(op, s, &columns[col].vocab),
            },
            Tok::Quoted(s) => literal_region(op, s, &columns[col].vocab),
            Tok::Op(s) => return Err(parse_err(*lpos, s, "expected a literal")),
        };
        if region.is_empty() {
            return Err(Error::EmptyRegion(columns[col].name.clone()));
        }
        query.constrain(col, region);
        if query.region(col).is_some_and(Region::is_empty) {
            return Err(Error::EmptyRegion(columns[col].name.clone()));
        }
        i += 3;
        if let Some((apos, atok)) = toks.get(i) {
            match atok {
                Tok::Word(w) if w.eq_ignore_ascii_case("and") => {
                    i += 1;
                    if i == toks.len() {
                        return Err(parse_err(end, "", "dangling AND"));
                    }
                }
                other => return Err(parse_err(*apos, &tok_text(other), "expected AND")),
            }
        }
    }
    Ok(query)
}

fn interval(lo: usize, hi_exclusive: usize) -> Region {
    if lo < hi_exclusive {
        Region::Interval { lo: lo as u32, hi: (hi_exclusive - 1) as u32 }
    } else {
        Region::Set(Vec::new())
    }
}

fn index_region(op: &str, k: u32, size: usize) -> Region {
    let k = k as usize;
    match op {
        "==" if k < size => interval(k, k + 1),
        "==" => interval(0, 0),
        "<=" => interval(0, (k + 1).min(size)),
        "<" => interval(0, k.min(size)),
        ">=" => interval(k, size),
        _ => interval(k + 1, size),
    }
}

fn literal_region(op: &str, raw: &str, vocab: &Vocab) -> Region {
    let size = vocab.size();
    match op {
        "==" => match vocab.encode(raw) {
            Some(k) => Region::point(k),
            None => interval(0, 0),
        },
        "<=" => interval(0, vocab.count_less_equal(raw)),
        "<" => interval(0, vocab.count_less(raw)),
        ">=" => interval(vocab.count_less(raw), size),
        _ => interval(vocab.count_less_equal(raw), size),
    }
}

fn format_literal(value: &str) -> String {
    let plain = !value.is_empty()
        && !value.starts_with('#')
        && !value.eq_ignore_ascii_case("and")
        && !value.chars().any(|c| c.is_whitespace() || c == '"' || c == '\\' || OP_CHARS.contains(&c));
    if plain {
        return value.to_string();
    }
    let mut s = String::from("\"");
    for c in value.chars() {
        if c == '"' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('"');
    s
}

/// Renders a query of interval regions back into the text form.
/// Unconstrained columns are omitted; set regions are rejected.
pub fn format_query(query: &RangeQuery, columns: &[Column]) -> Result<String> {
    if query.n_cols() != columns.len() {
        return Err(Error::ShapeMismatch { context: "query columns", expected: columns.len(), found: query.n_cols() });
    }
    let mut clauses = Vec::new();
    for (c, col) in columns.iter().enumerate() {
        let size = col.vocab.size();
        let Some(region) = query.effective_region(c, size) else { continue };
        let Region::Interval { lo, hi } = *region else {
            return Err(Error::InvalidSpec(format!("column `{}` has a set region with no text form", col.name)));
        };
        let lit = |k: u32| format_literal(col.vocab.values()[k as usize].as_str());
        if lo == hi {
            clauses.push(format!("{} == {}", col.name, lit(lo)));
            continue;
        }
        if lo > 0 {
            clauses.push(format!("{} >= {}", col.name, lit(lo)));
        }
        if (hi as usize) + 1 < size {
            clauses.push(format!("{} <= {}", col.name, lit(hi)));
        }
    }
    Ok(clauses.join(" AND "))
}
