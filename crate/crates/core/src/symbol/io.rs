//! Plain-text symbol files.
//!
//! ```text
//! file    := header dims coeff* "end"
//! header  := "blockmg-symbol 1"
//! dims    := "d" INT NEWLINE "m" INT
//! coeff   := "coeff" INT{m} NEWLINE row{d}
//! row     := entry{d}
//! entry   := FLOAT ("+" | "-") FLOAT "i"        e.g. 5.25-0.5i
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Floats are written in
//! shortest round-trip form, so write-then-read is bit-exact.

use super::MatrixTrigPolynomial;
use crate::error::{Error, Result};
use crate::smallmat::{CMat, C64};
use std::fmt::Write as _;
use std::path::Path;

const HEADER: &str = "blockmg-symbol 1";

fn fmt_entry(v: C64) -> String {
    let sign = if v.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{sign}{:?}i", v.re, v.im.abs())
}

fn parse_entry(s: &str, line: usize) -> Result<C64> {
    let err = |msg: &str| Error::Parse {
        line,
        msg: format!("{msg}: {s:?}"),
    };
    let body = s
        .strip_suffix('i')
        .ok_or_else(|| err("entry must end in 'i'"))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(|| err("missing imaginary part"))?;
    let re: f64 = body[..split].parse().map_err(|_| err("bad real part"))?;
    let im: f64 = body[split..]
        .parse()
        .map_err(|_| err("bad imaginary part"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(err("non-finite entry"));
    }
    Ok(C64::new(re, im))
}

pub fn write_symbol(p: &MatrixTrigPolynomial) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "d {}", p.d());
    let _ = writeln!(out, "m {}", p.m());
    for (j, c) in p.coeffs() {
        let idx: Vec<String> = j.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "coeff {}", idx.join(" "));
        for i in 0..c.rows() {
            let row: Vec<String> = c.row(i).iter().map(|&v| fmt_entry(v)).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out.push_str("end\n");
    out
}

pub fn parse_symbol(text: &str) -> Result<MatrixTrigPolynomial> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("unexpected end, expected {what}"),
        })
    };

    let (ln, header) = next("header")?;
    if header != HEADER {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected {HEADER:?}"),
        });
    }
    let mut dim = |key: &str| -> Result<usize> {
        let (ln, l) = next(key)?;
        let mut parts = l.split_whitespace();
        match (
            parts.next(),
            parts.next().map(str::parse::<usize>),
            parts.next(),
        ) {
            (Some(k), Some(Ok(v)), None) if k == key && v > 0 => Ok(v),
            _ => Err(Error::Parse {
                line: ln,
                msg: format!("expected '{key} <positive int>'"),
            }),
        }
    };
    let d = dim("d")?;
    let m = dim("m")?;
    let mut coeffs = Vec::new();
    loop {
        let (ln, l) = next("coeff or end")?;
        if l == "end" {
            break;
        }
        let mut parts = l.split_whitespace();
        if parts.next() != Some("coeff") {
            return Err(Error::Parse {
                line: ln,
                msg: "expected 'coeff' or 'end'".into(),
            });
        }
        let j: Vec<i32> = parts
            .map(|s| {
                s.parse().map_err(|_| Error::Parse {
                    line: ln,
                    msg: format!("bad index {s:?}"),
                })
            })
            .collect::<Result<_>>()?;
        if j.len() != m {
            return Err(Error::Parse {
                line: ln,
                msg: format!("multi-index needs {m} entries"),
            });
        }
        let mut data = Vec::with_capacity(d * d);
        for _ in 0..d {
            let (ln, row) = next("matrix row")?;
            let vals: Vec<C64> = row
                .split_whitespace()
                .map(|s| parse_entry(s, ln))
                .collect::<Result<_>>()?;
            if vals.len() != d {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("row needs {d} entries"),
                });
            }
            data.extend(vals);
        }
        coeffs.push((j, CMat::from_vec(d, d, data)?));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse {
            line: ln,
            msg: "content after 'end'".into(),
        });
    }
    MatrixTrigPolynomial::from_coeffs(d, m, coeffs)
}

pub fn write_symbol_file(p: &MatrixTrigPolynomial, path: &Path) -> Result<()> {
    std::fs::write(path, write_symbol(p))?;
    Ok(())
}

pub fn read_symbol_file(path: &Path) -> Result<MatrixTrigPolynomial> {
    parse_symbol(&std::fs::read_to_string(path)?)
}
