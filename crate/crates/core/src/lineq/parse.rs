//! System file format: header `k r <ground>`, k matrix rows, one b row,
//! then an optional Z section ("Z norepeat", "Z nopairswap", or a bare "Z"
//! followed by one discounted vector per line). '#' starts a comment.

use crate::error::{Error, Result};

use super::ground::GroundSet;
use super::system::{LinearSystem, ZRule};

pub fn parse_system(text: &str) -> Result<LinearSystem> {
    let mut lines = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim().to_string();
        if !line.is_empty() {
            lines.push((lineno + 1, line));
        }
    }
    let mut iter = lines.into_iter();
    let (hline, header) = iter.next().ok_or(Error::Parse {
        line: 0,
        message: "empty input".to_string(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 4 {
        return Err(Error::Parse {
            line: hline,
            message: "header must be 'k r <Fp p | ZN n | AB n1 n2 ...>'".to_string(),
        });
    }
    let k: usize = fields[0].parse().map_err(|_| Error::Parse {
        line: hline,
        message: "bad k".to_string(),
    })?;
    let r: usize = fields[1].parse().map_err(|_| Error::Parse {
        line: hline,
        message: "bad r".to_string(),
    })?;
    let ground = match fields[2] {
        "Fp" => GroundSet::prime_field(parse_u64(fields[3], hline)?)?,
        "ZN" => GroundSet::integer_range(parse_u64(fields[3], hline)?)?,
        "AB" => {
            let factors: Vec<u64> = fields[3..]
                .iter()
                .map(|f| parse_u64(f, hline))
                .collect::<Result<_>>()?;
            GroundSet::abelian(factors)?
        }
        other => {
            return Err(Error::Parse {
                line: hline,
                message: format!("unknown ground set '{other}'"),
            })
        }
    };

    let mut a = Vec::with_capacity(k);
    for _ in 0..k {
        let (lineno, line) = iter.next().ok_or(Error::Parse {
            line: hline,
            message: "missing matrix row".to_string(),
        })?;
        let row: Vec<i64> = line
            .split_whitespace()
            .map(|f| parse_i64(f, lineno))
            .collect::<Result<_>>()?;
        if row.len() != r {
            return Err(Error::Parse {
                line: lineno,
                message: format!("matrix row has {} entries, expected {r}", row.len()),
            });
        }
        a.push(row);
    }

    let (bline, b_row) = iter.next().ok_or(Error::Parse {
        line: hline,
        message: "missing right-hand side".to_string(),
    })?;
    let b: Vec<i64> = b_row
        .split_whitespace()
        .map(|f| parse_i64(f, bline))
        .collect::<Result<_>>()?;
    if b.len() != k {
        return Err(Error::Parse {
            line: bline,
            message: format!("right-hand side has {} entries, expected {k}", b.len()),
        });
    }

    let mut z = ZRule::Empty;
    if let Some((zline, zheader)) = iter.next() {
        let fields: Vec<&str> = zheader.split_whitespace().collect();
        if fields[0] != "Z" {
            return Err(Error::Parse {
                line: zline,
                message: format!("expected a Z section, found '{}'", fields[0]),
            });
        }
        z = match fields.get(1) {
            Some(&"norepeat") => ZRule::NoRepeat,
            Some(&"nopairswap") => ZRule::NoPairSwap,
            Some(other) => {
                return Err(Error::Parse {
                    line: zline,
                    message: format!("unknown discount convention '{other}'"),
                })
            }
            None => {
                let mut vectors = Vec::new();
                for (lineno, line) in iter.by_ref() {
                    let v: Vec<i64> = line
                        .split_whitespace()
                        .map(|f| parse_i64(f, lineno))
                        .collect::<Result<_>>()?;
                    vectors.push(v);
                }
                ZRule::Explicit(vectors)
            }
        };
    }
    LinearSystem::new(ground, a, b, z)
}

fn parse_u64(field: &str, line: usize) -> Result<u64> {
    field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected an integer, found '{field}'"),
    })
}

fn parse_i64(field: &str, line: usize) -> Result<i64> {
    field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected an integer, found '{field}'"),
    })
}
