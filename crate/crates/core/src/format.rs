//! On-disk formats.
//!
//! Instance files are UTF-8 and line-based; `#` starts a comment and tokens
//! are whitespace-separated. An instance with lower quotas:
//!
//! ```text
//! HRLQ
//! resident r
//! hospital h1 0 1
//! hospital h2 1 1
//! pref r : h1 h2
//! pref h1 : r
//! pref h2 : r
//! ```
//!
//! Plain instances use the header `HR` and `hospital <id> <cap>` lines.
//! Matchings serialize as `match <resident> <hospital>` lines in resident
//! declaration order followed by a `# summary` comment. Serialization
//! always emits declaration order, so equal instances render identically.

use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{HrInstance, HrlqInstance, Matching, ValidationError};

/// Characters reserved for synthetic vertex names in reduced instances.
/// Source files may not use them.
const RESERVED: [char; 2] = ['#', '!'];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown id `{id}`")]
    UnknownId { line: usize, id: String },
    #[error("line {line}: `{id}` declared twice")]
    DuplicateDeclaration { line: usize, id: String },
    #[error("line {line}: id `{id}` uses a reserved character (`#` or `!`)")]
    ReservedCharacter { line: usize, id: String },
    #[error("line {line}: second preference list for `{id}`")]
    DuplicatePreferenceLine { line: usize, id: String },
    #[error("line {line}: hospital `{id}`: lower quota {lower} exceeds upper quota {upper}")]
    LowerExceedsUpper {
        line: usize,
        id: String,
        lower: usize,
        upper: usize,
    },
    #[error("missing preference list for `{id}`")]
    MissingPreferenceList { id: String },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

struct RawInstance {
    residents: Vec<String>,
    hospitals: Vec<(String, usize, usize)>,
    resident_prefs: Vec<Vec<usize>>,
    hospital_prefs: Vec<Vec<usize>>,
}

/// Tokenized lines with comments stripped; keeps 1-based line numbers.
/// A comment starts at a token beginning with `#`, so the synthetic
/// `<h>#<s>` names of serialized reduced instances survive intact.
fn tokenize(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let mut tokens = Vec::new();
            for token in line.split_whitespace() {
                if token.starts_with('#') {
                    break;
                }
                tokens.push(token);
            }
            if tokens.is_empty() {
                None
            } else {
                Some((i + 1, tokens))
            }
        })
        .collect()
}

fn check_id(line: usize, id: &str, reject_reserved: bool) -> Result<(), ParseError> {
    if reject_reserved && id.contains(RESERVED) {
        return Err(ParseError::ReservedCharacter {
            line,
            id: id.to_string(),
        });
    }
    Ok(())
}

fn parse_count(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    token.parse().map_err(|_| ParseError::Syntax {
        line,
        message: format!("expected {what}, got `{token}`"),
    })
}

fn parse_raw(text: &str, header: &str, with_lower: bool) -> Result<RawInstance, ParseError> {
    let lines = tokenize(text);
    let mut iter = lines.into_iter();
    match iter.next() {
        Some((_, tokens)) if tokens == [header] => {}
        Some((line, tokens)) => {
            return Err(ParseError::Syntax {
                line,
                message: format!("expected header `{header}`, got `{}`", tokens.join(" ")),
            })
        }
        None => {
            return Err(ParseError::Syntax {
                line: 1,
                message: format!("empty file, expected header `{header}`"),
            })
        }
    }

    let mut residents: Vec<String> = Vec::new();
    let mut hospitals: Vec<(String, usize, usize)> = Vec::new();
    let mut declared = std::collections::HashMap::new();
    // (owner id, entries, line), resolved after all declarations are known
    let mut pref_lines: Vec<(usize, String, Vec<String>)> = Vec::new();

    for (line, tokens) in iter {
        match tokens[0] {
            "resident" => {
                if tokens.len() != 2 {
                    return Err(ParseError::Syntax {
                        line,
                        message: "expected `resident <id>`".into(),
                    });
                }
                let id = tokens[1];
                check_id(line, id, with_lower)?;
                if declared.contains_key(id) {
                    return Err(ParseError::DuplicateDeclaration {
                        line,
                        id: id.into(),
                    });
                }
                declared.insert(id.to_string(), (true, residents.len()));
                residents.push(id.to_string());
            }
            "hospital" => {
                let expect = if with_lower { 4 } else { 3 };
                if tokens.len() != expect {
                    let shape = if with_lower {
                        "`hospital <id> <lq> <uq>`"
                    } else {
                        "`hospital <id> <cap>`"
                    };
                    return Err(ParseError::Syntax {
                        line,
                        message: format!("expected {shape}"),
                    });
                }
                let id = tokens[1];
                check_id(line, id, with_lower)?;
                if declared.contains_key(id) {
                    return Err(ParseError::DuplicateDeclaration {
                        line,
                        id: id.into(),
                    });
                }
                let (lower, upper) = if with_lower {
                    let lq = parse_count(line, tokens[2], "a lower quota")?;
                    let uq = parse_count(line, tokens[3], "an upper quota")?;
                    if lq > uq {
                        return Err(ParseError::LowerExceedsUpper {
                            line,
                            id: id.into(),
                            lower: lq,
                            upper: uq,
                        });
                    }
                    (lq, uq)
                } else {
                    (0, parse_count(line, tokens[2], "a capacity")?)
                };
                declared.insert(id.to_string(), (false, hospitals.len()));
                hospitals.push((id.to_string(), lower, upper));
            }
            "pref" => {
                if tokens.len() < 3 || tokens[2] != ":" {
                    return Err(ParseError::Syntax {
                        line,
                        message: "expected `pref <id> : <id> ...`".into(),
                    });
                }
                pref_lines.push((
                    line,
                    tokens[1].to_string(),
                    tokens[3..].iter().map(|s| s.to_string()).collect(),
                ));
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }

    let mut resident_prefs: Vec<Option<Vec<usize>>> = vec![None; residents.len()];
    let mut hospital_prefs: Vec<Option<Vec<usize>>> = vec![None; hospitals.len()];
    for (line, owner, entries) in pref_lines {
        let &(owner_is_resident, owner_idx) =
            declared.get(&owner).ok_or_else(|| ParseError::UnknownId {
                line,
                id: owner.clone(),
            })?;
        let mut list = Vec::with_capacity(entries.len());
        for entry in &entries {
            match declared.get(entry) {
                // A resident lists hospitals and vice versa.
                Some(&(is_resident, idx)) if is_resident != owner_is_resident => list.push(idx),
                _ => {
                    return Err(ParseError::UnknownId {
                        line,
                        id: entry.clone(),
                    })
                }
            }
        }
        let slot = if owner_is_resident {
            &mut resident_prefs[owner_idx]
        } else {
            &mut hospital_prefs[owner_idx]
        };
        if slot.is_some() {
            return Err(ParseError::DuplicatePreferenceLine { line, id: owner });
        }
        *slot = Some(list);
    }

    let resident_prefs = resident_prefs
        .into_iter()
        .enumerate()
        .map(|(r, p)| {
            p.ok_or_else(|| ParseError::MissingPreferenceList {
                id: residents[r].clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let hospital_prefs = hospital_prefs
        .into_iter()
        .enumerate()
        .map(|(h, p)| {
            p.ok_or_else(|| ParseError::MissingPreferenceList {
                id: hospitals[h].0.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(RawInstance {
        residents,
        hospitals,
        resident_prefs,
        hospital_prefs,
    })
}

/// Parses an instance with lower quotas (`HRLQ` header).
pub fn parse_hrlq(text: &str) -> Result<HrlqInstance, ParseError> {
    let raw = parse_raw(text, "HRLQ", true)?;
    Ok(HrlqInstance::from_parts(
        raw.residents,
        raw.hospitals,
        raw.resident_prefs,
        raw.hospital_prefs,
    )?)
}

/// Parses a plain instance (`HR` header, capacities only).
pub fn parse_hr(text: &str) -> Result<HrInstance, ParseError> {
    let raw = parse_raw(text, "HR", false)?;
    Ok(HrInstance::from_parts(
        raw.residents,
        raw.hospitals.into_iter().map(|(n, _, uq)| (n, uq)).collect(),
        raw.resident_prefs,
        raw.hospital_prefs,
    )?)
}

pub fn serialize_hrlq(inst: &HrlqInstance) -> String {
    let mut out = String::from("HRLQ\n");
    for r in 0..inst.n_residents() {
        writeln!(out, "resident {}", inst.resident_name(r)).unwrap();
    }
    for h in 0..inst.n_hospitals() {
        writeln!(
            out,
            "hospital {} {} {}",
            inst.hospital_name(h),
            inst.lower(h),
            inst.upper(h)
        )
        .unwrap();
    }
    for r in 0..inst.n_residents() {
        write!(out, "pref {} :", inst.resident_name(r)).unwrap();
        for &h in inst.resident_prefs(r) {
            write!(out, " {}", inst.hospital_name(h)).unwrap();
        }
        out.push('\n');
    }
    for h in 0..inst.n_hospitals() {
        write!(out, "pref {} :", inst.hospital_name(h)).unwrap();
        for &r in inst.hospital_prefs(h) {
            write!(out, " {}", inst.resident_name(r)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn serialize_hr(inst: &HrInstance) -> String {
    let mut out = String::from("HR\n");
    for r in 0..inst.n_residents() {
        writeln!(out, "resident {}", inst.resident_name(r)).unwrap();
    }
    for h in 0..inst.n_hospitals() {
        writeln!(out, "hospital {} {}", inst.hospital_name(h), inst.capacity(h)).unwrap();
    }
    for r in 0..inst.n_residents() {
        write!(out, "pref {} :", inst.resident_name(r)).unwrap();
        for &h in inst.resident_prefs(r) {
            write!(out, " {}", inst.hospital_name(h)).unwrap();
        }
        out.push('\n');
    }
    for h in 0..inst.n_hospitals() {
        write!(out, "pref {} :", inst.hospital_name(h)).unwrap();
        for &r in inst.hospital_prefs(h) {
            write!(out, " {}", inst.resident_name(r)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Renders a matching in the output format: one `match` line per pair in
/// resident declaration order, then a summary comment. `deficient` counts
/// hospitals below their lower quota.
pub fn render_matching(inst: &HrlqInstance, m: &Matching) -> String {
    let mut out = String::new();
    for (r, h) in m.pairs() {
        writeln!(
            out,
            "match {} {}",
            inst.resident_name(r),
            inst.hospital_name(h)
        )
        .unwrap();
    }
    writeln!(
        out,
        "# summary matched={} deficient={}",
        m.size(),
        inst.deficient_hospitals(m).len()
    )
    .unwrap();
    out
}

/// One-line rendering used in certification reports: `r1:h2,r3:h1` in
/// resident declaration order, or `-` for the empty matching.
pub fn render_matching_compact(inst: &HrlqInstance, m: &Matching) -> String {
    let parts: Vec<String> = m
        .pairs()
        .map(|(r, h)| format!("{}:{}", inst.resident_name(r), inst.hospital_name(h)))
        .collect();
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(",")
    }
}

/// Parses `match <resident> <hospital>` lines into raw pairs. Comments and
/// blank lines are ignored; semantic validation is the caller's job.
pub fn parse_matching(inst: &HrlqInstance, text: &str) -> Result<Vec<(usize, usize)>, ParseError> {
    let mut pairs = Vec::new();
    for (line, tokens) in tokenize(text) {
        if tokens[0] != "match" || tokens.len() != 3 {
            return Err(ParseError::Syntax {
                line,
                message: "expected `match <resident> <hospital>`".into(),
            });
        }
        let r = inst
            .resident_index(tokens[1])
            .ok_or_else(|| ParseError::UnknownId {
                line,
                id: tokens[1].into(),
            })?;
        let h = inst
            .hospital_index(tokens[2])
            .ok_or_else(|| ParseError::UnknownId {
                line,
                id: tokens[2].into(),
            })?;
        pairs.push((r, h));
    }
    Ok(pairs)
}
