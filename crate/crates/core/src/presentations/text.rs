//! The presentation text format.
//!
//! ```text
//! gens: <n> | omega
//! names: a b c          (optional, finite alphabets only)
//! rel: <word>           (zero or more, words module syntax)
//! stream: <name> <args> (stream-backed presentations, exclusive with rel:)
//! ```
//!
//! Files are UTF-8 with LF line endings. Parsing returns the raw structure;
//! interpreting a `stream:` line is the caller's business (the CLI wires it
//! to the construction registry).

use super::{FinitePresentation, PresentationError};
use crate::words::{format_word, parse_word, GeneratorNames, Word};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GensDecl {
    Count(u64),
    Omega,
}

/// Parsed form of a presentation file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationFile {
    pub gens: GensDecl,
    pub names: Option<Vec<String>>,
    pub relators: Vec<Word>,
    /// `stream:` constructor name and arguments, if present.
    pub stream: Option<(String, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for TextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for TextError {}

fn err(line: usize, msg: impl Into<String>) -> TextError {
    TextError {
        line,
        msg: msg.into(),
    }
}

pub fn parse_file(text: &str) -> Result<PresentationFile, TextError> {
    let mut gens: Option<GensDecl> = None;
    let mut names: Option<Vec<String>> = None;
    let mut relators: Vec<Word> = Vec::new();
    let mut stream: Option<(String, Vec<String>)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err(idx, "expected `key: value`"))?;
        let rest = rest.trim();
        match key {
            "gens" => {
                if gens.is_some() {
                    return Err(err(idx, "duplicate gens line"));
                }
                let decl = if rest == "omega" {
                    GensDecl::Omega
                } else {
                    GensDecl::Count(
                        rest.parse()
                            .map_err(|_| err(idx, format!("bad generator count `{rest}`")))?,
                    )
                };
                gens = Some(decl);
            }
            "names" => {
                if gens.is_none() {
                    return Err(err(idx, "names line before gens line"));
                }
                if names.is_some() || !relators.is_empty() || stream.is_some() {
                    return Err(err(idx, "names line out of order"));
                }
                names = Some(rest.split_whitespace().map(str::to_string).collect());
            }
            "rel" => {
                let gens = gens.as_ref().ok_or_else(|| err(idx, "rel before gens"))?;
                if stream.is_some() {
                    return Err(err(idx, "rel line after stream line"));
                }
                let naming = match (&names, gens) {
                    (Some(ns), _) => GeneratorNames::Named(ns.clone()),
                    _ => GeneratorNames::Default,
                };
                let w =
                    parse_word(rest, &naming).map_err(|e| err(idx, e.msg))?;
                relators.push(w);
            }
            "stream" => {
                if gens.is_none() {
                    return Err(err(idx, "stream before gens"));
                }
                if stream.is_some() {
                    return Err(err(idx, "duplicate stream line"));
                }
                if !relators.is_empty() {
                    return Err(err(idx, "stream line cannot follow rel lines"));
                }
                let mut parts = rest.split_whitespace().map(str::to_string);
                let name = parts.next().ok_or_else(|| err(idx, "empty stream line"))?;
                stream = Some((name, parts.collect()));
            }
            other => return Err(err(idx, format!("unknown key `{other}`"))),
        }
    }
    let gens = gens.ok_or_else(|| err(0, "missing gens line"))?;
    if matches!(gens, GensDecl::Omega) && names.is_some() {
        return Err(err(0, "names are only for finite alphabets"));
    }
    Ok(PresentationFile {
        gens,
        names,
        relators,
        stream,
    })
}

/// Canonical rendering; the inverse of [`parse_file`] on its own output.
pub fn render_file(file: &PresentationFile) -> String {
    let mut out = String::new();
    match file.gens {
        GensDecl::Count(n) => out.push_str(&format!("gens: {n}\n")),
        GensDecl::Omega => out.push_str("gens: omega\n"),
    }
    let naming = match &file.names {
        Some(ns) => {
            out.push_str(&format!("names: {}\n", ns.join(" ")));
            GeneratorNames::Named(ns.clone())
        }
        None => GeneratorNames::Default,
    };
    for r in &file.relators {
        out.push_str(&format!("rel: {}\n", format_word(r, &naming)));
    }
    if let Some((name, args)) = &file.stream {
        out.push_str(&format!("stream: {name}"));
        for a in args {
            out.push(' ');
            out.push_str(a);
        }
        out.push('\n');
    }
    out
}

/// Interprets a file without a stream line as a finite presentation.
pub fn file_to_finite(file: &PresentationFile) -> Result<FinitePresentation, TextError> {
    if file.stream.is_some() {
        return Err(err(0, "stream-backed file where a finite one was expected"));
    }
    let n = match file.gens {
        GensDecl::Count(n) => n,
        GensDecl::Omega => return Err(err(0, "omega alphabet needs a stream line")),
    };
    let built = match &file.names {
        Some(ns) => FinitePresentation::with_names(n, ns.clone(), file.relators.clone()),
        None => FinitePresentation::new(n, file.relators.clone()),
    };
    built.map_err(|e: PresentationError| err(0, e.to_string()))
}

pub fn finite_to_file(p: &FinitePresentation) -> PresentationFile {
    PresentationFile {
        gens: GensDecl::Count(p.generator_count()),
        names: match p.names() {
            GeneratorNames::Named(ns) => Some(ns.clone()),
            GeneratorNames::Default => None,
        },
        relators: p.relators().to_vec(),
        stream: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_roundtrip() {
        let text = "gens: 2\nnames: a b\nrel: a^2\nrel: b^3\nrel: a b a b\n";
        let file = parse_file(text).unwrap();
        assert_eq!(render_file(&file), text);
        let p = file_to_finite(&file).unwrap();
        assert_eq!(p.generator_count(), 2);
        assert_eq!(p.relators().len(), 3);
        let back = finite_to_file(&p);
        assert_eq!(render_file(&back), text);
    }

    #[test]
    fn parse_stream_line() {
        let text = "gens: omega\nstream: pn 3 HALT\n";
        let file = parse_file(text).unwrap();
        assert_eq!(file.gens, GensDecl::Omega);
        assert_eq!(
            file.stream,
            Some(("pn".to_string(), vec!["3".to_string(), "HALT".to_string()]))
        );
        assert_eq!(render_file(&file), text);
    }

    #[test]
    fn parse_rejects_malformed_files() {
        for bad in [
            "rel: a\n",
            "gens: 1\ngens: 1\n",
            "gens: q\n",
            "gens: omega\nnames: a\n",
            "gens: 1\nrel: a\nstream: pn 3\n",
            "gens: 1\nwhat: ever\n",
            "gens: 1\nrel: b\n",
        ] {
            assert!(parse_file(bad).and_then(|f| file_to_finite(&f)).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn empty_word_relator_renders_as_one() {
        let file = PresentationFile {
            gens: GensDecl::Count(1),
            names: None,
            relators: vec![Word::identity()],
            stream: None,
        };
        let text = render_file(&file);
        assert_eq!(text, "gens: 1\nrel: 1\n");
        assert_eq!(parse_file(&text).unwrap(), file);
    }
}
