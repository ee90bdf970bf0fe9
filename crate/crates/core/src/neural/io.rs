//! Line-oriented labelled sequence files: one `token<TAB>tag` per line,
//! sequences separated by blank lines, `#` lines are comments.

use std::fmt::Write as _;
use std::path::Path;

use super::model::Tag;
use super::train::LabeledSequence;
use crate::error::{read_to_string, Error, Result};

/// A sequence plus the value of its `# source=` comment, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRecord {
    pub sequence: LabeledSequence,
    pub source: Option<String>,
}

pub fn parse_sequences(text: &str, source_name: &str) -> Result<Vec<SequenceRecord>> {
    let mut out = Vec::new();
    let mut tokens = Vec::new();
    let mut tags = Vec::new();
    let mut source = None;
    let mut start_line = 1;
    let mut flush = |tokens: &mut Vec<String>, tags: &mut Vec<Tag>, source: &mut Option<String>, line: usize| {
        if tokens.is_empty() {
            *source = None;
            return Ok(());
        }
        let sequence = LabeledSequence::new(std::mem::take(tokens), std::mem::take(tags))
            .map_err(|e| Error::parse(source_name, line, e.to_string()))?;
        out.push(SequenceRecord {
            sequence,
            source: source.take(),
        });
        Ok::<(), Error>(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let lineno = i + 1;
        if line.trim().is_empty() {
            flush(&mut tokens, &mut tags, &mut source, start_line)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("source=") {
                source = Some(v.trim().to_string());
            }
            continue;
        }
        if tokens.is_empty() {
            start_line = lineno;
        }
        let (tok, tag) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(source_name, lineno, "expected token<TAB>tag"))?;
        let tag: Tag = tag
            .trim()
            .parse()
            .map_err(|e: Error| Error::parse(source_name, lineno, e.to_string()))?;
        tokens.push(tok.trim().to_string());
        tags.push(tag);
    }
    flush(&mut tokens, &mut tags, &mut source, start_line)?;
    Ok(out)
}

pub fn load_sequences(path: impl AsRef<Path>) -> Result<Vec<SequenceRecord>> {
    let path = path.as_ref();
    parse_sequences(&read_to_string(path)?, &path.display().to_string())
}

pub fn format_sequences(records: &[SequenceRecord]) -> String {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if let Some(src) = &r.source {
            let _ = writeln!(out, "# source={src}");
        }
        for (tok, tag) in r.sequence.tokens.iter().zip(&r.sequence.tags) {
            let _ = writeln!(out, "{tok}\t{tag}");
        }
    }
    out
}

pub fn save_sequences(path: impl AsRef<Path>, records: &[SequenceRecord]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_sequences(records)).map_err(|e| Error::io(path, e))
}
