//! Line-oriented sectioned text shared by scenario, sweep and topology files.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! bare list entry
//! ```

use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Pair { key: String, value: String },
    Item(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub number: usize,
    pub entry: Entry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub lines: Vec<Line>,
}

impl Section {
    /// Key-value pairs in file order, with their line numbers.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, &str, &str)> {
        self.lines.iter().filter_map(|l| match &l.entry {
            Entry::Pair { key, value } => Some((l.number, key.as_str(), value.as_str())),
            Entry::Item(_) => None,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document, ParseError> {
        let mut doc = Document::default();
        for (i, raw) in text.lines().enumerate() {
            let number = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|n| !n.is_empty())
                    .ok_or_else(|| ParseError::new(number, format!("bad section header '{line}'")))?;
                if doc.section(name).is_some() {
                    return Err(ParseError::new(number, format!("section [{name}] appears twice")));
                }
                doc.sections.push(Section { name: name.to_string(), line: number, lines: Vec::new() });
                continue;
            }
            let Some(section) = doc.sections.last_mut() else {
                return Err(ParseError::new(number, "content before the first section header"));
            };
            let entry = match line.split_once('=') {
                Some((k, v)) => {
                    let key = k.trim();
                    if key.is_empty() {
                        return Err(ParseError::new(number, "empty key"));
                    }
                    if section.pairs().any(|(_, existing, _)| existing == key) {
                        return Err(ParseError::new(number, format!("duplicate key '{key}' in [{}]", section.name)));
                    }
                    Entry::Pair { key: key.to_string(), value: v.trim().to_string() }
                }
                None => Entry::Item(line.to_string()),
            };
            section.lines.push(Line { number, entry });
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Fails on the first section whose name is not in `known`.
    pub fn expect_sections(&self, known: &[&str]) -> Result<(), ParseError> {
        match self.sections.iter().find(|s| !known.contains(&s.name.as_str())) {
            Some(s) => Err(ParseError::new(s.line, format!("unknown section [{}]", s.name))),
            None => Ok(()),
        }
    }
}

/// Splits a comma-separated list, trimming each field.
pub fn fields(value: &str) -> Vec<&str> {
    value.split(',').map(str::trim).collect()
}

pub fn number(line: usize, key: &str, value: &str) -> Result<f64, ParseError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::new(line, format!("{key}: expected a number, got '{value}'"))),
    }
}
