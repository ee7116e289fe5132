use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_jsonl, EvalError};

pub const DEFAULT_TEMPLATE: &str = "behavior of {X} with timbre like {Y}";

/// Two distinct sound classes to be blended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct ConceptPair {
    x_label: String,
    y_label: String,
}

#[derive(Deserialize)]
struct RawPair {
    x_label: String,
    y_label: String,
}

impl TryFrom<RawPair> for ConceptPair {
    type Error = EvalError;

    fn try_from(raw: RawPair) -> Result<Self, EvalError> {
        Self::new(raw.x_label, raw.y_label)
    }
}

impl ConceptPair {
    pub fn new(x_label: impl Into<String>, y_label: impl Into<String>) -> Result<Self, EvalError> {
        let (x, y) = (x_label.into(), y_label.into());
        if x.trim().is_empty() || y.trim().is_empty() {
            return Err(EvalError::InvalidPair("labels must be non-empty".into()));
        }
        if x == y {
            return Err(EvalError::InvalidPair(format!("labels must differ, both are '{x}'")));
        }
        Ok(Self { x_label: x, y_label: y })
    }

    pub fn x_label(&self) -> &str {
        &self.x_label
    }

    pub fn y_label(&self) -> &str {
        &self.y_label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfusionPrompt {
    pub primary_label: String,
    pub secondary_label: String,
    pub prompt_text: String,
    pub direction: Direction,
}

/// Substitute `{X}` and `{Y}` in one left-to-right pass, so slot markers
/// inside the labels themselves are left alone.
pub fn fill_template(template: &str, x: &str, y: &str) -> Result<String, EvalError> {
    check_template(template)?;
    let mut out = String::with_capacity(template.len() + x.len() + y.len());
    let mut rest = template;
    while let Some(pos) = rest.find('{') {
        out.push_str(&rest[..pos]);
        let tail = &rest[pos..];
        if let Some(t) = tail.strip_prefix("{X}") {
            out.push_str(x);
            rest = t;
        } else if let Some(t) = tail.strip_prefix("{Y}") {
            out.push_str(y);
            rest = t;
        } else {
            out.push('{');
            rest = &tail[1..];
        }
    }
    out.push_str(rest);
    Ok(out)
}

fn check_template(template: &str) -> Result<(), EvalError> {
    for slot in ["{X}", "{Y}"] {
        if !template.contains(slot) {
            return Err(EvalError::BadTemplate(format!("template '{template}' lacks the {slot} slot")));
        }
    }
    Ok(())
}

/// Both directions of every pair: forward (X primary) then reverse, pair by
/// pair.
pub fn expand_prompts(pairs: &[ConceptPair], template: &str) -> Result<Vec<InfusionPrompt>, EvalError> {
    check_template(template)?;
    let mut out = Vec::with_capacity(2 * pairs.len());
    for p in pairs {
        for (dir, a, b) in [(Direction::Forward, &p.x_label, &p.y_label), (Direction::Reverse, &p.y_label, &p.x_label)] {
            out.push(InfusionPrompt {
                primary_label: a.clone(),
                secondary_label: b.clone(),
                prompt_text: fill_template(template, a, b)?,
                direction: dir,
            });
        }
    }
    Ok(out)
}

/// Read concept pairs from JSON-lines (`{"x_label": .., "y_label": ..}`).
pub fn read_concept_pairs(path: &Path) -> Result<Vec<ConceptPair>, EvalError> {
    read_jsonl(path)
}
