//! Single-pass placeholder substitution for prompt templates.
//!
//! Placeholders are written `{NAME}` where NAME may contain letters, digits,
//! spaces and underscores. Substitution is a single left-to-right pass:
//! substituted values are never rescanned, so code being spliced into a
//! prompt cannot expand further placeholders. Unknown placeholders are left
//! intact so shipped templates stay editable.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;

static PLACEHOLDER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\{([A-Za-z][A-Za-z0-9 _]*)\}").expect("valid regex"));

/// Fill `template` from `values`, keyed by placeholder name.
pub fn fill(template: &str, values: &BTreeMap<&str, &str>) -> String {
    let mut out = String::with_capacity(template.len());
    let mut last = 0;
    for cap in PLACEHOLDER.captures_iter(template) {
        let whole = cap.get(0).expect("match");
        let name = cap.get(1).expect("group").as_str();
        out.push_str(&template[last..whole.start()]);
        match values.get(name) {
            Some(v) => out.push_str(v),
            None => out.push_str(whole.as_str()),
        }
        last = whole.end();
    }
    out.push_str(&template[last..]);
    out
}

/// Convenience for the common few-placeholder case.
pub fn fill_pairs(template: &str, pairs: &[(&str, &str)]) -> String {
    fill(template, &pairs.iter().copied().collect())
}
