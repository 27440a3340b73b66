//! Line-addressed code artifact with full edit history.
//!
//! Agents never rewrite whole files while debugging; they emit `EDIT`
//! commands that replace an inclusive 1-based line range. This module owns
//! the mutable code value ([`CodeFile`]), the replacement command
//! ([`EditCommand`]), the append-only history ([`EditLog`]) and the
//! turn/line statistics derived from it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EditError {
    #[error("edit range {start}..{end} out of bounds for file of {len} lines")]
    RangeOutOfBounds { start: u64, end: u64, len: u64 },
    #[error("invalid edit command: {0}")]
    InvalidCommand(String),
}

/// A single line-range replacement: replace lines `start_line..=end_line`
/// (1-based, inclusive) with `replacement`. An empty replacement deletes
/// the range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCommand {
    start_line: u64,
    end_line: u64,
    replacement: Vec<String>,
}

impl EditCommand {
    pub fn new(
        start_line: u64,
        end_line: u64,
        replacement: Vec<String>,
    ) -> Result<Self, EditError> {
        if start_line < 1 {
            return Err(EditError::InvalidCommand(
                "start line must be >= 1".into(),
            ));
        }
        if end_line < start_line {
            return Err(EditError::InvalidCommand(format!(
                "start {start_line} > end {end_line}"
            )));
        }
        if let Some(bad) = replacement
            .iter()
            .find(|l| l.contains('\n') || l.contains('\r'))
        {
            return Err(EditError::InvalidCommand(format!(
                "replacement line contains a line break: {bad:?}"
            )));
        }
        Ok(Self {
            start_line,
            end_line,
            replacement,
        })
    }

    pub fn start_line(&self) -> u64 {
        self.start_line
    }

    pub fn end_line(&self) -> u64 {
        self.end_line
    }

    pub fn replacement(&self) -> &[String] {
        &self.replacement
    }

    /// Lines deleted by this command (the addressed span).
    pub fn deleted_span(&self) -> u64 {
        self.end_line - self.start_line + 1
    }

    /// Lines inserted by this command.
    pub fn inserted_span(&self) -> u64 {
        self.replacement.len() as u64
    }
}

/// The code artifact under reproduction: an ordered list of lines plus a
/// version counter that advances on every applied edit or full rewrite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub name: String,
    pub lines: Vec<String>,
    pub version: u64,
}

impl CodeFile {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            lines: Vec::new(),
            version: 0,
        }
    }

    /// Split `text` into lines. A single trailing newline is not counted as
    /// an extra empty line; interior blank lines are preserved.
    pub fn from_text(name: impl Into<String>, text: &str) -> Self {
        let body = text.strip_suffix('\n').unwrap_or(text);
        let lines = if body.is_empty() {
            Vec::new()
        } else {
            body.split('\n').map(|l| l.trim_end_matches('\r').to_string()).collect()
        };
        Self {
            name: name.into(),
            lines,
            version: 0,
        }
    }

    /// Joined text with a trailing newline (empty files render empty).
    pub fn text(&self) -> String {
        if self.lines.is_empty() {
            String::new()
        } else {
            let mut s = self.lines.join("\n");
            s.push('\n');
            s
        }
    }

    pub fn line_count(&self) -> u64 {
        self.lines.len() as u64
    }

    /// Replace the whole content, bumping the version. Full rewrites (initial
    /// generation, final refactor) go through here and leave no edit-log entry.
    pub fn rewrite(&self, text: &str) -> CodeFile {
        let mut next = CodeFile::from_text(self.name.clone(), text);
        next.version = self.version + 1;
        next
    }

    /// Apply one `EDIT` command, returning the edited copy. The original is
    /// untouched; the version advances by one.
    pub fn apply_edit(&self, cmd: &EditCommand) -> Result<CodeFile, EditError> {
        let len = self.line_count();
        if cmd.start_line < 1 || cmd.end_line > len {
            return Err(EditError::RangeOutOfBounds {
                start: cmd.start_line,
                end: cmd.end_line,
                len,
            });
        }
        let start = (cmd.start_line - 1) as usize;
        let end = cmd.end_line as usize; // exclusive
        let mut lines = self.lines.clone();
        lines.splice(start..end, cmd.replacement.iter().cloned());
        Ok(CodeFile {
            name: self.name.clone(),
            lines,
            version: self.version + 1,
        })
    }

    /// The command that undoes `cmd` once it has been applied to this file:
    /// replace the range the replacement now occupies with the original
    /// segment. Degenerate when the replacement is empty (there is no range
    /// to address), in which case the inverse re-inserts at the anchor line.
    pub fn inverse_of(&self, cmd: &EditCommand) -> Result<EditCommand, EditError> {
        let len = self.line_count();
        if cmd.start_line < 1 || cmd.end_line > len {
            return Err(EditError::RangeOutOfBounds {
                start: cmd.start_line,
                end: cmd.end_line,
                len,
            });
        }
        let original: Vec<String> = self.lines
            [(cmd.start_line - 1) as usize..cmd.end_line as usize]
            .to_vec();
        let inserted = cmd.inserted_span();
        if inserted == 0 {
            // Deletion: insertion is expressed as replacing an anchor line
            // with itself plus the removed segment. The anchor is the first
            // surviving line after the range, or the last surviving line
            // when the tail was deleted.
            let after_len = len - cmd.deleted_span();
            if after_len == 0 {
                // Whole file deleted; inverse is a rewrite-style insert which
                // EDIT cannot address. Callers handle this case by rewriting.
                return Err(EditError::InvalidCommand(
                    "cannot invert a deletion that emptied the file".into(),
                ));
            }
            if cmd.start_line <= after_len {
                let mut repl = original;
                repl.push(self.lines[cmd.end_line as usize].clone());
                return EditCommand::new(cmd.start_line, cmd.start_line, repl);
            }
            let anchor = after_len;
            let mut repl = vec![self.lines[(anchor - 1) as usize].clone()];
            repl.extend(original);
            return EditCommand::new(anchor, anchor, repl);
        }
        EditCommand::new(
            cmd.start_line,
            cmd.start_line + inserted - 1,
            original,
        )
    }
}

/// Render the file as the numbered view shown to agents: each line prefixed
/// with its right-aligned 1-based number and ` | `. Width equals the digit
/// count of the last line number.
pub fn render_numbered(file: &CodeFile) -> String {
    if file.lines.is_empty() {
        return String::new();
    }
    let width = file.lines.len().to_string().len();
    file.lines
        .iter()
        .enumerate()
        .map(|(i, line)| format!("{:>width$} | {}", i + 1, line))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Which development subphase issued an edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditPhase {
    Data,
    Method,
    Experiment,
}

impl std::fmt::Display for EditPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EditPhase::Data => write!(f, "data"),
            EditPhase::Method => write!(f, "method"),
            EditPhase::Experiment => write!(f, "experiment"),
        }
    }
}

/// Whether an edit repaired a failing run or refined alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    Debug,
    Refine,
}

impl std::fmt::Display for EditKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EditKind::Debug => write!(f, "debug"),
            EditKind::Refine => write!(f, "refine"),
        }
    }
}

/// One applied edit. `lines_changed` counts a replacement once:
/// max(deleted span, inserted span). The raw command is kept so the totals
/// can be recomputed under other conventions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditLogEntry {
    pub phase: EditPhase,
    pub kind: EditKind,
    pub command: EditCommand,
    pub lines_changed: u64,
}

/// Append-only history of applied edits, one entry per `EDIT` turn.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditLog {
    entries: Vec<EditLogEntry>,
}

impl EditLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, phase: EditPhase, kind: EditKind, command: &EditCommand) -> &EditLogEntry {
        let lines_changed = command.deleted_span().max(command.inserted_span());
        self.entries.push(EditLogEntry {
            phase,
            kind,
            command: command.clone(),
            lines_changed,
        });
        self.entries.last().expect("just pushed")
    }

    pub fn entries(&self) -> &[EditLogEntry] {
        &self.entries
    }

    pub fn extend_from(&mut self, other: &EditLog) {
        self.entries.extend(other.entries.iter().cloned());
    }

    pub fn push_entry(&mut self, entry: EditLogEntry) {
        self.entries.push(entry);
    }
}

/// Turn and line averages over one (phase, kind) slice of the log:
/// `avg_turns` = matching turns / runs, `avg_lines_per_turn` = edited lines /
/// matching turns (0 when there are no matching turns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EditStats {
    pub avg_turns: f64,
    pub avg_lines_per_turn: f64,
    pub total_turns: u64,
    pub total_lines: u64,
}

pub fn edit_stats(log: &EditLog, n_runs: u64, phase: EditPhase, kind: EditKind) -> EditStats {
    let matching: Vec<&EditLogEntry> = log
        .entries
        .iter()
        .filter(|e| e.phase == phase && e.kind == kind)
        .collect();
    let total_turns = matching.len() as u64;
    let total_lines: u64 = matching.iter().map(|e| e.lines_changed).sum();
    let avg_turns = if n_runs == 0 {
        0.0
    } else {
        total_turns as f64 / n_runs as f64
    };
    let avg_lines_per_turn = if total_turns == 0 {
        0.0
    } else {
        total_lines as f64 / total_turns as f64
    };
    EditStats {
        avg_turns,
        avg_lines_per_turn,
        total_turns,
        total_lines,
    }
}
