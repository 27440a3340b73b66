//! End-to-end reproduction of paper experiments with LLM agents.
//!
//! The pipeline runs three stages: a literature review that condenses the
//! target paper into a working summary, a lineage pass that mines the most
//! relevant cited works (and their repositories) for implicit domain
//! knowledge, and a code-development loop in which a code agent and a
//! research agent iteratively write, debug, and refine a single experiment
//! file until it runs and matches the summary. A judge-model harness scores
//! the result for alignment and execution fidelity.
//!
//! Modules map one-to-one onto the pipeline:
//!
//! - [`ingest`] — markdown paper parsing, reference and repo-link extraction
//! - [`gateway`] — provider-agnostic chat client with record/replay transcripts
//! - [`review`] — the three-part paper summary and its revisions
//! - [`lineage`] — reference ranking, paper/repo fetching, knowledge packs
//! - [`edit`] — the line-addressed code artifact and its edit history
//! - [`exec`] — sandboxed execution of candidate code
//! - [`devloop`] — the data / method / experiment / refactor state machine
//! - [`eval`] — align scores, execution rate, and the performance gap
//! - [`config`] — task configuration and CLI plumbing

pub mod config;
pub mod devloop;
pub mod edit;
pub mod eval;
pub mod exec;
pub mod gateway;
pub mod ingest;
pub mod lineage;
pub mod review;
pub mod template;
pub mod workspace;

pub use edit::{CodeFile, EditCommand, EditKind, EditLog, EditPhase, EditStats};
pub use gateway::{AgentRole, Completion, Gateway, Message, RoleName, Transcript, TranscriptMode};
pub use review::{Instructions, PaperSummary};
