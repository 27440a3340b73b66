//! Markdown paper ingestion: heading-based segmentation, bibliography
//! extraction, and code-hosting link discovery.
//!
//! Input is pre-extracted markdown (a PDF extractor runs upstream; see
//! [`crate::config`] for the external-extractor hook). Parsing is pure and
//! lossless: display math and tables stay verbatim inside section bodies,
//! and every input line lands in exactly one section.

use std::collections::HashSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("input is empty")]
    EmptyInput,
    #[error("no headings found; pass wrap_headingless to treat the text as one section")]
    NoHeadings,
    #[error("no reference section matching {pattern:?}")]
    NoReferenceSection { pattern: String },
    #[error("invalid reference-heading pattern: {0}")]
    BadHeadingPattern(String),
}

/// One heading-delimited slice of the paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub heading: String,
    pub depth: u32,
    pub body: String,
}

/// One bibliography entry, ordinals 1-based and contiguous.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reference {
    pub ordinal: u32,
    pub citation_text: String,
    pub parsed_title: Option<String>,
    pub external_id: Option<String>,
}

/// A code-hosting repository link.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepoUrl {
    pub host: String,
    pub owner: String,
    pub repo_name: String,
    /// Canonical form `https://<host>/<owner>/<repo>`; parses back into the
    /// other three fields.
    pub raw: String,
}

/// Structured parse of a paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperDocument {
    pub title: String,
    pub sections: Vec<Section>,
    pub references: Vec<Reference>,
    pub raw_text: String,
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Treat a heading-free document as a single untitled section instead of
    /// failing with `NoHeadings`.
    pub wrap_headingless: bool,
    /// Case-insensitive regex matched against whole heading text to locate
    /// the bibliography.
    pub reference_heading: String,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            wrap_headingless: false,
            reference_heading: "references".to_string(),
        }
    }
}

static ATX_HEADING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(#{1,6})\s+(.*?)\s*$").expect("valid regex"));
static SETEXT_EQ: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^=+\s*$").expect("valid regex"));
static SETEXT_DASH: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^-{2,}\s*$").expect("valid regex"));

/// Parse with default options.
pub fn parse_paper(markdown: &str) -> Result<PaperDocument, IngestError> {
    parse_paper_opts(markdown, &ParseOptions::default())
}

pub fn parse_paper_opts(
    markdown: &str,
    opts: &ParseOptions,
) -> Result<PaperDocument, IngestError> {
    if markdown.trim().is_empty() {
        return Err(IngestError::EmptyInput);
    }
    let normalized = normalize_setext(markdown);
    let lines: Vec<&str> = normalized.lines().collect();

    let mut sections: Vec<Section> = Vec::new();
    let mut current: Option<(String, u32, Vec<&str>)> = None;
    let mut preamble: Vec<&str> = Vec::new();
    let mut in_code_fence = false;
    let mut in_math_fence = false;

    for line in &lines {
        let trimmed = line.trim_start();
        if trimmed.starts_with("```") || trimmed.starts_with("~~~") {
            in_code_fence = !in_code_fence;
        } else if trimmed == "$$" {
            in_math_fence = !in_math_fence;
        }
        let heading = if in_code_fence || in_math_fence {
            None
        } else {
            ATX_HEADING.captures(line)
        };
        match heading {
            Some(cap) => {
                flush_section(&mut sections, &mut current, &mut preamble);
                let depth = cap.get(1).expect("group").as_str().len() as u32;
                let text = cap.get(2).expect("group").as_str().to_string();
                current = Some((text, depth, Vec::new()));
            }
            None => match current.as_mut() {
                Some((_, _, body)) => body.push(line),
                None => preamble.push(line),
            },
        }
    }
    flush_section(&mut sections, &mut current, &mut preamble);

    let has_heading = sections.iter().any(|s| !s.heading.is_empty());
    if !has_heading {
        if !opts.wrap_headingless {
            return Err(IngestError::NoHeadings);
        }
        let doc = PaperDocument {
            title: String::new(),
            sections: vec![Section {
                heading: String::new(),
                depth: 1,
                body: normalized.clone(),
            }],
            references: Vec::new(),
            raw_text: normalized,
        };
        return Ok(doc);
    }

    let title = sections
        .iter()
        .filter(|s| !s.heading.is_empty())
        .min_by_key(|s| s.depth)
        .map(|s| s.heading.clone())
        .unwrap_or_default();

    let mut doc = PaperDocument {
        title,
        sections,
        references: Vec::new(),
        raw_text: normalized,
    };
    if let Ok(refs) = extract_references_opts(&doc, opts) {
        doc.references = refs;
    }
    Ok(doc)
}

fn flush_section(
    sections: &mut Vec<Section>,
    current: &mut Option<(String, u32, Vec<&str>)>,
    preamble: &mut Vec<&str>,
) {
    if !preamble.is_empty() {
        sections.push(Section {
            heading: String::new(),
            depth: 1,
            body: preamble.join("\n"),
        });
        preamble.clear();
    }
    if let Some((heading, depth, body)) = current.take() {
        sections.push(Section {
            heading,
            depth,
            body: body.join("\n"),
        });
    }
}

/// Rewrite setext headings (`Title\n====`) into the hash form so the rest of
/// the pipeline sees one canonical heading syntax.
fn normalize_setext(markdown: &str) -> String {
    let lines: Vec<&str> = markdown.lines().collect();
    let mut out: Vec<String> = Vec::with_capacity(lines.len());
    let mut in_fence = false;
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        let trimmed = line.trim_start();
        if trimmed.starts_with("```") || trimmed.starts_with("~~~") {
            in_fence = !in_fence;
            out.push(line.to_string());
            i += 1;
            continue;
        }
        if !in_fence && i + 1 < lines.len() {
            let next = lines[i + 1];
            let candidate = !line.trim().is_empty()
                && !line.trim_start().starts_with('#')
                && !line.contains('|');
            if candidate && SETEXT_EQ.is_match(next) {
                out.push(format!("# {}", line.trim()));
                i += 2;
                continue;
            }
            if candidate && SETEXT_DASH.is_match(next) {
                out.push(format!("## {}", line.trim()));
                i += 2;
                continue;
            }
        }
        out.push(line.to_string());
        i += 1;
    }
    out.join("\n")
}

/// Locate the bibliography section and split it into entries.
pub fn extract_references(doc: &PaperDocument) -> Result<Vec<Reference>, IngestError> {
    extract_references_opts(doc, &ParseOptions::default())
}

pub fn extract_references_opts(
    doc: &PaperDocument,
    opts: &ParseOptions,
) -> Result<Vec<Reference>, IngestError> {
    let pattern = regex::RegexBuilder::new(&format!("^(?:{})$", opts.reference_heading))
        .case_insensitive(true)
        .build()
        .map_err(|e| IngestError::BadHeadingPattern(e.to_string()))?;
    let section = doc
        .sections
        .iter()
        .find(|s| pattern.is_match(s.heading.trim()))
        .ok_or_else(|| IngestError::NoReferenceSection {
            pattern: opts.reference_heading.clone(),
        })?;
    let entries = segment_entries(&section.body);
    Ok(entries
        .into_iter()
        .enumerate()
        .map(|(i, text)| {
            let parsed_title = guess_title(&text);
            let external_id = find_preprint_id(&text);
            Reference {
                ordinal: (i + 1) as u32,
                citation_text: text,
                parsed_title,
                external_id,
            }
        })
        .collect())
}

static BRACKET_MARKER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*\[(\d+)\]\s*").expect("valid regex"));
static NUMBER_MARKER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(\d+)[.)]\s+").expect("valid regex"));

/// Split a bibliography body into entry strings. Entries start at bracketed
/// (`[n]`) or numbered (`n.`) markers when at least two such markers exist;
/// otherwise blank lines separate entries. Wrapped lines are joined with a
/// single space.
fn segment_entries(body: &str) -> Vec<String> {
    let lines: Vec<&str> = body.lines().collect();
    let bracket_count = lines.iter().filter(|l| BRACKET_MARKER.is_match(l)).count();
    let number_count = lines.iter().filter(|l| NUMBER_MARKER.is_match(l)).count();

    let marker: Option<&Regex> = if bracket_count >= 2 {
        Some(&BRACKET_MARKER)
    } else if number_count >= 2 {
        Some(&NUMBER_MARKER)
    } else {
        None
    };

    let mut entries: Vec<Vec<&str>> = Vec::new();
    match marker {
        Some(re) => {
            let mut current: Vec<&str> = Vec::new();
            for line in lines {
                if line.trim().is_empty() {
                    continue;
                }
                if re.is_match(line) {
                    if !current.is_empty() {
                        entries.push(std::mem::take(&mut current));
                    }
                }
                if !entries.is_empty() || re.is_match(line) || current.is_empty() {
                    current.push(line);
                } else {
                    current.push(line);
                }
            }
            if !current.is_empty() {
                entries.push(current);
            }
        }
        None => {
            let mut current: Vec<&str> = Vec::new();
            for line in lines {
                if line.trim().is_empty() {
                    if !current.is_empty() {
                        entries.push(std::mem::take(&mut current));
                    }
                } else {
                    current.push(line);
                }
            }
            if !current.is_empty() {
                entries.push(current);
            }
        }
    }

    entries
        .into_iter()
        .map(|ls| {
            ls.iter()
                .map(|l| l.trim())
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .filter(|e| !e.is_empty())
        .collect()
}

/// Heuristic title: the chunk after the author list, i.e. the second
/// sentence-like segment of the entry once the leading marker is stripped.
fn guess_title(entry: &str) -> Option<String> {
    let stripped = BRACKET_MARKER.replace(entry, "");
    let stripped = NUMBER_MARKER.replace(&stripped, "");
    let parts: Vec<&str> = stripped.split(". ").collect();
    if parts.len() < 2 {
        return None;
    }
    let title = parts[1].trim().trim_end_matches('.').trim();
    if title.is_empty() {
        None
    } else {
        Some(title.to_string())
    }
}

static PREPRINT_ID: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?:arXiv[:\s]|abs/)(\d{4}\.\d{4,5})(?:v\d+)?").expect("valid regex")
});

fn find_preprint_id(entry: &str) -> Option<String> {
    PREPRINT_ID
        .captures(entry)
        .map(|c| c.get(1).expect("group").as_str().to_string())
}

const CODE_HOSTS: &[&str] = &[
    "github.com",
    "gitlab.com",
    "bitbucket.org",
    "codeberg.org",
    "gitee.com",
];

static URL_TOKEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"https?://[^\s<>"'()\[\]{}]+"#).expect("valid regex"));

/// Every syntactically valid code-hosting URL in `text`, deduplicated by
/// (host, owner, repo), in first-occurrence order. `raw` is the canonical
/// `https://host/owner/repo` form.
pub fn extract_repo_links(text: &str) -> Vec<RepoUrl> {
    let mut seen: HashSet<(String, String, String)> = HashSet::new();
    let mut out = Vec::new();
    for m in URL_TOKEN.find_iter(text) {
        let token = m.as_str().trim_end_matches(['.', ',', ';', ':', '!', '?']);
        let Ok(url) = url::Url::parse(token) else {
            continue;
        };
        let Some(host) = url.host_str() else { continue };
        let host = host.strip_prefix("www.").unwrap_or(host).to_ascii_lowercase();
        if !CODE_HOSTS.contains(&host.as_str()) {
            continue;
        }
        let segs: Vec<&str> = url
            .path_segments()
            .map(|s| s.filter(|p| !p.is_empty()).collect())
            .unwrap_or_default();
        if segs.len() < 2 {
            continue;
        }
        let owner = segs[0].to_string();
        let repo = segs[1].trim_end_matches(".git").to_string();
        if owner.is_empty() || repo.is_empty() {
            continue;
        }
        let key = (host.clone(), owner.clone(), repo.clone());
        if seen.insert(key) {
            let raw = format!("https://{host}/{owner}/{repo}");
            out.push(RepoUrl {
                host,
                owner,
                repo_name: repo,
                raw,
            });
        }
    }
    out
}

/// Parse one canonical repo URL back into its parts. Used to check the
/// `raw`-round-trip invariant and to accept user-supplied URLs.
pub fn parse_repo_url(raw: &str) -> Option<RepoUrl> {
    extract_repo_links(raw).into_iter().next()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_segmentation() {
        let doc = parse_paper("# T\n## A\nx\n## B\ny").unwrap();
        assert_eq!(doc.title, "T");
        let deep: Vec<&Section> = doc.sections.iter().filter(|s| s.depth == 2).collect();
        assert_eq!(deep.len(), 2);
        assert_eq!(deep[0].body, "x");
        assert_eq!(deep[1].body, "y");
    }

    #[test]
    fn empty_input_rejected() {
        assert_eq!(parse_paper(""), Err(IngestError::EmptyInput));
        assert_eq!(parse_paper("  \n \n"), Err(IngestError::EmptyInput));
    }

    #[test]
    fn headingless_needs_flag() {
        assert_eq!(parse_paper("just prose\nmore"), Err(IngestError::NoHeadings));
        let opts = ParseOptions {
            wrap_headingless: true,
            ..Default::default()
        };
        let doc = parse_paper_opts("just prose\nmore", &opts).unwrap();
        assert_eq!(doc.sections.len(), 1);
        assert_eq!(doc.sections[0].body, "just prose\nmore");
    }

    #[test]
    fn setext_headings_normalized() {
        let doc = parse_paper("Title\n=====\nbody\nSub\n-----\nmore").unwrap();
        assert_eq!(doc.title, "Title");
        assert_eq!(doc.sections[0].depth, 1);
        assert_eq!(doc.sections[1].heading, "Sub");
        assert_eq!(doc.sections[1].depth, 2);
    }

    #[test]
    fn fences_and_math_stay_verbatim() {
        let md = "# T\n## M\n$$\n# not a heading\nE = mc^2\n$$\n```\n# nor this\n```\ndone";
        let doc = parse_paper(md).unwrap();
        let m = &doc.sections[1];
        assert!(m.body.contains("# not a heading"));
        assert!(m.body.contains("# nor this"));
        assert!(m.body.contains("E = mc^2"));
        assert_eq!(doc.sections.len(), 2);
    }

    #[test]
    fn references_numbered_entries() {
        let md = "# T\n## References\n[1] A Author. First paper. 2020.\n[2] B Author. Second paper. 2021.\n[3] C Author. Third paper. 2022.";
        let doc = parse_paper(md).unwrap();
        let refs = extract_references(&doc).unwrap();
        assert_eq!(refs.len(), 3);
        assert_eq!(
            refs.iter().map(|r| r.ordinal).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        assert_eq!(refs[1].parsed_title.as_deref(), Some("Second paper"));
    }

    #[test]
    fn missing_reference_section() {
        let doc = parse_paper("# T\n## Body\ntext").unwrap();
        assert!(matches!(
            extract_references(&doc),
            Err(IngestError::NoReferenceSection { .. })
        ));
    }

    #[test]
    fn wrapped_entries_joined() {
        let md = "# T\n## References\n[1] A Author. A very long\ntitle wrapped over lines. 2020.\n[2] B Author. Short. 2021.";
        let doc = parse_paper(md).unwrap();
        let refs = extract_references(&doc).unwrap();
        assert_eq!(refs.len(), 2);
        assert_eq!(
            refs[0].citation_text,
            "[1] A Author. A very long title wrapped over lines. 2020."
        );
    }

    #[test]
    fn blank_line_fallback_segmentation() {
        let md = "# T\n## References\nAuthor A. Paper one. 2020.\n\nAuthor B. Paper two. 2021.";
        let doc = parse_paper(md).unwrap();
        let refs = extract_references(&doc).unwrap();
        assert_eq!(refs.len(), 2);
    }

    #[test]
    fn preprint_ids_extracted() {
        let md = "# T\n## References\n[1] A. One. arXiv:2105.01601, 2021.\n[2] B. Two. https://arxiv.org/abs/1706.03762.";
        let doc = parse_paper(md).unwrap();
        let refs = extract_references(&doc).unwrap();
        assert_eq!(refs[0].external_id.as_deref(), Some("2105.01601"));
        assert_eq!(refs[1].external_id.as_deref(), Some("1706.03762"));
    }

    #[test]
    fn repo_links_basic() {
        let links = extract_repo_links("see https://github.com/a/b for code");
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].owner, "a");
        assert_eq!(links[0].repo_name, "b");
        assert_eq!(links[0].raw, "https://github.com/a/b");
    }

    #[test]
    fn repo_links_none() {
        assert!(extract_repo_links("no urls here").is_empty());
    }

    #[test]
    fn repo_links_dedup_and_other_hosts() {
        let text = "x https://github.com/a/b y https://github.com/a/b/tree/main z https://gitlab.com/c/d.git";
        let links = extract_repo_links(text);
        assert_eq!(links.len(), 2);
        assert_eq!(links[0].raw, "https://github.com/a/b");
        assert_eq!(links[1].raw, "https://gitlab.com/c/d");
    }

    #[test]
    fn repo_links_ignore_non_hosting() {
        assert!(extract_repo_links("https://example.com/a/b").is_empty());
    }

    #[test]
    fn repo_link_raw_round_trips() {
        let links = extract_repo_links("https://github.com/Owner/Repo");
        let again = parse_repo_url(&links[0].raw).unwrap();
        assert_eq!(again.host, links[0].host);
        assert_eq!(again.owner, links[0].owner);
        assert_eq!(again.repo_name, links[0].repo_name);
    }

    #[test]
    fn repo_links_idempotent_on_own_output() {
        let text = "https://github.com/a/b plus https://gitlab.com/c/d";
        let first = extract_repo_links(text);
        let joined: String = first.iter().map(|r| r.raw.clone()).collect::<Vec<_>>().join(" ");
        let second = extract_repo_links(&joined);
        assert_eq!(first, second);
    }

    #[test]
    fn round_trip_preserves_non_blank_lines() {
        let md = "# T\npre\n## A\nx\n\ny\n## B\nz";
        let doc = parse_paper(md).unwrap();
        let mut reconstructed: Vec<String> = Vec::new();
        for s in &doc.sections {
            if !s.heading.is_empty() {
                reconstructed.push(format!("{} {}", "#".repeat(s.depth as usize), s.heading));
            }
            for l in s.body.lines() {
                reconstructed.push(l.to_string());
            }
        }
        let mut got: Vec<&str> = reconstructed
            .iter()
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .collect();
        let mut want: Vec<&str> = md.lines().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
        got.sort_unstable();
        want.sort_unstable();
        assert_eq!(got, want);
    }
}
