//! Text formats: `.sc` complexes and the three certificate files.
//!
//! A `.sc` file lists one facet per line as whitespace-separated vertex
//! labels; lines starting with `#` are comments. Certificate files resolve
//! labels against the complex (or graph) they certify.
//!
//! ```text
//! # shelling of <fingerprint>        # saturation of <fingerprint>
//! a b c                              # pattern: K3
//! b c d                              # start: a b, a c, b d
//!                                    b c : a b c
//! # collapse of <fingerprint>        c d : b c d
//! # removed: a b d, c d e
//! b c -> a b c
//! # target:
//! a
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::certificates::{ChainReport, Stage, StageStatus};
use crate::collapse::{CollapseCertificate, CollapseStep};
use crate::complex::{Complex, ComplexError, Face};
use crate::shelling::ShellingCertificate;
use crate::wsat::{Edge, Graph, SaturationCertificate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; 0 when the problem concerns the file as a whole.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("invalid vertex label `{0}`")]
    InvalidLabel(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    err(line, ParseErrorKind::Syntax(msg.into()))
}

pub fn is_valid_label(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '{' | '}' | '|' | '.' | '-'))
}

/// A parsed complex plus the 1-based lines whose faces were absorbed by
/// larger (or repeated) faces.
#[derive(Clone, Debug)]
pub struct ParsedComplex {
    pub complex: Complex,
    pub absorbed_lines: Vec<usize>,
}

pub fn parse_sc(text: &str) -> Result<ParsedComplex, ParseError> {
    let mut rows: Vec<Vec<&str>> = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if let Some(bad) = tokens.iter().find(|t| !is_valid_label(t)) {
            return Err(err(i + 1, ParseErrorKind::InvalidLabel(bad.to_string())));
        }
        rows.push(tokens);
        lines.push(i + 1);
    }
    // re-run face by face on failure so the diagnostic names a line
    match Complex::from_facets_reporting(rows.iter().map(|r| r.iter())) {
        Ok((complex, absorbed)) => Ok(ParsedComplex {
            complex,
            absorbed_lines: absorbed.into_iter().map(|i| lines[i]).collect(),
        }),
        Err(ComplexError::Empty) => Err(err(0, ComplexError::Empty.into())),
        Err(e) => {
            for (row, &line) in rows.iter().zip(&lines) {
                if let Err(face_err) = Complex::from_facets([row.iter()]) {
                    return Err(err(line, face_err.into()));
                }
            }
            Err(err(0, e.into()))
        }
    }
}

/// Facets sorted lexicographically by vertex id, one per line.
pub fn write_sc(k: &Complex) -> String {
    let mut out = String::new();
    for f in k.facets() {
        out.push_str(&k.render(f));
        out.push('\n');
    }
    out
}

/// Kind of a certificate file, read from its first line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    Shelling,
    Saturation,
    Collapse,
}

impl CertificateKind {
    pub fn name(&self) -> &'static str {
        match self {
            CertificateKind::Shelling => "shelling",
            CertificateKind::Saturation => "saturation",
            CertificateKind::Collapse => "collapse",
        }
    }
}

pub fn certificate_kind(text: &str) -> Option<CertificateKind> {
    let first = text.lines().find(|l| !l.trim().is_empty())?.trim();
    if first.starts_with("# shelling of") {
        Some(CertificateKind::Shelling)
    } else if first.starts_with("# saturation of") {
        Some(CertificateKind::Saturation)
    } else if first.starts_with("# collapse of") {
        Some(CertificateKind::Collapse)
    } else {
        None
    }
}

fn resolve(
    k_labels: &crate::complex::Labels,
    tokens: &[&str],
    line: usize,
) -> Result<Face, ParseError> {
    k_labels.face(tokens).map_err(|e| match e {
        ComplexError::NotAFace(label) => err(line, ParseErrorKind::UnknownVertex(label)),
        other => err(line, other.into()),
    })
}

fn resolve_edge(g: &Graph, tokens: &[&str], line: usize) -> Result<Edge, ParseError> {
    if tokens.len() != 2 {
        return Err(syntax(
            line,
            format!("expected an edge, found `{}`", tokens.join(" ")),
        ));
    }
    let f = resolve(g.labels(), tokens, line)?;
    Ok(Edge::new(f.vertices()[0], f.vertices()[1]).expect("distinct after resolve"))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn write_shelling(k: &Complex, cert: &ShellingCertificate) -> String {
    let mut out = format!("# shelling of {}\n", k.fingerprint());
    for f in &cert.order {
        out.push_str(&k.render(f));
        out.push('\n');
    }
    out
}

pub fn parse_shelling(k: &Complex, text: &str) -> Result<ShellingCertificate, ParseError> {
    let mut order = Vec::new();
    for (line, l) in content_lines(text) {
        if l.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = l.split_whitespace().collect();
        order.push(resolve(k.labels(), &tokens, line)?);
    }
    Ok(ShellingCertificate { order })
}

fn comma_list(g: &crate::complex::Labels, faces: impl Iterator<Item = Face>) -> String {
    faces.map(|f| g.render(&f)).collect::<Vec<_>>().join(", ")
}

pub fn write_saturation(host: &Graph, cert: &SaturationCertificate) -> String {
    let labels = cert.start.labels();
    let mut out = format!(
        "# saturation of {}\n# pattern: K3\n",
        host.to_complex().fingerprint()
    );
    let _ = writeln!(
        out,
        "# start: {}",
        comma_list(labels, cert.start.edges().iter().map(Edge::face))
    );
    for (e, j) in cert.order.iter().zip(&cert.witnesses) {
        let _ = writeln!(
            out,
            "{} : {}",
            labels.render(&e.face()),
            labels.render_slice(j)
        );
    }
    out
}

pub fn parse_saturation(host: &Graph, text: &str) -> Result<SaturationCertificate, ParseError> {
    let mut start = None;
    let mut order = Vec::new();
    let mut witnesses = Vec::new();
    for (line, l) in content_lines(text) {
        if let Some(rest) = l.strip_prefix("# pattern:") {
            if rest.trim() != "K3" {
                return Err(syntax(
                    line,
                    format!("unsupported pattern `{}`", rest.trim()),
                ));
            }
        } else if let Some(rest) = l.strip_prefix("# start:") {
            let mut edges = Vec::new();
            for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let tokens: Vec<&str> = part.split_whitespace().collect();
                edges.push(resolve_edge(host, &tokens, line)?);
            }
            start = Some(edges);
        } else if l.starts_with('#') {
            continue;
        } else {
            let (edge, witness) = l
                .split_once(':')
                .ok_or_else(|| syntax(line, "expected `u v : x y z`"))?;
            let tokens: Vec<&str> = edge.split_whitespace().collect();
            order.push(resolve_edge(host, &tokens, line)?);
            let tokens: Vec<&str> = witness.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(syntax(line, "a witness names three vertices"));
            }
            let j = resolve(host.labels(), &tokens, line)?;
            witnesses.push([j.vertices()[0], j.vertices()[1], j.vertices()[2]]);
        }
    }
    let start = start.ok_or_else(|| syntax(0, "missing `# start:` line"))?;
    let start = host
        .with_edges(start)
        .map_err(|e| syntax(0, e.to_string()))?;
    Ok(SaturationCertificate {
        start,
        order,
        witnesses,
    })
}

pub fn write_collapse(k: &Complex, cert: &CollapseCertificate) -> String {
    let labels = k.labels();
    let mut out = format!("# collapse of {}\n", k.fingerprint());
    let removed = comma_list(labels, cert.removed_triangles.iter().cloned());
    let _ = writeln!(
        out,
        "# removed:{}{removed}",
        if removed.is_empty() { "" } else { " " }
    );
    for s in &cert.steps {
        let _ = writeln!(
            out,
            "{} -> {}",
            labels.render(&s.free_face),
            labels.render(&s.facet)
        );
    }
    out.push_str("# target:\n");
    out.push_str(&write_sc(&cert.target));
    out
}

pub fn parse_collapse(k: &Complex, text: &str) -> Result<CollapseCertificate, ParseError> {
    let mut removed = None;
    let mut steps = Vec::new();
    let mut target: Option<Vec<Face>> = None;
    for (line, l) in content_lines(text) {
        if let Some(rest) = l.strip_prefix("# removed:") {
            let mut faces = Vec::new();
            for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let tokens: Vec<&str> = part.split_whitespace().collect();
                faces.push(resolve(k.labels(), &tokens, line)?);
            }
            removed = Some(faces);
        } else if l.starts_with("# target:") {
            target = Some(Vec::new());
        } else if l.starts_with('#') {
            continue;
        } else if let Some(t) = target.as_mut() {
            let tokens: Vec<&str> = l.split_whitespace().collect();
            t.push(resolve(k.labels(), &tokens, line)?);
        } else {
            let (free, facet) = l
                .split_once("->")
                .ok_or_else(|| syntax(line, "expected `free face -> facet`"))?;
            let free: Vec<&str> = free.split_whitespace().collect();
            let facet: Vec<&str> = facet.split_whitespace().collect();
            steps.push(CollapseStep::new(
                resolve(k.labels(), &free, line)?,
                resolve(k.labels(), &facet, line)?,
            ));
        }
    }
    let removed_triangles = removed.ok_or_else(|| syntax(0, "missing `# removed:` line"))?;
    let target = target.ok_or_else(|| syntax(0, "missing `# target:` section"))?;
    let target = Complex::from_faces(target, k.labels().clone()).map_err(|e| err(0, e.into()))?;
    Ok(CollapseCertificate {
        removed_triangles,
        steps,
        target,
    })
}

impl StageStatus {
    pub fn label(&self) -> &'static str {
        match self {
            StageStatus::Passed => "passed",
            StageStatus::Refuted(_) => "refuted",
            StageStatus::Failed(_) => "failed",
            StageStatus::Skipped => "skipped",
        }
    }

    pub fn detail(&self) -> Option<&str> {
        match self {
            StageStatus::Refuted(d) | StageStatus::Failed(d) => Some(d),
            _ => None,
        }
    }
}

/// Text report: a summary block, then one `== stage ==` section per stage
/// with its certificate in the matching file format.
pub fn write_report(report: &ChainReport) -> String {
    let l = &report.subject;
    let mut out = String::new();
    let _ = writeln!(out, "input: {}", report.input_fingerprint);
    let _ = writeln!(out, "subdivisions: {}", report.subdivisions);
    let _ = writeln!(out, "subject: {}", l.fingerprint());
    let _ = writeln!(out, "f-vector: {}", l.f_vector());
    let _ = writeln!(out, "reduced euler characteristic: {}", report.chi);
    match report.removed_count {
        Some(n) => {
            let _ = writeln!(out, "removed count: {n}");
        }
        None => out.push_str("removed count: none\n"),
    }
    for stage in &report.stages {
        let _ = writeln!(out, "\n== {} ==", stage.stage.name());
        let _ = write!(out, "status: {}", stage.status.label());
        if let Some(d) = stage.status.detail() {
            let _ = write!(out, " ({d})");
        }
        out.push('\n');
        let body = match stage.stage {
            Stage::Shelling => report.shelling.as_ref().map(|c| write_shelling(l, c)),
            Stage::Saturation => report
                .saturation
                .as_ref()
                .map(|c| write_saturation(&Graph::one_skeleton(l), c)),
            Stage::Collapse => report.collapse.as_ref().map(|c| write_collapse(l, c)),
            Stage::RemovalCount => None,
        };
        if let Some(body) = body {
            out.push_str(&body);
        }
    }
    out
}
