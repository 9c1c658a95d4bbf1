//! A line-oriented text format for finite categories, topologies, functors,
//! indexed categories, presheaves, sites and check requests.
//!
//! ```text
//! category ARR {
//!   objects: a, b
//!   arrow f: a -> b
//! }
//! topology J on ARR {
//!   trivial
//! }
//! check topology J
//! ```

pub mod ast;
mod checks;
mod lexer;
mod parser;
mod resolve;
mod serialize;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::fincat::{FinCategory, FinFunctor, GrothendieckFibration, IndexedCategory, NatTransform};
use crate::presheaf::FinPresheaf;
use crate::report::CheckReport;
use crate::sites::{GrothendieckTopology, SitedFunctor};

pub use ast::{Block, CheckDecl, Decl};
pub use checks::{run_check, CheckKind, CheckOutcome};
pub use lexer::is_bare_ident;
pub use serialize::{
    category_block, check_block, functor_block, presheaf_block, quote, serialize, serialize_blocks, site_block,
    topology_block,
};

/// 1-based line/column range, end exclusive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl Span {
    pub fn new(start: (usize, usize), end: (usize, usize)) -> Self {
        Span { line: start.0, col: start.1, end_line: end.0, end_col: end.1 }
    }

    pub fn to(self, other: Span) -> Span {
        Span { end_line: other.end_line, end_col: other.end_col, ..self }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiagnosticKind {
    SyntaxError,
    UnresolvedReference,
    SemanticError,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::SyntaxError => "syntax error",
            DiagnosticKind::UnresolvedReference => "unresolved reference",
            DiagnosticKind::SemanticError => "semantic error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{span}: {kind}: {message}")]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn syntax(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { kind: DiagnosticKind::SyntaxError, span, message: message.into() }
    }

    pub fn unresolved(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { kind: DiagnosticKind::UnresolvedReference, span, message: message.into() }
    }

    pub fn semantic(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { kind: DiagnosticKind::SemanticError, span, message: message.into() }
    }
}

/// Every diagnostic of a rejected document, in source order.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct Diagnostics(pub Vec<Diagnostic>);

/// A parsed document: its declarations and the models they resolve to.
#[derive(Clone, Debug, Default)]
pub struct Document {
    pub blocks: Vec<Block>,
    pub categories: BTreeMap<String, Arc<FinCategory>>,
    pub topologies: BTreeMap<String, Arc<GrothendieckTopology>>,
    pub functors: BTreeMap<String, FinFunctor>,
    pub indexed: BTreeMap<String, IndexedCategory>,
    /// Grothendieck constructions, keyed by indexed-category name.
    pub fibrations: BTreeMap<String, GrothendieckFibration>,
    pub presheaves: BTreeMap<String, Arc<FinPresheaf>>,
    pub transforms: BTreeMap<String, NatTransform>,
    pub sites: BTreeMap<String, SitedFunctor>,
}

impl Document {
    pub fn checks(&self) -> impl Iterator<Item = (&CheckDecl, Span)> + '_ {
        self.blocks.iter().filter_map(|b| match &b.decl {
            Decl::Check(c) => Some((c, b.span)),
            _ => None,
        })
    }

    /// The declaration span of `name` among blocks of `keyword`.
    pub fn span_of(&self, keyword: &str, name: &str) -> Option<Span> {
        self.blocks
            .iter()
            .find(|b| b.decl.keyword() == keyword && b.decl.name().node == name)
            .map(|b| b.span)
    }
}

/// Parses and resolves `text`, collecting every diagnostic.
pub fn parse(text: &str) -> Result<Document, Diagnostics> {
    let (tokens, mut diags) = lexer::lex(text);
    let mut p = parser::Parser::new(tokens);
    let blocks = p.document();
    diags.append(&mut p.diags);
    let doc = resolve::resolve(blocks, &mut diags);
    if diags.is_empty() {
        Ok(doc)
    } else {
        diags.sort_by_key(|d| d.span);
        Err(Diagnostics(diags))
    }
}

/// Axiom and law checks for every declaration, each with its source span.
///
/// Categories, functors, presheaves and transformations are checked on
/// resolution; topologies are stored verbatim and checked here.
pub fn validate(doc: &Document) -> Vec<(Span, CheckReport)> {
    let mut out = Vec::new();
    for b in &doc.blocks {
        let name = &b.decl.name().node;
        let report = match &b.decl {
            Decl::Category(_) => doc.categories.get(name).map(|c| {
                CheckReport::pass("category", format!("{}: {} objects, {} arrows", name, c.object_count(), c.arrow_count()))
            }),
            Decl::Topology(_) => doc.topologies.get(name).map(|t| {
                let r = t.is_topology();
                CheckReport { check: format!("topology {name}"), ..r }
            }),
            Decl::Functor(_) => doc.functors.get(name).map(|_| CheckReport::pass("functor", format!("{name} is a functor"))),
            Decl::Indexed(_) => {
                doc.indexed.get(name).map(|_| CheckReport::pass("indexed category", format!("{name} is strict")))
            }
            Decl::Presheaf(_) => {
                doc.presheaves.get(name).map(|_| CheckReport::pass("presheaf", format!("{name} is functorial")))
            }
            Decl::Transform(_) => {
                doc.transforms.get(name).map(|_| CheckReport::pass("transformation", format!("{name} is natural")))
            }
            Decl::Site(_) => doc.sites.get(name).map(|_| CheckReport::pass("site", format!("{name} is well-typed"))),
            Decl::Check(_) => None,
        };
        if let Some(r) = report {
            out.push((b.span, r));
        }
    }
    out
}
