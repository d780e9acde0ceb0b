//! Textual protocol language: lexing, parsing, resolution and rendering.

mod diagnostic;
mod lexer;
mod parser;
mod render;

pub use diagnostic::{
    Diagnostic, Severity, Span, BAD_PARAM, DUPLICATE_DOMAIN, EMPTY_GROUP, NON_NEIGHBOR_REF, RANGE_ERROR, SYNTAX,
    UNKNOWN_DOMAIN,
};
pub use parser::{parse_protocol, ParseOptions, Parsed};
pub use render::render;
