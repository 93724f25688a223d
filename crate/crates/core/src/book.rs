//! Runs the guide's code blocks as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub struct Introduction;

#[doc = include_str!("../../../book/src/precision.md")]
pub struct Precision;

#[doc = include_str!("../../../book/src/polynomials.md")]
pub struct Polynomials;

#[doc = include_str!("../../../book/src/measures.md")]
pub struct Measures;

#[doc = include_str!("../../../book/src/torus.md")]
pub struct Torus;

#[doc = include_str!("../../../book/src/curves.md")]
pub struct Curves;

#[doc = include_str!("../../../book/src/lvalues.md")]
pub struct Lvalues;

#[doc = include_str!("../../../book/src/relations.md")]
pub struct Relations;

#[doc = include_str!("../../../book/src/cli.md")]
pub struct Cli;
