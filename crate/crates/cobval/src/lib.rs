//! cobval: differential validation of COBOL-to-X translations.
//!
//! The pipeline parses a COBOL paragraph, lowers it to a primitive IR,
//! generates one unit test per bounded execution path with symbolic
//! execution and a bounded constraint solver, executes the tests against an
//! in-process oracle that mocks every resource call, aligns COBOL resource
//! calls with the translated program's call sequences, and finally drives
//! the translation through a language-neutral adapter protocol, comparing
//! outputs assertion by assertion.
//!
//! See the book under `book/` for a guided tour, and `docs/grammar.md` for
//! the accepted COBOL subset.

pub mod emitter;
pub mod frontend;
pub mod harness;
pub mod solver;
pub mod mapper;
pub mod runner;
pub mod testgen;
pub mod ir;
pub mod value;

pub use frontend::{list_io_variables, parse_program};
pub use ir::lower;
