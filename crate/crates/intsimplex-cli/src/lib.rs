//! Library half of the command-line tool: file formats and table
//! rendering, split out so integration tests can parse what the binary
//! prints and build fixture files without duplicating the encoding.

pub mod formats;
