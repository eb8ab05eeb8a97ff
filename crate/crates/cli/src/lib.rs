//! Library side of the command-line front end: the end-to-end verification
//! suite shared by the `verify-all` subcommand and the acceptance tests.

pub mod acceptance;
