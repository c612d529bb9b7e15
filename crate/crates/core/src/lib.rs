//! Cross-lingual intermediate-task tooling for dialogue models.
//!
//! * [`corpus`]: line-aligned parallel corpora, ordered extraction, window sampling
//! * [`maskgen`]: TAPT / MonoDM / TLM / XDM / RM example generation
//! * [`dstmetrics`]: dialogue state tracking metrics
//! * [`toymlm`]: a tiny tied-embedding masked-word model and alignment probe
//! * [`records`]: line-delimited JSON wire formats
//! * [`cli`]: the `xlift` command-line front end

pub mod cli;
pub mod config;
pub mod corpus;
pub mod dstmetrics;
pub mod maskgen;
pub mod records;
pub mod toymlm;
