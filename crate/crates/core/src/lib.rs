//! Science maps from Wikipedia citations of journal articles.
//!
//! The crate covers the whole chain: parsing the mention export and the journal source
//! list, linking mentions to journals, deduplication and filtering, co-citation networks
//! at journal and specialty level, Pathfinder scaling, centrality, communities,
//! descriptive tables, and the file formats the maps are drawn from.

pub mod catalog;
pub mod ingest;
pub mod cocite;
pub mod corpus;
pub mod netalgo;
pub mod stats;
pub mod export;
pub mod pipeline;
