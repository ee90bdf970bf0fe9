//! Answering list and superlative web queries with relational tables.
//!
//! The pipeline tags a query with the entity type it seeks ([`dict_tagger`]
//! or [`neural`]), extracts candidate tables from the top search results
//! ([`table`]), scores each pair ([`features`], [`select`]) and renders a
//! snippet of the winner ([`snippet`]). [`eval`] holds the metrics.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choices.

pub mod dict_tagger;
pub mod error;
pub mod eval;
pub mod features;
pub mod lexicon;
pub mod neural;
pub mod query;
pub mod scalar;
pub mod select;
pub mod snippet;
pub mod table;
pub mod text;
pub mod training_data;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type TaggerModelF64 = neural::TaggerModel<f64>;
pub type TaggerModelF32 = neural::TaggerModel<f32>;
pub type SelectorModelF64 = select::SelectorModel<f64>;
pub type SelectorModelF32 = select::SelectorModel<f32>;
pub type FeatureVectorF64 = features::FeatureVector<f64>;
pub type FeatureVectorF32 = features::FeatureVector<f32>;
