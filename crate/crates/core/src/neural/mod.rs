//! BiLSTM entity-type tagger over word embeddings and character trigrams.

pub mod char_encoder;
pub mod crf;
pub mod decode;
pub mod embedding;
pub mod gradcheck;
pub mod io;
pub mod lstm;
pub mod matrix;
pub mod model;
pub mod train;

pub use decode::{decode, decode_probs, predict_tagged_query, DecodedSpan};
pub use embedding::EmbeddingTable;
pub use gradcheck::{gradient_check, GradCheckReport};
pub use io::{format_sequences, load_sequences, parse_sequences, save_sequences, SequenceRecord};
pub use model::{Dims, Head, Tag, TagSet, TaggerModel, TaggerParams, TokenScoreMatrix};
pub use train::{mean_token_loss, token_accuracy, train, LabeledSequence, TrainedTagger, TrainingConfig};
