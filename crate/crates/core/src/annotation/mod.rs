//! Feature-based BIO sequence tagging: featurization, averaged-perceptron
//! training, constrained greedy decoding, and corpus annotation with
//! chunking.

mod annotate;
mod features;
mod perceptron;

pub use annotate::annotate_corpus;
pub use features::{featurize, FEATURE_TEMPLATE_VERSION};
pub use perceptron::{decode, train_tagger, TaggerModel, TrainingMeta};
