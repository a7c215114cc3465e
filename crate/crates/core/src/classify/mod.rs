//! Distance-to-template features, dimensionality reduction and the linear
//! classifier, plus the end-to-end train/predict pipeline.

pub mod features;
pub mod pca;
pub mod pipeline;
pub mod svm;

pub use features::{featurize, featurize_all, Standardizer};
pub use pca::{fit_pca, PcaModel};
pub use pipeline::{
    predict, train_pipeline, ConfusionMatrix, PipelineConfig, PipelineModel, Prediction, TrainedPipeline,
};
pub use svm::{fit_svm, SvmConfig, SvmFit, SvmModel};
