//! Template-based classification of multivariate time series with dynamic
//! time warping.
//!
//! The pipeline clusters the training series of each activity by complete
//! linkage on a DTW distance matrix, averages each cluster into a template,
//! describes every series by its distances to all templates, and classifies
//! those features with PCA followed by a linear SVM.
//!
//! ```
//! use dtwhar::{dtw_distance, TimeSeries};
//!
//! let a = TimeSeries::univariate(vec![0.0, 1.0, 2.0, 1.0]).unwrap();
//! let b = TimeSeries::univariate(vec![0.0, 0.0, 1.0, 2.0]).unwrap();
//! assert_eq!(dtw_distance(&a, &b, 3).unwrap(), 1.0);
//! ```

pub mod classify;
pub mod cli;
pub mod cluster;
pub mod dtw;
pub mod error;
pub mod flat;
pub mod series;
pub mod synth;
pub mod template;
pub mod uci;

pub use classify::{predict, train_pipeline, PipelineConfig, PipelineModel, Prediction, TrainedPipeline};
pub use cluster::{complete_linkage_cluster, pairwise_distances, ClusterSet, PairwiseDistances, Partition};
pub use dtw::{align, distance, dtw_distance, dtw_path, dtwsubseq_distance, DistanceKind, DtwParams, WarpingPath};
pub use error::{Error, Result};
pub use flat::{remove_flat_curves, FlatCurveReport};
pub use series::{Dataset, Label, LabeledSeries, TimeSeries};
pub use synth::{generate_dataset, generate_sample, SynthConfig};
pub use template::{dba_template, dpa_template, AveragingMethod, Template};
pub use uci::{load_uci_layout, save_uci_layout, UciFiles};
