//! The from-scratch learning stack: fingerprints, scaling, PCA, K-means and
//! elbow selection, tSNE, tree ensembles, metrics, splits, persistence, and
//! the end-to-end pipelines the CLI drives.

pub mod ensemble;
pub mod fingerprint;
pub mod kmeans;
pub mod metrics;
pub mod model_io;
pub mod pca;
pub mod pipeline;
pub mod split;
pub mod tree;
pub mod tsne;

pub use ensemble::{adaboost_fit, extra_trees_fit, AdaBoostConfig, ExtraTreesConfig, TreeEnsemble};
pub use fingerprint::{
    build_fingerprints, feature_names, BeamEncoding, FingerprintConfig, FingerprintSet,
    ScalingKind, ScalingModel,
};
pub use kmeans::{elbow_select, kmeans_assign, kmeans_fit, ElbowResult, KMeansConfig, KMeansModel};
pub use metrics::{cluster_purity, confusion_matrix, misclassification_rate};
pub use pca::{pca_fit, pca_transform, PcaModel};
pub use split::stratified_split_by_ue;
pub use tsne::{tsne_embed, TsneConfig, TsneEmbedding};
