//! Histogram gradient-boosted trees with a softmax objective.

mod binning;
mod eval;
mod model;
mod table;
mod tree;

pub use binning::BinMapper;
pub use eval::{
    cross_validate, evaluate, permutation_importance, stratified_folds, stratified_split, CvResult, EvalReport,
};
pub use model::{softmax_loss_and_gradient, train, GbdtModel, TrainConfig, MODEL_FORMAT_VERSION, N_CLASSES};
pub use table::{FeatureRow, FeatureTable};
pub use tree::{Tree, TreeNode};
