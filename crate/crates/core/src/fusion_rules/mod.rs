//! Fusion rules: discrete PCR5 and p-PCR5, continuous p-PCR5 by quadrature
//! and by sampling, Bayesian product fusion and mean fusion.

pub mod density;
pub mod discrete;
pub mod sampling;

pub use density::{
    bayes_fuse_gaussian, grid_bayes_fuse, grid_pcr5_fuse, trapezoid, Gaussian1D, GridDensity1D,
    Pcr5GridFusion,
};
pub use discrete::{
    conjunctive_combine, discrete_p_pcr5, discrete_pcr5, Conjunctive, DiscreteBBA,
    DiscreteProbability, FiniteFrame, Subset,
};
pub use sampling::{
    mean_fuse_select, mean_fuse_select_index, pcr5_sample_batch, pcr5_select, weighted_select,
    weighted_select_index, DensitySource, EvaluatedSample, MAX_REDRAWS,
};
