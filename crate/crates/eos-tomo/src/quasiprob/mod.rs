//! Transformed quasiprobability distributions, count lattices and the
//! closed-form moment oracle.

pub mod lattice;
pub mod moments;
pub mod qpd;

pub use lattice::{count_lattice, CountLattice, LatticeAxis, LatticeExtent, LatticeMoments};
pub use moments::{predicted_moments, ChannelMoments, MomentPrediction, PHASE_X, PHASE_Y};
pub use qpd::{qpd, GaussianQpd};
