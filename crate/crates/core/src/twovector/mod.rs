//! Two-vector objects of the quasi-euclidean space: the mixed metric tensor of the scalar
//! product, its frames, the covariant pair `T1`, `T2` with its inversion, and the
//! parallelogram sum and difference.

mod covector;
mod frame;
mod parallelogram;
mod tensor;

pub use covector::{
    co_angle_map, co_scalar_product, covector_pair, covectors_by_contraction, invert_covectors,
    product_relations, products_closed_form, solve_co_angle, CoAngle, CoProducts, CovectorPair,
};
pub use frame::{frame, frame_contractions, reconstruct, unrolled_frame, FrameContractions};
pub use parallelogram::{
    convenient_residuals, defining_residuals, difference_vector, difference_vector_identities,
    ominus_first_order, oplus_first_order, parallelogram_refine, sum_correction, RefinedSum,
};
pub use tensor::{
    coincidence_limits, two_vector_metric, CoincidenceReport, CoincidenceRow,
    TwoVectorTensor,
};
