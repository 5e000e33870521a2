//! Multipixel linear measurements: pixel layouts, detection modes, the two
//! variance routes, squeezing plans and the two-zone eigenbasis.

mod layout;
mod mode;
mod multi;
mod two_zone;
mod variance;

pub use layout::{LayoutPrimitive, PixelLayout};
pub use mode::{
    detection_mode, detection_mode_with_tol, pixel_integrals, DetectionMode, DEGENERATE_F_TOL,
    DIFFERENCE_TOL,
};
pub use multi::{multi_measurement_plan, MultiMeasurementPlan};
pub use two_zone::{
    two_zone_decomposition, two_zone_variance_decomposition, TwoZoneDecomposition, TWO_ZONE_TOL,
};
pub use variance::{
    detection_frame, dual_path_check, overlap_coefficients, variance_direct,
    variance_via_detection_mode, DetectionFrame, DualPathCheck, MeasurementReport, ReportSummary,
    DUAL_PATH_TOL, LINEARIZATION_MIN_N0,
};
