//! Rectangle covers, protocol trees, fooling sets and fortification for
//! two-party relations, with exact checks of direct-sum bounds on products.

pub mod bits;
pub mod corpus;
pub mod cover;
pub mod direct_sum;
pub mod error;
pub mod fooling;
pub mod fortify;
pub mod measure;
pub mod problem;
pub mod protocol;
pub mod rects;

pub use cover::{cover_measure, cover_number, verify_cover, CoverMeasure, CoverResult, CoverViolation};
pub use direct_sum::{
    check_thm41, check_thm43, direct_sum_report, explore_conjectures, hardcore, phi, BoundRow, DirectSumReport,
    ExploreRow, Value,
};
pub use error::{Error, Result};
pub use fooling::{
    cov_lower_bound, is_delta_fooling, min_fooling_delta, search_fooling, CertificateJson, FoolingCertificate, Frac,
    Strategy,
};
pub use fortify::{
    certify_fortified, fortify, fortify_cover, inverse_fortify, is_fortified, weak_fortify, CoverFortification,
    FortificationResult,
};
pub use measure::{check_measure, entropy_measure, Cardinality, EntropyMeasure, FnMeasure, MeasureOracle, MeasureReport};
pub use problem::{CellSet, CellSetJson, ColoredCover, ColoredRect, Problem, ProductShape, Rect};
pub use protocol::{
    comm_depth, protocol_size, solve_protocol, verify_protocol, Owner, ProtocolSolver, ProtocolTree, ProtocolViolation,
};
pub use rects::{enumerate_maximal, MonoRectIndex};
