//! Exact combinatorics of ribbon graphs and the cell decomposition of the
//! moduli space of curves with boundary.

pub mod canon;
pub mod chain;
pub mod enriched;
pub mod enumerate;
pub mod error;
pub mod forms;
pub mod json;
pub mod linalg;
pub mod metric;
pub mod ops;
pub mod ribbon;
pub mod scalar;
pub mod volume;

pub use canon::{canonical_code, canonical_enriched, canonical_form, isomorphic, CanonicalCode};
pub use chain::{boundary_chain, verify_witten_cycle, witten_chain, OrientedCellChain, WittenCertificate};
pub use enriched::{EnrichedRibbonGraph, InvisibleVertex, NodeEnd};
pub use enumerate::{enumerate_graphs, orbifold_euler_characteristic, witten_cells, EnumerationParams};
pub use error::{Result, RibbonError};
pub use forms::{check_omega_b, orientation_sign, CellForm, EtaNormalization};
pub use metric::{MetricRibbonGraph, Systole};
pub use ribbon::{Markings, RibbonGraph, ValenceProfile};
pub use scalar::ExactField;
pub use volume::{kontsevich_volume, VolumeReport};

/// Arbitrary-precision rationals, the default scalar.
pub type Rational = num_rational::BigRational;
/// Metric graph over [`Rational`].
pub type MetricGraph = MetricRibbonGraph<Rational>;
