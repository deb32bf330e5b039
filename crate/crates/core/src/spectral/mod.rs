//! Fourier representation of periodic vector fields, differential operators,
//! Leray projection and dealiased products.

pub mod field;
pub mod lattice;
pub mod ops;
pub mod product;
pub mod random;
pub mod snapshot;
pub mod transform;

pub use field::{LatticeRef, PhysicalField, ScalarField, SpectralField};
pub use lattice::{Band, FrequencyLattice};
pub use ops::{curl, divergence, gradient, laplacian, leray_project, project_solenoidal, LerayParts};
pub use product::{pointwise_product, product_on_band, ProductKind, ProductOutput};
pub use random::{random_field, random_field_nested};
pub use transform::{from_physical, to_physical, transform_roundtrip, RoundTrip};
