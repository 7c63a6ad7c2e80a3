//! Block *-algebras `ℓ(X)`, star maps of partial functions, fissions and
//! their correspondence with relations.

mod block;
mod fission;
mod homomorphism;
mod spectral;
mod star;

pub use block::{generators, BlockOperator, Generator};
pub use fission::{fission_compose, fission_from_function, fission_tensor, function_from_fission, Fission, FissionEntry};
pub use homomorphism::{function_from_homomorphism, Homomorphism};
pub use spectral::{spectral_function, Spectrum};
pub use star::{
    is_unital, star_injective, star_is_homomorphism, star_map, star_map_unchecked, star_surjective,
    unitality_residual, HomomorphismReport,
};
