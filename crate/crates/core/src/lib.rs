//! Exact truncated q-series arithmetic for 6-colored generalized Frobenius
//! partitions, with a checker that re-verifies the theta-function identities
//! and Ramanujan-type congruences for `cphi_6(n)` coefficient by coefficient.

pub mod cache;
pub mod error;
pub mod frobenius;
pub mod products;
pub mod ring;
pub mod series;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use products::{eta_quotient, jacobi_cube, pochhammer, ProductSpec};
pub use ring::CoefficientRing;
pub use series::Series;
pub use theta::{theta_alt, theta_sum, Construction, SignedPower, ThetaKind};
