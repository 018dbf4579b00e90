pub mod banded;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod signed_log;
pub mod tridiag;

pub use banded::{Banded, BandedLu};
pub use ode::{integrate_nodes, OdeOptions, OdeSolution};
pub use signed_log::{log_add_exp, log_sub_exp, ln_expm1, SignedLog};
