//! Numerical building blocks shared by the physics modules.

pub mod interp;
pub mod linalg;
pub mod ode;
pub mod rng;
pub mod roots;
pub mod stats;
