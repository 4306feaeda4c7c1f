//! Stability conditions on the derived category of P^1, modelled through the
//! Kronecker quiver, and on the 2-Calabi-Yau category of local P^1.
//!
//! Everything that decides a phase, a class or a fiber is exact: charges
//! have Gaussian rational entries and phases are compared without floats.

pub mod calabi_yau;
pub mod error;
pub mod exact;
pub mod grammar;
pub mod lattice;
pub mod objects;
pub mod oracle;
pub mod stability;
pub mod ztilde;

pub use error::{Error, Result};
pub use exact::{Gauss, Q};
pub use grammar::{format_object, parse_object, parse_point};
pub use lattice::{euler_a, euler_cy, numerical_class, Charge, KClassA, KClassCY};
pub use objects::{cy_class, class_of, hom_dim, HomTable, Indec, KroneckerHom, ObjectExpr, ProjPoint};
pub use stability::{hn, regime, HnFiltration, Phase, Regime};
pub use ztilde::{ztilde, PointSet, SpherePoint, UniverseBounds};
