//! Keller-Segel chemotaxis with logistic growth: linear stability and local
//! bifurcation analytics on intervals and rectangles, and a finite-difference
//! simulator of the time-dependent system.

pub mod bifurcation;
pub mod eigenbasis;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod solver;

pub use bifurcation::{BifurcationPoint, Linearization, MomentSolution};
pub use eigenbasis::{Domain, Mode, ModeMoments};
pub use grid::Grid;
pub use model::{Kinetics, ModelParams, Sensitivity};
