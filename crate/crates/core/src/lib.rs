//! Optimal correlated equilibria (NFCCE, EFCCE, EFCE) in extensive-form games.

pub mod game;
pub mod zoo;
pub mod dag;
pub mod triggers;
pub mod lp;
pub mod vsf;
pub mod solvers;
