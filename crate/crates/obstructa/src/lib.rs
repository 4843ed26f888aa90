//! Obstruction-theory calculator for immersion and embedding problems of real
//! projective spaces.
//!
//! The pipeline has four computational layers:
//!
//! * [`dyadic`]: exact binary arithmetic, meaning digit sums, 2-adic valuations,
//!   binomial parity (Lucas) and binomial valuation (Kummer);
//! * [`cohomology`]: the mod-2 cohomology of `P^N`, Steenrod-square
//!   evaluation and Stiefel–Whitney classes of multiples of the Hopf bundle;
//! * [`ext_a1`]: Ext over the subalgebra `A(1)` of the Steenrod algebra via
//!   minimal free resolutions, Adams-chart extraction, and the 2-exponents
//!   `nu(|ko_{4i-1}(P_m)|)` of connective real K-homology of stunted
//!   projective spectra;
//! * [`mpt`]: a modified-Postnikov-tower engine, where k-invariant relation tables
//!   are parsed from fixture files, action-map variations are evaluated on
//!   `H^*(P^N)`, and the resulting F2 variation matrices drive indeterminacy
//!   and forced-vanishing arguments.
//!
//! [`lifting`] combines the first and third layers into the bo-lifting
//! decision procedure, and [`derivations`] chains everything into replayable
//! records that reproduce the nonimmersion and embedding theorems at concrete
//! parameter values.  [`cli`] exposes every operation on the command line.

pub mod cli;
pub mod cohomology;
pub mod derivations;
pub mod dyadic;
pub mod ext_a1;
pub mod f2;
pub mod fixtures;
pub mod lifting;
pub mod mpt;
pub mod render;
pub mod steenrod;
