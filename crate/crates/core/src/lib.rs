//! Characteristic-front solver library.
//!
//! The crate builds up, layer by layer, the machinery needed to follow a
//! gravitational-pulse spacetime from characteristic data up to its curvature
//! blow-up locus:
//!
//! * [`goursat`] — characteristic initial-value solvers on a rectangle,
//!   including a degenerate (`eta = 0`) variant and an a-priori sup bound;
//! * [`riemann`] — forward fundamental solutions (Riemann kernels) for linear
//!   characteristic systems and representation formulas built from them;
//! * [`pulse`] — pulse profiles, the front energy, and the singularity
//!   geometry (`digamma`, `gamma`, `sigma`) they generate;
//! * [`iface`] — the interface field system `(f, h, F', H')`, metric
//!   reconstruction, and the conformal-factor potential `omega`;
//! * [`curvature`] — boundary-layer extractions and the Kretschmann blow-up
//!   diagnostics;
//! * [`cli`] — configuration, report types, and the command entry points
//!   behind the `charfront` binary.

pub mod curvature;
pub mod cli;
pub mod fitting;
pub mod goursat;
pub mod grid;
pub mod iface;
pub mod pulse;
pub mod quad;
pub mod riemann;
pub mod validate;
