//! Two point lattices from one quartic potential: the poles of rational
//! Painlevé-II solutions (zeros of the Vorob'ev–Yablonskii polynomials) and
//! the degenerate-spectrum locus of the quartic anharmonic oscillator (zeros
//! of the spectral discriminant), together with the exact-WKB machinery that
//! ties the two together.
//!
//! The crate is organised around the pipeline:
//!
//! * [`exact`] — exact big-rational polynomial arithmetic: the VY recursion,
//!   the banded characteristic polynomial, the discriminant by
//!   evaluation–interpolation, and the Airy antiderivative polynomials.
//! * [`roots`] — Aberth–Ehrlich simultaneous root finding at arbitrary
//!   precision, with Newton polishing and simplicity certification.
//! * [`spectra`] — lattice points with attached spectral data: Laurent
//!   coefficients and Λ on the Painlevé side, double eigenvalues and
//!   eigen-polynomials on the oscillator side.
//! * [`elliptic`] — periods of √Q, 1/√Q and the first WKB correction on the
//!   elliptic curve w² = z⁴ + sz² + 2z + E, plus the region boundary.
//! * [`quantize`] — the two quantization conditions, integer extraction and
//!   residuals.
//! * [`quasipoly`] — wedge-contour integrals of quasi-polynomials: degenerate
//!   orthogonality, the squared-integral vanishing test and the Fekete
//!   equilibrium of eigen-polynomial roots.
//! * [`lattice`] — scaled point clouds, local discrepancy scaling laws and
//!   the hexagonal neighbour prediction.
//! * [`cache`] — on-disk polynomial cache shared by the CLI and the tests.

pub mod cache;
pub mod elliptic;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod num;
pub mod quantize;
pub mod quasipoly;
pub mod roots;
pub mod spectra;

pub use error::{Error, Result};
pub use exact::ExactPoly;
