//! Workbench for the semiclassical Dirichlet-to-Neumann parametrix and for
//! complex transmission eigenvalues of radially symmetric disks.
//!
//! The crate has two halves. [`exactarith`] and [`parametrix`] run the
//! boundary-layer eikonal and transport recursions in exact arithmetic and
//! check their structural identities. [`specialfn`], [`radialode`],
//! [`rootfinder`] and [`harness`] compute transmission eigenvalues of disks
//! and drive the eigenvalue-free-region and counting experiments.

pub mod exactarith;
pub mod harness;
pub mod parametrix;
pub mod radialode;
pub mod rootfinder;
pub mod specialfn;

pub use exactarith::{GaussianRational, Generator, SymbolExpr};
pub use harness::{CountingResult, RegionScanResult, StripReport, Summary};
pub use parametrix::{EikonalTable, ParametrixTables, TransportTable};
pub use radialode::{BoundaryData, ContactFamily, RadialProfile};
pub use rootfinder::{DiskProblem, EigenvalueRecord, SearchBox, Spectrum};
