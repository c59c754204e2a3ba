//! Controlled invariant sets for monotone discrete-time systems.
//!
//! Sets that are closed downward (or upward) under an orthant order are
//! stored by their extremal points. Synthesis combines open-loop
//! feasibility certificates, which grow a known invariant `F1`, with
//! leads-to-unsafe certificates, which grow an excluded set `F2`, and
//! subdivides the working box until the two are within a chosen precision.
//!
//! ```
//! use monocis_core::{dynamics::switched2d, verify_invariant, LowerSet};
//!
//! let sys = switched2d();
//! let x = LowerSet::from_points(sys.space().clone(), [[60.0, 60.0]]).unwrap();
//! let k = LowerSet::from_points(sys.space().clone(), [[50.0, 25.0], [25.0, 50.0], [36.0, 31.0]]).unwrap();
//! assert!(verify_invariant(&sys, &x, &k).unwrap().is_invariant);
//! ```

pub mod dynamics;
pub mod error;
pub mod feasibility;
pub mod invariance;
pub mod io;
pub mod oracle;
pub mod order;
pub mod reach;
mod serde_ext;

pub use dynamics::config::{parse_config, parse_system, Problem, Settings};
pub use dynamics::{validate_monotonicity, Dynamics, Input, MonoClass, MonotoneSystem};
pub use error::{Error, Result};
pub use feasibility::{
    check_certificate, check_unsafe_certificate, extract_slacks, feasibility_radius, leads_to_unsafe,
    open_loop_feasible, FeasibilityCertificate, SearchOptions, UnsafeCertificate, Verdict,
};
pub use invariance::{
    check_containment_lemma, extract_controller, synthesize, verify_invariant, verify_invariant_par, Controller,
    InvariantResult, Outcome, SynthOptions, VerifyReport,
};
pub use oracle::{compare, excess, grid_fixed_point, Comparison, GridStats};
pub use order::{AxisBox, Antichain, LowerSet, Orientation, OrderedSpace, Point, UpperSet};
pub use reach::{propagate, reach_tube, simulate_closed_loop, ConstantPolicy, Policy, ReachLayer};
