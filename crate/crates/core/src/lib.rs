//! Link-level model of a RIS-assisted full-duplex two-way space shift keying
//! system with imperfect CSI and residual loop interference.
//!
//! The crate holds two independent descriptions of the same link: a Monte
//! Carlo simulator of the physical model ([`channel`], [`link`],
//! [`montecarlo`]) and the closed-form performance chain ([`analytic`]),
//! both built on the numerical kernels in [`specfun`].

pub mod analytic;
pub mod channel;
pub mod error;
pub mod link;
pub mod montecarlo;
pub mod params;
pub mod specfun;

pub use analytic::{
    abep, abep_scaled, outage_asymptotic, outage_closed, pep_asymptotic, pep_exact, pep_gcq, pep_upper,
    throughput_closed, AbepScaling, CombinedChannelStats, Degenerate, Flagged, PepBreakdown, PepConvention,
    PepInputs, PepMethod,
};
pub use channel::{align_phases, sample_realization, CascadeGains, ChannelRealization};
pub use error::{Error, Result};
pub use link::{build_rx, ml_detect, sinr, DetectionOutcome, RxSample};
pub use montecarlo::{
    moment_audit, run_ber, run_outage, run_throughput, EstimateResult, MomentAudit, ThroughputEstimate, TrialPlan,
};
pub use params::{EstimationErrorMode, SystemParams};
