//! Model checking LTL properties of register pushdown systems.
//!
//! A register pushdown system (RPDS) is a pushdown system whose control
//! states carry k registers over an infinite data domain and whose stack
//! cells carry data values; transition rules are guarded by equality
//! constraints between registers, the top-of-stack value, and the successor
//! registers. Fresh values entering the registers are subject to a freshness
//! discipline relative to the assignments saved on the stack.
//!
//! The crate reduces such a system, together with register-automaton
//! valuations for the atomic propositions, to an ordinary pushdown system
//! over a finite alphabet of guards. The reduction preserves transition
//! structure and labels, so LTL properties can be decided by a saturation
//! based pushdown engine ([`pdsmc`]). An explicit-state oracle ([`oracle`])
//! cross-validates verdicts on bounded instances.

pub mod eqrel;
pub mod ltl;
pub mod machines;
pub mod oracle;
pub mod pdsmc;
pub mod reduction;
pub mod sampling;

#[cfg(test)]
pub(crate) mod testutil;
