//! Constructive lifts: given inputs and a nearby target, produce perturbed
//! inputs that reproduce the target exactly.
//!
//! Every lift is a single-shot function of one target with an explicit
//! validity region; targets outside it are refused with
//! [`Error::OutsideValidityRegion`](crate::Error::OutsideValidityRegion).

pub mod beta;
pub mod brute;
pub mod fiber;
pub mod finite;
pub mod interval;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::params::ConvexParams;

pub use beta::{lift_beta, BetaLift, BoxHost, Host, MeasureHost};
pub use brute::{brute_force_lift_beta, brute_force_lift_box, brute_force_lift_finite, BruteConfig, BruteWitness};
pub use fiber::{lift_merge_fiber, lift_surjection_fiber, MergeMap};
pub use finite::lift_s_finite;
pub use interval::{lift_s_box, lift_s_interval};

/// Proof branch taken by a lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `t = −∞`: the first argument is invisible.
    Absorbing,
    /// `t = p = 0`, the target's zero is on `C = {λ_i = β_i}`.
    BalancedC,
    /// `t = p = 0`, zero on `A = {λ_i < β_i}`.
    BalancedA,
    /// `t = p = 0`, zero on `B = {λ_i > β_i}`.
    BalancedB,
    /// `t < p` finite and `D = ∅`.
    UnbalancedDEmpty,
    /// `t < p` finite, some `λ_s = 0` with `s ∈ A`.
    UnbalancedZeroInA,
    /// `t < p` finite, no zero of `λ` on `A`.
    UnbalancedZeroOutsideA,
    /// Interval lift, `α ⊙ x < y`.
    IntervalBelow,
    /// Interval lift, `α ⊙ x > y`.
    IntervalAbove,
    /// Interval lift, `α ⊙ x = y`.
    IntervalTie,
    /// `β`-lift base case `k = 1`.
    BetaBase,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Absorbing => "t=-inf",
            Branch::BalancedC => "t=p=0 / i0∈C",
            Branch::BalancedA => "t=p=0 / i0∈A",
            Branch::BalancedB => "t=p=0 / i0∈B",
            Branch::UnbalancedDEmpty => "t<p finite / D empty",
            Branch::UnbalancedZeroInA => "t<p finite / D nonempty / branch λ_s=0",
            Branch::UnbalancedZeroOutsideA => "t<p finite / D nonempty / branch λ_s<0 on A",
            Branch::IntervalBelow => "α⊙x<y",
            Branch::IntervalAbove => "α⊙x>y",
            Branch::IntervalTie => "α⊙x=y",
            Branch::BetaBase => "k=1",
        }
    }
}

/// A branch plus whether the roles of the two inputs were swapped first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CaseTag {
    pub branch: Branch,
    pub mirrored: bool,
}

impl CaseTag {
    pub fn new(branch: Branch) -> Self {
        CaseTag { branch, mirrored: false }
    }

    pub(crate) fn mirror(self) -> Self {
        CaseTag { branch: self.branch, mirrored: !self.mirrored }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mirrored {
            write!(f, "mirrored / {}", self.branch.label())
        } else {
            f.write_str(self.branch.label())
        }
    }
}

impl Serialize for CaseTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Perturbed inputs with parameters reproducing the target exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftWitness<P> {
    pub first: P,
    pub second: P,
    pub params: ConvexParams,
    /// One tag per lifted coordinate (a single tag for measure lifts).
    pub cases: Vec<CaseTag>,
}

impl<P> LiftWitness<P> {
    pub(crate) fn swapped(self) -> Self {
        LiftWitness {
            first: self.second,
            second: self.first,
            params: self.params.swapped(),
            cases: self.cases.into_iter().map(CaseTag::mirror).collect(),
        }
    }
}
