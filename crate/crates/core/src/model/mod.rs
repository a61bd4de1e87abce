//! Binary aggregation structures, ballots, profiles, aggregation rules and
//! winning-coalition machinery.
//!
//! Voters and issues are 0-based in the API and 1-based whenever they are
//! printed or parsed.

mod aggregator;
mod ballot;
mod coalition;

pub use aggregator::{
    acceptor_set, aggregate, is_systematic, resilient_winning_coalitions, systematic_family,
    winning_coalitions, Aggregator, Systematicity, SystematicityWitness, DEFAULT_PROFILE_BITS_CAP,
};
pub use ballot::{inverse_ballot, BAStructure, Ballot, BallotProfile, ProfileSpace, MAX_DIMENSION};
pub use coalition::{is_monotonic, Coalition, CoalitionFamily};
