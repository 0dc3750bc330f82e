//! Identity and congruence checking, the ledger, and the runner.

pub mod check;
pub mod expr;
pub mod ledger;
pub mod report;
pub mod run;

pub use check::{
    check_congruence, check_golden, check_identity, ClaimLabel, CongruenceClaim, GoldenValue, IdentityEntry, Mode,
    Relation, WORKING_MODULUS,
};
pub use expr::{Evaluator, Expr};
pub use ledger::{default_ledger, Ledger, LedgerEntry, PerProfile, Profile};
pub use report::{render_table, RunParameters, RunReport, Status, VerificationReport, Witness};
pub use run::{primitive_claims, run_ledger, scan_congruences, RunOptions};
