//! Characteristic-number budgets and bubble trees for degenerating families
//! of monopole configurations.

mod budget;
mod tree;

pub use budget::{
    budget_compact_lebrun, budget_football, budget_gh, budget_gh_multi, budget_ncp2, budget_oln, conservation_check,
    eta, CharBudget, Conservation, EtaTerm, Q,
};
pub use tree::{
    boundary_pair, default_parameters, nested_collision, no_degeneration, predict_tree, tree_energy_check,
    write_ledger_csv, BubbleKind, BubbleNode, DegenerationScenario, EnergyCheck, LedgerRow, MIN_SAMPLES, SEPARATION,
    SETTLED,
};
