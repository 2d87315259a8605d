//! One line per acceptance criterion; fails if any criterion fails or runs over budget.

use ccm_core::exec::Execution;
use ccm_core::verify;

#[test]
fn acceptance_criteria() {
    let outcomes = verify::run_all(Execution::Parallel);
    for o in &outcomes {
        println!("{}", o.line());
    }
    assert_eq!(outcomes.len(), 10);
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
