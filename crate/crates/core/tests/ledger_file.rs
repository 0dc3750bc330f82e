use qphi::verify::{default_ledger, Ledger};

const SHIPPED: &str = include_str!("../ledger/default.json");

// QPHI_BLESS=1 rewrites the shipped file from the builder.
#[test]
fn shipped_ledger_matches_builder() {
    let built = default_ledger().to_json();
    if std::env::var_os("QPHI_BLESS").is_some() {
        std::fs::write(concat!(env!("CARGO_MANIFEST_DIR"), "/ledger/default.json"), &built).unwrap();
        return;
    }
    assert_eq!(SHIPPED, built, "ledger/default.json is stale; rerun with QPHI_BLESS=1");
}

#[test]
fn shipped_ledger_parses() {
    let l = Ledger::from_json(SHIPPED).unwrap();
    assert_eq!(l, default_ledger());
}
