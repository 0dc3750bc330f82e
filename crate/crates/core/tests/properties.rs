mod common;

#[test]
fn ring_laws() {
    common::ring_laws(256).unwrap();
}

#[test]
fn dissection_reconstruction() {
    common::dissection_reconstruction(256).unwrap();
}

#[test]
fn truncation_coherence() {
    common::truncation_coherence(128).unwrap();
}

#[test]
fn reduce_mod_commutes() {
    common::reduce_mod_commutes(256).unwrap();
}

#[test]
fn product_spec_reorder() {
    common::product_spec_reorder(128).unwrap();
}

#[test]
fn quadform_dp_vs_naive() {
    common::quadform_dp_vs_naive().unwrap();
}
