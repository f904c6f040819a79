mod common;

use common::props::*;
use common::{filtrations, presentation};
use proptest::prelude::*;
use toricres::exactla::Q;
use toricres::posrep::PosetRep;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(CASES)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn zip_inverts_unzip((r, gens, d, data) in lattice_rep()) {
        zip_after_unzip(r, &gens, d, &data)?;
    }

    #[test]
    fn unzip_inverts_zip(p in presentation()) {
        unzip_after_zip(&p)?;
    }

    #[test]
    fn polynomial_certificates_verify(p in presentation()) {
        polynomial_certificate(&p)?;
    }

    #[test]
    fn affine_certificates_verify(p in wedge_presentation()) {
        affine_certificate(&p)?;
    }

    #[test]
    fn reflexive_certificates_verify((d, f) in filtrations(2)) {
        reflexive_certificate(d, &f)?;
    }

    #[test]
    fn global_reflexive_certificates_verify((d, f) in filtrations(4)) {
        global_reflexive_certificate(d, &f)?;
    }

    #[test]
    fn pullback_commutes_with_resolution(
        ((source, target, f, d), data) in contraction_case()
            .prop_flat_map(|c| { let n = c.1.len(); let d = c.3; (Just(c), common::subquotient_data(n, d)) })
    ) {
        let e: PosetRep<Q> = common::subquotient(&target, d, &data.0, &data.1);
        pullback_commutes(&source, &target, &f, &e)?;
    }

    #[test]
    fn anchors_are_idempotent_and_monotone((gens, m, step) in anchor_case()) {
        anchors_behave(&gens, &m, &step)?;
    }

    #[test]
    fn extension_of_filtrations_is_intersection(((d, f), n, step) in ee_case()) {
        ee_is_intersection(d, &f, &n, &step)?;
    }

    #[test]
    fn first_syzygies_contract((d, f) in filtrations(2)) {
        syzygy_contracts(d, &f)?;
    }

    #[test]
    fn lifts_reproduce_values(((d, f), n) in lift_case()) {
        lift_identity(d, &f, &n)?;
    }
}
