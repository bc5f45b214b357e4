mod props;

macro_rules! prop_test {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = props::$name() {
                    panic!("{e}");
                }
            }
        )*
    };
}

prop_test!(
    symmetry_relations,
    norm_relations,
    basis_identity,
    tan_complement,
    family_theta_closure,
    orbit_invariants,
    phi_psi_round_trip,
    lhuilier_agrees_with_equation,
    jsonl_round_trip,
);

#[test]
fn search_matches_brute_force() {
    if let Err(e) = props::search_matches_brute_force(48) {
        panic!("{e}");
    }
}
