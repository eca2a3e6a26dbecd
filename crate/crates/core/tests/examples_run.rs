macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run().expect(stringify!($name));
        }
    };
}

example!(pauli_algebra);
example!(gibbs_steady_state);
example!(corner_fixed_points);
example!(phase_diagram_gap);
example!(degeneracies);
example!(entanglement_spectrum);
example!(duality_audit);
example!(collision_model);
example!(spectrum_modes);
example!(sweep_from_config);
