//! Module invariants as property tests, one test per suite.

mod props;

macro_rules! suite {
    ($name:ident, $call:expr) => {
        #[test]
        fn $name() {
            if let Err(e) = $call {
                panic!("{e}");
            }
        }
    };
}

suite!(interval_soundness, props::interval_soundness(props::INTERVAL_CASES));
suite!(root_product, props::root_product(300));
suite!(quadrature_refinement, props::quadrature_refinement());
suite!(newton_equivariance, props::newton_equivariance(300));
suite!(tempered_invariance, props::tempered_invariance(300));
suite!(reciprocal_invariance, props::reciprocal_invariance(300));
suite!(cyclotomic_oracle, props::cyclotomic_agreement(2000));
suite!(desingularized_shape, props::desingularized_shape(60));
suite!(gl2_invariance, props::gl2_invariance(props::GL2_CASES));
suite!(multiplicativity, props::multiplicativity(30));
suite!(swap_and_inversion, props::swap_and_inversion(30));
suite!(route_agreement, props::route_agreement());
suite!(torus_symmetry, props::torus_symmetry(60));
suite!(tracker_structure, props::tracker_structure());
suite!(c4_c6_discriminant, props::c4_c6_discriminant(500));
suite!(group_law, props::group_law(100));
suite!(pk_map_symbolic, props::pk_map_symbolic());
suite!(bernoulli_oddness, props::bernoulli_oddness());
suite!(delta_bilinear, props::delta_bilinear());
suite!(genus2_distinct_j, props::genus2_distinct_j());
suite!(dual_route_dirichlet, props::dual_route_dirichlet());
suite!(dual_route_elliptic, props::dual_route_elliptic());
suite!(euler_product, props::euler_product(500));
suite!(precision_monotonicity, props::precision_monotonicity());
suite!(scale_invariance, props::scale_invariance(20));
suite!(determinism_and_exclusion, props::determinism_and_exclusion());
