//! Elliptic curves over the rationals and the constructions built on them:
//! the `P_k` family model, reduction data and component groups, the
//! Bernoulli boundary sum, genus-2 splitting, periods and torsion tests.

mod genus2;
mod jacobian;
mod local;
mod periods;
mod pk;
mod reduction;
mod weierstrass;

pub use genus2::{genus2_split, Genus2Split};
pub use jacobian::{discriminant_model, genus1_jacobian};
pub use local::{order_at, XyPoly};
pub use periods::{
    carlson_rf, elliptic_log, lattice_coords, periods, periods_and_elog, to_big, torsion_test, Periods,
    TorsionResult,
};
pub use pk::{divisors_t1_t2_on_pk, pk_curve, pk_points, pk_polynomial, PkMap};
pub use reduction::{
    bad_primes, bernoulli3, component_orders, delta_p, global_minimal_model, is_prime, reduction_data,
    valuation, ComponentAssignment, DivisorOnCurve, ReductionData, ReductionType,
};
pub use weierstrass::{parse_curve, ComplexPoint, CurvePoint, Invariants, Isomorphism, WeierstrassCurve};
