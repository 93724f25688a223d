//! Exact arithmetic on bivariate Laurent polynomials over the rationals.
//!
//! Everything in this module is exact: Newton polygons and their side
//! polynomials, the cyclotomic-product test behind temperedness,
//! reciprocity, `GL_2(Z)` monomial substitutions and resultants in `t2`.

mod bivariate;
mod cyclotomic;
mod laurent;
mod newton;
mod parse;
mod transform;
mod trivariate;
mod uni;

pub use bivariate::{discriminant_in_t2, discriminant_t2_general, gcd_t2, resultant_t2, BiPoly};
pub use cyclotomic::{cyclotomic_poly, euler_phi, is_cyclotomic_product, CyclotomicFactorization};
pub use laurent::LaurentPoly2;
pub use newton::{is_tempered, newton_polygon, NewtonPolygon, Side, SideObstruction, TemperedReport};
pub use parse::{parse_laurent2, parse_laurent3};
pub use transform::{
    desingularizing_transform, is_reciprocal, monomial_transform, Desingularized, UnimodularMap,
};
pub use trivariate::LaurentPoly3;
pub use uni::{resultant, UniPoly};

pub(crate) use laurent::{rational_string, rpow};

/// Serde adapter writing rationals as `"num/den"` strings.
pub(crate) mod serde_rational_vec {
    use rug::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(super::rational_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<Rational>().map_err(serde::de::Error::custom))
            .collect()
    }
}
