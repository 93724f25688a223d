use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;

use super::{find_relation, residual_of, BasisEntry, RelationBasis, RelationStatus};
use crate::curves::{genus1_jacobian, genus2_split, parse_curve, pk_curve, pk_polynomial, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::lfunctions::{dirichlet_lprime_minus1, ell_lprime_0, odd_primitive_characters, zeta_prime_minus2, DirichletCharacter};
use crate::mahler::mahler_2var;
use crate::numerics::{BigReal, PrecisionBudget};
use crate::poly::LaurentPoly2;
use crate::torus::torus_intersections;

/// One candidate constant for the right-hand side of an identity.
#[derive(Clone, Debug)]
pub enum BasisItem {
    /// `L'(E, 0)` for an explicit model.
    Curve(WeierstrassCurve),
    /// `L'(C_k, 0)` for the family curve.
    Pk(i64),
    /// `L'(E, 0)` for the Jacobian of the genus-1 curve `P = 0`.
    Jacobian,
    /// `L'(E_i, 0)` for the elliptic factors of the genus-2 curve `P = 0`.
    Genus2Factor(u8),
    /// `L'(chi, -1)`.
    Character(DirichletCharacter),
    /// `zeta'(-2)`.
    ZetaPrimeMinus2,
    /// `log q`.
    Log(Rational),
}

impl BasisItem {
    pub fn label(&self) -> String {
        match self {
            BasisItem::Curve(c) => format!("L'(E{c},0)"),
            BasisItem::Pk(k) => format!("L'(C_{k},0)"),
            BasisItem::Jacobian => "L'(E,0)".into(),
            BasisItem::Genus2Factor(i) => format!("L'(E{i},0)"),
            BasisItem::Character(chi) => format!("L'(chi_{chi},-1)"),
            BasisItem::ZetaPrimeMinus2 => "zeta'(-2)".into(),
            BasisItem::Log(q) => format!("log({q})"),
        }
    }

    fn curve_for(&self, p: Option<&LaurentPoly2>) -> Result<Option<WeierstrassCurve>> {
        let need_p = || p.ok_or_else(|| Error::Domain(format!("{} needs a two-variable polynomial", self.label())));
        Ok(match self {
            BasisItem::Curve(c) => Some(c.clone()),
            BasisItem::Pk(k) => Some(pk_curve(&Rational::from(*k))?.0),
            BasisItem::Jacobian => Some(genus1_jacobian(need_p()?)?),
            BasisItem::Genus2Factor(i) => {
                let g = genus2_split(need_p()?)?;
                Some(if *i == 1 { g.e1 } else { g.e2 })
            }
            _ => None,
        })
    }

    fn evaluate(&self, p: Option<&LaurentPoly2>, budget: &PrecisionBudget) -> Result<BigReal> {
        if let Some(c) = self.curve_for(p)? {
            return Ok(ell_lprime_0(&c, budget)?.value);
        }
        match self {
            BasisItem::Character(chi) => dirichlet_lprime_minus1(chi, budget),
            BasisItem::ZetaPrimeMinus2 => zeta_prime_minus2(budget),
            BasisItem::Log(q) => Ok(BigReal::from_rational(q, budget.working_bits).ln()),
            _ => unreachable!("curve items handled above"),
        }
    }
}

/// Parses a `;`-separated list: `curve:a1,a2,a3,a4,a6`, `pk:K`, `jac`,
/// `e1`, `e2`, `chi:M:N`, `zeta'(-2)`, `log:Q`.
pub fn parse_basis_spec(spec: &str) -> Result<Vec<BasisItem>> {
    let mut out = Vec::new();
    for raw in spec.split(';') {
        let item = raw.trim();
        if item.is_empty() {
            continue;
        }
        let lower = item.to_ascii_lowercase();
        let parsed = if let Some(rest) = lower.strip_prefix("curve:") {
            BasisItem::Curve(parse_curve(rest)?)
        } else if let Some(rest) = lower.strip_prefix("pk:") {
            BasisItem::Pk(rest.trim().parse().map_err(|_| Error::Parse(format!("bad k in {item:?}")))?)
        } else if let Some(rest) = lower.strip_prefix("chi:") {
            BasisItem::Character(DirichletCharacter::parse(rest)?.primitive()?)
        } else if let Some(rest) = lower.strip_prefix("log:") {
            let q: Rational = rest.trim().parse().map_err(|_| Error::Parse(format!("bad rational in {item:?}")))?;
            if q <= 0 {
                return Err(Error::Domain(format!("log of non-positive {q}")));
            }
            BasisItem::Log(q)
        } else {
            match lower.as_str() {
                "jac" | "e" => BasisItem::Jacobian,
                "e1" => BasisItem::Genus2Factor(1),
                "e2" => BasisItem::Genus2Factor(2),
                "zeta'(-2)" | "zeta:-2" => BasisItem::ZetaPrimeMinus2,
                _ => return Err(Error::Parse(format!("unknown basis item {item:?}"))),
            }
        };
        out.push(parsed);
    }
    if out.is_empty() {
        return Err(Error::Parse("empty basis specification".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct DiscoverOptions {
    pub height_bound: u64,
    pub unity_bound: u64,
    /// Explicit basis; `None` builds one automatically.
    pub basis: Option<Vec<BasisItem>>,
    /// Re-check a found relation with every constant recomputed at 1.5 times
    /// the digits.
    pub verify: bool,
}

impl Default for DiscoverOptions {
    fn default() -> Self {
        DiscoverOptions { height_bound: 1_000_000, unity_bound: 120, basis: None, verify: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub coeffs: Vec<i64>,
    pub residual: BigReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscoveryReport {
    pub polynomial: String,
    pub digits: u32,
    pub measure: BigReal,
    pub basis: Vec<BasisEntry>,
    pub status: RelationStatus,
    pub relation: Option<RelationReport>,
    pub exclusion_norm: BigReal,
    /// `m(P) = sum (a/b) x`, when the relation involves `m(P)`.
    pub identity: Option<String>,
    /// Outcome of the re-check at 1.5 times the digits.
    pub verified: Option<bool>,
    pub notes: Vec<String>,
}

/// `k` when `P` is `P_k` up to a monomial factor.
fn pk_parameter(p: &LaurentPoly2) -> Option<i64> {
    let (pn, _) = p.normalized();
    let k = pn.coeff(1, 1);
    if *k.denom() != 1 {
        return None;
    }
    let (q, _) = pk_polynomial(&k).normalized();
    (q == pn || q == pn.neg()).then(|| k.numer().to_i64()).flatten()
}

fn lcm(a: u64, b: u64) -> u64 {
    let g = Integer::from(a).gcd(&Integer::from(b)).to_u64().unwrap_or(1);
    a / g * b
}

/// Automatic candidates: an elliptic curve attached to `P = 0` when there
/// is one, odd characters for the torus boundary, and `log |lambda|`.
fn auto_basis(p: &LaurentPoly2, opts: &DiscoverOptions, budget: &PrecisionBudget, notes: &mut Vec<String>) -> Vec<BasisItem> {
    let mut items = Vec::new();
    if let Some(k) = pk_parameter(p).filter(|&k| pk_curve(&Rational::from(k)).is_ok()) {
        items.push(BasisItem::Pk(k));
    } else if genus1_jacobian(p).is_ok() {
        items.push(BasisItem::Jacobian);
    } else if genus2_split(p).is_ok() {
        items.push(BasisItem::Genus2Factor(1));
        items.push(BasisItem::Genus2Factor(2));
    } else {
        notes.push("no genus-1 or split genus-2 model found for P = 0".into());
    }
    match torus_intersections(p, &budget.scaled(0.5).with_extra_bits(32), opts.unity_bound) {
        Ok(rep) if !rep.one_dimensional && !rep.points.is_empty() => {
            let tags: Vec<[i64; 4]> = rep.points.iter().filter_map(|pt| pt.unity).collect();
            if tags.len() < rep.points.len() {
                notes.push("some torus boundary points are not roots of unity; no characters for them".into());
            }
            let order = tags.iter().fold(1u64, |acc, t| lcm(lcm(acc, t[1] as u64), t[3] as u64));
            let mut conductors: Vec<u64> = (1..=order).filter(|f| order % f == 0).collect();
            conductors.extend([3, 4]);
            conductors.sort_unstable();
            conductors.dedup();
            for f in conductors {
                for chi in odd_primitive_characters(f) {
                    if chi.is_real() {
                        items.push(BasisItem::Character(chi));
                    }
                }
            }
            notes.push(format!(
                "character selection is heuristic: odd real primitive characters of conductor dividing {order}, \
                 together with conductors 3 and 4"
            ));
        }
        Ok(_) => {}
        Err(e) => notes.push(format!("torus boundary not computed: {e}")),
    }
    let (pn, _) = p.normalized();
    if let Some(((_, _), lambda)) = pn.terms().max_by_key(|((a, b), _)| (*b, *a)) {
        let l = Rational::from(lambda.abs_ref());
        if l != 1 {
            items.push(BasisItem::Log(l));
        }
    }
    items
}

fn build_basis(
    p: &LaurentPoly2,
    items: &[BasisItem],
    budget: &PrecisionBudget,
) -> Result<(BigReal, RelationBasis)> {
    let (measure, values) = rayon::join(
        || mahler_2var(p, budget).map(|r| r.value),
        || items.par_iter().map(|it| it.evaluate(Some(p), budget)).collect::<Result<Vec<_>>>(),
    );
    let measure = measure?;
    let values = values?;
    let mut entries = vec![("m(P)".to_string(), measure.clone())];
    entries.extend(items.iter().map(|i| i.label()).zip(values));
    Ok((measure, RelationBasis::new(entries)?))
}

fn rational_text(num: i64, den: i64) -> String {
    let q = Rational::from((num, den));
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("({q})")
    }
}

/// `m(P) = ...` from a relation whose first coefficient is nonzero.
fn identity_text(basis: &RelationBasis, c: &[i64]) -> Option<String> {
    let c0 = c[0];
    if c0 == 0 {
        return None;
    }
    let mut parts = Vec::new();
    for (e, &ci) in basis.entries.iter().zip(c).skip(1) {
        if ci != 0 {
            let coeff = match rational_text(-ci, c0).as_str() {
                "1" => String::new(),
                "-1" => "-".into(),
                t => format!("{t}*"),
            };
            parts.push(format!("{coeff}{}", e.label));
        }
    }
    Some(if parts.is_empty() { "m(P) = 0".into() } else { format!("m(P) = {}", parts.join(" + ").replace("+ -", "- ")) })
}

/// Computes `m(P)` and candidate constants, then searches for an integer
/// relation among them. "No relation" is a normal outcome.
pub fn discover(p: &LaurentPoly2, opts: &DiscoverOptions, budget: &PrecisionBudget) -> Result<DiscoveryReport> {
    let mut notes = Vec::new();
    let items = match &opts.basis {
        Some(b) => b.clone(),
        None => auto_basis(p, opts, budget, &mut notes),
    };
    let (measure, basis) = build_basis(p, &items, budget)?;
    if basis.len() < 2 {
        notes.push("nothing to compare m(P) with".into());
        return Ok(DiscoveryReport {
            polynomial: p.to_string(),
            digits: budget.digits(),
            measure,
            basis: basis.entries,
            status: RelationStatus::Inconclusive,
            relation: None,
            exclusion_norm: BigReal::zero(budget.working_bits),
            identity: None,
            verified: None,
            notes,
        });
    }
    let res = find_relation(&basis, opts.height_bound, budget)?;
    let mut status = res.status;
    let mut verified = None;
    if let (Some(c), true) = (&res.coefficients, opts.verify) {
        let fine = budget.scaled(1.5);
        let (_, fine_basis) = build_basis(p, &items, &fine)?;
        let (r_fine, err_fine) = residual_of(&fine_basis, c);
        let r_coarse = res.residual.mid().to_f64();
        let tol = 10.0 * err_fine + 2f64.powi(-(fine.working_bits as i32)) * c.iter().map(|x| x.unsigned_abs() as f64).sum::<f64>();
        let ok = r_fine.to_f64() <= tol && (r_fine.to_f64() <= r_coarse || r_coarse == 0.0 || r_fine.to_f64() < 1e-3 * budget.target_abs_error);
        verified = Some(ok);
        if !ok {
            status = RelationStatus::Inconclusive;
            notes.push(format!("relation not confirmed at {} digits (residual {:.2e})", fine.digits(), r_fine.to_f64()));
        }
    }
    let identity = res.coefficients.as_ref().filter(|_| status == RelationStatus::Found).and_then(|c| identity_text(&basis, c));
    if status == RelationStatus::Found && identity.is_none() {
        notes.push("relation does not involve m(P)".into());
    }
    Ok(DiscoveryReport {
        polynomial: p.to_string(),
        digits: budget.digits(),
        measure,
        basis: basis.entries,
        status,
        relation: res.coefficients.map(|coeffs| RelationReport { coeffs, residual: res.residual.clone() }),
        exclusion_norm: res.exclusion_norm,
        identity,
        verified,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_laurent2;

    #[test]
    fn basis_spec() {
        let items = parse_basis_spec("curve:0,-1,1,0,0; chi:8:7; e1; zeta'(-2); log:2").unwrap();
        assert_eq!(items.len(), 5);
        assert_eq!(items[1].label(), "L'(chi_4:3,-1)");
        assert!(parse_basis_spec("bogus").is_err());
    }

    #[test]
    fn recognises_family_members() {
        let p = parse_laurent2("t1*t2^2 + (t1^2 + 5*t1 + 1)*t2 + t1").unwrap();
        assert_eq!(pk_parameter(&p), Some(5));
        let q = parse_laurent2("t2 + t1 + 5 + 1/t1 + 1/t2").unwrap();
        assert_eq!(pk_parameter(&q), Some(5));
        assert_eq!(pk_parameter(&parse_laurent2("t1 + t2 + 1").unwrap()), None);
    }

    #[test]
    fn smyth() {
        let p = parse_laurent2("t1 + t2 + 1").unwrap();
        let opts = DiscoverOptions { height_bound: 1000, ..Default::default() };
        let r = discover(&p, &opts, &PrecisionBudget::from_digits(30)).unwrap();
        assert_eq!(r.status, RelationStatus::Found);
        assert_eq!(r.identity.as_deref(), Some("m(P) = L'(chi_3:2,-1)"));
    }
}
