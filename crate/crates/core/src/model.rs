//! Parameter types and the physical → dimensionless reduction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs below this are treated as numerically degenerate.
pub const MIN_PARAMETER: f64 = 1e-12;

/// Dimensional material and boundary data of the solidification problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Thermal conductivity `k`, W/(m·°C).
    pub conductivity: f64,
    /// Mass density `ρ`, kg/m³.
    pub density: f64,
    /// Specific heat `c`, J/(kg·K).
    pub specific_heat: f64,
    /// Latent heat of fusion `λ`, J/kg.
    pub latent_heat: f64,
    /// Heat transfer coefficient `h` of the flux law `h/√t`, W·s^½/(m²·°C).
    pub heat_transfer: f64,
    /// Magnitude `Θ∞` of the neighbourhood temperature `-Θ∞`, °C.
    pub theta_inf: f64,
}

/// Ice constants: conductivity, specific heat, diffusivity and latent heat.
const ICE_K: f64 = 2.219;
const ICE_C: f64 = 2097.6;
const ICE_ALPHA: f64 = 1.15e-6;
const ICE_LAMBDA: f64 = 3.33e5;
const ICE_THETA: f64 = 5.0;
const ICE_BIOT: f64 = 80.0;
const ICE_H_NOMINAL: f64 = 1.65e5;

impl PhysicalParams {
    pub fn new(
        conductivity: f64,
        density: f64,
        specific_heat: f64,
        latent_heat: f64,
        heat_transfer: f64,
        theta_inf: f64,
    ) -> Result<Self> {
        let p = Self {
            conductivity,
            density,
            specific_heat,
            latent_heat,
            heat_transfer,
            theta_inf,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("conductivity", self.conductivity),
            ("density", self.density),
            ("specific_heat", self.specific_heat),
            ("latent_heat", self.latent_heat),
            ("heat_transfer", self.heat_transfer),
            ("theta_inf", self.theta_inf),
        ];
        for (field, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Validation {
                    field,
                    value,
                    reason: "must be positive and finite",
                });
            }
        }
        Ok(())
    }

    /// Ice solidifying at `t = 10 s` scale: the heat transfer coefficient
    /// is set so that `Bi = 80` exactly (`h ≈ 1.6554e5`, quoted as `1.65e5`).
    pub fn ice() -> Self {
        Self::ice_with_heat_transfer(ICE_BIOT * ICE_K / ICE_ALPHA.sqrt())
    }

    /// Ice with the rounded `h = 1.65e5` taken verbatim (`Bi ≈ 79.74`).
    pub fn ice_nominal() -> Self {
        Self::ice_with_heat_transfer(ICE_H_NOMINAL)
    }

    fn ice_with_heat_transfer(heat_transfer: f64) -> Self {
        Self {
            conductivity: ICE_K,
            // Density is not quoted; recover it from α = k/(ρc).
            density: ICE_K / (ICE_C * ICE_ALPHA),
            specific_heat: ICE_C,
            latent_heat: ICE_LAMBDA,
            heat_transfer,
            theta_inf: ICE_THETA,
        }
    }

    /// Rebuilds the boundary data `(Θ∞, h)` that realise the given Stefan
    /// and Biot numbers for a fixed material.
    pub fn with_dimensionless(
        conductivity: f64,
        density: f64,
        specific_heat: f64,
        latent_heat: f64,
        params: DimensionlessParams,
    ) -> Result<Self> {
        let alpha = conductivity / (density * specific_heat);
        Self::new(
            conductivity,
            density,
            specific_heat,
            latent_heat,
            params.bi * conductivity / alpha.sqrt(),
            params.ste * latent_heat / specific_heat,
        )
    }

    pub fn diffusivity(&self) -> Diffusivity {
        Diffusivity(self.conductivity / (self.density * self.specific_heat))
    }
}

/// Thermal diffusivity `α = k/(ρc)`, m²/s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Diffusivity(f64);

impl Diffusivity {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Validation {
                field: "alpha",
                value: alpha,
                reason: "must be positive and finite",
            });
        }
        Ok(Self(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Stefan number and (finite) generalized Biot number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub ste: f64,
    pub bi: f64,
}

impl DimensionlessParams {
    pub fn new(ste: f64, bi: f64) -> Result<Self> {
        validate_ste(ste)?;
        validate_positive("bi", bi)?;
        Ok(Self { ste, bi })
    }
}

pub(crate) fn validate_ste(ste: f64) -> Result<()> {
    validate_positive("ste", ste)
}

fn validate_positive(field: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Validation {
            field,
            value,
            reason: "must be positive and finite",
        });
    }
    if value < MIN_PARAMETER {
        return Err(Error::Validation {
            field,
            value,
            reason: "is numerically degenerate (below 1e-12)",
        });
    }
    Ok(())
}

/// `Ste = cΘ∞/λ`, `Bi = h√α/k` and `α = k/(ρc)`.
pub fn dimensionless_from_physical(p: &PhysicalParams) -> Result<(DimensionlessParams, Diffusivity)> {
    p.validate()?;
    let alpha = p.diffusivity();
    let ste = p.specific_heat * p.theta_inf / p.latent_heat;
    let bi = p.heat_transfer * alpha.get().sqrt() / p.conductivity;
    Ok((DimensionlessParams::new(ste, bi)?, alpha))
}

/// Generalized Biot number, including the Dirichlet limit `Bi → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Biot {
    Finite(f64),
    Infinite,
}

impl Biot {
    /// `1/Bi`, zero in the limit.
    pub fn reciprocal(self) -> f64 {
        match self {
            Biot::Finite(bi) => 1.0 / bi,
            Biot::Infinite => 0.0,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Biot::Finite(bi) => Some(bi),
            Biot::Infinite => None,
        }
    }

    /// Numeric value for reporting; `+∞` in the limit.
    pub fn value(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Biot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Biot::Finite(bi) => write!(f, "{bi}"),
            Biot::Infinite => f.write_str("inf"),
        }
    }
}

/// A problem instance: convective face with finite Bi, or its Dirichlet limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Case {
    Convective(DimensionlessParams),
    DirichletLimit { ste: f64 },
}

impl Case {
    pub fn convective(ste: f64, bi: f64) -> Result<Self> {
        Ok(Case::Convective(DimensionlessParams::new(ste, bi)?))
    }

    pub fn dirichlet(ste: f64) -> Result<Self> {
        validate_ste(ste)?;
        Ok(Case::DirichletLimit { ste })
    }

    pub fn ste(&self) -> f64 {
        match self {
            Case::Convective(p) => p.ste,
            Case::DirichletLimit { ste } => *ste,
        }
    }

    pub fn biot(&self) -> Biot {
        match self {
            Case::Convective(p) => Biot::Finite(p.bi),
            Case::DirichletLimit { .. } => Biot::Infinite,
        }
    }

    pub fn boundary(&self) -> Boundary {
        match self {
            Case::Convective(_) => Boundary::Convective,
            Case::DirichletLimit { .. } => Boundary::DirichletLimit,
        }
    }

    /// The same Stefan number with the Dirichlet face.
    pub fn limit(&self) -> Case {
        Case::DirichletLimit { ste: self.ste() }
    }
}

/// Solution scheme: the exact similarity solution or one of the four
/// quadratic-profile integral approximations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    Exact,
    /// Classical heat balance integral: integral balance + pseudo-Stefan.
    P1,
    /// Heat balance integral keeping the Stefan condition.
    P2,
    /// Refined integral method keeping the Stefan condition.
    P3,
    /// Refined integral method with the pseudo-Stefan condition.
    P4,
}

impl Scheme {
    pub const APPROXIMATE: [Scheme; 4] = [Scheme::P1, Scheme::P2, Scheme::P3, Scheme::P4];

    pub fn is_approximate(self) -> bool {
        self != Scheme::Exact
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Exact => "exact",
            Scheme::P1 => "p1",
            Scheme::P2 => "p2",
            Scheme::P3 => "p3",
            Scheme::P4 => "p4",
        }
    }

    /// Index into per-method arrays ordered `[P1, P2, P3, P4]`.
    pub fn approx_index(self) -> Option<usize> {
        match self {
            Scheme::Exact => None,
            Scheme::P1 => Some(0),
            Scheme::P2 => Some(1),
            Scheme::P3 => Some(2),
            Scheme::P4 => Some(3),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Scheme::Exact),
            "p1" => Ok(Scheme::P1),
            "p2" => Ok(Scheme::P2),
            "p3" => Ok(Scheme::P3),
            "p4" => Ok(Scheme::P4),
            other => Err(Error::Argument(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    Convective,
    DirichletLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MethodId {
    pub scheme: Scheme,
    pub boundary: Boundary,
}

impl MethodId {
    pub fn new(scheme: Scheme, boundary: Boundary) -> Self {
        Self { scheme, boundary }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.boundary {
            Boundary::Convective => write!(f, "{}", self.scheme),
            Boundary::DirichletLimit => write!(f, "{}-inf", self.scheme),
        }
    }
}

/// Similarity solution `(ξ, A, B)`: free boundary `s(t) = 2ξ√(αt)` and the
/// temperature coefficients of the method's profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilaritySolution {
    pub method: MethodId,
    pub xi: f64,
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub ste: f64,
    pub biot: Biot,
}

impl SimilaritySolution {
    pub fn case(&self) -> Case {
        match self.biot {
            Biot::Finite(bi) => Case::Convective(DimensionlessParams { ste: self.ste, bi }),
            Biot::Infinite => Case::DirichletLimit { ste: self.ste },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_reduce_to_unit_numbers() {
        let p = PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let (d, alpha) = dimensionless_from_physical(&p).unwrap();
        assert_eq!((d.ste, d.bi, alpha.get()), (1.0, 1.0, 1.0));
    }

    #[test]
    fn ice_presets() {
        let (d, alpha) = dimensionless_from_physical(&PhysicalParams::ice()).unwrap();
        assert!((alpha.get() - 1.15e-6).abs() < 1e-18);
        assert!((d.bi - 80.0).abs() < 1e-12);
        assert!((d.ste - 2097.6 * 5.0 / 3.33e5).abs() < 1e-15);
        assert!((d.ste - 0.0314).abs() / 0.0314 < 5e-3);
        // Within the rounding of the quoted h = 1.65e5.
        let h = PhysicalParams::ice().heat_transfer;
        assert!((h - 1.65e5).abs() / 1.65e5 < 5e-3);

        let (d, _) = dimensionless_from_physical(&PhysicalParams::ice_nominal()).unwrap();
        assert!((d.bi - 80.0).abs() / 80.0 < 5e-3);
        assert!((d.ste - 0.0314).abs() / 0.0314 < 5e-3);
    }

    #[test]
    fn doubling_theta_doubles_ste_only() {
        let p = PhysicalParams::ice();
        let q = PhysicalParams {
            theta_inf: 2.0 * p.theta_inf,
            ..p
        };
        let (dp, ap) = dimensionless_from_physical(&p).unwrap();
        let (dq, aq) = dimensionless_from_physical(&q).unwrap();
        assert!((dq.ste - 2.0 * dp.ste).abs() < 1e-15);
        assert_eq!(dq.bi, dp.bi);
        assert_eq!(aq, ap);
    }

    #[test]
    fn validation_names_the_offending_field() {
        let err = PhysicalParams::new(1.0, 1.0, -2.0, 1.0, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Validation { field: "specific_heat", .. }));
        let err = PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::Validation { field: "theta_inf", .. }));
        assert!(matches!(
            DimensionlessParams::new(-1.0, 1.0),
            Err(Error::Validation { field: "ste", .. })
        ));
        assert!(matches!(
            DimensionlessParams::new(1.0, 1e-13),
            Err(Error::Validation { field: "bi", .. })
        ));
        assert!(DimensionlessParams::new(1.0, f64::INFINITY).is_err());
        assert!(Diffusivity::new(0.0).is_err());
    }

    #[test]
    fn scheme_parsing_and_display() {
        for s in [Scheme::Exact, Scheme::P1, Scheme::P2, Scheme::P3, Scheme::P4] {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("p5".parse::<Scheme>().is_err());
        let m = MethodId::new(Scheme::P3, Boundary::DirichletLimit);
        assert_eq!(m.to_string(), "p3-inf");
        assert_eq!(Biot::Infinite.to_string(), "inf");
        assert_eq!(Biot::Infinite.reciprocal(), 0.0);
    }
}
