//! Principal symbols of the boundary operators.
//!
//! The elastic potentials are `q = (q₁, q₂, q_p)` with the shear potential
//! horizontal. `U` sends potential amplitudes to displacement traces and `M`
//! sends them to tractions, including the `i` factor of the elastic DtN map so
//! that hyperbolic entries are real. Both are written in terms of a pair of
//! vertical wavenumbers `(k₃ˢ, k₃ᵖ)` whose choice fixes the flavor:
//!
//! | flavor           | `k₃ˢ`  | `k₃ᵖ`  |
//! |------------------|--------|--------|
//! | outgoing         | `ξ₃ˢ`  | `ξ₃ᵖ`  |
//! | incoming         | `−ξ₃ˢ` | `−ξ₃ᵖ` |
//! | mixed outgoing   | `ξ₃ˢ`  | `ξ̃₃ᵖ`  |
//! | mixed incoming   | `−ξ₃ˢ` | `ξ̃₃ᵖ`  |
//! | evanescent       | `ξ̃₃ˢ`  | `ξ̃₃ᵖ`  |
//!
//! Symbols at `τ > 0` are the entrywise conjugates of those at `−τ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::media::MaterialPoint;
use crate::microlocal::{classify, BoundaryCovector, FluidRegion, RegionLabel, SolidRegion, DEFAULT_EPS_G};
use crate::microlocal::{vertical_wavenumbers, VerticalWavenumbers};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Solid,
    Fluid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Incoming,
    Outgoing,
    Evanescent,
    MixedIncoming,
    MixedOutgoing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolKind {
    pub side: Side,
    pub flavor: Flavor,
}

impl SymbolKind {
    pub fn solid(flavor: Flavor) -> Self {
        SymbolKind { side: Side::Solid, flavor }
    }

    pub fn fluid(flavor: Flavor) -> Self {
        SymbolKind { side: Side::Fluid, flavor }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    pub entries: CMat,
    pub kind: SymbolKind,
    pub covector: BoundaryCovector,
    pub material: MaterialPoint,
}

fn check_solid(kind: SymbolKind, label: &RegionLabel) -> Result<()> {
    if kind.side != Side::Solid {
        return Err(Error::RegionMismatch("elastic symbols live on the solid side".into()));
    }
    let want = match kind.flavor {
        Flavor::Incoming | Flavor::Outgoing => SolidRegion::Hyperbolic,
        Flavor::MixedIncoming | Flavor::MixedOutgoing => SolidRegion::Mixed,
        Flavor::Evanescent => SolidRegion::Elliptic,
    };
    if label.solid != want {
        return Err(Error::RegionMismatch(format!(
            "{:?} symbol requested in the solid {:?} region",
            kind.flavor, label.solid
        )));
    }
    Ok(())
}

/// Vertical wavenumber pair `(k₃ˢ, k₃ᵖ)` for a solid flavor at `τ < 0`.
pub fn solid_k3(flavor: Flavor, w: &VerticalWavenumbers) -> (C64, C64) {
    let (s, p) = (w.xi3_s(), w.xi3_p());
    match flavor {
        Flavor::Outgoing => (s, p),
        Flavor::Incoming => (-s, -p),
        Flavor::MixedOutgoing => (s, p),
        Flavor::MixedIncoming => (-s, p),
        Flavor::Evanescent => (s, p),
    }
}

/// `U(k₃ˢ, k₃ᵖ)` with literal `ξ₁, ξ₂` entries.
pub fn potential_matrix(xi1: f64, xi2: f64, k3s: C64, k3p: C64) -> CMat {
    let r = |x: f64| C64::new(x, 0.0);
    CMat::from_rows(&[[r(0.0), -k3s, r(xi1)], [k3s, r(0.0), r(xi2)], [r(-xi2), r(xi1), k3p]])
}

/// `M(k₃ˢ, k₃ᵖ)` with literal `ξ₁, ξ₂, τ` entries.
pub fn traction_matrix(xi1: f64, xi2: f64, tau: f64, mat: &MaterialPoint, k3s: C64, k3p: C64) -> CMat {
    let mu = mat.mu();
    let rt2 = mat.rho_s() * tau * tau;
    let r = |x: f64| C64::new(x, 0.0);
    CMat::from_rows(&[
        [r(-mu * xi1 * xi2), r(mu * (2.0 * xi1 * xi1 + xi2 * xi2) - rt2), 2.0 * mu * xi1 * k3p],
        [r(-mu * (xi1 * xi1 + 2.0 * xi2 * xi2) + rt2), r(mu * xi1 * xi2), 2.0 * mu * xi2 * k3p],
        [-2.0 * mu * xi2 * k3s, 2.0 * mu * xi1 * k3s, r(-2.0 * mu * (xi1 * xi1 + xi2 * xi2) + rt2)],
    ])
}

fn solid_symbol(
    kind: SymbolKind,
    cov: &BoundaryCovector,
    mat: &MaterialPoint,
    build: impl Fn(&BoundaryCovector, C64, C64) -> CMat,
) -> Result<SymbolMatrix> {
    let label = classify(cov, mat, DEFAULT_EPS_G)?;
    check_solid(kind, &label)?;
    let neg = cov.with_negative_tau();
    let w = vertical_wavenumbers(&neg, mat)?;
    let (k3s, k3p) = solid_k3(kind.flavor, &w);
    let mut entries = build(&neg, k3s, k3p);
    if cov.tau > 0.0 {
        entries = entries.conj();
    }
    Ok(SymbolMatrix { entries, kind, covector: *cov, material: *mat })
}

/// Principal symbol of the potential-to-trace map `U`.
pub fn potential_map_symbol(kind: SymbolKind, cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<SymbolMatrix> {
    solid_symbol(kind, cov, mat, |c, s, p| potential_matrix(c.xi1, c.xi2, s, p))
}

/// Principal symbol of the potential-to-traction map `M`.
pub fn traction_map_symbol(kind: SymbolKind, cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<SymbolMatrix> {
    solid_symbol(kind, cov, mat, |c, s, p| traction_matrix(c.xi1, c.xi2, c.tau, mat, s, p))
}

/// Principal symbol of the acoustic DtN map.
pub fn acoustic_dtn_symbol(flavor: Flavor, cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<C64> {
    let label = classify(cov, mat, DEFAULT_EPS_G)?;
    let want = match flavor {
        Flavor::Incoming | Flavor::Outgoing => FluidRegion::Hyperbolic,
        Flavor::Evanescent => FluidRegion::Elliptic,
        Flavor::MixedIncoming | Flavor::MixedOutgoing => {
            return Err(Error::RegionMismatch("mixed flavors exist only on the solid side".into()))
        }
    };
    if label.fluid != want {
        return Err(Error::RegionMismatch(format!(
            "{:?} acoustic symbol requested in the fluid {:?} region",
            flavor, label.fluid
        )));
    }
    let w = vertical_wavenumbers(cov, mat)?;
    let v = dtn_value(flavor, w.xi3_f());
    Ok(if cov.tau > 0.0 { v.conj() } else { v })
}

/// DtN value at `τ < 0` from the fluid vertical wavenumber.
pub fn dtn_value(flavor: Flavor, xi3_f: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    match flavor {
        Flavor::Outgoing => i * xi3_f,
        Flavor::Incoming => -i * xi3_f,
        // ξ̃₃ᶠ = i·sqrt(|ξ'|² − c_f⁻²τ²), so −sqrt(·) = i·ξ̃₃ᶠ.
        _ => C64::new(-xi3_f.im, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical_material;
    use proptest::prelude::*;

    fn cov(xi1: f64, tau: f64) -> BoundaryCovector {
        BoundaryCovector::new(xi1, 0.0, tau)
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-14 * (1.0 + b.norm())
    }

    #[test]
    fn dtn_examples() {
        let m = canonical_material();
        let v = acoustic_dtn_symbol(Flavor::Outgoing, &cov(1.0, -3.0), &m).unwrap();
        assert!(close(v, C64::new(0.0, 3f64.sqrt())));
        let v = acoustic_dtn_symbol(Flavor::Evanescent, &cov(1.0, -1.2), &m).unwrap();
        assert!(close(v, C64::new(-0.6, 0.0)));
        assert!(matches!(
            acoustic_dtn_symbol(Flavor::Incoming, &cov(1.0, -1.2), &m),
            Err(Error::RegionMismatch(_))
        ));
        let vin = acoustic_dtn_symbol(Flavor::Incoming, &cov(1.0, -3.0), &m).unwrap();
        assert!(close(vin, C64::new(0.0, -(3f64.sqrt()))));
    }

    #[test]
    fn potential_map_examples() {
        let m = canonical_material();
        let u = potential_map_symbol(SymbolKind::solid(Flavor::Outgoing), &cov(1.0, -3.0), &m).unwrap();
        let e = &u.entries;
        let s8 = 8f64.sqrt();
        assert!(close(e[(0, 0)], C64::new(0.0, 0.0)));
        assert!(close(e[(0, 1)], C64::new(-s8, 0.0)));
        assert!(close(e[(0, 2)], C64::new(1.0, 0.0)));
        assert!(close(e[(2, 0)], C64::new(0.0, 0.0)));
        assert!(close(e[(2, 1)], C64::new(1.0, 0.0)));
        assert!(close(e[(2, 2)], C64::new(1.25f64.sqrt(), 0.0)));

        let u = potential_map_symbol(SymbolKind::solid(Flavor::MixedOutgoing), &cov(1.0, -1.2), &m).unwrap();
        assert!(close(u.entries[(2, 2)], C64::new(0.0, 0.8)));

        let uin = potential_map_symbol(SymbolKind::solid(Flavor::Incoming), &cov(1.0, -3.0), &m).unwrap();
        let w = vertical_wavenumbers(&cov(1.0, -3.0), &m).unwrap();
        let expect = potential_matrix(1.0, 0.0, -w.xi3_s(), -w.xi3_p());
        assert_eq!(uin.entries, expect);

        assert!(potential_map_symbol(SymbolKind::solid(Flavor::Outgoing), &cov(1.0, -1.2), &m).is_err());
        assert!(potential_map_symbol(SymbolKind::fluid(Flavor::Outgoing), &cov(1.0, -3.0), &m).is_err());
    }

    #[test]
    fn traction_map_examples() {
        let m = canonical_material();
        let t = traction_map_symbol(SymbolKind::solid(Flavor::Outgoing), &cov(1.0, -3.0), &m).unwrap();
        assert!(close(t.entries[(1, 0)], C64::new(8.0, 0.0)));
        assert!(close(t.entries[(2, 2)], C64::new(7.0, 0.0)));
        let t = traction_map_symbol(SymbolKind::solid(Flavor::MixedOutgoing), &cov(1.0, -1.2), &m).unwrap();
        assert!(close(t.entries[(0, 2)], C64::new(0.0, 1.6)));
        let t = traction_map_symbol(SymbolKind::solid(Flavor::Evanescent), &cov(1.0, -0.5), &m).unwrap();
        assert_eq!(t.entries[(2, 0)].re, 0.0);
        assert_eq!(t.entries[(2, 1)].re, 0.0);
        assert!(t.entries[(2, 1)].im != 0.0);
    }

    #[test]
    fn mixed_incoming_negates_shear_only() {
        let m = canonical_material();
        let c = cov(1.0, -1.2);
        let out = traction_map_symbol(SymbolKind::solid(Flavor::MixedOutgoing), &c, &m).unwrap();
        let inc = traction_map_symbol(SymbolKind::solid(Flavor::MixedIncoming), &c, &m).unwrap();
        let w = vertical_wavenumbers(&c, &m).unwrap();
        assert_eq!(out.entries, traction_matrix(1.0, 0.0, -1.2, &m, w.xi3_s(), w.xi3_p()));
        assert_eq!(inc.entries, traction_matrix(1.0, 0.0, -1.2, &m, -w.xi3_s(), w.xi3_p()));
    }

    fn flavor_for(label: &RegionLabel) -> [Flavor; 2] {
        match label.solid {
            SolidRegion::Hyperbolic => [Flavor::Outgoing, Flavor::Incoming],
            SolidRegion::Mixed => [Flavor::MixedOutgoing, Flavor::MixedIncoming],
            _ => [Flavor::Evanescent, Flavor::Evanescent],
        }
    }

    proptest! {
        #[test]
        fn homogeneity(xi1 in 0.05..3.0f64, xi2 in -3.0..3.0f64, tau in -6.0..-0.05f64, lam in 0.1..10.0f64) {
            let m = canonical_material();
            let c = BoundaryCovector::new(xi1, xi2, tau);
            let Ok(label) = classify(&c, &m, 1e-6) else { return Ok(()); };
            for fl in flavor_for(&label) {
                let k = SymbolKind::solid(fl);
                let u1 = potential_map_symbol(k, &c, &m).unwrap().entries;
                let u2 = potential_map_symbol(k, &c.scaled(lam), &m).unwrap().entries;
                let m1 = traction_map_symbol(k, &c, &m).unwrap().entries;
                let m2 = traction_map_symbol(k, &c.scaled(lam), &m).unwrap().entries;
                for i in 0..3 {
                    for j in 0..3 {
                        let a = u1[(i, j)] * lam;
                        prop_assert!((u2[(i, j)] - a).norm() <= 1e-12 * (1.0 + a.norm()));
                        let b = m1[(i, j)] * lam * lam;
                        prop_assert!((m2[(i, j)] - b).norm() <= 1e-12 * (1.0 + b.norm()));
                    }
                }
            }
            let fl = if label.fluid == FluidRegion::Hyperbolic { Flavor::Outgoing } else { Flavor::Evanescent };
            let a = acoustic_dtn_symbol(fl, &c, &m).unwrap() * lam;
            let b = acoustic_dtn_symbol(fl, &c.scaled(lam), &m).unwrap();
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }

        #[test]
        fn tau_conjugation(xi1 in 0.05..3.0f64, tau in -6.0..-0.05f64) {
            let m = canonical_material();
            let c = cov(xi1, tau);
            let Ok(label) = classify(&c, &m, 1e-6) else { return Ok(()); };
            let cp = cov(xi1, -tau);
            for fl in flavor_for(&label) {
                let k = SymbolKind::solid(fl);
                prop_assert_eq!(potential_map_symbol(k, &cp, &m).unwrap().entries,
                                potential_map_symbol(k, &c, &m).unwrap().entries.conj());
                prop_assert_eq!(traction_map_symbol(k, &cp, &m).unwrap().entries,
                                traction_map_symbol(k, &c, &m).unwrap().entries.conj());
            }
        }

        #[test]
        fn incoming_is_outgoing_with_negated_wavenumbers(xi1 in 0.0..1.4f64, tau in -6.0..-3.0f64) {
            let m = canonical_material();
            let c = cov(xi1, tau);
            let w = vertical_wavenumbers(&c, &m).unwrap();
            let out = potential_map_symbol(SymbolKind::solid(Flavor::Outgoing), &c, &m).unwrap().entries;
            let inc = potential_map_symbol(SymbolKind::solid(Flavor::Incoming), &c, &m).unwrap().entries;
            let mut flipped = out.clone();
            flipped[(0, 1)] = -flipped[(0, 1)];
            flipped[(1, 0)] = -flipped[(1, 0)];
            flipped[(2, 2)] = -flipped[(2, 2)];
            prop_assert_eq!(inc, flipped);
            prop_assert!(w.s.propagating && w.p.propagating);
        }
    }
}
