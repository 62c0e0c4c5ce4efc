//! The two-dimensional example: constant curvature solutions on a disk, the
//! line `c L = c_dot A` of extendable reduced data, the reduced form on a
//! loop and the cylinder of holonomies.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use nalgebra::DVector;
use serde::Serialize;

use crate::boundary::{BoundaryDatum, BoundaryTrace, GaugeFixer};
use crate::dec::{Cochain, Dec};
use crate::dynamics::solution_space;
use crate::error::{Error, Result};
use crate::linalg::RankPolicy;
use crate::mesh::{builtin, HypersurfaceMesh, RegionMesh};
use crate::symplectic::omega;
use crate::tolerances::Tolerances;

/// Coefficient of the reduced form obtained from the boundary formula.
pub const KAPPA_FORMULA: f64 = 0.5;
/// Coefficient stated in the prose description of the reduced form.
pub const KAPPA_PROSE: f64 = 1.0;

/// Constant boundary datum `(c ds, c_dot ds)` on a loop of length `length`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Reduced2dDatum {
    pub c: f64,
    pub c_dot: f64,
    pub length: f64,
}

fn require_2d(mesh: &RegionMesh) -> Result<()> {
    if mesh.dim() != 2 {
        return Err(Error::InvalidComplex(format!(
            "expected a 2-dimensional region, got dimension {}",
            mesh.dim()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    /// Area-weighted mean of `d eta / area` (with the triangle orientation).
    pub c_dot: f64,
    pub max_deviation: f64,
    pub relative_deviation: f64,
}

/// Per-triangle ratio `d eta / area` and its spread.
pub fn curvature_constant(mesh: &RegionMesh, eta: &Cochain, tol: f64) -> Result<CurvatureReport> {
    require_2d(mesh)?;
    let dec = Dec::region(mesh);
    let d = dec.d(eta)?;
    let cx = mesh.complex();
    let areas = mesh.metric().volumes(2);
    let ratios: Vec<f64> = (0..cx.len(2))
        .map(|t| cx.orientation(t) as f64 * d.values()[t] / areas[t])
        .collect();
    let total: f64 = areas.iter().sum();
    let c_dot = ratios.iter().zip(areas).map(|(r, a)| r * a).sum::<f64>() / total;
    let max_deviation = ratios.iter().map(|r| (r - c_dot).abs()).fold(0.0, f64::max);
    let top = ratios.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let relative_deviation = if top > 0.0 { max_deviation / top } else { 0.0 };
    if relative_deviation > tol {
        return Err(Error::CurvatureNotConstant {
            deviation: relative_deviation,
        });
    }
    Ok(CurvatureReport {
        c_dot,
        max_deviation,
        relative_deviation,
    })
}

/// Oriented integral of a 1-cochain over a closed loop.
pub fn loop_integral(sigma: &HypersurfaceMesh, values: &DVector<f64>) -> f64 {
    let cx = sigma.complex();
    (0..cx.len(1)).map(|e| cx.orientation(e) as f64 * values[e]).sum()
}

/// Reduced datum `(c, c_dot)` of a boundary datum on a single loop.
pub fn reduced_datum(sigma: &HypersurfaceMesh, datum: &BoundaryDatum) -> Result<Reduced2dDatum> {
    if sigma.dim() != 1 || !sigma.is_closed() {
        return Err(Error::InvalidComplex("expected a closed loop".into()));
    }
    let components = sigma.components();
    if components != 1 {
        return Err(Error::MultipleBoundaryComponents(components));
    }
    let length = sigma.volume();
    Ok(Reduced2dDatum {
        c: loop_integral(sigma, datum.phi.values()) / length,
        c_dot: loop_integral(sigma, datum.phi_dot.values()) / length,
        length,
    })
}

/// The constant datum `(c ds, c_dot ds)` on a loop.
pub fn constant_datum(sigma: &HypersurfaceMesh, c: f64, c_dot: f64) -> Result<BoundaryDatum> {
    let cx = sigma.complex();
    let lengths = sigma.metric().volumes(1);
    let o: Vec<f64> = (0..cx.len(1)).map(|e| cx.orientation(e) as f64 * lengths[e]).collect();
    let phi = DVector::from_iterator(o.len(), o.iter().map(|x| c * x));
    let phi_dot = DVector::from_iterator(o.len(), o.iter().map(|x| c_dot * x));
    BoundaryDatum::from_values(sigma, phi, phi_dot)
}

/// One gauge-fixed solution in the line check.
#[derive(Clone, Debug, Serialize)]
pub struct LineSample {
    pub boundary_integral: f64,
    pub c_dot: f64,
    pub curvature_deviation: f64,
    /// `|oint eta - c_dot A|`.
    pub residual: f64,
    pub scale: f64,
    pub relative: f64,
    /// Reduced datum of the gauge-fixed trace.
    pub datum: Reduced2dDatum,
    /// `c_dot / c` of the reduced datum, when `c != 0`.
    pub ratio: Option<f64>,
    pub ratio_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LineReport {
    pub mesh: String,
    pub area: f64,
    pub perimeter: f64,
    /// Slope `perimeter / area` of the line `c L = c_dot A` in the `(c, c_dot)` plane.
    pub slope: f64,
    pub samples: Vec<LineSample>,
    pub max_relative: f64,
    pub max_ratio_error: f64,
    pub passed: bool,
}

/// Checks `oint eta = c_dot area` on every gauge-fixed solution and the ratio
/// `c_dot / c = perimeter / area` of the reduced boundary data.
pub fn lagrangian_line_check(mesh: &RegionMesh, tol: &Tolerances) -> Result<LineReport> {
    require_2d(mesh)?;
    let policy = RankPolicy::from(tol);
    let trace = BoundaryTrace::new(mesh)?;
    let sigma = trace.sigma();
    let components = sigma.components();
    if components != 1 || sigma.complex().len(1) == 0 {
        return Err(Error::MultipleBoundaryComponents(components));
    }
    let area = mesh.volume();
    let perimeter = sigma.volume();
    let slope = perimeter / area;
    let fixer = GaugeFixer::new(sigma, policy)?;
    let space = solution_space(mesh, policy)?;
    let dec = Dec::region(mesh);
    let cx = mesh.complex();
    let cols = space.gauge_fixed_basis.columns();
    let mut samples = Vec::new();
    for c in 0..cols.ncols() {
        let eta = Cochain::new(cx, 1, cols.column(c).into_owned())?;
        let curvature = curvature_constant(mesh, &eta, tol.curvature)?;
        let d = dec.d(&eta)?;
        let boundary_integral = loop_integral(sigma, &trace.trace_values(eta.values())?.phi.into_values());
        let residual = (boundary_integral - curvature.c_dot * area).abs();
        let scale = d.values().iter().map(|x| x.abs()).sum::<f64>() + curvature.c_dot.abs() * area;
        let relative = if scale > 0.0 { residual / scale } else { residual };
        let fixed = fixer.fix(&trace.trace_values(eta.values())?)?.datum;
        let datum = reduced_datum(sigma, &fixed)?;
        let (ratio, ratio_error) = if datum.c != 0.0 {
            let r = datum.c_dot / datum.c;
            (Some(r), Some((r - slope).abs() / slope))
        } else {
            (None, None)
        };
        samples.push(LineSample {
            boundary_integral,
            c_dot: curvature.c_dot,
            curvature_deviation: curvature.relative_deviation,
            residual,
            scale,
            relative,
            datum,
            ratio,
            ratio_error,
        });
    }
    let max_relative = samples.iter().map(|s| s.relative).fold(0.0, f64::max);
    let max_ratio_error = samples
        .iter()
        .filter_map(|s| s.ratio_error)
        .fold(0.0, f64::max);
    Ok(LineReport {
        mesh: mesh.name().to_string(),
        area,
        perimeter,
        slope,
        passed: max_relative <= tol.line_residual && max_ratio_error <= tol.line_residual,
        samples,
        max_relative,
        max_ratio_error,
    })
}

/// Closed loop: the boundary of a regular `n`-gon fan with perimeter `length`.
pub fn regular_loop(n: usize, length: f64) -> Result<HypersurfaceMesh> {
    let r = length / (2.0 * n as f64 * (PI / n as f64).sin());
    builtin::disk_with_radius(n, r)?.boundary_complex()
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedFormReport {
    pub length: f64,
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub omega: f64,
    /// `omega / (L (c c_dot' - c' c_dot))`, absent for a degenerate pair.
    pub kappa: Option<f64>,
    pub kappa_formula: f64,
    pub kappa_prose: f64,
    /// Set whenever the measured coefficient differs from the prose value.
    pub kappa_discrepancy: bool,
    pub note: String,
}

/// Evaluates omega on two constant data on a loop and measures `kappa` in
/// `omega = kappa L (c c_dot' - c' c_dot)`.
pub fn reduced_form_check(sigma: &HypersurfaceMesh, a: (f64, f64), b: (f64, f64)) -> Result<ReducedFormReport> {
    let length = sigma.volume();
    let da = constant_datum(sigma, a.0, a.1)?;
    let db = constant_datum(sigma, b.0, b.1)?;
    let w = omega(sigma, &da, &db)?;
    let denom = length * (a.0 * b.1 - b.0 * a.1);
    let kappa = (denom != 0.0).then(|| w / denom);
    let kappa_discrepancy = match kappa {
        Some(k) => (k - KAPPA_PROSE).abs() > 1e-12,
        None => true,
    };
    Ok(ReducedFormReport {
        length,
        a,
        b,
        omega: w,
        kappa,
        kappa_formula: KAPPA_FORMULA,
        kappa_prose: KAPPA_PROSE,
        kappa_discrepancy,
        note: "omega carries the factor 1/2 of the boundary formula; the prose description of the \
               reduced form has coefficient 1. Both are reported, neither is normalized away."
            .into(),
    })
}

/// A point of the cylinder `U(1) x R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CylinderPoint {
    /// `c L mod 2 pi`.
    pub angle: f64,
    pub fiber: f64,
}

pub fn holonomy_quotient(datum: &Reduced2dDatum) -> CylinderPoint {
    CylinderPoint {
        angle: (datum.c * datum.length).rem_euclid(TAU),
        fiber: datum.c_dot,
    }
}

/// Shift by `k` windings: `c -> c + 2 pi k / L`.
pub fn wind(datum: &Reduced2dDatum, k: i64) -> Reduced2dDatum {
    Reduced2dDatum {
        c: datum.c + TAU * k as f64 / datum.length,
        ..*datum
    }
}

/// One row of the refinement sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub area: f64,
    pub perimeter: f64,
    pub slope: f64,
    pub residual: f64,
}

/// Line checks on disk fans with the given segment counts.
pub fn sweep(ns: &[usize], tol: &Tolerances) -> Result<Vec<SweepRow>> {
    ns.iter()
        .map(|&n| {
            let r = lagrangian_line_check(&builtin::disk(n)?, tol)?;
            Ok(SweepRow {
                n,
                area: r.area,
                perimeter: r.perimeter,
                slope: r.slope,
                residual: r.max_relative,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
