//! Solver output and the certificate check behind `validate`.

use anyhow::{bail, ensure, Result};
use serde::{Deserialize, Serialize};

use watchtower_core::geom::{format_decimal, format_scalar, Point2, Scalar};
use watchtower_core::mesh::{ImpreciseMesh2_5D, Realization2_5D, Viewpoint2_5D};
use watchtower_core::terrain::{ImpreciseTerrain1D, Realization1D, Tower1D};
use watchtower_core::watchtower1d::{validate_certificate, Solution1D};
use watchtower_core::watchtower25d::{validate_certificate_2_5d, TowerSolution2_5D};

use crate::io::{Instance, Rational};

/// Significant digits of the decimal rendering.
pub const DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Discrete1d,
    Continuous1d,
    Zero2_5d,
    Approx2_5d,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub x: Rational,
    pub y: Rational,
}

impl From<&Point2> for PointJson {
    fn from(p: &Point2) -> Self {
        PointJson {
            x: (&p.x).into(),
            y: (&p.y).into(),
        }
    }
}

impl PointJson {
    fn point(&self) -> Point2 {
        Point2::new(self.x.0.clone(), self.y.0.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerJson {
    pub base: PointJson,
    pub top: PointJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewpointJson {
    pub base_vertex: usize,
    pub tower_height: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveReport {
    pub problem: Problem,
    pub height: Rational,
    pub height_decimal: String,
    pub realization: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viewpoint: Option<ViewpointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl SolveReport {
    pub fn from_1d(problem: Problem, s: &Solution1D) -> Self {
        SolveReport {
            problem,
            height: (&s.height).into(),
            height_decimal: format_decimal(&s.height, DECIMAL_DIGITS),
            realization: s.realization.heights().map(Rational::from).collect(),
            tower: Some(TowerJson {
                base: (&s.tower.base).into(),
                top: (&s.tower.top).into(),
            }),
            viewpoint: None,
            candidate: Some(s.candidate_kind.to_string()),
            epsilon: None,
            timing_ms: None,
        }
    }

    pub fn from_2_5d(problem: Problem, s: &TowerSolution2_5D, epsilon: Option<&Scalar>) -> Self {
        SolveReport {
            problem,
            height: s.height().into(),
            height_decimal: format_decimal(s.height(), DECIMAL_DIGITS),
            realization: s.realization.z.iter().map(Rational::from).collect(),
            tower: None,
            viewpoint: Some(ViewpointJson {
                base_vertex: s.viewpoint.base_vertex,
                tower_height: s.height().into(),
            }),
            candidate: None,
            epsilon: epsilon.map(Rational::from),
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Human-readable form: fraction, decimal, then the certificate.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n{}\n", format_scalar(&self.height.0), self.height_decimal);
        let heights: Vec<String> = self.realization.iter().map(|z| format_scalar(&z.0)).collect();
        out.push_str(&format!("realization {}\n", heights.join(" ")));
        if let Some(t) = &self.tower {
            out.push_str(&format!("base {}\ntop {}\n", t.base.point(), t.top.point()));
        }
        if let Some(v) = &self.viewpoint {
            out.push_str(&format!("vertex {}\n", v.base_vertex));
        }
        if let Some(c) = &self.candidate {
            out.push_str(&format!("candidate {c}\n"));
        }
        if let Some(ms) = self.timing_ms {
            out.push_str(&format!("time {ms:.3} ms\n"));
        }
        out
    }
}

fn check_1d(terrain: &ImpreciseTerrain1D, report: &SolveReport) -> Result<()> {
    ensure!(
        matches!(report.problem, Problem::Discrete1d | Problem::Continuous1d),
        "certificate is for a mesh problem"
    );
    let Some(t) = &report.tower else {
        bail!("certificate has no tower");
    };
    let heights = report.realization.iter().map(|z| z.0.clone()).collect();
    let realization = Realization1D::new(terrain, heights)?;
    let tower = Tower1D::new(t.base.point(), t.top.point());
    validate_certificate(terrain, &realization, &tower)?;
    ensure!(tower.height() == report.height.0, "stated height differs from the tower");
    if report.problem == Problem::Discrete1d {
        ensure!(
            terrain.vertices().iter().any(|v| v.x == tower.base.x),
            "discrete tower is not based at a vertex"
        );
    }
    Ok(())
}

fn check_2_5d(mesh: &ImpreciseMesh2_5D, report: &SolveReport) -> Result<()> {
    ensure!(
        matches!(report.problem, Problem::Zero2_5d | Problem::Approx2_5d),
        "certificate is for a terrain problem"
    );
    let Some(v) = &report.viewpoint else {
        bail!("certificate has no viewpoint");
    };
    ensure!(v.tower_height == report.height, "stated height differs from the viewpoint");
    if report.problem == Problem::Zero2_5d {
        ensure!(v.tower_height.0 == Scalar::from_integer(0.into()), "zero watchtower with a tower");
    }
    if let Some(eps) = &report.epsilon {
        ensure!((&v.tower_height.0 / &eps.0).is_integer(), "height is not a multiple of epsilon");
    }
    let realization = Realization2_5D::new(mesh, report.realization.iter().map(|z| z.0.clone()).collect())?;
    let solution = TowerSolution2_5D {
        viewpoint: Viewpoint2_5D::new(v.base_vertex, v.tower_height.0.clone()),
        realization,
    };
    ensure!(validate_certificate_2_5d(mesh, &solution)?, "viewpoint does not see every edge");
    Ok(())
}

/// `Ok` when the report is a valid certificate for the instance.
pub fn check_certificate(instance: &Instance, report: &SolveReport) -> Result<()> {
    match instance {
        Instance::Terrain(t) => check_1d(t, report),
        Instance::Mesh(m) => check_2_5d(m, report),
    }
}
