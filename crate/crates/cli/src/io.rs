//! JSON file formats. Every number is an exact rational written as a string.

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use watchtower_core::geom::{format_scalar, parse_scalar, Scalar};
use watchtower_core::mesh::{ImpreciseMesh2_5D, UncertainVertex2_5D};
use watchtower_core::terrain::{ImpreciseTerrain1D, UncertainVertex1D};

/// Serialized as its canonical `p/q` string; read from a string or a JSON integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rational(pub Scalar);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational number as a string such as \"3/2\", or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                parse_scalar(v).map(Rational).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational(Scalar::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational(Scalar::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, _: f64) -> Result<Rational, E> {
                Err(E::custom("binary floats are not accepted; quote the number"))
            }
        }
        d.deserialize_any(V)
    }
}

impl From<&Scalar> for Rational {
    fn from(v: &Scalar) -> Self {
        Rational(v.clone())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerrainVertexJson {
    x: Rational,
    low: Rational,
    high: Rational,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerrainJson {
    vertices: Vec<TerrainVertexJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshVertexJson {
    x: Rational,
    y: Rational,
    low: Rational,
    high: Rational,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshJson {
    vertices: Vec<MeshVertexJson>,
    triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Clone)]
pub enum Instance {
    Terrain(ImpreciseTerrain1D),
    Mesh(ImpreciseMesh2_5D),
}

pub fn terrain_from_json(text: &str) -> Result<ImpreciseTerrain1D> {
    let raw: TerrainJson = serde_json::from_str(text).context("malformed terrain JSON")?;
    let vertices = raw
        .vertices
        .into_iter()
        .map(|v| UncertainVertex1D::new(v.x.0, v.low.0, v.high.0))
        .collect();
    ImpreciseTerrain1D::new(vertices).context("invalid terrain")
}

pub fn mesh_from_json(text: &str) -> Result<ImpreciseMesh2_5D> {
    let raw: MeshJson = serde_json::from_str(text).context("malformed mesh JSON")?;
    let vertices = raw
        .vertices
        .into_iter()
        .map(|v| UncertainVertex2_5D::new(v.x.0, v.y.0, v.low.0, v.high.0))
        .collect();
    ImpreciseMesh2_5D::new(vertices, raw.triangles).context("invalid mesh")
}

pub fn terrain_to_json(terrain: &ImpreciseTerrain1D) -> String {
    let raw = TerrainJson {
        vertices: terrain
            .vertices()
            .iter()
            .map(|v| TerrainVertexJson {
                x: (&v.x).into(),
                low: (&v.low).into(),
                high: (&v.high).into(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}

pub fn mesh_to_json(mesh: &ImpreciseMesh2_5D) -> String {
    let raw = MeshJson {
        vertices: mesh
            .vertices()
            .iter()
            .map(|v| MeshVertexJson {
                x: (&v.x).into(),
                y: (&v.y).into(),
                low: (&v.low).into(),
                high: (&v.high).into(),
            })
            .collect(),
        triangles: mesh.triangles().to_vec(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn parse_terrain_1d(path: &Path) -> Result<ImpreciseTerrain1D> {
    terrain_from_json(&read_text(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn parse_mesh(path: &Path) -> Result<ImpreciseMesh2_5D> {
    mesh_from_json(&read_text(path)?).with_context(|| format!("in {}", path.display()))
}

/// A terrain or a mesh, told apart by the presence of `triangles`.
pub fn parse_instance(path: &Path) -> Result<Instance> {
    let text = read_text(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))?;
    let Some(obj) = value.as_object() else {
        bail!("{}: expected a JSON object", path.display());
    };
    let instance = if obj.contains_key("triangles") {
        Instance::Mesh(mesh_from_json(&text)?)
    } else {
        Instance::Terrain(terrain_from_json(&text)?)
    };
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use watchtower_core::geom::frac;

    #[test]
    fn rational_strings() {
        let t = terrain_from_json(r#"{"vertices":[{"x":"0","low":"0","high":"1"},{"x":"1/3","low":0,"high":"1.5"}]}"#)
            .unwrap();
        assert_eq!(t.vertex(1).x, frac(1, 3));
        assert_eq!(t.vertex(1).high, frac(3, 2));
        assert!(terrain_from_json(r#"{"vertices":[{"x":0.5,"low":"0","high":"1"}]}"#).is_err());
    }

    #[test]
    fn validation_errors() {
        let decreasing = r#"{"vertices":[{"x":"1","low":"0","high":"1"},{"x":"0","low":"0","high":"1"}]}"#;
        assert!(terrain_from_json(decreasing).is_err());
        let inverted = r#"{"vertices":[{"x":"0","low":"2","high":"1"},{"x":"1","low":"0","high":"1"}]}"#;
        assert!(terrain_from_json(inverted).is_err());
        let extra = r#"{"vertices":[{"x":"0","low":"0","high":"1","z":"3"}]}"#;
        assert!(terrain_from_json(extra).is_err());
    }
}
