//! CSV and JSON writers, geometry records and the output sink.

use std::io::Write;
use std::path::{Path, PathBuf};

use plategap_core::geometry::{Point, Shape};
use plategap_core::optimize::{DeltaScanRow, MinimaxReport};
use plategap_core::parity::SampledField;
use plategap_core::series::GapSeries;
use plategap_core::{Geometry, PlateConfig, Reinforcement};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};
use crate::tables::{TableReport, SCALE};

/// Where command output goes: always stdout, plus files when a directory
/// is given.
#[derive(Debug, Clone, Default)]
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    /// Sink writing files into `dir` (created on demand).
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    /// Writes `content` to `name` inside the output directory, if any.
    pub fn file(&self, name: &str, content: &str) -> AppResult<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| AppError::io(path, e))
    }
}

/// Writes a string to `out` (stdout in the binary).
pub fn emit(out: &mut dyn Write, content: &str) -> AppResult<()> {
    out.write_all(content.as_bytes())
        .map_err(|e| AppError::io("<stdout>", e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> AppResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_doc(header: &[&str], rows: Vec<Vec<String>>) -> AppResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| AppError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| AppError::Serialize(e.to_string()))
}

fn g(v: f64) -> String {
    format!("{v:e}")
}

fn scaled(v: f64) -> String {
    format!("{:.6}", v * SCALE)
}

/// `m, c_m` rows of a gap series.
pub fn series_csv(s: &GapSeries) -> AppResult<String> {
    let rows = s
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| vec![(i + 1).to_string(), g(*c)])
        .collect();
    csv_doc(&["m", "c_m"], rows)
}

/// `x, gap` rows of a sampled gap curve.
pub fn curve_csv(curve: &[(f64, f64)]) -> AppResult<String> {
    csv_doc(
        &["x", "gap"],
        curve.iter().map(|(x, v)| vec![g(*x), g(*v)]).collect(),
    )
}

/// `x, y, u` rows of a sampled solution.
pub fn field_csv(f: &SampledField) -> AppResult<String> {
    let mut rows = Vec::with_capacity(f.values.len());
    for (i, x) in f.xs.iter().enumerate() {
        for (j, y) in f.ys.iter().enumerate() {
            rows.push(vec![g(*x), g(*y), g(f.get(i, j))]);
        }
    }
    csv_doc(&["x", "y", "u"], rows)
}

/// Table values times `10^4` in display layout.
pub fn table_matrix_csv(t: &TableReport) -> AppResult<String> {
    let mut header = vec!["row"];
    header.extend(t.columns.iter().map(String::as_str));
    let rows = t
        .rows
        .iter()
        .zip(&t.values)
        .map(|(r, v)| {
            std::iter::once(r.clone())
                .chain(v.iter().map(|x| scaled(*x)))
                .collect()
        })
        .collect();
    csv_doc(&header, rows)
}

/// Ratios to the empty row in display layout.
pub fn table_ratio_csv(t: &TableReport) -> AppResult<String> {
    let mut header = vec!["row"];
    header.extend(t.columns.iter().map(String::as_str));
    let rows = t
        .rows
        .iter()
        .zip(&t.values)
        .map(|(r, v)| {
            std::iter::once(r.clone())
                .chain(
                    v.iter()
                        .zip(&t.values[0])
                        .map(|(x, e)| format!("{:.6}", x / e)),
                )
                .collect()
        })
        .collect();
    csv_doc(&header, rows)
}

/// One line per cell with computed value, reference and verdict.
pub fn table_diff_csv(t: &TableReport) -> AppResult<String> {
    let rows = t
        .comparison
        .cells
        .iter()
        .map(|c| {
            vec![
                t.table.clone(),
                c.row.clone(),
                c.column.clone(),
                format!("{:.6}", c.value_x1e4),
                format!("{:.6}", c.compared),
                format!("{}", c.reference),
                format!("{:.3e}", c.rel_diff),
                format!("{}", c.tolerance),
                c.status.clone(),
            ]
        })
        .collect();
    csv_doc(
        &[
            "table",
            "row",
            "column",
            "value_x1e4",
            "compared",
            "reference",
            "rel_diff",
            "tolerance",
            "status",
        ],
        rows,
    )
}

/// One line per matrix cell.
pub fn minimax_csv(r: &MinimaxReport) -> AppResult<String> {
    let mut rows = Vec::new();
    for (i, d) in r.reinforcements.iter().enumerate() {
        for (j, f) in r.forces.iter().enumerate() {
            let (v, a, e) = (r.values[i][j], r.argmax[i][j], r.errors[i][j].clone());
            let mark = if i == r.best_reinforcement && j == r.best_force {
                "optimum"
            } else if j == r.worst_force[i] {
                "row-max"
            } else {
                ""
            };
            rows.push(vec![
                d.clone(),
                f.clone(),
                v.map(scaled).unwrap_or_default(),
                a.map(g).unwrap_or_default(),
                mark.to_string(),
                e.unwrap_or_default(),
            ]);
        }
    }
    csv_doc(
        &[
            "reinforcement",
            "force",
            "value_x1e4",
            "argmax",
            "mark",
            "error",
        ],
        rows,
    )
}

/// `z`, both maximal gaps times `10^4`, and the argmax.
pub fn scan_csv(rows: &[DeltaScanRow]) -> AppResult<String> {
    let rows = rows
        .iter()
        .map(|r| vec![g(r.z), scaled(r.normalized), scaled(r.raw), g(r.argmax)])
        .collect();
    csv_doc(&["z", "normalized_x1e4", "raw_x1e4", "argmax"], rows)
}

/// An open disk of a geometry record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskRecord {
    /// Centre.
    pub center: Point,
    /// Radius.
    pub radius: f64,
}

/// Exchange form of a reinforcement: the tagged parameters plus the
/// lowered polygons (counter-clockwise) and disks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryRecord {
    /// Variant name.
    #[serde(rename = "type")]
    pub kind: String,
    /// Variant parameters.
    pub parameters: serde_json::Value,
    /// Polygon vertex lists.
    pub vertices: Vec<Vec<Point>>,
    /// Disks (rounded tube joints).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disks: Vec<DiskRecord>,
    /// Area of the region.
    #[serde(default)]
    pub area: f64,
    /// Mirror symmetry in `y`.
    #[serde(default)]
    pub symmetric: bool,
}

/// Builds the record of a geometry.
pub fn geometry_record(geom: &Geometry) -> AppResult<GeometryRecord> {
    let tagged = serde_json::to_value(geom.reinforcement())?;
    let (kind, parameters) = match tagged {
        serde_json::Value::String(s) => (s, serde_json::Value::Null),
        serde_json::Value::Object(m) if m.len() == 1 => {
            let (k, v) = m.into_iter().next().expect("one entry");
            (k, v)
        }
        other => {
            return Err(AppError::Serialize(format!(
                "unexpected reinforcement encoding {other}"
            )))
        }
    };
    let mut vertices = Vec::new();
    let mut disks = Vec::new();
    for s in geom.shapes() {
        match s {
            Shape::Polygon(v) => vertices.push(v.clone()),
            Shape::Disk { center, radius } => disks.push(DiskRecord {
                center: *center,
                radius: *radius,
            }),
        }
    }
    Ok(GeometryRecord {
        kind,
        parameters,
        vertices,
        disks,
        area: geom.area(),
        symmetric: geom.is_symmetric(),
    })
}

/// Rebuilds a reinforcement from a record: from its tagged parameters
/// when they parse, as a polygon union of its vertices otherwise.
pub fn reinforcement_from_record(r: &GeometryRecord) -> Reinforcement {
    let tagged = if r.parameters.is_null() {
        serde_json::Value::String(r.kind.clone())
    } else {
        serde_json::json!({ r.kind.clone(): r.parameters.clone() })
    };
    serde_json::from_value(tagged)
        .unwrap_or_else(|_| Reinforcement::PolygonUnion(r.vertices.clone()))
}

/// Reads a reinforcement file holding either a geometry record or a bare
/// tagged reinforcement.
pub fn read_reinforcement(path: &Path) -> AppResult<Reinforcement> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let located = |e: serde_json::Error| {
        AppError::spec(
            "reinforcement",
            &path.display().to_string(),
            format!("line {}, column {}: {e}", e.line(), e.column()),
        )
    };
    let v: serde_json::Value = serde_json::from_str(&text).map_err(located)?;
    if v.get("type").is_some() {
        let rec: GeometryRecord = serde_json::from_value(v).map_err(located)?;
        return Ok(reinforcement_from_record(&rec));
    }
    serde_json::from_value(v).map_err(located)
}

/// Validates a reinforcement for a plate and lowers it.
pub fn geometry(r: Reinforcement, cfg: &PlateConfig) -> AppResult<Geometry> {
    Ok(Geometry::new(r, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use plategap_core::geometry::TrussPreset;

    #[test]
    fn records_round_trip() {
        let cfg = PlateConfig::preset();
        for r in [
            Reinforcement::Empty,
            Reinforcement::cross_n(2, 0.3, 0.01),
            Reinforcement::truss(TrussPreset::Hexagons, &cfg),
        ] {
            let geom = Geometry::new(r.clone(), &cfg).unwrap();
            let rec = geometry_record(&geom).unwrap();
            let text = serde_json::to_string(&rec).unwrap();
            let back: GeometryRecord = serde_json::from_str(&text).unwrap();
            assert_eq!(reinforcement_from_record(&back), r);
            assert!((rec.area - geom.area()).abs() < 1e-15);
        }
    }

    #[test]
    fn unknown_type_falls_back_to_polygons() {
        let rec = GeometryRecord {
            kind: "Custom".into(),
            parameters: serde_json::json!({"foo": 1}),
            vertices: vec![vec![[1.0, -0.01], [1.2, -0.01], [1.2, 0.01], [1.0, 0.01]]],
            disks: vec![],
            area: 0.0,
            symmetric: true,
        };
        assert!(
            matches!(reinforcement_from_record(&rec), Reinforcement::PolygonUnion(v) if v.len() == 1)
        );
    }

    #[test]
    fn series_csv_layout() {
        let s = GapSeries::new(vec![0.5, -0.25], 0.0);
        assert_eq!(series_csv(&s).unwrap(), "m,c_m\n1,5e-1\n2,-2.5e-1\n");
    }
}
