//! Regular-grid sampling and deterministic file writers.
//!
//! Grids are sampled x-fastest (index = ix + nx * (iy + ny * iz)). Floats are
//! written in scientific notation, which round-trips exactly, so repeated
//! exports of the same state are byte-identical and a parse-back recovers the
//! sampled values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use amhd::state::FieldRef;
use amhd::transform::p_parallel;
use amhd::{EquilibriumState, ScalarField, Vec3, VectorField};
use anyhow::{bail, ensure, Context, Result};

use crate::config::{ExportConfig, ExportFormat, GridConfig};

#[derive(Debug)]
enum FieldHandle {
    Scalar(&'static str, ScalarField<f64>),
    Vector(&'static str, VectorField<f64>),
}

impl FieldHandle {
    fn name(&self) -> &'static str {
        match self {
            FieldHandle::Scalar(name, _) => name,
            FieldHandle::Vector(name, _) => name,
        }
    }
}

#[derive(Debug)]
enum Column {
    Scalar(&'static str, Vec<f64>),
    Vector(&'static str, Vec<[f64; 3]>),
}

/// Every exportable field of the state, in a stable order; anisotropic
/// states gain the derived parallel pressure right after tau.
fn all_fields(state: &EquilibriumState<f64>) -> Vec<FieldHandle> {
    let mut out: Vec<FieldHandle> = state
        .fields()
        .into_iter()
        .map(|(name, field)| match field {
            FieldRef::Scalar(s) => FieldHandle::Scalar(name, s.clone()),
            FieldRef::Vector(v) => FieldHandle::Vector(name, v.clone()),
        })
        .collect();
    if let EquilibriumState::Anisotropic(s) = state {
        let pos = out
            .iter()
            .position(|h| h.name() == "tau")
            .map_or(out.len(), |i| i + 1);
        out.insert(pos, FieldHandle::Scalar("p_par", p_parallel(s)));
    }
    out
}

fn select_fields(state: &EquilibriumState<f64>, what: &str) -> Result<Vec<FieldHandle>> {
    let all = all_fields(state);
    if what == "all" {
        return Ok(all);
    }
    let available: Vec<&str> = all.iter().map(|h| h.name()).collect();
    let found: Vec<FieldHandle> = all.into_iter().filter(|h| h.name() == what).collect();
    ensure!(
        !found.is_empty(),
        "no field `{what}` on state kind `{}`; available: {}, all",
        state.kind(),
        available.join(", ")
    );
    Ok(found)
}

fn grid_points(grid: &GridConfig) -> Vec<Vec3<f64>> {
    let [nx, ny, nz] = grid.shape;
    let mut out = Vec::with_capacity(nx * ny * nz);
    for iz in 0..nz {
        for iy in 0..ny {
            for ix in 0..nx {
                out.push(Vec3::new(
                    grid.origin[0] + grid.spacing[0] * ix as f64,
                    grid.origin[1] + grid.spacing[1] * iy as f64,
                    grid.origin[2] + grid.spacing[2] * iz as f64,
                ));
            }
        }
    }
    out
}

fn sample_columns(fields: &[FieldHandle], points: &[Vec3<f64>]) -> Result<Vec<Column>> {
    fields
        .iter()
        .map(|handle| match handle {
            FieldHandle::Scalar(name, f) => {
                let mut vals = Vec::with_capacity(points.len());
                for (i, &p) in points.iter().enumerate() {
                    let v = f.value_at(p);
                    if !v.is_finite() {
                        bail!("non-finite sample for `{name}` at grid index {i}");
                    }
                    vals.push(v);
                }
                Ok(Column::Scalar(name, vals))
            }
            FieldHandle::Vector(name, f) => {
                let mut vals = Vec::with_capacity(points.len());
                for (i, &p) in points.iter().enumerate() {
                    let v = f.value_at(p);
                    if !v.is_finite() {
                        bail!("non-finite sample for `{name}` at grid index {i}");
                    }
                    vals.push(v.to_f64());
                }
                Ok(Column::Vector(name, vals))
            }
        })
        .collect()
}

fn render_vtk(grid: &GridConfig, columns: &[Column]) -> String {
    let [nx, ny, nz] = grid.shape;
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    s.push_str("anisotropic equilibrium fields\n");
    s.push_str("ASCII\n");
    s.push_str("DATASET STRUCTURED_POINTS\n");
    let _ = writeln!(s, "DIMENSIONS {nx} {ny} {nz}");
    let _ = writeln!(s, "ORIGIN {:e} {:e} {:e}", grid.origin[0], grid.origin[1], grid.origin[2]);
    let _ = writeln!(
        s,
        "SPACING {:e} {:e} {:e}",
        grid.spacing[0], grid.spacing[1], grid.spacing[2]
    );
    let _ = writeln!(s, "POINT_DATA {}", nx * ny * nz);
    for column in columns {
        match column {
            Column::Scalar(name, vals) => {
                let _ = writeln!(s, "SCALARS {name} double 1");
                s.push_str("LOOKUP_TABLE default\n");
                for v in vals {
                    let _ = writeln!(s, "{v:e}");
                }
            }
            Column::Vector(name, vals) => {
                let _ = writeln!(s, "VECTORS {name} double");
                for v in vals {
                    let _ = writeln!(s, "{:e} {:e} {:e}", v[0], v[1], v[2]);
                }
            }
        }
    }
    s
}

fn render_table(grid: &GridConfig, points: &[Vec3<f64>], columns: &[Column]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# grid {} {} {}", grid.shape[0], grid.shape[1], grid.shape[2]);
    let _ = writeln!(s, "# origin {:e} {:e} {:e}", grid.origin[0], grid.origin[1], grid.origin[2]);
    let _ = writeln!(
        s,
        "# spacing {:e} {:e} {:e}",
        grid.spacing[0], grid.spacing[1], grid.spacing[2]
    );
    s.push_str("# columns: x y z");
    for column in columns {
        match column {
            Column::Scalar(name, _) => {
                let _ = write!(s, " {name}");
            }
            Column::Vector(name, _) => {
                let _ = write!(s, " {name}_x {name}_y {name}_z");
            }
        }
    }
    s.push('\n');
    for (i, p) in points.iter().enumerate() {
        let _ = write!(s, "{:e} {:e} {:e}", p.x, p.y, p.z);
        for column in columns {
            match column {
                Column::Scalar(_, vals) => {
                    let _ = write!(s, " {:e}", vals[i]);
                }
                Column::Vector(_, vals) => {
                    let _ = write!(s, " {:e} {:e} {:e}", vals[i][0], vals[i][1], vals[i][2]);
                }
            }
        }
        s.push('\n');
    }
    s
}

pub fn write_export(
    state: &EquilibriumState<f64>,
    cfg: &ExportConfig,
    path: &Path,
) -> Result<()> {
    ensure!(
        cfg.grid.shape.iter().all(|&n| n >= 1),
        "grid shape must be at least 1 along every axis"
    );
    ensure!(
        cfg.grid.origin.iter().chain(cfg.grid.spacing.iter()).all(|v| v.is_finite()),
        "grid origin and spacing must be finite"
    );
    let fields = select_fields(state, &cfg.what)?;
    let points = grid_points(&cfg.grid);
    let columns = sample_columns(&fields, &points)?;
    let text = match cfg.format {
        ExportFormat::Vtk => render_vtk(&cfg.grid, &columns),
        ExportFormat::Table => render_table(&cfg.grid, &points, &columns),
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
