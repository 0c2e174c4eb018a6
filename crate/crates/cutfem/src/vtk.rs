//! Legacy ASCII VTK unstructured grids.

use std::fmt::Write as _;

use cutfem_core::geometry::{ActiveMeshData, LevelSetFrame};
use cutfem_core::mesh::BackgroundMesh;

const VTK_TRIANGLE: u8 = 5;

pub enum Field<'a> {
    Scalars(&'a str, &'a [f64]),
    Markers(&'a str, &'a [u8]),
}

/// Mesh with optional point and cell fields.
pub fn render(mesh: &BackgroundMesh, title: &str, point_data: &[Field<'_>], cell_data: &[Field<'_>]) -> String {
    let nv = mesh.num_vertices();
    let ne = mesh.num_elements();
    let mut out = String::with_capacity(64 * (nv + ne));
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str(&title.replace('\n', " "));
    out.push_str("\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {nv} double");
    for p in &mesh.vertices {
        let _ = writeln!(out, "{:e} {:e} 0", p[0], p[1]);
    }
    let _ = writeln!(out, "CELLS {ne} {}", 4 * ne);
    for t in &mesh.elements {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "CELL_TYPES {ne}");
    for _ in 0..ne {
        let _ = writeln!(out, "{VTK_TRIANGLE}");
    }
    write_fields(&mut out, "POINT_DATA", nv, point_data);
    write_fields(&mut out, "CELL_DATA", ne, cell_data);
    out
}

fn write_fields(out: &mut String, section: &str, n: usize, fields: &[Field<'_>]) {
    if fields.is_empty() {
        return;
    }
    let _ = writeln!(out, "{section} {n}");
    for field in fields {
        match field {
            Field::Scalars(name, values) => {
                assert_eq!(values.len(), n, "field `{name}` has the wrong length");
                let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                for v in *values {
                    let _ = writeln!(out, "{v:e}");
                }
            }
            Field::Markers(name, values) => {
                assert_eq!(values.len(), n, "field `{name}` has the wrong length");
                let _ = writeln!(out, "SCALARS {name} int 1\nLOOKUP_TABLE default");
                for v in *values {
                    let _ = writeln!(out, "{v}");
                }
            }
        }
    }
}

/// Snapshot of one time level: `u_h` and `phi_h` at the vertices, physical,
/// strip and active markers on the elements.
pub fn snapshot(
    mesh: &BackgroundMesh,
    frame: &LevelSetFrame,
    active: &ActiveMeshData,
    solution: &[f64],
    title: &str,
) -> String {
    let physical: Vec<u8> = frame.classification.iter().map(|c| u8::from(c.is_physical())).collect();
    let strip: Vec<u8> = active.is_strip.iter().map(|&b| u8::from(b)).collect();
    let on: Vec<u8> = active.is_active.iter().map(|&b| u8::from(b)).collect();
    render(
        mesh,
        title,
        &[Field::Scalars("u_h", solution), Field::Scalars("phi_h", &frame.nodal_values)],
        &[
            Field::Markers("physical", &physical),
            Field::Markers("strip", &strip),
            Field::Markers("active", &on),
        ],
    )
}
