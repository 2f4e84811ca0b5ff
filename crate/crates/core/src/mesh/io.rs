//! OFF / OBJ / ascii PLY readers and an OFF writer.
//!
//! Only positions and face connectivity are read; normals, texture
//! coordinates, colors and any other attributes are skipped.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Point3;

use super::{MeshError, SurfaceTessellation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
    Ply,
}

impl MeshFormat {
    /// Guess the format from a file extension (case-insensitive).
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "off" => Some(Self::Off),
            "obj" => Some(Self::Obj),
            "ply" => Some(Self::Ply),
            _ => None,
        }
    }
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<SurfaceTessellation, MeshError> {
    let text = fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
        MeshFormat::Ply => parse_ply(&text),
    }
}

/// [`load_mesh`] with the format taken from the file extension.
pub fn load_mesh_auto(path: &Path) -> Result<SurfaceTessellation, MeshError> {
    let format = MeshFormat::from_path(path).ok_or_else(|| MeshError::Parse {
        line: 0,
        message: format!("unknown mesh extension: {}", path.display()),
    })?;
    load_mesh(path, format)
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, MeshError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what}: {tok:?}")))
}

/// Non-empty, comment-stripped lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse_off(text: &str) -> Result<SurfaceTessellation, MeshError> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("OFF") {
        return Err(parse_err(ln, "missing OFF header"));
    }
    let rest: Vec<&str> = toks.collect();
    let counts: Vec<&str> = if rest.is_empty() {
        let (_, l) = lines.next().ok_or_else(|| parse_err(ln, "missing counts"))?;
        l.split_whitespace().collect()
    } else {
        rest
    };
    let nv: usize = number(counts.first().copied(), ln, "vertex count")?;
    let nf: usize = number(counts.get(1).copied(), ln, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of vertices"))?;
        let mut t = l.split_whitespace();
        let x = number(t.next(), ln, "x")?;
        let y = number(t.next(), ln, "y")?;
        let z = number(t.next(), ln, "z")?;
        vertices.push(Point3::new(x, y, z));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of faces"))?;
        let mut t = l.split_whitespace();
        let k: usize = number(t.next(), ln, "face size")?;
        let face = (0..k)
            .map(|_| number::<usize>(t.next(), ln, "face index"))
            .collect::<Result<Vec<_>, _>>()?;
        faces.push(face);
    }
    SurfaceTessellation::new(vertices, faces)
}

pub fn parse_obj(text: &str) -> Result<SurfaceTessellation, MeshError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (ln, l) in content_lines(text) {
        let mut t = l.split_whitespace();
        match t.next() {
            Some("v") => {
                let x = number(t.next(), ln, "x")?;
                let y = number(t.next(), ln, "y")?;
                let z = number(t.next(), ln, "z")?;
                vertices.push(Point3::new(x, y, z));
            }
            Some("f") => {
                let mut face = Vec::new();
                for tok in t {
                    let idx: i64 = number(tok.split('/').next(), ln, "face index")?;
                    let resolved = match idx {
                        i if i > 0 => i - 1,
                        i if i < 0 => vertices.len() as i64 + i,
                        _ => return Err(parse_err(ln, "face index 0")),
                    };
                    if resolved < 0 {
                        return Err(parse_err(ln, format!("face index {idx} out of range")));
                    }
                    face.push(resolved as usize);
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    SurfaceTessellation::new(vertices, faces)
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
    face_list: Option<usize>,
}

pub fn parse_ply(text: &str) -> Result<SurfaceTessellation, MeshError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(parse_err(1, "missing ply magic")),
    }
    let mut elements: Vec<PlyElement> = Vec::new();
    loop {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, "unterminated header"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        match t.as_slice() {
            ["format", "ascii", ..] => {}
            ["format", other, ..] => return Err(parse_err(ln, format!("unsupported PLY format {other}"))),
            ["element", name, count] => elements.push(PlyElement {
                name: name.to_string(),
                count: number(Some(count), ln, "element count")?,
                properties: Vec::new(),
                face_list: None,
            }),
            ["property", "list", _, _, name] => {
                let el = elements.last_mut().ok_or_else(|| parse_err(ln, "property outside element"))?;
                if *name == "vertex_indices" || *name == "vertex_index" {
                    el.face_list = Some(el.properties.len());
                }
                el.properties.push(name.to_string());
            }
            ["property", _, name] => {
                let el = elements.last_mut().ok_or_else(|| parse_err(ln, "property outside element"))?;
                el.properties.push(name.to_string());
            }
            ["end_header"] => break,
            _ => {}
        }
    }

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut data = lines.filter(|(_, l)| !l.is_empty());
    for el in &elements {
        for _ in 0..el.count {
            let (ln, l) = data
                .next()
                .ok_or_else(|| parse_err(0, format!("unexpected end of {} data", el.name)))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if el.name == "vertex" {
                let col = |axis: &str| -> Result<f64, MeshError> {
                    let i = el
                        .properties
                        .iter()
                        .position(|p| p == axis)
                        .ok_or_else(|| parse_err(ln, format!("vertex has no {axis} property")))?;
                    number(toks.get(i).copied(), ln, axis)
                };
                vertices.push(Point3::new(col("x")?, col("y")?, col("z")?));
            } else if el.name == "face" {
                // list properties shift the token column of anything after
                // them, so walk the properties in order
                let mut pos = 0;
                let mut face = None;
                for (pi, _) in el.properties.iter().enumerate() {
                    if Some(pi) == el.face_list {
                        let k: usize = number(toks.get(pos).copied(), ln, "face size")?;
                        let idx = (0..k)
                            .map(|j| number::<usize>(toks.get(pos + 1 + j).copied(), ln, "face index"))
                            .collect::<Result<Vec<_>, _>>()?;
                        pos += k + 1;
                        face = Some(idx);
                    } else {
                        pos += 1;
                    }
                }
                faces.push(face.ok_or_else(|| parse_err(ln, "face element without vertex_indices"))?);
            }
        }
    }
    SurfaceTessellation::new(vertices, faces)
}

/// Writes `mesh` as OFF with round-trip exact coordinates.
pub fn write_off<W: Write>(mut w: W, mesh: &SurfaceTessellation) -> std::io::Result<()> {
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} {}", mesh.num_vertices(), mesh.num_faces(), mesh.num_edges())?;
    for p in mesh.vertices() {
        writeln!(w, "{:?} {:?} {:?}", p.x, p.y, p.z)?;
    }
    for f in mesh.faces() {
        write!(w, "{}", f.len())?;
        for v in f {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    const CUBE_OFF: &str = "OFF\n# unit cube\n8 6 12\n\
        0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n\
        4 0 3 2 1\n4 4 5 6 7\n4 0 1 5 4\n4 1 2 6 5\n4 2 3 7 6\n4 3 0 4 7\n";

    #[test]
    fn off_cube() {
        let m = parse_off(CUBE_OFF).unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces()), (8, 12, 6));
        assert!(m.is_closed());
    }

    #[test]
    fn off_single_triangle_and_inline_counts() {
        let m = parse_off("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").unwrap();
        assert_eq!(m.num_edges(), 3);
        assert!(m.boundary_flags().iter().all(|&b| b));
    }

    #[test]
    fn off_non_manifold() {
        let text = "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
        assert!(matches!(parse_off(text), Err(MeshError::NonManifold(0, 1))));
    }

    #[test]
    fn off_malformed() {
        assert!(matches!(parse_off("OFF\n3 1 0\n0 0 0\n1 0\n"), Err(MeshError::Parse { .. })));
        assert!(matches!(parse_off("PLY\n"), Err(MeshError::Parse { .. })));
        assert!(matches!(parse_off("OFF\n0 0 0\n"), Err(MeshError::EmptyMesh)));
    }

    #[test]
    fn obj_matches_off() {
        let obj = "# cube\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
            vn 0 0 1\nf 1//1 4//1 3//1 2//1\nf 5 6 7 8\nf 1/1 2/1 6/1 5/1\nf 2 3 7 6\nf -6 -5 -1 -2\nf 4 1 5 8\n";
        let a = parse_obj(obj).unwrap();
        let b = parse_off(CUBE_OFF).unwrap();
        assert_eq!(a.faces(), b.faces());
        assert_eq!(a.edges(), b.edges());
        for (p, q) in a.vertices().iter().zip(b.vertices()) {
            assert!((p - q).norm() < 1e-9);
        }
    }

    #[test]
    fn ply_ascii() {
        let ply = "ply\nformat ascii 1.0\ncomment x\nelement vertex 4\nproperty float x\nproperty float y\n\
            property float z\nproperty uchar red\nelement face 2\nproperty uchar flags\n\
            property list uchar int vertex_indices\nend_header\n\
            0 0 0 255\n1 0 0 255\n1 1 0 255\n0 1 0 255\n7 3 0 1 2\n7 3 0 2 3\n";
        let m = parse_ply(ply).unwrap();
        assert_eq!(m.faces(), &[vec![0, 1, 2], vec![0, 2, 3]]);
        assert_eq!(m.surface_area(), 1.0);
        let bin = "ply\nformat binary_little_endian 1.0\nend_header\n";
        assert!(matches!(parse_ply(bin), Err(MeshError::Parse { .. })));
    }

    #[test]
    fn off_write_round_trip() {
        let m = shapes::icosphere(1.7, 2);
        let mut buf = Vec::new();
        write_off(&mut buf, &m).unwrap();
        let back = parse_off(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.faces(), m.faces());
    }

    #[test]
    fn load_from_disk_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cube.OFF");
        std::fs::write(&path, CUBE_OFF).unwrap();
        assert_eq!(load_mesh_auto(&path).unwrap().num_faces(), 6);
        assert!(load_mesh_auto(&dir.path().join("cube.stl")).is_err());
    }
}
