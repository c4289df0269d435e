//! OBJ meshes (v/vn/f records, 1-based indices, triangles only) and ascii
//! PLY point clouds (x y z, optional nx ny nz). Coordinates are written with
//! Rust's shortest round-trip float formatting, so save/load is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::Vector3;

use super::{GeometryError, PointCloud, TriMesh};

fn io_err(path: &Path, source: std::io::Error) -> GeometryError {
    GeometryError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> GeometryError {
    GeometryError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

pub fn save_mesh(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<(), GeometryError> {
    let path = path.as_ref();
    let mut out = String::new();
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z).expect("string write");
    }
    if let Some(normals) = &mesh.normals {
        for n in normals {
            writeln!(out, "vn {} {} {}", n.x, n.y, n.z).expect("string write");
        }
    }
    for f in &mesh.faces {
        if mesh.normals.is_some() {
            writeln!(out, "f {0}//{0} {1}//{1} {2}//{2}", f[0] + 1, f[1] + 1, f[2] + 1)
                .expect("string write");
        } else {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).expect("string write");
        }
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh, GeometryError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut raw_normals: Vec<Vector3<f64>> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    // vertex index -> normal index, from f records like "3//7"
    let mut normal_of_vertex: Vec<Option<usize>> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let keyword = parts.next().unwrap();
        match keyword {
            "v" | "vn" => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    let tok = parts
                        .next()
                        .ok_or_else(|| parse_err(path, lineno, format!("{keyword} record needs 3 coordinates")))?;
                    *c = tok.parse().map_err(|_| {
                        parse_err(path, lineno, format!("bad coordinate `{tok}`"))
                    })?;
                }
                let v = Vector3::new(coords[0], coords[1], coords[2]);
                if keyword == "v" {
                    vertices.push(v);
                    normal_of_vertex.push(None);
                } else {
                    raw_normals.push(v);
                }
            }
            "f" => {
                let corners: Vec<&str> = parts.collect();
                if corners.len() != 3 {
                    return Err(parse_err(
                        path,
                        lineno,
                        format!("face has {} corners, only triangles are supported", corners.len()),
                    ));
                }
                let mut face = [0usize; 3];
                for (slot, corner) in face.iter_mut().zip(&corners) {
                    // "i", "i/t", "i//n" or "i/t/n"; indices are 1-based.
                    let mut fields = corner.split('/');
                    let vtok = fields.next().unwrap();
                    let vidx: usize = vtok.parse().map_err(|_| {
                        parse_err(path, lineno, format!("bad vertex index `{vtok}`"))
                    })?;
                    if vidx == 0 || vidx > vertices.len() {
                        return Err(parse_err(
                            path,
                            lineno,
                            format!("vertex index {vidx} out of range"),
                        ));
                    }
                    *slot = vidx - 1;
                    let _texture = fields.next();
                    if let Some(ntok) = fields.next() {
                        if !ntok.is_empty() {
                            let nidx: usize = ntok.parse().map_err(|_| {
                                parse_err(path, lineno, format!("bad normal index `{ntok}`"))
                            })?;
                            if nidx == 0 {
                                return Err(parse_err(path, lineno, "normal index 0"));
                            }
                            normal_of_vertex[vidx - 1] = Some(nidx - 1);
                        }
                    }
                }
                faces.push(face);
            }
            // Grouping/material records are legal OBJ; skip them.
            "vt" | "o" | "g" | "s" | "usemtl" | "mtllib" => {}
            other => {
                return Err(parse_err(path, lineno, format!("unknown record `{other}`")));
            }
        }
    }

    let mut mesh = TriMesh::new(vertices, faces)?;
    // Per-vertex normals only when every vertex got a resolvable one.
    if !raw_normals.is_empty() {
        let assigned: Option<Vec<Vector3<f64>>> = normal_of_vertex
            .iter()
            .map(|slot| slot.and_then(|n| raw_normals.get(n).copied()))
            .collect();
        if let Some(normals) = assigned {
            mesh.normals = Some(normals);
            mesh.validate()?;
        }
    }
    Ok(mesh)
}

pub fn save_cloud(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<(), GeometryError> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    writeln!(out, "element vertex {}", cloud.points.len()).expect("string write");
    out.push_str("property float x\nproperty float y\nproperty float z\n");
    if cloud.normals.is_some() {
        out.push_str("property float nx\nproperty float ny\nproperty float nz\n");
    }
    out.push_str("end_header\n");
    for (i, p) in cloud.points.iter().enumerate() {
        match &cloud.normals {
            Some(ns) => {
                let n = ns[i];
                writeln!(out, "{} {} {} {} {} {}", p.x, p.y, p.z, n.x, n.y, n.z)
                    .expect("string write");
            }
            None => writeln!(out, "{} {} {}", p.x, p.y, p.z).expect("string write"),
        }
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn load_cloud(path: impl AsRef<Path>) -> Result<PointCloud, GeometryError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, magic) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if magic.trim() != "ply" {
        return Err(parse_err(path, 1, "missing `ply` magic"));
    }

    let mut vertex_count: Option<usize> = None;
    let mut properties: Vec<String> = Vec::new();
    let mut header_end = 0usize;
    for (lineno, line) in lines.by_ref() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line == "end_header" {
            header_end = lineno;
            break;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("format") => {
                if parts.next() != Some("ascii") {
                    return Err(parse_err(path, lineno, "only ascii PLY is supported"));
                }
            }
            Some("comment") | Some("ply") | None => {}
            Some("element") => {
                let kind = parts.next().unwrap_or("");
                if kind == "vertex" {
                    let count_tok = parts
                        .next()
                        .ok_or_else(|| parse_err(path, lineno, "element vertex needs a count"))?;
                    vertex_count = Some(count_tok.parse().map_err(|_| {
                        parse_err(path, lineno, format!("bad vertex count `{count_tok}`"))
                    })?);
                } else {
                    return Err(parse_err(path, lineno, format!("unsupported element `{kind}`")));
                }
            }
            Some("property") => {
                let _ty = parts.next();
                let name = parts
                    .next()
                    .ok_or_else(|| parse_err(path, lineno, "property needs a name"))?;
                properties.push(name.to_string());
            }
            Some(other) => {
                return Err(parse_err(path, lineno, format!("unknown header record `{other}`")));
            }
        }
    }
    if header_end == 0 {
        return Err(parse_err(path, 1, "missing end_header"));
    }
    let vertex_count =
        vertex_count.ok_or_else(|| parse_err(path, header_end, "missing element vertex"))?;
    let has_xyz = ["x", "y", "z"].iter().all(|p| properties.iter().any(|q| q == p));
    if !has_xyz {
        return Err(parse_err(path, header_end, "vertex element must carry x y z"));
    }
    let has_normals = ["nx", "ny", "nz"].iter().all(|p| properties.iter().any(|q| q == p));
    let col = |name: &str| properties.iter().position(|q| q == name).unwrap();
    let (cx, cy, cz) = (col("x"), col("y"), col("z"));

    let mut points = Vec::with_capacity(vertex_count);
    let mut normals = if has_normals {
        Some(Vec::with_capacity(vertex_count))
    } else {
        None
    };
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if points.len() == vertex_count {
            return Err(parse_err(path, lineno, "more rows than declared vertices"));
        }
        let values: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
        let values =
            values.map_err(|_| parse_err(path, lineno, format!("bad row `{line}`")))?;
        if values.len() != properties.len() {
            return Err(parse_err(
                path,
                lineno,
                format!("row has {} values, header declares {}", values.len(), properties.len()),
            ));
        }
        points.push(Vector3::new(values[cx], values[cy], values[cz]));
        if let Some(ns) = &mut normals {
            ns.push(Vector3::new(
                values[col("nx")],
                values[col("ny")],
                values[col("nz")],
            ));
        }
    }
    if points.len() != vertex_count {
        return Err(parse_err(
            path,
            header_end,
            format!("declared {} vertices, found {}", vertex_count, points.len()),
        ));
    }
    PointCloud::new(points, normals)
}
