use nalgebra::Vector3;

use super::GeometryError;

/// Indexed triangle mesh. Topology (the face list) is shared verbatim between
/// a rig's neutral and all of its blendshapes, so two meshes of the same
/// subject are always comparable vertex by vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub faces: Vec<[usize; 3]>,
    pub normals: Option<Vec<Vector3<f64>>>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vector3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self, GeometryError> {
        let mesh = Self {
            vertices,
            faces,
            normals: None,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Checks the structural invariants: face indices in range and, when
    /// normals are stored, one unit-length normal per vertex.
    pub fn validate(&self) -> Result<(), GeometryError> {
        for (f, face) in self.faces.iter().enumerate() {
            for &i in face {
                if i >= self.vertices.len() {
                    return Err(GeometryError::FaceIndexOutOfRange {
                        face: f,
                        index: i,
                        count: self.vertices.len(),
                    });
                }
            }
        }
        if let Some(normals) = &self.normals {
            if normals.len() != self.vertices.len() {
                return Err(GeometryError::NormalCountMismatch {
                    normals: normals.len(),
                    points: self.vertices.len(),
                });
            }
            check_unit_normals(normals)?;
        }
        Ok(())
    }

    /// Flattens vertices into a single 3V vector (x0,y0,z0,x1,...), the layout
    /// used by the morphable-model basis and the blendshape delta matrix.
    pub fn stacked_vertices(&self) -> nalgebra::DVector<f64> {
        let mut out = nalgebra::DVector::zeros(3 * self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            out[3 * i] = v.x;
            out[3 * i + 1] = v.y;
            out[3 * i + 2] = v.z;
        }
        out
    }

    /// Rebuilds a mesh from a stacked 3V vector, reusing this mesh's topology.
    pub fn with_stacked_vertices(&self, stacked: &nalgebra::DVector<f64>) -> TriMesh {
        assert_eq!(stacked.len(), 3 * self.vertices.len());
        let vertices = (0..self.vertices.len())
            .map(|i| Vector3::new(stacked[3 * i], stacked[3 * i + 1], stacked[3 * i + 2]))
            .collect();
        TriMesh {
            vertices,
            faces: self.faces.clone(),
            normals: None,
        }
    }
}

/// Unordered set of 3D samples, optionally with unit normals. This is the
/// carrier for depth-camera scans and per-frame dense targets.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vector3<f64>>,
    pub normals: Option<Vec<Vector3<f64>>>,
}

impl PointCloud {
    pub fn new(
        points: Vec<Vector3<f64>>,
        normals: Option<Vec<Vector3<f64>>>,
    ) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyCloud);
        }
        if let Some(n) = &normals {
            if n.len() != points.len() {
                return Err(GeometryError::NormalCountMismatch {
                    normals: n.len(),
                    points: points.len(),
                });
            }
            check_unit_normals(n)?;
        }
        Ok(Self { points, normals })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cloud sampled at the mesh vertices, inheriting the mesh normals.
    pub fn from_mesh_vertices(mesh: &TriMesh) -> Result<Self, GeometryError> {
        Self::new(mesh.vertices.clone(), mesh.normals.clone())
    }
}

const UNIT_NORMAL_TOL: f64 = 1e-6;

fn check_unit_normals(normals: &[Vector3<f64>]) -> Result<(), GeometryError> {
    for (i, n) in normals.iter().enumerate() {
        let len = n.norm();
        if (len - 1.0).abs() > UNIT_NORMAL_TOL {
            return Err(GeometryError::NonUnitNormal {
                index: i,
                length: len,
            });
        }
    }
    Ok(())
}

/// Per-vertex normals as the area-weighted average of incident face normals.
///
/// Degenerate (zero-area) faces contribute nothing. A vertex with no
/// non-degenerate incident face falls back to (0,0,1); those vertex indices
/// are returned alongside the mesh so callers can diagnose bad inputs.
pub fn compute_vertex_normals(mesh: &TriMesh) -> Result<(TriMesh, Vec<usize>), GeometryError> {
    if mesh.faces.is_empty() {
        return Err(GeometryError::NoFaces);
    }
    mesh.validate()?;
    let mut accum = vec![Vector3::zeros(); mesh.vertices.len()];
    for face in &mesh.faces {
        let [a, b, c] = *face;
        let e1 = mesh.vertices[b] - mesh.vertices[a];
        let e2 = mesh.vertices[c] - mesh.vertices[a];
        // Cross product length is twice the face area, so accumulating the
        // raw cross product is exactly area weighting.
        let cross = e1.cross(&e2);
        accum[a] += cross;
        accum[b] += cross;
        accum[c] += cross;
    }
    let mut fallback = Vec::new();
    let normals = accum
        .into_iter()
        .enumerate()
        .map(|(i, n)| {
            let len = n.norm();
            if len <= f64::MIN_POSITIVE.sqrt() {
                fallback.push(i);
                Vector3::new(0.0, 0.0, 1.0)
            } else {
                n / len
            }
        })
        .collect();
    let mut out = mesh.clone();
    out.normals = Some(normals);
    Ok((out, fallback))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_cube() -> TriMesh {
        // 8 corners, 12 triangles, outward orientation.
        let p = |x: f64, y: f64, z: f64| Vector3::new(x, y, z);
        let vertices = vec![
            p(0., 0., 0.),
            p(1., 0., 0.),
            p(1., 1., 0.),
            p(0., 1., 0.),
            p(0., 0., 1.),
            p(1., 0., 1.),
            p(1., 1., 1.),
            p(0., 1., 1.),
        ];
        let faces = vec![
            [0, 2, 1],
            [0, 3, 2], // bottom (z=0, normal -z)
            [4, 5, 6],
            [4, 6, 7], // top
            [0, 1, 5],
            [0, 5, 4], // front (y=0)
            [2, 3, 7],
            [2, 7, 6], // back
            [1, 2, 6],
            [1, 6, 5], // right
            [3, 0, 4],
            [3, 4, 7], // left
        ];
        TriMesh::new(vertices, faces).unwrap()
    }

    #[test]
    fn cube_corner_normals_are_diagonal() {
        let (mesh, fallback) = compute_vertex_normals(&unit_cube()).unwrap();
        assert!(fallback.is_empty());
        let normals = mesh.normals.unwrap();
        for (v, n) in mesh.vertices.iter().zip(&normals) {
            let expected = (v - Vector3::new(0.5, 0.5, 0.5)).normalize();
            assert_relative_eq!(n, &expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_triangle_normals_are_planar() {
        let mesh = TriMesh::new(
            vec![
                Vector3::new(0., 0., 0.),
                Vector3::new(1., 0., 0.),
                Vector3::new(0., 1., 0.),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let (mesh, fallback) = compute_vertex_normals(&mesh).unwrap();
        assert!(fallback.is_empty());
        for n in mesh.normals.unwrap() {
            assert_relative_eq!(n, Vector3::new(0., 0., 1.), epsilon = 1e-15);
        }
    }

    #[test]
    fn degenerate_face_yields_fallback_normal() {
        let mesh = TriMesh::new(
            vec![
                Vector3::new(0., 0., 0.),
                Vector3::new(1., 0., 0.),
                Vector3::new(2., 0., 0.),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let (mesh, fallback) = compute_vertex_normals(&mesh).unwrap();
        assert_eq!(fallback, vec![0, 1, 2]);
        for n in mesh.normals.unwrap() {
            assert_eq!(n, Vector3::new(0., 0., 1.));
        }
    }

    #[test]
    fn no_faces_is_an_error() {
        let mesh = TriMesh::new(vec![Vector3::zeros()], vec![]).unwrap();
        assert!(matches!(
            compute_vertex_normals(&mesh),
            Err(GeometryError::NoFaces)
        ));
    }

    #[test]
    fn face_index_out_of_range_rejected() {
        let r = TriMesh::new(vec![Vector3::zeros()], vec![[0, 0, 1]]);
        assert!(matches!(r, Err(GeometryError::FaceIndexOutOfRange { .. })));
    }

    #[test]
    fn normals_invariant_under_uniform_scaling() {
        let mesh = unit_cube();
        let scaled = TriMesh::new(
            mesh.vertices.iter().map(|v| v * 37.5).collect(),
            mesh.faces.clone(),
        )
        .unwrap();
        let (a, _) = compute_vertex_normals(&mesh).unwrap();
        let (b, _) = compute_vertex_normals(&scaled).unwrap();
        for (na, nb) in a.normals.unwrap().iter().zip(b.normals.unwrap().iter()) {
            assert_relative_eq!(na, nb, epsilon = 1e-12);
        }
    }

    #[test]
    fn stacked_round_trip() {
        let mesh = unit_cube();
        let stacked = mesh.stacked_vertices();
        let back = mesh.with_stacked_vertices(&stacked);
        assert_eq!(mesh.vertices, back.vertices);
        assert_eq!(mesh.faces, back.faces);
    }
}
