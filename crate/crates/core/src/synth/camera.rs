use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::Distribution;

use crate::geometry::{PointCloud, RigidTransform, TriMesh};

use super::SynthError;

/// Pinhole depth camera. `pose` maps world coordinates into the camera frame
/// (looking down +z, x right, y down in image terms).
#[derive(Debug, Clone)]
pub struct VirtualCamera {
    /// 3x3 projection matrix (fx, fy on the diagonal, principal point in the
    /// last column), pixels.
    pub intrinsics: Matrix3<f64>,
    pub width: usize,
    pub height: usize,
    pub pose: RigidTransform,
    /// Standard deviation of the along-ray depth noise, mm.
    pub noise_sigma: f64,
}

impl VirtualCamera {
    pub fn new(
        intrinsics: Matrix3<f64>,
        width: usize,
        height: usize,
        pose: RigidTransform,
        noise_sigma: f64,
    ) -> Result<Self, SynthError> {
        let cam = Self {
            intrinsics,
            width,
            height,
            pose,
            noise_sigma,
        };
        cam.validate()?;
        Ok(cam)
    }

    /// 640x480 camera at 600 mm in front of the head, Kinect-like focal
    /// length, looking back at the origin.
    pub fn default_desk(noise_sigma: f64) -> Self {
        let mut intrinsics = Matrix3::identity();
        intrinsics[(0, 0)] = 525.0;
        intrinsics[(1, 1)] = 525.0;
        intrinsics[(0, 2)] = 319.5;
        intrinsics[(1, 2)] = 239.5;
        // Rotate pi about y so the camera at (0, 0, +600) looks toward -z.
        let rotation = Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, -1.0));
        let center = Vector3::new(0.0, 0.0, 600.0);
        let pose = RigidTransform {
            rotation,
            translation: -(rotation * center),
        };
        Self {
            intrinsics,
            width: 640,
            height: 480,
            pose,
            noise_sigma,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let (fx, fy) = (self.intrinsics[(0, 0)], self.intrinsics[(1, 1)]);
        if fx <= 0.0 || fy <= 0.0 {
            return Err(SynthError::BadCamera(format!(
                "focal lengths must be positive, got fx={fx}, fy={fy}"
            )));
        }
        let (cx, cy) = (self.intrinsics[(0, 2)], self.intrinsics[(1, 2)]);
        if cx < 0.0 || cx >= self.width as f64 || cy < 0.0 || cy >= self.height as f64 {
            return Err(SynthError::BadCamera(format!(
                "principal point ({cx}, {cy}) outside {}x{} image",
                self.width, self.height
            )));
        }
        self.pose.validate()?;
        Ok(())
    }

    /// Camera center in world coordinates.
    pub fn center(&self) -> Vector3<f64> {
        self.pose.inverse().translation
    }

    /// World-space direction of the ray through pixel center (u, v).
    pub fn ray_direction(&self, u: usize, v: usize) -> Vector3<f64> {
        let fx = self.intrinsics[(0, 0)];
        let fy = self.intrinsics[(1, 1)];
        let cx = self.intrinsics[(0, 2)];
        let cy = self.intrinsics[(1, 2)];
        let d_cam = Vector3::new(
            (u as f64 + 0.5 - cx) / fx,
            (v as f64 + 0.5 - cy) / fy,
            1.0,
        );
        (self.pose.rotation.transpose() * d_cam).normalize()
    }

    /// Full 3x4 projection: intrinsics times the world-to-camera pose.
    pub fn projection_matrix(&self) -> nalgebra::Matrix3x4<f64> {
        let mut rt = nalgebra::Matrix3x4::zeros();
        rt.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.pose.rotation);
        rt.fixed_view_mut::<3, 1>(0, 3)
            .copy_from(&self.pose.translation);
        self.intrinsics * rt
    }
}

/// Result of one simulated depth capture. `cloud` is `None` when no ray hit
/// the mesh (the mesh was behind the camera or outside the frustum).
#[derive(Debug, Clone)]
pub struct DepthScan {
    pub cloud: Option<PointCloud>,
    pub rays_total: usize,
    pub rays_hit: usize,
}

/// Casts one ray per pixel against the mesh, back-projects the nearest hits
/// and perturbs each hit along its ray by Gaussian depth noise. Normals come
/// from the hit triangle. Self-occluded surface is absent, matching a
/// single-view capture. Deterministic in `seed`.
pub fn render_depth_scan(mesh: &TriMesh, cam: &VirtualCamera, seed: u64) -> Result<DepthScan, SynthError> {
    cam.validate()?;
    mesh.validate()?;
    let bvh = Bvh::build(mesh);
    let origin = cam.center();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let normal = rand_distr::Normal::new(0.0, cam.noise_sigma.max(0.0))
        .map_err(|e| SynthError::BadCamera(format!("bad noise sigma: {e}")))?;

    let mut points = Vec::new();
    let mut normals = Vec::new();
    let rays_total = cam.width * cam.height;
    for v in 0..cam.height {
        for u in 0..cam.width {
            let dir = cam.ray_direction(u, v);
            if let Some(hit) = bvh.intersect(mesh, &origin, &dir) {
                let offset = if cam.noise_sigma > 0.0 {
                    normal.sample(&mut rng)
                } else {
                    0.0
                };
                points.push(origin + dir * (hit.t + offset));
                normals.push(hit.normal);
            }
        }
    }
    let rays_hit = points.len();
    let cloud = if points.is_empty() {
        None
    } else {
        Some(PointCloud::new(points, Some(normals))?)
    };
    Ok(DepthScan {
        cloud,
        rays_total,
        rays_hit,
    })
}

struct Hit {
    t: f64,
    normal: Vector3<f64>,
}

/// Median-split bounding volume hierarchy over the mesh triangles.
struct Bvh {
    nodes: Vec<BvhNode>,
    /// Triangle indices, partitioned so each leaf owns a contiguous range.
    order: Vec<usize>,
}

struct BvhNode {
    min: Vector3<f64>,
    max: Vector3<f64>,
    /// Leaf: (start, len) into `order`; inner: children indices.
    content: NodeContent,
}

enum NodeContent {
    Leaf { start: usize, len: usize },
    Inner { left: usize, right: usize },
}

const BVH_LEAF_SIZE: usize = 4;

impl Bvh {
    fn build(mesh: &TriMesh) -> Self {
        let centroids: Vec<Vector3<f64>> = mesh
            .faces
            .iter()
            .map(|f| (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]]) / 3.0)
            .collect();
        let mut order: Vec<usize> = (0..mesh.faces.len()).collect();
        let mut bvh = Bvh {
            nodes: Vec::new(),
            order: Vec::new(),
        };
        if !order.is_empty() {
            bvh.build_range(mesh, &centroids, &mut order, 0);
        }
        bvh.order = order;
        bvh
    }

    fn build_range(
        &mut self,
        mesh: &TriMesh,
        centroids: &[Vector3<f64>],
        range: &mut [usize],
        offset: usize,
    ) -> usize {
        let mut min = Vector3::repeat(f64::INFINITY);
        let mut max = Vector3::repeat(f64::NEG_INFINITY);
        for &t in range.iter() {
            for &vi in &mesh.faces[t] {
                min = min.inf(&mesh.vertices[vi]);
                max = max.sup(&mesh.vertices[vi]);
            }
        }
        let index = self.nodes.len();
        self.nodes.push(BvhNode {
            min,
            max,
            content: NodeContent::Leaf {
                start: offset,
                len: range.len(),
            },
        });
        if range.len() > BVH_LEAF_SIZE {
            let extent = max - min;
            let axis = if extent.x >= extent.y && extent.x >= extent.z {
                0
            } else if extent.y >= extent.z {
                1
            } else {
                2
            };
            let mid = range.len() / 2;
            range.select_nth_unstable_by(mid, |&a, &b| {
                centroids[a][axis].partial_cmp(&centroids[b][axis]).unwrap()
            });
            let (lo, hi) = range.split_at_mut(mid);
            let left = self.build_range(mesh, centroids, lo, offset);
            let right = self.build_range(mesh, centroids, hi, offset + mid);
            self.nodes[index].content = NodeContent::Inner { left, right };
        }
        index
    }

    fn intersect(&self, mesh: &TriMesh, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<Hit> {
        if self.nodes.is_empty() {
            return None;
        }
        let inv_dir = Vector3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut best: Option<(f64, usize)> = None;
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            let t_box = slab_test(&node.min, &node.max, origin, &inv_dir);
            match t_box {
                Some(t_near) if best.map_or(true, |(t, _)| t_near <= t) => {}
                _ => continue,
            }
            match node.content {
                NodeContent::Inner { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
                NodeContent::Leaf { start, len } => {
                    for &tri in &self.order[start..start + len] {
                        if let Some(t) = ray_triangle(mesh, tri, origin, dir) {
                            if best.map_or(true, |(bt, _)| t < bt) {
                                best = Some((t, tri));
                            }
                        }
                    }
                }
            }
        }
        best.map(|(t, tri)| {
            let f = mesh.faces[tri];
            let n = (mesh.vertices[f[1]] - mesh.vertices[f[0]])
                .cross(&(mesh.vertices[f[2]] - mesh.vertices[f[0]]))
                .normalize();
            Hit { t, normal: n }
        })
    }
}

fn slab_test(
    min: &Vector3<f64>,
    max: &Vector3<f64>,
    origin: &Vector3<f64>,
    inv_dir: &Vector3<f64>,
) -> Option<f64> {
    let mut t0 = 0.0f64;
    let mut t1 = f64::INFINITY;
    for axis in 0..3 {
        let a = (min[axis] - origin[axis]) * inv_dir[axis];
        let b = (max[axis] - origin[axis]) * inv_dir[axis];
        let (near, far) = if a <= b { (a, b) } else { (b, a) };
        t0 = t0.max(near);
        t1 = t1.min(far);
        if t0 > t1 {
            return None;
        }
    }
    Some(t0)
}

/// Moller-Trumbore; returns the ray parameter of the hit, if any.
fn ray_triangle(
    mesh: &TriMesh,
    tri: usize,
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
) -> Option<f64> {
    let f = mesh.faces[tri];
    let v0 = mesh.vertices[f[0]];
    let e1 = mesh.vertices[f[1]] - v0;
    let e2 = mesh.vertices[f[2]] - v0;
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = origin - v0;
    let u = tvec.dot(&pvec) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let w = dir.dot(&qvec) * inv_det;
    if w < 0.0 || u + w > 1.0 {
        return None;
    }
    let t = e2.dot(&qvec) * inv_det;
    (t > 1e-9).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TriMesh;
    use crate::synth::head_template;

    fn facing_plane() -> TriMesh {
        // A large quad at z = 100 facing the default camera at z = 600.
        TriMesh::new(
            vec![
                Vector3::new(-200.0, -200.0, 100.0),
                Vector3::new(200.0, -200.0, 100.0),
                Vector3::new(200.0, 200.0, 100.0),
                Vector3::new(-200.0, 200.0, 100.0),
            ],
            vec![[0, 2, 1], [0, 3, 2]],
        )
        .unwrap()
    }

    #[test]
    fn noiseless_plane_hits_lie_on_the_plane() {
        let cam = VirtualCamera::default_desk(0.0);
        let scan = render_depth_scan(&facing_plane(), &cam, 0).unwrap();
        let cloud = scan.cloud.unwrap();
        assert!(scan.rays_hit > 10_000);
        for p in &cloud.points {
            assert!((p.z - 100.0).abs() < 1e-9, "off-plane z {}", p.z);
        }
    }

    #[test]
    fn sphere_scan_is_front_hemisphere_only() {
        let mesh = head_template(18, 28);
        let mut cam = VirtualCamera::default_desk(0.0);
        cam.width = 160;
        cam.height = 120;
        cam.intrinsics[(0, 0)] = 131.25;
        cam.intrinsics[(1, 1)] = 131.25;
        cam.intrinsics[(0, 2)] = 79.5;
        cam.intrinsics[(1, 2)] = 59.5;
        let scan = render_depth_scan(&mesh, &cam, 0).unwrap();
        let cloud = scan.cloud.unwrap();
        for (p, n) in cloud.points.iter().zip(cloud.normals.as_ref().unwrap()) {
            // Points on the visible side and normals toward the camera.
            assert!(p.z > -5.0, "back-hemisphere point {p:?}");
            let view = (p - cam.center()).normalize();
            assert!(n.dot(&view) < 0.0, "normal faces away from camera");
        }
    }

    #[test]
    fn zero_noise_points_lie_on_the_surface() {
        let mesh = head_template(12, 16);
        let mut cam = VirtualCamera::default_desk(0.0);
        cam.width = 80;
        cam.height = 60;
        cam.intrinsics[(0, 0)] = 65.0;
        cam.intrinsics[(1, 1)] = 65.0;
        cam.intrinsics[(0, 2)] = 39.5;
        cam.intrinsics[(1, 2)] = 29.5;
        let scan = render_depth_scan(&mesh, &cam, 0).unwrap();
        let cloud = scan.cloud.unwrap();
        // Every point must satisfy one triangle's plane equation to 1e-9.
        for p in &cloud.points {
            let mut best = f64::INFINITY;
            for f in &mesh.faces {
                let n = (mesh.vertices[f[1]] - mesh.vertices[f[0]])
                    .cross(&(mesh.vertices[f[2]] - mesh.vertices[f[0]]));
                let len = n.norm();
                if len == 0.0 {
                    continue;
                }
                let d = (p - mesh.vertices[f[0]]).dot(&(n / len)).abs();
                best = best.min(d);
            }
            assert!(best < 1e-9, "point {p:?} off-surface by {best}");
        }
    }

    #[test]
    fn same_seed_same_cloud() {
        let mesh = head_template(10, 14);
        let mut cam = VirtualCamera::default_desk(0.5);
        cam.width = 64;
        cam.height = 48;
        cam.intrinsics[(0, 2)] = 31.5;
        cam.intrinsics[(1, 2)] = 23.5;
        cam.intrinsics[(0, 0)] = 52.0;
        cam.intrinsics[(1, 1)] = 52.0;
        let a = render_depth_scan(&mesh, &cam, 9).unwrap().cloud.unwrap();
        let b = render_depth_scan(&mesh, &cam, 9).unwrap().cloud.unwrap();
        assert_eq!(a, b);
        let c = render_depth_scan(&mesh, &cam, 10).unwrap().cloud.unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mesh_behind_camera_yields_empty_scan() {
        let mut mesh = facing_plane();
        for v in &mut mesh.vertices {
            v.z = 700.0; // behind the camera at z = 600 looking toward -z
        }
        let cam = VirtualCamera::default_desk(0.0);
        let scan = render_depth_scan(&mesh, &cam, 0).unwrap();
        assert!(scan.cloud.is_none());
        assert_eq!(scan.rays_hit, 0);
    }

    #[test]
    fn bad_intrinsics_rejected() {
        let mut cam = VirtualCamera::default_desk(0.0);
        cam.intrinsics[(0, 0)] = -1.0;
        assert!(matches!(cam.validate(), Err(SynthError::BadCamera(_))));
    }
}
