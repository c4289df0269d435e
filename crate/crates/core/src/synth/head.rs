use nalgebra::Vector3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::geometry::{RigidTransform, TriMesh};

use super::regions::unit_direction;
use super::SynthError;

/// Semi-axes of the ellipsoidal head template, mm (x: ear-to-ear half width,
/// y: crown-to-chin half height, z: back-to-face half depth).
pub const HEAD_SEMI_AXES: [f64; 3] = [70.0, 95.0, 80.0];

/// Parameters pinning one synthetic subject. Same params produce a
/// bit-identical mesh.
#[derive(Debug, Clone)]
pub struct SynthHeadParams {
    pub seed: u64,
    pub identity_coeffs: Vec<f64>,
    /// 51 ARKit-convention expression weights in [0, 1].
    pub expression_coeffs: Vec<f64>,
    pub pose: RigidTransform,
}

impl SynthHeadParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (index, &value) in self.expression_coeffs.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(SynthError::ExpressionOutOfRange { index, value });
            }
        }
        Ok(())
    }
}

/// Lat-long ellipsoid with the face toward +z and the crown toward +y.
/// Vertex count is `rings * segments + 2`; all generated heads of one family
/// reuse this topology verbatim.
pub fn head_template(rings: usize, segments: usize) -> TriMesh {
    assert!(rings >= 2 && segments >= 3);
    let [ax, ay, az] = HEAD_SEMI_AXES;
    let mut vertices = Vec::with_capacity(rings * segments + 2);
    vertices.push(Vector3::new(0.0, ay, 0.0));
    for i in 0..rings {
        let theta = std::f64::consts::PI * (i + 1) as f64 / (rings + 1) as f64;
        for j in 0..segments {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / segments as f64;
            vertices.push(Vector3::new(
                ax * theta.sin() * phi.sin(),
                ay * theta.cos(),
                az * theta.sin() * phi.cos(),
            ));
        }
    }
    vertices.push(Vector3::new(0.0, -ay, 0.0));

    let ring = |i: usize, j: usize| 1 + i * segments + (j % segments);
    let south = vertices.len() - 1;
    let mut faces = Vec::with_capacity(2 * rings * segments);
    for j in 0..segments {
        faces.push([0, ring(0, j), ring(0, j + 1)]);
    }
    for i in 0..rings - 1 {
        for j in 0..segments {
            let (a, b) = (ring(i, j), ring(i, j + 1));
            let (c, d) = (ring(i + 1, j), ring(i + 1, j + 1));
            faces.push([a, c, d]);
            faces.push([a, d, b]);
        }
    }
    for j in 0..segments {
        faces.push([south, ring(rings - 1, j + 1), ring(rings - 1, j)]);
    }
    TriMesh::new(vertices, faces).expect("template construction is index-safe")
}

/// One identity mode: a smooth low-frequency displacement field over the
/// template, evaluated as `direction * sin(freq . p + phase)`.
#[derive(Debug, Clone)]
pub struct ModeField {
    pub direction: Vector3<f64>,
    pub freq: Vector3<f64>,
    pub phase: f64,
    /// Standard deviation of this mode's Gaussian coefficient, mm.
    pub sigma: f64,
}

impl ModeField {
    pub fn displacement(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.direction * (self.freq.dot(p) + self.phase).sin()
    }
}

fn draw_modes(rng: &mut ChaCha20Rng, num_modes: usize) -> Vec<ModeField> {
    (0..num_modes)
        .map(|k| {
            let direction = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0f64),
            )
            .normalize();
            // Wavelengths of 300..800 mm across a ~180 mm head keep the
            // fields low-frequency.
            let freq_mag = rng.gen_range(0.008..0.02);
            let freq = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0f64),
            )
            .normalize()
                * freq_mag;
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let sigma = 6.0 * 0.85f64.powi(k as i32);
            ModeField {
                direction,
                freq,
                phase,
                sigma,
            }
        })
        .collect()
}

/// Template plus a linear combination of mode displacement fields. Zero
/// coefficients reproduce the template exactly.
pub fn synthesize_head(template: &TriMesh, modes: &[ModeField], coeffs: &[f64]) -> TriMesh {
    assert_eq!(modes.len(), coeffs.len());
    let vertices = template
        .vertices
        .iter()
        .map(|p| {
            let mut v = *p;
            for (mode, &c) in modes.iter().zip(coeffs) {
                v += mode.displacement(p) * c;
            }
            v
        })
        .collect();
    TriMesh {
        vertices,
        faces: template.faces.clone(),
        normals: None,
    }
}

/// Shared-topology family of `count` heads spanned by `num_modes` smooth
/// displacement fields with Gaussian coefficients. Deterministic in
/// `base_seed`; the sample covariance has rank exactly `num_modes`.
pub fn make_head_family(
    base_seed: u64,
    count: usize,
    num_modes: usize,
    rings: usize,
    segments: usize,
) -> Result<(Vec<TriMesh>, Vec<ModeField>), SynthError> {
    if count < num_modes + 1 {
        return Err(SynthError::FamilyTooSmall {
            count,
            min: num_modes + 1,
        });
    }
    let template = head_template(rings, segments);
    let mut rng = ChaCha20Rng::seed_from_u64(base_seed);
    let modes = draw_modes(&mut rng, num_modes);
    let normal = rand_distr::StandardNormal;
    let heads = (0..count)
        .map(|_| {
            let coeffs: Vec<f64> = modes
                .iter()
                .map(|m| {
                    let z: f64 = rng.sample(normal);
                    m.sigma * z
                })
                .collect();
            synthesize_head(&template, &modes, &coeffs)
        })
        .collect();
    Ok((heads, modes))
}

/// Designated landmark vertices: the template vertices nearest a fixed table
/// of facial directions (nose tip, chin, eye and mouth corners, brows,
/// cheeks, forehead). Used for rigid pre-alignment and the per-frame head
/// pose estimate.
pub fn landmark_vertices(mesh: &TriMesh) -> Vec<usize> {
    const DIRS: [[f64; 3]; 15] = [
        [0.0, 0.0, 1.0],     // nose tip
        [0.0, -0.85, 0.55],  // chin
        [0.0, 0.75, 0.65],   // forehead
        [0.22, 0.28, 0.93],  // eye inner L
        [0.5, 0.26, 0.82],   // eye outer L
        [-0.22, 0.28, 0.93], // eye inner R
        [-0.5, 0.26, 0.82],  // eye outer R
        [0.3, -0.42, 0.85],  // mouth corner L
        [-0.3, -0.42, 0.85], // mouth corner R
        [0.0, -0.32, 0.95],  // upper lip
        [0.32, 0.52, 0.79],  // brow L
        [-0.32, 0.52, 0.79], // brow R
        [0.66, -0.12, 0.74], // cheek L
        [-0.66, -0.12, 0.74],// cheek R
        [0.0, -0.62, 0.78],  // jaw front
    ];
    DIRS.iter()
        .map(|d| {
            let dir = Vector3::new(d[0], d[1], d[2]).normalize();
            let mut best = (0usize, f64::NEG_INFINITY);
            for (i, p) in mesh.vertices.iter().enumerate() {
                let dot = unit_direction(p).dot(&dir);
                if dot > best.1 {
                    best = (i, dot);
                }
            }
            best.0
        })
        .collect()
}
