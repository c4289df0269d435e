//! 2D convex polygon helpers: shoelace areas, convexity checks and
//! Sutherland-Hodgman clipping.

use nalgebra::Vector2;

/// Shoelace signed area; positive for counter-clockwise winding.
pub fn signed_area(poly: &[Vector2<f64>]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        acc += a.x * b.y - b.x * a.y;
    }
    acc / 2.0
}

pub fn polygon_area(poly: &[Vector2<f64>]) -> f64 {
    signed_area(poly).abs()
}

/// Convexity with a scale-relative tolerance: all turns agree in sign, near
/// collinear corners allowed.
pub fn is_convex(poly: &[Vector2<f64>]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let scale: f64 = poly
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    let tol = 1e-9 * scale * scale;
    let mut sign = 0i8;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        let cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        if cross.abs() <= tol {
            continue;
        }
        let s = if cross > 0.0 { 1 } else { -1 };
        if sign == 0 {
            sign = s;
        } else if s != sign {
            return false;
        }
    }
    sign != 0
}

fn orient_ccw(poly: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    if signed_area(poly) < 0.0 {
        poly.iter().rev().copied().collect()
    } else {
        poly.to_vec()
    }
}

/// Clips `subject` against the convex polygon `clip` (Sutherland-Hodgman).
/// Returns the intersection polygon, possibly empty.
pub fn clip_convex(subject: &[Vector2<f64>], clip: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    let clip = orient_ccw(clip);
    let mut output = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            return output;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let input = std::mem::take(&mut output);
        let inside =
            |p: &Vector2<f64>| (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0;
        let intersect = |p: &Vector2<f64>, q: &Vector2<f64>| {
            let dp = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            let dq = (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x);
            let t = dp / (dp - dq);
            p + (q - p) * t
        };
        for j in 0..input.len() {
            let p = input[j];
            let q = input[(j + 1) % input.len()];
            match (inside(&p), inside(&q)) {
                (true, true) => output.push(q),
                (true, false) => output.push(intersect(&p, &q)),
                (false, true) => {
                    output.push(intersect(&p, &q));
                    output.push(q);
                }
                (false, false) => {}
            }
        }
    }
    output
}
