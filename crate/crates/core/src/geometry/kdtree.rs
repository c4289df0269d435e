use nalgebra::Vector3;

/// Static KD-tree over 3D points, rebuilt once per target cloud.
///
/// Nearest-neighbor queries are exact and break distance ties toward the
/// lower point index, so results are interchangeable with a linear scan.
#[derive(Debug, Clone)]
pub struct KdTree {
    nodes: Vec<Node>,
    points: Vec<Vector3<f64>>,
    root: Option<usize>,
}

#[derive(Debug, Clone)]
struct Node {
    /// Index into the original point list.
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

impl KdTree {
    pub fn build(points: &[Vector3<f64>]) -> Self {
        let mut indices: Vec<usize> = (0..points.len()).collect();
        let mut tree = Self {
            nodes: Vec::with_capacity(points.len()),
            points: points.to_vec(),
            root: None,
        };
        tree.root = tree.build_recursive(&mut indices, 0);
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn build_recursive(&mut self, indices: &mut [usize], depth: usize) -> Option<usize> {
        if indices.is_empty() {
            return None;
        }
        let axis = depth % 3;
        let mid = indices.len() / 2;
        // Median split; total order on (coordinate, index) keeps construction
        // deterministic even with duplicate coordinates.
        indices.select_nth_unstable_by(mid, |&a, &b| {
            let ka = (self.points[a][axis], a);
            let kb = (self.points[b][axis], b);
            ka.partial_cmp(&kb).unwrap()
        });
        let point = indices[mid];
        let node_index = self.nodes.len();
        self.nodes.push(Node {
            point,
            axis,
            left: None,
            right: None,
        });
        let (lo, rest) = indices.split_at_mut(mid);
        let hi = &mut rest[1..];
        let left = self.build_recursive(lo, depth + 1);
        let right = self.build_recursive(hi, depth + 1);
        self.nodes[node_index].left = left;
        self.nodes[node_index].right = right;
        Some(node_index)
    }

    /// Exact nearest neighbor: returns `(point index, distance)`.
    pub fn nearest(&self, query: &Vector3<f64>) -> Option<(usize, f64)> {
        let root = self.root?;
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(root, query, &mut best);
        Some((best.0, best.1.sqrt()))
    }

    fn search(&self, node_index: usize, query: &Vector3<f64>, best: &mut (usize, f64)) {
        let node = &self.nodes[node_index];
        let p = &self.points[node.point];
        let d2 = (p - query).norm_squared();
        // Strictly-better distance wins; equal distance keeps the lower index,
        // matching the brute-force scan order.
        if d2 < best.1 || (d2 == best.1 && node.point < best.0) {
            *best = (node.point, d2);
        }
        let delta = query[node.axis] - p[node.axis];
        let (near, far) = if delta < 0.0 {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        if let Some(n) = near {
            self.search(n, query, best);
        }
        if let Some(f) = far {
            if delta * delta <= best.1 {
                self.search(f, query, best);
            }
        }
    }
}

/// Reference linear scan with the same tie-break rule as the tree.
pub fn brute_force_nearest(points: &[Vector3<f64>], query: &Vector3<f64>) -> Option<(usize, f64)> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, (p - query).norm_squared()))
        .min_by(|a, b| (a.1, a.0).partial_cmp(&(b.1, b.0)).unwrap())
        .map(|(i, d2)| (i, d2.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vector3<f64>> {
        (0..n)
            .map(|_| {
                Vector3::new(
                    rng.gen_range(-100.0..100.0),
                    rng.gen_range(-100.0..100.0),
                    rng.gen_range(-100.0..100.0),
                )
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_on_random_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 3, 17, 500] {
            let points = random_points(&mut rng, n);
            let tree = KdTree::build(&points);
            for _ in 0..200 {
                let q = Vector3::new(
                    rng.gen_range(-120.0..120.0),
                    rng.gen_range(-120.0..120.0),
                    rng.gen_range(-120.0..120.0),
                );
                let (ti, td) = tree.nearest(&q).unwrap();
                let (bi, bd) = brute_force_nearest(&points, &q).unwrap();
                assert_eq!(ti, bi);
                assert_eq!(td, bd);
            }
        }
    }

    #[test]
    fn duplicate_points_resolve_to_lowest_index() {
        let p = Vector3::new(1.0, 2.0, 3.0);
        let points = vec![p, Vector3::new(9.0, 9.0, 9.0), p, p];
        let tree = KdTree::build(&points);
        let (i, d) = tree.nearest(&p).unwrap();
        assert_eq!(i, 0);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn empty_tree_returns_none() {
        assert!(KdTree::build(&[]).nearest(&Vector3::zeros()).is_none());
    }
}
