//! Fixtures shared by the benchmarks.

use edgelbp_core::descriptor::CodeCounts;
use edgelbp_core::shapes::{self, GridFaces, Relief};
use edgelbp_core::{Alpha, DescriptorParams, EdgeLbpDescriptor, SurfaceTessellation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Jittered bumps patch of about `n_vertices` vertices covering 4200 mm².
pub fn patch(n_vertices: usize) -> SurfaceTessellation {
    shapes::relief_patch(Relief::Bumps, 4200f64.sqrt(), n_vertices, 0.3, 1, GridFaces::Triangles)
}

pub fn params() -> DescriptorParams {
    DescriptorParams { p: 15, n_rings: 5, r_max: 2.5, alpha: Alpha::A1 }
}

/// `n` descriptors with random α1 histograms, as a distance-matrix workload.
pub fn synthetic_descriptors(n: usize, seed: u64) -> Vec<EdgeLbpDescriptor> {
    let params = params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut counts = CodeCounts::new(&params);
            for ring in 0..params.n_rings {
                for _ in 0..2000 {
                    counts.add(ring, rng.random_range(0..=params.p as u64));
                }
            }
            EdgeLbpDescriptor {
                model_id: format!("s{i:04}"),
                field: "k2".into(),
                params,
                r_max_rule: "explicit:2.5".into(),
                histogram: counts.normalize(2000),
                n_vertices: 2000,
                n_admissible: 2000,
            }
        })
        .collect()
}
