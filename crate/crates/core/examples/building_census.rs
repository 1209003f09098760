//! Vertex counts in balls around the origin of both trees, and projection to the W-tree.

use hecke_cycles::building::Building;
use hecke_cycles::hermitian_lattice::{in_w_image, Space};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for q in [2, 3] {
        let mut b = Building::with_default_precision(q, 4)?;
        println!("q = {q}");
        for space in [Space::V, Space::W] {
            let ball = b.store_mut(space).ball(2)?;
            let mut by_dist = [0usize; 3];
            for &v in &ball {
                by_dist[b.store(space).dist(v) as usize] += 1;
            }
            println!("  {space}: vertices at distance 0, 1, 2: {by_dist:?}");
        }
        let v = b.v.ball(2)?;
        let off_w = v.iter().filter(|x| !in_w_image(b.v.lattice(**x))).count();
        println!("  {off_w} of {} V-vertices within distance 2 lie off the W-image", v.len());
        let far = *v
            .iter()
            .find(|x| b.v.dist(**x) == 2 && !in_w_image(b.v.lattice(**x)))
            .expect("ball reaches off the W-image");
        let (proj, w, steps) = b.project_to_w(far)?;
        let oracle = b.project_to_w_argmin(far)?;
        println!(
            "  V-vertex at distance 2 projects in {steps} steps to W-vertex at distance {} (oracle agrees: {})",
            b.w.dist(w),
            proj == oracle
        );
    }
    Ok(())
}
