//! Recomputes the tessellation length densities used to normalize the
//! Voronoi and Delaunay intensity models.
//!
//! cargo run --release -p coxnet --example calibrate [reps] [side]

use coxnet::environment::calibrate_length_density;
use coxnet::SeedPath;

fn main() {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(400);
    let side: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(40.0);
    let seed = SeedPath::new(20_240_601);
    for (name, voronoi) in [("voronoi", true), ("delaunay", false)] {
        let (mean, half) = calibrate_length_density(voronoi, reps, side, &seed.derive(name, 0))
            .expect("calibration runs on a valid torus");
        println!("{name}: {mean:.17} +- {half:.3e} (reps = {reps}, side = {side})");
    }
}
