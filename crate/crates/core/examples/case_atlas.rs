// Every way of adding points to a small base, every compatible base map and
// lift, grouped by the commutant they produce.

use crossed_commutant::cli::render_atlas;
use crossed_commutant::enumerate::{atlas, AtlasConfig};

fn main() {
    for points in 0..=2 {
        let classes = atlas(AtlasConfig::minimal_for(points)).unwrap();
        println!("{points} added point(s):");
        print!("{}", render_atlas(&classes));
    }
}
