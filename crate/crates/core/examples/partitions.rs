// Real-line and abstract partitions, and refining them.

use std::collections::BTreeMap;

use crossed_commutant::partition::{
    build_abstract_partition, build_real_line_partition, refine_abstract, refine_real_line,
};
use crossed_commutant::rational::{int, parse_rational};

fn main() {
    let line = build_real_line_partition(vec![int(0), parse_rational("5/2").unwrap()]).unwrap();
    println!("line: {}", line.render_ids(&(0..line.len()).collect::<Vec<_>>()));

    // Two points into the middle interval: it splits into three subintervals.
    let additions = BTreeMap::from([(1, vec![int(1), int(2)])]);
    let refined = refine_real_line(&line, &additions).unwrap();
    for (id, parent) in refined.parent_of().iter().enumerate() {
        println!(
            "  {:<6} ({}) inside {}",
            refined.refined().label(id),
            refined.refined().kind(id),
            line.label(*parent)
        );
    }

    let cells = build_abstract_partition(3).unwrap();
    let split = refine_abstract(&cells, &BTreeMap::from([(0, 2), (2, 3)])).unwrap();
    println!("abstract: {} cells -> {} cells", cells.len(), split.refined().len());
    for (b, kids) in split.child_table().iter().enumerate() {
        println!("  {} = {}", cells.label(b), split.refined().render_ids(kids));
    }
}
