//! Coinciding simplest cubic fields, certified two ways.

use simplest_cubic::thue;

fn main() {
    let max: i64 = std::env::args().nth(1).map_or(2500, |a| a.parse().expect("integer"));
    let scan = thue::coincidence_scan(max, thue::DEFAULT_BOUND).expect("certified scan");
    for p in &scan.pairs {
        println!("L_{} = L_{}  (conductor {}, {} witnesses)", p.m, p.n, p.shared_conductor, p.witnesses.len());
    }
    let c = thue::count_nontrivial_66(thue::DEFAULT_BOUND).expect("count");
    println!("{} pairs up to {max}; {} nontrivial solutions in {} orbits", scan.pairs.len(), c.total, c.orbits);
}
