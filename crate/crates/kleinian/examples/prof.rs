use kleinian::fuchsian::genus_cover_group;
use kleinian::shuffle::{ShufflePlan, build_gamma_k};
use kleinian::invariance::{min_strip_constant, Alphabet};
use kleinian::combine::{certify_combined, ping_pong_certify};
use std::time::Instant;

fn main() {
    let plan = ShufflePlan::build(3, 1).unwrap();
    let t0 = Instant::now();
    let blocks: Vec<_> = (1..=3).map(|j| genus_cover_group(j).unwrap()).collect();
    println!("blocks: {:?}", t0.elapsed());

    let t = Instant::now();
    for b in &blocks {
        let c = min_strip_constant(&Alphabet::from_marked(b), 3);
        println!("  min_strip({}) = {c} in {:?}", b.id, t.elapsed());
    }

    let t = Instant::now();
    let mut gamma = build_gamma_k(&plan, &blocks, 3).unwrap();
    println!("build_gamma_k: {:?}", t.elapsed());

    let t = Instant::now();
    certify_combined(&mut gamma, 3).unwrap();
    println!("certify_combined: {:?}", t.elapsed());

    let t = Instant::now();
    ping_pong_certify(&gamma, 3, 0, 0).unwrap();
    println!("ping_pong: {:?}", t.elapsed());
}
