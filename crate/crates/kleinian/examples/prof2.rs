use kleinian::fuchsian::genus_cover_group;
use kleinian::scalar::Scalar;
use kleinian::region::{Region, region_image, region_disjoint};
use kleinian::combine::conjugate_block;
use std::time::Instant;

fn main() {
    let b3 = genus_cover_group(3).unwrap();
    let conj = conjugate_block(&b3, &Scalar::exact_int(11946, 0)).unwrap();
    let g = conj.gens[3].compose(&conj.gens[1]).compose(&conj.gens[5]);
    let top = Region::upper(Scalar::exact_int(11947, 0));
    let t = Instant::now();
    let n = 2000;
    let mut acc = 0u32;
    for _ in 0..n {
        let img = region_image(&g, &top).unwrap();
        let (d, _) = region_disjoint(&img, &top);
        acc += d as u32;
    }
    println!("region pair: {:?}/op (acc {acc})", t.elapsed() / n);

    let t = Instant::now();
    for _ in 0..n {
        let _ = g.compose(&conj.gens[2]);
    }
    println!("compose: {:?}/op", t.elapsed() / n);

    let t = Instant::now();
    for _ in 0..n {
        let _ = g.xi_power();
    }
    println!("xi_power: {:?}/op", t.elapsed() / n);

    let t = Instant::now();
    for _ in 0..n {
        let _ = kleinian::invariance::coset_canonical(&g);
    }
    println!("coset_canonical: {:?}/op", t.elapsed() / n);

    let t = Instant::now();
    for _ in 0..n {
        let _ = g.exact_key();
    }
    println!("exact_key: {:?}/op", t.elapsed() / n);
}
