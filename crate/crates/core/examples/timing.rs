use essmon::essential::EssentialBasis;
use essmon::orders::{make_weight_function, OrderSpec, OrderVariant, WeightPreset};
use essmon::pbw::BirationalSequence;
use essmon::rootsys::{build_root_system, Family, RootSystemSpec};
use essmon::shapovalov::RepSpace;
use std::time::Instant;

fn main() {
    for (fam, rank, lam) in [
        (Family::A, 3usize, vec![2i64, 2, 2]),
        (Family::G, 2, vec![2, 2]),
    ] {
        let rs = build_root_system(RootSystemSpec::new(fam, rank).unwrap()).unwrap();
        let t0 = Instant::now();
        let rep = RepSpace::new(&rs, lam.clone()).unwrap();
        let t1 = Instant::now();
        println!(
            "{fam:?}{rank} lambda {lam:?}: RepSpace dim {} in {:.2?}",
            rep.dim(),
            t1 - t0
        );
        let seq = BirationalSequence::good_ordering(&rs);
        let psi = make_weight_function(&WeightPreset::Homogeneous, &rs, &seq).unwrap();
        let order = OrderSpec::new(psi, OrderVariant::WRLex).unwrap();
        let basis = EssentialBasis::new(&rep, &seq, &order).unwrap();
        println!("  essential basis {} in {:.2?}", basis.dim(), t1.elapsed());
    }
}
