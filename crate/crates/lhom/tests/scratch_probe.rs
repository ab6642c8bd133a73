use lhom::gadgets::{reduce_sat_ctw, reduce_sat_fvs, validate_class_cg};
use lhom::gen::{random_cnf, Cnf};
use lhom::graph::{crown, cycle};
use lhom::solvers::fvs_solve;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[test]
fn probe_other_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, h) in [("C8", cycle(8)), ("crown3", crown(3)), ("crown4", crown(4)), ("C10", cycle(10))] {
        for g in [4usize, 8] {
            let t0 = Instant::now();
            for round in 0..3 {
                let cnf = if round == 0 {
                    Cnf { num_vars: 1, clauses: vec![vec![1], vec![-1]] }
                } else {
                    random_cnf(&mut rng, 6, 8)
                };
                let want = cnf.brute_force_sat().is_some();
                let out = reduce_sat_fvs(&cnf, &h, 1, g, None).unwrap();
                let got = fvs_solve(&out.instance, &out.fvs_vertices).unwrap().satisfiable;
                assert_eq!(got, want, "{name} fvs g={g} round {round}");
                let out = reduce_sat_ctw(&cnf, &h, 1, g, None).unwrap();
                let got = fvs_solve(&out.instance, &out.fvs_vertices).unwrap().satisfiable;
                assert_eq!(got, want, "{name} ctw g={g} round {round}");
                validate_class_cg(&out.instance.g, g).unwrap();
            }
            eprintln!("{name} g={g}: ok in {:?}", t0.elapsed());
        }
    }
}
