use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptl_core::atoms::{entropy, eval_atom};
use ptl_core::gen::{self, ratio, TeamShape};
use ptl_core::syntax::{needs_search, parse, Formula};
use ptl_core::teameval::{check_witness, eval_bounded_with, eval_exact, BoundedConfig};
use ptl_core::{Rational, Team};

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>(), depth in 1usize..6) {
        let mut r = seeded(seed);
        let shape = TeamShape { entropy: true, bool_neg: true, ..TeamShape::default() };
        let f = gen::team_formula(&mut r, &gen::scope_vars(3), depth, &shape);
        let g = gen::fopt_formula(&mut r, &gen::scope_vars(2), depth);
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
        prop_assert_eq!(parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn duplication_keeps_mass_and_other_marginals(seed in any::<u64>(), n in 1usize..4) {
        let mut r = seeded(seed);
        let st = gen::structure(&mut r, n);
        let vars = gen::scope_vars(2);
        let t = gen::team(&mut r, &st, &vars, 20, 12);
        let all: Vec<usize> = st.elements().collect();
        let d = t.duplicate("z", &all).unwrap();
        prop_assert_eq!(d.total(), t.total());
        prop_assert_eq!(d.marginal(&vars).unwrap(), t.marginal(&vars).unwrap());
        let mz = d.marginal(&["z".to_string()]).unwrap();
        prop_assert!(mz.values().all(|w| *w == ratio(1, n as u64)));
    }

    #[test]
    fn scaled_union_mixes_totals(seed in any::<u64>(), k in 0u64..=6) {
        let mut r = seeded(seed);
        let st = gen::structure(&mut r, 3);
        let vars = gen::scope_vars(2);
        let a = gen::team(&mut r, &st, &vars, 9, 12);
        let b = gen::team(&mut r, &st, &vars, 9, 12).scale_by(&ratio(1, 2));
        let k = ratio(k, 6);
        let u = Team::scaled_union(&a, &b, &k).unwrap();
        let one = Rational::from_integer(1.into());
        prop_assert_eq!(u.total(), k.clone() * a.total() + (one - k) * b.total());
    }

    #[test]
    fn entropy_is_monotone(seed in any::<u64>()) {
        let mut r = seeded(seed);
        let st = gen::structure(&mut r, 3);
        let vars = gen::scope_vars(3);
        let t = gen::team(&mut r, &st, &vars, 27, 12);
        let h1 = entropy(&t, &vars[..1]).unwrap();
        let h2 = entropy(&t, &vars[..2]).unwrap();
        let h3 = entropy(&t, &vars).unwrap();
        prop_assert!(h1 >= -1e-12 && h1 <= h2 + 1e-12 && h2 <= h3 + 1e-12);
        prop_assert!(h3 <= (t.len() as f64).log2() + 1e-9);
    }

    #[test]
    fn atoms_survive_renormalization(seed in any::<u64>()) {
        let mut r = seeded(seed);
        let st = gen::structure(&mut r, 3);
        let vars = gen::scope_vars(3);
        let t = gen::team(&mut r, &st, &vars, 27, 12);
        let scaled = t.scale_by(&ratio(2, 7));
        let shape = TeamShape { entropy: true, ..TeamShape::default() };
        let atom = gen::team_atom(&mut r, &vars, &shape);
        prop_assert_eq!(eval_atom(&st, &t, &atom).unwrap(), eval_atom(&st, &scaled, &atom).unwrap());
    }

    #[test]
    fn bounded_witnesses_check(seed in any::<u64>()) {
        let mut r = seeded(seed);
        let st = gen::structure(&mut r, 2);
        let vars = gen::scope_vars(2);
        let t = gen::team(&mut r, &st, &vars, 4, 4);
        let f = gen::team_formula(&mut r, &vars, 3, &TeamShape::default());
        let cfg = BoundedConfig { budget: 200_000, ..BoundedConfig::new(2) };
        if let Ok(out) = eval_bounded_with(&st, &t, &f, &cfg) {
            if !needs_search(&f) {
                prop_assert_eq!(out.value, eval_exact(&st, &t, &f).unwrap());
            }
            if let Some(w) = out.witness {
                prop_assert!(check_witness(&st, &t, &f, &w).unwrap(), "{}", f);
            }
        }
    }
}

#[test]
fn split_of_literals_matches_pointwise_truth() {
    let mut r = seeded(11);
    for _ in 0..200 {
        let st = gen::structure(&mut r, 3);
        let vars = gen::scope_vars(2);
        let t = gen::team(&mut r, &st, &vars, 9, 12);
        let (a, b) = (gen::literal(&mut r, &vars), gen::literal(&mut r, &vars));
        let f = Formula::split_or(a.clone(), b.clone());
        let pointwise = t.support_tuples().iter().all(|row| {
            let single = Team::from_rows(vars.clone(), [(row.clone(), ratio(1, 1))]).unwrap();
            eval_exact(&st, &single, &a).unwrap() || eval_exact(&st, &single, &b).unwrap()
        });
        let bounded = eval_bounded_with(&st, &t, &f, &BoundedConfig::new(1))
            .unwrap()
            .value;
        assert_eq!(bounded, pointwise, "{f}");
    }
}
