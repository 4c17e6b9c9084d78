use rand::Rng;

use jsmac::fourier_motzkin::{
    apply_g, build_system, closed_form_system, eliminate, evaluate_system, prune_with_certificates,
    randomization_var, rate_part,
};
use jsmac::infotheory::{
    bound_table, conditional_mutual_information, joint_distribution, Var, VarSet,
};
use jsmac::random::{random_pair, seeded};
use jsmac::region::{closed_form_region, RateRegion};
use jsmac::spec_file::xor_and_example;
use jsmac::subsets::SubsetMask;
use jsmac::sweeps::{random_bounds, MAX_ALPHABET};

#[test]
fn chain_rule_holds_on_random_joints() {
    let mut rng = seeded(11);
    for _ in 0..50 {
        let k = rng.gen_range(2..=3);
        let (channel, policy) = random_pair(&mut rng, k, MAX_ALPHABET).unwrap();
        let joint = joint_distribution(&channel, &policy).unwrap();
        let q = VarSet::of(&[Var::Q], k).unwrap();
        let v1 = VarSet::of(&[Var::V(1)], k).unwrap();
        let v2 = VarSet::of(&[Var::V(2)], k).unwrap();
        let y = VarSet::of(&[Var::Y], k).unwrap();
        // I(V1 V2; Y | Q) = I(V1; Y | Q) + I(V2; Y | V1 Q)
        let whole = conditional_mutual_information(&joint, v1.union(v2), y, q).unwrap();
        let first = conditional_mutual_information(&joint, v1, y, q).unwrap();
        let second = conditional_mutual_information(&joint, v2, y, v1.union(q)).unwrap();
        assert!((whole - first - second).abs() < 1e-10);
    }
}

#[test]
fn auxiliaries_are_independent_given_q() {
    let mut rng = seeded(12);
    for _ in 0..30 {
        let k = rng.gen_range(2..=3);
        let (channel, policy) = random_pair(&mut rng, k, MAX_ALPHABET).unwrap();
        let joint = joint_distribution(&channel, &policy).unwrap();
        let q = VarSet::of(&[Var::Q], k).unwrap();
        for set in SubsetMask::all_nonempty(k).unwrap() {
            let inside = VarSet::auxiliaries(set);
            let outside = VarSet::auxiliaries(set.complement());
            if outside.is_empty() {
                continue;
            }
            let mi = conditional_mutual_information(&joint, inside, outside, q).unwrap();
            assert!(mi.abs() < 1e-10, "I(V_J; V_Jc | Q) = {mi} for J = {set}");
        }
    }
}

#[test]
fn projection_contains_every_feasible_sample() {
    let mut rng = seeded(13);
    for k in [2, 3] {
        let start = build_system(k).unwrap();
        for _ in 0..10 {
            let bounds = random_bounds(&mut rng, k).unwrap();
            let numeric = evaluate_system(&start, &bounds).unwrap();
            let region = closed_form_region(&bounds);
            for _ in 0..2000 {
                let x: Vec<f64> = (0..2 * k).map(|_| rng.gen_range(0.0..1.5)).collect();
                let inside = numeric
                    .rows()
                    .iter()
                    .all(|(a, c)| a.iter().zip(&x).map(|(a, x)| a * x).sum::<f64>() <= *c);
                if inside {
                    assert!(
                        region.contains(&x[..k]).unwrap(),
                        "sample {x:?} projects outside"
                    );
                }
            }
        }
    }
}

#[test]
fn pruning_certificates_hold_for_random_tables() {
    let mut rng = seeded(14);
    for k in [2, 3] {
        let mut sys = build_system(k).unwrap();
        let tables: Vec<_> = (0..20)
            .map(|_| random_bounds(&mut rng, k).unwrap())
            .collect();
        let mut checked = 0;
        for i in (1..=k).rev() {
            let combined = eliminate(&sys, randomization_var(k, i)).unwrap();
            let (pruned, certificates) = prune_with_certificates(&combined).unwrap();
            for cert in &certificates {
                for bt in &tables {
                    assert!(
                        cert.verify(bt, 1e-10).unwrap(),
                        "certificate for {}",
                        cert.removed
                    );
                }
                checked += 1;
            }
            sys = pruned;
        }
        assert!(checked > 0, "no rows were pruned at k = {k}");
    }
}

#[test]
fn g_rows_reproduce_the_closed_form() {
    for k in 1..=5 {
        assert_eq!(
            apply_g(k).unwrap(),
            closed_form_system(k).unwrap(),
            "k = {k}"
        );
    }
}

#[test]
fn xor_and_region_from_the_symbolic_system() {
    let bounds = bound_table(&xor_and_example().joint().unwrap()).unwrap();
    let numeric = evaluate_system(&closed_form_system(2).unwrap(), &bounds).unwrap();
    let region = RateRegion::new(2, rate_part(&numeric, 2).unwrap()).unwrap();
    let rhs: Vec<f64> = region.rows().iter().map(|(_, c)| *c).collect();
    let expected = [0.688722, 0.688722, 0.188722];
    for (got, want) in rhs.iter().zip(expected) {
        assert!((got - want).abs() < 1e-6, "{rhs:?}");
    }
    assert!(region.contains(&[0.1, 0.05]).unwrap());
    assert!(!region.contains(&[0.15, 0.1]).unwrap());
}
