//! Oracle equivalence of the reduction: the multiset of reduced roots
//! (shifted by the open-channel energy and reconciled with dropped poles)
//! must reproduce the dense full spectrum on every generated instance.

use nalgebra::DMatrix;

use qbeat_core::{
    assemble_state, born_probabilities, build_ep, find_all_roots, group_realisations,
    random_system, reconciled_roots, solve_full, solve_truncated, BornReference, ChannelSet,
    CoupledSystem, GridSpec, GroupingPolicy, SizeBounds, SolverParams,
};

fn reduce_and_compare(system: &CoupledSystem) -> (usize, f64) {
    let params = SolverParams::default();
    let truncated = solve_truncated(system).unwrap();
    let ep = build_ep(system, &truncated, &params);
    let roots = find_all_roots(&ep, system.background(), &params).unwrap();
    let all = reconciled_roots(&ep, &roots);

    let full = solve_full(system);
    assert_eq!(all.len(), full.len(), "root multiset size");
    let worst_residual = full.residuals().iter().cloned().fold(0.0, f64::max);
    assert!(worst_residual <= 1e-10, "oracle residual {worst_residual}");

    let eps0 = system.channels().energy(0);
    let mut worst = 0.0_f64;
    for (root, &oracle) in all.iter().zip(full.eigenvalues()) {
        let dev = (root.eta + eps0 - oracle).abs() / oracle.abs().max(1.0);
        worst = worst.max(dev);
    }
    (all.len(), worst)
}

#[test]
fn hundred_random_systems_reduce_exactly() {
    let bounds = SizeBounds::default();
    let mut worst = 0.0_f64;
    for seed in 0..100u64 {
        let instance = random_system(seed, &bounds);
        let expected = instance.system.full_dim();
        let (count, dev) = reduce_and_compare(&instance.system);
        assert_eq!(count, expected, "seed {seed}");
        assert!(dev <= 1e-8, "seed {seed}: worst relative deviation {dev}");
        worst = worst.max(dev);
    }
    println!("worst relative deviation across 100 systems: {worst:e}");
}

#[test]
fn assembled_states_match_full_eigenvectors() {
    let bounds = SizeBounds {
        nq: (2, 5),
        nxi: (2, 10),
    };
    let params = SolverParams::default();
    for seed in [3u64, 11, 40, 77, 91] {
        let instance = random_system(seed, &bounds);
        let sys = &instance.system;
        let truncated = solve_truncated(sys).unwrap();
        let ep = build_ep(sys, &truncated, &params);
        let roots = find_all_roots(&ep, sys.background(), &params).unwrap();
        let all = reconciled_roots(&ep, &roots);
        let full = solve_full(sys);

        for (j, root) in all.iter().enumerate() {
            let state = assemble_state(sys, &truncated, root, &params).unwrap();
            let mut got = state.full_vector();
            let oracle = full.eigenvector(j).clone_owned();
            if got.dot(&oracle) < 0.0 {
                got.neg_mut();
            }
            let err = (got - oracle).norm();
            assert!(err <= 1e-7, "seed {seed}, root {j}: vector error {err}");
        }
    }
}

/// Two exactly identical disconnected wells: poles and roots come in exact
/// degenerate pairs (exercising the merged-pole path), eigenvectors localize
/// one per well, and a well-symmetric reference gives the two clusters equal
/// projection probability.
#[test]
fn twin_well_mirror_groups_get_equal_born_alpha() {
    let grid = GridSpec::new(vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0], vec![1.0; 6], "twin").unwrap();
    let channels = ChannelSet::new(vec![0.0, 1.0], None).unwrap();
    let well = [[-0.4, 0.15, 0.0], [0.15, -0.1, 0.15], [0.0, 0.15, 0.3]];
    let mut h_g = DMatrix::zeros(6, 6);
    for i in 0..3 {
        for j in 0..3 {
            h_g[(i, j)] = well[i][j];
            h_g[(3 + i, 3 + j)] = well[i][j];
        }
    }
    let coupling_diag = [0.45, 0.6, 0.35];
    let mut v01 = DMatrix::zeros(6, 6);
    for i in 0..3 {
        v01[(i, i)] = coupling_diag[i];
        v01[(3 + i, 3 + i)] = coupling_diag[i];
    }
    let z = DMatrix::zeros(6, 6);
    let sys = CoupledSystem::new(grid, channels, h_g, vec![z.clone(), v01.clone(), v01, z]).unwrap();

    let params = SolverParams::default();
    let truncated = solve_truncated(&sys).unwrap();
    let ep = build_ep(&sys, &truncated, &params);
    // Exact degeneracy: every pole group must have merged a twin pair.
    assert!(ep.groups().iter().all(|g| g.residues.len() == 2));

    let roots = find_all_roots(&ep, sys.background(), &params).unwrap();
    let all = reconciled_roots(&ep, &roots);
    assert_eq!(all.len(), sys.full_dim());

    // Reduction stays exact under degeneracy.
    let full = solve_full(&sys);
    for (root, &oracle) in all.iter().zip(full.eigenvalues()) {
        assert!((root.eta - oracle).abs() <= 1e-8, "{} vs {oracle}", root.eta);
    }

    let states: Vec<_> = roots
        .iter()
        .map(|r| assemble_state(&sys, &truncated, r, &params).unwrap())
        .collect();

    // States localize on one well each; clustering splits them at ξ = 0.
    let set = group_realisations(&states, GroupingPolicy::Cluster { delta: 1.5 });
    assert_eq!(set.num_groups(), 2, "centres: {:?}", set.centres());
    assert!(set.centres()[0] < 0.0 && set.centres()[1] > 0.0);

    let (_, alpha) = born_probabilities(&states, &BornReference::UniformVector, &set).unwrap();
    assert!(
        (alpha[0] - alpha[1]).abs() <= 1e-10,
        "mirror groups got {alpha:?}"
    );
    let sum: f64 = alpha.iter().sum();
    assert!((sum - 1.0).abs() <= 1e-12);
}
