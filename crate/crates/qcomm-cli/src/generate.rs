//! Seeded instance generation for `qcomm instance` and sweeps.

use qcomm::instances::{
    bit_table_regression, coordinator_split, disjointness_regression, fourier_sampling, gamma_regression,
    hadamard_hamiltonian, hamiltonian_split, identity, index_pauli, multiparty_regression, permutation_index,
    random_regression, scaled_disjointness, sq_counterexample, sum_split, Instance, InstanceKind, SqVariant,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Settings;
use crate::CliError;

/// `parts` subsets of `[0, universe)` sharing exactly `overlap` common
/// elements, each with its own private elements as well.
pub fn overlapping_sets<R: Rng>(
    rng: &mut R,
    universe: usize,
    parts: usize,
    overlap: usize,
) -> Result<Vec<Vec<usize>>, CliError> {
    let private = universe.saturating_sub(overlap) / (2 * parts);
    if private == 0 {
        return Err(CliError::Config(format!("universe {universe} too small for {parts} sets with overlap {overlap}")));
    }
    let mut pool: Vec<usize> = (0..universe).collect();
    pool.shuffle(rng);
    let (common, rest) = pool.split_at(overlap);
    Ok((0..parts)
        .map(|k| {
            let mut set: Vec<usize> = common.iter().chain(&rest[k * private..(k + 1) * private]).copied().collect();
            set.sort_unstable();
            set
        })
        .collect())
}

fn sign_table<R: Rng>(rng: &mut R, len: usize) -> Vec<i8> {
    (0..len).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

fn table_len(n: usize) -> Result<usize, CliError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(CliError::Config(format!("n = {n} must be a power of two, at least 2")));
    }
    Ok(n)
}

/// Builds an instance of `kind` from the settings; equal settings give
/// equal instances.
pub fn generate(kind: InstanceKind, s: &Settings) -> Result<Instance, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let n = s.n;
    let inst = match kind {
        InstanceKind::Identity => identity(n)?,
        InstanceKind::Regression => random_regression(&mut rng, s.m.unwrap_or(n), n, s.kappa_target)?,
        InstanceKind::Disjointness => {
            let sets = overlapping_sets(&mut rng, n, 2, s.overlap)?;
            disjointness_regression(&sets[0], &sets[1], n, n, None)?
        }
        InstanceKind::Gamma => {
            let sets = overlapping_sets(&mut rng, n, 2, s.overlap)?;
            gamma_regression(&sets[0], &sets[1], n)?
        }
        InstanceKind::ScaledDisjointness => {
            let sets = overlapping_sets(&mut rng, n, 2, s.overlap)?;
            scaled_disjointness(&sets[0], &sets[1], n)?
        }
        InstanceKind::PermutationIndex => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            permutation_index(&perm, rng.gen_range(0..n))?
        }
        InstanceKind::IndexPauli => {
            let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            index_pauli(&bits, rng.gen_range(0..n))?
        }
        InstanceKind::IndexRegression => {
            let m = s.m.unwrap_or(n);
            let bits: Vec<Vec<bool>> = (0..m).map(|_| (0..n).map(|_| rng.gen()).collect()).collect();
            bit_table_regression(&bits, rng.gen_range(0..m), rng.gen_range(0..n))?
        }
        InstanceKind::Fourier => {
            let len = table_len(n)?;
            let f = sign_table(&mut rng, len);
            fourier_sampling(&f, &sign_table(&mut rng, len))?
        }
        InstanceKind::HadamardHamiltonian => {
            let len = table_len(n)?;
            let f = sign_table(&mut rng, len);
            hadamard_hamiltonian(&f, &sign_table(&mut rng, len))?
        }
        InstanceKind::Multiparty => {
            let sets = overlapping_sets(&mut rng, n, s.r, s.overlap)?;
            multiparty_regression(&sets, n, None)?
        }
        InstanceKind::SqCounterexample => {
            let sets = overlapping_sets(&mut rng, n, 2, s.overlap)?;
            let bits = |set: &[usize]| -> Vec<bool> { (0..n).map(|i| set.contains(&i)).collect() };
            let variant = if s.variant == 1 { SqVariant::Scaled } else { SqVariant::SmallOverlap };
            sq_counterexample(&bits(&sets[0]), &bits(&sets[1]), variant)?
        }
        InstanceKind::CoordinatorSplit => coordinator_split(&mut rng, n, s.r, s.kappa_target)?,
        InstanceKind::SumSplit => sum_split(&mut rng, n, s.r, s.kappa_target)?,
        InstanceKind::HamiltonianSplit => hamiltonian_split(&mut rng, n, s.r, s.time, s.norm_budget)?,
    };
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_share_exactly_the_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for overlap in 0..3 {
            let sets = overlapping_sets(&mut rng, 12, 3, overlap).unwrap();
            let common = sets[0].iter().filter(|i| sets[1].contains(i) && sets[2].contains(i)).count();
            assert_eq!(common, overlap);
            assert!(sets.iter().all(|s| s.len() > overlap));
        }
        assert!(overlapping_sets(&mut rng, 3, 2, 2).is_err());
    }

    #[test]
    fn every_kind_builds_with_defaults() {
        for kind in InstanceKind::ALL {
            let inst = generate(kind, &Settings::default()).unwrap();
            assert_eq!(inst.kind, kind);
            assert_eq!(generate(kind, &Settings::default()).unwrap(), inst);
        }
    }
}
