#![allow(dead_code)]

use proptest::prelude::*;
use skorokhod::AtomicMeasure;

/// Probability measures with up to `max_atoms` atoms in `[-10, 10]`.
pub fn measure(max_atoms: usize) -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((-10.0f64..10.0, 0.05f64..1.0), 1..=max_atoms).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        AtomicMeasure::probability(atoms.into_iter().map(|(x, w)| (x, w / total))).unwrap()
    })
}

/// Same, with positions on the grid `k/4`, so that ties between atoms,
/// interval ends and kinks actually occur.
pub fn grid_measure(max_atoms: usize) -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((-40i32..=40, 1u32..=8), 1..=max_atoms).prop_map(|atoms| {
        let total: u32 = atoms.iter().map(|a| a.1).sum();
        AtomicMeasure::probability(
            atoms
                .into_iter()
                .map(|(k, w)| (k as f64 / 4.0, w as f64 / total as f64)),
        )
        .unwrap()
    })
}

pub fn two_point() -> AtomicMeasure {
    AtomicMeasure::probability([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
}

pub fn span(ms: &[&AtomicMeasure]) -> f64 {
    ms.iter()
        .flat_map(|m| m.positions())
        .fold(1.0, |s: f64, x| s.max(x.abs()))
}
