//! Random linear coding baseline.

use rand::Rng;

use super::field::{FieldElement, GaloisField};
use super::linalg::determined_coordinates;
use crate::conflict::ConflictGraph;
use crate::rational::{from_usize, Rational};

/// Smallest `nu` for which `trials` independent uniformly random
/// `nu x |S|` coding matrices all let every user pin down each of its
/// requested packets.
pub fn random_linear_length<R: Rng + ?Sized>(
    graph: &ConflictGraph,
    trials: usize,
    field: &GaloisField,
    rng: &mut R,
) -> usize {
    let packets = graph.packets();
    let users = graph.params().users;
    // (unknown classes, positions of requested classes among them) per user
    let systems: Vec<(Vec<usize>, Vec<usize>)> = (1..=users)
        .map(|u| {
            let unknown: Vec<usize> = (0..packets.len())
                .filter(|&c| !packets[c].contains_user(u))
                .collect();
            let requested: Vec<usize> = unknown
                .iter()
                .enumerate()
                .filter(|&(_, &c)| graph.vertices().iter().any(|v| v.user == u && v.packet == packets[c]))
                .map(|(i, _)| i)
                .collect();
            (unknown, requested)
        })
        .filter(|(_, requested)| !requested.is_empty())
        .collect();
    let floor = systems.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
    let mut nu = floor;
    loop {
        if nu == 0 || (0..trials.max(1)).all(|_| trial(nu, packets.len(), &systems, field, rng)) {
            return nu;
        }
        nu += 1;
    }
}

fn trial<R: Rng + ?Sized>(
    nu: usize,
    width: usize,
    systems: &[(Vec<usize>, Vec<usize>)],
    field: &GaloisField,
    rng: &mut R,
) -> bool {
    let matrix: Vec<Vec<FieldElement>> = (0..nu)
        .map(|_| (0..width).map(|_| FieldElement(rng.gen_range(0..field.order()) as u16)).collect())
        .collect();
    systems.iter().all(|(unknown, requested)| {
        let sub: Vec<Vec<FieldElement>> = matrix
            .iter()
            .map(|row| unknown.iter().map(|&c| row[c]).collect())
            .collect();
        let determined = determined_coordinates(field, &sub);
        requested.iter().all(|&i| determined[i])
    })
}

/// [`random_linear_length`] in file units.
pub fn random_linear_rate<R: Rng + ?Sized>(
    graph: &ConflictGraph,
    trials: usize,
    field: &GaloisField,
    rng: &mut R,
) -> Rational {
    from_usize(random_linear_length(graph, trials, field, rng)) / from_usize(graph.packets_per_file())
}
