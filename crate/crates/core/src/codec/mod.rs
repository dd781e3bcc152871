//! Finite-field delivery: MDS generators, multicast encoding and per-user
//! decoding.
//!
//! Every requested packet `s` gets a coding vector built from the generator
//! columns of its colors, and the server sends `X = sum_s w_s v_s`, one row
//! per generator row. A user strips
//! the contributions of its cached packets and solves the remaining system
//! by Gaussian elimination, accepting only coordinates the system pins down.

mod field;
pub mod linalg;
mod mds;
pub mod payload;
mod rlc;

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coloring::{exact_local_chromatic, LocalColoringResult, SolverLimits};
use crate::conflict::ConflictGraph;
use crate::error::{Error, Result};
use crate::model::{CachePlacement, PacketLabel, RequestMatrix};
use crate::rational::{from_usize, Rational};

pub use field::{is_irreducible, smallest_irreducible, FieldElement, GaloisField};
pub use mds::{build_mds_generator, GeneratorMatrix};
pub use rlc::{random_linear_length, random_linear_rate};

/// Packet contents: `width` field symbols per packet.
pub type SymbolMap = BTreeMap<PacketLabel, Vec<FieldElement>>;

/// The multicast transmission: `rows()` coded packets of `width` symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    rows: Vec<Vec<FieldElement>>,
    width: usize,
}

impl Codeword {
    pub fn new(rows: Vec<Vec<FieldElement>>, width: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == width));
        Codeword { rows, width }
    }

    /// Number of coded packets, `nu`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    /// Length in file units, `nu / C(n, t)`.
    pub fn rate(&self, packets_per_file: usize) -> Rational {
        from_usize(self.len()) / from_usize(packets_per_file)
    }
}

/// Everything the server and the users share for one request matrix.
#[derive(Clone, Debug)]
pub struct DeliveryPlan {
    pub graph: ConflictGraph,
    pub coloring: LocalColoringResult,
    pub generator: GeneratorMatrix,
}

/// Random generators tried when the Vandermonde one leaves a user stuck.
const RANDOM_GENERATOR_ATTEMPTS: u64 = 16;
const RANDOM_GENERATOR_DEGREE: u32 = 16;

impl DeliveryPlan {
    /// Exact coloring plus a generator over the smallest field of degree at
    /// least `min_degree` holding `|c|` distinct nonzero points.
    ///
    /// A packet whose vertices carry several colors is coded with the sum of
    /// their columns. Any `chi_l` columns of the Vandermonde generator are
    /// independent, which settles packet-consistent colorings; otherwise a
    /// user may face more than `chi_l` columns, so decodability is checked
    /// and, if needed, seeded random generators over the same field and then
    /// over GF(2^16) are tried.
    /// These work for all but a vanishing fraction of draws because every
    /// user's system only spans `chi_l` dimensions.
    pub fn new(graph: ConflictGraph, limits: &SolverLimits, min_degree: u32, packet_consistent: bool) -> Result<Self> {
        let coloring = exact_local_chromatic(graph.digraph(), packet_consistent, limits)?;
        let palette = coloring.coloring.palette_size();
        let field = GaloisField::with_points(palette, min_degree)?;
        let generator = build_mds_generator(coloring.chi_l, palette, &field)?;
        let mut plan = DeliveryPlan {
            graph,
            coloring,
            generator,
        };
        let first = match check_decodable(&plan.graph, &plan.coloring, &plan.generator) {
            Ok(()) => return Ok(plan),
            Err(e) => e,
        };
        let degrees = [field.degree(), RANDOM_GENERATOR_DEGREE.max(field.degree())];
        for degree in degrees {
            let field = GaloisField::new(degree)?;
            for seed in 0..RANDOM_GENERATOR_ATTEMPTS {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                plan.generator = GeneratorMatrix::random(plan.coloring.chi_l, palette, &field, &mut rng);
                if check_decodable(&plan.graph, &plan.coloring, &plan.generator).is_ok() {
                    return Ok(plan);
                }
            }
        }
        Err(first)
    }

    pub fn field(&self) -> &GaloisField {
        self.generator.field()
    }

    pub fn encode(&self, symbols: &SymbolMap) -> Result<Codeword> {
        encode(&self.graph, &self.coloring, &self.generator, symbols)
    }

    pub fn decode_user(
        &self,
        user: usize,
        codeword: &Codeword,
        placement: &CachePlacement,
        cached: &SymbolMap,
        demands: &RequestMatrix,
    ) -> Result<SymbolMap> {
        decode_user(user, codeword, placement, cached, &self.graph, &self.coloring, &self.generator, demands)
    }
}

fn check_shapes(graph: &ConflictGraph, coloring: &LocalColoringResult, generator: &GeneratorMatrix) -> Result<()> {
    if coloring.coloring.colors().len() != graph.order() {
        return Err(Error::InvalidParams("coloring does not match the conflict graph".into()));
    }
    if generator.cols() != coloring.coloring.palette_size() || generator.rows() != coloring.chi_l {
        return Err(Error::InvalidParams(format!(
            "generator is {}x{}, coloring needs {}x{}",
            generator.rows(),
            generator.cols(),
            coloring.chi_l,
            coloring.coloring.palette_size()
        )));
    }
    Ok(())
}

/// Coding vector of every packet class: the sum of the generator columns of
/// the distinct colors on its vertices. With a packet-consistent coloring
/// this is just the column of the packet's color.
pub fn packet_vectors(
    graph: &ConflictGraph,
    coloring: &LocalColoringResult,
    generator: &GeneratorMatrix,
) -> Result<Vec<Vec<FieldElement>>> {
    check_shapes(graph, coloring, generator)?;
    let g = graph.digraph();
    let mut colors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.class_count()];
    for v in 0..g.order() {
        colors[g.class_of(v)].insert(coloring.coloring.color(v) - 1);
    }
    let field = generator.field();
    Ok(colors
        .iter()
        .map(|set| {
            (0..generator.rows())
                .map(|i| set.iter().fold(FieldElement::ZERO, |acc, &c| field.add(acc, generator.entry(i, c))))
                .collect()
        })
        .collect())
}

/// Uncached packet classes of `user`, and the positions among them of the
/// ones it requested.
fn user_system(graph: &ConflictGraph, user: usize) -> (Vec<usize>, Vec<usize>) {
    let packets = graph.packets();
    let unknown: Vec<usize> = (0..packets.len()).filter(|&c| !packets[c].contains_user(user)).collect();
    let g = graph.digraph();
    let wanted: BTreeSet<usize> = (0..g.order())
        .filter(|&v| graph.vertex(v).user == user)
        .map(|v| g.class_of(v))
        .collect();
    let requested = unknown
        .iter()
        .enumerate()
        .filter(|(_, c)| wanted.contains(c))
        .map(|(i, _)| i)
        .collect();
    (unknown, requested)
}

fn columns(vectors: &[Vec<FieldElement>], classes: &[usize], rows: usize) -> Vec<Vec<FieldElement>> {
    (0..rows)
        .map(|i| classes.iter().map(|&c| vectors[c][i]).collect())
        .collect()
}

/// Checks, without symbols, that every user can pin down each requested
/// packet.
pub fn check_decodable(graph: &ConflictGraph, coloring: &LocalColoringResult, generator: &GeneratorMatrix) -> Result<()> {
    let vectors = packet_vectors(graph, coloring, generator)?;
    for user in 1..=graph.params().users {
        let (unknown, requested) = user_system(graph, user);
        if requested.is_empty() {
            continue;
        }
        let determined = if generator.rows() == 0 {
            vec![false; unknown.len()]
        } else {
            linalg::determined_coordinates(generator.field(), &columns(&vectors, &unknown, generator.rows()))
        };
        if let Some(&i) = requested.iter().find(|&&i| !determined[i]) {
            return Err(Error::Undecodable {
                user,
                packet: graph.packet_of_class(unknown[i]).to_string(),
            });
        }
    }
    Ok(())
}

fn symbol_width(symbols: &SymbolMap) -> usize {
    symbols.values().next().map_or(1, Vec::len)
}

/// `X = V w`: each requested packet contributes its symbols times its
/// coding vector.
pub fn encode(
    graph: &ConflictGraph,
    coloring: &LocalColoringResult,
    generator: &GeneratorMatrix,
    symbols: &SymbolMap,
) -> Result<Codeword> {
    let vectors = packet_vectors(graph, coloring, generator)?;
    let field = generator.field();
    let width = symbol_width(symbols);
    let mut rows = vec![vec![FieldElement::ZERO; width]; generator.rows()];
    for (class, packet) in graph.packets().iter().enumerate() {
        let payload = symbols
            .get(packet)
            .ok_or_else(|| Error::MissingSymbol(packet.to_string()))?;
        if payload.len() != width {
            return Err(Error::InvalidParams(format!("packet {packet} has {} symbols, expected {width}", payload.len())));
        }
        for (row, &coeff) in rows.iter_mut().zip(&vectors[class]) {
            for (x, &w) in row.iter_mut().zip(payload) {
                *x = field.add(*x, field.mul(coeff, w));
            }
        }
    }
    Ok(Codeword::new(rows, width))
}

/// Recovers the packets `user` requested but does not cache.
///
/// Fails with [`Error::Undecodable`] if any of them is not uniquely
/// determined by the residual system.
#[allow(clippy::too_many_arguments)]
pub fn decode_user(
    user: usize,
    codeword: &Codeword,
    placement: &CachePlacement,
    cached: &SymbolMap,
    graph: &ConflictGraph,
    coloring: &LocalColoringResult,
    generator: &GeneratorMatrix,
    demands: &RequestMatrix,
) -> Result<SymbolMap> {
    let params = placement.params();
    if user == 0 || user > params.users {
        return Err(Error::InvalidParams(format!("user {user} outside 1..={}", params.users)));
    }
    demands.check_params(params)?;
    let vectors = packet_vectors(graph, coloring, generator)?;
    if codeword.len() != generator.rows() {
        return Err(Error::InvalidParams(format!(
            "codeword has {} rows, generator {}",
            codeword.len(),
            generator.rows()
        )));
    }
    let field = generator.field();
    let width = codeword.width();

    let mut residual = codeword.rows().to_vec();
    let mut unknown = Vec::new();
    for (class, packet) in graph.packets().iter().enumerate() {
        if !placement.is_cached(user, packet) {
            unknown.push(class);
            continue;
        }
        let payload = cached
            .get(packet)
            .ok_or_else(|| Error::MissingSymbol(packet.to_string()))?;
        for (row, &coeff) in residual.iter_mut().zip(&vectors[class]) {
            for (x, &w) in row.iter_mut().zip(payload) {
                *x = field.sub(*x, field.mul(coeff, w));
            }
        }
    }
    let system = columns(&vectors, &unknown, generator.rows());
    let solution = if generator.rows() == 0 {
        vec![None; unknown.len()]
    } else {
        linalg::solve_determined(field, &system, &residual)?
    };

    let mut out = SymbolMap::new();
    for v in graph.vertices().iter().filter(|v| v.user == user) {
        if !demands.requests(user, v.packet.file) {
            return Err(Error::InvalidParams(format!(
                "conflict graph lists {} for user {user}, who did not request it",
                v.packet
            )));
        }
        let idx = unknown
            .iter()
            .position(|&c| graph.packet_of_class(c) == &v.packet)
            .expect("requested packet is uncached");
        match &solution[idx] {
            Some(symbols) => {
                debug_assert_eq!(symbols.len(), width);
                out.insert(v.packet.clone(), symbols.clone());
            }
            None => {
                return Err(Error::Undecodable {
                    user,
                    packet: v.packet.to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// Cached contents of `user`, restricted from a full library map.
pub fn cache_contents(placement: &CachePlacement, user: usize, library: &SymbolMap) -> SymbolMap {
    placement
        .cache(user)
        .iter()
        .filter_map(|p| library.get(p).map(|s| (p.clone(), s.clone())))
        .collect()
}

/// Reassembles each requested file of `user` from cache and decoded packets;
/// `None` if a packet is missing.
pub fn reconstruct_files(
    placement: &CachePlacement,
    user: usize,
    demands: &RequestMatrix,
    cached: &SymbolMap,
    decoded: &SymbolMap,
) -> Option<BTreeMap<usize, Vec<Vec<FieldElement>>>> {
    demands
        .row(user)
        .iter()
        .map(|&file| {
            placement
                .packets_of(file)
                .map(|p| cached.get(&p).or_else(|| decoded.get(&p)).cloned())
                .collect::<Option<Vec<_>>>()
                .map(|packets| (file, packets))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::build_conflict_graph;
    use crate::model::{place_caches, SystemParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn library(placement: &CachePlacement, field: &GaloisField, seed: u64) -> SymbolMap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let files = placement.params().files;
        (1..=files)
            .flat_map(|f| placement.packets_of(f).collect::<Vec<_>>())
            .map(|p| (p, vec![FieldElement(rng.gen_range(0..field.order()) as u16)]))
            .collect()
    }

    fn setup(n: usize, m: usize, mem: usize, rows: Vec<Vec<usize>>) -> (CachePlacement, RequestMatrix, DeliveryPlan) {
        let p = SystemParams::with_int(n, m, mem, rows[0].len()).unwrap();
        let pl = place_caches(&p).unwrap();
        let f = RequestMatrix::for_params(&p, rows).unwrap();
        let g = build_conflict_graph(&pl, &f).unwrap();
        let plan = DeliveryPlan::new(g, &SolverLimits::default(), 8, true).unwrap();
        (pl, f, plan)
    }

    #[test]
    fn two_user_exchange() {
        // user 1 caches W{1}, wants file 1 -> needs W1{2}; user 2 wants W2{1}.
        let (pl, f, plan) = setup(2, 2, 1, vec![vec![1], vec![2]]);
        assert_eq!(plan.coloring.chi_l, 1);
        let lib = library(&pl, plan.field(), 1);
        let x = plan.encode(&lib).unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(x.rate(2), crate::rational::rat(1, 2));
        // Vandermonde row 0 is all ones: the codeword is the XOR of the two.
        let a = lib[&PacketLabel::new(1, vec![2])][0];
        let b = lib[&PacketLabel::new(2, vec![1])][0];
        assert_eq!(x.rows()[0][0], FieldElement(a.0 ^ b.0));
        for u in 1..=2 {
            let cached = cache_contents(&pl, u, &lib);
            let got = plan.decode_user(u, &x, &pl, &cached, &f).unwrap();
            assert_eq!(got.len(), 1);
            for (k, v) in &got {
                assert_eq!(&lib[k], v);
            }
        }
    }

    #[test]
    fn full_cache_sends_nothing() {
        let (pl, f, plan) = setup(3, 3, 3, vec![vec![1], vec![2], vec![3]]);
        let lib = library(&pl, plan.field(), 2);
        let x = plan.encode(&lib).unwrap();
        assert!(x.is_empty());
        for u in 1..=3 {
            let cached = cache_contents(&pl, u, &lib);
            assert!(plan.decode_user(u, &x, &pl, &cached, &f).unwrap().is_empty());
            let files = reconstruct_files(&pl, u, &f, &cached, &SymbolMap::new()).unwrap();
            assert_eq!(files.len(), 1);
        }
    }

    #[test]
    fn demo_worst_case_round_trip() {
        let (pl, f, plan) = setup(3, 3, 1, vec![vec![1, 2], vec![1, 2], vec![1, 3]]);
        assert_eq!(plan.coloring.chi_l, 5);
        for seed in 0..20 {
            let lib = library(&pl, plan.field(), seed);
            let x = plan.encode(&lib).unwrap();
            assert_eq!(x.len(), 5);
            assert_eq!(x.rate(3), crate::rational::rat(5, 3));
            for u in 1..=3 {
                let cached = cache_contents(&pl, u, &lib);
                let got = plan.decode_user(u, &x, &pl, &cached, &f).unwrap();
                let files = reconstruct_files(&pl, u, &f, &cached, &got).unwrap();
                for (file, packets) in files {
                    let expect: Vec<_> = pl.packets_of(file).map(|p| lib[&p].clone()).collect();
                    assert_eq!(packets, expect);
                }
            }
        }
    }

    #[test]
    fn missing_symbol() {
        let (pl, _, plan) = setup(2, 2, 1, vec![vec![1], vec![2]]);
        let mut lib = library(&pl, plan.field(), 3);
        lib.remove(&PacketLabel::new(1, vec![2]));
        assert!(matches!(plan.encode(&lib), Err(Error::MissingSymbol(_))));
    }

    #[test]
    fn split_packet_colors_round_trip() {
        // Repeated demands at n = 4, t = 1: the vertex-level optimum beats
        // any packet-consistent coloring and splits some packets.
        for rows in [vec![vec![1], vec![1], vec![2], vec![3]], vec![vec![1], vec![1], vec![1], vec![2]]] {
            let p = SystemParams::with_int(4, 4, 1, 1).unwrap();
            let pl = place_caches(&p).unwrap();
            let f = RequestMatrix::for_params(&p, rows).unwrap();
            let g = build_conflict_graph(&pl, &f).unwrap();
            let limits = SolverLimits::default();
            let free = DeliveryPlan::new(g.clone(), &limits, 8, false).unwrap();
            let tied = DeliveryPlan::new(g, &limits, 8, true).unwrap();
            assert!(free.coloring.chi_l <= tied.coloring.chi_l);
            for seed in 0..5 {
                let lib = library(&pl, free.field(), seed);
                let x = free.encode(&lib).unwrap();
                for u in 1..=4 {
                    let cached = cache_contents(&pl, u, &lib);
                    let got = free.decode_user(u, &x, &pl, &cached, &f).unwrap();
                    for (k, v) in &got {
                        assert_eq!(&lib[k], v);
                    }
                }
            }
        }
    }

    #[test]
    fn broken_generator_is_undecodable() {
        // Every packet gets the same coding vector: users cannot separate them.
        let (pl, f, plan) = setup(3, 3, 1, vec![vec![1], vec![2], vec![3]]);
        let g = plan.graph.digraph();
        let one_color = crate::coloring::LocalColoringResult {
            coloring: crate::coloring::Coloring::new(
                &crate::conflict::Digraph::new(g.order(), []).unwrap(),
                vec![1; g.order()],
            )
            .unwrap(),
            chi_l: 1,
        };
        let gen = build_mds_generator(1, 1, plan.field()).unwrap();
        let lib = library(&pl, plan.field(), 5);
        let x = encode(&plan.graph, &one_color, &gen, &lib).unwrap();
        let cached = cache_contents(&pl, 1, &lib);
        let err = decode_user(1, &x, &pl, &cached, &plan.graph, &one_color, &gen, &f).unwrap_err();
        assert!(matches!(err, Error::Undecodable { user: 1, .. }));
    }
}
