//! Demand enumeration and batch evaluation.
//!
//! The placement is symmetric under relabeling users (applied inside the
//! packet subsets as well) and under relabeling files, and both symmetries
//! preserve the local chromatic number. Worst-case sweeps therefore only
//! visit one request matrix per orbit: rows sorted, then the lexicographic
//! minimum over file permutations.
//!
//! Batches run on rayon when the `parallel` feature is on and
//! [`Execution::Parallel`] is requested; results are reduced in input order,
//! so the output does not depend on scheduling.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::ExactOptions;
use crate::codec::{cache_contents, reconstruct_files, DeliveryPlan, FieldElement, GaloisField, SymbolMap};
use crate::coloring::exact_local_chromatic;
use crate::conflict::build_conflict_graph;
use crate::error::{Error, Result};
use crate::model::{binomial, place_caches, subsets, RequestMatrix, SystemParams};
use crate::rational::{from_usize, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// `f` over `items`, in order.
pub fn map_ordered<T, R, F>(items: &[T], execution: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
        }
        _ => items.iter().enumerate().map(|(i, x)| f(i, x)).collect(),
    }
}

/// All permutations of `0..k` (lexicographic).
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Above this library size only the user symmetry is reduced.
const MAX_PERMUTED_FILES: usize = 8;

fn canonical_with(rows: &[Vec<usize>], perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let relabel = |perm: Option<&Vec<usize>>| {
        let mut out: Vec<Vec<usize>> = rows
            .iter()
            .map(|row| {
                let mut r: Vec<usize> = row
                    .iter()
                    .map(|&f| perm.map_or(f, |p| p[f - 1] + 1))
                    .collect();
                r.sort_unstable();
                r
            })
            .collect();
        out.sort();
        out
    };
    if perms.is_empty() {
        return relabel(None);
    }
    perms.iter().map(|p| relabel(Some(p))).min().expect("at least one permutation")
}

/// Orbit representative of a request matrix: each row sorted, rows sorted,
/// minimized over file relabelings.
pub fn canonical_form(demands: &RequestMatrix) -> Vec<Vec<usize>> {
    let perms = if demands.files() <= MAX_PERMUTED_FILES {
        permutations(demands.files())
    } else {
        Vec::new()
    };
    canonical_with(demands.rows(), &perms)
}

fn multiset_count(kinds: usize, picks: usize) -> usize {
    if kinds == 0 {
        return usize::from(picks == 0);
    }
    binomial(kinds + picks - 1, picks)
}

/// Every request matrix with each user's files in increasing order.
pub fn all_demands(params: &SystemParams, max: usize) -> Result<Vec<RequestMatrix>> {
    let rows = subsets(params.files, params.requests);
    let total = (0..params.users).try_fold(1usize, |acc, _| acc.checked_mul(rows.len()));
    match total {
        Some(t) if t <= max => {}
        _ => {
            return Err(Error::TooLarge {
                solver: "demand enumeration",
                size: total.unwrap_or(usize::MAX),
                limit: max,
            })
        }
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; params.users];
    loop {
        let matrix = idx.iter().map(|&i| rows[i].clone()).collect();
        out.push(RequestMatrix::for_params(params, matrix)?);
        let mut pos = params.users;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < rows.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// One request matrix per symmetry orbit, in increasing canonical order.
pub fn canonical_demands(params: &SystemParams, max: usize) -> Result<Vec<RequestMatrix>> {
    let rows = subsets(params.files, params.requests);
    let count = multiset_count(rows.len(), params.users);
    if count > max {
        return Err(Error::TooLarge {
            solver: "demand enumeration",
            size: count,
            limit: max,
        });
    }
    let perms = if params.files <= MAX_PERMUTED_FILES {
        permutations(params.files)
    } else {
        Vec::new()
    };
    let mut seen = BTreeSet::new();
    // non-decreasing row indices: user order is already quotiented out
    let mut idx = vec![0usize; params.users];
    loop {
        let matrix: Vec<Vec<usize>> = idx.iter().map(|&i| rows[i].clone()).collect();
        seen.insert(canonical_with(&matrix, &perms));
        let Some(pos) = (0..params.users).rev().find(|&p| idx[p] + 1 < rows.len()) else {
            break;
        };
        idx[pos] += 1;
        for p in pos + 1..params.users {
            idx[p] = idx[pos];
        }
    }
    seen.into_iter()
        .map(|rows| RequestMatrix::for_params(params, rows))
        .collect()
}

/// `L` distinct files per user, uniformly, sorted.
pub fn random_demands<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Result<RequestMatrix> {
    let rows = (0..params.users)
        .map(|_| {
            let mut row: Vec<usize> = sample(rng, params.files, params.requests)
                .into_iter()
                .map(|f| f + 1)
                .collect();
            row.sort_unstable();
            row
        })
        .collect();
    RequestMatrix::for_params(params, rows)
}

/// `chi_l` of one request matrix (integer `t`).
pub fn exact_chi(params: &SystemParams, demands: &RequestMatrix, options: &ExactOptions) -> Result<usize> {
    let placement = place_caches(params)?;
    let graph = build_conflict_graph(&placement, demands)?;
    Ok(exact_local_chromatic(graph.digraph(), options.packet_consistent, &options.limits)?.chi_l)
}

pub fn exact_rate(params: &SystemParams, demands: &RequestMatrix, options: &ExactOptions) -> Result<Rational> {
    let chi = exact_chi(params, demands, options)?;
    Ok(from_usize(chi) / from_usize(params.packets_per_file()?))
}

#[derive(Clone, Debug)]
pub struct WorstCase {
    pub chi_l: usize,
    pub rate: Rational,
    /// First canonical request matrix attaining the maximum.
    pub demands: RequestMatrix,
    pub evaluated: usize,
}

/// Maximum `chi_l` over all request matrices (integer `t`).
pub fn worst_case_exact(params: &SystemParams, options: &ExactOptions) -> Result<WorstCase> {
    let placement = place_caches(params)?;
    let demands = canonical_demands(params, options.max_demands)?;
    let values = map_ordered(&demands, options.execution, |_, f| {
        let graph = build_conflict_graph(&placement, f)?;
        Ok(exact_local_chromatic(graph.digraph(), options.packet_consistent, &options.limits)?.chi_l)
    });
    let values: Vec<usize> = values.into_iter().collect::<Result<_>>()?;
    let (best, chi) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(WorstCase {
        chi_l: chi,
        rate: from_usize(chi) / from_usize(placement.packets_per_file()),
        demands: demands[best].clone(),
        evaluated: demands.len(),
    })
}

fn stream_rng(seed: u64, stream: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Worst-case random linear coding rate (integer `t`).
pub fn worst_case_random_linear(params: &SystemParams, options: &ExactOptions) -> Result<Rational> {
    let placement = place_caches(params)?;
    let field = GaloisField::new(options.random_degree)?;
    let demands = canonical_demands(params, options.max_demands)?;
    let lengths = map_ordered(&demands, options.execution, |i, f| {
        let graph = build_conflict_graph(&placement, f)?;
        let mut rng = stream_rng(options.seed, i);
        Ok(crate::codec::random_linear_length(&graph, options.random_trials, &field, &mut rng))
    });
    let worst = lengths.into_iter().collect::<Result<Vec<usize>>>()?.into_iter().max().unwrap_or(0);
    Ok(from_usize(worst) / from_usize(placement.packets_per_file()))
}

/// Random linear coding rate for one request matrix (integer `t`).
pub fn random_linear_rate_for(params: &SystemParams, demands: &RequestMatrix, options: &ExactOptions) -> Result<Rational> {
    let placement = place_caches(params)?;
    let graph = build_conflict_graph(&placement, demands)?;
    let field = GaloisField::new(options.random_degree)?;
    let mut rng = stream_rng(options.seed, 0);
    Ok(crate::codec::random_linear_rate(&graph, options.random_trials, &field, &mut rng))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub matrices: usize,
    pub decodes: usize,
    /// Largest field degree any plan ended up using.
    pub max_degree: u32,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Encodes random packet contents for every matrix in `demands`, decodes at
/// every user and compares each requested file symbol by symbol. Each of the
/// `trials` draws gives every packet `width` independent symbols.
pub fn verify_round_trips(
    params: &SystemParams,
    demands: &[RequestMatrix],
    options: &ExactOptions,
    trials: usize,
    width: usize,
    min_degree: u32,
) -> Result<VerifyReport> {
    let placement = place_caches(params)?;
    let outcomes = map_ordered(demands, options.execution, |i, f| -> Result<(usize, u32, Vec<String>)> {
        let graph = build_conflict_graph(&placement, f)?;
        let plan = DeliveryPlan::new(graph, &options.limits, min_degree, options.packet_consistent)?;
        let field = plan.field().clone();
        let mut rng = stream_rng(options.seed, i);
        let mut failures = Vec::new();
        let mut decodes = 0;
        for trial in 0..trials {
            let library: SymbolMap = (1..=params.files)
                .flat_map(|file| placement.packets_of(file).collect::<Vec<_>>())
                .map(|p| {
                    let symbols = (0..width)
                        .map(|_| FieldElement(rng.gen_range(0..field.order()) as u16))
                        .collect();
                    (p, symbols)
                })
                .collect();
            let codeword = plan.encode(&library)?;
            if codeword.len() != plan.coloring.chi_l {
                failures.push(format!("{:?}: codeword length {} for chi_l {}", f.rows(), codeword.len(), plan.coloring.chi_l));
            }
            for user in 1..=params.users {
                decodes += 1;
                let cached = cache_contents(&placement, user, &library);
                let decoded = match plan.decode_user(user, &codeword, &placement, &cached, f) {
                    Ok(d) => d,
                    Err(e) => {
                        failures.push(format!("{:?} trial {trial} user {user}: {e}", f.rows()));
                        continue;
                    }
                };
                let files = reconstruct_files(&placement, user, f, &cached, &decoded);
                let ok = files.is_some_and(|files| {
                    files.iter().all(|(&file, packets)| {
                        placement
                            .packets_of(file)
                            .zip(packets)
                            .all(|(label, got)| library.get(&label) == Some(got))
                    })
                });
                if !ok {
                    failures.push(format!("{:?} trial {trial} user {user}: wrong symbols", f.rows()));
                }
            }
        }
        Ok((decodes, field.degree(), failures))
    });
    let mut report = VerifyReport {
        matrices: demands.len(),
        ..VerifyReport::default()
    };
    for outcome in outcomes {
        let (decodes, degree, failures) = outcome?;
        report.decodes += decodes;
        report.max_degree = report.max_degree.max(degree);
        report.failures.extend(failures);
    }
    Ok(report)
}
