//! System parameters, packet labels and the combinatorial cache placement.
//!
//! Each file is split into `C(n, t)` packets, one per `t`-subset of users,
//! and user `u` stores every packet whose subset contains `u`. Users and
//! files are 1-based throughout.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, from_usize, Rational};

/// `(n, m, M, L)`: user count, library size, cache size in file units and
/// requests per user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemParams {
    pub users: usize,
    pub files: usize,
    #[serde(with = "rational::serde_str")]
    pub memory: Rational,
    pub requests: usize,
}

impl SystemParams {
    pub fn new(users: usize, files: usize, memory: Rational, requests: usize) -> Result<Self> {
        if users == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        if files == 0 {
            return Err(Error::InvalidParams("m must be positive".into()));
        }
        if memory.is_negative() || memory > from_usize(files) {
            return Err(Error::InvalidParams(format!(
                "M = {} must lie in [0, m = {files}]",
                rational::format(&memory)
            )));
        }
        if requests == 0 || requests > files {
            return Err(Error::InvalidParams(format!(
                "L = {requests} must lie in [1, m = {files}]"
            )));
        }
        Ok(SystemParams {
            users,
            files,
            memory,
            requests,
        })
    }

    /// Shorthand for integer cache sizes.
    pub fn with_int(users: usize, files: usize, memory: usize, requests: usize) -> Result<Self> {
        Self::new(users, files, from_usize(memory), requests)
    }

    /// The parameters at cache size `memory`, other fields unchanged.
    pub fn with_memory(&self, memory: Rational) -> Result<Self> {
        Self::new(self.users, self.files, memory, self.requests)
    }

    pub fn with_requests(&self, requests: usize) -> Result<Self> {
        Self::new(self.users, self.files, self.memory.clone(), requests)
    }

    /// `t = nM/m`.
    pub fn t(&self) -> Rational {
        &self.memory * from_usize(self.users) / from_usize(self.files)
    }

    pub fn integer_t(&self) -> Option<usize> {
        rational::as_usize(&self.t())
    }

    pub fn require_integer_t(&self) -> Result<usize> {
        self.integer_t().ok_or_else(|| Error::NonIntegerT {
            t: rational::format(&self.t()),
        })
    }

    /// Cache size reached by placement parameter `t`, i.e. `tm/n`.
    pub fn memory_at(&self, t: usize) -> Rational {
        from_usize(t * self.files) / from_usize(self.users)
    }

    /// Packets per file, `C(n, t)`. Requires integer `t`.
    pub fn packets_per_file(&self) -> Result<usize> {
        Ok(binomial(self.users, self.require_integer_t()?))
    }
}

impl fmt::Display for SystemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} m={} M={} L={}",
            self.users,
            self.files,
            rational::format(&self.memory),
            self.requests
        )
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `t`-subsets of `{1..n}` in lexicographic order.
pub fn subsets(n: usize, t: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            if n - x + 1 < left {
                break;
            }
            cur.push(x);
            rec(x + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(n, t));
    rec(1, n, t, &mut Vec::with_capacity(t), &mut out);
    out
}

/// A packet: the part of `file` labelled by the user subset `subset`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PacketLabel {
    pub file: usize,
    pub subset: Vec<usize>,
}

impl PacketLabel {
    pub fn new(file: usize, mut subset: Vec<usize>) -> Self {
        subset.sort_unstable();
        subset.dedup();
        PacketLabel { file, subset }
    }

    pub fn contains_user(&self, user: usize) -> bool {
        self.subset.binary_search(&user).is_ok()
    }

    /// Bitmask of the subset, bit `u` for user `u`.
    pub fn subset_mask(&self) -> u64 {
        self.subset.iter().fold(0u64, |acc, &u| acc | (1u64 << u))
    }
}

impl fmt::Display for PacketLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}{{", self.file)?;
        for (i, u) in self.subset.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{u}")?;
        }
        f.write_str("}")
    }
}

/// Per-user lists of `L` distinct requested files.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RequestMatrix {
    rows: Vec<Vec<usize>>,
    files: usize,
}

impl RequestMatrix {
    pub fn new(files: usize, requests: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidRequests("no users".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            let user = i + 1;
            if row.len() != requests {
                return Err(Error::InvalidRequests(format!(
                    "user {user} has {} requests, expected L = {requests}",
                    row.len()
                )));
            }
            let mut seen = HashSet::new();
            for &f in row {
                if f == 0 || f > files {
                    return Err(Error::InvalidRequests(format!(
                        "user {user} requests file {f}, outside 1..={files}"
                    )));
                }
                if !seen.insert(f) {
                    return Err(Error::InvalidRequests(format!(
                        "user {user} requests file {f} more than once"
                    )));
                }
            }
        }
        Ok(RequestMatrix { rows, files })
    }

    pub fn for_params(params: &SystemParams, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.len() != params.users {
            return Err(Error::InvalidRequests(format!(
                "{} request rows for n = {} users",
                rows.len(),
                params.users
            )));
        }
        Self::new(params.files, params.requests, rows)
    }

    pub fn users(&self) -> usize {
        self.rows.len()
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn requests_per_user(&self) -> usize {
        self.rows[0].len()
    }

    /// Requests of user `user` (1-based) in their given order.
    pub fn row(&self, user: usize) -> &[usize] {
        &self.rows[user - 1]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn requests(&self, user: usize, file: usize) -> bool {
        self.row(user).contains(&file)
    }

    pub fn check_params(&self, params: &SystemParams) -> Result<()> {
        if self.users() != params.users
            || self.files != params.files
            || self.requests_per_user() != params.requests
        {
            return Err(Error::InvalidRequests(format!(
                "request matrix is {} users x {} requests over {} files, parameters are {params}",
                self.users(),
                self.requests_per_user(),
                self.files
            )));
        }
        Ok(())
    }
}

/// The cache contents `Z_u` as sets of packet labels.
#[derive(Clone, Debug)]
pub struct CachePlacement {
    params: SystemParams,
    t: usize,
    subsets: Vec<Vec<usize>>,
    caches: Vec<BTreeSet<PacketLabel>>,
}

impl CachePlacement {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Subset labels shared by every file, lexicographic.
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn packets_per_file(&self) -> usize {
        self.subsets.len()
    }

    pub fn cache(&self, user: usize) -> &BTreeSet<PacketLabel> {
        &self.caches[user - 1]
    }

    pub fn is_cached(&self, user: usize, packet: &PacketLabel) -> bool {
        packet.contains_user(user)
    }

    /// All packets of `file` in label order.
    pub fn packets_of(&self, file: usize) -> impl Iterator<Item = PacketLabel> + '_ {
        self.subsets
            .iter()
            .map(move |s| PacketLabel::new(file, s.clone()))
    }
}

pub const MAX_PLACEMENT_USERS: usize = 63;

/// Builds the placement for integer `t`.
pub fn place_caches(params: &SystemParams) -> Result<CachePlacement> {
    let t = params.require_integer_t()?;
    // subsets are stored as bitmasks in the conflict graph
    if params.users > MAX_PLACEMENT_USERS {
        return Err(Error::TooLarge {
            solver: "cache placement",
            size: params.users,
            limit: MAX_PLACEMENT_USERS,
        });
    }
    let subsets = subsets(params.users, t);
    let caches = (1..=params.users)
        .map(|u| {
            (1..=params.files)
                .flat_map(|f| {
                    subsets
                        .iter()
                        .filter(move |s| s.contains(&u))
                        .map(move |s| PacketLabel::new(f, s.clone()))
                })
                .collect()
        })
        .collect();
    Ok(CachePlacement {
        params: params.clone(),
        t,
        subsets,
        caches,
    })
}

/// The uncached packets of every requested file, as `(user, packet)` pairs
/// sorted by user, then file, then subset.
pub fn requested_vertices(
    placement: &CachePlacement,
    demands: &RequestMatrix,
) -> Result<Vec<(usize, PacketLabel)>> {
    demands.check_params(placement.params())?;
    let mut out = Vec::new();
    for user in 1..=demands.users() {
        let mut files: Vec<usize> = demands.row(user).to_vec();
        files.sort_unstable();
        for file in files {
            for subset in placement.subsets() {
                if !subset.contains(&user) {
                    out.push((user, PacketLabel::new(file, subset.clone())));
                }
            }
        }
    }
    Ok(out)
}

/// Integer-`t` cache sizes bracketing `M` with convex weights summing to one.
pub fn memory_share_points(params: &SystemParams) -> Vec<(Rational, Rational)> {
    let t = params.t();
    if t.is_integer() {
        return vec![(params.memory.clone(), Rational::one())];
    }
    let lower = t.floor();
    let upper = &lower + Rational::one();
    let lo_t = rational::floor_usize(&lower);
    let upper_weight = &t - &lower;
    let lower_weight = &upper - &t;
    debug_assert!(!lower_weight.is_zero() && !upper_weight.is_zero());
    vec![
        (params.memory_at(lo_t), lower_weight),
        (params.memory_at(lo_t + 1), upper_weight),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn demo_placement() {
        let p = SystemParams::with_int(3, 3, 1, 2).unwrap();
        let pl = place_caches(&p).unwrap();
        assert_eq!(pl.t(), 1);
        for u in 1..=3 {
            let cache = pl.cache(u);
            assert_eq!(cache.len(), 3);
            assert!(cache.iter().all(|l| l.subset == vec![u]));
        }
    }

    #[test]
    fn zero_memory_empty_caches() {
        let p = SystemParams::with_int(3, 3, 0, 1).unwrap();
        let pl = place_caches(&p).unwrap();
        assert_eq!(pl.t(), 0);
        assert_eq!(pl.packets_per_file(), 1);
        assert!((1..=3).all(|u| pl.cache(u).is_empty()));
    }

    #[test]
    fn four_users_two_files() {
        let p = SystemParams::with_int(4, 2, 1, 1).unwrap();
        let pl = place_caches(&p).unwrap();
        assert_eq!(pl.t(), 2);
        let c1 = pl.cache(1);
        // Subsets of {1..4} of size 2 containing 1, enumerated independently.
        let mut expected = BTreeSet::new();
        for f in 1..=2 {
            for other in 2..=4 {
                expected.insert(PacketLabel::new(f, vec![1, other]));
            }
        }
        assert_eq!(c1, &expected);
        assert_eq!(c1.len(), 2 * binomial(3, 1));
    }

    #[test]
    fn non_integer_t_rejected() {
        let p = SystemParams::new(4, 4, rat(3, 2), 1).unwrap();
        assert!(matches!(place_caches(&p), Err(Error::NonIntegerT { .. })));
    }

    #[test]
    fn requested_vertex_counts() {
        let p = SystemParams::with_int(3, 3, 1, 1).unwrap();
        let pl = place_caches(&p).unwrap();
        let f = RequestMatrix::new(3, 1, vec![vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(requested_vertices(&pl, &f).unwrap().len(), 6);

        let full = SystemParams::with_int(3, 3, 3, 1).unwrap();
        let pl = place_caches(&full).unwrap();
        assert!(requested_vertices(&pl, &f).unwrap().is_empty());

        let p = SystemParams::with_int(3, 3, 1, 2).unwrap();
        let pl = place_caches(&p).unwrap();
        let f = RequestMatrix::new(3, 2, vec![vec![1, 2], vec![2, 3], vec![3, 1]]).unwrap();
        let verts = requested_vertices(&pl, &f).unwrap();
        assert_eq!(verts.len(), 12);
        // user 1 misses subsets {2} and {3} of files 1 and 2
        let u1: Vec<_> = verts.iter().filter(|(u, _)| *u == 1).map(|(_, l)| l.clone()).collect();
        assert_eq!(
            u1,
            vec![
                PacketLabel::new(1, vec![2]),
                PacketLabel::new(1, vec![3]),
                PacketLabel::new(2, vec![2]),
                PacketLabel::new(2, vec![3]),
            ]
        );
    }

    #[test]
    fn request_validation() {
        assert!(RequestMatrix::new(3, 2, vec![vec![1, 1]]).is_err());
        assert!(RequestMatrix::new(3, 1, vec![vec![4]]).is_err());
        assert!(RequestMatrix::new(3, 1, vec![vec![0]]).is_err());
        assert!(RequestMatrix::new(3, 2, vec![vec![1]]).is_err());
        let p = SystemParams::with_int(3, 3, 1, 1).unwrap();
        let pl = place_caches(&p).unwrap();
        let two_users = RequestMatrix::new(3, 1, vec![vec![1], vec![2]]).unwrap();
        assert!(requested_vertices(&pl, &two_users).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::with_int(0, 3, 1, 1).is_err());
        assert!(SystemParams::with_int(3, 3, 4, 1).is_err());
        assert!(SystemParams::with_int(3, 3, 1, 4).is_err());
        assert!(SystemParams::with_int(3, 3, 1, 0).is_err());
        assert!(SystemParams::new(3, 3, int(-1), 1).is_err());
        assert_eq!(SystemParams::with_int(3, 3, 3, 1).unwrap().integer_t(), Some(3));
        assert_eq!(SystemParams::with_int(3, 3, 0, 1).unwrap().integer_t(), Some(0));
    }

    #[test]
    fn share_points() {
        let p = SystemParams::new(4, 4, rat(3, 2), 1).unwrap();
        assert_eq!(
            memory_share_points(&p),
            vec![(int(1), rat(1, 2)), (int(2), rat(1, 2))]
        );
        let p = SystemParams::new(4, 4, rat(1, 4), 1).unwrap();
        assert_eq!(
            memory_share_points(&p),
            vec![(int(0), rat(3, 4)), (int(1), rat(1, 4))]
        );
        let p = SystemParams::with_int(3, 3, 1, 1).unwrap();
        assert_eq!(memory_share_points(&p), vec![(int(1), int(1))]);
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets(3, 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(subsets(5, 2).len(), binomial(5, 2));
    }
}
