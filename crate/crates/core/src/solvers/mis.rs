use crate::error::{Error, Result};
use crate::graph::MisInstance;

pub const EXACT_MIS_MAX_NODES: usize = 40;

struct Search {
    nbr: Vec<u64>,
    best: u64,
    best_size: u32,
}

impl Search {
    fn run(&mut self, cand: u64, chosen: u64) {
        let size = chosen.count_ones();
        if cand == 0 {
            if size > self.best_size {
                self.best_size = size;
                self.best = chosen;
            }
            return;
        }
        if size + cand.count_ones() <= self.best_size {
            return;
        }
        // lowest-degree vertex inside the candidate set, and the highest
        let (mut lo, mut lo_deg, mut hi, mut hi_deg) = (0, u32::MAX, 0, 0);
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.nbr[v] & cand).count_ones();
            if d < lo_deg {
                lo = v;
                lo_deg = d;
            }
            if d > hi_deg {
                hi = v;
                hi_deg = d;
            }
        }
        if lo_deg <= 1 {
            // a vertex of degree <= 1 belongs to some maximum independent set
            self.run(cand & !(self.nbr[lo] | 1 << lo), chosen | 1 << lo);
            return;
        }
        self.run(cand & !(self.nbr[hi] | 1 << hi), chosen | 1 << hi);
        self.run(cand & !(1 << hi), chosen);
    }
}

/// Maximum independent set by branch and bound over 64-bit vertex sets.
///
/// Vertices of degree at most one are taken without branching; otherwise
/// the search branches on a maximum-degree vertex.
pub fn exact_mis(inst: &MisInstance) -> Result<Vec<usize>> {
    let n = inst.n();
    if n > EXACT_MIS_MAX_NODES {
        return Err(Error::TooLarge(format!("exact MIS supports n <= {EXACT_MIS_MAX_NODES}, got {n}")));
    }
    let nbr: Vec<u64> = (0..n)
        .map(|v| inst.neighbors(v).iter().fold(0u64, |acc, &w| acc | 1 << w))
        .collect();
    let mut search = Search { nbr, best: 0, best_size: 0 };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    search.run(all, 0);
    Ok((0..n).filter(|&v| search.best & (1 << v) != 0).collect())
}

/// Static ascending-degree greedy, ties broken by node index.
pub fn greedy_mis(inst: &MisInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.n()).collect();
    order.sort_by_key(|&v| (inst.degree(v), v));
    let mut taken = vec![false; inst.n()];
    let mut blocked = vec![false; inst.n()];
    for v in order {
        if !blocked[v] {
            taken[v] = true;
            blocked[v] = true;
            for &w in inst.neighbors(v) {
                blocked[w] = true;
            }
        }
    }
    (0..inst.n()).filter(|&v| taken[v]).collect()
}

/// Improves an independent set with (1,2)-swaps: drop one member and add
/// two non-adjacent nodes whose only member neighbour it was. Repeats until
/// no swap applies, then fills the set up to maximality.
pub fn augment_mis(inst: &MisInstance, set: Vec<usize>) -> Vec<usize> {
    let n = inst.n();
    let mut member = vec![false; n];
    let mut tight = vec![0usize; n];
    let add = |v: usize, member: &mut Vec<bool>, tight: &mut Vec<usize>| {
        member[v] = true;
        for &w in inst.neighbors(v) {
            tight[w] += 1;
        }
    };
    for v in set {
        add(v, &mut member, &mut tight);
    }
    fill(inst, &mut member, &mut tight);
    let mut improved = true;
    while improved {
        improved = false;
        for v in 0..n {
            if !member[v] {
                continue;
            }
            let free: Vec<usize> = inst
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| !member[w] && tight[w] == 1)
                .collect();
            let pair = free.iter().enumerate().find_map(|(i, &a)| {
                free[i + 1..]
                    .iter()
                    .find(|&&b| inst.neighbors(a).binary_search(&b).is_err())
                    .map(|&b| (a, b))
            });
            if let Some((a, b)) = pair {
                member[v] = false;
                for &w in inst.neighbors(v) {
                    tight[w] -= 1;
                }
                add(a, &mut member, &mut tight);
                add(b, &mut member, &mut tight);
                fill(inst, &mut member, &mut tight);
                improved = true;
            }
        }
    }
    (0..n).filter(|&v| member[v]).collect()
}

fn fill(inst: &MisInstance, member: &mut [bool], tight: &mut [usize]) {
    for v in 0..inst.n() {
        if !member[v] && tight[v] == 0 {
            member[v] = true;
            for &w in inst.neighbors(v) {
                tight[w] += 1;
            }
        }
    }
}
