//! Lattice and operator generators for tests and fuzzing.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FiniteLattice, Operator};

pub fn chain(n: usize) -> FiniteLattice {
    FiniteLattice::from_order(n, |a, b| a <= b).expect("a chain is a lattice")
}

/// Subsets of `{1..k}` ordered by inclusion; element `i` is the bit mask `i`.
pub fn powerset(k: u32) -> FiniteLattice {
    let n = 1usize << k;
    let labels = (0..n)
        .map(|m| {
            let items: Vec<String> = (0..k).filter(|b| m >> b & 1 == 1).map(|b| alloc::format!("{}", b + 1)).collect();
            alloc::format!("{{{}}}", items.join(","))
        })
        .collect();
    FiniteLattice::from_order(n, |a, b| a & b == a).expect("a powerset is a lattice").with_labels(labels)
}

/// A random lattice of exactly `size` elements, deterministic in `seed`:
/// a chain, a powerset when `size` is a power of two, or an intersection-closed
/// family of sets with a chain on top to reach the size. Element indices
/// are shuffled.
pub fn random_lattice(size: usize, seed: u64) -> FiniteLattice {
    assert!(size >= 1, "lattices are non-empty");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = rng.gen_range(0..3);
    let order: Vec<Vec<bool>> = if size <= 2 || kind == 0 {
        (0..size).map(|a| (0..size).map(|b| a <= b).collect()).collect()
    } else if kind == 1 && size.is_power_of_two() {
        (0..size).map(|a| (0..size).map(|b| a & b == a).collect()).collect()
    } else {
        moore_family(size, &mut rng)
    };
    let mut perm: Vec<usize> = (0..size).collect();
    perm.shuffle(&mut rng);
    let mut inv = alloc::vec![0; size];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    FiniteLattice::from_order(size, |a, b| order[inv[a]][inv[b]]).expect("generated order is a lattice")
}

fn moore_family(size: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<bool>> {
    let bits = (usize::BITS - (size - 1).leading_zeros()).clamp(1, 12) + 1;
    let full: u32 = (1u32 << bits) - 1;
    let mut family: Vec<u32> = alloc::vec![full];
    for _ in 0..8 * size {
        if family.len() >= size {
            break;
        }
        let candidate = rng.gen::<u32>() & full;
        let mut grown = family.clone();
        let mut i = 0;
        if !grown.contains(&candidate) {
            grown.push(candidate);
        }
        // Close under pairwise intersection.
        while i < grown.len() {
            for j in 0..grown.len() {
                let m = grown[i] & grown[j];
                if !grown.contains(&m) {
                    grown.push(m);
                }
            }
            i += 1;
            if grown.len() > size {
                break;
            }
        }
        if grown.len() <= size {
            family = grown;
        }
    }
    let sets = family.len();
    let le = |a: usize, b: usize| -> bool {
        match (a < sets, b < sets) {
            (true, true) => family[a] & family[b] == family[a],
            (true, false) => true,
            (false, true) => false,
            (false, false) => a <= b,
        }
    };
    (0..size).map(|a| (0..size).map(|b| le(a, b)).collect()).collect()
}

/// Uniform over all tables.
pub fn random_operator(l: &FiniteLattice, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    l.elements().map(|_| rng.gen_range(0..l.size())).collect()
}

/// A random monotone operator: elements are visited in a linear extension
/// and each image is drawn above the images of the elements below it.
pub fn random_monotone_operator(l: &FiniteLattice, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = l.elements().collect();
    order.sort_by_key(|&x| l.elements().filter(|&y| l.leq(y, x)).count());
    let mut phi: Vec<Option<usize>> = alloc::vec![None; l.size()];
    for x in order {
        let lb = l.sup(l.elements().filter(|&z| z != x && l.leq(z, x)).map(|z| phi[z].expect("visited")));
        let above: Vec<usize> = l.elements().filter(|&y| l.leq(lb, y)).collect();
        phi[x] = Some(above[rng.gen_range(0..above.len())]);
    }
    phi.into_iter().map(|y| y.expect("total")).collect()
}

/// Every lattice on `0..n` with bottom `0` and top `n - 1` (labelled, so
/// isomorphic copies repeat). Meant for `n <= 6`.
pub fn all_lattices(n: usize) -> Vec<FiniteLattice> {
    if n <= 2 {
        return if n == 0 { Vec::new() } else { alloc::vec![chain(n)] };
    }
    let mid: Vec<usize> = (1..n - 1).collect();
    let pairs: Vec<(usize, usize)> =
        mid.iter().flat_map(|&a| mid.iter().filter(move |&&b| b != a).map(move |&b| (a, b))).collect();
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << pairs.len()) {
        let rel = |a: usize, b: usize| {
            a == b
                || a == 0
                || b == n - 1
                || pairs.iter().position(|&p| p == (a, b)).is_some_and(|i| bits >> i & 1 == 1)
        };
        if let Ok(l) = FiniteLattice::from_order(n, rel) {
            out.push(l);
        }
    }
    out
}
