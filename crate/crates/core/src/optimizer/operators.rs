//! Tournament selection, mixed-integer crossover and mutation.

use alloc::vec::Vec;

use rand::Rng;

use super::Individual;
use crate::constellation::{GeneBounds, WalkerChromosome};
use crate::math::{fabs, pow};

/// Crowded-comparison: lower rank wins, then larger crowding distance.
pub fn crowded_better(a: &Individual, b: &Individual) -> bool {
    a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding)
}

/// Draws `k` parents by `tournament_size`-ary tournaments with replacement.
/// Returns indices into `pop`; ties go to the first contestant drawn.
pub fn select<R: Rng + ?Sized>(pop: &[Individual], k: usize, tournament_size: usize, rng: &mut R) -> Vec<usize> {
    assert!(!pop.is_empty(), "selection from an empty population");
    let size = tournament_size.max(1);
    (0..k)
        .map(|_| {
            let mut best = rng.random_range(0..pop.len());
            for _ in 1..size {
                let c = rng.random_range(0..pop.len());
                if crowded_better(&pop[c], &pop[best]) {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Bounded simulated binary crossover of one variable.
fn sbx<R: Rng + ?Sized>(x1: f64, x2: f64, lo: f64, hi: f64, eta: f64, rng: &mut R) -> (f64, f64) {
    if fabs(x1 - x2) < 1e-14 || hi <= lo {
        return (x1, x2);
    }
    let (y1, y2) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
    let u: f64 = rng.random();
    let spread = |beta: f64| {
        let alpha = 2.0 - pow(beta, -(eta + 1.0));
        if u <= 1.0 / alpha {
            pow(u * alpha, 1.0 / (eta + 1.0))
        } else {
            pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0))
        }
    };
    let d = y2 - y1;
    let bq1 = spread(1.0 + 2.0 * (y1 - lo) / d);
    let c1 = 0.5 * ((y1 + y2) - bq1 * d);
    let bq2 = spread(1.0 + 2.0 * (hi - y2) / d);
    let c2 = 0.5 * ((y1 + y2) + bq2 * d);
    let (c1, c2) = (c1.clamp(lo, hi), c2.clamp(lo, hi));
    if x1 < x2 {
        (c1, c2)
    } else {
        (c2, c1)
    }
}

/// Bounded polynomial mutation of one variable.
fn polynomial<R: Rng + ?Sized>(x: f64, lo: f64, hi: f64, eta: f64, rng: &mut R) -> f64 {
    if hi <= lo {
        return lo;
    }
    let d = hi - lo;
    let (d1, d2) = ((x - lo) / d, (hi - x) / d);
    let u: f64 = rng.random();
    let p = 1.0 / (eta + 1.0);
    let dq = if u < 0.5 {
        pow(2.0 * u + (1.0 - 2.0 * u) * pow(1.0 - d1, eta + 1.0), p) - 1.0
    } else {
        1.0 - pow(2.0 * (1.0 - u) + 2.0 * (u - 0.5) * pow(1.0 - d2, eta + 1.0), p)
    };
    (x + dq * d).clamp(lo, hi)
}

/// Crossover of two parents.
///
/// With probability `prob` the continuous genes (a, e, i) are blended by SBX
/// and the integer genes (P, F, n) are exchanged after a single cut point;
/// otherwise the children are copies. Children are repaired into `bounds`.
pub fn crossover<R: Rng + ?Sized>(
    p1: &WalkerChromosome,
    p2: &WalkerChromosome,
    prob: f64,
    eta: f64,
    bounds: &GeneBounds,
    rng: &mut R,
) -> (WalkerChromosome, WalkerChromosome) {
    if !rng.random_bool(prob.clamp(0.0, 1.0)) {
        return (*p1, *p2);
    }
    let (a1, a2) = sbx(p1.a_km, p2.a_km, bounds.a_km.0, bounds.a_km.1, eta, rng);
    let (e1, e2) = sbx(p1.e, p2.e, bounds.e.0, bounds.e.1, eta, rng);
    let (i1, i2) = sbx(p1.i_deg, p2.i_deg, bounds.i_deg.0, bounds.i_deg.1, eta, rng);
    let ints1 = [p1.planes, p1.phasing, p1.per_plane];
    let ints2 = [p2.planes, p2.phasing, p2.per_plane];
    let cut = rng.random_range(1..ints1.len());
    let mut k1 = ints1;
    let mut k2 = ints2;
    k1[cut..].copy_from_slice(&ints2[cut..]);
    k2[cut..].copy_from_slice(&ints1[cut..]);
    let c1 = WalkerChromosome { a_km: a1, e: e1, i_deg: i1, planes: k1[0], phasing: k1[1], per_plane: k1[2] };
    let c2 = WalkerChromosome { a_km: a2, e: e2, i_deg: i2, planes: k2[0], phasing: k2[1], per_plane: k2[2] };
    (repair(&c1, bounds), repair(&c2, bounds))
}

/// Per-gene mutation with probability `prob`: polynomial for continuous
/// genes, uniform redraw for integer genes.
pub fn mutate<R: Rng + ?Sized>(
    genes: &WalkerChromosome,
    prob: f64,
    eta: f64,
    bounds: &GeneBounds,
    rng: &mut R,
) -> WalkerChromosome {
    let prob = prob.clamp(0.0, 1.0);
    let mut g = *genes;
    if rng.random_bool(prob) {
        g.a_km = polynomial(g.a_km, bounds.a_km.0, bounds.a_km.1, eta, rng);
    }
    if rng.random_bool(prob) {
        g.e = polynomial(g.e, bounds.e.0, bounds.e.1, eta, rng);
    }
    if rng.random_bool(prob) {
        g.i_deg = polynomial(g.i_deg, bounds.i_deg.0, bounds.i_deg.1, eta, rng);
    }
    if rng.random_bool(prob) {
        g.planes = rng.random_range(bounds.planes.0..=bounds.planes.1);
    }
    if rng.random_bool(prob) {
        let hi = bounds.phasing_max(g.planes).max(bounds.phasing.0);
        g.phasing = rng.random_range(bounds.phasing.0..=hi);
    }
    if rng.random_bool(prob) {
        g.per_plane = rng.random_range(bounds.per_plane.0..=bounds.per_plane.1);
    }
    repair(&g, bounds)
}

/// Uniform random chromosome within `bounds`.
pub fn random_chromosome<R: Rng + ?Sized>(bounds: &GeneBounds, rng: &mut R) -> WalkerChromosome {
    let uniform = |rng: &mut R, (lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let a_km = uniform(rng, bounds.a_km);
    let e = uniform(rng, bounds.e);
    let i_deg = uniform(rng, bounds.i_deg);
    let planes = rng.random_range(bounds.planes.0..=bounds.planes.1);
    let per_plane = rng.random_range(bounds.per_plane.0..=bounds.per_plane.1);
    let phasing = rng.random_range(bounds.phasing.0..=bounds.phasing_max(planes).max(bounds.phasing.0));
    repair(&WalkerChromosome { a_km, e, i_deg, planes, phasing, per_plane }, bounds)
}

/// Clamps every gene into `bounds` and shrinks `P·n` under the total cap.
pub fn repair(g: &WalkerChromosome, bounds: &GeneBounds) -> WalkerChromosome {
    let mut c = *g;
    c.a_km = c.a_km.clamp(bounds.a_km.0, bounds.a_km.1);
    c.e = c.e.clamp(bounds.e.0, bounds.e.1);
    c.i_deg = c.i_deg.clamp(bounds.i_deg.0, bounds.i_deg.1);
    c.planes = c.planes.clamp(bounds.planes.0, bounds.planes.1);
    c.per_plane = c.per_plane.clamp(bounds.per_plane.0, bounds.per_plane.1);
    while c.total() > bounds.max_total {
        if c.per_plane >= c.planes && c.per_plane > bounds.per_plane.0 {
            c.per_plane -= 1;
        } else if c.planes > bounds.planes.0 {
            c.planes -= 1;
        } else if c.per_plane > bounds.per_plane.0 {
            c.per_plane -= 1;
        } else {
            break;
        }
    }
    c.phasing = c.phasing.clamp(bounds.phasing.0, bounds.phasing_max(c.planes).max(bounds.phasing.0));
    c
}
